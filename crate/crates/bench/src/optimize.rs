//! `optimize`: one seeded run of an optimizer on a benchmark problem.

use std::time::Instant;

use stiefel_core::optim::{
    CayleyAdam, CayleyAdamConfig, CayleySgd, CayleySgdConfig, EuclidAdam, EuclidAdamConfig, EuclidSgd,
    OptimizerFamily, Retraction,
};
use stiefel_core::problems::{
    default_spectrum, make_procrustes, make_subspace, project_unchecked, Objective, ToyNet, ToyNetConfig,
    TrainingSetup,
};
use stiefel_core::stiefel::{orthonormality_error, random_point};
use stiefel_core::{Complex64, Error, Matrix, Rng, Scalar, StiefelPoint};

use crate::config::{ExperimentConfig, OptimizerKind, ProblemKind, RetractionKind, ScalarKind};
use crate::csvout::{self, Sink};
use crate::exit::Failure;

pub const RECORD_HEADER: [&str; 7] = [
    csvout::SCHEMA_FIELD,
    "step",
    "loss",
    "riem_grad_norm",
    "ortho_error",
    "alpha_used",
    "wall_ms",
];

/// State of the live parameter after `step` updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub step: u64,
    pub loss: f64,
    pub riem_grad_norm: f64,
    pub ortho_error: f64,
    /// Step length of the update that produced this state: the guarded α of
    /// a Cayley step, the learning rate of a Euclidean one.
    pub alpha_used: f64,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    pub fn fields(&self) -> [String; 7] {
        [
            csvout::SCHEMA_VALUE.to_string(),
            self.step.to_string(),
            csvout::float(self.loss),
            csvout::float(self.riem_grad_norm),
            csvout::float(self.ortho_error),
            csvout::float(self.alpha_used),
            csvout::float(self.wall_ms),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub steps: u64,
    /// Smallest loss over all iterates, the starting point included.
    pub best_loss: f64,
    pub final_loss: f64,
    pub optimum: Option<f64>,
    pub max_ortho_error: f64,
    pub final_ortho_error: f64,
    pub final_riem_grad_norm: f64,
}

impl Summary {
    pub fn best_gap(&self) -> Option<f64> {
        self.optimum.map(|o| self.best_loss - o)
    }

    pub fn line(&self, cfg: &ExperimentConfig) -> String {
        let opt = |v: Option<f64>| v.map(csvout::float).unwrap_or_else(|| "none".into());
        format!(
            "summary problem={:?} optimizer={:?} seed={} steps={} best_loss={} final_loss={} optimum={} best_gap={} max_ortho_error={} final_ortho_error={}",
            cfg.problem,
            cfg.optimizer,
            cfg.seed,
            self.steps,
            csvout::float(self.best_loss),
            csvout::float(self.final_loss),
            opt(self.optimum),
            opt(self.best_gap()),
            csvout::float(self.max_ortho_error),
            csvout::float(self.final_ortho_error),
        )
        .to_lowercase()
    }
}

/// Runs `cfg`, handing every logged record to `on_record`.
pub fn run(
    cfg: &ExperimentConfig,
    on_record: &mut dyn FnMut(&ExperimentRecord) -> Result<(), Failure>,
) -> Result<Summary, Failure> {
    cfg.validate()?;
    let mut rng = Rng::new(cfg.seed);
    match (cfg.problem, cfg.scalar) {
        (ProblemKind::Toynet, _) => run_toynet(cfg, &mut rng, on_record),
        (ProblemKind::Procrustes, ScalarKind::Real) => {
            let problem = make_procrustes::<f64>(&mut rng, cfg.n)?;
            run_matrix(cfg, &problem, StiefelPoint::eye(cfg.n, cfg.n)?, on_record)
        }
        (ProblemKind::Procrustes, ScalarKind::Complex) => {
            let problem = make_procrustes::<Complex64>(&mut rng, cfg.n)?;
            run_matrix(cfg, &problem, StiefelPoint::eye(cfg.n, cfg.n)?, on_record)
        }
        (ProblemKind::Subspace, ScalarKind::Real) => {
            let problem = make_subspace::<f64>(&mut rng, cfg.n, cfg.p, &default_spectrum(cfg.n, cfg.p))?;
            let x0 = random_point(&mut rng, cfg.n, cfg.p)?;
            run_matrix(cfg, &problem, x0, on_record)
        }
        (ProblemKind::Subspace, ScalarKind::Complex) => {
            let problem = make_subspace::<Complex64>(&mut rng, cfg.n, cfg.p, &default_spectrum(cfg.n, cfg.p))?;
            let x0 = random_point(&mut rng, cfg.n, cfg.p)?;
            run_matrix(cfg, &problem, x0, on_record)
        }
    }
}

/// Runs `cfg` and writes the CSV log to `sink`; the sink is flushed even
/// when the run fails.
pub fn run_to_csv(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Summary, Failure> {
    sink.write_record(RECORD_HEADER)?;
    let result = run(cfg, &mut |r| {
        sink.write_record(r.fields())?;
        Ok(())
    });
    sink.flush()?;
    result
}

fn retraction(cfg: &ExperimentConfig) -> Retraction {
    match cfg.retraction {
        RetractionKind::Iterative => Retraction::Iterative { iterations: cfg.s },
        RetractionKind::Closed => Retraction::Closed,
    }
}

enum Stepper<T> {
    CayleySgd(CayleySgd<T>),
    CayleyAdam(CayleyAdam<T>),
    Sgd(EuclidSgd<T>),
    Adam(EuclidAdam<T>),
}

enum Iterate<T> {
    On(StiefelPoint<T>),
    Free(Matrix<T>),
}

impl<T: Scalar> Iterate<T> {
    fn matrix(&self) -> &Matrix<T> {
        match self {
            Iterate::On(x) => x.matrix(),
            Iterate::Free(m) => m,
        }
    }
}

fn stepper<T: Scalar>(cfg: &ExperimentConfig, rows: usize, cols: usize) -> Result<Stepper<T>, Failure> {
    Ok(match cfg.optimizer {
        OptimizerKind::CayleySgd => {
            let mut c = CayleySgdConfig::new(cfg.lr, cfg.beta).with_retraction(retraction(cfg));
            c.q = cfg.q;
            c.eps = cfg.eps;
            Stepper::CayleySgd(CayleySgd::new(c, rows, cols)?)
        }
        OptimizerKind::CayleyAdam => {
            let mut c = CayleyAdamConfig::new(cfg.lr, cfg.beta1, cfg.beta2).with_retraction(retraction(cfg));
            c.q = cfg.q;
            c.eps = cfg.eps;
            Stepper::CayleyAdam(CayleyAdam::new(c, rows, cols)?)
        }
        OptimizerKind::Sgd => Stepper::Sgd(EuclidSgd::new(cfg.lr, cfg.beta, rows, cols)),
        OptimizerKind::Adam => {
            let mut c = EuclidAdamConfig::new(cfg.lr);
            c.beta1 = cfg.beta1;
            c.beta2 = cfg.beta2;
            c.eps = cfg.eps;
            Stepper::Adam(EuclidAdam::new(c, rows, cols))
        }
    })
}

fn non_finite(step: u64) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::NonFiniteGradient => Failure::NonFinite { step },
        other => Failure::Core(other),
    }
}

fn run_matrix<T: Scalar, P: Objective<T>>(
    cfg: &ExperimentConfig,
    problem: &P,
    x0: StiefelPoint<T>,
    on_record: &mut dyn FnMut(&ExperimentRecord) -> Result<(), Failure>,
) -> Result<Summary, Failure> {
    let (n, p) = problem.dims();
    let mut opt = stepper::<T>(cfg, n, p)?;
    let mut x = if cfg.optimizer.is_cayley() {
        Iterate::On(x0.retolerate(cfg.ortho_tol)?)
    } else {
        Iterate::Free(x0.into_matrix())
    };
    let start = Instant::now();
    let mut summary = Summary {
        steps: cfg.steps,
        best_loss: f64::INFINITY,
        final_loss: f64::NAN,
        optimum: problem.optimum(),
        max_ortho_error: 0.0,
        final_ortho_error: f64::NAN,
        final_riem_grad_norm: f64::NAN,
    };
    let mut alpha = f64::NAN;
    for k in 0..=cfg.steps {
        let xm = x.matrix();
        let loss = problem.loss(xm)?;
        let grad = problem.grad(xm)?;
        if !loss.is_finite() || !grad.is_finite() {
            return Err(Failure::NonFinite { step: k });
        }
        let ortho = orthonormality_error(xm);
        let riem = project_unchecked(xm, &grad)?.frobenius_norm();
        summary.best_loss = summary.best_loss.min(loss);
        summary.max_ortho_error = summary.max_ortho_error.max(ortho);
        summary.final_loss = loss;
        summary.final_ortho_error = ortho;
        summary.final_riem_grad_norm = riem;
        if k > 0 && (k % cfg.log_every == 0 || k == cfg.steps) {
            on_record(&ExperimentRecord {
                step: k,
                loss,
                riem_grad_norm: riem,
                ortho_error: ortho,
                alpha_used: alpha,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            })?;
        }
        if k == cfg.steps {
            break;
        }
        x = match (&mut opt, x) {
            (Stepper::CayleySgd(o), Iterate::On(pt)) => {
                let st = o.step(&pt, &grad).map_err(non_finite(k))?;
                alpha = st.alpha;
                Iterate::On(st.point)
            }
            (Stepper::CayleyAdam(o), Iterate::On(pt)) => {
                let st = o.step(&pt, &grad).map_err(non_finite(k))?;
                alpha = st.alpha;
                Iterate::On(st.point)
            }
            (Stepper::Sgd(o), Iterate::Free(m)) => {
                alpha = cfg.lr;
                Iterate::Free(o.step(&m, &grad)?)
            }
            (Stepper::Adam(o), Iterate::Free(m)) => {
                alpha = cfg.lr;
                Iterate::Free(o.step(&m, &grad)?)
            }
            _ => unreachable!("iterate kind follows the optimizer"),
        };
    }
    Ok(summary)
}

/// Training setup for `toynet` derived from the flags.
pub fn toynet_setup(cfg: &ExperimentConfig) -> TrainingSetup {
    let family = if cfg.optimizer.is_adam() {
        OptimizerFamily::Adam { beta1: cfg.beta1, beta2: cfg.beta2 }
    } else {
        OptimizerFamily::Sgd { beta: cfg.beta }
    };
    TrainingSetup {
        family,
        euclidean_lr: cfg.lr,
        stiefel_lr: cfg.lr_stiefel,
        constrained: cfg.optimizer.is_cayley(),
        ortho_tol: cfg.ortho_tol,
    }
}

fn run_toynet(
    cfg: &ExperimentConfig,
    rng: &mut Rng,
    on_record: &mut dyn FnMut(&ExperimentRecord) -> Result<(), Failure>,
) -> Result<Summary, Failure> {
    let net_cfg = ToyNetConfig {
        hidden1: cfg.n,
        hidden2: cfg.p,
        seed: cfg.seed,
        ..ToyNetConfig::default()
    };
    let mut net = ToyNet::new(rng, net_cfg, toynet_setup(cfg))?;
    let start = Instant::now();
    let mut summary = Summary {
        steps: cfg.steps,
        best_loss: f64::INFINITY,
        final_loss: f64::NAN,
        optimum: None,
        max_ortho_error: 0.0,
        final_ortho_error: f64::NAN,
        final_riem_grad_norm: f64::NAN,
    };
    let mut alpha = f64::NAN;
    for k in 0..=cfg.steps {
        let ortho = net.constrained_error();
        // `step` reports the loss at the weights it started from.
        let (loss, grad_norm, next_alpha) = if k == cfg.steps {
            let (loss, g) = net.loss_and_grad_norm()?;
            (loss, g, alpha)
        } else {
            let st = net.step().map_err(non_finite(k))?;
            (st.loss, st.grad_norm, st.alpha.unwrap_or(cfg.lr))
        };
        if !loss.is_finite() || !grad_norm.is_finite() {
            return Err(Failure::NonFinite { step: k });
        }
        summary.best_loss = summary.best_loss.min(loss);
        summary.max_ortho_error = summary.max_ortho_error.max(ortho);
        summary.final_loss = loss;
        summary.final_ortho_error = ortho;
        summary.final_riem_grad_norm = grad_norm;
        if k > 0 && (k % cfg.log_every == 0 || k == cfg.steps) {
            on_record(&ExperimentRecord {
                step: k,
                loss,
                riem_grad_norm: grad_norm,
                ortho_error: ortho,
                alpha_used: alpha,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            })?;
        }
        alpha = next_alpha;
    }
    Ok(summary)
}

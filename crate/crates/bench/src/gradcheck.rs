//! `gradcheck`: directional finite-difference checks of every problem.

use stiefel_core::problems::{
    default_spectrum, fd_check, make_procrustes, make_subspace, FdReport, Objective, ScaledGradient, ToyNet,
    ToyNetConfig, TrainingSetup,
};
use stiefel_core::stiefel::random_point;
use stiefel_core::{Complex64, Field, Rng, Scalar};

use crate::config::ScalarKind;
use crate::csvout;
use crate::exit::{usage, Failure};

pub const TOLERANCE: f64 = 1e-4;
/// Gradient multiplier of the negative control.
pub const CORRUPTION: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckConfig {
    pub points: usize,
    /// Random directions per point.
    pub trials: usize,
    pub seed: u64,
    /// `None` checks both fields.
    pub scalar: Option<ScalarKind>,
    pub corrupt: bool,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        Self {
            points: 20,
            trials: 5,
            seed: 0,
            scalar: None,
            corrupt: false,
        }
    }
}

impl GradcheckConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.points == 0 {
            return Err(usage("--points must be at least 1"));
        }
        if self.trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        Ok(())
    }

    fn factor(&self) -> f64 {
        if self.corrupt {
            CORRUPTION
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemCheck {
    pub problem: &'static str,
    pub scalar: ScalarKind,
    pub points: usize,
    pub report: FdReport,
}

impl ProblemCheck {
    pub fn passes(&self) -> bool {
        self.report.passes(TOLERANCE)
    }

    pub fn verdict(&self) -> String {
        format!(
            "{} gradcheck problem={} scalar={:?} points={} directions={} max_error={:e}",
            if self.passes() { "PASS" } else { "FAIL" },
            self.problem,
            self.scalar,
            self.points,
            self.report.trials,
            self.report.max_error
        )
        .replace("scalar=Real", "scalar=real")
        .replace("scalar=Complex", "scalar=complex")
    }

    pub fn csv_fields(&self) -> [String; 7] {
        [
            csvout::SCHEMA_VALUE.into(),
            self.problem.into(),
            if self.scalar == ScalarKind::Real { "real" } else { "complex" }.into(),
            self.points.to_string(),
            self.report.trials.to_string(),
            csvout::float(self.report.max_error),
            self.passes().to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = [csvout::SCHEMA_FIELD, "problem", "scalar", "points", "directions", "max_error", "pass"];

pub fn run(cfg: &GradcheckConfig) -> Result<Vec<ProblemCheck>, Failure> {
    cfg.validate()?;
    let mut out = Vec::new();
    let fields: Vec<ScalarKind> = match cfg.scalar {
        Some(s) => vec![s],
        None => vec![ScalarKind::Real, ScalarKind::Complex],
    };
    for &field in &fields {
        match field {
            ScalarKind::Real => {
                out.push(matrix_problems::<f64>(cfg, "procrustes", 0)?);
                out.push(matrix_problems::<f64>(cfg, "subspace", 1)?);
            }
            ScalarKind::Complex => {
                out.push(matrix_problems::<Complex64>(cfg, "procrustes", 2)?);
                out.push(matrix_problems::<Complex64>(cfg, "subspace", 3)?);
            }
        }
    }
    if fields.contains(&ScalarKind::Real) {
        out.push(toynet(cfg)?);
    }
    Ok(out)
}

fn matrix_problems<T: Scalar>(cfg: &GradcheckConfig, name: &'static str, stream: u64) -> Result<ProblemCheck, Failure> {
    let mut rng = Rng::with_stream(cfg.seed, stream);
    let report = if name == "procrustes" {
        let problem = make_procrustes::<T>(&mut rng, 16)?;
        check_points(cfg, &ScaledGradient { inner: problem, factor: cfg.factor() }, &mut rng)?
    } else {
        let problem = make_subspace::<T>(&mut rng, 50, 5, &default_spectrum(50, 5))?;
        check_points(cfg, &ScaledGradient { inner: problem, factor: cfg.factor() }, &mut rng)?
    };
    Ok(ProblemCheck {
        problem: name,
        scalar: match T::FIELD {
            Field::Real => ScalarKind::Real,
            Field::Complex => ScalarKind::Complex,
        },
        points: cfg.points,
        report,
    })
}

fn check_points<T: Scalar, P: Objective<T>>(cfg: &GradcheckConfig, problem: &P, rng: &mut Rng) -> Result<FdReport, Failure> {
    let (n, p) = problem.dims();
    let mut report = FdReport::default();
    for _ in 0..cfg.points {
        let x = random_point::<T>(rng, n, p)?;
        report.merge(&fd_check(problem, &x, rng, cfg.trials)?);
    }
    Ok(report)
}

fn toynet(cfg: &GradcheckConfig) -> Result<ProblemCheck, Failure> {
    let mut rng = Rng::with_stream(cfg.seed, 4);
    let net_cfg = ToyNetConfig { seed: cfg.seed, ..ToyNetConfig::default() };
    let mut report = FdReport::default();
    for _ in 0..cfg.points {
        let net = ToyNet::new(&mut rng, net_cfg, TrainingSetup::default())?;
        report.merge(&net.gradient_check_scaled(&mut rng, cfg.trials, cfg.factor())?);
    }
    Ok(ProblemCheck {
        problem: "toynet",
        scalar: ScalarKind::Real,
        points: cfg.points,
        report,
    })
}

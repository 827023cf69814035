//! `unitary-check`: how far Cayley SGD drifts from the unitary group when the
//! fixed-point iteration is cut at `s` sweeps.
//!
//! Every variant starts from the same point of the same complex
//! dominant-subspace problem and takes the same number of steps; the drift
//! `‖XᴴX − I‖_F` is averaged over the points after each step.

use stiefel_core::optim::{CayleySgd, CayleySgdConfig, Retraction};
use stiefel_core::problems::{default_spectrum, make_subspace, Objective};
use stiefel_core::stiefel::{random_point, DEFAULT_EPS, DEFAULT_Q};
use stiefel_core::{Complex64, Rng};

use crate::config::{positive, unit_interval};
use crate::csvout;
use crate::exit::{usage, Failure};

pub const DEFAULT_SIZES: [usize; 2] = [116, 512];
pub const S2_LIMIT: f64 = 1e-4;
/// Sweeps beyond two may remove at most this fraction of the drift that
/// the first two sweeps removed.
pub const SATURATION_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryConfig {
    pub sizes: Vec<usize>,
    pub p: usize,
    pub steps: u64,
    pub seed: u64,
    pub lr: f64,
    pub beta: f64,
    pub q: f64,
    pub eps: f64,
    pub max_s: usize,
}

impl Default for UnitaryConfig {
    fn default() -> Self {
        Self {
            sizes: DEFAULT_SIZES.to_vec(),
            p: 8,
            steps: 200,
            seed: 0,
            lr: 1e-3,
            beta: 0.9,
            q: DEFAULT_Q,
            eps: DEFAULT_EPS,
            max_s: 4,
        }
    }
}

impl UnitaryConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.sizes.is_empty() {
            return Err(usage("--sizes must list at least one size"));
        }
        if self.p == 0 || self.sizes.iter().any(|&n| n < self.p) {
            return Err(usage("every size must satisfy 0 < p <= n"));
        }
        if self.steps == 0 {
            return Err(usage("--steps must be at least 1"));
        }
        if self.max_s < 3 {
            return Err(usage("--max-s must be at least 3"));
        }
        positive("lr", self.lr)?;
        unit_interval("beta", self.beta, true)?;
        unit_interval("q", self.q, false)?;
        positive("eps", self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftRow {
    pub n: usize,
    pub p: usize,
    /// Sweep count, `None` for the closed form.
    pub sweeps: Option<usize>,
    pub mean: f64,
    pub max: f64,
    pub last: f64,
}

impl DriftRow {
    pub fn label(&self) -> String {
        self.sweeps.map_or_else(|| "closed".to_string(), |s| s.to_string())
    }

    pub fn csv_fields(&self) -> [String; 7] {
        [
            csvout::SCHEMA_VALUE.into(),
            self.n.to_string(),
            self.p.to_string(),
            self.label(),
            csvout::float(self.mean),
            csvout::float(self.max),
            csvout::float(self.last),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = [csvout::SCHEMA_FIELD, "n", "p", "s", "mean_ortho_error", "max_ortho_error", "final_ortho_error"];

/// All rows for one size, iterative sweeps `0..=max_s` first, then closed.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDrift {
    pub n: usize,
    pub rows: Vec<DriftRow>,
}

impl SizeDrift {
    fn mean(&self, s: usize) -> f64 {
        self.rows[s].mean
    }

    /// Mean drift strictly decreasing over `s = 0..=3`.
    pub fn monotone(&self) -> bool {
        (0..3).all(|s| self.mean(s) > self.mean(s + 1))
    }

    pub fn s2_ok(&self) -> bool {
        self.mean(2) <= S2_LIMIT
    }

    pub fn saturated(&self) -> bool {
        let beyond = self.rows[3..].iter().filter(|r| r.sweeps.is_some()).map(|r| r.mean).fold(f64::INFINITY, f64::min);
        self.mean(2) - beyond <= SATURATION_FRACTION * (self.mean(0) - self.mean(2))
    }

    pub fn passes(&self) -> bool {
        self.monotone() && self.s2_ok() && self.saturated()
    }

    pub fn verdict(&self) -> String {
        let means: Vec<String> = self.rows.iter().map(|r| format!("s{}={:.3e}", r.label(), r.mean)).collect();
        format!(
            "{} unitary-check n={} {} monotone={} s2_le_1e-4={} saturated={}",
            if self.passes() { "PASS" } else { "FAIL" },
            self.n,
            means.join(" "),
            self.monotone(),
            self.s2_ok(),
            self.saturated()
        )
    }
}

pub fn run(cfg: &UnitaryConfig) -> Result<Vec<SizeDrift>, Failure> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (idx, &n) in cfg.sizes.iter().enumerate() {
        let mut rng = Rng::with_stream(cfg.seed, idx as u64);
        let problem = make_subspace::<Complex64>(&mut rng, n, cfg.p, &default_spectrum(n, cfg.p))?;
        let x0 = random_point::<Complex64>(&mut rng, n, cfg.p)?.retolerate(f64::INFINITY)?;
        let variants = (0..=cfg.max_s).map(|s| Retraction::Iterative { iterations: s }).chain([Retraction::Closed]);
        let mut rows = Vec::new();
        for retraction in variants {
            let mut c = CayleySgdConfig::new(cfg.lr, cfg.beta).with_retraction(retraction);
            c.q = cfg.q;
            c.eps = cfg.eps;
            let mut opt = CayleySgd::new(c, n, cfg.p)?;
            let mut x = x0.clone();
            let (mut sum, mut max, mut last) = (0.0, 0.0f64, 0.0);
            for _ in 0..cfg.steps {
                let g = problem.grad(x.matrix())?;
                x = opt.step(&x, &g)?.point;
                last = x.orthonormality_error();
                sum += last;
                max = max.max(last);
            }
            if !sum.is_finite() {
                return Err(Failure::NonFinite { step: cfg.steps });
            }
            rows.push(DriftRow {
                n,
                p: cfg.p,
                sweeps: match retraction {
                    Retraction::Iterative { iterations } => Some(iterations),
                    Retraction::Closed => None,
                },
                mean: sum / cfg.steps as f64,
                max,
                last,
            });
        }
        out.push(SizeDrift { n, rows });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_size_orders_the_sweeps() {
        let cfg = UnitaryConfig { sizes: vec![20], p: 4, steps: 50, ..Default::default() };
        let report = run(&cfg).unwrap();
        let d = &report[0];
        assert_eq!(d.rows.len(), 6);
        assert!(d.monotone(), "{}", d.verdict());
        assert!(d.rows[5].mean < 1e-12);
    }

    #[test]
    fn rejects_real_sized_mistakes() {
        assert!(run(&UnitaryConfig { p: 200, ..Default::default() }).is_err());
        assert!(run(&UnitaryConfig { max_s: 2, ..Default::default() }).is_err());
        assert!(run(&UnitaryConfig { steps: 0, ..Default::default() }).is_err());
    }
}

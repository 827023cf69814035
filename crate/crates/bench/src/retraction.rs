//! `retraction-check`: validity, contraction and order of the Cayley
//! retraction on seeded random `(X, W)`.

use stiefel_core::stiefel::{
    adaptive_alpha, cayley_closed, cayley_iterates, cayley_iterative, random_point, random_skew, retraction_check,
    DEFAULT_EPS, DEFAULT_Q,
};
use stiefel_core::{Complex64, Rng, Scalar, SkewOperator, StiefelPoint};

use crate::config::{unit_interval, ScalarKind};
use crate::csvout;
use crate::exit::{usage, Failure};

pub const DEFAULT_SIZES: [(usize, usize); 3] = [(16, 4), (64, 16), (116, 116)];
pub const ORDER_ALPHAS: [f64; 3] = [0.2, 0.1, 0.05];
/// `2^3.5`: halving α must shrink the `s = 2` error by at least this much.
pub const ORDER_FACTOR: f64 = 11.313708498984761;
pub const CONTRACTION_SLACK: f64 = 1e-6;
pub const CONTRACTION_SWEEPS: usize = 6;
/// Errors below `FLOOR·‖X‖_F` are dominated by the rounding of the reference
/// solve and are not used as denominators.
pub const CONTRACTION_FLOOR: f64 = 1e-7;
pub const NO_GUARD_SWEEPS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct RetractionConfig {
    pub sizes: Vec<(usize, usize)>,
    pub cases: usize,
    pub order_cases: usize,
    pub seed: u64,
    pub scalar: ScalarKind,
    pub q: f64,
    pub eps: f64,
    /// Drive the fixed-point iteration with `α = 2.5√n/‖W‖_F`, beyond the
    /// contraction range, and expect it to diverge.
    pub no_guard: bool,
}

impl Default for RetractionConfig {
    fn default() -> Self {
        Self {
            sizes: DEFAULT_SIZES.to_vec(),
            cases: 50,
            order_cases: 20,
            seed: 0,
            scalar: ScalarKind::Real,
            q: DEFAULT_Q,
            eps: DEFAULT_EPS,
            no_guard: false,
        }
    }
}

impl RetractionConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.sizes.is_empty() {
            return Err(usage("--sizes must list at least one size"));
        }
        if let Some((n, p)) = self.sizes.iter().find(|(n, p)| *p == 0 || p > n) {
            return Err(usage(format!("invalid size {n}x{p}: need 0 < p <= n")));
        }
        if self.cases == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        unit_interval("q", self.q, false)?;
        crate::config::positive("eps", self.eps)
    }
}

/// Results for one `(n, p)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SizeReport {
    pub n: usize,
    pub p: usize,
    /// Random cases plus the `W = 0` case.
    pub cases: usize,
    pub max_c0: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub contraction_checks: usize,
    /// Largest `r_{i+1}/r_i − α‖W‖_F/2` seen.
    pub max_contraction_excess: f64,
    pub order_cases: usize,
    pub min_order_factor: f64,
    /// No-guard mode: cases whose iteration diverged.
    pub diverged: usize,
}

impl SizeReport {
    fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            max_contraction_excess: f64::NEG_INFINITY,
            min_order_factor: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn validity_ok(&self) -> bool {
        self.max_c0 <= 1e-14 && (self.min_ratio > self.max_ratio || (self.min_ratio >= 1.8 && self.max_ratio <= 2.2))
    }

    pub fn contraction_ok(&self) -> bool {
        self.max_contraction_excess <= CONTRACTION_SLACK
    }

    pub fn order_ok(&self) -> bool {
        self.min_order_factor >= ORDER_FACTOR
    }

    pub fn passes(&self, no_guard: bool) -> bool {
        if no_guard {
            self.diverged == self.cases
        } else {
            self.validity_ok() && self.contraction_ok() && self.order_ok()
        }
    }

    pub fn verdict(&self, no_guard: bool) -> String {
        if no_guard {
            let tag = if self.passes(true) { "EXPECTED-FAIL" } else { "FAIL" };
            return format!(
                "{tag} retraction-check n={} p={} unguarded iteration diverged in {}/{} cases",
                self.n, self.p, self.diverged, self.cases
            );
        }
        let tag = if self.passes(false) { "PASS" } else { "FAIL" };
        format!(
            "{tag} retraction-check n={} p={} cases={} max_c0={:e} ratio=[{:.4},{:.4}] contraction_checks={} max_excess={:e} order_cases={} min_order_factor={:.3}",
            self.n,
            self.p,
            self.cases,
            self.max_c0,
            self.min_ratio,
            self.max_ratio,
            self.contraction_checks,
            self.max_contraction_excess,
            self.order_cases,
            self.min_order_factor
        )
    }

    pub fn csv_fields(&self, no_guard: bool) -> Vec<String> {
        vec![
            csvout::SCHEMA_VALUE.into(),
            self.n.to_string(),
            self.p.to_string(),
            self.cases.to_string(),
            csvout::float(self.max_c0),
            csvout::float(self.min_ratio),
            csvout::float(self.max_ratio),
            self.contraction_checks.to_string(),
            csvout::float(self.max_contraction_excess),
            self.order_cases.to_string(),
            csvout::float(self.min_order_factor),
            self.diverged.to_string(),
            self.passes(no_guard).to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 13] = [
    csvout::SCHEMA_FIELD,
    "n",
    "p",
    "cases",
    "max_c0",
    "min_ratio",
    "max_ratio",
    "contraction_checks",
    "max_contraction_excess",
    "order_cases",
    "min_order_factor",
    "diverged",
    "pass",
];

pub fn run(cfg: &RetractionConfig) -> Result<Vec<SizeReport>, Failure> {
    cfg.validate()?;
    match cfg.scalar {
        ScalarKind::Real => run_typed::<f64>(cfg),
        ScalarKind::Complex => run_typed::<Complex64>(cfg),
    }
}

fn run_typed<T: Scalar>(cfg: &RetractionConfig) -> Result<Vec<SizeReport>, Failure> {
    let mut reports: Vec<SizeReport> = cfg.sizes.iter().map(|&(n, p)| SizeReport::new(n, p)).collect();
    let k = cfg.sizes.len();
    for case in 0..cfg.cases {
        let idx = case % k;
        let (n, p) = cfg.sizes[idx];
        let mut rng = Rng::with_stream(cfg.seed, case as u64);
        let x = random_point::<T>(&mut rng, n, p)?.retolerate(1e-10)?;
        // Spread ‖W‖ over two decades.
        let scale = 10f64.powf(2.0 * rng.uniform() - 1.0);
        let w = random_skew::<T>(&mut rng, n).scale(scale);
        let r = &mut reports[idx];
        r.cases += 1;
        if cfg.no_guard {
            if diverges(&x, &w)? {
                r.diverged += 1;
            }
            continue;
        }
        validity(&x, &w, r)?;
        let lr = 10f64.powf(3.0 * rng.uniform() - 2.0);
        contraction(&x, &w, adaptive_alpha(lr, &w, cfg.q, cfg.eps), r)?;
    }
    if !cfg.no_guard {
        for (idx, &(n, p)) in cfg.sizes.iter().enumerate() {
            let mut rng = Rng::with_stream(cfg.seed, (1 << 32) + idx as u64);
            let x = random_point::<T>(&mut rng, n, p)?.retolerate(1e-10)?;
            let w = SkewOperator::<T>::zeros(n);
            let r = &mut reports[idx];
            r.cases += 1;
            validity(&x, &w, r)?;
            contraction(&x, &w, adaptive_alpha(1.0, &w, cfg.q, cfg.eps), r)?;
        }
        for case in 0..cfg.order_cases {
            let idx = case % k;
            let (n, p) = cfg.sizes[idx];
            let mut rng = Rng::with_stream(cfg.seed, (2 << 32) + case as u64);
            let x = random_point::<T>(&mut rng, n, p)?.retolerate(1e-10)?;
            let w = random_skew::<T>(&mut rng, n);
            order(&x, &w, &mut reports[idx])?;
        }
    }
    Ok(reports)
}

fn validity<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>, r: &mut SizeReport) -> Result<(), Failure> {
    let check = retraction_check(x, w)?;
    r.max_c0 = r.max_c0.max(check.c0);
    match check.order_ratio() {
        Some(ratio) => {
            r.min_ratio = r.min_ratio.min(ratio);
            r.max_ratio = r.max_ratio.max(ratio);
        }
        // Zero curvature: the difference quotient must then be exact.
        None if check.c1 > 1e-12 => {
            r.min_ratio = r.min_ratio.min(0.0);
            r.max_ratio = r.max_ratio.max(f64::INFINITY);
        }
        None => {}
    }
    Ok(())
}

fn contraction<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>, alpha: f64, r: &mut SizeReport) -> Result<(), Failure> {
    let target = cayley_closed(x, w, alpha)?;
    let iterates = cayley_iterates(x, w, alpha, CONTRACTION_SWEEPS, x.matrix())?;
    let errs: Vec<f64> = iterates
        .iter()
        .map(|y| y.sub(target.matrix()).map(|d| d.frobenius_norm()))
        .collect::<Result<_, _>>()?;
    let bound = 0.5 * alpha * w.frobenius_norm();
    let floor = CONTRACTION_FLOOR * x.matrix().frobenius_norm().max(1.0);
    for pair in errs.windows(2) {
        if pair[0] > floor {
            r.contraction_checks += 1;
            r.max_contraction_excess = r.max_contraction_excess.max(pair[1] / pair[0] - bound);
        }
    }
    Ok(())
}

fn order<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>, r: &mut SizeReport) -> Result<(), Failure> {
    let wx = w.apply(x.matrix())?;
    let mut errs = [0.0; 3];
    for (e, &alpha) in errs.iter_mut().zip(ORDER_ALPHAS.iter()) {
        let y0 = x.matrix().add_scaled(T::from_real(alpha), &wx)?;
        let y2 = cayley_iterative(x, w, alpha, 2, &y0)?;
        *e = y2.sub(cayley_closed(x, w, alpha)?.matrix())?.frobenius_norm();
    }
    r.order_cases += 1;
    r.min_order_factor = r.min_order_factor.min(errs[0] / errs[1]).min(errs[1] / errs[2]);
    Ok(())
}

/// With `α = 2.5√n/‖W‖_F` we have `α‖W‖₂/2 ≥ 1.25`, so the fixed-point map
/// expands along the top singular direction of `W`.
fn diverges<T: Scalar>(x: &StiefelPoint<T>, w: &SkewOperator<T>) -> Result<bool, Failure> {
    let n = w.dim() as f64;
    let alpha = 2.5 * n.sqrt() / w.frobenius_norm();
    let target = cayley_closed(x, w, alpha)?;
    let y = cayley_iterative(x, w, alpha, NO_GUARD_SWEEPS, x.matrix())?;
    let first = x.matrix().sub(target.matrix())?.frobenius_norm();
    let last = y.sub(target.matrix())?.frobenius_norm();
    Ok(!last.is_finite() || last > first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let cfg = RetractionConfig { sizes: vec![(6, 2), (5, 5)], cases: 6, order_cases: 4, ..Default::default() };
        let reports = run(&cfg).unwrap();
        for r in &reports {
            assert!(r.passes(false), "{}", r.verdict(false));
            assert_eq!(r.cases, 4);
            assert_eq!(r.order_cases, 2);
            assert!(r.contraction_checks > 0);
        }
    }

    #[test]
    fn unguarded_iteration_diverges() {
        let cfg = RetractionConfig { sizes: vec![(8, 3)], cases: 5, no_guard: true, scalar: ScalarKind::Complex, ..Default::default() };
        let r = &run(&cfg).unwrap()[0];
        assert_eq!(r.diverged, 5);
        assert!(r.verdict(true).starts_with("EXPECTED-FAIL"));
    }

    #[test]
    fn rejects_bad_sizes() {
        let cfg = RetractionConfig { sizes: vec![(3, 4)], ..Default::default() };
        assert!(matches!(run(&cfg), Err(Failure::Usage(_))));
        let cfg = RetractionConfig { cases: 0, ..Default::default() };
        assert!(matches!(run(&cfg), Err(Failure::Usage(_))));
    }
}

//! `speed`: wall-clock cost of one retraction, fixed-point (`s` sweeps)
//! against the closed-form solve.
//!
//! Both sides start from the same `(X, W, W X, α)`, which is what an
//! optimizer step holds when it retracts, and both return a checked
//! Stiefel point. The iterative side forms `Y⁰ = X + α W X` and sweeps; the
//! closed side solves `(I − α/2·W) Y = X + α/2·W X`. Repetitions alternate
//! between the two and the median of each is reported.

use std::hint::black_box;
use std::time::Instant;

use stiefel_core::stiefel::{adaptive_alpha, cayley_closed_from, cayley_iterative, random_point, random_skew, DEFAULT_EPS, DEFAULT_Q};
use stiefel_core::{Complex64, Matrix, Rng, Scalar, SkewOperator, StiefelPoint};

use crate::config::ScalarKind;
use crate::csvout;
use crate::exit::{usage, Failure};

pub const DEFAULT_SIZES: [(usize, usize); 4] = [(8, 2), (64, 16), (128, 128), (512, 512)];
/// Only sizes with at least this many rows are held to `ratio < 1`.
pub const ASSERT_MIN_N: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedConfig {
    pub sizes: Vec<(usize, usize)>,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
    pub s: usize,
    pub scalar: ScalarKind,
    pub assert_min_n: usize,
}

impl Default for SpeedConfig {
    fn default() -> Self {
        Self {
            sizes: DEFAULT_SIZES.to_vec(),
            reps: 100,
            warmup: 3,
            seed: 0,
            s: 2,
            scalar: ScalarKind::Real,
            assert_min_n: ASSERT_MIN_N,
        }
    }
}

impl SpeedConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.sizes.is_empty() {
            return Err(usage("--sizes must list at least one size"));
        }
        if let Some((n, p)) = self.sizes.iter().find(|(n, p)| *p == 0 || p > n) {
            return Err(usage(format!("invalid size {n}x{p}: need 0 < p <= n")));
        }
        if self.reps == 0 {
            return Err(usage("--reps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub n: usize,
    pub p: usize,
    pub iterative_ms: f64,
    pub closed_ms: f64,
}

impl Timing {
    pub fn ratio(&self) -> f64 {
        self.iterative_ms / self.closed_ms
    }

    pub fn asserted(&self, min_n: usize) -> bool {
        self.n >= min_n
    }

    pub fn passes(&self, min_n: usize) -> bool {
        !self.asserted(min_n) || self.ratio() < 1.0
    }

    pub fn csv_fields(&self) -> [String; 6] {
        [
            csvout::SCHEMA_VALUE.into(),
            self.n.to_string(),
            self.p.to_string(),
            csvout::float(self.iterative_ms),
            csvout::float(self.closed_ms),
            csvout::float(self.ratio()),
        ]
    }

    pub fn verdict(&self, min_n: usize) -> String {
        let tag = match (self.asserted(min_n), self.passes(min_n)) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        format!(
            "{tag} speed n={} p={} iterative_ms={:.4} closed_ms={:.4} ratio={:.4}",
            self.n,
            self.p,
            self.iterative_ms,
            self.closed_ms,
            self.ratio()
        )
    }
}

pub const CSV_HEADER: [&str; 6] = [csvout::SCHEMA_FIELD, "n", "p", "iterative_ms", "closed_ms", "ratio"];

pub fn run(cfg: &SpeedConfig) -> Result<Vec<Timing>, Failure> {
    cfg.validate()?;
    cfg.sizes
        .iter()
        .enumerate()
        .map(|(idx, &(n, p))| {
            let mut rng = Rng::with_stream(cfg.seed, idx as u64);
            match cfg.scalar {
                ScalarKind::Real => time_size::<f64>(cfg, &mut rng, n, p),
                ScalarKind::Complex => time_size::<Complex64>(cfg, &mut rng, n, p),
            }
        })
        .collect()
}

/// One fixed-point update from `(X, W, W X, α)`.
pub fn iterative_update<T: Scalar>(
    x: &StiefelPoint<T>,
    w: &SkewOperator<T>,
    wx: &Matrix<T>,
    alpha: f64,
    s: usize,
) -> Result<StiefelPoint<T>, Failure> {
    let y0 = x.matrix().add_scaled(T::from_real(alpha), wx)?;
    let y = cayley_iterative(x, w, alpha, s, &y0)?;
    Ok(StiefelPoint::with_tol(y, x.ortho_tol())?)
}

fn time_size<T: Scalar>(cfg: &SpeedConfig, rng: &mut Rng, n: usize, p: usize) -> Result<Timing, Failure> {
    let x = random_point::<T>(rng, n, p)?.retolerate(1.0)?;
    let w = random_skew::<T>(rng, n);
    let wx = w.apply(x.matrix())?;
    let alpha = adaptive_alpha(1.0, &w, DEFAULT_Q, DEFAULT_EPS);
    let mut iter_ms = Vec::with_capacity(cfg.reps);
    let mut closed_ms = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.warmup + cfg.reps {
        let t = Instant::now();
        black_box(iterative_update(black_box(&x), &w, &wx, alpha, cfg.s)?);
        let a = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        black_box(cayley_closed_from(black_box(&x), &w, &wx, alpha)?);
        let b = t.elapsed().as_secs_f64() * 1e3;
        if rep >= cfg.warmup {
            iter_ms.push(a);
            closed_ms.push(b);
        }
    }
    Ok(Timing {
        n,
        p,
        iterative_ms: median(&mut iter_ms),
        closed_ms: median(&mut closed_ms),
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn small_sizes_are_informational() {
        let cfg = SpeedConfig { sizes: vec![(8, 2), (12, 12)], reps: 5, warmup: 1, ..Default::default() };
        let t = run(&cfg).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|t| t.passes(cfg.assert_min_n) && t.iterative_ms > 0.0 && t.closed_ms > 0.0));
        assert!(t[0].verdict(cfg.assert_min_n).starts_with("INFO"));
    }

    #[test]
    fn iterative_update_approximates_closed_form() {
        use stiefel_core::stiefel::cayley_closed;
        let mut rng = Rng::new(4);
        let x = random_point::<f64>(&mut rng, 10, 3).unwrap().retolerate(1e-4).unwrap();
        let w = random_skew::<f64>(&mut rng, 10);
        let wx = w.apply(x.matrix()).unwrap();
        let y = iterative_update(&x, &w, &wx, 0.05, 2).unwrap();
        let c = cayley_closed(&x, &w, 0.05).unwrap();
        let a = 0.5 * 0.05 * w.frobenius_norm();
        assert!(y.matrix().sub(c.matrix()).unwrap().frobenius_norm() <= 2.0 * a.powi(4) * 3f64.sqrt());
    }
}

/// Piecewise-constant decay: `base_lr · factor^{#milestones ≤ step}`.
///
/// `milestones` must be sorted ascending.
pub fn lr_schedule(step: u64, base_lr: f64, milestones: &[u64], factor: f64) -> f64 {
    debug_assert!(milestones.windows(2).all(|w| w[0] <= w[1]));
    let passed = milestones.iter().take_while(|&&m| m <= step).count();
    base_lr * libm::pow(factor, passed as f64)
}

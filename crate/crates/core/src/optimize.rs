//! Numerical confirmation of the equal-split optimality theorems: a global
//! grid sweep over a single splitter's angle and random tangent
//! perturbations of the uniform split for larger cascades.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{number_coherence, product_coherence};
use crate::error::{Error, Result};
use crate::network::{optimal_split, SplitVector};
use crate::special::compensated_sum;
use crate::tol;

/// Coherence increase beyond which a perturbation counts as a violation;
/// below this it is floating-point noise.
pub const OPTIMALITY_SLACK: f64 = 1e-10;

/// The input family driving an optimization sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputKind {
    Coherent { nbar: f64 },
    Number { n: u32 },
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputKind::Coherent { nbar } => write!(f, "coherent(n̄={nbar})"),
            InputKind::Number { n } => write!(f, "number(n={n})"),
        }
    }
}

/// Output coherence for the given input split according to `tau`,
/// along the closed-form route.
pub fn objective(input: InputKind, tau: &SplitVector) -> Result<f64> {
    match input {
        InputKind::Coherent { nbar } => {
            let means: Vec<f64> = tau.values().iter().map(|t| nbar * t * t).collect();
            product_coherence(&means, tol::DEFAULT_TAIL_EPSILON)
        }
        InputKind::Number { n } => number_coherence(n, tau),
    }
}

/// One angle sweep: grid values, objective per point, and the argmax.
#[derive(Debug, Clone)]
pub struct SweepResult {
    input: InputKind,
    points: Vec<(f64, f64)>,
    argmax: usize,
}

impl SweepResult {
    pub fn input(&self) -> InputKind {
        self.input
    }

    /// (theta, coherence) pairs in grid order.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn argmax_index(&self) -> usize {
        self.argmax
    }

    pub fn argmax_theta(&self) -> f64 {
        self.points[self.argmax].0
    }

    pub fn max_value(&self) -> f64 {
        self.points[self.argmax].1
    }

    /// `theta,coherence` CSV rows (no header).
    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.points
            .iter()
            .map(|(t, c)| format!("{t:.11e},{c:.11e}"))
    }
}

/// Sweep a single splitter's angle over [0, π/2] on an odd grid (so π/4 is
/// a grid point) and locate the coherence maximum. Ties break toward the
/// smallest angle.
pub fn grid_search_single_splitter(input: InputKind, resolution: usize) -> Result<SweepResult> {
    if resolution < 3 || resolution.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "grid resolution must be odd and at least 3, got {resolution}"
        )));
    }
    let mut points = Vec::with_capacity(resolution);
    let mut argmax = 0usize;
    for k in 0..resolution {
        let theta =
            std::f64::consts::FRAC_PI_2 * k as f64 / (resolution - 1) as f64;
        let tau = SplitVector::new(vec![theta.cos(), theta.sin()])?;
        let value = objective(input, &tau)?;
        points.push((theta, value));
        if value > points[argmax].1 {
            argmax = k;
        }
    }
    Ok(SweepResult {
        input,
        points,
        argmax,
    })
}

/// Outcome of a batch of random tangent perturbations around the uniform
/// split.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationReport {
    pub input: InputKind,
    pub splitters: u32,
    pub trials: usize,
    pub delta: f64,
    /// Largest observed coherence increase over the uniform split
    /// (negative when every perturbation lost coherence).
    pub worst_increase: f64,
    pub passed: bool,
}

/// Perturb the uniform split `trials` times by a random tangent direction
/// of magnitude `delta`, renormalize, and check that the coherence never
/// rises by more than the floating-point slack.
pub fn perturbation_test(
    input: InputKind,
    splitters: u32,
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<PerturbationReport> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let modes = splitters as usize + 1;
    if !(0.0..1.0 / modes as f64).contains(&delta) {
        return Err(Error::domain(format!(
            "perturbation size must satisfy 0 ≤ δ < 1/(N+1) = {:.4}, got {delta}",
            1.0 / modes as f64
        )));
    }
    let uniform = optimal_split(splitters);
    let baseline = objective(input, &uniform)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let tau = perturbed_split(&uniform, delta, &mut rng)?;
        let value = objective(input, &tau)?;
        worst = worst.max(value - baseline);
    }
    Ok(PerturbationReport {
        input,
        splitters,
        trials,
        delta,
        worst_increase: worst,
        passed: worst <= OPTIMALITY_SLACK,
    })
}

/// Move along a random unit tangent of the sphere at `base` by `delta`,
/// then renormalize. Entries are folded to moduli, which leaves every l1
/// quantity unchanged.
fn perturbed_split(base: &SplitVector, delta: f64, rng: &mut ChaCha8Rng) -> Result<SplitVector> {
    let values = base.values();
    if delta == 0.0 {
        return SplitVector::new(values.to_vec());
    }
    let mut direction: Vec<f64> = (0..values.len())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    // project out the radial component
    let radial: f64 = direction.iter().zip(values).map(|(d, v)| d * v).sum();
    for (d, v) in direction.iter_mut().zip(values) {
        *d -= radial * v;
    }
    let norm = compensated_sum(direction.iter().map(|d| d * d)).sqrt();
    if norm < 1e-12 {
        // overwhelmingly unlikely draw straight along the radius; keep base
        return SplitVector::new(values.to_vec());
    }
    let mut perturbed: Vec<f64> = values
        .iter()
        .zip(&direction)
        .map(|(v, d)| v + delta * d / norm)
        .collect();
    let new_norm = compensated_sum(perturbed.iter().map(|p| p * p)).sqrt();
    for p in perturbed.iter_mut() {
        *p = (*p / new_norm).abs();
    }
    SplitVector::new(perturbed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn coherent_sweep_peaks_at_balanced_angle() {
        let sweep =
            grid_search_single_splitter(InputKind::Coherent { nbar: 2.0 }, 181).unwrap();
        assert_eq!(sweep.argmax_index(), 90);
        assert_relative_eq!(sweep.argmax_theta(), FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn number_sweep_peaks_at_balanced_angle() {
        let sweep = grid_search_single_splitter(InputKind::Number { n: 3 }, 181).unwrap();
        assert_relative_eq!(sweep.argmax_theta(), FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_sweep_ties_break_to_zero() {
        let sweep = grid_search_single_splitter(InputKind::Number { n: 0 }, 181).unwrap();
        assert_eq!(sweep.argmax_index(), 0);
        assert_eq!(sweep.max_value(), 0.0);
    }

    #[test]
    fn resolution_must_be_odd_and_large_enough() {
        assert!(grid_search_single_splitter(InputKind::Number { n: 1 }, 2).is_err());
        assert!(grid_search_single_splitter(InputKind::Number { n: 1 }, 180).is_err());
    }

    #[test]
    fn sweep_is_symmetric_about_the_balanced_angle() {
        for input in [InputKind::Coherent { nbar: 3.0 }, InputKind::Number { n: 4 }] {
            let sweep = grid_search_single_splitter(input, 91).unwrap();
            let pts = sweep.points();
            for k in 0..pts.len() {
                let mirrored = pts.len() - 1 - k;
                assert!(
                    (pts[k].1 - pts[mirrored].1).abs() < 1e-10,
                    "{input}: asymmetry at {k}"
                );
            }
        }
    }

    #[test]
    fn perturbations_never_beat_uniform() {
        let report = perturbation_test(InputKind::Coherent { nbar: 3.0 }, 2, 50, 0.05, 1).unwrap();
        assert!(report.passed, "worst increase {}", report.worst_increase);
        let report = perturbation_test(InputKind::Number { n: 4 }, 3, 50, 0.05, 2).unwrap();
        assert!(report.passed, "worst increase {}", report.worst_increase);
    }

    #[test]
    fn zero_delta_passes_trivially() {
        let report = perturbation_test(InputKind::Number { n: 2 }, 1, 3, 0.0, 3).unwrap();
        assert!(report.passed);
        assert!(report.worst_increase.abs() < 1e-15);
    }

    #[test]
    fn delta_domain_is_enforced() {
        assert!(perturbation_test(InputKind::Number { n: 2 }, 3, 3, 0.3, 0).is_err());
        assert!(perturbation_test(InputKind::Number { n: 2 }, 1, 0, 0.1, 0).is_err());
    }

    #[test]
    fn csv_rows_are_fixed_precision() {
        let sweep = grid_search_single_splitter(InputKind::Number { n: 1 }, 3).unwrap();
        let rows: Vec<String> = sweep.csv_rows().collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].starts_with("0.00000000000e0,"));
    }
}

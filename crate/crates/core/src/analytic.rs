//! Closed-form coherence of beam-splitter cascade outputs: coherent-state
//! products and their large-mean approximation, number-state multinomial
//! sums, the finite-sector supremum, photon-number-diagonal mixtures, and
//! the thermal asymptotic with its quadrature cross-check.
//!
//! Factorials, multinomials, and distribution weights stay in the log domain
//! until the final accumulation; truncations of infinite sums carry
//! certified bounds derived from geometric tail majorants.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::coherence::PureFockState;
use crate::error::{Error, Result};
use crate::fock_basis::{compositions, dimension};
use crate::network::{optimal_split, SplitVector};
use crate::quadrature::GaussLaguerre;
use crate::special::{gamma_half, ln_factorial, CompensatedSum};
use crate::tol;

/// Hard cap on the photon-number cutoff of a truncated distribution.
const MAX_CUTOFF: u32 = 1_000_000;

/// Hard cap on the number of multinomial terms a single call may enumerate.
const MAX_SECTOR_TERMS: u64 = 1 << 26;

/// Hard cap on the (modes · cutoff²) work of the sector-sum convolution.
const MAX_CONVOLUTION_OPS: u64 = 4_000_000_000;

/// A value together with a certified bound on the truncated remainder.
#[derive(Debug, Clone, Copy)]
pub struct Certified {
    pub value: f64,
    pub tail_bound: f64,
}

/// Result of a quadrature cross-check with its refinement diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureCheck {
    pub value: f64,
    /// Relative change between the full rule and the half-degree rule.
    pub rel_change: f64,
    pub converged: bool,
}

fn check_mean(nbar: f64) -> Result<()> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::domain(format!(
            "mean photon number must be a finite non-negative value, got {nbar}"
        )));
    }
    Ok(())
}

fn check_tail_epsilon(tail_epsilon: f64) -> Result<()> {
    if !tail_epsilon.is_finite() || tail_epsilon <= 0.0 {
        return Err(Error::domain(format!(
            "tail epsilon must be a finite positive value, got {tail_epsilon}"
        )));
    }
    Ok(())
}

/// Coherence of a single coherent mode of mean `nbar`:
/// e^{−n̄} (Σₙ √(n̄ⁿ/n!))² − 1.
///
/// The cutoff is chosen while summing so that the omitted amplitude tail
/// moves the returned value by less than `tail_epsilon`; the remainder is
/// majorized by the geometric series with ratio √(n̄/(n+1)).
pub fn coherent_coherence_single(nbar: f64, tail_epsilon: f64) -> Result<f64> {
    check_mean(nbar)?;
    check_tail_epsilon(tail_epsilon)?;
    if nbar == 0.0 {
        return Ok(0.0);
    }
    let ln_nbar = nbar.ln();
    let mut sum = CompensatedSum::new();
    let mut n = 0u64;
    loop {
        let ln_a = 0.5 * (n as f64 * ln_nbar - ln_factorial(n)) - nbar / 2.0;
        let a = ln_a.exp();
        sum.add(a);
        let next = (n + 1) as f64;
        if next > nbar {
            let ratio = (nbar / next).sqrt();
            let remainder = a * ratio / (1.0 - ratio);
            let s = sum.value() + remainder;
            if remainder * (2.0 * s + remainder) < tail_epsilon {
                break;
            }
        }
        n += 1;
        if n > u64::from(MAX_CUTOFF) {
            return Err(Error::Truncation(format!(
                "coherent series for n̄ = {nbar} did not certify within {MAX_CUTOFF} terms"
            )));
        }
    }
    let s = sum.value();
    Ok((s * s - 1.0).max(0.0))
}

fn gaussian_power_approx(nbar: f64, output_modes: f64) -> Result<f64> {
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::domain(format!(
            "the Gaussian approximation requires a positive mean, got {nbar}"
        )));
    }
    let base = 8.0 * std::f64::consts::PI * nbar / output_modes;
    Ok((0.5 * output_modes * base.ln()).exp_m1())
}

/// Large-mean approximation for a single coherent mode: 2√(2πn̄) − 1.
pub fn gaussian_approx_single(nbar: f64) -> Result<f64> {
    gaussian_power_approx(nbar, 1.0)
}

/// Total output coherence of a product of coherent modes with the given
/// per-mode means: Π (C(n̄ⱼ, 0) + 1) − 1.
pub fn product_coherence(nbars: &[f64], tail_epsilon: f64) -> Result<f64> {
    if nbars.is_empty() {
        return Err(Error::domain("product over an empty set of modes"));
    }
    let mut ln_product = CompensatedSum::new();
    for &nb in nbars {
        ln_product.add((coherent_coherence_single(nb, tail_epsilon)? + 1.0).ln());
    }
    Ok(ln_product.value().exp_m1().max(0.0))
}

/// Maximum coherence for a coherent input split over N+1 modes: the
/// equal-split product [C(n̄/(N+1), 0) + 1]^{N+1} − 1.
pub fn max_coherent_coherence(nbar: f64, splitters: u32, tail_epsilon: f64) -> Result<f64> {
    check_mean(nbar)?;
    let modes = f64::from(splitters) + 1.0;
    let factor = coherent_coherence_single(nbar / modes, tail_epsilon)? + 1.0;
    Ok((modes * factor.ln()).exp_m1().max(0.0))
}

/// Gaussian approximation of the equal-split maximum:
/// (8πn̄/(N+1))^{(N+1)/2} − 1. Coincides with `gaussian_approx_single`
/// at N = 0 by construction.
pub fn max_coherent_approx(nbar: f64, splitters: u32) -> Result<f64> {
    gaussian_power_approx(nbar, f64::from(splitters) + 1.0)
}

/// Output state of a number state |n⟩ split according to `tau`: amplitude
/// √(n!) Π τⱼ^{mⱼ} / √(Π mⱼ!) on each composition {m}.
pub fn number_output_amplitudes(n: u32, tau: &SplitVector) -> Result<PureFockState> {
    guard_sector(n, tau.modes())?;
    let ln_tau: Vec<f64> = tau.values().iter().map(|&t| t.ln()).collect();
    let half_ln_n_fact = 0.5 * ln_factorial(u64::from(n));
    let mut amps = HashMap::new();
    for comp in compositions(n, tau.modes()) {
        if let Some(ln_amp) = ln_term(comp.counts(), &ln_tau) {
            let amp = (half_ln_n_fact + ln_amp).exp();
            if amp > 0.0 {
                amps.insert(comp, Complex64::new(amp, 0.0));
            }
        }
    }
    PureFockState::new(amps)
}

/// ln of Π τⱼ^{mⱼ}/√(Π mⱼ!); `None` when some occupied mode has τⱼ = 0.
fn ln_term(counts: &[u32], ln_tau: &[f64]) -> Option<f64> {
    let mut acc = 0.0f64;
    for (&m, &lt) in counts.iter().zip(ln_tau) {
        if m == 0 {
            continue;
        }
        if lt == f64::NEG_INFINITY {
            return None;
        }
        acc += f64::from(m) * lt - 0.5 * ln_factorial(u64::from(m));
    }
    Some(acc)
}

fn guard_sector(n: u32, modes: usize) -> Result<()> {
    let d = dimension(n, modes as u32 - 1)?;
    if d > MAX_SECTOR_TERMS {
        return Err(Error::domain(format!(
            "sector of {n} photons over {modes} modes has {d} basis states, \
             beyond the supported {MAX_SECTOR_TERMS}"
        )));
    }
    Ok(())
}

/// Coherence of the split number state: n! (Σ Π τⱼ^{mⱼ}/√(Π mⱼ!))² − 1.
///
/// The multinomial sum is evaluated with a streamed log-sum-exp over the
/// composition enumeration, so no intermediate factorial ever leaves the
/// log domain.
pub fn number_coherence(n: u32, tau: &SplitVector) -> Result<f64> {
    guard_sector(n, tau.modes())?;
    let ln_tau: Vec<f64> = tau.values().iter().map(|&t| t.ln()).collect();
    let mut max_ln = f64::NEG_INFINITY;
    for comp in compositions(n, tau.modes()) {
        if let Some(l) = ln_term(comp.counts(), &ln_tau) {
            max_ln = max_ln.max(l);
        }
    }
    debug_assert!(max_ln.is_finite(), "unit-norm tau has a populated mode");
    let mut scaled = CompensatedSum::new();
    for comp in compositions(n, tau.modes()) {
        if let Some(l) = ln_term(comp.counts(), &ln_tau) {
            scaled.add((l - max_ln).exp());
        }
    }
    let ln_sum = max_ln + scaled.value().ln();
    Ok((ln_factorial(u64::from(n)) + 2.0 * ln_sum)
        .exp_m1()
        .max(0.0))
}

/// Maximum number-state coherence, reached at the uniform split
/// τⱼ = 1/√(N+1).
pub fn max_number_coherence(n: u32, splitters: u32) -> Result<f64> {
    number_coherence(n, &optimal_split(splitters))
}

/// Largest coherence any state of the n-photon, (N+1)-mode sector can
/// carry: D(n, N) − 1, attained by phase-like states with uniform moduli.
pub fn supremum_coherence(n: u32, splitters: u32) -> Result<f64> {
    Ok(dimension(n, splitters)? as f64 - 1.0)
}

/// Which classical photon-number statistics a mixture follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Poisson,
    Thermal,
    Point,
}

/// A photon-number distribution truncated at a certified cutoff.
#[derive(Debug, Clone)]
pub struct PhotonDistribution {
    kind: DistributionKind,
    mean: f64,
    point: u32,
    cutoff: u32,
    tail_epsilon: f64,
    tail_bound: f64,
}

impl PhotonDistribution {
    /// Poissonian statistics pₙ = n̄ⁿe^{−n̄}/n! (phase-averaged coherent
    /// light). The cutoff comes from the Chernoff bound
    /// P(X ≥ k) ≤ e^{−n̄}(en̄/k)^k.
    pub fn poisson(mean: f64, tail_epsilon: f64) -> Result<Self> {
        check_mean(mean)?;
        check_tail_epsilon(tail_epsilon)?;
        if mean == 0.0 {
            return Ok(Self {
                kind: DistributionKind::Poisson,
                mean,
                point: 0,
                cutoff: 0,
                tail_epsilon,
                tail_bound: 0.0,
            });
        }
        let mut k = mean.floor() as u32 + 1;
        loop {
            let bound = poisson_upper_tail(mean, k);
            if bound <= tail_epsilon {
                return Ok(Self {
                    kind: DistributionKind::Poisson,
                    mean,
                    point: 0,
                    cutoff: k - 1,
                    tail_epsilon,
                    tail_bound: bound,
                });
            }
            k += 1;
            if k > MAX_CUTOFF {
                return Err(Error::Truncation(format!(
                    "Poisson cutoff for n̄ = {mean} exceeds the supported maximum {MAX_CUTOFF}"
                )));
            }
        }
    }

    /// Thermal statistics pₙ = n̄ⁿ/(1+n̄)^{n+1}; the geometric tail is
    /// closed-form: Σ_{n>K} pₙ = (n̄/(1+n̄))^{K+1}.
    pub fn thermal(mean: f64, tail_epsilon: f64) -> Result<Self> {
        check_mean(mean)?;
        check_tail_epsilon(tail_epsilon)?;
        if mean == 0.0 {
            return Ok(Self {
                kind: DistributionKind::Thermal,
                mean,
                point: 0,
                cutoff: 0,
                tail_epsilon,
                tail_bound: 0.0,
            });
        }
        let q = mean / (1.0 + mean);
        let needed = (tail_epsilon.ln() / q.ln()).ceil();
        if !(needed.is_finite() && needed <= f64::from(MAX_CUTOFF)) {
            return Err(Error::Truncation(format!(
                "thermal cutoff for n̄ = {mean} exceeds the supported maximum {MAX_CUTOFF}"
            )));
        }
        let cutoff = (needed as u32).max(1) - 1;
        Ok(Self {
            kind: DistributionKind::Thermal,
            mean,
            point: 0,
            cutoff,
            tail_epsilon,
            tail_bound: q.powi(cutoff as i32 + 1),
        })
    }

    /// The degenerate distribution concentrated at a single photon number.
    pub fn point(n: u32) -> Self {
        Self {
            kind: DistributionKind::Point,
            mean: f64::from(n),
            point: n,
            cutoff: n,
            tail_epsilon: tol::DEFAULT_TAIL_EPSILON,
            tail_bound: 0.0,
        }
    }

    /// Override the cutoff (e.g. from a CLI flag); the certified tail bound
    /// is recomputed and downstream consumers refuse uncertifiable cutoffs.
    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.cutoff = cutoff;
        self.tail_bound = match self.kind {
            DistributionKind::Point => {
                if cutoff >= self.point {
                    0.0
                } else {
                    1.0
                }
            }
            DistributionKind::Poisson => {
                if self.mean == 0.0 {
                    0.0
                } else if f64::from(cutoff + 1) > self.mean {
                    poisson_upper_tail(self.mean, cutoff + 1)
                } else {
                    1.0
                }
            }
            DistributionKind::Thermal => {
                if self.mean == 0.0 {
                    0.0
                } else {
                    (self.mean / (1.0 + self.mean)).powi(cutoff as i32 + 1)
                }
            }
        };
        self
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn tail_epsilon(&self) -> f64 {
        self.tail_epsilon
    }

    /// Certified upper bound on the probability mass above the cutoff.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_bound
    }

    /// ln pₙ; −∞ where the weight vanishes.
    pub fn ln_weight(&self, n: u32) -> f64 {
        match self.kind {
            DistributionKind::Point => {
                if n == self.point {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            DistributionKind::Poisson => {
                if self.mean == 0.0 {
                    return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
                }
                f64::from(n) * self.mean.ln() - self.mean - ln_factorial(u64::from(n))
            }
            DistributionKind::Thermal => {
                if self.mean == 0.0 {
                    return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
                }
                let q = self.mean / (1.0 + self.mean);
                f64::from(n) * q.ln() - (1.0 + self.mean).ln()
            }
        }
    }

    pub fn weight(&self, n: u32) -> f64 {
        self.ln_weight(n).exp()
    }

    /// Ratio p_{n+1}/pₙ, used by the geometric tail majorants.
    fn weight_ratio(&self, n: u32) -> f64 {
        match self.kind {
            DistributionKind::Point => 0.0,
            DistributionKind::Poisson => self.mean / f64::from(n + 1),
            DistributionKind::Thermal => self.mean / (1.0 + self.mean),
        }
    }
}

fn poisson_upper_tail(mean: f64, k: u32) -> f64 {
    // Chernoff: P(X ≥ k) ≤ exp(−n̄ + k + k ln(n̄/k)) for k > n̄.
    let kf = f64::from(k);
    (-mean + kf + kf * (mean / kf).ln()).exp()
}

/// Coherence of an incoherent (number-diagonal) input split by `tau`:
/// the pₙ-average of the per-sector number-state coherences, with a
/// certified bound on the truncated remainder.
pub fn mixed_coherence(dist: &PhotonDistribution, tau: &SplitVector) -> Result<Certified> {
    if dist.tail_mass_bound() > dist.tail_epsilon() {
        return Err(Error::Truncation(format!(
            "distribution tail mass bound {:.3e} exceeds the requested ε = {:.0e}; \
             raise the cutoff",
            dist.tail_mass_bound(),
            dist.tail_epsilon()
        )));
    }
    if dist.kind() == DistributionKind::Point {
        return Ok(Certified {
            value: number_coherence(dist.point, tau)?,
            tail_bound: 0.0,
        });
    }
    let splitters = tau.modes() as u32 - 1;
    let sums = sector_modulus_sums(tau, dist.cutoff())?;
    let mut acc = CompensatedSum::new();
    for (n, &m) in sums.iter().enumerate() {
        let p = dist.weight(n as u32);
        if p > 0.0 {
            acc.add(p * (m * m - 1.0).max(0.0));
        }
    }
    Ok(Certified {
        value: acc.value().max(0.0),
        tail_bound: mixed_tail_bound(dist, splitters)?,
    })
}

/// Modulus sums Mₙ = √(n!) Σ_{m} Π τⱼ^{mⱼ}/√(Π mⱼ!) for every sector
/// n ≤ max_n at once, so the per-sector coherence is Mₙ² − 1.
///
/// Convolving one mode at a time replaces the D(n, N)-term enumeration by
/// an O((N+1)·max_n²) recurrence; the √binomial scaling keeps every
/// intermediate bounded by √D(n, N), far from overflow.
fn sector_modulus_sums(tau: &SplitVector, max_n: u32) -> Result<Vec<f64>> {
    let size = max_n as usize + 1;
    if tau.modes() as u64 * (size as u64) * (size as u64) > MAX_CONVOLUTION_OPS {
        return Err(Error::domain(format!(
            "sector sums up to n = {max_n} over {} modes exceed the supported work bound",
            tau.modes()
        )));
    }
    // first mode: M(n) = √(n!) t^n / √(n!) = t^n
    let mut sums = vec![0.0f64; size];
    let t0 = tau.values()[0];
    sums[0] = 1.0;
    for n in 1..size {
        sums[n] = sums[n - 1] * t0;
    }
    for &t in &tau.values()[1..] {
        let prev = sums;
        sums = vec![0.0f64; size];
        for n in 0..size {
            // √C(n, m) by the multiplicative recurrence along the row
            let mut sqrt_binom = 1.0f64;
            let mut t_pow = 1.0f64;
            let mut acc = CompensatedSum::new();
            for m in 0..=n {
                acc.add(sqrt_binom * t_pow * prev[n - m]);
                sqrt_binom *= ((n - m) as f64 / (m + 1) as f64).sqrt();
                t_pow *= t;
            }
            sums[n] = acc.value();
        }
    }
    Ok(sums)
}

/// Bound Σ_{n>K} pₙ C(n, τ) by Σ_{n>K} pₙ (D(n,N) − 1) and majorize that by
/// a geometric series: the term ratio pₙ₊₁D(n+1)/pₙD(n) decreases in n for
/// both Poisson and thermal weights.
fn mixed_tail_bound(dist: &PhotonDistribution, splitters: u32) -> Result<f64> {
    let k1 = dist.cutoff() + 1;
    let first = dist.weight(k1) * dimension(k1, splitters)? as f64;
    if first == 0.0 {
        return Ok(0.0);
    }
    let dim_ratio =
        f64::from(k1 + 1 + splitters) / f64::from(k1 + 1);
    let ratio = dist.weight_ratio(k1) * dim_ratio;
    if ratio >= 1.0 {
        return Err(Error::Truncation(format!(
            "cutoff {} is too small to certify the averaged tail (term ratio {ratio:.3})",
            dist.cutoff()
        )));
    }
    Ok(first / (1.0 - ratio))
}

/// Large-mean asymptotic for a thermal input split evenly over N+1 modes:
/// Γ((N+3)/2) · (8πn̄/(N+1))^{(N+1)/2} − 1.
pub fn thermal_coherence_approx(nbar: f64, splitters: u32) -> Result<f64> {
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::domain(format!(
            "the thermal asymptotic requires a positive mean, got {nbar}"
        )));
    }
    let gamma = gamma_half(splitters + 3)?;
    let modes = f64::from(splitters) + 1.0;
    let base = 8.0 * std::f64::consts::PI * nbar / modes;
    Ok(gamma * (0.5 * modes * base.ln()).exp() - 1.0)
}

/// Independent check of the thermal asymptotic: evaluate the radial average
/// (1/n̄)∫₀^∞ du e^{−u/n̄} [(8πu/(N+1))^{(N+1)/2} − 1] by Gauss–Laguerre
/// quadrature instead of the closed-form Gamma factor.
///
/// After u = n̄x the weight is x^{(N+1)/2} e^{−x} up to the constant term.
/// For odd N the full integrand is a polynomial under the plain rule; for
/// even N the half-integer power moves into the rule's weight (α = ½) and
/// the elementary −1·∫e^{−x} = −1 term is added back exactly.
pub fn thermal_coherence_approx_check(
    nbar: f64,
    splitters: u32,
    nodes: usize,
) -> Result<QuadratureCheck> {
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::domain(format!(
            "the thermal quadrature requires a positive mean, got {nbar}"
        )));
    }
    if nodes < 8 {
        return Err(Error::domain(format!(
            "at least 8 quadrature nodes required, got {nodes}"
        )));
    }
    let value = thermal_quadrature(nbar, splitters, nodes)?;
    let coarse = thermal_quadrature(nbar, splitters, (nodes / 2).max(4))?;
    let rel_change = (value - coarse).abs() / value.abs().max(f64::MIN_POSITIVE);
    Ok(QuadratureCheck {
        value,
        rel_change,
        converged: rel_change <= tol::QUADRATURE_CONVERGENCE,
    })
}

fn thermal_quadrature(nbar: f64, splitters: u32, nodes: usize) -> Result<f64> {
    let modes = f64::from(splitters) + 1.0;
    let scale = (0.5 * modes * (8.0 * std::f64::consts::PI * nbar / modes).ln()).exp();
    if splitters % 2 == 1 {
        // (N+1)/2 is an integer: integrate the full polynomial integrand.
        let power = (splitters as i32 + 1) / 2;
        let rule = GaussLaguerre::new(nodes, 0.0)?;
        Ok(rule.integrate(|x| scale * x.powi(power) - 1.0))
    } else {
        let power = splitters as i32 / 2;
        let rule = GaussLaguerre::new(nodes, 0.5)?;
        Ok(rule.integrate(|x| scale * x.powi(power)) - 1.0)
    }
}

/// The two output-coherence routes for a phase-averaged coherent input of
/// mean `nbar`, split evenly.
///
/// The sector-diagonal route averages per-sector coherences; the pure
/// coherent product keeps inter-sector terms. They are not algebraically
/// identical, so both are computed and the difference is reported rather
/// than asserted away.
#[derive(Debug, Clone, Copy)]
pub struct PhaseAveragedComparison {
    pub sector_average: Certified,
    pub pure_coherent: f64,
    pub difference: f64,
}

pub fn phase_averaged_comparison(
    nbar: f64,
    splitters: u32,
    tail_epsilon: f64,
) -> Result<PhaseAveragedComparison> {
    let dist = PhotonDistribution::poisson(nbar, tail_epsilon)?;
    let tau = optimal_split(splitters);
    let sector_average = mixed_coherence(&dist, &tau)?;
    let pure_coherent = max_coherent_coherence(nbar, splitters, tail_epsilon)?;
    Ok(PhaseAveragedComparison {
        sector_average,
        pure_coherent,
        difference: sector_average.value - pure_coherent,
    })
}

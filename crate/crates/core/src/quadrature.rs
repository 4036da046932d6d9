//! Generalized Gauss–Laguerre quadrature for the radial averages over
//! classical photon-number distributions.
//!
//! A rule of degree n integrates x^α e^{−x} · p(x) exactly for polynomials p
//! up to degree 2n−1. Nodes are found by Newton iteration on the generalized
//! Laguerre recurrence; weights follow from the derivative at each root.

use crate::error::{Error, Result};
use crate::special::ln_gamma;

const MAX_DEGREE: usize = 512;
const NEWTON_EPS: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 60;

/// Nodes and weights for ∫₀^∞ x^α e^{−x} f(x) dx ≈ Σ wᵢ f(xᵢ).
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(degree: usize, alpha: f64) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::domain(format!(
                "quadrature degree must be in 1..={MAX_DEGREE}, got {degree}"
            )));
        }
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::domain(format!(
                "quadrature weight exponent must be > -1, got {alpha}"
            )));
        }
        let n = degree;
        let nf = n as f64;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        // ln Γ(α+n) − ln Γ(n) enters every weight.
        let ln_weight_scale = ln_gamma(alpha + nf)? - ln_gamma(nf)?;

        let mut z = 0.0f64;
        for i in 0..n {
            // Initial guesses from the standard asymptotic spacings.
            if i == 0 {
                z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha);
            } else if i == 1 {
                z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf);
            } else {
                let ai = (i - 1) as f64;
                z += ((1.0 + 2.55 * ai) / (1.9 * ai)
                    + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                    * (z - nodes[i - 2])
                    / (1.0 + 0.3 * alpha);
            }
            let mut converged = false;
            let mut p_prev = 0.0;
            let mut deriv = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                // Evaluate L_n^α(z) by the three-term recurrence.
                let mut p1 = 1.0f64;
                let mut p2 = 0.0f64;
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf - 1.0 + alpha - z) * p2 - (jf - 1.0 + alpha) * p3) / jf;
                }
                deriv = (nf * p1 - (nf + alpha) * p2) / z;
                p_prev = p2;
                let z_old = z;
                z = z_old - p1 / deriv;
                if (z - z_old).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::domain(format!(
                    "Laguerre root {i} of degree {n} did not converge"
                )));
            }
            nodes[i] = z;
            weights[i] = -(ln_weight_scale.exp()) / (deriv * nf * p_prev);
        }
        Ok(Self {
            alpha,
            nodes,
            weights,
        })
    }

    /// ∫₀^∞ x^α e^{−x} f(x) dx.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn degree_three_alpha_zero_matches_reference() {
        // Classical tabulated rule.
        let rule = GaussLaguerre::new(3, 0.0).unwrap();
        let nodes = [
            4.157_745_567_834_791e-1,
            2.294_280_360_279_042e0,
            6.289_945_082_937_479e0,
        ];
        let weights = [
            7.110_930_099_291_73e-1,
            2.785_177_335_692_408e-1,
            1.038_925_650_158_613e-2,
        ];
        for i in 0..3 {
            assert_relative_eq!(rule.nodes()[i], nodes[i], max_relative = 1e-12);
            assert_relative_eq!(rule.weights()[i], weights[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn degree_four_alpha_half_matches_reference() {
        let rule = GaussLaguerre::new(4, 0.5).unwrap();
        let nodes = [
            5.235_260_767_382_691e-1,
            2.156_648_763_269_094e0,
            5.137_387_546_176_711e0,
            1.018_243_761_381_593e1,
        ];
        let weights = [
            4.530_087_465_586_076e-1,
            3.816_169_601_717_997e-1,
            5.079_462_757_224_076e-2,
            8.065_911_501_100_31e-4,
        ];
        for i in 0..4 {
            assert_relative_eq!(rule.nodes()[i], nodes[i], max_relative = 1e-11);
            assert_relative_eq!(rule.weights()[i], weights[i], max_relative = 1e-11);
        }
    }

    #[test]
    fn integrates_monomials_exactly() {
        // ∫ x^k e^{-x} = k!
        let rule = GaussLaguerre::new(10, 0.0).unwrap();
        assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x), 1.0, max_relative = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x * x), 2.0, max_relative = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x.powi(5)), 120.0, max_relative = 1e-12);
        // ∫ x^{1/2} e^{-x} x = Γ(5/2) = 3√π/4 with the α = 1/2 rule
        let half = GaussLaguerre::new(8, 0.5).unwrap();
        assert_relative_eq!(
            half.integrate(|x| x),
            0.75 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GaussLaguerre::new(0, 0.0).is_err());
        assert!(GaussLaguerre::new(4, -1.0).is_err());
        assert!(GaussLaguerre::new(4, f64::NAN).is_err());
    }

    #[test]
    fn nodes_sorted_and_positive() {
        for degree in [1usize, 2, 16, 64] {
            let rule = GaussLaguerre::new(degree, 0.0).unwrap();
            let mut prev = 0.0;
            for &x in rule.nodes() {
                assert!(x > prev);
                prev = x;
            }
        }
    }
}

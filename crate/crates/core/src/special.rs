//! Stable special-function evaluation: log-factorials, log-gamma, and
//! half-integer gamma values in closed form.
//!
//! Everything the coherence formulas need stays in the log domain until the
//! final accumulation, so factorials far past the f64 overflow point (171!)
//! remain usable.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0f64; TABLE_LEN];
        let mut acc = CompensatedSum::new();
        for (n, slot) in table.iter_mut().enumerate().skip(1) {
            acc.add((n as f64).ln());
            *slot = acc.value();
        }
        table
    })
}

/// ln(n!) for any non-negative n.
///
/// Table lookup below 256 (cumulative compensated log sum), Stirling series
/// above, where the truncation error is far below f64 resolution.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        ln_factorial_table()[n as usize]
    } else {
        stirling_ln_gamma(n as f64 + 1.0)
    }
}

/// ln Γ(x) for x > 0.
///
/// Arguments below 32 are shifted up by the recurrence Γ(x+1) = xΓ(x) so the
/// Stirling series is evaluated only where its tail is negligible.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    let mut shift = CompensatedSum::new();
    let mut y = x;
    while y < 32.0 {
        shift.add(y.ln());
        y += 1.0;
    }
    Ok(stirling_ln_gamma(y) - shift.value())
}

fn stirling_ln_gamma(x: f64) -> f64 {
    // ln Γ(x) = (x − ½)ln x − x + ½ln(2π) + Σ B_{2k}/(2k(2k−1)x^{2k−1})
    const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0))));
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}

/// Γ(half/2) evaluated exactly for positive integer and half-integer
/// arguments: Γ(k) = (k−1)!, Γ(k + ½) = (2k)!√π / (4^k k!).
pub fn gamma_half(half: u32) -> Result<f64> {
    if half == 0 {
        return Err(Error::domain("gamma_half requires a positive numerator"));
    }
    if half.is_multiple_of(2) {
        let k = u64::from(half / 2);
        Ok(ln_factorial(k - 1).exp())
    } else {
        let k = u64::from((half - 1) / 2);
        let ln = ln_factorial(2 * k) - ln_factorial(k) - (k as f64) * 4.0f64.ln();
        Ok(ln.exp() * std::f64::consts::PI.sqrt())
    }
}

/// Neumaier-compensated accumulator. The correction term survives the
/// pathological case where the next addend exceeds the running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Compensated sum of an iterator of addends.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Sum of moduli in descending-magnitude order with compensation.
///
/// (Σ|c|)² amplifies rounding for wide supports, so the l1 accumulations
/// sort before summing.
pub fn sorted_modulus_sum(mut moduli: Vec<f64>) -> f64 {
    moduli.sort_unstable_by(|a, b| b.partial_cmp(a).expect("moduli must not be NaN"));
    compensated_sum(moduli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_factorial_matches_exact_integers() {
        let mut exact = 1.0f64;
        for n in 0..=20u64 {
            if n > 0 {
                exact *= n as f64; // exact in f64 up to 20!
            }
            assert_relative_eq!(ln_factorial(n).exp(), exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn ln_factorial_recurrence_across_table_boundary() {
        for n in [200u64, 254, 255, 256, 400, 1000] {
            let lhs = ln_factorial(n + 1);
            let rhs = ln_factorial(n) + ((n + 1) as f64).ln();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        }
    }

    #[test]
    fn ln_gamma_matches_factorials_and_half_integers() {
        assert_relative_eq!(ln_gamma(5.0).unwrap(), ln_factorial(4), epsilon = 1e-13);
        // Γ(1/2) = √π
        assert_relative_eq!(
            ln_gamma(0.5).unwrap().exp(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn gamma_half_closed_forms() {
        // Γ(1) = 1, Γ(2) = 1, Γ(3) = 2
        assert_relative_eq!(gamma_half(2).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(gamma_half(4).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(gamma_half(6).unwrap(), 2.0, epsilon = 1e-14);
        // Γ(3/2) = √π/2, Γ(5/2) = 3√π/4
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(gamma_half(3).unwrap(), sqrt_pi / 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma_half(5).unwrap(),
            3.0 * sqrt_pi / 4.0,
            max_relative = 1e-14
        );
        assert!(gamma_half(0).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        // 1 + 1e-16 added 10^6 times: naive f64 drops every increment.
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        assert_relative_eq!(acc.value(), 1.0 + 1e-10, max_relative = 1e-12);
    }

    #[test]
    fn sorted_modulus_sum_orders_before_summing() {
        let v = vec![1e-9, 1.0, 3.0, 2e-9];
        assert_relative_eq!(sorted_modulus_sum(v), 4.0 + 3e-9, max_relative = 1e-15);
    }
}

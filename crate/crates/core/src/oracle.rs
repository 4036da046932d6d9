//! Brute-force Fock-space propagation through a cascade, kept deliberately
//! independent of the closed-form routes so it can arbitrate them.
//!
//! A beam splitter acts on a two-mode block |m_a, m_b⟩ by expanding the
//! rotated creation-operator monomials; the resulting (m+1)×(m+1) block
//! matrices depend only on the block's photon count and the angle, and are
//! cached per (sector size, angle bits) for reuse across blocks and across
//! sweep points that share an angle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::coherence::PureFockState;
use crate::error::{Error, Result};
use crate::fock_basis::{dimension, Composition};
use crate::network::{BeamSplitter, Cascade};
use crate::special::{compensated_sum, ln_factorial, CompensatedSum};
use crate::tol;

/// Practical ceiling for brute-force propagation; sector sizes explode
/// combinatorially beyond a dozen photons.
const MAX_ORACLE_CUTOFF: u32 = 120;

/// A multimode state truncated at a total photon number.
///
/// `tail_mass` is the probability discarded by the truncation and
/// `amp_tail` a bound on the modulus sum the discarded sectors could
/// contribute after any cascade (each omitted n-photon sector of amplitude
/// aₙ can spread over at most D(n, N) basis states, so its modulus sum is
/// bounded by aₙ√D(n, N)).
#[derive(Debug, Clone)]
pub struct TruncatedState {
    modes: usize,
    cutoff: u32,
    amps: HashMap<Composition, Complex64>,
    tail_mass: f64,
    amp_tail: f64,
}

impl TruncatedState {
    /// The number state |n, 0, …, 0⟩: exact, no truncation.
    pub fn number_input(n: u32, modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::structure("state needs at least one mode"));
        }
        let mut counts = vec![0u32; modes];
        counts[0] = n;
        let mut amps = HashMap::new();
        amps.insert(Composition::new(counts)?, Complex64::new(1.0, 0.0));
        Ok(Self {
            modes,
            cutoff: n,
            amps,
            tail_mass: 0.0,
            amp_tail: 0.0,
        })
    }

    /// Build a state from explicit normalized amplitudes (no truncation).
    pub fn from_amplitudes(
        modes: usize,
        amps: HashMap<Composition, Complex64>,
    ) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("state needs at least one amplitude"));
        }
        let mut cutoff = 0u32;
        for c in amps.keys() {
            if c.modes() != modes {
                return Err(Error::structure(format!(
                    "composition {c} does not have {modes} modes"
                )));
            }
            cutoff = cutoff.max(c.total());
        }
        let state = Self {
            modes,
            cutoff,
            amps,
            tail_mass: 0.0,
            amp_tail: 0.0,
        };
        state.check_norm(tol::ORACLE_NORM)?;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn amp_tail(&self) -> f64 {
        self.amp_tail
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Composition, &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, c: &Composition) -> Complex64 {
        self.amps
            .get(c)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.amps.values().map(|a| a.norm_sqr()))
    }

    pub fn check_norm(&self, tolerance: f64) -> Result<()> {
        let total = self.norm_sqr() + self.tail_mass;
        if (total - 1.0).abs() > tolerance {
            return Err(Error::invalid(format!(
                "norm² + tail = {total:.15}, expected 1 within {tolerance:.0e}"
            )));
        }
        Ok(())
    }

    /// Reinterpret as a pure state (for the l1 machinery), carrying the
    /// truncation records along.
    pub fn to_pure_state(&self) -> Result<PureFockState> {
        PureFockState::with_tail(self.amps.clone(), self.tail_mass, self.amp_tail)
    }
}

/// Truncated coherent state of mean `nbar` in mode 0, vacuum elsewhere.
///
/// The cutoff is raised until the certified effect of the discarded sectors
/// on any later l1 coherence drops below `tail_epsilon`; that accounts for
/// the √D(n, N) spreading a cascade over `modes` modes can apply.
pub fn coherent_input_state(nbar: f64, modes: usize, tail_epsilon: f64) -> Result<TruncatedState> {
    if modes == 0 {
        return Err(Error::structure("state needs at least one mode"));
    }
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::domain(format!(
            "mean photon number must be a finite non-negative value, got {nbar}"
        )));
    }
    if !tail_epsilon.is_finite() || tail_epsilon <= 0.0 {
        return Err(Error::domain(format!(
            "tail epsilon must be a finite positive value, got {tail_epsilon}"
        )));
    }
    let splitters = modes as u32 - 1;
    if nbar == 0.0 {
        let mut state = TruncatedState::number_input(0, modes)?;
        state.cutoff = 0;
        return Ok(state);
    }
    let ln_nbar = nbar.ln();
    let ln_amp = |n: u32| 0.5 * (f64::from(n) * ln_nbar - ln_factorial(u64::from(n))) - nbar / 2.0;

    // Find the cutoff: past the peak, the spread modulus series
    // bₙ = aₙ√D(n,N) is majorized by a geometric with a strictly
    // decreasing ratio.
    let too_deep = || {
        Error::Truncation(format!(
            "coherent input at n̄ = {nbar} needs a cutoff beyond the supported \
             {MAX_ORACLE_CUTOFF} photons for ε = {tail_epsilon:.0e}"
        ))
    };
    let mut cutoff = nbar.ceil() as u32;
    if cutoff > MAX_ORACLE_CUTOFF {
        return Err(too_deep());
    }
    let mut spread = CompensatedSum::new();
    for n in 0..=cutoff {
        spread.add(ln_amp(n).exp() * (dimension(n, splitters)? as f64).sqrt());
    }
    let (tail_mass, amp_tail) = loop {
        let k1 = cutoff + 1;
        let b_next = ln_amp(k1).exp() * (dimension(k1, splitters)? as f64).sqrt();
        let ratio = (nbar / f64::from(k1 + 1)).sqrt()
            * (f64::from(k1 + 1 + splitters) / f64::from(k1 + 1)).sqrt();
        if ratio < 1.0 {
            let tail_amp = b_next / (1.0 - ratio);
            let effect = tail_amp * (2.0 * (spread.value() + tail_amp) + tail_amp);
            if effect < tail_epsilon {
                // probability tail: majorize aₙ² by the same geometric
                let p_ratio = nbar / f64::from(k1 + 1);
                let p_tail = ln_amp(k1).exp().powi(2) / (1.0 - p_ratio);
                break (p_tail, tail_amp);
            }
        }
        spread.add(b_next);
        cutoff = k1;
        if cutoff >= MAX_ORACLE_CUTOFF {
            return Err(too_deep());
        }
    };

    let mut amps = HashMap::new();
    let mut norm = CompensatedSum::new();
    for n in 0..=cutoff {
        let a = ln_amp(n).exp();
        let mut counts = vec![0u32; modes];
        counts[0] = n;
        amps.insert(Composition::new(counts)?, Complex64::new(a, 0.0));
        norm.add(a * a);
    }
    // Record the actual deficit (≤ the geometric majorant) so the norm
    // invariant closes to machine precision.
    let deficit = (1.0 - norm.value()).max(0.0);
    if deficit > tail_mass.max(1e-15) {
        return Err(Error::Truncation(format!(
            "internal tail accounting mismatch: deficit {deficit:.3e} exceeds bound {tail_mass:.3e}"
        )));
    }
    Ok(TruncatedState {
        modes,
        cutoff,
        amps,
        tail_mass: deficit,
        amp_tail,
    })
}

type BlockKey = (u32, u64);
type BlockMatrix = Arc<Vec<Vec<f64>>>;

fn block_cache() -> &'static Mutex<HashMap<BlockKey, BlockMatrix>> {
    static CACHE: OnceLock<Mutex<HashMap<BlockKey, BlockMatrix>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Matrix element ⟨k, m−k| U(θ) |m_a, m−m_a⟩ for the two-mode rotation
/// a†_a → cos θ a†_a + sin θ a†_b, a†_b → −sin θ a†_a + cos θ a†_b,
/// tabulated for a whole m-photon block: element[k][m_a].
fn splitter_block(m: u32, theta: f64) -> BlockMatrix {
    let key = (m, theta.to_bits());
    if let Some(hit) = block_cache().lock().expect("cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let cos = theta.cos();
    let sin = theta.sin();
    let size = m as usize + 1;
    let mut block = vec![vec![0.0f64; size]; size];
    for ma in 0..=m {
        let mb = m - ma;
        for k in 0..=m {
            block[k as usize][ma as usize] = block_element(ma, mb, k, cos, sin);
        }
    }
    let block = Arc::new(block);
    block_cache()
        .lock()
        .expect("cache poisoned")
        .insert(key, Arc::clone(&block));
    block
}

/// Double-binomial expansion of (cos a†_a + sin a†_b)^{m_a}
/// (−sin a†_a + cos a†_b)^{m_b} evaluated on the |k, m−k⟩ component, with
/// binomials in the log domain and explicit sign tracking.
fn block_element(ma: u32, mb: u32, k: u32, cos: f64, sin: f64) -> f64 {
    let m = ma + mb;
    let prefactor = 0.5
        * (ln_factorial(u64::from(k)) + ln_factorial(u64::from(m - k))
            - ln_factorial(u64::from(ma))
            - ln_factorial(u64::from(mb)));
    let ln_cos = cos.abs().ln();
    let ln_sin = sin.abs().ln();
    let mut acc = CompensatedSum::new();
    let i_min = k.saturating_sub(mb);
    let i_max = k.min(ma);
    for i in i_min..=i_max {
        let j = k - i; // photons the b-line contributes to mode a
        let cos_pow = i + (mb - j);
        let sin_pow = (ma - i) + j;
        if (cos == 0.0 && cos_pow > 0) || (sin == 0.0 && sin_pow > 0) {
            continue;
        }
        let mut ln_mag = prefactor + ln_binomial(ma, i) + ln_binomial(mb, j);
        if cos_pow > 0 {
            ln_mag += f64::from(cos_pow) * ln_cos;
        }
        if sin_pow > 0 {
            ln_mag += f64::from(sin_pow) * ln_sin;
        }
        let mut sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        if cos < 0.0 && cos_pow % 2 == 1 {
            sign = -sign;
        }
        if sin < 0.0 && sin_pow % 2 == 1 {
            sign = -sign;
        }
        acc.add(sign * ln_mag.exp());
    }
    acc.value()
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(u64::from(n)) - ln_factorial(u64::from(k)) - ln_factorial(u64::from(n - k))
}

/// Apply one beam splitter exactly. Total photon number is conserved per
/// amplitude, so the truncation never grows.
pub fn apply_beamsplitter(state: &TruncatedState, bs: &BeamSplitter) -> Result<TruncatedState> {
    if bs.mode_a() >= state.modes || bs.mode_b() >= state.modes {
        return Err(Error::structure(format!(
            "splitter couples mode {} or {} outside the state's {} modes",
            bs.mode_a(),
            bs.mode_b(),
            state.modes
        )));
    }
    let mut out: HashMap<Composition, Complex64> = HashMap::with_capacity(state.amps.len() * 2);
    for (comp, &amp) in &state.amps {
        let counts = comp.counts();
        let ma = counts[bs.mode_a()];
        let mb = counts[bs.mode_b()];
        let m = ma + mb;
        if m > MAX_ORACLE_CUTOFF {
            return Err(Error::Truncation(format!(
                "two-mode block of {m} photons is beyond the supported \
                 {MAX_ORACLE_CUTOFF} for brute-force propagation"
            )));
        }
        if m == 0 {
            *out.entry(comp.clone()).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        let block = splitter_block(m, bs.theta());
        for k in 0..=m {
            let element = block[k as usize][ma as usize];
            if element == 0.0 {
                continue;
            }
            let mut new_counts = counts.to_vec();
            new_counts[bs.mode_a()] = k;
            new_counts[bs.mode_b()] = m - k;
            let target = Composition::new(new_counts)?;
            *out.entry(target).or_insert_with(|| Complex64::new(0.0, 0.0)) += amp * element;
        }
    }
    out.retain(|_, a| a.norm_sqr() > 0.0);
    let next = TruncatedState {
        modes: state.modes,
        cutoff: state.cutoff,
        amps: out,
        tail_mass: state.tail_mass,
        amp_tail: state.amp_tail,
    };
    next.check_norm(tol::ORACLE_NORM)?;
    Ok(next)
}

/// Apply every splitter of the cascade in order.
pub fn propagate(cascade: &Cascade, input: &TruncatedState) -> Result<TruncatedState> {
    if cascade.mode_count() != input.modes {
        return Err(Error::structure(format!(
            "cascade has {} modes but the state has {}",
            cascade.mode_count(),
            input.modes
        )));
    }
    let mut state = input.clone();
    for bs in cascade.splitters() {
        state = apply_beamsplitter(&state, bs)?;
    }
    state.check_norm(10.0 * tol::ORACLE_NORM)?;
    Ok(state)
}

//! l1-norm coherence in the photon-number basis: sum of off-diagonal moduli
//! of the density matrix, which for a pure state collapses to (Σ|c|)² − 1.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_basis::Composition;
use crate::special::sorted_modulus_sum;
use crate::tol;

/// A pure state over photon-number basis labels, possibly truncated.
///
/// `tail_mass` records the probability left outside the stored support and
/// `amp_tail` a certified bound on the modulus sum Σ|c| of the omitted
/// amplitudes; both are zero for exact sector states. The amplitude tail is
/// what turns a truncation into an error bound on reported coherences.
#[derive(Debug, Clone)]
pub struct PureFockState {
    modes: usize,
    amps: HashMap<Composition, Complex64>,
    tail_mass: f64,
    amp_tail: f64,
}

impl PureFockState {
    /// Build an exact (untruncated) state.
    pub fn new(amps: HashMap<Composition, Complex64>) -> Result<Self> {
        Self::with_tail(amps, 0.0, 0.0)
    }

    /// Build a truncated state with its recorded probability deficit and a
    /// bound on the omitted modulus sum.
    pub fn with_tail(
        amps: HashMap<Composition, Complex64>,
        tail_mass: f64,
        amp_tail: f64,
    ) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("a pure state needs at least one amplitude"));
        }
        let modes = amps.keys().next().expect("non-empty").modes();
        if amps.keys().any(|c| c.modes() != modes) {
            return Err(Error::invalid("mixed mode counts in one state"));
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0 && amp_tail.is_finite() && amp_tail >= 0.0)
        {
            return Err(Error::invalid("tail records must be finite and non-negative"));
        }
        let state = Self {
            modes,
            amps,
            tail_mass,
            amp_tail,
        };
        state.check_normalized(tol::PURE_NORM)?;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
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

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn amp_tail(&self) -> f64 {
        self.amp_tail
    }

    pub fn norm_sqr(&self) -> f64 {
        sorted_modulus_sum(self.amps.values().map(|a| a.norm_sqr()).collect())
    }

    fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let total = self.norm_sqr() + self.tail_mass;
        if (total - 1.0).abs() > tolerance {
            return Err(Error::invalid(format!(
                "state norm² + tail = {total:.3e}, expected 1 within {tolerance:.0e}"
            )));
        }
        Ok(())
    }

    /// True when every amplitude lies in the n-photon sector.
    pub fn supported_on_sector(&self, n: u32) -> bool {
        self.amps.keys().all(|c| c.total() == n)
    }

    /// |ψ⟩⟨ψ| over the state's support, labels in colex order.
    pub fn projector(&self) -> Result<DensityMatrix> {
        let mut labels: Vec<Composition> = self.amps.keys().cloned().collect();
        labels.sort_by(colex);
        let d = labels.len();
        let v: Vec<Complex64> = labels.iter().map(|c| self.amplitude(c)).collect();
        let mut rho = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] = v[i] * v[j].conj();
            }
        }
        DensityMatrix::new(labels, rho)
    }
}

fn colex(a: &Composition, b: &Composition) -> std::cmp::Ordering {
    a.counts()
        .iter()
        .rev()
        .cmp(b.counts().iter().rev())
}

/// Coherence of a pure state: (Σ|c|)² − 1.
pub fn l1_pure(state: &PureFockState) -> Result<f64> {
    state.check_normalized(tol::PURE_NORM)?;
    let s = sorted_modulus_sum(state.amps.values().map(|a| a.norm()).collect());
    Ok((s * s - 1.0).max(0.0))
}

/// Half-width of the certified interval around `l1_pure` induced by the
/// state's truncation: the omitted amplitudes can raise Σ|c| by at most
/// `amp_tail`, so the coherence by at most T(2S + T).
pub fn l1_pure_bound(state: &PureFockState) -> f64 {
    let s = sorted_modulus_sum(state.amps.values().map(|a| a.norm()).collect());
    let t = state.amp_tail;
    t * (2.0 * s + t)
}

/// An explicit density matrix over photon-number labels.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    labels: Vec<Composition>,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(labels: Vec<Composition>, rho: DMatrix<Complex64>) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::invalid("density matrix needs at least one label"));
        }
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::structure(format!(
                "matrix is {}x{} but there are {d} labels",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let dm = Self { labels, rho };
        dm.check_hermitian()?;
        dm.check_trace()?;
        Ok(dm)
    }

    pub fn labels(&self) -> &[Composition] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn check_hermitian(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let d = (self.rho[(i, j)] - self.rho[(j, i)].conj()).norm();
                if d > tol::HERMITICITY {
                    return Err(Error::invalid(format!(
                        "non-Hermitian entry at ({i},{j}): asymmetry {d:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_trace(&self) -> Result<()> {
        let tr: f64 = (0..self.dim()).map(|i| self.rho[(i, i)].re).sum();
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::invalid(format!("trace = {tr}, expected 1")));
        }
        Ok(())
    }

    /// Diagnostic positive-semidefiniteness check; returns the smallest
    /// eigenvalue. O(D³), so not part of routine validation.
    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }

    /// Diagnostic validation including the PSD eigenvalue floor.
    pub fn validate_diagnostic(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol::PSD {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite: min eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

/// Coherence of a density matrix: Σ|ρ_{nn'}| − 1.
pub fn l1_density(rho: &DensityMatrix) -> Result<f64> {
    rho.check_hermitian()?;
    rho.check_trace()?;
    let moduli: Vec<f64> = rho.rho.iter().map(|z| z.norm()).collect();
    Ok((sorted_modulus_sum(moduli) - 1.0).max(0.0))
}

/// A photon-number-diagonal mixture of per-sector pure states:
/// ρ = Σₙ pₙ |ψₙ⟩⟨ψₙ| with |ψₙ⟩ supported on the n-photon sector.
#[derive(Debug, Clone)]
pub struct SectorMixture {
    sectors: BTreeMap<u32, (f64, PureFockState)>,
    weight_tail: f64,
}

impl SectorMixture {
    pub fn new(sectors: BTreeMap<u32, (f64, PureFockState)>, weight_tail: f64) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::invalid("a mixture needs at least one sector"));
        }
        if !(weight_tail.is_finite() && weight_tail >= 0.0) {
            return Err(Error::invalid("weight tail must be finite and non-negative"));
        }
        let modes = sectors
            .values()
            .next()
            .expect("non-empty")
            .1
            .modes();
        let mut total = crate::special::CompensatedSum::new();
        for (&n, (p, state)) in &sectors {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::invalid(format!("weight p_{n} = {p} is invalid")));
            }
            if state.modes() != modes {
                return Err(Error::invalid("sector states disagree on mode count"));
            }
            if !state.supported_on_sector(n) {
                return Err(Error::invalid(format!(
                    "sector state for n = {n} has support outside its sector"
                )));
            }
            total.add(*p);
        }
        let sum = total.value() + weight_tail;
        if (sum - 1.0).abs() > tol::MIXTURE_WEIGHT {
            return Err(Error::invalid(format!(
                "mixture weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            sectors,
            weight_tail,
        })
    }

    pub fn sectors(&self) -> impl Iterator<Item = (u32, f64, &PureFockState)> {
        self.sectors.iter().map(|(&n, (p, s))| (n, *p, s))
    }

    pub fn weight_tail(&self) -> f64 {
        self.weight_tail
    }

    /// Assemble the explicit block-diagonal density matrix. Intended for
    /// cross-checks at small cutoffs; the dimension is Σₙ D(n, N).
    pub fn assemble_density(&self) -> Result<DensityMatrix> {
        let mut labels = Vec::new();
        let mut blocks = Vec::new();
        for (p, state) in self.sectors.values() {
            let mut sector_labels: Vec<Composition> =
                state.amplitudes().map(|(c, _)| c.clone()).collect();
            sector_labels.sort_by(colex);
            let start = labels.len();
            let amps: Vec<Complex64> =
                sector_labels.iter().map(|c| state.amplitude(c)).collect();
            labels.extend(sector_labels);
            blocks.push((start, *p, amps));
        }
        let d = labels.len();
        let mut rho = DMatrix::zeros(d, d);
        for (start, p, amps) in blocks {
            for (i, a) in amps.iter().enumerate() {
                for (j, b) in amps.iter().enumerate() {
                    rho[(start + i, start + j)] = Complex64::from(p) * a * b.conj();
                }
            }
        }
        DensityMatrix::new(labels, rho)
    }
}

/// Coherence of a sector-diagonal mixture: Σₙ pₙ (Σ|c⁽ⁿ⁾|)² − 1.
///
/// Equals `l1_density` of the assembled block-diagonal matrix: all
/// off-diagonal weight lives inside the sector blocks.
pub fn l1_sector_mixture(mix: &SectorMixture) -> Result<f64> {
    let mut acc = crate::special::CompensatedSum::new();
    for (_, p, state) in mix.sectors() {
        let s = sorted_modulus_sum(state.amplitudes().map(|(_, a)| a.norm()).collect());
        acc.add(p * s * s);
    }
    Ok((acc.value() - 1.0).max(0.0))
}

//! Beam-splitter cascades and the split vector they induce on the single
//! populated input mode.
//!
//! Convention: a splitter at angle θ keeps amplitude cos θ on its first mode
//! (transmission) and sends sin θ to its second (reflection). Both canonical
//! layouts route all light from input mode 0.

use crate::error::{Error, Result};
use crate::tol;

/// A lossless two-mode coupler: transmission cos θ, reflection sin θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    mode_a: usize,
    mode_b: usize,
    theta: f64,
}

impl BeamSplitter {
    pub fn new(mode_a: usize, mode_b: usize, theta: f64) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::structure(format!(
                "splitter must couple two distinct modes, got {mode_a} twice"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::domain("splitter angle must be finite"));
        }
        Ok(Self {
            mode_a,
            mode_b,
            theta,
        })
    }

    pub fn mode_a(&self) -> usize {
        self.mode_a
    }

    pub fn mode_b(&self) -> usize {
        self.mode_b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn transmission(&self) -> f64 {
        self.theta.cos()
    }

    pub fn reflection(&self) -> f64 {
        self.theta.sin()
    }
}

/// An ordered sequence of beam splitters over a fixed set of modes.
#[derive(Debug, Clone)]
pub struct Cascade {
    mode_count: usize,
    input_mode: usize,
    splitters: Vec<BeamSplitter>,
}

impl Cascade {
    pub fn new(mode_count: usize, splitters: Vec<BeamSplitter>) -> Result<Self> {
        Self::with_input(mode_count, 0, splitters)
    }

    pub fn with_input(
        mode_count: usize,
        input_mode: usize,
        splitters: Vec<BeamSplitter>,
    ) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::structure("a cascade needs at least one mode"));
        }
        if input_mode >= mode_count {
            return Err(Error::structure(format!(
                "input mode {input_mode} outside the {mode_count} cascade modes"
            )));
        }
        for (k, bs) in splitters.iter().enumerate() {
            if bs.mode_a >= mode_count || bs.mode_b >= mode_count {
                return Err(Error::structure(format!(
                    "splitter {} couples mode outside the {mode_count} cascade modes",
                    k + 1
                )));
            }
        }
        Ok(Self {
            mode_count,
            input_mode,
            splitters,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn input_mode(&self) -> usize {
        self.input_mode
    }

    pub fn splitters(&self) -> &[BeamSplitter] {
        &self.splitters
    }

    /// Every output mode must be connected to the input through the splitter
    /// sequence; an isolated mode can never carry light.
    pub fn check_reachable(&self) -> Result<()> {
        let mut reached = vec![false; self.mode_count];
        reached[self.input_mode] = true;
        for bs in &self.splitters {
            if reached[bs.mode_a] || reached[bs.mode_b] {
                reached[bs.mode_a] = true;
                reached[bs.mode_b] = true;
            }
        }
        if let Some(mode) = reached.iter().position(|&r| !r) {
            return Err(Error::structure(format!(
                "output mode {mode} is unreachable from input mode {}",
                self.input_mode
            )));
        }
        Ok(())
    }

    /// Serialize to the plain-text exchange format: one line per splitter,
    /// `j: mode_a mode_b theta`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, bs) in self.splitters.iter().enumerate() {
            out.push_str(&format!(
                "{}: {} {} {:.17e}\n",
                k + 1,
                bs.mode_a,
                bs.mode_b,
                bs.theta
            ));
        }
        out
    }

    /// Parse the plain-text format. `#` starts a comment; blank lines are
    /// skipped; splitter indices must run 1, 2, … in order.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut splitters = Vec::new();
        let mut max_mode = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (idx_part, rest) = content.split_once(':').ok_or(Error::Parse {
                line,
                msg: "expected `j: mode_a mode_b theta`".into(),
            })?;
            let idx: usize = idx_part.trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid splitter index `{}`", idx_part.trim()),
            })?;
            if idx != splitters.len() + 1 {
                return Err(Error::Parse {
                    line,
                    msg: format!("splitter index {idx} out of order, expected {}", splitters.len() + 1),
                });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 3 fields after `:`, got {}", fields.len()),
                });
            }
            let mode_a: usize = fields[0].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid mode index `{}`", fields[0]),
            })?;
            let mode_b: usize = fields[1].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid mode index `{}`", fields[1]),
            })?;
            let theta: f64 = fields[2].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid angle `{}`", fields[2]),
            })?;
            max_mode = max_mode.max(mode_a).max(mode_b);
            splitters.push(BeamSplitter::new(mode_a, mode_b, theta).map_err(|e| {
                Error::Parse {
                    line,
                    msg: e.to_string(),
                }
            })?);
        }
        if splitters.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no splitters in cascade description".into(),
            });
        }
        Cascade::new(max_mode + 1, splitters)
    }
}

/// Real non-negative unit vector: the amplitude of the populated input mode
/// on each output mode after a cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVector {
    values: Vec<f64>,
}

impl SplitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("split vector needs at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain(
                "split vector entries must be finite and non-negative",
            ));
        }
        let norm_sqr: f64 = crate::special::compensated_sum(values.iter().map(|v| v * v));
        if (norm_sqr - 1.0).abs() > tol::SPLIT_UNIT {
            return Err(Error::domain(format!(
                "split vector norm² = {norm_sqr}, expected 1 within {:.0e}",
                tol::SPLIT_UNIT
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn modes(&self) -> usize {
        self.values.len()
    }

    /// Largest entrywise deviation from the uniform split of the same size.
    pub fn deviation_from_uniform(&self) -> f64 {
        let u = 1.0 / (self.values.len() as f64).sqrt();
        self.values
            .iter()
            .map(|v| (v - u).abs())
            .fold(0.0, f64::max)
    }
}

/// The linear chain: N splitters numbered left to right, each peeling off
/// one fresh output mode with θⱼ = arcsin(1/√(N+2−j)). The angles implement
/// transmittance-to-reflectance ratios (N+1−j):1, which equalize all output
/// intensities.
pub fn config2(splitters: u32) -> Result<Cascade> {
    let n = splitters as usize;
    let mut list = Vec::with_capacity(n);
    for j in 1..=n {
        let theta = (1.0 / ((n + 2 - j) as f64).sqrt()).asin();
        list.push(BeamSplitter::new(0, j, theta)?);
    }
    Cascade::new(n + 1, list)
}

/// The balanced tree: a perfect binary tree of depth `d` made of 2^d − 1
/// fifty-fifty splitters over 2^d modes. Only power-of-two mode counts admit
/// this layout; other sizes are rejected.
pub fn config1(depth: u32) -> Result<Cascade> {
    if depth == 0 {
        return Err(Error::domain("tree depth must be at least 1"));
    }
    if depth > 20 {
        return Err(Error::domain("tree depth above 20 is not supported"));
    }
    let modes = 1usize << depth;
    let theta = std::f64::consts::FRAC_PI_4;
    let mut list = Vec::with_capacity(modes - 1);
    for level in 0..depth {
        let stride = 1usize << (depth - level);
        for i in 0..(1usize << level) {
            list.push(BeamSplitter::new(i * stride, i * stride + stride / 2, theta)?);
        }
    }
    Cascade::new(modes, list)
}

/// The uniform split 1/√(N+1): the coherence optimum for coherent, number,
/// and photon-number-diagonal mixed inputs alike.
pub fn optimal_split(splitters: u32) -> SplitVector {
    let modes = splitters as usize + 1;
    let v = 1.0 / (modes as f64).sqrt();
    SplitVector {
        values: vec![v; modes],
    }
}

/// Express the input creation operator in terms of the output modes:
/// a†_in = Σ τⱼ a†ⱼ after all splitters.
///
/// Each splitter rotates the coefficient pair of its two modes. The entries
/// are returned as moduli — only |τⱼ| enters any l1 quantity, and both
/// canonical configurations produce non-negative coefficients anyway.
pub fn tau_vector(cascade: &Cascade) -> Result<SplitVector> {
    cascade.check_reachable()?;
    let mut coeff = vec![0.0f64; cascade.mode_count()];
    coeff[cascade.input_mode()] = 1.0;
    for bs in cascade.splitters() {
        let (c, s) = (bs.transmission(), bs.reflection());
        let a = coeff[bs.mode_a];
        let b = coeff[bs.mode_b];
        coeff[bs.mode_a] = a * c - b * s;
        coeff[bs.mode_b] = a * s + b * c;
    }
    for v in coeff.iter_mut() {
        *v = v.abs();
    }
    SplitVector::new(coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn config2_single_splitter_is_balanced() {
        let cascade = config2(1).unwrap();
        assert_eq!(cascade.splitters().len(), 1);
        assert_relative_eq!(cascade.splitters()[0].theta(), FRAC_PI_4, epsilon = 1e-15);
        let tau = tau_vector(&cascade).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(tau.values()[0], r, epsilon = 1e-15);
        assert_relative_eq!(tau.values()[1], r, epsilon = 1e-15);
    }

    #[test]
    fn config2_angle_sequence() {
        let cascade = config2(2).unwrap();
        assert_relative_eq!(
            cascade.splitters()[0].theta(),
            (1.0 / 3.0f64.sqrt()).asin(),
            epsilon = 1e-15
        );
        assert_relative_eq!(cascade.splitters()[1].theta(), FRAC_PI_4, epsilon = 1e-15);

        let three = config2(3).unwrap();
        assert_relative_eq!(three.splitters()[0].theta(), FRAC_PI_6, epsilon = 1e-15);
    }

    #[test]
    fn config2_zero_is_degenerate() {
        let cascade = config2(0).unwrap();
        assert_eq!(cascade.mode_count(), 1);
        assert!(cascade.splitters().is_empty());
        let tau = tau_vector(&cascade).unwrap();
        assert_eq!(tau.values(), &[1.0]);
    }

    #[test]
    fn config1_structure() {
        let one = config1(1).unwrap();
        assert_eq!(one.mode_count(), 2);
        assert_eq!(one.splitters().len(), 1);

        let two = config1(2).unwrap();
        assert_eq!(two.mode_count(), 4);
        assert_eq!(two.splitters().len(), 3);
        let tau = tau_vector(&two).unwrap();
        for &v in tau.values() {
            assert_relative_eq!(v, 0.5, epsilon = 1e-14);
        }

        let three = config1(3).unwrap();
        assert_eq!(three.splitters().len(), 7);
        let tau = tau_vector(&three).unwrap();
        for &v in tau.values() {
            assert_relative_eq!(v, 1.0 / 8.0f64.sqrt(), epsilon = 1e-14);
        }

        assert!(config1(0).is_err());
    }

    #[test]
    fn canonical_cascades_reach_uniform_split() {
        for n in 0..=10u32 {
            let tau = tau_vector(&config2(n).unwrap()).unwrap();
            let expected = optimal_split(n);
            for (a, b) in tau.values().iter().zip(expected.values()) {
                assert!((a - b).abs() < 1e-12, "config2({n}): {a} vs {b}");
            }
        }
        for d in 1..=5u32 {
            let tau = tau_vector(&config1(d).unwrap()).unwrap();
            let expected = optimal_split((1u32 << d) - 1);
            for (a, b) in tau.values().iter().zip(expected.values()) {
                assert!((a - b).abs() < 1e-12, "config1({d}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn optimal_split_values() {
        assert_eq!(optimal_split(0).values(), &[1.0]);
        let four = optimal_split(3);
        for &v in four.values() {
            assert_relative_eq!(v, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn random_cascades_preserve_unit_norm() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let modes = rng.gen_range(2usize..6);
            let mut list = Vec::new();
            // chain first so every mode is reachable, then extra random couplings
            for m in 1..modes {
                list.push(BeamSplitter::new(m - 1, m, rng.gen_range(-3.0..3.0)).unwrap());
            }
            for _ in 0..rng.gen_range(0usize..6) {
                let a = rng.gen_range(0..modes);
                let mut b = rng.gen_range(0..modes);
                if b == a {
                    b = (b + 1) % modes;
                }
                list.push(BeamSplitter::new(a, b, rng.gen_range(-3.0..3.0)).unwrap());
            }
            let cascade = Cascade::new(modes, list).unwrap();
            let tau = tau_vector(&cascade).unwrap();
            let norm: f64 = tau.values().iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-12, "norm² = {norm}");
        }
    }

    #[test]
    fn output_relabeling_permutes_tau() {
        let base = Cascade::new(
            3,
            vec![
                BeamSplitter::new(0, 1, 0.4).unwrap(),
                BeamSplitter::new(0, 2, 0.9).unwrap(),
            ],
        )
        .unwrap();
        // swap output labels 1 and 2
        let swapped = Cascade::new(
            3,
            vec![
                BeamSplitter::new(0, 2, 0.4).unwrap(),
                BeamSplitter::new(0, 1, 0.9).unwrap(),
            ],
        )
        .unwrap();
        let t0 = tau_vector(&base).unwrap();
        let t1 = tau_vector(&swapped).unwrap();
        assert_relative_eq!(t0.values()[0], t1.values()[0], epsilon = 1e-15);
        assert_relative_eq!(t0.values()[1], t1.values()[2], epsilon = 1e-15);
        assert_relative_eq!(t0.values()[2], t1.values()[1], epsilon = 1e-15);
    }

    #[test]
    fn unreachable_mode_is_a_structural_error() {
        let cascade = Cascade::new(3, vec![BeamSplitter::new(0, 1, 0.3).unwrap()]).unwrap();
        assert!(matches!(
            tau_vector(&cascade),
            Err(crate::Error::Structure(_))
        ));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let cascade = config2(3).unwrap();
        let text = cascade.to_text();
        let parsed = Cascade::from_text(&text).unwrap();
        assert_eq!(parsed.mode_count(), cascade.mode_count());
        for (a, b) in parsed.splitters().iter().zip(cascade.splitters()) {
            assert_eq!(a, b);
        }

        let commented = format!("# custom layout\n\n{text}");
        assert!(Cascade::from_text(&commented).is_ok());

        let err = Cascade::from_text("1: 0 1 not-a-number").unwrap_err();
        match err {
            crate::Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
        let err = Cascade::from_text("2: 0 1 0.5").unwrap_err();
        assert!(matches!(err, crate::Error::Parse { line: 1, .. }));
    }

    #[test]
    fn splitter_rejects_degenerate_modes_and_bad_angles() {
        assert!(BeamSplitter::new(1, 1, 0.5).is_err());
        assert!(BeamSplitter::new(0, 1, f64::NAN).is_err());
        assert!(BeamSplitter::new(0, 1, -0.5).is_ok());
    }
}

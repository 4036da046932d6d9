//! Multimode photon-number basis: compositions of n photons over N+1 modes.
//!
//! Every passive cascade conserves total photon number, so all state spaces
//! in this crate are unions of fixed-n sectors. A sector is spanned by the
//! compositions of n into N+1 ordered non-negative parts, enumerated here in
//! colexicographic order so downstream output is deterministic.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Photon counts per mode; the label of one multimode Fock basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    counts: Vec<u32>,
}

impl Composition {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::structure("a composition needs at least one mode"));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    /// Total photon number n = Σ mⱼ.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Iterator over all compositions of `n` into `modes` parts in
/// colexicographic order.
///
/// The successor rule moves one photon from the first occupied mode to the
/// next mode and dumps the remainder back into mode 0, which is O(modes) per
/// step and never allocates beyond the yielded vector.
pub fn compositions(n: u32, modes: usize) -> Compositions {
    Compositions {
        current: if modes == 0 {
            None
        } else {
            let mut counts = vec![0u32; modes];
            counts[0] = n;
            Some(counts)
        },
    }
}

pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Self::Item> {
        let counts = self.current.take()?;
        let out = Composition {
            counts: counts.clone(),
        };
        // Successor in colex order.
        let first_occupied = counts.iter().position(|&c| c > 0);
        match first_occupied {
            Some(i) if i + 1 < counts.len() => {
                let mut next = counts;
                let moved = next[i];
                next[i] = 0;
                next[0] = moved - 1;
                next[i + 1] += 1;
                self.current = Some(next);
            }
            _ => self.current = None, // all photons in the last mode, or n = 0
        }
        Some(out)
    }
}

/// The full n-photon sector over N+1 modes with a position index.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n: u32,
    modes: usize,
    states: Vec<Composition>,
    index: HashMap<Composition, usize>,
}

impl SectorBasis {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[Composition] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Position of a composition in colex order, if it belongs to the sector.
    pub fn position(&self, c: &Composition) -> Option<usize> {
        self.index.get(c).copied()
    }
}

/// Enumerate the n-photon sector for a cascade of `splitters` beam splitters
/// (N+1 modes), in colexicographic order.
pub fn enumerate_compositions(n: u32, splitters: u32) -> Result<SectorBasis> {
    let modes = splitters as usize + 1;
    let expected = dimension(n, splitters)?;
    let expected = usize::try_from(expected)
        .map_err(|_| Error::Overflow("sector dimension exceeds addressable size"))?;
    let mut states = Vec::with_capacity(expected);
    let mut index = HashMap::with_capacity(expected);
    for c in compositions(n, modes) {
        index.insert(c.clone(), states.len());
        states.push(c);
    }
    debug_assert_eq!(states.len(), expected);
    Ok(SectorBasis {
        n,
        modes,
        states,
        index,
    })
}

/// Sector dimension D(n, N) = C(n+N, N), in exact integer arithmetic with
/// overflow detection rather than silent wraparound.
pub fn dimension(n: u32, splitters: u32) -> Result<u64> {
    let d = binomial_u128(u64::from(n) + u64::from(splitters), u64::from(splitters))?;
    u64::try_from(d).map_err(|_| Error::Overflow("sector dimension"))
}

fn binomial_u128(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) is always divisible by i at this point.
        acc = acc
            .checked_mul(u128::from(n - k + i))
            .ok_or(Error::Overflow("binomial coefficient"))?;
        acc /= u128::from(i);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(basis: &SectorBasis) -> Vec<Vec<u32>> {
        basis.states().iter().map(|c| c.counts().to_vec()).collect()
    }

    #[test]
    fn single_photon_two_modes() {
        let basis = enumerate_compositions(1, 1).unwrap();
        assert_eq!(counts(&basis), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn vacuum_sector_is_one_state() {
        let basis = enumerate_compositions(0, 3).unwrap();
        assert_eq!(counts(&basis), vec![vec![0, 0, 0, 0]]);
    }

    #[test]
    fn two_photons_two_modes_colex() {
        let basis = enumerate_compositions(2, 1).unwrap();
        assert_eq!(counts(&basis), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn dimension_small_values() {
        for n_splitters in 0..6u32 {
            assert_eq!(dimension(1, n_splitters).unwrap(), u64::from(n_splitters) + 1);
        }
        assert_eq!(dimension(2, 1).unwrap(), 3);
        // brute-force count of triples summing to 3
        let triples = compositions(3, 3).count() as u64;
        assert_eq!(dimension(3, 2).unwrap(), 10);
        assert_eq!(triples, 10);
    }

    #[test]
    fn dimension_overflow_is_reported() {
        assert!(matches!(
            dimension(u32::MAX, u32::MAX),
            Err(crate::Error::Overflow(_))
        ));
    }

    #[test]
    fn pascal_identity() {
        for n in 1..=8u32 {
            for s in 1..=5u32 {
                let lhs = dimension(n, s).unwrap();
                let rhs = dimension(n - 1, s).unwrap() + dimension(n, s - 1).unwrap();
                assert_eq!(lhs, rhs, "Pascal identity failed at n={n}, N={s}");
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let basis = enumerate_compositions(5, 3).unwrap();
        for (k, c) in basis.states().iter().enumerate() {
            assert_eq!(basis.position(c), Some(k));
        }
        let outside = Composition::new(vec![6, 0, 0, 0]).unwrap();
        assert_eq!(basis.position(&outside), None);
    }

    proptest! {
        #[test]
        fn enumeration_matches_dimension(n in 0u32..=8, s in 0u32..=5) {
            let basis = enumerate_compositions(n, s).unwrap();
            prop_assert_eq!(basis.len() as u64, dimension(n, s).unwrap());
            for c in basis.states() {
                prop_assert_eq!(c.total(), n);
                prop_assert_eq!(c.modes(), s as usize + 1);
            }
        }

        #[test]
        fn colex_order_is_strictly_increasing(n in 0u32..=7, s in 0u32..=4) {
            let basis = enumerate_compositions(n, s).unwrap();
            for pair in basis.states().windows(2) {
                let a: Vec<u32> = pair[0].counts().iter().rev().copied().collect();
                let b: Vec<u32> = pair[1].counts().iter().rev().copied().collect();
                prop_assert!(a < b, "colex violation: {:?} !< {:?}", pair[0], pair[1]);
            }
        }
    }
}

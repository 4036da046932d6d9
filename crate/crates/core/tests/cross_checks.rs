//! Cross-module consistency: every closed-form route must agree with the
//! state-level l1 machinery and with the brute-force propagation oracle on
//! overlapping domains.

use std::collections::{BTreeMap, HashMap};

use beamsplit::{
    apply_beamsplitter, l1_density, l1_pure, l1_sector_mixture, max_number_coherence,
    number_coherence, number_output_amplitudes, product_coherence, BeamSplitter, Composition,
    PhotonDistribution, SectorMixture, SplitVector, TruncatedState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_split(modes: usize, rng: &mut ChaCha8Rng) -> SplitVector {
    let mut v: Vec<f64> = (0..modes).map(|_| rng.gen_range(0.0..1.0)).collect();
    if v.iter().all(|x| *x < 1e-6) {
        v[0] = 1.0;
    }
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    SplitVector::new(v).expect("normalized by construction")
}

#[test]
fn closed_form_matches_amplitude_route_for_random_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for splitters in 0..=4u32 {
        for n in 0..=8u32 {
            for _ in 0..20 {
                let tau = random_split(splitters as usize + 1, &mut rng);
                let formula = number_coherence(n, &tau).unwrap();
                let state = number_output_amplitudes(n, &tau).unwrap();
                let via_l1 = l1_pure(&state).unwrap();
                assert!(
                    (formula - via_l1).abs() < 1e-10,
                    "n={n}, N={splitters}: formula {formula} vs l1 {via_l1}"
                );
            }
        }
    }
}

#[test]
fn pure_coherence_is_bounded_by_support_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for splitters in 0..=3u32 {
        for n in 0..=6u32 {
            let tau = random_split(splitters as usize + 1, &mut rng);
            let state = number_output_amplitudes(n, &tau).unwrap();
            let c = l1_pure(&state).unwrap();
            let d = state.support_len() as f64;
            assert!(
                (0.0..=d - 1.0 + 1e-10).contains(&c),
                "n={n}, N={splitters}: coherence {c} outside [0, {}]",
                d - 1.0
            );
        }
    }
}

#[test]
fn uniform_split_dominates_random_splits_for_number_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for splitters in 0..=3u32 {
        for n in 0..=6u32 {
            let best = max_number_coherence(n, splitters).unwrap();
            for _ in 0..100 {
                let tau = random_split(splitters as usize + 1, &mut rng);
                let value = number_coherence(n, &tau).unwrap();
                assert!(
                    best >= value - 1e-10,
                    "n={n}, N={splitters}: uniform {best} beaten by {value}"
                );
            }
        }
    }
}

#[test]
fn equal_means_dominate_random_mean_splits_for_coherent_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let eps = 1e-12;
    for _ in 0..100 {
        let modes = rng.gen_range(2usize..5);
        let total = rng.gen_range(0.2f64..6.0);
        let equal = product_coherence(&vec![total / modes as f64; modes], eps).unwrap();
        // random non-negative split of the same total
        let mut cuts: Vec<f64> = (0..modes).map(|_| rng.gen_range(0.0f64..1.0)).collect();
        let s: f64 = cuts.iter().sum();
        cuts.iter_mut().for_each(|c| *c *= total / s);
        let random = product_coherence(&cuts, eps).unwrap();
        assert!(
            equal >= random - 1e-10,
            "total {total} over {modes}: equal {equal} beaten by {random}"
        );
    }
}

#[test]
fn pure_coherence_equals_projector_coherence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for splitters in 0..=3u32 {
        for n in 1..=5u32 {
            let tau = random_split(splitters as usize + 1, &mut rng);
            let state = number_output_amplitudes(n, &tau).unwrap();
            let direct = l1_pure(&state).unwrap();
            let via_density = l1_density(&state.projector().unwrap()).unwrap();
            assert!(
                (direct - via_density).abs() < 1e-10,
                "n={n}, N={splitters}: {direct} vs {via_density}"
            );
        }
    }
}

/// Poisson-weighted equal-split mixture over sectors 0..=cutoff with the
/// weights renormalized onto the kept sectors.
fn poisson_mixture(nbar: f64, splitters: u32, cutoff: u32) -> SectorMixture {
    let dist = PhotonDistribution::poisson(nbar, 1e-12).unwrap();
    let tau = beamsplit::optimal_split(splitters);
    let mut weights: Vec<f64> = (0..=cutoff).map(|n| dist.weight(n)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut sectors = BTreeMap::new();
    for n in 0..=cutoff {
        let state = number_output_amplitudes(n, &tau).unwrap();
        sectors.insert(n, (weights[n as usize], state));
    }
    SectorMixture::new(sectors, 0.0).unwrap()
}

#[test]
fn sector_mixture_matches_assembled_block_diagonal_density() {
    for splitters in 0..=3u32 {
        for cutoff in [3u32, 5] {
            let mix = poisson_mixture(1.2, splitters, cutoff);
            let fast = l1_sector_mixture(&mix).unwrap();
            let assembled = mix.assemble_density().unwrap();
            let slow = l1_density(&assembled).unwrap();
            assert!(
                (fast - slow).abs() < 1e-10,
                "N={splitters}, cutoff={cutoff}: {fast} vs {slow}"
            );
        }
    }
}

#[test]
fn assembled_mixture_is_positive_semidefinite() {
    let mix = poisson_mixture(0.8, 1, 4);
    let rho = mix.assemble_density().unwrap();
    assert!(rho.min_eigenvalue() >= -1e-9);
}

fn random_truncated_state(
    modes: usize,
    cutoff: u32,
    rng: &mut ChaCha8Rng,
) -> TruncatedState {
    let mut amps: HashMap<Composition, Complex64> = HashMap::new();
    let mut norm = 0.0f64;
    for n in 0..=cutoff {
        for comp in beamsplit::compositions(n, modes) {
            if rng.gen_bool(0.6) {
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                norm += a.norm_sqr();
                amps.insert(comp, a);
            }
        }
    }
    if amps.is_empty() {
        let mut counts = vec![0u32; modes];
        counts[0] = cutoff;
        amps.insert(Composition::new(counts).unwrap(), Complex64::new(1.0, 0.0));
        norm = 1.0;
    }
    let scale = norm.sqrt();
    for a in amps.values_mut() {
        *a /= scale;
    }
    TruncatedState::from_amplitudes(modes, amps).unwrap()
}

#[test]
fn random_rotations_preserve_norm_and_sectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let modes = rng.gen_range(2usize..=4);
        let cutoff = rng.gen_range(1u32..=8);
        let state = random_truncated_state(modes, cutoff, &mut rng);
        let sector_mass_before = sector_masses(&state, cutoff);
        let a = rng.gen_range(0..modes);
        let b = (a + rng.gen_range(1..modes)) % modes;
        let bs = BeamSplitter::new(a, b, rng.gen_range(-3.0..3.0)).unwrap();
        let rotated = apply_beamsplitter(&state, &bs).unwrap();
        assert!((rotated.norm_sqr() - 1.0).abs() < 1e-12);
        let sector_mass_after = sector_masses(&rotated, cutoff);
        for (before, after, n) in sector_mass_before
            .iter()
            .zip(&sector_mass_after)
            .zip(0u32..)
            .map(|((x, y), n)| (x, y, n))
        {
            assert!(
                (before - after).abs() < 1e-12,
                "sector {n} mass changed: {before} -> {after}"
            );
        }
    }
}

fn sector_masses(state: &TruncatedState, cutoff: u32) -> Vec<f64> {
    let mut masses = vec![0.0f64; cutoff as usize + 1];
    for (comp, amp) in state.amplitudes() {
        masses[comp.total() as usize] += amp.norm_sqr();
    }
    masses
}

#[test]
fn truncated_pure_state_carries_tail_into_l1_bound() {
    // A half-split coherent state still certifies its l1 value.
    let input = beamsplit::coherent_input_state(2.0, 3, 1e-12).unwrap();
    let cascade = beamsplit::config2(2).unwrap();
    let output = beamsplit::propagate(&cascade, &input).unwrap();
    let pure = output.to_pure_state().unwrap();
    let bound = beamsplit::l1_pure_bound(&pure);
    assert!(bound > 0.0 && bound < 1e-6, "bound = {bound}");
}

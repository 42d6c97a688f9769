//! Property tests for the structural invariants of norms, partition and solver.

use std::f64::consts::PI;

use besov_dh::chemin_lerner::{minkowski_ordering_audit, FieldSelector, Trajectory};
use besov_dh::littlewood_paley::{dyadic_dilation, BesovIndex, DyadicPartition, Measure, ShellDecomposition};
use besov_dh::random::random_field;
use besov_dh::solver::{bilinear_b, heat_flow, rhs, StatePair};
use besov_dh::{dhf, Grid, SpectralField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> Grid {
    Grid::new(2, 16, 2.0 * PI).unwrap()
}

fn field(g: &Grid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_field(g, &mut rng, 0.5, g.nyquist())
}

fn pair(g: &Grid, seed: u64, amplitude: f64) -> StatePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = g.nyquist() * 0.6;
    StatePair::new(random_field(g, &mut rng, 0.5, kmax), random_field(g, &mut rng, 0.5, kmax))
        .unwrap()
        .scale(amplitude)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(4.0), Just(f64::INFINITY), 1.0f64..6.0]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn partition_identities_hold(r in 1e-6f64..1e6) {
        let part = DyadicPartition::new();
        let full: f64 = part.touching_shells(r).map(|j| part.block_symbol(j, r)).sum();
        prop_assert!((full - 1.0).abs() < 1e-12);
        let inhomogeneous = part.psi(r) + part.touching_shells(r).filter(|&j| j >= 0).map(|j| part.block_symbol(j, r)).sum::<f64>();
        prop_assert!((inhomogeneous - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blocks_sum_back_to_the_mean_free_field(seed in any::<u64>()) {
        let g = grid();
        let f = field(&g, seed);
        let shells = ShellDecomposition::new(&g, DyadicPartition::new());
        let mut sum = SpectralField::zeros(&g);
        for j in shells.shells() {
            sum = sum.try_add(&shells.block(&f, j)).unwrap();
        }
        let err = sum.try_sub(&f.without_mean()).unwrap().max_abs_coeff();
        prop_assert!(err < 1e-13 * f.max_abs_coeff());
    }

    #[test]
    fn besov_norm_is_a_norm(seed in any::<u64>(), alpha in -5.0f64..5.0, s in -2.0f64..2.0, p in exponent(), q in exponent()) {
        let g = grid();
        let (f, h) = (field(&g, seed), field(&g, seed ^ 0x9e37));
        let shells = ShellDecomposition::new(&g, DyadicPartition::new());
        let idx = BesovIndex::new(s, p, q).unwrap();
        let nf = shells.besov_norm(&f, &idx);
        prop_assert!(close(shells.besov_norm(&f.scale(alpha), &idx), alpha.abs() * nf, 1e-12));
        let sum = shells.besov_norm(&f.try_add(&h).unwrap(), &idx);
        prop_assert!(sum <= (nf + shells.besov_norm(&h, &idx)) * (1.0 + 1e-12));
    }

    #[test]
    fn l2_shell_norms_obey_parseval(seed in any::<u64>()) {
        let g = grid();
        let f = field(&g, seed).without_mean();
        let shells = ShellDecomposition::new(&g, DyadicPartition::new());
        // Σ_j φ_j² <= 1 with equality only on a single shell, so ‖f‖² bounds the sum from above.
        let squares: f64 = shells.shell_lp_norms(&f, 2.0).iter().map(|x| x * x).sum();
        let energy = f.energy();
        prop_assert!(squares <= energy * (1.0 + 1e-12));
        prop_assert!(squares >= 0.5 * energy);
    }

    #[test]
    fn critical_norm_is_dilation_invariant(seed in any::<u64>(), p in prop_oneof![Just(2.0), Just(4.0), Just(f64::INFINITY)], q in exponent()) {
        let g = grid();
        let f = field(&g, seed);
        let idx = BesovIndex::new(-2.0 + 2.0 / p, p, q).unwrap();
        let before = ShellDecomposition::new(&g, DyadicPartition::new()).besov_norm_in(&f, &idx, Measure::Lebesgue);
        let d = dyadic_dilation(&f, 1).unwrap();
        let after = ShellDecomposition::new(d.grid(), DyadicPartition::new()).besov_norm_in(&d, &idx, Measure::Lebesgue);
        prop_assert!(close(before, after, 1e-10));
    }

    #[test]
    fn heat_flow_contracts_every_shell(seed in any::<u64>(), t in 0.0f64..2.0) {
        let g = grid();
        let f = field(&g, seed);
        let shells = ShellDecomposition::new(&g, DyadicPartition::new());
        let before = shells.shell_lp_norms(&f, 2.0);
        let after = shells.shell_lp_norms(&f.heat(t).unwrap(), 2.0);
        for (a, b) in after.iter().zip(&before) {
            prop_assert!(*a <= b * (1.0 + 1e-14));
        }
    }

    #[test]
    fn nonlinearity_conserves_charge(seed in any::<u64>(), amplitude in 0.0f64..10.0) {
        let g = grid();
        let u = pair(&g, seed, amplitude);
        let n = rhs(&u, true).unwrap();
        prop_assert!(n.v.coeffs()[0].norm() < 1e-13 * (1.0 + amplitude * amplitude));
        prop_assert!(n.w.coeffs()[0].norm() < 1e-13 * (1.0 + amplitude * amplitude));
    }

    #[test]
    fn bilinear_form_is_symmetric(seed in any::<u64>()) {
        let g = grid();
        let times = vec![0.0, 0.1, 0.2];
        let a = heat_flow(&pair(&g, seed, 1.0), &times).unwrap();
        let b = heat_flow(&pair(&g, seed ^ 1, 1.0), &times).unwrap();
        let ab = bilinear_b(&a, &b, true).unwrap();
        let ba = bilinear_b(&b, &a, true).unwrap();
        let diff = ab.difference(&ba).unwrap();
        let scale = ab.states().iter().map(StatePair::max_abs_coeff).fold(0.0, f64::max);
        let err = diff.states().iter().map(StatePair::max_abs_coeff).fold(0.0, f64::max);
        prop_assert!(err <= 1e-14 * scale.max(1.0));
    }

    #[test]
    fn minkowski_ordering_matches_exponents(seed in any::<u64>(), r in exponent(), q in exponent()) {
        let g = grid();
        let traj = heat_flow(&pair(&g, seed, 1.0), &[0.0, 0.05, 0.1, 0.2, 0.4]).unwrap();
        let shells = ShellDecomposition::new(&g, DyadicPartition::new());
        let idx = BesovIndex::new(0.0, 2.0, q).unwrap();
        let report = minkowski_ordering_audit(&traj, &shells, FieldSelector::Pair, r, &idx).unwrap();
        prop_assert!(report.holds, "{:?}", report);
    }

    #[test]
    fn dhf_round_trip_preserves_samples(seed in any::<u64>(), dim in 2usize..=3) {
        let g = Grid::new(dim, 8, 1.5).unwrap();
        let f = field(&g, seed);
        let mut bytes = Vec::new();
        dhf::write_field(&mut bytes, &f).unwrap();
        let back = dhf::read_field(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        let scale = f.to_physical().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in back.to_physical().iter().zip(f.to_physical()) {
            prop_assert!((a - b).abs() <= 1e-13 * scale);
        }
    }
}

#[test]
fn constant_trajectory_norms_agree_in_every_order() {
    let g = grid();
    let state = pair(&g, 5, 1.0);
    let traj = Trajectory::constant(state, vec![0.0, 0.5, 1.0]).unwrap();
    let shells = ShellDecomposition::new(&g, DyadicPartition::new());
    for r in [1.0, 3.0, f64::INFINITY] {
        let idx = BesovIndex::new(-1.0, 2.0, 2.0).unwrap();
        let report = minkowski_ordering_audit(&traj, &shells, FieldSelector::Pair, r, &idx).unwrap();
        assert!(close(report.chemin_lerner, report.lr_besov, 1e-12), "{report:?}");
    }
}

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use proptest::prelude::*;

use clocklat::circle::{bond_energy_sq, geodesic_distance_s1, geodesic_distance_sn};
use clocklat::constructions::{discretize_field, project_to_sn};
use clocklat::continuum::{jump_energy_direct, jump_energy_sliced, GridPartitionField};
use clocklat::lattice::discrete_energy;
use clocklat::solvers::bond_lower_bound_energy;
use clocklat::{CircleValue, Clock, LatticeDomain, PhaseIndex, SpinField};

fn field_strategy() -> impl Strategy<Value = (usize, u32, Vec<usize>, Vec<u32>)> {
    (2usize..=3, 2u32..=12).prop_flat_map(|(d, n)| {
        let side = if d == 2 { 2usize..=7 } else { 2usize..=4 };
        prop::collection::vec(side, d).prop_flat_map(move |ext| {
            let sites: usize = ext.iter().product();
            (
                Just(d),
                Just(n),
                Just(ext),
                prop::collection::vec(0..n, sites),
            )
        })
    })
}

fn build(d: usize, n: u32, ext: &[usize], values: &[u32], eps: f64) -> SpinField {
    let dom = Arc::new(LatticeDomain::grid(eps, &vec![0; d], ext, &[]).unwrap());
    SpinField::from_values(dom, n, values.iter().map(|&k| PhaseIndex(k)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bond_lower_bound_holds((d, n, ext, values) in field_strategy(), eps in 0.01f64..0.5) {
        let f = build(d, n, &ext, &values, eps);
        let e = discrete_energy(&f, None).scaled;
        let lb = bond_lower_bound_energy(&f, None);
        prop_assert!(lb <= e * (1.0 + 1e-12) + 1e-12, "{} > {}", lb, e);
    }
}

proptest! {
    #[test]
    fn global_rotation_keeps_energy((d, n, ext, values) in field_strategy(), shift in 0u32..12) {
        let f = build(d, n, &ext, &values, 0.1);
        let rotated: Vec<u32> = values.iter().map(|k| (k + shift) % n).collect();
        let g = build(d, n, &ext, &rotated, 0.1);
        prop_assert_eq!(discrete_energy(&f, None).raw, discrete_energy(&g, None).raw);
    }

    #[test]
    fn s1_triangle_inequality(a in 0.0..TAU, b in 0.0..TAU, c in 0.0..TAU) {
        let (a, b, c) = (CircleValue::new(a), CircleValue::new(b), CircleValue::new(c));
        prop_assert!(geodesic_distance_s1(a, c) <= geodesic_distance_s1(a, b) + geodesic_distance_s1(b, c) + 1e-12);
        prop_assert!(geodesic_distance_s1(a, b) <= PI + 1e-15);
    }

    #[test]
    fn sn_distance_matches_chord(n in 2u32..64, a in 0u32..64, b in 0u32..64, c in 0u32..64) {
        let (a, b, c) = (PhaseIndex(a % n), PhaseIndex(b % n), PhaseIndex(c % n));
        let dab = geodesic_distance_sn(a, b, n).unwrap();
        prop_assert!(geodesic_distance_sn(a, c, n).unwrap() <= dab + geodesic_distance_sn(b, c, n).unwrap() + 1e-12);
        let clock = Clock::new(n).unwrap();
        let [ax, ay] = clock.value(a).to_vector();
        let [bx, by] = clock.value(b).to_vector();
        let chord = (ax - bx).powi(2) + (ay - by).powi(2);
        prop_assert!((bond_energy_sq(a, b, n).unwrap() - chord).abs() <= 1e-12);
        prop_assert!((chord - 4.0 * (dab / 2.0).sin().powi(2)).abs() <= 1e-12);
    }

    #[test]
    fn projection_is_floor(n in 2u32..200, angle in 0.0..TAU) {
        let k = project_to_sn(CircleValue::new(angle), n).unwrap();
        let clock = Clock::new(n).unwrap();
        let base = clock.angle(k);
        let off = (angle - base).rem_euclid(TAU);
        prop_assert!(off < clock.theta() + 1e-12 || off > TAU - 1e-12);
        prop_assert_eq!(project_to_sn(clock.value(k), n).unwrap(), k);
    }

    #[test]
    fn slicing_matches_direct(d in 2usize..=3, n in 2u32..10, seed in prop::collection::vec(0u32..1000, 64)) {
        let ext = if d == 2 { vec![8, 8] } else { vec![4, 4, 4] };
        let cells: usize = ext.iter().product();
        let values = (0..cells).map(|c| PhaseIndex(seed[c % seed.len()].wrapping_mul(c as u32 + 1) % n)).collect();
        let f = GridPartitionField::from_phases(0.125, vec![0; d], ext, n, values).unwrap();
        prop_assert!((jump_energy_direct(&f) - jump_energy_sliced(&f)).abs() <= 1e-12);
    }

    #[test]
    fn discretization_slack(angles in prop::collection::vec(0.0..TAU, 36), n in 3u32..=64) {
        let u = GridPartitionField::from_angles(1.0 / 6.0, vec![0, 0], vec![6, 6], angles.into_iter().map(CircleValue::new).collect()).unwrap();
        let pu = discretize_field(&u, n).unwrap();
        let theta = TAU / n as f64;
        prop_assert!(jump_energy_direct(&pu) <= jump_energy_direct(&u) + 2.0 * theta * u.interface_area() + 1e-12);
    }
}

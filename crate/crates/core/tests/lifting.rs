mod common;

use std::collections::HashMap;

use burau_core::lab::Lab;
use burau_core::lifting::{crt_lift, gamma_lift, gamma_prime_lift, sp_lift, stab_lift, LiftFamily};
use burau_core::symplectic::is_symplectic;
use burau_core::{in_gamma, reduce, sp_group, GroupSet, IntMatrix, ModMatrix, SubgroupSpec};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn e1(d: usize) -> Vec<BigInt> {
    (0..d).map(|i| BigInt::from(u8::from(i == 0))).collect()
}

#[test]
fn sp_and_stab_lifts_round_trip_exhaustively() {
    let cases = [(1usize, 2u64), (1, 3), (1, 4), (1, 5), (1, 6), (2, 2), (2, 3)];
    for (g, l) in cases {
        let group = sp_group(g, l).unwrap();
        for a in group.iter() {
            let lifted = sp_lift(&a, g).unwrap();
            assert!(is_symplectic(&lifted));
            assert_eq!(reduce(&lifted, l).unwrap(), a);
        }
        let mut first = vec![0; 2 * g];
        first[0] = 1;
        for a in group.stabilizer_subgroup(&first).unwrap().iter() {
            let lifted = stab_lift(&a, g).unwrap();
            assert!(is_symplectic(&lifted));
            assert_eq!(lifted.column(0), e1(2 * g));
            assert_eq!(reduce(&lifted, l).unwrap(), a);
        }
    }
}

#[test]
fn lifts_reject_non_residues() {
    let bad = ModMatrix::from_rows(3, &[vec![1, 1], vec![1, 1]]).unwrap();
    assert!(sp_lift(&bad, 1).is_err());
    let moved = ModMatrix::from_rows(3, &[vec![0, 2], vec![1, 0]]).unwrap();
    assert!(sp_lift(&moved, 1).is_ok());
    assert!(stab_lift(&moved, 1).is_err());
}

#[test]
fn gamma_lifts_cover_whole_quotients() {
    let lab = Lab::default();
    for (n, l) in [(3usize, 4u64), (4, 3), (5, 2), (4, 2)] {
        let q = lab.gamma_quotient(n, l).unwrap();
        for a in q.iter() {
            let lifted = gamma_lift(&a, n).unwrap();
            assert!(in_gamma(&lifted, &SubgroupSpec::gamma(n - 1, 1)).unwrap());
            assert_eq!(reduce(&lifted, l).unwrap(), a);
        }
    }
}

#[test]
fn gamma_prime_lifts_cover_reduced_images() {
    let lab = Lab::default();
    for (n, l) in [(4usize, 3u64), (4, 4), (3, 5), (5, 2)] {
        for a in lab.image(n, l, true).unwrap().iter() {
            let lifted = gamma_prime_lift(&a, n).unwrap();
            assert!(in_gamma(&lifted, &SubgroupSpec::gamma_prime(n - 1, 1)).unwrap());
            assert_eq!(reduce(&lifted, l).unwrap(), a);
        }
    }
}

#[test]
fn random_crt_lifts_meet_both_congruences() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut kernels: HashMap<(usize, u64, u64), GroupSet> = HashMap::new();
    for _ in 0..200 {
        let g = rng.gen_range(1..=2usize);
        let (l, m) = if g == 1 { (rng.gen_range(2..=12u64), rng.gen_range(2..=12u64)) } else { (3, rng.gen_range(2..=9u64)) };
        let d = common::gcd(l, m);
        let pool = kernels.entry((g, l, d)).or_insert_with(|| sp_group(g, l).unwrap().congruence_kernel(d).unwrap());
        let a = pool.element(rng.gen_range(0..pool.order()));
        let family = if rng.gen_bool(0.5) { LiftFamily::Sp { g } } else { LiftFamily::SpStab { g } };
        if matches!(family, LiftFamily::SpStab { .. }) && a.mul_vec(&e1_u(2 * g)).unwrap() != e1_u(2 * g) {
            assert!(crt_lift(&a.to_int_matrix(), l, m, family).is_err());
            continue;
        }
        let lifted = crt_lift(&a.to_int_matrix(), l, m, family).unwrap();
        assert!(is_symplectic(&lifted));
        assert_eq!(reduce(&lifted, l).unwrap(), a, "l={l} m={m}");
        assert!(reduce(&lifted, m).unwrap().is_identity(), "l={l} m={m}");
        if let LiftFamily::SpStab { g } = family {
            assert_eq!(lifted.column(0), e1(2 * g));
        }
    }
}

fn e1_u(d: usize) -> Vec<u64> {
    (0..d).map(|i| u64::from(i == 0)).collect()
}

#[test]
fn crt_lift_rejects_incompatible_residues() {
    let a = IntMatrix::from_rows(&[vec![1i64, 1], vec![0, 1]]).unwrap();
    assert!(crt_lift(&a, 4, 6, LiftFamily::Sp { g: 1 }).is_err());
    let ok = crt_lift(&a, 3, 4, LiftFamily::Sp { g: 1 }).unwrap();
    assert!(reduce(&ok, 4).unwrap().is_identity());
}

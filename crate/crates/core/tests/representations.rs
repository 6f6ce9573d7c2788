use burau_core::matrix::big_vec;
use burau_core::symplectic::{gamma_prime_rebuild, gamma_prime_split, is_symplectic, stabilizer_frame, to_symplectic_coords};
use burau_core::{
    burau, burau_sigma, in_gamma, psi, psi_section, reduced_burau, reduced_burau_sigma, BraidWord, FormSpec, IntMatrix,
    ModMatrix, SubgroupSpec,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_word(rng: &mut StdRng, n: usize, max_len: usize) -> BraidWord {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..n as i64);
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect();
    BraidWord::new(n, letters).unwrap()
}

#[test]
fn braid_and_commutation_relations() {
    for n in 2..=8usize {
        let reps: Vec<Box<dyn Fn(i64) -> IntMatrix>> = if n >= 3 {
            vec![
                Box::new(move |i| burau_sigma(n, i).unwrap()),
                Box::new(move |i| reduced_burau_sigma(n, i).unwrap()),
            ]
        } else {
            vec![Box::new(move |i| burau_sigma(n, i).unwrap())]
        };
        for s in &reps {
            for i in 1..n as i64 {
                assert!((&s(i) * &s(-i)).is_identity());
                for j in 1..n as i64 {
                    if (i - j).abs() == 1 {
                        assert_eq!(&(&s(i) * &s(j)) * &s(i), &(&s(j) * &s(i)) * &s(j), "n={n} i={i} j={j}");
                    } else if (i - j).abs() >= 2 {
                        assert_eq!(&s(i) * &s(j), &s(j) * &s(i), "n={n} i={i} j={j}");
                    }
                }
            }
        }
    }
}

#[test]
fn generators_lie_in_gamma_and_gamma_prime() {
    for n in 2..=8usize {
        for i in 1..n as i64 {
            assert!(in_gamma(&burau_sigma(n, i).unwrap(), &SubgroupSpec::gamma(n - 1, 1)).unwrap());
            if n >= 3 {
                assert!(in_gamma(&reduced_burau_sigma(n, i).unwrap(), &SubgroupSpec::gamma_prime(n - 1, 1)).unwrap());
            }
        }
    }
}

#[test]
fn psi_intertwines_on_random_words() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for n in 3..=8usize {
        for _ in 0..100 {
            let w = random_word(&mut rng, n, 30);
            assert_eq!(psi(&burau(&w), n).unwrap(), reduced_burau(&w).unwrap(), "n={n} word={:?}", w.letters());
        }
    }
}

#[test]
fn section_of_psi_on_random_words() {
    let mut rng = StdRng::seed_from_u64(7);
    for n in [4usize, 6, 8] {
        for _ in 0..40 {
            let b = reduced_burau(&random_word(&mut rng, n, 20)).unwrap();
            let s = psi_section(&b, n).unwrap();
            assert!(in_gamma(&s, &SubgroupSpec::gamma(n - 1, 1)).unwrap());
            assert_eq!(psi(&s, n).unwrap(), b);
        }
    }
}

#[test]
fn section_is_not_multiplicative() {
    let b1 = reduced_burau(&BraidWord::parse("3", 4).unwrap()).unwrap();
    let b2 = reduced_burau(&BraidWord::parse("2 3", 4).unwrap()).unwrap();
    let lhs = psi_section(&(&b1 * &b2), 4).unwrap();
    let rhs = &psi_section(&b1, 4).unwrap() * &psi_section(&b2, 4).unwrap();
    assert_ne!(lhs, rhs);
    assert_eq!(psi(&lhs, 4).unwrap(), psi(&rhs, 4).unwrap());
}

#[test]
fn coordinate_changes_produce_symplectic_blocks() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in 3..=8usize {
        let p = to_symplectic_coords(n).unwrap();
        let p_inv = p.inverse().unwrap();
        for _ in 0..20 {
            let a = burau(&random_word(&mut rng, n, 15));
            let x = a.conjugate_by(&p, &p_inv).unwrap();
            if n % 2 == 0 {
                assert!(is_symplectic(&x));
                let f = stabilizer_frame(n).unwrap();
                let y = a.conjugate_by(&f, &f.inverse().unwrap()).unwrap();
                assert!(is_symplectic(&y));
                assert_eq!(y.column(0), big_vec(&[1i64].iter().chain(&vec![0; n - 1]).copied().collect::<Vec<_>>()));
            } else {
                let k = n - 1;
                let s = IntMatrix::from_big_rows((0..k).map(|i| x.row(i)[..k].to_vec()).collect()).unwrap();
                assert!(is_symplectic(&s));
                assert_eq!(x.row(k)[k], BigInt::from(1));
                assert!(x.column(k)[..k].iter().all(|e| *e == BigInt::from(0)));
            }
        }
    }
}

#[test]
fn gamma_prime_split_round_trip() {
    let mut rng = StdRng::seed_from_u64(13);
    for n in [4usize, 6, 8] {
        for _ in 0..30 {
            let a = reduced_burau(&random_word(&mut rng, n, 20)).unwrap();
            let (s, t) = gamma_prime_split(&a, n).unwrap();
            assert!(is_symplectic(&s));
            assert_eq!(gamma_prime_rebuild(&s, &t, n).unwrap(), a);
        }
    }
}

fn small_vec(d: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, d)
}

proptest! {
    #[test]
    fn forms_are_alternating(n in 2usize..9, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-20..20)).collect();
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(-20..20)).collect();
        for form in [FormSpec::unreduced(n), FormSpec::reduced(n)] {
            let (v, w) = (big_vec(&v), big_vec(&w));
            prop_assert_eq!(form.eval(&v, &w).unwrap(), -form.eval(&w, &v).unwrap());
            prop_assert_eq!(form.eval(&v, &v).unwrap(), BigInt::from(0));
        }
    }

    #[test]
    fn words_act_by_isometries(n in 3usize..8, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_word(&mut rng, n, 25);
        let m = burau(&w);
        prop_assert!(FormSpec::unreduced(n).is_isometry(&m).unwrap());
        prop_assert!(FormSpec::reduced(n - 1).is_isometry(&reduced_burau(&w).unwrap()).unwrap());
        let inv = burau(&w.inverse());
        prop_assert!((&m * &inv).is_identity());
        prop_assert_eq!(m.determinant().magnitude().clone(), 1u32.into());
    }

    #[test]
    fn encoding_round_trips(dim in 1usize..7, modulus in 1u64..300, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..dim * dim).map(|_| rng.gen_range(0..modulus)).collect();
        let m = ModMatrix::new(dim, modulus, entries).unwrap();
        let code = m.encode();
        prop_assert_eq!(ModMatrix::decode(&code, dim, modulus).unwrap(), m.clone());
        let width = burau_core::modmatrix::encoded_width(dim, modulus);
        let back = burau_core::Code::from_bytes(&code.to_bytes(width), dim, modulus);
        prop_assert_eq!(back, code);
    }

    #[test]
    fn encoding_order_is_consistent(modulus in 2u64..40, a in small_vec(9), b in small_vec(9)) {
        let rows = |v: &[i64]| v.chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>();
        let x = ModMatrix::from_rows(modulus, &rows(&a)).unwrap();
        let y = ModMatrix::from_rows(modulus, &rows(&b)).unwrap();
        prop_assert_eq!(x.encode() == y.encode(), x == y);
        prop_assert_eq!(x.encode().cmp(&y.encode()), y.encode().cmp(&x.encode()).reverse());
    }

    #[test]
    fn json_round_trip(a in small_vec(16)) {
        let m = IntMatrix::from_rows(&a.chunks(4).map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(IntMatrix::from_json_str(&m.to_json_string()).unwrap(), m);
    }
}

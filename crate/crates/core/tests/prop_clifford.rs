use lamehardy_core::clifford::{blade_product, BladeMask, Multivector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sign and mask of `e_A e_B` by writing out the generator word, bubble
/// sorting it and cancelling equal neighbours (`e_i e_i = -1`).
fn word_oracle(a: u8, b: u8, m: usize) -> (i8, u8) {
    let mut word: Vec<usize> = (0..m).filter(|i| a >> i & 1 == 1).collect();
    word.extend((0..m).filter(|i| b >> i & 1 == 1));
    let mut sign = 1i8;
    for pass in 0..word.len() {
        for i in 0..word.len().saturating_sub(1 + pass) {
            if word[i] > word[i + 1] {
                word.swap(i, i + 1);
                sign = -sign;
            }
        }
    }
    let mut mask = 0u8;
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && word[i] == word[i + 1] {
            sign = -sign;
            i += 2;
        } else {
            mask |= 1 << word[i];
            i += 1;
        }
    }
    (sign, mask)
}

fn multivector(m: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-10.0..10.0f64, 1 << m)
        .prop_map(move |c| Multivector::from_coeffs(m, &c).unwrap())
}

fn vector(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, m)
}

fn dim_and<T: Strategy + 'static>(f: fn(usize) -> T) -> impl Strategy<Value = (usize, T::Value)> {
    (3usize..=6).prop_flat_map(move |m| (Just(m), f(m)))
}

fn pair(m: usize) -> impl Strategy<Value = (Multivector, Multivector)> {
    (multivector(m), multivector(m))
}

fn vector_pair(m: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (vector(m), vector(m))
}

#[test]
fn blade_product_matches_word_oracle_exhaustively() {
    for m in 3..=6 {
        for a in 0..1u8 << m {
            for b in 0..1u8 << m {
                let (s, c) = blade_product(BladeMask(a), BladeMask(b), m).unwrap();
                assert_eq!((s, c.0), word_oracle(a, b, m), "m={m} a={a:#b} b={b:#b}");
            }
        }
    }
}

#[test]
fn submultiplicative_ten_thousand_pairs_per_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 3..=6 {
        let bound = 2f64.powf(m as f64 / 2.0);
        let draw = |rng: &mut ChaCha8Rng| {
            let c: Vec<f64> = (0..1 << m).map(|_| rng.random_range(-1.0..1.0)).collect();
            Multivector::from_coeffs(m, &c).unwrap()
        };
        for _ in 0..10_000 {
            let (a, b) = (draw(&mut rng), draw(&mut rng));
            assert!(
                (a * b).clifford_norm()
                    <= bound * a.clifford_norm() * b.clifford_norm() * (1.0 + 1e-12)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2500))]

    #[test]
    fn submultiplicative((m, (a, b)) in dim_and(pair)) {
        let bound = 2f64.powf(m as f64 / 2.0) * a.clifford_norm() * b.clifford_norm();
        prop_assert!((a * b).clifford_norm() <= bound * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn conjugation_reverses_products((_m, (a, b)) in dim_and(pair)) {
        let lhs = (a * b).conjugate();
        let rhs = b.conjugate() * a.conjugate();
        let scale = a.clifford_norm() * b.clifford_norm();
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * scale);
    }

    #[test]
    fn coordinate_difference_from_anticommutator((m, (x, y)) in dim_and(vector_pair)) {
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dv = Multivector::embed_vector(&d).unwrap();
        for j in 1..=m {
            let ej = Multivector::generator(m, j);
            let sym = (ej * dv + dv * ej) * -0.5;
            let expected = Multivector::scalar(m, x[j - 1] - y[j - 1]);
            prop_assert!(sym.distance(&expected) <= 1e-12 * (1.0 + d[j - 1].abs()));
        }
    }

    #[test]
    fn sandwich_scales_vectors((m, v) in dim_and(vector)) {
        let v = Multivector::embed_vector(&v).unwrap();
        let mut sum = Multivector::zero(m);
        for i in 1..=m {
            let ei = Multivector::generator(m, i);
            sum += ei * v * ei;
        }
        let expected = v * (m as f64 - 2.0);
        prop_assert!(sum.distance(&expected) <= 1e-12 * (1.0 + v.clifford_norm()));
        prop_assert!(v.generator_sandwich().distance(&expected) <= 1e-12 * (1.0 + v.clifford_norm()));
    }

    #[test]
    fn generator_shortcuts_agree_with_products((m, a) in dim_and(multivector), j in 1usize..=6) {
        let j = 1 + (j - 1) % m;
        let ej = Multivector::generator(m, j);
        prop_assert_eq!(a.left_generator(j), ej * a);
        prop_assert_eq!(a.right_generator(j), a * ej);
    }
}

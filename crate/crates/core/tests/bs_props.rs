//! Randomized invariants for the one-relator ascending-HNN module: the
//! abelianized height map is additive, kills the defining relators and all
//! commutators, and the stabilizing exponent really stabilizes.

use fpgroups_core::baumslag_solitar::{
    commutator_membership, h1_image, stabilizing_exponent, BsParams, H1Map, XiWord,
};
use fpgroups_core::words::Sign;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_xi(rng: &mut ChaCha8Rng, max_len: usize, index_bound: i64) -> XiWord {
    let len = rng.random_range(0..=max_len);
    XiWord::new(
        (0..len)
            .map(|_| {
                (
                    rng.random_range(-index_bound..=index_bound),
                    if rng.random_bool(0.5) {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    },
                )
            })
            .collect(),
    )
}

#[test]
fn height_map_is_additive() {
    let p = BsParams::new(2, 3).unwrap();
    let map = H1Map::new(p).unwrap();
    let d = num_bigint::BigInt::from((p.m() * p.n()).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..1_000 {
        let u = random_xi(&mut rng, 6, 3);
        let v = random_xi(&mut rng, 6, 3);
        let fu = map.image(&u);
        let fv = map.image(&v);
        // f(u)+f(v) as an exact fraction over the common denominator.
        let num = fu.numerator() * d.pow(fv.denominator_exponent())
            + fv.numerator() * d.pow(fu.denominator_exponent());
        let den = d.pow(fu.denominator_exponent() + fv.denominator_exponent());
        assert!(
            map.image(&u.concat(&v)).equals_fraction(&num, &den, &p),
            "f(uv) != f(u)+f(v) for {u} and {v}"
        );
    }
}

#[test]
fn height_map_kills_shifted_relators() {
    // Relator at index i: x_{i+1}^m x_i^{-n}.
    for (m, n) in [(2, 3), (3, 5), (2, 5)] {
        let p = BsParams::new(m, n).unwrap();
        for i in -3..=3i64 {
            let mut factors = Vec::new();
            factors.extend(std::iter::repeat_n((i + 1, Sign::Plus), m as usize));
            factors.extend(std::iter::repeat_n((i, Sign::Minus), n as usize));
            let rel = XiWord::new(factors);
            assert!(
                h1_image(&p, &rel).unwrap().is_zero(),
                "relator at index {i} survives for ({m},{n})"
            );
        }
    }
}

#[test]
fn commutators_and_balanced_words_map_to_zero() {
    let p = BsParams::new(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        // Conjugated commutator: g [u,v] g^-1.
        let u = random_xi(&mut rng, 4, 3);
        let v = random_xi(&mut rng, 4, 3);
        let g = random_xi(&mut rng, 3, 3);
        let comm = u
            .concat(&v)
            .concat(&u.inverse())
            .concat(&v.inverse());
        let conj = g.concat(&comm).concat(&g.inverse());
        assert!(commutator_membership(&p, &conj).unwrap());

        // A word whose exponents cancel at every index separately.
        let w = random_xi(&mut rng, 5, 3);
        let balanced = w.concat(&w.inverse());
        assert!(commutator_membership(&p, &balanced).unwrap());
    }
}

#[test]
fn balanced_per_index_but_shuffled_still_maps_to_zero() {
    let p = BsParams::new(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..300 {
        // Build factors with a net exponent of zero at each index, then
        // shuffle the order; additivity makes the image order-blind.
        let mut factors = Vec::new();
        for i in -2..=2i64 {
            let reps = rng.random_range(0..3usize);
            for _ in 0..reps {
                factors.push((i, Sign::Plus));
                factors.push((i, Sign::Minus));
            }
        }
        for k in (1..factors.len()).rev() {
            factors.swap(k, rng.random_range(0..=k));
        }
        let w = XiWord::new(factors);
        assert!(w.index_sums().iter().all(|(_, s)| *s == 0));
        assert!(commutator_membership(&p, &w).unwrap());
    }
}

/// `stabilizing_exponent` asserts its own postcondition internally when the
/// materialized power is small enough; exercising it on random inputs makes
/// that check run.
#[test]
fn stabilizing_exponent_holds_on_random_words() {
    let p = BsParams::new(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..200 {
        let g = random_xi(&mut rng, 5, 3);
        let s = stabilizing_exponent(&p, &g);
        let bound = g.factors().iter().map(|(i, _)| i.unsigned_abs()).max();
        assert_eq!(u64::from(s), bound.unwrap_or(0));
    }
}

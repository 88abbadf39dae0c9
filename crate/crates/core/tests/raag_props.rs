//! Randomized and exhaustive invariants for the Artin-group normal forms
//! and the bounded conjugacy decision.

use fpgroups_core::raag::{enumerate_ball, RaagPresentation};
use fpgroups_core::words::{enumerate_reduced_words, Letter, Sign, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(rng: &mut ChaCha8Rng, num_gens: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| {
            Letter::new(
                rng.random_range(0..num_gens),
                if rng.random_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                },
            )
        })
        .collect()
}

#[test]
fn normal_form_kills_word_times_inverse() {
    let p4 = RaagPresentation::p4();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10_000 {
        let w = random_word(&mut rng, 4, 12);
        assert!(p4.is_trivial(&w.concat(&w.inverse())), "failed on {w:?}");
    }
}

/// Words over {ab⁻¹, bc⁻¹, cd⁻¹} and inverses: every nonempty reduced
/// combination is nontrivial, consistent with those elements generating a
/// free group of rank three.
#[test]
fn difference_generators_satisfy_no_short_relation() {
    let p4 = RaagPresentation::p4();
    let alphabet = p4.alphabet();
    let gens: Vec<Word> = ["a b^-1", "b c^-1", "c d^-1"]
        .iter()
        .map(|s| alphabet.parse_word(s).unwrap())
        .collect();
    let mut checked = 0usize;
    for abstract_word in enumerate_reduced_words(3, 4) {
        if abstract_word.is_empty() {
            continue;
        }
        let mut substituted = Word::empty();
        for letter in abstract_word.letters() {
            let g = &gens[letter.gen];
            substituted = match letter.sign {
                Sign::Plus => substituted.concat(g),
                Sign::Minus => substituted.concat(&g.inverse()),
            };
        }
        assert!(
            !p4.is_trivial(&substituted),
            "unexpected relation at {abstract_word:?}"
        );
        checked += 1;
    }
    assert_eq!(checked, 936);
}

/// The conjugacy decision restricted to the radius-3 ball is a genuine
/// equivalence relation: reflexive, symmetric, and transitive, checked
/// exhaustively on the full boolean matrix.
#[test]
fn conjugacy_is_an_equivalence_on_the_radius_three_ball() {
    let p4 = RaagPresentation::p4();
    let ball = enumerate_ball(&p4, 3, 10_000).unwrap();
    let n = ball.len();
    let mut matrix = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            matrix[i][j] = p4.conjugate(&ball[i], &ball[j]);
        }
    }
    for i in 0..n {
        assert!(matrix[i][i], "not reflexive at {:?}", ball[i]);
        for j in 0..n {
            assert_eq!(
                matrix[i][j], matrix[j][i],
                "not symmetric at ({:?}, {:?})",
                ball[i], ball[j]
            );
        }
    }
    // With symmetry and reflexivity, transitivity says conjugate elements
    // have identical rows.
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[i][j] {
                assert_eq!(matrix[i], matrix[j], "not transitive at row pair ({i},{j})");
            }
        }
    }
}

/// Replacing an argument by any cyclic rotation of its cyclically reduced
/// core never changes the answer.
#[test]
fn conjugacy_is_invariant_under_core_rotation() {
    let p4 = RaagPresentation::p4();
    let alphabet = p4.alphabet();
    let samples = [
        "a c",
        "b a b c",
        "d c b a",
        "a b^-1 c d",
        "b c b^-1 a",
        "c a d^-1 b",
    ];
    let others = ["c a", "a b", "a b c d", "d"];
    for s in samples {
        let u = alphabet.parse_word(s).unwrap();
        let core = p4.cyclic_core(&u);
        for k in 0..core.len() {
            let mut rotated: Vec<_> = core.letters()[k..].to_vec();
            rotated.extend_from_slice(&core.letters()[..k]);
            let rotated = Word::from_letters(rotated);
            assert!(p4.conjugate(&u, &rotated), "{s} vs rotation {k}");
            for o in others {
                let v = alphabet.parse_word(o).unwrap();
                assert_eq!(
                    p4.conjugate(&u, &v),
                    p4.conjugate(&rotated, &v),
                    "{s} rot {k} against {o}"
                );
            }
        }
    }
}

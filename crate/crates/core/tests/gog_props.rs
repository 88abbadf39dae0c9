//! Randomized invariants for Britton reduction, isometry classification,
//! and the computed kernel of the tree action.

use fpgroups_core::graph_of_groups::{GraphOfGroups, KernelOfAction};
use fpgroups_core::words::{Letter, Sign, Word};
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

fn builtins() -> Vec<GraphOfGroups> {
    vec![
        GraphOfGroups::bs_one_loop(2, 3).unwrap(),
        GraphOfGroups::bs_one_loop(2, 2).unwrap(),
        GraphOfGroups::p4_splitting(),
    ]
}

#[test]
fn reduction_is_idempotent_and_kills_inverses() {
    for g in builtins() {
        let num_gens = g.alphabet().len();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1_000 {
            let w = random_word(&mut rng, num_gens, 6);
            let elem = g.word_to_element(&w).unwrap();
            assert_eq!(g.britton_reduce(&elem).unwrap(), elem);
            let cancel = elem.concat(&elem.inverse());
            assert!(g.word_problem(&cancel).unwrap(), "failed on {w:?}");
        }
    }
}

#[test]
fn isometry_type_is_a_conjugation_invariant() {
    for g in builtins() {
        let num_gens = g.alphabet().len();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..300 {
            let w = random_word(&mut rng, num_gens, 4);
            let h = random_word(&mut rng, num_gens, 2);
            let elem = g.word_to_element(&w).unwrap();
            let conj = g.word_to_element(&h).unwrap();
            let moved = conj.concat(&elem).concat(&conj.inverse());
            assert_eq!(
                g.classify_isometry(&elem).unwrap(),
                g.classify_isometry(&moved).unwrap(),
                "conjugation changed the class of {w:?} under {h:?}"
            );
        }
    }
}

/// The reported kernel generator is normal: conjugating by any generator
/// of the group lands back on a power c^{±k}.
#[test]
fn kernel_generator_is_normal_under_all_generators() {
    for (m, n) in [(2, 2), (3, 3)] {
        let g = GraphOfGroups::bs_one_loop(m, n).unwrap();
        let KernelOfAction::Cyclic { element, .. } = g.kernel_of_action() else {
            panic!("BS({m},{n}) should report a cyclic kernel");
        };
        for k in 1..=2usize {
            let mut ck = element.clone();
            for _ in 1..k {
                ck = ck.concat(&element);
            }
            for gen in 0..g.alphabet().len() {
                let s = g.generator_element(gen).unwrap();
                let conj = s.inverse().concat(&ck).concat(&s);
                let fixed = g.equal(&conj, &ck).unwrap() || g.equal(&conj, &ck.inverse()).unwrap();
                assert!(fixed, "generator {gen} moves c^{k} off the kernel line");
            }
        }
    }
}

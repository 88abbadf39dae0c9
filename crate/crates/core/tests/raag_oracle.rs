//! Cross-checks the insertion normal form against an independent oracle:
//! the shortlex-least element of the rewriting closure of a word under
//! adjacent commuting swaps and free cancellation.

use std::collections::{BTreeSet, VecDeque};

use fpgroups_core::raag::RaagPresentation;
use fpgroups_core::words::{enumerate_reduced_words, Letter, Word};

/// Every word reachable by swapping adjacent commuting letters or freely
/// cancelling an adjacent inverse pair. Length never increases, so the
/// closure is finite and the class minimum is the canonical form.
fn closure_minimum(raag: &RaagPresentation, start: &Word) -> Word {
    let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<Letter>> = VecDeque::new();
    seen.insert(start.letters().to_vec());
    queue.push_back(start.letters().to_vec());
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i].cancels(w[i + 1]) {
                let mut shorter = w.clone();
                shorter.drain(i..=i + 1);
                if seen.insert(shorter.clone()) {
                    queue.push_back(shorter);
                }
            } else if w[i].gen != w[i + 1].gen && raag.commutes(w[i].gen, w[i + 1].gen) {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                if seen.insert(swapped.clone()) {
                    queue.push_back(swapped);
                }
            }
        }
    }
    let min = seen
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("closure contains the start word");
    Word::from_letters(min)
}

#[test]
fn normal_form_matches_closure_minimum_on_p4() {
    let p4 = RaagPresentation::p4();
    let mut checked = 0;
    for word in enumerate_reduced_words(4, 4) {
        assert_eq!(
            p4.normal_form(&word),
            closure_minimum(&p4, &word),
            "disagreement on {}",
            p4.alphabet().display_word(&word)
        );
        checked += 1;
    }
    assert_eq!(checked, 3201);
}

#[test]
fn normal_form_matches_closure_minimum_on_rank_two_abelian() {
    let z2 = RaagPresentation::free_abelian(&["x", "y"]);
    for word in enumerate_reduced_words(2, 5) {
        assert_eq!(z2.normal_form(&word), closure_minimum(&z2, &word));
    }
}

#[test]
fn conjugacy_agrees_with_bounded_witness_search_on_p4() {
    let p4 = RaagPresentation::p4();
    let small: Vec<Word> = enumerate_reduced_words(4, 2);
    let conjugators: Vec<Word> = enumerate_reduced_words(4, 3);
    for u in &small {
        for v in &small {
            let witnessed = conjugators
                .iter()
                .any(|g| p4.is_trivial(&g.conjugate(u).concat(&v.inverse())));
            assert_eq!(
                p4.conjugate(u, v),
                witnessed,
                "disagreement on ({}, {})",
                p4.alphabet().display_word(u),
                p4.alphabet().display_word(v)
            );
        }
    }
}

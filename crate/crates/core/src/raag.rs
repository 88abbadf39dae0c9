//! Right-angled Artin groups presented by simplicial graphs: one generator
//! per vertex, commuting exactly when joined by an edge.
//!
//! Normal forms are shortlex-least representatives, computed in two
//! passes: cancellation across commuting blocks yields a geodesic, then
//! the least front-movable letter is extracted greedily until the word is
//! exhausted. Conjugacy works on cyclically reduced cores via the closure
//! under single-letter rotations, which is complete for these groups.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::quotients::FinitePresentation;
use crate::words::{enumerate_reduced_words, letter_range, GenAlphabet, Letter, Word};

/// Finite undirected graph without loops or multiple edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialGraph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { vertex: usize },
    LoopEdge { vertex: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { vertex } => {
                write!(f, "edge endpoint {vertex} is out of range")
            }
            GraphError::LoopEdge { vertex } => write!(f, "loop edge at vertex {vertex}"),
        }
    }
}

impl core::error::Error for GraphError {}

impl SimplicialGraph {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(
        num_vertices: usize,
        edges: I,
    ) -> Result<SimplicialGraph, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::LoopEdge { vertex: a });
            }
            let v = a.max(b);
            if v >= num_vertices {
                return Err(GraphError::VertexOutOfRange { vertex: v });
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(SimplicialGraph {
            num_vertices,
            edges: set,
        })
    }

    /// Path graph on `n` vertices: edges between consecutive indices.
    pub fn path(n: usize) -> SimplicialGraph {
        SimplicialGraph::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> SimplicialGraph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        SimplicialGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> SimplicialGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        SimplicialGraph::new(n, edges).expect("complete graph edges are valid")
    }

    pub fn discrete(n: usize) -> SimplicialGraph {
        SimplicialGraph::new(n, core::iter::empty()).expect("no edges")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn induced_is_cycle(&self, vertices: &[usize]) -> bool {
        let k = vertices.len();
        let mut degree = alloc::vec![0usize; k];
        let mut edge_count = 0;
        for i in 0..k {
            for j in i + 1..k {
                if self.has_edge(vertices[i], vertices[j]) {
                    degree[i] += 1;
                    degree[j] += 1;
                    edge_count += 1;
                }
            }
        }
        if edge_count != k || degree.iter().any(|&d| d != 2) {
            return false;
        }
        // Degree-2 with k edges: a cycle iff connected.
        let mut seen = alloc::vec![false; k];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if !seen[j] && self.has_edge(vertices[i], vertices[j]) {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
        reached == k
    }

    /// Searches for an induced cycle on 4 up to `max_subset` vertices.
    pub fn induced_long_cycle(&self, max_subset: usize) -> Option<Vec<usize>> {
        let n = self.num_vertices;
        let cap = max_subset.min(n);
        let mut subset = Vec::new();
        self.cycle_search(0, cap, &mut subset)
    }

    fn cycle_search(
        &self,
        from: usize,
        cap: usize,
        subset: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if subset.len() >= 4 && self.induced_is_cycle(subset) {
            return Some(subset.clone());
        }
        if subset.len() == cap {
            return None;
        }
        for v in from..self.num_vertices {
            subset.push(v);
            if let Some(found) = self.cycle_search(v + 1, cap, subset) {
                return Some(found);
            }
            subset.pop();
        }
        None
    }

    /// Size of a largest clique.
    pub fn max_clique(&self) -> usize {
        let mut best = 0;
        let mut clique = Vec::new();
        self.clique_search(0, &mut clique, &mut best);
        best
    }

    fn clique_search(&self, from: usize, clique: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(clique.len());
        for v in from..self.num_vertices {
            if clique.len() + (self.num_vertices - v) <= *best {
                break;
            }
            if clique.iter().all(|&u| self.has_edge(u, v)) {
                clique.push(v);
                self.clique_search(v + 1, clique, best);
                clique.pop();
            }
        }
    }
}

/// A right-angled Artin group: alphabet plus defining graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaagPresentation {
    graph: SimplicialGraph,
    alphabet: GenAlphabet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaagError {
    SizeMismatch { vertices: usize, names: usize },
}

impl fmt::Display for RaagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaagError::SizeMismatch { vertices, names } => {
                write!(f, "{vertices} vertices but {names} generator names")
            }
        }
    }
}

impl core::error::Error for RaagError {}

impl RaagPresentation {
    pub fn new(graph: SimplicialGraph, alphabet: GenAlphabet) -> Result<RaagPresentation, RaagError> {
        if graph.num_vertices() != alphabet.len() {
            return Err(RaagError::SizeMismatch {
                vertices: graph.num_vertices(),
                names: alphabet.len(),
            });
        }
        Ok(RaagPresentation { graph, alphabet })
    }

    /// The path group on generators a, b, c, d with ab, bc, cd commuting.
    pub fn p4() -> RaagPresentation {
        RaagPresentation::new(
            SimplicialGraph::path(4),
            GenAlphabet::new(["a", "b", "c", "d"]).expect("valid names"),
        )
        .expect("sizes match")
    }

    /// Free abelian group of rank `n` (complete graph).
    pub fn free_abelian(names: &[&str]) -> RaagPresentation {
        RaagPresentation::new(
            SimplicialGraph::complete(names.len()),
            GenAlphabet::new(names.iter().copied()).expect("valid names"),
        )
        .expect("sizes match")
    }

    /// Free group of rank `n` (no edges).
    pub fn free(names: &[&str]) -> RaagPresentation {
        RaagPresentation::new(
            SimplicialGraph::discrete(names.len()),
            GenAlphabet::new(names.iter().copied()).expect("valid names"),
        )
        .expect("sizes match")
    }

    pub fn graph(&self) -> &SimplicialGraph {
        &self.graph
    }

    pub fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    pub fn num_gens(&self) -> usize {
        self.alphabet.len()
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }

    /// Commutator presentation, one relator per edge.
    pub fn presentation(&self) -> FinitePresentation {
        let relators = self
            .graph
            .edges()
            .map(|(i, j)| {
                Word::from_letters(alloc::vec![
                    Letter::plus(i),
                    Letter::plus(j),
                    Letter::minus(i),
                    Letter::minus(j),
                ])
            })
            .collect();
        FinitePresentation::new(self.alphabet.clone(), relators).expect("letters in range")
    }

    /// Shortlex-least geodesic representative. Equal group elements get
    /// identical normal forms.
    pub fn normal_form(&self, word: &Word) -> Word {
        let mut buf: Vec<Letter> = Vec::with_capacity(word.len());
        for &letter in word.letters() {
            assert!(letter.gen < self.num_gens(), "letter outside alphabet");
            self.push_geodesic(&mut buf, letter);
        }
        Word::from_letters(self.lex_least(buf))
    }

    /// Appends a letter, cancelling when possible. The only candidate
    /// partner is the nearest letter of the same generator reachable
    /// through commuting letters; a cancellation can unblock pairs in the
    /// freed suffix, so the suffix is re-pushed.
    fn push_geodesic(&self, buf: &mut Vec<Letter>, x: Letter) {
        let mut j = buf.len();
        while j > 0 {
            let y = buf[j - 1];
            if y.gen == x.gen {
                if y.sign != x.sign {
                    buf.remove(j - 1);
                    let tail = buf.split_off(j - 1);
                    for t in tail {
                        self.push_geodesic(buf, t);
                    }
                    return;
                }
                break;
            }
            if !self.commutes(y.gen, x.gen) {
                break;
            }
            j -= 1;
        }
        buf.push(x);
    }

    /// Least representative of a geodesic's swap class: repeatedly extract
    /// the smallest letter whose predecessors all commute with it. Any
    /// geodesic spelling of the element gives the same answer.
    fn lex_least(&self, mut letters: Vec<Letter>) -> Vec<Letter> {
        let mut out = Vec::with_capacity(letters.len());
        while !letters.is_empty() {
            let mut best = 0;
            for i in 1..letters.len() {
                if letters[i] < letters[best] && self.movable_to_front(&letters, i) {
                    best = i;
                }
            }
            out.push(letters.remove(best));
        }
        out
    }

    pub fn is_trivial(&self, word: &Word) -> bool {
        self.normal_form(word).is_empty()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.normal_form(u) == self.normal_form(v)
    }

    /// A cyclically reduced representative of the conjugacy class: no
    /// single-letter conjugation shortens it further.
    pub fn cyclic_core(&self, word: &Word) -> Word {
        let mut core = self.normal_form(word);
        'shrink: loop {
            for (i, &x) in core.letters().iter().enumerate() {
                if !self.movable_to_front(core.letters(), i) {
                    continue;
                }
                let rotated = self.rotate_out(&core, i, x);
                if rotated.len() < core.len() {
                    core = rotated;
                    continue 'shrink;
                }
            }
            return core;
        }
    }

    fn movable_to_front(&self, letters: &[Letter], i: usize) -> bool {
        letters[..i].iter().all(|p| self.commutes(p.gen, letters[i].gen))
    }

    /// For a front-movable occurrence `i`: `w ~ x w'`, returns `nf(w' x)`.
    fn rotate_out(&self, word: &Word, i: usize, x: Letter) -> Word {
        let mut rest: Vec<Letter> = word.letters().to_vec();
        rest.remove(i);
        rest.push(x);
        self.normal_form(&Word::from_letters(rest))
    }

    /// All normal forms reachable from the cyclically reduced core by
    /// rotations; two cores are conjugate iff their closures meet.
    fn rotation_closure(&self, core: &Word) -> BTreeSet<Word> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(core.clone());
        queue.push_back(core.clone());
        while let Some(w) = queue.pop_front() {
            for (i, &x) in w.letters().iter().enumerate() {
                if !self.movable_to_front(w.letters(), i) {
                    continue;
                }
                let rotated = self.rotate_out(&w, i, x);
                debug_assert_eq!(rotated.len(), w.len(), "core was not cyclically reduced");
                if seen.insert(rotated.clone()) {
                    queue.push_back(rotated);
                }
            }
        }
        seen
    }

    pub fn conjugate(&self, u: &Word, v: &Word) -> bool {
        let mut cu = self.cyclic_core(u);
        let mut cv = self.cyclic_core(v);
        // cyclic_core stops when no single rotation shortens; rotations in
        // the closure preserve length from there on.
        if cu.len() != cv.len() {
            return false;
        }
        if cu.exponent_sums(self.num_gens()) != cv.exponent_sums(self.num_gens()) {
            return false;
        }
        loop {
            let closure = self.rotation_closure(&cu);
            if let Some(shorter) = closure.iter().find(|w| w.len() < cu.len()) {
                cu = self.cyclic_core(shorter);
                cv = self.cyclic_core(&cv);
                if cu.len() != cv.len() {
                    return false;
                }
                continue;
            }
            return closure.contains(&self.cyclic_core(&cv));
        }
    }
}

/// Obstruction explaining a definite conjugacy failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyObstruction {
    pub pair: usize,
    pub abelianization_differs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultipleConjugacy {
    /// A single conjugator works for every pair.
    Yes(Word),
    No(ConjugacyObstruction),
    /// No conjugator within the search radius; pairs are individually
    /// conjugate, so the answer stays open.
    Unknown { radius: usize },
}

/// Searches for one conjugator `g` with `g u_i g^-1 = v_i` for all pairs,
/// over all reduced words of length at most `radius` in shortlex order.
pub fn multiple_conjugacy(
    raag: &RaagPresentation,
    pairs: &[(Word, Word)],
    radius: usize,
) -> MultipleConjugacy {
    let n = raag.num_gens();
    for (i, (u, v)) in pairs.iter().enumerate() {
        if u.exponent_sums(n) != v.exponent_sums(n) {
            return MultipleConjugacy::No(ConjugacyObstruction {
                pair: i,
                abelianization_differs: true,
            });
        }
        if !raag.conjugate(u, v) {
            return MultipleConjugacy::No(ConjugacyObstruction {
                pair: i,
                abelianization_differs: false,
            });
        }
    }
    for g in enumerate_reduced_words(n, radius) {
        let works = pairs
            .iter()
            .all(|(u, v)| raag.is_trivial(&g.conjugate(u).concat(&v.inverse())));
        if works {
            return MultipleConjugacy::Yes(g);
        }
    }
    MultipleConjugacy::Unknown { radius }
}

/// Whether every induced cycle has length 3, checking subsets of at most
/// `max_subset` vertices (exhaustive when the graph has that few).
pub fn is_droms_coherent(graph: &SimplicialGraph, max_subset: usize) -> bool {
    graph.induced_long_cycle(max_subset).is_none()
}

/// Largest clique size: the dimension of the group (rank of a maximal
/// free abelian subgroup).
pub fn dimension(graph: &SimplicialGraph) -> usize {
    graph.max_clique()
}

/// A homomorphism to a free abelian group, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomToZn {
    images: Vec<Vec<i64>>,
    target_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomError {
    MixedDimensions,
    WrongImageCount { expected: usize, got: usize },
}

impl fmt::Display for HomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomError::MixedDimensions => write!(f, "generator images have mixed dimensions"),
            HomError::WrongImageCount { expected, got } => {
                write!(f, "expected {expected} generator images, got {got}")
            }
        }
    }
}

impl core::error::Error for HomError {}

impl HomToZn {
    pub fn new(raag: &RaagPresentation, images: Vec<Vec<i64>>) -> Result<HomToZn, HomError> {
        if images.len() != raag.num_gens() {
            return Err(HomError::WrongImageCount {
                expected: raag.num_gens(),
                got: images.len(),
            });
        }
        let target_dim = images.first().map_or(0, Vec::len);
        if images.iter().any(|v| v.len() != target_dim) {
            return Err(HomError::MixedDimensions);
        }
        Ok(HomToZn { images, target_dim })
    }

    /// The canonical abelianization: generator `i` maps to `e_i`.
    pub fn abelianization(raag: &RaagPresentation) -> HomToZn {
        let n = raag.num_gens();
        let images = (0..n)
            .map(|i| {
                let mut v = alloc::vec![0i64; n];
                v[i] = 1;
                v
            })
            .collect();
        HomToZn {
            images,
            target_dim: n,
        }
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn eval(&self, word: &Word) -> Vec<i64> {
        let mut out = alloc::vec![0i64; self.target_dim];
        for letter in word.letters() {
            let s = letter.sign.as_i64();
            for (acc, x) in out.iter_mut().zip(&self.images[letter.gen]) {
                *acc += s * x;
            }
        }
        out
    }

    pub fn in_kernel(&self, word: &Word) -> bool {
        self.eval(word).iter().all(|&x| x == 0)
    }
}

/// Error raised when a ball enumeration exceeds its element cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallOverflow {
    pub elements_seen: usize,
}

impl fmt::Display for BallOverflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ball enumeration exceeded the cap after {} elements",
            self.elements_seen
        )
    }
}

impl core::error::Error for BallOverflow {}

/// All distinct group elements of normal-form length at most `radius`, as
/// normal forms in shortlex order. `max_elements` caps the total count.
pub fn enumerate_ball(
    raag: &RaagPresentation,
    radius: usize,
    max_elements: usize,
) -> Result<Vec<Word>, BallOverflow> {
    let mut ball: BTreeSet<Word> = BTreeSet::new();
    ball.insert(Word::empty());
    let mut level: Vec<Word> = alloc::vec![Word::empty()];
    for target_len in 1..=radius {
        let mut next: BTreeSet<Word> = BTreeSet::new();
        for w in &level {
            for letter in letter_range(raag.num_gens()) {
                let mut candidate = w.clone();
                candidate.push(letter);
                let nf = raag.normal_form(&candidate);
                if nf.len() == target_len {
                    next.insert(nf);
                }
            }
        }
        for w in &next {
            ball.insert(w.clone());
            if ball.len() > max_elements {
                return Err(BallOverflow {
                    elements_seen: ball.len(),
                });
            }
        }
        level = next.into_iter().collect();
    }
    let mut out: Vec<Word> = ball.into_iter().collect();
    out.sort_by_key(|w| (w.len(), w.letters().to_vec()));
    Ok(out)
}

/// Standard (parabolic) subgroup membership: a word lies in the subgroup
/// generated by a vertex subset iff its normal form only uses those
/// generators.
pub fn in_parabolic(raag: &RaagPresentation, vertices: &BTreeSet<usize>, word: &Word) -> bool {
    raag.normal_form(word)
        .letters()
        .iter()
        .all(|l| vertices.contains(&l.gen))
}

/// Names the generators fixed by a vertex subset, for reporting.
pub fn parabolic_name(raag: &RaagPresentation, vertices: &BTreeSet<usize>) -> String {
    let names: Vec<&str> = vertices.iter().map(|&v| raag.alphabet().name(v)).collect();
    alloc::format!("<{}>", names.join(", "))
}

/// Component split of the defining graph, for free product structure.
pub fn graph_components(graph: &SimplicialGraph) -> Vec<Vec<usize>> {
    let n = graph.num_vertices();
    let mut comp = alloc::vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        comp[start] = count;
        while let Some(v) = queue.pop_front() {
            for (u, slot) in comp.iter_mut().enumerate() {
                if *slot == usize::MAX && graph.has_edge(u, v) {
                    *slot = count;
                    queue.push_back(u);
                }
            }
        }
        count += 1;
    }
    let mut out = alloc::vec![Vec::new(); count];
    for (v, &c) in comp.iter().enumerate() {
        out[c].push(v);
    }
    out
}

/// Support of the normal form, as generator indices.
pub fn support(raag: &RaagPresentation, word: &Word) -> BTreeSet<usize> {
    raag.normal_form(word)
        .letters()
        .iter()
        .map(|l| l.gen)
        .collect()
}

/// Counts elements by normal-form length, used in growth sanity checks.
pub fn sphere_sizes(raag: &RaagPresentation, radius: usize, cap: usize) -> Result<BTreeMap<usize, usize>, BallOverflow> {
    let ball = enumerate_ball(raag, radius, cap)?;
    let mut sizes = BTreeMap::new();
    for w in &ball {
        *sizes.entry(w.len()).or_insert(0) += 1;
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(raag: &RaagPresentation, s: &str) -> Word {
        raag.alphabet().parse_word(s).unwrap()
    }

    fn nf(raag: &RaagPresentation, s: &str) -> String {
        raag.alphabet()
            .display_word(&raag.normal_form(&w(raag, s)))
    }

    #[test]
    fn p4_normal_form_examples() {
        let p4 = RaagPresentation::p4();
        assert_eq!(nf(&p4, "b a"), "a b");
        assert_eq!(nf(&p4, "b a b^-1"), "a");
        assert_eq!(nf(&p4, "a d"), "a d");
        // a and d are not joined in the path graph, so they do not commute.
        assert_eq!(nf(&p4, "d a"), "d a");
        assert_eq!(nf(&p4, "c b"), "b c");
        assert_eq!(nf(&p4, "a c a^-1"), "a c a^-1");
        assert_eq!(nf(&p4, "a a^-1"), "1");
    }

    #[test]
    fn cross_block_cancellation_renormalizes() {
        // After a cancellation the freed suffix may bubble further left.
        let p4 = RaagPresentation::p4();
        assert_eq!(nf(&p4, "d b c b^-1"), "c d");
        assert_eq!(nf(&p4, "c b a b^-1"), "c a");
        // d blocks the b-pair here, so nothing cancels.
        assert_eq!(nf(&p4, "b d c b^-1"), "b c d b^-1");
    }

    #[test]
    fn word_problem_on_commutators() {
        let p4 = RaagPresentation::p4();
        assert!(p4.is_trivial(&w(&p4, "a b a^-1 b^-1")));
        assert!(!p4.is_trivial(&w(&p4, "a c a^-1 c^-1")));
        assert!(p4.equal(&w(&p4, "b a"), &w(&p4, "a b")));
    }

    #[test]
    fn normal_form_is_idempotent_on_small_words() {
        let p4 = RaagPresentation::p4();
        for word in enumerate_reduced_words(4, 3) {
            let once = p4.normal_form(&word);
            assert_eq!(p4.normal_form(&once), once);
        }
    }

    #[test]
    fn conjugacy_examples() {
        let p4 = RaagPresentation::p4();
        assert!(p4.conjugate(&w(&p4, "a c"), &w(&p4, "c a")));
        assert!(!p4.conjugate(&w(&p4, "a"), &w(&p4, "b")));
        assert!(p4.conjugate(&w(&p4, "b a b^-1 d"), &w(&p4, "a d")));
        assert!(!p4.conjugate(&w(&p4, "a b"), &w(&p4, "a d")));
        assert!(p4.conjugate(&Word::empty(), &w(&p4, "a a^-1")));
    }

    #[test]
    fn conjugacy_respects_cyclic_rotations() {
        let p4 = RaagPresentation::p4();
        let word = w(&p4, "a c d b");
        let letters = word.letters();
        for k in 0..letters.len() {
            let mut rotated: Vec<Letter> = letters[k..].to_vec();
            rotated.extend_from_slice(&letters[..k]);
            assert!(p4.conjugate(&word, &Word::from_letters(rotated)));
        }
    }

    #[test]
    fn multiple_conjugacy_yes_no_unknown() {
        let p4 = RaagPresentation::p4();
        let dad = w(&p4, "d a d^-1");
        let dcd = w(&p4, "d c d^-1");
        let out = multiple_conjugacy(
            &p4,
            &[(w(&p4, "a"), dad.clone()), (w(&p4, "c"), dcd.clone())],
            2,
        );
        match out {
            MultipleConjugacy::Yes(g) => {
                assert!(p4.is_trivial(&g.conjugate(&w(&p4, "a")).concat(&dad.inverse())));
                assert!(p4.is_trivial(&g.conjugate(&w(&p4, "c")).concat(&dcd.inverse())));
            }
            other => panic!("expected Yes, got {other:?}"),
        }

        let out = multiple_conjugacy(&p4, &[(w(&p4, "a"), w(&p4, "b"))], 2);
        assert_eq!(
            out,
            MultipleConjugacy::No(ConjugacyObstruction {
                pair: 0,
                abelianization_differs: true,
            })
        );

        // Individually conjugate pairs with no short common conjugator.
        let pairs = [
            (w(&p4, "a"), w(&p4, "c a c^-1")),
            (w(&p4, "d"), w(&p4, "a d a^-1")),
        ];
        match multiple_conjugacy(&p4, &pairs, 0) {
            MultipleConjugacy::Unknown { radius: 0 } => {}
            other => panic!("expected Unknown at radius 0, got {other:?}"),
        }
    }

    #[test]
    fn multiple_conjugacy_is_deterministic() {
        let p4 = RaagPresentation::p4();
        let pairs = [
            (w(&p4, "a"), w(&p4, "d a d^-1")),
            (w(&p4, "b"), w(&p4, "d b d^-1")),
        ];
        let first = multiple_conjugacy(&p4, &pairs, 3);
        let second = multiple_conjugacy(&p4, &pairs, 3);
        assert_eq!(first, second);
    }

    #[test]
    fn droms_and_dimension() {
        let p4 = RaagPresentation::p4();
        assert!(is_droms_coherent(p4.graph(), 8));
        assert_eq!(dimension(p4.graph()), 2);
        let square = SimplicialGraph::cycle(4);
        assert!(!is_droms_coherent(&square, 8));
        assert_eq!(dimension(&square), 2);
        let triangle = SimplicialGraph::complete(3);
        assert!(is_droms_coherent(&triangle, 8));
        assert_eq!(dimension(&triangle), 3);
        let pentagon = SimplicialGraph::cycle(5);
        assert!(!is_droms_coherent(&pentagon, 8));
    }

    #[test]
    fn hom_evaluation_and_kernel() {
        let p4 = RaagPresentation::p4();
        let phi = HomToZn::new(&p4, alloc::vec![alloc::vec![1], alloc::vec![1], alloc::vec![1], alloc::vec![1]]).unwrap();
        assert_eq!(phi.eval(&w(&p4, "a b^-1")), [0]);
        assert!(phi.in_kernel(&w(&p4, "a b^-1")));
        assert!(!phi.in_kernel(&w(&p4, "a b")));
        let bb = HomToZn::new(&p4, alloc::vec![alloc::vec![1], alloc::vec![1], alloc::vec![0], alloc::vec![1]]).unwrap();
        assert!(bb.in_kernel(&w(&p4, "c")));
        assert!(!bb.in_kernel(&w(&p4, "a")));
        assert!(HomToZn::new(&p4, alloc::vec![alloc::vec![1]; 3]).is_err());
    }

    #[test]
    fn ball_sizes_match_frozen_counts() {
        let p4 = RaagPresentation::p4();
        assert_eq!(enumerate_ball(&p4, 1, 10_000).unwrap().len(), 9);
        let z2 = RaagPresentation::free_abelian(&["x", "y"]);
        assert_eq!(enumerate_ball(&z2, 2, 10_000).unwrap().len(), 13);
        let trivial = RaagPresentation::free(&[]);
        assert_eq!(enumerate_ball(&trivial, 3, 10).unwrap().len(), 1);
    }

    #[test]
    fn ball_overflow_is_reported() {
        let p4 = RaagPresentation::p4();
        assert!(enumerate_ball(&p4, 3, 5).is_err());
    }

    #[test]
    fn ball_entries_are_distinct_elements() {
        let p4 = RaagPresentation::p4();
        let ball = enumerate_ball(&p4, 3, 100_000).unwrap();
        for w in &ball {
            assert_eq!(&p4.normal_form(w), w);
        }
        let set: BTreeSet<_> = ball.iter().collect();
        assert_eq!(set.len(), ball.len());
    }

    #[test]
    fn parabolic_membership_by_support() {
        let p4 = RaagPresentation::p4();
        let abc: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
        assert!(in_parabolic(&p4, &abc, &w(&p4, "a c b^-1 a")));
        assert!(!in_parabolic(&p4, &abc, &w(&p4, "a d")));
        // Trivial-support words always belong.
        assert!(in_parabolic(&p4, &abc, &w(&p4, "d d^-1")));
    }

    #[test]
    fn components_split_free_factors() {
        let g = SimplicialGraph::new(5, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            graph_components(&g),
            alloc::vec![alloc::vec![0, 1], alloc::vec![2, 3], alloc::vec![4]]
        );
    }
}

//! Graphs of groups with free abelian vertex groups and cyclic edge
//! groups: validation, Britton normal forms for the fundamental group,
//! elliptic/hyperbolic classification, WPD candidate elements, and the
//! kernel of the action on the associated tree.
//!
//! Elements live in the fundamental group based at vertex 0 and are stored
//! as loops: alternating vertex-group vectors and edge crossings, with
//! spanning-tree crossings kept explicit. Reduced forms absorb coset
//! representatives left to right, so equal elements get identical forms.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::{cyclic_membership, is_primitive, CosetReducer};
use crate::quotients::FinitePresentation;
use crate::words::{AlphabetError, GenAlphabet, Sign, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// One step of a loop: a vertex-group element or an edge crossing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Syllable {
    Vertex { vertex: usize, coeffs: Vec<BigInt> },
    Crossing { edge: usize, dir: Direction },
}

/// An element of the fundamental group, as a loop at the base vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct GogElement {
    syllables: Vec<Syllable>,
}

impl GogElement {
    pub fn identity() -> GogElement {
        GogElement::default()
    }

    pub fn from_syllables(syllables: Vec<Syllable>) -> GogElement {
        GogElement { syllables }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        count_crossings(&self.syllables)
    }

    /// Concatenation of loops; not reduced.
    pub fn concat(&self, other: &GogElement) -> GogElement {
        let mut syllables = self.syllables.clone();
        syllables.extend(other.syllables.iter().cloned());
        GogElement { syllables }
    }

    pub fn inverse(&self) -> GogElement {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| match s {
                Syllable::Vertex { vertex, coeffs } => Syllable::Vertex {
                    vertex: *vertex,
                    coeffs: coeffs.iter().map(|c| -c).collect(),
                },
                Syllable::Crossing { edge, dir } => Syllable::Crossing {
                    edge: *edge,
                    dir: dir.reverse(),
                },
            })
            .collect();
        GogElement { syllables }
    }

    pub fn conjugate(&self, other: &GogElement) -> GogElement {
        self.concat(other).concat(&self.inverse())
    }
}

fn count_crossings(syllables: &[Syllable]) -> usize {
    syllables
        .iter()
        .filter(|s| matches!(s, Syllable::Crossing { .. }))
        .count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryType {
    Elliptic,
    Hyperbolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelOfAction {
    Trivial,
    /// The kernel is infinite cyclic, generated by `base_vector` read in
    /// the base vertex group.
    Cyclic {
        base_vector: Vec<BigInt>,
        element: GogElement,
    },
    Unknown {
        reason: KernelUnknownReason,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelUnknownReason {
    /// A stable letter conjugates the candidate generator with unequal
    /// powers on the two sides, so the group leaves the supported class.
    NonUnimodularLoop { edge: usize, m: BigInt, n: BigInt },
    /// No edges at all: the kernel is the whole vertex group, which is not
    /// cyclic in rank two or more.
    WholeVertexGroup { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelativeWpd {
    /// No obstruction among vertex elements with entries bounded by the
    /// search radius.
    Verified { radius: u32 },
    /// A vertex element outside the kernel that, together with its
    /// conjugate by the tested element, fixes a common tree vertex.
    Counterexample { witness: GogElement },
    /// A candidate obstruction exists but kernel membership is undecided.
    Unknown,
}

/// Unimodularity report for a loop edge whose two attaching vectors are
/// parallel: the vectors are `m` and `n` times the common primitive ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopCheck {
    pub edge: usize,
    pub m: BigInt,
    pub n: BigInt,
    pub unimodular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GogError {
    EmptyGraph,
    ZeroRank { vertex: usize },
    EdgeEndpointOutOfRange { edge: usize },
    AttachDimension { edge: usize },
    ZeroAttach { edge: usize },
    NotSpanningTree,
    NameClash(AlphabetError),
    MalformedElement { reason: &'static str },
    LetterOutOfRange,
    NotHyperbolic,
    NoTreeAction,
    NoVertexElement { vertex: usize },
}

impl fmt::Display for GogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GogError::EmptyGraph => write!(f, "graph has no vertices"),
            GogError::ZeroRank { vertex } => write!(f, "vertex {vertex} has rank zero"),
            GogError::EdgeEndpointOutOfRange { edge } => {
                write!(f, "edge {edge} has an endpoint out of range")
            }
            GogError::AttachDimension { edge } => {
                write!(f, "edge {edge} attaching vector has the wrong dimension")
            }
            GogError::ZeroAttach { edge } => {
                write!(f, "edge {edge} has a zero attaching vector")
            }
            GogError::NotSpanningTree => write!(f, "tree edges do not form a spanning tree"),
            GogError::NameClash(e) => write!(f, "generator naming failed: {e}"),
            GogError::MalformedElement { reason } => write!(f, "malformed element: {reason}"),
            GogError::LetterOutOfRange => write!(f, "word letter outside the generator list"),
            GogError::NotHyperbolic => write!(f, "element is not hyperbolic"),
            GogError::NoTreeAction => write!(f, "graph has no edges, so the tree is a point"),
            GogError::NoVertexElement { vertex } => {
                write!(f, "vertex {vertex} has no element outside its edge lines")
            }
        }
    }
}

impl core::error::Error for GogError {}

#[derive(Clone, Debug)]
pub struct VertexSpec {
    pub name: String,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct EdgeSpec {
    pub tail: usize,
    pub head: usize,
    pub attach_tail: Vec<BigInt>,
    pub attach_head: Vec<BigInt>,
    pub tree: bool,
}

/// A validated graph of groups. The base vertex is always vertex 0.
#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    vertices: Vec<VertexSpec>,
    edges: Vec<EdgeSpec>,
    reducers: Vec<(CosetReducer, CosetReducer)>,
    /// Crossings leading from the base to each vertex inside the tree.
    tree_paths: Vec<Vec<(usize, Direction)>>,
    /// Non-tree edges in order; entry `j` is crossed by stable letter `j`.
    stable_edges: Vec<usize>,
    stable_names: Vec<String>,
    alphabet: GenAlphabet,
    /// Flattened (vertex, coordinate) pairs naming the vertex generators.
    vertex_gens: Vec<(usize, usize)>,
}

pub const BASE_VERTEX: usize = 0;

impl GraphOfGroups {
    pub fn new(vertices: Vec<VertexSpec>, edges: Vec<EdgeSpec>) -> Result<GraphOfGroups, GogError> {
        if vertices.is_empty() {
            return Err(GogError::EmptyGraph);
        }
        for (v, spec) in vertices.iter().enumerate() {
            if spec.rank == 0 {
                return Err(GogError::ZeroRank { vertex: v });
            }
        }
        let mut reducers = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(GogError::EdgeEndpointOutOfRange { edge: i });
            }
            if e.attach_tail.len() != vertices[e.tail].rank
                || e.attach_head.len() != vertices[e.head].rank
            {
                return Err(GogError::AttachDimension { edge: i });
            }
            if e.attach_tail.iter().all(Zero::is_zero) || e.attach_head.iter().all(Zero::is_zero) {
                return Err(GogError::ZeroAttach { edge: i });
            }
            let tail_red = CosetReducer::new(&e.attach_tail).expect("nonzero attach vector");
            let head_red = CosetReducer::new(&e.attach_head).expect("nonzero attach vector");
            reducers.push((tail_red, head_red));
        }

        // The flagged edges must form a spanning tree rooted at the base.
        let tree_count = edges.iter().filter(|e| e.tree).count();
        if tree_count != vertices.len() - 1 {
            return Err(GogError::NotSpanningTree);
        }
        let mut tree_paths: Vec<Option<Vec<(usize, Direction)>>> =
            alloc::vec![None; vertices.len()];
        tree_paths[BASE_VERTEX] = Some(Vec::new());
        let mut queue = VecDeque::from([BASE_VERTEX]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in edges.iter().enumerate() {
                if !e.tree {
                    continue;
                }
                let step = if e.tail == v && tree_paths[e.head].is_none() {
                    Some((e.head, Direction::Forward))
                } else if e.head == v && tree_paths[e.tail].is_none() {
                    Some((e.tail, Direction::Backward))
                } else {
                    None
                };
                if let Some((next, dir)) = step {
                    let mut path = tree_paths[v].clone().expect("visited");
                    path.push((i, dir));
                    tree_paths[next] = Some(path);
                    queue.push_back(next);
                }
            }
        }
        if tree_paths.iter().any(Option::is_none) {
            return Err(GogError::NotSpanningTree);
        }
        let tree_paths: Vec<_> = tree_paths.into_iter().map(Option::unwrap).collect();

        let stable_edges: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.tree)
            .map(|(i, _)| i)
            .collect();
        let stable_names: Vec<String> = if stable_edges.len() == 1 {
            alloc::vec![String::from("t")]
        } else {
            (1..=stable_edges.len())
                .map(|j| alloc::format!("t{j}"))
                .collect()
        };

        let mut vertex_gens = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for (v, spec) in vertices.iter().enumerate() {
            for k in 0..spec.rank {
                vertex_gens.push((v, k));
                if spec.rank == 1 {
                    names.push(spec.name.clone());
                } else {
                    names.push(alloc::format!("{}{}", spec.name, k + 1));
                }
            }
        }
        names.extend(stable_names.iter().cloned());
        let alphabet = GenAlphabet::new(names).map_err(GogError::NameClash)?;

        Ok(GraphOfGroups {
            vertices,
            edges,
            reducers,
            tree_paths,
            stable_edges,
            stable_names,
            alphabet,
            vertex_gens,
        })
    }

    // ----- builtin examples -----

    /// Rank-two vertices <a,b>, <b,c>, <c,d> glued along b and c. The
    /// fundamental group is the path group on four generators.
    pub fn p4_splitting() -> GraphOfGroups {
        let v = |name: &str| VertexSpec {
            name: String::from(name),
            rank: 2,
        };
        let big = |xs: [i64; 2]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        GraphOfGroups::new(
            alloc::vec![v("ab"), v("bc"), v("cd")],
            alloc::vec![
                EdgeSpec {
                    tail: 0,
                    head: 1,
                    attach_tail: big([0, 1]),
                    attach_head: big([1, 0]),
                    tree: true,
                },
                EdgeSpec {
                    tail: 1,
                    head: 2,
                    attach_tail: big([0, 1]),
                    attach_head: big([1, 0]),
                    tree: true,
                },
            ],
        )
        .expect("valid splitting data")
    }

    /// One rank-one vertex with a loop identifying x^m with x^n.
    pub fn bs_one_loop(m: i64, n: i64) -> Result<GraphOfGroups, GogError> {
        GraphOfGroups::new(
            alloc::vec![VertexSpec {
                name: String::from("x"),
                rank: 1,
            }],
            alloc::vec![EdgeSpec {
                tail: 0,
                head: 0,
                attach_tail: alloc::vec![BigInt::from(m)],
                attach_head: alloc::vec![BigInt::from(n)],
                tree: false,
            }],
        )
    }

    /// One rank-two vertex with a loop gluing independent lines (1,0) and
    /// (0,1): a basic tubular example with trivial kernel.
    pub fn tubular_loop() -> GraphOfGroups {
        GraphOfGroups::new(
            alloc::vec![VertexSpec {
                name: String::from("v"),
                rank: 2,
            }],
            alloc::vec![EdgeSpec {
                tail: 0,
                head: 0,
                attach_tail: alloc::vec![BigInt::one(), BigInt::zero()],
                attach_head: alloc::vec![BigInt::zero(), BigInt::one()],
                tree: false,
            }],
        )
        .expect("valid tubular data")
    }

    // ----- accessors -----

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &VertexSpec {
        &self.vertices[v]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> &EdgeSpec {
        &self.edges[e]
    }

    pub fn stable_edges(&self) -> &[usize] {
        &self.stable_edges
    }

    pub fn stable_names(&self) -> &[String] {
        &self.stable_names
    }

    /// Alphabet over all vertex generators (vertex order, then coordinate
    /// order) followed by the stable letters.
    pub fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    pub fn num_vertex_gens(&self) -> usize {
        self.vertex_gens.len()
    }

    fn vertex_gen_base(&self, v: usize) -> usize {
        self.vertices[..v].iter().map(|s| s.rank).sum()
    }

    /// `coeffs` read as a word in vertex `v`'s generators.
    fn vertex_word(&self, v: usize, coeffs: &[BigInt]) -> Word {
        use num_traits::ToPrimitive;
        let base = self.vertex_gen_base(v);
        let mut w = Word::empty();
        for (k, c) in coeffs.iter().enumerate() {
            let e = c.to_i64().expect("attaching coefficient fits in 64 bits");
            w = w.concat(&Word::power(base + k, e));
        }
        w
    }

    /// Presentation over `alphabet()`: commutators inside each vertex
    /// group, one identification per tree edge, and one conjugation
    /// relator per stable letter.
    pub fn presentation(&self) -> FinitePresentation {
        let mut relators = Vec::new();
        for (v, spec) in self.vertices.iter().enumerate() {
            let base = self.vertex_gen_base(v);
            for k in 0..spec.rank {
                for l in (k + 1)..spec.rank {
                    let a = Word::power(base + k, 1);
                    let b = Word::power(base + l, 1);
                    relators.push(a.concat(&b).concat(&a.inverse()).concat(&b.inverse()));
                }
            }
        }
        for (idx, e) in self.edges.iter().enumerate() {
            let tail_word = self.vertex_word(e.tail, &e.attach_tail);
            let head_word = self.vertex_word(e.head, &e.attach_head);
            if e.tree {
                relators.push(tail_word.concat(&head_word.inverse()));
            } else {
                let j = self
                    .stable_edges
                    .iter()
                    .position(|&se| se == idx)
                    .expect("non-tree edges carry stable letters");
                let t = self.num_vertex_gens() + j;
                relators.push(
                    Word::power(t, -1)
                        .concat(&tail_word)
                        .concat(&Word::power(t, 1))
                        .concat(&head_word.inverse()),
                );
            }
        }
        FinitePresentation::new(self.alphabet.clone(), relators).expect("letters in range")
    }

    fn departure_vertex(&self, edge: usize, dir: Direction) -> usize {
        match dir {
            Direction::Forward => self.edges[edge].tail,
            Direction::Backward => self.edges[edge].head,
        }
    }

    fn arrival_vertex(&self, edge: usize, dir: Direction) -> usize {
        self.departure_vertex(edge, dir.reverse())
    }

    fn departure_attach(&self, edge: usize, dir: Direction) -> &[BigInt] {
        match dir {
            Direction::Forward => &self.edges[edge].attach_tail,
            Direction::Backward => &self.edges[edge].attach_head,
        }
    }

    fn arrival_attach(&self, edge: usize, dir: Direction) -> &[BigInt] {
        self.departure_attach(edge, dir.reverse())
    }

    fn departure_reducer(&self, edge: usize, dir: Direction) -> &CosetReducer {
        match dir {
            Direction::Forward => &self.reducers[edge].0,
            Direction::Backward => &self.reducers[edge].1,
        }
    }

    // ----- element construction -----

    /// The element of vertex `v`'s group with the given coordinates, as a
    /// loop through the spanning tree.
    pub fn vertex_element(&self, v: usize, coeffs: Vec<BigInt>) -> Result<GogElement, GogError> {
        if v >= self.vertices.len() {
            return Err(GogError::MalformedElement {
                reason: "vertex out of range",
            });
        }
        if coeffs.len() != self.vertices[v].rank {
            return Err(GogError::MalformedElement {
                reason: "coefficient vector has the wrong dimension",
            });
        }
        let mut syllables: Vec<Syllable> = self.tree_paths[v]
            .iter()
            .map(|&(edge, dir)| Syllable::Crossing { edge, dir })
            .collect();
        syllables.push(Syllable::Vertex { vertex: v, coeffs });
        syllables.extend(
            self.tree_paths[v]
                .iter()
                .rev()
                .map(|&(edge, dir)| Syllable::Crossing {
                    edge,
                    dir: dir.reverse(),
                }),
        );
        Ok(GogElement { syllables })
    }

    /// Stable letter `j`: the loop crossing the `j`-th non-tree edge
    /// forward, completed through the spanning tree.
    pub fn stable_letter(&self, j: usize) -> Result<GogElement, GogError> {
        let &edge = self.stable_edges.get(j).ok_or(GogError::LetterOutOfRange)?;
        let mut syllables: Vec<Syllable> = self.tree_paths[self.edges[edge].tail]
            .iter()
            .map(|&(e, d)| Syllable::Crossing { edge: e, dir: d })
            .collect();
        syllables.push(Syllable::Crossing {
            edge,
            dir: Direction::Forward,
        });
        syllables.extend(
            self.tree_paths[self.edges[edge].head]
                .iter()
                .rev()
                .map(|&(e, d)| Syllable::Crossing {
                    edge: e,
                    dir: d.reverse(),
                }),
        );
        Ok(GogElement { syllables })
    }

    /// The loop for one generator of the alphabet.
    pub fn generator_element(&self, index: usize) -> Result<GogElement, GogError> {
        if index < self.vertex_gens.len() {
            let (v, k) = self.vertex_gens[index];
            let mut coeffs = alloc::vec![BigInt::zero(); self.vertices[v].rank];
            coeffs[k] = BigInt::one();
            self.vertex_element(v, coeffs)
        } else {
            self.stable_letter(index - self.vertex_gens.len())
        }
    }

    /// Reads a word over `alphabet()` as a reduced element.
    pub fn word_to_element(&self, word: &Word) -> Result<GogElement, GogError> {
        let mut acc = GogElement::identity();
        for letter in word.letters() {
            if letter.gen >= self.alphabet.len() {
                return Err(GogError::LetterOutOfRange);
            }
            let gen = self.generator_element(letter.gen)?;
            let factor = match letter.sign {
                Sign::Plus => gen,
                Sign::Minus => gen.inverse(),
            };
            acc = acc.concat(&factor);
        }
        self.britton_reduce(&acc)
    }

    fn validate_element(&self, g: &GogElement) -> Result<(), GogError> {
        let mut pos = BASE_VERTEX;
        for syl in &g.syllables {
            match syl {
                Syllable::Vertex { vertex, coeffs } => {
                    if *vertex >= self.vertices.len() {
                        return Err(GogError::MalformedElement {
                            reason: "vertex out of range",
                        });
                    }
                    if *vertex != pos {
                        return Err(GogError::MalformedElement {
                            reason: "vertex syllable off the current position",
                        });
                    }
                    if coeffs.len() != self.vertices[*vertex].rank {
                        return Err(GogError::MalformedElement {
                            reason: "coefficient vector has the wrong dimension",
                        });
                    }
                }
                Syllable::Crossing { edge, dir } => {
                    if *edge >= self.edges.len() {
                        return Err(GogError::MalformedElement {
                            reason: "edge out of range",
                        });
                    }
                    if self.departure_vertex(*edge, *dir) != pos {
                        return Err(GogError::MalformedElement {
                            reason: "crossing does not start at the current position",
                        });
                    }
                    pos = self.arrival_vertex(*edge, *dir);
                }
            }
        }
        if pos != BASE_VERTEX {
            return Err(GogError::MalformedElement {
                reason: "element is not a loop at the base vertex",
            });
        }
        Ok(())
    }

    // ----- reduction -----

    fn stack_push_vertex(&self, stack: &mut Vec<Syllable>, vertex: usize, coeffs: Vec<BigInt>) {
        if coeffs.iter().all(Zero::is_zero) {
            return;
        }
        if let Some(Syllable::Vertex {
            vertex: top_v,
            coeffs: top_c,
        }) = stack.last_mut()
        {
            debug_assert_eq!(*top_v, vertex, "adjacent vertex syllables must agree");
            for (a, b) in top_c.iter_mut().zip(&coeffs) {
                *a += b;
            }
            if top_c.iter().all(Zero::is_zero) {
                stack.pop();
            }
            return;
        }
        stack.push(Syllable::Vertex { vertex, coeffs });
    }

    fn stack_push_crossing(&self, stack: &mut Vec<Syllable>, edge: usize, dir: Direction) {
        if let Some(Syllable::Crossing {
            edge: top_e,
            dir: top_d,
        }) = stack.last()
        {
            if *top_e == edge && *top_d == dir.reverse() {
                stack.pop();
                return;
            }
        }
        if stack.len() >= 2 {
            let pinch = match (&stack[stack.len() - 2], &stack[stack.len() - 1]) {
                (
                    Syllable::Crossing {
                        edge: e0,
                        dir: d0,
                    },
                    Syllable::Vertex { coeffs, .. },
                ) if *e0 == edge && *d0 == dir.reverse() => {
                    let line = self.arrival_attach(edge, *d0);
                    cyclic_membership(line, coeffs)
                        .expect("attach vectors are nonzero")
                        .map(|s| (*d0, s))
                }
                _ => None,
            };
            if let Some((d0, s)) = pinch {
                stack.pop();
                stack.pop();
                let dep_vertex = self.departure_vertex(edge, d0);
                let dep = scale(&s, self.departure_attach(edge, d0));
                self.stack_push_vertex(stack, dep_vertex, dep);
                return;
            }
        }
        stack.push(Syllable::Crossing { edge, dir });
    }

    /// Removes every pinch; complete in one left-to-right pass.
    fn pinch_pass(&self, input: Vec<Syllable>) -> Vec<Syllable> {
        let mut stack: Vec<Syllable> = Vec::with_capacity(input.len());
        for syl in input {
            match syl {
                Syllable::Vertex { vertex, coeffs } => {
                    self.stack_push_vertex(&mut stack, vertex, coeffs)
                }
                Syllable::Crossing { edge, dir } => {
                    self.stack_push_crossing(&mut stack, edge, dir)
                }
            }
        }
        stack
    }

    /// Rewrites vertex blocks to canonical coset representatives, pushing
    /// the absorbed part through the crossing to its right. The element is
    /// unchanged; forms become unique.
    fn canonical_pass(&self, input: Vec<Syllable>, start: usize) -> Vec<Syllable> {
        let mut out: Vec<Syllable> = Vec::with_capacity(input.len());
        let mut pos = start;
        let mut pending = alloc::vec![BigInt::zero(); self.vertices[pos].rank];
        for syl in input {
            match syl {
                Syllable::Vertex { vertex, coeffs } => {
                    debug_assert_eq!(vertex, pos);
                    for (a, b) in pending.iter_mut().zip(&coeffs) {
                        *a += b;
                    }
                }
                Syllable::Crossing { edge, dir } => {
                    let reducer = self.departure_reducer(edge, dir);
                    let rep = reducer.reduce(&pending).expect("dimensions validated");
                    let s = reducer.offset(&pending).expect("dimensions validated");
                    if !rep.iter().all(Zero::is_zero) {
                        out.push(Syllable::Vertex {
                            vertex: pos,
                            coeffs: rep,
                        });
                    }
                    out.push(Syllable::Crossing { edge, dir });
                    pos = self.arrival_vertex(edge, dir);
                    pending = scale(&s, self.arrival_attach(edge, dir));
                }
            }
        }
        if !pending.iter().all(Zero::is_zero) {
            out.push(Syllable::Vertex {
                vertex: pos,
                coeffs: pending,
            });
        }
        out
    }

    /// Britton-reduced canonical form: pinch-free with coset
    /// representatives absorbed left to right. Equal elements of the
    /// fundamental group get equal forms.
    pub fn britton_reduce(&self, g: &GogElement) -> Result<GogElement, GogError> {
        self.validate_element(g)?;
        let pinched = self.pinch_pass(g.syllables.clone());
        let canonical = self.canonical_pass(pinched, BASE_VERTEX);
        debug_assert_eq!(
            count_crossings(&self.pinch_pass(canonical.clone())),
            count_crossings(&canonical),
            "canonicalization must not expose pinches"
        );
        Ok(GogElement {
            syllables: canonical,
        })
    }

    pub fn word_problem(&self, g: &GogElement) -> Result<bool, GogError> {
        Ok(self.britton_reduce(g)?.is_identity())
    }

    pub fn equal(&self, a: &GogElement, b: &GogElement) -> Result<bool, GogError> {
        Ok(self.britton_reduce(a)? == self.britton_reduce(b)?)
    }

    // ----- isometry classification -----

    /// Crossing count of a cyclically reduced conjugate: rotations of the
    /// reduced loop are re-reduced until none shortens.
    fn cyclic_crossing_count(&self, reduced: &[Syllable]) -> usize {
        let mut current = reduced.to_vec();
        'outer: loop {
            let crossings = count_crossings(&current);
            if crossings == 0 {
                return 0;
            }
            for k in 1..current.len() {
                let mut rotated: Vec<Syllable> = current[k..].to_vec();
                rotated.extend_from_slice(&current[..k]);
                let pinched = self.pinch_pass(rotated);
                if count_crossings(&pinched) < crossings {
                    current = pinched;
                    continue 'outer;
                }
            }
            return crossings;
        }
    }

    pub fn classify_isometry(&self, g: &GogElement) -> Result<IsometryType, GogError> {
        let reduced = self.britton_reduce(g)?;
        if self.cyclic_crossing_count(&reduced.syllables) == 0 {
            Ok(IsometryType::Elliptic)
        } else {
            Ok(IsometryType::Hyperbolic)
        }
    }

    // ----- kernel of the action -----

    /// Transports a line from a vertex to the base along the tree,
    /// intersecting with each crossed edge group. `None` means trivial.
    fn pull_line_to_base(&self, vertex: usize, line: Vec<BigInt>) -> Option<Vec<BigInt>> {
        let mut current = line;
        for &(edge, dir) in self.tree_paths[vertex].iter().rev() {
            // The stored step goes base-ward vertex -> here; reverse it.
            let toward_base = dir.reverse();
            let dep = self.departure_attach(edge, toward_base);
            let (a, b) = parallel_scalars(&current, dep)?;
            // Smallest positive s with s * dep inside <current>.
            let g = a.abs().gcd(&b.abs());
            let s = a.abs() / g;
            current = scale(&s, self.arrival_attach(edge, toward_base));
        }
        Some(current)
    }

    /// Pushes a concrete vector from the base out to a vertex; fails if it
    /// leaves an edge image along the way.
    fn push_vector_to_vertex(&self, vertex: usize, vec: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut current = vec.to_vec();
        for &(edge, dir) in &self.tree_paths[vertex] {
            let dep = self.departure_attach(edge, dir);
            let s = cyclic_membership(dep, &current).expect("attach vectors are nonzero")?;
            current = scale(&s, self.arrival_attach(edge, dir));
        }
        Some(current)
    }

    pub fn kernel_of_action(&self) -> KernelOfAction {
        if self.edges.is_empty() {
            let rank = self.vertices[BASE_VERTEX].rank;
            if rank == 1 {
                let v = alloc::vec![BigInt::one()];
                let element = self
                    .vertex_element(BASE_VERTEX, v.clone())
                    .expect("base element");
                return KernelOfAction::Cyclic {
                    base_vector: v,
                    element,
                };
            }
            return KernelOfAction::Unknown {
                reason: KernelUnknownReason::WholeVertexGroup { rank },
            };
        }

        // Intersect every edge image, pulled back to the base vertex.
        let mut core: Option<Vec<BigInt>> = None;
        for (i, e) in self.edges.iter().enumerate() {
            for (v, attach) in [(e.tail, &e.attach_tail), (e.head, &e.attach_head)] {
                let Some(at_base) = self.pull_line_to_base(v, attach.clone()) else {
                    return KernelOfAction::Trivial;
                };
                core = match core {
                    None => Some(at_base),
                    Some(prev) => match line_intersection(&prev, &at_base) {
                        Some(meet) => Some(meet),
                        None => return KernelOfAction::Trivial,
                    },
                };
            }
            let _ = i;
        }
        let c = core.expect("at least one edge");

        // Each stable letter conjugates powers of c along its loop; the
        // powers must match in absolute value for a cyclic kernel.
        let mut k = BigInt::one();
        for &edge in &self.stable_edges {
            let e = &self.edges[edge];
            let at_tail = self
                .push_vector_to_vertex(e.tail, &c)
                .expect("kernel line survives tree transport");
            let at_head = self
                .push_vector_to_vertex(e.head, &c)
                .expect("kernel line survives tree transport");
            let mu_t = cyclic_membership(&e.attach_tail, &at_tail)
                .expect("attach vectors are nonzero")
                .expect("kernel line lies in the edge image");
            let mu_h = cyclic_membership(&e.attach_head, &at_head)
                .expect("attach vectors are nonzero")
                .expect("kernel line lies in the edge image");
            let g = mu_t.abs().gcd(&mu_h.abs());
            let m = mu_h.abs() / &g;
            let n = mu_t.abs() / &g;
            if m != n {
                return KernelOfAction::Unknown {
                    reason: KernelUnknownReason::NonUnimodularLoop { edge, m, n },
                };
            }
            k = k.lcm(&m);
        }

        let base_vector = scale(&k, &c);
        let element = self
            .vertex_element(BASE_VERTEX, base_vector.clone())
            .expect("base element");
        KernelOfAction::Cyclic {
            base_vector,
            element,
        }
    }

    /// Whether a vertex element lies in the cyclic kernel.
    fn in_cyclic_kernel(&self, kernel_at_base: &[BigInt], vertex: usize, coeffs: &[BigInt]) -> bool {
        match self.push_vector_to_vertex(vertex, kernel_at_base) {
            Some(kv) => cyclic_membership(&kv, coeffs)
                .expect("kernel vector is nonzero")
                .is_some(),
            None => false,
        }
    }

    // ----- unimodularity and isolation reports -----

    pub fn unimodular_loop_check(&self) -> Vec<LoopCheck> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail != e.head {
                continue;
            }
            if let Some((m, n)) = parallel_scalars(&e.attach_tail, &e.attach_head) {
                let unimodular = m.abs() == n.abs();
                out.push(LoopCheck {
                    edge: i,
                    m,
                    n,
                    unimodular,
                });
            }
        }
        out
    }

    pub fn has_isolated_edge_groups(&self) -> bool {
        self.edges
            .iter()
            .all(|e| is_primitive(&e.attach_tail) && is_primitive(&e.attach_head))
    }

    // ----- WPD candidate -----

    /// Smallest vertex vector outside every incident edge line, in the
    /// shell-then-coordinate order used throughout.
    fn vertex_element_outside_lines(&self, v: usize) -> Option<Vec<BigInt>> {
        let rank = self.vertices[v].rank;
        let lines: Vec<&[BigInt]> = self
            .edges
            .iter()
            .flat_map(|e| {
                let mut incident = Vec::new();
                if e.tail == v {
                    incident.push(e.attach_tail.as_slice());
                }
                if e.head == v {
                    incident.push(e.attach_head.as_slice());
                }
                incident
            })
            .collect();
        let max_shell = (lines.len() as i64 + 1).max(2);
        for z in enumerate_vectors(rank, max_shell) {
            let outside = lines.iter().all(|line| {
                cyclic_membership(line, &z)
                    .expect("attach vectors are nonzero")
                    .is_none()
            });
            if outside {
                return Some(z);
            }
        }
        None
    }

    /// Product of one vertex element per vertex (and its conjugates by
    /// every stable letter, if any), chosen outside all incident edge
    /// lines. The result is reduced; it is the standard hyperbolic
    /// candidate for this class of groups.
    pub fn wpd_candidate(&self) -> Result<GogElement, GogError> {
        if self.edges.is_empty() {
            return Err(GogError::NoTreeAction);
        }
        let mut factors: Vec<GogElement> = Vec::new();
        for v in 0..self.vertices.len() {
            let a = self
                .vertex_element_outside_lines(v)
                .ok_or(GogError::NoVertexElement { vertex: v })?;
            let av = self.vertex_element(v, a)?;
            if self.stable_edges.is_empty() {
                factors.push(av);
            } else {
                for j in 0..self.stable_edges.len() {
                    let t = self.stable_letter(j)?;
                    factors.push(av.clone());
                    factors.push(t.inverse().concat(&av).concat(&t));
                }
            }
        }
        let mut g = GogElement::identity();
        for f in factors {
            g = g.concat(&f);
        }
        self.britton_reduce(&g)
    }

    /// Searches vertex elements `h` with entries bounded by `radius` for a
    /// violation: `h` outside the kernel such that `h` and its conjugate
    /// by `g` have a common fixed tree vertex (their product is elliptic).
    pub fn check_relative_wpd(&self, g: &GogElement, radius: u32) -> Result<RelativeWpd, GogError> {
        let g = self.britton_reduce(g)?;
        if self.classify_isometry(&g)? != IsometryType::Hyperbolic {
            return Err(GogError::NotHyperbolic);
        }
        let kernel = self.kernel_of_action();
        let ginv = g.inverse();
        for v in 0..self.vertices.len() {
            let rank = self.vertices[v].rank;
            for z in enumerate_vectors(rank, radius as i64) {
                let in_kernel = match &kernel {
                    KernelOfAction::Trivial => false,
                    KernelOfAction::Cyclic { base_vector, .. } => {
                        self.in_cyclic_kernel(base_vector, v, &z)
                    }
                    KernelOfAction::Unknown { .. } => false,
                };
                if in_kernel {
                    continue;
                }
                let h = self.vertex_element(v, z)?;
                let conj = self.britton_reduce(&ginv.concat(&h).concat(&g))?;
                if self.cyclic_crossing_count(&conj.syllables) != 0 {
                    continue;
                }
                let product = self.britton_reduce(&h.concat(&conj))?;
                if self.cyclic_crossing_count(&product.syllables) != 0 {
                    continue;
                }
                if matches!(kernel, KernelOfAction::Unknown { .. }) {
                    return Ok(RelativeWpd::Unknown);
                }
                return Ok(RelativeWpd::Counterexample { witness: h });
            }
        }
        Ok(RelativeWpd::Verified { radius })
    }

    /// Human-readable rendering of an element's syllables.
    pub fn display_element(&self, g: &GogElement) -> String {
        if g.syllables.is_empty() {
            return String::from("1");
        }
        let parts: Vec<String> = g
            .syllables
            .iter()
            .map(|syl| match syl {
                Syllable::Vertex { vertex, coeffs } => {
                    let cs: Vec<String> =
                        coeffs.iter().map(|c| alloc::format!("{c}")).collect();
                    alloc::format!("{}({})", self.vertices[*vertex].name, cs.join(","))
                }
                Syllable::Crossing { edge, dir } => {
                    let name = match self.stable_edges.iter().position(|&e| e == *edge) {
                        Some(j) => self.stable_names[j].clone(),
                        None => alloc::format!("e{edge}"),
                    };
                    match dir {
                        Direction::Forward => alloc::format!("{name}+"),
                        Direction::Backward => alloc::format!("{name}-"),
                    }
                }
            })
            .collect();
        parts.join(" ")
    }
}

fn scale(s: &BigInt, v: &[BigInt]) -> Vec<BigInt> {
    v.iter().map(|x| s * x).collect()
}

/// Writes two nonzero vectors as `a*p` and `b*p` over a common primitive
/// direction, if they are parallel.
fn parallel_scalars(w: &[BigInt], u: &[BigInt]) -> Option<(BigInt, BigInt)> {
    debug_assert_eq!(w.len(), u.len());
    let content = w
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x.abs()));
    if content.is_zero() {
        return None;
    }
    let lead = w.iter().find(|x| !x.is_zero()).expect("nonzero vector");
    let sign_fix = if lead.is_negative() {
        -content.clone()
    } else {
        content.clone()
    };
    let p: Vec<BigInt> = w.iter().map(|x| x / &sign_fix).collect();
    let a = sign_fix;
    // u must be an integer multiple of p.
    let i0 = p.iter().position(|x| !x.is_zero()).expect("primitive");
    let (b, rem) = u[i0].div_rem(&p[i0]);
    if !rem.is_zero() || b.is_zero() {
        return None;
    }
    for (ui, pi) in u.iter().zip(&p) {
        if *ui != &b * pi {
            return None;
        }
    }
    Some((a, b))
}

/// Generator of the intersection of two lines in the same lattice.
fn line_intersection(w: &[BigInt], u: &[BigInt]) -> Option<Vec<BigInt>> {
    let (a, b) = parallel_scalars(w, u)?;
    let l = a.abs().lcm(&b.abs());
    let p: Vec<BigInt> = w.iter().map(|x| x / &a).collect();
    Some(scale(&l, &p))
}

/// Nonzero integer vectors ordered by max-norm shell, then coordinatewise
/// by the value order 0 < 1 < -1 < 2 < -2 < ...
fn enumerate_vectors(rank: usize, max_shell: i64) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    for shell in 1..=max_shell {
        let values: Vec<i64> = core::iter::once(0)
            .chain((1..=shell).flat_map(|m| [m, -m]))
            .collect();
        let mut stack: Vec<Vec<i64>> = alloc::vec![Vec::new()];
        let mut shell_vecs = Vec::new();
        while let Some(prefix) = stack.pop() {
            if prefix.len() == rank {
                if prefix.iter().any(|&x| x.abs() == shell) {
                    shell_vecs.push(prefix);
                }
                continue;
            }
            // Depth-first in reverse so values pop in order.
            for &val in values.iter().rev() {
                let mut next = prefix.clone();
                next.push(val);
                stack.push(next);
            }
        }
        out.extend(
            shell_vecs
                .into_iter()
                .map(|v| v.into_iter().map(BigInt::from).collect()),
        );
    }
    out
}

//! Finite presentations and their finite quotients: coset enumeration,
//! subgroup presentations, and homomorphisms into symmetric groups.
//!
//! The coset enumerator is HLT style (relator scans fill gaps by defining
//! new cosets, no lookahead) with eager coincidence processing. Given the
//! same presentation, subgroup generators, and coset cap it always defines
//! and merges in the same order, so overflow counts are reproducible.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{abelianization_invariants, AbelianInvariants, IntMatrix};
use crate::words::{GenAlphabet, Letter, Sign, Word};

/// Generators plus freely reduced relator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresentation {
    alphabet: GenAlphabet,
    relators: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationError {
    LetterOutOfRange { relator: usize, gen: usize },
}

impl fmt::Display for PresentationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresentationError::LetterOutOfRange { relator, gen } => {
                write!(f, "relator {relator} uses generator index {gen} outside the alphabet")
            }
        }
    }
}

impl core::error::Error for PresentationError {}

impl FinitePresentation {
    pub fn new(
        alphabet: GenAlphabet,
        relators: Vec<Word>,
    ) -> Result<FinitePresentation, PresentationError> {
        for (i, r) in relators.iter().enumerate() {
            if let Some(letter) = r.letters().iter().find(|l| l.gen >= alphabet.len()) {
                return Err(PresentationError::LetterOutOfRange {
                    relator: i,
                    gen: letter.gen,
                });
            }
        }
        let relators = relators.iter().map(Word::freely_reduced).collect();
        Ok(FinitePresentation { alphabet, relators })
    }

    pub fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    pub fn num_gens(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Exponent-sum matrix, one row per relator, one column per generator.
    pub fn relation_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| r.exponent_sums(self.num_gens()))
            .collect();
        if rows.is_empty() {
            IntMatrix::zero(0, self.num_gens())
        } else {
            IntMatrix::from_rows(&rows)
        }
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        abelianization_invariants(&self.relation_matrix())
    }

    /// Adds extra relators (for example, killing a normal subgroup's
    /// generators) and returns the quotient presentation.
    pub fn with_relators(&self, extra: &[Word]) -> FinitePresentation {
        let mut relators = self.relators.clone();
        relators.extend(extra.iter().map(Word::freely_reduced));
        FinitePresentation {
            alphabet: self.alphabet.clone(),
            relators,
        }
    }
}

/// Column index for a signed generator: `2 * gen` for positive,
/// `2 * gen + 1` for inverse letters.
fn col_of(letter: Letter) -> usize {
    2 * letter.gen
        + match letter.sign {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
}

fn inv_col(col: usize) -> usize {
    col ^ 1
}

/// A complete coset table: every coset has an image under every signed
/// generator. Coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    num_gens: usize,
    rows: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    pub fn action(&self, coset: usize, letter: Letter) -> usize {
        self.rows[coset][col_of(letter)]
    }

    pub fn trace(&self, start: usize, word: &Word) -> usize {
        word.letters()
            .iter()
            .fold(start, |c, &l| self.action(c, l))
    }

    /// Entry in raw column layout (`2 * gen + sign`); used by serializers.
    pub fn entry(&self, coset: usize, col: usize) -> usize {
        self.rows[coset][col]
    }

    /// Rebuilds a table from serialized rows. Shape and range are checked
    /// here; deeper consistency is the caller's job via `validate`.
    pub fn from_entries(num_gens: usize, rows: Vec<Vec<usize>>) -> Option<CosetTable> {
        let n = rows.len();
        if n == 0
            || rows
                .iter()
                .any(|r| r.len() != 2 * num_gens || r.iter().any(|&e| e >= n))
        {
            return None;
        }
        Some(CosetTable { num_gens, rows })
    }

    /// Every relator must act trivially at every coset and every subgroup
    /// generator must fix coset 0; both columns of each generator must be
    /// mutually inverse bijections.
    pub fn validate(&self, pres: &FinitePresentation, subgroup_gens: &[Word]) -> bool {
        let n = self.index();
        for gen in 0..self.num_gens {
            let mut seen = alloc::vec![false; n];
            for c in 0..n {
                let img = self.rows[c][2 * gen];
                if img >= n || seen[img] || self.rows[img][2 * gen + 1] != c {
                    return false;
                }
                seen[img] = true;
            }
        }
        for c in 0..n {
            if pres.relators().iter().any(|r| self.trace(c, r) != c) {
                return false;
            }
        }
        subgroup_gens.iter().all(|w| self.trace(0, w) == 0)
    }
}

/// Outcome of a coset enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetEnumeration {
    Closed(CosetTable),
    /// The cap was hit after defining this many cosets in total.
    Overflow { defined: usize },
}

impl CosetEnumeration {
    pub fn index(&self) -> Option<usize> {
        match self {
            CosetEnumeration::Closed(t) => Some(t.index()),
            CosetEnumeration::Overflow { .. } => None,
        }
    }
}

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<Option<u32>>>,
    parent: Vec<u32>,
    pending: VecDeque<(u32, u32)>,
    defined: usize,
    merges: usize,
    max_cosets: usize,
}

struct TableOverflow;

impl Enumerator {
    fn new(num_gens: usize, max_cosets: usize) -> Enumerator {
        Enumerator {
            ncols: 2 * num_gens,
            table: alloc::vec![alloc::vec![None; 2 * num_gens]],
            parent: alloc::vec![0],
            pending: VecDeque::new(),
            defined: 1,
            merges: 0,
            max_cosets,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn alive(&mut self, x: u32) -> bool {
        self.find(x) == x
    }

    fn define(&mut self, at: u32, col: usize) -> Result<u32, TableOverflow> {
        if self.defined >= self.max_cosets {
            return Err(TableOverflow);
        }
        let new = self.table.len() as u32;
        self.table.push(alloc::vec![None; self.ncols]);
        self.parent.push(new);
        self.defined += 1;
        self.table[at as usize][col] = Some(new);
        self.table[new as usize][inv_col(col)] = Some(at);
        Ok(new)
    }

    /// Record `at * col = to`, queuing a coincidence on conflict, then
    /// drain the coincidence queue.
    fn join(&mut self, at: u32, col: usize, to: u32) {
        self.set_edge(at, col, to);
        self.drain_pending();
    }

    fn set_edge(&mut self, at: u32, col: usize, to: u32) {
        let at = self.find(at);
        let to = self.find(to);
        match self.table[at as usize][col] {
            None => {
                self.table[at as usize][col] = Some(to);
                match self.table[to as usize][inv_col(col)] {
                    None => self.table[to as usize][inv_col(col)] = Some(at),
                    Some(z) => {
                        if self.find(z) != at {
                            self.pending.push_back((z, at));
                        }
                        self.table[to as usize][inv_col(col)] = Some(at);
                    }
                }
            }
            Some(y) => {
                if self.find(y) != to {
                    self.pending.push_back((y, to));
                }
            }
        }
    }

    fn drain_pending(&mut self) {
        while let Some((a, b)) = self.pending.pop_front() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let survivor = a.min(b);
            let loser = a.max(b);
            self.parent[loser as usize] = survivor;
            self.merges += 1;
            let row = core::mem::replace(
                &mut self.table[loser as usize],
                alloc::vec![None; self.ncols],
            );
            for (col, entry) in row.into_iter().enumerate() {
                if let Some(x) = entry {
                    self.set_edge(survivor, col, x);
                }
            }
        }
    }

    /// One relator scan at `start`, defining cosets to fill any gap.
    fn scan(&mut self, start: u32, word: &Word) -> Result<(), TableOverflow> {
        let letters = word.letters();
        let n = letters.len();
        if n == 0 {
            return Ok(());
        }
        loop {
            let start = self.find(start);
            let mut f = start;
            let mut fi = 0;
            while fi < n {
                match self.table[f as usize][col_of(letters[fi])] {
                    Some(next) => {
                        f = self.find(next);
                        fi += 1;
                    }
                    None => break,
                }
            }
            if fi == n {
                if f != start {
                    self.pending.push_back((f, start));
                    self.drain_pending();
                }
                return Ok(());
            }
            let mut b = start;
            let mut bi = n;
            while bi > fi {
                match self.table[b as usize][inv_col(col_of(letters[bi - 1]))] {
                    Some(prev) => {
                        b = self.find(prev);
                        bi -= 1;
                    }
                    None => break,
                }
            }
            if bi == fi {
                if f != b {
                    self.pending.push_back((f, b));
                    self.drain_pending();
                }
                return Ok(());
            }
            if bi == fi + 1 {
                self.join(f, col_of(letters[fi]), b);
                return Ok(());
            }
            self.define(f, col_of(letters[fi]))?;
        }
    }

    fn compact(&mut self) -> CosetTable {
        let mut remap = alloc::vec![usize::MAX; self.table.len()];
        let mut count = 0;
        for i in 0..self.table.len() as u32 {
            if self.alive(i) {
                remap[i as usize] = count;
                count += 1;
            }
        }
        let mut rows = Vec::with_capacity(count);
        for i in 0..self.table.len() as u32 {
            if !self.alive(i) {
                continue;
            }
            let row = self.table[i as usize]
                .clone()
                .into_iter()
                .map(|e| remap[self.find(e.expect("closed table")) as usize])
                .collect();
            rows.push(row);
        }
        CosetTable {
            num_gens: self.ncols / 2,
            rows,
        }
    }
}

/// Enumerates cosets of the subgroup generated by `subgroup_gens` in the
/// group presented by `pres`. `max_cosets` caps the total number of coset
/// definitions (live plus merged).
pub fn todd_coxeter(
    pres: &FinitePresentation,
    subgroup_gens: &[Word],
    max_cosets: usize,
) -> CosetEnumeration {
    let mut e = Enumerator::new(pres.num_gens(), max_cosets.max(1));
    let run = (|| -> Result<(), TableOverflow> {
        loop {
            let before = (e.defined, e.merges);
            for w in subgroup_gens {
                e.scan(0, w)?;
            }
            let mut i: u32 = 0;
            while (i as usize) < e.table.len() {
                if e.alive(i) {
                    for r in 0..pres.relators().len() {
                        let word = pres.relators()[r].clone();
                        e.scan(i, &word)?;
                        if !e.alive(i) {
                            break;
                        }
                    }
                    if e.alive(i) {
                        for col in 0..e.ncols {
                            if e.table[i as usize][col].is_none() {
                                e.define(i, col)?;
                            }
                        }
                    }
                }
                i += 1;
            }
            if (e.defined, e.merges) == before {
                return Ok(());
            }
        }
    })();
    match run {
        Ok(()) => CosetEnumeration::Closed(e.compact()),
        Err(TableOverflow) => CosetEnumeration::Overflow { defined: e.defined },
    }
}

/// A subgroup presentation computed from a closed coset table, together
/// with the data needed to interpret it inside the ambient group.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    pub presentation: FinitePresentation,
    /// Word in the ambient generators for each subgroup generator.
    pub generator_words: Vec<Word>,
    /// Schreier transversal, one coset representative word per coset.
    pub transversal: Vec<Word>,
}

/// Reidemeister-Schreier rewriting. Subgroup generators are the non-tree
/// Schreier pairs; relators are the ambient relators traced at every coset
/// and rewritten through the transversal. Tree generators are deleted, no
/// other simplification is applied.
pub fn reidemeister_schreier(
    pres: &FinitePresentation,
    table: &CosetTable,
) -> SubgroupPresentation {
    let index = table.index();
    let gens = pres.num_gens();
    // BFS Schreier transversal; tree edges are stored in both orientations.
    let mut transversal: Vec<Option<Word>> = alloc::vec![None; index];
    transversal[0] = Some(Word::empty());
    let mut tree: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for col in 0..2 * gens {
            let to = table.entry(c, col);
            if transversal[to].is_none() {
                let letter = Letter {
                    gen: col / 2,
                    sign: if col % 2 == 0 { Sign::Plus } else { Sign::Minus },
                };
                let mut w = transversal[c].clone().unwrap();
                w.push(letter);
                transversal[to] = Some(w);
                tree.insert((c, col));
                tree.insert((to, inv_col(col)));
                queue.push_back(to);
            }
        }
    }
    let transversal: Vec<Word> = transversal.into_iter().map(Option::unwrap).collect();

    // Non-tree positive pairs become the subgroup generators.
    let mut gen_index = alloc::collections::BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut generator_words = Vec::new();
    for c in 0..index {
        for g in 0..gens {
            if tree.contains(&(c, 2 * g)) {
                continue;
            }
            gen_index.insert((c, g), names.len());
            names.push(alloc::format!("{}_{}", pres.alphabet().name(g), c));
            let to = table.entry(c, 2 * g);
            let word = transversal[c]
                .concat(&Word::from_letters(alloc::vec![Letter::plus(g)]))
                .concat(&transversal[to].inverse())
                .freely_reduced();
            generator_words.push(word);
        }
    }

    let mut relators = Vec::new();
    for c in 0..index {
        for r in pres.relators() {
            let mut current = c;
            let mut rewritten = Word::empty();
            for &letter in r.letters() {
                match letter.sign {
                    Sign::Plus => {
                        let next = table.entry(current, 2 * letter.gen);
                        if let Some(&g) = gen_index.get(&(current, letter.gen)) {
                            rewritten.push(Letter::plus(g));
                        }
                        current = next;
                    }
                    Sign::Minus => {
                        let next = table.entry(current, 2 * letter.gen + 1);
                        if let Some(&g) = gen_index.get(&(next, letter.gen)) {
                            rewritten.push(Letter::minus(g));
                        }
                        current = next;
                    }
                }
            }
            debug_assert_eq!(current, c, "relator trace must close");
            let rewritten = rewritten.freely_reduced();
            if !rewritten.is_empty() {
                relators.push(rewritten);
            }
        }
    }

    let alphabet = GenAlphabet::new(names).expect("generated names are distinct and valid");
    let presentation = FinitePresentation::new(alphabet, relators)
        .expect("rewritten relators stay in range");
    SubgroupPresentation {
        presentation,
        generator_words,
        transversal,
    }
}

/// A permutation of `{0, .., n-1}` stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = alloc::vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }
}

/// All permutations of the given degree in lexicographic order of their
/// image vectors.
pub fn all_perms(degree: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(degree);
    let mut used = alloc::vec![false; degree];
    fn rec(degree: usize, images: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        if images.len() == degree {
            out.push(Perm {
                images: images.clone(),
            });
            return;
        }
        for i in 0..degree {
            if !used[i] {
                used[i] = true;
                images.push(i);
                rec(degree, images, used, out);
                images.pop();
                used[i] = false;
            }
        }
    }
    rec(degree, &mut images, &mut used, &mut out);
    out
}

/// One permutation per generator; a homomorphism candidate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PermAssignment {
    degree: usize,
    images: Vec<Perm>,
}

impl PermAssignment {
    pub fn new(degree: usize, images: Vec<Perm>) -> PermAssignment {
        assert!(images.iter().all(|p| p.degree() == degree));
        PermAssignment { degree, images }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn eval(&self, word: &Word) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for &letter in word.letters() {
            let img = match letter.sign {
                Sign::Plus => self.images[letter.gen].clone(),
                Sign::Minus => self.images[letter.gen].inverse(),
            };
            acc = acc.then(&img);
        }
        acc
    }

    /// True when every relator maps to the identity.
    pub fn satisfies(&self, pres: &FinitePresentation) -> bool {
        pres.relators().iter().all(|r| self.eval(r).is_identity())
    }
}

/// Depth-first enumeration of homomorphisms into the symmetric group of
/// the given degree. Deterministic: generators are assigned in order, and
/// candidate permutations are tried in lexicographic order. Every yielded
/// assignment satisfies all relators; `budget_exhausted` reports whether
/// the node budget cut the search short.
pub struct HomEnumerator<'a> {
    pres: &'a FinitePresentation,
    perms: Vec<Perm>,
    chosen: Vec<usize>,
    trying: usize,
    nodes: u64,
    budget: u64,
    done: bool,
    exhausted: bool,
}

impl<'a> HomEnumerator<'a> {
    pub fn new(pres: &'a FinitePresentation, degree: usize, budget: u64) -> HomEnumerator<'a> {
        HomEnumerator {
            pres,
            perms: all_perms(degree),
            chosen: Vec::new(),
            trying: 0,
            nodes: 0,
            budget,
            done: false,
            exhausted: false,
        }
    }

    pub fn budget_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn nodes_visited(&self) -> u64 {
        self.nodes
    }

    fn degree(&self) -> usize {
        self.perms.first().map_or(0, Perm::degree)
    }

    /// Checks relators whose support lies within the first `assigned`
    /// generators, using `chosen` plus the candidate at the last slot.
    fn partial_ok(&self, candidate: usize) -> bool {
        let depth = self.chosen.len();
        let degree = self.degree();
        'relators: for r in self.pres.relators() {
            let mut acc = Perm::identity(degree);
            for &letter in r.letters() {
                if letter.gen > depth {
                    continue 'relators;
                }
                let idx = if letter.gen == depth {
                    candidate
                } else {
                    self.chosen[letter.gen]
                };
                let img = match letter.sign {
                    Sign::Plus => self.perms[idx].clone(),
                    Sign::Minus => self.perms[idx].inverse(),
                };
                acc = acc.then(&img);
            }
            if !acc.is_identity() {
                return false;
            }
        }
        true
    }

    fn assignment(&self) -> PermAssignment {
        PermAssignment::new(
            self.degree(),
            self.chosen.iter().map(|&i| self.perms[i].clone()).collect(),
        )
    }
}

impl<'a> Iterator for HomEnumerator<'a> {
    type Item = PermAssignment;

    fn next(&mut self) -> Option<PermAssignment> {
        if self.done {
            return None;
        }
        let num_gens = self.pres.num_gens();
        if num_gens == 0 {
            self.done = true;
            return Some(PermAssignment::new(self.degree(), Vec::new()));
        }
        loop {
            if self.trying >= self.perms.len() {
                match self.chosen.pop() {
                    None => {
                        self.done = true;
                        return None;
                    }
                    Some(prev) => {
                        self.trying = prev + 1;
                        continue;
                    }
                }
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.done = true;
                self.exhausted = true;
                return None;
            }
            if self.partial_ok(self.trying) {
                self.chosen.push(self.trying);
                self.trying = 0;
                if self.chosen.len() == num_gens {
                    let found = self.assignment();
                    debug_assert!(found.satisfies(self.pres));
                    let last = self.chosen.pop().expect("nonempty");
                    self.trying = last + 1;
                    return Some(found);
                }
            } else {
                self.trying += 1;
            }
        }
    }
}

/// Closure of a set of permutations under composition (a subgroup, since
/// the ambient group is finite).
pub fn perm_closure(generators: &[Perm], degree: usize) -> BTreeSet<Perm> {
    let mut closure = BTreeSet::new();
    closure.insert(Perm::identity(degree));
    let mut queue: VecDeque<Perm> = VecDeque::from([Perm::identity(degree)]);
    while let Some(p) = queue.pop_front() {
        for g in generators {
            let q = p.then(g);
            if closure.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    closure
}

/// A finite quotient witnessing that `target` lies outside the subgroup.
#[derive(Clone, Debug)]
pub struct Separation {
    pub degree: usize,
    pub assignment: PermAssignment,
    pub image_of_target: Perm,
    pub subgroup_order: usize,
}

#[derive(Clone, Debug)]
pub enum SeparationOutcome {
    Separated(Separation),
    NotFound { budget_exhausted: bool },
}

/// Searches degrees `1..=max_degree` for a homomorphism to a symmetric
/// group under which the image of `target` escapes the image of the
/// subgroup. The budget caps total search nodes across all degrees.
pub fn separate(
    pres: &FinitePresentation,
    subgroup_gens: &[Word],
    target: &Word,
    max_degree: usize,
    budget: u64,
) -> SeparationOutcome {
    let mut remaining = budget;
    for degree in 1..=max_degree {
        let mut en = HomEnumerator::new(pres, degree, remaining);
        for assignment in en.by_ref() {
            let images: Vec<Perm> = subgroup_gens.iter().map(|w| assignment.eval(w)).collect();
            let closure = perm_closure(&images, degree);
            let image_of_target = assignment.eval(target);
            if !closure.contains(&image_of_target) {
                return SeparationOutcome::Separated(Separation {
                    degree,
                    assignment,
                    image_of_target,
                    subgroup_order: closure.len(),
                });
            }
        }
        let used = en.nodes_visited();
        if en.budget_exhausted() {
            return SeparationOutcome::NotFound {
                budget_exhausted: true,
            };
        }
        remaining = remaining.saturating_sub(used);
    }
    SeparationOutcome::NotFound {
        budget_exhausted: false,
    }
}

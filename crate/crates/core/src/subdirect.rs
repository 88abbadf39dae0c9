//! Subdirect products S ≤ G1 × G2 presented by generator pairs:
//! projections, fiber (L_i = S ∩ G_i) searches, an interleaved
//! membership semi-decision, coset-cover checking, and evidence-backed
//! structure classification.
//!
//! Nothing here asserts more than its artifacts: fibers are witness
//! lists, negative membership answers carry a finite quotient, and the
//! classifier's bucket is tied to terminating coset tables or matching
//! abelianization invariants of the two factor quotients.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph_of_groups::GraphOfGroups;
use crate::lattice::AbelianInvariants;
use crate::quotients::{
    perm_closure, todd_coxeter, CosetEnumeration, FinitePresentation, HomEnumerator, Perm,
    PermAssignment, PresentationError,
};
use crate::raag::{in_parabolic, RaagPresentation};
use crate::words::{letter_range, AlphabetError, GenAlphabet, Letter, Sign, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubdirectError {
    NoGenerators,
    /// An abstract letter refers past the generator list.
    UnknownGenerator { index: usize },
    BadAlphabet(AlphabetError),
    BadPresentation(PresentationError),
}

impl fmt::Display for SubdirectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubdirectError::NoGenerators => write!(f, "generator list is empty"),
            SubdirectError::UnknownGenerator { index } => {
                write!(f, "abstract generator s{} does not exist", index + 1)
            }
            SubdirectError::BadAlphabet(e) => write!(f, "alphabet: {e}"),
            SubdirectError::BadPresentation(e) => write!(f, "presentation: {e}"),
        }
    }
}

impl core::error::Error for SubdirectError {}

impl From<AlphabetError> for SubdirectError {
    fn from(e: AlphabetError) -> SubdirectError {
        SubdirectError::BadAlphabet(e)
    }
}

impl From<PresentationError> for SubdirectError {
    fn from(e: PresentationError) -> SubdirectError {
        SubdirectError::BadPresentation(e)
    }
}

/// One side of the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

/// A factor group: either a right-angled Artin group or a graph of
/// groups, with its word problem and presentation.
#[derive(Clone, Debug)]
pub enum Factor {
    Raag(RaagPresentation),
    Gog(GraphOfGroups),
}

impl Factor {
    pub fn alphabet(&self) -> &GenAlphabet {
        match self {
            Factor::Raag(r) => r.alphabet(),
            Factor::Gog(g) => g.alphabet(),
        }
    }

    pub fn num_gens(&self) -> usize {
        self.alphabet().len()
    }

    pub fn word_problem(&self, w: &Word) -> bool {
        match self {
            Factor::Raag(r) => r.is_trivial(w),
            Factor::Gog(g) => {
                let elem = g.word_to_element(w).expect("word over the factor alphabet");
                g.word_problem(&elem).expect("reduced element is valid")
            }
        }
    }

    /// Canonical-form key: equal group elements get equal keys.
    pub fn normal_key(&self, w: &Word) -> String {
        match self {
            Factor::Raag(r) => r.alphabet().display_word(&r.normal_form(w)),
            Factor::Gog(g) => {
                let elem = g.word_to_element(w).expect("word over the factor alphabet");
                g.display_element(&elem)
            }
        }
    }

    pub fn presentation(&self) -> FinitePresentation {
        match self {
            Factor::Raag(r) => r.presentation(),
            Factor::Gog(g) => g.presentation(),
        }
    }

    /// When every generator word is a distinct single positive letter of
    /// a right-angled Artin factor, the generated subgroup is the
    /// parabolic on that letter set and membership is decidable by
    /// normal-form support.
    fn parabolic_basis(&self, gens: &[Word]) -> Option<BTreeSet<usize>> {
        let Factor::Raag(_) = self else {
            return None;
        };
        let mut basis = BTreeSet::new();
        for g in gens {
            let letters = g.letters();
            if letters.len() != 1 || letters[0].sign != Sign::Plus {
                return None;
            }
            if !basis.insert(letters[0].gen) {
                return None;
            }
        }
        Some(basis)
    }

    fn in_parabolic(&self, basis: &BTreeSet<usize>, w: &Word) -> bool {
        match self {
            Factor::Raag(r) => in_parabolic(r, basis, w),
            Factor::Gog(_) => unreachable!("parabolic bases only arise over Artin factors"),
        }
    }
}

/// An element of G1 × G2 as a coordinate pair of words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PairWord {
    pub first: Word,
    pub second: Word,
}

impl PairWord {
    pub fn new(first: Word, second: Word) -> PairWord {
        PairWord { first, second }
    }

    pub fn identity() -> PairWord {
        PairWord::default()
    }

    pub fn coordinate(&self, side: Side) -> &Word {
        match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        }
    }

    pub fn inverse(&self) -> PairWord {
        PairWord {
            first: self.first.inverse(),
            second: self.second.inverse(),
        }
    }

    pub fn concat(&self, other: &PairWord) -> PairWord {
        PairWord {
            first: self.first.concat(&other.first).freely_reduced(),
            second: self.second.concat(&other.second).freely_reduced(),
        }
    }
}

/// The ambient direct product of two validated factors.
#[derive(Clone, Debug)]
pub struct AmbientProduct {
    first: Factor,
    second: Factor,
    product_alphabet: GenAlphabet,
}

impl AmbientProduct {
    /// Builds the combined alphabet, priming second-factor names until
    /// they are distinct from the first factor's.
    pub fn new(first: Factor, second: Factor) -> Result<AmbientProduct, SubdirectError> {
        let mut names: Vec<String> = first.alphabet().names().to_vec();
        for name in second.alphabet().names() {
            let mut candidate = name.clone();
            while names.contains(&candidate) {
                candidate.push('\'');
            }
            names.push(candidate);
        }
        let product_alphabet = GenAlphabet::new(names)?;
        Ok(AmbientProduct {
            first,
            second,
            product_alphabet,
        })
    }

    pub fn factor(&self, side: Side) -> &Factor {
        match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        }
    }

    /// Alphabet of the product presentation: first factor's names, then
    /// the second factor's (primed on clashes).
    pub fn product_alphabet(&self) -> &GenAlphabet {
        &self.product_alphabet
    }

    pub fn pair_word_problem(&self, p: &PairWord) -> bool {
        self.first.word_problem(&p.first) && self.second.word_problem(&p.second)
    }

    pub fn pair_normal_key(&self, p: &PairWord) -> String {
        let mut key = self.first.normal_key(&p.first);
        key.push_str(" | ");
        key.push_str(&self.second.normal_key(&p.second));
        key
    }

    /// A word over `product_alphabet()` split into its two coordinates.
    pub fn split(&self, w: &Word) -> PairWord {
        let n1 = self.first.num_gens();
        let mut first = Word::empty();
        let mut second = Word::empty();
        for &letter in w.letters() {
            if letter.gen < n1 {
                first.push(letter);
            } else {
                second.push(Letter::new(letter.gen - n1, letter.sign));
            }
        }
        PairWord::new(first.freely_reduced(), second.freely_reduced())
    }

    /// The reverse of `split`: first coordinate, then the shifted second.
    pub fn join(&self, p: &PairWord) -> Word {
        let n1 = self.first.num_gens();
        let shifted: Word = p
            .second
            .letters()
            .iter()
            .map(|l| Letter::new(l.gen + n1, l.sign))
            .collect();
        p.first.concat(&shifted)
    }

    /// Presentation of G1 × G2: both factors' relators plus all cross
    /// commutators.
    pub fn product_presentation(&self) -> FinitePresentation {
        let n1 = self.first.num_gens();
        let p1 = self.first.presentation();
        let p2 = self.second.presentation();
        let mut relators: Vec<Word> = p1.relators().to_vec();
        for r in p2.relators() {
            relators.push(
                r.letters()
                    .iter()
                    .map(|l| Letter::new(l.gen + n1, l.sign))
                    .collect(),
            );
        }
        for u in 0..n1 {
            for v in n1..self.product_alphabet.len() {
                let a = Word::power(u, 1);
                let b = Word::power(v, 1);
                relators.push(a.concat(&b).concat(&a.inverse()).concat(&b.inverse()));
            }
        }
        FinitePresentation::new(self.product_alphabet.clone(), relators)
            .expect("letters in range")
    }
}

/// A subdirect product given by finitely many generator pairs, with
/// optional abstract relators for display.
#[derive(Clone, Debug)]
pub struct SubdirectInput {
    generators: Vec<PairWord>,
    relators: Vec<Word>,
}

impl SubdirectInput {
    pub fn new(generators: Vec<PairWord>) -> Result<SubdirectInput, SubdirectError> {
        if generators.is_empty() {
            return Err(SubdirectError::NoGenerators);
        }
        Ok(SubdirectInput {
            generators,
            relators: Vec::new(),
        })
    }

    pub fn with_relators(mut self, relators: Vec<Word>) -> SubdirectInput {
        self.relators = relators;
        self
    }

    pub fn generators(&self) -> &[PairWord] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Abstract symbols s1..sk, one per generator pair.
    pub fn abstract_alphabet(&self) -> GenAlphabet {
        let names: Vec<String> = (1..=self.generators.len())
            .map(|i| {
                let mut s = String::from("s");
                s.push_str(itoa(i).as_str());
                s
            })
            .collect();
        GenAlphabet::new(names).expect("generated names are valid and distinct")
    }

    /// Substitutes the chosen coordinate of each abstract letter and
    /// freely reduces.
    pub fn project(&self, side: Side, abstract_word: &Word) -> Result<Word, SubdirectError> {
        let mut out = Word::empty();
        for letter in abstract_word.letters() {
            let pair = self
                .generators
                .get(letter.gen)
                .ok_or(SubdirectError::UnknownGenerator { index: letter.gen })?;
            let coord = pair.coordinate(side);
            out = match letter.sign {
                Sign::Plus => out.concat(coord),
                Sign::Minus => out.concat(&coord.inverse()),
            };
        }
        Ok(out.freely_reduced())
    }

    pub fn project_pair(&self, abstract_word: &Word) -> Result<PairWord, SubdirectError> {
        Ok(PairWord::new(
            self.project(Side::First, abstract_word)?,
            self.project(Side::Second, abstract_word)?,
        ))
    }
}

fn itoa(mut v: usize) -> String {
    if v == 0 {
        return String::from("0");
    }
    let mut digits = Vec::new();
    while v > 0 {
        digits.push(b'0' + (v % 10) as u8);
        v /= 10;
    }
    digits.reverse();
    String::from_utf8(digits).expect("ascii digits")
}

/// Elements of S found inside one factor, with the abstract words that
/// produced them.
#[derive(Clone, Debug)]
pub struct FiberReport {
    pub side: Side,
    /// Pairs with trivial off-side coordinate, one per distinct on-side
    /// normal form, paired with the abstract word that realized them.
    pub found: Vec<(Word, PairWord)>,
    pub radius_searched: usize,
}

impl FiberReport {
    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    /// The on-side coordinate words of every witness.
    pub fn witness_words(&self) -> Vec<Word> {
        self.found
            .iter()
            .map(|(_, pair)| pair.coordinate(self.side).clone())
            .collect()
    }
}

/// Enumerates abstract words up to the radius in shortlex order and
/// keeps those that project trivially off-side and nontrivially on-side,
/// one per on-side normal form.
pub fn fiber_search(
    ambient: &AmbientProduct,
    input: &SubdirectInput,
    side: Side,
    radius: usize,
) -> FiberReport {
    let on_factor = ambient.factor(side);
    let off_factor = ambient.factor(side.other());
    let mut found = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for abstract_word in crate::words::enumerate_reduced_words(input.generators.len(), radius) {
        if abstract_word.is_empty() {
            continue;
        }
        let pair = input
            .project_pair(&abstract_word)
            .expect("letters index the generator list");
        let on = pair.coordinate(side);
        let off = pair.coordinate(side.other());
        if !off_factor.word_problem(off) {
            continue;
        }
        if on_factor.word_problem(on) {
            continue;
        }
        if seen.insert(on_factor.normal_key(on)) {
            found.push((abstract_word, pair));
        }
    }
    FiberReport {
        side,
        found,
        radius_searched: radius,
    }
}

/// Caps for the membership semi-decision: the positive search runs over
/// products of up to `max_length` subgroup generators, the negative
/// search over symmetric-group quotients of degree up to `max_degree`,
/// and `max_steps` bounds the total work on both sides together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_length: usize,
    pub max_degree: usize,
    pub max_steps: u64,
}

/// A product of subgroup generators equal to the target.
#[derive(Clone, Debug)]
pub struct MembershipWitness {
    /// Word in the abstract subgroup-generator symbols.
    pub combination: Word,
    /// The same product spelled over the group's alphabet.
    pub element: Word,
}

/// A finite quotient separating the target from the subgroup.
#[derive(Clone, Debug)]
pub struct SeparationCertificate {
    pub degree: usize,
    pub assignment: PermAssignment,
    pub image_of_target: Perm,
    pub subgroup_order: usize,
}

impl SeparationCertificate {
    /// Re-checks the certificate from scratch against a presentation and
    /// the subgroup generators.
    pub fn verify(&self, pres: &FinitePresentation, subgroup_gens: &[Word], target: &Word) -> bool {
        if !self.assignment.satisfies(pres) {
            return false;
        }
        let images: Vec<Perm> = subgroup_gens.iter().map(|w| self.assignment.eval(w)).collect();
        let closure = perm_closure(&images, self.degree);
        closure.len() == self.subgroup_order
            && self.assignment.eval(target) == self.image_of_target
            && !closure.contains(&self.image_of_target)
    }
}

#[derive(Clone, Debug)]
pub enum Membership {
    Yes(MembershipWitness),
    No(SeparationCertificate),
    Unknown,
}

/// Anything that can answer the word problem and present itself; the
/// membership semi-decision runs over either a single factor or the
/// whole product.
pub trait GroupModel {
    fn model_alphabet(&self) -> GenAlphabet;
    fn model_word_problem(&self, w: &Word) -> bool;
    fn model_presentation(&self) -> FinitePresentation;
}

impl GroupModel for Factor {
    fn model_alphabet(&self) -> GenAlphabet {
        self.alphabet().clone()
    }

    fn model_word_problem(&self, w: &Word) -> bool {
        self.word_problem(w)
    }

    fn model_presentation(&self) -> FinitePresentation {
        self.presentation()
    }
}

impl GroupModel for AmbientProduct {
    fn model_alphabet(&self) -> GenAlphabet {
        self.product_alphabet.clone()
    }

    fn model_word_problem(&self, w: &Word) -> bool {
        self.pair_word_problem(&self.split(w))
    }

    fn model_presentation(&self) -> FinitePresentation {
        self.product_presentation()
    }
}

/// Shortlex stream of freely reduced words over `num_gens` generators,
/// starting with the empty word.
struct WordStream {
    queue: VecDeque<Word>,
    num_gens: usize,
    max_len: usize,
}

impl WordStream {
    fn new(num_gens: usize, max_len: usize) -> WordStream {
        WordStream {
            queue: VecDeque::from([Word::empty()]),
            num_gens,
            max_len,
        }
    }
}

impl Iterator for WordStream {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let word = self.queue.pop_front()?;
        if word.len() < self.max_len {
            for letter in letter_range(self.num_gens) {
                if word
                    .letters()
                    .last()
                    .is_some_and(|last| last.cancels(letter))
                {
                    continue;
                }
                let mut extended = word.clone();
                extended.push(letter);
                self.queue.push_back(extended);
            }
        }
        Some(word)
    }
}

/// Substitute subgroup generators for the abstract letters of `w`.
fn substitute(h_gens: &[Word], w: &Word) -> Word {
    let mut out = Word::empty();
    for letter in w.letters() {
        let gen = &h_gens[letter.gen];
        out = match letter.sign {
            Sign::Plus => out.concat(gen),
            Sign::Minus => out.concat(&gen.inverse()),
        };
    }
    out.freely_reduced()
}

/// Runs the positive word search and the negative finite-quotient search
/// in alternating slices until one side answers or the budget is gone.
/// A Yes re-verifies by the word problem; a No carries a quotient in
/// which the target's image escapes the subgroup's image.
pub fn membership_semidecide<M: GroupModel>(
    model: &M,
    h_gens: &[Word],
    target: &Word,
    budget: &SearchBudget,
) -> Membership {
    let pres = model.model_presentation();
    let mut steps: u64 = 0;

    let mut positive = WordStream::new(h_gens.len(), budget.max_length);
    let mut positive_done = h_gens.is_empty() && !target.is_empty();

    let mut degree = 1usize;
    let mut negative: Option<HomEnumerator> = if budget.max_degree >= 1 {
        Some(HomEnumerator::new(&pres, 1, budget.max_steps))
    } else {
        None
    };
    let mut negative_nodes_before: u64 = 0;

    loop {
        if steps >= budget.max_steps {
            return Membership::Unknown;
        }
        let mut advanced = false;

        if !positive_done {
            match positive.next() {
                None => positive_done = true,
                Some(combination) => {
                    advanced = true;
                    steps += 1;
                    let element = substitute(h_gens, &combination);
                    if model.model_word_problem(&target.inverse().concat(&element)) {
                        debug_assert!(model
                            .model_word_problem(&target.inverse().concat(&element)));
                        return Membership::Yes(MembershipWitness {
                            combination,
                            element,
                        });
                    }
                }
            }
        }

        if steps >= budget.max_steps {
            return Membership::Unknown;
        }

        if let Some(en) = negative.as_mut() {
            match en.next() {
                Some(assignment) => {
                    advanced = true;
                    let used = en.nodes_visited() - negative_nodes_before;
                    negative_nodes_before = en.nodes_visited();
                    steps = steps.saturating_add(used.max(1));
                    let images: Vec<Perm> =
                        h_gens.iter().map(|w| assignment.eval(w)).collect();
                    let closure = perm_closure(&images, assignment.degree());
                    let image_of_target = assignment.eval(target);
                    if !closure.contains(&image_of_target) {
                        let certificate = SeparationCertificate {
                            degree: assignment.degree(),
                            assignment,
                            image_of_target,
                            subgroup_order: closure.len(),
                        };
                        debug_assert!(certificate.verify(&pres, h_gens, target));
                        return Membership::No(certificate);
                    }
                }
                None => {
                    if en.budget_exhausted() {
                        return Membership::Unknown;
                    }
                    steps = steps.saturating_add(
                        (en.nodes_visited() - negative_nodes_before).max(1),
                    );
                    degree += 1;
                    if degree > budget.max_degree {
                        negative = None;
                    } else {
                        negative = Some(HomEnumerator::new(
                            &pres,
                            degree,
                            budget.max_steps.saturating_sub(steps),
                        ));
                        negative_nodes_before = 0;
                        advanced = true;
                    }
                }
            }
        }

        if !advanced && positive_done && negative.is_none() {
            return Membership::Unknown;
        }
    }
}

/// Verdicts for a proposed covering of a factor by subgroup-coset-cyclic
/// pieces `H · z_j · ⟨c⟩`.
#[derive(Clone, Debug)]
pub enum CosetCover {
    /// Every element of the radius ball factors.
    Covered { radius: usize },
    /// A ball element provably outside every piece. Only issued when
    /// subgroup membership is exactly decidable and the cyclic part
    /// degenerates.
    Uncovered { witness: Word },
    /// Some element resisted the bounded search but no exact negative is
    /// available.
    Unknown { first_unresolved: Word },
}

/// Checks whether the ball of the given radius lies in
/// `⋃_j H · z_j · ⟨c⟩` with `H = ⟨subgroup_gens ∪ extra⟩`. Factorizations
/// use at most `witness_budget` subgroup generators and cyclic exponents
/// up to `witness_budget` in absolute value. Negative verdicts are exact
/// only for parabolic subgroups of an Artin factor with trivial `c`.
pub fn coset_cover_check(
    factor: &Factor,
    subgroup_gens: &[Word],
    extra: &[Word],
    cosets: &[Word],
    c: &Word,
    radius: usize,
    witness_budget: usize,
) -> CosetCover {
    if cosets.is_empty() {
        return CosetCover::Uncovered {
            witness: Word::empty(),
        };
    }
    let all_gens: Vec<Word> = subgroup_gens.iter().chain(extra.iter()).cloned().collect();
    let basis = factor.parabolic_basis(&all_gens);
    let c_trivial = factor.word_problem(c);

    // Bounded membership set: normal-form keys of all products of at
    // most witness_budget generators.
    let mut product_keys: BTreeSet<String> = BTreeSet::new();
    if basis.is_none() {
        let mut level: Vec<Word> = alloc::vec![Word::empty()];
        product_keys.insert(factor.normal_key(&Word::empty()));
        for _ in 0..witness_budget {
            let mut next = Vec::new();
            for w in &level {
                for g in &all_gens {
                    for cand in [w.concat(g), w.concat(&g.inverse())] {
                        let key = factor.normal_key(&cand);
                        if product_keys.insert(key) {
                            next.push(cand.freely_reduced());
                        }
                    }
                }
            }
            level = next;
        }
    }

    let w_budget = witness_budget as i64;
    let mut ball_seen: BTreeSet<String> = BTreeSet::new();
    let mut first_unresolved: Option<Word> = None;
    for g in crate::words::enumerate_reduced_words(factor.num_gens(), radius) {
        if !ball_seen.insert(factor.normal_key(&g)) {
            continue;
        }
        let mut covered = false;
        'pieces: for z in cosets {
            for i in -w_budget..=w_budget {
                // g = h z c^i  ⟺  h = g c^-i z^-1.
                let c_step = if i > 0 { c.inverse() } else { c.clone() };
                let mut h = g.clone();
                for _ in 0..i.unsigned_abs() {
                    h = h.concat(&c_step);
                }
                h = h.concat(&z.inverse());
                let inside = match &basis {
                    Some(v0) => factor.in_parabolic(v0, &h),
                    None => product_keys.contains(&factor.normal_key(&h)),
                };
                if inside {
                    covered = true;
                    break 'pieces;
                }
                if c_trivial {
                    break;
                }
            }
        }
        if !covered {
            if basis.is_some() && c_trivial {
                return CosetCover::Uncovered { witness: g };
            }
            if first_unresolved.is_none() {
                first_unresolved = Some(g);
            }
        }
    }
    match first_unresolved {
        None => CosetCover::Covered { radius },
        Some(first_unresolved) => CosetCover::Unknown { first_unresolved },
    }
}

/// The factor's presentation with the given words adjoined as relators:
/// the quotient by their normal closure.
pub fn quotient_presentation(
    factor: &Factor,
    normal_gen_words: &[Word],
) -> Result<FinitePresentation, SubdirectError> {
    let base = factor.presentation();
    let mut relators = base.relators().to_vec();
    relators.extend(normal_gen_words.iter().cloned());
    Ok(FinitePresentation::new(base.alphabet().clone(), relators)?)
}

/// Suggested structure, each variant tied to the evidence named in the
/// report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureBucket {
    /// Both factor quotients closed under coset enumeration.
    FiniteIndex,
    /// Both quotients abelianize to Z.
    ZKernel,
    /// Both quotients abelianize to Z².
    Z2Kernel,
    Unknown,
}

/// Everything classify_structure measured. The bucket is a suggestion;
/// the artifacts are the claim.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub fiber_first: FiberReport,
    pub fiber_second: FiberReport,
    pub quotient_first: FinitePresentation,
    pub quotient_second: FinitePresentation,
    pub abelian_first: AbelianInvariants,
    pub abelian_second: AbelianInvariants,
    pub index_first: Option<usize>,
    pub index_second: Option<usize>,
    pub bucket: StructureBucket,
    pub note: Option<String>,
}

/// Gathers fibers, the two factor quotients by the found witnesses,
/// their abelianizations, and a coset-enumeration attempt, then suggests
/// a bucket only when the artifacts match.
pub fn classify_structure(
    ambient: &AmbientProduct,
    input: &SubdirectInput,
    budget: &SearchBudget,
) -> Result<StructureReport, SubdirectError> {
    let fiber_first = fiber_search(ambient, input, Side::First, budget.max_length);
    let fiber_second = fiber_search(ambient, input, Side::Second, budget.max_length);
    let quotient_first =
        quotient_presentation(ambient.factor(Side::First), &fiber_first.witness_words())?;
    let quotient_second =
        quotient_presentation(ambient.factor(Side::Second), &fiber_second.witness_words())?;
    let abelian_first = quotient_first.abelianization();
    let abelian_second = quotient_second.abelianization();
    let max_cosets = usize::try_from(budget.max_steps.min(100_000)).unwrap_or(usize::MAX);
    let index_of = |pres: &FinitePresentation| match todd_coxeter(pres, &[], max_cosets) {
        CosetEnumeration::Closed(t) => Some(t.index()),
        CosetEnumeration::Overflow { .. } => None,
    };
    let index_first = index_of(&quotient_first);
    let index_second = index_of(&quotient_second);

    let mut note = None;
    let bucket = if let (Some(_), Some(_)) = (index_first, index_second) {
        StructureBucket::FiniteIndex
    } else if fiber_first.is_empty() && fiber_second.is_empty() {
        note = Some(String::from(
            "no fiber witnesses within radius: consistent with the \
             isomorphic-to-factor case",
        ));
        StructureBucket::Unknown
    } else if abelian_first.rank == abelian_second.rank
        && abelian_first.torsion.is_empty()
        && abelian_second.torsion.is_empty()
        && (abelian_first.rank == 1 || abelian_first.rank == 2)
    {
        if abelian_first.rank == 1 {
            StructureBucket::ZKernel
        } else {
            StructureBucket::Z2Kernel
        }
    } else {
        StructureBucket::Unknown
    };

    Ok(StructureReport {
        fiber_first,
        fiber_second,
        quotient_first,
        quotient_second,
        abelian_first,
        abelian_second,
        index_first,
        index_second,
        bucket,
        note,
    })
}

/// Net abstract-generator exponents, for quick sanity displays.
pub fn abstract_exponents(w: &Word) -> BTreeMap<usize, i64> {
    let mut sums = BTreeMap::new();
    for letter in w.letters() {
        *sums.entry(letter.gen).or_insert(0) += letter.sign.as_i64();
    }
    sums.retain(|_, v| *v != 0);
    sums
}

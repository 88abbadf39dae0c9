//! Free words over a finite alphabet of group generators.
//!
//! A [`Word`] is a sequence of signed generator letters. Free reduction,
//! cyclic reduction, and shortlex enumeration of reduced words live here;
//! everything downstream (normal forms, coset enumeration, searches) reuses
//! these primitives. The letter order is generator index first, then sign
//! with `+1` before `-1`; shortlex compares length first and then letters.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Sign of a letter. `Plus` sorts before `Minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One signed generator occurrence. Derived `Ord` gives the letter order
/// used by every shortlex enumeration: generator index, then sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: usize, sign: Sign) -> Letter {
        Letter { gen, sign }
    }

    pub fn plus(gen: usize) -> Letter {
        Letter::new(gen, Sign::Plus)
    }

    pub fn minus(gen: usize) -> Letter {
        Letter::new(gen, Sign::Minus)
    }

    pub fn inverse(self) -> Letter {
        Letter::new(self.gen, self.sign.flip())
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

/// A word over generator indices. Not automatically reduced; callers decide
/// when to apply [`Word::freely_reduced`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    /// `gen^exponent` as a word, e.g. `power(0, -3)` is `a^-1 a^-1 a^-1`.
    pub fn power(gen: usize, exponent: i64) -> Word {
        let sign = if exponent >= 0 { Sign::Plus } else { Sign::Minus };
        let count = exponent.unsigned_abs() as usize;
        Word::from_letters(alloc::vec![Letter::new(gen, sign); count])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
    }

    /// Plain concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self · other · self^-1`, unreduced.
    pub fn conjugate(&self, other: &Word) -> Word {
        self.concat(other).concat(&self.inverse())
    }

    /// Removes adjacent inverse pairs until none remain. Idempotent, never
    /// lengthens the word.
    pub fn freely_reduced(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &letter in &self.letters {
            if stack.last().is_some_and(|top| top.cancels(letter)) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Word { letters: stack }
    }

    /// Splits a word as `c · core · c^-1` with `core` cyclically reduced.
    /// Returns `(core, c)`.
    pub fn cyclically_reduced(&self) -> (Word, Word) {
        let reduced = self.freely_reduced();
        let letters = &reduced.letters;
        let mut front = 0;
        let mut back = letters.len();
        while back - front >= 2 && letters[front].cancels(letters[back - 1]) {
            front += 1;
            back -= 1;
        }
        let core = Word::from_letters(letters[front..back].to_vec());
        let conjugator = Word::from_letters(letters[..front].to_vec());
        (core, conjugator)
    }

    /// Signed occurrence count per generator (the abelianized image).
    pub fn exponent_sums(&self, num_gens: usize) -> Vec<i64> {
        let mut sums = alloc::vec![0i64; num_gens];
        for letter in &self.letters {
            sums[letter.gen] += letter.sign.as_i64();
        }
        sums
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Word {
        Word {
            letters: iter.into_iter().collect(),
        }
    }
}

/// All freely reduced words of length at most `max_len` over `num_gens`
/// generators, in shortlex order starting with the empty word.
pub fn enumerate_reduced_words(num_gens: usize, max_len: usize) -> Vec<Word> {
    let mut all = alloc::vec![Word::empty()];
    let mut current: Vec<Word> = alloc::vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for word in &current {
            for letter in letter_range(num_gens) {
                if word.letters.last().is_some_and(|last| last.cancels(letter)) {
                    continue;
                }
                let mut extended = word.clone();
                extended.push(letter);
                next.push(extended);
            }
        }
        all.extend(next.iter().cloned());
        current = next;
    }
    all
}

/// The `2 * num_gens` letters in their canonical order.
pub fn letter_range(num_gens: usize) -> impl Iterator<Item = Letter> {
    (0..num_gens).flat_map(|gen| [Letter::plus(gen), Letter::minus(gen)])
}

/// Number of freely reduced words of length at most `max_len`:
/// `1 + sum_i 2k (2k-1)^(i-1)`.
pub fn reduced_word_count(num_gens: usize, max_len: usize) -> u64 {
    if num_gens == 0 {
        return 1;
    }
    let k = num_gens as u64;
    let mut total = 1;
    let mut sphere = 2 * k;
    for _ in 0..max_len {
        total += sphere;
        sphere *= 2 * k - 1;
    }
    total
}

/// A fixed, ordered list of distinct generator names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenAlphabet {
    names: Vec<String>,
}

impl GenAlphabet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(
        names: I,
    ) -> Result<GenAlphabet, AlphabetError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(AlphabetError::BadName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(AlphabetError::DuplicateName(name.clone()));
            }
        }
        Ok(GenAlphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses the whitespace-separated word syntax: `a b^-1 c`. The lone
    /// token `1` is the empty word. Integer exponents other than `-1` are
    /// accepted on input (`x^3`, `x^-2`) and expanded letter by letter.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        let trimmed = text.trim();
        if trimmed == "1" {
            return Ok(Word::empty());
        }
        if trimmed.is_empty() {
            return Err(WordParseError::Empty);
        }
        let mut word = Word::empty();
        for token in trimmed.split_whitespace() {
            if token == "1" {
                return Err(WordParseError::MisplacedOne);
            }
            let (name, exponent) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .parse()
                        .map_err(|_| WordParseError::BadExponent(token.to_owned()))?;
                    (name, exp)
                }
            };
            let gen = self
                .index_of(name)
                .ok_or_else(|| WordParseError::UnknownSymbol(name.to_owned()))?;
            let sign = if exponent >= 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..exponent.unsigned_abs() {
                word.push(Letter::new(gen, sign));
            }
        }
        Ok(word)
    }

    /// Serializes with `^-1` suffixes only; the empty word prints as `1`.
    pub fn display_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "1".to_owned();
        }
        let mut out = String::new();
        for (i, letter) in word.letters().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&self.names[letter.gen]);
            if letter.sign == Sign::Minus {
                out.push_str("^-1");
            }
        }
        out
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !first.is_ascii_alphabetic() {
        return false;
    }
    if name == "1" {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphabetError {
    BadName(String),
    DuplicateName(String),
}

impl fmt::Display for AlphabetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetError::BadName(name) => write!(f, "invalid generator name {name:?}"),
            AlphabetError::DuplicateName(name) => {
                write!(f, "duplicate generator name {name:?}")
            }
        }
    }
}

impl core::error::Error for AlphabetError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordParseError {
    Empty,
    MisplacedOne,
    UnknownSymbol(String),
    BadExponent(String),
}

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordParseError::Empty => write!(f, "empty word text (use \"1\" for the empty word)"),
            WordParseError::MisplacedOne => {
                write!(f, "token \"1\" is only valid as the entire word")
            }
            WordParseError::UnknownSymbol(name) => write!(f, "unknown generator {name:?}"),
            WordParseError::BadExponent(token) => write!(f, "malformed exponent in {token:?}"),
        }
    }
}

impl core::error::Error for WordParseError {}

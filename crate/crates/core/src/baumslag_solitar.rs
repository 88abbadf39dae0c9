//! Baumslag-Solitar groups BS(m,n) = <x, t | t^-1 x^m t = x^n>: Britton
//! normal forms over {x, t}, the normal closure of x, rewriting into
//! x_i-words (x_i = t^-i x t^i), the abelianization of that closure into
//! the ring of fractions with denominator powers of |mn|, and the
//! conjugation-power exponent formulas.
//!
//! Normal forms absorb coset representatives left to right: the x-block
//! before a t is reduced to 0..|m|-1 (before a t^-1, to 0..|n|-1) and the
//! quotient is carried through the crossing.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::quotients::FinitePresentation;
use crate::words::{GenAlphabet, Sign, Word};

pub const GEN_X: usize = 0;
pub const GEN_T: usize = 1;

/// Largest x-exponent a normal form will spell out letter by letter.
const MATERIALIZE_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BsError {
    ZeroParameter,
    /// The word has a nonzero t-exponent sum, so it lies outside the
    /// normal closure of x.
    NotInClosure { t_sum: i64 },
    /// The abelianization map needs gcd(|m|,|n|) = 1 and |m|,|n| >= 2.
    UnsupportedParameters { reason: &'static str },
    /// The exponent formulas cover m,n > 0 and m < 0 < n only.
    UnsupportedSignCase,
    /// |m| = |n| is excluded from the power-exponent formula.
    EqualModuli,
    /// The M <= 4 word-length guard for identity verification.
    BudgetExceeded { max_power: u32 },
}

impl fmt::Display for BsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BsError::ZeroParameter => write!(f, "parameters must be nonzero"),
            BsError::NotInClosure { t_sum } => {
                write!(f, "word has t-exponent sum {t_sum}, not in the closure of x")
            }
            BsError::UnsupportedParameters { reason } => write!(f, "unsupported parameters: {reason}"),
            BsError::UnsupportedSignCase => {
                write!(f, "sign pattern outside the supported cases (m,n>0 or m<0<n)")
            }
            BsError::EqualModuli => write!(f, "|m| = |n| is excluded here"),
            BsError::BudgetExceeded { max_power } => {
                write!(f, "power exceeds the verification guard M <= {max_power}")
            }
        }
    }
}

impl core::error::Error for BsError {}

/// Parameters of BS(m,n); both nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BsParams {
    m: i64,
    n: i64,
}

impl BsParams {
    pub fn new(m: i64, n: i64) -> Result<BsParams, BsError> {
        if m == 0 || n == 0 {
            return Err(BsError::ZeroParameter);
        }
        Ok(BsParams { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn gcd_one(&self) -> bool {
        self.m.unsigned_abs().gcd(&self.n.unsigned_abs()) == 1
    }

    pub fn alphabet(&self) -> GenAlphabet {
        GenAlphabet::new(["x", "t"]).expect("fixed names are valid")
    }

    /// One-relator presentation t^-1 x^m t x^-n.
    pub fn presentation(&self) -> FinitePresentation {
        let relator = Word::power(GEN_T, -1)
            .concat(&Word::power(GEN_X, self.m))
            .concat(&Word::power(GEN_T, 1))
            .concat(&Word::power(GEN_X, -self.n));
        FinitePresentation::new(self.alphabet(), alloc::vec![relator])
            .expect("letters in range")
    }

    fn big_m(&self) -> BigInt {
        BigInt::from(self.m)
    }

    fn big_n(&self) -> BigInt {
        BigInt::from(self.n)
    }

    /// |m*n| as a big integer.
    fn abs_mn(&self) -> BigInt {
        (self.big_m() * self.big_n()).abs()
    }
}

/// A crossing letter together with the x-block accumulated before it.
#[derive(Clone, Debug)]
struct BsCrossing {
    /// Plus crosses as t, Minus as t^-1.
    letter: Sign,
    before: BigInt,
}

fn reduce_syllables(p: &BsParams, w: &Word) -> (Vec<BsCrossing>, BigInt) {
    let m = p.big_m();
    let n = p.big_n();
    let mut stack: Vec<BsCrossing> = Vec::new();
    let mut e = BigInt::zero();
    for letter in w.letters() {
        match letter.gen {
            GEN_X => match letter.sign {
                Sign::Plus => e += 1,
                Sign::Minus => e -= 1,
            },
            GEN_T => {
                // t^-1 x^(am) t -> x^(an);  t x^(bn) t^-1 -> x^(bm).
                let pinched = stack.last().and_then(|top| {
                    match (top.letter, letter.sign) {
                        (Sign::Minus, Sign::Plus) if (&e % &m).is_zero() => {
                            Some(&e / &m * &n)
                        }
                        (Sign::Plus, Sign::Minus) if (&e % &n).is_zero() => {
                            Some(&e / &n * &m)
                        }
                        _ => None,
                    }
                });
                if let Some(mapped) = pinched {
                    e = stack.pop().expect("nonempty").before + mapped;
                    continue;
                }
                stack.push(BsCrossing {
                    letter: letter.sign,
                    before: e,
                });
                e = BigInt::zero();
            }
            _ => panic!("word letter outside the x,t alphabet"),
        }
    }
    (stack, e)
}

fn push_power(out: &mut Vec<crate::words::Letter>, gen: usize, e: &BigInt) {
    let count = e.abs();
    assert!(
        count <= BigInt::from(MATERIALIZE_CAP),
        "normal form exponent exceeds the materialization bound"
    );
    let mut c = count.clone();
    let letter = if e.is_negative() {
        crate::words::Letter::minus(gen)
    } else {
        crate::words::Letter::plus(gen)
    };
    while c.is_positive() {
        out.push(letter);
        c -= 1;
    }
}

/// Unique Britton normal form of a word over {x, t}. Two words are equal
/// in BS(m,n) iff their normal forms are identical.
pub fn bs_normal_form(p: &BsParams, w: &Word) -> Word {
    let (crossings, tail) = reduce_syllables(p, w);
    let m = p.big_m();
    let n = p.big_n();
    let abs_m = m.abs();
    let abs_n = n.abs();

    let mut out: Vec<crate::words::Letter> = Vec::new();
    let mut carry = BigInt::zero();
    for c in &crossings {
        let val = &c.before + &carry;
        let (modulus, divisor, carry_unit) = match c.letter {
            Sign::Plus => (&abs_m, &m, &n),
            Sign::Minus => (&abs_n, &n, &m),
        };
        let r = val.mod_floor(modulus);
        let q = (&val - &r) / divisor;
        push_power(&mut out, GEN_X, &r);
        out.push(match c.letter {
            Sign::Plus => crate::words::Letter::plus(GEN_T),
            Sign::Minus => crate::words::Letter::minus(GEN_T),
        });
        carry = q * carry_unit;
    }
    let tail = tail + carry;
    push_power(&mut out, GEN_X, &tail);
    Word::from_letters(out)
}

pub fn bs_equal(p: &BsParams, u: &Word, v: &Word) -> bool {
    bs_normal_form(p, u) == bs_normal_form(p, v)
}

pub fn bs_word_problem(p: &BsParams, w: &Word) -> bool {
    bs_normal_form(p, w).is_empty()
}

/// Signed number of t-letters; constant on the cosets of the normal
/// closure of x.
pub fn t_exponent_sum(w: &Word) -> i64 {
    w.letters()
        .iter()
        .filter(|l| l.gen == GEN_T)
        .map(|l| l.sign.as_i64())
        .sum()
}

/// The quotient by the closure of x is generated by the image of t, so
/// membership is exactly a vanishing t-exponent sum.
pub fn in_normal_closure_x(w: &Word) -> bool {
    t_exponent_sum(w) == 0
}

/// A product of the generators x_i = t^-i x t^i and their inverses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XiWord {
    factors: Vec<(i64, Sign)>,
}

impl XiWord {
    pub fn new(factors: Vec<(i64, Sign)>) -> XiWord {
        XiWord { factors }
    }

    pub fn factors(&self) -> &[(i64, Sign)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn concat(&self, other: &XiWord) -> XiWord {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        XiWord { factors }
    }

    pub fn inverse(&self) -> XiWord {
        XiWord {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|&(i, s)| (i, s.flip()))
                .collect(),
        }
    }

    /// Conjugation by t^j shifts every index by j.
    pub fn shift(&self, j: i64) -> XiWord {
        XiWord {
            factors: self.factors.iter().map(|&(i, s)| (i + j, s)).collect(),
        }
    }

    /// Spelled out over {x, t}.
    pub fn to_word(&self) -> Word {
        let mut w = Word::empty();
        for &(i, s) in &self.factors {
            let e = match s {
                Sign::Plus => 1,
                Sign::Minus => -1,
            };
            w = w
                .concat(&Word::power(GEN_T, -i))
                .concat(&Word::power(GEN_X, e))
                .concat(&Word::power(GEN_T, i));
        }
        w
    }

    /// Net exponent per index, in index order.
    pub fn index_sums(&self) -> Vec<(i64, i64)> {
        let mut sums: alloc::collections::BTreeMap<i64, i64> = alloc::collections::BTreeMap::new();
        for &(i, s) in &self.factors {
            *sums.entry(i).or_insert(0) += s.as_i64();
        }
        sums.into_iter().filter(|&(_, c)| c != 0).collect()
    }
}

impl fmt::Display for XiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, &(i, s)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            match s {
                Sign::Plus => write!(f, "x[{i}]")?,
                Sign::Minus => write!(f, "x[{i}]^-1")?,
            }
        }
        Ok(())
    }
}

/// Rewrites a word of the closure of x as a product of x_i letters: an x
/// at running t-prefix e contributes the factor with index -e.
pub fn to_xi_word(p: &BsParams, w: &Word) -> Result<XiWord, BsError> {
    let sum = t_exponent_sum(w);
    if sum != 0 {
        return Err(BsError::NotInClosure { t_sum: sum });
    }
    let mut e: i64 = 0;
    let mut factors = Vec::new();
    for letter in w.letters() {
        match letter.gen {
            GEN_T => e += letter.sign.as_i64(),
            GEN_X => factors.push((-e, letter.sign)),
            _ => panic!("word letter outside the x,t alphabet"),
        }
    }
    let xi = XiWord { factors };
    debug_assert!(
        bs_equal(p, w, &xi.to_word()),
        "x_i rewriting must preserve the element"
    );
    Ok(xi)
}

/// An exact rational p / |mn|^k in lowest such form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnRational {
    p: BigInt,
    k: u32,
}

impl MnRational {
    pub fn zero() -> MnRational {
        MnRational {
            p: BigInt::zero(),
            k: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.p
    }

    pub fn denominator_exponent(&self) -> u32 {
        self.k
    }

    fn canonical(mut p: BigInt, mut k: u32, abs_mn: &BigInt) -> MnRational {
        if p.is_zero() {
            return MnRational::zero();
        }
        while k > 0 && (&p % abs_mn).is_zero() {
            p /= abs_mn;
            k -= 1;
        }
        MnRational { p, k }
    }

    fn add(&self, other: &MnRational, abs_mn: &BigInt) -> MnRational {
        let (lo, hi) = if self.k <= other.k {
            (self, other)
        } else {
            (other, self)
        };
        let scale = abs_mn.pow(hi.k - lo.k);
        MnRational::canonical(&lo.p * scale + &hi.p, hi.k, abs_mn)
    }

    /// Exact comparison with num/den.
    pub fn equals_fraction(&self, num: &BigInt, den: &BigInt, p: &BsParams) -> bool {
        assert!(!den.is_zero());
        &self.p * den == num * p.abs_mn().pow(self.k)
    }
}

impl fmt::Display for MnRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/|mn|^{}", self.p, self.k)
        }
    }
}

/// The additive map from the closure of x onto the fractions with
/// denominator a power of |mn|: the generator with index i goes to
/// (n/m)^i. This is the ratio forced by the defining relation
/// x_{i+1}^m = x_i^n; the constructor re-checks that every such relator
/// maps to zero.
#[derive(Clone, Debug)]
pub struct H1Map {
    params: BsParams,
}

impl H1Map {
    pub fn new(params: BsParams) -> Result<H1Map, BsError> {
        if !params.gcd_one() {
            return Err(BsError::UnsupportedParameters {
                reason: "gcd(|m|,|n|) must be 1",
            });
        }
        if params.m.abs() < 2 || params.n.abs() < 2 {
            return Err(BsError::UnsupportedParameters {
                reason: "|m| and |n| must be at least 2",
            });
        }
        let map = H1Map { params };
        // Well-definedness self-test: x_{i+1}^m x_i^-n must vanish.
        for i in -2..=2 {
            let mut factors = Vec::new();
            for _ in 0..params.m.unsigned_abs() {
                factors.push((i + 1, sign_of(params.m)));
            }
            for _ in 0..params.n.unsigned_abs() {
                factors.push((i, sign_of(params.n).flip()));
            }
            let image = map.image(&XiWord::new(factors));
            assert!(
                image.is_zero(),
                "relator at index {i} must map to zero, got {image}"
            );
        }
        Ok(map)
    }

    pub fn params(&self) -> &BsParams {
        &self.params
    }

    /// Image of a single generator: (n/m)^i over the |mn| denominator.
    fn generator_image(&self, i: i64) -> MnRational {
        let abs_mn = self.params.abs_mn();
        let (base, j) = if i >= 0 {
            (self.params.big_n(), i as u32)
        } else {
            (self.params.big_m(), (-i) as u32)
        };
        // (n/m)^i = n^i * n^i / (mn)^i, and similarly with m for i < 0;
        // the denominator's sign moves into the numerator.
        let mn = self.params.big_m() * self.params.big_n();
        let sign = if mn.is_negative() && j % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        MnRational::canonical(base.pow(2 * j) * sign, j, &abs_mn)
    }

    pub fn image(&self, w: &XiWord) -> MnRational {
        let abs_mn = self.params.abs_mn();
        let mut acc = MnRational::zero();
        for &(i, s) in w.factors() {
            let mut term = self.generator_image(i);
            if s == Sign::Minus {
                term.p = -term.p;
            }
            acc = acc.add(&term, &abs_mn);
        }
        acc
    }
}

fn sign_of(v: i64) -> Sign {
    if v >= 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn h1_image(p: &BsParams, w: &XiWord) -> Result<MnRational, BsError> {
    Ok(H1Map::new(*p)?.image(w))
}

/// Commutator-subgroup membership inside the closure of x: exactly the
/// kernel of the abelianization map.
pub fn commutator_membership(p: &BsParams, w: &XiWord) -> Result<bool, BsError> {
    Ok(h1_image(p, w)?.is_zero())
}

/// Bezout witness k1*m + k2*n = 1 realizing 1/m as the image of
/// x_0^k1 x_1^k2.
pub fn bezout_one_over_m(p: &BsParams) -> Result<(XiWord, MnRational), BsError> {
    let map = H1Map::new(*p)?;
    let e = p.big_m().extended_gcd(&p.big_n());
    debug_assert!(e.gcd.is_one());
    let k1 = e.x.to_i64_checked();
    let k2 = e.y.to_i64_checked();
    let mut factors = Vec::new();
    for _ in 0..k1.unsigned_abs() {
        factors.push((0, sign_of(k1)));
    }
    for _ in 0..k2.unsigned_abs() {
        factors.push((1, sign_of(k2)));
    }
    let w = XiWord::new(factors);
    let image = map.image(&w);
    assert!(
        image.equals_fraction(&BigInt::one(), &p.big_m(), p),
        "Bezout witness must map to 1/m"
    );
    Ok((w, image))
}

trait ToI64Checked {
    fn to_i64_checked(&self) -> i64;
}

impl ToI64Checked for BigInt {
    fn to_i64_checked(&self) -> i64 {
        use num_traits::ToPrimitive;
        self.to_i64().expect("value fits in 64 bits")
    }
}

/// S = max |index| over the factors; the power x^((|m||n|)^S) commutes
/// with the word. The identity is re-checked by normal forms whenever the
/// power is small enough to spell out.
pub fn stabilizing_exponent(p: &BsParams, g: &XiWord) -> u32 {
    let s = g
        .factors()
        .iter()
        .map(|&(i, _)| i.unsigned_abs())
        .max()
        .unwrap_or(0);
    let s = u32::try_from(s).expect("index magnitude fits in 32 bits");
    let base = p.m.unsigned_abs() * p.n.unsigned_abs();
    if let Some(power) = base.checked_pow(s).filter(|&pw| pw <= MATERIALIZE_CAP) {
        let xp = Word::power(GEN_X, power as i64);
        let gw = g.to_word();
        let lhs = gw.inverse().concat(&xp).concat(&gw);
        assert!(
            bs_equal(p, &lhs, &xp),
            "stabilized power must commute with the word"
        );
    }
    s
}

/// Confirms the conjugation identity
/// t^-k x^(m^M n^M) t^k = x^(m^(M-k) n^(M+k))  for m,n > 0, and
/// t^-k x^(|m|^M n^M) t^k = x^((-1)^k |m|^(M-k) n^(M+k))  for m < 0 < n,
/// by comparing normal forms of both sides.
pub fn conjugation_power_identity(p: &BsParams, m_power: u32, k: u32) -> Result<bool, BsError> {
    if m_power == 0 && k == 0 {
        return Ok(true);
    }
    if k == 0 || k > m_power || m_power > 4 {
        return Err(BsError::BudgetExceeded { max_power: 4 });
    }
    let (lhs_base, rhs_power): (BigInt, BigInt) = if p.m > 0 && p.n > 0 {
        (
            p.big_m().pow(m_power) * p.big_n().pow(m_power),
            p.big_m().pow(m_power - k) * p.big_n().pow(m_power + k),
        )
    } else if p.m < 0 && p.n > 0 {
        let abs_m = p.big_m().abs();
        let sign = if k % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        (
            abs_m.pow(m_power) * p.big_n().pow(m_power),
            sign * abs_m.pow(m_power - k) * p.big_n().pow(m_power + k),
        )
    } else {
        return Err(BsError::UnsupportedSignCase);
    };
    let ki = i64::from(k);
    let lhs = Word::power(GEN_T, -ki)
        .concat(&Word::power(GEN_X, lhs_base.to_i64_checked()))
        .concat(&Word::power(GEN_T, ki));
    let rhs = Word::power(GEN_X, rhs_power.to_i64_checked());
    Ok(bs_equal(p, &lhs, &rhs))
}

/// The exponent q with x^q in the relevant normal subgroup:
/// q = n^M m^(M-k) (m^k - n^k) for m,n > 0, and
/// q = n^M |m|^(M-k) (|m|^k - n^k) for m < 0 < n.
pub fn power_in_n_exponent(p: &BsParams, m_power: u32, k: u32) -> Result<BigInt, BsError> {
    if p.m.abs() == p.n.abs() {
        return Err(BsError::EqualModuli);
    }
    if k == 0 || k > m_power {
        return Err(BsError::BudgetExceeded { max_power: m_power });
    }
    let q = if p.m > 0 && p.n > 0 {
        p.big_n().pow(m_power)
            * p.big_m().pow(m_power - k)
            * (p.big_m().pow(k) - p.big_n().pow(k))
    } else if p.m < 0 && p.n > 0 {
        let abs_m = p.big_m().abs();
        p.big_n().pow(m_power) * abs_m.pow(m_power - k) * (abs_m.pow(k) - p.big_n().pow(k))
    } else {
        return Err(BsError::UnsupportedSignCase);
    };
    debug_assert!(!q.is_zero(), "precondition |m| != |n| keeps q nonzero");
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: i64, n: i64) -> BsParams {
        BsParams::new(m, n).unwrap()
    }

    fn w(p: &BsParams, s: &str) -> Word {
        p.alphabet().parse_word(s).unwrap()
    }

    fn nf(p: &BsParams, s: &str) -> Word {
        bs_normal_form(p, &w(p, s))
    }

    #[test]
    fn normal_form_examples() {
        let p = params(2, 3);
        assert!(bs_word_problem(&p, &w(&p, "t^-1 x^2 t x^-3")));
        assert_eq!(nf(&p, "t^-1 x t"), w(&p, "t^-1 x t"));
        assert_eq!(nf(&p, "x^5"), w(&p, "x^5"));
        assert_eq!(nf(&p, "x^5 t"), w(&p, "x t x^6"));
        assert_eq!(nf(&p, "t x^2 t^-1"), w(&p, "t x^2 t^-1"));
        assert_eq!(nf(&p, "t x^6 t^-1"), w(&p, "x^4"));
    }

    #[test]
    fn normal_form_handles_negative_parameters() {
        let p = params(-2, 3);
        // t^-1 x^-2 t = x^3 here.
        assert!(bs_word_problem(&p, &w(&p, "t^-1 x^-2 t x^-3")));
        assert!(!bs_word_problem(&p, &w(&p, "t^-1 x^2 t x^-3")));
        // Representatives stay in 0..|m|-1.
        assert_eq!(nf(&p, "x^-1 t"), w(&p, "x t x^3"));
    }

    #[test]
    fn normal_forms_are_unique_on_equal_words() {
        let p = params(2, 3);
        let pairs = [
            ("x^5 t", "x t x^6"),
            ("t^-1 x^4 t", "x^6"),
            ("x^2 t^-1 x^6 t", "x^2 x^9"),
            ("t x^9 t^-1 x", "x^7"),
        ];
        for (a, b) in pairs {
            assert_eq!(
                bs_normal_form(&p, &w(&p, a)),
                bs_normal_form(&p, &w(&p, b)),
                "{a} vs {b}"
            );
        }
    }

    #[test]
    fn closure_membership_by_t_sum() {
        let p = params(2, 3);
        assert_eq!(t_exponent_sum(&w(&p, "x")), 0);
        assert!(in_normal_closure_x(&w(&p, "x")));
        assert_eq!(t_exponent_sum(&w(&p, "t x t")), 2);
        assert!(!in_normal_closure_x(&w(&p, "t x t")));
        assert_eq!(t_exponent_sum(&w(&p, "t^-1 x t x")), 0);
        assert!(in_normal_closure_x(&w(&p, "t^-1 x t x")));
    }

    #[test]
    fn xi_rewriting_examples() {
        let p = params(2, 3);
        assert_eq!(
            to_xi_word(&p, &w(&p, "x")).unwrap().factors(),
            &[(0, Sign::Plus)]
        );
        assert_eq!(
            to_xi_word(&p, &w(&p, "t^-1 x t")).unwrap().factors(),
            &[(1, Sign::Plus)]
        );
        assert_eq!(
            to_xi_word(&p, &w(&p, "x t^-1 x^-1 t")).unwrap().factors(),
            &[(0, Sign::Plus), (1, Sign::Minus)]
        );
        assert_eq!(
            to_xi_word(&p, &w(&p, "t x t")),
            Err(BsError::NotInClosure { t_sum: 2 })
        );
    }

    #[test]
    fn xi_words_reassemble() {
        let p = params(2, 3);
        for s in ["x t^-1 x^2 t x^-1", "t^-1 t^-1 x t t x", "x^3 t^-1 x^-2 t"] {
            let word = w(&p, s);
            let xi = to_xi_word(&p, &word).unwrap();
            assert!(bs_equal(&p, &word, &xi.to_word()), "{s}");
        }
    }

    #[test]
    fn h1_images() {
        let p = params(2, 3);
        let map = H1Map::new(p).unwrap();
        // x_0 -> 1.
        let x0 = XiWord::new(alloc::vec![(0, Sign::Plus)]);
        assert!(map.image(&x0).equals_fraction(&BigInt::one(), &BigInt::one(), &p));
        // x_1 -> n/m = 3/2.
        let x1 = XiWord::new(alloc::vec![(1, Sign::Plus)]);
        assert!(map.image(&x1).equals_fraction(&BigInt::from(3), &BigInt::from(2), &p));
        // x_-1 -> m/n = 2/3.
        let xm1 = XiWord::new(alloc::vec![(-1, Sign::Plus)]);
        assert!(map.image(&xm1).equals_fraction(&BigInt::from(2), &BigInt::from(3), &p));
        // Relator x_1^2 x_0^-3 -> 0.
        let relator = XiWord::new(alloc::vec![
            (1, Sign::Plus),
            (1, Sign::Plus),
            (0, Sign::Minus),
            (0, Sign::Minus),
            (0, Sign::Minus),
        ]);
        assert!(map.image(&relator).is_zero());
    }

    #[test]
    fn h1_rejects_bad_parameters() {
        assert!(matches!(
            h1_image(&params(2, 4), &XiWord::default()),
            Err(BsError::UnsupportedParameters { .. })
        ));
        assert!(matches!(
            h1_image(&params(1, 3), &XiWord::default()),
            Err(BsError::UnsupportedParameters { .. })
        ));
    }

    #[test]
    fn h1_relators_vanish_across_parameter_sets() {
        for (m, n) in [(2, 3), (3, 5), (2, 5), (-2, 3)] {
            // Constructor asserts all relators map to zero.
            let map = H1Map::new(params(m, n)).unwrap();
            let _ = map;
        }
    }

    #[test]
    fn commutators_and_balanced_words_vanish() {
        let p = params(2, 3);
        let commutator = XiWord::new(alloc::vec![
            (0, Sign::Plus),
            (1, Sign::Plus),
            (0, Sign::Minus),
            (1, Sign::Minus),
        ]);
        assert!(commutator_membership(&p, &commutator).unwrap());
        let x0 = XiWord::new(alloc::vec![(0, Sign::Plus)]);
        assert!(!commutator_membership(&p, &x0).unwrap());
        // Conjugated commutator products stay in the kernel.
        let conj = commutator.shift(2).concat(&commutator.inverse().shift(-1));
        assert!(commutator_membership(&p, &conj).unwrap());
        // Per-index balance forces a zero image.
        let balanced = XiWord::new(alloc::vec![
            (2, Sign::Plus),
            (-1, Sign::Minus),
            (2, Sign::Minus),
            (-1, Sign::Plus),
        ]);
        assert!(balanced.index_sums().is_empty());
        assert!(commutator_membership(&p, &balanced).unwrap());
    }

    #[test]
    fn bezout_witness_hits_one_over_m() {
        for (m, n) in [(2, 3), (3, 5), (2, 5), (5, 3)] {
            let p = params(m, n);
            let (w, image) = bezout_one_over_m(&p).unwrap();
            assert!(image.equals_fraction(&BigInt::one(), &BigInt::from(m), &p));
            assert!(!w.is_empty());
        }
    }

    #[test]
    fn mn_rational_canonical_forms() {
        let p = params(2, 3);
        // 6/6 reduces to the integer 1.
        let a = MnRational::canonical(BigInt::from(6), 1, &p.abs_mn());
        assert_eq!(a.denominator_exponent(), 0);
        assert!(a.equals_fraction(&BigInt::one(), &BigInt::one(), &p));
        // 3/6 stays with k = 1.
        let b = MnRational::canonical(BigInt::from(3), 1, &p.abs_mn());
        assert_eq!(b.denominator_exponent(), 1);
        assert!(b.equals_fraction(&BigInt::one(), &BigInt::from(2), &p));
        // Sums cancel exactly.
        let c = b.add(
            &MnRational::canonical(BigInt::from(-3), 1, &p.abs_mn()),
            &p.abs_mn(),
        );
        assert!(c.is_zero());
    }

    #[test]
    fn stabilizing_exponents() {
        let p = params(2, 3);
        let x0 = XiWord::new(alloc::vec![(0, Sign::Plus)]);
        assert_eq!(stabilizing_exponent(&p, &x0), 0);
        let x2 = XiWord::new(alloc::vec![(2, Sign::Plus)]);
        assert_eq!(stabilizing_exponent(&p, &x2), 2);
        let commutator = XiWord::new(alloc::vec![
            (0, Sign::Plus),
            (1, Sign::Plus),
            (0, Sign::Minus),
            (1, Sign::Minus),
        ]);
        assert_eq!(stabilizing_exponent(&p, &commutator), 1);
        assert_eq!(stabilizing_exponent(&p, &XiWord::default()), 0);
    }

    #[test]
    fn conjugation_identity_positive_case() {
        let p = params(2, 3);
        assert!(conjugation_power_identity(&p, 2, 1).unwrap());
        assert!(conjugation_power_identity(&p, 2, 2).unwrap());
        assert!(conjugation_power_identity(&p, 0, 0).unwrap());
        let q = params(3, 2);
        assert!(conjugation_power_identity(&q, 1, 1).unwrap());
        assert!(matches!(
            conjugation_power_identity(&p, 5, 1),
            Err(BsError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn conjugation_identity_negative_m_case() {
        let p = params(-2, 3);
        for (mm, k) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            assert!(
                conjugation_power_identity(&p, mm, k).unwrap(),
                "M={mm} k={k}"
            );
        }
        assert_eq!(
            conjugation_power_identity(&params(2, -3), 1, 1),
            Err(BsError::UnsupportedSignCase)
        );
    }

    #[test]
    fn power_exponents() {
        let p = params(2, 3);
        assert_eq!(power_in_n_exponent(&p, 2, 1).unwrap(), BigInt::from(-18));
        assert_eq!(power_in_n_exponent(&p, 1, 1).unwrap(), BigInt::from(-3));
        assert_eq!(
            power_in_n_exponent(&params(2, 2), 1, 1),
            Err(BsError::EqualModuli)
        );
        assert_eq!(
            power_in_n_exponent(&params(-2, 2), 1, 1),
            Err(BsError::EqualModuli)
        );
        let neg = params(-2, 3);
        // n^M |m|^(M-k) (|m|^k - n^k) with M = k = 1.
        assert_eq!(power_in_n_exponent(&neg, 1, 1).unwrap(), BigInt::from(-3));
    }

    #[test]
    fn presentation_relator_is_trivial_in_the_group() {
        let p = params(2, 3);
        let pres = p.presentation();
        for relator in pres.relators() {
            assert!(bs_word_problem(&p, relator));
        }
    }
}

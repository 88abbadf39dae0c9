//! Exact integer lattice computations: Smith normal form, membership in a
//! cyclic sublattice, and canonical representatives modulo a cyclic
//! sublattice.
//!
//! All arithmetic is arbitrary precision; intermediate entries in a Smith
//! reduction grow quickly even for small inputs. Pivot choice and scan
//! order are fixed so identical inputs always produce identical
//! decompositions.

use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: alloc::vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.at(i, k);
                if lhs.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = lhs * other.at(k, j);
                    *out.at_mut(i, j) += term;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m.at(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                    *m.at_mut(i, j) = num / &prev;
                }
                *m.at_mut(i, k) = BigInt::zero();
            }
            prev = m.at(k, k).clone();
        }
        sign * m.at(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += q * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let term = q * self.at(source, j);
            *self.at_mut(target, j) += term;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let term = q * self.at(i, source);
            *self.at_mut(i, target) += term;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal, nonnegative,
/// each entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.at(i, i).clone())
            .collect()
    }
}

/// Smith normal form. The pivot at each stage is the entry of smallest
/// nonzero absolute value in the remaining submatrix, ties broken by
/// row-major position.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    let bound = a.rows().min(a.cols());
    let mut t = 0;
    while t < bound {
        let Some((pi, pj)) = select_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        clear_cross(&mut d, &mut u, &mut v, t);
        if let Some(bad_row) = first_nondivisible_row(&d, t) {
            // Fold the offending row into the pivot row, then redo the
            // stage; the pivot strictly shrinks toward the submatrix gcd.
            let one = BigInt::one();
            d.add_row_multiple(t, bad_row, &one);
            u.add_row_multiple(t, bad_row, &one);
            continue;
        }
        if d.at(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithDecomposition { u, d, v }
}

fn select_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let val = d.at(i, j).abs();
            if val.is_zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((b, _, _)) => val < *b,
            };
            if better {
                best = Some((val, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Eliminates row `t` and column `t` outside the pivot, re-selecting any
/// smaller remainder as the new pivot until both are clear.
fn clear_cross(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, t: usize) {
    loop {
        let mut changed = false;
        for i in t + 1..d.rows() {
            if d.at(i, t).is_zero() {
                continue;
            }
            let q = -d.at(i, t).div_floor(d.at(t, t));
            d.add_row_multiple(i, t, &q);
            u.add_row_multiple(i, t, &q);
            if !d.at(i, t).is_zero() {
                d.swap_rows(i, t);
                u.swap_rows(i, t);
                changed = true;
            }
        }
        for j in t + 1..d.cols() {
            if d.at(t, j).is_zero() {
                continue;
            }
            let q = -d.at(t, j).div_floor(d.at(t, t));
            d.add_col_multiple(j, t, &q);
            v.add_col_multiple(j, t, &q);
            if !d.at(t, j).is_zero() {
                d.swap_cols(j, t);
                v.swap_cols(j, t);
                changed = true;
            }
        }
        let col_clear = (t + 1..d.rows()).all(|i| d.at(i, t).is_zero());
        let row_clear = (t + 1..d.cols()).all(|j| d.at(t, j).is_zero());
        if !changed && col_clear && row_clear {
            return;
        }
    }
}

fn first_nondivisible_row(d: &IntMatrix, t: usize) -> Option<usize> {
    let pivot = d.at(t, t);
    for i in t + 1..d.rows() {
        for j in t + 1..d.cols() {
            if !d.at(i, j).mod_floor(pivot).is_zero() {
                return Some(i);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    /// The defining vector of a cyclic sublattice is zero.
    DegenerateEdge,
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::DegenerateEdge => {
                write!(f, "zero vector does not span a cyclic sublattice")
            }
            LatticeError::DimensionMismatch { expected, got } => {
                write!(f, "expected vector of length {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// Solves `u = k * v` exactly. `None` means `u` is outside the cyclic
/// sublattice spanned by `v`.
pub fn cyclic_membership(v: &[BigInt], u: &[BigInt]) -> Result<Option<BigInt>, LatticeError> {
    if v.len() != u.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: v.len(),
            got: u.len(),
        });
    }
    let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
        return Err(LatticeError::DegenerateEdge);
    };
    if u.iter().all(Zero::is_zero) {
        return Ok(Some(BigInt::zero()));
    }
    let (k, rem) = u[lead].div_rem(&v[lead]);
    if !rem.is_zero() {
        return Ok(None);
    }
    let fits = v.iter().zip(u).all(|(vi, ui)| vi * &k == *ui);
    Ok(fits.then_some(k))
}

/// gcd of the entries is one.
pub fn is_primitive(v: &[BigInt]) -> bool {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    g.is_one()
}

/// Reduces vectors to canonical representatives modulo the cyclic
/// sublattice spanned by a fixed nonzero vector `v`.
///
/// Construction: a unimodular `w` with `w * v = d * e1`, `d > 0` the content
/// of `v`. The representative of `u` is `u - q * v` where `q` is the floor
/// quotient of the first coordinate of `w * u` by `d`; congruent inputs map
/// to the same output. Build one reducer per `v` and reuse it, the basis
/// change is computed once.
#[derive(Clone, Debug)]
pub struct CosetReducer {
    v: Vec<BigInt>,
    w_row0: Vec<BigInt>,
    d: BigInt,
}

impl CosetReducer {
    pub fn new(v: &[BigInt]) -> Result<CosetReducer, LatticeError> {
        if v.iter().all(Zero::is_zero) {
            return Err(LatticeError::DegenerateEdge);
        }
        let n = v.len();
        let mut w = IntMatrix::identity(n);
        let mut cur = v.to_vec();
        for i in 1..n {
            if cur[i].is_zero() {
                continue;
            }
            let a = cur[0].clone();
            let b = cur[i].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            // Unimodular 2x2 block [[x, y], [-b/g, a/g]] acting on rows 0, i.
            let nb = -&b / &g;
            let pa = &a / &g;
            for j in 0..n {
                let r0 = w.at(0, j).clone();
                let ri = w.at(i, j).clone();
                *w.at_mut(0, j) = &x * &r0 + &y * &ri;
                *w.at_mut(i, j) = &nb * &r0 + &pa * &ri;
            }
            cur[0] = g;
            cur[i] = BigInt::zero();
        }
        if cur[0].is_negative() {
            w.negate_row(0);
            cur[0] = -cur[0].clone();
        }
        debug_assert!(w.is_unimodular());
        Ok(CosetReducer {
            v: v.to_vec(),
            w_row0: w.row(0).to_vec(),
            d: cur[0].clone(),
        })
    }

    pub fn modulus(&self) -> &BigInt {
        &self.d
    }

    /// Canonical representative of `u + <v>`; the result differs from `u`
    /// by an integer multiple of `v`.
    pub fn reduce(&self, u: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if u.len() != self.v.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.v.len(),
                got: u.len(),
            });
        }
        let first: BigInt = self.w_row0.iter().zip(u).map(|(w, x)| w * x).sum();
        let q = first.div_floor(&self.d);
        Ok(u.iter().zip(&self.v).map(|(ui, vi)| ui - &q * vi).collect())
    }

    /// The multiple of `v` separating `u` from its representative:
    /// `u = reduce(u) + offset(u) * v`.
    pub fn offset(&self, u: &[BigInt]) -> Result<BigInt, LatticeError> {
        if u.len() != self.v.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.v.len(),
                got: u.len(),
            });
        }
        let first: BigInt = self.w_row0.iter().zip(u).map(|(w, x)| w * x).sum();
        Ok(first.div_floor(&self.d))
    }
}

/// One-shot form of [`CosetReducer`].
pub fn coset_representative(v: &[BigInt], u: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
    CosetReducer::new(v)?.reduce(u)
}

/// Rank and torsion of the abelian group presented by an integer relation
/// matrix (columns index generators, rows index relations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub rank: usize,
    /// Nontrivial invariant factors in divisibility order.
    pub torsion: Vec<BigInt>,
}

pub fn abelianization_invariants(relations: &IntMatrix) -> AbelianInvariants {
    let snf = smith_normal_form(relations);
    let diag = snf.diagonal();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag
        .iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .cloned()
        .collect();
    AbelianInvariants {
        rank: relations.cols() - nonzero,
        torsion,
    }
}

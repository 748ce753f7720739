//! Exact rational linear algebra.
//!
//! Vectors and matrices over `BigRational`, the Smith normal form of integer
//! matrices, ℤ-bases of finitely generated subgroups of `ℚ^n`, and
//! enumeration of lattice points inside a ball of a positive definite
//! quadratic form. Nothing in this module touches floating point.

#![allow(clippy::needless_range_loop)]

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Parses `"p/q"` or `"p"`, surrounding whitespace allowed.
pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| Error::InvalidInput(format!("`{}` is not a rational number: {e}", text.trim())))
}

/// Parses a bracketed list such as `"[1/2, -3]"`.
pub fn parse_vector(text: &str) -> Result<RationalVector> {
    let inner =
        strip_brackets(text.trim()).ok_or_else(|| Error::InvalidInput(format!("expected `[...]`, got `{text}`")))?;
    if inner.trim().is_empty() {
        return Ok(RationalVector::new(Vec::new()));
    }
    inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>().map(RationalVector::new)
}

/// Parses a bracketed list of vectors such as `"[[1,0],[1/2,1/2]]"`.
pub fn parse_vector_list(text: &str) -> Result<Vec<RationalVector>> {
    let inner = strip_brackets(text.trim())
        .ok_or_else(|| Error::InvalidInput(format!("expected `[[...], ...]`, got `{text}`")))?;
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::InvalidInput(format!("unbalanced brackets in `{text}`")))?;
                if depth == 0 {
                    let s = start.take().expect("opening bracket recorded");
                    out.push(parse_vector(&inner[s..=i])?);
                }
            }
            ',' | ' ' | '\t' | '\n' => {}
            other if depth == 0 => {
                return Err(Error::InvalidInput(format!("unexpected `{other}` in `{text}`")));
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::InvalidInput(format!("unbalanced brackets in `{text}`")));
    }
    Ok(out)
}

fn strip_brackets(text: &str) -> Option<&str> {
    text.strip_prefix('[')?.strip_suffix(']')
}

/// Serde adapter writing rationals as `"p/q"` strings and reading either
/// strings or JSON integers.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        RationalRepr::deserialize(deserializer)?.into_rational().map_err(de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Text(String),
    Integer(i64),
}

impl RationalRepr {
    fn into_rational(self) -> Result<Rational> {
        match self {
            RationalRepr::Text(s) => parse_rational(&s),
            RationalRepr::Integer(n) => Ok(int(n)),
        }
    }
}

/// A point of the torus `t` (or any `ℚ^n` vector), stored exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(len: usize) -> Self {
        RationalVector(vec![Rational::zero(); len])
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn from_bigints(coords: &[BigInt]) -> Self {
        RationalVector(coords.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn unit(len: usize, axis: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[axis] = Rational::one();
        v
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(is_integer)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalVector(self.0.iter().map(|c| c * factor).collect())
    }

    /// Euclidean dot product of coordinates (no Gram form).
    pub fn dot(&self, other: &Self) -> Rational {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Least common multiple of the coordinate denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;

    fn index(&self, index: usize) -> &Rational {
        &self.0[index]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;

    fn add(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), rhs.len(), "dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;

    fn sub(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), rhs.len(), "dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;

    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for c in &self.0 {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<RationalRepr>::deserialize(deserializer)?;
        raw.into_iter()
            .map(RationalRepr::into_rational)
            .collect::<Result<Vec<_>>>()
            .map(RationalVector)
            .map_err(de::Error::custom)
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(RationalMatrix { rows: rows.len(), cols, entries: rows.concat() })
    }

    pub fn from_integer_rows(rows: &[&[i64]]) -> Self {
        let converted: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&converted).expect("integer rows must be rectangular")
    }

    /// Builds an `dim x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, columns: &[RationalVector]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidInput(format!("all columns must have length {dim}")));
        }
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in 0..dim {
                m.entries[i * m.cols + j] = c[i].clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> RationalVector {
        RationalVector(self.entries[row * self.cols..(row + 1) * self.cols].to_vec())
    }

    pub fn column(&self, col: usize) -> RationalVector {
        RationalVector((0..self.rows).map(|i| self.get(i, col).clone()).collect())
    }

    pub fn columns(&self) -> Vec<RationalVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).into_coords()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &RationalVector) -> RationalVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        RationalVector((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum()).collect())
    }

    /// `aᵀ M b`, the bilinear form defined by this (square) matrix.
    pub fn bilinear(&self, a: &RationalVector, b: &RationalVector) -> Rational {
        a.dot(&self.mul_vec(b))
    }

    pub fn quadratic(&self, a: &RationalVector) -> Rational {
        self.bilinear(a, a)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(is_integer)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = m.get(r, j) - &factor * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                let factor = m.get(r, col) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j) - &factor * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// Solves `M x = b`. Returns `None` when the system is inconsistent;
    /// when it is underdetermined the free variables are set to zero.
    pub fn solve(&self, b: &RationalVector) -> Option<RationalVector> {
        assert_eq!(self.rows, b.len(), "dimension mismatch in linear solve");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = RationalVector::zeros(self.cols);
        for (row, &col) in pivots.iter().enumerate() {
            x.0[col] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// `M = L D Lᵀ` with `L` unit lower triangular. `None` unless the matrix is
    /// symmetric positive definite.
    pub fn ldl(&self) -> Option<(Self, Vec<Rational>)> {
        if !self.is_symmetric() {
            return None;
        }
        let n = self.rows;
        let mut l = Self::identity(n);
        let mut d: Vec<Rational> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = self.get(j, j).clone();
            for k in 0..j {
                dj -= l.get(j, k) * l.get(j, k) * &d[k];
            }
            if !dj.is_positive() {
                return None;
            }
            for i in j + 1..n {
                let mut v = self.get(i, j).clone();
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k) * &d[k];
                }
                l.set(i, j, v / &dj);
            }
            d.push(dj);
        }
        Some((l, d))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.ldl().is_some()
    }

    fn to_integer_rows(&self) -> Result<Vec<Vec<BigInt>>> {
        if !self.is_integral() {
            return Err(Error::InvalidInput("matrix has non-integer entries".into()));
        }
        Ok((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_integer()).collect()).collect())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Invariant factors of a finitely generated abelian group `ℤ^cols / rowspan(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    /// Non-unit invariant factors `d_1 | d_2 | ... | d_k`, all `> 1`.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl SmithDecomposition {
    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

impl fmt::Display for SmithDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z_{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// Full Smith form `U M V = D` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Diagonal of `D`, length `min(rows, cols)`, nonnegative, zeros last.
    pub diagonal: Vec<BigInt>,
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
    pub rank: usize,
}

impl SmithForm {
    pub fn decomposition(&self) -> SmithDecomposition {
        SmithDecomposition {
            invariant_factors: self.diagonal[..self.rank].iter().filter(|d| !d.is_one()).cloned().collect(),
            free_rank: self.cols - self.rank,
        }
    }
}

fn int_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form of an integer matrix, with transforms.
///
/// Rows are read as relations, so the presented group is `ℤ^cols / rowspan`.
pub fn smith_form(m: &RationalMatrix) -> Result<SmithForm> {
    let mut a = m.to_integer_rows()?;
    let (rows, cols) = (m.rows(), m.cols());
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);

    let swap_cols = |mat: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for r in mat.iter_mut() {
            r.swap(x, y);
        }
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            // Bring the smallest nonzero entry of row t / column t to the pivot.
            let mut best = (t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
                u.swap(t, best.0);
            } else if best.1 != t {
                swap_cols(&mut a, t, best.1);
                swap_cols(&mut v, t, best.1);
            }

            let p = a[t][t].clone();
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &p;
                for j in 0..cols {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
                for j in 0..rows {
                    let delta = &q * &u[t][j];
                    u[i][j] -= delta;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &p;
                for i in 0..rows {
                    let delta = &q * &a[i][t];
                    a[i][j] -= delta;
                }
                for i in 0..cols {
                    let delta = &q * &v[i][t];
                    v[i][j] -= delta;
                }
            }

            let cleared = (t + 1..rows).all(|i| a[i][t].is_zero()) && (t + 1..cols).all(|j| a[t][j].is_zero());
            if !cleared {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &p).is_zero()));
            match offender {
                Some(i) => {
                    for j in 0..cols {
                        let x = a[i][j].clone();
                        a[t][j] += x;
                    }
                    for j in 0..rows {
                        let x = u[i][j].clone();
                        u[t][j] += x;
                    }
                }
                None => break,
            }
        }

        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }

    let diagonal = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
    Ok(SmithForm { rows, cols, diagonal, left: u, right: v, rank: t })
}

/// Invariant factors (units dropped) and free rank of `ℤ^cols / rowspan(m)`.
pub fn smith_normal_form(m: &RationalMatrix) -> Result<SmithDecomposition> {
    Ok(smith_form(m)?.decomposition())
}

/// A ℤ-basis (as matrix columns) of the subgroup of `ℚ^dim` generated by `generators`.
///
/// The basis is the Hermite normal form of the generator rows, so two
/// generating sets of the same subgroup produce the same basis.
pub fn integer_span_basis(dim: usize, generators: &[RationalVector]) -> Result<RationalMatrix> {
    if generators.iter().any(|g| g.len() != dim) {
        return Err(Error::InvalidInput(format!("generators must have length {dim}")));
    }
    let denom = generators.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.common_denominator()));
    let scale = Rational::from_integer(denom.clone());
    let mut rows: Vec<Vec<BigInt>> =
        generators.iter().map(|g| g.coords().iter().map(|c| (c * &scale).to_integer()).collect()).collect();

    let mut cur = 0;
    for col in 0..dim {
        loop {
            let pivot = (cur..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()));
            let Some(p) = pivot else { break };
            rows.swap(cur, p);
            let mut done = true;
            for r in cur + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = &rows[r][col] / &rows[cur][col];
                for j in 0..dim {
                    let delta = &q * &rows[cur][j];
                    rows[r][j] -= delta;
                }
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if cur < rows.len() && !rows[cur][col].is_zero() {
            if rows[cur][col].is_negative() {
                for x in rows[cur].iter_mut() {
                    *x = -x.clone();
                }
            }
            for r in 0..cur {
                let q = rows[r][col].div_floor(&rows[cur][col]);
                if q.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    let delta = &q * &rows[cur][j];
                    rows[r][j] -= delta;
                }
            }
            cur += 1;
        }
    }
    rows.truncate(cur);
    let columns: Vec<RationalVector> = rows
        .iter()
        .map(|r| RationalVector(r.iter().map(|x| Rational::new(x.clone(), denom.clone())).collect()))
        .collect();
    RationalMatrix::from_columns(dim, &columns)
}

/// Integer vectors `n` with `|center + basis·n|² ≤ radius_squared` (`<` when
/// `strict`), the norm taken in `gram`. Output is sorted lexicographically.
///
/// `basis` may have fewer columns than rows but must have full column rank.
pub fn enumerate_lattice_points_in_ball(
    basis: &RationalMatrix,
    gram: &RationalMatrix,
    center: &RationalVector,
    radius_squared: &Rational,
    strict: bool,
) -> Result<Vec<Vec<BigInt>>> {
    let dim = basis.rows();
    if gram.rows() != dim || gram.cols() != dim || center.len() != dim {
        return Err(Error::InvalidInput("basis, gram and center dimensions disagree".into()));
    }
    let k = basis.cols();
    let form = basis.transpose().mul(&gram.mul(basis));
    let Some((l, d)) = form.ldl() else {
        return Err(Error::InvalidInput("lattice basis is rank-deficient".into()));
    };

    // |c + Bn|² = (n - t)ᵀ Q (n - t) + offset, where t minimizes the left side over ℝ^k.
    let linear = basis.transpose().mul_vec(&gram.mul_vec(center));
    let target = if k == 0 {
        RationalVector::zeros(0)
    } else {
        -&form.solve(&linear).expect("positive definite form is invertible")
    };
    let offset = gram.quadratic(center) - form.quadratic(&target);
    let budget = radius_squared - offset;
    let fits = |value: &Rational, total: bool| if strict && total { value < &budget } else { value <= &budget };

    let mut out = Vec::new();
    if k == 0 {
        if fits(&Rational::zero(), true) {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    if budget.is_negative() {
        return Ok(out);
    }

    let mut current = vec![BigInt::zero(); k];
    let search = BallSearch { l: &l, d: &d, target: &target, fits: &fits };
    search.descend(k - 1, &Rational::zero(), &mut current, &mut out);
    out.sort();
    Ok(out)
}

struct BallSearch<'a, F: Fn(&Rational, bool) -> bool> {
    l: &'a RationalMatrix,
    d: &'a [Rational],
    target: &'a RationalVector,
    fits: &'a F,
}

impl<F: Fn(&Rational, bool) -> bool> BallSearch<'_, F> {
    fn descend(&self, level: usize, partial: &Rational, current: &mut [BigInt], out: &mut Vec<Vec<BigInt>>) {
        let k = current.len();
        let mut center = self.target[level].clone();
        for j in level + 1..k {
            center -= self.l.get(j, level) * (Rational::from_integer(current[j].clone()) - &self.target[j]);
        }
        let cost = |n: &BigInt| {
            let diff = Rational::from_integer(n.clone()) - &center;
            partial + &self.d[level] * &diff * &diff
        };
        let last = level == 0;
        let floor = center.floor().to_integer();

        let mut candidates = Vec::new();
        let mut n = floor.clone();
        while (self.fits)(&cost(&n), false) {
            candidates.push(n.clone());
            n -= 1;
        }
        candidates.reverse();
        let mut n = floor + 1;
        while (self.fits)(&cost(&n), false) {
            candidates.push(n.clone());
            n += 1;
        }

        for n in candidates {
            let total = cost(&n);
            current[level] = n;
            if last {
                if (self.fits)(&total, true) {
                    out.push(current.to_vec());
                }
            } else {
                self.descend(level - 1, &total, current, out);
            }
        }
        current[level] = BigInt::zero();
    }
}

/// Integer coordinates of `v` in the lattice spanned by the columns of
/// `basis`, or `None` when `v` is not a lattice vector.
pub fn solve_in_lattice(basis: &RationalMatrix, v: &RationalVector) -> Result<Option<Vec<BigInt>>> {
    if basis.rows() != v.len() {
        return Err(Error::InvalidInput("vector length does not match lattice dimension".into()));
    }
    if basis.rank() != basis.cols() {
        return Err(Error::InvalidInput("lattice basis is rank-deficient".into()));
    }
    Ok(basis.solve(v).filter(RationalVector::is_integral).map(|x| x.coords().iter().map(|c| c.to_integer()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_of_grassmannian_relations_is_z2() {
        let m = RationalMatrix::from_integer_rows(&[&[1, 1], &[-1, 1]]);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.invariant_factors, bigs(&[2]));
        assert_eq!(snf.free_rank, 0);
    }

    #[test]
    fn snf_of_identity_and_empty() {
        let snf = smith_normal_form(&RationalMatrix::identity(2)).unwrap();
        assert!(snf.invariant_factors.is_empty());
        assert_eq!(snf.free_rank, 0);

        let empty = RationalMatrix::zeros(0, 2);
        let snf = smith_normal_form(&empty).unwrap();
        assert!(snf.invariant_factors.is_empty());
        assert_eq!(snf.free_rank, 2);
    }

    #[test]
    fn snf_rejects_fractions() {
        let m = RationalMatrix::from_rows(&[vec![rat(1, 2)]]).unwrap();
        assert!(matches!(smith_normal_form(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn snf_transforms_reproduce_diagonal() {
        let m = RationalMatrix::from_integer_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let form = smith_form(&m).unwrap();
        assert_eq!(form.diagonal, bigs(&[2, 6, 12]));
        let a = m.to_integer_rows().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = BigInt::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        s += &form.left[i][k] * &a[k][l] * &form.right[l][j];
                    }
                }
                let expected = if i == j { form.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(s, expected);
            }
        }
    }

    #[test]
    fn ball_around_square_center() {
        let id = RationalMatrix::identity(2);
        let center = RationalVector::new(vec![rat(1, 2), rat(1, 2)]);
        let pts = enumerate_lattice_points_in_ball(&id, &id, &center, &rat(1, 2), false).unwrap();
        assert_eq!(pts, vec![bigs(&[-1, -1]), bigs(&[-1, 0]), bigs(&[0, -1]), bigs(&[0, 0])]);
        let strict = enumerate_lattice_points_in_ball(&id, &id, &center, &rat(1, 2), true).unwrap();
        assert!(strict.is_empty());
    }

    #[test]
    fn ball_of_radius_zero() {
        let id = RationalMatrix::identity(3);
        let pts = enumerate_lattice_points_in_ball(&id, &id, &RationalVector::zeros(3), &int(0), false).unwrap();
        assert_eq!(pts, vec![bigs(&[0, 0, 0])]);
    }

    #[test]
    fn ball_in_rank_one() {
        let id = RationalMatrix::identity(1);
        let pts = enumerate_lattice_points_in_ball(&id, &id, &RationalVector::zeros(1), &int(4), false).unwrap();
        // brute force over the box [-2, 2]
        let expected: Vec<Vec<BigInt>> = (-2i64..=2).filter(|n| n * n <= 4).map(|n| bigs(&[n])).collect();
        assert_eq!(pts, expected);
    }

    #[test]
    fn ball_rejects_dependent_columns() {
        let basis = RationalMatrix::from_integer_rows(&[&[1, 2], &[1, 2]]);
        let err = enumerate_lattice_points_in_ball(
            &basis,
            &RationalMatrix::identity(2),
            &RationalVector::zeros(2),
            &int(1),
            false,
        );
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn ball_with_fewer_generators_than_dimension() {
        // The line spanned by (1,1) inside ℚ²; center off the line.
        let basis = RationalMatrix::from_integer_rows(&[&[1], &[1]]);
        let center = RationalVector::new(vec![rat(1, 2), int(0)]);
        let pts =
            enumerate_lattice_points_in_ball(&basis, &RationalMatrix::identity(2), &center, &rat(1, 4), false).unwrap();
        // |(1/2 + n, n)|² = 1/4 + n + 2n²  ≤ 1/4  ⇔  n ∈ {0} ∪ [-1/2, 0]
        assert_eq!(pts, vec![bigs(&[0])]);
    }

    #[test]
    fn solving_in_lattices() {
        let id = RationalMatrix::identity(2);
        assert_eq!(solve_in_lattice(&id, &RationalVector::from_integers(&[1, -1])).unwrap(), Some(bigs(&[1, -1])));

        let gamma0 = RationalMatrix::from_columns(
            2,
            &[RationalVector::from_integers(&[1, -1]), RationalVector::from_integers(&[1, 1])],
        )
        .unwrap();
        assert_eq!(solve_in_lattice(&gamma0, &RationalVector::from_integers(&[1, 0])).unwrap(), None);
        assert_eq!(solve_in_lattice(&gamma0, &RationalVector::from_integers(&[2, 0])).unwrap(), Some(bigs(&[1, 1])));

        let degenerate = RationalMatrix::from_integer_rows(&[&[1, 2], &[1, 2]]);
        assert!(solve_in_lattice(&degenerate, &RationalVector::zeros(2)).is_err());
    }

    #[test]
    fn span_basis_is_canonical() {
        let a =
            integer_span_basis(2, &[RationalVector::from_integers(&[1, -1]), RationalVector::from_integers(&[1, 1])])
                .unwrap();
        let b = integer_span_basis(
            2,
            &[
                RationalVector::from_integers(&[2, 0]),
                RationalVector::from_integers(&[1, 1]),
                RationalVector::from_integers(&[0, 2]),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.determinant().abs(), int(2));
    }

    #[test]
    fn parsing_vectors() {
        assert_eq!(parse_vector("[1/2, -3]").unwrap(), RationalVector::new(vec![rat(1, 2), int(-3)]));
        assert_eq!(parse_vector("[]").unwrap().len(), 0);
        assert!(parse_vector("1/2").is_err());
        assert!(parse_vector("[1/0]").is_err());
        let list = parse_vector_list("[[1,0], [1/2,1/2]]").unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list[1], RationalVector::new(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn rationals_serialize_as_strings() {
        let v = RationalVector::new(vec![rat(1, 2), int(3), rat(-2, 4)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","3","-1/2"]"#);
        let back: RationalVector = serde_json::from_str(r#"["1/2", 3, "-1/2"]"#).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = RationalMatrix::from_integer_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), int(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RationalMatrix::identity(2));
        assert!(RationalMatrix::from_integer_rows(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}

//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here is exact: ranks come from a Hermite-style echelon form,
//! determinants from Bareiss elimination, and span membership is decided by
//! comparing ranks rather than by any floating point test.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vector length {found} does not match ambient rank {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("span {index} has full rank {rank}; no vector avoids it")]
    FullRankSpan { index: usize, rank: usize },
    #[error("ambient rank must be positive")]
    ZeroRank,
}

/// An integer vector of fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn unit(len: usize, axis: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[axis] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Max-norm.
    pub fn max_norm(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn dot(&self, other: &[BigInt]) -> BigInt {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Appends one coordinate.
    pub fn extended(&self, last: BigInt) -> IntVector {
        let mut entries = self.0.clone();
        entries.push(last);
        IntVector(entries)
    }

    pub fn scaled(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }
}

impl std::ops::Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }
}

impl std::ops::Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v.into_iter().map(BigInt::from).collect())
    }
}

impl<const N: usize> From<[i64; N]> for IntVector {
    fn from(v: [i64; N]) -> Self {
        IntVector(v.into_iter().map(BigInt::from).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

// Vectors travel as plain JSON integer arrays; entries outside the i64 range
// are still written as bare integers.
impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let numbers: Vec<serde_json::Number> = self
            .0
            .iter()
            .map(|x| x.to_string().parse().expect("integer literal is a JSON number"))
            .collect();
        numbers.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let numbers = Vec::<serde_json::Number>::deserialize(deserializer)?;
        numbers
            .iter()
            .map(|n| {
                n.to_string()
                    .parse::<BigInt>()
                    .map_err(|_| D::Error::custom(format!("expected an integer, found {n}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(IntVector)
    }
}

/// Serializes a single integer as a bare JSON number.
pub fn serialize_int<S: Serializer>(x: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    let n: serde_json::Number = x.to_string().parse().expect("integer literal is a JSON number");
    n.serialize(serializer)
}

fn check_lengths(vectors: &[IntVector], expected: usize) -> Result<(), LatticeError> {
    match vectors.iter().find(|v| v.len() != expected) {
        Some(v) => Err(LatticeError::LengthMismatch {
            expected,
            found: v.len(),
        }),
        None => Ok(()),
    }
}

/// Row echelon form in Hermite normal form: pivots positive, entries above a
/// pivot reduced into `[0, pivot)`, zero rows dropped. The result is the
/// canonical basis of the lattice spanned by `rows`.
pub fn hermite_rows(rows: &[IntVector]) -> Vec<IntVector> {
    let Some(width) = rows.first().map(IntVector::len) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut pivot_row = 0;
    for col in 0..width {
        if pivot_row == m.len() {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let best = (pivot_row..m.len())
                .filter(|&r| !m[r][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][col].is_zero() {
                    continue;
                }
                let q = m[r][col].div_floor(&m[pivot_row][col]);
                let (head, tail) = m.split_at_mut(r);
                for (x, p) in tail[0].iter_mut().zip(&head[pivot_row]) {
                    *x -= &q * p;
                }
                if !m[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col].is_zero() {
            continue;
        }
        if m[pivot_row][col].is_negative() {
            for x in m[pivot_row].iter_mut() {
                *x = -&*x;
            }
        }
        for r in 0..pivot_row {
            let q = m[r][col].div_floor(&m[pivot_row][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = m.split_at_mut(pivot_row);
            for (x, p) in head[r].iter_mut().zip(&tail[0]) {
                *x -= &q * p;
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m.into_iter().map(IntVector).collect()
}

/// Rank over the rationals (equivalently over the integers).
pub fn rank(vectors: &[IntVector]) -> Result<usize, LatticeError> {
    if let Some(first) = vectors.first() {
        check_lengths(vectors, first.len())?;
    }
    Ok(hermite_rows(vectors).len())
}

pub fn is_independent(vectors: &[IntVector]) -> Result<bool, LatticeError> {
    Ok(rank(vectors)? == vectors.len())
}

/// Determinant of the square matrix whose columns are `columns`.
pub fn det(columns: &[IntVector]) -> Result<BigInt, LatticeError> {
    let n = columns.len();
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(LatticeError::NotSquare { rows: c.len(), cols: n });
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    // Bareiss on the transpose; det is transpose invariant.
    let mut m: Vec<Vec<BigInt>> = columns.iter().map(|c| c.0.clone()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(sign * &m[n - 1][n - 1])
}

/// Adjugate of the matrix with the given columns, returned as rows.
/// For columns `c_0..c_{n-1}` forming `A`, row `i` of the result is row `i`
/// of `adj(A)`, so that `adj(A) * A = det(A) * I`.
pub fn adjugate(columns: &[IntVector]) -> Result<Vec<IntVector>, LatticeError> {
    let n = columns.len();
    det(columns)?;
    if n == 1 {
        return Ok(vec![IntVector::from([1])]);
    }
    // a[r][c] = columns[c][r]
    let entry = |r: usize, c: usize| &columns[c].0[r];
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            // adj[i][j] = (-1)^(i+j) * minor(j, i)
            let minor_cols: Vec<IntVector> = (0..n)
                .filter(|&c| c != i)
                .map(|c| IntVector((0..n).filter(|&r| r != j).map(|r| entry(r, c).clone()).collect()))
                .collect();
            let m = det(&minor_cols)?;
            row.push(if (i + j) % 2 == 0 { m } else { -m });
        }
        rows.push(IntVector(row));
    }
    Ok(rows)
}

pub fn is_primitive(v: &IntVector) -> bool {
    let g = v.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    g.is_one()
}

/// A sublattice of `Z^n`, stored by its canonical echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: Vec<IntVector>,
}

impl Sublattice {
    pub fn new(generators: &[IntVector], ambient_rank: usize) -> Result<Self, LatticeError> {
        check_lengths(generators, ambient_rank)?;
        Ok(Sublattice {
            ambient_rank,
            basis: hermite_rows(generators),
        })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    fn check(&self, v: &IntVector) -> Result<(), LatticeError> {
        check_lengths(std::slice::from_ref(v), self.ambient_rank)
    }

    /// Integral membership.
    pub fn contains(&self, v: &IntVector) -> Result<bool, LatticeError> {
        self.check(v)?;
        let mut rest = v.0.clone();
        for row in &self.basis {
            let pivot = row.0.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            if rest[..pivot].iter().any(|x| !x.is_zero()) {
                return Ok(false);
            }
            let (q, r) = rest[pivot].div_rem(&row.0[pivot]);
            if !r.is_zero() {
                return Ok(false);
            }
            for (x, b) in rest.iter_mut().zip(&row.0) {
                *x -= &q * b;
            }
        }
        Ok(rest.iter().all(Zero::is_zero))
    }

    /// Membership in the saturation `(L ⊗ Q) ∩ Z^n`.
    pub fn rational_span_contains(&self, v: &IntVector) -> Result<bool, LatticeError> {
        self.check(v)?;
        if v.is_zero() {
            return Ok(true);
        }
        let mut gens = self.basis.clone();
        gens.push(v.clone());
        Ok(hermite_rows(&gens).len() == self.rank())
    }
}

/// Integer vectors of max-norm exactly `radius`, in lexicographic order.
pub fn shell(n: usize, radius: u64) -> Vec<IntVector> {
    let r = radius as i64;
    let mut out = Vec::new();
    let mut cur = vec![-r; n];
    loop {
        if cur.iter().any(|x| x.abs() == r) {
            out.push(IntVector::from(cur.clone()));
        }
        // odometer increment, last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < r {
                cur[i] += 1;
                for x in cur.iter_mut().skip(i + 1) {
                    *x = -r;
                }
                break;
            }
        }
    }
}

/// The least primitive vector, ordered by max-norm and then lexicographically,
/// that lies outside the rational span of every given sublattice.
pub fn find_avoiding_vector(spans: &[Sublattice], n: usize) -> Result<IntVector, LatticeError> {
    if n == 0 {
        return Err(LatticeError::ZeroRank);
    }
    for (index, s) in spans.iter().enumerate() {
        if s.ambient_rank() != n {
            return Err(LatticeError::LengthMismatch {
                expected: n,
                found: s.ambient_rank(),
            });
        }
        if s.rank() >= n {
            return Err(LatticeError::FullRankSpan { index, rank: s.rank() });
        }
    }
    let avoids = |v: &IntVector| {
        is_primitive(v)
            && spans
                .iter()
                .all(|s| !s.rational_span_contains(v).expect("lengths checked"))
    };
    let mut radius = 1;
    loop {
        // find_first keeps the sequential answer regardless of thread count
        if let Some(v) = shell(n, radius).into_par_iter().find_first(avoids) {
            return Ok(v);
        }
        radius += 1;
    }
}

//! Exact rational matrices and full-rank integer lattices.
//!
//! Lattices are stored in column-style Hermite normal form: the basis
//! vectors are the columns of an upper-triangular matrix with positive
//! diagonal whose above-diagonal entries are reduced modulo the diagonal
//! entry of their row. Two lattices are equal iff their bases are equal.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_poly::{IntPolynomial, RatPolynomial};
use crate::numeric::{self, Scalar};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatVector = Vec<BigRational>;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be square: {n} rows but a row of length {}",
                bad.len()
            )));
        }
        Ok(RatMatrix { rows })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
        .expect("square input")
    }

    pub fn from_int(rows: &IntMatrix) -> Self {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|v| BigRational::from_integer(v.clone()))
                        .collect()
                })
                .collect(),
        )
        .expect("square input")
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = BigRational::one();
        }
        RatMatrix { rows }
    }

    pub fn zero(n: usize) -> Self {
        RatMatrix {
            rows: vec![vec![BigRational::zero(); n]; n],
        }
    }

    pub fn diagonal(entries: &[BigRational]) -> Self {
        let mut m = Self::zero(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.rows[i][i] = e.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn is_integer(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_integer())
    }

    pub fn to_int(&self) -> Result<IntMatrix> {
        if !self.is_integer() {
            return Err(Error::WrongDomain("matrix has non-integer entries".into()));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_integer()).collect())
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        RatMatrix {
            rows: (0..n)
                .map(|j| (0..n).map(|i| self.rows[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.dim();
        let mut out = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * &other.rows[k][j];
                }
            }
        }
        RatMatrix { rows: out }
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        RatMatrix {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> RatMatrix {
        RatMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x * k).collect())
                .collect(),
        }
    }

    pub fn pow(&self, k: usize) -> RatMatrix {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn apply(&self, v: &[BigRational]) -> RatVector {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim()).map(|i| self.rows[i][i].clone()).sum()
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &RatMatrix) -> RatMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = Self::zero(a + b);
        for i in 0..a {
            for j in 0..a {
                m.rows[i][j] = self.rows[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                m.rows[a + i][a + j] = other.rows[i][j].clone();
            }
        }
        m
    }

    pub fn det(&self) -> BigRational {
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] / &p;
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
        det
    }

    /// Evaluates an integer polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &IntPolynomial) -> RatMatrix {
        let n = self.dim();
        let mut acc = Self::zero(n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            let c = BigRational::from_integer(c.clone());
            for i in 0..n {
                acc.rows[i][i] += &c;
            }
        }
        acc
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix{self}")
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(numeric::format_rational).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: Vec<Vec<T>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(numeric::format_rational).collect::<Vec<_>>())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<Scalar>::deserialize(d)?;
        let rows = repr
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(Scalar::to_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::new(rows).map_err(serde::de::Error::custom)
    }
}

/// `det(tI − A)` by the Faddeev–LeVerrier recursion over ℚ.
pub fn char_poly(a: &RatMatrix) -> RatPolynomial {
    let n = a.dim();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = RatMatrix::zero(n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        m = a.mul(&m);
        for i in 0..n {
            m.rows[i][i] += &coeffs[n - k + 1];
        }
        let tr = a.mul(&m).trace();
        coeffs[n - k] = -tr / rat(k as i64);
    }
    RatPolynomial::new(coeffs)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &RatMatrix) -> usize {
    let mut rows = a.rows.clone();
    rref(&mut rows).len()
}

/// Basis of the rational kernel `{x : A x = 0}`.
pub fn kernel_subspace(a: &RatMatrix) -> Vec<RatVector> {
    kernel_of_rows(a.rows.clone(), a.dim())
}

fn kernel_of_rows(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<RatVector> {
    let pivots = rref(&mut rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Basis (in reduced echelon form) of the span of `vectors`.
pub fn span_basis(vectors: &[RatVector], n: usize) -> Vec<RatVector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut rows = vectors.to_vec();
    let k = rref(&mut rows).len();
    rows.truncate(k);
    let _ = n;
    rows
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[RatVector], v: &[BigRational]) -> bool {
    let mut rows = basis.to_vec();
    let before = rref(&mut rows).len();
    rows.push(v.to_vec());
    rref(&mut rows).len() == before
}

/// Matrix of `A` restricted to the invariant subspace spanned by `basis`
/// (coordinates with respect to `basis`). Fails if the span is not invariant.
pub fn restrict(a: &RatMatrix, basis: &[RatVector]) -> Result<RatMatrix> {
    let k = basis.len();
    let n = a.dim();
    let mut cols = Vec::with_capacity(k);
    for v in basis {
        let image = a.apply(v);
        // solve Σ c_j basis_j = image
        let mut rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut r: Vec<BigRational> = basis.iter().map(|b| b[i].clone()).collect();
                r.push(image[i].clone());
                r
            })
            .collect();
        let pivots = rref(&mut rows);
        if pivots.contains(&k) {
            return Err(Error::InvalidInput("subspace is not invariant".into()));
        }
        let mut c = vec![BigRational::zero(); k];
        for (r, &pc) in pivots.iter().enumerate() {
            c[pc] = rows[r][k].clone();
        }
        cols.push(c);
    }
    RatMatrix::new(
        (0..k)
            .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
            .collect(),
    )
}

pub fn int_mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            let x = &a[i][k];
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * &b[k][j];
            }
        }
    }
    out
}

pub fn int_mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn det_integer(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Adjugate of an integer matrix, via exact rational inverse times det.
pub fn adjugate(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let d = det_integer(a);
    if d.is_zero() {
        // cofactor expansion for singular input
        let mut adj = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: IntMatrix = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != i)
                            .map(|c| a[r][c].clone())
                            .collect()
                    })
                    .collect();
                let cof = det_integer(&minor);
                adj[i][j] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        return adj;
    }
    let inv = inverse_rat(&RatMatrix::from_int(a)).expect("nonsingular");
    let dr = BigRational::from_integer(d);
    inv.rows
        .iter()
        .map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect())
        .collect()
}

pub fn inverse_rat(a: &RatMatrix) -> Result<RatMatrix> {
    let n = a.dim();
    let mut rows: Vec<Vec<BigRational>> = a
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::SingularMap);
    }
    RatMatrix::new(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Extended gcd column operation on columns `a`, `b` of `m` (and of the
/// optional transform `u`) that leaves `gcd` in row `row` of column `a`
/// and zero in column `b`.
fn gcd_columns(m: &mut IntMatrix, u: &mut Option<&mut IntMatrix>, row: usize, a: usize, b: usize) {
    let x = m[row][a].clone();
    let y = m[row][b].clone();
    if y.is_zero() {
        return;
    }
    let eg = x.extended_gcd(&y);
    let (g, s, t) = (eg.gcd, eg.x, eg.y);
    let xg = &x / &g;
    let yg = &y / &g;
    let apply = |mat: &mut IntMatrix| {
        for r in mat.iter_mut() {
            let ca = r[a].clone();
            let cb = r[b].clone();
            r[a] = &s * &ca + &t * &cb;
            r[b] = &xg * &cb - &yg * &ca;
        }
    };
    apply(m);
    if let Some(u) = u.as_deref_mut() {
        apply(u);
    }
}

/// Column echelon form by unimodular column operations, processing rows in
/// `row_order`. Returns the pivot column of each processed row (or `None`);
/// columns that never become pivots end up zero.
fn column_echelon(
    m: &mut IntMatrix,
    mut u: Option<&mut IntMatrix>,
    row_order: &[usize],
) -> Vec<Option<usize>> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut active: Vec<usize> = (0..ncols).collect();
    let mut pivots = Vec::with_capacity(row_order.len());
    for &row in row_order {
        let nonzero: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&c| !m[row][c].is_zero())
            .collect();
        let Some(&first) = nonzero.iter().min_by_key(|&&c| m[row][c].abs()) else {
            pivots.push(None);
            continue;
        };
        for &c in &nonzero {
            if c != first {
                gcd_columns(m, &mut u, row, first, c);
            }
        }
        active.retain(|&c| c != first);
        pivots.push(Some(first));
    }
    pivots
}

/// Basis of the integer kernel `{x ∈ ℤᶜ : M x = 0}` of an `r × c` matrix.
pub fn integer_kernel(m: &IntMatrix, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut work = m.clone();
    let mut u: IntMatrix = (0..ncols)
        .map(|i| {
            (0..ncols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let order: Vec<usize> = (0..work.len()).collect();
    let pivots = column_echelon(&mut work, Some(&mut u), &order);
    let used: Vec<usize> = pivots.into_iter().flatten().collect();
    (0..ncols)
        .filter(|c| !used.contains(c))
        .map(|c| u.iter().map(|r| r[c].clone()).collect())
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    /// Upper-triangular HNF basis; `basis[i][j]` is row `i` of column `j`.
    basis: IntMatrix,
}

impl Lattice {
    pub fn standard(n: usize) -> Self {
        Lattice {
            basis: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                BigInt::one()
                            } else {
                                BigInt::zero()
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// `k·ℤⁿ`.
    pub fn scaled(n: usize, k: &BigInt) -> Self {
        let mut l = Self::standard(n);
        for i in 0..n {
            l.basis[i][i] = k.abs();
        }
        l
    }

    /// HNF of the lattice spanned by `columns` (each a vector of length `n`).
    pub fn from_columns(n: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in dimension {n}",
                c.len()
            )));
        }
        let mut m: IntMatrix = (0..n)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        let order: Vec<usize> = (0..n).rev().collect();
        let pivots = column_echelon(&mut m, None, &order);
        if pivots.iter().any(Option::is_none) {
            return Err(Error::RankDeficient);
        }
        // pivots[k] belongs to row n−1−k
        let mut basis = vec![vec![BigInt::zero(); n]; n];
        for (k, p) in pivots.iter().enumerate() {
            let row = n - 1 - k;
            let col = p.expect("checked");
            let sign = if m[row][col].is_negative() { -1 } else { 1 };
            for i in 0..n {
                basis[i][row] = &m[i][col] * sign;
            }
        }
        for j in 0..n {
            for i in (0..j).rev() {
                let q = basis[i][j].div_floor(&basis[i][i]);
                if q.is_zero() {
                    continue;
                }
                for r in 0..=i {
                    let t = &q * &basis[r][i];
                    basis[r][j] -= t;
                }
            }
        }
        Ok(Lattice { basis })
    }

    pub fn from_i64_columns(columns: &[Vec<i64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let cols: Vec<Vec<BigInt>> = columns
            .iter()
            .map(|c| c.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::from_columns(n, &cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.basis[i][j].clone()).collect())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.dim()).map(|i| self.basis[i][i].clone()).collect()
    }

    /// `[ℤⁿ : L]`.
    pub fn index(&self) -> BigInt {
        self.diagonal().iter().product()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let n = self.dim();
        let mut w = v.to_vec();
        for i in (0..n).rev() {
            let (q, r) = w[i].div_rem(&self.basis[i][i]);
            if !r.is_zero() {
                return false;
            }
            if q.is_zero() {
                continue;
            }
            for r in 0..=i {
                let t = &q * &self.basis[r][i];
                w[r] -= t;
            }
        }
        true
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.columns().iter().all(|c| self.contains(c))
    }

    /// Order of `v` in `ℤⁿ / L`.
    pub fn order_of(&self, v: &[BigInt]) -> BigInt {
        // back-substitute B x = v over ℚ; the order is the lcm of denominators
        let n = self.dim();
        let mut x = vec![BigRational::zero(); n];
        for i in (0..n).rev() {
            let mut acc = BigRational::from_integer(v[i].clone());
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                acc -= BigRational::from_integer(self.basis[i][j].clone()) * xj;
            }
            x[i] = acc / BigRational::from_integer(self.basis[i][i].clone());
        }
        x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    /// Exponent of the finite group `ℤⁿ / L`: the least `e > 0` with
    /// `e·ℤⁿ ⊆ L`.
    pub fn exponent(&self) -> BigInt {
        let n = self.dim();
        (0..n).fold(BigInt::one(), |acc, j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            acc.lcm(&self.order_of(&e))
        })
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "lattices in dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        // L1 ∩ L2 = B1 · {v : B1 v ∈ L2}
        let pre = preimage_int(&self.basis, other)?;
        let cols: Vec<Vec<BigInt>> = pre
            .columns()
            .iter()
            .map(|c| int_mat_vec(&self.basis, c))
            .collect();
        Lattice::from_columns(self.dim(), &cols)
    }

    /// Image `A·L` for a nonsingular integer `A`.
    pub fn image(&self, a: &IntMatrix) -> Result<Lattice> {
        let cols: Vec<Vec<BigInt>> = self.columns().iter().map(|c| int_mat_vec(a, c)).collect();
        Lattice::from_columns(self.dim(), &cols)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        let mut cols = self.columns();
        cols.extend(other.columns());
        Lattice::from_columns(self.dim(), &cols)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.basis)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .columns()
            .iter()
            .map(|c| {
                let cells: Vec<String> = c.iter().map(ToString::to_string).collect();
                format!("({})", cells.join(", "))
            })
            .collect();
        write!(f, "⟨{}⟩", cols.join(", "))
    }
}

#[derive(Deserialize)]
struct LatticeIn {
    generators: Vec<Vec<Scalar>>,
}

#[derive(Serialize)]
struct LatticeOut {
    generators: Vec<Vec<String>>,
    index: String,
}

impl Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeOut {
            generators: self
                .columns()
                .iter()
                .map(|c| c.iter().map(ToString::to_string).collect())
                .collect(),
            index: self.index().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeIn::deserialize(d)?;
        let cols = repr
            .generators
            .iter()
            .map(|c| c.iter().map(Scalar::to_int).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let n = cols.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(serde::de::Error::custom(
                "lattice needs at least one generator",
            ));
        }
        Lattice::from_columns(n, &cols).map_err(serde::de::Error::custom)
    }
}

pub fn hnf(n: usize, columns: &[Vec<BigInt>]) -> Result<Lattice> {
    Lattice::from_columns(n, columns)
}

/// `{v ∈ ℤⁿ : A v ∈ L}` for any integer `A` (singular allowed).
fn preimage_int(a: &IntMatrix, l: &Lattice) -> Result<Lattice> {
    let n = l.dim();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "map and lattice dimensions differ ({} vs {n})",
            a.len()
        )));
    }
    // A v ∈ L  ⟺  adj(B)·A·v ≡ 0 (mod d),  d = det B
    let d = l.index();
    let c = int_mat_mul(&adjugate(&l.basis), a);
    let system: IntMatrix = (0..n)
        .map(|i| {
            let mut row = c[i].clone();
            row.extend((0..n).map(|j| if i == j { d.clone() } else { BigInt::zero() }));
            row
        })
        .collect();
    let kernel = integer_kernel(&system, 2 * n);
    let gens: Vec<Vec<BigInt>> = kernel.into_iter().map(|v| v[..n].to_vec()).collect();
    Lattice::from_columns(n, &gens)
}

/// `A⁻¹(L) = {v ∈ ℤⁿ : A v ∈ L}`. Rejects singular `A`.
pub fn lattice_preimage(a: &RatMatrix, l: &Lattice) -> Result<Lattice> {
    let ai = a.to_int()?;
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map of dimension {} on a lattice in dimension {}",
            a.dim(),
            l.dim()
        )));
    }
    if det_integer(&ai).is_zero() {
        return Err(Error::SingularMap);
    }
    preimage_int(&ai, l)
}

pub fn lattice_intersect(l1: &Lattice, l2: &Lattice) -> Result<Lattice> {
    l1.intersect(l2)
}

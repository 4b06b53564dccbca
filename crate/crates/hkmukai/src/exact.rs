//! Exact rational scalars, dense rational matrices and the linear-algebra
//! kernels used throughout the crate: row reduction, kernels, linear solves
//! and the Smith normal form over the integers.
//!
//! Scalars are [`num_rational::BigRational`], which keeps every value in
//! lowest terms with a positive denominator.  Nothing in this crate uses
//! floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in lowest terms.
pub type Rational = BigRational;

/// Column vector of rationals.
pub type RatVector = Vec<Rational>;

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `p/q`; panics when `q == 0`.
pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Rational from a big integer.
pub fn rat_int(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Vector of rationals from machine integers.
pub fn rat_vec(xs: &[i64]) -> RatVector {
    xs.iter().map(|&x| rat(x)).collect()
}

/// Zero vector of length `n`.
pub fn zero_vec(n: usize) -> RatVector {
    vec![Rational::zero(); n]
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit_vec(n: usize, i: usize) -> RatVector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

/// Canonical string form: `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"` (surrounding whitespace allowed) into lowest terms.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

/// True when `x` is an integer.
pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// True when every entry of `v` is an integer.
pub fn is_integral_vec(v: &[Rational]) -> bool {
    v.iter().all(is_integral)
}

/// Least common multiple of the denominators of `xs` (one for an empty slice).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Greatest common divisor of a family of rationals, taken in the sense
/// `gcd(p_i/q_i) = gcd(p_i)/lcm(q_i)`; zero when all inputs vanish.
pub fn rational_gcd<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in xs {
        num = num.gcd(x.numer());
        den = den.lcm(x.denom());
    }
    Rational::new(num, den)
}

/// Converts an integral rational to a big integer.
pub fn to_bigint(x: &Rational) -> Result<BigInt> {
    if is_integral(x) {
        Ok(x.numer().clone())
    } else {
        Err(Error::NotIntegral(format_rational(x)))
    }
}

/// Converts an integral rational to `i64`.
pub fn to_i64(x: &Rational) -> Result<i64> {
    to_bigint(x)?
        .to_i64()
        .ok_or_else(|| Error::Invalid(format!("integer out of range: {}", format_rational(x))))
}

/// Sum of `a_i * b_i`.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `a + b` entrywise.
pub fn vec_add(a: &[Rational], b: &[Rational]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a - b` entrywise.
pub fn vec_sub(a: &[Rational], b: &[Rational]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `c * a`.
pub fn vec_scale(c: &Rational, a: &[Rational]) -> RatVector {
    a.iter().map(|x| c * x).collect()
}

/// `-a`.
pub fn vec_neg(a: &[Rational]) -> RatVector {
    a.iter().map(|x| -x).collect()
}

/// True when every entry vanishes.
pub fn vec_is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Identity of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from row vectors of equal length.
    pub fn from_rows(rows: Vec<RatVector>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(RatMatrix {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix with the given number of columns from row vectors;
    /// allows zero rows with a known column count.
    pub fn from_rows_with_cols(rows: Vec<RatVector>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(RatMatrix {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[RatVector], rows: usize) -> Result<Self> {
        Ok(Self::from_rows_with_cols(cols.to_vec(), rows)?.transpose())
    }

    /// Builds a matrix from integer rows.
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RatMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&x| rat(x)).collect(),
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[&RatMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.entries[i * self.cols + j] = x;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> RatVector {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<RatVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
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

    /// Matrix product; panics on shape mismatch.
    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
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
                        let idx = i * other.cols + j;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rational]) -> RatVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                dot(row, v)
            })
            .collect()
    }

    /// Bilinear form `x^T M y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        dot(x, &self.mul_vec(y))
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| c * a).collect(),
        }
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&rat(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(is_integral)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Sub-matrix of the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let x = m.get(r, j) * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let x = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &piv;
                for j in c..n {
                    let x = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, x);
                }
            }
        }
        det
    }

    /// Inverse, or `None` for a singular matrix.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
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
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.select(&rows, &cols))
    }

    /// Integer entries, failing on a non-integral entry.
    pub fn to_bigint_rows(&self) -> Result<Vec<Vec<BigInt>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| to_bigint(self.get(i, j))).collect())
            .collect()
    }

    fn from_bigint_rows(rows: &[Vec<BigInt>], cols: usize) -> RatMatrix {
        RatMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|x| rat_int(x.clone())).collect(),
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Basis of the right kernel `{x : m x = 0}` over the rationals.
pub fn kernel_basis(m: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(m.cols());
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f).clone();
            }
            v
        })
        .collect()
}

/// Exact solution of `A x = b` (one particular solution when the system is
/// underdetermined), or `None` when the system is inconsistent.
pub fn solve_linear(a: &RatMatrix, b: &[Rational]) -> Option<RatVector> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let n = a.cols();
    let mut aug = RatMatrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vec(n);
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, n).clone();
    }
    Some(x)
}

/// Result of [`smith_normal_form`]: `u * m * v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: RatMatrix,
    pub d: RatMatrix,
    pub v: RatMatrix,
}

impl Smith {
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).numer().clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form of an integer matrix: unimodular `u`, `v` and diagonal
/// `d` with `u m v = d`, nonnegative diagonal and `d_i | d_{i+1}`.
pub fn smith_normal_form(m: &RatMatrix) -> Result<Smith> {
    let a = m
        .to_bigint_rows()
        .map_err(|_| Error::NotIntegral("integrality required".into()))?;
    let (u, d, v) = smith_int(a, m.rows(), m.cols());
    Ok(Smith {
        u: RatMatrix::from_bigint_rows(&u, m.rows()),
        d: RatMatrix::from_bigint_rows(&d, m.cols()),
        v: RatMatrix::from_bigint_rows(&v, m.cols()),
    })
}

type IntMat = Vec<Vec<BigInt>>;

fn int_identity(n: usize) -> IntMat {
    (0..n)
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
        .collect()
}

fn row_axpy(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn col_axpy(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

fn col_swap(m: &mut IntMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn smith_int(mut a: IntMat, rows: usize, cols: usize) -> (IntMat, IntMat, IntMat) {
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut a, t, pj);
        col_swap(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                // Divisibility of the remaining block by the pivot.
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let one = BigInt::from(-1);
                        row_axpy(&mut a, t, i, &one);
                        row_axpy(&mut u, t, i, &one);
                        continue;
                    }
                }
            }
            // Move the smallest nonzero entry of row/column t to the pivot.
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
                col_swap(&mut a, t, best.1);
                col_swap(&mut v, t, best.1);
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
    (u, a, v)
}

/// Z-basis of the integer kernel `{x in Z^n : m x = 0}`; rows of `m` may be
/// rational (they are cleared of denominators first).  The result spans a
/// saturated sublattice of `Z^n`.
pub fn integer_kernel_basis(m: &RatMatrix) -> Vec<RatVector> {
    let cleared = clear_row_denominators(m);
    let s = smith_normal_form(&cleared).expect("cleared matrix is integral");
    let r = s.rank();
    (r..m.cols()).map(|j| s.v.col(j)).collect()
}

fn clear_row_denominators(m: &RatMatrix) -> RatMatrix {
    let rows = m
        .to_rows()
        .into_iter()
        .map(|row| {
            let d = rat_int(common_denominator(row.iter()));
            vec_scale(&d, &row)
        })
        .collect();
    RatMatrix::from_rows_with_cols(rows, m.cols()).expect("same shape")
}

/// Z-basis (as rows) of the Z-span of the rows of `gens`.  Rational rows are
/// allowed; the basis is expressed in the same coordinates.
pub fn row_lattice_basis(gens: &RatMatrix) -> RatMatrix {
    let den = rat_int(common_denominator(gens.entries().iter()));
    let scaled = gens.scale(&den);
    let s = smith_normal_form(&scaled).expect("scaled matrix is integral");
    let vinv = s.v.inverse().expect("unimodular");
    let factors = s.invariant_factors();
    let rows = factors
        .iter()
        .enumerate()
        .map(|(i, d)| vec_scale(&(rat_int(d.clone()) / &den), &vinv.row(i)))
        .collect();
    RatMatrix::from_rows_with_cols(rows, gens.cols()).expect("same width")
}

/// Z-basis (as rows) of `span_Q(rows of gens) ∩ Z^n`.
pub fn saturate_rows(gens: &RatMatrix) -> RatMatrix {
    let den = rat_int(common_denominator(gens.entries().iter()));
    let scaled = gens.scale(&den);
    let s = smith_normal_form(&scaled).expect("scaled matrix is integral");
    let vinv = s.v.inverse().expect("unimodular");
    let rows = (0..s.rank()).map(|i| vinv.row(i)).collect();
    RatMatrix::from_rows_with_cols(rows, gens.cols()).expect("same width")
}

/// Exact n-th root of a nonnegative big integer, if it exists.
pub fn exact_nth_root(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    if let Some(small) = x.to_u64() {
        let r = num_integer::Roots::nth_root(&small, n);
        return (r.checked_pow(n) == Some(small)).then(|| BigInt::from(r));
    }
    let r = num_integer::Roots::nth_root(x, n);
    if num_traits::pow(r.clone(), n as usize) == *x {
        Some(r)
    } else {
        None
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `n!` as a rational.
pub fn factorial_q(n: u64) -> Rational {
    rat_int(factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "3", "-7/4", "12/8"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
        assert_eq!(format_rational(&parse_rational("12/8").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("4/-2").unwrap()), "-2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&m(&[vec![2, 0], vec![0, 0]])).unwrap();
        assert_eq!(s.d, m(&[vec![2, 0], vec![0, 0]]));
        let s = smith_normal_form(&m(&[vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!(s.d, RatMatrix::identity(2));
        let s = smith_normal_form(&m(&[vec![-4]])).unwrap();
        assert_eq!(s.d, m(&[vec![4]]));
        assert!(smith_normal_form(&RatMatrix::diagonal(&[frac(1, 2)])).is_err());
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&a).unwrap();
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.invariant_factors(), vec![2.into(), 6.into(), 12.into()]);
        assert_eq!(s.u.det().abs(), rat(1));
        assert_eq!(s.v.det().abs(), rat(1));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RatMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&RatMatrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn solve_examples() {
        let v = rat_vec(&[1, -2, 3]);
        assert_eq!(solve_linear(&RatMatrix::identity(3), &v), Some(v));
        let a = m(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(solve_linear(&a, &rat_vec(&[1, 2])), None);
    }

    #[test]
    fn lattice_bases() {
        let g = m(&[vec![2, 0], vec![0, 2], vec![1, 1]]);
        let b = row_lattice_basis(&g);
        assert_eq!(b.rows(), 2);
        assert_eq!(b.det().abs(), rat(2));
        let s = saturate_rows(&m(&[vec![2, 4]]));
        assert_eq!(s.rows(), 1);
        assert_eq!(rational_gcd(s.row(0).iter()), rat(1));
        let k = integer_kernel_basis(&m(&[vec![2, 4, 6]]));
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn roots() {
        assert_eq!(exact_nth_root(&BigInt::from(27), 3), Some(BigInt::from(3)));
        assert_eq!(exact_nth_root(&BigInt::from(28), 3), None);
        assert_eq!(factorial(5), BigInt::from(120));
    }
}

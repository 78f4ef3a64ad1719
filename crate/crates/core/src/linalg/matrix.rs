//! Dense square complex matrices of small order.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Shorthand for a complex literal.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from complex rows; every row must have the same length
    /// as the number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        let data: Vec<C64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(CMatrix { n, data })
    }

    /// Real matrix from row slices. Panics on ragged input; intended for
    /// literals.
    pub fn real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "ragged real matrix literal");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&e)
    }

    /// Matrix unit `e_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn det2(&self) -> C64 {
        debug_assert_eq!(self.n, 2);
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }

    /// Frobenius (Hilbert-Schmidt) norm.
    pub fn frob(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for i in 0..self.n {
            self[(i, j)] = v[i];
        }
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (n, m) = (self.n, other.n);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    /// Block-diagonal matrix with the given square blocks of equal order.
    pub fn block_diag(blocks: &[CMatrix]) -> Self {
        let m = blocks[0].n;
        assert!(blocks.iter().all(|b| b.n == m), "blocks must share order");
        let mut out = Self::zeros(m * blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    out[(k * m + i, k * m + j)] = b[(i, j)];
                }
            }
        }
        out
    }

    /// Extracts the `m x m` diagonal block with index `k`.
    pub fn diag_block(&self, k: usize, m: usize) -> Self {
        Self::from_fn(m, |i, j| self[(k * m + i, k * m + j)])
    }

    /// Row-major flattening, the coordinate vector used for tensor
    /// flattenings and Frobenius inner products.
    pub fn vec(&self) -> Vec<C64> {
        self.data.clone()
    }

    pub fn from_vec(n: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), n * n);
        CMatrix {
            n,
            data: v.to_vec(),
        }
    }

    /// Frobenius inner product `<self, other> = trace(other^* self)`.
    pub fn inner(&self, other: &CMatrix) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// `(m - m^*) / (2i)`.
    pub fn imaginary_part(&self) -> Self {
        (self - &self.adjoint()).scale(C64::new(0.0, -0.5))
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: n,
                got: self.n,
            })
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        &self * &rhs
    }
}

impl Mul<&CMatrix> for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        &self * rhs
    }
}

impl Mul<CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        self * &rhs
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        &self + &rhs
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.n, rhs.n, "matrix sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix difference dimension mismatch");
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        &self - &rhs
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})[", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Wire form: `{"n": int, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |part: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..self.n)
                .map(|i| (0..self.n).map(|j| part(&self[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            n: self.n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&raw.re) || !shape_ok(&raw.im) {
            return Err(D::Error::custom(format!(
                "matrix JSON must hold {n}x{n} `re` and `im` arrays"
            )));
        }
        let rows: Vec<Vec<C64>> = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)).collect())
            .collect();
        CMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

// Vector helpers. Vectors are plain `Vec<C64>` / `[C64]`.

/// `<u, v> = sum conj(v_i) u_i`
pub fn vdot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [C64]) -> f64 {
    let nrm = vnorm(v);
    if nrm > 0.0 {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
    nrm
}

/// Rank-one matrix `u v^*`.
pub fn outer(u: &[C64], v: &[C64]) -> CMatrix {
    CMatrix::from_fn(u.len(), |i, j| u[i] * v[j].conj())
}

/// Completes the orthonormal columns in `basis` to an orthonormal basis of
/// `C^n` by Gram-Schmidt against the standard basis.
pub fn complete_basis(mut basis: Vec<Vec<C64>>, n: usize) -> Vec<Vec<C64>> {
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[k] = C64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let p = vdot(&e, b);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        if normalize(&mut e) > 1e-8 {
            basis.push(e);
        }
    }
    basis
}

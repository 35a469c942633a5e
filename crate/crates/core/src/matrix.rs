//! Dense square complex matrices, induced norms and the diagonal plus
//! strictly-triangular split `B = D + N`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{GreenError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance for "below the diagonal" entries, scaled by `‖B‖_∞`.
pub const TRIANGULAR_RTOL: f64 = 1e-13;

/// Dense `n × n` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows, checking that it is square, nonempty and finite.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(GreenError::InvalidMatrix("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(GreenError::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(GreenError::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { n, data })
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm (used by test oracles and residual checks).
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when every entry with `i > j` has modulus at most `tol`.
    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        self.first_subdiagonal_violation(tol).is_none()
    }

    fn first_subdiagonal_violation(&self, tol: f64) -> Option<(usize, usize, f64)> {
        for i in 1..self.n {
            for j in 0..i {
                let m = self[(i, j)].norm();
                if m > tol {
                    return Some((i, j, m));
                }
            }
        }
        None
    }

    /// Default triangularity tolerance `1e-13 · ‖B‖_∞`.
    pub fn triangular_tolerance(&self) -> f64 {
        TRIANGULAR_RTOL * induced_norm_inf(self)
    }

    /// Entrywise `a ≤ b + tol` on real parts of two real-valued matrices.
    pub fn entrywise_le(&self, other: &Self, tol: f64) -> bool {
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| a.re <= b.re + tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>12.5e}{:+.5e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix sum");
        ComplexMatrix {
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

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix difference");
        ComplexMatrix {
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

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Vector norm inducing a matrix norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    One,
    Two,
    Infinity,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::One, NormKind::Two, NormKind::Infinity];
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::One => "1",
            NormKind::Two => "2",
            NormKind::Infinity => "inf",
        })
    }
}

impl FromStr for NormKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" | "one" => Ok(NormKind::One),
            "2" | "two" => Ok(NormKind::Two),
            "inf" | "infinity" => Ok(NormKind::Infinity),
            other => Err(format!("unknown norm '{other}', expected 1, 2 or inf")),
        }
    }
}

/// Splits an upper triangular `B` into its diagonal `D` and strictly upper
/// triangular part `N`. Subdiagonal entries within `1e-13·‖B‖_∞` are treated
/// as rounding noise and dropped.
pub fn split_triangular(b: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let tol = b.triangular_tolerance();
    if let Some((row, col, magnitude)) = b.first_subdiagonal_violation(tol) {
        return Err(GreenError::NotTriangular {
            row,
            col,
            magnitude,
            tolerance: tol,
        });
    }
    let n = b.n();
    let d = ComplexMatrix::from_diagonal(&b.diagonal());
    let nil = ComplexMatrix::from_fn(n, |i, j| if j > i { b[(i, j)] } else { ZERO });
    Ok((d, nil))
}

/// Copy of `b` with every entry below the diagonal set to zero.
pub fn hard_upper(b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(b.n(), |i, j| if j >= i { b[(i, j)] } else { ZERO })
}

/// `|A|`: the real matrix of entry moduli.
pub fn entrywise_abs(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.n(), |i, j| Complex64::new(a[(i, j)].norm(), 0.0))
}

/// Fails unless `nil` is strictly upper triangular (exact zeros on and below the diagonal).
pub fn ensure_strictly_upper(nil: &ComplexMatrix) -> Result<()> {
    for i in 0..nil.n() {
        for j in 0..=i {
            if nil[(i, j)] != ZERO {
                return Err(GreenError::NotStrictlyTriangular { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `k`-th power of `|N|`; `|N|^0 = I`. Powers beyond the nilpotency index are zero.
pub fn abs_power(nabs: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let n = nabs.n();
    if k >= n && nabs.is_upper_triangular(0.0) && nabs.diagonal().iter().all(|z| *z == ZERO) {
        return ComplexMatrix::zeros(n);
    }
    let mut acc = ComplexMatrix::identity(n);
    for _ in 0..k {
        acc = &acc * nabs;
    }
    acc
}

fn induced_norm_one(a: &ComplexMatrix) -> f64 {
    let n = a.n();
    (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn induced_norm_inf(a: &ComplexMatrix) -> f64 {
    (0..a.n())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Operator norm induced by the 1-, 2- or ∞-vector norm.
pub fn induced_norm(a: &ComplexMatrix, p: NormKind) -> Result<f64> {
    match p {
        NormKind::One => Ok(induced_norm_one(a)),
        NormKind::Infinity => Ok(induced_norm_inf(a)),
        NormKind::Two => spectral_norm(a),
    }
}

fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Power iteration on `AᴴA` from a unit start vector. Returns `‖A v‖` for
/// the converged direction, or `None` if the Rayleigh quotients fail to settle.
fn power_iteration(a: &ComplexMatrix, ah: &ComplexMatrix, start: Vec<Complex64>) -> Option<f64> {
    let n = a.n();
    let max_iter = 10 * n * n;
    let mut v = start;
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let av = a.mul_vec(&v);
        let w = ah.mul_vec(&av);
        // Rayleigh quotient vᴴAᴴAv with ‖v‖ = 1.
        let rq = av.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let wn = vec_norm(&w);
        if rq == 0.0 || wn == 0.0 {
            return Some(0.0);
        }
        if prev.is_finite() && (rq - prev).abs() <= 1e-12 * rq {
            // Verification multiply with the final direction.
            return Some(vec_norm(&a.mul_vec(&v)));
        }
        prev = rq;
        v = w.into_iter().map(|z| z / wn).collect();
    }
    None
}

fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let n = a.n();
    if n == 1 {
        return Ok(a[(0, 0)].norm());
    }
    let ah = a.conj_transpose();
    let ones = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    // Second start: the direction Aᴴ a_j of the largest column, guarding
    // against an all-ones start orthogonal to the top singular vector.
    let jmax = (0..n)
        .max_by(|&x, &y| {
            let cx: f64 = (0..n).map(|i| a[(i, x)].norm_sqr()).sum();
            let cy: f64 = (0..n).map(|i| a[(i, y)].norm_sqr()).sum();
            cx.total_cmp(&cy)
        })
        .unwrap_or(0);
    let col: Vec<Complex64> = (0..n).map(|i| a[(i, jmax)]).collect();
    let second = ah.mul_vec(&col);
    let second_norm = vec_norm(&second);

    let first = power_iteration(a, &ah, ones);
    let second = if second_norm > 0.0 {
        power_iteration(
            a,
            &ah,
            second.into_iter().map(|z| z / second_norm).collect(),
        )
    } else {
        Some(0.0)
    };
    match (first, second) {
        (Some(x), Some(y)) => Ok(x.max(y)),
        _ => spectral_norm_dense(a, &ah),
    }
}

/// Fallback: largest eigenvalue of the Hermitian `AᴴA` via the Schur form.
fn spectral_norm_dense(a: &ComplexMatrix, ah: &ComplexMatrix) -> Result<f64> {
    let gram = ah * a;
    let schur =
        crate::schur::schur_decompose(&gram).map_err(|_| GreenError::ConvergenceFailure {
            routine: "two-norm power iteration",
            index: 0,
        })?;
    let lam = schur.t.diagonal().iter().map(|z| z.re).fold(0.0, f64::max);
    Ok(lam.max(0.0).sqrt())
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.n();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax == 0.0 || pmax <= f64::EPSILON * 1e-3 * scale {
                return Err(GreenError::SingularIteration {
                    routine: "LU factorization",
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != ZERO {
                    for j in (k + 1)..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let d: Complex64 = (0..n).map(|i| self.lu[i * n + i]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// `log |det A|`, robust to overflow for large `n`.
    pub fn log_abs_determinant(&self) -> f64 {
        let n = self.n;
        (0..n).map(|i| self.lu[i * n + i].norm().ln()).sum()
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve_mat(&ComplexMatrix::identity(self.n))
    }
}

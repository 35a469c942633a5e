//! Complex Schur decomposition `A = Q T Qᴴ`.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! complex QR sweeps with a Wilkinson shift. Eigenvalues land on `diag(T)`
//! in deflation order; no reordering is performed.

use num_complex::Complex64;

use crate::error::{GreenError, Result};
use crate::matrix::{hard_upper, ComplexMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative deflation threshold for `h[j+1][j]`.
const DEFLATION_RTOL: f64 = 1e-14;

/// Unitary `q` and upper triangular `t` with `A = q t qᴴ`.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl SchurForm {
    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }

    /// `Q T Qᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.q * &self.t) * &self.q.conj_transpose()
    }

    /// Lifts a function of `T` back to the original basis: `Q F Qᴴ`.
    pub fn transport(&self, f_of_t: &ComplexMatrix) -> ComplexMatrix {
        &(&self.q * f_of_t) * &self.q.conj_transpose()
    }
}

/// Householder reduction `A = Q0 H Q0ᴴ` with `H` upper Hessenberg.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.n();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n <= 2 {
        return (q, h);
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        // v = x + phase·‖x‖·e1 avoids cancellation in the first component.
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vvᴴ) H on rows k+1.., then H ← H (I − 2vvᴴ) on columns k+1..
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= 2.0 * vr * s;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(c, vc)| m[(i, k + 1 + c)] * vc)
                    .sum();
                for (c, vc) in v.iter().enumerate() {
                    m[(i, k + 1 + c)] -= 2.0 * s * vc.conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (q, h)
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with `G·[a; b] = [r; 0]`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn zeroing(a: Complex64, b: Complex64) -> Self {
        let bn = b.norm();
        if bn == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        let an = a.norm();
        if an == 0.0 {
            return Self {
                c: 0.0,
                s: b.conj() / bn,
            };
        }
        let r = an.hypot(bn);
        Self {
            c: an / r,
            s: (a / an) * b.conj() / r,
        }
    }

    /// Rows `k`, `k+1` of `m`, columns `from..`.
    fn apply_left(&self, m: &mut ComplexMatrix, k: usize, from: usize) {
        for j in from..m.n() {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = self.c * x + self.s * y;
            m[(k + 1, j)] = -self.s.conj() * x + self.c * y;
        }
    }

    /// Columns `k`, `k+1` of `m` multiplied on the right by `Gᴴ`, rows `..to`.
    fn apply_right_adjoint(&self, m: &mut ComplexMatrix, k: usize, to: usize) {
        for i in 0..to {
            let p = m[(i, k)];
            let q = m[(i, k + 1)];
            m[(i, k)] = self.c * p + self.s.conj() * q;
            m[(i, k + 1)] = -self.s * p + self.c * q;
        }
    }
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition of an arbitrary square matrix.
pub fn schur_decompose(a: &ComplexMatrix) -> Result<SchurForm> {
    let n = a.n();
    if a.is_upper_triangular(a.triangular_tolerance()) {
        return Ok(SchurForm {
            q: ComplexMatrix::identity(n),
            t: hard_upper(a),
        });
    }

    let (mut z, mut h) = hessenberg(a);
    let scale = h.frobenius_norm();
    let floor = f64::EPSILON * f64::EPSILON * scale;
    let max_sweeps = 60 * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Find the top of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let tol = DEFLATION_RTOL * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
            if sub <= tol.max(floor) {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(GreenError::ConvergenceFailure {
                routine: "complex Schur QR",
                index: hi,
            });
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // Explicit shifted QR step on the active block lo..=hi.
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_left(&mut h, k, k);
            h[(k + 1, k)] = ZERO;
            rotations.push((k, g));
        }
        // Right multiplication also updates rows above the block, which stay in T.
        for &(k, g) in &rotations {
            g.apply_right_adjoint(&mut h, k, (k + 2).min(hi + 1));
            g.apply_right_adjoint(&mut z, k, n);
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }

    Ok(SchurForm {
        q: z,
        t: hard_upper(&h),
    })
}

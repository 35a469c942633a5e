//! Green's function of the bounded-solutions problem `x' = Ax + f`.
//!
//! For a spectrum disjoint from the imaginary axis the kernel is
//! `𝒢(A,t) = e^{At}P⁻` for `t > 0` and `𝒢(A,t) = −e^{At}P⁺` for `t < 0`,
//! where `P∓` are the spectral projectors onto the left/right half-plane
//! invariant subspaces. It is undefined at `t = 0`.

use num_complex::Complex64;

use crate::error::{GreenError, Result};
use crate::expm::matrix_exp;
use crate::matrix::{induced_norm, ComplexMatrix, Lu, NormKind};
use crate::quadrature::{GaussRule, QuadSpec};
use crate::schur::schur_decompose;

/// Eigenvalues with `|Re λ| ≤ AXIS_RTOL·‖A‖_∞` count as lying on the axis.
pub const AXIS_RTOL: f64 = 1e-12;

const SIGN_MAX_ITER: usize = 100;
const SIGN_RTOL: f64 = 1e-13;

/// Dichotomy data read off the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGaps {
    /// Distance from the axis to the left spectrum, `+∞` if there is none.
    pub gamma_minus: f64,
    /// Distance from the axis to the right spectrum, `+∞` if there is none.
    pub gamma_plus: f64,
    /// `max Re λ`.
    pub alpha: f64,
    /// Number of eigenvalues in the open left half-plane.
    pub m: usize,
    /// Number of eigenvalues in the open right half-plane.
    pub l: usize,
    pub eigenvalues: Vec<Complex64>,
}

impl SpectralGaps {
    /// Gaps from a list of eigenvalues; `scale` sets the axis tolerance.
    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>, scale: f64) -> Result<Self> {
        let tol = AXIS_RTOL * scale;
        let mut gamma_minus = f64::INFINITY;
        let mut gamma_plus = f64::INFINITY;
        let mut alpha = f64::NEG_INFINITY;
        let (mut m, mut l) = (0, 0);
        for &z in &eigenvalues {
            if z.re.abs() <= tol {
                return Err(GreenError::SpectrumOnAxis { eigenvalue: z });
            }
            alpha = alpha.max(z.re);
            if z.re < 0.0 {
                m += 1;
                gamma_minus = gamma_minus.min(-z.re);
            } else {
                l += 1;
                gamma_plus = gamma_plus.min(z.re);
            }
        }
        Ok(Self {
            gamma_minus,
            gamma_plus,
            alpha,
            m,
            l,
            eigenvalues,
        })
    }

    /// `γ = γ⁻ + γ⁺`; infinite when one side of the spectrum is empty.
    pub fn gamma(&self) -> f64 {
        self.gamma_minus + self.gamma_plus
    }

    pub fn n(&self) -> usize {
        self.m + self.l
    }

    /// Replaces the maximal gaps by smaller user choices. The strip
    /// `−γ⁻ < Re z < γ⁺` must stay free of eigenvalues.
    pub fn with_overrides(
        &self,
        gamma_minus: Option<f64>,
        gamma_plus: Option<f64>,
    ) -> Result<Self> {
        let mut out = self.clone();
        if let Some(g) = gamma_minus {
            if !(g > 0.0) || g > self.gamma_minus {
                return Err(GreenError::DomainError(format!(
                    "gamma_minus = {g} must lie in (0, {}]",
                    self.gamma_minus
                )));
            }
            out.gamma_minus = g;
        }
        if let Some(g) = gamma_plus {
            if !(g > 0.0) || g > self.gamma_plus {
                return Err(GreenError::DomainError(format!(
                    "gamma_plus = {g} must lie in (0, {}]",
                    self.gamma_plus
                )));
            }
            out.gamma_plus = g;
        }
        Ok(out)
    }
}

/// Maximal `γ⁻`, `γ⁺`, `α` and the counts `m`, `l` from the diagonal of an
/// upper triangular `T`.
pub fn spectral_gaps(t: &ComplexMatrix) -> Result<SpectralGaps> {
    let tol = t.triangular_tolerance();
    if !t.is_upper_triangular(tol) {
        // Reuse the detailed error from the split.
        crate::matrix::split_triangular(t)?;
    }
    let scale = induced_norm(t, NormKind::Infinity)?;
    SpectralGaps::from_eigenvalues(t.diagonal(), scale)
}

/// Gaps for an arbitrary matrix via its Schur diagonal.
pub fn spectral_gaps_general(a: &ComplexMatrix) -> Result<SpectralGaps> {
    let schur = schur_decompose(a)?;
    let scale = induced_norm(a, NormKind::Infinity)?;
    SpectralGaps::from_eigenvalues(schur.eigenvalues(), scale)
}

/// Gaps together with the spectral projectors.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub gaps: SpectralGaps,
    pub p_minus: ComplexMatrix,
    pub p_plus: ComplexMatrix,
}

/// Matrix sign function by Newton's iteration with determinant scaling.
pub fn matrix_sign(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.n();
    let mut s = a.clone();
    let mut scaling = true;
    let mut prev_diff = f64::INFINITY;
    for _ in 0..SIGN_MAX_ITER {
        let lu = Lu::factor(&s).map_err(|_| GreenError::SingularIteration {
            routine: "matrix sign Newton iteration",
        })?;
        let inv = lu.inverse();
        if !inv.is_finite() {
            return Err(GreenError::SingularIteration {
                routine: "matrix sign Newton iteration",
            });
        }
        let mu = if scaling {
            (-lu.log_abs_determinant() / n as f64).exp()
        } else {
            1.0
        };
        let next = &s.scale_real(0.5 * mu) + &inv.scale_real(0.5 / mu);
        let diff = induced_norm(&(&next - &s), NormKind::Infinity)?;
        let size = induced_norm(&next, NormKind::Infinity)?;
        if diff <= SIGN_RTOL * size {
            return Ok(next);
        }
        // Scaling only helps in the early, non-quadratic phase.
        if diff <= 1e-2 * size {
            scaling = false;
        }
        // Rounding floor reached: differences stopped shrinking.
        if !scaling && diff <= 1e-8 * size && diff >= 0.5 * prev_diff {
            return Ok(next);
        }
        prev_diff = diff;
        s = next;
    }
    Err(GreenError::ConvergenceFailure {
        routine: "matrix sign Newton iteration",
        index: SIGN_MAX_ITER,
    })
}

/// `P⁻ = (I − sign A)/2`, `P⁺ = (I + sign A)/2`, checked for idempotency and
/// commutation with `A` before returning.
pub fn spectral_projectors(
    a: &ComplexMatrix,
    gaps: &SpectralGaps,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = a.n();
    let ident = ComplexMatrix::identity(n);
    if gaps.l == 0 {
        return Ok((ident, ComplexMatrix::zeros(n)));
    }
    if gaps.m == 0 {
        return Ok((ComplexMatrix::zeros(n), ident));
    }
    let sign = matrix_sign(a)?;
    let p_minus = (&ident - &sign).scale_real(0.5);
    let p_plus = (&ident + &sign).scale_real(0.5);

    let pn = induced_norm(&p_minus, NormKind::Infinity)?.max(1.0);
    let an = induced_norm(a, NormKind::Infinity)?;
    let idem = induced_norm(&(&(&p_minus * &p_minus) - &p_minus), NormKind::Infinity)?;
    let comm = induced_norm(&(&(&p_minus * a) - &(a * &p_minus)), NormKind::Infinity)?;
    if idem > 1e-9 * pn * pn || comm > 1e-9 * an * pn {
        return Err(GreenError::ConvergenceFailure {
            routine: "spectral projector check",
            index: 0,
        });
    }
    Ok((p_minus, p_plus))
}

/// Precomputed data for evaluating `𝒢(A, ·)` at many times.
///
/// Immutable after construction, so evaluations at distinct `t` may run
/// concurrently and give the same results as sequential calls.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    a: ComplexMatrix,
    split: SpectralSplit,
    // A·P⁻ and A·P⁺: e^{At}P⁻ = e^{AP⁻t}P⁻ avoids forming the growing part of e^{At}.
    a_minus: ComplexMatrix,
    a_plus: ComplexMatrix,
}

impl GreenKernel {
    /// Builds the kernel; gaps come from the diagonal when `a` is already
    /// upper triangular and from a Schur decomposition otherwise.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let gaps = if a.is_upper_triangular(a.triangular_tolerance()) {
            spectral_gaps(a)?
        } else {
            spectral_gaps_general(a)?
        };
        Self::with_gaps(a, gaps)
    }

    pub fn with_gaps(a: &ComplexMatrix, gaps: SpectralGaps) -> Result<Self> {
        let (p_minus, p_plus) = spectral_projectors(a, &gaps)?;
        let a_minus = a * &p_minus;
        let a_plus = a * &p_plus;
        Ok(Self {
            a: a.clone(),
            split: SpectralSplit {
                gaps,
                p_minus,
                p_plus,
            },
            a_minus,
            a_plus,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn split(&self) -> &SpectralSplit {
        &self.split
    }

    pub fn gaps(&self) -> &SpectralGaps {
        &self.split.gaps
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `𝒢(A, t)`.
    pub fn evaluate(&self, t: f64) -> Result<ComplexMatrix> {
        let n = self.n();
        if t == 0.0 {
            return Err(GreenError::UndefinedAtZero);
        }
        if t > 0.0 {
            if self.split.gaps.m == 0 {
                return Ok(ComplexMatrix::zeros(n));
            }
            let e = matrix_exp(&self.a_minus.scale_real(t));
            Ok(&e * &self.split.p_minus)
        } else {
            if self.split.gaps.l == 0 {
                return Ok(ComplexMatrix::zeros(n));
            }
            let e = matrix_exp(&self.a_plus.scale_real(t));
            Ok(-&(&e * &self.split.p_plus))
        }
    }

    /// Bounded solution `x(t) = ∫ 𝒢(A,s) f(t−s) ds`, truncated and split at `s = 0`.
    pub fn bounded_solution(
        &self,
        f: &dyn Fn(f64) -> Vec<Complex64>,
        t: f64,
        quad: &QuadSpec,
    ) -> Result<Vec<Complex64>> {
        if !quad.validate() {
            return Err(GreenError::DomainError("invalid quadrature layout".into()));
        }
        let n = self.n();
        let rule = GaussRule::new(quad.nodes_per_panel);
        let r = quad.truncation_radius;
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (a, b) in [(-r, 0.0), (0.0, r)] {
            for (s, w) in rule.composite(a, b, quad.panels) {
                let fv = f(t - s);
                if fv.len() != n {
                    return Err(GreenError::DimensionMismatch {
                        expected: n,
                        found: fv.len(),
                    });
                }
                let g = self.evaluate(s)?;
                for (xi, gi) in x.iter_mut().zip(g.mul_vec(&fv)) {
                    *xi += gi * w;
                }
            }
        }
        Ok(x)
    }
}

/// `𝒢(A, t)` for a single time.
pub fn green_function(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Err(GreenError::UndefinedAtZero);
    }
    GreenKernel::new(a)?.evaluate(t)
}

/// Bounded solution of `x' = Ax + f` at time `t`.
pub fn bounded_solution(
    a: &ComplexMatrix,
    f: &dyn Fn(f64) -> Vec<Complex64>,
    t: f64,
    quad: &QuadSpec,
) -> Result<Vec<Complex64>> {
    GreenKernel::new(a)?.bounded_solution(f, t, quad)
}

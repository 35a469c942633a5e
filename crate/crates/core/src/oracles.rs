//! Brute-force cross-checks for the closed forms.
//!
//! * convolution powers of the envelope `h` on a uniform grid,
//! * `𝒢(A,t)` as a resolvent contour integral,
//! * the perturbation identity `𝒢(A,t) − 𝒢(B,t) = ∫ 𝒢(A,s)(A−B)𝒢(B,t−s) ds`.
//!
//! None of these call into the closed-form bound code.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bounds::h_eval;
use crate::error::{GreenError, Result};
use crate::green::GreenKernel;
use crate::matrix::{induced_norm, ComplexMatrix, Lu, NormKind};
use crate::quadrature::{GaussRule, QuadSpec};
use crate::schur::schur_decompose;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples of `h^{*k}` for `k = 1..=kmax` on the grid `{mΔ : |mΔ| ≤ radius}`.
///
/// Each power is the trapezoid-rule convolution of grid samples, evaluated
/// with one FFT: the padded length exceeds the support of `h^{*kmax}`, so the
/// circular product equals the repeated linear convolution.
#[derive(Debug, Clone)]
pub struct ConvolutionTable {
    step: f64,
    half_width: usize,
    // values[k−1][m + half_width]
    values: Vec<Vec<f64>>,
}

impl ConvolutionTable {
    pub fn build(kmax: usize, gamma_minus: f64, gamma_plus: f64, step: f64, radius: f64) -> Self {
        assert!(kmax >= 1 && step > 0.0 && radius > 0.0);
        let half = (radius / step).round() as usize;
        let len = (2 * kmax * half + 1).next_power_of_two();
        let mut buf = vec![ZERO; len];
        for m in 0..=half {
            let t = m as f64 * step;
            buf[m] = Complex64::new(h_eval(t, gamma_minus, gamma_plus), 0.0);
            if m > 0 {
                buf[len - m] = Complex64::new(h_eval(-t, gamma_minus, gamma_plus), 0.0);
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        fwd.process(&mut buf);
        let spectrum = buf;

        let mut values = Vec::with_capacity(kmax);
        let mut power = vec![Complex64::new(1.0, 0.0); len];
        for k in 1..=kmax {
            for (p, s) in power.iter_mut().zip(&spectrum) {
                *p *= s;
            }
            let mut work = power.clone();
            inv.process(&mut work);
            // Δ^{k−1} from k−1 quadratures, 1/len from the unnormalized inverse.
            let scale = step.powi(k as i32 - 1) / len as f64;
            let row = (0..=2 * half)
                .map(|idx| {
                    let m = idx as isize - half as isize;
                    let pos = m.rem_euclid(len as isize) as usize;
                    work[pos].re * scale
                })
                .collect();
            values.push(row);
        }
        Self {
            step,
            half_width: half,
            values,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Value at a grid time; `None` when `t` is off the grid or out of range.
    pub fn value(&self, k: usize, t: f64) -> Option<f64> {
        let m = (t / self.step).round();
        if (t - m * self.step).abs() > 1e-9 * self.step.max(t.abs())
            || m.abs() > self.half_width as f64
        {
            return None;
        }
        self.values
            .get(k.checked_sub(1)?)
            .map(|row| row[(m as isize + self.half_width as isize) as usize])
    }
}

/// Two grid resolutions combined by Richardson extrapolation, cancelling the
/// `O(Δ²)` trapezoid error from the kinks of `h` at the grid nodes.
#[derive(Debug, Clone)]
pub struct ConvolutionOracle {
    coarse: ConvolutionTable,
    fine: ConvolutionTable,
}

impl ConvolutionOracle {
    /// Grid step `min(0.01, 0.1/γ)`, refined so that `anchor` (if nonzero) is a node.
    pub fn new(
        kmax: usize,
        gamma_minus: f64,
        gamma_plus: f64,
        quad: &QuadSpec,
        anchor: f64,
    ) -> Self {
        let gamma = gamma_minus + gamma_plus;
        let mut step = 0.01f64.min(0.1 / gamma);
        if anchor != 0.0 {
            step = anchor.abs() / (anchor.abs() / step).ceil();
        }
        let radius = quad.truncation_radius.max(anchor.abs() + 1.0);
        Self {
            coarse: ConvolutionTable::build(kmax, gamma_minus, gamma_plus, step, radius),
            fine: ConvolutionTable::build(kmax, gamma_minus, gamma_plus, 0.5 * step, radius),
        }
    }

    pub fn step(&self) -> f64 {
        self.coarse.step
    }

    pub fn value(&self, k: usize, t: f64) -> Option<f64> {
        let c = self.coarse.value(k, t)?;
        let f = self.fine.value(k, t)?;
        Some((4.0 * f - c) / 3.0)
    }
}

/// Brute-force `h^{*k}(t)`.
pub fn conv_power_numeric(
    k: usize,
    t: f64,
    gamma_minus: f64,
    gamma_plus: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    if k < 1 {
        return Err(GreenError::DomainError(
            "convolution power k must be at least 1".into(),
        ));
    }
    if !(gamma_minus > 0.0 && gamma_minus.is_finite() && gamma_plus > 0.0 && gamma_plus.is_finite())
    {
        return Err(GreenError::DomainError(
            "gaps must be finite and positive".into(),
        ));
    }
    let oracle = ConvolutionOracle::new(k, gamma_minus, gamma_plus, quad, t);
    oracle
        .value(k, t)
        .ok_or_else(|| GreenError::DomainError(format!("t = {t} is outside the truncation radius")))
}

/// Which half of the spectrum a contour encloses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Left,
    Right,
}

/// Axis-aligned rectangle `[re_min, re_max] × [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    fn contains(&self, z: Complex64) -> bool {
        self.re_min < z.re && z.re < self.re_max && self.im_min < z.im && z.im < self.im_max
    }

    fn boundary_distance(&self, z: Complex64) -> f64 {
        let dx = (z.re - self.re_min).abs().min((z.re - self.re_max).abs());
        let dy = (z.im - self.im_min).abs().min((z.im - self.im_max).abs());
        let inside_x = self.re_min <= z.re && z.re <= self.re_max;
        let inside_y = self.im_min <= z.im && z.im <= self.im_max;
        match (inside_x, inside_y) {
            (true, true) => dx.min(dy),
            (true, false) => dy,
            (false, true) => dx,
            (false, false) => dx.hypot(dy),
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// Rectangular contour around one half of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub half_plane: HalfPlane,
    pub rect: Rect,
    /// Gauss–Legendre nodes per edge (rounded up to whole 16-node panels).
    pub nodes_per_edge: usize,
}

const CONTOUR_PANEL_ORDER: usize = 16;

impl ContourSpec {
    /// Rectangle enclosing the eigenvalues of one half-plane. The side facing
    /// the axis sits halfway between the axis and the nearest enclosed
    /// eigenvalue; the other sides keep a margin of at least 1.
    pub fn enclosing(
        eigenvalues: &[Complex64],
        half_plane: HalfPlane,
        nodes_per_edge: usize,
    ) -> Self {
        let sign = match half_plane {
            HalfPlane::Left => -1.0,
            HalfPlane::Right => 1.0,
        };
        let inside: Vec<Complex64> = eigenvalues
            .iter()
            .copied()
            .filter(|z| sign * z.re > 0.0)
            .collect();
        // Distances measured away from the axis, |Re z|.
        let (near, far, im_lo, im_hi) = if inside.is_empty() {
            (1.0, 1.0, 0.0, 0.0)
        } else {
            inside.iter().fold(
                (f64::INFINITY, 0.0f64, f64::INFINITY, f64::NEG_INFINITY),
                |(nr, fr, lo, hi), z| {
                    let d = z.re.abs();
                    (nr.min(d), fr.max(d), lo.min(z.im), hi.max(z.im))
                },
            )
        };
        let pad = 1.0f64.max(0.25 * (far - near).max(im_hi - im_lo));
        let axis_side = 0.5 * near;
        let outer = far + pad;
        let (re_min, re_max) = match half_plane {
            HalfPlane::Left => (-outer, -axis_side),
            HalfPlane::Right => (axis_side, outer),
        };
        Self {
            half_plane,
            rect: Rect {
                re_min,
                re_max,
                im_min: im_lo - pad,
                im_max: im_hi + pad,
            },
            nodes_per_edge,
        }
    }

    /// Node count giving panels no longer than the distance from the
    /// contour to the nearest eigenvalue (and at least 400 nodes per edge).
    pub fn auto(eigenvalues: &[Complex64], half_plane: HalfPlane) -> Self {
        let mut spec = Self::enclosing(eigenvalues, half_plane, 400);
        let dmin = eigenvalues
            .iter()
            .map(|&z| spec.rect.boundary_distance(z))
            .fold(f64::INFINITY, f64::min);
        let longest =
            (spec.rect.re_max - spec.rect.re_min).max(spec.rect.im_max - spec.rect.im_min);
        let panels = (longest / dmin).ceil() as usize;
        spec.nodes_per_edge = spec.nodes_per_edge.max(panels * CONTOUR_PANEL_ORDER);
        spec
    }

    /// Checks that the rectangle stays in its half-plane, encloses exactly
    /// that half's eigenvalues, and keeps every eigenvalue off the boundary.
    pub fn validate(&self, eigenvalues: &[Complex64]) -> Result<()> {
        let r = &self.rect;
        let in_half = match self.half_plane {
            HalfPlane::Left => r.re_max < 0.0,
            HalfPlane::Right => r.re_min > 0.0,
        };
        if !in_half || !(r.re_min < r.re_max && r.im_min < r.im_max) || self.nodes_per_edge == 0 {
            return Err(GreenError::DomainError(
                "contour rectangle is malformed or crosses the axis".into(),
            ));
        }
        for &z in eigenvalues {
            let wanted = match self.half_plane {
                HalfPlane::Left => z.re < 0.0,
                HalfPlane::Right => z.re > 0.0,
            };
            if wanted != r.contains(z) {
                return Err(GreenError::DomainError(format!(
                    "contour does not separate eigenvalue {z} correctly"
                )));
            }
        }
        Ok(())
    }
}

/// `(1/2πi) ∮ g_t(λ) (λI − A)⁻¹ dλ` over the rectangle in `spec`, with the
/// branch of `g_t` for that half-plane: `e^{λt}` on the left for `t > 0`,
/// `−e^{λt}` on the right for `t < 0`. The other combinations vanish
/// identically, so a left contour with `t < 0` (or right with `t > 0`) yields 0.
pub fn green_contour_on(
    a: &ComplexMatrix,
    eigenvalues: &[Complex64],
    t: f64,
    spec: &ContourSpec,
) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Err(GreenError::UndefinedAtZero);
    }
    spec.validate(eigenvalues)?;
    let n = a.n();
    let branch = match (spec.half_plane, t > 0.0) {
        (HalfPlane::Left, true) => 1.0,
        (HalfPlane::Right, false) => -1.0,
        _ => return Ok(ComplexMatrix::zeros(n)),
    };
    let panels = spec.nodes_per_edge.div_ceil(CONTOUR_PANEL_ORDER).max(1);
    let rule = GaussRule::new(CONTOUR_PANEL_ORDER);
    let corners = spec.rect.corners();
    let mut acc = ComplexMatrix::zeros(n);
    for e in 0..4 {
        let start = corners[e];
        let end = corners[(e + 1) % 4];
        let len = (end - start).norm();
        let dir = (end - start) / len;
        for (s, w) in rule.composite(0.0, len, panels) {
            let lambda = start + dir * s;
            if eigenvalues.iter().any(|&z| (z - lambda).norm() <= 1e-10) {
                return Err(GreenError::SingularResolvent { node: lambda });
            }
            let shifted = ComplexMatrix::from_fn(n, |i, j| {
                let diag = if i == j { lambda } else { ZERO };
                diag - a[(i, j)]
            });
            let resolvent = Lu::factor(&shifted)
                .map_err(|_| GreenError::SingularResolvent { node: lambda })?
                .inverse();
            let weight = (lambda * t).exp() * dir * w * branch;
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += resolvent[(i, j)] * weight;
                }
            }
        }
    }
    // 1/(2πi)
    let factor = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    Ok(acc.scale(factor))
}

fn eigenvalues_of(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if a.is_upper_triangular(a.triangular_tolerance()) {
        Ok(a.diagonal())
    } else {
        Ok(schur_decompose(a)?.eigenvalues())
    }
}

/// Contour evaluation of `𝒢(A,t)` with a user-supplied contour.
pub fn green_contour(a: &ComplexMatrix, t: f64, spec: &ContourSpec) -> Result<ComplexMatrix> {
    let eig = eigenvalues_of(a)?;
    check_axis(a, &eig)?;
    green_contour_on(a, &eig, t, spec)
}

/// Contour evaluation of `𝒢(A,t)` with an automatically placed contour.
pub fn green_contour_auto(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigenvalues_of(a)?;
    check_axis(a, &eig)?;
    let half = if t > 0.0 {
        HalfPlane::Left
    } else {
        HalfPlane::Right
    };
    green_contour_on(a, &eig, t, &ContourSpec::auto(&eig, half))
}

fn check_axis(a: &ComplexMatrix, eig: &[Complex64]) -> Result<()> {
    let tol = crate::green::AXIS_RTOL * induced_norm(a, NormKind::Infinity)?;
    match eig.iter().find(|z| z.re.abs() <= tol) {
        Some(&z) => Err(GreenError::SpectrumOnAxis { eigenvalue: z }),
        None => Ok(()),
    }
}

/// `‖(𝒢(A,t) − 𝒢(B,t)) − ∫ 𝒢(A,s)(A−B)𝒢(B,t−s) ds‖_∞`.
///
/// The integrand jumps at `s = 0` and `s = t`, so panels break there; the
/// outer pieces extend `quad.truncation_radius` beyond the breakpoints.
pub fn perturbation_residual(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    t: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    if t == 0.0 {
        return Err(GreenError::UndefinedAtZero);
    }
    if a.n() != b.n() {
        return Err(GreenError::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    if !quad.validate() {
        return Err(GreenError::DomainError("invalid quadrature layout".into()));
    }
    let ka = GreenKernel::new(a)?;
    let kb = GreenKernel::new(b)?;
    let lhs = &ka.evaluate(t)? - &kb.evaluate(t)?;
    let diff = a - b;

    let r = quad.truncation_radius;
    let width = r / quad.panels as f64;
    let lo = t.min(0.0);
    let hi = t.max(0.0);
    let rule = GaussRule::new(quad.nodes_per_panel);
    let mut rhs = ComplexMatrix::zeros(a.n());
    for (x0, x1) in [(lo - r, lo), (lo, hi), (hi, hi + r)] {
        let panels = ((x1 - x0) / width).ceil().max(1.0) as usize;
        for (s, w) in rule.composite(x0, x1, panels) {
            let term = &(&ka.evaluate(s)? * &diff) * &kb.evaluate(t - s)?;
            rhs = &rhs + &term.scale_real(w);
        }
    }
    induced_norm(&(&lhs - &rhs), NormKind::Infinity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::green_function;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_power_is_h() {
        let q = QuadSpec::for_gaps(1.0, 1.5);
        for t in [-2.0, 0.0, 0.37, 3.0] {
            let v = conv_power_numeric(1, t, 1.0, 1.5, &q).unwrap();
            assert!((v - h_eval(t, 1.0, 1.5)).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn second_power_matches_analytic() {
        let q = QuadSpec::for_gaps(1.0, 1.0);
        let v = conv_power_numeric(2, 1.0, 1.0, 1.0, &q).unwrap();
        assert!((v - 2.0 / E).abs() < 1e-7, "{v}");
        assert!((v - 0.735_759_0).abs() < 1e-6);
    }

    #[test]
    fn symmetric_gaps_give_even_powers() {
        let q = QuadSpec::for_gaps(0.5, 0.5);
        let oracle = ConvolutionOracle::new(4, 0.5, 0.5, &q, 0.0);
        for k in 1..=4 {
            for t in [0.5, 1.25, 3.0] {
                let a = oracle.value(k, t).unwrap();
                let b = oracle.value(k, -t).unwrap();
                assert!((a - b).abs() < 1e-12 * a.max(1.0));
            }
        }
    }

    #[test]
    fn contour_scalar_residue() {
        let a = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0)]);
        let g = green_contour_auto(&a, 1.0).unwrap();
        assert!((g[(0, 0)] - c(1.0 / E, 0.0)).norm() < 1e-9);
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0)]);
        let g = green_contour_auto(&a, -1.0).unwrap();
        assert!((g[(0, 0)] - c(-1.0 / E, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn contour_two_by_two_matches_projector_form() {
        let a = ComplexMatrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let g = green_contour_auto(&a, 1.0).unwrap();
        let expected =
            ComplexMatrix::from_real_rows(&[&[1.0 / E, -1.0 / (3.0 * E)], &[0.0, 0.0]]).unwrap();
        assert!((&g - &expected).max_abs() < 1e-8);
        for t in [-2.0, -0.4, 0.3, 2.5] {
            let gc = green_contour_auto(&a, t).unwrap();
            let gf = green_function(&a, t).unwrap();
            assert!((&gc - &gf).max_abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn contour_refinement_converges() {
        let a = ComplexMatrix::from_real_rows(&[&[-0.3, 2.0], &[0.0, 1.0]]).unwrap();
        let exact = green_function(&a, 0.8).unwrap();
        let eig = a.diagonal();
        let err = |nodes| {
            let spec = ContourSpec::enclosing(&eig, HalfPlane::Left, nodes);
            let g = green_contour_on(&a, &eig, 0.8, &spec).unwrap();
            (&g - &exact).max_abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 > 1e-12, "coarse error {e1} already at rounding level");
        assert!(e2 * 4.0 <= e1, "{e1} -> {e2}");
    }

    #[test]
    fn contour_rejects_bad_rectangles() {
        let a = ComplexMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 2.0]]).unwrap();
        let mut spec = ContourSpec::enclosing(&a.diagonal(), HalfPlane::Left, 64);
        spec.rect.re_max = 3.0;
        assert!(green_contour(&a, 1.0, &spec).is_err());
        let on_axis = ComplexMatrix::from_diagonal(&[c(0.0, 1.0)]);
        assert!(matches!(
            green_contour_auto(&on_axis, 1.0),
            Err(GreenError::SpectrumOnAxis { .. })
        ));
        let mut spec = ContourSpec::enclosing(&a.diagonal(), HalfPlane::Left, 64);
        spec.rect.re_min = -1.0;
        assert!(green_contour(&a, 1.0, &spec).is_err());
    }

    #[test]
    fn perturbation_identity_cases() {
        let a = ComplexMatrix::from_real_rows(&[&[-1.0, 0.5], &[0.0, 1.5]]).unwrap();
        let q = QuadSpec::for_gaps(1.0, 1.5);
        assert!(perturbation_residual(&a, &a, 0.7, &q).unwrap() < 1e-14);

        let a = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0)]);
        let b = ComplexMatrix::from_diagonal(&[c(-2.0, 0.0)]);
        let q = QuadSpec::for_gaps(1.0, f64::INFINITY);
        assert!(perturbation_residual(&a, &b, 1.0, &q).unwrap() < 1e-6);

        let a = ComplexMatrix::from_rows(vec![
            vec![c(-0.8, 0.3), c(0.4, -1.0), c(1.2, 0.0)],
            vec![ZERO, c(0.6, -0.5), c(-0.7, 0.2)],
            vec![ZERO, ZERO, c(-1.3, 1.0)],
        ])
        .unwrap();
        let mut b = a.clone();
        b[(0, 1)] += c(0.5, 0.5);
        b[(1, 2)] += c(-0.3, 0.0);
        let q = QuadSpec::for_gaps(0.6, 0.6);
        for t in [0.7, -0.7] {
            assert!(perturbation_residual(&a, &b, t, &q).unwrap() < 1e-5);
        }
    }
}

//! The quadric fibration `q(x) = x_1^2 + ... + x_{n+1}^2` on `C^{n+1}`.
//!
//! `h(x) = |x|^4 - |q(x)|^2` vanishes exactly on `Σ`, the union of the
//! spheres `Σ_z = sqrt(z) S^n`. Off `Σ` the map [`QuadricPoint::phi`]
//! identifies `C^{n+1} \ Σ` with `C x (T \ T(0))` fibrewise.

use num_complex::Complex;

use crate::scalar::Scalar;

use super::{geodesic_flow, lin, norm, tolerance, CotangentPoint, LocalModelError};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadricPoint<S> {
    pub x: Vec<Complex<S>>,
}

fn re<S: Scalar>(x: &[Complex<S>]) -> Vec<S> {
    x.iter().map(|c| c.re).collect()
}

fn im<S: Scalar>(x: &[Complex<S>]) -> Vec<S> {
    x.iter().map(|c| c.im).collect()
}

/// `Σ x_k^2` (no conjugation).
pub fn complex_square_sum<S: Scalar>(x: &[Complex<S>]) -> Complex<S> {
    x.iter()
        .fold(Complex::new(S::zero(), S::zero()), |acc, &c| acc + c * c)
}

fn norm_sq<S: Scalar>(x: &[Complex<S>]) -> S {
    x.iter().fold(S::zero(), |acc, c| acc + c.norm_sqr())
}

impl<S: Scalar> QuadricPoint<S> {
    pub fn new(x: Vec<Complex<S>>) -> Self {
        QuadricPoint { x }
    }

    pub fn from_parts(re: &[S], im: &[S]) -> Self {
        QuadricPoint {
            x: re
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex::new(a, b))
                .collect(),
        }
    }

    pub fn q(&self) -> Complex<S> {
        complex_square_sum(&self.x)
    }

    pub fn norm_sq(&self) -> S {
        norm_sq(&self.x)
    }

    /// `|x|^4 - |q(x)|^2`, evaluated as `4 |re x̂|^2 |im x̂|^2` where `x̂` is
    /// rotated so that `q(x̂)` is real; this avoids cancellation near `Σ`.
    pub fn h(&self) -> S {
        let (r, i) = self.rotated_parts();
        let a = norm(&r);
        let b = norm(&i);
        let four = S::lit(4.0);
        four * a * a * b * b
    }

    /// `α = arg q(x)`, with `α = 0` when `q(x) = 0`.
    pub fn alpha(&self) -> S {
        let q = self.q();
        if q.norm_sqr() == S::zero() {
            S::zero()
        } else {
            q.arg()
        }
    }

    /// `(re x̂, im x̂)` with `x̂ = e^{-iα/2} x`.
    fn rotated_parts(&self) -> (Vec<S>, Vec<S>) {
        let half = self.alpha() * S::lit(0.5);
        let rot = Complex::new(half.cos(), -half.sin());
        let xh: Vec<Complex<S>> = self.x.iter().map(|&c| c * rot).collect();
        (re(&xh), im(&xh))
    }

    /// `Φ(x) = (q(x), σ_{α/2}(-im(x̂) |re(x̂)|, re(x̂) / |re(x̂)|))`.
    pub fn phi(&self) -> Result<(Complex<S>, CotangentPoint<S>), LocalModelError> {
        let h = self.h();
        if h <= S::lit(1e-12) {
            return Err(LocalModelError::OnSigma(h.as_f64()));
        }
        let (r, i) = self.rotated_parts();
        let w = norm(&r);
        let u: Vec<S> = i.iter().map(|&c| -c * w).collect();
        let v: Vec<S> = r.iter().map(|&c| c / w).collect();
        let y = CotangentPoint::retract(&u, &v);
        let flowed = geodesic_flow(&y, self.alpha() * S::lit(0.5))?;
        Ok((self.q(), flowed))
    }

    /// Standard Liouville form `θ = (1/2) Σ (re x d(im x) - im x d(re x))` on `X`.
    pub fn liouville(&self, tangent: &[Complex<S>]) -> S {
        let half = S::lit(0.5);
        self.x.iter().zip(tangent).fold(S::zero(), |acc, (p, t)| {
            acc + half * (p.re * t.im - p.im * t.re)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadricMaps<S> {
    pub q: Complex<S>,
    pub h: S,
    pub phi: Result<(Complex<S>, CotangentPoint<S>), LocalModelError>,
}

pub fn quadric_maps<S: Scalar>(x: &QuadricPoint<S>) -> QuadricMaps<S> {
    QuadricMaps {
        q: x.q(),
        h: x.h(),
        phi: x.phi(),
    }
}

/// The section `w(z) = s^{-1/2} a z + s^{1/2} ā` of `q` over the disc `|z| <= s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionModulus<S> {
    s: S,
    a: Vec<Complex<S>>,
    valid: bool,
}

impl<S: Scalar> SectionModulus<S> {
    /// Requires `q(a) = 0` and `|a|^2 = 1/2`.
    pub fn new(s: S, a: Vec<Complex<S>>) -> Result<Self, LocalModelError> {
        let m = Self::unchecked(s, a);
        if !(s > S::zero()) {
            return Err(LocalModelError::InvalidParameter(format!(
                "s = {s} must be positive"
            )));
        }
        if !m.valid {
            return Err(LocalModelError::InvalidParameter(format!(
                "need q(a) = 0 and |a|^2 = 1/2, got |q(a)| = {}, |a|^2 = {}",
                complex_square_sum(&m.a).norm(),
                norm_sq(&m.a)
            )));
        }
        Ok(m)
    }

    /// Keeps `a` as given and records whether it satisfies the constraints.
    pub fn unchecked(s: S, a: Vec<Complex<S>>) -> Self {
        let tol = tolerance::<S>();
        let valid =
            complex_square_sum(&a).norm() <= tol && (norm_sq(&a) - S::lit(0.5)).abs() <= tol;
        SectionModulus { s, a, valid }
    }

    /// The parameter `a = (v - iu)/2` of a point of the unit sphere bundle.
    pub fn from_unit_covector(s: S, y: &CotangentPoint<S>) -> Result<Self, LocalModelError> {
        let half = S::lit(0.5);
        let a = y
            .u()
            .iter()
            .zip(y.v())
            .map(|(&u, &v)| Complex::new(half * v, -half * u))
            .collect();
        Self::new(s, a)
    }

    pub fn s(&self) -> S {
        self.s
    }

    pub fn a(&self) -> &[Complex<S>] {
        &self.a
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn evaluate(&self, z: Complex<S>) -> Vec<Complex<S>> {
        let rs = self.s.sqrt();
        self.a.iter().map(|&a| a * z / rs + a.conj() * rs).collect()
    }

    /// `(u, v) = (-2 im a, 2 re a)`.
    pub fn evaluation(&self) -> CotangentPoint<S> {
        let two = S::lit(2.0);
        CotangentPoint::raw(
            self.a.iter().map(|c| -two * c.im).collect(),
            self.a.iter().map(|c| two * c.re).collect(),
        )
    }
}

/// Free function form of [`SectionModulus::from_unit_covector`].
pub fn section_from_unit_covector<S: Scalar>(
    s: S,
    y: &CotangentPoint<S>,
) -> Result<SectionModulus<S>, LocalModelError> {
    SectionModulus::from_unit_covector(s, y)
}

/// Distance from `w` to `Σ_z = sqrt(z) S^n`.
pub fn distance_to_sphere<S: Scalar>(w: &[Complex<S>], z: Complex<S>) -> S {
    let rz = z.sqrt();
    let zeta: Vec<Complex<S>> = w.iter().map(|&c| c / rz).collect();
    let r = re(&zeta);
    let nr = norm(&r);
    let nearest: Vec<S> = r.iter().map(|&c| c / nr).collect();
    let diff: Vec<Complex<S>> = zeta
        .iter()
        .zip(&nearest)
        .map(|(&c, &p)| c - Complex::new(p, S::zero()))
        .collect();
    rz.norm() * norm_sq(&diff).sqrt()
}

/// `(t, u, v) ↦ (t, v, -cos(πt) v - sin(πt) u)` on `[0, 1] x S(T*S^n)`.
pub fn parametrized_evaluation<S: Scalar>(t: S, y: &CotangentPoint<S>) -> (S, Vec<S>, Vec<S>) {
    let (s, c) = (S::PI() * t).sin_cos();
    (t, y.v().to_vec(), lin(-c, y.v(), -s, y.u()))
}

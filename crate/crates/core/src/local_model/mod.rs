//! The cotangent-bundle local model of a Dehn twist.
//!
//! `T = {(u, v) in R^{n+1} x R^{n+1} : <u, v> = 0, |v| = 1}` is `T*S^n`, with
//! `v` the base point and `u` the covector. Its Liouville form is
//! `θ_T = <u, dv>` and `μ(u, v) = |u|`. The normalized geodesic flow
//! [`geodesic_flow`] and a [`TwistProfile`] combine into the model twist
//! [`model_twist`]; [`quadric`] carries the explicit formulas for the quadric
//! fibration `q(x) = x_1^2 + ... + x_{n+1}^2` and its section moduli.

mod fibre;
mod profile;
pub mod quadric;
mod twist;

use crate::scalar::Scalar;

pub use fibre::{
    antipodal_tangent_lines, fibre_twist_intersection, AntipodalTangents, FibreIntersection,
    FibreSolver,
};
pub use profile::{tilde_r, tilde_r_d1, tilde_r_d2, Cutoff, TwistProfile, WOBBLY_GRID};
pub use quadric::{
    complex_square_sum, distance_to_sphere, parametrized_evaluation, quadric_maps,
    section_from_unit_covector, QuadricMaps, QuadricPoint, SectionModulus,
};
pub use twist::{liouville, model_twist, model_twist_inverse, symplectic_pairing, twist_moment};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalModelError {
    #[error("point lies on the zero section (|u| = {0:e})")]
    ZeroSection(f64),
    #[error("not a point of T*S^n: {0}")]
    InvalidPoint(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("point lies on the singular set (h = {0:e})")]
    OnSigma(f64),
}

/// Threshold below which `|u|` counts as zero.
pub const ZERO_SECTION_EPS: f64 = 1e-12;

/// Validation tolerance: `1e-9` in double precision, looser for `f32`.
pub fn tolerance<S: Scalar>() -> S {
    S::lit(1e-9).max(S::epsilon() * S::lit(1e3))
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// `alpha * a + beta * b`
pub(crate) fn lin<S: Scalar>(alpha: S, a: &[S], beta: S, b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| alpha * x + beta * y)
        .collect()
}

pub(crate) fn scaled<S: Scalar>(alpha: S, a: &[S]) -> Vec<S> {
    a.iter().map(|&x| alpha * x).collect()
}

/// Orthonormal basis of the complement of the unit vector `v`.
pub fn orthonormal_complement<S: Scalar>(v: &[S]) -> Vec<Vec<S>> {
    let dim = v.len();
    let mut basis: Vec<Vec<S>> = Vec::with_capacity(dim.saturating_sub(1));
    let mut order: Vec<usize> = (0..dim).collect();
    // Start from the coordinate axes least aligned with v.
    order.sort_by(|&i, &j| v[i].abs().partial_cmp(&v[j].abs()).unwrap());
    for k in order {
        if basis.len() + 1 == dim {
            break;
        }
        let mut e = vec![S::zero(); dim];
        e[k] = S::one();
        for w in std::iter::once(v).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&e, w);
            e = lin(S::one(), &e, -c, w);
        }
        let len = norm(&e);
        if len > S::lit(1e-6) {
            basis.push(scaled(S::one() / len, &e));
        }
    }
    basis
}

/// A point `(u, v)` of `T*S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint<S> {
    u: Vec<S>,
    v: Vec<S>,
}

impl<S: Scalar> CotangentPoint<S> {
    pub fn new(u: Vec<S>, v: Vec<S>) -> Result<Self, LocalModelError> {
        if u.len() != v.len() || u.len() < 2 {
            return Err(LocalModelError::InvalidPoint(format!(
                "lengths {} and {} (need equal, at least 2)",
                u.len(),
                v.len()
            )));
        }
        let tol = tolerance::<S>();
        let uv = dot(&u, &v);
        let nv = norm(&v);
        if uv.abs() > tol || (nv - S::one()).abs() > tol {
            return Err(LocalModelError::InvalidPoint(format!(
                "<u,v> = {uv}, |v| = {nv}"
            )));
        }
        Ok(CotangentPoint { u, v })
    }

    /// No validation; used where the constraints hold by construction.
    pub(crate) fn raw(u: Vec<S>, v: Vec<S>) -> Self {
        CotangentPoint { u, v }
    }

    /// Projects an arbitrary pair back onto `T`: normalize `v`, then remove
    /// the `v`-component of `u`.
    pub fn retract(u: &[S], v: &[S]) -> Self {
        let v = scaled(S::one() / norm(v), v);
        let c = dot(u, &v);
        let u = lin(S::one(), u, -c, &v);
        CotangentPoint { u, v }
    }

    /// Point `(0, v)` of the zero section.
    pub fn on_zero_section(v: Vec<S>) -> Result<Self, LocalModelError> {
        Self::new(vec![S::zero(); v.len()], v)
    }

    pub fn u(&self) -> &[S] {
        &self.u
    }

    pub fn v(&self) -> &[S] {
        &self.v
    }

    /// The `n` of `T*S^n`.
    pub fn dim(&self) -> usize {
        self.u.len() - 1
    }

    /// The length function `μ = |u|`.
    pub fn mu(&self) -> S {
        norm(&self.u)
    }

    pub fn is_on_zero_section(&self) -> bool {
        self.mu() < S::lit(ZERO_SECTION_EPS)
    }

    /// `(u, v)` flattened into one vector of length `2n + 2`.
    pub fn to_flat(&self) -> Vec<S> {
        self.u.iter().chain(&self.v).copied().collect()
    }

    /// Euclidean distance in `R^{2n+2}`.
    pub fn distance(&self, other: &Self) -> S {
        let du = lin(S::one(), &self.u, -S::one(), &other.u);
        let dv = lin(S::one(), &self.v, -S::one(), &other.v);
        (dot(&du, &du) + dot(&dv, &dv)).sqrt()
    }

    /// Residuals `(<u,v>, |v| - 1)`.
    pub fn constraint_residual(&self) -> (S, S) {
        (dot(&self.u, &self.v), norm(&self.v) - S::one())
    }
}

/// The antipodal involution `A(u, v) = (-u, -v)`.
pub fn antipodal<S: Scalar>(y: &CotangentPoint<S>) -> CotangentPoint<S> {
    CotangentPoint::raw(scaled(-S::one(), &y.u), scaled(-S::one(), &y.v))
}

/// The normalized geodesic flow
/// `σ_t(u, v) = (cos t u - sin t |u| v, cos t v + sin t u / |u|)`.
pub fn geodesic_flow<S: Scalar>(
    y: &CotangentPoint<S>,
    t: S,
) -> Result<CotangentPoint<S>, LocalModelError> {
    let mu = y.mu();
    if mu < S::lit(ZERO_SECTION_EPS) {
        return Err(LocalModelError::ZeroSection(mu.as_f64()));
    }
    let (s, c) = t.sin_cos();
    Ok(CotangentPoint::raw(
        lin(c, &y.u, -s * mu, &y.v),
        lin(c, &y.v, s / mu, &y.u),
    ))
}

/// Spherical distance `arccos <y0, y1>` between unit vectors.
pub fn sphere_distance<S: Scalar>(y0: &[S], y1: &[S]) -> S {
    // atan2 form stays accurate near 0 and π.
    let sum = lin(S::one(), y0, S::one(), y1);
    let diff = lin(S::one(), y0, -S::one(), y1);
    S::lit(2.0) * norm(&diff).atan2(norm(&sum))
}

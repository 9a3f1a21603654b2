use crate::scalar::Scalar;

use super::{antipodal, dot, geodesic_flow, CotangentPoint, TwistProfile, ZERO_SECTION_EPS};

fn rotate<S: Scalar>(p: &TwistProfile<S>, y: &CotangentPoint<S>, sign: S) -> CotangentPoint<S> {
    let mu = y.mu();
    if mu < S::lit(ZERO_SECTION_EPS) {
        return antipodal(y);
    }
    let angle = sign * S::TAU() * p.d1(mu);
    if angle == S::zero() {
        return y.clone();
    }
    geodesic_flow(y, angle).expect("off the zero section")
}

/// `τ(y) = σ_{2πR'(μ(y))}(y)` off the zero section, `A(y)` on it.
pub fn model_twist<S: Scalar>(p: &TwistProfile<S>, y: &CotangentPoint<S>) -> CotangentPoint<S> {
    rotate(p, y, S::one())
}

/// `τ^{-1}`: the same rotation with the angle negated.
pub fn model_twist_inverse<S: Scalar>(
    p: &TwistProfile<S>,
    y: &CotangentPoint<S>,
) -> CotangentPoint<S> {
    rotate(p, y, -S::one())
}

/// `K = 2π(R'(μ)μ - R(μ))`, continuous with value `-2πR(0)` on the zero section.
pub fn twist_moment<S: Scalar>(p: &TwistProfile<S>, y: &CotangentPoint<S>) -> S {
    let mu = y.mu();
    S::TAU() * (p.d1(mu) * mu - p.value(mu))
}

/// `θ_T = <u, dv>` evaluated on a tangent vector `(du, dv)` at `y`.
pub fn liouville<S: Scalar>(y: &CotangentPoint<S>, dv: &[S]) -> S {
    dot(y.u(), dv)
}

/// `ω = Σ du_i ∧ dv_i` on two ambient tangent vectors given as flat
/// `(du, dv)` arrays of length `2n + 2`.
pub fn symplectic_pairing<S: Scalar>(a: &[S], b: &[S]) -> S {
    let m = a.len() / 2;
    (0..m).fold(S::zero(), |acc, i| acc + a[i] * b[m + i] - a[m + i] * b[i])
}

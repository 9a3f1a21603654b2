use crate::scalar::Scalar;

use super::{
    dot, lin, model_twist, model_twist_inverse, norm, orthonormal_complement, scaled,
    sphere_distance, tolerance, CotangentPoint, LocalModelError, TwistProfile,
};

/// The intersection point of `τ(F_0)` with `F_1`, where `F_i` is the fibre
/// of `T*S^n` over `y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FibreIntersection<S> {
    pub point: CotangentPoint<S>,
    /// `R''(|y|) < 0`, or the antipodal case with `R''(0) != 0`.
    pub transverse: bool,
    /// `|y|`.
    pub radius: S,
    /// `|2πR'(|y|) - dist(y0, y1)|`.
    pub residual: S,
    /// Distance of the base point of `τ^{-1}(y)` from `y0`.
    pub preimage_error: S,
    /// Sign changes of `2πR'(t) - dist` over the dense grid on `[0, λ]`; one
    /// for a unique solution. `None` when the count was skipped.
    pub crossings: Option<usize>,
}

fn unit<S: Scalar>(y: &[S], name: &str) -> Result<(), LocalModelError> {
    if (norm(y) - S::one()).abs() > tolerance::<S>() {
        return Err(LocalModelError::InvalidParameter(format!(
            "{name} is not a unit vector"
        )));
    }
    Ok(())
}

fn count_crossings<S: Scalar>(p: &TwistProfile<S>, dist: S) -> usize {
    let f = |t: S| S::TAU() * p.d1(t) - dist;
    let grid = p.sample_grid();
    let signs: Vec<bool> = grid
        .iter()
        .map(|&t| f(t))
        .filter(|v| *v != S::zero())
        .map(|v| v > S::zero())
        .collect();
    let exact_zeros = grid.iter().filter(|&&t| f(t) == S::zero()).count();
    signs.windows(2).filter(|w| w[0] != w[1]).count() + exact_zeros
}

/// Solves `τ(F_0) ∩ F_1` for a δ-wobbly profile.
///
/// The solution is `y = (t ĉ'(d), y1)` where `c` is the unit-speed geodesic
/// from `y0` to `y1`, `d = dist(y0, y1)` and `t` solves `2πR'(t) = d`. It is
/// found by bisection on `[0, t_δ]`; when `y1 = -y0` the answer is `(0, y1)`.
pub fn fibre_twist_intersection<S: Scalar>(
    p: &TwistProfile<S>,
    y0: &[S],
    y1: &[S],
    delta: S,
) -> Result<FibreIntersection<S>, LocalModelError> {
    FibreSolver::new(*p, delta)?.solve(y0, y1, true)
}

/// [`fibre_twist_intersection`] with the profile checks done once.
#[derive(Debug, Clone, Copy)]
pub struct FibreSolver<S> {
    profile: TwistProfile<S>,
    delta: S,
    t_delta: S,
}

impl<S: Scalar> FibreSolver<S> {
    pub fn new(profile: TwistProfile<S>, delta: S) -> Result<Self, LocalModelError> {
        if !profile.is_delta_wobbly(delta)? {
            return Err(LocalModelError::InvalidParameter(format!(
                "profile is not {delta}-wobbly"
            )));
        }
        Ok(FibreSolver {
            profile,
            delta,
            t_delta: profile.t_delta(delta)?,
        })
    }

    pub fn profile(&self) -> &TwistProfile<S> {
        &self.profile
    }

    /// Solves for one pair; `count` also scans for further roots.
    pub fn solve(
        &self,
        y0: &[S],
        y1: &[S],
        count: bool,
    ) -> Result<FibreIntersection<S>, LocalModelError> {
        let p = &self.profile;
        if y0.len() != y1.len() || y0.len() < 2 {
            return Err(LocalModelError::InvalidParameter(
                "fibre dimensions differ".into(),
            ));
        }
        unit(y0, "y0")?;
        unit(y1, "y1")?;
        let dist = sphere_distance(y0, y1);
        if dist < S::TAU() * self.delta {
            return Err(LocalModelError::NoSolution(format!(
                "dist(y0, y1) = {dist} below 2πδ = {}",
                S::TAU() * self.delta
            )));
        }
        let crossings = count.then(|| count_crossings(p, dist));

        let sum = lin(S::one(), y0, S::one(), y1);
        if norm(&sum) < S::lit(1e-12) {
            let point = CotangentPoint::raw(vec![S::zero(); y1.len()], y1.to_vec());
            let pre = model_twist_inverse(p, &point);
            return Ok(FibreIntersection {
                transverse: p.d2(S::zero()) != S::zero(),
                radius: S::zero(),
                residual: (S::TAU() * p.d1(S::zero()) - dist).abs(),
                preimage_error: norm(&lin(S::one(), pre.v(), -S::one(), y0)),
                crossings,
                point,
            });
        }

        let f = |t: S| S::TAU() * p.d1(t) - dist;
        let mut hi = self.t_delta;
        if f(hi) > S::zero() {
            // The root sits between t_δ and the next grid point.
            hi = (hi + p.lambda() / S::lit(super::WOBBLY_GRID as f64)).min(p.lambda());
        }
        let mut lo = S::zero();
        for _ in 0..200 {
            let mid = (lo + hi) * S::lit(0.5);
            if f(mid) > S::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = if f(lo).abs() <= f(hi).abs() { lo } else { hi };

        let (sd, cd) = dist.sin_cos();
        let e = scaled(S::one() / sd, &lin(S::one(), y1, -cd, y0));
        let dir = lin(-sd, y0, cd, &e);
        let dir = scaled(S::one() / norm(&dir), &dir);
        let point = CotangentPoint::retract(&scaled(t, &dir), y1);
        let pre = model_twist_inverse(p, &point);
        Ok(FibreIntersection {
            transverse: p.d2(t) < S::zero(),
            radius: t,
            residual: f(t).abs(),
            preimage_error: norm(&lin(S::one(), pre.v(), -S::one(), y0)),
            crossings,
            point,
        })
    }
}

/// Tangent lines at the antipodal intersection `(0, y1)`, `y0 = -y1`, in the
/// complex coordinate `du + i dv` on `y1^⊥ ⊗ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntipodalTangents<S> {
    /// `D τ (ξ, 0)` for an orthonormal basis `ξ` of `y1^⊥`, as `(du, dv)`.
    pub twisted_fibre: Vec<(Vec<S>, Vec<S>)>,
    /// Tangent vectors `(0, ξ)` of the zero section: the line `iR^n`.
    pub zero_section: Vec<(Vec<S>, Vec<S>)>,
    /// Tangent vectors `(ξ, 0)` of `F_1`: the line `R^n`.
    pub fibre: Vec<(Vec<S>, Vec<S>)>,
    /// Measured `dv / du` along each twisted direction.
    pub measured_slopes: Vec<S>,
    /// `2πR''(0)`; the twisted fibre is `(1 + 2πi R''(0)) R^n`.
    pub predicted_slope: S,
    /// Largest component of `D τ (ξ, 0)` off the complex line through `ξ`.
    pub off_line_error: S,
}

/// Finite-difference tangent data of `τ(F_0)`, `F_1` and the zero section at
/// `(0, y1)`, with `y0 = -y1`.
pub fn antipodal_tangent_lines<S: Scalar>(
    p: &TwistProfile<S>,
    y1: &[S],
) -> Result<AntipodalTangents<S>, LocalModelError> {
    unit(y1, "y1")?;
    let y0 = scaled(-S::one(), y1);
    let h = S::lit(1e-5).max(S::epsilon().sqrt());
    let basis = orthonormal_complement(y1);
    let zero = vec![S::zero(); y1.len()];
    let mut twisted = Vec::new();
    let mut slopes = Vec::new();
    let mut off = S::zero();
    for xi in &basis {
        let plus = model_twist(p, &CotangentPoint::raw(scaled(h, xi), y0.clone()));
        let minus = model_twist(p, &CotangentPoint::raw(scaled(-h, xi), y0.clone()));
        let inv = S::one() / (h + h);
        let du = scaled(inv, &lin(S::one(), plus.u(), -S::one(), minus.u()));
        let dv = scaled(inv, &lin(S::one(), plus.v(), -S::one(), minus.v()));
        let a = dot(&du, xi);
        let b = dot(&dv, xi);
        slopes.push(b / a);
        let ru = lin(S::one(), &du, -a, xi);
        let rv = lin(S::one(), &dv, -b, xi);
        off = off.max(norm(&ru)).max(norm(&rv));
        twisted.push((du, dv));
    }
    Ok(AntipodalTangents {
        twisted_fibre: twisted,
        zero_section: basis.iter().map(|xi| (zero.clone(), xi.clone())).collect(),
        fibre: basis.iter().map(|xi| (xi.clone(), zero.clone())).collect(),
        measured_slopes: slopes,
        predicted_slope: S::TAU() * p.d2(S::zero()),
        off_line_error: off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipodal_case_is_exact() {
        let p = TwistProfile::new(0.02, 1.0).unwrap();
        let y0 = [0.0, 0.0, 1.0];
        let y1 = [0.0, 0.0, -1.0];
        let r = fibre_twist_intersection(&p, &y0, &y1, 0.01).unwrap();
        assert_eq!(r.point.v(), &y1);
        assert!(r.point.u().iter().all(|&x| x == 0.0));
        assert!(r.transverse);
        assert_eq!(r.crossings, Some(1));
    }

    #[test]
    fn generic_case() {
        let p = TwistProfile::new(0.02, 1.0).unwrap();
        let y0 = [1.0, 0.0, 0.0];
        let y1 = [0.0, 1.0, 0.0];
        let r = fibre_twist_intersection(&p, &y0, &y1, 0.01).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
        assert!(r.preimage_error < 1e-7);
        assert!(r.transverse);
        assert_eq!(r.crossings, Some(1));
        assert_eq!(r.point.v(), &y1);
    }

    #[test]
    fn too_close_has_no_solution() {
        let p = TwistProfile::new(0.02, 1.0).unwrap();
        let y0 = [1.0, 0.0];
        let y1 = [(0.01f64).cos(), (0.01f64).sin()];
        assert!(matches!(
            fibre_twist_intersection(&p, &y0, &y1, 0.01),
            Err(LocalModelError::NoSolution(_))
        ));
    }

    #[test]
    fn tangent_lines_at_antipode() {
        let p = TwistProfile::new(0.2f64, 1.0).unwrap();
        let t = antipodal_tangent_lines(&p, &[0.0f64, 1.0, 0.0]).unwrap();
        assert_eq!(t.twisted_fibre.len(), 2);
        for s in &t.measured_slopes {
            assert!(
                (s - t.predicted_slope).abs() < 1e-6,
                "{s} vs {}",
                t.predicted_slope
            );
        }
        assert!(t.off_line_error < 1e-6);
    }
}

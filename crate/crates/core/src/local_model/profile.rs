use crate::scalar::Scalar;

use super::LocalModelError;

/// Grid resolution used by the wobbliness test: step `λ / WOBBLY_GRID`.
pub const WOBBLY_GRID: usize = 10_000;

/// `R̃_s(t) = t/2 - sqrt(t^2 + s^2/4)/2`.
///
/// For `t >= 0` evaluated as `-(c/2) / (t + sqrt(t^2 + c))`, `c = s^2/4`,
/// which avoids cancellation for large `t`.
pub fn tilde_r<S: Scalar>(s: S, t: S) -> S {
    let half = S::lit(0.5);
    let c = s * s * S::lit(0.25);
    let root = (t * t + c).sqrt();
    if t >= S::zero() {
        if c == S::zero() {
            return S::zero();
        }
        -(half * c) / (t + root)
    } else {
        half * t - half * root
    }
}

/// `d/dt R̃_s(t) = (1 - t / sqrt(t^2 + c)) / 2`.
pub fn tilde_r_d1<S: Scalar>(s: S, t: S) -> S {
    let half = S::lit(0.5);
    let c = s * s * S::lit(0.25);
    let root = (t * t + c).sqrt();
    if t >= S::zero() {
        if c == S::zero() {
            return S::zero();
        }
        half * c / (root * (root + t))
    } else {
        half - half * t / root
    }
}

/// `d²/dt² R̃_s(t) = -(c/2) (t^2 + c)^{-3/2}`.
pub fn tilde_r_d2<S: Scalar>(s: S, t: S) -> S {
    let c = s * s * S::lit(0.25);
    if c == S::zero() {
        return S::zero();
    }
    let q = t * t + c;
    -S::lit(0.5) * c / (q * q.sqrt())
}

/// Shape of the cutoff `g` with `R = (1 - g) R̃_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cutoff {
    /// `g(t) = 6x^5 - 15x^4 + 10x^3`, `x = (t - λ/4) / (λ/2)` clamped to `[0, 1]`:
    /// zero on `[0, λ/4]`, one on `[3λ/4, ∞)`.
    #[default]
    QuinticSmoothstep,
}

/// `R_r(t) = (1 - g(t)) R̃_r(t)`, supported in `[0, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistProfile<S> {
    r: S,
    lambda: S,
    cutoff: Cutoff,
}

impl<S: Scalar> TwistProfile<S> {
    pub fn new(r: S, lambda: S) -> Result<Self, LocalModelError> {
        if !(r > S::zero() && r < S::lit(0.5)) {
            return Err(LocalModelError::InvalidParameter(format!(
                "r = {r} outside (0, 1/2)"
            )));
        }
        if !(lambda > S::zero()) || !lambda.is_finite() {
            return Err(LocalModelError::InvalidParameter(format!(
                "lambda = {lambda} must be positive"
            )));
        }
        Ok(TwistProfile {
            r,
            lambda,
            cutoff: Cutoff::QuinticSmoothstep,
        })
    }

    pub fn r(&self) -> S {
        self.r
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// `(g, g', g'')` at `t`.
    pub fn cutoff_at(&self, t: S) -> (S, S, S) {
        match self.cutoff {
            Cutoff::QuinticSmoothstep => {
                let w = self.lambda * S::lit(0.5);
                let x = (t - self.lambda * S::lit(0.25)) / w;
                if x <= S::zero() {
                    return (S::zero(), S::zero(), S::zero());
                }
                if x >= S::one() {
                    return (S::one(), S::zero(), S::zero());
                }
                let x2 = x * x;
                let x3 = x2 * x;
                let one_m = S::one() - x;
                let g = x3 * (S::lit(10.0) + x * (S::lit(-15.0) + S::lit(6.0) * x));
                let g1 = S::lit(30.0) * x2 * one_m * one_m / w;
                let g2 = S::lit(60.0) * x * one_m * (S::one() - S::lit(2.0) * x) / (w * w);
                (g, g1, g2)
            }
        }
    }

    /// `R(t)`.
    pub fn value(&self, t: S) -> S {
        if t >= self.lambda {
            return S::zero();
        }
        let (g, _, _) = self.cutoff_at(t);
        (S::one() - g) * tilde_r(self.r, t)
    }

    /// `R'(t)`.
    pub fn d1(&self, t: S) -> S {
        if t >= self.lambda {
            return S::zero();
        }
        let (g, g1, _) = self.cutoff_at(t);
        -g1 * tilde_r(self.r, t) + (S::one() - g) * tilde_r_d1(self.r, t)
    }

    /// `R''(t)`.
    pub fn d2(&self, t: S) -> S {
        if t >= self.lambda {
            return S::zero();
        }
        let (g, g1, g2) = self.cutoff_at(t);
        let two = S::lit(2.0);
        -g2 * tilde_r(self.r, t) - two * g1 * tilde_r_d1(self.r, t)
            + (S::one() - g) * tilde_r_d2(self.r, t)
    }

    /// Sample points of the wobbliness test: a uniform grid of step
    /// `λ / WOBBLY_GRID` plus the cutoff breakpoints `λ/4` and `3λ/4`.
    pub fn sample_grid(&self) -> Vec<S> {
        let step = self.lambda / S::lit(WOBBLY_GRID as f64);
        let mut ts: Vec<S> = (0..=WOBBLY_GRID).map(|k| step * S::lit(k as f64)).collect();
        ts.push(self.lambda * S::lit(0.25));
        ts.push(self.lambda * S::lit(0.75));
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts
    }

    fn check_delta(delta: S) -> Result<(), LocalModelError> {
        if !(delta > S::zero() && delta < S::lit(0.5)) {
            return Err(LocalModelError::InvalidParameter(format!(
                "delta = {delta} outside (0, 1/2)"
            )));
        }
        Ok(())
    }

    /// `R' >= 0` everywhere and `R'' < 0` wherever `R' >= δ`, on the sample grid.
    pub fn is_delta_wobbly(&self, delta: S) -> Result<bool, LocalModelError> {
        Self::check_delta(delta)?;
        Ok(self.wobbly_violation(delta).is_none())
    }

    /// First sample point where wobbliness fails.
    pub fn wobbly_violation(&self, delta: S) -> Option<S> {
        self.sample_grid().into_iter().find(|&t| {
            let d1 = self.d1(t);
            d1 < S::zero() || (d1 >= delta && !(self.d2(t) < S::zero()))
        })
    }

    /// Largest grid point with `R' >= δ`.
    pub fn t_delta(&self, delta: S) -> Result<S, LocalModelError> {
        Self::check_delta(delta)?;
        self.sample_grid()
            .into_iter()
            .filter(|&t| self.d1(t) >= delta)
            .fold(None, |acc: Option<S>, t| Some(acc.map_or(t, |a| a.max(t))))
            .ok_or_else(|| LocalModelError::InvalidParameter("R' < delta everywhere".into()))
    }

    /// Largest `r` of the form `r0 / 2^k` (`k < 60`) giving a δ-wobbly
    /// profile with this cutoff.
    pub fn shrink_until_wobbly(r0: S, lambda: S, delta: S) -> Result<Self, LocalModelError> {
        let mut r = r0;
        for _ in 0..60 {
            let p = TwistProfile::new(r, lambda)?;
            if p.is_delta_wobbly(delta)? {
                return Ok(p);
            }
            r = r * S::lit(0.5);
        }
        Err(LocalModelError::InvalidParameter(format!(
            "no wobbly profile below r = {r0} for lambda = {lambda}, delta = {delta}"
        )))
    }
}

//! Straight curves on the square torus `R^2 / Z^2` and their Dehn twists.
//!
//! A [`SlopeCurve`] with primitive direction `(p, q)` and offset `c` is the
//! closed line `q x - p y = c (mod 1)`, traversed in direction `(p, q)`.
//! Twisting `A` along `L` acts on homology by
//! `[A] ↦ [A] + det(A, L) [L]` with `det(A, B) = p_A q_B - q_A p_B`; the
//! opposite handedness is available through [`TwistConvention::Negative`].

mod book;
mod pl;
mod svg;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use book::{
    build_floer_scenario, FloerScenario, IntersectionBook, PPoint, QPoint, ScenarioError,
    ScenarioParams, GRADE_DENOMINATOR,
};
pub use pl::{
    admissible_width, count_decomposition, twisted_pl_curve, CountDecomposition, PLCurve,
};
pub use svg::{render_svg, SvgScene};

pub type Point = (Rational64, Rational64);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("direction ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("curves coincide")]
    NonTransverse,
    #[error("curves {0} and {1} are parallel")]
    Parallel(String, String),
    #[error("triple point at ({0}, {1})")]
    TriplePoint(String, String),
    #[error("splice width {0} too large (limit {1})")]
    WidthTooLarge(f64, f64),
}

/// Handedness of the twist on homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistConvention {
    /// `[A] + det(A, L) [L]`
    #[default]
    Positive,
    /// `[A] - det(A, L) [L]`
    Negative,
}

impl TwistConvention {
    pub fn sign(self) -> i64 {
        match self {
            TwistConvention::Positive => 1,
            TwistConvention::Negative => -1,
        }
    }
}

/// The line `q x - p y = offset` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlopeCurve {
    p: i64,
    q: i64,
    #[serde(with = "rational_str")]
    offset: Rational64,
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

impl SlopeCurve {
    pub fn new(p: i64, q: i64, offset: Rational64) -> Result<Self, TorusError> {
        if p.gcd(&q) != 1 {
            return Err(TorusError::NotPrimitive(p, q));
        }
        Ok(SlopeCurve {
            p,
            q,
            offset: frac(offset),
        })
    }

    /// Offset `k / den`.
    pub fn with_offset(p: i64, q: i64, k: i64, den: i64) -> Result<Self, TorusError> {
        Self::new(p, q, Rational64::new(k, den))
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn direction(&self) -> (i64, i64) {
        (self.p, self.q)
    }

    pub fn offset(&self) -> Rational64 {
        self.offset
    }

    /// `q x - p y - offset` (not reduced).
    pub fn level(&self, pt: Point) -> Rational64 {
        Rational64::from(self.q) * pt.0 - Rational64::from(self.p) * pt.1 - self.offset
    }

    /// Same as [`SlopeCurve::level`] in floating point.
    pub fn level_f64(&self, x: f64, y: f64) -> f64 {
        self.q as f64 * x - self.p as f64 * y - r64(self.offset)
    }

    pub fn contains(&self, pt: Point) -> bool {
        self.level(pt).is_integer()
    }

    /// A point on the curve; `base_point() + t (p, q)`, `t in [0, 1)`,
    /// traverses it once.
    pub fn base_point(&self) -> Point {
        // a q + b (-p) = 1
        let e = self.q.extended_gcd(&(-self.p));
        let (a, b) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
        (
            frac(Rational64::from(a) * self.offset),
            frac(Rational64::from(b) * self.offset),
        )
    }

    pub fn point_at(&self, t: Rational64) -> Point {
        let (x, y) = self.base_point();
        (
            frac(x + t * Rational64::from(self.p)),
            frac(y + t * Rational64::from(self.q)),
        )
    }

    /// Same curve as a set, traversed the other way.
    pub fn reversed(&self) -> Self {
        SlopeCurve {
            p: -self.p,
            q: -self.q,
            offset: frac(-self.offset),
        }
    }

    /// Direction with `p > 0`, or `(0, 1)`.
    pub fn canonical_direction(p: i64, q: i64) -> (i64, i64) {
        if p < 0 || (p == 0 && q < 0) {
            (-p, -q)
        } else {
            (p, q)
        }
    }
}

impl std::fmt::Display for SlopeCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})+{}", self.p, self.q, self.offset)
    }
}

pub(crate) fn r64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `p_A q_B - q_A p_B`.
pub fn det_pair(a: &SlopeCurve, b: &SlopeCurve) -> i64 {
    a.p * b.q - a.q * b.p
}

/// Parameters `t in [0, 1)` along `a` where it meets `b`.
pub fn crossing_parameters(a: &SlopeCurve, b: &SlopeCurve) -> Vec<Rational64> {
    let d = det_pair(a, b);
    if d == 0 {
        return Vec::new();
    }
    // Along a, level_b(t) = level_b(P0) + t det(a, b).
    let g0 = b.level(a.base_point());
    let dr = Rational64::from(d);
    let mut ts: Vec<Rational64> = (0..d.abs())
        .map(|k| {
            let n = g0.ceil() + Rational64::from(k);
            frac((n - g0) / dr)
        })
        .collect();
    ts.sort();
    ts
}

/// One parameter along `a` where it meets `b`, for non-parallel curves.
fn some_crossing(a: &SlopeCurve, b: &SlopeCurve) -> Rational64 {
    let g0 = b.level(a.base_point());
    frac((g0.ceil() - g0) / Rational64::from(det_pair(a, b)))
}

/// The `|det(a, b)|` points of `a ∩ b`, or none for parallel distinct curves.
pub fn intersections(a: &SlopeCurve, b: &SlopeCurve) -> Result<Vec<Point>, TorusError> {
    if det_pair(a, b) == 0 {
        let same =
            (a.p == b.p && a.offset == b.offset) || (a.p == -b.p && a.offset == frac(-b.offset));
        if same && (a.q == b.q || a.q == -b.q) {
            return Err(TorusError::NonTransverse);
        }
        return Ok(Vec::new());
    }
    let mut pts: Vec<Point> = crossing_parameters(a, b)
        .into_iter()
        .map(|t| a.point_at(t))
        .collect();
    pts.sort();
    pts.dedup();
    Ok(pts)
}

/// Homological image of `a` under the twist along `l`; the offset is kept.
pub fn twist_slope(l: &SlopeCurve, a: &SlopeCurve, convention: TwistConvention) -> SlopeCurve {
    twist_power(l, a, convention.sign())
}

/// `[A] + k det(A, L) [L]`: the `k`-fold twist (negative `k` for inverses).
pub fn twist_power(l: &SlopeCurve, a: &SlopeCurve, k: i64) -> SlopeCurve {
    let d = det_pair(a, l);
    SlopeCurve {
        p: a.p + k * d * l.p,
        q: a.q + k * d * l.q,
        offset: a.offset,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankConsistency {
    /// `|det(τ_L A, B)|`.
    pub lhs: i64,
    /// `|det(A, B)| + |det(A, L) det(L, B)|`.
    pub rhs_sum: i64,
    /// `(rhs_sum - lhs) / 2`.
    pub conn_rank: i64,
}

impl RankConsistency {
    pub fn is_consistent(&self) -> bool {
        self.conn_rank >= 0 && (self.rhs_sum - self.lhs) % 2 == 0
    }
}

pub fn check_nonparallel(curves: &[&SlopeCurve]) -> Result<(), TorusError> {
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            if det_pair(a, b) == 0 {
                return Err(TorusError::Parallel(a.to_string(), b.to_string()));
            }
        }
    }
    Ok(())
}

/// Rank bookkeeping of the exact sequence for minimal-position slopes.
pub fn rank_consistency(
    l: &SlopeCurve,
    a: &SlopeCurve,
    b: &SlopeCurve,
    convention: TwistConvention,
) -> Result<RankConsistency, TorusError> {
    check_nonparallel(&[l, a, b])?;
    let lhs = det_pair(&twist_slope(l, a, convention), b).abs();
    let rhs_sum = det_pair(a, b).abs() + (det_pair(a, l) * det_pair(l, b)).abs();
    Ok(RankConsistency {
        lhs,
        rhs_sum,
        conn_rank: (rhs_sum - lhs) / 2,
    })
}

/// A common point of `l`, `a`, `b`, if any.
pub fn triple_point(l: &SlopeCurve, a: &SlopeCurve, b: &SlopeCurve) -> Option<Point> {
    intersections(a, b)
        .ok()?
        .into_iter()
        .find(|&pt| l.contains(pt))
}

/// Primitive directions up to sign with `|p|, |q| <= bound`, in a fixed order.
pub fn primitive_directions(bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 0..=bound {
        for q in -bound..=bound {
            if p.gcd(&q) == 1 && SlopeCurve::canonical_direction(p, q) == (p, q) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Denominator of the generic offset lattice.
pub const OFFSET_DENOMINATOR: i64 = 97;

/// Position along `l` of a point on it, as a fraction of a full turn.
///
/// Uses the coordinate `s = m x + n y` with `m p_L + n q_L = 1`, which
/// advances by one along the direction of `l`.
pub fn position_along(l: &SlopeCurve, pt: Point) -> Rational64 {
    let e = l.p.extended_gcd(&l.q);
    let (m, n) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
    frac(Rational64::from(m) * pt.0 + Rational64::from(n) * pt.1)
}

/// Distance on the circle `R / Z`.
pub fn circle_distance(a: Rational64, b: Rational64) -> Rational64 {
    let d = frac(a - b);
    d.min(Rational64::one() - d)
}

/// Signed distance of a point from `l` in the transverse coordinate, in `(-1/2, 1/2]`.
pub fn transverse_coordinate(l: &SlopeCurve, pt: Point) -> Rational64 {
    let h = frac(l.level(pt));
    if h > Rational64::new(1, 2) {
        h - Rational64::one()
    } else {
        h
    }
}

/// Distance from `x` to the lattice `spacing Z`.
fn lattice_distance(x: Rational64, spacing: Rational64) -> Rational64 {
    let r = frac(x / spacing);
    r.min(Rational64::one() - r) * spacing
}

/// Genericity margin of a configuration: the smallest of the circle
/// distances between `a ∩ l` and `b ∩ l` along `l` and the transverse
/// distances of `a ∩ b` from `l`. Zero means a triple point.
///
/// The crossings of `a` along `l` are spaced by `1/|det(a, l)|`, so the first
/// term is the distance of one difference to the lattice
/// `gcd(d₀, d₁) / (d₀ d₁) Z`; the transverse coordinates of `a ∩ b` likewise
/// form a coset of `gcd(det(a, l), det(a, b)) / |det(a, b)| Z`.
pub fn genericity_margin(l: &SlopeCurve, a: &SlopeCurve, b: &SlopeCurve) -> Rational64 {
    let d0 = det_pair(a, l).abs();
    let d1 = det_pair(l, b).abs();
    let dab = det_pair(a, b).abs();
    let mut m = Rational64::new(1, 2);
    if d0 > 0 && d1 > 0 {
        let sa = position_along(l, l.point_at(some_crossing(l, a)));
        let sb = position_along(l, l.point_at(some_crossing(l, b)));
        m = m.min(lattice_distance(
            sa - sb,
            Rational64::new(d0.gcd(&d1), d0 * d1),
        ));
    }
    if dab > 0 {
        let z = a.point_at(some_crossing(a, b));
        let eta = transverse_coordinate(l, z);
        m = m.min(lattice_distance(eta, Rational64::new(d0.gcd(&dab), dab)));
    }
    m
}

/// [`genericity_margin`] by enumerating all intersection points.
pub fn genericity_margin_brute(l: &SlopeCurve, a: &SlopeCurve, b: &SlopeCurve) -> Rational64 {
    let la = intersections(l, a).unwrap_or_default();
    let lb = intersections(l, b).unwrap_or_default();
    let ab = intersections(a, b).unwrap_or_default();
    let mut m = Rational64::new(1, 2);
    for x in &la {
        for y in &lb {
            m = m.min(circle_distance(
                position_along(l, *x),
                position_along(l, *y),
            ));
        }
    }
    for z in &ab {
        m = m.min(transverse_coordinate(l, *z).abs());
    }
    m
}

/// Offsets `k_A / 97`, `k_B / 97` (with `l` kept) maximizing the
/// genericity margin among a seeded list of candidates.
pub fn generic_offsets(
    l: &SlopeCurve,
    a: (i64, i64),
    b: (i64, i64),
    seed: u64,
    candidates: usize,
) -> Result<(SlopeCurve, SlopeCurve), TorusError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Rational64, SlopeCurve, SlopeCurve)> = None;
    for _ in 0..candidates.max(1) {
        let ka = rng.gen_range(1..OFFSET_DENOMINATOR);
        let kb = rng.gen_range(1..OFFSET_DENOMINATOR);
        let ca = SlopeCurve::with_offset(a.0, a.1, ka, OFFSET_DENOMINATOR)?;
        let cb = SlopeCurve::with_offset(b.0, b.1, kb, OFFSET_DENOMINATOR)?;
        let m = genericity_margin(l, &ca, &cb);
        if best.as_ref().is_none_or(|(bm, _, _)| m > *bm) {
            best = Some((m, ca, cb));
        }
    }
    let (m, ca, cb) = best.expect("at least one candidate");
    if m.is_zero() {
        let pt = triple_point(l, &ca, &cb).unwrap_or((Rational64::zero(), Rational64::zero()));
        return Err(TorusError::TriplePoint(pt.0.to_string(), pt.1.to_string()));
    }
    Ok((ca, cb))
}

pub(crate) mod rational_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }

    pub fn parse(s: &str) -> Option<Rational64> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let d: i64 = d.trim().parse().ok()?;
                if d == 0 {
                    return None;
                }
                Some(Rational64::new(n.trim().parse().ok()?, d))
            }
            None => Some(Rational64::from(s.parse::<i64>().ok()?)),
        }
    }
}

pub(crate) mod rational_map {
    use std::collections::BTreeMap;

    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Rational64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, Rational64>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                super::rational_str::parse(&v)
                    .map(|r| (k, r))
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {v:?}")))
            })
            .collect()
    }
}

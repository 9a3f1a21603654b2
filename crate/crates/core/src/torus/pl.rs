use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{
    check_nonparallel, det_pair, genericity_margin, r64, triple_point, SlopeCurve, TorusError,
    TwistConvention,
};

/// A closed piecewise-linear curve on the torus.
///
/// Each edge runs from `vertices[i]` to `vertices[i + 1]` (cyclically) along
/// the shortest lift, so every edge displacement has components in `(-1/2, 1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLCurve {
    vertices: Vec<(f64, f64)>,
}

fn wrap01(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

fn centered(x: f64) -> f64 {
    x - x.round()
}

impl PLCurve {
    /// Vertices are reduced into `[0, 1)^2`.
    pub fn new(vertices: Vec<(f64, f64)>) -> Self {
        PLCurve {
            vertices: vertices
                .into_iter()
                .map(|(x, y)| (wrap01(x), wrap01(y)))
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `(start, displacement)` for every edge.
    pub fn edges(&self) -> Vec<((f64, f64), (f64, f64))> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                (a, (centered(b.0 - a.0), centered(b.1 - a.1)))
            })
            .collect()
    }

    /// Homology class from the vertex walk.
    pub fn homology(&self) -> (i64, i64) {
        let (sx, sy) = self
            .edges()
            .iter()
            .fold((0.0, 0.0), |acc, (_, d)| (acc.0 + d.0, acc.1 + d.1));
        (sx.round() as i64, sy.round() as i64)
    }

    /// Transverse crossings with a straight curve.
    ///
    /// Each vertex gets one floor of the level of `b`, and consecutive
    /// vertices differ by an exact integer lattice shift, so a vertex lying
    /// on `b` is counted once.
    pub fn crossings_with(&self, b: &SlopeCurve) -> usize {
        let n = self.vertices.len();
        let floors: Vec<i64> = self
            .vertices
            .iter()
            .map(|&(x, y)| b.level_f64(x, y).floor() as i64)
            .collect();
        (0..n)
            .map(|i| {
                let (a, c) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let d = (centered(c.0 - a.0), centered(c.1 - a.1));
                // The unwrapped end is c + (m, k).
                let m = (a.0 + d.0 - c.0).round() as i64;
                let k = (a.1 + d.1 - c.1).round() as i64;
                (floors[(i + 1) % n] + b.q() * m - b.p() * k - floors[i]).unsigned_abs() as usize
            })
            .sum()
    }
}

/// The image of `a` under a shear supported in the band `|η| <= w` around
/// `l`, where `η` is the centered transverse coordinate of `l`.
///
/// Inside the band a point moves by `σ (η + w) / (2w)` turns along `l`, so
/// each of the `|det(A, L)|` passes through the band splices in one copy of
/// `l`. The shear is a homeomorphism of the torus, so the result is embedded.
pub fn twisted_pl_curve(
    l: &SlopeCurve,
    a: &SlopeCurve,
    w: f64,
    convention: TwistConvention,
) -> Result<PLCurve, TorusError> {
    let d = det_pair(a, l);
    if d == 0 {
        return Err(TorusError::Parallel(a.to_string(), l.to_string()));
    }
    let limit = 0.25;
    if !(w > 0.0 && w < limit) {
        return Err(TorusError::WidthTooLarge(w, limit));
    }
    let sigma = convention.sign() as f64;
    let (x0, y0) = a.base_point();
    let (x0, y0) = (r64(x0), r64(y0));
    let (pa, qa) = (a.p() as f64, a.q() as f64);
    let eta0 = l.level_f64(x0, y0);
    let df = d as f64;

    // Band edges: eta0 + d t = n ± w.
    let mut ts = vec![0.0, 1.0];
    let lo = (eta0.min(eta0 + df) - 1.0).floor() as i64;
    let hi = (eta0.max(eta0 + df) + 1.0).ceil() as i64;
    for n in lo..=hi {
        for s in [-w, w] {
            let t = (n as f64 + s - eta0) / df;
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);

    // The walk starts at the image of the base point.
    let c0 = centered(eta0);
    let start = if c0.abs() < w {
        sigma * (c0 + w) / (2.0 * w)
    } else {
        0.0
    };
    let mut verts = Vec::new();
    let mut pos = (x0 + start * l.p() as f64, y0 + start * l.q() as f64);
    for win in ts.windows(2) {
        let (ta, tb) = (win[0], win[1]);
        let mid = centered(eta0 + df * 0.5 * (ta + tb));
        let mut disp = (pa * (tb - ta), qa * (tb - ta));
        if mid.abs() < w {
            let turns = sigma * df * (tb - ta) / (2.0 * w);
            disp.0 += turns * l.p() as f64;
            disp.1 += turns * l.q() as f64;
        }
        // Steps well below 1/2 keep the shortest lift unambiguous.
        let k = ((disp.0.abs().max(disp.1.abs())) / 0.4).ceil().max(1.0) as usize;
        for _ in 0..k {
            verts.push(pos);
            pos = (pos.0 + disp.0 / k as f64, pos.1 + disp.1 / k as f64);
        }
    }
    Ok(PLCurve::new(verts))
}

/// Splice width, a tenth of the largest one small enough that the band around `l` creates exactly one
/// crossing per pair of strands of `a` and `b`, and that no point of
/// `a ∩ b` lies in the band.
pub fn admissible_width(l: &SlopeCurve, a: &SlopeCurve, b: &SlopeCurve) -> Result<f64, TorusError> {
    check_nonparallel(&[l, a, b])?;
    let e = l.p().extended_gcd(&l.q());
    let (m, n) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
    // ds/dη along a straight curve c.
    let drift = |c: &SlopeCurve| (m * c.p() + n * c.q()) as f64 / det_pair(c, l) as f64;
    let da = drift(a);
    let db = drift(b);
    let margin = r64(genericity_margin(l, a, b));
    let w = margin.min(0.25) / (da - db).abs().max(1.0);
    if w <= 0.0 {
        let pt = triple_point(l, a, b).unwrap_or((Rational64::from(0), Rational64::from(0)));
        return Err(TorusError::TriplePoint(pt.0.to_string(), pt.1.to_string()));
    }
    Ok(w / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDecomposition {
    pub n_q: usize,
    pub n_p: usize,
    pub n_pl: usize,
}

impl CountDecomposition {
    pub fn holds(&self) -> bool {
        self.n_pl == self.n_q + self.n_p
    }
}

/// Counts `a ∩ b`, the new points `(τ a ∩ l) x (l ∩ b)`, and the actual
/// crossings of the spliced curve with `b`.
pub fn count_decomposition(
    l: &SlopeCurve,
    a: &SlopeCurve,
    b: &SlopeCurve,
    w: f64,
    convention: TwistConvention,
) -> Result<CountDecomposition, TorusError> {
    check_nonparallel(&[l, a, b])?;
    if let Some(pt) = triple_point(l, a, b) {
        return Err(TorusError::TriplePoint(pt.0.to_string(), pt.1.to_string()));
    }
    let pl = twisted_pl_curve(l, a, w, convention)?;
    Ok(CountDecomposition {
        n_q: det_pair(a, b).unsigned_abs() as usize,
        n_p: (det_pair(a, l).unsigned_abs() * det_pair(l, b).unsigned_abs()) as usize,
        n_pl: pl.crossings_with(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{generic_offsets, twist_slope};

    fn c(p: i64, q: i64, k: i64) -> SlopeCurve {
        SlopeCurve::with_offset(p, q, k, 97).unwrap()
    }

    #[test]
    fn single_splice_example() {
        let l = c(1, 0, 0);
        let a = c(0, 1, 10);
        let pl = twisted_pl_curve(&l, &a, 0.05, TwistConvention::Positive).unwrap();
        assert_eq!(pl.homology(), (-1, 1));
        let pl = twisted_pl_curve(&l, &a, 0.05, TwistConvention::Negative).unwrap();
        assert_eq!(pl.homology(), (1, 1));
    }

    #[test]
    fn coincides_with_a_outside_the_band() {
        let l = c(2, 1, 0);
        for (k, a) in [(0, (1, 3)), (40, (-1, 2)), (7, (0, 1))] {
            let a = c(a.0, a.1, k);
            let w = 0.03;
            let pl = twisted_pl_curve(&l, &a, w, TwistConvention::Positive).unwrap();
            for &(x, y) in pl.vertices() {
                if centered(l.level_f64(x, y)).abs() > w + 1e-9 {
                    assert!(centered(a.level_f64(x, y)).abs() < 1e-9, "{a}: ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn parallel_and_wide_are_rejected() {
        let l = c(1, 0, 0);
        assert!(matches!(
            twisted_pl_curve(&l, &c(1, 0, 3), 0.05, TwistConvention::Positive),
            Err(TorusError::Parallel(..))
        ));
        assert!(matches!(
            twisted_pl_curve(&l, &c(0, 1, 3), 0.3, TwistConvention::Positive),
            Err(TorusError::WidthTooLarge(..))
        ));
    }

    #[test]
    fn homology_matches_twist_slope() {
        let dirs = crate::torus::primitive_directions(3);
        for &(pl_, ql) in &dirs {
            for &(pa, qa) in &dirs {
                let l = c(pl_, ql, 0);
                let a = c(pa, qa, 31);
                if det_pair(&a, &l) == 0 {
                    continue;
                }
                for conv in [TwistConvention::Positive, TwistConvention::Negative] {
                    let pl = twisted_pl_curve(&l, &a, 0.05, conv).unwrap();
                    assert_eq!(
                        pl.homology(),
                        twist_slope(&l, &a, conv).direction(),
                        "{l} {a} {conv:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let l = c(1, 0, 0);
        for (a, b) in [((0, 1), (1, 1)), ((1, 1), (0, 1))] {
            let (a, b) = generic_offsets(&l, a, b, 0, 16).unwrap();
            let w = admissible_width(&l, &a, &b).unwrap();
            let r = count_decomposition(&l, &a, &b, w, TwistConvention::Positive).unwrap();
            assert_eq!((r.n_q, r.n_p, r.n_pl), (1, 1, 2));
        }
    }

    #[test]
    fn triple_point_is_reported() {
        let l = c(1, 0, 0);
        let a = c(0, 1, 0);
        let b = c(1, 1, 0);
        assert!(matches!(
            count_decomposition(&l, &a, &b, 0.05, TwistConvention::Positive),
            Err(TorusError::TriplePoint(..))
        ));
    }
}

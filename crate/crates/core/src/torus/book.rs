use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_nonparallel, intersections, position_along, r64, rank_consistency, rational_map,
    rational_str, triple_point, Point, SlopeCurve, TorusError, TwistConvention,
};
use crate::gf2::BitMatrix;
use crate::graded::{
    DifferentialSpace, ExactTriple, GradedError, GradedSpace, OrderInterval, OrderMap, TripleError,
};
use crate::local_model::{twist_moment, FibreSolver, LocalModelError, TwistProfile};
use crate::scalar::Grade;

/// Grades are multiples of `1 / GRADE_DENOMINATOR`.
pub const GRADE_DENOMINATOR: i64 = 1024;

/// Higher-term draws attempted before falling back to none.
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    LocalModel(#[from] LocalModelError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error("condition ({condition}) cannot be met: {witness}")]
    ConditionsUnsatisfiable { condition: String, witness: String },
}

#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub epsilon: f64,
    pub delta: f64,
    pub profile: TwistProfile<f64>,
    pub convention: TwistConvention,
    pub seed: u64,
    /// Conjugate the total complex by a seeded grade-raising gauge.
    pub higher_terms: bool,
    /// Cancel as many `q`/`p` pairs in the differential of `C` as the ranks allow.
    pub cancel_pairs: bool,
}

impl ScenarioParams {
    pub fn new(epsilon: f64, profile: TwistProfile<f64>) -> Self {
        ScenarioParams {
            epsilon,
            delta: 0.01,
            profile,
            convention: TwistConvention::Positive,
            seed: 0,
            higher_terms: true,
            cancel_pairs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    /// Position along `L` as a fraction of a turn (zero for `L₀ ∩ L₁`).
    pub position: f64,
    #[serde(with = "rational_str")]
    pub action: Rational64,
}

/// A point of `L₀ ∩ L₁` carried into `τ(L₀) ∩ L₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPoint {
    pub label: String,
    /// Label of the corresponding generator of `C''`.
    pub source: String,
    pub x: f64,
    pub y: f64,
    #[serde(with = "rational_str")]
    pub action: Rational64,
}

/// A new point `p(x̃₀, x₁)` near `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PPoint {
    pub label: String,
    pub x0: String,
    pub x1: String,
    /// `dist(y₀, y₁)` on the core circle of length `2π`.
    pub distance: f64,
    /// `|y|` of the fibre intersection.
    pub radius: f64,
    /// `-K(y) - 2πR(0)`, in `[0; ε)`.
    pub chi: f64,
    #[serde(with = "rational_str")]
    pub action: Rational64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionBook {
    /// `L₀ ∩ L`.
    pub x0: Vec<CurvePoint>,
    /// `L ∩ L₁`.
    pub x1: Vec<CurvePoint>,
    pub points_q: Vec<QPoint>,
    pub points_p: Vec<PPoint>,
    /// Every label, including the `C'` and `C''` generators.
    #[serde(with = "rational_map")]
    pub actions: BTreeMap<String, Rational64>,
    #[serde(with = "rational_str")]
    pub epsilon: Rational64,
    /// Quantized `2πR(0)`, in `(-ε; 0]`.
    #[serde(with = "rational_str")]
    pub kappa: Rational64,
}

impl IntersectionBook {
    /// `a(x̃₀) = a(x₀) + 2πR(0)`.
    pub fn twisted_action(&self, x0: &str) -> Option<Rational64> {
        self.x0
            .iter()
            .find(|p| p.label == x0)
            .map(|p| p.action + self.kappa)
    }

    fn action_of(&self, label: &str, pts: &[CurvePoint]) -> Rational64 {
        pts.iter()
            .find(|p| p.label == label)
            .map(|p| p.action)
            .unwrap_or_default()
    }

    /// Every `p` action lies in `[a(x̃₀) + a(x₁); a(x̃₀) + a(x₁) + ε)`.
    pub fn p_windows_hold(&self) -> bool {
        self.points_p.iter().all(|p| {
            let base =
                self.action_of(&p.x0, &self.x0) + self.kappa + self.action_of(&p.x1, &self.x1);
            p.action >= base && p.action < base + self.epsilon
        })
    }

    /// Every `q` action equals the action of its `L₀ ∩ L₁` point.
    pub fn q_actions_hold(&self) -> bool {
        self.points_q
            .iter()
            .all(|q| self.actions.get(&q.source) == Some(&q.action))
    }
}

pub fn prime_label(x1: &str, x0: &str) -> String {
    format!("{x1}.{x0}")
}

#[derive(Debug, Clone)]
pub struct FloerScenario {
    pub book: IntersectionBook,
    pub triple: ExactTriple<Rational64>,
    /// `(p, q)` pairs cancelled by the differential of `C`.
    pub cancelled: Vec<(String, String)>,
    /// Whether the seeded gauge produced nonzero higher terms.
    pub gauge_applied: bool,
}

fn q(x: f64) -> Rational64 {
    Rational64::snap(x, GRADE_DENOMINATOR)
}

fn circle_vec(s: f64) -> [f64; 2] {
    let a = std::f64::consts::TAU * s;
    [a.cos(), a.sin()]
}

fn curve_points(l: &SlopeCurve, pts: &[Point], prefix: &str) -> Vec<CurvePoint> {
    pts.iter()
        .enumerate()
        .map(|(i, &pt)| CurvePoint {
            label: format!("{prefix}{i}"),
            x: r64(pt.0),
            y: r64(pt.1),
            position: r64(position_along(l, pt)),
            action: Rational64::zero(),
        })
        .collect()
}

/// Assembles the triple `C' = CF(L, L₁) ⊗ CF(τ L₀, L)`, `C = CF(τ L₀, L₁)`,
/// `C'' = CF(L₀, L₁)` for straight curves with synthetic actions.
///
/// Actions are multiples of `U >= 12ε`: `a(x₀)` and `a(x₁)` are chosen so
/// that all sums `a(x₀) + a(x₁)` are distinct multiples of `U`, and the
/// `L₀ ∩ L₁` actions sit at half-integer multiples. `p` points get the
/// action `a(x̃₀) + a(x₁) + χ` with `χ` from the fibre intersection of the
/// local model.
pub fn build_floer_scenario(
    l: &SlopeCurve,
    a: &SlopeCurve,
    b: &SlopeCurve,
    params: &ScenarioParams,
) -> Result<FloerScenario, ScenarioError> {
    check_nonparallel(&[l, a, b])?;
    if let Some(pt) = triple_point(l, a, b) {
        return Err(ScenarioError::ConditionsUnsatisfiable {
            condition: "I".into(),
            witness: format!("triple point ({}, {})", pt.0, pt.1),
        });
    }
    let eps = q(params.epsilon);
    if eps <= Rational64::zero() {
        return Err(ScenarioError::ConditionsUnsatisfiable {
            condition: "II".into(),
            witness: format!("epsilon {} quantizes to 0", params.epsilon),
        });
    }
    let two_pi_r0 = std::f64::consts::TAU * params.profile.value(0.0);
    let kappa = Rational64::snap_up(two_pi_r0, GRADE_DENOMINATOR);
    if !(two_pi_r0 <= 0.0 && two_pi_r0 > -params.epsilon) || kappa <= -eps {
        return Err(ScenarioError::ConditionsUnsatisfiable {
            condition: "V".into(),
            witness: format!("2πR(0) = {two_pi_r0} not in (-{}; 0]", params.epsilon),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let unit = Rational64::snap_up(12.0 * r64(eps), GRADE_DENOMINATOR).max(eps * 12);
    let half = unit / 2;

    let mut x0 = curve_points(l, &intersections(a, l)?, "x0_");
    let mut x1 = curve_points(l, &intersections(l, b)?, "x1_");
    let d0 = x0.len() as i64;
    let mut perm0: Vec<i64> = (0..d0).collect();
    perm0.shuffle(&mut rng);
    let mut perm1: Vec<i64> = (0..x1.len() as i64).collect();
    perm1.shuffle(&mut rng);
    for (p, k) in x0.iter_mut().zip(&perm0) {
        p.action = unit * *k;
    }
    for (p, k) in x1.iter_mut().zip(&perm1) {
        p.action = unit * (*k * d0);
    }

    // p points from the local model.
    let solver = FibreSolver::new(params.profile, params.delta).map_err(|e| {
        ScenarioError::ConditionsUnsatisfiable {
            condition: "V".into(),
            witness: e.to_string(),
        }
    })?;
    let mut points_p = Vec::new();
    for p0 in &x0 {
        for p1 in &x1 {
            let y0 = circle_vec(p0.position);
            let y1 = circle_vec(p1.position);
            let gap = p0.position - p1.position;
            let dist = std::f64::consts::TAU * (gap - gap.round()).abs();
            let fi = solver.solve(&y0, &y1, false).map_err(|e| match e {
                LocalModelError::NoSolution(msg) => ScenarioError::ConditionsUnsatisfiable {
                    condition: "III".into(),
                    witness: format!("({}, {}): {msg}", p0.label, p1.label),
                },
                other => other.into(),
            })?;
            let chi = (-twist_moment(&params.profile, &fi.point) - two_pi_r0).max(0.0);
            let shift = Rational64::snap_down(chi, GRADE_DENOMINATOR);
            if shift >= eps {
                return Err(ScenarioError::ConditionsUnsatisfiable {
                    condition: "V".into(),
                    witness: format!("χ = {chi} at ({}, {}) is not below ε", p0.label, p1.label),
                });
            }
            let i = &p0.label[3..];
            let j = &p1.label[3..];
            points_p.push(PPoint {
                label: format!("p{i}_{j}"),
                x0: p0.label.clone(),
                x1: p1.label.clone(),
                distance: dist,
                radius: fi.radius,
                chi,
                action: p0.action + kappa + p1.action + shift,
            });
        }
    }

    // q points at half-integer multiples of U.
    let ab = intersections(a, b)?;
    let nq = ab.len();
    let conn = if params.cancel_pairs {
        rank_consistency(l, a, b, params.convention)?
            .conn_rank
            .max(0) as usize
    } else {
        0
    };
    let np = points_p.len() as i64;
    let span = np + nq as i64 + 1;
    let mut slots: Option<(Vec<i64>, Vec<(usize, usize)>)> = None;
    for _ in 0..MAX_ATTEMPTS {
        let mut pool: Vec<i64> = (-(nq as i64)..span).collect();
        pool.shuffle(&mut rng);
        let mut s: Vec<i64> = pool.into_iter().take(nq).collect();
        s.sort();
        if let Some(m) = match_pairs(&s, &points_p, unit, half, conn) {
            slots = Some((s, m));
            break;
        }
    }
    let (slots, matching) = slots.unwrap_or_else(|| {
        let s: Vec<i64> = (0..nq as i64).map(|k| -1 - k).collect();
        let m = match_pairs(&s, &points_p, unit, half, conn).unwrap_or_default();
        (s, m)
    });
    let mut order: Vec<usize> = (0..nq).collect();
    order.shuffle(&mut rng);
    let mut slot_of = vec![0i64; nq];
    for (k, &o) in order.iter().enumerate() {
        slot_of[o] = slots[k];
    }
    // matching is by slot rank; translate to geometric q index
    let mut q_by_rank: Vec<usize> = (0..nq).collect();
    q_by_rank.sort_by_key(|&k| slot_of[k]);

    let points_q: Vec<QPoint> = ab
        .iter()
        .enumerate()
        .map(|(k, pt)| QPoint {
            label: format!("q{k}"),
            source: format!("x{k}"),
            x: r64(pt.0),
            y: r64(pt.1),
            action: unit * slot_of[k] + half,
        })
        .collect();

    let mut actions = BTreeMap::new();
    for p in x0.iter().chain(&x1) {
        actions.insert(p.label.clone(), p.action);
    }
    for qp in &points_q {
        actions.insert(qp.source.clone(), qp.action);
        actions.insert(qp.label.clone(), qp.action);
    }
    for pp in &points_p {
        actions.insert(pp.label.clone(), pp.action);
    }
    for p0 in &x0 {
        for p1 in &x1 {
            actions.insert(
                prime_label(&p1.label, &p0.label),
                p0.action + kappa + p1.action,
            );
        }
    }
    let book = IntersectionBook {
        x0,
        x1,
        points_q,
        points_p,
        actions,
        epsilon: eps,
        kappa,
    };
    let cancelled: Vec<(String, String)> = matching
        .iter()
        .map(|&(qr, pi)| {
            (
                book.points_p[pi].label.clone(),
                book.points_q[q_by_rank[qr]].label.clone(),
            )
        })
        .collect();

    let (triple, gauge_applied) =
        assemble(&book, &cancelled, eps, kappa, params.higher_terms, &mut rng)?;
    Ok(FloerScenario {
        book,
        triple,
        cancelled,
        gauge_applied,
    })
}

/// Pairs `conn` of the sorted slots with distinct `p` points of higher action.
fn match_pairs(
    slots: &[i64],
    points_p: &[PPoint],
    unit: Rational64,
    half: Rational64,
    conn: usize,
) -> Option<Vec<(usize, usize)>> {
    if conn == 0 {
        return Some(Vec::new());
    }
    let mut ps: Vec<usize> = (0..points_p.len()).collect();
    ps.sort_by_key(|&i| points_p[i].action);
    let mut used = vec![false; points_p.len()];
    let mut out = Vec::new();
    for (r, &s) in slots.iter().enumerate() {
        let qa = unit * s + half;
        if let Some(&pi) = ps.iter().find(|&&pi| !used[pi] && points_p[pi].action > qa) {
            used[pi] = true;
            out.push((r, pi));
            if out.len() == conn {
                return Some(out);
            }
        }
    }
    None
}

fn space(labels: Vec<(String, Rational64)>) -> Result<GradedSpace<Rational64>, GradedError> {
    GradedSpace::new(labels)
}

fn assemble(
    book: &IntersectionBook,
    cancelled: &[(String, String)],
    eps: Rational64,
    kappa: Rational64,
    higher: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(ExactTriple<Rational64>, bool), ScenarioError> {
    let mut prime = Vec::new();
    let mut beta = Vec::new();
    for p in &book.points_p {
        let label = prime_label(&p.x1, &p.x0);
        prime.push((label.clone(), book.actions[&label]));
        beta.push((p.label.clone(), label));
    }
    let mut middle: Vec<(String, Rational64)> = book
        .points_p
        .iter()
        .map(|p| (p.label.clone(), p.action))
        .collect();
    middle.extend(book.points_q.iter().map(|q| (q.label.clone(), q.action)));
    let dprime: Vec<(String, Rational64)> = book
        .points_q
        .iter()
        .map(|q| (q.source.clone(), q.action))
        .collect();
    let gamma: Vec<(String, String)> = book
        .points_q
        .iter()
        .map(|q| (q.source.clone(), q.label.clone()))
        .collect();

    let sp = space(prime)?;
    let sm = space(middle)?;
    let sd = space(dprime)?;
    let n1 = sp.dim();
    let n2 = sm.dim();
    let n3 = sd.dim();
    let n = n1 + n2 + n3;

    // Total differential in block form on C' ⊕ C ⊕ C''.
    let mut d = BitMatrix::zeros(n, n);
    for (dst, src) in &beta {
        d.set(
            n1 + sm.index_of(dst).unwrap(),
            sp.index_of(src).unwrap(),
            true,
        );
    }
    for (dst, src) in &gamma {
        d.set(
            n1 + n2 + sd.index_of(dst).unwrap(),
            n1 + sm.index_of(src).unwrap(),
            true,
        );
    }
    for (p, qq) in cancelled {
        d.set(
            n1 + sm.index_of(p).unwrap(),
            n1 + sm.index_of(qq).unwrap(),
            true,
        );
    }

    let grades: Vec<Rational64> = sp.grades().chain(sm.grades()).chain(sd.grades()).collect();
    let block = |i: usize| {
        if i < n1 {
            0
        } else if i < n1 + n2 {
            1
        } else {
            2
        }
    };

    let mut applied = false;
    if higher && n > 0 {
        for _ in 0..MAX_ATTEMPTS {
            let mut gauge = BitMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if block(i) > block(j) && grades[i] - grades[j] >= eps * 3 && rng.gen_bool(0.25)
                    {
                        gauge.set(i, j, true);
                    }
                }
            }
            let g2 = gauge.mul(&gauge);
            let phi = BitMatrix::identity(n).add(&gauge);
            let phi_inv = BitMatrix::identity(n).add(&gauge).add(&g2);
            if !phi.mul(&phi_inv).add(&BitMatrix::identity(n)).is_zero() {
                continue;
            }
            let conj = phi.mul(&d).mul(&phi_inv);
            if conj.mul(&conj).is_zero() {
                applied = conj != d;
                d = conj;
                break;
            }
        }
    }

    let sub = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| {
        let mut m = BitMatrix::zeros(rows.len(), cols.len());
        for (i, j) in d.entries() {
            if rows.contains(&i) && cols.contains(&j) {
                m.set(i - rows.start, j - cols.start, true);
            }
        }
        m
    };
    let r1 = 0..n1;
    let r2 = n1..n1 + n2;
    let r3 = n1 + n2..n;
    let above = OrderInterval::above(Rational64::zero());
    let nonneg = OrderInterval::at_least(Rational64::zero());
    let diff = |s: &GradedSpace<Rational64>,
                m: BitMatrix|
     -> Result<DifferentialSpace<Rational64>, GradedError> {
        let map = OrderMap::from_matrix(s.clone(), s.clone(), &m, above)?;
        DifferentialSpace::new(s.clone(), map)
    };
    let cp = diff(&sp, sub(r1.clone(), r1.clone()))?;
    let cm = diff(&sm, sub(r2.clone(), r2.clone()))?;
    let cpp = diff(&sd, sub(r3.clone(), r3.clone()))?;
    let b = OrderMap::from_matrix(
        sp.clone(),
        sm.clone(),
        &sub(r2.clone(), r1.clone()),
        nonneg,
    )?;
    let c = OrderMap::from_matrix(sm.clone(), sd.clone(), &sub(r3.clone(), r2), nonneg)?;
    let h = OrderMap::from_matrix(sp, sd, &sub(r3, r1), above)?;
    Ok((ExactTriple::new(cp, cm, cpp, b, c, h, eps, kappa)?, applied))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{long_exact_ranks, verify_triple};
    use crate::torus::generic_offsets;

    fn params(seed: u64) -> ScenarioParams {
        let mut p = ScenarioParams::new(0.0625, TwistProfile::new(0.02, 1.0).unwrap());
        p.seed = seed;
        p
    }

    fn curves(a: (i64, i64), b: (i64, i64)) -> (SlopeCurve, SlopeCurve, SlopeCurve) {
        let l = SlopeCurve::new(1, 0, Rational64::zero()).unwrap();
        let (a, b) = generic_offsets(&l, a, b, 0, 32).unwrap();
        (l, a, b)
    }

    #[test]
    fn plain_scenario_reproduces_rank_count() {
        let (l, a, b) = curves((0, 1), (1, 1));
        let mut p = params(0);
        p.higher_terms = false;
        p.cancel_pairs = false;
        let s = build_floer_scenario(&l, &a, &b, &p).unwrap();
        let diag = verify_triple(&s.triple);
        assert!(
            diag.all_passed(),
            "{:?}",
            diag.failures().collect::<Vec<_>>()
        );
        let r = long_exact_ranks(&s.triple).unwrap();
        assert_eq!(r.h_middle, 2);
        assert_eq!(r.rank_conn, 0);
        assert!(s.book.p_windows_hold());
        assert!(s.book.q_actions_hold());
    }

    #[test]
    fn cancelling_pair_gives_connecting_rank_one() {
        let (l, a, b) = curves((0, 1), (-1, 1));
        let s = build_floer_scenario(&l, &a, &b, &params(3)).unwrap();
        assert_eq!(s.cancelled.len(), 1);
        assert!(verify_triple(&s.triple).all_passed());
        let r = long_exact_ranks(&s.triple).unwrap();
        assert_eq!(r.rank_conn, 1);
        assert_eq!(r.h_middle, 0);
    }

    #[test]
    fn many_seeds_pass() {
        for (a, b) in [
            ((0, 1), (1, 1)),
            ((1, 2), (2, -1)),
            ((1, 1), (1, -2)),
            ((2, 1), (1, 3)),
        ] {
            let (l, a, b) = curves(a, b);
            for seed in 0..10 {
                let s = build_floer_scenario(&l, &a, &b, &params(seed)).unwrap();
                let diag = verify_triple(&s.triple);
                assert!(
                    diag.all_passed(),
                    "{:?}",
                    diag.failures().collect::<Vec<_>>()
                );
                let rc = rank_consistency(&l, &a, &b, TwistConvention::Positive).unwrap();
                let r = long_exact_ranks(&s.triple).unwrap();
                assert_eq!(r.h_middle as i64, rc.lhs);
                assert_eq!(r.rank_conn as i64, rc.conn_rank);
            }
        }
    }

    #[test]
    fn large_twist_radius_violates_condition_five() {
        let (l, a, b) = curves((0, 1), (1, 1));
        let mut p = params(0);
        p.profile = TwistProfile::new(0.045, 1.0).unwrap();
        assert!(matches!(
            build_floer_scenario(&l, &a, &b, &p),
            Err(ScenarioError::ConditionsUnsatisfiable { ref condition, .. }) if condition == "V"
        ));
    }
}

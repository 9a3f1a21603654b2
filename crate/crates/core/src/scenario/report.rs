use std::fmt::Write;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::graded::{
    long_exact_ranks, total_complex, total_spectral_check, verify_triple, Check, ExactTripleDoc,
    LesRanks, OrderInterval, SpectralReport, SpectralVerdict,
};
use crate::local_model::TwistProfile;
use crate::torus::{
    admissible_width, build_floer_scenario, count_decomposition, intersections, rank_consistency,
    render_svg, triple_point, twist_slope, twisted_pl_curve, CountDecomposition, RankConsistency,
    ScenarioError, ScenarioParams, SlopeCurve, SvgScene, TwistConvention,
};

use super::{
    check_conditions, ConditionInputs, ConditionsReport, ConfigError, CurveSpec, ResolvedCurves,
    ScenarioConfig,
};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub r: f64,
    pub lambda: f64,
    pub delta: f64,
    pub two_pi_r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookSummary {
    pub n_x0: usize,
    pub n_x1: usize,
    pub n_q: usize,
    pub n_p: usize,
    pub epsilon: String,
    /// Quantized `2πR(0)`.
    pub kappa_total: String,
    pub p_windows_hold: bool,
    pub q_actions_hold: bool,
    pub cancelled: Vec<(String, String)>,
    pub gauge_applied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    pub l: CurveSpec,
    pub l0: CurveSpec,
    pub l1: CurveSpec,
    pub twisted_l0: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSequenceReport {
    pub schema: u32,
    pub seed: u64,
    pub convention: TwistConvention,
    pub curves: Curves,
    pub profile: ProfileSummary,
    pub conditions: ConditionsReport,
    pub rank_consistency: RankConsistency,
    pub count_decomposition: CountDecomposition,
    pub splice_width: f64,
    pub book: BookSummary,
    pub triple_checks: Vec<Check>,
    /// Declared order of the homotopy `h: c∘b ≃ 0`.
    pub h_order: String,
    pub total_dim: usize,
    pub total_cohomology: Option<usize>,
    pub spectral: Option<SpectralReport>,
    pub les_ranks: Option<LesRanks>,
    pub triple: ExactTripleDoc,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Builds the scenario of `cfg` and runs every engine check on it.
pub fn run_exact_sequence(cfg: &ScenarioConfig) -> Result<ExactSequenceReport, ScenarioError> {
    let curves = cfg
        .resolve()
        .map_err(|e| ScenarioError::ConditionsUnsatisfiable {
            condition: "I".into(),
            witness: e.to_string(),
        })?;
    let profile = cfg
        .profile()
        .map_err(|e| ScenarioError::ConditionsUnsatisfiable {
            condition: "V".into(),
            witness: e.to_string(),
        })?;
    run_resolved(cfg, &curves, &profile, cfg.delta)
}

pub(crate) fn run_resolved(
    cfg: &ScenarioConfig,
    curves: &ResolvedCurves,
    profile: &TwistProfile<f64>,
    delta: f64,
) -> Result<ExactSequenceReport, ScenarioError> {
    let ResolvedCurves { l, l0, l1 } = *curves;
    let mut params = ScenarioParams::new(cfg.epsilon, *profile);
    params.delta = delta;
    params.convention = cfg.convention;
    params.seed = cfg.seed;
    params.higher_terms = cfg.higher_terms;
    params.cancel_pairs = cfg.cancel_pairs;

    let scenario = build_floer_scenario(&l, &l0, &l1, &params)?;
    let book = &scenario.book;
    let t = &scenario.triple;
    let mut failures = Vec::new();

    let tp = triple_point(&l, &l0, &l1).map(|p| format!("({}, {})", p.0, p.1));
    let mut cond_cfg = cfg.clone();
    cond_cfg.delta = delta;
    let conditions = check_conditions(&cond_cfg, &ConditionInputs::from_book(book, tp), profile);
    for c in conditions.failures() {
        failures.push(format!("condition {}: {}", c.id, c.detail));
    }

    let rc = rank_consistency(&l, &l0, &l1, cfg.convention)?;
    if !rc.is_consistent() {
        failures.push(format!("rank_consistency: {rc:?}"));
    }
    let w = admissible_width(&l, &l0, &l1)?;
    let dec = count_decomposition(&l, &l0, &l1, w, cfg.convention)?;
    if !dec.holds() {
        failures.push(format!(
            "count_decomposition: n_pl = {} but n_q + n_p = {}",
            dec.n_pl,
            dec.n_q + dec.n_p
        ));
    }

    if !book.p_windows_hold() {
        failures.push("book: p action outside its ε window".into());
    }
    if !book.q_actions_hold() {
        failures.push("book: q action differs from its L0∩L1 action".into());
    }
    let eps = book.epsilon;
    if !(book.kappa <= Rational64::from(0) && book.kappa > -eps) {
        failures.push(format!("kappa_total {} outside (-ε; 0]", book.kappa));
    }

    let diag = verify_triple(t);
    for c in diag.failures() {
        failures.push(format!("verify_triple {}: {}", c.name, c.detail));
    }
    let h_order = *t.h().declared();
    if !h_order.is_subset_of(&OrderInterval::above(Rational64::from(0))) {
        failures.push(format!("h declared of order {h_order}, not within (0;inf)"));
    }

    let total = total_complex(t);
    let total_dim = t.prime().dim() + t.middle().dim() + t.double_prime().dim();
    let total_cohomology = match &total {
        Ok(d) => Some(d.cohomology_rank()),
        Err(e) => {
            failures.push(format!("total_complex: {e}"));
            None
        }
    };
    if let Some(h) = total_cohomology {
        if h != 0 {
            failures.push(format!("total complex has cohomology of rank {h}"));
        }
    }
    let spectral = match total_spectral_check(t) {
        Ok(s) => {
            if s.verdict != SpectralVerdict::Vanishes || !s.consistent() {
                failures.push(format!(
                    "spectral_vanishing: {:?} {:?}",
                    s.verdict, s.reason
                ));
            }
            Some(s)
        }
        Err(e) => {
            failures.push(format!("spectral_vanishing: {e}"));
            None
        }
    };
    let les_ranks = match long_exact_ranks(t) {
        Ok(r) => {
            let cancelled = scenario.cancelled.len() as i64;
            if r.h_middle as i64 != rc.rhs_sum - 2 * cancelled || r.rank_conn as i64 != cancelled {
                failures.push(format!(
                    "long_exact_ranks: dim H(C) = {}, rank of connecting map = {}, expected {} and {}",
                    r.h_middle,
                    r.rank_conn,
                    rc.rhs_sum - 2 * cancelled,
                    cancelled
                ));
            }
            if cfg.cancel_pairs
                && (r.h_middle as i64 != rc.lhs || r.rank_conn as i64 != rc.conn_rank)
            {
                failures.push(format!(
                    "long_exact_ranks disagree with rank_consistency: {} vs {}, {} vs {}",
                    r.h_middle, rc.lhs, r.rank_conn, rc.conn_rank
                ));
            }
            Some(r)
        }
        Err(e) => {
            failures.push(format!("long_exact_ranks: {e}"));
            None
        }
    };

    let report = ExactSequenceReport {
        schema: REPORT_SCHEMA,
        seed: cfg.seed,
        convention: cfg.convention,
        curves: Curves {
            l: CurveSpec::from_curve(&l),
            l0: CurveSpec::from_curve(&l0),
            l1: CurveSpec::from_curve(&l1),
            twisted_l0: twist_slope(&l, &l0, cfg.convention).direction(),
        },
        profile: ProfileSummary {
            r: profile.r(),
            lambda: profile.lambda(),
            delta,
            two_pi_r0: std::f64::consts::TAU * profile.value(0.0),
        },
        conditions,
        rank_consistency: rc,
        count_decomposition: dec,
        splice_width: w,
        book: BookSummary {
            n_x0: book.x0.len(),
            n_x1: book.x1.len(),
            n_q: book.points_q.len(),
            n_p: book.points_p.len(),
            epsilon: book.epsilon.to_string(),
            kappa_total: book.kappa.to_string(),
            p_windows_hold: book.p_windows_hold(),
            q_actions_hold: book.q_actions_hold(),
            cancelled: scenario.cancelled.clone(),
            gauge_applied: scenario.gauge_applied,
        },
        triple_checks: diag.checks,
        h_order: h_order.to_string(),
        total_dim,
        total_cohomology,
        spectral,
        les_ranks,
        triple: ExactTripleDoc::from_triple(t),
        passed: failures.is_empty(),
        failures,
    };
    Ok(report)
}

impl ExactSequenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The three curves, the spliced `τ(L₀)` and the intersection points.
    pub fn to_svg(&self) -> Result<String, ConfigError> {
        let curve = |c: &CurveSpec| -> Result<SlopeCurve, ConfigError> {
            Ok(SlopeCurve::new(c.p, c.q, c.offset()?.unwrap_or_default())?)
        };
        let (l, l0, l1) = (
            curve(&self.curves.l)?,
            curve(&self.curves.l0)?,
            curve(&self.curves.l1)?,
        );
        let pl = twisted_pl_curve(&l, &l0, self.splice_width, self.convention)?;
        let mut scene = SvgScene::default();
        scene.lines.push((l, "#444444".into()));
        scene.lines.push((l0, "#1f77b4".into()));
        scene.lines.push((l1, "#2ca02c".into()));
        scene.pl_curves.push((pl, "#d62728".into()));
        for (a, b, color) in [
            (&l0, &l, "#1f77b4"),
            (&l, &l1, "#2ca02c"),
            (&l0, &l1, "#9467bd"),
        ] {
            for pt in intersections(a, b)? {
                scene.points.push((pt, color.into()));
            }
        }
        Ok(render_svg(&scene))
    }

    /// Plain-text summary.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let c = &self.curves;
        let curve =
            |x: &CurveSpec| format!("({},{})+{}", x.p, x.q, x.offset.as_deref().unwrap_or("0"));
        let _ = writeln!(s, "exact sequence report (schema {})", self.schema);
        let _ = writeln!(
            s,
            "curves: L = {}, L0 = {}, L1 = {}, twisted L0 class ({},{})",
            curve(&c.l),
            curve(&c.l0),
            curve(&c.l1),
            c.twisted_l0.0,
            c.twisted_l0.1
        );
        let _ = writeln!(
            s,
            "profile: r = {}, lambda = {}, delta = {}, 2πR(0) = {:.6}",
            self.profile.r, self.profile.lambda, self.profile.delta, self.profile.two_pi_r0
        );
        for cond in &self.conditions.conditions {
            let status = match cond.status {
                super::ConditionStatus::Pass => "pass",
                super::ConditionStatus::Fail => "FAIL",
                super::ConditionStatus::Modeled => "modeled",
            };
            let _ = writeln!(s, "condition {:<3} {:<8} {}", cond.id, status, cond.detail);
        }
        let m = &self.conditions.margin;
        let _ = writeln!(
            s,
            "margin: observed {:?}, stated 5ε = {} ({}), derived 4ε = {} ({})",
            m.observed,
            m.stated,
            if m.meets_stated { "met" } else { "not met" },
            m.derived,
            if m.meets_derived { "met" } else { "not met" }
        );
        let rc = &self.rank_consistency;
        let _ = writeln!(
            s,
            "rank_consistency: lhs {}, rhs_sum {}, conn_rank {}",
            rc.lhs, rc.rhs_sum, rc.conn_rank
        );
        let d = &self.count_decomposition;
        let _ = writeln!(
            s,
            "count_decomposition: n_q {}, n_p {}, n_pl {} (w = {:.6})",
            d.n_q, d.n_p, d.n_pl, self.splice_width
        );
        let b = &self.book;
        let _ = writeln!(
            s,
            "book: epsilon {}, kappa_total {}, cancelled {}, higher terms {}",
            b.epsilon,
            b.kappa_total,
            b.cancelled.len(),
            b.gauge_applied
        );
        let passed = self.triple_checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(
            s,
            "verify_triple: {}/{} checks passed",
            passed,
            self.triple_checks.len()
        );
        let _ = writeln!(s, "h declared order: {}", self.h_order);
        let _ = writeln!(
            s,
            "total complex: dim {}, cohomology {:?}",
            self.total_dim, self.total_cohomology
        );
        if let Some(sp) = &self.spectral {
            let _ = writeln!(s, "spectral_vanishing: {:?}", sp.verdict);
        }
        if let Some(r) = &self.les_ranks {
            let _ = writeln!(
                s,
                "ranks: H(C') {}, H(C) {}, H(C'') {}, b_* {}, c_* {}, connecting {} ({} from identities)",
                r.h_prime, r.h_middle, r.h_double_prime, r.rank_b, r.rank_c, r.rank_conn, r.rank_conn_from_identities
            );
        }
        for f in &self.failures {
            let _ = writeln!(s, "failure: {f}");
        }
        let _ = writeln!(s, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::r64;

    #[test]
    fn default_report_is_green() {
        let r = run_exact_sequence(&ScenarioConfig::default()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.rank_consistency.conn_rank, 0);
        assert_eq!(r.schema, 1);
        let kappa = crate::torus::rational_str::parse(&r.book.kappa_total).unwrap();
        assert!(r64(kappa) <= 0.0 && r64(kappa) > -0.0625);
    }

    #[test]
    fn opposite_sign_triple() {
        let mut cfg = ScenarioConfig::default();
        cfg.l1 = CurveSpec::new(-1, 1);
        let r = run_exact_sequence(&cfg).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.rank_consistency.conn_rank, 1);
        assert_eq!(r.les_ranks.unwrap().rank_conn, 1);
    }

    #[test]
    fn report_is_deterministic_and_round_trips() {
        let cfg = ScenarioConfig::default();
        let a = run_exact_sequence(&cfg).unwrap().to_json();
        let b = run_exact_sequence(&cfg).unwrap().to_json();
        assert_eq!(a, b);
        let back: ExactSequenceReport = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert!(back.render_text().contains("result: PASS"));
    }
}

//! Three-term exactness engine.
//!
//! An [`ExactTriple`] bundles complexes `C'`, `C`, `C''`, chain maps
//! `b: C' -> C`, `c: C -> C''`, a homotopy `h: C' -> C''` with
//! `c b = d'' h + h d'`, and a scale `ε`. When the low-order parts of `b` and
//! `c` form a short exact sequence and the supports are well separated, the
//! total complex is acyclic and the induced maps fit into a long exact
//! sequence on cohomology.

use serde::{Deserialize, Serialize};

use crate::gf2::{span_rank, BitMatrix, BitVec};
use crate::scalar::Grade;

use super::{
    induced_rank, spectral_vanishing, DifferentialSpace, GradedError, GradedSpace, OrderInterval,
    OrderMap, SpectralReport,
};

/// Label prefixes of the three summands in the total complex.
pub const PRIME_PREFIX: &str = "C'/";
pub const MIDDLE_PREFIX: &str = "C/";
pub const DOUBLE_PRIME_PREFIX: &str = "C''/";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TripleError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("exactness violation: {0}")]
    ExactnessViolation(String),
    #[error("total complex is not acyclic: {0}")]
    NotAcyclic(String),
}

#[derive(Clone, PartialEq)]
pub struct ExactTriple<G> {
    prime: DifferentialSpace<G>,
    middle: DifferentialSpace<G>,
    double_prime: DifferentialSpace<G>,
    b: OrderMap<G>,
    c: OrderMap<G>,
    h: OrderMap<G>,
    epsilon: G,
    kappa_total: G,
}

impl<G: Grade> ExactTriple<G> {
    /// Checks only that the maps connect the right spaces; the algebraic
    /// hypotheses are reported by [`verify_triple`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        prime: DifferentialSpace<G>,
        middle: DifferentialSpace<G>,
        double_prime: DifferentialSpace<G>,
        b: OrderMap<G>,
        c: OrderMap<G>,
        h: OrderMap<G>,
        epsilon: G,
        kappa_total: G,
    ) -> Result<Self, TripleError> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(GradedError::SpaceMismatch(what.to_string()))
            }
        };
        check(b.src() == prime.space(), "b must start at C'")?;
        check(b.dst() == middle.space(), "b must land in C")?;
        check(c.src() == middle.space(), "c must start at C")?;
        check(c.dst() == double_prime.space(), "c must land in C''")?;
        check(h.src() == prime.space(), "h must start at C'")?;
        check(h.dst() == double_prime.space(), "h must land in C''")?;
        Ok(ExactTriple {
            prime,
            middle,
            double_prime,
            b,
            c,
            h,
            epsilon,
            kappa_total,
        })
    }

    pub fn prime(&self) -> &DifferentialSpace<G> {
        &self.prime
    }

    pub fn middle(&self) -> &DifferentialSpace<G> {
        &self.middle
    }

    pub fn double_prime(&self) -> &DifferentialSpace<G> {
        &self.double_prime
    }

    pub fn b(&self) -> &OrderMap<G> {
        &self.b
    }

    pub fn c(&self) -> &OrderMap<G> {
        &self.c
    }

    pub fn h(&self) -> &OrderMap<G> {
        &self.h
    }

    pub fn epsilon(&self) -> G {
        self.epsilon
    }

    pub fn kappa_total(&self) -> G {
        self.kappa_total
    }

    /// Low-order parts `(β, γ)` of `b` and `c`.
    pub fn low_parts(&self) -> (OrderMap<G>, OrderMap<G>) {
        (
            self.b.split_at(self.epsilon).0,
            self.c.split_at(self.epsilon).0,
        )
    }

    /// The scale at which the total complex has gap `[ε; 2ε)`.
    ///
    /// Recomputed from the supports: every grade of `C` must lie in some
    /// `[r; r+ε)`, `r ∈ supp(C')`, or `(s-ε; s]`, `s ∈ supp(C'')`, and these
    /// windows must be pairwise at least `2ε` apart.
    pub fn gap_witness(&self) -> Option<G> {
        let eps = self.epsilon;
        if !(eps > G::zero()) {
            return None;
        }
        // (lo, hi, lo_closed, hi_closed)
        let mut windows: Vec<OrderInterval<G>> = self
            .prime
            .space()
            .support()
            .into_iter()
            .map(|r| OrderInterval::closed_open(r, r + eps))
            .chain(
                self.double_prime
                    .space()
                    .support()
                    .into_iter()
                    .map(|s| OrderInterval::open_closed(s - eps, s)),
            )
            .collect();
        windows.sort_by(|a, b| {
            let (a, b) = (a.lo().finite().unwrap(), b.lo().finite().unwrap());
            a.partial_cmp(&b).unwrap()
        });
        for pair in windows.windows(2) {
            let gap = pair[1].lo().finite().unwrap() - pair[0].hi().finite().unwrap();
            if gap < eps + eps {
                return None;
            }
        }
        let covered = self
            .middle
            .space()
            .grades()
            .all(|g| windows.iter().any(|w| w.contains(g)));
        covered.then_some(eps)
    }
}

impl<G: Grade> std::fmt::Debug for ExactTriple<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactTriple")
            .field("prime", &self.prime)
            .field("middle", &self.middle)
            .field("double_prime", &self.double_prime)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("h", &self.h)
            .field("epsilon", &self.epsilon.to_exact_string())
            .field("kappa_total", &self.kappa_total.to_exact_string())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDiagnostics {
    pub checks: Vec<Check>,
}

impl TripleDiagnostics {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

fn gap_detail<G: Grade>(space: &GradedSpace<G>, interval: &OrderInterval<G>) -> (bool, String) {
    match space.gap_witness(interval) {
        None => (true, format!("gap {interval}")),
        Some((r, s)) => (
            false,
            format!(
                "grades {} and {} differ by {} in {interval}",
                r.to_exact_string(),
                s.to_exact_string(),
                (r - s).to_exact_string()
            ),
        ),
    }
}

fn order_detail<G: Grade>(f: &OrderMap<G>, interval: &OrderInterval<G>) -> (bool, String) {
    match f
        .entries()
        .find(|&(i, j)| !interval.contains(f.shift(i, j)))
    {
        None => (true, format!("order {interval}")),
        Some((i, j)) => (
            false,
            format!(
                "entry {} <- {} has shift {} outside {interval}",
                f.dst().label(i),
                f.src().label(j),
                f.shift(i, j).to_exact_string()
            ),
        ),
    }
}

fn identity_detail(lhs: &BitMatrix, rhs: &BitMatrix) -> (bool, String) {
    let diff = lhs.add(rhs);
    let n = diff.entries().count();
    (n == 0, format!("{n} mismatched entries"))
}

/// Runs every hypothesis check in a fixed order; never fails early.
pub fn verify_triple<G: Grade>(t: &ExactTriple<G>) -> TripleDiagnostics {
    let mut diag = TripleDiagnostics { checks: Vec::new() };
    let eps = t.epsilon;
    let zero = G::zero();
    diag.push(
        "epsilon_positive",
        eps > zero,
        format!("epsilon = {}", eps.to_exact_string()),
    );

    let three = eps + eps + eps;
    let (ok, detail) = gap_detail(t.prime.space(), &OrderInterval::open(zero, three));
    diag.push("prime_gap_3eps", ok, detail);
    let (ok, detail) = gap_detail(t.double_prime.space(), &OrderInterval::open(zero, three));
    diag.push("double_prime_gap_3eps", ok, detail);
    let (ok, detail) = gap_detail(t.middle.space(), &OrderInterval::open(zero, eps + eps));
    diag.push("middle_gap_2eps", ok, detail);

    let four = three + eps;
    let mut sep = (
        true,
        format!("supports at least {} apart", four.to_exact_string()),
    );
    'outer: for r in t.prime.space().support() {
        for s in t.double_prime.space().support() {
            if (r - s).abs_grade() < four {
                sep = (
                    false,
                    format!(
                        "C' grade {} and C'' grade {} are {} apart",
                        r.to_exact_string(),
                        s.to_exact_string(),
                        (r - s).abs_grade().to_exact_string()
                    ),
                );
                break 'outer;
            }
        }
    }
    diag.push("support_separation_4eps", sep.0, sep.1);

    let low_order = OrderInterval::closed_open(zero, eps);
    let high_order = OrderInterval::at_least(eps + eps);
    let (beta, b_rest) = t.b.split_at(eps);
    let (gamma, c_rest) = t.c.split_at(eps);
    let (ok, detail) = order_detail(&beta, &low_order);
    diag.push("b_low_order", ok, detail);
    let (ok, detail) = order_detail(&b_rest, &high_order);
    diag.push("b_high_order", ok, detail);
    let (ok, detail) = order_detail(&gamma, &low_order);
    diag.push("c_low_order", ok, detail);
    let (ok, detail) = order_detail(&c_rest, &high_order);
    diag.push("c_high_order", ok, detail);

    let bm = beta.matrix();
    let gm = gamma.matrix();
    let rank_beta = bm.rank();
    let rank_gamma = gm.rank();
    let (dp, dm, dpp) = (t.prime.dim(), t.middle.dim(), t.double_prime.dim());
    diag.push(
        "beta_injective",
        rank_beta == dp,
        format!("rank {rank_beta} of {dp}"),
    );
    diag.push(
        "gamma_surjective",
        rank_gamma == dpp,
        format!("rank {rank_gamma} of {dpp}"),
    );
    diag.push(
        "short_exact_dimension",
        rank_beta + rank_gamma == dm,
        format!("{rank_beta} + {rank_gamma} vs dim C = {dm}"),
    );
    let gb = gm.mul(&bm);
    diag.push(
        "gamma_beta_zero",
        gb.is_zero(),
        format!("{} nonzero entries", gb.entries().count()),
    );

    let (ok, detail) = order_detail(&t.h, &OrderInterval::at_least(zero));
    diag.push("h_order", ok, detail);

    let pos = OrderInterval::above(zero);
    let (ok, detail) = [("C'", &t.prime), ("C", &t.middle), ("C''", &t.double_prime)]
        .iter()
        .map(|(name, cx)| {
            let (ok, d) = order_detail(cx.d(), &pos);
            (ok, format!("{name}: {d}"))
        })
        .fold((true, String::new()), |(all, acc), (ok, d)| {
            (
                all && ok,
                if acc.is_empty() {
                    d
                } else {
                    format!("{acc}; {d}")
                },
            )
        });
    diag.push("differential_orders", ok, detail);

    let d1 = t.prime.d().matrix();
    let d2 = t.middle.d().matrix();
    let d3 = t.double_prime.d().matrix();
    let b = t.b.matrix();
    let c = t.c.matrix();
    let h = t.h.matrix();
    let (ok, detail) = identity_detail(&d2.mul(&b), &b.mul(&d1));
    diag.push("b_chain_map", ok, detail);
    let (ok, detail) = identity_detail(&d3.mul(&c), &c.mul(&d2));
    diag.push("c_chain_map", ok, detail);
    let (ok, detail) = identity_detail(&c.mul(&b), &d3.mul(&h).add(&h.mul(&d1)));
    diag.push("homotopy_cb", ok, detail);

    diag
}

fn block_matrix(blocks: &[[Option<&BitMatrix>; 3]; 3], dims: [usize; 3]) -> BitMatrix {
    let offs = [0, dims[0], dims[0] + dims[1]];
    let n = dims.iter().sum();
    let mut m = BitMatrix::zeros(n, n);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            if let Some(blk) = blk {
                for (i, j) in blk.entries() {
                    m.set(offs[bi] + i, offs[bj] + j, true);
                }
            }
        }
    }
    m
}

/// `D = C' ⊕ C ⊕ C''` with the lower-triangular differential built from
/// `d', b, h, d, c, d''`, declared of order `[0; inf)`.
pub fn total_complex<G: Grade>(t: &ExactTriple<G>) -> Result<DifferentialSpace<G>, TripleError> {
    let space = GradedSpace::direct_sum(&[
        (PRIME_PREFIX, t.prime.space()),
        (MIDDLE_PREFIX, t.middle.space()),
        (DOUBLE_PRIME_PREFIX, t.double_prime.space()),
    ])?;
    let (d1, d2, d3) = (
        t.prime.d().matrix(),
        t.middle.d().matrix(),
        t.double_prime.d().matrix(),
    );
    let (b, c, h) = (t.b.matrix(), t.c.matrix(), t.h.matrix());
    let m = block_matrix(
        &[
            [Some(&d1), None, None],
            [Some(&b), Some(&d2), None],
            [Some(&h), Some(&c), Some(&d3)],
        ],
        [t.prime.dim(), t.middle.dim(), t.double_prime.dim()],
    );
    let d = OrderMap::from_matrix(
        space.clone(),
        space.clone(),
        &m,
        OrderInterval::at_least(G::zero()),
    )?;
    Ok(DifferentialSpace::new(space, d)?)
}

/// Ranks in the long exact sequence `H(C') -> H(C) -> H(C'') -> H(C')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesRanks {
    pub h_prime: usize,
    pub h_middle: usize,
    pub h_double_prime: usize,
    pub rank_b: usize,
    pub rank_c: usize,
    /// Rank of the connecting map, via the zig-zag through the total complex.
    pub rank_conn: usize,
    /// Rank of the connecting map, from `h_prime - rank_b`.
    pub rank_conn_from_identities: usize,
}

impl LesRanks {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize, usize) {
        (
            self.h_prime,
            self.h_middle,
            self.h_double_prime,
            self.rank_b,
            self.rank_c,
            self.rank_conn,
        )
    }
}

/// Rank of the connecting map `H(C'') -> H(C')`.
///
/// For a cycle `z''` of `C''`, `(0, 0, z'')` is a cycle of the acyclic total
/// complex, hence `d_D (x', x, y'')` for some chain; the class of `x'` is the
/// image of `[z'']`.
fn connecting_rank<G: Grade>(
    t: &ExactTriple<G>,
    total: &DifferentialSpace<G>,
) -> Result<usize, TripleError> {
    let (np, nm) = (t.prime.dim(), t.middle.dim());
    let n = total.dim();
    let dd = total.d().matrix();
    let mut images = t.prime.boundaries();
    let base = span_rank(&images, np);
    for z in t.double_prime.cycles() {
        let mut v = BitVec::zeros(n);
        for k in z.ones() {
            v.set(np + nm + k, true);
        }
        let w = dd.solve(&v).ok_or_else(|| {
            TripleError::NotAcyclic("a cycle of C'' does not bound in the total complex".into())
        })?;
        images.push(w.slice(0, np));
    }
    Ok(span_rank(&images, np) - base)
}

/// Cohomology ranks and induced-map ranks, with the connecting rank computed
/// two ways and all three exactness identities checked.
pub fn long_exact_ranks<G: Grade>(t: &ExactTriple<G>) -> Result<LesRanks, TripleError> {
    let h_prime = t.prime.cohomology_rank();
    let h_middle = t.middle.cohomology_rank();
    let h_double_prime = t.double_prime.cohomology_rank();
    let rank_b = induced_rank(&t.b, &t.prime, &t.middle);
    let rank_c = induced_rank(&t.c, &t.middle, &t.double_prime);
    let total = total_complex(t)?;
    let rank_conn = connecting_rank(t, &total)?;
    let ranks = LesRanks {
        h_prime,
        h_middle,
        h_double_prime,
        rank_b,
        rank_c,
        rank_conn,
        rank_conn_from_identities: h_prime.checked_sub(rank_b).ok_or_else(|| {
            TripleError::ExactnessViolation(format!(
                "rank b_* = {rank_b} exceeds dim H(C') = {h_prime}"
            ))
        })?,
    };
    if ranks.rank_conn != ranks.rank_conn_from_identities {
        return Err(TripleError::ExactnessViolation(format!(
            "connecting rank {} by zig-zag, {} from dim H(C') - rank b_*",
            ranks.rank_conn, ranks.rank_conn_from_identities
        )));
    }
    if h_middle != rank_b + rank_c {
        return Err(TripleError::ExactnessViolation(format!(
            "dim H(C) = {h_middle} but rank b_* + rank c_* = {}",
            rank_b + rank_c
        )));
    }
    if h_double_prime != rank_c + rank_conn {
        return Err(TripleError::ExactnessViolation(format!(
            "dim H(C'') = {h_double_prime} but rank c_* + rank of connecting map = {}",
            rank_c + rank_conn
        )));
    }
    Ok(ranks)
}

/// Total complex followed by the low-order collapse test at the gap witness.
pub fn total_spectral_check<G: Grade>(t: &ExactTriple<G>) -> Result<SpectralReport, TripleError> {
    let total = total_complex(t)?;
    let eps = t.gap_witness().ok_or_else(|| {
        TripleError::NotAcyclic("supports do not produce a [eps;2eps) gap".into())
    })?;
    Ok(spectral_vanishing(&total, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::SpectralVerdict;

    fn sp(gs: &[(&str, f64)]) -> GradedSpace<f64> {
        GradedSpace::new(gs.iter().map(|(l, g)| (l.to_string(), *g))).unwrap()
    }

    fn trivial_triple(extra_middle: Option<(&str, f64)>) -> ExactTriple<f64> {
        let cp = sp(&[("a", 0.0)]);
        let cpp = sp(&[("z", 10.0)]);
        let mut mid = vec![("alpha", 0.0), ("zeta", 10.0)];
        if let Some(e) = extra_middle {
            mid.push(e);
        }
        let c = sp(&mid);
        let any = OrderInterval::at_least(0.0);
        ExactTriple::new(
            DifferentialSpace::zero(cp.clone()),
            DifferentialSpace::zero(c.clone()),
            DifferentialSpace::zero(cpp.clone()),
            OrderMap::new(cp.clone(), c.clone(), [("alpha", "a")], any).unwrap(),
            OrderMap::new(c.clone(), cpp.clone(), [("z", "zeta")], any).unwrap(),
            OrderMap::zero(cp, cpp, any),
            1.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn trivial_triple_passes() {
        let t = trivial_triple(None);
        let diag = verify_triple(&t);
        assert!(
            diag.all_passed(),
            "{:?}",
            diag.failures().collect::<Vec<_>>()
        );
        let ranks = long_exact_ranks(&t).unwrap();
        assert_eq!(ranks.as_tuple(), (1, 2, 1, 1, 1, 0));
    }

    #[test]
    fn extra_generator_breaks_middle_gap() {
        let t = trivial_triple(Some(("eta", 0.5)));
        let diag = verify_triple(&t);
        assert!(!diag.get("middle_gap_2eps").unwrap().passed);
        assert!(!diag.get("short_exact_dimension").unwrap().passed);
    }

    #[test]
    fn trivial_total_complex() {
        let t = trivial_triple(None);
        let total = total_complex(&t).unwrap();
        assert_eq!(total.dim(), 4);
        let mut e: Vec<_> = total.d().labelled_entries().collect();
        e.sort();
        assert_eq!(e, vec![("C''/z", "C/zeta"), ("C/alpha", "C'/a")]);
        assert_eq!(total.cohomology_rank(), 0);
        assert_eq!(t.gap_witness(), Some(1.0));
        let r = total_spectral_check(&t).unwrap();
        assert_eq!(r.verdict, SpectralVerdict::Vanishes);
    }

    #[test]
    fn empty_ends_force_empty_middle() {
        let empty = GradedSpace::<f64>::empty();
        let mid = sp(&[("m", 0.0)]);
        let any = OrderInterval::at_least(0.0);
        let t = ExactTriple::new(
            DifferentialSpace::zero(empty.clone()),
            DifferentialSpace::zero(mid.clone()),
            DifferentialSpace::zero(empty.clone()),
            OrderMap::zero(empty.clone(), mid.clone(), any),
            OrderMap::zero(mid, empty.clone(), any),
            OrderMap::zero(empty.clone(), empty.clone(), any),
            1.0,
            0.0,
        )
        .unwrap();
        assert!(!verify_triple(&t).all_passed());

        let t = ExactTriple::new(
            DifferentialSpace::zero(empty.clone()),
            DifferentialSpace::zero(empty.clone()),
            DifferentialSpace::zero(empty.clone()),
            OrderMap::zero(empty.clone(), empty.clone(), any),
            OrderMap::zero(empty.clone(), empty.clone(), any),
            OrderMap::zero(empty.clone(), empty.clone(), any),
            1.0,
            0.0,
        )
        .unwrap();
        assert!(verify_triple(&t).all_passed());
        assert_eq!(long_exact_ranks(&t).unwrap().h_middle, 0);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let t = trivial_triple(None);
        let err = ExactTriple::new(
            t.middle().clone(),
            t.middle().clone(),
            t.double_prime().clone(),
            t.b().clone(),
            t.c().clone(),
            t.h().clone(),
            1.0,
            0.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn cone_with_connecting_map() {
        // C = cone: q-point x (grade 0) maps to p-point y (grade 10.2) under d_C.
        let cp = sp(&[("a", 10.0)]);
        let cpp = sp(&[("x", 0.0)]);
        let c = sp(&[("y", 10.2), ("xq", 0.0)]);
        let any = OrderInterval::at_least(0.0);
        let t = ExactTriple::new(
            DifferentialSpace::zero(cp.clone()),
            DifferentialSpace::from_entries(c.clone(), [("y", "xq")]).unwrap(),
            DifferentialSpace::zero(cpp.clone()),
            OrderMap::new(cp.clone(), c.clone(), [("y", "a")], any).unwrap(),
            OrderMap::new(c.clone(), cpp.clone(), [("x", "xq")], any).unwrap(),
            OrderMap::zero(cp, cpp, any),
            1.0,
            0.0,
        )
        .unwrap();
        assert!(verify_triple(&t).all_passed());
        let r = long_exact_ranks(&t).unwrap();
        assert_eq!(r.as_tuple(), (1, 0, 1, 0, 0, 1));
    }
}

//! Exact linear algebra for R-graded differential vector spaces over GF(2).
//!
//! A [`GradedSpace`] is a finite basis of labelled generators, each carrying a
//! real grade (its action value). An [`OrderMap`] is a GF(2) matrix between
//! two graded spaces together with a declared interval containing every
//! grade shift `grade(dst) - grade(src)` of its nonzero entries. On top of
//! these sit cohomology ranks, the low-order spectral collapse test and the
//! three-term exactness engine in [`triple`].
//!
//! Connecting maps are oriented `H(C'') -> H(C')`, following the
//! lower-triangular cone
//!
//! ```text
//!        | d'  0   0   |
//!  d_D = | b   d   0   |   on  D = C' + C + C''
//!        | h   c   d'' |
//! ```
//!
//! in which `C''` is a subcomplex and `C'` a quotient.

mod interval;
mod io;
mod spectral;
pub mod triple;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use crate::gf2::{BitMatrix, BitVec};
use crate::scalar::Grade;

pub use interval::{Bound, OrderInterval};
pub use io::{
    ComplexDoc, ExactTripleDoc, GeneratorDoc, GradedSpaceDoc, IntervalDoc, MapDoc, OrderMapDoc,
    SCHEMA_VERSION,
};
pub use spectral::{spectral_vanishing, SpectralReport, SpectralVerdict};
pub use triple::{
    long_exact_ranks, total_complex, total_spectral_check, verify_triple, Check, ExactTriple,
    LesRanks, TripleDiagnostics, TripleError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GradedError {
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("grade of {0:?} is not a finite real")]
    NonFiniteGrade(String),
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("entry {dst:?} <- {src:?} shifts grade by {shift}, outside declared order {interval}")]
    OrderViolation {
        dst: String,
        src: String,
        shift: String,
        interval: String,
    },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("d o d != 0: {0} nonzero entries")]
    NotDifferential(usize),
    #[error("differential order {0} is not contained in [0;inf)")]
    DifferentialOrder(String),
    #[error("malformed document: {0}")]
    Document(String),
}

/// Finite GF(2) vector space with a grade per basis element.
#[derive(Clone)]
pub struct GradedSpace<G> {
    basis: IndexMap<String, G>,
}

impl<G: Grade> GradedSpace<G> {
    pub fn new<S: Into<String>>(
        generators: impl IntoIterator<Item = (S, G)>,
    ) -> Result<Self, GradedError> {
        let mut basis = IndexMap::new();
        for (label, grade) in generators {
            let label = label.into();
            if !grade.is_finite_grade() {
                return Err(GradedError::NonFiniteGrade(label));
            }
            if basis.insert(label.clone(), grade).is_some() {
                return Err(GradedError::DuplicateLabel(label));
            }
        }
        Ok(GradedSpace { basis })
    }

    pub fn empty() -> Self {
        GradedSpace {
            basis: IndexMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        self.basis.get_index(i).expect("basis index in range").0
    }

    pub fn grade(&self, i: usize) -> G {
        *self.basis.get_index(i).expect("basis index in range").1
    }

    pub fn grade_of(&self, label: &str) -> Option<G> {
        self.basis.get(label).copied()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.get_index_of(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, G)> + '_ {
        self.basis.iter().map(|(l, g)| (l.as_str(), *g))
    }

    pub fn grades(&self) -> impl Iterator<Item = G> + '_ {
        self.basis.values().copied()
    }

    /// Distinct grades in increasing order.
    pub fn support(&self) -> Vec<G> {
        let mut s: Vec<G> = self.basis.values().copied().collect();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite grades"));
        s.dedup_by(|a, b| a == b);
        s
    }

    /// True iff no two support values differ by an element of `interval`.
    pub fn has_gap(&self, interval: &OrderInterval<G>) -> bool {
        self.gap_witness(interval).is_none()
    }

    /// A pair `(r, s)` of support values with `r - s` in `interval`, if any.
    pub fn gap_witness(&self, interval: &OrderInterval<G>) -> Option<(G, G)> {
        let supp = self.support();
        for &r in &supp {
            for &s in &supp {
                if interval.contains(r - s) {
                    return Some((r, s));
                }
            }
        }
        None
    }

    /// Direct sum with labels prefixed per summand.
    pub fn direct_sum(parts: &[(&str, &GradedSpace<G>)]) -> Result<Self, GradedError> {
        GradedSpace::new(parts.iter().flat_map(|(prefix, space)| {
            space.iter().map(move |(l, g)| (format!("{prefix}{l}"), g))
        }))
    }
}

impl<G: PartialEq> PartialEq for GradedSpace<G> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.len() == other.basis.len()
            && self
                .basis
                .iter()
                .zip(other.basis.iter())
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }
}

impl<G: Grade> fmt::Debug for GradedSpace<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.basis.iter().map(|(l, g)| (l, g.to_exact_string())))
            .finish()
    }
}

/// GF(2) matrix between graded spaces with a declared order interval.
///
/// Entries are stored as `(dst_index, src_index)` pairs; a present pair is a 1.
#[derive(Clone, PartialEq)]
pub struct OrderMap<G> {
    src: GradedSpace<G>,
    dst: GradedSpace<G>,
    entries: BTreeSet<(usize, usize)>,
    declared: OrderInterval<G>,
}

impl<G: Grade> OrderMap<G> {
    /// Builds a map from `(dst_label, src_label)` pairs. Repeated pairs cancel.
    pub fn new<'a>(
        src: GradedSpace<G>,
        dst: GradedSpace<G>,
        entries: impl IntoIterator<Item = (&'a str, &'a str)>,
        declared: OrderInterval<G>,
    ) -> Result<Self, GradedError> {
        let mut idx = Vec::new();
        for (d, s) in entries {
            let i = dst
                .index_of(d)
                .ok_or_else(|| GradedError::UnknownLabel(d.to_string()))?;
            let j = src
                .index_of(s)
                .ok_or_else(|| GradedError::UnknownLabel(s.to_string()))?;
            idx.push((i, j));
        }
        Self::from_indices(src, dst, idx, declared)
    }

    /// Builds a map from index pairs. Repeated pairs cancel.
    pub fn from_indices(
        src: GradedSpace<G>,
        dst: GradedSpace<G>,
        entries: impl IntoIterator<Item = (usize, usize)>,
        declared: OrderInterval<G>,
    ) -> Result<Self, GradedError> {
        let mut set = BTreeSet::new();
        for (i, j) in entries {
            if i >= dst.dim() || j >= src.dim() {
                return Err(GradedError::UnknownLabel(format!("index ({i}, {j})")));
            }
            if !set.insert((i, j)) {
                set.remove(&(i, j));
            }
        }
        let map = OrderMap {
            src,
            dst,
            entries: set,
            declared,
        };
        map.validate_declared()?;
        Ok(map)
    }

    /// Builds a map from a `dst.dim() x src.dim()` matrix.
    pub fn from_matrix(
        src: GradedSpace<G>,
        dst: GradedSpace<G>,
        m: &BitMatrix,
        declared: OrderInterval<G>,
    ) -> Result<Self, GradedError> {
        if m.nrows() != dst.dim() || m.ncols() != src.dim() {
            return Err(GradedError::SpaceMismatch(format!(
                "matrix is {}x{}, spaces are {}x{}",
                m.nrows(),
                m.ncols(),
                dst.dim(),
                src.dim()
            )));
        }
        Self::from_indices(src, dst, m.entries(), declared)
    }

    pub fn zero(src: GradedSpace<G>, dst: GradedSpace<G>, declared: OrderInterval<G>) -> Self {
        OrderMap {
            src,
            dst,
            entries: BTreeSet::new(),
            declared,
        }
    }

    fn validate_declared(&self) -> Result<(), GradedError> {
        for &(i, j) in &self.entries {
            let shift = self.shift(i, j);
            if !self.declared.contains(shift) {
                return Err(GradedError::OrderViolation {
                    dst: self.dst.label(i).to_string(),
                    src: self.src.label(j).to_string(),
                    shift: shift.to_exact_string(),
                    interval: self.declared.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Same entries, new declared order (validated).
    pub fn with_declared(&self, declared: OrderInterval<G>) -> Result<Self, GradedError> {
        let m = OrderMap {
            declared,
            ..self.clone()
        };
        m.validate_declared()?;
        Ok(m)
    }

    pub fn src(&self) -> &GradedSpace<G> {
        &self.src
    }

    pub fn dst(&self) -> &GradedSpace<G> {
        &self.dst
    }

    pub fn declared(&self) -> &OrderInterval<G> {
        &self.declared
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn labelled_entries(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.entries
            .iter()
            .map(|&(i, j)| (self.dst.label(i), self.src.label(j)))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.entries.contains(&(i, j))
    }

    /// `grade(dst_i) - grade(src_j)`.
    pub fn shift(&self, i: usize, j: usize) -> G {
        self.dst.grade(i) - self.src.grade(j)
    }

    pub fn shifts(&self) -> impl Iterator<Item = G> + '_ {
        self.entries.iter().map(|&(i, j)| self.shift(i, j))
    }

    /// Smallest grade shift among nonzero entries.
    pub fn min_shift(&self) -> Option<G> {
        self.shifts().fold(None, |acc, s| match acc {
            Some(m) if m <= s => Some(m),
            _ => Some(s),
        })
    }

    /// True iff every nonzero entry's grade shift lies in `interval`.
    pub fn check_order(&self, interval: &OrderInterval<G>) -> bool {
        self.shifts().all(|s| interval.contains(s))
    }

    pub fn matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.dst.dim(), self.src.dim());
        for &(i, j) in &self.entries {
            m.set(i, j, true);
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.dst.dim());
        for &(i, j) in &self.entries {
            if v.get(j) {
                out.flip(i);
            }
        }
        out
    }

    /// Splits into entries with shift `< theta` and the rest.
    ///
    /// The low part is declared of order `declared ∩ (-inf; theta)`, the
    /// high part of order `declared ∩ [theta; inf)`.
    pub fn split_at(&self, theta: G) -> (OrderMap<G>, OrderMap<G>) {
        let (low, high): (BTreeSet<_>, BTreeSet<_>) = self
            .entries
            .iter()
            .partition(|&&(i, j)| self.shift(i, j) < theta);
        let low = OrderMap {
            entries: low,
            declared: self.declared.intersect(&OrderInterval::below(theta)),
            ..self.clone()
        };
        let high = OrderMap {
            entries: high,
            declared: self.declared.intersect(&OrderInterval::at_least(theta)),
            ..self.clone()
        };
        (low, high)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &OrderMap<G>) -> Result<OrderMap<G>, GradedError> {
        if first.dst != self.src {
            return Err(GradedError::SpaceMismatch(
                "composition: target of first map differs from source of second".into(),
            ));
        }
        let m = self.matrix().mul(&first.matrix());
        OrderMap::from_matrix(
            first.src.clone(),
            self.dst.clone(),
            &m,
            self.declared.minkowski_sum(&first.declared),
        )
    }

    /// Entrywise sum over GF(2).
    pub fn add(&self, other: &OrderMap<G>) -> Result<OrderMap<G>, GradedError> {
        if self.src != other.src || self.dst != other.dst {
            return Err(GradedError::SpaceMismatch(
                "sum of maps between different spaces".into(),
            ));
        }
        let entries: BTreeSet<_> = self
            .entries
            .symmetric_difference(&other.entries)
            .copied()
            .collect();
        Ok(OrderMap {
            entries,
            declared: self.declared.hull(&other.declared),
            ..self.clone()
        })
    }
}

impl<G: Grade> fmt::Debug for OrderMap<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderMap")
            .field("declared", &self.declared.to_string())
            .field("entries", &self.labelled_entries().collect::<Vec<_>>())
            .finish()
    }
}

/// Free function form of [`GradedSpace::has_gap`].
pub fn has_gap<G: Grade>(space: &GradedSpace<G>, interval: &OrderInterval<G>) -> bool {
    space.has_gap(interval)
}

/// Free function form of [`OrderMap::check_order`].
pub fn check_order<G: Grade>(f: &OrderMap<G>, interval: &OrderInterval<G>) -> bool {
    f.check_order(interval)
}

/// Free function form of [`OrderMap::split_at`].
pub fn split_at<G: Grade>(f: &OrderMap<G>, theta: G) -> (OrderMap<G>, OrderMap<G>) {
    f.split_at(theta)
}

/// A graded space with a differential `d`, `d ∘ d = 0`, of order within `[0; inf)`.
#[derive(Clone, PartialEq)]
pub struct DifferentialSpace<G> {
    space: GradedSpace<G>,
    d: OrderMap<G>,
}

impl<G: Grade> DifferentialSpace<G> {
    pub fn new(space: GradedSpace<G>, d: OrderMap<G>) -> Result<Self, GradedError> {
        if d.src() != &space || d.dst() != &space {
            return Err(GradedError::SpaceMismatch(
                "differential must be an endomorphism of the space".into(),
            ));
        }
        if !d
            .declared()
            .is_subset_of(&OrderInterval::at_least(G::zero()))
        {
            return Err(GradedError::DifferentialOrder(d.declared().to_string()));
        }
        let m = d.matrix();
        let sq = m.mul(&m);
        if !sq.is_zero() {
            return Err(GradedError::NotDifferential(sq.entries().count()));
        }
        Ok(DifferentialSpace { space, d })
    }

    /// `d = 0`, declared of order `(0; inf)`.
    pub fn zero(space: GradedSpace<G>) -> Self {
        let d = OrderMap::zero(
            space.clone(),
            space.clone(),
            OrderInterval::above(G::zero()),
        );
        DifferentialSpace { space, d }
    }

    /// Convenience constructor from labelled entries, declared of order `(0; inf)`.
    pub fn from_entries<'a>(
        space: GradedSpace<G>,
        entries: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, GradedError> {
        let d = OrderMap::new(
            space.clone(),
            space.clone(),
            entries,
            OrderInterval::above(G::zero()),
        )?;
        Self::new(space, d)
    }

    pub fn space(&self) -> &GradedSpace<G> {
        &self.space
    }

    pub fn d(&self) -> &OrderMap<G> {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Basis of `ker d`.
    pub fn cycles(&self) -> Vec<BitVec> {
        self.d.matrix().kernel()
    }

    /// Spanning set of `im d` (the nonzero columns of `d`).
    pub fn boundaries(&self) -> Vec<BitVec> {
        let m = self.d.matrix();
        (0..m.ncols())
            .map(|j| m.column(j))
            .filter(|c| !c.is_zero())
            .collect()
    }

    /// `dim ker d - rank d`.
    pub fn cohomology_rank(&self) -> usize {
        let rank = self.d.rank();
        self.dim() - 2 * rank
    }
}

impl<G: Grade> fmt::Debug for DifferentialSpace<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentialSpace")
            .field("space", &self.space)
            .field("d", &self.d)
            .finish()
    }
}

/// Free function form of [`DifferentialSpace::cohomology_rank`].
pub fn cohomology_rank<G: Grade>(complex: &DifferentialSpace<G>) -> usize {
    complex.cohomology_rank()
}

/// Rank of the map induced on cohomology by a chain map `f: src -> dst`.
pub fn induced_rank<G: Grade>(
    f: &OrderMap<G>,
    src: &DifferentialSpace<G>,
    dst: &DifferentialSpace<G>,
) -> usize {
    let boundaries = dst.boundaries();
    let base = crate::gf2::span_rank(&boundaries, dst.dim());
    let mut all = boundaries;
    all.extend(src.cycles().iter().map(|z| f.apply(z)));
    crate::gf2::span_rank(&all, dst.dim()) - base
}

#[cfg(test)]
mod tests {
    use super::*;

    type I = OrderInterval<f64>;

    fn space(gs: &[(&str, f64)]) -> GradedSpace<f64> {
        GradedSpace::new(gs.iter().map(|(l, g)| (l.to_string(), *g))).unwrap()
    }

    #[test]
    fn gaps() {
        assert!(space(&[("a", 0.0), ("b", 0.5)]).has_gap(&I::open(0.0, 0.3)));
        assert!(!space(&[("a", 0.0), ("b", 0.1)]).has_gap(&I::open(0.0, 0.2)));
        assert!(space(&[("a", 7.0)]).has_gap(&I::open(0.0, 100.0)));
        assert!(!space(&[("a", 7.0)]).has_gap(&I::closed(0.0, 1.0)));
        assert!(GradedSpace::<f64>::empty().has_gap(&I::everything()));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            GradedSpace::new([("a", 0.0), ("a", 1.0)]),
            Err(GradedError::DuplicateLabel(_))
        ));
        assert!(matches!(
            GradedSpace::new([("a", f64::INFINITY)]),
            Err(GradedError::NonFiniteGrade(_))
        ));
        let s = space(&[("a", 0.0), ("b", 1.0)]);
        assert!(matches!(
            OrderMap::new(s.clone(), s.clone(), [("z", "a")], I::everything()),
            Err(GradedError::UnknownLabel(_))
        ));
        assert!(matches!(
            OrderMap::new(s.clone(), s.clone(), [("a", "b")], I::above(0.0)),
            Err(GradedError::OrderViolation { .. })
        ));
        assert!(matches!(
            DifferentialSpace::new(
                s.clone(),
                OrderMap::new(s.clone(), s.clone(), [("b", "a")], I::everything()).unwrap()
            ),
            Err(GradedError::DifferentialOrder(_))
        ));
    }

    #[test]
    fn order_checks() {
        let s = space(&[("x", 3.0)]);
        let empty = OrderMap::zero(s.clone(), s.clone(), I::empty());
        assert!(empty.check_order(&I::empty()));
        assert!(empty.check_order(&I::point(42.0)));
        let id = OrderMap::new(s.clone(), s.clone(), [("x", "x")], I::point(0.0)).unwrap();
        assert!(id.check_order(&I::point(0.0)));

        let src = space(&[("a", 0.0), ("b", 1.0)]);
        let dst = space(&[("p", 0.2), ("q", 6.0)]);
        let f = OrderMap::new(src, dst, [("p", "a"), ("q", "b")], I::everything()).unwrap();
        let shifts: Vec<f64> = f.shifts().collect();
        assert_eq!(shifts, vec![0.2, 5.0]);
        assert!(f.check_order(&I::at_least(0.1)));
        assert!(!f.check_order(&I::at_least(0.3)));
    }

    #[test]
    fn split_examples() {
        let src = space(&[("a", 0.0), ("b", 1.0)]);
        let dst = space(&[("p", 0.1), ("q", 5.0)]);
        let f = OrderMap::new(src, dst, [("p", "a"), ("q", "b")], I::at_least(0.0)).unwrap();
        let (low, high) = f.split_at(1.0);
        assert_eq!(low.labelled_entries().collect::<Vec<_>>(), vec![("p", "a")]);
        assert_eq!(
            high.labelled_entries().collect::<Vec<_>>(),
            vec![("q", "b")]
        );
        assert_eq!(*low.declared(), I::closed_open(0.0, 1.0));
        assert_eq!(*high.declared(), I::at_least(1.0));

        let (low, high) = f.split_at(-1e9);
        assert!(low.is_zero());
        assert_eq!(high.matrix(), f.matrix());
    }

    #[test]
    fn acyclic_pair_and_zero_differential() {
        let s = space(&[("x", 0.0), ("y", 1.0)]);
        let d = DifferentialSpace::from_entries(s.clone(), [("y", "x")]).unwrap();
        assert_eq!(d.cohomology_rank(), 0);
        assert_eq!(DifferentialSpace::zero(s).cohomology_rank(), 2);
    }

    #[test]
    fn not_a_differential() {
        let s = space(&[("x", 0.0), ("y", 1.0), ("z", 2.0)]);
        let err = DifferentialSpace::from_entries(s, [("y", "x"), ("z", "y")]).unwrap_err();
        assert_eq!(err, GradedError::NotDifferential(1));
    }

    #[test]
    fn composition_orders_add() {
        let a = space(&[("a", 0.0)]);
        let b = space(&[("b", 1.0)]);
        let c = space(&[("c", 3.0)]);
        let f = OrderMap::new(a, b.clone(), [("b", "a")], I::closed(1.0, 1.0)).unwrap();
        let g = OrderMap::new(b, c, [("c", "b")], I::at_least(2.0)).unwrap();
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf.nnz(), 1);
        assert_eq!(*gf.declared(), I::at_least(3.0));
        assert!(f.compose(&g).is_err());
    }
}

use std::cmp::Ordering;
use std::fmt;

use crate::scalar::Grade;

use super::GradedError;

/// One end of an [`OrderInterval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound<G> {
    NegInf,
    Finite(G),
    PosInf,
}

impl<G: Grade> Bound<G> {
    fn rank(&self) -> i8 {
        match self {
            Bound::NegInf => -1,
            Bound::Finite(_) => 0,
            Bound::PosInf => 1,
        }
    }

    fn cmp_bound(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    fn add(self, other: Self) -> Self {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
            _ => Bound::PosInf,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(&self) -> Option<G> {
        match self {
            Bound::Finite(g) => Some(*g),
            _ => None,
        }
    }
}

/// Interval of admissible grade shifts. Infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderInterval<G> {
    lo: Bound<G>,
    hi: Bound<G>,
    lo_closed: bool,
    hi_closed: bool,
}

impl<G: Grade> OrderInterval<G> {
    pub fn new(
        lo: Bound<G>,
        hi: Bound<G>,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Self, GradedError> {
        if matches!(lo, Bound::PosInf) || matches!(hi, Bound::NegInf) {
            return Err(GradedError::InvalidInterval(
                "lower end +inf or upper end -inf".into(),
            ));
        }
        for b in [lo, hi] {
            if let Bound::Finite(g) = b {
                if !g.is_finite_grade() {
                    return Err(GradedError::InvalidInterval(format!(
                        "non-finite endpoint {g:?}"
                    )));
                }
            }
        }
        if lo.cmp_bound(&hi) == Ordering::Greater {
            return Err(GradedError::InvalidInterval(format!(
                "lower end {lo:?} exceeds upper end {hi:?}"
            )));
        }
        Ok(OrderInterval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        })
    }

    fn make(lo: Bound<G>, hi: Bound<G>, lo_closed: bool, hi_closed: bool) -> Self {
        Self::new(lo, hi, lo_closed, hi_closed).expect("well-formed interval")
    }

    /// `(a; b)`
    pub fn open(a: G, b: G) -> Self {
        Self::make(Bound::Finite(a), Bound::Finite(b), false, false)
    }

    /// `[a; b)`
    pub fn closed_open(a: G, b: G) -> Self {
        Self::make(Bound::Finite(a), Bound::Finite(b), true, false)
    }

    /// `(a; b]`
    pub fn open_closed(a: G, b: G) -> Self {
        Self::make(Bound::Finite(a), Bound::Finite(b), false, true)
    }

    /// `[a; b]`
    pub fn closed(a: G, b: G) -> Self {
        Self::make(Bound::Finite(a), Bound::Finite(b), true, true)
    }

    /// `{r}`
    pub fn point(r: G) -> Self {
        Self::closed(r, r)
    }

    /// `[a; inf)`
    pub fn at_least(a: G) -> Self {
        Self::make(Bound::Finite(a), Bound::PosInf, true, false)
    }

    /// `(a; inf)`
    pub fn above(a: G) -> Self {
        Self::make(Bound::Finite(a), Bound::PosInf, false, false)
    }

    /// `(-inf; b)`
    pub fn below(b: G) -> Self {
        Self::make(Bound::NegInf, Bound::Finite(b), false, false)
    }

    /// `(-inf; inf)`
    pub fn everything() -> Self {
        Self::make(Bound::NegInf, Bound::PosInf, false, false)
    }

    /// The empty interval `(0; 0)`.
    pub fn empty() -> Self {
        Self::open(G::zero(), G::zero())
    }

    pub fn lo(&self) -> Bound<G> {
        self.lo
    }

    pub fn hi(&self) -> Bound<G> {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_empty(&self) -> bool {
        self.lo.cmp_bound(&self.hi) == Ordering::Equal && !(self.lo_closed && self.hi_closed)
    }

    pub fn contains(&self, x: G) -> bool {
        let above_lo = match self.lo {
            Bound::NegInf => true,
            Bound::Finite(a) => {
                if self.lo_closed {
                    a <= x
                } else {
                    a < x
                }
            }
            Bound::PosInf => false,
        };
        let below_hi = match self.hi {
            Bound::PosInf => true,
            Bound::Finite(b) => {
                if self.hi_closed {
                    x <= b
                } else {
                    x < b
                }
            }
            Bound::NegInf => false,
        };
        above_lo && below_hi
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (lo, lo_closed) = match self.lo.cmp_bound(&other.lo) {
            Ordering::Greater => (self.lo, self.lo_closed),
            Ordering::Less => (other.lo, other.lo_closed),
            Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp_bound(&other.hi) {
            Ordering::Less => (self.hi, self.hi_closed),
            Ordering::Greater => (other.hi, other.hi_closed),
            Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        Self::new(lo, hi, lo_closed, hi_closed).unwrap_or_else(|_| Self::empty())
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        let (lo, lo_closed) = match self.lo.cmp_bound(&other.lo) {
            Ordering::Less => (self.lo, self.lo_closed),
            Ordering::Greater => (other.lo, other.lo_closed),
            Ordering::Equal => (self.lo, self.lo_closed || other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp_bound(&other.hi) {
            Ordering::Greater => (self.hi, self.hi_closed),
            Ordering::Less => (other.hi, other.hi_closed),
            Ordering::Equal => (self.hi, self.hi_closed || other.hi_closed),
        };
        Self::make(lo, hi, lo_closed, hi_closed)
    }

    /// `{x + y : x in self, y in other}`; the order of a composite map.
    pub fn minkowski_sum(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::empty();
        }
        Self::make(
            self.lo.add(other.lo),
            self.hi.add(other.hi),
            self.lo_closed && other.lo_closed,
            self.hi_closed && other.hi_closed,
        )
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match self.lo.cmp_bound(&other.lo) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => other.lo_closed || !self.lo_closed,
        };
        let hi_ok = match self.hi.cmp_bound(&other.hi) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => other.hi_closed || !self.hi_closed,
        };
        lo_ok && hi_ok
    }
}

impl<G: Grade> fmt::Display for OrderInterval<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo_closed && self.hi_closed && self.lo == self.hi {
            if let Bound::Finite(r) = self.lo {
                return write!(f, "{{{}}}", r.to_exact_string());
            }
        }
        let lo = match self.lo {
            Bound::NegInf => "-inf".to_string(),
            Bound::Finite(g) => g.to_exact_string(),
            Bound::PosInf => "inf".to_string(),
        };
        let hi = match self.hi {
            Bound::NegInf => "-inf".to_string(),
            Bound::Finite(g) => g.to_exact_string(),
            Bound::PosInf => "inf".to_string(),
        };
        write!(
            f,
            "{}{lo};{hi}{}",
            if self.lo_closed { '[' } else { '(' },
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

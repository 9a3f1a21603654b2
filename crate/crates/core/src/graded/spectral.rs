use serde::{Deserialize, Serialize};

use crate::scalar::Grade;

use super::{DifferentialSpace, OrderInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralVerdict {
    /// Gap holds and the low-order part is acyclic, so `H(D, d) = 0`.
    Vanishes,
    /// Hypotheses hold but `H(D, δ) != 0`; nothing can be concluded.
    Inconclusive,
    HypothesisFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub verdict: SpectralVerdict,
    /// Why the hypotheses failed, when they did.
    pub reason: Option<String>,
    /// `dim H(D, δ)` when δ was extracted.
    pub low_order_cohomology: Option<usize>,
    /// `dim H(D, d)` computed directly.
    pub total_cohomology: usize,
}

impl SpectralReport {
    /// `Vanishes` must imply vanishing total cohomology.
    pub fn consistent(&self) -> bool {
        self.verdict != SpectralVerdict::Vanishes || self.total_cohomology == 0
    }
}

/// Low-order collapse test.
///
/// With `D` of gap `[ε; 2ε)`, the differential splits as `δ + (d - δ)` where
/// `δ` collects the entries of shift in `[0; ε)`; if `δ² = 0` and `H(D, δ) = 0`
/// then `H(D, d) = 0`.
pub fn spectral_vanishing<G: Grade>(complex: &DifferentialSpace<G>, epsilon: G) -> SpectralReport {
    let total_cohomology = complex.cohomology_rank();
    let failed = |reason: String| SpectralReport {
        verdict: SpectralVerdict::HypothesisFailed,
        reason: Some(reason),
        low_order_cohomology: None,
        total_cohomology,
    };
    if !(epsilon > G::zero()) {
        return failed(format!(
            "epsilon {} is not positive",
            epsilon.to_exact_string()
        ));
    }
    if !complex.d().check_order(&OrderInterval::at_least(G::zero())) {
        return failed("differential has negative grade shifts".into());
    }
    let gap = OrderInterval::closed_open(epsilon, epsilon + epsilon);
    if let Some((r, s)) = complex.space().gap_witness(&gap) {
        return failed(format!(
            "no gap {gap}: grades {} and {} differ by {}",
            r.to_exact_string(),
            s.to_exact_string(),
            (r - s).to_exact_string()
        ));
    }
    let (delta, _) = complex.d().split_at(epsilon);
    let dm = delta.matrix();
    if !dm.mul(&dm).is_zero() {
        return failed("low-order part does not square to zero".into());
    }
    let low = complex.dim() - 2 * dm.rank();
    SpectralReport {
        verdict: if low == 0 {
            SpectralVerdict::Vanishes
        } else {
            SpectralVerdict::Inconclusive
        },
        reason: None,
        low_order_cohomology: Some(low),
        total_cohomology,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;

    #[test]
    fn small_gap_pair_vanishes() {
        let s = GradedSpace::new([("x", 0.0), ("y", 0.1)]).unwrap();
        let d = DifferentialSpace::from_entries(s, [("y", "x")]).unwrap();
        let r = spectral_vanishing(&d, 0.5);
        assert_eq!(r.verdict, SpectralVerdict::Vanishes);
        assert_eq!(r.total_cohomology, 0);
        assert!(r.consistent());
    }

    #[test]
    fn zero_differential_is_inconclusive() {
        let s = GradedSpace::new([("x", 0.0), ("y", 5.0)]).unwrap();
        let r = spectral_vanishing(&DifferentialSpace::zero(s), 0.5);
        assert_eq!(r.verdict, SpectralVerdict::Inconclusive);
        assert_eq!(r.low_order_cohomology, Some(2));
    }

    #[test]
    fn gap_failure_and_bad_epsilon() {
        let s = GradedSpace::new([("x", 0.0), ("y", 0.75)]).unwrap();
        let d = DifferentialSpace::zero(s);
        assert_eq!(
            spectral_vanishing(&d, 0.5).verdict,
            SpectralVerdict::HypothesisFailed
        );
        assert_eq!(
            spectral_vanishing(&d, 0.0).verdict,
            SpectralVerdict::HypothesisFailed
        );
    }

    #[test]
    fn high_order_entries_do_not_enter_delta() {
        // Low part pairs x->y; the long arrow x->z has shift 3 >= 2ε.
        let s = GradedSpace::new([("x", 0.0), ("y", 0.1), ("z", 3.0), ("w", 3.2)]).unwrap();
        let d = DifferentialSpace::from_entries(s, [("y", "x"), ("w", "z")]).unwrap();
        let r = spectral_vanishing(&d, 0.5);
        assert_eq!(r.verdict, SpectralVerdict::Vanishes);
        assert!(r.consistent());
    }
}

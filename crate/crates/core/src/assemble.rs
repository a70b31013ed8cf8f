//! Global signature assembly.
//!
//! A singular space is presented here in two pieces: a triangulated
//! manifold with boundary (the interior), and validated spectral data for a
//! fibration of that boundary (the end, whose fibers get coned off). The
//! global middle signature is the interior pairing's signature plus the
//! corner pairing corrections contributed by the end:
//!
//! ```text
//!     global(k) = interior + sum of tau_s over contributing pages
//! ```
//!
//! Before combining the two pieces this module checks that they actually
//! fit: the limit of the spectral data must reproduce the boundary's
//! cohomology degree by degree, and the dimensions must agree. It also
//! houses the standalone verification passes the command line exposes:
//! additivity under splitting a closed complex, table duality at
//! complementary weights, and consistency of the weight-shift dictionary
//! with the analytic cutoff.

use crate::cone_end::{
    block_matrix_assembly, contributing_pages, einf_closed_form, tau, ConeError, TruncationSpec,
    Variant,
};
use crate::exactlin::{Rat, Signature};
use crate::perversity::{hodge_shift, l2_keeps, shift_matches_l2, ShiftReport};
use crate::simplicial::{SimplicialError, SimplicialPair};
use crate::ssq::LimitRecord;

#[derive(Debug, thiserror::Error)]
pub enum AssembleError {
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("interior piece has dimension {found}, boundary data wants {want}")]
    DimensionMismatch { found: usize, want: usize },
    #[error("boundary cohomology mismatch in degree {degree}: complex has {simplicial}, limit data has {limit}")]
    BoundaryMismatch { degree: usize, simplicial: usize, limit: usize },
    #[error("block assembly total {block} disagrees with the page sum {pages}")]
    BlockMismatch { block: i64, pages: i64 },
    #[error("table duality failed at slot ({i},{j}) weight {k}: narrow {narrow}, mirrored wide {wide}")]
    DualitySlot { i: usize, j: usize, k: i64, narrow: usize, wide: usize },
    #[error("rank duality failed on page {s} at ({i},{j}): {left} vs {right}")]
    DualityRank { s: usize, i: usize, j: usize, left: usize, right: usize },
    #[error("splitting needs a closed complex")]
    NotClosed,
}

/// Everything the global signature computation produces.
#[derive(Debug, Clone)]
pub struct SignatureReport {
    pub k: i64,
    pub interior: Signature,
    /// Rank of the interior pairing (image of relative classes).
    pub interior_rank: usize,
    /// Contributing pages with their corner pairing signatures.
    pub taus: Vec<(usize, i64)>,
    pub tau_sum: i64,
    /// End correction, `-tau_sum`.
    pub end_correction: i64,
    /// `interior + tau_sum`.
    pub global: i64,
}

/// Degree-by-degree check that the limit of the spectral data matches the
/// boundary complex's cohomology.
pub fn check_boundary_match(
    pair: &SimplicialPair,
    rec: &LimitRecord,
) -> Result<(), AssembleError> {
    let betti = pair.boundary_betti();
    for degree in 0..=rec.b + rec.f {
        let simplicial = betti.get(degree).copied().unwrap_or(0);
        let limit = rec.einf_total(degree);
        if simplicial != limit {
            return Err(AssembleError::BoundaryMismatch { degree, simplicial, limit });
        }
    }
    Ok(())
}

/// Global middle signature at weight `k` of the space assembled from an
/// interior piece and its boundary fibration data.
///
/// Runs the compatibility checks, computes the interior pairing and the
/// page corrections, and cross-checks the page sum against the assembled
/// block pairing before reporting.
pub fn global_signature(
    pair: &SimplicialPair,
    rec: &LimitRecord,
    k: i64,
) -> Result<SignatureReport, AssembleError> {
    let n = rec.b + rec.f + 1;
    if pair.dimension() != n {
        return Err(AssembleError::DimensionMismatch { found: pair.dimension(), want: n });
    }
    check_boundary_match(pair, rec)?;
    let form = pair.interior_form()?;
    let mut taus = Vec::new();
    let mut tau_sum = 0i64;
    for s in contributing_pages(rec, k) {
        let v = tau(rec, s)?.value();
        taus.push((s, v));
        tau_sum += v;
    }
    let block = block_matrix_assembly(rec, k)?;
    if block.total != -tau_sum {
        return Err(AssembleError::BlockMismatch { block: block.total, pages: -tau_sum });
    }
    Ok(SignatureReport {
        k,
        interior: form.signature,
        interior_rank: form.interior_rank,
        taus,
        tau_sum,
        end_correction: -tau_sum,
        global: form.signature.value() + tau_sum,
    })
}

/// Result of splitting a closed complex at a vertex and comparing
/// signatures.
#[derive(Debug, Clone)]
pub struct SplitReport {
    pub whole: Signature,
    pub star: Signature,
    pub rest: Signature,
}

impl SplitReport {
    /// Whether the signature of the whole equals the sum over the pieces.
    pub fn additive(&self) -> bool {
        self.whole.value() == self.star.value() + self.rest.value()
    }
}

/// Splits a closed complex into the closed star of `v` and the complement,
/// and computes the interior signature of all three. For an even
/// dimensional closed manifold the whole must equal the sum of the pieces.
pub fn novikov_check(pair: &SimplicialPair, v: u32) -> Result<SplitReport, AssembleError> {
    if !pair.is_closed() {
        return Err(AssembleError::NotClosed);
    }
    let (star, rest) = pair.star_split(v)?;
    Ok(SplitReport {
        whole: pair.interior_signature()?,
        star: star.interior_signature()?,
        rest: rest.interior_signature()?,
    })
}

/// Counts of what [`verify_duality`] examined.
#[derive(Debug, Clone, Copy)]
pub struct DualityReport {
    pub slots: usize,
    pub ranks: usize,
}

/// Verifies the two duality statements on one record at weight `k`:
///
/// * every narrow relative table entry equals the wide absolute entry at
///   the mirrored slot `(b - i, f + 1 - j)`;
/// * every page differential has the same rank as its mirrored page
///   differential.
pub fn verify_duality(rec: &LimitRecord, k: i64) -> Result<DualityReport, AssembleError> {
    let (b, f) = (rec.b, rec.f);
    let narrow = einf_closed_form(rec, Variant::RelP, k);
    let wide = einf_closed_form(rec, Variant::AbsQ, k);
    let mut slots = 0usize;
    for i in 0..=b {
        for j in 1..=f + 1 {
            let lhs = narrow.dim(i, j);
            let rhs = wide.dim(b - i, f + 1 - j);
            if lhs != rhs {
                return Err(AssembleError::DualitySlot { i, j, k, narrow: lhs, wide: rhs });
            }
            slots += 1;
        }
    }
    let mut ranks = 0usize;
    for s in 2..=rec.structural_stop() {
        for i in 0..=b.saturating_sub(s) {
            for j in s - 1..=f {
                let left = rec.diff_rank(s, i, j);
                let right = rec.diff_rank(s, b - i - s, f - j + s - 1);
                if left != right {
                    return Err(AssembleError::DualityRank { s, i, j, left, right });
                }
                ranks += 1;
            }
        }
    }
    Ok(DualityReport { slots, ranks })
}

/// One consistency verdict for a scaling parameter and fiber dimension.
#[derive(Debug, Clone)]
pub struct HodgeCase {
    pub report: ShiftReport,
    /// The dictionary keeps exactly the degrees the analytic cutoff keeps.
    pub dictionary_matches: bool,
    /// The truncation row predicate at the derived shift agrees with the
    /// analytic cutoff row by row.
    pub rows_match: bool,
}

/// Sweep of the weight-shift dictionary against the analytic cutoff.
#[derive(Debug, Clone)]
pub struct HodgeCheck {
    pub cases: Vec<HodgeCase>,
}

impl HodgeCheck {
    pub fn all_match(&self) -> bool {
        self.cases.iter().all(|c| c.dictionary_matches && c.rows_match)
    }

    /// Cases where the published closed form differs from the derived
    /// shift. These are reported, never patched over.
    pub fn discrepancies(&self) -> Vec<&HodgeCase> {
        self.cases.iter().filter(|c| c.report.discrepancy != 0).collect()
    }
}

/// Checks, for every parameter in `cs` and fiber dimension in `fs`, that
/// the derived weight shift reproduces the analytic truncation: both
/// through the weight dictionary and through the absolute table's row
/// predicate.
pub fn verify_hodge_consistency(cs: &[Rat], fs: &[usize]) -> HodgeCheck {
    let mut cases = Vec::new();
    for &f in fs {
        for c in cs {
            let report = hodge_shift(c, f);
            let spec = TruncationSpec::new(0, f, Variant::AbsQ, report.normative);
            let rows_match = (0..=f).all(|j| spec.row_kept(j as i64) == l2_keeps(j, c, f));
            cases.push(HodgeCase {
                dictionary_matches: shift_matches_l2(c, f),
                rows_match,
                report,
            });
        }
    }
    HodgeCheck { cases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{bundle_model, free_parts, sample_models};
    use crate::exactlin::Mat;
    use crate::perversity::standard_c_grid;
    use crate::simplicial::{cp2_pair, product_facets, simplex_facets, sphere_facets};
    use crate::ssq::GradedRing;

    fn hopf_record() -> LimitRecord {
        let base = GradedRing::sphere(2);
        let parts = free_parts(&[1], &[Mat::from_i64(&[&[1]])], &[]);
        bundle_model("hopf", &base, &parts).unwrap().record
    }

    #[test]
    fn coned_circle_bundle_recovers_the_projective_plane_signature() {
        // Interior: a 4-simplex (boundary is the 3-sphere the circle bundle
        // fills). End: the circle bundle over the 2-sphere with pairing +1.
        let disk = SimplicialPair::from_facets(&simplex_facets(4)).unwrap();
        let rec = hopf_record();
        let report = global_signature(&disk, &rec, 0).unwrap();
        assert_eq!(report.interior.value(), 0);
        assert_eq!(report.taus, vec![(2, 1)]);
        assert_eq!(report.global, 1);
        // The same number computed from an honest closed triangulation.
        let closed = cp2_pair().interior_signature().unwrap();
        assert_eq!(report.global, closed.value());
    }

    #[test]
    fn trivial_product_end_contributes_nothing() {
        // Solid torus cross a 2-simplex boundary: the product of a 3-simplex
        // with a circle has boundary S2 x S1, matching a differential-free
        // record with spherical base and fiber.
        let facets = product_facets(&simplex_facets(3), &sphere_facets(1));
        let pair = SimplicialPair::from_facets(&facets).unwrap();
        let base = GradedRing::sphere(2);
        let parts = free_parts(&[1], &[Mat::zeros(1, 1)], &[]);
        let rec = bundle_model("trivial", &base, &parts).unwrap().record;
        let report = global_signature(&pair, &rec, 0).unwrap();
        assert_eq!(report.taus, vec![(2, 0)]);
        assert_eq!(report.global, 0);
    }

    #[test]
    fn mismatched_boundary_is_refused() {
        let disk = SimplicialPair::from_facets(&simplex_facets(4)).unwrap();
        let base = GradedRing::sphere(2);
        let parts = free_parts(&[1], &[Mat::zeros(1, 1)], &[]);
        let rec = bundle_model("trivial", &base, &parts).unwrap().record;
        // Boundary of the 4-simplex is a 3-sphere, not S2 x S1.
        match global_signature(&disk, &rec, 0) {
            Err(AssembleError::BoundaryMismatch { degree: 1, simplicial: 0, limit: 1 }) => {}
            other => panic!("expected a degree-1 mismatch, got {other:?}"),
        }
    }

    #[test]
    fn splitting_a_sphere_is_additive() {
        let pair = SimplicialPair::from_facets(&sphere_facets(4)).unwrap();
        let report = novikov_check(&pair, 0).unwrap();
        assert_eq!(report.whole.value(), 0);
        assert!(report.additive());
    }

    #[test]
    fn splitting_the_projective_plane_is_additive() {
        let report = novikov_check(&cp2_pair(), 1).unwrap();
        assert_eq!(report.whole.value(), 1);
        assert_eq!(report.star.value() + report.rest.value(), 1);
        assert!(report.additive());
    }

    #[test]
    fn split_check_refuses_open_complexes() {
        let disk = SimplicialPair::from_facets(&simplex_facets(4)).unwrap();
        assert!(matches!(novikov_check(&disk, 0), Err(AssembleError::NotClosed)));
    }

    #[test]
    fn duality_holds_on_sampled_models() {
        for model in sample_models(415, 10) {
            for k in -1..=2 {
                let report = verify_duality(&model.record, k).unwrap();
                assert!(report.slots > 0);
            }
        }
    }

    #[test]
    fn weight_dictionary_matches_the_analytic_cutoff() {
        let grid = standard_c_grid();
        let fs: Vec<usize> = (0..=9).collect();
        let check = verify_hodge_consistency(&grid, &fs);
        assert!(check.all_match());
        // The published closed form overshoots by one exactly when the
        // fiber dimension is even, for every parameter in the grid.
        for case in &check.cases {
            let expected = if case.report.f % 2 == 0 { 1 } else { 0 };
            assert_eq!(case.report.discrepancy, expected, "f={} c={}", case.report.f, case.report.c);
        }
        assert!(!check.discrepancies().is_empty());
    }
}

//! Cutoff calculus for weighted truncation at a coned end.
//!
//! A space whose end is the mapping cylinder of a fiber bundle with
//! `f`-dimensional fibers gets a one-parameter family of boundary
//! conditions, indexed here by an integer weight `j`. Weight `j` keeps the
//! fiber cohomology in degrees `i < cutoff_degree(j, f)` and kills the rest;
//! `j <= -1` keeps everything (the absolute condition) and `j >= f` kills
//! everything (the relative condition). The same truncation rule arises
//! analytically from weighted L2 harmonic forms on a metric cone with
//! scaling parameter `c`, and [`hodge_shift`] translates between the two
//! dictionaries, reporting both the derived shift and the published
//! closed-form bracket expression (which overshoots by one in the even-fiber
//! case; the discrepancy is surfaced, not patched).

use crate::exactlin::{rat, ratio, Rat};
use num::{BigInt, One, Signed, ToPrimitive};

/// Clamps a weight into the effective range `[-1, f]`. Weights outside the
/// range behave like the nearest endpoint.
pub fn clamp_weight(j: i64, f: usize) -> i64 {
    j.clamp(-1, f as i64)
}

/// Degree cutoff of weight `j` for fiber dimension `f`: fiber degrees
/// `i < cutoff` survive, degrees `i >= cutoff` are truncated away.
/// Ranges over `0..=f+1`.
pub fn cutoff_degree(j: i64, f: usize) -> usize {
    (f as i64 - clamp_weight(j, f)) as usize
}

/// The dual weight: cutoffs of a weight and its dual always sum to `f + 1`,
/// which is exactly the condition making the two boundary conditions pair
/// under Poincare duality.
pub fn dual_weight(j: i64, f: usize) -> i64 {
    f as i64 - clamp_weight(j, f) - 1
}

/// The two middle weights `(lower, upper)` for fiber dimension `f`.
///
/// The lower middle keeps fiber degrees strictly below `f/2` rounded up;
/// the upper middle keeps one degree more when `f` is even. For odd `f` the
/// two coincide (and are self-dual); for even `f` they are dual to each
/// other.
pub fn middle_weights(f: usize) -> (i64, i64) {
    let fi = f as i64;
    if f % 2 == 0 {
        (fi / 2, fi / 2 - 1)
    } else {
        ((fi - 1) / 2, (fi - 1) / 2)
    }
}

/// Truncated local table: the degreewise ranks of the cohomology of a coned
/// fiber with the given betti numbers under weight `j`. Degree `i` keeps its
/// rank iff `i < cutoff_degree(j, f)` where `f = fiber_betti.len() - 1`.
pub fn local_cone_table(fiber_betti: &[usize], j: i64) -> Vec<usize> {
    assert!(!fiber_betti.is_empty(), "empty fiber table");
    let f = fiber_betti.len() - 1;
    let cut = cutoff_degree(j, f);
    fiber_betti.iter().enumerate().map(|(i, &b)| if i < cut { b } else { 0 }).collect()
}

/// Greatest integer strictly less than `x` (so integers map to themselves
/// minus one). This is the bracket used by the published shift formulas.
pub fn strict_floor(x: &Rat) -> i64 {
    let fl = x.floor().to_integer();
    let v = if x.denom().is_one() { fl - BigInt::one() } else { fl };
    v.to_i64().expect("strict_floor: out of i64 range")
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &Rat) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceil_int: out of i64 range")
}

/// The L2 survival threshold `f/2 + 1/(2c)` for a metric cone with scaling
/// parameter `c > 0`: fiber degree `i` contributes iff `i` is strictly below
/// this value.
pub fn l2_cutoff_value(c: &Rat, f: usize) -> Rat {
    assert!(c.is_positive(), "scaling parameter must be positive");
    ratio(f as i64, 2) + (rat(2) * c).recip()
}

/// Whether fiber degree `i` survives L2 truncation at parameter `c`.
pub fn l2_keeps(i: usize, c: &Rat, f: usize) -> bool {
    rat(i as i64) < l2_cutoff_value(c, f)
}

/// Result of translating a cone scaling parameter into a weight shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftReport {
    pub f: usize,
    pub c: Rat,
    /// The survival threshold `f/2 + 1/(2c)`.
    pub cutoff_value: Rat,
    /// How many fiber degrees survive (`0..=f+1`, before clamping).
    pub kept_degrees: usize,
    /// Shift derived from the truncation dictionary: the L2 condition equals
    /// the upper-middle weight lowered by `normative` steps.
    pub normative: i64,
    /// The published bracket expression for the same shift.
    pub literal: i64,
    /// `literal - normative`; zero for odd `f`, one for even `f`.
    pub discrepancy: i64,
    /// The weight index realizing the L2 condition (before clamping).
    pub weight_index: i64,
}

/// Translates the L2 parameter `c` into a downward shift `k` of the upper
/// middle weight, so that weight `upper_middle - k` imposes exactly the L2
/// truncation. Also evaluates the published closed form
/// (`[[1/2 + 1/(2c)]]` for odd `f`, `[[1 + 1/(2c)]]` for even `f`, bracket =
/// greatest integer strictly below) and reports the difference instead of
/// silently preferring either value.
pub fn hodge_shift(c: &Rat, f: usize) -> ShiftReport {
    assert!(c.is_positive(), "scaling parameter must be positive");
    let cutoff_value = l2_cutoff_value(c, f);
    // Number of nonnegative integers strictly below the threshold. The
    // threshold is >= 1/2 > 0, so this is just the ceiling.
    let kept = ceil_int(&cutoff_value);
    debug_assert!(kept >= 1);
    let (_, upper) = middle_weights(f);
    let upper_cutoff = cutoff_degree(upper, f) as i64;
    let normative = kept - upper_cutoff;
    let half = ratio(1, 2);
    let inv2c = (rat(2) * c).recip();
    let literal = if f % 2 == 1 {
        strict_floor(&(half + &inv2c))
    } else {
        strict_floor(&(rat(1) + &inv2c))
    };
    ShiftReport {
        f,
        c: c.clone(),
        cutoff_value,
        kept_degrees: kept as usize,
        normative,
        literal,
        discrepancy: literal - normative,
        weight_index: upper - normative,
    }
}

/// Checks that truncating at `upper_middle - k` (with `k` the normative
/// shift) keeps exactly the degrees the L2 predicate keeps, across the whole
/// fiber range. This is the consistency statement tying the two dictionaries
/// together; it holds for every positive `c` including values where the
/// shifted weight clamps.
pub fn shift_matches_l2(c: &Rat, f: usize) -> bool {
    let rep = hodge_shift(c, f);
    let cut = cutoff_degree(rep.weight_index, f);
    (0..=f).all(|i| (i < cut) == l2_keeps(i, c, f))
}

/// Sweeps `hodge_shift` over a grid of parameters and fiber dimensions.
/// Used by the verification suites to exercise both parities and the
/// integer-threshold edge cases.
pub fn shift_sweep(cs: &[Rat], fs: &[usize]) -> Vec<ShiftReport> {
    let mut out = Vec::new();
    for &f in fs {
        for c in cs {
            out.push(hodge_shift(c, f));
        }
    }
    out
}

/// Standard sweep grid for the scaling parameter: all rationals p/q in (0,1]
/// with small numerator and denominator, deduplicated, plus the integer
/// thresholds 1/2, 1/4, 1/6 where the cutoff value lands exactly on an
/// integer.
pub fn standard_c_grid() -> Vec<Rat> {
    let mut grid: Vec<Rat> = Vec::new();
    for q in 1..=8i64 {
        for p in 1..=q {
            let v = ratio(p, q);
            if !grid.contains(&v) {
                grid.push(v);
            }
        }
    }
    grid.sort();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        assert_eq!(strict_floor(&rat(3)), 2);
        assert_eq!(strict_floor(&ratio(5, 2)), 2);
        assert_eq!(strict_floor(&rat(0)), -1);
        assert_eq!(strict_floor(&ratio(-1, 2)), -1);
        assert_eq!(strict_floor(&ratio(7, 3)), 2);
        assert_eq!(ceil_int(&ratio(7, 3)), 3);
        assert_eq!(ceil_int(&rat(3)), 3);
    }

    #[test]
    fn cutoffs_and_clamping() {
        // f = 5: weight -1 keeps all six degrees, weight 5 keeps none.
        assert_eq!(cutoff_degree(-1, 5), 6);
        assert_eq!(cutoff_degree(-10, 5), 6);
        assert_eq!(cutoff_degree(5, 5), 0);
        assert_eq!(cutoff_degree(99, 5), 0);
        assert_eq!(cutoff_degree(2, 5), 3);
        assert_eq!(cutoff_degree(0, 4), 4);
    }

    #[test]
    fn duals_sum_to_f_plus_one() {
        for f in 0..=9usize {
            for j in -3..=(f as i64 + 3) {
                let d = dual_weight(j, f);
                assert_eq!(cutoff_degree(j, f) + cutoff_degree(d, f), f + 1, "f={f} j={j}");
                // Duality is an involution on the clamped range.
                assert_eq!(clamp_weight(dual_weight(d, f), f), clamp_weight(j, f));
            }
        }
    }

    #[test]
    fn middles() {
        assert_eq!(middle_weights(5), (2, 2));
        assert_eq!(middle_weights(4), (2, 1));
        assert_eq!(middle_weights(6), (3, 2));
        assert_eq!(middle_weights(1), (0, 0));
        for f in 1..=8usize {
            let (lo, up) = middle_weights(f);
            assert_eq!(dual_weight(lo, f), up, "middles are dual, f={f}");
            // Upper middle keeps at least as many degrees as lower middle.
            assert!(cutoff_degree(up, f) >= cutoff_degree(lo, f));
        }
    }

    #[test]
    fn local_tables() {
        // Complex projective plane as the fiber: (1, 0, 1, 0, 1), f = 4.
        let cp2 = [1usize, 0, 1, 0, 1];
        assert_eq!(local_cone_table(&cp2, -1), vec![1, 0, 1, 0, 1]);
        assert_eq!(local_cone_table(&cp2, 1), vec![1, 0, 1, 0, 0]);
        assert_eq!(local_cone_table(&cp2, 2), vec![1, 0, 0, 0, 0]);
        assert_eq!(local_cone_table(&cp2, 4), vec![0, 0, 0, 0, 0]);
        // Odd sphere fiber: (1, 1), f = 1; middle weight keeps degree 0.
        let (lo, up) = middle_weights(1);
        assert_eq!(lo, up);
        assert_eq!(local_cone_table(&[1, 1], lo), vec![1, 0]);
    }

    #[test]
    fn odd_fiber_shift_formulas_agree_everywhere() {
        for f in [1usize, 3, 5, 7, 9] {
            for c in standard_c_grid() {
                let rep = hodge_shift(&c, f);
                assert_eq!(
                    rep.discrepancy, 0,
                    "odd f={f}, c={c}: literal {} vs normative {}",
                    rep.literal, rep.normative
                );
                assert!(rep.normative >= 0, "shift must be a downward shift");
            }
        }
    }

    #[test]
    fn even_fiber_literal_overshoots_by_one() {
        // The published bracket form for even fibers exceeds the derived
        // shift by exactly one for every c in (0, 1], including the
        // integer-threshold points c = 1/2, 1/4.
        for f in [2usize, 4, 6, 8] {
            for c in standard_c_grid() {
                let rep = hodge_shift(&c, f);
                assert_eq!(
                    rep.discrepancy, 1,
                    "even f={f}, c={c}: literal {} vs normative {}",
                    rep.literal, rep.normative
                );
            }
        }
    }

    #[test]
    fn shift_reproduces_l2_truncation() {
        for f in 1..=8usize {
            for c in standard_c_grid() {
                assert!(shift_matches_l2(&c, f), "f={f} c={c}");
            }
            // Small c clamps the shifted weight below -1; everything is kept.
            assert!(shift_matches_l2(&ratio(1, 40), f), "clamped case f={f}");
        }
    }

    #[test]
    fn shift_values_spotcheck() {
        // f = 5, c = 1: threshold 3, kept 3, upper cutoff 3, shift 0.
        let rep = hodge_shift(&rat(1), 5);
        assert_eq!((rep.kept_degrees, rep.normative, rep.literal), (3, 0, 0));
        // f = 5, c = 1/4: threshold 5/2 + 2 = 9/2, kept 5, shift 2.
        let rep = hodge_shift(&ratio(1, 4), 5);
        assert_eq!((rep.kept_degrees, rep.normative), (5, 2));
        // f = 4, c = 1: threshold 5/2, kept 3, upper cutoff 3, shift 0 but
        // the bracket form says 1.
        let rep = hodge_shift(&rat(1), 4);
        assert_eq!((rep.normative, rep.literal), (0, 1));
        // f = 4, c = 1/2: threshold 3 exactly (integer edge), kept 3.
        let rep = hodge_shift(&ratio(1, 2), 4);
        assert_eq!((rep.kept_degrees, rep.normative, rep.literal), (3, 0, 1));
    }
}

//! Truncated limits of boundary spectral data and their signature
//! corrections.
//!
//! Given a validated run of a boundary fibration's spectral data and an
//! integer cutoff weight `k`, this module computes:
//!
//! * closed-form dimension tables for the three truncation variants, with
//!   each entry broken into labeled summands ([`einf_closed_form`]);
//! * an independent mechanical recomputation that walks the pages and
//!   accumulates honest matrix ranks ([`truncated_run`]);
//! * the middle-degree image table ([`middle_image`]);
//! * the per-page corner pairings ([`tau`]), their signed sum
//!   ([`end_signature`]), and the assembled block pairing matrix with its
//!   cancellation report ([`block_matrix_assembly`]).
//!
//! Table coordinates: column `i` is the base degree. For the absolute
//! variant the row `j` is the fiber degree of the limit slot, rows `0..=f`.
//! For the relative variants the rows are shifted up by one (rows
//! `1..=f+1`), and table slot `(i, j)` draws on limit slot `(i, j-1)`: a
//! cone direction contributes one extra degree. In every variant the table
//! entry at `(i, j)` contributes to total degree `i + j`.

use std::collections::BTreeMap;

use num::Zero;

use crate::exactlin::{rat, sylvester_signature, Mat, Rat, Signature};
use crate::ssq::{LimitRecord, Slot};

#[derive(Debug, thiserror::Error)]
pub enum ConeError {
    #[error("total dimension {0} is odd; middle-degree pairings need it even")]
    OddDimension(usize),
    #[error("corner pairing on page {s} violates its symmetry law")]
    PairingSymmetry { s: usize },
    #[error("cross-page block between pages {row} and {col} is nonzero")]
    CrossTerm { row: usize, col: usize },
}

/// The three truncation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Absolute table at the wider middle cutoff: keeps low rows.
    AbsQ,
    /// Relative table at the wider middle cutoff: keeps high rows.
    RelQ,
    /// Relative table at the narrower middle cutoff: keeps high rows.
    RelP,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::AbsQ => "abs-q",
            Variant::RelQ => "rel-q",
            Variant::RelP => "rel-p",
        };
        write!(w, "{s}")
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Variant, String> {
        match s {
            "abs-q" => Ok(Variant::AbsQ),
            "rel-q" => Ok(Variant::RelQ),
            "rel-p" => Ok(Variant::RelP),
            other => Err(format!("unknown variant {other:?} (abs-q, rel-q, rel-p)")),
        }
    }
}

/// Row bookkeeping for one variant at one cutoff weight.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    pub b: usize,
    pub f: usize,
    pub k: i64,
    pub variant: Variant,
}

impl TruncationSpec {
    pub fn new(b: usize, f: usize, variant: Variant, k: i64) -> TruncationSpec {
        TruncationSpec { b, f, k, variant }
    }

    /// Inclusive table row range.
    pub fn row_range(&self) -> (usize, usize) {
        match self.variant {
            Variant::AbsQ => (0, self.f),
            Variant::RelQ | Variant::RelP => (1, self.f + 1),
        }
    }

    /// Whether table row `j` survives the truncation. The absolute variant
    /// keeps rows up to its cutoff; the relative variants keep rows from
    /// their threshold upward.
    pub fn row_kept(&self, j: i64) -> bool {
        let f = self.f as i64;
        let k = self.k;
        match self.variant {
            Variant::AbsQ => j <= f / 2 + k,
            Variant::RelQ => {
                let j_min = if f % 2 == 1 { (f + 3) / 2 + k } else { f / 2 + k + 2 };
                j >= j_min
            }
            Variant::RelP => {
                let j_min = if f % 2 == 1 { (f + 3) / 2 - k } else { f / 2 - k + 1 };
                j >= j_min
            }
        }
    }

    /// First page whose outgoing image contributes at relative table row
    /// `j`. Meaningful for the relative variants only.
    pub fn rel_s_min(&self, j: i64) -> i64 {
        let f = self.f as i64;
        let k = self.k;
        match self.variant {
            Variant::AbsQ => panic!("the absolute table has no outgoing-page threshold"),
            Variant::RelQ => {
                if f % 2 == 1 {
                    j - (f - 1) / 2 - k
                } else {
                    j - f / 2 - k
                }
            }
            Variant::RelP => {
                if f % 2 == 1 {
                    j - (f - 1) / 2 + k
                } else {
                    j - f / 2 + k + 1
                }
            }
        }
    }
}

/// One labeled contribution to a table entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub label: String,
    pub dim: usize,
}

impl Summand {
    fn limit(i: usize, j: usize, dim: usize) -> Summand {
        Summand { label: format!("E({i},{j})"), dim }
    }

    fn image(s: usize, i: usize, j: usize, dim: usize, starred: bool) -> Summand {
        let star = if starred { "*" } else { "" };
        Summand { label: format!("im d{s}({i},{j}){star}"), dim }
    }
}

/// A truncation table: every in-range slot is present, killed rows with an
/// empty summand list.
#[derive(Debug, Clone)]
pub struct EndTable {
    pub variant: Variant,
    pub k: i64,
    pub b: usize,
    pub f: usize,
    pub entries: BTreeMap<(usize, usize), Vec<Summand>>,
}

impl EndTable {
    pub fn dim(&self, i: usize, j: usize) -> usize {
        self.entries.get(&(i, j)).map(|v| v.iter().map(|s| s.dim).sum()).unwrap_or(0)
    }

    /// Total dimension contributed to total degree `m`.
    pub fn total(&self, m: usize) -> usize {
        self.entries
            .iter()
            .filter(|((i, j), _)| i + j == m)
            .map(|(_, v)| v.iter().map(|s| s.dim).sum::<usize>())
            .sum()
    }

    pub fn labels(&self, i: usize, j: usize) -> Vec<String> {
        self.entries
            .get(&(i, j))
            .map(|v| v.iter().map(|s| s.label.clone()).collect())
            .unwrap_or_default()
    }

    /// Slot dimensions, for comparison against an independent recount.
    pub fn dims_map(&self) -> BTreeMap<(usize, usize), usize> {
        self.entries.keys().map(|&(i, j)| ((i, j), self.dim(i, j))).collect()
    }
}

/// Closed-form truncation table with labeled summands.
///
/// Kept rows carry the limit dimension of their slot plus image
/// corrections: the absolute table revives images arriving from rows the
/// truncation removed, and the relative tables retain sources whose
/// outgoing images land in rows the truncation removed. Summands are
/// emitted whenever their indices are admissible, including when the
/// recorded rank happens to be zero, so the label structure depends only on
/// the shape `(b, f, k)`.
pub fn einf_closed_form(rec: &LimitRecord, variant: Variant, k: i64) -> EndTable {
    let (b, f) = (rec.b, rec.f);
    let spec = TruncationSpec::new(b, f, variant, k);
    let (j0, j1) = spec.row_range();
    let mut entries = BTreeMap::new();
    for i in 0..=b {
        for j in j0..=j1 {
            let mut summands: Vec<Summand> = Vec::new();
            if spec.row_kept(j as i64) {
                match variant {
                    Variant::AbsQ => {
                        summands.push(Summand::limit(i, j, rec.einf_dim(i as i64, j as i64)));
                        for s in 2..=i {
                            let (si, sj) = (i - s, j + s - 1);
                            if sj > f {
                                break;
                            }
                            if !spec.row_kept(sj as i64) {
                                summands.push(Summand::image(
                                    s,
                                    si,
                                    sj,
                                    rec.diff_rank(s, si, sj),
                                    false,
                                ));
                            }
                        }
                    }
                    Variant::RelQ | Variant::RelP => {
                        let (yi, yj) = (i, j - 1);
                        summands.push(Summand::limit(yi, yj, rec.einf_dim(yi as i64, yj as i64)));
                        let s_min = spec.rel_s_min(j as i64).max(2);
                        let s_max = (b - i).min(j) as i64;
                        let mut s = s_min;
                        while s <= s_max {
                            summands.push(Summand::image(
                                s as usize,
                                yi,
                                yj,
                                rec.diff_rank(s as usize, yi, yj),
                                true,
                            ));
                            s += 1;
                        }
                    }
                }
            }
            entries.insert((i, j), summands);
        }
    }
    EndTable { variant, k, b, f, entries }
}

/// Mechanical recount of the truncation table, page by page.
///
/// No threshold arithmetic: each page's differentials are consulted
/// directly. A kept slot starts from the limit dimension of its data slot;
/// then, per page, the absolute table adds the rank of the differential
/// arriving from a removed row, and the relative tables add the rank of the
/// outgoing differential whose landing row was removed. Ranks come from
/// fresh eliminations of the recorded page matrices.
pub fn truncated_run(
    rec: &LimitRecord,
    variant: Variant,
    k: i64,
) -> BTreeMap<(usize, usize), usize> {
    let (b, f) = (rec.b, rec.f);
    let spec = TruncationSpec::new(b, f, variant, k);
    let (j0, j1) = spec.row_range();
    let stop = rec.structural_stop();
    let page_rank = |r: usize, slot: Slot| -> usize {
        rec.page(r).and_then(|p| p.diffs.get(&slot)).map(|d| d.rank()).unwrap_or(0)
    };
    let mut out = BTreeMap::new();
    for i in 0..=b {
        for j in j0..=j1 {
            let mut dim = 0usize;
            if spec.row_kept(j as i64) {
                match variant {
                    Variant::AbsQ => {
                        dim = rec.einf_dim(i as i64, j as i64);
                        for r in 2..=stop {
                            let si = i as i64 - r as i64;
                            let sj = j as i64 + r as i64 - 1;
                            if si < 0 || sj > f as i64 || spec.row_kept(sj) {
                                continue;
                            }
                            dim += page_rank(r, (si as usize, sj as usize));
                        }
                    }
                    Variant::RelQ | Variant::RelP => {
                        let (yi, yj) = (i, j - 1);
                        dim = rec.einf_dim(yi as i64, yj as i64);
                        for r in 2..=stop {
                            let t_row = j as i64 - r as i64 + 1;
                            let ty = j as i64 - r as i64;
                            if spec.row_kept(t_row) || ty < 0 || yi + r > b {
                                continue;
                            }
                            dim += page_rank(r, (yi, yj));
                        }
                    }
                }
            }
            out.insert((i, j), dim);
        }
    }
    out
}

/// The middle-degree image table: at middle total degree, the narrower
/// truncation maps into the wider one, and the image keeps exactly the
/// outgoing-image summands the two relative tables share. Slots sit on the
/// antidiagonal `i + j = n/2` of the relative table; there is no limit
/// summand.
#[derive(Debug, Clone)]
pub struct MiddleTable {
    pub k: i64,
    pub b: usize,
    pub f: usize,
    pub entries: BTreeMap<(usize, usize), Vec<Summand>>,
}

impl MiddleTable {
    pub fn total_dim(&self) -> usize {
        self.entries.values().flatten().map(|s| s.dim).sum()
    }

    pub fn summand_count(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }
}

pub fn middle_image(rec: &LimitRecord, k: i64) -> Result<MiddleTable, ConeError> {
    let (b, f) = (rec.b, rec.f);
    let n = b + f + 1;
    if n % 2 == 1 {
        return Err(ConeError::OddDimension(n));
    }
    let relq = TruncationSpec::new(b, f, Variant::RelQ, k);
    let relp = TruncationSpec::new(b, f, Variant::RelP, k);
    let mut entries = BTreeMap::new();
    for j in 1..=f + 1 {
        let half = (n / 2) as i64;
        let i = half - j as i64;
        if i < 0 || i > b as i64 || !relq.row_kept(j as i64) {
            continue;
        }
        let i = i as usize;
        let (yi, yj) = (i, j - 1);
        let mut summands = Vec::new();
        let t_min = relp.rel_s_min(j as i64).max(2);
        let t_max = (b - i).min(j) as i64;
        let mut t = t_min;
        while t <= t_max {
            summands.push(Summand::image(t as usize, yi, yj, rec.diff_rank(t as usize, yi, yj), false));
            t += 1;
        }
        entries.insert((i, j), summands);
    }
    Ok(MiddleTable { k, b, f, entries })
}

// ---------------------------------------------------------------------------
// Corner pairings
// ---------------------------------------------------------------------------

/// Volume coefficient of the product of two starting-page vectors, zero
/// when the slots do not pair into the corner.
fn corner_coeff(rec: &LimitRecord, p: Slot, x: &Mat, q: Slot, y: &Mat) -> Rat {
    if p.0 + q.0 != rec.b || p.1 + q.1 != rec.f {
        return rat(0);
    }
    let prod = rec.start_product(p, x, q, y);
    rec.volume_coeff(&prod)
}

/// Middle-degree sources of page `s`: slots on the antidiagonal
/// `i + j = n/2 - 1` with a nonzero page-`s` differential, with the
/// recorded complement-of-kernel representatives and their images.
fn middle_sources(rec: &LimitRecord, s: usize) -> Vec<(Slot, Slot, Mat, Mat)> {
    let n = rec.b + rec.f + 1;
    let half = n / 2;
    let mut cols = Vec::new();
    for ((page, i, j), pair) in &rec.images {
        if *page != s || i + j + 1 != half {
            continue;
        }
        let target = (i + s, j + 1 - s);
        for c in 0..pair.source_start.cols() {
            cols.push(((*i, *j), target, pair.source_start.col(c), pair.image_start.col(c)));
        }
    }
    cols
}

/// The page-`s` corner pairing on middle-degree sources: representatives
/// `w` of the complement of the kernel pair by `(w, a) -> coeff of the
/// volume class in w * d_s(a)`. The raw matrix satisfies
/// `G = (-1)^{n/2} G^T` exactly (checked); the returned data is the
/// Sylvester decomposition of `G + G^T`, so pages of the wrong parity give
/// a zero signature.
pub fn tau(rec: &LimitRecord, s: usize) -> Result<Signature, ConeError> {
    let n = rec.b + rec.f + 1;
    if n % 2 == 1 {
        return Err(ConeError::OddDimension(n));
    }
    let cols = middle_sources(rec, s);
    let m = cols.len();
    let g = Mat::from_fn(m, m, |a, c| {
        let (slot_a, _, ref omega_a, _) = cols[a];
        let (_, target_c, _, ref delta_c) = cols[c];
        corner_coeff(rec, slot_a, omega_a, target_c, delta_c)
    });
    let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
    if g != g.transpose().scale(&rat(sign)) {
        return Err(ConeError::PairingSymmetry { s });
    }
    let sym = g.add(&g.transpose());
    Ok(sylvester_signature(&sym).expect("symmetrized matrix"))
}

/// Pages that can contribute to the end correction at weight `k`: parity
/// matched to the base degree (others pair hyperbolically), starting two
/// pages later per extra unit of `k`.
pub fn contributing_pages(rec: &LimitRecord, k: i64) -> Vec<usize> {
    // base is the smallest page of the right parity, so clamping to it is the
    // same as stepping a negative start up by twos.
    let base: i64 = if rec.f % 2 == 1 { 2 } else { 3 };
    let mut s = base.saturating_add(k.saturating_mul(2)).max(base);
    let stop = rec.structural_stop() as i64;
    let mut pages = Vec::new();
    while s <= stop {
        pages.push(s as usize);
        s += 2;
    }
    pages
}

/// The end correction at weight `k`: minus the sum of the corner pairing
/// signatures over the contributing pages.
pub fn end_signature(rec: &LimitRecord, k: i64) -> Result<i64, ConeError> {
    let mut sum = 0i64;
    for s in contributing_pages(rec, k) {
        sum += tau(rec, s)?.value();
    }
    Ok(-sum)
}

/// One off-diagonal cancellation check: the sub-block of the assembled
/// pairing spanned by a complementary pair of distinct source slots on one
/// page. Its signature must vanish.
#[derive(Debug, Clone)]
pub struct CancelPair {
    pub s: usize,
    pub p: Slot,
    pub q: Slot,
    pub signature: i64,
}

/// The assembled middle pairing across all contributing pages.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub pages: Vec<usize>,
    /// Raw assembled matrix, rows and columns ordered page-major.
    pub gram: Mat,
    /// Signature of each page's diagonal block (after symmetrizing).
    pub block_sigs: Vec<(usize, i64)>,
    /// Sum of the block signatures; equals the end correction.
    pub total: i64,
    pub cancellations: Vec<CancelPair>,
}

/// Assembles the full middle pairing matrix at weight `k`, entry by entry
/// from representatives, and verifies its structure: cross-page blocks
/// vanish identically (checked on the computable triangle, extended by the
/// symmetry law), each diagonal block obeys the symmetry law, and
/// complementary slot pairs within a page cancel.
pub fn block_matrix_assembly(rec: &LimitRecord, k: i64) -> Result<BlockReport, ConeError> {
    let n = rec.b + rec.f + 1;
    if n % 2 == 1 {
        return Err(ConeError::OddDimension(n));
    }
    let pages = contributing_pages(rec, k);
    let mut cols: Vec<(usize, Slot, Slot, Mat, Mat)> = Vec::new();
    for &s in &pages {
        for (slot, target, omega, delta) in middle_sources(rec, s) {
            cols.push((s, slot, target, omega, delta));
        }
    }
    let m = cols.len();
    let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
    let mut gram = Mat::zeros(m, m);
    // Upper-left to lower-right: entries whose row page is at least the
    // column page are honest representative-level products; the rest follow
    // from the symmetry law once the cross blocks are known to vanish.
    for a in 0..m {
        for c in 0..m {
            let (sa, slot_a, _, ref omega_a, _) = cols[a];
            let (sc, _, target_c, _, ref delta_c) = cols[c];
            if sa < sc {
                continue;
            }
            let v = -corner_coeff(rec, slot_a, omega_a, target_c, delta_c);
            if sa > sc {
                if !v.is_zero() {
                    return Err(ConeError::CrossTerm { row: sa, col: sc });
                }
                continue;
            }
            gram.set(a, c, v);
        }
    }
    for a in 0..m {
        for c in 0..m {
            if cols[a].0 < cols[c].0 {
                let v = gram.at(c, a) * rat(sign);
                gram.set(a, c, v);
            }
        }
    }
    // Diagonal blocks: symmetry law, signatures, and slot-pair
    // cancellations.
    let mut block_sigs = Vec::new();
    let mut cancellations = Vec::new();
    let mut total = 0i64;
    for &s in &pages {
        let idx: Vec<usize> = (0..m).filter(|&a| cols[a].0 == s).collect();
        let block = Mat::from_fn(idx.len(), idx.len(), |a, c| gram.at(idx[a], idx[c]).clone());
        if block != block.transpose().scale(&rat(sign)) {
            return Err(ConeError::PairingSymmetry { s });
        }
        let sym = block.add(&block.transpose());
        let sig = sylvester_signature(&sym).expect("symmetrized matrix").value();
        block_sigs.push((s, sig));
        total += sig;
        let mut slots: Vec<Slot> = idx.iter().map(|&a| cols[a].1).collect();
        slots.dedup();
        for (pi, &p) in slots.iter().enumerate() {
            for &q in slots.iter().skip(pi + 1) {
                if p.0 + q.0 + s != rec.b {
                    continue;
                }
                let sub: Vec<usize> = idx
                    .iter()
                    .copied()
                    .filter(|&a| cols[a].1 == p || cols[a].1 == q)
                    .collect();
                let subm =
                    Mat::from_fn(sub.len(), sub.len(), |a, c| gram.at(sub[a], sub[c]).clone());
                let subsym = subm.add(&subm.transpose());
                cancellations.push(CancelPair {
                    s,
                    p,
                    q,
                    signature: sylvester_signature(&subsym).expect("symmetrized matrix").value(),
                });
            }
        }
    }
    Ok(BlockReport { pages, gram, block_sigs, total, cancellations })
}

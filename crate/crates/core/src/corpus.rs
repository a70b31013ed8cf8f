//! Seeded corpus of validated spectral models.
//!
//! The truncation and signature machinery consumes [`LimitRecord`]s, and its
//! tests want many distinct, honestly validated ones. This module builds
//! them from two template families over small product bases:
//!
//! * free models: the fiber is a product of odd spheres (plus inert even
//!   factors), and each odd generator is sent to a chosen class on the page
//!   matching its degree, possibly zero and possibly with a fiber component.
//!   These come from genuine differential algebra models and validate for
//!   any choice of pure-base targets.
//! * twisted models: a degree-2 generator `y` with `y^2 = 0` maps on page 3,
//!   while a degree-3 partner `z` maps on page 2 into a multiple of `y`.
//!   On composite monomials `y m'` the page-3 value flips sign once per
//!   partner factor present in `m'`; that is the choice forced by products
//!   with surviving classes wherever the relevant slots are alive, and the
//!   final validation run arbitrates. Draws for which no consistent page
//!   system exists are dropped.
//!
//! Schedules are synthesized page by page: run the engine with the pages
//! collected so far, push the current page's representatives through the
//! declared starting-page maps, and project onto page coordinates at the
//! target slot. A final full run re-validates every axiom from scratch.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactlin::{kron, rat, Mat};
use crate::ssq::{
    run_to_limit, structural_stop, GradedRing, LimitRecord, Page, Schedule, Slot, SsqError,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error(transparent)]
    Engine(#[from] SsqError),
    #[error("template misuse: {0}")]
    Spec(String),
    #[error("declared page-{r} map out of ({},{}) does not land on that page", slot.0, slot.1)]
    Project { r: usize, slot: Slot },
}

// ---------------------------------------------------------------------------
// Fiber descriptions
// ---------------------------------------------------------------------------

/// One tensor factor of a fiber ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// A sphere of the given positive dimension.
    Sphere(usize),
    /// A degree-2 class truncated above power `m`.
    Proj(usize),
}

impl Factor {
    fn ring(self) -> GradedRing {
        match self {
            Factor::Sphere(d) => GradedRing::sphere(d),
            Factor::Proj(m) => GradedRing::proj_space(m),
        }
    }

    /// Degree of the generating class.
    fn gen_degree(self) -> usize {
        match self {
            Factor::Sphere(d) => d,
            Factor::Proj(_) => 2,
        }
    }

    /// Largest allowed exponent of the generating class.
    fn cap(self) -> usize {
        match self {
            Factor::Sphere(_) => 1,
            Factor::Proj(m) => m,
        }
    }

    fn top(self) -> usize {
        self.gen_degree() * self.cap()
    }

    fn label(self) -> String {
        match self {
            Factor::Sphere(d) => format!("s{d}"),
            Factor::Proj(m) => format!("p{m}"),
        }
    }
}

/// Builds the product of the given factors, folded left to right; basis
/// order matches iterated [`GradedRing::tensor`].
pub fn product_ring(factors: &[Factor]) -> GradedRing {
    let mut ring = GradedRing::point();
    for &f in factors {
        ring = GradedRing::tensor(&ring, &f.ring());
    }
    ring
}

/// Differential assignment for one fiber factor's generator.
#[derive(Debug, Clone)]
pub struct PartDiff {
    /// Page carrying the generator's map; between 2 and degree + 1.
    pub page: usize,
    /// Value in the target slot `(page, degree + 1 - page)`, as a column in
    /// that slot's starting coordinates.
    pub value: Mat,
    /// Marks the truncated degree-2 generator of a twisted model. Composite
    /// monomials then carry the companion sign described in the module docs.
    pub twist: bool,
}

/// One fiber factor together with its (optional) differential.
#[derive(Debug, Clone)]
pub struct FiberPart {
    pub factor: Factor,
    pub diff: Option<PartDiff>,
}

impl FiberPart {
    pub fn inert(factor: Factor) -> FiberPart {
        FiberPart { factor, diff: None }
    }
}

/// Monomial bookkeeping for a product fiber: `monos[k]` lists the exponent
/// vectors spanning degree `k`, in the same order as the ring's basis.
struct FiberModel {
    ring: GradedRing,
    monos: Vec<Vec<Vec<u8>>>,
}

impl FiberModel {
    fn build(parts: &[FiberPart]) -> FiberModel {
        let factors: Vec<Factor> = parts.iter().map(|p| p.factor).collect();
        let ring = product_ring(&factors);
        let mut monos: Vec<Vec<Vec<u8>>> = vec![vec![Vec::new()]];
        for &fac in &factors {
            let d = fac.gen_degree();
            let old_top = monos.len() - 1;
            let new_top = old_top + fac.top();
            let mut next: Vec<Vec<Vec<u8>>> = vec![Vec::new(); new_top + 1];
            for (n, bucket) in next.iter_mut().enumerate() {
                // Tensor ordering: ascending degree in the left factor, and
                // the left factor is everything accumulated so far.
                for e in (0..=fac.cap()).rev() {
                    let q = e * d;
                    if q > n || n - q > old_top {
                        continue;
                    }
                    for m in &monos[n - q] {
                        let mut m2 = m.clone();
                        m2.push(e as u8);
                        bucket.push(m2);
                    }
                }
            }
            monos = next;
        }
        for (k, bucket) in monos.iter().enumerate() {
            assert_eq!(bucket.len(), ring.dim(k), "monomial count mismatch in degree {k}");
        }
        FiberModel { ring, monos }
    }

    fn index(&self, deg: usize, m: &[u8]) -> usize {
        self.monos[deg].iter().position(|x| x == m).expect("monomial present in its degree")
    }
}

fn unit_vec(n: usize, k: usize) -> Mat {
    Mat::from_fn(n, 1, |r, _| if r == k { rat(1) } else { rat(0) })
}

fn check_parts(parts: &[FiberPart]) -> Result<(), CorpusError> {
    let spec = |m: String| Err(CorpusError::Spec(m));
    if parts.is_empty() {
        return spec("fiber needs at least one factor".into());
    }
    for (e, part) in parts.iter().enumerate() {
        let Some(d) = &part.diff else { continue };
        if let Factor::Proj(_) = part.factor {
            return spec("truncated polynomial factors are inert".into());
        }
        let deg = part.factor.gen_degree();
        if d.twist {
            if part.factor != Factor::Sphere(2) || d.page != 3 {
                return spec("a twisted generator has degree 2 and maps on page 3".into());
            }
            if e != 0 {
                return spec("the twisted generator must be the first factor".into());
            }
        } else if deg % 2 == 0 {
            return spec("only odd sphere factors carry plain differentials".into());
        }
        if d.page < 2 || d.page > deg + 1 {
            return spec(format!("page {} out of range for a degree-{deg} generator", d.page));
        }
        if d.value.cols() != 1 {
            return spec("differential values are single columns".into());
        }
    }
    Ok(())
}

/// Starting-page-level differential formulas for a product bundle whose
/// fiber generators map as declared: `formulas[r][(i, j)]` sends slot
/// `(i, j)` starting coordinates to target slot starting coordinates.
fn part_formulas(
    base: &GradedRing,
    fiber: &FiberModel,
    start: &Page,
    parts: &[FiberPart],
) -> Result<BTreeMap<usize, BTreeMap<Slot, Mat>>, CorpusError> {
    let (b, f) = (base.top(), fiber.ring.top());
    let mut formulas: BTreeMap<usize, BTreeMap<Slot, Mat>> = BTreeMap::new();
    let pages: Vec<usize> = {
        let mut ps: Vec<usize> =
            parts.iter().filter_map(|p| p.diff.as_ref().map(|d| d.page)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    };
    for &r in &pages {
        let mut maps: BTreeMap<Slot, Mat> = BTreeMap::new();
        for i in 0..=b {
            for j in 0..=f {
                let cols = start.dim(i as i64, j as i64);
                let rows = start.dim((i + r) as i64, j as i64 + 1 - r as i64);
                if cols == 0 || rows == 0 {
                    continue;
                }
                let mut fmat = Mat::zeros(rows, cols);
                for (e, part) in parts.iter().enumerate() {
                    let Some(pd) = &part.diff else { continue };
                    if pd.page != r {
                        continue;
                    }
                    let deg = part.factor.gen_degree();
                    let vslot = (r, deg + 1 - r);
                    if pd.value.rows() != start.dim(vslot.0 as i64, vslot.1 as i64) {
                        return Err(CorpusError::Spec(format!(
                            "value for factor {e} must live in slot ({},{})",
                            vslot.0, vslot.1
                        )));
                    }
                    for (mi, m) in fiber.monos[j].iter().enumerate() {
                        if m[e] == 0 {
                            continue;
                        }
                        debug_assert_eq!(m[e], 1, "sphere exponents cap at one");
                        let mut m2 = m.clone();
                        m2[e] = 0;
                        let rest_deg = j - deg;
                        let sign = if pd.twist {
                            // Companion sign: one flip per partner factor in
                            // the monomial, a partner being a factor whose
                            // own page-2 value has a fiber component (it
                            // interferes with the twisted generator's
                            // column). Forced wherever the relevant slots
                            // stay alive; the validation run arbitrates.
                            let partners = (0..parts.len())
                                .filter(|&e2| {
                                    e2 != e
                                        && m[e2] > 0
                                        && parts[e2].diff.as_ref().is_some_and(|d2| {
                                            d2.page == 2 && parts[e2].factor.gen_degree() > 1
                                        })
                                })
                                .count();
                            if partners % 2 == 0 {
                                1i64
                            } else {
                                -1
                            }
                        } else {
                            // Leibniz prefix sign; the value's total degree
                            // is even, so moving it out adds nothing.
                            let pre: usize = (0..e)
                                .map(|e2| m[e2] as usize * parts[e2].factor.gen_degree())
                                .sum();
                            if pre % 2 == 0 {
                                1
                            } else {
                                -1
                            }
                        };
                        let rest = unit_vec(fiber.ring.dim(rest_deg), fiber.index(rest_deg, &m2));
                        // For a twisted generator the companion sign is
                        // stated against `value (x) rest`; the value has odd
                        // total degree, so the factor order matters. Plain
                        // values have even total degree and commute.
                        let v1 = if pd.twist {
                            start.product_vec(vslot, &pd.value, (0, rest_deg), &rest)
                        } else {
                            start.product_vec((0, rest_deg), &rest, vslot, &pd.value)
                        };
                        if v1.rows() == 0 || v1.is_zero() {
                            continue;
                        }
                        for u in 0..base.dim(i) {
                            let eu = unit_vec(base.dim(i), u);
                            let v2 = start.product_vec((i, 0), &eu, (r, j + 1 - r), &v1);
                            if v2.rows() == 0 {
                                continue;
                            }
                            // The whole map also picks up the sign of the
                            // base degree it slides past.
                            let total = if i % 2 == 0 { sign } else { -sign };
                            let col = u * fiber.ring.dim(j) + mi;
                            for rr in 0..rows {
                                let add = v2.at(rr, 0) * rat(total);
                                let v = fmat.at(rr, col) + &add;
                                fmat.set(rr, col, v);
                            }
                        }
                    }
                }
                if !fmat.is_zero() {
                    maps.insert((i, j), fmat);
                }
            }
        }
        if !maps.is_empty() {
            formulas.insert(r, maps);
        }
    }
    Ok(formulas)
}

// ---------------------------------------------------------------------------
// Schedule synthesis
// ---------------------------------------------------------------------------

/// A finished corpus entry: a validated run plus the schedule that produced
/// it.
#[derive(Debug, Clone)]
pub struct CorpusModel {
    pub name: String,
    pub schedule: Schedule,
    pub record: LimitRecord,
}

impl CorpusModel {
    pub fn b(&self) -> usize {
        self.record.b
    }

    pub fn f(&self) -> usize {
        self.record.f
    }
}

/// Turns starting-page-level maps into a page-coordinate schedule, one page
/// at a time, then validates the result with a fresh full run.
pub fn synthesize(
    name: &str,
    start: &Page,
    formulas: &BTreeMap<usize, BTreeMap<Slot, Mat>>,
) -> Result<CorpusModel, CorpusError> {
    let stop = structural_stop(start.base_degree(), start.fiber_degree());
    let mut schedule: Schedule = BTreeMap::new();
    for r in 2..=stop {
        let Some(maps) = formulas.get(&r) else { continue };
        let rec = run_to_limit(start, &schedule)?;
        let Some(state) = rec.page(r) else { continue };
        let mut page_maps: BTreeMap<Slot, Mat> = BTreeMap::new();
        for (&(i, j), fmat) in maps {
            let src = &state.reps[i][j];
            if src.cols() == 0 {
                continue;
            }
            let dval = fmat.mul(src);
            if dval.is_zero() {
                continue;
            }
            let (ti, tj) = (i + r, j + 1 - r);
            let reps_t = &state.reps[ti][tj];
            let bnd_t = &state.boundaries[ti][tj];
            let sol = reps_t
                .hstack(bnd_t)
                .solve(&dval)
                .ok_or(CorpusError::Project { r, slot: (i, j) })?;
            let page_part = Mat::from_fn(reps_t.cols(), dval.cols(), |a, c| sol.at(a, c).clone());
            if !page_part.is_zero() {
                page_maps.insert((i, j), page_part);
            }
        }
        if !page_maps.is_empty() {
            schedule.insert(r, page_maps);
        }
    }
    let record = run_to_limit(start, &schedule)?;
    Ok(CorpusModel { name: name.to_string(), schedule, record })
}

/// Builds and validates a bundle model over `base` with the given fiber
/// parts.
pub fn bundle_model(
    name: &str,
    base: &GradedRing,
    parts: &[FiberPart],
) -> Result<CorpusModel, CorpusError> {
    check_parts(parts)?;
    let fiber = FiberModel::build(parts);
    let start = Page::product_bundle_page(base, &fiber.ring)?;
    let formulas = part_formulas(base, &fiber, &start, parts)?;
    synthesize(name, &start, &formulas)
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

fn nonzero(v: Mat) -> Option<Mat> {
    if v.is_zero() {
        None
    } else {
        Some(v)
    }
}

/// Fiber parts for a free model: odd sphere generators with the given
/// pure-base page-(degree+1) targets, then inert extra factors.
pub fn free_parts(degrees: &[usize], targets: &[Mat], extras: &[Factor]) -> Vec<FiberPart> {
    assert_eq!(degrees.len(), targets.len());
    let mut parts: Vec<FiberPart> = degrees
        .iter()
        .zip(targets)
        .map(|(&d, t)| FiberPart {
            factor: Factor::Sphere(d),
            diff: nonzero(t.clone()).map(|value| PartDiff { page: d + 1, value, twist: false }),
        })
        .collect();
    parts.extend(extras.iter().map(|&x| FiberPart::inert(x)));
    parts
}

/// Fiber parts for a twisted model: `y` of degree 2 and `z` of degree 3,
/// with `d2(z) = w (x) y` and `d3(y) = (w s) (x) 1`, plus an optional circle
/// factor mapping to `a` on page 2. When `w` is zero, `z` instead maps on
/// page 4 to `t4`.
pub fn twisted_parts(
    base: &GradedRing,
    w: &Mat,
    s: &Mat,
    a: Option<&Mat>,
    t4: Option<&Mat>,
) -> Vec<FiberPart> {
    let t = base.mult_matrix(1, 2).mul(&kron(s, w));
    let z_diff = if !w.is_zero() {
        Some(PartDiff { page: 2, value: w.clone(), twist: false })
    } else {
        t4.cloned().and_then(nonzero).map(|value| PartDiff { page: 4, value, twist: false })
    };
    let mut parts = vec![
        FiberPart {
            factor: Factor::Sphere(2),
            diff: nonzero(t).map(|value| PartDiff { page: 3, value, twist: true }),
        },
        FiberPart { factor: Factor::Sphere(3), diff: z_diff },
    ];
    if let Some(a) = a {
        parts.push(FiberPart {
            factor: Factor::Sphere(1),
            diff: nonzero(a.clone()).map(|value| PartDiff { page: 2, value, twist: false }),
        });
    }
    parts
}

// ---------------------------------------------------------------------------
// Seeded sampling
// ---------------------------------------------------------------------------

pub const CORPUS_SEED: u64 = 0xC0FFEE;

const BASES: &[&[Factor]] = &[
    &[Factor::Sphere(1)],
    &[Factor::Sphere(2)],
    &[Factor::Sphere(3)],
    &[Factor::Sphere(4)],
    &[Factor::Sphere(5)],
    &[Factor::Sphere(6)],
    &[Factor::Sphere(1), Factor::Sphere(1)],
    &[Factor::Sphere(1), Factor::Sphere(2)],
    &[Factor::Sphere(1), Factor::Sphere(3)],
    &[Factor::Sphere(1), Factor::Sphere(4)],
    &[Factor::Sphere(2), Factor::Sphere(2)],
    &[Factor::Sphere(2), Factor::Sphere(3)],
    &[Factor::Sphere(3), Factor::Sphere(3)],
    &[Factor::Proj(2)],
    &[Factor::Proj(3)],
    &[Factor::Sphere(1), Factor::Proj(2)],
    &[Factor::Sphere(2), Factor::Proj(2)],
    &[Factor::Sphere(1), Factor::Sphere(1), Factor::Sphere(1)],
    &[Factor::Sphere(1), Factor::Sphere(1), Factor::Sphere(2)],
    &[Factor::Sphere(1), Factor::Sphere(2), Factor::Sphere(2)],
    &[Factor::Sphere(1), Factor::Sphere(1), Factor::Sphere(1), Factor::Sphere(2)],
];

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Mat {
    Mat::from_fn(dim, 1, |_, _| {
        if rng.gen_bool(0.5) {
            rat(0)
        } else {
            rat(rng.gen_range(-2..=2))
        }
    })
}

fn random_vec_nonzero(rng: &mut ChaCha8Rng, dim: usize) -> Mat {
    for _ in 0..4 {
        let v = random_vec(rng, dim);
        if !v.is_zero() {
            return v;
        }
    }
    random_vec(rng, dim)
}

fn base_label(factors: &[Factor]) -> String {
    factors.iter().map(|f| f.label()).collect::<Vec<_>>().join("*")
}

fn draw_free(rng: &mut ChaCha8Rng, index: usize) -> Result<CorpusModel, CorpusError> {
    let bfs = BASES[rng.gen_range(0..BASES.len())];
    let base = product_ring(bfs);
    let mut degrees: Vec<usize> = Vec::new();
    let mut total = 0usize;
    let want = rng.gen_range(1..=3);
    for _ in 0..want {
        let menu: Vec<usize> = [1usize, 1, 3, 3, 5].iter().copied().filter(|d| total + d <= 6).collect();
        if menu.is_empty() {
            break;
        }
        let d = menu[rng.gen_range(0..menu.len())];
        degrees.push(d);
        total += d;
    }
    let mut extras: Vec<Factor> = Vec::new();
    if rng.gen_bool(0.25) {
        let menu: Vec<Factor> = [Factor::Proj(1), Factor::Proj(2), Factor::Sphere(2), Factor::Sphere(4)]
            .iter()
            .copied()
            .filter(|x| total + x.top() <= 6)
            .collect();
        if !menu.is_empty() {
            extras.push(menu[rng.gen_range(0..menu.len())]);
        }
    }
    let targets: Vec<Mat> =
        degrees.iter().map(|&d| random_vec(rng, base.dim(d + 1))).collect();
    let parts = free_parts(&degrees, &targets, &extras);
    let fdesc: String = parts.iter().map(|p| p.factor.label()).collect::<Vec<_>>().join("*");
    let name = format!("free {fdesc} over {} [{index:03}]", base_label(bfs));
    bundle_model(&name, &base, &parts)
}

fn draw_twisted(rng: &mut ChaCha8Rng, index: usize, circle: bool) -> Result<CorpusModel, CorpusError> {
    let menu: Vec<&[Factor]> = BASES
        .iter()
        .copied()
        .filter(|fs| {
            let ring = product_ring(fs);
            ring.dim(1) >= 1 && ring.dim(2) >= 1 && ring.top() >= 3
        })
        .collect();
    let bfs = menu[rng.gen_range(0..menu.len())];
    let base = product_ring(bfs);
    let w = random_vec_nonzero(rng, base.dim(2));
    let s = random_vec_nonzero(rng, base.dim(1));
    let t4 = if w.is_zero() { Some(random_vec(rng, base.dim(4))) } else { None };
    let a = if circle { Some(random_vec_nonzero(rng, base.dim(2))) } else { None };
    let parts = twisted_parts(&base, &w, &s, a.as_ref(), t4.as_ref());
    let tag = if circle { "tw6" } else { "tw5" };
    let name = format!("{tag} over {} [{index:03}]", base_label(bfs));
    bundle_model(&name, &base, &parts)
}

/// Draws `count` validated models, deterministically from the seed. Draws
/// whose templates do not extend to a consistent page system are skipped,
/// so the result depends only on `(seed, count)`.
pub fn sample_models(seed: u64, count: usize) -> Vec<CorpusModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<CorpusModel> = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts <= 80 * count + 80, "corpus generation stalled");
        let family = rng.gen_range(0..10);
        let drawn = if family < 6 {
            draw_free(&mut rng, out.len())
        } else if family < 8 {
            draw_twisted(&mut rng, out.len(), false)
        } else {
            draw_twisted(&mut rng, out.len(), true)
        };
        if let Ok(m) = drawn {
            out.push(m);
        }
    }
    out
}

//! First-quadrant multiplicative spectral data and the page-turning engine.
//!
//! A [`Page`] holds a bigraded array of rational vector spaces in the
//! rectangle `0..=b` by `0..=f`, slotwise structure constants for a graded
//! commutative product, a distinguished volume class spanning the corner
//! slot `(b, f)`, and the differentials of the current page (bidegree
//! `(r, 1-r)`). Construction of the starting page from base and fiber
//! cohomology rings, validation of all the algebra axioms a page of a
//! fibration must satisfy, single page turns, and full runs to the limit
//! page live here.
//!
//! [`run_to_limit`] keeps every page anchored in the coordinates of the
//! starting page: each slot of each page carries representative vectors in
//! starting-page coordinates, and each differential records a basis for its
//! image together with the source vectors mapping onto it. The resulting
//! [`LimitRecord`] is what the truncation tables, tau invariants, and Gram
//! assemblies downstream consume.

use crate::exactlin::{kron, quotient_basis, Mat, Rat};
use num::Zero;
use std::collections::BTreeMap;

/// Bigraded position `(i, j)`: `i` along the base, `j` along the fiber.
pub type Slot = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SsqError {
    #[error("ring: {0}")]
    Ring(String),
    #[error("slot ({0},{1}): {2}")]
    Slot(usize, usize, String),
    #[error("differential at ({0},{1}) on page {2}: {3}")]
    Diff(usize, usize, usize, String),
    #[error("d o d != 0 at ({0},{1}) on page {2}")]
    NotComplex(usize, usize, usize),
    #[error("derivation rule fails on page {r} for slots ({pi},{pj}) x ({qi},{qj})")]
    Derivation { r: usize, pi: usize, pj: usize, qi: usize, qj: usize },
    #[error("graded commutativity fails for slots ({pi},{pj}) x ({qi},{qj})")]
    Commutativity { pi: usize, pj: usize, qi: usize, qj: usize },
    #[error("unit axiom fails at slot ({0},{1})")]
    Unit(usize, usize),
    #[error("volume class must be a nonzero vector in the 1-dimensional corner slot")]
    Volume,
    #[error("duality pairing degenerate between ({0},{1}) and ({2},{3}) on page {4}")]
    Degenerate(usize, usize, usize, usize, usize),
    #[error("schedule page {0} is outside 2..={1}")]
    SchedulePage(usize, usize),
    #[error("product of classes does not descend to page {0} at slot ({1},{2}); inconsistent input data")]
    ProductDescent(usize, usize, usize),
}

// ---------------------------------------------------------------------------
// Graded rings
// ---------------------------------------------------------------------------

/// A finite-dimensional graded commutative ring over the rationals,
/// presented by degreewise dimensions and structure constants.
///
/// `mult[(a, b)]` maps the pair basis of degree `a` times degree `b` to
/// degree `a + b` coordinates; the pair `(u, v)` flattens to column
/// `u * dim(b) + v`. Missing entries mean the product is zero (always the
/// case above the top degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRing {
    dims: Vec<usize>,
    mult: BTreeMap<(usize, usize), Mat>,
}

impl GradedRing {
    /// The one-point ring: Q in degree 0.
    pub fn point() -> GradedRing {
        let mut mult = BTreeMap::new();
        mult.insert((0, 0), Mat::identity(1));
        GradedRing { dims: vec![1], mult }
    }

    /// Cohomology ring of an `n`-sphere, `n >= 1`.
    pub fn sphere(n: usize) -> GradedRing {
        assert!(n >= 1, "sphere dimension must be positive");
        let mut dims = vec![0; n + 1];
        dims[0] = 1;
        dims[n] = 1;
        let mut mult = BTreeMap::new();
        mult.insert((0, 0), Mat::identity(1));
        mult.insert((0, n), Mat::identity(1));
        mult.insert((n, 0), Mat::identity(1));
        // x * x lives above the top degree, hence zero; no entry needed.
        GradedRing { dims, mult }
    }

    /// Cohomology ring of complex projective `m`-space: one generator `y` in
    /// degree 2 with `y^(m+1) = 0`. Basis in degree `2a` is `y^a`.
    pub fn proj_space(m: usize) -> GradedRing {
        assert!(m >= 1, "projective space needs m >= 1");
        let top = 2 * m;
        let mut dims = vec![0; top + 1];
        let mut mult = BTreeMap::new();
        for a in 0..=m {
            dims[2 * a] = 1;
        }
        for a in 0..=m {
            for b in 0..=m {
                if a + b <= m {
                    mult.insert((2 * a, 2 * b), Mat::identity(1));
                }
            }
        }
        GradedRing { dims, mult }
    }

    /// Tensor product with the Koszul sign:
    /// `(u (x) v)(u' (x) v') = (-1)^{|v||u'|} uu' (x) vv'`.
    /// Degree-`k` basis is blocks of `(u, v)` with `|u| = p` ascending,
    /// `u`-major within a block.
    pub fn tensor(a: &GradedRing, b: &GradedRing) -> GradedRing {
        let top = a.top() + b.top();
        let dims: Vec<usize> =
            (0..=top).map(|k| (0..=k.min(a.top())).map(|p| a.dim(p) * b.dim(k - p)).sum()).collect();
        let index = |p: usize, iu: usize, q: usize, iv: usize| -> usize {
            let k = p + q;
            let mut off = 0;
            for pp in 0..p {
                off += a.dim(pp) * b.dim(k - pp);
            }
            off + iu * b.dim(q) + iv
        };
        let mut mult = BTreeMap::new();
        for da in 0..=top {
            for db in 0..=(top - da) {
                let (rows, cols) = (dims[da + db], dims[da] * dims[db]);
                if rows == 0 || cols == 0 {
                    continue;
                }
                let mut m = Mat::zeros(rows, cols);
                // Enumerate pair bases of degrees da and db.
                for p in 0..=da.min(a.top()) {
                    let q = da - p;
                    for p2 in 0..=db.min(a.top()) {
                        let q2 = db - p2;
                        let ab = a.mult_matrix(p, p2);
                        let bb = b.mult_matrix(q, q2);
                        if ab.rows() == 0 || bb.rows() == 0 {
                            continue;
                        }
                        for iu in 0..a.dim(p) {
                            for iv in 0..b.dim(q) {
                                for ju in 0..a.dim(p2) {
                                    for jv in 0..b.dim(q2) {
                                        let col_l = index(p, iu, q, iv);
                                        let col_r = index(p2, ju, q2, jv);
                                        let col = col_l * dims[db] + col_r;
                                        let sign_neg = (q * p2) % 2 == 1;
                                        for ku in 0..a.dim(p + p2) {
                                            let ca = ab.at(ku, iu * a.dim(p2) + ju);
                                            if ca.is_zero() {
                                                continue;
                                            }
                                            for kv in 0..b.dim(q + q2) {
                                                let cb = bb.at(kv, iv * b.dim(q2) + jv);
                                                if cb.is_zero() {
                                                    continue;
                                                }
                                                let row = index(p + p2, ku, q + q2, kv);
                                                let mut val = ca * cb;
                                                if sign_neg {
                                                    val = -val;
                                                }
                                                let v = m.at(row, col) + &val;
                                                m.set(row, col, v);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                mult.insert((da, db), m);
            }
        }
        GradedRing { dims, mult }
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// Structure constants for degree `a` times degree `b`, materialized with
    /// shape `dim(a+b) x dim(a)*dim(b)` (zero above the top degree).
    pub fn mult_matrix(&self, a: usize, b: usize) -> Mat {
        match self.mult.get(&(a, b)) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.dim(a + b), self.dim(a) * self.dim(b)),
        }
    }

    /// Validates the ring axioms needed downstream: unit, graded
    /// commutativity, associativity, a 1-dimensional top degree, and a
    /// nondegenerate pairing into the top degree.
    pub fn check(&self) -> Result<(), SsqError> {
        let err = |m: String| Err(SsqError::Ring(m));
        if self.dim(0) != 1 {
            return err("degree 0 must be 1-dimensional".into());
        }
        let top = self.top();
        if self.dim(top) != 1 {
            return err("top degree must be 1-dimensional".into());
        }
        for a in 0..=top {
            let n = self.dim(a);
            if n == 0 {
                continue;
            }
            if self.mult_matrix(0, a) != Mat::identity(n) || self.mult_matrix(a, 0) != Mat::identity(n) {
                return err(format!("unit fails in degree {a}"));
            }
        }
        // Graded commutativity.
        for a in 0..=top {
            for b in 0..=(top - a) {
                let m_ab = self.mult_matrix(a, b);
                let m_ba = self.mult_matrix(b, a);
                let (na, nb) = (self.dim(a), self.dim(b));
                for u in 0..na {
                    for v in 0..nb {
                        for w in 0..self.dim(a + b) {
                            let lhs = m_ab.at(w, u * nb + v).clone();
                            let mut rhs = m_ba.at(w, v * na + u).clone();
                            if (a * b) % 2 == 1 {
                                rhs = -rhs;
                            }
                            if lhs != rhs {
                                return err(format!("commutativity fails: deg {a} x deg {b}"));
                            }
                        }
                    }
                }
            }
        }
        // Associativity: (xy)z = x(yz).
        for a in 0..=top {
            for b in 0..=(top - a) {
                for c in 0..=(top - a - b) {
                    let lhs = self.mult_matrix(a + b, c).mul(&kron(&self.mult_matrix(a, b), &Mat::identity(self.dim(c))));
                    let rhs = self.mult_matrix(a, b + c).mul(&kron(&Mat::identity(self.dim(a)), &self.mult_matrix(b, c)));
                    if lhs != rhs {
                        return err(format!("associativity fails: degrees {a},{b},{c}"));
                    }
                }
            }
        }
        // Poincare pairing into the top degree.
        for a in 0..=top {
            let b = top - a;
            if self.dim(a) != self.dim(b) {
                return err(format!("duality dimension mismatch: {a} vs {b}"));
            }
            let m = self.mult_matrix(a, b);
            let pairing = Mat::from_fn(self.dim(b), self.dim(a), |v, u| m.at(0, u * self.dim(b) + v).clone());
            if pairing.rank() != self.dim(a) {
                return err(format!("degenerate pairing in degree {a}"));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Pages
// ---------------------------------------------------------------------------

/// One page of first-quadrant multiplicative spectral data. See the module
/// docs for the conventions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    r: usize,
    b: usize,
    f: usize,
    dims: Vec<Vec<usize>>,
    /// Differentials of this page, in this page's coordinates; absent means
    /// zero. `diffs[(i, j)]` maps slot `(i, j)` to `(i + r, j - r + 1)`.
    diffs: BTreeMap<Slot, Mat>,
    /// Slotwise structure constants; `mult[(p, q)]` has shape
    /// `dim(p + q) x dim(p) * dim(q)`, absent means zero.
    mult: BTreeMap<(Slot, Slot), Mat>,
    /// Nonzero vector spanning the corner slot `(b, f)`.
    volume: Mat,
}

impl Page {
    /// Starting page of an oriented bundle with the given base and fiber
    /// cohomology rings: slot `(i, j)` is `H^i(base) (x) H^j(fiber)`, with
    /// the Koszul-signed product and the tensor of the two volume classes.
    /// No differentials are attached; see [`Page::with_diffs`].
    pub fn product_bundle_page(base: &GradedRing, fiber: &GradedRing) -> Result<Page, SsqError> {
        base.check()?;
        fiber.check()?;
        let b = base.top();
        let f = fiber.top();
        let dims: Vec<Vec<usize>> =
            (0..=b).map(|i| (0..=f).map(|j| base.dim(i) * fiber.dim(j)).collect()).collect();
        let mut mult = BTreeMap::new();
        for i in 0..=b {
            for j in 0..=f {
                for i2 in 0..=(b - i) {
                    for j2 in 0..=(f - j) {
                        let rows = dims[i + i2][j + j2];
                        let cols = dims[i][j] * dims[i2][j2];
                        if rows == 0 || cols == 0 {
                            continue;
                        }
                        // (x (x) y)(x' (x) y') = (-1)^{j i2} xx' (x) yy',
                        // with pair index (u, v) -> u * fdim + v in each slot.
                        let mb = base.mult_matrix(i, i2);
                        let mf = fiber.mult_matrix(j, j2);
                        let mut m = kron(&mb, &mf);
                        // kron gives row (ku, kv) and col ((u,u'),(v,v')) in the
                        // order u-major over u', v-major over v'; we need cols
                        // indexed by ((u,v),(u',v')). Permute columns.
                        let (bu, bv) = (base.dim(i), fiber.dim(j));
                        let (bu2, bv2) = (base.dim(i2), fiber.dim(j2));
                        let mut perm = Mat::zeros(bu * bu2 * bv * bv2, cols);
                        for u in 0..bu {
                            for v in 0..bv {
                                for u2 in 0..bu2 {
                                    for v2 in 0..bv2 {
                                        let from = (u * bv + v) * (bu2 * bv2) + (u2 * bv2 + v2);
                                        let to = (u * bu2 + u2) * (bv * bv2) + (v * bv2 + v2);
                                        perm.set(to, from, crate::exactlin::rat(1));
                                    }
                                }
                            }
                        }
                        m = m.mul(&perm);
                        if (j * i2) % 2 == 1 {
                            m = m.neg();
                        }
                        mult.insert(((i, j), (i2, j2)), m);
                    }
                }
            }
        }
        let volume = Mat::from_i64(&[&[1]]);
        let page = Page { r: 2, b, f, dims, diffs: BTreeMap::new(), mult, volume };
        page.validate()?;
        Ok(page)
    }

    /// Builds a page from raw parts (user input). Runs full validation.
    pub fn from_raw(
        r: usize,
        b: usize,
        f: usize,
        dims: Vec<Vec<usize>>,
        mult: BTreeMap<(Slot, Slot), Mat>,
        volume: Mat,
        diffs: BTreeMap<Slot, Mat>,
    ) -> Result<Page, SsqError> {
        if b > 64 || f > 64 {
            return Err(SsqError::Ring("total degrees are capped at 64".into()));
        }
        if dims.len() != b + 1 || dims.iter().any(|col| col.len() != f + 1) {
            return Err(SsqError::Ring(format!("dims grid must be {}x{}", b + 1, f + 1)));
        }
        let page = Page { r, b, f, dims, diffs, mult, volume };
        page.validate()?;
        Ok(page)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn base_degree(&self) -> usize {
        self.b
    }

    pub fn fiber_degree(&self) -> usize {
        self.f
    }

    /// Slot dimension; zero outside the rectangle.
    pub fn dim(&self, i: i64, j: i64) -> usize {
        if i < 0 || j < 0 || i > self.b as i64 || j > self.f as i64 {
            0
        } else {
            self.dims[i as usize][j as usize]
        }
    }

    pub fn dims_grid(&self) -> &Vec<Vec<usize>> {
        &self.dims
    }

    /// Total dimension in total degree `k`.
    pub fn total_dim(&self, k: usize) -> usize {
        (0..=k.min(self.b)).map(|i| self.dim(i as i64, k as i64 - i as i64)).sum()
    }

    /// Target slot of this page's differential from `(i, j)`, if inside the
    /// rectangle.
    pub fn diff_target(&self, i: usize, j: usize) -> Option<Slot> {
        let ti = i as i64 + self.r as i64;
        let tj = j as i64 - self.r as i64 + 1;
        if ti >= 0 && tj >= 0 && ti <= self.b as i64 && tj <= self.f as i64 {
            Some((ti as usize, tj as usize))
        } else {
            None
        }
    }

    /// The differential out of `(i, j)` in page coordinates, materialized
    /// (rows = target dimension, zero rows if the target is outside).
    pub fn diff(&self, i: usize, j: usize) -> Mat {
        let rows = self
            .diff_target(i, j)
            .map(|(ti, tj)| self.dim(ti as i64, tj as i64))
            .unwrap_or(0);
        match self.diffs.get(&(i, j)) {
            Some(m) => m.clone(),
            None => Mat::zeros(rows, self.dim(i as i64, j as i64)),
        }
    }

    /// Structure constants for slot `p` times slot `q`, materialized.
    pub fn mult_matrix(&self, p: Slot, q: Slot) -> Mat {
        let rows = self.dim((p.0 + q.0) as i64, (p.1 + q.1) as i64);
        let cols = self.dim(p.0 as i64, p.1 as i64) * self.dim(q.0 as i64, q.1 as i64);
        match self.mult.get(&(p, q)) {
            Some(m) => m.clone(),
            None => Mat::zeros(rows, cols),
        }
    }

    /// Product of two coordinate vectors, landing at `p + q` (zero-length
    /// vector when the target leaves the rectangle).
    pub fn product_vec(&self, p: Slot, x: &Mat, q: Slot, y: &Mat) -> Mat {
        let m = self.mult_matrix(p, q);
        let pair = kron(x, y);
        m.mul(&pair)
    }

    pub fn volume(&self) -> &Mat {
        &self.volume
    }

    /// Coefficient of a corner-slot vector on the volume class.
    pub fn volume_coeff(&self, v: &Mat) -> Rat {
        assert_eq!(v.rows(), 1, "corner slot is 1-dimensional");
        v.at(0, 0) / self.volume.at(0, 0)
    }

    /// Attaches differentials (given in this page's coordinates) and
    /// revalidates.
    pub fn with_diffs(mut self, diffs: BTreeMap<Slot, Mat>) -> Result<Page, SsqError> {
        self.diffs = diffs;
        self.validate()?;
        Ok(self)
    }

    /// Checks every axiom a page of an oriented fibration satisfies:
    /// differential shapes, `d o d = 0`, the graded derivation rule, graded
    /// commutativity, the unit, a 1-dimensional corner slot with nonzero
    /// volume, and nondegeneracy of the pairing between complementary slots.
    pub fn validate(&self) -> Result<(), SsqError> {
        let (b, f, r) = (self.b, self.f, self.r);
        if self.dim(0, 0) != 1 {
            return Err(SsqError::Unit(0, 0));
        }
        if self.dim(b as i64, f as i64) != 1 || self.volume.rows() != 1 || self.volume.cols() != 1
            || self.volume.at(0, 0).is_zero()
        {
            return Err(SsqError::Volume);
        }
        // Stored structure constants must sit inside the rectangle and have
        // the materialized shape; everything after this indexes them freely.
        for (&(p, q), m) in &self.mult {
            if p.0 > b || p.1 > f || q.0 > b || q.1 > f {
                return Err(SsqError::Ring(format!(
                    "product entry ({},{}) * ({},{}) outside the {}x{} grid",
                    p.0, p.1, q.0, q.1, b + 1, f + 1
                )));
            }
            let rows = self.dim((p.0 + q.0) as i64, (p.1 + q.1) as i64);
            let cols = self.dim(p.0 as i64, p.1 as i64) * self.dim(q.0 as i64, q.1 as i64);
            if m.rows() != rows || m.cols() != cols {
                return Err(SsqError::Ring(format!(
                    "product entry ({},{}) * ({},{}) has shape {}x{}, expected {}x{}",
                    p.0, p.1, q.0, q.1, m.rows(), m.cols(), rows, cols
                )));
            }
        }
        // Differential shapes, including "must be zero when the target is
        // outside the rectangle".
        for (&(i, j), m) in &self.diffs {
            if i > b || j > f {
                return Err(SsqError::Diff(i, j, r, "source outside rectangle".into()));
            }
            match self.diff_target(i, j) {
                Some((ti, tj)) => {
                    if m.rows() != self.dim(ti as i64, tj as i64) || m.cols() != self.dims[i][j] {
                        return Err(SsqError::Diff(i, j, r, "shape mismatch".into()));
                    }
                }
                None => {
                    if !m.is_zero() {
                        return Err(SsqError::Diff(i, j, r, "target outside rectangle".into()));
                    }
                }
            }
        }
        // d o d = 0.
        for i in 0..=b {
            for j in 0..=f {
                if let Some((ti, tj)) = self.diff_target(i, j) {
                    if self.diff_target(ti, tj).is_some() {
                        if !self.diff(ti, tj).mul(&self.diff(i, j)).is_zero() {
                            return Err(SsqError::NotComplex(i, j, r));
                        }
                    }
                }
            }
        }
        // Unit.
        for i in 0..=b {
            for j in 0..=f {
                let n = self.dims[i][j];
                if n == 0 {
                    continue;
                }
                if self.mult_matrix((0, 0), (i, j)) != Mat::identity(n)
                    || self.mult_matrix((i, j), (0, 0)) != Mat::identity(n)
                {
                    return Err(SsqError::Unit(i, j));
                }
            }
        }
        // Graded commutativity in total degree.
        for (&(p, q), m_pq) in &self.mult {
            let (np, nq) = (self.dim(p.0 as i64, p.1 as i64), self.dim(q.0 as i64, q.1 as i64));
            if np == 0 || nq == 0 {
                continue;
            }
            let m_qp = self.mult_matrix(q, p);
            let sign_neg = ((p.0 + p.1) * (q.0 + q.1)) % 2 == 1;
            for u in 0..np {
                for v in 0..nq {
                    for w in 0..m_pq.rows() {
                        let lhs = m_pq.at(w, u * nq + v).clone();
                        let mut rhs = m_qp.at(w, v * np + u).clone();
                        if sign_neg {
                            rhs = -rhs;
                        }
                        if lhs != rhs {
                            return Err(SsqError::Commutativity { pi: p.0, pj: p.1, qi: q.0, qj: q.1 });
                        }
                    }
                }
            }
        }
        // Derivation rule: d(xy) = dx * y + (-1)^{|x|} x * dy.
        for i in 0..=b {
            for j in 0..=f {
                let p = (i, j);
                let np = self.dims[i][j];
                if np == 0 {
                    continue;
                }
                for i2 in 0..=b {
                    for j2 in 0..=f {
                        let q = (i2, j2);
                        let nq = self.dims[i2][j2];
                        if nq == 0 {
                            continue;
                        }
                        let t = (i + i2, j + j2);
                        // Everything lands at t + (r, 1-r); if that is out of
                        // the rectangle all three terms are zero-row matrices.
                        let lhs = if t.0 <= b && t.1 <= f {
                            self.diff(t.0, t.1).mul(&self.mult_matrix(p, q))
                        } else {
                            Mat::zeros(0, np * nq)
                        };
                        let dp_target = self.diff_target(i, j);
                        let term1 = match dp_target {
                            Some(pt) => self.mult_matrix(pt, q).mul(&kron(&self.diff(i, j), &Mat::identity(nq))),
                            None => Mat::zeros(lhs.rows(), np * nq),
                        };
                        let dq_target = self.diff_target(i2, j2);
                        let term2 = match dq_target {
                            Some(qt) => {
                                let m = self.mult_matrix(p, qt).mul(&kron(&Mat::identity(np), &self.diff(i2, j2)));
                                if (i + j) % 2 == 1 {
                                    m.neg()
                                } else {
                                    m
                                }
                            }
                            None => Mat::zeros(lhs.rows(), np * nq),
                        };
                        // Align shapes: all three are maps into the slot
                        // t + (r, 1-r); materialized row counts agree unless
                        // that slot is outside, in which case all are empty.
                        let rows = lhs.rows().max(term1.rows()).max(term2.rows());
                        let fix = |m: Mat| -> Mat {
                            if m.rows() == rows {
                                m
                            } else {
                                Mat::zeros(rows, np * nq)
                            }
                        };
                        let (lhs, term1, term2) = (fix(lhs), fix(term1), fix(term2));
                        if !lhs.sub(&term1.add(&term2)).is_zero() {
                            return Err(SsqError::Derivation { r, pi: i, pj: j, qi: i2, qj: j2 });
                        }
                    }
                }
            }
        }
        // Nondegenerate pairing between complementary slots.
        for i in 0..=b {
            for j in 0..=f {
                let (ci, cj) = (b - i, f - j);
                let (n, m) = (self.dims[i][j], self.dims[ci][cj]);
                if n != m {
                    return Err(SsqError::Degenerate(i, j, ci, cj, r));
                }
                if n == 0 {
                    continue;
                }
                let mm = self.mult_matrix((i, j), (ci, cj));
                let pairing = Mat::from_fn(m, n, |v, u| mm.at(0, u * m + v) / self.volume.at(0, 0));
                if pairing.rank() != n {
                    return Err(SsqError::Degenerate(i, j, ci, cj, r));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Page turning and anchored runs
// ---------------------------------------------------------------------------

/// A differential schedule: for each page `r >= 2`, the nonzero
/// differentials in page-`r` coordinates. Page coordinates are reproducible:
/// they are the deterministic first-pivot quotient bases produced by the
/// engine itself, so a schedule produced against this crate's page bases
/// always lines up.
pub type Schedule = BTreeMap<usize, BTreeMap<Slot, Mat>>;

/// Basis data recorded for one differential `d_s` out of one slot.
#[derive(Debug, Clone)]
pub struct ImagePair {
    /// Page-`s` coordinates (at the source slot) of vectors spanning a
    /// complement of `ker d_s`; column `c` maps onto column `c` of `image_*`.
    pub source_page: Mat,
    /// The same vectors in starting-page coordinates.
    pub source_start: Mat,
    /// Page-`s` coordinates (at the target slot) of the image basis.
    pub image_page: Mat,
    /// The image basis in starting-page coordinates.
    pub image_start: Mat,
}

/// Snapshot of one page during an anchored run.
#[derive(Debug, Clone)]
pub struct PageState {
    pub r: usize,
    /// Slot dimensions on this page.
    pub dims: Vec<Vec<usize>>,
    /// Per slot: columns are starting-page coordinates of this page's basis.
    pub reps: Vec<Vec<Mat>>,
    /// Per slot: accumulated boundary space inside the starting page.
    pub boundaries: Vec<Vec<Mat>>,
    /// The differentials used on this page (page coordinates).
    pub diffs: BTreeMap<Slot, Mat>,
}

/// Everything a full run produces: every page with anchored representatives,
/// every differential's image data, and the limit page.
#[derive(Debug, Clone)]
pub struct LimitRecord {
    pub b: usize,
    pub f: usize,
    /// The starting page (with products and volume); all `*_start`
    /// coordinates refer to its bases.
    pub start: Page,
    /// Page snapshots for `r = 2, 3, ...` up to the structural stop.
    pub pages: Vec<PageState>,
    /// Image data for `d_s` out of slot `(i, j)`, keyed by `(s, i, j)`.
    /// Slots with zero differential are simply absent.
    pub images: BTreeMap<(usize, usize, usize), ImagePair>,
    /// Limit dimensions per slot.
    pub einf_dims: Vec<Vec<usize>>,
    /// Limit representatives per slot, in starting-page coordinates.
    pub einf_reps: Vec<Vec<Mat>>,
}

impl LimitRecord {
    pub fn einf_dim(&self, i: i64, j: i64) -> usize {
        if i < 0 || j < 0 || i > self.b as i64 || j > self.f as i64 {
            0
        } else {
            self.einf_dims[i as usize][j as usize]
        }
    }

    /// Total limit dimension in total degree `k` (the boundary manifold's
    /// betti number when the data converges to it).
    pub fn einf_total(&self, k: usize) -> usize {
        (0..=k.min(self.b)).map(|i| self.einf_dim(i as i64, k as i64 - i as i64)).sum()
    }

    /// The page snapshot for page `r` (first page is `r = 2`).
    pub fn page(&self, r: usize) -> Option<&PageState> {
        self.pages.iter().find(|p| p.r == r)
    }

    /// Image data for `d_s` out of `(i, j)`; empty matrices when the
    /// differential is absent or zero.
    pub fn image_pair(&self, s: usize, i: usize, j: usize) -> ImagePair {
        if let Some(p) = self.images.get(&(s, i, j)) {
            return p.clone();
        }
        let n_start = self.start.dim(i as i64, j as i64);
        let src_dim = self.page(s).map(|p| p.dims[i][j]).unwrap_or(0);
        let ti = i as i64 + s as i64;
        let tj = j as i64 - s as i64 + 1;
        let tgt_dim = if ti > self.b as i64 || tj < 0 { 0 } else { self.page(s).map(|p| p.dims[ti as usize][tj as usize]).unwrap_or(0) };
        let tgt_start = self.start.dim(ti, tj);
        ImagePair {
            source_page: Mat::zeros(src_dim, 0),
            source_start: Mat::zeros(n_start, 0),
            image_page: Mat::zeros(tgt_dim, 0),
            image_start: Mat::zeros(tgt_start, 0),
        }
    }

    /// Rank of `d_s` out of `(i, j)`.
    pub fn diff_rank(&self, s: usize, i: usize, j: usize) -> usize {
        self.images.get(&(s, i, j)).map(|p| p.image_page.cols()).unwrap_or(0)
    }

    /// Product of two starting-page vectors, via the starting page's
    /// structure constants.
    pub fn start_product(&self, p: Slot, x: &Mat, q: Slot, y: &Mat) -> Mat {
        self.start.product_vec(p, x, q, y)
    }

    /// Coefficient of a corner-slot vector on the volume class.
    pub fn volume_coeff(&self, v: &Mat) -> Rat {
        self.start.volume_coeff(v)
    }

    /// Largest page that can carry a nonzero differential for this shape.
    pub fn structural_stop(&self) -> usize {
        structural_stop(self.b, self.f)
    }
}

/// Largest `r` with a potentially nonzero `d_r` in the rectangle
/// `(b+1) x (f+1)`: the differential moves `r` right and `r - 1` down.
pub fn structural_stop(b: usize, f: usize) -> usize {
    b.min(f + 1)
}

/// Runs the spectral data from the starting page to its limit.
///
/// `start` supplies dimensions, products, and the volume; `schedule`
/// supplies the differentials page by page (page coordinates, produced
/// against this engine's deterministic bases). Every page is fully
/// validated before it is turned; any axiom failure aborts with the
/// offending page and slots.
pub fn run_to_limit(start: &Page, schedule: &Schedule) -> Result<LimitRecord, SsqError> {
    let (b, f) = (start.b, start.f);
    let stop = structural_stop(b, f);
    for (&r, diffs) in schedule {
        if r < 2 || (r > stop && diffs.values().any(|m| !m.is_zero())) {
            return Err(SsqError::SchedulePage(r, stop));
        }
    }

    let zero_grid = |dims: &Vec<Vec<usize>>| -> Vec<Vec<Mat>> {
        dims.iter()
            .map(|col| col.iter().map(|&n| Mat::zeros(n, 0)).collect())
            .collect()
    };

    let mut cur = start.clone();
    cur.diffs = BTreeMap::new();
    // reps anchored in starting-page coordinates; page 2 is the identity.
    let mut reps: Vec<Vec<Mat>> = start
        .dims
        .iter()
        .map(|col| col.iter().map(|&n| Mat::identity(n)).collect())
        .collect();
    let mut boundaries = zero_grid(&start.dims);

    let mut pages: Vec<PageState> = Vec::new();
    let mut images: BTreeMap<(usize, usize, usize), ImagePair> = BTreeMap::new();

    let empty = BTreeMap::new();
    for r in 2..=stop.max(1) {
        let diffs = schedule.get(&r).unwrap_or(&empty).clone();
        cur = cur.with_diffs(diffs)?;
        pages.push(PageState {
            r,
            dims: cur.dims.clone(),
            reps: reps.clone(),
            boundaries: boundaries.clone(),
            diffs: cur.diffs.clone(),
        });

        // Record image data for this page's differentials.
        for i in 0..=b {
            for j in 0..=f {
                let d = cur.diff(i, j);
                if d.rows() == 0 || d.cols() == 0 || d.is_zero() {
                    continue;
                }
                let k = d.kernel();
                let (src_page, _) = quotient_basis(&Mat::identity(d.cols()), &k)
                    .expect("kernel lies in the full space");
                if src_page.cols() == 0 {
                    continue;
                }
                let img_page = d.mul(&src_page);
                let (ti, tj) = cur.diff_target(i, j).expect("nonzero differential has a target");
                let pair = ImagePair {
                    source_start: reps[i][j].mul(&src_page),
                    image_start: reps[ti][tj].mul(&img_page),
                    source_page: src_page,
                    image_page: img_page,
                };
                images.insert((r, i, j), pair);
            }
        }

        // Turn the page.
        let (next, next_reps, next_bnd) = turn_anchored(&cur, &reps, &boundaries, start)?;
        cur = next;
        reps = next_reps;
        boundaries = next_bnd;
    }

    // No differentials possible at all (b < 2): snapshot the start so the
    // record still carries page data.
    if pages.is_empty() {
        pages.push(PageState {
            r: 2,
            dims: cur.dims.clone(),
            reps: reps.clone(),
            boundaries: boundaries.clone(),
            diffs: BTreeMap::new(),
        });
    }

    Ok(LimitRecord {
        b,
        f,
        start: start.clone(),
        pages,
        images,
        einf_dims: cur.dims.clone(),
        einf_reps: reps,
    })
}

/// One page turn: quotient kernels by images, carry products and volume,
/// and keep the anchored representative towers in sync.
fn turn_anchored(
    cur: &Page,
    reps: &[Vec<Mat>],
    boundaries: &[Vec<Mat>],
    start: &Page,
) -> Result<(Page, Vec<Vec<Mat>>, Vec<Vec<Mat>>), SsqError> {
    let (b, f, r) = (cur.b, cur.f, cur.r);
    let mut new_dims = vec![vec![0usize; f + 1]; b + 1];
    let mut new_reps: Vec<Vec<Mat>> = vec![vec![Mat::zeros(0, 0); f + 1]; b + 1];
    let mut new_bnd: Vec<Vec<Mat>> = vec![vec![Mat::zeros(0, 0); f + 1]; b + 1];
    // Per slot: new basis in current-page coordinates (for products), and
    // the incoming image in current-page coordinates.
    let mut new_basis_cur: Vec<Vec<Mat>> = vec![vec![Mat::zeros(0, 0); f + 1]; b + 1];
    let mut incoming_cur: Vec<Vec<Mat>> = vec![vec![Mat::zeros(0, 0); f + 1]; b + 1];

    for i in 0..=b {
        for j in 0..=f {
            let n = cur.dims[i][j];
            let d_out = cur.diff(i, j);
            let k = if d_out.rows() == 0 { Mat::identity(n) } else { d_out.kernel() };
            // Incoming differential from (i - r, j + r - 1).
            let (si, sj) = (i as i64 - r as i64, j as i64 + r as i64 - 1);
            let img_in = if si >= 0 && sj <= f as i64 && cur.dim(si, sj) > 0 {
                cur.diff(si as usize, sj as usize).image()
            } else {
                Mat::zeros(n, 0)
            };
            let (q, _) = quotient_basis(&k, &img_in)
                .map_err(|_| SsqError::NotComplex(i, j, r))?;
            new_dims[i][j] = q.cols();
            new_basis_cur[i][j] = q.clone();
            incoming_cur[i][j] = img_in.clone();
            new_reps[i][j] = reps[i][j].mul(&q);
            let bnd_add = reps[i][j].mul(&img_in);
            new_bnd[i][j] = if boundaries[i][j].cols() == 0 {
                bnd_add
            } else if bnd_add.cols() == 0 {
                boundaries[i][j].clone()
            } else {
                boundaries[i][j].hstack(&bnd_add)
            };
        }
    }

    // Induced products: multiply anchored representatives in the starting
    // page and express the result in the new basis (modulo everything that
    // has died, i.e. the accumulated boundaries).
    let mut new_mult: BTreeMap<(Slot, Slot), Mat> = BTreeMap::new();
    for i in 0..=b {
        for j in 0..=f {
            let np = new_dims[i][j];
            if np == 0 {
                continue;
            }
            for i2 in 0..=(b - i) {
                for j2 in 0..=(f - j) {
                    let nq = new_dims[i2][j2];
                    if nq == 0 {
                        continue;
                    }
                    let (ti, tj) = (i + i2, j + j2);
                    let nt = new_dims[ti][tj];
                    let mut m = Mat::zeros(nt, np * nq);
                    for u in 0..np {
                        for v in 0..nq {
                            let xu = new_reps[i][j].col(u);
                            let yv = new_reps[i2][j2].col(v);
                            let prod = start.product_vec((i, j), &xu, (i2, j2), &yv);
                            // The product must lie in span(new reps) +
                            // boundaries; solving also certifies that, and an
                            // inconsistency in the input data surfaces here.
                            let basis = new_reps[ti][tj].hstack(&new_bnd[ti][tj]);
                            let sol = basis
                                .solve(&prod)
                                .ok_or(SsqError::ProductDescent(r + 1, ti, tj))?;
                            for w in 0..nt {
                                m.set(w, u * nq + v, sol.at(w, 0).clone());
                            }
                        }
                    }
                    if nt > 0 {
                        new_mult.insert(((i, j), (i2, j2)), m);
                    }
                }
            }
        }
    }

    let next = Page {
        r: r + 1,
        b,
        f,
        dims: new_dims,
        diffs: BTreeMap::new(),
        mult: new_mult,
        volume: cur.volume.clone(),
    };
    Ok((next, new_reps, new_bnd))
}

/// One public page turn: validates the page (with its differentials), then
/// computes the next page with induced products. The next page carries no
/// differentials yet.
pub fn turn_page(page: &Page) -> Result<Page, SsqError> {
    page.validate()?;
    let reps: Vec<Vec<Mat>> = page
        .dims
        .iter()
        .map(|col| col.iter().map(|&n| Mat::identity(n)).collect())
        .collect();
    let bnd: Vec<Vec<Mat>> = page
        .dims
        .iter()
        .map(|col| col.iter().map(|&n| Mat::zeros(n, 0)).collect())
        .collect();
    let (next, _, _) = turn_anchored(page, &reps, &bnd, page)?;
    Ok(next)
}

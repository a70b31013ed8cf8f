//! Finite cochain complexes of rational vector spaces.
//!
//! A complex is a list of dimensions `dims[0..=top]` and coboundary maps
//! `d[k] : C^k -> C^{k+1}`. Construction checks shapes and `d o d = 0`, so a
//! value of [`Complex`] is always an actual complex. Cohomology comes with
//! chosen cocycle representatives (deterministic first-pivot choice), which
//! downstream product computations rely on.

use crate::exactlin::{quotient_basis, Mat};
use num::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("coboundary {k} has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    BadShape { k: usize, got_rows: usize, got_cols: usize, want_rows: usize, want_cols: usize },
    #[error("d o d != 0 between degrees {0} and {1}")]
    NotComplex(usize, usize),
    #[error("chain map fails to commute with d at degree {0}")]
    NotChainMap(usize),
    #[error("expected {1} maps, got {0}")]
    MapCount(usize, usize),
}

/// A finite cochain complex over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    dims: Vec<usize>,
    d: Vec<Mat>,
}

/// One cohomology group with chosen representatives.
#[derive(Debug, Clone)]
pub struct Cohomology {
    /// Rank of H^k.
    pub dim: usize,
    /// Columns are cocycles in C^k whose classes form a basis of H^k.
    pub reps: Mat,
}

impl Complex {
    /// Builds a complex from dimensions and coboundaries, checking shapes and
    /// `d o d = 0`. `d` must have one entry fewer than `dims` (the top
    /// coboundary is implicitly zero); a complex concentrated in a single
    /// degree has an empty `d`.
    pub fn new(dims: Vec<usize>, d: Vec<Mat>) -> Result<Complex, ComplexError> {
        let want = dims.len().saturating_sub(1);
        if d.len() != want {
            return Err(ComplexError::MapCount(d.len(), want));
        }
        for (k, dk) in d.iter().enumerate() {
            if dk.rows() != dims[k + 1] || dk.cols() != dims[k] {
                return Err(ComplexError::BadShape {
                    k,
                    got_rows: dk.rows(),
                    got_cols: dk.cols(),
                    want_rows: dims[k + 1],
                    want_cols: dims[k],
                });
            }
        }
        for k in 0..d.len().saturating_sub(1) {
            if !d[k + 1].mul(&d[k]).is_zero() {
                return Err(ComplexError::NotComplex(k, k + 2));
            }
        }
        Ok(Complex { dims, d })
    }

    /// Complex with a single space in degree 0.
    pub fn point() -> Complex {
        Complex::new(vec![1], vec![]).unwrap()
    }

    /// Highest degree carrying a space (None for the empty complex).
    pub fn top(&self) -> Option<usize> {
        self.dims.len().checked_sub(1)
    }

    /// Dimension of C^k (zero outside the stored range).
    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The coboundary C^k -> C^{k+1}, materialized as a zero matrix outside
    /// the stored range.
    pub fn d(&self, k: usize) -> Mat {
        match self.d.get(k) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.dim(k + 1), self.dim(k)),
        }
    }

    /// Cohomology in every degree, with deterministic representatives.
    pub fn cohomology(&self) -> Vec<Cohomology> {
        (0..self.dims.len())
            .map(|k| {
                let cocycles = self.d(k).kernel();
                let coboundaries = if k == 0 {
                    Mat::zeros(self.dim(0), 0)
                } else {
                    self.d(k - 1).image()
                };
                let (reps, _) = quotient_basis(&cocycles, &coboundaries)
                    .expect("coboundaries are cocycles in a valid complex");
                Cohomology { dim: reps.cols(), reps }
            })
            .collect()
    }

    /// Betti numbers (dims of cohomology).
    pub fn betti(&self) -> Vec<usize> {
        self.cohomology().into_iter().map(|h| h.dim).collect()
    }

    /// Index of the basis vector `u (x) v` in degree `p + q` of a tensor
    /// product, where `u` is basis vector `iu` of `A^p` and `v` is basis
    /// vector `iv` of `B^q`. Mirrors the ordering used by [`Complex::tensor`]:
    /// blocks by ascending `p`, within a block `u`-major.
    pub fn tensor_index(a: &Complex, b: &Complex, p: usize, iu: usize, q: usize, iv: usize) -> usize {
        let k = p + q;
        let mut off = 0;
        for pp in 0..p {
            off += a.dim(pp) * b.dim(k - pp);
        }
        off + iu * b.dim(q) + iv
    }

    /// Tensor product complex with the Koszul sign:
    /// `d(u (x) v) = du (x) v + (-1)^p u (x) dv` for `u` of degree `p`.
    pub fn tensor(a: &Complex, b: &Complex) -> Complex {
        if a.dims.is_empty() || b.dims.is_empty() {
            return Complex { dims: vec![], d: vec![] };
        }
        let top = a.top().unwrap() + b.top().unwrap();
        let dim_k = |k: usize| -> usize {
            (0..=k.min(a.top().unwrap())).map(|p| a.dim(p) * b.dim(k - p)).sum()
        };
        let dims: Vec<usize> = (0..=top).map(dim_k).collect();
        let mut d = Vec::new();
        for k in 0..top {
            let mut m = Mat::zeros(dims[k + 1], dims[k]);
            for p in 0..=k.min(a.top().unwrap()) {
                let q = k - p;
                let da = a.d(p);
                let db = b.d(q);
                for iu in 0..a.dim(p) {
                    for iv in 0..b.dim(q) {
                        let src = Complex::tensor_index(a, b, p, iu, q, iv);
                        // du (x) v lands in degree (p+1, q).
                        for ju in 0..a.dim(p + 1) {
                            let c = da.at(ju, iu);
                            if !c.is_zero() {
                                let dst = Complex::tensor_index(a, b, p + 1, ju, q, iv);
                                let v = m.at(dst, src) + c;
                                m.set(dst, src, v);
                            }
                        }
                        // (-1)^p u (x) dv lands in (p, q+1).
                        for jv in 0..b.dim(q + 1) {
                            let c = db.at(jv, iv);
                            if !c.is_zero() {
                                let dst = Complex::tensor_index(a, b, p, iu, q + 1, jv);
                                let signed = if p % 2 == 0 { c.clone() } else { -c.clone() };
                                let v = m.at(dst, src) + &signed;
                                m.set(dst, src, v);
                            }
                        }
                    }
                }
            }
            d.push(m);
        }
        Complex::new(dims, d).expect("tensor of complexes is a complex")
    }
}

/// Mapping cone of a degreewise map `f : C -> B` of complexes
/// (`f[k] : C^k -> B^k`).
///
/// `cone^k = B^{k-1} (+) C^k` with `d(theta, alpha) = (f(alpha) - d_B theta,
/// d_C alpha)`. For a surjective restriction map `C^*(X) -> C^*(boundary)`
/// this computes the relative cohomology `H^*(X, boundary)` on the nose.
/// Errors if `f` is not a chain map.
pub fn mapping_cone(f: &[Mat], c: &Complex, b: &Complex) -> Result<Complex, ComplexError> {
    let deg_count = c.dims.len().max(b.dims.len());
    if f.len() < c.dims.len() {
        return Err(ComplexError::MapCount(f.len(), c.dims.len()));
    }
    let fk = |k: usize| -> Mat {
        match f.get(k) {
            Some(m) => m.clone(),
            None => Mat::zeros(b.dim(k), c.dim(k)),
        }
    };
    for k in 0..deg_count {
        let m = fk(k);
        if m.rows() != b.dim(k) || m.cols() != c.dim(k) {
            return Err(ComplexError::BadShape {
                k,
                got_rows: m.rows(),
                got_cols: m.cols(),
                want_rows: b.dim(k),
                want_cols: c.dim(k),
            });
        }
        // d_B o f = f o d_C
        if !b.d(k).mul(&fk(k)).sub(&fk(k + 1).mul(&c.d(k))).is_zero() {
            return Err(ComplexError::NotChainMap(k));
        }
    }

    let top = (b.top().map(|t| t + 1).unwrap_or(0)).max(c.top().unwrap_or(0));
    let bdim = |k: usize| if k == 0 { 0 } else { b.dim(k - 1) };
    let dims: Vec<usize> = (0..=top).map(|k| bdim(k) + c.dim(k)).collect();
    let mut d = Vec::new();
    for k in 0..top {
        let mut m = Mat::zeros(dims[k + 1], dims[k]);
        // theta-part: B^{k-1} -> B^k via -d_B.
        if k >= 1 {
            let db = b.d(k - 1);
            for i in 0..b.dim(k) {
                for j in 0..b.dim(k - 1) {
                    m.set(i, j, -db.at(i, j).clone());
                }
            }
        }
        // alpha-part: C^k -> B^k via f and C^k -> C^{k+1} via d_C.
        let fm = fk(k);
        for i in 0..b.dim(k) {
            for j in 0..c.dim(k) {
                m.set(i, bdim(k) + j, fm.at(i, j).clone());
            }
        }
        let dc = c.d(k);
        for i in 0..c.dim(k + 1) {
            for j in 0..c.dim(k) {
                m.set(bdim(k + 1) + i, bdim(k) + j, dc.at(i, j).clone());
            }
        }
        d.push(m);
    }
    Complex::new(dims, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    /// Circle as a cell complex: two vertices, two parallel edges.
    fn circle() -> Complex {
        let d0 = Mat::from_i64(&[&[-1, 1], &[-1, 1]]);
        Complex::new(vec![2, 2], vec![d0]).unwrap()
    }

    /// Interval: two vertices, one edge.
    fn interval() -> Complex {
        let d0 = Mat::from_i64(&[&[-1, 1]]);
        Complex::new(vec![2, 1], vec![d0]).unwrap()
    }

    #[test]
    fn rejects_non_complexes() {
        let d0 = Mat::from_i64(&[&[1]]);
        let d1 = Mat::from_i64(&[&[1]]);
        let e = Complex::new(vec![1, 1, 1], vec![d0, d1]);
        assert!(matches!(e, Err(ComplexError::NotComplex(0, 2))));
        let bad_shape = Complex::new(vec![2, 1], vec![Mat::zeros(2, 2)]);
        assert!(matches!(bad_shape, Err(ComplexError::BadShape { .. })));
    }

    #[test]
    fn circle_cohomology() {
        assert_eq!(circle().betti(), vec![1, 1]);
        let h = circle().cohomology();
        // H^0 representative is a constant function.
        assert_eq!(h[0].reps.at(0, 0), h[0].reps.at(1, 0));
        assert!(!h[0].reps.at(0, 0).is_zero());
    }

    #[test]
    fn torus_via_tensor() {
        let t = Complex::tensor(&circle(), &circle());
        assert_eq!(t.betti(), vec![1, 2, 1]);
        // Interval x interval is a square, contractible.
        let sq = Complex::tensor(&interval(), &interval());
        assert_eq!(sq.betti(), vec![1, 0, 0]);
        // Three-torus for the Koszul sign across two tensor layers.
        let t3 = Complex::tensor(&t, &circle());
        assert_eq!(t3.betti(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn tensor_index_consistent() {
        let a = circle();
        let b = interval();
        let t = Complex::tensor(&a, &b);
        // Degree 1 basis: (p=0) 2*1 block then (p=1) 2*2 block.
        assert_eq!(t.dim(1), a.dim(0) * b.dim(1) + a.dim(1) * b.dim(0));
        assert_eq!(Complex::tensor_index(&a, &b, 0, 1, 1, 0), 1);
        assert_eq!(Complex::tensor_index(&a, &b, 1, 0, 0, 1), 3);
    }

    #[test]
    fn cone_computes_relative_cohomology_of_disk() {
        // Disk modeled by a point complex, boundary by the circle; the cone
        // of the restriction gives H^*(D^2, S^1) = (0, 0, Q).
        let disk = Complex::point();
        let boundary = circle();
        // f : C^0(disk) -> C^0(circle), the constant-function inclusion.
        let f0 = Mat::from_rows(vec![vec![rat(1)], vec![rat(1)]]).unwrap();
        let cone = mapping_cone(&[f0], &disk, &boundary).unwrap();
        assert_eq!(cone.betti(), vec![0, 0, 1]);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = circle();
        let f = vec![Mat::identity(2), Mat::identity(2)];
        let cone = mapping_cone(&f, &c, &c).unwrap();
        assert_eq!(cone.betti(), vec![0, 0, 0]);
    }

    #[test]
    fn cone_rejects_non_chain_maps() {
        let c = circle();
        let f = vec![Mat::from_i64(&[&[1, 0], &[0, 0]]), Mat::identity(2)];
        assert!(matches!(mapping_cone(&f, &c, &c), Err(ComplexError::NotChainMap(0))));
    }

    #[test]
    fn cone_long_exact_sequence_ranks() {
        // For any chain map f: C -> B, the cone fits in a long exact sequence
        // ... -> H^{k-1}(B) -> H^k(cone) -> H^k(C) -> H^k(B) -> ...
        // Exactness forces the alternating sum of dimensions to vanish.
        let c = Complex::tensor(&circle(), &interval());
        let b = circle();
        // Project the cylinder onto one boundary circle: count only basis
        // vectors of the (p, 0)-block with the second factor at vertex 0.
        let mut f0 = Mat::zeros(2, c.dim(0));
        for iu in 0..2 {
            f0.set(iu, Complex::tensor_index(&circle(), &interval(), 0, iu, 0, 0), rat(1));
        }
        let mut f1 = Mat::zeros(2, c.dim(1));
        for iu in 0..2 {
            f1.set(iu, Complex::tensor_index(&circle(), &interval(), 1, iu, 0, 0), rat(1));
        }
        let f2 = Mat::zeros(0, c.dim(2));
        let cone = mapping_cone(&[f0, f1, f2], &c, &b).unwrap();
        // The projection is a quasi-isomorphism, so the cone is acyclic.
        assert_eq!(cone.betti(), vec![0, 0, 0]);
    }
}

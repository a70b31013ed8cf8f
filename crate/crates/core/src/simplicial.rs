//! Simplicial pseudomanifolds with boundary, their cochain algebra, and the
//! middle-degree intersection form carried by interior classes.
//!
//! A space is described by its top-dimensional simplices. Construction takes
//! the downward closure, checks the pseudomanifold condition (every face of
//! codimension one lies in at most two facets), infers compatible facet
//! orientations by propagation across shared faces, and splits off the
//! boundary subcomplex. All cohomology is rational; cup products use the
//! front face / back face rule on vertex-sorted simplices, and the
//! intersection form is evaluated with relative representatives on both
//! sides so the answer does not depend on the choice of lifts.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::complexes::{mapping_cone, Complex, ComplexError};
use crate::exactlin::{rat, sylvester_signature, LinError, Mat, Rat, Signature};

#[derive(Debug, thiserror::Error)]
pub enum SimplicialError {
    #[error("no facets given")]
    Empty,
    #[error("facet {0} has a repeated vertex")]
    RepeatedVertex(usize),
    #[error("facet {0} has {1} vertices, expected {2}")]
    FacetSize(usize, usize, usize),
    #[error("facet {0} appears more than once")]
    DuplicateFacet(usize),
    #[error("a codimension-one face lies in {0} facets; at most two are allowed")]
    Overcrowded(usize),
    #[error("no consistent facet orientations exist")]
    NonOrientable,
    #[error("supplied orientation is not a consistent choice of signs")]
    BadOrientation,
    #[error("the middle-degree form needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A pure simplicial complex together with its boundary subcomplex and a
/// fundamental orientation cycle.
#[derive(Debug, Clone)]
pub struct SimplicialPair {
    n: usize,
    /// simp[k] = lexicographically sorted k-simplices, each a sorted vertex
    /// tuple.
    simp: Vec<Vec<Vec<u32>>>,
    index: Vec<BTreeMap<Vec<u32>, usize>>,
    /// Boundary subcomplex in the same shape, degrees 0..n-1.
    bnd: Vec<Vec<Vec<u32>>>,
    bnd_index: Vec<BTreeMap<Vec<u32>, usize>>,
    /// Fundamental coefficients, one per facet, each +1 or -1.
    orientation: Vec<i64>,
    /// Induced cycle coefficients, one per top boundary simplex.
    boundary_orientation: Vec<i64>,
}

fn parity(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SimplicialPair {
    /// Builds the pair from facets, inferring an orientation. The first facet
    /// (in lexicographic order) of each strongly connected piece gets +1.
    pub fn from_facets(facets: &[Vec<u32>]) -> Result<SimplicialPair, SimplicialError> {
        SimplicialPair::build(facets, None)
    }

    /// Builds the pair with a caller-chosen orientation sign per facet.
    /// Signs are matched to facets positionally and must be consistent.
    pub fn from_oriented_facets(
        facets: &[Vec<u32>],
        orientation: &[i64],
    ) -> Result<SimplicialPair, SimplicialError> {
        SimplicialPair::build(facets, Some(orientation.to_vec()))
    }

    fn build(
        facets: &[Vec<u32>],
        forced: Option<Vec<i64>>,
    ) -> Result<SimplicialPair, SimplicialError> {
        if facets.is_empty() {
            return Err(SimplicialError::Empty);
        }
        let n = facets[0].len().checked_sub(1).ok_or(SimplicialError::FacetSize(0, 0, 1))?;
        if let Some(o) = &forced {
            if o.len() != facets.len() || o.iter().any(|s| s.abs() != 1) {
                return Err(SimplicialError::BadOrientation);
            }
        }
        let mut tagged: Vec<(Vec<u32>, i64)> = Vec::with_capacity(facets.len());
        for (idx, f) in facets.iter().enumerate() {
            if f.len() != n + 1 {
                return Err(SimplicialError::FacetSize(idx, f.len(), n + 1));
            }
            let mut v = f.clone();
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(SimplicialError::RepeatedVertex(idx));
            }
            let sign = forced.as_ref().map(|o| o[idx]).unwrap_or(0);
            tagged.push((v, sign));
        }
        tagged.sort();
        for i in 1..tagged.len() {
            if tagged[i].0 == tagged[i - 1].0 {
                return Err(SimplicialError::DuplicateFacet(i));
            }
        }

        // Downward closure.
        let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); n + 1];
        for (f, _) in &tagged {
            for mask in 1u64..(1u64 << (n + 1)) {
                let sub: Vec<u32> =
                    (0..=n).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                sets[sub.len() - 1].insert(sub);
            }
        }
        let simp: Vec<Vec<Vec<u32>>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index: Vec<BTreeMap<Vec<u32>, usize>> = simp
            .iter()
            .map(|list| list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();

        // Codimension-one incidence: ridge position -> (facet, deleted slot).
        let fcount = tagged.len();
        let mut incid: Vec<Vec<(usize, usize)>> =
            vec![Vec::new(); if n == 0 { 0 } else { simp[n - 1].len() }];
        if n >= 1 {
            for (fpos, (f, _)) in tagged.iter().enumerate() {
                for i in 0..=n {
                    let mut r = f.clone();
                    r.remove(i);
                    incid[index[n - 1][&r]].push((fpos, i));
                }
            }
            for l in &incid {
                if l.len() > 2 {
                    return Err(SimplicialError::Overcrowded(l.len()));
                }
            }
        }

        // Orientation: forced signs or propagation from +1 on the first
        // facet of each piece.
        let mut orientation: Vec<i64> = tagged.iter().map(|(_, s)| *s).collect();
        if forced.is_none() {
            let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); fcount];
            for l in &incid {
                if let [(f, i), (g, j)] = l[..] {
                    let rel = -parity(i) * parity(j);
                    adj[f].push((g, rel));
                    adj[g].push((f, rel));
                }
            }
            for start in 0..fcount {
                if orientation[start] != 0 {
                    continue;
                }
                orientation[start] = 1;
                let mut stack = vec![start];
                while let Some(f) = stack.pop() {
                    for &(g, rel) in &adj[f] {
                        let want = rel * orientation[f];
                        if orientation[g] == 0 {
                            orientation[g] = want;
                            stack.push(g);
                        } else if orientation[g] != want {
                            return Err(SimplicialError::NonOrientable);
                        }
                    }
                }
            }
        }
        // Either way, the chosen signs must cancel across every interior
        // ridge.
        for l in &incid {
            if let [(f, i), (g, j)] = l[..] {
                if orientation[f] * parity(i) + orientation[g] * parity(j) != 0 {
                    return Err(if forced.is_some() {
                        SimplicialError::BadOrientation
                    } else {
                        SimplicialError::NonOrientable
                    });
                }
            }
        }

        // Boundary subcomplex: closure of the once-covered ridges, plus the
        // cycle induced on them by the fundamental chain.
        let mut bnd_tops: Vec<(Vec<u32>, i64)> = Vec::new();
        for (rpos, l) in incid.iter().enumerate() {
            if let [(f, i)] = l[..] {
                bnd_tops.push((simp[n - 1][rpos].clone(), orientation[f] * parity(i)));
            }
        }
        let mut bsets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); n.max(1) - 1 + 1];
        if n == 0 {
            bsets.clear();
        }
        for (t, _) in &bnd_tops {
            for mask in 1u64..(1u64 << n) {
                let sub: Vec<u32> =
                    (0..n).filter(|i| mask >> i & 1 == 1).map(|i| t[i]).collect();
                bsets[sub.len() - 1].insert(sub);
            }
        }
        let bnd: Vec<Vec<Vec<u32>>> = bsets.into_iter().map(|s| s.into_iter().collect()).collect();
        let bnd_index: Vec<BTreeMap<Vec<u32>, usize>> = bnd
            .iter()
            .map(|list| list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut boundary_orientation = vec![0i64; bnd_tops.len()];
        if n >= 1 {
            for (t, c) in &bnd_tops {
                boundary_orientation[bnd_index[n - 1][t]] = *c;
            }
        }

        Ok(SimplicialPair { n, simp, index, bnd, bnd_index, orientation, boundary_orientation })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.simp[self.n]
    }

    /// All k-simplices, sorted lexicographically.
    pub fn simplices(&self, k: usize) -> &[Vec<u32>] {
        &self.simp[k]
    }

    /// All boundary k-simplices, sorted lexicographically. Empty for a
    /// closed complex.
    pub fn boundary_simplices(&self, k: usize) -> &[Vec<u32>] {
        static NONE: Vec<Vec<u32>> = Vec::new();
        self.bnd.get(k).map(|l| l.as_slice()).unwrap_or(&NONE)
    }

    pub fn orientation(&self) -> &[i64] {
        &self.orientation
    }

    pub fn boundary_orientation(&self) -> &[i64] {
        &self.boundary_orientation
    }

    /// Numbers of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.simp.iter().map(|l| l.len()).collect()
    }

    pub fn boundary_f_vector(&self) -> Vec<usize> {
        self.bnd.iter().map(|l| l.len()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.n == 0 || self.bnd[self.n - 1].is_empty()
    }

    fn bnd_dim(&self, k: usize) -> usize {
        self.bnd.get(k).map(|l| l.len()).unwrap_or(0)
    }

    fn coboundary_maps(
        lists: &[Vec<Vec<u32>>],
        index: &[BTreeMap<Vec<u32>, usize>],
    ) -> Vec<Mat> {
        (0..lists.len().saturating_sub(1))
            .map(|k| {
                let mut m = Mat::zeros(lists[k + 1].len(), lists[k].len());
                for (row, tau) in lists[k + 1].iter().enumerate() {
                    for i in 0..tau.len() {
                        let mut s = tau.clone();
                        s.remove(i);
                        m.set(row, index[k][&s], rat(parity(i)));
                    }
                }
                m
            })
            .collect()
    }

    /// Simplicial cochains of the whole space.
    pub fn cochain_complex(&self) -> Complex {
        Complex::new(self.f_vector(), Self::coboundary_maps(&self.simp, &self.index))
            .expect("closure cochains always form a complex")
    }

    /// Simplicial cochains of the boundary subcomplex (all zero if closed).
    pub fn boundary_complex(&self) -> Complex {
        Complex::new(self.boundary_f_vector(), Self::coboundary_maps(&self.bnd, &self.bnd_index))
            .expect("boundary cochains always form a complex")
    }

    /// Restriction of k-cochains to the boundary.
    pub fn restriction(&self, k: usize) -> Mat {
        let mut m = Mat::zeros(self.bnd_dim(k), self.simp.get(k).map(|l| l.len()).unwrap_or(0));
        if let Some(list) = self.bnd.get(k) {
            for (row, s) in list.iter().enumerate() {
                m.set(row, self.index[k][s], rat(1));
            }
        }
        m
    }

    /// Cochains of the pair, as the mapping cone of the restriction; its
    /// cohomology is the relative cohomology of (space, boundary).
    pub fn relative_complex(&self) -> Complex {
        let maps: Vec<Mat> = (0..=self.n).map(|k| self.restriction(k)).collect();
        mapping_cone(&maps, &self.cochain_complex(), &self.boundary_complex())
            .expect("restriction commutes with coboundaries")
    }

    pub fn betti(&self) -> Vec<usize> {
        self.cochain_complex().betti()
    }

    pub fn boundary_betti(&self) -> Vec<usize> {
        self.boundary_complex().betti()
    }

    pub fn relative_betti(&self) -> Vec<usize> {
        self.relative_complex().betti()
    }

    fn cup_on(
        lists: &[Vec<Vec<u32>>],
        index: &[BTreeMap<Vec<u32>, usize>],
        p: usize,
        f: &Mat,
        q: usize,
        g: &Mat,
    ) -> Mat {
        assert_eq!(f.cols(), 1, "cup expects column vectors");
        assert_eq!(g.cols(), 1, "cup expects column vectors");
        let out_list = &lists[p + q];
        let mut out = Mat::zeros(out_list.len(), 1);
        for (row, tau) in out_list.iter().enumerate() {
            let a = f.at(index[p][&tau[..=p].to_vec()], 0);
            let b = g.at(index[q][&tau[p..].to_vec()], 0);
            if !a.is_zero() && !b.is_zero() {
                out.set(row, 0, a * b);
            }
        }
        out
    }

    /// Cup product of cochain vectors, front p-face times back q-face.
    pub fn cup(&self, p: usize, f: &Mat, q: usize, g: &Mat) -> Mat {
        Self::cup_on(&self.simp, &self.index, p, f, q, g)
    }

    /// Cup product computed inside the boundary subcomplex.
    pub fn boundary_cup(&self, p: usize, f: &Mat, q: usize, g: &Mat) -> Mat {
        Self::cup_on(&self.bnd, &self.bnd_index, p, f, q, g)
    }

    /// Evaluates a top cochain against the fundamental chain.
    pub fn fundamental_pairing(&self, top: &Mat) -> Rat {
        assert_eq!(top.rows(), self.simp[self.n].len());
        let mut acc = Rat::zero();
        for (fpos, eps) in self.orientation.iter().enumerate() {
            if *eps == 1 {
                acc += top.at(fpos, 0).clone();
            } else {
                acc -= top.at(fpos, 0).clone();
            }
        }
        acc
    }

    /// Evaluates a top boundary cochain against the induced boundary cycle.
    pub fn boundary_pairing(&self, v: &Mat) -> Rat {
        assert_eq!(v.rows(), self.boundary_orientation.len());
        let mut acc = Rat::zero();
        for (pos, eps) in self.boundary_orientation.iter().enumerate() {
            match eps {
                1 => acc += v.at(pos, 0).clone(),
                -1 => acc -= v.at(pos, 0).clone(),
                _ => {}
            }
        }
        acc
    }

    /// The same complex with the opposite orientation.
    pub fn reversed(&self) -> SimplicialPair {
        let mut p = self.clone();
        for e in &mut p.orientation {
            *e = -*e;
        }
        for e in &mut p.boundary_orientation {
            *e = -*e;
        }
        p
    }

    /// Splits the facet list into those containing `v` (the closed star)
    /// and the rest, both inheriting this complex's orientation.
    pub fn star_split(
        &self,
        v: u32,
    ) -> Result<(SimplicialPair, SimplicialPair), SimplicialError> {
        let mut star = Vec::new();
        let mut star_eps = Vec::new();
        let mut rest = Vec::new();
        let mut rest_eps = Vec::new();
        for (f, eps) in self.facets().iter().zip(&self.orientation) {
            if f.contains(&v) {
                star.push(f.clone());
                star_eps.push(*eps);
            } else {
                rest.push(f.clone());
                rest_eps.push(*eps);
            }
        }
        Ok((
            SimplicialPair::build(&star, Some(star_eps))?,
            SimplicialPair::build(&rest, Some(rest_eps))?,
        ))
    }

    /// The intersection form on the image of middle-degree relative classes
    /// inside absolute cohomology. Entries are evaluated with relative
    /// representatives (theta, alpha) of both arguments:
    ///
    ///   Q(a, b) = <alpha_a cup alpha_b, cycle> - <theta_a cup alpha_b|_bnd, boundary cycle>
    ///
    /// which is the evaluation of the relative cup class on the relative
    /// fundamental class and therefore independent of all lift choices.
    pub fn interior_form(&self) -> Result<InteriorForm, SimplicialError> {
        if self.n % 2 == 1 {
            return Err(SimplicialError::OddDimension(self.n));
        }
        let m = self.n / 2;
        let abs = self.cochain_complex();
        let rel = self.relative_complex();
        let habs = abs.cohomology();
        let reps = rel.cohomology().swap_remove(m).reps;
        let lth = if m == 0 { 0 } else { self.bnd_dim(m - 1) };
        let rcount = reps.cols();
        let alpha = Mat::from_fn(self.simp[m].len(), rcount, |i, j| reps.at(lth + i, j).clone());
        let theta = Mat::from_fn(lth, rcount, |i, j| reps.at(i, j).clone());

        // Coordinates of the alpha classes in absolute middle cohomology.
        let hm = &habs[m];
        let cobound =
            if m == 0 { Mat::zeros(self.simp[0].len(), 0) } else { abs.d(m - 1).image() };
        let sol = hm
            .reps
            .hstack(&cobound)
            .solve(&alpha)
            .expect("relative representatives restrict to absolute cocycles");
        let coords = Mat::from_fn(hm.dim, rcount, |i, j| sol.at(i, j).clone());
        let chosen = coords.rref().pivots;

        let k = chosen.len();
        let mut gram = Mat::zeros(k, k);
        for (ra, &a) in chosen.iter().enumerate() {
            for (rb, &b) in chosen.iter().enumerate() {
                let main = self.fundamental_pairing(&self.cup(m, &alpha.col(a), m, &alpha.col(b)));
                let corr = if m >= 1 && !self.is_closed() {
                    let rho_b = self.restriction(m).mul(&alpha.col(b));
                    self.boundary_pairing(&self.boundary_cup(m - 1, &theta.col(a), m, &rho_b))
                } else {
                    Rat::zero()
                };
                gram.set(ra, rb, main - corr);
            }
        }
        let gt = gram.transpose();
        let want = if m % 2 == 0 { gt } else { gt.neg() };
        assert!(
            gram.sub(&want).is_zero(),
            "interior pairing lost its symmetry type (dimension {})",
            self.n
        );
        let signature = if m % 2 == 0 {
            sylvester_signature(&gram)?
        } else {
            Signature { pos: 0, neg: 0, zero: k }
        };
        Ok(InteriorForm { gram, signature, relative_rank: rcount, interior_rank: k, chosen })
    }

    /// Signature of [`SimplicialPair::interior_form`].
    pub fn interior_signature(&self) -> Result<Signature, SimplicialError> {
        Ok(self.interior_form()?.signature)
    }
}

/// Result of [`SimplicialPair::interior_form`].
#[derive(Debug, Clone)]
pub struct InteriorForm {
    /// Gram matrix of the cup pairing on the chosen interior basis.
    pub gram: Mat,
    pub signature: Signature,
    /// Number of middle-degree relative classes.
    pub relative_rank: usize,
    /// Rank of the image of relative classes in absolute cohomology.
    pub interior_rank: usize,
    /// Positions (into the relative basis) of the classes kept.
    pub chosen: Vec<usize>,
}

/// The solid n-simplex as a single facet.
pub fn simplex_facets(n: usize) -> Vec<Vec<u32>> {
    vec![(0..=n as u32).collect()]
}

/// Boundary of the (n+1)-simplex: the minimal triangulated n-sphere.
pub fn sphere_facets(n: usize) -> Vec<Vec<u32>> {
    let all: Vec<u32> = (0..=(n as u32 + 1)).collect();
    (0..all.len())
        .map(|i| {
            let mut f = all.clone();
            f.remove(i);
            f
        })
        .collect()
}

/// Staircase triangulation of the product of two complexes given by facets.
/// Product vertices are encoded as `a * stride + b` where `stride` exceeds
/// every vertex label appearing in `b_facets`. Using the global vertex order
/// in both factors makes the staircases of neighbouring cells agree on
/// shared faces.
pub fn product_facets(a_facets: &[Vec<u32>], b_facets: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let stride = b_facets.iter().flatten().copied().max().map(|m| m + 1).unwrap_or(1);
    let mut out = Vec::new();
    for fa in a_facets {
        let mut fa = fa.clone();
        fa.sort_unstable();
        for fb in b_facets {
            let mut fb = fb.clone();
            fb.sort_unstable();
            let p = fa.len() - 1;
            let q = fb.len() - 1;
            for mask in 0u32..(1 << (p + q)) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let (mut x, mut y) = (0usize, 0usize);
                let mut f = vec![fa[0] * stride + fb[0]];
                for step in 0..(p + q) {
                    if mask >> step & 1 == 1 {
                        x += 1;
                    } else {
                        y += 1;
                    }
                    f.push(fa[x] * stride + fb[y]);
                }
                out.push(f);
            }
        }
    }
    out
}

/// A 9-vertex triangulation of the complex projective plane: the four
/// facet orbits of the order-9 group generated by (147)(258)(369) and
/// (123)(456)(789) that assemble into a closed oriented pseudomanifold with
/// cohomology ranks (1, 0, 1, 0, 1) and middle signature +1. The ignored
/// test `nine_vertex_search_rederives_frozen_complex` reruns that search.
pub fn cp2_facets() -> Vec<Vec<u32>> {
    vec![
        vec![1, 2, 3, 4, 7], vec![1, 2, 3, 4, 8], vec![1, 2, 3, 5, 8], vec![1, 2, 3, 5, 9], vec![1, 2, 3, 6, 7], vec![1, 2, 3, 6, 9],
        vec![1, 2, 4, 6, 7], vec![1, 2, 4, 6, 8], vec![1, 2, 5, 8, 9], vec![1, 2, 6, 8, 9], vec![1, 3, 4, 7, 8], vec![1, 3, 5, 6, 7],
        vec![1, 3, 5, 6, 9], vec![1, 3, 5, 7, 8], vec![1, 4, 5, 6, 7], vec![1, 4, 5, 6, 9], vec![1, 4, 5, 7, 9], vec![1, 4, 6, 8, 9],
        vec![1, 4, 7, 8, 9], vec![1, 5, 7, 8, 9], vec![2, 3, 4, 5, 8], vec![2, 3, 4, 5, 9], vec![2, 3, 4, 7, 9], vec![2, 3, 6, 7, 9],
        vec![2, 4, 5, 6, 7], vec![2, 4, 5, 6, 8], vec![2, 4, 5, 7, 9], vec![2, 5, 6, 7, 8], vec![2, 5, 7, 8, 9], vec![2, 6, 7, 8, 9],
        vec![3, 4, 5, 6, 8], vec![3, 4, 5, 6, 9], vec![3, 4, 6, 8, 9], vec![3, 4, 7, 8, 9], vec![3, 5, 6, 7, 8], vec![3, 6, 7, 8, 9],
    ]
}

/// Orientation signs matching [`cp2_facets`], chosen so the middle form has
/// signature +1.
pub fn cp2_orientation() -> Vec<i64> {
    vec![
        1, -1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1,
        1, -1, 1, -1, 1, -1, 1, -1, -1, 1, -1, 1,
        -1, 1, -1, -1, 1, -1, -1, 1, 1, -1, 1, 1,
    ]
}

/// The oriented 9-vertex projective plane.
pub fn cp2_pair() -> SimplicialPair {
    SimplicialPair::from_oriented_facets(&cp2_facets(), &cp2_orientation())
        .expect("frozen complex is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_f_vectors() {
        let p = SimplicialPair::from_facets(&simplex_facets(2)).unwrap();
        assert_eq!(p.f_vector(), vec![3, 3, 1]);
        assert_eq!(p.boundary_f_vector(), vec![3, 3]);
        assert!(!p.is_closed());
        assert_eq!(p.betti(), vec![1, 0, 0]);
    }

    #[test]
    fn interval_rel_boundary_has_top_class() {
        let p = SimplicialPair::from_facets(&simplex_facets(1)).unwrap();
        assert_eq!(p.relative_betti(), vec![0, 1]);
    }

    #[test]
    fn disk_rel_boundary_has_top_class() {
        let p = SimplicialPair::from_facets(&simplex_facets(2)).unwrap();
        assert_eq!(p.relative_betti(), vec![0, 0, 1]);
    }

    #[test]
    fn minimal_two_sphere() {
        let p = SimplicialPair::from_facets(&sphere_facets(2)).unwrap();
        assert!(p.is_closed());
        assert_eq!(p.f_vector(), vec![4, 6, 4]);
        assert_eq!(p.betti(), vec![1, 0, 1]);
        // The top cohomology class pairs nontrivially with the cycle.
        let h = p.cochain_complex().cohomology();
        let top = &h[2].reps;
        assert_eq!(top.cols(), 1);
        assert!(!p.fundamental_pairing(&top.col(0)).is_zero());
    }

    #[test]
    fn overcrowded_ridge_is_rejected() {
        let facets = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
        match SimplicialPair::from_facets(&facets) {
            Err(SimplicialError::Overcrowded(3)) => {}
            other => panic!("expected overcrowded ridge, got {other:?}"),
        }
    }

    #[test]
    fn projective_plane_is_non_orientable() {
        let facets = vec![
            vec![1, 2, 3],
            vec![1, 3, 4],
            vec![1, 4, 5],
            vec![1, 5, 6],
            vec![1, 2, 6],
            vec![2, 3, 5],
            vec![3, 4, 6],
            vec![2, 4, 5],
            vec![3, 5, 6],
            vec![2, 4, 6],
        ];
        match SimplicialPair::from_facets(&facets) {
            Err(SimplicialError::NonOrientable) => {}
            other => panic!("expected non-orientable, got {other:?}"),
        }
    }

    #[test]
    fn boundary_cycle_is_closed() {
        for p in [
            SimplicialPair::from_facets(&simplex_facets(4)).unwrap(),
            SimplicialPair::from_facets(&product_facets(
                &simplex_facets(2),
                &sphere_facets(2),
            ))
            .unwrap(),
        ] {
            let n = p.dimension();
            let w = Mat::from_fn(p.boundary_orientation().len(), 1, |i, _| {
                rat(p.boundary_orientation()[i])
            });
            let d = p.boundary_complex().d(n - 2);
            assert!(d.transpose().mul(&w).is_zero());
        }
    }

    #[test]
    fn four_ball_has_trivial_interior_form() {
        let p = SimplicialPair::from_facets(&simplex_facets(4)).unwrap();
        assert_eq!(p.boundary_betti(), vec![1, 0, 0, 1]);
        let form = p.interior_form().unwrap();
        assert_eq!(form.relative_rank, 0);
        assert_eq!(form.interior_rank, 0);
        assert_eq!(form.signature.value(), 0);
    }

    #[test]
    fn torus_middle_form_is_antisymmetric() {
        let p =
            SimplicialPair::from_facets(&product_facets(&sphere_facets(1), &sphere_facets(1)))
                .unwrap();
        assert!(p.is_closed());
        assert_eq!(p.betti(), vec![1, 2, 1]);
        let form = p.interior_form().unwrap();
        assert_eq!(form.interior_rank, 2);
        assert_eq!(form.signature.value(), 0);
        assert!(!form.gram.at(0, 1).is_zero());
        assert_eq!(form.gram.at(0, 1).clone(), -form.gram.at(1, 0).clone());
    }

    #[test]
    fn disk_bundle_like_product_has_zero_interior_form() {
        let facets = product_facets(&simplex_facets(2), &sphere_facets(2));
        let p = SimplicialPair::from_facets(&facets).unwrap();
        assert_eq!(facets.len(), 24);
        assert_eq!(p.betti(), vec![1, 0, 1, 0, 0]);
        assert_eq!(p.boundary_betti(), vec![1, 1, 1, 1]);
        let form = p.interior_form().unwrap();
        assert_eq!(form.relative_rank, 1);
        assert_eq!(form.interior_rank, 0);
        assert_eq!(form.signature.value(), 0);
    }

    #[test]
    fn sphere_split_is_additive() {
        let p = SimplicialPair::from_facets(&sphere_facets(4)).unwrap();
        assert_eq!(p.interior_signature().unwrap().value(), 0);
        let (star, rest) = p.star_split(0).unwrap();
        assert_eq!(star.facets().len(), 5);
        assert_eq!(rest.facets().len(), 1);
        assert_eq!(star.boundary_betti(), vec![1, 0, 0, 1]);
        let s1 = star.interior_signature().unwrap().value();
        let s2 = rest.interior_signature().unwrap().value();
        assert_eq!(s1 + s2, 0);
    }

    fn link_facets(p: &SimplicialPair, face: &[u32]) -> Vec<Vec<u32>> {
        p.facets()
            .iter()
            .filter(|f| face.iter().all(|v| f.contains(v)))
            .map(|f| f.iter().copied().filter(|v| !face.contains(v)).collect())
            .collect()
    }

    #[test]
    fn nine_vertex_complex_matches_frozen_invariants() {
        let p = cp2_pair();
        assert!(p.is_closed());
        assert_eq!(p.f_vector(), vec![9, 36, 84, 90, 36]);
        assert_eq!(p.betti(), vec![1, 0, 1, 0, 1]);
        let form = p.interior_form().unwrap();
        assert_eq!(form.interior_rank, 1);
        assert_eq!(form.signature.value(), 1);
        assert_eq!(p.reversed().interior_signature().unwrap().value(), -1);
        // Every vertex link is a rational homology 3-sphere and every edge
        // link a 2-sphere, so the complex is a genuine closed 4-manifold.
        for v in 1..=9u32 {
            let link = SimplicialPair::from_facets(&link_facets(&p, &[v])).unwrap();
            assert!(link.is_closed());
            assert_eq!(link.betti(), vec![1, 0, 0, 1], "vertex {v}");
        }
        for edge in p.simplices(1).to_vec() {
            let link = SimplicialPair::from_facets(&link_facets(&p, &edge)).unwrap();
            assert!(link.is_closed());
            assert_eq!(link.betti(), vec![1, 0, 1], "edge {edge:?}");
        }
    }

    #[test]
    fn nine_vertex_split_is_additive_with_nonzero_part() {
        let p = cp2_pair();
        let (star, rest) = p.star_split(1).unwrap();
        assert_eq!(star.facets().len() + rest.facets().len(), 36);
        let s1 = star.interior_signature().unwrap().value();
        let s2 = rest.interior_signature().unwrap().value();
        assert_eq!(s1, 0);
        assert_eq!(s2, 1);
        assert_eq!(s1 + s2, p.interior_signature().unwrap().value());
    }

    fn compose(p: &[u32; 10], q: &[u32; 10]) -> [u32; 10] {
        let mut r = [0u32; 10];
        for v in 1..10 {
            r[v] = p[q[v] as usize];
        }
        r
    }

    fn orbit_group() -> Vec<[u32; 10]> {
        let g1: [u32; 10] = [0, 4, 5, 6, 7, 8, 9, 1, 2, 3];
        let g2: [u32; 10] = [0, 2, 3, 1, 5, 6, 4, 8, 9, 7];
        let id: [u32; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
        let mut out = Vec::new();
        let mut pa = id;
        for _ in 0..3 {
            let mut pb = pa;
            for _ in 0..3 {
                out.push(pb);
                pb = compose(&pb, &g2);
            }
            pa = compose(&pa, &g1);
        }
        out
    }

    fn apply_perm(perm: &[u32; 10], s: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = s.iter().map(|&x| perm[x as usize]).collect();
        v.sort_unstable();
        v
    }

    fn five_subset_orbits() -> Vec<Vec<Vec<u32>>> {
        let group = orbit_group();
        let mut orbits: BTreeMap<Vec<u32>, BTreeSet<Vec<u32>>> = BTreeMap::new();
        for mask in 0u32..(1 << 9) {
            if mask.count_ones() != 5 {
                continue;
            }
            let s: Vec<u32> = (1..=9u32).filter(|v| mask >> (v - 1) & 1 == 1).collect();
            let canon = group.iter().map(|g| apply_perm(g, &s)).min().unwrap();
            orbits.entry(canon).or_default().insert(s);
        }
        orbits.into_values().map(|s| s.into_iter().collect()).collect()
    }

    fn nine_vertex_hits() -> Vec<(Vec<Vec<u32>>, Vec<i64>, i64)> {
        let orbits = five_subset_orbits();
        assert_eq!(orbits.len(), 14);
        let mut hits = Vec::new();
        for a in 0..orbits.len() {
            for b in (a + 1)..orbits.len() {
                for c in (b + 1)..orbits.len() {
                    for d in (c + 1)..orbits.len() {
                        let mut facets = Vec::new();
                        for o in [a, b, c, d] {
                            facets.extend(orbits[o].iter().cloned());
                        }
                        let Ok(p) = SimplicialPair::from_facets(&facets) else { continue };
                        if !p.is_closed() || p.betti() != vec![1, 0, 1, 0, 1] {
                            continue;
                        }
                        let s = p.interior_signature().unwrap();
                        if s.value().abs() != 1 {
                            continue;
                        }
                        hits.push((p.facets().to_vec(), p.orientation().to_vec(), s.value()));
                    }
                }
            }
        }
        hits
    }

    /// Exhaustive rerun of the search that produced the frozen facet list.
    #[test]
    #[ignore]
    fn nine_vertex_search_rederives_frozen_complex() {
        let hits = nine_vertex_hits();
        assert!(!hits.is_empty());
        for (f, o, s) in &hits {
            println!("hit sig {s}\n  facets {f:?}\n  orient {o:?}");
        }
        let frozen = cp2_facets();
        assert!(hits.iter().any(|(f, _, _)| *f == frozen));
    }
}

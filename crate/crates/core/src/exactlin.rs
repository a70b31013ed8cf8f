//! Dense exact rational linear algebra.
//!
//! All ranks, kernels, images, quotient bases, and signatures in this crate
//! come through here. Elimination is fraction-free: each row is first scaled
//! to integer entries, then a Bareiss-style forward pass keeps every
//! intermediate value integral, and only the final normalization divides.
//! Pivoting is deterministic (first nonzero entry scanning columns left to
//! right, rows top to bottom), never by magnitude, so repeated runs on equal
//! input produce byte-identical bases.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational scalar. Stored in lowest terms with a
/// positive denominator (invariants maintained by the backing type).
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "ratio: zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Errors from exact linear algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("bad rational literal `{0}`: {1}")]
    Parse(String, String),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("vector outside spanned subspace (column {0})")]
    NotInSpan(usize),
    #[error("jagged rows: row {0} has length {1}, expected {2}")]
    Jagged(usize, usize, usize),
}

/// Parses `p`, `-p`, or `p/q` into a rational in lowest terms.
pub fn parse_rat(s: &str) -> Result<Rat, LinError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(LinError::Parse(s.into(), "empty".into()));
    }
    let bad = |m: &str| LinError::Parse(s.into(), m.into());
    let parse_int = |p: &str| -> Result<BigInt, LinError> {
        let p = p.trim();
        if p.is_empty() {
            return Err(bad("missing integer"));
        }
        p.parse::<BigInt>().map_err(|e| bad(&e.to_string()))
    };
    match t.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(t)?)),
        Some((num, den)) => {
            if den.contains('/') {
                return Err(bad("more than one slash"));
            }
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rat::new(parse_int(num)?, d))
        }
    }
}

/// Renders a rational as `p` or `p/q` (the inverse of [`parse_rat`]).
pub fn show_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| show_rat(self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Mat, LinError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(LinError::Jagged(i, row.len(), c));
            }
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from i64 entries (tests and fixtures).
    pub fn from_i64(rows: &[&[i64]]) -> Mat {
        let v = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Mat::from_rows(v).expect("from_i64: jagged input")
    }

    /// A single column vector.
    pub fn col_vec(entries: Vec<Rat>) -> Mat {
        let rows = entries.len();
        Mat { rows, cols: 1, data: entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "mul: {}x{} by {}x{}", self.rows, self.cols, rhs.rows, rhs.cols);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        let v = out.at(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "add: shape mismatch");
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + rhs.at(i, j))
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "sub: shape mismatch");
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - rhs.at(i, j))
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows, "hstack: row mismatch");
        Mat::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { rhs.at(i, j - self.cols).clone() }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols, "vstack: col mismatch");
        Mat::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows { self.at(i, j).clone() } else { rhs.at(i - self.rows, j).clone() }
        })
    }

    /// Column `j` as an n x 1 matrix.
    pub fn col(&self, j: usize) -> Mat {
        Mat::from_fn(self.rows, 1, |i, _| self.at(i, j).clone())
    }

    /// Submatrix of the listed columns, in the listed order.
    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.at(i, idx[j]).clone())
    }

    /// Reduced row echelon form with the pivot column list.
    ///
    /// Forward elimination is fraction-free: rows are scaled to integers and
    /// the Bareiss update `row_i := (p * row_i - a * row_k) / p_prev` keeps
    /// all intermediates integral. The final normalization pass (pivots to 1,
    /// clearing above pivots) is ordinary rational arithmetic.
    pub fn rref(&self) -> Rref {
        // Gauss-Jordan with first-nonzero pivoting. Pivot rows are scaled to
        // a unit pivot right away and rows that are already zero in the
        // pivot column are left untouched, which keeps sparse incidence-type
        // matrices sparse. The reduced form is unique, so callers can rely
        // on it for deterministic representative choices.
        let mut m = self.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            // First nonzero entry in column c at or below row r.
            let Some(pr) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else { continue };
            if pr != r {
                for j in c..m.cols {
                    let a = m.at(r, j).clone();
                    let b = m.at(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let p = m.at(r, c).clone();
            if !p.is_one() {
                for j in c..m.cols {
                    let v = m.at(r, j) / &p;
                    m.set(r, j, v);
                }
            }
            for i in (r + 1)..m.rows {
                let a = m.at(i, c).clone();
                if a.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.at(i, j) - &a * m.at(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }

        // Clear above the unit pivots.
        for (pr, &pc) in pivots.iter().enumerate() {
            for i in 0..pr {
                let f = m.at(i, pc).clone();
                if f.is_zero() {
                    continue;
                }
                for j in pc..m.cols {
                    let v = m.at(i, j) - &f * m.at(pr, j);
                    m.set(i, j, v);
                }
            }
        }
        Rref { mat: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, as columns. For a zero kernel the
    /// result has zero columns.
    pub fn kernel(&self) -> Mat {
        let Rref { mat, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, Rat::one());
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, -mat.at(pr, fc).clone());
            }
        }
        out
    }

    /// Basis of the column space: the pivot columns of the original matrix,
    /// in left-to-right order.
    pub fn image(&self) -> Mat {
        let piv = self.rref().pivots;
        self.select_cols(&piv)
    }

    /// Solves `self * X = rhs` column by column. Returns `None` if any column
    /// is inconsistent. Free variables are set to zero, so the answer is
    /// deterministic.
    pub fn solve(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows, "solve: row mismatch");
        let aug = self.hstack(rhs);
        let Rref { mat, pivots } = aug.rref();
        let apivots: Vec<usize> = pivots.iter().copied().filter(|&c| c < self.cols).collect();
        // Rows below rank(A) have zero A-part; any nonzero rhs entry there is
        // an inconsistency for that rhs column.
        for i in apivots.len()..mat.rows() {
            for j in 0..rhs.cols {
                if !mat.at(i, self.cols + j).is_zero() {
                    return None;
                }
            }
        }
        let mut x = Mat::zeros(self.cols, rhs.cols);
        for (pr, &pc) in apivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, mat.at(pr, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Whether every column of `vecs` lies in the column span of `self`.
    pub fn spans(&self, vecs: &Mat) -> bool {
        self.solve(vecs).is_some()
    }
}

/// Output of [`Mat::rref`].
pub struct Rref {
    pub mat: Mat,
    pub pivots: Vec<usize>,
}

/// Kronecker product. Row index `(i1, i2)` flattens to `i1 * b.rows + i2`,
/// matching the convention that a pair basis `(u, v)` flattens to
/// `u * v_count + v`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    Mat::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a.at(i / b.rows(), j / b.cols()) * b.at(i % b.rows(), j % b.cols())
    })
}

/// Representatives for the quotient `span(big) / span(small)`.
///
/// Requires `span(small)` to be contained in `span(big)`; errors otherwise.
/// The representatives are the columns of `big` whose classes are pivotal in
/// the echelon form of `[small | big]` (first-pivot rule), so the choice is
/// deterministic and depends only on the input column order. Returns the
/// representative columns (ambient coordinates) and their indices into `big`.
pub fn quotient_basis(big: &Mat, small: &Mat) -> Result<(Mat, Vec<usize>), LinError> {
    assert_eq!(big.rows(), small.rows(), "quotient_basis: ambient mismatch");
    if let Some(bad) = (0..small.cols()).find(|&j| big.solve(&small.col(j)).is_none()) {
        return Err(LinError::NotInSpan(bad));
    }
    let aug = small.hstack(big);
    let piv = aug.rref().pivots;
    let idx: Vec<usize> =
        piv.into_iter().filter(|&c| c >= small.cols()).map(|c| c - small.cols()).collect();
    Ok((big.select_cols(&idx), idx))
}

/// Inertia of a symmetric bilinear form: counts of positive, negative, and
/// zero eigenvalues (computed exactly, no eigenvalues involved).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn value(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(+{}, -{}, 0:{}; sig {})", self.pos, self.neg, self.zero, self.value())
    }
}

/// Sylvester inertia of a symmetric matrix by rational congruence
/// diagonalization. Errors if the input is not exactly symmetric.
pub fn sylvester_signature(m: &Mat) -> Result<Signature, LinError> {
    if !m.is_square() {
        return Err(LinError::Shape(format!("signature of {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            if m.at(i, j) != m.at(j, i) {
                return Err(LinError::NotSymmetric(i, j));
            }
        }
    }
    let mut a = m.clone();
    let mut pos = 0usize;
    let mut neg = 0usize;

    let swap_sym = |a: &mut Mat, x: usize, y: usize| {
        if x == y {
            return;
        }
        for j in 0..n {
            let u = a.at(x, j).clone();
            let v = a.at(y, j).clone();
            a.set(x, j, v);
            a.set(y, j, u);
        }
        for i in 0..n {
            let u = a.at(i, x).clone();
            let v = a.at(i, y).clone();
            a.set(i, x, v);
            a.set(i, y, u);
        }
    };

    for k in 0..n {
        if a.at(k, k).is_zero() {
            // Prefer a nonzero diagonal entry further down.
            if let Some(i) = ((k + 1)..n).find(|&i| !a.at(i, i).is_zero()) {
                swap_sym(&mut a, k, i);
            } else {
                // Trailing diagonal is all zero; pick the first nonzero
                // off-diagonal entry and fold it onto the diagonal:
                // row/col i += row/col j gives a 2*a_ij diagonal entry.
                let mut found = None;
                'scan: for i in k..n {
                    for j in (i + 1)..n {
                        if !a.at(i, j).is_zero() {
                            found = Some((i, j));
                            break 'scan;
                        }
                    }
                }
                let Some((i, j)) = found else { break };
                for c in 0..n {
                    let v = a.at(i, c) + a.at(j, c);
                    a.set(i, c, v);
                }
                for r in 0..n {
                    let v = a.at(r, i) + a.at(r, j);
                    a.set(r, i, v);
                }
                swap_sym(&mut a, k, i);
            }
        }
        let p = a.at(k, k).clone();
        if p.is_zero() {
            break;
        }
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in (k + 1)..n {
            let f = a.at(i, k) / &p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a.at(i, j) - &f * a.at(k, j);
                a.set(i, j, v);
            }
            for j in k..n {
                let v = a.at(j, i) - &f * a.at(j, k);
                a.set(j, i, v);
            }
        }
    }
    Ok(Signature { pos, neg, zero: n - pos - neg })
}

//! Dense complex matrices, the block decomposition `[A B; C D]`, unit
//! vector pairs, sphere sampling and the handful of spectral routines the
//! rest of the crate needs.

use std::f64::consts::TAU;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

/// Tolerance on `| ||x|| - 1 |` for vectors accepted as unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Generator for worker `index` of a run seeded with `seed`: the
/// documented split is `seed + index` (wrapping).
pub fn worker_rng(seed: u64, index: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed.wrapping_add(index))
}

/// Inner product `<u, v> = sum u_i conj(v_i)`, linear in the first
/// argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale_in_place(v: &mut [C64], s: f64) {
    for z in v {
        *z *= s;
    }
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, got: data.len() });
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Build from a closure. Panics if the closure yields a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced a non-finite entry")
    }

    /// Build from nested rows of `(re, im)` tuples; handy for literals.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().map(|&(re, im)| C64::new(re, im))).collect();
        Self::new(r, c, data)
    }

    /// Real-valued literal rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().map(|&re| C64::new(re, 0.0))).collect();
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `out = self * v`.
    pub fn mul_vec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    /// `out = self^* v`.
    pub fn adjoint_mul_vec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
    }

    pub fn adjoint_mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        self.adjoint_mul_vec_into(v, &mut out);
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// A square matrix split as `[A B; C D]` with `A` of size `n1 x n1` and
/// `D` of size `n2 x n2`, both at least 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl BlockMatrix {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, c: ComplexMatrix, d: ComplexMatrix) -> Result<Self> {
        let n1 = a.rows();
        let n2 = d.rows();
        let ok = n1 >= 1
            && n2 >= 1
            && a.is_square()
            && d.is_square()
            && (b.rows(), b.cols()) == (n1, n2)
            && (c.rows(), c.cols()) == (n2, n1);
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "blocks A {}x{}, B {}x{}, C {}x{}, D {}x{} do not form a square block matrix",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols(),
                d.rows(),
                d.cols()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Split a square matrix after `split` rows and columns.
    pub fn from_assembled(m: &ComplexMatrix, split: usize) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        if split == 0 || split >= n {
            return Err(Error::SplitOutOfRange { split, dim: n });
        }
        let n2 = n - split;
        let a = ComplexMatrix::from_fn(split, split, |i, j| m[(i, j)]);
        let b = ComplexMatrix::from_fn(split, n2, |i, j| m[(i, split + j)]);
        let c = ComplexMatrix::from_fn(n2, split, |i, j| m[(split + i, j)]);
        let d = ComplexMatrix::from_fn(n2, n2, |i, j| m[(split + i, split + j)]);
        Self::new(a, b, c, d)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn n1(&self) -> usize {
        self.a.rows()
    }

    pub fn n2(&self) -> usize {
        self.d.rows()
    }

    pub fn dim(&self) -> usize {
        self.n1() + self.n2()
    }

    pub fn assemble(&self) -> ComplexMatrix {
        let n1 = self.n1();
        ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| match (i < n1, j < n1) {
            (true, true) => self.a[(i, j)],
            (true, false) => self.b[(i, j - n1)],
            (false, true) => self.c[(i - n1, j)],
            (false, false) => self.d[(i - n1, j - n1)],
        })
    }

    /// `s * [A B; C D]`, block by block.
    pub fn scaled(&self, s: C64) -> Self {
        Self { a: self.a.scaled(s), b: self.b.scaled(s), c: self.c.scaled(s), d: self.d.scaled(s) }
    }
}

/// A point `(x, y)` on the product of the unit spheres of `C^n1` and
/// `C^n2`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitPair {
    pub(crate) x: Vec<C64>,
    pub(crate) y: Vec<C64>,
}

impl UnitPair {
    /// Accepts vectors whose norms are within [`UNIT_TOL`] of one.
    pub fn new(x: Vec<C64>, y: Vec<C64>) -> Result<Self> {
        for v in [&x, &y] {
            let n = norm(v);
            if v.is_empty() || (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit { norm: n });
            }
        }
        Ok(Self { x, y })
    }

    /// Normalize both vectors; fails only for zero or empty input.
    pub fn normalized(mut x: Vec<C64>, mut y: Vec<C64>) -> Result<Self> {
        for v in [&mut x, &mut y] {
            let n = norm(v);
            if v.is_empty() || n == 0.0 || !n.is_finite() {
                return Err(Error::NotUnit { norm: n });
            }
            scale_in_place(v, 1.0 / n);
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[C64] {
        &self.x
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn n1(&self) -> usize {
        self.x.len()
    }

    pub fn n2(&self) -> usize {
        self.y.len()
    }

    pub fn into_parts(self) -> (Vec<C64>, Vec<C64>) {
        (self.x, self.y)
    }

    /// Standard basis pair `(e_i, e_j)`.
    pub fn basis(n1: usize, i: usize, n2: usize, j: usize) -> Self {
        let mut x = vec![C64::new(0.0, 0.0); n1];
        let mut y = vec![C64::new(0.0, 0.0); n2];
        x[i] = C64::new(1.0, 0.0);
        y[j] = C64::new(1.0, 0.0);
        Self { x, y }
    }
}

/// A standard complex Gaussian by Box-Muller: the two outputs of one
/// transform become the real and imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    // u1 in (0, 1] keeps the logarithm finite
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    C64::new(r * c, r * s)
}

/// Uniform point on the unit sphere of `C^n`.
pub fn sample_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    assert!(n >= 1, "sphere dimension must be at least 1");
    loop {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let nv = norm(&v);
        if nv > 0.0 {
            scale_in_place(&mut v, 1.0 / nv);
            return v;
        }
    }
}

/// Independent uniform draws of `x` then `y`.
pub fn sample_unit_pair<R: Rng + ?Sized>(n1: usize, n2: usize, rng: &mut R) -> UnitPair {
    let x = sample_unit_vector(n1, rng);
    let y = sample_unit_vector(n2, rng);
    UnitPair { x, y }
}

/// Haar-distributed unitary from Gram-Schmidt on a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            scale_in_place(&mut v, 1.0 / nv);
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

const NORM_TOL: f64 = 1e-10;
const NORM_MAX_ITER: usize = 10_000;

/// Spectral norm (largest singular value) by power iteration on `M^* M`.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 || m.max_abs() == 0.0 {
        return 0.0;
    }
    // fixed start vector so the result is a pure function of `m`
    let mut rng = rng_from_seed(0x6f70_6e6f_726d);
    let mut v = sample_unit_vector(m.cols(), &mut rng);
    let mut mv = vec![C64::new(0.0, 0.0); m.rows()];
    let mut w = vec![C64::new(0.0, 0.0); m.cols()];
    let mut sigma = 0.0f64;
    for _ in 0..NORM_MAX_ITER {
        m.mul_vec_into(&v, &mut mv);
        let next = norm(&mv);
        m.adjoint_mul_vec_into(&mv, &mut w);
        let nw = norm(&w);
        if nw == 0.0 {
            return next;
        }
        let converged = (next - sigma).abs() <= NORM_TOL * next;
        sigma = next;
        if converged {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    sigma
}

/// All eigenvalues of a square matrix, with multiplicity, via the complex
/// Schur decomposition.
pub fn full_spectrum(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::new(m.to_nalgebra());
    let eigs = schur
        .eigenvalues()
        .expect("complex Schur form is upper triangular");
    Ok(eigs.iter().copied().collect())
}

/// Largest eigenvalue of the Hermitian part `(M + M^*)/2`.
pub fn hermitian_part_max_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let a = m.to_nalgebra();
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Outer polygonal enclosure of the numerical range `W(M)` from its
/// support function on an equispaced set of directions: `z` is accepted
/// when `Re(e^{i theta} z) <= h(theta) + tol` for every sampled `theta`.
#[derive(Clone, Debug)]
pub struct NumericalRangeEnclosure {
    rotations: Vec<C64>,
    support: Vec<f64>,
}

impl NumericalRangeEnclosure {
    pub fn new(m: &ComplexMatrix, directions: usize) -> Result<Self> {
        let mut rotations = Vec::with_capacity(directions);
        let mut support = Vec::with_capacity(directions);
        for k in 0..directions {
            let theta = TAU * k as f64 / directions as f64;
            let rot = C64::from_polar(1.0, theta);
            support.push(hermitian_part_max_eigenvalue(&m.scaled(rot))?);
            rotations.push(rot);
        }
        Ok(Self { rotations, support })
    }

    /// Largest violation `max_theta Re(e^{i theta} z) - h(theta)`.
    pub fn excess(&self, z: C64) -> f64 {
        self.rotations
            .iter()
            .zip(&self.support)
            .map(|(r, h)| (r * z).re - h)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.excess(z) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Greedy multiset distance: every eigenvalue of `a` matched to a
    /// distinct closest one in `b`.
    fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
        let mut used = vec![false; b.len()];
        let mut worst = 0.0f64;
        for z in a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, w)| (k, (z - w).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[k] = true;
            worst = worst.max(d);
        }
        worst
    }

    fn random_matrix(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
    }

    #[test]
    fn construction_rejects_bad_shapes_and_nan() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        let one = ComplexMatrix::identity(1);
        let bad_b = ComplexMatrix::zeros(2, 1);
        assert!(BlockMatrix::new(one.clone(), bad_b, ComplexMatrix::zeros(1, 1), one).is_err());
    }

    #[test]
    fn assemble_scalar_blocks() {
        let s = |v: f64| ComplexMatrix::from_real_rows(&[&[v]]).unwrap();
        let block = BlockMatrix::new(s(2.0), s(1.0), s(-1.0), s(0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_eq!(block.assemble(), expected);
    }

    #[test]
    fn assemble_identity_blocks() {
        let block = BlockMatrix::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::zeros(2, 2),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(block.assemble(), ComplexMatrix::identity(4));
    }

    #[test]
    fn disassemble_inverts_assemble() {
        let mut rng = rng_from_seed(3);
        for (n, split) in [(2, 1), (5, 3), (7, 2)] {
            let m = random_matrix(n, &mut rng);
            let block = BlockMatrix::from_assembled(&m, split).unwrap();
            assert_eq!(block.assemble(), m);
            assert_eq!(BlockMatrix::from_assembled(&block.assemble(), split).unwrap(), block);
        }
        let m = random_matrix(3, &mut rng);
        assert!(matches!(BlockMatrix::from_assembled(&m, 0), Err(Error::SplitOutOfRange { .. })));
        assert!(matches!(BlockMatrix::from_assembled(&m, 3), Err(Error::SplitOutOfRange { .. })));
    }

    #[test]
    fn operator_norm_small_cases() {
        let d = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!((operator_norm(&d) - 3.0).abs() < 1e-8 * 3.0);
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm(&j) - 1.0).abs() < 1e-8);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn operator_norm_matches_svd() {
        let mut rng = rng_from_seed(11);
        for n in [1, 3, 8, 16] {
            let m = random_matrix(n, &mut rng);
            let svd = nalgebra::SVD::new(m.to_nalgebra(), false, false);
            let reference = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let ours = operator_norm(&m);
            assert!((ours - reference).abs() <= 1e-8 * reference, "{ours} vs {reference}");
        }
    }

    #[test]
    fn operator_norm_submultiplicative_and_unitarily_invariant() {
        let mut rng = rng_from_seed(12);
        for _ in 0..20 {
            let m = random_matrix(6, &mut rng);
            let n = random_matrix(6, &mut rng);
            let u = random_unitary(6, &mut rng);
            let mn = m.matmul(&n).unwrap();
            assert!(operator_norm(&mn) <= operator_norm(&m) * operator_norm(&n) + 1e-8);
            let um = u.matmul(&m).unwrap();
            assert!((operator_norm(&um) - operator_norm(&m)).abs() <= 1e-8 * operator_norm(&m).max(1.0));
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(5);
        let u = random_unitary(7, &mut rng);
        let prod = u.adjoint().matmul(&u).unwrap();
        let err = prod.sub(&ComplexMatrix::identity(7)).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn one_dimensional_sphere_is_a_phase() {
        let mut rng = rng_from_seed(1);
        let mut angles = Vec::new();
        for _ in 0..2000 {
            let p = sample_unit_pair(1, 1, &mut rng);
            assert!((p.x[0].norm() - 1.0).abs() < 1e-15);
            assert!((p.y[0].norm() - 1.0).abs() < 1e-15);
            angles.push(p.x[0].arg());
        }
        // phase roughly uniform: every quarter of the circle is hit
        for q in 0..4 {
            let lo = -std::f64::consts::PI + q as f64 * std::f64::consts::FRAC_PI_2;
            let hits = angles.iter().filter(|&&a| a >= lo && a < lo + std::f64::consts::FRAC_PI_2).count();
            assert!((400..600).contains(&hits), "quarter {q}: {hits}");
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_unit_pair(4, 3, &mut rng_from_seed(42));
        let b = sample_unit_pair(4, 3, &mut rng_from_seed(42));
        assert_eq!(a, b);
        let c = sample_unit_pair(4, 3, &mut rng_from_seed(43));
        assert_ne!(a, c);
        assert_ne!(worker_rng(7, 0).random::<u64>(), worker_rng(7, 1).random::<u64>());
    }

    #[test]
    fn sphere_mean_is_zero() {
        let mut rng = rng_from_seed(2024);
        let n = 8;
        let draws = 100_000;
        let mut mean = vec![c(0.0, 0.0); n];
        for _ in 0..draws {
            let x = sample_unit_vector(n, &mut rng);
            for (m, xi) in mean.iter_mut().zip(&x) {
                *m += xi;
            }
        }
        for m in &mean {
            assert!((m / draws as f64).norm() <= 0.02);
        }
    }

    fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut worst) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            worst = worst.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        worst
    }

    #[test]
    fn sphere_measure_is_unitarily_invariant() {
        let mut rng = rng_from_seed(99);
        let n = 5;
        let a = random_matrix(n, &mut rng);
        let u = random_unitary(n, &mut rng);
        let samples = 100_000;
        let mut plain = Vec::with_capacity(samples);
        let mut rotated = Vec::with_capacity(samples);
        for _ in 0..samples {
            let x = sample_unit_vector(n, &mut rng);
            plain.push(inner(&a.mul_vec(&x), &x).re);
            let x2 = sample_unit_vector(n, &mut rng);
            let ux = u.mul_vec(&x2);
            rotated.push(inner(&a.mul_vec(&ux), &ux).re);
        }
        let d = ks_distance(plain, rotated);
        assert!(d <= 0.02, "KS distance {d}");
    }

    #[test]
    fn spectrum_small_cases() {
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let eig = sorted(full_spectrum(&d).unwrap());
        for (z, e) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(e, 0.0)).norm() < 1e-12);
        }
        let rot = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let eig = full_spectrum(&rot).unwrap();
        assert!(multiset_distance(&eig, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-12);
        assert!(matches!(full_spectrum(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn spectrum_is_similarity_invariant() {
        let mut rng = rng_from_seed(8);
        for n in [3, 6, 10] {
            let m = random_matrix(n, &mut rng);
            let u = random_unitary(n, &mut rng);
            let similar = u.adjoint().matmul(&m).unwrap().matmul(&u).unwrap();
            let e1 = full_spectrum(&m).unwrap();
            let e2 = full_spectrum(&similar).unwrap();
            assert!(multiset_distance(&e1, &e2) < 1e-8);
        }
    }

    #[test]
    fn enclosure_contains_quadratic_forms() {
        let mut rng = rng_from_seed(21);
        let m = random_matrix(6, &mut rng);
        let enc = NumericalRangeEnclosure::new(&m, 360).unwrap();
        for _ in 0..500 {
            let x = sample_unit_vector(6, &mut rng);
            assert!(enc.contains(inner(&m.mul_vec(&x), &x), 1e-10));
        }
        // a point far outside is rejected
        assert!(!enc.contains(c(1e3, 0.0), 1e-8));
    }
}

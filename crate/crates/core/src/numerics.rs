//! Entropy functions and dense Hermitian linear algebra.
//!
//! Eigenvalues are computed with cyclic Jacobi rotations. Complex Hermitian
//! input of order `n` is embedded into a real symmetric matrix of order `2n`,
//!
//! ```text
//! M = A + iB   ->   [ A  -B ]
//!                   [ B   A ]
//! ```
//!
//! whose spectrum is the spectrum of `M` with every eigenvalue doubled.
//! Purely real input skips the embedding. Before iterating, the matrix is
//! split into the connected components of its sparsity graph, so
//! block-diagonal operators (classical-quantum states) cost one small solve
//! per block.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Tolerance used for every structural check (Hermiticity, unit trace,
/// positivity, normalisation).
pub const TOL: f64 = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction of
/// the full Frobenius norm.
pub const JACOBI_REL_TOL: f64 = 1e-12;

/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Real eigenvalues sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts `values` non-increasing. Rejects non-finite entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain { what: "spectrum entry", value: v });
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum(values))
    }

    /// Accepts values that must already be sorted non-increasing.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain { what: "spectrum entry", value: v });
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("spectrum", "entries are not sorted non-increasing"));
        }
        Ok(Spectrum(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Checks the density-operator conditions: entries in `[-TOL, 1+TOL]` and
    /// sum within `TOL` of one.
    pub fn check_density(&self) -> Result<()> {
        if let Some(&v) = self.0.iter().find(|v| **v < -TOL) {
            return Err(Error::NotPositive { eigenvalue: v });
        }
        for &v in &self.0 {
            if v > 1.0 + TOL {
                return Err(Error::Domain { what: "density eigenvalue", value: v });
            }
        }
        let trace = self.sum();
        if math::abs(trace - 1.0) > TOL {
            return Err(Error::TraceNotUnit { trace });
        }
        Ok(())
    }

    /// Shannon entropy in bits of the spectrum read as a distribution, with
    /// entries in `[-TOL, 0)` clamped to zero.
    pub fn entropy(&self) -> f64 {
        self.0.iter().map(|&v| math::xlog2x_neg(v.max(0.0))).sum()
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| math::sqrt((a - b).norm_sqr()))
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::try_mul`] otherwise.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions differ")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimensions differ")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix dimensions differ")
    }
}

/// A dense complex matrix equal to its adjoint.
///
/// Construction checks `|m_ij - conj(m_ji)| <= TOL` and then stores the exact
/// Hermitian part, so downstream code never sees asymmetric round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.dim;
        let mut h = m;
        for i in 0..n {
            for j in i..n {
                let a = h.get(i, j);
                let b = h.get(j, i).conj();
                let deviation = math::sqrt((a - b).norm_sqr());
                if deviation > TOL {
                    return Err(Error::NotHermitian { row: i, col: j, deviation });
                }
                let avg = (a + b) * 0.5;
                h.set(i, j, avg);
                h.set(j, i, avg.conj());
            }
        }
        Ok(HermitianMatrix(h))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = ComplexMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Complex64::new(v, 0.0));
            }
        }
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(dim))
    }

    /// The rank-one projector `|v><v|` (not normalised).
    pub fn projector(v: &[Complex64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj()))
    }

    /// Diagonal matrix with real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn try_add(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(HermitianMatrix(self.0.try_add(&rhs.0)?))
    }

    pub fn try_sub(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(HermitianMatrix(self.0.try_sub(&rhs.0)?))
    }

    /// Adds `s * |v><v|` in place.
    pub fn add_projector(&mut self, v: &[Complex64], s: f64) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.0.data[i * n + j] += v[i] * v[j].conj() * s;
            }
        }
    }

    /// Adds `s * (|u><v| + |v><u|)` in place.
    pub fn add_symmetrized_outer(&mut self, u: &[Complex64], v: &[Complex64], s: f64) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.0.data[i * n + j] += (u[i] * v[j].conj() + v[i] * u[j].conj()) * s;
            }
        }
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Result<Self> {
        let out = unitary.try_mul(&self.0)?.try_mul(&unitary.adjoint())?;
        Self::new(out)
    }

    /// Principal submatrix on `rows` (same index set for rows and columns).
    pub fn submatrix(&self, rows: &[usize]) -> Self {
        HermitianMatrix(ComplexMatrix::from_fn(rows.len(), |i, j| self.get(rows[i], rows[j])))
    }

    pub fn is_real(&self) -> bool {
        self.0.data.iter().all(|z| z.im == 0.0)
    }
}

/// Probabilities summing to one within `TOL`; entries in `[-TOL, 0)` are
/// clamped to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution(Vec<f64>);

impl ProbabilityDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -TOL || *p > 1.0 + TOL {
                return Err(Error::invalid(
                    alloc::format!("probability[{i}]"),
                    alloc::format!("{p} is not in [0, 1]"),
                ));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || math::abs(total - 1.0) > TOL {
            return Err(Error::invalid("probabilities", alloc::format!("sum to {total}, not 1")));
        }
        Ok(ProbabilityDistribution(probs))
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        ProbabilityDistribution(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_unit_interval(what: &'static str, x: f64) -> Result<f64> {
    if !(-TOL..=1.0 + TOL).contains(&x) {
        return Err(Error::Domain { what, value: x });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = check_unit_interval("binary entropy argument", x)?;
    Ok(math::xlog2x_neg(x) + math::xlog2x_neg(1.0 - x))
}

/// The `D`-ary entropy `x log_D(D-1) - x log_D x - (1-x) log_D(1-x)`, in
/// base-`D` units.
pub fn d_ary_entropy(x: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain { what: "dimension", value: d as f64 });
    }
    let x = check_unit_interval("D-ary entropy argument", x)?;
    let ln_d = math::ln(d as f64);
    let mut h = 0.0;
    if x > 0.0 {
        h += x * math::ln((d - 1) as f64) / ln_d - x * math::ln(x) / ln_d;
    }
    if x < 1.0 {
        h -= (1.0 - x) * math::ln(1.0 - x) / ln_d;
    }
    Ok(h)
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &ProbabilityDistribution) -> f64 {
    p.probs().iter().map(|&x| math::xlog2x_neg(x)).sum()
}

/// All eigenvalues of a Hermitian matrix, sorted non-increasing.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Spectrum> {
    let mut values = Vec::with_capacity(m.dim());
    for component in components(m) {
        let sub = m.submatrix(&component);
        let (vals, _) = solve_component(&sub, false)?;
        values.extend(vals);
    }
    Spectrum::new(values)
}

/// Eigenvalues with unit eigenvectors, in the same (non-increasing) order.
///
/// Every returned pair satisfies `M v = λ v` to working precision. Within a
/// degenerate eigenspace the vectors are not guaranteed to be orthogonal.
pub fn hermitian_eigenpairs(m: &HermitianMatrix) -> Result<(Spectrum, Vec<Vec<Complex64>>)> {
    let n = m.dim();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for component in components(m) {
        let sub = m.submatrix(&component);
        let (vals, vecs) = solve_component(&sub, true)?;
        for (val, local) in vals.into_iter().zip(vecs) {
            let mut full = vec![Complex64::new(0.0, 0.0); n];
            for (k, &idx) in component.iter().enumerate() {
                full[idx] = local[k];
            }
            pairs.push((val, full));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (vals, vecs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((Spectrum::from_sorted(vals)?, vecs))
}

/// Trace norm `Σ|λ_i|`.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.values().iter().map(|v| math::abs(*v)).sum())
}

/// Operator norm `max|λ_i|`.
pub fn operator_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.values().iter().fold(0.0, |acc, v| acc.max(math::abs(*v))))
}

/// `½‖A − B‖₁`.
pub fn trace_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(0.5 * trace_norm(&a.try_sub(b)?)?)
}

/// Von Neumann entropy in bits of a density operator.
pub fn von_neumann_entropy(m: &HermitianMatrix) -> Result<f64> {
    let spectrum = hermitian_eigenvalues(m)?;
    spectrum.check_density()?;
    Ok(spectrum.entropy())
}

/// Connected components of the graph with an edge wherever `m_ij != 0`.
fn components(m: &HermitianMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] {
                    let z = m.get(i, j);
                    if z.re != 0.0 || z.im != 0.0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Eigen-decomposition of one connected block, unsorted.
fn solve_component(m: &HermitianMatrix, want_vectors: bool) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = m.dim();
    if n == 1 {
        return Ok((vec![m.get(0, 0).re], vec![vec![Complex64::new(1.0, 0.0)]]));
    }
    if m.is_real() {
        let mut a: Vec<f64> = m.as_matrix().data().iter().map(|z| z.re).collect();
        let v = jacobi(&mut a, n, want_vectors)?;
        let vals = (0..n).map(|i| a[i * n + i]).collect();
        let vecs = match v {
            Some(v) => (0..n)
                .map(|c| (0..n).map(|r| Complex64::new(v[r * n + c], 0.0)).collect())
                .collect(),
            None => Vec::new(),
        };
        return Ok((vals, vecs));
    }

    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            a[i * size + j] = z.re;
            a[(i + n) * size + (j + n)] = z.re;
            a[i * size + (j + n)] = -z.im;
            a[(i + n) * size + j] = z.im;
        }
    }
    let v = jacobi(&mut a, size, want_vectors)?;
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| a[y * size + y].total_cmp(&a[x * size + x]));
    // each eigenvalue of M appears twice; keep every other one
    let picked: Vec<usize> = order.iter().step_by(2).copied().collect();
    let vals = picked.iter().map(|&k| a[k * size + k]).collect();
    let vecs = match v {
        Some(v) => picked
            .iter()
            .map(|&c| {
                let mut z: Vec<Complex64> =
                    (0..n).map(|r| Complex64::new(v[r * size + c], v[(r + n) * size + c])).collect();
                let norm = math::sqrt(z.iter().map(|x| x.norm_sqr()).sum());
                for x in &mut z {
                    *x /= norm;
                }
                z
            })
            .collect(),
        None => Vec::new(),
    };
    Ok((vals, vecs))
}

/// Cyclic Jacobi on a real symmetric row-major `n x n` matrix. On return the
/// diagonal of `a` holds the eigenvalues; the optional matrix holds the
/// eigenvectors as columns.
fn jacobi(a: &mut [f64], n: usize, want_vectors: bool) -> Result<Option<Vec<f64>>> {
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };
    let total = math::sqrt(a.iter().map(|x| x * x).sum());
    if total == 0.0 {
        return Ok(v);
    }
    let target = JACOBI_REL_TOL * total;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        math::sqrt(s)
    };

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(a) <= target {
            return Ok(v);
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (math::abs(theta) + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let off = off_norm(a);
    if off <= target {
        Ok(v)
    } else {
        Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, off_norm: off })
    }
}

//! Dense complex matrices standing in for bounded operators, and the matrix
//! functions built on them: exponential, principal logarithm, inverse,
//! operator norm and spectrum.
//!
//! Matrix functions go through a complex Schur eigendecomposition and apply
//! the scalar function to the eigenvalues. When the eigenvector matrix is
//! ill-conditioned (or the matrix is defective) the exponential falls back
//! to Padé-13 scaling-and-squaring and the logarithm to inverse
//! scaling-and-squaring on the Schur factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DenseOperator {
    mat: DMatrix<C64>,
}

/// Wire format: `{"dim": n, "re": [...], "im": [...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<MatrixJson> for DenseOperator {
    type Error = LabError;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(LabError::Shape {
                op: "DenseOperator::from_json",
                detail: format!("re has {} entries, im has {}", j.re.len(), j.im.len()),
            });
        }
        let entries = j.re.iter().zip(&j.im).map(|(&r, &i)| C64::new(r, i)).collect();
        DenseOperator::new(j.dim, entries)
    }
}

impl From<DenseOperator> for MatrixJson {
    fn from(op: DenseOperator) -> Self {
        let n = op.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = op.mat[(i, j)];
                re.push(z.re);
                im.push(z.im);
            }
        }
        MatrixJson { dim: n, re, im }
    }
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseOperator({}x{}) [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            write!(f, "\n  ")?;
            for j in 0..self.dim() {
                let z = self.mat[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
        }
        write!(f, "\n]")
    }
}

impl DenseOperator {
    /// Build from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        const OP: &str = "DenseOperator::new";
        if dim == 0 {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "dim",
                detail: "dimension must be at least 1".into(),
            });
        }
        if entries.len() != dim * dim {
            return Err(LabError::Shape {
                op: OP,
                detail: format!("{} entries for dimension {dim}", entries.len()),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, &entries))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        const OP: &str = "DenseOperator::from_matrix";
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(LabError::Shape {
                op: OP,
                detail: format!("{}x{} is not a non-empty square matrix", mat.nrows(), mat.ncols()),
            });
        }
        if let Some((idx, _)) = mat
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(LabError::NonFinite {
                op: OP,
                what: format!("entry {idx} (column-major)"),
            });
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim.max(1), dim.max(1)),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim.max(1), dim.max(1)),
        }
    }

    pub fn diag(values: &[C64]) -> Result<Self> {
        let n = values.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self::from_matrix(m)
    }

    pub fn diag_real(values: &[f64]) -> Result<Self> {
        Self::diag(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter().all(|z| *z == ZERO)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { mat: &self.mat * c }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self + k I`.
    pub fn shift(&self, k: C64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..self.dim() {
            mat[(i, i)] += k;
        }
        Self { mat }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    fn check_overflow(self, op: &'static str) -> Result<Self> {
        if self
            .mat
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()) || !z.norm().is_finite())
        {
            return Err(LabError::Overflow {
                op,
                detail: "result entry exceeds f64 range".into(),
            });
        }
        Ok(self)
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Neg for &DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        DenseOperator { mat: -&self.mat }
    }
}

/// Eigenvalues plus the 2-norm condition number of the (column-normalised)
/// eigenvector matrix. Defective matrices report infinite conditioning.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub conditioning: f64,
}

/// Tunables for the matrix functions.
#[derive(Debug, Clone, Copy)]
pub struct MatFnConfig {
    /// Log refuses eigenvalues closer than this to (-inf, 0].
    pub branch_eps: f64,
    /// Eigenvector conditioning above which the Schur fallbacks are used.
    pub cond_limit: f64,
    /// Relative singularity threshold for `mat_inv`.
    pub sing_rel: f64,
}

impl Default for MatFnConfig {
    fn default() -> Self {
        Self {
            branch_eps: 1e-8,
            cond_limit: 1e8,
            sing_rel: 1e-12,
        }
    }
}

/// Distance from `z` to the closed negative real axis.
pub fn branch_cut_distance(z: C64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

struct EigenBasis {
    q: DMatrix<C64>,
    t: DMatrix<C64>,
    /// Upper-triangular eigenvectors of `t`, columns normalised.
    v: DMatrix<C64>,
    v_inv: Option<DMatrix<C64>>,
    eigenvalues: Vec<C64>,
    cond: f64,
}

fn schur(m: &DMatrix<C64>, op: &'static str) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = m.nrows();
    Schur::try_new(m.clone(), f64::EPSILON, 200 * n.max(4))
        .map(|s| s.unpack())
        .ok_or_else(|| LabError::Convergence {
            op,
            detail: format!("Schur iteration exceeded {} sweeps", 200 * n.max(4)),
        })
}

fn singular_values(m: &DMatrix<C64>, op: &'static str) -> Result<Vec<f64>> {
    let n = m.nrows();
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 200 * n.max(4))
        .ok_or_else(|| LabError::Convergence {
            op,
            detail: "SVD did not converge".into(),
        })?;
    Ok(svd.singular_values.iter().copied().collect())
}

fn eigen_basis(m: &DMatrix<C64>, op: &'static str) -> Result<EigenBasis> {
    let n = m.nrows();
    let (q, t) = schur(m, op)?;
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let gap_tol = 1e-14 * scale;

    let mut v = DMatrix::<C64>::zeros(n, n);
    let mut defective = false;
    for j in 0..n {
        v[(j, j)] = ONE;
        let lambda = eigenvalues[j];
        for i in (0..j).rev() {
            let mut s = ZERO;
            for k in (i + 1)..=j {
                s += t[(i, k)] * v[(k, j)];
            }
            let denom = t[(i, i)] - lambda;
            if denom.norm() <= gap_tol {
                if s.norm() <= gap_tol {
                    v[(i, j)] = ZERO;
                } else {
                    defective = true;
                    v[(i, j)] = ZERO;
                }
            } else {
                v[(i, j)] = -s / denom;
            }
        }
        let norm = v.column(j).norm();
        v.column_mut(j).unscale_mut(norm);
    }

    if defective {
        return Ok(EigenBasis {
            q,
            t,
            v,
            v_inv: None,
            eigenvalues,
            cond: f64::INFINITY,
        });
    }
    let sv = singular_values(&v, op)?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let v_inv = if cond.is_finite() {
        v.clone().solve_upper_triangular(&DMatrix::identity(n, n))
    } else {
        None
    };
    let cond = if v_inv.is_some() { cond } else { f64::INFINITY };
    Ok(EigenBasis {
        q,
        t,
        v,
        v_inv,
        eigenvalues,
        cond,
    })
}

impl EigenBasis {
    fn apply<F: Fn(C64) -> C64>(&self, f: F) -> DMatrix<C64> {
        let n = self.eigenvalues.len();
        let v_inv = self.v_inv.as_ref().expect("apply requires a diagonalizable basis");
        let mut vf = self.v.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                vf[(i, j)] *= fj;
            }
        }
        &self.q * (vf * v_inv) * self.q.adjoint()
    }
}

/// Eigenvalues and eigenvector conditioning.
pub fn spectrum_of(m: &DenseOperator) -> Result<Spectrum> {
    let basis = eigen_basis(&m.mat, "spectrum_of")?;
    Ok(Spectrum {
        eigenvalues: basis.eigenvalues,
        conditioning: basis.cond,
    })
}

/// Largest singular value.
pub fn op_norm(m: &DenseOperator) -> f64 {
    // SVD of a finite matrix always converges in practice; fall back to the
    // Frobenius bound if it does not.
    singular_values(&m.mat, "op_norm")
        .map(|sv| sv.into_iter().fold(0.0, f64::max))
        .unwrap_or_else(|_| m.frobenius())
}

pub fn mat_exp(m: &DenseOperator) -> Result<DenseOperator> {
    mat_exp_with(m, &MatFnConfig::default())
}

pub fn mat_exp_with(m: &DenseOperator, cfg: &MatFnConfig) -> Result<DenseOperator> {
    const OP: &str = "mat_exp";
    if m.is_zero() {
        return Ok(DenseOperator::identity(m.dim()));
    }
    if m.dim() == 1 {
        return DenseOperator {
            mat: m.mat.map(|z| z.exp()),
        }
        .check_overflow(OP);
    }
    let basis = eigen_basis(&m.mat, OP)?;
    let mat = if basis.cond <= cfg.cond_limit {
        basis.apply(|z| z.exp())
    } else {
        expm_pade13(&m.mat)
    };
    DenseOperator { mat }.check_overflow(OP)
}

pub fn mat_log_principal(m: &DenseOperator) -> Result<DenseOperator> {
    mat_log_principal_with(m, &MatFnConfig::default())
}

pub fn mat_log_principal_with(m: &DenseOperator, cfg: &MatFnConfig) -> Result<DenseOperator> {
    const OP: &str = "mat_log_principal";
    let basis = eigen_basis(&m.mat, OP)?;
    for &z in &basis.eigenvalues {
        let d = branch_cut_distance(z);
        if d <= cfg.branch_eps {
            return Err(LabError::BranchCut {
                op: OP,
                re: z.re,
                im: z.im,
                distance: d,
            });
        }
    }
    let mat = if basis.cond <= cfg.cond_limit {
        basis.apply(|z| z.ln())
    } else {
        let log_t = logm_upper_triangular(&basis.t, OP)?;
        &basis.q * log_t * basis.q.adjoint()
    };
    DenseOperator::from_matrix(mat)
}

pub fn mat_inv(m: &DenseOperator) -> Result<DenseOperator> {
    mat_inv_with(m, &MatFnConfig::default())
}

pub fn mat_inv_with(m: &DenseOperator, cfg: &MatFnConfig) -> Result<DenseOperator> {
    const OP: &str = "mat_inv";
    let sv = singular_values(&m.mat, OP)?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = cfg.sing_rel * smax;
    if smin <= threshold || smax == 0.0 {
        return Err(LabError::Singular {
            op: OP,
            sigma_min: smin,
            threshold,
        });
    }
    let inv = m.mat.clone().lu().try_inverse().ok_or(LabError::Singular {
        op: OP,
        sigma_min: smin,
        threshold,
    })?;
    DenseOperator { mat: inv }.check_overflow(OP)
}

/// 2-norm condition number.
pub fn condition_number(m: &DenseOperator) -> Result<f64> {
    let sv = singular_values(&m.mat, "condition_number")?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if smin > 0.0 { smax / smin } else { f64::INFINITY })
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn expm_pade13(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a * C64::new(0.5f64.powi(s), 0.0);
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .unwrap_or_else(|| DMatrix::from_element(n, n, C64::new(f64::NAN, 0.0)));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Principal square root of an upper-triangular matrix whose diagonal avoids
/// the closed negative real axis.
fn sqrtm_upper_triangular(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let mut r = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

fn logm_upper_triangular(t: &DMatrix<C64>, op: &'static str) -> Result<DMatrix<C64>> {
    let n = t.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let mut r = t.clone();
    let mut k = 0;
    while (&r - &id).norm() > 0.25 {
        if k >= 64 {
            return Err(LabError::Convergence {
                op,
                detail: "inverse scaling-and-squaring needed more than 64 square roots".into(),
            });
        }
        r = sqrtm_upper_triangular(&r);
        k += 1;
    }
    let y = &r - &id;
    let mut sum = DMatrix::<C64>::zeros(n, n);
    let mut power = y.clone();
    for j in 1..=200 {
        let term = &power * C64::new(if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64, 0.0);
        let tn = term.norm();
        sum += term;
        if tn <= 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
            break;
        }
        power = &power * &y;
    }
    Ok(sum * C64::new(2f64.powi(k), 0.0))
}

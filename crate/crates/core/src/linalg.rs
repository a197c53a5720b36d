//! Dense complex Hermitian linear algebra.
//!
//! Everything here works on [`CMat`], a column-major `nalgebra` matrix of
//! `Complex64`. Matrix functions follow the support convention: a scalar
//! function is applied only to the eigenvalues that survive the relative
//! cutoff of a [`SupportConvention`], so `mpow(A, -1)` is the inverse of `A`
//! restricted to its support and `A · A⁻¹` is the projector onto `supp(A)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Relative Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues with `|λ| ≤ relative_cutoff · max|λ|` are treated as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportConvention {
    relative_cutoff: f64,
}

impl SupportConvention {
    pub fn new(relative_cutoff: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&relative_cutoff) {
            return Err(Error::Format(format!(
                "relative cutoff {relative_cutoff} outside [0, 1)"
            )));
        }
        Ok(Self { relative_cutoff })
    }

    pub fn relative_cutoff(&self) -> f64 {
        self.relative_cutoff
    }

    fn threshold(&self, eigenvalues: &[f64]) -> f64 {
        let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        self.relative_cutoff * scale
    }
}

impl Default for SupportConvention {
    fn default() -> Self {
        Self { relative_cutoff: 1e-12 }
    }
}

/// `M = V diag(λ) V†` with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
    pub hermiticity_residual: f64,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMat {
        self.rebuild(Some)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Apply `f` on the retained spectrum; dropped eigenvalues contribute zero.
    pub fn apply(&self, f: impl Fn(f64) -> f64, conv: SupportConvention) -> Result<CMat> {
        let cut = conv.threshold(&self.eigenvalues);
        let mut mapped = Vec::with_capacity(self.dim());
        for &l in &self.eigenvalues {
            if l.abs() <= cut || l == 0.0 {
                mapped.push(None);
                continue;
            }
            let v = f(l);
            if !v.is_finite() {
                return Err(Error::Domain(l));
            }
            mapped.push(Some(v));
        }
        let mut it = mapped.into_iter();
        Ok(self.rebuild(|_| it.next().flatten()))
    }

    /// Apply `f` on every eigenvalue, including zeros.
    pub fn apply_full(&self, f: impl Fn(f64) -> f64) -> Result<CMat> {
        for &l in &self.eigenvalues {
            if !f(l).is_finite() {
                return Err(Error::Domain(l));
            }
        }
        Ok(self.rebuild(|l| Some(f(l))))
    }

    fn rebuild(&self, mut f: impl FnMut(f64) -> Option<f64>) -> CMat {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        let mut any = false;
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l).unwrap_or(0.0);
            any |= w != 0.0;
            scaled.column_mut(k).scale_mut(w);
        }
        if !any {
            return CMat::zeros(n, n);
        }
        hermitian_part(&(scaled * self.eigenvectors.adjoint()))
    }
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
}

/// Build from real and imaginary row-major nested vectors.
pub fn from_rows(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<CMat> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("ragged real part".into()));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("imaginary part shape differs from real part".into()));
        }
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        c(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Induced ∞-norm (maximum absolute row sum).
pub fn row_sum_norm(m: &CMat) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix after symmetrization.
///
/// Fails when `‖M − M†‖_∞ > tol · ‖M‖_∞`.
pub fn hermitian_eig(m: &CMat, tol: f64) -> Result<SpectralDecomposition> {
    let n = ensure_square(m)?;
    let scale = row_sum_norm(m);
    let residual = row_sum_norm(&(m - m.adjoint()));
    let relative = if scale > 0.0 { residual / scale } else { 0.0 };
    if relative > tol {
        return Err(Error::NonHermitian {
            residual: relative,
            tol,
        });
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: CMat::zeros(0, 0),
            hermiticity_residual: 0.0,
        });
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps first occurrence on ties
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        hermiticity_residual: relative,
    })
}

pub fn eig(m: &CMat) -> Result<SpectralDecomposition> {
    hermitian_eig(m, HERMITIAN_TOL)
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    Ok(eig(m)?.eigenvalues)
}

pub fn min_eigenvalue(m: &CMat) -> Result<f64> {
    Ok(eig(m)?.min_eigenvalue())
}

/// `Σ_{λ retained} f(λ) |i⟩⟨i|`.
pub fn matrix_function(m: &CMat, f: impl Fn(f64) -> f64, conv: SupportConvention) -> Result<CMat> {
    eig(m)?.apply(f, conv)
}

/// `f` applied to the whole spectrum, e.g. the matrix exponential.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    eig(m)?.apply_full(f)
}

/// Real power on the support; negative exponents give the support-restricted inverse.
pub fn mpow(m: &CMat, p: f64, conv: SupportConvention) -> Result<CMat> {
    matrix_function(m, |x| x.powf(p), conv)
}

pub fn msqrt(m: &CMat) -> Result<CMat> {
    mpow(m, 0.5, SupportConvention::default())
}

/// Natural logarithm on the support.
pub fn mlog(m: &CMat, conv: SupportConvention) -> Result<CMat> {
    matrix_function(m, f64::ln, conv)
}

pub fn mexp(m: &CMat) -> Result<CMat> {
    spectral_map(m, f64::exp)
}

/// Orthogonal projector onto the support.
pub fn support_projector(m: &CMat, conv: SupportConvention) -> Result<CMat> {
    matrix_function(m, |_| 1.0, conv)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of a list of factors.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMat>) -> CMat {
    factors.into_iter().fold(identity(1), |acc, f| kron(&acc, f))
}

fn check_dims(m: &CMat, dims: &[usize]) -> Result<usize> {
    let n = ensure_square(m)?;
    let prod: usize = dims.iter().product();
    if prod != n {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} multiply to {prod}, matrix is {n}x{n}"
        )));
    }
    Ok(n)
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Trace out the subsystems listed in `traced_out`; remaining factors keep their order.
pub fn partial_trace(m: &CMat, dims: &[usize], traced_out: &[usize]) -> Result<CMat> {
    let n = check_dims(m, dims)?;
    if let Some(&bad) = traced_out.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|k| !traced_out.contains(k)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| traced_out.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();

    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let d = digits(i, dims);
            let k: Vec<usize> = kept.iter().map(|&s| d[s]).collect();
            let t: Vec<usize> = traced.iter().map(|&s| d[s]).collect();
            (compose(&k, &kept_dims), compose(&t, &traced_dims))
        })
        .collect();

    let mut out = CMat::zeros(out_dim, out_dim);
    for j in 0..n {
        let (kj, tj) = split[j];
        for i in 0..n {
            let (ki, ti) = split[i];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reorder tensor factors: output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(m: &CMat, dims: &[usize], perm: &[usize]) -> Result<CMat> {
    let n = check_dims(m, dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len()
        || perm
            .iter()
            .any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::DimensionMismatch(format!(
            "{perm:?} is not a permutation of {} factors",
            dims.len()
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let d = digits(i, dims);
            let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
            compose(&nd, &new_dims)
        })
        .collect();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

pub fn singular_values(x: &CMat) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    x.clone().singular_values().iter().copied().collect()
}

/// `[Tr |X|^α]^{1/α}`; a quasi-norm for `α < 1`, the operator norm for `α = ∞`.
///
/// Singular values below the default support cutoff (relative to the largest)
/// are dropped so that round-off does not leak into fractional powers.
pub fn alpha_norm(x: &CMat, alpha: f64) -> f64 {
    let sv = singular_values(x);
    let top = sv.iter().copied().fold(0.0, f64::max);
    if alpha.is_infinite() {
        return top;
    }
    let cut = SupportConvention::default().relative_cutoff() * top;
    let s: f64 = sv.iter().filter(|&&s| s > cut).map(|s| s.powf(alpha)).sum();
    s.powf(1.0 / alpha)
}

pub fn trace_norm(x: &CMat) -> f64 {
    alpha_norm(x, 1.0)
}

pub fn operator_norm(x: &CMat) -> f64 {
    alpha_norm(x, f64::INFINITY)
}

/// Hilbert-Schmidt inner product `Tr{C†D}`.
pub fn hs_inner(c: &CMat, d: &CMat) -> Result<C64> {
    if c.shape() != d.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", c.shape(), d.shape())));
    }
    Ok(c.iter().zip(d.iter()).map(|(a, b)| a.conj() * b).sum())
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_z() -> CMat {
    diag(&[1.0, -1.0])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

/// `|ψ⟩⟨ψ|` for a column vector of amplitudes.
pub fn ket_bra(psi: &[C64]) -> CMat {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

//! States, positive operators and channels in Kraus form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eig, hermitian_eig, identity, kron, mpow, partial_trace, trace, trace_norm, CMat, SupportConvention, C64,
};

/// Default tolerance for state validation (Hermiticity, positivity, trace).
pub const STATE_TOL: f64 = 1e-10;
/// Trace-preservation tolerance for Kraus sets.
pub const TP_TOL: f64 = 1e-10;

/// Anything that carries a square operator.
pub trait Operator {
    fn mat(&self) -> &CMat;

    fn dim(&self) -> usize {
        self.mat().nrows()
    }
}

impl Operator for CMat {
    fn mat(&self) -> &CMat {
        self
    }
}

/// Hermitian, positive semidefinite, unit-trace operator with subsystem dims.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMat,
    dims: Vec<usize>,
    positive_definite: bool,
}

impl DensityOperator {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// All eigenvalues strictly above the validation tolerance.
    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    pub fn is_rank_deficient(&self) -> bool {
        !self.positive_definite
    }

    pub fn as_positive(&self) -> PositiveOperator {
        PositiveOperator {
            matrix: self.matrix.clone(),
            dims: self.dims.clone(),
        }
    }
}

impl Operator for DensityOperator {
    fn mat(&self) -> &CMat {
        &self.matrix
    }
}

/// Hermitian positive semidefinite operator, trace unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveOperator {
    matrix: CMat,
    dims: Vec<usize>,
}

impl PositiveOperator {
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        let dims = default_dims(&matrix, dims)?;
        let spec = hermitian_eig(&matrix, STATE_TOL)?;
        let floor = -STATE_TOL * spec.max_eigenvalue().abs().max(1.0);
        if spec.min_eigenvalue() < floor {
            return Err(Error::NotPositive(spec.min_eigenvalue()));
        }
        Ok(Self {
            matrix: linalg::hermitian_part(&matrix),
            dims,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }
}

impl Operator for PositiveOperator {
    fn mat(&self) -> &CMat {
        &self.matrix
    }
}

impl From<DensityOperator> for PositiveOperator {
    fn from(rho: DensityOperator) -> Self {
        Self {
            matrix: rho.matrix,
            dims: rho.dims,
        }
    }
}

fn default_dims(m: &CMat, dims: Vec<usize>) -> Result<Vec<usize>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if dims.is_empty() {
        return Ok(vec![m.nrows()]);
    }
    let prod: usize = dims.iter().product();
    if prod != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} multiply to {prod}, matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(dims)
}

/// Check that `m` is a density operator on the factors `dims` (empty means one factor).
pub fn validate_density(m: &CMat, dims: &[usize], tol: f64) -> Result<DensityOperator> {
    let dims = default_dims(m, dims.to_vec())?;
    let spec = hermitian_eig(m, tol.max(f64::EPSILON))?;
    if spec.min_eigenvalue() < -tol {
        return Err(Error::NotPositive(spec.min_eigenvalue()));
    }
    let tr = trace(m).re;
    if (tr - 1.0).abs() > tol {
        return Err(Error::NotNormalized(tr));
    }
    Ok(DensityOperator {
        matrix: linalg::hermitian_part(m),
        dims,
        positive_definite: spec.min_eigenvalue() > tol,
    })
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G† / Tr{G G†}` for a complex Gaussian `dim × rank` matrix `G`.
pub fn random_density_with(dims: &[usize], rank: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let dim: usize = dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    let g = gaussian_matrix(dim, rank, rng);
    let w = &g * g.adjoint();
    let w = linalg::hermitian_part(&w.unscale(trace(&w).re));
    validate_density(&w, dims, 1e-9)
}

pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(dims, rank, &mut seeded_rng(seed))
}

/// Diagonal density operator from a probability vector.
pub fn classical_state(p: &[f64], dims: &[usize]) -> Result<DensityOperator> {
    validate_density(&linalg::diag(p), dims, STATE_TOL)
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    haar_isometry(d, d, rng)
}

/// `rows × cols` isometry (`rows ≥ cols`) with Haar-distributed columns.
pub fn haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = gaussian_matrix(rows, cols, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..cols {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1., 0.) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// `(1 − eps) ρ + eps I/d`.
pub fn perturb_positive(rho: &DensityOperator, eps: f64) -> DensityOperator {
    assert!((0.0..1.0).contains(&eps), "eps must lie in [0, 1)");
    let d = rho.dim();
    let m = rho.matrix.scale(1.0 - eps) + identity(d).scale(eps / d as f64);
    let min = linalg::min_eigenvalue(&m).unwrap_or(0.0);
    DensityOperator {
        matrix: m,
        dims: rho.dims.clone(),
        positive_definite: rho.positive_definite || (eps > 0.0 && min > STATE_TOL),
    }
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁²`; accepts unnormalized positive operators.
pub fn fidelity(rho: &impl Operator, sigma: &impl Operator) -> Result<f64> {
    let (a, b) = (rho.mat(), sigma.mat());
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let conv = SupportConvention::default();
    let root = mpow(a, 0.5, conv)? * mpow(b, 0.5, conv)?;
    Ok(trace_norm(&root).powi(2))
}

/// Completely positive trace-preserving map `A ↦ Σ K_i A K_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kraus: Vec<CMat>,
    dim_in: usize,
    dim_out: usize,
}

impl Channel {
    /// Kraus operators must be `dim_out × dim_in` and satisfy `Σ K†K = I`.
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let residual = ch.tp_residual();
        if residual > TP_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(ch)
    }

    /// Completely positive map from Kraus operators without the trace-preservation check.
    pub fn from_kraus_unchecked(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Format("channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {:?} vs {:?}",
                bad.shape(),
                (dim_out, dim_in)
            )));
        }
        Ok(Self { kraus, dim_in, dim_out })
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `‖Σ K†K − I‖` entrywise maximum.
    pub fn tp_residual(&self) -> f64 {
        linalg::max_abs(&(self.kraus_gram() - identity(self.dim_in)))
    }

    pub fn kraus_gram(&self) -> CMat {
        self.kraus
            .iter()
            .fold(CMat::zeros(self.dim_in, self.dim_in), |acc, k| acc + k.adjoint() * k)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![identity(d)],
            dim_in: d,
            dim_out: d,
        }
    }

    /// `A ↦ U A U†`.
    pub fn unitary(u: CMat) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `A ↦ Tr{A} I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = (1.0 / d as f64).sqrt();
        let mut kraus = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut k = CMat::zeros(d, d);
                k[(i, j)] = c(s, 0.0);
                kraus.push(k);
            }
        }
        Self {
            kraus,
            dim_in: d,
            dim_out: d,
        }
    }

    /// `A ↦ (1 − p) A + p Tr{A} I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        let mut kraus = vec![identity(d).scale((1.0 - p).sqrt())];
        kraus.extend(
            Self::completely_depolarizing(d)
                .kraus
                .into_iter()
                .map(|k| k.scale(p.sqrt())),
        );
        Self::new(kraus)
    }

    /// Partial trace over the factors in `traced_out`.
    pub fn partial_trace(dims: &[usize], traced_out: &[usize]) -> Result<Self> {
        if traced_out.iter().any(|&k| k >= dims.len()) {
            return Err(Error::DimensionMismatch(format!(
                "cannot trace {traced_out:?} out of {dims:?}"
            )));
        }
        let traced_dims: Vec<usize> = traced_out.iter().map(|&k| dims[k]).collect();
        let n_traced: usize = traced_dims.iter().product();
        let mut kraus = Vec::with_capacity(n_traced);
        for t in 0..n_traced {
            // basis bra ⟨t| on the traced factors, identity on the rest
            let mut t_digits = vec![0; traced_out.len()];
            let mut rem = t;
            for k in (0..traced_out.len()).rev() {
                t_digits[k] = rem % traced_dims[k];
                rem /= traced_dims[k];
            }
            let factors: Vec<CMat> = (0..dims.len())
                .map(|s| match traced_out.iter().position(|&x| x == s) {
                    Some(pos) => {
                        let mut bra = CMat::zeros(1, dims[s]);
                        bra[(0, t_digits[pos])] = c(1.0, 0.0);
                        bra
                    }
                    None => identity(dims[s]),
                })
                .collect();
            kraus.push(linalg::kron_all(&factors));
        }
        Self::new(kraus)
    }

    /// Random channel from a Haar isometry `dim_in → dim_out ⊗ env`.
    pub fn random(dim_in: usize, dim_out: usize, n_kraus: usize, rng: &mut impl Rng) -> Self {
        let v = haar_isometry(dim_out * n_kraus, dim_in, rng);
        let kraus = (0..n_kraus)
            .map(|k| CMat::from_fn(dim_out, dim_in, |o, i| v[(o * n_kraus + k, i)]))
            .collect();
        Self { kraus, dim_in, dim_out }
    }

    fn check_in(&self, a: &CMat) -> Result<()> {
        if a.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, got {1:?}",
                self.dim_in,
                a.shape()
            )));
        }
        Ok(())
    }

    /// `Σ K_i A K_i†`.
    pub fn apply(&self, a: &CMat) -> Result<CMat> {
        self.check_in(a)?;
        Ok(self
            .kraus
            .iter()
            .fold(CMat::zeros(self.dim_out, self.dim_out), |acc, k| {
                acc + k * a * k.adjoint()
            }))
    }

    /// Heisenberg-picture map `Σ K_i† B K_i`.
    pub fn adjoint_apply(&self, b: &CMat) -> Result<CMat> {
        if b.shape() != (self.dim_out, self.dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "adjoint input is {0}x{0}, got {1:?}",
                self.dim_out,
                b.shape()
            )));
        }
        Ok(self.kraus.iter().fold(CMat::zeros(self.dim_in, self.dim_in), |acc, k| {
            acc + k.adjoint() * b * k
        }))
    }

    /// The adjoint map as a channel object (Kraus operators daggered).
    pub fn adjoint(&self) -> Self {
        Self {
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
            dim_in: self.dim_out,
            dim_out: self.dim_in,
        }
    }

    /// `λ_min(N(I)) > tol`.
    pub fn is_strict(&self, tol: f64) -> bool {
        self.strictness().map(|m| m > tol).unwrap_or(false)
    }

    /// Smallest eigenvalue of `N(I)`.
    pub fn strictness(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.apply(&identity(self.dim_in))?)
    }

    /// `self` after `first`: `A ↦ self(first(A))`.
    pub fn compose(&self, first: &Channel) -> Result<Self> {
        if first.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.dim_in, self.dim_out, first.dim_in, first.dim_out
            )));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| first.kraus.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            kraus,
            dim_in: first.dim_in,
            dim_out: self.dim_out,
        })
    }

    /// `self ⊗ other` acting on the tensor product of inputs.
    pub fn tensor(&self, other: &Channel) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        Self {
            kraus,
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
        }
    }

    /// Choi operator `Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMat {
        let (n, m) = (self.dim_in, self.dim_out);
        let mut j = CMat::zeros(n * m, n * m);
        for k in &self.kraus {
            // vec(K) with input index major
            let v = nalgebra::DVector::from_fn(n * m, |idx, _| k[(idx % m, idx / m)]);
            j += &v * v.adjoint();
        }
        j
    }

    /// Equivalent Kraus set with at most `dim_in · dim_out` operators.
    pub fn minimal_kraus(&self) -> Result<Self> {
        let (n, m) = (self.dim_in, self.dim_out);
        let spec = eig(&self.choi())?;
        let cut = 1e-14 * spec.max_eigenvalue().max(0.0);
        let kraus: Vec<CMat> = spec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cut)
            .map(|(k, &l)| {
                let v = spec.eigenvectors.column(k);
                CMat::from_fn(m, n, |o, i| v[i * m + o] * l.sqrt())
            })
            .collect();
        Self::from_kraus_unchecked(kraus)
    }
}

/// Isometry `V: H → K ⊗ E'` with `Tr_{E'}{V A V†} = N(A)`.
#[derive(Debug, Clone)]
pub struct Stinespring {
    pub isometry: CMat,
    pub dim_out: usize,
    pub env_dim: usize,
}

impl Stinespring {
    pub fn apply(&self, a: &CMat) -> Result<CMat> {
        let full = &self.isometry * a * self.isometry.adjoint();
        partial_trace(&full, &[self.dim_out, self.env_dim], &[1])
    }
}

/// Stinespring dilation with environment dimension at most `dim_in · dim_out`.
pub fn stinespring(ch: &Channel) -> Result<Stinespring> {
    let reduced;
    let ch = if ch.kraus.len() > ch.dim_in * ch.dim_out {
        reduced = ch.minimal_kraus()?;
        &reduced
    } else {
        ch
    };
    let env = ch.kraus.len();
    let isometry = CMat::from_fn(ch.dim_out * env, ch.dim_in, |row, i| {
        ch.kraus[row % env][(row / env, i)]
    });
    Ok(Stinespring {
        isometry,
        dim_out: ch.dim_out,
        env_dim: env,
    })
}

/// Petz recovery `ω ↦ σ^{1/2} N†(N(σ)^{-1/2} ω N(σ)^{-1/2}) σ^{1/2}` in Kraus form.
///
/// Trace preserving on `supp(N(σ))` only.
pub fn petz_recovery(sigma: &impl Operator, ch: &Channel, conv: SupportConvention) -> Result<Channel> {
    let s = sigma.mat();
    if linalg::max_abs(s) == 0.0 {
        return Err(Error::DegenerateSigma);
    }
    let s_half = mpow(s, 0.5, conv)?;
    let n_sigma_inv_half = mpow(&ch.apply(s)?, -0.5, conv)?;
    let kraus = ch
        .kraus
        .iter()
        .map(|k| &s_half * k.adjoint() * &n_sigma_inv_half)
        .collect();
    Channel::from_kraus_unchecked(kraus)
}

/// Clock-and-shift unitaries `X^a Z^b`, `a, b ∈ 0..d`, with `ω = exp(2πi/d)`.
pub fn heisenberg_weyl(d: usize) -> Vec<CMat> {
    assert!(d >= 1, "dimension must be positive");
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut shift = CMat::zeros(d, d);
    for j in 0..d {
        shift[((j + 1) % d, j)] = c(1.0, 0.0);
    }
    let clock = CMat::from_fn(d, d, |i, j| if i == j { omega(i) } else { c(0., 0.) });
    let mut out = Vec::with_capacity(d * d);
    let mut xa = identity(d);
    for _ in 0..d {
        let mut zb = identity(d);
        for _ in 0..d {
            out.push(&xa * &zb);
            zb = &zb * &clock;
        }
        xa = &xa * &shift;
    }
    out
}

/// Uniform Heisenberg-Weyl twirl `(1/d²) Σ U X U†`.
pub fn twirl(x: &CMat) -> CMat {
    let d = x.nrows();
    let units = heisenberg_weyl(d);
    let n = units.len() as f64;
    units
        .iter()
        .fold(CMat::zeros(d, d), |acc, u| acc + u * x * u.adjoint())
        .unscale(n)
}

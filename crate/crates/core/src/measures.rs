//! Conditional mutual information and relative-entropy differences.
//!
//! Two families of inputs:
//!
//! * [`TripartiteState`]: a state on `A ⊗ B ⊗ C` with its marginals
//!   `ρ_AC`, `ρ_BC`, `ρ_C` computed once at construction;
//! * [`ChannelTriple`]: `(ρ, σ, N)` with `N(ρ)` and `N(σ)` cached.
//!
//! The CMI quantities are the special case `σ = ρ_AC ⊗ I_B`, `N = Tr_A` of the
//! relative-entropy differences; [`ChannelTriple::from_tripartite`] builds that
//! triple. All values are in bits.

use crate::divergences::{self, AlphaParameter};
use crate::error::{Error, Result};
use crate::linalg::{
    self, alpha_norm, eig, identity, kron, mpow, partial_trace, permute_subsystems, trace, CMat, SupportConvention,
};
use crate::objects::{petz_recovery, Channel, DensityOperator, Operator, PositiveOperator};

/// Strictness threshold for `λ_min(N(I))`.
pub const STRICT_TOL: f64 = 1e-12;

fn conv() -> SupportConvention {
    SupportConvention::default()
}

/// `λ_min > cutoff · λ_max`.
pub fn has_full_support(m: &CMat) -> Result<bool> {
    let spec = eig(m)?;
    Ok(spec.min_eigenvalue() > conv().relative_cutoff() * spec.max_eigenvalue().abs())
}

/// Von Neumann entropy in bits.
pub fn entropy(m: &CMat) -> Result<f64> {
    let spec = eig(m)?;
    let cut = conv().relative_cutoff() * spec.max_eigenvalue();
    Ok(-spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| l * l.log2())
        .sum::<f64>())
}

/// State on `A ⊗ B ⊗ C` with cached marginals.
#[derive(Debug, Clone)]
pub struct TripartiteState {
    rho: DensityOperator,
    dims: [usize; 3],
    rho_ac: CMat,
    rho_bc: CMat,
    rho_c: CMat,
}

impl TripartiteState {
    pub fn new(rho: DensityOperator) -> Result<Self> {
        let dims: [usize; 3] = rho.dims().try_into().map_err(|_| {
            Error::DimensionMismatch(format!("tripartite state needs three factors, got {:?}", rho.dims()))
        })?;
        let m = rho.matrix();
        let rho_ac = partial_trace(m, &dims, &[1])?;
        let rho_bc = partial_trace(m, &dims, &[0])?;
        let rho_c = partial_trace(m, &dims, &[0, 1])?;
        Ok(Self {
            rho,
            dims,
            rho_ac,
            rho_bc,
            rho_c,
        })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn rho_abc(&self) -> &CMat {
        self.rho.matrix()
    }

    pub fn rho_ac(&self) -> &CMat {
        &self.rho_ac
    }

    pub fn rho_bc(&self) -> &CMat {
        &self.rho_bc
    }

    pub fn rho_c(&self) -> &CMat {
        &self.rho_c
    }

    /// `(d_A, d_B, d_C)`.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// `X_AC ⊗ I_B` in `A, B, C` order.
    pub fn lift_ac(&self, x: &CMat) -> Result<CMat> {
        let [a, b, c] = self.dims;
        permute_subsystems(&kron(x, &identity(b)), &[a, c, b], &[0, 2, 1])
    }

    /// `I_A ⊗ X_BC`.
    pub fn lift_bc(&self, x: &CMat) -> CMat {
        kron(&identity(self.dims[0]), x)
    }

    /// `I_AB ⊗ X_C`.
    pub fn lift_c(&self, x: &CMat) -> CMat {
        kron(&identity(self.dims[0] * self.dims[1]), x)
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        has_full_support(self.rho_abc())
    }

    fn require_pd(&self) -> Result<()> {
        if !self.is_positive_definite()? {
            return Err(Error::RankDeficient("rho_ABC"));
        }
        Ok(())
    }

    /// `ρ_AC^{1/2} ρ_C^{−1/2} ρ_BC ρ_C^{−1/2} ρ_AC^{1/2}`, the Petz-recovered state.
    pub fn recovered(&self) -> Result<CMat> {
        let ac = self.lift_ac(&mpow(&self.rho_ac, 0.5, conv())?)?;
        let c = self.lift_c(&mpow(&self.rho_c, -0.5, conv())?);
        let bc = self.lift_bc(&self.rho_bc);
        Ok(linalg::hermitian_part(&(&ac * &c * bc * &c * &ac)))
    }

    fn kernel(&self, p_ac: f64, p_c: f64, p_bc: f64) -> Result<CMat> {
        let ac = self.lift_ac(&mpow(&self.rho_ac, p_ac, conv())?)?;
        let c = self.lift_c(&mpow(&self.rho_c, p_c, conv())?);
        let bc = self.lift_bc(&mpow(&self.rho_bc, p_bc, conv())?);
        Ok(linalg::hermitian_part(&(&ac * &c * bc * &c * &ac)))
    }

    /// `ρ_AC^{(1−α)/2} ρ_C^{(α−1)/2} ρ_BC^{1−α} ρ_C^{(α−1)/2} ρ_AC^{(1−α)/2}`.
    pub fn petz_kernel(&self, alpha: f64) -> Result<CMat> {
        self.kernel((1.0 - alpha) / 2.0, (alpha - 1.0) / 2.0, 1.0 - alpha)
    }

    /// `ρ_AC^{(1−α)/2α} ρ_C^{(α−1)/2α} ρ_BC^{(1−α)/α} ρ_C^{(α−1)/2α} ρ_AC^{(1−α)/2α}`.
    pub fn sandwiched_kernel(&self, alpha: f64) -> Result<CMat> {
        let h = (1.0 - alpha) / (2.0 * alpha);
        self.kernel(h, -h, 2.0 * h)
    }

    /// `exp(log ρ_AC + log ρ_BC − log ρ_C)` (natural logarithms).
    pub fn log_sum_exp(&self) -> Result<CMat> {
        self.require_pd()?;
        let l = self.lift_ac(&linalg::mlog(&self.rho_ac, conv())?)?
            + self.lift_bc(&linalg::mlog(&self.rho_bc, conv())?)
            - self.lift_c(&linalg::mlog(&self.rho_c, conv())?);
        linalg::mexp(&linalg::hermitian_part(&l))
    }
}

/// `(ρ, σ, N)` with the channel outputs cached.
#[derive(Debug, Clone)]
pub struct ChannelTriple {
    rho: DensityOperator,
    sigma: PositiveOperator,
    channel: Channel,
    n_rho: CMat,
    n_sigma: CMat,
}

impl ChannelTriple {
    pub fn new(rho: DensityOperator, sigma: PositiveOperator, channel: Channel) -> Result<Self> {
        if rho.dim() != sigma.dim() || channel.dim_in() != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "rho is {0}x{0}, sigma {1}x{1}, channel input {2}",
                rho.dim(),
                sigma.dim(),
                channel.dim_in()
            )));
        }
        let n_rho = linalg::hermitian_part(&channel.apply(rho.matrix())?);
        let n_sigma = linalg::hermitian_part(&channel.apply(sigma.matrix())?);
        Ok(Self {
            rho,
            sigma,
            channel,
            n_rho,
            n_sigma,
        })
    }

    /// `ρ = ρ_ABC`, `σ = ρ_AC ⊗ I_B`, `N = Tr_A`.
    pub fn from_tripartite(s: &TripartiteState) -> Result<Self> {
        let sigma = PositiveOperator::new(s.lift_ac(s.rho_ac())?, s.dims().to_vec())?;
        let channel = Channel::partial_trace(&s.dims(), &[0])?;
        Self::new(s.state().clone(), sigma, channel)
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn sigma(&self) -> &PositiveOperator {
        &self.sigma
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn n_rho(&self) -> &CMat {
        &self.n_rho
    }

    pub fn n_sigma(&self) -> &CMat {
        &self.n_sigma
    }

    /// `ρ`, `σ`, `N(ρ)`, `N(σ)` all positive definite.
    pub fn require_positive_definite(&self) -> Result<()> {
        let checks = [
            (self.rho.matrix(), "rho"),
            (self.sigma.matrix(), "sigma"),
            (&self.n_rho, "N(rho)"),
            (&self.n_sigma, "N(sigma)"),
        ];
        for (m, name) in checks {
            if !has_full_support(m)? {
                return Err(Error::RankDeficient(name));
            }
        }
        Ok(())
    }

    fn kernel(&self, p_sigma: f64, p_n_sigma: f64, p_n_rho: f64) -> Result<CMat> {
        let s = mpow(self.sigma.matrix(), p_sigma, conv())?;
        let ns = mpow(&self.n_sigma, p_n_sigma, conv())?;
        let nr = mpow(&self.n_rho, p_n_rho, conv())?;
        let inner = self.channel.adjoint_apply(&(&ns * nr * &ns))?;
        Ok(linalg::hermitian_part(&(&s * inner * &s)))
    }

    /// `σ^{(1−α)/2} N†(N(σ)^{(α−1)/2} N(ρ)^{1−α} N(σ)^{(α−1)/2}) σ^{(1−α)/2}`.
    pub fn petz_kernel(&self, alpha: f64) -> Result<CMat> {
        self.kernel((1.0 - alpha) / 2.0, (alpha - 1.0) / 2.0, 1.0 - alpha)
    }

    /// `σ^{(1−α)/2α} N†(N(σ)^{(α−1)/2α} N(ρ)^{(1−α)/α} N(σ)^{(α−1)/2α}) σ^{(1−α)/2α}`.
    pub fn sandwiched_kernel(&self, alpha: f64) -> Result<CMat> {
        let h = (1.0 - alpha) / (2.0 * alpha);
        self.kernel(h, -h, 2.0 * h)
    }

    /// `exp(log σ + N†(log N(ρ) − log N(σ)))` (natural logarithms).
    pub fn log_sum_exp(&self) -> Result<CMat> {
        self.require_positive_definite()?;
        let inner = linalg::mlog(&self.n_rho, conv())? - linalg::mlog(&self.n_sigma, conv())?;
        let l = linalg::mlog(self.sigma.matrix(), conv())? + self.channel.adjoint_apply(&inner)?;
        linalg::mexp(&linalg::hermitian_part(&l))
    }

    /// Petz recovery channel `R_{σ,N}`.
    pub fn petz_map(&self) -> Result<Channel> {
        petz_recovery(&self.sigma, &self.channel, conv())
    }
}

fn check_alpha_pd(alpha: AlphaParameter, pd: impl FnOnce() -> Result<()>) -> Result<()> {
    if alpha.value() > 1.0 {
        pd()?;
    }
    Ok(())
}

/// `I(A;B|C) = H(AC) + H(BC) − H(C) − H(ABC)`.
pub fn von_neumann_cmi(s: &TripartiteState) -> Result<f64> {
    Ok(entropy(s.rho_ac())? + entropy(s.rho_bc())? - entropy(s.rho_c())? - entropy(s.rho_abc())?)
}

/// Petz–Rényi CMI `(1/(α−1)) log₂ Tr{ρ_ABC^α · petz_kernel(α)}`.
pub fn renyi_cmi(s: &TripartiteState, a: AlphaParameter) -> Result<f64> {
    check_alpha_pd(a, || s.require_pd())?;
    let alpha = a.value();
    let q = trace(&(mpow(s.rho_abc(), alpha, conv())? * s.petz_kernel(alpha)?)).re;
    Ok(log2_over(q, alpha - 1.0))
}

/// Sandwiched Rényi CMI `(2α/(α−1)) log₂ ‖ρ_ABC^{1/2} ρ_AC^{(1−α)/2α} ρ_C^{(α−1)/2α} ρ_BC^{(1−α)/2α}‖_{2α}`.
pub fn sandwiched_cmi(s: &TripartiteState, a: AlphaParameter) -> Result<f64> {
    check_alpha_pd(a, || s.require_pd())?;
    let alpha = a.value();
    let h = (1.0 - alpha) / (2.0 * alpha);
    let m = mpow(s.rho_abc(), 0.5, conv())?
        * s.lift_ac(&mpow(s.rho_ac(), h, conv())?)?
        * s.lift_c(&mpow(s.rho_c(), -h, conv())?)
        * s.lift_bc(&mpow(s.rho_bc(), h, conv())?);
    let norm = alpha_norm(&m, 2.0 * alpha);
    Ok(2.0 * alpha * log2_over(norm, alpha - 1.0))
}

fn log2_over(x: f64, denom: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    x.log2() / denom
}

/// `D(ρ‖σ) − D(N(ρ)‖N(σ))`.
pub fn rel_ent_diff(t: &ChannelTriple) -> Result<f64> {
    let before = divergences::rel_entropy(t.rho(), t.sigma())?;
    if before.is_infinite() {
        return Err(Error::InfiniteTerm);
    }
    let after = divergences::rel_entropy(t.n_rho(), t.n_sigma())?;
    Ok(before - after)
}

/// Petz–Rényi relative-entropy difference `(1/(α−1)) log₂ Tr{ρ^α · petz_kernel(α)}`.
pub fn delta_alpha(t: &ChannelTriple, a: AlphaParameter) -> Result<f64> {
    check_alpha_pd(a, || t.require_positive_definite())?;
    let alpha = a.value();
    let q = trace(&(mpow(t.rho().matrix(), alpha, conv())? * t.petz_kernel(alpha)?)).re;
    Ok(log2_over(q, alpha - 1.0))
}

/// `D_α(ρ ‖ petz_kernel(α)^{1/(1−α)})`, the divergence form of [`delta_alpha`].
pub fn delta_alpha_divergence_form(t: &ChannelTriple, a: AlphaParameter) -> Result<f64> {
    check_alpha_pd(a, || t.require_positive_definite())?;
    let alpha = a.value();
    let target = mpow(&t.petz_kernel(alpha)?, 1.0 / (1.0 - alpha), conv())?;
    divergences::renyi_div(t.rho(), &target, a)
}

/// Sandwiched relative-entropy difference `(α/(α−1)) log₂ ‖ρ^{1/2} sandwiched_kernel(α) ρ^{1/2}‖_α`.
pub fn delta_tilde_alpha(t: &ChannelTriple, a: AlphaParameter) -> Result<f64> {
    check_alpha_pd(a, || t.require_positive_definite())?;
    let alpha = a.value();
    let half = mpow(t.rho().matrix(), 0.5, conv())?;
    let x = &half * t.sandwiched_kernel(alpha)? * &half;
    let norm = alpha_norm(&x, alpha);
    Ok(alpha * log2_over(norm, alpha - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinMax {
    Min,
    Max,
}

/// `I_max` through the operator norm, `I_min` through the trace norm.
pub fn minmax_cmi(s: &TripartiteState, kind: MinMax) -> Result<f64> {
    s.require_pd()?;
    let c = conv();
    let (p_outer, p_c) = match kind {
        MinMax::Max => (-0.5, 0.5),
        MinMax::Min => (0.5, -0.5),
    };
    let m = mpow(s.rho_abc(), 0.5, c)?
        * s.lift_ac(&mpow(s.rho_ac(), p_outer, c)?)?
        * s.lift_c(&mpow(s.rho_c(), p_c, c)?)
        * s.lift_bc(&mpow(s.rho_bc(), p_outer, c)?);
    Ok(match kind {
        MinMax::Max => 2.0 * linalg::operator_norm(&m).log2(),
        MinMax::Min => -2.0 * linalg::trace_norm(&m).log2(),
    })
}

/// `D_max` / `D_min` of `ρ_ABC` against `ρ_AC^{1/2} ρ_C^{−1/2} ρ_BC ρ_C^{−1/2} ρ_AC^{1/2}`.
pub fn minmax_cmi_divergence_form(s: &TripartiteState, kind: MinMax) -> Result<f64> {
    s.require_pd()?;
    let rec = s.recovered()?;
    match kind {
        MinMax::Max => divergences::d_max(s.rho_abc(), &rec),
        MinMax::Min => divergences::d_min(s.rho_abc(), &rec),
    }
}

/// `D_min` / `D_max` of `ρ` against `R_{σ,N}(N(ρ))`.
pub fn minmax_delta(t: &ChannelTriple, kind: MinMax) -> Result<f64> {
    let strict = t.channel().strictness()?;
    if strict <= STRICT_TOL {
        return Err(Error::NotStrict(strict));
    }
    for (m, name) in [(t.rho().matrix(), "rho"), (t.sigma().matrix(), "sigma")] {
        if !has_full_support(m)? {
            return Err(Error::RankDeficient(name));
        }
    }
    let recovered = linalg::hermitian_part(&t.petz_map()?.apply(t.n_rho())?);
    match kind {
        MinMax::Max => divergences::d_max(t.rho(), &recovered),
        MinMax::Min => divergences::d_min(t.rho(), &recovered),
    }
}

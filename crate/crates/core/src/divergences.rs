//! Relative entropies between a state and a positive operator, in bits.
//!
//! An infinite divergence is returned as `f64::INFINITY`, never as an error.

use crate::error::{Error, Result};
use crate::linalg::{self, eig, mlog, mpow, trace, CMat, SupportConvention};
use crate::objects::{fidelity, Operator};

/// Support-inclusion slack: `Tr{(I − Π_σ) ρ} ≤ SUPPORT_TOL · Tr{ρ}` counts as contained.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Rényi parameters closer than this to 1 are rejected.
pub const ALPHA_ONE_GAP: f64 = 1e-6;

/// Rényi order `α > 0`, `α ≠ 1`, with `γ = (2α − 1)/α` kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParameter {
    alpha: f64,
    gamma: f64,
}

impl AlphaParameter {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::BadAlpha(alpha, "must be a finite positive number"));
        }
        if (alpha - 1.0).abs() < ALPHA_ONE_GAP {
            return Err(Error::BadAlpha(alpha, "too close to 1; use the von Neumann quantity"));
        }
        Ok(Self {
            alpha,
            gamma: (2.0 * alpha - 1.0) / alpha,
        })
    }

    pub fn value(&self) -> f64 {
        self.alpha
    }

    /// `(2α − 1)/α`, the order paired with `α` in the sandwiched-to-Petz bound.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Non-negativity range of the Petz family: `(0,1) ∪ (1,2)`.
    pub fn in_petz_range(&self) -> bool {
        self.alpha < 2.0
    }

    /// Non-negativity range of the sandwiched family: `(1/2,1) ∪ (1,∞)`.
    pub fn in_sandwiched_range(&self) -> bool {
        self.alpha > 0.5
    }

    /// Data processing holds for `D_α` on `(0,1) ∪ (1,2]`.
    pub fn petz_monotone(&self) -> bool {
        self.alpha <= 2.0
    }

    /// Data processing holds for `D̃_α` on `[1/2,1) ∪ (1,∞)`.
    pub fn sandwiched_monotone(&self) -> bool {
        self.alpha >= 0.5
    }
}

fn same_shape(a: &CMat, b: &CMat) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// Whether `supp(ρ) ⊆ supp(σ)`.
pub fn support_contained(rho: &CMat, sigma: &CMat, conv: SupportConvention) -> Result<bool> {
    same_shape(rho, sigma)?;
    let n = sigma.nrows();
    let outside = linalg::identity(n) - linalg::support_projector(sigma, conv)?;
    let leak = trace(&(outside * rho)).re;
    Ok(leak <= SUPPORT_TOL * trace(rho).re.abs().max(f64::MIN_POSITIVE))
}

fn log2_ratio(q: f64, alpha: f64) -> f64 {
    if q <= 0.0 {
        return f64::INFINITY;
    }
    q.log2() / (alpha - 1.0)
}

/// `D(ρ‖σ) = Tr{ρ(log₂ρ − log₂σ)}`, `+∞` if `supp ρ ⊄ supp σ`.
pub fn rel_entropy(rho: &impl Operator, sigma: &impl Operator) -> Result<f64> {
    let (r, s) = (rho.mat(), sigma.mat());
    let conv = SupportConvention::default();
    if !support_contained(r, s, conv)? {
        return Ok(f64::INFINITY);
    }
    let diff = mlog(r, conv)? - mlog(s, conv)?;
    Ok(trace(&(r * diff)).re / std::f64::consts::LN_2)
}

/// `Tr{ρ^α σ^{1−α}}`.
pub fn renyi_trace(rho: &CMat, sigma: &CMat, alpha: f64) -> Result<f64> {
    same_shape(rho, sigma)?;
    let conv = SupportConvention::default();
    Ok(trace(&(mpow(rho, alpha, conv)? * mpow(sigma, 1.0 - alpha, conv)?)).re)
}

/// Petz–Rényi divergence `(1/(α−1)) log₂ Tr{ρ^α σ^{1−α}}`.
pub fn renyi_div(rho: &impl Operator, sigma: &impl Operator, a: AlphaParameter) -> Result<f64> {
    let (r, s) = (rho.mat(), sigma.mat());
    let alpha = a.value();
    if alpha > 1.0 && !support_contained(r, s, SupportConvention::default())? {
        return Ok(f64::INFINITY);
    }
    Ok(log2_ratio(renyi_trace(r, s, alpha)?, alpha))
}

/// `Tr{(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α}`.
pub fn sandwiched_trace(rho: &CMat, sigma: &CMat, alpha: f64) -> Result<f64> {
    same_shape(rho, sigma)?;
    let conv = SupportConvention::default();
    let s = mpow(sigma, (1.0 - alpha) / (2.0 * alpha), conv)?;
    let inner = &s * rho * &s;
    let spec = eig(&inner)?;
    let cut = conv.relative_cutoff() * spec.max_eigenvalue();
    Ok(spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|l| l.powf(alpha))
        .sum())
}

/// Sandwiched Rényi divergence `(1/(α−1)) log₂ Tr{(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α}`.
pub fn sandwiched_div(rho: &impl Operator, sigma: &impl Operator, a: AlphaParameter) -> Result<f64> {
    let (r, s) = (rho.mat(), sigma.mat());
    let alpha = a.value();
    if alpha > 1.0 && !support_contained(r, s, SupportConvention::default())? {
        return Ok(f64::INFINITY);
    }
    Ok(log2_ratio(sandwiched_trace(r, s, alpha)?, alpha))
}

/// `D_min(ρ‖σ) = −log₂ F(ρ, σ)`.
pub fn d_min(rho: &impl Operator, sigma: &impl Operator) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok(if f <= 0.0 { f64::INFINITY } else { -f.log2() })
}

/// `D_max(ρ‖σ) = log₂ λ_max(σ^{−1/2} ρ σ^{−1/2})`, `+∞` if `supp ρ ⊄ supp σ`.
pub fn d_max(rho: &impl Operator, sigma: &impl Operator) -> Result<f64> {
    let (r, s) = (rho.mat(), sigma.mat());
    let conv = SupportConvention::default();
    if !support_contained(r, s, conv)? {
        return Ok(f64::INFINITY);
    }
    let w = mpow(s, -0.5, conv)?;
    let top = eig(&(&w * r * &w))?.max_eigenvalue();
    Ok(if top <= 0.0 { f64::NEG_INFINITY } else { top.log2() })
}

/// `x log₂ x` with the continuous extension `0 ↦ 0`.
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Petz f-divergence `⟨Γ|(√B⊗I) f(B⁻¹⊗Aᵀ) (√B⊗I)|Γ⟩`, `|Γ⟩ = Σ_k |k⟩|k⟩`.
///
/// Evaluated through the joint eigenbasis `{u_i ⊗ v_j}` of `B⁻¹ ⊗ Aᵀ`: the
/// weight of `f(ν_j / b_i)` is `b_i |u_iᵀ v_j|²`. `f` is used with its sign
/// exactly as given and must be finite at `0` when `A` is singular.
pub fn f_divergence(a: &impl Operator, b: &impl Operator, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (a, b) = (a.mat(), b.mat());
    same_shape(a, b)?;
    let b_spec = eig(b)?;
    let b_max = b_spec.max_eigenvalue();
    if b_spec.min_eigenvalue() <= 1e-14 * b_max.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularB);
    }
    let at_spec = eig(&a.transpose())?;
    let n = a.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let b_i = b_spec.eigenvalues[i];
        let u = b_spec.eigenvectors.column(i);
        for j in 0..n {
            let nu = at_spec.eigenvalues[j].max(0.0);
            let v = at_spec.eigenvectors.column(j);
            let overlap: linalg::C64 = u.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            let weight = b_i * overlap.norm_sqr();
            if weight == 0.0 {
                continue;
            }
            let fx = f(nu / b_i);
            if !fx.is_finite() {
                return Err(Error::Domain(nu / b_i));
            }
            total += weight * fx;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, ket_bra};
    use crate::objects::{random_density, seeded_rng, Channel};

    fn alpha(a: f64) -> AlphaParameter {
        AlphaParameter::new(a).unwrap()
    }

    #[test]
    fn alpha_parameter_validation() {
        assert!(AlphaParameter::new(0.0).is_err());
        assert!(AlphaParameter::new(-1.0).is_err());
        assert!(AlphaParameter::new(1.0 + 5e-7).is_err());
        assert!(AlphaParameter::new(f64::NAN).is_err());
        let a = alpha(2.0);
        assert_eq!(a.gamma(), 1.5);
        assert!(!a.in_petz_range() && a.petz_monotone() && a.in_sandwiched_range());
        let h = alpha(0.5);
        assert!(!h.in_sandwiched_range() && h.sandwiched_monotone());
        assert_eq!(h.gamma(), 0.0);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_density(&[3], 3, 1).unwrap();
        assert!(rel_entropy(&rho, &rho).unwrap().abs() < 1e-12);
        let p = diag(&[0.5, 0.5]);
        let q = diag(&[0.25, 0.75]);
        let kl = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
        assert!((rel_entropy(&p, &q).unwrap() - kl).abs() < 1e-12);
        assert!((kl - 0.207_518_749_639_422).abs() < 1e-12);
        let zero = diag(&[1.0, 0.0]);
        let one = diag(&[0.0, 1.0]);
        assert_eq!(rel_entropy(&zero, &one).unwrap(), f64::INFINITY);
        assert!(rel_entropy(&zero, &diag(&[1., 0., 0.])).is_err());
    }

    #[test]
    fn renyi_examples() {
        let rho = random_density(&[3], 3, 2).unwrap();
        for a in [0.3, 0.7, 1.5, 2.0] {
            assert!(renyi_div(&rho, &rho, alpha(a)).unwrap().abs() < 1e-12);
            assert!(sandwiched_div(&rho, &rho, alpha(a)).unwrap().abs() < 1e-12);
        }
        let p = diag(&[0.5, 0.5]);
        let q = diag(&[0.25, 0.75]);
        let expect = (0.25 / 0.25 + 0.25 / 0.75f64).log2();
        assert!((renyi_div(&p, &q, alpha(2.0)).unwrap() - expect).abs() < 1e-12);
        assert!((expect - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert_eq!(
            renyi_div(&diag(&[1., 0.]), &diag(&[0., 1.]), alpha(2.0)).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            renyi_div(&diag(&[1., 0.]), &diag(&[0., 1.]), alpha(0.5)).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn renyi_limits_to_relative_entropy() {
        let rho = random_density(&[3], 3, 3).unwrap();
        let sigma = random_density(&[3], 3, 4).unwrap();
        let d = rel_entropy(&rho, &sigma).unwrap();
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((renyi_div(&rho, &sigma, alpha(a)).unwrap() - d).abs() < 1e-3);
            assert!((sandwiched_div(&rho, &sigma, alpha(a)).unwrap() - d).abs() < 1e-3);
        }
    }

    #[test]
    fn sandwiched_equals_petz_on_commuting_pairs() {
        let p = diag(&[0.1, 0.2, 0.7]);
        let q = diag(&[0.3, 0.3, 0.4]);
        for a in [0.6, 0.9, 1.5, 3.0] {
            let x = sandwiched_div(&p, &q, alpha(a)).unwrap();
            let y = renyi_div(&p, &q, alpha(a)).unwrap();
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn min_and_max_examples() {
        let rho = random_density(&[2], 2, 5).unwrap();
        assert!(d_min(&rho, &rho).unwrap().abs() < 1e-12);
        assert!(d_max(&rho, &rho).unwrap().abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = ket_bra(&[c(1., 0.), c(0., 0.)]);
        let plus = ket_bra(&[c(s, 0.), c(s, 0.)]);
        assert!((d_min(&zero, &plus).unwrap() - 1.0).abs() < 1e-12);
        let dm = d_max(&diag(&[0.5, 0.5]), &diag(&[0.25, 0.75])).unwrap();
        assert!((dm - 1.0).abs() < 1e-12);
        assert_eq!(d_max(&zero, &diag(&[0., 1.])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn d_min_is_half_sandwiched() {
        for seed in 0..10 {
            let rho = random_density(&[3], 3, seed).unwrap();
            let sigma = random_density(&[3], 2, seed + 100).unwrap();
            let a = d_min(&rho, &sigma).unwrap();
            let b = sandwiched_div(&rho, &sigma, alpha(0.5)).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn d_max_is_tight() {
        for seed in 0..10 {
            let rho = random_density(&[3], 3, seed).unwrap();
            let sigma = random_density(&[3], 3, seed + 50).unwrap();
            let dm = d_max(&rho, &sigma).unwrap();
            let gap =
                |lam: f64| linalg::min_eigenvalue(&(sigma.matrix().scale(2f64.powf(lam)) - rho.matrix())).unwrap();
            assert!(gap(dm) >= -1e-12);
            assert!(gap(dm - 0.01) < 0.0);
        }
    }

    #[test]
    fn f_divergence_examples() {
        let p = diag(&[0.5, 0.5]);
        let q = diag(&[0.25, 0.75]);
        let kl = rel_entropy(&p, &q).unwrap();
        assert!((f_divergence(&p, &q, xlog2x).unwrap() - kl).abs() < 1e-12);
        let sq = f_divergence(&p, &q, |x| x * x).unwrap();
        assert!((sq - 4.0 / 3.0).abs() < 1e-12);
        let a = random_density(&[3], 2, 7).unwrap();
        let b = random_density(&[3], 3, 8).unwrap();
        assert!((f_divergence(&a, &b, |x| x).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            f_divergence(&a, &diag(&[1., 0., 0.]), |x| x),
            Err(Error::SingularB)
        ));
    }

    #[test]
    fn f_divergence_reproduces_renyi_trace_and_relative_entropy() {
        for seed in 0..10 {
            let rho = random_density(&[3], 3, seed).unwrap();
            let sigma = random_density(&[3], 3, seed + 20).unwrap();
            for a in [0.3, 0.8, 1.4, 1.9] {
                let f = f_divergence(&rho, &sigma, |x| x.powf(a)).unwrap();
                let expect = 2f64.powf((a - 1.0) * renyi_div(&rho, &sigma, alpha(a)).unwrap());
                assert!(((f - expect) / expect).abs() < 1e-9);
            }
            let d = rel_entropy(&rho, &sigma).unwrap();
            assert!((f_divergence(&rho, &sigma, xlog2x).unwrap() - d).abs() < 1e-10);
        }
    }

    #[test]
    fn nonnegativity_and_positivity_away_from_equality() {
        for seed in 0..20 {
            let omega = random_density(&[3], 3, seed).unwrap();
            let tau = random_density(&[3], 3, seed + 1000).unwrap();
            let dist = 0.5 * linalg::trace_norm(&(omega.matrix() - tau.matrix()));
            for a in [0.3, 0.7, 1.3, 1.8] {
                let v = renyi_div(&omega, &tau, alpha(a)).unwrap();
                assert!(v >= -1e-10);
                if dist >= 0.1 {
                    assert!(v > 1e-6);
                }
            }
            for a in [0.6, 0.9, 1.5, 4.0] {
                assert!(sandwiched_div(&omega, &tau, alpha(a)).unwrap() >= -1e-10);
            }
            assert!(d_min(&omega, &tau).unwrap() >= -1e-10);
            assert!(d_max(&omega, &tau).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn data_processing_on_random_channels() {
        let mut rng = seeded_rng(77);
        for seed in 0..10 {
            let rho = random_density(&[4], 4, seed).unwrap();
            let sigma = random_density(&[4], 4, seed + 40).unwrap();
            let ch = Channel::random(4, 3, 3, &mut rng);
            let nr = ch.apply(rho.matrix()).unwrap();
            let ns = ch.apply(sigma.matrix()).unwrap();
            for a in [0.25, 0.75, 1.5, 2.0] {
                let before = renyi_div(&rho, &sigma, alpha(a)).unwrap();
                let after = renyi_div(&nr, &ns, alpha(a)).unwrap();
                assert!(after <= before + 1e-9);
            }
            for a in [0.5, 0.8, 2.0, 5.0] {
                let before = sandwiched_div(&rho, &sigma, alpha(a)).unwrap();
                let after = sandwiched_div(&nr, &ns, alpha(a)).unwrap();
                assert!(after <= before + 1e-9);
            }
        }
    }
}

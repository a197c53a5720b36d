//! Short quantum Markov chains and sufficient channel triples built from block
//! decompositions, plus Petz-recovery certifiers.
//!
//! Blocks occupy contiguous computational-basis ranges in spec order, so every
//! constructed object is reproducible bit for bit.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, identity, kron, max_abs, mlog, operator_norm, permute_subsystems, trace_norm, CMat, SupportConvention,
};
use crate::measures::{has_full_support, ChannelTriple, TripartiteState};
use crate::objects::{
    perturb_positive, random_density_with, random_unitary, validate_density, Channel, DensityOperator, Operator,
    PositiveOperator, STATE_TOL,
};

/// Tolerance on the weight normalization.
pub const WEIGHT_TOL: f64 = 1e-12;

/// One block `q · ρ_{A C_L} ⊗ ρ_{C_R B}`.
#[derive(Debug, Clone)]
pub struct MarkovBlock {
    pub weight: f64,
    /// State on `A ⊗ C_L`, dims `[d_A, d_CL]`.
    pub rho_acl: DensityOperator,
    /// State on `C_R ⊗ B`, dims `[d_CR, d_B]`.
    pub rho_crb: DensityOperator,
}

impl MarkovBlock {
    pub fn d_cl(&self) -> usize {
        self.rho_acl.dims()[1]
    }

    pub fn d_cr(&self) -> usize {
        self.rho_crb.dims()[0]
    }
}

#[derive(Debug, Clone)]
pub struct MarkovBlockSpec {
    d_a: usize,
    d_b: usize,
    blocks: Vec<MarkovBlock>,
}

fn check_weights(w: impl Iterator<Item = f64>, name: &str) -> Result<()> {
    let mut sum = 0.0;
    for x in w {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::InconsistentDims(format!("{name} weight {x} outside (0, 1]")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InconsistentDims(format!("{name} weights sum to {sum}")));
    }
    Ok(())
}

impl MarkovBlockSpec {
    pub fn new(blocks: Vec<MarkovBlock>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InconsistentDims("no blocks".into()))?;
        if first.rho_acl.dims().len() != 2 || first.rho_crb.dims().len() != 2 {
            return Err(Error::InconsistentDims("block states need two factors".into()));
        }
        let d_a = first.rho_acl.dims()[0];
        let d_b = first.rho_crb.dims()[1];
        for (j, b) in blocks.iter().enumerate() {
            let (ad, bd) = (b.rho_acl.dims(), b.rho_crb.dims());
            if ad.len() != 2 || bd.len() != 2 || ad[0] != d_a || bd[1] != d_b {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: dims {ad:?} and {bd:?} do not match d_A = {d_a}, d_B = {d_b}"
                )));
            }
        }
        check_weights(blocks.iter().map(|b| b.weight), "block")?;
        Ok(Self { d_a, d_b, blocks })
    }

    pub fn blocks(&self) -> &[MarkovBlock] {
        &self.blocks
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Applies `perturb_positive` to every block state, which keeps the chain exactly Markov.
    pub fn perturbed(&self, eps: f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| MarkovBlock {
                weight: b.weight,
                rho_acl: perturb_positive(&b.rho_acl, eps),
                rho_crb: perturb_positive(&b.rho_crb, eps),
            })
            .collect();
        Self {
            d_a: self.d_a,
            d_b: self.d_b,
            blocks,
        }
    }

    /// `Σ_j d_CL · d_CR`.
    pub fn d_c(&self) -> usize {
        self.blocks.iter().map(|b| b.d_cl() * b.d_cr()).sum()
    }
}

/// `ρ_ABC = ⊕_j q(j) ρ_{A C_Lj} ⊗ ρ_{C_Rj B}` with `C = ⊕_j C_Lj ⊗ C_Rj`.
pub fn build_markov_chain(spec: &MarkovBlockSpec) -> Result<TripartiteState> {
    let (da, db, dc) = (spec.d_a, spec.d_b, spec.d_c());
    let mut m = CMat::zeros(da * db * dc, da * db * dc);
    let mut offset = 0;
    for b in &spec.blocks {
        let (dl, dr) = (b.d_cl(), b.d_cr());
        let dcj = dl * dr;
        let local = permute_subsystems(
            &kron(b.rho_acl.matrix(), b.rho_crb.matrix()),
            &[da, dl, dr, db],
            &[0, 3, 1, 2],
        )?;
        let embed = |i: usize| {
            let (ab, c) = (i / dcj, i % dcj);
            ab * dc + offset + c
        };
        for i in 0..da * db * dcj {
            for k in 0..da * db * dcj {
                m[(embed(i), embed(k))] = local[(i, k)] * b.weight;
            }
        }
        offset += dcj;
    }
    TripartiteState::new(validate_density(&m, &[da, db, dc], STATE_TOL)?)
}

/// One block of a sufficient triple.
#[derive(Debug, Clone)]
pub struct SufficiencyBlock {
    pub p: f64,
    pub q: f64,
    pub rho_l: DensityOperator,
    pub sigma_l: PositiveOperator,
    pub tau_r: DensityOperator,
    /// Unitary `H_L → K_L`.
    pub u: CMat,
    pub n_r: Channel,
}

impl SufficiencyBlock {
    pub fn d_l(&self) -> usize {
        self.rho_l.dim()
    }

    pub fn d_r(&self) -> usize {
        self.tau_r.dim()
    }

    pub fn d_r_out(&self) -> usize {
        self.n_r.dim_out()
    }
}

#[derive(Debug, Clone)]
pub struct SufficiencyBlockSpec {
    blocks: Vec<SufficiencyBlock>,
}

impl SufficiencyBlockSpec {
    pub fn new(blocks: Vec<SufficiencyBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InconsistentDims("no blocks".into()));
        }
        for (j, b) in blocks.iter().enumerate() {
            let dl = b.d_l();
            if b.sigma_l.dim() != dl || b.u.nrows() != dl || b.u.ncols() != dl {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: rho_L is {dl}-dimensional, sigma_L {}, U {}x{}",
                    b.sigma_l.dim(),
                    b.u.nrows(),
                    b.u.ncols()
                )));
            }
            if b.n_r.dim_in() != b.d_r() {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: tau_R is {}-dimensional, channel input {}",
                    b.d_r(),
                    b.n_r.dim_in()
                )));
            }
            let unitarity = max_abs(&(b.u.adjoint() * &b.u - identity(dl)));
            if unitarity > 1e-10 {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: U is not unitary (residual {unitarity:.3e})"
                )));
            }
            if !(b.q > 0.0 && b.q.is_finite()) {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: q = {} is not positive",
                    b.q
                )));
            }
            if !has_full_support(b.sigma_l.matrix())? {
                return Err(Error::InconsistentDims(format!(
                    "block {j}: sigma_L is not positive definite"
                )));
            }
        }
        check_weights(blocks.iter().map(|b| b.p), "p")?;
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[SufficiencyBlock] {
        &self.blocks
    }

    pub fn dim_in(&self) -> usize {
        self.blocks.iter().map(|b| b.d_l() * b.d_r()).sum()
    }

    pub fn dim_out(&self) -> usize {
        self.blocks.iter().map(|b| b.d_l() * b.d_r_out()).sum()
    }
}

fn place(target: &mut CMat, block: &CMat, row: usize, col: usize) {
    target
        .view_mut((row, col), (block.nrows(), block.ncols()))
        .copy_from(block);
}

/// `ρ = ⊕ p ρ_L ⊗ τ_R`, `σ = ⊕ q σ_L ⊗ τ_R`, `N = ⊕ U(·)U† ⊗ N_R`.
pub fn build_sufficiency_triple(spec: &SufficiencyBlockSpec) -> Result<ChannelTriple> {
    let (din, dout) = (spec.dim_in(), spec.dim_out());
    let mut rho = CMat::zeros(din, din);
    let mut sigma = CMat::zeros(din, din);
    let mut kraus = Vec::new();
    let (mut off_in, mut off_out) = (0, 0);
    for b in &spec.blocks {
        let r = kron(b.rho_l.matrix(), b.tau_r.matrix()).scale(b.p);
        let s = kron(b.sigma_l.matrix(), b.tau_r.matrix()).scale(b.q);
        place(&mut rho, &r, off_in, off_in);
        place(&mut sigma, &s, off_in, off_in);
        for k in b.n_r.kraus() {
            let mut full = CMat::zeros(dout, din);
            place(&mut full, &kron(&b.u, k), off_out, off_in);
            kraus.push(full);
        }
        off_in += b.d_l() * b.d_r();
        off_out += b.d_l() * b.d_r_out();
    }
    let rho = validate_density(&rho, &[], STATE_TOL)?;
    let sigma = PositiveOperator::new(linalg::hermitian_part(&sigma), vec![])?;
    ChannelTriple::new(rho, sigma, Channel::new(kraus)?)
}

/// `‖ρ_AC^{1/2} ρ_C^{−1/2} ρ_BC ρ_C^{−1/2} ρ_AC^{1/2} − ρ_ABC‖₁` against `tol`.
pub fn is_markov_petz(s: &TripartiteState, tol: f64) -> Result<(bool, f64)> {
    let d = trace_norm(&(s.recovered()? - s.rho_abc()));
    Ok((d <= tol, d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficiencyCheck {
    pub pass: bool,
    pub rho_distance: f64,
    pub sigma_distance: f64,
}

/// Trace distances of `(R∘N)(ρ)` and `(R∘N)(σ)` from `ρ` and `σ`, with `R` the Petz map.
pub fn is_sufficient_petz(t: &ChannelTriple, tol: f64) -> Result<SufficiencyCheck> {
    let r = t.petz_map()?;
    let rho_distance = trace_norm(&(r.apply(t.n_rho())? - t.rho().matrix()));
    let sigma_distance = trace_norm(&(r.apply(t.n_sigma())? - t.sigma().matrix()));
    Ok(SufficiencyCheck {
        pass: rho_distance <= tol && sigma_distance <= tol,
        rho_distance,
        sigma_distance,
    })
}

/// `‖N†[log₂N(ρ) − log₂N(σ)] − (log₂ρ − log₂σ)‖_∞` against `tol`.
pub fn log_identity_check(t: &ChannelTriple, tol: f64) -> Result<(bool, f64)> {
    t.require_positive_definite()?;
    let conv = SupportConvention::default();
    let log2 = |m: &CMat| mlog(m, conv).map(|l| l.unscale(LN_2));
    let out = log2(t.n_rho())? - log2(t.n_sigma())?;
    let inp = log2(t.rho().matrix())? - log2(t.sigma().matrix())?;
    let residual = operator_norm(&(t.channel().adjoint_apply(&out)? - inp));
    Ok((residual <= tol, residual))
}

/// Random Markov spec; `shapes` lists `(d_CL, d_CR)` per block, block states have full rank.
pub fn random_markov_spec(
    d_a: usize,
    d_b: usize,
    shapes: &[(usize, usize)],
    rng: &mut impl Rng,
) -> Result<MarkovBlockSpec> {
    let weights = random_weights(shapes.len(), rng);
    let blocks = shapes
        .iter()
        .zip(weights)
        .map(|(&(dl, dr), weight)| {
            Ok(MarkovBlock {
                weight,
                rho_acl: random_density_with(&[d_a, dl], d_a * dl, rng)?,
                rho_crb: random_density_with(&[dr, d_b], dr * d_b, rng)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MarkovBlockSpec::new(blocks)
}

/// Random sufficiency spec; `shapes` lists `(d_L, d_R, d_R')` per block.
///
/// Every local state is full rank and every `N_R` is a random strict channel,
/// so the resulting triple is positive definite on both sides.
pub fn random_sufficiency_spec(shapes: &[(usize, usize, usize)], rng: &mut impl Rng) -> Result<SufficiencyBlockSpec> {
    let weights = random_weights(shapes.len(), rng);
    let blocks = shapes
        .iter()
        .zip(weights)
        .map(|(&(dl, dr, dro), p)| {
            let q = 0.2 + rng.random::<f64>();
            let sigma_l = random_density_with(&[dl], dl, rng)?.as_positive();
            Ok(SufficiencyBlock {
                p,
                q,
                rho_l: random_density_with(&[dl], dl, rng)?,
                sigma_l,
                tau_r: random_density_with(&[dr], dr, rng)?,
                u: random_unitary(dl, rng),
                n_r: random_strict_channel(dr, dro, rng),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SufficiencyBlockSpec::new(blocks)
}

/// Random channel with `d_in · d_out` Kraus operators, redrawn until `λ_min(N(I)) > 1e-3`.
pub fn random_strict_channel(d_in: usize, d_out: usize, rng: &mut impl Rng) -> Channel {
    loop {
        let ch = Channel::random(d_in, d_out, d_in * d_out, rng);
        if ch.strictness().map(|s| s > 1e-3).unwrap_or(false) {
            return ch;
        }
    }
}

fn random_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // put the rounding error on the last weight so the sum is 1 to the last bit
    let head: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - head;
    w
}

/// Full-rank `ρ`, `σ` and a strict channel whose Petz round trip misses `ρ` by at least `min_distance`.
pub fn random_non_sufficient_triple(
    d_in: usize,
    d_out: usize,
    min_distance: f64,
    rng: &mut impl Rng,
) -> Result<ChannelTriple> {
    loop {
        let rho = random_density_with(&[d_in], d_in, rng)?;
        let sigma = random_density_with(&[d_in], d_in, rng)?.as_positive();
        let t = ChannelTriple::new(rho, sigma, random_strict_channel(d_in, d_out, rng))?;
        if is_sufficient_petz(&t, 0.0)?.rho_distance >= min_distance {
            return Ok(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::AlphaParameter;
    use crate::measures::{
        delta_alpha, delta_tilde_alpha, minmax_cmi, minmax_delta, rel_ent_diff, renyi_cmi, sandwiched_cmi,
        von_neumann_cmi, MinMax,
    };
    use crate::objects::{classical_state, random_density, seeded_rng};

    const PETZ: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];
    const SAND: [f64; 7] = [0.6, 0.75, 0.9, 1.5, 2.0, 3.0, 5.0];

    fn alpha(a: f64) -> AlphaParameter {
        AlphaParameter::new(a).unwrap()
    }

    #[test]
    fn single_product_block_gives_product_state() {
        let ra = random_density(&[2], 2, 1).unwrap();
        let rcl = random_density(&[2], 2, 2).unwrap();
        let rcr = random_density(&[3], 3, 3).unwrap();
        let rb = random_density(&[2], 2, 4).unwrap();
        let acl = validate_density(&kron(ra.matrix(), rcl.matrix()), &[2, 2], 1e-10).unwrap();
        let crb = validate_density(&kron(rcr.matrix(), rb.matrix()), &[3, 2], 1e-10).unwrap();
        let spec = MarkovBlockSpec::new(vec![MarkovBlock {
            weight: 1.0,
            rho_acl: acl,
            rho_crb: crb,
        }])
        .unwrap();
        let s = build_markov_chain(&spec).unwrap();
        let expect = linalg::kron_all([ra.matrix(), rb.matrix(), rcl.matrix(), rcr.matrix()]);
        assert!(max_abs(&(s.rho_abc() - expect)) < 1e-14);
        assert_eq!(s.dims(), [2, 2, 6]);
    }

    #[test]
    fn trivial_block_dims_give_classical_mixture() {
        // C labels the block; CMI of a classical mixture with A and B independent given C is 0,
        // and the independent oracle on the label distribution agrees
        let pa = [[0.3, 0.7], [0.9, 0.1]];
        let pb = [[0.5, 0.5], [0.2, 0.8]];
        let q = [0.4, 0.6];
        let blocks = (0..2)
            .map(|j| MarkovBlock {
                weight: q[j],
                rho_acl: classical_state(&pa[j], &[2, 1]).unwrap(),
                rho_crb: classical_state(&pb[j], &[1, 2]).unwrap(),
            })
            .collect();
        let s = build_markov_chain(&MarkovBlockSpec::new(blocks).unwrap()).unwrap();
        let mut joint = [[[0.0; 2]; 2]; 2];
        for (j, qj) in q.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    joint[a][b][j] = qj * pa[j][a] * pb[j][b];
                    let idx = (a * 2 + b) * 2 + j;
                    assert!((s.rho_abc()[(idx, idx)].re - joint[a][b][j]).abs() < 1e-15);
                }
            }
        }
        let h = |v: &[f64]| -> f64 { v.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum() };
        let mut ac = vec![0.0; 4];
        let mut bc = vec![0.0; 4];
        let mut c = vec![0.0; 2];
        let mut abc = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for j in 0..2 {
                    let x = joint[a][b][j];
                    ac[a * 2 + j] += x;
                    bc[b * 2 + j] += x;
                    c[j] += x;
                    abc.push(x);
                }
            }
        }
        let oracle = h(&ac) + h(&bc) - h(&c) - h(&abc);
        assert!((von_neumann_cmi(&s).unwrap() - oracle).abs() < 1e-12);
        assert!(oracle.abs() < 1e-12);
    }

    #[test]
    fn markov_chains_vanish() {
        let mut rng = seeded_rng(11);
        for _ in 0..3 {
            let spec = random_markov_spec(2, 2, &[(1, 2), (2, 1)], &mut rng).unwrap();
            let s = build_markov_chain(&spec).unwrap();
            assert!(s.is_positive_definite().unwrap());
            assert!(von_neumann_cmi(&s).unwrap().abs() < 1e-9);
            let (ok, d) = is_markov_petz(&s, 1e-9).unwrap();
            assert!(ok, "distance {d}");
            for a in PETZ {
                assert!(renyi_cmi(&s, alpha(a)).unwrap().abs() < 1e-8);
            }
            for a in SAND {
                assert!(sandwiched_cmi(&s, alpha(a)).unwrap().abs() < 1e-8);
            }
            for kind in [MinMax::Min, MinMax::Max] {
                assert!(minmax_cmi(&s, kind).unwrap().abs() < 1e-8);
            }
            let t = ChannelTriple::from_tripartite(&s).unwrap();
            assert!(log_identity_check(&t, 1e-8).unwrap().0);
        }
    }

    #[test]
    fn perturbed_rank_deficient_markov_chain() {
        let mut rng = seeded_rng(5);
        let blocks = vec![
            MarkovBlock {
                weight: 0.5,
                rho_acl: random_density_with(&[2, 2], 1, &mut rng).unwrap(),
                rho_crb: random_density_with(&[1, 2], 2, &mut rng).unwrap(),
            },
            MarkovBlock {
                weight: 0.5,
                rho_acl: random_density_with(&[2, 1], 2, &mut rng).unwrap(),
                rho_crb: random_density_with(&[2, 2], 1, &mut rng).unwrap(),
            },
        ];
        let spec = MarkovBlockSpec::new(blocks).unwrap();
        let s = build_markov_chain(&spec).unwrap();
        assert!(is_markov_petz(&s, 1e-9).unwrap().0);
        assert!(!s.is_positive_definite().unwrap());
        let p = build_markov_chain(&spec.perturbed(1e-8)).unwrap();
        assert!(p.is_positive_definite().unwrap());
        let t = ChannelTriple::from_tripartite(&p).unwrap();
        let (_, r) = log_identity_check(&t, 1e-4).unwrap();
        assert!(r <= 1e-4, "residual {r}");
    }

    #[test]
    fn globally_perturbed_markov_chain_is_nearly_markov() {
        let mut rng = seeded_rng(6);
        let spec = random_markov_spec(2, 2, &[(1, 2), (2, 1)], &mut rng).unwrap();
        let s = build_markov_chain(&spec).unwrap();
        let p = TripartiteState::new(crate::objects::perturb_positive(s.state(), 1e-6)).unwrap();
        for kind in [MinMax::Min, MinMax::Max] {
            let v = minmax_cmi(&p, kind).unwrap();
            assert!((-1e-9..=1e-4).contains(&v), "{kind:?}: {v}");
        }
    }

    #[test]
    fn markov_petz_negative_and_product_cases() {
        let mut p = vec![0.0; 8];
        p[0] = 0.5;
        p[6] = 0.5;
        let corr = TripartiteState::new(classical_state(&p, &[2, 2, 2]).unwrap()).unwrap();
        let (ok, d) = is_markov_petz(&corr, 1e-9).unwrap();
        assert!(!ok && d > 0.1);
        let m = linalg::kron_all([
            random_density(&[2], 2, 1).unwrap().matrix(),
            random_density(&[3], 3, 2).unwrap().matrix(),
            random_density(&[2], 2, 3).unwrap().matrix(),
        ]);
        let prod = TripartiteState::new(validate_density(&m, &[2, 3, 2], 1e-10).unwrap()).unwrap();
        assert!(is_markov_petz(&prod, 1e-12).unwrap().1 <= 1e-12);
    }

    #[test]
    fn rejects_inconsistent_specs() {
        let a = random_density(&[2, 1], 2, 1).unwrap();
        let b = random_density(&[1, 3], 3, 1).unwrap();
        let b2 = random_density(&[1, 2], 2, 1).unwrap();
        let bad = MarkovBlockSpec::new(vec![
            MarkovBlock {
                weight: 0.5,
                rho_acl: a.clone(),
                rho_crb: b,
            },
            MarkovBlock {
                weight: 0.5,
                rho_acl: a.clone(),
                rho_crb: b2.clone(),
            },
        ]);
        assert!(matches!(bad, Err(Error::InconsistentDims(_))));
        let unnormalized = MarkovBlockSpec::new(vec![MarkovBlock {
            weight: 0.9,
            rho_acl: a,
            rho_crb: b2,
        }]);
        assert!(matches!(unnormalized, Err(Error::InconsistentDims(_))));
    }

    #[test]
    fn identity_sufficiency_block() {
        let mut rng = seeded_rng(1);
        let spec = SufficiencyBlockSpec::new(vec![SufficiencyBlock {
            p: 1.0,
            q: 1.0,
            rho_l: random_density_with(&[3], 3, &mut rng).unwrap(),
            sigma_l: random_density_with(&[3], 3, &mut rng).unwrap().as_positive(),
            tau_r: classical_state(&[1.0], &[]).unwrap(),
            u: identity(3),
            n_r: Channel::identity(1),
        }])
        .unwrap();
        let t = build_sufficiency_triple(&spec).unwrap();
        assert!(max_abs(&(t.channel().choi() - Channel::identity(3).choi())) < 1e-15);
        for a in PETZ {
            assert!(delta_alpha(&t, alpha(a)).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn depolarized_right_factor_is_sufficient() {
        let mut rng = seeded_rng(2);
        let spec = SufficiencyBlockSpec::new(vec![SufficiencyBlock {
            p: 1.0,
            q: 2.0,
            rho_l: random_density_with(&[2], 2, &mut rng).unwrap(),
            sigma_l: random_density_with(&[2], 2, &mut rng).unwrap().as_positive(),
            tau_r: random_density_with(&[2], 2, &mut rng).unwrap(),
            u: random_unitary(2, &mut rng),
            n_r: Channel::completely_depolarizing(2),
        }])
        .unwrap();
        let t = build_sufficiency_triple(&spec).unwrap();
        // the channel is lossy: it maps two distinct inputs differing only on R to the same output
        let x = kron(&identity(2), &linalg::diag(&[1.0, 0.0]));
        let y = kron(&identity(2), &linalg::diag(&[0.0, 1.0]));
        assert!(max_abs(&(t.channel().apply(&x).unwrap() - t.channel().apply(&y).unwrap())) < 1e-14);
        for a in PETZ {
            assert!(delta_alpha(&t, alpha(a)).unwrap().abs() < 1e-8);
        }
        assert!(rel_ent_diff(&t).unwrap().abs() < 1e-10);
    }

    #[test]
    fn two_block_sufficiency_triples_vanish() {
        let mut rng = seeded_rng(3);
        for _ in 0..3 {
            let spec = random_sufficiency_spec(&[(2, 2, 1), (1, 2, 2)], &mut rng).unwrap();
            let t = build_sufficiency_triple(&spec).unwrap();
            assert_eq!((t.rho().dim(), t.channel().dim_out()), (6, 4));
            assert!(t.channel().strictness().unwrap() > 0.0);
            let chk = is_sufficient_petz(&t, 1e-9).unwrap();
            assert!(chk.pass, "{chk:?}");
            assert!(rel_ent_diff(&t).unwrap().abs() < 1e-9);
            for a in PETZ {
                assert!(delta_alpha(&t, alpha(a)).unwrap().abs() < 1e-8);
            }
            for a in SAND {
                assert!(delta_tilde_alpha(&t, alpha(a)).unwrap().abs() < 1e-8);
            }
            for kind in [MinMax::Min, MinMax::Max] {
                assert!(minmax_delta(&t, kind).unwrap().abs() < 1e-8);
            }
            assert!(log_identity_check(&t, 1e-8).unwrap().0);
        }
    }

    #[test]
    fn depolarizing_channel_is_not_sufficient_for_distinct_states() {
        let rho = random_density(&[3], 3, 1).unwrap();
        let sigma = random_density(&[3], 3, 2).unwrap().as_positive();
        let t = ChannelTriple::new(rho, sigma, Channel::completely_depolarizing(3)).unwrap();
        let chk = is_sufficient_petz(&t, 1e-9).unwrap();
        assert!(chk.sigma_distance < 1e-12);
        assert!(chk.rho_distance > 0.05);
        let t = ChannelTriple::new(
            random_density(&[3], 3, 1).unwrap(),
            random_density(&[3], 3, 2).unwrap().as_positive(),
            Channel::identity(3),
        )
        .unwrap();
        let chk = is_sufficient_petz(&t, 1e-12).unwrap();
        assert!(chk.pass);
        assert!(log_identity_check(&t, 0.0).unwrap().1 < 1e-12);
    }

    #[test]
    fn screened_triples_are_not_sufficient() {
        let mut rng = seeded_rng(9);
        for _ in 0..5 {
            let t = random_non_sufficient_triple(4, 3, 0.05, &mut rng).unwrap();
            assert!(is_sufficient_petz(&t, 1e-3).unwrap().rho_distance >= 0.05);
            let best = PETZ
                .iter()
                .map(|&a| delta_alpha(&t, alpha(a)).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(best >= 1e-6);
        }
    }
}

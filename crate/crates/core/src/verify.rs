//! Randomized property suites.
//!
//! Each trial draws its instances from `seeded_rng(seed + trial)`, so reports
//! are identical no matter how rayon schedules the trials.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical;
use crate::divergences::{self, AlphaParameter};
use crate::error::{Error, Result};
use crate::linalg::{self, mpow, operator_norm, trace, trace_norm, CMat, SupportConvention};
use crate::measures::{self, ChannelTriple, MinMax, TripartiteState};
use crate::objects::{self, classical_state, fidelity, random_density_with, seeded_rng, Channel, PositiveOperator};
use crate::structured::{
    self, random_markov_spec, random_non_sufficient_triple, random_strict_channel, random_sufficiency_spec,
};

pub const PETZ_GRID: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];
pub const SANDWICHED_GRID: [f64; 7] = [0.6, 0.75, 0.9, 1.5, 2.0, 3.0, 5.0];
pub const ORDERING_GRID: [f64; 3] = [1.5, 2.0, 3.0];
pub const CONCAVITY_POWERS: [f64; 4] = [0.3, 0.7, -0.3, -0.7];

/// `(d_CL, d_CR)` for the two blocks of generated Markov chains.
pub const MARKOV_SHAPES: [(usize, usize); 2] = [(1, 2), (2, 1)];
/// `(d_L, d_R, d_R')` for the two blocks of generated sufficient triples.
pub const SUFFICIENCY_SHAPES: [(usize, usize, usize); 2] = [(2, 2, 1), (1, 2, 2)];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    /// `(d_A, d_B, d_C)` of random tripartite states.
    pub dims: Vec<usize>,
    /// Input and output dimension of random channels.
    pub channel_dims: (usize, usize),
    pub seed: u64,
    /// Structural identities.
    pub tol: f64,
    /// `α → 1` limits at `|α − 1| = limit_gap`.
    pub limit_tol: f64,
    pub limit_gap: f64,
    /// Allowed violation of inequalities.
    pub slack_floor: f64,
    /// Quantum against classical closed forms.
    pub classical_tol: f64,
    /// Smallest Δ that counts as detecting a non-sufficient triple.
    pub converse_threshold: f64,
    /// Petz round-trip distance required of random non-sufficient triples.
    pub non_sufficient_distance: f64,
    pub petz_grid: Vec<f64>,
    pub sandwiched_grid: Vec<f64>,
    pub eps_regularize: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            dims: vec![2, 2, 2],
            channel_dims: (4, 3),
            seed: 0,
            tol: 1e-8,
            limit_tol: 1e-3,
            limit_gap: 1e-4,
            slack_floor: 1e-9,
            classical_tol: 1e-10,
            converse_threshold: 1e-6,
            non_sufficient_distance: 0.05,
            petz_grid: PETZ_GRID.to_vec(),
            sandwiched_grid: SANDWICHED_GRID.to_vec(),
            eps_regularize: 1e-8,
        }
    }
}

impl SuiteConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Format("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Format(format!("tol must be positive, got {}", self.tol)));
        }
        if self.dims.len() != 3 || self.dims.contains(&0) {
            return Err(Error::Format(format!(
                "dims must be three positive integers, got {:?}",
                self.dims
            )));
        }
        if self.channel_dims.0 == 0 || self.channel_dims.1 == 0 {
            return Err(Error::Format("channel dims must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.eps_regularize) {
            return Err(Error::Format(format!(
                "eps must lie in [0, 1), got {}",
                self.eps_regularize
            )));
        }
        for &a in self.petz_grid.iter().chain(&self.sandwiched_grid) {
            AlphaParameter::new(a)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub worst_slack: f64,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, records: Vec<CheckRecord>) -> Self {
        let worst_slack = records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        let all_pass = records.iter().all(|r| r.pass);
        Self {
            suite: suite.to_string(),
            records,
            worst_slack,
            all_pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Per-check summary, in first-appearance order.
    pub fn summary(&self) -> Vec<CheckSummary> {
        let mut out: Vec<CheckSummary> = Vec::new();
        for r in &self.records {
            let idx = match out.iter().position(|s| s.check == r.check) {
                Some(i) => i,
                None => {
                    out.push(CheckSummary {
                        check: r.check.clone(),
                        count: 0,
                        failed: 0,
                        worst_slack: f64::INFINITY,
                    });
                    out.len() - 1
                }
            };
            let s = &mut out[idx];
            s.count += 1;
            s.failed += usize::from(!r.pass);
            s.worst_slack = s.worst_slack.min(r.slack);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let rows = self.summary();
        let w = rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "suite: {}", self.suite);
        let _ = writeln!(
            s,
            "{:<w$}  {:>6}  {:>6}  {:>12}",
            "check", "count", "failed", "worst slack"
        );
        for r in &rows {
            let _ = writeln!(
                s,
                "{:<w$}  {:>6}  {:>6}  {:>12.3e}",
                r.check, r.count, r.failed, r.worst_slack
            );
        }
        let _ = writeln!(
            s,
            "{} checks, {} failed, worst slack {:.3e}: {}",
            self.records.len(),
            self.failures().count(),
            self.worst_slack,
            if self.all_pass { "PASS" } else { "FAIL" }
        );
        for f in self.failures().take(10) {
            let _ = writeln!(
                s,
                "  failed {} (seed {}, alpha {}): value {:.6e}, bound {:.6e}{}",
                f.check,
                f.seed,
                f.alpha.map_or("-".into(), |a| a.to_string()),
                f.value,
                f.bound,
                f.error.as_deref().map_or(String::new(), |e| format!(", error: {e}"))
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub check: String,
    pub count: usize,
    pub failed: usize,
    pub worst_slack: f64,
}

/// How a value is compared against its bound.
#[derive(Debug, Clone, Copy)]
enum Bound {
    /// `value ≤ bound + floor`.
    Upper(f64, f64),
    /// `value ≥ bound − floor`.
    Lower(f64, f64),
    /// `|value| ≤ tol`.
    Within(f64),
}

struct Recorder {
    seed: u64,
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn new(seed: u64) -> Self {
        Self {
            seed,
            records: Vec::new(),
        }
    }

    fn check(&mut self, check: &str, alpha: Option<f64>, bound: Bound, value: Result<f64>) {
        let rec = match value {
            Ok(v) => {
                let (value, bound, slack, floor) = match bound {
                    Bound::Upper(b, f) => (v, b, b - v, f),
                    Bound::Lower(b, f) => (v, b, v - b, f),
                    Bound::Within(t) => (v.abs(), t, t - v.abs(), 0.0),
                };
                CheckRecord {
                    check: check.to_string(),
                    seed: self.seed,
                    alpha,
                    value,
                    bound,
                    slack,
                    pass: slack >= -floor,
                    error: None,
                }
            }
            Err(e) => CheckRecord {
                check: check.to_string(),
                seed: self.seed,
                alpha,
                value: f64::NAN,
                bound: f64::NAN,
                slack: f64::NEG_INFINITY,
                pass: false,
                error: Some(e.to_string()),
            },
        };
        self.records.push(rec);
    }
}

fn alpha(a: f64) -> Result<AlphaParameter> {
    AlphaParameter::new(a)
}

fn conv() -> SupportConvention {
    SupportConvention::default()
}

fn run_trials(
    cfg: &SuiteConfig,
    name: &str,
    trial: impl Fn(&SuiteConfig, &mut Recorder) -> Result<()> + Sync,
) -> VerificationReport {
    let records: Vec<Vec<CheckRecord>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = Recorder::new(cfg.seed.wrapping_add(i));
            if let Err(e) = trial(cfg, &mut r) {
                r.check("instance", None, Bound::Within(0.0), Err(e));
            }
            r.records
        })
        .collect();
    VerificationReport::new(name, records.into_iter().flatten().collect())
}

/// Random full-rank state on `dims`, mixed with `eps · I/d`.
pub fn random_tripartite(dims: &[usize], eps: f64, rng: &mut impl Rng) -> Result<TripartiteState> {
    let d = dims.iter().product();
    TripartiteState::new(objects::perturb_positive(&random_density_with(dims, d, rng)?, eps))
}

/// Full-rank `ρ`, `σ` and a random strict channel.
pub fn random_triple(d_in: usize, d_out: usize, rng: &mut impl Rng) -> Result<ChannelTriple> {
    let rho = random_density_with(&[d_in], d_in, rng)?;
    let sigma = random_density_with(&[d_in], d_in, rng)?.as_positive();
    ChannelTriple::new(rho, sigma, random_strict_channel(d_in, d_out, rng))
}

/// `Tr{K^{1/(1−α)}}` for the Petz kernel.
pub fn petz_trace(kernel: &CMat, alpha: f64) -> Result<f64> {
    Ok(trace(&mpow(kernel, 1.0 / (1.0 - alpha), conv())?).re)
}

/// `Tr{K̃^{α/(1−α)}}` for the sandwiched kernel.
pub fn sandwiched_trace(kernel: &CMat, alpha: f64) -> Result<f64> {
    Ok(trace(&mpow(kernel, alpha / (1.0 - alpha), conv())?).re)
}

/// `‖ρ − petz_kernel(α)^{1/(1−α)}‖₁`.
pub fn petz_fixed_point_residual(t: &ChannelTriple, alpha: f64) -> Result<f64> {
    let rec = mpow(&t.petz_kernel(alpha)?, 1.0 / (1.0 - alpha), conv())?;
    Ok(trace_norm(&(rec - t.rho().matrix())))
}

/// `‖ρ − sandwiched_kernel(α)^{α/(1−α)}‖₁`.
pub fn sandwiched_fixed_point_residual(t: &ChannelTriple, alpha: f64) -> Result<f64> {
    let rec = mpow(&t.sandwiched_kernel(alpha)?, alpha / (1.0 - alpha), conv())?;
    Ok(trace_norm(&(rec - t.rho().matrix())))
}

/// `‖[N(σ)^{(α−1)/2} N(σ^{(1−α)/2} ρ^α σ^{(1−α)/2}) N(σ)^{(α−1)/2}]^{1/α} − N(ρ)‖₁`.
pub fn output_fixed_point_residual(t: &ChannelTriple, alpha: f64) -> Result<f64> {
    let s = mpow(t.sigma().matrix(), (1.0 - alpha) / 2.0, conv())?;
    let inner = t.channel().apply(&(&s * mpow(t.rho().matrix(), alpha, conv())? * &s))?;
    let ns = mpow(t.n_sigma(), (alpha - 1.0) / 2.0, conv())?;
    let lhs = mpow(&linalg::hermitian_part(&(&ns * inner * &ns)), 1.0 / alpha, conv())?;
    Ok(trace_norm(&(lhs - t.n_rho())))
}

/// `Tr{(A B^p A†)^{1/p}}`.
pub fn concave_trace(a: &CMat, b: &CMat, p: f64) -> Result<f64> {
    let inner = linalg::hermitian_part(&(a * mpow(b, p, conv())? * a.adjoint()));
    Ok(trace(&mpow(&inner, 1.0 / p, conv())?).re)
}

fn trace_trial(cfg: &SuiteConfig, r: &mut Recorder) -> Result<()> {
    let mut rng = seeded_rng(r.seed);
    let upper = Bound::Upper(1.0, cfg.slack_floor);
    let s = random_tripartite(&cfg.dims, cfg.eps_regularize, &mut rng)?;
    for &a in &cfg.petz_grid {
        r.check(
            "cmi-trace-petz",
            Some(a),
            upper,
            s.petz_kernel(a).and_then(|k| petz_trace(&k, a)),
        );
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "cmi-trace-sandwiched",
            Some(a),
            upper,
            s.sandwiched_kernel(a).and_then(|k| sandwiched_trace(&k, a)),
        );
    }
    r.check("cmi-exp-trace", None, upper, s.log_sum_exp().map(|m| trace(&m).re));

    let (din, dout) = cfg.channel_dims;
    let t = random_triple(din, dout, &mut rng)?;
    for &a in &cfg.petz_grid {
        r.check(
            "channel-trace-petz",
            Some(a),
            upper,
            t.petz_kernel(a).and_then(|k| petz_trace(&k, a)),
        );
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "channel-trace-sandwiched",
            Some(a),
            upper,
            t.sandwiched_kernel(a).and_then(|k| sandwiched_trace(&k, a)),
        );
    }
    r.check("channel-exp-trace", None, upper, t.log_sum_exp().map(|m| trace(&m).re));

    // equality on Markov chains
    let m = structured::build_markov_chain(&random_markov_spec(cfg.dims[0], cfg.dims[1], &MARKOV_SHAPES, &mut rng)?)?;
    let mt = ChannelTriple::from_tripartite(&m)?;
    let eq = Bound::Within(cfg.tol);
    for &a in &cfg.petz_grid {
        r.check(
            "markov-trace-petz",
            Some(a),
            eq,
            m.petz_kernel(a).and_then(|k| petz_trace(&k, a)).map(|v| v - 1.0),
        );
        r.check(
            "markov-channel-trace-petz",
            Some(a),
            eq,
            mt.petz_kernel(a).and_then(|k| petz_trace(&k, a)).map(|v| v - 1.0),
        );
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "markov-trace-sandwiched",
            Some(a),
            eq,
            m.sandwiched_kernel(a)
                .and_then(|k| sandwiched_trace(&k, a))
                .map(|v| v - 1.0),
        );
    }
    r.check(
        "markov-exp-trace",
        None,
        eq,
        m.log_sum_exp().map(|x| trace(&x).re - 1.0),
    );
    Ok(())
}

pub fn trace_inequality_suite(cfg: &SuiteConfig) -> VerificationReport {
    run_trials(cfg, "trace", trace_trial)
}

fn max_over(grid: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    grid.iter().try_fold(f64::NEG_INFINITY, |m, &a| Ok(m.max(f(a)?)))
}

fn characterization_trial(cfg: &SuiteConfig, r: &mut Recorder) -> Result<()> {
    let mut rng = seeded_rng(r.seed);
    let eq = Bound::Within(cfg.tol);
    let t = structured::build_sufficiency_triple(&random_sufficiency_spec(&SUFFICIENCY_SHAPES, &mut rng)?)?;
    r.check(
        "sufficiency-petz-roundtrip",
        None,
        eq,
        structured::is_sufficient_petz(&t, cfg.tol).map(|c| c.rho_distance.max(c.sigma_distance)),
    );
    r.check(
        "sufficiency-log-identity",
        None,
        eq,
        structured::log_identity_check(&t, cfg.tol).map(|c| c.1),
    );
    r.check("sufficiency-rel-ent-diff", None, eq, measures::rel_ent_diff(&t));
    for &a in &cfg.petz_grid {
        r.check(
            "sufficiency-delta",
            Some(a),
            eq,
            alpha(a).and_then(|p| measures::delta_alpha(&t, p)),
        );
        r.check("fixed-point-petz", Some(a), eq, petz_fixed_point_residual(&t, a));
        r.check("fixed-point-output", Some(a), eq, output_fixed_point_residual(&t, a));
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "sufficiency-delta-tilde",
            Some(a),
            eq,
            alpha(a).and_then(|p| measures::delta_tilde_alpha(&t, p)),
        );
        r.check(
            "fixed-point-sandwiched",
            Some(a),
            eq,
            sandwiched_fixed_point_residual(&t, a),
        );
    }
    r.check(
        "sufficiency-delta-min",
        None,
        eq,
        measures::minmax_delta(&t, MinMax::Min),
    );
    r.check(
        "sufficiency-delta-max",
        None,
        eq,
        measures::minmax_delta(&t, MinMax::Max),
    );

    // contrapositive on screened random triples
    let (din, dout) = cfg.channel_dims;
    let n = random_non_sufficient_triple(din, dout, cfg.non_sufficient_distance, &mut rng)?;
    let detect = Bound::Lower(cfg.converse_threshold, 0.0);
    r.check(
        "converse-delta",
        None,
        detect,
        max_over(&cfg.petz_grid, |a| measures::delta_alpha(&n, alpha(a)?)),
    );
    r.check(
        "converse-delta-tilde",
        None,
        detect,
        max_over(&cfg.sandwiched_grid, |a| measures::delta_tilde_alpha(&n, alpha(a)?)),
    );
    let tol_detect = Bound::Lower(cfg.tol, 0.0);
    r.check(
        "converse-fixed-point-petz",
        None,
        tol_detect,
        max_over(&cfg.petz_grid, |a| petz_fixed_point_residual(&n, a)),
    );
    r.check(
        "converse-fixed-point-sandwiched",
        None,
        tol_detect,
        max_over(&cfg.sandwiched_grid, |a| sandwiched_fixed_point_residual(&n, a)),
    );
    Ok(())
}

pub fn characterization_suite(cfg: &SuiteConfig) -> VerificationReport {
    run_trials(cfg, "characterization", characterization_trial)
}

/// `‖K(α)^{1/(1−α)} − exp(log ρ_AC + log ρ_BC − log ρ_C)‖_∞` at `α = 1 + side·10^{−k}`, `k = 1..=4`.
pub fn lie_trotter_deviations(s: &TripartiteState, side: f64) -> Result<Vec<f64>> {
    let target = s.log_sum_exp()?;
    (1..=4)
        .map(|k| {
            let a = 1.0 + side * 10f64.powi(-k);
            let lhs = mpow(&s.petz_kernel(a)?, 1.0 / (1.0 - a), conv())?;
            Ok(operator_norm(&(lhs - &target)))
        })
        .collect()
}

fn limit_trial(cfg: &SuiteConfig, r: &mut Recorder) -> Result<()> {
    let mut rng = seeded_rng(r.seed);
    let lim = Bound::Within(cfg.limit_tol);
    let s = random_tripartite(&cfg.dims, cfg.eps_regularize, &mut rng)?;
    let i = measures::von_neumann_cmi(&s)?;
    let (din, dout) = cfg.channel_dims;
    let t = random_triple(din, dout, &mut rng)?;
    let d = measures::rel_ent_diff(&t)?;
    for a in [1.0 - cfg.limit_gap, 1.0 + cfg.limit_gap] {
        let p = alpha(a)?;
        r.check(
            "renyi-cmi-limit",
            Some(a),
            lim,
            measures::renyi_cmi(&s, p).map(|v| v - i),
        );
        r.check(
            "sandwiched-cmi-limit",
            Some(a),
            lim,
            measures::sandwiched_cmi(&s, p).map(|v| v - i),
        );
        r.check("delta-limit", Some(a), lim, measures::delta_alpha(&t, p).map(|v| v - d));
        r.check(
            "delta-tilde-limit",
            Some(a),
            lim,
            measures::delta_tilde_alpha(&t, p).map(|v| v - d),
        );
    }
    for side in [-1.0, 1.0] {
        let devs = lie_trotter_deviations(&s, side);
        let worst_increase = devs
            .as_ref()
            .map(|v| v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max))
            .map_err(Clone::clone);
        r.check(
            "lie-trotter-monotone",
            Some(1.0 + side * 1e-4),
            Bound::Upper(0.0, 0.0),
            worst_increase,
        );
        r.check("lie-trotter-limit", Some(1.0 + side * 1e-4), lim, devs.map(|v| v[3]));
    }
    let rho = random_density_with(&[din], din, &mut rng)?;
    let sigma = random_density_with(&[din], din, &mut rng)?;
    let half = alpha(0.5)?;
    r.check(
        "dmin-sandwiched-half",
        Some(0.5),
        Bound::Within(cfg.tol),
        divergences::d_min(&rho, &sigma).and_then(|x| Ok(x - divergences::sandwiched_div(&rho, &sigma, half)?)),
    );
    Ok(())
}

pub fn limit_suite(cfg: &SuiteConfig) -> VerificationReport {
    run_trials(cfg, "limits", limit_trial)
}

fn inequality_trial(cfg: &SuiteConfig, r: &mut Recorder) -> Result<()> {
    let mut rng = seeded_rng(r.seed);
    let lower = Bound::Lower(0.0, cfg.slack_floor);
    let (din, dout) = cfg.channel_dims;
    let t = random_triple(din, dout, &mut rng)?;
    let (rho, sigma) = (t.rho(), t.sigma());
    let (nr, ns) = (t.n_rho(), t.n_sigma());

    // data processing
    for &a in &cfg.petz_grid {
        let gap =
            alpha(a).and_then(|p| Ok(divergences::renyi_div(rho, sigma, p)? - divergences::renyi_div(nr, ns, p)?));
        r.check("dpi-petz", Some(a), lower, gap);
    }
    let mut sand: Vec<f64> = vec![0.5];
    sand.extend(&cfg.sandwiched_grid);
    for a in sand {
        let gap = alpha(a)
            .and_then(|p| Ok(divergences::sandwiched_div(rho, sigma, p)? - divergences::sandwiched_div(nr, ns, p)?));
        r.check("dpi-sandwiched", Some(a), lower, gap);
    }
    r.check("dpi-relative-entropy", Some(1.0), lower, measures::rel_ent_diff(&t));
    r.check(
        "dpi-dmax",
        None,
        lower,
        divergences::d_max(rho, sigma).and_then(|x| Ok(x - divergences::d_max(nr, ns)?)),
    );

    // divergence identities
    r.check(
        "dmin-fidelity",
        None,
        Bound::Within(cfg.classical_tol),
        fidelity(rho, sigma).and_then(|f| Ok(divergences::d_min(rho, sigma)? + f.log2())),
    );
    r.check(
        "dmax-operator-inequality",
        None,
        lower,
        divergences::d_max(rho, sigma)
            .and_then(|d| linalg::min_eigenvalue(&(sigma.matrix().scale(2f64.powf(d)) - rho.matrix()))),
    );

    // concavity of B ↦ Tr{(A B^p A†)^{1/p}}
    let a = objects::gaussian_matrix(din, din, &mut rng);
    let b1 = random_density_with(&[din], din, &mut rng)?.into_matrix();
    let b2 = random_density_with(&[din], din, &mut rng)?.into_matrix();
    let lam: f64 = rng.random();
    let mix = b1.scale(lam) + b2.scale(1.0 - lam);
    for p in CONCAVITY_POWERS {
        let gap = (|| {
            let f = |b: &CMat| concave_trace(&a, b, p);
            let mid = f(&mix)?;
            let chord = lam * f(&b1)? + (1.0 - lam) * f(&b2)?;
            // relative slack keeps the check scale free in ‖A‖
            Ok((mid - chord) / mid.abs().max(1.0))
        })();
        r.check("concavity", Some(p), lower, gap);
    }

    // sandwiched Δ dominates Petz Δ at (2α − 1)/α
    for a in ORDERING_GRID {
        let gap = (|| {
            Ok(measures::delta_tilde_alpha(&t, alpha(a)?)? - measures::delta_alpha(&t, alpha((2.0 * a - 1.0) / a)?)?)
        })();
        r.check("sandwiched-petz-ordering", Some(a), lower, gap);
    }

    // non-negativity
    for &a in &cfg.petz_grid {
        r.check("nonneg-delta", Some(a), lower, measures::delta_alpha(&t, alpha(a)?));
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "nonneg-delta-tilde",
            Some(a),
            lower,
            measures::delta_tilde_alpha(&t, alpha(a)?),
        );
    }
    r.check("nonneg-delta-min", None, lower, measures::minmax_delta(&t, MinMax::Min));
    r.check("nonneg-delta-max", None, lower, measures::minmax_delta(&t, MinMax::Max));

    let s = random_tripartite(&cfg.dims, cfg.eps_regularize, &mut rng)?;
    r.check("nonneg-cmi", Some(1.0), lower, measures::von_neumann_cmi(&s));
    for &a in &cfg.petz_grid {
        r.check("nonneg-renyi-cmi", Some(a), lower, measures::renyi_cmi(&s, alpha(a)?));
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "nonneg-sandwiched-cmi",
            Some(a),
            lower,
            measures::sandwiched_cmi(&s, alpha(a)?),
        );
    }
    r.check("nonneg-imin", None, lower, measures::minmax_cmi(&s, MinMax::Min));
    r.check("nonneg-imax", None, lower, measures::minmax_cmi(&s, MinMax::Max));
    Ok(())
}

pub fn inequality_suite(cfg: &SuiteConfig) -> VerificationReport {
    run_trials(cfg, "inequalities", inequality_trial)
}

fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

fn classical_trial(cfg: &SuiteConfig, r: &mut Recorder) -> Result<()> {
    let mut rng = seeded_rng(r.seed);
    let within = Bound::Within(cfg.classical_tol);
    let dims = [cfg.dims[0], cfg.dims[1], cfg.dims[2]];
    let joint = classical::Joint::new(random_simplex(dims.iter().product(), &mut rng), dims)?;
    let s = TripartiteState::new(classical_state(&joint.p, &cfg.dims)?)?;
    r.check(
        "classical-cmi",
        Some(1.0),
        within,
        measures::von_neumann_cmi(&s).map(|v| v - classical::cmi(&joint)),
    );
    for &a in &cfg.petz_grid {
        r.check(
            "classical-renyi-cmi",
            Some(a),
            within,
            measures::renyi_cmi(&s, alpha(a)?).map(|v| v - classical::renyi_cmi(&joint, a)),
        );
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "classical-sandwiched-cmi",
            Some(a),
            within,
            measures::sandwiched_cmi(&s, alpha(a)?).map(|v| v - classical::renyi_cmi(&joint, a)),
        );
    }
    r.check(
        "classical-imin",
        None,
        within,
        measures::minmax_cmi(&s, MinMax::Min).map(|v| v - classical::i_min(&joint)),
    );
    r.check(
        "classical-imax",
        None,
        within,
        measures::minmax_cmi(&s, MinMax::Max).map(|v| v - classical::i_max(&joint)),
    );

    let (din, dout) = cfg.channel_dims;
    let columns: Vec<Vec<f64>> = (0..din).map(|_| random_simplex(dout, &mut rng)).collect();
    let ct = classical::Triple {
        p: random_simplex(din, &mut rng),
        q: random_simplex(din, &mut rng),
        t: (0..dout).map(|y| (0..din).map(|x| columns[x][y]).collect()).collect(),
    };
    let t = ChannelTriple::new(
        classical_state(&ct.p, &[])?,
        PositiveOperator::new(linalg::diag(&ct.q), vec![])?,
        ct.channel()?,
    )?;
    r.check(
        "classical-rel-ent-diff",
        Some(1.0),
        within,
        measures::rel_ent_diff(&t).map(|v| v - ct.rel_ent_diff()),
    );
    for &a in &cfg.petz_grid {
        r.check(
            "classical-delta",
            Some(a),
            within,
            measures::delta_alpha(&t, alpha(a)?).map(|v| v - ct.delta_alpha(a)),
        );
        r.check(
            "classical-renyi-div",
            Some(a),
            within,
            divergences::renyi_div(t.rho(), t.sigma(), alpha(a)?).map(|v| v - classical::renyi(&ct.p, &ct.q, a)),
        );
    }
    for &a in &cfg.sandwiched_grid {
        r.check(
            "classical-delta-tilde",
            Some(a),
            within,
            measures::delta_tilde_alpha(&t, alpha(a)?).map(|v| v - ct.delta_tilde_alpha(a)),
        );
        r.check(
            "classical-sandwiched-div",
            Some(a),
            within,
            divergences::sandwiched_div(t.rho(), t.sigma(), alpha(a)?).map(|v| v - classical::renyi(&ct.p, &ct.q, a)),
        );
    }
    r.check(
        "classical-delta-min",
        None,
        within,
        measures::minmax_delta(&t, MinMax::Min).map(|v| v - ct.delta_min()),
    );
    r.check(
        "classical-delta-max",
        None,
        within,
        measures::minmax_delta(&t, MinMax::Max).map(|v| v - ct.delta_max()),
    );
    r.check(
        "classical-rel-entropy",
        None,
        within,
        divergences::rel_entropy(t.rho(), t.sigma()).map(|v| v - classical::kl(&ct.p, &ct.q)),
    );
    r.check(
        "classical-dmin",
        None,
        within,
        divergences::d_min(t.rho(), t.sigma()).map(|v| v - classical::d_min(&ct.p, &ct.q)),
    );
    r.check(
        "classical-dmax",
        None,
        within,
        divergences::d_max(t.rho(), t.sigma()).map(|v| v - classical::d_max(&ct.p, &ct.q)),
    );
    Ok(())
}

pub fn classical_suite(cfg: &SuiteConfig) -> VerificationReport {
    run_trials(cfg, "classical", classical_trial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Trace,
    Characterization,
    Limits,
    Inequalities,
    Classical,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Trace,
        Suite::Characterization,
        Suite::Limits,
        Suite::Inequalities,
        Suite::Classical,
    ];

    pub fn run(self, cfg: &SuiteConfig) -> VerificationReport {
        match self {
            Suite::Trace => trace_inequality_suite(cfg),
            Suite::Characterization => characterization_suite(cfg),
            Suite::Limits => limit_suite(cfg),
            Suite::Inequalities => inequality_suite(cfg),
            Suite::Classical => classical_suite(cfg),
        }
    }
}

/// Runs each suite in order.
pub fn run_suites(suites: &[Suite], cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    Ok(suites.iter().map(|s| s.run(cfg)).collect())
}

/// Trace inequalities and non-negativity on one given state.
///
/// Checks with `α > 1` and the min/max quantities are skipped unless the state
/// is positive definite.
pub fn state_suite(s: &TripartiteState, cfg: &SuiteConfig) -> VerificationReport {
    let mut r = Recorder::new(cfg.seed);
    let pd = s.is_positive_definite().unwrap_or(false);
    let upper = Bound::Upper(1.0, cfg.slack_floor);
    let lower = Bound::Lower(0.0, cfg.slack_floor);
    r.check("nonneg-cmi", Some(1.0), lower, measures::von_neumann_cmi(s));
    for &a in cfg.petz_grid.iter().filter(|&&a| a < 1.0 || pd) {
        r.check(
            "cmi-trace-petz",
            Some(a),
            upper,
            s.petz_kernel(a).and_then(|k| petz_trace(&k, a)),
        );
        r.check(
            "nonneg-renyi-cmi",
            Some(a),
            lower,
            alpha(a).and_then(|p| measures::renyi_cmi(s, p)),
        );
    }
    for &a in cfg.sandwiched_grid.iter().filter(|&&a| a < 1.0 || pd) {
        r.check(
            "cmi-trace-sandwiched",
            Some(a),
            upper,
            s.sandwiched_kernel(a).and_then(|k| sandwiched_trace(&k, a)),
        );
        r.check(
            "nonneg-sandwiched-cmi",
            Some(a),
            lower,
            alpha(a).and_then(|p| measures::sandwiched_cmi(s, p)),
        );
    }
    if pd {
        r.check("cmi-exp-trace", None, upper, s.log_sum_exp().map(|m| trace(&m).re));
        r.check("nonneg-imin", None, lower, measures::minmax_cmi(s, MinMax::Min));
        r.check("nonneg-imax", None, lower, measures::minmax_cmi(s, MinMax::Max));
    }
    VerificationReport::new("state", r.records)
}

/// `{"config": …, "reports": […]}`.
pub fn reports_to_json(cfg: &SuiteConfig, reports: &[VerificationReport]) -> String {
    let mut s = serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "reports": reports }))
        .expect("reports serialize");
    s.push('\n');
    s
}

/// Identity-channel triple for which every identity holds exactly.
pub fn identity_triple(d: usize, seed: u64) -> Result<ChannelTriple> {
    let mut rng = seeded_rng(seed);
    let rho = random_density_with(&[d], d, &mut rng)?;
    let sigma = random_density_with(&[d], d, &mut rng)?.as_positive();
    ChannelTriple::new(rho, sigma, Channel::identity(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> SuiteConfig {
        SuiteConfig {
            trials,
            seed: 42,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn every_suite_passes_on_a_few_trials() {
        for s in Suite::ALL {
            let rep = s.run(&small(3));
            assert!(rep.all_pass, "{}", rep.to_text());
            assert_eq!(
                rep.worst_slack,
                rep.records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
            );
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = Suite::Trace.run(&small(4));
        let b = Suite::Trace.run(&small(4));
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn product_states_saturate_trace_inequalities() {
        let mut rng = seeded_rng(1);
        let parts: Vec<CMat> = (0..3)
            .map(|_| random_density_with(&[2], 2, &mut rng).unwrap().into_matrix())
            .collect();
        let m = linalg::kron_all(parts.iter());
        let s = TripartiteState::new(objects::validate_density(&m, &[2, 2, 2], 1e-10).unwrap()).unwrap();
        for a in PETZ_GRID {
            assert!((petz_trace(&s.petz_kernel(a).unwrap(), a).unwrap() - 1.0).abs() < 1e-10);
        }
        for a in SANDWICHED_GRID {
            assert!((sandwiched_trace(&s.sandwiched_kernel(a).unwrap(), a).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_channel_fixed_points_are_exact() {
        let t = identity_triple(3, 5).unwrap();
        for a in PETZ_GRID {
            assert!(petz_fixed_point_residual(&t, a).unwrap() < 1e-10);
            assert!(output_fixed_point_residual(&t, a).unwrap() < 1e-10);
        }
        for a in SANDWICHED_GRID {
            assert!(sandwiched_fixed_point_residual(&t, a).unwrap() < 1e-10);
        }
    }

    #[test]
    fn depolarizing_triple_is_detected() {
        let mut rng = seeded_rng(8);
        let t = ChannelTriple::new(
            random_density_with(&[3], 3, &mut rng).unwrap(),
            random_density_with(&[3], 3, &mut rng).unwrap().as_positive(),
            Channel::depolarizing(3, 0.7).unwrap(),
        )
        .unwrap();
        let best = max_over(&PETZ_GRID, |a| measures::delta_alpha(&t, alpha(a)?)).unwrap();
        assert!(best >= 1e-4);
    }

    #[test]
    fn identity_channel_dpi_slack_is_zero() {
        let t = identity_triple(3, 2).unwrap();
        for a in PETZ_GRID {
            let p = alpha(a).unwrap();
            let gap = divergences::renyi_div(t.rho(), t.sigma(), p).unwrap()
                - divergences::renyi_div(t.n_rho(), t.n_sigma(), p).unwrap();
            assert!(gap.abs() < 1e-12);
        }
    }

    #[test]
    fn concavity_with_equal_endpoints_has_zero_gap() {
        let mut rng = seeded_rng(3);
        let a = objects::gaussian_matrix(3, 3, &mut rng);
        let b = random_density_with(&[3], 3, &mut rng).unwrap().into_matrix();
        for p in CONCAVITY_POWERS {
            let mix = b.scale(0.3) + b.scale(0.7);
            let gap = concave_trace(&a, &mix, p).unwrap() - concave_trace(&a, &b, p).unwrap();
            assert!(gap.abs() < 1e-10 * concave_trace(&a, &b, p).unwrap().abs().max(1.0));
        }
    }

    #[test]
    fn lie_trotter_is_exact_for_commuting_states() {
        let p = [0.1, 0.2, 0.05, 0.15, 0.1, 0.1, 0.2, 0.1];
        let s = TripartiteState::new(classical_state(&p, &[2, 2, 2]).unwrap()).unwrap();
        for side in [-1.0, 1.0] {
            for d in lie_trotter_deviations(&s, side).unwrap() {
                assert!(d < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(SuiteConfig { trials: 0, ..small(1) }.validate().is_err());
        assert!(SuiteConfig { tol: 0.0, ..small(1) }.validate().is_err());
        assert!(SuiteConfig {
            dims: vec![2, 2],
            ..small(1)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn errors_become_failed_records() {
        let mut r = Recorder::new(0);
        r.check("x", None, Bound::Within(1.0), Err(Error::InfiniteTerm));
        let rep = VerificationReport::new("t", r.records);
        assert!(!rep.all_pass);
        assert!(rep.to_text().contains("relative entropy term is infinite"));
    }
}

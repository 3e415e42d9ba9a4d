//! Randomized multiscale construction of Salem-type subsets of `[0, N^j)`.
//!
//! Stage `m` splits every surviving interval of length `N^{j-m}` into `N`
//! blocks of length `N^{j-m-1}` and keeps a uniformly random `t`-subset of
//! them. After `j` stages the set has `t^j` points and fractional density
//! `log t / log N` relative to `N^j`.
//!
//! Block choices are drawn from a ChaCha stream keyed by
//! `(seed, stage, block index)`, so a trace depends only on its config.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intsets::DiscreteSet;
use crate::spectral::{
    decay_fit, dft_indicator, DecayFit, DecayForm, DecayOptions, FrequencyMode, Spectrum,
};

/// Largest `N^j` the constructor accepts.
pub const MAX_AMBIENT: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SalemConfig {
    /// `N`, the number of blocks per interval.
    pub branching: usize,
    /// `t`, the number of blocks kept per interval.
    pub keep: usize,
    /// `j`, the number of stages.
    pub depth: u32,
    pub seed: u64,
    pub max_retries: u32,
    pub eta_override: Option<f64>,
    pub verify_blocks: bool,
    /// Check block sums over all of `[1, N^j)` instead of one aliasing period.
    pub full_range: bool,
}

impl SalemConfig {
    pub fn new(branching: usize, keep: usize, depth: u32, seed: u64) -> Self {
        Self {
            branching,
            keep,
            depth,
            seed,
            max_retries: 64,
            eta_override: None,
            verify_blocks: false,
            full_range: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.branching < 2 {
            return Err(Error::Parameter(format!("branching {} < 2", self.branching)));
        }
        if self.keep == 0 || self.keep > self.branching {
            return Err(Error::Parameter(format!(
                "keep {} not in [1, {}]",
                self.keep, self.branching
            )));
        }
        if self.depth == 0 {
            return Err(Error::Parameter("depth must be at least 1".into()));
        }
        if self.max_retries == 0 {
            return Err(Error::Parameter("max retries must be positive".into()));
        }
        if let Some(eta) = self.eta_override {
            if !(eta > 0.0) {
                return Err(Error::Parameter(format!("eta override {eta} must be positive")));
            }
        }
        match self.branching.checked_pow(self.depth) {
            Some(a) if a <= MAX_AMBIENT => Ok(()),
            _ => Err(Error::SizeLimit(format!(
                "{}^{} exceeds the ambient limit {MAX_AMBIENT}",
                self.branching, self.depth
            ))),
        }
    }

    /// `N^j`.
    pub fn ambient(&self) -> usize {
        self.branching.pow(self.depth)
    }

    /// `log t / log N`.
    pub fn alpha(&self) -> f64 {
        (self.keep as f64).ln() / (self.branching as f64).ln()
    }
}

/// Per-block deviation threshold `η = sqrt(32 ln(8 N² M) / t)`.
pub fn eta_threshold(branching: usize, keep: usize, m: usize) -> f64 {
    let n = branching as f64;
    (32.0 * (8.0 * n * n * m as f64).ln() / keep as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StageRecord {
    pub stage: usize,
    /// Length `N^{j-m-1}` of the blocks chosen at this stage.
    pub block_length: usize,
    /// Threshold enforced on the block sums, when verification is on.
    pub eta: Option<f64>,
    /// Left endpoints of all candidate blocks, `B*_m`.
    pub grid: Vec<usize>,
    /// Left endpoints of the kept blocks, `B_m`.
    pub chosen: Vec<usize>,
    /// Rejected draws per surviving interval.
    pub retries: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub config: SalemConfig,
    pub stages: Vec<StageRecord>,
    /// `A_0 ⊇ A_1 ⊇ … ⊇ A_j`.
    pub sets: Vec<DiscreteSet>,
}

impl ConstructionTrace {
    pub fn is_complete(&self) -> bool {
        self.sets.len() == self.config.depth as usize + 1
            && self.stages.len() == self.config.depth as usize
    }

    pub fn final_set(&self) -> Result<&DiscreteSet> {
        if !self.is_complete() {
            return Err(Error::State(format!(
                "{} of {} stages present",
                self.stages.len(),
                self.config.depth
            )));
        }
        Ok(self.sets.last().expect("complete trace has sets"))
    }

    /// Serializable summary: config, per-stage choices and the final set.
    pub fn document(&self) -> Result<TraceDocument> {
        Ok(TraceDocument {
            config: self.config.clone(),
            alpha: self.config.alpha(),
            stages: self
                .stages
                .iter()
                .map(|s| StageSummary {
                    stage: s.stage,
                    block_length: s.block_length,
                    eta: s.eta,
                    chosen: s.chosen.clone(),
                    retries: s.retries.clone(),
                })
                .collect(),
            final_set: self.final_set()?.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StageSummary {
    pub stage: usize,
    pub block_length: usize,
    pub eta: Option<f64>,
    pub chosen: Vec<usize>,
    pub retries: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceDocument {
    pub config: SalemConfig,
    pub alpha: f64,
    pub stages: Vec<StageSummary>,
    #[serde(rename = "final")]
    pub final_set: DiscreteSet,
}

fn block_rng(seed: u64, stage: usize, block: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(stage as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(block as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// `max_k |S_B(k)/t - S_{B*}(k)/N|` over `k` in `[1, k_limit)`, where the
/// grid points are `i * spacing` in `Z_modulus`. The interval's own offset
/// only contributes a common phase and drops out of the modulus.
fn max_block_deviation(
    indices: &[usize],
    branching: usize,
    spacing: usize,
    modulus: usize,
    k_limit: usize,
) -> f64 {
    let t = indices.len() as f64;
    let unit = -2.0 * PI / modulus as f64;
    let sum = |k: usize, idx: &mut dyn Iterator<Item = usize>| -> Complex64 {
        idx.map(|i| Complex64::from_polar(1.0, unit * ((i * spacing % modulus) * k % modulus) as f64))
            .sum()
    };
    let mut worst = 0.0f64;
    for k in 1..k_limit {
        let full = sum(k, &mut (0..branching));
        let chosen = sum(k, &mut indices.iter().copied());
        worst = worst.max((chosen / t - full / branching as f64).norm());
    }
    worst
}

/// Builds `A_0 ⊇ … ⊇ A_j`, optionally rejecting block choices whose
/// exponential sums stray more than `η` from the full grid's.
pub fn construct(config: &SalemConfig) -> Result<ConstructionTrace> {
    config.validate()?;
    let (n, t, j) = (config.branching, config.keep, config.depth as usize);
    let ambient = config.ambient();
    let mut intervals = vec![0usize];
    let mut interval_len = ambient;
    let mut sets = vec![DiscreteSet::full(ambient)?];
    let mut stages = Vec::with_capacity(j);

    for stage in 0..j {
        let block_len = interval_len / n;
        // exponential sums of the stage grid repeat with period N^{m+1}
        let period = ambient / block_len;
        let k_limit = if config.full_range { ambient } else { period };
        let eta = config.verify_blocks.then(|| {
            config
                .eta_override
                .unwrap_or_else(|| eta_threshold(n, t, n.pow(stage as u32)))
        });
        let mut deviation_cache: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut grid = Vec::with_capacity(intervals.len() * n);
        let mut chosen = Vec::with_capacity(intervals.len() * t);
        let mut retries = Vec::with_capacity(intervals.len());

        for (block, &start) in intervals.iter().enumerate() {
            grid.extend((0..n).map(|i| start + i * block_len));
            let mut rng = block_rng(config.seed, stage, block);
            let mut rejected = 0u32;
            let indices = loop {
                let mut pick = rand::seq::index::sample(&mut rng, n, t).into_vec();
                pick.sort_unstable();
                let Some(eta) = eta else { break pick };
                let deviation = *deviation_cache
                    .entry(pick.clone())
                    .or_insert_with(|| max_block_deviation(&pick, n, block_len, ambient, k_limit));
                if deviation <= eta {
                    break pick;
                }
                rejected += 1;
                if rejected >= config.max_retries {
                    return Err(Error::Construction { stage, block, draws: rejected });
                }
            };
            chosen.extend(indices.iter().map(|&i| start + i * block_len));
            retries.push(rejected);
        }

        let elements: Vec<usize> = chosen.iter().flat_map(|&b| b..b + block_len).collect();
        sets.push(DiscreteSet::new(ambient, elements)?);
        stages.push(StageRecord {
            stage,
            block_length: block_len,
            eta,
            grid,
            chosen: chosen.clone(),
            retries,
        });
        intervals = chosen;
        interval_len = block_len;
    }

    Ok(ConstructionTrace { config: config.clone(), stages, sets })
}

/// Stage-normalized spectra `ψ_m = (N/t)^m χ̂_{A_m}` on `Z_{N^j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSeries {
    pub modulus: usize,
    pub per_stage: Vec<Spectrum>,
}

pub fn psi_series(trace: &ConstructionTrace) -> Result<PsiSeries> {
    trace.final_set()?;
    let ratio = trace.config.branching as f64 / trace.config.keep as f64;
    let per_stage = trace
        .sets
        .iter()
        .enumerate()
        .map(|(m, set)| dft_indicator(set).scaled(ratio.powi(m as i32)))
        .collect();
    Ok(PsiSeries { modulus: trace.config.ambient(), per_stage })
}

/// `32 min(1, N^{m+1}/|k|) t^{-(m+1)/2} ln(8 N^{m+1})`.
pub fn psi_diff_bound(config: &SalemConfig, stage: usize, freq: usize) -> f64 {
    let scale = (config.branching as f64).powi(stage as i32 + 1);
    32.0 * (scale / freq as f64).min(1.0)
        * (config.keep as f64).powf(-(stage as f64 + 1.0) / 2.0)
        * (8.0 * scale).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiViolation {
    pub stage: usize,
    pub k: usize,
    pub lhs: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PsiDiffReport {
    pub frequency: FrequencyMode,
    pub violations: Vec<PsiViolation>,
    /// `max_k |ψ_{m+1}(k) - ψ_m(k)| / bound` for each stage `m`.
    pub max_ratio: Vec<f64>,
}

/// Tests `|ψ_{m+1}(k) - ψ_m(k)|` against [`psi_diff_bound`] for all `k >= 1`.
///
/// Use [`FrequencyMode::Symmetric`] to read `|k|` as the distance to zero in
/// `Z_{N^j}`; frequencies just below `N^j` alias small negative ones, so the
/// raw reading flags them at the early stages.
pub fn psi_diff_check(
    series: &PsiSeries,
    config: &SalemConfig,
    frequency: FrequencyMode,
) -> PsiDiffReport {
    let n = series.modulus;
    let mut violations = Vec::new();
    let mut max_ratio = Vec::new();
    for (stage, pair) in series.per_stage.windows(2).enumerate() {
        let mut worst = 0.0f64;
        for k in 1..n {
            let lhs = (pair[1].coeffs()[k] - pair[0].coeffs()[k]).norm();
            let bound = psi_diff_bound(config, stage, frequency.magnitude(k, n));
            worst = worst.max(lhs / bound);
            if lhs > bound {
                violations.push(PsiViolation { stage, k, lhs, bound });
            }
        }
        max_ratio.push(worst);
    }
    PsiDiffReport { frequency, violations, max_ratio }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FinalDecayReport {
    pub alpha: f64,
    pub beta: f64,
    /// `|ψ_j(k)| <= C k^{-β/2}`.
    pub psi: DecayFit,
    /// `|χ̂_{A_j}(k)| <= C' (k N^j)^{-β/2}`.
    pub chi: DecayFit,
    /// `χ̂_{A_j}(0)`, equal to `t^j / N^j`.
    pub dc: f64,
    /// `max_k |χ̂_{A_j}(k) - (t/N)^j ψ_j(k)|`.
    pub scaling_residual: f64,
    pub beta_above_two_minus_two_alpha: bool,
    /// `(t/N)^j = N^{(α-1)j}`.
    pub scale_factor: f64,
    /// `N^{-βj/2}`.
    pub scale_reference: f64,
    /// Whether `(t/N)^j < N^{-βj/2}`, i.e. the rescaled ψ envelope is no
    /// larger than `C`.
    pub scale_factor_sufficient: bool,
    /// `C (t/N)^j N^{βj/2}`, the `χ̂` envelope implied by the ψ envelope.
    pub transferred_constant: f64,
}

/// Fits the final decay envelopes of `ψ_j` and of `χ̂_{A_j}` at a fixed `β`.
pub fn final_decay_report(trace: &ConstructionTrace, beta: f64) -> Result<FinalDecayReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("beta {beta} not in (0, 1]")));
    }
    let final_set = trace.final_set()?;
    let cfg = &trace.config;
    let j = cfg.depth as i32;
    let ambient = cfg.ambient() as f64;
    let chi = dft_indicator(final_set);
    let scale_factor = (cfg.keep as f64 / cfg.branching as f64).powi(j);
    let psi = chi.scaled(1.0 / scale_factor);

    let psi_fit = decay_fit(
        &psi,
        &DecayOptions { beta: Some(beta), form: DecayForm::Plain, ..Default::default() },
    )?;
    let chi_fit = decay_fit(
        &chi,
        &DecayOptions { beta: Some(beta), form: DecayForm::Scaled, ..Default::default() },
    )?;
    let scaling_residual = chi
        .coeffs()
        .iter()
        .zip(psi.coeffs())
        .map(|(c, p)| (c - p * scale_factor).norm())
        .fold(0.0, f64::max);
    let scale_reference = ambient.powf(-beta / 2.0);
    let alpha = cfg.alpha();
    Ok(FinalDecayReport {
        alpha,
        beta,
        transferred_constant: psi_fit.constant * scale_factor / scale_reference,
        psi: psi_fit,
        chi: chi_fit,
        dc: chi.coeffs()[0].re,
        scaling_residual,
        beta_above_two_minus_two_alpha: beta > 2.0 - 2.0 * alpha,
        scale_factor,
        scale_reference,
        scale_factor_sufficient: scale_factor < scale_reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        let eta = eta_threshold(8, 6, 64);
        assert!((eta - (32.0 * 32768f64.ln() / 6.0).sqrt()).abs() < 1e-12);
        assert!((eta - 7.446).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for t in 1..=8 {
            let e = eta_threshold(8, t, 64);
            assert!(e < prev);
            prev = e;
        }
        assert!((eta_threshold(5, 3, 1) - (32.0 * 200f64.ln() / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn keep_everything() {
        let trace = construct(&SalemConfig::new(8, 8, 3, 9)).unwrap();
        assert_eq!(trace.final_set().unwrap(), &DiscreteSet::full(512).unwrap());
        let psi = psi_series(&trace).unwrap();
        for m in 1..psi.per_stage.len() {
            assert_eq!(psi.per_stage[m], psi.per_stage[0]);
        }
        let report = psi_diff_check(&psi, &trace.config, FrequencyMode::Symmetric);
        assert!(report.violations.is_empty());
        assert!(report.max_ratio.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn cardinalities_and_nesting() {
        let trace = construct(&SalemConfig::new(3, 1, 2, 4)).unwrap();
        let sizes: Vec<usize> = trace.sets.iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![9, 3, 1]);

        for seed in 0..5 {
            let cfg = SalemConfig::new(5, 3, 3, seed);
            let trace = construct(&cfg).unwrap();
            for (m, set) in trace.sets.iter().enumerate() {
                assert_eq!(set.len(), 3usize.pow(m as u32) * 5usize.pow(3 - m as u32));
                assert_eq!(set.ambient(), 125);
            }
            for pair in trace.sets.windows(2) {
                assert!(pair[1].is_subset(&pair[0]));
            }
            for stage in &trace.stages {
                assert_eq!(stage.grid.len(), stage.chosen.len() / 3 * 5);
                // t chosen blocks per surviving interval
                for chunk in stage.chosen.chunks(3) {
                    let parent = chunk[0] / (stage.block_length * 5);
                    assert!(chunk.iter().all(|&b| b / (stage.block_length * 5) == parent));
                }
            }
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let a = construct(&SalemConfig::new(8, 6, 3, 11)).unwrap();
        let b = construct(&SalemConfig::new(8, 6, 3, 11)).unwrap();
        assert_eq!(a, b);
        let c = construct(&SalemConfig::new(8, 6, 3, 12)).unwrap();
        assert_ne!(a.stages, c.stages);
    }

    #[test]
    fn psi_normalization() {
        let trace = construct(&SalemConfig::new(4, 3, 4, 2)).unwrap();
        let psi = psi_series(&trace).unwrap();
        for (m, spec) in psi.per_stage.iter().enumerate() {
            assert!((spec.coeffs()[0] - 1.0).norm() < 1e-12);
            let cap = (4.0f64 / 3.0).powi(m as i32);
            assert!(spec.coeffs().iter().all(|c| c.norm() <= cap + 1e-12));
        }
        assert!(psi.per_stage[0].coeffs()[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn psi_bound_branches() {
        let cfg = SalemConfig::new(8, 6, 4, 1);
        let base = 32.0 * 6f64.powf(-1.0) * (8.0f64 * 64.0).ln();
        assert!((psi_diff_bound(&cfg, 1, 10) - base).abs() < 1e-12);
        let k = 1000;
        assert!((psi_diff_bound(&cfg, 1, k) - base * 64.0 / k as f64).abs() < 1e-12);
    }

    #[test]
    fn rejection_sampling_paths() {
        // a tight threshold forces rejections but stays satisfiable
        let mut cfg = SalemConfig::new(8, 4, 2, 3);
        cfg.verify_blocks = true;
        cfg.eta_override = Some(0.6);
        cfg.max_retries = 10_000;
        let trace = construct(&cfg).unwrap();
        assert!(trace.stages.iter().all(|s| s.eta == Some(0.6)));
        for stage in &trace.stages {
            let period = cfg.ambient() / stage.block_length;
            for chunk in stage.chosen.chunks(4) {
                let base = chunk[0] - chunk[0] % (stage.block_length * 8);
                let idx: Vec<usize> = chunk.iter().map(|&b| (b - base) / stage.block_length).collect();
                assert!(max_block_deviation(&idx, 8, 1, period, period) <= 0.6);
            }
        }

        cfg.eta_override = Some(1e-6);
        cfg.max_retries = 5;
        assert!(matches!(
            construct(&cfg),
            Err(Error::Construction { stage: 0, block: 0, draws: 5 })
        ));

        // the default threshold exceeds 2 and never rejects
        let mut cfg = SalemConfig::new(8, 6, 3, 1);
        cfg.verify_blocks = true;
        let trace = construct(&cfg).unwrap();
        assert!(trace.stages.iter().flat_map(|s| &s.retries).all(|&r| r == 0));
        assert_eq!(trace.sets, construct(&SalemConfig::new(8, 6, 3, 1)).unwrap().sets);
    }

    #[test]
    fn full_range_check_matches_period_check() {
        let mut cfg = SalemConfig::new(5, 3, 3, 8);
        cfg.verify_blocks = true;
        cfg.eta_override = Some(0.9);
        cfg.max_retries = 1000;
        let fast = construct(&cfg).unwrap();
        cfg.full_range = true;
        let slow = construct(&cfg).unwrap();
        assert_eq!(fast.sets, slow.sets);
    }

    #[test]
    fn block_deviation_oracle() {
        // direct evaluation over absolute positions inside [0, N^j)
        let (n, block_len, ambient) = (5usize, 25usize, 125usize);
        let pick = [0usize, 2, 3];
        let offset = 50;
        let mut worst = 0.0f64;
        for k in 1..ambient {
            let s = |pts: &mut dyn Iterator<Item = usize>| -> Complex64 {
                pts.map(|p| Complex64::from_polar(1.0, -2.0 * PI * (k * p) as f64 / ambient as f64))
                    .sum()
            };
            let chosen = s(&mut pick.iter().map(|&i| offset + i * block_len)) / 3.0;
            let full = s(&mut (0..n).map(|i| offset + i * block_len)) / n as f64;
            worst = worst.max((chosen - full).norm());
        }
        let period = ambient / block_len;
        assert!((max_block_deviation(&pick, n, 1, period, period) - worst).abs() < 1e-12);
        assert!((max_block_deviation(&pick, n, block_len, ambient, ambient) - worst).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(SalemConfig::new(1, 1, 2, 0).validate().is_err());
        assert!(SalemConfig::new(4, 0, 2, 0).validate().is_err());
        assert!(SalemConfig::new(4, 5, 2, 0).validate().is_err());
        assert!(SalemConfig::new(4, 2, 0, 0).validate().is_err());
        assert!(matches!(SalemConfig::new(10, 2, 9, 0).validate(), Err(Error::SizeLimit(_))));
        assert!(matches!(SalemConfig::new(10, 2, 30, 0).validate(), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn incomplete_trace_is_rejected() {
        let mut trace = construct(&SalemConfig::new(4, 2, 2, 0)).unwrap();
        trace.sets.pop();
        trace.stages.pop();
        assert!(matches!(psi_series(&trace), Err(Error::State(_))));
        assert!(matches!(final_decay_report(&trace, 0.7), Err(Error::State(_))));
    }
}

//! Counting 3-term arithmetic progressions, exactly and through the
//! trilinear form `Λ₃(f, g, h) = E_{x,r} f(x) g(x+r) h(x+2r)`.
//!
//! Cyclic counts are over ordered triples in `Z_N` and include the `|A|`
//! trivial triples with difference zero. Genuine counts are progressions
//! `x, x+r, x+2r` with `r >= 1` inside `[0, N)`, each counted once; a
//! nontrivial cyclic progression contributes two ordered triples (`±r`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intsets::{fractional_density_fit, DiscreteSet};
use crate::spectral::{
    decay_fit, dft_indicator, fejer_split_with, mean_split, DecayFit, DecayForm, DecayOptions,
    FejerParams, FejerVariant, FrequencyMode, Spectrum,
};

/// Relative agreement required between direct and spectral `Λ₃`.
pub const LAMBDA3_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    #[default]
    Spectral,
    Both,
}

fn require_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        Err(Error::Parity(n))
    } else {
        Ok(())
    }
}

fn agrees(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= LAMBDA3_TOLERANCE * a.norm().max(b.norm()) + 1e-15
}

/// `Λ₃(f, g, h)` from point values.
///
/// The spectral route evaluates `Σ_n f̂(n) ĝ(-2n) ĥ(n)` and needs an odd
/// modulus; `Method::Both` runs the two and fails if they disagree.
pub fn lambda3(
    f: &[Complex64],
    g: &[Complex64],
    h: &[Complex64],
    method: Method,
) -> Result<Complex64> {
    let n = f.len();
    if g.len() != n || h.len() != n {
        return Err(Error::Argument(format!(
            "modulus mismatch: {}, {}, {}",
            n,
            g.len(),
            h.len()
        )));
    }
    if n == 0 {
        return Err(Error::Argument("Λ₃ of empty sequences".into()));
    }
    match method {
        Method::Direct => Ok(lambda3_direct(f, g, h)),
        Method::Spectral => {
            require_odd(n)?;
            lambda3_spectra(
                &Spectrum::of_values(f)?,
                &Spectrum::of_values(g)?,
                &Spectrum::of_values(h)?,
            )
        }
        Method::Both => {
            let direct = lambda3(f, g, h, Method::Direct)?;
            let spectral = lambda3(f, g, h, Method::Spectral)?;
            if !agrees(direct, spectral) {
                return Err(Error::OracleMismatch(format!(
                    "Λ₃ direct {direct} vs spectral {spectral}"
                )));
            }
            Ok(direct)
        }
    }
}

fn lambda3_direct(f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Complex64 {
    let n = f.len();
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..n {
        if f[x] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        let (mut y, mut z) = (x, x);
        for _ in 0..n {
            inner += g[y] * h[z];
            y = if y + 1 == n { 0 } else { y + 1 };
            z = (z + 2) % n;
        }
        total += f[x] * inner;
    }
    total / (n as f64 * n as f64)
}

/// `Σ_n f̂(n) ĝ(-2n) ĥ(n)` for spectra on a common odd modulus.
pub fn lambda3_spectra(f: &Spectrum, g: &Spectrum, h: &Spectrum) -> Result<Complex64> {
    let n = f.modulus();
    if g.modulus() != n || h.modulus() != n {
        return Err(Error::Argument("spectra have different moduli".into()));
    }
    require_odd(n)?;
    let (fc, gc, hc) = (f.coeffs(), g.coeffs(), h.coeffs());
    Ok((0..n)
        .map(|k| fc[k] * gc[(2 * (n - k)) % n] * hc[k])
        .sum())
}

/// Number of ordered triples `(x, y, z) ∈ A³` with `x + y ≡ 2z (mod N)`.
pub fn congruence_count(set: &DiscreteSet, method: Method) -> Result<u64> {
    match method {
        Method::Direct => Ok(congruence_direct(set)),
        Method::Spectral => congruence_spectral(set),
        Method::Both => {
            let direct = congruence_direct(set);
            let spectral = congruence_spectral(set)?;
            if direct != spectral {
                return Err(Error::OracleMismatch(format!(
                    "congruence count direct {direct} vs spectral {spectral}"
                )));
            }
            Ok(direct)
        }
    }
}

fn congruence_direct(set: &DiscreteSet) -> u64 {
    let n = set.ambient();
    let mask = set.mask();
    let mut count = 0u64;
    if n % 2 == 1 {
        let half = n.div_ceil(2); // inverse of 2 mod n
        for &x in set.elements() {
            for &y in set.elements() {
                let z = ((x + y) % n * half) % n;
                count += mask.contains(z) as u64;
            }
        }
    } else {
        // 2z ≡ s has the two solutions s/2 and s/2 + N/2 when s is even
        for &x in set.elements() {
            for &y in set.elements() {
                let s = (x + y) % n;
                if s.is_multiple_of(2) {
                    count += mask.contains(s / 2) as u64;
                    count += mask.contains(s / 2 + n / 2) as u64;
                }
            }
        }
    }
    count
}

fn congruence_spectral(set: &DiscreteSet) -> Result<u64> {
    let n = set.ambient();
    require_odd(n)?;
    let chi = dft_indicator(set);
    let value = lambda3_spectra(&chi, &chi, &chi)?.re * (n as f64) * (n as f64);
    Ok(value.round().max(0.0) as u64)
}

/// `N² Λ₃(χ, χ, χ)` by enumeration: pairs `(x, r)` with `x, x+r, x+2r ∈ A` mod N.
fn cyclic_pair_count(set: &DiscreteSet) -> u64 {
    let n = set.ambient();
    let mask = set.mask();
    let mut count = 0u64;
    for &x in set.elements() {
        for &y in set.elements() {
            let z = (2 * y + n - x) % n;
            count += mask.contains(z) as u64;
        }
    }
    count
}

/// Progression counts for one set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct APReport {
    pub modulus: usize,
    pub congruence_count: u64,
    pub genuine_count: u64,
    pub trivial_count: u64,
    pub lambda3: f64,
    pub method: Method,
    pub witness: Option<[usize; 3]>,
}

pub fn count_aps(set: &DiscreteSet, method: Method) -> Result<APReport> {
    let n = set.ambient();
    let nn = n as f64 * n as f64;
    let congruence_count = congruence_count(set, method)?;
    let lambda3 = match method {
        Method::Direct => cyclic_pair_count(set) as f64 / nn,
        Method::Spectral => {
            let chi = dft_indicator(set);
            lambda3_spectra(&chi, &chi, &chi)?.re
        }
        Method::Both => {
            let direct = cyclic_pair_count(set) as f64 / nn;
            let chi = dft_indicator(set);
            let spectral = lambda3_spectra(&chi, &chi, &chi)?.re;
            if (direct - spectral).abs() > LAMBDA3_TOLERANCE * direct.abs() + 1e-15 {
                return Err(Error::OracleMismatch(format!(
                    "Λ₃ direct {direct} vs spectral {spectral}"
                )));
            }
            direct
        }
    };
    let (genuine_count, witness) = genuine_progressions(set);
    Ok(APReport {
        modulus: n,
        congruence_count,
        genuine_count,
        trivial_count: set.len() as u64,
        lambda3,
        method,
        witness,
    })
}

/// Progressions `x < x+r < x+2r` inside `[0, N)`, each counted once.
pub fn genuine_ap_count(set: &DiscreteSet) -> u64 {
    genuine_progressions(set).0
}

/// Genuine count together with the first progression found.
pub fn genuine_progressions(set: &DiscreteSet) -> (u64, Option<[usize; 3]>) {
    let n = set.ambient();
    let mask = set.mask();
    let elements = set.elements();
    let mut count = 0u64;
    let mut witness = None;
    for (i, &x) in elements.iter().enumerate() {
        for &y in &elements[i + 1..] {
            let z = 2 * y - x;
            if z >= n {
                break;
            }
            if mask.contains(z) {
                count += 1;
                witness.get_or_insert([x, y, z]);
            }
        }
    }
    (count, witness)
}

/// `[ceil(N/3), floor(2N/3))`.
pub fn middle_bounds(n: usize) -> (usize, usize) {
    (n.div_ceil(3), 2 * n / 3)
}

/// `M_A = A ∩ [ceil(N/3), floor(2N/3))`.
pub fn middle_restrict(set: &DiscreteSet) -> Result<DiscreteSet> {
    let n = set.ambient();
    if n < 3 {
        return Err(Error::Argument(format!("middle third needs ambient >= 3, got {n}")));
    }
    let (lo, hi) = middle_bounds(n);
    DiscreteSet::new(
        n,
        set.elements().iter().copied().filter(|&e| e >= lo && e < hi).collect(),
    )
}

/// Parameters of the linear-uniformity guarantee; `β = 2α - 2 - ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityParams {
    pub delta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub beta: f64,
}

/// Default slack `ε` in `β = 2α - 2 - ε`.
pub const DEFAULT_EPSILON: f64 = 0.05;

impl UniformityParams {
    pub fn new(delta: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!("alpha {alpha} not in (0, 1]")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { delta, alpha, epsilon, beta: 2.0 * alpha - 2.0 - epsilon })
    }

    /// `α` from the set's density fit, hence `δ = 1`.
    pub fn from_set(set: &DiscreteSet, epsilon: f64) -> Result<Self> {
        let est = fractional_density_fit(set)?;
        Self::new(est.delta_hat, est.alpha_hat, epsilon)
    }

    /// Fixed `α`, with `δ = |A| / N^α`.
    pub fn with_alpha(set: &DiscreteSet, alpha: f64, epsilon: f64) -> Result<Self> {
        let delta = set.len() as f64 / (set.ambient() as f64).powf(alpha);
        Self::new(delta, alpha, epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    Guaranteed,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GuaranteeReport {
    pub applicable: bool,
    pub max_nonzero_coeff: f64,
    pub coeff_bound: f64,
    pub coefficient_condition: bool,
    pub middle_size: usize,
    pub middle_bound: f64,
    pub middle_condition: bool,
    pub size_threshold: f64,
    pub size_condition: bool,
    pub lower_bound: f64,
    pub conclusion: Conclusion,
    pub reasons: Vec<String>,
}

/// Evaluates the linear-uniformity criterion for a nontrivial progression.
///
/// Applicable when every nonzero-frequency coefficient is at most
/// `δ² N^β / 32`, `|M_A| >= δ N^α / 4` and `N > 32 / δ²`; the conclusion is
/// `Guaranteed` when, in addition, `δ³ N^{3α-1} / 32 - δ N^α > 0`.
pub fn uniformity_guarantee(set: &DiscreteSet, params: &UniformityParams) -> Result<GuaranteeReport> {
    let n = set.ambient() as f64;
    let UniformityParams { delta, alpha, beta, .. } = *params;
    let size = delta * n.powf(alpha);
    if (size - set.len() as f64).abs() > 0.5 + 1e-9 * size {
        return Err(Error::Argument(format!(
            "δ N^α = {size} does not match |A| = {}",
            set.len()
        )));
    }
    let chi = dft_indicator(set);
    let max_nonzero_coeff = chi.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let coeff_bound = delta * delta * n.powf(beta) / 32.0;
    let (lo, hi) = middle_bounds(set.ambient());
    let middle_size = set.elements().iter().filter(|&&e| e >= lo && e < hi).count();
    let middle_bound = size / 4.0;
    let size_threshold = 32.0 / (delta * delta);
    let lower_bound = delta.powi(3) * n.powf(3.0 * alpha - 1.0) / 32.0 - size;

    let coefficient_condition = max_nonzero_coeff <= coeff_bound;
    let middle_condition = middle_size as f64 >= middle_bound;
    let size_condition = n > size_threshold;
    let mut reasons = Vec::new();
    if !coefficient_condition {
        reasons.push(format!(
            "max nonzero coefficient {max_nonzero_coeff:.6e} exceeds δ²N^β/32 = {coeff_bound:.6e}"
        ));
    }
    if !middle_condition {
        reasons.push(format!("|M_A| = {middle_size} below δN^α/4 = {middle_bound:.6}"));
    }
    if !size_condition {
        reasons.push(format!("N = {n} not above 32/δ² = {size_threshold:.6}"));
    }
    let applicable = coefficient_condition && middle_condition && size_condition;
    if applicable && lower_bound <= 0.0 {
        reasons.push(format!("lower bound {lower_bound:.6e} is not positive"));
    }
    let conclusion = if applicable && lower_bound > 0.0 {
        Conclusion::Guaranteed
    } else {
        Conclusion::NotApplicable
    };
    Ok(GuaranteeReport {
        applicable,
        max_nonzero_coeff,
        coeff_bound,
        coefficient_condition,
        middle_size,
        middle_bound,
        middle_condition,
        size_threshold,
        size_condition,
        lower_bound,
        conclusion,
        reasons,
    })
}

/// Same elements inside `Z_{3N}`; no element lies in `[N, 3N)`, so every
/// nontrivial cyclic progression of the result is genuine.
pub fn embed_three_n(set: &DiscreteSet) -> DiscreteSet {
    set.with_ambient(3 * set.ambient()).expect("tripling keeps elements in range")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmearRow {
    pub k: usize,
    /// `|χ̂_{A'}(3k)|² + |χ̂_{A'}(3k-1)|² + |χ̂_{A'}(3k-2)|²`.
    pub group_sum: f64,
    /// `(1/3) |χ̂_A(k)|²`.
    pub target: f64,
    pub ratio: Option<f64>,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmearingReport {
    pub modulus: usize,
    pub rows: Vec<SmearRow>,
    pub aggregate_lhs: f64,
    pub aggregate_rhs: f64,
    pub aggregate_residual: f64,
    pub exceedances: Vec<usize>,
}

/// Compares the embedded spectrum, grouped in threes, with the original.
///
/// The aggregate `Σ_m |χ̂_{A'}(m)|² = (1/3) Σ_k |χ̂_A(k)|²` always holds; the
/// groupwise comparison can fail and is only recorded.
pub fn smearing_diagnostic(set: &DiscreteSet) -> SmearingReport {
    let n = set.ambient();
    let chi = dft_indicator(set);
    let embedded = dft_indicator(&embed_three_n(set));
    let rows: Vec<SmearRow> = (0..n)
        .map(|k| {
            let k3 = 3 * k as i64;
            let group_sum = (0..3).map(|d| embedded.at(k3 - d).norm_sqr()).sum::<f64>();
            let target = chi.coeffs()[k].norm_sqr() / 3.0;
            let ratio = (target > 0.0).then(|| group_sum / target);
            let exceeds = group_sum > target * (1.0 + 1e-9) + 1e-15;
            SmearRow { k, group_sum, target, ratio, exceeds }
        })
        .collect();
    let aggregate_lhs = embedded.energy();
    let aggregate_rhs = chi.energy() / 3.0;
    let exceedances = rows.iter().filter(|r| r.exceeds).map(|r| r.k).collect();
    SmearingReport {
        modulus: n,
        rows,
        aggregate_lhs,
        aggregate_rhs,
        aggregate_residual: (aggregate_lhs - aggregate_rhs).abs(),
        exceedances,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im, abs: z.norm() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub variant: FejerVariant,
    pub epsilon: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { variant: FejerVariant::OneSided, epsilon: DEFAULT_EPSILON }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BetaChecks {
    /// `β > 2 - 2α`.
    pub above_two_minus_two_alpha: bool,
    /// `2/3 < β <= 1`.
    pub in_window: bool,
}

/// Everything the decay-based progression argument looks at, for one set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem41Report {
    pub modulus: usize,
    pub cardinality: usize,
    pub alpha_hat: f64,
    pub delta_hat: f64,
    pub alpha_above_half: bool,
    pub fejer_cutoff: usize,
    pub fejer_variant: FejerVariant,
    pub decay: DecayFit,
    pub beta_checks: BetaChecks,
    /// `Λ₃(μ_i, μ_j, μ_k)` for `i, j, k ∈ {1, 2}`, keyed like `"m1m2m1"`.
    pub lambda3_terms: BTreeMap<String, ComplexValue>,
    pub lambda3_total: ComplexValue,
    /// `|Σ terms - Λ₃(μ, μ, μ)|`.
    pub decomposition_residual: f64,
    /// `Λ₃` terms of the `μ₃/μ₄` split of `μ₁`, keyed like `"m3m4m3"`.
    pub mean_split_terms: BTreeMap<String, ComplexValue>,
    pub mean_split_residual: f64,
    pub mu4_cube: f64,
    /// `δ³ N^{3α-3}`.
    pub mu4_reference: f64,
    /// `N^{-3β/2}`, the scale of every term involving `μ₂`.
    pub remainder_reference: f64,
    /// `Λ₃(μ, μ, μ) N^{3-3α}`.
    pub scale_constant: f64,
    pub congruence_count: u64,
    pub trivial_count: u64,
    /// Genuine progressions from the cyclic count in `Z_{3N}`.
    pub genuine_count: u64,
    pub genuine_count_brute: u64,
    pub genuine_agrees: bool,
    pub witness: Option<[usize; 3]>,
    pub guarantee: Option<GuaranteeReport>,
    pub progression_found: bool,
}

fn triple_terms(
    labels: [&str; 2],
    parts: [&Spectrum; 2],
) -> Result<BTreeMap<String, ComplexValue>> {
    let mut out = BTreeMap::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let value = lambda3_spectra(parts[i], parts[j], parts[k])?;
                out.insert(format!("{}{}{}", labels[i], labels[j], labels[k]), value.into());
            }
        }
    }
    Ok(out)
}

fn residual(terms: &BTreeMap<String, ComplexValue>, total: Complex64) -> f64 {
    let sum: Complex64 = terms.values().map(|v| Complex64::new(v.re, v.im)).sum();
    (sum - total).norm()
}

/// Runs the full decay/decomposition/counting pipeline on a set with odd
/// ambient. Fails only on parameter errors; a set violating the density or
/// decay hypotheses still gets a complete report with the checks marked false.
pub fn theorem41_verify(
    set: &DiscreteSet,
    fejer: FejerParams,
    beta_target: Option<f64>,
    opts: VerifyOptions,
) -> Result<Theorem41Report> {
    let n = set.ambient();
    require_odd(n)?;
    fejer.validate(n)?;
    let est = fractional_density_fit(set)?;
    let nf = n as f64;

    let chi = dft_indicator(set);
    let decay = decay_fit(
        &chi,
        &DecayOptions {
            beta: beta_target,
            form: DecayForm::Scaled,
            frequency: FrequencyMode::Raw,
            ..Default::default()
        },
    )?;
    let beta = decay.beta;
    let beta_checks = BetaChecks {
        above_two_minus_two_alpha: beta > 2.0 - 2.0 * est.alpha_hat,
        in_window: beta > 2.0 / 3.0 && beta <= 1.0,
    };

    let (mu1, mu2) = fejer_split_with(&chi, fejer, opts.variant)?;
    let total = lambda3_spectra(&chi, &chi, &chi)?;
    let lambda3_terms = triple_terms(["m1", "m2"], [&mu1, &mu2])?;
    let (mu3, mu4) = mean_split(&mu1);
    let mean_split_terms = triple_terms(["m3", "m4"], [&mu3, &mu4])?;
    let mu1_total = lambda3_spectra(&mu1, &mu1, &mu1)?;
    let mu4_cube = mean_split_terms["m4m4m4"].re;
    let mu4_reference = est.delta_hat.powi(3) * nf.powf(3.0 * est.alpha_hat - 3.0);

    let congruence_count = congruence_count(set, Method::Spectral)?;
    let embedded_count = congruence_count_embedded(set)?;
    let genuine_count = embedded_count.saturating_sub(set.len() as u64) / 2;
    let (genuine_count_brute, witness) = genuine_progressions(set);

    let guarantee = if set.is_empty() {
        None
    } else {
        Some(uniformity_guarantee(set, &UniformityParams::from_set(set, opts.epsilon)?)?)
    };

    Ok(Theorem41Report {
        modulus: n,
        cardinality: set.len(),
        alpha_hat: est.alpha_hat,
        delta_hat: est.delta_hat,
        alpha_above_half: est.alpha_hat > 0.5,
        fejer_cutoff: fejer.cutoff,
        fejer_variant: opts.variant,
        decay,
        beta_checks,
        decomposition_residual: residual(&lambda3_terms, total),
        lambda3_terms,
        lambda3_total: total.into(),
        mean_split_residual: residual(&mean_split_terms, mu1_total),
        mean_split_terms,
        mu4_cube,
        mu4_reference,
        remainder_reference: nf.powf(-1.5 * beta),
        scale_constant: total.re * nf.powf(3.0 - 3.0 * est.alpha_hat),
        congruence_count,
        trivial_count: set.len() as u64,
        genuine_count,
        genuine_count_brute,
        genuine_agrees: genuine_count == genuine_count_brute,
        witness,
        guarantee,
        progression_found: genuine_count > 0,
    })
}

fn congruence_count_embedded(set: &DiscreteSet) -> Result<u64> {
    congruence_count(&embed_three_n(set), Method::Spectral)
}

//! Discrete Fourier analysis of functions on `Z_N`.
//!
//! Coefficients use the 1/N normalization
//! `f̂(k) = (1/N) Σ_n f(n) e^{-2πikn/N}`, so an indicator's DC term is its
//! relative size.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intsets::DiscreteSet;

/// Coefficients below this modulus are treated as numerically zero.
pub const ZERO_COEFF: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    modulus: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Argument("spectrum needs at least one coefficient".into()));
        }
        Ok(Self { modulus: coeffs.len(), coeffs })
    }

    /// Forward transform of arbitrary point values.
    pub fn of_values(values: &[Complex64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("cannot transform an empty sequence".into()));
        }
        let n = values.len();
        let mut buf = values.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(Self { modulus: n, coeffs: buf })
    }

    pub fn of_real(values: &[f64]) -> Result<Self> {
        let values: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::of_values(&values)
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at `k` read modulo N; accepts negative frequencies.
    pub fn at(&self, k: i64) -> Complex64 {
        self.coeffs[k.rem_euclid(self.modulus as i64) as usize]
    }

    /// Point values `f(x) = Σ_k f̂(k) e^{2πikx/N}`.
    pub fn synthesize(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        FftPlanner::new().plan_fft_inverse(self.modulus).process(&mut buf);
        buf
    }

    /// `Σ_k |f̂(k)|²`, equal to the mean of `|f|²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Spectrum of the indicator of `set` inside `Z_ambient`.
pub fn dft_indicator(set: &DiscreteSet) -> Spectrum {
    Spectrum::of_real(&set.indicator()).expect("ambient is positive")
}

/// Cutoff `K` of the Fejér-weighted low-pass split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FejerParams {
    pub cutoff: usize,
}

impl FejerParams {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Parameter("Fejér cutoff must be positive".into()));
        }
        Ok(Self { cutoff })
    }

    /// `K = floor(N^{1/3})`, clamped so that `K < N/2`.
    pub fn auto(modulus: usize) -> Result<Self> {
        if modulus < 3 {
            return Err(Error::Parameter(format!(
                "no legal Fejér cutoff for modulus {modulus}"
            )));
        }
        let mut k = (modulus as f64).cbrt().floor() as usize;
        while k > 0 && k.pow(3) > modulus {
            k -= 1;
        }
        while (k + 1).pow(3) <= modulus {
            k += 1;
        }
        Self::new(k.clamp(1, (modulus - 1) / 2))
    }

    pub fn validate(&self, modulus: usize) -> Result<()> {
        if self.cutoff == 0 || 2 * self.cutoff >= modulus {
            return Err(Error::Parameter(format!(
                "Fejér cutoff {} must satisfy 0 < K < N/2 for N = {modulus}",
                self.cutoff
            )));
        }
        Ok(())
    }
}

/// Which frequencies the low-pass weight `1 - n/(K+1)` applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FejerVariant {
    /// Frequencies `0..=K` only; `μ₁` is complex even for real input.
    #[default]
    OneSided,
    /// Frequencies `n` and `N - n` weighted alike, keeping `μ₁` real.
    Symmetric,
}

impl FejerVariant {
    fn weight(self, n: usize, modulus: usize, cutoff: usize) -> f64 {
        let d = match self {
            FejerVariant::OneSided => n,
            FejerVariant::Symmetric => n.min(modulus - n),
        };
        if d <= cutoff {
            1.0 - d as f64 / (cutoff + 1) as f64
        } else {
            0.0
        }
    }
}

/// Splits `f̂` into the low-pass part `μ₁` and the remainder `μ₂ = f̂ - μ₁`.
pub fn fejer_split(spectrum: &Spectrum, params: FejerParams) -> Result<(Spectrum, Spectrum)> {
    fejer_split_with(spectrum, params, FejerVariant::OneSided)
}

pub fn fejer_split_with(
    spectrum: &Spectrum,
    params: FejerParams,
    variant: FejerVariant,
) -> Result<(Spectrum, Spectrum)> {
    let n = spectrum.modulus();
    params.validate(n)?;
    let mu1: Vec<Complex64> = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| c * variant.weight(k, n, params.cutoff))
        .collect();
    let mu2: Vec<Complex64> = spectrum.coeffs().iter().zip(&mu1).map(|(&c, &m)| c - m).collect();
    Ok((
        Spectrum { modulus: n, coeffs: mu1 },
        Spectrum { modulus: n, coeffs: mu2 },
    ))
}

/// `μ₃ = μ₁ - E(μ₁)` and `μ₄ = E(μ₁)`, the latter being the DC term alone.
pub fn mean_split(mu1: &Spectrum) -> (Spectrum, Spectrum) {
    let n = mu1.modulus();
    let mut mu3 = mu1.coeffs().to_vec();
    mu3[0] = Complex64::new(0.0, 0.0);
    let mut mu4 = vec![Complex64::new(0.0, 0.0); n];
    mu4[0] = mu1.coeffs()[0];
    (
        Spectrum { modulus: n, coeffs: mu3 },
        Spectrum { modulus: n, coeffs: mu4 },
    )
}

/// Linear bias `sup_ξ |f̂(ξ)|`.
pub fn linear_bias(spectrum: &Spectrum) -> f64 {
    spectrum.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `((1/N) Σ |f(n)|^p)^{1/p}`.
pub fn lp_norm(values: &[Complex64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("L^p norm needs p >= 1, got {p}")));
    }
    if values.is_empty() {
        return Err(Error::Argument("L^p norm of an empty sequence".into()));
    }
    let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
    Ok(mean.powf(1.0 / p))
}

/// Shape of the decay envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayForm {
    /// `|c(k)| <= C (|k| N)^{-β/2}`.
    #[default]
    Scaled,
    /// `|c(k)| <= C |k|^{-β/2}`.
    Plain,
}

/// How the frequency `|k|` is read for `k` in `[1, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyMode {
    /// The raw index `k`.
    #[default]
    Raw,
    /// Distance to zero in `Z_N`, `min(k, N - k)`.
    Symmetric,
}

impl FrequencyMode {
    pub fn magnitude(self, k: usize, modulus: usize) -> usize {
        match self {
            FrequencyMode::Raw => k,
            FrequencyMode::Symmetric => k.min(modulus - k),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecayOptions {
    /// Fixed exponent; fitted from dyadic-block maxima when absent.
    pub beta: Option<f64>,
    /// Inclusive frequency range, `[1, N-1]` by default.
    pub k_range: Option<(usize, usize)>,
    pub form: DecayForm,
    pub frequency: FrequencyMode,
    /// Overrides `N` in the scaled form, for spectra living on a larger group.
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub k: usize,
    pub magnitude: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "C")]
    pub constant: f64,
    pub beta: f64,
    #[serde(rename = "betaFitted")]
    pub beta_fitted: bool,
    pub form: DecayForm,
    pub frequency: FrequencyMode,
    #[serde(rename = "kRange")]
    pub k_range: (usize, usize),
    pub violations: Vec<Violation>,
    pub degenerate: bool,
}

struct Envelope {
    scale: f64,
    lo: usize,
    hi: usize,
}

impl Envelope {
    fn new(spectrum: &Spectrum, opts: &DecayOptions) -> Result<Self> {
        let n = spectrum.modulus();
        let (lo, hi) = opts.k_range.unwrap_or((1, n.saturating_sub(1)));
        if lo == 0 || lo > hi || hi >= n {
            return Err(Error::Parameter(format!(
                "frequency range [{lo}, {hi}] is empty or outside [1, {}]",
                n.saturating_sub(1)
            )));
        }
        let scale = match opts.form {
            DecayForm::Scaled => opts.scale.unwrap_or(n as f64),
            DecayForm::Plain => 1.0,
        };
        Ok(Self { scale, lo, hi })
    }

    // `|c| (|k| s)^{β/2}`: the smallest C admitting frequency k
    fn ratio(&self, magnitude: f64, freq: usize, beta: f64) -> f64 {
        magnitude * (freq as f64 * self.scale).powf(beta / 2.0)
    }

    fn bound(&self, constant: f64, freq: usize, beta: f64) -> f64 {
        constant * (freq as f64 * self.scale).powf(-beta / 2.0)
    }
}

/// Fits the minimal envelope constant `C`, and `β` when not supplied.
///
/// `β` comes from a least-squares line through `(log k*, log max)` where the
/// maxima are taken over dyadic blocks `[2^i, 2^{i+1})`; numerically zero
/// coefficients are left out of the regression.
pub fn decay_fit(spectrum: &Spectrum, opts: &DecayOptions) -> Result<DecayFit> {
    let env = Envelope::new(spectrum, opts)?;
    let n = spectrum.modulus();
    let samples: Vec<(usize, usize, f64)> = (env.lo..=env.hi)
        .map(|k| (k, opts.frequency.magnitude(k, n), spectrum.coeffs()[k].norm()))
        .collect();
    let degenerate = samples.iter().all(|&(_, _, m)| m < ZERO_COEFF);
    let (beta, beta_fitted) = match opts.beta {
        Some(b) => (b, false),
        None if degenerate => (0.0, false),
        None => (regress_dyadic(&samples), true),
    };
    if !beta.is_finite() {
        return Err(Error::Parameter(format!("decay exponent {beta} is not finite")));
    }
    let constant = if degenerate {
        0.0
    } else {
        samples
            .iter()
            .map(|&(_, f, m)| env.ratio(m, f, beta))
            .fold(0.0, f64::max)
    };
    decay_check(spectrum, constant, beta, opts).map(|mut fit| {
        fit.beta_fitted = beta_fitted;
        fit.degenerate = degenerate;
        fit
    })
}

/// Lists every frequency in range whose coefficient exceeds the envelope.
/// Numerically zero coefficients never count as violations.
pub fn decay_check(
    spectrum: &Spectrum,
    constant: f64,
    beta: f64,
    opts: &DecayOptions,
) -> Result<DecayFit> {
    let env = Envelope::new(spectrum, opts)?;
    let n = spectrum.modulus();
    let mut violations = Vec::new();
    let mut degenerate = true;
    for k in env.lo..=env.hi {
        let f = opts.frequency.magnitude(k, n);
        let m = spectrum.coeffs()[k].norm();
        if m < ZERO_COEFF {
            continue;
        }
        degenerate = false;
        if env.ratio(m, f, beta) > constant {
            violations.push(Violation { k, magnitude: m, bound: env.bound(constant, f, beta) });
        }
    }
    Ok(DecayFit {
        constant,
        beta,
        beta_fitted: false,
        form: opts.form,
        frequency: opts.frequency,
        k_range: (env.lo, env.hi),
        violations,
        degenerate,
    })
}

fn regress_dyadic(samples: &[(usize, usize, f64)]) -> f64 {
    use std::collections::BTreeMap;
    let mut blocks: BTreeMap<u32, (usize, f64)> = BTreeMap::new();
    for &(_, f, m) in samples {
        if m < ZERO_COEFF || f == 0 {
            continue;
        }
        let entry = blocks.entry(f.ilog2()).or_insert((f, m));
        if m > entry.1 {
            *entry = (f, m);
        }
    }
    let points: Vec<(f64, f64)> = blocks
        .values()
        .map(|&(f, m)| ((f as f64).ln(), m.ln()))
        .collect();
    if points.len() < 2 {
        return 0.0;
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    -2.0 * sxy / sxx
}

//! Fractional-density integer sets, their discrete Fourier spectra, and
//! 3-term arithmetic progression counting.
//!
//! The crate is organised around [`DiscreteSet`], a finite subset of `[0, N)`
//! carrying its ambient length `N`. Sets come from deterministic Cantor-type
//! builds ([`intsets`]) or the randomized multiscale construction
//! ([`salemgen`]). [`spectral`] computes 1/N-normalized coefficients and the
//! Fejér low/high frequency split, and [`apcount`] counts progressions both by
//! enumeration and through the trilinear form `Λ₃`, cross-checking the two.

pub mod apcount;
mod error;
pub mod intsets;
pub mod io;
pub mod salemgen;
pub mod spectral;

pub use apcount::{
    congruence_count, count_aps, embed_three_n, genuine_ap_count, genuine_progressions, lambda3,
    middle_restrict, smearing_diagnostic, theorem41_verify, uniformity_guarantee, APReport,
    Conclusion, GuaranteeReport, Method, SmearingReport, Theorem41Report, UniformityParams,
    VerifyOptions,
};
pub use error::{Error, Result};
pub use intsets::{
    cantor_build, density_profile, fractional_density_fit, scale_embed, DensityEstimate,
    DiscreteSet,
};
pub use salemgen::{
    construct, eta_threshold, final_decay_report, psi_diff_check, psi_series, ConstructionTrace,
    PsiSeries, SalemConfig,
};
pub use spectral::{
    decay_check, decay_fit, dft_indicator, fejer_split, linear_bias, lp_norm, mean_split,
    DecayFit, DecayForm, DecayOptions, FejerParams, FejerVariant, FrequencyMode, Spectrum,
};

pub use num_complex::Complex64;

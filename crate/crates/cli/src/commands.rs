use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use apfourier_core::io::{format_set_text, read_set, spectrum_csv, to_json};
use apfourier_core::salemgen::TraceDocument;
use apfourier_core::spectral::FejerVariant;
use apfourier_core::{
    cantor_build, construct, count_aps, decay_fit, dft_indicator, final_decay_report,
    fractional_density_fit, psi_diff_check, psi_series, smearing_diagnostic, theorem41_verify,
    uniformity_guarantee, DecayForm, DecayOptions, DiscreteSet, Error, FejerParams,
    FrequencyMode, Method, Result, SalemConfig, UniformityParams, VerifyOptions,
};
use serde_json::{json, Value};

use crate::{
    Command, ConstructArgs, CountArgs, DecayArgs, FormArg, Format, GuaranteeArgs, Kind,
    MethodArg, Output, SmearArgs, SpectrumArgs, VerifyArgs,
};

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Construct(args) => run_construct(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Decay(args) => run_decay(args),
        Command::CountAps(args) => run_count(args),
        Command::Guarantee(args) => run_guarantee(args),
        Command::Verify(args) => run_verify(args),
        Command::Smear(args) => run_smear(args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn format_or(output: &Output, default: Format, allowed: &[Format]) -> Result<Format> {
    let format = output.format.unwrap_or(default);
    if !allowed.contains(&format) {
        return Err(Error::Argument(format!("format {format:?} is not supported here")));
    }
    Ok(format)
}

fn run_construct(args: &ConstructArgs) -> Result<()> {
    let format = args.format.unwrap_or(Format::Text);
    if format == Format::Csv {
        return Err(Error::Argument("sets are written as text or json".into()));
    }
    let (set, comments, mut summary, trace) = match args.kind {
        Kind::Cantor => {
            if args.branching.is_some() || args.keep.is_some() || args.verify_blocks || args.eta.is_some() {
                return Err(Error::Argument(
                    "--branching, --keep, --verify-blocks and --eta only apply to --kind salem".into(),
                ));
            }
            if args.psi_check || args.beta.is_some() || args.trace_out.is_some() {
                return Err(Error::Argument(
                    "--psi-check, --beta and --trace-out only apply to --kind salem".into(),
                ));
            }
            let set = cantor_build(args.depth)?;
            let summary = json!({ "kind": "cantor", "depth": args.depth });
            (set, vec![format!("cantor depth {}", args.depth)], summary, None)
        }
        Kind::Salem => {
            let (Some(branching), Some(keep)) = (args.branching, args.keep) else {
                return Err(Error::Argument("--kind salem needs --branching and --keep".into()));
            };
            let config = SalemConfig {
                max_retries: args.max_retries,
                eta_override: args.eta,
                verify_blocks: args.verify_blocks,
                full_range: args.full_range,
                ..SalemConfig::new(branching, keep, args.depth, args.seed)
            };
            let trace = construct(&config)?;
            let set = trace.final_set()?.clone();
            let comments = vec![
                format!("salem branching {branching} keep {keep} depth {}", args.depth),
                format!("seed {}", args.seed),
            ];
            let summary = json!({
                "kind": "salem",
                "seed": args.seed,
                "branching": branching,
                "keep": keep,
                "depth": args.depth,
                "alpha": config.alpha(),
                "retries": trace.stages.iter().map(|s| s.retries.iter().map(|&r| r as u64).sum::<u64>()).collect::<Vec<_>>(),
            });
            (set, comments, summary, Some(trace))
        }
    };

    let estimate = fractional_density_fit(&set).ok();
    summary["ambient"] = json!(set.ambient());
    summary["cardinality"] = json!(set.len());
    summary["alphaHat"] = json!(estimate.map(|e| e.alpha_hat));

    if let Some(trace) = &trace {
        if args.psi_check {
            let series = psi_series(trace)?;
            let mode = if args.raw_k { FrequencyMode::Raw } else { FrequencyMode::Symmetric };
            summary["psiCheck"] = serde_json::to_value(psi_diff_check(&series, &trace.config, mode))?;
        }
        if let Some(beta) = args.beta {
            summary["finalDecay"] = serde_json::to_value(final_decay_report(trace, beta)?)?;
        }
        if let Some(path) = &args.trace_out {
            let doc: TraceDocument = trace.document()?;
            fs::write(path, to_json(&doc)?)?;
        }
    }

    let set_text = match format {
        Format::Json => to_json(&set)?,
        _ => format_set_text(&set, &comments),
    };
    match &args.out {
        Some(path) => {
            fs::write(path, set_text)?;
            print!("{}", to_json(&summary)?);
        }
        None => print!("{set_text}"),
    }
    Ok(())
}

fn load(path: &Path, oddify: bool) -> Result<DiscreteSet> {
    let set = read_set(path)?;
    Ok(if oddify { set.oddified() } else { set })
}

fn run_spectrum(args: &SpectrumArgs) -> Result<()> {
    let set = load(&args.input.input, args.oddify)?;
    let spectrum = dft_indicator(&set);
    let text = match format_or(&args.output, Format::Csv, &[Format::Csv, Format::Json, Format::Text])? {
        Format::Json => {
            let coeffs: Vec<Value> = spectrum
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| json!({ "k": k, "re": c.re, "im": c.im, "abs": c.norm() }))
                .collect();
            to_json(&json!({ "modulus": spectrum.modulus(), "coeffs": coeffs }))?
        }
        _ => spectrum_csv(&spectrum),
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_decay(args: &DecayArgs) -> Result<()> {
    let set = read_set(&args.input.input)?;
    let n = set.ambient();
    let k_range = match (args.k_min, args.k_max) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(1), hi.unwrap_or(n.saturating_sub(1)))),
    };
    let opts = DecayOptions {
        beta: args.beta,
        k_range,
        form: match args.form {
            FormArg::Scaled => DecayForm::Scaled,
            FormArg::Plain => DecayForm::Plain,
        },
        frequency: if args.symmetric_k { FrequencyMode::Symmetric } else { FrequencyMode::Raw },
        scale: None,
    };
    let fit = decay_fit(&dft_indicator(&set), &opts)?;
    let text = match format_or(&args.output, Format::Json, &[Format::Json, Format::Text])? {
        Format::Text => format!(
            "C = {:.16e}\nbeta = {:.16e}\nbeta fitted = {}\ndegenerate = {}\nviolations = {}\n",
            fit.constant,
            fit.beta,
            fit.beta_fitted,
            fit.degenerate,
            fit.violations.len()
        ),
        _ => to_json(&fit)?,
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_count(args: &CountArgs) -> Result<()> {
    let set = load(&args.input.input, args.oddify)?;
    let method = match args.method {
        MethodArg::Direct => Method::Direct,
        MethodArg::Spectral => Method::Spectral,
        // the spectral half needs an odd modulus
        MethodArg::Both if set.ambient() % 2 == 0 => Method::Direct,
        MethodArg::Both => Method::Both,
    };
    let report = count_aps(&set, method)?;
    let text = match format_or(&args.output, Format::Json, &[Format::Json, Format::Text])? {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "modulus = {}", report.modulus);
            let _ = writeln!(s, "congruence count = {}", report.congruence_count);
            let _ = writeln!(s, "genuine count = {}", report.genuine_count);
            let _ = writeln!(s, "trivial count = {}", report.trivial_count);
            let _ = writeln!(s, "lambda3 = {:.16e}", report.lambda3);
            if let Some(w) = report.witness {
                let _ = writeln!(s, "witness = {} {} {}", w[0], w[1], w[2]);
            }
            s
        }
        _ => to_json(&report)?,
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_guarantee(args: &GuaranteeArgs) -> Result<()> {
    let set = read_set(&args.input.input)?;
    let params = match args.alpha {
        Some(alpha) => UniformityParams::with_alpha(&set, alpha, args.epsilon)?,
        None => UniformityParams::from_set(&set, args.epsilon)?,
    };
    let report = uniformity_guarantee(&set, &params)?;
    let text = match format_or(&args.output, Format::Json, &[Format::Json, Format::Text])? {
        Format::Text => {
            let mut s = format!("conclusion = {:?}\n", report.conclusion);
            for r in &report.reasons {
                let _ = writeln!(s, "reason: {r}");
            }
            s
        }
        _ => to_json(&json!({ "params": params, "guarantee": report }))?,
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_verify(args: &VerifyArgs) -> Result<()> {
    let set = load(&args.input.input, !args.no_oddify)?;
    let fejer = match args.fejer_k.as_str() {
        "auto" => FejerParams::auto(set.ambient())?,
        k => FejerParams::new(k.parse().map_err(|_| {
            Error::Argument(format!("--fejer-k expects `auto` or an integer, got `{k}`"))
        })?)?,
    };
    let opts = VerifyOptions {
        variant: if args.symmetric_fejer { FejerVariant::Symmetric } else { FejerVariant::OneSided },
        epsilon: args.epsilon,
    };
    let report = theorem41_verify(&set, fejer, args.beta, opts)?;
    let text = match format_or(&args.output, Format::Json, &[Format::Json, Format::Text])? {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "modulus = {}", report.modulus);
            let _ = writeln!(s, "alpha hat = {:.16e} (> 1/2: {})", report.alpha_hat, report.alpha_above_half);
            let _ = writeln!(s, "beta = {:.16e}, C = {:.16e}", report.decay.beta, report.decay.constant);
            let _ = writeln!(
                s,
                "beta > 2 - 2 alpha: {}, 2/3 < beta <= 1: {}",
                report.beta_checks.above_two_minus_two_alpha, report.beta_checks.in_window
            );
            let _ = writeln!(s, "genuine count = {} (brute force {})", report.genuine_count, report.genuine_count_brute);
            let _ = writeln!(s, "progression found = {}", report.progression_found);
            s
        }
        _ => to_json(&report)?,
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_smear(args: &SmearArgs) -> Result<()> {
    let set = read_set(&args.input.input)?;
    let report = smearing_diagnostic(&set);
    let text = match format_or(&args.output, Format::Json, &[Format::Json, Format::Csv, Format::Text])? {
        Format::Csv => {
            let mut s = String::from("k,groupSum,target,ratio,exceeds\n");
            for r in &report.rows {
                let ratio = r.ratio.map(|v| format!("{v:.14e}")).unwrap_or_default();
                let _ = writeln!(s, "{},{:.14e},{:.14e},{ratio},{}", r.k, r.group_sum, r.target, r.exceeds);
            }
            s
        }
        Format::Text => format!(
            "aggregate residual = {:.16e}\nexceedances = {:?}\n",
            report.aggregate_residual, report.exceedances
        ),
        Format::Json => to_json(&report)?,
    };
    emit(args.output.out.as_deref(), &text)
}

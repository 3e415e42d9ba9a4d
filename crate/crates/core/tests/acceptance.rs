//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use apfourier_core::io::to_json;
use apfourier_core::spectral::FejerVariant;
use apfourier_core::{
    cantor_build, congruence_count, construct, dft_indicator, embed_three_n, fejer_split,
    final_decay_report, fractional_density_fit, genuine_ap_count, lambda3, mean_split,
    psi_diff_check, psi_series, smearing_diagnostic, theorem41_verify, uniformity_guarantee,
    Complex64, Conclusion, DiscreteSet, FejerParams, FrequencyMode, Method, SalemConfig,
    UniformityParams, VerifyOptions,
};
use common::{brute_genuine, random_odd, random_set, rng};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if let false = $cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit_secs: f64) -> Outcome {
    ensure!(
        elapsed.as_secs_f64() < limit_secs,
        "took {:.2} s, limit {limit_secs} s",
        elapsed.as_secs_f64()
    );
    Ok(String::new())
}

fn c1_cantor() -> Outcome {
    let start = Instant::now();
    let c2 = cantor_build(2).map_err(|e| e.to_string())?;
    ensure!(c2.elements() == [1, 3, 7, 9], "C_2 = {:?}", c2.elements());
    let c8 = cantor_build(8).map_err(|e| e.to_string())?;
    ensure!(c8.len() == 256, "|C_8| = {}", c8.len());
    let alpha = fractional_density_fit(&c8).map_err(|e| e.to_string())?.alpha_hat;
    let target = 2f64.ln() / 3f64.ln();
    ensure!((alpha - target).abs() <= 1e-3, "alpha_hat {alpha} vs {target}");
    within(start.elapsed(), 1.0)?;
    Ok(format!("|C_8| = 256, alpha_hat = {alpha:.6}"))
}

fn c2_spectral_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = random_odd(&mut r, 5, 101);
        let set = random_set(&mut r, n);
        let f: Vec<Complex64> = set.indicator().into_iter().map(Complex64::from).collect();
        let direct = lambda3(&f, &f, &f, Method::Direct).map_err(|e| e.to_string())?;
        let spectral = lambda3(&f, &f, &f, Method::Spectral).map_err(|e| e.to_string())?;
        let scale = direct.norm().max(f64::MIN_POSITIVE);
        let rel = if direct.norm() == 0.0 { spectral.norm() } else { (spectral - direct).norm() / scale };
        worst = worst.max(rel);
        ensure!(rel <= 1e-9, "case {case}: N = {n}, relative error {rel:e}");
        let cd = congruence_count(&set, Method::Direct).map_err(|e| e.to_string())?;
        let cs = congruence_count(&set, Method::Spectral).map_err(|e| e.to_string())?;
        ensure!(cd == cs, "case {case}: N = {n}, counts {cd} vs {cs}");
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("200 sets, worst relative error {worst:.2e}"))
}

fn c3_counting_formulas() -> Outcome {
    for n in 1..=200usize {
        let full = DiscreteSet::full(n).map_err(|e| e.to_string())?;
        let got = genuine_ap_count(&full);
        let want = ((n - 1) * (n - 1) / 4) as u64;
        ensure!(got == want, "genuine(full [0,{n})) = {got}, want {want}");
    }
    let c2 = DiscreteSet::new(10, vec![1, 3, 7, 9]).unwrap();
    ensure!(genuine_ap_count(&c2) == 0, "genuine({{1,3,7,9}}) = {}", genuine_ap_count(&c2));
    for n in (1..=101usize).step_by(2) {
        let full = DiscreteSet::full(n).map_err(|e| e.to_string())?;
        for method in [Method::Direct, Method::Spectral] {
            let got = congruence_count(&full, method).map_err(|e| e.to_string())?;
            ensure!(got == (n * n) as u64, "congruence(full [0,{n})) = {got} via {method:?}");
        }
    }
    Ok("N <= 200 genuine, odd N <= 101 congruence".into())
}

fn c4_fejer() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = r.random_range(3..=300usize);
        let set = random_set(&mut r, n);
        let k = r.random_range(1..=(n - 1) / 2);
        let spectrum = dft_indicator(&set);
        let (mu1, mu2) = fejer_split(&spectrum, FejerParams::new(k).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for i in 0..n {
            let err = (mu1.coeffs()[i] + mu2.coeffs()[i] - spectrum.coeffs()[i]).norm();
            worst = worst.max(err);
            ensure!(err <= 1e-15, "case {case}: reconstruction error {err:e} at {i}");
            ensure!(i <= k || mu1.coeffs()[i] == Complex64::new(0.0, 0.0), "case {case}: mu1[{i}] != 0 above K = {k}");
        }
        let (mu3, mu4) = mean_split(&mu1);
        ensure!(mu3.coeffs()[0] == Complex64::new(0.0, 0.0), "case {case}: mu3(0) != 0");
        for i in 0..n {
            ensure!(mu3.coeffs()[i] + mu4.coeffs()[i] == mu1.coeffs()[i], "case {case}: mu3 + mu4 != mu1 at {i}");
        }
    }
    Ok(format!("50 sets, worst reconstruction error {worst:.1e}"))
}

fn c5_embedding() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let mut worst_coeff = 0.0f64;
    let mut worst_agg = 0.0f64;
    for case in 0..50 {
        let n = random_odd(&mut r, 3, 51);
        let set = random_set(&mut r, n);
        let embedded = embed_three_n(&set);
        let cyclic = congruence_count(&embedded, Method::Both).map_err(|e| e.to_string())?;
        let nontrivial = cyclic - set.len() as u64;
        let genuine = brute_genuine(&set);
        ensure!(nontrivial == 2 * genuine, "case {case}: N = {n}, nontrivial {nontrivial} vs 2 x {genuine}");
        let chi = dft_indicator(&set);
        let chi3 = dft_indicator(&embedded);
        for k in 0..n {
            let err = (chi3.coeffs()[3 * k] - chi.coeffs()[k] / 3.0).norm();
            worst_coeff = worst_coeff.max(err);
            ensure!(err <= 1e-12, "case {case}: 3k identity off by {err:e} at k = {k}");
        }
        let smear = smearing_diagnostic(&set);
        worst_agg = worst_agg.max(smear.aggregate_residual);
        ensure!(smear.aggregate_residual <= 1e-9, "case {case}: aggregate residual {:e}", smear.aggregate_residual);
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("50 sets, 3k error {worst_coeff:.1e}, aggregate residual {worst_agg:.1e}"))
}

fn c6_guarantee() -> Outcome {
    let mut instances: Vec<(DiscreteSet, Option<f64>)> = Vec::new();
    for n in [64usize, 65, 100, 127, 128, 200, 255, 256, 501, 1000, 1001] {
        instances.push((DiscreteSet::full(n).unwrap(), Some(1.0)));
        instances.push((DiscreteSet::full(n).unwrap(), None));
    }
    let mut r = rng(6);
    for _ in 0..40 {
        let n = random_odd(&mut r, 401, 1201);
        let removed = r.random_range(1..=20usize);
        let drop: Vec<usize> = rand::seq::index::sample(&mut r, n, removed).into_vec();
        let set = DiscreteSet::from_unsorted(n, (0..n).filter(|x| !drop.contains(x))).unwrap();
        instances.push((set, None));
    }
    for _ in 0..40 {
        let n = r.random_range(16..=600usize);
        instances.push((random_set(&mut r, n), None));
    }
    let mut guaranteed = 0;
    for (set, alpha) in &instances {
        let params = match alpha {
            Some(a) => UniformityParams::with_alpha(set, *a, 0.05),
            None => UniformityParams::from_set(set, 0.05),
        }
        .map_err(|e| e.to_string())?;
        let report = uniformity_guarantee(set, &params).map_err(|e| e.to_string())?;
        if report.conclusion == Conclusion::Guaranteed {
            guaranteed += 1;
            let g = brute_genuine(set);
            ensure!(g >= 1, "guaranteed but no progression: N = {}, |A| = {}", set.ambient(), set.len());
        }
    }
    ensure!(guaranteed > 0, "no instance reached the guaranteed conclusion");
    Ok(format!("{guaranteed} of {} instances guaranteed, all with a progression", instances.len()))
}

fn salem_config(seed: u64) -> SalemConfig {
    SalemConfig::new(8, 6, 4, seed)
}

fn c7_salem() -> Outcome {
    let mut notes = Vec::new();
    for seed in 1..=5u64 {
        let start = Instant::now();
        let config = salem_config(seed);
        let trace = construct(&config).map_err(|e| e.to_string())?;
        let set = trace.final_set().map_err(|e| e.to_string())?;
        ensure!(set.len() == 1296, "seed {seed}: |A_4| = {}", set.len());
        let again = construct(&config).map_err(|e| e.to_string())?;
        let a = to_json(&trace.document().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let b = to_json(&again.document().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(a == b, "seed {seed}: traces differ between runs");
        let series = psi_series(&trace).map_err(|e| e.to_string())?;
        for (m, psi) in series.per_stage.iter().enumerate() {
            let err = (psi.coeffs()[0] - Complex64::new(1.0, 0.0)).norm();
            ensure!(err <= 1e-12, "seed {seed}: psi_{m}(0) off by {err:e}");
        }
        let check = psi_diff_check(&series, &config, FrequencyMode::Symmetric);
        ensure!(check.violations.is_empty(), "seed {seed}: {} psi-difference violations", check.violations.len());
        let report = final_decay_report(&trace, 0.7).map_err(|e| e.to_string())?;
        for (name, fit) in [("psi", &report.psi), ("chi", &report.chi)] {
            ensure!(fit.constant.is_finite(), "seed {seed}: {name} envelope not finite");
            ensure!(fit.violations.is_empty(), "seed {seed}: {name} envelope has {} violations", fit.violations.len());
        }
        within(start.elapsed(), 60.0).map_err(|e| format!("seed {seed}: {e}"))?;
        let worst = check.max_ratio.iter().cloned().fold(0.0, f64::max);
        notes.push(format!("s{seed}: C={:.2} ratio={worst:.1e}", report.psi.constant));
    }
    Ok(notes.join(", "))
}

fn c8_pipeline() -> Outcome {
    let mut notes = Vec::new();
    for seed in 1..=5u64 {
        let start = Instant::now();
        let trace = construct(&salem_config(seed)).map_err(|e| e.to_string())?;
        let set = trace.final_set().map_err(|e| e.to_string())?;
        let odd = set.oddified();
        let fejer = FejerParams::auto(odd.ambient()).map_err(|e| e.to_string())?;
        let report = theorem41_verify(&odd, fejer, Some(0.7), VerifyOptions::default())
            .map_err(|e| e.to_string())?;
        let brute = brute_genuine(set);
        ensure!(report.genuine_count == brute, "seed {seed}: pipeline {} vs brute force {brute}", report.genuine_count);
        within(start.elapsed(), 120.0).map_err(|e| format!("seed {seed}: {e}"))?;
        notes.push(format!("s{seed}: {brute} (positive: {})", report.progression_found));
    }
    Ok(notes.join(", "))
}

fn c9_smearing() -> Outcome {
    let a = DiscreteSet::new(3, vec![0, 1]).unwrap();
    let report = smearing_diagnostic(&a);
    let row = &report.rows[1];
    ensure!((row.group_sum - 0.0849).abs() <= 2e-3, "G(1) = {}", row.group_sum);
    ensure!((row.target - 0.0370).abs() <= 2e-3, "target(1) = {}", row.target);
    ensure!(row.exceeds && report.exceedances.contains(&1), "exceedance at k = 1 not recorded");

    let b = DiscreteSet::new(2, vec![0]).unwrap();
    let report = smearing_diagnostic(&b);
    let row = &report.rows[1];
    ensure!((row.group_sum - 1.0 / 12.0).abs() <= 1e-12, "G(1) = {}", row.group_sum);
    ensure!((row.target - 1.0 / 12.0).abs() <= 1e-12, "target(1) = {}", row.target);
    ensure!(!row.exceeds, "equality case flagged as exceedance");
    Ok(format!("{{0,1}}: G(1) = {:.4} vs {:.4}; {{0}}: both 1/12", smearing_diagnostic(&a).rows[1].group_sum, smearing_diagnostic(&a).rows[1].target))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 cantor fidelity", c1_cantor),
        ("2 spectral oracle equivalence", c2_spectral_oracle),
        ("3 exact counting formulas", c3_counting_formulas),
        ("4 fejer decomposition", c4_fejer),
        ("5 embedding soundness", c5_embedding),
        ("6 guarantee soundness", c6_guarantee),
        ("7 salem construction", c7_salem),
        ("8 pipeline consistency", c8_pipeline),
        ("9 smearing diagnostic", c9_smearing),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2} s): {detail}"),
            Err(why) => {
                println!("FAIL  criterion {name} ({secs:.2} s): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn symmetric_fejer_variant_also_reconstructs() {
    let set = DiscreteSet::new(31, vec![0, 2, 3, 9, 17, 30]).unwrap();
    let spectrum = dft_indicator(&set);
    let (mu1, mu2) = apfourier_core::spectral::fejer_split_with(
        &spectrum,
        FejerParams::new(4).unwrap(),
        FejerVariant::Symmetric,
    )
    .unwrap();
    for i in 0..31 {
        assert!((mu1.coeffs()[i] + mu2.coeffs()[i] - spectrum.coeffs()[i]).norm() <= 1e-15);
        assert_eq!(mu1.coeffs()[i].norm() == 0.0, (5..=26).contains(&i));
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use heavytail::constants::{bobkov_ledoux_prefactor, chernoff_gamma, chernoff_rho, lsi_rho_cauchy, lsi_rho_invgamma};
use heavytail::evolution::{evolve, InitialDatum, PdeConfig};
use heavytail::fp_models::{
    cauchy_lsi_change_of_variables, invgamma_fp_model, invgamma_lsi_change_of_variables, ou_model, WeightFunction,
};
use heavytail::spectral::{poincare_best_constant, SpectralProblem};
use heavytail::verifiers::catalog::default_specs;
use heavytail::verifiers::{build_spec, default_corpus, real_line_corpus, run_corpus, verify, SpecParams, Verdict};
use heavytail::{DensityModel, QuadratureConfig};
use std::process::ExitCode;
use std::time::Instant;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let cases = [
        ("chernoff_rho(1)", chernoff_rho(1.0).map(|c| c.value), 0.25),
        ("chernoff_rho(2)", chernoff_rho(2.0).map(|c| c.value), 2.0),
        ("chernoff_gamma(2)", chernoff_gamma(2.0).map(|c| c.value), 1.0),
        ("chernoff_gamma(3)", chernoff_gamma(3.0).map(|c| c.value), 2.0),
        ("lsi_rho_cauchy(3,2)", lsi_rho_cauchy(3.0, 2.0).map(|c| c.value), 4.0),
    ];
    for (name, got, want) in cases {
        match got {
            Ok(v) => o.check(close(v, want, 1e-12), format!("{name} = {v:.17e}, want {want}")),
            Err(e) => o.check(false, format!("{name}: {e}")),
        }
    }
    for beta in [1.6, 2.0, 3.5] {
        for m in [0.5, 1.0, 4.0] {
            match lsi_rho_invgamma(beta, 1.5, m) {
                Ok(c) => o.check(
                    close(c.value, m / 2.0, 1e-12),
                    format!("lsi_rho_invgamma({beta},1.5,{m}) = {:.17e}", c.value),
                ),
                Err(e) => o.check(false, format!("lsi_rho_invgamma({beta},1.5,{m}): {e}")),
            }
        }
    }
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let spec = build_spec("CHERNOFF_CAUCHY", &SpecParams::new().with("beta", 2.5)).expect("spec");
    let x = real_line_corpus().into_iter().find(|f| f.id == "x").expect("phi = x");
    let r = verify(&spec, &x, &QuadratureConfig::default()).expect("verify");
    // oracle: E[X^2] = 1/(2 beta - 3) = 1/2 for beta = 5/2
    o.check(close(r.lhs, 0.5, 1e-8), format!("Var = {:.17e}", r.lhs));
    o.check(close(r.rhs, 0.5, 1e-8), format!("RHS = {:.17e}", r.rhs));
    o.check(r.slack.abs() <= 1e-8, format!("slack = {:e}", r.slack));
    o.check(r.verdict == Verdict::Pass, format!("verdict {}", r.verdict));
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    for beta in [2.5, 3.0, 4.0] {
        let want = 1.0 / (beta - 1.0);
        let got = 2.0 / lsi_rho_cauchy(beta, 2.0).expect("rho").value;
        o.check(
            close(got, want, 1e-12),
            format!("beta {beta}: 2/rho = {got:.17e}, want {want:.17e}"),
        );
        let bl = bobkov_ledoux_prefactor(beta).expect("prefactor").constant.value;
        o.check(close(bl, want, 1e-12), format!("beta {beta}: prefactor {bl:.17e}"));
    }
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    const REL: f64 = 1e-6;
    const LOC: f64 = 1e-4;
    for alpha in [1.2, 1.5, 2.0] {
        for beta in [2.0, 3.0] {
            let lambda = beta / alpha - 1.0;
            if lambda <= 0.0 {
                // alpha = beta leaves no drift; the theorem needs alpha < beta
                continue;
            }
            let cov = cauchy_lsi_change_of_variables(alpha, lambda).expect("cov");
            let rho = lsi_rho_cauchy(beta, alpha).expect("rho").value;
            let cert = cov.certify(200_000);
            o.check(
                cert.grid_min >= rho * (1.0 - REL),
                format!(
                    "cauchy alpha {alpha} beta {beta}: min W'' {:.12e} < rho {rho:.12e}",
                    cert.grid_min
                ),
            );
            let xbar = if alpha >= 1.5 {
                0.0
            } else {
                (3.0 - 2.0 * alpha).sqrt() / (alpha - 1.0)
            };
            o.check(
                (cert.argmin_x - xbar).abs() <= LOC * xbar.abs().max(1.0),
                format!(
                    "cauchy alpha {alpha} beta {beta}: argmin {:.10e} vs {xbar:.10e}",
                    cert.argmin_x
                ),
            );
            o.check(
                cov.warnings.is_empty(),
                format!("cauchy alpha {alpha}: {:?}", cov.warnings),
            );
        }
    }
    for alpha in [1.25, 1.5] {
        for m in [1.0, 4.0] {
            for beta in [2.0, 3.0] {
                let lambda = 2.0 * (beta - alpha);
                let cov = invgamma_lsi_change_of_variables(alpha, lambda, m).expect("cov");
                let rho = lsi_rho_invgamma(beta, alpha, m).expect("rho").value;
                let cert = cov.certify(200_000);
                let tag = format!("invgamma alpha {alpha} m {m} beta {beta}");
                o.check(
                    cert.grid_min >= rho * (1.0 - REL),
                    format!("{tag}: min U'' {:.12e} < rho {rho:.12e}", cert.grid_min),
                );
                if alpha < 1.5 {
                    let a1 = alpha - 1.0;
                    let ybar = ((2.0 * beta - alpha) / (m * (2.0 - alpha) * (1.5 - alpha))).powf(a1)
                        / a1.powf(3.0 - 2.0 * alpha);
                    o.check(
                        (cert.argmin_y - ybar).abs() <= LOC * ybar.abs().max(1.0),
                        format!("{tag}: argmin {:.10e} vs {ybar:.10e}", cert.argmin_y),
                    );
                } else {
                    // rho = m/2 is an infimum approached as y -> infinity
                    o.check(
                        cert.at_grid_end,
                        format!("{tag}: interior argmin {:.6e}", cert.argmin_y),
                    );
                }
                o.check(cov.warnings.is_empty(), format!("{tag}: {:?}", cov.warnings));
            }
        }
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let specs = default_specs().expect("catalog");
    let reports = run_corpus(&specs, &default_corpus(), &QuadratureConfig::default());
    let mut counted = 0;
    for r in &reports {
        if r.verdict == Verdict::Vacuous {
            continue;
        }
        counted += 1;
        let ok = r.verdict == Verdict::Pass && r.slack >= -10.0 * r.quad_err - 1e-12;
        o.check(
            ok,
            format!(
                "{} / {}: {} slack {:e} err {:e}",
                r.spec_id, r.fn_id, r.verdict, r.slack, r.quad_err
            ),
        );
    }
    o.check(specs.len() == 45, format!("{} catalog points", specs.len()));
    o.check(counted > 0, "no non-vacuous rows");
    if o.ok {
        o.detail = format!("{} rows, {counted} non-vacuous", reports.len());
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let w = WeightFunction::new("1+x^2", 2.0, |x| 1.0 + x * x);
    let mut seen = Vec::new();
    for beta in [2.5, 0.8, 1.2, 2.0] {
        let problem =
            SpectralProblem::new(DensityModel::cauchy(beta).expect("model"), w.clone(), 2048).expect("problem");
        let r = match poincare_best_constant(&problem) {
            Ok(r) => r,
            Err(e) => {
                o.check(false, format!("beta {beta}: {e}"));
                continue;
            }
        };
        let rho = chernoff_rho(beta).expect("rho").value;
        if beta == 2.5 {
            o.check(
                (r.lambda1 - 3.0).abs() <= 0.02 * 3.0,
                format!("beta 2.5: lambda1 {:.6} not within 2% of 3", r.lambda1),
            );
        } else {
            o.check(
                r.lambda1 >= 0.98 * rho,
                format!("beta {beta}: lambda1 {:.6} < 0.98 rho {rho:.6}", r.lambda1),
            );
        }
        seen.push(format!("{beta}:{:.5}", r.lambda1));
    }
    if o.ok {
        o.detail = format!("lambda1 {}", seen.join(" "));
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let m = 1.0;
    let model = invgamma_fp_model(1.5, 2.0 * (2.0 - 1.5), m).expect("model");
    let cfg = PdeConfig {
        n_cells: 512,
        ..PdeConfig::default()
    };
    let bump = InitialDatum::bump_for(&model).expect("bump");
    match evolve(&model, &bump, &cfg) {
        Ok(run) => {
            o.check(
                run.trace.is_monotone(1e-10),
                format!("H increases by {:e}", run.trace.max_increase),
            );
            o.check(
                run.trace.mass_drift < 1e-10,
                format!("mass drift {:e}", run.trace.mass_drift),
            );
            match run.trace.fitted_rate() {
                Some(rate) => {
                    o.check(rate >= 0.95 * m, format!("invgamma rate {rate:.6} < 0.95 m"));
                    o.detail = format!("invgamma rate {rate:.4}");
                }
                None => o.check(false, "invgamma entropy never reached the fitting window"),
            }
        }
        Err(e) => o.check(false, format!("invgamma run: {e}")),
    }
    match evolve(&model, &InitialDatum::Steady, &cfg) {
        Ok(run) => {
            o.check(
                run.final_sup_distance < 1e-8,
                format!("steady drift {:e}", run.final_sup_distance),
            );
            let hmax = run.trace.h.iter().cloned().fold(0.0, f64::max);
            o.check(hmax <= 1e-10, format!("steady start has H up to {hmax:e}"));
        }
        Err(e) => o.check(false, format!("steady run: {e}")),
    }
    let ou = ou_model().expect("ou");
    match evolve(&ou, &InitialDatum::Gaussian { mu: 1.0, sigma: 1.0 }, &cfg) {
        Ok(run) => match run.trace.fitted_rate() {
            Some(rate) => {
                o.check((rate - 2.0).abs() <= 0.05 * 2.0, format!("OU rate {rate:.6}"));
                o.check(run.trace.is_monotone(1e-10), "OU entropy not monotone");
                if o.ok {
                    o.detail = format!("{}, OU rate {rate:.4}", o.detail);
                }
            }
            None => o.check(false, "OU entropy never reached the fitting window"),
        },
        Err(e) => o.check(false, format!("OU run: {e}")),
    }
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let spec = build_spec(
        "WIRTINGER_GBETA",
        &SpecParams::new().with("beta", 1.5).with("p", 1.0).with("zeroed", 1.0),
    )
    .expect("spec");
    let x = real_line_corpus().into_iter().find(|f| f.id == "x").expect("phi = x");
    let r = verify(&spec, &x, &QuadratureConfig::default()).expect("verify");
    // oracle: density (1+|x|)^{-3}; E|X| = 1 and E[1+|X|] / 2 = 1
    o.check(close(r.lhs, 1.0, 1e-8), format!("LHS = {:.17e}", r.lhs));
    o.check(close(r.rhs, 1.0, 1e-8), format!("RHS = {:.17e}", r.rhs));
    // oracle: F(x) = exp(-1/x), median 1/ln 2, h(median) = ln(2)^2 / 2
    let d = build_spec(
        "WIRTINGER_INVGAMMA",
        &SpecParams::new().with("beta", 1.0).with("m", 1.0).with("p", 1.0),
    )
    .expect("spec")
    .constant;
    let want = 2.0 / std::f64::consts::LN_2;
    o.check(close(d, want, 1e-10), format!("D = {d:.17e}, want {want:.17e}"));
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("constants table", criterion_1),
        ("Chernoff equality case", criterion_2),
        ("Bobkov-Ledoux recovery", criterion_3),
        ("convexity certificates", criterion_4),
        ("soundness sweep", criterion_5),
        ("sharpness probe", criterion_6),
        ("entropy decay", criterion_7),
        ("Wirtinger equality check", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let secs = t.elapsed().as_secs_f64();
        let status = if o.ok { "PASS" } else { "FAIL" };
        if !o.ok {
            failed += 1;
        }
        println!("criterion {} [{status}] {name} ({secs:.2}s) {}", i + 1, o.detail);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

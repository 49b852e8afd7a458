use std::fs;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use difs_core::arith::{ln_estimate, to_decimal};
use difs_core::construction::{choose_ell, find_n, q_word, Construction, N_SEARCH_CAP};
use difs_core::ifs::PairStatus;
use difs_core::verification::{
    critical_grid, diagonal_demo, liouville_witnesses, lower_bound_scan, omega_hat_fit, run_exact_checks,
    scan_min, theta_bracket, upper_bound_check, upper_samples, witness_hints, ScanConfig, ScanMethod, ScanResult,
};
use difs_core::Rational;

use crate::grid::{decades, parse_grid};
use crate::output::{frac, Golden, Sink};
use crate::{Cli, CliError, Command, RunConfig};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let sink = Sink::new(cli.out.clone())?;
    match cli.command {
        Command::DemoDiagonal => demo_diagonal(cli, &sink),
        cmd => {
            let cfg = load_config(cli)?;
            let mut golden = Golden::open(sink.dir(), &cfg.digest())?;
            let res = match cmd {
                Command::Validate => validate(&cfg, &sink, &mut golden),
                Command::Construct => construct(cli, &cfg, &sink),
                Command::Verify => verify(cli, &cfg, &sink, &mut golden),
                Command::Theta => theta(cli, &cfg, &sink, &mut golden),
                Command::Scan => scan(cli, &cfg, &sink, &mut golden),
                Command::Liouville => liouville(cli, &cfg, &sink, &mut golden),
                Command::Omega => omega(cli, &cfg, &sink),
                Command::DemoDiagonal => unreachable!("handled above"),
            };
            golden.save()?;
            res
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --config PATH".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(RunConfig::from_json(&text)?)
}

fn kmax(cli: &Cli, cfg: &RunConfig) -> usize {
    cli.kmax.unwrap_or_else(|| cfg.kmax())
}

fn build(cli: &Cli, cfg: &RunConfig) -> Result<Construction, CliError> {
    Ok(Construction::build(cfg.params()?, kmax(cli, cfg))?)
}

fn method_name(m: ScanMethod) -> &'static str {
    match m {
        ScanMethod::Exhaustive => "exhaustive",
        ScanMethod::Lattice => "lattice",
    }
}

fn validate(cfg: &RunConfig, sink: &Sink, golden: &mut Golden) -> Result<(), CliError> {
    let ifs = cfg.ifs()?;
    let (ff, fg) = (ifs.f.fixed_point(), ifs.g.fixed_point());
    if ifs.validate() == PairStatus::Degenerate {
        sink.json(
            "validate.json",
            &json!({"status": "degenerate", "fixed_f": frac(&ff), "fixed_g": frac(&fg)}),
        )?;
        return Err(CliError::Construction(difs_core::construction::ConstructionError::Degenerate));
    }
    let ell = cfg.overrides.ell.unwrap_or_else(|| choose_ell(&ifs));
    let (n, q0) = match cfg.overrides.n {
        Some(n) => (n, ifs.eval_tail(&q_word(n))),
        None => find_n(&ifs, ell, N_SEARCH_CAP)?,
    };
    let gap = (ifs.sigma() - ifs.nu(n)).abs();
    let (b1, b2) = ifs.bases();
    golden.exact("sigma_minus_nu", &frac(&gap))?;
    sink.json(
        "validate.json",
        &json!({
            "status": "ok",
            "N": n,
            "ell": ell,
            "r_over_s": frac(&q0),
            "b1": b1,
            "b2": b2,
            "fixed_f": frac(&ff),
            "fixed_g": frac(&fg),
            "sigma_minus_nu": frac(&gap),
            "config_sha256": cfg.digest(),
        }),
    )
}

fn construct(cli: &Cli, cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let rows: Vec<Vec<String>> = c
        .rows
        .iter()
        .map(|r| {
            vec![
                r.j.to_string(),
                r.k.to_string(),
                r.fk.to_string(),
                r.gjk.to_string(),
                r.eta.map(|e| e.to_string()).unwrap_or_default(),
                r.words.t.len().to_string(),
                r.p.to_string(),
                r.q.to_string(),
                r.big_p.to_string(),
                r.s.to_string(),
                r.words.t.digest(),
            ]
        })
        .collect();
    sink.csv(
        "construct.csv",
        &["j", "k", "fk", "gjk", "eta", "len_t", "p", "q", "P", "S", "word_digest"],
        &rows,
    )
}

fn verify(cli: &Cli, cfg: &RunConfig, sink: &Sink, golden: &mut Golden) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let checks = run_exact_checks(&c);
    let all = checks.iter().all(|r| r.passed);
    let gap = (c.ifs().sigma() - c.ifs().nu(c.n)).abs();
    let report = json!({
        "config_sha256": cfg.digest(),
        "kmax": c.kmax(),
        "N": c.n,
        "ell": c.ell,
        "S": c.s_const().to_string(),
        "sigma_minus_nu": frac(&gap),
        "all_passed": all,
        "checks": checks.iter().map(|r| json!({
            "name": r.name,
            "passed": r.passed,
            "cases": r.cases,
            "counterexample": r.counterexample,
        })).collect::<Vec<_>>(),
    });
    sink.json("verify.json", &report)?;
    golden.exact("sigma_minus_nu", &frac(&gap))?;
    if !all {
        let failed: Vec<&str> = checks.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        return Err(CliError::Check(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}

fn grid_from(cli: &Cli) -> Result<Option<Vec<BigInt>>, CliError> {
    if let Some(spec) = &cli.grid {
        if spec != "critical" {
            return parse_grid(spec).map(Some).map_err(CliError::Usage);
        }
        return Ok(None);
    }
    if let Some(q) = &cli.q_max {
        let q: BigInt = q.parse().map_err(|_| CliError::Usage(format!("--Qmax {q} is not an integer")))?;
        if q < BigInt::from(1) {
            return Err(CliError::Usage("--Qmax must be positive".into()));
        }
        return Ok(Some(decades(&q)));
    }
    Ok(None)
}

fn series_rows(results: &[ScanResult]) -> Vec<Vec<String>> {
    results
        .iter()
        .map(|r| {
            vec![
                r.q_max.to_string(),
                r.best_q.to_string(),
                method_name(r.method).to_string(),
                frac(&r.dist_lo),
                frac(&r.dist_hi),
                frac(&r.theta_lo),
                frac(&r.theta_hi),
            ]
        })
        .collect()
}

const SERIES_HEADER: [&str; 7] = ["Q", "best_q", "method", "dist_lo", "dist_hi", "theta_lo", "theta_hi"];

/// Advisory log-log series (natural logs, decimal strings).
fn loglog_rows(results: &[ScanResult]) -> Vec<Vec<String>> {
    results
        .iter()
        .filter(|r| r.dist_hi > Rational::from_integer(BigInt::from(0)))
        .map(|r| {
            vec![
                format!("{:.6}", ln_estimate(&Rational::from_integer(r.q_max.clone()))),
                format!("{:.6}", ln_estimate(&r.dist_hi)),
            ]
        })
        .collect()
}

fn theta(cli: &Cli, cfg: &RunConfig, sink: &Sink, golden: &mut Golden) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let grid = grid_from(cli)?;
    let mut summary = serde_json::Map::new();
    summary.insert("config_sha256".into(), json!(cfg.digest()));
    if cli.k.is_some() || grid.is_none() {
        let k = cli.k.unwrap_or_else(|| c.kmax().saturating_sub(1).max(1));
        let qs = upper_samples(&c, k, 24);
        let report = upper_bound_check(&c, k, &qs)?;
        let rows: Vec<Vec<String>> = report
            .samples
            .iter()
            .map(|s| {
                let (t_lo, t_hi) = theta_bracket(&s.q_max, c.m(), &s.dist_lo, &s.dist_hi);
                vec![
                    s.q_max.to_string(),
                    s.case.to_string(),
                    s.witness.to_string(),
                    frac(&s.dist_lo),
                    frac(&s.dist_hi),
                    frac(&t_lo),
                    frac(&t_hi),
                    frac(&s.ratio_lo),
                    frac(&s.ratio_hi),
                ]
            })
            .collect();
        sink.csv(
            &format!("theta_k{k}.csv"),
            &["Q", "case", "witness", "dist_lo", "dist_hi", "theta_lo", "theta_hi", "ratio_lo", "ratio_hi"],
            &rows,
        )?;
        let max_ratio = report.max_ratio();
        golden.band("theta.max_ratio", &max_ratio)?;
        summary.insert(
            "witness".into(),
            json!({
                "k": k,
                "samples": report.samples.len(),
                "max_ratio": frac(&max_ratio),
                "max_ratio_decimal": to_decimal(&max_ratio, 6),
                "case1_integral": report.case1_integral,
            }),
        );
        if report.case1_integral == Some(false) {
            sink.json("theta.json", &Value::Object(summary))?;
            return Err(CliError::Check(format!("case-1 witness at k = {k} is not integral")));
        }
    }
    if let Some(grid) = grid {
        let sources = c.xi_sources();
        let hints = witness_hints(&c);
        let scfg = cfg.scan_config();
        let results = grid
            .iter()
            .map(|q| scan_min(&sources, q, &hints, &scfg))
            .collect::<Result<Vec<_>, _>>()?;
        sink.csv("theta_series.csv", &SERIES_HEADER, &series_rows(&results))?;
        sink.csv("theta_loglog.csv", &["ln_Q", "ln_dist_hi"], &loglog_rows(&results))?;
        summary.insert("series_points".into(), json!(results.len()));
    }
    sink.json("theta.json", &Value::Object(summary))
}

fn scan(cli: &Cli, cfg: &RunConfig, sink: &Sink, golden: &mut Golden) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let k = cli.k.unwrap_or(1);
    let r = lower_bound_scan(&c, k, &cfg.scan_config())?;
    golden.band(&format!("scan.c_prime.k{k}"), &r.c_prime_lo)?;
    sink.json(
        "scan.json",
        &json!({
            "config_sha256": cfg.digest(),
            "k": k,
            "Q": r.scan.q_max.to_string(),
            "worst_q": r.scan.best_q.to_string(),
            "dist_lo": frac(&r.scan.dist_lo),
            "dist_hi": frac(&r.scan.dist_hi),
            "c_prime_lo": frac(&r.c_prime_lo),
            "c_prime_hi": frac(&r.c_prime_hi),
            "c_prime_decimal": to_decimal(&r.c_prime_lo, 6),
            "structural_cases": r.structural_cases,
            "structural_failure": r.structural_failure.as_ref().map(|q| q.to_string()),
            "max_h": r.max_h,
            "passed": r.passed(),
        }),
    )?;
    if !r.passed() {
        return Err(CliError::Check(format!("lower bound scan at k = {k} failed")));
    }
    Ok(())
}

fn liouville(cli: &Cli, cfg: &RunConfig, sink: &Sink, golden: &mut Golden) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let ws = liouville_witnesses(&c)?;
    let rows: Vec<Vec<String>> = ws
        .iter()
        .map(|w| {
            vec![
                w.k.to_string(),
                w.q.to_string(),
                frac(&w.dist_lo),
                frac(&w.dist_hi),
                frac(&w.exponent_lo),
                frac(&w.scaled),
            ]
        })
        .collect();
    sink.csv("liouville.csv", &["k", "q", "dist_lo", "dist_hi", "exponent_lo", "scaled"], &rows)?;
    for w in &ws {
        golden.exact(&format!("liouville.exponent_lo.k{}", w.k), &frac(&w.exponent_lo))?;
    }
    let monotone = ws.windows(2).all(|p| p[0].exponent_lo <= p[1].exponent_lo);
    sink.json(
        "liouville.json",
        &json!({
            "config_sha256": cfg.digest(),
            "witnesses": ws.iter().map(|w| json!({
                "k": w.k,
                "exponent_lo": frac(&w.exponent_lo),
                "exponent_lo_decimal": to_decimal(&w.exponent_lo, 6),
            })).collect::<Vec<_>>(),
            "nondecreasing": monotone,
        }),
    )
}

fn omega(cli: &Cli, cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let c = build(cli, cfg)?;
    let grid = match grid_from(cli)? {
        Some(g) => g,
        None => critical_grid(&c, 3, 2),
    };
    let sources = c.xi_sources();
    let fit = omega_hat_fit(&sources, &grid, &witness_hints(&c), &cfg.scan_config())?;
    sink.csv("omega_samples.csv", &SERIES_HEADER, &series_rows(&fit.samples))?;
    sink.csv("omega_loglog.csv", &["ln_Q", "ln_dist_hi"], &loglog_rows(&fit.samples))?;
    let (lo, hi) = fit.slope_bracket();
    let expected = c.params.omega.as_ref().map(|w| frac(&-w));
    sink.json(
        "omega.json",
        &json!({
            "config_sha256": cfg.digest(),
            "grid": grid.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "slope_lo": frac(&lo),
            "slope_hi": frac(&hi),
            "slope_decimal": format!("{:.6}", fit.slope_mid),
            "expected_slope": expected,
        }),
    )
}

fn demo_diagonal(cli: &Cli, sink: &Sink) -> Result<(), CliError> {
    let m = cli.m.unwrap_or(2);
    let grid: Vec<u64> = match grid_from(cli)? {
        Some(g) => g
            .iter()
            .map(|q| u64::try_from(q.clone()).map_err(|_| CliError::Usage(format!("Q = {q} too large for the demo"))))
            .collect::<Result<_, _>>()?,
        None => vec![10, 100, 1000, 10_000, 100_000],
    };
    let samples = diagonal_demo(m, &grid, &ScanConfig::default())?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![
                s.q_max.to_string(),
                s.best_q.to_string(),
                frac(&s.dist_lo),
                frac(&s.dist_hi),
                s.ok.to_string(),
            ]
        })
        .collect();
    sink.csv("diagonal.csv", &["Q", "q", "dist_lo", "dist_hi", "ok"], &rows)?;
    let all = samples.iter().all(|s| s.ok);
    sink.json("diagonal.json", &json!({"m": m, "points": samples.len(), "all_ok": all}))?;
    if !all {
        return Err(CliError::Check("a sampled Q has no certified witness".into()));
    }
    Ok(())
}

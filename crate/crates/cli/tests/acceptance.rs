//! Acceptance criteria 1 to 9. Run with `--nocapture` to see one line per
//! criterion.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use difs_core::arith::{ln_estimate, ratio};
use difs_core::construction::{
    choose_ell, feasible_m, find_n, Construction, ConstructionParams, N_SEARCH_CAP,
};
use difs_core::ifs::AffineMap;
use difs_core::verification::*;
use difs_core::{Ifs, Rational};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn map(num: u64, den: u64, shift: (i64, i64)) -> AffineMap<Rational> {
    AffineMap::new(num, den, ratio(shift.0, shift.1)).unwrap()
}

fn cantor() -> Ifs {
    Ifs::new(map(1, 3, (0, 1)), map(1, 3, (2, 3)))
}

/// Named pairs covering equal and unequal bases, heavy shift denominators
/// and a non-unit rate.
fn corpus() -> Vec<(&'static str, Ifs)> {
    vec![
        ("cantor", cantor()),
        ("x/2, x/3+2/3", Ifs::new(map(1, 2, (0, 1)), map(1, 3, (2, 3)))),
        ("x/2+1/9, x/3+5/8", Ifs::new(map(1, 2, (1, 9)), map(1, 3, (5, 8)))),
        ("2x/5+1/5, x/3+1/2", Ifs::new(map(2, 5, (1, 5)), map(1, 3, (1, 2)))),
        ("x/5+1/5, x/5+3/5", Ifs::new(map(1, 5, (1, 5)), map(1, 5, (3, 5)))),
        ("x/4, x/3+1/8", Ifs::new(map(1, 4, (0, 1)), map(1, 3, (1, 8)))),
        ("x/2-1/3, x/3+1/4", Ifs::new(map(1, 2, (-1, 3)), map(1, 3, (1, 4)))),
        ("x/6+1/7, x/2+1/5", Ifs::new(map(1, 6, (1, 7)), map(1, 2, (1, 5)))),
        ("x/2, x/2+1", Ifs::new(map(1, 2, (0, 1)), map(1, 2, (1, 1)))),
    ]
}

const CORPUS_KMAX: usize = 4;

fn corpus_constructions() -> Result<Vec<(&'static str, Construction)>, String> {
    let c = ratio(1, 4);
    corpus()
        .into_iter()
        .map(|(name, ifs)| {
            let ell = choose_ell(&ifs);
            let (n, _) = find_n(&ifs, ell, N_SEARCH_CAP).map_err(|e| format!("{name}: {e}"))?;
            let big_m = feasible_m(&ifs, 3, &c, None, n, CORPUS_KMAX, 1).map_err(|e| format!("{name}: {e}"))?;
            let params = ConstructionParams::new(ifs, 3, c.clone(), big_m);
            let con = Construction::build(params, CORPUS_KMAX).map_err(|e| format!("{name}: {e}"))?;
            Ok((name, con))
        })
        .collect()
}

fn criterion_1(corpus: &[(&str, Construction)]) -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for (name, con) in corpus {
        for r in run_exact_checks(con) {
            cases += r.cases;
            if !r.passed {
                failures.push(format!("{name}/{}: {}", r.name, r.counterexample.unwrap_or_default()));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let passed = failures.is_empty() && corpus.len() >= 8 && secs < 60.0;
    outcome(
        passed,
        format!("{} pairs, {cases} cases, {secs:.1}s {}", corpus.len(), failures.join("; ")),
    )
}

fn criterion_2(corpus: &[(&str, Construction)]) -> Outcome {
    let mut instances = 0;
    let mut failures = Vec::new();
    for (name, con) in corpus.iter().filter(|(_, c)| c.is_reciprocal()) {
        instances += 1;
        let r = check_jo(con);
        if !r.passed {
            failures.push(format!("{name}: {}", r.counterexample.unwrap_or_default()));
        }
    }
    outcome(failures.is_empty() && instances > 0, format!("{instances} instances {}", failures.join("; ")))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let params = ConstructionParams::new(cantor(), 3, ratio(1, 4), vec![3, 9, 31]);
    let con = match Construction::build(params, 3) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    match lower_bound_scan(&con, 1, &ScanConfig::default()) {
        Ok(r) => outcome(
            r.passed(),
            format!(
                "P*_1 = {}, c' >= {:.6}, {} structural cases, {:.1}s",
                con.schedule.p_star(1),
                ln_estimate(&r.c_prime_lo).exp(),
                r.structural_cases,
                t.elapsed().as_secs_f64()
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn reference(c: Rational) -> Result<Construction, String> {
    let params = ConstructionParams::new(cantor(), 3, c, vec![12, 60, 300, 1500]);
    Construction::build(params, 4).map_err(|e| e.to_string())
}

fn max_ratios(c: Rational) -> Result<Vec<(usize, usize, Rational, Rational)>, String> {
    let con = reference(c)?;
    let mut out = Vec::new();
    for k in [2, 3] {
        let qs = upper_samples(&con, k, 24);
        let r = upper_bound_check(&con, k, &qs).map_err(|e| e.to_string())?;
        if r.case1_integral == Some(false) {
            return Err(format!("case-1 witness not integral at k = {k}"));
        }
        let worst_hi = r.samples.iter().map(|s| s.ratio_hi.clone()).max().expect("samples");
        out.push((k, r.samples.len(), r.max_ratio(), worst_hi));
    }
    Ok(out)
}

fn criterion_4() -> Outcome {
    let run = || -> Result<Outcome, String> {
        let tenth = max_ratios(ratio(1, 10))?;
        let hundredth = max_ratios(ratio(1, 100))?;
        let four = Rational::from_integer(4.into());
        let mut ok = true;
        let mut detail = Vec::new();
        for series in [&tenth, &hundredth] {
            let a2 = series[0].2.clone();
            for (k, n, max, worst_hi) in series.iter() {
                ok &= *n >= 20 && max * &four >= a2 && *worst_hi <= &a2 * &four;
                detail.push(format!("k={k} n={n} max={:.3}", ln_estimate(max).exp()));
            }
        }
        let shift = &hundredth[0].2 / &tenth[0].2;
        let two = Rational::from_integer(2.into());
        ok &= shift <= two && shift * &two >= Rational::from_integer(1.into());
        detail.push(format!("c/10 shift {:.3}", ln_estimate(&(&hundredth[0].2 / &tenth[0].2)).exp()));
        Ok(outcome(ok, detail.join(", ")))
    };
    run().unwrap_or_else(|e| outcome(false, e))
}

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/liouville.json")
}

fn criterion_5() -> Outcome {
    let params = ConstructionParams::new(cantor(), 3, ratio(1, 4), vec![4, 40, 4000]);
    let con = match Construction::build(params, 3) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ws = match liouville_witnesses(&con) {
        Ok(w) => w,
        Err(e) => return outcome(false, e.to_string()),
    };
    let exps: Vec<Rational> = ws.iter().map(|w| w.exponent_lo.clone()).collect();
    let at = |k: usize| ws.iter().filter(|w| w.k <= k).map(|w| w.exponent_lo.clone()).max();
    let three = Rational::from_integer(3.into());
    let five = Rational::from_integer(5.into());
    let mut ok = exps.windows(2).all(|w| w[0] <= w[1]);
    ok &= at(2).is_some_and(|e| e > three) && at(3).is_some_and(|e| e > five);
    let current: BTreeMap<String, String> =
        ws.iter().map(|w| (format!("k{}", w.k), w.exponent_lo.to_string())).collect();
    let path = golden_path();
    let golden = if path.exists() {
        let recorded: BTreeMap<String, String> =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        if recorded == current { "golden reproduced" } else { ok = false; "golden MISMATCH" }
    } else {
        fs::write(&path, serde_json::to_string_pretty(&current).unwrap() + "\n").unwrap();
        "golden recorded"
    };
    let shown: Vec<String> = ws
        .iter()
        .map(|w| format!("k={} exp>={:.3}", w.k, ln_estimate(&w.exponent_lo).exp()))
        .collect();
    outcome(ok, format!("{}, {golden}", shown.join(", ")))
}

fn criterion_6() -> Outcome {
    let pair = Ifs::new(map(1, 2, (0, 1)), map(1, 2, (1, 1)));
    let mut ok = true;
    let mut detail = Vec::new();
    for (num, den) in [(1, 3), (1, 2)] {
        let omega = ratio(num, den);
        let params = ConstructionParams::new(pair.clone(), 3, ratio(1, 4), vec![3, 20, 100, 500]).with_omega(omega.clone());
        let con = match Construction::build(params, 4) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        let grid = critical_grid(&con, 3, 2);
        let sources = con.xi_sources();
        match omega_hat_fit(&sources, &grid, &witness_hints(&con), &ScanConfig::default()) {
            Ok(fit) => {
                let w = num as f64 / den as f64;
                let inside = |s: f64| (-1.15 * w..=-0.85 * w).contains(&s);
                ok &= inside(fit.slope_lo) && inside(fit.slope_hi);
                detail.push(format!("omega={omega}: slope in [{:.4}, {:.4}]", fit.slope_lo, fit.slope_hi));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("omega={omega}: {e}"));
            }
        }
        if (num, den) == (1, 2) {
            match relation_search(&sources, 10) {
                Ok(None) => detail.push("relation NONE".into()),
                Ok(Some(r)) => {
                    ok = false;
                    detail.push(format!("relation {r:?}"));
                }
                Err(e) => {
                    ok = false;
                    detail.push(e.to_string());
                }
            }
        }
    }
    outcome(ok, detail.join(", "))
}

fn criterion_7(corpus: &[(&str, Construction)]) -> Outcome {
    let mut rows = 0;
    let mut failures = Vec::new();
    for (name, con) in corpus {
        let r = check_intrinsic(con);
        rows += r.cases;
        if !r.passed {
            failures.push(format!("{name}: {}", r.counterexample.unwrap_or_default()));
        }
    }
    outcome(failures.is_empty() && rows > 0, format!("{rows} rows {}", failures.join("; ")))
}

fn criterion_8() -> Outcome {
    let grid = [10, 100, 1_000, 10_000, 100_000];
    let mut ok = true;
    let mut detail = Vec::new();
    for m in [2, 3] {
        match diagonal_demo(m, &grid, &ScanConfig::default()) {
            Ok(samples) => {
                let good = samples.iter().filter(|s| s.ok).count();
                ok &= good == grid.len();
                detail.push(format!("m={m}: {good}/{}", grid.len()));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("m={m}: {e}"));
            }
        }
    }
    outcome(ok, detail.join(", "))
}

fn run_bin(args: &[&str], out: &Path) -> (i32, Vec<(String, Vec<u8>)>) {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs/cantor.json");
    let status = Command::new(env!("CARGO_BIN_EXE_difs"))
        .args(args)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    (status.code().unwrap_or(-1), files)
}

fn criterion_9() -> Outcome {
    let mut outputs = Vec::new();
    for threads in ["1", "8", "1", "8"] {
        let dir = tempfile::tempdir().unwrap();
        let (c1, construct) = run_bin(&["construct", "--threads", threads], dir.path());
        let (c2, all) = run_bin(&["verify", "--threads", threads], dir.path());
        if c1 != 0 || c2 != 0 {
            return outcome(false, format!("exit codes {c1}, {c2} with {threads} threads"));
        }
        outputs.push((construct, all));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let bytes: usize = outputs[0].1.iter().map(|(_, b)| b.len()).sum();
    outcome(same, format!("4 runs, threads 1 and 8, {bytes} bytes compared"))
}

#[test]
fn acceptance() {
    let corpus = corpus_constructions();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    match &corpus {
        Ok(cs) => {
            results.push((1, criterion_1(cs)));
            results.push((2, criterion_2(cs)));
        }
        Err(e) => {
            results.push((1, outcome(false, e.clone())));
            results.push((2, outcome(false, e.clone())));
        }
    }
    results.push((3, criterion_3()));
    results.push((4, criterion_4()));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    results.push((
        7,
        match &corpus {
            Ok(cs) => criterion_7(cs),
            Err(e) => outcome(false, e.clone()),
        },
    ));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    for (n, o) in &results {
        println!("criterion {n}: {} {}", if o.passed { "PASS" } else { "FAIL" }, o.detail.trim_end());
    }
    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

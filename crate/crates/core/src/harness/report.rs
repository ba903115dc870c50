use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::cache::Estimates;
use crate::stats::linear_fit;

pub const REPORT_FILE: &str = "report.txt";

/// Text summaries written by individual commands and appended verbatim.
const SUMMARIES: [&str; 4] = ["check_model.txt", "spectrum.txt", "pipeline.txt", "ld.txt"];

fn read_table(path: &Path) -> Result<Option<Vec<BTreeMap<String, String>>>> {
    if !path.exists() {
        return Ok(None);
    }
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(Some(rows))
}

fn num(row: &BTreeMap<String, String>, key: &str, file: &str) -> Result<f64> {
    let v = row.get(key).ok_or_else(|| Error::invalid(format!("{file}: missing column `{key}`")))?;
    v.parse().map_err(|_| Error::invalid(format!("{file}: `{v}` in column `{key}` is not a number")))
}

/// Merges every known output in `dir` into `report.txt` and returns its text.
pub fn write_report(dir: &Path) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "random matrix products: experiment report").unwrap();
    writeln!(out, "directory: {}", dir.display()).unwrap();

    match Estimates::load(dir) {
        Ok(e) => {
            writeln!(out, "\n[estimates]").unwrap();
            writeln!(out, "gamma  = {:.9} ± {:.2e}", e.gamma, e.gamma_se).unwrap();
            writeln!(out, "rho^2  = {:.9} ± {:.2e}", e.rho_sq, e.rho_sq_se).unwrap();
            writeln!(out, "paths  = {} of length {} (seed {})", e.samples, e.n, e.seed).unwrap();
        }
        Err(Error::MissingEstimates(_)) => {}
        Err(e) => return Err(e),
    }

    if let Some(rows) = read_table(&dir.join("be_gaps.csv"))? {
        writeln!(out, "\n[berry-esseen: sup_b |P(coefficient) - H(b)|]").unwrap();
        writeln!(out, "{:>8} {:>12} {:>12} {:>10}", "n", "gap", "trunc_frac", "samples").unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for r in &rows {
            let n = num(r, "n", "be_gaps.csv")?;
            let gap = num(r, "gap", "be_gaps.csv")?;
            writeln!(out, "{:>8} {:>12.6} {:>12.3e} {:>10}", n, gap, num(r, "trunc_frac", "be_gaps.csv")?, r["samples"]).unwrap();
            if gap > 0.0 {
                x.push(n.ln());
                y.push(gap.ln());
            }
        }
        if x.len() >= 2 {
            let f = linear_fit(&x, &y)?;
            writeln!(out, "fitted slope of log gap vs log n: {:.4} ± {:.4} (expected -0.5)", f.slope, f.slope_se).unwrap();
        }
    }

    if let Some(rows) = read_table(&dir.join("llt.csv"))? {
        writeln!(out, "\n[local limit: sup_t |A_n(t) - target|]").unwrap();
        let mut sup: Vec<(f64, f64, f64)> = Vec::new();
        for r in &rows {
            let n = num(r, "n", "llt.csv")?;
            let d = num(r, "abs_dev", "llt.csv")?;
            let t = num(r, "target", "llt.csv")?;
            match sup.last_mut() {
                Some(s) if s.0 == n => {
                    s.1 = s.1.max(d);
                    s.2 = s.2.max(t);
                }
                _ => sup.push((n, d, t)),
            }
        }
        writeln!(out, "{:>8} {:>12} {:>14}", "n", "sup_dev", "sup_dev/peak").unwrap();
        for (n, d, peak) in &sup {
            writeln!(out, "{:>8} {:>12.6} {:>14.4}", n, d, d / peak).unwrap();
        }
    }

    if let Some(rows) = read_table(&dir.join("lambda_curve.csv"))? {
        writeln!(out, "\n[leading eigenvalue curve]").unwrap();
        let mut worst = 0.0f64;
        let mut min_abs = f64::INFINITY;
        for r in &rows {
            worst = worst.max(num(r, "residual", "lambda_curve.csv")?);
            min_abs = min_abs.min(num(r, "abs_lambda", "lambda_curve.csv")?);
        }
        writeln!(out, "{} frequencies, min |lambda| = {:.6}, max residual = {:.2e}", rows.len(), min_abs, worst).unwrap();
    }

    if let Some(rows) = read_table(&dir.join("ld_rates.csv"))? {
        writeln!(out, "\n[large deviations]").unwrap();
        let mut seen = Vec::new();
        for r in &rows {
            let ev = r.get("event").cloned().unwrap_or_default();
            writeln!(out, "{:<9} n = {:>5}  frequency = {}", ev, r["n"], r["frequency"]).unwrap();
            if !seen.contains(&ev) {
                seen.push(ev);
            }
        }
        for ev in seen {
            if let Some(r) = rows.iter().find(|r| r.get("event") == Some(&ev)) {
                writeln!(out, "{ev}: fitted slope {} (upper 95% {})", r["slope"], r["slope_upper95"]).unwrap();
            }
        }
    }

    for name in SUMMARIES {
        let p = dir.join(name);
        if p.exists() {
            writeln!(out, "\n[{}]", name.trim_end_matches(".txt")).unwrap();
            out.push_str(&std::fs::read_to_string(&p)?);
        }
    }
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(REPORT_FILE), &out)?;
    Ok(out)
}

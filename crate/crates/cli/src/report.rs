//! Human-readable and JSON-lines renderings of the reports.

use std::io::{self, Write};

use radial_toeplitz::carleson::{CarlesonAnalysis, CarlesonReport, LipschitzReport};
use radial_toeplitz::oracle::{DiagonalReport, TruncatedOperator};
use serde_json::{json, Value};

fn tagged(kind: &str, part: Option<&str>, body: Value) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("report".into(), json!(kind));
    if let Some(p) = part {
        obj.insert("part".into(), json!(p));
    }
    if let Value::Object(fields) = body {
        obj.extend(fields);
    }
    Value::Object(obj)
}

fn line(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    writeln!(out, "{value}")
}

pub fn check_json(out: &mut dyn Write, analysis: &CarlesonAnalysis) -> io::Result<()> {
    let mut whole = tagged("check", Some("eta"), json!(analysis.report));
    whole["overall_verdict"] = json!(analysis.verdict().name());
    line(out, &whole)?;
    for (label, r) in &analysis.parts {
        line(out, &tagged("check", Some(label), json!(r)))?;
    }
    Ok(())
}

fn report_block(out: &mut dyn Write, r: &CarlesonReport) -> io::Result<()> {
    let k = &r.kappa;
    writeln!(out, "  positive certified   {}", r.positive)?;
    writeln!(
        out,
        "  sup |kappa|          {:.6e} at r = {}",
        k.sup, k.sup_at
    )?;
    writeln!(
        out,
        "  kappa ladder ratio   {:.6} (monotone tail: {})",
        k.growth_ratio, k.monotone_tail
    )?;
    writeln!(
        out,
        "  sup |gamma|          {:.6e} at n = {} (n <= {})",
        r.gamma_sup, r.gamma_sup_at, r.horizon
    )?;
    writeln!(out, "  sup |beta|           {:.6e}", r.beta_sup)?;
    let s = &r.chain_slack;
    writeln!(
        out,
        "  chain residuals      beta-gamma {:.3e}, gamma-kappa {:.3e}, kappa-5gamma {:.3e}",
        s.beta_gamma, s.gamma_kappa, s.kappa_five_gamma
    )?;
    writeln!(out, "  kappa - 4 gamma(m)   {:.3e}", r.constant4_residual)?;
    writeln!(out, "  verdict              {}", r.verdict.name())
}

pub fn check_text(
    out: &mut dyn Write,
    analysis: &CarlesonAnalysis,
    grids: &[(&str, String)],
) -> io::Result<()> {
    writeln!(out, "measure {}", analysis.report.measure)?;
    let settings: Vec<String> = grids.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "grids   {}", settings.join(" "))?;
    report_block(out, &analysis.report)?;
    for (label, r) in &analysis.parts {
        writeln!(out, "part {label}: {}", r.measure)?;
        report_block(out, r)?;
    }
    writeln!(out, "verdict {}", analysis.verdict().name())
}

pub fn lipschitz_json(out: &mut dyn Write, r: &LipschitzReport) -> io::Result<()> {
    line(out, &tagged("lipschitz", None, json!(r)))
}

pub fn lipschitz_text(out: &mut dyn Write, r: &LipschitzReport) -> io::Result<()> {
    writeln!(out, "measure            {}", r.measure)?;
    writeln!(out, "n <=               {}", r.horizon)?;
    writeln!(out, "sup |kappa|        {:.6e}", r.kappa_sup)?;
    writeln!(
        out,
        "empirical modulus  {:.6e} (pair {:?})",
        r.empirical_modulus, r.worst_pair
    )?;
    writeln!(out, "bound 8 sup kappa  {:.6e}", r.bound)?;
    writeln!(out, "stepwise residual  {:.3e}", r.stepwise_residual)?;
    writeln!(out, "kernel residual    {:.3e}", r.kernel_residual)?;
    writeln!(out, "applicable         {}", r.applicable)?;
    writeln!(out, "pass               {}", r.pass)
}

pub fn oracle_json(
    out: &mut dyn Write,
    d: &DiagonalReport,
    op: &TruncatedOperator,
    rotation: f64,
) -> io::Result<()> {
    let mut v = tagged("oracle", None, json!(d));
    v["path"] = json!(op.path);
    v["angular_nodes"] = json!(op.angular_nodes);
    v["hermitian_defect"] = json!(op.max_hermitian_defect());
    v["rotation_defect"] = json!(rotation);
    line(out, &v)
}

pub fn oracle_text(
    out: &mut dyn Write,
    d: &DiagonalReport,
    op: &TruncatedOperator,
    rotation: f64,
) -> io::Result<()> {
    writeln!(
        out,
        "dimension          {} ({:?}, {} angular nodes)",
        d.dim, op.path, op.angular_nodes
    )?;
    writeln!(
        out,
        "max off-diagonal   {:.3e} at {:?}",
        d.max_off_diagonal, d.worst_off_diagonal
    )?;
    writeln!(
        out,
        "max |A_kk - gamma| {:.3e} at k = {}",
        d.max_diagonal_error, d.worst_diagonal
    )?;
    writeln!(out, "hermitian defect   {:.3e}", op.max_hermitian_defect())?;
    writeln!(out, "rotation defect    {:.3e}", rotation)?;
    writeln!(out, "pass               {}", d.pass)
}

//! Scores an export (as served by `/api/export`) and writes the tables.
//!
//!     cargo run --example analyze_export -- export.json out/

use anyhow::Context;
use sonoscape::analysis::{build_report, write_tables};
use sonoscape::records::Export;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let (Some(input), out) = (args.next(), args.next().unwrap_or_else(|| "report".into())) else {
        anyhow::bail!("usage: analyze_export <export.json> [out-dir]");
    };
    let export: Export = serde_json::from_str(&std::fs::read_to_string(&input).with_context(|| input.clone())?)?;
    let report = build_report(&export);
    write_tables(&report, out.as_ref())?;
    for o in &report.overall {
        println!("{}: overall d' {:.3} over {} sessions", o.ecology, o.d_prime, report.sessions[&o.ecology]);
    }
    for row in &report.anova {
        match &row.result {
            Some(a) => println!("{} {} vs {}: F({}, {}) = {:.3}, p = {:.4}", row.measure, row.ecology_a, row.ecology_b, a.df_between, a.df_within, a.f, a.p),
            None => println!("{}: {}", row.measure, row.note.as_deref().unwrap_or("not computed")),
        }
    }
    println!("tables written to {out}");
    Ok(())
}

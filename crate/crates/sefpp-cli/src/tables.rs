//! Text reports for the stored reference tables.

use std::fmt::Write as _;

use anyhow::Result;

use sefpp::{Series, reference_table, run_reference_table};

/// Re-runs table `id` and renders a report. The returned flag is false only
/// when a pinned value fell outside its tolerance; a table that ships
/// without pinned checks reports its computed values and passes.
pub fn run_and_render(id: usize) -> Result<(String, bool)> {
    let table = reference_table(id)?;
    let run = run_reference_table(&table)?;

    let mut out = String::new();
    writeln!(out, "reference table {}: {}", table.id, table.title).unwrap();
    writeln!(
        out,
        "decoupled relaxation with tau = {}, alpha = {}, {} steps from (1, 1)",
        table.tau, table.alpha, table.steps
    )
    .unwrap();

    if table.checks.is_empty() {
        if let Some(note) = table.note {
            writeln!(out, "note: {note}").unwrap();
        }
        writeln!(out, "computed values:").unwrap();
        for n in [1, 2, 3, 10, 25, 50, 75, 100] {
            if let Some(record) = run.trace.by_index(n) {
                writeln!(
                    out,
                    "  n={n:>3}  x = {:.16e}  y = {:.16e}",
                    record.x.coords()[0],
                    record.y.coords()[0]
                )
                .unwrap();
            }
        }
        writeln!(out, "result: REPORT (no pinned checks)").unwrap();
        return Ok((out, true));
    }

    for outcome in &run.outcomes {
        let series = match outcome.series {
            Series::X => "x",
            Series::Y => "y",
        };
        writeln!(
            out,
            "  n={:>3} {series}  expected {:<13} computed {:.16e}  diff {:.3e}  tol {:.1e}  {}",
            outcome.n,
            outcome.expected,
            outcome.computed,
            outcome.diff,
            outcome.tolerance,
            if outcome.within { "PASS" } else { "FAIL" },
        )
        .unwrap();
    }
    let within = run.outcomes.iter().filter(|o| o.within).count();
    writeln!(
        out,
        "result: {} ({within} of {} checks within tolerance)",
        if run.passed { "PASS" } else { "FAIL" },
        run.outcomes.len()
    )
    .unwrap();
    Ok((out, run.passed))
}

//! `check`: runs the verification registry and reports every measurement.

use clap::Args;

use qpdm_core::checks::{self, Check};

use crate::{CliError, Log, Outcome, Table};

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Checks to run, by name [default: all].
    pub names: Vec<String>,
    /// List the registered checks instead of running them.
    #[arg(long)]
    pub list: bool,
}

pub fn run(args: &CheckArgs, log: &mut Log) -> Result<Outcome, CliError> {
    let registry = checks::registry();
    if args.list {
        let mut t = Table::new("check", &["criterion", "check", "description"]);
        for (i, c) in registry.iter().enumerate() {
            t.push(vec![(i + 1).into(), c.name().into(), c.describe().into()]);
        }
        return Ok(t.into());
    }
    let selected: Vec<(usize, &Box<dyn Check>)> = if args.names.is_empty() {
        registry.iter().enumerate().collect()
    } else {
        args.names
            .iter()
            .map(|n| {
                registry
                    .iter()
                    .enumerate()
                    .find(|(_, c)| c.name() == n)
                    .ok_or_else(|| {
                        let known: Vec<_> = registry.iter().map(|c| c.name()).collect();
                        CliError::Usage(format!("unknown check '{n}' (known: {})", known.join(", ")))
                    })
            })
            .collect::<Result<_, _>>()?
    };
    let mut t = Table::new(
        "check",
        &["criterion", "check", "measurement", "value", "limit", "status"],
    );
    let mut all_passed = true;
    for (i, check) in selected {
        let id = i + 1;
        match check.run() {
            Ok(report) => {
                let passed = report.passed();
                all_passed &= passed;
                log.line(format!(
                    "{} criterion {id}: {}",
                    if passed { "PASS" } else { "FAIL" },
                    check.name()
                ));
                for m in report.measurements {
                    let status = match m.passed {
                        Some(true) => "pass",
                        Some(false) => "fail",
                        None => "info",
                    };
                    t.push(vec![
                        id.into(),
                        check.name().into(),
                        m.label.into(),
                        m.value.into(),
                        m.limit.into(),
                        status.into(),
                    ]);
                }
            }
            Err(e) => {
                all_passed = false;
                log.line(format!("FAIL criterion {id}: {} ({e})", check.name()));
                t.push(vec![
                    id.into(),
                    check.name().into(),
                    e.to_string().into(),
                    f64::NAN.into(),
                    "".into(),
                    "error".into(),
                ]);
            }
        }
    }
    Ok(Outcome {
        table: t,
        passed: all_passed,
    })
}

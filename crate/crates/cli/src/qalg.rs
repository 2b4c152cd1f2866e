//! `qalg <operation>`: evaluate q-algebra operations over argument lists.

use clap::Args;

use qpdm_core::qcalc::{self, DeformationParam};
use qpdm_core::qops::{back_map, compose_displacements, x_of_x_q, x_q_of_x};
use qpdm_core::Result;

use crate::lists::parse_reals;
use crate::{CliError, Log, Table};

/// A named operation of one or two real arguments; the result may be
/// complex.
pub struct QOperation {
    pub name: &'static str,
    pub describe: &'static str,
    pub arity: usize,
    pub eval: fn(&DeformationParam, f64, f64) -> Result<(f64, f64)>,
}

fn real(v: Result<f64>) -> Result<(f64, f64)> {
    v.map(|x| (x, 0.0))
}

pub fn operation_registry() -> Vec<QOperation> {
    vec![
        QOperation {
            name: "exp",
            describe: "exp_q(a)",
            arity: 1,
            eval: |d, a, _| real(qcalc::q_exp(a, d.q())),
        },
        QOperation {
            name: "exp-im",
            describe: "exp_q(i a), complex",
            arity: 1,
            eval: |d, a, _| {
                let z = qcalc::q_exp_im(a, d.q());
                Ok((z.re, z.im))
            },
        },
        QOperation {
            name: "rho",
            describe: "rho_q(a) = |exp_q(i a)|",
            arity: 1,
            eval: |d, a, _| real(qcalc::q_norm_rho(a, d.q())),
        },
        QOperation {
            name: "log",
            describe: "ln_q(a)",
            arity: 1,
            eval: |d, a, _| real(qcalc::q_log(a, d.q())),
        },
        QOperation {
            name: "add",
            describe: "a (+)_q b",
            arity: 2,
            eval: |d, a, b| Ok((qcalc::q_add(a, b, d.q()), 0.0)),
        },
        QOperation {
            name: "sub",
            describe: "a (-)_q b",
            arity: 2,
            eval: |d, a, b| real(qcalc::q_sub(a, b, d.q())),
        },
        QOperation {
            name: "ntimes",
            describe: "a (.)_q b, the a-fold q-sum of b",
            arity: 2,
            eval: |d, a, b| real(qcalc::q_ntimes(a, b, d.q())),
        },
        QOperation {
            name: "product",
            describe: "a (x)_q b",
            arity: 2,
            eval: |d, a, b| real(qcalc::q_product(a, b, d.q())),
        },
        QOperation {
            name: "xq",
            describe: "deformed position x_q(a) = ln(1 + gamma a)/gamma",
            arity: 1,
            eval: |d, a, _| real(x_q_of_x(a, d)),
        },
        QOperation {
            name: "x-of-xq",
            describe: "physical position of the deformed position a",
            arity: 1,
            eval: |d, a, _| Ok((x_of_x_q(a, d), 0.0)),
        },
        QOperation {
            name: "compose",
            describe: "single displacement equal to a then b",
            arity: 2,
            eval: |d, a, b| Ok((compose_displacements(a, b, d), 0.0)),
        },
        QOperation {
            name: "back-map",
            describe: "point carried to a by the translation by b",
            arity: 2,
            eval: |d, a, b| real(back_map(a, b, d)),
        },
    ]
}

#[derive(Debug, Args)]
pub struct QalgArgs {
    /// Operation name; `--list` shows them all.
    #[arg(required_unless_present = "list")]
    pub operation: Option<String>,
    /// Entropic index q.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q: f64,
    /// Length scale xi (gamma = (1 - q)/xi).
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// First argument(s): list or range.
    #[arg(long, short = 'a', allow_hyphen_values = true)]
    pub a: Vec<String>,
    /// Second argument(s) for binary operations.
    #[arg(long, short = 'b', allow_hyphen_values = true)]
    pub b: Vec<String>,
    /// List the available operations.
    #[arg(long)]
    pub list: bool,
}

pub fn run(args: &QalgArgs, log: &mut Log) -> std::result::Result<Table, CliError> {
    let registry = operation_registry();
    if args.list {
        let mut t = Table::new("qalg", &["operation", "arity", "description"]);
        for op in &registry {
            t.push(vec![op.name.into(), op.arity.into(), op.describe.into()]);
        }
        return Ok(t);
    }
    let name = args.operation.as_deref().unwrap_or_default();
    let op = registry.iter().find(|o| o.name == name).ok_or_else(|| {
        let known: Vec<_> = registry.iter().map(|o| o.name).collect();
        CliError::Usage(format!("unknown operation '{name}' (known: {})", known.join(", ")))
    })?;
    let dp = DeformationParam::new(args.q, args.xi)?;
    if args.a.is_empty() {
        return Err(CliError::Usage(format!("'{name}' needs --a")));
    }
    let a_vals = parse_reals(&args.a).map_err(CliError::Usage)?;
    let b_vals = match (op.arity, args.b.is_empty()) {
        (2, true) => return Err(CliError::Usage(format!("'{name}' needs --b"))),
        (2, false) => parse_reals(&args.b).map_err(CliError::Usage)?,
        (_, true) => vec![f64::NAN],
        (_, false) => return Err(CliError::Usage(format!("'{name}' takes only --a"))),
    };
    let mut columns = vec!["q", "a"];
    if op.arity == 2 {
        columns.push("b");
    }
    columns.extend(["value", "value_im"]);
    let mut t = Table::new(format!("qalg {name}"), &columns)
        .param("q", args.q)
        .param("xi", args.xi);
    for &a in &a_vals {
        for &b in &b_vals {
            let (re, im) = (op.eval)(&dp, a, b).map_err(|e| {
                if op.arity == 2 {
                    log.line(format!("qalg {name}: failed at a = {a}, b = {b}"));
                } else {
                    log.line(format!("qalg {name}: failed at a = {a}"));
                }
                CliError::Core(e)
            })?;
            let mut row = vec![args.q.into(), a.into()];
            if op.arity == 2 {
                row.push(b.into());
            }
            row.extend([re.into(), im.into()]);
            t.push(row);
        }
    }
    Ok(t)
}

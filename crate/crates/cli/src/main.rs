//! `qdc`: command-line front end for the quaternionic Dolbeault engine.
//!
//! Exit codes: 0 when every verification passes, 1 when a mathematical check
//! fails, 2 on invalid input.

use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qdc_core::decomposition::{decomposition_table, project, table_csv};
use qdc_core::json::{form_from_str, form_to_json, form_to_string, qfunction_from_str};
use qdc_core::linalg::{parse_q, Q};
use qdc_core::operators::{cohomology_dims, verify_double_complex};
use qdc_core::qholo::{cauchy_riemann, hq_split_all, qholo_symbol_ellipticity, script_brackets_hold};
use qdc_core::qk_forms::{kraines_bonan_decompose, recompose};
use qdc_core::real_dolbeault::real_dolbeault_counterexamples;
use qdc_core::sp1::{act, casimir};
use qdc_core::symbol::ellipticity_report;
use qdc_core::{Error, Form, Generator};

#[derive(Parser)]
#[command(name = "qdc", version, about = "Exact computations for the quaternionic Dolbeault double complex on flat H^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Format {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Clone, Copy)]
struct JsonOnly {
    /// Emit JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicities ε and dimensions of every E_{k,r}.
    Dims {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        format: Format,
    },
    /// Project a form onto E_{k,r}.
    Project {
        /// Form JSON file, or `-` for stdin.
        #[arg(long)]
        form: String,
        #[arg(long)]
        r: usize,
    },
    /// Apply I, J, K or the Casimir to a form.
    Act {
        /// One of I, J, K, casimir.
        #[arg(long)]
        op: String,
        /// Form JSON file, or `-` for stdin.
        #[arg(long)]
        form: String,
    },
    /// Check d = D' + D̄, the square identities and the closed forms on random sections.
    ComplexCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: JsonOnly,
    },
    /// Kernel, image and cohomology dimensions of D' on polynomial sections.
    Cohomology {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        #[command(flatten)]
        format: JsonOnly,
    },
    /// Exactness of the symbol sequence at every node of every diagonal.
    Ellipticity {
        #[arg(long)]
        n: usize,
        /// Covector components, comma separated rationals (default e^0).
        #[arg(long)]
        xi: Option<String>,
        #[command(flatten)]
        format: Format,
    },
    /// Effective decomposition φ = Σ Ω^j ∧ μ_j.
    Bonan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Form JSON file, or `-` for stdin.
        #[arg(long)]
        form: String,
    },
    /// q-holomorphy of a quaternion-valued function, or the quaternion-valued report.
    Qholo {
        /// QFunction JSON file, or `-` for stdin.
        #[arg(long, required_unless_present = "report")]
        check: Option<String>,
        /// Expected n of the function.
        #[arg(long)]
        n: Option<usize>,
        /// Splitting, bracket and symbol report on H^1.
        #[arg(long, conflicts_with = "check")]
        report: bool,
        #[command(flatten)]
        format: JsonOnly,
    },
    /// The U(1) decomposition and ellipticity counterexamples on C^2.
    RealDolbeault {
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        format: JsonOnly,
    },
}

/// Printed output and whether every verification passed.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, ok: true }
    }
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut s = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|c| s = c)
    };
    res.map_err(|e| Error::Input(format!("{path}: {e}")))?;
    Ok(s)
}

fn at_path(path: &str, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{path}: {m}")),
        other => other,
    }
}

fn read_form(path: &str) -> Result<Form, Error> {
    form_from_str(&read_input(path)?).map_err(|e| at_path(path, e))
}

fn check_n(n: usize) -> Result<(), Error> {
    if (1..=16).contains(&n) {
        Ok(())
    } else {
        Err(Error::Input(format!("--n must be between 1 and 16, got {n}")))
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn parse_xi(s: &str) -> Result<Vec<Q>, Error> {
    s.split(',')
        .enumerate()
        .map(|(i, part)| parse_q(part.trim()).ok_or_else(|| Error::Input(format!("--xi entry {i}: {part:?} is not a rational"))))
        .collect()
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Dims { n, format } => {
            check_n(n)?;
            let rows = decomposition_table(n);
            let text = if format.csv {
                table_csv(&rows)
            } else if format.json {
                pretty(&json!({ "n": n, "rows": rows }))
            } else {
                let mut s = format!("{:>3} {:>3} {:>10} {:>10}\n", "k", "r", "epsilon", "dim");
                for row in &rows {
                    writeln!(s, "{:>3} {:>3} {:>10} {:>10}", row.k, row.r, row.epsilon, row.dim).unwrap();
                }
                s
            };
            Ok(Outcome::ok(text))
        }
        Command::Project { form, r } => {
            let a = read_form(&form)?;
            Ok(Outcome::ok(form_to_string(&project(&a, r)) + "\n"))
        }
        Command::Act { op, form } => {
            let a = read_form(&form)?;
            let out = if op.eq_ignore_ascii_case("casimir") { casimir(&a) } else { act(op.parse::<Generator>()?, &a) };
            Ok(Outcome::ok(form_to_string(&out) + "\n"))
        }
        Command::ComplexCheck { n, max_degree, trials, seed, format } => {
            check_n(n)?;
            let rep = verify_double_complex(n, max_degree, trials, seed);
            let ok = rep.violation_count() == 0;
            let text = if format.json {
                pretty(&rep)
            } else {
                let mut s = format!("n={n} max_degree={max_degree} trials={trials} seed={seed}\n");
                for node in &rep.nodes {
                    writeln!(s, "({},{}) violations={}", node.k, node.r, node.violations.len()).unwrap();
                    for v in &node.violations {
                        writeln!(s, "  {v}").unwrap();
                    }
                }
                writeln!(s, "{}", if ok { "all identities hold" } else { "identity violations found" }).unwrap();
                s
            };
            Ok(Outcome { text, ok })
        }
        Command::Cohomology { n, k, r, max_degree, format } => {
            check_n(n)?;
            let c = cohomology_dims(n, k, r, max_degree)?;
            let text = if format.json {
                pretty(&c)
            } else {
                format!("ker={} im={} H={}\n", c.dim_kernel, c.dim_image, c.dim_cohomology)
            };
            Ok(Outcome::ok(text))
        }
        Command::Ellipticity { n, xi, format } => {
            check_n(n)?;
            let xi = xi.as_deref().map(parse_xi).transpose()?;
            let rep = ellipticity_report(n, xi.as_deref())?;
            let ok = rep.all_match();
            let text = if format.csv {
                rep.to_csv()
            } else if format.json {
                pretty(&rep)
            } else {
                let mut s = format!("xi = ({})\n{:>3} {:>3} {:>3} {:>6} {:>7} {:>8} {:>6} {:>9}\n", rep.xi.join(", "), "k0", "k", "r", "dim", "rank_in", "rank_out", "exact", "predicted");
                for row in &rep.rows {
                    writeln!(
                        s,
                        "{:>3} {:>3} {:>3} {:>6} {:>7} {:>8} {:>6} {:>9}",
                        row.k0, row.k, row.r, row.dim, row.rank_in, row.rank_out, row.exact, row.predicted
                    )
                    .unwrap();
                }
                s
            };
            Ok(Outcome { text, ok })
        }
        Command::Bonan { n, k, form } => {
            let phi = read_form(&form)?;
            if phi.n() != n || phi.k() != k {
                return Err(Error::Input(format!("form has n={} k={}, expected n={n} k={k}", phi.n(), phi.k())));
            }
            let parts = kraines_bonan_decompose(&phi)?;
            let ok = recompose(n, &parts)? == phi;
            let parts_json: Vec<_> = parts.iter().map(|(j, mu)| json!({ "j": j, "mu": form_to_json(mu) })).collect();
            Ok(Outcome { text: pretty(&json!({ "n": n, "k": k, "parts": parts_json, "recomposes": ok })), ok })
        }
        Command::Qholo { check, n, report, format } => {
            if report {
                let splits = hq_split_all(1)?;
                let brackets = script_brackets_hold(1);
                let symbol = qholo_symbol_ellipticity(1)?;
                let ok = brackets && splits.iter().all(|s| s.passed());
                let text = if format.json {
                    pretty(&json!({ "splits": splits, "brackets": brackets, "symbol": symbol }))
                } else {
                    let mut s = String::from("H ⊗ E_{k,r} splitting on H^1\n");
                    for sp in &splits {
                        writeln!(s, "({},{}) V_(r+1): {} V_(r-1): {} expected {} {}", sp.k, sp.r, sp.upper, sp.lower, sp.expected_upper, sp.expected_lower).unwrap();
                    }
                    writeln!(s, "script brackets hold: {brackets}\nquaternion-valued symbol sequence").unwrap();
                    for row in &symbol.rows {
                        writeln!(s, "F(k={},s={}) dim={} rank_in={} rank_out={} exact={}", row.k, row.s, row.dim, row.rank_in, row.rank_out, row.exact).unwrap();
                    }
                    writeln!(s, "every node exact: {}", symbol.all_exact()).unwrap();
                    s
                };
                return Ok(Outcome { text, ok });
            }
            let path = check.expect("clap enforces --check or --report");
            let f = qfunction_from_str(&read_input(&path)?).map_err(|e| at_path(&path, e))?;
            if let Some(n) = n {
                if f.n != n {
                    return Err(Error::Input(format!("function has n={}, expected n={n}", f.n)));
                }
            }
            let residual = cauchy_riemann(&f);
            let ok = residual.is_zero();
            let text = if format.json {
                pretty(&json!({ "q_holomorphic": ok, "residual": form_to_json(&residual) }))
            } else {
                format!("q-holomorphic: {ok}\nresidual: {}\n", form_to_string(&residual))
            };
            Ok(Outcome { text, ok })
        }
        Command::RealDolbeault { report, format } => {
            if !report {
                return Err(Error::Input("real-dolbeault needs --report".into()));
            }
            let rep = real_dolbeault_counterexamples();
            let ok = rep.passed();
            let text = if format.json {
                pretty(&rep)
            } else {
                let mut s = String::from("U(1) decomposition of Λ^k(C^2)\n");
                for (label, dim) in &rep.dims {
                    writeln!(s, "  {label}: {dim}").unwrap();
                }
                writeln!(s, "e^01 in [Λ^1,1] and killed by σ: {}", rep.e01_in_kernel).unwrap();
                writeln!(s, "e^123 in [[Λ^2,1]] and not an image: {}", rep.e123_not_image).unwrap();
                writeln!(s, "leading edge fails only at [[Λ^1,0]]: {}", rep.leading_edge_failure).unwrap();
                writeln!(s, "exact wherever p >= q + 2: {}", rep.exact_far_from_diagonal).unwrap();
                for row in &rep.ellipticity {
                    writeln!(s, "  {} dim={} rank_in={} rank_out={} exact={} predicted={}", row.label, row.dim, row.rank_in, row.rank_out, row.exact, row.predicted).unwrap();
                }
                writeln!(s, "[∂], [∂̄] identity violations: {}", rep.identity_violations).unwrap();
                s
            };
            Ok(Outcome { text, ok })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ (Error::Input(_) | Error::Domain(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use vtcp_core::classes::{analyze, Outcome, SearchConfig, Target, TargetVerdict, TensorClass};
use vtcp_core::solvers::{solve, verify_solution, Method, SolveReport, SolverConfig};
use vtcp_core::workbench::{
    generate_instance, instance_to_json, load_instance, reproduce, reproduce_all, save_instance, GenKind,
    InstanceMeta, ReproductionReport,
};
use vtcp_core::{Result, VtcpError};

/// `println!` that exits quietly when stdout is closed.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

const DEFAULT_CLASSES: &str = "vr0,ve,vp,vp1,vp2,strongvp,semipositive";

#[derive(Parser)]
#[command(name = "vtcp", version, about = "Vertical tensor complementarity problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Print a machine-readable JSON report on standard output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, env = "VTCP_SEED", default_value_t = 0)]
    seed: u64,
    /// Random starts per class search.
    #[arg(long, default_value_t = 200)]
    starts: usize,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            num_starts: self.starts,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check structure classes of the tensor pair in an instance file.
    Analyze {
        file: PathBuf,
        /// Comma-separated classes: vr0, ve, vp, vp1, vp2, strongvp, semipositive, z, r, strongm.
        #[arg(long, default_value = DEFAULT_CLASSES)]
        classes: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Solve an instance.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "newton")]
        method: Method,
        /// Starting point for Newton, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, env = "VTCP_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Check whether a point solves an instance.
    Verify {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the registered facts of the worked examples.
    Reproduce {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        example: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Generate an instance file.
    Gen {
        /// z-semipositive-pair, random-dense-pair or paper-example.
        #[arg(long)]
        kind: GenKind,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, env = "VTCP_SEED", default_value_t = 0)]
        seed: u64,
        /// Example id for paper-example.
        #[arg(long)]
        id: Option<String>,
        /// Output path; the instance is printed when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn print_json<T: Serialize + ?Sized>(value: &T) {
    say!("{}", serde_json::to_string_pretty(value).expect("report serialization"));
}

fn fmt_vec(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(", "))
}

fn describe(v: &TargetVerdict) -> String {
    let target = match v.target {
        Target::Pair => "pair",
        Target::A1 => "A1",
        Target::A2 => "A2",
    };
    let head = format!("{target} {}", v.verdict.class);
    match &v.verdict.outcome {
        Outcome::Violated {
            certificate,
            value,
            boundary,
            ..
        } => format!(
            "{head}: violated, value {value:.6e}{}, certificate {}",
            if *boundary { " (tie)" } else { "" },
            serde_json::to_string(certificate).unwrap_or_default()
        ),
        Outcome::HoldsCertified { witness, proof, .. } => match witness {
            Some(w) => format!("{head}: holds, witness {}", fmt_vec(w)),
            None => format!("{head}: holds, {proof}"),
        },
        Outcome::Undetermined { starts, best_value } => {
            format!("{head}: no counterexample after {starts} starts (best value {best_value:.6e})")
        }
    }
}

fn run_analyze(file: PathBuf, classes: &str, search: &SearchArgs, json: bool) -> Result<ExitCode> {
    let inst = load_instance(file)?;
    let classes = classes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<TensorClass>())
        .collect::<Result<Vec<_>>>()?;
    let verdicts = analyze(inst.pair(), &classes, &search.config())?;
    if json {
        print_json(&verdicts);
    } else {
        for v in &verdicts {
            say!("{}", describe(v));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_solve(r: &SolveReport) {
    say!("method: {}", r.method);
    say!("status: {:?}", r.status);
    say!("x: {}", fmt_vec(&r.x));
    say!("residual: {:.3e}", r.residual_inf_norm);
    say!("iterations: {}", r.iterations);
    if !r.solutions.is_empty() {
        say!("solutions:");
        for s in &r.solutions {
            say!("  {}", fmt_vec(s));
        }
    }
    if r.non_isolated {
        say!("warning: the grid shows a non-isolated solution set");
    }
    if let Some(m) = &r.message {
        say!("note: {m}");
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_reproduction(reports: &[ReproductionReport]) {
    for r in reports {
        say!("example {} ({})", r.id, r.notes);
        for f in &r.facts {
            say!(
                "  [{}] {}: {}",
                if f.passed { "pass" } else { "FAIL" },
                f.description,
                f.observed
            );
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            file,
            classes,
            search,
            common,
        } => run_analyze(file, &classes, &search, common.json),
        Command::Solve {
            file,
            method,
            x0,
            tol,
            max_iters,
            seed,
            common,
        } => {
            let inst = load_instance(file)?;
            let mut cfg = SolverConfig {
                seed,
                ..Default::default()
            };
            if let Some(t) = tol {
                cfg.tol_residual = t;
            }
            if let Some(k) = max_iters {
                cfg.max_iters = k;
            }
            cfg.validate()?;
            let r = solve(&inst, method, x0.as_deref(), &cfg)?;
            if common.json {
                print_json(&r);
            } else {
                print_solve(&r);
            }
            Ok(exit_for(r.converged()))
        }
        Command::Verify { file, x, tol, common } => {
            let inst = load_instance(file)?;
            let v = verify_solution(&inst, &x, tol)?;
            if common.json {
                print_json(&v);
            } else {
                say!("x: {}", fmt_vec(&x));
                say!("min(q1 + A1 x^(m-1)): {:.3e}", v.first_min);
                say!("min(q2 + A2 x^(m-1)): {:.3e}", v.second_min);
                say!("inner product: {:.3e}", v.inner_product);
                say!("residual: {:.3e}", v.residual_inf_norm);
                say!("{}", if v.passed { "solution" } else { "not a solution" });
            }
            Ok(exit_for(v.passed))
        }
        Command::Reproduce {
            example,
            all,
            search,
            common,
        } => {
            let cfg = search.config();
            let solver = SolverConfig::default();
            let reports = match (all, example) {
                (true, _) | (false, None) => reproduce_all(&cfg, &solver)?,
                (false, Some(id)) => vec![reproduce(&id, &cfg, &solver)?],
            };
            let failures: Vec<String> = reports
                .iter()
                .flat_map(|r| r.failures().map(move |f| format!("{}: {}", r.id, f.description)))
                .collect();
            if common.json {
                print_json(&json!({ "examples": reports, "failures": failures }));
            } else {
                print_reproduction(&reports);
                let total: usize = reports.iter().map(|r| r.facts.len()).sum();
                say!("{} of {} facts reproduced", total - failures.len(), total);
            }
            for f in &failures {
                eprintln!("failed: {f}");
            }
            Ok(exit_for(failures.is_empty()))
        }
        Command::Gen {
            kind,
            order,
            dim,
            seed,
            id,
            output,
            common,
        } => {
            let inst = generate_instance(kind, order, dim, seed, id.as_deref())?;
            let meta = InstanceMeta {
                name: Some(match &id {
                    Some(id) if kind == GenKind::PaperExample => format!("example {id}"),
                    _ => format!("{kind} seed {seed}"),
                }),
                source: Some(format!("vtcp gen --kind {kind}")),
            };
            match output {
                Some(path) => {
                    save_instance(&inst, &meta, &path)?;
                    if common.json {
                        print_json(&json!({
                            "path": path,
                            "kind": kind,
                            "order": inst.order(),
                            "dim": inst.dim(),
                            "seed": seed,
                        }));
                    } else {
                        say!("wrote {}", path.display());
                    }
                }
                None => say!("{}", instance_to_json(&inst, &meta)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let VtcpError::Parse { .. } | VtcpError::InvalidField { .. } = e {
                eprintln!("hint: instance files are JSON with format_version, order, dim, A1, A2, q1, q2");
            }
            ExitCode::from(2)
        }
    }
}

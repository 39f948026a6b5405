use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentkit::extension::ExtendError;
use momentkit::measure::{jacobi_from_moments, recover_measure_with_tol};
use momentkit::{
    extend, functional_apply, hamburger_check, integrate, run_pipeline,
    run_selftest, sos::sos_decompose_with_tol, to_string_g17, verify_moments, AtomicMeasure, Error,
    FunctionSpec, MomentSequence, Pick, Polynomial, SandwichConfig, SosOutcome, Tolerances,
};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

const SELFTEST_TRIALS: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "momentkit", version, about = "Hamburger moment problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Relative PSD tolerance of the Hankel test.
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = Tolerances::default().tol)]
    tol: f64,
    #[arg(long = "lp-tol", global = true, allow_negative_numbers = true, default_value_t = Tolerances::default().lp_tol)]
    lp_tol: f64,
    #[arg(long = "sos-tol", global = true, allow_negative_numbers = true, default_value_t = Tolerances::default().sos_tol)]
    sos_tol: f64,
    #[arg(long = "moment-tol", global = true, allow_negative_numbers = true, default_value_t = Tolerances::default().moment_tol)]
    moment_tol: f64,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SandwichArgs {
    #[arg(long)]
    moments: PathBuf,
    #[arg(long)]
    function: PathBuf,
    #[arg(long)]
    degree: usize,
    #[arg(long = "grid-size", default_value_t = 201)]
    grid_size: usize,
    #[arg(long, default_value = "midpoint")]
    pick: Pick,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hankel PSD test of a moment sequence.
    Check {
        #[arg(long)]
        moments: PathBuf,
    },
    /// Two-square certificate or negativity witness for a polynomial.
    Sos {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Gauss-quadrature measure reproducing the moments.
    Recover {
        #[arg(long)]
        moments: PathBuf,
    },
    /// Evaluates L(f) = sum c_j s_j.
    Apply {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Integrates a function against an atomic measure.
    Integrate {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Minorant/majorant bounds and extension value for L(g).
    Extend(SandwichArgs),
    /// check, recover, verify, extend and cross-check in one run.
    Pipeline(SandwichArgs),
    /// Seeded randomized property checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Fully parsed invocation: every input file has been read and validated.
struct RunConfig {
    command: Command,
    tolerances: Tolerances,
    inputs: Inputs,
    echo: Value,
}

#[derive(Default)]
struct Inputs {
    moments: Option<MomentSequence>,
    poly: Option<Polynomial>,
    function: Option<FunctionSpec>,
    measure: Option<AtomicMeasure>,
}

struct Outcome {
    code: u8,
    doc: Value,
}

impl Outcome {
    fn error(kind: &str, detail: impl Into<String>) -> Self {
        Outcome {
            code: 2,
            doc: json!({ "error": { "kind": kind, "detail": detail.into() } }),
        }
    }

    fn core(e: &Error) -> Self {
        Self::error(e.kind(), e.to_string())
    }
}

fn read_input<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::error("InputError", format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Outcome::error("InvalidInput", format!("{what} file {}: {e}", path.display())))
}

fn configure(cli: Cli) -> Result<RunConfig, Outcome> {
    let tolerances = Tolerances {
        tol: cli.common.tol,
        lp_tol: cli.common.lp_tol,
        sos_tol: cli.common.sos_tol,
        moment_tol: cli.common.moment_tol,
    };
    tolerances.validate().map_err(|e| Outcome::core(&e))?;

    let mut inputs = Inputs::default();
    let mut echo = serde_json::Map::new();
    let load_moments = |p: &Path, inputs: &mut Inputs, echo: &mut serde_json::Map<String, Value>| {
        let s: MomentSequence = read_input(p, "moments")?;
        echo.insert("moments".into(), json!(s.as_slice()));
        inputs.moments = Some(s);
        Ok::<(), Outcome>(())
    };
    let load_poly = |p: &Path, inputs: &mut Inputs, echo: &mut serde_json::Map<String, Value>| {
        let f: Polynomial = read_input(p, "poly")?;
        echo.insert("poly".into(), json!(f.coeffs()));
        inputs.poly = Some(f);
        Ok::<(), Outcome>(())
    };
    let load_function = |p: &Path, inputs: &mut Inputs, echo: &mut serde_json::Map<String, Value>| {
        let g: FunctionSpec = read_input(p, "function")?;
        echo.insert("function".into(), serde_json::to_value(&g).expect("serializable"));
        inputs.function = Some(g);
        Ok::<(), Outcome>(())
    };

    match &cli.command {
        Command::Check { moments } | Command::Recover { moments } => load_moments(moments, &mut inputs, &mut echo)?,
        Command::Sos { poly } => load_poly(poly, &mut inputs, &mut echo)?,
        Command::Apply { moments, poly } => {
            load_moments(moments, &mut inputs, &mut echo)?;
            load_poly(poly, &mut inputs, &mut echo)?;
        }
        Command::Integrate { measure, function } => {
            let mu: AtomicMeasure = read_input(measure, "measure")?;
            echo.insert("measure".into(), serde_json::to_value(&mu).expect("serializable"));
            inputs.measure = Some(mu);
            load_function(function, &mut inputs, &mut echo)?;
        }
        Command::Extend(a) | Command::Pipeline(a) => {
            load_moments(&a.moments, &mut inputs, &mut echo)?;
            load_function(&a.function, &mut inputs, &mut echo)?;
            echo.insert("degree".into(), json!(a.degree));
            echo.insert("grid_size".into(), json!(a.grid_size));
            echo.insert("pick".into(), json!(a.pick));
        }
        Command::Selftest { seed } => {
            echo.insert("seed".into(), json!(seed));
            echo.insert("trials".into(), json!(SELFTEST_TRIALS));
        }
    }
    Ok(RunConfig {
        command: cli.command,
        tolerances,
        inputs,
        echo: Value::Object(echo),
    })
}

fn run(cfg: &RunConfig) -> Outcome {
    let tol = &cfg.tolerances;
    let inp = &cfg.inputs;
    let (code, result) = match &cfg.command {
        Command::Check { .. } => {
            let verdict = hamburger_check(inp.moments.as_ref().expect("loaded"), tol.tol);
            (u8::from(!verdict.is_psd), json!(verdict))
        }
        Command::Sos { .. } => {
            let f = inp.poly.as_ref().expect("loaded");
            match sos_decompose_with_tol(f, tol.sos_tol) {
                Ok(SosOutcome::Certificate(c)) => (0, json!({ "certificate": c })),
                Ok(SosOutcome::Witness(w)) => (1, json!({ "witness": w })),
                Err(e) => return Outcome::core(&e.into()),
            }
        }
        Command::Recover { .. } => {
            let s = inp.moments.as_ref().expect("loaded");
            let mu = match recover_measure_with_tol(s, tol.tol) {
                Ok(mu) => mu,
                Err(e) => return Outcome::core(&e.into()),
            };
            let k_max = s.last_index().min(2 * mu.len() - 1);
            let report = verify_moments(&mu, s, k_max, tol.moment_tol);
            let jacobi = jacobi_from_moments(s).ok();
            (0, json!({ "measure": mu, "jacobi": jacobi, "moment_report": report }))
        }
        Command::Apply { .. } => {
            match functional_apply(inp.moments.as_ref().expect("loaded"), inp.poly.as_ref().expect("loaded")) {
                Ok(v) => (0, json!({ "value": v })),
                Err(e) => return Outcome::core(&e.into()),
            }
        }
        Command::Integrate { .. } => {
            match integrate(inp.measure.as_ref().expect("loaded"), inp.function.as_ref().expect("loaded")) {
                Ok(v) => (0, json!({ "value": v })),
                Err(e) => return Outcome::core(&e.into()),
            }
        }
        Command::Extend(a) => {
            let sc = SandwichConfig {
                pick: a.pick,
                psd_tol: tol.tol,
                lp_tol: tol.lp_tol,
                ..SandwichConfig::new(a.degree, a.grid_size)
            };
            match extend(inp.moments.as_ref().expect("loaded"), inp.function.as_ref().expect("loaded"), &sc) {
                Ok(r) => (0, json!(r)),
                Err(ExtendError::SandwichEmpty { lower, upper, lp_tol }) => (
                    1,
                    json!({ "verdict": "SandwichEmpty", "lower": lower, "upper": upper, "lp_tol": lp_tol }),
                ),
                Err(e) => return Outcome::core(&e.into()),
            }
        }
        Command::Pipeline(a) => {
            let s = inp.moments.as_ref().expect("loaded");
            let g = inp.function.as_ref().expect("loaded");
            match run_pipeline(s, g, a.degree, a.grid_size, a.pick, tol) {
                Ok(r) => (0, json!(r)),
                Err(e) if e.is_negative_verdict() => (
                    1,
                    json!({
                        "stopped_at": e.stage.name(),
                        "verdict": e.error.kind(),
                        "detail": e.error.to_string(),
                        "hamburger": e.verdict,
                    }),
                ),
                Err(e) => {
                    return Outcome::error(e.error.kind(), format!("stage {}: {}", e.stage.name(), e.error));
                }
            }
        }
        Command::Selftest { seed } => {
            let report = run_selftest(*seed, SELFTEST_TRIALS);
            eprint!("{}", report.table());
            (u8::from(!report.all_pass), json!(report))
        }
    };
    Outcome {
        code,
        doc: json!({
            "command": command_name(&cfg.command),
            "inputs_echo": cfg.echo,
            "tolerances": tol,
            "result": result,
        }),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Sos { .. } => "sos",
        Command::Recover { .. } => "recover",
        Command::Apply { .. } => "apply",
        Command::Integrate { .. } => "integrate",
        Command::Extend(_) => "extend",
        Command::Pipeline(_) => "pipeline",
        Command::Selftest { .. } => "selftest",
    }
}

fn emit(doc: &Value, output: Option<&Path>) -> std::io::Result<()> {
    let mut text = to_string_g17(doc).expect("JSON values always serialize");
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let doc = Outcome::error("UsageError", e.kind().to_string()).doc;
            let _ = emit(&doc, None);
            return ExitCode::from(2);
        }
    };
    let output = cli.common.output.clone();
    let outcome = match configure(cli) {
        Ok(cfg) => run(&cfg),
        Err(o) => o,
    };
    if outcome.code == 2 {
        if let Some(err) = outcome.doc.get("error") {
            eprintln!("momentkit: {}: {}", err["kind"].as_str().unwrap_or("?"), err["detail"].as_str().unwrap_or(""));
        }
    }
    if let Err(e) = emit(&outcome.doc, output.as_deref()) {
        eprintln!("momentkit: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code)
}

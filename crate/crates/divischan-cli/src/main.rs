//! `divischan` — classify qubit channels, run trajectory sweeps, sample
//! tetrahedron slices, and analyze one-mode Gaussian forms.
//!
//! Exit codes: 0 success, 2 parse error, 3 non-CPTP input (a report is still
//! printed), 4 insufficient Fock truncation.

use clap::{Parser, Subcommand, ValueEnum};
use divischan::chanrep::parse_channel_json;
use divischan::divisibility::classify;
use divischan::dynmaps::{
    collision_not_map, dephasing_map, sweep, DynError, JcParams, JcSimulator, TrajectoryPoint,
};
use divischan::gaussian::{
    concat, enforce_tp_hp, master_equation, parse_gaussian_json, tuple_report, GaussianForm,
};
use num_complex::Complex64;
use std::io::Read;
use std::process::ExitCode;

const EXIT_PARSE: u8 = 2;
const EXIT_NON_CPTP: u8 = 3;
const EXIT_TRUNCATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "divischan",
    about = "Divisibility analysis of qubit and one-mode Gaussian channels",
    long_about = "Divisibility analysis of qubit and one-mode Gaussian channels.\n\n\
Exit codes: 0 success, 2 parse error, 3 non-CPTP input (report still printed),\n\
4 insufficient Fock truncation.\n\n\
The environment variable DIVISCHAN_TOL overrides the default numerical\n\
tolerance (1e-9)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Collision,
    Jc,
    Dephasing,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaussAction {
    Tuple,
    Cp,
    Class,
    Concat,
    Master,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a channel given as JSON ({"repr":..., "data":...})
    Classify {
        /// Input file; stdin when omitted
        #[arg(long)]
        input: Option<String>,
        /// Output file; stdout when omitted
        #[arg(long)]
        output: Option<String>,
    },
    /// Sweep a time-parameterized model and classify along the trajectory
    Sweep {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Coherent-state amplitude (jc model)
        #[arg(long, default_value_t = 6.0)]
        alpha: f64,
        /// Coupling strength (jc model) or rate (dephasing model)
        #[arg(long, default_value_t = 10.0)]
        g: f64,
        #[arg(long, default_value_t = 5.0)]
        omega_a: f64,
        #[arg(long, default_value_t = 20.0)]
        omega_f: f64,
        /// Fock-space truncation (jc model); automatic when omitted
        #[arg(long)]
        n_fock: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<String>,
    },
    /// Sample the plane λ1+λ2+λ3 = sum of Pauli channels
    Slice {
        #[arg(long, default_value_t = 0.4)]
        sum: f64,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<String>,
    },
    /// Analyze one-mode Gaussian forms given as JSON
    Gaussian {
        #[arg(long, value_enum)]
        action: GaussAction,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        output: Option<String>,
    },
}

fn read_input(path: &Option<String>) -> std::io::Result<Vec<u8>> {
    match path {
        Some(p) if p != "-" => std::fs::read(p),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<String>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) if p != "-" => std::fs::write(p, text),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify { input, output } => cmd_classify(&input, &output),
        Command::Sweep {
            model,
            t0,
            t1,
            steps,
            alpha,
            g,
            omega_a,
            omega_f,
            n_fock,
            format,
            output,
        } => cmd_sweep(
            model, t0, t1, steps, alpha, g, omega_a, omega_f, n_fock, format, &output,
        ),
        Command::Slice {
            sum,
            resolution,
            format,
            output,
        } => cmd_slice(sum, resolution, format, &output),
        Command::Gaussian {
            action,
            input,
            output,
        } => cmd_gaussian(action, &input, &output),
    }
}

fn cmd_classify(input: &Option<String>, output: &Option<String>) -> ExitCode {
    let bytes = match read_input(input) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_PARSE, &format!("cannot read input: {e}")),
    };
    let channel = match parse_channel_json(&bytes) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_PARSE, &e.to_string()),
    };
    let report = classify(&channel);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if write_output(output, &format!("{text}\n")).is_err() {
        return fail(EXIT_PARSE, "cannot write output");
    }
    if report.in_c {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NON_CPTP)
    }
}

#[derive(serde::Serialize)]
struct SweepRow<'a> {
    t: f64,
    #[serde(flatten)]
    report: &'a divischan::divisibility::DivisibilityReport,
    lambdas: [f64; 3],
    tau: [f64; 3],
}

fn sweep_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from("t,delta,chi,det,lambda1,lambda2,lambda3,tau1,tau2,tau3\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            p.t,
            p.report.delta,
            p.report.chi,
            p.report.det,
            p.lambdas[0],
            p.lambdas[1],
            p.lambdas[2],
            p.tau[0],
            p.tau[1],
            p.tau[2],
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: Model,
    t0: f64,
    t1: f64,
    steps: usize,
    alpha: f64,
    g: f64,
    omega_a: f64,
    omega_f: f64,
    n_fock: Option<usize>,
    format: Format,
    output: &Option<String>,
) -> ExitCode {
    if steps < 2 {
        return fail(EXIT_PARSE, "steps must be at least 2");
    }
    let results = match model {
        Model::Collision => sweep(|t| Ok(collision_not_map(t)), t0, t1, steps),
        Model::Dephasing => sweep(|t| Ok(dephasing_map(t, g)), t0, t1, steps),
        Model::Jc => {
            let mut params = JcParams::new(Complex64::new(alpha, 0.0), g, omega_a, omega_f);
            if let Some(nf) = n_fock {
                params.n_fock = nf;
            }
            let sim = JcSimulator::new(params);
            sweep(|t| sim.channel(t), t0, t1, steps)
        }
    };
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(DynError::TruncationInsufficient(l)) => {
                return fail(
                    EXIT_TRUNCATION,
                    &format!("Fock truncation insufficient (leakage {l:.3e}); raise --n-fock"),
                )
            }
            Err(e) => return fail(EXIT_PARSE, &e.to_string()),
        }
    }
    let text = match format {
        Format::Csv => sweep_csv(&points),
        Format::Json => {
            let rows: Vec<SweepRow> = points
                .iter()
                .map(|p| SweepRow {
                    t: p.t,
                    report: &p.report,
                    lambdas: [p.lambdas[0], p.lambdas[1], p.lambdas[2]],
                    tau: [p.tau[0], p.tau[1], p.tau[2]],
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&rows).expect("rows serialize")
            )
        }
    };
    if write_output(output, &text).is_err() {
        return fail(EXIT_PARSE, "cannot write output");
    }
    ExitCode::SUCCESS
}

/// Class label of a Pauli channel diag(1, λ1, λ2, λ3).
pub fn pauli_class_label(report: &divischan::divisibility::DivisibilityReport) -> &'static str {
    if !report.in_c {
        "non-CP"
    } else if report.in_l.holds() {
        "L"
    } else if report.in_cp.holds() {
        "CP\\L"
    } else if report.in_p {
        "P\\CP"
    } else if report.in_div.holds() {
        "div\\P"
    } else {
        "indivisible"
    }
}

#[derive(serde::Serialize)]
struct SliceRow {
    l1: f64,
    l2: f64,
    l3: f64,
    class: String,
    eb: u8,
}

fn cmd_slice(sum: f64, resolution: usize, format: Format, output: &Option<String>) -> ExitCode {
    if resolution < 2 {
        return fail(EXIT_PARSE, "resolution must be at least 2");
    }
    let mut rows = Vec::new();
    for i in 0..resolution {
        let l1 = -1.0 + 2.0 * i as f64 / (resolution - 1) as f64;
        for j in 0..resolution {
            let l2 = -1.0 + 2.0 * j as f64 / (resolution - 1) as f64;
            let l3 = sum - l1 - l2;
            if l3.abs() > 1.0 + 1e-12 {
                continue;
            }
            let e = divischan::chanrep::PauliTransferMatrix::from_lambdas(nalgebra::Vector3::new(l1, l2, l3));
            let report = classify(&e);
            rows.push(SliceRow {
                l1,
                l2,
                l3,
                class: pauli_class_label(&report).to_string(),
                eb: if report.in_c { report.chi } else { 0 },
            });
        }
    }
    let text = match format {
        Format::Csv => {
            let mut out = String::from("l1,l2,l3,class,eb\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.l1, r.l2, r.l3, r.class, r.eb
                ));
            }
            out
        }
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        ),
    };
    if write_output(output, &text).is_err() {
        return fail(EXIT_PARSE, "cannot write output");
    }
    ExitCode::SUCCESS
}

#[derive(serde::Deserialize)]
struct PathSample {
    t: f64,
    form: GaussianForm,
}

fn complex_series(v: &[num_complex::Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn cmd_gaussian(action: GaussAction, input: &Option<String>, output: &Option<String>) -> ExitCode {
    let bytes = match read_input(input) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_PARSE, &format!("cannot read input: {e}")),
    };
    let (text, code) = match action {
        GaussAction::Tuple | GaussAction::Cp | GaussAction::Class => {
            let form = match parse_gaussian_json(&bytes) {
                Ok(f) => f,
                Err(e) => return fail(EXIT_PARSE, &e.to_string()),
            };
            let report = match tuple_report(&form) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_PARSE, &e.to_string()),
            };
            let cp = report.cp;
            let text = match action {
                GaussAction::Tuple => serde_json::to_string_pretty(&report).unwrap(),
                GaussAction::Cp => format!("{{\"cp\":{}}}", report.cp),
                GaussAction::Class => format!(
                    "{{\"class\":{}}}",
                    serde_json::to_string(&report.class).unwrap()
                ),
                _ => unreachable!(),
            };
            let code = if cp || matches!(action, GaussAction::Class) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NON_CPTP)
            };
            (text, code)
        }
        GaussAction::Concat => {
            let pair: Vec<GaussianForm> = match serde_json::from_slice(&bytes) {
                Ok(p) => p,
                Err(e) => return fail(EXIT_PARSE, &e.to_string()),
            };
            if pair.len() != 2 {
                return fail(EXIT_PARSE, "concat expects a JSON array of two forms");
            }
            let (f1, f2) = match (enforce_tp_hp(&pair[0]), enforce_tp_hp(&pair[1])) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return fail(EXIT_PARSE, &e.to_string()),
            };
            match concat(&f1, &f2) {
                Ok(f) => (serde_json::to_string_pretty(&f).unwrap(), ExitCode::SUCCESS),
                Err(e) => return fail(EXIT_PARSE, &e.to_string()),
            }
        }
        GaussAction::Master => {
            let samples: Vec<PathSample> = match serde_json::from_slice(&bytes) {
                Ok(s) => s,
                Err(e) => return fail(EXIT_PARSE, &e.to_string()),
            };
            let mut path = Vec::with_capacity(samples.len());
            for s in samples {
                match enforce_tp_hp(&s.form) {
                    Ok(f) => path.push((s.t, f)),
                    Err(e) => return fail(EXIT_PARSE, &e.to_string()),
                }
            }
            match master_equation(&path) {
                Ok(co) => {
                    let obj = serde_json::json!({
                        "t": co.t,
                        "L_c": complex_series(&co.l_c),
                        "X_xx": complex_series(&co.x_xx),
                        "X_xr": complex_series(&co.x_xr),
                        "X_rr": complex_series(&co.x_rr),
                        "Y_xx": complex_series(&co.y_xx),
                        "Y_xr": complex_series(&co.y_xr),
                        "Y_rx": complex_series(&co.y_rx),
                        "Y_rr": complex_series(&co.y_rr),
                        "Z_xx": complex_series(&co.z_xx),
                        "Z_xr": complex_series(&co.z_xr),
                        "Z_rr": complex_series(&co.z_rr),
                    });
                    (
                        serde_json::to_string_pretty(&obj).unwrap(),
                        ExitCode::SUCCESS,
                    )
                }
                Err(e) => return fail(EXIT_NON_CPTP, &e.to_string()),
            }
        }
    };
    if write_output(output, &format!("{text}\n")).is_err() {
        return fail(EXIT_PARSE, "cannot write output");
    }
    code
}

//! Command line front end. Every subcommand echoes its numeric options back
//! inside the output envelope, and identical invocations produce identical
//! bytes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cohom1::catalog::ClosedForm;
use cohom1::dynamics::{
    alc_slope, detect_singularity, fit_infinity_model, fit_power_law_points, integrate, State,
    Termination, Trajectory, SING_FIT_WINDOW,
};
use cohom1::family::classify;
use cohom1::frame::{ricci_from_jet, JetPoint};
use cohom1::{Error as CoreError, ParamSet};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "cohom1",
    version,
    about = "Classification, verification and integration of diagonal cohomogeneity-one metrics",
    args_override_self = true
)]
struct Cli {
    /// Flat key=value file supplying the same options as the subcommand flags;
    /// explicit flags win over file entries
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "table",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Singular,
    Infinity,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact classification of the quadratic first-order families
    Classify {
        /// Falsification grid covers integer parameters in [-bound, bound]
        #[arg(long)]
        bound: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Residual and Ricci report for a catalog form over its domain
    Verify {
        /// taub-nut, eguchi-hanson, fubini-study, fubini-study-hyperbolic,
        /// case3 or flat-cone
        #[arg(long)]
        form: String,
        /// Scale parameter of the form; flat-cone takes none
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Ricci diagonal of one second-order jet
    #[command(allow_negative_numbers = true)]
    Ricci {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a1p: f64,
        #[arg(long)]
        a1pp: f64,
        #[arg(long)]
        a2: f64,
        #[arg(long)]
        a2p: f64,
        #[arg(long)]
        a2pp: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Integrate a family from initial data at t = 0
    #[command(allow_negative_numbers = true)]
    Integrate {
        /// k1,k2,k3,l1,l2,l3 as exact rationals ("p/q" or exact decimals)
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// a1,a2 at t = 0
        #[arg(long)]
        init: String,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Integrate, then fit the singular or the infinity model
    #[command(allow_negative_numbers = true)]
    Asymptote {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long)]
        init: String,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// |t - t0| window "lo,hi" for the singular power-law fits
        #[arg(long, value_name = "LO,HI")]
        fit_window: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        min_decades: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Arclength-jet samples of a catalog form
    Catalog {
        #[arg(long)]
        form: String,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::NotSingular
            | CoreError::InsufficientWindow { .. }
            | CoreError::TailTooShort { .. }
            | CoreError::StepUnderflow(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match expand_config(argv) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.cmd) {
        Ok((body, out, code)) => match out {
            Some(path) => match std::fs::write(&path, body) {
                Ok(()) => ExitCode::from(code),
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(2)
                }
            },
            None => {
                print!("{body}");
                ExitCode::from(code)
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Splice "--key value" pairs from a key=value file right after the
/// subcommand, so explicit flags (parsed later) override them.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path: Option<String> = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            path = argv.get(i + 1).cloned();
            i += 2;
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            i += 1;
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };

    let mut sub_idx = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            i += 2;
        } else if argv[i].starts_with('-') {
            i += 1;
        } else {
            sub_idx = Some(i);
            break;
        }
    }
    let Some(sub_idx) = sub_idx else {
        return Ok(argv);
    };

    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let mut spliced: Vec<String> = argv[..=sub_idx].to_vec();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("{path}:{}: expected key=value", lineno + 1));
        };
        let key = key.trim();
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            return Err(format!("{path}:{}: bad key {key:?}", lineno + 1));
        }
        if key == "config" {
            return Err(format!("{path}:{}: config files do not nest", lineno + 1));
        }
        spliced.push(format!("--{key}"));
        spliced.push(value.trim().to_string());
    }
    spliced.extend_from_slice(&argv[sub_idx + 1..]);
    Ok(spliced)
}

fn run(cmd: Cmd) -> Result<(String, Option<PathBuf>, u8), Failure> {
    match cmd {
        Cmd::Classify { bound, format, out } => {
            if format != Format::Json {
                return Err(Failure::validation("classify emits json only"));
            }
            let res = classify(bound)?;
            let envelope = envelope(
                json!({ "subcommand": "classify", "bound": bound, "format": format.as_str() }),
                res.to_json(),
            );
            Ok((envelope, out, 0))
        }
        Cmd::Verify { form, param, points, format, out } => {
            let form = ClosedForm::from_name(&form, param)?;
            if points == 0 {
                return Err(Failure::validation("--points must be at least 1"));
            }
            let body = verify_body(&form, points, format)?;
            Ok((body, out, 0))
        }
        Cmd::Ricci { a1, a1p, a1pp, a2, a2p, a2pp, format, out } => {
            let jet = JetPoint::new(a1, a1p, a1pp, a2, a2p, a2pp)?;
            let r = ricci_from_jet(&jet);
            let cfg = json!({
                "subcommand": "ricci",
                "a1": a1, "a1p": a1p, "a1pp": a1pp,
                "a2": a2, "a2p": a2p, "a2pp": a2pp,
                "format": format.as_str(),
            });
            let body = match format {
                Format::Json => envelope(
                    cfg,
                    json!({
                        "ric00": r.ric00,
                        "ric11": r.ric11,
                        "ric22": r.ric22,
                        "ric33": r.ric33(),
                        "scalar": r.scalar,
                    }),
                ),
                Format::Csv => format!(
                    "ric00,ric11,ric22,ric33,scalar\n{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    r.ric00,
                    r.ric11,
                    r.ric22,
                    r.ric33(),
                    r.scalar
                ),
                Format::Table => format!(
                    "ric00  {:.16e}\nric11  {:.16e}\nric22  {:.16e}\nric33  {:.16e}\nscalar {:.16e}\n",
                    r.ric00,
                    r.ric11,
                    r.ric22,
                    r.ric33(),
                    r.scalar
                ),
            };
            Ok((body, out, 0))
        }
        Cmd::Integrate { params, init, t_end, tol, format, out } => {
            let params = ParamSet::parse_list(&params)?;
            let (a1, a2) = parse_pair(&init, "--init")?;
            let traj = integrate(&params, State::new(0.0, a1, a2)?, t_end, tol)?;
            let code = if traj.termination() == Termination::ReachedEnd { 0 } else { 3 };
            let body = match format {
                Format::Json => envelope(
                    json!({
                        "subcommand": "integrate",
                        "params": params.as_strings(),
                        "init": [a1, a2],
                        "t_end": t_end,
                        "tol": tol,
                        "format": format.as_str(),
                    }),
                    traj.to_json(),
                ),
                Format::Csv => traj.to_csv(),
                Format::Table => {
                    return Err(Failure::validation("integrate emits json or csv"))
                }
            };
            Ok((body, out, code))
        }
        Cmd::Asymptote {
            mode,
            params,
            init,
            t_end,
            tol,
            fit_window,
            min_decades,
            format,
            out,
        } => {
            if format != Format::Json {
                return Err(Failure::validation("asymptote emits json only"));
            }
            let parsed = ParamSet::parse_list(&params)?;
            let (a1, a2) = parse_pair(&init, "--init")?;
            let window = match &fit_window {
                Some(s) => {
                    let (lo, hi) = parse_pair(s, "--fit-window")?;
                    if !(lo > 0.0 && hi > lo) {
                        return Err(Failure::validation("--fit-window needs 0 < lo < hi"));
                    }
                    (lo, hi)
                }
                None => SING_FIT_WINDOW,
            };
            let traj = integrate(&parsed, State::new(0.0, a1, a2)?, t_end, tol)?;
            let result = match mode {
                Mode::Singular => singular_report(&traj, window, min_decades)?,
                Mode::Infinity => infinity_report(&traj)?,
            };
            let cfg = json!({
                "subcommand": "asymptote",
                "mode": match mode { Mode::Singular => "singular", Mode::Infinity => "infinity" },
                "params": parsed.as_strings(),
                "init": [a1, a2],
                "t_end": t_end,
                "tol": tol,
                "fit_window": [window.0, window.1],
                "min_decades": min_decades,
                "format": format.as_str(),
            });
            Ok((envelope(cfg, result), out, 0))
        }
        Cmd::Catalog { form, param, points, format, out } => {
            let form = ClosedForm::from_name(&form, param)?;
            if points == 0 {
                return Err(Failure::validation("--points must be at least 1"));
            }
            let body = catalog_body(&form, points, format)?;
            Ok((body, out, 0))
        }
    }
}

fn envelope(config: Value, result: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "config": config, "result": result }))
        .expect("serializable");
    s.push('\n');
    s
}

fn parse_pair(s: &str, flag: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(Failure::validation(format!("{flag} expects two comma-separated numbers")));
    };
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|_| Failure::validation(format!("{flag}: cannot parse {a:?}")))?;
    let b: f64 = b
        .trim()
        .parse()
        .map_err(|_| Failure::validation(format!("{flag}: cannot parse {b:?}")))?;
    Ok((a, b))
}

fn verify_body(form: &ClosedForm, points: usize, format: Format) -> Result<String, Failure> {
    let params = form.matching_params();
    let lam = form.einstein_constant();
    let coords = form.sample_coords(points)?;
    let mut rows = Vec::with_capacity(coords.len());
    let mut max_ode = 0.0f64;
    let mut max_ricci = 0.0f64;
    for &s in &coords {
        let (r1, r2) = form.ode_residual(&params, s)?;
        let ric = ricci_from_jet(&form.arclength_jet(s)?);
        let dev = (ric.ric00 - lam)
            .abs()
            .max((ric.ric11 - lam).abs())
            .max((ric.ric22 - lam).abs());
        max_ode = max_ode.max(r1.abs()).max(r2.abs());
        max_ricci = max_ricci.max(dev);
        rows.push((s, r1, r2, ric.ric00, ric.ric11, ric.ric22, ric.scalar));
    }

    let cfg = json!({
        "subcommand": "verify",
        "form": form.name(),
        "param": form.param(),
        "points": points,
        "format": format.as_str(),
    });
    let body = match format {
        Format::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|&(s, r1, r2, c00, c11, c22, sc)| {
                    json!({
                        "coord": s,
                        "ode_r1": r1,
                        "ode_r2": r2,
                        "ric00": c00,
                        "ric11": c11,
                        "ric22": c22,
                        "scalar": sc,
                    })
                })
                .collect();
            envelope(
                cfg,
                json!({
                    "family": params.as_strings(),
                    "einstein_constant": lam,
                    "max_ode_residual": max_ode,
                    "max_ricci_deviation": max_ricci,
                    "rows": json_rows,
                }),
            )
        }
        Format::Csv => {
            let mut s = String::from("coord,ode_r1,ode_r2,ric00,ric11,ric22,scalar\n");
            for &(c, r1, r2, c00, c11, c22, sc) in &rows {
                s.push_str(&format!(
                    "{c:.16e},{r1:.16e},{r2:.16e},{c00:.16e},{c11:.16e},{c22:.16e},{sc:.16e}\n"
                ));
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{} (einstein constant {lam}), {} points\n\
                 max ode residual {max_ode:.3e}, max ricci deviation {max_ricci:.3e}\n\
                 {:>24} {:>24} {:>24} {:>24}\n",
                form.name(),
                rows.len(),
                "coord",
                "ode_r1",
                "ode_r2",
                "scalar"
            );
            for &(c, r1, r2, _, _, _, sc) in &rows {
                s.push_str(&format!("{c:>24.16e} {r1:>24.16e} {r2:>24.16e} {sc:>24.16e}\n"));
            }
            s
        }
    };
    Ok(body)
}

fn singular_report(
    traj: &Trajectory,
    window: (f64, f64),
    min_decades: f64,
) -> Result<Value, Failure> {
    let event = detect_singularity(traj)?;
    let fit_of = |pick: fn(&State) -> f64| -> Result<Value, Failure> {
        let points: Vec<(f64, f64)> = traj.samples().iter().map(|s| (s.t, pick(s))).collect();
        let fit = fit_power_law_points(&points, event.t0_estimate, window, min_decades)?;
        Ok(json!({
            "exponent": fit.exponent,
            "coefficient": fit.coefficient,
            "window": [fit.window.0, fit.window.1],
            "goodness": fit.goodness,
        }))
    };
    Ok(json!({
        "termination": traj.termination().as_str(),
        "event": event.to_json(),
        "a1_fit": fit_of(|s| s.a1)?,
        "a2_fit": fit_of(|s| s.a2)?,
    }))
}

fn infinity_report(traj: &Trajectory) -> Result<Value, Failure> {
    if traj.termination() != Termination::ReachedEnd {
        return Err(Failure::numerical(format!(
            "trajectory terminated {} before t_end; no tail to fit",
            traj.termination().as_str()
        )));
    }
    let fit = fit_infinity_model(traj)?;
    let (s1, s2, class) = alc_slope(traj)?;
    Ok(json!({
        "termination": traj.termination().as_str(),
        "alpha": fit.alpha,
        "beta": fit.beta,
        "a1_tail_mean": fit.a1_tail_mean,
        "slope_a1": s1,
        "slope_a2": s2,
        "tail_class": class.as_str(),
    }))
}

fn catalog_body(form: &ClosedForm, points: usize, format: Format) -> Result<String, Failure> {
    let family = form.matching_params();
    let coords = form.sample_coords(points)?;
    // rows (coord, t, A1, A2, ric00, ric11, ric22, r1, r2); t keeps each
    // form's own time origin
    let mut rows = Vec::with_capacity(coords.len());
    for &s in &coords {
        let t = form.arclength_coordinate(s)?;
        let jet = form.arclength_jet(s)?;
        let ric = ricci_from_jet(&jet);
        let (r1, r2) = form.ode_residual(&family, s)?;
        rows.push((s, t, jet.a1(), jet.a2(), ric.ric00, ric.ric11, ric.ric22, r1, r2));
    }
    let cfg = json!({
        "subcommand": "catalog",
        "form": form.name(),
        "param": form.param(),
        "points": points,
        "format": format.as_str(),
    });
    let body = match format {
        Format::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|(s, t, a1, a2, ric00, ric11, ric22, r1, r2)| {
                    json!({
                        "coord": s, "t": t, "a1": a1, "a2": a2,
                        "ric00": ric00, "ric11": ric11, "ric22": ric22,
                        "r1": r1, "r2": r2,
                    })
                })
                .collect();
            envelope(cfg, json!({ "family": family.as_strings(), "rows": json_rows }))
        }
        Format::Csv => {
            let mut s = String::from("coord,t,a1,a2,ric00,ric11,ric22,r1,r2\n");
            for (c, t, a1, a2, ric00, ric11, ric22, r1, r2) in &rows {
                s.push_str(&format!(
                    "{c:.16e},{t:.16e},{a1:.16e},{a2:.16e},{ric00:.16e},{ric11:.16e},{ric22:.16e},{r1:.16e},{r2:.16e}\n"
                ));
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{}{}, {} samples\n{:>24} {:>24} {:>24} {:>24}\n",
                form.name(),
                form.param().map(|p| format!(" (param {p})")).unwrap_or_default(),
                rows.len(),
                "coord",
                "t",
                "a1",
                "a2"
            );
            for (c, t, a1, a2, ..) in &rows {
                s.push_str(&format!("{c:>24.16e} {t:>24.16e} {a1:>24.16e} {a2:>24.16e}\n"));
            }
            s
        }
    };
    Ok(body)
}

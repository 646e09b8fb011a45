//! Command-line front end.
//!
//! Reports are flat `key=value` lines on standard output with numbers at
//! nine significant digits. Exit codes: 0 success, 1 invalid input or
//! domain error, 2 convergence failure, 3 certification or check failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::integrands::{Generator, IntegrandSpec};
use crate::io::{self, fmt_num};
use crate::presets::{Preset, DEFAULT_NODES};
use crate::scenario::ScenarioSpace;
use crate::solver::{GEval, Solver, WorstCaseReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_CERTIFY: i32 = 3;

const CONVEXITY_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "worstcase", version, about = "Worst-case expectations over divergence balls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file with header node_id,coordinate,weight,payoff,p0.
    #[arg(long)]
    scenario: PathBuf,
    /// kl, burg, squared or chi2.
    #[arg(long, value_parser = parse_generator)]
    divergence: Generator,
    /// Bregman-lift the divergence around the file's p0 column.
    #[arg(long)]
    bregman: bool,
}

#[derive(Subcommand, Debug)]
#[command(allow_negative_numbers = true)]
enum Command {
    /// V(k) and the localiser summary; k_max alone without --k.
    Vk {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Penalised value W(λ).
    Wlambda {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: f64,
    },
    /// Write the worst-case localiser at level k.
    Localiser {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Existence regime and critical threshold.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Check a density against the almost-worst-case bound.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Density file with header node_id,p.
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        gamma: f64,
    },
    /// Tabulate the dual curve G on an even θ2 grid.
    Gcurve {
        #[command(flatten)]
        common: Common,
        #[arg(long = "theta2-from", allow_negative_numbers = true)]
        theta2_from: f64,
        #[arg(long = "theta2-to", allow_negative_numbers = true)]
        theta2_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the rate function F on an even b grid.
    Fcurve {
        #[command(flatten)]
        common: Common,
        #[arg(long = "b-from", allow_negative_numbers = true)]
        b_from: f64,
        #[arg(long = "b-to", allow_negative_numbers = true)]
        b_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify convexity of a G-curve table.
    Check {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Write one of the built-in scenario spaces.
    Preset {
        /// kl2pt, burg2r or never-breg.
        #[arg(long)]
        name: String,
        /// Quadrature nodes for the continuous presets.
        #[arg(long, default_value_t = DEFAULT_NODES)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_generator(s: &str) -> Result<Generator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Lib(Error),
    Io(String),
    Certify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<Vec<String>, Failure>;

/// Runs the CLI with process stdout/stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let (lines, code) = match execute(cli.command) {
        Ok(lines) => (lines, EXIT_OK),
        Err(Failure::Certify(lines)) => (vec![lines], EXIT_CERTIFY),
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_INVALID;
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                Error::Convergence(_) => EXIT_CONVERGENCE,
                _ => EXIT_INVALID,
            };
        }
    };
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    code
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn load(common: &Common) -> Result<(ScenarioSpace, IntegrandSpec), Failure> {
    let space = io::parse_scenario(&read(&common.scenario)?)?;
    let spec = if common.bregman {
        IntegrandSpec::bregman_over(common.divergence, &space)?
    } else {
        IntegrandSpec::f_divergence(common.divergence)
    };
    Ok((space, spec))
}

fn kv(key: &str, v: f64) -> String {
    format!("{key}={}", fmt_num(v))
}

fn opt(key: &str, v: Option<f64>) -> String {
    match v {
        Some(v) => kv(key, v),
        None => format!("{key}=none"),
    }
}

fn report_lines(r: &WorstCaseReport) -> Vec<String> {
    vec![
        kv("k", r.k),
        kv("v", r.v),
        kv("theta2_star", r.theta2_star),
        kv("theta1_star", r.theta1_star),
        kv("localiser_mass", r.localiser_mass),
        format!("is_density={}", r.is_density),
        format!("is_wcd={}", r.is_wcd),
        format!("trivial_branch={}", r.trivial_branch),
        kv("k_max", r.k_max),
        kv("f_residual", r.f_residual),
    ]
}

fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::Validation("grid needs finite endpoints and steps >= 1".into()).into());
    }
    Ok((0..=steps)
        .map(|i| from + (to - from) * i as f64 / steps as f64)
        .collect())
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Vk { common, k } => {
            let (space, spec) = load(&common)?;
            let solver = Solver::new(&spec, &space)?;
            match k {
                None => Ok(vec![kv("k_max", solver.k_max_estimate()?)]),
                Some(k) => Ok(report_lines(&solver.value_at_k(k)?)),
            }
        }
        Command::Wlambda { common, lambda } => {
            let (space, spec) = load(&common)?;
            let w = Solver::new(&spec, &space)?.penalised_value(lambda)?;
            Ok(vec![kv("lambda", lambda), kv("W", w)])
        }
        Command::Localiser { common, k, out } => {
            let (space, spec) = load(&common)?;
            let r = Solver::new(&spec, &space)?.value_at_k(k)?;
            if r.localiser.is_empty() {
                return Err(Error::Domain(format!("no localiser at k={k} >= k_max={}", fmt_num(r.k_max))).into());
            }
            write(&out, &io::write_localiser(&space, &r.localiser))?;
            Ok(report_lines(&r))
        }
        Command::Classify { common, k } => {
            let (space, spec) = load(&common)?;
            let c = Solver::new(&spec, &space)?.classify(k)?;
            let mut lines = vec![
                format!("regime={}", c.regime),
                opt("k_critical", c.k_critical),
                opt("theta_tilde_min", c.theta_tilde_min),
                kv("theta_min", c.theta_min),
                opt("sigma", c.sigma),
                format!("probe_count={}", c.probe_grid.len()),
            ];
            if let Some(w) = c.wcd_at_k_probe {
                lines.push(format!("wcd_at_k={w}"));
            }
            if let Some(note) = c.note {
                lines.push(format!("note={note}"));
            }
            lines.extend(
                c.probe_grid
                    .iter()
                    .map(|(t, m)| format!("probe={},{}", fmt_num(*t), fmt_num(*m))),
            );
            Ok(lines)
        }
        Command::Certify {
            common,
            p,
            k,
            eps,
            gamma,
        } => {
            let (space, spec) = load(&common)?;
            let density = io::parse_density(&read(&p)?, &space)?;
            let c = Solver::new(&spec, &space)?.certify_awcd(&density, k, eps, gamma)?;
            let lines = vec![
                kv("epsilon", c.epsilon),
                kv("gamma", c.gamma),
                format!("is_awcd={}", c.is_awcd),
                kv("bregman_to_localiser", c.bregman_to_localiser),
                kv("bound", c.bound),
                format!("bound_holds={}", c.bound_holds),
            ];
            if c.bound_holds {
                Ok(lines)
            } else {
                Err(Failure::Certify(lines.join("\n")))
            }
        }
        Command::Gcurve {
            common,
            theta2_from,
            theta2_to,
            steps,
            out,
        } => {
            let (space, spec) = load(&common)?;
            let solver = Solver::new(&spec, &space)?;
            let rows = grid(theta2_from, theta2_to, steps)?
                .into_iter()
                .map(|t| solver.solve_inner(t))
                .collect::<crate::error::Result<Vec<_>>>()?;
            write(&out, &io::write_gcurve(&rows))?;
            Ok(vec![format!("points={}", rows.len())])
        }
        Command::Fcurve {
            common,
            b_from,
            b_to,
            steps,
            out,
        } => {
            let (space, spec) = load(&common)?;
            let solver = Solver::new(&spec, &space)?;
            let rows = grid(b_from, b_to, steps)?
                .into_iter()
                .map(|b| Ok((b, solver.f_of_b(b)?)))
                .collect::<crate::error::Result<Vec<_>>>()?;
            write(&out, &io::write_fcurve(&rows))?;
            Ok(vec![format!("points={}", rows.len())])
        }
        Command::Check { curve } => {
            let rows = io::parse_gcurve(&read(&curve)?)?;
            match convexity_violation(&rows) {
                None => Ok(vec![format!("points={}", rows.len()), "convex=true".into()]),
                Some(t) => Err(Failure::Certify(format!(
                    "points={}\nconvex=false\nviolation_at={}",
                    rows.len(),
                    fmt_num(t)
                ))),
            }
        }
        Command::Preset { name, n, out } => {
            let preset: Preset = name.parse()?;
            let space = preset.space(n)?;
            write(&out, &io::write_scenario(&space))?;
            let divergence = if preset == Preset::Kl2pt { "kl" } else { "burg" };
            Ok(vec![
                format!("preset={preset}"),
                format!("atoms={}", space.len()),
                format!("divergence={divergence}"),
                format!("bregman={}", preset == Preset::NeverBreg),
            ])
        }
    }
}

/// First θ2 where G rises above the chord of its neighbours, after sorting
/// by θ2. Rows with infinite G are outside the domain and skipped.
pub fn convexity_violation(rows: &[GEval]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.g_value.is_finite())
        .map(|r| (r.theta2, r.g_value))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(3).find_map(|w| {
        let ((a, ga), (b, gb), (c, gc)) = (w[0], w[1], w[2]);
        if !(a < b && b < c) {
            return None;
        }
        let chord = ga + (gc - ga) * (b - a) / (c - a);
        let scale = 1.0 + ga.abs().max(gb.abs()).max(gc.abs());
        (gb > chord + CONVEXITY_TOL * scale).then_some(b)
    })
}

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "barnes", version, about = "Barnes double zeta-function: evaluation, diagonal series and mean-square experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Shift alpha > 0 (rational, e.g. 5/3 or 0.5)
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Step v > 0 (rational)
    #[arg(long, global = true)]
    v: Option<String>,
    /// Step w > 0 (rational, multiplied by the irrational scale when given)
    #[arg(long, global = true)]
    w: Option<String>,
    /// Declare v/w irrational with w_eff = w * scale: sqrt2, sqrt3, sqrt5, golden, pi, e
    #[arg(long = "irrational-scale", global = true)]
    irrational_scale: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Write outputs and manifest.json here instead of stdout
    #[arg(long = "out-dir", global = true)]
    out_dir: Option<PathBuf>,
    /// key=value file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate zeta_2 at one or more points
    Eval {
        #[command(flatten)]
        common: Common,
        /// Comma-separated real parts
        #[arg(long, alias = "sigmas")]
        sigma: Option<String>,
        /// Comma-separated imaginary parts
        #[arg(long)]
        t: Option<String>,
        /// Linear range start:end:count for t
        #[arg(long = "t-range")]
        t_range: Option<String>,
        /// direct, em, t3, hurwitz, reference or all (comma-separated allowed)
        #[arg(long)]
        method: Option<String>,
        /// Truncation height for t3
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "C")]
        c: Option<String>,
        /// Square cut for em
        #[arg(long = "N")]
        n: Option<String>,
        /// Triangle order for direct
        #[arg(long = "direct-order")]
        direct_order: Option<String>,
        /// Number of Hurwitz values for hurwitz
        #[arg(long = "hurwitz-m")]
        hurwitz_m: Option<String>,
    },
    /// Diagonal series at one or more sigma
    Diagonal {
        #[command(flatten)]
        common: Common,
        #[arg(long, alias = "sigmas")]
        sigma: Option<String>,
    },
    /// Mean square curve, remainder fit and verdict for one sigma
    Meansquare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: Option<String>,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Mean square verdicts over a list of sigma
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, alias = "sigma")]
        sigmas: Option<String>,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Sum-versus-integral residuals along an x-doubling sweep
    LemmaCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, alias = "sigmas")]
        sigma: Option<String>,
        /// Fixed t; defaults to 2 pi x / C for each x
        #[arg(long)]
        t: Option<String>,
        /// Comma-separated lower ends x
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "N")]
        n: Option<String>,
        #[arg(long = "C")]
        c: Option<String>,
        /// Fixed m
        #[arg(long)]
        m: Option<String>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct CurveArgs {
    #[arg(long = "Tmax")]
    t_max: Option<String>,
    /// Number of geometric grid points
    #[arg(long = "T-grid")]
    t_grid: Option<String>,
    /// First grid point
    #[arg(long = "T-min")]
    t_min: Option<String>,
    /// auto or a fixed panel width
    #[arg(long = "h-policy")]
    h_policy: Option<String>,
    #[arg(long)]
    slack: Option<String>,
    /// with-correction or truncated
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("alpha", self.alpha.clone()),
            ("v", self.v.clone()),
            ("w", self.w.clone()),
            ("irrational-scale", self.irrational_scale.clone()),
            ("tol", self.tol.clone()),
            ("out-dir", self.out_dir.as_ref().map(|p| p.display().to_string())),
        ]
    }
}

impl CurveArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("Tmax", self.t_max.clone()),
            ("T-grid", self.t_grid.clone()),
            ("T-min", self.t_min.clone()),
            ("h-policy", self.h_policy.clone()),
            ("slack", self.slack.clone()),
            ("mode", self.mode.clone()),
        ]
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, mut flags) = match &cli.command {
        Command::Eval {
            common,
            sigma,
            t,
            t_range,
            method,
            x,
            c,
            n,
            direct_order,
            hurwitz_m,
        } => (
            commands::Name::Eval,
            common,
            vec![
                ("sigma", sigma.clone()),
                ("t", t.clone()),
                ("t-range", t_range.clone()),
                ("method", method.clone()),
                ("x", x.clone()),
                ("C", c.clone()),
                ("N", n.clone()),
                ("direct-order", direct_order.clone()),
                ("hurwitz-m", hurwitz_m.clone()),
            ],
        ),
        Command::Diagonal { common, sigma } => {
            (commands::Name::Diagonal, common, vec![("sigma", sigma.clone())])
        }
        Command::Meansquare { common, sigma, curve } => {
            let mut f = vec![("sigma", sigma.clone())];
            f.extend(curve.pairs());
            (commands::Name::Meansquare, common, f)
        }
        Command::Sweep { common, sigmas, curve } => {
            let mut f = vec![("sigmas", sigmas.clone())];
            f.extend(curve.pairs());
            (commands::Name::Sweep, common, f)
        }
        Command::LemmaCheck {
            common,
            sigma,
            t,
            x,
            n,
            c,
            m,
        } => (
            commands::Name::LemmaCheck,
            common,
            vec![
                ("sigma", sigma.clone()),
                ("t", t.clone()),
                ("x", x.clone()),
                ("N", n.clone()),
                ("C", c.clone()),
                ("m", m.clone()),
            ],
        ),
    };
    flags.extend(common.pairs());

    let settings = match config::Settings::resolve(common.config.as_deref(), flags) {
        Ok(s) => s,
        Err(e) => return usage_failure(&e),
    };
    match commands::run(name, &settings) {
        Ok(commands::Status::Clean) => ExitCode::SUCCESS,
        Ok(commands::Status::ErrorRows) => ExitCode::from(1),
        Err(e) => usage_failure(&e),
    }
}

fn usage_failure(e: &anyhow::Error) -> ExitCode {
    output::report_error("UsageError", &format!("{e:#}"), serde_json::json!({}));
    ExitCode::from(2)
}

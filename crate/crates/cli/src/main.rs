mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{ApproxCmd, Cli, ClusterCmd, Command, LightningCmd, PotentialCmd, QuadCmd};
use commands::{approx, cluster, figures, lightning, manifest::ExperimentManifest, potential, quad, Ctx};
use error::{CliError, CliResult};
use output::{Check, Output};

fn parse(argv: Vec<String>, from_manifest: bool) -> CliResult<Cli> {
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            CliError::Usage(e.to_string())
        }
        _ if from_manifest => CliError::Invalid(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })
}

fn dispatch(cli: Cli) -> CliResult<Vec<Check>> {
    let mut ctx = Ctx { out: Output::new(cli.out.clone(), cli.csv_only), nmax: cli.nmax, min_n: cli.min_n, seed: cli.seed };
    match cli.command {
        Command::Approx(ApproxCmd::Sweep { family, xi }) => approx::sweep(&mut ctx, family, xi),
        Command::Approx(ApproxCmd::Fig12) => approx::fig12(&mut ctx),
        Command::Cluster(ClusterCmd::Dump { kind, n, sigma }) => cluster::dump(&mut ctx, kind, n, sigma),
        Command::Potential(PotentialCmd::PhiCurves { kind, n }) => potential::phi_curves(&mut ctx, kind, n),
        Command::Potential(PotentialCmd::Strip { alpha, n, log_eps }) => potential::strip(&mut ctx, alpha, n, log_eps),
        Command::Quad(QuadCmd::Sweep { kind, integrand }) => quad::sweep(&mut ctx, kind, integrand),
        Command::Quad(QuadCmd::Nodes { kind, n }) => quad::nodes(&mut ctx, kind, n),
        Command::Quad(QuadCmd::Gtm { kind, n }) => quad::gtm(&mut ctx, kind, n),
        Command::Lightning(LightningCmd::Solve(args)) => lightning::solve(&mut ctx, &args),
        Command::Fig1 => figures::fig1(&ctx),
        Command::Fig4 => figures::fig4(&ctx),
        Command::Fig6 => figures::fig6(&ctx),
        Command::Fig10 => figures::fig10(&ctx),
        Command::Fig12 => figures::fig12(&ctx),
        Command::Fig13 => figures::fig13(&ctx),
        Command::Fig14 => figures::fig14(&ctx),
        Command::Run { manifest } => {
            let m = ExperimentManifest::load(&manifest)?;
            let argv = m.to_args(&manifest, cli.check, cli.csv_only)?;
            dispatch(parse(argv, true)?)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CR_THREADS") else { return Ok(()) };
    let n: usize =
        v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Invalid(format!("CR_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Invalid(e.to_string()))
}

fn run() -> CliResult<()> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit();
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    configure_threads()?;
    let check = cli.check;
    let checks = dispatch(cli)?;
    if check {
        let failed = checks.iter().filter(|c| !c.pass).count();
        for c in &checks {
            println!(
                "{}: {}{}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) }
            );
        }
        if failed > 0 {
            return Err(CliError::CheckFailed(failed));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprint!("{msg}"),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

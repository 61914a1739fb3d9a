//! Command-line driver for the radiation-hydrodynamics benchmarks.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radhydro_core::driver::{
    composite_l1_error, convergence_study, dump_fields, sample_reference, time_loop, ConvergenceStudy,
};
use radhydro_core::riemann_euler::lambda_max_euler;
use radhydro_core::riemann_rad::{solve_p_star, RadRiemannInput, RadSide};
use radhydro_core::scenarios::build_scenario;
use radhydro_core::{
    Error, FullState, OpacityLaw, OracleParams, ReferenceProfile, ReferenceSource, Result, RunOverrides,
    StepDiagnostics,
};

use crate::config::{FileConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "radhydro", version, about = "1D gray radiation-hydrodynamics benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario on one mesh.
    Run(RunArgs),
    /// Run a scenario on several meshes and tabulate errors and rates.
    Converge(RunArgs),
    /// Query both wave-speed bounds for a pair of states.
    Riemann(RiemannArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario: marshak, mach1.2, mach3, mach3-var, mach10, mach30, mach50, icf1d.
    #[arg(long)]
    scenario: Option<String>,
    /// Mesh point counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Relative tolerance of the Picard loop.
    #[arg(long)]
    eps: Option<f64>,
    /// Reference profile CSV (`x,rho,v,T,Er`).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Use the finest mesh as reference for the others.
    #[arg(long)]
    self_reference: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the fields every N steps.
    #[arg(long)]
    dump_every: Option<usize>,
    /// Check admissibility of every intermediate field.
    #[arg(long)]
    check_idp: bool,
    /// TOML file with the same keys as the flags (underscores for dashes).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn settings(self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            scenario: self.scenario,
            points: self.points,
            cfl: self.cfl,
            tfinal: self.tfinal,
            eps: self.eps,
            reference: self.reference,
            self_reference: self.self_reference.then_some(true),
            out: self.out,
            dump_every: self.dump_every,
            check_idp: self.check_idp.then_some(true),
        };
        Settings::try_from(file.merge(flags))
    }
}

#[derive(Debug, Args)]
struct RiemannArgs {
    /// Left state `rho,v,p,Er`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    left: Vec<f64>,
    /// Right state `rho,v,p,Er`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    right: Vec<f64>,
    #[arg(long, default_value_t = 5.0 / 3.0)]
    gamma: f64,
    /// Covolume.
    #[arg(long, default_value_t = 0.0)]
    b: f64,
}

fn overrides(s: &Settings) -> RunOverrides {
    RunOverrides {
        cfl: s.cfl,
        t_final: s.tfinal,
        eps: s.eps,
        check_idp: s.check_idp,
    }
}

fn load_profile(s: &Settings) -> Result<Option<ReferenceProfile>> {
    s.reference
        .as_deref()
        .map(|path| {
            ReferenceProfile::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read reference {}: {io}", path.display())),
                other => other,
            })
        })
        .transpose()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_run(s: Settings) -> Result<()> {
    let [points] = s.points[..] else {
        return Err(Error::Config("`run` takes exactly one mesh size".into()));
    };
    let profile = load_profile(&s)?;
    let scenario = build_scenario(s.scenario, points, profile.as_ref())?;
    let cfg = overrides(&s).apply(&scenario);
    cfg.validate()?;
    std::fs::create_dir_all(&s.out)?;
    let mut diag = create(&s.out.join("diag.csv"))?;
    writeln!(diag, "{}", StepDiagnostics::CSV_HEADER)?;
    let out = time_loop(&scenario, &cfg, |d, u| {
        writeln!(diag, "{}", d.csv_row())?;
        if let Some(every) = s.dump_every {
            if d.step % every == 0 {
                dump_fields(u, &scenario.mesh, &scenario.params, &s.out.join(format!("fields_{:07}.csv", d.step)))?;
            }
        }
        Ok(())
    })?;
    diag.flush()?;
    dump_fields(&out.u, &scenario.mesh, &scenario.params, &s.out.join("final.csv"))?;
    print!(
        "scenario={} points={} steps={} t={:e} max_drift_mass={:e} max_drift_momentum={:e} max_drift_energy={:e}",
        scenario.id, points, out.steps, out.t, out.max_drift.mass, out.max_drift.momentum, out.max_drift.energy
    );
    if let Some(profile) = &profile {
        let exact = sample_reference(profile, &scenario.mesh, &scenario.params);
        print!(" error={:e}", composite_l1_error(&out.u, &exact, &scenario.mesh)?);
    }
    println!();
    Ok(())
}

fn write_table(study: &ConvergenceStudy, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "points,h,error,rate")?;
    for r in &study.rows {
        let rate = r.rate.map_or(String::new(), |v| format!("{v:.4}"));
        writeln!(f, "{},{:e},{:e},{}", r.points, r.h, r.error, rate)?;
    }
    f.flush()?;
    Ok(())
}

fn cmd_converge(s: Settings) -> Result<()> {
    let profile = load_profile(&s)?;
    let source = match (&profile, s.self_reference) {
        (Some(_), true) => return Err(Error::Config("--reference and --self-reference are exclusive".into())),
        (Some(p), false) => ReferenceSource::Profile(p),
        (None, true) => ReferenceSource::SelfReference,
        (None, false) => return Err(Error::Config("converge needs --reference or --self-reference".into())),
    };
    std::fs::create_dir_all(&s.out)?;
    let study = convergence_study(s.scenario, &s.points, source, &overrides(&s), |scenario, out| {
        eprintln!("finished {} points={} steps={}", scenario.id, scenario.mesh.len(), out.steps);
        Ok(())
    })?;
    if s.self_reference {
        study.reference.write(&s.out.join("reference.csv"))?;
    }
    write_table(&study, &s.out.join("convergence.csv"))?;
    println!("{:>7}  {:>12}  {:>6}", "I", "L1-error", "rate");
    for r in &study.rows {
        let rate = r.rate.map_or("--".to_string(), |v| format!("{v:.2}"));
        println!("{:>7}  {:>12.4e}  {:>6}", r.points, r.error, rate);
    }
    Ok(())
}

fn cmd_riemann(a: RiemannArgs) -> Result<()> {
    if a.left.len() != 4 || a.right.len() != 4 {
        return Err(Error::Config("states take four values: rho,v,p,Er".into()));
    }
    let params = OracleParams {
        gamma: a.gamma,
        cv_tilde: 1.0,
        b: a.b,
        a_r: 1.0,
        c_light: 1.0,
        sigma_a: OpacityLaw::Constant { sigma: 0.0 },
        sigma_t: OpacityLaw::Constant { sigma: 1.0 },
    };
    params.validate()?;
    let state = |q: &[f64]| {
        let (rho, v, p, e_rad) = (q[0], q[1], q[2], q[3]);
        let eps = p * (1.0 - a.b * rho) / (a.gamma - 1.0);
        FullState::new(rho, rho * v, eps + 0.5 * rho * v * v, e_rad)
    };
    let (ul, ur) = (state(&a.left), state(&a.right));
    let euler = lambda_max_euler(&ul, &ur, &params)?;
    println!(
        "euler lambda_max={:e} p_star={:e} waves={:?},{:?}",
        euler.lambda_max, euler.p_star, euler.wave_types.0, euler.wave_types.1
    );
    let side = |u: &FullState| RadSide {
        rho: u.rho,
        v: u.velocity(),
        p: u.e_rad / 3.0,
    };
    let rad = solve_p_star(&RadRiemannInput {
        left: side(&ul),
        right: side(&ur),
    });
    println!("radiation mu_max={:e} p_star={:e} case={:?}", rad.mu_max, rad.p_star, rad.case);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args.settings().and_then(cmd_run),
        Command::Converge(args) => args.settings().and_then(cmd_converge),
        Command::Riemann(args) => cmd_riemann(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            eprintln!("error kind={} msg=\"{msg}\"", e.kind());
            ExitCode::FAILURE
        }
    }
}

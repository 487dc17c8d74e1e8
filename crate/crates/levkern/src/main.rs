//! Command-line front end: evaluates symbols, kernels, sweeps, and
//! bound states from a strict JSON config and emits CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 config error, 4 unsupported profile,
//! 3 any other numeric failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use levkern::config::RunConfig;
use levkern::error::{Error, Result};
use levkern::kernels::{self, flag, KernelGrid};
use levkern::schrodinger;
use levkern::{decay, expmom, profile_analysis};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "levkern", about = "Jump-kernel and bound-state computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for internal parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Freq,
    Time,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristic exponent on a list of radial frequencies.
    Psi(Common),
    /// Exponential-moment function on a list of radial arguments.
    Omega(Common),
    /// Decay-rate curve gamma_alpha over an alpha grid.
    GammaSweep(Common),
    /// Heat kernel grid at a fixed time.
    Heat(Common),
    /// Resolvent kernel grid at a fixed alpha.
    Resolvent {
        #[command(flatten)]
        common: Common,
        /// Inversion route; `both` cross-checks the two.
        #[arg(long, value_enum, default_value = "freq")]
        method: Method,
    },
    /// Convolution-domination functional K_f at a fixed radius.
    Kf(Common),
    /// Fitted vs predicted resolvent decay rates across alphas.
    Transition(Common),
    /// Ground state of -L + V by the resolvent fixed point.
    Boundstate(Common),
    /// Decay class of the jump profile.
    Classify(Common),
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidModel(_) | Error::Domain(_) => 2,
        Error::UnsupportedProfile(_) => 4,
        _ => 3,
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    if let Some(n) = common.threads {
        // ignore failure when a pool already exists (single process anyway)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", common.config.display())))?;
    RunConfig::from_json(&text)
}

fn missing(block: &str) -> Error {
    Error::Config(format!("config lacks the \"{block}\" block"))
}

/// Writes the artifact; flagged results go to `<out>.partial` so a
/// pipeline never mistakes them for clean output.
fn emit(common: &Common, content: &str, flagged: bool) -> Result<()> {
    match &common.out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let path = if flagged {
                let mut s = path.clone().into_os_string();
                s.push(".partial");
                PathBuf::from(s)
            } else {
                path.clone()
            };
            std::fs::write(&path, content)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn grid_flagged(grid: &KernelGrid) -> bool {
    grid.flags.iter().any(|&f| f != flag::NONE)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Psi(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg.psi.as_ref().ok_or_else(|| missing("psi"))?;
            let mut out = String::from("xi,psi,error\n");
            for &xi in &block.xi {
                let p = model.psi_radial(xi)?;
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    xi, p.value, p.abs_error_estimate
                ));
            }
            emit(&common, &out, false)
        }
        Cmd::Omega(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg.omega.as_ref().ok_or_else(|| missing("omega"))?;
            let mut out = String::from("xi,omega,error\n");
            for &xi in &block.xi {
                let w = expmom::omega_radial(&model, xi)?;
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    xi, w.value, w.abs_error_estimate
                ));
            }
            emit(&common, &out, false)
        }
        Cmd::GammaSweep(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg
                .gamma_sweep
                .as_ref()
                .ok_or_else(|| missing("gamma_sweep"))?;
            let theta = e1(model.dim());
            let star = expmom::omega_star(&model)?;
            let mut out = String::from("alpha,gamma,omega_star\n");
            for &a in &block.alphas {
                let g = expmom::gamma_alpha(&model, a, &theta)?;
                out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", a, g, star.value));
            }
            emit(&common, &out, false)
        }
        Cmd::Heat(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg.heat.as_ref().ok_or_else(|| missing("heat"))?;
            let grid = kernels::heat_kernel(&model, block.t, &block.points)?;
            emit(&common, &grid.to_csv(), grid_flagged(&grid))
        }
        Cmd::Resolvent { common, method } => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg.resolvent.as_ref().ok_or_else(|| missing("resolvent"))?;
            match method {
                Method::Freq => {
                    let grid = kernels::resolvent_freq(&model, block.alpha, &block.points)?;
                    emit(&common, &grid.to_csv(), grid_flagged(&grid))
                }
                Method::Time => {
                    let grid = kernels::resolvent_time(&model, block.alpha, &block.points)?;
                    emit(&common, &grid.to_csv(), grid_flagged(&grid))
                }
                Method::Both => {
                    let gf = kernels::resolvent_freq(&model, block.alpha, &block.points)?;
                    let gt = kernels::resolvent_time(&model, block.alpha, &block.points)?;
                    let mut out = String::from("x,g_freq,g_time,rel_diff\n");
                    for i in 0..gf.points.len() {
                        let (a, b) = (gf.values[i], gt.values[i]);
                        let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
                        out.push_str(&format!(
                            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                            gf.points[i], a, b, rel
                        ));
                    }
                    emit(&common, &out, grid_flagged(&gf) || grid_flagged(&gt))
                }
            }
        }
        Cmd::Kf(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg.kf.as_ref().ok_or_else(|| missing("kf"))?;
            let rep = profile_analysis::kf(&model, block.r, &block.probes)?;
            let json = serde_json::to_string_pretty(&rep)
                .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
            emit(&common, &(json + "\n"), false)
        }
        Cmd::Transition(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg
                .transition
                .as_ref()
                .ok_or_else(|| missing("transition"))?;
            let curve = decay::transition_sweep(&model, &block.alphas, &block.points)?;
            emit(&common, &curve.to_csv(), false)
        }
        Cmd::Boundstate(common) => {
            let cfg = load(&common)?;
            let model = cfg.build_model()?;
            let block = cfg
                .boundstate
                .as_ref()
                .ok_or_else(|| missing("boundstate"))?;
            let grid = schrodinger::uniform_grid(block.half_width, block.n);
            let outcome = schrodinger::find_bound_state(&model, &block.potential, &grid)?;
            let json = serde_json::to_string_pretty(&outcome)
                .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
            emit(&common, &(json + "\n"), false)
        }
        Cmd::Classify(common) => {
            let cfg = load(&common)?;
            let block = cfg.classify.as_ref().ok_or_else(|| missing("classify"))?;
            let cls = profile_analysis::classify_profile(
                &cfg.model.profile,
                cfg.model.dim,
                &block.probe_radii,
            )?;
            let (class, kappa) = match cls.class {
                profile_analysis::ProfileClass::Subexponential => ("subexponential", None),
                profile_analysis::ProfileClass::Exponential { kappa } => {
                    ("exponential", Some(kappa))
                }
                profile_analysis::ProfileClass::SuperExponentialRejected => {
                    ("super_exponential_rejected", None)
                }
            };
            let json = serde_json::json!({
                "class": class,
                "kappa": kappa,
                "h_tail_slope_probe": cls.h_tail_slope_probe,
            });
            let text = serde_json::to_string_pretty(&json)
                .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
            emit(&common, &(text + "\n"), false)
        }
    }
}

fn e1(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    v
}

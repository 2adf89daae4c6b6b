use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::json;

use netswitch::design::{spnopt, AlternatingOptions, Method, SpnoptOptions};
use netswitch::floquet::{commutative_average, simulate, SwitchSchedule, Topology, DEFAULT_SAMPLES_PER_SEGMENT};
use netswitch::generator::random_sparse_hurwitz;
use netswitch::io::{csv_table, fmt_full, load_network, load_vector, save_network, NetworkFormat};
use netswitch::linalg::{centralizer_basis, fmt_complex, spectral_abscissa, spectrum};
use netswitch::optswitch::opt_switch;
use netswitch::scenario::{planar, run_formation, ScenarioFormation};
use netswitch::sparsity::{nullspace_vector, row_submatrix, scnet_with, ScnetOptions, SparsityPattern};
use netswitch::{design::default_order, Error, Network, Result};

#[derive(Parser)]
#[command(name = "netswitch", version, about = "Resilience of networks under periodic switching between commuting topologies")]
struct Cli {
    /// Force the input format instead of inferring it from the extension.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Mtx,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mccormick,
    Am,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral abscissa and spectrum of a network.
    Abscissa { net: PathBuf },
    /// Optimal switching ratio for a commuting pair.
    Optswitch {
        net_a: PathBuf,
        net_b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Maximal compatible sparsity pattern.
    Scnet {
        net: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Synthesize a sparse complementary network.
    Design {
        net: PathBuf,
        #[arg(long, value_enum, default_value = "mccormick")]
        method: MethodArg,
        #[arg(long, default_value_t = 1.0)]
        gamma_low: f64,
        #[arg(long, default_value_t = 100.0)]
        gamma_high: f64,
        #[arg(long)]
        bound_a: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial switching ratio for the first alternating restart.
        #[arg(long)]
        init: Option<f64>,
        /// Write the designed network here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Abscissa of the averaged generator over a uniform grid of ratios.
    Sweep {
        net_a: PathBuf,
        net_b: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate the switched system.
    Simulate {
        net_a: PathBuf,
        net_b: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long, default_value_t = 1)]
        segments: usize,
        /// Initial state file; all ones when omitted.
        #[arg(long)]
        x0: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        periods: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_SEGMENT)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random sparse Hurwitz network.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        nnz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Built-in demonstration scenarios.
    Scenario {
        #[command(subcommand)]
        which: ScenarioCmd,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Five agents contracting through a narrow passage.
    Formation {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        x0: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = std::env::var("NETSWITCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let format = cli.format.map(|f| match f {
        FormatArg::Json => NetworkFormat::Json,
        FormatArg::Mtx => NetworkFormat::MatrixMarket,
    });
    let load = |p: &Path| load_network(p, format);
    match cli.command {
        Command::Abscissa { net } => {
            let a = load(&net)?;
            let spec = spectrum(a.weights())?;
            println!("alpha = {}", fmt_full(spec.abscissa()));
            for z in &spec.eigenvalues {
                println!("  {}", fmt_complex(*z));
            }
        }
        Command::Optswitch { net_a, net_b, json } => {
            let (a, b) = (load(&net_a)?, load(&net_b)?);
            let cert = opt_switch(&a, &b)?;
            if json {
                println!("{}", to_json(&cert)?);
            } else {
                println!("improvable  = {}", cert.improvable);
                println!("k_star      = {}", fmt_full(cert.k_star));
                println!("alpha_star  = {}", fmt_full(cert.alpha_star));
                println!("alpha_A     = {}", fmt_full(cert.alpha_a));
                println!("alpha_B     = {}", fmt_full(cert.alpha_b));
                println!("lower_bound = {}", fmt_full(cert.lower_bound));
                println!("upper_bound = {}", fmt_full(cert.upper_bound));
                println!("unique      = {}", cert.uniqueness);
            }
        }
        Command::Scnet { net, order, seed } => {
            let a = load(&net)?;
            let p = order.unwrap_or_else(|| default_order(a.n()));
            let basis = centralizer_basis(&a, p)?;
            let pattern = scnet_with(
                &basis,
                &ScnetOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            let sub = row_submatrix(&basis, &pattern)?;
            let c = nullspace_vector(&sub)?;
            let out = json!({
                "n": a.n(),
                "order": p,
                "seed": seed,
                "size": pattern.len(),
                "pattern": one_based(&pattern),
                "rank": sub.rank,
                "coefficients": c.as_slice(),
            });
            println!("{}", to_json(&out)?);
        }
        Command::Design {
            net,
            method,
            gamma_low,
            gamma_high,
            bound_a,
            order,
            restarts,
            seed,
            init,
            out,
            json,
        } => {
            let a = load(&net)?;
            let opts = SpnoptOptions {
                method: match method {
                    MethodArg::Mccormick => Method::McCormick,
                    MethodArg::Am => Method::Alternating,
                },
                gamma_low,
                gamma_high,
                bound_a,
                order,
                scnet: ScnetOptions::default(),
                alternating: AlternatingOptions {
                    restarts,
                    seed,
                    init_k: init,
                    ..Default::default()
                },
            };
            let res = spnopt(&a, &opts)?;
            for d in &res.result.diagnostics {
                log::warn!("{d}");
            }
            if let Some(path) = &out {
                save_network(&res.result.b, path, None)?;
            }
            if json {
                let out = json!({
                    "seed": seed,
                    "order": order.unwrap_or_else(|| default_order(a.n())),
                    "pattern": one_based(&res.pattern),
                    "result": res.result,
                    "B": res.result.b.rows(),
                });
                println!("{}", to_json(&out)?);
            } else {
                let r = &res.result;
                println!("seed        = {seed}");
                println!("pattern     = {}", res.pattern);
                println!("k_star      = {}", fmt_full(r.k_star));
                println!("alpha_star  = {}", fmt_full(r.alpha_star));
                println!("alpha_A     = {}", fmt_full(r.alpha_a));
                println!("alpha_B     = {}", fmt_full(r.alpha_b));
                println!("objective   = {}", fmt_full(r.objective));
                println!("nonzeros    = {}", r.nonzeros);
                println!("improvable  = {}", r.certificate.improvable);
                if out.is_none() {
                    println!("B =");
                    for row in r.b.rows() {
                        let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.6}")).collect();
                        println!("  {}", cells.join(" "));
                    }
                }
            }
        }
        Command::Sweep { net_a, net_b, steps, out } => {
            let (a, b) = (load(&net_a)?, load(&net_b)?);
            let text = sweep_csv(&a, &b, steps)?;
            emit(&text, out.as_deref())?;
        }
        Command::Simulate {
            net_a,
            net_b,
            k,
            period,
            segments,
            x0,
            periods,
            samples,
            out,
        } => {
            let (a, b) = (load(&net_a)?, load(&net_b)?);
            let x0 = match x0 {
                Some(p) => load_vector(&p)?,
                None => DVector::from_element(a.n(), 1.0),
            };
            let sched = SwitchSchedule::from_ratio(k, period, segments)?;
            let traj = simulate(&a, &b, &sched, &x0, periods, samples)?;
            let mut header = vec!["t".to_string(), "active".to_string()];
            header.extend((0..a.n()).map(|i| format!("x{}", i + 1)));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = traj.times.iter().zip(&traj.states).zip(&traj.active).map(|((t, x), act)| {
                let mut row = vec![fmt_full(*t), topology_label(*act).to_string()];
                row.extend(x.iter().map(|v| fmt_full(*v)));
                row
            });
            emit(&csv_table(&header, rows), out.as_deref())?;
        }
        Command::Generate { n, nnz, seed, out } => {
            let net = random_sparse_hurwitz(n, nnz, seed)?;
            save_network(&net, &out, format)?;
            println!("seed = {seed}, alpha = {}", fmt_full(spectral_abscissa(net.weights())?));
        }
        Command::Scenario {
            which: ScenarioCmd::Formation { out, x0 },
        } => {
            let x0 = x0.as_deref().map(load_vector).transpose()?;
            formation(&out, x0)?;
        }
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(format!("serializing output: {e}")))
}

fn one_based(p: &SparsityPattern) -> Vec<(usize, usize)> {
    p.entries().map(|(i, j)| (i + 1, j + 1)).collect()
}

fn topology_label(t: Option<Topology>) -> &'static str {
    match t {
        Some(Topology::A) => "A",
        Some(Topology::B) => "B",
        None => "",
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sweep_csv(a: &Network, b: &Network, steps: usize) -> Result<String> {
    if steps == 0 {
        return Err(Error::InvalidInput("sweep needs at least one step".into()));
    }
    let alphas: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|s| {
            let k = s as f64 / steps as f64;
            spectral_abscissa(&commutative_average(a, b, k)?)
        })
        .collect::<Result<_>>()?;
    let best = alphas
        .iter()
        .enumerate()
        .fold(0, |m, (i, &v)| if v < alphas[m] { i } else { m });
    let rows = alphas.iter().enumerate().map(|(s, &al)| {
        let k = s as f64 / steps as f64;
        vec![fmt_full(k), fmt_full(al), u8::from(s == best).to_string()]
    });
    Ok(csv_table(&["k", "alpha", "min"], rows))
}

fn formation(dir: &Path, x0: Option<DVector<f64>>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let s = ScenarioFormation::default();
    let run = run_formation(&s, x0)?;
    save_network(&run.a, &dir.join("A.json"), None)?;
    save_network(&run.b, &dir.join("B.json"), None)?;
    let schedule = json!({
        "period": run.schedule.period(),
        "segments": run.schedule.segments(),
        "k_star": run.k_star,
        "alpha_star": run.alpha_star,
        "scenario": s,
    });
    fs::write(dir.join("schedule.json"), to_json(&schedule)?)?;

    let mut header = vec!["t".to_string(), "active".to_string()];
    for i in 1..=s.agents {
        header.push(format!("x{i}"));
        header.push(format!("y{i}"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let table = |data: &[DVector<f64>], with_active: bool| {
        let rows = run.times.iter().zip(data).zip(&run.active).map(|((t, z), act)| {
            let label = if with_active { topology_label(*act) } else { "" };
            let mut row = vec![fmt_full(*t), label.to_string()];
            row.extend(z.iter().map(|v| fmt_full(*v)));
            row
        });
        csv_table(&header, rows)
    };
    fs::write(dir.join("trajectory.csv"), table(&run.positions, true))?;
    fs::write(dir.join("reference.csv"), table(&run.reference, false))?;
    let alpha_planar = spectral_abscissa(planar(&run.b)?.weights())?;
    println!("k_star     = {}", fmt_full(run.k_star));
    println!("alpha_star = {}", fmt_full(run.alpha_star));
    println!("alpha_B    = {}", fmt_full(alpha_planar));
    println!("wrote {}", dir.display());
    Ok(())
}

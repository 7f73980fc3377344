use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netrobust::config::{AgentKind, ExperimentConfig};
use netrobust::curve::{self, run_validation_curve};
use netrobust::dot::export_dot_highlighted;
use netrobust::experiment::{evaluate_baseline, evaluate_dqn, evaluate_sl, CellEnv};
use netrobust::stats;
use netrobust::sweep::{self, run_size_sweep, SweepModels};
use netrobust::table::{run_table, write_rows};
use netrobust::workers::init_pool;
use netrobust::{HarnessError, Result};
use netrobust_core::baselines::BaselineKind;
use netrobust_core::datagen::{Family, GeneratorSpec};
use netrobust_core::rng::derive_seed;
use netrobust_core::robustness::{default_n_sims, estimate_robustness_seeded, Objective};
use netrobust_core::Graph;
use netrobust_learn::agents::{DatasetSplit, DqnTrainer, TrainSchedule};
use netrobust_learn::neural::{checkpoint, NetConfig, NetworkParams, Parameters, RegressorParams};
use serde::Serialize;

/// Robustness estimation, edge-addition baselines and learned agents.
#[derive(Parser)]
#[command(name = "netrobust", version)]
struct Cli {
    /// Worker threads; defaults to NETROBUST_WORKERS, then one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated graphs as edge lists plus manifest.csv.
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print `mean,std_error,n_sims` for one graph.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "random")]
        objective: Objective,
        /// Defaults to twice the node count.
        #[arg(long)]
        n_sims: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a baseline; prints `graph,reward` rows then mean and std rows.
    Baseline {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        objective: Objective,
        #[arg(long)]
        budget: usize,
        #[command(flatten)]
        graphs: GraphArgs,
        #[arg(long)]
        n_sims: Option<usize>,
        /// Simulations per Greedy candidate; defaults to n_sims.
        #[arg(long)]
        greedy_sims: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a DQN (or SL regressor) and write its checkpoint and log.
    Train(TrainArgs),
    /// Evaluate a checkpoint; prints `graph,reward` rows then mean and std rows.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        objective: Objective,
        #[arg(long)]
        budget: usize,
        #[command(flatten)]
        graphs: GraphArgs,
        #[arg(long)]
        n_sims: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary and raw result tables for an experiment config.
    Table {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate trained models on larger graphs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        sl_checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validation reward over training, per seed and aggregated.
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a graph as DOT; edges absent from --base are highlighted.
    Dot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
}

/// Test graphs: edge-list files, or a generated batch.
#[derive(Args)]
struct GraphArgs {
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, conflicts_with = "input")]
    family: Option<Family>,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Seed of the generated graphs and of the evaluation streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GraphArgs {
    fn load(&self) -> Result<Vec<(String, Graph)>> {
        if let Some(family) = self.family {
            let split = DatasetSplit::generate(
                &GeneratorSpec::new(family, self.n, self.seed),
                0,
                0,
                self.count,
            )?;
            return Ok(split
                .test
                .into_iter()
                .enumerate()
                .map(|(i, g)| (i.to_string(), g))
                .collect());
        }
        if self.input.is_empty() {
            return Err(HarnessError::Config(
                "give --input files or --family".into(),
            ));
        }
        self.input
            .iter()
            .map(|p| Ok((stem(p), Graph::read_edge_list(p)?)))
            .collect()
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value = "dqn")]
    agent: AgentKind,
    #[arg(long)]
    objective: Objective,
    #[arg(long)]
    budget: usize,
    /// A single real-world graph used for training, validation and testing.
    #[arg(long, conflicts_with = "family")]
    input: Option<PathBuf>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    train: usize,
    #[arg(long, default_value_t = 50)]
    validate: usize,
    #[arg(long)]
    n_sims: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5_000)]
    steps: usize,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    target_sync_every: Option<usize>,
    #[arg(long)]
    validation_every: Option<usize>,
    #[arg(long)]
    embed_dim: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Training log CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(
        || p.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn progress(msg: &str) {
    eprintln!("{msg}");
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// `graph,reward` rows followed by `mean,<m>` and `std,<s>`.
fn write_rewards(out: Option<&Path>, names: &[String], rewards: &[f64]) -> Result<()> {
    let mut text = String::from("graph,reward\n");
    for (name, r) in names.iter().zip(rewards) {
        text.push_str(&format!("{name},{r}\n"));
    }
    text.push_str(&format!(
        "mean,{}\nstd,{}\n",
        stats::mean(rewards),
        stats::sample_std(rewards)
    ));
    match out {
        Some(p) => std::fs::write(p, text).map_err(io_err(p))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ManifestRow {
    filename: String,
    n: usize,
    m: usize,
    seed: u64,
}

#[derive(Serialize)]
struct DqnLogRow {
    step: usize,
    loss: Option<f64>,
    epsilon: f64,
    validation_reward: f64,
}

#[derive(Serialize)]
struct SlLogRow {
    step: usize,
    train_loss: Option<f64>,
    validation_loss: f64,
}

fn output_dir(cfg: &ExperimentConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.output_dir.clone())
}

fn train(a: TrainArgs) -> Result<()> {
    let (split, real) = match (&a.input, a.family) {
        (Some(p), _) => (DatasetSplit::single(Graph::read_edge_list(p)?), true),
        (None, Some(f)) => {
            let spec = GeneratorSpec::new(f, a.n, derive_seed(a.seed, 0));
            (
                DatasetSplit::generate(&spec, a.train, a.validate, 0)?,
                false,
            )
        }
        (None, None) => return Err(HarnessError::Config("give --input or --family".into())),
    };
    let n = split.train[0].num_nodes();
    let base_net = if real {
        NetConfig::REAL_WORLD
    } else {
        NetConfig::SYNTHETIC
    };
    let net = NetConfig {
        embed_dim: a.embed_dim.unwrap_or(base_net.embed_dim),
        hidden: a.hidden.unwrap_or(base_net.hidden),
        rounds: a.rounds.unwrap_or(base_net.rounds),
    };
    let base = if real {
        TrainSchedule::real_world(a.steps)
    } else {
        TrainSchedule::synthetic(a.steps)
    };
    let sched = TrainSchedule {
        learning_rate: a.learning_rate.unwrap_or(base.learning_rate),
        batch_size: a.batch_size.unwrap_or(base.batch_size),
        target_sync_every: a.target_sync_every.unwrap_or(base.target_sync_every),
        validation_every: a.validation_every.unwrap_or(base.validation_every),
        ..base
    };
    let default_sims = if real {
        netrobust_core::robustness::REAL_WORLD_N_SIMS
    } else {
        default_n_sims(n)
    };
    let cell = CellEnv::new(a.objective, a.budget, a.n_sims.unwrap_or(default_sims), 1)?;
    let train_seed = derive_seed(a.seed, 1);
    match a.agent {
        AgentKind::Dqn => {
            let mut trainer = DqnTrainer::new(&split, &cell.episode, net, sched, train_seed)?;
            while !trainer.is_done() {
                if let Some(v) = trainer.step()?.validated {
                    progress(&format!("step {} validation {v:.4}", trainer.steps_done()));
                }
            }
            let run = trainer.finish();
            checkpoint::save(&a.checkpoint, &run.best, None)?;
            if let Some(log) = &a.log {
                let rows: Vec<DqnLogRow> = run
                    .log
                    .iter()
                    .map(|p| DqnLogRow {
                        step: p.step,
                        loss: p.loss,
                        epsilon: p.epsilon,
                        validation_reward: p.validation_reward,
                    })
                    .collect();
                write_rows(log, &rows)?;
            }
            progress(&format!(
                "best validation {:.4} at step {}",
                run.best_validation, run.best_step
            ));
        }
        AgentKind::Sl => {
            if real {
                return Err(HarnessError::Config("SL needs a generated dataset".into()));
            }
            let run = netrobust::experiment::train_sl_seeded(
                &split,
                &cell.episode,
                net,
                sched,
                train_seed,
            )?;
            checkpoint::save(&a.checkpoint, &run.best, None)?;
            if let Some(log) = &a.log {
                let rows: Vec<SlLogRow> = run
                    .log
                    .iter()
                    .map(|p| SlLogRow {
                        step: p.step,
                        train_loss: p.train_loss,
                        validation_loss: p.validation_loss,
                    })
                    .collect();
                write_rows(log, &rows)?;
            }
            progress(&format!(
                "best validation loss {:.6} at step {}",
                run.best_validation_loss, run.best_step
            ));
        }
        other => {
            return Err(HarnessError::Config(format!(
                "{} is not trainable",
                other.name()
            )))
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_pool(cli.workers)?;
    match cli.command {
        Command::Generate {
            family,
            n,
            count,
            seed,
            out,
        } => {
            std::fs::create_dir_all(&out).map_err(io_err(&out))?;
            let mut manifest = Vec::with_capacity(count);
            for i in 0..count {
                let graph_seed = derive_seed(seed, i as u64);
                let g = GeneratorSpec::new(family, n, graph_seed).generate()?;
                let filename = format!("{family}_{n}_{i:05}.edges");
                g.write_edge_list(out.join(&filename))?;
                manifest.push(ManifestRow {
                    filename,
                    n,
                    m: g.num_edges(),
                    seed: graph_seed,
                });
            }
            write_rows(&out.join("manifest.csv"), &manifest)?;
        }
        Command::Estimate {
            input,
            objective,
            n_sims,
            seed,
        } => {
            let g = Graph::read_edge_list(&input)?;
            let sims = n_sims.unwrap_or_else(|| default_n_sims(g.num_live_nodes()));
            let e = estimate_robustness_seeded(&g, objective.strategy(), sims, seed, true)?;
            println!(
                "mean,std_error,n_sims\n{},{},{}",
                e.mean, e.std_error, e.n_sims
            );
        }
        Command::Baseline {
            strategy,
            objective,
            budget,
            graphs,
            n_sims,
            greedy_sims,
            out,
        } => {
            let loaded = graphs.load()?;
            let n = loaded.first().map_or(0, |(_, g)| g.num_nodes());
            let sims = n_sims.unwrap_or_else(|| default_n_sims(n));
            let greedy = greedy_sims.unwrap_or(sims);
            let kind = BaselineKind::parse(&strategy, greedy)?;
            let cell = CellEnv::new(objective, budget, sims, greedy)?;
            let (names, gs): (Vec<String>, Vec<Graph>) = loaded.into_iter().unzip();
            let rewards = evaluate_baseline(kind, &gs, &cell, graphs.seed)?;
            write_rewards(out.as_deref(), &names, &rewards)?;
        }
        Command::Train(a) => train(a)?,
        Command::Evaluate {
            checkpoint: path,
            objective,
            budget,
            graphs,
            n_sims,
            out,
        } => {
            let loaded = graphs.load()?;
            let n = loaded.first().map_or(0, |(_, g)| g.num_nodes());
            let cell = CellEnv::new(
                objective,
                budget,
                n_sims.unwrap_or_else(|| default_n_sims(n)),
                1,
            )?;
            let (names, gs): (Vec<String>, Vec<Graph>) = loaded.into_iter().unzip();
            let kind =
                checkpoint::peek_kind(BufReader::new(File::open(&path).map_err(io_err(&path))?))?;
            let rewards = if kind == <RegressorParams<f64> as Parameters<f64>>::KIND {
                let (p, _) = checkpoint::load::<f64, RegressorParams<f64>, _>(&path)?;
                evaluate_sl(&p, &gs, &cell.env, graphs.seed)?
            } else {
                let (p, _) = checkpoint::load::<f64, NetworkParams<f64>, _>(&path)?;
                evaluate_dqn(&p, &gs, &cell.env, graphs.seed)?
            };
            write_rewards(out.as_deref(), &names, &rewards)?;
        }
        Command::Table { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = output_dir(&cfg, out);
            let result = run_table(&cfg, Some(&dir.join("checkpoints")), &progress)?;
            let (summary, raw) = result.write(&dir)?;
            progress(&format!(
                "wrote {} and {}",
                summary.display(),
                raw.display()
            ));
        }
        Command::Sweep {
            config,
            checkpoint: q,
            sl_checkpoint,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dqn = q
                .map(checkpoint::load::<f64, NetworkParams<f64>, _>)
                .transpose()?
                .map(|x| x.0);
            let sl = sl_checkpoint
                .map(checkpoint::load::<f64, RegressorParams<f64>, _>)
                .transpose()?
                .map(|x| x.0);
            let result = run_size_sweep(
                &cfg,
                &SweepModels {
                    dqn: dqn.as_ref(),
                    sl: sl.as_ref(),
                },
                &progress,
            )?;
            let dir = output_dir(&cfg, out);
            std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            write_rows(&dir.join(sweep::SUMMARY_FILE), &result.summary)?;
            write_rows(&dir.join(sweep::RAW_FILE), &result.raw)?;
        }
        Command::Curve { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_validation_curve(&cfg, &progress)?;
            let dir = output_dir(&cfg, out);
            std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            write_rows(&dir.join(curve::CURVE_FILE), &result.curve)?;
            write_rows(&dir.join(curve::RAW_FILE), &result.raw)?;
        }
        Command::Dot {
            input,
            output,
            base,
        } => {
            let g = Graph::read_edge_list(&input)?;
            let added = match base {
                Some(b) => {
                    let b = Graph::read_edge_list(&b)?;
                    g.edges()
                        .into_iter()
                        .filter(|e| !b.has_edge(e.u(), e.v()))
                        .collect()
                }
                None => Vec::new(),
            };
            export_dot_highlighted(&g, &added, &output)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

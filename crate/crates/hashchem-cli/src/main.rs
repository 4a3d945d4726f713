//! `hashchem`: run Hash Chemistry campaigns and emit their artifacts.
//!
//! Exit codes: 0 success, 1 configuration error, 2 oracle failure,
//! 3 campaign incomplete (attempt cap exhausted before enough
//! non-extinct runs were collected).

mod config;
mod output;
mod svg;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use hashchem::analysis::{average_series, Field};
use hashchem::core::World;
use hashchem::engine::{run_stream, Recorder, StepOutcome};
use hashchem::harness::run_campaign;
use hashchem::rng::derive_run_stream;

use config::{RunConfig, RunOverrides};

#[derive(Parser)]
#[command(name = "hashchem", version, about = "Hash Chemistry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write CSV/JSON (and optional SVG) artifacts
    Run(RunOverrides),
    /// Run the built-in oracle checks and report pass/fail
    Verify {
        /// Randomized worlds for the neighbor-query oracle
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match cli.command {
        Command::Run(overrides) => match overrides.resolve() {
            Ok(config) => match cmd_run(&config) {
                Ok(complete) => {
                    if complete {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            },
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Command::Verify { cases } => cmd_verify(cases),
    }
}

/// Captures particle snapshots at chosen ticks for the scatter plots.
struct SnapshotRecorder {
    wanted: Vec<u32>,
    frames: Vec<(u32, Vec<(f64, f64, u32)>)>,
}

impl Recorder for SnapshotRecorder {
    fn on_step(&mut self, world: &World, outcome: &StepOutcome) {
        if self.wanted.contains(&outcome.tick) {
            let frame = world.particles.iter().map(|p| (p.x, p.y, p.ty)).collect();
            self.frames.push((outcome.tick, frame));
        }
    }
}

fn cmd_run(config: &RunConfig) -> Result<bool> {
    let out = &config.output_dir;
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;

    let started = Instant::now();
    let result = run_campaign(&config.campaign)?;
    let wall = started.elapsed().as_secs_f64();

    for (i, run) in result.runs.iter().enumerate() {
        output::write_run_csv(&out.join(format!("run_{i}.csv")), &run.records)?;
    }
    let views = output::run_views(&result);
    if !views.is_empty() {
        output::write_average_csv(&out.join("average.csv"), &views)?;
    }

    let mut fits_written = false;
    if !views.is_empty() {
        let t_hi = config.campaign.params.steps.min(2000);
        if t_hi > 100 {
            if let Some(report) =
                output::build_fit_report(&views, 100, t_hi, config.fit_sampling)?
            {
                output::write_fit_report(&out.join("fits.json"), &report)?;
                fits_written = true;
            }
        }
    }

    output::write_campaign_json(&out.join("campaign.json"), &config.campaign, &result, wall)?;

    if config.plot && !views.is_empty() {
        plot_all(config, &result, out)?;
    }

    println!(
        "campaign: {} attempts, {} accepted ({} extinct), extinction probability {:.3}, {:.1}s",
        result.attempts,
        result.accepted,
        result.attempts - result.accepted,
        result.extinction_probability(),
        wall
    );
    if !fits_written {
        println!("fits.json skipped (window needs steps > 100 and event data)");
    }
    if !result.complete {
        eprintln!(
            "warning: campaign incomplete: {} accepted of {} wanted after {} attempts",
            result.accepted, config.campaign.target_runs, result.attempts
        );
    }
    Ok(result.complete)
}

fn plot_all(
    config: &RunConfig,
    result: &hashchem::harness::CampaignResult,
    out: &Path,
) -> Result<()> {
    let charts = out.join("charts");
    std::fs::create_dir_all(&charts)?;
    let views = output::run_views(result);
    let figures: [(&str, Field, &str); 6] = [
        ("max_fitness", Field::MaxEventFitness, "Max fitness of replicated entities"),
        ("replicated", Field::ReplicatedIndividuals, "Individuals replicated per step"),
        ("max_event_size", Field::MaxEventSize, "Max individuals per replication event"),
        ("mean_event_size", Field::MeanEventSize, "Mean individuals per replication event"),
        ("cum_individual_types", Field::CumIndividualTypes, "Cumulative unique individual types"),
        ("cum_higher_order_types", Field::CumHigherOrderTypes, "Cumulative unique higher-order types"),
    ];
    for (stem, field, title) in figures {
        let average = average_series(&views, field)?;
        let runs: Vec<Vec<Option<f64>>> = views
            .iter()
            .map(|records| records.iter().map(|r| field.extract(r)).collect())
            .collect();
        svg::line_chart(&charts.join(format!("{stem}.svg")), title, &runs, &average)?;
    }

    // Scatter snapshots re-trace the first kept run's trajectory.
    if let Some(first) = result.runs.first() {
        let snaps = out.join("snapshots");
        std::fs::create_dir_all(&snaps)?;
        let mut recorder = SnapshotRecorder {
            wanted: config.snapshot_ticks.clone(),
            frames: Vec::new(),
        };
        let stream =
            derive_run_stream(config.campaign.master_seed, first.attempt_index as u64);
        run_stream(&config.campaign.params, stream, &mut recorder)?;
        for (tick, frame) in &recorder.frames {
            svg::scatter_snapshot(
                &snaps.join(format!("snapshot_{tick}.svg")),
                &format!("t = {tick}"),
                frame,
                config.campaign.params.num_types,
            )?;
        }
    }
    Ok(())
}

fn cmd_verify(cases: usize) -> ExitCode {
    let outcomes = if cases == 1000 {
        hashchem::verify::run_all()
    } else {
        vec![
            hashchem::verify::grid_oracle(cases, 61_803),
            hashchem::verify::ols_oracle(27_182),
            hashchem::verify::hash_oracle(100_000, 31_415),
            hashchem::verify::conservation_oracle(14_142, 250),
        ]
    };
    let mut all_passed = true;
    for o in &outcomes {
        println!("{} {} — {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        all_passed &= o.passed;
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

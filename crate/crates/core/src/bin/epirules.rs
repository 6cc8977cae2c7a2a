use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use epirules::dataset::ingest_csv;
use epirules::decimal::{format_big, parse_rational};
use epirules::model::RelationSet;
use epirules::pipeline::{
    audit_rules, benchmark, parse_rules_json, run_experiment, write_outputs, write_timings, ExperimentConfig, GridSpec,
    Pipeline,
};
use epirules::synth::{gen_synthetic, synthetic_model};
use epirules::Error;

#[derive(Parser)]
#[command(
    name = "epirules",
    version,
    about = "Learn rational epistemic rules from belief data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split, learn and evaluate; writes rules.json, stats.csv and report.csv
    Mine {
        #[arg(long)]
        dataset: PathBuf,
        /// Likert scale size when cells hold raw responses
        #[arg(long)]
        scale: Option<i64>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_pipeline)]
        pipeline: Option<Pipeline>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Time every pipeline and value set of a grid; writes timings.csv
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        scale: Option<i64>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write a synthetic dataset over A1..An and target T
    Synth {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        influencers: usize,
        /// Relation tags (0 attack, 1 support), repeated across influencers
        #[arg(long, value_delimiter = ',', default_value = "1,1,0")]
        relations: Vec<u8>,
        #[arg(long, default_value = "0.1")]
        noise: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write a matching experiment config
        #[arg(long)]
        config_out: Option<PathBuf>,
    },
    /// Audit learnt rules against the rationality principles
    Check {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_pipeline(s: &str) -> Result<Pipeline, String> {
    s.parse().map_err(|e: epirules::pipeline::ConfigError| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Mine {
            dataset,
            scale,
            config,
            pipeline,
            seed,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(p) = pipeline {
                cfg.pipeline = p;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let data = ingest_csv(&dataset, scale)?;
            let result = run_experiment(&cfg, &data)?;
            write_outputs(&result, &out)?;
            for row in result.report.iter().filter(|r| r.repetition.is_none()) {
                println!(
                    "{}\t{}\trules={}\tsupport={}\tconfidence={}\tlift={}\tirrational={}",
                    row.target,
                    row.pipeline,
                    format_big(&row.rule_count),
                    format_big(&row.support),
                    format_big(&row.confidence),
                    format_big(&row.lift),
                    format_big(&row.irrational),
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Bench {
            dataset,
            scale,
            config,
            grid,
            out,
        } => {
            let base = ExperimentConfig::load(&config)?;
            let grid: GridSpec = serde_json::from_str(&std::fs::read_to_string(&grid)?)?;
            let data = ingest_csv(&dataset, scale)?;
            let rows = benchmark(&grid.expand(&base), &data)?;
            let path = out.join("timings.csv");
            write_timings(&rows, &path)?;
            for row in &rows {
                println!(
                    "{}\t{}\t{}\tcandidates={}\trules={}\tms={}",
                    row.pipeline,
                    row.value_set,
                    row.target,
                    row.candidates,
                    row.rules,
                    format_big(&row.wall_time_ms)
                );
            }
            println!("wrote {}", path.display());
        }
        Command::Synth {
            rows,
            influencers,
            relations,
            noise,
            seed,
            out,
            config_out,
        } => {
            let profile = RelationSet::from_tags(&relations)?;
            let noise = parse_rational(&noise)?;
            let data = gen_synthetic(rows, influencers, &profile, noise, seed)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            data.write_csv(std::fs::File::create(&out)?)?;
            if let Some(path) = config_out {
                let model = synthetic_model(influencers, &profile)?;
                let mut cfg = ExperimentConfig::new(epirules::value::RestrictedValueSet::uniform(4)?, vec![model]);
                cfg.seed = seed;
                std::fs::write(path, cfg.to_json())?;
            }
            println!("wrote {} rows to {}", data.len(), out.display());
        }
        Command::Check { rules, config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rules = parse_rules_json(&std::fs::read_to_string(&rules)?)?;
            let report = audit_rules(&rules, &cfg.tuples)?;
            println!("{}", serde_json::to_string(&report)?);
            if report.irrational > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

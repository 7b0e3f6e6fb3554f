mod args;
mod config;
mod curate;
mod meta;
mod model;
mod text_io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::FileConfig;

pub const EXIT_DATA: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// An invocation that cannot run as given, independent of data contents.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Settings shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub file: FileConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_DATA)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        file,
    };
    match cli.command {
        Command::Curate(c) => curate::run(&ctx, c),
        Command::Train(a) => model::train(&ctx, a),
        Command::Eval(a) => model::eval(&ctx, a),
        Command::Score(a) => model::score(&ctx, a),
        Command::Profile(a) => model::profile(&ctx, a),
        Command::Reward(a) => model::reward(&ctx, a),
        Command::Rerank(a) => model::rerank(&ctx, a),
        Command::Serve(a) => model::serve(&ctx, a),
    }
}

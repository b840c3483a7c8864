use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use refdom::cli::{run_check, run_resolve, RunConfig, TraceFormat};
use refdom::engine::{Ambiguity, EngineOptions};
use refdom::parser::UnknownPolicy;
use refdom::scene::GroupingParams;

#[derive(Parser)]
#[command(name = "refdom", version, about = "Resolve referring expressions over reference domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a dialogue and print one trace record per referring expression.
    Resolve(Common),
    /// Replay a dialogue and compare it with gold annotations.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gold: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbiguityArg {
    First,
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnknownArg {
    Fail,
    Skip,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    dialogue: PathBuf,
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    trace: TraceArg,
    #[arg(long, value_enum, default_value = "first")]
    ambiguity: AmbiguityArg,
    #[arg(long, value_enum, default_value = "off")]
    agreement: Switch,
    /// Distance under which scene entities are grouped.
    #[arg(long)]
    proximity_threshold: Option<f64>,
    /// What to do with words missing from the lexicon.
    #[arg(long, value_enum, default_value = "fail")]
    unknown: UnknownArg,
}

impl Common {
    fn config(&self) -> RunConfig {
        let mut grouping = GroupingParams::default();
        if let Some(r) = self.proximity_threshold {
            grouping.proximity_threshold = r;
        }
        RunConfig {
            kb: self.kb.clone(),
            dialogue: self.dialogue.clone(),
            scene: self.scene.clone(),
            trace: match self.trace {
                TraceArg::Text => TraceFormat::Text,
                TraceArg::Json => TraceFormat::Json,
            },
            options: EngineOptions {
                ambiguity: match self.ambiguity {
                    AmbiguityArg::First => Ambiguity::First,
                    AmbiguityArg::Report => Ambiguity::Report,
                },
                agreement: matches!(self.agreement, Switch::On),
                grouping,
                unknown: match self.unknown {
                    UnknownArg::Fail => UnknownPolicy::Fail,
                    UnknownArg::Skip => UnknownPolicy::Skip,
                },
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match &cli.command {
        Command::Resolve(common) => run_resolve(&common.config(), &mut out, &mut err),
        Command::Check { common, gold } => run_check(&common.config(), gold, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}

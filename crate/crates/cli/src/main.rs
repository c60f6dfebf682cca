use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dsp_cli::{cmd_analyze, cmd_census, cmd_corresponding, cmd_ext1, cmd_genericity, cmd_witness, WitnessArgs};
use dsp_core::Mode;

#[derive(Parser)]
#[command(name = "dsp", version, about = "Existence checks and numerical witnesses for matrix tuples in prescribed conjugacy classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Additive,
    Multiplicative,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Additive => Mode::Additive,
            ModeArg::Multiplicative => Mode::Multiplicative,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Derived quantities, applicable rules and the verdict for an instance file.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Every non-genericity relation, grouped by size.
    Genericity {
        file: PathBuf,
        /// Largest relation size to enumerate (default n - 1).
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Search numerically for a tuple in the classes with zero sum (identity product).
    Witness {
        file: PathBuf,
        #[arg(long, default_value_t = WitnessArgs::default().restarts)]
        restarts: usize,
        /// Residual tolerance.
        #[arg(long, default_value_t = WitnessArgs::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "max-iterations", default_value_t = WitnessArgs::default().max_iterations)]
        max_iterations: usize,
        #[arg(long = "require-irreducible")]
        require_irreducible: bool,
        /// Print the matrices as well.
        #[arg(long = "show-matrices")]
        show_matrices: bool,
        #[arg(long)]
        json: bool,
    },
    /// Shape-level census of all multiplicity-vector tuples, as TSV.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value = "additive")]
        mode: ModeArg,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corresponding diagonal JNF of a JNF, or all JNFs corresponding to a multiplicity vector.
    Corresponding {
        /// Blocks per eigenvalue, e.g. "2,1;1".
        #[arg(long, conflicts_with = "mv")]
        jnf: Option<String>,
        /// Multiplicities, e.g. "2,1,1".
        #[arg(long)]
        mv: Option<String>,
    },
    /// Extension dimension at a block split; all splits of the given size if none is given.
    Ext1 {
        file: PathBuf,
        #[arg(long)]
        l: usize,
        /// Upper-block multiplicities per class, e.g. "1,1,0,0;1,1;1,1,0".
        #[arg(long)]
        split: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { file, json } => cmd_analyze(&file, json),
        Command::Genericity { file, max_n, json } => cmd_genericity(&file, max_n, json),
        Command::Witness {
            file,
            restarts,
            tol,
            seed,
            max_iterations,
            require_irreducible,
            show_matrices,
            json,
        } => cmd_witness(
            &file,
            &WitnessArgs {
                restarts,
                tol,
                seed,
                max_iterations,
                require_irreducible,
                show_matrices,
                json,
            },
        ),
        Command::Census { n, p, mode, out } => cmd_census(n, p, mode.into(), out.as_deref()),
        Command::Corresponding { jnf, mv } => cmd_corresponding(jnf.as_deref(), mv.as_deref()),
        Command::Ext1 { file, l, split, json } => cmd_ext1(&file, l, split.as_deref(), json),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

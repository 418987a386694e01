use std::path::PathBuf;
use std::process::ExitCode;

use bellows::gram::{Sign, Space};
use bellows::io::{run, Command, RunConfig, EXIT_INPUT};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bellows", version, about = "Simplex volumes, volume continuation and flexion tracing in hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Tolerance (integration or verification, depending on the command).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Volume of a simplex from its Gram matrix file.
    Volume {
        gram: PathBuf,
        #[arg(long, default_value = "hyperbolic")]
        space: String,
    },
    /// Direct quadrature of the volume integral (n <= 4).
    Oracle {
        gram: PathBuf,
        #[arg(long, default_value = "hyperbolic")]
        space: String,
    },
    /// Continue the volume along a path file.
    Continue { path: PathBuf },
    /// Linking numbers of a closed path with every hypersurface component.
    Link { path: PathBuf },
    /// Trace a flexion; CSV to --out (with a JSON sidecar) or stdout.
    Flex {
        complex: PathBuf,
        edges: PathBuf,
        /// Initial guess; a seeded random configuration if omitted.
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Solve the seed with opposite vertices swapped by a half-turn.
        #[arg(long)]
        bricard: bool,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        step_length: f64,
    },
    /// Trace the bundled octahedron and check volume and curvature drift.
    VerifyBellows {
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        step_length: f64,
    },
    /// Run the loop suites for the monodromy laws.
    VerifyMonodromy {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        space: Option<String>,
    },
    /// Print a witness matrix and its minor table.
    Witness {
        n: usize,
        /// Size of the index set {0, .., k-1}.
        #[arg(long, conflicts_with = "set")]
        k: Option<usize>,
        /// Explicit index set, comma separated.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sigma: String,
    },
    /// Write an elementary loop at the default basepoint as a path file.
    Loop {
        n: usize,
        #[arg(long, default_value = "hyperbolic")]
        space: String,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
}

fn convert(cmd: Cmd) -> Result<Command, String> {
    let space = |s: &str| s.parse::<Space>().map_err(|e| e.to_string());
    Ok(match cmd {
        Cmd::Volume { gram, space: s } => Command::Volume { gram, space: space(&s)? },
        Cmd::Oracle { gram, space: s } => Command::Oracle { gram, space: space(&s)? },
        Cmd::Continue { path } => Command::Continue { path },
        Cmd::Link { path } => Command::Link { path },
        Cmd::Flex { complex, edges, coords, bricard, steps, step_length } => {
            Command::Flex { complex, edges, coords, bricard, steps, step_length }
        }
        Cmd::VerifyBellows { steps, step_length } => Command::VerifyBellows { steps, step_length },
        Cmd::VerifyMonodromy { n, space: s } => Command::VerifyMonodromy {
            n,
            space: s.as_deref().map(space).transpose()?,
        },
        Cmd::Witness { n, k, set, sigma } => {
            let set = match (k, set) {
                (_, Some(s)) => s,
                (Some(k), None) => (0..k).collect(),
                (None, None) => return Err("witness needs --k or --set".into()),
            };
            Command::Witness { n, set, sigma: sigma.parse::<Sign>().map_err(|e| e.to_string())? }
        }
        Cmd::Loop { n, space: s, index } => Command::Loop { n, space: space(&s)?, index },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let command = match convert(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let config = RunConfig { command, tol: cli.tol, seed: cli.seed, out: cli.out };
    let code = run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use duomap::bench::{run_bench, write_csv, BenchConfig, GeneratorSpec};
use duomap::exact::{exact_opt_with_cap, DEFAULT_ORACLE_CAP};
use duomap::io::{
    extract_letter_mapping, gen_mcsp_instance, gen_random_graph, mcsp_pieces, parse_instance,
    serialize_instance, Instance, SolveOutput, FORMAT_VERSION,
};
use duomap::pipeline::{SolverConfig, SolverRegistry, DEFAULT_BUDGET};
use duomap::{is_valid, DuoGraph, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_TOO_LARGE: u8 = 3;

#[derive(Parser)]
#[command(name = "duomap", version, about = "Duo-preservation string mapping solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one approximation algorithm.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve a small instance exactly.
    Exact {
        instance: PathBuf,
        #[arg(long = "oracle-cap", default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
    /// Run algorithms over generated instances and emit CSV.
    Bench {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of instances; seeds run from --seed upwards.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Comma-separated algorithm names.
        #[arg(long, value_delimiter = ',', default_value = "approx4,approx3,approx267")]
        algorithm: Vec<String>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long = "oracle-cap", default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, env = "DUOMAP_THREADS")]
        threads: Option<usize>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a generated instance.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Solve a string instance and report the letter mapping and MCSP pieces.
    Convert {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "approx267")]
    algorithm: String,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            budget: self.budget,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Mcsp)]
    generator: GenKind,
    /// String length (mcsp) or nodes per side (random).
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    blocks: usize,
    #[arg(long, default_value_t = 3)]
    sigma: usize,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn spec(&self) -> GeneratorSpec {
        match self.generator {
            GenKind::Mcsp => GeneratorSpec::Mcsp {
                n: self.n,
                blocks: self.blocks,
                sigma: self.sigma,
            },
            GenKind::Random => GeneratorSpec::Random {
                n_a: self.n,
                n_b: self.n,
                p: self.p,
            },
            GenKind::Mixed => GeneratorSpec::Mixed {
                n: self.n,
                blocks: self.blocks,
                sigma: self.sigma,
                p: self.p,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Mcsp,
    Random,
    Mixed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn solve(path: &Path, args: &SolverArgs, format: Format) -> Result<String> {
    let instance = read_instance(path)?;
    let g = instance.graph()?;
    let solver = SolverRegistry::with_builtin().create(&args.algorithm, &args.config())?;
    let report = solver.solve(&g)?;
    if !is_valid(&report.solution, &g) {
        bail!("solver produced an invalid matching");
    }
    let mut out = SolveOutput::from_report(&report);
    if let Instance::Mpsm { x, y } = &instance {
        out = out.with_mapping(&extract_letter_mapping(x, y, &report.solution)?);
    }
    Ok(match format {
        Format::Json => out.to_json() + "\n",
        Format::Csv => out.to_csv(),
    })
}

fn exact(path: &Path, cap: usize) -> Result<String> {
    let instance = read_instance(path)?;
    let g = instance.graph()?;
    let opt = exact_opt_with_cap(&g, cap)?;
    let mut out = json!({
        "format_version": FORMAT_VERSION,
        "algorithm": "exact",
        "size": opt.len(),
        "edges": opt.to_vec(),
    });
    if let Instance::Mpsm { x, y } = &instance {
        let mapping = extract_letter_mapping(x, y, &opt)?;
        out["mapping"] = json!(mapping.pi);
        out["pieces"] = json!(mcsp_pieces(&mapping));
    }
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

fn convert(path: &Path, args: &SolverArgs) -> Result<String> {
    let Instance::Mpsm { x, y } = read_instance(path)? else {
        bail!("convert needs an mpsm (string pair) instance");
    };
    let g = DuoGraph::from_strings(&x, &y)?;
    let solver = SolverRegistry::with_builtin().create(&args.algorithm, &args.config())?;
    let report = solver.solve(&g)?;
    let mapping = extract_letter_mapping(&x, &y, &report.solution)?;
    let duos = mapping.preserved_duos();
    let pieces = mcsp_pieces(&mapping);
    let out = json!({
        "format_version": FORMAT_VERSION,
        "algorithm": report.algorithm,
        "length": x.len(),
        "matching_size": report.size(),
        "preserved_duos": duos,
        "pieces": pieces,
        "identity_holds": duos + pieces == x.len(),
        "mapping": mapping.pi,
    });
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

fn gen(args: &GenArgs) -> Result<String> {
    let instance = match args.generator {
        GenKind::Mcsp => {
            let (x, y) = gen_mcsp_instance(args.n, args.blocks, args.sigma, args.seed)?;
            Instance::Mpsm { x, y }
        }
        GenKind::Random => Instance::Mcbm(gen_random_graph(args.n, args.n, args.p, args.seed)?),
        GenKind::Mixed => bail!("gen produces one instance; choose mcsp or random"),
    };
    Ok(String::from_utf8(serialize_instance(&instance))?)
}

fn run(cli: Cli) -> Result<()> {
    let text = match cli.command {
        Command::Solve {
            instance,
            solver,
            format,
        } => solve(&instance, &solver, format)?,
        Command::Exact {
            instance,
            oracle_cap,
        } => exact(&instance, oracle_cap)?,
        Command::Convert { instance, solver } => convert(&instance, &solver)?,
        Command::Gen { gen: args } => gen(&args)?,
        Command::Bench {
            gen: args,
            count,
            algorithm,
            epsilon,
            budget,
            oracle_cap,
            format,
            threads,
            output,
        } => {
            if format != Format::Csv {
                bail!("bench only emits csv");
            }
            let cfg = BenchConfig {
                generator: args.spec(),
                first_seed: args.seed,
                count,
                algorithms: algorithm.into_iter().filter(|a| !a.is_empty()).collect(),
                solver: SolverConfig { epsilon, budget },
                oracle_cap,
                threads,
            };
            let rows = run_bench(&cfg, &SolverRegistry::with_builtin())?;
            match output {
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&rows, file)?;
                }
                None => write_csv(&rows, io::stdout().lock())?,
            }
            return Ok(());
        }
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let too_large = err
                .downcast_ref::<Error>()
                .is_some_and(|e| matches!(e, Error::InstanceTooLarge { .. }));
            ExitCode::from(if too_large { EXIT_TOO_LARGE } else { EXIT_FAILURE })
        }
    }
}

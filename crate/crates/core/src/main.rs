use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tilework::compiler::catalog::gadget;
use tilework::compiler::{compile_1in3_2d, compile_circuit_2d, compile_monotone_3d, lift_4d, PlacedInstance};
use tilework::formula::{emit_formula, monotonize, parse_formula, parse_netlist};
use tilework::harness::{
    acceptance_checks, render_tiling, summarize, verify_gadget, verify_reduction, SelftestConfig, Verdict,
};
use tilework::lattice::{builtin_tileset, emit_region, emit_tileset, parse_region, parse_tileset, Region, TileShape};
use tilework::reduction::reduce_to_cubic;
use tilework::solver::{count_tilings_with, enumerate_tilings_with, Budget, SolverError, Tiling};

// a closed pipe on stdout is not an error worth a panic
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! put {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

const OK: u8 = 0;
const FALSE: u8 = 1;
const ERROR: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "tilework", version, about = "Tiling solver, gadget compilers and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find one tiling.
    Solve {
        #[arg(long)]
        region: PathBuf,
        /// Tileset file, or comma-separated built-in tile names.
        #[arg(long)]
        tiles: String,
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Draw planar tilings as ASCII.
        #[arg(long)]
        render: bool,
    },
    /// Count tilings exactly.
    Count {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        tiles: String,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// List up to N tilings.
    Enumerate {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        tiles: String,
        #[arg(long)]
        limit: usize,
        #[arg(long)]
        max_nodes: Option<u64>,
        #[arg(long)]
        render: bool,
    },
    /// Compile a circuit to a region for right trominoes and square tetrominoes.
    #[command(name = "compile-circuit2d")]
    CompileCircuit2d {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Compile a cubic planar 1-in-3 formula to a region for right trominoes.
    #[command(name = "compile-1in3")]
    Compile1in3 {
        #[arg(long)]
        formula: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Reduce a planar formula to a cubic planar one.
    #[command(name = "reduce-cubic")]
    ReduceCubic {
        #[arg(long)]
        formula: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Compile a circuit to a cubic-lattice region for dominoes and straight trominoes.
    #[command(name = "compile-3d")]
    Compile3d {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Lift a cubic-lattice region into four dimensions.
    #[command(name = "lift-4d")]
    Lift4d {
        #[arg(long)]
        region: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Check a catalog gadget against its truth table.
    #[command(name = "verify-gadget")]
    VerifyGadget {
        name: String,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Check the cubic reduction of a formula.
    #[command(name = "verify-reduction")]
    VerifyReduction {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Run every acceptance check.
    Selftest {
        #[arg(long)]
        max_nodes: Option<u64>,
    },
}

type Failure = Box<dyn std::error::Error>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_tiles(spec: &str) -> Result<Vec<TileShape>, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        Ok(parse_tileset(&read(path)?)?)
    } else {
        Ok(builtin_tileset(spec)?)
    }
}

fn budget(max_nodes: Option<u64>) -> Budget {
    max_nodes.map_or(Budget::UNLIMITED, Budget::nodes)
}

fn print_tiling(i: usize, region: &Region, tiles: &[TileShape], t: &Tiling, render: bool) {
    say!("tiling {i}");
    for p in &t.placements {
        let cells: Vec<String> = p.cells(tiles).unwrap_or_default().iter().map(|c| c.to_string()).collect();
        say!("place {} {} {}", p.tile, p.orientation, cells.join(" "));
    }
    if render {
        match render_tiling(region, tiles, t) {
            Some(pic) => put!("{pic}"),
            None => say!("render unavailable for dimension {}", region.dim()),
        }
    }
}

fn write_instance(inst: &PlacedInstance, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    let region = dir.join("region.txt");
    let tiles = dir.join("tiles.txt");
    let provenance = dir.join("provenance.txt");
    fs::write(&region, emit_region(&inst.region))?;
    fs::write(&tiles, emit_tileset(&inst.family.tileset()))?;
    fs::write(&provenance, inst.provenance_text())?;
    say!("family {}", inst.family.name());
    say!("cells {}", inst.region.len());
    for (name, at) in &inst.input_map {
        say!("input {name} {at}");
    }
    match inst.output_port {
        Some(at) => say!("output {at}"),
        None => say!("output none"),
    }
    say!("region {}", region.display());
    say!("tiles {}", tiles.display());
    say!("provenance {}", provenance.display());
    Ok(())
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Solve {
            region,
            tiles,
            max_nodes,
            render,
        } => {
            let r = parse_region(&read(&region)?)?;
            let t = load_tiles(&tiles)?;
            match enumerate_tilings_with(&r, &t, 1, budget(max_nodes)) {
                Ok(en) => match en.tilings.first() {
                    Some(tiling) => {
                        say!("result sat");
                        print_tiling(0, &r, &t, tiling, render);
                        Ok(OK)
                    }
                    None => {
                        say!("result unsat");
                        Ok(FALSE)
                    }
                },
                Err(SolverError::BudgetExceeded(n)) => {
                    say!("result inconclusive\nbudget {n}");
                    Ok(INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Count {
            region,
            tiles,
            max_nodes,
        } => {
            let r = parse_region(&read(&region)?)?;
            let t = load_tiles(&tiles)?;
            match count_tilings_with(&r, &t, budget(max_nodes)) {
                Ok(n) => {
                    say!("count {n}");
                    Ok(OK)
                }
                Err(SolverError::BudgetExceeded(n)) => {
                    say!("count inconclusive\nbudget {n}");
                    Ok(INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Enumerate {
            region,
            tiles,
            limit,
            max_nodes,
            render,
        } => {
            if limit == 0 {
                return Err("--limit must be positive".into());
            }
            let r = parse_region(&read(&region)?)?;
            let t = load_tiles(&tiles)?;
            match enumerate_tilings_with(&r, &t, limit, budget(max_nodes)) {
                Ok(en) => {
                    say!("tilings {}", en.tilings.len());
                    say!("truncated {}", en.truncated);
                    for (i, tiling) in en.tilings.iter().enumerate() {
                        print_tiling(i, &r, &t, tiling, render);
                    }
                    Ok(OK)
                }
                Err(SolverError::BudgetExceeded(n)) => {
                    say!("tilings inconclusive\nbudget {n}");
                    Ok(INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::CompileCircuit2d { netlist, out } => {
            let c = parse_netlist(&read(&netlist)?)?;
            write_instance(&compile_circuit_2d(&c)?, &out)?;
            Ok(OK)
        }
        Command::Compile1in3 { formula, out } => {
            let f = parse_formula(&read(&formula)?)?;
            write_instance(&compile_1in3_2d(&f)?, &out)?;
            Ok(OK)
        }
        Command::Compile3d { netlist, out } => {
            let c = parse_netlist(&read(&netlist)?)?;
            write_instance(&compile_monotone_3d(&monotonize(&c))?, &out)?;
            Ok(OK)
        }
        Command::ReduceCubic { formula, out } => {
            let f = parse_formula(&read(&formula)?)?;
            let red = reduce_to_cubic(&f)?;
            fs::write(&out, emit_formula(&red.formula))?;
            put!("{}", red.report);
            say!("formula {}", out.display());
            Ok(OK)
        }
        Command::Lift4d { region, out } => {
            let r = parse_region(&read(&region)?)?;
            let lifted = lift_4d(&r)?;
            fs::write(&out, emit_region(&lifted))?;
            say!("cells {}", lifted.len());
            say!("region {}", out.display());
            Ok(OK)
        }
        Command::VerifyGadget { name, max_nodes } => {
            let g = gadget(&name)?;
            let report = verify_gadget(&g, budget(max_nodes));
            put!("{report}");
            Ok(exit_for(report.verdict))
        }
        Command::VerifyReduction { formula, max_nodes } => {
            let f = parse_formula(&read(&formula)?)?;
            let report = verify_reduction(&f, max_nodes);
            put!("{report}");
            Ok(exit_for(report.verdict))
        }
        Command::Selftest { max_nodes } => {
            let mut cfg = SelftestConfig::default();
            if let Some(n) = max_nodes {
                cfg.budget = Budget::nodes(n);
                cfg.formula_nodes = Some(n);
            }
            let checks = acceptance_checks(&cfg);
            for c in &checks {
                for row in c.problems() {
                    say!("problem {} {} expected {} observed {} {}", c.subject, row.case, row.expected, row.observed, row.status);
                }
            }
            let report = summarize(&checks);
            put!("{report}");
            Ok(exit_for(report.verdict))
        }
    }
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => OK,
        Verdict::Fail => FALSE,
        Verdict::Inconclusive => INCONCLUSIVE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR } else { OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            say!("error {e}");
            eprintln!("error: {e}");
            ExitCode::from(ERROR)
        }
    }
}

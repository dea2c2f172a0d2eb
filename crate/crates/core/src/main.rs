use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cstri::analysis::ModulusSource;
use cstri::cli::{self, BoundsTable, ConfigError, NodeListing, RunConfig, Scene};

#[derive(Parser)]
#[command(
    name = "cstri",
    version,
    about = "Cheney-Sharma surface approximation on a triangle with one curved side"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Triangle height (leg length)
    #[arg(long)]
    h: Option<f64>,
    /// Hypotenuse: line | superellipse:p | poly:c0,c1,...
    #[arg(long)]
    curve: Option<String>,
    /// x-direction degree
    #[arg(long)]
    m: Option<usize>,
    /// y-direction degree
    #[arg(long)]
    n: Option<usize>,
    /// x-direction Abel parameter
    #[arg(long)]
    beta: Option<f64>,
    /// y-direction Abel parameter
    #[arg(long)]
    b: Option<f64>,
    /// Field name (gentle, sinpix, sinpix_cospiy, eIJ) or poly:i,j,c;...
    #[arg(long)]
    field: Option<String>,
    /// Lattice size N for the N x N sampling grid
    #[arg(long)]
    grid: Option<usize>,
    /// Operator selection: qx|qy|p1|p2|s1|s2|all
    #[arg(long)]
    op: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the requested operators (and the raw field) over the triangle,
    /// one output file per surface
    Sample(ConfigArgs),
    /// Run every module's invariant suite; exit 0 iff all properties pass
    Verify(ConfigArgs),
    /// Tabulate |remainder| against the modulus bounds at interior points
    Bounds {
        #[command(flatten)]
        config: ConfigArgs,
        /// Use the field's Lipschitz constant; any violation is fatal
        #[arg(long)]
        certified: bool,
        /// Number of interior sample points
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// Grid resolution for brute-force moduli (estimate mode)
        #[arg(long, default_value_t = 301)]
        resolution: usize,
    },
    /// Print the uniform operator node partitions at fixed coordinates
    Nodes {
        #[command(flatten)]
        config: ConfigArgs,
        /// List the x-direction partition of [0, g(y)] at this y
        #[arg(long)]
        at_y: Option<f64>,
        /// List the y-direction partition of [0, f(x)] at this x
        #[arg(long)]
        at_x: Option<f64>,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn build_config(args: &ConfigArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(curve) = &args.curve {
        cfg.curve = curve.clone();
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(beta) = args.beta {
        cfg.beta = beta;
    }
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(field) = &args.field {
        cfg.field = field.clone();
    }
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    if let Some(op) = &args.op {
        cfg.op = op.clone();
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(format) = &args.format {
        cfg.format = format.parse()?;
    }
    Ok(cfg)
}

fn config_error(e: &ConfigError) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn run_sample(args: &ConfigArgs) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let scene = match cli::resolve(&cfg) {
        Ok(scene) => scene,
        Err(e) => return config_error(&e),
    };
    match cli::cmd_sample(&cfg, &scene) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprintln!("sample failed: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn run_verify(args: &ConfigArgs) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let scene: Scene = match cli::resolve(&cfg) {
        Ok(scene) => scene,
        // a rejected curve spec is itself an invariant check result
        Err(ConfigError::CurveRejected { spec, reason }) => {
            println!("FAIL curve_construction       {spec}: {reason}");
            return ExitCode::from(EXIT_FAIL);
        }
        Err(e) => return config_error(&e),
    };
    let reports = cli::cmd_verify(&scene);
    let mut all_pass = true;
    for r in &reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<42} max defect {:>12.3e} (tol {:.0e})",
            r.name, r.max_defect, r.tolerance
        );
        all_pass &= r.pass;
    }
    if all_pass {
        println!("all {} properties pass", reports.len());
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn print_bounds(table: &BoundsTable) {
    println!(
        "mode: {}",
        if table.certified {
            "certified"
        } else {
            "estimate"
        }
    );
    println!(
        "{:>10} {:>10} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}  viol",
        "x",
        "y",
        "|R qx|",
        "bound qx",
        "|R qy|",
        "bound qy",
        "|R p1|",
        "bound p1",
        "|R s1|",
        "bound s1"
    );
    for row in &table.rows {
        let e = &row.entries;
        println!(
            "{:>10.6} {:>10.6} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}  {}",
            row.x,
            row.y,
            e[0].0,
            e[0].1,
            e[1].0,
            e[1].1,
            e[2].0,
            e[2].1,
            e[3].0,
            e[3].1,
            if row.violation { "*" } else { "" }
        );
    }
    println!(
        "{} violation(s) over {} points",
        table.violations,
        table.rows.len()
    );
}

fn run_bounds(args: &ConfigArgs, certified: bool, points: usize, resolution: usize) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let scene = match cli::resolve(&cfg) {
        Ok(scene) => scene,
        Err(e) => return config_error(&e),
    };
    let source = if certified {
        match scene.field.lipschitz() {
            Some(l) => ModulusSource::Lipschitz(l),
            None => {
                return config_error(&ConfigError::Invalid(format!(
                    "certified mode needs a field with a Lipschitz constant; '{}' has none",
                    scene.field.name()
                )))
            }
        }
    } else {
        ModulusSource::BruteForce { resolution }
    };
    match cli::cmd_bounds(&scene, &source, points) {
        Ok(table) => {
            print_bounds(&table);
            if certified && table.violations > 0 {
                ExitCode::from(EXIT_FAIL)
            } else {
                ExitCode::from(EXIT_OK)
            }
        }
        Err(e) => {
            eprintln!("bounds failed: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn print_nodes(listing: &NodeListing) {
    let rendered: Vec<String> = listing.nodes.iter().map(|u| format!("{u}")).collect();
    println!("{}: {}", listing.label, rendered.join(", "));
    if listing.degenerate {
        eprintln!("warning: partition degenerate, the row collapses to a vertex");
    }
}

fn run_nodes(args: &ConfigArgs, at_y: Option<f64>, at_x: Option<f64>) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let scene = match cli::resolve(&cfg) {
        Ok(scene) => scene,
        Err(e) => return config_error(&e),
    };
    match cli::cmd_nodes(&scene, at_y, at_x) {
        Ok(listings) => {
            for listing in &listings {
                print_nodes(listing);
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => config_error(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Sample(args) => run_sample(args),
        Command::Verify(args) => run_verify(args),
        Command::Bounds {
            config,
            certified,
            points,
            resolution,
        } => run_bounds(config, *certified, *points, *resolution),
        Command::Nodes { config, at_y, at_x } => run_nodes(config, *at_y, *at_x),
    }
}

//! `smg`: construct, verify, audit and export spherical matchstick graphs.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smg::constructions::{construct, solve_orbits, SolveOptions, Target};
use smg::discharging::audit;
use smg::io::{
    export, graph_to_string, read_graph, write_atomic, ExportFormat, GraphMetadata, LoadedGraph,
};
use smg::symmetry::GroupName;
use smg::verifier::{verify_all, Profile};
use smg::UnitVector;

#[derive(Parser)]
#[command(
    name = "smg",
    version,
    about = "Spherical matchstick graphs: the five 5-regular cap packings, verification and discharging audit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a certified graph and write it to a file.
    Construct {
        /// One of: icosahedron, snub-cube, robinson-48, snub-dodecahedron,
        /// robinson-120.
        name: String,
        /// RNG seed for the multi-start search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Residual target for the tangency polish.
        #[arg(long, default_value_t = 1e-12)]
        polish_tol: f64,
        /// Number of phase-A starts.
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Output file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check the matchstick axioms and print a witnessed report.
    Verify {
        file: PathBuf,
        /// Require minimum degree K (default 5 when neither flag is given).
        #[arg(long, conflicts_with = "regular")]
        min_degree: Option<usize>,
        /// Require exact K-regularity instead.
        #[arg(long)]
        regular: Option<usize>,
        /// Tolerance in radians.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the discharging audit and print the charge ledger.
    Audit {
        file: PathBuf,
        /// Emit the ledger as JSON.
        #[arg(long)]
        json: bool,
        /// Tolerance for the zero checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Export a graph as an OFF mesh, SVG projection or CSV edge list.
    Export {
        file: PathBuf,
        /// off, svg or csv.
        #[arg(long)]
        format: String,
        /// Output file.
        #[arg(short, long)]
        output: PathBuf,
        /// SVG projection axis as `x,y,z`.
        #[arg(long, default_value = "0,0,1")]
        view: String,
    },
    /// Experimental: search for a 5-regular contact structure made of N
    /// orbits of the given group. No correctness guarantees beyond the
    /// certificate of whatever it finds.
    SolveOrbits {
        /// O (octahedral) or I (icosahedral).
        #[arg(long)]
        group: String,
        /// Number of orbits.
        #[arg(long)]
        orbits: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of phase-A starts.
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Residual target for the tangency polish.
        #[arg(long, default_value_t = 1e-12)]
        polish_tol: f64,
        /// Write the certified result here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Exit contract: 0 pass, 1 check failure, 2 usage or parse error.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<smg::Error> for Failure {
    fn from(e: smg::Error) -> Self {
        use smg::Error::*;
        let code = match e {
            Io(_) | Parse(_) | InvalidFile(_) | LoopEdge(_) | DuplicateEdge { .. }
            | EdgeOutOfRange { .. } | LambdaOutOfRange(_) | NotUnit { .. } => 2,
            _ => 1,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<LoadedGraph, Failure> {
    let loaded = read_graph(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

fn generator_tag() -> String {
    format!("smg {}", env!("CARGO_PKG_VERSION"))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Construct {
            name,
            seed,
            polish_tol,
            starts,
            output,
        } => {
            let target: Target = name.parse().map_err(Failure::usage)?;
            let opts = SolveOptions {
                seed,
                starts,
                polish_tol,
                ..SolveOptions::default()
            };
            let result = construct(target, &opts)?;
            println!(
                "constructed {}: {} vertices, {} edges, lambda {:.15}",
                result.name,
                result.graph.vertex_count(),
                result.graph.edge_count(),
                result.graph.lambda()
            );
            println!(
                "certificate: {} (max residual {:.3e}, {} polish iterations)",
                if result.certificate.overall { "PASS" } else { "FAIL" },
                result.residual_max,
                result.iterations
            );
            if !result.certificate.overall {
                print!("{}", result.certificate);
                return Err(Failure::check("construction failed certification"));
            }
            let meta = GraphMetadata {
                name: Some(result.name.clone()),
                residual_max: Some(result.residual_max),
                generator: Some(generator_tag()),
            };
            smg::io::write_graph(&output, &result.graph, &meta)?;
            println!("wrote {}", output.display());
            Ok(0)
        }
        Command::Verify {
            file,
            min_degree,
            regular,
            tol,
            json,
        } => {
            let loaded = load(&file)?;
            let profile = match (min_degree, regular) {
                (_, Some(k)) => Profile::regular(k),
                (Some(k), None) => Profile::min_degree(k),
                (None, None) => Profile::min_degree(5),
            }
            .with_tol(tol);
            let report = verify_all(&loaded.graph, profile);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{report}");
            }
            Ok(if report.overall { 0 } else { 1 })
        }
        Command::Audit { file, json, tol } => {
            let loaded = load(&file)?;
            let ledger = audit(&loaded.graph)?;
            let pass = ledger.total_ok(tol) && ledger.all_finals_nonnegative(tol);
            if json {
                let doc = serde_json::json!({
                    "ledger": ledger,
                    "tol": tol,
                    "total_ok": ledger.total_ok(tol),
                    "all_finals_nonnegative": ledger.all_finals_nonnegative(tol),
                    "all_finals_zero": ledger.all_finals_zero(tol),
                    "pass": pass,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("ledger serializes"));
            } else {
                print!("{}", smg::io::ledger_text(&ledger));
                println!("audit: {}", if pass { "PASS" } else { "FAIL" });
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Export {
            file,
            format,
            output,
            view,
        } => {
            let loaded = load(&file)?;
            let format: ExportFormat = format.parse().map_err(Failure::usage)?;
            let axis = parse_view(&view)?;
            let doc = export(&loaded.graph, format, &axis)?;
            write_atomic(&output, &doc)?;
            println!("wrote {}", output.display());
            Ok(0)
        }
        Command::SolveOrbits {
            group,
            orbits,
            seed,
            starts,
            polish_tol,
            output,
        } => {
            let group = match group.as_str() {
                "O" | "O24" => GroupName::O24,
                "I" | "I60" => GroupName::I60,
                other => {
                    return Err(Failure::usage(format!(
                        "unknown group '{other}' (expected O or I)"
                    )))
                }
            };
            let opts = SolveOptions {
                seed,
                starts,
                polish_tol,
                ..SolveOptions::default()
            };
            let result = solve_orbits(group, orbits, &opts).map_err(|e| {
                Failure::check(format!("search found no certified configuration: {e}"))
            })?;
            println!(
                "certified {}: {} vertices, {} edges, lambda {:.15}",
                result.name,
                result.graph.vertex_count(),
                result.graph.edge_count(),
                result.graph.lambda()
            );
            if let Some(params) = &result.parameters {
                let rendered: Vec<String> =
                    params.flatten().iter().map(|p| format!("{p:.12}")).collect();
                println!("parameters [{}]", rendered.join(", "));
            }
            if let Some(path) = output {
                let meta = GraphMetadata {
                    name: Some(result.name.clone()),
                    residual_max: Some(result.residual_max),
                    generator: Some(generator_tag()),
                };
                smg::io::write_graph(&path, &result.graph, &meta)?;
                println!("wrote {}", path.display());
            } else {
                // Without -o, still show the graph on stdout for piping.
                let meta = GraphMetadata::named(&result.name);
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(graph_to_string(&result.graph, &meta).as_bytes());
            }
            Ok(0)
        }
    }
}

fn parse_view(view: &str) -> Result<UnitVector, Failure> {
    let parts: Vec<&str> = view.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!(
            "view axis '{view}' must be three comma-separated numbers"
        )));
    }
    let mut xyz = [0.0_f64; 3];
    for (slot, part) in xyz.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| Failure::usage(format!("bad view component '{part}': {e}")))?;
    }
    UnitVector::normalize(xyz[0], xyz[1], xyz[2])
        .map_err(|_| Failure::usage("view axis must be a nonzero vector".to_string()))
}

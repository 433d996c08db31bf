//! Batch CLI over the nzflow library: connectivity reports, chain covers,
//! flow generation, the exact census oracle, and bound verification.
//!
//! Exit codes: 0 = pass, 1 = invariant or precondition failure, 2 = usage or
//! parse error.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nzflow::boundary::{verify_beta_flow, z3_flow_family, Boundary};
use nzflow::bounds::{guaranteed_bound, BoundVariant};
use nzflow::census::{count_nz_flows_with, enumerate_nz_flows, flow_polynomial, CensusLimits};
use nzflow::connectivity::{edge_connectivity, is_k_edge_connected};
use nzflow::cover::{build_anchored_chain_cover, z6_flow_family};
use nzflow::error::Error;
use nzflow::families::{make_family, parse_family_spec, FamilySpec};
use nzflow::flow::{is_nowhere_zero, validate_flow, Flow};
use nzflow::format::{parse_graph, serialize_graph};
use nzflow::group::GroupSpec;
use nzflow::trees::z4_flow_family;
use nzflow::Multigraph;
use report::{graph_digest, RunReport};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "nzflow", about = "Nowhere-zero flow generators with an exact census oracle")]
struct Cli {
    /// Worker threads for the census oracle (output is identical for any
    /// value).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Z6,
    Z4,
    Z3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CensusMode {
    Count,
    Poly,
    Enum,
}

#[derive(Args)]
struct GenArgs {
    variant: Variant,
    file: PathBuf,
    /// Generation cap.
    #[arg(long, default_value_t = 1 << 20)]
    limit: usize,
    /// Write flows here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Edge connectivity with a witnessing cut.
    Connectivity { file: PathBuf },
    /// Anchored chain cover summary.
    Cover { file: PathBuf },
    /// Generate nowhere-zero flows.
    Gen(GenArgs),
    /// Exact census: count, flow polynomial, or enumeration.
    Census {
        mode: CensusMode,
        file: PathBuf,
        /// One of z2, z3, z4, z6, z2xz2, z2xz3 (required for count/enum).
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 1 << 20)]
        limit: usize,
    },
    /// Run a generator, check its guaranteed bound and the census, and emit
    /// a structured report.
    Verify {
        variant: Variant,
        file: PathBuf,
        #[arg(long, default_value_t = 1 << 20)]
        limit: usize,
    },
    /// Emit a benchmark family as graph text.
    Family {
        /// e.g. `petersen`, `complete(5)`, `doubled_cycle(4)`,
        /// `cycle_with_d_doubled(6,2)`, `random_k_ec(5,6)`.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Family(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load(file: &PathBuf) -> Result<Multigraph, Error> {
    let text = std::fs::read_to_string(file).map_err(|io| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {io}", file.display()),
    })?;
    parse_graph(&text)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Connectivity { file } => {
            let g = load(&file)?;
            if g.n() < 2 {
                return Err(Error::Precondition(
                    "edge connectivity needs at least two vertices".into(),
                ));
            }
            let (value, cut) = edge_connectivity(&g);
            println!("edge_connectivity: {value}");
            println!(
                "cut_side: {}",
                cut.side.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            );
            println!(
                "cut_edges: {}",
                cut.crossing.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Cover { file } => {
            let g = load(&file)?;
            let cover = build_anchored_chain_cover(&g)?;
            let k = cover.chains.len();
            println!("chains: {k}");
            println!("cycles: {}", cover.p);
            println!("anchors: {}", 2 * (k - 1));
            println!("external: {}", cover.external.len());
            println!("even_anchor_subset: {}", cover.even_anchor_subset.len());
            println!("certified_flow_bound: {}", cover.certified_bound());
            for (i, chain) in cover.chains.iter().enumerate() {
                println!(
                    "chain {i}: kind={:?} vertices={:?} edges={:?}",
                    chain.kind, chain.vertices, chain.edges
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(args) => {
            let g = load(&args.file)?;
            let lines = generate(&g, args.variant, args.limit)?.1;
            emit(lines, args.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Census { mode, file, group, limit } => {
            let g = load(&file)?;
            match mode {
                CensusMode::Poly => {
                    let p = flow_polynomial(&g)?;
                    println!("flow_polynomial: {p}");
                    println!(
                        "coefficients_low_to_high: {}",
                        p.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
                    );
                }
                CensusMode::Count => {
                    let spec = required_group(group)?;
                    let count =
                        count_nz_flows_with(&g, spec, &CensusLimits::default(), cli.threads)?;
                    println!("count: {count}");
                }
                CensusMode::Enum => {
                    let spec = required_group(group)?;
                    for f in enumerate_nz_flows(&g, spec, limit)? {
                        println!("{}", f.serialize());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { variant, file, limit } => {
            let g = load(&file)?;
            let report = verify(&g, variant, limit, cli.threads)?;
            print!("{}", report.render());
            Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Family { spec, seed } => {
            let parsed = parse_family_spec(&spec, seed)?;
            let g = make_family(&parsed)?;
            if let FamilySpec::RandomKEc { n, k, seed } = parsed {
                let (_, attempts) = nzflow::families::random_k_ec(n, k, seed)?;
                println!("# random_k_ec attempts: {attempts}");
            }
            print!("{}", serialize_graph(&g));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn required_group(name: Option<String>) -> Result<GroupSpec, Error> {
    let name = name.ok_or_else(|| Error::Family("--group is required for this mode".into()))?;
    GroupSpec::from_name(&name)
}

/// Runs a generator and returns the flows plus their serialized lines.
fn generate(
    g: &Multigraph,
    variant: Variant,
    limit: usize,
) -> Result<(Vec<Flow>, Vec<String>), Error> {
    let flows: Vec<Flow> = match variant {
        Variant::Z6 => z6_flow_family(g, limit)?,
        Variant::Z4 => z4_flow_family(g, limit)?,
        Variant::Z3 => z3_flow_family(g, limit)?.into_iter().map(|o| o.to_flow()).collect(),
    };
    let lines = flows.iter().map(|f| f.serialize()).collect();
    Ok((flows, lines))
}

fn emit(lines: Vec<String>, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        None => {
            for l in lines {
                println!("{l}");
            }
            Ok(())
        }
        Some(path) => std::fs::write(path, lines.join("\n") + "\n").map_err(|io| {
            Error::Parse { line: 0, msg: format!("cannot write {}: {io}", path.display()) }
        }),
    }
}

fn verify(
    g: &Multigraph,
    variant: Variant,
    limit: usize,
    threads: usize,
) -> Result<RunReport, Error> {
    let start = Instant::now();
    let (n, m) = (g.n() as u64, g.m() as u64);
    let (bound, group, emitted, all_valid) = match variant {
        Variant::Z6 => {
            let bound = if is_k_edge_connected(g, 3) {
                guaranteed_bound(BoundVariant::Z6ThreeEc, n, m)
            } else {
                guaranteed_bound(BoundVariant::Z6TwoEc, n, m)
            };
            let flows = z6_flow_family(g, limit)?;
            let valid =
                flows.iter().all(|f| validate_flow(g, f).unwrap_or(false) && is_nowhere_zero(f));
            (bound, GroupSpec::Z2xZ3, flows.len(), valid)
        }
        Variant::Z4 => {
            let bound = guaranteed_bound(BoundVariant::Z4, n, m);
            let flows = z4_flow_family(g, limit)?;
            let valid =
                flows.iter().all(|f| validate_flow(g, f).unwrap_or(false) && is_nowhere_zero(f));
            (bound, GroupSpec::Z2xZ2, flows.len(), valid)
        }
        Variant::Z3 => {
            let bound = guaranteed_bound(BoundVariant::Z3, n, m);
            let orientations = z3_flow_family(g, limit)?;
            let beta = Boundary::zero(g.n());
            let valid =
                orientations.iter().all(|o| verify_beta_flow(g, o, &beta).unwrap_or(false));
            (bound, GroupSpec::Cyclic(3), orientations.len(), valid)
        }
    };
    let census = match count_nz_flows_with(g, group, &CensusLimits::default(), threads) {
        Ok(c) => Some(c),
        Err(Error::CensusCap { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        digest: graph_digest(g),
        variant: format!("{variant:?}").to_lowercase(),
        n: g.n(),
        m: g.m(),
        guaranteed_bound: bound,
        emitted_distinct: emitted,
        census,
        all_flows_valid: all_valid,
        wall_ms: start.elapsed().as_millis(),
    })
}

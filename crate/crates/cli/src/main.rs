use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use curvegraph::crofton::{crofton_ntc, heatmap_csv, mu_heatmap, Scheme};
use curvegraph::curvature::{circuit_curvature, curvature_report, CurvatureReport, Functional};
use curvegraph::double_cover::{double, euler_circuit, Circuit};
use curvegraph::geom::pi_multiple;
use curvegraph::minimizer::{catalog, flat_min, trivalent_formula_check, Family};
use curvegraph::projection::{FiberCount, Projector};
use curvegraph::vertex::{ntc_vertex_mc, vertex_report};
use curvegraph::{repro, CombinatorialGraph, Direction, Error, SpatialGraph, Vec3, VertexStar};

#[derive(Parser)]
#[command(name = "curvegraph", version, about = "Net total curvature of polygonal spatial graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Ntc,
    Tc,
    Ctc,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature totals of a graph.
    Ntc {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        functional: Which,
        /// Per-vertex terms.
        #[arg(long)]
        breakdown: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Vertex functionals of a tangent star.
    Vertex {
        /// Tangents as `x,y,z;x,y,z;...`.
        #[arg(long, allow_hyphen_values = true)]
        tangents: String,
        /// Add a Monte Carlo estimate of ntc.
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Critical points and mu of the height function along a direction.
    Mu {
        graph: PathBuf,
        /// Direction `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Levels `s1,s2,...` at which to count the fiber.
        #[arg(long, allow_hyphen_values = true)]
        levels: Option<String>,
    },
    /// Net total curvature as 2 pi times the average of mu.
    Crofton {
        graph: PathBuf,
        #[arg(long, default_value = "mc")]
        scheme: String,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// mu on a longitude/latitude grid, as CSV.
    Heatmap {
        graph: PathBuf,
        #[arg(long, default_value_t = 90)]
        resolution: usize,
    },
    /// Random Euler circuits of the doubled graph and their curvature.
    Doublecover {
        graph: PathBuf,
        #[arg(long, default_value_t = 10)]
        circuits: u64,
        #[arg(long)]
        nonreversing: bool,
        #[arg(long)]
        seed: u64,
    },
    /// Exhaustive minimum of mu over mappings to the line.
    Minimize {
        /// A graph document; with `--combinatorial`, a combinatorial graph document.
        graph: Option<PathBuf>,
        #[arg(long, conflicts_with = "graph")]
        family: Option<String>,
        #[arg(long)]
        combinatorial: bool,
        /// Also compare with pi (2B + k/2).
        #[arg(long)]
        trivalent: bool,
    },
    /// Known minima of named families.
    Catalog,
    /// Generate a family member.
    Gen {
        #[arg(long)]
        family: String,
        /// Emit the standard embedding instead of the combinatorial graph.
        #[arg(long)]
        embed: bool,
    },
    /// Rerun reproduction experiments: `all`, a number, or a key.
    Repro {
        #[arg(default_value = "all")]
        which: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Failure of a run: 1 for bad input, 2 for a failed numerical check.
enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::FiberIdentity { .. } => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Run = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SpatialGraph, Failure> {
    Ok(SpatialGraph::from_json(&read(path)?)?)
}

fn json<T: Serialize>(v: &T) -> Run {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parse_vec(s: &str) -> Result<Vec3, Failure> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("bad vector `{s}`")))?;
    match xs.as_slice() {
        &[x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(Failure::Input(format!("vector `{s}` needs three components"))),
    }
}

fn ntc_text(r: &CurvatureReport, which: Which, breakdown: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "graph {} ({} vertices, {} joints, connected: {})",
        r.graph,
        r.vertices.len(),
        r.joints,
        r.connected
    );
    if breakdown {
        for v in &r.vertices {
            let _ = writeln!(s, "  {:<12} d={:<3} ntc {:.9}  tc {:.9}  ctc {:.9}", v.id, v.degree, v.ntc, v.tc, v.ctc);
        }
    }
    let _ = writeln!(s, "joint_angle_sum = {:.9}", r.joint_angle_sum);
    if matches!(which, Which::Ctc | Which::All) {
        let _ = writeln!(s, "ctc_total = {:.9}", r.ctc_total);
    }
    if matches!(which, Which::Tc | Which::All) {
        let _ = writeln!(s, "tc_total = {:.9}", r.tc_total);
    }
    if matches!(which, Which::Ntc | Which::All) {
        let _ = writeln!(s, "ntc_total = {:.9}", r.ntc_total);
    }
    s
}

fn ntc_json(mut r: CurvatureReport, which: Which, breakdown: bool) -> Run {
    if !breakdown {
        r.vertices.clear();
    }
    let mut v = serde_json::to_value(&r).map_err(|e| Failure::Input(e.to_string()))?;
    let keep = match which {
        Which::All => None,
        Which::Ntc => Some(Functional::Ntc),
        Which::Tc => Some(Functional::Tc),
        Which::Ctc => Some(Functional::Ctc),
    };
    if let (Some(f), Some(obj)) = (keep, v.as_object_mut()) {
        for (name, g) in [("ntc_total", Functional::Ntc), ("tc_total", Functional::Tc), ("ctc_total", Functional::Ctc)]
        {
            if g != f {
                obj.remove(name);
            }
        }
    }
    json(&v)
}

#[derive(Serialize)]
struct MuReport {
    #[serde(flatten)]
    profile: curvegraph::projection::ProjectionProfile,
    two_pi_mu: String,
    perturbations: u64,
    fibers: Vec<FiberCount>,
}

#[derive(Serialize)]
struct CroftonReport {
    #[serde(flatten)]
    result: curvegraph::crofton::QuadratureResult,
    ntc_total: f64,
    tolerance: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct CircuitReport {
    seed: u64,
    components: usize,
    length: usize,
    nonreversing: bool,
    curvature: f64,
    half_curvature: f64,
    circuit: Circuit,
}

#[derive(Serialize)]
struct DoubleCoverReport {
    graph: String,
    ntc_total: f64,
    circuits: Vec<CircuitReport>,
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Ntc { graph, functional, breakdown, format } => {
            let r = curvature_report(&load(&graph)?);
            match format {
                Format::Text => Ok(ntc_text(&r, functional, breakdown)),
                Format::Json => ntc_json(r, functional, breakdown),
            }
        }
        Command::Vertex { tangents, mc_samples, seed } => {
            let ts: Vec<Vec3> =
                tangents.split(';').filter(|t| !t.trim().is_empty()).map(parse_vec).collect::<Result<_, _>>()?;
            let star = VertexStar::new("q", &ts)?;
            let mut r = vertex_report(&star);
            if let Some(n) = mc_samples {
                r.monte_carlo = Some(ntc_vertex_mc(&star, n, seed)?);
            }
            json(&r)
        }
        Command::Mu { graph, dir, levels } => {
            let g = load(&graph)?;
            let proj = Projector::new(&g);
            let resolved = proj.resolve(Direction::new(parse_vec(&dir)?)?)?;
            let profile = proj.profile(resolved.direction)?;
            let mut fibers = Vec::new();
            for s in levels.iter().flat_map(|l| l.split(',')) {
                let s: f64 = s.trim().parse().map_err(|_| Failure::Input(format!("bad level `{s}`")))?;
                fibers.push(proj.fiber_count(resolved.direction, s)?);
            }
            json(&MuReport {
                two_pi_mu: pi_multiple(profile.mu.doubled()),
                profile,
                perturbations: resolved.perturbations,
                fibers,
            })
        }
        Command::Crofton { graph, scheme, samples, seed } => {
            let g = load(&graph)?;
            let scheme: Scheme = scheme.parse()?;
            let result = crofton_ntc(&g, scheme, samples, seed)?;
            let direct = curvature_report(&g).ntc_total;
            let tolerance = (3.0 * result.stderr).max(0.01 * direct);
            let agrees = (result.estimate - direct).abs() <= tolerance;
            let out = json(&CroftonReport { result, ntc_total: direct, tolerance, agrees })?;
            if agrees {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Check("Crofton estimate differs from the direct total beyond tolerance".into()))
            }
        }
        Command::Heatmap { graph, resolution } => Ok(heatmap_csv(&mu_heatmap(&load(&graph)?, resolution)?)),
        Command::Doublecover { graph, circuits, nonreversing, seed } => {
            let g = load(&graph)?;
            let dg = double(&g.combinatorial());
            let mut out = Vec::new();
            for k in 0..circuits {
                let s = seed.wrapping_add(k);
                let c = euler_circuit(&dg, nonreversing, s)?;
                let curvature = circuit_curvature(&g, &c)?;
                out.push(CircuitReport {
                    seed: s,
                    components: c.components.len(),
                    length: c.len(),
                    nonreversing: c.is_nonreversing(),
                    curvature,
                    half_curvature: curvature / 2.0,
                    circuit: c,
                });
            }
            json(&DoubleCoverReport {
                graph: g.name().to_string(),
                ntc_total: curvature_report(&g).ntc_total,
                circuits: out,
            })
        }
        Command::Minimize { graph, family, combinatorial, trivalent } => {
            let cg = match (graph, family) {
                (_, Some(f)) => f.parse::<Family>()?.combinatorial()?,
                (Some(p), None) if combinatorial => serde_json::from_str::<CombinatorialGraph>(&read(&p)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
                    .and_then(|g| {
                        CombinatorialGraph::new(g.name(), g.vertex_names().to_vec(), g.edges().to_vec())
                            .map_err(Failure::from)
                    })?,
                (Some(p), None) => load(&p)?.combinatorial(),
                (None, None) => return Err(Failure::Input("give a graph file or --family".into())),
            };
            if trivalent {
                json(&trivalent_formula_check(&cg)?)
            } else {
                json(&flat_min(&cg)?)
            }
        }
        Command::Catalog => json(&catalog()),
        Command::Gen { family, embed } => {
            let f: Family = family.parse()?;
            if embed {
                Ok(f.embed()?.to_json())
            } else {
                json(&f.combinatorial()?)
            }
        }
        Command::Repro { which, format } => {
            let exps = if which == "all" { repro::run_all() } else { vec![repro::run(&which)?] };
            let out = match format {
                Format::Text => repro::render(&exps),
                Format::Json => json(&exps)?,
            };
            if exps.iter().all(|e| e.pass()) {
                Ok(out)
            } else {
                print!("{out}");
                let failed: Vec<&str> = exps.iter().filter(|e| !e.pass()).map(|e| e.key).collect();
                Err(Failure::Check(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("CURVEGRAPH_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Input(format!("CURVEGRAPH_THREADS=`{v}` is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        assert!(matches!(parse_vec("1, 2,3"), Ok(v) if v == Vec3::new(1.0, 2.0, 3.0)));
        assert!(parse_vec("1,2").is_err());
        assert!(parse_vec("a,b,c").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

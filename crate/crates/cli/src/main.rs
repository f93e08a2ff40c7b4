use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halftrans::admissible::pentagon_of_triangle;
use halftrans::draw::render_svg;
use halftrans::flow::direction_decomposition;
use halftrans::graph::{bounds_triangle, build_graph, graph_on};
use halftrans::rigidity::{
    check_triangle_preserving, derivative_of_iso, induced_vertex_map, orbits, GraphIso,
};
use halftrans::saddle::{from_id, Catalog};
use halftrans::triangulation::{complete_triangulation, flip_bfs};
use halftrans::{builtin, Error, Mat2, Scalar, Surface, Vec2};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "halftrans", version, about = "Saddle connection graphs of half-translation surfaces")]
struct Cli {
    #[command(flatten)]
    source: Source,
    /// Crossing budget for traces that are not length bounded.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Surface description file (JSON).
    #[arg(long, global = true)]
    surface: Option<PathBuf>,
    /// Built-in surface: square_torus, regular_octagon or L_shape_2x1.
    #[arg(long, global = true)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, marked points, stratum and area.
    Info,
    /// Saddle connections with squared length at most the bound, one JSON object per line.
    Enum {
        #[arg(long)]
        len2: String,
    },
    /// The truncated saddle connection graph.
    Graph {
        #[arg(long)]
        len2: String,
        #[arg(long, default_value = "jsonl")]
        format: String,
    },
    /// Distance between two connections inside the truncation.
    Distance {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        len2: String,
    },
    /// Greedy triangulation extending the given disjoint connections.
    Triangulate {
        /// Comma separated connection ids.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Flip graph around the greedy triangulation.
    Flips {
        #[arg(long)]
        depth: usize,
    },
    /// Cylinder decomposition in a direction.
    Cylinders {
        /// Direction as "x,y".
        #[arg(long)]
        dir: String,
    },
    /// Admissible pentagon or cylinder quadrilateral around a triangle.
    Pentagon {
        /// Three comma separated side ids.
        #[arg(long)]
        triangle: String,
    },
    /// Checks the graph map induced by a linear map.
    VerifyAffine {
        /// Matrix as "a,b;c,d".
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        len2: String,
    },
    /// Derivative of a supplied vertex map.
    Derivative {
        /// JSON object mapping source ids to target ids.
        #[arg(long)]
        iso: PathBuf,
        #[arg(long)]
        len2: String,
        /// Target ids live on the image of the surface under this matrix.
        #[arg(long)]
        target_matrix: Option<String>,
        #[arg(long, default_value_t = 200)]
        max_triangles: usize,
    },
    /// Vertex and edge orbits under affine generators.
    Orbits {
        /// JSON list of matrices, each "a,b;c,d" or [[a,b],[c,d]].
        #[arg(long)]
        generators: PathBuf,
        #[arg(long)]
        len2: String,
        #[arg(long, default_value = "4")]
        ambient_factor: String,
    },
    /// Histogram of edge wedges on the truncation.
    Wedges {
        #[arg(long)]
        len2: String,
    },
    /// SVG picture of the polygons with connections and cylinder bands.
    Draw {
        #[arg(long)]
        len2: Option<String>,
        #[arg(long)]
        dir: Option<String>,
    },
}

fn load(src: &Source) -> Result<Surface, Error> {
    match (&src.surface, &src.builtin) {
        (Some(p), None) => {
            let text = fs::read(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            Surface::parse(&text)
        }
        (None, Some(name)) => builtin(name),
        _ => Err(Error::InvalidArgument("give exactly one of --surface and --builtin".into())),
    }
}

fn positive(text: &str, s: &Surface, what: &str) -> Result<Scalar, Error> {
    let x = Scalar::parse(text, s.field_d())?;
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("{what} must be positive")));
    }
    Ok(x)
}

fn direction(text: &str, s: &Surface) -> Result<Vec2, Error> {
    let (x, y) = text.split_once(',').ok_or_else(|| Error::Parse(format!("direction {text:?} is not \"x,y\"")))?;
    let v = Vec2::new(Scalar::parse(x, s.field_d())?, Scalar::parse(y, s.field_d())?);
    if v.is_zero() {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    Ok(v)
}

fn read_json(p: &PathBuf) -> Result<serde_json::Value, Error> {
    let text = fs::read(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
    serde_json::from_slice(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn matrix_value(v: &serde_json::Value, d: u32) -> Result<Mat2, Error> {
    let entry = |x: &serde_json::Value| -> Result<String, Error> {
        match x {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            _ => Err(Error::Parse(format!("bad matrix entry {x}"))),
        }
    };
    match v {
        serde_json::Value::String(s) => Mat2::parse(s, d),
        serde_json::Value::Array(rows) if rows.len() == 2 => {
            let mut e = Vec::new();
            for r in rows {
                let r = r.as_array().filter(|r| r.len() == 2).ok_or_else(|| Error::Parse(format!("bad matrix {v}")))?;
                for x in r {
                    e.push(Scalar::parse(&entry(x)?, d)?);
                }
            }
            let [a, b, c, dd]: [Scalar; 4] = e.try_into().expect("four entries");
            Ok(Mat2::new(a, b, c, dd))
        }
        _ => Err(Error::Parse(format!("bad matrix {v}"))),
    }
}

fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string(x).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String, Error> {
    let s = load(&cli.source)?;
    let budget = Some(cli.budget);
    let cat = Catalog::new(&s);
    Ok(match &cli.command {
        Command::Info => to_json(&s.info()),
        Command::Enum { len2 } => {
            let l2 = positive(len2, &s, "len2")?;
            cat.enumerate(&l2).iter().map(|sc| to_json(&sc.record(&s))).collect()
        }
        Command::Graph { len2, format } => {
            let l2 = positive(len2, &s, "len2")?;
            build_graph(&cat, &l2).export(&s, format)?
        }
        Command::Distance { from, to, len2 } => {
            let l2 = positive(len2, &s, "len2")?;
            let g = build_graph(&cat, &l2);
            let d = g.distance(from, to)?;
            to_json(&json!({"from": from, "to": to, "len2": l2, "distance": d, "upper_bound": true}))
        }
        Command::Triangulate { seed } => {
            let seed = match seed {
                Some(ids) => ids.split(',').map(|id| from_id(&s, id.trim())).collect::<Result<Vec<_>, _>>()?,
                None => Vec::new(),
            };
            let mut out = complete_triangulation(&cat, &seed)?.to_json();
            out.push('\n');
            out
        }
        Command::Flips { depth } => {
            let t0 = complete_triangulation(&cat, &[])?;
            to_json(&flip_bfs(&s, &t0, *depth)?.0)
        }
        Command::Cylinders { dir } => to_json(&direction_decomposition(&s, &direction(dir, &s)?, budget)?),
        Command::Pentagon { triangle } => {
            let ids: Vec<&str> = triangle.split(',').map(str::trim).collect();
            let [a, b, c] = ids[..] else {
                return Err(Error::InvalidArgument("--triangle needs three ids".into()));
            };
            let (a, b, c) = (from_id(&s, a)?, from_id(&s, b)?, from_id(&s, c)?);
            let ws = bounds_triangle(&cat, &a, &b, &c)?;
            let w = ws.first().ok_or_else(|| Error::PreconditionViolated("the connections bound no triangle".into()))?;
            to_json(&pentagon_of_triangle(&s, w)?)
        }
        Command::VerifyAffine { matrix, len2 } => {
            let a = Mat2::parse(matrix, s.field_d())?;
            let l2 = positive(len2, &s, "len2")?;
            let iso = induced_vertex_map(&s, &a, &l2)?;
            let triangles = check_triangle_preserving(&iso, 200)?;
            let derivative = derivative_of_iso(&iso, 200).ok();
            to_json(&json!({
                "matrix": a,
                "len2": l2,
                "target_len2": iso.target.l2,
                "vertices": iso.vertex_map.len(),
                "report": iso.report,
                "triangles": triangles,
                "derivative": derivative,
                "map": iso.id_map(),
            }))
        }
        Command::Derivative { iso, len2, target_matrix, max_triangles } => {
            let l2 = positive(len2, &s, "len2")?;
            let raw: BTreeMap<String, String> = serde_json::from_value(read_json(iso)?)
                .map_err(|e| Error::Parse(format!("iso file: {e}")))?;
            let source = build_graph(&cat, &l2);
            let target_surface = match target_matrix {
                Some(m) => s.apply_matrix(&Mat2::parse(m, s.field_d())?)?,
                None => s.clone(),
            };
            let mut images = Vec::new();
            for v in &source.vertices {
                let id = raw.get(&v.id).ok_or_else(|| Error::UnknownVertex(v.id.clone()))?;
                images.push(from_id(&target_surface, id)?);
            }
            images.sort_by(|x, y| x.canonical_cmp(y));
            images.dedup_by(|x, y| x.id == y.id);
            let target = graph_on(&target_surface, l2.clone(), images);
            let iso = GraphIso::from_map(&s, source, &target_surface, target, &raw)?;
            let d = derivative_of_iso(&iso, *max_triangles)?;
            to_json(&json!({"report": iso.report, "derivative": d}))
        }
        Command::Orbits { generators, len2, ambient_factor } => {
            let l2 = positive(len2, &s, "len2")?;
            let k = positive(ambient_factor, &s, "ambient-factor")?;
            let list = read_json(generators)?;
            let gens = list
                .as_array()
                .ok_or_else(|| Error::Parse("generator file must hold a JSON list".into()))?
                .iter()
                .map(|m| matrix_value(m, s.field_d()))
                .collect::<Result<Vec<_>, _>>()?;
            let g = build_graph(&cat, &l2);
            to_json(&orbits(&s, &g, &gens, &k)?)
        }
        Command::Wedges { len2 } => {
            let l2 = positive(len2, &s, "len2")?;
            let g = build_graph(&cat, &l2);
            let mut hist: BTreeMap<Scalar, usize> = BTreeMap::new();
            for (i, j) in g.edge_list() {
                let w = g.vertices[i].holonomy.cross(&g.vertices[j].holonomy).abs();
                *hist.entry(w).or_insert(0) += 1;
            }
            let values: Vec<_> = hist.iter().map(|(w, n)| json!({"wedge": w, "count": n})).collect();
            to_json(&json!({"len2": l2, "edges": g.num_edges(), "distinct": hist.len(), "values": values}))
        }
        Command::Draw { len2, dir } => {
            let scs = match len2 {
                Some(l) => cat.enumerate(&positive(l, &s, "len2")?),
                None => Vec::new(),
            };
            let dec = match dir {
                Some(d) => Some(direction_decomposition(&s, &direction(d, &s)?, budget)?),
                None => None,
            };
            render_svg(&s, &scs, dec.as_ref())
        }
    })
}

fn fail(code: &str, detail: &str) {
    eprintln!("{}", json!({"error": code, "detail": detail}));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout(), "{e}");
                return ExitCode::SUCCESS;
            }
            fail("UsageError", e.render().to_string().trim());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Some(p) = &cli.output {
                if let Err(e) = fs::write(p, out) {
                    fail("IoError", &format!("{}: {e}", p.display()));
                    return ExitCode::from(1);
                }
            } else {
                // A closed pipe (`| head`) is not an error worth reporting.
                let _ = std::io::stdout().write_all(out.as_bytes());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            fail(e.code(), &e.to_string());
            ExitCode::from(1)
        }
    }
}


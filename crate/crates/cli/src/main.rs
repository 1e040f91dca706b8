use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use raag_core::blowup::DEFAULT_REGION_CAP;
use raag_core::classify::{cross_check_classification, kind_name, report_json};
use raag_core::metric::{self, MetricStructure, DEFAULT_TOL};
use raag_core::partition::{compatible, enumerate_all_partitions_capped, PartitionJson};
use raag_core::shear::build_shear_system;
use raag_core::{BlowupComplex, DefiningGraph, Error, PartitionFamily, VertexSet, WPartition};

#[derive(Parser)]
#[command(name = "raag", version, about = "Whitehead partitions and Salvetti blowups of right-angled Artin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vertex orders, fold classes and twist-dominant generators of a graph.
    GraphInfo(Common),
    /// The canonical list of Whitehead partitions with compatibilities.
    Partitions(Common),
    /// Build the blowup of the selected partitions.
    Blowup(Selected),
    /// Collapse one member of the family and compare with the smaller blowup.
    Collapse {
        #[command(flatten)]
        sel: Selected,
        /// Position of the member within the selection.
        #[arg(long)]
        member: usize,
    },
    /// Classify every hyperplane as twist-minimal or twist-dominant.
    Classify(Selected),
    /// Structure equations for shearings and the dimension of their solutions.
    Fiber(Selected),
    /// Straighten a parallelotope structure to an orthotope one.
    Straighten {
        #[command(flatten)]
        sel: Selected,
        /// Metric JSON; the standard structure is used when omitted.
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
    },
}

#[derive(Args)]
struct Common {
    /// Graph JSON: {"vertices": [...], "edges": [[u, v], ...]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Enumeration cap for partitions and regions.
    #[arg(long, default_value_t = DEFAULT_REGION_CAP, value_parser = parse_cap)]
    cap: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Selected {
    #[command(flatten)]
    common: Common,
    /// Indices into the canonical enumeration (`0,3` or `Q0,Q3`), or an
    /// inline JSON array of partitions.
    #[arg(long, default_value = "")]
    partitions: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("cap must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::CapExceeded { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read(path: &Path) -> raag_core::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_graph(c: &Common) -> raag_core::Result<DefiningGraph> {
    DefiningGraph::from_json(&read(&c.input)?)
}

fn emit(c: &Common, text: String) -> raag_core::Result<()> {
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    match &c.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidGraph(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn no_dot(c: &Common) -> raag_core::Result<()> {
    if c.format == Format::Dot {
        return Err(Error::Parse("dot output is only available for blowup and collapse".into()));
    }
    Ok(())
}

fn names(g: &DefiningGraph, s: VertexSet) -> Vec<String> {
    g.set_names(s)
}

fn braces(g: &DefiningGraph, s: VertexSet) -> String {
    format!("{{{}}}", names(g, s).join(","))
}

/// Resolves a selector against the canonical enumeration.
fn select(g: &DefiningGraph, sel: &Selected) -> raag_core::Result<PartitionFamily> {
    let selector = sel.partitions.trim();
    let cap = sel.common.cap;
    let members: Vec<WPartition> = if selector.starts_with('[') {
        let raw: Vec<PartitionJson> = serde_json::from_str(selector)?;
        raw.iter().map(|p| WPartition::from_json(g, p)).collect::<raag_core::Result<_>>()?
    } else if selector.is_empty() {
        Vec::new()
    } else {
        let all = enumerate_all_partitions_capped(g, cap)?;
        selector.split(',')
            .map(|tok| {
                let tok = tok.trim();
                let digits = tok.strip_prefix(['Q', 'q']).unwrap_or(tok);
                let i: usize = digits.parse().map_err(|_| Error::Parse(format!("bad partition selector `{tok}`")))?;
                all.get(i).cloned().ok_or(Error::IndexOutOfRange { index: i, len: all.len() })
            })
            .collect::<raag_core::Result<_>>()?
    };
    PartitionFamily::new(g.clone(), members).map_err(|e| match e {
        Error::Incompatible(i, j) => Error::InvalidPartition(format!(
            "selected partitions {} and {} are not compatible",
            token(selector, i),
            token(selector, j)
        )),
        other => other,
    })
}

fn token(selector: &str, i: usize) -> String {
    if selector.starts_with('[') {
        format!("#{i}")
    } else {
        selector.split(',').nth(i).map(|s| s.trim().to_string()).unwrap_or_default()
    }
}

fn build(sel: &Selected) -> raag_core::Result<BlowupComplex> {
    let g = load_graph(&sel.common)?;
    let fam = select(&g, sel)?;
    BlowupComplex::build_capped(&fam, sel.common.cap)
}

fn counts_line(counts: &[usize], euler: i64) -> String {
    let at = |k: usize| counts.get(k).copied().unwrap_or(0);
    let mut s = format!("vertices={} edges={} squares={} euler={euler}", at(0), at(1), at(2));
    if counts.len() > 3 {
        let rest: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        write!(s, " cubes={}", rest.join(",")).unwrap();
    }
    s
}

fn run(cmd: Command) -> raag_core::Result<()> {
    match cmd {
        Command::GraphInfo(c) => graph_info(&c),
        Command::Partitions(c) => partitions(&c),
        Command::Blowup(sel) => blowup(&sel),
        Command::Collapse { sel, member } => collapse(&sel, member),
        Command::Classify(sel) => classify(&sel),
        Command::Fiber(sel) => fiber(&sel),
        Command::Straighten { sel, metric, samples } => straighten(&sel, metric.as_deref(), samples as usize),
    }
}

fn fold_classes(g: &DefiningGraph) -> Vec<VertexSet> {
    let mut seen = VertexSet::default();
    let mut out = Vec::new();
    for &v in g.total_order() {
        if !seen.contains(v) {
            let c = g.fold_class(v);
            seen = seen.union(c);
            out.push(c);
        }
    }
    out
}

fn graph_info(c: &Common) -> raag_core::Result<()> {
    no_dot(c)?;
    let g = load_graph(c)?;
    let order: Vec<&str> = g.total_order().iter().map(|&v| g.name(v)).collect();
    let classes = fold_classes(&g);
    let dominant = g.twist_dominant_set();
    let text = match c.format {
        Format::Json => {
            let vertices: Vec<Value> = g
                .vertices()
                .map(|v| {
                    let r = g.relations(v);
                    json!({
                        "name": g.name(v),
                        "link": names(&g, r.link),
                        "star": names(&g, r.star),
                        "leqF": names(&g, r.leq_f),
                        "leqT": names(&g, r.leq_t),
                        "upperLink": names(&g, r.lk_plus),
                        "upperFold": names(&g, r.uf),
                        "foldClass": names(&g, r.fold_class),
                        "twistDominant": r.twist_dominant,
                    })
                })
                .collect();
            pretty(&json!({
                "vertices": vertices,
                "foldClasses": classes.iter().map(|&s| names(&g, s)).collect::<Vec<_>>(),
                "twistDominant": names(&g, dominant),
                "totalOrder": order,
            }))
        }
        _ => {
            let mut s = String::new();
            for v in g.vertices() {
                let r = g.relations(v);
                writeln!(
                    s,
                    "{}: link={} leqF={} leqT={} upperLink={} upperFold={} kind={}",
                    g.name(v),
                    braces(&g, r.link),
                    braces(&g, r.leq_f),
                    braces(&g, r.leq_t),
                    braces(&g, r.lk_plus),
                    braces(&g, r.uf),
                    kind_name(g.classify_vertex(v)),
                )
                .unwrap();
            }
            let shown: Vec<String> = classes.iter().map(|&s| braces(&g, s)).collect();
            writeln!(s, "fold classes: {}", shown.join(" ")).unwrap();
            writeln!(s, "twist-dominant: {}", braces(&g, dominant)).unwrap();
            writeln!(s, "order: {}", order.join(" ")).unwrap();
            s
        }
    };
    emit(c, text)
}

fn partitions(c: &Common) -> raag_core::Result<()> {
    no_dot(c)?;
    let g = load_graph(c)?;
    let all = enumerate_all_partitions_capped(&g, c.cap)?;
    let compat: Vec<Vec<bool>> = all
        .iter()
        .enumerate()
        .map(|(i, p)| all.iter().enumerate().map(|(j, q)| i != j && compatible(&g, p, q)).collect())
        .collect();
    let text = match c.format {
        Format::Json => {
            let list: Vec<Value> = all
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    json!({
                        "name": format!("Q{i}"),
                        "partition": p.to_json(&g),
                        "shown": p.display(&g),
                        "sing": names(&g, p.sing()),
                        "max": names(&g, p.max_of(&g)),
                    })
                })
                .collect();
            pretty(&json!({ "partitions": list, "compatible": compat }))
        }
        _ => {
            let mut s = format!("partitions={}\n", all.len());
            for (i, p) in all.iter().enumerate() {
                let with: Vec<String> = (0..all.len()).filter(|&j| compat[i][j]).map(|j| format!("Q{j}")).collect();
                writeln!(
                    s,
                    "Q{i} {} sing={} max={} compatible=[{}]",
                    p.display(&g),
                    braces(&g, p.sing()),
                    braces(&g, p.max_of(&g)),
                    with.join(",")
                )
                .unwrap();
            }
            s
        }
    };
    emit(c, text)
}

fn blowup(sel: &Selected) -> raag_core::Result<()> {
    let b = build(sel)?;
    let text = match sel.common.format {
        Format::Json => b.to_json(),
        Format::Dot => b.to_dot(),
        Format::Text => counts_line(&b.cube_counts(), b.euler_characteristic()),
    };
    emit(&sel.common, text)
}

fn collapse(sel: &Selected, member: usize) -> raag_core::Result<()> {
    let b = build(sel)?;
    let col = b.collapse(member)?;
    let small = &col.complex;
    let text = match sel.common.format {
        Format::Json => pretty(&json!({
            "member": format!("Q{member}"),
            "quotientCubeCounts": col.quotient.cube_counts(),
            "vertexMap": col.vertex_map,
            "result": small.to_json_value(),
        })),
        Format::Dot => small.to_dot(),
        Format::Text => format!(
            "collapsed Q{member}: {}\nisomorphic=true",
            counts_line(&small.cube_counts(), small.euler_characteristic())
        ),
    };
    emit(&sel.common, text)
}

fn classify(sel: &Selected) -> raag_core::Result<()> {
    no_dot(&sel.common)?;
    let b = build(sel)?;
    let table = cross_check_classification(&b)?;
    let fam = b.family();
    let text = match sel.common.format {
        Format::Json => serde_json::to_string_pretty(&report_json(&b, &table)).expect("report serializes"),
        _ => {
            let mut s = String::new();
            for row in &table {
                let fold: Vec<String> = row.fold_class.iter().map(|&l| fam.label_name(l)).collect();
                writeln!(
                    s,
                    "{} {} foldClass={{{}}} cyclic={}",
                    fam.label_name(row.label),
                    kind_name(row.kind),
                    fold.join(","),
                    row.cyclic
                )
                .unwrap();
            }
            s
        }
    };
    emit(&sel.common, text)
}

fn fiber(sel: &Selected) -> raag_core::Result<()> {
    no_dot(&sel.common)?;
    let b = build(sel)?;
    let sys = build_shear_system(&b);
    let text = match sel.common.format {
        Format::Json => sys.to_json(&b),
        _ => {
            let fam = b.family();
            let g = b.graph();
            let mut s = format!("fiberDim={}\n", sys.fiber_dimension());
            let cols: Vec<String> =
                sys.columns.iter().map(|&(h, w)| format!("({},{})", fam.label_name(h), g.name(w))).collect();
            writeln!(s, "columns: {}", cols.join(" ")).unwrap();
            for k in &sys.kernel {
                let entries: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                writeln!(s, "basis: [{}]", entries.join(", ")).unwrap();
            }
            s
        }
    };
    emit(&sel.common, text)
}

fn straighten(sel: &Selected, metric_path: Option<&Path>, samples: usize) -> raag_core::Result<()> {
    no_dot(&sel.common)?;
    let b = build(sel)?;
    let fam = b.family();
    let f = match metric_path {
        Some(p) => MetricStructure::from_json(fam, &read(p)?)?,
        None => MetricStructure::standard(&b),
    };
    let path = metric::straightening_path_with_tol(&b, &f, samples, sel.common.tol)?;
    let text = match sel.common.format {
        Format::Json => {
            let states: Vec<Value> = path
                .iter()
                .map(|st| {
                    json!({
                        "t": st.t,
                        "metric": st.structure.to_json_value(fam),
                        "maxNormalOverlap": st.max_normal_overlap,
                        "maxNormDrift": st.max_norm_drift,
                    })
                })
                .collect();
            pretty(&json!({ "samples": states }))
        }
        _ => {
            let mut s = String::new();
            for st in &path {
                let angles: Vec<String> = st
                    .structure
                    .angles()
                    .iter()
                    .map(|(&(x, y), &r)| format!("{}:{}={r:.6}", fam.label_name(x), fam.label_name(y)))
                    .collect();
                writeln!(
                    s,
                    "t={:.4} overlap={:.3e} drift={:.3e} angles=[{}]",
                    st.t,
                    st.max_normal_overlap,
                    st.max_norm_drift,
                    angles.join(" ")
                )
                .unwrap();
            }
            s
        }
    };
    emit(&sel.common, text)
}

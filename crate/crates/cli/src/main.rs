use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nodal_core::abel::{abel0, abel1, fiber_partition, gen_genus, image_curve};
use nodal_core::curve::{Curve, Subcurve};
use nodal_core::dot::{curve_dot, image_dot};
use nodal_core::error::Error;
use nodal_core::format::parse_curve_file;
use nodal_core::par::{with_jobs, Execution};
use nodal_core::point::PointOnCurve;
use nodal_core::random::{corpus, RandomCurveConfig};
use nodal_core::sequiv::{collapse_analysis, jh_filtration, s_invariants, AbelData, SClass};
use nodal_core::sheaf::{format_divisor, parse_divisor, CombSheaf};
use nodal_core::stability::{classify, parse_weights, seshadri_classify, StabilityContext, StabilityReport};
use nodal_core::structure::{
    basepoint_off_small_tails, maximal_line_trees, parse_choices, separating_lines, separating_nodes,
    small_tails, tails, ChoiceTag, TailTable,
};
use nodal_core::verify::{default_base, verify_curve, SuiteOptions};

#[derive(Parser)]
#[command(name = "nodal", version, about = "Abel maps and stability on nodal curves given by dual graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genera, bridges, tails, splitting nodes, separating lines.
    Analyze(Common),
    /// Classify a sheaf, or every Abel sheaf, against the degree-d inequality.
    Stability(Common),
    /// Print Abel sheaves.
    Abel(Common),
    /// The image of the Abel map with its singular points.
    Image(Common),
    /// Jordan–Hölder data and where the S-map collapses the Abel image.
    Sequiv(Common),
    /// Run the theorem suite on a curve or on seeded random curves.
    Verify(VerifyArgs),
    /// Graphviz output for the dual graph or the Abel image.
    ExportDot(DotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Lines,
    Dot,
}

#[derive(Args)]
struct Common {
    /// curve file
    curve: PathBuf,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    degree: i64,
    /// base point: a label, gen:<vertex>, or node:<edge>
    #[arg(long)]
    base: Option<String>,
    /// the point Q of an Abel sheaf
    #[arg(long)]
    at: Option<String>,
    /// small-tail choice at a splitting node, e.g. e=v1
    #[arg(long = "choice")]
    choices: Vec<String>,
    /// Seshadri weights, e.g. a=v1:1/3,v2:2/3
    #[arg(long)]
    weights: Option<String>,
    /// a line bundle given by its divisor, e.g. "P - Q"
    #[arg(long, allow_hyphen_values = true)]
    divisor: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// curve file; omit to run on random curves
    curve: Option<PathBuf>,
    /// number of random curves when no file is given
    #[arg(long, default_value_t = 50)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_vertices: usize,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct DotArgs {
    curve: PathBuf,
    /// draw the Abel image instead of the dual graph
    #[arg(long)]
    image: bool,
    #[arg(long = "choice")]
    choices: Vec<String>,
}

enum Failure {
    Input(Error),
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn execution(jobs: Option<usize>) -> Execution {
    if jobs == Some(1) {
        Execution::Sequential
    } else {
        Execution::available()
    }
}

fn list(curve: &Curve, s: Subcurve) -> String {
    s.iter().map(|v| curve.vertex(v).id.as_str()).collect::<Vec<_>>().join(",")
}

fn base_point(curve: &Curve, base: Option<&str>) -> Result<PointOnCurve, Error> {
    match base {
        Some(b) => {
            let p = curve.parse_point(b)?;
            if p.vertex().is_none() {
                return Err(Error::BaseNotSmooth);
            }
            Ok(p)
        }
        None => Ok(default_base(curve)),
    }
}

fn table(curve: &Curve, choices: &[String]) -> Result<TailTable, Error> {
    small_tails(curve, &parse_choices(curve, choices)?)
}

type Labeled = Vec<(String, CombSheaf)>;

/// The sheaves selected by the options, each with a label, and any notes.
fn selected_sheaves(curve: &Curve, o: &Common) -> Result<(Labeled, Vec<String>), Error> {
    let mut notes = Vec::new();
    if let Some(d) = &o.divisor {
        let s = parse_divisor(curve, d)?;
        return Ok((vec![(d.clone(), s)], notes));
    }
    let points = match &o.at {
        Some(q) => vec![curve.parse_point(q)?],
        None => curve.point_classes(),
    };
    let sheaves = match o.degree {
        0 => {
            let p = base_point(curve, o.base.as_deref())?;
            points
                .iter()
                .map(|q| Ok((q.describe(curve), abel0(curve, &p, q)?)))
                .collect::<Result<Vec<_>, Error>>()?
        }
        1 if curve.is_gstable() => {
            let t = table(curve, &o.choices)?;
            points
                .iter()
                .map(|q| Ok((q.describe(curve), abel1(curve, &t, q)?)))
                .collect::<Result<Vec<_>, Error>>()?
        }
        1 => {
            notes.push("note: curve is not G-stable; small tails are undefined, classifying untwisted dual ideal sheaves".into());
            points
                .iter()
                .map(|q| Ok((q.describe(curve), CombSheaf::ideal_sheaf(curve, q).dual(curve)?)))
                .collect::<Result<Vec<_>, Error>>()?
        }
        d => return Err(Error::Usage(format!("degree {d} needs --divisor"))),
    };
    Ok((sheaves, notes))
}

fn context<'a>(curve: &'a Curve, o: &Common) -> Result<StabilityContext<'a>, Error> {
    let mut ctx = StabilityContext::new(curve, o.degree)?.with_execution(execution(o.jobs));
    let base = match (&o.base, o.degree) {
        (Some(b), _) => Some(base_point(curve, Some(b))?),
        (None, 0) => Some(default_base(curve)),
        (None, 1) if curve.is_gstable() => {
            let v = basepoint_off_small_tails(curve, &table(curve, &o.choices)?)?;
            Some(PointOnCurve::Smooth {
                vertex: v,
                symbol: curve.generic(v),
            })
        }
        _ => curve.declared_base()?,
    };
    if let Some(p) = base {
        ctx = ctx.with_base_point(&p)?;
    }
    if let Some(w) = &o.weights {
        ctx = ctx.with_weights(parse_weights(curve, w)?)?;
    }
    Ok(ctx)
}

fn analyze(o: &Common) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    println!("vertices: {}  edges: {}  genus: {}", curve.num_vertices(), curve.num_edges(), curve.genus());
    println!("G-stable: {}", if curve.is_gstable() { "yes" } else { "no" });
    for v in 0..curve.num_vertices() {
        let y = Subcurve::singleton(v);
        println!(
            "  {}  genus={} delta={} omega={}",
            curve.vertex(v).id,
            curve.vertex(v).genus,
            curve.delta(y)?,
            curve.omega_degree(y)?
        );
    }
    let bridges: Vec<&str> = separating_nodes(&curve).iter().map(|&e| curve.edge(e).id.as_str()).collect();
    println!("separating nodes: {{{}}}", bridges.join(","));
    for t in tails(&curve, None, None) {
        println!("  tail {} at {}  genus={}", curve.fmt_subcurve(t.vertices), curve.edge(t.bridge).id, curve.genus_of(Some(t.vertices))?);
    }
    println!("separating lines: {}", curve.fmt_subcurve(separating_lines(&curve)));
    for t in maximal_line_trees(&curve) {
        let att: Vec<&str> = t.attachments.iter().map(|&e| curve.edge(e).id.as_str()).collect();
        println!("  line tree {} attached at {{{}}}", curve.fmt_subcurve(t.vertices), att.join(","));
    }
    if curve.is_gstable() {
        let t = table(&curve, &o.choices)?;
        for e in &t.entries {
            let tag = match e.choice {
                ChoiceTag::Forced => "",
                ChoiceTag::Default => " splitting (default choice)",
                ChoiceTag::User => " splitting (chosen)",
            };
            println!("  small tail {} at {}{tag}", curve.fmt_subcurve(e.small.vertices), curve.edge(e.bridge).id);
        }
        let v = basepoint_off_small_tails(&curve, &t)?;
        println!("base off small tails: gen:{}", curve.vertex(v).id);
    }
    Ok(())
}

fn print_report(curve: &Curve, label: &str, rep: &StabilityReport, format: Format, prefix: bool) {
    match format {
        Format::Lines => {
            for w in &rep.witnesses {
                let head = if prefix { format!("Q={label} ") } else { String::new() };
                println!("{head}Y={} margin={}/{}", list(curve, w.sub), w.margin.numer(), w.margin.denom());
            }
        }
        _ => {
            let pq = match rep.p_quasistable {
                Some(true) => "  P-quasistable",
                Some(false) => "  not P-quasistable",
                None => "",
            };
            println!("{label}: {}{pq}", rep.classification);
            for w in &rep.witnesses {
                println!("  {} margin {}", curve.fmt_subcurve(w.sub), w.margin);
            }
        }
    }
}

fn stability(o: &Common) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    let ctx = context(&curve, o)?;
    let (sheaves, notes) = selected_sheaves(&curve, o)?;
    if o.format != Format::Lines {
        for n in notes {
            println!("{n}");
        }
    }
    let prefix = sheaves.len() > 1;
    with_jobs(o.jobs, || -> Outcome {
        for (label, s) in &sheaves {
            let rep = if ctx.weights.is_some() { seshadri_classify(s, &ctx)? } else { classify(s, &ctx)? };
            print_report(&curve, label, &rep, o.format, prefix);
        }
        Ok(())
    })
}

fn abel(o: &Common) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    let (sheaves, notes) = selected_sheaves(&curve, o)?;
    for n in notes {
        println!("{n}");
    }
    for (label, s) in &sheaves {
        println!("Q = {label}");
        println!("{}", s.display(&curve));
    }
    Ok(())
}

fn image(o: &Common) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    let im = image_curve(&curve)?;
    if o.format == Format::Dot {
        print!("{}", image_dot(&im));
        return Ok(());
    }
    print!("{im}");
    println!("genus: {}", gen_genus(&im)?);
    for b in fiber_partition(&curve)? {
        if b.len() > 1 {
            let names: Vec<String> = b.iter().map(|q| q.describe(&curve)).collect();
            println!("fiber: {}", names.join(" "));
        }
    }
    Ok(())
}

fn print_sclass(curve: &Curve, sc: &SClass) {
    for p in &sc.gr {
        let local = &p.curve.curve;
        let parts: Vec<String> = (0..local.num_vertices())
            .map(|v| format!("{}: {}", local.vertex(v).id, format_divisor(p.sheaf.divisor(v))))
            .collect();
        println!("  piece {}  [{}]", curve.fmt_subcurve(p.part), parts.join("; "));
    }
}

fn sequiv(o: &Common) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    let ctx = context(&curve, o)?;
    if o.at.is_some() || o.divisor.is_some() {
        let (sheaves, _) = selected_sheaves(&curve, o)?;
        for (label, s) in &sheaves {
            let chain = jh_filtration(s, &ctx)?;
            let names: Vec<String> = chain.iter().map(|y| curve.fmt_subcurve(*y)).collect();
            println!("{label}: filtration [{}]", names.join(" ⊂ "));
            print_sclass(&curve, &s_invariants(s, &ctx)?);
        }
    }
    let data = match o.degree {
        0 => AbelData::Degree0 { base: base_point(&curve, o.base.as_deref())? },
        1 => AbelData::Degree1 { table: table(&curve, &o.choices)? },
        _ => return Ok(()),
    };
    let r = collapse_analysis(&curve, &data)?;
    println!("collapse, degree {}: {} fibers, {} S-classes", r.degree, r.blocks.len(), r.classes.len());
    for class in r.merges() {
        let names: Vec<String> = class.iter().flat_map(|&b| r.blocks[b].iter().map(|q| q.describe(&curve))).collect();
        println!("  merged: {}", names.join(" "));
    }
    for (a, b) in &r.unknown_pairs {
        println!("  undecided: {} vs {}", r.blocks[*a][0].describe(&curve), r.blocks[*b][0].describe(&curve));
    }
    for v in &r.violations {
        println!("  violation: {v}");
    }
    if r.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

fn verify(o: &VerifyArgs) -> Outcome {
    let opts = SuiteOptions {
        execution: execution(o.jobs),
        ..Default::default()
    };
    let curves = match &o.curve {
        Some(p) => vec![parse_curve_file(p)?],
        None => corpus(o.seed, o.random, &RandomCurveConfig { max_vertices: o.max_vertices, ..Default::default() }),
    };
    let mut bad = 0;
    with_jobs(o.jobs, || -> Outcome {
        for (i, c) in curves.iter().enumerate() {
            let r = verify_curve(c, &opts)?;
            if o.curve.is_some() {
                print!("{r}");
            } else if !r.ok() {
                println!("curve {i} (seed {}):\n{}{r}", o.seed, nodal_core::format::print_curve(c));
            }
            if !r.ok() {
                bad += 1;
            }
        }
        Ok(())
    })?;
    println!("{} curve(s), {bad} with violations", curves.len());
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

fn export_dot(o: &DotArgs) -> Outcome {
    let curve = parse_curve_file(&o.curve)?;
    if o.image {
        print!("{}", image_dot(&image_curve(&curve)?));
    } else {
        let t = if curve.is_gstable() { Some(table(&curve, &o.choices)?) } else { None };
        print!("{}", curve_dot(&curve, t.as_ref()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(o) => analyze(o),
        Command::Stability(o) => stability(o),
        Command::Abel(o) => abel(o),
        Command::Image(o) => image(o),
        Command::Sequiv(o) => sequiv(o),
        Command::Verify(o) => verify(o),
        Command::ExportDot(o) => export_dot(o),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

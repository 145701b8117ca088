use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use evalexpr::{ContextWithMutableVariables, HashMapContext, Value};

use sem_fourier::cases::{AnalyticCase, BurgersParams};
use sem_fourier::cubature::{cubature_transform, TrigGrid};
use sem_fourier::harness::{convergence_surface, spectrum_decay_profile, Profile};
use sem_fourier::transform::{fmt_f64, transform_with, Summation};
use sem_fourier::{Error, GllRule, Mesh, NodalField, Result, Spectrum, TransformPlan, WaveSet};

#[derive(Parser)]
#[command(name = "semft", version, about = "Exact Fourier coefficients of spectral-element fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print GLL nodes and weights.
    Gll {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print B_0(r)..B_P(r) as CSV.
    Bessel {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long)]
        pmax: usize,
    },
    #[command(subcommand)]
    Mesh(MeshCommand),
    #[command(subcommand)]
    Field(FieldCommand),
    #[command(subcommand)]
    Case(CaseCommand),
    /// Exact transform of a field.
    Transform {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 16)]
        qmax: i64,
        /// Wavevectors, one per line as comma-separated integers; overrides --qmax.
        #[arg(long)]
        qlist: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        compensated: bool,
    },
    /// Trigonometric cubature of the assembled field on an M^d grid.
    Cubature {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long = "M")]
        points: usize,
        #[arg(long, default_value_t = 16)]
        qmax: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error surface over uniform 1D meshes, K = 1, 2, 4, .. Kmax and P = 1..Pmax.
    Converge {
        #[arg(long)]
        case: String,
        #[arg(long = "Kmax", default_value_t = 64)]
        kmax: usize,
        #[arg(long = "Pmax", default_value_t = 10)]
        pmax: usize,
        #[arg(long, default_value_t = 16)]
        qmax: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay profile of a spectrum CSV.
    Decay {
        #[arg(long)]
        spectrum: PathBuf,
        /// `shell-max` or an integer vector such as `1,2`.
        #[arg(long, default_value = "shell-max")]
        direction: String,
        #[arg(long, default_value_t = 0)]
        component: usize,
        /// Magnitudes at or below this are left out of the slope fit.
        #[arg(long, default_value_t = 1e-14)]
        floor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Uniform mesh of n^d boxes.
    Uniform {
        #[arg(long)]
        d: usize,
        #[arg(long = "K-per-axis")]
        per_axis: usize,
        #[arg(long = "P")]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split every element whose tail indicator exceeds the tolerance.
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Sample an analytic case or expressions in x, y, z at the mesh nodes.
    Sample {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, conflicts_with = "expr")]
        case: Option<String>,
        /// One expression per component, e.g. `math::sin(x) * y`.
        #[arg(long, required_unless_present = "case")]
        expr: Vec<String>,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CaseCommand {
    List,
    Sample {
        #[arg(long)]
        name: String,
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CaseParams {
    /// Degree for the Legendre case.
    #[arg(long)]
    p: Option<usize>,
    /// Burgers wavevector.
    #[arg(long, default_value = "1,2")]
    l: String,
    /// Burgers time.
    #[arg(long)]
    time: Option<f64>,
    /// Burgers viscosity.
    #[arg(long)]
    viscosity: Option<f64>,
}

impl CaseParams {
    fn build(&self, name: &str) -> Result<AnalyticCase> {
        let mut b = BurgersParams::default();
        let l = parse_ints(&self.l)?;
        if l.len() != 2 {
            return Err(Error::Param(format!("--l needs two integers, got {:?}", self.l)));
        }
        b.wave = [l[0], l[1]];
        if let Some(t) = self.time {
            b.time = t;
        }
        if let Some(nu) = self.viscosity {
            b.viscosity = nu;
        }
        AnalyticCase::by_name(name, self.p, b)
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Param(format!("not an integer list: {s:?}"))))
        .collect()
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_mesh(path: &Path) -> Result<Arc<Mesh>> {
    Ok(Arc::new(Mesh::from_json(&std::fs::read_to_string(path)?)?))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn read_field(mesh: Arc<Mesh>, path: &Path) -> Result<NodalField> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if is_json(path) {
        NodalField::from_json(mesh, std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?)
    } else {
        NodalField::from_bytes(mesh, &bytes)
    }
}

fn write_field(field: &NodalField, path: &Path) -> Result<()> {
    if is_json(path) {
        std::fs::write(path, field.to_json()?)?;
    } else {
        std::fs::write(path, field.to_bytes())?;
    }
    Ok(())
}

fn read_qlist(path: &Path, dim: usize) -> Result<WaveSet> {
    let text = std::fs::read_to_string(path)?;
    let mut waves = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') || line.starts_with('q') {
            continue;
        }
        waves.push(parse_ints(line)?);
    }
    WaveSet::new(dim, waves)
}

fn sample_expressions(mesh: Arc<Mesh>, exprs: &[String]) -> Result<NodalField> {
    let trees = exprs
        .iter()
        .map(|e| evalexpr::build_operator_tree(e).map_err(|err| Error::Param(format!("{e:?}: {err}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut ctx = HashMapContext::new();
    let set = |ctx: &mut HashMapContext, name: &str, v: f64| {
        ctx.set_value(name.into(), Value::Float(v)).map_err(|e| Error::Param(e.to_string()))
    };
    set(&mut ctx, "pi", std::f64::consts::PI)?;
    let d = mesh.dim();
    let nodes = mesh.node_positions();
    let mut values = Vec::with_capacity(nodes.len() / d * trees.len());
    for x in nodes.chunks_exact(d) {
        for (name, v) in ["x", "y", "z"].iter().zip(x) {
            set(&mut ctx, name, *v)?;
        }
        for (tree, e) in trees.iter().zip(exprs) {
            let v = tree.eval_number_with_context(&ctx).map_err(|err| Error::Param(format!("{e:?}: {err}")))?;
            values.push(v);
        }
    }
    NodalField::new(mesh, trees.len(), values)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gll { degree, json } => {
            let rule = GllRule::new(degree)?;
            let mut out = output(&None)?;
            if json {
                let v = serde_json::json!({ "P": degree, "nodes": rule.nodes(), "weights": rule.weights() });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "j,xi,w")?;
                for (j, (x, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
                    writeln!(out, "{j},{},{}", fmt_f64(*x), fmt_f64(*w))?;
                }
            }
            out.flush()?;
        }
        Command::Bessel { r, pmax } => {
            let col = sem_fourier::bessel::bessel_column(r, pmax)?;
            let mut out = output(&None)?;
            writeln!(out, "p,B_p")?;
            for (p, v) in col.values().iter().enumerate() {
                writeln!(out, "{p},{}", fmt_f64(*v))?;
            }
            out.flush()?;
        }
        Command::Mesh(MeshCommand::Uniform { d, per_axis, degree, out }) => {
            let mesh = Mesh::uniform(d, per_axis, degree)?;
            let mut w = output(&out)?;
            writeln!(w, "{}", mesh.to_json()?)?;
            w.flush()?;
        }
        Command::Mesh(MeshCommand::Refine { input, tol, field, out }) => {
            let mesh = read_mesh(&input)?;
            let f = read_field(mesh, &field)?;
            let refined = f.refine_by_indicator(tol)?;
            let mut w = output(&out)?;
            writeln!(w, "{}", refined.to_json()?)?;
            w.flush()?;
        }
        Command::Field(FieldCommand::Sample { mesh, case, expr, params, out }) => {
            let mesh = read_mesh(&mesh)?;
            let field = match case {
                Some(name) => sample_case(&params.build(&name)?, mesh)?,
                None => sample_expressions(mesh, &expr)?,
            };
            write_field(&field, &out)?;
        }
        Command::Case(CaseCommand::List) => {
            let mut out = output(&None)?;
            for name in AnalyticCase::names() {
                writeln!(out, "{name}")?;
            }
            out.flush()?;
        }
        Command::Case(CaseCommand::Sample { name, mesh, params, out }) => {
            let mesh = read_mesh(&mesh)?;
            write_field(&sample_case(&params.build(&name)?, mesh)?, &out)?;
        }
        Command::Transform { mesh, field, qmax, qlist, out, compensated } => {
            let mesh = read_mesh(&mesh)?;
            let f = read_field(Arc::clone(&mesh), &field)?;
            let waves = match qlist {
                Some(p) => read_qlist(&p, mesh.dim())?,
                None => WaveSet::centered_box(mesh.dim(), qmax)?,
            };
            let plan = TransformPlan::new(mesh, waves)?;
            let mode = if compensated { Summation::Compensated } else { Summation::Plain };
            let spec = transform_with(&f, &plan, mode)?;
            let mut w = output(&out)?;
            spec.write_csv(&mut w, None)?;
            w.flush()?;
        }
        Command::Cubature { mesh, field, points, qmax, out } => {
            let mesh = read_mesh(&mesh)?;
            let f = read_field(Arc::clone(&mesh), &field)?;
            let grid = TrigGrid::new(mesh.dim(), points)?;
            let spec = cubature_transform(&f, &grid, &WaveSet::centered_box(mesh.dim(), qmax)?)?;
            let mut w = output(&out)?;
            spec.write_csv(&mut w, Some(("M", points.to_string())))?;
            w.flush()?;
        }
        Command::Converge { case, kmax, pmax, qmax, out } => {
            let case = AnalyticCase::by_name(&case, None, BurgersParams::default())?;
            if case.dim != 1 {
                return Err(Error::Param(format!("convergence sweeps use 1D cases, {} is {}D", case.name, case.dim)));
            }
            let ks: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k <= kmax).collect();
            let ps: Vec<usize> = (1..=pmax).collect();
            let surface = convergence_surface(&case, &ks, &ps, qmax)?;
            let mut w = output(&out)?;
            surface.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Decay { spectrum, direction, component, floor, out } => {
            let spec = Spectrum::read_csv(File::open(&spectrum)?)?;
            let profile: Profile = direction.parse()?;
            let decay = spectrum_decay_profile(&spec, component, &profile, floor)?;
            let mut w = output(&out)?;
            decay.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn sample_case(case: &AnalyticCase, mesh: Arc<Mesh>) -> Result<NodalField> {
    if case.dim != mesh.dim() {
        return Err(Error::Shape(format!("case {} is {}D, mesh is {}D", case.name, case.dim, mesh.dim())));
    }
    NodalField::sample(mesh, case.components, |x, o| case.eval(x, o))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semft: {e}");
            ExitCode::FAILURE
        }
    }
}

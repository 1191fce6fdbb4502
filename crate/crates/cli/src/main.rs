//! Command-line front end: one subcommand per pipeline, machine-readable
//! JSON on stdout (or `--out`), plot-ready CSV profiles beside `--out`.
//!
//! Exit codes: `0` when every verification in the run passed, `2` when a
//! residual, sign, or convergence check failed, `1` on usage or
//! configuration errors.  Identical invocations produce byte-identical
//! JSON: all floats are rounded to 12 significant digits and keys are
//! serialized in sorted order.

mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use inflap::barrier::{build_barrier, verify_barrier, BarrierConfig};
use inflap::csp::{run_csp, CspConfig};
use inflap::deadcore::{assemble_radial_supersolution, build_deadcore_profile, determine_r_circ};
use inflap::grid::{
    detect_dead_core, discrete_comparison_check, smp_csp_experiment, solve_box_dirichlet,
    solve_radial_dirichlet, Geometry, GridFunction, SolverConfig,
};
use inflap::nonlinearity::IntegrandSelector;
use inflap::radial::{
    counterexample_eval, counterexample_scan, kink_viscosity_check, residual_report, GradientData,
};
use inflap::report;
use inflap::{classify_integral, Error, OperatorTag, SignMode, TargetEquation};

#[derive(Parser)]
#[command(
    name = "inflap",
    version,
    about = "Numerical laboratory for the dichotomy between the strong maximum principle \
             and the compact support principle under the infinity Laplacian"
)]
struct Cli {
    /// Write the JSON report here instead of stdout; CSV data files are
    /// written beside it as `<stem>.<name>.csv`.
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    /// infinity Laplacian, radially (phi')^2 phi''
    L1,
    /// normalized operator, radially phi''
    L0,
}

impl From<OperatorArg> for OperatorTag {
    fn from(op: OperatorArg) -> Self {
        match op {
            OperatorArg::L1 => OperatorTag::L1,
            OperatorArg::L0 => OperatorTag::L0,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify the singular dichotomy integral for a nonlinearity
    Classify(ClassifyArgs),
    /// Build and verify an annular barrier profile
    Barrier(BarrierArgs),
    /// Build the dead-core profile and its glued radial supersolution
    Deadcore(DeadcoreArgs),
    /// Run the compactly supported exact-solution pipeline
    Csp(CspArgs),
    /// Solve a Dirichlet problem on an interval or box grid
    Solve(SolveArgs),
    /// Check the discrete comparison-lemma hypotheses on stored grids
    Compare(CompareArgs),
    /// Solve a matrix of absorption problems and report dead-core data
    Experiment(ExperimentArgs),
    /// Scan the unbounded-data counterexample 2 e^{3r} - e^{3 alpha r}
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Nonlinearity spec, e.g. power:q=3 (see inputs module docs)
    #[arg(long)]
    f: String,
    /// Integrand: Finv4, Finv2, Finvp:<p>, Hinvp:<p>, or Gammainv
    #[arg(long, default_value = "Finv4")]
    selector: String,
    /// Upper limit of the singular integral
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Gradient-term spec; required by the Gammainv selector
    #[arg(long)]
    g: Option<String>,
    /// Absorption coefficient used by the Hinvp selector
    #[arg(long, default_value_t = 0.125)]
    kappa: f64,
    /// Scale inside the Gammainv selector integrand
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
}

#[derive(Args)]
struct BarrierArgs {
    #[arg(long)]
    f: String,
    /// Gradient coefficient K in K|u'|^3 (or K|u'| normalized)
    #[arg(long = "K", allow_hyphen_values = true)]
    k: f64,
    /// Outer radius of the annulus
    #[arg(long = "R")]
    r: f64,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    /// Barrier height bound epsilon
    #[arg(long)]
    epsilon: Option<f64>,
    /// Starting (negative) boundary slope
    #[arg(long, allow_hyphen_values = true)]
    alpha_init: Option<f64>,
    /// Absorption bound near zero
    #[arg(long)]
    m1: Option<f64>,
    /// Gradient-term bound; derived from K when omitted
    #[arg(long)]
    m2: Option<f64>,
    /// Cap on the energy step delta1
    #[arg(long)]
    step_cap: Option<f64>,
    #[arg(long, default_value_t = 4000)]
    nodes: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args)]
struct DeadcoreArgs {
    #[arg(long)]
    f: String,
    /// Gradient-term spec (defaults to zero)
    #[arg(long, default_value = "zero")]
    g: String,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    /// Length of the profile window [0, horizon]
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Inner radius the supersolution is glued onto
    #[arg(long, default_value_t = 1.0)]
    big_r: f64,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args)]
struct CspArgs {
    #[arg(long)]
    f: String,
    /// Gradient coefficient K
    #[arg(long = "K", allow_hyphen_values = true)]
    k: f64,
    /// Absorption fraction in h = 4 kappa f
    #[arg(long, default_value_t = 0.125)]
    kappa: f64,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    /// Fixed-point window length (defaults to the kernel cap)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 2048)]
    nodes: usize,
    #[arg(long, default_value_t = 1e-12)]
    fixed_point_tolerance: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    f: String,
    /// Gradient-term spec; mutually exclusive with --K
    #[arg(long, conflicts_with = "k")]
    g: Option<String>,
    /// Gradient coefficient K (defaults to 0)
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    /// interval:<a>,<b>,<n> or box:<lx>,<ly>,<nx>,<ny>
    #[arg(long, value_parser = parse_domain)]
    domain: DomainArg,
    /// Dirichlet value at the left end (interval only)
    #[arg(long, default_value_t = 0.0)]
    left: f64,
    /// Dirichlet value at the right end (interval only)
    #[arg(long, default_value_t = 1.0)]
    right: f64,
    /// Box boundary data: const:<v> or linear:<ax>,<ay>,<c>
    #[arg(long, value_parser = parse_boundary_data, default_value = "const:1")]
    data: BoundaryData,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
    /// Update-norm tolerance (defaults to 1e-10 * extent)
    #[arg(long)]
    tolerance: Option<f64>,
    /// Dead-core detection threshold (defaults to h^2)
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    f: String,
    #[arg(long, conflicts_with = "k")]
    g: Option<String>,
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    /// CSV with the candidate subsolution (r,u rows)
    #[arg(long)]
    u: PathBuf,
    /// CSV with the candidate supersolution (r,u rows)
    #[arg(long)]
    v: PathBuf,
    /// Constant forcing bound h for the subsolution side
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    h_const: f64,
    /// Constant forcing bound h-tilde for the supersolution side
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    htilde_const: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Comma-separated q:lambda pairs, e.g. 1:100,3:1
    #[arg(long, value_parser = parse_pairs)]
    pairs: PairList,
    #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
    operator: OperatorArg,
    #[arg(long, default_value_t = 1024)]
    resolution: usize,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Exponent ratio alpha in (0, 1)
    #[arg(long)]
    alpha: f64,
    /// Right end of the scanned interval [0, rmax]
    #[arg(long, default_value_t = 10.0)]
    rmax: f64,
    #[arg(long, default_value_t = 10_000)]
    nodes: usize,
    /// Also report the value at this radius
    #[arg(long)]
    at: Option<f64>,
}

#[derive(Clone, Copy)]
enum DomainArg {
    Interval { a: f64, b: f64, n: usize },
    Box { lx: f64, ly: f64, nx: usize, ny: usize },
}

fn parse_domain(text: &str) -> Result<DomainArg, String> {
    let (kind, rest) = text.split_once(':').ok_or("expected interval:... or box:...")?;
    let fields: Vec<&str> = rest.split(',').collect();
    match (kind, fields.as_slice()) {
        ("interval", [a, b, n]) => Ok(DomainArg::Interval {
            a: a.parse().map_err(|_| format!("bad interval start '{a}'"))?,
            b: b.parse().map_err(|_| format!("bad interval end '{b}'"))?,
            n: n.parse().map_err(|_| format!("bad node count '{n}'"))?,
        }),
        ("box", [lx, ly, nx, ny]) => Ok(DomainArg::Box {
            lx: lx.parse().map_err(|_| format!("bad box extent '{lx}'"))?,
            ly: ly.parse().map_err(|_| format!("bad box extent '{ly}'"))?,
            nx: nx.parse().map_err(|_| format!("bad node count '{nx}'"))?,
            ny: ny.parse().map_err(|_| format!("bad node count '{ny}'"))?,
        }),
        ("interval", _) => Err("interval domain needs a,b,n".into()),
        ("box", _) => Err("box domain needs lx,ly,nx,ny".into()),
        (other, _) => Err(format!("unknown domain kind '{other}'")),
    }
}

#[derive(Clone, Copy)]
enum BoundaryData {
    Const(f64),
    Linear { ax: f64, ay: f64, c: f64 },
}

impl BoundaryData {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            BoundaryData::Const(v) => v,
            BoundaryData::Linear { ax, ay, c } => ax * x + ay * y + c,
        }
    }

    fn json_value(&self) -> Value {
        match *self {
            BoundaryData::Const(v) => json!({"kind": "const", "value": report::num(v)}),
            BoundaryData::Linear { ax, ay, c } => json!({
                "kind": "linear",
                "ax": report::num(ax),
                "ay": report::num(ay),
                "c": report::num(c),
            }),
        }
    }
}

fn parse_boundary_data(text: &str) -> Result<BoundaryData, String> {
    let (kind, rest) = text.split_once(':').ok_or("expected const:<v> or linear:<ax>,<ay>,<c>")?;
    let nums: Result<Vec<f64>, String> = rest
        .split(',')
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad number '{s}'")))
        .collect();
    let nums = nums?;
    match (kind, nums.as_slice()) {
        ("const", [v]) => Ok(BoundaryData::Const(*v)),
        ("linear", [ax, ay, c]) => Ok(BoundaryData::Linear { ax: *ax, ay: *ay, c: *c }),
        _ => Err(format!("cannot parse boundary data '{text}'")),
    }
}

#[derive(Clone)]
struct PairList(Vec<(f64, f64)>);

fn parse_pairs(text: &str) -> Result<PairList, String> {
    let mut pairs = Vec::new();
    for item in text.split(',') {
        let (q, lambda) = item.split_once(':').ok_or("pairs must be q:lambda")?;
        pairs.push((
            q.parse().map_err(|_| format!("bad q '{q}'"))?,
            lambda.parse().map_err(|_| format!("bad lambda '{lambda}'"))?,
        ));
    }
    if pairs.is_empty() {
        return Err("need at least one q:lambda pair".into());
    }
    Ok(PairList(pairs))
}

/// One executed subcommand: the JSON report, named CSV payloads, and
/// whether every verification in the run passed.
struct Outcome {
    value: Value,
    csvs: Vec<(String, String)>,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out;
    match run(cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(out.as_deref(), &outcome) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if outcome.pass { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ConvergenceFailure(_)
                | Error::NoBarrier(_)
                | Error::NoValidRadius(_)
                | Error::GluingError(_) => 2,
                _ => 1,
            })
        }
    }
}

fn emit(out: Option<&std::path::Path>, outcome: &Outcome) -> std::io::Result<()> {
    let rendered = report::render(&outcome.value);
    match out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, rendered)?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
            let dir = path.parent().map(PathBuf::from).unwrap_or_default();
            for (name, csv) in &outcome.csvs {
                std::fs::write(dir.join(format!("{stem}.{name}.csv")), csv)?;
            }
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Classify(args) => run_classify(args),
        Command::Barrier(args) => run_barrier(args),
        Command::Deadcore(args) => run_deadcore(args),
        Command::Csp(args) => run_csp_command(args),
        Command::Solve(args) => run_solve(args),
        Command::Compare(args) => run_compare(args),
        Command::Experiment(args) => run_experiment(args),
        Command::Counterexample(args) => run_counterexample(args),
    }
}

fn run_classify(args: ClassifyArgs) -> Result<Outcome, Error> {
    let f = inputs::parse_nonlinearity(&args.f)?;
    let g;
    let selector = match args.selector.as_str() {
        "Finv4" => IntegrandSelector::f_inv_quarter(),
        "Finv2" => IntegrandSelector::f_inv_half(),
        other => {
            if let Some(p) = other.strip_prefix("Finvp:") {
                IntegrandSelector::f_inv_power(
                    p.parse().map_err(|_| Error::Domain(format!("bad exponent '{p}'")))?,
                )
            } else if let Some(p) = other.strip_prefix("Hinvp:") {
                IntegrandSelector::h_inv_power(
                    p.parse().map_err(|_| Error::Domain(format!("bad exponent '{p}'")))?,
                    args.kappa,
                )
            } else if other == "Gammainv" {
                let spec = args
                    .g
                    .as_deref()
                    .ok_or_else(|| Error::Domain("selector Gammainv needs --g".into()))?;
                g = inputs::parse_gradient_term(spec, args.operator.into())?;
                IntegrandSelector::inverse_gamma_inv(&g, args.scale)
            } else {
                return Err(Error::Domain(format!(
                    "unknown selector '{other}' (expected Finv4, Finv2, Finvp:<p>, \
                     Hinvp:<p>, or Gammainv)"
                )));
            }
        }
    };
    let class = classify_integral(&f, selector, args.delta)?;
    let payload = json!({
        "f": args.f,
        "selector": selector.describe(),
        "delta": report::num(args.delta),
        "classification": class.json_value(),
    });
    Ok(Outcome { value: report::versioned("classify", payload), csvs: vec![], pass: true })
}

fn run_barrier(args: BarrierArgs) -> Result<Outcome, Error> {
    let f = inputs::parse_nonlinearity(&args.f)?;
    let mut cfg = BarrierConfig::new(args.operator.into(), args.k, args.r);
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.alpha_init {
        cfg.alpha_init = v;
    }
    if let Some(v) = args.m1 {
        cfg.m1 = v;
    }
    cfg.m2 = args.m2.or(cfg.m2);
    cfg.step_cap = args.step_cap.or(cfg.step_cap);
    cfg.grid_resolution = args.nodes;
    let result = build_barrier(&cfg, &f)?;
    let verification = verify_barrier(&result, &cfg, &f, args.tolerance)?;
    let pass = verification.pass;
    let payload = json!({
        "f": args.f,
        "K": report::num(args.k),
        "R": report::num(args.r),
        "result": result.json_value(),
        "verification": verification.json_value(),
    });
    Ok(Outcome {
        value: report::versioned("barrier", payload),
        csvs: vec![("profile".into(), result.profile.to_csv())],
        pass,
    })
}

fn run_deadcore(args: DeadcoreArgs) -> Result<Outcome, Error> {
    let operator: OperatorTag = args.operator.into();
    let f = inputs::parse_nonlinearity(&args.f)?;
    let g = inputs::parse_gradient_term(&args.g, operator)?;
    let profile = build_deadcore_profile(&f, &g, args.horizon)?;
    let identity = residual_report(
        TargetEquation::DeadcoreIdentity,
        &profile,
        &f,
        GradientData::Term(&g),
        operator,
        SignMode::Equality,
        args.tolerance,
    )?;
    let rc = determine_r_circ(&profile, &f, &g)?;
    let assembled = assemble_radial_supersolution(&profile, args.big_r, rc.r_circ)?;
    let kink = kink_viscosity_check(&assembled, &f);
    let pass = identity.pass && rc.inequality.pass && kink.pass;
    let payload = json!({
        "f": args.f,
        "g": args.g,
        "horizon": report::num(args.horizon),
        "big_r": report::num(args.big_r),
        "profile": profile.json_summary(),
        "identity": identity.json_value(),
        "r_circ": rc.json_value(),
        "supersolution": assembled.json_summary(),
        "kink": kink.json_value(),
    });
    Ok(Outcome {
        value: report::versioned("deadcore", payload),
        csvs: vec![
            ("profile".into(), profile.to_csv()),
            ("supersolution".into(), assembled.to_csv()),
        ],
        pass,
    })
}

fn run_csp_command(args: CspArgs) -> Result<Outcome, Error> {
    let f = inputs::parse_nonlinearity(&args.f)?;
    let cfg = CspConfig {
        kappa: args.kappa,
        delta: args.delta,
        fixed_point_tolerance: args.fixed_point_tolerance,
        max_iterations: args.max_iterations,
        grid_nodes: args.nodes,
        ..CspConfig::new(args.operator.into(), args.k)
    };
    let result = run_csp(&f, &cfg)?;
    let pass = result.residual.pass;
    let payload = json!({
        "f": args.f,
        "K": report::num(args.k),
        "kappa": report::num(args.kappa),
        "result": result.json_value(),
    });
    Ok(Outcome {
        value: report::versioned("csp", payload),
        csvs: vec![
            ("phi".into(), result.phi.to_csv()),
            ("psi".into(), result.psi.to_csv()),
            ("assembled".into(), result.assembled.to_csv()),
        ],
        pass,
    })
}

fn run_solve(args: SolveArgs) -> Result<Outcome, Error> {
    let operator: OperatorTag = args.operator.into();
    let f = inputs::parse_nonlinearity(&args.f)?;
    let g = args.g.as_deref().map(|spec| inputs::parse_gradient_term(spec, operator)).transpose()?;
    let gradient = match &g {
        Some(term) => GradientData::Term(term),
        None => GradientData::Coefficient(args.k.unwrap_or(0.0)),
    };
    let gradient_json = match &g {
        Some(_) => json!({"kind": "term", "spec": args.g}),
        None => json!({"kind": "coefficient", "K": report::num(args.k.unwrap_or(0.0))}),
    };
    let cfg = SolverConfig { max_iterations: args.max_iterations, tolerance: args.tolerance };

    let (solution, solve) = match args.domain {
        DomainArg::Interval { a, b, n } => solve_radial_dirichlet(
            &f,
            gradient,
            operator,
            Geometry::Interval { a, b, n },
            (args.left, args.right),
            &cfg,
        )?,
        DomainArg::Box { lx, ly, nx, ny } => {
            let data = args.data;
            let mut grid = GridFunction::boxed(lx, ly, nx, ny, &|x, y| data.eval(x, y))?;
            let report = solve_box_dirichlet(&f, gradient, operator, &mut grid, &cfg)?;
            (grid, report)
        }
    };
    let h = solution.geometry.spacing()?;
    let threshold = args.threshold.unwrap_or(h * h);
    let (width, core_nodes) = detect_dead_core(&solution, threshold)?;
    let interior_min =
        solution.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let geometry_json = match args.domain {
        DomainArg::Interval { a, b, n } => json!({
            "kind": "interval", "a": report::num(a), "b": report::num(b), "n": n,
        }),
        DomainArg::Box { lx, ly, nx, ny } => json!({
            "kind": "box", "lx": report::num(lx), "ly": report::num(ly),
            "nx": nx, "ny": ny, "data": args.data.json_value(),
        }),
    };
    let pass = solve.converged;
    let payload = json!({
        "f": args.f,
        "gradient": gradient_json,
        "geometry": geometry_json,
        "solve": solve.json_value(),
        "interior_min": report::num(interior_min),
        "dead_core_width": report::num(width),
        "core_nodes": core_nodes.len(),
        "threshold": report::num(threshold),
    });
    Ok(Outcome {
        value: report::versioned("solve", payload),
        csvs: vec![("solution".into(), solution.csv_string())],
        pass,
    })
}

fn run_compare(args: CompareArgs) -> Result<Outcome, Error> {
    let operator: OperatorTag = args.operator.into();
    let f = inputs::parse_nonlinearity(&args.f)?;
    let g = args.g.as_deref().map(|spec| inputs::parse_gradient_term(spec, operator)).transpose()?;
    let gradient = match &g {
        Some(term) => GradientData::Term(term),
        None => GradientData::Coefficient(args.k.unwrap_or(0.0)),
    };
    let u = inputs::load_interval_csv(&args.u)?;
    let v = inputs::load_interval_csv(&args.v)?;
    let n = u.values.len();
    let h_fn = vec![args.h_const; n];
    let htilde_fn = vec![args.htilde_const; n];
    let report_cmp = discrete_comparison_check(&u, &v, &h_fn, &htilde_fn, &f, gradient, operator)?;
    let pass = report_cmp.pass();
    let payload = json!({
        "f": args.f,
        "nodes": n,
        "h": report::num(args.h_const),
        "htilde": report::num(args.htilde_const),
        "report": report_cmp.json_value(),
    });
    Ok(Outcome { value: report::versioned("compare", payload), csvs: vec![], pass })
}

fn run_experiment(args: ExperimentArgs) -> Result<Outcome, Error> {
    let operator: OperatorTag = args.operator.into();
    let mut reports = Vec::new();
    let mut csvs = Vec::new();
    for &(q, lambda) in &args.pairs.0 {
        let (report_exp, solution) = smp_csp_experiment(q, lambda, operator, args.resolution)?;
        reports.push(report_exp);
        csvs.push((format!("q{q}_lam{lambda}"), solution.csv_string()));
    }
    let pass = reports.iter().all(|r| r.solve.converged);
    let payload = json!({
        "resolution": args.resolution,
        "experiments": reports.iter().map(|r| r.json_value()).collect::<Vec<_>>(),
    });
    Ok(Outcome { value: report::versioned("experiment", payload), csvs, pass })
}

fn run_counterexample(args: CounterexampleArgs) -> Result<Outcome, Error> {
    let scan = counterexample_scan(args.alpha, args.rmax, args.nodes)?;
    let value_at = args
        .at
        .map(|r| -> Result<Value, Error> {
            Ok(json!({"r": report::num(r), "value": report::num(counterexample_eval(args.alpha, r)?)}))
        })
        .transpose()?
        .unwrap_or(Value::Null);
    let pass = scan.min_value > 0.0;
    let payload = json!({
        "alpha": report::num(args.alpha),
        "r_max": report::num(args.rmax),
        "nodes": args.nodes,
        "min_value": report::num(scan.min_value),
        "min_location": report::num(scan.min_location),
        "positive": pass,
        "value_at": value_at,
    });
    Ok(Outcome { value: report::versioned("counterexample", payload), csvs: vec![], pass })
}

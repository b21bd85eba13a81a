use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use nisim::discrete::{alpha_min, decide_discrete, maximal_correlation, reduction_params, JointPmf};
use nisim::gauss::Correlation;
use nisim::io::{self, InputFormat};
use nisim::netsearch::{decide_gaussian, simplex_net, SearchConfig, Verdict};
use nisim::stability::{
    borell_bounds, crho_from_coeffs, crho_montecarlo, crho_quadrature, hermite_coeffs, CellFunction, DistributionMatrix,
    DEFAULT_PANEL_ORDER,
};
use nisim::variational::{
    eval_objective, first_variation_residual, grid_local_search, is_local_minimum, translation_eigen_identity_check,
    translation_eigen_identity_check_with_tolerance, translation_second_variation, PartitionGrid, QuadraticObjective,
};

/// Feasibility checks for noninteractive simulation from correlated sources.
#[derive(Parser)]
#[command(name = "nisim", version)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "NISIM_THREADS", global = true)]
    threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a pair of Gaussian cell functions whose output law is close to the target.
    DecideGaussian(DecideGaussian),
    /// Exhaustive search over rules on n copies of a finite source.
    DecideDiscrete(DecideDiscrete),
    /// Maximal correlation of a joint pmf.
    Maxcorr(Maxcorr),
    /// Extremal joint mass of two sets with the given measures.
    BorellBounds(BorellArgs),
    /// Output law of a pair of cell functions applied to correlated Gaussians.
    Crho(CrhoArgs),
    /// Parameters of the reduction from a finite source to the Gaussian problem.
    ReductionParams(ReductionArgs),
    /// First and second variation diagnostics for a partition pair.
    VerifyVariational(VariationalArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DecideGaussian(_) => "decide-gaussian",
            Command::DecideDiscrete(_) => "decide-discrete",
            Command::Maxcorr(_) => "maxcorr",
            Command::BorellBounds(_) => "borell-bounds",
            Command::Crho(_) => "crho",
            Command::ReductionParams(_) => "reduction-params",
            Command::VerifyVariational(_) => "verify-variational",
        }
    }
}

#[derive(Args)]
struct DecideGaussian {
    /// Target distribution matrix (JSON or CSV).
    #[arg(long)]
    target: PathBuf,
    /// Search configuration (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Expected output alphabet size; checked against the target.
    #[arg(long)]
    m: Option<usize>,
    /// Domain dimension of the cell functions.
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    grid_cells: Option<usize>,
    #[arg(long)]
    grid_radius: Option<f64>,
    #[arg(long)]
    net_epsilon: Option<f64>,
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DecideDiscrete {
    #[arg(long)]
    target: PathBuf,
    /// Joint pmf of the source (JSON or CSV).
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Number of source copies each party sees.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Net parameter; defaults to the closeness threshold.
    #[arg(long)]
    net_epsilon: Option<f64>,
    /// Maximum number of rule pairs examined.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Args)]
struct Maxcorr {
    #[arg(long)]
    source: PathBuf,
}

#[derive(Args)]
struct BorellArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Quadrature,
    Montecarlo,
    Hermite,
}

#[derive(Args)]
struct CrhoArgs {
    /// First cell function (JSON).
    #[arg(long)]
    f: PathBuf,
    /// Second cell function (JSON).
    #[arg(long)]
    g: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, value_enum, default_value = "quadrature")]
    method: Method,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    degree_cap: usize,
    /// Gauss–Legendre panel order.
    #[arg(long, default_value_t = DEFAULT_PANEL_ORDER)]
    order: usize,
}

#[derive(Args)]
struct ReductionArgs {
    /// Output alphabet size.
    #[arg(long)]
    m: usize,
    /// Source alphabet size.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    epsilon: f64,
    /// Maximal correlation of the source.
    #[arg(long)]
    rho: Option<f64>,
    /// Smallest nonzero source probability.
    #[arg(long)]
    alpha: Option<f64>,
    /// Derive p, rho and alpha from this pmf; explicit flags take precedence.
    #[arg(long)]
    source: Option<PathBuf>,
}

#[derive(Args)]
struct VariationalArgs {
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    objective: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    /// Translation direction for the second variation.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    direction: f64,
    /// Accept interfaces with |field| below this instead of requiring a grid local minimum.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Run the local search from the partition first, with this many restarts.
    #[arg(long)]
    search_restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy)]
enum Kind {
    Usage,
    DataFormat,
    Numeric,
}

impl Kind {
    fn code(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::DataFormat => "data_format",
            Kind::Numeric => "numeric",
        }
    }

    fn exit(self) -> u8 {
        match self {
            Kind::Usage => 64,
            Kind::DataFormat => 65,
            Kind::Numeric => 70,
        }
    }
}

struct Failure {
    kind: Kind,
    message: String,
    context: Map<String, Value>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { kind: Kind::Usage, message: message.into(), context: Map::new() }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.into(), value.into());
        self
    }
}

fn kind_of(e: &nisim::Error) -> Kind {
    use nisim::Error as E;
    if e.is_usage() {
        return Kind::Usage;
    }
    match e {
        E::Numerical(_) => Kind::Numeric,
        _ => Kind::DataFormat,
    }
}

impl From<nisim::Error> for Failure {
    fn from(e: nisim::Error) -> Self {
        let failure = Failure { kind: kind_of(&e), message: e.to_string(), context: Map::new() };
        match e {
            nisim::Error::EpsilonNotBelowRho { epsilon, rho_abs } => failure
                .with("constraint", "0<ε<|ρ|")
                .with("epsilon", epsilon)
                .with("rho_abs", rho_abs),
            nisim::Error::InvalidParameter { name, .. } => failure.with("parameter", name),
            _ => failure,
        }
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())).with("path", path.display().to_string()))
}

fn load<T>(path: &Path, parse: impl FnOnce(&[u8], InputFormat) -> nisim::Result<T>) -> Result<T, Failure> {
    let bytes = read(path)?;
    parse(&bytes, InputFormat::from_path(path)).map_err(|e| Failure::from(e).with("path", path.display().to_string()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    load(path, |b, _| io::from_json(b))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure { kind: Kind::Numeric, message: e.to_string(), context: Map::new() })
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Simulatable => 0,
        Verdict::NotSimulatableAtResolution => 1,
        Verdict::Indeterminate => 2,
    }
}

fn correlation(rho: f64) -> Result<Correlation, Failure> {
    Ok(Correlation::new(rho)?)
}

fn decide_gaussian_cmd(a: &DecideGaussian) -> Outcome {
    let rho = correlation(a.rho)?;
    let mut config: SearchConfig = match &a.config {
        Some(p) => load_json(p)?,
        None => SearchConfig::default(),
    };
    if let Some(e) = a.epsilon {
        config.epsilon = e;
    }
    if a.dimension.is_some() {
        config.domain_dimension = a.dimension;
    }
    if let Some(c) = a.grid_cells {
        config.cells_per_axis = c;
    }
    if let Some(r) = a.grid_radius {
        config.radius = r;
    }
    if a.net_epsilon.is_some() {
        config.net_epsilon = a.net_epsilon;
    }
    if a.degree_cap.is_some() {
        config.degree_cap = a.degree_cap;
    }
    if let Some(b) = a.budget {
        config.budget = b;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    config.validate(rho)?;
    let target = load(&a.target, io::distribution_matrix)?;
    if let Some(m) = a.m {
        if m != target.m() {
            return Err(Failure::from(nisim::Error::DimensionMismatch { expected: m, found: target.m() })
                .with("path", a.target.display().to_string()));
        }
    }
    let decision = decide_gaussian(&target, rho, &config)?;
    Ok((to_value(&decision)?, verdict_exit(decision.verdict)))
}

fn decide_discrete_cmd(a: &DecideDiscrete) -> Outcome {
    if !(a.epsilon > 0.0 && a.epsilon.is_finite()) {
        return Err(Failure::usage(format!("epsilon {} must be positive", a.epsilon)).with("parameter", "epsilon"));
    }
    let target = load(&a.target, io::distribution_matrix)?;
    let source = load(&a.source, io::joint_pmf)?;
    let net = simplex_net(target.m(), a.net_epsilon.unwrap_or(a.epsilon))?;
    let decision = decide_discrete(&target, &source, a.epsilon, a.n, &net, a.budget)?;
    Ok((to_value(&decision)?, verdict_exit(decision.verdict)))
}

fn maxcorr_cmd(a: &Maxcorr) -> Outcome {
    let source = load(&a.source, io::joint_pmf)?;
    Ok((json!({ "rho_m": maximal_correlation(&source)? }), 0))
}

fn borell_cmd(a: &BorellArgs) -> Outcome {
    let bounds = borell_bounds(a.a, a.b, correlation(a.rho)?)?;
    Ok((to_value(&bounds)?, 0))
}

fn crho_cmd(a: &CrhoArgs) -> Outcome {
    let rho = correlation(a.rho)?;
    let f: CellFunction = load_json(&a.f)?;
    let g: CellFunction = load_json(&a.g)?;
    let value = match a.method {
        Method::Quadrature => to_value(&crho_quadrature(&f, &g, rho, a.order)?)?,
        Method::Montecarlo => to_value(&crho_montecarlo(&f, &g, rho, a.samples, a.seed)?)?,
        Method::Hermite => {
            let matrix: DistributionMatrix = crho_from_coeffs(&hermite_coeffs(&f, a.degree_cap)?, &hermite_coeffs(&g, a.degree_cap)?, rho)?;
            to_value(&matrix)?
        }
    };
    Ok((value, 0))
}

fn reduction_cmd(a: &ReductionArgs) -> Outcome {
    let source: Option<JointPmf> = a.source.as_deref().map(|p| load(p, io::joint_pmf)).transpose()?;
    let derived = |name: &'static str| Failure::usage(format!("--{name} is required without --source")).with("parameter", name);
    let p = match (a.p, &source) {
        (Some(p), _) => p,
        (None, Some(s)) => s.alphabet_x().max(s.alphabet_y()),
        (None, None) => return Err(derived("p")),
    };
    let rho = match (a.rho, &source) {
        (Some(r), _) => r,
        (None, Some(s)) => maximal_correlation(s)?,
        (None, None) => return Err(derived("rho")),
    };
    let alpha = match (a.alpha, &source) {
        (Some(x), _) => x,
        (None, Some(s)) => alpha_min(s)?,
        (None, None) => return Err(derived("alpha")),
    };
    let params = reduction_params(a.m, p, a.epsilon, rho, alpha)?;
    let mut value = to_value(&params)?;
    value["inputs"] = json!({ "m": a.m, "p": p, "epsilon": a.epsilon, "rho": rho, "alpha": alpha });
    Ok((value, 0))
}

fn error_value(e: nisim::Error) -> Value {
    json!({ "error": { "code": kind_of(&e).code(), "message": e.to_string() } })
}

fn variational_cmd(a: &VariationalArgs) -> Outcome {
    let rho = correlation(a.rho)?;
    if !a.direction.is_finite() {
        return Err(Failure::usage("direction must be finite").with("parameter", "direction"));
    }
    let mut parts: PartitionGrid = load_json(&a.partition)?;
    let obj: QuadraticObjective = load_json(&a.objective)?;
    let mut out = Map::new();
    if let Some(restarts) = a.search_restarts {
        let found = grid_local_search(rho, &obj, &parts, a.seed, restarts)?;
        out.insert("search".into(), json!({ "restart": found.restart, "sweeps": found.sweeps }));
        parts = found.partition;
        out.insert("partition".into(), to_value(&parts)?);
    }
    out.insert("objective".into(), json!(eval_objective(&parts, rho, &obj)?));
    out.insert("first_variation".into(), to_value(&first_variation_residual(&parts, rho, &obj)?)?);
    out.insert("local_minimum".into(), json!(is_local_minimum(&parts, rho, &obj)?));
    let (second, eigen) = if parts.grid().dimension() == 1 {
        let second = match translation_second_variation(&parts, rho, &obj, a.direction) {
            Ok(s) => to_value(&s)?,
            Err(e) => error_value(e),
        };
        let check = match a.tolerance {
            Some(t) => translation_eigen_identity_check_with_tolerance(&parts, rho, &obj, a.direction, t),
            None => translation_eigen_identity_check(&parts, rho, &obj, a.direction),
        };
        let eigen = match check {
            Ok(r) => json!({ "residual": r }),
            Err(e) => error_value(e),
        };
        (second, eigen)
    } else {
        (Value::Null, Value::Null)
    };
    out.insert("second_variation".into(), second);
    out.insert("eigen_identity".into(), eigen);
    Ok((Value::Object(out), 0))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::DecideGaussian(a) => decide_gaussian_cmd(a),
        Command::DecideDiscrete(a) => decide_discrete_cmd(a),
        Command::Maxcorr(a) => maxcorr_cmd(a),
        Command::BorellBounds(a) => borell_cmd(a),
        Command::Crho(a) => crho_cmd(a),
        Command::ReductionParams(a) => reduction_cmd(a),
        Command::VerifyVariational(a) => variational_cmd(a),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    match threads {
        None => Ok(()),
        Some(0) => Err(Failure::usage("--threads must be at least 1").with("parameter", "threads")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { kind: Kind::Numeric, message: e.to_string(), context: Map::new() }),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializing a JSON value");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())).with("path", p.display().to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("cannot write to standard output: {e}")))
        }
    }
}

fn report(failure: Failure, subcommand: Option<&str>) -> ExitCode {
    let exit = failure.kind.exit();
    let mut context = failure.context;
    context.insert("subcommand".into(), json!(subcommand));
    context.insert("exit_code".into(), json!(exit));
    let body = json!({ "code": failure.kind.code(), "message": failure.message, "context": context });
    eprintln!("{body}");
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NISIM_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let message = text.trim().trim_start_matches("error: ");
            return report(Failure::usage(message), None);
        }
    };
    let name = cli.command.name();
    let result = configure_threads(cli.threads)
        .and_then(|_| run(&cli))
        .and_then(|(value, code)| emit(&value, cli.out.as_deref()).map(|_| code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => report(f, Some(name)),
    }
}

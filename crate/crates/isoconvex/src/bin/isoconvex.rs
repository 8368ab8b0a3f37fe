//! Batch CLI over the isoconvex library: isotropic frames, verification
//! suites with CSV artifacts, and seeded polytope searches.
//!
//! Exit codes: 0 success, 2 input error, 3 degenerate geometry,
//! 4 verification contract failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isoconvex::body::ConvexBody;
use isoconvex::caps::{
    cartesian_slab_oracle_3d, cone_volume_closed, contradiction_coefficients, phi_closed,
    psi_closed, region_integral_oracle, slab_volume_closed, CapIntegrand, CapRegion,
};
use isoconvex::body::CapSpec;
use isoconvex::error::GeomError;
use isoconvex::isotropy::isotropic_frame;
use isoconvex::perturb::{add_spike, prop4_error_order, sphere_condition_residual, ScheduleMode};
use isoconvex::search::{hill_climb, save_run, SearchConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_CONTRACT: u8 = 4;

#[derive(Parser)]
#[command(name = "isoconvex", version, about = "Isotropy-constant toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the isotropic frame and L_K of a body.
    Isotropy(IsotropyArgs),
    /// Run a verification suite and emit a CSV report.
    Verify(VerifyArgs),
    /// Hill-climb search over polytopes from a config file.
    Search(SearchArgs),
}

#[derive(Args)]
struct IsotropyArgs {
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Prop4,
    Caps,
    Lemma5,
    Contradiction,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Body JSON for prop4 (defaults to the unit disc).
    #[arg(long)]
    body: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension (caps) or maximum dimension (contradiction).
    #[arg(long)]
    n: Option<usize>,
    /// Curvature radius for the caps suite.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Comma-separated cut parameters for the caps suite.
    #[arg(long, value_delimiter = ',')]
    a_schedule: Option<Vec<f64>>,
    /// Order-fit tolerance override.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SearchArgs {
    /// SearchConfig JSON file.
    #[arg(long)]
    config: PathBuf,
    /// RunLog output path.
    #[arg(long)]
    out: PathBuf,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Isotropy(args) => cmd_isotropy(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Search(args) => cmd_search(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Contract(msg)) => {
            eprintln!("contract violation: {msg}");
            ExitCode::from(EXIT_CONTRACT)
        }
        Err(CliError::Geom(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

enum CliError {
    Input(String),
    Geom(GeomError),
    Contract(String),
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geom(e)
    }
}

fn exit_code_for(e: &GeomError) -> u8 {
    match e {
        GeomError::Io(_)
        | GeomError::CorruptFile(_)
        | GeomError::FormatVersionMismatch { .. }
        | GeomError::UnsupportedDimension(_) => EXIT_INPUT,
        _ => EXIT_DEGENERATE,
    }
}

fn read_body(path: &PathBuf) -> Result<ConvexBody, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad JSON: {e}")))?;
    ConvexBody::from_json(&value).map_err(|e| match e {
        GeomError::CorruptFile(msg) => CliError::Input(msg),
        other => CliError::Geom(other),
    })
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_isotropy(args: IsotropyArgs) -> Result<(), CliError> {
    let body = read_body(&args.body)?;
    let frame = isotropic_frame(&body)?;
    let n = body.dim();
    let content = match args.format {
        Format::Json => {
            let linear: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| frame.linear[(i, j)]).collect())
                .collect();
            let report = serde_json::json!({
                "dim": n,
                "volume": frame.volume,
                "m_k": frame.m_k,
                "l_k": frame.l_k,
                "translation": frame.translation.iter().copied().collect::<Vec<f64>>(),
                "linear": linear,
            });
            format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
        }
        Format::Csv => format!(
            "dim,volume,m_k,l_k\n{},{:.17},{:.17},{:.17}\n",
            n, frame.volume, frame.m_k, frame.l_k
        ),
    };
    emit(&args.out, &content)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    match args.suite {
        Suite::Contradiction => verify_contradiction(&args),
        Suite::Caps => verify_caps(&args),
        Suite::Prop4 => verify_prop4(&args),
        Suite::Lemma5 => verify_lemma5(&args),
    }
}

fn verify_contradiction(args: &VerifyArgs) -> Result<(), CliError> {
    let n_max = args.n.unwrap_or(64);
    if n_max < 2 {
        return Err(CliError::Input("need --n >= 2".into()));
    }
    let mut csv = String::from("n,c_out,c_in,verdict\n");
    let mut failure = None;
    for n in 2..=n_max as i64 {
        let (c_out, c_in, verdict) = contradiction_coefficients(n);
        csv.push_str(&format!("{n},{c_out},{c_in},{verdict}\n"));
        if !verdict && failure.is_none() {
            failure = Some(format!("n={n}: c_out={c_out} >= c_in={c_in}"));
        }
    }
    emit(&args.out, &csv)?;
    match failure {
        Some(msg) => Err(CliError::Contract(msg)),
        None => Ok(()),
    }
}

fn verify_caps(args: &VerifyArgs) -> Result<(), CliError> {
    let n = args.n.unwrap_or(2);
    let r = args.r;
    let schedule = args
        .a_schedule
        .clone()
        .unwrap_or_else(|| vec![1e-2 * r, 1e-3 * r, 1e-4 * r]);
    let rel_tol = args.tol.unwrap_or(1e-8);
    let mut csv = String::from("n,R,a,b,quantity,closed,oracle,rel_err,order_fit\n");
    let mut failure: Option<String> = None;
    let note_failure = |msg: String, failure: &mut Option<String>| {
        if failure.is_none() {
            *failure = Some(msg);
        }
    };

    let spec_for = |a: f64| -> Result<CapSpec, CliError> {
        let s = CapSpec {
            n,
            r,
            a,
            b: 0.0,
            lambda: vec![1.0; n],
            eps: 0.0,
        };
        s.validate()?;
        Ok(s)
    };

    let quantities: [(&str, f64); 4] = [
        ("slab_volume", (n as f64 + 1.0) / 2.0),
        ("cone_volume", (n as f64 + 1.0) / 2.0),
        ("psi", (n as f64 + 3.0) / 2.0),
        ("phi", (n as f64 + 3.0) / 2.0),
    ];
    for (name, expected_order) in quantities {
        let mut fit = Vec::new();
        let mut rows = Vec::new();
        for &a in &schedule {
            let spec = spec_for(a)?;
            let (closed, oracle) = match name {
                "slab_volume" => (
                    slab_volume_closed(&spec),
                    region_integral_oracle(&spec, CapRegion::Slab, CapIntegrand::One)?,
                ),
                "cone_volume" => (
                    cone_volume_closed(&spec),
                    region_integral_oracle(&spec, CapRegion::Cone, CapIntegrand::One)?,
                ),
                "psi" => (
                    psi_closed(&spec).value,
                    region_integral_oracle(&spec, CapRegion::Slab, CapIntegrand::CenteredNormSq)?,
                ),
                _ => (
                    phi_closed(&spec).value,
                    region_integral_oracle(&spec, CapRegion::Cone, CapIntegrand::CenteredNormSq)?,
                ),
            };
            let rel_err = ((closed - oracle) / oracle).abs();
            fit.push((a.ln(), oracle.abs().ln()));
            rows.push((a, closed, oracle, rel_err));
        }
        let order = least_squares_slope(&fit);
        for (a, closed, oracle, rel_err) in rows {
            csv.push_str(&format!(
                "{n},{r},{a},{:.1},{name},{closed:.17e},{oracle:.17e},{rel_err:.3e},{order:.6}\n",
                0.0
            ));
            if rel_err > rel_tol {
                note_failure(
                    format!("{name} at a={a}: rel_err {rel_err:.3e} > {rel_tol:.1e}"),
                    &mut failure,
                );
            }
        }
        if (order - expected_order).abs() > 0.05 {
            note_failure(
                format!("{name}: order {order:.4} vs expected {expected_order}"),
                &mut failure,
            );
        }
    }

    // Lambda-exponent resolution: full Cartesian oracle at n=3, lambda != 1.
    if n == 3 {
        for lambda in [vec![2.0, 0.5, 1.0], vec![2.0, 1.0, 0.5]] {
            let spec = CapSpec {
                n: 3,
                r,
                a: schedule[schedule.len() - 1],
                b: 0.05 * r,
                lambda: lambda.clone(),
                eps: 0.0,
            };
            spec.validate()?;
            let closed = psi_closed(&spec).value;
            let oracle = cartesian_slab_oracle_3d(&spec);
            let rel_err = ((closed - oracle) / oracle).abs();
            csv.push_str(&format!(
                "3,{r},{},{},psi_lambda{:?},{closed:.17e},{oracle:.17e},{rel_err:.3e},\n",
                spec.a, spec.b, lambda
            ));
            if rel_err > rel_tol {
                note_failure(
                    format!("lambda probe {lambda:?}: rel_err {rel_err:.3e}"),
                    &mut failure,
                );
            }
        }
    }

    emit(&args.out, &csv)?;
    match failure {
        Some(msg) => Err(CliError::Contract(msg)),
        None => Ok(()),
    }
}

fn verify_prop4(args: &VerifyArgs) -> Result<(), CliError> {
    let body = match &args.body {
        Some(path) => read_body(path)?,
        None => ConvexBody::ball(DVector::zeros(2), 1.0)?,
    };
    let mut u = DVector::zeros(body.dim());
    u[0] = 1.0;
    let scales: Vec<f64> = (4..=10).map(|k| 2.0f64.powi(-k)).collect();
    let (slope, rows) = prop4_error_order(&body, &u, &scales, ScheduleMode::Slab)?;
    let mut csv =
        String::from("scale,delta_volume,delta_second,exact_ratio,predicted_ratio,residual\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17},{:.17},{:.3e}\n",
            row.scale,
            row.delta_volume,
            row.delta_second,
            row.exact_ratio,
            row.predicted_ratio,
            row.residual
        ));
    }
    csv.push_str(&format!("# order_fit,{slope:.6}\n"));
    emit(&args.out, &csv)?;
    let tol = args.tol.unwrap_or(0.3);
    if (slope - 2.0).abs() > tol {
        return Err(CliError::Contract(format!(
            "residual order {slope:.4} outside 2 +/- {tol}"
        )));
    }
    Ok(())
}

fn verify_lemma5(args: &VerifyArgs) -> Result<(), CliError> {
    let n = args.n.unwrap_or(3);
    let ball = ConvexBody::ball(DVector::zeros(n), 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut csv = String::from("index,case,value\n");
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut x = DVector::zeros(n);
        for j in 0..n {
            x[j] = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let x = &x / x.norm();
        let resid = sphere_condition_residual(&ball, &x)?.abs();
        worst = worst.max(resid);
        csv.push_str(&format!("{i},ball_residual,{resid:.3e}\n"));
    }

    // Shrinking spike whose visible facet is a 1e-3-diameter chord of a
    // circle-inscribed polygon, so the modified region has diameter ~1e-3.
    let r0 = 0.5;
    let eps0 = 1e-3;
    let pts: Vec<DVector<f64>> =
        [eps0, -eps0, 1.05, -1.05, 2.44, -2.44, std::f64::consts::PI]
            .iter()
            .map(|t| DVector::from_vec(vec![r0 * t.cos(), r0 * t.sin()]))
            .collect();
    let polygon = ConvexBody::polytope(&pts)?;
    let p = match &polygon {
        ConvexBody::Polytope(p) => p.clone(),
        _ => unreachable!(),
    };
    let x0 = DVector::from_vec(vec![r0 * eps0.cos(), 0.0]);
    let u = DVector::from_vec(vec![1.0, 0.0]);
    let r = add_spike(&p, &x0, &u, 5e-5)?;
    let ratio = r.delta_second() / r.delta_volume();
    let err = (ratio - x0.norm_squared()).abs();
    csv.push_str(&format!("0,spike_ratio_error,{err:.3e}\n"));
    emit(&args.out, &csv)?;

    if worst > 1e-12 {
        return Err(CliError::Contract(format!(
            "ball residual {worst:.3e} > 1e-12"
        )));
    }
    if err > 1e-3 {
        return Err(CliError::Contract(format!("spike ratio error {err:.3e}")));
    }
    Ok(())
}

fn cmd_search(args: SearchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut config: SearchConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad config: {e}")))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate().map_err(|e| match e {
        GeomError::DegenerateInput(msg) => CliError::Input(msg),
        GeomError::UnsupportedDimension(n) => CliError::Input(format!("unsupported dimension {n}")),
        other => CliError::Geom(other),
    })?;
    let log = hill_climb(&config)?;
    save_run(&log, &args.out)?;
    println!(
        "search finished: mode {:?}, {} iterations, final L_K = {:.9}",
        config.mode,
        log.records.len(),
        log.final_l
    );
    Ok(())
}

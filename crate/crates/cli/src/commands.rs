//! The subcommands, as functions from options to output text.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use polydist_core::bounds::{log_grid, optimize_bounds, sweep as sweep_grid, OptimizeOptions, Problem, Strategy};
use polydist_core::numkernel::Svd;
use polydist_core::{fixtures, Complex64, Error, MatrixPolynomial, PerturbationResult, TargetSet, WeightSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, EXIT_INFEASIBLE};
use crate::file::{self, Pair, Parsed, PerturbationSection, ProblemFile};

pub const DEFAULT_RANGE: (f64, f64) = (0.0, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightsMode {
    /// Weights from the file, else coefficient norms.
    #[default]
    Auto,
    Unit,
    Norms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Rounds to 16 significant digits.
pub fn sig16(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.15e}").parse().expect("formatted float parses")
}

/// Four decimals, switching to scientific notation for small or large values.
pub fn human(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{x:.4e}")
    } else {
        format!("{x:.4}")
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<(ProblemFile, Parsed), CliError> {
    let text = read_text(path)?;
    let file = file::parse_str(&text).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e.message)))?;
    let parsed = file::validate(&file).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e.message)))?;
    Ok((file, parsed))
}

pub fn weights_for(parsed: &Parsed, mode: WeightsMode) -> Result<WeightSet, CliError> {
    match (mode, &parsed.weights) {
        (WeightsMode::Unit, _) => Ok(WeightSet::unit(parsed.p.degree())),
        (WeightsMode::Auto, Some(w)) => Ok(w.clone()),
        (WeightsMode::Auto, None) | (WeightsMode::Norms, _) => Ok(WeightSet::coefficient_norms(&parsed.p)?),
    }
}

fn problem(parsed: &Parsed, mode: WeightsMode) -> Result<Problem, CliError> {
    let w = weights_for(parsed, mode)?;
    Ok(Problem::new(parsed.p.clone(), parsed.targets.clone(), w)?)
}

/// `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::parse(format!("range '{s}': expected lo:hi with 0 <= lo < hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Default)]
pub struct BoundsOptions {
    pub range: Option<(f64, f64)>,
    pub strategy: Option<Strategy>,
    pub grid: Option<usize>,
    pub weights: WeightsMode,
    pub format: Format,
}

#[derive(Debug, Serialize)]
struct BoundsDoc {
    strategy: String,
    gamma_range: [f64; 2],
    beta_low: f64,
    gamma_low: f64,
    beta_up: Option<f64>,
    gamma_up: Option<f64>,
    q0_bound: Option<f64>,
    grid_points: usize,
    infeasible_points: usize,
    degenerate_points: usize,
    notes: Vec<String>,
}

fn resolve_strategy(opt: Option<Strategy>, parsed: &Parsed) -> Result<Strategy, CliError> {
    match (opt, &parsed.strategy) {
        (Some(s), _) => Ok(s),
        (None, Some(s)) => Ok(s.parse()?),
        (None, None) => Ok(Strategy::MinUpper),
    }
}

fn run_optimize(
    parsed: &Parsed,
    prob: &Problem,
    range: Option<(f64, f64)>,
    strategy: Option<Strategy>,
    grid: Option<usize>,
) -> Result<polydist_core::BoundsReport, CliError> {
    let range = range.or(parsed.gamma_range).unwrap_or(DEFAULT_RANGE);
    let strategy = resolve_strategy(strategy, parsed)?;
    let mut opts = OptimizeOptions::default();
    if let Some(g) = grid {
        if g == 0 {
            return Err(CliError::parse("--grid must be at least 1"));
        }
        opts.grid_points = g;
    }
    Ok(optimize_bounds(prob, range, strategy, &opts)?)
}

pub fn bounds(path: &Path, opts: &BoundsOptions) -> Result<String, CliError> {
    let (_, parsed) = load(path)?;
    let prob = problem(&parsed, opts.weights)?;
    let rep = run_optimize(&parsed, &prob, opts.range, opts.strategy, opts.grid)?;
    let doc = BoundsDoc {
        strategy: rep.strategy.to_string(),
        gamma_range: [rep.gamma_range.0, rep.gamma_range.1],
        beta_low: sig16(rep.beta_low_opt),
        gamma_low: sig16(rep.gamma_low),
        beta_up: rep.beta_up_opt.map(sig16),
        gamma_up: rep.gamma_up.map(sig16),
        q0_bound: rep.q0.as_ref().map(|q| sig16(q.bound)),
        grid_points: rep.samples.len(),
        infeasible_points: rep.samples.iter().filter(|s| !s.feasible()).count(),
        degenerate_points: rep.samples.iter().filter(|s| s.degenerate).count(),
        notes: rep.notes.clone(),
    };
    match opts.format {
        Format::Json => Ok(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "strategy   {}", doc.strategy);
            let _ = writeln!(out, "beta_low   {}   (gamma = {})", human(doc.beta_low), human(doc.gamma_low));
            match (doc.beta_up, doc.gamma_up) {
                (Some(u), Some(g)) => {
                    let _ = writeln!(out, "beta_up    {}   (gamma = {})", human(u), human(g));
                }
                _ => {
                    let _ = writeln!(out, "beta_up    none (no feasible gamma)");
                }
            }
            match doc.q0_bound {
                Some(b) => {
                    let _ = writeln!(out, "q0 bound   {}", human(b));
                }
                None => {
                    let _ = writeln!(out, "q0 bound   none");
                }
            }
            for note in &doc.notes {
                let _ = writeln!(out, "note: {note}");
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub range: Option<(f64, f64)>,
    pub points: usize,
    pub weights: WeightsMode,
}

/// CSV with columns `gamma,beta_low,beta_up,feasible`; `beta_up` is empty when infeasible.
pub fn sweep(path: &Path, opts: &SweepOptions) -> Result<String, CliError> {
    let (_, parsed) = load(path)?;
    let prob = problem(&parsed, opts.weights)?;
    let (lo, hi) = opts.range.or(parsed.gamma_range).unwrap_or(DEFAULT_RANGE);
    let start = lo.max(OptimizeOptions::default().min_gamma);
    if start >= hi {
        return Err(CliError::parse(format!("range ({lo}, {hi}] lies below the cutoff {start}")));
    }
    let grid = log_grid(start, hi, opts.points)?;
    let samples = sweep_grid(&prob, &grid)?;
    let mut out = String::from("gamma,beta_low,beta_up,feasible\n");
    for s in samples {
        let up = s.beta_up.map(|u| format!("{u:.15e}")).unwrap_or_default();
        let _ = writeln!(out, "{:.15e},{:.15e},{up},{}", s.gamma, s.beta_low, s.feasible());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaChoice {
    Fixed(f64),
    Optimal,
    Zero,
}

#[derive(Debug, Clone)]
pub struct PerturbOptions {
    pub gamma: GammaChoice,
    pub range: Option<(f64, f64)>,
    pub strategy: Option<Strategy>,
    pub grid: Option<usize>,
    pub weights: WeightsMode,
}

fn perturbation_doc(parsed: &Parsed, w: &WeightSet, r: &PerturbationResult) -> ProblemFile {
    let mut doc = file::from_problem(&r.q, &parsed.targets, Some(w));
    doc.perturbation = Some(PerturbationSection {
        gamma: r.gamma,
        branch: if r.sigma_rho.is_none() { "gamma0".into() } else { "gamma".into() },
        bound: r.bound,
        sigma_rho: r.sigma_rho,
        degenerate_svd: r.degenerate_svd,
        delta: r.delta_coeffs.iter().map(file::matrix_rows).collect(),
        residuals: r.residuals.clone(),
    });
    doc
}

/// The perturbed polynomial `Q` in problem-file form, with `Delta_j` and residuals.
pub fn perturb(path: &Path, opts: &PerturbOptions) -> Result<String, CliError> {
    let (_, parsed) = load(path)?;
    let w = weights_for(&parsed, opts.weights)?;
    let prob = Problem::new(parsed.p.clone(), parsed.targets.clone(), w.clone())?;
    let result = match opts.gamma {
        GammaChoice::Zero => prob.q0()?,
        GammaChoice::Fixed(0.0) => prob.q0()?,
        GammaChoice::Fixed(g) => prob.beta_up(g)?,
        GammaChoice::Optimal => {
            let rep = run_optimize(&parsed, &prob, opts.range, opts.strategy, opts.grid)?;
            rep.q_best
                .ok_or_else(|| CliError::new(EXIT_INFEASIBLE, "no feasible gamma in the range for the upper bound"))?
        }
    };
    Ok(file::to_json(&perturbation_doc(&parsed, &w, &result)))
}

#[derive(Debug, Serialize)]
struct TargetCheck {
    target: Pair,
    spectrum_distance: f64,
    smallest_singular_value: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyDoc {
    tol: f64,
    pass: bool,
    targets: Vec<TargetCheck>,
}

/// Targets given inline as a JSON list, or as a path to a file holding such a
/// list or a problem file.
pub fn resolve_targets(arg: &str) -> Result<Vec<Pair>, CliError> {
    if let Ok(list) = serde_json::from_str::<Vec<Pair>>(arg) {
        return Ok(list);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::parse(format!("--targets '{arg}' is neither a JSON list of [re, im] pairs nor a file")));
    }
    let text = read_text(path)?;
    if let Ok(list) = serde_json::from_str::<Vec<Pair>>(&text) {
        return Ok(list);
    }
    let f = file::parse_str(&text).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e.message)))?;
    Ok(f.targets)
}

/// Returns the report and whether every target passed.
pub fn verify(qpath: &Path, targets_arg: &str, tol: f64) -> Result<(String, bool), CliError> {
    if !(tol > 0.0) {
        return Err(CliError::parse(format!("--tol must be positive, got {tol}")));
    }
    let text = read_text(qpath)?;
    let f = file::parse_str(&text).map_err(|e| CliError::parse(format!("{}: {}", qpath.display(), e.message)))?;
    let q = MatrixPolynomial::with_any_leading(file::coefficients(&f)?)?;
    let targets = file::targets(&resolve_targets(targets_arg)?)?;
    let spectrum = q.spectrum()?;
    let mut checks = Vec::with_capacity(targets.len());
    for &mu in targets.as_slice() {
        let dist = spectrum.iter().map(|z| (z - mu).norm()).fold(f64::INFINITY, f64::min);
        let s_n = Svd::compute(&q.evaluate(mu))?.smallest();
        checks.push(TargetCheck {
            target: file::to_pair(mu),
            spectrum_distance: sig16(dist),
            smallest_singular_value: sig16(s_n),
            pass: dist <= tol && s_n <= tol,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    let doc = VerifyDoc { tol, pass, targets: checks };
    Ok((serde_json::to_string_pretty(&doc).expect("report serializes") + "\n", pass))
}

#[derive(Debug, Clone, Default)]
pub struct FixtureOptions {
    pub seed: u64,
    pub planted: bool,
}

fn random_fixture(n: usize, m: usize, k: usize, opts: &FixtureOptions) -> Result<ProblemFile, CliError> {
    if n == 0 || m == 0 || k == 0 || k > n {
        return Err(CliError::parse(format!("random:{n}:{m}:{k}: need n, m >= 1 and 1 <= k <= n")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let entry = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let p = loop {
        let coeffs = (0..=m)
            .map(|_| polydist_core::CMatrix::from_fn(n, n, |_, _| entry(&mut rng)))
            .collect();
        match MatrixPolynomial::new(coeffs) {
            Ok(p) => break p,
            Err(Error::SingularLeading { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    };
    let mut pts: Vec<Complex64> = Vec::with_capacity(k);
    while pts.len() < k {
        let z = entry(&mut rng) * 1.5;
        if pts.iter().all(|q| (q - z).norm() >= 0.2) {
            pts.push(z);
        }
    }
    let targets = TargetSet::new(pts)?;
    let p = if opts.planted {
        let w = WeightSet::coefficient_norms(&p)?;
        let q = polydist_core::perturb::build_q0(&p, &targets, &w)?.q;
        MatrixPolynomial::new(q.into_coeffs())?
    } else {
        p
    };
    Ok(file::from_problem(&p, &targets, None))
}

/// `example1`, `example2`, `frank:<n>` or `random:<n>:<m>:<k>`.
pub fn fixture(name: &str, opts: &FixtureOptions) -> Result<String, CliError> {
    let mut doc = match name {
        "example1" => {
            let (p, t, _) = fixtures::example1();
            let mut d = file::from_problem(&p, &t, None);
            d.gamma_range = Some([0.0, 10.0]);
            d.strategy = Some(Strategy::MinUpper.to_string());
            d
        }
        "example2" => frank_fixture(12)?,
        other => {
            if let Some(order) = other.strip_prefix("frank:") {
                let order: usize = order.parse().map_err(|_| CliError::parse(format!("fixture '{other}': bad order")))?;
                frank_fixture(order)?
            } else if let Some(spec) = other.strip_prefix("random:") {
                let parts: Vec<usize> = spec
                    .split(':')
                    .map(|x| x.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::parse(format!("fixture '{other}': expected random:<n>:<m>:<k>")))?;
                if parts.len() != 3 {
                    return Err(CliError::parse(format!("fixture '{other}': expected random:<n>:<m>:<k>")));
                }
                random_fixture(parts[0], parts[1], parts[2], opts)?
            } else {
                return Err(CliError::parse(format!(
                    "unknown fixture '{other}' (expected example1, example2, frank:<n> or random:<n>:<m>:<k>)"
                )));
            }
        }
    };
    if opts.planted && !name.starts_with("random:") {
        return Err(CliError::parse("--planted only applies to random fixtures"));
    }
    doc.perturbation = None;
    Ok(file::to_json(&doc))
}

fn frank_fixture(order: usize) -> Result<ProblemFile, CliError> {
    let targets = fixtures::example2_targets();
    if order < targets.len() {
        return Err(CliError::parse(format!("frank:{order}: order must be at least {}", targets.len())));
    }
    let p = MatrixPolynomial::linear_pencil(&fixtures::frank_matrix(order))?;
    let mut d = file::from_problem(&p, &targets, Some(&WeightSet::unit(1)));
    d.gamma_range = Some([0.0, 5.0]);
    d.strategy = Some(Strategy::MinGap.to_string());
    Ok(d)
}

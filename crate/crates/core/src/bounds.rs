//! Lower and upper bounds on the distance to polynomials with the prescribed
//! eigenvalues, and their optimization over `gamma`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fgamma::{self, GammaAssembler, RhoTriple};
use crate::matpoly::{MatrixPolynomial, TargetSet, VarpiTable, WeightSet};
use crate::numkernel::spectral_norm;
use crate::perturb::{self, BetaScalars, PerturbationResult, ZERO_SIGMA_TOL};

/// A problem instance `(P, Sigma, w)` with the `gamma`-independent tables cached.
#[derive(Debug, Clone)]
pub struct Problem {
    p: MatrixPolynomial,
    targets: TargetSet,
    w: WeightSet,
    assembler: GammaAssembler,
    varpi: VarpiTable,
    betas: BetaScalars,
}

/// One point of a `gamma` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub gamma: f64,
    pub beta_low: f64,
    /// Absent when the construction is infeasible at `gamma`.
    pub beta_up: Option<f64>,
    pub degenerate: bool,
}

impl Sample {
    pub fn feasible(&self) -> bool {
        self.beta_up.is_some()
    }
}

impl Problem {
    pub fn new(p: MatrixPolynomial, targets: TargetSet, w: WeightSet) -> Result<Self> {
        w.check_degree(&p)?;
        let assembler = GammaAssembler::new(&p, &targets)?;
        let varpi = VarpiTable::new(&w, targets.as_slice());
        let betas = perturb::beta_scalars(&w, &targets);
        Ok(Problem { p, targets, w, assembler, varpi, betas })
    }

    pub fn polynomial(&self) -> &MatrixPolynomial {
        &self.p
    }

    pub fn targets(&self) -> &TargetSet {
        &self.targets
    }

    pub fn weights(&self) -> &WeightSet {
        &self.w
    }

    pub fn betas(&self) -> &BetaScalars {
        &self.betas
    }

    pub fn rho_triple(&self, gamma: f64) -> Result<RhoTriple> {
        check_positive(gamma)?;
        fgamma::rho_triple(&self.assembler.assemble(gamma)?)
    }

    /// `||F_gamma[varpi, Sigma]||_2`.
    pub fn varpi_norm(&self, gamma: f64) -> Result<f64> {
        check_positive(gamma)?;
        spectral_norm(&fgamma::varpi_matrix(&self.varpi, self.targets.len(), gamma))
    }

    fn low_from_triple(&self, triple: &RhoTriple, gamma: f64) -> Result<f64> {
        if triple.sigma_rho <= ZERO_SIGMA_TOL * triple.norm {
            return Ok(0.0);
        }
        Ok(triple.sigma_rho / self.varpi_norm(gamma)?)
    }

    fn up_from_triple(&self, triple: &RhoTriple, gamma: f64) -> Result<PerturbationResult> {
        let hv = perturb::hat_transform(triple, &self.targets, gamma)?;
        perturb::build_delta(&self.p, &self.targets, &self.w, gamma, &hv, &self.betas, triple)
    }

    pub fn beta_low(&self, gamma: f64) -> Result<f64> {
        let triple = self.rho_triple(gamma)?;
        self.low_from_triple(&triple, gamma)
    }

    /// The perturbation at `gamma`; its `bound` is `beta_up(gamma)`.
    pub fn beta_up(&self, gamma: f64) -> Result<PerturbationResult> {
        let triple = self.rho_triple(gamma)?;
        self.up_from_triple(&triple, gamma)
    }

    /// The `gamma = 0` construction.
    pub fn q0(&self) -> Result<PerturbationResult> {
        perturb::build_q0(&self.p, &self.targets, &self.w)
    }

    /// Both bounds from a single SVD of `F_gamma`.
    pub fn sample(&self, gamma: f64) -> Result<Sample> {
        let triple = self.rho_triple(gamma)?;
        let beta_low = self.low_from_triple(&triple, gamma)?;
        let beta_up = match self.up_from_triple(&triple, gamma) {
            Ok(r) => Some(r.bound),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Sample { gamma, beta_low, beta_up, degenerate: triple.degenerate })
    }
}

fn check_positive(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}

pub fn beta_low(p: &MatrixPolynomial, targets: &TargetSet, w: &WeightSet, gamma: f64) -> Result<f64> {
    Problem::new(p.clone(), targets.clone(), w.clone())?.beta_low(gamma)
}

pub fn beta_up(p: &MatrixPolynomial, targets: &TargetSet, w: &WeightSet, gamma: f64) -> Result<PerturbationResult> {
    Problem::new(p.clone(), targets.clone(), w.clone())?.beta_up(gamma)
}

/// Result of [`minimize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Bounded scalar minimization (Brent: golden section with parabolic steps).
/// `tol` is an absolute tolerance on `x`; NaN values are treated as `+inf`.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Minimum> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_nan() { f64::INFINITY } else { y }
    };
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let sqrt_eps = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let (mut v, mut w) = (x, x);
    let mut fx = eval(x);
    let (mut fv, mut fw) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for iter in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, fx, iterations: iter, converged: true });
        }
        let mut take_golden = true;
        if e.abs() > tol1 && fx.is_finite() && fv.is_finite() && fw.is_finite() {
            let mut r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            r = e;
            e = d;
            if p.abs() < (0.5 * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = eval(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(Minimum { x, fx, iterations: max_iter, converged: false })
}

/// How `gamma` is chosen for the reported bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Minimize `beta_up` and maximize `beta_low`, each at its own `gamma`.
    MinUpper,
    /// Same per-bound optimization as `MinUpper`, lower bound refined first.
    MaxLower,
    /// Minimize `beta_up - beta_low` at a single shared `gamma`.
    MinGap,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::MinUpper => "min-upper",
            Strategy::MaxLower => "max-lower",
            Strategy::MinGap => "min-gap",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-upper" => Ok(Strategy::MinUpper),
            "max-lower" => Ok(Strategy::MaxLower),
            "min-gap" => Ok(Strategy::MinGap),
            other => Err(Error::InvalidInput(format!(
                "unknown strategy '{other}' (expected min-upper, max-lower or min-gap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub grid_points: usize,
    /// Grid starts at `max(lo, min_gamma)`.
    pub min_gamma: f64,
    /// Relative tolerance on `gamma` for the refinement.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { grid_points: 200, min_gamma: 1e-8, xtol: 1e-6, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub strategy: Strategy,
    pub gamma_range: (f64, f64),
    pub beta_low_opt: f64,
    pub gamma_low: f64,
    pub beta_up_opt: Option<f64>,
    pub gamma_up: Option<f64>,
    pub samples: Vec<Sample>,
    /// Witness of `beta_up_opt`.
    pub q_best: Option<PerturbationResult>,
    /// The `gamma = 0` branch, when its singular vectors are independent.
    pub q0: Option<PerturbationResult>,
    pub notes: Vec<String>,
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("log grid needs 0 < lo <= hi, got ({lo}, {hi})")));
    }
    match points {
        0 => Err(Error::InvalidInput("grid needs at least one point".into())),
        1 => Ok(vec![hi]),
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| if i == points - 1 { hi } else if i == 0 { lo } else { (a + step * i as f64).exp() })
                .collect())
        }
    }
}

/// Evaluates both bounds on every grid point, in parallel, preserving order.
pub fn sweep(problem: &Problem, grid: &[f64]) -> Result<Vec<Sample>> {
    for &g in grid {
        check_positive(g)?;
    }
    grid.par_iter().map(|&g| problem.sample(g)).collect()
}

/// Refines around grid index `best` in log-space; keeps the grid value if the
/// refinement does not improve on it.
fn refine<F: FnMut(f64) -> f64>(
    grid: &[f64],
    best: usize,
    grid_value: f64,
    opts: &OptimizeOptions,
    notes: &mut Vec<String>,
    label: &str,
    mut f: F,
) -> Result<(f64, f64)> {
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if !(lo < hi) {
        return Ok((grid[best], grid_value));
    }
    let m = minimize_scalar(|t| f(t.exp()), lo.ln(), hi.ln(), opts.xtol, opts.max_iter)?;
    if !m.converged {
        notes.push(format!("{label}: refinement stopped after {} iterations", m.iterations));
    }
    if m.fx < grid_value {
        Ok((m.x.exp(), m.fx))
    } else {
        Ok((grid[best], grid_value))
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    values
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((i, v)),
        })
}

pub fn optimize_bounds(problem: &Problem, range: (f64, f64), strategy: Strategy, opts: &OptimizeOptions) -> Result<BoundsReport> {
    let (lo, hi) = range;
    if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("gamma range must satisfy 0 <= lo < hi, got ({lo}, {hi}]")));
    }
    let start = lo.max(opts.min_gamma);
    if start >= hi {
        return Err(Error::InvalidInput(format!("gamma range ({lo}, {hi}] lies below the cutoff {}", opts.min_gamma)));
    }
    let grid = log_grid(start, hi, opts.grid_points)?;
    let samples = sweep(problem, &grid)?;
    let mut notes = Vec::new();

    let infeasible = samples.iter().filter(|s| !s.feasible()).count();
    if infeasible > 0 {
        notes.push(format!("{infeasible} of {} grid points infeasible for the upper bound", samples.len()));
    }
    let degenerate = samples.iter().filter(|s| s.degenerate).count();
    if degenerate > 0 {
        notes.push(format!("{degenerate} grid points with a repeated singular value s_rho"));
    }

    let up_value = |g: f64| match problem.sample(g) {
        Ok(s) => s.beta_up.unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };
    let neg_low = |g: f64| problem.beta_low(g).map(|v| -v).unwrap_or(f64::INFINITY);

    let (gamma_low, beta_low_opt, gamma_up, beta_up_opt) = match strategy {
        Strategy::MinGap => {
            let gap = |s: &Sample| s.beta_up.map(|u| u - s.beta_low).unwrap_or(f64::INFINITY);
            match argmin(samples.iter().map(gap)) {
                Some((i, v)) => {
                    let gap_at = |g: f64| match problem.sample(g) {
                        Ok(s) => gap(&s),
                        Err(_) => f64::INFINITY,
                    };
                    let (g, _) = refine(&grid, i, v, opts, &mut notes, "min-gap", gap_at)?;
                    let s = problem.sample(g)?;
                    (g, s.beta_low, Some(g), s.beta_up)
                }
                None => {
                    notes.push("no feasible gamma for the upper bound; reporting the lower bound only".into());
                    let (i, v) = argmin(samples.iter().map(|s| -s.beta_low))
                        .ok_or_else(|| Error::Numerical("lower bound not finite on the grid".into()))?;
                    let (g, nv) = refine(&grid, i, v, opts, &mut notes, "max-lower", neg_low)?;
                    (g, -nv, None, None)
                }
            }
        }
        Strategy::MinUpper | Strategy::MaxLower => {
            let (li, lv) = argmin(samples.iter().map(|s| -s.beta_low))
                .ok_or_else(|| Error::Numerical("lower bound not finite on the grid".into()))?;
            let mut low_notes = Vec::new();
            let mut up_notes = Vec::new();
            let (gl, nl) = refine(&grid, li, lv, opts, &mut low_notes, "max-lower", neg_low)?;
            let up = match argmin(samples.iter().map(|s| s.beta_up.unwrap_or(f64::INFINITY))) {
                Some((i, v)) => {
                    let (g, u) = refine(&grid, i, v, opts, &mut up_notes, "min-upper", up_value)?;
                    Some((g, u))
                }
                None => {
                    up_notes.push("no feasible gamma for the upper bound; reporting the lower bound only".into());
                    None
                }
            };
            if strategy == Strategy::MaxLower {
                notes.extend(low_notes);
                notes.extend(up_notes);
            } else {
                notes.extend(up_notes);
                notes.extend(low_notes);
            }
            (gl, -nl, up.map(|u| u.0), up.map(|u| u.1))
        }
    };

    let q_best = match gamma_up {
        Some(g) => Some(problem.beta_up(g)?),
        None => None,
    };
    let beta_up_opt = q_best.as_ref().map(|q| q.bound).or(beta_up_opt);
    if let (Some(u), true) = (beta_up_opt, beta_low_opt > 0.0) {
        if beta_low_opt > u {
            notes.push(format!("lower bound {beta_low_opt:e} exceeds upper bound {u:e}"));
        }
    }
    let q0 = match problem.q0() {
        Ok(r) => Some(r),
        Err(Error::Infeasible(why)) => {
            notes.push(format!("gamma = 0 branch unavailable: {why}"));
            None
        }
        Err(e) => return Err(e),
    };
    Ok(BoundsReport {
        strategy,
        gamma_range: range,
        beta_low_opt,
        gamma_low,
        beta_up_opt,
        gamma_up,
        samples,
        q_best,
        q0,
        notes,
    })
}

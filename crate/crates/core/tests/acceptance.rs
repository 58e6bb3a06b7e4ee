mod common;

use common::{c, dd_closed_form, min_dist, random_poly, random_targets};
use polydist_core::bounds::{optimize_bounds, OptimizeOptions, Problem, Strategy};
use polydist_core::fgamma::{self, assemble_f, assemble_f_varpi, null_family, theta};
use polydist_core::numkernel::{pseudoinverse_default, spectral_norm, eigenvalues};
use polydist_core::perturb::{self, build_delta_standard, build_q0, construct, hat_identity_residual};
use polydist_core::{fixtures, CMatrix, Error, MatrixPolynomial, WeightSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn example1_report() -> Result<polydist_core::BoundsReport, String> {
    let (p, t, w) = fixtures::example1();
    let prob = Problem::new(p, t, w).map_err(err)?;
    optimize_bounds(&prob, (0.0, 10.0), Strategy::MinUpper, &OptimizeOptions::default()).map_err(err)
}

fn criterion1() -> Outcome {
    let (p, _, _) = fixtures::example1();
    let spec = p.spectrum().map_err(err)?;
    check(spec.len() == 6, format!("expected 6 eigenvalues, got {}", spec.len()))?;
    let expected = [
        c(76.9807, 0.0),
        c(0.9284, 0.0),
        c(0.3034, 0.0),
        c(-1.0283, 0.0),
        c(-0.9421, 0.9281),
        c(-0.9421, -0.9281),
    ];
    let mut worst: f64 = 0.0;
    for e in expected {
        worst = worst.max(min_dist(&spec, e));
    }
    // and every computed value is claimed by some expected value
    for z in &spec {
        worst = worst.max(min_dist(&expected, *z));
    }
    check(worst < 1e-3, format!("largest mismatch {worst:.3e}"))?;
    Ok(format!("largest mismatch {worst:.2e}"))
}

fn criterion2() -> Outcome {
    let rep = example1_report()?;
    let up = rep.beta_up_opt.ok_or("no feasible gamma")?;
    let g = rep.gamma_up.ok_or("no feasible gamma")?;
    check((up - 1.0090).abs() < 1e-2, format!("beta_up = {up:.6}"))?;
    check((g - 1.9656).abs() < 5e-2, format!("gamma_up = {g:.6}"))?;
    Ok(format!("beta_up = {up:.6} at gamma = {g:.6}"))
}

fn criterion3() -> Outcome {
    let rep = example1_report()?;
    let low = rep.beta_low_opt;
    check((low - 0.1320).abs() < 1e-3, format!("beta_low = {low:.6}"))?;
    Ok(format!("beta_low = {low:.6} (gamma = {:.3e})", rep.gamma_low))
}

fn criterion4() -> Outcome {
    let (p, t, w) = fixtures::example1();
    let r = build_q0(&p, &t, &w).map_err(err)?;
    check((r.bound - 12.5337).abs() < 1e-2, format!("||Delta_0||/w_0 = {:.6}", r.bound))?;
    let spec = r.q.spectrum().map_err(err)?;
    let worst = t.as_slice().iter().map(|&mu| min_dist(&spec, mu)).fold(0.0, f64::max);
    check(worst < 1e-5, format!("target missed by {worst:.3e}"))?;
    Ok(format!("bound = {:.6}, targets within {worst:.2e}", r.bound))
}

fn criterion5() -> Outcome {
    let (p, t, w) = fixtures::example1();
    let r = construct(&p, &t, &w, 1.9656).map_err(err)?;
    let spec = r.q.spectrum().map_err(err)?;
    let worst = t.as_slice().iter().map(|&mu| min_dist(&spec, mu)).fold(0.0, f64::max);
    check(worst < 1e-5, format!("target missed by {worst:.3e}"))?;
    let mut ratio: f64 = 0.0;
    for j in 0..=p.degree() {
        if w.get(j) > 0.0 {
            ratio = ratio.max(spectral_norm(&r.delta_coeffs[j]).map_err(err)? / w.get(j));
        }
    }
    let rel = (ratio - r.bound).abs() / r.bound;
    check(rel < 1e-9, format!("max ||Delta_j||/w_j = {ratio:.12} vs beta_up = {:.12}", r.bound))?;
    Ok(format!("targets within {worst:.2e}, boundary rel. error {rel:.1e}"))
}

fn criterion6() -> Outcome {
    let (p, t, w) = fixtures::example2();
    let prob = Problem::new(p, t.clone(), w).map_err(err)?;
    let s = prob.sample(2.5730).map_err(err)?;
    let up = s.beta_up.ok_or("infeasible at 2.5730")?;
    check((s.beta_low - 6.4007e-4).abs() < 1e-5, format!("beta_low = {:.6e}", s.beta_low))?;
    check((up - 8.6167e-4).abs() < 2e-5, format!("beta_up = {up:.6e}"))?;
    check(s.beta_low <= 6.9e-4 && 6.9e-4 <= up, "bounds do not straddle 6.9e-4".into())?;
    let a = fixtures::frank_matrix(12);
    let sp = build_delta_standard(&a, &t, 2.5730).map_err(err)?;
    let ev = eigenvalues(&sp.perturbed_matrix).map_err(err)?;
    let worst = t.as_slice().iter().map(|&mu| min_dist(&ev, mu)).fold(0.0, f64::max);
    check(worst < 1e-6, format!("eigenvalue missed by {worst:.3e}"))?;
    Ok(format!("beta_low = {:.5e}, beta_up = {up:.5e}, eig within {worst:.1e}", s.beta_low))
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut worst_s: f64 = 0.0;
    let mut worst_null: f64 = 0.0;
    for _ in 0..50 {
        // n = 1 makes F_gamma a roundoff-sized scalar block, where the ratio is meaningless
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=3);
        let k = rng.random_range(1..=n);
        let p = random_poly(&mut rng, n, m);
        let t = random_targets(&mut rng, k);
        let w = WeightSet::coefficient_norms(&p).map_err(err)?;
        let planted = build_q0(&p, &t, &w).map_err(err)?.q;
        let planted = MatrixPolynomial::new(planted.into_coeffs()).map_err(err)?;
        for _ in 0..10 {
            let gamma = rng.random_range(1e-6..10.0);
            let f = assemble_f(&planted, &t, gamma).map_err(err)?;
            let triple = fgamma::rho_triple(&f).map_err(err)?;
            worst_s = worst_s.max(triple.sigma_rho / triple.norm);
            let dense = f.to_dense();
            for x in null_family(&planted, &t, gamma).map_err(err)? {
                let r = (&dense * &x).norm() / (triple.norm * x.norm());
                worst_null = worst_null.max(r);
            }
        }
    }
    check(worst_s <= 1e-8, format!("s_rho/||F|| reached {worst_s:.3e}"))?;
    check(worst_null <= 1e-8, format!("null residual reached {worst_null:.3e}"))?;
    Ok(format!("max s_rho/||F|| = {worst_s:.1e}, max null residual = {worst_null:.1e}"))
}

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8001);
    let mut tightest = f64::INFINITY;
    for inst in 0..50 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let k = rng.random_range(1..=n);
        let base = random_poly(&mut rng, n, m);
        let t = random_targets(&mut rng, k);
        let bw = WeightSet::coefficient_norms(&base).map_err(err)?;
        // a polynomial with Sigma in its spectrum, then a random admissible step away from it
        let target_poly = build_q0(&base, &t, &bw).map_err(err)?.q;
        let scale = rng.random_range(0.01..0.5);
        let delta: Vec<CMatrix> = (0..=m)
            .map(|j| {
                let d = common::random_matrix(&mut rng, n);
                if inst % 2 == 1 && j > 0 { d * c(0.0, 0.0) } else { d * c(scale, 0.0) }
            })
            .collect();
        let p_coeffs: Vec<CMatrix> = target_poly.coeffs().iter().zip(&delta).map(|(a, d)| a - d).collect();
        let p = match MatrixPolynomial::new(p_coeffs) {
            Ok(p) => p,
            Err(Error::SingularLeading { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let w = if inst % 2 == 1 { WeightSet::unit(m) } else { WeightSet::coefficient_norms(&p).map_err(err)? };
        let mut eps: f64 = 0.0;
        for j in 0..=m {
            let dn = spectral_norm(&delta[j]).map_err(err)?;
            if w.get(j) > 0.0 {
                eps = eps.max(dn / w.get(j));
            }
        }
        let prob = Problem::new(p, t, w).map_err(err)?;
        for _ in 0..10 {
            let gamma = rng.random_range(1e-6..10.0);
            let low = prob.beta_low(gamma).map_err(err)?;
            check(eps >= low - 1e-9, format!("instance {inst}: eps = {eps:.6e} < beta_low = {low:.6e} at gamma = {gamma}"))?;
            tightest = tightest.min(eps - low);
        }
    }
    Ok(format!("smallest eps - beta_low = {tightest:.3e}"))
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let mut done = 0;
    let mut attempts = 0;
    let mut worst_interp: f64 = 0.0;
    let mut worst_hat: f64 = 0.0;
    while done < 100 {
        attempts += 1;
        if attempts > 1000 {
            return Err(format!("only {done} feasible instances in 1000 attempts"));
        }
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=3);
        let k = rng.random_range(1..=n);
        let p = random_poly(&mut rng, n, m);
        let t = random_targets(&mut rng, k);
        let w = WeightSet::coefficient_norms(&p).map_err(err)?;
        let prob = Problem::new(p.clone(), t.clone(), w.clone()).map_err(err)?;
        let gammas: Vec<f64> = (0..6).map(|_| rng.random_range(0.05..5.0)).collect();
        let mut lows = Vec::new();
        let mut ups = Vec::new();
        for &g in &gammas {
            lows.push(prob.beta_low(g).map_err(err)?);
            let r = match prob.beta_up(g) {
                Ok(r) => r,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e.to_string()),
            };
            ups.push(r.bound);
            let dn = spectral_norm(&r.delta_gamma).map_err(err)?;
            let dpoly = r.delta_poly().map_err(err)?;
            for s in 0..k {
                let lhs = dpoly.evaluate(t.get(s));
                let rhs = &r.delta_gamma * prob.betas().betas[s];
                worst_interp = worst_interp.max((lhs - rhs).norm() / dn);
            }
            let triple = prob.rho_triple(g).map_err(err)?;
            let hv = perturb::hat_transform(&triple, &t, g).map_err(err)?;
            worst_hat = worst_hat.max(hat_identity_residual(&p, &t, &triple, &hv) / triple.norm);
        }
        if ups.is_empty() {
            continue;
        }
        let max_low = lows.iter().cloned().fold(0.0, f64::max);
        let min_up = ups.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = p.max_coeff_norm().map_err(err)?;
        check(max_low <= min_up + 1e-9 * scale, format!("sandwich broken: {max_low:.6e} > {min_up:.6e}"))?;
        done += 1;
    }
    check(worst_interp <= 1e-10, format!("interpolation error {worst_interp:.3e}"))?;
    check(worst_hat <= 1e-8, format!("hat identity error {worst_hat:.3e}"))?;
    Ok(format!("100 instances; interpolation {worst_interp:.1e}, hat identity {worst_hat:.1e}"))
}

fn criterion10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10001);
    let mut worst_dd: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    let mut worst_theta: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=4);
        let k = rng.random_range(2..=n);
        let p = random_poly(&mut rng, n, m);
        let t = random_targets(&mut rng, k);
        let nodes = t.as_slice();
        let scale = p.max_coeff_norm().map_err(err)?;
        for first in 0..k {
            for last in first..k {
                let got = p.divided_difference(&nodes[first..=last]).map_err(err)?;
                let want = dd_closed_form(&p, &nodes[first..=last]);
                worst_dd = worst_dd.max((got - want).norm() / scale);
            }
        }
        let gamma = rng.random_range(0.1..5.0);
        let f = assemble_f(&p, &t, gamma).map_err(err)?;
        for i in 1..k {
            for j in 0..i {
                let th = theta(&t, gamma, j, i);
                let rhs = (f.block(i - 1, j) - f.block(i, j + 1)) * th;
                let size = th.norm() * (f.block(i - 1, j).norm() + f.block(i, j + 1).norm());
                worst_rec = worst_rec.max((f.block(i, j) - rhs).norm() / size);
            }
        }
        for i in 0..k {
            for j in 0..k {
                for q in 0..k {
                    if i == j || j == q || i == q {
                        continue;
                    }
                    let lhs = theta(&t, gamma, i, j) * (theta(&t, gamma, i, q) + theta(&t, gamma, q, j));
                    let rhs = theta(&t, gamma, i, q) * theta(&t, gamma, q, j);
                    worst_theta = worst_theta.max((lhs - rhs).norm() / rhs.norm());
                }
            }
        }
    }
    check(worst_dd <= 1e-10, format!("divided differences off by {worst_dd:.3e}"))?;
    check(worst_rec <= 1e-10, format!("block recurrence off by {worst_rec:.3e}"))?;
    check(worst_theta <= 1e-14, format!("theta identity off by {worst_theta:.3e}"))?;

    // standard eigenproblem collapse
    let (p, t, w) = fixtures::example2();
    let a = fixtures::frank_matrix(12);
    let prob = Problem::new(p.clone(), t.clone(), w.clone()).map_err(err)?;
    for gamma in [0.01, 0.5, 2.5730, 4.9] {
        let fv = assemble_f_varpi(&w, &t, gamma).map_err(err)?;
        check(fv == CMatrix::identity(4, 4), format!("F_gamma[varpi] != I at gamma = {gamma}"))?;
        let triple = prob.rho_triple(gamma).map_err(err)?;
        let hv = perturb::hat_transform(&triple, &t, gamma).map_err(err)?;
        let direct = triple.sigma_rho * spectral_norm(&(&hv.u_hat * pseudoinverse_default(&hv.v_hat).map_err(err)?)).map_err(err)?;
        let general = prob.beta_up(gamma).map_err(err)?;
        check(general.bound == direct, format!("beta_up {} vs s_rho ||U V^+|| {direct} at gamma = {gamma}", general.bound))?;
        let sp = build_delta_standard(&a, &t, gamma).map_err(err)?;
        check(sp.result.bound == general.bound, "standard specialization differs".into())?;
    }
    Ok(format!("dd {worst_dd:.1e}, recurrence {worst_rec:.1e}, theta {worst_theta:.1e}, collapse exact"))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("example 1 spectrum", criterion1),
        ("example 1 upper bound", criterion2),
        ("example 1 lower bound", criterion3),
        ("example 1 gamma = 0 branch", criterion4),
        ("example 1 perturbation validity", criterion5),
        ("Frank F_12 bounds and eigenvalues", criterion6),
        ("planted-spectrum property (50 instances)", criterion7),
        ("lower-bound validity (50 instances)", criterion8),
        ("construction identities (100 instances)", criterion9),
        ("oracle equivalences", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

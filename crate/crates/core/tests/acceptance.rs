//! Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::time::{Duration, Instant};

use hardy_ss_core::pde::*;
use hardy_ss_core::phase::{
    center_manifold_p0, center_manifold_q1, chart_rhs_q1, critical_points, linearize, numeric_jacobian,
    p0_tangency_residual, phase_rhs, q1_tangency_residual, CriticalPoint, Label,
};
use hardy_ss_core::shooting::*;
use hardy_ss_core::{ChartState, Params, PhaseState};
use rand::{Rng, SeedableRng};

const TRIPLES: [(f64, f64, u32); 4] = [(2.0, 1.0, 3), (2.0, 1.5, 3), (3.0, 2.0, 4), (2.0, 1.0, 5)];
/// Triples whose support fits comfortably inside `R_max = 8` for the PDE runs.
const PDE_TRIPLES: [(f64, f64, u32); 2] = [(2.0, 1.0, 3), (3.0, 2.0, 4)];

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, detail: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.pass &= ok;
        self.detail.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn report(n: usize, title: &str, budget: Duration, run: impl FnOnce(&mut Outcome)) -> bool {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    run(&mut out);
    let took = t0.elapsed();
    out.check(took <= budget, format!("runtime {:.2?} (budget {:.0?})", took, budget));
    for d in &out.detail {
        println!("    {d}");
    }
    println!("criterion {n}: {} | {title}", if out.pass { "PASS" } else { "FAIL" });
    out.pass
}

fn params(t: (f64, f64, u32)) -> Params {
    Params::unit(t.0, t.1, t.2).unwrap()
}

fn point(par: &Params, label: Label) -> CriticalPoint {
    critical_points(par, &[]).into_iter().find(|c| c.label == label).unwrap()
}

fn sorted(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn criterion_1(out: &mut Outcome) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20211);
    let mut worst: f64 = 0.0;
    let mut worst_jac: f64 = 0.0;
    let mut worst_num: f64 = 0.0;
    for _ in 0..10 {
        let m = rng.gen_range(1.05..4.0);
        let p = rng.gen_range(1.0..m);
        let n: u32 = rng.gen_range(3..=9);
        let par = Params::unit(m, p, n).unwrap();
        let nf = n as f64;
        let cases = [
            (Label::P0, [0.0, -0.5, 0.0]),
            (Label::P1, [-(m - 1.0) / 2.0, 0.5, -(p - 1.0) / 2.0]),
            (Label::Q5, [nf - 2.0, (m - p) * (nf - 2.0) / m, 2.0 + (m - 1.0) * (nf - 2.0) / m]),
        ];
        for (label, closed) in cases {
            let cp = point(&par, label);
            let lin = linearize(&par, &cp).unwrap();
            let got = lin.sorted_real_eigenvalues();
            let want = sorted(closed);
            for k in 0..3 {
                worst = worst.max((got[k] - want[k]).abs() / want[k].abs().max(1.0));
                worst = worst.max(lin.eigenvalues[k].im.abs());
            }
            // the closed-form matrix is the Jacobian of the vector field
            let jac = if label == Label::Q5 {
                numeric_jacobian(|s| chart_rhs_q1(&par, &ChartState::new(s[0], s[1], s[2])), &cp.coords)
            } else {
                numeric_jacobian(|s| phase_rhs(&par, &PhaseState::new(s[0], s[1], s[2])), &cp.coords)
            };
            for i in 0..3 {
                for j in 0..3 {
                    worst_jac = worst_jac.max((jac[i][j] - lin.matrix[i][j]).abs());
                }
            }
            let num = hardy_ss_core::linalg::eigenvalues(&jac);
            let num = sorted([num[0].re, num[1].re, num[2].re]);
            for k in 0..3 {
                worst_num = worst_num.max((num[k] - want[k]).abs());
            }
        }
    }
    out.check(worst <= 1e-10, format!("max eigenvalue error vs closed forms {worst:.1e} (tol 1e-10, 10 random triples)"));
    out.check(worst_jac <= 1e-6, format!("closed matrices vs numerical Jacobian {worst_jac:.1e} (tol 1e-6)"));
    out.check(worst_num <= 1e-6, format!("numerical-Jacobian spectra vs closed forms {worst_num:.1e} (tol 1e-6)"));
}

fn decay_order(res: impl Fn(f64) -> f64) -> f64 {
    let hs: Vec<f64> = (0..6).map(|k| 1e-2 / 2f64.powi(k)).collect();
    let ratios: Vec<f64> = hs.windows(2).map(|w| (res(w[0]).abs() / res(w[1]).abs()).log2()).collect();
    ratios.iter().copied().fold(f64::INFINITY, f64::min)
}

fn criterion_2(out: &mut Outcome) {
    for t in [(2.0, 1.0, 3), (2.0, 1.5, 3), (3.0, 2.0, 4), (2.5, 1.2, 6)] {
        let par = params(t);
        let b = center_manifold_p0(&par).b;
        let a = center_manifold_q1(&par).a;
        let want_a = -par.p() / (par.nf() - 2.0).powi(2);
        out.check((b + 2.0).abs() <= 1e-12, format!("{t:?}: b at P0 = {b} (want -2)"));
        out.check((a - want_a).abs() <= 1e-12, format!("{t:?}: a at Q1 = {a} (want {want_a})"));
        let o_p0 = decay_order(|h| p0_tangency_residual(&par, h, h));
        let o_q1 = decay_order(|h| q1_tangency_residual(&par, h));
        out.check(o_p0 >= 2.9, format!("{t:?}: P0 tangency residual order {o_p0:.3}"));
        out.check(o_q1 >= 2.9, format!("{t:?}: Q1 tangency residual order {o_q1:.3}"));
    }
}

fn criterion_3(out: &mut Outcome, results: &mut Vec<ShootingResult>) {
    for t in TRIPLES {
        let par = params(t);
        let t0 = Instant::now();
        let cfg = ShootConfig::default();
        let r = shoot(&par, &cfg).unwrap();
        let mut fine = cfg;
        fine.shot.xi_start = 1e-7;
        let r2 = shoot(&par, &fine).unwrap();
        let took = t0.elapsed();
        let dk = (r.k_star - r2.k_star).abs();
        out.check(r.bracket_width <= 1e-8, format!("{t:?}: K* = {:.10}, bracket width {:.1e}", r.k_star, r.bracket_width));
        out.check(
            r.diagnostics.flips == 1 && r.diagnostics.samples.len() == 32,
            format!("{t:?}: {} flip(s) over {} samples", r.diagnostics.flips, r.diagnostics.samples.len()),
        );
        let note = if r.diagnostics.launch_xi < 1e-7 {
            format!(" (launch moved to xi = {:.1e} at both settings)", r.diagnostics.launch_xi)
        } else {
            String::new()
        };
        out.check(dk <= 10.0 * cfg.tol_k, format!("{t:?}: |K*(1e-6) - K*(1e-7)| = {dk:.1e}{note}"));
        out.check(took <= Duration::from_secs(60), format!("{t:?}: {took:.2?} for both solves"));
        results.push(r);
    }
}

fn criterion_4(out: &mut Outcome, results: &[ShootingResult]) {
    for r in results {
        let par = r.profile.params;
        let t = (par.m(), par.p(), par.n());
        let o = fit_origin_behavior(&r.profile, &par).unwrap();
        let want = -par.log_slope();
        let rel = (o.slope - want).abs() / want.abs();
        out.check(
            rel <= 0.02 && o.decades >= 1.0,
            format!("{t:?}: origin slope {:.5} vs {:.5} ({:.2}%), {:.1} decades", o.slope, want, 100.0 * rel, o.decades),
        );
        let i = fit_interface_exponent(&r.profile, &par).unwrap();
        let (we, wa) = (par.interface_exponent(), par.interface_amplitude());
        let (re, ra) = ((i.exponent - we).abs() / we, (i.amplitude - wa).abs() / wa);
        out.check(re <= 0.05, format!("{t:?}: interface exponent {:.5} vs {we:.5} ({:.2}%)", i.exponent, 100.0 * re));
        out.check(ra <= 0.05, format!("{t:?}: interface amplitude {:.5} vs {wa:.5} ({:.2}%)", i.amplitude, 100.0 * ra));
    }
}

fn criterion_5(out: &mut Outcome, results: &[ShootingResult]) {
    let c = ShotControls::default();
    for r in results {
        let par = r.profile.params;
        let t = (par.m(), par.p(), par.n());
        let minima = verify_no_positive_minima(&r.profile);
        out.check(minima.violations.is_empty(), format!("{t:?}: {} positive interior minima", minima.violations.len()));
        let tr = phase_trace(&r.profile, &par);
        out.check(
            tr.x_monotone() && tr.z_monotone(),
            format!(
                "{t:?}: X, Z monotone over {} states (max rel. increase {:.1e}, {:.1e}; tol {:.0e})",
                tr.states.len(),
                tr.max_x_increase,
                tr.max_z_increase,
                tr.tol
            ),
        );
        let k = r.k_star;
        let pairs = [(k - 0.5, k - 0.2), (k - 0.2, k), (k, k + 0.2), (k + 0.2, k + 0.6), (k - 0.4, k + 1.0)];
        let mut bad = 0;
        let mut gap = f64::INFINITY;
        for (k1, k2) in pairs {
            let lo = integrate_shot(&par, k1, &c).unwrap();
            let hi = integrate_shot(&par, k2, &c).unwrap();
            let o = profile_ordering(&lo.trace, &hi.trace, 400).unwrap();
            bad += o.violations;
            gap = gap.min(o.min_rel_gap);
        }
        out.check(bad == 0, format!("{t:?}: f(.;K1) < f(.;K2) for 5 pairs, {bad} violations, min rel. gap {gap:.1e}"));
    }
}

const N_GRID: usize = 512;
const R_MAX: f64 = 8.0;
const T_END: f64 = 1.0;
const EPS: [f64; 3] = [0.05, 0.1, 0.2];

fn bump(par: Params, n: usize, eps: f64) -> RadialField {
    let g = RadialGrid::origin(R_MAX, n, par.n()).unwrap();
    RadialField::bump(g, par, eps, 1.0, 1.0).unwrap()
}

fn criterion_6(out: &mut Outcome, results: &[ShootingResult]) {
    for t in PDE_TRIPLES {
        let par = params(t);
        let r = results.iter().find(|r| r.profile.params == par).unwrap();
        let u0 = bump(par, N_GRID, EPS[0]);
        let c = StepControls::default().with_uniform_snapshots(0.0, T_END, 20);
        for replayed in [true, false] {
            let rep = check_eps_monotonicity(&u0, &EPS, T_END, &c, replayed).unwrap();
            out.check(
                rep.passed(),
                format!(
                    "{t:?}: eps-ordering ({}) {} violations, min gap {:.1e}, tol_ord {:.2e} (C = {:.3})",
                    if replayed { "shared steps" } else { "independent steps" },
                    rep.violations.len(),
                    rep.min_gap,
                    rep.tol_ord,
                    rep.calibration.constant
                ),
            );
            if !replayed {
                continue;
            }
            let tau = find_tau(&r.profile, &u0).unwrap();
            let giant = FriendlyGiant::new(r.profile.clone(), tau).unwrap();
            for (eps, ev) in EPS.iter().zip(&rep.evolutions) {
                let s = check_supersolution_bound(ev, &giant, rep.tol_ord);
                out.check(
                    s.passed(),
                    format!(
                        "{t:?}: eps {eps}: u <= U(., t + {tau:.3}) at {} snapshots, max u/U {:.3}",
                        s.snapshots, s.max_ratio
                    ),
                );
            }
        }
        let mut res = Vec::new();
        for n in [128usize, 256, 512] {
            let ev = evolve(&bump(par, n, EPS[0]), T_END, &StepControls::default().with_uniform_snapshots(0.0, T_END, n / 2))
                .unwrap();
            let w = weak_residual(&ev, &BumpTest { rho: 4.0, growth: 1.0 }, 0.25, T_END, EPS[0]).unwrap();
            res.push(w.residual);
        }
        let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        out.check(
            orders.iter().all(|o| *o >= 1.0),
            format!("{t:?}: weak residual n=128/256/512: {:.2e} {:.2e} {:.2e}, orders {:.2} {:.2}", res[0], res[1], res[2], orders[0], orders[1]),
        );
    }
}

fn criterion_7(out: &mut Outcome, results: &[ShootingResult]) {
    for t in PDE_TRIPLES {
        let par = params(t);
        let r = results.iter().find(|r| r.profile.params == par).unwrap();
        let giant = FriendlyGiant::new(r.profile.clone(), 1.0).unwrap();
        let mut devs = Vec::new();
        for (n, eps) in [(256usize, 2e-3), (512, 1e-3)] {
            let g = RadialGrid::origin(R_MAX, n, par.n()).unwrap();
            let tr = self_similarity_track(&giant, eps, 1.0, g, 0.1, &StepControls::default()).unwrap();
            devs.push(tr.max_deviation);
        }
        out.check(devs[1] <= 0.05, format!("{t:?}: max relative L1 deviation {:.2}% (n = 512, eps = 1e-3)", 100.0 * devs[1]));
        out.check(devs[1] < devs[0], format!("{t:?}: shrinks under joint refinement {:.2}% -> {:.2}%", 100.0 * devs[0], 100.0 * devs[1]));
    }
}

fn criterion_8(out: &mut Outcome) {
    for t in PDE_TRIPLES {
        let par = Params::new(t.0, t.1, t.2, 4.0).unwrap();
        let u0 = bump(par, N_GRID, EPS[0]);
        let c = StepControls::default().with_uniform_snapshots(0.0, T_END, 10);
        let direct = evolve(&u0, T_END, &c).unwrap();
        let cal = calibrate_tol_ord(&u0, &direct, &c).unwrap();
        let (scaling, v0) = rescale_hardy(&u0).unwrap();
        let cv = StepControls::default().with_uniform_snapshots(0.0, scaling.lambda * T_END, 10);
        let v = evolve(&v0, scaling.lambda * T_END, &cv).unwrap();
        let back = scaling.undo_evolution(&v);
        let mut worst: f64 = 0.0;
        for (a, b) in direct.snapshots.iter().zip(&back.snapshots).skip(1) {
            assert!((a.t - b.t).abs() <= 1e-12);
            worst = worst.max(relative_l1(&direct.grid, &b.u, &a.u, 0.0));
        }
        let bound = 2.0 * cal.rel_l1;
        out.check(
            worst <= bound,
            format!("{t:?}, K = 4, lambda = {}: relative L1 {worst:.1e} <= {bound:.1e} (2x grid-refinement error)", scaling.lambda),
        );
    }
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    let mut all = Vec::new();
    all.push(report(1, "closed-form eigenvalues at P0, P1, Q5", Duration::from_secs(1), criterion_1));
    all.push(report(2, "center-manifold coefficients", Duration::from_secs(5), criterion_2));
    all.push(report(3, "shooting converges", Duration::from_secs(240), |o| criterion_3(o, &mut results)));
    all.push(report(4, "asymptotic fits", Duration::from_secs(10), |o| criterion_4(o, &results)));
    all.push(report(5, "qualitative profile properties", Duration::from_secs(30), |o| criterion_5(o, &results)));
    all.push(report(6, "PDE existence construction", Duration::from_secs(300), |o| criterion_6(o, &results)));
    all.push(report(7, "self-similarity tracking", Duration::from_secs(300), |o| criterion_7(o, &results)));
    all.push(report(8, "K_hardy scaling", Duration::from_secs(300), criterion_8));
    let failed: Vec<usize> = all.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

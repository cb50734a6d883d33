//! End-to-end gate over the whole pipeline. Each criterion prints one
//! summary line (visible with --nocapture) and asserts its stated bound.

mod support;

use std::time::Instant;

use cohom1::catalog::{case3_t_of_rho, taub_nut_t_of_r, ClosedForm};
use cohom1::dynamics::{
    analytic_jet, detect_singularity, fit_infinity_model, fit_power_law, integrate,
    model_b_residual, model_c_residual, model_c_residual_fd, ricci_along, Component, State,
    Termination,
};
use cohom1::family::{classify, symbolic_ricci, ParamSet};
use cohom1::frame::{curvature_coeffs, ricci_from_curvature, ricci_from_jet, JetPoint};
use support::Rng;

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "pass" } else { "fail" };
    println!("acceptance {n} {name}: {verdict} ({detail})");
    assert!(ok, "acceptance {n} {name}: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_1_classification_sweep() {
    let started = Instant::now();
    let res = classify(3).unwrap();
    let secs = started.elapsed().as_secs_f64();

    let canon = |v: [i64; 6]| ParamSet::from_ints(v).unwrap().canonical_sign();
    let mut flat = vec![
        canon([1, 0, 0, 0, -1, 2]),
        canon([1, 0, -2, 0, -1, 0]),
        canon([1, 0, 0, 0, -1, -2]),
    ];
    flat.sort();
    let einstein = vec![canon([2, 0, -1, 0, 1, 0])];

    let ok = res.ricci_flat_families == flat
        && res.einstein_families == einstein
        && res.sweep.points_checked == 7u64.pow(6) - 1
        && res.sweep.matches_case_tree
        && secs <= 60.0;
    report(
        1,
        "classification sweep",
        ok,
        &format!(
            "{} grid points, case tree confirmed, {:.1}s",
            res.sweep.points_checked, secs
        ),
    );
}

#[test]
fn criterion_2_catalog_residuals() {
    let forms = [
        ClosedForm::TaubNut { m: 1.0 },
        ClosedForm::EguchiHanson { a: 1.0 },
        ClosedForm::FubiniStudy { alpha: 1.0 },
        ClosedForm::FubiniStudyHyperbolic { alpha: 1.0 },
        ClosedForm::Case3 { c: 1.0 },
    ];
    let mut worst_ode = 0.0f64;
    let mut worst_ric = 0.0f64;
    for form in forms {
        let params = form.matching_params();
        let lam = form.einstein_constant();
        for s in form.sample_coords(100).unwrap() {
            let (r1, r2) = form.ode_residual(&params, s).unwrap();
            worst_ode = worst_ode.max(r1.abs()).max(r2.abs());
            let ric = ricci_from_jet(&form.arclength_jet(s).unwrap());
            let dev = (ric.ric00 - lam)
                .abs()
                .max((ric.ric11 - lam).abs())
                .max((ric.ric22 - lam).abs());
            worst_ric = worst_ric.max(dev);
        }
    }
    let ok = worst_ode <= 1e-12 && worst_ric <= 1e-9;
    report(
        2,
        "catalog residuals",
        ok,
        &format!("5 forms x 100 points, ode {worst_ode:.2e}, ricci {worst_ric:.2e}"),
    );
}

#[test]
fn criterion_3_einstein_trajectories() {
    let params = ClosedForm::FubiniStudy { alpha: 1.0 }.matching_params();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        let t0 = std::f64::consts::FRAC_PI_4 / alpha;
        let a1 = 1.0 / (2.0 * alpha);
        let a2 = std::f64::consts::FRAC_1_SQRT_2 / alpha;
        let t_end = 0.45 * std::f64::consts::PI / alpha;
        let traj =
            integrate(&params, State::new(t0, a1, a2).unwrap(), t_end, 1e-10).unwrap();
        assert_eq!(traj.termination(), Termination::ReachedEnd);
        let want = 12.0 * alpha * alpha;
        for ric in ricci_along(&traj) {
            worst = worst.max(rel(ric.ric00, want));
        }
    }
    let ok = worst <= 1e-8;
    report(
        3,
        "einstein trajectories",
        ok,
        &format!("ric00 vs 12 alpha^2, worst relative {worst:.2e}"),
    );
}

fn case3_backward_run(c: f64) -> cohom1::dynamics::Trajectory {
    let form = ClosedForm::Case3 { c };
    let start = form.evaluate(0.5 * c).unwrap();
    let t_init = case3_t_of_rho(c, 0.5 * c).unwrap();
    integrate(
        &form.matching_params(),
        State::new(t_init, start.a1, start.a2).unwrap(),
        -1.0,
        1e-10,
    )
    .unwrap()
}

#[test]
fn criterion_4_incomplete_metric_tracking() {
    let c = 1.0;
    let form = ClosedForm::Case3 { c };
    let traj = case3_backward_run(c);
    let mut sup = 0.0f64;
    for i in 0..=40 {
        let rho = 0.5 * c * 1e-2f64.powf(i as f64 / 40.0);
        let t = case3_t_of_rho(c, rho).unwrap();
        let got = traj.sample_at(t).expect("inside the covered range");
        let want = form.evaluate(rho).unwrap();
        sup = sup.max(rel(got.a1, want.a1)).max(rel(got.a2, want.a2));
    }
    let ok = sup <= 1e-8;
    report(
        4,
        "incomplete metric tracking",
        ok,
        &format!("two decades of rho, sup relative {sup:.2e}"),
    );
}

#[test]
fn criterion_5_singular_exponents() {
    let c = 1.0f64;
    let gamma = 3f64.cbrt() / c.powf(2.0 / 3.0);
    let traj = case3_backward_run(c);
    let t0 = detect_singularity(&traj).unwrap().t0_estimate;
    let fit2 = fit_power_law(&traj, Component::A2, t0, 2.0).unwrap();
    let fit1 = fit_power_law(&traj, Component::A1, t0, 2.0).unwrap();
    let coef_rel = (fit1.coefficient / (fit2.coefficient * fit2.coefficient / 3.0) - 1.0).abs();
    let ok = (fit2.exponent - 1.0 / 3.0).abs() <= 0.02
        && (fit1.exponent + 1.0 / 3.0).abs() <= 0.02
        && coef_rel <= 0.05
        && (fit2.coefficient / gamma - 1.0).abs() <= 0.05;
    report(
        5,
        "singular exponents",
        ok,
        &format!(
            "A2 ~ {:.4} s^{:.4}, A1 ~ {:.4} s^{:.4}, coefficient relation off by {:.1}%",
            fit2.coefficient,
            fit2.exponent,
            fit1.coefficient,
            fit1.exponent,
            100.0 * coef_rel
        ),
    );
}

#[test]
fn criterion_6_logarithmic_infinity() {
    let c = 1.0;
    let form = ClosedForm::Case3 { c };
    let start = form.evaluate(0.5).unwrap();
    let t_init = case3_t_of_rho(c, 0.5).unwrap();
    let traj = integrate(
        &form.matching_params(),
        State::new(t_init, start.a1, start.a2).unwrap(),
        1.2e4,
        1e-10,
    )
    .unwrap();
    assert_eq!(traj.termination(), Termination::ReachedEnd);

    let t = 1e4;
    let at = traj.sample_at(t).unwrap();
    let fit = fit_infinity_model(&traj).unwrap();
    let b_scaled = model_b_residual(fit.alpha, fit.beta, t) * t * t / t.ln();
    let b_rel = (b_scaled / (-fit.beta * fit.beta) - 1.0).abs();
    let ok = at.a1 / t <= 1e-3
        && (at.a2 / (2.0 * t) - 1.0).abs() <= 1e-2
        && b_rel <= 0.02;
    report(
        6,
        "logarithmic infinity",
        ok,
        &format!(
            "A1/t {:.2e}, A2/2t - 1 {:.2e}, scaled B-residual off by {:.2}%",
            at.a1 / t,
            (at.a2 / (2.0 * t) - 1.0).abs(),
            100.0 * b_rel
        ),
    );
}

#[test]
fn criterion_7_c_model_residual() {
    let mut rng = Rng::new(0x5eed_c0de);
    let mut worst_fd = 0.0f64;
    let mut worst_closed = 0.0f64;
    for _ in 0..100 {
        let gamma = rng.uniform(0.3, 3.0);
        let t0 = rng.uniform(-5.0, 5.0);
        let t = t0 + rng.uniform(0.5, 50.0);
        worst_closed = worst_closed.max((model_c_residual(gamma, t0, t) + 0.32).abs());
        worst_fd = worst_fd.max((model_c_residual_fd(gamma, t0, t, 1e-5) + 0.32).abs());
    }
    let ok = worst_closed == 0.0 && worst_fd <= 1e-6;
    report(
        7,
        "c-model residual",
        ok,
        &format!("100 draws, closed form exact, fd off by {worst_fd:.2e}"),
    );
}

#[test]
fn criterion_8_ricci_cross_validation() {
    let mut rng = Rng::new(0xabad_cafe);
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));

    let mut pairs_ok = true;
    for _ in 0..1000 {
        let params = loop {
            let mut v = [0i64; 6];
            for e in v.iter_mut() {
                *e = rng.int_in(-3, 3);
            }
            if let Ok(p) = ParamSet::from_ints(v) {
                break p;
            }
        };
        let a1 = rng.uniform(0.2, 3.0);
        let a2 = rng.uniform(0.2, 3.0);
        let jet = analytic_jet(&params, a1, a2).unwrap();
        let frame = ricci_from_jet(&jet);
        let (s00, s11, s22) = symbolic_ricci(&params).eval(a1, a2).unwrap();
        pairs_ok &= close(frame.ric00, s00, 1e-10)
            && close(frame.ric11, s11, 1e-10)
            && close(frame.ric22, s22, 1e-10);
    }

    let mut jets_ok = true;
    for _ in 0..1000 {
        let jet = JetPoint::new(
            rng.uniform(0.2, 3.0),
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
            rng.uniform(0.2, 3.0),
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
        )
        .unwrap();
        let direct = ricci_from_jet(&jet);
        let contracted = ricci_from_curvature(&curvature_coeffs(&jet));
        jets_ok &= close(direct.ric00, contracted.ric00, 1e-12)
            && close(direct.ric11, contracted.ric11, 1e-12)
            && close(direct.ric22, contracted.ric22, 1e-12);
    }

    let ok = pairs_ok && jets_ok;
    report(
        8,
        "ricci cross-validation",
        ok,
        "1000 symbolic/frame pairs at 1e-10, 1000 contraction jets at 1e-12",
    );
}

#[test]
fn criterion_9_convergence_ladder() {
    let form = ClosedForm::TaubNut { m: 1.0 };
    let params = form.matching_params();
    let start = form.evaluate(2.0).unwrap();
    let t_init = taub_nut_t_of_r(1.0, 2.0).unwrap();
    let t_end = taub_nut_t_of_r(1.0, 5.0).unwrap();
    let target = form.evaluate(5.0).unwrap();

    let errs: Vec<f64> = (0..8)
        .map(|k| {
            let tol = 1e-3 / 2f64.powi(k);
            let traj = integrate(
                &params,
                State::new(t_init, start.a1, start.a2).unwrap(),
                t_end,
                tol,
            )
            .unwrap();
            let end = traj.last_reached();
            rel(end.a1, target.a1).max(rel(end.a2, target.a2))
        })
        .collect();

    let mut ok = true;
    for pair in errs.windows(2) {
        ok &= pair[1] <= pair[0] / 4.0 || pair[1] <= 1e-13;
    }
    let listed: Vec<String> = errs.iter().map(|e| format!("{e:.1e}")).collect();
    report(
        9,
        "convergence ladder",
        ok,
        &format!("end errors per tolerance halving: {}", listed.join(" -> ")),
    );
}

//! End-to-end checks of the classification stack: optimizer agreement,
//! first-order conditions, gradient correctness, tuning plumbing, selection
//! behavior under null and signal, and test size of the diagnostics.

use boombust_core::rng::substream;
use boombust_regress::{
    backward_stepwise, cv_tune, diagnostics, enet_objective, enet_path, fit_enet, fit_logit,
    kkt_violation, lambda_max, nll_gradient, CvPlan, Design,
};
use rand::Rng;
use rand_distr::StandardNormal;

/// Simulated logistic problem: standard-normal features, Bernoulli response
/// through the sigmoid of `intercept + x·beta`.
fn simulate_problem(seed: u64, n: usize, beta: &[f64], intercept: f64) -> Design {
    let mut rng = substream(seed, 0);
    let p = beta.len();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let eta: f64 = intercept + row.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>();
        let prob = 1.0 / (1.0 + (-eta).exp());
        y.push(u8::from(rng.random::<f64>() < prob));
        rows.push(row);
    }
    let names: Vec<String> = (0..p).map(|j| format!("x{j}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Design::new(&refs, rows, y).unwrap()
}

#[test]
fn unpenalized_coordinate_descent_agrees_with_newton() {
    // λ = 0 removes the penalty, so the coordinate-descent optimum and the
    // Newton maximum-likelihood fit are the same point; compare coefficient
    // by coefficient on twenty random problems.
    for seed in 0..20u64 {
        let d = simulate_problem(1_000 + seed, 250, &[0.8, -0.5, 0.3], 0.2);
        let std = d.standardize().unwrap();
        let newton = fit_logit(&std).unwrap();
        let cd = fit_enet(&std, 0.5, 0.0).unwrap();
        assert!(
            (cd.intercept_std - newton.intercept).abs() < 1e-4,
            "seed {seed}: intercepts {} vs {}",
            cd.intercept_std,
            newton.intercept
        );
        for (j, (a, b)) in cd.slopes_std.iter().zip(&newton.slopes).enumerate() {
            assert!((a - b).abs() < 1e-4, "seed {seed} slope {j}: {a} vs {b}");
        }
    }
}

#[test]
fn first_order_conditions_hold_across_the_grid() {
    for seed in 0..10u64 {
        let d = simulate_problem(2_000 + seed, 200, &[1.0, -0.6], -0.3);
        let std = d.standardize().unwrap();
        for alpha in [0.05, 0.5, 1.0] {
            let top = lambda_max(&std, alpha).unwrap();
            for frac in [0.5, 0.1, 0.01] {
                let lambda = top * frac;
                let fit = fit_enet(&std, alpha, lambda).unwrap();
                let v = kkt_violation(&std, fit.intercept_std, &fit.slopes_std, alpha, lambda);
                assert!(v < 1e-6, "seed {seed} α={alpha} λ={lambda}: violation {v}");
            }
        }
    }
}

#[test]
fn analytic_gradient_matches_central_differences() {
    // The penalized objective is differentiable wherever no slope sits at
    // zero; compare its analytic gradient against central differences at
    // twenty random interior points.
    let d = simulate_problem(3_000, 150, &[0.7, -0.4], 0.1);
    let std = d.standardize().unwrap();
    let (alpha, lambda) = (0.6, 0.05);
    let h = 1e-5;
    let mut rng = substream(42, 0);
    for point in 0..20 {
        let b0: f64 = rng.sample::<f64, _>(StandardNormal);
        let slopes: Vec<f64> = (0..2)
            .map(|_| {
                // Keep every coordinate well away from the kink at zero.
                let v: f64 = rng.sample::<f64, _>(StandardNormal);
                v.signum() * (0.2 + v.abs())
            })
            .collect();
        let (g0, g) = nll_gradient(&std, b0, &slopes);
        let full: Vec<f64> = std::iter::once(g0)
            .chain(g.iter().enumerate().map(|(j, gj)| {
                gj + lambda * (1.0 - alpha) * slopes[j] + lambda * alpha * slopes[j].signum()
            }))
            .collect();
        for k in 0..=2 {
            let mut up = (b0, slopes.clone());
            let mut dn = (b0, slopes.clone());
            if k == 0 {
                up.0 += h;
                dn.0 -= h;
            } else {
                up.1[k - 1] += h;
                dn.1[k - 1] -= h;
            }
            let fd = (enet_objective(&std, up.0, &up.1, alpha, lambda)
                - enet_objective(&std, dn.0, &dn.1, alpha, lambda))
                / (2.0 * h);
            let rel = (full[k] - fd).abs() / full[k].abs().max(1.0);
            assert!(rel < 1e-6, "point {point} coord {k}: analytic {} vs fd {fd}", full[k]);
        }
    }
}

#[test]
fn warm_and_cold_starts_land_on_the_same_path() {
    let d = simulate_problem(4_000, 220, &[0.9, -0.7, 0.2], 0.0);
    let std = d.standardize().unwrap();
    let alpha = 0.7;
    let top = lambda_max(&std, alpha).unwrap();
    let lambdas: Vec<f64> = (0..8).map(|i| top * 0.9f64 * 0.5f64.powi(i)).collect();
    let warm = enet_path(&std, alpha, &lambdas).unwrap();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let cold = fit_enet(&std, alpha, lambda).unwrap();
        assert!(
            (warm[i].intercept_std - cold.intercept_std).abs() < 1e-8,
            "λ={lambda}: intercepts differ"
        );
        for (a, b) in warm[i].slopes_std.iter().zip(&cold.slopes_std) {
            assert!((a - b).abs() < 1e-8, "λ={lambda}: slopes {a} vs {b}");
        }
    }
}

#[test]
fn fitting_scale_does_not_change_predictions() {
    // Maximum likelihood is invariant to affine reparameterization: fitting
    // on the standardized scale and predicting standardized rows must equal
    // fitting raw and predicting raw rows.
    for seed in 0..5u64 {
        let mut d = simulate_problem(5_000 + seed, 180, &[0.6, -0.8], 0.4);
        // Give the columns distinct scales so the check is not vacuous.
        let rows: Vec<Vec<f64>> =
            d.rows().iter().map(|r| vec![3.0 + 10.0 * r[0], -2.0 + 0.1 * r[1]]).collect();
        d = Design::new(&["x0", "x1"], rows, d.response().to_vec()).unwrap();
        let std = d.standardize().unwrap();
        let raw_fit = fit_logit(&d).unwrap();
        let std_fit = fit_logit(&std).unwrap();
        let p_raw = raw_fit.predict_proba(&d).unwrap();
        let p_std = std_fit.predict_proba(&std).unwrap();
        for (a, b) in p_raw.iter().zip(&p_std) {
            assert!((a - b).abs() < 1e-10, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn newton_estimates_are_consistent() {
    let d = simulate_problem(6_000, 20_000, &[0.5, -1.0], 0.0);
    let fit = fit_logit(&d).unwrap();
    assert!((fit.slopes[0] - 0.5).abs() < 0.06, "slope 0: {}", fit.slopes[0]);
    assert!((fit.slopes[1] + 1.0).abs() < 0.06, "slope 1: {}", fit.slopes[1]);
    assert!(fit.intercept.abs() < 0.06, "intercept: {}", fit.intercept);
    assert!(fit.grad_max < 1e-6);
}

#[test]
fn link_test_keeps_its_nominal_size() {
    // Correctly specified index: the squared-predictor term should reject at
    // the 5% level about 5% of the time.
    let mut rejections = 0u32;
    let n_seeds = 500u32;
    for seed in 0..n_seeds {
        let d = simulate_problem(7_000 + u64::from(seed), 600, &[0.8, -0.5], -0.2);
        let fit = fit_logit(&d).unwrap();
        let diag = diagnostics(&d, &fit).unwrap();
        if diag.link_test_p < 0.05 {
            rejections += 1;
        }
    }
    let rate = f64::from(rejections) / f64::from(n_seeds);
    assert!(
        (0.03..=0.07).contains(&rate),
        "link-test rejection rate {rate} outside [0.03, 0.07]"
    );
}

#[test]
fn stepwise_keeps_signal_and_discards_noise() {
    // Pure noise: the modal outcome over 200 seeds is the intercept-only
    // model (each of four noise features survives with chance ≈ p_out).
    let mut intercept_only = 0;
    for seed in 0..200u64 {
        let d = simulate_problem(8_000 + seed, 250, &[0.0, 0.0, 0.0, 0.0], 0.1);
        let sel = backward_stepwise(&d, 0.05).unwrap();
        if sel.kept.is_empty() {
            intercept_only += 1;
        }
    }
    assert!(
        intercept_only > 100,
        "intercept-only in only {intercept_only}/200 null runs"
    );

    // One strong predictor among noise: it must survive essentially always.
    let mut survived = 0;
    for seed in 0..200u64 {
        let d = simulate_problem(9_000 + seed, 250, &[2.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        let sel = backward_stepwise(&d, 0.05).unwrap();
        if sel.kept.contains(&0) {
            survived += 1;
        }
    }
    assert!(survived >= 190, "strong predictor survived only {survived}/200 runs");
}

#[test]
fn expanding_window_tuning_covers_the_documented_plan() {
    let d = simulate_problem(10_000, 192, &[1.2, -0.9], 0.0);
    let plan = CvPlan::new(120, 12, 15, 15).unwrap();
    let out = cv_tune(&d, &plan).unwrap();
    let table = &out.table;
    // Six folds over observations 120..192, none skipped; the grid honors
    // fifteen points per dimension.
    assert_eq!(table.folds_used, 6);
    assert!(table.skipped_folds.is_empty());
    assert_eq!(table.cells.len(), 225);
    // The α grid spans [0.05, 1] and each λ path descends three decades.
    let alphas: std::collections::BTreeSet<u64> =
        table.cells.iter().map(|c| c.alpha.to_bits()).collect();
    assert_eq!(alphas.len(), 15);
    // Selection is the table argmin.
    let min = table
        .cells
        .iter()
        .map(|c| c.mean_loss)
        .fold(f64::INFINITY, f64::min);
    let picked = table
        .cells
        .iter()
        .find(|c| c.alpha == out.alpha && c.lambda == out.lambda)
        .expect("chosen cell in table");
    assert!((picked.mean_loss - min).abs() <= 1e-9);
    // The refit carries the table and uses the chosen pair.
    assert_eq!(out.fit.alpha, out.alpha);
    assert_eq!(out.fit.lambda, out.lambda);
    assert_eq!(out.fit.cv.as_ref().map(|t| t.cells.len()), Some(225));
    // With strong signal and 72 held-out points, tuning should not pick the
    // fully-killed top of a path.
    assert!(out.fit.active.len() <= 2);
}

#[test]
fn tuning_errors_when_every_fold_is_single_class() {
    let rows: Vec<Vec<f64>> = (0..192).map(|i| vec![(i as f64).sin(), (i as f64).cos()]).collect();
    let y: Vec<u8> = (0..192).map(|i| u8::from(i >= 180)).collect();
    let d = Design::new(&["a", "b"], rows, y).unwrap();
    let plan = CvPlan::new(120, 12, 3, 3).unwrap();
    assert!(cv_tune(&d, &plan).is_err());
}

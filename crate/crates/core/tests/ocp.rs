mod common;

use common::*;
use dpc_core::ocp::*;
use dpc_core::predictors::*;
use dpc_core::signals::HankelConfig;
use dpc_core::{Mat, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Fixture {
    tpc: TransientPredictor,
    deepc: DeePCData,
    pasts: Vec<Vector>,
}

fn fixture() -> Fixture {
    let plant = random_lti(4, 2, 2, 41);
    let cfg = HankelConfig::new(6, 8, 200).unwrap();
    let (u, y) = excite(&plant, cfg.n_samples, 1);
    let (uv, yv) = excite(&plant, 60, 2);
    Fixture {
        tpc: fit_transient_predictor(&u, &y, cfg).unwrap(),
        deepc: build_deepc_data(&u, &y, cfg).unwrap(),
        pasts: [0, 20, 40]
            .iter()
            .map(|&t| stacked_past(&uv, &yv, t, cfg.tau_p))
            .collect(),
    }
}

fn weights() -> WeightSpec {
    WeightSpec {
        q_bar: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
        r_bar: vec![vec![1.0, 0.0], vec![0.0, 3.0]],
        q_norm: vec![0.5, 2.0],
        r_norm: vec![1.0, 0.25],
        lambda_g2: 0.7,
        lambda_sigma: 40.0,
    }
}

fn bounds() -> OcpBounds {
    OcpBounds::symmetric_input(2, 0.4)
}

/// `Σ_k v_kᵀ W v_k` over consecutive blocks of `v`.
fn stage_cost(v: &Vector, w: &[Vec<f64>], norm: &[f64]) -> f64 {
    let n = w.len();
    let mut total = 0.0;
    for k in 0..v.len() / n {
        for i in 0..n {
            for j in 0..n {
                total += v[k * n + i] / norm[i] * w[i][j] * v[k * n + j] / norm[j];
            }
        }
    }
    total
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn tpc_objective_is_the_tracking_cost_up_to_a_constant() {
    let fx = fixture();
    let w = weights();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for z in &fx.pasts {
        let qp = build_tpc_qp(&fx.tpc, &w, &bounds(), z).unwrap();
        let free = fx.tpc.predict(z, &Vector::zeros(qp.n_dec())).unwrap();
        let constant = stage_cost(&free, &w.q_bar, &w.q_norm);
        for _ in 0..4 {
            let u = randn(qp.n_dec(), 1, &mut rng).column(0).into_owned();
            let y = fx.tpc.predict(z, &u).unwrap();
            let want = stage_cost(&y, &w.q_bar, &w.q_norm) + stage_cost(&u, &w.r_bar, &w.r_norm);
            assert!(close(2.0 * qp.objective(&u) + constant, want));
        }
    }
}

#[test]
fn deepc_objective_separates_fit_and_regularization() {
    let fx = fixture();
    let w = weights();
    let d = &fx.deepc;
    let qp = build_deepc_qp(d, &w, &bounds(), &fx.pasts[0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = randn(qp.n_dec(), 1, &mut rng).column(0).into_owned();
    let (g, sigma) = qp.deepc_parts(&x).unwrap();
    let want = stage_cost(&(&d.y_f * &g), &w.q_bar, &w.q_norm)
        + stage_cost(&(&d.u_f * &g), &w.r_bar, &w.r_norm)
        + w.lambda_g2 * g.norm_squared()
        + w.lambda_sigma * sigma.norm_squared();
    assert!(close(2.0 * qp.objective(&x), want));
    assert_eq!(qp.inputs_of(&x), &d.u_f * &g);
}

#[test]
fn modified_deepc_objective_penalizes_the_past_mismatch() {
    let fx = fixture();
    let w = weights();
    let d = &fx.deepc;
    let z = &fx.pasts[1];
    let qp = build_modified_deepc_qp(d, &w, &bounds(), z).unwrap();
    let (u_p, y_p) = split_past(z, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = randn(qp.n_dec(), 1, &mut rng).column(0).into_owned();
    let mismatch = (&d.u_p * &g - &u_p).norm_squared() + (&d.y_p * &g - &y_p).norm_squared();
    let want = stage_cost(&(&d.y_f * &g), &w.q_bar, &w.q_norm)
        + stage_cost(&(&d.u_f * &g), &w.r_bar, &w.r_norm)
        + w.lambda_g2 * g.norm_squared()
        + w.lambda_sigma * mismatch;
    let constant = w.lambda_sigma * (u_p.norm_squared() + y_p.norm_squared());
    assert!(close(2.0 * qp.objective(&g) + constant, want));
}

#[test]
fn refreshing_a_problem_equals_rebuilding_it() {
    let fx = fixture();
    let w = weights();
    let mut b = bounds();
    b.y_lb = Some(Vector::from_vec(vec![-1.0, -2.0]));
    b.y_ub = Some(Vector::from_vec(vec![1.5, 2.0]));
    type Build<'a> = Box<dyn Fn(&Vector) -> QpProblem + 'a>;
    let builders: Vec<Build> = vec![
        Box::new(|z| build_tpc_qp(&fx.tpc, &w, &b, z).unwrap()),
        Box::new(|z| build_deepc_qp(&fx.deepc, &w, &b, z).unwrap()),
        Box::new(|z| build_modified_deepc_qp(&fx.deepc, &w, &b, z).unwrap()),
    ];
    for build in &builders {
        let mut qp = build(&fx.pasts[0]);
        refresh_qp(&mut qp, &fx.pasts[2]).unwrap();
        assert_eq!(qp, build(&fx.pasts[2]));
    }
}

#[test]
fn refresh_rejects_a_wrong_past_length() {
    let fx = fixture();
    let mut qp = build_tpc_qp(&fx.tpc, &weights(), &bounds(), &fx.pasts[0]).unwrap();
    assert!(refresh_qp(&mut qp, &Vector::zeros(3)).is_err());
}

#[test]
fn conic_form_has_the_same_feasible_set() {
    let fx = fixture();
    let mut b = bounds();
    let free = fx.tpc.predict(&fx.pasts[0], &Vector::zeros(16)).unwrap();
    b.y_ub = Some(Vector::from_element(2, free.max() + 0.05));
    let qp = build_tpc_qp(&fx.tpc, &weights(), &b, &fx.pasts[0]).unwrap();
    let cone = to_conic(&qp);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut inside, mut outside) = (0, 0);
    for k in 0..400 {
        let scale = 10f64.powf(-3.0 + 3.0 * (k % 20) as f64 / 19.0);
        let x = randn(qp.n_dec(), 1, &mut rng).column(0).into_owned() * scale;
        let gx = &qp.g * &x;
        let direct = (0..qp.n_dec()).all(|j| qp.x_lb[j] <= x[j] && x[j] <= qp.x_ub[j])
            && (0..qp.n_ineq()).all(|i| qp.g_lb[i] <= gx[i] && gx[i] <= qp.g_ub[i]);
        let s = &cone.b - &cone.a * &x;
        let conic = cone.cones.iter().zip(s.iter()).all(|(tag, v)| match tag {
            ConeTag::Zero => *v == 0.0,
            ConeTag::Nonneg => *v >= 0.0,
        });
        assert_eq!(direct, conic);
        if direct {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    assert!(inside > 0 && outside > 0);
    assert_eq!(cone.zero_rows(), 0);
    // box rows on both sides plus the upper output rows
    assert_eq!(cone.a.nrows(), 2 * qp.n_dec() + qp.n_ineq());
}

#[test]
fn equalities_become_zero_cone_rows() {
    let fx = fixture();
    let qp = build_deepc_qp(&fx.deepc, &weights(), &bounds(), &fx.pasts[0]).unwrap();
    let cone = to_conic(&qp);
    assert_eq!(cone.zero_rows(), qp.n_eq());
    assert_eq!(cone.a.rows(0, qp.n_eq()), qp.a_eq.rows(0, qp.n_eq()));
}

fn unconstrained_minimizer(qp: &QpProblem) -> Vector {
    qp.p.clone().lu().solve(&-&qp.q).unwrap()
}

#[test]
fn closed_form_tpc_is_the_unconstrained_minimizer() {
    let fx = fixture();
    let w = weights();
    for z in &fx.pasts {
        let qp = build_tpc_qp(&fx.tpc, &w, &bounds(), z).unwrap();
        let u = closed_form_tpc(&fx.tpc, &w, z).unwrap();
        assert!(rel_err(&u, &unconstrained_minimizer(&qp)) < 1e-9);
    }
}

#[test]
fn closed_form_deepc_is_the_soft_past_minimizer() {
    let fx = fixture();
    let w = weights();
    let gain = closed_form_deepc_gain(&fx.deepc, &w).unwrap();
    for z in &fx.pasts {
        let qp = build_modified_deepc_qp(&fx.deepc, &w, &bounds(), z).unwrap();
        let want = qp.inputs_of(&unconstrained_minimizer(&qp));
        assert!(rel_err(&(&gain * z), &want) < 1e-7);
        assert!(rel_err(&closed_form_deepc(&fx.deepc, &w, z).unwrap(), &want) < 1e-7);
    }
}

#[test]
fn weights_reject_a_wrong_channel_count() {
    let fx = fixture();
    let err = build_tpc_qp(&fx.tpc, &WeightSpec::tpc_default(), &bounds(), &fx.pasts[0]);
    assert!(err.is_err());
    let m = Mat::identity(2, 2);
    assert_eq!(weights().r_step()[(1, 1)], 3.0 / 0.0625 * m[(1, 1)]);
}

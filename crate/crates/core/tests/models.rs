use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweet_affect::eval::pearson;
use tweet_affect::features::FeatureVector;
use tweet_affect::models::feed_forward::{self, Activation, Mlp, TrainOptions};
use tweet_affect::models::kernel_svr::{self, kernel_matrix, SvrParams};
use tweet_affect::models::{self, average_runs, cross_val_score, grid_search, PredictorSpec};

fn smooth(x: f64) -> f64 {
    0.5 + 0.3 * (3.0 * x).sin()
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn params(epsilon: f64, cost: f64, gamma: f64) -> SvrParams {
    SvrParams {
        epsilon,
        cost,
        gamma,
        tolerance: 1e-10,
        max_passes: 100_000,
    }
}

#[test]
fn five_points_fit_within_epsilon_like_the_exact_interpolant() {
    let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 4.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| smooth(r[0])).collect();
    let gamma = 2.0;
    let cost = 10.0;

    // exact interpolant: [K 1; 1' 0] [b; c] = [y; 0]
    let k = kernel_matrix(&x, gamma);
    let mut sys: Vec<Vec<f64>> = k.iter().map(|row| row.iter().copied().chain([1.0]).collect()).collect();
    sys.push(vec![1.0; 5].into_iter().chain([0.0]).collect());
    let sol = dense_solve(sys, y.iter().copied().chain([0.0]).collect());
    let interp = |p: &[f64]| -> f64 { (0..5).map(|i| sol[i] * kernel_svr::rbf(&x[i], p, gamma)).sum::<f64>() + sol[5] };
    for (row, yi) in x.iter().zip(&y) {
        assert!((interp(row) - yi).abs() < 1e-9);
    }
    assert!(sol[..5].iter().all(|b| b.abs() < cost), "exact fit is feasible for this cost");

    let fit = kernel_svr::fit(&x, &y, &params(0.01, cost, gamma));
    assert!(fit.converged);
    for (row, yi) in x.iter().zip(&y) {
        let p = fit.model.predict_one(row);
        assert!((p - yi).abs() <= 0.01 + 1e-9, "{p} vs {yi}");
        assert!((p - interp(row)).abs() <= 0.01 + 1e-9);
    }
}

#[test]
fn duplicated_points_with_halved_cost_give_the_same_predictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<Vec<f64>> = (0..15).map(|_| vec![rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0)]).collect();
    let y: Vec<f64> = x.iter().map(|r| smooth(r[0]) + 0.1 * r[1] + rng.gen_range(-0.05..0.05)).collect();
    let once = kernel_svr::fit(&x, &y, &params(0.02, 1.0, 0.7));
    let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
    let y2: Vec<f64> = y.iter().chain(&y).copied().collect();
    let twice = kernel_svr::fit(&x2, &y2, &params(0.02, 0.5, 0.7));
    assert!(once.converged && twice.converged);
    for i in 0..40 {
        let p = [i as f64 / 20.0, (i as f64 / 7.0).sin()];
        let (a, b) = (once.model.predict_one(&p), twice.model.predict_one(&p));
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

fn features(rows: &[Vec<f64>]) -> Vec<FeatureVector> {
    rows.iter().map(|r| FeatureVector::new("x", r.clone())).collect()
}

fn toy_data(seed: u64, n: usize, width: usize) -> (Vec<FeatureVector>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let y = rows.iter().map(|r| (0.5 + 0.3 * r[0] - 0.2 * r[1] * r[1]).clamp(0.0, 1.0)).collect();
    (features(&rows), y)
}

#[test]
fn feed_forward_loss_halves_within_default_budget() {
    let (x, y) = toy_data(11, 20, 4);
    let xm = Array2::from_shape_fn((20, 4), |(i, j)| x[i].values[j]);
    let spec = PredictorSpec::feed_forward(vec![600, 200]);
    let opts = TrainOptions {
        epochs: spec.epochs,
        batch_size: spec.batch_size,
        learning_rate: spec.learning_rate,
        decay: spec.lr_decay,
        decay_every: spec.lr_decay_every,
    };
    let mut halved = 0;
    for seed in 0..10 {
        let s = spec.with_seed(seed);
        let mut net = s.init_network(4, true);
        let out = feed_forward::train(&mut net, xm.view(), &y, &opts, &mut ChaCha8Rng::seed_from_u64(seed));
        let (first, last) = (out.loss_trace[0], *out.loss_trace.last().unwrap());
        assert_eq!(out.loss_trace.len(), spec.epochs + 1);
        if net.loss(xm.view(), &y) <= 0.5 * first && last <= first {
            halved += 1;
        }
    }
    assert!(halved >= 9, "loss halved for {halved} of 10 seeds");
}

#[test]
fn linear_layer_gradient_matches_least_squares_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = Mlp::new(3, &[], Activation::Relu, Activation::Linear, vec![], &mut rng);
    let x = Array2::from_shape_fn((6, 3), |_| rng.gen_range(-2.0..2.0));
    let y: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
    let w = &net.layers[0].weights;
    let b = net.layers[0].bias[0];
    let resid: Vec<f64> = (0..6).map(|i| (0..3).map(|j| w[[0, j]] * x[[i, j]]).sum::<f64>() + b - y[i]).collect();
    let mut expect_w = [0.0; 3];
    for j in 0..3 {
        expect_w[j] = (0..6).map(|i| resid[i] * x[[i, j]]).sum::<f64>() / 6.0;
    }
    let expect_b = resid.iter().sum::<f64>() / 6.0;
    let (_, g) = net.gradients(x.view(), &y);
    for j in 0..3 {
        assert!((g.weights[0][[0, j]] - expect_w[j]).abs() < 1e-10);
    }
    assert!((g.bias[0][0] - expect_b).abs() < 1e-10);
}

#[test]
fn zero_network_output_bias_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut net = Mlp::new(3, &[4], Activation::Relu, Activation::Sigmoid, vec![], &mut rng);
    for k in 0..net.param_count() {
        net.set_param(k, 0.0);
    }
    let x = Array2::from_shape_vec((1, 3), vec![0.3, -0.1, 0.9]).unwrap();
    let target = 0.8;
    let (_, g) = net.gradients(x.view(), &[target]);
    // sigmoid(0) = 0.5 and its slope there is 0.25
    assert_eq!(g.bias[1][0], (0.5 - target) * 0.25);
    let err = feed_forward::gradient_check(&net, &[0.3, -0.1, 0.9], target, 1e-5);
    assert!(err < 1e-9, "{err}");
}

#[test]
fn average_runs_is_the_mean_of_single_runs() {
    let (x, y) = toy_data(3, 40, 3);
    let ids: Vec<String> = (0..40).map(|i| format!("r{i}")).collect();
    let mut spec = PredictorSpec::feed_forward(vec![8]);
    spec.epochs = 15;
    let avg = average_runs(&spec, &x, &y, &ids, &x, 4, 100).unwrap();
    let singles: Vec<Vec<f64>> = (0..4)
        .map(|r| {
            let m = models::train(&spec.with_seed(100 + r), &x, &y).unwrap();
            m.predict(&ids, &x).unwrap().values
        })
        .collect();
    for i in 0..40 {
        let mean = singles.iter().map(|s| s[i]).sum::<f64>() / 4.0;
        assert!((avg.values[i] - mean).abs() < 1e-12);
    }

    let svr = PredictorSpec::kernel_svr(0.05);
    let ten = average_runs(&svr, &x, &y, &ids, &x, 10, 0).unwrap();
    let one = average_runs(&svr, &x, &y, &ids, &x, 1, 0).unwrap();
    for (a, b) in ten.values.iter().zip(&one.values) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn grid_search_prefers_the_fitting_spec() {
    let (x, y) = toy_data(8, 80, 2);
    let good = PredictorSpec::kernel_svr(0.01);
    // a tube wider than the label range predicts a constant
    let useless = PredictorSpec::kernel_svr(0.9);
    let (best, table) = grid_search(&[useless.clone(), good.clone()], &x, &y, 5).unwrap();
    assert_eq!(best, good);
    let independent = [cross_val_score(&useless, &x, &y, 5).unwrap(), cross_val_score(&good, &x, &y, 5).unwrap()];
    assert_eq!(table[0].1, independent[0]);
    assert_eq!(table[1].1, independent[1]);
    assert!(independent[1] > independent[0]);

    let (only, t) = grid_search(&[good.clone()], &x, &y, 5).unwrap();
    assert_eq!(only, good);
    assert_eq!(t.len(), 1);
}

#[test]
fn twenty_point_fit_tracks_the_function() {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| smooth(r[0])).collect();
    let fit = kernel_svr::fit(&x, &y, &params(0.01, 100.0, 10.0));
    let p: Vec<f64> = x.iter().map(|r| fit.model.predict_one(r)).collect();
    assert!(pearson(&p, &y).unwrap() >= 0.99);
    assert!(p.iter().zip(&y).all(|(a, b)| (a - b).abs() <= 0.01 + 1e-9));
}

//! Fully connected regression network trained with backpropagation and Adam.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    Linear,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Sigmoid => z.mapv_inplace(sigmoid),
            Activation::Linear => {}
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `out x in`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Layer sizes, activations and dropout rates; index `l` of `dropout`
/// applies to the output of hidden layer `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub hidden: Activation,
    pub output: Activation,
    pub dropout: Vec<f64>,
}

/// Per-layer gradients, same shapes as the parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub bias: Vec<Array1<f64>>,
}

struct Forward {
    /// inputs to each layer (post dropout), then the final output
    acts: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
    masks: Vec<Option<Array2<f64>>>,
}

impl Mlp {
    /// He-uniform weights for hidden layers, Glorot-uniform for the output,
    /// zero biases.
    pub fn new(
        input: usize,
        hidden_sizes: &[usize],
        hidden: Activation,
        output: Activation,
        dropout: Vec<f64>,
        rng: &mut impl Rng,
    ) -> Self {
        let mut layers = Vec::with_capacity(hidden_sizes.len() + 1);
        let mut fan_in = input;
        for (l, &width) in hidden_sizes.iter().chain(std::iter::once(&1)).enumerate() {
            let is_out = l == hidden_sizes.len();
            let limit = if is_out {
                (6.0 / (fan_in + width) as f64).sqrt()
            } else {
                (6.0 / fan_in.max(1) as f64).sqrt()
            };
            let weights = Array2::from_shape_fn((width, fan_in), |_| rng.gen_range(-limit..=limit));
            layers.push(Dense {
                weights,
                bias: Array1::zeros(width),
            });
            fan_in = width;
        }
        let mut dropout = dropout;
        dropout.resize(hidden_sizes.len(), 0.0);
        Mlp {
            layers,
            hidden,
            output,
            dropout,
        }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    fn activation(&self, l: usize) -> Activation {
        if l + 1 == self.layers.len() {
            self.output
        } else {
            self.hidden
        }
    }

    fn forward(&self, x: ArrayView2<f64>, rng: Option<&mut ChaCha8Rng>) -> Forward {
        let mut rng = rng;
        let mut acts = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let z = acts[l].dot(&layer.weights.t()) + &layer.bias;
            let mut a = z.clone();
            self.activation(l).apply(&mut a);
            let mut mask = None;
            if let (Some(r), Some(&p)) = (rng.as_deref_mut(), self.dropout.get(l)) {
                if p > 0.0 {
                    let keep = 1.0 - p;
                    let m = Array2::from_shape_fn(a.raw_dim(), |_| {
                        if r.gen::<f64>() < keep {
                            1.0 / keep
                        } else {
                            0.0
                        }
                    });
                    a *= &m;
                    mask = Some(m);
                }
            }
            pre.push(z);
            masks.push(mask);
            acts.push(a);
        }
        Forward { acts, pre, masks }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let f = self.forward(x, None);
        f.acts.last().expect("output").column(0).to_owned()
    }

    /// Mean of `(out - y)^2 / 2` over the rows.
    pub fn loss(&self, x: ArrayView2<f64>, y: &[f64]) -> f64 {
        let out = self.predict(x);
        half_mse(&out, y)
    }

    fn backward(&self, f: &Forward, y: &[f64]) -> Gradients {
        let n = y.len() as f64;
        let out = f.acts.last().expect("output");
        let mut delta = Array2::from_shape_fn(out.raw_dim(), |(r, _)| (out[[r, 0]] - y[r]) / n);
        let mut gw = Vec::with_capacity(self.layers.len());
        let mut gb = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let act = self.activation(l);
            if let Some(m) = &f.masks[l] {
                delta *= m;
            }
            // post-dropout activation differs from sigmoid(z); use the raw one
            let z = &f.pre[l];
            let d = ndarray::Zip::from(&delta).and(z).map_collect(|&dl, &zv| {
                let a = match act {
                    Activation::Sigmoid => sigmoid(zv),
                    _ => 0.0,
                };
                dl * act.derivative(zv, a)
            });
            gw.push(d.t().dot(&f.acts[l]));
            gb.push(d.sum_axis(Axis(0)));
            if l > 0 {
                delta = d.dot(&self.layers[l].weights);
            }
        }
        gw.reverse();
        gb.reverse();
        Gradients {
            weights: gw,
            bias: gb,
        }
    }

    /// Loss and analytic gradients without dropout.
    pub fn gradients(&self, x: ArrayView2<f64>, y: &[f64]) -> (f64, Gradients) {
        let f = self.forward(x, None);
        let out = f.acts.last().expect("output").column(0).to_owned();
        (half_mse(&out, y), self.backward(&f, y))
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    fn locate(&self, mut k: usize) -> (usize, Option<(usize, usize)>, usize) {
        for (l, layer) in self.layers.iter().enumerate() {
            let nw = layer.weights.len();
            if k < nw {
                let cols = layer.weights.ncols();
                return (l, Some((k / cols, k % cols)), 0);
            }
            k -= nw;
            if k < layer.bias.len() {
                return (l, None, k);
            }
            k -= layer.bias.len();
        }
        panic!("parameter index out of range");
    }

    /// Parameter `k` in flat order: each layer's weights row-major, then its bias.
    pub fn param(&self, k: usize) -> f64 {
        match self.locate(k) {
            (l, Some(rc), _) => self.layers[l].weights[rc],
            (l, None, b) => self.layers[l].bias[b],
        }
    }

    pub fn set_param(&mut self, k: usize, v: f64) {
        match self.locate(k) {
            (l, Some(rc), _) => self.layers[l].weights[rc] = v,
            (l, None, b) => self.layers[l].bias[b] = v,
        }
    }
}

impl Gradients {
    /// Flattened in the same order as [`Mlp::param`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.bias) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

fn half_mse(out: &Array1<f64>, y: &[f64]) -> f64 {
    let n = y.len().max(1) as f64;
    out.iter()
        .zip(y)
        .map(|(o, t)| 0.5 * (o - t) * (o - t))
        .sum::<f64>()
        / n
}

/// Maximal relative error between analytic gradients and central
/// differences with the given step, for a single example. Entries where
/// both gradients are below `1e-8` in magnitude are compared absolutely.
pub fn gradient_check(net: &Mlp, x: &[f64], y: f64, step: f64) -> f64 {
    let xm = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row");
    let (_, grads) = net.gradients(xm.view(), &[y]);
    let analytic = grads.flatten();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (k, a) in analytic.iter().enumerate() {
        let orig = probe.param(k);
        probe.set_param(k, orig + step);
        let up = probe.loss(xm.view(), &[y]);
        probe.set_param(k, orig - step);
        let down = probe.loss(xm.view(), &[y]);
        probe.set_param(k, orig);
        let numeric = (up - down) / (2.0 * step);
        let scale = a.abs().max(numeric.abs());
        let err = if scale < 1e-8 {
            (a - numeric).abs()
        } else {
            (a - numeric).abs() / scale
        };
        worst = worst.max(err);
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Learning rate is multiplied by this every `decay_every` epochs.
    pub decay: f64,
    pub decay_every: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Training loss (no dropout) before training and after every epoch.
    pub loss_trace: Vec<f64>,
    pub best_epoch: usize,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, net: &mut Mlp, grads: &Gradients, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let mut k = 0;
        for (layer, (gw, gb)) in net
            .layers
            .iter_mut()
            .zip(grads.weights.iter().zip(&grads.bias))
        {
            for (p, g) in layer
                .weights
                .iter_mut()
                .zip(gw.iter())
                .chain(layer.bias.iter_mut().zip(gb.iter()))
            {
                self.m[k] = Self::B1 * self.m[k] + (1.0 - Self::B1) * g;
                self.v[k] = Self::B2 * self.v[k] + (1.0 - Self::B2) * g * g;
                let mh = self.m[k] / c1;
                let vh = self.v[k] / c2;
                *p -= lr * mh / (vh.sqrt() + Self::EPS);
                k += 1;
            }
        }
    }
}

/// Mini-batch Adam on the half squared error. Returns the parameters of the
/// epoch with the lowest full-batch training loss.
pub fn train(net: &mut Mlp, x: ArrayView2<f64>, y: &[f64], opts: &TrainOptions, rng: &mut ChaCha8Rng) -> TrainOutcome {
    let n = y.len();
    let mut adam = Adam::new(net.param_count());
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = net.clone();
    let mut best_loss = net.loss(x, y);
    let mut best_epoch = 0;
    let mut trace = vec![best_loss];
    let batch = opts.batch_size.max(1);

    for epoch in 0..opts.epochs {
        let lr = opts.learning_rate * opts.decay.powi((epoch / opts.decay_every.max(1)) as i32);
        order.shuffle(rng);
        for chunk in order.chunks(batch) {
            let xb = x.select(Axis(0), chunk);
            let yb: Vec<f64> = chunk.iter().map(|&i| y[i]).collect();
            let f = net.forward(xb.view(), Some(rng));
            let g = net.backward(&f, &yb);
            adam.step(net, &g, lr);
        }
        let loss = net.loss(x, y);
        trace.push(loss);
        if loss < best_loss {
            best_loss = loss;
            best = net.clone();
            best_epoch = epoch + 1;
        }
    }
    *net = best;
    TrainOutcome {
        loss_trace: trace,
        best_epoch,
    }
}

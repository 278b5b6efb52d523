//! The autodiff tape: eager forward values, reverse-order backward sweep.

use ndarray::Array2;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    Leaf,
    MatMul(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Div(Var, Var),
    AddScalar(Var),
    MulScalar(Var, f64),
    /// n x 1 -> n x cols
    BroadcastCol(Var),
    /// 1 x m -> rows x m
    BroadcastRow(Var),
    RowSum(Var),
    SumAll(Var),
    Exp(Var),
    Ln(Var),
    Sqrt(Var),
    Sigmoid(Var),
    LeakyRelu(Var, f64),
    Elu(Var, f64),
    Relu(Var),
    /// Elementwise product with a constant mask (no gradient to the mask).
    MulMask(Var, Array2<f64>),
    LogSumExpRows(Var),
    /// Mean binary cross-entropy from logits against constant targets,
    /// computed in the numerically stable softplus form.
    BceWithLogitsMean(Var, Array2<f64>),
}

struct Node {
    value: Array2<f64>,
    op: Op,
}

/// Gradients keyed by [`Var`], produced by [`Tape::backward`].
pub struct Grads {
    grads: Vec<Option<Array2<f64>>>,
}

impl Grads {
    /// Gradient of the loss w.r.t. `v`; zero-shaped if the node was unused.
    pub fn get(&self, v: Var) -> Option<&Array2<f64>> {
        self.grads[v.0].as_ref()
    }
}

/// A define-by-run computation tape.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        let s = self.value(v).dim();
        (s.0, s.1)
    }

    /// Value of a 1x1 node.
    pub fn scalar(&self, v: Var) -> f64 {
        let val = self.value(v);
        debug_assert_eq!(val.dim(), (1, 1));
        val[(0, 0)]
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a).dot(self.value(b));
        self.push(v, Op::MatMul(a, b))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let v = self.value(a).t().to_owned();
        self.push(v, Op::Transpose(a))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) + self.value(b);
        self.push(v, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) - self.value(b);
        self.push(v, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) * self.value(b);
        self.push(v, Op::Mul(a, b))
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a) / self.value(b);
        self.push(v, Op::Div(a, b))
    }

    pub fn add_scalar(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a).mapv(|x| x + c);
        self.push(v, Op::AddScalar(a))
    }

    pub fn mul_scalar(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a).mapv(|x| x * c);
        self.push(v, Op::MulScalar(a, c))
    }

    pub fn broadcast_col(&mut self, a: Var, cols: usize) -> Var {
        let av = self.value(a);
        debug_assert_eq!(av.ncols(), 1);
        let v = Array2::from_shape_fn((av.nrows(), cols), |(i, _)| av[(i, 0)]);
        self.push(v, Op::BroadcastCol(a))
    }

    pub fn broadcast_row(&mut self, a: Var, rows: usize) -> Var {
        let av = self.value(a);
        debug_assert_eq!(av.nrows(), 1);
        let v = Array2::from_shape_fn((rows, av.ncols()), |(_, j)| av[(0, j)]);
        self.push(v, Op::BroadcastRow(a))
    }

    pub fn row_sum(&mut self, a: Var) -> Var {
        let av = self.value(a);
        let v = Array2::from_shape_fn((av.nrows(), 1), |(i, _)| av.row(i).sum());
        self.push(v, Op::RowSum(a))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let s = self.value(a).sum();
        self.push(Array2::from_elem((1, 1), s), Op::SumAll(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::exp);
        self.push(v, Op::Exp(a))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::ln);
        self.push(v, Op::Ln(a))
    }

    pub fn sqrt(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(f64::sqrt);
        self.push(v, Op::Sqrt(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(sigmoid_scalar);
        self.push(v, Op::Sigmoid(a))
    }

    pub fn leaky_relu(&mut self, a: Var, slope: f64) -> Var {
        let v = self.value(a).mapv(|x| if x > 0.0 { x } else { slope * x });
        self.push(v, Op::LeakyRelu(a, slope))
    }

    pub fn elu(&mut self, a: Var, alpha: f64) -> Var {
        let v = self
            .value(a)
            .mapv(|x| if x > 0.0 { x } else { alpha * (x.exp() - 1.0) });
        self.push(v, Op::Elu(a, alpha))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| x.max(0.0));
        self.push(v, Op::Relu(a))
    }

    pub fn mul_mask(&mut self, a: Var, mask: Array2<f64>) -> Var {
        let v = self.value(a) * &mask;
        self.push(v, Op::MulMask(a, mask))
    }

    /// Row-wise `log(sum_j exp(a_ij))` with the max-shift trick; backward is
    /// the row softmax.
    pub fn logsumexp_rows(&mut self, a: Var) -> Var {
        let av = self.value(a);
        let v = Array2::from_shape_fn((av.nrows(), 1), |(i, _)| {
            let row = av.row(i);
            let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + row.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
        });
        self.push(v, Op::LogSumExpRows(a))
    }

    /// Mean over all entries of BCE(targets, sigmoid(logits)), in the stable
    /// form `max(x,0) - x*t + ln(1 + exp(-|x|))`.
    pub fn bce_with_logits_mean(&mut self, logits: Var, targets: Array2<f64>) -> Var {
        let x = self.value(logits);
        debug_assert_eq!(x.dim(), targets.dim());
        let count = (x.nrows() * x.ncols()) as f64;
        let mut total = 0.0;
        for (xi, ti) in x.iter().zip(targets.iter()) {
            total += xi.max(0.0) - xi * ti + (-xi.abs()).exp().ln_1p();
        }
        self.push(
            Array2::from_elem((1, 1), total / count),
            Op::BceWithLogitsMean(logits, targets),
        )
    }

    /// Reverse sweep from `loss` (must be 1x1). Returns per-node gradients.
    pub fn backward(&self, loss: Var) -> Grads {
        assert_eq!(self.value(loss).dim(), (1, 1), "loss must be scalar");
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Array2::from_elem((1, 1), 1.0));

        for idx in (0..self.nodes.len()).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let ga = g.dot(&self.nodes[b.0].value.t());
                    let gb = self.nodes[a.0].value.t().dot(&g);
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::Transpose(a) => {
                    accumulate(&mut grads, *a, g.t().to_owned());
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, g.clone());
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, -&g);
                }
                Op::Mul(a, b) => {
                    accumulate(&mut grads, *a, &g * &self.nodes[b.0].value);
                    accumulate(&mut grads, *b, &g * &self.nodes[a.0].value);
                }
                Op::Div(a, b) => {
                    let bv = &self.nodes[b.0].value;
                    accumulate(&mut grads, *a, &g / bv);
                    let gb = -(&g * &node.value) / bv;
                    accumulate(&mut grads, *b, gb);
                }
                Op::AddScalar(a) => {
                    accumulate(&mut grads, *a, g.clone());
                }
                Op::MulScalar(a, c) => {
                    accumulate(&mut grads, *a, g.mapv(|x| x * c));
                }
                Op::BroadcastCol(a) => {
                    let ga = Array2::from_shape_fn((g.nrows(), 1), |(i, _)| g.row(i).sum());
                    accumulate(&mut grads, *a, ga);
                }
                Op::BroadcastRow(a) => {
                    let ga = Array2::from_shape_fn((1, g.ncols()), |(_, j)| g.column(j).sum());
                    accumulate(&mut grads, *a, ga);
                }
                Op::RowSum(a) => {
                    let src = &self.nodes[a.0].value;
                    let ga = Array2::from_shape_fn(src.dim(), |(i, _)| g[(i, 0)]);
                    accumulate(&mut grads, *a, ga);
                }
                Op::SumAll(a) => {
                    let src = &self.nodes[a.0].value;
                    let ga = Array2::from_elem(src.dim(), g[(0, 0)]);
                    accumulate(&mut grads, *a, ga);
                }
                Op::Exp(a) => {
                    accumulate(&mut grads, *a, &g * &node.value);
                }
                Op::Ln(a) => {
                    accumulate(&mut grads, *a, &g / &self.nodes[a.0].value);
                }
                Op::Sqrt(a) => {
                    let ga = &g * &node.value.mapv(|y| 0.5 / y);
                    accumulate(&mut grads, *a, ga);
                }
                Op::Sigmoid(a) => {
                    let ga = &g * &node.value.mapv(|s| s * (1.0 - s));
                    accumulate(&mut grads, *a, ga);
                }
                Op::LeakyRelu(a, slope) => {
                    let src = &self.nodes[a.0].value;
                    let s = *slope;
                    let ga = &g * &src.mapv(|x| if x > 0.0 { 1.0 } else { s });
                    accumulate(&mut grads, *a, ga);
                }
                Op::Elu(a, alpha) => {
                    let src = &self.nodes[a.0].value;
                    let al = *alpha;
                    let deriv = ndarray::Zip::from(src)
                        .and(&node.value)
                        .map_collect(|&x, &y| if x > 0.0 { 1.0 } else { y + al });
                    accumulate(&mut grads, *a, &g * &deriv);
                }
                Op::Relu(a) => {
                    let src = &self.nodes[a.0].value;
                    let ga = &g * &src.mapv(|x| if x > 0.0 { 1.0 } else { 0.0 });
                    accumulate(&mut grads, *a, ga);
                }
                Op::MulMask(a, mask) => {
                    accumulate(&mut grads, *a, &g * mask);
                }
                Op::LogSumExpRows(a) => {
                    let src = &self.nodes[a.0].value;
                    let ga = Array2::from_shape_fn(src.dim(), |(i, j)| {
                        g[(i, 0)] * (src[(i, j)] - node.value[(i, 0)]).exp()
                    });
                    accumulate(&mut grads, *a, ga);
                }
                Op::BceWithLogitsMean(a, targets) => {
                    let src = &self.nodes[a.0].value;
                    let count = (src.nrows() * src.ncols()) as f64;
                    let scale = g[(0, 0)] / count;
                    let ga = ndarray::Zip::from(src)
                        .and(targets)
                        .map_collect(|&x, &t| scale * (sigmoid_scalar(x) - t));
                    accumulate(&mut grads, *a, ga);
                }
            }
        }
        // backward() takes grads[idx] out while propagating; re-seed leaf
        // gradients were accumulated in place, so only restore is needed for
        // nodes never visited as inputs (their grad stays None).
        Grads { grads }
    }
}

fn accumulate(grads: &mut [Option<Array2<f64>>], v: Var, g: Array2<f64>) {
    match &mut grads[v.0] {
        Some(acc) => *acc += &g,
        slot => *slot = Some(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    /// Central finite differences of a scalar function of one leaf entry.
    fn fd<F: Fn(&Array2<f64>) -> f64>(f: F, at: &Array2<f64>, i: usize, j: usize) -> f64 {
        let h = 1e-6;
        let mut plus = at.clone();
        plus[(i, j)] += h;
        let mut minus = at.clone();
        minus[(i, j)] -= h;
        (f(&plus) - f(&minus)) / (2.0 * h)
    }

    #[test]
    fn matmul_chain_gradient_matches_fd() {
        let a0 = array![[0.3, -0.7], [1.2, 0.4]];
        let b0 = array![[0.5, 0.1], [-0.2, 0.9]];
        let eval = |a: &Array2<f64>| {
            let mut t = Tape::new();
            let av = t.leaf(a.clone());
            let bv = t.leaf(b0.clone());
            let c = t.matmul(av, bv);
            let s = t.sigmoid(c);
            let l = t.sum_all(s);
            t.scalar(l)
        };
        let mut t = Tape::new();
        let av = t.leaf(a0.clone());
        let bv = t.leaf(b0.clone());
        let c = t.matmul(av, bv);
        let s = t.sigmoid(c);
        let l = t.sum_all(s);
        let grads = t.backward(l);
        let ga = grads.get(av).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = fd(eval, &a0, i, j);
                assert!((ga[(i, j)] - want).abs() < 1e-7, "({i},{j})");
            }
        }
    }

    #[test]
    fn broadcast_and_rowsum_gradients() {
        let x0 = array![[1.0, 2.0], [3.0, 4.0]];
        let eval = |x: &Array2<f64>| {
            let mut t = Tape::new();
            let xv = t.leaf(x.clone());
            let s = t.row_sum(xv); // n x 1
            let b = t.broadcast_col(s, 2);
            let y = t.mul(b, xv);
            let l = t.sum_all(y);
            t.scalar(l)
        };
        let mut t = Tape::new();
        let xv = t.leaf(x0.clone());
        let s = t.row_sum(xv);
        let b = t.broadcast_col(s, 2);
        let y = t.mul(b, xv);
        let l = t.sum_all(y);
        let grads = t.backward(l);
        let gx = grads.get(xv).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = fd(eval, &x0, i, j);
                assert!((gx[(i, j)] - want).abs() < 1e-6, "({i},{j})");
            }
        }
    }

    #[test]
    fn logsumexp_backward_is_softmax() {
        let x0 = array![[0.1, 0.9, -0.4]];
        let mut t = Tape::new();
        let xv = t.leaf(x0.clone());
        let l0 = t.logsumexp_rows(xv);
        let l = t.sum_all(l0);
        let grads = t.backward(l);
        let gx = grads.get(xv).unwrap();
        let denom: f64 = x0.iter().map(|x| x.exp()).sum();
        for j in 0..3 {
            assert!((gx[(0, j)] - x0[(0, j)].exp() / denom).abs() < 1e-12);
        }
    }

    #[test]
    fn bce_with_logits_matches_naive() {
        let x = array![[0.0, 2.0], [-1.5, 0.3]];
        let targets = array![[0.0, 1.0], [1.0, 0.0]];
        let mut t = Tape::new();
        let xv = t.leaf(x.clone());
        let l = t.bce_with_logits_mean(xv, targets.clone());
        let naive: f64 = x
            .iter()
            .zip(targets.iter())
            .map(|(&xi, &ti)| {
                let p = sigmoid_scalar(xi);
                -(ti * p.ln() + (1.0 - ti) * (1.0 - p).ln())
            })
            .sum::<f64>()
            / 4.0;
        assert!((t.scalar(l) - naive).abs() < 1e-12);
    }

    #[test]
    fn div_gradient() {
        let a0 = array![[2.0, 3.0]];
        let b0 = array![[4.0, 5.0]];
        let eval = |b: &Array2<f64>| {
            let mut t = Tape::new();
            let av = t.leaf(a0.clone());
            let bv = t.leaf(b.clone());
            let c = t.div(av, bv);
            let l = t.sum_all(c);
            t.scalar(l)
        };
        let mut t = Tape::new();
        let av = t.leaf(a0.clone());
        let bv = t.leaf(b0.clone());
        let c = t.div(av, bv);
        let l = t.sum_all(c);
        let grads = t.backward(l);
        let gb = grads.get(bv).unwrap();
        for j in 0..2 {
            let want = fd(eval, &b0, 0, j);
            assert!((gb[(0, j)] - want).abs() < 1e-8);
        }
    }
}

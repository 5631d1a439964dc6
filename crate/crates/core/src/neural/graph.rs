//! Reverse-mode automatic differentiation on a tape of 2-D tensor ops.
//!
//! A [`Graph`] borrows a [`ParamStore`]; parameter leaves read the stored
//! values directly and their gradients land in a [`Gradients`] buffer.

use super::params::{Gradients, ParamId, ParamStore};
use super::scalar::Scalar;
use super::tensor::{dot, matmul_acc, matmul_at_acc, matmul_bt_acc, Tensor};

pub const LAYER_NORM_EPS: f64 = 1e-6;
/// Log-probabilities are floored at `ln(1e-12)`.
pub const MIN_PROB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug)]
enum Op<F> {
    Param(ParamId),
    Input,
    Gather { table: ParamId, ids: Vec<usize> },
    MatMul(Var, Var),
    MatMulBt(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    AddRow(Var, Var),
    MulRow(Var, Var),
    Scale(Var, F),
    Softmax(Var),
    LayerNorm { x: Var, inv_std: Vec<F> },
    Gelu(Var),
    ColSlice { x: Var, start: usize },
    ConcatCols(Vec<Var>),
    PowerNorm { x: Var, gain: F },
    CrossEntropy { logits: Var, targets: Vec<Option<usize>>, probs: Tensor<F> },
    WeightedSum { x: Var, weights: Tensor<F> },
}

#[derive(Debug)]
struct Node<F> {
    op: Op<F>,
    /// `None` for parameter leaves, whose value lives in the store.
    value: Option<Tensor<F>>,
    shape: (usize, usize),
    needs_grad: bool,
}

pub struct Graph<'p, F> {
    params: &'p ParamStore<F>,
    nodes: Vec<Node<F>>,
}

fn gelu<F: Scalar>(x: F) -> (F, F) {
    // tanh approximation; returns value and derivative
    let c = F::of((2.0 / std::f64::consts::PI).sqrt());
    let a = F::of(0.044715);
    let half = F::of(0.5);
    let one = F::one();
    let x3 = x * x * x;
    let t = (c * (x + a * x3)).tanh();
    let value = half * x * (one + t);
    let dt = (one - t * t) * c * (one + F::of(3.0) * a * x * x);
    (value, half * (one + t) + half * x * dt)
}

impl<'p, F: Scalar> Graph<'p, F> {
    pub fn new(params: &'p ParamStore<F>) -> Self {
        Graph {
            params,
            nodes: Vec::with_capacity(256),
        }
    }

    pub fn params(&self) -> &'p ParamStore<F> {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor<F> {
        let node = &self.nodes[v.0];
        match (&node.op, &node.value) {
            (Op::Param(p), _) => self.params.get(*p),
            (_, Some(t)) => t,
            _ => unreachable!("non-parameter node without a value"),
        }
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].shape
    }

    fn grad_of(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    fn push(&mut self, op: Op<F>, value: Tensor<F>, needs_grad: bool) -> Var {
        let shape = value.shape();
        self.nodes.push(Node {
            op,
            value: Some(value),
            shape,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        let shape = self.params.get(id).shape();
        self.nodes.push(Node {
            op: Op::Param(id),
            value: None,
            shape,
            needs_grad: true,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn input(&mut self, value: Tensor<F>) -> Var {
        self.push(Op::Input, value, false)
    }

    /// Rows `ids` of the parameter table.
    pub fn gather(&mut self, table: ParamId, ids: &[usize]) -> Var {
        let t = self.params.get(table);
        let mut out = Tensor::zeros(ids.len(), t.cols());
        for (i, &id) in ids.iter().enumerate() {
            out.row_mut(i).copy_from_slice(t.row(id));
        }
        self.push(Op::Gather { table, ids: ids.to_vec() }, out, true)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a).matmul(self.value(b));
        let g = self.grad_of(a) || self.grad_of(b);
        self.push(Op::MatMul(a, b), v, g)
    }

    /// `a * b^T`.
    pub fn matmul_bt(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a).matmul_bt(self.value(b));
        let g = self.grad_of(a) || self.grad_of(b);
        self.push(Op::MatMulBt(a, b), v, g)
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let v = self.value(a).transpose();
        let g = self.grad_of(a);
        self.push(Op::Transpose(a), v, g)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "add shapes");
        let mut v = self.value(a).clone();
        v.add_assign(self.value(b));
        let g = self.grad_of(a) || self.grad_of(b);
        self.push(Op::Add(a, b), v, g)
    }

    /// Adds the `1 x c` row `b` to every row of `a`.
    pub fn add_row(&mut self, a: Var, b: Var) -> Var {
        let (r, c) = self.shape(a);
        assert_eq!(self.shape(b), (1, c), "add_row shapes");
        let mut v = self.value(a).clone();
        let bias = self.value(b).data();
        for i in 0..r {
            v.row_mut(i).iter_mut().zip(bias).for_each(|(x, &y)| *x += y);
        }
        let g = self.grad_of(a) || self.grad_of(b);
        self.push(Op::AddRow(a, b), v, g)
    }

    /// Multiplies every row of `a` elementwise by the `1 x c` row `b`.
    pub fn mul_row(&mut self, a: Var, b: Var) -> Var {
        let (r, c) = self.shape(a);
        assert_eq!(self.shape(b), (1, c), "mul_row shapes");
        let mut v = self.value(a).clone();
        let gain = self.value(b).data();
        for i in 0..r {
            v.row_mut(i).iter_mut().zip(gain).for_each(|(x, &y)| *x *= y);
        }
        let g = self.grad_of(a) || self.grad_of(b);
        self.push(Op::MulRow(a, b), v, g)
    }

    pub fn scale(&mut self, a: Var, s: F) -> Var {
        let mut v = self.value(a).clone();
        v.data_mut().iter_mut().for_each(|x| *x *= s);
        let g = self.grad_of(a);
        self.push(Op::Scale(a, s), v, g)
    }

    /// Row-wise softmax.
    pub fn softmax(&mut self, a: Var) -> Var {
        let mut v = self.value(a).clone();
        for i in 0..v.rows() {
            softmax_in_place(v.row_mut(i));
        }
        let g = self.grad_of(a);
        self.push(Op::Softmax(a), v, g)
    }

    /// Row-wise softmax over the columns where `keep` is true; the others
    /// get weight exactly zero.
    pub fn softmax_masked(&mut self, a: Var, keep: &[bool]) -> Var {
        let mut v = self.value(a).clone();
        assert_eq!(keep.len(), v.cols(), "mask length");
        assert!(keep.iter().any(|&k| k), "softmax with every column masked");
        for i in 0..v.rows() {
            let row = v.row_mut(i);
            row.iter_mut().zip(keep).filter(|(_, k)| !**k).for_each(|(x, _)| *x = F::neg_infinity());
            softmax_in_place(row);
        }
        let g = self.grad_of(a);
        self.push(Op::Softmax(a), v, g)
    }

    /// Normalises each row to zero mean and unit variance.
    pub fn layer_norm(&mut self, a: Var) -> Var {
        let mut v = self.value(a).clone();
        let cols = F::of(v.cols() as f64);
        let mut inv_std = Vec::with_capacity(v.rows());
        for i in 0..v.rows() {
            let row = v.row_mut(i);
            let mean = row.iter().copied().sum::<F>() / cols;
            let var = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<F>() / cols;
            let s = F::one() / (var + F::of(LAYER_NORM_EPS)).sqrt();
            row.iter_mut().for_each(|x| *x = (*x - mean) * s);
            inv_std.push(s);
        }
        let g = self.grad_of(a);
        self.push(Op::LayerNorm { x: a, inv_std }, v, g)
    }

    pub fn gelu(&mut self, a: Var) -> Var {
        let mut v = self.value(a).clone();
        v.data_mut().iter_mut().for_each(|x| *x = gelu(*x).0);
        let g = self.grad_of(a);
        self.push(Op::Gelu(a), v, g)
    }

    /// Columns `start..start + len`.
    pub fn col_slice(&mut self, a: Var, start: usize, len: usize) -> Var {
        let src = self.value(a);
        assert!(start + len <= src.cols(), "column slice out of range");
        let mut v = Tensor::zeros(src.rows(), len);
        for i in 0..src.rows() {
            v.row_mut(i).copy_from_slice(&src.row(i)[start..start + len]);
        }
        let g = self.grad_of(a);
        self.push(Op::ColSlice { x: a, start }, v, g)
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let rows = self.shape(parts[0]).0;
        assert!(parts.iter().all(|&p| self.shape(p).0 == rows), "concat row counts");
        let cols: usize = parts.iter().map(|&p| self.shape(p).1).sum();
        let mut v = Tensor::zeros(rows, cols);
        for i in 0..rows {
            let mut at = 0;
            for &p in parts {
                let src = self.value(p).row(i);
                v.row_mut(i)[at..at + src.len()].copy_from_slice(src);
                at += src.len();
            }
        }
        let g = parts.iter().any(|&p| self.grad_of(p));
        self.push(Op::ConcatCols(parts.to_vec()), v, g)
    }

    /// Scales all entries so that consecutive pairs, read as complex
    /// symbols, have unit mean power. `None` for an all-zero input.
    pub fn power_norm(&mut self, a: Var) -> Option<Var> {
        let mut v = self.value(a).clone();
        let energy: F = v.data().iter().map(|&x| x * x).sum();
        if !(energy > F::zero()) {
            return None;
        }
        let symbols = F::of(v.len() as f64 / 2.0);
        let gain = (symbols / energy).sqrt();
        v.data_mut().iter_mut().for_each(|x| *x *= gain);
        let g = self.grad_of(a);
        Some(self.push(Op::PowerNorm { x: a, gain }, v, g))
    }

    /// Mean categorical cross-entropy of row-wise softmax(`logits`) against
    /// `targets`; `None` targets are masked out. Returns a `1 x 1` node.
    pub fn cross_entropy(&mut self, logits: Var, targets: &[Option<usize>]) -> Var {
        let x = self.value(logits);
        assert_eq!(x.rows(), targets.len(), "one target per row");
        let mut probs = x.clone();
        let mut total = 0.0;
        let mut count = 0usize;
        for (i, t) in targets.iter().enumerate() {
            softmax_in_place(probs.row_mut(i));
            if let Some(t) = *t {
                total -= probs.get(i, t).f64().max(MIN_PROB).ln();
                count += 1;
            }
        }
        let loss = if count == 0 { 0.0 } else { total / count as f64 };
        let g = self.grad_of(logits);
        self.push(
            Op::CrossEntropy {
                logits,
                targets: targets.to_vec(),
                probs,
            },
            Tensor::from_f64(1, 1, &[loss]),
            g,
        )
    }

    /// `sum(x .* weights)` as a `1 x 1` node.
    pub fn weighted_sum(&mut self, a: Var, weights: Tensor<F>) -> Var {
        assert_eq!(self.shape(a), weights.shape(), "weighted_sum shapes");
        let s = dot(self.value(a).data(), weights.data());
        let g = self.grad_of(a);
        self.push(Op::WeightedSum { x: a, weights }, Tensor::from_vec(1, 1, vec![s]), g)
    }

    /// Back-propagates from the `1 x 1` node `root`, adding parameter
    /// gradients into `grads`.
    pub fn backward(&self, root: Var, grads: &mut Gradients<F>) {
        assert_eq!(self.shape(root), (1, 1), "backward needs a scalar root");
        let mut g: Vec<Option<Tensor<F>>> = (0..self.nodes.len()).map(|_| None).collect();
        g[root.0] = Some(Tensor::from_vec(1, 1, vec![F::one()]));
        for i in (0..=root.0).rev() {
            let Some(dy) = g[i].take() else { continue };
            let node = &self.nodes[i];
            if !node.needs_grad {
                continue;
            }
            match &node.op {
                Op::Input => {}
                Op::Param(p) => grads.get_mut(*p).add_assign(&dy),
                Op::Gather { table, ids } => {
                    let t = grads.get_mut(*table);
                    for (r, &id) in ids.iter().enumerate() {
                        t.row_mut(id).iter_mut().zip(dy.row(r)).for_each(|(a, &b)| *a += b);
                    }
                }
                Op::MatMul(a, b) => {
                    if self.grad_of(*a) {
                        matmul_bt_acc(&dy, self.value(*b), self.slot(&mut g, *a));
                    }
                    if self.grad_of(*b) {
                        matmul_at_acc(self.value(*a), &dy, self.slot(&mut g, *b));
                    }
                }
                Op::MatMulBt(a, b) => {
                    if self.grad_of(*a) {
                        matmul_acc(&dy, self.value(*b), self.slot(&mut g, *a));
                    }
                    if self.grad_of(*b) {
                        matmul_at_acc(&dy, self.value(*a), self.slot(&mut g, *b));
                    }
                }
                Op::Transpose(a) => self.slot(&mut g, *a).add_assign(&dy.transpose()),
                Op::Add(a, b) => {
                    for v in [*a, *b] {
                        if self.grad_of(v) {
                            self.slot(&mut g, v).add_assign(&dy);
                        }
                    }
                }
                Op::AddRow(a, b) => {
                    if self.grad_of(*a) {
                        self.slot(&mut g, *a).add_assign(&dy);
                    }
                    if self.grad_of(*b) {
                        let db = self.slot(&mut g, *b);
                        for r in 0..dy.rows() {
                            db.data_mut().iter_mut().zip(dy.row(r)).for_each(|(x, &y)| *x += y);
                        }
                    }
                }
                Op::MulRow(a, b) => {
                    let av = self.value(*a);
                    let bv = self.value(*b).clone();
                    if self.grad_of(*a) {
                        let da = self.slot(&mut g, *a);
                        for r in 0..dy.rows() {
                            for ((x, &y), &w) in da.row_mut(r).iter_mut().zip(dy.row(r)).zip(bv.data()) {
                                *x += y * w;
                            }
                        }
                    }
                    if self.grad_of(*b) {
                        let db = self.slot(&mut g, *b);
                        for r in 0..dy.rows() {
                            for ((x, &y), &u) in db.data_mut().iter_mut().zip(dy.row(r)).zip(av.row(r)) {
                                *x += y * u;
                            }
                        }
                    }
                }
                Op::Scale(a, s) => {
                    let da = self.slot(&mut g, *a);
                    da.data_mut().iter_mut().zip(dy.data()).for_each(|(x, &y)| *x += y * *s);
                }
                Op::Softmax(a) => {
                    let y = node.value.as_ref().expect("softmax value");
                    let da = self.slot(&mut g, *a);
                    for r in 0..y.rows() {
                        let s = dot(dy.row(r), y.row(r));
                        for ((x, &d), &p) in da.row_mut(r).iter_mut().zip(dy.row(r)).zip(y.row(r)) {
                            *x += p * (d - s);
                        }
                    }
                }
                Op::LayerNorm { x, inv_std } => {
                    let y = node.value.as_ref().expect("layer norm value");
                    let n = F::of(y.cols() as f64);
                    let dx = self.slot(&mut g, *x);
                    for r in 0..y.rows() {
                        let dyr = dy.row(r);
                        let yr = y.row(r);
                        let sum_d: F = dyr.iter().copied().sum();
                        let sum_dy = dot(dyr, yr);
                        let k = inv_std[r] / n;
                        for ((o, &d), &h) in dx.row_mut(r).iter_mut().zip(dyr).zip(yr) {
                            *o += k * (n * d - sum_d - h * sum_dy);
                        }
                    }
                }
                Op::Gelu(a) => {
                    let av = self.value(*a);
                    let mut local = dy.clone();
                    local.data_mut().iter_mut().zip(av.data()).for_each(|(d, &x)| *d *= gelu(x).1);
                    self.slot(&mut g, *a).add_assign(&local);
                }
                Op::ColSlice { x, start } => {
                    let dx = self.slot(&mut g, *x);
                    for r in 0..dy.rows() {
                        let row = &mut dx.row_mut(r)[*start..*start + dy.cols()];
                        row.iter_mut().zip(dy.row(r)).for_each(|(a, &b)| *a += b);
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut at = 0;
                    for &p in parts {
                        let w = self.shape(p).1;
                        if self.grad_of(p) {
                            let dp = self.slot(&mut g, p);
                            for r in 0..dy.rows() {
                                dp.row_mut(r).iter_mut().zip(&dy.row(r)[at..at + w]).for_each(|(a, &b)| *a += b);
                            }
                        }
                        at += w;
                    }
                }
                Op::PowerNorm { x, gain } => {
                    let y = node.value.as_ref().expect("power norm value");
                    let proj = dot(y.data(), dy.data()) / dot(y.data(), y.data());
                    let dx = self.slot(&mut g, *x);
                    for ((o, &d), &v) in dx.data_mut().iter_mut().zip(dy.data()).zip(y.data()) {
                        *o += *gain * (d - v * proj);
                    }
                }
                Op::CrossEntropy { logits, targets, probs } => {
                    let count = targets.iter().filter(|t| t.is_some()).count();
                    if count == 0 {
                        continue;
                    }
                    let scale = dy.data()[0] / F::of(count as f64);
                    let dl = self.slot(&mut g, *logits);
                    for (r, t) in targets.iter().enumerate() {
                        let Some(t) = *t else { continue };
                        for (o, &p) in dl.row_mut(r).iter_mut().zip(probs.row(r)) {
                            *o += scale * p;
                        }
                        dl.row_mut(r)[t] -= scale;
                    }
                }
                Op::WeightedSum { x, weights } => {
                    let s = dy.data()[0];
                    let dx = self.slot(&mut g, *x);
                    dx.data_mut().iter_mut().zip(weights.data()).for_each(|(o, &w)| *o += s * w);
                }
            }
        }
    }

    fn slot<'g>(&self, g: &'g mut [Option<Tensor<F>>], v: Var) -> &'g mut Tensor<F> {
        let (r, c) = self.shape(v);
        g[v.0].get_or_insert_with(|| Tensor::zeros(r, c))
    }
}

pub fn softmax_in_place<F: Scalar>(row: &mut [F]) {
    let max = row.iter().copied().fold(F::neg_infinity(), F::max);
    let mut sum = F::zero();
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    row.iter_mut().for_each(|x| *x /= sum);
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Largest relative error between backprop and central differences over
    /// every parameter entry.
    pub(crate) fn gradient_error<Fwd>(store: &mut ParamStore<f64>, forward: Fwd) -> f64
    where
        Fwd: Fn(&mut Graph<f64>) -> Var,
    {
        let mut grads = Gradients::zeros_like(store);
        {
            let mut g = Graph::new(store);
            let out = forward(&mut g);
            g.backward(out, &mut grads);
        }
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        let eval = |s: &ParamStore<f64>| {
            let mut g = Graph::new(s);
            let out = forward(&mut g);
            g.value(out).data()[0]
        };
        for p in 0..store.len() {
            let id = ParamId(p);
            for k in 0..store.get(id).len() {
                let orig = store.get(id).data()[k];
                store.get_mut(id).data_mut()[k] = orig + h;
                let up = eval(store);
                store.get_mut(id).data_mut()[k] = orig - h;
                let down = eval(store);
                store.get_mut(id).data_mut()[k] = orig;
                let numeric = (up - down) / (2.0 * h);
                let analytic = grads.get(id).data()[k];
                let err = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-3);
                worst = worst.max(err);
            }
        }
        worst
    }

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Tensor<f64> {
        Tensor::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn every_op_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut store = ParamStore::<f64>::new();
        let a = store.add("a", random(3, 4, &mut rng));
        let b = store.add("b", random(4, 6, &mut rng));
        let c = store.add("c", random(5, 6, &mut rng));
        let row = store.add("row", random(1, 6, &mut rng));
        let table = store.add("table", random(7, 6, &mut rng));
        let w = random(3, 5, &mut rng);
        let targets = vec![Some(2), None, Some(4)];
        let err = gradient_error(&mut store, |g| {
            let (pa, pb, pc, pr) = (g.param(a), g.param(b), g.param(c), g.param(row));
            let ab = g.matmul(pa, pb);
            let t = g.gather(table, &[1, 4, 1]);
            let s = g.add(ab, t);
            let s = g.add_row(s, pr);
            let s = g.mul_row(s, pr);
            let s = g.gelu(s);
            let s = g.layer_norm(s);
            let left = g.col_slice(s, 0, 2);
            let right = g.col_slice(s, 2, 4);
            let s = g.concat_cols(&[right, left]);
            let s = g.scale(s, 0.7);
            let scores = g.matmul_bt(s, pc);
            let att = g.softmax(scores);
            let tt = g.transpose(att);
            let back = g.transpose(tt);
            let pn = g.power_norm(back).unwrap();
            let ce = g.cross_entropy(pn, &targets);
            let ws = g.weighted_sum(back, w.clone());
            g.add(ce, ws)
        });
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn masked_softmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut store = ParamStore::<f64>::new();
        let a = store.add("a", random(3, 4, &mut rng));
        let keep = [true, false, true, false];
        {
            let mut g = Graph::new(&store);
            let x = g.param(a);
            let y = g.softmax_masked(x, &keep);
            for r in 0..3 {
                let row = g.value(y).row(r);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert_eq!((row[1], row[3]), (0.0, 0.0));
            }
        }
        let w = random(3, 4, &mut rng);
        let err = gradient_error(&mut store, |g| {
            let x = g.param(a);
            let y = g.softmax_masked(x, &keep);
            g.weighted_sum(y, w.clone())
        });
        assert!(err < 1e-6);
    }

    #[test]
    fn layer_norm_rows_are_standardised() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let store = ParamStore::<f64>::new();
        let mut g = Graph::new(&store);
        let x = g.input(random(4, 9, &mut rng));
        let y = g.layer_norm(x);
        let v = g.value(y);
        for r in 0..4 {
            let mean: f64 = v.row(r).iter().sum::<f64>() / 9.0;
            let var: f64 = v.row(r).iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 9.0;
            assert!(mean.abs() < 1e-6);
            assert!((var - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn gelu_values() {
        assert_eq!(gelu(0.0f64).0, 0.0);
        assert!((gelu(1.0f64).0 - 0.841192).abs() < 1e-5);
        assert!((gelu(-3.0f64).0 + 0.003637).abs() < 1e-5);
    }

    #[test]
    fn cross_entropy_hand_case() {
        let store = ParamStore::<f64>::new();
        let mut g = Graph::new(&store);
        let probs = [0.5f64, 0.25, 0.25, 0.1, 0.1, 0.8];
        let logits = g.input(Tensor::from_f64(2, 3, &probs.map(f64::ln)));
        let ce = g.cross_entropy(logits, &[Some(0), Some(2)]);
        let expect = -(0.5f64.ln() + 0.8f64.ln()) / 2.0;
        assert!((g.value(ce).data()[0] - expect).abs() < 1e-12);
        assert!((expect - 0.4581).abs() < 1e-4);
    }

    #[test]
    fn power_norm_gives_unit_symbol_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let store = ParamStore::<f64>::new();
        let mut g = Graph::new(&store);
        let x = g.input(random(3, 8, &mut rng));
        let y = g.power_norm(x).unwrap();
        let p: f64 = g.value(y).data().iter().map(|v| v * v).sum::<f64>() / 12.0;
        assert!((p - 1.0).abs() < 1e-12);
        let z = g.input(Tensor::zeros(2, 2));
        assert!(g.power_norm(z).is_none());
    }

    #[test]
    fn inputs_get_no_gradient_work() {
        let mut store = ParamStore::<f64>::new();
        let a = store.add("a", Tensor::from_f64(1, 2, &[1.0, 2.0]));
        let mut grads = Gradients::zeros_like(&store);
        let mut g = Graph::new(&store);
        let pa = g.param(a);
        let x = g.input(Tensor::from_f64(2, 1, &[3.0, 4.0]));
        let y = g.matmul(pa, x);
        g.backward(y, &mut grads);
        assert_eq!(grads.get(a).data(), &[3.0, 4.0]);
    }
}

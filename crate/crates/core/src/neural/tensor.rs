//! Dense row-major matrices and the few kernels the model needs.

use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Tensor<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "tensor data does not match shape {rows}x{cols}");
        Tensor { rows, cols, data }
    }

    pub fn from_f64(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| F::of(x)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<F> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|x| *x = F::zero());
    }

    pub fn add_assign(&mut self, other: &Tensor<F>) {
        debug_assert_eq!(self.shape(), other.shape());
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a += b);
    }

    pub fn transpose(&self) -> Tensor<F> {
        let mut out = Tensor::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self * b`.
    pub fn matmul(&self, b: &Tensor<F>) -> Tensor<F> {
        let mut out = Tensor::zeros(self.rows, b.cols);
        matmul_acc(self, b, &mut out);
        out
    }

    /// `self * b^T`.
    pub fn matmul_bt(&self, b: &Tensor<F>) -> Tensor<F> {
        let mut out = Tensor::zeros(self.rows, b.rows);
        matmul_bt_acc(self, b, &mut out);
        out
    }

    pub fn argmax_row(&self, i: usize) -> usize {
        let row = self.row(i);
        let mut best = 0;
        for (j, &x) in row.iter().enumerate() {
            if x > row[best] {
                best = j;
            }
        }
        best
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.f64()).collect()
    }
}

/// `out += a * b`.
pub fn matmul_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.cols, b.rows, "matmul inner dimensions");
    assert_eq!(out.shape(), (a.rows, b.cols));
    let n = b.cols;
    for i in 0..a.rows {
        let o = &mut out.data[i * n..(i + 1) * n];
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == F::zero() {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            for (x, &y) in o.iter_mut().zip(brow) {
                *x += aik * y;
            }
        }
    }
}

/// `out += a * b^T`.
pub fn matmul_bt_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.cols, b.cols, "matmul_bt inner dimensions");
    assert_eq!(out.shape(), (a.rows, b.rows));
    for i in 0..a.rows {
        let ar = a.row(i);
        for j in 0..b.rows {
            out.data[i * b.rows + j] += dot(ar, b.row(j));
        }
    }
}

/// `out += a^T * b`.
pub fn matmul_at_acc<F: Scalar>(a: &Tensor<F>, b: &Tensor<F>, out: &mut Tensor<F>) {
    assert_eq!(a.rows, b.rows, "matmul_at inner dimensions");
    assert_eq!(out.shape(), (a.cols, b.cols));
    let n = b.cols;
    for i in 0..a.rows {
        let brow = b.row(i);
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == F::zero() {
                continue;
            }
            let o = &mut out.data[k * n..(k + 1) * n];
            for (x, &y) in o.iter_mut().zip(brow) {
                *x += aik * y;
            }
        }
    }
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    // eight partial sums let the compiler vectorize without reassociation
    let mut acc = [F::zero(); 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        for l in 0..8 {
            acc[l] += a[c * 8 + l] * b[c * 8 + l];
        }
    }
    let mut s = F::zero();
    for i in chunks * 8..a.len() {
        s += a[i] * b[i];
    }
    acc.iter().fold(s, |t, &x| t + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &Tensor<f64>, b: &Tensor<f64>) -> Tensor<f64> {
        let mut out = Tensor::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a.get(i, k) * b.get(k, j);
                }
                out.data_mut()[i * b.cols() + j] = s;
            }
        }
        out
    }

    fn sample(rows: usize, cols: usize, seed: f64) -> Tensor<f64> {
        let data: Vec<f64> = (0..rows * cols).map(|i| ((i as f64 + seed) * 0.7).sin()).collect();
        Tensor::from_vec(rows, cols, data)
    }

    #[test]
    fn kernels_agree_with_naive_product() {
        let a = sample(5, 11, 0.3);
        let b = sample(11, 4, 1.9);
        let expect = naive(&a, &b);
        let close = |x: &Tensor<f64>, y: &Tensor<f64>| x.data().iter().zip(y.data()).all(|(p, q)| (p - q).abs() < 1e-12);
        assert!(close(&a.matmul(&b), &expect));
        assert!(close(&a.matmul_bt(&b.transpose()), &expect));
        let mut at = Tensor::zeros(5, 4);
        matmul_at_acc(&a.transpose(), &b, &mut at);
        assert!(close(&at, &expect));
    }

    #[test]
    fn argmax_takes_first_maximum() {
        let t = Tensor::<f32>::from_f64(1, 4, &[0.1, 0.7, 0.7, 0.2]);
        assert_eq!(t.argmax_row(0), 1);
    }
}

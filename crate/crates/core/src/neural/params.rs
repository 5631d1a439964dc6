//! Named parameter tensors, their gradients, and the checkpoint format.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::scalar::Scalar;
use super::tensor::Tensor;
use super::NeuralError;
use crate::hash::fnv1a64;

const MAGIC: &str = "semcom-checkpoint v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamStore<F> {
    names: Vec<String>,
    values: Vec<Tensor<F>>,
}

impl<F: Scalar> ParamStore<F> {
    pub fn new() -> Self {
        ParamStore {
            names: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor<F>) -> ParamId {
        let name = name.into();
        debug_assert!(!self.names.contains(&name), "duplicate parameter {name}");
        self.names.push(name);
        self.values.push(value);
        ParamId(self.values.len() - 1)
    }

    /// Xavier-normal initialised `rows x cols` matrix.
    pub fn add_xavier<R: Rng + ?Sized>(&mut self, name: &str, rows: usize, cols: usize, rng: &mut R) -> ParamId {
        let std = (2.0 / (rows + cols) as f64).sqrt();
        self.add_normal(name, rows, cols, std, rng)
    }

    pub fn add_normal<R: Rng + ?Sized>(&mut self, name: &str, rows: usize, cols: usize, std: f64, rng: &mut R) -> ParamId {
        let normal = Normal::new(0.0, std).expect("finite standard deviation");
        let data = (0..rows * cols).map(|_| F::of(normal.sample(rng))).collect();
        self.add(name, Tensor::from_vec(rows, cols, data))
    }

    pub fn add_constant(&mut self, name: &str, rows: usize, cols: usize, value: f64) -> ParamId {
        self.add(name, Tensor::from_vec(rows, cols, vec![F::of(value); rows * cols]))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn get(&self, id: ParamId) -> &Tensor<F> {
        &self.values[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor<F> {
        &mut self.values[id.0]
    }

    pub fn values(&self) -> &[Tensor<F>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Tensor<F>] {
        &mut self.values
    }

    pub fn scalar_count(&self) -> usize {
        self.values.iter().map(Tensor::len).sum()
    }

    /// Same names and shapes with converted values.
    pub fn cast<G: Scalar>(&self) -> ParamStore<G> {
        ParamStore {
            names: self.names.clone(),
            values: self
                .values
                .iter()
                .map(|t| Tensor::from_vec(t.rows(), t.cols(), t.data().iter().map(|x| G::of(x.f64())).collect()))
                .collect(),
        }
    }

    /// Serialises with a text header of `key=value` metadata lines and
    /// `name rows cols` lines, then the little-endian payload and its FNV-1a
    /// checksum.
    pub fn to_bytes(&self, metadata: &[(String, String)]) -> Vec<u8> {
        let mut header = format!("{MAGIC}\ndtype {}\n", F::NAME);
        for (k, v) in metadata {
            header.push_str(&format!("meta {k}={v}\n"));
        }
        header.push_str(&format!("params {}\n", self.len()));
        for (name, t) in self.names.iter().zip(&self.values) {
            header.push_str(&format!("{name} {} {}\n", t.rows(), t.cols()));
        }
        header.push_str("payload\n");
        let mut payload = Vec::with_capacity(self.scalar_count() * F::BYTES);
        for t in &self.values {
            for &x in t.data() {
                x.write_le(&mut payload);
            }
        }
        let mut out = header.into_bytes();
        out.extend_from_slice(&payload);
        out.extend_from_slice(&fnv1a64(&payload).to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, Vec<(String, String)>), NeuralError> {
        let bad = |msg: &str| NeuralError::Checkpoint(msg.to_string());
        let mut pos = 0;
        let mut next_line = || -> Result<String, NeuralError> {
            let end = bytes[pos..]
                .iter()
                .position(|&b| b == b'\n')
                .ok_or_else(|| bad("truncated header"))?;
            let line = std::str::from_utf8(&bytes[pos..pos + end]).map_err(|_| bad("header is not UTF-8"))?;
            pos += end + 1;
            Ok(line.to_string())
        };
        if next_line()? != MAGIC {
            return Err(bad("not a checkpoint"));
        }
        let dtype = next_line()?;
        if dtype != format!("dtype {}", F::NAME) {
            return Err(bad(&format!("expected dtype {}, found {dtype:?}", F::NAME)));
        }
        let mut metadata = Vec::new();
        let mut line = next_line()?;
        while let Some(kv) = line.strip_prefix("meta ") {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("metadata line without '='"))?;
            metadata.push((k.to_string(), v.to_string()));
            line = next_line()?;
        }
        let count: usize = line
            .strip_prefix("params ")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing parameter count"))?;
        let mut shapes = Vec::with_capacity(count);
        for _ in 0..count {
            let l = next_line()?;
            let parts: Vec<&str> = l.split(' ').collect();
            let [name, r, c] = parts[..] else {
                return Err(bad(&format!("bad parameter line {l:?}")));
            };
            let r: usize = r.parse().map_err(|_| bad("bad row count"))?;
            let c: usize = c.parse().map_err(|_| bad("bad column count"))?;
            shapes.push((name.to_string(), r, c));
        }
        if next_line()? != "payload" {
            return Err(bad("missing payload marker"));
        }
        let total: usize = shapes.iter().map(|(_, r, c)| r * c).sum();
        let len = total * F::BYTES;
        if bytes.len() != pos + len + 8 {
            return Err(bad("payload length does not match the header"));
        }
        let payload = &bytes[pos..pos + len];
        let stored = u64::from_le_bytes(bytes[pos + len..].try_into().expect("8 bytes"));
        if stored != fnv1a64(payload) {
            return Err(bad("checksum mismatch"));
        }
        let mut store = ParamStore::new();
        let mut chunks = payload.chunks_exact(F::BYTES);
        for (name, r, c) in shapes {
            let data = chunks.by_ref().take(r * c).map(F::read_le).collect();
            store.add(name, Tensor::from_vec(r, c, data));
        }
        Ok((store, metadata))
    }

    pub fn save(&self, path: &Path, metadata: &[(String, String)]) -> Result<(), NeuralError> {
        fs::write(path, self.to_bytes(metadata))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<(String, String)>), NeuralError> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Fails unless `other` has the same names and shapes in the same order.
    pub fn check_layout(&self, other: &ParamStore<F>) -> Result<(), NeuralError> {
        if self.names != other.names {
            return Err(NeuralError::Checkpoint("parameter names differ from the model layout".into()));
        }
        for (name, (a, b)) in self.names.iter().zip(self.values.iter().zip(&other.values)) {
            if a.shape() != b.shape() {
                return Err(NeuralError::Checkpoint(format!(
                    "parameter {name} has shape {:?}, expected {:?}",
                    b.shape(),
                    a.shape()
                )));
            }
        }
        Ok(())
    }
}

/// One gradient tensor per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<F>(Vec<Tensor<F>>);

impl<F: Scalar> Gradients<F> {
    pub fn zeros_like(store: &ParamStore<F>) -> Self {
        Gradients(store.values().iter().map(|t| Tensor::zeros(t.rows(), t.cols())).collect())
    }

    pub fn get(&self, id: ParamId) -> &Tensor<F> {
        &self.0[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor<F> {
        &mut self.0[id.0]
    }

    pub fn tensors(&self) -> &[Tensor<F>] {
        &self.0
    }

    pub fn zero(&mut self) {
        self.0.iter_mut().for_each(Tensor::fill_zero);
    }

    pub fn scale(&mut self, s: F) {
        for t in &mut self.0 {
            t.data_mut().iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|t| t.data())
            .map(|x| x.f64() * x.f64())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Tensor::is_finite)
    }
}

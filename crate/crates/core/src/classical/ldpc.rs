//! Binary LDPC codes: alist parity-check matrices, systematic encoding via
//! GF(2) elimination, and sum-product belief-propagation decoding.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bits::BitStream;
use super::CodecError;

pub const DEFAULT_MAX_ITERS: usize = 25;
/// Check-to-variable messages are clipped to this magnitude.
const MAX_MESSAGE: f64 = 40.0;

/// Sparse binary parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheck {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheck {
    /// Builds from per-row column lists (0-based).
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self, CodecError> {
        if n == 0 || rows.is_empty() {
            return Err(CodecError::InvalidMatrix("empty parity-check matrix".into()));
        }
        let mut cols = vec![Vec::new(); n];
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            for &c in row.iter() {
                if c >= n {
                    return Err(CodecError::InvalidMatrix(format!("column {c} out of range in row {r}")));
                }
                cols[c].push(r);
            }
        }
        Ok(ParityCheck { n, rows, cols })
    }

    /// Gallager's construction: `wc` bands, the first with consecutive
    /// blocks of `wr` columns per row and the others seeded column
    /// permutations of it.
    pub fn gallager(n: usize, wc: usize, wr: usize, seed: u64) -> Result<Self, CodecError> {
        if wr == 0 || wc == 0 || n % wr != 0 {
            return Err(CodecError::InvalidMatrix(format!("n = {n} is not a multiple of row weight {wr}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_band = n / wr;
        let mut rows = Vec::with_capacity(per_band * wc);
        let mut perm: Vec<usize> = (0..n).collect();
        for band in 0..wc {
            if band > 0 {
                perm.shuffle(&mut rng);
            }
            for r in 0..per_band {
                rows.push(perm[r * wr..(r + 1) * wr].to_vec());
            }
        }
        Self::from_rows(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn syndrome_is_zero(&self, bits: &[bool]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().filter(|&&c| bits[c]).count() % 2 == 0)
    }

    /// Parses the alist format: `n m`, max weights, column weights, row
    /// weights, then 1-based column and row index lists (zero entries are padding).
    pub fn from_alist(text: &str) -> Result<Self, CodecError> {
        let bad = |msg: &str| CodecError::InvalidMatrix(format!("alist: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut numbers = |what: &str| -> Result<Vec<usize>, CodecError> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing {what}")))?;
            line.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad(&format!("bad number {t:?} in {what}"))))
                .collect()
        };
        let dims = numbers("dimensions")?;
        let [n, m] = dims[..] else {
            return Err(bad("first line must hold n and m"));
        };
        numbers("maximum weights")?;
        let col_w = numbers("column weights")?;
        let row_w = numbers("row weights")?;
        if col_w.len() != n || row_w.len() != m {
            return Err(bad("weight list length mismatch"));
        }
        let mut col_lists = Vec::with_capacity(n);
        for (c, &w) in col_w.iter().enumerate() {
            let list: Vec<usize> = numbers("column list")?.into_iter().filter(|&x| x != 0).collect();
            if list.len() != w || list.iter().any(|&r| r > m) {
                return Err(bad(&format!("column {} list inconsistent", c + 1)));
            }
            col_lists.push(list);
        }
        let mut rows = Vec::with_capacity(m);
        for (r, &w) in row_w.iter().enumerate() {
            let list: Vec<usize> = numbers("row list")?.into_iter().filter(|&x| x != 0).collect();
            if list.len() != w || list.iter().any(|&c| c > n) {
                return Err(bad(&format!("row {} list inconsistent", r + 1)));
            }
            rows.push(list.into_iter().map(|c| c - 1).collect::<Vec<_>>());
        }
        let h = Self::from_rows(n, rows)?;
        for (c, list) in col_lists.iter().enumerate() {
            let mut expect: Vec<usize> = list.iter().map(|r| r - 1).collect();
            expect.sort_unstable();
            if expect != h.cols[c] {
                return Err(bad(&format!("column {} disagrees with the row lists", c + 1)));
            }
        }
        Ok(h)
    }

    pub fn to_alist(&self) -> String {
        let mut out = String::new();
        let max_c = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_r = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{} {}", self.n, self.m());
        let _ = writeln!(out, "{max_c} {max_r}");
        let _ = writeln!(out, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for col in &self.cols {
            let _ = writeln!(out, "{}", join(&mut col.iter().map(|r| r + 1)));
        }
        for row in &self.rows {
            let _ = writeln!(out, "{}", join(&mut row.iter().map(|c| c + 1)));
        }
        out
    }
}

/// A parity-check matrix with its systematic encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    h: ParityCheck,
    /// Reduced row-echelon rows as bitsets over the columns.
    reduced: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    /// Columns carrying information bits, ascending.
    info_cols: Vec<usize>,
    pub max_iters: usize,
}

fn get(row: &[u64], c: usize) -> bool {
    (row[c / 64] >> (c % 64)) & 1 == 1
}

impl LdpcCode {
    /// Gaussian elimination over GF(2); dependent rows are dropped.
    pub fn new(h: ParityCheck) -> Result<Self, CodecError> {
        let n = h.n;
        let words = n.div_ceil(64);
        let mut mat: Vec<Vec<u64>> = h
            .rows
            .iter()
            .map(|row| {
                let mut bits = vec![0u64; words];
                for &c in row {
                    bits[c / 64] ^= 1 << (c % 64);
                }
                bits
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..mat.len()).find(|&i| get(&mat[i], c)) else {
                continue;
            };
            mat.swap(r, p);
            let pivot_row = mat[r].clone();
            for (i, row) in mat.iter_mut().enumerate() {
                if i != r && get(row, c) {
                    row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
                }
            }
            pivots.push(c);
            r += 1;
            if r == mat.len() {
                break;
            }
        }
        mat.truncate(r);
        if r == 0 {
            return Err(CodecError::InvalidMatrix("parity-check matrix has rank zero".into()));
        }
        if r == n {
            return Err(CodecError::InvalidMatrix("full column rank leaves no information bits".into()));
        }
        let info_cols = (0..n).filter(|c| !pivots.contains(c)).collect();
        Ok(LdpcCode {
            h,
            reduced: mat,
            pivots,
            info_cols,
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    pub fn parity_check(&self) -> &ParityCheck {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.n
    }

    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn info_columns(&self) -> &[usize] {
        &self.info_cols
    }

    pub fn encode(&self, info: &[bool]) -> Result<Vec<bool>, CodecError> {
        if info.len() != self.k() {
            return Err(CodecError::BadLength {
                len: info.len(),
                multiple: self.k(),
            });
        }
        let mut cw = vec![false; self.n()];
        for (&c, &b) in self.info_cols.iter().zip(info) {
            cw[c] = b;
        }
        for (row, &p) in self.reduced.iter().zip(&self.pivots) {
            cw[p] = self.info_cols.iter().filter(|&&c| get(row, c) && cw[c]).count() % 2 == 1;
        }
        Ok(cw)
    }

    pub fn extract_info(&self, codeword: &[bool]) -> Vec<bool> {
        self.info_cols.iter().map(|&c| codeword[c]).collect()
    }

    /// Sum-product decoding of channel LLRs (positive favours 0). Stops as
    /// soon as the hard decision satisfies every check.
    pub fn decode(&self, llr: &[f64], max_iters: usize) -> Result<BpResult, CodecError> {
        let n = self.n();
        if llr.len() != n {
            return Err(CodecError::BadLength { len: llr.len(), multiple: n });
        }
        if llr.iter().any(|x| !x.is_finite()) {
            return Err(CodecError::NonFiniteLlr);
        }
        let rows = &self.h.rows;
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        for row in rows {
            offsets.push(offsets.last().unwrap() + row.len());
        }
        let edges = *offsets.last().unwrap();
        let mut v2c: Vec<f64> = rows.iter().flat_map(|row| row.iter().map(|&c| llr[c])).collect();
        let mut c2v = vec![0.0; edges];
        let mut total = llr.to_vec();
        let mut hard = vec![false; n];
        let mut prefix = Vec::new();
        for iter in 1..=max_iters.max(1) {
            for (r, row) in rows.iter().enumerate() {
                let base = offsets[r];
                let t: Vec<f64> = (0..row.len()).map(|i| (v2c[base + i] / 2.0).tanh()).collect();
                prefix.clear();
                let mut acc = 1.0;
                for &x in &t {
                    prefix.push(acc);
                    acc *= x;
                }
                let mut suffix = 1.0;
                for i in (0..row.len()).rev() {
                    let prod = (prefix[i] * suffix).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                    c2v[base + i] = (2.0 * prod.atanh()).clamp(-MAX_MESSAGE, MAX_MESSAGE);
                    suffix *= t[i];
                }
            }
            total.copy_from_slice(llr);
            for (r, row) in rows.iter().enumerate() {
                for (i, &c) in row.iter().enumerate() {
                    total[c] += c2v[offsets[r] + i];
                }
            }
            for (r, row) in rows.iter().enumerate() {
                for (i, &c) in row.iter().enumerate() {
                    v2c[offsets[r] + i] = total[c] - c2v[offsets[r] + i];
                }
            }
            for (h, &t) in hard.iter_mut().zip(&total) {
                *h = t < 0.0;
            }
            if self.h.syndrome_is_zero(&hard) {
                return Ok(BpResult {
                    bits: hard,
                    converged: true,
                    iterations: iter,
                });
            }
        }
        Ok(BpResult {
            bits: hard,
            converged: false,
            iterations: max_iters.max(1),
        })
    }

    /// Encodes a stream in blocks of `k` bits, zero-padding the last block.
    pub fn encode_bits(&self, bits: &BitStream) -> (BitStream, usize) {
        let k = self.k();
        let pad = (k - bits.len() % k) % k;
        let mut padded = bits.bits().to_vec();
        padded.resize(bits.len() + pad, false);
        let mut out = BitStream::new();
        for block in padded.chunks_exact(k) {
            for b in self.encode(block).expect("block length is k") {
                out.push(b);
            }
        }
        (out, pad)
    }

    /// Decodes whole codewords from LLRs and strips `pad` trailing bits.
    pub fn decode_llrs(&self, llr: &[f64], pad: usize) -> Result<(BitStream, LdpcStats), CodecError> {
        let n = self.n();
        if llr.len() % n != 0 {
            return Err(CodecError::BadLength { len: llr.len(), multiple: n });
        }
        let mut out = BitStream::new();
        let mut stats = LdpcStats::default();
        for block in llr.chunks_exact(n) {
            let r = self.decode(block, self.max_iters)?;
            stats.codewords += 1;
            stats.unconverged += usize::from(!r.converged);
            for b in self.extract_info(&r.bits) {
                out.push(b);
            }
        }
        let keep = out.len().saturating_sub(pad);
        Ok((out.bits()[..keep].iter().copied().collect(), stats))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpResult {
    pub bits: Vec<bool>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LdpcStats {
    pub codewords: usize,
    pub unconverged: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    const GALLAGER: &str = include_str!("../../tests/data/gallager_12_3_4.alist");

    fn llrs(cw: &[bool], mag: f64) -> Vec<f64> {
        cw.iter().map(|&b| if b { -mag } else { mag }).collect()
    }

    #[test]
    fn alist_round_trip() {
        let h = ParityCheck::from_alist(GALLAGER).unwrap();
        assert_eq!((h.n(), h.m()), (12, 9));
        assert!(h.cols().iter().all(|c| c.len() == 3));
        assert!(h.rows().iter().all(|r| r.len() == 4));
        assert_eq!(ParityCheck::from_alist(&h.to_alist()).unwrap(), h);
        assert!(ParityCheck::from_alist("12 9\n3 4\n").is_err());
        let broken = GALLAGER.replacen("1 6 9", "1 6 8", 1);
        assert!(ParityCheck::from_alist(&broken).is_err());
    }

    #[test]
    fn gallager_rank_and_codewords() {
        let code = LdpcCode::new(ParityCheck::from_alist(GALLAGER).unwrap()).unwrap();
        // each band sums to the all-ones row, so at least two rows are dependent
        assert!(code.rank() <= 7);
        assert_eq!(code.k(), 12 - code.rank());
        for v in 0..(1u32 << code.k()) {
            let info: Vec<bool> = (0..code.k()).map(|i| (v >> i) & 1 == 1).collect();
            let cw = code.encode(&info).unwrap();
            assert!(code.parity_check().syndrome_is_zero(&cw));
            assert_eq!(code.extract_info(&cw), info);
        }
    }

    #[test]
    fn noiseless_converges_in_one_iteration() {
        let code = LdpcCode::new(ParityCheck::from_alist(GALLAGER).unwrap()).unwrap();
        let info: Vec<bool> = (0..code.k()).map(|i| i % 2 == 0).collect();
        let cw = code.encode(&info).unwrap();
        let r = code.decode(&llrs(&cw, 50.0), 25).unwrap();
        assert_eq!(r, BpResult { bits: cw, converged: true, iterations: 1 });
    }

    #[test]
    fn single_flip_is_corrected() {
        let code = LdpcCode::new(ParityCheck::from_alist(GALLAGER).unwrap()).unwrap();
        for v in 0..(1u32 << code.k()) {
            let info: Vec<bool> = (0..code.k()).map(|i| (v >> i) & 1 == 1).collect();
            let cw = code.encode(&info).unwrap();
            for flip in 0..code.n() {
                let mut l = llrs(&cw, 8.0);
                l[flip] = -l[flip];
                let r = code.decode(&l, 25).unwrap();
                assert!(r.converged, "flip {flip}");
                assert_eq!(r.bits, cw, "flip {flip}");
            }
        }
    }

    #[test]
    fn converged_flag_matches_syndrome() {
        let code = LdpcCode::new(ParityCheck::from_alist(GALLAGER).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let l: Vec<f64> = (0..12).map(|_| rng.random_range(-3.0..3.0)).collect();
            let r = code.decode(&l, 10).unwrap();
            assert_eq!(r.converged, code.parity_check().syndrome_is_zero(&r.bits));
        }
    }

    #[test]
    fn construction_errors() {
        assert!(ParityCheck::from_rows(0, vec![]).is_err());
        assert!(ParityCheck::from_rows(3, vec![vec![0, 5]]).is_err());
        let zero = ParityCheck::from_rows(4, vec![vec![], vec![]]).unwrap();
        assert!(LdpcCode::new(zero).is_err());
        let full = ParityCheck::from_rows(2, vec![vec![0], vec![1]]).unwrap();
        assert!(LdpcCode::new(full).is_err());
        let code = LdpcCode::new(ParityCheck::from_alist(GALLAGER).unwrap()).unwrap();
        assert!(code.decode(&[f64::NAN; 12], 5).is_err());
        assert!(code.encode(&[true]).is_err());
    }

    #[test]
    fn generated_rate_two_thirds() {
        let code = LdpcCode::new(ParityCheck::gallager(108, 3, 9, 1).unwrap()).unwrap();
        assert!(code.rate() >= 2.0 / 3.0);
        assert_eq!(code.parity_check().m(), 36);
    }

    proptest! {
        #[test]
        fn stream_round_trip(bits in prop::collection::vec(any::<bool>(), 0..200)) {
            let code = LdpcCode::new(ParityCheck::gallager(108, 3, 9, 1).unwrap()).unwrap();
            let b = BitStream::from_bits(bits);
            let (coded, pad) = code.encode_bits(&b);
            prop_assert_eq!(coded.len() % code.n(), 0);
            let l = llrs(coded.bits(), 20.0);
            let (back, stats) = code.decode_llrs(&l, pad).unwrap();
            prop_assert_eq!(back, b);
            prop_assert_eq!(stats.unconverged, 0);
        }
    }
}

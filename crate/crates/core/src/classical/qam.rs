//! Gray-mapped square 64-QAM with unit average energy.

use num_complex::Complex64;

use super::bits::{read_bits, BitStream};
use crate::channel::ComplexSymbolBlock;

pub const BITS_PER_SYMBOL: usize = 6;
const AXIS_BITS: usize = 3;
const LEVELS: usize = 8;

/// `1/sqrt(42)` scales the `{±1, ±3, ±5, ±7}^2` grid to unit mean energy.
pub fn scale() -> f64 {
    42f64.sqrt().recip()
}

fn gray_to_index(g: u32) -> u32 {
    let b2 = (g >> 2) & 1;
    let b1 = ((g >> 1) & 1) ^ b2;
    let b0 = (g & 1) ^ b1;
    (b2 << 2) | (b1 << 1) | b0
}

fn index_to_gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

fn level(index: u32) -> f64 {
    2.0 * index as f64 - 7.0
}

/// 64 constellation points indexed by their 6-bit label (3 bits I, 3 bits Q).
#[derive(Debug, Clone, PartialEq)]
pub struct Qam64 {
    points: Vec<Complex64>,
}

impl Default for Qam64 {
    fn default() -> Self {
        let s = scale();
        let points = (0..64u32)
            .map(|label| {
                let i = gray_to_index(label >> AXIS_BITS);
                let q = gray_to_index(label & 0b111);
                Complex64::new(level(i) * s, level(q) * s)
            })
            .collect();
        Qam64 { points }
    }
}

impl Qam64 {
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// Maps bits to symbols, zero-padding to a multiple of six. Returns the
    /// symbols and the pad length.
    pub fn modulate(&self, bits: &BitStream) -> (ComplexSymbolBlock, usize) {
        let pad = (BITS_PER_SYMBOL - bits.len() % BITS_PER_SYMBOL) % BITS_PER_SYMBOL;
        let mut padded = bits.bits().to_vec();
        padded.resize(bits.len() + pad, false);
        let symbols = padded
            .chunks_exact(BITS_PER_SYMBOL)
            .map(|c| self.point(read_bits(c)))
            .collect();
        (ComplexSymbolBlock::new(symbols), pad)
    }

    fn axis_index(v: f64) -> u32 {
        ((v / scale() + 7.0) / 2.0).round().clamp(0.0, (LEVELS - 1) as f64) as u32
    }

    /// Nearest-point label of one symbol.
    pub fn detect(&self, y: Complex64) -> u32 {
        let i = index_to_gray(Self::axis_index(y.re));
        let q = index_to_gray(Self::axis_index(y.im));
        (i << AXIS_BITS) | q
    }

    /// Hard-decision demodulation, stripping `pad` trailing bits.
    pub fn demodulate(&self, symbols: &ComplexSymbolBlock, pad: usize) -> BitStream {
        let mut out = BitStream::new();
        for &y in symbols.symbols() {
            out.push_bits(self.detect(y), BITS_PER_SYMBOL);
        }
        let keep = out.len().saturating_sub(pad);
        out.bits()[..keep].iter().copied().collect()
    }

    /// Max-log bit LLRs (positive favours 0). `noise_variance[i]` is the
    /// total complex noise variance seen by symbol `i` after equalization.
    pub fn demodulate_llr(&self, symbols: &ComplexSymbolBlock, noise_variance: &[f64], pad: usize) -> Vec<f64> {
        let s = scale();
        let mut out = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
        for (k, &y) in symbols.symbols().iter().enumerate() {
            let var = noise_variance[k.min(noise_variance.len() - 1)].max(1e-300);
            for v in [y.re, y.im] {
                for bit in (0..AXIS_BITS).rev() {
                    let mut d0 = f64::INFINITY;
                    let mut d1 = f64::INFINITY;
                    for idx in 0..LEVELS as u32 {
                        let d = (v - level(idx) * s).powi(2);
                        if (index_to_gray(idx) >> bit) & 1 == 0 {
                            d0 = d0.min(d);
                        } else {
                            d1 = d1.min(d);
                        }
                    }
                    // per-axis variance is var / 2
                    out.push((d1 - d0) / var);
                }
            }
        }
        out.truncate(out.len().saturating_sub(pad));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_energy() {
        let q = Qam64::default();
        let raw: f64 = (0..8).flat_map(|i| (0..8).map(move |j| level(i).powi(2) + level(j).powi(2))).sum();
        assert_eq!(raw / 64.0 / 42.0, 1.0);
        let e: f64 = q.points().iter().map(Complex64::norm_sqr).sum::<f64>() / 64.0;
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_round_trip_all_labels() {
        let q = Qam64::default();
        let mut bits = BitStream::new();
        for label in 0..64 {
            bits.push_bits(label, 6);
        }
        let (sym, pad) = q.modulate(&bits);
        assert_eq!(pad, 0);
        assert_eq!(sym.len(), 64);
        assert_eq!(q.demodulate(&sym, pad), bits);

        let odd = BitStream::from_bits(vec![true, false, true, true]);
        let (sym, pad) = q.modulate(&odd);
        assert_eq!((sym.len(), pad), (1, 2));
        assert_eq!(q.demodulate(&sym, pad), odd);
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let q = Qam64::default();
        let step = 2.0 * scale();
        let mut pairs = 0;
        for a in 0..64u32 {
            for b in a + 1..64u32 {
                let d = q.point(a) - q.point(b);
                let adjacent = (d.norm() - step).abs() < 1e-9;
                if adjacent {
                    pairs += 1;
                    assert_eq!((a ^ b).count_ones(), 1, "{a:06b} {b:06b}");
                }
            }
        }
        assert_eq!(pairs, 112);
    }

    #[test]
    fn llr_signs_match_hard_decisions() {
        let q = Qam64::default();
        let mut bits = BitStream::new();
        for label in 0..64 {
            bits.push_bits(label, 6);
        }
        let (sym, _) = q.modulate(&bits);
        let llr = q.demodulate_llr(&sym, &[0.1], 0);
        for (l, &b) in llr.iter().zip(bits.bits()) {
            assert_eq!(*l < 0.0, b);
        }
    }

    /// Gaussian tail probability by Simpson integration of the density.
    fn q_function(x: f64) -> f64 {
        let (a, b, n) = (x, x + 12.0, 20_000);
        let h = (b - a) / n as f64;
        let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut sum = f(a) + f(b);
        for i in 1..n {
            sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    #[test]
    fn symbol_error_rate_matches_analytic_at_18_db() {
        use crate::channel::{transmit, ChannelConfig, ChannelKind};
        use rand::SeedableRng;

        let q = Qam64::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
        let n = 1_000_000;
        let labels: Vec<u32> = (0..n).map(|i| ((i as u64).wrapping_mul(2654435761) >> 7) as u32 % 64).collect();
        let block = ComplexSymbolBlock::new(labels.iter().map(|&l| q.point(l)).collect());
        let (rx, _) = transmit(&block, &ChannelConfig::new(ChannelKind::Awgn, 18.0), &mut rng);
        let errors = rx.symbols().iter().zip(&labels).filter(|(y, &l)| q.detect(**y) != l).count();
        let ser = errors as f64 / n as f64;

        let es_n0 = 10f64.powf(1.8);
        let p_axis = 2.0 * (1.0 - 1.0 / 8.0) * q_function((3.0 * es_n0 / 63.0).sqrt());
        let analytic = 1.0 - (1.0 - p_axis).powi(2);
        assert!((ser - analytic).abs() / analytic < 0.05, "{ser} vs {analytic}");
    }
}

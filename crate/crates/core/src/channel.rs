//! Complex-baseband channel: `y = h x + n` with AWGN, Rayleigh or Rician
//! gain and perfect-CSI zero-forcing equalization.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Gains with magnitude below this are treated as a deep fade.
pub const DEEP_FADE: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChannelError {
    #[error("zero-power block")]
    ZeroPower,
    #[error("channel in deep fade (|h| = {0:e})")]
    DeepFade(f64),
    #[error("received block has {received} symbols but realization covers {expected}")]
    LengthMismatch { received: usize, expected: usize },
    #[error("unknown channel kind {0:?}")]
    UnknownKind(String),
}

/// A block of complex baseband symbols.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexSymbolBlock(Vec<Complex64>);

impl ComplexSymbolBlock {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        ComplexSymbolBlock(symbols)
    }

    /// Pairs `(re, im)` from an interleaved real sequence. A trailing odd
    /// value is ignored.
    pub fn from_interleaved(reals: &[f64]) -> Self {
        ComplexSymbolBlock(reals.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn to_interleaved(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mean of `|x_i|^2`.
    pub fn mean_power(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(Complex64::norm_sqr).sum::<f64>() / self.0.len() as f64
    }
}

/// Scales the block to unit mean symbol power.
pub fn power_normalize(block: &ComplexSymbolBlock) -> Result<ComplexSymbolBlock, ChannelError> {
    let p = block.mean_power();
    if !(p > 0.0) || !p.is_finite() {
        return Err(ChannelError::ZeroPower);
    }
    let scale = p.sqrt().recip();
    Ok(ComplexSymbolBlock(block.0.iter().map(|c| c * scale).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
    Rician,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Awgn, ChannelKind::Rayleigh, ChannelKind::Rician];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Rayleigh => "rayleigh",
            ChannelKind::Rician => "rician",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh" => Ok(ChannelKind::Rayleigh),
            "rician" | "rice" => Ok(ChannelKind::Rician),
            _ => Err(ChannelError::UnknownKind(s.to_owned())),
        }
    }
}

/// Whether the gain is drawn once per block or once per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    #[default]
    Block,
    PerSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    /// Average received signal-to-noise ratio per complex symbol for a
    /// unit-power input. `f64::INFINITY` disables the noise.
    pub snr_db: f64,
    /// Rician K-factor in dB.
    pub rician_k_db: f64,
    pub fading: Fading,
}

impl ChannelConfig {
    pub fn new(kind: ChannelKind, snr_db: f64) -> Self {
        ChannelConfig {
            kind,
            snr_db,
            rician_k_db: 10.0,
            fading: Fading::Block,
        }
    }

    pub fn noiseless(kind: ChannelKind) -> Self {
        ChannelConfig::new(kind, f64::INFINITY)
    }

    /// Total complex noise variance `sigma^2 = 10^(-snr_db/10)`.
    pub fn noise_variance(&self) -> f64 {
        noise_variance(self.snr_db)
    }

    pub fn rician_k(&self) -> f64 {
        10f64.powf(self.rician_k_db / 10.0)
    }
}

pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Gain and noise drawn for one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Block gain; the first per-symbol gain when fading per symbol.
    pub gain: Complex64,
    /// Per-symbol gains, empty for block fading.
    pub symbol_gains: Vec<Complex64>,
    pub noise: Vec<Complex64>,
    pub noise_variance: f64,
}

impl ChannelRealization {
    pub fn gain_at(&self, i: usize) -> Complex64 {
        if self.symbol_gains.is_empty() {
            self.gain
        } else {
            self.symbol_gains[i]
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// Draws a channel gain: 1 for AWGN, `CN(0, 1)` for Rayleigh and
/// `CN(sqrt(K/(K+1)), 1/(K+1))` for Rician.
pub fn sample_gain<R: Rng + ?Sized>(config: &ChannelConfig, rng: &mut R) -> Complex64 {
    match config.kind {
        ChannelKind::Awgn => Complex64::new(1.0, 0.0),
        ChannelKind::Rayleigh => complex_gaussian(rng, 1.0),
        ChannelKind::Rician => {
            let k = config.rician_k();
            Complex64::new((k / (k + 1.0)).sqrt(), 0.0) + complex_gaussian(rng, 1.0 / (k + 1.0))
        }
    }
}

/// `n` i.i.d. circularly-symmetric Gaussian samples of total variance `variance`.
pub fn sample_noise<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Vec<Complex64> {
    if variance == 0.0 {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    (0..n).map(|_| complex_gaussian(rng, variance)).collect()
}

/// Passes `block` through the channel.
pub fn transmit<R: Rng + ?Sized>(
    block: &ComplexSymbolBlock,
    config: &ChannelConfig,
    rng: &mut R,
) -> (ComplexSymbolBlock, ChannelRealization) {
    let power = block.mean_power();
    if !block.is_empty() && (power - 1.0).abs() > 0.5 {
        log::warn!("transmitting block with mean power {power:.3}, SNR reference assumes unit power");
    }
    let (gain, symbol_gains) = match config.fading {
        Fading::Block => (sample_gain(config, rng), Vec::new()),
        Fading::PerSymbol => {
            let g: Vec<Complex64> = (0..block.len()).map(|_| sample_gain(config, rng)).collect();
            (g.first().copied().unwrap_or(Complex64::new(1.0, 0.0)), g)
        }
    };
    let variance = config.noise_variance();
    let noise = sample_noise(block.len(), variance, rng);
    let realization = ChannelRealization {
        gain,
        symbol_gains,
        noise,
        noise_variance: variance,
    };
    let received = block
        .0
        .iter()
        .enumerate()
        .map(|(i, x)| realization.gain_at(i) * x + realization.noise[i])
        .collect();
    (ComplexSymbolBlock(received), realization)
}

/// Zero-forcing with the known gain: `y / h`.
pub fn equalize(received: &ComplexSymbolBlock, realization: &ChannelRealization) -> Result<ComplexSymbolBlock, ChannelError> {
    if !realization.symbol_gains.is_empty() && realization.symbol_gains.len() != received.len() {
        return Err(ChannelError::LengthMismatch {
            received: received.len(),
            expected: realization.symbol_gains.len(),
        });
    }
    received
        .0
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let h = realization.gain_at(i);
            if h.norm() < DEEP_FADE {
                Err(ChannelError::DeepFade(h.norm()))
            } else {
                Ok(y / h)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(ComplexSymbolBlock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_block(n: usize, seed: u64) -> ComplexSymbolBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexSymbolBlock::new((0..n).map(|_| complex_gaussian(&mut rng, 3.0)).collect())
    }

    #[test]
    fn normalization() {
        let b = random_block(100, 1);
        let n = power_normalize(&b).unwrap();
        assert!((n.mean_power() - 1.0).abs() < 1e-9);
        let scaled = ComplexSymbolBlock::new(b.symbols().iter().map(|c| c * 7.5).collect());
        let ns = power_normalize(&scaled).unwrap();
        for (a, b) in n.symbols().iter().zip(ns.symbols()) {
            assert!((a - b).norm() < 1e-12);
        }
        let zero = ComplexSymbolBlock::new(vec![Complex64::new(0.0, 0.0); 4]);
        assert_eq!(power_normalize(&zero), Err(ChannelError::ZeroPower));
    }

    #[test]
    fn awgn_gain_is_one_and_noiseless_is_identity() {
        let cfg = ChannelConfig::noiseless(ChannelKind::Awgn);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_gain(&cfg, &mut rng), Complex64::new(1.0, 0.0));
        let x = power_normalize(&random_block(50, 2)).unwrap();
        let (y, real) = transmit(&x, &cfg, &mut rng);
        assert_eq!(y, x);
        assert_eq!(equalize(&y, &real).unwrap(), x);
    }

    #[test]
    fn noiseless_fading_is_undone_by_equalization() {
        let x = power_normalize(&random_block(64, 4)).unwrap();
        for kind in [ChannelKind::Rayleigh, ChannelKind::Rician] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let (y, real) = transmit(&x, &ChannelConfig::noiseless(kind), &mut rng);
            let eq = equalize(&y, &real).unwrap();
            for (a, b) in eq.symbols().iter().zip(x.symbols()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn block_fading_shares_one_gain() {
        let x = power_normalize(&random_block(32, 6)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (y, real) = transmit(&x, &ChannelConfig::noiseless(ChannelKind::Rayleigh), &mut rng);
        for (yi, xi) in y.symbols().iter().zip(x.symbols()) {
            assert!((yi - real.gain * xi).norm() < 1e-12);
        }
    }

    #[test]
    fn deep_fade_guard() {
        let real = ChannelRealization {
            gain: Complex64::new(1e-13, 0.0),
            symbol_gains: vec![],
            noise: vec![],
            noise_variance: 0.0,
        };
        let y = ComplexSymbolBlock::new(vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(equalize(&y, &real), Err(ChannelError::DeepFade(_))));
    }

    #[test]
    fn deterministic_under_seed() {
        let x = power_normalize(&random_block(40, 8)).unwrap();
        let cfg = ChannelConfig::new(ChannelKind::Rician, 5.0);
        let a = transmit(&x, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = transmit(&x, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn rician_large_k_approaches_unit_gain() {
        let mut cfg = ChannelConfig::new(ChannelKind::Rician, 10.0);
        cfg.rician_k_db = 60.0;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let close = (0..10_000)
            .filter(|_| (sample_gain(&cfg, &mut rng) - Complex64::new(1.0, 0.0)).norm() < 0.01)
            .count();
        assert!(close >= 9_900, "{close}");
    }

    #[test]
    fn noise_real_parts_look_gaussian() {
        // Jarque-Bera on 1e5 samples; 9.21 is the chi-square(2) 0.99 quantile.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = sample_noise(100_000, 2.0, &mut rng);
        let xs: Vec<f64> = n.iter().map(|c| c.re).collect();
        let len = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / len;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len;
        let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / len;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / len;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2);
        let jb = len / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
        assert!(jb < 9.21, "JB = {jb}");
        assert!((m2 - 1.0).abs() < 0.02);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("AWGN".parse::<ChannelKind>().unwrap(), ChannelKind::Awgn);
        assert_eq!("rician".parse::<ChannelKind>().unwrap(), ChannelKind::Rician);
        assert!("ofdm".parse::<ChannelKind>().is_err());
    }
}

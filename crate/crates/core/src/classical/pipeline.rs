//! Text to 64-QAM and back through a channel: source code, optional channel
//! code, modulation, equalization, demodulation and decoding.

use rand::Rng;

use super::alphabet::{fixed6_decode, fixed6_encode, CharAlphabet};
use super::bits::BitStream;
use super::huffman::{char_frequencies, HuffmanCode};
use super::ldpc::LdpcCode;
use super::qam::Qam64;
use super::{rs, CodecError};
use crate::channel::{equalize, transmit, ChannelConfig};

#[derive(Debug, Clone)]
pub enum SourceCode {
    Huffman(HuffmanCode),
    Fixed6,
}

impl SourceCode {
    /// Huffman code over the character frequencies of `texts`, after mapping
    /// characters outside the alphabet to space. Space always gets a code
    /// word so unseen characters stay encodable.
    pub fn huffman_from_texts<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Result<Self, CodecError> {
        let alphabet = CharAlphabet::default();
        let cleaned: Vec<String> = texts.into_iter().map(|t| alphabet.sanitize(t).0).collect();
        let mut freqs = char_frequencies(cleaned.iter().map(String::as_str));
        freqs.entry(' ').or_insert(0.0);
        let total: f64 = freqs.values().sum();
        let floor = if total > 0.0 { total * 1e-9 } else { 1.0 };
        for v in freqs.values_mut() {
            if *v <= 0.0 {
                *v = floor;
            }
        }
        Ok(SourceCode::Huffman(HuffmanCode::build(&freqs)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SourceCode::Huffman(_) => "huffman",
            SourceCode::Fixed6 => "fixed6",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ChannelCode {
    Rs,
    Ldpc(LdpcCode),
    None,
}

impl ChannelCode {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelCode::Rs => "rs",
            ChannelCode::Ldpc(_) => "ldpc",
            ChannelCode::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Decoded text; a best-effort prefix when `source_error` is set.
    pub decoded: String,
    pub symbol_count: usize,
    pub coded_bits: usize,
    pub source_bits: usize,
    /// Characters replaced by space before encoding.
    pub replaced: usize,
    pub source_error: bool,
    pub rs_failures: usize,
    pub ldpc_unconverged: usize,
}

#[derive(Debug, Clone)]
pub struct ClassicalPipeline {
    pub source: SourceCode,
    pub channel_code: ChannelCode,
    alphabet: CharAlphabet,
    qam: Qam64,
}

impl ClassicalPipeline {
    pub fn new(source: SourceCode, channel_code: ChannelCode) -> Self {
        ClassicalPipeline {
            source,
            channel_code,
            alphabet: CharAlphabet::default(),
            qam: Qam64::default(),
        }
    }

    pub fn name(&self) -> String {
        format!("{}+{}", self.source.name(), self.channel_code.name())
    }

    fn source_encode(&self, text: &str) -> Result<(BitStream, usize), CodecError> {
        match &self.source {
            SourceCode::Fixed6 => Ok(fixed6_encode(&self.alphabet, text)),
            SourceCode::Huffman(code) => {
                let (clean, mut replaced) = self.alphabet.sanitize(text);
                let mapped: String = clean
                    .chars()
                    .map(|c| {
                        if code.contains(c) {
                            c
                        } else {
                            replaced += 1;
                            ' '
                        }
                    })
                    .collect();
                Ok((code.encode(&mapped)?, replaced))
            }
        }
    }

    fn source_decode(&self, bits: &BitStream) -> Result<String, CodecError> {
        match &self.source {
            SourceCode::Fixed6 => fixed6_decode(&self.alphabet, bits),
            SourceCode::Huffman(code) => code.decode(bits),
        }
    }

    /// Symbols needed for `text` without sending anything.
    pub fn symbol_count(&self, text: &str) -> Result<usize, CodecError> {
        let (bits, _) = self.source_encode(text)?;
        Ok(self.channel_encode(&bits).0.len().div_ceil(6))
    }

    fn channel_encode(&self, bits: &BitStream) -> (BitStream, usize) {
        match &self.channel_code {
            ChannelCode::Rs => rs::encode_bits(bits),
            ChannelCode::Ldpc(code) => code.encode_bits(bits),
            ChannelCode::None => (bits.clone(), 0),
        }
    }

    /// Sends `text` once over `channel`.
    pub fn run<R: Rng + ?Sized>(
        &self,
        text: &str,
        channel: &ChannelConfig,
        rng: &mut R,
    ) -> Result<PipelineOutput, CodecError> {
        let (source_bits, replaced) = self.source_encode(text)?;
        let (coded, code_pad) = self.channel_encode(&source_bits);
        let (symbols, qam_pad) = self.qam.modulate(&coded);
        let (received, realization) = transmit(&symbols, channel, rng);
        let equalized = equalize(&received, &realization)?;

        let mut rs_failures = 0;
        let mut ldpc_unconverged = 0;
        let recovered = match &self.channel_code {
            ChannelCode::None => self.qam.demodulate(&equalized, qam_pad),
            ChannelCode::Rs => {
                let hard = self.qam.demodulate(&equalized, qam_pad);
                let (bits, stats) = rs::decode_bits(&hard, code_pad)?;
                rs_failures = stats.failures;
                bits
            }
            ChannelCode::Ldpc(code) => {
                let variances: Vec<f64> = (0..equalized.len())
                    .map(|i| realization.noise_variance / realization.gain_at(i).norm_sqr())
                    .collect();
                let mut llr = self.qam.demodulate_llr(&equalized, &variances, qam_pad);
                if realization.noise_variance == 0.0 {
                    // noiseless: the ratio above is zero and the LLRs blow up
                    llr = self
                        .qam
                        .demodulate(&equalized, qam_pad)
                        .bits()
                        .iter()
                        .map(|&b| if b { -50.0 } else { 50.0 })
                        .collect();
                }
                let (bits, stats) = code.decode_llrs(&llr, code_pad)?;
                ldpc_unconverged = stats.unconverged;
                bits
            }
        };

        let (decoded, source_error) = match self.source_decode(&recovered) {
            Ok(s) => (s, false),
            Err(CodecError::CorruptBitstream { decoded_prefix }) => (decoded_prefix, true),
            Err(e) => return Err(e),
        };
        Ok(PipelineOutput {
            decoded,
            symbol_count: symbols.len(),
            coded_bits: coded.len(),
            source_bits: source_bits.len(),
            replaced,
            source_error,
            rs_failures,
            ldpc_unconverged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelKind, Fading};
    use crate::classical::ldpc::ParityCheck;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TEXTS: [&str; 4] = [
        "the cat sat on the mat .",
        "a dog ran to the park , quickly !",
        "is it 42 or 7 ?",
        "we meet at noon ; bring the \"map\" ( please ) .",
    ];

    fn pipelines() -> Vec<ClassicalPipeline> {
        let huff = SourceCode::huffman_from_texts(TEXTS).unwrap();
        let ldpc = LdpcCode::new(ParityCheck::gallager(108, 3, 9, 1).unwrap()).unwrap();
        let mut out = Vec::new();
        for source in [huff, SourceCode::Fixed6] {
            for cc in [ChannelCode::Rs, ChannelCode::Ldpc(ldpc.clone()), ChannelCode::None] {
                out.push(ClassicalPipeline::new(source.clone(), cc));
            }
        }
        out
    }

    #[test]
    fn noiseless_every_configuration_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in pipelines() {
            for kind in [ChannelKind::Awgn, ChannelKind::Rayleigh, ChannelKind::Rician] {
                for t in TEXTS {
                    let out = p.run(t, &ChannelConfig::noiseless(kind), &mut rng).unwrap();
                    assert_eq!(out.decoded, t, "{}", p.name());
                    assert!(!out.source_error);
                    assert_eq!(out.symbol_count, out.coded_bits.div_ceil(6));
                    assert_eq!(out.symbol_count, p.symbol_count(t).unwrap());
                }
            }
        }
    }

    #[test]
    fn huffman_uses_fewer_symbols_than_fixed6() {
        let huff = SourceCode::huffman_from_texts(TEXTS).unwrap();
        let a = ClassicalPipeline::new(huff, ChannelCode::Rs);
        let b = ClassicalPipeline::new(SourceCode::Fixed6, ChannelCode::Rs);
        let sa: usize = TEXTS.iter().map(|t| a.symbol_count(t).unwrap()).sum();
        let sb: usize = TEXTS.iter().map(|t| b.symbol_count(t).unwrap()).sum();
        assert!(sa < sb, "{sa} vs {sb}");
    }

    #[test]
    fn fixed6_rs_symbol_accounting() {
        // 24 chars -> 144 bits -> 10 RS blocks of 15 (pad 6) -> 210 bits -> 35 symbols
        let p = ClassicalPipeline::new(SourceCode::Fixed6, ChannelCode::Rs);
        assert_eq!(p.symbol_count(TEXTS[0]).unwrap(), 35);
    }

    #[test]
    fn unseen_characters_map_to_space() {
        let huff = SourceCode::huffman_from_texts(["abc"]).unwrap();
        let p = ClassicalPipeline::new(huff, ChannelCode::None);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = p.run("abz", &ChannelConfig::noiseless(ChannelKind::Awgn), &mut rng).unwrap();
        assert_eq!(out.decoded, "ab ");
        assert_eq!(out.replaced, 1);
    }

    #[test]
    fn low_snr_corrupts_and_high_snr_recovers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = ClassicalPipeline::new(SourceCode::Fixed6, ChannelCode::Rs);
        let noisy = ChannelConfig::new(ChannelKind::Awgn, -3.0);
        let bad = TEXTS.iter().filter(|t| p.run(t, &noisy, &mut rng).unwrap().decoded != **t).count();
        assert_eq!(bad, TEXTS.len());
        let clean = ChannelConfig::new(ChannelKind::Awgn, 40.0);
        for t in TEXTS {
            assert_eq!(p.run(t, &clean, &mut rng).unwrap().decoded, t);
        }
    }

    #[test]
    fn ldpc_soft_decoding_beats_uncoded_at_moderate_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ldpc = LdpcCode::new(ParityCheck::gallager(108, 3, 9, 1).unwrap()).unwrap();
        let coded = ClassicalPipeline::new(SourceCode::Fixed6, ChannelCode::Ldpc(ldpc));
        let plain = ClassicalPipeline::new(SourceCode::Fixed6, ChannelCode::None);
        let cfg = ChannelConfig {
            fading: Fading::Block,
            ..ChannelConfig::new(ChannelKind::Awgn, 16.0)
        };
        let errors = |p: &ClassicalPipeline, rng: &mut ChaCha8Rng| -> usize {
            (0..200)
                .map(|i| {
                    let t = TEXTS[i % TEXTS.len()];
                    let d = p.run(t, &cfg, rng).unwrap().decoded;
                    t.chars().zip(d.chars()).filter(|(a, b)| a != b).count()
                })
                .sum()
        };
        let e_coded = errors(&coded, &mut rng);
        let e_plain = errors(&plain, &mut rng);
        assert!(e_coded < e_plain, "{e_coded} vs {e_plain}");
    }
}

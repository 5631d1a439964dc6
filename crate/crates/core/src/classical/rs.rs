//! Reed-Solomon (7, 5) code over GF(8) with single-symbol error correction.
//!
//! GF(8) uses the primitive polynomial `x^3 + x + 1` with `alpha = 2`. The
//! generator polynomial has roots `alpha` and `alpha^2`. Codeword index 0 holds
//! the coefficient of `x^6`; the message occupies indices 0..5 and parity 5..7.

use super::bits::{read_bits, BitStream};
use super::CodecError;

pub const N: usize = 7;
pub const K: usize = 5;
/// Correctable symbol errors.
pub const T: usize = (N - K) / 2;
pub const SYMBOL_BITS: usize = 3;

const EXP: [u8; 14] = [1, 2, 4, 3, 6, 7, 5, 1, 2, 4, 3, 6, 7, 5];
const LOG: [u8; 8] = [0, 0, 1, 3, 2, 6, 4, 5];

/// Element of GF(8).
pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        EXP[(LOG[a as usize] + LOG[b as usize]) as usize]
    }
}

pub fn gf_div(a: u8, b: u8) -> u8 {
    assert!(b != 0, "division by zero in GF(8)");
    if a == 0 {
        0
    } else {
        EXP[(LOG[a as usize] + 7 - LOG[b as usize]) as usize]
    }
}

pub fn gf_pow_alpha(e: usize) -> u8 {
    EXP[e % 7]
}

/// `g(x) = (x - alpha)(x - alpha^2)`, highest degree first.
pub const GENERATOR: [u8; 3] = [1, 6, 3];

pub fn encode(message: &[u8; K]) -> Result<[u8; N], CodecError> {
    if let Some(&s) = message.iter().find(|&&s| s > 7) {
        return Err(CodecError::SymbolOutOfRange(s));
    }
    // remainder of m(x) x^2 divided by g(x)
    let mut rem = [0u8; 2];
    for &m in message {
        let feedback = m ^ rem[0];
        rem[0] = rem[1] ^ gf_mul(feedback, GENERATOR[1]);
        rem[1] = gf_mul(feedback, GENERATOR[2]);
    }
    let mut cw = [0u8; N];
    cw[..K].copy_from_slice(message);
    cw[K..].copy_from_slice(&rem);
    Ok(cw)
}

/// `c(alpha^i)` for `i = 1, 2`.
pub fn syndromes(codeword: &[u8; N]) -> [u8; 2] {
    let eval = |x: u8| codeword.iter().fold(0u8, |acc, &c| gf_mul(acc, x) ^ c);
    [eval(gf_pow_alpha(1)), eval(gf_pow_alpha(2))]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    /// Syndromes were zero.
    Clean,
    /// One symbol was changed at the given codeword index.
    Corrected { position: usize },
    /// Syndromes match no single-error pattern; the message part is returned as received.
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsDecoded {
    pub message: [u8; K],
    pub corrected_count: usize,
    pub status: RsStatus,
}

pub fn decode(received: &[u8; N]) -> Result<RsDecoded, CodecError> {
    if let Some(&s) = received.iter().find(|&&s| s > 7) {
        return Err(CodecError::SymbolOutOfRange(s));
    }
    let [s1, s2] = syndromes(received);
    let mut cw = *received;
    let status = match (s1, s2) {
        (0, 0) => RsStatus::Clean,
        (0, _) | (_, 0) => RsStatus::Failure,
        _ => {
            // s1 = e * alpha^j, s2 = e * alpha^2j
            let locator = gf_div(s2, s1);
            let degree = LOG[locator as usize] as usize;
            let value = gf_div(s1, locator);
            let position = N - 1 - degree;
            cw[position] ^= value;
            RsStatus::Corrected { position }
        }
    };
    let mut message = [0u8; K];
    message.copy_from_slice(&cw[..K]);
    Ok(RsDecoded {
        message,
        corrected_count: usize::from(matches!(status, RsStatus::Corrected { .. })),
        status,
    })
}

/// Bits consumed per codeword and emitted per codeword.
pub const INFO_BITS: usize = K * SYMBOL_BITS;
pub const CODE_BITS: usize = N * SYMBOL_BITS;

/// Encodes a bit stream, zero-padding to a whole number of codewords.
/// Returns the coded bits and the number of padding bits.
pub fn encode_bits(bits: &BitStream) -> (BitStream, usize) {
    let pad = (INFO_BITS - bits.len() % INFO_BITS) % INFO_BITS;
    let mut padded = bits.bits().to_vec();
    padded.resize(bits.len() + pad, false);
    let mut out = BitStream::new();
    for block in padded.chunks_exact(INFO_BITS) {
        let mut msg = [0u8; K];
        for (i, sym) in block.chunks_exact(SYMBOL_BITS).enumerate() {
            msg[i] = read_bits(sym) as u8;
        }
        for s in encode(&msg).expect("3-bit symbols") {
            out.push_bits(u32::from(s), SYMBOL_BITS);
        }
    }
    (out, pad)
}

/// Per-stream decoding statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RsStats {
    pub codewords: usize,
    pub corrected: usize,
    pub failures: usize,
}

/// Decodes whole codewords and strips `pad` trailing bits.
pub fn decode_bits(bits: &BitStream, pad: usize) -> Result<(BitStream, RsStats), CodecError> {
    if bits.len() % CODE_BITS != 0 {
        return Err(CodecError::BadLength {
            len: bits.len(),
            multiple: CODE_BITS,
        });
    }
    let mut out = BitStream::new();
    let mut stats = RsStats::default();
    for block in bits.bits().chunks_exact(CODE_BITS) {
        let mut cw = [0u8; N];
        for (i, sym) in block.chunks_exact(SYMBOL_BITS).enumerate() {
            cw[i] = read_bits(sym) as u8;
        }
        let d = decode(&cw)?;
        stats.codewords += 1;
        stats.corrected += d.corrected_count;
        stats.failures += usize::from(d.status == RsStatus::Failure);
        for s in d.message {
            out.push_bits(u32::from(s), SYMBOL_BITS);
        }
    }
    let keep = out.len().saturating_sub(pad);
    Ok((out.bits()[..keep].iter().copied().collect(), stats))
}

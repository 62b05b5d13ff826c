//! Code parameters, message padding and the codec identifiers.
//!
//! A block is described by the quadruple (n, c, l, r): an n-bit message is
//! encoded into p packets of l payload bits each, totalling at least c·n
//! bits, and is decodable from received payload totalling r·n bits (exactly
//! k packets for the MDS backend, a measured 1+ε multiple for the cascade).
//!
//! Messages are byte sequences; l must be a whole number of bytes. The padded
//! block layout is an 8-byte little-endian length prefix (original length in
//! bytes), the message, then zero fill up to k·l bits. r counts payload bits
//! only; packet headers are not charged against it.

use crate::cascade::CascadeConfig;
use crate::error::{Error, Result};
use crate::ratio::Ratio;
use std::fmt;
use std::str::FromStr;

/// Bits consumed by the length prefix inside the padded block.
pub const LENGTH_PREFIX_BITS: u64 = 64;

/// Which backend a block was encoded with. The discriminants are the wire
/// bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CodecId {
    Mds = 0x00,
    Cascade = 0x01,
}

impl CodecId {
    pub fn from_byte(b: u8) -> Result<CodecId> {
        match b {
            0x00 => Ok(CodecId::Mds),
            0x01 => Ok(CodecId::Cascade),
            other => Err(Error::UnknownCodecId(other)),
        }
    }

    pub fn as_byte(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecId::Mds => write!(f, "mds"),
            CodecId::Cascade => write!(f, "cascade"),
        }
    }
}

impl FromStr for CodecId {
    type Err = Error;

    fn from_str(s: &str) -> Result<CodecId> {
        match s {
            "mds" => Ok(CodecId::Mds),
            "cascade" => Ok(CodecId::Cascade),
            other => Err(Error::BadRatio(format!("unknown codec {other:?}"))),
        }
    }
}

/// Default overhead target reported for cascade blocks. The overhead a given
/// parameter set actually reaches is measured by the bench harness, not
/// promised here.
pub fn cascade_target_overhead() -> Ratio {
    Ratio::new(23, 20).expect("static ratio")
}

/// Validated block parameters with the derived packet counts.
///
/// Construction goes through [`CodeParameters::for_message`] (choose a
/// stretch factor), [`CodeParameters::for_cascade`] (stretch derived from the
/// layer schedule) or [`CodeParameters::from_counts`] (explicit counts, used
/// when reconstructing from packet headers). The stored `c` is always the
/// achieved stretch `p·l / n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParameters {
    n_bits: u64,
    c: Ratio,
    l_bits: u32,
    r: Ratio,
    k: u32,
    p: u32,
    codec_id: CodecId,
    seed: u64,
}

fn validate_common(n_bits: u64, l_bits: u32) -> Result<()> {
    if n_bits == 0 {
        return Err(Error::EmptyMessage);
    }
    if !n_bits.is_multiple_of(8) {
        return Err(Error::MessageNotByteAligned(n_bits));
    }
    if l_bits == 0 || !l_bits.is_multiple_of(8) {
        return Err(Error::InvalidPayloadLength(l_bits));
    }
    Ok(())
}

/// Source packet count: the padded block holds the 64-bit length prefix plus
/// the message, rounded up to whole packets. `l` is an input here and is
/// never derived from `n`.
fn derive_k(n_bits: u64, l_bits: u32) -> Result<u32> {
    let padded = n_bits as u128 + LENGTH_PREFIX_BITS as u128;
    let k = padded.div_ceil(l_bits as u128);
    u32::try_from(k).map_err(|_| Error::CountOverflow)
}

fn achieved_stretch(p: u32, l_bits: u32, n_bits: u64) -> Result<Ratio> {
    let total = (p as u64)
        .checked_mul(l_bits as u64)
        .ok_or(Error::CountOverflow)?;
    Ratio::new(total, n_bits)
}

fn default_overhead(codec_id: CodecId) -> Ratio {
    match codec_id {
        CodecId::Mds => Ratio::ONE,
        CodecId::Cascade => cascade_target_overhead(),
    }
}

impl CodeParameters {
    /// Validates (n, c, l) and derives the packet counts for `codec_id`.
    ///
    /// For MDS, `p = ceil(c·k)`. For the cascade the packet count is fixed by
    /// the default layer schedule; a `c` that does not land on it is rejected
    /// with the nearest achievable stretch in the error.
    pub fn for_message(
        codec_id: CodecId,
        n_bits: u64,
        c: Ratio,
        l_bits: u32,
        seed: u64,
    ) -> Result<CodeParameters> {
        validate_common(n_bits, l_bits)?;
        if c <= Ratio::ONE {
            return Err(Error::StretchTooSmall);
        }
        let k = derive_k(n_bits, l_bits)?;
        let requested_p =
            u32::try_from(c.ceil_mul(k as u64)?).map_err(|_| Error::CountOverflow)?;
        let p = match codec_id {
            CodecId::Mds => {
                if requested_p as usize > 256 {
                    return Err(Error::FieldPointsExhausted {
                        k: k as usize,
                        m: (requested_p - k) as usize,
                    });
                }
                requested_p
            }
            CodecId::Cascade => {
                let cfg = CascadeConfig::default();
                let needed = k + crate::cascade::structural_repair_count(k, &cfg)?;
                if requested_p != needed {
                    return Err(Error::BudgetMismatch {
                        budget: requested_p.saturating_sub(k),
                        needed: needed - k,
                        achievable_c: Ratio::new(needed as u64, k as u64)?,
                    });
                }
                needed
            }
        };
        debug_assert!(p > k);
        Ok(CodeParameters {
            n_bits,
            c: achieved_stretch(p, l_bits, n_bits)?,
            l_bits,
            r: default_overhead(codec_id),
            k,
            p,
            codec_id,
            seed,
        })
    }

    /// Cascade parameters with the packet count derived from the layer
    /// schedule of `cfg`; no stretch factor needs to be supplied.
    pub fn for_cascade(
        n_bits: u64,
        l_bits: u32,
        seed: u64,
        cfg: &CascadeConfig,
    ) -> Result<CodeParameters> {
        validate_common(n_bits, l_bits)?;
        let k = derive_k(n_bits, l_bits)?;
        let p = k + crate::cascade::structural_repair_count(k, cfg)?;
        Ok(CodeParameters {
            n_bits,
            c: achieved_stretch(p, l_bits, n_bits)?,
            l_bits,
            r: cascade_target_overhead(),
            k,
            p,
            codec_id: CodecId::Cascade,
            seed,
        })
    }

    /// Rebuilds parameters from explicit counts, as carried in packet
    /// headers. Accepts any `p >= k`, so repair-free MDS blocks are
    /// constructible at this level.
    pub fn from_counts(
        codec_id: CodecId,
        n_bits: u64,
        k: u32,
        p: u32,
        l_bits: u32,
        seed: u64,
    ) -> Result<CodeParameters> {
        validate_common(n_bits, l_bits)?;
        if k == 0 || p < k {
            return Err(Error::NotEnoughPackets { k, p });
        }
        let capacity = (k as u64)
            .checked_mul(l_bits as u64)
            .ok_or(Error::CountOverflow)?;
        if n_bits + LENGTH_PREFIX_BITS > capacity {
            return Err(Error::MessageTooLong {
                message_bits: n_bits,
                capacity_bits: capacity - LENGTH_PREFIX_BITS,
            });
        }
        if codec_id == CodecId::Mds && p as usize > 256 {
            return Err(Error::FieldPointsExhausted {
                k: k as usize,
                m: (p - k) as usize,
            });
        }
        Ok(CodeParameters {
            n_bits,
            c: achieved_stretch(p, l_bits, n_bits)?,
            l_bits,
            r: default_overhead(codec_id),
            k,
            p,
            codec_id,
            seed,
        })
    }

    pub fn n_bits(&self) -> u64 {
        self.n_bits
    }

    /// Achieved stretch factor `p·l / n`.
    pub fn c(&self) -> Ratio {
        self.c
    }

    pub fn l_bits(&self) -> u32 {
        self.l_bits
    }

    /// Decoding-overhead target (payload bits only).
    pub fn r(&self) -> Ratio {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn codec_id(&self) -> CodecId {
        self.codec_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn repair_count(&self) -> u32 {
        self.p - self.k
    }

    /// Payload bytes per packet.
    pub fn payload_bytes(&self) -> usize {
        (self.l_bits / 8) as usize
    }

    /// Bytes in the padded block (`k·l` bits).
    pub fn padded_bytes(&self) -> usize {
        self.k as usize * self.payload_bytes()
    }

    /// Minimum received payload bits any decoder needs (`k·l`).
    pub fn required_bits(&self) -> u64 {
        self.k as u64 * self.l_bits as u64
    }

    /// Message length in bytes.
    pub fn message_bytes(&self) -> usize {
        (self.n_bits / 8) as usize
    }
}

/// Frames a message into the padded block: 8-byte little-endian byte count,
/// message, zero fill to `k·l` bits.
pub fn pad_message(message: &[u8], params: &CodeParameters) -> Result<Vec<u8>> {
    if message.len() != params.message_bytes() {
        return Err(Error::BlockSizeMismatch {
            expected: params.message_bytes(),
            got: message.len(),
        });
    }
    let padded_len = params.padded_bytes();
    debug_assert!(message.len() + 8 <= padded_len);
    let mut out = Vec::with_capacity(padded_len);
    out.extend_from_slice(&(message.len() as u64).to_le_bytes());
    out.extend_from_slice(message);
    out.resize(padded_len, 0);
    Ok(out)
}

/// Inverse of [`pad_message`]: reads the length prefix and returns the
/// original message bytes.
pub fn unpad_message(padded: &[u8]) -> Result<Vec<u8>> {
    if padded.len() < 8 {
        return Err(Error::Truncated {
            expected: 8,
            got: padded.len(),
        });
    }
    let declared = u64::from_le_bytes(padded[..8].try_into().unwrap());
    if declared == 0 {
        return Err(Error::PaddingEmpty);
    }
    let available = (padded.len() - 8) as u64;
    if declared > available {
        return Err(Error::PaddingOverrun {
            declared,
            available,
        });
    }
    Ok(padded[8..8 + declared as usize].to_vec())
}

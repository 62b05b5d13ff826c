//! The packet wire format.
//!
//! Little-endian throughout. Each packet is self-describing: the header
//! carries everything a decoder needs to rebuild the block parameters, so
//! "any set of packets" is decodable without side channels.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "ERPK"
//!      4     1  version (0x01)
//!      5     1  codec id (0x00 mds, 0x01 cascade)
//!      6     8  block id
//!     14     8  n (message bits)
//!     22     4  k (source packets)
//!     26     4  p (total packets)
//!     30     4  l (payload bits)
//!     34     8  seed
//!     42     4  packet index
//!     46   l/8  payload
//! ```

use crate::error::{Error, Result};
use crate::params::{CodeParameters, CodecId};

pub const MAGIC: [u8; 4] = *b"ERPK";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 46;

/// One l-bit unit of the encoding. Indices `[0, k)` are systematic source
/// packets, `[k, p)` repair packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub block_id: u64,
    pub index: u32,
    pub payload: Vec<u8>,
}

/// Serializes a packet under the given parameters.
///
/// # Panics
///
/// Panics if the payload length does not match `params.payload_bytes()` or
/// the index is out of range; both are upheld by every encoder in this crate.
pub fn serialize_packet(packet: &Packet, params: &CodeParameters) -> Vec<u8> {
    assert_eq!(
        packet.payload.len(),
        params.payload_bytes(),
        "payload length must equal l/8"
    );
    assert!(packet.index < params.p(), "packet index out of range");
    let mut out = Vec::with_capacity(HEADER_LEN + packet.payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(params.codec_id().as_byte());
    out.extend_from_slice(&packet.block_id.to_le_bytes());
    out.extend_from_slice(&params.n_bits().to_le_bytes());
    out.extend_from_slice(&params.k().to_le_bytes());
    out.extend_from_slice(&params.p().to_le_bytes());
    out.extend_from_slice(&params.l_bits().to_le_bytes());
    out.extend_from_slice(&params.seed().to_le_bytes());
    out.extend_from_slice(&packet.index.to_le_bytes());
    out.extend_from_slice(&packet.payload);
    out
}

/// Parses a serialized packet, validating magic, version, codec id, header
/// consistency and exact payload length.
pub fn deserialize_packet(bytes: &[u8]) -> Result<(Packet, CodeParameters)> {
    if bytes.len() < 4 {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            got: bytes.len(),
        });
    }
    if bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let codec_id = CodecId::from_byte(bytes[5])?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            got: bytes.len(),
        });
    }
    let block_id = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    let n_bits = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
    let k = u32::from_le_bytes(bytes[22..26].try_into().unwrap());
    let p = u32::from_le_bytes(bytes[26..30].try_into().unwrap());
    let l_bits = u32::from_le_bytes(bytes[30..34].try_into().unwrap());
    let seed = u64::from_le_bytes(bytes[34..42].try_into().unwrap());
    let index = u32::from_le_bytes(bytes[42..46].try_into().unwrap());

    let params = CodeParameters::from_counts(codec_id, n_bits, k, p, l_bits, seed)?;
    if index >= p {
        return Err(Error::IndexOutOfRange { index, p });
    }
    let expected = HEADER_LEN + params.payload_bytes();
    if bytes.len() != expected {
        return Err(Error::Truncated {
            expected,
            got: bytes.len(),
        });
    }
    let payload = bytes[HEADER_LEN..].to_vec();
    Ok((
        Packet {
            block_id,
            index,
            payload,
        },
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_params() -> CodeParameters {
        CodeParameters::from_counts(CodecId::Mds, 192, 4, 8, 64, 0xDEAD).unwrap()
    }

    #[test]
    fn round_trip() {
        let params = sample_params();
        let pkt = Packet {
            block_id: 0x1122_3344_5566_7788,
            index: 5,
            payload: vec![1, 2, 3, 4, 5, 6, 7, 8],
        };
        let bytes = serialize_packet(&pkt, &params);
        assert_eq!(bytes.len(), HEADER_LEN + 8);
        let (back, back_params) = deserialize_packet(&bytes).unwrap();
        assert_eq!(back, pkt);
        assert_eq!(back_params, params);
    }

    #[test]
    fn zero_packet_layout_is_exact() {
        let params = CodeParameters::from_counts(CodecId::Mds, 64, 2, 4, 64, 0).unwrap();
        let pkt = Packet {
            block_id: 0,
            index: 0,
            payload: vec![0; 8],
        };
        let bytes = serialize_packet(&pkt, &params);
        let mut expected = Vec::new();
        expected.extend_from_slice(b"ERPK");
        expected.push(0x01); // version
        expected.push(0x00); // mds
        expected.extend_from_slice(&[0; 8]); // block id
        expected.extend_from_slice(&64u64.to_le_bytes()); // n
        expected.extend_from_slice(&2u32.to_le_bytes()); // k
        expected.extend_from_slice(&4u32.to_le_bytes()); // p
        expected.extend_from_slice(&64u32.to_le_bytes()); // l
        expected.extend_from_slice(&[0; 8]); // seed
        expected.extend_from_slice(&[0; 4]); // index
        expected.extend_from_slice(&[0; 8]); // payload
        assert_eq!(bytes, expected);
    }

    #[test]
    fn index_changes_only_index_bytes() {
        let params = sample_params();
        let mk = |index| Packet {
            block_id: 9,
            index,
            payload: vec![0xAA; 8],
        };
        let a = serialize_packet(&mk(1), &params);
        let b = serialize_packet(&mk(2), &params);
        for (off, (x, y)) in a.iter().zip(&b).enumerate() {
            if (42..46).contains(&off) {
                continue;
            }
            assert_eq!(x, y, "unexpected difference at offset {off}");
        }
        assert_ne!(a[42..46], b[42..46]);
    }

    #[test]
    fn malformed_inputs_get_distinct_errors() {
        let params = sample_params();
        let pkt = Packet {
            block_id: 1,
            index: 0,
            payload: vec![0; 8],
        };
        let good = serialize_packet(&pkt, &params);

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(deserialize_packet(&bad_magic), Err(Error::BadMagic)));

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(matches!(
            deserialize_packet(&bad_version),
            Err(Error::UnsupportedVersion(9))
        ));

        let mut bad_codec = good.clone();
        bad_codec[5] = 7;
        assert!(matches!(
            deserialize_packet(&bad_codec),
            Err(Error::UnknownCodecId(7))
        ));

        let truncated = &good[..good.len() - 1];
        assert!(matches!(
            deserialize_packet(truncated),
            Err(Error::Truncated { .. })
        ));

        let mut extended = good.clone();
        extended.push(0);
        assert!(matches!(
            deserialize_packet(&extended),
            Err(Error::Truncated { .. })
        ));

        let mut bad_index = good;
        bad_index[42..46].copy_from_slice(&100u32.to_le_bytes());
        assert!(matches!(
            deserialize_packet(&bad_index),
            Err(Error::IndexOutOfRange { index: 100, p: 8 })
        ));

        assert!(matches!(
            deserialize_packet(&[1, 2]),
            Err(Error::Truncated { .. })
        ));
    }
}

//! Erasure-resilient packet coding.
//!
//! An n-bit message becomes p packets of l payload bits (total at least c·n
//! bits); the message is recoverable from received packets totalling r·n
//! payload bits. Two backends implement the contract:
//!
//! * [`mds`]: systematic Cauchy Reed-Solomon over GF(2^8). Exact: any k of
//!   the p packets recover the block (r = 1 in packet terms), at O(k^3)
//!   decode cost and at most 256 packets per block.
//! * [`cascade`]: a layered sparse XOR code with a peeling decoder and an
//!   MDS-protected tail. Linear-time encode and decode; needs a measured
//!   1+ε overhead and can stall near the information bound.
//!
//! [`channel`] supplies seeded loss models for experiments and [`bench`]
//! measures throughput scaling and overhead curves. Everything randomized is
//! a pure function of explicit 64-bit seeds (see [`rng`]).
//!
//! ```
//! use erpk_core::{CodeParameters, CodecId, Ratio, encode_message, decode_message, DecodeOutcome};
//!
//! let msg = b"hello erasure world";
//! let params = CodeParameters::for_message(
//!     CodecId::Mds,
//!     msg.len() as u64 * 8,
//!     Ratio::new(2, 1).unwrap(),
//!     64,
//!     42,
//! ).unwrap();
//! let packets = encode_message(msg, &params, 1).unwrap();
//! // any k packets decode; drop everything but the last k
//! let k = params.k() as usize;
//! let tail = &packets[packets.len() - k..];
//! match decode_message(tail, &params).unwrap() {
//!     DecodeOutcome::Success(out) => assert_eq!(out, msg),
//!     other => panic!("{other:?}"),
//! }
//! ```

pub mod bench;
pub mod cascade;
pub mod channel;
pub mod codec;
pub mod error;
pub mod field;
pub mod mds;
pub mod packet;
pub mod params;
pub mod ratio;
pub mod rng;

pub use codec::{
    codec_for, decode_message, encode_message, BlockDecode, CascadeCodec, Codec, DecodeOutcome,
    MdsCodec,
};
pub use error::{Error, Result};
pub use packet::{deserialize_packet, serialize_packet, Packet};
pub use params::{pad_message, unpad_message, CodeParameters, CodecId};
pub use ratio::Ratio;

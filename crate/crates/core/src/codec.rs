//! The codec contract shared by both backends, plus message-level framing.
//!
//! `encode` pads the message and hands the block to a backend; `decode`
//! validates the received set, runs the backend and strips the padding.
//! Every backend satisfies `decode(encode(m)) = Success(m)` under full
//! reception.

use crate::cascade::{self, CascadeConfig};
use crate::error::{Error, Result};
use crate::mds;
use crate::packet::Packet;
use crate::params::{pad_message, unpad_message, CodeParameters, CodecId};

/// Result of a decode attempt at the message level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// The original message, padding removed.
    Success(Vec<u8>),
    /// Not enough payload received to possibly decode.
    Insufficient {
        received_bits: u64,
        required_bits: u64,
    },
    /// Enough payload arrived but the peeling decoder could not finish.
    Stalled { unresolved_sources: usize },
}

/// Backend-level outcome over the padded block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockDecode {
    Recovered(Vec<u8>),
    Insufficient {
        received_bits: u64,
        required_bits: u64,
    },
    Stalled {
        unresolved_sources: usize,
    },
}

/// A backend: packets out of a message, message out of packets.
pub trait Codec {
    fn encode(
        &self,
        message: &[u8],
        params: &CodeParameters,
        block_id: u64,
    ) -> Result<Vec<Packet>>;

    fn decode(&self, packets: &[Packet], params: &CodeParameters) -> Result<DecodeOutcome>;
}

/// The exact any-k backend.
pub struct MdsCodec;

/// The linear-time sparse-graph backend.
#[derive(Default)]
pub struct CascadeCodec {
    pub config: CascadeConfig,
}

impl Codec for MdsCodec {
    fn encode(
        &self,
        message: &[u8],
        params: &CodeParameters,
        block_id: u64,
    ) -> Result<Vec<Packet>> {
        let padded = pad_message(message, params)?;
        mds::encode_block(&padded, params, block_id)
    }

    fn decode(&self, packets: &[Packet], params: &CodeParameters) -> Result<DecodeOutcome> {
        finish(mds::decode_block(packets, params)?, params)
    }
}

impl Codec for CascadeCodec {
    fn encode(
        &self,
        message: &[u8],
        params: &CodeParameters,
        block_id: u64,
    ) -> Result<Vec<Packet>> {
        let padded = pad_message(message, params)?;
        let graph = cascade::build_cascade_graph(params, &self.config)?;
        cascade::encode_block(&padded, params, &graph, block_id)
    }

    fn decode(&self, packets: &[Packet], params: &CodeParameters) -> Result<DecodeOutcome> {
        let graph = cascade::build_cascade_graph(params, &self.config)?;
        finish(cascade::decode_block(packets, params, &graph)?, params)
    }
}

/// Backend for the codec named in `params`, with default cascade settings.
pub fn codec_for(id: CodecId) -> Box<dyn Codec> {
    match id {
        CodecId::Mds => Box::new(MdsCodec),
        CodecId::Cascade => Box::new(CascadeCodec::default()),
    }
}

/// Convenience dispatch: pad and encode with the parameter-selected backend.
pub fn encode_message(
    message: &[u8],
    params: &CodeParameters,
    block_id: u64,
) -> Result<Vec<Packet>> {
    codec_for(params.codec_id()).encode(message, params, block_id)
}

/// Convenience dispatch: decode and unpad with the parameter-selected
/// backend.
pub fn decode_message(packets: &[Packet], params: &CodeParameters) -> Result<DecodeOutcome> {
    codec_for(params.codec_id()).decode(packets, params)
}

fn finish(block: BlockDecode, params: &CodeParameters) -> Result<DecodeOutcome> {
    Ok(match block {
        BlockDecode::Recovered(padded) => {
            let message = unpad_message(&padded)?;
            if message.len() != params.message_bytes() {
                return Err(Error::BlockSizeMismatch {
                    expected: params.message_bytes(),
                    got: message.len(),
                });
            }
            DecodeOutcome::Success(message)
        }
        BlockDecode::Insufficient {
            received_bits,
            required_bits,
        } => DecodeOutcome::Insufficient {
            received_bits,
            required_bits,
        },
        BlockDecode::Stalled {
            unresolved_sources,
        } => DecodeOutcome::Stalled {
            unresolved_sources,
        },
    })
}

/// Shared input validation for the block decoders: indices in range and
/// unique, payload lengths exact, all packets from one block.
pub(crate) fn validate_received(packets: &[Packet], params: &CodeParameters) -> Result<()> {
    let mut seen = vec![false; params.p() as usize];
    let mut block_id = None;
    for pkt in packets {
        if pkt.index >= params.p() {
            return Err(Error::IndexOutOfRange {
                index: pkt.index,
                p: params.p(),
            });
        }
        if seen[pkt.index as usize] {
            return Err(Error::DuplicateIndex(pkt.index));
        }
        seen[pkt.index as usize] = true;
        if pkt.payload.len() != params.payload_bytes() {
            return Err(Error::BlockSizeMismatch {
                expected: params.payload_bytes(),
                got: pkt.payload.len(),
            });
        }
        match block_id {
            None => block_id = Some(pkt.block_id),
            Some(b) if b != pkt.block_id => {
                return Err(Error::MixedBlocks(b, pkt.block_id));
            }
            _ => {}
        }
    }
    Ok(())
}

//! Seeded erasure-channel models.
//!
//! `apply_loss` decides which packets survive. The outcome is a pure
//! function of (model, seed, input): the generator is ChaCha8 seeded
//! directly with the given seed, and draws are consumed in packet order.
//! Survivors keep their original order.

use crate::error::{Error, Result};
use crate::packet::Packet;
use crate::ratio::Ratio;
use crate::rng;

/// Which packets get erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LossModel {
    /// Each packet is lost independently with the given probability.
    Iid { loss: Ratio },
    /// Two-state Gilbert-Elliott chain. The chain starts in the good state;
    /// packets are only lost in the bad state (with probability
    /// `loss_in_bad`), and the state transition is applied after each
    /// packet.
    Burst {
        good_to_bad: Ratio,
        bad_to_good: Ratio,
        loss_in_bad: Ratio,
    },
    /// Exactly `deliver` survivors, chosen uniformly.
    FixedCount { deliver: usize },
}

fn check_probability(r: Ratio) -> Result<()> {
    if r > Ratio::ONE {
        return Err(Error::InvalidProbability(r));
    }
    Ok(())
}

impl LossModel {
    pub fn validate(&self, packet_count: usize) -> Result<()> {
        match self {
            LossModel::Iid { loss } => check_probability(*loss),
            LossModel::Burst {
                good_to_bad,
                bad_to_good,
                loss_in_bad,
            } => {
                check_probability(*good_to_bad)?;
                check_probability(*bad_to_good)?;
                check_probability(*loss_in_bad)
            }
            LossModel::FixedCount { deliver } => {
                if *deliver > packet_count {
                    return Err(Error::DeliverTooLarge {
                        requested: *deliver,
                        available: packet_count,
                    });
                }
                Ok(())
            }
        }
    }
}

/// Applies the loss model and returns the surviving packets in their
/// original order.
pub fn apply_loss(packets: &[Packet], model: &LossModel, seed: u64) -> Result<Vec<Packet>> {
    let positions = surviving_positions(packets.len(), model, seed)?;
    Ok(positions.into_iter().map(|i| packets[i].clone()).collect())
}

/// Positions (into the input slice) of the survivors, ascending.
pub fn surviving_positions(
    count: usize,
    model: &LossModel,
    seed: u64,
) -> Result<Vec<usize>> {
    model.validate(count)?;
    let mut r = rng::single(seed);
    let survivors = match model {
        LossModel::Iid { loss } => (0..count)
            .filter(|_| !rng::chance(&mut r, loss.numer(), loss.denom()))
            .collect(),
        LossModel::Burst {
            good_to_bad,
            bad_to_good,
            loss_in_bad,
        } => {
            let mut bad = false;
            let mut out = Vec::with_capacity(count);
            for i in 0..count {
                let lost =
                    bad && rng::chance(&mut r, loss_in_bad.numer(), loss_in_bad.denom());
                if !lost {
                    out.push(i);
                }
                bad = if bad {
                    !rng::chance(&mut r, bad_to_good.numer(), bad_to_good.denom())
                } else {
                    rng::chance(&mut r, good_to_bad.numer(), good_to_bad.denom())
                };
            }
            out
        }
        LossModel::FixedCount { deliver } => rng::subset(&mut r, count, *deliver)
            .into_iter()
            .map(|v| v as usize)
            .collect(),
    };
    Ok(survivors)
}

//! Throughput and overhead measurement.
//!
//! `run_throughput` sweeps message sizes at a fixed packet length and times
//! encode/decode; `check_linearity` turns consecutive timing ratios into a
//! pass/fail verdict for the linear-time claim. `run_overhead_curve` maps
//! received fraction to decode success rate. Random choices (messages,
//! survivor subsets) are reproducible from the master seed; wall-clock times
//! are machine-dependent.

use crate::cascade::CascadeConfig;
use crate::channel::{surviving_positions, LossModel};
use crate::codec::{decode_message, encode_message, DecodeOutcome};
use crate::error::{Error, Result};
use crate::packet::Packet;
use crate::params::{CodeParameters, CodecId};
use crate::ratio::Ratio;
use crate::rng;
use rand_chacha::rand_core::RngCore;
use std::io::Write;
use std::time::Instant;

/// Timing results for one message size. Rates are message megabytes per
/// second of wall time.
#[derive(Debug, Clone)]
pub struct ThroughputRecord {
    pub codec: CodecId,
    pub n_bits: u64,
    pub l_bits: u32,
    pub trials: usize,
    pub encode_s: f64,
    pub decode_s: f64,
    pub encode_mbps: f64,
    pub decode_mbps: f64,
}

impl ThroughputRecord {
    fn new(
        codec: CodecId,
        n_bits: u64,
        l_bits: u32,
        trials: usize,
        encode_s: f64,
        decode_s: f64,
    ) -> ThroughputRecord {
        let mb = n_bits as f64 / 8.0 / 1e6;
        ThroughputRecord {
            codec,
            n_bits,
            l_bits,
            trials,
            encode_s,
            decode_s,
            encode_mbps: mb / encode_s,
            decode_mbps: mb / decode_s,
        }
    }
}

/// Success statistics for one received fraction.
#[derive(Debug, Clone)]
pub struct OverheadRecord {
    pub codec: CodecId,
    pub k: u32,
    pub p: u32,
    pub l_bits: u32,
    pub fraction: Ratio,
    pub trials: usize,
    pub successes: usize,
}

impl OverheadRecord {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Verdict of the scaling-ratio test.
#[derive(Debug, Clone)]
pub struct LinearityReport {
    pub encode_ratios: Vec<f64>,
    pub decode_ratios: Vec<f64>,
    pub max_ratio: f64,
    pub pass: bool,
}

impl std::fmt::Display for LinearityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_ratios = |rs: &[f64]| {
            rs.iter()
                .map(|r| format!("{r:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "linearity {}: encode ratios [{}], decode ratios [{}], limit {:.2}",
            if self.pass { "PASS" } else { "FAIL" },
            fmt_ratios(&self.encode_ratios),
            fmt_ratios(&self.decode_ratios),
            self.max_ratio
        )
    }
}

/// Median wall time of one call, with repetition to lift short calls above
/// timer noise.
fn measure_seconds<F: FnMut()>(mut f: F) -> f64 {
    const TARGET: f64 = 0.04;
    f(); // warmup
    let mut reps: u64 = 1;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            f();
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= TARGET || reps >= 1 << 20 {
            return elapsed / reps as f64;
        }
        let grow = (1.2 * TARGET / elapsed.max(1e-9)).ceil() as u64;
        reps = reps.saturating_mul(grow.max(2)).min(1 << 20);
    }
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("no NaN timings"));
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

fn params_for(codec: CodecId, n_bits: u64, l_bits: u32, seed: u64) -> Result<CodeParameters> {
    match codec {
        CodecId::Mds => CodeParameters::for_message(
            codec,
            n_bits,
            Ratio::new(2, 1).expect("static ratio"),
            l_bits,
            seed,
        ),
        CodecId::Cascade => {
            CodeParameters::for_cascade(n_bits, l_bits, seed, &CascadeConfig::default())
        }
    }
}

/// Picks a decodable survivor subset at roughly 70% reception; seeds advance
/// until decode succeeds, so timing always measures a full successful
/// decode.
fn decodable_subset(
    packets: &[Packet],
    params: &CodeParameters,
    seed: u64,
) -> Result<Vec<Packet>> {
    let deliver = (packets.len() * 7 + 5) / 10;
    let model = LossModel::FixedCount { deliver };
    for attempt in 0..32u64 {
        let positions = surviving_positions(packets.len(), &model, seed.wrapping_add(attempt))?;
        let subset: Vec<Packet> = positions.iter().map(|&i| packets[i].clone()).collect();
        if matches!(
            decode_message(&subset, params)?,
            DecodeOutcome::Success(_)
        ) {
            return Ok(subset);
        }
    }
    Err(Error::NoDecodableSubset(32))
}

/// Times encode and decode per size. `l_bits` is held fixed across the whole
/// sweep; sizes must be strictly increasing. Times are medians over `trials`
/// runs on seeded random messages.
///
/// Decode timing cycles through a small pool of survivor subsets so that one
/// unluckily easy or hard subset cannot skew a size, and trials are
/// interleaved across sizes so slow machine drift cancels out of the
/// ratios.
pub fn run_throughput(
    codec: CodecId,
    sizes: &[u64],
    l_bits: u32,
    trials: usize,
    seed: u64,
) -> Result<Vec<ThroughputRecord>> {
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::SizesNotIncreasing);
    }
    let trials = trials.max(1);
    const SUBSET_POOL: usize = 4;

    struct SizeRun {
        params: CodeParameters,
        message: Vec<u8>,
        subsets: Vec<Vec<Packet>>,
        encode_times: Vec<f64>,
        decode_times: Vec<f64>,
    }

    let mut runs = Vec::with_capacity(sizes.len());
    for (si, &n_bits) in sizes.iter().enumerate() {
        let params = params_for(codec, n_bits, l_bits, seed)?;
        let message = rng::message_bytes(
            seed ^ (si as u64).wrapping_mul(0x9E37),
            params.message_bytes(),
        );
        let packets = encode_message(&message, &params, seed)?;
        let subsets = (0..SUBSET_POOL)
            .map(|j| {
                decodable_subset(&packets, &params, seed ^ (((si * 64 + j) as u64 + 1) * 101))
            })
            .collect::<Result<Vec<_>>>()?;
        runs.push(SizeRun {
            params,
            message,
            subsets,
            encode_times: Vec::with_capacity(trials),
            decode_times: Vec::with_capacity(trials),
        });
    }

    for _ in 0..trials {
        for run in runs.iter_mut() {
            let params = &run.params;
            let message = &run.message;
            run.encode_times.push(measure_seconds(|| {
                let out = encode_message(message, params, seed).expect("encode");
                std::hint::black_box(&out);
            }));
            let subsets = &run.subsets;
            let mut next = 0usize;
            run.decode_times.push(measure_seconds(|| {
                let out = decode_message(&subsets[next], params).expect("decode");
                std::hint::black_box(&out);
                next = (next + 1) % subsets.len();
            }));
        }
    }

    Ok(runs
        .into_iter()
        .zip(sizes)
        .map(|(run, &n_bits)| {
            ThroughputRecord::new(
                codec,
                n_bits,
                l_bits,
                trials,
                median(run.encode_times),
                median(run.decode_times),
            )
        })
        .collect())
}

/// Passes when every consecutive time ratio (encode and decode separately)
/// stays at or below `max_ratio` for size-doubling sweeps.
pub fn check_linearity(records: &[ThroughputRecord], max_ratio: Ratio) -> Result<LinearityReport> {
    if records.len() < 2 {
        return Err(Error::NotEnoughRecords(records.len()));
    }
    let limit = max_ratio.to_f64();
    let ratios = |pick: fn(&ThroughputRecord) -> f64| -> Vec<f64> {
        records
            .windows(2)
            .map(|w| pick(&w[1]) / pick(&w[0]))
            .collect()
    };
    let encode_ratios = ratios(|r| r.encode_s);
    let decode_ratios = ratios(|r| r.decode_s);
    let pass = encode_ratios
        .iter()
        .chain(&decode_ratios)
        .all(|&r| r <= limit);
    Ok(LinearityReport {
        encode_ratios,
        decode_ratios,
        max_ratio: limit,
        pass,
    })
}

/// Decode success rate per received fraction. Each trial draws a fresh
/// uniformly random fixed-size subset with a derived seed.
pub fn run_overhead_curve(
    params: &CodeParameters,
    fractions: &[Ratio],
    trials: usize,
    seed: u64,
) -> Result<Vec<OverheadRecord>> {
    let trials = trials.max(1);
    let message = rng::message_bytes(seed, params.message_bytes());
    let packets = encode_message(&message, params, seed)?;
    let p = params.p() as usize;

    let mut seed_stream = rng::stream(seed, 0x4F56_4552);
    let mut records = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        if fraction.is_zero() || fraction > Ratio::ONE {
            return Err(Error::InvalidProbability(fraction));
        }
        let deliver = fraction.round_mul(p as u64)? as usize;
        let deliver = deliver.min(p);
        let mut successes = 0usize;
        for _ in 0..trials {
            let sub_seed = seed_stream.next_u64();
            let positions =
                surviving_positions(p, &LossModel::FixedCount { deliver }, sub_seed)?;
            let subset: Vec<Packet> =
                positions.iter().map(|&i| packets[i].clone()).collect();
            if let DecodeOutcome::Success(out) = decode_message(&subset, params)? {
                debug_assert_eq!(out, message);
                successes += 1;
            }
        }
        records.push(OverheadRecord {
            codec: params.codec_id(),
            k: params.k(),
            p: params.p(),
            l_bits: params.l_bits(),
            fraction,
            trials,
            successes,
        });
    }
    Ok(records)
}

/// CSV schema: `codec,n_bits,l_bits,trials,encode_s,decode_s,encode_MBps,decode_MBps`.
pub fn write_throughput_csv<W: Write>(w: &mut W, records: &[ThroughputRecord]) -> Result<()> {
    writeln!(
        w,
        "codec,n_bits,l_bits,trials,encode_s,decode_s,encode_MBps,decode_MBps"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{:.9},{:.9},{:.3},{:.3}",
            r.codec, r.n_bits, r.l_bits, r.trials, r.encode_s, r.decode_s, r.encode_mbps,
            r.decode_mbps
        )?;
    }
    Ok(())
}

/// CSV schema: `codec,k,p,l_bits,fraction,trials,successes,success_rate`.
pub fn write_overhead_csv<W: Write>(w: &mut W, records: &[OverheadRecord]) -> Result<()> {
    writeln!(w, "codec,k,p,l_bits,fraction,trials,successes,success_rate")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{:.6},{},{},{:.4}",
            r.codec,
            r.k,
            r.p,
            r.l_bits,
            r.fraction.to_f64(),
            r.trials,
            r.successes,
            r.success_rate()
        )?;
    }
    Ok(())
}

//! `erpk`: encode files into loss-tolerant packet sets, simulate packet
//! loss, decode, and benchmark the codecs.
//!
//! Exit codes are a stable contract: 0 success, 2 usage or parameter errors,
//! 3 I/O failures, 4 malformed input files, 5 decode failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use erpk_core::bench::{
    check_linearity, run_overhead_curve, run_throughput, write_overhead_csv,
    write_throughput_csv,
};
use erpk_core::cascade::CascadeConfig;
use erpk_core::channel::{surviving_positions, LossModel};
use erpk_core::{
    decode_message, deserialize_packet, encode_message, serialize_packet, CodeParameters,
    CodecId, DecodeOutcome, Error, Packet, Ratio,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "erpk",
    version,
    about = "Erasure-resilient packet coding: encode, drop, decode, bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file into a directory of packet files plus a manifest
    Encode(EncodeArgs),
    /// Delete (or list) packets in a directory according to a loss model
    Drop(DropArgs),
    /// Reconstruct the original file from the packets in a directory
    Decode(DecodeArgs),
    /// Run a benchmark suite and write a CSV report
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecArg {
    Mds,
    Cascade,
}

impl From<CodecArg> for CodecId {
    fn from(c: CodecArg) -> CodecId {
        match c {
            CodecArg::Mds => CodecId::Mds,
            CodecArg::Cascade => CodecId::Cascade,
        }
    }
}

#[derive(Args)]
struct EncodeArgs {
    /// File to encode (one block per file)
    input: PathBuf,
    /// Directory for packet files and the manifest
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = CodecArg::Mds)]
    codec: CodecArg,
    /// Stretch factor, e.g. 2 or 3/2. For cascade the layer schedule fixes
    /// the stretch; omit this or pass the exact achievable value.
    #[arg(long)]
    c: Option<Ratio>,
    /// Packet payload length in bits (multiple of 8)
    #[arg(long, default_value_t = 512)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Iid,
    Burst,
    Fixed,
}

#[derive(Args)]
struct DropArgs {
    /// Directory of packet files
    dir: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// iid: per-packet loss probability
    #[arg(long)]
    loss: Option<Ratio>,
    /// burst: good-to-bad transition probability
    #[arg(long)]
    good_to_bad: Option<Ratio>,
    /// burst: bad-to-good transition probability
    #[arg(long)]
    bad_to_good: Option<Ratio>,
    /// burst: loss probability while in the bad state
    #[arg(long)]
    loss_bad: Option<Ratio>,
    /// fixed: deliver exactly this many packets
    #[arg(long)]
    deliver: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only print what would be removed
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// Directory of packet files
    dir: PathBuf,
    /// Output path for the reconstructed file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Time encode/decode across increasing sizes at fixed packet length
    Throughput(ThroughputArgs),
    /// Measure decode success rate against received fraction
    Overhead(OverheadArgs),
}

#[derive(Args)]
struct ThroughputArgs {
    #[arg(long, value_enum)]
    codec: CodecArg,
    /// Comma-separated message sizes in bits, strictly increasing
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    #[arg(long, default_value_t = 512)]
    l: u32,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
    /// Doubling-ratio limit for the linearity verdict
    #[arg(long, default_value = "5/2")]
    max_ratio: Ratio,
}

#[derive(Args)]
struct OverheadArgs {
    #[arg(long, value_enum)]
    codec: CodecArg,
    /// Message size in bits
    #[arg(long, default_value_t = 524224)]
    n_bits: u64,
    #[arg(long, default_value_t = 512)]
    l: u32,
    /// Comma-separated received fractions in (0,1], e.g. 0.5,0.55,0.6
    #[arg(long, value_delimiter = ',')]
    fractions: Vec<Ratio>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
}

/// Block manifest written next to the packet files.
#[derive(Serialize, Deserialize)]
struct Manifest {
    block_id: u64,
    original_filename: String,
    n_bits: u64,
    codec: String,
    c: String,
    l_bits: u32,
    k: u32,
    p: u32,
    seed: u64,
    packet_pattern: String,
}

impl Manifest {
    fn for_block(params: &CodeParameters, block_id: u64, original: &Path) -> Manifest {
        Manifest {
            block_id,
            original_filename: original
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            n_bits: params.n_bits(),
            codec: params.codec_id().to_string(),
            c: params.c().to_string(),
            l_bits: params.l_bits(),
            k: params.k(),
            p: params.p(),
            seed: params.seed(),
            packet_pattern: "pkt_{index:05}.erpk".to_string(),
        }
    }

    fn matches(&self, params: &CodeParameters, block_id: u64) -> bool {
        self.block_id == block_id
            && self.n_bits == params.n_bits()
            && self.codec == params.codec_id().to_string()
            && self.l_bits == params.l_bits()
            && self.k == params.k()
            && self.p == params.p()
            && self.seed == params.seed()
    }
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn new(code: u8, message: impl Into<String>) -> Fail {
        Fail {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(err: Error) -> Fail {
        let code = match &err {
            Error::Io(_) => 3,
            Error::BadMagic
            | Error::UnsupportedVersion(_)
            | Error::UnknownCodecId(_)
            | Error::Truncated { .. }
            | Error::DuplicateIndex(_)
            | Error::IndexOutOfRange { .. }
            | Error::MixedBlocks(..)
            | Error::PaddingOverrun { .. }
            | Error::PaddingEmpty
            | Error::BlockSizeMismatch { .. }
            | Error::ZeroInverse
            | Error::SingularSubmatrix => 4,
            _ => 2,
        };
        Fail::new(code, err.to_string())
    }
}

fn io_fail(context: &str, err: std::io::Error) -> Fail {
    Fail::new(3, format!("{context}: {err}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Drop(args) => cmd_drop(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}

fn packet_file_name(index: u32) -> String {
    format!("pkt_{index:05}.erpk")
}

fn cmd_encode(args: EncodeArgs) -> Result<(), Fail> {
    let data = fs::read(&args.input)
        .map_err(|e| io_fail(&format!("reading {}", args.input.display()), e))?;
    let n_bits = data.len() as u64 * 8;
    let codec: CodecId = args.codec.into();
    let params = match (codec, args.c) {
        (CodecId::Cascade, None) => {
            CodeParameters::for_cascade(n_bits, args.l, args.seed, &CascadeConfig::default())?
        }
        (_, Some(c)) => CodeParameters::for_message(codec, n_bits, c, args.l, args.seed)?,
        (CodecId::Mds, None) => CodeParameters::for_message(
            codec,
            n_bits,
            Ratio::new(2, 1).expect("static ratio"),
            args.l,
            args.seed,
        )?,
    };
    let block_id = args.seed;
    let packets = encode_message(&data, &params, block_id)?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| io_fail(&format!("creating {}", args.out_dir.display()), e))?;
    for packet in &packets {
        let path = args.out_dir.join(packet_file_name(packet.index));
        fs::write(&path, serialize_packet(packet, &params))
            .map_err(|e| io_fail(&format!("writing {}", path.display()), e))?;
    }
    let manifest = Manifest::for_block(&params, block_id, &args.input);
    let manifest_path = args.out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json)
        .map_err(|e| io_fail(&format!("writing {}", manifest_path.display()), e))?;

    println!(
        "encoded {} bits into {} packets (k={}, l={} bits, codec={}, stretch {}) in {}",
        params.n_bits(),
        params.p(),
        params.k(),
        params.l_bits(),
        params.codec_id(),
        params.c(),
        args.out_dir.display()
    );
    Ok(())
}

/// Loads every `*.erpk` file in a directory, sorted by packet index.
fn load_packet_dir(dir: &Path) -> Result<Vec<(PathBuf, Packet, CodeParameters)>, Fail> {
    let entries = fs::read_dir(dir).map_err(|e| io_fail(&format!("reading {}", dir.display()), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "erpk"))
        .collect();
    paths.sort();

    let mut packets = Vec::with_capacity(paths.len());
    for path in paths {
        let bytes =
            fs::read(&path).map_err(|e| io_fail(&format!("reading {}", path.display()), e))?;
        let (packet, params) = deserialize_packet(&bytes)
            .map_err(|e| Fail::new(4, format!("{}: {e}", path.display())))?;
        packets.push((path, packet, params));
    }
    packets.sort_by_key(|(_, pkt, _)| pkt.index);
    Ok(packets)
}

fn build_model(args: &DropArgs) -> Result<LossModel, Fail> {
    let need = |opt: Option<Ratio>, flag: &str| {
        opt.ok_or_else(|| Fail::new(2, format!("--{flag} is required for this model")))
    };
    Ok(match args.model {
        ModelArg::Iid => LossModel::Iid {
            loss: need(args.loss, "loss")?,
        },
        ModelArg::Burst => LossModel::Burst {
            good_to_bad: need(args.good_to_bad, "good-to-bad")?,
            bad_to_good: need(args.bad_to_good, "bad-to-good")?,
            loss_in_bad: need(args.loss_bad, "loss-bad")?,
        },
        ModelArg::Fixed => LossModel::FixedCount {
            deliver: args
                .deliver
                .ok_or_else(|| Fail::new(2, "--deliver is required for this model"))?,
        },
    })
}

#[derive(Serialize)]
struct DropReport {
    model: String,
    seed: u64,
    removed_indices: Vec<u32>,
    surviving_indices: Vec<u32>,
}

fn cmd_drop(args: DropArgs) -> Result<(), Fail> {
    let packets = load_packet_dir(&args.dir)?;
    let model = build_model(&args)?;
    let keep = surviving_positions(packets.len(), &model, args.seed)?;
    let keep_set: Vec<bool> = {
        let mut v = vec![false; packets.len()];
        for &i in &keep {
            v[i] = true;
        }
        v
    };

    let mut removed_indices = Vec::new();
    let mut surviving_indices = Vec::new();
    for (pos, (path, packet, _)) in packets.iter().enumerate() {
        if keep_set[pos] {
            surviving_indices.push(packet.index);
            continue;
        }
        removed_indices.push(packet.index);
        if args.list {
            println!("would remove {}", path.display());
        } else {
            fs::remove_file(path)
                .map_err(|e| io_fail(&format!("removing {}", path.display()), e))?;
        }
    }

    if !args.list {
        let report = DropReport {
            model: format!("{model:?}"),
            seed: args.seed,
            removed_indices: removed_indices.clone(),
            surviving_indices: surviving_indices.clone(),
        };
        let path = args.dir.join("drop_report.json");
        fs::write(
            &path,
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )
        .map_err(|e| io_fail(&format!("writing {}", path.display()), e))?;
    }
    println!(
        "{} {} of {} packets ({} survive)",
        if args.list { "would remove" } else { "removed" },
        removed_indices.len(),
        packets.len(),
        surviving_indices.len()
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), Fail> {
    let loaded = load_packet_dir(&args.dir)?;
    if loaded.is_empty() {
        return Err(Fail::new(5, "no packets found: received 0 bits"));
    }
    let params = loaded[0].2.clone();
    let block_id = loaded[0].1.block_id;
    for (path, packet, pkt_params) in &loaded {
        if packet.block_id != block_id {
            return Err(Fail::new(
                4,
                format!(
                    "mixed blocks: {} belongs to block {:#018x}, expected {:#018x}",
                    path.display(),
                    packet.block_id,
                    block_id
                ),
            ));
        }
        if *pkt_params != params {
            return Err(Fail::new(
                4,
                format!("{}: header disagrees with the rest of the set", path.display()),
            ));
        }
    }

    let manifest_path = args.dir.join("manifest.json");
    match fs::read_to_string(&manifest_path) {
        Ok(text) => {
            let manifest: Manifest = serde_json::from_str(&text)
                .map_err(|e| Fail::new(4, format!("{}: {e}", manifest_path.display())))?;
            if !manifest.matches(&params, block_id) {
                return Err(Fail::new(
                    4,
                    format!(
                        "{}: manifest disagrees with packet headers",
                        manifest_path.display()
                    ),
                ));
            }
        }
        Err(_) => {
            eprintln!("warning: no manifest found; trusting packet headers");
        }
    }

    let packets: Vec<Packet> = loaded.into_iter().map(|(_, pkt, _)| pkt).collect();
    match decode_message(&packets, &params)? {
        DecodeOutcome::Success(message) => {
            fs::write(&args.out, &message)
                .map_err(|e| io_fail(&format!("writing {}", args.out.display()), e))?;
            println!(
                "decoded {} bytes from {} packets into {}",
                message.len(),
                packets.len(),
                args.out.display()
            );
            Ok(())
        }
        DecodeOutcome::Insufficient {
            received_bits,
            required_bits,
        } => Err(Fail::new(
            5,
            format!(
                "insufficient data: received {received_bits} payload bits, need {required_bits}"
            ),
        )),
        DecodeOutcome::Stalled {
            unresolved_sources,
        } => Err(Fail::new(
            5,
            format!("peeling stalled with {unresolved_sources} unresolved source packets"),
        )),
    }
}

fn cmd_bench(cmd: BenchCommand) -> Result<(), Fail> {
    match cmd {
        BenchCommand::Throughput(args) => {
            let records =
                run_throughput(args.codec.into(), &args.sizes, args.l, args.trials, args.seed)?;
            let mut out = Vec::new();
            write_throughput_csv(&mut out, &records)?;
            fs::write(&args.out, out)
                .map_err(|e| io_fail(&format!("writing {}", args.out.display()), e))?;
            let report = check_linearity(&records, args.max_ratio)?;
            eprintln!("{report}");
            println!("wrote {} rows to {}", records.len(), args.out.display());
            Ok(())
        }
        BenchCommand::Overhead(args) => {
            let codec: CodecId = args.codec.into();
            let params = match codec {
                CodecId::Mds => CodeParameters::for_message(
                    codec,
                    args.n_bits,
                    Ratio::new(2, 1).expect("static ratio"),
                    args.l,
                    args.seed,
                )?,
                CodecId::Cascade => CodeParameters::for_cascade(
                    args.n_bits,
                    args.l,
                    args.seed,
                    &CascadeConfig::default(),
                )?,
            };
            let records = run_overhead_curve(&params, &args.fractions, args.trials, args.seed)?;
            let mut out = Vec::new();
            write_overhead_csv(&mut out, &records)?;
            fs::write(&args.out, out)
                .map_err(|e| io_fail(&format!("writing {}", args.out.display()), e))?;
            println!("wrote {} rows to {}", records.len(), args.out.display());
            Ok(())
        }
    }
}

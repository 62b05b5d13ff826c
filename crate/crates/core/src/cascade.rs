//! The linear-time backend: a layered sparse bipartite XOR code with a
//! peeling decoder.
//!
//! Layer 0 holds the k source symbols. Layer i+1 holds `ceil(decay * s_i)`
//! check symbols, stopping once a layer is no larger than the tail
//! threshold; each layer-i symbol XORs itself into `degree` uniformly drawn
//! checks of layer i+1. The final layer is protected by the in-crate MDS
//! code at rate 1/2. Constant edges per symbol keep encode and decode work
//! linear in the message size.
//!
//! The graph is a pure function of (k, degree, decay, tail threshold, seed):
//! layer i's edges come from an independent stream derived from
//! (seed, layer index), so identical parameters always rebuild identical
//! graphs.

use crate::codec::{validate_received, BlockDecode};
use crate::error::{Error, Result};
use crate::field::xor_slice;
use crate::mds::{build_cauchy_matrix, recover_sources, CauchyMatrix};
use crate::packet::Packet;
use crate::params::CodeParameters;
use crate::ratio::Ratio;
use crate::rng;
use std::collections::VecDeque;

/// Graph-shape knobs. The defaults give a rate-1/2 cascade (check budget
/// matches `decay/(1-decay) = 1` times the source count, plus the tail).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeConfig {
    /// Edges drawn per symbol into the next layer.
    pub degree: usize,
    /// Layer shrink factor, in (0, 1).
    pub decay: Ratio,
    /// Layers stop shrinking at this size; the last layer is MDS-protected.
    pub tail_threshold: usize,
}

impl Default for CascadeConfig {
    fn default() -> CascadeConfig {
        CascadeConfig {
            degree: 3,
            decay: Ratio::new(1, 2).expect("static ratio"),
            tail_threshold: 32,
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 {
            return Err(Error::InvalidDegree(self.degree));
        }
        if self.decay.is_zero() || self.decay >= Ratio::ONE {
            return Err(Error::InvalidDecay(self.decay));
        }
        // MDS tail at rate 1/2 needs 2*s_t <= 256 field points.
        if self.tail_threshold == 0 || self.tail_threshold > 128 {
            return Err(Error::InvalidTailThreshold(self.tail_threshold));
        }
        Ok(())
    }
}

/// Layer sizes `[k, ceil(decay*k), ...]` down to the tail threshold.
pub fn layer_sizes(k: u32, cfg: &CascadeConfig) -> Result<Vec<u32>> {
    cfg.validate()?;
    let mut sizes = vec![k];
    let mut s = k;
    while s as usize > cfg.tail_threshold {
        let mut next = u32::try_from(cfg.decay.ceil_mul(s as u64)?)
            .map_err(|_| Error::CountOverflow)?;
        // ceil can stall for decay close to 1; force strict shrink
        next = next.min(s - 1).max(1);
        sizes.push(next);
        s = next;
    }
    Ok(sizes)
}

/// Check symbols plus tail repairs the schedule requires: `sum(s_1..s_t) +
/// s_t`. The total packet count for a cascade block is `k` plus this.
pub fn structural_repair_count(k: u32, cfg: &CascadeConfig) -> Result<u32> {
    let sizes = layer_sizes(k, cfg)?;
    let checks: u64 = sizes[1..].iter().map(|&s| s as u64).sum();
    let tail = *sizes.last().expect("nonempty") as u64;
    u32::try_from(checks + tail).map_err(|_| Error::CountOverflow)
}

/// The layered constraint graph plus the MDS tail matrix. Adjacency is
/// stored in flat compressed form, one span per symbol.
#[derive(Debug)]
pub struct CascadeGraph {
    sizes: Vec<u32>,
    offsets: Vec<u32>,
    /// Span starts into `target_data`, one per symbol plus a sentinel.
    target_span: Vec<u32>,
    /// Global ids of the next-layer checks each symbol feeds.
    target_data: Vec<u32>,
    /// Span starts into `input_data`, one per symbol plus a sentinel.
    input_span: Vec<u32>,
    /// Global ids of each check's in-neighbors (empty spans for layer 0).
    input_data: Vec<u32>,
    tail: CauchyMatrix,
    degree: usize,
}

impl CascadeGraph {
    pub fn layer_sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn layer_offsets(&self) -> &[u32] {
        &self.offsets
    }

    /// Symbols living in the layers (sources + checks); tail repairs are on
    /// top of these.
    pub fn graph_symbols(&self) -> usize {
        *self.offsets.last().expect("nonempty") as usize
    }

    pub fn source_count(&self) -> usize {
        self.sizes[0] as usize
    }

    pub fn tail_repair_count(&self) -> usize {
        *self.sizes.last().expect("nonempty") as usize
    }

    pub fn total_packets(&self) -> usize {
        self.graph_symbols() + self.tail_repair_count()
    }

    pub fn targets_of(&self, sym: u32) -> &[u32] {
        let s = sym as usize;
        &self.target_data[self.target_span[s] as usize..self.target_span[s + 1] as usize]
    }

    pub fn inputs_of(&self, sym: u32) -> &[u32] {
        let s = sym as usize;
        &self.input_data[self.input_span[s] as usize..self.input_span[s + 1] as usize]
    }

    pub fn tail_matrix(&self) -> &CauchyMatrix {
        &self.tail
    }

    /// Edges drawn per symbol when the graph was built.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edge_count(&self) -> usize {
        self.target_data.len()
    }

    /// Layer index of a graph symbol.
    pub fn layer_of(&self, sym: u32) -> usize {
        debug_assert!((sym as usize) < self.graph_symbols());
        match self.offsets.binary_search(&sym) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }
}

/// Uniform draws with replacement; draws hitting the same check an even
/// number of times cancel (XORing a symbol in twice is a no-op), so they
/// collapse by parity. Redraws until at least one edge survives.
fn draw_edges(r: &mut rand_chacha::ChaCha8Rng, degree: usize, bound: usize) -> Vec<u32> {
    loop {
        let mut draws: Vec<u32> = (0..degree).map(|_| rng::index(r, bound) as u32).collect();
        draws.sort_unstable();
        let mut kept = Vec::with_capacity(degree);
        let mut i = 0;
        while i < draws.len() {
            let mut run = 1;
            while i + run < draws.len() && draws[i + run] == draws[i] {
                run += 1;
            }
            if run % 2 == 1 {
                kept.push(draws[i]);
            }
            i += run;
        }
        if !kept.is_empty() {
            return kept;
        }
    }
}

/// Builds the graph for `params` under `cfg`, checking that the parameter
/// block's repair budget matches the layer schedule exactly.
pub fn build_cascade_graph(
    params: &CodeParameters,
    cfg: &CascadeConfig,
) -> Result<CascadeGraph> {
    let k = params.k();
    let sizes = layer_sizes(k, cfg)?;
    let needed = structural_repair_count(k, cfg)?;
    let budget = params.p() - k;
    if needed != budget {
        return Err(Error::BudgetMismatch {
            budget,
            needed,
            achievable_c: Ratio::new((k + needed) as u64, k as u64)?,
        });
    }

    let mut offsets = Vec::with_capacity(sizes.len() + 1);
    offsets.push(0u32);
    for &s in &sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let graph_symbols = *offsets.last().unwrap() as usize;

    // draw all edges, then flatten both adjacency directions
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(graph_symbols * cfg.degree);
    for i in 0..sizes.len() - 1 {
        let mut r = rng::stream(params.seed(), i as u64);
        let next_size = sizes[i + 1] as usize;
        for j in 0..sizes[i] {
            let sym = offsets[i] + j;
            for local in draw_edges(&mut r, cfg.degree, next_size) {
                edges.push((sym, offsets[i + 1] + local));
            }
        }
    }
    let flatten = |key: fn(&(u32, u32)) -> u32, val: fn(&(u32, u32)) -> u32| {
        let mut span = vec![0u32; graph_symbols + 1];
        for e in &edges {
            span[key(e) as usize + 1] += 1;
        }
        for i in 0..graph_symbols {
            span[i + 1] += span[i];
        }
        let mut cursor = span.clone();
        let mut data = vec![0u32; edges.len()];
        for e in &edges {
            let c = &mut cursor[key(e) as usize];
            data[*c as usize] = val(e);
            *c += 1;
        }
        (span, data)
    };
    // edges are generated in ascending symbol order, so both directions
    // come out sorted within each span
    let (target_span, target_data) = flatten(|e| e.0, |e| e.1);
    let (input_span, input_data) = flatten(|e| e.1, |e| e.0);

    let tail_size = *sizes.last().unwrap() as usize;
    let tail = build_cauchy_matrix(tail_size, tail_size)?;

    let graph = CascadeGraph {
        sizes,
        offsets,
        target_span,
        target_data,
        input_span,
        input_data,
        tail,
        degree: cfg.degree,
    };

    // Structural linearity witness: edges stay linear in k with constant
    // degree. The decay bound covers the geometric layer sum; the additive
    // term absorbs per-layer ceil rounding (at most 64 halvings) and the
    // tail.
    let den = cfg.decay.denom() as usize;
    let num = cfg.decay.numer() as usize;
    let bound =
        cfg.degree * ((k as usize + 64 + cfg.tail_threshold) * den / (den - num) + 1);
    assert!(
        graph.edge_count() <= bound,
        "edge count {} exceeds structural bound {}",
        graph.edge_count(),
        bound
    );

    Ok(graph)
}

/// Encodes a padded block: k systematic packets, check symbols layer by
/// layer (each the XOR of its in-neighbors), then the MDS tail repairs.
pub fn encode_block(
    padded: &[u8],
    params: &CodeParameters,
    graph: &CascadeGraph,
    block_id: u64,
) -> Result<Vec<Packet>> {
    if padded.len() != params.padded_bytes() {
        return Err(Error::BlockSizeMismatch {
            expected: params.padded_bytes(),
            got: padded.len(),
        });
    }
    debug_assert_eq!(graph.total_packets(), params.p() as usize);
    let sym_bytes = params.payload_bytes();
    let k = params.k() as usize;
    let graph_symbols = graph.graph_symbols();

    // check values are built straight into the packet payloads; a symbol's
    // inputs always sit at strictly lower global indices
    let mut packets: Vec<Packet> = Vec::with_capacity(graph.total_packets());
    for (i, chunk) in padded.chunks_exact(sym_bytes).enumerate() {
        packets.push(Packet {
            block_id,
            index: i as u32,
            payload: chunk.to_vec(),
        });
    }
    for c in k..graph_symbols {
        packets.push(Packet {
            block_id,
            index: c as u32,
            payload: vec![0u8; sym_bytes],
        });
        let (lower, check) = packets.split_at_mut(c);
        let value = &mut check[0].payload;
        for &inp in graph.inputs_of(c as u32) {
            xor_slice(value, &lower[inp as usize].payload);
        }
    }

    let tail_size = graph.tail_repair_count();
    let tail_offset = graph_symbols - tail_size;
    for r in 0..tail_size {
        let mut payload = vec![0u8; sym_bytes];
        for j in 0..tail_size {
            crate::field::addmul_slice(
                &mut payload,
                &packets[tail_offset + j].payload,
                graph.tail_matrix().entry(r, j),
            );
        }
        packets.push(Packet {
            block_id,
            index: (graph_symbols + r) as u32,
            payload,
        });
    }
    Ok(packets)
}

/// Peeling diagnostics for one decode attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeStats {
    /// Peeling generations that recovered at least one symbol.
    pub rounds: usize,
    pub recovered_per_round: Vec<usize>,
    /// Symbols recovered by peeling (tail MDS recoveries not included).
    pub recovered: usize,
    pub unresolved_sources: usize,
    /// Lowest layer still holding unknown symbols when stalled.
    pub stall_layer: Option<usize>,
}

/// Decoder state. Sources accumulate straight into the padded output
/// buffer; every check keeps one accumulator `rhs = value XOR (known
/// inputs)`, so a check with residual 1 holds its missing input's value
/// verbatim.
struct PeelState<'g> {
    graph: &'g CascadeGraph,
    sym_bytes: usize,
    k: usize,
    padded: Vec<u8>,
    /// Per-check accumulator, indexed by `check - k`.
    rhs: Vec<u8>,
    known: Vec<bool>,
    /// Unknown-input count per check, indexed by `check - k`.
    residual: Vec<u32>,
    queue: VecDeque<u32>,
    queueing: bool,
}

impl<'g> PeelState<'g> {
    fn new(graph: &'g CascadeGraph, sym_bytes: usize) -> PeelState<'g> {
        let n = graph.graph_symbols();
        let k = graph.source_count();
        PeelState {
            graph,
            sym_bytes,
            k,
            padded: vec![0u8; k * sym_bytes],
            rhs: vec![0u8; (n - k) * sym_bytes],
            known: vec![false; n],
            residual: vec![0; n - k],
            queue: VecDeque::new(),
            queueing: false,
        }
    }

    fn known(&self, sym: u32) -> bool {
        self.known[sym as usize]
    }

    fn rhs_of(&self, check: usize) -> &[u8] {
        let at = (check - self.k) * self.sym_bytes;
        &self.rhs[at..at + self.sym_bytes]
    }

    /// Records a recovered symbol value: folds it into its own equation slot
    /// (for checks) and into every check it feeds. With queueing enabled,
    /// equations reaching residual 1 with a known check join the ready
    /// queue.
    fn mark_known(&mut self, sym: u32, value: &[u8]) {
        debug_assert!(!self.known(sym));
        let si = sym as usize;
        if si < self.k {
            self.padded[si * self.sym_bytes..(si + 1) * self.sym_bytes].copy_from_slice(value);
        } else {
            let at = (si - self.k) * self.sym_bytes;
            xor_slice(&mut self.rhs[at..at + self.sym_bytes], value);
        }
        self.known[si] = true;
        for &d in self.graph.targets_of(sym) {
            let di = d as usize - self.k;
            self.residual[di] -= 1;
            let at = di * self.sym_bytes;
            xor_slice(&mut self.rhs[at..at + self.sym_bytes], value);
            if self.queueing && self.residual[di] == 1 && self.known(d) {
                self.queue.push_back(d);
            }
        }
        if self.queueing && si >= self.k && self.residual[si - self.k] == 1 {
            self.queue.push_back(sym);
        }
    }
}

/// Decodes from any packet subset: initialize from received packets, attempt
/// the tail MDS, then peel checks with exactly one unknown input, FIFO,
/// seeded in ascending check index.
pub fn decode_block(
    packets: &[Packet],
    params: &CodeParameters,
    graph: &CascadeGraph,
) -> Result<BlockDecode> {
    decode_block_with_stats(packets, params, graph).map(|(outcome, _)| outcome)
}

/// As [`decode_block`], also returning peeling diagnostics.
pub fn decode_block_with_stats(
    packets: &[Packet],
    params: &CodeParameters,
    graph: &CascadeGraph,
) -> Result<(BlockDecode, DecodeStats)> {
    validate_received(packets, params)?;
    debug_assert_eq!(graph.total_packets(), params.p() as usize);
    let k = params.k() as usize;
    let sym_bytes = params.payload_bytes();
    let graph_symbols = graph.graph_symbols();
    let tail_size = graph.tail_repair_count();
    let tail_offset = graph_symbols - tail_size;

    if packets.len() < k {
        let stats = DecodeStats {
            rounds: 0,
            recovered_per_round: Vec::new(),
            recovered: 0,
            unresolved_sources: k - packets.len().min(k),
            stall_layer: None,
        };
        return Ok((
            BlockDecode::Insufficient {
                received_bits: packets.len() as u64 * params.l_bits() as u64,
                required_bits: params.required_bits(),
            },
            stats,
        ));
    }

    let mut state = PeelState::new(graph, sym_bytes);
    let mut tail_repairs: Vec<Option<&[u8]>> = vec![None; tail_size];
    for pkt in packets {
        let idx = pkt.index as usize;
        if idx < k {
            state.padded[idx * sym_bytes..(idx + 1) * sym_bytes].copy_from_slice(&pkt.payload);
            state.known[idx] = true;
        } else if idx < graph_symbols {
            // slot holds the raw check value until the fold below
            state.rhs[(idx - k) * sym_bytes..(idx - k + 1) * sym_bytes]
                .copy_from_slice(&pkt.payload);
            state.known[idx] = true;
        } else {
            tail_repairs[idx - graph_symbols] = Some(&pkt.payload);
        }
    }

    // Tail MDS first, while the final layer's slots still hold raw values:
    // if its survivors plus received repairs reach the layer size, recover
    // the whole layer.
    let tail_known: Vec<usize> = (0..tail_size)
        .filter(|&j| state.known((tail_offset + j) as u32))
        .collect();
    let repairs_present = tail_repairs.iter().filter(|r| r.is_some()).count();
    if tail_known.len() + repairs_present >= tail_size && tail_size > 0 {
        // in a single-layer graph the tail layer is layer 0 itself, so its
        // raw values live in the padded buffer rather than the accumulators
        let mut rows: Vec<(usize, &[u8])> = Vec::with_capacity(tail_size);
        for &j in &tail_known {
            let sym = tail_offset + j;
            let raw = if sym < k {
                &state.padded[sym * sym_bytes..(sym + 1) * sym_bytes]
            } else {
                state.rhs_of(sym)
            };
            rows.push((j, raw));
        }
        for (r, payload) in tail_repairs.iter().enumerate() {
            if let Some(pl) = payload {
                rows.push((tail_size + r, pl));
            }
        }
        rows.sort_by_key(|(idx, _)| *idx);
        rows.truncate(tail_size);
        let recovered = recover_sources(graph.tail_matrix(), &rows, sym_bytes)?;
        for (j, value) in recovered.into_iter().enumerate() {
            let sym = tail_offset + j;
            if !state.known[sym] {
                let slot = if sym < k {
                    &mut state.padded[sym * sym_bytes..(sym + 1) * sym_bytes]
                } else {
                    &mut state.rhs[(sym - k) * sym_bytes..(sym - k + 1) * sym_bytes]
                };
                slot.copy_from_slice(&value);
                state.known[sym] = true;
            }
        }
    }

    // Fold known inputs into each check's accumulator, top layer first so
    // that a lower layer's raw values are still intact when read.
    for c in (k..graph_symbols).rev() {
        let ci = c - k;
        let (lower, rest) = state.rhs.split_at_mut(ci * sym_bytes);
        let dst = &mut rest[..sym_bytes];
        let mut unknown = 0;
        for &inp in graph.inputs_of(c as u32) {
            let inp = inp as usize;
            if !state.known[inp] {
                unknown += 1;
            } else if inp < k {
                xor_slice(dst, &state.padded[inp * sym_bytes..(inp + 1) * sym_bytes]);
            } else {
                let at = (inp - k) * sym_bytes;
                xor_slice(dst, &lower[at..at + sym_bytes]);
            }
        }
        state.residual[ci] = unknown;
    }

    // Seed the ready queue in ascending check index, then peel FIFO.
    state.queueing = true;
    for c in k..graph_symbols {
        if state.known(c as u32) && state.residual[c - k] == 1 {
            state.queue.push_back(c as u32);
        }
    }

    let mut rounds = 0usize;
    let mut recovered_per_round = Vec::new();
    let mut recovered_total = 0usize;
    let mut scratch = vec![0u8; sym_bytes];
    while !state.queue.is_empty() {
        let generation = state.queue.len();
        let mut recovered_now = 0usize;
        for _ in 0..generation {
            let c = state.queue.pop_front().expect("nonempty");
            let ci = c as usize;
            if !state.known(c) || state.residual[ci - k] != 1 {
                continue;
            }
            let missing = *graph
                .inputs_of(c)
                .iter()
                .find(|&&v| !state.known(v))
                .expect("residual 1");
            // with one unknown left, the accumulator is its value
            scratch.copy_from_slice(state.rhs_of(ci));
            state.mark_known(missing, &scratch);
            recovered_now += 1;
        }
        if recovered_now > 0 {
            rounds += 1;
            recovered_per_round.push(recovered_now);
            recovered_total += recovered_now;
        }
    }

    let unresolved_sources = (0..k).filter(|&j| !state.known(j as u32)).count();
    if unresolved_sources == 0 {
        let padded = state.padded;
        let stats = DecodeStats {
            rounds,
            recovered_per_round,
            recovered: recovered_total,
            unresolved_sources: 0,
            stall_layer: None,
        };
        return Ok((BlockDecode::Recovered(padded), stats));
    }

    let stall_layer = (0..graph_symbols)
        .find(|&s| !state.known(s as u32))
        .map(|s| graph.layer_of(s as u32));
    let stats = DecodeStats {
        rounds,
        recovered_per_round,
        recovered: recovered_total,
        unresolved_sources,
        stall_layer,
    };
    Ok((
        BlockDecode::Stalled {
            unresolved_sources,
        },
        stats,
    ))
}

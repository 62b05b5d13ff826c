//! Exact baseline backend: a systematic Cauchy-matrix Reed-Solomon erasure
//! code over GF(2^8). Any k of the p packets recover the message.
//!
//! Repair row i uses field point `x_i = i`, source column j uses
//! `y_j = m + j`; the point sets are disjoint, so every entry
//! `1 / (x_i XOR y_j)` exists and every square submatrix of `[I_k ; C]`
//! restricted to distinct packet indices is invertible. The construction
//! caps `k + m` at 256 field points.
//!
//! Decoding solves the k×k system by Gaussian elimination, deliberately
//! O(k^3): this backend is the exactness baseline, not the linear-time one.

use crate::codec::{validate_received, BlockDecode};
use crate::error::{Error, Result};
use crate::field::{addmul_slice, Gf256};
use crate::packet::Packet;
use crate::params::CodeParameters;

/// The m×k repair coefficient matrix.
#[derive(Debug, Clone)]
pub struct CauchyMatrix {
    k: usize,
    m: usize,
    rows: Vec<Vec<Gf256>>,
}

impl CauchyMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Gf256 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[Gf256] {
        &self.rows[i]
    }
}

/// Builds the repair matrix for k sources and m repairs.
pub fn build_cauchy_matrix(k: usize, m: usize) -> Result<CauchyMatrix> {
    assert!(k >= 1, "at least one source packet");
    if k + m > 256 {
        return Err(Error::FieldPointsExhausted { k, m });
    }
    let rows = (0..m)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let x = i as u8;
                    let y = (m + j) as u8;
                    Gf256(x ^ y).inv().expect("disjoint point sets")
                })
                .collect()
        })
        .collect();
    Ok(CauchyMatrix { k, m, rows })
}

/// Encodes a padded block into p packets: k verbatim source slices followed
/// by m repair packets, repair i being the matrix-weighted sum of sources.
pub fn encode_block(
    padded: &[u8],
    params: &CodeParameters,
    block_id: u64,
) -> Result<Vec<Packet>> {
    if padded.len() != params.padded_bytes() {
        return Err(Error::BlockSizeMismatch {
            expected: params.padded_bytes(),
            got: padded.len(),
        });
    }
    let k = params.k() as usize;
    let m = params.repair_count() as usize;
    let sym = params.payload_bytes();
    let matrix = build_cauchy_matrix(k, m)?;
    let sources: Vec<&[u8]> = padded.chunks_exact(sym).collect();

    let mut packets = Vec::with_capacity(k + m);
    for (j, source) in sources.iter().enumerate() {
        packets.push(Packet {
            block_id,
            index: j as u32,
            payload: source.to_vec(),
        });
    }
    for i in 0..m {
        let mut payload = vec![0u8; sym];
        for (j, source) in sources.iter().enumerate() {
            addmul_slice(&mut payload, source, matrix.entry(i, j));
        }
        packets.push(Packet {
            block_id,
            index: (k + i) as u32,
            payload,
        });
    }
    Ok(packets)
}

/// Decodes from any subset of packets. With at least k distinct packets the
/// block is always recovered; fewer yield `Insufficient`.
///
/// When more than k packets arrive, the k lowest indices are used, in
/// ascending order.
pub fn decode_block(packets: &[Packet], params: &CodeParameters) -> Result<BlockDecode> {
    validate_received(packets, params)?;
    let k = params.k() as usize;
    let l = params.l_bits() as u64;
    if packets.len() < k {
        return Ok(BlockDecode::Insufficient {
            received_bits: packets.len() as u64 * l,
            required_bits: params.required_bits(),
        });
    }
    let mut ordered: Vec<&Packet> = packets.iter().collect();
    ordered.sort_by_key(|p| p.index);
    let chosen: Vec<(usize, &[u8])> = ordered[..k]
        .iter()
        .map(|p| (p.index as usize, p.payload.as_slice()))
        .collect();

    let matrix = build_cauchy_matrix(k, params.repair_count() as usize)?;
    let sources = recover_sources(&matrix, &chosen, params.payload_bytes())?;

    let mut padded = Vec::with_capacity(params.padded_bytes());
    for s in sources {
        padded.extend_from_slice(&s);
    }
    Ok(BlockDecode::Recovered(padded))
}

/// Solves for the k source symbols from k received rows of `[I_k ; C]`.
///
/// `received` holds (packet index, payload) pairs with distinct indices in
/// ascending order. Used both by the packet decoder above and by the cascade
/// tail, which brings its own index space.
pub(crate) fn recover_sources(
    matrix: &CauchyMatrix,
    received: &[(usize, &[u8])],
    sym_bytes: usize,
) -> Result<Vec<Vec<u8>>> {
    let k = matrix.k();
    debug_assert_eq!(received.len(), k);
    debug_assert!(received.windows(2).all(|w| w[0].0 < w[1].0));

    // All k source packets present: no field multiplications needed.
    if received.last().is_none_or(|(idx, _)| *idx < k) {
        return Ok(received.iter().map(|(_, pl)| pl.to_vec()).collect());
    }

    let rows: Vec<Vec<Gf256>> = received
        .iter()
        .map(|(idx, _)| {
            if *idx < k {
                let mut row = vec![Gf256::ZERO; k];
                row[*idx] = Gf256::ONE;
                row
            } else {
                matrix.row(idx - k).to_vec()
            }
        })
        .collect();
    let inverse = invert_submatrix(&rows)?;

    let mut sources = vec![vec![0u8; sym_bytes]; k];
    for (j, out) in sources.iter_mut().enumerate() {
        for (i, (_, payload)) in received.iter().enumerate() {
            addmul_slice(out, payload, inverse[j][i]);
        }
    }
    Ok(sources)
}

/// Inverts a k×k matrix over GF(2^8) by Gauss-Jordan elimination with
/// first-nonzero pivot selection.
///
/// A singular input returns an internal error; it is unreachable for rows
/// drawn from `[I_k ; C]` with distinct indices, and hitting it in tests
/// fails the build.
pub fn invert_submatrix(rows: &[Vec<Gf256>]) -> Result<Vec<Vec<Gf256>>> {
    let k = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == k));

    // Augmented [M | I].
    let mut aug: Vec<Vec<Gf256>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { Gf256::ONE } else { Gf256::ZERO }));
            r
        })
        .collect();

    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or(Error::SingularSubmatrix)?;
        aug.swap(col, pivot);

        let inv_pivot = aug[col][col].inv().expect("pivot nonzero");
        for v in aug[col].iter_mut() {
            *v *= inv_pivot;
        }

        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let coeff = row[col];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v += coeff * *pv;
            }
        }
    }

    Ok(aug.into_iter().map(|row| row[k..].to_vec()).collect())
}

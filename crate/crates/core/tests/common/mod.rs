//! Shared test support: an independent dense linear-system oracle for the
//! cascade constraint system.
//!
//! The oracle rebuilds every constraint (XOR checks with 0/1 coefficients,
//! tail repairs with Cauchy coefficients) as dense equations over GF(2^8)
//! and runs full Gauss-Jordan elimination, substituting received packets as
//! constants. It shares only the graph with the decoder under test; all
//! solving is its own.

use erpk_core::cascade::CascadeGraph;
use erpk_core::field::Gf256;
use erpk_core::packet::Packet;
use erpk_core::params::CodeParameters;

#[derive(Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// All k source symbols are uniquely determined; their payloads in
    /// index order.
    Determined(Vec<Vec<u8>>),
    /// At least one source symbol is not pinned down by the received set.
    Underdetermined,
}

struct Equation {
    coeffs: Vec<Gf256>,
    rhs: Vec<u8>,
}

fn addmul_into(dst: &mut [u8], src: &[u8], c: Gf256) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = (Gf256(*d) + c * Gf256(*s)).0;
    }
}

fn scale(dst: &mut [u8], c: Gf256) {
    for d in dst.iter_mut() {
        *d = (c * Gf256(*d)).0;
    }
}

/// Solves the cascade system for the source symbols, exactly.
pub fn solve_cascade(
    graph: &CascadeGraph,
    params: &CodeParameters,
    received: &[Packet],
) -> OracleOutcome {
    let sym = params.payload_bytes();
    let total = graph.total_packets();
    let graph_symbols = graph.graph_symbols();
    let tail_size = graph.tail_repair_count();
    let tail_offset = graph_symbols - tail_size;
    let k = params.k() as usize;

    let mut value: Vec<Option<&[u8]>> = vec![None; total];
    for pkt in received {
        value[pkt.index as usize] = Some(&pkt.payload);
    }

    // Column numbering over the unknown packet slots.
    let mut column: Vec<Option<usize>> = vec![None; total];
    let mut unknowns = 0usize;
    for (slot, col) in column.iter_mut().enumerate() {
        if value[slot].is_none() {
            *col = Some(unknowns);
            unknowns += 1;
        }
    }

    // Equation set: one per check symbol, one per tail repair.
    let mut equations: Vec<Equation> = Vec::new();
    let mut add_equation = |terms: &[(usize, Gf256)]| {
        let mut coeffs = vec![Gf256::ZERO; unknowns];
        let mut rhs = vec![0u8; sym];
        for &(slot, c) in terms {
            match value[slot] {
                // constants move to the right-hand side
                Some(v) => addmul_into(&mut rhs, v, c),
                None => {
                    let col = column[slot].expect("unknown has a column");
                    coeffs[col] += c;
                }
            }
        }
        equations.push(Equation { coeffs, rhs });
    };

    for check in k..graph_symbols {
        let mut terms: Vec<(usize, Gf256)> = vec![(check, Gf256::ONE)];
        for &input in graph.inputs_of(check as u32) {
            terms.push((input as usize, Gf256::ONE));
        }
        add_equation(&terms);
    }
    let tail = graph.tail_matrix();
    for repair in 0..tail_size {
        let mut terms: Vec<(usize, Gf256)> = vec![(graph_symbols + repair, Gf256::ONE)];
        for j in 0..tail_size {
            terms.push((tail_offset + j, tail.entry(repair, j)));
        }
        add_equation(&terms);
    }

    // Gauss-Jordan to reduced row echelon form.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; unknowns];
    let mut pivot_row = 0usize;
    #[allow(clippy::needless_range_loop)]
    for col in 0..unknowns {
        let Some(r) = (pivot_row..equations.len())
            .find(|&r| !equations[r].coeffs[col].is_zero())
        else {
            continue;
        };
        equations.swap(pivot_row, r);
        let inv = equations[pivot_row].coeffs[col].inv().expect("nonzero pivot");
        for c in equations[pivot_row].coeffs.iter_mut() {
            *c *= inv;
        }
        scale(&mut equations[pivot_row].rhs, inv);

        let (head, rest) = equations.split_at_mut(pivot_row);
        let (pivot_eq, tail_eqs) = rest.split_first_mut().expect("pivot row exists");
        for eq in head.iter_mut().chain(tail_eqs.iter_mut()) {
            let factor = eq.coeffs[col];
            if factor.is_zero() {
                continue;
            }
            for (a, b) in eq.coeffs.iter_mut().zip(&pivot_eq.coeffs) {
                *a += factor * *b;
            }
            let rhs_update: Vec<u8> = pivot_eq.rhs.clone();
            addmul_into(&mut eq.rhs, &rhs_update, factor);
        }
        pivot_of_col[col] = Some(pivot_row);
        pivot_row += 1;
        if pivot_row == equations.len() {
            break;
        }
    }

    // A source is determined when received, or when its pivot row touches no
    // other unknown.
    let mut sources = Vec::with_capacity(k);
    for slot in 0..k {
        match value[slot] {
            Some(v) => sources.push(v.to_vec()),
            None => {
                let col = column[slot].expect("unknown source");
                let Some(row) = pivot_of_col[col] else {
                    return OracleOutcome::Underdetermined;
                };
                let eq = &equations[row];
                let clean = eq
                    .coeffs
                    .iter()
                    .enumerate()
                    .all(|(c, v)| c == col || v.is_zero());
                if !clean {
                    return OracleOutcome::Underdetermined;
                }
                sources.push(eq.rhs.clone());
            }
        }
    }
    OracleOutcome::Determined(sources)
}

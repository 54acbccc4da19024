//! Hermite indices over the coefficient tensors, viewed as labeled directed
//! multigraphs.
//!
//! An index assigns a multiplicity to entries `(s, i_1..i_D)`: an edge (or
//! `D`-uniform hyperedge) on vertex set `[n]` carrying label `s ∈ [m]`.
//! Entries are packed into a single slot id so a graph is a sorted
//! `(slot, multiplicity)` list; the derived per-label edge counts and vertex
//! degrees (a self-loop counts twice) drive all the parity conditions.

use crate::error::CoreError;
use crate::multiset::binomial;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlphaGraph {
    n: usize,
    m: usize,
    degree: u32,
    /// Sorted by slot id; multiplicities positive.
    entries: Vec<(u64, u32)>,
}

impl AlphaGraph {
    pub fn empty(n: usize, m: usize, degree: u32) -> Self {
        AlphaGraph {
            n,
            m,
            degree,
            entries: Vec::new(),
        }
    }

    /// Builds from `(label, vertex tuple, multiplicity)` triples.
    pub fn from_edges(
        n: usize,
        m: usize,
        degree: u32,
        edges: &[(usize, &[usize], u32)],
    ) -> Result<Self, CoreError> {
        let mut entries: Vec<(u64, u32)> = Vec::with_capacity(edges.len());
        for &(s, tuple, mult) in edges {
            if s >= m || tuple.len() != degree as usize || tuple.iter().any(|&v| v >= n) {
                return Err(CoreError::invalid("edge outside the graph's shape"));
            }
            if mult == 0 {
                continue;
            }
            entries.push((encode_slot(n, degree, s, tuple), mult));
        }
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(CoreError::invalid("duplicate edge slot"));
            }
        }
        Ok(AlphaGraph {
            n,
            m,
            degree,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `|α|`: total edge count with multiplicity.
    pub fn total_edges(&self) -> u32 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(label, tuple, multiplicity)` triples in slot order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Vec<usize>, u32)> + '_ {
        self.entries
            .iter()
            .map(move |&(slot, mult)| {
                let (s, tuple) = decode_slot(self.n, self.degree, slot);
                (s, tuple, mult)
            })
    }

    /// Per-label edge counts `|α_s|`.
    pub fn label_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.m];
        for &(slot, mult) in &self.entries {
            let (s, _) = decode_slot(self.n, self.degree, slot);
            counts[s] += mult;
        }
        counts
    }

    /// Vertex total degrees `Δ_i`; each occurrence of a vertex in a tuple
    /// contributes once, so a `D = 2` self-loop contributes two.
    pub fn vertex_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for &(slot, mult) in &self.entries {
            let (_, tuple) = decode_slot(self.n, self.degree, slot);
            for v in tuple {
                deg[v] += mult;
            }
        }
        deg
    }

    pub fn all_degrees_even(&self) -> bool {
        self.vertex_degrees().iter().all(|d| d % 2 == 0)
    }

    /// `α! = Π mult!` over the entries.
    pub fn factorial(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, mult)| crate::hermite::factorial(mult))
            .product()
    }

    /// Applies a vertex relabeling; used by the symmetry tests.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Self {
        let mut entries: Vec<(u64, u32)> = self
            .entries
            .iter()
            .map(|&(slot, mult)| {
                let (s, tuple) = decode_slot(self.n, self.degree, slot);
                let mapped: Vec<usize> = tuple.iter().map(|&v| perm[v]).collect();
                (encode_slot(self.n, self.degree, s, &mapped), mult)
            })
            .collect();
        entries.sort_unstable();
        AlphaGraph {
            entries,
            ..self.clone()
        }
    }
}

pub fn encode_slot(n: usize, degree: u32, s: usize, tuple: &[usize]) -> u64 {
    let mut id = s as u64;
    for &v in tuple.iter().take(degree as usize) {
        id = id * n as u64 + v as u64;
    }
    id
}

pub fn decode_slot(n: usize, degree: u32, slot: u64) -> (usize, Vec<usize>) {
    let mut rem = slot;
    let mut tuple = vec![0usize; degree as usize];
    for k in (0..degree as usize).rev() {
        tuple[k] = (rem % n as u64) as usize;
        rem /= n as u64;
    }
    (rem as usize, tuple)
}

/// Raw enumeration size: multisets of up to `max_edges` slots out of
/// `m·n^D`.
pub fn enumeration_estimate(n: usize, m: usize, degree: u32, max_edges: u32) -> u128 {
    let slots = (m as u128).saturating_mul((n as u128).pow(degree));
    (1..=max_edges as u128)
        .map(|e| binomial(slots + e - 1, e))
        .fold(0u128, |a, b| a.saturating_add(b))
}

pub const ENUMERATION_CAP: u128 = 10_000_000;

/// All indices with `1 <= |α| <= max_edges` and every vertex degree even.
/// Refuses when the raw multiset enumeration would exceed the cap.
pub fn enumerate_valid_alphas(
    n: usize,
    m: usize,
    degree: u32,
    max_edges: u32,
) -> Result<Vec<AlphaGraph>, CoreError> {
    let estimate = enumeration_estimate(n, m, degree, max_edges);
    if estimate > ENUMERATION_CAP {
        return Err(CoreError::EnumerationCap {
            estimate,
            cap: ENUMERATION_CAP,
        });
    }
    let slots = (m as u64) * (n as u64).pow(degree);
    let mut out = Vec::new();
    let mut stack: Vec<(u64, u32)> = Vec::new();
    enumerate_rec(n, m, degree, slots, 0, max_edges, &mut stack, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    n: usize,
    m: usize,
    degree: u32,
    slots: u64,
    first_slot: u64,
    budget: u32,
    stack: &mut Vec<(u64, u32)>,
    out: &mut Vec<AlphaGraph>,
) {
    if !stack.is_empty() {
        let g = AlphaGraph {
            n,
            m,
            degree,
            entries: stack.clone(),
        };
        if g.all_degrees_even() {
            out.push(g);
        }
    }
    if budget == 0 {
        return;
    }
    for slot in first_slot..slots {
        for mult in 1..=budget {
            stack.push((slot, mult));
            enumerate_rec(n, m, degree, slots, slot + 1, budget - mult, stack, out);
            stack.pop();
        }
    }
}

//! Closed-form Hermite coefficients of the planted density.

use crate::hermite::factorial;

use super::alpha::AlphaGraph;

/// `E[h_k(c g) h_l(g)]` for standard Gaussian `g`:
/// `c^l · k!/((k-l)/2)! · (-(1-c^2)/2)^{(k-l)/2}` when `l <= k` and `k + l`
/// is even, zero otherwise.
pub fn scaled_coeff(k: u32, l: u32, c: f64) -> f64 {
    if l > k || !(k + l).is_multiple_of(2) {
        return 0.0;
    }
    let half = (k - l) / 2;
    c.powi(l as i32) * factorial(k) / factorial(half) * (-(1.0 - c * c) / 2.0).powi(half as i32)
}

/// `E_planted[h_α(G) h_β(b)]`: `n^{-D|α|/2} Π_s scaled_coeff(|α_s|, β_s, c)`
/// when every vertex degree is even; zero otherwise. The per-label parity
/// and `β_s <= |α_s|` conditions are carried by `scaled_coeff`.
pub fn planted_hermite_coeff(alpha: &AlphaGraph, beta: &[u32], c: f64) -> f64 {
    assert_eq!(beta.len(), alpha.m(), "beta must have one entry per label");
    if !alpha.all_degrees_even() {
        return 0.0;
    }
    let mut value = (alpha.n() as f64)
        .powf(-(alpha.degree() as f64) * alpha.total_edges() as f64 / 2.0);
    for (count, &b) in alpha.label_counts().iter().zip(beta) {
        value *= scaled_coeff(*count, b, c);
        if value == 0.0 {
            return 0.0;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_coeff_examples() {
        // k=2, l=0, c=0: 2!/1! * (-1/2) = -1.
        assert_eq!(scaled_coeff(2, 0, 0.0), -1.0);
        // Parity violation.
        assert_eq!(scaled_coeff(3, 2, 0.7), 0.0);
        // l = k: c^k k!.
        for k in 0..6u32 {
            let c = 0.3f64;
            assert!((scaled_coeff(k, k, c) - c.powi(k as i32) * factorial(k)).abs() < 1e-12);
        }
        // l > k vanishes.
        assert_eq!(scaled_coeff(1, 3, 0.5), 0.0);
    }

    #[test]
    fn empty_graph_coefficient_is_one() {
        let alpha = AlphaGraph::empty(4, 3, 2);
        assert_eq!(planted_hermite_coeff(&alpha, &[0, 0, 0], 0.2), 1.0);
    }

    #[test]
    fn odd_vertex_degree_kills_the_coefficient() {
        let alpha = AlphaGraph::from_edges(3, 1, 2, &[(0, &[0, 1], 1)]).unwrap();
        assert_eq!(planted_hermite_coeff(&alpha, &[1], 0.5), 0.0);
    }

    #[test]
    fn double_edge_matches_hand_value() {
        // One label, multiplicity 2 on (0,1): n^{-2} * scaled_coeff(2,0,0)
        // = -1/n^2 at c = 0.
        let n = 3usize;
        let alpha = AlphaGraph::from_edges(n, 1, 2, &[(0, &[0, 1], 2)]).unwrap();
        let got = planted_hermite_coeff(&alpha, &[0], 0.0);
        assert!((got - (-1.0 / (n * n) as f64)).abs() < 1e-14);
    }
}

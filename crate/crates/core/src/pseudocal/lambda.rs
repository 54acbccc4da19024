//! Per-index coefficient of the pseudo-calibrated moment matrix.

use crate::lowdeg::alpha::AlphaGraph;

/// `λ_{α,I,J} = (-1)^{|α|/2} n^{-|α|-(|I|+|J|)/2} Π_s (|α_s|-1)!! / α!`
/// when every `|α_s|` is even and every `Δ_i + I_i + J_i` is even; zero
/// otherwise. `I` and `J` are multilinear monomial index sets.
pub fn lambda_coeff(alpha: &AlphaGraph, i_set: &[usize], j_set: &[usize], n: usize) -> f64 {
    debug_assert_eq!(alpha.n(), n);
    let counts = alpha.label_counts();
    if counts.iter().any(|c| c % 2 != 0) {
        return 0.0;
    }
    let mut parity = alpha.vertex_degrees();
    for &v in i_set {
        parity[v] += 1;
    }
    for &v in j_set {
        parity[v] += 1;
    }
    if parity.iter().any(|p| p % 2 != 0) {
        return 0.0;
    }
    let edges = alpha.total_edges();
    let sign = if (edges / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let exponent = -(edges as f64) - (i_set.len() + j_set.len()) as f64 / 2.0;
    let double_facts: f64 = counts
        .iter()
        .filter(|&&c| c >= 2)
        .map(|&c| crate::hermite::double_factorial(c - 1))
        .product();
    sign * (n as f64).powf(exponent) * double_facts / alpha.factorial()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_index_normalizes_to_one() {
        let alpha = AlphaGraph::empty(5, 2, 2);
        assert_eq!(lambda_coeff(&alpha, &[], &[], 5), 1.0);
    }

    #[test]
    fn diagonal_singleton_is_inverse_n() {
        let alpha = AlphaGraph::empty(5, 2, 2);
        assert_eq!(lambda_coeff(&alpha, &[2], &[2], 5), 1.0 / 5.0);
    }

    #[test]
    fn double_edge_value() {
        // α: one label, two parallel edges on (0,1), I = J = ∅:
        // (-1)^1 n^{-2} · 1!! / 2! = -1/(2 n^2).
        let n = 4usize;
        let alpha = AlphaGraph::from_edges(n, 1, 2, &[(0, &[0, 1], 2)]).unwrap();
        let got = lambda_coeff(&alpha, &[], &[], n);
        assert!((got - (-1.0 / (2.0 * (n * n) as f64))).abs() < 1e-15);
    }

    #[test]
    fn parity_violations_vanish_exactly() {
        let n = 3usize;
        // Odd per-label count.
        let alpha = AlphaGraph::from_edges(n, 1, 2, &[(0, &[0, 0], 1)]).unwrap();
        assert_eq!(lambda_coeff(&alpha, &[], &[], n), 0.0);
        // Vertex parity violated by I.
        let alpha = AlphaGraph::from_edges(n, 1, 2, &[(0, &[0, 1], 2)]).unwrap();
        assert_eq!(lambda_coeff(&alpha, &[0], &[], n), 0.0);
        // And satisfied when I, J mend it.
        assert!(lambda_coeff(&alpha, &[0], &[0], n) != 0.0);
    }
}

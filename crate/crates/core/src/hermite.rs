//! Probabilists' Hermite polynomials.
//!
//! `h_0 = 1`, `h_1 = x`, `h_{k+1}(x) = x h_k(x) - k h_{k-1}(x)`. These are
//! orthogonal under the standard Gaussian with `E[h_k(g)^2] = k!`. Degrees
//! stay below the truncation thresholds (tens), so the three-term recurrence
//! in double precision is all that is needed.

/// Evaluates `h_k(x)` by the three-term recurrence.
pub fn hermite_eval(k: u32, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0; // h_0
            let mut cur = x; // h_1
            for j in 1..k {
                let next = x * cur - j as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Evaluates `h_0(x) .. h_k(x)` in one pass.
pub fn hermite_eval_all(k: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(1.0);
    if k == 0 {
        return out;
    }
    out.push(x);
    for j in 1..k {
        let next = x * out[j as usize] - j as f64 * out[j as usize - 1];
        out.push(next);
    }
    out
}

/// `h_k(0)`: `(-1)^{k/2} (k-1)!!` for even `k`, zero for odd `k`.
pub fn hermite_at_zero(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else if k == 0 {
        1.0
    } else {
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * double_factorial(k - 1)
    }
}

/// `v!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(v: u32) -> f64 {
    let mut acc = 1.0;
    let mut j = v;
    while j >= 2 {
        acc *= j as f64;
        j -= 2;
    }
    acc
}

/// `v!` in double precision (exact up to 22!).
pub fn factorial(v: u32) -> f64 {
    (1..=v).map(|j| j as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_one_everywhere() {
        for &x in &[-3.0, 0.0, 0.5, 10.0] {
            assert_eq!(hermite_eval(0, x), 1.0);
        }
    }

    #[test]
    fn h2_at_zero_is_minus_one() {
        assert_eq!(hermite_eval(2, 0.0), -1.0);
        assert_eq!(hermite_at_zero(2), -1.0);
    }

    #[test]
    fn h3_at_two() {
        // h_3(x) = x^3 - 3x by unrolling the recurrence; h_3(2) = 8 - 6 = 2.
        assert_eq!(hermite_eval(3, 2.0), 2.0);
        let x = 1.7f64;
        assert!((hermite_eval(3, x) - (x.powi(3) - 3.0 * x)).abs() < 1e-12);
    }

    #[test]
    fn recurrence_values_at_zero_match_closed_form_up_to_twelve() {
        for k in 0..=12u32 {
            assert_eq!(hermite_eval(k, 0.0), hermite_at_zero(k), "k={k}");
        }
    }

    #[test]
    fn eval_all_agrees_with_single() {
        let xs = [-1.3, 0.0, 0.25, 2.0];
        for &x in &xs {
            let all = hermite_eval_all(8, x);
            for k in 0..=8u32 {
                assert_eq!(all[k as usize], hermite_eval(k, x));
            }
        }
    }
}

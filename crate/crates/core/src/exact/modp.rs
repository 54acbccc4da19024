//! Arithmetic and elimination modulo a 62-bit prime.
//!
//! Used to locate a nonsingular pivot square of the linearization matrix and
//! to seed the p-adic lifting solver. A conclusion of "full rank mod p"
//! transfers to the rationals unconditionally; rank deficiency mod p is
//! cross-checked against several primes by the callers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// 62-bit primes (largest below 2^62). Verified by deterministic
/// Miller-Rabin in `tests::primes_are_prime`.
pub const PRIMES: [u64; 4] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
];

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // < 2^63, no overflow for p < 2^62
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo the prime `p` (Fermat).
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduces a signed big integer into `[0, p)`.
pub fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    m.to_u64().expect("mod_floor of positive modulus fits u64")
}

#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
/// Row-echelon elimination of an integer matrix mod `p`: returns the pivot
/// columns (one per independent row found). Rank mod p equals the number of
/// pivots; only rows below each pivot are reduced.
pub fn pivot_columns(rows: &[Vec<BigInt>], p: u64) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| bigint_mod(v, p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pr) = (row..nrows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col], p);
        let (top, rest) = m.split_at_mut(row + 1);
        let pivot_row = &mut top[row];
        for c in col..ncols {
            pivot_row[c] = mul_mod(pivot_row[c], inv, p);
        }
        for r in rest.iter_mut() {
            if r[col] != 0 {
                let factor = r[col];
                for c in col..ncols {
                    let sub = mul_mod(factor, pivot_row[c], p);
                    r[c] = sub_mod(r[c], sub, p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Inverts a square u64 matrix mod `p` by Gauss-Jordan, or `None` if singular.
#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
pub fn invert_mod(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            debug_assert_eq!(row.len(), n);
            let mut ext = row.clone();
            ext.extend((0..n).map(|j| u64::from(i == j)));
            ext
        })
        .collect();
    for col in 0..n {
        let pr = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, pr);
        let inv = inv_mod(m[col][col], p);
        for c in col..2 * n {
            m[col][c] = mul_mod(m[col][c], inv, p);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let factor = m[r][col];
                for c in col..2 * n {
                    let sub = mul_mod(factor, m[col][c], p);
                    m[r][c] = sub_mod(m[r][c], sub, p);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `A x mod p` for a u64 matrix.
pub fn matvec_mod(a: &[Vec<u64>], x: &[u64], p: u64) -> Vec<u64> {
    a.iter()
        .map(|row| {
            let mut acc: u128 = 0;
            for (v, xv) in row.iter().zip(x) {
                acc += *v as u128 * *xv as u128 % p as u128;
            }
            (acc % p as u128) as u64
        })
        .collect()
}

/// Balanced representative of `v mod p^k` given in `[0, p^k)`: maps to
/// `(-p^k/2, p^k/2]`.
pub fn balance(v: BigInt, modulus: &BigInt) -> BigInt {
    if &v * 2 > *modulus {
        v - modulus
    } else {
        v
    }
}

/// Rational reconstruction: finds `n/d` with `v ≡ n d^{-1} (mod m)`,
/// `|n| <= bound`, `0 < d <= bound` via the half-extended Euclid; `None`
/// when no such pair exists.
pub fn rational_reconstruct(v: &BigInt, modulus: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut r0 = modulus.clone();
    let mut r1 = v.mod_floor(modulus);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::from(1);
    while r1.abs() > *bound {
        if r1.is_zero() {
            return None;
        }
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    /// Deterministic Miller-Rabin with a base set valid below 3.3e24.
    fn is_prime_u64(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n == p {
                return true;
            }
            if n % p == 0 {
                return false;
            }
        }
        let mut d = n - 1;
        let mut s = 0;
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = pow_mod(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 0..s - 1 {
                x = mul_mod(x, x, n);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn primes_are_prime() {
        for &p in &PRIMES {
            assert!(is_prime_u64(p), "{p} not prime");
            assert!(p < 1 << 62);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = PRIMES[0];
        for a in [1u64, 2, 17, p - 1, 123456789] {
            assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        }
    }

    #[test]
    fn pivot_columns_of_rank_deficient_matrix() {
        // Second row is twice the first.
        let rows = vec![
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)],
        ];
        assert_eq!(pivot_columns(&rows, PRIMES[0]).len(), 1);
    }

    #[test]
    fn rational_reconstruction_recovers_small_fraction() {
        let p = BigInt::from(1000003);
        // v = 3 * 7^{-1} mod p
        let inv7 = BigInt::from(inv_mod(7, 1000003));
        let v = (BigInt::from(3) * inv7).mod_floor(&p);
        let (n, d) = rational_reconstruct(&v, &p, &BigInt::from(700)).unwrap();
        assert_eq!((n, d), (BigInt::from(3), BigInt::from(7)));
    }
}

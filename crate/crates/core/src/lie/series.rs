//! `ad` power series for the Jacobians of the exponential map.
//!
//! With `A = ad_x` these give `J_l`, and with `A = −ad_x` they give `J_r`:
//!
//! ```text
//! J(A)   = Σ_k A^k / (k+1)!
//! J⁻¹(A) = Σ_k B_k A^k / k!        (B_k Bernoulli numbers, B_1 = −1/2)
//! ```
//!
//! All sums are truncated at [`TERMS`] terms.

use super::Square;

pub const TERMS: usize = 20;

/// Bernoulli numbers `B_0 … B_19` with the `B_1 = −1/2` convention.
const BERNOULLI: [f64; TERMS] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
];

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `Σ_k A^k / (k+1)!`
pub fn jacobian<const N: usize>(a: &Square<N>) -> Square<N> {
    let mut power = Square::<N>::identity();
    let mut sum = Square::<N>::zeros();
    for k in 0..TERMS {
        sum += power / factorial(k + 1);
        power *= a;
    }
    sum
}

/// `Σ_k B_k A^k / k!`
pub fn jacobian_inv<const N: usize>(a: &Square<N>) -> Square<N> {
    let mut power = Square::<N>::identity();
    let mut sum = Square::<N>::zeros();
    for (k, b) in BERNOULLI.iter().enumerate() {
        if *b != 0.0 {
            sum += power * (b / factorial(k));
        }
        power *= a;
    }
    sum
}

/// Directional derivative of [`jacobian_inv`] at `A` along `dA`, term by term:
/// `d(A^k) = Σ_{i<k} A^i dA A^{k−1−i}`.
pub fn jacobian_inv_partial<const N: usize>(a: &Square<N>, da: &Square<N>) -> Square<N> {
    let mut powers = Vec::with_capacity(TERMS);
    powers.push(Square::<N>::identity());
    for k in 1..TERMS {
        powers.push(powers[k - 1] * a);
    }
    let mut sum = Square::<N>::zeros();
    for (k, b) in BERNOULLI.iter().enumerate().skip(1) {
        if *b == 0.0 {
            continue;
        }
        let mut d_power = Square::<N>::zeros();
        for i in 0..k {
            d_power += powers[i] * da * powers[k - 1 - i];
        }
        sum += d_power * (b / factorial(k));
    }
    sum
}

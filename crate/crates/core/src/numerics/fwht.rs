//! Fast Walsh-Hadamard transform, normalized by `1/sqrt(n)`.
//!
//! Equivalent to multiplying by the Sylvester Hadamard matrix of order
//! `n` scaled to orthonormality, which makes the transform its own
//! inverse. Hadamard (natural) ordering.

use super::is_power_of_two;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

/// Orthonormal Walsh-Hadamard transform of a power-of-two length input.
pub fn fwht<T: Scalar>(x: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
    let mut out = x.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// In-place variant of [`fwht`].
pub fn fwht_in_place<T: Scalar>(data: &mut [Cplx<T>]) -> Result<()> {
    let n = data.len();
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo {
            what: "fwht input",
            len: n,
        });
    }

    let mut dist = 1;
    while dist < n {
        for start in (0..n).step_by(dist * 2) {
            for i in start..start + dist {
                let a = data[i];
                let b = data[i + dist];
                data[i] = a + b;
                data[i + dist] = a - b;
            }
        }
        dist <<= 1;
    }

    let scale = T::one() / T::cast(n as f64).sqrt();
    for v in data.iter_mut() {
        *v = v.scale(scale);
    }
    Ok(())
}

/// Materialize the orthonormal Sylvester Hadamard matrix row by row.
///
/// Intended for small-order verification; the transform itself never
/// builds the matrix.
pub fn hadamard_matrix<T: Scalar>(n: usize) -> Result<Vec<Vec<T>>> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo {
            what: "hadamard order",
            len: n,
        });
    }
    let scale = T::one() / T::cast(n as f64).sqrt();
    let mut rows = vec![vec![T::zero(); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let sign = if (i & j).count_ones() % 2 == 0 {
                T::one()
            } else {
                -T::one()
            };
            *v = sign * scale;
        }
    }
    Ok(rows)
}

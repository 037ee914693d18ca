//! Multi-index bookkeeping for tensor-product spaces.
//!
//! A basis index `i` of `C^{d_0} ⊗ ... ⊗ C^{d_{n-1}}` has digits
//! `(i_0, ..., i_{n-1})` with `i_0` most significant, matching
//! [`ComplexMatrix::kron`] ordering.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub(crate) fn digits(mut i: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = i % dims[k];
        i /= dims[k];
    }
    out
}

fn check_order(dims: &[usize], order: &[usize]) -> Result<()> {
    let mut seen = vec![false; dims.len()];
    if order.len() != dims.len() {
        return Err(Error::InvalidArgument(format!("order {order:?} is not a permutation of {} axes", dims.len())));
    }
    for &o in order {
        if o >= dims.len() || seen[o] {
            return Err(Error::InvalidArgument(format!("order {order:?} is not a permutation of {} axes", dims.len())));
        }
        seen[o] = true;
    }
    Ok(())
}

/// `map[old] = new` for the axis permutation in which new axis `k` is old
/// axis `order[k]`.
pub(crate) fn permutation_map(dims: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    check_order(dims, order)?;
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let new_strides = strides(&new_dims);
    let total: usize = dims.iter().product();
    let mut pos_of_old = vec![0; dims.len()];
    for (k, &o) in order.iter().enumerate() {
        pos_of_old[o] = k;
    }
    Ok((0..total).map(|i| digits(i, dims).iter().enumerate().map(|(axis, &d)| d * new_strides[pos_of_old[axis]]).sum()).collect())
}

/// Reorders tensor factors of a vector: new axis `k` is old axis `order[k]`.
pub fn permute_vector(v: &[C64], dims: &[usize], order: &[usize]) -> Result<Vec<C64>> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dims {dims:?}", v.len())));
    }
    let map = permutation_map(dims, order)?;
    let mut out = vec![ZERO; total];
    for (i, &z) in v.iter().enumerate() {
        out[map[i]] = z;
    }
    Ok(out)
}

/// Reorders tensor factors of an operator, `P X P^dagger` for the factor
/// permutation `P`.
pub fn permute_subsystems(op: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if op.rows() != total || op.cols() != total {
        return Err(Error::DimensionMismatch(format!("{}x{} operator for dims {dims:?}", op.rows(), op.cols())));
    }
    let map = permutation_map(dims, order)?;
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            let z = op[(i, j)];
            if z != ZERO {
                out[(map[i], map[j])] = z;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, random};

    #[test]
    fn digits_roundtrip() {
        let dims = [2, 3, 4];
        let s = strides(&dims);
        for i in 0..24 {
            let d = digits(i, &dims);
            assert_eq!(d.iter().zip(&s).map(|(a, b)| a * b).sum::<usize>(), i);
        }
    }

    #[test]
    fn permuting_swaps_kron_factors() {
        let mut r = random::rng(2);
        let a = random::random_hermitian(2, &mut r);
        let b = random::random_hermitian(3, &mut r);
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&kron(&b, &a)) < 1e-15);
    }

    #[test]
    fn permute_vector_matches_kron() {
        let u = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let v = vec![C64::new(3.0, 0.0), C64::new(0.0, 1.0), C64::new(5.0, 0.0)];
        let uv = crate::linalg::kron_vec(&u, &v);
        let vu = permute_vector(&uv, &[2, 3], &[1, 0]).unwrap();
        assert_eq!(vu, crate::linalg::kron_vec(&v, &u));
    }

    #[test]
    fn rejects_bad_order() {
        assert!(permute_vector(&[ZERO; 4], &[2, 2], &[0, 0]).is_err());
    }
}

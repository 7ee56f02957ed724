//! Dense kernels shared by the forward ops and their VJPs.
//!
//! All matrices are row-major. The `_nt`/`_tn` variants fold the transpose
//! into the loop order instead of materializing a transposed copy.

use crate::real::Real;

/// c += a[m,k] * b[k,n]
pub fn matmul_acc<T: Real>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    if n == 1 {
        // mat-vec: dot of contiguous rows
        for i in 0..m {
            let row = &a[i * k..(i + 1) * k];
            let mut acc = T::zero();
            for p in 0..k {
                acc = acc + row[p] * b[p];
            }
            c[i] = c[i] + acc;
        }
        return;
    }
    for i in 0..m {
        let crow = &mut c[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == T::zero() {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for j in 0..n {
                crow[j] = crow[j] + aip * brow[j];
            }
        }
    }
}

/// c += a[m,k] * b^T  with b stored as [n,k]
pub fn matmul_nt_acc<T: Real>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(c.len(), m * n);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let crow = &mut c[i * n..(i + 1) * n];
        for j in 0..n {
            let brow = &b[j * k..(j + 1) * k];
            let mut acc = T::zero();
            for p in 0..k {
                acc = acc + arow[p] * brow[p];
            }
            crow[j] = crow[j] + acc;
        }
    }
}

/// c += a^T * b  with a stored as [m,k], b as [m,n], c as [k,n]
pub fn matmul_tn_acc<T: Real>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), m * n);
    debug_assert_eq!(c.len(), k * n);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let brow = &b[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = arow[p];
            if aip == T::zero() {
                continue;
            }
            let crow = &mut c[p * n..(p + 1) * n];
            for j in 0..n {
                crow[j] = crow[j] + aip * brow[j];
            }
        }
    }
}

/// Numerically stabilized softmax of a non-empty vector.
pub fn softmax<T: Real>(x: &[T]) -> Vec<T> {
    let mut max = x[0];
    for &v in &x[1..] {
        if v > max {
            max = v;
        }
    }
    let mut out: Vec<T> = x.iter().map(|&v| (v - max).exp()).collect();
    let mut total = T::zero();
    for &e in &out {
        total = total + e;
    }
    for e in &mut out {
        *e = *e / total;
    }
    out
}

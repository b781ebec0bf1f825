//! Truncated power series arithmetic on coefficient vectors.

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Product truncated to `len` coefficients.
pub fn mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reciprocal series; requires `a[0] != 0`.
pub fn inverse(a: &[C64], len: usize) -> Vec<C64> {
    assert!(a[0] != ZERO, "series inverse needs a nonzero constant term");
    let mut out = vec![ZERO; len];
    out[0] = a[0].inv();
    for k in 1..len {
        let s: C64 = (1..=k.min(a.len() - 1)).map(|j| a[j] * out[k - j]).sum();
        out[k] = -s * out[0];
    }
    out
}

/// `outer(inner(z))` for `inner(0) = 0`, truncated to `len` coefficients.
pub fn compose(outer: &[C64], inner: &[C64], len: usize) -> Vec<C64> {
    assert!(inner.first().is_none_or(|c| *c == ZERO), "inner series must vanish at the origin");
    // Horner in the series ring.
    let mut acc = vec![ZERO; len];
    for &c in outer.iter().take(len).rev() {
        acc = mul(&acc, inner, len);
        acc[0] += c;
    }
    acc
}

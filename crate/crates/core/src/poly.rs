//! Dense complex polynomials (coefficients in ascending order) and a
//! simultaneous Aberth-Ehrlich root finder.

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Horner evaluation of `p(z)` and `p'(z)`.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn derivative(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).copied().unwrap_or(ZERO) - b.get(k).copied().unwrap_or(ZERO)).collect()
}

pub fn scale(p: &[C64], s: C64) -> Vec<C64> {
    p.iter().map(|&c| c * s).collect()
}

/// Product of the linear factors `(z - r)` over `roots`.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    roots.iter().fold(vec![ONE], |acc, &r| mul(&acc, &[-r, ONE]))
}

/// `p / p'` at `z`, evaluated on the reversed polynomial when `|z| > 1`.
fn newton_ratio(p: &[C64], z: C64) -> C64 {
    let n = p.len() - 1;
    if z.norm() <= 1.0 {
        let (v, d) = eval_with_derivative(p, z);
        if d == ZERO {
            return if v == ZERO { ZERO } else { v / 1e-300 };
        }
        v / d
    } else {
        // p(z) = z^n q(y), y = 1/z, q = reversed p
        let y = z.inv();
        let mut q = ZERO;
        let mut dq = ZERO;
        for &c in p.iter() {
            dq = dq * y + q;
            q = q * y + c;
        }
        let denom = n as f64 * z.inv() * q - dq * y * y;
        if denom == ZERO {
            return ZERO;
        }
        q / denom
    }
}

/// All roots of `p` with multiplicity.
///
/// Exactly vanishing low-order coefficients are split off as roots at the
/// origin; exactly vanishing leading coefficients are trimmed.
pub fn roots(p: &[C64]) -> Vec<C64> {
    let mut hi = p.len();
    while hi > 0 && p[hi - 1] == ZERO {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && p[lo] == ZERO {
        lo += 1;
    }
    let mut out = vec![ZERO; lo];
    if hi <= lo + 1 {
        return out;
    }
    let core: Vec<C64> = p[lo..hi].to_vec();
    out.extend(aberth(&core));
    out
}

fn aberth(p: &[C64]) -> Vec<C64> {
    let n = p.len() - 1;
    if n == 1 {
        return vec![-p[0] / p[1]];
    }
    let radius = (p[0].norm() / p[n].norm()).powf(1.0 / n as f64);
    let z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius, theta)
        })
        .collect();
    aberth_refine(z, &vec![false; n], |x| newton_ratio(p, x))
}

/// Gauss-Seidel Aberth iteration from `start`, where `ratio(z) = p(z) / p'(z)`
/// for a polynomial whose roots are all of `start`. Entries flagged in
/// `fixed` are known roots and are not moved.
pub fn aberth_refine(mut z: Vec<C64>, fixed: &[bool], ratio: impl Fn(C64) -> C64) -> Vec<C64> {
    let n = z.len();
    let mut done = fixed.to_vec();
    for _ in 0..800 {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let r = ratio(z[k]);
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = r / (ONE - r * repulsion);
            if step.is_finite() {
                z[k] -= step;
            }
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300) || !step.is_finite() {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_by_arg(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        v
    }

    #[test]
    fn quadratic_roots() {
        // z^2 - 1/4
        let r = sorted_by_arg(roots(&[c(-0.25, 0.0), ZERO, ONE]));
        assert!((r[0] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn origin_roots_are_exact() {
        // z^3 (z - 0.3i)
        let p = from_roots(&[ZERO, ZERO, ZERO, c(0.0, 0.3)]);
        let r = roots(&p);
        assert_eq!(r.iter().filter(|z| **z == ZERO).count(), 3);
        assert!(r.iter().any(|z| (*z - c(0.0, 0.3)).norm() < 1e-14));
    }

    #[test]
    fn recovers_mixed_moduli() {
        let truth = [c(0.1, 0.2), c(-0.7, 0.1), c(3.0, -1.0), c(0.5, 0.5), c(-20.0, 4.0)];
        let p = from_roots(&truth);
        let found = roots(&p);
        for t in truth {
            let best = found.iter().map(|z| (*z - t).norm() / t.norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-12, "root {t} missed by {best}");
        }
    }

    #[test]
    fn derivative_and_eval() {
        let p = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let (v, d) = eval_with_derivative(&p, c(2.0, 0.0));
        assert_eq!(v, c(17.0, 0.0));
        assert_eq!(d, c(14.0, 0.0));
        assert_eq!(derivative(&p), vec![c(2.0, 0.0), c(6.0, 0.0)]);
    }
}

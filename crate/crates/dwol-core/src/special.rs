//! Hermite polynomials, factorial tables and Gauss–Hermite rules.

use crate::{CoreError, Result, C64};

/// Hard cap on Hermite/mode indices; combinatorial factors stay finite well
/// below this, the cap just catches nonsense input early.
pub const MAX_HERMITE_INDEX: usize = 64;

/// `n!` as f64, exact for n <= 22 and correctly rounded beyond.
pub fn factorial(n: usize) -> Result<f64> {
    if n > MAX_HERMITE_INDEX {
        return Err(CoreError::IndexTooLarge { index: n, max: MAX_HERMITE_INDEX });
    }
    let mut acc = 1.0;
    for k in 2..=n {
        acc *= k as f64;
    }
    Ok(acc)
}

/// `Γ(k + 1/2)` by the exact recurrence from `Γ(1/2) = √π`.
pub fn gamma_half_integer(k: usize) -> Result<f64> {
    if k > MAX_HERMITE_INDEX {
        return Err(CoreError::IndexTooLarge { index: k, max: MAX_HERMITE_INDEX });
    }
    let mut acc = std::f64::consts::PI.sqrt();
    for j in 0..k {
        acc *= j as f64 + 0.5;
    }
    Ok(acc)
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut hm = 1.0;
    if n == 0 {
        return hm;
    }
    let mut h = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * h - 2.0 * k as f64 * hm;
        hm = h;
        h = next;
    }
    h
}

/// Scaled Hermite sequence `h_k = ρ^k H_k(q / (2 p ρ))` with
/// `ρ² = (p − 1)/p`, evaluated without ever forming `ρ` or the (possibly
/// huge) unscaled `H_k`. Satisfies
///
/// ```text
/// h_0 = 1,    h_{k+1} = (q/p) h_k − 2k ((p−1)/p) h_{k−1}
/// ```
///
/// Returns `(h_n, h_{n−1})`; `h_{−1}` is reported as 0.
pub fn scaled_hermite_pair(n: usize, p: f64, q: C64) -> (C64, C64) {
    let mut hm = C64::new(0.0, 0.0);
    let mut h = C64::new(1.0, 0.0);
    let qp = q / p;
    let rho2 = (p - 1.0) / p;
    for k in 0..n {
        let next = qp * h - 2.0 * k as f64 * rho2 * hm;
        hm = h;
        h = next;
    }
    (h, hm)
}

/// Gauss–Hermite rule: nodes `x_i` and weights `w_i` such that
/// `∫ f(x) e^{−x²} dx ≈ Σ w_i f(x_i)`.
///
/// Nodes are found by interlacing bisection on the orthonormal recurrence,
/// weights from the Christoffel sum — stable for any practical order.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && n <= 512);
    // Orthonormal Hermite functions w.r.t. weight e^{-x^2}:
    // p_0 = pi^{-1/4}, p_{k+1} = (x p_k - sqrt(k/2) p_{k-1}) / sqrt((k+1)/2)
    let eval = |k: usize, x: f64| -> f64 {
        let mut pm = 0.0_f64;
        let mut p = std::f64::consts::PI.powf(-0.25);
        for j in 0..k {
            let next = (x * p - (j as f64 / 2.0).sqrt() * pm) / ((j as f64 + 1.0) / 2.0).sqrt();
            pm = p;
            p = next;
        }
        p
    };

    // Roots of p_k interlace those of p_{k+1}; build up order by order.
    let mut roots: Vec<f64> = vec![];
    for k in 1..=n {
        let mut brackets = Vec::with_capacity(k + 1);
        // Outer bound: |x| < sqrt(2k + 1) + 2 for all roots of p_k.
        let bound = (2.0 * k as f64 + 1.0).sqrt() + 2.0;
        brackets.push(-bound);
        brackets.extend(roots.iter().copied());
        brackets.push(bound);
        let mut new_roots = Vec::with_capacity(k);
        for w in brackets.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut fa, fb) = (eval(k, a), eval(k, b));
            debug_assert!(fa * fb <= 0.0);
            if fa == 0.0 {
                new_roots.push(a);
                continue;
            }
            if fb == 0.0 {
                new_roots.push(b);
                continue;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = eval(k, m);
                if fm == 0.0 || (b - a) < 1e-16 * (1.0 + m.abs()) {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            new_roots.push(0.5 * (a + b));
        }
        roots = new_roots;
    }

    // Christoffel weights: w_i = 1 / sum_{k=0}^{n-1} p_k(x_i)^2.
    let weights = roots
        .iter()
        .map(|&x| {
            let mut pm = 0.0_f64;
            let mut p = std::f64::consts::PI.powf(-0.25);
            let mut sum = p * p;
            for j in 0..(n - 1) {
                let next =
                    (x * p - (j as f64 / 2.0).sqrt() * pm) / ((j as f64 + 1.0) / 2.0).sqrt();
                pm = p;
                p = next;
                sum += p * p;
            }
            1.0 / sum
        })
        .collect();
    (roots, weights)
}

//! Dense univariate polynomials in the monomial basis.
//!
//! Trajectories are polynomials in the scaled time `s = t / t_f`; their
//! derivatives are obtained by exact coefficient manipulation, never by
//! numerical differentiation.

/// Polynomial `p(s) = c[0] + c[1] s + ... + c[d] s^d`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &ck in self.c.iter().rev() {
            acc = acc * s + ck;
        }
        acc
    }

    /// Coefficient-level derivative: d/ds.
    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, ck)| k as f64 * ck)
            .collect();
        Poly::new(c)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(0.0);
        for (k, ck) in self.c.iter().enumerate() {
            c.push(ck / (k as f64 + 1.0));
        }
        Poly::new(c)
    }

    pub fn scale(&self, factor: f64) -> Poly {
        Poly::new(self.c.iter().map(|ck| ck * factor).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0.0; n];
        for (k, ck) in self.c.iter().enumerate() {
            c[k] += ck;
        }
        for (k, ck) in other.c.iter().enumerate() {
            c[k] += ck;
        }
        Poly::new(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.c.is_empty() || other.c.is_empty() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Product of linear factors `Π (s - roots[i])`.
    pub fn from_roots(roots: &[f64]) -> Poly {
        let mut p = Poly::new(vec![1.0]);
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&ck| ck == 0.0)
    }
}

/// Polynomial optionally carried in the factored form `A(s) r(s)` with
/// `A = s⁵(1-s)⁵`. The factored form keeps the endpoint zeros of the value
/// and the first four derivatives exact no matter how large the
/// coefficients of `r` are — the expanded monomial form loses them to
/// cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampedPoly {
    pub clamped: bool,
    pub r: Poly,
    r1: Poly,
    r2: Poly,
}

impl ClampedPoly {
    pub fn new(clamped: bool, r: Poly) -> Self {
        let r1 = r.derivative();
        let r2 = r1.derivative();
        Self { clamped, r, r1, r2 }
    }

    pub fn zero() -> Self {
        Self::new(false, Poly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero()
    }

    /// `A = s⁵ u⁵`, `A' = 5 s⁴ u⁴ (u - s)`, `A'' = 20 s³ u³ (u-s)² - 10 s⁴ u⁴`
    /// with `u = 1 - s`.
    fn amps(s: f64) -> (f64, f64, f64) {
        let u = 1.0 - s;
        let s2 = s * s;
        let u2 = u * u;
        let a = s2 * s2 * s * u2 * u2 * u;
        let a1 = 5.0 * s2 * s2 * u2 * u2 * (u - s);
        let a2 = 20.0 * s2 * s * u2 * u * (u - s) * (u - s) - 10.0 * s2 * s2 * u2 * u2;
        (a, a1, a2)
    }

    pub fn value(&self, s: f64) -> f64 {
        if self.clamped {
            let (a, _, _) = Self::amps(s);
            a * self.r.eval(s)
        } else {
            self.r.eval(s)
        }
    }

    pub fn d1(&self, s: f64) -> f64 {
        if self.clamped {
            let (a, a1, _) = Self::amps(s);
            a1 * self.r.eval(s) + a * self.r1.eval(s)
        } else {
            self.r1.eval(s)
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        if self.clamped {
            let (a, a1, a2) = Self::amps(s);
            a2 * self.r.eval(s) + 2.0 * a1 * self.r1.eval(s) + a * self.r2.eval(s)
        } else {
            self.r2.eval(s)
        }
    }
}

//! Truncated power series over `f64`.
//!
//! A [`Series`] stores the coefficients `a_0, ..., a_{n-1}` of a formal power
//! series modulo `x^n`. Every operation keeps the truncation order of its
//! inputs (the minimum when two series are combined), so coefficient
//! extraction is exact up to floating-point rounding.

use std::ops::{Add, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    /// Series from explicit coefficients; the order is `coeffs.len()`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Series { coeffs }
    }

    /// The constant `c` to the given order.
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order.max(1)];
        coeffs[0] = c;
        Series { coeffs }
    }

    /// The identity series `x` to the given order.
    pub fn x(order: usize) -> Self {
        let mut coeffs = vec![0.0; order.max(2)];
        coeffs[1] = 1.0;
        coeffs.truncate(order.max(1));
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order.max(1));
        self
    }

    pub fn scale(&self, c: f64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Formal derivative; the order drops by one (but stays at least one).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Series::constant(0.0, 1);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| k as f64 * a)
            .collect();
        Series { coeffs }
    }

    /// Multiply by `x^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        if k < n {
            coeffs[k..].copy_from_slice(&self.coeffs[..n - k]);
        }
        Series { coeffs }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Self {
        let a0 = self.coeffs[0];
        assert!(a0 != 0.0, "series inverse needs a nonzero constant term");
        let n = self.coeffs.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.coeffs[j] * b[k - j];
            }
            b[k] = -s / a0;
        }
        Series { coeffs: b }
    }

    /// Square root; requires a positive constant term.
    pub fn sqrt(&self) -> Self {
        let a0 = self.coeffs[0];
        assert!(a0 > 0.0, "series square root needs a positive constant term");
        let n = self.coeffs.len();
        let mut b = vec![0.0; n];
        b[0] = a0.sqrt();
        for k in 1..n {
            let mut s = self.coeffs[k];
            for j in 1..k {
                s -= b[j] * b[k - j];
            }
            b[k] = s / (2.0 * b[0]);
        }
        Series { coeffs: b }
    }

    /// Natural logarithm; requires a positive constant term.
    pub fn ln(&self) -> Self {
        let a0 = self.coeffs[0];
        assert!(a0 > 0.0, "series logarithm needs a positive constant term");
        let n = self.coeffs.len();
        // (ln A)' = A'/A, integrated term by term.
        let quotient = &self.derivative() * &self.recip();
        let mut coeffs = vec![0.0; n];
        coeffs[0] = a0.ln();
        for k in 1..n {
            coeffs[k] = quotient.coeff(k - 1) / k as f64;
        }
        Series { coeffs }
    }

    /// Exponential of a series.
    pub fn exp(&self) -> Self {
        let n = self.coeffs.len();
        let mut b = vec![0.0; n];
        b[0] = self.coeffs[0].exp();
        // B' = A' B  =>  k b_k = sum_{j=1}^{k} j a_j b_{k-j}.
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.coeffs[j] * b[k - j];
            }
            b[k] = s / k as f64;
        }
        Series { coeffs: b }
    }

    /// Real power `A^t` for a series with positive constant term.
    pub fn powf(&self, t: f64) -> Self {
        self.ln().scale(t).exp()
    }

    /// Integer power by repeated squaring (works for any constant term).
    pub fn powi(&self, mut e: u64) -> Self {
        let mut result = Series::constant(1.0, self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Evaluate the truncated polynomial at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        Series {
            coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        Series {
            coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![0.0; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Series { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_of_one_minus_x_is_geometric() {
        let s = Series::from_coeffs(vec![1.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.recip().coeffs(), &[1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn sqrt_squares_back() {
        let s = Series::from_coeffs(vec![4.0, 1.0, -2.0, 0.5, 3.0, 1.0]);
        let r = s.sqrt();
        let back = &r * &r;
        for k in 0..6 {
            assert!((back.coeff(k) - s.coeff(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_ln_roundtrip_and_powers() {
        let s = Series::from_coeffs(vec![0.7, 0.2, 0.05, 0.03, 0.01, 0.01]);
        let back = s.ln().exp();
        for k in 0..6 {
            assert!((back.coeff(k) - s.coeff(k)).abs() < 1e-13);
        }
        let p1 = s.powf(5.0);
        let p2 = s.powi(5);
        for k in 0..6 {
            assert!((p1.coeff(k) - p2.coeff(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn binomial_sqrt_coefficients() {
        // sqrt(1 - 4x) = 1 - 2x - 2x^2 - 4x^3 - 10x^4 - ...
        let s = Series::from_coeffs(vec![1.0, -4.0, 0.0, 0.0, 0.0]).sqrt();
        assert_eq!(s.coeffs(), &[1.0, -2.0, -2.0, -4.0, -10.0]);
    }
}

//! Analytic layer: the closed-form quantities attached to the parameter
//! `λ ∈ (0, λ_c]` of the hyperbolic triangulations.
//!
//! Everything is derived from `h ∈ (0, 1/4]`, the solution of
//! `λ = h / (1 + 8h)^{3/2}`. Writing `s = √(1 − 4h)`, the mean offspring of the
//! perimeter branching process is `m = (1 − s)/(1 + s)` and `b = −½ ln m`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::series::Series;

/// The critical parameter `λ_c = 1/(12√3)`.
pub const LAMBDA_C: f64 = 0.048_112_522_432_468_815;

/// Distance to `λ_c` below which the critical closed forms are used.
pub const CRITICAL_TOLERANCE: f64 = 1e-13;

/// Default truncation order for series extraction.
pub const DEFAULT_SERIES_ORDER: usize = 512;

/// Above this index weights are evaluated in log-space.
const LOG_SPACE_THRESHOLD: u64 = 300;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("lambda = {0} is outside (0, λ_c]")]
    LambdaOutOfRange(f64),
    #[error("h = {0} is outside (0, 1/4]")]
    HOutOfRange(f64),
    #[error("m = {0} is outside (0, 1]")]
    MOutOfRange(f64),
    #[error("x = {x} is outside the domain [0, {max}] of {what}")]
    Domain { what: &'static str, x: f64, max: f64 },
    #[error("series tail {tail:e} exceeds the tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },
}

/// `λ` together with the derived constants `h`, `m`, `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub h: f64,
    pub m: f64,
    pub b: f64,
    pub is_critical: bool,
}

/// Solve `h/(1+8h)^{3/2} = λ` for `h ∈ (0, 1/4]`.
///
/// The left-hand side is increasing on `(0, 1/4]`, so bisection is safe; a
/// final Newton step polishes the root when the derivative is not tiny.
pub fn solve_h(lambda: f64) -> Result<f64, ModelError> {
    if !(lambda > 0.0) || lambda > LAMBDA_C + 1e-15 {
        return Err(ModelError::LambdaOutOfRange(lambda));
    }
    if (lambda - LAMBDA_C).abs() < CRITICAL_TOLERANCE {
        return Ok(0.25);
    }
    let f = |h: f64| h / (1.0 + 8.0 * h).powf(1.5) - lambda;
    let (mut lo, mut hi) = (0.0_f64, 0.25_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let mut h = 0.5 * (lo + hi);
    let deriv = (1.0 - 4.0 * h) / (1.0 + 8.0 * h).powf(2.5);
    if deriv > 1e-6 {
        let polished = h - f(h) / deriv;
        if polished > 0.0 && polished <= 0.25 && f(polished).abs() <= f(h).abs() {
            h = polished;
        }
    }
    Ok(h)
}

impl ModelParams {
    pub fn from_lambda(lambda: f64) -> Result<Self, ModelError> {
        let h = solve_h(lambda)?;
        let mut p = Self::from_h(h)?;
        if !p.is_critical {
            p.lambda = lambda;
        }
        Ok(p)
    }

    pub fn from_h(h: f64) -> Result<Self, ModelError> {
        if !(h > 0.0) || h > 0.25 {
            return Err(ModelError::HOutOfRange(h));
        }
        let lambda = h / (1.0 + 8.0 * h).powf(1.5);
        let is_critical = h == 0.25 || (lambda - LAMBDA_C).abs() < CRITICAL_TOLERANCE;
        if is_critical {
            return Ok(ModelParams {
                lambda: LAMBDA_C,
                h: 0.25,
                m: 1.0,
                b: 0.0,
                is_critical,
            });
        }
        let s = (1.0 - 4.0 * h).sqrt();
        let m = 4.0 * h / ((1.0 + s) * (1.0 + s));
        let b = (1.0 / (4.0 * h).sqrt()).acosh();
        Ok(ModelParams {
            lambda,
            h,
            m,
            b,
            is_critical,
        })
    }

    pub fn from_m(m: f64) -> Result<Self, ModelError> {
        if !(m > 0.0) || m > 1.0 {
            return Err(ModelError::MOutOfRange(m));
        }
        let s = (1.0 - m) / (1.0 + m);
        Self::from_h((1.0 - s * s) / 4.0)
    }

    pub fn critical() -> Self {
        Self::from_h(0.25).expect("h = 1/4 is valid")
    }

    /// `s = √(1 − 4h)`, zero at criticality.
    pub fn s(&self) -> f64 {
        if self.is_critical {
            0.0
        } else {
            (1.0 - 4.0 * self.h).sqrt()
        }
    }

    /// `8 + 1/h`, the exponential growth constant of the cone weights.
    pub fn alpha(&self) -> f64 {
        8.0 + 1.0 / self.h
    }

    // ----------------------------------------------------------------- disks

    /// `ln w_λ(p)`; valid for every `p ≥ 1`.
    pub fn ln_disk_weight(&self, p: u64) -> f64 {
        assert!(p >= 1, "perimeter must be positive");
        if p == 1 {
            return self.disk_weight(1).ln();
        }
        let h = self.h;
        let pf = p as f64;
        // (2p-5)!! = Γ(2p-3) / (2^{p-2} Γ(p-1)) for p ≥ 2.
        let ln_df = ln_gamma(2.0 * pf - 3.0) - (pf - 2.0) * std::f64::consts::LN_2 - ln_gamma(pf - 1.0);
        pf * (2.0 + 16.0 * h).ln() + ln_df - ln_gamma(pf + 1.0)
            + (((1.0 - 4.0 * h) * pf + 6.0 * h) / (4.0 * (1.0 + 8.0 * h).powf(1.5))).ln()
    }

    /// `w_λ(p) = Σ_n #T_{n,p} λ^n`, the partition function of triangulations of the p-gon.
    pub fn disk_weight(&self, p: u64) -> f64 {
        assert!(p >= 1, "perimeter must be positive");
        let h = self.h;
        if p == 1 {
            return 0.5 - (1.0 + 2.0 * h) / (2.0 * (1.0 + 8.0 * h).sqrt());
        }
        if p > LOG_SPACE_THRESHOLD {
            return self.ln_disk_weight(p).exp();
        }
        // Product form of (2+16h)^p (2p-5)!!/p!, kept balanced to avoid overflow.
        let mut v = (2.0 + 16.0 * h).powi(2) / 2.0; // p = 2: (2+16h)^2 * 1 / 2!
        for k in 3..=p {
            v *= (2.0 + 16.0 * h) * (2 * k - 5) as f64 / k as f64;
        }
        v * ((1.0 - 4.0 * h) * p as f64 + 6.0 * h) / (4.0 * (1.0 + 8.0 * h).powf(1.5))
    }

    /// `W_λ(x) = Σ_{p≥1} w_λ(p) x^p`, defined for `0 ≤ x ≤ 1/(4(1+8h))`.
    pub fn disk_generating(&self, x: f64) -> Result<f64, ModelError> {
        let h = self.h;
        let max = 1.0 / (4.0 * (1.0 + 8.0 * h));
        if !(0.0..=max * (1.0 + 1e-14)).contains(&x) {
            return Err(ModelError::Domain { what: "W_λ", x, max });
        }
        let root = (1.0 - 4.0 * (1.0 + 8.0 * h) * x).max(0.0).sqrt();
        Ok(0.5 * self.lambda * ((1.0 - (1.0 + 8.0 * h) / h * x) * root - 1.0 + x / self.lambda))
    }

    // ----------------------------------------------------------------- cones

    /// `A_p = Σ_{q<p} C(2q,q) h^q`.
    pub fn central_binomial_sum(&self, p: u64) -> f64 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for q in 0..p {
            sum += term;
            term *= 2.0 * (2 * q + 1) as f64 / (q + 1) as f64 * self.h;
        }
        sum
    }

    /// `ln c_λ(p)`.
    pub fn ln_cone_weight(&self, p: u64) -> f64 {
        assert!(p >= 1, "perimeter must be positive");
        -self.lambda.ln() + (p - 1) as f64 * self.alpha().ln() + self.central_binomial_sum(p).ln()
    }

    /// `c_λ(p) = λ^{-1} (8+1/h)^{p-1} Σ_{q<p} C(2q,q) h^q`.
    pub fn cone_weight(&self, p: u64) -> f64 {
        if p > LOG_SPACE_THRESHOLD {
            return self.ln_cone_weight(p).exp();
        }
        self.alpha().powi((p - 1) as i32) * self.central_binomial_sum(p) / self.lambda
    }

    /// `C_λ(x) = Σ c_λ(p) x^p`, defined for `0 ≤ x < h/(1+8h)`.
    pub fn cone_generating(&self, x: f64) -> Result<f64, ModelError> {
        let h = self.h;
        let max = h / (1.0 + 8.0 * h);
        if !(0.0..max).contains(&x) {
            return Err(ModelError::Domain { what: "C_λ", x, max });
        }
        let root = (1.0 - 4.0 * (1.0 + 8.0 * h) * x).sqrt();
        Ok(x / (self.lambda * (1.0 - (1.0 + 8.0 * h) / h * x) * root))
    }

    /// The constant `c(p)` of the large-volume asymptotics `#T_{n,p} ~ c(p) λ_c^{-n} n^{-5/2}`.
    /// Documentation only; never used for sampling.
    pub fn asymptotic_constant(p: u64) -> f64 {
        let pf = p as f64;
        let ln = (pf - 2.0) * 3f64.ln() + pf.ln() + ln_gamma(2.0 * pf + 1.0)
            - 2.0 * ln_gamma(pf + 1.0)
            - (4.0 * (2.0 * std::f64::consts::PI).sqrt()).ln();
        ln.exp()
    }

    // ---------------------------------------------------------- offspring θ

    /// `ln θ_λ(i)`.
    pub fn ln_theta(&self, i: u64) -> f64 {
        let h = self.h;
        -0.5 * (1.0 + 8.0 * h).ln() + i as f64 * (h / (1.0 + 8.0 * h)).ln() + self.ln_disk_weight(i + 2)
    }

    /// `θ_λ(i) = (1+8h)^{-1/2} (h/(1+8h))^i w_λ(i+2)`.
    pub fn theta(&self, i: u64) -> f64 {
        if i + 2 > LOG_SPACE_THRESHOLD {
            return self.ln_theta(i).exp();
        }
        let h = self.h;
        (h / (1.0 + 8.0 * h)).powi(i as i32) * self.disk_weight(i + 2) / (1.0 + 8.0 * h).sqrt()
    }

    /// Ratio `θ(i+1)/θ(i)`, exact to rounding for every `i`.
    pub fn theta_ratio(&self, i: u64) -> f64 {
        let h = self.h;
        let p = (i + 2) as f64;
        let a = 1.0 - 4.0 * h;
        h / (1.0 + 8.0 * h) * (2.0 + 16.0 * h) * (2.0 * p - 3.0) / (p + 1.0) * (a * (p + 1.0) + 6.0 * h)
            / (a * p + 6.0 * h)
    }

    /// Generating function `g_λ(x) = Σ θ(i) x^i`, written without cancellation
    /// as `(2(1+S) − 4h)/(1+S)²` with `S = √(1 − 4hx)`.
    pub fn g(&self, x: f64) -> f64 {
        let s = (1.0 - 4.0 * self.h * x).max(0.0).sqrt();
        (2.0 * (1.0 + s) - 4.0 * self.h) / ((1.0 + s) * (1.0 + s))
    }

    /// Derivative `g'_λ(x)` on `[0, 1]`.
    pub fn g_prime(&self, x: f64) -> f64 {
        let h = self.h;
        let s = (1.0 - 4.0 * h * x).max(0.0).sqrt();
        // g'(x) = 4h (1 − 4h + S) / (S (1+S)^3); at the critical point x = 1 the S cancels.
        let a = 1.0 - 4.0 * h;
        if s < 1e-300 {
            return if a == 0.0 { 4.0 * h } else { f64::INFINITY };
        }
        4.0 * h * (a + s) / (s * (1.0 + s).powi(3))
    }

    /// `g` applied to a power series (with constant term in `[0, 1]`).
    pub fn g_series(&self, x: &Series) -> Series {
        let n = x.order();
        let inner = (&Series::constant(1.0, n) - &x.scale(4.0 * self.h)).sqrt();
        let one_plus = inner.add_constant(1.0);
        let num = one_plus.scale(2.0).add_constant(-4.0 * self.h);
        let den = (&one_plus * &one_plus).recip();
        &num * &den
    }

    /// `1 − g^{∘r}(x)`, computed without cancellation.
    pub fn g_iter_complement(&self, r: u64, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        if r == 0 {
            return 1.0 - x;
        }
        if self.is_critical {
            let t = r as f64 + 1.0 / (1.0 - x).sqrt();
            return 1.0 / (t * t);
        }
        let h = self.h;
        let a = 1.0 - 4.0 * h;
        let arg = (a / (4.0 * h * (1.0 - x))).sqrt().asinh() + r as f64 * self.b;
        if arg > 300.0 {
            // sinh²(y) = e^{2y}/4 (1 − e^{-2y})²
            return a / h * (-2.0 * arg).exp();
        }
        let sh = arg.sinh();
        a / (4.0 * h * sh * sh)
    }

    /// Closed form of the iterate `g^{∘r}(x)`.
    pub fn g_iter(&self, r: u64, x: f64) -> f64 {
        if x >= 1.0 {
            return 1.0;
        }
        if r == 0 {
            return x;
        }
        1.0 - self.g_iter_complement(r, x)
    }

    /// Power series of `g^{∘r}` truncated at `order`.
    pub fn g_iter_series(&self, r: u64, order: usize) -> Series {
        let mut s = Series::x(order.max(1));
        for _ in 0..r {
            s = self.g_series(&s);
        }
        s
    }

    /// `(g^{∘r})'(0) = P_1(X(r) = 1)`, by the chain rule along the orbit of 0.
    pub fn g_iter_prime_at_zero(&self, r: u64) -> f64 {
        let mut d = 1.0;
        for k in 0..r {
            d *= self.g_prime(self.g_iter(k, 0.0));
        }
        d
    }

    // ------------------------------------------------ quasi-stationary measure

    /// `Π_λ(x) = Σ π_λ(p) x^p`.
    pub fn big_pi(&self, x: f64) -> f64 {
        if self.is_critical {
            return 2.0 * (1.0 / (1.0 - x).sqrt() - 1.0);
        }
        let s = self.s();
        let t = (1.0 - 4.0 * self.h * x).sqrt();
        let q = (s + 1.0) / (s + t);
        (1.0 - (1.0 - x) * q * q) / s
    }

    /// `Π'_λ(x)`.
    pub fn big_pi_prime(&self, x: f64) -> f64 {
        if self.is_critical {
            return (1.0 - x).powf(-1.5);
        }
        let s = self.s();
        let h = self.h;
        let t = (1.0 - 4.0 * h * x).sqrt();
        let a = (s + 1.0) * (s + 1.0);
        a / s * (1.0 / ((s + t) * (s + t)) - 4.0 * h * (1.0 - x) / (t * (s + t).powi(3)))
    }

    /// Power series of `Π_λ` to the given order.
    pub fn big_pi_series(&self, order: usize) -> Series {
        let n = order.max(2);
        let one = Series::constant(1.0, n);
        let x = Series::x(n);
        if self.is_critical {
            // 2((1-x)^{-1/2} - 1)
            let inv_sqrt = (&one - &x).sqrt().recip();
            return inv_sqrt.add_constant(-1.0).scale(2.0);
        }
        let s = self.s();
        let t = (&one - &x.scale(4.0 * self.h)).sqrt();
        let denom = t.add_constant(s);
        let q = denom.recip().scale(s + 1.0);
        let inner = &(&one - &x) * &(&q * &q);
        (&one - &inner).scale(1.0 / s)
    }

    /// `π_λ(p)`, extracted from the series of `Π_λ`.
    pub fn pi_coeff(&self, p: u64) -> f64 {
        assert!(p >= 1, "π is indexed from 1");
        self.big_pi_series(p as usize + 1).coeff(p as usize)
    }

    // ---------------------------------------------------------- geodesic tree

    /// `μ_λ(k) = m (1 − m)^{k−1}` for `k ≥ 1`, and `μ_λ(0) = 0`.
    pub fn mu(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        if self.is_critical {
            return if k == 1 { 1.0 } else { 0.0 };
        }
        self.m * (1.0 - self.m).powi((k - 1) as i32)
    }

    // ------------------------------------------------------ perimeter process

    /// `h_λ(p) = p^{-1} (8+1/h)^{-p} c_λ(p) = √(1+8h) A_p / p`.
    pub fn h_weight(&self, p: u64) -> f64 {
        assert!(p >= 1, "perimeter must be positive");
        (1.0 + 8.0 * self.h).sqrt() * self.central_binomial_sum(p) / p as f64
    }

    /// `P(|∂B_{r+steps}| = q | |∂B_r| = p) = h(q)/h(p) · P_q(X(steps) = p)`.
    pub fn perimeter_transition(&self, p: u64, q: u64, steps: u64) -> f64 {
        assert!(p >= 1 && q >= 1, "perimeters must be positive");
        if steps == 0 {
            return if p == q { 1.0 } else { 0.0 };
        }
        let series = self.g_iter_series(steps, p as usize + 1);
        self.h_weight(q) / self.h_weight(p) * series.powi(q).coeff(p as usize)
    }

    /// Row `q ↦ P(p → q in `steps` steps)` for `1 ≤ q ≤ qmax`, index `q − 1`.
    pub fn perimeter_transition_row(&self, p: u64, steps: u64, qmax: u64) -> Vec<f64> {
        if steps == 0 {
            return (1..=qmax).map(|q| if q == p { 1.0 } else { 0.0 }).collect();
        }
        let g = self.g_iter_series(steps, p as usize + 1);
        let hp = self.h_weight(p);
        let mut power = g.clone();
        let mut row = Vec::with_capacity(qmax as usize);
        for q in 1..=qmax {
            if q > 1 {
                power = &power * &g;
            }
            row.push(self.h_weight(q) / hp * power.coeff(p as usize));
        }
        row
    }

    /// Like [`perimeter_transition_row`](Self::perimeter_transition_row), but
    /// errors when the truncated mass misses 1 by more than `tol`.
    pub fn perimeter_transition_row_checked(
        &self,
        p: u64,
        steps: u64,
        qmax: u64,
        tol: f64,
    ) -> Result<Vec<f64>, ModelError> {
        let row = self.perimeter_transition_row(p, steps, qmax);
        let tail = (1.0 - row.iter().sum::<f64>()).abs();
        if tail > tol {
            return Err(ModelError::Truncation { tail, tol });
        }
        Ok(row)
    }

    // --------------------------------------------------- reverse trees τ⁰/τ¹

    /// `P(L_r = i, R_r = j)` exactly as displayed for the spine construction:
    /// `(x_r − x_{r−1})/(x_{r+1} − x_r) · θ(i+j+1) x_{r−1}^i x_r^j` with `x_k = g^{∘k}(0)`.
    pub fn lr_probability(&self, r: u64, i: u64, j: u64) -> f64 {
        assert!(r >= 1, "spine levels start at 1");
        let c = |k: u64| self.g_iter_complement(k, 0.0);
        let prefactor = (c(r - 1) - c(r)) / (c(r) - c(r + 1));
        let x_prev = self.g_iter(r - 1, 0.0);
        let x_cur = self.g_iter(r, 0.0);
        prefactor * self.theta(i + j + 1) * x_prev.powi(i as i32) * x_cur.powi(j as i32)
    }

    /// `E[L_r + R_r]` from the closed-form display.
    pub fn expected_lr(&self, r: u64) -> f64 {
        assert!(r >= 1, "spine levels start at 1");
        let x = |k: u64| self.g_iter(k, 0.0);
        let c = |k: u64| self.g_iter_complement(k, 0.0);
        let (xr, xp) = (x(r), x(r - 1));
        (xr * self.g_prime(xr) - xp * self.g_prime(xp)) / (c(r) - c(r + 1)) - 1.0
    }

    /// `Π_λ(θ_λ(0))`, the normalisation of the reverse-tree ball laws.
    pub fn pi_at_theta0(&self) -> f64 {
        self.big_pi(self.theta(0))
    }

    /// `m^{-r}` (one at criticality).
    pub fn m_pow_neg(&self, r: u64) -> f64 {
        if self.is_critical {
            1.0
        } else {
            (-(r as f64) * self.m.ln()).exp()
        }
    }

    /// `P(Y(r) = p)` for the number `Y(r)` of vertices of τ⁰ at reverse height `r`,
    /// given the precomputed `π(p)`.
    pub fn y_probability_with_pi(&self, r: u64, p: u64, pi_p: f64) -> f64 {
        let (ln_cur, step) = self.power_gap_terms(r);
        pi_p * self.m_pow_neg(r) / self.pi_at_theta0() * power_gap(p as f64, ln_cur, step)
    }

    /// `(ln x_r, ln(x_{r+1}/x_r))` from the complements `c_r = 1 − x_r`, both
    /// accurate even when `c_r` is far below machine precision. Feeds
    /// [`power_gap`].
    pub fn power_gap_terms(&self, r: u64) -> (f64, f64) {
        let c_cur = self.g_iter_complement(r, 0.0);
        let c_next = self.g_iter_complement(r + 1, 0.0);
        let ln_cur = (-c_cur).ln_1p();
        // At r = 0 (x_0 = 0) the ratio is undefined; carry ln x_1 instead.
        let step = if c_cur >= 1.0 {
            (-c_next).ln_1p()
        } else {
            ((c_cur - c_next) / (1.0 - c_cur)).ln_1p()
        };
        (ln_cur, step)
    }

    /// `P(Y(r) = p)`.
    pub fn y_probability(&self, r: u64, p: u64) -> f64 {
        self.y_probability_with_pi(r, p, self.pi_coeff(p))
    }

    /// `P(Y(0) = 1) = θ(0)/Π(θ(0))`.
    pub fn prob_y0_one(&self) -> f64 {
        self.theta(0) / self.pi_at_theta0()
    }

    /// `E[Y(0)] = θ(0) Π'(θ(0)) / Π(θ(0))`, the mean of the size-biasing factor
    /// relating the strips S¹ and S⁰.
    pub fn expected_y0(&self) -> f64 {
        let t0 = self.theta(0);
        t0 * self.big_pi_prime(t0) / self.big_pi(t0)
    }

    /// The alternative closed form `(θ(0)/θ(1)) · m / Π(θ(0))`, kept for comparison
    /// with [`expected_y0`](Self::expected_y0).
    pub fn expected_y0_ratio_form(&self) -> f64 {
        self.theta(0) / self.theta(1) * self.m / self.pi_at_theta0()
    }

    /// Weight of a τ⁰ ball with `p` top trees, radius `r` and the given
    /// offspring product `Π θ(c_v)`.
    pub fn tau0_ball_probability(&self, r: u64, p: u64, theta_product: f64) -> f64 {
        self.pi_coeff(p) * self.m_pow_neg(r) / self.pi_at_theta0() * theta_product
    }

    /// Weight of a τ¹ ball (exactly one vertex at reverse height 0).
    pub fn tau1_ball_probability(&self, r: u64, p: u64, theta_product: f64) -> f64 {
        self.pi_coeff(p) * self.m_pow_neg(r) / self.theta(0) * theta_product
    }

    /// Generating-function form of the block-decomposition identity:
    /// coefficients of `y Π'(y) / (1 − s Π(y))`, indexed from `p = 0`.
    pub fn block_identity_series(&self, order: usize) -> Series {
        let pi = self.big_pi_series(order + 1);
        let y_pi_prime = pi.derivative().truncate(order).shift_up(1);
        let denom = (&Series::constant(1.0, order) - &pi.truncate(order).scale(self.s())).recip();
        &y_pi_prime * &denom
    }

    /// Left-hand side of the block identity computed by explicit convolution:
    /// `Σ_ℓ s^{ℓ−1} Σ_{p_1+…+p_ℓ=p} p_1 Π π(p_j)`.
    pub fn block_identity_lhs(&self, pmax: usize) -> Vec<f64> {
        let pi: Vec<f64> = {
            let series = self.big_pi_series(pmax + 1);
            (0..=pmax).map(|k| series.coeff(k)).collect()
        };
        let s = self.s();
        // conv[ℓ][p] = Σ_{p_2+…+p_ℓ = p} Π π(p_j); start with ℓ = 1 (empty product).
        let mut rest = vec![0.0; pmax + 1];
        rest[0] = 1.0;
        let mut total = vec![0.0; pmax + 1];
        let mut weight = 1.0;
        for _ell in 1..=pmax {
            for p in 1..=pmax {
                let mut acc = 0.0;
                for p1 in 1..=p {
                    acc += p1 as f64 * pi[p1] * rest[p - p1];
                }
                total[p] += weight * acc;
            }
            // rest ← rest * Π
            let mut next = vec![0.0; pmax + 1];
            for a in 0..=pmax {
                if rest[a] == 0.0 {
                    continue;
                }
                for b in 1..=pmax - a {
                    next[a + b] += rest[a] * pi[b];
                }
            }
            rest = next;
            weight *= s;
        }
        total
    }
}

/// Exact double factorial `n!!` for `n ≥ -1`.
fn double_factorial(n: i64) -> BigUint {
    let mut acc = BigUint::one();
    let mut k = n;
    while k > 1 {
        acc *= BigUint::from(k as u64);
        k -= 2;
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `x_{r+1}^p − x_r^p = x_r^p (e^{p·step} − 1)` given `ln x_r` and
/// `step = ln(x_{r+1}/x_r)`. When `x_r = 0` (`ln_cur = −∞`), `step` is taken
/// to be `ln x_{r+1}` and the result is `x_{r+1}^p`.
pub fn power_gap(p: f64, ln_cur: f64, step: f64) -> f64 {
    if ln_cur == f64::NEG_INFINITY {
        return (p * step).exp();
    }
    (p * ln_cur).exp() * (p * step).exp_m1()
}

/// `#T_{n,p}`, the number of rooted triangulations of the p-gon with `n`
/// inner vertices, by the double-factorial formula in exact arithmetic.
///
/// Conventions: `(−1)!! = 1`, and `#T_{0,1} = 0` (the formula would otherwise
/// involve `(−3)!!`; there is no triangulation of the 1-gon without inner vertex).
pub fn count_triangulations(n: u64, p: u64) -> BigUint {
    assert!(p >= 1, "perimeter must be positive");
    let top = 2 * p as i64 + 3 * n as i64 - 5;
    if top < -1 {
        return BigUint::zero();
    }
    let num = BigUint::from(p) * factorial(2 * p) * BigUint::from(4u32).pow(n as u32) * double_factorial(top);
    let den = BigUint::from(4u32) * factorial(p).pow(2) * factorial(n) * double_factorial(2 * p as i64 + n as i64 - 1);
    debug_assert!((&num % &den).is_zero(), "enumeration formula must give an integer");
    num / den
}

/// Which family of coefficients a [`SeriesTable`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    DiskW,
    ConeC,
    Theta,
    Pi,
    Mu,
    CountTnp,
}

impl SeriesKind {
    /// Natural first index of the family.
    pub fn start(self) -> u64 {
        match self {
            SeriesKind::Theta | SeriesKind::CountTnp => 0,
            _ => 1,
        }
    }
}

/// Coefficients of a table: reals, or exact integers for the enumeration.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Real(Vec<f64>),
    Exact(Vec<BigUint>),
}

/// A table of nonnegative coefficients of one of the model's series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub kind: SeriesKind,
    pub start: u64,
    pub coefficients: Coefficients,
}

impl SeriesTable {
    /// Table of `len` coefficients. For [`SeriesKind::CountTnp`] the entries are
    /// `#T_{n,p}` for `n = 0..len` at the fixed perimeter `p` (default 1).
    pub fn build(params: &ModelParams, kind: SeriesKind, len: usize, perimeter: Option<u64>) -> Self {
        let start = kind.start();
        let idx = (start..start + len as u64).collect::<Vec<_>>();
        let coefficients = match kind {
            SeriesKind::DiskW => Coefficients::Real(idx.iter().map(|&p| params.disk_weight(p)).collect()),
            SeriesKind::ConeC => Coefficients::Real(idx.iter().map(|&p| params.cone_weight(p)).collect()),
            SeriesKind::Theta => Coefficients::Real(idx.iter().map(|&i| params.theta(i)).collect()),
            SeriesKind::Mu => Coefficients::Real(idx.iter().map(|&k| params.mu(k)).collect()),
            SeriesKind::Pi => {
                let s = params.big_pi_series(len + 1);
                Coefficients::Real(idx.iter().map(|&p| s.coeff(p as usize)).collect())
            }
            SeriesKind::CountTnp => {
                let p = perimeter.unwrap_or(1);
                Coefficients::Exact(idx.iter().map(|&n| count_triangulations(n, p)).collect())
            }
        };
        SeriesTable {
            kind,
            start,
            coefficients,
        }
    }

    pub fn len(&self) -> usize {
        match &self.coefficients {
            Coefficients::Real(v) => v.len(),
            Coefficients::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficient as `f64` (exact integers are rounded).
    pub fn value(&self, i: usize) -> f64 {
        match &self.coefficients {
            Coefficients::Real(v) => v[i],
            Coefficients::Exact(v) => v[i].to_f64().unwrap_or(f64::INFINITY),
        }
    }

    /// CSV dump with columns `index,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for i in 0..self.len() {
            let index = self.start + i as u64;
            match &self.coefficients {
                Coefficients::Real(v) => writeln!(out, "{index},{:.17e}", v[i]).unwrap(),
                Coefficients::Exact(v) => writeln!(out, "{index},{}", v[i]).unwrap(),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn lambda_c_constant_matches_expression() {
        assert!(close(LAMBDA_C, 1.0 / (12.0 * 3f64.sqrt()), 1e-16));
    }

    #[test]
    fn solve_h_examples() {
        assert_eq!(solve_h(LAMBDA_C).unwrap(), 0.25);
        let h = solve_h(2f64.powf(-1.5) / 8.0).unwrap();
        assert!((h - 0.125).abs() < 1e-14, "{h}");
        let tiny = 1e-9;
        let h = solve_h(tiny).unwrap();
        assert!((h / tiny - 1.0).abs() < 1e-7);
        assert!(solve_h(0.0).is_err());
        assert!(solve_h(LAMBDA_C * 1.001).is_err());
    }

    #[test]
    fn parameterisations_agree() {
        let a = ModelParams::from_h(0.125).unwrap();
        let b = ModelParams::from_lambda(a.lambda).unwrap();
        let c = ModelParams::from_m(a.m).unwrap();
        assert!(close(a.h, b.h, 1e-13) && close(a.h, c.h, 1e-13));
        // m = 3 − 2√2 at h = 1/8
        assert!(close(a.m, 0.171_572_875_253_809_9, 1e-14));
        assert!(close(a.b, -0.5 * a.m.ln(), 1e-14));
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(count_triangulations(0, 1), BigUint::zero());
        assert_eq!(count_triangulations(0, 2), BigUint::from(1u32));
        assert_eq!(count_triangulations(1, 1), BigUint::from(1u32));
        assert_eq!(count_triangulations(2, 1), BigUint::from(4u32));
        assert_eq!(count_triangulations(0, 3), BigUint::from(1u32));
    }

    #[test]
    fn disk_weight_examples() {
        let crit = ModelParams::critical();
        assert!(close(crit.disk_weight(1), 0.5 - 3f64.sqrt() / 4.0, 1e-15));
        for h in [0.03, 0.125, 0.2, 0.25] {
            let p = ModelParams::from_h(h).unwrap();
            assert!(close(p.disk_weight(2), (1.0 - h) * (1.0 + 8.0 * h).sqrt(), 1e-14));
            assert!(close(
                p.disk_weight(3),
                (1.0 + 8.0 * h).powf(1.5) * (1.0 - 2.0 * h),
                1e-14
            ));
            for q in [2, 5, 40, 299] {
                assert!(close(p.ln_disk_weight(q), p.disk_weight(q).ln(), 1e-12));
            }
        }
    }

    #[test]
    fn disk_weight_matches_enumeration_series() {
        let p = ModelParams::from_lambda(LAMBDA_C / 2.0).unwrap();
        let mut sum = 0.0;
        for n in 0..=40 {
            sum += count_triangulations(n, 1).to_f64().unwrap() * p.lambda.powi(n as i32);
        }
        assert!((sum - p.disk_weight(1)).abs() < 1e-10, "{sum} vs {}", p.disk_weight(1));
    }

    #[test]
    fn theta_low_order() {
        for h in [0.05, 0.125, 0.25] {
            let p = ModelParams::from_h(h).unwrap();
            assert!(close(p.theta(0), 1.0 - h, 1e-14));
            assert!(close(p.theta(1), h * (1.0 - 2.0 * h), 1e-14));
            assert!(close(p.g(1.0), 1.0, 1e-15));
            assert!(close(p.g(0.0), 1.0 - h, 1e-15));
            for i in 0..50 {
                assert!(close(p.theta(i + 1) / p.theta(i), p.theta_ratio(i), 1e-12));
            }
        }
    }

    #[test]
    fn mu_examples() {
        let p = ModelParams::from_h(0.125).unwrap();
        assert!(close(p.mu(2), 0.142_135_623_730_950_5, 1e-12));
        assert_eq!(ModelParams::critical().mu(1), 1.0);
    }

    #[test]
    fn g_iter_examples() {
        let crit = ModelParams::critical();
        assert!(close(crit.g_iter(1, 0.0), 0.75, 1e-15));
        let p = ModelParams::from_h(0.125).unwrap();
        assert!((p.g_iter(2, 0.0) - p.g(p.g(0.0))).abs() < 1e-12);
        assert_eq!(p.g_iter(0, 0.3), 0.3);
        assert_eq!(p.g_iter(7, 1.0), 1.0);
    }

    #[test]
    fn pi_examples() {
        let crit = ModelParams::critical();
        assert!(close(crit.pi_at_theta0(), 2.0, 1e-14));
        assert!(close(crit.pi_coeff(2), 0.75, 1e-14));
        assert!(close(crit.prob_y0_one(), 0.375, 1e-14));
        for h in [0.05, 0.125, 0.2] {
            let p = ModelParams::from_h(h).unwrap();
            assert!(close(p.pi_coeff(1), 1.0, 1e-13));
            let s = p.s();
            assert!(close(p.pi_at_theta0(), (1.0 - s) / (2.0 * h), 1e-12));
        }
    }

    #[test]
    fn cone_examples() {
        let p = ModelParams::from_h(0.125).unwrap();
        assert!(close(p.cone_weight(1), 1.0 / p.lambda, 1e-14));
        for q in 1..=50 {
            assert!(p.cone_weight(q) > 0.0);
        }
    }

    #[test]
    fn series_table_csv() {
        let p = ModelParams::from_h(0.125).unwrap();
        let t = SeriesTable::build(&p, SeriesKind::Theta, 4, None);
        let csv = t.to_csv();
        assert!(csv.starts_with("index,value\n0,"));
        assert_eq!(csv.lines().count(), 5);
        let c = SeriesTable::build(&p, SeriesKind::CountTnp, 3, Some(1));
        assert_eq!(c.to_csv(), "index,value\n0,0\n1,1\n2,4\n");
    }
}

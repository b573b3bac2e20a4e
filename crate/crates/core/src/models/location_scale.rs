//! N(mu, sigma^2) sample with mu | sigma^2 ~ N(mu0, tau0^2 sigma^2) and
//! sigma^-2 ~ gamma_rate(alpha0, beta0); T(x) = (xbar, s^2).

use crate::conflict::{tail_probability, PredictiveCurve};
use crate::error::{domain, Result};
use crate::models::{export_cells, GridAxis};
use crate::numerics::{f_ln_pdf, ln_gamma, reg_inc_gamma_p, reg_inc_gamma_q, student_t_ln_pdf, HALF_LN_2PI};
use crate::rb_core::ParamGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationScaleModel {
    pub n: u64,
    pub xbar: f64,
    pub s_sq: f64,
    pub mu0: f64,
    pub tau0_sq: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

/// Scale of the conditional prior predictive of xbar given s^2.
///
/// `Exact` is the scale of the t law obtained by integrating sigma^2 out:
/// (n tau^2 + 1)(2 beta0 + (n - 1) s^2) / (n nu). `Printed` is the variant
/// {tau^2 (n tau^2 + 1)(2 beta0 + (n - 1) s^2) + 1} / {n tau^2 nu}, which is the
/// one that reproduces the published tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleForm {
    Exact,
    Printed,
}

fn gamma_interval(shape: f64, rate: f64, lam_lo: f64, lam_hi: f64) -> Result<f64> {
    let x_lo = rate * lam_lo;
    let x_hi = rate * lam_hi;
    if x_lo >= shape {
        let q_hi = if x_hi.is_finite() { reg_inc_gamma_q(shape, x_hi)? } else { 0.0 };
        Ok(reg_inc_gamma_q(shape, x_lo)? - q_hi)
    } else {
        let p_hi = if x_hi.is_finite() { reg_inc_gamma_p(shape, x_hi)? } else { 1.0 };
        Ok(p_hi - reg_inc_gamma_p(shape, x_lo)?)
    }
}

impl LocationScaleModel {
    pub fn new(n: u64, xbar: f64, s_sq: f64, mu0: f64, tau0_sq: f64, alpha0: f64, beta0: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain("LocationScaleModel", "n must be at least 2"));
        }
        for (name, v) in [("s^2", s_sq), ("tau0^2", tau0_sq), ("alpha0", alpha0), ("beta0", beta0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain("LocationScaleModel", format!("{name} = {v} must be positive")));
            }
        }
        if !(xbar.is_finite() && mu0.is_finite()) {
            return Err(domain("LocationScaleModel", "xbar and mu0 must be finite"));
        }
        Ok(Self {
            n,
            xbar,
            s_sq,
            mu0,
            tau0_sq,
            alpha0,
            beta0,
        })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// beta(xbar, s^2), the posterior rate of sigma^-2.
    pub fn beta_post(&self) -> f64 {
        let n = self.nf();
        let d = self.xbar - self.mu0;
        self.beta0 + (n - 1.0) * self.s_sq / 2.0 + n * d * d / (2.0 * (n * self.tau0_sq + 1.0))
    }

    /// The prior predictive of s^2 is (beta / alpha) F(n - 1, 2 alpha).
    pub fn s2_curve_with(&self, alpha: f64, beta: f64) -> PredictiveCurve {
        PredictiveCurve::ScaledF {
            d1: self.nf() - 1.0,
            d2: 2.0 * alpha,
            scale: beta / alpha,
            observed: self.s_sq,
        }
    }

    pub fn s2_curve(&self) -> PredictiveCurve {
        self.s2_curve_with(self.alpha0, self.beta0)
    }

    /// ln density of s^2 at the observed value with gamma_rate(alpha, beta) on sigma^-2.
    pub fn ln_s2_density_with(&self, alpha: f64, beta: f64) -> f64 {
        let scale = beta / alpha;
        f_ln_pdf(self.nf() - 1.0, 2.0 * alpha, self.s_sq / scale) - scale.ln()
    }

    /// Ratio of s^2 predictive densities when the prior on sigma^-2 becomes gamma_rate(alpha1, beta1).
    pub fn s2_predictive_ratio(&self, alpha1: f64, beta1: f64) -> Result<f64> {
        for v in [alpha1, beta1] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain("s2_predictive_ratio", format!("{v} must be positive")));
            }
        }
        Ok((self.ln_s2_density_with(alpha1, beta1) - self.ln_s2_density_with(self.alpha0, self.beta0)).exp())
    }

    /// Tail probability checking the prior on sigma^2.
    pub fn tail_pi1(&self) -> Result<f64> {
        tail_probability(&self.s2_curve())
    }

    /// RB_1(s^2 | V(T(x))), the largest ratio for sigma^2 given s^2 alone.
    pub fn rb1_s2_max(&self) -> f64 {
        let (a, b) = (self.alpha0, self.beta0);
        let k = (self.nf() - 1.0) / 2.0;
        let ln = ln_gamma(a).expect("alpha0 > 0") - ln_gamma(a + k).expect("alpha0 > 0") - a * b.ln() - k
            - k * self.s_sq.ln()
            + (k + a) * (k * self.s_sq + b).ln();
        ln.exp()
    }

    /// Degrees of freedom of the conditional predictive of xbar.
    pub fn nu(&self) -> f64 {
        self.nf() + 2.0 * self.alpha0 - 1.0
    }

    pub fn sigma_tilde_sq(&self, tau_sq: f64, form: ScaleForm) -> f64 {
        let n = self.nf();
        let q = 2.0 * self.beta0 + (n - 1.0) * self.s_sq;
        match form {
            ScaleForm::Exact => (n * tau_sq + 1.0) * q / (n * self.nu()),
            ScaleForm::Printed => (tau_sq * (n * tau_sq + 1.0) * q + 1.0) / (n * tau_sq * self.nu()),
        }
    }

    /// Conditional prior predictive of xbar given s^2, mu0 + sigma~ t_nu.
    pub fn xbar_cond_curve(&self, mu: f64, tau_sq: f64, form: ScaleForm) -> PredictiveCurve {
        PredictiveCurve::StudentT {
            nu: self.nu(),
            loc: mu,
            scale: self.sigma_tilde_sq(tau_sq, form).sqrt(),
            observed: self.xbar,
        }
    }

    /// Tail probability checking the conditional prior on mu.
    pub fn tail_pi2(&self) -> Result<f64> {
        self.tail_pi2_with(ScaleForm::Printed)
    }

    pub fn tail_pi2_with(&self, form: ScaleForm) -> Result<f64> {
        tail_probability(&self.xbar_cond_curve(self.mu0, self.tau0_sq, form))
    }

    /// Ratio of conditional predictive densities of xbar when the conditional
    /// prior on mu becomes N(mu1, tau1^2 sigma^2).
    pub fn xbar_cond_predictive_ratio(&self, mu1: f64, tau1_sq: f64) -> Result<f64> {
        self.xbar_cond_predictive_ratio_with(mu1, tau1_sq, ScaleForm::Printed)
    }

    pub fn xbar_cond_predictive_ratio_with(&self, mu1: f64, tau1_sq: f64, form: ScaleForm) -> Result<f64> {
        if !(tau1_sq > 0.0 && tau1_sq.is_finite()) || !mu1.is_finite() {
            return Err(domain("xbar_cond_predictive_ratio", format!("tau1^2 = {tau1_sq}")));
        }
        let nu = self.nu();
        let s1 = self.sigma_tilde_sq(tau1_sq, form).sqrt();
        let s0 = self.sigma_tilde_sq(self.tau0_sq, form).sqrt();
        Ok((student_t_ln_pdf(nu, mu1, s1, self.xbar) - student_t_ln_pdf(nu, self.mu0, s0, self.xbar)).exp())
    }

    /// int RB((xbar, sigma^2) | x) Pi_1(d sigma^-2), the worst case over directions
    /// that keep the marginal prior of sigma^2.
    pub fn integrated_worst_case(&self) -> f64 {
        let n = self.nf();
        let v = self.beta0 + (n - 1.0) * self.s_sq / 2.0;
        (0.5 * (n * self.tau0_sq + 1.0).ln() + (self.alpha0 + n / 2.0) * (self.beta_post() / v).ln()).exp()
    }

    /// RB((xbar, sigma^2) | x), the largest ratio over mu at a fixed sigma^2.
    pub fn rb_joint(&self, sigma_sq: f64) -> Result<f64> {
        if !(sigma_sq > 0.0) {
            return Err(domain("rb_joint", format!("sigma^2 = {sigma_sq}")));
        }
        if sigma_sq.is_infinite() {
            return Ok(0.0);
        }
        let n = self.nf();
        let a = self.alpha0;
        let ln = 0.5 * (n * self.tau0_sq + 1.0).ln() - a * self.beta0.ln() + ln_gamma(a)? - ln_gamma(a + n / 2.0)?
            + (a + n / 2.0) * self.beta_post().ln()
            - n / 2.0 * sigma_sq.ln()
            - (n - 1.0) * self.s_sq / (2.0 * sigma_sq);
        Ok(ln.exp())
    }

    /// ln of the prior predictive density of (xbar, s^2) under the prior with
    /// hyperparameters (mu, tau^2, alpha, beta).
    pub fn ln_joint_predictive_with(&self, mu: f64, tau_sq: f64, alpha: f64, beta: f64) -> Result<f64> {
        let n = self.nf();
        let c = (n * tau_sq + 1.0) / n;
        let k = (n - 1.0) / 2.0;
        let d = self.xbar - mu;
        let b_star = beta + (n - 1.0) * self.s_sq / 2.0 + d * d / (2.0 * c);
        Ok(-HALF_LN_2PI - 0.5 * c.ln() + k * ((n - 1.0) / 2.0).ln() + (k - 1.0) * self.s_sq.ln() - ln_gamma(k)?
            + alpha * beta.ln()
            - ln_gamma(alpha)?
            + ln_gamma(alpha + n / 2.0)?
            - (alpha + n / 2.0) * b_star.ln())
    }

    /// ln of the exact conditional predictive density of xbar given s^2.
    pub fn ln_xbar_cond_density_with(&self, mu: f64, tau_sq: f64, alpha: f64, beta: f64) -> f64 {
        let n = self.nf();
        let nu = n + 2.0 * alpha - 1.0;
        let scale_sq = (n * tau_sq + 1.0) * (2.0 * beta + (n - 1.0) * self.s_sq) / (n * nu);
        student_t_ln_pdf(nu, mu, scale_sq.sqrt(), self.xbar)
    }

    /// Discretizes sigma^2 on `axis` using s^2 alone: m(x | cell) is the average
    /// density of s^2 over the cell.
    pub fn grid_export(&self, axis: &GridAxis) -> Result<(ParamGrid, Vec<f64>)> {
        if axis.lo < 0.0 {
            return Err(domain("grid_export", "sigma^2 axis must be nonnegative"));
        }
        let k = (self.nf() - 1.0) / 2.0;
        let (a, b) = (self.alpha0, self.beta0);
        let (ap, bp) = (a + k, b + k * self.s_sq);
        let e = axis.edges();
        let mut prior = Vec::with_capacity(axis.cells);
        let mut post = Vec::with_capacity(axis.cells);
        for w in e.windows(2) {
            // sigma^2 in [w0, w1] iff sigma^-2 in [1/w1, 1/w0]
            let lam_lo = 1.0 / w[1];
            let lam_hi = if w[0] == 0.0 { f64::INFINITY } else { 1.0 / w[0] };
            prior.push(gamma_interval(a, b, lam_lo, lam_hi)?);
            post.push(gamma_interval(ap, bp, lam_lo, lam_hi)?);
        }
        export_cells(axis.midpoints(), prior, post, self.ln_s2_density_with(a, b).exp())
    }
}

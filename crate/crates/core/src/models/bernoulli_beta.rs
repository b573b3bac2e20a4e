//! Bernoulli(theta) sample with a beta(alpha0, beta0) prior; T(x) = number of successes.

use crate::conflict::{tail_probability, PredictiveCurve};
use crate::error::{domain, Result};
use crate::models::{export_cells, GridAxis};
use crate::numerics::{ln_beta, ln_choose, reg_inc_beta, xlogy};
use crate::rb_core::ParamGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliBetaModel {
    pub n: u64,
    pub t: u64,
    pub alpha0: f64,
    pub beta0: f64,
}

fn beta_interval(a: f64, b: f64, lo: f64, hi: f64) -> Result<f64> {
    // upper tails when the interval sits above the mean keep the digits
    if lo >= a / (a + b) {
        Ok(reg_inc_beta(b, a, 1.0 - lo)? - reg_inc_beta(b, a, 1.0 - hi)?)
    } else {
        Ok(reg_inc_beta(a, b, hi)? - reg_inc_beta(a, b, lo)?)
    }
}

impl BernoulliBetaModel {
    pub fn new(n: u64, t: u64, alpha0: f64, beta0: f64) -> Result<Self> {
        if n == 0 || t > n {
            return Err(domain("BernoulliBetaModel", format!("t = {t}, n = {n}")));
        }
        for v in [alpha0, beta0] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain("BernoulliBetaModel", format!("shape {v} must be positive")));
            }
        }
        Ok(Self { n, t, alpha0, beta0 })
    }

    /// ln m_T(t) under a beta(alpha, beta) prior.
    pub fn beta_binomial_lpmf_with(&self, t: u64, alpha: f64, beta: f64) -> Result<f64> {
        if t > self.n {
            return Err(domain("beta_binomial_lpmf", format!("t = {t} > n = {}", self.n)));
        }
        let (n, tf) = (self.n as f64, t as f64);
        Ok(ln_choose(self.n, t) + ln_beta(tf + alpha, n - tf + beta)? - ln_beta(alpha, beta)?)
    }

    /// ln m_T(t) under the base prior.
    pub fn beta_binomial_lpmf(&self, t: u64) -> Result<f64> {
        self.beta_binomial_lpmf_with(t, self.alpha0, self.beta0)
    }

    pub fn pmf(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| self.beta_binomial_lpmf(k).expect("k in range").exp())
            .collect()
    }

    pub fn predictive_curve(&self) -> PredictiveCurve {
        PredictiveCurve::Discrete {
            support: (0..=self.n).map(|k| k as f64).collect(),
            mass: self.pmf(),
            observed: self.t as f64,
        }
    }

    pub fn tail_probability(&self) -> Result<f64> {
        tail_probability(&self.predictive_curve())
    }

    /// m_Q(x) / m(x) for Q = beta(alpha1, beta1).
    pub fn beta_ratio_direction(&self, alpha1: f64, beta1: f64) -> Result<f64> {
        for v in [alpha1, beta1] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain("beta_ratio_direction", format!("shape {v} must be positive")));
            }
        }
        Ok((self.beta_binomial_lpmf_with(self.t, alpha1, beta1)? - self.beta_binomial_lpmf(self.t)?).exp())
    }

    /// sup over Q, attained by the point mass at theta = t / n.
    pub fn sup_ratio(&self) -> f64 {
        let (n, t) = (self.n as f64, self.t as f64);
        let xb = t / n;
        let ln_lik = ln_choose(self.n, self.t) + xlogy(t, xb) + xlogy(n - t, 1.0 - xb);
        (ln_lik - self.beta_binomial_lpmf(self.t).expect("t in range")).exp()
    }

    /// Discretizes theta on `axis` (inside [0, 1]).
    pub fn grid_export(&self, axis: &GridAxis) -> Result<(ParamGrid, Vec<f64>)> {
        if axis.lo < 0.0 || axis.hi > 1.0 {
            return Err(domain("grid_export", "theta axis must lie in [0, 1]"));
        }
        let (a, b) = (self.alpha0, self.beta0);
        let (ap, bp) = (a + self.t as f64, b + (self.n - self.t) as f64);
        let e = axis.edges();
        let mut prior = Vec::with_capacity(axis.cells);
        let mut post = Vec::with_capacity(axis.cells);
        for w in e.windows(2) {
            prior.push(beta_interval(a, b, w[0], w[1])?);
            post.push(beta_interval(ap, bp, w[0], w[1])?);
        }
        export_cells(axis.midpoints(), prior, post, self.beta_binomial_lpmf(self.t)?.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_single_trial() {
        let m = BernoulliBetaModel::new(1, 0, 1.0, 1.0).unwrap();
        let p = m.pmf();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pmf_sums_to_one() {
        let m = BernoulliBetaModel::new(20, 3, 5.0, 20.0).unwrap();
        assert!((m.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m.beta_binomial_lpmf(21).is_err());
        assert!(BernoulliBetaModel::new(20, 21, 5.0, 20.0).is_err());
    }

    #[test]
    fn base_direction_and_sup() {
        let m = BernoulliBetaModel::new(20, 17, 5.0, 20.0).unwrap();
        assert_eq!(m.beta_ratio_direction(5.0, 20.0).unwrap(), 1.0);
        for (a, b) in [(20.0, 5.0), (1.0, 5.0), (5.0, 1.0), (0.3, 0.3)] {
            assert!(m.beta_ratio_direction(a, b).unwrap() <= m.sup_ratio());
        }
        // boundary counts use 0 ln 0 = 0
        let edge = BernoulliBetaModel::new(10, 10, 2.0, 2.0).unwrap();
        let want = (-edge.beta_binomial_lpmf(10).unwrap()).exp();
        assert!((edge.sup_ratio() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn grid_export_matches_sup() {
        let m = BernoulliBetaModel::new(20, 17, 5.0, 20.0).unwrap();
        let (g, c) = m.grid_export(&GridAxis::new(0.0, 1.0, 2000).unwrap()).unwrap();
        let s = crate::rb_core::build_belief_state(g, c).unwrap();
        assert!(((s.max_rb() - m.sup_ratio()) / m.sup_ratio()).abs() < 0.01);
    }
}

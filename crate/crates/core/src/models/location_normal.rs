//! N(mu, 1) sample with a N(mu0, sigma0^2) prior on mu; T(x) = xbar.

use crate::conflict::{tail_probability, PredictiveCurve};
use crate::error::{domain, Result};
use crate::models::{export_cells, GridAxis};
use crate::numerics::{normal_cdf, normal_ln_pdf};
use crate::rb_core::ParamGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationNormalModel {
    pub n: u64,
    pub xbar: f64,
    pub mu0: f64,
    pub sigma0_sq: f64,
}

/// P(a < N(mean, sd^2) < b), taking differences on the side that avoids cancellation.
pub(crate) fn normal_interval(a: f64, b: f64, mean: f64, sd: f64) -> f64 {
    let za = (a - mean) / sd;
    let zb = (b - mean) / sd;
    if za >= 0.0 {
        normal_cdf(-za) - normal_cdf(-zb)
    } else {
        normal_cdf(zb) - normal_cdf(za)
    }
}

impl LocationNormalModel {
    pub fn new(n: u64, xbar: f64, mu0: f64, sigma0_sq: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("LocationNormalModel", "n must be at least 1"));
        }
        if !(sigma0_sq > 0.0 && sigma0_sq.is_finite()) || !xbar.is_finite() || !mu0.is_finite() {
            return Err(domain("LocationNormalModel", format!("sigma0^2 = {sigma0_sq}")));
        }
        Ok(Self { n, xbar, mu0, sigma0_sq })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Variance of xbar under the prior predictive with prior variance `s_sq`.
    fn predictive_var(&self, s_sq: f64) -> f64 {
        1.0 / self.nf() + s_sq
    }

    /// ln m_T(xbar).
    pub fn ln_prior_predictive(&self) -> f64 {
        normal_ln_pdf(self.xbar, self.mu0, self.predictive_var(self.sigma0_sq))
    }

    /// ln of m_{Q,T}(xbar) / m_T(xbar) for Q = N(mu1, sigma1^2); sigma1^2 = 0 is
    /// the point mass at mu1.
    pub fn ln_ratio_direction(&self, mu1: f64, sigma1_sq: f64) -> Result<f64> {
        if !(sigma1_sq >= 0.0 && sigma1_sq.is_finite()) || !mu1.is_finite() {
            return Err(domain("ln_ratio_direction", format!("sigma1^2 = {sigma1_sq}")));
        }
        let v0 = self.predictive_var(self.sigma0_sq);
        let v1 = self.predictive_var(sigma1_sq);
        let d0 = self.xbar - self.mu0;
        let d1 = self.xbar - mu1;
        Ok(0.5 * (v0 / v1).ln() - 0.5 * (d1 * d1 / v1 - d0 * d0 / v0))
    }

    pub fn ratio_direction(&self, mu1: f64, sigma1_sq: f64) -> Result<f64> {
        Ok(self.ln_ratio_direction(mu1, sigma1_sq)?.exp())
    }

    /// sup over Q of the ratio, attained by the point mass at xbar.
    pub fn sup_ratio(&self) -> f64 {
        self.ln_ratio_direction(self.xbar, 0.0)
            .expect("point mass direction is always valid")
            .exp()
    }

    pub fn predictive_curve(&self) -> PredictiveCurve {
        PredictiveCurve::Normal {
            mean: self.mu0,
            var: self.predictive_var(self.sigma0_sq),
            observed: self.xbar,
        }
    }

    pub fn tail_probability(&self) -> Result<f64> {
        tail_probability(&self.predictive_curve())
    }

    /// Posterior mean and variance of mu.
    pub fn posterior(&self) -> (f64, f64) {
        let prec = self.nf() + 1.0 / self.sigma0_sq;
        ((self.nf() * self.xbar + self.mu0 / self.sigma0_sq) / prec, 1.0 / prec)
    }

    /// Discretizes mu on `axis`: exact prior and posterior cell masses, with
    /// m(x | cell) the prior-weighted average likelihood over the cell.
    pub fn grid_export(&self, axis: &GridAxis) -> Result<(ParamGrid, Vec<f64>)> {
        let e = axis.edges();
        let sd0 = self.sigma0_sq.sqrt();
        let (pm, pv) = self.posterior();
        let psd = pv.sqrt();
        let prior = e.windows(2).map(|w| normal_interval(w[0], w[1], self.mu0, sd0)).collect();
        let post = e.windows(2).map(|w| normal_interval(w[0], w[1], pm, psd)).collect();
        export_cells(axis.midpoints(), prior, post, self.ln_prior_predictive().exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_real_line;

    fn no_conflict() -> LocationNormalModel {
        LocationNormalModel::new(20, 0.2591, 0.5, 1.0).unwrap()
    }

    #[test]
    fn base_direction_is_one() {
        let m = no_conflict();
        assert_eq!(m.ratio_direction(0.5, 1.0).unwrap(), 1.0);
        assert!(m.ratio_direction(0.0, -1.0).is_err());
    }

    #[test]
    fn ratio_matches_quadrature_of_likelihood() {
        // m_Q(xbar) = int N(xbar; mu, 1/n) N(mu; mu1, s1) dmu
        let m = no_conflict();
        let lik = |mu: f64| normal_ln_pdf(m.xbar, mu, 1.0 / 20.0).exp();
        let mq = |mu1: f64, s1: f64| {
            integrate_real_line(|mu| lik(mu) * normal_ln_pdf(mu, mu1, s1).exp(), mu1, 1e-14).unwrap()
        };
        let base = mq(0.5, 1.0);
        for (mu1, s1) in [(-3.0, 1.0), (1.0, 1.0), (0.5, 0.5), (0.5, 50.0)] {
            let oracle = mq(mu1, s1) / base;
            let got = m.ratio_direction(mu1, s1).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-9, "({mu1},{s1}): {got} vs {oracle}");
        }
    }

    #[test]
    fn no_update_limit() {
        // xbar = mu0 and a tiny prior variance: sup -> sqrt(1 + n sigma0^2) -> 1
        let m = LocationNormalModel::new(20, 0.5, 0.5, 1e-12).unwrap();
        assert!((m.sup_ratio() - (1.0 + 20.0 * 1e-12f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_export_tracks_closed_forms() {
        let m = no_conflict();
        let (g, c) = m.grid_export(&GridAxis::new(-6.0, 7.0, 2600).unwrap()).unwrap();
        let s = crate::rb_core::build_belief_state(g, c).unwrap();
        let est = crate::rb_core::rb_estimate(&s);
        let w = 13.0 / 2600.0;
        let mid = match s.grid().label(est) {
            crate::rb_core::Label::Value(v) => *v,
            _ => unreachable!(),
        };
        // the ratio peaks at the maximum likelihood value xbar
        assert!((mid - m.xbar).abs() <= w, "{mid}");
        // the posterior mass peaks at the shrunk posterior mean
        let map = crate::numerics::argmax_first(s.posterior_mass()).unwrap();
        let (pm, _) = m.posterior();
        let map_mid = match s.grid().label(map) {
            crate::rb_core::Label::Value(v) => *v,
            _ => unreachable!(),
        };
        assert!((map_mid - pm).abs() <= w);
        let sup = m.sup_ratio();
        assert!(((s.max_rb() - sup) / sup).abs() < 0.01);
    }
}

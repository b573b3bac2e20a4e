//! Prior-data conflict: tail probabilities of the prior predictive at the
//! observed statistic and the worst-case sensitivity ratios tied to them.

use crate::error::{domain, Error, Result};
use crate::numerics::quadrature::{integrate, integrate_real_line, integrate_to_infinity};
use crate::numerics::{f_cdf, f_ln_pdf, f_sf, normal_ln_pdf, normal_two_sided_tail, student_t_ln_pdf,
    student_t_two_sided_tail};
use crate::rb_core::BeliefState;

/// Prior predictive distribution of a statistic together with its observed value.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictiveCurve {
    /// Finite support; `observed` must be one of the support points.
    Discrete {
        support: Vec<f64>,
        mass: Vec<f64>,
        observed: f64,
    },
    Normal {
        mean: f64,
        var: f64,
        observed: f64,
    },
    /// loc + scale * t_nu
    StudentT {
        nu: f64,
        loc: f64,
        scale: f64,
        observed: f64,
    },
    /// scale * F(d1, d2)
    ScaledF {
        d1: f64,
        d2: f64,
        scale: f64,
        observed: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    WholePrior,
    MarginalPi1,
    ConditionalPi2,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::WholePrior => "whole-prior",
            Component::MarginalPi1 => "marginal-pi1",
            Component::ConditionalPi2 => "conditional-pi2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConflictReport {
    pub tail_probability: f64,
    pub worst_case_ratio: f64,
    pub component: Component,
}

fn positive(func: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("{name} = {v} must be positive")))
    }
}

impl PredictiveCurve {
    fn check(&self) -> Result<()> {
        match *self {
            PredictiveCurve::Discrete {
                ref support,
                ref mass,
                observed,
            } => {
                if support.is_empty() {
                    return Err(Error::EmptyInput);
                }
                if support.len() != mass.len() {
                    return Err(Error::LengthMismatch {
                        expected: support.len(),
                        found: mass.len(),
                    });
                }
                for (i, &m) in mass.iter().enumerate() {
                    if m.is_nan() || support[i].is_nan() {
                        return Err(Error::NanInput(i));
                    }
                    if m < 0.0 {
                        return Err(domain("tail_probability", format!("negative mass at {i}")));
                    }
                }
                if observed.is_nan() {
                    return Err(Error::NanInput(0));
                }
                Ok(())
            }
            PredictiveCurve::Normal { mean, var, observed } => {
                positive("tail_probability", "var", var)?;
                if !(mean.is_finite() && observed.is_finite()) {
                    return Err(Error::OutOfSupport(observed));
                }
                Ok(())
            }
            PredictiveCurve::StudentT {
                nu,
                loc,
                scale,
                observed,
            } => {
                positive("tail_probability", "nu", nu)?;
                positive("tail_probability", "scale", scale)?;
                if !(loc.is_finite() && observed.is_finite()) {
                    return Err(Error::OutOfSupport(observed));
                }
                Ok(())
            }
            PredictiveCurve::ScaledF {
                d1,
                d2,
                scale,
                observed,
            } => {
                positive("tail_probability", "d1", d1)?;
                positive("tail_probability", "d2", d2)?;
                positive("tail_probability", "scale", scale)?;
                if !(observed > 0.0 && observed.is_finite()) {
                    return Err(Error::OutOfSupport(observed));
                }
                Ok(())
            }
        }
    }

    pub fn observed(&self) -> f64 {
        match *self {
            PredictiveCurve::Discrete { observed, .. }
            | PredictiveCurve::Normal { observed, .. }
            | PredictiveCurve::StudentT { observed, .. }
            | PredictiveCurve::ScaledF { observed, .. } => observed,
        }
    }

    /// Log density (continuous) or log mass (discrete) at `x`.
    pub fn ln_density(&self, x: f64) -> f64 {
        match *self {
            PredictiveCurve::Discrete {
                ref support, ref mass, ..
            } => support
                .iter()
                .position(|&s| s == x)
                .map_or(f64::NEG_INFINITY, |i| mass[i].ln()),
            PredictiveCurve::Normal { mean, var, .. } => normal_ln_pdf(x, mean, var),
            PredictiveCurve::StudentT { nu, loc, scale, .. } => student_t_ln_pdf(nu, loc, scale, x),
            PredictiveCurve::ScaledF { d1, d2, scale, .. } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f_ln_pdf(d1, d2, x / scale) - scale.ln()
                }
            }
        }
    }

    /// Checks that the masses sum to one (within 1e-10) or that the density
    /// integrates to one (within 1e-8, by adaptive quadrature).
    pub fn validate(&self) -> Result<()> {
        self.check()?;
        let total = match *self {
            PredictiveCurve::Discrete { ref mass, .. } => {
                let t: f64 = mass.iter().sum();
                if (t - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidGrid(format!("predictive masses sum to {t}")));
                }
                return Ok(());
            }
            PredictiveCurve::Normal { mean, .. } => integrate_real_line(|x| self.ln_density(x).exp(), mean, 1e-11)?,
            PredictiveCurve::StudentT { loc, .. } => integrate_real_line(|x| self.ln_density(x).exp(), loc, 1e-11)?,
            PredictiveCurve::ScaledF { scale, .. } => {
                // split at the scale so the substitution sees the bulk
                integrate(|x| self.ln_density(x).exp(), 0.0, scale, 1e-12)?
                    + integrate_to_infinity(|x| self.ln_density(x).exp(), scale, 1e-12)?
            }
        };
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Numeric(format!("predictive density integrates to {total}")));
        }
        Ok(())
    }
}

/// Bisection for the point in (lo, hi) where `ln_f` crosses `level`, with `ln_f`
/// above the level at `inside` and below it at `outside`.
fn crossing<F: Fn(f64) -> f64>(ln_f: F, level: f64, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if ln_f(mid) >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

fn scaled_f_tail(d1: f64, d2: f64, scale: f64, observed: f64) -> Result<f64> {
    let u = observed / scale;
    let ln_f = |x: f64| f_ln_pdf(d1, d2, x);
    if d1 <= 2.0 {
        // density decreasing on (0, inf): the set is the upper tail
        return f_sf(d1, d2, u);
    }
    let mode = (d1 - 2.0) / d1 * d2 / (d2 + 2.0);
    if u == mode {
        return Ok(1.0);
    }
    let level = ln_f(u);
    if u < mode {
        let mut far = 2.0 * mode.max(u);
        while ln_f(far) >= level {
            far *= 2.0;
            if !far.is_finite() {
                return Err(Error::Numeric("no density crossing above the mode".into()));
            }
        }
        let hi = crossing(ln_f, level, mode, far);
        Ok(f_cdf(d1, d2, u)? + f_sf(d1, d2, hi)?)
    } else {
        // the density tends to 0 at the origin when d1 > 2
        let lo = crossing(ln_f, level, mode, 0.0);
        Ok(f_cdf(d1, d2, lo)? + f_sf(d1, d2, u)?)
    }
}

/// Prior predictive probability of a density value no larger than the observed one.
pub fn tail_probability(curve: &PredictiveCurve) -> Result<f64> {
    curve.check()?;
    let p = match *curve {
        PredictiveCurve::Discrete {
            ref support,
            ref mass,
            observed,
        } => {
            let k = support
                .iter()
                .position(|&s| s == observed)
                .ok_or(Error::OutOfSupport(observed))?;
            let m0 = mass[k];
            mass.iter().filter(|&&m| m <= m0).sum()
        }
        PredictiveCurve::Normal { mean, var, observed } => normal_two_sided_tail((observed - mean) / var.sqrt()),
        PredictiveCurve::StudentT {
            nu,
            loc,
            scale,
            observed,
        } => student_t_two_sided_tail(nu, (observed - loc) / scale)?,
        PredictiveCurve::ScaledF {
            d1,
            d2,
            scale,
            observed,
        } => scaled_f_tail(d1, d2, scale, observed)?,
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Tail probability checking the marginal prior pi_1 through the predictive of V(T).
pub fn hierarchical_tail_pi1(curve_v: &PredictiveCurve) -> Result<f64> {
    tail_probability(curve_v)
}

/// Tail probability checking the conditional prior pi_2 through the
/// predictive of T given the observed V(T).
pub fn hierarchical_tail_pi2(curve_t_given_v: &PredictiveCurve) -> Result<f64> {
    tail_probability(curve_t_given_v)
}

/// sup_Q m_Q(x) / m(x), attained by a point mass at the largest ratio.
pub fn worst_case_ratio(state: &BeliefState) -> f64 {
    state.max_rb()
}

pub fn conflict_report(curve: &PredictiveCurve, worst_case_ratio: f64, component: Component) -> Result<ConflictReport> {
    Ok(ConflictReport {
        tail_probability: tail_probability(curve)?,
        worst_case_ratio,
        component,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Factorization {
    /// Whether the residual is within `rel` of the left side.
    pub fn holds(&self, rel: f64) -> bool {
        self.residual <= rel * self.lhs.abs()
    }
}

/// Joint ratio against the product of the conditional and marginal ratios.
pub fn factorization_ratio(
    joint_num: f64,
    joint_den: f64,
    cond_num: f64,
    cond_den: f64,
    marg_num: f64,
    marg_den: f64,
) -> Result<Factorization> {
    for (name, v) in [("joint", joint_den), ("conditional", cond_den), ("marginal", marg_den)] {
        if !(v > 0.0) {
            return Err(domain("factorization_ratio", format!("{name} denominator {v}")));
        }
    }
    let lhs = joint_num / joint_den;
    let rhs = (cond_num / cond_den) * (marg_num / marg_den);
    Ok(Factorization {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

fn group_count(state: &BeliefState, groups: &[usize]) -> Result<usize> {
    if groups.len() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            found: groups.len(),
        });
    }
    Ok(groups.iter().max().map_or(0, |g| g + 1))
}

/// Integral over Xi of the largest ratio within each fibre of Xi.
///
/// `groups[i]` is the value of Xi at cell i, coded 0..k.
pub fn conditional_bound(state: &BeliefState, groups: &[usize]) -> Result<f64> {
    let k = group_count(state, groups)?;
    let mut mass = vec![0.0; k];
    let mut top = vec![f64::NEG_INFINITY; k];
    for (i, &g) in groups.iter().enumerate() {
        mass[g] += state.prior_mass()[i];
        top[g] = top[g].max(state.rb()[i]);
    }
    Ok(mass
        .iter()
        .zip(&top)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, t)| m * t)
        .sum())
}

/// m_Q(x) / m(x) for a measure `q_mass` on the cells that must share the
/// Xi-marginal of the prior (total variation at most 1e-10).
pub fn admissible_ratio(state: &BeliefState, groups: &[usize], q_mass: &[f64]) -> Result<f64> {
    let k = group_count(state, groups)?;
    if q_mass.len() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            found: q_mass.len(),
        });
    }
    let mut diff = vec![0.0; k];
    for (i, &g) in groups.iter().enumerate() {
        diff[g] += q_mass[i] - state.prior_mass()[i];
    }
    let tv = 0.5 * diff.iter().map(|d| d.abs()).sum::<f64>();
    if tv > 1e-10 {
        return Err(Error::MarginalMismatch { tv });
    }
    let mq: f64 = q_mass.iter().zip(state.cond_predictive()).map(|(a, b)| a * b).sum();
    Ok(mq / state.prior_predictive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rb_core::{build_belief_state, ParamGrid};

    #[test]
    fn discrete_tails() {
        let uniform = PredictiveCurve::Discrete {
            support: vec![0.0, 1.0, 2.0, 3.0],
            mass: vec![0.25; 4],
            observed: 2.0,
        };
        assert_eq!(tail_probability(&uniform).unwrap(), 1.0);
        let peaked = PredictiveCurve::Discrete {
            support: vec![0.0, 1.0, 2.0],
            mass: vec![0.2, 0.5, 0.3],
            observed: 1.0,
        };
        assert_eq!(tail_probability(&peaked).unwrap(), 1.0);
        let low = PredictiveCurve::Discrete {
            support: vec![0.0, 1.0, 2.0],
            mass: vec![0.2, 0.5, 0.3],
            observed: 2.0,
        };
        assert!((tail_probability(&low).unwrap() - 0.5).abs() < 1e-15);
        let off = PredictiveCurve::Discrete {
            support: vec![0.0, 1.0],
            mass: vec![0.5, 0.5],
            observed: 0.5,
        };
        assert_eq!(tail_probability(&off), Err(Error::OutOfSupport(0.5)));
    }

    #[test]
    fn symmetric_tails_at_centre() {
        let n = PredictiveCurve::Normal {
            mean: 1.0,
            var: 2.0,
            observed: 1.0,
        };
        assert_eq!(tail_probability(&n).unwrap(), 1.0);
        let t = PredictiveCurve::StudentT {
            nu: 5.0,
            loc: 0.0,
            scale: 2.0,
            observed: 0.0,
        };
        assert_eq!(tail_probability(&t).unwrap(), 1.0);
    }

    #[test]
    fn scaled_f_tail_against_quadrature() {
        for obs in [0.3, 0.9087, 2.5, 23.9593] {
            let c = PredictiveCurve::ScaledF {
                d1: 19.0,
                d2: 10.0,
                scale: 1.0,
                observed: obs,
            };
            c.validate().unwrap();
            // the other crossing by Illinois regula falsi on the density itself,
            // then two smooth quadratures of the density
            let dens = |x: f64| c.ln_density(x).exp();
            let target = dens(obs);
            let mode = 17.0 / 19.0 * 10.0 / 12.0;
            let (mut a, mut b) = if obs < mode { (mode, 200.0) } else { (1e-9, mode) };
            let (mut fa, mut fb) = (dens(a) - target, dens(b) - target);
            let mut side = 0;
            for _ in 0..500 {
                let x = (a * fb - b * fa) / (fb - fa);
                let fx = dens(x) - target;
                if fx == 0.0 || x == a || x == b {
                    a = x;
                    b = x;
                    break;
                }
                if fx.signum() == fa.signum() {
                    a = x;
                    fa = fx;
                    if side == -1 {
                        fb *= 0.5;
                    }
                    side = -1;
                } else {
                    b = x;
                    fb = fx;
                    if side == 1 {
                        fa *= 0.5;
                    }
                    side = 1;
                }
            }
            let other = if (dens(a) - target).abs() < (dens(b) - target).abs() { a } else { b };
            let (lo, hi) = if obs < mode { (obs, other) } else { (other, obs) };
            let oracle = integrate(dens, 0.0, lo, 1e-14).unwrap() + integrate_to_infinity(dens, hi, 1e-14).unwrap();
            let got = tail_probability(&c).unwrap();
            assert!((got - oracle).abs() < 1e-10, "obs {obs}: {got} vs {oracle}");
        }
    }

    #[test]
    fn factorization_examples() {
        let f = factorization_ratio(2.0, 1.0, 2.0, 1.0, 3.0, 3.0).unwrap();
        assert_eq!((f.lhs, f.rhs, f.residual), (2.0, 2.0, 0.0));
        assert!(f.holds(1e-10));
        assert!(factorization_ratio(1.0, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn bound_and_admissibility() {
        // two Xi values, two cells each
        let g = ParamGrid::new(
            vec!["a0".into(), "a1".into(), "b0".into(), "b1".into()],
            vec![0.1, 0.3, 0.4, 0.2],
        )
        .unwrap();
        let s = build_belief_state(g, vec![1.0, 4.0, 2.0, 0.5]).unwrap();
        let groups = [0, 0, 1, 1];
        let b = conditional_bound(&s, &groups).unwrap();
        let want = (0.4 * 4.0 + 0.6 * 2.0) / s.prior_predictive();
        assert!((b - want).abs() < 1e-14);
        // all Xi mass moved to the best cell of each fibre attains the bound
        let r = admissible_ratio(&s, &groups, &[0.0, 0.4, 0.6, 0.0]).unwrap();
        assert!((r - b).abs() < 1e-14);
        assert!(matches!(
            admissible_ratio(&s, &groups, &[0.4, 0.0, 0.6, 0.0]),
            Ok(v) if v <= b
        ));
        assert!(matches!(
            admissible_ratio(&s, &groups, &[0.5, 0.0, 0.5, 0.0]),
            Err(Error::MarginalMismatch { .. })
        ));
        // constant Xi recovers the largest ratio
        assert!((conditional_bound(&s, &[0, 0, 0, 0]).unwrap() - s.max_rb()).abs() < 1e-15);
        assert_eq!(worst_case_ratio(&s), s.max_rb());
    }
}

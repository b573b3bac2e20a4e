//! epsilon-contamination of the prior: Huber bounds, robustness of credible
//! regions, exact contaminated paths and Gateaux derivatives.

use crate::error::{domain, Error, Result};
use crate::rb_core::{credible_region, BeliefState};

const MASS_TOL: f64 = 1e-12;

/// Largest grid handled by the exhaustive subset search.
pub const MAX_SEARCH_CELLS: usize = 20;

/// A contaminating measure Q on the grid.
///
/// `Marginal` perturbs the marginal prior and keeps m(x | psi). `Conditional`
/// perturbs the conditional prior given psi, so only m_Q(x | psi) changes.
/// `Full` changes both.
#[derive(Debug, Clone, PartialEq)]
pub enum Direction {
    Marginal { mass: Vec<f64> },
    Conditional { cond_predictive: Vec<f64> },
    Full { mass: Vec<f64>, cond_predictive: Vec<f64> },
}

fn check_mass(mass: &[f64]) -> Result<()> {
    if mass.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, &q) in mass.iter().enumerate() {
        if q.is_nan() {
            return Err(Error::NanInput(i));
        }
        if q < 0.0 || !q.is_finite() {
            return Err(Error::InvalidDirection(format!("mass {q} at cell {i}")));
        }
    }
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDirection(format!("masses sum to {total}")));
    }
    Ok(())
}

fn check_predictive(c: &[f64]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, &v) in c.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::NanInput(i));
        }
        if v < 0.0 || !v.is_finite() {
            return Err(Error::InvalidDirection(format!("conditional predictive {v} at cell {i}")));
        }
    }
    Ok(())
}

impl Direction {
    pub fn marginal(mass: Vec<f64>) -> Result<Self> {
        check_mass(&mass)?;
        Ok(Direction::Marginal { mass })
    }

    /// Normalizes nonnegative weights into a marginal direction.
    pub fn marginal_from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDirection(format!("weights sum to {total}")));
        }
        Self::marginal(weights.iter().map(|w| w / total).collect())
    }

    /// Point mass at cell `i` of an `n`-cell grid.
    pub fn point_mass(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::UnknownLabel(format!("#{i}")));
        }
        let mut mass = vec![0.0; n];
        mass[i] = 1.0;
        Ok(Direction::Marginal { mass })
    }

    pub fn conditional(cond_predictive: Vec<f64>) -> Result<Self> {
        check_predictive(&cond_predictive)?;
        Ok(Direction::Conditional { cond_predictive })
    }

    pub fn full(mass: Vec<f64>, cond_predictive: Vec<f64>) -> Result<Self> {
        check_mass(&mass)?;
        check_predictive(&cond_predictive)?;
        if mass.len() != cond_predictive.len() {
            return Err(Error::LengthMismatch {
                expected: mass.len(),
                found: cond_predictive.len(),
            });
        }
        Ok(Direction::Full { mass, cond_predictive })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Direction::Marginal { .. } => "marginal",
            Direction::Conditional { .. } => "conditional",
            Direction::Full { .. } => "full",
        }
    }

    /// The Q masses and m_Q(x | psi) values, filling in whatever the kind
    /// inherits from the base state.
    pub fn resolve<'a>(&'a self, state: &'a BeliefState) -> Result<(&'a [f64], &'a [f64])> {
        let (q, c): (&[f64], &[f64]) = match self {
            Direction::Marginal { mass } => (mass, state.cond_predictive()),
            Direction::Conditional { cond_predictive } => (state.prior_mass(), cond_predictive),
            Direction::Full { mass, cond_predictive } => (mass, cond_predictive),
        };
        for v in [q.len(), c.len()] {
            if v != state.len() {
                return Err(Error::LengthMismatch {
                    expected: state.len(),
                    found: v,
                });
            }
        }
        Ok((q, c))
    }
}

/// m_Q(x) = sum_i Q(psi_i) m_Q(x | psi_i).
pub fn m_q(state: &BeliefState, q: &Direction) -> Result<f64> {
    let (mass, c) = q.resolve(state)?;
    Ok(mass.iter().zip(c).map(|(a, b)| a * b).sum())
}

pub fn m_q_over_m(state: &BeliefState, q: &Direction) -> Result<f64> {
    Ok(m_q(state, q)? / state.prior_predictive())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HuberBounds {
    /// Base posterior content of A.
    pub content: f64,
    pub upper: f64,
    pub lower: f64,
    pub delta: f64,
    pub r_a: f64,
    pub r_ac: f64,
}

fn check_epsilon(func: &'static str, epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(domain(func, format!("epsilon = {epsilon} not in [0, 1)")))
    }
}

/// Membership vector of a nonempty proper subset.
fn membership(state: &BeliefState, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; state.len()];
    for &i in set {
        if i >= state.len() {
            return Err(Error::UnknownLabel(format!("#{i}")));
        }
        if inside[i] {
            return Err(Error::InvalidSet(format!("cell {i} listed twice")));
        }
        inside[i] = true;
    }
    let k = set.len();
    if k == 0 || k == state.len() {
        return Err(Error::InvalidSet("set must be nonempty and proper".into()));
    }
    Ok(inside)
}

fn huber_from_parts(p: f64, r_a: f64, r_ac: f64, es: f64) -> HuberBounds {
    let upper = (p + es * r_a) / (1.0 + es * r_a);
    let lower = p / (1.0 + es * r_ac);
    let delta = p * es * (r_ac - r_a) / ((1.0 + es * r_a) * (1.0 + es * r_ac)) + es * r_a / (1.0 + es * r_a);
    HuberBounds {
        content: p,
        upper,
        lower,
        delta,
        r_a,
        r_ac,
    }
}

/// Upper and lower posterior content of `set` over all epsilon-contaminations
/// of the marginal prior, and their spread.
pub fn huber_bounds(state: &BeliefState, set: &[usize], epsilon: f64) -> Result<HuberBounds> {
    check_epsilon("huber_bounds", epsilon)?;
    let inside = membership(state, set)?;
    let mut p = 0.0;
    let mut r_a = f64::NEG_INFINITY;
    let mut r_ac = f64::NEG_INFINITY;
    for i in 0..state.len() {
        if inside[i] {
            p += state.posterior_mass()[i];
            r_a = r_a.max(state.rb()[i]);
        } else {
            r_ac = r_ac.max(state.rb()[i]);
        }
    }
    let es = epsilon / (1.0 - epsilon);
    Ok(huber_from_parts(p, r_a, r_ac, es))
}

/// delta of the gamma-credible region written through the largest ratio and
/// the largest ratio outside the region.
pub fn delta_credible(state: &BeliefState, gamma: f64, epsilon: f64) -> Result<f64> {
    check_epsilon("delta_credible", epsilon)?;
    let region = credible_region(state, gamma)?;
    if region.cells.len() == state.len() {
        return Err(Error::Degenerate("credible region is the whole grid".into()));
    }
    let big_r = state.max_rb();
    let r_out = (0..state.len())
        .filter(|&i| state.rb()[i] < region.cutoff)
        .map(|i| state.rb()[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let es = epsilon / (1.0 - epsilon);
    let p = region.exact_content;
    Ok(es * big_r / (1.0 + es * big_r) * (1.0 - (p / big_r) * (big_r - r_out) / (1.0 + es * r_out)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// The credible region and its delta.
    pub region: Vec<usize>,
    pub region_delta: f64,
    /// Smallest delta over the admissible sets and the set attaining it.
    pub min_delta: f64,
    pub argmin: Vec<usize>,
    pub admissible: u64,
}

#[derive(Clone, Copy)]
enum Admissible {
    /// content <= gamma*(x) and r(A) = r(Psi)
    ContentAtMost(f64),
    /// content = gamma
    ContentEquals(f64),
}

const CONTENT_SLACK: f64 = 1e-12;

struct Best {
    delta: f64,
    set: Vec<usize>,
    count: u64,
}

fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let count = a.count + b.count;
            let take_b = b.delta < a.delta || (b.delta == a.delta && b.set < a.set);
            let mut win = if take_b { b } else { a };
            win.count = count;
            Some(win)
        }
    }
}

fn scan(state: &BeliefState, rule: Admissible, es: f64, masks: std::ops::Range<u64>) -> Option<Best> {
    let n = state.len();
    let big_r = state.max_rb();
    let post = state.posterior_mass();
    let rb = state.rb();
    let mut best: Option<Best> = None;
    let mut count = 0;
    for mask in masks {
        let mut p = 0.0;
        let mut r_a = f64::NEG_INFINITY;
        let mut r_ac = f64::NEG_INFINITY;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                p += post[i];
                r_a = r_a.max(rb[i]);
            } else {
                r_ac = r_ac.max(rb[i]);
            }
        }
        let ok = match rule {
            Admissible::ContentAtMost(g) => p <= g + CONTENT_SLACK && r_a == big_r,
            Admissible::ContentEquals(g) => (p - g).abs() <= CONTENT_SLACK,
        };
        if !ok {
            continue;
        }
        count += 1;
        let d = huber_from_parts(p, r_a, r_ac, es).delta;
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        best = merge(best, Some(Best { delta: d, set, count: 0 }));
    }
    if let Some(b) = best.as_mut() {
        b.count = count;
    }
    best
}

fn search(state: &BeliefState, gamma: f64, epsilon: f64, workers: usize, equal: bool) -> Result<SearchOutcome> {
    check_epsilon("optimality_search", epsilon)?;
    let n = state.len();
    if n > MAX_SEARCH_CELLS {
        return Err(Error::GridTooLarge {
            size: n,
            max: MAX_SEARCH_CELLS,
        });
    }
    let region = credible_region(state, gamma)?;
    if gamma >= 1.0 || region.cells.len() == n {
        return Err(Error::Degenerate(
            "credible region is the whole grid; the constraint set degenerates and no comparison is made".into(),
        ));
    }
    let rule = if equal {
        if region.exact_content < 0.5 {
            return Err(Error::Degenerate(format!(
                "exact content {} is below 1/2",
                region.exact_content
            )));
        }
        Admissible::ContentEquals(region.exact_content)
    } else {
        Admissible::ContentAtMost(region.exact_content)
    };
    let es = epsilon / (1.0 - epsilon);
    let region_delta = huber_bounds(state, &region.cells, epsilon)?.delta;
    // proper nonempty subsets
    let total = (1u64 << n) - 1;
    let workers = workers.clamp(1, 64) as u64;
    let best = if workers == 1 {
        scan(state, rule, es, 1..total)
    } else {
        let chunk = total.div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = (1 + w * chunk).min(total);
                    let hi = (1 + (w + 1) * chunk).min(total);
                    s.spawn(move || scan(state, rule, es, lo..hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .fold(None, merge)
        })
    };
    let best = best.ok_or_else(|| Error::Degenerate("no admissible set".into()))?;
    Ok(SearchOutcome {
        region: region.cells,
        region_delta,
        min_delta: best.delta,
        argmin: best.set,
        admissible: best.count,
    })
}

/// Exhaustive search over sets A with content at most gamma*(x) that contain a
/// cell of largest ratio, reporting the smallest delta(A).
pub fn optimality_search(state: &BeliefState, gamma: f64, epsilon: f64) -> Result<SearchOutcome> {
    search(state, gamma, epsilon, 1, false)
}

/// As [`optimality_search`], with the subset space split across `workers` threads.
pub fn optimality_search_parallel(
    state: &BeliefState,
    gamma: f64,
    epsilon: f64,
    workers: usize,
) -> Result<SearchOutcome> {
    search(state, gamma, epsilon, workers, false)
}

/// Exhaustive search over sets whose content equals the exact content gamma*(x)
/// of the credible region, when gamma*(x) >= 1/2.
///
/// On a grid the region's content exceeds the nominal gamma unless gamma = 1, so
/// the comparison class is taken at gamma*(x) itself.
pub fn equal_content_search(state: &BeliefState, gamma: f64, epsilon: f64) -> Result<SearchOutcome> {
    search(state, gamma, epsilon, 1, true)
}

struct Parts<'a> {
    q: &'a [f64],
    cq: &'a [f64],
    m: f64,
    mq: f64,
}

fn parts<'a>(state: &'a BeliefState, q: &'a Direction) -> Result<Parts<'a>> {
    let (mass, cq) = q.resolve(state)?;
    let mq = mass.iter().zip(cq).map(|(a, b)| a * b).sum();
    Ok(Parts {
        q: mass,
        cq,
        m: state.prior_predictive(),
        mq,
    })
}

/// Relative belief ratios under (1 - eps) Pi + eps Q for every cell.
///
/// Negative `eps` (with |eps| < 1) is accepted so that two-sided difference
/// quotients can be formed; the mixture must stay a positive measure.
pub fn rb_path(state: &BeliefState, q: &Direction, eps: f64) -> Result<Vec<f64>> {
    if !(eps.abs() < 1.0) {
        return Err(domain("rb_path", format!("|epsilon| = {} >= 1", eps.abs())));
    }
    let Parts { q: qm, cq, m, mq } = parts(state, q)?;
    let m_eps = (1.0 - eps) * m + eps * mq;
    if m_eps <= 0.0 {
        return Err(domain("rb_path", "contaminated prior predictive is not positive"));
    }
    let c = state.cond_predictive();
    let p = state.prior_mass();
    let mut out = Vec::with_capacity(state.len());
    for i in 0..state.len() {
        let v = match q {
            Direction::Marginal { .. } => c[i] / m_eps,
            Direction::Conditional { .. } => ((1.0 - eps) * c[i] + eps * cq[i]) / m_eps,
            Direction::Full { .. } => {
                let prior = (1.0 - eps) * p[i] + eps * qm[i];
                if prior <= 0.0 {
                    return Err(domain("rb_path", format!("contaminated prior mass at cell {i} is not positive")));
                }
                ((1.0 - eps) * p[i] * c[i] + eps * qm[i] * cq[i]) / (m_eps * prior)
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// RB(psi | x) under the contaminated prior (1 - eps) Pi + eps Q.
pub fn contaminated_rb(state: &BeliefState, psi: usize, q: &Direction, epsilon: f64) -> Result<f64> {
    check_epsilon("contaminated_rb", epsilon)?;
    state.grid().check_index(psi)?;
    let Parts { m, mq, .. } = parts(state, q)?;
    if mq == 0.0 && epsilon > 0.0 {
        return Err(domain("contaminated_rb", "m_Q(x) = 0"));
    }
    let rb = state.rb()[psi];
    match q {
        Direction::Marginal { .. } => Ok(rb / (1.0 - epsilon * (1.0 - mq / m))),
        Direction::Conditional { cond_predictive } => {
            let ex = epsilon * mq / ((1.0 - epsilon) * m + epsilon * mq);
            let rb_q = if mq > 0.0 { cond_predictive[psi] / mq } else { 0.0 };
            Ok((1.0 - ex) * rb + ex * rb_q)
        }
        Direction::Full { .. } => Ok(rb_path(state, q, epsilon)?[psi]),
    }
}

/// Gateaux derivative of RB(psi | x) in the direction Q.
pub fn gateaux_rb(state: &BeliefState, psi: usize, q: &Direction) -> Result<f64> {
    state.grid().check_index(psi)?;
    let Parts { q: qm, cq, m, mq } = parts(state, q)?;
    let rb = state.rb()[psi];
    Ok(match q {
        Direction::Marginal { .. } => rb * (1.0 - mq / m),
        // (m_Q / m)(RB_Q - RB) with RB_Q = m_Q(x | psi) / m_Q(x)
        Direction::Conditional { .. } => (cq[psi] - mq * rb) / m,
        Direction::Full { .. } => {
            let w = qm[psi] / state.prior_mass()[psi];
            (w * cq[psi] - mq * rb) / m - (w - 1.0) * rb
        }
    })
}

fn require_marginal(q: &Direction, what: &str) -> Result<()> {
    match q {
        Direction::Marginal { .. } => Ok(()),
        _ => Err(Error::InvalidDirection(format!("{what} needs a marginal direction, got {}", q.kind()))),
    }
}

fn require_conditional(q: &Direction, what: &str) -> Result<()> {
    match q {
        Direction::Conditional { .. } => Ok(()),
        _ => Err(Error::InvalidDirection(format!(
            "{what} needs a conditional direction, got {}",
            q.kind()
        ))),
    }
}

/// |1 - m_Q(x) / m(x)|, the relative change of every ratio per unit epsilon.
pub fn relative_sensitivity_rb(state: &BeliefState, q: &Direction) -> Result<f64> {
    require_marginal(q, "relative_sensitivity_rb")?;
    Ok((1.0 - m_q_over_m(state, q)?).abs())
}

/// Gateaux derivative of the strength Pi(RB <= RB(psi0) | x) for a marginal direction.
pub fn gateaux_strength_marginal(state: &BeliefState, psi0: usize, q: &Direction) -> Result<f64> {
    require_marginal(q, "gateaux_strength_marginal")?;
    state.grid().check_index(psi0)?;
    let Parts { q: qm, m, mq, .. } = parts(state, q)?;
    let rb0 = state.rb()[psi0];
    let mut q_part = 0.0;
    let mut pi_part = 0.0;
    for i in 0..state.len() {
        if state.rb()[i] <= rb0 {
            // (m_Q/m) Q(psi_i | x) = q_i m(x | psi_i) / m
            q_part += qm[i] * state.rb()[i];
            pi_part += state.posterior_mass()[i];
        }
    }
    Ok(q_part - mq / m * pi_part)
}

/// Strength under the contaminated marginal prior, measured with the contaminated posterior.
pub fn strength_path_marginal(state: &BeliefState, psi0: usize, q: &Direction, eps: f64) -> Result<f64> {
    require_marginal(q, "strength_path_marginal")?;
    state.grid().check_index(psi0)?;
    let rb = rb_path(state, q, eps)?;
    let Parts { q: qm, .. } = parts(state, q)?;
    let p = state.prior_mass();
    let mut s = 0.0;
    for i in 0..state.len() {
        if rb[i] <= rb[psi0] {
            s += ((1.0 - eps) * p[i] + eps * qm[i]) * rb[i];
        }
    }
    Ok(s)
}

/// Gateaux derivative of the posterior mass at psi0.
pub fn gateaux_map(state: &BeliefState, psi0: usize, q: &Direction) -> Result<f64> {
    require_marginal(q, "gateaux_map")?;
    state.grid().check_index(psi0)?;
    let Parts { q: qm, m, mq, .. } = parts(state, q)?;
    // (m_Q/m)(q(psi0|x) - pi(psi0|x)) with q(psi0|x) = q0 m(x|psi0) / m_Q(x)
    Ok(qm[psi0] * state.rb()[psi0] - mq / m * state.posterior_mass()[psi0])
}

/// (m_Q/m) |1 - q(psi0 | x) / pi(psi0 | x)|, the relative change of the posterior mass.
pub fn relative_sensitivity_map(state: &BeliefState, psi0: usize, q: &Direction) -> Result<f64> {
    require_marginal(q, "relative_sensitivity_map")?;
    state.grid().check_index(psi0)?;
    let Parts { q: qm, m, mq, .. } = parts(state, q)?;
    let post = state.posterior_mass()[psi0];
    if post == 0.0 {
        return Err(Error::Degenerate("posterior mass at psi0 is zero".into()));
    }
    if mq == 0.0 {
        return Ok(0.0);
    }
    let q_post = qm[psi0] * state.cond_predictive()[psi0] / mq;
    Ok(mq / m * (1.0 - q_post / post).abs())
}

/// Posterior mass at psi0 under the contaminated marginal prior.
pub fn posterior_path(state: &BeliefState, psi0: usize, q: &Direction, eps: f64) -> Result<f64> {
    state.grid().check_index(psi0)?;
    let rb = rb_path(state, q, eps)?;
    let Parts { q: qm, .. } = parts(state, q)?;
    Ok(((1.0 - eps) * state.prior_mass()[psi0] + eps * qm[psi0]) * rb[psi0])
}

/// Strength Pi(RB_eps <= RB_eps(psi0) | x) along a conditional contamination,
/// measured with the base posterior.
pub fn strength_path_conditional(state: &BeliefState, psi0: usize, q: &Direction, eps: f64) -> Result<f64> {
    require_conditional(q, "strength_path_conditional")?;
    state.grid().check_index(psi0)?;
    let rb = rb_path(state, q, eps)?;
    Ok((0..state.len())
        .filter(|&i| rb[i] <= rb[psi0])
        .map(|i| state.posterior_mass()[i])
        .sum())
}

/// Bound on |eps| below which the set {RB_eps <= RB_eps(psi0)} does not move
/// under a conditional contamination. Equals 1 when nothing can cross.
pub fn strength_threshold(state: &BeliefState, psi0: usize, q: &Direction) -> Result<f64> {
    require_conditional(q, "strength_threshold")?;
    state.grid().check_index(psi0)?;
    let Parts { cq, m, mq, .. } = parts(state, q)?;
    if mq == 0.0 {
        return Ok(1.0);
    }
    let rb = state.rb();
    let rb_q: Vec<f64> = cq.iter().map(|c| c / mq).collect();
    // RB_eps(i) <= RB_eps(psi0)  <=>  (rb_i - rb0) + t (rbq_i - rbq0) <= 0,
    // t = eps m_Q / ((1 - eps) m)
    let mut t_star = f64::INFINITY;
    for i in 0..state.len() {
        let d = rb[i] - rb[psi0];
        let dq = rb_q[i] - rb_q[psi0];
        if d == 0.0 {
            if dq != 0.0 && state.posterior_mass()[i] > 0.0 {
                return Err(Error::Degenerate(format!(
                    "cell {i} ties psi0 in RB but not in RB_Q; the strength is not differentiable"
                )));
            }
            continue;
        }
        if dq != 0.0 && d.signum() != dq.signum() {
            t_star = t_star.min(d.abs() / dq.abs());
        }
    }
    if t_star.is_infinite() {
        return Ok(1.0);
    }
    let s = t_star * m / mq;
    Ok(s / (1.0 + s))
}

/// Gateaux derivative of the strength for a conditional direction: zero on a grid.
///
/// On a finite grid the ratio has a discrete distribution, so the strength is
/// locally constant in epsilon. The continuous-case formula
/// (m_Q/m) RB_Q(psi0 | x) g(RB(psi0 | x) | x) needs a density g that a grid does
/// not have; use [`strength_path_conditional`] to study fine grids numerically.
pub fn gateaux_strength_conditional(state: &BeliefState, psi0: usize, q: &Direction) -> Result<f64> {
    strength_threshold(state, psi0, q)?;
    Ok(0.0)
}

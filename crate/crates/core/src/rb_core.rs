//! Relative belief inference on a finite grid: posterior, ratios, estimate,
//! credible regions and the strength of the evidence.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::argmax_first;

const SUM_TOL: f64 = 1e-12;

/// Identifier of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    Value(f64),
    Name(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Value(v) => write!(f, "{v}"),
            Label::Name(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Label {
    fn from(v: f64) -> Self {
        Label::Value(v)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Name(s.to_string())
    }
}

#[derive(Hash, PartialEq, Eq)]
enum LabelKey {
    Value(u64),
    Name(String),
}

fn label_key(l: &Label) -> LabelKey {
    match l {
        // -0.0 and 0.0 name the same point
        Label::Value(v) => LabelKey::Value((v + 0.0).to_bits()),
        Label::Name(s) => LabelKey::Name(s.clone()),
    }
}

/// A discretized parameter space with its prior masses.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    labels: Vec<Label>,
    prior_mass: Vec<f64>,
}

impl ParamGrid {
    /// Masses must be positive and sum to one within 1e-12.
    pub fn new(labels: Vec<Label>, prior_mass: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if labels.len() != prior_mass.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                found: prior_mass.len(),
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if let Label::Value(v) = l {
                if !v.is_finite() {
                    return Err(Error::InvalidGrid(format!("non-finite label at cell {i}")));
                }
            }
            if !seen.insert(label_key(l)) {
                return Err(Error::InvalidGrid(format!("duplicate label `{l}`")));
            }
        }
        for (i, &p) in prior_mass.iter().enumerate() {
            if p.is_nan() {
                return Err(Error::NanInput(i));
            }
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidGrid(format!("prior mass {p} at cell {i} is not positive")));
            }
        }
        let total: f64 = prior_mass.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidGrid(format!("prior masses sum to {total}")));
        }
        Ok(Self { labels, prior_mass })
    }

    /// Builds a grid from positive weights, normalizing them.
    pub fn from_weights(labels: Vec<Label>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidGrid(format!("weights sum to {total}")));
        }
        Self::new(labels, weights.iter().map(|w| w / total).collect())
    }

    /// Uniform prior over the labels.
    pub fn uniform(labels: Vec<Label>) -> Result<Self> {
        let w = vec![1.0; labels.len()];
        Self::from_weights(labels, &w)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn prior_mass(&self) -> &[f64] {
        &self.prior_mass
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &Label) -> Result<usize> {
        let key = label_key(label);
        self.labels
            .iter()
            .position(|l| label_key(l) == key)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Looks a cell up by its printed label, as typed in a config file.
    pub fn find(&self, text: &str) -> Result<usize> {
        if let Some(i) = self.labels.iter().position(|l| matches!(l, Label::Name(s) if s == text)) {
            return Ok(i);
        }
        if let Ok(v) = text.trim().parse::<f64>() {
            if let Ok(i) = self.index_of(&Label::Value(v)) {
                return Ok(i);
            }
        }
        Err(Error::UnknownLabel(text.to_string()))
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownLabel(format!("#{i}")))
        }
    }
}

/// Prior, per-cell prior predictive values, posterior and relative belief ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    grid: ParamGrid,
    cond_predictive: Vec<f64>,
    prior_predictive: f64,
    posterior_mass: Vec<f64>,
    rb: Vec<f64>,
}

impl BeliefState {
    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }
    pub fn len(&self) -> usize {
        self.grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
    pub fn prior_mass(&self) -> &[f64] {
        self.grid.prior_mass()
    }
    /// m(x | psi_i) for every cell.
    pub fn cond_predictive(&self) -> &[f64] {
        &self.cond_predictive
    }
    /// m(x).
    pub fn prior_predictive(&self) -> f64 {
        self.prior_predictive
    }
    pub fn posterior_mass(&self) -> &[f64] {
        &self.posterior_mass
    }
    pub fn rb(&self) -> &[f64] {
        &self.rb
    }
    /// r(Psi), the largest ratio.
    pub fn max_rb(&self) -> f64 {
        self.rb.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn build_belief_state(grid: ParamGrid, cond_predictive: Vec<f64>) -> Result<BeliefState> {
    if cond_predictive.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: cond_predictive.len(),
        });
    }
    for (i, &c) in cond_predictive.iter().enumerate() {
        if c.is_nan() {
            return Err(Error::NanInput(i));
        }
        if c < 0.0 || !c.is_finite() {
            return Err(Error::InvalidGrid(format!("conditional predictive {c} at cell {i}")));
        }
    }
    let m: f64 = grid.prior_mass().iter().zip(&cond_predictive).map(|(p, c)| p * c).sum();
    if m <= 0.0 {
        return Err(Error::ImpossibleData);
    }
    let rb: Vec<f64> = cond_predictive.iter().map(|c| c / m).collect();
    let posterior_mass = grid.prior_mass().iter().zip(&rb).map(|(p, r)| p * r).collect();
    Ok(BeliefState {
        grid,
        cond_predictive,
        prior_predictive: m,
        posterior_mass,
        rb,
    })
}

/// Index of the cell with the largest ratio, lowest index on ties.
pub fn rb_estimate(state: &BeliefState) -> usize {
    argmax_first(&state.rb).expect("a belief state is never empty and has finite ratios")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CredibleRegion {
    /// Cell indices in grid order.
    pub cells: Vec<usize>,
    pub cutoff: f64,
    pub exact_content: f64,
}

/// Distinct ratio levels in decreasing order with the posterior mass at each level.
fn levels(state: &BeliefState) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..state.len()).collect();
    order.sort_by(|&a, &b| state.rb[b].total_cmp(&state.rb[a]).then(a.cmp(&b)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in order {
        match out.last_mut() {
            Some((v, mass)) if *v == state.rb[i] => *mass += state.posterior_mass[i],
            _ => out.push((state.rb[i], state.posterior_mass[i])),
        }
    }
    out
}

/// The gamma-relative belief region {psi : RB(psi | x) >= c}, with c the smallest
/// realized ratio whose upper set has posterior content at most gamma beyond it.
pub fn credible_region(state: &BeliefState, gamma: f64) -> Result<CredibleRegion> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(crate::error::domain("credible_region", format!("gamma = {gamma}")));
    }
    let lv = levels(state);
    // above = posterior mass strictly above the candidate level
    let mut above = 0.0;
    let mut cutoff = lv[0].0;
    let mut content = 0.0;
    for &(v, mass) in &lv {
        if above > gamma {
            break;
        }
        cutoff = v;
        above += mass;
        content = above;
    }
    let cells = (0..state.len()).filter(|&i| state.rb[i] >= cutoff).collect();
    Ok(CredibleRegion {
        cells,
        cutoff,
        exact_content: content.min(1.0),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceReport {
    pub psi0: usize,
    pub rb0: f64,
    pub strength: f64,
    /// Posterior mass of the cells whose ratio equals rb0.
    pub lower_bound: f64,
    /// rb0 itself.
    pub upper_bound: f64,
}

/// Posterior probability that the ratio is no larger than at psi0.
pub fn strength(state: &BeliefState, psi0: usize) -> Result<EvidenceReport> {
    state.grid.check_index(psi0)?;
    let rb0 = state.rb[psi0];
    let mut s = 0.0;
    let mut tie = 0.0;
    for (r, p) in state.rb.iter().zip(&state.posterior_mass) {
        if *r <= rb0 {
            s += p;
        }
        if *r == rb0 {
            tie += p;
        }
    }
    Ok(EvidenceReport {
        psi0,
        rb0,
        strength: s.min(1.0),
        lower_bound: tie.min(1.0),
        upper_bound: rb0,
    })
}

/// Integral of the piecewise-linear interpolant of (xs, ys) over [a, b].
fn linear_integral(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..xs.len() - 1 {
        let (x0, x1) = (xs[k], xs[k + 1]);
        let lo = a.max(x0);
        let hi = b.min(x1);
        if hi <= lo {
            continue;
        }
        let at = |x: f64| ys[k] + (ys[k + 1] - ys[k]) * (x - x0) / (x1 - x0);
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}

/// Bins a density given at ordered points into cells
/// `[psi0 + (2i - 1) delta / 2, psi0 + (2i + 1) delta / 2)` labelled by their centres
/// `psi0 + i delta`. The density is interpolated linearly between points and is
/// zero outside them. Cells without mass are dropped.
pub fn discretize(points: &[f64], prior_density: &[f64], psi0: f64, delta: f64) -> Result<ParamGrid> {
    if points.len() != prior_density.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            found: prior_density.len(),
        });
    }
    if points.len() < 2 {
        return Err(Error::InvalidGrid("need at least two points".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) || !psi0.is_finite() {
        return Err(crate::error::domain("discretize", format!("delta = {delta}, psi0 = {psi0}")));
    }
    for (i, (&x, &d)) in points.iter().zip(prior_density).enumerate() {
        if x.is_nan() || d.is_nan() {
            return Err(Error::NanInput(i));
        }
        if d < 0.0 || !d.is_finite() || !x.is_finite() {
            return Err(Error::InvalidGrid(format!("bad point or density at index {i}")));
        }
        if i > 0 && x <= points[i - 1] {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
    }
    let lo = points[0];
    let hi = points[points.len() - 1];
    let first = ((lo - psi0) / delta + 0.5).floor() as i64;
    let last = ((hi - psi0) / delta + 0.5).floor() as i64;
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for i in first..=last {
        let left = psi0 + (2 * i - 1) as f64 * delta / 2.0;
        let right = psi0 + (2 * i + 1) as f64 * delta / 2.0;
        let w = linear_integral(points, prior_density, left, right);
        if w > 0.0 {
            labels.push(Label::Value(psi0 + i as f64 * delta));
            weights.push(w);
        }
    }
    if weights.is_empty() {
        return Err(Error::InvalidGrid("density has no mass".into()));
    }
    ParamGrid::from_weights(labels, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn three() -> BeliefState {
        let g = ParamGrid::new(vec!["a".into(), "b".into(), "c".into()], vec![0.5, 0.3, 0.2]).unwrap();
        build_belief_state(g, vec![1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn three_cell_state() {
        let s = three();
        assert!(close(s.prior_predictive(), 1.7, 1e-15));
        let post = [0.5 / 1.7, 0.6 / 1.7, 0.6 / 1.7];
        let rb = [1.0 / 1.7, 2.0 / 1.7, 3.0 / 1.7];
        for i in 0..3 {
            assert!(close(s.posterior_mass()[i], post[i], 1e-15));
            assert!(close(s.rb()[i], rb[i], 1e-15));
        }
        assert_eq!(rb_estimate(&s), 2);
    }

    #[test]
    fn exclusion_and_flat_likelihood() {
        let g = ParamGrid::new(vec![0.0.into(), 1.0.into()], vec![0.5, 0.5]).unwrap();
        let s = build_belief_state(g.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(s.rb(), &[2.0, 0.0]);
        assert_eq!(s.posterior_mass(), &[1.0, 0.0]);
        assert_eq!(rb_estimate(&s), 0);
        let flat = build_belief_state(g, vec![0.3, 0.3]).unwrap();
        assert_eq!(flat.rb(), &[1.0, 1.0]);
        assert_eq!(rb_estimate(&flat), 0);
        let e = strength(&flat, 1).unwrap();
        assert_eq!((e.strength, e.lower_bound), (1.0, 1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = ParamGrid::new(vec![0.0.into(), 1.0.into()], vec![0.5, 0.5]).unwrap();
        assert_eq!(build_belief_state(g.clone(), vec![0.0, 0.0]), Err(Error::ImpossibleData));
        assert!(build_belief_state(g.clone(), vec![-1.0, 1.0]).is_err());
        assert!(matches!(build_belief_state(g, vec![1.0]), Err(Error::LengthMismatch { .. })));
        assert!(ParamGrid::new(vec![0.0.into(), 0.0.into()], vec![0.5, 0.5]).is_err());
        assert!(ParamGrid::new(vec![0.0.into(), 1.0.into()], vec![1.0, 0.0]).is_err());
        assert!(ParamGrid::new(vec![0.0.into(), 1.0.into()], vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn region_examples() {
        let s = three();
        let r = credible_region(&s, 0.5).unwrap();
        assert_eq!(r.cells, vec![1, 2]);
        assert!(close(r.cutoff, 2.0 / 1.7, 1e-15));
        assert!(close(r.exact_content, 1.2 / 1.7, 1e-15));
        let all = credible_region(&s, 1.0).unwrap();
        assert_eq!(all.cells, vec![0, 1, 2]);
        assert!(close(all.exact_content, 1.0, 1e-15));
        assert_eq!(credible_region(&s, 0.0).unwrap().cells, vec![2]);
        assert_eq!(credible_region(&s, 1e-9).unwrap().cells, vec![2]);
        assert!(credible_region(&s, 1.5).is_err());
    }

    #[test]
    fn strength_examples() {
        let s = three();
        let e = strength(&s, 1).unwrap();
        assert!(close(e.strength, 1.1 / 1.7, 1e-14));
        assert!(close(e.lower_bound, 0.6 / 1.7, 1e-15));
        assert_eq!(e.upper_bound, s.rb()[1]);
        assert!(close(strength(&s, 2).unwrap().strength, 1.0, 1e-15));
        assert!(strength(&s, 3).is_err());
    }

    #[test]
    fn labels_resolve() {
        let s = three();
        assert_eq!(s.grid().find("b").unwrap(), 1);
        assert!(s.grid().find("z").is_err());
        let g = ParamGrid::uniform(vec![0.25.into(), 0.5.into()]).unwrap();
        assert_eq!(g.find("0.50").unwrap(), 1);
        assert_eq!(g.index_of(&Label::Value(0.25)).unwrap(), 0);
    }

    #[test]
    fn discretize_uniform() {
        let g = discretize(&[0.0, 1.0], &[1.0, 1.0], 0.5, 0.5).unwrap();
        assert_eq!(g.labels(), &[Label::Value(0.0), Label::Value(0.5), Label::Value(1.0)]);
        let want = [0.25, 0.5, 0.25];
        for (m, w) in g.prior_mass().iter().zip(want) {
            assert!(close(*m, w, 1e-15));
        }
        let one = discretize(&[0.0, 1.0], &[1.0, 1.0], 0.5, 4.0).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.prior_mass(), &[1.0]);
    }

    #[test]
    fn discretize_left_edge() {
        // psi0 on the support edge: the first cell keeps only its right half
        let g = discretize(&[0.0, 1.0], &[1.0, 1.0], 0.0, 0.1).unwrap();
        assert_eq!(g.label(0), &Label::Value(0.0));
        assert!(close(g.prior_mass()[0], 0.05, 1e-12));
        assert!(close(g.prior_mass()[1], 0.1, 1e-12));
        assert!(close(g.prior_mass().iter().sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn discretize_triangle_matches_integration() {
        // density 2x on [0,1]: mass of [a,b) is b^2 - a^2
        let g = discretize(&[0.0, 1.0], &[0.0, 2.0], 0.5, 0.5).unwrap();
        let want = [0.0625, 0.5, 0.4375];
        for (m, w) in g.prior_mass().iter().zip(want) {
            assert!(close(*m, w, 1e-14));
        }
        assert!(discretize(&[0.0, 1.0], &[0.0, 0.0], 0.5, 0.5).is_err());
        assert!(discretize(&[1.0, 0.0], &[1.0, 1.0], 0.5, 0.5).is_err());
    }
}

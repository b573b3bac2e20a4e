#![allow(dead_code)]

pub use rand::rngs::StdRng;
pub use rand::{RngExt, SeedableRng};
use relbelief::contamination::Direction;
use relbelief::rb_core::{build_belief_state, BeliefState, Label, ParamGrid};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random grid of `n` cells. With `ties`, m(x | psi) takes few distinct values.
pub fn random_state(rng: &mut StdRng, n: usize, ties: bool) -> BeliefState {
    let labels: Vec<Label> = (0..n).map(|i| Label::Value(i as f64)).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let grid = ParamGrid::from_weights(labels, &w).unwrap();
    let c: Vec<f64> = (0..n)
        .map(|_| {
            if ties {
                rng.random_range(1..5) as f64 * 0.5
            } else {
                rng.random_range(0.01..3.0)
            }
        })
        .collect();
    build_belief_state(grid, c).unwrap()
}

pub fn random_weights(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

pub fn random_direction(rng: &mut StdRng, n: usize, kind: usize) -> Direction {
    match kind % 3 {
        0 => Direction::marginal(random_weights(rng, n)).unwrap(),
        1 => Direction::conditional((0..n).map(|_| rng.random_range(0.01..3.0)).collect()).unwrap(),
        _ => {
            let mass = random_weights(rng, n);
            Direction::full(mass, (0..n).map(|_| rng.random_range(0.01..3.0)).collect()).unwrap()
        }
    }
}

/// A random nonempty proper subset of 0..n.
pub fn random_set(rng: &mut StdRng, n: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() && s.len() < n {
            return s;
        }
    }
}

/// Central difference with step h.
pub fn central(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Relative error measured against max(|reference|, 1e-3).
pub fn fd_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1e-3)
}

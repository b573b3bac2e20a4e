//! Upper and lower posterior content of the credible region under epsilon-contamination,
//! and an exhaustive check that the region has the smallest spread.
use relbelief::contamination::*;
use relbelief::rb_core::*;

fn main() -> relbelief::Result<()> {
    let labels = (0..8).map(|i| Label::Value(i as f64)).collect();
    let grid = ParamGrid::from_weights(labels, &[1.0, 2.0, 3.0, 4.0, 4.0, 3.0, 2.0, 1.0])?;
    let s = build_belief_state(grid, vec![0.1, 0.4, 1.2, 2.0, 1.5, 0.9, 0.3, 0.05])?;
    let (gamma, eps) = (0.6, 0.1);
    let region = credible_region(&s, gamma)?;
    let h = huber_bounds(&s, &region.cells, eps)?;
    println!("region {:?}: content {:.4} in [{:.4}, {:.4}], delta {:.4}", region.cells, h.content, h.lower, h.upper, h.delta);
    println!("closed form delta: {:.4}", delta_credible(&s, gamma, eps)?);
    let o = optimality_search_parallel(&s, gamma, eps, 4)?;
    println!("{} admissible sets, smallest delta {:.4} at {:?}", o.admissible, o.min_delta, o.argmin);
    Ok(())
}

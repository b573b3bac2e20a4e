//! Relative belief ratios, estimate, credible region and strength on a three-cell grid.
use relbelief::rb_core::*;

fn main() -> relbelief::Result<()> {
    let grid = ParamGrid::new(vec!["a".into(), "b".into(), "c".into()], vec![0.5, 0.3, 0.2])?;
    let s = build_belief_state(grid, vec![1.0, 2.0, 3.0])?;
    println!("m(x) = {}", s.prior_predictive());
    for i in 0..s.len() {
        println!("{}: posterior {:.4}  RB {:.4}", s.grid().label(i), s.posterior_mass()[i], s.rb()[i]);
    }
    let est = rb_estimate(&s);
    println!("estimate: {}", s.grid().label(est));
    let r = credible_region(&s, 0.5)?;
    println!("0.5-region: {:?}, cutoff {:.4}, content {:.4}", r.cells, r.cutoff, r.exact_content);
    let e = strength(&s, 1)?;
    println!("evidence for b: RB {:.4}, strength {:.4}", e.rb0, e.strength);
    Ok(())
}

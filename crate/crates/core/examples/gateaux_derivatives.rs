//! Directional derivatives of RB, the posterior mass and the strength, next to the
//! exact contaminated values they linearize.
use relbelief::contamination::*;
use relbelief::rb_core::*;

fn main() -> relbelief::Result<()> {
    let grid = ParamGrid::new(vec!["a".into(), "b".into(), "c".into()], vec![0.5, 0.3, 0.2])?;
    let s = build_belief_state(grid, vec![1.0, 2.0, 3.0])?;
    let directions = [
        Direction::marginal(vec![0.0, 0.5, 0.5])?,
        Direction::point_mass(3, 0)?,
        Direction::conditional(vec![3.0, 2.0, 1.0])?,
        Direction::full(vec![0.2, 0.2, 0.6], vec![1.0, 1.0, 4.0])?,
    ];
    let eps = 1e-3;
    for q in &directions {
        let d = gateaux_rb(&s, 1, q)?;
        let exact = contaminated_rb(&s, 1, q, eps)?;
        println!("{:>11}: dRB(b) = {d:+.5}, RB_eps(b) = {exact:.6} ~ {:.6}", q.kind(), s.rb()[1] + eps * d);
    }
    let q = &directions[0];
    println!("d posterior(b) = {:+.5}", gateaux_map(&s, 1, q)?);
    println!("d strength(b)  = {:+.5}", gateaux_strength_marginal(&s, 1, q)?);
    let c = &directions[2];
    println!(
        "conditional: strength constant for eps below {:.4}, derivative {}",
        strength_threshold(&s, 1, c)?,
        gateaux_strength_conditional(&s, 1, c)?
    );
    Ok(())
}

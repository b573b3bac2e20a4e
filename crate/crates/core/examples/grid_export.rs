//! Discretizes a conjugate model and runs the grid machinery on it.
use relbelief::conflict::worst_case_ratio;
use relbelief::models::GridAxis;
use relbelief::rb_core::*;
use relbelief::reproduce::example1_conflict;

fn main() -> relbelief::Result<()> {
    let m = example1_conflict();
    for cells in [200, 400, 800] {
        let (g, c) = m.grid_export(&GridAxis::new(-6.0, 10.0, cells)?)?;
        let s = build_belief_state(g, c)?;
        let est = rb_estimate(&s);
        println!(
            "{cells} cells: estimate {}, grid worst case {:.2} (closed form {:.2})",
            s.grid().label(est),
            worst_case_ratio(&s),
            m.sup_ratio()
        );
    }
    Ok(())
}

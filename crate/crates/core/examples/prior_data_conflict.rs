//! Prior predictive tail probabilities next to the worst-case ratio sup_Q m_Q(x)/m(x).
use relbelief::reproduce::*;

fn main() -> relbelief::Result<()> {
    for (name, m) in [("normal, xbar=0.2591", example1_no_conflict()), ("normal, xbar=4.0867", example1_conflict())] {
        println!("{name}: tail {:.4}, sup ratio {:.2}", m.tail_probability()?, m.sup_ratio());
    }
    for (name, m) in [("bernoulli, t=3", example2_no_conflict()), ("bernoulli, t=17", example2_conflict())] {
        println!("{name}: tail {:.3e}, sup ratio {:.2}", m.tail_probability()?, m.sup_ratio());
    }
    let m = example2_conflict();
    for (a, b) in [(20.0, 5.0), (5.0, 25.0)] {
        println!("  beta({a}, {b}) direction: {:.2}", m.beta_ratio_direction(a, b)?);
    }
    Ok(())
}

//! Turns a tabulated prior density into cell masses of width delta around psi0.
use relbelief::rb_core::discretize;

fn main() -> relbelief::Result<()> {
    // triangular density on [0, 2]
    let xs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let dens: Vec<f64> = xs.iter().map(|&x| 1.0 - (x - 1.0).abs()).collect();
    let g = discretize(&xs, &dens, 1.0, 0.25)?;
    for (l, p) in g.labels().iter().zip(g.prior_mass()) {
        println!("{l}: {p:.6}");
    }
    Ok(())
}

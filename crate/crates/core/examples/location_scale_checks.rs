//! Separate checks on the prior for sigma^2 and on the conditional prior for mu,
//! with the worst-case ratios that go with each.
use relbelief::conflict::factorization_ratio;
use relbelief::models::ScaleForm;
use relbelief::reproduce::*;

fn main() -> relbelief::Result<()> {
    for (name, m) in [("A", example3_a()), ("B", example3_b()), ("D", example3_d())] {
        println!(
            "{name}: sigma^2 tail {:.4e} (worst {:.2}), mu tail {:.4e} (worst {:.4e})",
            m.tail_pi1()?,
            m.rb1_s2_max(),
            m.tail_pi2_with(ScaleForm::Exact)?,
            m.integrated_worst_case()
        );
    }
    // joint ratio = conditional ratio x marginal ratio
    let m = example3_a();
    let (mu, tau, a, b) = (1.0, 2.0, 4.0, 6.0);
    let base = m.ln_joint_predictive_with(m.mu0, m.tau0_sq, m.alpha0, m.beta0)?;
    let f = factorization_ratio(
        (m.ln_joint_predictive_with(mu, tau, a, b)? - base).exp(),
        1.0,
        (m.ln_xbar_cond_density_with(mu, tau, a, b) - m.ln_xbar_cond_density_with(m.mu0, m.tau0_sq, m.alpha0, m.beta0)).exp(),
        1.0,
        m.s2_predictive_ratio(a, b)?,
        1.0,
    )?;
    println!("factorization: {:.12} = {:.12}", f.lhs, f.rhs);
    Ok(())
}

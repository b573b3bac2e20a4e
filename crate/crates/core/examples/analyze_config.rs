//! Runs the config-driven analysis on the bundled three-cell config.
fn main() -> relbelief::Result<()> {
    let text = include_str!("three_cell.toml");
    print!("{}", relbelief::analyze::analyze_str(text)?);
    Ok(())
}

//! Prints every reproducible table and scalar set.
use relbelief::reproduce::{reproduce, ReproId};

fn main() -> relbelief::Result<()> {
    for id in ReproId::all() {
        println!("# {id}");
        print!("{}", reproduce(id)?.to_csv(Some(6)));
    }
    Ok(())
}

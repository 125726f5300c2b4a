//! Maximal chains of admissible polygons and the nested variable sets
//! along them.

use dieudonne::deformation::{chain_strata, maximal_chains, ss_dimension};

fn main() -> dieudonne::Result<()> {
    for (f, r) in [(3, 2), (2, 2), (1, 3)] {
        println!("f={f} r={r}, supersingular dim {}", ss_dimension(f, r));
        for chain in maximal_chains(f, r)? {
            let specs = chain_strata(&chain, f, r)?;
            let steps: Vec<String> = specs
                .iter()
                .map(|s| format!("{} [{}]", s.beta.to_slope_string(f as u32), s.dim))
                .collect();
            println!("  {}", steps.join(" > "));
        }
    }
    Ok(())
}

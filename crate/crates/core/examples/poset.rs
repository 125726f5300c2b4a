//! The admissible polygons for f = 3, r = 2 and how they compare.

use dieudonne::newton::{admissible_below, compare, enumerate_admissible, AdmissibleParams, NewtonPolygon};

fn main() -> dieudonne::Result<()> {
    let params = AdmissibleParams::new(3, 2)?;
    let all = enumerate_admissible(params)?;
    for a in &all {
        println!("{}", a.to_slope_string(3));
    }
    println!();
    for (k, a) in all.iter().enumerate() {
        for b in &all[k + 1..] {
            println!("{:<22} {:?} {}", a.to_slope_string(3), compare(a, b)?, b.to_slope_string(3));
        }
    }
    let beta = NewtonPolygon::parse("1/3,1/3,2/3,2/3", 3)?;
    println!("\nbelow {}:", beta.to_slope_string(3));
    for b in admissible_below(&beta, params)? {
        println!("  {}", b.to_slope_string(3));
    }
    Ok(())
}

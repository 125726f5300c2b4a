//! The variables of each Newton stratum at f = 3, r = 2, drawn on the
//! diagram of the supersingular main part.

use dieudonne::cayley_hamilton::diagram_render;
use dieudonne::deformation::{stratum_spec, UniversalDisplay};
use dieudonne::newton::{enumerate_admissible, AdmissibleParams};
use dieudonne::witt::make_context;

fn main() -> dieudonne::Result<()> {
    let (f, r) = (3, 2);
    let ctx = make_context(2, f, 40)?;
    let ud = UniversalDisplay::supersingular(&ctx, f, r);
    let all = enumerate_admissible(AdmissibleParams::new(3, 2)?)?;
    println!("{}", diagram_render(&ud.base().to_main_part(), f, Some(&all[0])));
    for beta in &all {
        let spec = stratum_spec(beta, f, r)?;
        let vars: Vec<String> = spec.s.iter().map(|t| t.to_string()).collect();
        println!("{:<22} dim {}  {}", beta.to_slope_string(3), spec.dim, vars.join(" "));
    }
    Ok(())
}

//! Random points of each Newton stratum at f = 3, r = 2 and the polygons
//! they land on.

use dieudonne::deformation::{sample_generic, stratum_spec, UniversalDisplay};
use dieudonne::newton::{enumerate_admissible, AdmissibleParams};
use dieudonne::witt::make_context;

fn main() -> dieudonne::Result<()> {
    let (f, r) = (3, 2);
    let ctx = make_context(2, f, (2 * f * f * r + 4) as u32)?;
    let ud = UniversalDisplay::supersingular(&ctx, f, r);
    for beta in enumerate_admissible(AdmissibleParams::new(f as u32, r as u32)?)? {
        let spec = stratum_spec(&beta, f, r)?;
        let rep = sample_generic(&spec, &ud, 7, 200)?;
        println!(
            "{:<22} dim {}  exact {:>3}/{}  below {}",
            beta.to_slope_string(f as u32),
            spec.dim,
            rep.hits,
            rep.trials,
            rep.below_beta
        );
        for o in &rep.polygons_observed {
            println!("    {:>4}  {}", o.count, o.polygon.to_slope_string(f as u32));
        }
    }
    Ok(())
}

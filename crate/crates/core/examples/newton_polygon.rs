//! Newton polygon of a normal-form module, computed twice: from the
//! characteristic polynomial of the main part and from F^m directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dieudonne::cayley_hamilton::{ch_newton_polygon, ch_polynomial, diagram_render};
use dieudonne::dieudonne::{DieudonneModule, NormalFormCoeffs};
use dieudonne::witt::make_context;

fn main() -> dieudonne::Result<()> {
    let (f, r) = (3, 2);
    let ctx = make_context(2, f, 40)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let coeffs = NormalFormCoeffs::random_unit_or_zero(&ctx, f, r, &mut rng);
        let mp = coeffs.to_main_part();
        let ch = ch_newton_polygon(&mp)?;
        let oracle = DieudonneModule::from_normal_form(&coeffs)?.slopes_oracle()?;
        let vals: Vec<String> = ch_polynomial(&mp).iter().map(|c| format!("{:?}", c.valuation())).collect();
        println!("coefficient valuations: {}", vals.join(" "));
        println!("ch     {}", ch.to_slope_string(f as u32));
        println!("oracle {}", oracle.to_slope_string(f as u32));
        println!("{}", diagram_render(&mp, f, Some(&ch)));
    }
    Ok(())
}

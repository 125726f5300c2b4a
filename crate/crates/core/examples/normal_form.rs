//! Scrambles normal-form modules by a random symplectic base change and
//! recovers a normal form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dieudonne::dieudonne::{random_symplectic_base_change, DieudonneModule, NormalFormCoeffs};
use dieudonne::normal_form::normalize;
use dieudonne::witt::make_context;

fn main() -> dieudonne::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, f, r) in [(3u64, 2usize, 1usize), (2, 1, 2), (2, 3, 1)] {
        let n = (2 * f * f * r + 4) as u32;
        let ctx = make_context(p, f, n)?;
        let base = DieudonneModule::from_normal_form(&NormalFormCoeffs::random(&ctx, f, r, &mut rng))?;
        let moved = base.apply_base_change(&random_symplectic_base_change(&ctx, f, r, &mut rng))?;
        let res = normalize(&moved, n)?;
        res.verify()?;
        let out = res.module()?;
        println!("p={p} f={f} r={r}: field degree {} (ladder {:?})", res.field_extension_used, res.ladder);
        println!("  slopes {} -> {}", base.slopes_oracle()?.to_slope_string(f as u32), out.slopes_oracle()?.to_slope_string(f as u32));
        for (i, j, v) in res.coeffs.upper_entries().take(4) {
            println!("  a[{i},{j}] = {v}");
        }
    }
    Ok(())
}

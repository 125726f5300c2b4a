//! Arithmetic in W(F_9)/3^6: Frobenius, Teichmuller lifts, valuations.

use dieudonne::witt::{make_context, teichmuller, Residue, WittElement};

fn main() -> dieudonne::Result<()> {
    let ctx = make_context(3, 2, 6)?;
    println!("modulus {:?}", ctx.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    let x = WittElement::generator(&ctx);
    println!("x        = {x}");
    println!("sigma(x) = {}", x.frobenius());
    println!("sigma^2  = {}", x.frobenius_pow(2));

    let a = Residue::from_coeffs(&ctx, vec![1, 1]);
    let ta = teichmuller(&ctx, &a);
    println!("[a]      = {ta}  reduces to {:?}", ta.reduce().coeffs());
    println!("[a]^8    = {}", ta.pow_u64(8));

    let y = &(&x + &WittElement::one(&ctx)) * &WittElement::p_power(&ctx, 2);
    println!("v(y) = {:?}, y/9 = {}", y.valuation(), y.div_p_pow(2).unwrap());
    if let Some(inv) = x.inverse() {
        println!("1/x      = {inv}");
    }
    Ok(())
}

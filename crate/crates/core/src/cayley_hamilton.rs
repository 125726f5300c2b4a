//! Newton polygons read off the main part of a Frobenius matrix in block
//! normal shape, via an explicit degree-`2g` polynomial and its diagram.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::WittMatrix;
use crate::newton::{polygon_from_valuation_points, NewtonPolygon, Rational};
use crate::witt::{Valuation, WittContext, WittElement};

/// The `g × g` block `a_{i,j}` (1-based) of a Frobenius matrix of the shape
///
/// ```text
/// F X_j     = X_{j+1}                                   (j < g-1)
/// F X_{g-1} = Y_0 + Σ_i a_{i,1} X_{i-1}
/// F Y_j     = p Y_{j+1} + Σ_i p a_{i,j+2} X_{i-1}        (j < g-1)
/// F Y_{g-1} = -p X_0
/// ```
///
/// Column 1 is stored as is; columns `2..=g` are stored without the factor `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainPart {
    g: usize,
    entries: Vec<WittElement>,
    ctx: Arc<WittContext>,
}

impl MainPart {
    pub fn zero(ctx: &Arc<WittContext>, g: usize) -> Self {
        MainPart {
            g,
            entries: vec![WittElement::zero(ctx); g * g],
            ctx: ctx.clone(),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> WittElement {
        self.entries[(i - 1) * self.g + (j - 1)].clone()
    }

    pub fn entry(&self, i: usize, j: usize) -> &WittElement {
        &self.entries[(i - 1) * self.g + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: WittElement) {
        self.entries[(i - 1) * self.g + (j - 1)] = v;
    }

    pub fn frobenius_matrix(&self) -> WittMatrix {
        let g = self.g;
        let ctx = &self.ctx;
        let p = WittElement::p_power(ctx, 1);
        let mut a = WittMatrix::zeros(ctx, 2 * g, 2 * g);
        for j in 0..g.saturating_sub(1) {
            a[(j + 1, j)] = WittElement::one(ctx);
        }
        a[(g, g - 1)] = WittElement::one(ctx);
        for i in 1..=g {
            a[(i - 1, g - 1)] = self.get(i, 1);
        }
        for j in 0..g.saturating_sub(1) {
            a[(g + j + 1, g + j)] = p.clone();
            for i in 1..=g {
                a[(i - 1, g + j)] = &p * self.entry(i, j + 2);
            }
        }
        a[(0, 2 * g - 1)] = -&p;
        a
    }

    /// Extracts the main part, failing unless the matrix has exactly the
    /// block shape above. The entries of columns `2..=g` are known modulo
    /// `p^{N-1}` only.
    pub fn from_frobenius(a: &WittMatrix) -> Result<Self> {
        let n = a.rows();
        if n % 2 != 0 || n == 0 || a.cols() != n {
            return Err(Error::InvalidModule("Frobenius matrix must be 2g x 2g".into()));
        }
        let g = n / 2;
        let ctx = a.ctx();
        let shape_err = |s: usize, t: usize| {
            Error::InvalidModule(format!(
                "Frobenius matrix is not in block normal shape at entry ({s},{t})"
            ))
        };
        let mut expected = MainPart::zero(ctx, g).frobenius_matrix();
        let mut mp = MainPart::zero(ctx, g);
        for i in 1..=g {
            mp.set(i, 1, a[(i - 1, g - 1)].clone());
            expected[(i - 1, g - 1)] = a[(i - 1, g - 1)].clone();
            for j in 2..=g {
                let x = &a[(i - 1, g + j - 2)];
                let q = x.div_p().ok_or_else(|| shape_err(i - 1, g + j - 2))?;
                mp.set(i, j, q);
                expected[(i - 1, g + j - 2)] = x.clone();
            }
        }
        for s in 0..n {
            for t in 0..n {
                if a[(s, t)] != expected[(s, t)] {
                    return Err(shape_err(s, t));
                }
            }
        }
        Ok(mp)
    }

    /// First entry (row-major) that is neither a unit nor zero.
    pub fn first_invalid_entry(&self) -> Option<(usize, usize)> {
        (1..=self.g)
            .flat_map(|i| (1..=self.g).map(move |j| (i, j)))
            .find(|&(i, j)| {
                let x = self.entry(i, j);
                !x.is_zero() && !x.is_unit()
            })
    }
}

/// Coefficients `c_0, …, c_{2g}` of the polynomial, `c_d` multiplying `X^d`.
pub fn ch_polynomial(mp: &MainPart) -> Vec<WittElement> {
    let g = mp.g();
    let ctx = mp.ctx();
    let mut c = vec![WittElement::zero(ctx); 2 * g + 1];
    c[2 * g] = WittElement::one(ctx);
    c[0] = -WittElement::p_power(ctx, g as u32);
    for k in 0..g {
        for i in 1..=g - k {
            let a = mp.entry(i + k, i);
            if !a.is_zero() {
                let term = &WittElement::p_power(ctx, (i - 1) as u32)
                    * &a.frobenius_pow((g - i + 1) as i64);
                c[g + k] = &c[g + k] + &term;
            }
        }
    }
    for k in 1..g {
        for i in 1..=g - k {
            let a = mp.entry(i, i + k);
            if !a.is_zero() {
                let term = &WittElement::p_power(ctx, (i + k - 1) as u32)
                    * &a.frobenius_pow((g - i - k + 1) as i64);
                c[g - k] = &c[g - k] + &term;
            }
        }
    }
    c
}

/// Newton polygon of [`ch_polynomial`]. Only defined when every main-part
/// entry is a unit or exactly zero.
pub fn ch_newton_polygon(mp: &MainPart) -> Result<NewtonPolygon> {
    if let Some((i, j)) = mp.first_invalid_entry() {
        return Err(Error::ChValidity { i, j });
    }
    let g = mp.g();
    let coeffs = ch_polynomial(mp);
    let diagram = OortDiagram::new(mp);
    let mut points = Vec::with_capacity(2 * g + 1);
    for (deg, c) in coeffs.iter().enumerate() {
        let x = (2 * g - deg) as u32;
        let v = match c.valuation() {
            Valuation::Finite(v) => Some(Rational::from(v as i64)),
            Valuation::AtLeast(_) => None,
        };
        // with unit-or-zero entries the lowest nonzero entry in the column
        // of the diagram governs the coefficient
        let predicted = diagram.lowest_unit_at(x).map(|y| Rational::from(y as i64));
        if (1..2 * g as u32).contains(&x) && v != predicted {
            return Err(Error::HypothesisViolation(format!(
                "coefficient of X^{deg} has valuation {:?}, diagram predicts {:?}",
                v, predicted
            )));
        }
        points.push((x, v));
    }
    polygon_from_valuation_points(&points, 2 * g as u32, Rational::from(g as i64))
}

/// Status of a diagram slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotStatus {
    Unit,
    Zero,
    /// Neither a unit nor zero.
    Other,
}

/// A main-part slot placed on the diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramSlot {
    /// 1-based main-part indices.
    pub entry: (usize, usize),
    pub status: SlotStatus,
}

/// Main-part entries placed on the lattice points of the `2g × g` box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OortDiagram {
    pub g: usize,
    pub points: BTreeMap<(usize, usize), DiagramSlot>,
}

/// Diagram position of main-part entry `a_{s,t}` (1-based).
pub fn diagram_position(g: usize, s: usize, t: usize) -> (usize, usize) {
    if s >= t {
        (g - (s - t), t - 1)
    } else {
        (g + (t - s), t - 1)
    }
}

impl OortDiagram {
    pub fn new(mp: &MainPart) -> Self {
        let g = mp.g();
        let mut points = BTreeMap::new();
        for s in 1..=g {
            for t in 1..=g {
                let x = mp.entry(s, t);
                let status = if x.is_zero() {
                    SlotStatus::Zero
                } else if x.is_unit() {
                    SlotStatus::Unit
                } else {
                    SlotStatus::Other
                };
                points.insert(diagram_position(g, s, t), DiagramSlot { entry: (s, t), status });
            }
        }
        OortDiagram { g, points }
    }

    /// Smallest `y` in column `x` carrying a unit.
    pub fn lowest_unit_at(&self, x: u32) -> Option<usize> {
        self.points
            .iter()
            .filter(|((px, _), s)| *px == x as usize && s.status == SlotStatus::Unit)
            .map(|((_, y), _)| *y)
            .min()
    }

    /// Bottom row (y = 0), left to right: `1, a_{g,1}, …, a_{1,1}`.
    pub fn bottom_row(&self) -> Vec<String> {
        (0..=self.g)
            .map(|x| self.cell_text(x, 0, None))
            .collect()
    }

    fn cell_text(&self, x: usize, y: usize, f: Option<usize>) -> String {
        if (x, y) == (0, 0) {
            return "1".into();
        }
        if (x, y) == (2 * self.g, self.g) {
            return "-1".into();
        }
        match self.points.get(&(x, y)) {
            Some(slot) => entry_label(slot.entry, f),
            None => String::new(),
        }
    }
}

/// `a<s>,<t>` or, with a grading degree `f`, the deformation label
/// `t<ℓ>,<i><j>` where `s = (i-1)f + ℓ + 1`, `t = (j-1)f + ℓ + 1`.
pub fn entry_label((s, t): (usize, usize), f: Option<usize>) -> String {
    match f {
        Some(f) if (s + f - t % f) % f == 0 => {
            let l = (t - 1) % f;
            format!("t{},{}{}", l, (s - 1) / f + 1, (t - 1) / f + 1)
        }
        _ => format!("a{s},{t}"),
    }
}

/// ASCII picture of the diagram: rows `y = g … 0`, columns `x = 0 … 2g`.
///
/// Slot labels use the deformation names `t<ℓ>,<i><j>` for slots allowed by
/// the grading of degree `f`; other nonzero slots are shown as `a<s>,<t>`.
/// A trailing `*` marks unit entries. With `beta`, labels on or above the
/// polygon are bracketed and empty lattice points on it are drawn as `o`.
pub fn diagram_render(mp: &MainPart, f: usize, beta: Option<&NewtonPolygon>) -> String {
    let g = mp.g();
    let diagram = OortDiagram::new(mp);
    let above = |x: usize, y: usize| {
        beta.map(|b| Rational::from(y as i64) >= b.value_at_int(x as u32))
    };
    let on = |x: usize, y: usize| {
        beta.map_or(false, |b| Rational::from(y as i64) == b.value_at_int(x as u32))
    };
    let width = 9;
    let mut out = String::new();
    for y in (0..=g).rev() {
        let _ = write!(out, "{y:>3} |");
        for x in 0..=2 * g {
            let mut text = diagram.cell_text(x, y, Some(f));
            if let Some(slot) = diagram.points.get(&(x, y)) {
                let allowed = (slot.entry.0 + f - slot.entry.1 % f) % f == 0;
                if !allowed && slot.status == SlotStatus::Zero {
                    text.clear();
                } else if slot.status != SlotStatus::Zero {
                    text.push('*');
                }
            }
            if text.is_empty() {
                text = if on(x, y) { "o".into() } else { ".".into() };
            } else if above(x, y) == Some(true) && diagram.points.contains_key(&(x, y)) {
                text = format!("[{text}]");
            }
            let _ = write!(out, "{text:^width$}");
        }
        out.push('\n');
    }
    let _ = write!(out, "    +{}\n     ", "-".repeat(width * (2 * g + 1)));
    for x in 0..=2 * g {
        let _ = write!(out, "{x:^width$}");
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::make_context;

    #[test]
    fn rank_two_polynomial() {
        let ctx = make_context(5, 1, 6).unwrap();
        let mp = MainPart::zero(&ctx, 1);
        let c = ch_polynomial(&mp);
        assert_eq!(c, vec![WittElement::from_int(&ctx, -5), WittElement::zero(&ctx), WittElement::one(&ctx)]);
        assert_eq!(ch_newton_polygon(&mp).unwrap(), NewtonPolygon::supersingular(1));
    }

    #[test]
    fn single_diagonal_unit() {
        // expanding the double sums by hand: only (k, i) = (0, 2) survives
        let ctx = make_context(3, 2, 8).unwrap();
        let u = WittElement::generator(&ctx) + WittElement::from_int(&ctx, 2);
        assert!(u.is_unit());
        let mut mp = MainPart::zero(&ctx, 2);
        mp.set(2, 2, u.clone());
        let c = ch_polynomial(&mp);
        let p = WittElement::from_int(&ctx, 3);
        assert_eq!(c[4], WittElement::one(&ctx));
        assert_eq!(c[2], &p * &u.frobenius());
        assert_eq!(c[0], WittElement::from_int(&ctx, -9));
        assert!(c[1].is_zero() && c[3].is_zero());
    }

    #[test]
    fn frobenius_matrix_round_trip() {
        let ctx = make_context(2, 2, 10).unwrap();
        let mut mp = MainPart::zero(&ctx, 3);
        mp.set(1, 1, WittElement::from_int(&ctx, 3));
        mp.set(2, 3, WittElement::generator(&ctx));
        mp.set(3, 2, WittElement::generator(&ctx));
        let a = mp.frobenius_matrix();
        let back = MainPart::from_frobenius(&a).unwrap();
        assert_eq!(back.get(1, 1), mp.get(1, 1));
        assert!(back.get(2, 3).eq_mod_p_pow(&mp.get(2, 3), 9));
        let mut broken = a.clone();
        broken[(1, 0)] = WittElement::zero(&ctx);
        assert!(MainPart::from_frobenius(&broken).is_err());
    }

    #[test]
    fn non_unit_entry_is_refused() {
        let ctx = make_context(2, 1, 10).unwrap();
        let mut mp = MainPart::zero(&ctx, 2);
        mp.set(2, 2, WittElement::from_int(&ctx, 2));
        assert!(matches!(ch_newton_polygon(&mp), Err(Error::ChValidity { i: 2, j: 2 })));
    }

    #[test]
    fn bottom_row_order() {
        let ctx = make_context(2, 1, 6).unwrap();
        let d = OortDiagram::new(&MainPart::zero(&ctx, 3));
        assert_eq!(d.bottom_row(), vec!["1", "a3,1", "a2,1", "a1,1"]);
        let top: Vec<String> = (3..=5).map(|x| d.cell_text(x, 2, None)).collect();
        assert_eq!(top, vec!["a3,3", "a2,3", "a1,3"]);
        assert_eq!(d.cell_text(6, 3, None), "-1");
    }

    #[test]
    fn positions_are_injective_and_inside() {
        for g in 1..8 {
            let mut seen = std::collections::BTreeSet::new();
            for s in 1..=g {
                for t in 1..=g {
                    let (x, y) = diagram_position(g, s, t);
                    assert!(x <= 2 * g && y <= g);
                    assert!(seen.insert((x, y)));
                    assert!((x, y) != (0, 0) && (x, y) != (2 * g, g));
                }
            }
        }
    }
}

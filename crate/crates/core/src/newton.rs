//! Newton polygons with exact rational slopes, the "lies above" partial
//! order, and enumeration of admissible polygons for O-modules.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Largest `g = f·r` accepted by [`enumerate_admissible`].
pub const ENUMERATION_BOUND_G: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub slope: Rational,
    pub mult: u32,
}

/// A Newton polygon from `(0, 0)`, stored as strictly increasing slopes
/// with multiplicities. Collinear pieces are always merged, so structural
/// equality is polygon equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolygon {
    segments: Vec<Segment>,
}

/// Residue degree `f` and half-rank `r` of the O-module (`g = f·r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleParams {
    pub f: u32,
    pub r: u32,
}

impl AdmissibleParams {
    pub fn new(f: u32, r: u32) -> Result<Self> {
        if f == 0 || r == 0 {
            return Err(Error::InvalidParams(format!(
                "f and r must be positive (got f = {f}, r = {r})"
            )));
        }
        Ok(AdmissibleParams { f, r })
    }

    pub fn g(&self) -> u32 {
        self.f * self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolygonOrder {
    Above,
    Below,
    Equal,
    Incomparable,
}

impl NewtonPolygon {
    /// Builds a polygon from `(slope, multiplicity)` pairs in any order;
    /// equal slopes are merged.
    pub fn new(pairs: impl IntoIterator<Item = (Rational, u32)>) -> Result<Self> {
        let mut pairs: Vec<(Rational, u32)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        if pairs.is_empty() {
            return Err(Error::InvalidParams("polygon has no segments".into()));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut segments: Vec<Segment> = Vec::new();
        for (slope, mult) in pairs {
            match segments.last_mut() {
                Some(last) if last.slope == slope => last.mult += mult,
                _ => segments.push(Segment { slope, mult }),
            }
        }
        Ok(NewtonPolygon { segments })
    }

    /// Each slope in `slopes` repeated `mult` times.
    pub fn from_slopes(slopes: &[Rational], mult: u32) -> Result<Self> {
        Self::new(slopes.iter().map(|&s| (s, mult)))
    }

    /// Supersingular polygon `(1/2)^{2g}`.
    pub fn supersingular(g: u32) -> Self {
        NewtonPolygon {
            segments: vec![Segment {
                slope: Rational::new(1, 2),
                mult: 2 * g,
            }],
        }
    }

    /// Ordinary polygon `0^g 1^g`.
    pub fn ordinary(g: u32) -> Self {
        NewtonPolygon {
            segments: vec![
                Segment {
                    slope: Rational::zero(),
                    mult: g,
                },
                Segment {
                    slope: Rational::one(),
                    mult: g,
                },
            ],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total multiplicity (the width of the polygon).
    pub fn height(&self) -> u32 {
        self.segments.iter().map(|s| s.mult).sum()
    }

    /// Total rise `Σ mult·slope`.
    pub fn rise(&self) -> Rational {
        self.segments
            .iter()
            .map(|s| s.slope * Rational::from(s.mult as i64))
            .sum()
    }

    /// All slopes with multiplicity, in increasing order.
    pub fn slopes(&self) -> Vec<Rational> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat(s.slope).take(s.mult as usize))
            .collect()
    }

    /// Vertices `(x, y)` including both endpoints.
    pub fn vertices(&self) -> Vec<(u32, Rational)> {
        let mut out = vec![(0, Rational::zero())];
        let (mut x, mut y) = (0u32, Rational::zero());
        for s in &self.segments {
            x += s.mult;
            y += s.slope * Rational::from(s.mult as i64);
            out.push((x, y));
        }
        out
    }

    /// Interior vertices where the slope changes.
    pub fn breakpoints(&self) -> Vec<(u32, Rational)> {
        let v = self.vertices();
        v[1..v.len() - 1].to_vec()
    }

    /// Value of the polygon function at `x ∈ [0, height]`.
    pub fn value_at(&self, x: Rational) -> Rational {
        let mut x0 = Rational::zero();
        let mut y0 = Rational::zero();
        for s in &self.segments {
            let x1 = x0 + Rational::from(s.mult as i64);
            if x <= x1 {
                return y0 + s.slope * (x - x0);
            }
            y0 += s.slope * Rational::from(s.mult as i64);
            x0 = x1;
        }
        y0
    }

    pub fn value_at_int(&self, x: u32) -> Rational {
        self.value_at(Rational::from(x as i64))
    }

    /// `mult(λ) = mult(1 - λ)` for every slope.
    pub fn is_symmetric(&self) -> bool {
        self.segments.iter().all(|s| {
            let dual = Rational::one() - s.slope;
            self.segments
                .iter()
                .any(|t| t.slope == dual && t.mult == s.mult)
        })
    }

    pub fn has_integral_breakpoints(&self) -> bool {
        self.vertices().iter().all(|(_, y)| y.is_integer())
    }

    pub fn slopes_in_unit_interval(&self) -> bool {
        self.segments
            .iter()
            .all(|s| !s.slope.is_negative() && s.slope <= Rational::one())
    }

    /// Divides every slope by `k` (used to pass from `F^k` to `F`).
    pub fn scale_slopes(&self, k: u32) -> Self {
        NewtonPolygon {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    slope: s.slope / Rational::from(k as i64),
                    mult: s.mult,
                })
                .collect(),
        }
    }

    /// Concatenation of slope multisets (used to prepend étale and
    /// multiplicative parts).
    pub fn union(&self, other: &Self) -> Self {
        Self::new(
            self.segments
                .iter()
                .chain(&other.segments)
                .map(|s| (s.slope, s.mult)),
        )
        .expect("nonempty")
    }

    /// Area-like score used to order polygons maximal-first.
    fn area_score(&self) -> Rational {
        (0..=self.height()).map(|x| self.value_at_int(x)).sum()
    }

    /// Slopes as a `2r`-tuple with uniform multiplicity `f`, e.g.
    /// `"0,1/3,2/3,1 x3"`. Falls back to the segment form otherwise.
    pub fn to_slope_string(&self, f: u32) -> String {
        if f > 0 && self.segments.iter().all(|s| s.mult % f == 0) {
            let list: Vec<String> = self
                .segments
                .iter()
                .flat_map(|s| std::iter::repeat(fmt_ratio(&s.slope)).take((s.mult / f) as usize))
                .collect();
            format!("{} x{f}", list.join(","))
        } else {
            self.to_string()
        }
    }

    /// Parses `"0,1/3,2/3,1 x3"`: a comma-separated slope list followed by an
    /// optional uniform multiplicity (defaulting to `default_mult`).
    pub fn parse(s: &str, default_mult: u32) -> Result<Self> {
        let s = s.trim();
        let (list, mult) = match s.rsplit_once(|c: char| c.is_whitespace()) {
            Some((list, tail)) if tail.starts_with('x') || tail.starts_with('×') => {
                let digits = tail.trim_start_matches(['x', '×']);
                let mult = digits
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("multiplicity {tail:?}: {e}")))?;
                (list, mult)
            }
            _ => (s, default_mult),
        };
        let list = list.trim().trim_start_matches('(').trim_end_matches(')');
        let slopes = list
            .split(',')
            .map(|t| parse_ratio(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_slopes(&slopes, mult)
    }

    pub fn to_repr(&self) -> PolygonRepr {
        PolygonRepr {
            segments: self
                .segments
                .iter()
                .map(|s| [*s.slope.numer(), *s.slope.denom(), s.mult as i64])
                .collect(),
        }
    }

    pub fn from_repr(repr: &PolygonRepr) -> Result<Self> {
        let pairs = repr
            .segments
            .iter()
            .map(|[n, d, m]| {
                if *d <= 0 || *m <= 0 {
                    return Err(Error::Parse(format!("bad segment [{n}, {d}, {m}]")));
                }
                Ok((Rational::new(*n, *d), *m as u32))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }
}

/// JSON polygon form `{"segments": [[num, den, mult], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonRepr {
    pub segments: Vec<[i64; 3]>,
}

impl Serialize for NewtonPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolygonRepr::deserialize(d)?;
        NewtonPolygon::from_repr(&repr).map_err(serde::de::Error::custom)
    }
}

fn fmt_ratio(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = |e: std::num::ParseIntError| Error::Parse(format!("slope {s:?}: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse::<i64>().map_err(bad)?;
            let d = d.trim().parse::<i64>().map_err(bad)?;
            if d == 0 {
                return Err(Error::Parse(format!("slope {s:?} has zero denominator")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from(s.parse::<i64>().map_err(bad)?)),
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} x{}", fmt_ratio(&s.slope), s.mult)?;
        }
        write!(f, "]")
    }
}

/// True iff `np` satisfies the symmetric, integral and `f`-divisibility
/// conditions for an O-module of type `(f, r)`.
pub fn is_admissible(np: &NewtonPolygon, params: AdmissibleParams) -> bool {
    let g = params.g();
    np.height() == 2 * g
        && np.slopes_in_unit_interval()
        && np.is_symmetric()
        && np.segments.iter().all(|s| s.mult % params.f == 0)
        && np
            .vertices()
            .iter()
            .all(|(x, y)| x % params.f == 0 && y.is_integer())
}

/// Compares two polygons with the same endpoints pointwise.
pub fn compare(a: &NewtonPolygon, b: &NewtonPolygon) -> Result<PolygonOrder> {
    if a.height() != b.height() {
        return Err(Error::HeightMismatch(a.height(), b.height()));
    }
    if a.rise() != b.rise() {
        return Err(Error::InvalidParams(format!(
            "polygons end at different heights: {} vs {}",
            a.rise(),
            b.rise()
        )));
    }
    let mut some_above = false;
    let mut some_below = false;
    for x in 0..=a.height() {
        match a.value_at_int(x).cmp(&b.value_at_int(x)) {
            Ordering::Greater => some_above = true,
            Ordering::Less => some_below = true,
            Ordering::Equal => {}
        }
    }
    Ok(match (some_above, some_below) {
        (false, false) => PolygonOrder::Equal,
        (true, false) => PolygonOrder::Above,
        (false, true) => PolygonOrder::Below,
        (true, true) => PolygonOrder::Incomparable,
    })
}

/// `a ≥ b` in the partial order.
pub fn is_above_or_equal(a: &NewtonPolygon, b: &NewtonPolygon) -> Result<bool> {
    Ok(matches!(
        compare(a, b)?,
        PolygonOrder::Above | PolygonOrder::Equal
    ))
}

/// All admissible polygons for `(f, r)`, maximal first.
///
/// Walks convex vertex sequences from `(0,0)` to `(2g, g)` whose vertices
/// sit at `x ≡ 0 (mod f)` with integral `y` and whose slopes strictly
/// increase inside `[0, 1]`, keeping the symmetric ones.
pub fn enumerate_admissible(params: AdmissibleParams) -> Result<Vec<NewtonPolygon>> {
    let g = params.g();
    if g > ENUMERATION_BOUND_G {
        return Err(Error::SizeBound {
            g,
            bound: ENUMERATION_BOUND_G,
        });
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(params.f as i64, 2 * g as i64, g as i64, 0, 0, None, &mut path, &mut out);
    let mut polys: Vec<NewtonPolygon> = out
        .into_iter()
        .filter(|p: &NewtonPolygon| p.is_symmetric())
        .collect();
    sort_maximal_first(&mut polys);
    Ok(polys)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    f: i64,
    width: i64,
    height: i64,
    x: i64,
    y: i64,
    last: Option<Rational>,
    path: &mut Vec<(Rational, u32)>,
    out: &mut Vec<NewtonPolygon>,
) {
    if x == width {
        if y == height {
            out.push(NewtonPolygon::new(path.iter().copied()).expect("nonempty path"));
        }
        return;
    }
    let mut nx = x + f;
    while nx <= width {
        let dx = nx - x;
        for ny in y..=(y + dx).min(height) {
            let slope = Rational::new(ny - y, dx);
            if let Some(l) = last {
                if slope <= l {
                    continue;
                }
            }
            // Remaining slopes are ≥ this one and ≤ 1.
            let rest = width - nx;
            let rest_ratio = Rational::from(rest);
            if Rational::from(ny) + slope * rest_ratio > Rational::from(height) {
                continue;
            }
            if ny + rest < height {
                continue;
            }
            path.push((slope, dx as u32));
            walk(f, width, height, nx, ny, Some(slope), path, out);
            path.pop();
        }
        nx += f;
    }
}

/// Sorts into a linear extension of the partial order, maximal first.
pub fn sort_maximal_first(polys: &mut [NewtonPolygon]) {
    polys.sort_by(|a, b| {
        b.area_score()
            .cmp(&a.area_score())
            .then_with(|| b.slopes().cmp(&a.slopes()))
    });
}

/// Admissible `β'` with `np ≥ β'`, including `np` itself, maximal first.
pub fn admissible_below(
    np: &NewtonPolygon,
    params: AdmissibleParams,
) -> Result<Vec<NewtonPolygon>> {
    if !is_admissible(np, params) {
        return Err(Error::NotAdmissible(np.to_string()));
    }
    let all = enumerate_admissible(params)?;
    let mut out = Vec::new();
    for b in all {
        if is_above_or_equal(np, &b)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Lower convex hull of valuation points `(x, v)` from `(0, 0)` to
/// `(width, height)`. Points whose valuation is `None` (indistinguishable
/// from zero) are dropped; collinear interior points are merged.
pub fn polygon_from_valuation_points(
    points: &[(u32, Option<Rational>)],
    width: u32,
    height: Rational,
) -> Result<NewtonPolygon> {
    let bad = || Error::BadEndpoints {
        width,
        height: height.to_integer().max(0) as u32,
    };
    let mut finite: Vec<(i64, Rational)> = points
        .iter()
        .filter_map(|(x, v)| v.map(|v| (*x as i64, v)))
        .collect();
    if finite.iter().any(|(x, _)| *x > width as i64) {
        return Err(bad());
    }
    finite.sort();
    finite.dedup_by(|b, a| a.0 == b.0);
    let starts = finite.first().map(|p| *p == (0, Rational::zero()));
    let ends = finite.last().map(|p| *p == (width as i64, height));
    if starts != Some(true) || ends != Some(true) {
        return Err(bad());
    }
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for pt in finite {
        while hull.len() >= 2 {
            let (ax, ay) = hull[hull.len() - 2];
            let (bx, by) = hull[hull.len() - 1];
            // Drop b unless it lies strictly below the chord a → pt.
            let cross = (by - ay) * Rational::from(pt.0 - ax) - (pt.1 - ay) * Rational::from(bx - ax);
            if cross >= Rational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    NewtonPolygon::new(hull.windows(2).map(|w| {
        let dx = w[1].0 - w[0].0;
        ((w[1].1 - w[0].1) / Rational::from(dx), dx as u32)
    }))
}

/// Greatest common divisor of all multiplicities.
pub fn multiplicity_gcd(np: &NewtonPolygon) -> u32 {
    np.segments.iter().fold(0, |acc, s| acc.gcd(&s.mult))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn quad(a: Rational, b: Rational, c: Rational, d: Rational) -> NewtonPolygon {
        NewtonPolygon::from_slopes(&[a, b, c, d], 3).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        let p32 = AdmissibleParams::new(3, 2).unwrap();
        let np = quad(r(0, 1), r(1, 2), r(1, 2), r(1, 1));
        assert!(is_admissible(&np, p32));
        for (f, rr) in [(1, 1), (2, 3), (3, 2), (4, 1)] {
            let params = AdmissibleParams::new(f, rr).unwrap();
            assert!(is_admissible(&NewtonPolygon::ordinary(f * rr), params));
        }
        let quarter = NewtonPolygon::new([(r(1, 4), 4), (r(3, 4), 4)]).unwrap();
        assert!(!is_admissible(&quarter, AdmissibleParams::new(3, 2).unwrap()));
    }

    #[test]
    fn mutants_fail_admissibility() {
        let p = AdmissibleParams::new(3, 2).unwrap();
        // asymmetric
        let a = NewtonPolygon::new([(r(0, 1), 3), (r(1, 2), 3), (r(2, 3), 6)]).unwrap();
        assert!(!is_admissible(&a, p));
        // non-integral breakpoint (1/3 over 3 steps is fine, 1/6 over 3 is not)
        let b = NewtonPolygon::new([(r(1, 6), 3), (r(1, 2), 6), (r(5, 6), 3)]).unwrap();
        assert!(!is_admissible(&b, p));
        // wrong height
        assert!(!is_admissible(&NewtonPolygon::supersingular(5), p));
    }

    #[test]
    fn compare_examples() {
        let a = quad(r(1, 2), r(1, 2), r(1, 2), r(1, 2));
        let b = quad(r(1, 3), r(1, 2), r(1, 2), r(2, 3));
        assert_eq!(compare(&a, &b).unwrap(), PolygonOrder::Above);
        assert_eq!(compare(&b, &a).unwrap(), PolygonOrder::Below);
        let c = quad(r(0, 1), r(1, 2), r(1, 2), r(1, 1));
        let d = quad(r(1, 6), r(1, 6), r(5, 6), r(5, 6));
        assert_eq!(compare(&c, &d).unwrap(), PolygonOrder::Incomparable);
        assert_eq!(compare(&a, &a).unwrap(), PolygonOrder::Equal);
        assert!(matches!(
            compare(&a, &NewtonPolygon::supersingular(2)),
            Err(Error::HeightMismatch(12, 4))
        ));
    }

    #[test]
    fn small_enumerations() {
        let e11 = enumerate_admissible(AdmissibleParams::new(1, 1).unwrap()).unwrap();
        assert_eq!(e11, vec![NewtonPolygon::supersingular(1), NewtonPolygon::ordinary(1)]);
        let e21 = enumerate_admissible(AdmissibleParams::new(2, 1).unwrap()).unwrap();
        assert_eq!(e21, vec![NewtonPolygon::supersingular(2), NewtonPolygon::ordinary(2)]);
        assert!(matches!(
            enumerate_admissible(AdmissibleParams::new(5, 5).unwrap()),
            Err(Error::SizeBound { .. })
        ));
    }

    #[test]
    fn hull_examples() {
        let np = polygon_from_valuation_points(
            &[(0, Some(r(0, 1))), (2, Some(r(1, 1)))],
            2,
            r(1, 1),
        )
        .unwrap();
        assert_eq!(np, NewtonPolygon::supersingular(1));
        let g = 6;
        let np = polygon_from_valuation_points(
            &[(0, Some(r(0, 1))), (g, Some(r(0, 1))), (2 * g, Some(r(g as i64, 1)))],
            2 * g,
            r(g as i64, 1),
        )
        .unwrap();
        assert_eq!(np, NewtonPolygon::ordinary(g));
        let err = polygon_from_valuation_points(&[(0, Some(r(0, 1))), (3, None)], 4, r(2, 1));
        assert!(matches!(err, Err(Error::BadEndpoints { .. })));
    }

    #[test]
    fn parse_and_print() {
        let np = NewtonPolygon::parse("0,1/3,2/3,1 x3", 1).unwrap();
        assert_eq!(np.to_slope_string(3), "0,1/3,2/3,1 x3");
        assert_eq!(NewtonPolygon::parse("1/3,1/3,2/3,2/3", 3).unwrap().height(), 12);
        let json = serde_json::to_string(&np).unwrap();
        assert_eq!(json, r#"{"segments":[[0,1,3],[1,3,3],[2,3,3],[1,1,3]]}"#);
        let back: NewtonPolygon = serde_json::from_str(&json).unwrap();
        assert_eq!(back, np);
        assert!(NewtonPolygon::parse("1/0", 1).is_err());
    }
}

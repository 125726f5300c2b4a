//! Universal deformation of a normal-form module and its Newton strata.
//!
//! The deformation variables are `t^ℓ_{i,j}` with `0 ≤ ℓ < f` and
//! `1 ≤ j ≤ i ≤ r`; `t^ℓ_{i,j}` is added to main-part slot `(s, t)` with
//! `s = (i-1)f + ℓ + 1`, `t = (j-1)f + ℓ + 1` (and to its mirror).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cayley_hamilton::{ch_newton_polygon, MainPart};
use crate::dieudonne::{DieudonneModule, NormalFormCoeffs};
use crate::error::{Error, Result};
use crate::newton::{
    compare, enumerate_admissible, is_above_or_equal, is_admissible, AdmissibleParams, NewtonPolygon,
    PolygonOrder, Rational,
};
use crate::witt::{teichmuller, Residue, WittContext, WittElement};

/// Name of the generator behind every random draw.
pub const GENERATOR: &str = "ChaCha8";

/// The variable `t^ℓ_{i,j}`, `i ≥ j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TIndex {
    pub l: usize,
    pub i: usize,
    pub j: usize,
}

impl TIndex {
    /// Normalizes `(i, j)` to `i ≥ j`.
    pub fn new(l: usize, i: usize, j: usize) -> Self {
        TIndex {
            l,
            i: i.max(j),
            j: i.min(j),
        }
    }

    /// All `f·r(r+1)/2` variables.
    pub fn all(f: usize, r: usize) -> Vec<TIndex> {
        let mut out = Vec::with_capacity(f * r * (r + 1) / 2);
        for i in 1..=r {
            for j in 1..=i {
                for l in 0..f {
                    out.push(TIndex { l, i, j });
                }
            }
        }
        out
    }

    /// The 1-based main-part slot `(s, t)` with `s ≥ t`.
    pub fn slot(&self, f: usize) -> (usize, usize) {
        ((self.i - 1) * f + self.l + 1, (self.j - 1) * f + self.l + 1)
    }

    /// Diagram position `((r-k)f, (j-1)f + ℓ)` with `k = i - j`.
    pub fn position(&self, f: usize, r: usize) -> (usize, usize) {
        ((r - (self.i - self.j)) * f, (self.j - 1) * f + self.l)
    }

    /// Position of the mirrored slot `(t, s)`; `None` on the diagonal.
    pub fn mirror_position(&self, f: usize, r: usize) -> Option<(usize, usize)> {
        (self.i != self.j).then(|| ((r + (self.i - self.j)) * f, (self.i - 1) * f + self.l))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("deformation variable {s:?}; expected t<l>,<i><j>"));
        let body = s.trim().strip_prefix('t').ok_or_else(bad)?;
        let (l, ij) = body.split_once(',').ok_or_else(bad)?;
        let l = l.parse().map_err(|_| bad())?;
        let digits: Vec<usize> = ij.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(bad)?;
        match digits[..] {
            [i, j] if i > 0 && j > 0 => Ok(TIndex::new(l, i, j)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for TIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{},{}{}", self.l, self.i, self.j)
    }
}

impl Serialize for TIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The deformation over `W[[t]]` of a normal-form base point.
#[derive(Clone, Debug)]
pub struct UniversalDisplay {
    base: NormalFormCoeffs,
    tvars: Vec<TIndex>,
}

impl UniversalDisplay {
    pub fn new(base: NormalFormCoeffs) -> Self {
        let tvars = TIndex::all(base.f(), base.r());
        UniversalDisplay { base, tvars }
    }

    /// Deformation of the all-zero (supersingular) base point.
    pub fn supersingular(ctx: &Arc<WittContext>, f: usize, r: usize) -> Self {
        Self::new(NormalFormCoeffs::zero(ctx, f, r))
    }

    pub fn base(&self) -> &NormalFormCoeffs {
        &self.base
    }

    pub fn tvars(&self) -> &[TIndex] {
        &self.tvars
    }

    pub fn f(&self) -> usize {
        self.base.f()
    }

    pub fn r(&self) -> usize {
        self.base.r()
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        self.base.ctx()
    }

    /// Main part with the variables replaced by the given values.
    pub fn specialized_main_part(&self, s: &Specialization) -> Result<MainPart> {
        if !Arc::ptr_eq(s.ctx(), self.ctx()) && **s.ctx() != **self.ctx() {
            return Err(Error::ContextMismatch);
        }
        let f = self.f();
        let mut mp = self.base.to_main_part();
        for t in &self.tvars {
            let v = s
                .values
                .get(t)
                .ok_or_else(|| Error::MissingAssignment(t.to_string()))?;
            let (a, b) = t.slot(f);
            let sum = mp.get(a, b) + v.clone();
            mp.set(a, b, sum.clone());
            if a != b {
                mp.set(b, a, sum);
            }
        }
        Ok(mp)
    }

    pub fn specialize(&self, s: &Specialization) -> Result<DieudonneModule> {
        let mp = self.specialized_main_part(s)?;
        DieudonneModule::from_main_part(self.ctx(), self.f(), self.r(), &mp)
    }
}

/// Values for the deformation variables.
#[derive(Clone, Debug)]
pub struct Specialization {
    values: BTreeMap<TIndex, WittElement>,
    ctx: Arc<WittContext>,
}

impl Specialization {
    pub fn new(ctx: &Arc<WittContext>) -> Self {
        Specialization {
            values: BTreeMap::new(),
            ctx: ctx.clone(),
        }
    }

    /// Every variable set to zero.
    pub fn zero(ctx: &Arc<WittContext>, f: usize, r: usize) -> Self {
        let mut s = Self::new(ctx);
        for t in TIndex::all(f, r) {
            s.values.insert(t, WittElement::zero(ctx));
        }
        s
    }

    /// Sets `t` to the Teichmüller lift of `value`.
    pub fn set(&mut self, t: TIndex, value: &Residue) {
        self.values.insert(t, teichmuller(&self.ctx, value));
    }

    pub fn get(&self, t: &TIndex) -> Option<&WittElement> {
        self.values.get(t)
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }
}

/// The surviving variables `S(β)` and the positions of all variables.
#[derive(Clone, Debug, Serialize)]
pub struct StratumSpec {
    pub beta: NewtonPolygon,
    #[serde(rename = "S")]
    pub s: BTreeSet<TIndex>,
    pub dim: usize,
    #[serde(serialize_with = "positions_as_list")]
    pub positions: BTreeMap<TIndex, (usize, usize)>,
    #[serde(skip)]
    pub f: usize,
    #[serde(skip)]
    pub r: usize,
}

fn positions_as_list<S: serde::Serializer>(
    m: &BTreeMap<TIndex, (usize, usize)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), &[v.0, v.1])?;
    }
    map.end()
}

/// `t ∈ S(β)` iff its position lies on or above `β`.
pub fn stratum_spec(beta: &NewtonPolygon, f: usize, r: usize) -> Result<StratumSpec> {
    let params = AdmissibleParams::new(f as u32, r as u32)?;
    if !is_admissible(beta, params) {
        return Err(Error::NotAdmissible(beta.to_string()));
    }
    let mut positions = BTreeMap::new();
    let mut s = BTreeSet::new();
    for t in TIndex::all(f, r) {
        let (x, y) = t.position(f, r);
        positions.insert(t, (x, y));
        if Rational::from(y as i64) >= beta.value_at_int(x as u32) {
            s.insert(t);
        }
    }
    Ok(StratumSpec {
        beta: beta.clone(),
        dim: s.len(),
        s,
        positions,
        f,
        r,
    })
}

impl StratumSpec {
    /// Every label cell of the diagram, mirrors included, with its
    /// position: `f·r²` cells in all.
    pub fn label_cells(&self) -> Vec<(TIndex, (usize, usize))> {
        let mut out = Vec::new();
        for (t, pos) in &self.positions {
            out.push((*t, *pos));
            if let Some(m) = t.mirror_position(self.f, self.r) {
                out.push((*t, m));
            }
        }
        out.sort_by_key(|(_, (x, y))| (*y, *x));
        out
    }
}

/// `Σ_{i=1}^r ⌊i f / 2⌋`, checked against the closed two-case form.
pub fn ss_dimension(f: usize, r: usize) -> usize {
    let sum: usize = (1..=r).map(|i| i * f / 2).sum();
    let k = f / 2;
    let closed = if f % 2 == 0 {
        k * r * (r + 1) / 2
    } else {
        k * r * (r + 1) / 2 + r * r / 4
    };
    assert_eq!(sum, closed, "dimension formulas disagree at f={f}, r={r}");
    sum
}

/// Strata of a strictly decreasing chain `β_1 > β_2 > …`; their `S` sets
/// increase along the chain.
pub fn chain_strata(betas: &[NewtonPolygon], f: usize, r: usize) -> Result<Vec<StratumSpec>> {
    for (k, w) in betas.windows(2).enumerate() {
        if compare(&w[0], &w[1])? != PolygonOrder::Above {
            return Err(Error::ChainNotDecreasing(k + 1));
        }
    }
    let specs = betas
        .iter()
        .map(|b| stratum_spec(b, f, r))
        .collect::<Result<Vec<_>>>()?;
    for w in specs.windows(2) {
        assert!(w[0].s.is_subset(&w[1].s), "strata are not nested");
    }
    Ok(specs)
}

/// All maximal chains of the admissible poset, each from the supersingular
/// polygon down to the ordinary one.
pub fn maximal_chains(f: usize, r: usize) -> Result<Vec<Vec<NewtonPolygon>>> {
    let all = enumerate_admissible(AdmissibleParams::new(f as u32, r as u32)?)?;
    let n = all.len();
    let mut above = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            above[a][b] = compare(&all[a], &all[b])? == PolygonOrder::Above;
        }
    }
    // covering relation: a > b with nothing strictly between
    let covers = |a: usize, b: usize| above[a][b] && !(0..n).any(|c| above[a][c] && above[c][b]);
    let tops: Vec<usize> = (0..n).filter(|&b| !(0..n).any(|a| above[a][b])).collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = tops.into_iter().map(|t| vec![t]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("nonempty");
        let next: Vec<usize> = (0..n).filter(|&b| covers(last, b)).collect();
        if next.is_empty() {
            out.push(path.iter().map(|&k| all[k].clone()).collect());
        }
        for b in next.into_iter().rev() {
            let mut p = path.clone();
            p.push(b);
            stack.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObservedPolygon {
    pub polygon: NewtonPolygon,
    pub count: usize,
}

/// Outcome of a genericity experiment.
#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub beta: NewtonPolygon,
    #[serde(rename = "S")]
    pub s: Vec<TIndex>,
    pub dim: usize,
    pub trials: usize,
    pub hits: usize,
    pub polygons_observed: Vec<ObservedPolygon>,
    /// Trials whose polygon is not on or above `beta`.
    pub below_beta: usize,
    pub seed: u64,
    pub generator: &'static str,
}

impl GenericityReport {
    pub fn hit_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }
}

/// Specializes the variables of `S(β)` to random nonzero Teichmüller
/// values (the rest to zero) and tallies the resulting polygons.
pub fn sample_generic(
    spec: &StratumSpec,
    ud: &UniversalDisplay,
    seed: u64,
    trials: usize,
) -> Result<GenericityReport> {
    if (spec.f, spec.r) != (ud.f(), ud.r()) {
        return Err(Error::InvalidParams(format!(
            "stratum is for (f, r) = ({}, {}), display for ({}, {})",
            spec.f,
            spec.r,
            ud.f(),
            ud.r()
        )));
    }
    let ctx = ud.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally: BTreeMap<String, ObservedPolygon> = BTreeMap::new();
    let (mut hits, mut below) = (0, 0);
    for _ in 0..trials {
        let mut s = Specialization::zero(ctx, ud.f(), ud.r());
        for t in &spec.s {
            s.set(*t, &Residue::random_nonzero(ctx, &mut rng));
        }
        let mp = ud.specialized_main_part(&s)?;
        let np = match ch_newton_polygon(&mp) {
            Ok(np) => np,
            Err(Error::ChValidity { .. }) => {
                DieudonneModule::from_main_part(ctx, ud.f(), ud.r(), &mp)?.slopes_oracle()?
            }
            Err(e) => return Err(e),
        };
        if np == spec.beta {
            hits += 1;
        }
        if !is_above_or_equal(&np, &spec.beta)? {
            below += 1;
        }
        tally
            .entry(np.to_string())
            .or_insert_with(|| ObservedPolygon {
                polygon: np,
                count: 0,
            })
            .count += 1;
    }
    let mut polygons_observed: Vec<ObservedPolygon> = tally.into_values().collect();
    polygons_observed.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.polygon.slopes().cmp(&b.polygon.slopes())));
    Ok(GenericityReport {
        beta: spec.beta.clone(),
        s: spec.s.iter().copied().collect(),
        dim: spec.dim,
        trials,
        hits,
        polygons_observed,
        below_beta: below,
        seed,
        generator: GENERATOR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::make_context;

    fn ss(f: usize, r: usize) -> NewtonPolygon {
        NewtonPolygon::supersingular((f * r) as u32)
    }

    #[test]
    fn labels_round_trip() {
        let t = TIndex::new(2, 1, 2);
        assert_eq!(t, TIndex { l: 2, i: 2, j: 1 });
        assert_eq!(t.to_string(), "t2,21");
        assert_eq!(TIndex::parse("t2,21").unwrap(), t);
        assert!(TIndex::parse("x1,11").is_err());
    }

    #[test]
    fn positions_agree_with_diagram() {
        for f in 1..5 {
            for r in 1..5 {
                let g = f * r;
                for t in TIndex::all(f, r) {
                    let (s, u) = t.slot(f);
                    assert_eq!(t.position(f, r), crate::cayley_hamilton::diagram_position(g, s, u));
                    if let Some(m) = t.mirror_position(f, r) {
                        assert_eq!(m, crate::cayley_hamilton::diagram_position(g, u, s));
                    }
                }
            }
        }
    }

    #[test]
    fn supersingular_stratum_f3_r2() {
        let spec = stratum_spec(&ss(3, 2), 3, 2).unwrap();
        let names: Vec<String> = spec.s.iter().map(|t| t.to_string()).collect();
        let mut expected = vec!["t2,21", "t0,22", "t1,22", "t2,22"];
        expected.sort();
        let mut got = names.clone();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(spec.dim, 4);
        assert_eq!(spec.label_cells().len(), 12);
    }

    #[test]
    fn ordinary_stratum_is_everything() {
        for f in 1..=6 {
            for r in 1..=6 {
                let spec = stratum_spec(&NewtonPolygon::ordinary((f * r) as u32), f, r).unwrap();
                assert_eq!(spec.dim, f * r * (r + 1) / 2);
            }
        }
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(ss_dimension(3, 2), 4);
        assert_eq!(ss_dimension(2, 3), 6);
        assert_eq!(ss_dimension(1, 1), 0);
        assert!(stratum_spec(&ss(1, 1), 1, 1).unwrap().s.is_empty());
    }

    #[test]
    fn zero_specialization_is_the_base() {
        let ctx = make_context(2, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = NormalFormCoeffs::random(&ctx, 3, 2, &mut rng);
        let ud = UniversalDisplay::new(base.clone());
        let m = ud.specialize(&Specialization::zero(&ctx, 3, 2)).unwrap();
        assert_eq!(m, DieudonneModule::from_normal_form(&base).unwrap());
    }

    #[test]
    fn single_slot_specialization() {
        let ctx = make_context(2, 3, 10).unwrap();
        let ud = UniversalDisplay::supersingular(&ctx, 3, 2);
        let mut s = Specialization::zero(&ctx, 3, 2);
        s.set(TIndex::new(0, 1, 1), &Residue::one(&ctx));
        let mp = ud.specialized_main_part(&s).unwrap();
        for a in 1..=6 {
            for b in 1..=6 {
                let expect = if (a, b) == (1, 1) { WittElement::one(&ctx) } else { WittElement::zero(&ctx) };
                assert_eq!(mp.get(a, b), expect);
            }
        }
        let mut missing = Specialization::new(&ctx);
        missing.set(TIndex::new(0, 1, 1), &Residue::one(&ctx));
        assert!(matches!(ud.specialize(&missing), Err(Error::MissingAssignment(_))));
    }

    #[test]
    fn chain_checks_order() {
        let chain = vec![ss(3, 2), NewtonPolygon::ordinary(6)];
        let specs = chain_strata(&chain, 3, 2).unwrap();
        assert_eq!(specs.iter().map(|s| s.dim).collect::<Vec<_>>(), vec![4, 9]);
        let rev: Vec<NewtonPolygon> = chain.into_iter().rev().collect();
        assert!(matches!(chain_strata(&rev, 3, 2), Err(Error::ChainNotDecreasing(1))));
    }

    #[test]
    fn empty_report() {
        let ctx = make_context(2, 3, 22).unwrap();
        let ud = UniversalDisplay::supersingular(&ctx, 3, 2);
        let spec = stratum_spec(&ss(3, 2), 3, 2).unwrap();
        let rep = sample_generic(&spec, &ud, 7, 0).unwrap();
        assert_eq!((rep.trials, rep.hits), (0, 0));
        assert!(rep.polygons_observed.is_empty());
    }
}

//! Word-metric balls: BFS enumeration, word lengths, growth series,
//! growth classification and one-sided neighborhoods of finite sets.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::group::element::Element;
use crate::group::GroupSpec;

pub const DEFAULT_BUDGET_BYTES: u64 = 2 << 30;

/// Crude per-element footprint: the element itself plus its copy in the
/// lookup map, hash-table slack, sphere radius and adjacency slots.
fn element_cost(enc_len: usize, gens: usize) -> u64 {
    (2 * (56 + enc_len) + 48 + 4 + 4 * gens) as u64
}

/// Enumerated ball B(e, r). Ids are BFS order with ties inside a sphere
/// broken by the serialized form, so ids are reproducible across runs and
/// the ids of B(e, k) are exactly 0..V(k) for every k <= r.
#[derive(Debug, Clone)]
pub struct BallIndex {
    spec: GroupSpec,
    radius: u32,
    elements: Vec<Element>,
    lookup: HashMap<Element, u32>,
    sphere_of: Vec<u32>,
    /// adjacency[s][id] = id of element * s, or NO_EDGE when it leaves the ball
    adjacency: Vec<Vec<u32>>,
    growth: Vec<u64>,
}

pub const NO_EDGE: u32 = u32::MAX;

impl BallIndex {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: u32) -> &Element {
        &self.elements[id as usize]
    }

    pub fn id_of(&self, g: &Element) -> Option<u32> {
        self.lookup.get(g).copied()
    }

    pub fn word_length(&self, g: &Element) -> Option<u32> {
        self.id_of(g).map(|id| self.sphere_of[id as usize])
    }

    pub fn sphere(&self, id: u32) -> u32 {
        self.sphere_of[id as usize]
    }

    /// V(0..=r): V(k) = number of elements with word length <= k.
    pub fn growth(&self) -> &[u64] {
        &self.growth
    }

    pub fn gen_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Id of element * s for generator index s, if it stays in the ball.
    pub fn step(&self, id: u32, s: usize) -> Option<u32> {
        let t = self.adjacency[s][id as usize];
        (t != NO_EDGE).then_some(t)
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.elements.len() as u32
    }

    pub(crate) fn assemble(
        spec: GroupSpec,
        radius: u32,
        elements: Vec<Element>,
        lookup: HashMap<Element, u32>,
        sphere_of: Vec<u32>,
        adjacency: Vec<Vec<u32>>,
        growth: Vec<u64>,
    ) -> BallIndex {
        BallIndex {
            spec,
            radius,
            elements,
            lookup,
            sphere_of,
            adjacency,
            growth,
        }
    }
}

pub fn build_ball(spec: &GroupSpec, r: u32) -> Result<BallIndex> {
    build_ball_budgeted(spec, r, DEFAULT_BUDGET_BYTES)
}

pub fn build_ball_budgeted(spec: &GroupSpec, r: u32, budget_bytes: u64) -> Result<BallIndex> {
    ball_bfs(spec, r, budget_bytes, false).map(|(index, _)| index)
}

/// Like the budgeted build, but on hitting the budget keeps the largest
/// complete ball instead of failing. The flag reports truncation; the
/// returned index's radius is the radius attained.
pub fn build_ball_truncating(spec: &GroupSpec, r: u32, budget_bytes: u64) -> Result<(BallIndex, bool)> {
    ball_bfs(spec, r, budget_bytes, true)
}

fn ball_bfs(
    spec: &GroupSpec,
    r: u32,
    budget_bytes: u64,
    truncate: bool,
) -> Result<(BallIndex, bool)> {
    let gens = spec.generators();
    let mut elements = vec![spec.identity()];
    let mut lookup: HashMap<Element, u32> = HashMap::new();
    lookup.insert(spec.identity(), 0);
    let mut sphere_of = vec![0u32];
    let mut growth = vec![1u64];
    let mut used = element_cost(spec.identity().encoded().len(), gens.len());
    let mut layer_start = 0usize;
    let mut radius = r;
    let mut truncated = false;

    'layers: for k in 1..=r {
        let layer_end = elements.len();
        let mut next: Vec<(Vec<u8>, Element)> = Vec::new();
        let mut seen: HashSet<Element> = HashSet::new();
        for id in layer_start..layer_end {
            for (_, s) in gens {
                let h = elements[id].mul(s);
                if !lookup.contains_key(&h) && seen.insert(h.clone()) {
                    next.push((h.encoded(), h));
                }
            }
        }
        next.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for (enc, h) in next {
            used += element_cost(enc.len(), gens.len());
            if used > budget_bytes {
                if !truncate {
                    return Err(Error::resource(
                        "memory budget",
                        format!(
                            "ball for {spec} exceeds {budget_bytes} bytes at radius {k}; attained radius {}",
                            k - 1
                        ),
                    ));
                }
                // roll back the partial sphere, keep the complete ball below
                for g in elements.drain(layer_end..) {
                    lookup.remove(&g);
                }
                sphere_of.truncate(layer_end);
                radius = k - 1;
                truncated = true;
                break 'layers;
            }
            let id = elements.len() as u32;
            lookup.insert(h.clone(), id);
            elements.push(h);
            sphere_of.push(k);
        }
        growth.push(elements.len() as u64);
        layer_start = layer_end;
    }

    let mut adjacency = vec![vec![NO_EDGE; elements.len()]; gens.len()];
    for (si, (_, s)) in gens.iter().enumerate() {
        for (id, g) in elements.iter().enumerate() {
            if let Some(&t) = lookup.get(&g.mul(s)) {
                adjacency[si][id] = t;
            }
        }
    }

    Ok((
        BallIndex {
            spec: spec.clone(),
            radius,
            elements,
            lookup,
            sphere_of,
            adjacency,
            growth,
        },
        truncated,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn parse(s: &str) -> Result<Side> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(Error::usage(format!("unknown side `{s}`"))),
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// N_k, the k-step one-sided closure of A: one step adjoins S*N (left)
/// or N*S (right).
pub fn neighborhood(
    spec: &GroupSpec,
    a: &HashSet<Element>,
    k: u32,
    side: Side,
) -> Result<HashSet<Element>> {
    neighborhood_budgeted(spec, a, k, side, DEFAULT_BUDGET_BYTES)
}

pub fn neighborhood_budgeted(
    spec: &GroupSpec,
    a: &HashSet<Element>,
    k: u32,
    side: Side,
    budget_bytes: u64,
) -> Result<HashSet<Element>> {
    let gens = spec.generators();
    let mut out: HashSet<Element> = a.clone();
    let mut frontier: Vec<Element> = a.iter().cloned().collect();
    let mut used: u64 = out.iter().map(|g| element_cost(g.encoded().len(), 0)).sum();
    for _ in 0..k {
        let mut fresh = Vec::new();
        for g in &frontier {
            for (_, s) in gens {
                let h = match side {
                    Side::Left => s.mul(g),
                    Side::Right => g.mul(s),
                };
                if !out.contains(&h) {
                    used += element_cost(h.encoded().len(), 0);
                    if used > budget_bytes {
                        return Err(Error::resource(
                            "memory budget",
                            format!("neighborhood exceeds {budget_bytes} bytes"),
                        ));
                    }
                    out.insert(h.clone());
                    fresh.push(h);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        frontier = fresh;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthClass {
    /// Degree is estimated from the tail doubling ratio
    /// ln(V(R)/V(R/2)) / ln(R/(R/2)), which converges much faster than the
    /// global log-log slope on short series.
    Polynomial { degree: u32, residual: f64 },
    /// Rate in nats per step from the log-linear fit.
    Exponential { rate: f64, residual: f64 },
    Undetermined {
        poly_residual: f64,
        exp_residual: f64,
    },
}

/// Fits log V against log r (polynomial model) and against r (exponential
/// model) and reports the model with the smaller rms residual, or
/// Undetermined when the residuals are within 10% of each other.
pub fn classify_growth(growth: &[u64]) -> Result<GrowthClass> {
    if growth.len() < 8 {
        return Err(Error::usage(format!(
            "growth series of length {} is too short (need 8)",
            growth.len()
        )));
    }
    let logs: Vec<f64> = growth.iter().map(|&v| (v as f64).ln()).collect();
    let rs: Vec<f64> = (1..growth.len()).map(|r| r as f64).collect();
    let tail = &logs[1..];
    let log_rs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let (_, _, poly_res) = linear_fit(&log_rs, tail);
    let (rate, _, exp_res) = linear_fit(&rs, tail);
    if (poly_res - exp_res).abs() <= 0.1 * poly_res.max(exp_res) {
        return Ok(GrowthClass::Undetermined {
            poly_residual: poly_res,
            exp_residual: exp_res,
        });
    }
    if poly_res < exp_res {
        let big = growth.len() - 1;
        let half = big.div_ceil(2);
        let ratio = (growth[big] as f64 / growth[half] as f64).ln()
            / (big as f64 / half as f64).ln();
        Ok(GrowthClass::Polynomial {
            degree: ratio.round() as u32,
            residual: poly_res,
        })
    } else {
        Ok(GrowthClass::Exponential {
            rate,
            residual: exp_res,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn ball(spec: &str, r: u32) -> BallIndex {
        build_ball(&GroupSpec::parse(spec).unwrap(), r).unwrap()
    }

    #[test]
    fn z_growth() {
        let b = ball("zd:d=1", 3);
        assert_eq!(b.growth(), &[1, 3, 5, 7]);
        assert_eq!(b.word_length(&Element::Zd(vec![-2])), Some(2));
        assert_eq!(b.word_length(&Element::Zd(vec![5])), None);
    }

    #[test]
    fn z2_diamond() {
        let b = ball("zd:d=2", 2);
        assert_eq!(b.growth()[2], 13);
    }

    #[test]
    fn lamplighter_small_ball() {
        let b = ball("lamplighter:p=2", 1);
        assert_eq!(b.growth()[1], 4); // e, t, t^-1, lamp at origin
    }

    #[test]
    fn heisenberg_commutator_length() {
        let b = ball("heis", 4);
        assert_eq!(
            b.word_length(&Element::Heisenberg { a: 0, b: 0, c: 1 }),
            Some(4)
        );
    }

    #[test]
    fn bs_x4_is_shorter_than_conjugation_route() {
        let b = ball("bs:m=2", 5);
        let spec = GroupSpec::parse("bs:m=2").unwrap();
        let x4 = spec.embed_z(crate::group::ZSubgroup::BsXAxis, 4).unwrap();
        assert_eq!(b.word_length(&x4), Some(4));
    }

    #[test]
    fn ids_are_bfs_prefixes_and_deterministic() {
        let b1 = ball("heis", 4);
        let b2 = ball("heis", 4);
        for id in b1.ids() {
            assert_eq!(b1.element(id), b2.element(id));
        }
        // ids of B(e,k) form a prefix
        for k in 0..=4u32 {
            let v = b1.growth()[k as usize];
            for id in 0..v as u32 {
                assert!(b1.sphere(id) <= k);
            }
        }
    }

    #[test]
    fn adjacency_is_involutive() {
        for spec in ["zd:d=2", "heis", "lamplighter:p=2", "bs:m=2", "f2"] {
            let g = GroupSpec::parse(spec).unwrap();
            let b = build_ball(&g, 3).unwrap();
            let gens = g.generators();
            for (si, (_, s)) in gens.iter().enumerate() {
                let inv = s.inv();
                let ti = gens.iter().position(|(_, h)| *h == inv).unwrap();
                for id in b.ids() {
                    if let Some(t) = b.step(id, si) {
                        assert_eq!(b.step(t, ti), Some(id));
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_oracle_small_radii() {
        for spec in [
            "zd:d=2",
            "heis",
            "lamplighter:p=2",
            "bs:m=2",
            "hall:q=2",
            "hallq:q=2",
            "f2",
        ] {
            let g = GroupSpec::parse(spec).unwrap();
            let r = 3;
            let b = build_ball(&g, r).unwrap();
            let mut set: HashSet<Element> = HashSet::new();
            set.insert(g.identity());
            let mut frontier = vec![g.identity()];
            for _ in 0..r {
                let mut next = Vec::new();
                for e in &frontier {
                    for (_, s) in g.generators() {
                        let h = e.mul(s);
                        if set.insert(h.clone()) {
                            next.push(h);
                        }
                    }
                }
                frontier = next;
            }
            assert_eq!(set.len(), b.len(), "ball mismatch for {spec}");
            for e in &set {
                assert!(b.id_of(e).is_some());
            }
        }
    }

    #[test]
    fn symmetry_of_balls() {
        let b = ball("bs:m=2", 4);
        for id in b.ids() {
            let inv = b.element(id).inv();
            assert_eq!(b.word_length(&inv), Some(b.sphere(id)));
        }
    }

    #[test]
    fn growth_submultiplicative() {
        for spec in ["zd:d=2", "heis", "lamplighter:p=2", "bs:m=2", "f2"] {
            let b = ball(spec, 6);
            let v = b.growth();
            for a in 0..v.len() {
                for c in 0..v.len() - a {
                    assert!(v[a + c] <= v[a] * v[c], "{spec} V({})", a + c);
                }
            }
        }
    }

    #[test]
    fn classify_zd_series() {
        // closed forms keep this test independent of BFS
        let z3: Vec<u64> = (0..=12u64)
            .map(|r| (4 * r * r * r + 6 * r * r + 8 * r + 3) / 3)
            .collect();
        match classify_growth(&z3).unwrap() {
            GrowthClass::Polynomial { degree, .. } => assert_eq!(degree, 3),
            other => panic!("Z^3 classified as {other:?}"),
        }
        let z2: Vec<u64> = (0..=12u64).map(|r| 2 * r * r + 2 * r + 1).collect();
        match classify_growth(&z2).unwrap() {
            GrowthClass::Polynomial { degree, .. } => assert_eq!(degree, 2),
            other => panic!("Z^2 classified as {other:?}"),
        }
    }

    #[test]
    fn classify_exponential_series() {
        for spec in ["lamplighter:p=2", "bs:m=2"] {
            let b = ball(spec, 12);
            match classify_growth(b.growth()).unwrap() {
                GrowthClass::Exponential { rate, .. } => {
                    assert!(rate > 0.3 && rate < 1.2, "{spec} rate {rate}");
                }
                other => panic!("{spec} classified as {other:?}"),
            }
        }
    }

    #[test]
    fn classify_too_short() {
        assert!(classify_growth(&[1, 3, 5]).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let a: HashSet<Element> = [Element::Zd(vec![0])].into();
        for side in [Side::Left, Side::Right] {
            let n = neighborhood(&z, &a, 2, side).unwrap();
            let want: HashSet<Element> = (-2..=2).map(|k| Element::Zd(vec![k])).collect();
            assert_eq!(n, want);
        }

        let z2 = GroupSpec::parse("zd:d=2").unwrap();
        let square: HashSet<Element> = (0..2)
            .flat_map(|x| (0..2).map(move |y| Element::Zd(vec![x, y])))
            .collect();
        let n = neighborhood(&z2, &square, 1, Side::Right).unwrap();
        assert_eq!(n.len(), 12);
    }

    #[test]
    fn budget_error_reports_attained_radius() {
        let spec = GroupSpec::parse("f2").unwrap();
        let err = build_ball_budgeted(&spec, 8, 20_000).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("attained radius"), "{msg}");
    }
}

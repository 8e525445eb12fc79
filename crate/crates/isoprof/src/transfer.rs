//! Exact transfer operators between groups: the quotient push-down with its
//! isometry and gradient-contraction certificates, coset restriction with
//! the Fubini identity, and compression curves for embedded copies of Z.
//!
//! Everything is verified on p-th powers of norms, which stay rational.
//! Comparisons that would need p-th roots reduce to polynomial tests:
//! sqrt(hi) <= sqrt(lo) + sqrt(d) iff hi - lo - d <= 0 or
//! (hi - lo - d)^2 <= 4 lo d, and the cubic analogue for p = 3.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ball::{build_ball_truncating, BallIndex, Side, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::func::{FunctionOnBall, ValueMode, P};
use crate::group::element::Element;
use crate::group::{GroupSpec, ZSubgroup};

/// hi^(1/p) <= lo^(1/p) + d^(1/p) for nonnegative rationals, exactly.
fn radical_le(hi: &BigRational, lo: &BigRational, d: &BigRational, p: P) -> bool {
    let t = hi - lo - d;
    if !t.is_positive() {
        return true;
    }
    match p {
        P::One => false,
        P::Two => &t * &t <= BigRational::from_integer(BigInt::from(4)) * lo * d,
        // t <= 3 (lo d)^(1/3) (lo^(1/3) + d^(1/3)): the right side is the
        // unique positive root of u^3 - 27 lo d u - 27 lo d (lo + d)
        P::Three => {
            &t * &t * &t
                <= BigRational::from_integer(BigInt::from(27)) * lo * d * (&t + lo + d)
        }
        P::Inf => unreachable!("infinite p has no power identities"),
    }
}

/// The pushed-down function, stored through its fiber powers:
/// power(q) = sum of |f(g)|^p over the fiber above q. The function value is
/// power^(1/p), irrational in general; all identities are checked on the
/// powers.
#[derive(Debug, Clone)]
pub struct PushDown {
    p: P,
    power: FunctionOnBall,
}

impl PushDown {
    pub fn p(&self) -> P {
        self.p
    }

    /// Fiber powers on the quotient ball, exact.
    pub fn power(&self) -> &FunctionOnBall {
        &self.power
    }

    /// ||psi f||_p^p: the fiber powers summed.
    pub fn norm_pow(&self) -> BigRational {
        self.power.values().iter().sum()
    }

    /// Binary64 view with the roots taken, for display.
    pub fn rooted_f64(&self, quotient: &BallIndex) -> Result<FunctionOnBall> {
        let values: Vec<f64> = self
            .power
            .values()
            .iter()
            .map(|v| self.p.root_f64(v))
            .collect();
        FunctionOnBall::from_f64(quotient, &values)
    }
}

fn projection_ids(ambient: &BallIndex, quotient: &BallIndex) -> Result<Vec<u32>> {
    let gspec = ambient.spec();
    let qspec = quotient.spec();
    ambient
        .ids()
        .map(|id| {
            let q = gspec.project(qspec, ambient.element(id))?;
            // projections send generators to generators or the identity, so
            // the image of B(r) sits inside the quotient B(r)
            Ok(quotient
                .id_of(&q)
                .expect("quotient ball does not cover the projected ball"))
        })
        .collect()
}

/// psi f with psi f(q)^p = sum of |f(g)|^p over the fiber above q.
/// Exact guarantees: ||psi f||_p^p = ||f||_p^p, and the support of psi f is
/// the projection of the support of f.
pub fn push_down(
    ambient: &BallIndex,
    quotient: &BallIndex,
    f: &FunctionOnBall,
    p: P,
) -> Result<PushDown> {
    if p == P::Inf {
        return Err(Error::usage("push-down needs a finite exponent"));
    }
    if f.mode() != ValueMode::Exact {
        return Err(Error::usage(
            "push-down identities need exact values, not binary64 samples",
        ));
    }
    if quotient.radius() < ambient.radius() {
        return Err(Error::usage(format!(
            "quotient ball radius {} cannot hold the projection of a radius {} ball",
            quotient.radius(),
            ambient.radius()
        )));
    }
    let proj = projection_ids(ambient, quotient)?;
    let mut power = FunctionOnBall::zero(quotient);
    for id in ambient.ids() {
        let v = f.value(id);
        if v.is_zero() {
            continue;
        }
        let q = proj[id as usize];
        let acc = power.value(q) + p.pow_abs(v);
        power.set(q, acc);
    }
    Ok(PushDown { p, power })
}

/// One generator's contraction certificate. `ok` states that at every
/// quotient point the translate difference of psi f is bounded by the fiber
/// sum of the upstairs differences, checked in rational arithmetic; summing
/// gives ||psi f - translate||_p <= ||f - translate||_p.
#[derive(Debug, Clone)]
pub struct GeneratorContraction {
    pub generator: String,
    /// Image in the quotient, "e" when the generator dies.
    pub image: String,
    /// ||f(. s) - f||_p^p upstairs, exact.
    pub upstairs_pow: BigRational,
    /// Downstairs difference norm^p, float view for display.
    pub downstairs_pow: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct PsiReport {
    /// Fiber powers summed back equal ||f||_p^p, exactly.
    pub isometry_ok: bool,
    pub norm_pow: BigRational,
    pub contractions: Vec<GeneratorContraction>,
}

impl PsiReport {
    pub fn all_ok(&self) -> bool {
        self.isometry_ok && self.contractions.iter().all(|c| c.ok)
    }
}

/// Push f down and certify, per generator s with image t, that
/// ||psi f - translate_t psi f||_p <= ||f - translate_s f||_p, exactly.
pub fn psi_report(
    ambient: &BallIndex,
    quotient: &BallIndex,
    f: &FunctionOnBall,
    p: P,
    side: Side,
) -> Result<PsiReport> {
    if quotient.radius() < ambient.radius() + 1 {
        return Err(Error::usage(
            "contraction certificates need one spare quotient shell; enlarge the quotient ball",
        ));
    }
    let down = push_down(ambient, quotient, f, p)?;
    let norm_pow = down.norm_pow();
    let isometry_ok = norm_pow == f.norm_pow(p);
    let proj = projection_ids(ambient, quotient)?;
    let gspec = ambient.spec();
    let qspec = quotient.spec();
    let zero = BigRational::zero();

    let mut contractions = Vec::new();
    for (si, (name, s_el)) in gspec.generators().iter().enumerate() {
        let t_el = gspec.project(qspec, s_el)?;
        let trivial = t_el == qspec.identity();

        // fiber sums of the upstairs differences, complete across the rim
        let mut d = vec![BigRational::zero(); quotient.len()];
        for id in ambient.ids() {
            let fx = f.value(id);
            let fy = match side {
                Side::Right => match ambient.step(id, si) {
                    Some(t) => f.value(t),
                    None => &zero,
                },
                Side::Left => {
                    let y = s_el.inv().mul(ambient.element(id));
                    match ambient.id_of(&y) {
                        Some(t) => f.value(t),
                        None => &zero,
                    }
                }
            };
            if fx.is_zero() && fy.is_zero() {
                continue;
            }
            d[proj[id as usize] as usize] += p.pow_abs(&(fy - fx));
        }
        for y in f.support_ids() {
            let x = match side {
                Side::Right => ambient.element(y).mul(&s_el.inv()),
                Side::Left => s_el.mul(ambient.element(y)),
            };
            if ambient.id_of(&x).is_none() {
                let qx = gspec.project(qspec, &x)?;
                let qid = quotient
                    .id_of(&qx)
                    .expect("spare quotient shell covers the support collar");
                d[qid as usize] += p.pow_abs(f.value(y));
            }
        }

        let u = down.power();
        let mut ok = true;
        let mut downstairs = 0.0;
        for q in quotient.ids() {
            let uq = u.value(q);
            let next = match side {
                Side::Right => quotient.element(q).mul(&t_el),
                Side::Left => t_el.inv().mul(quotient.element(q)),
            };
            let un = match quotient.id_of(&next) {
                Some(t) => u.value(t),
                None => &zero,
            };
            let dq = &d[q as usize];
            if uq.is_zero() && un.is_zero() && dq.is_zero() {
                continue;
            }
            let (hi, lo) = if uq >= un { (uq, un) } else { (un, uq) };
            if !radical_le(hi, lo, dq, p) {
                ok = false;
            }
            let step = (p.root_f64(hi) - p.root_f64(lo)).abs();
            downstairs += match p {
                P::One => step,
                P::Two => step * step,
                P::Three => step * step * step,
                P::Inf => unreachable!(),
            };
        }

        contractions.push(GeneratorContraction {
            generator: name.clone(),
            image: if trivial {
                "e".to_string()
            } else {
                t_el.to_string()
            },
            upstairs_pow: d.iter().sum(),
            downstairs_pow: downstairs,
            ok,
        });
    }

    Ok(PsiReport {
        isometry_ok,
        norm_pow,
        contractions,
    })
}

/// The ball cut into cosets of an embedded copy of Z: one leaf per coset,
/// with the within-leaf successor structure under the subgroup generator.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    sub: ZSubgroup,
    leaves: Vec<Vec<u32>>,
    leaf_of: Vec<u32>,
    succ: Vec<Option<u32>>,
    pred: Vec<Option<u32>>,
}

impl CosetDecomposition {
    pub fn sub(&self) -> ZSubgroup {
        self.sub
    }

    pub fn leaves(&self) -> &[Vec<u32>] {
        &self.leaves
    }

    pub fn leaf_of(&self, id: u32) -> u32 {
        self.leaf_of[id as usize]
    }

    /// Within-leaf neighbor id * embed(1), when it stays in the ball.
    pub fn succ(&self, id: u32) -> Option<u32> {
        self.succ[id as usize]
    }

    pub fn pred(&self, id: u32) -> Option<u32> {
        self.pred[id as usize]
    }
}

/// Coset representative: g normalized along the subgroup direction. Two
/// elements share a representative exactly when they lie in the same coset
/// g Z.
fn coset_rep(sub: ZSubgroup, g: &Element) -> Element {
    match (sub, g) {
        (ZSubgroup::HeisenbergCenter, Element::Heisenberg { a, b, .. }) => {
            Element::Heisenberg { a: *a, b: *b, c: 0 }
        }
        (ZSubgroup::BsXAxis, Element::Bs { t, x }) => Element::Bs {
            t: *t,
            x: x.mod_one(),
        },
        // stored lamp positions are cursor-relative; anchoring them at
        // cursor 0 frees the representative of the cursor entirely
        (ZSubgroup::LamplighterCursor, Element::Lamplighter { cursor, lamps }) => {
            Element::Lamplighter {
                cursor: 0,
                lamps: lamps.shift(*cursor),
            }
        }
        (ZSubgroup::ZdAxis { axis }, Element::Zd(v)) => {
            let mut v = v.clone();
            v[axis as usize] = 0;
            Element::Zd(v)
        }
        (ZSubgroup::ZMultiples { k }, Element::Zd(v)) => {
            Element::Zd(vec![v[0].rem_euclid(k as i64)])
        }
        _ => unreachable!("subgroup validated against the ambient kind"),
    }
}

pub fn coset_decomposition(index: &BallIndex, sub: ZSubgroup) -> Result<CosetDecomposition> {
    let spec = index.spec();
    let one = spec.embed_z(sub, 1)?;
    let mut key_to_leaf: HashMap<Element, u32> = HashMap::new();
    let mut leaves: Vec<Vec<u32>> = Vec::new();
    let mut leaf_of = Vec::with_capacity(index.len());
    for id in index.ids() {
        let key = coset_rep(sub, index.element(id));
        let li = *key_to_leaf.entry(key).or_insert_with(|| {
            leaves.push(Vec::new());
            (leaves.len() - 1) as u32
        });
        leaves[li as usize].push(id);
        leaf_of.push(li);
    }
    let succ: Vec<Option<u32>> = index
        .ids()
        .map(|id| index.id_of(&index.element(id).mul(&one)))
        .collect();
    let pred: Vec<Option<u32>> = index
        .ids()
        .map(|id| index.id_of(&index.element(id).mul(&one.inv())))
        .collect();
    for id in index.ids() {
        for n in [succ[id as usize], pred[id as usize]].into_iter().flatten() {
            debug_assert_eq!(leaf_of[id as usize], leaf_of[n as usize]);
        }
    }
    Ok(CosetDecomposition {
        sub,
        leaves,
        leaf_of,
        succ,
        pred,
    })
}

#[derive(Debug, Clone)]
pub struct CosetRestriction {
    pub decomposition: CosetDecomposition,
    /// ||f_z||_p^p per leaf (the sup for p = infinity), exact.
    pub per_leaf_norm_pow: Vec<BigRational>,
    /// The leaf powers recombine to ||f||_p^p (max for p = infinity).
    pub identity_ok: bool,
}

/// Cut f along the cosets and verify the norm decomposition exactly.
pub fn restrict_to_cosets(
    index: &BallIndex,
    sub: ZSubgroup,
    f: &FunctionOnBall,
    p: P,
) -> Result<CosetRestriction> {
    let decomposition = coset_decomposition(index, sub)?;
    let per_leaf_norm_pow: Vec<BigRational> = decomposition
        .leaves
        .iter()
        .map(|leaf| match p {
            P::Inf => leaf
                .iter()
                .map(|&id| f.value(id).abs())
                .max()
                .unwrap_or_else(BigRational::zero),
            _ => leaf.iter().map(|&id| p.pow_abs(f.value(id))).sum(),
        })
        .collect();
    let combined = match p {
        P::Inf => per_leaf_norm_pow
            .iter()
            .cloned()
            .max()
            .unwrap_or_else(BigRational::zero),
        _ => per_leaf_norm_pow.iter().sum(),
    };
    Ok(CosetRestriction {
        identity_ok: combined == f.norm_pow(p),
        decomposition,
        per_leaf_norm_pow,
    })
}

/// |grad f_z|_h(x): the scale-h gradient of f restricted to the leaf of x,
/// comparing only against points of the same leaf within ambient distance h.
/// The flag mirrors the ambient gradient's: set when the index may be too
/// small to resolve every within-h comparison (support radius + h beyond
/// the index for h = 1, + 2h otherwise); unset means every value is exact.
pub fn leaf_gradient(
    index: &BallIndex,
    decomposition: &CosetDecomposition,
    f: &FunctionOnBall,
    h: u32,
    side: Side,
) -> Result<(FunctionOnBall, bool)> {
    if h == 0 {
        return Err(Error::usage("gradient scale h must be at least 1"));
    }
    let supp = f.support_radius(index).unwrap_or(0);
    let reach = if h == 1 { supp + h } else { supp + 2 * h };
    let flagged = reach > index.radius();
    let gens = index.spec().generators();
    let mut out = FunctionOnBall::zero(index);
    for id in index.ids() {
        let li = decomposition.leaf_of(id);
        let fx = f.value(id);
        let mut best = BigRational::zero();
        let mut seen: HashSet<u32> = HashSet::from([id]);
        let mut layer = vec![id];
        for _ in 0..h {
            let mut next = Vec::new();
            for &x in &layer {
                for s in 0..gens.len() {
                    let t = match side {
                        Side::Right => index.step(x, s),
                        Side::Left => index.id_of(&gens[s].1.inv().mul(index.element(x))),
                    };
                    if let Some(t) = t {
                        if seen.insert(t) {
                            if decomposition.leaf_of(t) == li {
                                let d = (f.value(t) - fx).abs();
                                if d > best {
                                    best = d;
                                }
                            }
                            next.push(t);
                        }
                    }
                }
            }
            layer = next;
        }
        out.set(id, best);
    }
    Ok((out, flagged))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressionPoint {
    pub t: u32,
    /// min |embed(n)| over |n| >= t, or the search floor when not exact.
    pub rho: u32,
    /// Exact means certified over the whole subgroup: every element outside
    /// the searched ball is longer than the reported minimum.
    pub exact: bool,
    /// An n attaining the minimum.
    pub witness: Option<i128>,
}

#[derive(Debug, Clone)]
pub struct CompressionCurve {
    pub group: String,
    pub sub: ZSubgroup,
    /// Word lengths of embed(1) and embed(-1), the larger of the two; the
    /// embedding is Lipschitz with this constant.
    pub lipschitz: Option<u32>,
    /// Radius of the ambient ball actually searched.
    pub g_radius: u32,
    /// Some points are floors, not values (ball budget ran out).
    pub truncated: bool,
    pub points: Vec<CompressionPoint>,
}

impl CompressionCurve {
    pub fn is_nondecreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[0].rho <= w[1].rho)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("t,rho,bound_kind,witness\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                pt.t,
                pt.rho,
                if pt.exact { "exact" } else { "lower" },
                pt.witness.map_or(String::new(), |n| n.to_string()),
            ));
        }
        out
    }
}

/// n with embed(n) = g, when g lies on the embedded copy.
fn z_preimage(sub: ZSubgroup, g: &Element) -> Option<i128> {
    match (sub, g) {
        (ZSubgroup::HeisenbergCenter, Element::Heisenberg { a: 0, b: 0, c }) => Some(*c as i128),
        (ZSubgroup::BsXAxis, Element::Bs { t: 0, x }) if x.is_integer() => x.floor().to_i128(),
        (ZSubgroup::LamplighterCursor, Element::Lamplighter { cursor, lamps })
            if lamps.is_empty() =>
        {
            Some(*cursor as i128)
        }
        (ZSubgroup::ZdAxis { axis }, Element::Zd(v)) => v
            .iter()
            .enumerate()
            .all(|(i, &c)| i == axis as usize || c == 0)
            .then(|| v[axis as usize] as i128),
        (ZSubgroup::ZMultiples { k }, Element::Zd(v)) => {
            (v[0] % k as i64 == 0).then(|| (v[0] / k as i64) as i128)
        }
        _ => None,
    }
}

/// Constructive length bound for some subgroup element with |n| >= t: how
/// deep a ball certainly contains a minimizer for rho(t).
fn tail_reach(sub: ZSubgroup, m: u32, t: u32) -> u32 {
    let t = t.max(1) as u64;
    match sub {
        // z^(ab) = [x^a, y^b] has length 2(a + b)
        ZSubgroup::HeisenbergCenter => {
            let mut best = u64::MAX;
            for a in 1..=(t.isqrt() + 1) {
                best = best.min(2 * (a + t.div_ceil(a)));
            }
            best as u32
        }
        // x^(m^k) = t^k x t^(-k) has length 2k + 1
        ZSubgroup::BsXAxis => {
            let mut k = 0u32;
            let mut pow = 1u64;
            while pow < t {
                pow *= m as u64;
                k += 1;
            }
            2 * k + 1
        }
        ZSubgroup::LamplighterCursor | ZSubgroup::ZdAxis { .. } => t as u32,
        ZSubgroup::ZMultiples { k } => (k as u64 * t) as u32,
    }
}

pub fn compression(spec: &GroupSpec, sub: ZSubgroup, rmax: u32) -> Result<CompressionCurve> {
    compression_budgeted(spec, sub, rmax, DEFAULT_BUDGET_BYTES)
}

/// rho(t) = min |embed(n)|_G over |n| >= t, for t <= rmax. The ambient ball
/// radius is chosen so that a minimizer provably lies inside; every point
/// with an in-ball candidate is exact, because elements outside the ball
/// are longer than any candidate found within. If the memory budget cuts
/// the ball short, the unreachable points degrade to floors.
pub fn compression_budgeted(
    spec: &GroupSpec,
    sub: ZSubgroup,
    rmax: u32,
    budget_bytes: u64,
) -> Result<CompressionCurve> {
    if rmax == 0 {
        return Err(Error::usage("compression needs rmax >= 1"));
    }
    spec.embed_z(sub, 1)?;
    let m = match spec.kind() {
        crate::group::Kind::Bs { m } => m,
        _ => 0,
    };
    let reach = tail_reach(sub, m, rmax);
    let (index, _) = build_ball_truncating(spec, reach, budget_bytes)?;

    // (|n|, length, n) for every subgroup element in the ball
    let mut cands: Vec<(u128, u32, i128)> = index
        .ids()
        .filter_map(|id| {
            z_preimage(sub, index.element(id)).map(|n| (n.unsigned_abs(), index.sphere(id), n))
        })
        .collect();
    cands.sort_unstable();
    // suffix minima by length, preferring small |n| as witness
    let mut suffix: Vec<(u32, i128)> = vec![(0, 0); cands.len()];
    let mut best: Option<(u32, i128)> = None;
    for i in (0..cands.len()).rev() {
        let (_, len, n) = cands[i];
        best = Some(match best {
            Some((bl, bn)) if bl <= len => (bl, bn),
            _ => (len, n),
        });
        suffix[i] = best.unwrap();
    }

    let mut truncated = false;
    let mut points = Vec::with_capacity(rmax as usize + 1);
    for t in 0..=rmax {
        let at = cands.partition_point(|&(a, _, _)| a < t as u128);
        if at < cands.len() {
            let (rho, n) = suffix[at];
            points.push(CompressionPoint {
                t,
                rho,
                exact: true,
                witness: Some(n),
            });
        } else {
            truncated = true;
            points.push(CompressionPoint {
                t,
                rho: index.radius() + 1,
                exact: false,
                witness: None,
            });
        }
    }

    let up = index.word_length(&spec.embed_z(sub, 1)?);
    let dn = index.word_length(&spec.embed_z(sub, -1)?);
    let lipschitz = match (up, dn) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };

    Ok(CompressionCurve {
        group: spec.to_string(),
        sub,
        lipschitz,
        g_radius: index.radius(),
        truncated,
        points,
    })
}

/// A generator word evaluating to embed(n), with the evaluation verified;
/// its length is an upper bound witness for rho(|n|).
#[derive(Debug, Clone)]
pub struct EmbedWitness {
    /// Generator indices in the ambient generator order.
    pub word: Vec<usize>,
    pub element: Element,
}

impl EmbedWitness {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

// word for x^n in BS(1,m), n >= 0: peel base-m digits, conjugating the rest
// up by t. Generator order [t, t^-1, x, x^-1].
fn bs_power_word(n: u64, m: u64, out: &mut Vec<usize>) {
    let d = n % m;
    let rest = n / m;
    out.extend(std::iter::repeat(2).take(d as usize));
    if rest > 0 {
        out.push(0);
        bs_power_word(rest, m, out);
        out.push(1);
    }
}

// word for z^n in the Heisenberg group, n >= 0: [x^a, y^b] = z^(ab), plus a
// remainder block [x^r, y] = z^r. Generator order [x, x^-1, y, y^-1].
fn heis_center_word(n: u64, out: &mut Vec<usize>) {
    if n == 0 {
        return;
    }
    let mut pick = (n, 1);
    for a in 1..=(n.isqrt() + 1) {
        let b = n / a;
        let r = n - a * b;
        let cost = 2 * (a + b) + if r > 0 { 2 * (r + 1) } else { 0 };
        if cost < 2 * (pick.0 + pick.1) + {
            let r0 = n - pick.0 * pick.1;
            if r0 > 0 { 2 * (r0 + 1) } else { 0 }
        } {
            pick = (a, b);
        }
    }
    let (a, b) = pick;
    let r = n - a * b;
    let mut block = |a: u64, b: u64| {
        out.extend(std::iter::repeat(0).take(a as usize));
        out.extend(std::iter::repeat(2).take(b as usize));
        out.extend(std::iter::repeat(1).take(a as usize));
        out.extend(std::iter::repeat(3).take(b as usize));
    };
    block(a, b);
    if r > 0 {
        block(r, 1);
    }
}

/// Build a witness word for embed(n) and verify it by evaluation.
pub fn embed_witness(spec: &GroupSpec, sub: ZSubgroup, n: i64) -> Result<EmbedWitness> {
    let target = spec.embed_z(sub, n)?;
    let a = n.unsigned_abs();
    let mut word: Vec<usize> = Vec::new();
    match sub {
        ZSubgroup::HeisenbergCenter => heis_center_word(a, &mut word),
        ZSubgroup::BsXAxis => {
            let m = match spec.kind() {
                crate::group::Kind::Bs { m } => m as u64,
                _ => unreachable!("embed_z validated the kind"),
            };
            bs_power_word(a, m, &mut word);
        }
        ZSubgroup::LamplighterCursor | ZSubgroup::ZdAxis { .. } | ZSubgroup::ZMultiples { .. } => {
            let (gen, count) = match sub {
                ZSubgroup::ZdAxis { axis } => (2 * axis as usize, a),
                ZSubgroup::ZMultiples { k } => (0, k as u64 * a),
                _ => (0, a),
            };
            word.extend(std::iter::repeat(gen).take(count as usize));
        }
    }
    if n < 0 {
        // generators come in adjacent inverse pairs, so ^1 flips a letter
        word.reverse();
        for g in &mut word {
            *g ^= 1;
        }
    }
    let got = spec.eval_word(&word);
    assert_eq!(got, target, "witness word must evaluate to the embedding");
    Ok(EmbedWitness {
        word,
        element: target,
    })
}

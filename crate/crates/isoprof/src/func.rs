//! Functions on enumerated balls, discrete gradients at scale h, and the
//! three gradient norms (max over generators, averaged, pointwise).
//!
//! All norms are exact: sums include the collar just outside the index,
//! where a translated function can still differ from zero.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ball::{BallIndex, Side};
use crate::error::{Error, Result};
use crate::group::element::Element;

/// Exponent for the L^p machinery. Three exists for the transfer
/// identities, whose cube-root comparisons still reduce to rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P {
    One,
    Two,
    Three,
    Inf,
}

impl P {
    pub fn parse(s: &str) -> Result<P> {
        match s {
            "1" => Ok(P::One),
            "2" => Ok(P::Two),
            "3" => Ok(P::Three),
            "inf" => Ok(P::Inf),
            _ => Err(Error::usage(format!(
                "unknown p `{s}` (expected 1, 2, 3 or inf)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            P::One => "1",
            P::Two => "2",
            P::Three => "3",
            P::Inf => "inf",
        }
    }

    /// |x|^p for finite p, |x| for p = infinity.
    pub fn pow_abs(&self, x: &BigRational) -> BigRational {
        match self {
            P::One | P::Inf => x.abs(),
            P::Two => x * x,
            P::Three => x * x * x.abs(),
        }
    }

    /// p-th root of a nonnegative power, as a float.
    pub fn root_f64(&self, pow: &BigRational) -> f64 {
        let x = pow.to_f64().unwrap_or(f64::NAN);
        match self {
            P::One | P::Inf => x,
            P::Two => x.sqrt(),
            P::Three => x.cbrt(),
        }
    }

    /// Scalar exponent as float (2 for p = infinity has no meaning; callers
    /// must branch on Inf before using this).
    pub fn as_f64(&self) -> f64 {
        match self {
            P::One => 1.0,
            P::Two => 2.0,
            P::Three => 3.0,
            P::Inf => f64::INFINITY,
        }
    }
}

/// How the values were produced. Arithmetic is exact in both cases
/// (binary64 inputs convert losslessly to rationals); the mode records
/// whether identities on the values say anything about an upstream
/// floating-point computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueMode {
    Exact,
    Binary64,
}

/// Dense function on a ball, indexed by element id, zero outside the index.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOnBall {
    values: Vec<BigRational>,
    mode: ValueMode,
}

impl FunctionOnBall {
    pub fn zero(index: &BallIndex) -> Self {
        FunctionOnBall {
            values: vec![BigRational::zero(); index.len()],
            mode: ValueMode::Exact,
        }
    }

    pub fn from_values(index: &BallIndex, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::usage(format!(
                "function has {} values for a ball of {} elements",
                values.len(),
                index.len()
            )));
        }
        Ok(FunctionOnBall {
            values,
            mode: ValueMode::Exact,
        })
    }

    /// Lossless conversion from binary64 samples.
    pub fn from_f64(index: &BallIndex, values: &[f64]) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::usage("value count does not match ball size"));
        }
        let values = values
            .iter()
            .map(|&v| {
                BigRational::from_float(v)
                    .ok_or_else(|| Error::numerical(format!("non-finite sample {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionOnBall {
            values,
            mode: ValueMode::Binary64,
        })
    }

    pub fn indicator(index: &BallIndex, ids: impl IntoIterator<Item = u32>) -> Self {
        let mut f = FunctionOnBall::zero(index);
        for id in ids {
            f.values[id as usize] = BigRational::from_integer(BigInt::from(1));
        }
        f
    }

    pub fn mode(&self) -> ValueMode {
        self.mode
    }

    pub fn value(&self, id: u32) -> &BigRational {
        &self.values[id as usize]
    }

    pub fn set(&mut self, id: u32, v: BigRational) {
        self.values[id as usize] = v;
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn support_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i as u32)
    }

    pub fn support_radius(&self, index: &BallIndex) -> Option<u32> {
        index_check(self, index);
        self.support_ids().map(|id| index.sphere(id)).max()
    }

    /// ||f||_p^p for finite p, sup |f| for p = infinity.
    pub fn norm_pow(&self, p: P) -> BigRational {
        match p {
            P::Inf => self
                .values
                .iter()
                .map(|v| v.abs())
                .max()
                .unwrap_or_else(BigRational::zero),
            _ => self.values.iter().map(|v| p.pow_abs(v)).sum(),
        }
    }

    pub fn norm_f64(&self, p: P) -> f64 {
        p.root_f64(&self.norm_pow(p))
    }
}

// values are indexed by id, so a mismatched index is a caller bug
fn index_check<'a>(f: &'a FunctionOnBall, index: &BallIndex) -> &'a FunctionOnBall {
    assert_eq!(f.values.len(), index.len(), "function built on another ball");
    f
}

/// f at the one-step neighbor of `g` on the requested side, reading zero
/// outside the index.
fn neighbor_value<'a>(
    index: &BallIndex,
    f: &'a FunctionOnBall,
    id: u32,
    s: usize,
    side: Side,
    zero: &'a BigRational,
) -> &'a BigRational {
    match side {
        Side::Right => match index.step(id, s) {
            Some(t) => &f.values[t as usize],
            None => zero,
        },
        Side::Left => {
            let (_, gen) = &index.spec().generators()[s];
            let h = gen.inv().mul(index.element(id));
            match index.id_of(&h) {
                Some(t) => &f.values[t as usize],
                None => zero,
            }
        }
    }
}

/// |grad f|_h(x) = sup |f(y) - f(x)| over d(x, y) <= h, on the index.
///
/// Returns the gradient and a truncation flag. The flag is set when the
/// index is too small to be conclusive: either the gradient's support can
/// continue beyond the index (support radius + h > r), or, for h >= 2,
/// neighborhoods near the rim were resolved through in-ball paths only
/// (support radius + 2h > r). With the flag unset every reported value and
/// any norm taken over the index is exact for the whole group.
pub fn gradient(
    index: &BallIndex,
    f: &FunctionOnBall,
    h: u32,
    side: Side,
) -> Result<(FunctionOnBall, bool)> {
    if h == 0 {
        return Err(Error::usage("gradient scale h must be at least 1"));
    }
    index_check(f, index);
    let supp = f.support_radius(index).unwrap_or(0);
    let reach = if h == 1 { supp + h } else { supp + 2 * h };
    let flagged = reach > index.radius();
    let gens = index.spec().generators().len();
    let mut out = FunctionOnBall::zero(index);
    out.mode = f.mode;
    for id in index.ids() {
        let fx = &f.values[id as usize];
        let mut best = BigRational::zero();
        if h == 1 {
            let mut saw_outside = false;
            for s in 0..gens {
                let fy = match side {
                    Side::Right => match index.step(id, s) {
                        Some(t) => &f.values[t as usize],
                        None => {
                            saw_outside = true;
                            continue;
                        }
                    },
                    Side::Left => {
                        let (_, gen) = &index.spec().generators()[s];
                        let y = gen.inv().mul(index.element(id));
                        match index.id_of(&y) {
                            Some(t) => &f.values[t as usize],
                            None => {
                                saw_outside = true;
                                continue;
                            }
                        }
                    }
                };
                let d = (fy - fx).abs();
                if d > best {
                    best = d;
                }
            }
            if saw_outside {
                let d = fx.abs();
                if d > best {
                    best = d;
                }
            }
        } else {
            // small BFS to depth h over in-ball neighbors
            let mut seen: HashSet<u32> = HashSet::from([id]);
            let mut layer = vec![id];
            let mut saw_outside = false;
            for _ in 0..h {
                let mut next = Vec::new();
                for &x in &layer {
                    for s in 0..gens {
                        let t = match side {
                            Side::Right => index.step(x, s),
                            Side::Left => {
                                let (_, gen) = &index.spec().generators()[s];
                                index.id_of(&gen.inv().mul(index.element(x)))
                            }
                        };
                        match t {
                            Some(t) => {
                                if seen.insert(t) {
                                    let d = (&f.values[t as usize] - fx).abs();
                                    if d > best {
                                        best = d;
                                    }
                                    next.push(t);
                                }
                            }
                            None => saw_outside = true,
                        }
                    }
                }
                layer = next;
            }
            if saw_outside {
                let d = fx.abs();
                if d > best {
                    best = d;
                }
            }
        }
        out.values[id as usize] = best;
    }
    Ok((out, flagged))
}

/// The three gradient norms of f at scale 1.
///
/// For finite p the fields hold exact p-th powers; for p = infinity they
/// hold the sup itself. avg averages over the formal generator list, so
/// repeated elements (lamplighter with p = 2) count with multiplicity.
/// Guarantees, exactly: avg <= max <= |S|^(1/p) avg and max <= pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GradNorms {
    pub p: P,
    pub max_form_pow: BigRational,
    pub avg_form_pow: BigRational,
    pub pointwise_form_pow: BigRational,
    pub gen_count: usize,
}

impl GradNorms {
    fn to_norm(&self, pw: &BigRational) -> f64 {
        self.p.root_f64(pw)
    }

    pub fn max_form(&self) -> f64 {
        self.to_norm(&self.max_form_pow)
    }

    pub fn avg_form(&self) -> f64 {
        self.to_norm(&self.avg_form_pow)
    }

    pub fn pointwise_form(&self) -> f64 {
        self.to_norm(&self.pointwise_form_pow)
    }
}

/// ||f - f(.s)||_p^p for one generator, exact over the whole group: the sum
/// over points outside the index (where f is zero but the translate is not)
/// is included by walking the support.
fn translate_diff_pow(
    index: &BallIndex,
    f: &FunctionOnBall,
    s: usize,
    side: Side,
    p: P,
) -> BigRational {
    let zero = BigRational::zero();
    let mut acc = BigRational::zero();
    let mut sup = BigRational::zero();
    for id in index.ids() {
        let fx = &f.values[id as usize];
        let fy = neighbor_value(index, f, id, s, side, &zero);
        if fx.is_zero() && fy.is_zero() {
            continue;
        }
        let d = p.pow_abs(&(fy - fx));
        match p {
            P::Inf => {
                if d > sup {
                    sup = d;
                }
            }
            _ => acc += d,
        }
    }
    // x outside the index with x.s (or s^-1 x) in the support: |0 - f(y)|
    let (_, gen) = &index.spec().generators()[s];
    for y in f.support_ids() {
        let x = match side {
            Side::Right => index.element(y).mul(&gen.inv()),
            Side::Left => gen.mul(index.element(y)),
        };
        if index.id_of(&x).is_none() {
            let d = p.pow_abs(&f.values[y as usize]);
            match p {
                P::Inf => {
                    if d > sup {
                        sup = d;
                    }
                }
                _ => acc += d,
            }
        }
    }
    match p {
        P::Inf => sup,
        _ => acc,
    }
}

pub fn grad_norms(index: &BallIndex, f: &FunctionOnBall, p: P, side: Side) -> GradNorms {
    index_check(f, index);
    let gens = index.spec().generators();
    let mut max_pow = BigRational::zero();
    let mut sum_pow = BigRational::zero();
    for s in 0..gens.len() {
        let d = translate_diff_pow(index, f, s, side, p);
        if d > max_pow {
            max_pow = d.clone();
        }
        sum_pow += d;
    }
    let avg_pow = match p {
        P::Inf => max_pow.clone(),
        _ => sum_pow / BigRational::from_integer(BigInt::from(gens.len())),
    };

    // pointwise form: || |grad f|_1 ||_p, again exact across the rim
    let mut pw_acc = BigRational::zero();
    let mut pw_sup = BigRational::zero();
    let mut tally = |v: BigRational| match p {
        P::Inf => {
            if v > pw_sup {
                pw_sup = v;
            }
        }
        _ => pw_acc += v,
    };
    for id in index.ids() {
        let fx = &f.values[id as usize];
        let mut best = BigRational::zero();
        let mut saw_outside = false;
        for s in 0..gens.len() {
            match side {
                Side::Right => match index.step(id, s) {
                    Some(t) => {
                        let d = (&f.values[t as usize] - fx).abs();
                        if d > best {
                            best = d;
                        }
                    }
                    None => saw_outside = true,
                },
                Side::Left => {
                    let y = gens[s].1.inv().mul(index.element(id));
                    match index.id_of(&y) {
                        Some(t) => {
                            let d = (&f.values[t as usize] - fx).abs();
                            if d > best {
                                best = d;
                            }
                        }
                        None => saw_outside = true,
                    }
                }
            }
        }
        if saw_outside {
            let d = fx.abs();
            if d > best {
                best = d;
            }
        }
        if !best.is_zero() {
            tally(p.pow_abs(&best));
        }
    }
    // points outside the index that see the support
    let mut outside: HashSet<Element> = HashSet::new();
    for y in f.support_ids() {
        for (_, g) in gens {
            let x = match side {
                Side::Right => index.element(y).mul(&g.inv()),
                Side::Left => g.mul(index.element(y)),
            };
            if index.id_of(&x).is_none() {
                outside.insert(x);
            }
        }
    }
    for x in outside {
        let mut best = BigRational::zero();
        for (_, g) in gens {
            let y = match side {
                Side::Right => x.mul(g),
                Side::Left => g.inv().mul(&x),
            };
            if let Some(t) = index.id_of(&y) {
                let d = f.values[t as usize].abs();
                if d > best {
                    best = d;
                }
            }
        }
        if !best.is_zero() {
            tally(p.pow_abs(&best));
        }
    }
    let pointwise_pow = match p {
        P::Inf => pw_sup,
        _ => pw_acc,
    };

    GradNorms {
        p,
        max_form_pow: max_pow,
        avg_form_pow: avg_pow,
        pointwise_form_pow: pointwise_pow,
        gen_count: gens.len(),
    }
}

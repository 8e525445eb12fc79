//! Symmetric random walks by exact convolution: return-probability
//! sequences p_2n(e), decay-model fits, and the profile/decay consistency
//! report.
//!
//! Distributions are kept as integer masses over a common denominator D^n,
//! so normalization and symmetry are exact and the rational sizes grow
//! linearly in n. The even-time return probability comes from the
//! half-time distribution: by symmetry p_2n(e) equals the squared 2-norm
//! of the n-step distribution, which halves the horizon.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::group::element::Element;
use crate::group::{GroupSpec, Kind};
use crate::profile::{sobolev_check, Phi, ProfileCurve, SobolevFit};

/// Cap on the support size of the convolved distribution before the
/// sequence is truncated.
pub const DEFAULT_SUPPORT_BUDGET: usize = 4_000_000;

/// A finitely supported symmetric probability measure on a group.
#[derive(Debug, Clone)]
pub struct WalkMeasure {
    spec: GroupSpec,
    /// Mass at the identity.
    theta: BigRational,
    /// All atoms, identity included when lazy; weights positive, sum 1,
    /// and weight(g) = weight(g^-1).
    weights: Vec<(Element, BigRational)>,
    /// Uniform over the generator list: the distance from the identity is
    /// then itself a Markov chain on a tree, which unlocks the radial
    /// computation for the free group.
    uniform: bool,
}

impl WalkMeasure {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn theta(&self) -> &BigRational {
        &self.theta
    }

    pub fn weights(&self) -> &[(Element, BigRational)] {
        &self.weights
    }

    pub fn min_weight(&self) -> BigRational {
        self.weights
            .iter()
            .map(|(_, w)| w.clone())
            .min()
            .expect("a measure has at least one atom")
    }

    /// Name used in artifact headers.
    pub fn label(&self) -> String {
        format!("{} theta={}", self.spec, self.theta)
    }

    /// Verify that repeated steps from the identity reach the whole ball
    /// of radius r: the lazy support generates the group as far as the
    /// index can see.
    pub fn covers_ball(&self, r: u32) -> Result<bool> {
        let index = crate::ball::build_ball(&self.spec, r)?;
        let mut seen = vec![false; index.len()];
        seen[index.id_of(&self.spec.identity()).expect("identity") as usize] = true;
        let mut frontier: Vec<u32> = vec![index.id_of(&self.spec.identity()).unwrap()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &id in &frontier {
                for (g, _) in &self.weights {
                    if let Some(t) = index.id_of(&index.element(id).mul(g)) {
                        if !seen[t as usize] {
                            seen[t as usize] = true;
                            next.push(t);
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(seen.into_iter().all(|s| s))
    }
}

/// theta * delta_e + (1 - theta)/|S| * sum of delta_s over the generator
/// list. Symmetric because the list is; entries repeating a group element
/// (lamplighter over Z/2) accumulate.
pub fn standard_measure(spec: &GroupSpec, theta: BigRational) -> Result<WalkMeasure> {
    if theta.is_negative() || theta >= BigRational::one() {
        return Err(Error::usage("laziness theta must lie in [0, 1)"));
    }
    let gens = spec.generators();
    let share = (BigRational::one() - &theta)
        / BigRational::from_integer(BigInt::from(gens.len() as i64));
    let mut weights: Vec<(Element, BigRational)> = Vec::new();
    if !theta.is_zero() {
        weights.push((spec.identity(), theta.clone()));
    }
    for (_, g) in gens {
        match weights.iter_mut().find(|(h, _)| h == g) {
            Some((_, w)) => *w += &share,
            None => weights.push((g.clone(), share.clone())),
        }
    }
    debug_assert!(weights.iter().map(|(_, w)| w.clone()).sum::<BigRational>() == BigRational::one());
    Ok(WalkMeasure {
        spec: spec.clone(),
        theta,
        weights,
        uniform: true,
    })
}

/// Image measure on the quotient: masses accumulate over the fibers.
/// Still symmetric, and its return probabilities dominate the original
/// walk's pointwise.
pub fn project_measure(measure: &WalkMeasure, target: &GroupSpec) -> Result<WalkMeasure> {
    let mut weights: Vec<(Element, BigRational)> = Vec::new();
    for (g, w) in &measure.weights {
        let q = measure.spec.project(target, g)?;
        match weights.iter_mut().find(|(h, _)| *h == q) {
            Some((_, acc)) => *acc += w,
            None => weights.push((q, w.clone())),
        }
    }
    let e = target.identity();
    let theta = weights
        .iter()
        .find(|(h, _)| *h == e)
        .map(|(_, w)| w.clone())
        .unwrap_or_else(BigRational::zero);
    Ok(WalkMeasure {
        spec: target.clone(),
        theta,
        weights,
        uniform: false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayPoint {
    /// Half the time: the probability index is 2n.
    pub n: u32,
    /// p_2n(e), exact.
    pub value: BigRational,
}

/// The diagonal return sequence p_2n(e) for n = 0..=attained.
#[derive(Debug, Clone)]
pub struct DecaySequence {
    pub group: String,
    pub measure: String,
    pub points: Vec<DecayPoint>,
    /// True when the support budget stopped the convolution early.
    pub truncated: bool,
}

impl DecaySequence {
    pub fn attained(&self) -> u32 {
        self.points.last().map_or(0, |p| p.n)
    }

    pub fn value_at(&self, n: u32) -> Option<&BigRational> {
        self.points
            .iter()
            .find(|p| p.n == n)
            .map(|p| &p.value)
    }

    /// Positivity and p_2(n+1) <= p_2n, exactly.
    pub fn is_nonincreasing(&self) -> bool {
        self.points.iter().all(|p| p.value.is_positive())
            && self.points.windows(2).all(|w| w[1].value <= w[0].value)
    }

    /// p_2(n+1) * p_2(n-1) >= p_2n^2, exactly. The walk operator is
    /// self-adjoint, so n -> p_2n is the moment sequence of a spectral
    /// measure and this holds with no slack.
    pub fn is_log_convex(&self) -> bool {
        self.points
            .windows(3)
            .all(|w| &w[2].value * &w[0].value >= &w[1].value * &w[1].value)
    }

    /// (largest n, p_2n(e)^(1/2n)): the window estimate of the spectral
    /// radius; bounded away from 1 only on non-amenable windows.
    pub fn root_estimate(&self) -> Option<(u32, f64)> {
        self.points
            .iter()
            .rev()
            .find(|p| p.n >= 1)
            .map(|p| (p.n, (ln_rational(&p.value) / (2.0 * p.n as f64)).exp()))
    }

    /// The subsequence with n in [lo, hi].
    pub fn window(&self, lo: u32, hi: u32) -> DecaySequence {
        DecaySequence {
            group: self.group.clone(),
            measure: self.measure.clone(),
            points: self
                .points
                .iter()
                .filter(|p| (lo..=hi).contains(&p.n))
                .cloned()
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,p2n_num,p2n_den\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.n, p.value.numer(), p.value.denom()));
        }
        out
    }
}

/// ln of a positive rational far outside the binary64 range: split off the
/// bit length, take the mantissa from the leading bits.
fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("small int").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(x: &BigRational) -> f64 {
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Integer step weights over a common denominator.
fn integer_steps(measure: &WalkMeasure) -> (Vec<(Element, BigInt)>, BigInt) {
    let mut d = BigInt::one();
    for (_, w) in &measure.weights {
        d = d.lcm(w.denom());
    }
    let steps = measure
        .weights
        .iter()
        .map(|(g, w)| (g.clone(), w.numer() * (&d / w.denom())))
        .collect();
    (steps, d)
}

fn hashed_decay(
    measure: &WalkMeasure,
    nmax: u32,
    support_budget: usize,
) -> (Vec<DecayPoint>, bool) {
    let (steps, d) = integer_steps(measure);
    let mut dist: HashMap<Element, BigInt> = HashMap::from([(measure.spec.identity(), BigInt::one())]);
    let mut points = vec![DecayPoint {
        n: 0,
        value: BigRational::one(),
    }];
    let mut denom_n = BigInt::one();
    let mut truncated = false;
    for n in 1..=nmax {
        let mut next: HashMap<Element, BigInt> = HashMap::with_capacity(dist.len() * 2);
        for (g, c) in &dist {
            for (s, w) in &steps {
                let h = g.mul(s);
                *next.entry(h).or_insert_with(BigInt::zero) += c * w;
            }
        }
        if next.len() > support_budget {
            truncated = true;
            break;
        }
        dist = next;
        denom_n *= &d;
        let sum_sq: BigInt = dist.values().map(|c| c * c).sum();
        points.push(DecayPoint {
            n,
            value: BigRational::new(sum_sq, &denom_n * &denom_n),
        });
    }
    (points, truncated)
}

/// Distance from the identity on the 4-regular tree is a birth-death
/// chain: up with 3 of 4 non-lazy quarters, down with 1. Masses are kept
/// per sphere; the 2-norm divides each sphere mass among its 4*3^(d-1)
/// points.
fn free_radial_decay(measure: &WalkMeasure, nmax: u32) -> Vec<DecayPoint> {
    let (steps, d) = integer_steps(measure);
    let w_stay: BigInt = steps
        .iter()
        .filter(|(g, _)| g == &measure.spec.identity())
        .map(|(_, w)| w.clone())
        .sum();
    let w_gen: BigInt = (&d - &w_stay) / BigInt::from(4);
    let mut mass: Vec<BigInt> = vec![BigInt::one()];
    let mut denom_n = BigInt::one();
    let mut points = vec![DecayPoint {
        n: 0,
        value: BigRational::one(),
    }];
    for n in 1..=nmax {
        let len = mass.len();
        let mut next = vec![BigInt::zero(); len + 1];
        for (dist, m) in mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            if dist == 0 {
                next[0] += m * &w_stay;
                next[1] += m * BigInt::from(4) * &w_gen;
            } else {
                next[dist] += m * &w_stay;
                next[dist + 1] += m * BigInt::from(3) * &w_gen;
                next[dist - 1] += m * &w_gen;
            }
        }
        mass = next;
        denom_n *= &d;
        let total_den = &denom_n * &denom_n;
        let mut value = BigRational::new(mass[0].clone() * &mass[0], total_den.clone());
        let mut sphere = BigInt::from(4);
        for m in mass.iter().skip(1) {
            if !m.is_zero() {
                value += BigRational::new(m * m, &total_den * &sphere);
            }
            sphere *= 3;
        }
        points.push(DecayPoint { n, value });
    }
    points
}

pub fn return_probabilities(measure: &WalkMeasure, nmax: u32) -> Result<DecaySequence> {
    return_probabilities_budgeted(measure, nmax, DEFAULT_SUPPORT_BUDGET)
}

/// p_2n(e) for n <= nmax by exact convolution; truncates (with the flag
/// set) when the distribution support outgrows the budget.
pub fn return_probabilities_budgeted(
    measure: &WalkMeasure,
    nmax: u32,
    support_budget: usize,
) -> Result<DecaySequence> {
    if nmax < 1 {
        return Err(Error::usage("return probabilities need nmax >= 1"));
    }
    let (points, truncated) = if measure.spec.kind() == Kind::F2 && measure.uniform {
        (free_radial_decay(measure, nmax), false)
    } else {
        hashed_decay(measure, nmax, support_budget)
    };
    if points.len() <= 1 {
        return Err(Error::resource(
            "walk support budget",
            format!(
                "the one-step support already exceeds {support_budget} elements"
            ),
        ));
    }
    Ok(DecaySequence {
        group: measure.spec.to_string(),
        measure: measure.label(),
        points,
        truncated,
    })
}

/// The 1-dimensional closed form: p_2n(e) = binom(2n, n) / 4^n, built
/// incrementally as p_n = p_(n-1) * (2n-1)/(2n). This is the theta = 0
/// walk on Z, usable far beyond what convolution budgets allow.
pub fn binomial_decay(nmax: u32) -> DecaySequence {
    let mut points = Vec::with_capacity(nmax as usize + 1);
    let mut p = BigRational::one();
    points.push(DecayPoint {
        n: 0,
        value: p.clone(),
    });
    for n in 1..=nmax {
        p *= BigRational::new(BigInt::from(2 * n as i64 - 1), BigInt::from(2 * n as i64));
        points.push(DecayPoint {
            n,
            value: p.clone(),
        });
    }
    DecaySequence {
        group: "zd:d=1".to_string(),
        measure: "zd:d=1 theta=0".to_string(),
        points,
        truncated: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// p ~ C n^(-alpha): regress ln p on ln n.
    Polynomial,
    /// p ~ exp(-c n^gamma): regress ln(-ln p) on ln n.
    Stretched,
}

impl DecayModel {
    pub fn parse(s: &str) -> Result<DecayModel> {
        match s {
            "poly" | "polynomial" => Ok(DecayModel::Polynomial),
            "stretched" => Ok(DecayModel::Stretched),
            other => Err(Error::usage(format!(
                "unknown decay model '{other}' (expected poly or stretched)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::Polynomial => "poly",
            DecayModel::Stretched => "stretched",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WindowFit {
    pub n_lo: u32,
    pub n_hi: u32,
    pub param: f64,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: DecayModel,
    /// alpha for the polynomial model, gamma for the stretched one.
    pub param: f64,
    /// The fitted front constant (C, respectively c).
    pub constant: f64,
    /// RMS residual of the global fit in transformed coordinates.
    pub residual: f64,
    /// The same regression on four consecutive subwindows, to expose
    /// preasymptotic drift; no claim is made beyond the measured window.
    pub windows: Vec<WindowFit>,
}

/// Fit a decay law on every point with n >= 1 (and p < 1 where the
/// stretched transform needs it).
pub fn fit_decay(seq: &DecaySequence, model: DecayModel) -> Result<FitReport> {
    let usable: Vec<(u32, f64)> = seq
        .points
        .iter()
        .filter(|p| p.n >= 1 && p.value.is_positive() && p.value < BigRational::one())
        .map(|p| (p.n, ln_rational(&p.value)))
        .collect();
    if usable.len() < 8 {
        return Err(Error::usage(format!(
            "decay fit needs at least 8 usable points, got {}",
            usable.len()
        )));
    }
    let transform = |pts: &[(u32, f64)]| -> (Vec<f64>, Vec<f64>) {
        let xs = pts.iter().map(|&(n, _)| (n as f64).ln()).collect();
        let ys = pts
            .iter()
            .map(|&(_, lnp)| match model {
                DecayModel::Polynomial => lnp,
                DecayModel::Stretched => (-lnp).ln(),
            })
            .collect();
        (xs, ys)
    };
    let (xs, ys) = transform(&usable);
    let (slope, intercept, residual) = linear_fit(&xs, &ys);
    let (param, constant) = match model {
        DecayModel::Polynomial => (-slope, intercept.exp()),
        DecayModel::Stretched => (slope, intercept.exp()),
    };
    let mut windows = Vec::new();
    let w = usable.len() / 4;
    if w >= 2 {
        for chunk in usable.chunks(w).filter(|c| c.len() >= 2) {
            let (xs, ys) = transform(chunk);
            let (s, _, _) = linear_fit(&xs, &ys);
            windows.push(WindowFit {
                n_lo: chunk.first().unwrap().0,
                n_hi: chunk.last().unwrap().0,
                param: match model {
                    DecayModel::Polynomial => -s,
                    DecayModel::Stretched => s,
                },
            });
        }
    }
    Ok(FitReport {
        model,
        param,
        constant,
        residual,
        windows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileClass {
    /// The profile barely moves on the window: non-amenable signature.
    Bounded,
    /// Grows, but much slower than any power.
    Logarithmic,
    /// A power law; the exponent is reported.
    Power,
}

impl ProfileClass {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileClass::Bounded => "bounded",
            ProfileClass::Logarithmic => "logarithmic",
            ProfileClass::Power => "power",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    Polynomial,
    Stretched,
    Exponential,
}

impl DecayClass {
    pub fn name(&self) -> &'static str {
        match self {
            DecayClass::Polynomial => "polynomial",
            DecayClass::Stretched => "stretched",
            DecayClass::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagnosticReport {
    pub group_match: bool,
    /// Least constants fitting the profile under a logarithmic envelope.
    pub log_profile: SobolevFit,
    pub profile_class: ProfileClass,
    /// ln-ln slope of the profile over its window.
    pub profile_exponent: f64,
    /// Mean ratio of successive profile increments; well below 1 reads as
    /// saturation.
    pub saturation: f64,
    pub poly: Option<FitReport>,
    pub stretched: Option<FitReport>,
    /// Window estimate of lim p_2n(e)^(1/2n).
    pub root_estimate: Option<(u32, f64)>,
    pub decay_class: DecayClass,
    pub consistent: bool,
    pub verdict: String,
}

/// Joint window report: classify the profile curve and the decay sequence
/// by their best-fitting coarse models and say whether the pair is one of
/// the three expected matches (power profile with polynomial decay,
/// logarithmic profile with stretched decay, bounded profile with
/// exponential decay). Classes are window descriptions, not limit claims;
/// the constants and windows are always part of the report.
pub fn profile_decay_diagnostic(
    curve: &ProfileCurve,
    seq: &DecaySequence,
) -> Result<DiagnosticReport> {
    let log_profile = sobolev_check(curve, Phi::Log)?;

    // profile class over the window: saturating curves advance by
    // geometrically shrinking increments; a genuine log or power curve
    // keeps marching
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.arg >= 1 && p.value > 0.0)
        .map(|p| ((p.arg as f64).ln(), p.value.ln()))
        .collect();
    let (profile_exponent, growth_ratio) = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (slope, _, _) = linear_fit(&xs, &ys);
        let ratio = (ys.last().unwrap() - ys.first().unwrap()).exp();
        (slope, ratio)
    } else {
        (0.0, 1.0)
    };
    let increments: Vec<f64> = pts
        .windows(2)
        .map(|w| w[1].1.exp() - w[0].1.exp())
        .filter(|&d| d > 1e-12)
        .collect();
    let shrink: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    let saturation = if shrink.len() >= 2 {
        shrink.iter().sum::<f64>() / shrink.len() as f64
    } else {
        1.0
    };
    let profile_class = if growth_ratio <= 1.2 || saturation <= 0.85 {
        ProfileClass::Bounded
    } else if profile_exponent >= 0.35 {
        ProfileClass::Power
    } else {
        ProfileClass::Logarithmic
    };

    // decay class: smallest RMS residual against ln p
    let poly = fit_decay(seq, DecayModel::Polynomial).ok();
    let stretched = fit_decay(seq, DecayModel::Stretched).ok();
    let usable: Vec<(f64, f64)> = seq
        .points
        .iter()
        .filter(|p| p.n >= 1 && p.value.is_positive())
        .map(|p| (p.n as f64, ln_rational(&p.value)))
        .collect();
    let rms = |f: &dyn Fn(f64) -> f64| -> f64 {
        (usable
            .iter()
            .map(|&(n, lnp)| {
                let e = lnp - f(n);
                e * e
            })
            .sum::<f64>()
            / usable.len() as f64)
            .sqrt()
    };
    let mut best = (DecayClass::Exponential, f64::INFINITY);
    if usable.len() >= 2 {
        let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = usable.iter().map(|p| p.1).collect();
        let (s, c, r) = linear_fit(&xs, &ys);
        let _ = (s, c);
        best = (DecayClass::Exponential, r);
    }
    if let Some(f) = &poly {
        let (a, lc) = (f.param, f.constant.ln());
        let r = rms(&|n: f64| lc - a * n.ln());
        if r < best.1 {
            best = (DecayClass::Polynomial, r);
        }
    }
    if let Some(f) = &stretched {
        let (g, c) = (f.param, f.constant);
        let r = rms(&|n: f64| -c * n.powf(g));
        if r < best.1 {
            best = (DecayClass::Stretched, r);
        }
    }
    let decay_class = best.0;

    let consistent = matches!(
        (profile_class, decay_class),
        (ProfileClass::Power, DecayClass::Polynomial)
            | (ProfileClass::Logarithmic, DecayClass::Stretched)
            | (ProfileClass::Bounded, DecayClass::Exponential)
    );
    let verdict = if consistent {
        match profile_class {
            ProfileClass::Power => {
                "power-law profile with polynomial return decay: consistent".to_string()
            }
            ProfileClass::Logarithmic => {
                "logarithmic profile with stretched-exponential return decay: consistent"
                    .to_string()
            }
            ProfileClass::Bounded => {
                "bounded profile with exponential return decay: consistent, non-amenable window"
                    .to_string()
            }
        }
    } else {
        format!(
            "{} profile paired with {} decay: not one of the expected matches on this window",
            profile_class.name(),
            decay_class.name()
        )
    };

    Ok(DiagnosticReport {
        group_match: seq.group == curve.group,
        log_profile,
        profile_class,
        profile_exponent,
        saturation,
        poly,
        stretched,
        root_estimate: seq.root_estimate(),
        decay_class,
        consistent,
        verdict,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CollisionEstimate {
    pub n: u32,
    pub trials: u32,
    pub hits: u32,
    pub p_hat: f64,
    /// 95% Wilson interval for p_2n(e).
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// Monte Carlo validation only: two independent n-step endpoints collide
/// with probability exactly p_2n(e). Never used for fitting; the interval
/// is there to sanity-check the exact pipeline.
pub fn collision_estimate(
    measure: &WalkMeasure,
    n: u32,
    trials: u32,
    seed: u64,
) -> Result<CollisionEstimate> {
    use rand::Rng;
    use rand::SeedableRng;
    let (steps, d) = integer_steps(measure);
    let d: u64 = d
        .to_u64()
        .ok_or_else(|| Error::usage("collision sampling needs one-step denominators below 2^64"))?;
    let mut thresholds = Vec::with_capacity(steps.len());
    let mut acc = 0u64;
    for (g, w) in &steps {
        acc += w.to_u64().expect("weights fit once the denominator does");
        thresholds.push((acc, g.clone()));
    }
    debug_assert_eq!(acc, d);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let endpoint = |rng: &mut rand_chacha::ChaCha8Rng| -> Element {
        let mut at = measure.spec.identity();
        for _ in 0..n {
            let roll = rng.gen_range(0..d);
            let step = &thresholds
                .iter()
                .find(|(t, _)| roll < *t)
                .expect("thresholds cover the range")
                .1;
            at = at.mul(step);
        }
        at
    };
    let mut hits = 0u32;
    for _ in 0..trials {
        if endpoint(&mut rng) == endpoint(&mut rng) {
            hits += 1;
        }
    }
    let t = trials as f64;
    let p_hat = hits as f64 / t;
    let z = 1.959_963_984_540_054;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p_hat + z2 / (2.0 * t)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    Ok(CollisionEstimate {
        n,
        trials,
        hits,
        p_hat,
        wilson_lo: (center - half).max(0.0),
        wilson_hi: (center + half).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::P;
    use crate::profile::{profile_in_balls, Method};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn binom_p(n: u32) -> BigRational {
        // binom(2n, n) / 4^n
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for k in 0..n {
            num *= BigInt::from(2 * n as i64 - k as i64);
            den *= BigInt::from(k as i64 + 1);
        }
        BigRational::new(num, den * BigInt::from(4).pow(n))
    }

    #[test]
    fn standard_measure_weights() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let m = standard_measure(&z, BigRational::zero()).unwrap();
        assert_eq!(m.weights().len(), 2);
        assert!(m.weights().iter().all(|(_, w)| *w == q(1, 2)));

        let lazy = standard_measure(&z, q(1, 2)).unwrap();
        assert_eq!(*lazy.theta(), q(1, 2));
        assert_eq!(lazy.weights().len(), 3);
        assert_eq!(lazy.min_weight(), q(1, 4));

        // over Z/2 the lamp generator is its own inverse and shows up once,
        // with the doubled share
        let lamp = GroupSpec::parse("lamplighter:p=2").unwrap();
        let m = standard_measure(&lamp, BigRational::zero()).unwrap();
        assert_eq!(m.weights().len(), 3);
        let lamp_gen = &lamp.generators()[2].1;
        let w = m
            .weights()
            .iter()
            .find(|(g, _)| g == lamp_gen)
            .map(|(_, w)| w.clone())
            .unwrap();
        assert_eq!(w, q(1, 2));
    }

    #[test]
    fn measure_requires_valid_theta() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        assert!(standard_measure(&z, BigRational::one()).is_err());
        assert!(standard_measure(&z, q(-1, 2)).is_err());
    }

    #[test]
    fn lazy_support_reaches_the_ball() {
        for s in ["zd:d=2", "heis", "bs:m=2"] {
            let spec = GroupSpec::parse(s).unwrap();
            let m = standard_measure(&spec, q(1, 2)).unwrap();
            assert!(m.covers_ball(3).unwrap(), "{s}");
        }
    }

    #[test]
    fn binomial_closed_form_matches_convolution() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let m = standard_measure(&z, BigRational::zero()).unwrap();
        let seq = return_probabilities(&m, 20).unwrap();
        for n in 0..=20u32 {
            assert_eq!(*seq.value_at(n).unwrap(), binom_p(n), "n={n}");
        }
        assert_eq!(*seq.value_at(1).unwrap(), q(1, 2));
        assert_eq!(*seq.value_at(2).unwrap(), q(3, 8));
        assert_eq!(*seq.value_at(5).unwrap(), q(63, 256));
        let closed = binomial_decay(20);
        for n in 0..=20u32 {
            assert_eq!(closed.value_at(n), seq.value_at(n));
        }
    }

    #[test]
    fn z2_first_return() {
        let z2 = GroupSpec::parse("zd:d=2").unwrap();
        let m = standard_measure(&z2, BigRational::zero()).unwrap();
        let seq = return_probabilities(&m, 2).unwrap();
        assert_eq!(*seq.value_at(1).unwrap(), q(1, 4));
    }

    #[test]
    fn lazy_walk_on_z() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let m = standard_measure(&z, q(1, 2)).unwrap();
        let seq = return_probabilities(&m, 6).unwrap();
        // ||mu||_2^2 = 1/4 + 1/16 + 1/16
        assert_eq!(*seq.value_at(1).unwrap(), q(3, 8));
        assert!(seq.is_nonincreasing());
        assert!(seq.is_log_convex());
    }

    #[test]
    fn normalization_and_symmetry_preserved() {
        for s in ["heis", "lamplighter:p=3", "bs:m=3", "hall:q=2"] {
            let spec = GroupSpec::parse(s).unwrap();
            let m = standard_measure(&spec, q(1, 3)).unwrap();
            let (steps, d) = integer_steps(&m);
            let mut dist: HashMap<Element, BigInt> =
                HashMap::from([(spec.identity(), BigInt::one())]);
            for n in 1..=4u32 {
                let mut next: HashMap<Element, BigInt> = HashMap::new();
                for (g, c) in &dist {
                    for (s_el, w) in &steps {
                        *next.entry(g.mul(s_el)).or_insert_with(BigInt::zero) += c * w;
                    }
                }
                dist = next;
                let total: BigInt = dist.values().cloned().sum();
                assert_eq!(total, d.clone().pow(n), "mass escapes at step {n}");
                for (g, c) in &dist {
                    assert_eq!(dist.get(&g.inv()), Some(c), "asymmetric at step {n}");
                }
            }
        }
    }

    #[test]
    fn monotone_and_log_convex_everywhere() {
        for (s, nmax) in [("zd:d=1", 10), ("heis", 6), ("lamplighter:p=2", 6), ("bs:m=2", 6)] {
            let spec = GroupSpec::parse(s).unwrap();
            for theta in [BigRational::zero(), q(1, 2)] {
                let m = standard_measure(&spec, theta).unwrap();
                let seq = return_probabilities(&m, nmax).unwrap();
                assert!(seq.is_nonincreasing(), "{s}");
                assert!(seq.is_log_convex(), "{s}");
            }
        }
    }

    #[test]
    fn half_time_identity_matches_direct_convolution() {
        for s in ["zd:d=2", "bs:m=2"] {
            let spec = GroupSpec::parse(s).unwrap();
            let m = standard_measure(&spec, q(1, 4)).unwrap();
            let seq = return_probabilities(&m, 6).unwrap();
            // direct 2n-fold convolution, no squaring shortcut
            let (steps, d) = integer_steps(&m);
            let mut dist: HashMap<Element, BigInt> =
                HashMap::from([(spec.identity(), BigInt::one())]);
            for step in 1..=12u32 {
                let mut next: HashMap<Element, BigInt> = HashMap::new();
                for (g, c) in &dist {
                    for (s_el, w) in &steps {
                        *next.entry(g.mul(s_el)).or_insert_with(BigInt::zero) += c * w;
                    }
                }
                dist = next;
                if step % 2 == 0 {
                    let at_e = dist
                        .get(&spec.identity())
                        .cloned()
                        .unwrap_or_else(BigInt::zero);
                    let direct = BigRational::new(at_e, d.clone().pow(step));
                    assert_eq!(direct, *seq.value_at(step / 2).unwrap(), "{s} 2n={step}");
                }
            }
        }
    }

    #[test]
    fn free_group_radial_path_matches_hashed_convolution() {
        let f2 = GroupSpec::parse("f2").unwrap();
        for theta in [BigRational::zero(), q(1, 2)] {
            let m = standard_measure(&f2, theta).unwrap();
            let radial = free_radial_decay(&m, 6);
            let (hashed, truncated) = hashed_decay(&m, 6, usize::MAX);
            assert!(!truncated);
            assert_eq!(radial, hashed);
        }
    }

    #[test]
    fn free_group_root_estimate_sits_in_the_bracket() {
        let f2 = GroupSpec::parse("f2").unwrap();
        let m = standard_measure(&f2, BigRational::zero()).unwrap();
        let seq = return_probabilities(&m, 200).unwrap();
        assert!(seq.is_nonincreasing());
        assert!(seq.is_log_convex());
        let (n, root) = seq.root_estimate().unwrap();
        assert_eq!(n, 200);
        // sqrt(3)/2 = 0.866... is the limit; the window sits just below
        assert!((0.84..0.89).contains(&root), "root {root}");
    }

    #[test]
    fn truncation_respects_budget() {
        let z2 = GroupSpec::parse("zd:d=2").unwrap();
        let m = standard_measure(&z2, BigRational::zero()).unwrap();
        let seq = return_probabilities_budgeted(&m, 50, 100).unwrap();
        assert!(seq.truncated);
        assert!(seq.attained() < 50);
        assert!(seq.attained() >= 3);
        // support of mu^n is the even sublattice of the n-ball
        assert_eq!(seq.points.len() as u32, seq.attained() + 1);
    }

    #[test]
    fn quotient_walks_dominate() {
        for (g, qn) in [("bs:m=2", "zd:d=1"), ("heis", "zd:d=2")] {
            let gspec = GroupSpec::parse(g).unwrap();
            let qspec = GroupSpec::parse(qn).unwrap();
            let m = standard_measure(&gspec, q(1, 4)).unwrap();
            let mq = project_measure(&m, &qspec).unwrap();
            let total: BigRational = mq.weights().iter().map(|(_, w)| w.clone()).sum();
            assert_eq!(total, BigRational::one());
            let up = return_probabilities(&m, 6).unwrap();
            let down = return_probabilities(&mq, 6).unwrap();
            for n in 1..=6 {
                assert!(
                    up.value_at(n).unwrap() <= down.value_at(n).unwrap(),
                    "{g} n={n}"
                );
            }
        }
    }

    #[test]
    fn polynomial_fit_recovers_the_z_exponent() {
        let seq = binomial_decay(500).window(50, 500);
        let fit = fit_decay(&seq, DecayModel::Polynomial).unwrap();
        assert!((0.48..=0.52).contains(&fit.param), "alpha {}", fit.param);
        assert!(fit.windows.len() >= 3);
        for w in &fit.windows {
            assert!((0.4..0.6).contains(&w.param));
        }
    }

    #[test]
    fn stretched_fit_on_the_wreath_walk() {
        let spec = GroupSpec::parse("lamplighter:p=2").unwrap();
        let m = standard_measure(&spec, q(1, 2)).unwrap();
        let seq = return_probabilities(&m, 12).unwrap();
        let fit = fit_decay(&seq, DecayModel::Stretched).unwrap();
        assert!((0.2..=0.5).contains(&fit.param), "gamma {}", fit.param);
        assert!(!fit.windows.is_empty());
    }

    #[test]
    fn fits_need_enough_points() {
        let seq = binomial_decay(5);
        assert!(fit_decay(&seq, DecayModel::Polynomial).is_err());
    }

    #[test]
    fn collision_estimator_brackets_the_exact_value() {
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let m = standard_measure(&z, BigRational::zero()).unwrap();
        let est = collision_estimate(&m, 3, 4000, 0x5eed).unwrap();
        // p_6(e) = 5/16
        let exact = 0.3125;
        assert!(est.wilson_lo <= exact && exact <= est.wilson_hi);
        assert!(est.wilson_hi - est.wilson_lo < 0.06);
    }

    #[test]
    fn diagnostic_pairs_the_three_regimes() {
        // power profile + polynomial decay on Z
        let z = GroupSpec::parse("zd:d=1").unwrap();
        let curve = profile_in_balls(&z, P::Two, 12, Method::Spectral).unwrap();
        let seq = binomial_decay(200).window(20, 200);
        let report = profile_decay_diagnostic(&curve, &seq).unwrap();
        assert!(report.group_match);
        assert_eq!(report.profile_class, ProfileClass::Power);
        assert_eq!(report.decay_class, DecayClass::Polynomial);
        assert!(report.consistent, "{}", report.verdict);

        // bounded profile + exponential decay on the free group
        let f2 = GroupSpec::parse("f2").unwrap();
        let curve = profile_in_balls(&f2, P::Two, 6, Method::Spectral).unwrap();
        let m = standard_measure(&f2, BigRational::zero()).unwrap();
        let seq = return_probabilities(&m, 60).unwrap().window(10, 60);
        let report = profile_decay_diagnostic(&curve, &seq).unwrap();
        assert_eq!(report.profile_class, ProfileClass::Bounded);
        assert_eq!(report.decay_class, DecayClass::Exponential);
        assert!(report.consistent, "{}", report.verdict);
        assert!(report.root_estimate.unwrap().1 < 0.95);

        // logarithmic profile + stretched decay on the wreath product,
        // with the profile points on the volume axis
        let lamp = GroupSpec::parse("lamplighter:p=2").unwrap();
        let curve =
            crate::folner::folner_j_points(&lamp, crate::folner::Family::LamplighterWindows, 3, P::One)
                .unwrap();
        let m = standard_measure(&lamp, q(1, 2)).unwrap();
        let seq = return_probabilities(&m, 12).unwrap();
        let report = profile_decay_diagnostic(&curve, &seq).unwrap();
        assert_eq!(report.profile_class, ProfileClass::Logarithmic);
        assert_eq!(report.decay_class, DecayClass::Stretched);
        assert!(report.consistent, "{}", report.verdict);
    }

    #[test]
    fn csv_round_trip_shape() {
        let seq = binomial_decay(3);
        let csv = seq.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,p2n_num,p2n_den"));
        assert_eq!(lines.next(), Some("0,1,1"));
        assert_eq!(lines.next(), Some("1,1,2"));
        assert_eq!(lines.next(), Some("2,3,8"));
    }
}

//! Profile curves: the extremal quotient J^b_p(r) over functions supported
//! in B(e, r), per method, and comparison of measured curves against named
//! growth shapes (Sobolev-type envelopes).
//!
//! Every point records how it was produced and whether it is an exact value
//! or a one-sided bound; exact points must be nondecreasing in the argument.
//! Radius points also carry V(r), which rereads an in-ball point as a
//! volume-profile lower bound at v = V(r).

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::ball::build_ball;
use crate::error::{Error, Result};
use crate::extremal::{j1_candidate, jinf_inradius};
use crate::folner::{self, Family};
use crate::func::P;
use crate::group::GroupSpec;
use crate::spectral::j2_spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Exact => "exact",
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Inradius,
    Candidates,
    Folner,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "inradius" => Ok(Method::Inradius),
            "candidates" => Ok(Method::Candidates),
            "folner" => Ok(Method::Folner),
            other => Err(Error::usage(format!("unknown profile method '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Inradius => "inradius",
            Method::Candidates => "candidates",
            Method::Folner => "folner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Radius,
    Volume,
}

#[derive(Debug, Clone)]
pub struct ProfilePoint {
    pub arg: u64,
    /// V(r) for radius points: the point doubles as j_p(V(r)) >= value.
    pub volume: Option<u64>,
    pub value: f64,
    /// Exact value when the method produces one (a p-th power for folner
    /// points, the plain rational otherwise).
    pub exact: Option<BigRational>,
    pub bound: BoundKind,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub group: String,
    pub p: P,
    pub arg: ArgKind,
    /// Denominator convention: averaged form (spectral) vs pointwise
    /// gradient norm (all other methods). The two differ by at most
    /// |S|^(1/p).
    pub averaged_denominator: bool,
    pub points: Vec<ProfilePoint>,
}

impl ProfileCurve {
    /// Exact-bound points must be nondecreasing in the argument.
    pub fn check_monotone(&self) -> Result<()> {
        let mut prev: Option<(u64, f64)> = None;
        for pt in self.points.iter().filter(|pt| pt.bound == BoundKind::Exact) {
            if let Some((parg, pval)) = prev {
                if pt.value < pval - 1e-12 {
                    return Err(Error::numerical(format!(
                        "exact profile values decrease: {} at {} then {} at {}",
                        pval, parg, pt.value, pt.arg
                    )));
                }
            }
            prev = Some((pt.arg, pt.value));
        }
        Ok(())
    }

    /// CSV rows under the standard header.
    pub fn csv(&self) -> String {
        let mut out = String::from("r_or_v,value,bound_kind,method\n");
        for pt in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                pt.arg,
                pt.value,
                pt.bound.name(),
                pt.method.name()
            ));
        }
        out
    }
}

/// J^b_p(r) for r <= rmax by the chosen method. Spectral values use the
/// averaged-form denominator; inradius, candidate, and folner points use the
/// pointwise gradient norm and are valid lower bounds for every convention.
pub fn profile_in_balls(
    spec: &GroupSpec,
    p: P,
    rmax: u32,
    method: Method,
) -> Result<ProfileCurve> {
    match (method, p) {
        (Method::Spectral, P::Two)
        | (Method::Inradius, P::Inf)
        | (Method::Candidates, P::One)
        | (Method::Folner, _) => {}
        (m, p) => {
            return Err(Error::usage(format!(
                "method {} does not produce the p={} profile",
                m.name(),
                p.name()
            )))
        }
    }
    let mut points = Vec::new();
    match method {
        Method::Spectral => {
            let index = build_ball(spec, rmax)?;
            for r in 0..=rmax {
                let ids: Vec<u32> = (0..index.growth()[r as usize] as u32).collect();
                let out = j2_spectral(&index, &ids)?;
                points.push(ProfilePoint {
                    arg: r as u64,
                    volume: Some(index.growth()[r as usize]),
                    value: out.j2_avg,
                    exact: None,
                    bound: if out.iterations == 0 {
                        BoundKind::Exact
                    } else {
                        BoundKind::Lower
                    },
                    method,
                });
            }
        }
        Method::Inradius => {
            // two spare shells keep the distance certificates decisive
            let index = build_ball(spec, rmax + 2)?;
            for r in 0..=rmax {
                let ids: Vec<u32> = (0..index.growth()[r as usize] as u32).collect();
                let v = jinf_inradius(&index, &ids)?;
                points.push(ProfilePoint {
                    arg: r as u64,
                    volume: Some(index.growth()[r as usize]),
                    value: v as f64,
                    exact: Some(BigRational::from_integer(v.into())),
                    bound: BoundKind::Exact,
                    method,
                });
            }
        }
        Method::Candidates => {
            let index = build_ball(spec, rmax)?;
            let mut best: Option<BigRational> = None;
            for r in 0..=rmax {
                let ids: Vec<u32> = (0..index.growth()[r as usize] as u32).collect();
                let q = j1_candidate(&index, &ids)?.value();
                best = Some(match best {
                    Some(b) if b >= q => b,
                    _ => q,
                });
                let b = best.clone().unwrap();
                points.push(ProfilePoint {
                    arg: r as u64,
                    volume: Some(index.growth()[r as usize]),
                    value: b.to_f64().unwrap_or(f64::NAN),
                    exact: Some(b),
                    bound: BoundKind::Lower,
                    method,
                });
            }
        }
        Method::Folner => {
            let family = Family::for_kind(spec.kind()).ok_or_else(|| {
                Error::usage(format!("no built-in folner family for {spec}"))
            })?;
            let probe = folner::construct(spec, family, 1)?;
            let k = probe.claimed_k();
            if k > rmax {
                return Err(Error::usage(format!(
                    "folner points start at radius {k}; raise rmax"
                )));
            }
            return folner::folner_profile_bound(spec, family, rmax / k, p);
        }
    }
    Ok(ProfileCurve {
        group: spec.to_string(),
        p,
        arg: ArgKind::Radius,
        averaged_denominator: method == Method::Spectral,
        points,
    })
}

/// Named comparison shapes, all positive at zero: log is 1 + ln(1+x),
/// linear is 1 + x, power(a) is (1+x)^a, const is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Log,
    Linear,
    Power(f64),
    Const,
}

impl Phi {
    pub fn parse(s: &str) -> Result<Phi> {
        if let Some(alpha) = s.strip_prefix("power(").and_then(|t| t.strip_suffix(')')) {
            let alpha: f64 = alpha
                .parse()
                .map_err(|_| Error::usage(format!("bad power exponent '{alpha}'")))?;
            return Ok(Phi::Power(alpha));
        }
        match s {
            "log" => Ok(Phi::Log),
            "linear" => Ok(Phi::Linear),
            "const" => Ok(Phi::Const),
            other => Err(Error::usage(format!("unknown profile shape '{other}'"))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Phi::Log => 1.0 + (1.0 + x).ln(),
            Phi::Linear => 1.0 + x,
            Phi::Power(alpha) => (1.0 + x).powf(alpha),
            Phi::Const => 1.0,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Phi::Log => "log".into(),
            Phi::Linear => "linear".into(),
            Phi::Power(alpha) => format!("power({alpha})"),
            Phi::Const => "const".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SobolevFit {
    pub c: f64,
    pub c_prime: f64,
    /// max over points of value - c * phi(c' * arg) at the fitted constants
    pub max_violation: f64,
}

/// Least C over a log-spaced C' grid with value <= C * phi(C' * arg) at
/// every measured point; pointwise comparison only, no asymptotic claim.
pub fn sobolev_check(curve: &ProfileCurve, phi: Phi) -> Result<SobolevFit> {
    if curve.points.is_empty() {
        return Err(Error::usage("cannot fit an empty curve"));
    }
    let mut best: Option<(f64, f64)> = None;
    for e in -16..=16 {
        let c_prime = 2f64.powi(e);
        let c = curve
            .points
            .iter()
            .map(|pt| pt.value / phi.eval(c_prime * pt.arg as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        match best {
            Some((bc, bcp)) if bc < c || (bc == c && bcp <= c_prime) => {}
            _ => best = Some((c, c_prime)),
        }
    }
    let (c, c_prime) = best.unwrap();
    Ok(SobolevFit {
        c,
        c_prime,
        max_violation: sobolev_violation(curve, phi, c, c_prime),
    })
}

/// Worst signed excess of the curve over a fixed overlay c * phi(c' * arg);
/// negative values mean the overlay dominates everywhere.
pub fn sobolev_violation(curve: &ProfileCurve, phi: Phi, c: f64, c_prime: f64) -> f64 {
    curve
        .points
        .iter()
        .map(|pt| pt.value - c * phi.eval(c_prime * pt.arg as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

//! Controlled Folner pairs (F_n, F'_n): window constructions for the four
//! amenable families, a mechanical checker for the defining properties, and
//! layered test functions converting verified pairs into profile lower
//! bounds.
//!
//! Pair sets are represented as compact integer codes over the F' window
//! rather than materialized element lists: the lamplighter window at p=3,
//! n=3 already holds 13 * 3^13 (about 20.7 million) elements, far past what
//! element structs allow under the memory budget, while codes give O(1)
//! membership and generator steps. `decode` recovers ordinary elements for
//! cross-checks and small dumps.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::ball::Side;
use crate::error::{Error, Result};
use crate::func::P;
use crate::group::element::Element;
use crate::group::lamps::LampConfig;
use crate::group::madic::MAdic;
use crate::group::{GroupSpec, Kind};
use crate::profile::{ArgKind, BoundKind, Method, ProfileCurve, ProfilePoint};

/// Largest F' window processed (codes, one bit each in the closure bitset).
pub const MAX_UNIVERSE: u128 = 1 << 25;

const UNREACHED: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ZdCubes,
    LamplighterWindows,
    BsWindows,
    HeisenbergBoxes,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "zd_cubes" => Ok(Family::ZdCubes),
            "lamplighter_windows" => Ok(Family::LamplighterWindows),
            "bs_windows" => Ok(Family::BsWindows),
            "heisenberg_boxes" => Ok(Family::HeisenbergBoxes),
            other => Err(Error::usage(format!("unknown folner family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::ZdCubes => "zd_cubes",
            Family::LamplighterWindows => "lamplighter_windows",
            Family::BsWindows => "bs_windows",
            Family::HeisenbergBoxes => "heisenberg_boxes",
        }
    }

    /// Built-in family for a group kind, if one ships.
    pub fn for_kind(kind: Kind) -> Option<Family> {
        match kind {
            Kind::Zd { .. } => Some(Family::ZdCubes),
            Kind::Lamplighter { .. } => Some(Family::LamplighterWindows),
            Kind::Bs { .. } => Some(Family::BsWindows),
            Kind::Heisenberg => Some(Family::HeisenbergBoxes),
            _ => None,
        }
    }
}

/// Window coder: F' is exactly the coded universe, F a sub-block of it.
/// Steps follow the generator order of the group's standard set.
#[derive(Debug, Clone)]
enum Codec {
    /// F = [-n,n]^d, F' = [-2n,2n]^d
    Zd { d: usize, n: i64 },
    /// F = {|k| <= n} x {supp in [-2n,2n]}, F' widens the cursor to 2n.
    /// Digit j of the lamp code is the lamp at position j - 2n.
    Lamp { p: u32, n: i64 },
    /// F = {|k| <= n} x {0 <= P < m^3n}, F' = {|k| <= 2n} x {-m^3n <= P < 2m^3n},
    /// both over the lattice P in m^-2n Z, coded by N = P m^2n.
    Bs { m: u32, n: i64, npow: i64 },
    /// F = {|a|,|b| <= n, |c| <= n^2}, F' = {|a|,|b| <= 2n, |c| <= 5n^2}
    Heis { n: i64 },
}

impl Codec {
    fn universe(&self) -> u128 {
        match *self {
            Codec::Zd { d, n } => (4 * n as u128 + 1).pow(d as u32),
            Codec::Lamp { p, n } => {
                (4 * n as u128 + 1) * (p as u128).pow(4 * n as u32 + 1)
            }
            Codec::Bs { n, npow, .. } => (4 * n as u128 + 1) * 3 * npow as u128,
            Codec::Heis { n } => {
                let n = n as u128;
                (4 * n + 1) * (4 * n + 1) * (10 * n * n + 1)
            }
        }
    }

    fn f_count(&self) -> u128 {
        match *self {
            Codec::Zd { d, n } => (2 * n as u128 + 1).pow(d as u32),
            Codec::Lamp { p, n } => {
                (2 * n as u128 + 1) * (p as u128).pow(4 * n as u32 + 1)
            }
            Codec::Bs { n, npow, .. } => (2 * n as u128 + 1) * npow as u128,
            Codec::Heis { n } => {
                let n = n as u128;
                (2 * n + 1) * (2 * n + 1) * (2 * n * n + 1)
            }
        }
    }

    fn for_each_f(&self, mut emit: impl FnMut(u64)) {
        match *self {
            Codec::Zd { d, n } => {
                let w = 4 * n + 1;
                let mut x = vec![-n; d];
                loop {
                    let mut code = 0u64;
                    for &xi in x.iter().rev() {
                        code = code * w as u64 + (xi + 2 * n) as u64;
                    }
                    emit(code);
                    let mut i = 0;
                    loop {
                        if i == d {
                            return;
                        }
                        if x[i] == n {
                            x[i] = -n;
                            i += 1;
                        } else {
                            x[i] += 1;
                            break;
                        }
                    }
                }
            }
            Codec::Lamp { p, n } => {
                let lamp_codes = (p as u64).pow(4 * n as u32 + 1);
                for k in -n..=n {
                    let base = (k + 2 * n) as u64 * lamp_codes;
                    for lamps in 0..lamp_codes {
                        emit(base + lamps);
                    }
                }
            }
            Codec::Bs { n, npow, .. } => {
                let span = 3 * npow as u64;
                for k in -n..=n {
                    let base = (k + 2 * n) as u64 * span;
                    // N in [0, npow) is P in [0, m^3n)
                    for x in 0..npow as u64 {
                        emit(base + x + npow as u64);
                    }
                }
            }
            Codec::Heis { n } => {
                let bw = 4 * n + 1;
                let cw = 10 * n * n + 1;
                for a in -n..=n {
                    for b in -n..=n {
                        let base = (((a + 2 * n) * bw) + (b + 2 * n)) as u64 * cw as u64;
                        for c in -(n * n)..=(n * n) {
                            emit(base + (c + 5 * n * n) as u64);
                        }
                    }
                }
            }
        }
    }

    fn step(&self, code: u64, gen: usize, side: Side) -> Option<u64> {
        match *self {
            Codec::Zd { d, n } => {
                // generators alternate +e_i, -e_i; both sides agree
                let w = (4 * n + 1) as u64;
                let axis = gen / 2;
                debug_assert!(axis < d);
                let scale = w.pow(axis as u32);
                let digit = (code / scale) % w;
                let xi = digit as i64 - 2 * n + if gen % 2 == 0 { 1 } else { -1 };
                if xi.abs() > 2 * n {
                    return None;
                }
                Some(code - digit * scale + (xi + 2 * n) as u64 * scale)
            }
            Codec::Lamp { p, n } => {
                let lamp_codes = (p as u64).pow(4 * n as u32 + 1);
                let k = (code / lamp_codes) as i64 - 2 * n;
                let lamps = code % lamp_codes;
                let toggle = |lamps: u64, j: i64, up: bool| -> u64 {
                    let scale = (p as u64).pow(j as u32);
                    let digit = (lamps / scale) % p as u64;
                    let new = if up { (digit + 1) % p as u64 } else { (digit + p as u64 - 1) % p as u64 };
                    lamps - digit * scale + new * scale
                };
                match (side, gen) {
                    (Side::Left, 0) | (Side::Right, 0) if k + 1 > 2 * n => None,
                    (Side::Left, 1) | (Side::Right, 1) if k - 1 < -2 * n => None,
                    // t . (k,f) = (k+1, f)
                    (Side::Left, 0) => Some(code + lamp_codes),
                    (Side::Left, 1) => Some(code - lamp_codes),
                    // a . (k,f) toggles the lamp at -k, always in the window
                    (Side::Left, 2) => Some(code - lamps + toggle(lamps, -k + 2 * n, true)),
                    (Side::Left, 3) => Some(code - lamps + toggle(lamps, -k + 2 * n, false)),
                    // (k,f) . t = (k+1, shift down): lowest digit must be empty
                    (Side::Right, 0) => (lamps % p as u64 == 0)
                        .then(|| code + lamp_codes - lamps + lamps / p as u64),
                    // (k,f) . t^-1 = (k-1, shift up): top digit must be empty
                    (Side::Right, 1) => {
                        let top = (p as u64).pow(4 * n as u32);
                        (lamps < top).then(|| code - lamp_codes - lamps + lamps * p as u64)
                    }
                    // (k,f) . a toggles the stored origin position
                    (Side::Right, 2) => Some(code - lamps + toggle(lamps, 2 * n, true)),
                    (Side::Right, 3) => Some(code - lamps + toggle(lamps, 2 * n, false)),
                    _ => unreachable!("lamplighter has 4 generators"),
                }
            }
            Codec::Bs { m, n, npow } => {
                let span = 3 * npow as u64;
                let k = (code / span) as i64 - 2 * n;
                let x = (code % span) as i64 - npow;
                let pack = |k: i64, x: i64| -> Option<u64> {
                    if k.abs() > 2 * n || x < -npow || x >= 2 * npow {
                        return None;
                    }
                    Some((k + 2 * n) as u64 * span + (x + npow) as u64)
                };
                match (side, gen) {
                    // t . (k,P) = (k+1, P)
                    (Side::Left, 0) => pack(k + 1, x),
                    (Side::Left, 1) => pack(k - 1, x),
                    // x . (k,P) = (k, P + m^-k), i.e. N += m^(2n-k)
                    (Side::Left, 2) => pack(k, x + (m as i64).pow((2 * n - k) as u32)),
                    (Side::Left, 3) => pack(k, x - (m as i64).pow((2 * n - k) as u32)),
                    // (k,P) . t = (k+1, P/m): leaves the lattice unless m | N
                    (Side::Right, 0) => {
                        if x.rem_euclid(m as i64) == 0 {
                            pack(k + 1, x.div_euclid(m as i64))
                        } else {
                            None
                        }
                    }
                    (Side::Right, 1) => pack(k - 1, x * m as i64),
                    // (k,P) . x = (k, P + 1)
                    (Side::Right, 2) => pack(k, x + (m as i64).pow(2 * n as u32)),
                    (Side::Right, 3) => pack(k, x - (m as i64).pow(2 * n as u32)),
                    _ => unreachable!("bs has 4 generators"),
                }
            }
            Codec::Heis { n } => {
                let bw = 4 * n + 1;
                let cw = (10 * n * n + 1) as u64;
                let ab = (code / cw) as i64;
                let a = ab / bw - 2 * n;
                let b = ab % bw - 2 * n;
                let c = (code % cw) as i64 - 5 * n * n;
                let pack = |a: i64, b: i64, c: i64| -> Option<u64> {
                    if a.abs() > 2 * n || b.abs() > 2 * n || c.abs() > 5 * n * n {
                        return None;
                    }
                    Some((((a + 2 * n) * bw) + (b + 2 * n)) as u64 * cw + (c + 5 * n * n) as u64)
                };
                match (side, gen) {
                    (Side::Left, 0) => pack(a + 1, b, c + b),
                    (Side::Left, 1) => pack(a - 1, b, c - b),
                    (Side::Left, 2) => pack(a, b + 1, c),
                    (Side::Left, 3) => pack(a, b - 1, c),
                    (Side::Right, 0) => pack(a + 1, b, c),
                    (Side::Right, 1) => pack(a - 1, b, c),
                    (Side::Right, 2) => pack(a, b + 1, c + a),
                    (Side::Right, 3) => pack(a, b - 1, c - a),
                    _ => unreachable!("heisenberg std has 4 generators"),
                }
            }
        }
    }

    fn decode(&self, code: u64) -> Element {
        match *self {
            Codec::Zd { d, n } => {
                let w = (4 * n + 1) as u64;
                let mut code = code;
                let mut v = Vec::with_capacity(d);
                for _ in 0..d {
                    v.push((code % w) as i64 - 2 * n);
                    code /= w;
                }
                Element::Zd(v)
            }
            Codec::Lamp { p, n } => {
                let lamp_codes = (p as u64).pow(4 * n as u32 + 1);
                let k = (code / lamp_codes) as i64 - 2 * n;
                let mut lamps = code % lamp_codes;
                let mut lit = Vec::new();
                for j in 0..=(4 * n) {
                    let v = (lamps % p as u64) as u32;
                    if v != 0 {
                        lit.push((j - 2 * n, v));
                    }
                    lamps /= p as u64;
                }
                Element::Lamplighter {
                    cursor: k,
                    lamps: LampConfig::from_sorted(p, lit),
                }
            }
            Codec::Bs { m, n, npow } => {
                let span = 3 * npow as u64;
                let k = (code / span) as i64 - 2 * n;
                let x = (code % span) as i64 - npow;
                Element::Bs {
                    t: k,
                    x: MAdic::from_scaled(m, x, (2 * n) as u32),
                }
            }
            Codec::Heis { n } => {
                let bw = 4 * n + 1;
                let cw = (10 * n * n + 1) as u64;
                let ab = (code / cw) as i64;
                Element::Heisenberg {
                    a: ab / bw - 2 * n,
                    b: ab % bw - 2 * n,
                    c: (code % cw) as i64 - 5 * n * n,
                }
            }
        }
    }

    /// Max word length over F' (exact for zd and lamplighter, a witness-word
    /// upper bound for bs and heisenberg).
    fn max_len(&self) -> (u64, bool) {
        match *self {
            Codec::Zd { d, n } => ((d as i64 * 2 * n) as u64, true),
            // full window of costliest lamps, cursor home: travel 8n plus
            // (4n+1) floor(p/2) toggles, both maxima met at once
            Codec::Lamp { p, n } => ((8 * n + (4 * n + 1) * (p as i64 / 2)) as u64, true),
            Codec::Bs { m, n, npow } => {
                let mut best = 0u64;
                for nn in 0..(2 * npow) as u64 {
                    best = best.max(horner_len(nn, m as u64));
                }
                // t^(k-2n) x^N t^(2n); |k - 2n| <= 4n
                ((4 * n + 2 * n) as u64 + best, false)
            }
            Codec::Heis { n } => {
                let mut best = 0u64;
                for a in -2 * n..=2 * n {
                    for b in -2 * n..=2 * n {
                        for c in [-5 * n * n, 0, 5 * n * n] {
                            best = best.max(heis_len_bound(a, b, c));
                        }
                    }
                }
                (best, false)
            }
        }
    }
}

/// Length of the Horner word for x^N in BS(1,m): digits d_i of |N| base m,
/// x^N = x^(d_0) t x^(N div m) t^-1 recursively.
fn horner_len(n: u64, m: u64) -> u64 {
    let mut len = 0;
    let mut level = 0;
    let mut n = n;
    while n > 0 {
        len += n % m;
        n /= m;
        if n > 0 {
            level += 2;
        }
    }
    len + level
}

/// Word length bound for (a,b,c): x^a y^b lands on (a,b,ab), then central
/// corrections z^(s^2) = [x^s, y^s] of length 4s, greedily.
fn heis_len_bound(a: i64, b: i64, c: i64) -> u64 {
    let mut len = (a.abs() + b.abs()) as u64;
    let mut rest = (c - a * b).unsigned_abs();
    while rest > 0 {
        let s = rest.isqrt();
        len += 4 * s;
        rest -= s * s;
    }
    len
}

#[derive(Debug, Clone)]
pub struct FolnerPair {
    spec: GroupSpec,
    family: Family,
    n: u32,
    side: Side,
    claimed_c: BigRational,
    claimed_k: u32,
    size_f: u128,
    size_fp: u128,
    codec: Codec,
}

pub fn construct(spec: &GroupSpec, family: Family, n: u32) -> Result<FolnerPair> {
    construct_with_side(spec, family, n, None)
}

pub fn construct_with_side(
    spec: &GroupSpec,
    family: Family,
    n: u32,
    side: Option<Side>,
) -> Result<FolnerPair> {
    if n == 0 {
        return Err(Error::usage("folner pair index n must be positive"));
    }
    if spec.gen_id() != "std" {
        return Err(Error::usage(
            "folner windows are defined over the standard generating set",
        ));
    }
    let ni = n as i64;
    let (codec, claimed_c, claimed_k) = match (family, spec.kind()) {
        (Family::ZdCubes, Kind::Zd { d }) => (
            Codec::Zd { d: d as usize, n: ni },
            BigRational::from_integer(BigInt::from(1u64 << d)),
            2 * d as u32,
        ),
        (Family::LamplighterWindows, Kind::Lamplighter { p }) => (
            Codec::Lamp { p, n: ni },
            BigRational::from_integer(BigInt::from(2)),
            8 + 5 * (p / 2),
        ),
        (Family::BsWindows, Kind::Bs { m }) => {
            let npow = (m as i64).checked_pow(5 * n).ok_or_else(|| {
                Error::resource("folner", "bs window exponent overflows")
            })?;
            (
                Codec::Bs { m, n: ni, npow },
                BigRational::new(BigInt::from(15), BigInt::from(2)),
                7 * m + 14,
            )
        }
        (Family::HeisenbergBoxes, Kind::Heisenberg) => (
            Codec::Heis { n: ni },
            BigRational::from_integer(BigInt::from(20)),
            30,
        ),
        (family, _) => {
            return Err(Error::usage(format!(
                "family {} does not apply to group {}",
                family.name(),
                spec
            )))
        }
    };
    let size_fp = codec.universe();
    if size_fp > MAX_UNIVERSE {
        return Err(Error::resource(
            "folner",
            format!(
                "n={n} needs {size_fp} window codes, over the {MAX_UNIVERSE} budget"
            ),
        ));
    }
    Ok(FolnerPair {
        spec: spec.clone(),
        family,
        n,
        side: side.unwrap_or(Side::Left),
        claimed_c,
        claimed_k,
        size_f: codec.f_count(),
        size_fp,
        codec,
    })
}

impl FolnerPair {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn claimed_c(&self) -> &BigRational {
        &self.claimed_c
    }

    /// Diameter factor: F' is contained in the ball of radius K*n.
    pub fn claimed_k(&self) -> u32 {
        self.claimed_k
    }

    pub fn size_f(&self) -> u128 {
        self.size_f
    }

    pub fn size_fp(&self) -> u128 {
        self.size_fp
    }

    pub fn measured_c(&self) -> BigRational {
        BigRational::new(BigInt::from(self.size_fp), BigInt::from(self.size_f))
    }

    /// Elements of F, decoded (intended for small windows).
    pub fn f_elements(&self) -> Vec<Element> {
        let mut out = Vec::new();
        self.codec.for_each_f(|code| out.push(self.codec.decode(code)));
        out
    }

    /// Closure distances from F on the requested side: dist[code] = level at
    /// which the code joins neighborhood(F, level), UNREACHED past `depth`.
    /// Second return: whether the closure escapes, i.e. some element within
    /// depth steps of F falls beyond the F' window. When it does not escape,
    /// dist entries below UNREACHED are exact word-metric distances to F
    /// (any geodesic from F stays inside the window, prefix by prefix).
    fn window_bfs(&self, side: Side, depth: u32) -> (Vec<u8>, bool) {
        let universe = self.size_fp as usize;
        let gens = self.spec.generators().len();
        let mut dist = vec![UNREACHED; universe];
        let mut frontier: Vec<u64> = Vec::new();
        self.codec.for_each_f(|code| {
            dist[code as usize] = 0;
            frontier.push(code);
        });
        let mut escaped = false;
        for level in 1..=depth {
            let mut next = Vec::new();
            for &code in &frontier {
                for gen in 0..gens {
                    match self.codec.step(code, gen, side) {
                        Some(to) => {
                            if dist[to as usize] == UNREACHED {
                                dist[to as usize] = level as u8;
                                next.push(to);
                            }
                        }
                        None => escaped = true,
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        (dist, escaped)
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub n: u32,
    pub size_f: u128,
    pub size_fp: u128,
    pub measured_c: BigRational,
    pub ratio_ok: bool,
    /// S^n F stayed inside F' on the declared side.
    pub neighborhood_ok: bool,
    /// Same closure run on the opposite side, as a diagnostic.
    pub other_side_ok: bool,
    pub max_word_length: u64,
    /// Max word length came from the normal-form bound, not an exact count.
    pub length_is_bound: bool,
    pub measured_k: f64,
    pub diameter_ok: bool,
}

pub fn check(pair: &FolnerPair) -> CheckReport {
    let n = pair.n;
    let (_, escaped) = pair.window_bfs(pair.side, n);
    let (_, escaped_other) = pair.window_bfs(pair.side.flip(), n);
    let measured_c = pair.measured_c();
    let ratio_ok = measured_c <= pair.claimed_c;
    let (max_word_length, exact) = pair.codec.max_len();
    CheckReport {
        n,
        size_f: pair.size_f,
        size_fp: pair.size_fp,
        measured_c,
        ratio_ok,
        neighborhood_ok: !escaped,
        other_side_ok: !escaped_other,
        max_word_length,
        length_is_bound: !exact,
        measured_k: max_word_length as f64 / n as f64,
        diameter_ok: max_word_length <= (pair.claimed_k * n) as u64,
    }
}

/// The layered function f(x) = max(0, n - d(x, F)) over the F' window:
/// f = n on F, support in neighborhood(F, n-1), per-step differences in
/// {0, 1}, all exact.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub p: P,
    pub n: u32,
    /// ||f||_p^p (the sup n for p = infinity)
    pub norm_pow: BigRational,
    /// || |grad f|_1 ||_p^p (the sup, 1, for p = infinity)
    pub grad_pow: BigRational,
}

impl TestFunction {
    /// ||f||_p / || |grad f|_1 ||_p as an exact p-th power ratio.
    pub fn ratio_pow(&self) -> BigRational {
        &self.norm_pow / &self.grad_pow
    }

    pub fn ratio(&self) -> f64 {
        self.p.root_f64(&self.ratio_pow())
    }
}

pub fn test_function(pair: &FolnerPair, p: P) -> Result<TestFunction> {
    let n = pair.n;
    let (dist, escaped) = pair.window_bfs(pair.side, n);
    if escaped {
        return Err(Error::usage(
            "pair fails the neighborhood containment; no test function",
        ));
    }
    let f = |d: u8| -> u64 {
        if d == UNREACHED || d as u32 >= n {
            0
        } else {
            (n - d as u32) as u64
        }
    };
    let gens = pair.spec.generators().len();
    let mut norm_pow: u128 = 0;
    let mut grad_count: u128 = 0;
    let mut sup: u64 = 0;
    for (code, &d) in dist.iter().enumerate() {
        let v = f(d);
        sup = sup.max(v);
        match p {
            P::One => norm_pow += v as u128,
            P::Two => norm_pow += (v * v) as u128,
            P::Three => norm_pow += (v as u128).pow(3),
            P::Inf => {}
        }
        // |grad f|_1 is 0 or 1: neighbors differ by at most one level
        let mut boundary = false;
        for gen in 0..gens {
            let nv = match pair.codec.step(code as u64, gen, pair.side) {
                Some(to) => f(dist[to as usize]),
                // beyond the window f vanishes; reachable only when v = 0
                None => 0,
            };
            if nv != v {
                boundary = true;
                break;
            }
        }
        if boundary {
            grad_count += 1;
        }
    }
    let (norm_pow, grad_pow) = match p {
        P::Inf => (
            BigRational::from_integer(BigInt::from(sup)),
            BigRational::from_integer(BigInt::from(1u32)),
        ),
        _ => (
            BigRational::from_integer(BigInt::from(norm_pow)),
            BigRational::from_integer(BigInt::from(grad_count)),
        ),
    };
    Ok(TestFunction { p, n, norm_pow, grad_pow })
}

/// Lower-bound points for the in-ball profile: the n-th pair's test function
/// is supported in B(e, K*n), so J^b_p(K*n) >= its ratio.
pub fn folner_profile_bound(
    spec: &GroupSpec,
    family: Family,
    nmax: u32,
    p: P,
) -> Result<ProfileCurve> {
    let mut points = Vec::new();
    for n in 1..=nmax {
        let pair = construct(spec, family, n)?;
        let tf = test_function(&pair, p)?;
        points.push(ProfilePoint {
            arg: (pair.claimed_k * n) as u64,
            volume: Some(pair.size_fp.min(u64::MAX as u128) as u64),
            value: tf.ratio(),
            exact: Some(tf.ratio_pow()),
            bound: BoundKind::Lower,
            method: Method::Folner,
        });
    }
    Ok(ProfileCurve {
        group: spec.to_string(),
        p,
        arg: ArgKind::Radius,
        averaged_denominator: false,
        points,
    })
}

/// The same bounds read against volume: the test function is supported on at
/// most |F'_n| points, so j_p(|F'_n|) >= its ratio.
pub fn folner_j_points(
    spec: &GroupSpec,
    family: Family,
    nmax: u32,
    p: P,
) -> Result<ProfileCurve> {
    let mut curve = folner_profile_bound(spec, family, nmax, p)?;
    for point in &mut curve.points {
        point.arg = point.volume.take().unwrap_or(point.arg);
    }
    curve.arg = ArgKind::Volume;
    Ok(curve)
}

//! Group zoo: exact element arithmetic plus named generating sets.
//!
//! Specs are written `zd:d=2`, `heis`, `lamplighter:p=2`, `bs:m=2`,
//! `hall:q=2`, `hallq:q=2`, `f2`, optionally with `:gen=<id>` selecting an
//! alternative generating set.

pub mod element;
pub mod lamps;
pub mod madic;

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use element::{Element, HallCoords};
use lamps::LampConfig;
use madic::MAdic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Zd { d: u32 },
    Heisenberg,
    Lamplighter { p: u32 },
    Bs { m: u32 },
    Hall { q: u32 },
    HallQuotient { q: u32 },
    F2,
}

/// One formal generator. The list is symmetric as a list: it carries a
/// formal inverse for every entry, even when that repeats a group element
/// (lamplighter with p = 2), so uniform measures and averaged norms weigh
/// the formal count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub g: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: Kind,
    gen_id: String,
    gens: Vec<(String, Element)>,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    pub fn new(kind: Kind, gen_id: &str) -> Result<Self> {
        match kind {
            Kind::Zd { d } => {
                if d == 0 || d > 16 {
                    return Err(Error::usage("zd needs 1 <= d <= 16"));
                }
            }
            Kind::Lamplighter { p } => {
                if !is_prime(p) {
                    return Err(Error::usage(format!("lamplighter needs prime p, got {p}")));
                }
            }
            Kind::Bs { m } => {
                if m < 2 {
                    return Err(Error::usage("bs needs m >= 2"));
                }
            }
            Kind::Hall { q } | Kind::HallQuotient { q } => {
                if q < 2 {
                    return Err(Error::usage("hall needs q >= 2"));
                }
            }
            Kind::Heisenberg | Kind::F2 => {}
        }
        let gens = build_generators(kind, gen_id)?;
        Ok(GroupSpec {
            kind,
            gen_id: gen_id.to_string(),
            gens,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or("");
        let mut d = None;
        let mut p = None;
        let mut m = None;
        let mut q = None;
        let mut gen_id = "std".to_string();
        for part in parts {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("bad group spec component `{part}`")))?;
            let num = || -> Result<u32> {
                val.parse()
                    .map_err(|_| Error::usage(format!("bad value `{val}` for `{key}`")))
            };
            match key {
                "d" => d = Some(num()?),
                "p" => p = Some(num()?),
                "m" => m = Some(num()?),
                "q" => q = Some(num()?),
                "gen" => gen_id = val.to_string(),
                _ => return Err(Error::usage(format!("unknown group parameter `{key}`"))),
            }
        }
        let need = |v: Option<u32>, what: &str| {
            v.ok_or_else(|| Error::usage(format!("group `{head}` needs `{what}=`")))
        };
        let kind = match head {
            "zd" => Kind::Zd { d: need(d, "d")? },
            "heis" => Kind::Heisenberg,
            "lamplighter" => Kind::Lamplighter { p: need(p, "p")? },
            "bs" => Kind::Bs { m: need(m, "m")? },
            "hall" => Kind::Hall { q: need(q, "q")? },
            "hallq" => Kind::HallQuotient { q: need(q, "q")? },
            "f2" => Kind::F2,
            _ => return Err(Error::usage(format!("unknown group `{head}`"))),
        };
        GroupSpec::new(kind, &gen_id)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn gen_id(&self) -> &str {
        &self.gen_id
    }

    pub fn identity(&self) -> Element {
        match self.kind {
            Kind::Zd { d } => Element::Zd(vec![0; d as usize]),
            Kind::Heisenberg => Element::Heisenberg { a: 0, b: 0, c: 0 },
            Kind::Lamplighter { p } => Element::Lamplighter {
                cursor: 0,
                lamps: LampConfig::empty(p),
            },
            Kind::Bs { m } => Element::Bs {
                t: 0,
                x: MAdic::zero(m),
            },
            Kind::Hall { q } => Element::Hall(hall_coords(q, 0, 0, 0, 0)),
            Kind::HallQuotient { q } => Element::HallQuotient(hall_coords(q, 0, 0, 0, 0)),
            Kind::F2 => Element::F2(Vec::new()),
        }
    }

    /// Formal symmetric generator list (name, element).
    pub fn generators(&self) -> &[(String, Element)] {
        &self.gens
    }

    pub fn check_element(&self, e: &Element) -> Result<()> {
        let ok = match (self.kind, e) {
            (Kind::Zd { d }, Element::Zd(v)) => v.len() == d as usize,
            (Kind::Heisenberg, Element::Heisenberg { .. }) => true,
            (Kind::Lamplighter { p }, Element::Lamplighter { lamps, .. }) => lamps.modulus() == p,
            (Kind::Bs { m }, Element::Bs { x, .. }) => x.base() == m,
            (Kind::Hall { q }, Element::Hall(g)) => {
                g.x.base() == q && g.y.base() == q && g.z.base() == q
            }
            (Kind::HallQuotient { q }, Element::HallQuotient(g)) => {
                g.x.base() == q
                    && g.y.base() == q
                    && g.z.base() == q
                    && g.z == g.z.mod_one()
            }
            (Kind::F2, Element::F2(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::usage(format!("element {e} does not belong to {self}")))
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(a.mul(b))
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check_element(a)?;
        Ok(a.inv())
    }

    /// Product of generators picked by index, left to right.
    pub fn eval_word(&self, word: &[usize]) -> Element {
        let mut g = self.identity();
        for &i in word {
            g = g.mul(&self.gens[i].1);
        }
        g
    }

    /// The quotient this group projects onto, when one is wired up.
    pub fn quotient(&self) -> Option<GroupSpec> {
        let kind = match self.kind {
            Kind::Bs { .. } => Kind::Zd { d: 1 },
            Kind::Heisenberg => Kind::Zd { d: 2 },
            Kind::Lamplighter { .. } => Kind::Zd { d: 1 },
            Kind::Hall { q } => Kind::HallQuotient { q },
            _ => return None,
        };
        Some(GroupSpec::new(kind, "std").unwrap())
    }

    pub fn project(&self, target: &GroupSpec, a: &Element) -> Result<Element> {
        self.check_element(a)?;
        let expect = self.quotient().ok_or_else(|| {
            Error::usage(format!("no quotient map out of {self}"))
        })?;
        if expect.kind != target.kind {
            return Err(Error::usage(format!(
                "unsupported projection {self} -> {target}"
            )));
        }
        Ok(match a {
            Element::Bs { t, .. } => Element::Zd(vec![*t]),
            Element::Heisenberg { a, b, .. } => Element::Zd(vec![*a, *b]),
            Element::Lamplighter { cursor, .. } => Element::Zd(vec![*cursor]),
            Element::Hall(g) => {
                let mut h = g.clone();
                h.z = h.z.mod_one();
                Element::HallQuotient(h)
            }
            _ => unreachable!(),
        })
    }

    /// Copies of Z inside this group: image of n under the named inclusion.
    pub fn embed_z(&self, sub: ZSubgroup, n: i64) -> Result<Element> {
        match (self.kind, sub) {
            (Kind::Heisenberg, ZSubgroup::HeisenbergCenter) => {
                Ok(Element::Heisenberg { a: 0, b: 0, c: n })
            }
            (Kind::Bs { m }, ZSubgroup::BsXAxis) => Ok(Element::Bs {
                t: 0,
                x: MAdic::from_int(m, n),
            }),
            (Kind::Lamplighter { p }, ZSubgroup::LamplighterCursor) => Ok(Element::Lamplighter {
                cursor: n,
                lamps: LampConfig::empty(p),
            }),
            (Kind::Zd { d }, ZSubgroup::ZdAxis { axis }) if axis < d => {
                let mut v = vec![0i64; d as usize];
                v[axis as usize] = n;
                Ok(Element::Zd(v))
            }
            (Kind::Zd { d: 1 }, ZSubgroup::ZMultiples { k }) => {
                Ok(Element::Zd(vec![k as i64 * n]))
            }
            _ => Err(Error::usage(format!(
                "unsupported Z subgroup {} of {self}",
                sub.name()
            ))),
        }
    }
}

/// Named copies of Z used by embeddings, coset decompositions and
/// compression curves. The first three are the distortion examples; an axis
/// of Z^d and kZ inside Z cover the undistorted and finite-index cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZSubgroup {
    HeisenbergCenter,
    BsXAxis,
    LamplighterCursor,
    ZdAxis { axis: u32 },
    ZMultiples { k: u32 },
}

impl ZSubgroup {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "heis-center" => return Ok(ZSubgroup::HeisenbergCenter),
            "bs-x" => return Ok(ZSubgroup::BsXAxis),
            "lamplighter-cursor" => return Ok(ZSubgroup::LamplighterCursor),
            _ => {}
        }
        if let Some(axis) = s.strip_prefix("axis") {
            if let Ok(axis) = axis.parse::<u32>() {
                return Ok(ZSubgroup::ZdAxis { axis });
            }
        }
        if let Some(k) = s.strip_suffix('z') {
            if let Ok(k) = k.parse::<u32>() {
                if k >= 1 {
                    return Ok(ZSubgroup::ZMultiples { k });
                }
            }
        }
        Err(Error::usage(format!(
            "unknown subgroup `{s}` (expected heis-center, bs-x, lamplighter-cursor, axis<i> or <k>z)"
        )))
    }

    pub fn name(&self) -> String {
        match self {
            ZSubgroup::HeisenbergCenter => "heis-center".into(),
            ZSubgroup::BsXAxis => "bs-x".into(),
            ZSubgroup::LamplighterCursor => "lamplighter-cursor".into(),
            ZSubgroup::ZdAxis { axis } => format!("axis{axis}"),
            ZSubgroup::ZMultiples { k } => format!("{k}z"),
        }
    }
}

fn hall_coords(q: u32, t: i64, x: i64, y: i64, z: i64) -> HallCoords {
    HallCoords {
        t,
        x: MAdic::from_int(q, BigInt::from(x)),
        y: MAdic::from_int(q, BigInt::from(y)),
        z: MAdic::from_int(q, BigInt::from(z)),
    }
}

fn build_generators(kind: Kind, gen_id: &str) -> Result<Vec<(String, Element)>> {
    let mut gens: Vec<(String, Element)> = Vec::new();
    let mut push = |name: &str, g: Element| gens.push((name.to_string(), g));
    match (kind, gen_id) {
        (Kind::Zd { d }, "std") => {
            for i in 0..d as usize {
                let mut v = vec![0i64; d as usize];
                v[i] = 1;
                push(&format!("e{}", i + 1), Element::Zd(v.clone()));
                v[i] = -1;
                push(&format!("e{}^-1", i + 1), Element::Zd(v));
            }
        }
        (Kind::Zd { d }, "box") => {
            // all nonzero vectors with entries in {-1,0,1}
            let d = d as usize;
            let mut v = vec![-1i64; d];
            loop {
                if v.iter().any(|&a| a != 0) {
                    let name: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                    push(&format!("g({})", name.join(",")), Element::Zd(v.clone()));
                }
                let mut i = 0;
                loop {
                    if i == d {
                        return Ok(gens);
                    }
                    if v[i] == 1 {
                        v[i] = -1;
                        i += 1;
                    } else {
                        v[i] += 1;
                        break;
                    }
                }
            }
        }
        (Kind::Heisenberg, id @ ("std" | "withz")) => {
            push("x", Element::Heisenberg { a: 1, b: 0, c: 0 });
            push("x^-1", Element::Heisenberg { a: -1, b: 0, c: 0 });
            push("y", Element::Heisenberg { a: 0, b: 1, c: 0 });
            push("y^-1", Element::Heisenberg { a: 0, b: -1, c: 0 });
            if id == "withz" {
                push("z", Element::Heisenberg { a: 0, b: 0, c: 1 });
                push("z^-1", Element::Heisenberg { a: 0, b: 0, c: -1 });
            }
        }
        (Kind::Lamplighter { p }, "std") => {
            let t = |k: i64| Element::Lamplighter {
                cursor: k,
                lamps: LampConfig::empty(p),
            };
            push("t", t(1));
            push("t^-1", t(-1));
            push(
                "a",
                Element::Lamplighter {
                    cursor: 0,
                    lamps: LampConfig::single(p, 0, 1),
                },
            );
            push(
                "a^-1",
                Element::Lamplighter {
                    cursor: 0,
                    lamps: LampConfig::single(p, 0, p - 1),
                },
            );
        }
        (Kind::Bs { m }, "std") => {
            push(
                "t",
                Element::Bs {
                    t: 1,
                    x: MAdic::zero(m),
                },
            );
            push(
                "t^-1",
                Element::Bs {
                    t: -1,
                    x: MAdic::zero(m),
                },
            );
            push(
                "x",
                Element::Bs {
                    t: 0,
                    x: MAdic::from_int(m, 1),
                },
            );
            push(
                "x^-1",
                Element::Bs {
                    t: 0,
                    x: MAdic::from_int(m, -1),
                },
            );
        }
        (Kind::Hall { q }, "std") => {
            let el = |t, x, y, z| Element::Hall(hall_coords(q, t, x, y, z));
            push("t", el(1, 0, 0, 0));
            push("t^-1", el(-1, 0, 0, 0));
            push("x", el(0, 1, 0, 0));
            push("x^-1", el(0, -1, 0, 0));
            push("y", el(0, 0, 1, 0));
            push("y^-1", el(0, 0, -1, 0));
            push("z", el(0, 0, 0, 1));
            push("z^-1", el(0, 0, 0, -1));
        }
        (Kind::HallQuotient { q }, "std") => {
            // images of the hall generators; z maps to the identity and is
            // dropped so that S stays identity-free
            let el = |t, x, y, z: i64| {
                let mut c = hall_coords(q, t, x, y, 0);
                c.z = MAdic::from_int(q, z).mod_one();
                Element::HallQuotient(c)
            };
            push("t", el(1, 0, 0, 0));
            push("t^-1", el(-1, 0, 0, 0));
            push("x", el(0, 1, 0, 0));
            push("x^-1", el(0, -1, 0, 0));
            push("y", el(0, 0, 1, 0));
            push("y^-1", el(0, 0, -1, 0));
        }
        (Kind::F2, "std") => {
            push("a", Element::F2(vec![1]));
            push("a^-1", Element::F2(vec![-1]));
            push("b", Element::F2(vec![2]));
            push("b^-1", Element::F2(vec![-2]));
        }
        _ => {
            return Err(Error::usage(format!(
                "unknown generating set `{gen_id}` for this group"
            )))
        }
    }
    Ok(gens)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Zd { d } => write!(f, "zd:d={d}")?,
            Kind::Heisenberg => write!(f, "heis")?,
            Kind::Lamplighter { p } => write!(f, "lamplighter:p={p}")?,
            Kind::Bs { m } => write!(f, "bs:m={m}")?,
            Kind::Hall { q } => write!(f, "hall:q={q}")?,
            Kind::HallQuotient { q } => write!(f, "hallq:q={q}")?,
            Kind::F2 => write!(f, "f2")?,
        }
        if self.gen_id != "std" {
            write!(f, ":gen={}", self.gen_id)?;
        }
        Ok(())
    }
}

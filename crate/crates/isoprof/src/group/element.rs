//! Canonical group elements and their exact multiplication laws.

use std::fmt;

use crate::bytes::{self, Reader};
use crate::group::lamps::LampConfig;
use crate::group::madic::MAdic;

/// Coordinates of an upper-triangular 4x4 matrix over Z[1/q] with diagonal
/// (1, q^t, q^(-t), 1), x in row 1 column 3, y in row 3 column 4, z in the
/// corner. Conjugation by the diagonal scales x by q, y by 1/q, fixes z,
/// and [x, y] lands in z.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HallCoords {
    pub t: i64,
    pub x: MAdic,
    pub y: MAdic,
    pub z: MAdic,
}

impl HallCoords {
    fn mul(&self, rhs: &Self) -> Self {
        HallCoords {
            t: self.t + rhs.t,
            x: rhs.x.add(&self.x.scale_pow(-rhs.t)),
            y: self.y.add(&rhs.y.scale_pow(-self.t)),
            z: self.z.add(&rhs.z).add(&self.x.mul(&rhs.y)),
        }
    }

    fn inv(&self) -> Self {
        HallCoords {
            t: -self.t,
            x: self.x.neg().scale_pow(self.t),
            y: self.y.neg().scale_pow(self.t),
            z: self.z.neg().add(&self.x.mul(&self.y).scale_pow(self.t)),
        }
    }

    fn encode(&self, out: &mut Vec<u8>) {
        bytes::put_zigzag(out, self.t);
        self.x.encode(out);
        self.y.encode(out);
        self.z.encode(out);
    }

    fn decode(r: &mut Reader) -> Result<Self, bytes::Truncated> {
        Ok(HallCoords {
            t: r.zigzag()?,
            x: MAdic::decode(r)?,
            y: MAdic::decode(r)?,
            z: MAdic::decode(r)?,
        })
    }
}

/// One group element in canonical form; equality of values is group equality.
///
/// The laws are total within a variant. Mixing variants (or parameters, like
/// lamp moduli) is a caller bug and panics; the validated entry points
/// live on `GroupSpec`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    /// Vector of fixed dimension d.
    Zd(Vec<i64>),
    /// Unipotent 3x3 integer matrix, superdiagonal (a, b), corner c.
    Heisenberg { a: i64, b: i64, c: i64 },
    /// t^cursor followed by a lamp configuration.
    Lamplighter { cursor: i64, lamps: LampConfig },
    /// t^k x_P with t x_P t^(-1) = x_{mP}; x holds P in Z[1/m].
    Bs { t: i64, x: MAdic },
    Hall(HallCoords),
    /// Same coordinates with z reduced into [0,1); the center Z is killed.
    HallQuotient(HallCoords),
    /// Freely reduced word, letters 1 = a, -1 = a^(-1), 2 = b, -2 = b^(-1).
    F2(Vec<i8>),
}

impl Element {
    pub fn f2_word(letters: &[i8]) -> Element {
        let mut w: Vec<i8> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(matches!(l, -2 | -1 | 1 | 2), "bad F2 letter {l}");
            if w.last() == Some(&-l) {
                w.pop();
            } else {
                w.push(l);
            }
        }
        Element::F2(w)
    }

    pub fn mul(&self, rhs: &Element) -> Element {
        match (self, rhs) {
            (Element::Zd(u), Element::Zd(v)) => {
                assert_eq!(u.len(), v.len(), "mixed dimensions");
                Element::Zd(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (
                Element::Heisenberg { a, b, c },
                Element::Heisenberg {
                    a: a2,
                    b: b2,
                    c: c2,
                },
            ) => Element::Heisenberg {
                a: a + a2,
                b: b + b2,
                c: c + c2 + a * b2,
            },
            (
                Element::Lamplighter { cursor, lamps },
                Element::Lamplighter {
                    cursor: k2,
                    lamps: f2,
                },
            ) => Element::Lamplighter {
                cursor: cursor + k2,
                lamps: lamps.shift(-k2).add(f2),
            },
            (Element::Bs { t, x }, Element::Bs { t: t2, x: x2 }) => Element::Bs {
                t: t + t2,
                x: x.scale_pow(-t2).add(x2),
            },
            (Element::Hall(g), Element::Hall(h)) => Element::Hall(g.mul(h)),
            (Element::HallQuotient(g), Element::HallQuotient(h)) => {
                let mut gh = g.mul(h);
                gh.z = gh.z.mod_one();
                Element::HallQuotient(gh)
            }
            (Element::F2(u), Element::F2(v)) => {
                let mut w = u.clone();
                for &l in v {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::F2(w)
            }
            _ => panic!("mixed group variants"),
        }
    }

    pub fn inv(&self) -> Element {
        match self {
            Element::Zd(u) => Element::Zd(u.iter().map(|a| -a).collect()),
            Element::Heisenberg { a, b, c } => Element::Heisenberg {
                a: -a,
                b: -b,
                c: a * b - c,
            },
            Element::Lamplighter { cursor, lamps } => Element::Lamplighter {
                cursor: -cursor,
                lamps: lamps.shift(*cursor).neg(),
            },
            Element::Bs { t, x } => Element::Bs {
                t: -t,
                x: x.neg().scale_pow(*t),
            },
            Element::Hall(g) => Element::Hall(g.inv()),
            Element::HallQuotient(g) => {
                let mut h = g.inv();
                h.z = h.z.mod_one();
                Element::HallQuotient(h)
            }
            Element::F2(w) => Element::F2(w.iter().rev().map(|l| -l).collect()),
        }
    }

    /// Stable injective byte form; BFS ids break ties by this encoding.
    pub fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Element::Zd(u) => {
                out.push(0);
                bytes::put_varint(out, u.len() as u64);
                for &a in u {
                    bytes::put_zigzag(out, a);
                }
            }
            Element::Heisenberg { a, b, c } => {
                out.push(1);
                bytes::put_zigzag(out, *a);
                bytes::put_zigzag(out, *b);
                bytes::put_zigzag(out, *c);
            }
            Element::Lamplighter { cursor, lamps } => {
                out.push(2);
                bytes::put_zigzag(out, *cursor);
                lamps.encode(out);
            }
            Element::Bs { t, x } => {
                out.push(3);
                bytes::put_zigzag(out, *t);
                x.encode(out);
            }
            Element::Hall(g) => {
                out.push(4);
                g.encode(out);
            }
            Element::HallQuotient(g) => {
                out.push(5);
                g.encode(out);
            }
            Element::F2(w) => {
                out.push(6);
                bytes::put_varint(out, w.len() as u64);
                for &l in w {
                    out.push(l as u8);
                }
            }
        }
    }

    pub fn encoded(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }

    pub fn decode(r: &mut Reader) -> Result<Element, bytes::Truncated> {
        let tag = r.byte()?;
        Ok(match tag {
            0 => {
                let d = r.varint()? as usize;
                let mut u = Vec::with_capacity(d);
                for _ in 0..d {
                    u.push(r.zigzag()?);
                }
                Element::Zd(u)
            }
            1 => Element::Heisenberg {
                a: r.zigzag()?,
                b: r.zigzag()?,
                c: r.zigzag()?,
            },
            2 => Element::Lamplighter {
                cursor: r.zigzag()?,
                lamps: LampConfig::decode(r)?,
            },
            3 => Element::Bs {
                t: r.zigzag()?,
                x: MAdic::decode(r)?,
            },
            4 => Element::Hall(HallCoords::decode(r)?),
            5 => Element::HallQuotient(HallCoords::decode(r)?),
            6 => {
                let n = r.varint()? as usize;
                let mut w = Vec::with_capacity(n);
                for _ in 0..n {
                    let l = r.byte()? as i8;
                    if !matches!(l, -2 | -1 | 1 | 2) || w.last() == Some(&-l) {
                        return Err(bytes::Truncated);
                    }
                    w.push(l);
                }
                Element::F2(w)
            }
            _ => return Err(bytes::Truncated),
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Zd(u) => {
                write!(f, "(")?;
                for (i, a) in u.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Element::Heisenberg { a, b, c } => write!(f, "({a},{b},{c})"),
            Element::Lamplighter { cursor, lamps } => {
                write!(f, "({cursor};")?;
                for (i, (p, v)) in lamps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}:{v}")?;
                }
                write!(f, ")")
            }
            Element::Bs { t, x } => write!(f, "({t},{x})"),
            Element::Hall(g) | Element::HallQuotient(g) => {
                write!(f, "({},{},{},{})", g.t, g.x, g.y, g.z)
            }
            Element::F2(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                for &l in w {
                    let c = match l {
                        1 => 'a',
                        -1 => 'A',
                        2 => 'b',
                        -2 => 'B',
                        _ => unreachable!(),
                    };
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis(a: i64, b: i64, c: i64) -> Element {
        Element::Heisenberg { a, b, c }
    }

    fn bs2(t: i64, num: i64) -> Element {
        Element::Bs {
            t,
            x: MAdic::from_int(2, num),
        }
    }

    #[test]
    fn heisenberg_law() {
        assert_eq!(heis(1, 0, 0).mul(&heis(0, 1, 0)), heis(1, 1, 1));
        assert_eq!(heis(1, 1, 1).inv(), heis(-1, -1, 0));
        assert_eq!(heis(1, 1, 1).mul(&heis(1, 1, 1).inv()), heis(0, 0, 0));
    }

    #[test]
    fn bs_conjugation_doubles() {
        let t = bs2(1, 0);
        let x = bs2(0, 1);
        let conj = t.mul(&x).mul(&t.inv());
        assert_eq!(conj, bs2(0, 2));
        // t^k x t^(-k) = x^(m^k)
        let mut g = x.clone();
        for k in 1..=12i64 {
            g = bs2(1, 0).mul(&g).mul(&bs2(-1, 0));
            assert_eq!(g, bs2(0, 1 << k));
        }
    }

    #[test]
    fn lamplighter_conjugation_shifts() {
        let t = Element::Lamplighter {
            cursor: 1,
            lamps: LampConfig::empty(2),
        };
        let a = Element::Lamplighter {
            cursor: 0,
            lamps: LampConfig::single(2, 0, 1),
        };
        let conj = t.mul(&a).mul(&t.inv());
        assert_eq!(
            conj,
            Element::Lamplighter {
                cursor: 0,
                lamps: LampConfig::single(2, 1, 1),
            }
        );
    }

    #[test]
    fn lamplighter_inverse() {
        let g = Element::Lamplighter {
            cursor: 3,
            lamps: LampConfig::single(3, 1, 2).add(&LampConfig::single(3, -2, 1)),
        };
        let e = Element::Lamplighter {
            cursor: 0,
            lamps: LampConfig::empty(3),
        };
        assert_eq!(g.mul(&g.inv()), e);
        assert_eq!(g.inv().mul(&g), e);
    }

    #[test]
    fn hall_commutator_is_central() {
        let q = 2;
        let zero = MAdic::zero(q);
        let one = MAdic::from_int(q, 1);
        let el = |t: i64, x: &MAdic, y: &MAdic, z: &MAdic| {
            Element::Hall(HallCoords {
                t,
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
            })
        };
        let x = el(0, &one, &zero, &zero);
        let y = el(0, &zero, &one, &zero);
        let z = el(0, &zero, &zero, &one);
        let comm = x.mul(&y).mul(&x.inv()).mul(&y.inv());
        assert_eq!(comm, z);
        let t = el(1, &zero, &zero, &zero);
        // t x t^(-1) = x^q, t y t^(-1) = y^(1/q), t z t^(-1) = z
        assert_eq!(t.mul(&x).mul(&t.inv()), el(0, &one.scale_pow(1), &zero, &zero));
        assert_eq!(t.mul(&y).mul(&t.inv()), el(0, &zero, &one.scale_pow(-1), &zero));
        assert_eq!(t.mul(&z).mul(&t.inv()), z);
        let g = el(2, &MAdic::from_scaled(q, 3, 1), &one, &MAdic::from_int(q, 5));
        assert_eq!(g.mul(&g.inv()), el(0, &zero, &zero, &zero));
        assert_eq!(g.inv().mul(&g), el(0, &zero, &zero, &zero));
    }

    #[test]
    fn f2_reduction() {
        let w = Element::f2_word(&[1, 2, -2, -1, 1]);
        assert_eq!(w, Element::F2(vec![1]));
        let u = Element::f2_word(&[1, 2]);
        assert_eq!(u.mul(&u.inv()), Element::F2(vec![]));
        assert_eq!(format!("{}", Element::f2_word(&[1, -2, 1])), "aBa");
    }

    #[test]
    fn encode_roundtrip() {
        let els = vec![
            Element::Zd(vec![3, -2]),
            heis(1, -5, 7),
            Element::Lamplighter {
                cursor: -4,
                lamps: LampConfig::single(3, 2, 2),
            },
            bs2(3, 5),
            Element::F2(vec![1, 2, -1]),
        ];
        for e in els {
            let buf = e.encoded();
            let mut r = Reader::new(&buf);
            assert_eq!(Element::decode(&mut r).unwrap(), e);
            assert!(r.is_empty());
        }
    }
}

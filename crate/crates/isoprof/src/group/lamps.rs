//! Finitely supported lamp configurations Z -> Z/p with pointwise addition.

use crate::bytes::{self, Reader};

/// Sorted sparse map position -> value, values in 1..modulus.
///
/// Invariant: positions strictly increasing, no stored zeros, so derived
/// equality and hashing agree with equality of configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LampConfig {
    modulus: u32,
    lamps: Vec<(i64, u32)>,
}

impl LampConfig {
    pub fn empty(modulus: u32) -> Self {
        assert!(modulus >= 2);
        LampConfig {
            modulus,
            lamps: Vec::new(),
        }
    }

    pub fn single(modulus: u32, pos: i64, value: u32) -> Self {
        let value = value % modulus;
        let mut c = LampConfig::empty(modulus);
        if value != 0 {
            c.lamps.push((pos, value));
        }
        c
    }

    /// From a position-sorted list of nonzero lamp values.
    pub fn from_sorted(modulus: u32, lamps: Vec<(i64, u32)>) -> Self {
        assert!(modulus >= 2);
        debug_assert!(lamps.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(lamps.iter().all(|&(_, v)| v != 0 && v < modulus));
        LampConfig { modulus, lamps }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_empty(&self) -> bool {
        self.lamps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.lamps.iter().copied()
    }

    pub fn support_len(&self) -> usize {
        self.lamps.len()
    }

    pub fn value_at(&self, pos: i64) -> u32 {
        match self.lamps.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) => self.lamps[i].1,
            Err(_) => 0,
        }
    }

    pub fn min_pos(&self) -> Option<i64> {
        self.lamps.first().map(|&(p, _)| p)
    }

    pub fn max_pos(&self) -> Option<i64> {
        self.lamps.last().map(|&(p, _)| p)
    }

    /// Pointwise sum mod p (merge of two sorted lists).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        let mut lamps = Vec::with_capacity(self.lamps.len() + other.lamps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.lamps.len() || j < other.lamps.len() {
            let take_left = match (self.lamps.get(i), other.lamps.get(j)) {
                (Some(&(a, _)), Some(&(b, _))) => {
                    if a == b {
                        let v = (self.lamps[i].1 + other.lamps[j].1) % self.modulus;
                        if v != 0 {
                            lamps.push((a, v));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a < b
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                lamps.push(self.lamps[i]);
                i += 1;
            } else {
                lamps.push(other.lamps[j]);
                j += 1;
            }
        }
        LampConfig {
            modulus: self.modulus,
            lamps,
        }
    }

    /// Translates every lamp from position x to x + j.
    pub fn shift(&self, j: i64) -> Self {
        LampConfig {
            modulus: self.modulus,
            lamps: self.lamps.iter().map(|&(p, v)| (p + j, v)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        LampConfig {
            modulus: self.modulus,
            lamps: self
                .lamps
                .iter()
                .map(|&(p, v)| (p, self.modulus - v))
                .collect(),
        }
    }

    /// Total generator cost of the lamps: each value v costs min(v, p - v).
    pub fn toggle_cost(&self) -> u64 {
        self.lamps
            .iter()
            .map(|&(_, v)| v.min(self.modulus - v) as u64)
            .sum()
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        bytes::put_varint(out, self.modulus as u64);
        bytes::put_varint(out, self.lamps.len() as u64);
        for &(p, v) in &self.lamps {
            bytes::put_zigzag(out, p);
            bytes::put_varint(out, v as u64);
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Self, bytes::Truncated> {
        let modulus = r.varint()? as u32;
        if modulus < 2 {
            return Err(bytes::Truncated);
        }
        let n = r.varint()? as usize;
        let mut lamps = Vec::with_capacity(n);
        let mut prev: Option<i64> = None;
        for _ in 0..n {
            let p = r.zigzag()?;
            let v = r.varint()? as u32;
            if v == 0 || v >= modulus || prev.is_some_and(|q| q >= p) {
                return Err(bytes::Truncated);
            }
            prev = Some(p);
            lamps.push((p, v));
        }
        Ok(LampConfig { modulus, lamps })
    }
}

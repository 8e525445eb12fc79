//! The two profile values with combinatorial extremizers: the sup-norm
//! quotient, whose optimizer is the distance-to-complement function (so the
//! value is the inradius of the region plus one... precisely max_x d(x, A^c)),
//! and the L^1 quotient of an indicator, |Omega| over its boundary point
//! count, which lower-bounds the L^1 profile of every superset.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::ball::BallIndex;
use crate::error::{Error, Result};

fn region_ids(index: &BallIndex, a: &[u32]) -> Result<Vec<u32>> {
    if a.is_empty() {
        return Err(Error::usage("region must be nonempty"));
    }
    let mut ids = a.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.last().copied().unwrap_or(0) as usize >= index.len() {
        return Err(Error::usage("region id outside the ball index"));
    }
    Ok(ids)
}

/// max_{x in A} d(x, complement of A), the p = infinity quotient
/// sup ||f||_inf / || |grad f|_1 ||_inf with optimizer f(x) = d(x, A^c).
///
/// Distances are taken in the group, not in the index: the result is
/// accepted only when every BFS distance is certified unbeatable by paths
/// through elements beyond the index radius, and is then exact.
pub fn jinf_inradius(index: &BallIndex, a: &[u32]) -> Result<u32> {
    let ids = region_ids(index, a)?;
    let n = index.len();
    let mut member = vec![false; n];
    for &id in &ids {
        member[id as usize] = true;
    }

    // multi-source BFS from the in-index complement
    const UNSEEN: u32 = u32::MAX;
    let mut dist = vec![UNSEEN; n];
    let mut queue = VecDeque::new();
    for id in 0..n as u32 {
        if !member[id as usize] {
            dist[id as usize] = 0;
            queue.push_back(id);
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize];
        for s in 0..index.gen_count() {
            if let Some(y) = index.step(x, s) {
                if dist[y as usize] == UNSEEN {
                    dist[y as usize] = d + 1;
                    queue.push_back(y);
                }
            }
        }
    }

    // A path from x that leaves the index meets the complement at its first
    // out-of-index point, at distance >= radius+1-|x|. The in-index BFS value
    // is exact whenever it does not exceed that bound.
    let horizon = index.radius() + 1;
    let mut best = 0;
    for &id in &ids {
        let d = dist[id as usize];
        if d == UNSEEN || d + index.sphere(id) > horizon {
            return Err(Error::usage(
                "region touches the index boundary: distance to the complement is \
                 not determined at this radius; rebuild the index larger",
            ));
        }
        best = best.max(d);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct J1Candidate {
    pub volume: u64,
    pub inner_boundary: u64,
    pub outer_boundary: u64,
}

impl J1Candidate {
    /// |Omega| / (inner + outer boundary count).
    pub fn value(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.volume),
            BigInt::from(self.inner_boundary + self.outer_boundary),
        )
    }
}

/// Indicator quotient |Omega| / || |grad 1_Omega|_1 ||_1. The denominator
/// counts boundary points on both sides, including neighbors beyond the
/// index, which are enumerated exactly, so the value never depends on the
/// index radius. Lower-bounds the L^1 quotient of every superset of Omega.
pub fn j1_candidate(index: &BallIndex, omega: &[u32]) -> Result<J1Candidate> {
    let ids = region_ids(index, omega)?;
    let mut member = vec![false; index.len()];
    for &id in &ids {
        member[id as usize] = true;
    }

    let mut inner = 0u64;
    let mut outer_in = vec![false; index.len()];
    let mut outer_ext = HashSet::new();
    for &id in &ids {
        let mut escapes = false;
        for s in 0..index.gen_count() {
            match index.step(id, s) {
                Some(y) if member[y as usize] => {}
                Some(y) => {
                    escapes = true;
                    outer_in[y as usize] = true;
                }
                None => {
                    escapes = true;
                    let spec = index.spec();
                    let (_, g) = &spec.generators()[s];
                    outer_ext.insert(spec.multiply(index.element(id), g)?);
                }
            }
        }
        if escapes {
            inner += 1;
        }
    }
    let outer = outer_in.iter().filter(|&&b| b).count() as u64 + outer_ext.len() as u64;
    Ok(J1Candidate {
        volume: ids.len() as u64,
        inner_boundary: inner,
        outer_boundary: outer,
    })
}

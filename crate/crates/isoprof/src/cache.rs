//! Binary on-disk cache for enumerated balls.
//!
//! Layout: magic, format version, group-spec string, radius, length-prefixed
//! element table in id order, then one id-pair list per generator. Sphere
//! radii and the growth series are rebuilt from the adjacency on load, which
//! doubles as an integrity check. Writes go through a temp file and rename.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::ball::{BallIndex, NO_EDGE};
use crate::bytes::{self, Reader};
use crate::error::{Error, Result};
use crate::group::element::Element;
use crate::group::GroupSpec;

const MAGIC: &[u8; 8] = b"ISOBALL\n";
const VERSION: u64 = 1;

pub fn save_ball(index: &BallIndex, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    bytes::put_varint(&mut out, VERSION);
    let spec = index.spec().to_string();
    bytes::put_varint(&mut out, spec.len() as u64);
    out.extend_from_slice(spec.as_bytes());
    bytes::put_varint(&mut out, index.radius() as u64);
    bytes::put_varint(&mut out, index.len() as u64);
    for id in index.ids() {
        let enc = index.element(id).encoded();
        bytes::put_varint(&mut out, enc.len() as u64);
        out.extend_from_slice(&enc);
    }
    for s in 0..index.gen_count() {
        let pairs: Vec<(u32, u32)> = index
            .ids()
            .filter_map(|id| index.step(id, s).map(|t| (id, t)))
            .collect();
        bytes::put_varint(&mut out, pairs.len() as u64);
        for (a, b) in pairs {
            bytes::put_varint(&mut out, a as u64);
            bytes::put_varint(&mut out, b as u64);
        }
    }
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("ball"),
        std::process::id()
    ));
    fs::write(&tmp, &out)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn corrupt(path: &Path, why: &str) -> Error {
    Error::usage(format!("cache file {} is not usable: {why}", path.display()))
}

pub fn load_ball(path: &Path) -> Result<BallIndex> {
    let data = fs::read(path)?;
    let bad = |why: &str| corrupt(path, why);
    if data.len() < 8 || &data[..8] != MAGIC {
        return Err(bad("wrong magic"));
    }
    let mut r = Reader::new(&data[8..]);
    let read = |r: &mut Reader| -> std::result::Result<BallIndex, bytes::Truncated> {
        let version = r.varint()?;
        if version != VERSION {
            return Err(bytes::Truncated);
        }
        let spec_len = r.varint()? as usize;
        let spec_str = String::from_utf8(r.take(spec_len)?.to_vec()).map_err(|_| bytes::Truncated)?;
        let spec = GroupSpec::parse(&spec_str).map_err(|_| bytes::Truncated)?;
        let radius = r.varint()? as u32;
        let count = r.varint()? as usize;
        let mut elements = Vec::with_capacity(count);
        for _ in 0..count {
            let len = r.varint()? as usize;
            let enc = r.take(len)?;
            let mut er = Reader::new(enc);
            let e = Element::decode(&mut er)?;
            if !er.is_empty() {
                return Err(bytes::Truncated);
            }
            elements.push(e);
        }
        let gens = spec.generators().len();
        let mut adjacency = vec![vec![NO_EDGE; count]; gens];
        for adj in adjacency.iter_mut() {
            let pairs = r.varint()? as usize;
            for _ in 0..pairs {
                let a = r.varint()? as usize;
                let b = r.varint()? as u32;
                if a >= count || b as usize >= count {
                    return Err(bytes::Truncated);
                }
                adj[a] = b;
            }
        }
        if !r.is_empty() {
            return Err(bytes::Truncated);
        }
        BallIndex::from_parts(spec, radius, elements, adjacency).map_err(|_| bytes::Truncated)
    };
    read(&mut r).map_err(|_| bad("truncated or inconsistent"))
}

/// Stable file name for a (spec, radius) pair inside a cache directory.
pub fn cache_file_name(spec: &GroupSpec, r: u32) -> String {
    let key: String = spec
        .to_string()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect();
    format!("{key}-r{r}.ball")
}

/// Loads the exact (spec, radius) cache entry when present, otherwise
/// builds the ball and writes it back. `dir = None` skips persistence.
pub fn load_or_build(
    spec: &GroupSpec,
    r: u32,
    dir: Option<&Path>,
    budget_bytes: u64,
) -> Result<BallIndex> {
    let path: Option<PathBuf> = dir.map(|d| d.join(cache_file_name(spec, r)));
    if let Some(p) = &path {
        if p.exists() {
            let index = load_ball(p)?;
            if index.spec() == spec && index.radius() == r {
                return Ok(index);
            }
            return Err(corrupt(p, "keyed for a different spec or radius"));
        }
    }
    let index = crate::ball::build_ball_budgeted(spec, r, budget_bytes)?;
    if let Some(p) = &path {
        save_ball(&index, p)?;
    }
    Ok(index)
}

impl BallIndex {
    /// Rebuilds lookup, sphere radii and growth from the element table and
    /// adjacency; fails when the adjacency is not a connected BFS-ordered
    /// ball around the identity.
    pub fn from_parts(
        spec: GroupSpec,
        radius: u32,
        elements: Vec<Element>,
        adjacency: Vec<Vec<u32>>,
    ) -> Result<BallIndex> {
        if elements.first() != Some(&spec.identity()) {
            return Err(Error::usage("cache does not start at the identity"));
        }
        let mut lookup = HashMap::with_capacity(elements.len());
        for (id, e) in elements.iter().enumerate() {
            if lookup.insert(e.clone(), id as u32).is_some() {
                return Err(Error::usage("duplicate element in cache"));
            }
        }
        let mut sphere_of = vec![u32::MAX; elements.len()];
        sphere_of[0] = 0;
        let mut growth = vec![1u64];
        let mut layer = vec![0u32];
        let mut seen = 1usize;
        let mut k = 0u32;
        while !layer.is_empty() && k < radius {
            k += 1;
            let mut next = Vec::new();
            for &id in &layer {
                for adj in &adjacency {
                    let t = adj[id as usize];
                    if t != NO_EDGE && sphere_of[t as usize] == u32::MAX {
                        sphere_of[t as usize] = k;
                        next.push(t);
                    }
                }
            }
            seen += next.len();
            growth.push(seen as u64);
            layer = next;
        }
        if seen != elements.len() {
            return Err(Error::usage("cache adjacency does not span the ball"));
        }
        while growth.len() <= radius as usize {
            growth.push(seen as u64);
        }
        // BFS-ordered ids: word lengths must be nondecreasing in id
        if sphere_of.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::usage("cache ids are not BFS ordered"));
        }
        Ok(BallIndex::assemble(
            spec, radius, elements, lookup, sphere_of, adjacency, growth,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::build_ball;

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        for spec in ["zd:d=2", "heis", "lamplighter:p=2", "bs:m=2", "hall:q=2", "f2"] {
            let g = GroupSpec::parse(spec).unwrap();
            let b = build_ball(&g, 3).unwrap();
            let path = dir.path().join(cache_file_name(&g, 3));
            save_ball(&b, &path).unwrap();
            let c = load_ball(&path).unwrap();
            assert_eq!(c.spec(), b.spec());
            assert_eq!(c.radius(), b.radius());
            assert_eq!(c.growth(), b.growth());
            for id in b.ids() {
                assert_eq!(b.element(id), c.element(id));
                assert_eq!(b.sphere(id), c.sphere(id));
                for s in 0..b.gen_count() {
                    assert_eq!(b.step(id, s), c.step(id, s));
                }
            }
        }
    }

    #[test]
    fn load_or_build_reuses_file() {
        let dir = tempfile::tempdir().unwrap();
        let g = GroupSpec::parse("zd:d=2").unwrap();
        let b1 = load_or_build(&g, 4, Some(dir.path()), u64::MAX).unwrap();
        let path = dir.path().join(cache_file_name(&g, 4));
        assert!(path.exists());
        let before = std::fs::metadata(&path).unwrap().modified().unwrap();
        let b2 = load_or_build(&g, 4, Some(dir.path()), u64::MAX).unwrap();
        let after = std::fs::metadata(&path).unwrap().modified().unwrap();
        assert_eq!(before, after);
        assert_eq!(b1.growth(), b2.growth());
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ball");
        std::fs::write(&path, b"not a cache").unwrap();
        assert!(load_ball(&path).is_err());

        let g = GroupSpec::parse("zd:d=1").unwrap();
        let b = build_ball(&g, 2).unwrap();
        save_ball(&b, &path).unwrap();
        let mut data = std::fs::read(&path).unwrap();
        let n = data.len();
        data.truncate(n - 3);
        std::fs::write(&path, &data).unwrap();
        assert!(load_ball(&path).is_err());
    }
}

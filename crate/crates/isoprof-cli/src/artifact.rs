//! Artifact plumbing: atomic writes, the shared comment-header format, and
//! parsers that read emitted CSV artifacts back into the structures that
//! produced them.

use std::collections::BTreeMap;
use std::path::Path;

use isoprof::func::P;
use isoprof::profile::{ArgKind, BoundKind, Method, ProfileCurve, ProfilePoint};
use isoprof::randomwalk::{DecayPoint, DecaySequence};
use isoprof::{Error, Result};

/// 17 significant digits, enough to reproduce the binary64 value exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Temp file in the target directory, then rename: readers never observe a
/// half-written artifact.
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Write to the output file atomically, or to stdout when none is given.
pub fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => atomic_write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// A parsed comment-headed CSV artifact.
#[derive(Debug, Clone)]
pub struct CsvArtifact {
    pub command: String,
    pub config: BTreeMap<String, String>,
    /// Header row plus data rows, comments stripped.
    pub rows: Vec<String>,
}

pub fn parse_csv_artifact(text: &str) -> Result<CsvArtifact> {
    let mut command = String::new();
    let mut config = BTreeMap::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(cmd) = comment.strip_prefix("isoprof ") {
                command = cmd.to_string();
            } else if let Some((k, v)) = comment.split_once('=') {
                config.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else if !line.trim().is_empty() {
            rows.push(line.to_string());
        }
    }
    if command.is_empty() {
        return Err(Error::usage("not an isoprof artifact: missing `# isoprof <command>` line"));
    }
    Ok(CsvArtifact {
        command,
        config,
        rows,
    })
}

fn config_str<'a>(art: &'a CsvArtifact, key: &str) -> Result<&'a str> {
    art.config
        .get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| Error::usage(format!("artifact header is missing `{key}`")))
}

fn field<'a>(parts: &[&'a str], i: usize, line: &str) -> Result<&'a str> {
    parts
        .get(i)
        .copied()
        .ok_or_else(|| Error::usage(format!("short artifact row: `{line}`")))
}

/// Rebuild a profile curve from its CSV artifact.
pub fn parse_profile_csv(text: &str) -> Result<ProfileCurve> {
    let art = parse_csv_artifact(text)?;
    if art.command != "profile" {
        return Err(Error::usage(format!(
            "expected a profile artifact, found `{}`",
            art.command
        )));
    }
    let group = config_str(&art, "group")?.to_string();
    let p = P::parse(config_str(&art, "p")?)?;
    let arg = match config_str(&art, "axis")? {
        "radius" => ArgKind::Radius,
        "volume" => ArgKind::Volume,
        other => return Err(Error::usage(format!("unknown profile axis `{other}`"))),
    };
    let averaged_denominator = config_str(&art, "averaged-denominator")? == "true";
    let mut points = Vec::new();
    for line in art.rows.iter().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        let arg_v: u64 = field(&parts, 0, line)?
            .parse()
            .map_err(|_| Error::usage(format!("bad profile row: `{line}`")))?;
        let value: f64 = field(&parts, 1, line)?
            .parse()
            .map_err(|_| Error::usage(format!("bad profile row: `{line}`")))?;
        let bound = match field(&parts, 2, line)? {
            "exact" => BoundKind::Exact,
            "lower" => BoundKind::Lower,
            "upper" => BoundKind::Upper,
            other => return Err(Error::usage(format!("unknown bound kind `{other}`"))),
        };
        let method = Method::parse(field(&parts, 3, line)?)?;
        points.push(ProfilePoint {
            arg: arg_v,
            volume: None,
            value,
            exact: None,
            bound,
            method,
        });
    }
    Ok(ProfileCurve {
        group,
        p,
        arg,
        averaged_denominator,
        points,
    })
}

/// Rebuild a return-probability sequence from its CSV artifact.
pub fn parse_walk_csv(text: &str) -> Result<DecaySequence> {
    let art = parse_csv_artifact(text)?;
    if art.command != "walk" {
        return Err(Error::usage(format!(
            "expected a walk artifact, found `{}`",
            art.command
        )));
    }
    let group = config_str(&art, "group")?.to_string();
    let theta = config_str(&art, "theta")?;
    let truncated = art.config.get("result-truncated").map(|s| s.as_str()) == Some("true");
    let mut points = Vec::new();
    for line in art.rows.iter().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        let n: u32 = field(&parts, 0, line)?
            .parse()
            .map_err(|_| Error::usage(format!("bad walk row: `{line}`")))?;
        let num = field(&parts, 1, line)?;
        let den = field(&parts, 2, line)?;
        let value = format!("{num}/{den}")
            .parse()
            .map_err(|_| Error::usage(format!("bad walk row: `{line}`")))?;
        points.push(DecayPoint { n, value });
    }
    Ok(DecaySequence {
        group: group.clone(),
        measure: format!("{group} theta={theta}"),
        points,
        truncated,
    })
}

/// (radius, volume) rows of a growth artifact.
pub fn parse_growth_csv(text: &str) -> Result<(String, Vec<(u32, u64)>)> {
    let art = parse_csv_artifact(text)?;
    if art.command != "growth" {
        return Err(Error::usage(format!(
            "expected a growth artifact, found `{}`",
            art.command
        )));
    }
    let group = config_str(&art, "group")?.to_string();
    let mut rows = Vec::new();
    for line in art.rows.iter().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        let r: u32 = field(&parts, 0, line)?
            .parse()
            .map_err(|_| Error::usage(format!("bad growth row: `{line}`")))?;
        let v: u64 = field(&parts, 1, line)?
            .parse()
            .map_err(|_| Error::usage(format!("bad growth row: `{line}`")))?;
        rows.push((r, v));
    }
    Ok((group, rows))
}

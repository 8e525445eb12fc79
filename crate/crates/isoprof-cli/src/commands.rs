//! One function per subcommand. Each resolves its parameters from the
//! merged configuration, records the values actually used, runs the
//! library call, and emits the artifact (stdout or atomic file write).

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use serde_json::json;

use isoprof::ball::Side;
use isoprof::cache;
use isoprof::folner::{self, Family};
use isoprof::func::{FunctionOnBall, P};
use isoprof::group::{GroupSpec, ZSubgroup};
use isoprof::profile::{profile_in_balls, sobolev_check, ArgKind, Method, Phi, SobolevFit};
use isoprof::randomwalk::{
    fit_decay, profile_decay_diagnostic, return_probabilities_budgeted, standard_measure,
    DecayModel, DecaySequence, FitReport, DEFAULT_SUPPORT_BUDGET,
};
use isoprof::transfer::{compression_budgeted, psi_report};
use isoprof::{Error, Result};

use crate::artifact::{
    emit, fmt_f64, parse_csv_artifact, parse_growth_csv, parse_profile_csv, parse_walk_csv,
};
use crate::config::ExperimentConfig;

/// Settings shared by every subcommand.
pub struct Common {
    pub cache_dir: Option<PathBuf>,
    pub budget_bytes: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

fn count_json(n: u128) -> serde_json::Value {
    match u64::try_from(n) {
        Ok(small) => json!(small),
        Err(_) => json!(n.to_string()),
    }
}

fn json_artifact(payload: &serde_json::Value) -> String {
    let mut out = serde_json::to_string_pretty(payload).expect("serializable payload");
    out.push('\n');
    out
}

pub fn ball(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let spec = GroupSpec::parse(cfg.require("group")?)?;
    cfg.record("group", &spec);
    let radius: u32 = cfg.required("radius")?;
    let index = cache::load_or_build(&spec, radius, common.cache_dir.as_deref(), common.budget_bytes)?;
    let cached = common
        .cache_dir
        .as_ref()
        .map(|d| d.join(cache::cache_file_name(&spec, radius)).display().to_string())
        .unwrap_or_else(|| "none".to_string());
    let line = format!(
        "group={spec} radius={radius} elements={} cache={cached}\n",
        index.len()
    );
    emit(common.output.as_deref(), &line)
}

pub fn growth(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let spec = GroupSpec::parse(cfg.require("group")?)?;
    cfg.record("group", &spec);
    let radius: u32 = cfg.required("radius")?;
    let out = cfg.parsed_or("out", "csv".to_string())?;
    if out != "csv" {
        return Err(Error::usage("growth emits csv only"));
    }
    let index = cache::load_or_build(&spec, radius, common.cache_dir.as_deref(), common.budget_bytes)?;
    let mut body = cfg.header("growth");
    body.push_str("r,volume\n");
    for (r, v) in index.growth().iter().enumerate() {
        body.push_str(&format!("{r},{v}\n"));
    }
    emit(common.output.as_deref(), &body)
}

fn sobolev_json(fit: &SobolevFit) -> serde_json::Value {
    json!({
        "c": fit.c,
        "cPrime": fit.c_prime,
        "maxViolation": fit.max_violation,
    })
}

pub fn profile(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let spec = GroupSpec::parse(cfg.require("group")?)?;
    cfg.record("group", &spec);
    let p = P::parse(cfg.require("p")?)?;
    cfg.record("p", p.name());
    let rmax: u32 = cfg.required("rmax")?;
    let method = Method::parse(cfg.require("method")?)?;
    cfg.record("method", method.name());
    let out = cfg.parsed_or("out", "csv".to_string())?;
    let phi = cfg.get("phi").map(Phi::parse).transpose()?;

    let curve = profile_in_balls(&spec, p, rmax, method)?;
    curve.check_monotone()?;
    let fit = phi.map(|ph| sobolev_check(&curve, ph)).transpose()?;

    cfg.record(
        "axis",
        match curve.arg {
            ArgKind::Radius => "radius",
            ArgKind::Volume => "volume",
        },
    );
    cfg.record("averaged-denominator", curve.averaged_denominator);
    if let Some(f) = &fit {
        cfg.record("result-sobolev-c", fmt_f64(f.c));
        cfg.record("result-sobolev-c-prime", fmt_f64(f.c_prime));
    }

    match out.as_str() {
        "csv" => {
            let mut body = cfg.header("profile");
            body.push_str("r_or_v,value,bound_kind,method\n");
            for pt in &curve.points {
                body.push_str(&format!(
                    "{},{},{},{}\n",
                    pt.arg,
                    fmt_f64(pt.value),
                    pt.bound.name(),
                    pt.method.name()
                ));
            }
            emit(common.output.as_deref(), &body)
        }
        "json" => {
            let points: Vec<serde_json::Value> = curve
                .points
                .iter()
                .map(|pt| {
                    json!({
                        "arg": pt.arg,
                        "volume": pt.volume,
                        "value": pt.value,
                        "exactNum": pt.exact.as_ref().map(|x| x.numer().to_string()),
                        "exactDen": pt.exact.as_ref().map(|x| x.denom().to_string()),
                        "bound": pt.bound.name(),
                        "method": pt.method.name(),
                    })
                })
                .collect();
            let payload = json!({
                "command": "profile",
                "config": cfg.json(),
                "points": points,
                "sobolev": fit.as_ref().map(sobolev_json),
            });
            emit(common.output.as_deref(), &json_artifact(&payload))
        }
        other => Err(Error::usage(format!("unknown output format `{other}`"))),
    }
}

pub fn folner_cmd(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let spec = GroupSpec::parse(cfg.require("group")?)?;
    cfg.record("group", &spec);
    let family = Family::parse(cfg.require("family")?)?;
    cfg.record("family", family.name());
    let n: u32 = cfg.required("n")?;
    let side = cfg.get("side").map(Side::parse).transpose()?;
    let report_fmt = cfg.parsed_or("report", "json".to_string())?;
    if report_fmt != "json" {
        return Err(Error::usage("folner reports are json only"));
    }

    let pair = folner::construct_with_side(&spec, family, n, side)?;
    let report = folner::check(&pair);
    let mut ratios = BTreeMap::new();
    for (key, p) in [("p1", P::One), ("p2", P::Two), ("pinf", P::Inf)] {
        ratios.insert(key, folner::test_function(&pair, p)?.ratio());
    }

    let payload = json!({
        "command": "folner",
        "config": cfg.json(),
        "n": report.n,
        "sizeF": count_json(report.size_f),
        "sizeFp": count_json(report.size_fp),
        "measuredC": report.measured_c.to_string(),
        "neighborhoodOk": report.neighborhood_ok,
        "diameterOk": report.diameter_ok,
        "measuredK": report.measured_k,
        "testFunctionRatios": ratios,
    });
    emit(common.output.as_deref(), &json_artifact(&payload))
}

pub fn transfer_psi(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let from = GroupSpec::parse(cfg.require("from")?)?;
    cfg.record("from", &from);
    let to = GroupSpec::parse(cfg.require("to")?)?;
    cfg.record("to", &to);
    let p = P::parse(cfg.require("p")?)?;
    cfg.record("p", p.name());
    let trials: u32 = cfg.parsed_or("trials", 100)?;
    let radius: u32 = cfg.parsed_or("radius", 3)?;
    let side = Side::parse(&cfg.parsed_or("side", "right".to_string())?)?;
    cfg.record("seed", common.seed);

    let gi = cache::load_or_build(&from, radius, common.cache_dir.as_deref(), common.budget_bytes)?;
    let qi = cache::load_or_build(&to, radius + 1, common.cache_dir.as_deref(), common.budget_bytes)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed);

    let mut isometry_failures = 0u32;
    let mut contraction_failures = 0u32;
    let mut last = None;
    for _ in 0..trials {
        let mut f = FunctionOnBall::zero(&gi);
        for id in gi.ids() {
            if rng.gen_bool(0.3) {
                f.set(
                    id,
                    BigRational::new(
                        BigInt::from(rng.gen_range(-9i64..=9)),
                        BigInt::from(rng.gen_range(1i64..=4)),
                    ),
                );
            }
        }
        let report = psi_report(&gi, &qi, &f, p, side)?;
        if !report.isometry_ok {
            isometry_failures += 1;
        }
        if report.contractions.iter().any(|c| !c.ok) {
            contraction_failures += 1;
        }
        last = Some(report);
    }
    let last = last.ok_or_else(|| Error::usage("transfer psi needs trials >= 1"))?;

    let payload = json!({
        "command": "transfer psi",
        "config": cfg.json(),
        "trials": trials,
        "radius": radius,
        "allOk": isometry_failures == 0 && contraction_failures == 0,
        "isometryFailures": isometry_failures,
        "contractionFailures": contraction_failures,
        "generators": last.contractions.iter().map(|c| json!({
            "generator": c.generator,
            "image": c.image,
            "upstairsPow": c.upstairs_pow.to_string(),
            "downstairsPow": c.downstairs_pow,
            "ok": c.ok,
        })).collect::<Vec<_>>(),
    });
    emit(common.output.as_deref(), &json_artifact(&payload))
}

pub fn transfer_compression(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let amb = GroupSpec::parse(cfg.require("amb")?)?;
    cfg.record("amb", &amb);
    let sub = ZSubgroup::parse(cfg.require("sub")?)?;
    cfg.record("sub", sub.name());
    let rmax: u32 = cfg.required("rmax")?;
    let out = cfg.parsed_or("out", "csv".to_string())?;
    if out != "csv" {
        return Err(Error::usage("compression emits csv only"));
    }

    let curve = compression_budgeted(&amb, sub, rmax, common.budget_bytes)?;
    cfg.record(
        "result-lipschitz",
        curve
            .lipschitz
            .map_or("none".to_string(), |l| l.to_string()),
    );
    cfg.record("result-g-radius", curve.g_radius);
    cfg.record("result-truncated", curve.truncated);

    let mut body = cfg.header("transfer compression");
    body.push_str(&curve.csv());
    emit(common.output.as_deref(), &body)
}

pub fn walk(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let spec = GroupSpec::parse(cfg.require("group")?)?;
    cfg.record("group", &spec);
    let theta_s = cfg.get("theta").unwrap_or("1/2").to_string();
    cfg.record("theta", &theta_s);
    let theta: BigRational = theta_s
        .parse()
        .map_err(|_| Error::usage(format!("theta: cannot parse `{theta_s}` as a rational")))?;
    let nmax: u32 = cfg.required("nmax")?;
    let support_budget: usize = cfg.parsed_or("support-budget", DEFAULT_SUPPORT_BUDGET)?;
    let out = cfg.parsed_or("out", "csv".to_string())?;

    let measure = standard_measure(&spec, theta)?;
    let seq = return_probabilities_budgeted(&measure, nmax, support_budget)?;
    cfg.record("result-truncated", seq.truncated);
    cfg.record("result-attained", seq.attained());

    match out.as_str() {
        "csv" => {
            let mut body = cfg.header("walk");
            body.push_str(&seq.csv());
            emit(common.output.as_deref(), &body)
        }
        "json" => {
            let payload = json!({
                "command": "walk",
                "config": cfg.json(),
                "truncated": seq.truncated,
                "points": seq.points.iter().map(|pt| json!({
                    "n": pt.n,
                    "num": pt.value.numer().to_string(),
                    "den": pt.value.denom().to_string(),
                })).collect::<Vec<_>>(),
            });
            emit(common.output.as_deref(), &json_artifact(&payload))
        }
        other => Err(Error::usage(format!("unknown output format `{other}`"))),
    }
}

fn fit_json(fit: &FitReport) -> serde_json::Value {
    json!({
        "model": fit.model.name(),
        "param": fit.param,
        "constant": fit.constant,
        "residual": fit.residual,
        "windows": fit.windows.iter().map(|w| json!({
            "nLo": w.n_lo,
            "nHi": w.n_hi,
            "param": w.param,
        })).collect::<Vec<_>>(),
    })
}

pub fn walk_fit(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let model = DecayModel::parse(cfg.require("model")?)?;
    cfg.record("model", model.name());
    let input: PathBuf = cfg.require("input")?.into();
    let seq = parse_walk_csv(&std::fs::read_to_string(&input)?)?;
    verify_roundtrip_walk(&seq)?;
    let lo: u32 = cfg.parsed_or("n-min", 1)?;
    let hi: u32 = cfg.parsed_or("n-max", seq.attained())?;
    let fit = fit_decay(&seq.window(lo, hi), model)?;

    let mut payload = fit_json(&fit);
    payload["command"] = json!("walk fit");
    payload["config"] = cfg.json();
    payload["group"] = json!(seq.group);
    emit(common.output.as_deref(), &json_artifact(&payload))
}

pub fn walk_diagnostic(cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let profile_path: PathBuf = cfg.require("profile")?.into();
    let input: PathBuf = cfg.require("input")?.into();
    let curve = parse_profile_csv(&std::fs::read_to_string(&profile_path)?)?;
    let seq = parse_walk_csv(&std::fs::read_to_string(&input)?)?;
    verify_roundtrip_walk(&seq)?;
    let report = profile_decay_diagnostic(&curve, &seq)?;

    let payload = json!({
        "command": "walk diagnostic",
        "config": cfg.json(),
        "group": curve.group,
        "groupMatch": report.group_match,
        "profileClass": report.profile_class.name(),
        "profileExponent": report.profile_exponent,
        "saturation": report.saturation,
        "logProfile": sobolev_json(&report.log_profile),
        "poly": report.poly.as_ref().map(fit_json),
        "stretched": report.stretched.as_ref().map(fit_json),
        "rootEstimate": report.root_estimate.map(|(n, v)| json!({"n": n, "value": v})),
        "decayClass": report.decay_class.name(),
        "consistent": report.consistent,
        "verdict": report.verdict,
    });
    emit(common.output.as_deref(), &json_artifact(&payload))
}

/// One line of summary per artifact, keyed by group.
struct Bundle {
    groups: BTreeMap<String, Vec<String>>,
    unreadable: Vec<String>,
}

fn summarize_csv(name: &str, text: &str, bundle: &mut Bundle) {
    let art = match parse_csv_artifact(text) {
        Ok(a) => a,
        Err(e) => {
            bundle.unreadable.push(format!("{name}: {e}"));
            return;
        }
    };
    let group = art
        .config
        .get("group")
        .or_else(|| art.config.get("amb"))
        .cloned()
        .unwrap_or_else(|| "unknown".to_string());
    let line = match art.command.as_str() {
        "growth" => match parse_growth_csv(text) {
            Ok((_, rows)) => match rows.last() {
                Some(&(r, v)) => format!("growth ({name}): V(0..{r}), V({r}) = {v}"),
                None => format!("growth ({name}): empty"),
            },
            Err(e) => {
                bundle.unreadable.push(format!("{name}: {e}"));
                return;
            }
        },
        "profile" => match parse_profile_csv(text) {
            Ok(curve) => {
                let last = curve.points.last();
                format!(
                    "profile ({name}): p={} {} points{}",
                    curve.p.name(),
                    curve.points.len(),
                    last.map_or(String::new(), |pt| format!(
                        ", last value {:.6} ({})",
                        pt.value,
                        pt.bound.name()
                    ))
                )
            }
            Err(e) => {
                bundle.unreadable.push(format!("{name}: {e}"));
                return;
            }
        },
        "walk" => match parse_walk_csv(text) {
            Ok(seq) => {
                let n = seq.attained();
                format!(
                    "walk ({name}): exact p_2n to n = {n}{}",
                    seq.value_at(n)
                        .map_or(String::new(), |v| format!(", p_{}(e) = {v}", 2 * n))
                )
            }
            Err(e) => {
                bundle.unreadable.push(format!("{name}: {e}"));
                return;
            }
        },
        "transfer compression" => {
            let rows = art.rows.len().saturating_sub(1);
            format!(
                "compression ({name}): sub={} {} points, lipschitz={}",
                art.config.get("sub").map_or("?", |s| s.as_str()),
                rows,
                art.config
                    .get("result-lipschitz")
                    .map_or("?", |s| s.as_str())
            )
        }
        other => format!("{other} ({name})"),
    };
    bundle.groups.entry(group).or_default().push(line);
}

fn summarize_json(name: &str, text: &str, bundle: &mut Bundle) {
    let v: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            bundle.unreadable.push(format!("{name}: {e}"));
            return;
        }
    };
    let command = v["command"].as_str().unwrap_or("").to_string();
    if command.is_empty() {
        bundle
            .unreadable
            .push(format!("{name}: missing command tag"));
        return;
    }
    let cfg = &v["config"];
    let group = cfg["group"]
        .as_str()
        .or_else(|| cfg["from"].as_str())
        .or_else(|| v["group"].as_str())
        .unwrap_or("unknown")
        .to_string();
    let line = match command.as_str() {
        "folner" => format!(
            "folner ({name}): n={} measuredC={} neighborhoodOk={} diameterOk={}",
            v["n"], v["measuredC"], v["neighborhoodOk"], v["diameterOk"]
        ),
        "transfer psi" => format!(
            "psi ({name}): p={} trials={} allOk={}",
            cfg["p"].as_str().unwrap_or("?"),
            v["trials"],
            v["allOk"]
        ),
        "walk fit" => format!(
            "decay fit ({name}): model={} param={:.4}",
            v["model"].as_str().unwrap_or("?"),
            v["param"].as_f64().unwrap_or(f64::NAN)
        ),
        "walk diagnostic" => format!(
            "diagnostic ({name}): {}",
            v["verdict"].as_str().unwrap_or("?")
        ),
        "profile" => format!("profile json ({name})"),
        "walk" => format!("walk json ({name})"),
        other => format!("{other} ({name})"),
    };
    bundle.groups.entry(group).or_default().push(line);
}

pub fn report(mut cfg: ExperimentConfig, common: &Common) -> Result<()> {
    let dir: PathBuf = cfg.require("dir")?.into();
    let out = cfg.parsed_or("out", "md".to_string())?;
    let mut bundle = Bundle {
        groups: BTreeMap::new(),
        unreadable: Vec::new(),
    };
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    names.sort();
    for path in names {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext != "csv" && ext != "json" {
            continue;
        }
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                bundle.unreadable.push(format!("{name}: {e}"));
                continue;
            }
        };
        match ext {
            "csv" => summarize_csv(&name, &text, &mut bundle),
            _ => summarize_json(&name, &text, &mut bundle),
        }
    }

    let categories = ["growth", "profile", "folner", "walk"];
    match out.as_str() {
        "md" => {
            let mut body = String::from("# isoprof report\n\n");
            for (k, v) in cfg.entries() {
                body.push_str(&format!("- config {k}={v}\n"));
            }
            body.push('\n');
            for (group, lines) in &bundle.groups {
                body.push_str(&format!("## {group}\n\n"));
                for line in lines {
                    body.push_str(&format!("- {line}\n"));
                }
                let missing: Vec<&str> = categories
                    .iter()
                    .copied()
                    .filter(|c| !lines.iter().any(|l| l.starts_with(c)))
                    .collect();
                if !missing.is_empty() {
                    body.push_str(&format!("- missing: {}\n", missing.join(", ")));
                }
                body.push('\n');
            }
            if !bundle.unreadable.is_empty() {
                body.push_str("## unreadable artifacts\n\n");
                for line in &bundle.unreadable {
                    body.push_str(&format!("- {line}\n"));
                }
            }
            emit(common.output.as_deref(), &body)
        }
        "json" => {
            let groups: serde_json::Map<String, serde_json::Value> = bundle
                .groups
                .iter()
                .map(|(g, lines)| {
                    let missing: Vec<&str> = categories
                        .iter()
                        .copied()
                        .filter(|c| !lines.iter().any(|l| l.starts_with(c)))
                        .collect();
                    (
                        g.clone(),
                        json!({ "artifacts": lines, "missing": missing }),
                    )
                })
                .collect();
            let payload = json!({
                "command": "report",
                "config": cfg.json(),
                "groups": groups,
                "unreadable": bundle.unreadable,
            });
            emit(common.output.as_deref(), &json_artifact(&payload))
        }
        other => Err(Error::usage(format!("unknown report format `{other}`"))),
    }
}

/// Ensure a parsed sequence still satisfies what produced it.
fn verify_roundtrip_walk(seq: &DecaySequence) -> Result<()> {
    if !seq.is_nonincreasing() || !seq.is_log_convex() {
        return Err(Error::numerical(
            "re-parsed walk artifact violates monotonicity or log-convexity",
        ));
    }
    Ok(())
}

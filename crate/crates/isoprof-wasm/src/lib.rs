//! Thin wasm-bindgen exports over the isoprof library for the static demo
//! page in `www/`. Each export returns a JSON string the page plots on a
//! canvas; inputs are capped so a browser tab stays responsive.

use num_traits::ToPrimitive;
use serde_json::json;
use wasm_bindgen::prelude::*;

use isoprof::ball::build_ball_truncating;
use isoprof::func::P;
use isoprof::profile::{profile_in_balls, Method};
use isoprof::randomwalk::{return_probabilities_budgeted, standard_measure};
use isoprof::GroupSpec;

const BALL_BUDGET_BYTES: u64 = 128 << 20;
const WALK_SUPPORT_BUDGET: usize = 200_000;

fn growth_json(spec_str: &str, rmax: u32) -> Result<String, String> {
    if rmax > 14 {
        return Err("radius capped at 14 for the demo".to_string());
    }
    let spec = GroupSpec::parse(spec_str).map_err(|e| e.to_string())?;
    let (index, truncated) =
        build_ball_truncating(&spec, rmax, BALL_BUDGET_BYTES).map_err(|e| e.to_string())?;
    Ok(json!({
        "group": spec.to_string(),
        "radius": index.radius(),
        "truncated": truncated,
        "volumes": index.growth(),
    })
    .to_string())
}

fn spectral_json(spec_str: &str, rmax: u32) -> Result<String, String> {
    if rmax > 8 {
        return Err("radius capped at 8 for the demo".to_string());
    }
    let spec = GroupSpec::parse(spec_str).map_err(|e| e.to_string())?;
    let curve =
        profile_in_balls(&spec, P::Two, rmax, Method::Spectral).map_err(|e| e.to_string())?;
    let points: Vec<_> = curve
        .points
        .iter()
        .map(|pt| json!({ "r": pt.arg, "value": pt.value }))
        .collect();
    Ok(json!({
        "group": curve.group,
        "p": 2,
        "points": points,
    })
    .to_string())
}

fn decay_json(spec_str: &str, theta_str: &str, nmax: u32) -> Result<String, String> {
    if nmax > 100 {
        return Err("step count capped at 100 for the demo".to_string());
    }
    let spec = GroupSpec::parse(spec_str).map_err(|e| e.to_string())?;
    let theta = theta_str
        .trim()
        .parse()
        .map_err(|_| format!("bad laziness `{theta_str}`; use a rational like 1/2"))?;
    let measure = standard_measure(&spec, theta).map_err(|e| e.to_string())?;
    let seq = return_probabilities_budgeted(&measure, nmax, WALK_SUPPORT_BUDGET)
        .map_err(|e| e.to_string())?;
    let points: Vec<_> = seq
        .points
        .iter()
        .map(|pt| {
            json!({
                "n": pt.n,
                "value": pt.value.to_f64().unwrap_or(0.0),
                "num": pt.value.numer().to_string(),
                "den": pt.value.denom().to_string(),
            })
        })
        .collect();
    Ok(json!({
        "group": seq.group,
        "measure": measure.label(),
        "truncated": seq.truncated,
        "points": points,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn growth_series(spec: &str, rmax: u32) -> Result<String, JsValue> {
    growth_json(spec, rmax).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectral_profile(spec: &str, rmax: u32) -> Result<String, JsValue> {
    spectral_json(spec, rmax).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn walk_decay(spec: &str, theta: &str, nmax: u32) -> Result<String, JsValue> {
    decay_json(spec, theta, nmax).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_payload_counts_spheres() {
        let text = growth_json("zd:d=2", 4).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["group"], "zd:d=2");
        assert_eq!(v["volumes"][4], 41);
        assert_eq!(v["truncated"], false);
    }

    #[test]
    fn spectral_payload_has_one_point_per_radius() {
        let text = spectral_json("zd:d=1", 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 4);
        let j1 = v["points"][1]["value"].as_f64().unwrap();
        assert!((j1 - 1.8477590650225735).abs() < 1e-12);
    }

    #[test]
    fn decay_payload_is_exact_and_approximate() {
        let text = decay_json("zd:d=1", "0", 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["points"][2]["num"], "3");
        assert_eq!(v["points"][2]["den"], "8");
        assert!((v["points"][2]["value"].as_f64().unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn demo_caps_are_enforced() {
        assert!(growth_json("zd:d=1", 15).is_err());
        assert!(spectral_json("zd:d=1", 9).is_err());
        assert!(decay_json("zd:d=1", "1/2", 101).is_err());
        assert!(decay_json("zd:d=1", "half", 10).is_err());
    }
}

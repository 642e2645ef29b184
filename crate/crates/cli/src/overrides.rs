use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sphereflow::flow::{FlowConfig, InitialShape};

use crate::FlowArgs;

#[derive(Deserialize)]
struct Samples {
    theta: Vec<f64>,
    rho: Vec<f64>,
}

/// Parses `sphere:r`, `perturbed:r0,eps,mode` or `custom:path`.
///
/// A custom file is any JSON object with `theta` and `rho` arrays, such as a
/// checkpoint.
pub fn parse_shape(spec: &str) -> Result<InitialShape> {
    let (kind, rest) = spec
        .split_once(':')
        .with_context(|| format!("shape `{spec}` lacks a `kind:` prefix"))?;
    let numbers = |count: usize| -> Result<Vec<f64>> {
        let vals = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("bad numbers in shape `{spec}`"))?;
        if vals.len() != count {
            bail!("shape `{spec}` needs {count} values");
        }
        Ok(vals)
    };
    Ok(match kind {
        "sphere" => InitialShape::GeodesicSphere { r: numbers(1)?[0] },
        "perturbed" => {
            let v = numbers(3)?;
            if v[2] < 0.0 || v[2].fract() != 0.0 {
                bail!("perturbation mode {} is not a non-negative integer", v[2]);
            }
            InitialShape::Perturbed {
                r0: v[0],
                eps: v[1],
                mode: v[2] as u32,
            }
        }
        "custom" => {
            let text = std::fs::read_to_string(Path::new(rest)).with_context(|| format!("reading {rest}"))?;
            let s: Samples = serde_json::from_str(&text).with_context(|| format!("parsing {rest}"))?;
            InitialShape::Custom {
                theta: s.theta,
                rho: s.rho,
            }
        }
        other => bail!("unknown shape kind `{other}`"),
    })
}

/// Applies the flags on top of `base`.
pub fn apply(args: &FlowArgs, mut cfg: FlowConfig) -> Result<FlowConfig> {
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(nodes) = args.nodes {
        cfg.nodes = nodes;
    }
    if let Some(shape) = &args.shape {
        cfg.initial_shape = parse_shape(shape)?;
    }
    if let Some(v) = args.dt_max {
        cfg.dt_policy.dt_max = v;
    }
    if let Some(v) = args.cfl {
        cfg.dt_policy.cfl_factor = v;
    }
    if let Some(v) = args.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = args.conv_tol {
        cfg.convergence_tol = v;
    }
    if let Some(v) = args.checkpoint_every {
        cfg.checkpoint_every = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The configurations selected by `args`: the sweep entries or a single one.
pub fn configs(args: &FlowArgs) -> Result<Vec<FlowConfig>> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FlowConfig::standard(),
    };
    match &args.sweep {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let list: Vec<FlowConfig> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if list.is_empty() {
                bail!("sweep file {} is empty", path.display());
            }
            list.into_iter().map(|c| apply(args, c)).collect()
        }
        None => Ok(vec![apply(args, base)?]),
    }
}

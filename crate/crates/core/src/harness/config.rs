//! Experiment files.
//!
//! One INI section per experiment, named after it. Keys outside any
//! section are defaults for every experiment. Recognized keys are those of
//! [`ExperimentSpec::set`]; `tree` and `algo` are required. A section may
//! add `sweep = <key>` and `values = v1; v2; ...` to run one row per value.
//!
//! ```ini
//! trials = 2000
//! seed = 7
//!
//! [walk-depth]
//! tree = ary:delta=4,d=6
//! algo = a_walk
//! q = 0.1
//! sweep = tree.d
//! values = 4; 5; 6
//! ```

use std::path::Path;

use ini::Ini;

use super::{run, sweep, ExperimentSpec, HarnessError, ResultRow};
use crate::algo::Algorithm;
use crate::harness::TreeSpec;

/// One experiment, possibly swept over one key.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub spec: ExperimentSpec,
    pub sweep: Option<(String, Vec<String>)>,
}

impl ExperimentPlan {
    pub fn run(&self) -> Result<Vec<ResultRow>, HarnessError> {
        match &self.sweep {
            Some((axis, values)) => sweep(axis, values, &self.spec),
            None => Ok(vec![run(&self.spec)?]),
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Vec<ExperimentPlan>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Vec<ExperimentPlan>, HarnessError> {
    let ini = Ini::load_from_str(text).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let defaults: Vec<(String, String)> = ini
        .section(None::<String>)
        .map(|p| p.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
        .unwrap_or_default();
    let mut plans = Vec::new();
    for (name, props) in ini.iter() {
        let Some(name) = name else { continue };
        let bad = |msg: String| HarnessError::Invalid(format!("[{name}] {msg}"));
        let mut keys: Vec<(String, String)> = defaults.clone();
        keys.extend(props.iter().map(|(k, v)| (k.to_string(), v.to_string())));
        let get = |k: &str| keys.iter().rev().find(|(kk, _)| kk == k).map(|(_, v)| v.clone());
        let tree: TreeSpec = get("tree")
            .ok_or_else(|| bad("missing 'tree'".into()))?
            .parse()
            .map_err(bad)?;
        let algo: Algorithm = get("algo")
            .ok_or_else(|| bad("missing 'algo'".into()))?
            .parse()
            .map_err(bad)?;
        let mut spec = ExperimentSpec::new(tree, algo).name(name);
        for (k, v) in &keys {
            if !matches!(k.as_str(), "tree" | "algo" | "sweep" | "values" | "name") {
                spec.set(k, v).map_err(bad)?;
            }
        }
        spec.validate().map_err(bad)?;
        let sweep = match (get("sweep"), get("values")) {
            (Some(axis), Some(values)) => Some((
                axis,
                values.split(';').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect(),
            )),
            (None, None) => None,
            _ => return Err(bad("'sweep' and 'values' go together".into())),
        };
        plans.push(ExperimentPlan { spec, sweep });
    }
    Ok(plans)
}

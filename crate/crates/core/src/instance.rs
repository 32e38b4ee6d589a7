//! Instance files: a metric space, a group and the generator images of an
//! action, stored as JSON.
//!
//! ```json
//! { "points": ["0", "1"], "metric": [["0", "1/2"], ["1/2", "0"]],
//!   "group": {"kind": "cyclic", "n": 2}, "action": {"s": [1, 0]} }
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::forge::PeriodicCoreConfig;
use crate::group::GroupModel;
use crate::metric::FiniteMetricSpace;
use crate::rational::Rational;
use crate::report::fingerprint;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    points: Vec<String>,
    metric: Vec<Vec<Value>>,
    group: GroupModel,
    action: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub action: Action,
    pub provenance: Option<Value>,
}

fn parse_entry(v: &Value, i: usize, j: usize) -> Result<Rational> {
    let parsed = match v {
        Value::String(s) => s.parse().ok(),
        Value::Number(n) => n.as_i64().map(Rational::from_integer),
        _ => None,
    };
    parsed.ok_or_else(|| Error::Schema(format!("metric[{i}][{j}]: expected a \"p/q\" string, found {v}")))
}

impl Instance {
    pub fn new(action: Action) -> Self {
        Instance {
            action,
            provenance: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let n = file.metric.len();
        if file.points.len() != n {
            return Err(Error::Schema(format!(
                "{} point labels but the metric has {n} rows",
                file.points.len()
            )));
        }
        let rows = file
            .metric
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, v)| parse_entry(v, i, j)).collect())
            .collect::<Result<Vec<Vec<Rational>>>>()?;
        let mut space = FiniteMetricSpace::new(rows)?;
        let default_labels = file.points.iter().enumerate().all(|(i, l)| *l == i.to_string());
        if !default_labels {
            space = space.with_labels(file.points)?;
        }
        file.group.validate()?;
        let names = file.group.generator_names();
        let mut action = file.action;
        let mut maps = Vec::with_capacity(names.len());
        for name in &names {
            maps.push(
                action
                    .remove(name)
                    .ok_or_else(|| Error::Schema(format!("action: missing images for generator {name:?}")))?,
            );
        }
        if let Some(extra) = action.keys().next() {
            return Err(Error::Schema(format!(
                "action: unknown generator {extra:?} (expected {})",
                names.join(", ")
            )));
        }
        let action = Action::new(Arc::new(space), file.group, maps)?;
        Ok(Instance {
            action,
            provenance: file.provenance,
        })
    }

    fn to_file(&self) -> InstanceFile {
        let space = self.action.space();
        let group = self.action.group();
        InstanceFile {
            points: space.points().map(|x| space.label(x)).collect(),
            metric: space
                .matrix()
                .iter()
                .map(|row| row.iter().map(|d| Value::String(d.to_string())).collect())
                .collect(),
            group,
            action: group
                .generator_names()
                .into_iter()
                .zip(self.action.gen_images())
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    /// `sha256` of the compact canonical serialization.
    pub fn fingerprint(&self) -> String {
        fingerprint(
            serde_json::to_string(&self.to_file())
                .expect("instance serializes")
                .as_bytes(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn named(name: &str) -> Result<Self> {
        let action = crate::forge::build_named(name)?;
        Ok(Instance {
            action,
            provenance: Some(serde_json::json!({ "builder": name })),
        })
    }

    pub fn periodic_core(config: &PeriodicCoreConfig) -> Result<Self> {
        let action = crate::forge::build_periodic_core_example(config)?;
        Ok(Instance {
            action,
            provenance: Some(serde_json::json!({
                "builder": "periodic_core",
                "t": config.t,
                "k_max": config.k_max,
                "core": config.core,
            })),
        })
    }

    /// Rebuilds a periodic-core instance from its provenance block, if it has one.
    pub fn periodic_core_config(&self) -> Option<PeriodicCoreConfig> {
        let p = self.provenance.as_ref()?;
        if p.get("builder")?.as_str()? != "periodic_core" {
            return None;
        }
        let t = p.get("t")?.as_u64()? as usize;
        let k = p.get("k_max")?.as_u64()? as usize;
        let core: Vec<Vec<Rational>> = serde_json::from_value(p.get("core")?.clone()).ok()?;
        Some(PeriodicCoreConfig::with_core(t, k, core))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Axiom;

    #[test]
    fn round_trip() {
        for name in ["L3", "C6"] {
            let inst = Instance::named(name).unwrap();
            let back = Instance::from_json(&inst.to_json()).unwrap();
            assert_eq!(back, inst);
            assert_eq!(back.fingerprint(), inst.fingerprint());
        }
        let cfg = PeriodicCoreConfig::new(2, 3);
        let inst = Instance::periodic_core(&cfg).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.periodic_core_config(), Some(cfg));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l3.json");
        let inst = Instance::named("L3").unwrap();
        inst.save(&path).unwrap();
        assert_eq!(Instance::load(&path).unwrap(), inst);
    }

    const L3: &str = r#"{"points":["0","1","2"],"metric":[["0","1","2"],["1","0","1"],["2","1","0"]],
        "group":{"kind":"cyclic","n":2},"action":{"s":[0,1,2]}}"#;

    #[test]
    fn minimal_file_loads() {
        let inst = Instance::from_json(L3).unwrap();
        assert_eq!(inst.action.len(), 3);
        assert_eq!(inst.action.space().labels(), None);
    }

    #[test]
    fn distinct_errors() {
        let asym = L3.replace(r#"[["0","1","2"]"#, r#"[["0","3/2","2"]"#);
        match Instance::from_json(&asym) {
            Err(Error::Metric(v)) => assert!(v.iter().any(|m| m.axiom == Axiom::Symmetry && m.indices == [0, 1])),
            other => panic!("{other:?}"),
        }
        let rel = L3.replace("[0,1,2]}", "[1,2,0]}");
        assert!(matches!(Instance::from_json(&rel), Err(Error::Relation(_))));
        let bad_rat = L3
            .replace(r#""1/2""#, "")
            .replace(r#"["2","1","0"]"#, r#"["2","1","x"]"#);
        match Instance::from_json(&bad_rat) {
            Err(Error::Schema(m)) => assert!(m.contains("metric[2][2]"), "{m}"),
            other => panic!("{other:?}"),
        }
        let wrong_gen = L3.replace(r#""s":"#, r#""a":"#);
        assert!(matches!(Instance::from_json(&wrong_gen), Err(Error::Schema(_))));
        let extra = L3.replace(r#""points""#, r#""extra":1,"points""#);
        assert!(matches!(Instance::from_json(&extra), Err(Error::Schema(_))));
        let short = L3.replace("[0,1,2]}", "[0,1]}");
        assert!(matches!(Instance::from_json(&short), Err(Error::NotBijective { .. })));
        let ragged = L3.replace(r#"["1","0","1"]"#, r#"["1","0"]"#);
        assert!(matches!(
            Instance::from_json(&ragged),
            Err(Error::NonSquare { row: 1, .. })
        ));
    }
}

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use sectorsum::config::{read_json, ExperimentConfig, FamilyConfig, LpnormConfig, MaxregConfig, OpsumConfig};
use sectorsum::suites::{family_from_config, problem_from_config, Problems};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema() -> Value {
    serde_json::from_str(&std::fs::read_to_string(root().join("docs/config-schema.json")).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

/// Every serialized field appears in the schema and nothing else does.
fn same_fields<T: Serialize>(value: &T, schema_obj: &Value, what: &str) {
    assert_eq!(keys(&serde_json::to_value(value).unwrap()), keys(&schema_obj["properties"]), "{what}");
    assert_eq!(schema_obj["additionalProperties"], Value::Bool(false), "{what}");
}

#[test]
fn example_configs_parse_and_build() {
    let dir = root().join("configs");
    let exp: ExperimentConfig = read_json(&dir.join("experiment.json")).unwrap();
    let problems = Problems::load(&exp.problems, &dir).unwrap();
    assert!(problems.opsum.is_some() && problems.lpnorm.is_some());
    let fam: FamilyConfig = read_json(&dir.join("family.json")).unwrap();
    family_from_config(&fam).unwrap();
    let mr: MaxregConfig = read_json(&dir.join("maxreg.json")).unwrap();
    problem_from_config(&mr).unwrap();
}

#[test]
fn schema_matches_config_types() {
    let s = schema();
    let d = &s["$defs"];
    let dir = root().join("configs");
    let exp: ExperimentConfig = read_json(&dir.join("experiment.json")).unwrap();
    same_fields(&exp, &s, "ExperimentConfig");
    same_fields(&exp.problems, &s["properties"]["problems"], "ProblemRefs");

    let op: OpsumConfig = read_json(&dir.join("opsum.json")).unwrap();
    same_fields(&op, &d["OpsumConfig"], "OpsumConfig");
    same_fields(&op.problems[0], &d["OpsumConfig"]["properties"]["problems"]["items"], "OpsumCase");

    let lp: LpnormConfig = read_json(&dir.join("lpnorm.json")).unwrap();
    same_fields(&lp, &d["LpnormConfig"], "LpnormConfig");
    same_fields(&lp.cases[0], &d["LpnormConfig"]["properties"]["cases"]["items"], "LpnormCase");

    same_fields(&read_json::<FamilyConfig>(&dir.join("family.json")).unwrap(), &d["FamilyConfig"], "FamilyConfig");
    same_fields(&read_json::<MaxregConfig>(&dir.join("maxreg.json")).unwrap(), &d["MaxregConfig"], "MaxregConfig");
}

#[test]
fn schema_defaults_match_serde_defaults() {
    let s = schema();
    let d = &s["$defs"];
    let mr: MaxregConfig = serde_json::from_str(r#"{"n": 4, "m": 8}"#).unwrap();
    let v = serde_json::to_value(&mr).unwrap();
    for (k, p) in d["MaxregConfig"]["properties"].as_object().unwrap() {
        if let Some(def) = p.get("default") {
            assert_eq!(v[k].as_f64(), def.as_f64(), "{k}");
            if def.is_string() {
                assert_eq!(&v[k], def, "{k}");
            }
        }
    }
    let fam: FamilyConfig = serde_json::from_str(r#"{"label": "x", "members": []}"#).unwrap();
    let v = serde_json::to_value(&fam).unwrap();
    for (k, p) in d["FamilyConfig"]["properties"].as_object().unwrap() {
        if let Some(def) = p.get("default") {
            assert_eq!(v[k].as_f64(), def.as_f64(), "{k}");
        }
    }
}

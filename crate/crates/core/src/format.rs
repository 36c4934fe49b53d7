//! JSON file format for categories and diagrams.
//!
//! ```json
//! {
//!   "category": {"objects": ["top", "left", "right"],
//!                "morphisms": [["top", "left"], ["top", "right"]]},
//!   "initial_atoms": ["a0", "a1"],
//!   "distribution": {"a0": "0.25", "a1": "0.75"},
//!   "maps": {"left": {"a0": "x", "a1": "y"}, "right": {"a0": "u", "a1": "u"}}
//! }
//! ```
//!
//! `morphisms` may be any generating set. Weights are written as decimal
//! strings rounded to 12 significant digits and may be read as strings or
//! numbers. Initial atoms missing from `distribution` get weight zero. An
//! optional `"sets": {object: [labels]}` declares a target set explicitly, in
//! which case the map must be onto it.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::category::IndexingCategory;
use crate::diagram::ProbDiagram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryJson {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramJson {
    pub category: CategoryJson,
    pub initial_atoms: Vec<String>,
    pub distribution: Map<String, Value>,
    #[serde(default)]
    pub maps: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Map<String, Value>>,
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn format_weight(w: f64) -> String {
    let rounded: f64 = format!("{w:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn parse_weight(atom: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .ok_or_else(|| Error::Parse(format!("weight of `{atom}` is not a number: {v}")))
}

impl CategoryJson {
    pub fn from_category(g: &IndexingCategory) -> Self {
        CategoryJson {
            objects: g.objects().to_vec(),
            morphisms: g
                .generating_morphisms()
                .into_iter()
                .map(|(i, j)| (g.label(i).to_string(), g.label(j).to_string()))
                .collect(),
        }
    }

    pub fn to_category(&self) -> Result<IndexingCategory> {
        IndexingCategory::from_generators(&self.objects, &self.morphisms)
    }
}

impl DiagramJson {
    pub fn from_diagram(d: &ProbDiagram) -> Self {
        let g = d.shape();
        let atoms = d.initial_atoms();
        let distribution =
            atoms.iter().zip(d.pi0()).map(|(a, &w)| (a.clone(), Value::String(format_weight(w)))).collect();
        let maps = (0..g.len())
            .filter(|&i| i != g.initial())
            .map(|i| {
                let m: Map<String, Value> =
                    atoms.iter().zip(d.map(i)).map(|(a, &t)| (a.clone(), Value::String(d.set(i)[t].clone()))).collect();
                (g.label(i).to_string(), Value::Object(m))
            })
            .collect();
        DiagramJson {
            category: CategoryJson::from_category(g),
            initial_atoms: atoms.to_vec(),
            distribution,
            maps,
            sets: None,
        }
    }

    pub fn to_diagram(&self) -> Result<ProbDiagram> {
        let shape = Arc::new(self.category.to_category()?);
        for key in self.distribution.keys() {
            if !self.initial_atoms.contains(key) {
                return Err(Error::UnknownAtom(key.clone()));
            }
        }
        let pi0 = self
            .initial_atoms
            .iter()
            .map(|a| match self.distribution.get(a) {
                Some(v) => parse_weight(a, v),
                None => Ok(0.0),
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut maps = Vec::new();
        for (object, value) in &self.maps {
            let table =
                value.as_object().ok_or_else(|| Error::Parse(format!("map for `{object}` is not an object")))?;
            for key in table.keys() {
                if !self.initial_atoms.contains(key) {
                    return Err(Error::UnknownAtom(key.clone()));
                }
            }
            let images = self
                .initial_atoms
                .iter()
                .map(|a| {
                    table
                        .get(a)
                        .and_then(Value::as_str)
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse(format!("map for `{object}` has no string image for `{a}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            maps.push((object.clone(), images));
        }
        let mut declared = Vec::new();
        if let Some(sets) = &self.sets {
            for (object, value) in sets {
                let labels = serde_json::from_value::<Vec<String>>(value.clone())
                    .map_err(|e| Error::Parse(format!("set for `{object}`: {e}")))?;
                declared.push((object.clone(), labels));
            }
        }
        ProbDiagram::from_labelled_maps(shape, self.initial_atoms.clone(), pi0, &maps, &declared)
    }
}

pub fn diagram_to_value(d: &ProbDiagram) -> Value {
    serde_json::to_value(DiagramJson::from_diagram(d)).expect("diagram serializes")
}

pub fn diagram_to_string(d: &ProbDiagram) -> String {
    serde_json::to_string_pretty(&DiagramJson::from_diagram(d)).expect("diagram serializes")
}

pub fn parse_diagram(text: &str) -> Result<ProbDiagram> {
    let json: DiagramJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    json.to_diagram()
}

pub fn read_diagram(path: impl AsRef<Path>) -> Result<ProbDiagram> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_diagram(&text)
}

pub fn write_diagram(path: impl AsRef<Path>, d: &ProbDiagram) -> std::io::Result<()> {
    std::fs::write(path, diagram_to_string(d) + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::is_isomorphic;
    use crate::prob::ProbSpace;

    const TWO_FAN: &str = r#"{
      "category": {"objects": ["top", "left", "right"],
                   "morphisms": [["top", "left"], ["top", "right"]]},
      "initial_atoms": ["(a,0)", "(a,1)", "(b,1)"],
      "distribution": {"(a,0)": "0.25", "(a,1)": 0.25, "(b,1)": "0.5"},
      "maps": {"left": {"(a,0)": "a", "(a,1)": "a", "(b,1)": "b"},
               "right": {"(a,0)": "0", "(a,1)": "1", "(b,1)": "1"}}
    }"#;

    #[test]
    fn parses_two_fan() {
        let d = parse_diagram(TWO_FAN).unwrap();
        assert_eq!(d.shape().len(), 3);
        assert_eq!(d.weights(2), &[0.25, 0.75]);
    }

    #[test]
    fn round_trip_preserves_diagram() {
        let d = parse_diagram(TWO_FAN).unwrap();
        let back = parse_diagram(&diagram_to_string(&d)).unwrap();
        assert_eq!(back, d);
        let third = ProbDiagram::single(&ProbSpace::uniform(3));
        let back = parse_diagram(&diagram_to_string(&third)).unwrap();
        assert!(is_isomorphic(&back, &third));
    }

    #[test]
    fn weights_are_twelve_significant_digits() {
        assert_eq!(format_weight(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_weight(0.25), "0.25");
        assert_eq!(format_weight(2.0 / 3.0), "0.666666666667");
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = TWO_FAN.replace("\"0.5\"", "\"0.4\"");
        assert!(matches!(parse_diagram(&bad), Err(Error::BadDistribution(_))));
        let bad = TWO_FAN.replace("\"(b,1)\": \"b\"", "\"(b,1)\": 7");
        assert!(matches!(parse_diagram(&bad), Err(Error::Parse(_))));
        let bad = TWO_FAN.replace("\"morphisms\": [[\"top\", \"left\"], [\"top\", \"right\"]]", "\"morphisms\": []");
        assert!(matches!(parse_diagram(&bad), Err(Error::NoMinimalCommonAncestor(..))));
        assert!(matches!(parse_diagram("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn declared_set_must_be_covered() {
        let with_sets = TWO_FAN.replace("\"maps\"", "\"sets\": {\"left\": [\"a\", \"b\", \"c\"]},\n \"maps\"");
        assert_eq!(parse_diagram(&with_sets).unwrap_err(), Error::NotSurjective("left".into()));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fan.json");
        let d = parse_diagram(TWO_FAN).unwrap();
        write_diagram(&path, &d).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().ends_with("}\n"));
        assert_eq!(read_diagram(&path).unwrap(), d);
        assert!(matches!(read_diagram(dir.path().join("missing.json")), Err(Error::Parse(_))));
    }
}

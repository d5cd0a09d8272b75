//! JSON instance and allocation files.
//!
//! Numbers are written as JSON integers or as `"p/q"` strings. Output is
//! canonical: every rational as a lowest-terms string, keys sorted, two-space
//! indentation and a trailing newline.

use std::fmt;
use std::fs;
use std::path::Path;

use budgeted_efx::{format_rational, parse_rational, Agent, Allocation, Bundle, GoodId, Instance, Rational};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CliError;

/// An exact rational as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
                Err(E::custom(format!("{v} is not exact; write fractions as \"p/q\" strings")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                parse_rational(v).map(Exact).map_err(|e| E::custom(format!("{v:?}: {e}")))
            }
        }

        deserializer.deserialize_any(ExactVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodEntry {
    pub cost: Exact,
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub budget: Exact,
    pub id: usize,
    pub values: Vec<Exact>,
}

/// The instance document. Field order is alphabetical so that serde writes sorted keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub agents: Vec<AgentEntry>,
    pub goods: Vec<GoodEntry>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            agents: instance
                .agents()
                .iter()
                .enumerate()
                .map(|(id, a)| AgentEntry {
                    budget: Exact(a.budget.clone()),
                    id,
                    values: a.values.iter().cloned().map(Exact).collect(),
                })
                .collect(),
            goods: instance
                .costs()
                .iter()
                .enumerate()
                .map(|(id, c)| GoodEntry { cost: Exact(c.clone()), id })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, CliError> {
        for (k, g) in self.goods.iter().enumerate() {
            if g.id != k {
                return Err(invalid(format!("goods[{k}].id"), format!("expected id {k}, found {}", g.id)));
            }
        }
        let mut agents = Vec::with_capacity(self.agents.len());
        for (k, a) in self.agents.iter().enumerate() {
            if a.id != k {
                return Err(invalid(format!("agents[{k}].id"), format!("expected id {k}, found {}", a.id)));
            }
            if a.values.len() != self.goods.len() {
                return Err(invalid(
                    format!("agents[{k}].values"),
                    format!("expected {} values, found {}", self.goods.len(), a.values.len()),
                ));
            }
            agents.push(Agent::new(a.budget.0.clone(), a.values.iter().map(|v| v.0.clone()).collect()));
        }
        let costs = self.goods.iter().map(|g| g.cost.0.clone()).collect();
        Instance::new(costs, agents).map_err(|e| invalid("$".into(), e.to_string()))
    }
}

fn invalid(location: String, message: String) -> CliError {
    CliError::Parse { location, message }
}

/// An allocation document: one good list per agent. `unallocated` is
/// informational on input and always written on output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<GoodId>>,
    #[serde(default)]
    pub unallocated: Vec<GoodId>,
}

impl AllocationFile {
    pub fn from_allocation(allocation: &Allocation) -> Self {
        AllocationFile {
            bundles: allocation.bundles().iter().map(Bundle::to_vec).collect(),
            unallocated: allocation.unallocated().to_vec(),
        }
    }

    pub fn to_allocation(&self, instance: &Instance) -> Result<Allocation, CliError> {
        let bundles = self.bundles.iter().map(|b| b.iter().copied().collect()).collect();
        Allocation::over(instance, bundles).map_err(|e| invalid("bundles".into(), e.to_string()))
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse {
        location: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    from_json::<InstanceFile>(text)?.to_instance()
}

/// Reads either a bare allocation document or any report carrying one under `allocation`.
pub fn parse_allocation(text: &str, instance: &Instance) -> Result<Allocation, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| invalid(format!("line {}", e.line()), e.to_string()))?;
    let doc = match value.get("allocation") {
        Some(inner) if value.get("bundles").is_none() => inner.to_string(),
        _ => text.to_string(),
    };
    from_json::<AllocationFile>(&doc)?.to_allocation(instance)
}

/// Canonical JSON text with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

pub fn serialize_instance(instance: &Instance) -> String {
    to_canonical_json(&InstanceFile::from_instance(instance))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read_text(path)?).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use budgeted_efx::fixtures::halves_and_whole;
    use budgeted_efx::rational::ratio;

    const HALVES: &str = r#"{
  "goods": [{"id": 0, "cost": "1/2"}, {"id": 1, "cost": "1/2"}, {"id": 2, "cost": 1}],
  "agents": [
    {"id": 0, "budget": "1", "values": ["1/2", "1/2", "0"]},
    {"id": 1, "budget": 1, "values": ["11/10", "11/10", "1"]}
  ]
}"#;

    #[test]
    fn parses_the_fixture() {
        assert_eq!(parse_instance(HALVES).unwrap(), halves_and_whole(ratio(1, 10)));
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = serialize_instance(&parse_instance(HALVES).unwrap());
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
        assert!(text.contains("\"cost\": \"1/2\""));
        assert!(text.find("\"agents\"").unwrap() < text.find("\"goods\"").unwrap());
    }

    #[test]
    fn lowest_terms() {
        let doc = HALVES.replace("\"cost\": \"1/2\"}, {\"id\": 1", "\"cost\": \"3/6\"}, {\"id\": 1");
        assert_eq!(parse_instance(&doc).unwrap(), halves_and_whole(ratio(1, 10)));
    }

    #[test]
    fn errors_carry_a_location() {
        let floaty = HALVES.replace("\"budget\": 1,", "\"budget\": 1.5,");
        match parse_instance(&floaty) {
            Err(CliError::Parse { location, .. }) => assert_eq!(location, "agents[1].budget"),
            other => panic!("unexpected {other:?}"),
        }
        let short = HALVES.replace("[\"1/2\", \"1/2\", \"0\"]", "[\"1/2\", \"1/2\"]");
        match parse_instance(&short) {
            Err(CliError::Parse { location, .. }) => assert_eq!(location, "agents[0].values"),
            other => panic!("unexpected {other:?}"),
        }
        let dup = HALVES.replace("{\"id\": 1, \"cost\"", "{\"id\": 0, \"cost\"");
        match parse_instance(&dup) {
            Err(CliError::Parse { location, .. }) => assert_eq!(location, "goods[1].id"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = HALVES.replace("\"11/10\", \"11/10\"", "\"11/0\", \"11/10\"");
        assert!(matches!(parse_instance(&bad), Err(CliError::Parse { .. })));
    }

    #[test]
    fn allocations_from_reports_or_bare_documents() {
        let inst = parse_instance(HALVES).unwrap();
        let bare = parse_allocation(r#"{"bundles": [[0], [1]]}"#, &inst).unwrap();
        let wrapped = parse_allocation(r#"{"algorithm": "x", "allocation": {"bundles": [[0], [1]], "unallocated": [2]}}"#, &inst).unwrap();
        assert_eq!(bare, wrapped);
        assert_eq!(AllocationFile::from_allocation(&bare).unallocated, vec![2]);
        assert!(parse_allocation(r#"{"bundles": [[0], [0]]}"#, &inst).is_err());
    }
}

//! JSON instance files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::delay::{ConcaveFn, DelayModel, SetEntry, SetPhase, SizePhase};
use crate::error::ModelError;
use crate::instance::Instance;
use crate::metric::{MetricKind, MetricSpace, Request, Time};
use crate::set::RequestSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricKind>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_zero_distance: bool,
    pub requests: Vec<RequestFile>,
    pub delay: DelayFile,
    pub horizon: Time,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub id: usize,
    pub point: String,
    pub arrival: Time,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayFile {
    SizeBased { phases: Vec<SizePhase> },
    SetTable { phases: Vec<SetPhaseFile> },
    UniformConcave(ConcaveFn),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetPhaseFile {
    pub from: Time,
    pub entries: Vec<SetEntryFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetEntryFile {
    pub set: Vec<usize>,
    pub cost: Cost,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, ModelError> {
        let metric = match (self.dist_matrix, self.coords) {
            (Some(rows), None) => {
                if self.metric.is_some() {
                    return Err(ModelError::Parse("`metric` only applies with `coords`".into()));
                }
                MetricSpace::from_matrix(self.points, rows, self.allow_zero_distance)?
            }
            (None, Some(coords)) => {
                let kind = self
                    .metric
                    .ok_or_else(|| ModelError::Parse("`coords` requires a `metric`".into()))?;
                MetricSpace::from_coords(self.points, &coords, kind, self.allow_zero_distance)?
            }
            _ => {
                return Err(ModelError::Parse(
                    "exactly one of `dist_matrix` or `coords` is required".into(),
                ))
            }
        };
        let requests = self
            .requests
            .iter()
            .map(|r| {
                let point = metric
                    .index_of(&r.point)
                    .ok_or_else(|| ModelError::UnknownPoint(r.point.clone()))?;
                Ok(Request { id: r.id, point, arrival: r.arrival })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let m = requests.len();
        let delay = match self.delay {
            DelayFile::SizeBased { phases } => DelayModel::SizeBased(phases),
            DelayFile::UniformConcave(f) => DelayModel::UniformConcave(f),
            DelayFile::SetTable { phases } => DelayModel::SetTable(
                phases
                    .into_iter()
                    .map(|p| {
                        let entries = p
                            .entries
                            .into_iter()
                            .map(|e| {
                                if let Some(&bad) = e.set.iter().find(|&&u| u >= m) {
                                    return Err(ModelError::UnknownRequest(bad));
                                }
                                Ok(SetEntry { set: RequestSet::from_ids(e.set), cost: e.cost })
                            })
                            .collect::<Result<Vec<_>, ModelError>>()?;
                        Ok(SetPhase { from: p.from, entries })
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?,
            ),
        };
        Instance::new(metric, requests, delay, self.horizon)
    }

    /// File form of an instance, always with an explicit distance matrix.
    pub fn from_instance(inst: &Instance) -> Self {
        let metric = inst.metric();
        let n = metric.len();
        let delay = match inst.delay() {
            DelayModel::SizeBased(p) => DelayFile::SizeBased { phases: p.clone() },
            DelayModel::UniformConcave(f) => DelayFile::UniformConcave(f.clone()),
            DelayModel::SetTable(p) => DelayFile::SetTable {
                phases: p
                    .iter()
                    .map(|ph| SetPhaseFile {
                        from: ph.from,
                        entries: ph
                            .entries
                            .iter()
                            .map(|e| SetEntryFile { set: e.set.to_vec(), cost: e.cost })
                            .collect(),
                    })
                    .collect(),
            },
        };
        let zero = (0..n).any(|p| (0..n).any(|q| p != q && metric.distance(p, q) == 0.0));
        InstanceFile {
            points: metric.labels().to_vec(),
            dist_matrix: Some((0..n).map(|p| (0..n).map(|q| metric.distance(p, q)).collect()).collect()),
            coords: None,
            metric: None,
            allow_zero_distance: zero,
            requests: inst
                .requests()
                .iter()
                .map(|r| RequestFile {
                    id: r.id,
                    point: metric.labels()[r.point].clone(),
                    arrival: r.arrival,
                })
                .collect(),
            delay,
            horizon: inst.horizon(),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    file.into_instance()
}

pub fn load_instance(path: &Path) -> Result<Instance, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIZE: &str = r#"{
        "points": ["a", "b"],
        "dist_matrix": [[0, 2], [2, 0]],
        "requests": [{"id": 0, "point": "a", "arrival": 0}, {"id": 1, "point": "b", "arrival": 1}],
        "delay": {"kind": "size_based", "phases": [{"from": 0, "costs": [0, 1, "inf"]}]},
        "horizon": 3
    }"#;

    #[test]
    fn parses_size_based() {
        let i = parse_instance(SIZE).unwrap();
        assert_eq!(i.m(), 2);
        assert_eq!(i.distance(0, 1).unwrap(), 2.0);
        assert_eq!(i.instantaneous_delay(1, RequestSet::prefix(2)), Cost::Infinite);
    }

    #[test]
    fn parses_concave_and_coords() {
        let text = r#"{
            "points": ["a", "b"], "coords": [[0, 0], [3, 4]], "metric": "euclidean",
            "requests": [{"id": 0, "point": "a", "arrival": 0}, {"id": 1, "point": "b", "arrival": 0}],
            "delay": {"kind": "uniform_concave", "family": "power", "c": 1.0, "p": 0.5},
            "horizon": 2
        }"#;
        let i = parse_instance(text).unwrap();
        assert!(matches!(i.delay(), DelayModel::UniformConcave(ConcaveFn::Power { .. })));
        assert!((i.distance(0, 1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parses_set_table() {
        let text = r#"{
            "points": ["a", "b"], "dist_matrix": [[0, 1], [1, 0]],
            "requests": [{"id": 0, "point": "a", "arrival": 0}, {"id": 1, "point": "b", "arrival": 0}],
            "delay": {"kind": "set_table", "phases": [{"from": 0, "entries": [{"set": [0], "cost": "inf"}]}]},
            "horizon": 1
        }"#;
        let i = parse_instance(text).unwrap();
        assert_eq!(i.instantaneous_delay(0, RequestSet::singleton(0)), Cost::Infinite);
        assert_eq!(i.instantaneous_delay(0, RequestSet::singleton(1)), Cost::ZERO);
    }

    #[test]
    fn strict_loader() {
        let extra = SIZE.replacen("\"horizon\"", "\"colour\": 1, \"horizon\"", 1);
        assert!(parse_instance(&extra).is_err());
        let odd = SIZE.replacen(r#", {"id": 1, "point": "b", "arrival": 1}"#, "", 1);
        assert_eq!(parse_instance(&odd).unwrap_err(), ModelError::OddRequestCount(1));
        assert!(parse_instance("{").is_err());
    }

    #[test]
    fn roundtrip() {
        let i = parse_instance(SIZE).unwrap();
        let again = parse_instance(&instance_to_json(&i)).unwrap();
        assert_eq!(i, again);
    }
}

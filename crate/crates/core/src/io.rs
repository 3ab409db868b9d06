//! Game documents, canonical report JSON, CSV tables and DOT export.
//!
//! Game document:
//!
//! ```json
//! {"schema_version": "1", "kind": "degree", "n": 3, "d": [1, 1, 1]}
//! {"kind": "link_bias", "n": 2, "c": [[0, -1], [-2, 0]], "labels": ["a", "b"]}
//! ```
//!
//! `schema_version` may be omitted. Reports are written with sorted keys,
//! two-space indentation, shortest round-trip floats and a top-level
//! `schema_version`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::anarchy::WhatIfResult;
use crate::error::{Error, Result};
use crate::games::{DegreeSequenceGame, Game, LinkBiasGame};
use crate::graph::Graph;
use crate::simulator::{batch_statistics, BatchStatistics, Quantiles, SimulationBatch};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Degree,
    LinkBias,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    #[serde(default = "current_version")]
    pub schema_version: String,
    pub kind: GameKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

fn current_version() -> String {
    SCHEMA_VERSION.to_string()
}

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

impl GameDocument {
    pub fn from_game(game: &Game) -> Self {
        let (kind, d, c) = match game {
            Game::Degree(g) => (GameKind::Degree, Some(g.targets().to_vec()), None),
            Game::LinkBias(g) => (GameKind::LinkBias, None, Some(g.costs().to_vec())),
        };
        GameDocument {
            schema_version: current_version(),
            kind,
            n: game.player_count(),
            d,
            c,
            labels: None,
        }
    }

    /// Checks every document invariant and builds the game.
    pub fn to_game(&self) -> Result<Game> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(doc_err(format!(
                "unsupported schema_version {:?} (expected {SCHEMA_VERSION:?})",
                self.schema_version
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(doc_err(format!(
                    "labels has {} entries, expected n = {}",
                    labels.len(),
                    self.n
                )));
            }
        }
        match (self.kind, &self.d, &self.c) {
            (GameKind::Degree, Some(d), None) => {
                if d.len() != self.n {
                    return Err(doc_err(format!(
                        "d has {} entries, expected n = {}",
                        d.len(),
                        self.n
                    )));
                }
                Ok(Game::Degree(DegreeSequenceGame::new(d.clone())))
            }
            (GameKind::LinkBias, None, Some(c)) => {
                if c.len() != self.n {
                    return Err(doc_err(format!(
                        "c has {} rows, expected n = {}",
                        c.len(),
                        self.n
                    )));
                }
                Ok(Game::LinkBias(LinkBiasGame::new(c.clone())?))
            }
            (GameKind::Degree, _, _) => Err(doc_err("degree document needs \"d\" and no \"c\"")),
            (GameKind::LinkBias, _, _) => {
                Err(doc_err("link_bias document needs \"c\" and no \"d\""))
            }
        }
    }
}

pub fn parse_game_document(text: &str) -> Result<GameDocument> {
    let doc: GameDocument = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    doc.to_game()?;
    Ok(doc)
}

pub fn parse_game(text: &str) -> Result<Game> {
    parse_game_document(text)?.to_game()
}

/// Cost matrix as CSV, one row per line, no header. Whitespace around
/// fields is ignored; diagonal entries must be zero.
pub fn parse_cost_csv(text: &str) -> Result<LinkBiasGame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| doc_err(format!("line {}: {e}", r + 1)))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    doc_err(format!(
                        "row {}, column {}: {field:?} is not a number",
                        r + 1,
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    LinkBiasGame::new(rows)
}

/// Canonical JSON text for any report value. Objects get a
/// `schema_version` key.
pub fn write_report<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| doc_err(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), Value::String(current_version()));
    }
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| doc_err(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Inverse of [`write_report`].
pub fn read_report<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        match map.remove("schema_version") {
            None => {}
            Some(Value::String(s)) if s == SCHEMA_VERSION => {}
            Some(other) => return Err(doc_err(format!("unsupported schema_version {other}"))),
        }
    }
    serde_json::from_value(v).map_err(|e| doc_err(e.to_string()))
}

/// A batch together with its summary tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub batch: SimulationBatch,
    pub statistics: BatchStatistics,
}

impl SimulationReport {
    pub fn new(batch: SimulationBatch) -> Result<Self> {
        let statistics = batch_statistics(&batch)?;
        Ok(SimulationReport { batch, statistics })
    }
}

/// Removal table plus its undominated rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub rows: Vec<WhatIfResult>,
    /// 1-based vertex ids.
    pub pareto: Vec<usize>,
}

impl SummaryReport {
    pub fn new(rows: Vec<WhatIfResult>) -> Self {
        let pareto = crate::anarchy::pareto_targets(&rows)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        SummaryReport { rows, pareto }
    }
}

fn csv_text(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| doc_err(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| doc_err(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| doc_err(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per removed vertex, in the column order of the paper's summary
/// table.
pub fn summary_csv(rows: &[WhatIfResult]) -> Result<String> {
    csv_text(|w| {
        w.write_record([
            "vertex",
            "stable_after",
            "best_after",
            "ratio_after",
            "poa_difference",
            "utility_change",
            "degree",
            "eig_centrality",
        ])?;
        for r in rows {
            w.write_record([
                (r.removed + 1).to_string(),
                r.report_after.worst_stable_value.to_string(),
                r.report_after.best_value.to_string(),
                opt(r.report_after.poa_ratio),
                opt(r.delta_poa_ratio),
                r.communal_utility_change.to_string(),
                r.degree.to_string(),
                r.eig_centrality.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// The three statistics tables stacked in one CSV, distinguished by the
/// `table` column. The histogram puts its count in the `min` column.
pub fn statistics_csv(stats: &BatchStatistics) -> Result<String> {
    csv_text(|w| {
        let mut header = vec!["table", "key"];
        header.extend(Quantiles::LABELS);
        w.write_record(&header)?;
        let mut row = |table: &str, key: String, q: &Quantiles| {
            let mut rec = vec![table.to_string(), key];
            rec.extend(q.values().iter().map(|v| v.to_string()));
            w.write_record(&rec)
        };
        for r in &stats.degree_counts {
            row("degree_count", r.degree.to_string(), &r.count)?;
        }
        for r in &stats.deficit_by_target {
            row("deficit_by_target", r.target.to_string(), &r.deficit)?;
        }
        for (poa, count) in &stats.poa_histogram {
            let c = *count as i64;
            row("poa_histogram", poa.to_string(), &Quantiles::of(&[c]))?;
        }
        Ok(())
    })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Undirected DOT with 1-based node ids, one line per node then one per
/// edge in lexicographic order. Highlighted vertices (0-based) are filled.
pub fn export_dot(g: &Graph, highlight: &[usize], labels: Option<&[String]>) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for i in 0..g.node_count() {
        let mut attrs = Vec::new();
        if let Some(label) = labels.and_then(|l| l.get(i)) {
            attrs.push(format!("label=\"{}\"", dot_escape(label)));
        }
        if highlight.contains(&i) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#e4572e\"".into());
        }
        if attrs.is_empty() {
            out.push_str(&format!("  {};\n", i + 1));
        } else {
            out.push_str(&format!("  {} [{}];\n", i + 1, attrs.join(", ")));
        }
    }
    for (i, j) in g.edges() {
        out.push_str(&format!("  {} -- {};\n", i + 1, j + 1));
    }
    out.push_str("}\n");
    out
}

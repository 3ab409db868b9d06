//! In-memory sessions, result cache and background jobs.
//!
//! A session node is one game in an exploration tree: a loaded game is a
//! root, and each removal creates a child pointing back at its parent.
//! Node ids are deterministic (root: content hash; child: hash of parent id
//! and removed vertex), so replaying the same requests yields the same ids.
//! Results are cached by (content hash, operation), so two nodes holding
//! the same game share work.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use netgame::io::GameDocument;
use netgame::Game;

use crate::error::ApiError;
use crate::ops::Op;

#[derive(Debug)]
pub struct Node {
    pub id: String,
    pub game: Game,
    pub hash: String,
    pub parent: Option<String>,
    /// Vertex removed from the parent, 0-based in the parent's numbering.
    pub removed: Option<usize>,
    /// One label per player; derived games keep the labels of survivors.
    pub labels: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Hash of the game content alone (labels and version excluded).
pub fn content_hash(game: &Game) -> String {
    let mut doc = GameDocument::from_game(game);
    doc.labels = None;
    let text = serde_json::to_string(&doc).expect("game documents serialize");
    sha256_hex(text.as_bytes())
}

type Cell = Arc<OnceLock<Result<Arc<Value>, ApiError>>>;

#[derive(Debug, Clone, PartialEq)]
pub enum JobState {
    Pending,
    Done(Arc<Value>),
    Failed(ApiError),
}

#[derive(Default)]
pub struct SessionStore {
    nodes: Mutex<HashMap<String, Arc<Node>>>,
    cache: Mutex<HashMap<(String, Op), Cell>>,
    jobs: Mutex<Vec<JobState>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removed: Option<usize>,
    pub document: GameDocument,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub nodes: Vec<SnapshotNode>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn insert(&self, node: Node) -> Arc<Node> {
        let mut nodes = self.nodes.lock().unwrap();
        nodes
            .entry(node.id.clone())
            .or_insert_with(|| Arc::new(node))
            .clone()
    }

    pub fn load(&self, game: Game, labels: Option<Vec<String>>) -> Arc<Node> {
        let hash = content_hash(&game);
        let labels =
            labels.unwrap_or_else(|| (1..=game.player_count()).map(|i| i.to_string()).collect());
        self.insert(Node {
            id: format!("g{}", &hash[..16]),
            hash,
            game,
            parent: None,
            removed: None,
            labels,
        })
    }

    /// Child of `parent` with vertex `i` (0-based) removed.
    pub fn derive(&self, parent: &Node, i: usize) -> Result<Arc<Node>, ApiError> {
        let id_hash = sha256_hex(format!("{}/{}", parent.id, i).as_bytes());
        let id = format!("g{}", &id_hash[..16]);
        if let Some(existing) = self.get(&id) {
            return Ok(existing);
        }
        let game = parent.game.without_player(i)?;
        let mut labels = parent.labels.clone();
        labels.remove(i);
        Ok(self.insert(Node {
            id,
            hash: content_hash(&game),
            game,
            parent: Some(parent.id.clone()),
            removed: Some(i),
            labels,
        }))
    }

    pub fn get(&self, id: &str) -> Option<Arc<Node>> {
        self.nodes.lock().unwrap().get(id).cloned()
    }

    pub fn node(&self, id: &str) -> Result<Arc<Node>, ApiError> {
        self.get(id)
            .ok_or_else(|| ApiError::not_found(format!("unknown game id {id:?}")))
    }

    /// Compute-if-absent: concurrent callers for the same key wait on one
    /// computation.
    pub fn cached(
        &self,
        hash: &str,
        op: Op,
        compute: impl FnOnce() -> Result<Value, ApiError>,
    ) -> Result<Arc<Value>, ApiError> {
        let cell = self
            .cache
            .lock()
            .unwrap()
            .entry((hash.to_string(), op))
            .or_default()
            .clone();
        cell.get_or_init(|| compute().map(Arc::new)).clone()
    }

    pub fn new_job(&self) -> usize {
        let mut jobs = self.jobs.lock().unwrap();
        jobs.push(JobState::Pending);
        jobs.len() - 1
    }

    pub fn finish_job(&self, id: usize, result: Result<Arc<Value>, ApiError>) {
        self.jobs.lock().unwrap()[id] = match result {
            Ok(v) => JobState::Done(v),
            Err(e) => JobState::Failed(e),
        };
    }

    pub fn job(&self, id: usize) -> Option<JobState> {
        self.jobs.lock().unwrap().get(id).cloned()
    }

    /// Every node, parents before children.
    pub fn snapshot(&self) -> Snapshot {
        let nodes = self.nodes.lock().unwrap();
        let mut list: Vec<&Arc<Node>> = nodes.values().collect();
        let depth = |n: &Node| {
            let mut d = 0;
            let mut cur = n.parent.clone();
            while let Some(p) = cur {
                d += 1;
                cur = nodes.get(&p).and_then(|n| n.parent.clone());
            }
            d
        };
        list.sort_by(|a, b| depth(a).cmp(&depth(b)).then(a.id.cmp(&b.id)));
        Snapshot {
            nodes: list
                .into_iter()
                .map(|n| {
                    let mut document = GameDocument::from_game(&n.game);
                    document.labels = Some(n.labels.clone());
                    SnapshotNode {
                        id: n.id.clone(),
                        parent: n.parent.clone(),
                        removed: n.removed,
                        document,
                    }
                })
                .collect(),
        }
    }

    pub fn restore(&self, snapshot: Snapshot) -> Result<(), netgame::Error> {
        for s in snapshot.nodes {
            let game = s.document.to_game()?;
            let labels = s
                .document
                .labels
                .unwrap_or_else(|| (1..=game.player_count()).map(|i| i.to_string()).collect());
            self.insert(Node {
                id: s.id,
                hash: content_hash(&game),
                game,
                parent: s.parent,
                removed: s.removed,
                labels,
            });
        }
        Ok(())
    }
}

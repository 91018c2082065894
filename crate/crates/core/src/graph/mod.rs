//! Temporal bipartite backing network.
//!
//! Users (backers and founders share one identifier space) and projects are
//! interned into dense indices. Edges are stored sorted by timestamp, with
//! ties kept in input order, and indexed by backer and by project. Node
//! tables (users, project records, the lifespan index) are shared behind an
//! [`Arc`] so that simulated graphs produced by the null model reuse them.

mod io;
mod lifespan;
mod spans;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{load_graph, load_graph_files, parse_timestamp, write_backings, write_projects};
pub use lifespan::LifespanIndex;
pub use spans::{derive_project_spans, StartSource};
pub use validate::{validate, Finding, FindingClass, ValidationReport};

/// Identifier of a user. Founders are users too.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BackerId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectId(pub String);

macro_rules! string_id {
    ($ty:ident) => {
        impl $ty {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $ty {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(BackerId);
string_id!(ProjectId);

/// Seconds since the Unix epoch, UTC.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense index of a user inside one graph's node tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserIdx(pub u32);

/// Dense index of a project inside one graph's node tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectIdx(pub u32);

impl UserIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProjectIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A timestamped backing edge `backer → project`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Backing {
    pub backer: UserIdx,
    pub project: ProjectIdx,
    pub time: Timestamp,
}

/// A project as completed by [`derive_project_spans`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub id: ProjectId,
    pub founder: BackerId,
    pub start: Timestamp,
    pub deadline: Timestamp,
    /// In-degree in the observed graph (multi-edges counted).
    pub popularity: u64,
    pub start_source: StartSource,
}

impl ProjectRecord {
    /// Inclusive on both ends.
    #[inline]
    pub fn is_live_at(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.deadline
    }
}

/// A project row before span derivation; `start` may be absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectSpec {
    pub id: ProjectId,
    pub founder: BackerId,
    pub deadline: Timestamp,
    pub start: Option<Timestamp>,
}

/// A backing row with external identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BackingRow {
    pub backer: BackerId,
    pub project: ProjectId,
    pub time: Timestamp,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("{source_name}:{line}: duplicate project id `{id}`")]
    DuplicateProject {
        source_name: String,
        line: u64,
        id: String,
    },
    #[error("{source_name}:{line}: backing references unknown project `{id}`")]
    UnknownProject {
        source_name: String,
        line: u64,
        id: String,
    },
    #[error("{source_name}: {source}")]
    Io {
        source_name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("graph too large: {0} exceeds the 32-bit index space")]
    TooLarge(&'static str),
}

/// Compressed adjacency: `items[offsets[k]..offsets[k + 1]]` belong to key `k`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Adjacency {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Adjacency {
    /// Stable counting sort: items keep their iteration order within a key.
    pub(crate) fn build(keys: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> Self {
        let mut offsets = vec![0u32; keys + 1];
        let mut n = 0usize;
        for (k, _) in pairs.clone() {
            offsets[k as usize + 1] += 1;
            n += 1;
        }
        for k in 0..keys {
            offsets[k + 1] += offsets[k];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![0u32; n];
        for (k, v) in pairs {
            let slot = &mut cursor[k as usize];
            items[*slot as usize] = v;
            *slot += 1;
        }
        Adjacency { offsets, items }
    }

    #[inline]
    pub(crate) fn get(&self, key: usize) -> &[u32] {
        &self.items[self.offsets[key] as usize..self.offsets[key + 1] as usize]
    }

    #[inline]
    pub(crate) fn len_of(&self, key: usize) -> usize {
        (self.offsets[key + 1] - self.offsets[key]) as usize
    }
}

/// Everything about a graph that the null model never changes.
#[derive(Debug)]
pub(crate) struct NodeTables {
    users: Vec<BackerId>,
    user_lookup: HashMap<BackerId, UserIdx>,
    projects: Vec<ProjectRecord>,
    project_lookup: HashMap<ProjectId, ProjectIdx>,
    project_founder: Vec<UserIdx>,
    founded: Adjacency,
    lifespans: LifespanIndex,
}

/// Immutable temporal bipartite backing network.
#[derive(Debug, Clone)]
pub struct TemporalBipartiteGraph {
    nodes: Arc<NodeTables>,
    edges: Vec<Backing>,
    by_backer: Adjacency,
    by_project: Adjacency,
    backer_count: usize,
}

impl TemporalBipartiteGraph {
    /// Builds a graph from parsed rows. Line numbers in errors assume the rows
    /// came from CSV files with one header line.
    pub fn from_parts(
        projects: Vec<ProjectSpec>,
        backings: Vec<BackingRow>,
    ) -> Result<Self, GraphError> {
        Self::from_parts_named(projects, backings, "projects", "backings")
    }

    pub(crate) fn from_parts_named(
        projects: Vec<ProjectSpec>,
        backings: Vec<BackingRow>,
        projects_name: &str,
        backings_name: &str,
    ) -> Result<Self, GraphError> {
        if projects.len() > u32::MAX as usize {
            return Err(GraphError::TooLarge("project count"));
        }
        if backings.len() > u32::MAX as usize {
            return Err(GraphError::TooLarge("edge count"));
        }

        let mut project_lookup = HashMap::with_capacity(projects.len());
        for (i, p) in projects.iter().enumerate() {
            if project_lookup
                .insert(p.id.clone(), ProjectIdx(i as u32))
                .is_some()
            {
                return Err(GraphError::DuplicateProject {
                    source_name: projects_name.to_owned(),
                    line: i as u64 + 2,
                    id: p.id.0.clone(),
                });
            }
        }
        let mut targets = Vec::with_capacity(backings.len());
        for (i, b) in backings.iter().enumerate() {
            match project_lookup.get(&b.project) {
                Some(&p) => targets.push(p),
                None => {
                    return Err(GraphError::UnknownProject {
                        source_name: backings_name.to_owned(),
                        line: i as u64 + 2,
                        id: b.project.0.clone(),
                    })
                }
            }
        }

        // Users are interned in sorted id order so indices do not depend on
        // row order.
        let mut users: Vec<BackerId> = projects
            .iter()
            .map(|p| p.founder.clone())
            .chain(backings.iter().map(|b| b.backer.clone()))
            .collect();
        users.sort_unstable();
        users.dedup();
        if users.len() > u32::MAX as usize {
            return Err(GraphError::TooLarge("user count"));
        }
        let user_lookup: HashMap<BackerId, UserIdx> = users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), UserIdx(i as u32)))
            .collect();

        let records = spans::complete_spans(
            &projects,
            targets.iter().zip(&backings).map(|(&p, b)| (p, b.time)),
        );
        let project_founder: Vec<UserIdx> =
            projects.iter().map(|p| user_lookup[&p.founder]).collect();

        let mut edges: Vec<Backing> = backings
            .iter()
            .zip(&targets)
            .map(|(b, &project)| Backing {
                backer: user_lookup[&b.backer],
                project,
                time: b.time,
            })
            .collect();
        // Stable: equal timestamps keep input order.
        edges.sort_by_key(|e| e.time);

        let nodes = NodeTables::new(users, user_lookup, records, project_lookup, project_founder);
        Ok(Self::with_nodes(Arc::new(nodes), edges))
    }

    /// Builds the edge indexes over shared node tables. `edges` must already
    /// be sorted by time.
    pub(crate) fn with_nodes(nodes: Arc<NodeTables>, edges: Vec<Backing>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].time <= w[1].time));
        let by_backer = Adjacency::build(
            nodes.users.len(),
            edges
                .iter()
                .enumerate()
                .map(|(i, e)| (e.backer.0, i as u32)),
        );
        let by_project = Adjacency::build(
            nodes.projects.len(),
            edges
                .iter()
                .enumerate()
                .map(|(i, e)| (e.project.0, i as u32)),
        );
        let backer_count = (0..nodes.users.len())
            .filter(|&u| by_backer.len_of(u) > 0)
            .count();
        TemporalBipartiteGraph {
            nodes,
            edges,
            by_backer,
            by_project,
            backer_count,
        }
    }

    /// Same nodes, new edges (already in time order).
    pub(crate) fn with_edges(&self, edges: Vec<Backing>) -> Self {
        Self::with_nodes(Arc::clone(&self.nodes), edges)
    }

    /// Edges sorted by time; ties in input order.
    pub fn edges(&self) -> &[Backing] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All users, including founders who never back.
    pub fn user_count(&self) -> usize {
        self.nodes.users.len()
    }

    /// Users with at least one backing edge.
    pub fn backer_count(&self) -> usize {
        self.backer_count
    }

    pub fn project_count(&self) -> usize {
        self.nodes.projects.len()
    }

    pub fn users(&self) -> impl ExactSizeIterator<Item = UserIdx> {
        (0..self.nodes.users.len() as u32).map(UserIdx)
    }

    /// Users with at least one backing edge, ascending.
    pub fn backers(&self) -> impl Iterator<Item = UserIdx> + '_ {
        self.users().filter(|u| self.out_degree(*u) > 0)
    }

    pub fn project_indices(&self) -> impl ExactSizeIterator<Item = ProjectIdx> {
        (0..self.nodes.projects.len() as u32).map(ProjectIdx)
    }

    pub fn user_id(&self, u: UserIdx) -> &BackerId {
        &self.nodes.users[u.index()]
    }

    pub fn user_index(&self, id: &BackerId) -> Option<UserIdx> {
        self.nodes.user_lookup.get(id).copied()
    }

    pub fn project(&self, p: ProjectIdx) -> &ProjectRecord {
        &self.nodes.projects[p.index()]
    }

    pub fn projects(&self) -> &[ProjectRecord] {
        &self.nodes.projects
    }

    pub fn project_index(&self, id: &ProjectId) -> Option<ProjectIdx> {
        self.nodes.project_lookup.get(id).copied()
    }

    pub fn founder_of(&self, p: ProjectIdx) -> UserIdx {
        self.nodes.project_founder[p.index()]
    }

    /// Projects founded by `u`, in project order.
    pub fn founded_by(&self, u: UserIdx) -> impl ExactSizeIterator<Item = ProjectIdx> + '_ {
        self.nodes
            .founded
            .get(u.index())
            .iter()
            .map(|&p| ProjectIdx(p))
    }

    pub fn is_founder(&self, u: UserIdx) -> bool {
        self.nodes.founded.len_of(u.index()) > 0
    }

    /// Edges leaving `u`, in time order.
    pub fn edges_of_backer(&self, u: UserIdx) -> impl ExactSizeIterator<Item = &Backing> + '_ {
        self.by_backer
            .get(u.index())
            .iter()
            .map(move |&i| &self.edges[i as usize])
    }

    /// Edges entering `p`, in time order.
    pub fn edges_of_project(&self, p: ProjectIdx) -> impl ExactSizeIterator<Item = &Backing> + '_ {
        self.by_project
            .get(p.index())
            .iter()
            .map(move |&i| &self.edges[i as usize])
    }

    pub fn out_degree(&self, u: UserIdx) -> usize {
        self.by_backer.len_of(u.index())
    }

    /// In-degree of `p` in *this* graph. For simulated graphs this differs
    /// from [`ProjectRecord::popularity`], which always holds the observed value.
    pub fn in_degree(&self, p: ProjectIdx) -> usize {
        self.by_project.len_of(p.index())
    }

    pub fn lifespan_index(&self) -> &LifespanIndex {
        &self.nodes.lifespans
    }

    /// Projects whose lifespan contains `t`, ascending by index.
    pub fn live_at(&self, t: Timestamp) -> Vec<ProjectIdx> {
        self.nodes.lifespans.live_at(t)
    }

    /// True if both graphs share the same node tables (a simulated graph and
    /// its observed source do).
    pub fn shares_nodes_with(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes)
    }

    /// The edges as external-id rows, in stored order.
    pub fn backing_rows(&self) -> Vec<BackingRow> {
        self.edges
            .iter()
            .map(|e| BackingRow {
                backer: self.user_id(e.backer).clone(),
                project: self.project(e.project).id.clone(),
                time: e.time,
            })
            .collect()
    }
}

impl NodeTables {
    fn new(
        users: Vec<BackerId>,
        user_lookup: HashMap<BackerId, UserIdx>,
        projects: Vec<ProjectRecord>,
        project_lookup: HashMap<ProjectId, ProjectIdx>,
        project_founder: Vec<UserIdx>,
    ) -> Self {
        let founded = Adjacency::build(
            users.len(),
            project_founder
                .iter()
                .enumerate()
                .map(|(p, u)| (u.0, p as u32)),
        );
        let lifespans = LifespanIndex::new(projects.iter().map(|p| (p.start, p.deadline)));
        NodeTables {
            users,
            user_lookup,
            projects,
            project_lookup,
            project_founder,
            founded,
            lifespans,
        }
    }
}

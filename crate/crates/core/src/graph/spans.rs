use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{BackingRow, GraphError, ProjectIdx, ProjectRecord, ProjectSpec, Timestamp};

/// Where a project's start time came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartSource {
    /// Given in the projects file.
    Explicit,
    /// Earliest backing into the project.
    FirstBacking,
    /// No backing and no explicit start: start set to the deadline.
    ImputedAtDeadline,
}

/// Fills in missing project starts with the earliest backing time and
/// computes observed popularity.
///
/// Projects with neither an explicit start nor any backing get a zero-length
/// lifespan `[deadline, deadline]`, tagged [`StartSource::ImputedAtDeadline`].
/// A derived start later than the deadline is kept as is; [`super::validate`]
/// reports it.
pub fn derive_project_spans(
    projects: &[ProjectSpec],
    backings: &[BackingRow],
) -> Result<Vec<ProjectRecord>, GraphError> {
    let lookup: HashMap<_, _> = projects
        .iter()
        .enumerate()
        .map(|(i, p)| (&p.id, ProjectIdx(i as u32)))
        .collect();
    let mut targets = Vec::with_capacity(backings.len());
    for (i, b) in backings.iter().enumerate() {
        let p = lookup
            .get(&b.project)
            .ok_or_else(|| GraphError::UnknownProject {
                source_name: "backings".to_owned(),
                line: i as u64 + 2,
                id: b.project.0.clone(),
            })?;
        targets.push((*p, b.time));
    }
    Ok(complete_spans(projects, targets.into_iter()))
}

pub(crate) fn complete_spans(
    projects: &[ProjectSpec],
    edges: impl Iterator<Item = (ProjectIdx, Timestamp)>,
) -> Vec<ProjectRecord> {
    let mut first: Vec<Option<Timestamp>> = vec![None; projects.len()];
    let mut popularity = vec![0u64; projects.len()];
    for (p, t) in edges {
        let slot = &mut first[p.index()];
        *slot = Some(slot.map_or(t, |s| s.min(t)));
        popularity[p.index()] += 1;
    }
    projects
        .iter()
        .zip(first)
        .zip(popularity)
        .map(|((spec, first), popularity)| {
            let (start, start_source) = match (spec.start, first) {
                (Some(s), _) => (s, StartSource::Explicit),
                (None, Some(f)) => (f, StartSource::FirstBacking),
                (None, None) => (spec.deadline, StartSource::ImputedAtDeadline),
            };
            ProjectRecord {
                id: spec.id.clone(),
                founder: spec.founder.clone(),
                start,
                deadline: spec.deadline,
                popularity,
                start_source,
            }
        })
        .collect()
}

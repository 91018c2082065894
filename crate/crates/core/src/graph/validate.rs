use serde::{Deserialize, Serialize};

use super::{StartSource, TemporalBipartiteGraph};

const MAX_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingClass {
    EdgeBeforeStart,
    EdgeAfterDeadline,
    StartAfterDeadline,
    ZeroBackingProject,
    StartImputedNoBacking,
    BackerIsFounder,
}

impl FindingClass {
    /// Classes that describe inconsistent data rather than notable structure.
    pub fn is_inconsistency(self) -> bool {
        matches!(
            self,
            FindingClass::EdgeBeforeStart
                | FindingClass::EdgeAfterDeadline
                | FindingClass::StartAfterDeadline
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub class: FindingClass,
    pub count: usize,
    pub samples: Vec<String>,
}

/// `ok` is false when any finding is an inconsistency (see
/// [`FindingClass::is_inconsistency`]); informational findings leave it true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub ok: bool,
}

impl ValidationReport {
    pub fn count(&self, class: FindingClass) -> usize {
        self.findings
            .iter()
            .find(|f| f.class == class)
            .map_or(0, |f| f.count)
    }
}

#[derive(Default)]
struct Collector {
    findings: Vec<Finding>,
}

impl Collector {
    fn add(&mut self, class: FindingClass, sample: impl FnOnce() -> String) {
        let idx = match self.findings.iter().position(|f| f.class == class) {
            Some(i) => i,
            None => {
                self.findings.push(Finding {
                    class,
                    count: 0,
                    samples: Vec::new(),
                });
                self.findings.len() - 1
            }
        };
        let f = &mut self.findings[idx];
        f.count += 1;
        if f.samples.len() < MAX_SAMPLES {
            f.samples.push(sample());
        }
    }
}

/// Reports data-quality findings. Never mutates the graph.
pub fn validate(graph: &TemporalBipartiteGraph) -> ValidationReport {
    let mut c = Collector::default();

    for e in graph.edges() {
        let p = graph.project(e.project);
        let describe = || format!("{}->{}@{}", graph.user_id(e.backer), p.id, e.time);
        if e.time < p.start {
            c.add(FindingClass::EdgeBeforeStart, describe);
        } else if e.time > p.deadline {
            c.add(FindingClass::EdgeAfterDeadline, describe);
        }
    }
    for p in graph.projects() {
        if p.start > p.deadline {
            c.add(FindingClass::StartAfterDeadline, || {
                format!("{} start {} > deadline {}", p.id, p.start, p.deadline)
            });
        }
        if p.popularity == 0 {
            c.add(FindingClass::ZeroBackingProject, || p.id.to_string());
        }
        if p.start_source == StartSource::ImputedAtDeadline {
            c.add(FindingClass::StartImputedNoBacking, || p.id.to_string());
        }
    }
    for u in graph.backers() {
        if graph.is_founder(u) {
            c.add(FindingClass::BackerIsFounder, || {
                graph.user_id(u).to_string()
            });
        }
    }

    let mut findings = c.findings;
    findings.sort_by_key(|f| f.class as u8);
    let ok = !findings.iter().any(|f| f.class.is_inconsistency());
    ValidationReport { findings, ok }
}

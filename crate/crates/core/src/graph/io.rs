//! CSV ingestion and canonical export.
//!
//! `backings.csv`: `backer_id,project_id,timestamp`
//! `projects.csv`: `project_id,founder_id,deadline[,start]`
//!
//! Timestamps are epoch seconds or ISO-8601 (normalized to epoch seconds, UTC).

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{
    BackerId, BackingRow, GraphError, ProjectId, ProjectSpec, TemporalBipartiteGraph, Timestamp,
};

/// Parses epoch seconds, RFC 3339, a naive `YYYY-MM-DD[T ]HH:MM:SS` (UTC), or
/// a bare `YYYY-MM-DD` (midnight UTC).
pub fn parse_timestamp(raw: &str) -> Option<Timestamp> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(Timestamp(v));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(Timestamp(dt.timestamp()));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M:%S%.f",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Timestamp(dt.and_utc().timestamp()));
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| Timestamp(dt.and_utc().timestamp()))
}

struct Table<R: Read> {
    name: String,
    reader: csv::Reader<R>,
}

impl<R: Read> Table<R> {
    fn open(name: &str, src: R) -> Self {
        let reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(src);
        Table {
            name: name.to_owned(),
            reader,
        }
    }

    fn malformed(&self, line: u64, message: impl Into<String>) -> GraphError {
        GraphError::Malformed {
            source_name: self.name.clone(),
            line,
            message: message.into(),
        }
    }

    fn csv_error(&self, err: csv::Error) -> GraphError {
        let line = err.position().map_or(0, |p| p.line());
        match err.into_kind() {
            csv::ErrorKind::Io(source) => GraphError::Io {
                source_name: self.name.clone(),
                source,
            },
            kind => self.malformed(line, format!("{kind:?}")),
        }
    }

    /// Column positions for `required` then `optional` names.
    fn columns(
        &mut self,
        required: &[&str],
        optional: &[&str],
    ) -> Result<(Vec<usize>, Vec<Option<usize>>), GraphError> {
        let headers = match self.reader.headers() {
            Ok(h) => h.clone(),
            Err(e) => return Err(self.csv_error(e)),
        };
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim_start_matches('\u{feff}') == name)
        };
        let mut req = Vec::new();
        for name in required {
            match find(name) {
                Some(i) => req.push(i),
                None => return Err(self.malformed(1, format!("missing column `{name}`"))),
            }
        }
        let opt = optional.iter().map(|n| find(n)).collect();
        Ok((req, opt))
    }

    fn rows(
        &mut self,
        mut f: impl FnMut(&Self, u64, &csv::StringRecord) -> Result<(), GraphError>,
    ) -> Result<(), GraphError> {
        let mut record = csv::StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(true) => {
                    let line = record.position().map_or(0, |p| p.line());
                    if record.iter().all(str::is_empty) {
                        continue;
                    }
                    f(self, line, &record)?;
                }
                Ok(false) => return Ok(()),
                Err(e) => return Err(self.csv_error(e)),
            }
        }
    }
}

fn field<'r>(
    table_name: &str,
    record: &'r csv::StringRecord,
    col: usize,
    what: &str,
    line: u64,
) -> Result<&'r str, GraphError> {
    match record.get(col) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(GraphError::Malformed {
            source_name: table_name.to_owned(),
            line,
            message: format!("empty or missing `{what}`"),
        }),
    }
}

fn time_field(
    table_name: &str,
    record: &csv::StringRecord,
    col: usize,
    what: &str,
    line: u64,
) -> Result<Timestamp, GraphError> {
    let raw = field(table_name, record, col, what, line)?;
    parse_timestamp(raw).ok_or_else(|| GraphError::Malformed {
        source_name: table_name.to_owned(),
        line,
        message: format!("unparseable timestamp `{raw}` in `{what}`"),
    })
}

fn read_projects(name: &str, src: impl Read) -> Result<(Vec<ProjectSpec>, Vec<u64>), GraphError> {
    let mut table = Table::open(name, src);
    let (req, opt) = table.columns(&["project_id", "founder_id", "deadline"], &["start"])?;
    let mut specs = Vec::new();
    let mut lines = Vec::new();
    table.rows(|t, line, rec| {
        let id = field(&t.name, rec, req[0], "project_id", line)?;
        let founder = field(&t.name, rec, req[1], "founder_id", line)?;
        let deadline = time_field(&t.name, rec, req[2], "deadline", line)?;
        let start = match opt[0] {
            Some(c) if rec.get(c).is_some_and(|v| !v.is_empty()) => {
                Some(time_field(&t.name, rec, c, "start", line)?)
            }
            _ => None,
        };
        specs.push(ProjectSpec {
            id: ProjectId::new(id),
            founder: BackerId::new(founder),
            deadline,
            start,
        });
        lines.push(line);
        Ok(())
    })?;
    Ok((specs, lines))
}

fn read_backings(name: &str, src: impl Read) -> Result<(Vec<BackingRow>, Vec<u64>), GraphError> {
    let mut table = Table::open(name, src);
    let (req, _) = table.columns(&["backer_id", "project_id", "timestamp"], &[])?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    table.rows(|t, line, rec| {
        rows.push(BackingRow {
            backer: BackerId::new(field(&t.name, rec, req[0], "backer_id", line)?),
            project: ProjectId::new(field(&t.name, rec, req[1], "project_id", line)?),
            time: time_field(&t.name, rec, req[2], "timestamp", line)?,
        });
        lines.push(line);
        Ok(())
    })?;
    Ok((rows, lines))
}

fn load_named(
    backings_name: &str,
    backings: impl Read,
    projects_name: &str,
    projects: impl Read,
) -> Result<TemporalBipartiteGraph, GraphError> {
    let (specs, spec_lines) = read_projects(projects_name, projects)?;
    let (rows, row_lines) = read_backings(backings_name, backings)?;
    // Map row-index line numbers from graph construction back to file lines.
    TemporalBipartiteGraph::from_parts_named(specs, rows, projects_name, backings_name).map_err(
        |e| match e {
            GraphError::DuplicateProject {
                source_name,
                line,
                id,
            } => GraphError::DuplicateProject {
                source_name,
                line: spec_lines[(line - 2) as usize],
                id,
            },
            GraphError::UnknownProject {
                source_name,
                line,
                id,
            } => GraphError::UnknownProject {
                source_name,
                line: row_lines[(line - 2) as usize],
                id,
            },
            other => other,
        },
    )
}

/// Loads a graph from in-memory CSV streams.
pub fn load_graph(
    backings: impl Read,
    projects: impl Read,
) -> Result<TemporalBipartiteGraph, GraphError> {
    load_named("backings", backings, "projects", projects)
}

/// Loads a graph from CSV files; errors name the offending file.
pub fn load_graph_files(
    backings: impl AsRef<Path>,
    projects: impl AsRef<Path>,
) -> Result<TemporalBipartiteGraph, GraphError> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|source| GraphError::Io {
                source_name: p.display().to_string(),
                source,
            })
    };
    let (bp, pp) = (backings.as_ref(), projects.as_ref());
    load_named(
        &bp.display().to_string(),
        open(bp)?,
        &pp.display().to_string(),
        open(pp)?,
    )
}

/// Writes edges in stored (time) order with epoch-second timestamps.
pub fn write_backings(graph: &TemporalBipartiteGraph, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["backer_id", "project_id", "timestamp"])?;
    for e in graph.edges() {
        w.write_record([
            graph.user_id(e.backer).as_str(),
            graph.project(e.project).id.as_str(),
            &e.time.0.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every project with an explicit start, so a reload reproduces the
/// same lifespans.
pub fn write_projects(graph: &TemporalBipartiteGraph, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project_id", "founder_id", "deadline", "start"])?;
    for p in graph.projects() {
        w.write_record([
            p.id.as_str(),
            p.founder.as_str(),
            &p.deadline.0.to_string(),
            &p.start.0.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

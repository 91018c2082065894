//! Static centered interval tree answering "which projects are live at `t`".

use super::{ProjectIdx, Timestamp};

#[derive(Debug, Clone)]
struct Node {
    center: i64,
    /// Intervals containing `center`, ascending by start.
    by_start: Vec<(i64, u32)>,
    /// The same intervals, descending by end.
    by_end: Vec<(i64, u32)>,
    left: Option<u32>,
    right: Option<u32>,
}

/// Stabbing-query index over closed project lifespans `[start, deadline]`.
///
/// Query cost is `O(log n + k)` for `k` live projects. Intervals with
/// `start > deadline` are empty and never reported.
#[derive(Debug, Clone, Default)]
pub struct LifespanIndex {
    nodes: Vec<Node>,
    root: Option<u32>,
    len: usize,
}

impl LifespanIndex {
    /// Spans are indexed by their position in the iterator.
    pub fn new(spans: impl Iterator<Item = (Timestamp, Timestamp)>) -> Self {
        let intervals: Vec<(i64, i64, u32)> = spans
            .enumerate()
            .map(|(i, (s, e))| (s.0, e.0, i as u32))
            .collect();
        let len = intervals.len();
        let live: Vec<(i64, i64, u32)> = intervals.into_iter().filter(|(s, e, _)| s <= e).collect();
        let mut index = LifespanIndex {
            nodes: Vec::new(),
            root: None,
            len,
        };
        index.root = index.build(live);
        index
    }

    fn build(&mut self, intervals: Vec<(i64, i64, u32)>) -> Option<u32> {
        if intervals.is_empty() {
            return None;
        }
        let mut endpoints: Vec<i64> = intervals.iter().flat_map(|&(s, e, _)| [s, e]).collect();
        let mid = endpoints.len() / 2;
        let center = *endpoints.select_nth_unstable(mid).1;

        let mut here = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for iv in intervals {
            if iv.1 < center {
                left.push(iv);
            } else if iv.0 > center {
                right.push(iv);
            } else {
                here.push(iv);
            }
        }
        let mut by_start: Vec<(i64, u32)> = here.iter().map(|&(s, _, i)| (s, i)).collect();
        by_start.sort_unstable();
        let mut by_end: Vec<(i64, u32)> = here.iter().map(|&(_, e, i)| (e, i)).collect();
        by_end.sort_unstable_by(|a, b| b.cmp(a));

        let slot = self.nodes.len() as u32;
        self.nodes.push(Node {
            center,
            by_start,
            by_end,
            left: None,
            right: None,
        });
        let l = self.build(left);
        let r = self.build(right);
        let node = &mut self.nodes[slot as usize];
        node.left = l;
        node.right = r;
        Some(slot)
    }

    /// Number of spans indexed, including empty ones.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Projects `p` with `start(p) <= t <= deadline(p)`, ascending.
    pub fn live_at(&self, t: Timestamp) -> Vec<ProjectIdx> {
        let mut out = Vec::new();
        self.for_each_live(t, |p| out.push(p));
        out.sort_unstable();
        out
    }

    /// Visits live projects in tree order (not sorted).
    pub fn for_each_live(&self, t: Timestamp, mut f: impl FnMut(ProjectIdx)) {
        let t = t.0;
        let mut cursor = self.root;
        while let Some(i) = cursor {
            let node = &self.nodes[i as usize];
            if t < node.center {
                for &(s, p) in &node.by_start {
                    if s > t {
                        break;
                    }
                    f(ProjectIdx(p));
                }
                cursor = node.left;
            } else if t > node.center {
                for &(e, p) in &node.by_end {
                    if e < t {
                        break;
                    }
                    f(ProjectIdx(p));
                }
                cursor = node.right;
            } else {
                for &(_, p) in &node.by_start {
                    f(ProjectIdx(p));
                }
                break;
            }
        }
    }
}

use rand::Rng;

use super::sampler::{CategoricalSampler, Fenwick};
use super::{candidate_set, choice_distribution};
use crate::graph::{Backing, ProjectIdx, TemporalBipartiteGraph};

/// A rewired graph plus the edges whose candidate set had to force-include
/// an original target outside its lifespan.
#[derive(Debug, Clone)]
pub struct SimulatedGraph {
    pub graph: TemporalBipartiteGraph,
    /// Edge positions (in time order) with a force-included original target.
    pub forced_edges: Vec<usize>,
}

/// Precomputed sweep schedule for repeated rewiring of one observed graph.
///
/// Rewiring walks the edges in time order while a Fenwick tree holds the
/// popularity of every currently live project: projects enter when
/// `start <= t` and leave once `deadline < t`. Each edge costs one uniform
/// draw and an `O(log P)` lookup. Member order in the tree is project index
/// order, the same order [`candidate_set`] uses, so for equal random draws
/// this route and [`rewire_graph_by_candidate_sets`] pick the same targets.
#[derive(Debug)]
pub struct NullModel<'g> {
    graph: &'g TemporalBipartiteGraph,
    by_start: Vec<ProjectIdx>,
    by_deadline: Vec<ProjectIdx>,
}

impl<'g> NullModel<'g> {
    pub fn new(graph: &'g TemporalBipartiteGraph) -> Self {
        let spanned: Vec<ProjectIdx> = graph
            .project_indices()
            .filter(|&p| graph.project(p).start <= graph.project(p).deadline)
            .collect();
        let mut by_start = spanned.clone();
        by_start.sort_by_key(|&p| graph.project(p).start);
        let mut by_deadline = spanned;
        by_deadline.sort_by_key(|&p| graph.project(p).deadline);
        NullModel {
            graph,
            by_start,
            by_deadline,
        }
    }

    pub fn observed(&self) -> &'g TemporalBipartiteGraph {
        self.graph
    }

    pub fn rewire<R: Rng + ?Sized>(&self, rng: &mut R) -> SimulatedGraph {
        let g = self.graph;
        let mut live = Fenwick::new(g.project_count());
        let (mut opened, mut closed) = (0, 0);
        let mut edges = Vec::with_capacity(g.edge_count());
        let mut forced_edges = Vec::new();

        for (i, e) in g.edges().iter().enumerate() {
            let t = e.time;
            while let Some(&p) = self.by_start.get(opened) {
                if g.project(p).start > t {
                    break;
                }
                live.add(p.index(), g.project(p).popularity);
                opened += 1;
            }
            // start <= deadline < t, so anything closing here already opened.
            while let Some(&p) = self.by_deadline.get(closed) {
                if g.project(p).deadline >= t {
                    break;
                }
                live.remove(p.index(), g.project(p).popularity);
                closed += 1;
            }

            let original = g.project(e.project);
            let target = if original.is_live_at(t) {
                ProjectIdx(live.find(rng.random_range(0..live.total())) as u32)
            } else {
                forced_edges.push(i);
                let total = live.total() + original.popularity;
                let u = rng.random_range(0..total);
                if u < live.total() {
                    ProjectIdx(live.find(u) as u32)
                } else {
                    e.project
                }
            };
            edges.push(Backing {
                backer: e.backer,
                project: target,
                time: t,
            });
        }

        SimulatedGraph {
            graph: g.with_edges(edges),
            forced_edges,
        }
    }
}

/// Rewires every edge of `graph` once.
pub fn rewire_graph<R: Rng + ?Sized>(
    graph: &TemporalBipartiteGraph,
    rng: &mut R,
) -> SimulatedGraph {
    NullModel::new(graph).rewire(rng)
}

/// Reference route: builds each edge's [`candidate_set`] explicitly and
/// samples from its [`choice_distribution`]. Slow (`O(E · K)`), used to
/// cross-check [`NullModel::rewire`].
pub fn rewire_graph_by_candidate_sets<R: Rng + ?Sized>(
    graph: &TemporalBipartiteGraph,
    rng: &mut R,
) -> SimulatedGraph {
    let mut edges = Vec::with_capacity(graph.edge_count());
    let mut forced_edges = Vec::new();
    for (i, e) in graph.edges().iter().enumerate() {
        let cs = candidate_set(graph, e);
        if cs.forced.is_some() {
            forced_edges.push(i);
        }
        let sampler: CategoricalSampler = choice_distribution(&cs).sampler();
        edges.push(Backing {
            backer: e.backer,
            project: cs.members[sampler.sample(rng)],
            time: e.time,
        });
    }
    SimulatedGraph {
        graph: graph.with_edges(edges),
        forced_edges,
    }
}

/// Checks the null-model invariants of one rewiring: same node tables,
/// edge-for-edge identical sources and timestamps (hence identical
/// out-degrees), and every target live at the edge time unless it is the
/// force-included original of a flagged edge.
pub fn check_rewiring(
    observed: &TemporalBipartiteGraph,
    simulated: &SimulatedGraph,
) -> Result<(), String> {
    let sim = &simulated.graph;
    if !sim.shares_nodes_with(observed) {
        return Err("simulated graph does not share the observed node tables".into());
    }
    if sim.edge_count() != observed.edge_count() {
        return Err(format!(
            "edge count changed: {} -> {}",
            observed.edge_count(),
            sim.edge_count()
        ));
    }
    let mut forced = simulated.forced_edges.iter().peekable();
    for (i, (o, s)) in observed.edges().iter().zip(sim.edges()).enumerate() {
        if o.backer != s.backer || o.time != s.time {
            return Err(format!("edge {i}: source or timestamp changed"));
        }
        let is_forced = forced.next_if_eq(&&i).is_some();
        let live = sim.project(s.project).is_live_at(s.time);
        if !live && !(is_forced && s.project == o.project) {
            return Err(format!(
                "edge {i}: target {} not live at {}",
                sim.project(s.project).id,
                s.time
            ));
        }
    }
    if forced.next().is_some() {
        return Err("forced edge list is not sorted or out of range".into());
    }
    for u in observed.users() {
        if observed.out_degree(u) != sim.out_degree(u) {
            return Err(format!("out-degree of {} changed", observed.user_id(u)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn staggered() -> TemporalBipartiteGraph {
        let mut backings = String::from("backer_id,project_id,timestamp\n");
        let mut projects = String::from("project_id,founder_id,deadline,start\n");
        for p in 0..12 {
            let start = p * 7;
            projects.push_str(&format!("p{p},f{p},{},{start}\n", start + 20));
            for k in 0..(p % 4 + 1) {
                backings.push_str(&format!("u{},p{p},{}\n", (p * 3 + k) % 9, start + k * 5));
            }
        }
        // One edge after its target's deadline.
        backings.push_str("u1,p0,50\n");
        load_graph(backings.as_bytes(), projects.as_bytes()).unwrap()
    }

    #[test]
    fn single_edge_single_candidate_is_fixed() {
        let g = load_graph(
            "backer_id,project_id,timestamp\na,p,5\n".as_bytes(),
            "project_id,founder_id,deadline,start\np,z,10,0\nq,y,3,0\n".as_bytes(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sim = rewire_graph(&g, &mut rng);
        assert_eq!(sim.graph.edges(), g.edges());
        assert!(sim.forced_edges.is_empty());
    }

    #[test]
    fn sweep_and_candidate_set_routes_agree() {
        let g = staggered();
        for seed in 0..50 {
            let a = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = rewire_graph_by_candidate_sets(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(a.graph.edges(), b.graph.edges(), "seed {seed}");
            assert_eq!(a.forced_edges, b.forced_edges);
            check_rewiring(&g, &a).unwrap();
        }
    }

    #[test]
    fn forced_edge_is_flagged() {
        let g = staggered();
        let sim = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(sim.forced_edges.len(), 1);
        let i = sim.forced_edges[0];
        assert_eq!(g.edges()[i].time.0, 50);
    }

    #[test]
    fn popularity_is_read_from_observed_graph() {
        let g = staggered();
        let sim = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(9));
        for p in g.project_indices() {
            assert_eq!(sim.graph.project(p).popularity, g.project(p).popularity);
        }
    }

    #[test]
    fn check_rewiring_catches_moved_edge() {
        let g = staggered();
        let mut sim = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(0));
        let mut edges = sim.graph.edges().to_vec();
        // Retarget the first edge at a project that is not live yet.
        edges[0].project = ProjectIdx(11);
        sim.graph = g.with_edges(edges);
        assert!(check_rewiring(&g, &sim).is_err());
    }
}

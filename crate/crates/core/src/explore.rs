//! Exhaustive enumeration of small trees and bounded reachability search in
//! the move graph.
//!
//! A `Reached` answer only says the trees are joined by tree moves; it is not
//! a regular homotopy of immersions, since moves can leave the realisable
//! class. `CertifiedUnreachable` is a genuine obstruction because F is
//! invariant under regular homotopy through immersions without triple points.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::canonical::{canonical_code_unchecked, CanonicalCode};
use crate::invariant::{invariant_unchecked, InvariantVector};
use crate::moves::{successors, Move, MoveLimits};
use crate::tree::{DoublePointTree, Edge, Rooted, TreeError, Vertex};

/// Number of unlabelled free trees on n vertices, n = 1..=19.
const FREE_TREES: [u64; 19] = [
    1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551, 1301, 3159, 7741, 19320, 48629, 123867, 317955,
];

/// Default cap on the number of candidate trees `enumerate_trees` may build.
pub const DEFAULT_CANDIDATE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExploreError {
    #[error("bounds must be at least 1 (got max vertices {max_vertices}, degree bound {delta_bound})")]
    InvalidBound { max_vertices: usize, delta_bound: i64 },
    #[error("enumeration would build about {estimate} candidates, over the limit of {limit}")]
    ResourceLimit { estimate: u128, limit: u64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Every valid tree with at most `max_vertices` vertices and all degrees in
/// `[-delta_bound, delta_bound]`, keyed by canonical code.
pub fn enumerate_trees(
    max_vertices: usize,
    delta_bound: i64,
) -> Result<BTreeMap<CanonicalCode, DoublePointTree>, ExploreError> {
    enumerate_trees_with_limit(max_vertices, delta_bound, DEFAULT_CANDIDATE_LIMIT)
}

pub fn enumerate_trees_with_limit(
    max_vertices: usize,
    delta_bound: i64,
    limit: u64,
) -> Result<BTreeMap<CanonicalCode, DoublePointTree>, ExploreError> {
    if max_vertices < 1 || delta_bound < 1 {
        return Err(ExploreError::InvalidBound {
            max_vertices,
            delta_bound,
        });
    }
    let estimate = candidate_estimate(max_vertices, delta_bound);
    if estimate > u128::from(limit) {
        return Err(ExploreError::ResourceLimit { estimate, limit });
    }

    let mut out = BTreeMap::new();
    let roots: Vec<i64> = (-delta_bound..=delta_bound).filter(|d| d.rem_euclid(2) == 1).collect();
    let mut shapes: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for n in 1..=max_vertices {
        if n > 1 {
            shapes = grow(&shapes, n - 1);
        }
        if n % 2 == 0 {
            continue;
        }
        for shape in &shapes {
            for matching in matchings(n - 1) {
                let oriented = orient(n, shape, &matching);
                assign_degrees(&oriented, &roots, delta_bound, &mut out);
            }
        }
    }
    Ok(out)
}

fn candidate_estimate(max_vertices: usize, delta_bound: i64) -> u128 {
    let roots = (delta_bound as u128).div_ceil(2) * 2;
    let mut total: u128 = 0;
    for n in (1..=max_vertices).step_by(2) {
        let Some(&shapes) = FREE_TREES.get(n - 1) else {
            return u128::MAX;
        };
        let matchings: u128 = (1..n.saturating_sub(1)).step_by(2).map(|k| k as u128).product();
        let signs = 1u128 << (n - 1);
        total = total.saturating_add(u128::from(shapes) * matchings * roots * signs);
    }
    total
}

/// Free trees on n + 1 vertices from those on n, deduplicated by shape.
fn grow(shapes: &[Vec<(usize, usize)>], n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for shape in shapes {
        for v in 0..n {
            let mut next = shape.clone();
            next.push((v, n));
            if seen.insert(free_tree_key(n + 1, &next)) {
                out.push(next);
            }
        }
    }
    out
}

/// Canonical string of an unlabelled free tree, rooted at its centre(s).
fn free_tree_key(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted_key(&adj, c, usize::MAX))
        .min()
        .unwrap_or_default()
}

fn rooted_key(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_key(adj, w, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// All perfect matchings of `0..m` as partner arrays.
fn matchings(m: usize) -> Vec<Vec<usize>> {
    fn go(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(first) = partner.iter().position(|&p| p == usize::MAX) else {
            out.push(partner.clone());
            return;
        };
        for second in first + 1..partner.len() {
            if partner[second] == usize::MAX {
                partner[first] = second;
                partner[second] = first;
                go(partner, out);
                partner[first] = usize::MAX;
                partner[second] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut vec![usize::MAX; m], &mut out);
    out
}

/// Builds the tree with each edge pointing away from its conjugate; degrees
/// are placeholders.
fn orient(n: usize, shape: &[(usize, usize)], partner: &[usize]) -> DoublePointTree {
    let vertices = (0..n)
        .map(|i| Vertex {
            id: format!("v{i}"),
            delta: 1,
        })
        .collect();
    let edges = shape
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Edge {
            id: format!("e{i}"),
            tail: a,
            head: b,
        })
        .collect();
    let mut t = DoublePointTree::from_raw(vertices, edges, partner.iter().map(|&p| Some(p)).collect());
    let rooted = Rooted::new(&t);
    for (e, &p) in partner.iter().enumerate() {
        let tail = rooted.forced_tail(&t, e, p);
        let head = t.other_end(e, tail);
        t.edges[e].tail = tail;
        t.edges[e].head = head;
    }
    t
}

fn assign_degrees(t: &DoublePointTree, roots: &[i64], bound: i64, out: &mut BTreeMap<CanonicalCode, DoublePointTree>) {
    // Visit edges so that one endpoint of each is already assigned.
    let n = t.vertex_count();
    let mut order = Vec::new();
    let mut reached = vec![false; n];
    reached[0] = true;
    while order.len() < t.edge_count() {
        for e in &t.edges {
            if reached[e.tail] != reached[e.head] {
                let (from, to) = if reached[e.tail] {
                    (e.tail, e.head)
                } else {
                    (e.head, e.tail)
                };
                reached[to] = true;
                order.push((from, to));
            }
        }
    }
    fn go(
        t: &mut DoublePointTree,
        order: &[(usize, usize)],
        bound: i64,
        out: &mut BTreeMap<CanonicalCode, DoublePointTree>,
    ) {
        let Some((&(from, to), rest)) = order.split_first() else {
            debug_assert!(t.is_valid());
            out.entry(canonical_code_unchecked(t)).or_insert_with(|| t.clone());
            return;
        };
        for step in [-2, 2] {
            let d = t.vertices[from].delta + step;
            if d.abs() <= bound {
                t.vertices[to].delta = d;
                go(t, rest, bound, out);
            }
        }
    }
    let mut work = t.clone();
    for &r in roots {
        work.vertices[0].delta = r;
        go(&mut work, &order, bound, out);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReachLimits {
    pub max_steps: usize,
    pub max_vertices: usize,
    pub max_reattach_degree: usize,
}

impl Default for ReachLimits {
    fn default() -> Self {
        ReachLimits {
            max_steps: 6,
            max_vertices: 11,
            max_reattach_degree: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum ReachResult {
    /// Applying `path` to the source in order yields a tree isomorphic to the
    /// target.
    Reached { path: Vec<Move>, note: &'static str },
    CertifiedUnreachable {
        source_invariant: InvariantVector,
        target_invariant: InvariantVector,
        note: &'static str,
    },
    /// No path within the limits; says nothing about longer paths.
    Unknown {
        explored_states: usize,
        depth: usize,
        note: &'static str,
    },
}

const REACHED_NOTE: &str = "path of tree moves; not by itself a regular homotopy of immersions";
const UNREACHABLE_NOTE: &str = "invariants differ, so no regular homotopy without triple points joins the immersions";
const UNKNOWN_NOTE: &str = "no path found within the search limits";

/// Breadth-first search from `source` towards a tree isomorphic to `target`.
pub fn reachable(
    source: &DoublePointTree,
    target: &DoublePointTree,
    limits: ReachLimits,
) -> Result<ReachResult, TreeError> {
    source.require_valid()?;
    target.require_valid()?;
    let (f_source, f_target) = (invariant_unchecked(source), invariant_unchecked(target));
    if f_source != f_target {
        return Ok(ReachResult::CertifiedUnreachable {
            source_invariant: f_source,
            target_invariant: f_target,
            note: UNREACHABLE_NOTE,
        });
    }

    let goal = canonical_code_unchecked(target);
    let start = canonical_code_unchecked(source);
    if start == goal {
        return Ok(ReachResult::Reached {
            path: Vec::new(),
            note: REACHED_NOTE,
        });
    }
    let move_limits = MoveLimits {
        max_reattach_degree: limits.max_reattach_degree,
    };
    // code -> (parent code, move from parent); the start has no entry.
    let mut parent: HashMap<CanonicalCode, (CanonicalCode, Move)> = HashMap::new();
    let mut visited: HashSet<CanonicalCode> = HashSet::from([start.clone()]);
    let mut frontier: Vec<(CanonicalCode, DoublePointTree)> = vec![(start.clone(), source.clone())];
    let mut depth = 0;
    while depth < limits.max_steps && !frontier.is_empty() {
        depth += 1;
        let expanded = expand(&frontier, move_limits, limits.max_vertices);
        let mut next = Vec::new();
        for ((code, _), succ) in frontier.iter().zip(expanded) {
            for (m, t, c) in succ {
                if !visited.insert(c.clone()) {
                    continue;
                }
                parent.insert(c.clone(), (code.clone(), m));
                if c == goal {
                    return Ok(ReachResult::Reached {
                        path: trace(&parent, &start, &goal),
                        note: REACHED_NOTE,
                    });
                }
                next.push((c, t));
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        frontier = next;
    }
    Ok(ReachResult::Unknown {
        explored_states: visited.len(),
        depth,
        note: UNKNOWN_NOTE,
    })
}

type Expansion = Vec<(Move, DoublePointTree, CanonicalCode)>;

/// Successors of each frontier state, computed on worker threads; the result
/// is in frontier order regardless of scheduling.
fn expand(frontier: &[(CanonicalCode, DoublePointTree)], limits: MoveLimits, max_vertices: usize) -> Vec<Expansion> {
    let one = |t: &DoublePointTree| -> Expansion {
        successors(t, limits)
            .into_iter()
            .filter(|(_, s)| s.vertex_count() <= max_vertices)
            .map(|(m, s)| {
                let c = canonical_code_unchecked(&s);
                (m, s, c)
            })
            .collect()
    };
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(frontier.len());
    if workers <= 1 {
        return frontier.iter().map(|(_, t)| one(t)).collect();
    }
    let chunk = frontier.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = frontier
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|(_, t)| one(t)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn trace(
    parent: &HashMap<CanonicalCode, (CanonicalCode, Move)>,
    start: &CanonicalCode,
    goal: &CanonicalCode,
) -> Vec<Move> {
    let mut path = Vec::new();
    let mut at = goal;
    while at != start {
        let (prev, m) = &parent[at];
        path.push(m.clone());
        at = prev;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::apply_move;

    fn point(delta: i64) -> DoublePointTree {
        DoublePointTree::from_parts(&[("v", delta)], &[], &[]).unwrap()
    }

    #[test]
    fn free_tree_counts() {
        let mut shapes: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for n in 2..=10 {
            shapes = grow(&shapes, n - 1);
            assert_eq!(shapes.len() as u64, FREE_TREES[n - 1], "n = {n}");
        }
    }

    #[test]
    fn matching_counts() {
        assert_eq!(matchings(0).len(), 1);
        assert_eq!(matchings(2).len(), 1);
        assert_eq!(matchings(4).len(), 3);
        assert_eq!(matchings(6).len(), 15);
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_trees(1, 1).unwrap().len(), 2);
        assert_eq!(
            enumerate_trees(2, 5).unwrap().len(),
            enumerate_trees(1, 5).unwrap().len()
        );
        assert_eq!(enumerate_trees(3, 3).unwrap().len(), 12);
    }

    #[test]
    fn bounds_are_checked() {
        assert!(matches!(enumerate_trees(0, 3), Err(ExploreError::InvalidBound { .. })));
        assert!(matches!(enumerate_trees(3, 0), Err(ExploreError::InvalidBound { .. })));
        assert!(matches!(
            enumerate_trees(25, 3),
            Err(ExploreError::ResourceLimit { .. })
        ));
        assert!(matches!(
            enumerate_trees_with_limit(9, 9, 1000),
            Err(ExploreError::ResourceLimit { .. })
        ));
    }

    #[test]
    fn mismatch_is_certified() {
        let r = reachable(&point(1), &point(-1), ReachLimits::default()).unwrap();
        assert_eq!(
            r,
            ReachResult::CertifiedUnreachable {
                source_invariant: InvariantVector::basis(1),
                target_invariant: InvariantVector::basis(-1),
                note: UNREACHABLE_NOTE,
            }
        );
    }

    #[test]
    fn one_birth_is_found() {
        let star = DoublePointTree::from_parts(
            &[("c", 1), ("a", 3), ("b", 3)],
            &[("x", "c", "a"), ("y", "c", "b")],
            &[("x", "y")],
        )
        .unwrap();
        let ReachResult::Reached { path, .. } = reachable(&point(1), &star, ReachLimits::default()).unwrap() else {
            panic!("expected a path");
        };
        assert_eq!(path.len(), 1);
        let end = apply_move(&point(1), &path[0]).unwrap();
        assert_eq!(canonical_code_unchecked(&end), canonical_code_unchecked(&star));
    }

    #[test]
    fn zero_steps_gives_unknown() {
        let limits = ReachLimits {
            max_steps: 0,
            ..ReachLimits::default()
        };
        let star = apply_move(
            &point(1),
            &Move::EBirth {
                v1: "v".into(),
                v2: "v".into(),
                d1: 3,
                d2: 3,
            },
        )
        .unwrap();
        assert!(matches!(
            reachable(&point(1), &star, limits).unwrap(),
            ReachResult::Unknown { .. }
        ));
    }
}

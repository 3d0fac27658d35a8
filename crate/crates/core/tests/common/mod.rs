//! Brute-force helpers shared by the oracle tests and the acceptance runner.

#![allow(dead_code)]

use std::collections::HashMap;

use dptree::{invariant_of, DoublePointTree, InvariantVector};

/// Isomorphism by backtracking over vertex bijections.
pub fn brute_isomorphic(a: &DoublePointTree, b: &DoublePointTree) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let edges_b: HashMap<(usize, usize), usize> = b
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.tail, e.head), i))
        .collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(a, b, &edges_b, &mut map, &mut used, 0)
}

fn extend(
    a: &DoublePointTree,
    b: &DoublePointTree,
    edges_b: &HashMap<(usize, usize), usize>,
    map: &mut [usize],
    used: &mut [bool],
    v: usize,
) -> bool {
    if v == map.len() {
        let emap: Option<Vec<usize>> = a
            .edges()
            .iter()
            .map(|e| edges_b.get(&(map[e.tail], map[e.head])).copied())
            .collect();
        let Some(emap) = emap else { return false };
        return (0..a.edge_count()).all(|e| a.partner(e).map(|p| emap[p]) == b.partner(emap[e]));
    }
    for w in 0..map.len() {
        if used[w] || a.delta(v) != b.delta(w) || a.degree(v) != b.degree(w) {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend(a, b, edges_b, map, used, v + 1) {
            return true;
        }
        used[w] = false;
    }
    map[v] = usize::MAX;
    false
}

pub fn build(deltas: &[i64], edges: &[(usize, usize)], pairs: &[(usize, usize)]) -> DoublePointTree {
    DoublePointTree::new(
        deltas.iter().enumerate().map(|(i, &d)| (format!("v{i}"), d)),
        edges
            .iter()
            .enumerate()
            .map(|(i, &(t, h))| (format!("e{i}"), format!("v{t}"), format!("v{h}"))),
        pairs.iter().map(|&(x, y)| (format!("e{x}"), format!("e{y}"))),
    )
    .unwrap()
}

/// All perfect matchings of `0..n`.
pub fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for (i, &other) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| x)
            .collect();
        for mut m in matchings(&remaining) {
            m.push((first, other));
            out.push(m);
        }
    }
    out
}

/// Every valid tree on the given undirected shape and degrees, over all
/// orientations and pairings.
pub fn valid_configurations(deltas: &[i64], shape: &[(usize, usize)]) -> Vec<DoublePointTree> {
    let m = shape.len();
    let all_pairings = matchings(&(0..m).collect::<Vec<_>>());
    let mut out = Vec::new();
    for bits in 0..1u32 << m {
        let edges: Vec<(usize, usize)> = shape
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| if bits >> i & 1 == 0 { (x, y) } else { (y, x) })
            .collect();
        for pairs in &all_pairings {
            let t = build(deltas, &edges, pairs);
            if t.is_valid() {
                out.push(t);
            }
        }
    }
    out
}

/// Representatives of the brute-force isomorphism classes in `trees`.
pub fn classes(trees: Vec<DoublePointTree>) -> Vec<DoublePointTree> {
    let mut reps: Vec<DoublePointTree> = Vec::new();
    for t in trees {
        if !reps.iter().any(|r| brute_isomorphic(r, &t)) {
            reps.push(t);
        }
    }
    reps
}

pub fn path_shape(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

/// Brute-force check of a path-shaped building block: it is among the valid
/// configurations of its degree sequence, and every valid configuration with
/// the block's orientation has invariant `want`. Returns all classes found.
pub fn check_path_block(block: &DoublePointTree, want: &InvariantVector) -> Result<Vec<DoublePointTree>, String> {
    let deltas: Vec<i64> = block.vertices().iter().map(|v| v.delta).collect();
    let n = deltas.len();
    let reps = classes(valid_configurations(&deltas, &path_shape(n)));
    if !reps.iter().any(|r| brute_isomorphic(r, block)) {
        return Err(format!("block {deltas:?} not among {} valid classes", reps.len()));
    }
    let orientation = |t: &DoublePointTree| (0..n).map(|v| t.indegree_at(v)).collect::<Vec<_>>();
    let own = orientation(block);
    let mut mirrored = own.clone();
    mirrored.reverse();
    for r in &reps {
        let o = orientation(r);
        if (o == own || o == mirrored) && invariant_of(r).map_err(|e| e.to_string())? != *want {
            return Err(format!(
                "class with the block's orientation has invariant {}",
                invariant_of(r).unwrap()
            ));
        }
    }
    Ok(reps)
}

//! Brute-force oracles, independent of the library's search and canonical
//! form, used to pin down values the library computes more cleverly.

use std::collections::BTreeMap;

mod common;

use common::{brute_isomorphic, check_path_block, classes, valid_configurations};

use dptree::revolution::fixtures;
use dptree::{
    apply_move, building_block_f, building_block_g, canonical_code, enumerate_moves, enumerate_trees, invariant_of,
    isomorphic, successors, DoublePointTree, InvariantVector, MoveLimits,
};

fn vector(pairs: &[(i64, i64)]) -> InvariantVector {
    InvariantVector::from_pairs(pairs.iter().copied()).unwrap()
}

#[test]
fn path_oracle_confirms_g3() {
    let want = vector(&[(1, 2), (3, -1)]);
    let reps = check_path_block(&building_block_g(3).unwrap(), &want).unwrap();
    // Three valid classes on 3,1,3,1,3; only the block has this invariant.
    assert_eq!(reps.len(), 3);
    let hits: Vec<_> = reps.iter().filter(|r| invariant_of(r).unwrap() == want).collect();
    assert_eq!(hits.len(), 1);
    assert!(brute_isomorphic(hits[0], &building_block_g(3).unwrap()));
    assert_eq!(hits[0].indegree_at(2), 2);
}

#[test]
fn path_oracle_confirms_f_minus3() {
    let want = InvariantVector::basis(-3);
    let reps = check_path_block(&building_block_f(-3).unwrap(), &want).unwrap();
    // Nested and crossed pairings both work; the third class is the mirror
    // of g_{-3}'s orientation.
    assert_eq!(reps.len(), 3);
    assert_eq!(reps.iter().filter(|r| invariant_of(r).unwrap() == want).count(), 2);
}

#[test]
fn path_oracle_on_nine_vertex_blocks() {
    for k in [5, -3] {
        check_path_block(&building_block_g(k).unwrap(), &vector(&[(1, 2), (k, -1)])).unwrap();
        check_path_block(&building_block_f(k).unwrap(), &InvariantVector::basis(k)).unwrap();
    }
}

/// Labeled trees on `n` vertices from Prüfer sequences.
fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = n.pow(n as u32 - 2);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

fn odd_deltas(count: usize, bound: i64) -> Vec<Vec<i64>> {
    let choices: Vec<i64> = (-bound..=bound).filter(|d| d % 2 != 0).collect();
    let mut out = vec![vec![]];
    for _ in 0..count {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                choices.iter().map(move |&d| {
                    let mut q = p.clone();
                    q.push(d);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn enumeration_matches_labeled_brute_force() {
    let bound = 3;
    let mut expected = 0;
    for n in [1, 3, 5] {
        let shapes = labeled_trees(n);
        let mut found = Vec::new();
        for deltas in odd_deltas(n, bound) {
            for shape in &shapes {
                if shape.iter().all(|&(x, y)| (deltas[x] - deltas[y]).abs() == 2) {
                    found.extend(valid_configurations(&deltas, shape));
                }
            }
        }
        // Bucket by a cheap signature before the quadratic class search.
        let mut buckets: BTreeMap<Vec<(i64, usize)>, Vec<DoublePointTree>> = BTreeMap::new();
        for t in found {
            let mut sig: Vec<(i64, usize)> = (0..n).map(|v| (t.delta(v), t.indegree_at(v))).collect();
            sig.sort();
            buckets.entry(sig).or_default().push(t);
        }
        expected += buckets.into_values().map(|b| classes(b).len()).sum::<usize>();
    }
    assert_eq!(enumerate_trees(5, bound).unwrap().len(), expected);
    assert_eq!(enumerate_trees(3, 3).unwrap().len(), 12);
}

#[test]
fn canonical_codes_agree_with_brute_force() {
    let trees: Vec<DoublePointTree> = enumerate_trees(7, 3).unwrap().into_values().collect();
    // Distinct codes are never isomorphic.
    let mut by_sig: BTreeMap<Vec<(i64, usize, usize)>, Vec<&DoublePointTree>> = BTreeMap::new();
    for t in &trees {
        let mut sig: Vec<(i64, usize, usize)> = (0..t.vertex_count())
            .map(|v| (t.delta(v), t.degree(v), t.indegree_at(v)))
            .collect();
        sig.sort();
        by_sig.entry(sig).or_default().push(t);
    }
    for bucket in by_sig.values() {
        for (i, a) in bucket.iter().enumerate() {
            for b in &bucket[i + 1..] {
                assert!(!brute_isomorphic(a, b));
            }
        }
    }
    // Shuffled copies keep their code.
    for (i, t) in trees.iter().enumerate().step_by(7) {
        let n = t.vertex_count();
        let m = t.edge_count();
        let vperm: Vec<usize> = (0..n).map(|j| (j * 5 + i) % n).collect();
        let eperm: Vec<usize> = (0..m).rev().collect();
        let vperm = if n % 5 == 0 { (0..n).rev().collect() } else { vperm };
        let shuffled = t.permuted(&vperm, &eperm);
        assert!(brute_isomorphic(t, &shuffled));
        assert_eq!(canonical_code(t).unwrap(), canonical_code(&shuffled).unwrap());
    }
}

#[test]
fn figure_trees_are_pairwise_distinct() {
    let ts: Vec<DoublePointTree> = ["fig9a", "fig9b", "fig9c", "fig9d"]
        .iter()
        .map(|name| {
            let path = format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
        })
        .collect();
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            assert!(!brute_isomorphic(a, b));
            assert!(!isomorphic(a, b).unwrap());
        }
    }
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

#[test]
fn two_lobes_all_pairs_crossings() {
    let pts = fixtures::two_lobes().points;
    let mut count = 0;
    for i in 0..pts.len() - 1 {
        for j in i + 2..pts.len() - 1 {
            if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                count += 1;
            }
        }
    }
    assert_eq!(count, 2);
}

#[test]
fn successors_replay_through_apply_move() {
    let limits = MoveLimits::default();
    for t in enumerate_trees(5, 5).unwrap().values() {
        let succ = successors(t, limits);
        assert_eq!(succ.len(), enumerate_moves(t, limits).len());
        for (m, s) in succ {
            assert_eq!(apply_move(t, &m).unwrap(), s);
        }
    }
}

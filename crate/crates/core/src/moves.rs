//! Tree modifications induced by crossing the E (elliptic tangency) and H
//! (hyperbolic tangency) strata, their inverses, and move enumeration.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::canonical_code_unchecked;
use crate::tree::{fresh_id, DoublePointTree, Edge, Rooted, ValidationReport, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Parallel,
    Sequential,
}

/// How one edge of an H-move pair is split. For a parallel split of (v,w)
/// the reattached edges are incident to w; for a sequential split, to v.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitSpec {
    pub kind: SplitKind,
    #[serde(default)]
    pub reattach: Vec<String>,
}

impl SplitSpec {
    pub fn parallel() -> Self {
        SplitSpec {
            kind: SplitKind::Parallel,
            reattach: Vec::new(),
        }
    }

    pub fn sequential() -> Self {
        SplitSpec {
            kind: SplitKind::Sequential,
            reattach: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Move {
    /// Adds leaves of degree `d1`, `d2` below `v1`, `v2` (which may coincide),
    /// joined by a new conjugate pair.
    EBirth { v1: String, v2: String, d1: i64, d2: i64 },
    /// Removes a conjugate pair whose heads are leaves.
    EDeath { pair: [String; 2] },
    /// Splits `pair[0]` by `side1`, then `pair[1]` by `side2`; the two new
    /// edges form a new pair.
    HMove {
        pair: [String; 2],
        side1: SplitSpec,
        side2: SplitSpec,
    },
    /// Undoes an H-move: folds `pair[1]` onto `onto[1]`, then `pair[0]` onto
    /// `onto[0]`.
    HMerge { pair: [String; 2], onto: [String; 2] },
}

impl Move {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Move::EBirth { .. } => "EBirth",
            Move::EDeath { .. } => "EDeath",
            Move::HMove { .. } => "HMove",
            Move::HMerge { .. } => "HMerge",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("input tree is invalid: {0}")]
    InvalidInput(ValidationReport),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("move yields an invalid tree: {0}")]
    InvalidResult(ValidationReport),
}

impl MoveError {
    pub fn is_input_error(&self) -> bool {
        matches!(self, MoveError::UnknownVertex(_) | MoveError::UnknownEdge(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveLimits {
    /// Reattachment subsets are enumerated only at vertices with at most this
    /// many incident edges; elsewhere only the empty subset is tried.
    pub max_reattach_degree: usize,
}

impl Default for MoveLimits {
    fn default() -> Self {
        MoveLimits { max_reattach_degree: 8 }
    }
}

/// Applies `m`, rejecting invalid input, failed preconditions and invalid
/// results.
pub fn apply_move(tree: &DoublePointTree, m: &Move) -> Result<DoublePointTree, MoveError> {
    require_valid(tree)?;
    apply_unchecked(tree, m).map(|(t, _)| t)
}

/// The move that undoes `m` on `tree_before`.
pub fn invert_move(tree_before: &DoublePointTree, m: &Move) -> Result<Move, MoveError> {
    require_valid(tree_before)?;
    let (after, applied) = apply_unchecked(tree_before, m)?;
    Ok(match (m, applied) {
        (Move::EBirth { .. }, Applied::NewPair(a, b)) => Move::EDeath {
            pair: [after.edges[a].id.clone(), after.edges[b].id.clone()],
        },
        (Move::EDeath { pair }, _) => {
            let e1 = edge(tree_before, &pair[0])?;
            let e2 = edge(tree_before, &pair[1])?;
            let (x, y) = (&tree_before.edges[e1], &tree_before.edges[e2]);
            Move::EBirth {
                v1: tree_before.vertices[x.tail].id.clone(),
                v2: tree_before.vertices[y.tail].id.clone(),
                d1: tree_before.vertices[x.head].delta,
                d2: tree_before.vertices[y.head].delta,
            }
        }
        (Move::HMove { pair, .. }, Applied::NewPair(a, b)) => Move::HMerge {
            pair: [after.edges[a].id.clone(), after.edges[b].id.clone()],
            onto: pair.clone(),
        },
        (Move::HMerge { .. }, Applied::Forward(forward)) => forward,
        _ => unreachable!("apply reports the matching shape"),
    })
}

/// All applicable moves in a deterministic order.
pub fn enumerate_moves(tree: &DoublePointTree, limits: MoveLimits) -> Vec<Move> {
    successors(tree, limits).into_iter().map(|(m, _)| m).collect()
}

/// All applicable moves together with the trees they produce. Returns an
/// empty list for an invalid tree.
pub fn successors(tree: &DoublePointTree, limits: MoveLimits) -> Vec<(Move, DoublePointTree)> {
    let mut out = Vec::new();
    if !tree.is_valid() {
        return out;
    }
    births(tree, &mut out);
    deaths(tree, &mut out);
    h_moves(tree, limits, &mut out);
    h_merges(tree, &mut out);
    out
}

enum Applied {
    NewPair(usize, usize),
    Removed,
    Forward(Move),
}

fn require_valid(tree: &DoublePointTree) -> Result<(), MoveError> {
    let report = tree.validate();
    if report.ok {
        Ok(())
    } else {
        Err(MoveError::InvalidInput(report))
    }
}

fn vertex(tree: &DoublePointTree, id: &str) -> Result<usize, MoveError> {
    tree.vertex_index(id)
        .ok_or_else(|| MoveError::UnknownVertex(id.to_string()))
}

fn edge(tree: &DoublePointTree, id: &str) -> Result<usize, MoveError> {
    tree.edge_index(id)
        .ok_or_else(|| MoveError::UnknownEdge(id.to_string()))
}

fn distinct_count(values: &[i64]) -> usize {
    let set: HashSet<i64> = values.iter().copied().collect();
    set.len()
}

/// Degree rule shared by births and deaths: each new leaf differs from its
/// attachment vertex by 2, the attachment vertices differ by at most 2, and
/// exactly two degree values occur among the four vertices.
fn e_degrees_ok(dv1: i64, dv2: i64, d1: i64, d2: i64) -> bool {
    let diff = |a: i64, b: i64| (i128::from(a) - i128::from(b)).abs();
    diff(d1, dv1) == 2
        && diff(d2, dv2) == 2
        && matches!(diff(dv1, dv2), 0 | 2)
        && distinct_count(&[dv1, dv2, d1, d2]) == 2
}

fn h_degrees_ok(tree: &DoublePointTree, a1: usize, a2: usize) -> bool {
    let (x, y) = (&tree.edges[a1], &tree.edges[a2]);
    distinct_count(&[
        tree.delta(x.tail),
        tree.delta(x.head),
        tree.delta(y.tail),
        tree.delta(y.head),
    ]) == 2
}

fn checked_result(tree: DoublePointTree) -> Result<DoublePointTree, MoveError> {
    let report = tree.validate();
    if report.ok {
        Ok(tree)
    } else {
        Err(MoveError::InvalidResult(report))
    }
}

fn apply_unchecked(tree: &DoublePointTree, m: &Move) -> Result<(DoublePointTree, Applied), MoveError> {
    match m {
        Move::EBirth { v1, v2, d1, d2 } => {
            let (i1, i2) = (vertex(tree, v1)?, vertex(tree, v2)?);
            if !e_degrees_ok(tree.delta(i1), tree.delta(i2), *d1, *d2) {
                return Err(MoveError::Precondition(format!(
                    "degrees {}, {} -> {d1}, {d2} violate the E-move rule",
                    tree.delta(i1),
                    tree.delta(i2)
                )));
            }
            let (t, a, b) = birth(tree, i1, i2, *d1, *d2);
            Ok((checked_result(t)?, Applied::NewPair(a, b)))
        }
        Move::EDeath { pair } => {
            let (e1, e2) = (edge(tree, &pair[0])?, edge(tree, &pair[1])?);
            death_precondition(tree, e1, e2)?;
            Ok((checked_result(death(tree, e1, e2))?, Applied::Removed))
        }
        Move::HMove { pair, side1, side2 } => {
            let (a1, a2) = (edge(tree, &pair[0])?, edge(tree, &pair[1])?);
            if tree.partner(a1) != Some(a2) || a1 == a2 {
                return Err(MoveError::Precondition(format!(
                    "`{}` and `{}` are not conjugate",
                    pair[0], pair[1]
                )));
            }
            if !h_degrees_ok(tree, a1, a2) {
                return Err(MoveError::Precondition(
                    "the pair's endpoints do not carry exactly two degrees".into(),
                ));
            }
            let mut work = tree.clone();
            let r1 = resolve_ids(&work, &side1.reattach)?;
            let n1 = split(&mut work, a1, side1.kind, &r1, a2)?;
            let r2 = resolve_ids(&work, &side2.reattach)?;
            let n2 = split(&mut work, a2, side2.kind, &r2, a1)?;
            work.partner[n1] = Some(n2);
            work.partner[n2] = Some(n1);
            Ok((checked_result(work)?, Applied::NewPair(n1, n2)))
        }
        Move::HMerge { pair, onto } => {
            let (merged, forward) = h_merge(tree, pair, onto)?;
            Ok((merged, Applied::Forward(forward)))
        }
    }
}

fn birth(tree: &DoublePointTree, v1: usize, v2: usize, d1: i64, d2: i64) -> (DoublePointTree, usize, usize) {
    let mut t = tree.clone();
    let w1 = push_vertex(&mut t, d1);
    let w2 = push_vertex(&mut t, d2);
    let a = push_edge(&mut t, v1, w1);
    let b = push_edge(&mut t, v2, w2);
    t.partner[a] = Some(b);
    t.partner[b] = Some(a);
    (t, a, b)
}

fn death_precondition(tree: &DoublePointTree, e1: usize, e2: usize) -> Result<(), MoveError> {
    if tree.partner(e1) != Some(e2) || e1 == e2 {
        return Err(MoveError::Precondition(format!(
            "`{}` and `{}` are not conjugate",
            tree.edges[e1].id, tree.edges[e2].id
        )));
    }
    let (x, y) = (&tree.edges[e1], &tree.edges[e2]);
    if tree.degree(x.head) != 1 || tree.degree(y.head) != 1 {
        return Err(MoveError::Precondition("both heads must be leaves".into()));
    }
    if !e_degrees_ok(
        tree.delta(x.tail),
        tree.delta(y.tail),
        tree.delta(x.head),
        tree.delta(y.head),
    ) {
        return Err(MoveError::Precondition(
            "degrees of the pair violate the E-move rule".into(),
        ));
    }
    Ok(())
}

fn death(tree: &DoublePointTree, e1: usize, e2: usize) -> DoublePointTree {
    let heads = [tree.edges[e1].head, tree.edges[e2].head];
    remove(tree, &heads, &[e1, e2])
}

fn push_vertex(t: &mut DoublePointTree, delta: i64) -> usize {
    let id = fresh_id("v", t.vertices.len(), t.vertices.iter().map(|v| v.id.as_str()));
    t.vertices.push(Vertex { id, delta });
    t.vertices.len() - 1
}

fn push_edge(t: &mut DoublePointTree, tail: usize, head: usize) -> usize {
    let id = fresh_id("e", t.edges.len(), t.edges.iter().map(|e| e.id.as_str()));
    t.edges.push(Edge { id, tail, head });
    t.partner.push(None);
    t.edges.len() - 1
}

/// Drops the listed vertices and edges, renumbering what remains.
fn remove(tree: &DoublePointTree, vertices: &[usize], edges: &[usize]) -> DoublePointTree {
    let mut vmap = vec![usize::MAX; tree.vertices.len()];
    let mut vs = Vec::new();
    for (i, v) in tree.vertices.iter().enumerate() {
        if !vertices.contains(&i) {
            vmap[i] = vs.len();
            vs.push(v.clone());
        }
    }
    let mut emap = vec![usize::MAX; tree.edges.len()];
    let mut es = Vec::new();
    for (i, e) in tree.edges.iter().enumerate() {
        if !edges.contains(&i) {
            emap[i] = es.len();
            es.push(Edge {
                id: e.id.clone(),
                tail: vmap[e.tail],
                head: vmap[e.head],
            });
        }
    }
    let partner = (0..tree.edges.len())
        .filter(|i| !edges.contains(i))
        .map(|i| tree.partner[i].map(|p| emap[p]))
        .collect();
    DoublePointTree::from_raw(vs, es, partner)
}

fn resolve_ids(tree: &DoublePointTree, ids: &[String]) -> Result<Vec<usize>, MoveError> {
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let e = edge(tree, id)?;
        if out.contains(&e) {
            return Err(MoveError::Precondition(format!("edge `{id}` listed twice")));
        }
        out.push(e);
    }
    Ok(out)
}

/// First edge on the path from `v` towards edge `target` (the target itself
/// when it touches `v`). The graph must be a tree.
fn first_edge_towards(t: &DoublePointTree, v: usize, target: usize) -> usize {
    let goal = &t.edges[target];
    if goal.tail == v || goal.head == v {
        return target;
    }
    let n = t.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for (i, e) in t.edges.iter().enumerate() {
        adj[e.tail].push((i, e.head));
        adj[e.head].push((i, e.tail));
    }
    let mut first = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut queue = std::collections::VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for &(e, y) in &adj[x] {
            if seen[y] {
                continue;
            }
            seen[y] = true;
            first[y] = if x == v { e } else { first[x] };
            if y == goal.tail || y == goal.head {
                return first[y];
            }
            queue.push_back(y);
        }
    }
    unreachable!("tree is connected")
}

/// Splits edge `a` in place and returns the index of the added edge.
/// `other` is the current conjugate of `a`.
fn split(
    t: &mut DoublePointTree,
    a: usize,
    kind: SplitKind,
    reattach: &[usize],
    other: usize,
) -> Result<usize, MoveError> {
    let (v, w) = (t.edges[a].tail, t.edges[a].head);
    let pivot = match kind {
        SplitKind::Parallel => w,
        SplitKind::Sequential => v,
    };
    for &r in reattach {
        let e = &t.edges[r];
        if r == a || (e.tail != pivot && e.head != pivot) {
            return Err(MoveError::Precondition(format!(
                "edge `{}` cannot be reattached when splitting `{}`",
                e.id, t.edges[a].id
            )));
        }
    }
    match kind {
        SplitKind::Parallel => {
            let w2 = push_vertex(t, t.vertices[w].delta);
            let n = push_edge(t, v, w2);
            move_endpoints(t, reattach, w, w2);
            Ok(n)
        }
        SplitKind::Sequential => {
            let flip = reattach.contains(&first_edge_towards(t, v, other));
            let z = push_vertex(t, t.vertices[v].delta);
            let n = push_edge(t, w, z);
            move_endpoints(t, reattach, v, z);
            if flip {
                t.edges[a].tail = w;
                t.edges[a].head = v;
                t.edges[n].tail = z;
                t.edges[n].head = w;
            }
            Ok(n)
        }
    }
}

fn move_endpoints(t: &mut DoublePointTree, edges: &[usize], from: usize, to: usize) {
    for &r in edges {
        let e = &mut t.edges[r];
        if e.tail == from {
            e.tail = to;
        } else if e.head == from {
            e.head = to;
        }
    }
}

/// Folds both new edges back and checks that some H-move re-creates the
/// input; returns the merged tree and that H-move.
fn h_merge(
    tree: &DoublePointTree,
    pair: &[String; 2],
    onto: &[String; 2],
) -> Result<(DoublePointTree, Move), MoveError> {
    let (n1, n2) = (edge(tree, &pair[0])?, edge(tree, &pair[1])?);
    let (a1, a2) = (edge(tree, &onto[0])?, edge(tree, &onto[1])?);
    if tree.partner(n1) != Some(n2) || tree.partner(a1) != Some(a2) {
        return Err(MoveError::Precondition(
            "merge edges must form two conjugate pairs".into(),
        ));
    }
    let all = [n1, n2, a1, a2];
    if (0..4).any(|i| (i + 1..4).any(|j| all[i] == all[j])) {
        return Err(MoveError::Precondition(
            "merge edges must be four distinct edges".into(),
        ));
    }
    if !h_degrees_ok(tree, a1, a2) {
        return Err(MoveError::Precondition(
            "the pair's endpoints do not carry exactly two degrees".into(),
        ));
    }

    let mut work = tree.clone();
    let mut gone_v = Vec::new();
    let (x2, moved2) = fold(&work, n2, a2)?;
    move_endpoints(&mut work, &moved2, x2.0, x2.1);
    gone_v.push(x2.0);
    let (x1, moved1) = fold(&work, n1, a1)?;
    move_endpoints(&mut work, &moved1, x1.0, x1.1);
    gone_v.push(x1.0);
    let names = |ids: &[usize]| -> Vec<String> { ids.iter().map(|&e| tree.edges[e].id.clone()).collect() };
    // n2 does not exist yet when the forward move's first split runs; the
    // second split re-creates it at the right place.
    let moved1: Vec<usize> = moved1.into_iter().filter(|&e| e != n2).collect();
    let (r1, mut r2) = (names(&moved1), names(&moved2));

    let mut merged = remove(&work, &gone_v, &[n1, n2]);
    let (b1, b2) = (edge(&merged, &onto[0])?, edge(&merged, &onto[1])?);
    if merged.is_valid_shape() {
        let rooted = Rooted::new(&merged);
        for (b, p) in [(b1, b2), (b2, b1)] {
            let tail = rooted.forced_tail(&merged, b, p);
            let head = merged.other_end(b, tail);
            merged.edges[b].tail = tail;
            merged.edges[b].head = head;
        }
    }
    let merged = checked_result(merged)?;

    // The forward move's first split creates an edge whose fresh id may
    // differ from the folded one.
    let created = fresh_id("e", merged.edges.len(), merged.edges.iter().map(|e| e.id.as_str()));
    for id in &mut r2 {
        if *id == pair[0] {
            id.clone_from(&created);
        }
    }
    let target = canonical_code_unchecked(tree);
    for k1 in [SplitKind::Parallel, SplitKind::Sequential] {
        for k2 in [SplitKind::Parallel, SplitKind::Sequential] {
            let forward = Move::HMove {
                pair: onto.clone(),
                side1: SplitSpec {
                    kind: k1,
                    reattach: r1.clone(),
                },
                side2: SplitSpec {
                    kind: k2,
                    reattach: r2.clone(),
                },
            };
            if let Ok((t, _)) = apply_unchecked(&merged, &forward) {
                if canonical_code_unchecked(&t) == target {
                    return Ok((merged, forward));
                }
            }
        }
    }
    Err(MoveError::Precondition("the merge does not undo any H-move".into()))
}

/// For new edge `n` folded onto `a`: returns ((x, y), edges to move from x to
/// y), where x is the end of `n` not shared with `a` and y the end of `a` not
/// shared with `n`.
fn fold(t: &DoublePointTree, n: usize, a: usize) -> Result<((usize, usize), Vec<usize>), MoveError> {
    let (en, ea) = (&t.edges[n], &t.edges[a]);
    let shared: Vec<usize> = [en.tail, en.head]
        .into_iter()
        .filter(|&x| x == ea.tail || x == ea.head)
        .collect();
    if shared.len() != 1 {
        return Err(MoveError::Precondition(format!(
            "`{}` and `{}` must share exactly one vertex",
            en.id, ea.id
        )));
    }
    let x = t.other_end(n, shared[0]);
    let y = t.other_end(a, shared[0]);
    if t.delta(x) != t.delta(y) {
        return Err(MoveError::Precondition(format!(
            "cannot fold `{}` onto `{}`: degrees differ",
            en.id, ea.id
        )));
    }
    let moved = t.incident(x).into_iter().filter(|&e| e != n).collect();
    Ok(((x, y), moved))
}

impl DoublePointTree {
    /// Connected and acyclic (ignoring pairing and degrees).
    fn is_valid_shape(&self) -> bool {
        use crate::tree::Rule;
        !self
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v.rule, Rule::Cycle | Rule::Disconnected | Rule::Empty))
    }
}

fn births(tree: &DoublePointTree, out: &mut Vec<(Move, DoublePointTree)>) {
    let n = tree.vertex_count();
    for i1 in 0..n {
        for i2 in 0..n {
            let (dv1, dv2) = (tree.delta(i1), tree.delta(i2));
            for d1 in [dv1.checked_sub(2), dv1.checked_add(2)].into_iter().flatten() {
                for d2 in [dv2.checked_sub(2), dv2.checked_add(2)].into_iter().flatten() {
                    if !e_degrees_ok(dv1, dv2, d1, d2) {
                        continue;
                    }
                    let (t, _, _) = birth(tree, i1, i2, d1, d2);
                    debug_assert!(t.is_valid());
                    out.push((
                        Move::EBirth {
                            v1: tree.vertices[i1].id.clone(),
                            v2: tree.vertices[i2].id.clone(),
                            d1,
                            d2,
                        },
                        t,
                    ));
                }
            }
        }
    }
}

fn deaths(tree: &DoublePointTree, out: &mut Vec<(Move, DoublePointTree)>) {
    for (e1, e2) in tree.pairs() {
        if death_precondition(tree, e1, e2).is_ok() {
            let t = death(tree, e1, e2);
            debug_assert!(t.is_valid());
            out.push((
                Move::EDeath {
                    pair: [tree.edges[e1].id.clone(), tree.edges[e2].id.clone()],
                },
                t,
            ));
        }
    }
}

/// Subsets of `items` in a fixed order (by bitmask).
fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u64..(1u64 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

fn reattach_choices(t: &DoublePointTree, a: usize, kind: SplitKind, limits: MoveLimits) -> Vec<Vec<usize>> {
    let pivot = match kind {
        SplitKind::Parallel => t.edges[a].head,
        SplitKind::Sequential => t.edges[a].tail,
    };
    let incident = t.incident(pivot);
    if incident.len() > limits.max_reattach_degree {
        return vec![Vec::new()];
    }
    let candidates: Vec<usize> = incident.into_iter().filter(|&e| e != a).collect();
    subsets(&candidates)
}

fn h_moves(tree: &DoublePointTree, limits: MoveLimits, out: &mut Vec<(Move, DoublePointTree)>) {
    let kinds = [SplitKind::Parallel, SplitKind::Sequential];
    for a1 in 0..tree.edge_count() {
        let a2 = tree.partner(a1).expect("valid tree is fully paired");
        if !h_degrees_ok(tree, a1, a2) {
            continue;
        }
        for k1 in kinds {
            for r1 in reattach_choices(tree, a1, k1, limits) {
                let mut first = tree.clone();
                let n1 = split(&mut first, a1, k1, &r1, a2).expect("reattach set is admissible");
                let side1 = SplitSpec {
                    kind: k1,
                    reattach: r1.iter().map(|&e| first.edges[e].id.clone()).collect(),
                };
                for k2 in kinds {
                    for r2 in reattach_choices(&first, a2, k2, limits) {
                        let mut second = first.clone();
                        let n2 = split(&mut second, a2, k2, &r2, a1).expect("reattach set is admissible");
                        second.partner[n1] = Some(n2);
                        second.partner[n2] = Some(n1);
                        if !second.is_valid() {
                            continue;
                        }
                        out.push((
                            Move::HMove {
                                pair: [tree.edges[a1].id.clone(), tree.edges[a2].id.clone()],
                                side1: side1.clone(),
                                side2: SplitSpec {
                                    kind: k2,
                                    reattach: r2.iter().map(|&e| first.edges[e].id.clone()).collect(),
                                },
                            },
                            second,
                        ));
                    }
                }
            }
        }
    }
}

fn h_merges(tree: &DoublePointTree, out: &mut Vec<(Move, DoublePointTree)>) {
    for n1 in 0..tree.edge_count() {
        let n2 = tree.partner(n1).expect("valid tree is fully paired");
        let ends = [tree.edges[n1].tail, tree.edges[n1].head];
        for a1 in 0..tree.edge_count() {
            if a1 == n1 || a1 == n2 {
                continue;
            }
            let a2 = tree.partner(a1).expect("valid tree is fully paired");
            if a2 == n1 || a2 == n2 {
                continue;
            }
            let ea = &tree.edges[a1];
            if !ends.contains(&ea.tail) && !ends.contains(&ea.head) {
                continue;
            }
            let pair = [tree.edges[n1].id.clone(), tree.edges[n2].id.clone()];
            let onto = [tree.edges[a1].id.clone(), tree.edges[a2].id.clone()];
            if let Ok((t, _)) = h_merge(tree, &pair, &onto) {
                out.push((Move::HMerge { pair, onto }, t));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::invariant::{invariant_of, InvariantVector};

    fn point() -> DoublePointTree {
        DoublePointTree::from_parts(&[("v", 1)], &[], &[]).unwrap()
    }

    fn j_tree() -> DoublePointTree {
        DoublePointTree::from_parts(
            &[("v", 3), ("w1", 1), ("w2", 1)],
            &[("e1", "v", "w1"), ("e2", "v", "w2")],
            &[("e1", "e2")],
        )
        .unwrap()
    }

    fn birth_move(d1: i64, d2: i64) -> Move {
        Move::EBirth {
            v1: "v".into(),
            v2: "v".into(),
            d1,
            d2,
        }
    }

    #[test]
    fn birth_on_a_point() {
        let t = apply_move(&point(), &birth_move(3, 3)).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.indegree("v").unwrap(), 0);
        assert_eq!(invariant_of(&t).unwrap(), InvariantVector::basis(1));
        assert!(matches!(
            apply_move(&point(), &birth_move(3, -1)),
            Err(MoveError::Precondition(_))
        ));
    }

    #[test]
    fn death_undoes_birth() {
        let t = apply_move(&point(), &birth_move(3, 3)).unwrap();
        let inv = invert_move(&point(), &birth_move(3, 3)).unwrap();
        assert!(matches!(inv, Move::EDeath { .. }));
        let back = apply_move(&t, &inv).unwrap();
        assert!(isomorphic(&back, &point()).unwrap());
    }

    #[test]
    fn point_has_exactly_two_moves() {
        let moves = enumerate_moves(&point(), MoveLimits::default());
        assert_eq!(moves, vec![birth_move(-1, -1), birth_move(3, 3)]);
    }

    #[test]
    fn parallel_h_move_on_j() {
        let m = Move::HMove {
            pair: ["e1".into(), "e2".into()],
            side1: SplitSpec::parallel(),
            side2: SplitSpec::parallel(),
        };
        let t = apply_move(&j_tree(), &m).unwrap();
        assert_eq!(t.vertex_count(), 5);
        assert_eq!(t.degree(0), 4);
        assert!(t.vertices().iter().skip(1).all(|v| v.delta == 1));
        assert_eq!(t.pairs().len(), 2);
        assert_eq!(invariant_of(&t).unwrap(), InvariantVector::basis(3));
        let inv = invert_move(&j_tree(), &m).unwrap();
        assert!(matches!(inv, Move::HMerge { .. }));
        assert!(isomorphic(&apply_move(&t, &inv).unwrap(), &j_tree()).unwrap());
    }

    #[test]
    fn j_admits_all_four_kind_combinations() {
        let moves = enumerate_moves(&j_tree(), MoveLimits::default());
        let mut kinds = HashSet::new();
        for m in &moves {
            if let Move::HMove { side1, side2, .. } = m {
                if side1.reattach.is_empty() && side2.reattach.is_empty() {
                    kinds.insert((side1.kind, side2.kind));
                }
            }
        }
        assert_eq!(kinds.len(), 4);
    }

    #[test]
    fn sequential_flip_rule() {
        // Sequential split of e1 = (v, w1) reattaching e2, the first edge
        // towards the conjugate, reverses e1 and the new edge.
        let m = Move::HMove {
            pair: ["e1".into(), "e2".into()],
            side1: SplitSpec {
                kind: SplitKind::Sequential,
                reattach: vec!["e2".into()],
            },
            side2: SplitSpec::parallel(),
        };
        let mut t = j_tree();
        let r = resolve_ids(&t, &["e2".to_string()]).unwrap();
        let n = split(&mut t, 0, SplitKind::Sequential, &r, 1).unwrap();
        let (v, w1) = (0, 1);
        assert_eq!((t.edges[0].tail, t.edges[0].head), (w1, v));
        assert_eq!(t.edges[n].head, w1);
        // The full move either validates or is rejected as inapplicable.
        match apply_move(&j_tree(), &m) {
            Ok(t) => assert_eq!(invariant_of(&t).unwrap(), InvariantVector::basis(3)),
            Err(e) => assert!(matches!(e, MoveError::InvalidResult(_))),
        }
    }

    #[test]
    fn death_counts_match_leaf_pairs() {
        let two = apply_move(&point(), &birth_move(3, 3)).unwrap();
        let moves = enumerate_moves(&two, MoveLimits::default());
        let deaths = moves.iter().filter(|m| matches!(m, Move::EDeath { .. })).count();
        assert_eq!(deaths, 1);
    }

    #[test]
    fn reattach_must_touch_pivot() {
        let m = Move::HMove {
            pair: ["e1".into(), "e2".into()],
            side1: SplitSpec {
                kind: SplitKind::Parallel,
                reattach: vec!["e2".into()],
            },
            side2: SplitSpec::parallel(),
        };
        assert!(matches!(apply_move(&j_tree(), &m), Err(MoveError::Precondition(_))));
        let unknown = Move::EDeath {
            pair: ["e1".into(), "nope".into()],
        };
        assert!(apply_move(&j_tree(), &unknown).unwrap_err().is_input_error());
    }

    #[test]
    fn json_shape() {
        let m = Move::HMove {
            pair: ["a".into(), "b".into()],
            side1: SplitSpec::parallel(),
            side2: SplitSpec {
                kind: SplitKind::Sequential,
                reattach: vec!["c".into()],
            },
        };
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"type":"HMove","pair":["a","b"],"side1":{"kind":"parallel","reattach":[]},"side2":{"kind":"sequential","reattach":["c"]}}"#
        );
        assert_eq!(serde_json::from_str::<Move>(&text).unwrap(), m);
    }
}

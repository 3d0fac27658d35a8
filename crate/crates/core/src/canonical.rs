//! Isomorphism-invariant encoding of double point trees.
//!
//! The tree is viewed as a coloured graph on vertices and edges (edges become
//! nodes linked to their tail, head and conjugate). A canonical labelling is
//! found by individualisation-refinement: colour refinement splits nodes by
//! their neighbourhoods, and remaining ties are broken by trying every member
//! of the first non-singleton cell, keeping the smallest certificate.
//! Automorphisms discovered along the way prune equivalent branches.

use std::fmt;

use crate::tree::{DoublePointTree, TreeError};

/// Opaque, totally ordered fingerprint. Equal codes mean isomorphic trees.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub fn canonical_code(tree: &DoublePointTree) -> Result<CanonicalCode, TreeError> {
    tree.require_valid()?;
    Ok(canonical_code_unchecked(tree))
}

pub fn isomorphic(t1: &DoublePointTree, t2: &DoublePointTree) -> Result<bool, TreeError> {
    Ok(canonical_code(t1)? == canonical_code(t2)?)
}

const OUT: u8 = 0;
const IN: u8 = 1;
const TAIL: u8 = 2;
const HEAD: u8 = 3;
const CONJUGATE: u8 = 4;

pub(crate) fn canonical_code_unchecked(tree: &DoublePointTree) -> CanonicalCode {
    let nv = tree.vertex_count();
    let ne = tree.edge_count();
    let n = nv + ne;
    let mut adj: Vec<Vec<(u8, usize)>> = vec![Vec::new(); n];
    for (i, e) in tree.edges().iter().enumerate() {
        let node = nv + i;
        adj[e.tail].push((OUT, node));
        adj[e.head].push((IN, node));
        adj[node].push((TAIL, e.tail));
        adj[node].push((HEAD, e.head));
        if let Some(p) = tree.partner(i) {
            adj[node].push((CONJUGATE, nv + p));
        }
    }
    let keys: Vec<(u8, i64)> = (0..n)
        .map(|i| if i < nv { (0, tree.delta(i)) } else { (1, 0) })
        .collect();
    let mut colors = rank(&keys);
    refine(&adj, &mut colors);

    let mut search = Search {
        tree,
        adj: &adj,
        best: None,
        automorphisms: Vec::new(),
    };
    search.run(colors, &mut Vec::new());
    let (cert, _) = search.best.expect("search always reaches a leaf");
    let mut bytes = Vec::with_capacity(cert.len());
    for x in cert {
        push_varint(&mut bytes, x);
    }
    CanonicalCode(bytes)
}

fn push_varint(out: &mut Vec<u8>, x: i64) {
    let mut z = ((x << 1) ^ (x >> 63)) as u64;
    loop {
        let byte = (z & 0x7f) as u8;
        z >>= 7;
        if z == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

/// Replaces each key by the rank of its value among the distinct keys.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut distinct: Vec<K> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter()
        .map(|k| distinct.binary_search(k).expect("key present") as u32)
        .collect()
}

fn cell_count(colors: &[u32]) -> usize {
    colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

fn refine(adj: &[Vec<(u8, usize)>], colors: &mut Vec<u32>) {
    let mut cells = cell_count(colors);
    loop {
        let sigs: Vec<(u32, Vec<(u8, u32)>)> = (0..colors.len())
            .map(|i| {
                let mut nb: Vec<(u8, u32)> = adj[i].iter().map(|&(l, j)| (l, colors[j])).collect();
                nb.sort_unstable();
                (colors[i], nb)
            })
            .collect();
        let next = rank(&sigs);
        let next_cells = cell_count(&next);
        *colors = next;
        if next_cells == cells {
            return;
        }
        cells = next_cells;
    }
}

struct Search<'a> {
    tree: &'a DoublePointTree,
    adj: &'a [Vec<(u8, usize)>],
    best: Option<(Vec<i64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<u32>, prefix: &mut Vec<usize>) {
        let n = colors.len();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(target) = sizes.iter().position(|&s| s > 1) else {
            self.leaf(&colors);
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&i| colors[i] as usize == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for x in members {
            if !tried.is_empty() && self.same_orbit(x, &tried, prefix) {
                continue;
            }
            tried.push(x);
            let keys: Vec<(u32, bool)> = (0..n).map(|i| (colors[i], i != x)).collect();
            let mut next = rank(&keys);
            refine(self.adj, &mut next);
            prefix.push(x);
            self.run(next, prefix);
            prefix.pop();
        }
    }

    /// Whether `x` is mapped onto an already explored node by the group
    /// generated by known automorphisms that fix the prefix pointwise.
    fn same_orbit(&self, x: usize, tried: &[usize], prefix: &[usize]) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for (i, &g) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, g));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rx = find(&mut parent, x);
        tried.iter().any(|&y| find(&mut parent, y) == rx)
    }

    fn leaf(&mut self, colors: &[u32]) {
        let n = colors.len();
        let nv = self.tree.vertex_count();
        let pos: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let mut inv = vec![0usize; n];
        for (node, &p) in pos.iter().enumerate() {
            inv[p] = node;
        }
        let mut cert = Vec::with_capacity(2 + nv + 3 * (n - nv));
        cert.push(nv as i64);
        cert.push((n - nv) as i64);
        for &node in &inv[..nv] {
            cert.push(self.tree.delta(node));
        }
        for &node in &inv[nv..] {
            let e = node - nv;
            let edge = &self.tree.edges()[e];
            cert.push(pos[edge.tail] as i64);
            cert.push(pos[edge.head] as i64);
            cert.push(self.tree.partner(e).map_or(-1, |p| pos[nv + p] as i64));
        }
        match &self.best {
            Some((best, _)) if cert > *best => {}
            Some((best, best_inv)) if cert == *best => {
                let mut gamma = vec![0usize; n];
                for p in 0..n {
                    gamma[best_inv[p]] = inv[p];
                }
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.automorphisms.push(gamma);
                }
            }
            _ => self.best = Some((cert, inv)),
        }
    }
}

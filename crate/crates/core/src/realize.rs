//! Explicit trees for every vector in the image: building blocks f_k with
//! F = e_k and g_k with F = 2e_1 - e_k, chained by connected sums.

use thiserror::Error;

use crate::invariant::{invariant_unchecked, InvariantVector};
use crate::tree::{DoublePointTree, Edge, TreeError, Vertex};

/// Largest |k| accepted for a building block; blocks grow linearly in |k|.
pub const MAX_BLOCK_INDEX: i64 = 1_000_001;

/// Largest number of blocks `realize` will chain.
pub const MAX_BLOCKS: i128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("block index {0} is even")]
    EvenIndex(i64),
    #[error("block index {0} exceeds the supported magnitude")]
    TooLarge(i64),
    #[error("realizing would need {0} blocks")]
    TooManyBlocks(i128),
    #[error("{0} is not in the image (needs odd support and coefficient sum 1)")]
    NotInImage(InvariantVector),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A building block with its two designated merge vertices (left, right).
/// They coincide for single-vertex blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub tree: DoublePointTree,
    pub merge: [String; 2],
}

fn check_index(k: i64) -> Result<(), RealizeError> {
    if k.rem_euclid(2) == 0 {
        return Err(RealizeError::EvenIndex(k));
    }
    if k.abs() > MAX_BLOCK_INDEX {
        return Err(RealizeError::TooLarge(k));
    }
    Ok(())
}

/// Path `p0..p{len-1}` with the given degrees; edge `x{i}` joins p_i and
/// p_{i+1} and runs left to right when `tail_is_left(i)`.
fn path(deltas: &[i64], tail_is_left: impl Fn(usize) -> bool, pairs: &[(usize, usize)]) -> DoublePointTree {
    let vertices = deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| Vertex {
            id: format!("p{i}"),
            delta,
        })
        .collect();
    let edges = (0..deltas.len().saturating_sub(1))
        .map(|i| {
            let (tail, head) = if tail_is_left(i) { (i, i + 1) } else { (i + 1, i) };
            Edge {
                id: format!("x{i}"),
                tail,
                head,
            }
        })
        .collect();
    let mut partner = vec![None; deltas.len().saturating_sub(1)];
    for &(a, b) in pairs {
        partner[a] = Some(b);
        partner[b] = Some(a);
    }
    DoublePointTree::from_raw(vertices, edges, partner)
}

/// f_k: the path 1, 3, ..., k, ..., 3, 1 (or through negative degrees for
/// k < 0), every edge pointing away from the centre, chords nested about it.
pub fn block_f(k: i64) -> Result<Block, RealizeError> {
    check_index(k)?;
    let m = ((k - 1).abs() / 2) as usize;
    let sign = if k >= 1 { 1 } else { -1 };
    let deltas: Vec<i64> = (0..=2 * m).map(|i| 1 + sign * 2 * (m - i.abs_diff(m)) as i64).collect();
    let pairs: Vec<(usize, usize)> = (0..m).map(|i| (i, 2 * m - 1 - i)).collect();
    let tree = path(&deltas, |i| i >= m, &pairs);
    debug_assert!(tree.is_valid());
    Ok(Block {
        tree,
        merge: ["p0".into(), format!("p{}", 2 * m)],
    })
}

/// g_k: the path k, ..., 1, ..., k, ..., 1, ..., k whose two degree-1
/// vertices are sources, chords nested about each source.
pub fn block_g(k: i64) -> Result<Block, RealizeError> {
    check_index(k)?;
    let m = ((k - 1).abs() / 2) as usize;
    if m == 0 {
        return block_f(1);
    }
    let sign = if k > 1 { 1 } else { -1 };
    let deltas: Vec<i64> = (0..=4 * m)
        .map(|i| 1 + sign * 2 * i.abs_diff(m).min(i.abs_diff(3 * m)) as i64)
        .collect();
    let mut pairs = Vec::with_capacity(2 * m);
    for j in 0..m {
        pairs.push((m - 1 - j, m + j));
        pairs.push((3 * m - 1 - j, 3 * m + j));
    }
    // Edges left of a source point left, edges right of it point right.
    let tree = path(&deltas, |i| (m..2 * m).contains(&i) || i >= 3 * m, &pairs);
    debug_assert!(tree.is_valid());
    Ok(Block {
        tree,
        merge: [format!("p{m}"), format!("p{}", 3 * m)],
    })
}

pub fn building_block_f(k: i64) -> Result<DoublePointTree, RealizeError> {
    block_f(k).map(|b| b.tree)
}

pub fn building_block_g(k: i64) -> Result<DoublePointTree, RealizeError> {
    block_g(k).map(|b| b.tree)
}

/// Splits h into positive parts `a` and negative parts `b` (with
/// multiplicity, ascending), so that h = sum e_a - sum e_b and |b| = |a| - 1.
pub fn decompose(h: &InvariantVector) -> Result<(Vec<i64>, Vec<i64>), RealizeError> {
    if !h.in_image() {
        return Err(RealizeError::NotInImage(h.clone()));
    }
    if h.l1() > MAX_BLOCKS {
        return Err(RealizeError::TooManyBlocks(h.l1()));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (&k, &c) in h.coefficients() {
        let target = if c > 0 { &mut a } else { &mut b };
        for _ in 0..c.unsigned_abs() {
            target.push(k);
        }
    }
    Ok((a, b))
}

/// A valid tree with invariant exactly `h`: f_{a1} # g_{b1} # f_{a2} # ... # f_{an}.
pub fn realize(h: &InvariantVector) -> Result<DoublePointTree, RealizeError> {
    let (a, b) = decompose(h)?;
    for &k in a.iter().chain(&b) {
        check_index(k)?;
    }
    let mut blocks = Vec::with_capacity(a.len() + b.len());
    for (l, &k) in a.iter().enumerate() {
        blocks.push(block_f(k)?);
        if let Some(&kb) = b.get(l) {
            blocks.push(block_g(kb)?);
        }
    }

    let mut chain: Option<(DoublePointTree, String)> = None;
    for (l, block) in blocks.into_iter().enumerate() {
        let prefix = format!("b{l}_");
        let tree = block
            .tree
            .relabeled(|v| format!("{prefix}{v}"), |e| format!("{prefix}{e}"));
        let [left, right] = block.merge.map(|v| format!("{prefix}{v}"));
        chain = Some(match chain {
            None => (tree, right),
            Some((acc, acc_right)) => {
                let sum = acc.connected_sum(&acc_right, &tree, &left)?;
                debug_assert_eq!(
                    invariant_unchecked(&sum.tree),
                    &(&invariant_unchecked(&acc) + &invariant_unchecked(&tree)) - &InvariantVector::basis(1)
                );
                let right = sum.vertex_map[&right].clone();
                (sum.tree, right)
            }
        });
    }
    let (tree, _) = chain.expect("image vectors have at least one positive part");
    assert_eq!(&invariant_unchecked(&tree), h, "realized tree has the wrong invariant");
    Ok(tree)
}

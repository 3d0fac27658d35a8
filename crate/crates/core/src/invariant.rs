//! The invariant F: for each odd k, the sum of `1 - indegree(v)` over the
//! vertices of degree k.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{DoublePointTree, TreeError};

/// A finitely supported integer vector indexed by integers. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InvariantVector {
    coefficients: BTreeMap<i64, i64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorError {
    #[error("integer overflow in vector arithmetic")]
    Overflow,
    #[error("cannot parse `{0}` as index:coefficient")]
    Parse(String),
}

impl InvariantVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector e_k.
    pub fn basis(k: i64) -> Self {
        let mut v = Self::default();
        v.coefficients.insert(k, 1);
        v
    }

    /// Builds a vector from (index, coefficient) pairs; repeated indices add up.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self, VectorError> {
        let mut v = Self::default();
        for (k, c) in pairs {
            v.add_at(k, c)?;
        }
        Ok(v)
    }

    fn add_at(&mut self, k: i64, c: i64) -> Result<(), VectorError> {
        let entry = self.coefficients.entry(k).or_insert(0);
        *entry = entry.checked_add(c).ok_or(VectorError::Overflow)?;
        if *entry == 0 {
            self.coefficients.remove(&k);
        }
        Ok(())
    }

    pub fn get(&self, k: i64) -> i64 {
        self.coefficients.get(&k).copied().unwrap_or(0)
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, i64> {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, VectorError> {
        let mut out = self.clone();
        for (&k, &c) in &other.coefficients {
            out.add_at(k, c)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, VectorError> {
        self.checked_add(&other.checked_scale(-1)?)
    }

    pub fn checked_scale(&self, factor: i64) -> Result<Self, VectorError> {
        let mut out = Self::default();
        for (&k, &c) in &self.coefficients {
            out.add_at(k, c.checked_mul(factor).ok_or(VectorError::Overflow)?)?;
        }
        Ok(out)
    }

    /// Moves the coefficient at k to -k.
    pub fn reverse(&self) -> Result<Self, VectorError> {
        let mut out = Self::default();
        for (&k, &c) in &self.coefficients {
            out.add_at(k.checked_neg().ok_or(VectorError::Overflow)?, c)?;
        }
        Ok(out)
    }

    /// Sum of all coefficients, widened so it cannot overflow.
    pub fn total(&self) -> i128 {
        self.coefficients.values().map(|&c| i128::from(c)).sum()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1(&self) -> i128 {
        self.coefficients.values().map(|&c| i128::from(c).abs()).sum()
    }

    /// Membership in the image set: odd support and coefficient sum exactly 1.
    pub fn in_image(&self) -> bool {
        self.coefficients.keys().all(|k| k.rem_euclid(2) == 1) && self.total() == 1
    }
}

/// Computes F for a valid tree.
pub fn invariant_of(tree: &DoublePointTree) -> Result<InvariantVector, TreeError> {
    tree.require_valid()?;
    Ok(invariant_unchecked(tree))
}

/// F by definition, without validating the tree first.
pub(crate) fn invariant_unchecked(tree: &DoublePointTree) -> InvariantVector {
    let mut indeg = vec![0i64; tree.vertex_count()];
    for e in tree.edges() {
        indeg[e.head] += 1;
    }
    let mut v = InvariantVector::default();
    for (i, vx) in tree.vertices().iter().enumerate() {
        // Each term is at least 1 - (n - 1), so this cannot overflow for any
        // tree that fits in memory.
        v.add_at(vx.delta, 1 - indeg[i]).expect("coefficient overflow");
    }
    v
}

impl Add for &InvariantVector {
    type Output = InvariantVector;

    /// Panics on overflow; use [`InvariantVector::checked_add`] to handle it.
    fn add(self, rhs: Self) -> InvariantVector {
        self.checked_add(rhs).expect("invariant vector overflow")
    }
}

impl Sub for &InvariantVector {
    type Output = InvariantVector;

    fn sub(self, rhs: Self) -> InvariantVector {
        self.checked_sub(rhs).expect("invariant vector overflow")
    }
}

impl Neg for &InvariantVector {
    type Output = InvariantVector;

    fn neg(self) -> InvariantVector {
        self.checked_scale(-1).expect("invariant vector overflow")
    }
}

impl Add for InvariantVector {
    type Output = InvariantVector;

    fn add(self, rhs: Self) -> InvariantVector {
        &self + &rhs
    }
}

impl Sub for InvariantVector {
    type Output = InvariantVector;

    fn sub(self, rhs: Self) -> InvariantVector {
        &self - &rhs
    }
}

/// Renders as `k:c` tokens sorted by index, e.g. `-1:2 3:1`.
impl fmt::Display for InvariantVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.coefficients {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{k}:{c}")?;
        }
        Ok(())
    }
}

/// Parses one `k:c` token.
pub fn parse_coefficient(token: &str) -> Result<(i64, i64), VectorError> {
    let err = || VectorError::Parse(token.to_string());
    let (k, c) = token.trim().split_once(':').ok_or_else(err)?;
    Ok((
        k.trim().parse().map_err(|_| err())?,
        c.trim().parse().map_err(|_| err())?,
    ))
}

impl FromStr for InvariantVector {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, VectorError> {
        let pairs = s
            .split_whitespace()
            .map(parse_coefficient)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_pairs(pairs)
    }
}

impl<'de> Deserialize<'de> for InvariantVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            coefficients: BTreeMap<i64, i64>,
        }
        let raw = Raw::deserialize(d)?;
        InvariantVector::from_pairs(raw.coefficients).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(i64, i64)]) -> InvariantVector {
        InvariantVector::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn arithmetic() {
        let b3 = InvariantVector::basis(3);
        let b1 = InvariantVector::basis(1);
        assert_eq!(&(&b3 + &b3) - &b1, v(&[(3, 2), (1, -1)]));
        let x = v(&[(3, 2), (-5, 7)]);
        assert!((&x + &x.checked_scale(-1).unwrap()).is_zero());
        assert_eq!(b1, v(&[(1, 1)]));
    }

    #[test]
    fn reverse() {
        assert_eq!(InvariantVector::basis(3).reverse().unwrap(), InvariantVector::basis(-3));
        let x = v(&[(3, 2), (-5, 7), (1, -1)]);
        assert_eq!(x.reverse().unwrap().reverse().unwrap(), x);
        assert!(InvariantVector::zero().reverse().unwrap().is_zero());
    }

    #[test]
    fn image_membership() {
        assert!(v(&[(1, 1)]).in_image());
        assert!(!v(&[(2, 1)]).in_image());
        assert!(!v(&[(3, 1), (1, 1)]).in_image());
        assert!(v(&[(3, 2), (1, -1)]).in_image());
        assert!(!InvariantVector::zero().in_image());
    }

    #[test]
    fn overflow_is_reported() {
        let big = v(&[(1, i64::MAX)]);
        assert_eq!(big.checked_add(&InvariantVector::basis(1)), Err(VectorError::Overflow));
        assert_eq!(big.checked_scale(2), Err(VectorError::Overflow));
        assert_eq!(InvariantVector::basis(i64::MIN).reverse(), Err(VectorError::Overflow));
    }

    #[test]
    fn text_form() {
        let x = v(&[(3, 1), (-1, 2)]);
        assert_eq!(x.to_string(), "-1:2 3:1");
        assert_eq!("-1:2 3:1".parse::<InvariantVector>().unwrap(), x);
        assert_eq!("3:1 3:-1".parse::<InvariantVector>().unwrap(), InvariantVector::zero());
        assert!("3".parse::<InvariantVector>().is_err());
    }

    #[test]
    fn json_form() {
        let x = v(&[(3, 1), (-1, 2)]);
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"coefficients":{"-1":2,"3":1}}"#);
        assert_eq!(serde_json::from_str::<InvariantVector>(&text).unwrap(), x);
        let with_zero: InvariantVector = serde_json::from_str(r#"{"coefficients":{"5":0,"1":1}}"#).unwrap();
        assert_eq!(with_zero, InvariantVector::basis(1));
    }

    #[test]
    fn invariant_of_small_trees() {
        let e = DoublePointTree::from_parts(&[("v", 1)], &[], &[]).unwrap();
        assert_eq!(invariant_of(&e).unwrap(), InvariantVector::basis(1));
        let j = DoublePointTree::from_parts(
            &[("v", 3), ("w1", 1), ("w2", 1)],
            &[("e1", "v", "w1"), ("e2", "v", "w2")],
            &[("e1", "e2")],
        )
        .unwrap();
        assert_eq!(invariant_of(&j).unwrap(), InvariantVector::basis(3));
        let bad = DoublePointTree::from_parts(&[("v", 2)], &[], &[]).unwrap();
        assert!(invariant_of(&bad).is_err());
    }
}

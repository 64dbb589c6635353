//! Symmetric-difference distance between binary trees and reconstruction of
//! a tree from its function space.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::discrete::{enumerate_space, space_size, FunctionSpace};
use crate::error::{Error, Result};
use crate::gf2::TruthTable;
use crate::tree::{standard_vars, Tree, TreeNode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDistance {
    pub t1: Tree,
    pub t2: Tree,
    pub intersection_size: BigUint,
    pub space_size: BigUint,
}

impl TreeDistance {
    /// `(|F1| - |F1 ∩ F2|) / |F1|`, reduced.
    pub fn distance(&self) -> BigRational {
        let num = &self.space_size - &self.intersection_size;
        BigRational::new(num.into(), self.space_size.clone().into())
    }

    /// Unreduced form, e.g. `224/520`.
    pub fn fraction(&self) -> String {
        format!(
            "{}/{}",
            &self.space_size - &self.intersection_size,
            self.space_size
        )
    }

    /// The distance rounded to four decimals.
    pub fn decimal(&self) -> f64 {
        let d = self.distance().to_f64().unwrap_or(f64::NAN);
        (d * 1e4).round() / 1e4
    }

    pub fn to_json(&self) -> Value {
        let big = |b: &BigUint| {
            b.to_u64()
                .map_or_else(|| json!(b.to_string()), |v| json!(v))
        };
        json!({
            "intersection": big(&self.intersection_size),
            "total": big(&self.space_size),
            "distance": self.fraction(),
            "decimal": self.decimal(),
        })
    }
}

fn check_labels(t1: &Tree, t2: &Tree) -> Result<()> {
    let a: BTreeSet<&String> = t1.vars().iter().collect();
    let b: BTreeSet<&String> = t2.vars().iter().collect();
    if a != b {
        return Err(Error::LabelMismatch(format!(
            "{:?} vs {:?}",
            t1.vars(),
            t2.vars()
        )));
    }
    Ok(())
}

fn from_spaces(s1: &FunctionSpace, s2: &FunctionSpace) -> Result<TreeDistance> {
    if s1.len() != s2.len() {
        return Err(Error::Internal(format!(
            "space sizes differ: {} vs {}",
            s1.len(),
            s2.len()
        )));
    }
    let (small, large) = if s1.len() <= s2.len() {
        (s1, s2)
    } else {
        (s2, s1)
    };
    let common = small
        .members
        .iter()
        .filter(|m| large.members.contains(*m))
        .count();
    Ok(TreeDistance {
        t1: s1.tree.clone(),
        t2: s2.tree.clone(),
        intersection_size: BigUint::from(common),
        space_size: BigUint::from(s1.len()),
    })
}

/// Distance between two binary trees over the same label set.
pub fn distance(t1: &Tree, t2: &Tree) -> Result<TreeDistance> {
    t1.require_binary_distinct()?;
    t2.require_binary_distinct()?;
    check_labels(t1, t2)?;
    let t2 = t2.with_var_order(t1.vars())?;
    from_spaces(&enumerate_space(t1)?, &enumerate_space(&t2)?)
}

/// Pairwise distances; every space is enumerated once.
pub fn distance_matrix(trees: &[Tree]) -> Result<Vec<Vec<BigRational>>> {
    let Some(first) = trees.first() else {
        return Ok(Vec::new());
    };
    let mut spaces = Vec::with_capacity(trees.len());
    for t in trees {
        t.require_binary_distinct()?;
        check_labels(first, t)?;
        spaces.push(enumerate_space(&t.with_var_order(first.vars())?)?);
    }
    let spaces = &spaces;
    let rows: Vec<Result<Vec<BigRational>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..spaces.len())
            .map(|i| {
                scope.spawn(move || {
                    (0..spaces.len())
                        .map(|j| from_spaces(&spaces[i], &spaces[j]).map(|d| d.distance()))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("distance worker panicked"))
            .collect()
    });
    rows.into_iter().collect()
}

/// `(x_a + x_b) x_c`.
fn witness(n: usize, a: usize, b: usize, c: usize) -> TruthTable {
    &(&TruthTable::var(n, a) ^ &TruthTable::var(n, b)) & &TruthTable::var(n, c)
}

/// Recovers the binary tree on `x1..xn` whose space is `members`.
pub fn reconstruct_tree(members: &HashSet<TruthTable>, n: usize) -> Result<Tree> {
    if n == 0 {
        return Err(Error::InvalidTree("a tree needs at least one leaf".into()));
    }
    if let Some(bad) = members.iter().find(|m| m.arity() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            found: bad.arity(),
        });
    }
    let expected = space_size(n as u32);
    if BigUint::from(members.len()) != expected {
        return Err(Error::InconsistentSpace(format!(
            "{} members, a tree space on {n} leaves has {expected}",
            members.len()
        )));
    }
    // outsider[a][b][c] for a < b < c
    let mut outsider = vec![vec![vec![usize::MAX; n]; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let hits: Vec<usize> = [(a, b, c), (b, c, a), (a, c, b)]
                    .into_iter()
                    .filter(|&(x, y, z)| members.contains(&witness(n, x, y, z)))
                    .map(|(_, _, z)| z)
                    .collect();
                if hits.len() != 1 {
                    return Err(Error::InconsistentSpace(format!(
                        "{} witnesses present for leaves x{}, x{}, x{}",
                        hits.len(),
                        a + 1,
                        b + 1,
                        c + 1
                    )));
                }
                outsider[a][b][c] = hits[0];
            }
        }
    }
    let out_of = |x: usize, y: usize, z: usize| {
        let mut s = [x, y, z];
        s.sort_unstable();
        outsider[s[0]][s[1]][s[2]]
    };
    let root = split((0..n).collect(), &out_of)?;
    let tree = Tree::new(root, standard_vars(n))?;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if tree.outsider_var(a, b, c)? != outsider[a][b][c] {
                    return Err(Error::InconsistentSpace(
                        "no tree realizes the outsider relation".into(),
                    ));
                }
            }
        }
    }
    Ok(tree.canonical_form())
}

/// Root bipartition: `a`, `b` share a root sub-tree iff some `c` is their outsider.
fn split(leaves: Vec<usize>, out_of: &impl Fn(usize, usize, usize) -> usize) -> Result<TreeNode> {
    match leaves.len() {
        1 => return Ok(TreeNode::Leaf(leaves[0])),
        2 => {
            return Ok(TreeNode::Node(vec![
                TreeNode::Leaf(leaves[0]),
                TreeNode::Leaf(leaves[1]),
            ]))
        }
        _ => {}
    }
    let k = leaves.len();
    let mut class: Vec<usize> = (0..k).collect();
    fn find(class: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while class[r] != r {
            r = class[r];
        }
        class[x] = r;
        r
    }
    for x in 0..k {
        for y in x + 1..k {
            let together = (0..k)
                .filter(|&z| z != x && z != y)
                .any(|z| out_of(leaves[x], leaves[y], leaves[z]) == leaves[z]);
            if together {
                let (rx, ry) = (find(&mut class, x), find(&mut class, y));
                class[rx] = ry;
            }
        }
    }
    let roots: BTreeSet<usize> = (0..k).map(|x| find(&mut class, x)).collect();
    if roots.len() != 2 {
        return Err(Error::InconsistentSpace(format!(
            "leaves {:?} do not split into two root sub-trees",
            leaves.iter().map(|v| v + 1).collect::<Vec<_>>()
        )));
    }
    let mut parts = Vec::with_capacity(2);
    for r in roots {
        let part: Vec<usize> = (0..k)
            .filter(|&x| find(&mut class, x) == r)
            .map(|x| leaves[x])
            .collect();
        parts.push(split(part, out_of)?);
    }
    Ok(TreeNode::Node(parts))
}

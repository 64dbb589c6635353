//! Bit-valued function spaces of binary trees with distinct labels.
//!
//! Every function is stored as a truth table over all `n` variables of the
//! tree, so sub-tree functions can be combined directly.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf2::{anf_from_truth_table, discrete_constraint, Gf2Poly, TruthTable, MAX_GF2_VARS};
use crate::tree::{child_step, Tree, TreeNode};

/// Default cap on leaf count for exhaustive enumeration.
pub const DEFAULT_ENUM_LIMIT: usize = 5;

/// Cap for [`brute_force_space`] (`16^(n-1)` assignments).
pub const BRUTE_FORCE_LIMIT: usize = 5;

/// The enumeration limit, overridable through `TREEFN_ENUM_LIMIT`.
pub fn enumeration_limit() -> usize {
    std::env::var("TREEFN_ENUM_LIMIT")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_LIMIT)
        .min(MAX_GF2_VARS)
}

/// `(2*6^n + 8) / 5`.
pub fn space_size(n: u32) -> BigUint {
    (BigUint::from(2u32) * BigUint::from(6u32).pow(n) + 8u32) / 5u32
}

/// All functions realizable on a tree, keyed by truth table.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    pub tree: Tree,
    pub members: HashSet<TruthTable>,
}

impl FunctionSpace {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.tree.var_count()
    }

    pub fn contains(&self, tt: &TruthTable) -> bool {
        self.members.contains(tt)
    }

    pub fn contains_poly(&self, p: &Gf2Poly) -> bool {
        self.members.contains(&p.truth_table())
    }

    /// Members as fixed-width hex strings, sorted.
    pub fn hex_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.members.iter().map(TruthTable::to_hex).collect();
        lines.sort();
        lines
    }

    pub fn export(&self) -> String {
        let mut out = self.hex_lines().join("\n");
        out.push('\n');
        out
    }

    /// Parses the export format back into a member set on `n` variables.
    pub fn parse_members(text: &str, n: usize) -> Result<HashSet<TruthTable>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| TruthTable::from_hex(n, l))
            .collect()
    }
}

fn check_enumerable(t: &Tree, limit: usize) -> Result<()> {
    t.require_binary_distinct()?;
    let n = t.var_count();
    if n > limit || n > MAX_GF2_VARS {
        return Err(Error::LimitExceeded {
            n,
            limit: limit.min(MAX_GF2_VARS),
        });
    }
    Ok(())
}

/// Builds the space recursively from the spaces of the two sub-trees.
pub fn enumerate_space(t: &Tree) -> Result<FunctionSpace> {
    enumerate_space_with_limit(t, enumeration_limit())
}

pub fn enumerate_space_with_limit(t: &Tree, limit: usize) -> Result<FunctionSpace> {
    check_enumerable(t, limit)?;
    let n = t.var_count();
    let list = space_of(t.root(), n);
    let listed = list.len();
    let members: HashSet<TruthTable> = list.into_iter().collect();
    if members.len() != listed {
        return Err(Error::Internal(format!(
            "families overlap: {listed} listed, {} distinct",
            members.len()
        )));
    }
    Ok(FunctionSpace {
        tree: t.clone(),
        members,
    })
}

/// Sub-tree space as a list; the six families below are pairwise disjoint,
/// so no deduplication is needed.
fn space_of(node: &TreeNode, n: usize) -> Vec<TruthTable> {
    let zero = TruthTable::zero(n);
    let one = TruthTable::one(n);
    match node {
        TreeNode::Leaf(v) => {
            let x = TruthTable::var(n, *v);
            vec![zero, one, !x.clone(), x]
        }
        TreeNode::Node(children) => {
            let left: Vec<TruthTable> = space_of(&children[0], n)
                .into_iter()
                .filter(|f| !f.is_constant())
                .collect();
            let right: Vec<TruthTable> = space_of(&children[1], n)
                .into_iter()
                .filter(|f| !f.is_constant())
                .collect();
            let mut out =
                Vec::with_capacity(5 * left.len() * right.len() / 2 + left.len() + right.len() + 2);
            for f1 in &left {
                for f2 in &right {
                    let prod = f1 & f2;
                    out.push(!prod.clone());
                    out.push(prod);
                    if !f1.get(0) {
                        out.push(f1 ^ f2);
                    }
                }
            }
            out.extend(left);
            out.extend(right);
            out.push(zero);
            out.push(one);
            out
        }
    }
}

/// Bivariate function `code` applied pointwise: output bit `a + 2b` of `code`.
pub fn apply_node_code(code: u8, a: &TruthTable, b: &TruthTable) -> TruthTable {
    let n = a.arity().max(b.arity());
    let mut out = TruthTable::zero(n);
    let (na, nb) = (!a.clone(), !b.clone());
    for (bit, (x, y)) in [(&na, &nb), (a, &nb), (&na, b), (a, b)]
        .into_iter()
        .enumerate()
    {
        if code >> bit & 1 == 1 {
            out = &out ^ &(x & y);
        }
    }
    out
}

/// Oracle: evaluates all `16^(n-1)` node-function assignments.
pub fn brute_force_space(t: &Tree) -> Result<FunctionSpace> {
    check_enumerable(t, BRUTE_FORCE_LIMIT)?;
    let n = t.var_count();
    let internal = t.node_count();
    let mut members = HashSet::new();
    if let TreeNode::Leaf(v) = t.root() {
        let x = TruthTable::var(n, *v);
        for code in 0u8..4 {
            members.insert(TruthTable::from_fn(n, |input| {
                code >> (x.get(input) as u8) & 1 == 1
            }));
        }
        return Ok(FunctionSpace {
            tree: t.clone(),
            members,
        });
    }
    for mut counter in 0u64..1 << (4 * internal) {
        let mut codes = Vec::with_capacity(internal);
        for _ in 0..internal {
            codes.push((counter & 0xF) as u8);
            counter >>= 4;
        }
        let mut it = codes.into_iter();
        members.insert(eval_with_codes(t.root(), n, &mut it));
    }
    Ok(FunctionSpace {
        tree: t.clone(),
        members,
    })
}

fn eval_with_codes(node: &TreeNode, n: usize, codes: &mut impl Iterator<Item = u8>) -> TruthTable {
    match node {
        TreeNode::Leaf(v) => TruthTable::var(n, *v),
        TreeNode::Node(children) => {
            let code = codes.next().expect("one code per internal node");
            let a = eval_with_codes(&children[0], n, codes);
            let b = eval_with_codes(&children[1], n, codes);
            apply_node_code(code, &a, &b)
        }
    }
}

fn check_member_args(t: &Tree, p: &Gf2Poly) -> Result<()> {
    t.require_binary_distinct()?;
    if p.arity() != t.var_count() {
        return Err(Error::ArityMismatch {
            expected: t.var_count(),
            found: p.arity(),
        });
    }
    Ok(())
}

/// Whether `p` satisfies the identity of every outsider triple of `t`.
///
/// Always true for members. From four leaves on a few non-members pass as
/// well; [`is_representable`] is the exact test.
pub fn is_member(t: &Tree, p: &Gf2Poly) -> Result<bool> {
    check_member_args(t, p)?;
    for triple in t.all_outsider_triples()? {
        if !discrete_constraint(p, &triple)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact membership: the triple constraints, then the recursive split of
/// [`decompose`].
pub fn is_representable(t: &Tree, p: &Gf2Poly) -> Result<bool> {
    match decompose(t, p) {
        Ok(_) => Ok(true),
        Err(Error::NotRepresentable) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Node functions keyed by node path (`""` root, then `L`/`R`).
///
/// Internal nodes carry a 4-bit code whose bit `a + 2b` is the output on
/// left input `a` and right input `b`. A single-leaf tree has one entry at
/// `""` holding a 2-bit unary code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeAssignment {
    pub nodes: BTreeMap<String, u8>,
}

impl NodeAssignment {
    pub fn to_json(&self) -> Value {
        Value::Object(
            self.nodes
                .iter()
                .map(|(k, &v)| (k.clone(), json!(v)))
                .collect(),
        )
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: "expected a JSON object".into(),
        })?;
        let mut nodes = BTreeMap::new();
        for (k, v) in obj {
            let code = v
                .as_u64()
                .filter(|&c| c < 16)
                .ok_or_else(|| Error::Syntax {
                    pos: 0,
                    msg: format!("bad code for node '{k}'"),
                })?;
            nodes.insert(k.clone(), code as u8);
        }
        Ok(NodeAssignment { nodes })
    }
}

/// Bottom-up evaluation of `t` under `assignment`.
pub fn evaluate(t: &Tree, assignment: &NodeAssignment) -> Result<TruthTable> {
    t.require_binary_distinct()?;
    let n = t.var_count();
    if let TreeNode::Leaf(v) = t.root() {
        let code = *assignment
            .nodes
            .get("")
            .ok_or_else(|| Error::InvalidTree("missing code for the root".into()))?;
        let x = TruthTable::var(n, *v);
        return Ok(apply_unary(code, &x));
    }
    fn go(node: &TreeNode, path: &mut String, n: usize, a: &NodeAssignment) -> Result<TruthTable> {
        match node {
            TreeNode::Leaf(v) => Ok(TruthTable::var(n, *v)),
            TreeNode::Node(children) => {
                let code = *a
                    .nodes
                    .get(path.as_str())
                    .ok_or_else(|| Error::InvalidTree(format!("missing code for node '{path}'")))?;
                let mut parts = Vec::with_capacity(2);
                for (k, c) in children.iter().enumerate() {
                    let step = child_step(k, 2);
                    path.push_str(&step);
                    parts.push(go(c, path, n, a)?);
                    path.truncate(path.len() - step.len());
                }
                Ok(apply_node_code(code, &parts[0], &parts[1]))
            }
        }
    }
    go(t.root(), &mut String::new(), n, assignment)
}

fn apply_unary(code: u8, x: &TruthTable) -> TruthTable {
    match code & 3 {
        0 => TruthTable::zero(x.arity()),
        1 => !x.clone(),
        2 => x.clone(),
        _ => TruthTable::one(x.arity()),
    }
}

/// Constructs node functions realizing `p` on `t`.
pub fn decompose(t: &Tree, p: &Gf2Poly) -> Result<NodeAssignment> {
    if !is_member(t, p)? {
        return Err(Error::NotRepresentable);
    }
    let n = t.var_count();
    let target = p.truth_table();
    let mut out = NodeAssignment::default();
    match t.root() {
        TreeNode::Leaf(v) => {
            out.nodes.insert(String::new(), unary_code(&target, *v));
        }
        root => realize(root, &mut String::new(), n, &target, &mut out)?,
    }
    if evaluate(t, &out)? != target {
        return Err(Error::Internal(
            "decomposition does not reproduce the input".into(),
        ));
    }
    Ok(out)
}

/// 2-bit code `phi` with `f = phi(x_v)`, for `f` depending on `x_v` at most.
fn unary_code(f: &TruthTable, v: usize) -> u8 {
    f.get(0) as u8 | (f.get(1 << v) as u8) << 1
}

fn var_mask(node: &TreeNode) -> usize {
    node.leaves().iter().fold(0, |m, &v| m | 1 << v)
}

/// Restriction with every variable in `mask` set to zero.
fn zero_out(f: &TruthTable, mask: usize) -> TruthTable {
    (0..f.arity())
        .filter(|i| mask >> i & 1 == 1)
        .fold(f.clone(), |g, i| g.fix(i, false))
}

/// Splits `f` (depending only on variables below `node`) as `g(f1, f2)` and
/// recurses into both children.
fn realize(
    node: &TreeNode,
    path: &mut String,
    n: usize,
    f: &TruthTable,
    out: &mut NodeAssignment,
) -> Result<()> {
    let children = node.children();
    let (left, right) = (&children[0], &children[1]);
    let (ma, mb) = (var_mask(left), var_mask(right));
    let f_a = zero_out(f, mb);
    let f_b = zero_out(f, ma);
    let c00 = if f.get(0) {
        TruthTable::one(n)
    } else {
        TruthTable::zero(n)
    };

    let (mut code, f1, f2) = if &(&(f ^ &f_a) ^ &f_b) ^ &c00 == TruthTable::zero(n) {
        // f = f(x_A, 0) + (f(0, x_B) + f(0, 0))
        (0b0110u8, f_a, &f_b ^ &c00)
    } else {
        product_split(f, ma, mb, n)?
    };

    for (k, (child, part)) in [(left, &f1), (right, &f2)].into_iter().enumerate() {
        let phi = match child {
            TreeNode::Leaf(v) => unary_code(part, *v),
            inner => {
                let step = child_step(k, 2);
                path.push_str(&step);
                realize(inner, path, n, part, out)?;
                path.truncate(path.len() - step.len());
                0b10
            }
        };
        code = compose_unary(code, k, phi);
    }
    out.nodes.insert(path.clone(), code);
    Ok(())
}

/// `f = (q + e) r + d` with `q` on the left variables, `r` on the right ones.
fn product_split(
    f: &TruthTable,
    ma: usize,
    mb: usize,
    n: usize,
) -> Result<(u8, TruthTable, TruthTable)> {
    let zero = TruthTable::zero(n);
    let at_zero_a = zero_out(f, ma);
    let row_diff = f ^ &at_zero_a; // f(x_A, b) + f(0, b)
    let b_star = (0..1usize << n)
        .filter(|x| x & !mb == 0)
        .find(|&b| (0..1usize << n).any(|x| x & !ma == 0 && row_diff.get(x | b)))
        .ok_or(Error::NotRepresentable)?;
    let q = TruthTable::from_fn(n, |x| row_diff.get((x & ma) | b_star));
    let mut r_bits = vec![false; 1 << n];
    let (mut eps, mut delta) = (None, None);
    for b in (0..1usize << n).filter(|x| x & !mb == 0) {
        let row = TruthTable::from_fn(n, |x| row_diff.get((x & ma) | b));
        let active = if row == q {
            true
        } else if row == zero {
            false
        } else {
            return Err(Error::NotRepresentable);
        };
        let tilde = f.get(b);
        let slot = if active { &mut eps } else { &mut delta };
        match *slot {
            None => *slot = Some(tilde),
            Some(prev) if prev != tilde => return Err(Error::NotRepresentable),
            _ => {}
        }
        r_bits[b] = active;
    }
    let delta = delta.unwrap_or(false);
    let eps = eps.is_some_and(|e| e ^ delta);
    let r = TruthTable::from_fn(n, |x| r_bits[x & mb]);
    let f1 = if eps { !q } else { q };
    // ab or ab + 1
    Ok((if delta { 0b0111 } else { 0b1000 }, f1, r))
}

/// Replaces input `side` of `code` by `phi(input)`.
fn compose_unary(code: u8, side: usize, phi: u8) -> u8 {
    let mut out = 0u8;
    for a in 0..2u8 {
        for b in 0..2u8 {
            let (mut x, mut y) = (a, b);
            if side == 0 {
                x = phi >> a & 1;
            } else {
                y = phi >> b & 1;
            }
            out |= (code >> (x + 2 * y) & 1) << (a + 2 * b);
        }
    }
    out
}

/// ANF of every member, for inspection.
pub fn member_polys(space: &FunctionSpace) -> Vec<Gf2Poly> {
    let mut v: Vec<_> = space.members.iter().map(anf_from_truth_table).collect();
    v.sort();
    v
}

//! Layered networks, their tree expansions, and counting bounds for
//! bit-valued functions on general trees.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::discrete::space_size;
use crate::error::{Error, Result};
use crate::tree::{Tree, TreeNode};

/// Expansions with more leaves than this are refused.
pub const MAX_TENN_LEAVES: usize = 1 << 20;

/// Largest `p` accepted by [`universal_threshold`] (the comparison
/// materializes `2^(2^p)`).
pub const MAX_THRESHOLD_INPUTS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetNode {
    pub id: String,
    pub inputs: Vec<String>,
}

/// Layer 0 holds the named inputs; each later node reads from the layer
/// directly below it. The last layer holds the single output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredNetwork {
    pub inputs: Vec<String>,
    pub layers: Vec<Vec<NetNode>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidNetwork(msg.into())
}

impl LayeredNetwork {
    pub fn new(inputs: Vec<String>, layers: Vec<Vec<NetNode>>) -> Result<Self> {
        let net = LayeredNetwork { inputs, layers };
        net.validate()?;
        Ok(net)
    }

    /// `{"inputs": [...], "layers": [[{"id": .., "in": [..]}, ..], ..]}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let strings = |v: &Value, what: &str| -> Result<Vec<String>> {
            v.as_array()
                .ok_or_else(|| invalid(format!("'{what}' must be an array")))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| invalid(format!("'{what}' must hold strings")))
                })
                .collect()
        };
        let inputs = strings(
            value
                .get("inputs")
                .ok_or_else(|| invalid("missing 'inputs'"))?,
            "inputs",
        )?;
        let layers = value
            .get("layers")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid("missing 'layers' array"))?
            .iter()
            .map(|layer| {
                layer
                    .as_array()
                    .ok_or_else(|| invalid("each layer must be an array"))?
                    .iter()
                    .map(|node| {
                        let id = node
                            .get("id")
                            .and_then(Value::as_str)
                            .ok_or_else(|| invalid("node without string 'id'"))?
                            .to_string();
                        let ins = strings(
                            node.get("in")
                                .ok_or_else(|| invalid(format!("node '{id}' has no 'in'")))?,
                            "in",
                        )?;
                        Ok(NetNode { id, inputs: ins })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(inputs, layers)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        Self::from_json(&value)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "inputs": self.inputs,
            "layers": self.layers.iter().map(|layer| layer.iter().map(|n| json!({"id": n.id, "in": n.inputs})).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(invalid("no inputs"));
        }
        if self.layers.is_empty() || self.layers.iter().any(Vec::is_empty) {
            return Err(invalid("every layer needs at least one node"));
        }
        let mut layer_of: HashMap<&str, usize> = HashMap::new();
        for name in &self.inputs {
            if layer_of.insert(name, 0).is_some() {
                return Err(invalid(format!("duplicate id '{name}'")));
            }
        }
        for (k, layer) in self.layers.iter().enumerate() {
            for node in layer {
                if layer_of.insert(&node.id, k + 1).is_some() {
                    return Err(invalid(format!("duplicate id '{}'", node.id)));
                }
            }
        }
        for (k, layer) in self.layers.iter().enumerate() {
            for node in layer {
                if node.inputs.is_empty() {
                    return Err(invalid(format!("node '{}' has no inputs", node.id)));
                }
                for src in &node.inputs {
                    match layer_of.get(src.as_str()) {
                        None => {
                            return Err(invalid(format!(
                                "node '{}' reads unknown '{src}'",
                                node.id
                            )))
                        }
                        Some(&l) if l != k => {
                            return Err(invalid(format!(
                                "cross-layer edge '{src}' -> '{}' (layer {l} to layer {})",
                                node.id,
                                k + 1
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        if self.layers.last().map_or(0, Vec::len) != 1 {
            return Err(invalid("the last layer must hold exactly one output node"));
        }
        Ok(())
    }

    pub fn output(&self) -> &NetNode {
        &self.layers[self.layers.len() - 1][0]
    }

    fn nodes_by_id(&self) -> HashMap<&str, &NetNode> {
        self.layers
            .iter()
            .flatten()
            .map(|n| (n.id.as_str(), n))
            .collect()
    }

    /// Number of output-to-input paths, counted by memoized recursion.
    pub fn path_count(&self) -> BigUint {
        let by_id = self.nodes_by_id();
        let mut memo: HashMap<&str, BigUint> = HashMap::new();
        fn count<'a>(
            id: &'a str,
            by_id: &HashMap<&'a str, &'a NetNode>,
            memo: &mut HashMap<&'a str, BigUint>,
        ) -> BigUint {
            if let Some(v) = memo.get(id) {
                return v.clone();
            }
            let v = match by_id.get(id) {
                None => BigUint::one(),
                Some(node) => node.inputs.iter().map(|s| count(s, by_id, memo)).sum(),
            };
            memo.insert(id, v.clone());
            v
        }
        count(&self.output().id, &by_id, &mut memo)
    }

    /// Function nodes the output depends on.
    fn reachable(&self) -> Vec<&NetNode> {
        let by_id = self.nodes_by_id();
        let mut seen = HashSet::new();
        let mut stack = vec![self.output().id.as_str()];
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            if let Some(node) = by_id.get(id) {
                out.push(*node);
                stack.extend(node.inputs.iter().map(String::as_str));
            }
        }
        out
    }

    /// `c = max(largest in-degree of a participating node, 2)`.
    pub fn max_children(&self) -> usize {
        self.reachable()
            .iter()
            .map(|n| n.inputs.len())
            .max()
            .unwrap_or(0)
            .max(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TennResult {
    pub tree: Tree,
    /// `L(N)`: leaves counted with multiplicity.
    pub leaf_count: usize,
    pub max_children: usize,
}

/// Tree expansion: every node feeding several upper nodes is duplicated.
/// Single-input nodes are pass-throughs and are merged into their parent.
pub fn expand_tenn(net: &LayeredNetwork) -> Result<TennResult> {
    let paths = net.path_count();
    if paths > BigUint::from(MAX_TENN_LEAVES) {
        return Err(Error::LimitExceeded {
            n: paths.to_usize().unwrap_or(usize::MAX),
            limit: MAX_TENN_LEAVES,
        });
    }
    let by_id = net.nodes_by_id();
    let used: HashSet<&str> = net
        .reachable()
        .iter()
        .flat_map(|n| n.inputs.iter().map(String::as_str))
        .collect();
    let vars: Vec<String> = net
        .inputs
        .iter()
        .filter(|v| used.contains(v.as_str()))
        .cloned()
        .collect();
    let var_index: HashMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(k, v)| (v.as_str(), k))
        .collect();
    fn build(
        id: &str,
        by_id: &HashMap<&str, &NetNode>,
        var_index: &HashMap<&str, usize>,
    ) -> TreeNode {
        match by_id.get(id) {
            None => TreeNode::Leaf(var_index[id]),
            Some(node) if node.inputs.len() == 1 => build(&node.inputs[0], by_id, var_index),
            Some(node) => TreeNode::Node(
                node.inputs
                    .iter()
                    .map(|s| build(s, by_id, var_index))
                    .collect(),
            ),
        }
    }
    let root = build(&net.output().id, &by_id, &var_index);
    let tree = Tree::new(root, vars)?;
    let leaf_count = tree.leaf_count();
    if BigUint::from(leaf_count) != paths {
        return Err(Error::Internal("leaf count differs from path count".into()));
    }
    Ok(TennResult {
        tree,
        leaf_count,
        max_children: net.max_children(),
    })
}

/// Orbits of the shift action `P(x) -> P(x + d)` of `(Z_2)^m` on
/// polynomials in `m` variables.
pub fn burnside_classes(m: u32) -> BigUint {
    if m == 0 {
        return BigUint::from(2u32);
    }
    let half = 1u64 << (m - 1);
    let two = BigUint::from(2u32);
    two.pow((half - m as u64) as u32) * (two.pow(half as u32) + (1u64 << m) - 1u32)
}

/// Brute-force orbit count over all `2^(2^m)` truth tables, `m <= 4`.
pub fn burnside_brute_force(m: u32) -> Result<u64> {
    if m > 4 {
        return Err(Error::LimitExceeded {
            n: m as usize,
            limit: 4,
        });
    }
    let size = 1usize << m;
    let shift =
        |table: u32, d: usize| (0..size).fold(0u32, |acc, x| acc | (table >> (x ^ d) & 1) << x);
    let mut count = 0;
    for table in 0u32..(1u64 << size) as u32 {
        if (1..size).all(|d| shift(table, d) >= table) {
            count += 1;
        }
    }
    Ok(count)
}

/// `6` for `c = 2`, else `2^(2^(c-1) - c + 2) (2^(2^(c-1)) + 2^c - 1)`.
pub fn gamma(c: u32) -> Result<BigUint> {
    match c {
        0 | 1 => Err(Error::InvalidArgument("gamma needs c >= 2".into())),
        2 => Ok(BigUint::from(6u32)),
        _ => {
            let half = 1u64 << (c - 1);
            let two = BigUint::from(2u32);
            Ok(two.pow((half - c as u64 + 2) as u32) * (two.pow(half as u32) + (1u64 << c) - 1u32))
        }
    }
}

/// `4^n * burnside_classes(c)^(n-1)`.
pub fn space_size_bound(n: u32, c: u32) -> Result<BigUint> {
    if n == 0 || c < 2 {
        return Err(Error::InvalidArgument(
            "space_size_bound needs n >= 1 and c >= 2".into(),
        ));
    }
    Ok(BigUint::from(4u32).pow(n) * burnside_classes(c).pow(n - 1))
}

/// Smallest leaf count `n` meeting the necessary size condition for every
/// function of `p` inputs to be implementable with at most `c` children per node.
pub fn universal_threshold(p: u32, c: u32) -> Result<u64> {
    if p == 0 || p > MAX_THRESHOLD_INPUTS || c < 2 {
        return Err(Error::InvalidArgument(format!(
            "universal_threshold needs 1 <= p <= {MAX_THRESHOLD_INPUTS} and c >= 2"
        )));
    }
    let g = gamma(c)?;
    let target_exp = if c == 2 { 1u64 << p } else { (1u64 << p) - 2 };
    let target = BigUint::one() << target_exp;
    let meets = |n: u64| -> bool {
        if c == 2 {
            space_size(n as u32) >= target
        } else {
            g.pow((n - 1) as u32) >= target
        }
    };
    let log_g = g.to_f64().expect("gamma fits f64").log2();
    let guess = if c == 2 {
        (target_exp as f64 / log_g).ceil() as u64
    } else {
        (target_exp as f64 / log_g).ceil() as u64 + 1
    };
    let mut n = guess.max(1);
    while n > 1 && meets(n - 1) {
        n -= 1;
    }
    while !meets(n) {
        n += 1;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityBound {
    pub leaf_count: usize,
    pub max_children: usize,
    pub distinct_inputs: usize,
    /// `gamma_c^L`, the base-and-exponent witness of the asymptotic bound.
    pub gamma_witness: BigUint,
    /// `4^L * burnside_classes(c)^(L-1)`.
    pub estimate_bound: BigUint,
    /// Smallest of the estimate, `2^(2^p)`, and the exact space size when
    /// the expansion is binary with distinct labels.
    pub certified_bound: BigUint,
}

impl CapacityBound {
    pub fn to_json(&self) -> Value {
        json!({
            "leaf_count": self.leaf_count,
            "max_children": self.max_children,
            "distinct_inputs": self.distinct_inputs,
            "gamma_witness": self.gamma_witness.to_string(),
            "estimate_bound": self.estimate_bound.to_string(),
            "certified_bound": self.certified_bound.to_string(),
        })
    }
}

/// Counting bounds for the bit-valued functions a network can compute.
pub fn nn_capacity_bound(net: &LayeredNetwork) -> Result<CapacityBound> {
    let tenn = expand_tenn(net)?;
    let (l, c) = (tenn.leaf_count as u32, tenn.max_children as u32);
    let p = tenn.tree.var_count();
    let gamma_witness = gamma(c)?.pow(l);
    let estimate_bound = space_size_bound(l, c)?;
    let mut certified = estimate_bound.clone();
    if p < 64 {
        certified = certified.min(BigUint::one() << (1u64 << p));
    }
    if tenn.tree.is_binary() && tenn.tree.has_distinct_labels() {
        certified = certified.min(space_size(l));
    }
    Ok(CapacityBound {
        leaf_count: tenn.leaf_count,
        max_children: tenn.max_children,
        distinct_inputs: p,
        gamma_witness,
        estimate_bound,
        certified_bound: certified,
    })
}

impl TennResult {
    pub fn to_json(&self) -> Value {
        json!({
            "tree": self.tree.to_string(),
            "leaf_count": self.leaf_count,
            "max_children": self.max_children,
            "internal_nodes": self.tree.node_count(),
        })
    }
}

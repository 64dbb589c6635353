//! Rooted trees with labeled leaves.
//!
//! A [`Tree`] owns a variable list and a [`TreeNode`] hierarchy whose leaves
//! refer to positions in that list. Variables are ordered once at parse time:
//! if every label has the form `x<k>` they are sorted by `k`, otherwise they
//! keep their order of first appearance. Truth-table bit positions and
//! polynomial variable indices all use this order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Largest leaf count accepted by [`enumerate_tree_shapes`] (135135 trees).
pub const MAX_SHAPE_LEAVES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeNode {
    /// Index into the tree's variable list.
    Leaf(usize),
    Node(Vec<TreeNode>),
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf(_))
    }

    pub fn children(&self) -> &[TreeNode] {
        match self {
            TreeNode::Leaf(_) => &[],
            TreeNode::Node(children) => children,
        }
    }

    /// Variable indices of the leaves below this node, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            TreeNode::Leaf(v) => out.push(*v),
            TreeNode::Node(children) => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Node(children) => children.iter().map(TreeNode::leaf_count).sum(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Node(children) => {
                1 + children.iter().map(TreeNode::node_count).sum::<usize>()
            }
        }
    }

    pub fn is_binary(&self) -> bool {
        match self {
            TreeNode::Leaf(_) => true,
            TreeNode::Node(children) => {
                children.len() == 2 && children.iter().all(TreeNode::is_binary)
            }
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Node(children) => children
                .iter()
                .map(TreeNode::max_arity)
                .fold(children.len(), usize::max),
        }
    }

    fn write(&self, vars: &[String], f: &mut impl fmt::Write) -> fmt::Result {
        match self {
            TreeNode::Leaf(v) => f.write_str(&vars[*v]),
            TreeNode::Node(children) => {
                f.write_char('(')?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        f.write_char(',')?;
                    }
                    c.write(vars, f)?;
                }
                f.write_char(')')
            }
        }
    }

    fn canonicalize(&self, vars: &[String]) -> (TreeNode, String) {
        match self {
            TreeNode::Leaf(v) => (TreeNode::Leaf(*v), vars[*v].clone()),
            TreeNode::Node(children) => {
                let mut parts: Vec<(TreeNode, String)> =
                    children.iter().map(|c| c.canonicalize(vars)).collect();
                parts.sort_by(|a, b| a.1.cmp(&b.1));
                let key = format!(
                    "({})",
                    parts
                        .iter()
                        .map(|p| p.1.as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                (
                    TreeNode::Node(parts.into_iter().map(|p| p.0).collect()),
                    key,
                )
            }
        }
    }

    fn remap(&self, map: &[usize]) -> TreeNode {
        match self {
            TreeNode::Leaf(v) => TreeNode::Leaf(map[*v]),
            TreeNode::Node(children) => {
                TreeNode::Node(children.iter().map(|c| c.remap(map)).collect())
            }
        }
    }
}

/// A rooted tree together with its variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    root: TreeNode,
    vars: Vec<String>,
}

/// Three distinct variables; `l` is the outsider separated from `i` and `j`
/// by a rooted sub-tree. Stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub i: usize,
    pub j: usize,
    pub l: usize,
}

impl Triple {
    pub fn new(i: usize, j: usize, l: usize) -> Self {
        Triple {
            i: i.min(j),
            j: i.max(j),
            l,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Numeric suffix of an `x<k>` label.
pub(crate) fn x_index(label: &str) -> Option<usize> {
    let digits = label.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// Raw parse result: leaves carry label strings.
enum RawNode {
    Leaf(String),
    Node(Vec<RawNode>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            _src: src,
        }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|p| p.0)
            .unwrap_or(self._src.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|p| p.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn node(&mut self) -> Result<RawNode> {
        match self.peek() {
            Some('(') => {
                let open = self.offset();
                self.pos += 1;
                let mut children = vec![self.node()?];
                loop {
                    match self.peek() {
                        Some(',') => {
                            self.pos += 1;
                            children.push(self.node()?);
                        }
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => return self.err(format!("expected ',' or ')', found '{c}'")),
                        None => return self.err("unclosed '('"),
                    }
                }
                if children.len() < 2 {
                    return Err(Error::Syntax {
                        pos: open,
                        msg: "internal node with one child".into(),
                    });
                }
                Ok(RawNode::Node(children))
            }
            Some(c) if is_ident_start(c) => {
                let mut label = String::new();
                while let Some(c) = self.peek().filter(|c| is_ident_char(*c)) {
                    label.push(c);
                    self.pos += 1;
                }
                Ok(RawNode::Leaf(label))
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn collect_labels(node: &RawNode, out: &mut Vec<String>) {
    match node {
        RawNode::Leaf(l) => {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        RawNode::Node(children) => children.iter().for_each(|c| collect_labels(c, out)),
    }
}

fn resolve(node: RawNode, index: &HashMap<String, usize>) -> TreeNode {
    match node {
        RawNode::Leaf(l) => TreeNode::Leaf(index[&l]),
        RawNode::Node(children) => {
            TreeNode::Node(children.into_iter().map(|c| resolve(c, index)).collect())
        }
    }
}

/// Orders labels: numerically when all are `x<k>`, otherwise by first appearance.
fn order_labels(mut labels: Vec<String>) -> Vec<String> {
    if labels.iter().all(|l| x_index(l).is_some()) {
        labels.sort_by_key(|l| x_index(l));
    }
    labels
}

fn from_raw(raw: RawNode) -> Tree {
    let mut labels = Vec::new();
    collect_labels(&raw, &mut labels);
    let vars = order_labels(labels);
    let index: HashMap<String, usize> = vars
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    Tree {
        root: resolve(raw, &index),
        vars,
    }
}

/// Parses a parenthesized tree expression such as `((x1,x2),x3)`.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut p = Parser::new(text);
    let raw = p.node()?;
    if p.peek().is_some() {
        return p.err("trailing input after tree");
    }
    Ok(from_raw(raw))
}

impl std::str::FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_tree(s)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(&self.vars, f)
    }
}

impl Tree {
    /// Builds a tree from a node hierarchy and its variable list.
    pub fn new(root: TreeNode, vars: Vec<String>) -> Result<Self> {
        fn check(node: &TreeNode, n: usize) -> Result<()> {
            match node {
                TreeNode::Leaf(v) if *v >= n => {
                    Err(Error::InvalidTree(format!("leaf refers to variable {v}")))
                }
                TreeNode::Leaf(_) => Ok(()),
                TreeNode::Node(children) if children.len() < 2 => Err(Error::InvalidTree(
                    "internal node with fewer than two children".into(),
                )),
                TreeNode::Node(children) => children.iter().try_for_each(|c| check(c, n)),
            }
        }
        check(&root, vars.len())?;
        let used: BTreeSet<usize> = root.leaves().into_iter().collect();
        if used.len() != vars.len() {
            return Err(Error::InvalidTree(
                "variable list does not match leaves".into(),
            ));
        }
        Ok(Tree { root, vars })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Variable names in index order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, label: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == label)
    }

    /// Leaf labels left to right; repetitions allowed.
    pub fn leaf_labels(&self) -> Vec<&str> {
        self.root
            .leaves()
            .into_iter()
            .map(|v| self.vars[v].as_str())
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    /// Number of internal vertices.
    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn is_binary(&self) -> bool {
        self.root.is_binary()
    }

    pub fn has_distinct_labels(&self) -> bool {
        self.leaf_count() == self.vars.len()
    }

    /// Largest number of children of any internal node (0 for a single leaf).
    pub fn max_arity(&self) -> usize {
        self.root.max_arity()
    }

    pub(crate) fn require_binary_distinct(&self) -> Result<()> {
        if !self.is_binary() {
            return Err(Error::NotBinary);
        }
        if !self.has_distinct_labels() {
            return Err(Error::RepeatedLabels);
        }
        Ok(())
    }

    /// Children of every node sorted by their canonical serialization.
    pub fn canonical_form(&self) -> Tree {
        Tree {
            root: self.root.canonicalize(&self.vars).0,
            vars: self.vars.clone(),
        }
    }

    pub fn canonical_string(&self) -> String {
        self.root.canonicalize(&self.vars).1
    }

    /// Equality in `Tree_n`: same labels and isomorphic as rooted labeled trees.
    pub fn same_shape(&self, other: &Tree) -> bool {
        self.canonical_string() == other.canonical_string()
    }

    /// Re-indexes variables to follow `order`, which must be a permutation of
    /// this tree's labels.
    pub fn with_var_order(&self, order: &[String]) -> Result<Tree> {
        let mine: BTreeSet<&String> = self.vars.iter().collect();
        let theirs: BTreeSet<&String> = order.iter().collect();
        if mine != theirs || order.len() != self.vars.len() {
            return Err(Error::LabelMismatch(format!(
                "{:?} vs {:?}",
                self.vars, order
            )));
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| order.iter().position(|o| o == v).expect("checked above"))
            .collect();
        Ok(Tree {
            root: self.root.remap(&map),
            vars: order.to_vec(),
        })
    }

    /// Root-to-leaf child-index paths, one per leaf position.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        fn walk(node: &TreeNode, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            match node {
                TreeNode::Leaf(_) => out.push(prefix.clone()),
                TreeNode::Node(children) => {
                    for (k, c) in children.iter().enumerate() {
                        prefix.push(k);
                        walk(c, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Internal nodes in pre-order with `L`/`R` paths (root is the empty path).
    /// Children beyond the second are addressed by their decimal index.
    pub fn internal_nodes(&self) -> Vec<(String, &TreeNode)> {
        fn walk<'t>(node: &'t TreeNode, path: &mut String, out: &mut Vec<(String, &'t TreeNode)>) {
            if let TreeNode::Node(children) = node {
                out.push((path.clone(), node));
                for (k, c) in children.iter().enumerate() {
                    let step = child_step(k, children.len());
                    path.push_str(&step);
                    walk(c, path, out);
                    path.truncate(path.len() - step.len());
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut String::new(), &mut out);
        out
    }

    /// JSON interchange form: `{"node":[...]}` / `{"leaf":"x1"}`.
    pub fn to_json(&self) -> Value {
        fn go(node: &TreeNode, vars: &[String]) -> Value {
            match node {
                TreeNode::Leaf(v) => json!({ "leaf": vars[*v] }),
                TreeNode::Node(children) => {
                    json!({ "node": children.iter().map(|c| go(c, vars)).collect::<Vec<_>>() })
                }
            }
        }
        go(&self.root, &self.vars)
    }

    pub fn from_json(value: &Value) -> Result<Tree> {
        fn go(value: &Value) -> Result<RawNode> {
            let obj = value
                .as_object()
                .ok_or_else(|| Error::InvalidTree("expected a JSON object".into()))?;
            if let Some(label) = obj.get("leaf") {
                let label = label
                    .as_str()
                    .filter(|l| l.starts_with(is_ident_start) && l.chars().all(is_ident_char))
                    .ok_or_else(|| Error::InvalidTree(format!("bad leaf label {label}")))?;
                return Ok(RawNode::Leaf(label.to_string()));
            }
            let children = obj
                .get("node")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidTree("expected \"leaf\" or \"node\"".into()))?;
            if children.len() < 2 {
                return Err(Error::InvalidTree(
                    "internal node with fewer than two children".into(),
                ));
            }
            Ok(RawNode::Node(
                children.iter().map(go).collect::<Result<_>>()?,
            ))
        }
        Ok(from_raw(go(value)?))
    }

    /// Leaf position whose variable is `var`, for trees with distinct labels.
    fn leaf_position(&self, var: usize) -> Option<usize> {
        self.root.leaves().iter().position(|&v| v == var)
    }

    /// Outsider of three leaf positions: the one outside the smallest rooted
    /// sub-tree containing the other two.
    pub fn outsider(&self, i: usize, j: usize, l: usize) -> Result<usize> {
        let paths = self.leaf_paths();
        let n = paths.len();
        if i >= n || j >= n || l >= n {
            return Err(Error::InvalidTriple(format!(
                "leaf index out of range for {n} leaves"
            )));
        }
        if i == j || j == l || i == l {
            return Err(Error::InvalidTriple("leaves must be distinct".into()));
        }
        let lca = |a: usize, b: usize| {
            paths[a]
                .iter()
                .zip(&paths[b])
                .take_while(|(x, y)| x == y)
                .count()
        };
        let (ij, jl, il) = (lca(i, j), lca(j, l), lca(i, l));
        if ij > jl && ij > il {
            Ok(l)
        } else if jl > ij && jl > il {
            Ok(i)
        } else if il > ij && il > jl {
            Ok(j)
        } else {
            Err(Error::InvalidTriple(
                "no rooted sub-tree separates one leaf from the others".into(),
            ))
        }
    }

    /// Outsider expressed in variable indices (distinct labels only).
    pub fn outsider_var(&self, i: usize, j: usize, l: usize) -> Result<usize> {
        if !self.has_distinct_labels() {
            return Err(Error::RepeatedLabels);
        }
        let pos = |v: usize| {
            self.leaf_position(v)
                .ok_or_else(|| Error::InvalidTriple(format!("variable {v} out of range")))
        };
        let o = self.outsider(pos(i)?, pos(j)?, pos(l)?)?;
        Ok(self.root.leaves()[o])
    }

    /// All `C(n,3)` triples, each with its outsider.
    pub fn all_outsider_triples(&self) -> Result<Vec<Triple>> {
        self.require_binary_distinct()?;
        let leaves = self.root.leaves();
        let paths = self.leaf_paths();
        let n = leaves.len();
        let mut pos = vec![0; n];
        for (p, &v) in leaves.iter().enumerate() {
            pos[v] = p;
        }
        let lca = |a: usize, b: usize| {
            let (pa, pb) = (&paths[pos[a]], &paths[pos[b]]);
            pa.iter().zip(pb).take_while(|(x, y)| x == y).count()
        };
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) * n.saturating_sub(2) / 6);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (ab, bc, ac) = (lca(a, b), lca(b, c), lca(a, c));
                    let t = if ab > bc && ab > ac {
                        Triple::new(a, b, c)
                    } else if bc > ab && bc > ac {
                        Triple::new(b, c, a)
                    } else {
                        Triple::new(a, c, b)
                    };
                    out.push(t);
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn child_step(k: usize, arity: usize) -> String {
    match (k, arity) {
        (0, 2) => "L".into(),
        (1, 2) => "R".into(),
        _ => format!("{k}."),
    }
}

/// Standard variable names `x1..xn`.
pub fn standard_vars(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("x{k}")).collect()
}

/// Every labeled binary rooted tree on `x1..xn`, canonicalized and sorted.
pub fn enumerate_tree_shapes(n: usize) -> Result<Vec<Tree>> {
    if n == 0 {
        return Err(Error::InvalidTree("a tree needs at least one leaf".into()));
    }
    if n > MAX_SHAPE_LEAVES {
        return Err(Error::LimitExceeded {
            n,
            limit: MAX_SHAPE_LEAVES,
        });
    }
    let vars = standard_vars(n);
    let all: Vec<usize> = (0..n).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for root in shapes_over(&all) {
        let tree = Tree {
            root,
            vars: vars.clone(),
        }
        .canonical_form();
        if seen.insert(tree.to_string()) {
            out.push(tree);
        }
    }
    out.sort_by_key(|t| t.to_string());
    Ok(out)
}

/// Binary trees on a label set by splitting off every bipartition that keeps
/// the smallest label on the left.
fn shapes_over(labels: &[usize]) -> Vec<TreeNode> {
    if labels.len() == 1 {
        return vec![TreeNode::Leaf(labels[0])];
    }
    let rest = labels.len() - 1;
    let mut out = Vec::new();
    // Bit k of `mask` puts labels[k + 1] on the left with labels[0].
    for mask in 0..(1u64 << rest) - 1 {
        let (mut left, mut right) = (vec![labels[0]], Vec::new());
        for (k, &v) in labels[1..].iter().enumerate() {
            if mask >> k & 1 == 1 {
                left.push(v);
            } else {
                right.push(v);
            }
        }
        let lefts = shapes_over(&left);
        let rights = shapes_over(&right);
        for l in &lefts {
            for r in &rights {
                out.push(TreeNode::Node(vec![l.clone(), r.clone()]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn parses_three_leaf_tree() {
        let tree = t("((x1,x2),x3)");
        assert_eq!(tree.leaf_count(), 3);
        assert!(tree.is_binary());
        assert_eq!(tree.root().children()[1], TreeNode::Leaf(2));
        assert_eq!(tree.to_string(), "((x1,x2),x3)");
    }

    #[test]
    fn single_child_is_rejected() {
        match parse_tree("(x1)") {
            Err(Error::Syntax { pos, msg }) => {
                assert_eq!(pos, 0);
                assert!(msg.contains("one child"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_report_position() {
        assert!(matches!(
            parse_tree("((x1,x2),"),
            Err(Error::Syntax { pos: 9, .. })
        ));
        assert!(matches!(
            parse_tree("(x1,2x)"),
            Err(Error::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse_tree("(x1,x2))"),
            Err(Error::Syntax { pos: 7, .. })
        ));
        assert!(parse_tree("").is_err());
    }

    #[test]
    fn repeated_labels_share_a_variable() {
        let tree = t("((x,y),(x,z))");
        assert_eq!(tree.leaf_count(), 4);
        assert_eq!(tree.vars(), ["x", "y", "z"]);
        assert_eq!(tree.leaf_labels(), vec!["x", "y", "x", "z"]);
        assert!(!tree.has_distinct_labels());
    }

    #[test]
    fn x_labels_are_ordered_numerically() {
        let tree = t("((x10,x2),x1)");
        assert_eq!(tree.vars(), ["x1", "x2", "x10"]);
        let tree = t("((y,x),z)");
        assert_eq!(tree.vars(), ["y", "x", "z"]);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(t(" ( ( a , b ) ,\n c ) "), t("((a,b),c)"));
    }

    #[test]
    fn canonical_form_ignores_sibling_order() {
        assert_eq!(
            t("((x1,x2),x3)").canonical_form(),
            t("((x2,x1),x3)").canonical_form()
        );
        assert_ne!(
            t("((x1,x2),x3)").canonical_form(),
            t("((x1,x3),x2)").canonical_form()
        );
        assert!(t("(x3,(x2,x1))").same_shape(&t("((x1,x2),x3)")));
    }

    #[test]
    fn outsider_examples() {
        let tree = t("((x,y),z)");
        assert_eq!(tree.outsider(0, 1, 2).unwrap(), 2);
        let tree = t("((x,y),(z,w))");
        assert_eq!(tree.outsider(0, 2, 3).unwrap(), 0);
        let tree = t("(((x,y),z),w)");
        assert_eq!(tree.outsider(0, 1, 3).unwrap(), 3);
        assert!(tree.outsider(0, 0, 1).is_err());
        assert!(tree.outsider(0, 1, 9).is_err());
        assert!(t("(x,y,z)").outsider(0, 1, 2).is_err());
    }

    #[test]
    fn outsider_counts() {
        assert_eq!(t("((x1,x2),x3)").all_outsider_triples().unwrap().len(), 1);
        assert_eq!(
            t("((x1,x2),(x3,x4))").all_outsider_triples().unwrap().len(),
            4
        );
        let ten = "(((x1,x2),(x3,x4)),((x5,(x6,x7)),(x8,(x9,x10))))";
        assert_eq!(t(ten).all_outsider_triples().unwrap().len(), 120);
        assert_eq!(
            t("((x,y),(x,z))").all_outsider_triples(),
            Err(Error::RepeatedLabels)
        );
        assert_eq!(t("(x,y,z)").all_outsider_triples(), Err(Error::NotBinary));
    }

    #[test]
    fn shape_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| enumerate_tree_shapes(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105, 945]);
        assert!(matches!(
            enumerate_tree_shapes(9),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn internal_nodes_fewer_than_leaves() {
        let tree = t("((x1,x2),x3)");
        assert_eq!((tree.node_count(), tree.is_binary()), (2, true));
        let tree = t("(x1,x2,x3)");
        assert_eq!((tree.node_count(), tree.is_binary()), (1, false));
    }

    #[test]
    fn json_form() {
        let tree = t("((x1,x2),x3)");
        let v = tree.to_json();
        assert_eq!(
            v,
            json!({"node":[{"node":[{"leaf":"x1"},{"leaf":"x2"}]},{"leaf":"x3"}]})
        );
        assert_eq!(Tree::from_json(&v).unwrap(), tree);
        assert!(Tree::from_json(&json!({"node":[{"leaf":"x"}]})).is_err());
    }

    #[test]
    fn internal_node_paths() {
        let tree = t("(((x1,x2),x3),(x4,x5))");
        let paths: Vec<String> = tree.internal_nodes().into_iter().map(|p| p.0).collect();
        assert_eq!(paths, vec!["", "L", "LL", "R"]);
    }

    #[test]
    fn var_reordering() {
        let a = t("((x,y),(z,w))");
        let b = t("((z,w),(y,x))").with_var_order(a.vars()).unwrap();
        assert!(a.same_shape(&b));
        assert!(t("((x,y),q)").with_var_order(a.vars()).is_err());
    }
}

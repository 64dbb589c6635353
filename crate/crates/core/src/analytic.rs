//! Exact-coefficient constraints and decompositions for polynomial tree
//! functions.
//!
//! For a binary tree with distinct labels a polynomial `F` is a tree
//! function iff `F_il F_j = F_jl F_i` for every triple whose outsider is
//! `x_l`. This module checks those identities, emits the reduced identity
//! set, reconstructs node polynomials, and evaluates the determinant test
//! for the repeated-label form `g(f(x,y), h(x,z))`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::scalar::Scalar;
use crate::tree::{child_step, Tree, TreeNode, Triple};

type Q = BigRational;
type RatPoly = MPoly<Q>;

/// Default cap on the estimated size of a residual polynomial.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintEntry {
    pub triple: Triple,
    pub holds: bool,
    /// `F_il F_j - F_jl F_i`.
    pub residual: RatPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub entries: Vec<ConstraintEntry>,
}

impl ConstraintReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn first_violation(&self) -> Option<&ConstraintEntry> {
        self.entries.iter().find(|e| !e.holds)
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        json!({
            "holds": self.holds(),
            "triples": self.entries.iter().map(|e| json!({
                "i": names[e.triple.i],
                "j": names[e.triple.j],
                "l": names[e.triple.l],
                "holds": e.holds,
                "residual": e.residual.display_with(names),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_tree_arity(f: &RatPoly, t: &Tree) -> Result<()> {
    t.require_binary_distinct()?;
    if f.arity() != t.var_count() {
        return Err(Error::ArityMismatch {
            expected: t.var_count(),
            found: f.arity(),
        });
    }
    Ok(())
}

fn guarded_product(
    a: &RatPoly,
    b: &RatPoly,
    c: &RatPoly,
    d: &RatPoly,
    budget: usize,
) -> Result<RatPoly> {
    let estimated = a.term_count() * b.term_count() + c.term_count() * d.term_count();
    if estimated > budget {
        return Err(Error::TermBudget { budget, estimated });
    }
    Ok(&(a * b) - &(c * d))
}

/// `F_il F_j - F_jl F_i`.
pub fn triple_residual(f: &RatPoly, t: &Triple) -> Result<RatPoly> {
    triple_residual_budgeted(f, t, DEFAULT_TERM_BUDGET)
}

fn triple_residual_budgeted(f: &RatPoly, t: &Triple, budget: usize) -> Result<RatPoly> {
    let (fi, fj) = (f.derivative(t.i)?, f.derivative(t.j)?);
    guarded_product(&fi.derivative(t.l)?, &fj, &fj.derivative(t.l)?, &fi, budget)
}

/// Evaluates the identity for every outsider triple of `t`.
pub fn constraint_check(f: &RatPoly, t: &Tree) -> Result<ConstraintReport> {
    constraint_check_budgeted(f, t, DEFAULT_TERM_BUDGET)
}

pub fn constraint_check_budgeted(f: &RatPoly, t: &Tree, budget: usize) -> Result<ConstraintReport> {
    check_tree_arity(f, t)?;
    let entries = t
        .all_outsider_triples()?
        .into_iter()
        .map(|triple| {
            let residual = triple_residual_budgeted(f, &triple, budget)?;
            Ok(ConstraintEntry {
                triple,
                holds: residual.is_zero(),
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstraintReport { entries })
}

/// `d^(k+1) F / dx_i dx_l^k * F_j - d^(k+1) F / dx_j dx_l^k * F_i`.
pub fn higher_order_residual(f: &RatPoly, t: &Triple, k: usize) -> Result<RatPoly> {
    let (fi, fj) = (f.derivative(t.i)?, f.derivative(t.j)?);
    let ls = vec![t.l; k];
    guarded_product(
        &fi.derivative_multi(&ls)?,
        &fj,
        &fj.derivative_multi(&ls)?,
        &fi,
        DEFAULT_TERM_BUDGET,
    )
}

/// `F_ij F_a F_b = F_ab F_i F_j` with common first-derivative factors removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedIdentity {
    pub pair: (usize, usize),
    pub anchors: (usize, usize),
}

impl ReducedIdentity {
    /// First-derivative factors on each side after cancellation.
    pub fn factors(&self) -> (Vec<usize>, Vec<usize>) {
        let (i, j) = self.pair;
        let (a, b) = self.anchors;
        let mut lhs = vec![a, b];
        let mut rhs = vec![i, j];
        let mut k = 0;
        while k < lhs.len() {
            if let Some(pos) = rhs.iter().position(|&r| r == lhs[k]) {
                rhs.remove(pos);
                lhs.remove(k);
            } else {
                k += 1;
            }
        }
        (lhs, rhs)
    }

    /// Left side minus right side.
    pub fn residual(&self, f: &RatPoly) -> Result<RatPoly> {
        let (lf, rf) = self.factors();
        let mut lhs = f.derivative_multi(&[self.pair.0, self.pair.1])?;
        for v in lf {
            lhs = &lhs * &f.derivative(v)?;
        }
        let mut rhs = f.derivative_multi(&[self.anchors.0, self.anchors.1])?;
        for v in rf {
            rhs = &rhs * &f.derivative(v)?;
        }
        Ok(&lhs - &rhs)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let (lf, rf) = self.factors();
        let d2 = |a: usize, b: usize| format!("F_{}{}", names[a], names[b]);
        let side = |head: String, fs: &[usize]| {
            std::iter::once(head)
                .chain(fs.iter().map(|&v| format!("F_{}", names[v])))
                .collect::<Vec<_>>()
                .join("*")
        };
        format!(
            "{} = {}",
            side(d2(self.pair.0, self.pair.1), &lf),
            side(d2(self.anchors.0, self.anchors.1), &rf)
        )
    }
}

/// Ratio-chain identities: at every node, each cross pair `(i, j)` is tied to
/// the anchor pair (first left leaf, last right leaf). `C(n-1, 2)` in total.
pub fn reduced_constraints(t: &Tree) -> Result<Vec<ReducedIdentity>> {
    t.require_binary_distinct()?;
    let mut out = Vec::new();
    fn walk(node: &TreeNode, out: &mut Vec<ReducedIdentity>) {
        if let TreeNode::Node(children) = node {
            let (left, right) = (children[0].leaves(), children[1].leaves());
            let (a, b) = (left[0], right[right.len() - 1]);
            for &i in &left {
                for &j in &right {
                    if (i, j) != (a, b) {
                        out.push(ReducedIdentity {
                            pair: (i, j),
                            anchors: (a, b),
                        });
                    }
                }
            }
            walk(&children[0], out);
            walk(&children[1], out);
        }
    }
    walk(t.root(), &mut out);
    Ok(out)
}

/// Whether every reduced identity holds for `f`.
pub fn reduced_check(f: &RatPoly, t: &Tree) -> Result<bool> {
    check_tree_arity(f, t)?;
    for id in reduced_constraints(t)? {
        if !id.residual(f)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds univariate `h` with `h(xi) = a`, by elimination on leading terms.
pub fn solve_composition(a: &RatPoly, xi: &RatPoly) -> Result<RatPoly> {
    if a.arity() != xi.arity() {
        return Err(Error::ArityMismatch {
            expected: xi.arity(),
            found: a.arity(),
        });
    }
    if xi.is_constant() {
        return Err(Error::NoComposition);
    }
    if a.is_zero() {
        return Ok(MPoly::zero(1));
    }
    let (da, dx) = (a.degree().unwrap_or(0), xi.degree().unwrap_or(0));
    if da % dx != 0 {
        return Err(Error::NoComposition);
    }
    let top = da / dx;
    let (lead_exp, lead_coef) = {
        let (e, c) = xi.sorted_terms()[0];
        (e.clone(), c.clone())
    };
    let mut powers = vec![MPoly::one(xi.arity())];
    for k in 1..=top {
        powers.push(&powers[k as usize - 1] * xi);
    }
    let mut rest = a.clone();
    let mut h = MPoly::zero(1);
    for k in (0..=top).rev() {
        let mono: Vec<u32> = lead_exp.iter().map(|&e| e * k).collect();
        let c = rest.coefficient(&mono) / pow_q(&lead_coef, k);
        if !c.is_zero() {
            rest = &rest - &powers[k as usize].scale(&c);
            h = &h + &MPoly::monomial(1, vec![k], c);
        }
    }
    if rest.is_zero() {
        Ok(h)
    } else {
        Err(Error::NoComposition)
    }
}

fn pow_q(x: &Q, k: u32) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * x)
}

/// Node polynomials in `(u, v)` keyed by node path, and the base point used.
///
/// A tree that is a single leaf stores one univariate polynomial at `""`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDecomposition {
    pub nodes: BTreeMap<String, RatPoly>,
    pub base_point: Vec<Q>,
}

impl PolyDecomposition {
    pub fn to_json(&self) -> Value {
        let uv = ["u".to_string(), "v".to_string()];
        json!({
            "nodes": self.nodes.iter().map(|(k, p)| (k.clone(), json!(p.display_with(&uv[..p.arity()])))).collect::<serde_json::Map<_, _>>(),
            "base_point": self.base_point.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        })
    }

    /// Inverse of [`to_json`](Self::to_json); `t` fixes the node arity.
    pub fn from_json(value: &Value, t: &Tree) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("decomposition JSON: {m}"));
        let arity = if matches!(t.root(), TreeNode::Leaf(_)) {
            1
        } else {
            2
        };
        let resolve = |name: &str| ["u", "v"][..arity].iter().position(|v| *v == name);
        let nodes = value["nodes"]
            .as_object()
            .ok_or_else(|| bad("missing \"nodes\""))?
            .iter()
            .map(|(k, p)| {
                let text = p
                    .as_str()
                    .ok_or_else(|| bad("node polynomial is not a string"))?;
                Ok((k.clone(), MPoly::parse_with(text, arity, resolve)?))
            })
            .collect::<Result<_>>()?;
        let base_point = value["base_point"]
            .as_array()
            .ok_or_else(|| bad("missing \"base_point\""))?
            .iter()
            .map(|q| {
                q.as_str()
                    .and_then(|s| s.parse::<Q>().ok())
                    .ok_or_else(|| bad("base point entry is not a rational"))
            })
            .collect::<Result<_>>()?;
        Ok(PolyDecomposition { nodes, base_point })
    }
}

/// Bottom-up composition of the node polynomials.
pub fn recompose(t: &Tree, d: &PolyDecomposition) -> Result<RatPoly> {
    let n = t.var_count();
    let missing = |p: &str| Error::InvalidTree(format!("missing polynomial for node '{p}'"));
    if let TreeNode::Leaf(v) = t.root() {
        let p = d.nodes.get("").ok_or_else(|| missing(""))?;
        return p.compose(&[MPoly::var(n, *v)]);
    }
    fn go(node: &TreeNode, path: &mut String, n: usize, d: &PolyDecomposition) -> Result<RatPoly> {
        match node {
            TreeNode::Leaf(v) => Ok(MPoly::var(n, *v)),
            TreeNode::Node(children) => {
                let g = d
                    .nodes
                    .get(path.as_str())
                    .ok_or_else(|| {
                        Error::InvalidTree(format!("missing polynomial for node '{path}'"))
                    })?
                    .clone();
                let mut subs = Vec::with_capacity(children.len());
                for (k, c) in children.iter().enumerate() {
                    let step = child_step(k, children.len());
                    path.push_str(&step);
                    subs.push(go(c, path, n, d)?);
                    path.truncate(path.len() - step.len());
                }
                g.compose(&subs)
            }
        }
    }
    go(t.root(), &mut String::new(), n, d)
}

/// Composes explicit node polynomials (keyed like [`PolyDecomposition`]).
pub fn compose_on_tree(t: &Tree, nodes: &BTreeMap<String, RatPoly>) -> Result<RatPoly> {
    recompose(
        t,
        &PolyDecomposition {
            nodes: nodes.clone(),
            base_point: Vec::new(),
        },
    )
}

const GRID: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
const GRID_LIMIT: usize = 20_000;
const RANDOM_TRIES: usize = 2_000;

/// A point where every non-vanishing first partial of `f` is non-zero.
pub fn find_base_point(f: &RatPoly, seed: u64) -> Result<Vec<Q>> {
    let n = f.arity();
    let partials: Vec<RatPoly> = f
        .support()
        .into_iter()
        .map(|i| f.derivative(i))
        .collect::<Result<_>>()?;
    let good = |p: &[Q]| partials.iter().all(|d| !d.eval(p).is_zero());
    let total = GRID
        .len()
        .checked_pow(n as u32)
        .unwrap_or(usize::MAX)
        .min(GRID_LIMIT);
    for mut idx in 0..total {
        let mut p = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = GRID[idx % GRID.len()];
            p.push(Q::from_ratio(a, b));
            idx /= GRID.len();
        }
        if good(&p) {
            return Ok(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIES {
        let p: Vec<Q> = (0..n)
            .map(|_| Q::from_ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7)))
            .collect();
        if good(&p) {
            return Ok(p);
        }
    }
    Err(Error::NonVanishingFailed)
}

/// Global decomposition of a polynomial onto a binary tree.
pub fn decompose_polynomial(f: &RatPoly, t: &Tree) -> Result<PolyDecomposition> {
    decompose_polynomial_seeded(f, t, 0)
}

/// As [`decompose_polynomial`]; `seed` drives the random base-point fallback.
pub fn decompose_polynomial_seeded(f: &RatPoly, t: &Tree, seed: u64) -> Result<PolyDecomposition> {
    let report = constraint_check(f, t)?;
    if let Some(bad) = report.first_violation() {
        return Err(Error::ConstraintViolated {
            i: bad.triple.i,
            j: bad.triple.j,
            l: bad.triple.l,
        });
    }
    let base = find_base_point(f, seed)?;
    let n = f.arity();
    let mut nodes = BTreeMap::new();
    match t.root() {
        TreeNode::Leaf(v) => {
            nodes.insert(String::new(), f.project(&[*v])?);
        }
        root => {
            realize(root, &mut String::new(), f, &base, &mut nodes)?;
        }
    }
    let d = PolyDecomposition {
        nodes,
        base_point: base,
    };
    if recompose(t, &d)? != *f {
        return Err(Error::DecompositionFailed {
            stage: "final verification".into(),
        });
    }
    debug_assert_eq!(d.base_point.len(), n);
    Ok(d)
}

fn stage(path: &str, what: &str) -> Error {
    let at = if path.is_empty() {
        "root".to_string()
    } else {
        format!("node {path}")
    };
    Error::DecompositionFailed {
        stage: format!("{what} at {at}"),
    }
}

/// Writes `f = g(phi, psi)` for the node, recursing into internal children.
/// Leaf children are absorbed into `g`.
fn realize(
    node: &TreeNode,
    path: &mut String,
    f: &RatPoly,
    base: &[Q],
    out: &mut BTreeMap<String, RatPoly>,
) -> Result<()> {
    let children = node.children();
    let (left, right) = (&children[0], &children[1]);
    let (va, vb) = (left.leaves(), right.leaves());
    let phi = inner_function(f, &va, &vb, base).map_err(|_| stage(path, "left inner function"))?;
    let psi = inner_function(f, &vb, &va, base).map_err(|_| stage(path, "right inner function"))?;
    let mut g = outer_function(f, &phi, &psi, &vb).map_err(|_| stage(path, "outer function"))?;
    for (k, (child, part)) in [(left, &phi), (right, &psi)].into_iter().enumerate() {
        match child {
            TreeNode::Leaf(v) => {
                let uni = part.project(&[*v])?;
                let lifted = uni.embed(2, &[k]);
                let other = MPoly::var(2, 1 - k);
                let subs = if k == 0 {
                    [lifted, other]
                } else {
                    [other, lifted]
                };
                g = g.compose(&subs)?;
            }
            inner => {
                let step = child_step(k, 2);
                path.push_str(&step);
                realize(inner, path, part, base, out)?;
                path.truncate(path.len() - step.len());
            }
        }
    }
    out.insert(path.clone(), g);
    Ok(())
}

/// Lowest-degree polynomial in `side` whose gradient is parallel to that of
/// `xi = f(x_side, base_other)`. Zero when `xi` is constant.
fn inner_function(f: &RatPoly, side: &[usize], other: &[usize], base: &[Q]) -> Result<RatPoly> {
    let n = f.arity();
    let mut fixed = vec![None; n];
    for &i in other {
        fixed[i] = Some(base[i].clone());
    }
    let xi = f.partial_eval(&fixed);
    if xi.is_constant() {
        return Ok(MPoly::zero(n));
    }
    if side.len() == 1 {
        return Ok(MPoly::var(n, side[0]));
    }
    let grads: Vec<RatPoly> = side
        .iter()
        .map(|&i| xi.derivative(i))
        .collect::<Result<_>>()?;
    let pivot = grads
        .iter()
        .position(|g| !g.is_zero())
        .expect("non-constant xi");
    let total = xi.degree().unwrap_or(0);
    for d in (1..total).filter(|d| total.is_multiple_of(*d)) {
        let monos = monomials_up_to(n, side, d);
        // column c: (d m_c/dx_p) xi_b - (d m_c/dx_b) xi_p for the pivot p;
        // the remaining pairs follow since xi_p is not identically zero
        let mut rows: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
        let mut entries: Vec<Vec<(usize, Q)>> = Vec::with_capacity(monos.len());
        for m in &monos {
            let mono = MPoly::monomial(n, m.clone(), Q::one());
            let dp = mono.derivative(side[pivot])?;
            let mut col = Vec::new();
            for b in (0..side.len()).filter(|&b| b != pivot) {
                let expr = &(&dp * &grads[b]) - &(&mono.derivative(side[b])? * &grads[pivot]);
                for (e, c) in expr.terms() {
                    let next = rows.len();
                    let r = *rows.entry((b, e.clone())).or_insert(next);
                    col.push((r, c.clone()));
                }
            }
            entries.push(col);
        }
        let mut matrix = vec![vec![Q::zero(); monos.len()]; rows.len()];
        for (c, col) in entries.into_iter().enumerate() {
            for (r, v) in col {
                matrix[r][c] = v;
            }
        }
        if let Some(x) = nullspace_vector(matrix, monos.len()) {
            let phi = MPoly::from_terms(n, monos.into_iter().zip(x));
            let lead = phi.sorted_terms()[0].1.clone();
            return Ok(phi.scale(&(Q::one() / lead)));
        }
    }
    let phi = &xi - &MPoly::constant(n, xi.constant_term());
    let lead = phi.sorted_terms()[0].1.clone();
    Ok(phi.scale(&(Q::one() / lead)))
}

/// Exponent vectors over `vars` with total degree in `1..=d`.
fn monomials_up_to(n: usize, vars: &[usize], d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn go(k: usize, vars: &[usize], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == vars.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[vars[k]] = e;
            go(k + 1, vars, left - e, cur, out);
        }
        cur[vars[k]] = 0;
    }
    go(0, vars, d, &mut vec![0; n], &mut out);
    out
}

/// A non-zero solution of `matrix * x = 0`, if one exists.
fn nullspace_vector(mut m: Vec<Vec<Q>>, cols: usize) -> Option<Vec<Q>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Q::one() / m[row][c].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for k in c..cols {
                    let delta = factor.clone() * m[row][k].clone();
                    m[r][k] = m[r][k].clone() - delta;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Q::zero(); cols];
    x[free] = Q::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    Some(x)
}

/// Univariate `h` with `h(xi) = a`, allowing constant `xi` when `a` is constant.
fn compose_on(a: &RatPoly, xi: &RatPoly) -> Result<RatPoly> {
    if xi.is_constant() {
        return if a.is_constant() {
            Ok(MPoly::constant(1, a.constant_term()))
        } else {
            Err(Error::NoComposition)
        };
    }
    solve_composition(a, xi)
}

/// Bivariate `g` with `f = g(phi, psi)`, `psi` living on `right`.
fn outer_function(f: &RatPoly, phi: &RatPoly, psi: &RatPoly, right: &[usize]) -> Result<RatPoly> {
    let n = f.arity();
    // f = sum_m A_m(x_left) x_right^m
    let mut by_right: BTreeMap<Vec<u32>, RatPoly> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut left_part = e.clone();
        let mut key = vec![0; n];
        for &i in right {
            key[i] = e[i];
            left_part[i] = 0;
        }
        let acc = by_right.entry(key).or_insert_with(|| MPoly::zero(n));
        *acc = &*acc + &MPoly::monomial(n, left_part, c.clone());
    }
    // G(u, x_right) = sum_k u^k c_k(x_right)
    let mut by_u: BTreeMap<u32, RatPoly> = BTreeMap::new();
    for (m, a_m) in by_right {
        let h = compose_on(&a_m, phi)?;
        for (e, c) in h.terms() {
            let acc = by_u.entry(e[0]).or_insert_with(|| MPoly::zero(n));
            *acc = &*acc + &MPoly::monomial(n, m.clone(), c.clone());
        }
    }
    let mut g = MPoly::zero(2);
    for (k, c_k) in by_u {
        let w = compose_on(&c_k, psi)?;
        for (e, c) in w.terms() {
            g = &g + &MPoly::monomial(2, vec![k, e[0]], c.clone());
        }
    }
    Ok(g)
}

/// 7x7 determinant for `F(x, y, z) = g(f(x, y), h(x, z))`; returns whether it
/// vanishes identically, and the determinant.
pub fn repeated_label_det_check(f: &RatPoly) -> Result<(bool, RatPoly)> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: f.arity(),
        });
    }
    let (x, y, z) = (0, 1, 2);
    let d = |vars: &[usize]| f.derivative_multi(vars);
    let zero = MPoly::zero(3);
    let two = |p: RatPoly| p.scale(&Q::from_integer(2.into()));
    let m: Vec<Vec<RatPoly>> = vec![
        vec![
            d(&[x])?,
            d(&[y])?,
            d(&[z])?,
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
        ],
        vec![
            d(&[x, y])?,
            d(&[y, y])?,
            d(&[y, z])?,
            d(&[y])?,
            zero.clone(),
            zero.clone(),
            zero.clone(),
        ],
        vec![
            d(&[x, z])?,
            d(&[y, z])?,
            d(&[z, z])?,
            zero.clone(),
            d(&[z])?,
            zero.clone(),
            zero.clone(),
        ],
        vec![
            d(&[x, y, z])?,
            d(&[y, y, z])?,
            d(&[y, z, z])?,
            d(&[y, z])?,
            d(&[y, z])?,
            zero.clone(),
            zero.clone(),
        ],
        vec![
            d(&[x, y, y])?,
            d(&[y, y, y])?,
            d(&[y, y, z])?,
            two(d(&[y, y])?),
            zero.clone(),
            d(&[y])?,
            zero.clone(),
        ],
        vec![
            d(&[x, z, z])?,
            d(&[y, z, z])?,
            d(&[z, z, z])?,
            zero.clone(),
            two(d(&[z, z])?),
            zero.clone(),
            d(&[z])?,
        ],
        vec![
            d(&[x, y, z, z])?,
            d(&[y, y, z, z])?,
            d(&[y, z, z, z])?,
            d(&[y, z, z])?,
            two(d(&[y, z, z])?),
            zero.clone(),
            d(&[y, z])?,
        ],
    ];
    let det = determinant(&m);
    Ok((det.is_zero(), det))
}

/// Laplace expansion row by row, memoized over the set of used columns.
pub fn determinant<S: Scalar>(m: &[Vec<MPoly<S>>]) -> MPoly<S> {
    let size = m.len();
    let arity = m.first().and_then(|r| r.first()).map_or(0, |p| p.arity());
    let mut dp: Vec<Option<MPoly<S>>> = vec![None; 1 << size];
    dp[0] = Some(MPoly::one(arity));
    for mask in 0usize..1 << size {
        let row = mask.count_ones() as usize;
        if row == size {
            continue;
        }
        let Some(acc) = dp[mask].take() else { continue };
        if acc.is_zero() {
            continue;
        }
        for c in (0..size).filter(|c| mask >> c & 1 == 0) {
            if m[row][c].is_zero() {
                continue;
            }
            let mut term = &acc * &m[row][c];
            if (mask >> (c + 1)).count_ones() % 2 == 1 {
                term = -&term;
            }
            let slot = &mut dp[mask | 1 << c];
            *slot = Some(match slot.take() {
                Some(prev) => &prev + &term,
                None => term,
            });
        }
    }
    dp[(1 << size) - 1]
        .take()
        .unwrap_or_else(|| MPoly::zero(arity))
}

/// `(n (k^2 + 1), C(k + n, n))`.
pub fn variety_dims(n: u64, k: u64) -> (BigUint, BigUint) {
    let bound = BigUint::from(n) * (BigUint::from(k) * k + 1u32);
    let ambient = binomial(BigUint::from(k + n), BigUint::from(n));
    (bound, ambient)
}

impl fmt::Display for ReducedIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = [self.pair.0, self.pair.1, self.anchors.0, self.anchors.1]
            .into_iter()
            .max()
            .unwrap_or(0)
            + 1;
        f.write_str(&self.display_with(&crate::tree::standard_vars(n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_tree;

    fn p(s: &str, n: usize) -> RatPoly {
        MPoly::parse(s, n).unwrap()
    }

    fn tree(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn product_passes_and_non_example_fails() {
        let t = tree("((x1,x2),x3)");
        assert!(constraint_check(&p("x1*x2*x3", 3), &t).unwrap().holds());
        let report = constraint_check(&p("x1*x2*x3 + x1 + x2 + x3", 3), &t).unwrap();
        assert!(!report.holds());
        // F_13 F_2 - F_23 F_1 = x2 (x1 x3 + 1) - x1 (x2 x3 + 1)
        assert_eq!(report.entries[0].residual, p("x2 - x1", 3));
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            constraint_check(&p("x1", 2), &tree("((x1,x2),x3)")),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn reduced_counts() {
        assert_eq!(reduced_constraints(&tree("((x1,x2),x3)")).unwrap().len(), 1);
        let ids = reduced_constraints(&tree("((x,y),(z,w))")).unwrap();
        assert_eq!(ids.len(), 3);
        let names: Vec<String> = ["x", "y", "z", "w"].iter().map(|s| s.to_string()).collect();
        let text: Vec<String> = ids.iter().map(|i| i.display_with(&names)).collect();
        assert_eq!(
            text,
            [
                "F_xz*F_w = F_xw*F_z",
                "F_yz*F_x*F_w = F_xw*F_y*F_z",
                "F_yw*F_x = F_xw*F_y"
            ]
        );
        let single = reduced_constraints(&tree("((x1,x2),x3)")).unwrap();
        assert_eq!(
            single[0].display_with(&crate::tree::standard_vars(3)),
            "F_x2x3*F_x1 = F_x1x3*F_x2"
        );
    }

    #[test]
    fn composition_solver() {
        let xi = p("x1 + x2", 2);
        assert_eq!(solve_composition(&xi.pow(2), &xi).unwrap(), p("x1^2", 1));
        assert_eq!(
            solve_composition(&p("x1", 1), &p("x1^2", 1)),
            Err(Error::NoComposition)
        );
        let xi = p("x1^2*x2 + 3*x3 - 1/2", 3);
        let a = &(&xi.pow(3) - &xi.scale(&Q::from_integer(2.into())))
            + &MPoly::constant(3, Q::from_integer(5.into()));
        assert_eq!(solve_composition(&a, &xi).unwrap(), p("x1^3 - 2*x1 + 5", 1));
        assert_eq!(
            solve_composition(&p("x1", 2), &p("1", 2)),
            Err(Error::NoComposition)
        );
    }

    #[test]
    fn decomposes_product() {
        let t = tree("((x1,x2),x3)");
        let f = p("x1*x2*x3", 3);
        let d = decompose_polynomial(&f, &t).unwrap();
        assert_eq!(recompose(&t, &d).unwrap(), f);
        assert_eq!(d.nodes.len(), 2);
    }

    #[test]
    fn decomposes_shifted_product() {
        let t = tree("((x1,x2),x3)");
        let f = p("x1*x3 + x2*x3 + x1 + x2", 3);
        let d = decompose_polynomial(&f, &t).unwrap();
        assert_eq!(d.nodes["L"], p("x1 + x2", 2));
        assert_eq!(d.nodes[""], p("x1*x2 + x1", 2));
    }

    #[test]
    fn inner_function_is_not_the_restriction() {
        // (x1+x2)^2 + (x1+x2) x3: the coefficient of x3 is not a polynomial in
        // f(x1, x2, c) for any c, so the inner function must be x1 + x2 itself
        let t = tree("((x1,x2),x3)");
        let f = p("x1^2 + 2*x1*x2 + x2^2 + x1*x3 + x2*x3", 3);
        let d = decompose_polynomial(&f, &t).unwrap();
        assert_eq!(d.nodes["L"], p("x1 + x2", 2));
        assert_eq!(recompose(&t, &d).unwrap(), f);
    }

    #[test]
    fn dead_variables() {
        let t = tree("((x1,x2),(x3,x4))");
        let f = p("x1*x3 + x3", 4);
        let d = decompose_polynomial(&f, &t).unwrap();
        assert_eq!(recompose(&t, &d).unwrap(), f);
        let d = decompose_polynomial(&p("7", 4), &t).unwrap();
        assert_eq!(recompose(&t, &d).unwrap(), p("7", 4));
    }

    #[test]
    fn violation_reported() {
        let t = tree("((x1,x2),x3)");
        let err = decompose_polynomial(&p("x1*x2*x3 + x1 + x2 + x3", 3), &t).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolated { l: 2, .. }));
    }

    #[test]
    fn single_leaf() {
        let t = tree("x1");
        let f = p("x1^2 + 1", 1);
        let d = decompose_polynomial(&f, &t).unwrap();
        assert_eq!(recompose(&t, &d).unwrap(), f);
        assert_eq!(PolyDecomposition::from_json(&d.to_json(), &t).unwrap(), d);
    }

    #[test]
    fn decomposition_json_round_trip() {
        let t = tree("((x1,x2),(x3,x4))");
        let f = p("x1^2*x2 + 1/2*x3*x4^2 + -3*x1^2*x2*x3*x4^2", 4);
        let d = decompose_polynomial(&f, &t).unwrap();
        let back = PolyDecomposition::from_json(&d.to_json(), &t).unwrap();
        assert_eq!(back, d);
        assert_eq!(recompose(&t, &back).unwrap(), f);
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![p("2", 1), p("x1", 1)], vec![p("1", 1), p("x1", 1)]];
        assert_eq!(determinant(&m), p("x1", 1));
        let m: Vec<Vec<RatPoly>> = (0..3)
            .map(|r| {
                (0..3)
                    .map(|c| MPoly::constant(1, Q::from_integer(((r * 3 + c) as i64).into())))
                    .collect()
            })
            .collect();
        assert!(determinant(&m).is_zero());
    }

    #[test]
    fn determinant_vanishes_on_symmetric_examples() {
        assert!(
            repeated_label_det_check(&p("x1*x2 + x2*x3 + x3*x1", 3))
                .unwrap()
                .0
        );
        assert!(
            repeated_label_det_check(&p("x1*x2*x3 + x1 + x2 + x3", 3))
                .unwrap()
                .0
        );
        assert!(repeated_label_det_check(&p("x1", 2)).is_err());
    }

    #[test]
    fn determinant_vanishes_on_superpositions() {
        // g(f(x, y), h(x, z)) with g = u^2 v + u, f = x y^2 + y, h = x^2 z + z^3
        let g = p("x1^2*x2 + x1", 2);
        let f = g
            .compose(&[p("x1*x2^2 + x2", 3), p("x1^2*x3 + x3^3", 3)])
            .unwrap();
        assert!(repeated_label_det_check(&f).unwrap().0);
    }

    #[test]
    fn dims() {
        assert_eq!(
            variety_dims(1, 3),
            (BigUint::from(10u32), BigUint::from(4u32))
        );
        assert_eq!(
            variety_dims(4, 2),
            (BigUint::from(20u32), BigUint::from(15u32))
        );
        assert_eq!(
            variety_dims(10, 10),
            (BigUint::from(1010u32), BigUint::from(184756u32))
        );
    }
}

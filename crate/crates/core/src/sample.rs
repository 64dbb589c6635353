//! Seeded random instances: trees, composed tree polynomials and layered
//! networks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::compose_on_tree;
use crate::error::Result;
use crate::poly::MPoly;
use crate::scalar::Scalar;
use crate::tenn::{LayeredNetwork, NetNode};
use crate::tree::{standard_vars, Tree, TreeNode};
use crate::RatPoly;

/// Composed polynomials with more terms than this are resampled.
pub const MAX_SAMPLE_TERMS: usize = 120;

const MAX_RESAMPLES: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random split of a shuffled leaf set, labels `x1..xn`.
pub fn random_binary_tree<R: Rng>(rng: &mut R, n: usize) -> Tree {
    assert!(n >= 1);
    let mut leaves: Vec<usize> = (0..n).collect();
    leaves.shuffle(rng);
    fn build<R: Rng>(rng: &mut R, leaves: &[usize]) -> TreeNode {
        if leaves.len() == 1 {
            return TreeNode::Leaf(leaves[0]);
        }
        let cut = rng.gen_range(1..leaves.len());
        TreeNode::Node(vec![build(rng, &leaves[..cut]), build(rng, &leaves[cut..])])
    }
    Tree::new(build(rng, &leaves), standard_vars(n)).expect("valid random tree")
}

fn small_coefficient<R: Rng>(rng: &mut R) -> BigRational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3..=3);
    }
    BigRational::from_ratio(c, 1)
}

/// Random polynomial in `(u, v)` of total degree at most `max_degree`
/// depending on both variables, integer coefficients in `[-3, 3]`.
pub fn random_bivariate<R: Rng>(rng: &mut R, max_degree: u32) -> RatPoly {
    let monomials: Vec<Vec<u32>> = (0..=max_degree)
        .flat_map(|a| (0..=max_degree - a).map(move |b| vec![a, b]))
        .collect();
    loop {
        let count = rng.gen_range(2..=4);
        let terms: Vec<(Vec<u32>, BigRational)> = monomials
            .choose_multiple(rng, count)
            .map(|e| (e.clone(), small_coefficient(rng)))
            .collect();
        let p = MPoly::from_terms(2, terms);
        if p.depends_on(0) && p.depends_on(1) {
            return p;
        }
    }
}

/// Total-degree budget of a composed polynomial: the node degrees along any
/// root-to-leaf path multiply to at most this.
pub const MAX_SAMPLE_DEGREE: u32 = 6;

/// Random node polynomials on `t` composed bottom-up; resampled until the
/// result has at most [`MAX_SAMPLE_TERMS`] terms.
pub fn random_tree_polynomial<R: Rng>(rng: &mut R, t: &Tree, max_degree: u32) -> Result<RatPoly> {
    let paths: Vec<String> = t.internal_nodes().into_iter().map(|(p, _)| p).collect();
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let mut degree: BTreeMap<&str, u32> = BTreeMap::new();
        let mut nodes: BTreeMap<String, RatPoly> = BTreeMap::new();
        for p in &paths {
            let above: u32 = degree
                .iter()
                .filter(|(q, _)| p.starts_with(*q))
                .map(|(_, d)| *d)
                .product();
            let cap = (MAX_SAMPLE_DEGREE / above).clamp(1, max_degree);
            let d = rng.gen_range(1..=cap);
            degree.insert(p, d);
            nodes.insert(p.clone(), random_bivariate(rng, d));
        }
        let f = compose_on_tree(t, &nodes)?;
        if f.term_count() <= MAX_SAMPLE_TERMS {
            return Ok(f);
        }
        last = Some(f);
    }
    Ok(last.expect("at least one sample"))
}

/// `count` trees with 2..=5 leaves and polynomials composed on them
/// (node degree at most 3).
pub fn composed_instances(seed: u64, count: usize) -> Result<Vec<(Tree, RatPoly)>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=5);
            let t = random_binary_tree(&mut rng, n);
            let f = random_tree_polynomial(&mut rng, &t, 3)?;
            Ok((t, f))
        })
        .collect()
}

/// Random polynomial in `n` variables with `terms` monomials of degree at most `max_degree`.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, max_degree: u32, terms: usize) -> RatPoly {
    MPoly::from_terms(
        n,
        (0..terms).map(|_| {
            let mut e = vec![0u32; n];
            for _ in 0..rng.gen_range(1..=max_degree) {
                e[rng.gen_range(0..n)] += 1;
            }
            (e, small_coefficient(rng))
        }),
    )
}

/// Random layered network: 2..=4 inputs, 1..=4 layers, nodes reading 1..=3
/// distinct nodes of the layer below.
pub fn random_layered_network<R: Rng>(rng: &mut R) -> LayeredNetwork {
    let inputs: Vec<String> = (1..=rng.gen_range(2..=4))
        .map(|k| format!("x{k}"))
        .collect();
    let depth = rng.gen_range(1..=4);
    let mut below = inputs.clone();
    let mut layers = Vec::with_capacity(depth);
    for k in 0..depth {
        let width = if k + 1 == depth {
            1
        } else {
            rng.gen_range(1..=3)
        };
        let layer: Vec<NetNode> = (0..width)
            .map(|w| {
                let fan_in = rng.gen_range(1..=3.min(below.len()));
                NetNode {
                    id: format!("h{}_{}", k + 1, w + 1),
                    inputs: below.choose_multiple(rng, fan_in).cloned().collect(),
                }
            })
            .collect();
        below = layer.iter().map(|n| n.id.clone()).collect();
        layers.push(layer);
    }
    LayeredNetwork::new(inputs, layers).expect("valid random network")
}

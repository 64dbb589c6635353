use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use treefn::analytic::{find_base_point, reduced_check};
use treefn::sample::{
    composed_instances, random_binary_tree, random_layered_network, random_tree_polynomial, rng,
};
use treefn::tenn::burnside_brute_force;
use treefn::*;

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> std::result::Result<(), String> {
    ensure(
        elapsed <= limit,
        format!("took {elapsed:.1?}, limit {limit:?}"),
    )
}

fn tree(s: &str) -> Tree {
    parse_tree(s).unwrap()
}

fn count_formula() -> Outcome {
    let expected = [4usize, 16, 88, 520];
    let mut shapes = 0;
    for n in 1..=4 {
        let want = expected[n - 1];
        ensure(
            space_size(n as u32) == BigUint::from(want),
            format!("space_size({n})"),
        )?;
        for t in enumerate_tree_shapes(n).unwrap() {
            let e = enumerate_space(&t).unwrap();
            let b = brute_force_space(&t).unwrap();
            ensure(
                e.len() == want,
                format!("{t}: enumerated {} != {want}", e.len()),
            )?;
            ensure(
                b.len() == want,
                format!("{t}: brute force {} != {want}", b.len()),
            )?;
            ensure(
                e.members == b.members,
                format!("{t}: enumerated and brute-force sets differ"),
            )?;
            shapes += 1;
        }
    }
    Ok(format!("4, 16, 88, 520 on all {shapes} trees"))
}

fn constraint_membership() -> Outcome {
    let (mut cases, mut wrong, mut exact_wrong) = (0u64, Vec::new(), 0u64);
    for n in [3usize, 4] {
        let shapes = enumerate_tree_shapes(n).unwrap();
        ensure(shapes.len() == if n == 3 { 3 } else { 15 }, "tree count")?;
        for t in shapes {
            let space = enumerate_space(&t).unwrap();
            for word in 0..1u64 << (1 << n) {
                let tt = TruthTable::from_word(n, word);
                let p = anf_from_truth_table(&tt);
                let member = space.contains(&tt);
                if is_member(&t, &p).unwrap() != member {
                    wrong.push(format!("{t}:{}", tt.to_hex()));
                }
                if is_representable(&t, &p).unwrap() != member {
                    exact_wrong += 1;
                }
                cases += 1;
            }
        }
    }
    let summary = format!(
        "{} of {cases} cases disagree (e.g. {}); exact test disagrees on {exact_wrong}",
        wrong.len(),
        wrong.first().map_or("none", String::as_str)
    );
    ensure(wrong.is_empty(), summary.clone())?;
    Ok(summary)
}

fn brute_intersection(a: &str, b: &str) -> usize {
    let t1 = tree(a);
    let t2 = tree(b).with_var_order(t1.vars()).unwrap();
    let s1 = brute_force_space(&t1).unwrap();
    let s2 = brute_force_space(&t2).unwrap();
    s1.members.intersection(&s2.members).count()
}

fn worked_distances() -> Outcome {
    let start = Instant::now();
    let pairs = [
        ("((x,y),(z,w))", "(((x,y),z),w)", 296u32, "224/520", 0.4308),
        ("((x,y),(z,w))", "((x,z),(y,w))", 104u32, "416/520", 0.80),
    ];
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for (a, b, inter, frac, dec) in pairs {
        let d = distance(&tree(a), &tree(b)).unwrap();
        let brute = brute_intersection(a, b);
        ensure(
            d.intersection_size == BigUint::from(brute),
            format!("{a} vs {b}: brute force gives {brute}"),
        )?;
        report.push(format!(
            "{a} vs {b}: {} ({})",
            d.intersection_size,
            d.fraction()
        ));
        if d.intersection_size != BigUint::from(inter)
            || d.fraction() != frac
            || (d.decimal() - dec).abs() > 5e-5
        {
            failures.push(format!(
                "{a} vs {b}: got intersection {} distance {} = {:.4}, expected {inter} {frac} = {dec}",
                d.intersection_size,
                d.fraction(),
                d.decimal()
            ));
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    if failures.is_empty() {
        Ok(report.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn reconstruction() -> Outcome {
    let start = Instant::now();
    let shapes = enumerate_tree_shapes(4).unwrap();
    ensure(shapes.len() == 15, "tree count")?;
    for t in &shapes {
        let space = enumerate_space(t).unwrap();
        let back = reconstruct_tree(&space.members, 4).unwrap();
        ensure(
            back == t.canonical_form(),
            format!("{t} reconstructed as {back}"),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok("15/15 trees recovered".into())
}

fn discrete_round_trip() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for t in enumerate_tree_shapes(4).unwrap() {
        for member in enumerate_space(&t).unwrap().members {
            let assignment = decompose(&t, &anf_from_truth_table(&member))
                .map_err(|e| format!("{t}, {}: {e}", member.to_hex()))?;
            let back = evaluate(&t, &assignment).unwrap();
            ensure(
                back == member,
                format!("{t}, {}: evaluated to {}", member.to_hex(), back.to_hex()),
            )?;
            cases += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{cases} decompositions reproduce their tables"))
}

fn polynomial_necessity() -> Outcome {
    let instances = composed_instances(0, 100).unwrap();
    for (k, (t, f)) in instances.iter().enumerate() {
        ensure(
            constraint_check(f, t).unwrap().holds(),
            format!("instance {k} on {t} violates a constraint"),
        )?;
    }
    let t = tree("((x,y),z)");
    let f = RatPoly::parse_with("x*y*z + x + y + z", 3, |s| t.var_index(s)).unwrap();
    let report = constraint_check(&f, &t).unwrap();
    ensure(!report.holds(), "xyz+x+y+z passes")?;
    let residual = &report.entries[0].residual;
    ensure(!residual.is_zero(), "zero residual")?;
    Ok(format!(
        "100/100 pass; xyz+x+y+z residual {}",
        residual.display_with(t.vars())
    ))
}

fn polynomial_sufficiency() -> Outcome {
    let mut done = 0;
    for (k, (t, f)) in composed_instances(0, 100).unwrap().iter().enumerate() {
        if find_base_point(f, 0).is_err() {
            continue;
        }
        let d = decompose_polynomial(f, t).map_err(|e| format!("instance {k} on {t}: {e}"))?;
        ensure(
            recompose(t, &d).unwrap() == *f,
            format!("instance {k}: recomposition differs"),
        )?;
        done += 1;
    }
    ensure(
        done == 100,
        format!("only {done} instances met the precondition"),
    )?;
    Ok(format!("{done}/100 decomposed and recomposed exactly"))
}

fn reduced_identities() -> Outcome {
    for (n, want) in (3..=7).zip([1usize, 3, 6, 10, 15]) {
        let mut r = rng(n as u64);
        for _ in 0..5 {
            let t = random_binary_tree(&mut r, n);
            let got = reduced_constraints(&t).unwrap().len();
            ensure(
                got == want,
                format!("{t}: {got} identities, expected {want}"),
            )?;
        }
    }
    let mut r = rng(0);
    let (mut tested, mut accepted, mut rejected) = (0, 0, 0);
    while tested < 100 {
        let n = r.gen_range(3..=5);
        let target = random_binary_tree(&mut r, n);
        let source = if r.gen_bool(0.5) {
            target.clone()
        } else {
            random_binary_tree(&mut r, n)
        };
        let f = random_tree_polynomial(&mut r, &source, 3).unwrap();
        if (0..n).any(|i| f.derivative(i).unwrap().is_zero()) {
            continue;
        }
        tested += 1;
        let reduced = reduced_check(&f, &target).unwrap();
        let full = constraint_check(&f, &target).unwrap().holds();
        ensure(
            reduced == full,
            format!("{target}: reduced {reduced}, full {full}"),
        )?;
        if full {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    Ok(format!(
        "counts 1,3,6,10,15; 100 polynomials ({accepted} members, {rejected} non-members) agree"
    ))
}

fn determinant_pde() -> Outcome {
    let start = Instant::now();
    let p = |s: &str| RatPoly::parse(s, 3).unwrap();
    for s in ["x1*x2 + x2*x3 + x3*x1", "x1*x2*x3 + x1 + x2 + x3"] {
        let (zero, det) = repeated_label_det_check(&p(s)).unwrap();
        ensure(zero && det.is_zero(), format!("{s}: determinant not zero"))?;
    }
    let fixture = "x1^2*x2 + x2*x3^2 + x1*x3";
    let (zero, det) = repeated_label_det_check(&p(fixture)).unwrap();
    ensure(
        !zero && !det.is_zero(),
        format!("{fixture}: determinant vanishes"),
    )?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "two zero determinants; {fixture} gives {} terms",
        det.term_count()
    ))
}

/// Orbits of the translation action on `m`-variable tables, counted by
/// flood fill.
fn orbit_count(m: u32) -> u64 {
    let size = 1usize << m;
    let total = 1usize << size;
    let mut seen = vec![false; total];
    let mut orbits = 0;
    for table in 0..total {
        if seen[table] {
            continue;
        }
        orbits += 1;
        for d in 0..size {
            let image = (0..size).fold(0usize, |acc, x| acc | (table >> (x ^ d) & 1) << x);
            seen[image] = true;
        }
    }
    orbits
}

fn bounds() -> Outcome {
    for m in 2..=4 {
        let formula = burnside_classes(m);
        ensure(
            formula == BigUint::from(orbit_count(m)),
            format!("m={m}: formula {formula} vs orbits"),
        )?;
        ensure(
            formula == BigUint::from(burnside_brute_force(m).unwrap()),
            format!("m={m}: library brute force"),
        )?;
    }
    ensure(
        burnside_classes(2) == BigUint::from(7u32) && burnside_classes(3) == BigUint::from(46u32),
        "7, 46",
    )?;
    ensure(gamma(2).unwrap() == BigUint::from(6u32), "gamma(2)")?;
    let bound = space_size_bound(4, 2).unwrap();
    ensure(bound >= BigUint::from(520u32), "bound below 520")?;
    ensure(universal_threshold(2, 2).unwrap() == 2, "threshold(2,2)")?;
    ensure(universal_threshold(3, 2).unwrap() == 4, "threshold(3,2)")?;
    Ok(format!(
        "burnside 7, 46, {}; gamma(2)=6; bound(4,2)={bound}; thresholds 2, 4",
        burnside_classes(4)
    ))
}

fn dfs_paths(id: &str, inputs: &HashMap<&str, &[String]>) -> u64 {
    match inputs.get(id) {
        None => 1,
        Some(srcs) => srcs.iter().map(|s| dfs_paths(s, inputs)).sum(),
    }
}

fn tenn() -> Outcome {
    let net = LayeredNetwork::parse(
        r#"{"inputs":["x","y","z"],"layers":[[{"id":"f","in":["x","y"]},{"id":"h","in":["x","z"]}],[{"id":"g","in":["f","h"]}]]}"#,
    )
    .unwrap();
    let r = expand_tenn(&net).unwrap();
    ensure(r.leaf_count == 4 && r.tree.leaf_count() == 4, "L(N) != 4")?;
    let xs = r.tree.leaf_labels().iter().filter(|l| **l == "x").count();
    ensure(xs == 2, format!("x appears {xs} times"))?;
    let mut r0 = rng(0);
    for k in 0..50 {
        let net = random_layered_network(&mut r0);
        let inputs: HashMap<&str, &[String]> = net
            .layers
            .iter()
            .flatten()
            .map(|n| (n.id.as_str(), n.inputs.as_slice()))
            .collect();
        let paths = dfs_paths(&net.output().id, &inputs);
        let r = expand_tenn(&net).unwrap();
        ensure(
            r.leaf_count as u64 == paths,
            format!("network {k}: {} leaves, {paths} paths", r.leaf_count),
        )?;
        ensure(
            net.path_count() == BigUint::from(paths),
            format!("network {k}: path_count"),
        )?;
        ensure(
            r.tree.node_count() < r.leaf_count.max(2),
            format!("network {k}: too many nodes"),
        )?;
        let used: HashSet<&str> = r.tree.leaf_labels().into_iter().collect();
        ensure(
            used.len() == r.tree.var_count(),
            format!("network {k}: labels"),
        )?;
    }
    Ok(format!(
        "{} with L=4; 50 random networks match DFS path counts",
        r.tree
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("count formula", count_formula),
        ("constraint <=> membership", constraint_membership),
        ("worked distances", worked_distances),
        ("reconstruction", reconstruction),
        ("discrete decomposition round trip", discrete_round_trip),
        ("polynomial necessity", polynomial_necessity),
        ("polynomial sufficiency round trip", polynomial_sufficiency),
        ("reduced constraints", reduced_identities),
        ("determinant PDE", determinant_pde),
        ("Burnside and bounds", bounds),
        ("TENN expansion", tenn),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails. Built with `harness = false`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use netclust::fixtures::{cycle_network, excision_counterexample};
use netclust::io::{ingest, IngestionSpec, InputFormat};
use netclust::methods::{grafting, nonreciprocal, reciprocal, semi_reciprocal};
use netclust::metric::network_distance_exact;
use netclust::minimax::{bounded_hop_minimax, directed_minimax, single_linkage};
use netclust::properties::{
    check_excisiveness, check_idempotency, check_scale_preservation, check_transformation_axiom,
    check_value_axiom, values_match, ProbeGenerator, WitnessDetail, DEFAULT_ALPHAS,
};
use netclust::representable::{
    cluster_representable, cycle_representer, optimal_multiples_enumerated, three_cycle_kernel,
    validate_family,
};
use netclust::{MethodSpec, Network, RepresenterFamily, Ultrametric, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn all_equal(u: &Ultrametric, v: f64) -> bool {
    let n = u.size();
    (0..n).all(|i| (0..n).all(|j| u.get(i, j) == if i == j { 0.0 } else { v }))
}

fn omega_r_family() -> RepresenterFamily {
    validate_family(vec![cycle_representer(2, 1.0, None).unwrap()]).unwrap()
}

fn three_cycle_family() -> RepresenterFamily {
    validate_family(vec![cycle_representer(3, 1.0, Some(3.0)).unwrap()]).unwrap()
}

fn mixed_family() -> RepresenterFamily {
    validate_family(vec![
        cycle_representer(2, 1.0, None).unwrap(),
        cycle_representer(4, 1.0, None).unwrap(),
    ])
    .unwrap()
}

fn cycle_regression() -> Outcome {
    let net = cycle_network();
    let twice = net.scale(2.0).unwrap();
    ensure!(
        all_equal(&nonreciprocal(&net), 1.0),
        "nonreciprocal is not 1"
    );
    ensure!(all_equal(&reciprocal(&net), 2.0), "reciprocal is not 2");
    ensure!(
        all_equal(&grafting(&net, 3.0).unwrap(), 1.0),
        "grafting(3) is not 1"
    );
    ensure!(
        all_equal(&nonreciprocal(&twice), 2.0),
        "scaled nonreciprocal is not 2"
    );
    ensure!(
        all_equal(&reciprocal(&twice), 4.0),
        "scaled reciprocal is not 4"
    );
    ensure!(
        all_equal(&grafting(&twice, 3.0).unwrap(), 4.0),
        "scaled grafting(3) is not 4"
    );
    let audit =
        check_scale_preservation(&MethodSpec::Grafting(3.0), &net, &DEFAULT_ALPHAS).unwrap();
    ensure!(
        audit.verdict == Verdict::Violated,
        "grafting scale audit held"
    );
    Ok("cycle network values exact; grafting scale audit violated".into())
}

fn excision_regression() -> Outcome {
    let net = excision_counterexample();
    let u = semi_reciprocal(&net, 3).unwrap();
    ensure!(u.get(0, 2) == 1.0, "u(x1,x3) = {}", u.get(0, 2));
    let sub = net.restrict(&["x1", "x3"]).unwrap();
    let us = semi_reciprocal(&sub, 3).unwrap();
    ensure!(us.get(0, 1) == 2.0, "excised u(x1,x3) = {}", us.get(0, 1));
    let method = MethodSpec::SemiReciprocal(3);
    let audit = check_excisiveness(&method, &net).unwrap();
    let Some(w) = audit.witness.as_ref() else {
        return Err("semi:3 excisiveness audit held".into());
    };
    match &w.detail {
        WitnessDetail::Excision {
            block,
            clustered,
            excised,
            ..
        } => {
            ensure!(block == &["x1", "x3"], "witness block {block:?}");
            ensure!(
                (*clustered, *excised) == (1.0, 2.0),
                "witness values {clustered} {excised}"
            );
        }
        other => return Err(format!("unexpected witness {other:?}")),
    }
    ensure!(w.reproduces(&method).unwrap(), "witness does not reproduce");
    for m in [MethodSpec::Reciprocal, MethodSpec::Nonreciprocal] {
        ensure!(
            check_excisiveness(&m, &net).unwrap().is_holds(),
            "{m} failed excisiveness"
        );
    }
    Ok("semi:3 witness {x1,x3} at 1 vs 2; reciprocal and nonreciprocal excisive".into())
}

fn representability() -> Outcome {
    let mut gen = ProbeGenerator::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let omega = omega_r_family();
    let mut count_r = 0;
    for k in 0..240 {
        let n = 2 + k % 7;
        let net = if k % 2 == 0 {
            gen.network(n)
        } else {
            continuous_network(&mut rng, n)
        };
        let got = cluster_representable(&omega, &net).unwrap();
        ensure!(
            got == reciprocal(&net),
            "omega_R differs from reciprocal on {net:?}"
        );
        count_r += 1;
    }
    let mut count_nr = 0;
    for k in 0..120 {
        let n = 2 + k % 5;
        let net = if k % 2 == 0 {
            gen.network(n)
        } else {
            continuous_network(&mut rng, n)
        };
        let fam = RepresenterFamily::cycles(2 * n).unwrap();
        let got = cluster_representable(&fam, &net).unwrap();
        ensure!(
            got == nonreciprocal(&net),
            "cycle family differs from nonreciprocal on {net:?}"
        );
        count_nr += 1;
    }
    Ok(format!(
        "{count_r} reciprocal and {count_nr} nonreciprocal networks equal"
    ))
}

fn kernel() -> Outcome {
    let mut gen = ProbeGenerator::new(4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rep = cycle_representer(3, 1.0, Some(3.0)).unwrap();
    let mut count = 0;
    for k in 0..120 {
        let n = 2 + k % 9;
        let net = if k % 2 == 0 {
            gen.network(n)
        } else {
            continuous_network(&mut rng, n)
        };
        let fast = three_cycle_kernel(&net, 3.0).unwrap().rows();
        let slow = optimal_multiples_enumerated(&rep, &net, 3).unwrap().rows();
        ensure!(rows_close(&fast, &slow, 1e-9), "kernel differs on {net:?}");
        count += 1;
    }
    Ok(format!("{count} networks within 1e-9"))
}

fn sandwich() -> Outcome {
    let mut gen = ProbeGenerator::new(5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let families = [omega_r_family(), three_cycle_family(), mixed_family()];
    let mut checks = 0;
    for k in 0..520 {
        let n = 2 + k % 6;
        let net = if k % 2 == 0 {
            gen.network(n)
        } else {
            continuous_network(&mut rng, n)
        };
        let lo = nonreciprocal(&net);
        let hi = reciprocal(&net);
        let mut methods = vec![MethodSpec::Reciprocal, MethodSpec::Nonreciprocal];
        methods.extend((2..=n).map(MethodSpec::SemiReciprocal));
        methods.extend([1.0, 3.0, 6.0].map(MethodSpec::Grafting));
        methods.extend(families.iter().cloned().map(MethodSpec::representable));
        for m in &methods {
            let u = m.run(&net).unwrap();
            let exact = m.is_division_free();
            for i in 0..n {
                for j in 0..n {
                    let v = u.get(i, j);
                    let ok_lo = lo.get(i, j) <= v || values_match(lo.get(i, j), v, exact);
                    let ok_hi = v <= hi.get(i, j) || values_match(v, hi.get(i, j), exact);
                    ensure!(
                        ok_lo && ok_hi,
                        "{m} escapes the bounds at ({i},{j}) on {net:?}"
                    );
                }
            }
            checks += 1;
        }
    }
    Ok(format!("520 networks, {checks} method runs bounded"))
}

fn property_suites() -> Outcome {
    let mut methods = vec![MethodSpec::Reciprocal, MethodSpec::Nonreciprocal];
    methods.extend(
        [
            omega_r_family(),
            three_cycle_family(),
            mixed_family(),
            RepresenterFamily::cycles(3).unwrap(),
        ]
        .into_iter()
        .map(MethodSpec::representable),
    );
    let mut gen = ProbeGenerator::new(6);
    let nets: Vec<Network> = (0..30).map(|k| gen.network(2 + k % 5)).collect();
    let pairs = gen.value_pairs(25);
    let contractions: Vec<(Network, Network, Vec<usize>)> = (0..100)
        .map(|k| {
            let src = gen.network(2 + k % 4);
            let m = gen.rng().random_range(1..=src.size());
            let (dst, phi) = gen.contraction(&src, m);
            (src, dst, phi)
        })
        .collect();
    let mut reports = 0;
    for m in &methods {
        for net in &nets {
            for r in [
                check_excisiveness(m, net).unwrap(),
                check_scale_preservation(m, net, &DEFAULT_ALPHAS).unwrap(),
                check_idempotency(m, net).unwrap(),
            ] {
                ensure!(
                    r.is_holds(),
                    "{m} violated {:?}: {}",
                    r.property,
                    r.to_json()
                );
                reports += 1;
            }
        }
        let r = check_value_axiom(m, &pairs).unwrap();
        ensure!(
            r.is_holds() && r.probes == 25,
            "{m} violated the value axiom"
        );
        for (src, dst, phi) in &contractions {
            let r = check_transformation_axiom(m, src, dst, phi).unwrap();
            ensure!(
                r.is_holds(),
                "{m} violated the transformation axiom: {}",
                r.to_json()
            );
        }
        reports += 1 + contractions.len();
    }
    Ok(format!(
        "{} methods, {reports} audits, zero violations",
        methods.len()
    ))
}

fn oracles() -> Outcome {
    let mut gen = ProbeGenerator::new(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut minimax = 0;
    for k in 0..60 {
        let n = 1 + k % 6;
        let net = if k % 2 == 0 {
            gen.network(n)
        } else {
            continuous_network(&mut rng, n)
        };
        ensure!(
            directed_minimax(&net).rows() == all_pairs(n, |i, j| chain_cost(&net, i, j, n)),
            "directed minimax differs on {net:?}"
        );
        for t in 2..=n.max(2) {
            let got = bounded_hop_minimax(&net, t).unwrap().rows();
            ensure!(
                got == all_pairs(n, |i, j| chain_cost(&net, i, j, t)),
                "t={t} differs on {net:?}"
            );
        }
        minimax += 1;
    }
    let mut linkage = 0;
    for k in 0..60 {
        let net = gen.symmetric_network(1 + k % 8);
        let n = net.size();
        let expect = mst_single_linkage(n, &|i, j| net.get(i, j));
        ensure!(
            single_linkage(&net).unwrap().rows() == expect,
            "single linkage differs on {net:?}"
        );
        linkage += 1;
    }
    let mut distance = 0;
    for k in 0..63 {
        let (n, m) = (1 + k % 3, 1 + (k / 3) % 3);
        let (x, y) = if k % 2 == 0 {
            (gen.network(n), gen.network(m))
        } else {
            (
                continuous_network(&mut rng, n),
                continuous_network(&mut rng, m),
            )
        };
        let d = network_distance_exact(&x, &y).unwrap();
        ensure!(
            d == distance_oracle(&x, &y),
            "distance differs on {x:?} {y:?}"
        );
        distance += 1;
    }
    Ok(format!(
        "{minimax} minimax, {linkage} single linkage, {distance} distance instances"
    ))
}

fn stability() -> Outcome {
    let mut gen = ProbeGenerator::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let families = [omega_r_family(), three_cycle_family()];
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    for k in 0..110 {
        let (x, y) = match k % 3 {
            0 => {
                let x = gen.network(4);
                let y = gen.perturb(&x);
                (x, y)
            }
            1 => (gen.network(4), gen.network(4)),
            _ => {
                let x = continuous_network(&mut rng, 4);
                let y = Network::new(
                    x.labels().to_vec(),
                    x.values()
                        .iter()
                        .map(|&v| {
                            if v == 0.0 {
                                0.0
                            } else {
                                v * rng.random_range(0.8..1.25)
                            }
                        })
                        .collect(),
                )
                .unwrap();
                (x, y)
            }
        };
        let input = network_distance_exact(&x, &y).unwrap();
        for fam in &families {
            let hx = cluster_representable(fam, &x).unwrap();
            let hy = cluster_representable(fam, &y).unwrap();
            let output = network_distance_exact(&hx, &hy).unwrap();
            let bound = input / fam.separation() + 1e-9;
            ensure!(
                output <= bound,
                "{}: {output} > {bound} on {x:?} {y:?}",
                fam.name()
            );
            if input > 0.0 {
                worst = worst.max(output / input);
            }
        }
        pairs += 1;
    }
    Ok(format!(
        "{pairs} pairs per family; largest output/input ratio {worst:.3}"
    ))
}

fn sector_branches() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/sectors10.csv");
    let net =
        ingest(&IngestionSpec::new(path, InputFormat::Similarity)).map_err(|e| e.to_string())?;
    ensure!(net.size() == 10, "expected 10 sectors, got {}", net.size());
    let method = MethodSpec::representable(three_cycle_family());
    let u = method.run(&net).unwrap();
    let mut branches = 0;
    for delta in u.resolutions() {
        for block in u.partition_at(delta).blocks() {
            if block.len() < 2 || block.len() == net.size() {
                continue;
            }
            let again = method.run(&net.restrict_indices(block)).unwrap();
            let branch = u.restrict_indices(block);
            ensure!(
                rows_close(&again.rows(), &branch.rows(), 1e-9),
                "branch {:?} differs after excision",
                block
            );
            branches += 1;
        }
    }
    ensure!(branches > 0, "no proper multi-node branch to excise");
    Ok(format!("{branches} proper branches re-cluster identically"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "cycle network regression",
            Duration::from_secs(1),
            cycle_regression,
        ),
        (
            "excision counterexample regression",
            Duration::from_secs(1),
            excision_regression,
        ),
        (
            "representability equivalences",
            Duration::from_secs(60),
            representability,
        ),
        ("three-cycle kernel", Duration::from_secs(60), kernel),
        ("sandwich bounds", Duration::from_secs(120), sandwich),
        ("property suites", Duration::from_secs(300), property_suites),
        ("oracle equivalences", Duration::from_secs(120), oracles),
        ("stability", Duration::from_secs(300), stability),
        (
            "sector table branch excision",
            Duration::from_secs(30),
            sector_branches,
        ),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|detail| {
                let took = start.elapsed();
                if took > budget {
                    Err(format!("{detail}; took {took:.2?}, budget {budget:.0?}"))
                } else {
                    Ok(detail)
                }
            });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({took:.2?}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({took:.2?}): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}

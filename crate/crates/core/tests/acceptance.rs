//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use facet_core::polytope::{hungarian, BipartiteGraph, DagPaths};
use facet_core::steps::{shadow_delta, shifted};
use facet_core::*;
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit_secs: f64,
    check: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn shadow_projection() -> Outcome {
    let mut rng = rng(1001);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let m = rng.random_range(1..=8);
        let c: Vec<f64> = (0..=m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let d: Vec<f64> = shifted(&c, shadow_delta(&c)).iter().map(|v| -v).collect();
        let proj = active_set_projection(&c);
        let err = d.iter().zip(&proj).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err <= 1e-8, || format!("case {case}: error {err:e} for c = {c:?}"))?;
        worst = worst.max(err);
    }
    Ok(format!("500 cases, max error {worst:.2e}"))
}

fn delta_solver() -> Outcome {
    let mut rng = rng(1002);
    let (mut worst_sum, mut worst_delta): (f64, f64) = (0.0, 0.0);
    for case in 0..1000 {
        let len = rng.random_range(1..=50);
        let c: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let delta = shadow_delta(&c);
        let sum = shifted(&c, delta).iter().sum::<f64>().abs();
        let diff = (delta - bisect_delta(&c)).abs();
        ensure(sum <= 1e-10 && diff <= 1e-9, || {
            format!("case {case}: |Σ c^δ| = {sum:e}, |δ − δ_bisect| = {diff:e}")
        })?;
        worst_sum = worst_sum.max(sum);
        worst_delta = worst_delta.max(diff);
    }
    Ok(format!(
        "1000 cases, max |Σ c^δ| {worst_sum:.2e}, max δ error {worst_delta:.2e}"
    ))
}

fn oracle_exactness() -> Outcome {
    let mut rng = rng(1003);
    let g = BipartiteGraph::complete(7);
    let perms = enumerate_matchings(&g);
    for case in 0..200 {
        let cost = random_vec(&mut rng, 49, -10.0, 10.0);
        let res = hungarian(&g, cost.as_slice(), &|_| true).map_err(|e| e.to_string())?;
        let best = argmin(&perms, &cost);
        let mut edges = res.edges.clone();
        edges.sort_unstable();
        ensure(edges.as_slice() == best.ones(), || {
            format!("hungarian case {case} differs")
        })?;
    }
    let mut graphs = 0;
    while graphs < 100 {
        let (layers, width) = (rng.random_range(2..8), rng.random_range(2..6));
        let dag = random_dag(&mut rng, layers, width, 0.6);
        let Some(paths) = enumerate_paths(&dag, 5000) else {
            continue;
        };
        let p = Polytope::Dag(dag);
        for _ in 0..5 {
            let g = random_vec(&mut rng, p.dim(), -1.0, 1.0);
            ensure(&p.min_oracle(&g) == argmin(&paths, &g), || {
                format!("dag {graphs}: min oracle differs")
            })?;
            let (_, x) = random_mixture(&mut rng, &p, 3);
            let face = face_atoms(&paths, &x);
            let got = p.face_max_oracle(&x, &g).map_err(|e| e.to_string())?;
            ensure(&got == argmax(&face, &g), || {
                format!("dag {graphs}: face max oracle differs")
            })?;
        }
        graphs += 1;
    }
    let chain = enumerate_paths(&DagPaths::chain(2, 2), 10).unwrap_or_default().len();
    ensure(chain == 4, || format!("chain(2, 2) has {chain} paths"))?;
    Ok("200 Hungarian cases, 100 DAGs × 5 cost vectors".into())
}

fn reduce_properties() -> Outcome {
    let mut rng = rng(1004);
    let mut worst: f64 = 0.0;
    let mut reduced = 0;
    for (name, p) in property_polytopes(&mut rng) {
        for case in 0..200 {
            let obj = random_ls(&mut rng, 6, p.dim());
            let k = rng.random_range(1..5);
            let (support, _) = random_mixture(&mut rng, &p, k);
            let (depth, d_max) = [(0, 1), (0, 2), (1, 2)][case % 3];
            let check = check_reduce_properties(&mut rng, &p, &obj, &support, depth, d_max)
                .map_err(|e| format!("{name} case {case}: {e}"))?;
            reduced += usize::from(check.reduced);
            worst = worst.max(check.p5_discrepancy);
        }
    }
    Ok(format!(
        "600 triples ({reduced} reduced), max P5 discrepancy {worst:.2e}"
    ))
}

fn simplex_instance() -> Instance {
    generate(&InstanceSpec::new(Family::SimplexLs { n: 100 }, 0.5, 7).with_m(50)).expect("generate")
}

fn convergence() -> Outcome {
    let inst = simplex_instance();
    let (_, f_ref) = simplex_qp_reference(&inst.objective, 1e-12);
    let mut detail = Vec::new();
    let cases = [
        (Algorithm::Fw, 5000, 1e-3),
        (Algorithm::Dicg(DicgVariant::Pfw), 2000, 1e-6),
        (Algorithm::Bcg, 2000, 1e-6),
        (Algorithm::CacheDicg(DicgVariant::Pfw), 2000, 1e-6),
    ];
    for (alg, steps, factor) in cases {
        let cfg = RunConfig::new(alg).with_max_steps(Some(steps)).with_target_gap(-1.0);
        let tr = run(&inst, &cfg).map_err(|e| e.to_string())?;
        let d = &tr.diagnostics;
        let (w0, w) = (d.first_w_plus.unwrap_or(f64::NAN), d.last_w_plus.unwrap_or(f64::NAN));
        ensure(w <= factor * w0, || {
            format!("{alg}: w⁺ = {w:e} after {} steps, w⁺₀ = {w0:e}", tr.steps())
        })?;
        let err = tr.final_f() - f_ref;
        if factor < 1e-3 {
            ensure(err.abs() <= 1e-8, || format!("{alg}: final f − f_ref = {err:e}"))?;
        }
        detail.push(format!("{alg} w⁺/w⁺₀ {:.1e} f−f_ref {err:.1e}", w / w0));
    }
    Ok(detail.join("; "))
}

fn recursion_equivalence() -> Outcome {
    let inst = simplex_instance();
    let adapters = [
        CgStepAdapter::Dicg(DicgVariant::Pfw),
        CgStepAdapter::Bcg(BcgOptions::default()),
        CgStepAdapter::cache_dicg(DicgVariant::Pfw),
    ];
    let control = RunControl {
        max_steps: Some(2000),
        ..RunControl::default()
    };
    for adapter in adapters {
        let csv = |recursive: bool| -> Result<Vec<u8>, String> {
            let env = Env::counted();
            let prob = Problem::new(&inst.objective, &inst.polytope, &env);
            let st = adapter.initial_state(&inst.polytope);
            let out = if recursive {
                cg_recursive(&prob, &adapter, st, 0, control)
            } else {
                run_base(&prob, &adapter, st, control)
            };
            out.and_then(|(_, tr)| tr.to_csv()).map_err(|e| e.to_string())
        };
        ensure(csv(true)? == csv(false)?, || format!("{adapter:?}: CSV bytes differ"))?;
    }
    Ok("3 adapters bit-identical".into())
}

fn structural_invariants() -> Outcome {
    let specs = [
        InstanceSpec::new(Family::SimplexLs { n: 100 }, 0.5, 11).with_m(50),
        InstanceSpec::new(
            Family::SparseRecovery {
                n: 100,
                ones: 20,
                tau: 20.0,
            },
            0.1,
            12,
        ),
        InstanceSpec::new(Family::DagChain { layers: 60, labels: 8 }, 5.0, 13),
        InstanceSpec::new(Family::PmBipartite { n: 20, k: 5 }, 5.0, 14),
    ];
    let mut runs = 0;
    let mut entries = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for spec in &specs {
        let inst = generate(spec).map_err(|e| e.to_string())?;
        for name in Algorithm::NAMES.iter().take(6) {
            let alg: Algorithm = name.parse().map_err(|e: FwError| e.to_string())?;
            let depths: &[usize] = if alg == Algorithm::Fw { &[0] } else { &[0, 1, 2] };
            for &d in depths {
                let cfg = RunConfig::new(alg).with_d_max(d).with_max_steps(Some(1000));
                let tr = run(&inst, &cfg).map_err(|e| e.to_string())?;
                let label = format!("{} {name} d={d}", spec.family.name());
                for w in tr.entries.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    ensure(b.f <= a.f + 1e-12 * (1.0 + a.f.abs()), || {
                        format!("{label}: f rose {} → {}", a.f, b.f)
                    })?;
                    ensure(b.lb >= a.lb, || format!("{label}: lower bound fell"))?;
                    ensure(!(a.kind == StepKind::Halve && b.kind == StepKind::Halve), || {
                        format!("{label}: consecutive halve steps")
                    })?;
                }
                let excess = tr
                    .entries
                    .iter()
                    .map(|e| (e.lb - e.f) / (1.0 + e.f.abs()))
                    .fold(f64::NEG_INFINITY, f64::max);
                ensure(excess <= 1e-12, || {
                    format!("{label}: lower bound above f by {excess:e} (relative)")
                })?;
                worst_excess = worst_excess.max(excess);
                let diag = &tr.diagnostics;
                ensure(diag.max_unsuccessful_simplex <= 1, || {
                    format!("{label}: two unsuccessful simplex steps")
                })?;
                ensure(diag.max_working_set <= cfg.capacity, || {
                    format!("{label}: working set over capacity")
                })?;
                ensure(diag.afw_unclassified == 0, || {
                    format!("{label}: {} unclassified AFW steps", diag.afw_unclassified)
                })?;
                runs += 1;
                entries += tr.len();
            }
        }
    }
    Ok(format!(
        "{runs} runs, {entries} trace entries, max relative lb − f {worst_excess:.1e}"
    ))
}

fn recursion_benefit() -> Outcome {
    let spec = InstanceSpec::new(
        Family::DagChain {
            layers: 500,
            labels: 20,
        },
        19.0,
        1,
    );
    let inst = generate(&spec).map_err(|e| e.to_string())?;
    let mut calls = Vec::new();
    for d in [0, 1] {
        let cfg = RunConfig::new(Algorithm::Dicg(DicgVariant::Pfw))
            .with_d_max(d)
            .with_target_gap(1e-4)
            .with_max_steps(Some(100_000));
        let tr = run(&inst, &cfg).map_err(|e| e.to_string())?;
        ensure(tr.status == RunStatus::TargetReached, || {
            format!("d_max={d} stopped with {:?}", tr.status)
        })?;
        calls.push(tr.oracle.root_min_calls());
    }
    let ratio = calls[1] as f64 / calls[0] as f64;
    ensure(ratio <= 2.0, || {
        format!("ratio {ratio:.2} ({} vs {})", calls[1], calls[0])
    })?;
    Ok(format!(
        "root min-oracle calls d_max=1 {} vs d_max=0 {}, ratio {ratio:.2}",
        calls[1], calls[0]
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "shadow-projection",
            limit_secs: 5.0,
            check: shadow_projection,
        },
        Criterion {
            name: "delta-solver",
            limit_secs: 1.0,
            check: delta_solver,
        },
        Criterion {
            name: "oracle-exactness",
            limit_secs: 10.0,
            check: oracle_exactness,
        },
        Criterion {
            name: "reduce-properties",
            limit_secs: 30.0,
            check: reduce_properties,
        },
        Criterion {
            name: "convergence-regression",
            limit_secs: 60.0,
            check: convergence,
        },
        Criterion {
            name: "recursion-equivalence",
            limit_secs: f64::INFINITY,
            check: recursion_equivalence,
        },
        Criterion {
            name: "structural-invariants",
            limit_secs: f64::INFINITY,
            check: structural_invariants,
        },
        Criterion {
            name: "recursion-benefit",
            limit_secs: f64::INFINITY,
            check: recursion_benefit,
        },
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|d| {
            if secs < c.limit_secs {
                Ok(d)
            } else {
                Err(format!("{d}; runtime over the {} s limit", c.limit_secs))
            }
        });
        match outcome {
            Ok(d) => println!("PASS {} ({secs:.2} s): {d}", c.name),
            Err(d) => {
                failed += 1;
                println!("FAIL {} ({secs:.2} s): {d}", c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

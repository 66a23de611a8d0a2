//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use klinear::boolfn::{
    BitVector, Combinations, Complement, DistributionSpec, FunctionOracle, Majority3,
    ParitySupport, Recording, SharedFunction,
};
use klinear::harness::{run_bench, run_experiment, DistSpec, ExperimentConfig, Family, Label};
use klinear::lab::{
    check_good, decompose_k, find_shift_lambda, hamming_lower_bound, lemma_sweep, BitMatrix,
    GoodnessSpec,
};
use klinear::learner::{
    bch_matrix, brute_force_decode, decode, degree_for, syndrome, DecodeResult,
};
use klinear::linearity::blr_test_rounds;
use klinear::rng::stream_rng;
use klinear::tester::{plan_test, run_tester, DerivedParams, TestMode, TesterConfig};
use rand::seq::index::sample;
use rand::Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn completeness_grid(mode: TestMode, family: Family) -> ExperimentConfig {
    ExperimentConfig {
        n: vec![64, 256],
        k_list: vec![2, 4, 8],
        epsilon_list: vec![0.25, 0.1],
        modes: vec![mode],
        families: vec![family],
        dists: vec![
            DistSpec::Uniform,
            DistSpec::Product(0.3),
            DistSpec::RandomMixture(8),
        ],
        trials: 500,
        seed: 20_240_601,
        threads: 1,
        early_exit: true,
    }
}

fn one_sidedness() -> Outcome {
    let out = run_experiment(&completeness_grid(TestMode::Star, Family::MemberStar))
        .map_err(|e| e.to_string())?;
    for c in &out.summary {
        ensure(c.label == "member", || {
            format!("cell {} not labelled member", c.cell_id)
        })?;
        ensure(c.accepts == c.trials, || {
            format!(
                "cell {} (n={} k={} eps={} {}): {}/{} accepted",
                c.cell_id, c.n, c.k, c.epsilon, c.dist, c.accepts, c.trials
            )
        })?;
    }
    Ok(format!(
        "{} cells x 500 trials, all accepted",
        out.summary.len()
    ))
}

fn two_sided_completeness() -> Outcome {
    let out = run_experiment(&completeness_grid(TestMode::Exact, Family::Member))
        .map_err(|e| e.to_string())?;
    let mut worst = 1.0f64;
    for c in &out.summary {
        worst = worst.min(c.accept_rate);
        ensure(c.accept_rate >= 0.95, || {
            format!(
                "cell {} (n={} k={} eps={} {}): accept rate {}",
                c.cell_id, c.n, c.k, c.epsilon, c.dist, c.accept_rate
            )
        })?;
    }
    Ok(format!(
        "{} cells, minimum accept rate {worst:.4}",
        out.summary.len()
    ))
}

fn soundness_grid(families: Vec<Family>, dists: Vec<DistSpec>) -> ExperimentConfig {
    ExperimentConfig {
        n: vec![12],
        k_list: vec![2],
        epsilon_list: vec![0.1],
        modes: vec![TestMode::Star, TestMode::Exact],
        families,
        dists,
        trials: 500,
        seed: 77,
        threads: 1,
        early_exit: true,
    }
}

fn check_far_cells(
    cfg: &ExperimentConfig,
    tag: &str,
    min_reject: f64,
    detail: &mut Vec<String>,
) -> Result<(), String> {
    let out = run_experiment(cfg).map_err(|e| e.to_string())?;
    for r in &out.records {
        let delta = r
            .label
            .delta()
            .ok_or_else(|| format!("cell {} produced a member instance", r.cell_id))?;
        ensure(delta >= r.epsilon, || {
            format!("cell {} certified delta {delta} < eps", r.cell_id)
        })?;
    }
    for c in &out.summary {
        let reject = 1.0 - c.accept_rate;
        detail.push(format!("{}/{}/{tag}:{reject:.3}", c.family, c.mode));
        ensure(reject >= min_reject, || {
            format!(
                "cell {} ({} {} {tag}): reject rate {reject}",
                c.cell_id, c.family, c.mode
            )
        })?;
    }
    Ok(())
}

fn soundness_certified() -> Outcome {
    let mut detail = Vec::new();
    let uniform = soundness_grid(
        vec![
            Family::WrongWeightPlus,
            Family::RandomTable,
            Family::CorruptedParity,
        ],
        vec![DistSpec::Uniform],
    );
    check_far_cells(&uniform, "uniform", 0.60, &mut detail)?;
    // 2/eps points of mass eps/2 each
    let mut rng = stream_rng(5, 0);
    let points: Vec<(BitVector, f64)> = sample(&mut rng, 1 << 12, 20)
        .into_iter()
        .map(|v| (BitVector::from_words(12, [v as u64]), 0.05))
        .collect();
    let mass = soundness_grid(vec![Family::CorruptedParity], vec![DistSpec::Mass(points)]);
    check_far_cells(&mass, "mass20", 0.60, &mut detail)?;
    Ok(format!("reject rates {}", detail.join(" ")))
}

fn wrong_weight_separation() -> Outcome {
    let cfg = ExperimentConfig {
        n: vec![64],
        k_list: vec![4, 8],
        epsilon_list: vec![0.125],
        modes: vec![TestMode::Exact],
        families: vec![Family::WrongWeightMinus, Family::WrongWeightPlus],
        dists: vec![DistSpec::Uniform],
        trials: 500,
        seed: 4,
        threads: 1,
        early_exit: true,
    };
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for r in &out.records {
        ensure(r.label == Label::Far { delta: 0.5 }, || {
            format!("cell {} label {:?}", r.cell_id, r.label)
        })?;
    }
    for c in &out.summary {
        let reject = 1.0 - c.accept_rate;
        detail.push(format!("{}/k={}:{reject:.3}", c.family, c.k));
        ensure(reject >= 0.60, || {
            format!(
                "cell {} ({} k={}): reject rate {reject}",
                c.cell_id, c.family, c.k
            )
        })?;
    }
    Ok(format!("reject rates {}", detail.join(" ")))
}

fn query_complexity() -> Outcome {
    let mut runs = 0usize;
    let base = ExperimentConfig {
        n: vec![64],
        k_list: vec![2, 4, 8],
        epsilon_list: vec![0.25, 0.1],
        modes: vec![TestMode::Star, TestMode::Exact],
        families: vec![Family::Member],
        dists: vec![DistSpec::Uniform, DistSpec::RandomMixture(8)],
        trials: 4,
        seed: 5,
        threads: 1,
        early_exit: false,
    };
    let grids = [
        base.clone(),
        ExperimentConfig {
            families: vec![Family::WrongWeightPlus],
            dists: vec![DistSpec::Uniform],
            ..base.clone()
        },
        ExperimentConfig {
            n: vec![12],
            k_list: vec![2],
            epsilon_list: vec![0.1],
            families: vec![
                Family::RandomTable,
                Family::WrongWeightMinus,
                Family::CorruptedParity,
            ],
            dists: vec![DistSpec::Uniform, DistSpec::Product(0.3)],
            trials: 10,
            seed: 6,
            ..base
        },
    ];
    for cfg in &grids {
        let out = run_experiment(cfg).map_err(|e| e.to_string())?;
        for r in &out.records {
            let total =
                DerivedParams::compute(r.k, r.epsilon, klinear::linearity::BLR_ROUNDS_CONSTANT)
                    .map_err(|e| e.to_string())?
                    .total_queries();
            ensure(r.f_queries == total, || {
                format!(
                    "cell {} trial {}: measured {} vs {}",
                    r.cell_id, r.trial, r.f_queries, total
                )
            })?;
            runs += 1;
        }
    }
    for k in 1..=15usize {
        let p = DerivedParams::compute(k, 0.25, klinear::linearity::BLR_ROUNDS_CONSTANT)
            .map_err(|e| e.to_string())?;
        let r = 256 * k * k;
        let log = (usize::BITS - r.leading_zeros()) as usize; // ceil(log2(r + 1))
        ensure(p.q_learn <= 8 * k * log + 1, || {
            format!("k={k}: q_learn {} too large", p.q_learn)
        })?;
    }
    let total = |k: usize| {
        DerivedParams::compute(k, 0.25, klinear::linearity::BLR_ROUNDS_CONSTANT)
            .map(|p| p.total_queries())
    };
    let mut ratios = Vec::new();
    for k in [8usize, 16, 32] {
        let ratio = total(2 * k).map_err(|e| e.to_string())? as f64
            / total(k).map_err(|e| e.to_string())? as f64;
        ensure((1.8..=2.6).contains(&ratio), || {
            format!("q({})/q({k}) = {ratio}", 2 * k)
        })?;
        ratios.push(format!("{ratio:.4}"));
    }
    Ok(format!(
        "{runs} runs matched the identity; ratios {}",
        ratios.join(" ")
    ))
}

fn learner_exactness() -> Outcome {
    let mut cases = 0usize;
    for (n, k) in [(7usize, 1usize), (15, 2), (31, 3)] {
        let m = bch_matrix(n, k).map_err(|e| e.to_string())?;
        let mut here = 0usize;
        for w in 0..=k {
            for set in Combinations::new(n, w) {
                let s = ParitySupport::new(n, set).map_err(|e| e.to_string())?;
                let y = syndrome(&m, &s).map_err(|e| e.to_string())?;
                let fast = decode(&m, &y, k).map_err(|e| e.to_string())?;
                let slow = brute_force_decode(&m, &y, k).map_err(|e| e.to_string())?;
                ensure(fast == DecodeResult::Support(s.clone()), || {
                    format!("({n},{k}) {s}: decoded {fast:?}")
                })?;
                ensure(fast == slow, || {
                    format!("({n},{k}) {s}: brute force {slow:?}")
                })?;
                here += 1;
            }
        }
        let expected = [8, 121, 4992][degree_for(n) - 3];
        ensure(here == expected, || {
            format!("({n},{k}) enumerated {here} cases")
        })?;
        cases += here;
    }
    let (n, k) = (4095usize, 32usize);
    let m = bch_matrix(n, k).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(6, 0);
    for i in 0..10_000 {
        let w = if i % 2 == 0 { k } else { rng.gen_range(0..=k) };
        let s = ParitySupport::new(n, sample(&mut rng, n, w).into_iter().map(|j| j + 1))
            .map_err(|e| e.to_string())?;
        let y = syndrome(&m, &s).map_err(|e| e.to_string())?;
        let got = decode(&m, &y, k).map_err(|e| e.to_string())?;
        ensure(got == DecodeResult::Support(s.clone()), || {
            format!("(4095,32) {s}: decoded {got:?}")
        })?;
    }
    Ok(format!(
        "{cases} exhaustive cases equal brute force; 10000 random supports at (4095,32)"
    ))
}

fn blr_calibration() -> Outcome {
    // exact rate by enumerating x, y over the three relevant coordinates
    let maj = |v: u32| (v & 1) + (v >> 1 & 1) + (v >> 2 & 1) >= 2;
    let bad = (0..8u32)
        .flat_map(|x| (0..8u32).map(move |y| (x, y)))
        .filter(|&(x, y)| maj(x) ^ maj(y) != maj(x ^ y))
        .count();
    let exact = bad as f64 / 64.0;
    let f = FunctionOracle::planned(Arc::new(Majority3::new(10).map_err(|e| e.to_string())?));
    let rounds = 1_000_000;
    let report = blr_test_rounds(&f, rounds, &mut stream_rng(7, 0)).map_err(|e| e.to_string())?;
    let rate = report.failures as f64 / rounds as f64;
    ensure(f.query_count() == 3 * rounds as u64, || {
        format!("{} queries", f.query_count())
    })?;
    ensure((rate - exact).abs() <= 0.002, || {
        format!("rate {rate} vs exact {exact}")
    })?;
    Ok(format!("rate {rate:.5}, exact {bad}/64 = {exact:.5}"))
}

fn non_adaptivity() -> Outcome {
    let mut rng = stream_rng(8, 0);
    for seed in 0..100u64 {
        let n = [12usize, 40, 64][seed as usize % 3];
        let k = [1usize, 2, 3, 4][seed as usize % 4];
        let mode = if seed % 2 == 0 {
            TestMode::Star
        } else {
            TestMode::Exact
        };
        let eps = [0.25, 0.1][(seed / 2) as usize % 2];
        let cfg = TesterConfig::new(n, k, eps, mode, seed)
            .map_err(|e| e.to_string())?
            .with_early_exit(false);
        let d = if seed % 3 == 0 {
            DistributionSpec::uniform(n)
        } else {
            DistributionSpec::random_mixture(n, 8, &mut rng).map_err(|e| e.to_string())?
        };
        let base: SharedFunction = if seed % 5 == 0 {
            Arc::new(Majority3::new(n).map_err(|e| e.to_string())?)
        } else {
            Arc::new(
                ParitySupport::new(n, sample(&mut rng, n, k).into_iter().map(|i| i + 1))
                    .map_err(|e| e.to_string())?,
            )
        };
        let log_of = |g: SharedFunction| -> Result<Vec<BitVector>, String> {
            let rec = Arc::new(Recording::new(g));
            run_tester(&FunctionOracle::planned(rec.clone()), &d, &cfg)
                .map_err(|e| e.to_string())?;
            Ok(rec.take_log())
        };
        let plain = log_of(base.clone())?;
        let flipped = log_of(Arc::new(Complement(base)))?;
        let planned: Vec<BitVector> = plan_test(&d, &cfg)
            .map_err(|e| e.to_string())?
            .points()
            .cloned()
            .collect();
        ensure(plain == flipped, || {
            format!("seed {seed}: query logs differ under complement")
        })?;
        ensure(plain == planned, || {
            format!("seed {seed}: query log differs from the plan")
        })?;
    }
    Ok("100 seeds, identical query sequences for f, its complement and the plan".into())
}

fn lower_bound_lab() -> Outcome {
    let h = hamming_lower_bound(7, 2).map_err(|e| e.to_string())?;
    ensure(h == 3, || format!("hamming_lower_bound(7,2) = {h}"))?;
    let good = check_good(
        &BitMatrix::hamming_3x7(),
        &GoodnessSpec {
            sizes: vec![1, 2],
            slack: 0,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(good, || "Hamming 3x7 matrix is not ({1,2},0)-good".into())?;
    ensure(find_shift_lambda(2, 6, 8, 4).is_ok(), || {
        "find_shift_lambda(2,6,8,4) failed".into()
    })?;
    ensure(
        decompose_k(&[2, 3], 49).map_err(|e| e.to_string())? == vec![2, 15],
        || "decompose_k({2,3},49)".into(),
    )?;
    let r = lemma_sweep();
    ensure(r.failures() == 0, || format!("sweep failures: {r}"))?;
    Ok(format!(
        "pi(7,2)=3 certified; {}",
        r.to_string().replace('\n', "; ")
    ))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let members = ExperimentConfig {
        n: vec![12, 64],
        k_list: vec![2, 3],
        epsilon_list: vec![0.25],
        modes: vec![TestMode::Star, TestMode::Exact],
        families: vec![Family::Member],
        dists: vec![DistSpec::Uniform, DistSpec::RandomMixture(8)],
        trials: 6,
        seed: 99,
        threads: 1,
        early_exit: true,
    };
    let far = ExperimentConfig {
        n: vec![12],
        families: vec![Family::WrongWeightPlus, Family::CorruptedParity],
        dists: vec![DistSpec::Uniform, DistSpec::Product(0.3)],
        ..members.clone()
    };
    let mut outputs = Vec::new();
    let runs = [
        (&members, 1usize),
        (&members, 1),
        (&members, 8),
        (&far, 1),
        (&far, 1),
        (&far, 8),
    ];
    for (i, (cfg, threads)) in runs.into_iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        run_bench(
            &ExperimentConfig {
                threads,
                ..cfg.clone()
            },
            &path,
        )
        .map_err(|e| e.to_string())?;
        let records = std::fs::read(&path).map_err(|e| e.to_string())?;
        let summary = std::fs::read(dir.path().join(format!("run{i}.summary.csv")))
            .map_err(|e| e.to_string())?;
        outputs.push((records, summary));
    }
    for g in [0, 3] {
        ensure(outputs[g] == outputs[g + 1], || {
            "two runs with one thread differ".into()
        })?;
        ensure(outputs[g] == outputs[g + 2], || {
            "one thread and eight threads differ".into()
        })?;
    }
    Ok(format!(
        "{} and {} record bytes, identical across runs and thread counts",
        outputs[0].0.len(),
        outputs[3].0.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("one-sidedness", one_sidedness),
        ("two-sided completeness", two_sided_completeness),
        ("soundness on certified instances", soundness_certified),
        ("wrong-weight separation", wrong_weight_separation),
        ("query complexity shape", query_complexity),
        ("learner exactness", learner_exactness),
        ("BLR calibration", blr_calibration),
        ("non-adaptivity audit", non_adaptivity),
        ("lower-bound lab", lower_bound_lab),
        ("reproducibility", reproducibility),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL {name} ({secs:.1}s): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

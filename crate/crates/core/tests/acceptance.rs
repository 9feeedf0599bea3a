//! Acceptance checks. Prints one PASS/FAIL (or INFO) line per criterion and
//! exits non-zero if any gating criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fsm_core::canonical::{Direction, Extension};
use fsm_core::intcompress::{compress, decompress, MAX_VALUE};
use fsm_core::{
    generate, is_minimal, mine, oracle_mine, parse_tlf, CompressionFlags, DfsCode, GeneratorConfig, GraphCollection,
    MiningConfig, MiningResult, Mode, Support, VerificationPosition,
};
use rand::Rng;

type Check = Result<String, String>;

/// `(number, name, gating, check)`
type Criterion = (u32, &'static str, bool, fn() -> Check);

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

/// Criterion 1: randomized collections mined by the engine and the oracle
/// agree exactly.
fn oracle_equivalence() -> Check {
    let mut collections = 0;
    for (m, mode) in [Mode::Directed, Mode::Undirected].into_iter().enumerate() {
        for f in 1..=3usize {
            for i in 0..40u64 {
                let seed = 10_000 * m as u64 + 1_000 * f as u64 + i;
                let mut rng = common::rng(seed);
                let shape = common::random_shape(&mut rng);
                let c = common::random_collection(&mut rng, shape);
                let expected = oracle_mine(&c, f, mode).map_err(|e| e.to_string())?;
                let cfg = MiningConfig::new(Support::Absolute(f))
                    .with_mode(mode)
                    .with_workers(1 + i as usize % 4);
                let got = mine(&c, &cfg).map_err(|e| e.to_string())?;
                ensure(got.code_frequencies() == expected.frequent, || {
                    format!("seed {seed} ({mode:?}, f_min {f}) differs from the oracle")
                })?;
                ensure(got.to_result_file() == expected.to_result_file(), || {
                    format!("seed {seed}: result files differ")
                })?;
                collections += 1;
            }
        }
    }
    Ok(format!("{collections} collections, 0 mismatches"))
}

/// Criterion 2: the four-edge triangle-with-pendant pattern is found in both
/// pendant-pair graphs.
fn pendant_pair_regression() -> Check {
    let start = Instant::now();
    let c = parse_tlf(common::PENDANT_PAIR).map_err(|e| e.to_string())?;
    let cfg = MiningConfig::new(Support::Absolute(2)).with_mode(Mode::Undirected);
    let r = mine(&c, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let v = |l: &str| r.vertex_dict.encode(l).unwrap();
    let e = |l: &str| r.edge_dict.encode(l).unwrap();
    let x = |f, t, a: &str, l: &str, b: &str| Extension::new(f, t, v(a), Direction::Out, e(l), v(b));
    let with_pendant = DfsCode::from_extensions(vec![
        x(0, 1, "A", "a", "A"),
        x(1, 2, "A", "a", "A"),
        x(2, 0, "A", "a", "A"),
        x(2, 3, "A", "b", "B"),
    ]);
    let found = r.frequent.iter().find(|p| p.code == with_pendant).ok_or("triangle-with-pendant pattern missing")?;
    ensure(found.frequency == 2, || format!("triangle-with-pendant frequency {} instead of 2", found.frequency))?;
    ensure(r.frequent.iter().all(|p| is_minimal(&p.code, Mode::Undirected)), || {
        "a non-minimal code was emitted".into()
    })?;
    let oracle = oracle_mine(&c, 2, Mode::Undirected).map_err(|e| e.to_string())?;
    ensure(r.code_frequencies() == oracle.frequent, || "full set differs from the oracle".into())?;
    ensure(elapsed < Duration::from_millis(250), || format!("took {elapsed:?}, limit 250ms"))?;
    Ok(format!("triangle-with-pendant frequency 2, {} patterns all minimal, {elapsed:?}", r.frequent.len()))
}

/// Criterion 3: 50% support over three graphs means two graphs.
fn support_semantics() -> Check {
    let f = Support::Relative(0.5).min_frequency(3).map_err(|e| e.to_string())?;
    ensure(f == 2, || format!("f_min resolved to {f}"))?;
    let three = parse_tlf("t # 1\nv 1 A\nv 2 B\ne 1 2 x\nt # 2\nv 1 A\nv 2 B\ne 1 2 x\nt # 3\nv 1 A\nv 2 C\ne 1 2 x\n")
        .map_err(|e| e.to_string())?;
    let r = mine(&three, &MiningConfig::new(Support::Relative(0.5))).map_err(|e| e.to_string())?;
    ensure(r.min_frequency == 2, || format!("engine used f_min {}", r.min_frequency))?;
    ensure(r.frequent.len() == 1 && r.frequent[0].frequency == 2, || {
        format!("expected one pattern in two graphs, got {:?}", r.code_frequencies())
    })?;
    Ok("s_min 50% over 3 graphs gives f_min 2".into())
}

fn result_text(c: &GraphCollection, cfg: &MiningConfig) -> Result<String, String> {
    mine(c, cfg).and_then(|r| r.to_result_file()).map_err(|e| e.to_string())
}

/// Criterion 4: configuration changes never change the result. Each knob is
/// varied on its own against a fixed baseline.
fn configuration_independence() -> Check {
    let start = Instant::now();
    let c = generate(&GeneratorConfig::new(1000, 2024)).map_err(|e| e.to_string())?;
    let mut runs = 0;
    let mut sizes = Vec::new();
    for s in [1.0, 0.7] {
        let baseline = MiningConfig::new(Support::Relative(s))
            .with_workers(1)
            .with_verification(VerificationPosition::PostCombine)
            .with_compression(CompressionFlags::all())
            .with_branch_check(true);
        let reference = result_text(&c, &baseline)?;
        sizes.push(reference.lines().count());
        let mut variants: Vec<(String, MiningConfig)> = Vec::new();
        for w in [2, 4, 8] {
            variants.push((format!("workers {w}"), baseline.clone().with_workers(w)));
        }
        for v in [VerificationPosition::PreReport, VerificationPosition::PostFilter] {
            variants.push((format!("{v:?}"), baseline.clone().with_verification(v)));
        }
        for flags in CompressionFlags::combinations().filter(|f| *f != CompressionFlags::all()) {
            variants.push((format!("{flags:?}"), baseline.clone().with_compression(flags)));
        }
        variants.push(("no branch check".into(), baseline.clone().with_branch_check(false)));
        for (name, cfg) in variants {
            ensure(result_text(&c, &cfg)? == reference, || format!("support {s}: {name} changes the result"))?;
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}, limit 10 min"))?;
    Ok(format!(
        "1000 graphs, supports 100%/70% ({} / {} patterns), {runs} variants identical, {elapsed:.1?}",
        sizes[0], sizes[1]
    ))
}

fn scaled(r: &MiningResult, d: usize) -> Vec<(DfsCode, usize)> {
    r.code_frequencies().into_iter().map(|(c, n)| (c, n * d)).collect()
}

/// Criterion 5: duplicating every graph multiplies every frequency.
fn duplication_scaling() -> Check {
    let mut cases: Vec<(String, GraphCollection, MiningConfig)> = Vec::new();
    let generated = generate(&GeneratorConfig::new(200, 77)).map_err(|e| e.to_string())?;
    cases.push(("generator".into(), generated, MiningConfig::new(Support::Relative(0.7))));
    for seed in 0..20u64 {
        let mut rng = common::rng(500 + seed);
        let shape = common::random_shape(&mut rng);
        let mode = if seed % 2 == 0 { Mode::Directed } else { Mode::Undirected };
        let c = common::random_collection(&mut rng, shape);
        cases.push((format!("random {seed}"), c, MiningConfig::new(Support::Relative(0.4)).with_mode(mode)));
    }
    let mut patterns = 0;
    for (name, c, cfg) in &cases {
        let once = mine(c, cfg).map_err(|e| e.to_string())?;
        patterns += once.frequent.len();
        for d in [2, 5] {
            let many = mine(&c.duplicated(d), cfg).map_err(|e| e.to_string())?;
            ensure(many.code_frequencies() == scaled(&once, d), || format!("{name}, d = {d}: not scaled exactly"))?;
        }
    }
    Ok(format!("{} collections × d ∈ {{2, 5}}, {patterns} patterns scaled exactly", cases.len()))
}

/// Criterion 6: minimality verifications stay within the placement bounds.
fn verification_bound() -> Check {
    let c = generate(&GeneratorConfig::new(1000, 2024)).map_err(|e| e.to_string())?;
    let workers = 4;
    let base = MiningConfig::new(Support::Relative(0.7)).with_workers(workers);
    let combine = mine(&c, &base.clone().with_verification(VerificationPosition::PostCombine)).map_err(|e| e.to_string())?;
    for it in &combine.metrics.iterations {
        ensure(it.isomorphism_resolutions <= it.distinct_reported * workers, || {
            format!(
                "post-combine k={}: {} > {} × {workers}",
                it.edge_count, it.isomorphism_resolutions, it.distinct_reported
            )
        })?;
    }
    let filter = mine(&c, &base.with_verification(VerificationPosition::PostFilter)).map_err(|e| e.to_string())?;
    for it in &filter.metrics.iterations {
        ensure(it.isomorphism_resolutions <= it.passed_filter, || {
            format!("post-filter k={}: {} > {}", it.edge_count, it.isomorphism_resolutions, it.passed_filter)
        })?;
    }
    Ok(format!(
        "post-combine {} resolutions, post-filter {} over {} iterations",
        combine.metrics.totals().isomorphism_resolutions,
        filter.metrics.totals().isomorphism_resolutions,
        filter.metrics.iterations.len()
    ))
}

fn random_sequence(rng: &mut rand_chacha::ChaCha8Rng) -> Vec<u32> {
    let len = rng.gen_range(0..64);
    let bits = [1u32, 3, 7, 12, 20, 28][rng.gen_range(0..6)];
    (0..len)
        .map(|_| rng.gen_range(0..=((1u64 << bits) - 1).min(MAX_VALUE as u64) as u32))
        .collect()
}

/// Criterion 7: lossless compression, key equality preserved, ratio reported.
fn compression() -> Check {
    let mut rng = common::rng(7);
    for i in 0..100_000 {
        let v = random_sequence(&mut rng);
        let block = compress(&v).map_err(|e| e.to_string())?;
        ensure(decompress(&block).map_err(|e| e.to_string())? == v, || format!("roundtrip {i} failed"))?;
    }
    for i in 0..100_000 {
        let x = random_sequence(&mut rng);
        let y = match i % 4 {
            0 => x.clone(),
            1 if !x.is_empty() => {
                let mut y = x.clone();
                let at = rng.gen_range(0..y.len());
                y[at] ^= 1;
                y
            }
            2 => {
                let mut y = x.clone();
                y.push(0);
                y
            }
            _ => random_sequence(&mut rng),
        };
        let same = compress(&x).unwrap() == compress(&y).unwrap();
        ensure(same == (x == y), || format!("key equality broken on pair {i}"))?;
    }
    let c = generate(&GeneratorConfig::new(1000, 2024)).map_err(|e| e.to_string())?;
    let r = mine(&c, &MiningConfig::new(Support::Relative(0.7))).map_err(|e| e.to_string())?;
    let ratio = r.metrics.pattern_compression_ratio.ok_or("no pattern compression ratio in metrics")?;
    ensure(ratio.is_finite() && ratio > 0.0, || format!("ratio {ratio}"))?;
    ensure(r.metrics.report().contains("pattern_ratio="), || "ratio missing from the report".into())?;
    Ok(format!("10^5 roundtrips, 10^5 equality pairs, pattern ratio {ratio:.2} on generated patterns"))
}

/// Criterion 8 (informational): single-machine scaling from 1 to 4 workers.
fn scaling_smoke() -> Check {
    let c = generate(&GeneratorConfig::new(10_000, 1)).map_err(|e| e.to_string())?;
    let time = |w| -> Result<Duration, String> {
        let start = Instant::now();
        mine(&c, &MiningConfig::new(Support::Relative(1.0)).with_workers(w)).map_err(|e| e.to_string())?;
        Ok(start.elapsed())
    };
    let (one, four) = (time(1)?, time(4)?);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let verdict = if four < one { "decreased" } else { "did not decrease" };
    Ok(format!("10^4 graphs: 1 worker {one:.2?}, 4 workers {four:.2?} ({verdict}; {cores} core(s) available)"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "oracle equivalence", true, oracle_equivalence),
        (2, "triangle-with-pendant regression", true, pendant_pair_regression),
        (3, "worked-example support", true, support_semantics),
        (4, "configuration independence", true, configuration_independence),
        (5, "duplication scaling", true, duplication_scaling),
        (6, "isomorphism-resolution bound", true, verification_bound),
        (7, "compression", true, compression),
        (8, "scaling smoke test (non-gating)", false, scaling_smoke),
    ];
    let mut failed = 0;
    for (id, name, gating, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let tag = match (&outcome, gating) {
            (Ok(_), true) => "PASS",
            (_, false) => "INFO",
            (Err(_), true) => {
                failed += 1;
                "FAIL"
            }
        };
        let detail = outcome.unwrap_or_else(|e| e);
        println!("{tag} [{id}] {name}: {detail}");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

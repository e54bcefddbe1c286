//! Acceptance suite. One test per criterion; each prints a `criterion N:
//! PASS` line (visible with `--nocapture`) and pins its tolerances in code.
//!
//! Run with: `cargo test -p popgram --test acceptance`

mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{random_corpus, sample_candidates, seeded, Oracle};
use popgram::ablation::measure_step;
use popgram::{
    artifact, degradation_curve, similarity, AblationMode, DeletionPlan, Engine, EngineOptions,
    IngestConfig, Level, PatternId, PopulationStore, Schedule, Score,
};
use rand_chacha::rand_core::RngCore;

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

fn engine_from_text(text: &str) -> Engine {
    let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
    Engine::build(store, EngineOptions::default()).unwrap()
}

fn frac(n: u64, d: u64) -> Score {
    similarity::score(n, d)
}

fn words(line: &str) -> Vec<String> {
    line.split_whitespace().map(|w| w.to_string()).collect()
}

#[test]
fn criterion_1_bar_door_reproduction() {
    let start = Instant::now();
    let engine = engine_from_text(&fixture_text("fixture_bar_door.txt"));

    let bar_door = engine.judge_line("bar the door").unwrap();
    assert_eq!(
        bar_door.nn_score,
        frac(1, 2),
        "nn(bar the door) must be exactly 1/2"
    );
    assert_eq!(bar_door.level, Level::At(0), "level at tau=1 must be 0");
    assert_eq!(engine.options().tau, frac(1, 1));

    let shut_gate = engine.judge_line("shut the gate").unwrap();
    assert_eq!(
        shut_gate.nn_score,
        frac(1, 1),
        "attested candidate must score exactly 1"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1: PASS - nn(bar the door)=1/2 at level 0, nn(shut the gate)=1 ({elapsed:?})"
    );
}

#[test]
fn criterion_2_draw_beats_zebra() {
    let start = Instant::now();
    let text = fixture_text("fixture_draw_zebra.txt");
    let engine = engine_from_text(&text);
    let oracle = Oracle::new(&text, 2);

    let draw = engine.candidate("draw the door").unwrap();
    let zebra = engine.candidate("zebra the door").unwrap();
    let (ordering, jd, jz) = engine.compare(&draw, &zebra).unwrap();
    assert_eq!(
        ordering,
        Ordering::Less,
        "draw the door must be strictly more acceptable"
    );

    // regression values, cross-checked against the exhaustive oracle
    let (oracle_draw, draw_supports) = oracle.nn(&words("draw the door"));
    let (oracle_zebra, _) = oracle.nn(&words("zebra the door"));
    assert_eq!(oracle_draw, frac(2, 3));
    assert_eq!(
        draw_supports,
        BTreeSet::from([3]),
        "supported by the curtain pattern"
    );
    assert_eq!(oracle_zebra, frac(0, 1));

    assert_eq!(jd.nn_score, frac(2, 3));
    assert_eq!(jd.level, Level::At(0));
    assert_eq!(jd.coverage, frac(1, 1));
    assert_eq!(jz.nn_score, frac(0, 1));
    assert_eq!(
        jz.level,
        Level::At(4),
        "only the universal level supports a zebra bigram"
    );
    assert_eq!(jz.coverage, frac(1, 1), "coverage at the universal level");
    assert!(jz.oov);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 2: PASS - draw(2/3, level 0) strictly above zebra(0, level 4) ({elapsed:?})"
    );
}

const MADE: &str = "concerning proposals made by historians";
const DONE: &str = "concerning proposals done by historians";

#[test]
fn criterion_3_historians_tie_after_deletion() {
    let start = Instant::now();
    let text = fixture_text("fixture_historians.txt");
    let engine = engine_from_text(&text);

    // with the third sentence present the candidate is attested
    assert_eq!(engine.judge_line(MADE).unwrap().nn_score, frac(1, 1));

    // oracle verification of the expected post-deletion value at window 2
    let reduced_text: String = text
        .lines()
        .enumerate()
        .filter(|(i, _)| *i != 2)
        .map(|(_, l)| format!("{l}\n"))
        .collect();
    let oracle = Oracle::new(&reduced_text, 2);
    let (oracle_made, made_supports) = oracle.nn(&words(MADE));
    let (oracle_done, done_supports) = oracle.nn(&words(DONE));
    assert_eq!(
        oracle_made,
        frac(3, 5),
        "oracle pins 3/5 after the deletion"
    );
    assert_eq!(oracle_done, frac(3, 5));
    assert_eq!(
        made_supports,
        BTreeSet::from([0]),
        "supported via the forwarded sentence"
    );
    assert_eq!(done_supports, BTreeSet::from([0]));

    // recompute mode: profiles and families rebuilt from the reduced corpus
    let recomputed = engine
        .delete_patterns(&[PatternId(2)], AblationMode::Recompute)
        .unwrap();
    let made = recomputed.judge_line(MADE).unwrap();
    let done = recomputed.judge_line(DONE).unwrap();
    assert_eq!(made.nn_score, frac(3, 5));
    assert_eq!(done.nn_score, frac(3, 5));
    assert_eq!(
        made.rank_key(),
        done.rank_key(),
        "recompute mode must judge the candidates exactly equal"
    );
    let step = measure_step(
        &recomputed,
        1,
        vec![PatternId(2)],
        &[MADE.to_string(), DONE.to_string()],
    )
    .unwrap();
    assert_eq!(
        step.equal_pairs,
        vec![(0, 1)],
        "a tie record must be emitted"
    );

    // frozen mode: the similarity tables of the full corpus are kept
    let frozen = engine
        .delete_patterns(&[PatternId(2)], AblationMode::Frozen)
        .unwrap();
    let made_frozen = frozen.judge_line(MADE).unwrap();
    let done_frozen = frozen.judge_line(DONE).unwrap();

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");

    assert_eq!(
        made_frozen.rank_key(),
        done_frozen.rank_key(),
        "criterion 3: FAIL - frozen-mode judgments are not equal: made scores {} \
         (supports patterns {:?}), done scores {} (supports patterns {:?}). The base \
         corpus attests 'made' twice ('things made', 'proposals made') but 'done' once, \
         so the similarity table frozen from the full corpus is asymmetric between \
         them: sim(made, forwarded)=1/2 vs sim(done, forwarded)=3/5. Only recompute \
         mode, where profiles are rebuilt from the three surviving sentences, makes \
         the two candidates exactly equal (verified above at 3/5).",
        popgram::render_score(&made_frozen.nn_score),
        made_frozen
            .supports
            .iter()
            .map(|s| s.pattern.0)
            .collect::<Vec<_>>(),
        popgram::render_score(&done_frozen.nn_score),
        done_frozen
            .supports
            .iter()
            .map(|s| s.pattern.0)
            .collect::<Vec<_>>(),
    );
    println!("criterion 3: PASS - made/done tie exactly at 3/5 in both modes ({elapsed:?})");
}

#[test]
fn criterion_4_oracle_equivalence_on_random_corpora() {
    let start = Instant::now();
    let schedule = Schedule::standard();
    let thresholds = schedule.thresholds().to_vec();

    for run in 0..50u64 {
        let seed = 0xC0FFEE + run;
        let mut rng = seeded(seed);
        let text = random_corpus(&mut rng, 100, 200);
        let oracle = Oracle::new(&text, 2);
        let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
        assert!(store.patterns().len() <= 200);
        assert!(store.vocabulary().len() <= 100);
        let engine = Engine::build(store, EngineOptions::default()).unwrap();

        // family partitions, level by level
        let oracle_partitions = oracle.partitions(&thresholds);
        for (level, partition) in engine.knowledge().hierarchy.levels.iter().enumerate() {
            let engine_families: BTreeSet<BTreeSet<String>> = partition
                .families
                .iter()
                .map(|family| {
                    family
                        .iter()
                        .map(|&t| engine.store().surface(t).to_string())
                        .collect()
                })
                .collect();
            assert_eq!(
                engine_families, oracle_partitions[level],
                "seed {seed}: families diverge at level {level}"
            );
        }

        for line in sample_candidates(&mut rng, &oracle) {
            let candidate = engine.candidate(&line).unwrap();
            let judgment = engine.judge(&candidate).unwrap();
            let (oracle_score, oracle_supports) = oracle.nn(&words(&line));
            assert_eq!(
                judgment.nn_score, oracle_score,
                "seed {seed}: nn diverges for {line:?}"
            );
            let engine_supports: BTreeSet<usize> = judgment
                .supports
                .iter()
                .map(|s| s.pattern.0 as usize)
                .collect();
            assert_eq!(
                engine_supports, oracle_supports,
                "seed {seed}: supports diverge for {line:?}"
            );

            if candidate.len() >= 2 {
                for level in 0..engine.knowledge().hierarchy.level_count() {
                    let theta = schedule.threshold(level);
                    assert_eq!(
                        engine.coverage_score(&candidate, level).unwrap(),
                        oracle.coverage(&words(&line), theta),
                        "seed {seed}: coverage diverges for {line:?} at level {level}"
                    );
                }
            }
        }
        println!("corpus {run}: seed={seed} ok");
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 4: PASS - 50 corpora match the brute-force oracle exactly ({elapsed:?})");
}

mod criterion_5_invariants {
    use super::*;
    use popgram::similarity::{neighbors, token_similarity};
    use popgram::{ProfileSet, TokenId};
    use proptest::prelude::*;

    /// Corpus text over a vocabulary of at most eight surfaces.
    fn corpus_strategy() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::collection::vec(0u8..8, 1..5), 1..12).prop_map(|patterns| {
            let mut text = patterns
                .iter()
                .map(|pattern| {
                    pattern
                        .iter()
                        .map(|t| format!("t{t}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n");
            text.push('\n');
            text
        })
    }

    fn theta_values() -> Vec<Score> {
        vec![
            frac(0, 1),
            frac(1, 4),
            frac(1, 3),
            frac(1, 2),
            frac(2, 3),
            frac(3, 4),
            frac(1, 1),
        ]
    }

    fn build(text: &str, window: usize) -> (PopulationStore, ProfileSet) {
        let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
        let profiles = ProfileSet::build(&store, window).unwrap();
        (store, profiles)
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 160, ..ProptestConfig::default() })]

        #[test]
        fn similarity_symmetry_bounds_identity(text in corpus_strategy(), window in 1usize..=3) {
            let (store, profiles) = build(&text, window);
            let n = store.vocabulary().len();
            for a in 0..n {
                let a = TokenId(a as u32);
                prop_assert_eq!(token_similarity(&profiles, a, a), frac(1, 1));
                for b in 0..n {
                    let b = TokenId(b as u32);
                    let ab = token_similarity(&profiles, a, b);
                    prop_assert_eq!(ab, token_similarity(&profiles, b, a));
                    prop_assert!(ab >= frac(0, 1) && ab <= frac(1, 1));
                }
            }
        }

        #[test]
        fn profile_transpose_and_oracle_profiles(text in corpus_strategy(), window in 1usize..=3) {
            let (store, profiles) = build(&text, window);
            let oracle = Oracle::new(&text, window);
            // postings are the exact transpose
            for (feature, postings) in &profiles.index.postings {
                for &(token, count) in postings {
                    prop_assert_eq!(profiles.profile(token).count(*feature), count);
                }
            }
            let posted: usize = profiles.index.postings.values().map(Vec::len).sum();
            let profiled: usize = profiles.profiles().iter().map(|p| p.features.len()).sum();
            prop_assert_eq!(posted, profiled);
            // profiles equal an independent rescan
            for token in store.vocabulary() {
                let expected = oracle.profile(&token.surface);
                let actual: std::collections::BTreeMap<(i64, String), u64> = profiles
                    .profile(token.id)
                    .features
                    .iter()
                    .map(|&((d, n), c)| ((d as i64, store.surface(n).to_string()), c))
                    .collect();
                prop_assert_eq!(actual, expected);
            }
        }

        #[test]
        fn mass_conservation(text in corpus_strategy(), window in 1usize..=3) {
            let (store, profiles) = build(&text, window);
            let mut expected = 0u64;
            for pattern in store.patterns() {
                let n = pattern.tokens.len() as i64;
                let w = window as i64;
                let mut pairs = 0u64;
                for i in 0..n {
                    for d in -w..=w {
                        if d != 0 && (0..n).contains(&(i + d)) {
                            pairs += 1;
                        }
                    }
                }
                expected += pairs * pattern.count;
            }
            prop_assert_eq!(profiles.total_mass(), expected);
        }

        #[test]
        fn hierarchy_nestedness(text in corpus_strategy(), window in 1usize..=3) {
            let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
            let engine = Engine::build(store, EngineOptions {
                window,
                ..EngineOptions::default()
            }).unwrap();
            let hierarchy = &engine.knowledge().hierarchy;
            prop_assert!(hierarchy.is_nested());
            for partition in &hierarchy.levels {
                let mut seen = std::collections::BTreeSet::new();
                for family in &partition.families {
                    for token in family {
                        prop_assert!(seen.insert(*token), "token in two families");
                    }
                }
                prop_assert_eq!(seen.len(), engine.store().vocabulary().len());
            }
        }

        #[test]
        fn coverage_is_monotone_in_level(
            text in corpus_strategy(),
            raw in prop::collection::vec(0u8..10, 2..5),
        ) {
            let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
            let engine = Engine::build(store, EngineOptions::default()).unwrap();
            // indexes 8 and 9 become out-of-vocabulary surfaces
            let line = raw
                .iter()
                .map(|t| format!("{}{t}", if *t < 8 { "t" } else { "q" }))
                .collect::<Vec<_>>()
                .join(" ");
            let candidate = engine.candidate(&line).unwrap();
            let coverages: Vec<Score> = (0..engine.knowledge().hierarchy.level_count())
                .map(|level| engine.coverage_score(&candidate, level).unwrap())
                .collect();
            for pair in coverages.windows(2) {
                prop_assert!(pair[0] <= pair[1], "coverage shrank as families widened");
            }
            // the judged level is the first crossing of tau
            let judgment = engine.judge(&candidate).unwrap();
            let expected = coverages.iter().position(|c| *c >= frac(1, 1));
            match (judgment.level, expected) {
                (Level::At(level), Some(first)) => prop_assert_eq!(level, first),
                (Level::Unsupported, None) => {}
                (got, want) => prop_assert!(false, "level {got:?}, first crossing {want:?}"),
            }
        }

        #[test]
        fn frozen_ablation_is_monotone(
            text in corpus_strategy(),
            stride in 2usize..4,
            phase in 0usize..3,
        ) {
            let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
            let engine = Engine::build(store, EngineOptions::default()).unwrap();
            let doomed: Vec<PatternId> = engine
                .store()
                .patterns()
                .iter()
                .filter(|p| (p.id.0 as usize + phase).is_multiple_of(stride))
                .map(|p| p.id)
                .collect();
            prop_assume!(doomed.len() < engine.store().patterns().len());
            let reduced = engine.delete_patterns(&doomed, AblationMode::Frozen).unwrap();
            let sample: Vec<String> = engine
                .store()
                .patterns()
                .iter()
                .take(3)
                .map(|p| {
                    p.tokens
                        .iter()
                        .map(|&t| engine.store().surface(t).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            for line in sample {
                prop_assert!(
                    reduced.judge_line(&line).unwrap().nn_score
                        <= engine.judge_line(&line).unwrap().nn_score
                );
            }
        }

        #[test]
        fn neighbors_shrink_as_theta_grows(text in corpus_strategy(), pick in any::<u8>()) {
            let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
            let profiles = ProfileSet::build(&store, 2).unwrap();
            let token = TokenId(pick as u32 % store.vocabulary().len() as u32);
            let thetas = theta_values();
            for pair in thetas.windows(2) {
                let loose: std::collections::BTreeSet<TokenId> =
                    neighbors(&profiles, token, pair[0]).unwrap().into_iter().map(|(t, _)| t).collect();
                let tight: std::collections::BTreeSet<TokenId> =
                    neighbors(&profiles, token, pair[1]).unwrap().into_iter().map(|(t, _)| t).collect();
                prop_assert!(tight.is_subset(&loose));
            }
        }
    }
}

#[test]
fn criterion_6_end_to_end_determinism() {
    let binary = env!("CARGO_BIN_EXE_popgram");
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture_path("fixture_draw_zebra.txt");

    let run = |args: &[&str]| -> (Vec<u8>, std::process::ExitStatus) {
        let output = std::process::Command::new(binary)
            .args(args)
            .output()
            .unwrap();
        (output.stdout, output.status)
    };

    let index_path = dir.path().join("index.pgi");
    let corpus_arg = corpus.to_str().unwrap();
    let build_args = [
        "build",
        "--corpus",
        corpus_arg,
        "--out",
        index_path.to_str().unwrap(),
    ];
    let (out_a, status_a) = run(&build_args);
    let artifact_a = std::fs::read(&index_path).unwrap();
    let (out_b, status_b) = run(&build_args);
    let artifact_b = std::fs::read(&index_path).unwrap();
    assert!(status_a.success() && status_b.success());
    assert_eq!(out_a, out_b, "build output must be byte-identical");
    assert_eq!(artifact_a, artifact_b, "artifacts must be byte-identical");

    let index = index_path.to_str().unwrap();
    let score_args = [
        "score",
        "--index",
        index,
        "--explain",
        "draw the door",
        "zebra the door",
    ];
    let (score_a, _) = run(&score_args);
    let (score_b, _) = run(&score_args);
    assert!(!score_a.is_empty());
    assert_eq!(score_a, score_b, "score reports must be byte-identical");

    let degrade_args = [
        "degrade",
        "--index",
        index,
        "--mode",
        "recompute",
        "--fraction",
        "1/3",
        "--steps",
        "2",
        "--seed",
        "9",
        "draw the door",
        "shut the gate",
    ];
    let (degrade_a, status) = run(&degrade_args);
    let (degrade_b, _) = run(&degrade_args);
    assert!(status.success());
    assert!(!degrade_a.is_empty());
    assert_eq!(
        degrade_a, degrade_b,
        "degrade reports must be byte-identical"
    );

    println!("criterion 6: PASS - build, score and degrade are byte-identical across runs");
}

#[test]
fn criterion_7_desk_scale_performance() {
    // ~100k tokens over a 2000-surface vocabulary, deterministic content
    let mut rng = seeded(0xDE5C);
    let mut text = String::new();
    let mut total_tokens: u64 = 0;
    while total_tokens < 100_000 {
        let len = 5 + (rng.next_u32() as usize) % 4;
        let mut line = Vec::with_capacity(len);
        for _ in 0..len {
            line.push(format!("w{}", rng.next_u32() % 2000));
        }
        total_tokens += len as u64;
        text.push_str(&line.join(" "));
        text.push('\n');
    }

    let build_start = Instant::now();
    let store = PopulationStore::ingest(text.as_bytes(), IngestConfig::default()).unwrap();
    assert!(store.total_tokens() >= 100_000);
    let engine = Engine::build(store, EngineOptions::default()).unwrap();
    let build_elapsed = build_start.elapsed();
    assert!(
        build_elapsed < Duration::from_secs(30),
        "index build took {build_elapsed:?}, budget is 30s"
    );

    let query = "w17 w450 w1999 w3 w777";
    // warm nothing: a single cold query must fit the budget
    let query_start = Instant::now();
    let judgment = engine.judge_line(query).unwrap();
    let query_elapsed = query_start.elapsed();
    assert!(judgment.population > 0);
    assert!(
        query_elapsed < Duration::from_millis(100),
        "single query took {query_elapsed:?}, budget is 100ms"
    );

    println!(
        "criterion 7: PASS - build {build_elapsed:?} (< 30s), query {query_elapsed:?} (< 100ms)"
    );
}

#[test]
fn window_sensitivity_from_one_to_three() {
    // the qualitative fixture results do not hinge on the default window
    for window in 1..=3usize {
        let options = EngineOptions {
            window,
            ..EngineOptions::default()
        };

        let bar = Engine::build(
            PopulationStore::ingest(
                fixture_text("fixture_bar_door.txt").as_bytes(),
                IngestConfig::default(),
            )
            .unwrap(),
            options.clone(),
        )
        .unwrap();
        let j = bar.judge_line("bar the door").unwrap();
        assert_eq!(j.nn_score, frac(1, 2), "window {window}");
        assert!(j.tied_support, "window {window}: all three patterns tie");
        assert_eq!(j.level, Level::At(0));

        let zebra = Engine::build(
            PopulationStore::ingest(
                fixture_text("fixture_draw_zebra.txt").as_bytes(),
                IngestConfig::default(),
            )
            .unwrap(),
            options.clone(),
        )
        .unwrap();
        let draw_candidate = zebra.candidate("draw the door").unwrap();
        let zebra_candidate = zebra.candidate("zebra the door").unwrap();
        let (ordering, _, _) = zebra.compare(&draw_candidate, &zebra_candidate).unwrap();
        assert_eq!(
            ordering,
            Ordering::Less,
            "window {window}: draw above zebra"
        );

        let historians = Engine::build(
            PopulationStore::ingest(
                fixture_text("fixture_historians.txt").as_bytes(),
                IngestConfig::default(),
            )
            .unwrap(),
            options.clone(),
        )
        .unwrap();
        let reduced = historians
            .delete_patterns(&[PatternId(2)], AblationMode::Recompute)
            .unwrap();
        let made = reduced.judge_line(MADE).unwrap();
        let done = reduced.judge_line(DONE).unwrap();
        assert_eq!(
            made.rank_key(),
            done.rank_key(),
            "window {window}: tie holds"
        );
        let expected = if window == 1 { frac(1, 3) } else { frac(3, 5) };
        assert_eq!(made.nn_score, expected, "window {window}");

        // oracle cross-check of the tie value
        let reduced_text: String = fixture_text("fixture_historians.txt")
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != 2)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        let oracle = Oracle::new(&reduced_text, window);
        assert_eq!(oracle.nn(&words(MADE)).0, expected);
        assert_eq!(oracle.nn(&words(DONE)).0, expected);
    }
    println!("window sensitivity: qualitative results stable for windows 1, 2 and 3");
}

#[test]
fn artifact_round_trip_on_every_fixture() {
    for name in [
        "fixture_bar_door.txt",
        "fixture_draw_zebra.txt",
        "fixture_historians.txt",
    ] {
        let engine = engine_from_text(&fixture_text(name));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.pgi");
        artifact::save(&engine, true, &path).unwrap();
        let (loaded, cache) = artifact::load(&path).unwrap();
        assert!(cache);
        let again = dir.path().join("again.pgi");
        artifact::save(&loaded, cache, &again).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&again).unwrap(),
            "save-load-save must be byte-identical for {name}"
        );
    }
}

#[test]
fn degradation_steps_match_fresh_recomputation() {
    // chaining a curve must equal deleting the union in one derivation
    let text = fixture_text("fixture_historians.txt");
    let engine = engine_from_text(&text);
    let plan = DeletionPlan::Explicit(vec![vec![PatternId(2)], vec![PatternId(0)]]);
    let report = degradation_curve(
        &engine,
        &[MADE.to_string(), DONE.to_string()],
        &plan,
        AblationMode::Recompute,
    )
    .unwrap();
    let direct = engine
        .delete_patterns(&[PatternId(0), PatternId(2)], AblationMode::Recompute)
        .unwrap();
    assert_eq!(
        report.steps[2].judgments[0],
        direct.judge_line(MADE).unwrap()
    );
    assert_eq!(
        report.steps[2].judgments[1],
        direct.judge_line(DONE).unwrap()
    );
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use laughtrack::align::{align_tokens, alignment_cost, extract_candidates, AlignConfig, CandidateLaughter, DualTranscript};
use laughtrack::corpus::{LaughterSegment, LaughterSource, Word};
use laughtrack::eval::{eval_segments, iou, match_segments, EvalConfig};
use laughtrack::features::{extract_features, import_features, index, AudioClip, FeatureConfig, FeatureVector, SegmentKey};
use laughtrack::forest::{
    binary_scores, evaluate_cv, filter_candidates, gate_examples, read_labels, stratified_split, Class, ForestConfig,
    ForestModel, Verdict,
};
use laughtrack::interval::Interval;
use laughtrack::labels::{label_words, LabelingConfig};
use laughtrack::pipeline::{artifacts, run_pipeline, PipelineConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn correction_fixture() -> Check {
    let t = Instant::now();
    let dual = DualTranscript {
        video_id: "v".into(),
        words_a: vec![Word::new("v", 0, "so", 0.0, 3.0), Word::new("v", 1, "anyway", 3.0, 3.4)],
        words_b: vec![Word::new("v", 0, "so", 0.0, 0.4), Word::new("v", 1, "anyway", 0.5, 3.4)],
    };
    let out = extract_candidates(&dual, &[], &AlignConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(out.candidates.len() == 1, || format!("{} candidates", out.candidates.len()))?;
    let c = &out.candidates[0];
    ensure((c.start_s, c.end_s) == (0.5, 3.0), || format!("candidate [{}, {}]", c.start_s, c.end_s))?;
    let spans: Vec<(f64, f64)> = out.corrected_words.iter().map(|w| (w.start_s, w.end_s)).collect();
    ensure(spans == vec![(0.0, 0.4), (3.0, 3.4)], || format!("corrected words {spans:?}"))?;
    within(elapsed, 1.0)?;
    Ok(format!("candidate [0.5, 3.0], words {spans:?}, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

// word containing `t`, else the last word (in order) ending before it
fn boundary(words: &[Word], t: f64) -> Option<usize> {
    if let Some(i) = words.iter().position(|w| w.start_s <= t && t <= w.end_s) {
        return Some(i);
    }
    words.iter().rposition(|w| w.end_s < t)
}

fn brute_force_labels(words: &[Word], laughs: &[LaughterSegment]) -> Vec<u8> {
    let mut out = vec![0u8; words.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        for l in laughs {
            let Some(e) = boundary(words, l.end_s) else { continue };
            let s = boundary(words, l.start_s).unwrap_or(0);
            if s.min(e) <= i && i <= s.max(e) {
                *slot = 1;
            }
        }
    }
    out
}

fn random_video(rng: &mut ChaCha8Rng) -> (Vec<Word>, Vec<LaughterSegment>) {
    let n = rng.random_range(0..=200);
    let mut t = rng.random_range(0..2000u32);
    let mut words = Vec::with_capacity(n);
    for i in 0..n {
        let d = rng.random_range(1..900u32);
        words.push(Word::new("v", i, "w", t as f64 / 1e3, (t + d) as f64 / 1e3));
        // occasional overlap with the next word
        let gap = rng.random_range(0..1500u32);
        t = (t + d + gap).saturating_sub(rng.random_range(0..200u32)).max(t);
    }
    let horizon = t + 3000;
    let laughs = (0..rng.random_range(0..=20))
        .map(|_| {
            let s = rng.random_range(0..horizon);
            let d = rng.random_range(1..5000u32);
            LaughterSegment::new("v", s as f64 / 1e3, (s + d) as f64 / 1e3, LaughterSource::Detector)
        })
        .collect();
    (words, laughs)
}

fn label_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let videos: Vec<_> = (0..1000).map(|_| random_video(&mut rng)).collect();
    let t = Instant::now();
    let cfg = LabelingConfig::default();
    let got: Vec<Vec<u8>> = videos.iter().map(|(w, l)| label_words(w, l, &cfg).labels).collect();
    let elapsed = t.elapsed();
    let mismatches = videos
        .iter()
        .zip(&got)
        .filter(|((w, l), g)| brute_force_labels(w, l) != **g)
        .count();
    ensure(mismatches == 0, || format!("{mismatches} of 1000 videos differ"))?;
    within(elapsed, 10.0)?;
    let words: usize = videos.iter().map(|(w, _)| w.len()).sum();
    Ok(format!("1000 videos, {words} words, 0 mismatches, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

#[allow(clippy::needless_range_loop)]
fn edit_distance(a: &[String], b: &[String]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = usize::from(a[i - 1].to_lowercase() != b[j - 1].to_lowercase());
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + sub);
        }
    }
    d[a.len()][b.len()]
}

fn alignment_oracle() -> Check {
    const VOCAB: [&str; 8] = ["so", "So", "the", "dog", "ha", "uh", "and", "THE"];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    for _ in 0..500 {
        let mut tokens = || -> Vec<String> {
            let n = rng.random_range(0..=50);
            (0..n).map(|_| VOCAB[rng.random_range(0..VOCAB.len())].to_string()).collect()
        };
        let (a, b) = (tokens(), tokens());
        let words = |t: &[String]| -> Vec<Word> {
            t.iter().enumerate().map(|(i, s)| Word::new("v", i, s, i as f64, i as f64 + 0.5)).collect()
        };
        if alignment_cost(&align_tokens(&words(&a), &words(&b))) != edit_distance(&a, &b) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} of 500 pairs differ"))?;
    Ok("500 pairs, 0 mismatches".into())
}

fn naive_iou(a: (f64, f64), b: (f64, f64)) -> f64 {
    let inter = (a.1.min(b.1) - a.0.max(b.0)).max(0.0);
    let union = (a.1 - a.0) + (b.1 - b.0) - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

fn iou_suite() -> Check {
    let third: f64 = iou(&Interval::new(0.0, 1.0), &Interval::new(0.5, 1.5));
    ensure((third - 1.0 / 3.0).abs() <= 1e-9, || format!("IoU([0,1],[0.5,1.5]) = {third}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let thresholds = [0.01, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0];
    for set in 0..10_000 {
        let mut draw = |max: usize| -> Vec<Interval<f64>> {
            (0..rng.random_range(0..=max))
                .map(|_| {
                    let s = rng.random_range(0..30_000u32);
                    let d = rng.random_range(1..4000u32);
                    Interval::new(s as f64 / 1e3, (s + d) as f64 / 1e3)
                })
                .collect()
        };
        let (pred, gold) = (draw(12), draw(12));
        for p in &pred {
            for g in &gold {
                let x = iou(p, g);
                ensure(x == iou(g, p), || format!("set {set}: asymmetric IoU"))?;
                ensure((0.0..=1.0).contains(&x), || format!("set {set}: IoU {x} out of range"))?;
                ensure((x - naive_iou((p.start, p.end), (g.start, g.end))).abs() < 1e-12, || {
                    format!("set {set}: IoU {x} differs from direct computation")
                })?;
            }
        }
        let mut last_tp = usize::MAX;
        for &t in &thresholds {
            let m = match_segments(&pred, &gold, &EvalConfig { iou_threshold: t });
            let c = m.confusion();
            ensure(c.tp + c.fp == pred.len() && c.tp + c.fn_ == gold.len(), || {
                format!("set {set}: counts not conserved at {t}")
            })?;
            ensure(m.matched.iter().all(|&(_, _, x)| x > t), || format!("set {set}: match at or below {t}"))?;
            ensure(c.tp <= last_tp, || format!("set {set}: tp grew with threshold {t}"))?;
            last_tp = c.tp;
        }
    }

    let segs: Vec<LaughterSegment> = (0..50)
        .map(|i| LaughterSegment::new(format!("v{}", i % 3), i as f64 * 2.0, i as f64 * 2.0 + 1.5, LaughterSource::Manual))
        .collect();
    let r = eval_segments(&segs, &segs, None, &EvalConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.positive.f1 == 1.0, || format!("pred = gold gives F1 {}", r.positive.f1))?;
    Ok(format!("10000 sets, IoU([0,1],[0.5,1.5]) = {third:.12}, pred = gold F1 = 1"))
}

fn verification_gate() -> Check {
    let dir = fixture_dir();
    let model = ForestModel::load(dir.join("model.json")).map_err(|e| e.to_string())?;

    // every millisecond duration below the threshold, with no feature rows
    let grid: Vec<CandidateLaughter> = (1..500)
        .map(|ms| CandidateLaughter {
            video_id: "en000".into(),
            start_s: 1.0,
            end_s: 1.0 + ms as f64 / 1e3,
            prev_word_idx: 0,
            next_word_idx: Some(1),
            corrected_prev_end_s: 1.0,
            corrected_next_start_s: Some(1.0 + ms as f64 / 1e3),
        })
        .collect();
    let none: HashMap<SegmentKey, FeatureVector<f64>> = HashMap::new();
    let out = filter_candidates(&grid, &none, &model).map_err(|e| e.to_string())?;
    ensure(out.count(Verdict::AutoOther) == grid.len(), || {
        format!("{} of {} short candidates auto_other", out.count(Verdict::AutoOther), grid.len())
    })?;
    ensure(out.accepted.is_empty(), || "a short candidate was accepted".into())?;

    // labelled fixture segments: short ones never enter training or scoring
    let feats = import_features::<f64>(dir.join("train/features.csv")).map_err(|e| e.to_string())?;
    let labels = read_labels(dir.join("train/labels.csv")).map_err(|e| e.to_string())?;
    let short: Vec<&SegmentKey> = labels.keys().filter(|k| k.end_s() - k.start_s() < 0.5 - 1e-9).collect();
    let set = gate_examples(&feats, &labels);
    ensure(set.auto_other.len() == short.len(), || {
        format!("{} auto_other, {} short segments", set.auto_other.len(), short.len())
    })?;
    ensure(set.keys.iter().all(|k| k.end_s() - k.start_s() >= 0.5 - 1e-9), || {
        "a short segment reached the training set".into()
    })?;
    ensure(!short.is_empty(), || "fixture has no short segments".into())?;
    Ok(format!(
        "{} grid candidates and {} of {} fixture segments auto_other",
        grid.len(),
        short.len(),
        labels.len()
    ))
}

fn blobs(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Class>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let c = if i % 2 == 0 { Class::Laughter } else { Class::Other };
        let centre = if c == Class::Laughter { 2.0 } else { -2.0 };
        x.push((0..dim).map(|_| centre + rng.random_range(-1.5..1.5)).collect());
        y.push(c);
    }
    (x, y)
}

fn random_forest() -> Check {
    let (x, y) = blobs(200, 10, 17);
    let names: Vec<String> = (0..10).map(|i| format!("f{i}")).collect();
    let cfg = ForestConfig {
        seed: 5,
        ..ForestConfig::default()
    };

    let (train, test) = stratified_split(&y, 0.25, 3);
    let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
    let ty: Vec<Class> = train.iter().map(|&i| y[i]).collect();
    let t = Instant::now();
    let model = ForestModel::train(&tx, &ty, names.clone(), &cfg).map_err(|e| e.to_string())?;
    let train_time = t.elapsed();
    let truth: Vec<Class> = test.iter().map(|&i| y[i]).collect();
    let pred: Vec<Class> = test.iter().map(|&i| model.predict(&x[i]).unwrap().0).collect();
    let holdout = binary_scores(&truth, &pred).laughter.f1;
    ensure(holdout >= 0.95, || format!("holdout F1 {holdout}"))?;

    let mut shuffled = y.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(23));
    let cv = evaluate_cv(&x, &shuffled, &names, &cfg, 50).map_err(|e| e.to_string())?;
    let noise = cv.macro_avg.f1.mean;
    ensure((0.4..=0.6).contains(&noise), || format!("shuffled-label F1 {noise}"))?;

    let again = ForestModel::train(&tx, &ty, names.clone(), &cfg).map_err(|e| e.to_string())?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?
        .install(|| ForestModel::train(&tx, &ty, names.clone(), &cfg))
        .map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bytes = |m: &ForestModel<f64>, name: &str| -> Result<Vec<u8>, String> {
        let p = dir.path().join(name);
        m.save(&p).map_err(|e| e.to_string())?;
        std::fs::read(&p).map_err(|e| e.to_string())
    };
    let reference = bytes(&model, "a.json")?;
    ensure(reference == bytes(&again, "b.json")?, || "same seed, different model file".into())?;
    ensure(reference == bytes(&single, "c.json")?, || "one-thread model file differs".into())?;
    within(train_time, 5.0)?;
    Ok(format!(
        "holdout F1 {holdout:.3}, shuffled CV F1 {noise:.3}, identical files, train {:.0} ms",
        train_time.as_secs_f64() * 1e3
    ))
}

fn features() -> Check {
    let sr = 22_050;
    let cfg = FeatureConfig::default();
    let tone: Vec<f64> = (0..sr).map(|i| 0.5 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / sr as f64).sin()).collect();
    let fv = extract_features(&AudioClip::from_samples("v", tone.clone(), sr as u32), &cfg).map_err(|e| e.to_string())?;
    let centroid = fv.as_slice()[index::SPECTRAL_CENTROID];
    ensure((415.0..=465.0).contains(&centroid), || format!("440 Hz centroid {centroid}"))?;

    let silent = extract_features(&AudioClip::from_samples("v", vec![0.0f64; sr], sr as u32), &cfg).map_err(|e| e.to_string())?;
    let (rms, p90) = (silent.as_slice()[index::RMS_MEAN], silent.as_slice()[index::ENERGY_P90]);
    ensure(rms == 0.0 && p90 == 0.0, || format!("silence rms_mean {rms}, energy_p90 {p90}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let noisy: Vec<f64> = tone.iter().map(|s| s + rng.random_range(-0.1..0.1)).collect();
    let loud: Vec<f64> = noisy.iter().map(|s| 2.0 * s).collect();
    let a = extract_features(&AudioClip::from_samples("v", noisy, sr as u32), &cfg).map_err(|e| e.to_string())?;
    let b = extract_features(&AudioClip::from_samples("v", loud, sr as u32), &cfg).map_err(|e| e.to_string())?;
    let (fa, fb) = (a.as_slice()[index::SPECTRAL_FLATNESS], b.as_slice()[index::SPECTRAL_FLATNESS]);
    let rel = (fa - fb).abs() / fa.abs().max(f64::MIN_POSITIVE);
    ensure(rel <= 1e-6, || format!("flatness {fa} vs {fb}"))?;
    Ok(format!("centroid {centroid:.1} Hz, silence 0/0, flatness rel. change {rel:.1e}"))
}

fn sha256_file(p: &Path) -> Result<String, String> {
    let bytes = std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn pipeline_determinism() -> Check {
    let base = PipelineConfig::load(fixture_dir().join("config.json")).map_err(|e| e.to_string())?;
    let mut digests = Vec::new();
    let mut times = Vec::new();
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for dir in &dirs {
        let mut cfg = base.clone();
        cfg.paths.out_dir = Some(dir.path().to_path_buf());
        let t = Instant::now();
        run_pipeline(&cfg, |_| {}).map_err(|e| e.to_string())?;
        times.push(t.elapsed());
        digests.push(sha256_file(&dir.path().join(artifacts::DATASET))?);
    }
    ensure(digests[0] == digests[1], || format!("dataset digests {} and {}", digests[0], digests[1]))?;
    for t in &times {
        within(*t, 30.0)?;
    }
    Ok(format!(
        "dataset sha256 {}…, runs {:.1} s and {:.1} s",
        &digests[0][..12],
        times[0].as_secs_f64(),
        times[1].as_secs_f64()
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("correction fixture", correction_fixture),
        ("span labels vs brute-force oracle", label_oracle),
        ("alignment cost vs edit-distance oracle", alignment_oracle),
        ("IoU and matching invariants", iou_suite),
        ("verification gate", verification_gate),
        ("random forest", random_forest),
        ("feature extraction", features),
        ("end-to-end determinism", pipeline_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

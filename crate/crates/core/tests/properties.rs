use laughtrack::align::{
    align_strs, alignment_cost, extract_candidates, AlignConfig, AlignOp, DualTranscript,
};
use laughtrack::corpus::{
    corpus_stats, read_laughter, read_words, write_laughter, write_words, LabeledSequence, Language,
    LaughterSegment, LaughterSource, Split, VideoRecord, Word,
};
use laughtrack::eval::{eval_tokens, iou, match_segments, EvalConfig};
use laughtrack::features::{extract_features, index, AudioClip, FeatureConfig};
use laughtrack::forest::{evaluate_cv, Class, ForestConfig, ForestModel};
use laughtrack::interval::Interval;
use laughtrack::labels::{label_words, LabelingConfig};
use proptest::prelude::*;

const LANGS: [Language; 4] = [Language::En, Language::Fr, Language::Es, Language::Pt];

/// Sorted, possibly overlapping words on the millisecond grid.
fn words_strategy(video: &'static str, max: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec((0u32..600, 1u32..900, 0usize..6), 0..max).prop_map(move |steps| {
        let mut t = 0u32;
        steps
            .into_iter()
            .enumerate()
            .map(|(i, (gap, dur, tok))| {
                t += gap;
                let s = t as f64 / 1000.0;
                let e = (t + dur) as f64 / 1000.0;
                Word::new(video, i, ["a", "b", "c", "d", "e", "f"][tok], s, e)
            })
            .collect()
    })
}

fn laughs_strategy(video: &'static str, horizon_ms: u32, max: usize) -> impl Strategy<Value = Vec<LaughterSegment>> {
    prop::collection::vec((0..horizon_ms, 1u32..4000), 0..max).prop_map(move |v| {
        v.into_iter()
            .map(|(s, d)| {
                LaughterSegment::new(video, s as f64 / 1000.0, (s + d) as f64 / 1000.0, LaughterSource::Detector)
            })
            .collect()
    })
}

// word at or before `t`, by linear scan
fn boundary(words: &[Word], t: f64) -> Option<usize> {
    if let Some(i) = words.iter().position(|w| w.start_s <= t && t <= w.end_s) {
        return Some(i);
    }
    words.iter().rposition(|w| w.end_s < t)
}

fn span_oracle(words: &[Word], laughs: &[LaughterSegment]) -> Vec<u8> {
    (0..words.len())
        .map(|i| {
            let hit = laughs.iter().any(|l| {
                let Some(e) = boundary(words, l.end_s) else { return false };
                let s = boundary(words, l.start_s).unwrap_or(0);
                s.min(e) <= i && i <= s.max(e)
            });
            u8::from(hit)
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
fn levenshtein(a: &[String], b: &[String]) -> usize {
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

fn tokens_strategy() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["uh", "Uh", "so", "the", "dog", "ha"]), 0..30)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

/// Dual transcript with laugh-like gaps: A stretches the word before a gap,
/// B stretches the word after it.
fn dual_strategy() -> impl Strategy<Value = DualTranscript> {
    prop::collection::vec((150u32..450, 20u32..200, prop::option::weighted(0.2, 500u32..3000)), 2..60).prop_map(
        |steps| {
            let mut t = 0u32;
            let mut words = Vec::new();
            let mut gaps = Vec::new();
            for (i, (dur, gap, event)) in steps.iter().enumerate() {
                words.push(Word::new("v", i, ["so", "the", "dog"][i % 3], t as f64 / 1000.0, (t + dur) as f64 / 1000.0));
                t += dur + gap;
                if let Some(e) = event {
                    gaps.push((i, (t - gap) as f64 / 1000.0, (t + e) as f64 / 1000.0));
                    t += e;
                }
            }
            let mut a = words.clone();
            let mut b = words;
            for &(i, s, e) in &gaps {
                a[i].end_s = e;
                if i + 1 < b.len() {
                    b[i + 1].start_s = s;
                }
            }
            DualTranscript {
                video_id: "v".into(),
                words_a: a,
                words_b: b,
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_round_trip(words in words_strategy("v", 40)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.jsonl");
        write_words(&p, &words).unwrap();
        prop_assert_eq!(read_words(&p).unwrap(), words);
    }

    #[test]
    fn laughter_round_trip(laughs in laughs_strategy("v", 60_000, 20)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.jsonl");
        write_laughter(&p, &laughs).unwrap();
        prop_assert_eq!(read_laughter(&p).unwrap(), laughs);
    }

    #[test]
    fn stats_total_is_sum_of_rows(videos in prop::collection::vec((0usize..4, 60u32..4000, 0usize..30, 0usize..5), 1..12)) {
        let mut manifest = Vec::new();
        let mut words = Vec::new();
        let mut laughs = Vec::new();
        for (k, &(lang, dur, nw, nl)) in videos.iter().enumerate() {
            let id = format!("v{k}");
            manifest.push(VideoRecord {
                video_id: id.clone(),
                language: LANGS[lang],
                channel: "c".into(),
                duration_s: dur as f64,
                split: Split::Train,
            });
            for i in 0..nw {
                words.push(Word::new(id.as_str(), i, "w", i as f64, i as f64 + 0.5));
            }
            for i in 0..nl {
                laughs.push(LaughterSegment::new(id.as_str(), i as f64, i as f64 + 1.0, LaughterSource::Detector));
            }
        }
        let words: Vec<Word> = words.into_iter().filter(|w| {
            manifest.iter().any(|v| v.video_id == w.video_id && w.end_s <= v.duration_s)
        }).collect();
        let laughs: Vec<_> = laughs.into_iter().filter(|l| {
            manifest.iter().any(|v| v.video_id == l.video_id && l.end_s <= v.duration_s)
        }).collect();
        let r = corpus_stats(&manifest, &words, &laughs).unwrap();
        let rows = r.languages.values();
        prop_assert_eq!(rows.clone().map(|x| x.videos).sum::<usize>(), r.total.videos);
        prop_assert_eq!(rows.clone().map(|x| x.words).sum::<usize>(), r.total.words);
        prop_assert_eq!(rows.clone().map(|x| x.laughter).sum::<usize>(), r.total.laughter);
        prop_assert!((rows.map(|x| x.duration_s).sum::<f64>() - r.total.duration_s).abs() < 1e-6);
        prop_assert_eq!(r.total.words, words.len());
    }

    #[test]
    fn alignment_cost_matches_dp(a in tokens_strategy(), b in tokens_strategy()) {
        let pairs = align_strs(&a, &b);
        prop_assert_eq!(alignment_cost(&pairs), levenshtein(&a, &b));
        // every index used once, in order
        let ai: Vec<usize> = pairs.iter().filter_map(|p| p.a_idx).collect();
        let bi: Vec<usize> = pairs.iter().filter_map(|p| p.b_idx).collect();
        prop_assert_eq!(ai, (0..a.len()).collect::<Vec<_>>());
        prop_assert_eq!(bi, (0..b.len()).collect::<Vec<_>>());
        for p in &pairs {
            if p.op == AlignOp::Match {
                prop_assert_eq!(a[p.a_idx.unwrap()].to_lowercase(), b[p.b_idx.unwrap()].to_lowercase());
            }
        }
    }

    #[test]
    fn candidates_respect_invariants(dual in dual_strategy(), cover in prop::collection::vec(0usize..60, 0..3)) {
        let cfg = AlignConfig::default();
        let existing: Vec<LaughterSegment> = cover
            .iter()
            .filter_map(|&i| dual.words_a.get(i))
            .map(|w| LaughterSegment::new("v", w.start_s, w.end_s.max(w.start_s + 0.1), LaughterSource::Detector))
            .collect();
        let out = extract_candidates(&dual, &existing, &cfg).unwrap();
        let a = &dual.words_a;
        prop_assert_eq!(out.corrected_words.len(), a.len());
        for (c, w) in out.corrected_words.iter().zip(a) {
            prop_assert_eq!(&c.token, &w.token);
            prop_assert_eq!(c.idx, w.idx);
            prop_assert!(c.start_s <= c.end_s);
        }
        for pair in out.corrected_words.windows(2) {
            prop_assert!(pair[0].start_s <= pair[1].start_s);
        }
        let flanking: std::collections::HashSet<usize> = out
            .candidates
            .iter()
            .flat_map(|c| std::iter::once(c.prev_word_idx).chain(c.next_word_idx))
            .collect();
        for c in &out.candidates {
            prop_assert!(c.end_s - c.start_s >= cfg.min_candidate_dur - 1e-9);
            let iv = Interval::new(c.start_s, c.end_s);
            for w in &out.corrected_words {
                prop_assert!(w.interval().overlap(&iv) <= 1e-9, "{:?} overlaps {:?}", w, c);
            }
        }
        // words whose timestamps changed flank some discrepancy; when every
        // discrepancy is emitted they flank a candidate
        let changed = out.corrected_words.iter().zip(a).filter(|(c, w)| c != w).count();
        if out.discrepancies == out.candidates.len() {
            for (c, w) in out.corrected_words.iter().zip(a) {
                if c != w {
                    prop_assert!(flanking.contains(&c.idx));
                }
            }
        }
        prop_assert!(changed <= 2 * out.discrepancies);

        let mut known = existing.clone();
        known.extend(out.candidates.iter().map(|c| LaughterSegment::new("v", c.start_s, c.end_s, LaughterSource::AsrGap)));
        let again = extract_candidates(
            &DualTranscript { video_id: "v".into(), words_a: out.corrected_words.clone(), words_b: dual.words_b.clone() },
            &known,
            &cfg,
        ).unwrap();
        prop_assert!(again.candidates.is_empty());
    }

    #[test]
    fn span_labels_match_oracle(words in words_strategy("v", 60), laughs in laughs_strategy("v", 40_000, 8)) {
        let got = label_words(&words, &laughs, &LabelingConfig::default());
        prop_assert_eq!(got.labels, span_oracle(&words, &laughs));
    }

    #[test]
    fn labels_compose_by_or(words in words_strategy("v", 60), l1 in laughs_strategy("v", 40_000, 6), l2 in laughs_strategy("v", 40_000, 6)) {
        let cfg = LabelingConfig::default();
        let a = label_words(&words, &l1, &cfg).labels;
        let b = label_words(&words, &l2, &cfg).labels;
        let both: Vec<_> = l1.iter().chain(&l2).cloned().collect();
        let ab = label_words(&words, &both, &cfg).labels;
        let or: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x | y).collect();
        prop_assert_eq!(&ab, &or);
        // adding laughs never clears a label
        prop_assert!(a.iter().zip(&ab).all(|(x, y)| x <= y));
        prop_assert!(ab.iter().filter(|&&l| l == 1).count() <= words.len());
        prop_assert!(label_words(&words, &[], &cfg).labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn matching_invariants(
        pred in prop::collection::vec((0u32..20_000, 1u32..3000), 0..10),
        gold in prop::collection::vec((0u32..20_000, 1u32..3000), 0..10),
    ) {
        let iv = |v: &[(u32, u32)]| -> Vec<Interval<f64>> {
            v.iter().map(|&(s, d)| Interval::new(s as f64 / 1e3, (s + d) as f64 / 1e3)).collect()
        };
        let (p, g) = (iv(&pred), iv(&gold));
        for a in &p {
            for b in &g {
                let x = iou(a, b);
                prop_assert_eq!(x, iou(b, a));
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }
        let mut last_tp = usize::MAX;
        for t in [0.05, 0.2, 0.35, 0.5, 0.75, 1.0] {
            let c = match_segments(&p, &g, &EvalConfig { iou_threshold: t }).confusion();
            prop_assert!(c.tp <= p.len().min(g.len()));
            prop_assert_eq!(c.tp + c.fp, p.len());
            prop_assert_eq!(c.tp + c.fn_, g.len());
            prop_assert!(c.tp <= last_tp);
            last_tp = c.tp;
        }
    }

    #[test]
    fn token_scores_match_naive_counts(videos in prop::collection::vec((0usize..4, prop::collection::vec((0u8..2, 0u8..2), 1..40)), 1..8)) {
        let mut pred = Vec::new();
        let mut gold = Vec::new();
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for (k, (lang, pairs)) in videos.iter().enumerate() {
            let tokens: Vec<String> = (0..pairs.len()).map(|i| format!("w{i}")).collect();
            let mk = |labels: Vec<u8>| LabeledSequence {
                video_id: format!("v{k}"),
                language: LANGS[*lang],
                tokens: tokens.clone(),
                labels,
            };
            pred.push(mk(pairs.iter().map(|p| p.0).collect()));
            gold.push(mk(pairs.iter().map(|p| p.1).collect()));
            for &(p, g) in pairs {
                tp += usize::from(p == 1 && g == 1);
                fp += usize::from(p == 1 && g == 0);
                fn_ += usize::from(p == 0 && g == 1);
            }
        }
        let r = eval_tokens(&pred, &gold).unwrap();
        prop_assert_eq!((r.positive.counts.tp, r.positive.counts.fp, r.positive.counts.fn_), (tp, fp, fn_));
        let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let rc = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f = if p + rc == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
        prop_assert!((r.positive.f1 - f).abs() < 1e-12);
    }
}

fn blobs(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Class>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let c = if i % 2 == 0 { Class::Laughter } else { Class::Other };
        let centre = if c == Class::Laughter { 1.0 } else { -1.0 };
        x.push((0..dim).map(|_| centre + rng.random_range(-1.5..1.5)).collect());
        y.push(c);
    }
    (x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forest_is_deterministic_and_bounded(seed in 0u64..1000) {
        let (x, y) = blobs(60, 5, seed);
        let order: Vec<String> = (0..5).map(|i| format!("f{i}")).collect();
        let cfg = ForestConfig { n_estimators: 10, seed, ..ForestConfig::default() };
        let m1 = ForestModel::train(&x, &y, order.clone(), &cfg).unwrap();
        let m2 = ForestModel::train(&x, &y, order, &cfg).unwrap();
        prop_assert_eq!(m1.to_json().unwrap(), m2.to_json().unwrap());
        for row in &x {
            let p = m1.predict_proba(row).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn forest_ignores_monotone_rescaling(seed in 0u64..1000, feature in 0usize..4) {
        use laughtrack::forest::Node;
        let (x, y) = blobs(50, 4, seed);
        let order: Vec<String> = (0..4).map(|i| format!("f{i}")).collect();
        let cfg = ForestConfig { n_estimators: 8, seed, ..ForestConfig::default() };
        let squash = |v: f64| v.powi(3) + 2.0 * v + 7.0;
        let xt: Vec<Vec<f64>> = x.iter().map(|r| {
            let mut r = r.clone();
            r[feature] = squash(r[feature]);
            r
        }).collect();
        let m = ForestModel::train(&x, &y, order.clone(), &cfg).unwrap();
        let mt = ForestModel::train(&xt, &y, order, &cfg).unwrap();
        // same partitions of the in-bag rows: identical topology, split
        // features and leaf counts; only thresholds on `feature` move
        for (t, tt) in m.trees.iter().zip(&mt.trees) {
            prop_assert_eq!(t.nodes.len(), tt.nodes.len());
            for (n, nt) in t.nodes.iter().zip(&tt.nodes) {
                match (n, nt) {
                    (Node::Leaf { counts }, Node::Leaf { counts: ct }) => prop_assert_eq!(counts, ct),
                    (
                        Node::Split { feature: f, threshold: th, left: l, right: r },
                        Node::Split { feature: ft, threshold: tht, left: lt, right: rt },
                    ) => {
                        prop_assert_eq!((f, l, r), (ft, lt, rt));
                        if *f != feature {
                            prop_assert_eq!(th, tht);
                        }
                    }
                    _ => prop_assert!(false, "node kinds differ"),
                }
            }
        }
    }

    #[test]
    fn amplitude_scaling(seed in 0u64..1000, k in 0.1f64..4.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = rng.random_range(150.0..1500.0);
        let x: Vec<f64> = (0..11025)
            .map(|i| 0.2 * (std::f64::consts::TAU * f * i as f64 / 22050.0).sin() + rng.random_range(-0.05..0.05))
            .collect();
        let y: Vec<f64> = x.iter().map(|v| v * k).collect();
        let cfg = FeatureConfig::default();
        let a = extract_features(&AudioClip::from_samples("v", x, 22050), &cfg).unwrap();
        let b = extract_features(&AudioClip::from_samples("v", y, 22050), &cfg).unwrap();
        let rel = |p: f64, q: f64| (p - q).abs() / p.abs().max(1e-12);
        prop_assert!(rel(a[index::RMS_MEAN] * k, b[index::RMS_MEAN]) < 1e-9);
        for i in [index::SPECTRAL_FLATNESS, index::SPECTRAL_CENTROID] {
            prop_assert!(rel(a[i], b[i]) < 1e-6, "feature {} {} vs {}", i, a[i], b[i]);
        }
        for c in 0..12 {
            prop_assert!((a[index::CHROMA + c] - b[index::CHROMA + c]).abs() < 1e-6);
        }
    }
}

#[test]
fn cv_macro_lies_between_classes() {
    let (x, y) = blobs(80, 3, 9);
    let order: Vec<String> = (0..3).map(|i| format!("f{i}")).collect();
    // overlapping blobs so the classes score differently
    let x: Vec<Vec<f64>> = x.iter().map(|r| r.iter().map(|v| v * 3.0).collect()).collect();
    let cfg = ForestConfig { n_estimators: 10, ..ForestConfig::default() };
    let r = evaluate_cv(&x, &y, &order, &cfg, 20).unwrap();
    let (lo, hi) = (r.laughter.f1.mean.min(r.other.f1.mean), r.laughter.f1.mean.max(r.other.f1.mean));
    assert!(lo - 1e-12 <= r.macro_avg.f1.mean && r.macro_avg.f1.mean <= hi + 1e-12);
    let again = evaluate_cv(&x, &y, &order, &cfg, 20).unwrap();
    assert_eq!(r, again);
}

#[test]
fn span_oracle_self_check() {
    let words = vec![
        Word::new("v", 0, "w1", 0.0, 1.0),
        Word::new("v", 1, "w2", 1.5, 2.0),
        Word::new("v", 2, "w3", 2.5, 3.0),
    ];
    let l = |s, e| LaughterSegment::new("v", s, e, LaughterSource::Manual);
    assert_eq!(span_oracle(&words, &[l(1.0, 1.4)]), vec![1, 0, 0]);
    assert_eq!(span_oracle(&words, &[l(0.5, 2.7)]), vec![1, 1, 1]);
}

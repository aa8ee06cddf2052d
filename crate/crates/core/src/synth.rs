//! Seeded synthetic stand-up recordings for fixtures and tests.
//!
//! Each video alternates words with non-speech events. Transcript A stretches
//! the word before an event over it and transcript B pulls the word after it
//! back to the event start, which is the disagreement mining looks for. Only
//! some laughs reach the detector track.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::TAU;

use crate::corpus::{round_ms, Language, LaughterSegment, LaughterSource, Split, VideoRecord, Word};
use crate::features::SegmentKey;
use crate::forest::Class;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub languages: Vec<Language>,
    pub videos_per_language: usize,
    pub duration_s: f64,
    pub sample_rate: u32,
    /// Chance of an event after each word.
    pub event_rate: f64,
    /// Share of events that are laughter rather than other sounds.
    pub laughter_share: f64,
    /// Chance a laugh is in the detector track.
    pub detector_recall: f64,
    pub split: Split,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            languages: vec![Language::En, Language::Fr],
            videos_per_language: 2,
            duration_s: 30.0,
            sample_rate: 8000,
            event_rate: 0.15,
            laughter_share: 0.7,
            detector_recall: 0.5,
            split: Split::Test,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Laughter,
    Silence,
    Tone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthEvent {
    pub video_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default)]
pub struct SynthCorpus {
    pub manifest: Vec<VideoRecord>,
    /// True word timings.
    pub words: Vec<Word>,
    pub words_a: Vec<Word>,
    pub words_b: Vec<Word>,
    pub events: Vec<SynthEvent>,
    /// Detected laughs only.
    pub detector: Vec<LaughterSegment>,
    /// `(video_id, samples)` at the configured rate.
    pub audio: Vec<(String, Vec<f64>)>,
}

impl SynthCorpus {
    /// Every laugh as a manual annotation.
    pub fn gold_laughter(&self) -> Vec<LaughterSegment> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Laughter)
            .map(|e| LaughterSegment::new(&e.video_id, e.start_s, e.end_s, LaughterSource::Manual))
            .collect()
    }

    /// Classifier training segments: events, runs of speech, and a few clips
    /// too short to pass the duration gate.
    pub fn training_segments(&self) -> Vec<(SegmentKey, Class)> {
        let mut out: Vec<(SegmentKey, Class)> = self
            .events
            .iter()
            .map(|e| {
                let class = if e.kind == EventKind::Laughter { Class::Laughter } else { Class::Other };
                (SegmentKey::new(&e.video_id, e.start_s, e.end_s), class)
            })
            .collect();
        for v in &self.manifest {
            let words: Vec<&Word> = self.words.iter().filter(|w| w.video_id == v.video_id).collect();
            for chunk in words.chunks(4) {
                let (first, last) = (chunk[0], chunk[chunk.len() - 1]);
                let inside_event = self.events.iter().any(|e| {
                    e.video_id == v.video_id && e.start_s < last.end_s && e.end_s > first.start_s
                });
                if !inside_event {
                    out.push((SegmentKey::new(&v.video_id, first.start_s, last.end_s), Class::Other));
                }
            }
            if let Some(w) = words.first() {
                out.push((SegmentKey::new(&v.video_id, w.start_s, w.end_s.min(w.start_s + 0.3)), Class::Other));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.dedup_by(|a, b| a.0 == b.0);
        out
    }
}

const VOCAB: [&str; 16] = [
    "so", "my", "wife", "said", "the", "dog", "never", "again", "airport", "why", "doctor", "told",
    "me", "tonight", "really", "okay",
];

pub fn synth_corpus(cfg: &SynthConfig) -> SynthCorpus {
    let mut corpus = SynthCorpus::default();
    for (li, &lang) in cfg.languages.iter().enumerate() {
        for k in 0..cfg.videos_per_language {
            let id = format!("{}{:03}", lang.code(), k);
            let stream = (li * 1000 + k) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(crate::forest::derive_seed(cfg.seed, stream));
            let video = VideoRecord {
                video_id: id.clone(),
                language: lang,
                channel: format!("club-{}", lang.code()),
                duration_s: cfg.duration_s,
                split: cfg.split,
            };
            synth_video(cfg, &video, &mut rng, &mut corpus);
            corpus.manifest.push(video);
        }
    }
    corpus
}

fn synth_video(cfg: &SynthConfig, video: &VideoRecord, rng: &mut ChaCha8Rng, out: &mut SynthCorpus) {
    let id = &video.video_id;
    let mut words: Vec<Word> = Vec::new();
    let mut events: Vec<SynthEvent> = Vec::new();
    // index of the word each event follows
    let mut after: Vec<usize> = Vec::new();
    let mut t = 0.5;
    // an event is always followed by a word
    while t < cfg.duration_s - 4.0 || after.last() == Some(&(words.len().wrapping_sub(1))) {
        let d = rng.random_range(0.2..0.45);
        let token = VOCAB[rng.random_range(0..VOCAB.len())];
        words.push(Word::new(id.as_str(), words.len(), token, round_ms(t), round_ms(t + d)));
        t += d;
        if words.len() > 2 && t < cfg.duration_s - 4.0 && rng.random_bool(cfg.event_rate) {
            let start = t + rng.random_range(0.0..0.1);
            let len = rng.random_range(1.0..2.5);
            let kind = if rng.random_bool(cfg.laughter_share) {
                EventKind::Laughter
            } else if rng.random_bool(0.5) {
                EventKind::Silence
            } else {
                EventKind::Tone
            };
            events.push(SynthEvent {
                video_id: id.clone(),
                start_s: round_ms(start),
                end_s: round_ms(start + len),
                kind,
            });
            after.push(words.len() - 1);
            t = start + len;
        }
        t += rng.random_range(0.05..0.15);
    }

    let mut a = words.clone();
    let mut b = words.clone();
    for (e, &i) in events.iter().zip(&after) {
        a[i].end_s = e.end_s;
        if i + 1 < b.len() {
            b[i + 1].start_s = e.start_s;
        }
    }
    // occasional recognition differences in B
    let mut b_final = Vec::with_capacity(b.len());
    for w in b {
        if rng.random_bool(0.03) && !after.contains(&w.idx) && !after.iter().any(|&i| i + 1 == w.idx) {
            continue;
        }
        let mut w = w;
        if rng.random_bool(0.03) {
            w.token = VOCAB[rng.random_range(0..VOCAB.len())].to_string();
        }
        w.idx = b_final.len();
        b_final.push(w);
    }

    for e in events.iter().filter(|e| e.kind == EventKind::Laughter) {
        if rng.random_bool(cfg.detector_recall) {
            out.detector.push(
                LaughterSegment::new(id.as_str(), e.start_s, e.end_s, LaughterSource::Detector)
                    .with_score(round_ms(rng.random_range(0.6..0.99))),
            );
        }
    }

    let audio = render(cfg, &words, &events, rng);
    out.audio.push((id.clone(), audio));
    out.words.extend(words);
    out.words_a.extend(a);
    out.words_b.extend(b_final);
    out.events.extend(events);
}

fn render(cfg: &SynthConfig, words: &[Word], events: &[SynthEvent], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sr = cfg.sample_rate as f64;
    let n = (cfg.duration_s * sr).round() as usize;
    let floor = Normal::new(0.0, 0.002).expect("valid sigma");
    let mut x: Vec<f64> = (0..n).map(|_| floor.sample(rng)).collect();
    let f0 = rng.random_range(100.0..180.0);
    for w in words {
        speech(&mut x, sr, w.start_s, w.end_s, f0 * rng.random_range(0.9..1.15), rng);
    }
    for e in events {
        match e.kind {
            EventKind::Laughter => laughter(&mut x, sr, e.start_s, e.end_s, rng),
            EventKind::Tone => tone(&mut x, sr, e.start_s, e.end_s, rng),
            EventKind::Silence => {}
        }
    }
    for v in &mut x {
        *v = v.clamp(-1.0, 1.0);
    }
    x
}

fn span(sr: f64, start: f64, end: f64, len: usize) -> std::ops::Range<usize> {
    ((start * sr) as usize).min(len)..((end * sr) as usize).min(len)
}

/// Voiced harmonic tone under a smooth envelope with a slight pitch glide.
fn speech(x: &mut [f64], sr: f64, start: f64, end: f64, f0: f64, rng: &mut ChaCha8Rng) {
    let r = span(sr, start, end, x.len());
    let n = r.len().max(1) as f64;
    let glide = rng.random_range(-0.1..0.1);
    let amp = rng.random_range(0.2..0.35);
    let mut phase = 0.0;
    for (k, i) in r.enumerate() {
        let u = k as f64 / n;
        let env = (std::f64::consts::PI * u).sin();
        phase += TAU * f0 * (1.0 + glide * u) / sr;
        let s: f64 = (1..=6).map(|h| (h as f64 * phase).sin() / h as f64).sum();
        x[i] += amp * env * s * 0.5;
    }
}

/// Rapid "ha" pulses mixing breath noise with a high voiced component.
fn laughter(x: &mut [f64], sr: f64, start: f64, end: f64, rng: &mut ChaCha8Rng) {
    let r = span(sr, start, end, x.len());
    let rate = rng.random_range(4.0..6.5);
    let f0 = rng.random_range(250.0..400.0);
    let amp = rng.random_range(0.25..0.45);
    let noise = Normal::new(0.0, 1.0).expect("valid sigma");
    let n = r.len().max(1) as f64;
    let mut phase = 0.0;
    for (k, i) in r.enumerate() {
        let t = k as f64 / sr;
        let pulse = (0.5 - 0.5 * (TAU * rate * t).cos()).powi(2);
        let decay = 1.0 - 0.5 * k as f64 / n;
        phase += TAU * f0 / sr;
        let voiced = phase.sin() + 0.5 * (2.0 * phase).sin();
        x[i] += amp * decay * pulse * (0.6 * noise.sample(rng) + 0.4 * voiced);
    }
}

/// A sustained two-note chord, like a music sting.
fn tone(x: &mut [f64], sr: f64, start: f64, end: f64, rng: &mut ChaCha8Rng) {
    let r = span(sr, start, end, x.len());
    let base = rng.random_range(200.0..600.0);
    let amp = rng.random_range(0.05..0.2);
    for (k, i) in r.enumerate() {
        let t = k as f64 / sr;
        x[i] += amp * ((TAU * base * t).sin() + 0.5 * (TAU * base * 1.5 * t).sin());
    }
}

//! Writes the 20-title toy corpus used by the CLI tests and the acceptance
//! suite into `crates/cli/fixtures/toy/` (or the directory given as the first
//! argument).
//!
//! Every byte is derived from a fixed hash, so regenerating reproduces the
//! committed files. Each genre leaves a mark on every modality: a colour
//! and texture in frames and posters, a tone in the audio, a vocabulary in
//! subtitles and synopses, and two dimensions of the fabricated deep
//! features.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use genrefuse_core::audio::PcmAudio;
use genrefuse_core::frames::RgbImage;
use genrefuse_core::seed::splitmix64;

const GENRES: [&str; 4] = ["Action", "Comedy", "Drama", "Horror"];

/// Label sets of t01..t20 as genre indices.
const TITLES: [&[usize]; 20] = [
    &[0],
    &[0, 2],
    &[1],
    &[1, 2],
    &[2],
    &[3],
    &[0, 3],
    &[2],
    &[1],
    &[0],
    &[2, 3],
    &[1, 2],
    &[0, 1],
    &[3],
    &[2],
    &[0, 2],
    &[1],
    &[2, 3],
    &[0],
    &[0, 1, 2],
];

const FRAMES_PER_TITLE: usize = 16;
const FRAME_SIDE: usize = 24;
const POSTER_SIDE: usize = 32;
const SAMPLE_RATE: u32 = 8000;
const AUDIO_SECONDS: usize = 2;

const VOCAB: [&[&str]; 4] = [
    &["explosion", "chase", "fight", "gun", "mission", "escape", "agent", "hero", "rescue", "battle"],
    &["laugh", "joke", "funny", "party", "wedding", "silly", "prank", "friends", "awkward", "dancing"],
    &["family", "love", "loss", "grief", "memory", "hospital", "letter", "truth", "father", "daughter"],
    &["ghost", "scream", "blood", "dark", "haunted", "curse", "night", "demon", "fear", "cellar"],
];
const FILLER: [&str; 12] = ["the", "a", "and", "we", "you", "they", "said", "go", "now", "then", "here", "there"];

/// Deterministic value in [0, 1) for a tuple of keys.
fn unit(keys: &[u64]) -> f64 {
    let h = keys.iter().fold(0x5eed_u64, |acc, &k| splitmix64(acc ^ k));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn pick<'a>(words: &[&'a str], keys: &[u64]) -> &'a str {
    words[(unit(keys) * words.len() as f64) as usize]
}

fn write(path: &Path, bytes: &[u8]) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, bytes).unwrap();
}

/// Pixel colour of genre `g` at (x, y) in frame `f` of title `t`.
fn genre_pixel(g: usize, t: u64, f: u64, x: usize, y: usize) -> [f64; 3] {
    let n = unit(&[t, f, x as u64, y as u64, 7]);
    match g {
        // red diagonal stripes that drift between frames
        0 => {
            let on = (x + y + f as usize) % 4 < 2;
            if on { [230.0, 40.0 + 30.0 * n, 30.0] } else { [90.0, 20.0, 20.0] }
        }
        // smooth warm yellow gradient
        1 => [220.0 + 30.0 * n, 190.0 + 2.0 * y as f64, 60.0 + 2.0 * x as f64],
        // blue vertical gradient
        2 => [30.0, 60.0 + 3.0 * y as f64, 120.0 + 4.0 * y as f64],
        // dark speckle
        _ => {
            let v = 15.0 + 70.0 * n * n;
            [v, v * 0.8, v * 0.9]
        }
    }
}

fn blend(labels: &[usize], t: u64, f: u64, x: usize, y: usize) -> [u8; 3] {
    let mut acc = [0.0; 3];
    for &g in labels {
        let p = genre_pixel(g, t, f, x, y);
        for c in 0..3 {
            acc[c] += p[c];
        }
    }
    let jitter = 12.0 * (unit(&[t, f, x as u64, y as u64, 11]) - 0.5);
    acc.map(|v| (v / labels.len() as f64 + jitter).clamp(0.0, 255.0).round() as u8)
}

fn audio(labels: &[usize], t: u64) -> PcmAudio {
    let n = SAMPLE_RATE as usize * AUDIO_SECONDS;
    let sr = f64::from(SAMPLE_RATE);
    let detune = 1.0 + 0.02 * (unit(&[t, 3]) - 0.5);
    let samples = (0..n)
        .map(|i| {
            let time = i as f64 / sr;
            let mut s = 0.0;
            for &g in labels {
                s += match g {
                    0 => {
                        let burst = if (i / 400) % 3 == 0 { 1.0 } else { 0.3 };
                        0.25 * burst * (2.0 * std::f64::consts::PI * 1200.0 * detune * time).sin()
                            + 0.08 * (unit(&[t, i as u64, 1]) - 0.5)
                    }
                    1 => 0.25 * (2.0 * std::f64::consts::PI * 600.0 * detune * time).sin(),
                    2 => 0.25 * (2.0 * std::f64::consts::PI * 220.0 * detune * time).sin(),
                    _ => {
                        0.2 * (2.0 * std::f64::consts::PI * 90.0 * detune * time).sin()
                            + 0.15 * (unit(&[t, i as u64, 4]) - 0.5)
                    }
                };
            }
            s / labels.len() as f64
        })
        .collect();
    PcmAudio::new(SAMPLE_RATE, samples).unwrap()
}

fn sentence(labels: &[usize], t: u64, s: u64, words: usize) -> String {
    let mut out = Vec::with_capacity(words);
    for w in 0..words as u64 {
        let keys = [t, s, w];
        if unit(&[t, s, w, 9]) < 0.35 {
            out.push(pick(&FILLER, &keys));
        } else {
            let g = labels[(unit(&[t, s, w, 5]) * labels.len() as f64) as usize];
            out.push(pick(VOCAB[g], &keys));
        }
    }
    let mut s = out.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s
}

fn subtitles(labels: &[usize], t: u64) -> String {
    let mut srt = String::new();
    for cue in 0..6u64 {
        let start = cue * 4;
        let line = sentence(labels, t, cue, 7);
        let line = if cue % 3 == 1 { format!("<i>{line}</i>") } else { line };
        let _ = write!(
            srt,
            "{}\n00:00:{start:02},000 --> 00:00:{:02},500\n{line}\n\n",
            cue + 1,
            start + 3
        );
    }
    srt
}

fn main() {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy"));
    let mut examples = Vec::new();
    let mut c3d = String::from("# descriptor: TRAILER-C3D\nid,f0,f1,f2,f3,f4,f5,f6,f7\n");
    let mut lstm = String::from("# descriptor: SYN-LSTM\nid,f0,f1,f2,f3,f4,f5,f6,f7\n");

    for (i, labels) in TITLES.iter().enumerate() {
        let id = format!("t{:02}", i + 1);
        let t = i as u64 + 1;
        for f in 0..FRAMES_PER_TITLE as u64 {
            let img = RgbImage::from_fn(FRAME_SIDE, FRAME_SIDE, |x, y| blend(labels, t, f, x, y));
            write(&dir.join(format!("frames/{id}/frame_{f:06}.ppm")), &img.to_ppm());
        }
        let poster = RgbImage::from_fn(POSTER_SIDE, POSTER_SIDE, |x, y| blend(labels, t, 1000, x, y));
        write(&dir.join(format!("posters/{id}.ppm")), &poster.to_ppm());
        write(&dir.join(format!("audio/{id}.wav")), &audio(labels, t).to_wav_bytes().unwrap());
        write(&dir.join(format!("subtitles/{id}.srt")), subtitles(labels, t).as_bytes());
        let synopsis = format!("{}. {}.\n", sentence(labels, t, 100, 12), sentence(labels, t, 101, 10));
        write(&dir.join(format!("synopses/{id}.txt")), synopsis.as_bytes());

        for (out, strength, tag) in [(&mut c3d, 0.5, 21u64), (&mut lstm, 0.4, 22)] {
            out.push_str(&id);
            for d in 0..8u64 {
                let on = labels.contains(&(d as usize / 2));
                let v = if on { strength } else { 0.0 } + 0.7 * (unit(&[t, d, tag]) - 0.5);
                let v = (v * 1e4).round() / 1e4;
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }

        let names: Vec<String> = labels.iter().map(|&g| format!("\"{}\"", GENRES[g])).collect();
        examples.push(format!(
            concat!(
                "    {{\n      \"id\": \"{id}\",\n      \"labels\": [{labels}],\n",
                "      \"frames_dir\": \"frames/{id}\",\n      \"audio_wav\": \"audio/{id}.wav\",\n",
                "      \"poster\": \"posters/{id}.ppm\",\n      \"subtitle_srt\": \"subtitles/{id}.srt\",\n",
                "      \"synopsis_txt\": \"synopses/{id}.txt\"\n    }}"
            ),
            id = id,
            labels = names.join(", ")
        ));
    }
    write(&dir.join("features/trailer_c3d.csv"), c3d.as_bytes());
    write(&dir.join("features/syn_lstm.csv"), lstm.as_bytes());
    let label_space: Vec<String> = GENRES.iter().map(|g| format!("\"{g}\"")).collect();
    let manifest = format!(
        "{{\n  \"label_space\": [{}],\n  \"examples\": [\n{}\n  ]\n}}\n",
        label_space.join(", "),
        examples.join(",\n")
    );
    write(&dir.join("manifest.json"), manifest.as_bytes());
    println!("wrote toy fixture to {}", dir.display());
}

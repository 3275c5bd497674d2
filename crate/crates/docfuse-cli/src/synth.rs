//! Synthetic multimodal dataset generator for desk-scale experiments.
//!
//! Every sample pairs an image carrying a visual pattern with a text file
//! carrying a keyword among random filler words. In `Aligned` mode class i
//! uses keyword i and pattern i, so either modality alone identifies the
//! class. In `Joint` mode the label is the (keyword, pattern) combination:
//! with two keywords and two patterns a single modality narrows the label
//! only to two candidates, capping any single-branch classifier at 50%
//! accuracy while the pair decides the class exactly.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use docfuse_core::image::GrayImage;
use docfuse_core::rng::Rng;

use crate::manifest::{load_manifest, Manifest, ManifestRecord, Split};
use crate::pgm::write_pgm;
use crate::words::FILLER_WORDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Stripes,
    Blobs,
    Checker,
}

impl PatternKind {
    pub fn parse(s: &str) -> Option<PatternKind> {
        match s {
            "stripes" => Some(PatternKind::Stripes),
            "blobs" => Some(PatternKind::Blobs),
            "checker" => Some(PatternKind::Checker),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PatternKind::Stripes => "stripes",
            PatternKind::Blobs => "blobs",
            PatternKind::Checker => "checker",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Label = (keyword, pattern) pair; single modalities are ambiguous.
    Joint,
    /// Label i = keyword i = pattern i; both modalities fully informative.
    Aligned,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub num_samples: usize,
    pub keywords: Vec<String>,
    pub patterns: Vec<PatternKind>,
    pub mode: SynthMode,
    pub image_size: usize,
    pub doc_len: (usize, usize),
    pub keyword_repeats: usize,
    pub misspell_prob: f64,
    pub pixel_noise: f64,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_samples: 200,
            keywords: vec!["zephyr".into(), "quartz".into()],
            patterns: vec![PatternKind::Stripes, PatternKind::Blobs],
            mode: SynthMode::Joint,
            image_size: 32,
            doc_len: (30, 60),
            keyword_repeats: 3,
            misspell_prob: 0.05,
            pixel_noise: 0.04,
            train_fraction: 0.8,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn num_classes(&self) -> usize {
        match self.mode {
            SynthMode::Joint => self.keywords.len() * self.patterns.len(),
            SynthMode::Aligned => self.keywords.len(),
        }
    }

    /// `(keyword index, pattern index)` of a class.
    pub fn class_factors(&self, class: usize) -> (usize, usize) {
        match self.mode {
            SynthMode::Joint => (class / self.patterns.len(), class % self.patterns.len()),
            SynthMode::Aligned => (class, class),
        }
    }

    pub fn class_label(&self, class: usize) -> String {
        let (ki, pi) = self.class_factors(class);
        match self.mode {
            SynthMode::Joint => format!("{}_{}", self.keywords[ki], self.patterns[pi]),
            SynthMode::Aligned => self.keywords[ki].clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            bail!("synth: num_samples must be >= 1");
        }
        if self.keywords.is_empty() || self.patterns.is_empty() {
            bail!("synth: need at least one keyword and one pattern");
        }
        if self.mode == SynthMode::Aligned && self.keywords.len() != self.patterns.len() {
            bail!(
                "synth: aligned mode needs as many patterns as keywords ({} vs {})",
                self.keywords.len(),
                self.patterns.len()
            );
        }
        if self.image_size < 8 {
            bail!("synth: image_size must be >= 8");
        }
        if self.doc_len.0 == 0 || self.doc_len.0 > self.doc_len.1 {
            bail!("synth: doc_len range is invalid");
        }
        if !(0.0..=1.0).contains(&self.misspell_prob) || !(0.0..1.0).contains(&self.train_fraction)
        {
            bail!("synth: probabilities out of range");
        }
        Ok(())
    }

    /// Best accuracy a classifier seeing only one modality can reach,
    /// assuming balanced classes: 1 / (number of classes consistent with
    /// that modality's value).
    pub fn single_modality_ceiling(&self) -> f64 {
        match self.mode {
            SynthMode::Joint => {
                // a keyword leaves |patterns| candidates; a pattern leaves
                // |keywords| candidates; the better single modality wins.
                1.0 / self.patterns.len().min(self.keywords.len()) as f64
            }
            SynthMode::Aligned => 1.0,
        }
    }
}

fn render_pattern(kind: PatternKind, size: usize, noise_std: f64, rng: &mut Rng) -> Vec<u8> {
    const BG: f64 = 230.0;
    const FG: f64 = 25.0;
    let mut px = vec![BG; size * size];
    match kind {
        PatternKind::Stripes => {
            let band = (size / 8).max(2);
            for y in 0..size {
                if (y / band) % 2 == 0 {
                    for x in 0..size {
                        px[y * size + x] = FG;
                    }
                }
            }
        }
        PatternKind::Checker => {
            let cell = (size / 6).max(2);
            for y in 0..size {
                for x in 0..size {
                    if ((x / cell) + (y / cell)) % 2 == 0 {
                        px[y * size + x] = FG;
                    }
                }
            }
        }
        PatternKind::Blobs => {
            let count = 5;
            for _ in 0..count {
                let cx = rng.index(size) as isize;
                let cy = rng.index(size) as isize;
                let r = (size / 10 + rng.index(size / 10 + 1)) as isize;
                for y in (cy - r).max(0)..(cy + r + 1).min(size as isize) {
                    for x in (cx - r).max(0)..(cx + r + 1).min(size as isize) {
                        let dx = x - cx;
                        let dy = y - cy;
                        if dx * dx + dy * dy <= r * r {
                            px[y as usize * size + x as usize] = FG;
                        }
                    }
                }
            }
        }
    }
    px.iter()
        .map(|&v| {
            let noisy = v + rng.normal() * 255.0 * noise_std;
            noisy.clamp(0.0, 255.0) as u8
        })
        .collect()
}

fn misspell(word: &str, rng: &mut Rng) -> String {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() < 4 {
        return word.to_string();
    }
    let mut out = chars.clone();
    match rng.index(3) {
        0 => {
            // swap two adjacent characters
            let i = rng.index(out.len() - 1);
            out.swap(i, i + 1);
        }
        1 => {
            // drop one character
            let i = rng.index(out.len());
            out.remove(i);
        }
        _ => {
            // double one character
            let i = rng.index(out.len());
            out.insert(i, out[i]);
        }
    }
    out.into_iter().collect()
}

fn make_text(cfg: &SynthConfig, keyword: &str, rng: &mut Rng) -> String {
    let len = cfg.doc_len.0 + rng.index(cfg.doc_len.1 - cfg.doc_len.0 + 1);
    let mut tokens: Vec<String> = (0..len)
        .map(|_| FILLER_WORDS[rng.index(FILLER_WORDS.len())].to_string())
        .collect();
    for _ in 0..cfg.keyword_repeats {
        let pos = rng.index(tokens.len());
        tokens[pos] = keyword.to_string();
    }
    for token in &mut tokens {
        if rng.uniform() < cfg.misspell_prob {
            *token = misspell(token, rng);
        }
    }
    // wrap lines every 12 tokens like OCR dumps do
    let mut text = String::new();
    for (i, token) in tokens.iter().enumerate() {
        text.push_str(token);
        if (i + 1) % 12 == 0 {
            text.push('\n');
        } else {
            text.push(' ');
        }
    }
    text
}

/// Materializes images, texts and a manifest under `out_dir`; regeneration
/// with the same config is byte-identical. Returns the loaded manifest.
pub fn generate_synthetic(cfg: &SynthConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir.join("images"))
        .with_context(|| format!("creating {}", out_dir.display()))?;
    std::fs::create_dir_all(out_dir.join("texts"))?;
    let k = cfg.num_classes();
    let mut master = Rng::from_seed(cfg.seed);
    let mut per_class_seen = vec![0usize; k];
    let per_class_total: Vec<usize> = (0..k)
        .map(|c| cfg.num_samples / k + usize::from(c < cfg.num_samples % k))
        .collect();
    let mut records = Vec::with_capacity(cfg.num_samples);
    for i in 0..cfg.num_samples {
        let class = i % k;
        let (ki, pi) = cfg.class_factors(class);
        let mut rng = master.fork();
        let id = format!("s{i:05}");
        let image_rel = format!("images/{id}.pgm");
        let text_rel = format!("texts/{id}.txt");

        let pixels = render_pattern(cfg.patterns[pi], cfg.image_size, cfg.pixel_noise, &mut rng);
        let img = GrayImage::new(cfg.image_size, cfg.image_size, pixels)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        write_pgm(&out_dir.join(&image_rel), &img)?;

        let text = make_text(cfg, &cfg.keywords[ki], &mut rng);
        std::fs::write(out_dir.join(&text_rel), text)?;

        // Stratified deterministic split: the first train_fraction of each
        // class goes to train, the rest to test.
        let train_quota = (per_class_total[class] as f64 * cfg.train_fraction).round() as usize;
        let split = if per_class_seen[class] < train_quota {
            Split::Train
        } else {
            Split::Test
        };
        per_class_seen[class] += 1;

        records.push(ManifestRecord {
            id,
            image: image_rel,
            text: text_rel,
            label: cfg.class_label(class),
            split,
        });
    }
    let manifest_path = out_dir.join("manifest.csv");
    crate::manifest::write_manifest(&manifest_path, &records)?;
    load_manifest(&manifest_path)
}

//! Dataset manifests: CSV files binding document ids to an image file, a
//! text file, a label and a split.
//!
//! Format: header `id,image,text,label,split`; paths are relative to the
//! manifest's directory; split is one of train/val/test/unsplit.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use docfuse_core::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
    Test,
    Unsplit,
}

impl Split {
    pub fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            "test" => Some(Split::Test),
            "unsplit" => Some(Split::Unsplit),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Unsplit => "unsplit",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct ManifestRecord {
    pub id: String,
    pub image: String,
    pub text: String,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    /// Directory the relative paths resolve against.
    pub dir: PathBuf,
    pub records: Vec<ManifestRecord>,
    /// Sorted unique labels; index = class id.
    pub label_names: Vec<String>,
}

impl Manifest {
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_names.iter().position(|l| l == label)
    }

    pub fn image_path(&self, record: &ManifestRecord) -> PathBuf {
        self.dir.join(&record.image)
    }

    pub fn text_path(&self, record: &ManifestRecord) -> PathBuf {
        self.dir.join(&record.text)
    }

    /// Indices of records in the given split.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.split == split)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.records.len()).collect()
    }

    pub fn labels_of(&self, indices: &[usize]) -> Vec<usize> {
        indices
            .iter()
            .map(|&i| self.label_index(&self.records[i].label).expect("validated"))
            .collect()
    }
}

/// Loads and validates a manifest. Errors carry CSV line numbers (line 1
/// is the header).
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let dir = path
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("opening manifest {}", path.display()))?;
    {
        let headers = reader.headers()?;
        let want = ["id", "image", "text", "label", "split"];
        let got: Vec<&str> = headers.iter().collect();
        if got != want {
            bail!(
                "manifest {}: expected columns {:?}, got {:?}",
                path.display(),
                want,
                got
            );
        }
    }
    let mut records = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.with_context(|| format!("manifest line {line}"))?;
        if row.len() != 5 {
            bail!("manifest line {line}: expected 5 columns, got {}", row.len());
        }
        let id = row[0].to_string();
        if id.is_empty() {
            bail!("manifest line {line}: empty id");
        }
        if let Some(first) = seen.insert(id.clone(), line) {
            bail!("manifest line {line}: duplicate id '{id}' (first seen on line {first})");
        }
        let label = row[3].to_string();
        if label.is_empty() {
            bail!("manifest line {line}: empty label");
        }
        let split = Split::parse(&row[4]).with_context(|| {
            format!(
                "manifest line {line}: unknown split '{}' (want train/val/test/unsplit)",
                &row[4]
            )
        })?;
        let record = ManifestRecord {
            id,
            image: row[1].to_string(),
            text: row[2].to_string(),
            label,
            split,
        };
        for (what, rel) in [("image", &record.image), ("text", &record.text)] {
            let p = dir.join(rel);
            if !p.is_file() {
                bail!(
                    "manifest line {line}: {what} file {} does not exist",
                    p.display()
                );
            }
        }
        records.push(record);
    }
    if records.is_empty() {
        bail!("manifest {}: no records", path.display());
    }
    let mut label_names: Vec<String> = records.iter().map(|r| r.label.clone()).collect();
    label_names.sort();
    label_names.dedup();
    Ok(Manifest {
        dir,
        records,
        label_names,
    })
}

/// Writes records in stored order with the canonical header; loading the
/// result reproduces the same bytes.
pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("writing manifest {}", path.display()))?;
    writer.write_record(["id", "image", "text", "label", "split"])?;
    for r in records {
        writer.write_record([
            r.id.as_str(),
            r.image.as_str(),
            r.text.as_str(),
            r.label.as_str(),
            r.split.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Stratified draws of `train_size` documents per run; the remainder of
/// each run is its test set. Per-class quotas follow largest remainders,
/// so each class's share is within one document of proportional.
pub fn kfold_splits(
    manifest: &Manifest,
    train_size: usize,
    runs: usize,
    rng: &mut Rng,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = manifest.records.len();
    if train_size >= n {
        bail!("kfold: train_size {train_size} must be smaller than the corpus ({n})");
    }
    if runs == 0 {
        bail!("kfold: runs must be >= 1");
    }
    let k = manifest.label_names.len();
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, r) in manifest.records.iter().enumerate() {
        per_class[manifest.label_index(&r.label).unwrap()].push(i);
    }
    if let Some(empty) = per_class.iter().position(|c| c.is_empty()) {
        bail!("kfold: class '{}' has no samples", manifest.label_names[empty]);
    }

    // Largest-remainder quotas, capped by class size.
    let mut quota: Vec<usize> = Vec::with_capacity(k);
    let mut fractions: Vec<(usize, f64)> = Vec::with_capacity(k);
    for class in per_class.iter() {
        let exact = class.len() as f64 * train_size as f64 / n as f64;
        let base = exact.floor() as usize;
        quota.push(base.min(class.len()));
        fractions.push((quota.len() - 1, exact - base as f64));
    }
    fractions.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut remaining = train_size - quota.iter().sum::<usize>();
    let mut fi = 0;
    while remaining > 0 {
        let (c, _) = fractions[fi % k];
        if quota[c] < per_class[c].len() {
            quota[c] += 1;
            remaining -= 1;
        }
        fi += 1;
        if fi > 4 * k * (train_size + 1) {
            bail!("kfold: could not satisfy quotas");
        }
    }

    let mut splits = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut train = Vec::with_capacity(train_size);
        let mut test = Vec::with_capacity(n - train_size);
        for (c, class) in per_class.iter().enumerate() {
            let mut pool = class.clone();
            rng.shuffle(&mut pool);
            train.extend_from_slice(&pool[..quota[c]]);
            test.extend_from_slice(&pool[quota[c]..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        splits.push((train, test));
    }
    Ok(splits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_files(dir: &Path, rows: &[(&str, &str)]) -> PathBuf {
        fs::create_dir_all(dir.join("img")).unwrap();
        fs::create_dir_all(dir.join("txt")).unwrap();
        let mut csv = String::from("id,image,text,label,split\n");
        for (id, label) in rows {
            let img = format!("img/{id}.pgm");
            let txt = format!("txt/{id}.txt");
            fs::write(dir.join(&img), b"P5\n1 1\n255\n\0").unwrap();
            fs::write(dir.join(&txt), b"hello world").unwrap();
            csv.push_str(&format!("{id},{img},{txt},{label},train\n"));
        }
        let path = dir.join("manifest.csv");
        fs::write(&path, csv).unwrap();
        path
    }

    #[test]
    fn loads_valid_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_files(tmp.path(), &[("a1", "memo"), ("a2", "email")]);
        let m = load_manifest(&path).unwrap();
        assert_eq!(m.records.len(), 2);
        assert_eq!(m.label_names, vec!["email".to_string(), "memo".to_string()]);
    }

    #[test]
    fn duplicate_id_names_both_lines() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_files(tmp.path(), &[("a1", "memo")]);
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("a1,img/a1.pgm,txt/a1.txt,memo,train\n");
        fs::write(&path, text).unwrap();
        let err = load_manifest(&path).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("duplicate id 'a1'"), "{msg}");
        assert!(msg.contains("line 3") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn dangling_path_is_reported_with_line() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_files(tmp.path(), &[("a1", "memo")]);
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("a2,img/missing.pgm,txt/a1.txt,memo,train\n");
        fs::write(&path, text).unwrap();
        let err = load_manifest(&path).unwrap_err();
        assert!(format!("{err:#}").contains("line 3"));
    }

    #[test]
    fn unknown_split_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_files(tmp.path(), &[("a1", "memo")]);
        let mut text = fs::read_to_string(&path).unwrap();
        text = text.replace(",train", ",holdout");
        fs::write(&path, text).unwrap();
        let err = load_manifest(&path).unwrap_err();
        assert!(format!("{err:#}").contains("holdout"));
    }

    #[test]
    fn write_load_roundtrip_is_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let path = write_files(tmp.path(), &[("a1", "memo"), ("a2", "email")]);
        let m = load_manifest(&path).unwrap();
        let out = tmp.path().join("copy.csv");
        write_manifest(&out, &m.records).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&out).unwrap());
    }

    fn kfold_fixture(n_per_class: &[usize]) -> Manifest {
        let mut records = Vec::new();
        for (c, &n) in n_per_class.iter().enumerate() {
            for i in 0..n {
                records.push(ManifestRecord {
                    id: format!("c{c}s{i}"),
                    image: String::new(),
                    text: String::new(),
                    label: format!("class{c}"),
                    split: Split::Unsplit,
                });
            }
        }
        let mut label_names: Vec<String> =
            (0..n_per_class.len()).map(|c| format!("class{c}")).collect();
        label_names.sort();
        Manifest {
            dir: PathBuf::from("."),
            records,
            label_names,
        }
    }

    #[test]
    fn kfold_produces_exact_sizes_and_disjoint_sets() {
        // Tobacco-like: 3482 docs, 800 train, 3 runs.
        let manifest = kfold_fixture(&[400, 350, 620, 300, 250, 500, 200, 362, 300, 200]);
        assert_eq!(manifest.records.len(), 3482);
        let mut rng = Rng::from_seed(1);
        let splits = kfold_splits(&manifest, 800, 3, &mut rng).unwrap();
        assert_eq!(splits.len(), 3);
        for (train, test) in &splits {
            assert_eq!(train.len(), 800);
            assert_eq!(test.len(), 2682);
            let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), 3482, "train/test overlap");
        }
    }

    #[test]
    fn kfold_is_stratified_within_two_samples() {
        let manifest = kfold_fixture(&[400, 350, 620, 300, 250, 500, 200, 362, 300, 200]);
        let n = manifest.records.len() as f64;
        let mut rng = Rng::from_seed(2);
        let splits = kfold_splits(&manifest, 800, 1, &mut rng).unwrap();
        let (train, _) = &splits[0];
        for (c, label) in manifest.label_names.iter().enumerate() {
            let class_total = manifest
                .records
                .iter()
                .filter(|r| &r.label == label)
                .count() as f64;
            let got = train
                .iter()
                .filter(|&&i| manifest.records[i].label == *label)
                .count() as f64;
            let want = class_total * 800.0 / n;
            assert!(
                (got - want).abs() <= 2.0,
                "class {c}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn kfold_runs_differ_but_are_seed_deterministic() {
        let manifest = kfold_fixture(&[50, 50, 50]);
        let s1 = kfold_splits(&manifest, 60, 2, &mut Rng::from_seed(5)).unwrap();
        let s2 = kfold_splits(&manifest, 60, 2, &mut Rng::from_seed(5)).unwrap();
        assert_eq!(s1, s2);
        assert_ne!(s1[0].0, s1[1].0, "independent draws should differ");
    }

    #[test]
    fn kfold_rejects_oversized_train() {
        let manifest = kfold_fixture(&[5, 5]);
        assert!(kfold_splits(&manifest, 10, 1, &mut Rng::from_seed(1)).is_err());
    }
}

//! Training history export: one JSON record per epoch.

use std::path::Path;

use anyhow::{Context, Result};
use docfuse_core::models::EpochStats;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub val_acc: Option<f64>,
}

impl From<&EpochStats> for EpochRecord {
    fn from(s: &EpochStats) -> Self {
        EpochRecord {
            epoch: s.epoch,
            loss: s.loss,
            train_acc: s.train_acc,
            val_acc: s.val_acc,
        }
    }
}

/// Writes history as JSON lines.
pub fn write_history(path: &Path, history: &[EpochStats]) -> Result<()> {
    let mut out = String::new();
    for stats in history {
        out.push_str(&serde_json::to_string(&EpochRecord::from(stats))?);
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_history(path: &Path) -> Result<Vec<EpochRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(|line| serde_json::from_str(line).map_err(|e| anyhow::anyhow!("{e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let history = vec![
            EpochStats {
                epoch: 1,
                loss: 1.25,
                train_acc: 0.5,
                val_acc: None,
            },
            EpochStats {
                epoch: 2,
                loss: 0.75,
                train_acc: 0.9,
                val_acc: Some(0.8),
            },
        ];
        let path = tmp.path().join("history.jsonl");
        write_history(&path, &history).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().next().unwrap().contains("\"val_acc\":null"));
        let back = read_history(&path).unwrap();
        assert_eq!(back[1].val_acc, Some(0.8));
    }
}

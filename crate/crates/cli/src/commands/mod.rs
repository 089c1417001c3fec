pub mod evaluate;
pub mod pipeline;
pub mod predict;
pub mod split;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use formbench::data::TaskKind;
use formbench::{Error, Result};

/// Parses a task name for clap.
pub fn parse_task(s: &str) -> std::result::Result<TaskKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "ofdf" => Ok(TaskKind::Ofdf),
        "srmt" => Ok(TaskKind::Srmt),
        other => Err(format!("unknown task {other:?} (expected ofdf or srmt)")),
    }
}

pub fn task_name(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Ofdf => "ofdf",
        TaskKind::Srmt => "srmt",
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}

/// Loads a split file that may hold one assignment or (for repeated random
/// splits) an array of them.
pub fn load_split(
    path: &PathBuf,
    index: usize,
    ds: &formbench::data::Dataset,
) -> Result<formbench::split::SplitAssignment> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let file: formbench::split::SplitFile = if value.is_array() {
        let arr = value.as_array().expect("checked is_array");
        let entry = arr.get(index).ok_or_else(|| {
            Error::Argument(format!(
                "split index {index} out of range for {} assignments",
                arr.len()
            ))
        })?;
        serde_json::from_value(entry.clone())?
    } else {
        serde_json::from_value(value)?
    };
    file.resolve(ds)
}

use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;

/// Bad input: unreadable files, malformed JSON, invalid parameters.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn read_source(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input_error(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Parses `path` (or stdin for `-`) as `T`. Errors carry the file name and
/// the line and column; points written with a non-canonical stem produce a warning.
pub fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = read_source(path)?;
    let shown = path.display();
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| input_error(format!("{shown}: {e}")))?;
    for (pointer, p) in cantor_ramsey::json::noncanonical_points(&value) {
        let at = if pointer.is_empty() { "/" } else { pointer.as_str() };
        eprintln!("warning: {shown}#{at}: stem ends with the tail digit; read as {p}");
    }
    serde_json::from_str(&text).map_err(|e| input_error(format!("{shown}: {e}")))
}

/// The depth cap, from `RAMSEY_DEPTH_CAP` when set.
pub fn depth_cap() -> anyhow::Result<u32> {
    match std::env::var("RAMSEY_DEPTH_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| input_error(format!("RAMSEY_DEPTH_CAP must be a positive integer, got {v:?}"))),
        Err(_) => Ok(cantor_ramsey::surjections::DEFAULT_DEPTH_CAP),
    }
}

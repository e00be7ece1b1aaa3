//! Deterministic output handling.
//!
//! Every command produces one or more named documents (CSV tables or JSON
//! summaries). With `--out DIR` each document becomes a file in `DIR`;
//! otherwise the documents stream to stdout, each introduced by a `# <name>`
//! marker line so the stream stays splittable.
//!
//! Floats in CSV tables use `{:.16e}` (17 significant digits), which
//! round-trips every `f64` exactly. JSON documents rely on the serializer's
//! shortest exact representation.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::failure::Failure;

/// Where documents go: files under a directory, or stdout sections.
pub struct OutputSink {
    dir: Option<PathBuf>,
}

impl OutputSink {
    /// Creates the sink, making the output directory if necessary.
    pub fn new(dir: Option<PathBuf>) -> Result<Self, Failure> {
        if let Some(dir) = &dir {
            fs::create_dir_all(dir).map_err(|e| {
                Failure::input(format!(
                    "cannot create output directory {}: {e}",
                    dir.display()
                ))
            })?;
        }
        Ok(Self { dir })
    }

    /// Emits one named document.
    pub fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, contents)
                    .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                print!("# {name}\n{contents}");
                Ok(())
            }
        }
    }

    /// Emits a value as a pretty-printed JSON document.
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let rendered = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::input(format!("cannot serialize {name}: {e}")))?;
        self.write(name, &format!("{rendered}\n"))
    }
}

/// Formats a float with 17 significant digits; parsing the result recovers
/// the exact bit pattern.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Renders a CSV document from a header and rows of already-formatted cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips_exactly() {
        for value in [
            0.0,
            1.0,
            -1.5372918978912318,
            3.7e-20,
            f64::MIN_POSITIVE,
            std::f64::consts::PI * 1e5,
        ] {
            let parsed: f64 = fmt_float(value).parse().unwrap();
            assert_eq!(parsed.to_bits(), value.to_bits(), "{value}");
        }
    }

    #[test]
    fn csv_renders_header_and_rows() {
        let text = csv(&["a", "b"], vec![vec!["1".to_string(), "2".to_string()]]);
        assert_eq!(text, "a,b\n1,2\n");
    }
}

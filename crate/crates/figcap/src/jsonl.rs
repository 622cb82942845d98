//! JSON Lines reading and writing. One JSON value per line; whitespace-only
//! lines are skipped; parse failures report the file and 1-based line number.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Reads every row of a JSON Lines file, tagged with its 1-based line number.
pub fn read_rows_numbered<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| Error::io_at(path, e))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io_at(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.display().to_string(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        rows.push((idx + 1, row));
    }
    Ok(rows)
}

/// Reads every row of a JSON Lines file into memory.
pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    Ok(read_rows_numbered(path)?.into_iter().map(|(_, row)| row).collect())
}

/// Fails on the first id that repeats within one file.
pub fn check_unique_ids<'a>(
    path: &Path,
    ids: impl IntoIterator<Item = (usize, &'a str)>,
) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for (line, id) in ids {
        if !seen.insert(id) {
            return Err(Error::Format {
                path: path.display().to_string(),
                line,
                message: format!("duplicate id `{id}`"),
            });
        }
    }
    Ok(())
}

/// Writes rows as JSON Lines, one per row, in order.
pub fn write_rows<T: Serialize, W: Write>(mut writer: W, rows: &[T]) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut writer, row)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Opens an output sink; `-` means stdout.
pub fn open_output(spec: &str) -> Result<Box<dyn Write>> {
    if spec == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let path = Path::new(spec);
        let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

/// Convenience wrapper: write rows to a path or stdout.
pub fn write_rows_to<T: Serialize>(spec: &str, rows: &[T]) -> Result<()> {
    write_rows(open_output(spec)?, rows)
}

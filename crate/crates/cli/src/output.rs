//! CSV/JSON writers with provenance headers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub struct CsvWriter {
    w: BufWriter<File>,
    pub path: PathBuf,
}

impl CsvWriter {
    /// Open `name` in `dir`, writing `# key=value` header lines first, then
    /// the column header row.
    pub fn create(
        dir: &Path,
        name: &str,
        meta: &[(&str, String)],
        columns: &str,
    ) -> anyhow::Result<CsvWriter> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let file = File::create(&path)
            .map_err(|e| anyhow::anyhow!("cannot create {path:?}: {e}"))?;
        let mut w = BufWriter::new(file);
        for (k, v) in meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{columns}")?;
        Ok(CsvWriter { w, path })
    }

    pub fn row(&mut self, fields: std::fmt::Arguments<'_>) -> anyhow::Result<()> {
        writeln!(self.w, "{fields}")?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<PathBuf> {
        self.w.flush()?;
        Ok(self.path)
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| anyhow::anyhow!("cannot create {path:?}: {e}"))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(path)
}

use std::fs;
use std::io::{self, Write};
use std::path::Path;

pub const TOOL_VERSION: &str = concat!("qkdkr ", env!("CARGO_PKG_VERSION"));

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Written as `#` comments at the top of every CSV file.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub grid: String,
    pub output_path: String,
    pub seed: Option<u64>,
}

impl RunManifest {
    fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# tool_version: {TOOL_VERSION}")?;
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# config: {}", self.config)?;
        writeln!(w, "# grid: {}", self.grid)?;
        match self.seed {
            Some(s) => writeln!(w, "# seed: {s}")?,
            None => writeln!(w, "# seed: none")?,
        }
        writeln!(w, "# output_path: {}", self.output_path)
    }
}

pub fn write_csv(path: &Path, manifest: &RunManifest, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut buf = Vec::new();
    manifest.write_to(&mut buf)?;
    writeln!(buf, "{}", header.join(","))?;
    for row in rows {
        writeln!(buf, "{}", row.join(","))?;
    }
    fs::write(path, buf)
}

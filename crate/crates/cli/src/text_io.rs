use std::io::Read;
use std::path::Path;

use anyhow::Context;

/// Reads a whole input; `-` means standard input.
pub fn read_input(path: &Path) -> anyhow::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).context("reading standard input")?;
        Ok(buf)
    } else {
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Non-blank lines with trailing `\r` removed.
pub fn lines(bytes: &[u8], path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::str::from_utf8(bytes).with_context(|| format!("{}: not valid UTF-8", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect())
}

pub fn read_lines(path: &Path) -> anyhow::Result<Vec<String>> {
    lines(&read_input(path)?, path)
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

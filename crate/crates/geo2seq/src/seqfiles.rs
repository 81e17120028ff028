//! File ingestion helpers shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use geo2seq_core::molgraph::{BondTable, Molecule3D, ValencyTable, XyzBlocks};

/// A parse failure tied to its source location.
#[derive(Debug)]
pub struct ItemError {
    /// 1-based ordinal of the molecule block or sequence line.
    pub index: usize,
    pub message: String,
}

/// Molecules from one or more XYZ files. Block-level parse errors are
/// collected (with file and line) instead of aborting; `items[i]` is `None`
/// for failed blocks so indices stay aligned with the input.
pub fn read_xyz_files(paths: &[PathBuf]) -> Result<(Vec<Option<Molecule3D>>, Vec<ItemError>)> {
    let mut items = Vec::new();
    let mut errors = Vec::new();
    for path in paths {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for block in XyzBlocks::new(&text) {
            match block {
                Ok(mol) => items.push(Some(mol)),
                Err(err) => {
                    errors.push(ItemError {
                        index: items.len() + 1,
                        message: format!("{}: {err}", path.display()),
                    });
                    items.push(None);
                }
            }
        }
    }
    Ok((items, errors))
}

/// Molecules from XYZ files, failing on the first malformed block.
pub fn read_xyz_strict(path: &Path) -> Result<Vec<Molecule3D>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut mols = Vec::new();
    for block in XyzBlocks::new(&text) {
        mols.push(block.with_context(|| format!("parsing {}", path.display()))?);
    }
    anyhow::ensure!(!mols.is_empty(), "{}: no molecules", path.display());
    Ok(mols)
}

/// Non-blank lines of a sequence file with their 1-based line numbers.
pub fn read_sequence_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect())
}

/// Writes to the path, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("writing stdout")
        }
    }
}

/// The built-in bond table, or a replacement loaded from `path`.
pub fn load_bond_table(path: Option<&Path>) -> Result<BondTable> {
    match path {
        None => Ok(BondTable::default_table()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            BondTable::parse(&text).with_context(|| format!("parsing bond table {}", p.display()))
        }
    }
}

/// The built-in valency table, or a replacement loaded from `path`.
pub fn load_valency_table(path: Option<&Path>) -> Result<ValencyTable> {
    match path {
        None => Ok(ValencyTable::default_table()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ValencyTable::parse(&text)
                .with_context(|| format!("parsing valency table {}", p.display()))
        }
    }
}

/// Reports collected item errors to stderr in index order.
pub fn log_errors(kind: &str, errors: &[ItemError]) {
    for err in errors {
        eprintln!("error: {kind} {}: {}", err.index, err.message);
    }
}

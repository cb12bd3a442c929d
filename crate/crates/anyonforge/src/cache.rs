//! On-disk copies of the F and R tables, keyed by level.
//!
//! Files are versioned JSON; anything unreadable is rebuilt and overwritten,
//! so the directory is always safe to delete.

use std::fs;
use std::path::{Path, PathBuf};

use anyonforge_core::symbols::{FBlock, SymbolCache};
use anyonforge_core::AnyonModel;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::{self, Json};

pub const CACHE_DIR_ENV: &str = "ANYONFORGE_CACHE_DIR";
pub const FORMAT: &str = "anyonforge-symbols";
pub const VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Loaded(PathBuf),
    Stored(PathBuf),
    /// The file existed but was rejected; it has been rewritten.
    Replaced {
        path: PathBuf,
        reason: String,
    },
    /// Tables were built but could not be written.
    Unwritable {
        path: PathBuf,
        reason: String,
    },
}

pub fn cache_file(dir: &Path, level: u32) -> PathBuf {
    dir.join(format!("su2_k{level}.v{VERSION}.json"))
}

pub fn symbols_to_json(cache: &SymbolCache) -> Json {
    let f = Json::array(cache.f_blocks(), |(labels, blk)| {
        Json::object([
            ("labels", Json::charges(&labels)),
            ("rows", Json::charges(&blk.rows)),
            ("cols", Json::charges(&blk.cols)),
            ("matrix", Json::matrix(&blk.matrix)),
        ])
    });
    let r = Json::array(cache.r_values(), |(labels, z)| {
        Json::object([("labels", Json::charges(&labels)), ("value", Json::complex(z))])
    });
    Json::object([
        ("format", Json::str(FORMAT)),
        ("version", Json::uint(VERSION)),
        ("k", Json::uint(cache.level())),
        ("f", f),
        ("r", r),
    ])
}

fn labels<const N: usize>(v: &Value) -> Result<[anyonforge_core::Charge; N]> {
    json::as_charges(json::field(v, "labels")?, "labels")?
        .try_into()
        .map_err(|_| Error::Format(format!("symbol labels must have {N} entries")))
}

pub fn symbols_from_json(text: &str) -> Result<SymbolCache> {
    let v = json::parse(text)?;
    if json::field(&v, "format")? != FORMAT {
        return Err(Error::Format("not a symbol table".into()));
    }
    let version = json::as_u64(json::field(&v, "version")?, "version")?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "symbol table version {version}, expected {VERSION}"
        )));
    }
    let level =
        u32::try_from(json::as_u64(json::field(&v, "k")?, "k")?).map_err(|_| Error::Format("k out of range".into()))?;
    let mut f = Vec::new();
    for e in json::as_array(json::field(&v, "f")?, "f")? {
        f.push((
            labels::<4>(e)?,
            FBlock {
                rows: json::as_charges(json::field(e, "rows")?, "rows")?,
                cols: json::as_charges(json::field(e, "cols")?, "cols")?,
                matrix: json::as_matrix(json::field(e, "matrix")?, "matrix")?,
            },
        ));
    }
    let mut r = Vec::new();
    for e in json::as_array(json::field(&v, "r")?, "r")? {
        r.push((labels::<3>(e)?, json::as_complex(json::field(e, "value")?, "value")?));
    }
    Ok(SymbolCache::from_tables(level, f, r)?)
}

/// The model at `level`, with its tables read from (or written to) `dir`.
pub fn load_model_in(dir: Option<&Path>, level: u32) -> Result<(AnyonModel, CacheStatus)> {
    let Some(dir) = dir else {
        return Ok((AnyonModel::new(level)?, CacheStatus::Disabled));
    };
    let path = cache_file(dir, level);
    let mut rejected = None;
    if let Ok(text) = fs::read_to_string(&path) {
        match symbols_from_json(&text) {
            Ok(s) if s.level() == level => return Ok((AnyonModel::with_symbols(s)?, CacheStatus::Loaded(path))),
            Ok(s) => rejected = Some(format!("file holds level {}", s.level())),
            Err(e) => rejected = Some(e.to_string()),
        }
    }
    let model = AnyonModel::new(level)?;
    let text = symbols_to_json(model.symbols()).render();
    let written = fs::create_dir_all(dir).and_then(|_| fs::write(&path, text));
    let status = match (written, rejected) {
        (Err(e), _) => CacheStatus::Unwritable {
            path,
            reason: e.to_string(),
        },
        (Ok(()), Some(reason)) => CacheStatus::Replaced { path, reason },
        (Ok(()), None) => CacheStatus::Stored(path),
    };
    Ok((model, status))
}

/// Like [`load_model_in`], with the directory taken from `ANYONFORGE_CACHE_DIR`.
pub fn load_model(level: u32) -> Result<(AnyonModel, CacheStatus)> {
    let dir = std::env::var_os(CACHE_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(PathBuf::from);
    load_model_in(dir.as_deref(), level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_survive_the_round_trip_bit_for_bit() {
        for k in [2, 3, 5] {
            let m = AnyonModel::new(k).unwrap();
            let back = symbols_from_json(&symbols_to_json(m.symbols()).render()).unwrap();
            assert_eq!(&back, m.symbols());
        }
    }

    #[test]
    fn cache_files_are_reused_and_repaired() {
        let dir = tempfile::tempdir().unwrap();
        let (_, s) = load_model_in(Some(dir.path()), 3).unwrap();
        assert!(matches!(s, CacheStatus::Stored(_)));
        let (m, s) = load_model_in(Some(dir.path()), 3).unwrap();
        assert!(matches!(s, CacheStatus::Loaded(_)));
        assert_eq!(m.symbols(), AnyonModel::new(3).unwrap().symbols());

        let path = cache_file(dir.path(), 3);
        let text = fs::read_to_string(&path)
            .unwrap()
            .replacen("\"version\": 1", "\"version\": 0", 1);
        fs::write(&path, text).unwrap();
        let (_, s) = load_model_in(Some(dir.path()), 3).unwrap();
        assert!(matches!(s, CacheStatus::Replaced { .. }));

        fs::write(&path, "{ not json").unwrap();
        let (m, s) = load_model_in(Some(dir.path()), 3).unwrap();
        assert!(matches!(s, CacheStatus::Replaced { .. }));
        assert!(m.symbols().pentagon_residual() < 1e-12);
    }

    #[test]
    fn non_unitary_tables_are_rejected() {
        let m = AnyonModel::new(3).unwrap();
        let text = symbols_to_json(m.symbols()).render();
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut v = v;
        let blk = v["f"]
            .as_array_mut()
            .unwrap()
            .iter_mut()
            .find(|b| b["rows"].as_array().unwrap().len() == 2)
            .unwrap();
        blk["matrix"][0][0][0] = serde_json::json!(0.9);
        assert!(symbols_from_json(&v.to_string()).is_err());
    }
}

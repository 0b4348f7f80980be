//! Flat `key = value` run manifest.
//!
//! The sixteen core keys are always written, in this order:
//! `a b eps c du dv dt ka typ nn nm iter_max nssp seed backend precision`.
//! Backend tuning (`tile_rows`, `tile_cols`, `threads`) and `image` follow
//! when they apply. Floats use the shortest representation that parses
//! back to the same value, so a manifest replays bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{InitMode, Precision, RunConfig};
use crate::gene::{Gene, GeneField};
use crate::kernels::Backend;

pub const CORE_KEYS: [&str; 16] = [
    "a", "b", "eps", "c", "du", "dv", "dt", "ka", "typ", "nn", "nm", "iter_max", "nssp", "seed",
    "backend", "precision",
];

const OPTIONAL_KEYS: [&str; 4] = ["tile_rows", "tile_cols", "threads", "image"];

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown manifest key `{0}`")]
    UnknownKey(String),
    #[error("duplicate manifest key `{0}`")]
    DuplicateKey(String),
    #[error("missing manifest key `{0}`")]
    MissingKey(&'static str),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A gene plus run configuration, as persisted next to every output.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub gene: Gene,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(gene: Gene, config: RunConfig) -> Self {
        Self { gene, config }
    }

    pub fn render(&self) -> String {
        let g = &self.gene;
        let c = &self.config;
        let mut s = String::new();
        for f in GeneField::ALL {
            let _ = writeln!(s, "{} = {}", f.name(), g.get(f));
        }
        let _ = writeln!(s, "typ = {}", c.init_mode.typ());
        let _ = writeln!(s, "nn = {}", c.rows);
        let _ = writeln!(s, "nm = {}", c.cols);
        let _ = writeln!(s, "iter_max = {}", c.iter_max);
        let _ = writeln!(s, "nssp = {}", c.nssp);
        let _ = writeln!(s, "seed = {}", c.seed);
        let _ = writeln!(s, "backend = {}", c.backend.name());
        let _ = writeln!(s, "precision = {}", c.precision);
        match c.backend {
            Backend::Blocked { tile_rows, tile_cols } => {
                let _ = writeln!(s, "tile_rows = {tile_rows}");
                let _ = writeln!(s, "tile_cols = {tile_cols}");
            }
            Backend::Parallel { threads } => {
                let _ = writeln!(s, "threads = {threads}");
            }
            Backend::Reference | Backend::Shift => {}
        }
        if let Some(p) = &c.image_path {
            let _ = writeln!(s, "image = {}", p.display());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ManifestError::Syntax { line: k + 1 })?;
            let key = key.trim().to_string();
            if !CORE_KEYS.contains(&key.as_str()) && !OPTIONAL_KEYS.contains(&key.as_str()) {
                return Err(ManifestError::UnknownKey(key));
            }
            if kv.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(ManifestError::DuplicateKey(key));
            }
        }

        let get = |key: &'static str| kv.get(key).ok_or(ManifestError::MissingKey(key));
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ManifestError>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e: T::Err| ManifestError::BadValue {
                key: key.to_string(),
                msg: e.to_string(),
            })
        }

        let mut gene = Gene::default();
        for f in GeneField::ALL {
            gene.set(f, num(f.name(), get(f.name())?)?);
        }

        let typ: u8 = num("typ", get("typ")?)?;
        let init_mode = InitMode::from_typ(typ).ok_or_else(|| ManifestError::BadValue {
            key: "typ".into(),
            msg: format!("{typ} is not one of 1, 2, 3"),
        })?;
        let precision: Precision = num("precision", get("precision")?)?;

        let opt = |key: &str| kv.get(key).map(|v| num::<usize>(key, v)).transpose();
        let backend_name = get("backend")?;
        let backend = Backend::from_parts(
            backend_name,
            opt("tile_rows")?,
            opt("tile_cols")?,
            opt("threads")?,
        )
        .map_err(|msg| ManifestError::BadValue {
            key: "backend".into(),
            msg,
        })?;

        let config = RunConfig {
            init_mode,
            rows: num("nn", get("nn")?)?,
            cols: num("nm", get("nm")?)?,
            image_path: kv.get("image").map(PathBuf::from),
            iter_max: num("iter_max", get("iter_max")?)?,
            nssp: num("nssp", get("nssp")?)?,
            seed: num("seed", get("seed")?)?,
            backend,
            precision,
        };
        Ok(Self { gene, config })
    }

    pub fn write(&self, path: &Path) -> Result<(), ManifestError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, ManifestError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

//! On-disk cache of subgroup lattices with their Möbius values.
//!
//! One JSON file per group, named by the group's content hash. Members of
//! each subgroup are stored as indices into the group's sorted element list,
//! so a reload against a freshly closed group reproduces the same table.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::MoebiusTable;
use crate::permgroup::{GroupError, GroupSpec, MemberSet, PermGroup, Subgroup, SubgroupLattice};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O: {0}")]
    Io(#[from] io::Error),
    #[error("cache file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cache file {path} does not match the group: {reason}")]
    Mismatch { path: PathBuf, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct CacheFile {
    version: u32,
    group_hash: String,
    group: GroupSpec,
    order: usize,
    subgroups: Vec<Vec<u32>>,
    leq: Vec<(usize, usize)>,
    mu: Vec<i64>,
}

impl CacheFile {
    fn from_table(table: &MoebiusTable) -> CacheFile {
        let lattice = table.lattice();
        let group = lattice.group();
        CacheFile {
            version: CACHE_VERSION,
            group_hash: group.spec().content_hash(),
            group: group.spec().clone(),
            order: group.order(),
            subgroups: lattice
                .subgroups()
                .iter()
                .map(|h| h.fingerprint())
                .collect(),
            leq: lattice.strict_pairs(),
            mu: table.values().to_vec(),
        }
    }
}

/// Serialized form of a table; equal tables give equal bytes.
pub fn table_to_json(table: &MoebiusTable) -> String {
    serde_json::to_string(&CacheFile::from_table(table)).expect("cache serialization cannot fail")
}

/// Parses a cache document against an already closed group.
pub fn table_from_json(
    group: &PermGroup,
    text: &str,
    path: &Path,
) -> Result<MoebiusTable, CacheError> {
    let file: CacheFile = serde_json::from_str(text)?;
    let mismatch = |reason: &str| CacheError::Mismatch {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if file.version != CACHE_VERSION {
        return Err(mismatch("unsupported version"));
    }
    if file.group_hash != group.spec().content_hash() {
        return Err(mismatch("group hash differs"));
    }
    if file.order != group.order() {
        return Err(mismatch("group order differs"));
    }
    if file.mu.len() != file.subgroups.len() {
        return Err(mismatch("mu and subgroup counts differ"));
    }
    let mut subgroups = Vec::with_capacity(file.subgroups.len());
    for members in &file.subgroups {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(mismatch("fingerprint not sorted"));
        }
        let set = MemberSet::from_indices(group.order(), members)
            .ok_or_else(|| mismatch("fingerprint out of range"))?;
        subgroups.push(Subgroup::new(set));
    }
    let sorted = subgroups
        .windows(2)
        .all(|w| (w[0].order(), w[0].fingerprint()) < (w[1].order(), w[1].fingerprint()));
    if !sorted {
        return Err(mismatch("subgroups not in canonical order"));
    }
    let lattice = SubgroupLattice::from_sorted(group.clone(), subgroups);
    if lattice.strict_pairs() != file.leq {
        return Err(mismatch("inclusion pairs differ"));
    }
    Ok(MoebiusTable::from_parts(lattice, file.mu))
}

/// Directory of cached tables.
#[derive(Clone, Debug)]
pub struct LatticeCache {
    dir: PathBuf,
}

impl LatticeCache {
    pub fn new(dir: impl Into<PathBuf>) -> LatticeCache {
        LatticeCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: &GroupSpec) -> PathBuf {
        self.dir.join(format!("{}.json", spec.content_hash()))
    }

    pub fn load(&self, group: &PermGroup) -> Result<Option<MoebiusTable>, CacheError> {
        let path = self.path_for(group.spec());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        table_from_json(group, &text, &path).map(Some)
    }

    pub fn store(&self, table: &MoebiusTable) -> Result<PathBuf, CacheError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(table.group().spec());
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, table_to_json(table))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Cached table if present, otherwise enumerate, store and return.
    pub fn table_for(
        &self,
        group: &PermGroup,
        lattice_limit: usize,
    ) -> Result<MoebiusTable, CacheError> {
        if let Some(table) = self.load(group)? {
            return Ok(table);
        }
        let table = MoebiusTable::new(group.enumerate_subgroups(lattice_limit)?);
        self.store(&table)?;
        Ok(table)
    }

    /// Removes every cached table; returns how many files were deleted.
    pub fn clear(&self) -> Result<usize, CacheError> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut removed = 0;
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|x| x == "json") {
                fs::remove_file(path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

//! Output directories that appear all at once.
//!
//! Files are written into a sibling staging directory (`<out>.tmp-<pid>`),
//! which is renamed onto `<out>` on commit. If `<out>` already exists the
//! staged files are moved into it one by one. An uncommitted stage is
//! removed on drop.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct StagedDir {
    target: PathBuf,
    stage: PathBuf,
    committed: bool,
}

impl StagedDir {
    pub fn new(target: impl Into<PathBuf>) -> Result<Self> {
        let target = target.into();
        let name = target
            .file_name()
            .ok_or_else(|| Error::Usage(format!("output path {} has no final component", target.display())))?
            .to_string_lossy()
            .into_owned();
        let stage = target.with_file_name(format!("{name}.tmp-{}", std::process::id()));
        if stage.exists() {
            fs::remove_dir_all(&stage).map_err(|e| Error::io(&stage, e))?;
        }
        fs::create_dir_all(&stage).map_err(|e| Error::io(&stage, e))?;
        Ok(Self {
            target,
            stage,
            committed: false,
        })
    }

    pub fn target(&self) -> &Path {
        &self.target
    }

    /// Writes `contents` to `relative` inside the stage, creating parents.
    pub fn write(&self, relative: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.stage.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    }

    pub fn commit(mut self) -> Result<PathBuf> {
        if !self.target.exists() {
            fs::rename(&self.stage, &self.target).map_err(|e| Error::io(&self.target, e))?;
        } else {
            merge_into(&self.stage, &self.target)?;
            fs::remove_dir_all(&self.stage).map_err(|e| Error::io(&self.stage, e))?;
        }
        self.committed = true;
        Ok(self.target.clone())
    }
}

fn merge_into(from: &Path, to: &Path) -> Result<()> {
    fs::create_dir_all(to).map_err(|e| Error::io(to, e))?;
    let mut entries: Vec<_> = fs::read_dir(from)
        .map_err(|e| Error::io(from, e))?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(from, e))?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let src = entry.path();
        let dst = to.join(entry.file_name());
        if src.is_dir() {
            merge_into(&src, &dst)?;
        } else {
            fs::rename(&src, &dst).map_err(|e| Error::io(&dst, e))?;
        }
    }
    Ok(())
}

impl Drop for StagedDir {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.stage);
        }
    }
}

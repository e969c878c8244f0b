//! Workspace layout, the single-process lockfile, and artifact dependency
//! checks that name the producing command.

use std::path::{Path, PathBuf};

use crate::error::CliError;

pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn open(root: &Path) -> Result<Workspace, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Workspace {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn candidates(&self) -> PathBuf {
        self.path("candidates.jsonl")
    }

    pub fn pool(&self) -> PathBuf {
        self.path("pool.jsonl")
    }

    pub fn journal(&self) -> PathBuf {
        self.path("journal.jsonl")
    }

    pub fn matrix(&self) -> PathBuf {
        self.path("matrix.csv")
    }

    pub fn model(&self, name: &str) -> PathBuf {
        self.path(&format!("model_{name}.json"))
    }

    pub fn metrics(&self) -> PathBuf {
        self.path("metrics.csv")
    }

    pub fn stability_table(&self, family: &str) -> PathBuf {
        self.path(&format!("stability_{family}.csv"))
    }

    pub fn stability_summary(&self) -> PathBuf {
        self.path("stability_summary.csv")
    }

    pub fn stability_overlap(&self) -> PathBuf {
        self.path("stability_overlap.json")
    }

    pub fn stability_plot(&self) -> PathBuf {
        self.path("stability_plot.json")
    }

    pub fn diversity(&self) -> PathBuf {
        self.path("diversity.json")
    }

    pub fn agreement(&self) -> PathBuf {
        self.path("agreement.json")
    }

    pub fn report(&self) -> PathBuf {
        self.path("report.txt")
    }

    pub fn skips(&self) -> PathBuf {
        self.path("elicit_skips.json")
    }

    /// Fails with a message naming the producing command when an upstream
    /// artifact is missing.
    pub fn require(&self, name: &str, producer: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        if !path.exists() {
            return Err(CliError::validation(format!(
                "missing {}: run `{producer}` first",
                path.display()
            )));
        }
        Ok(path)
    }

    pub fn lock(&self) -> Result<WorkspaceLock, CliError> {
        let path = self.path("lock");
        match std::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(mut file) => {
                use std::io::Write;
                let _ = writeln!(file, "{}", std::process::id());
                Ok(WorkspaceLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::validation(format!(
                    "workspace is locked by another command; remove {} if stale",
                    path.display()
                )))
            }
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

/// Held for the duration of one command; the lock file disappears on drop.
pub struct WorkspaceLock {
    path: PathBuf,
}

impl Drop for WorkspaceLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive_and_released_on_drop() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path()).unwrap();
        let lock = ws.lock().unwrap();
        assert!(ws.lock().is_err(), "second lock must fail");
        drop(lock);
        let again = ws.lock().unwrap();
        drop(again);
    }

    #[test]
    fn require_names_the_producer() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path()).unwrap();
        let err = ws.require("matrix.csv", "score").unwrap_err();
        assert!(err.to_string().contains("run `score` first"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}

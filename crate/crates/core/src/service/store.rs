//! Append-only, line-delimited JSON store with one file per session.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::session::Record;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o on {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: corrupt record")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// The open, append-only file of one session.
#[derive(Debug)]
pub struct SessionFile {
    path: PathBuf,
    file: File,
}

impl SessionFile {
    /// Creates a new session file; fails if it already exists.
    pub fn create(dir: &Path, session_id: &str) -> Result<Self, StoreError> {
        let path = dir.join(format!("{session_id}.jsonl"));
        let file = OpenOptions::new()
            .append(true)
            .create_new(true)
            .open(&path)
            .map_err(io_err(&path))?;
        Ok(Self { path, file })
    }

    /// Appends one record and waits until it is on disk.
    pub fn append(&mut self, record: &Record) -> Result<(), StoreError> {
        let mut line = serde_json::to_vec(record).expect("records serialize");
        line.push(b'\n');
        self.file.write_all(&line).map_err(io_err(&self.path))?;
        self.file.sync_data().map_err(io_err(&self.path))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// Reads a session file. A final line without its newline, or one that
/// does not parse, is a write torn by a crash: it was never acknowledged,
/// so it is cut off. Corruption anywhere else is an error.
pub fn read_session(path: &Path) -> Result<(Vec<Record>, SessionFile), StoreError> {
    let mut file = OpenOptions::new().read(true).append(true).open(path).map_err(io_err(path))?;
    let mut reader = BufReader::new(&mut file);
    let mut records = Vec::new();
    let mut good_len = 0u64;
    let mut buf = String::new();
    let mut line_no = 0;
    let mut torn = false;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let complete = buf.ends_with('\n');
        match serde_json::from_str::<Record>(buf.trim_end()) {
            Ok(r) if complete => {
                records.push(r);
                good_len += n as u64;
            }
            Ok(_) => {
                torn = true;
                break;
            }
            Err(source) => {
                // Only the last line may be torn.
                let mut rest = String::new();
                reader.read_line(&mut rest).map_err(io_err(path))?;
                if !rest.is_empty() {
                    return Err(StoreError::Corrupt {
                        path: path.to_path_buf(),
                        line: line_no,
                        source,
                    });
                }
                torn = true;
                break;
            }
        }
    }
    drop(reader);
    if torn {
        tracing::warn!(path = %path.display(), "dropping torn final record");
        file.set_len(good_len).map_err(io_err(path))?;
        file.seek(SeekFrom::End(0)).map_err(io_err(path))?;
    }
    Ok((
        records,
        SessionFile {
            path: path.to_path_buf(),
            file,
        },
    ))
}

/// Every `*.jsonl` file under `dir`, sorted by name.
pub fn session_files(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    paths.sort();
    Ok(paths)
}

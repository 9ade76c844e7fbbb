use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

/// Timestamps and host details, kept apart from result files so those
/// stay reproducible.
#[derive(Serialize)]
struct RunInfo<'a> {
    command: &'a str,
    args: Vec<String>,
    version: &'a str,
    started_unix_s: u64,
    duration_s: f64,
    host: String,
    threads_available: usize,
}

pub struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Clock {
            started: SystemTime::now(),
            instant: Instant::now(),
        }
    }

    pub fn write(&self, dir: &Path, command: &str) -> Result<()> {
        let host = std::env::var("HOSTNAME")
            .ok()
            .or_else(|| std::fs::read_to_string("/etc/hostname").ok())
            .map(|h| h.trim().to_string())
            .unwrap_or_default();
        let info = RunInfo {
            command,
            args: std::env::args().skip(1).collect(),
            version: env!("CARGO_PKG_VERSION"),
            started_unix_s: self.started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            duration_s: self.instant.elapsed().as_secs_f64(),
            host,
            threads_available: std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("runinfo.json");
        std::fs::write(&path, serde_json::to_string_pretty(&info)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}

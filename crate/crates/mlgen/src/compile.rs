//! Optional TikZ compile check through an external command.

use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use mlgen_core::validate::standalone_tikz_document;
use thiserror::Error;

use crate::manifest::CompilerConfig;

const INPUT: &str = "figure.tex";
const LOG: &str = "compiler.log";
const POLL: Duration = Duration::from_millis(10);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileOutcome {
    /// Exit status zero and at least one output file.
    Pass,
    Fail(String),
    /// No compiler configured.
    Skipped,
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("compiler timed out after {0:?}")]
    Timeout(Duration),
    #[error("cannot run compiler: {0}")]
    Spawn(#[source] std::io::Error),
}

/// Counting semaphore bounding concurrent compiler processes.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("gate lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("gate lock");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("gate lock") += 1;
        self.0.cv.notify_one();
    }
}

/// A configured compiler command. The template is split on whitespace;
/// `{input}` becomes the path of a standalone `.tex` file and `{dir}` its
/// directory, which is also the working directory.
#[derive(Debug)]
pub struct TikzCompiler {
    argv: Vec<String>,
    timeout: Duration,
    gate: Gate,
}

impl TikzCompiler {
    pub fn new(command: &str, timeout: Duration, max_in_flight: usize) -> Self {
        TikzCompiler {
            argv: command.split_whitespace().map(str::to_string).collect(),
            timeout,
            gate: Gate {
                free: Mutex::new(max_in_flight.max(1)),
                cv: Condvar::new(),
            },
        }
    }

    pub fn from_config(cfg: &CompilerConfig) -> Self {
        TikzCompiler::new(&cfg.command, Duration::from_secs(cfg.timeout_secs), cfg.max_in_flight)
    }

    pub fn check(&self, body: &str) -> Result<CompileOutcome, CompileError> {
        let _permit = self.gate.acquire();
        let dir = tempfile::tempdir().map_err(CompileError::Spawn)?;
        let input = dir.path().join(INPUT);
        fs::write(&input, standalone_tikz_document(body)).map_err(CompileError::Spawn)?;
        let fill = |arg: &str| {
            arg.replace("{input}", &input.to_string_lossy())
                .replace("{dir}", &dir.path().to_string_lossy())
        };
        let Some((program, args)) = self.argv.split_first() else {
            return Err(CompileError::Spawn(std::io::Error::other("empty compiler command")));
        };
        let log = fs::File::create(dir.path().join(LOG)).map_err(CompileError::Spawn)?;
        let log_err = log.try_clone().map_err(CompileError::Spawn)?;
        let mut child = Command::new(fill(program))
            .args(args.iter().map(|a| fill(a)))
            .current_dir(dir.path())
            .stdin(Stdio::null())
            .stdout(Stdio::from(log))
            .stderr(Stdio::from(log_err))
            .spawn()
            .map_err(CompileError::Spawn)?;
        let deadline = Instant::now() + self.timeout;
        let status = loop {
            if let Some(status) = child.try_wait().map_err(CompileError::Spawn)? {
                break status;
            }
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                return Err(CompileError::Timeout(self.timeout));
            }
            std::thread::sleep(POLL);
        };
        if !status.success() {
            return Ok(CompileOutcome::Fail(format!("{}: {}", status, log_tail(dir.path()))));
        }
        if !has_artifact(dir.path()) {
            return Ok(CompileOutcome::Fail("compiler produced no output file".into()));
        }
        Ok(CompileOutcome::Pass)
    }
}

fn has_artifact(dir: &Path) -> bool {
    fs::read_dir(dir).into_iter().flatten().flatten().any(|e| {
        let name = e.file_name();
        name != INPUT && name != LOG
    })
}

fn log_tail(dir: &Path) -> String {
    let text = fs::read_to_string(dir.join(LOG)).unwrap_or_default();
    let text = text.trim();
    let start = text.len().saturating_sub(400);
    let start = (start..=text.len())
        .find(|i| text.is_char_boundary(*i))
        .unwrap_or(text.len());
    text[start..].to_string()
}

/// Skipped without a compiler; otherwise the compiler's verdict.
pub fn compile_check_tikz(body: &str, compiler: Option<&TikzCompiler>) -> Result<CompileOutcome, CompileError> {
    match compiler {
        None => Ok(CompileOutcome::Skipped),
        Some(c) => c.check(body),
    }
}

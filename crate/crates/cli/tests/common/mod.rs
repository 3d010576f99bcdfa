#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_screenforge");

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn techsupport() -> PathBuf {
    fixtures().join("techsupport.app.json")
}

pub fn broken(name: &str) -> PathBuf {
    fixtures().join("broken").join(format!("{name}.app.json"))
}

/// `screenforge --workspace <ws> args...`
pub fn sf(ws: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .env_remove("SCREENFORGE_WORKSPACE")
        .output()
        .expect("run screenforge")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// A long-running `screenforge` (preview/serve), killed on drop.
pub struct Server {
    child: Child,
    pub url: String,
}

impl Server {
    pub fn start(ws: &Path, args: &[&str]) -> Result<Server, Output> {
        let mut child = Command::new(BIN)
            .arg("--workspace")
            .arg(ws)
            .args(args)
            .env_remove("SCREENFORGE_WORKSPACE")
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .expect("spawn screenforge");
        let mut reader = BufReader::new(child.stdout.take().unwrap());
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        if line.starts_with("http://") {
            Ok(Server {
                child,
                url: line.trim().to_string(),
            })
        } else {
            reader.read_to_string(&mut line).unwrap();
            let mut out = child.wait_with_output().unwrap();
            out.stdout = line.into_bytes();
            Err(out)
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

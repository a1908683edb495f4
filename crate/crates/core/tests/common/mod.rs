//! Helpers shared by the integration tests: fixture copies, mutation
//! overlays, an in-process CLI runner and independent reference oracles.

#![allow(dead_code)]

pub mod oracles;

use std::fs;
use std::path::{Path, PathBuf};

pub const MUTATIONS: [&str; 7] = ["E101", "E102", "E103", "E104", "E105", "E106", "E107"];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn robot_fixture() -> PathBuf {
    fixtures().join("office-robot")
}

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), &target).unwrap();
        }
    }
}

/// A scratch copy of the office robot project.
pub fn robot_copy() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("office-robot");
    copy_dir(&robot_fixture(), &root);
    (dir, root)
}

/// Applies a mutation overlay: files replace their counterparts and every
/// path listed in `_delete` is removed.
pub fn apply_mutation(root: &Path, code: &str) {
    let overlay = fixtures().join("mutations").join(code);
    assert!(overlay.is_dir(), "no mutation overlay {code}");
    fn walk(dir: &Path, base: &Path, root: &Path) {
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            let path = entry.path();
            let rel = path.strip_prefix(base).unwrap();
            let name = entry.file_name();
            if entry.file_type().unwrap().is_dir() {
                walk(&path, base, root);
            } else if name == "_delete" {
                for line in fs::read_to_string(&path).unwrap().lines() {
                    let line = line.trim();
                    if !line.is_empty() {
                        let _ = fs::remove_file(root.join(line));
                    }
                }
            } else if name != "_about.txt" {
                let target = root.join(rel);
                fs::create_dir_all(target.parent().unwrap()).unwrap();
                fs::copy(&path, target).unwrap();
            }
        }
    }
    walk(&overlay, &overlay, root);
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn sace(root: &Path, args: &[&str]) -> CliOutput {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sace").chain(args.iter().copied());
    let code = sace_kit::cli::run(argv, root, &mut out, &mut err);
    CliOutput {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Every regular file under `root` with its bytes, by relative path.
pub fn snapshot(root: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    fn walk(dir: &Path, root: &Path, out: &mut std::collections::BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            let path = entry.path();
            if entry.file_type().unwrap().is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    walk(root, root, &mut out);
    out
}

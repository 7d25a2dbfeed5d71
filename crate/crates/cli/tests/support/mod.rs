#![allow(dead_code)]

pub mod http;
pub mod jsonschema;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shiftscope"));
    cmd.env("SHIFTSCOPE_LOG", "warn");
    cmd
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    bin().args(args).output().expect("spawning shiftscope")
}

pub fn run_ok<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = run(args);
    assert!(
        out.status.success(),
        "shiftscope failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Paths of a synthesized, profiled and evaluated workspace.
pub struct Pipeline {
    pub dir: PathBuf,
    pub reference: PathBuf,
    pub evaluation: PathBuf,
    pub schema: PathBuf,
    pub profile: PathBuf,
    pub result: PathBuf,
    pub env: Vec<(String, String)>,
}

impl Pipeline {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            reference: dir.join("reference.csv"),
            evaluation: dir.join("evaluation.csv"),
            schema: dir.join("schema.json"),
            profile: dir.join("profile.json"),
            result: dir.join("result.json"),
            env: Vec::new(),
        }
    }

    pub fn with_env(mut self, key: &str, value: &str) -> Self {
        self.env.push((key.into(), value.into()));
        self
    }

    fn exec(&self, args: Vec<String>) -> Output {
        let out = bin()
            .args(&args)
            .envs(self.env.iter().map(|(k, v)| (k, v)))
            .output()
            .expect("spawning shiftscope");
        assert!(
            out.status.success(),
            "shiftscope {} failed ({:?}): {}",
            args[0],
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        out
    }

    pub fn synth(&self, extra: &[&str]) -> &Self {
        let mut args = vec!["synth".to_string(), "--out-dir".into(), self.dir.display().to_string()];
        args.extend(extra.iter().map(|s| s.to_string()));
        self.exec(args);
        self
    }

    pub fn profile(&self, extra: &[&str]) -> &Self {
        let mut args: Vec<String> = vec![
            "profile".into(),
            "--input".into(),
            self.reference.display().to_string(),
            "--schema".into(),
            self.schema.display().to_string(),
            "--output".into(),
            self.profile.display().to_string(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        self.exec(args);
        self
    }

    pub fn evaluate(&self, extra: &[&str]) -> &Self {
        let mut args: Vec<String> = vec![
            "evaluate".into(),
            "--input".into(),
            self.evaluation.display().to_string(),
            "--profile".into(),
            self.profile.display().to_string(),
            "--output".into(),
            self.result.display().to_string(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        self.exec(args);
        self
    }

    pub fn state_args(&self) -> Vec<String> {
        vec![
            "--profile".into(),
            self.profile.display().to_string(),
            "--result".into(),
            self.result.display().to_string(),
            "--input".into(),
            self.evaluation.display().to_string(),
        ]
    }

    pub fn export(&self, out: &Path) {
        let mut args = vec!["export".to_string()];
        args.extend(self.state_args());
        args.extend(["--out-dir".to_string(), out.display().to_string()]);
        self.exec(args);
    }

    pub fn serve(&self) -> http::Server {
        http::Server::start(&self.state_args())
    }

    pub fn result_json(&self) -> serde_json::Value {
        serde_json::from_slice(&std::fs::read(&self.result).unwrap()).unwrap()
    }
}

pub fn schema(name: &str) -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_slice(&std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

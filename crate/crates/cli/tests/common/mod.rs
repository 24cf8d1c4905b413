#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use spdc_core::{RingImage, Vec2};

pub struct Run {
    pub code: i32,
    pub stderr: String,
    pub out: PathBuf,
}

impl Run {
    pub fn json(&self, name: &str) -> Value {
        let text = std::fs::read_to_string(self.out.join(name))
            .unwrap_or_else(|e| panic!("{name}: {e}; stderr: {}", self.stderr));
        serde_json::from_str(&text).unwrap()
    }

    pub fn bytes(&self, name: &str) -> Vec<u8> {
        std::fs::read(self.out.join(name)).unwrap()
    }

    /// Numeric columns of a CSV file with a header line.
    pub fn csv(&self, name: &str) -> (Vec<String>, Vec<Vec<f64>>) {
        let text = std::fs::read_to_string(self.out.join(name)).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        (header, rows)
    }
}

/// Run the `spdc` binary with `args`, writing into `out`.
pub fn spdc(out: &Path, config: Option<&Path>, args: &[&str]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spdc"));
    cmd.arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.args(args).env("RUST_LOG", "error");
    let o = cmd.output().expect("spawn spdc");
    Run {
        code: o.status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        out: out.to_path_buf(),
    }
}

/// Write a JSON config document and return its path.
pub fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

/// Gaussian annulus whose radial sigma goes from `s0` at φ = 0 to `s1` at φ = π.
pub fn annulus(n: usize, pitch: f64, r0: f64, s0: f64, s1: f64) -> RingImage {
    let c = Vec2::new((n as f64 - 1.0) / 2.0, (n as f64 - 1.0) / 2.0);
    let mid = 0.5 * (s0 + s1);
    let amp = 0.5 * (s0 - s1);
    RingImage::from_fn(n, n, pitch, |x, y| {
        let d = Vec2::new(x, y) - c;
        let s = mid + amp * d.y.atan2(d.x).cos();
        (-(d.norm() - r0).powi(2) / (2.0 * s * s)).exp()
    })
    .unwrap()
}

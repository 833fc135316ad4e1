use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use ncgp::random::RNG_ALGORITHM;
use serde::Serialize;
use serde_json::Value;

/// One experiment outcome. Everything except `runtime` is a deterministic
/// function of the experiment id, its parameters and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub inputs: Value,
    pub claimed: Value,
    pub computed: Value,
    pub pass: bool,
    pub tolerance: f64,
    /// Wall-clock seconds.
    pub runtime: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

pub struct Timer {
    start: Instant,
}

impl Timer {
    pub fn start() -> Self {
        Self { start: Instant::now() }
    }

    pub fn report(
        &self,
        id: &str,
        seed: u64,
        inputs: Value,
        claimed: Value,
        computed: Value,
        pass: bool,
        tolerance: f64,
    ) -> ExperimentReport {
        ExperimentReport {
            experiment_id: id.to_string(),
            inputs,
            claimed,
            computed,
            pass,
            tolerance,
            runtime: self.start.elapsed().as_secs_f64(),
            seed,
            rng_algorithm: RNG_ALGORITHM,
        }
    }
}

/// JSON-safe extended real: `+∞` becomes the string `"inf"`.
pub fn ext(v: f64) -> Value {
    if v.is_infinite() {
        Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::json!(v)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn summary(r: &ExperimentReport) -> String {
    format!(
        "{} {}  computed={}  claimed={}",
        if r.pass { "PASS" } else { "FAIL" },
        r.experiment_id,
        compact(&r.computed),
        compact(&r.claimed)
    )
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 120 {
        format!("{}…", &s[..s.char_indices().nth(117).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

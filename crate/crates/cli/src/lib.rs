//! Experiment harness: single runs with optional attacks, attack suites,
//! and cost-scaling sweeps. Reports are deterministic given the config.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use avs_core::apps::{finf_params, verify_finf, FinfProof};
use avs_core::exec::{map_range, Exec};
use avs_core::gfun::{GSpec, GTable};
use avs_core::scheme::{
    adversary_wrap, verify_stream, Attack, GTarget, Prover, RejectReason, SchemeConfig,
    SchemeParams, Variant,
};
use avs_core::stream::{
    exact_oracle, gen_multiset, gen_stream, multiset_to_stream, read_stream, FrequencyVector,
    GenKind, StreamToken,
};
use avs_core::{SchemeError, StreamError};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Every error is a configuration or input problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// The function being computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AppName {
    F0,
    Finf,
    Multiset,
    /// `g(x) = x²`.
    Square,
    Generic(PathBuf),
}

impl fmt::Display for AppName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppName::F0 => f.write_str("f0"),
            AppName::Finf => f.write_str("finf"),
            AppName::Multiset => f.write_str("multiset"),
            AppName::Square => f.write_str("square"),
            AppName::Generic(p) => write!(f, "generic:{}", p.display()),
        }
    }
}

impl FromStr for AppName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f0" => Ok(AppName::F0),
            "finf" => Ok(AppName::Finf),
            "multiset" => Ok(AppName::Multiset),
            "square" => Ok(AppName::Square),
            _ => match s.strip_prefix("generic:") {
                Some(path) if !path.is_empty() => Ok(AppName::Generic(path.into())),
                _ => Err(config_err(format!("unknown app `{s}`"))),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    /// Stream length is `m_factor · n`.
    pub m_factor: u64,
    pub variant: Variant,
    pub app: AppName,
    pub gen: GenKind,
    pub seed: u64,
    pub attack: Option<Attack>,
    pub c: u64,
    pub capacity: Option<usize>,
    pub field_override: Option<u64>,
    /// Replaces the generator.
    pub stream_file: Option<PathBuf>,
    pub exec: Exec,
    /// Adds wall time to reports (breaks byte-identical output).
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 512,
            m_factor: 2,
            variant: Variant::Emg,
            app: AppName::F0,
            gen: GenKind::UniformInsert,
            seed: 0,
            attack: None,
            c: SchemeConfig::DEFAULT_C,
            capacity: None,
            field_override: None,
            stream_file: None,
            exec: Exec::Parallel,
            timing: false,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(config_err("n must be positive"));
        }
        if self.m_factor == 0 {
            return Err(config_err("m-factor must be positive"));
        }
        if self.c == 0 {
            return Err(config_err("c must be positive"));
        }
        if self.capacity == Some(0) {
            return Err(config_err("capacity must be positive"));
        }
        if self.variant == Variant::Emg && self.stream_file.is_none() && self.m_factor > self.c {
            return Err(config_err(format!(
                "stream length {}·n exceeds the EMG cap {}·n; raise --c or use --variant cm",
                self.m_factor, self.c
            )));
        }
        Ok(())
    }

    fn scheme_config(&self, m: u64) -> SchemeConfig {
        let n = self.n as u64;
        let mut cfg = match self.variant {
            Variant::Emg => SchemeConfig::emg(self.n, self.c),
            Variant::CountMedian => {
                SchemeConfig::count_median(self.n, m.max(self.m_factor.saturating_mul(n)), self.c)
            }
        };
        cfg.capacity = self.capacity;
        cfg.field_override = self.field_override;
        cfg
    }

    fn stream(&self) -> Result<Vec<StreamToken>, CliError> {
        if let Some(path) = &self.stream_file {
            return Ok(read_stream(BufReader::new(File::open(path)?))?);
        }
        let m = self.m_factor.saturating_mul(self.n as u64) as usize;
        Ok(match self.app {
            AppName::Multiset => multiset_to_stream(&gen_multiset(self.n, m / 2, self.seed)),
            _ => gen_stream(self.gen, self.n, m, self.seed),
        })
    }

    fn g(&self, m_cap: u64) -> Result<GSpec, CliError> {
        Ok(match &self.app {
            AppName::F0 => GSpec::f0(),
            AppName::Finf => GSpec::above(0),
            AppName::Multiset => GSpec::negative(),
            AppName::Square => GSpec::square_for(self.n, m_cap),
            AppName::Generic(path) => {
                GSpec::table_for(GTable::parse(BufReader::new(File::open(path)?))?, self.n)
            }
        })
    }
}

/// One end-to-end run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub n: usize,
    pub m: usize,
    pub variant: Variant,
    pub app: String,
    pub generator: String,
    pub seed: u64,
    pub attack: Option<Attack>,
    pub attack_no_op: bool,
    pub c: u64,
    pub capacity: usize,
    pub modulus: u64,
    /// `null` is ⊥.
    pub result: Option<Value>,
    pub oracle: Value,
    #[serde(rename = "match")]
    pub matched: bool,
    pub reject_reason: Option<RejectReason>,
    pub detail: Option<String>,
    pub hcost_bits: u64,
    pub vcost_bits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl RunRecord {
    /// Whether the attack was live (not a no-op).
    pub fn attacked(&self) -> bool {
        self.attack.is_some() && !self.attack_no_op
    }

    /// Honest runs must match the oracle; attacked runs must be rejected.
    pub fn passed(&self) -> bool {
        if self.attacked() {
            self.result.is_none()
        } else {
            self.matched
        }
    }
}

fn num(v: i128) -> Value {
    i64::try_from(v)
        .map(Value::from)
        .unwrap_or_else(|_| Value::from(v.to_string()))
}

/// Generates the stream, builds (and optionally attacks) the help, verifies.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let stream = cfg.stream()?;
    let m = stream.len() as u64;
    if cfg.variant == Variant::Emg && m > cfg.c.saturating_mul(cfg.n as u64) {
        return Err(config_err(format!(
            "stream of length {m} exceeds the EMG cap {}·n",
            cfg.c
        )));
    }
    let scheme = cfg.scheme_config(m);
    let g = cfg.g(scheme.m_cap)?;
    let exec = cfg.exec;

    let (params, outcome, result, oracle, no_op) = if cfg.app == AppName::Finf {
        let params = finf_params(&scheme)?;
        let fv = FrequencyVector::from_stream(cfg.n, &stream)?;
        let (key, value) = fv.argmax();
        let prover = Prover::new(&params, &stream, &GSpec::above(value), &[key as u32])?;
        let mut help = prover.help(exec)?;
        let mut no_op = false;
        if let Some(attack) = cfg.attack {
            let a = adversary_wrap(&prover, &params.field, &help, attack, cfg.seed, exec)?;
            help = a.help;
            no_op = a.no_op;
        }
        let proof = FinfProof {
            key: key as u32,
            value: params.field.from_i64(value),
            help,
        };
        let r = verify_finf(&params, &stream, &proof.encode(&params.field), cfg.seed)?;
        let result = r.value.map(|v| num(v as i128));
        (params, r.outcome, result, num(value as i128), no_op)
    } else {
        let params = SchemeParams::new(&scheme, &g)?;
        let prover = Prover::new(&params, &stream, &g, &[])?;
        let mut help = prover.help(exec)?;
        let mut no_op = false;
        if let Some(attack) = cfg.attack {
            let a = adversary_wrap(&prover, &params.field, &help, attack, cfg.seed, exec)?;
            help = a.help;
            no_op = a.no_op;
        }
        let bytes = help.encode(&params.field);
        let outcome = verify_stream(
            &params,
            &stream,
            &GTarget::Fixed(g.clone()),
            &bytes,
            cfg.seed,
        )?;
        let g_exact = exact_oracle(cfg.n, &stream, &g)?;
        let (result, oracle) = if cfg.app == AppName::Multiset {
            (
                outcome.result.map(|v| Value::from(v == 0)),
                Value::from(g_exact == 0),
            )
        } else {
            (outcome.result.map(num), num(g_exact))
        };
        (params, outcome, result, oracle, no_op)
    };

    Ok(RunRecord {
        n: cfg.n,
        m: stream.len(),
        variant: cfg.variant,
        app: cfg.app.to_string(),
        generator: match (&cfg.stream_file, &cfg.app) {
            (Some(p), _) => format!("file:{}", p.display()),
            (None, AppName::Multiset) => "multiset".into(),
            (None, _) => cfg.gen.to_string(),
        },
        seed: cfg.seed,
        attack: cfg.attack,
        attack_no_op: no_op,
        c: cfg.c,
        capacity: params.capacity,
        modulus: params.field.modulus(),
        matched: result.as_ref() == Some(&oracle),
        result,
        oracle,
        reject_reason: outcome.reject_reason,
        detail: outcome.detail,
        hcost_bits: outcome.hcost_bits,
        vcost_bits: outcome.vcost_bits,
        wall_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KindStats {
    pub attack: String,
    pub trials: u64,
    pub no_op: u64,
    pub accepted: u64,
    /// Rejections by reason, in a fixed order.
    pub rejected: std::collections::BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub n: usize,
    pub variant: Variant,
    pub app: String,
    pub modulus: u64,
    pub deg_p: usize,
    pub deg_q: usize,
    pub trials: u64,
    /// Per-trial acceptance bound `(D_P + D_Q) / q`.
    pub bound_rate: f64,
    pub accepted: u64,
    /// Live (non-no-op) attacked trials.
    pub live: u64,
    /// `accepted ≤ live·p + 3·sqrt(live·p·(1-p))` for `p = bound_rate`.
    pub within_bound: bool,
    pub kinds: Vec<KindStats>,
}

/// `trials` attacked runs, cycling through every attack kind; trial `t`
/// uses seed `seed + t` for its stream, attack and verifier.
pub fn cmd_attack_suite(cfg: &RunConfig, trials: u64) -> Result<AttackReport, CliError> {
    cfg.validate()?;
    let probe_m = cfg.m_factor.saturating_mul(cfg.n as u64);
    let scheme = cfg.scheme_config(probe_m);
    let params = match cfg.app {
        AppName::Finf => finf_params(&scheme)?,
        _ => SchemeParams::new(&scheme, &cfg.g(scheme.m_cap)?)?,
    };
    let records = map_range(cfg.exec, trials as usize, |t| {
        let trial = RunConfig {
            seed: cfg.seed.wrapping_add(t as u64),
            attack: Some(Attack::ALL[t % Attack::ALL.len()]),
            exec: Exec::Sequential,
            timing: false,
            ..cfg.clone()
        };
        cmd_run(&trial)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut kinds: Vec<KindStats> = Vec::new();
    if trials > 0 {
        kinds = Attack::ALL
            .iter()
            .map(|a| KindStats {
                attack: a.to_string(),
                ..KindStats::default()
            })
            .collect();
    }
    for (t, r) in records.iter().enumerate() {
        let k = &mut kinds[t % Attack::ALL.len()];
        k.trials += 1;
        if r.attack_no_op {
            k.no_op += 1;
        } else if r.result.is_some() {
            k.accepted += 1;
        } else {
            let reason = serde_json::to_value(r.reject_reason)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_else(|| "unknown".into());
            *k.rejected.entry(reason).or_default() += 1;
        }
    }
    let accepted: u64 = kinds.iter().map(|k| k.accepted).sum();
    let live: u64 = kinds.iter().map(|k| k.trials - k.no_op).sum();
    let p = (params.deg_p + params.deg_q) as f64 / params.field.modulus() as f64;
    let mean = live as f64 * p;
    let slack = 3.0 * (live as f64 * p * (1.0 - p)).sqrt();
    Ok(AttackReport {
        n: cfg.n,
        variant: cfg.variant,
        app: cfg.app.to_string(),
        modulus: params.field.modulus(),
        deg_p: params.deg_p,
        deg_q: params.deg_q,
        trials,
        bound_rate: p,
        accepted,
        live,
        within_bound: accepted as f64 <= mean + slack,
        kinds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub n: usize,
    pub hcost_bits: u64,
    pub vcost_bits: u64,
    pub hcost_norm: f64,
    pub vcost_norm: f64,
    /// Also `m` so callers can compare against `n·⌈log₂ m⌉`.
    pub m: usize,
    pub matched: bool,
}

/// `n^{2/3} · log₂ n`.
pub fn scale_norm(n: usize) -> f64 {
    let n = n as f64;
    n.powf(2.0 / 3.0) * n.log2()
}

/// Honest runs for each `n`, in the given order.
pub fn cmd_scale(ns: &[usize], template: &RunConfig) -> Result<Vec<ScaleRow>, CliError> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err("n list must be strictly ascending"));
    }
    ns.iter()
        .map(|&n| {
            let cfg = RunConfig {
                n,
                attack: None,
                ..template.clone()
            };
            let r = cmd_run(&cfg)?;
            let norm = scale_norm(n);
            Ok(ScaleRow {
                n,
                hcost_bits: r.hcost_bits,
                vcost_bits: r.vcost_bits,
                hcost_norm: r.hcost_bits as f64 / norm,
                vcost_norm: r.vcost_bits as f64 / norm,
                m: r.m,
                matched: r.matched,
            })
        })
        .collect()
}

pub const SCALE_HEADER: &str = "n,hcost_bits,vcost_bits,hcost_norm,vcost_norm";

pub fn scale_csv(rows: &[ScaleRow]) -> String {
    let mut out = String::from(SCALE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.4}\n",
            r.n, r.hcost_bits, r.vcost_bits, r.hcost_norm, r.vcost_norm
        ));
    }
    out
}

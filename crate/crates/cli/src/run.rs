//! Executes a [`RunConfig`] and writes CSV tables plus `manifest.txt`.
//!
//! Everything is sequential and free of randomness, so identical configs give
//! byte-identical CSV files; only the manifest's duration line varies.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use stargraph::measure::{moment_sum, MomentMode};
use stargraph::spectrum::{first_eigenvalue_in_window, separation_holds};
use stargraph::{
    entropy_asymptotic, entropy_from_moments, fractal_exponent_estimate, ground_state_exponent,
    ground_state_exponent_limit, measure_at, mellin_closed_form_of, mellin_numeric, renormalized_moment_sum,
    renyi_entropy, solve_spectrum, stability_check, symmetry_check, zeta_graph_finite, zeta_graph_limit,
    BondFamily, LengthFunction, ScanSchedule, StarGraph, ZetaEvaluation,
};

use crate::config::{Command, ConfigError, MomentSource, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A library failure, with the parameters that triggered it.
    Numerical { context: String, source: stargraph::Error },
    /// The run refused to produce rows (e.g. overlapping clusters).
    Refused(String),
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical { .. } | RunError::Refused(_) => 3,
            RunError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Numerical { context, source } => write!(f, "numerical failure ({context}): {source}"),
            RunError::Refused(msg) => write!(f, "numerical failure: {msg}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

trait Context<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, RunError>;
}

impl<T> Context<T> for stargraph::Result<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, RunError> {
        self.map_err(|source| RunError::Numerical {
            context: context(),
            source,
        })
    }
}

/// 17 significant digits, `.` decimal point.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Table {
    name: &'static str,
    header: &'static str,
    rows: Vec<String>,
}

impl Table {
    fn new(name: &'static str, header: &'static str) -> Self {
        Self {
            name,
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    fn body(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

const SPECTRUM_HEADER: &str = "k,m,interval_index,sigma_raw,sigma,residual";
const ENTROPY_HEADER: &str = "v,m,k,q,M_q,M_1,H_q,H_over_logv";
const ZETA_HEADER: &str = "kind,s_or_q,value,tail_bound,truncation";
const MELLIN_HEADER: &str = "v,s_or_q,mellin_value,ratio,entropy_asymptotic";
const SYMMETRY_HEADER: &str = "q,lhs,rhs,residual";

#[derive(Debug, Clone, PartialEq)]
pub struct FileRecord {
    pub name: String,
    /// Data rows, header excluded.
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub command: Command,
    pub config: Vec<(String, String)>,
    pub duration_seconds: f64,
    pub files: Vec<FileRecord>,
    /// Derived scalars such as exponent slopes, `key = value`.
    pub summary: Vec<(String, String)>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("# stargraph run manifest\n");
        s.push_str(&format!("version = {}\n", self.version));
        s.push_str(&format!("command = {}\n", self.command.as_str()));
        s.push_str(&format!("duration_seconds = {:.6}\n", self.duration_seconds));
        s.push_str("\n[config]\n");
        for (k, v) in &self.config {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s.push_str("\n[files]\n");
        for f in &self.files {
            s.push_str(&format!("{} rows = {} sha256 = {}\n", f.name, f.rows, f.sha256));
        }
        s.push_str("\n[summary]\n");
        for (k, v) in &self.summary {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

struct Output {
    tables: Vec<Table>,
    summary: Vec<(String, String)>,
}

pub fn run(config: &RunConfig) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    let out = match config.command {
        Command::Spectrum => spectrum(config)?,
        Command::Entropy => entropy(config)?,
        Command::SemiclassicalScan => semiclassical_scan(config)?,
        Command::GroundState => ground_state(config)?,
        Command::Symmetry => symmetry(config)?,
        Command::MellinCheck => mellin_check(config)?,
    };
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut files = Vec::with_capacity(out.tables.len());
    for t in &out.tables {
        let body = t.body();
        write(&dir.join(t.name), &body)?;
        files.push(FileRecord {
            name: t.name.to_string(),
            rows: t.rows.len(),
            sha256: format!("{:x}", Sha256::digest(body.as_bytes())),
        });
    }
    let manifest = RunManifest {
        version: VERSION.to_string(),
        command: config.command,
        config: config.echo.clone(),
        duration_seconds: start.elapsed().as_secs_f64(),
        files,
        summary: out.summary,
    };
    write(&dir.join("manifest.txt"), &manifest.render())?;
    Ok(manifest)
}

fn write(path: &Path, body: &str) -> Result<(), RunError> {
    fs::write(path, body).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn graph(config: &RunConfig, v: usize, epsilon: f64) -> Result<StarGraph<f64>, RunError> {
    StarGraph::new(config.family, v, config.base_length, epsilon, config.coupling_inverse)
        .at(|| format!("graph v = {v}, epsilon = {epsilon}"))
}

fn log_v_ratio(h: f64, v: usize) -> Option<f64> {
    (v > 1).then(|| h / (v as f64).ln())
}

fn spectrum(config: &RunConfig) -> Result<Output, RunError> {
    let g = graph(config, config.v, config.epsilon_for(config.v))?;
    let eig = solve_spectrum(&g, config.k_min, config.k_max)
        .at(|| format!("spectrum on ({}, {})", config.k_min, config.k_max))?;
    let mut t = Table::new("spectrum.csv", SPECTRUM_HEADER);
    let mut worst = 0.0f64;
    for e in &eig {
        t.push(&[
            num(e.k),
            e.m.to_string(),
            e.interval_index.to_string(),
            num(e.sigma_raw),
            opt_num(e.sigma),
            num(e.residual),
        ]);
        worst = worst.max(e.residual.abs());
    }
    Ok(Output {
        summary: vec![
            ("eigenvalues".into(), eig.len().to_string()),
            ("max_abs_residual".into(), num(worst)),
        ],
        tables: vec![t],
    })
}

fn entropy(config: &RunConfig) -> Result<Output, RunError> {
    let v = config.v;
    let g = graph(config, v, config.epsilon_for(v))?;
    let eig = solve_spectrum(&g, config.k_min, config.k_max)
        .at(|| format!("spectrum on ({}, {})", config.k_min, config.k_max))?;
    let mut t = Table::new("entropy.csv", ENTROPY_HEADER);
    for e in &eig {
        let m1 = moment_sum(&g, e.k, 1.0, MomentMode::Exact).at(|| format!("M_1 at k = {}", e.k))?;
        for &q in &config.q {
            let (mq, h) = if q == 1.0 {
                let mu = measure_at(&g, e.k).at(|| format!("measure at k = {}", e.k))?;
                (m1, renyi_entropy(&mu, 1.0).at(|| format!("Shannon entropy at k = {}", e.k))?)
            } else {
                let mq = moment_sum(&g, e.k, q, MomentMode::Exact).at(|| format!("M_{q} at k = {}", e.k))?;
                (mq, entropy_from_moments(&mq, &m1, q).at(|| format!("H_{q} at k = {}", e.k))?)
            };
            t.push(&[
                v.to_string(),
                e.m.to_string(),
                num(e.k),
                num(q),
                num(mq.m_q),
                num(m1.m_q),
                num(h),
                opt_num(log_v_ratio(h, v)),
            ]);
        }
    }
    Ok(Output {
        summary: vec![("eigenvalues".into(), eig.len().to_string())],
        tables: vec![t],
    })
}

fn schedule(config: &RunConfig) -> ScanSchedule<f64> {
    let mut s = ScanSchedule::default_for(&config.family);
    if let Some(p) = config.v_power {
        s.v_power = p;
    }
    if let Some(a) = config.epsilon_exponent {
        s.eps_exponent = a;
    }
    s
}

fn semiclassical_scan(config: &RunConfig) -> Result<Output, RunError> {
    let sched = schedule(config);
    let l = config.base_length;
    let mut t = Table::new("entropy.csv", ENTROPY_HEADER);
    let mut points: Vec<Vec<(usize, f64)>> = vec![Vec::new(); config.q.len()];
    for &v in &config.v_schedule {
        let m = sched.m_of_v(v);
        let eps = sched.epsilon_of_v(v);
        let ell = config.family.lengths(v).at(|| format!("lengths at v = {v}"))?;
        let ell_v = ell.last().copied().unwrap_or(0.0);
        if !separation_holds(m, eps, ell_v) {
            return Err(RunError::Refused(format!(
                "clusters overlap at v = {v}, m = {m}, epsilon = {eps:e}: (m+1)·ε·ℓ_v = {:e} exceeds {}",
                (m + 1) as f64 * eps * ell_v,
                stargraph::spectrum::SEPARATION_LIMIT
            )));
        }
        let rows: Vec<(f64, _, _)> = match config.moments {
            MomentSource::Renormalized => {
                let k = (m as f64 + 0.5) * std::f64::consts::PI / l + config.sigma * m as f64 * eps / (l * l);
                let m1 = renormalized_moment_sum(&ell, config.base_index, config.sigma, 1.0)
                    .at(|| format!("M_1 at v = {v}, sigma = {}", config.sigma))?;
                let mut rows = Vec::new();
                for &q in &config.q {
                    let mq = renormalized_moment_sum(&ell, config.base_index, config.sigma, q)
                        .at(|| format!("M_{q} at v = {v}, sigma = {}", config.sigma))?;
                    rows.push((k, mq, m1));
                }
                rows
            }
            MomentSource::Exact => {
                let g = graph(config, v, eps)?;
                let e = first_eigenvalue_in_window(&g, m).at(|| format!("first eigenvalue of cluster {m} at v = {v}"))?;
                let m1 = moment_sum(&g, e.k, 1.0, MomentMode::Exact).at(|| format!("M_1 at v = {v}"))?;
                let mut rows = Vec::new();
                for &q in &config.q {
                    let mq = moment_sum(&g, e.k, q, MomentMode::Exact).at(|| format!("M_{q} at v = {v}"))?;
                    rows.push((e.k, mq, m1));
                }
                rows
            }
        };
        for (qi, (&q, (k, mq, m1))) in config.q.iter().zip(rows).enumerate() {
            let h = entropy_from_moments(&mq, &m1, q).at(|| format!("H_{q} at v = {v}"))?;
            points[qi].push((v, h));
            t.push(&[
                v.to_string(),
                m.to_string(),
                num(k),
                num(q),
                num(mq.m_q),
                num(m1.m_q),
                num(h),
                opt_num(log_v_ratio(h, v)),
            ]);
        }
    }
    let mut summary = vec![
        ("schedule_v_power".into(), num(sched.v_power)),
        ("schedule_epsilon_exponent".into(), num(sched.eps_exponent)),
    ];
    for (&q, pts) in config.q.iter().zip(&points) {
        let value = match fractal_exponent_estimate(pts) {
            Ok(slope) => num(slope),
            Err(e) => format!("unavailable ({e})"),
        };
        summary.push((format!("slope_q{q}"), value));
    }
    Ok(Output {
        tables: vec![t],
        summary,
    })
}

fn zeta_row(t: &mut Table, z: &ZetaEvaluation<f64>) {
    t.push(&[
        z.kind.as_str().to_string(),
        num(z.s),
        num(z.value),
        num(z.tail_bound),
        z.truncation.map(|n| n.to_string()).unwrap_or_default(),
    ]);
}

fn ground_state(config: &RunConfig) -> Result<Output, RunError> {
    let v = config.v;
    let eps = config.epsilon_for(v);
    let g = graph(config, v, eps)?;
    let l = config.base_length;
    let mut t = Table::new("entropy.csv", ENTROPY_HEADER);
    let mut z = Table::new("zeta.csv", ZETA_HEADER);
    let mut summary = Vec::new();
    for &sigma0 in &config.sigma0 {
        let k0 = std::f64::consts::FRAC_PI_2 / l + sigma0;
        let m1 = moment_sum(&g, k0, 1.0, MomentMode::GroundState).at(|| format!("M_1 at sigma0 = {sigma0}"))?;
        for &q in &config.q {
            let mq = moment_sum(&g, k0, q, MomentMode::GroundState).at(|| format!("M_{q} at sigma0 = {sigma0}"))?;
            let h = entropy_from_moments(&mq, &m1, q).at(|| format!("H_{q} at sigma0 = {sigma0}"))?;
            t.push(&[
                v.to_string(),
                "0".into(),
                num(k0),
                num(q),
                num(mq.m_q),
                num(m1.m_q),
                num(h),
                opt_num(log_v_ratio(h, v)),
            ]);
        }
    }
    zeta_row(&mut z, &zeta_graph_finite(&g, 2.0));
    for &q in &config.q {
        zeta_row(&mut z, &zeta_graph_finite(&g, 2.0 * q));
        let d = ground_state_exponent(&g, q).at(|| format!("ground-state exponent at q = {q}"))?;
        summary.push((format!("D_q_finite_q{q}"), num(d)));
        if q > 0.5 {
            match (
                zeta_graph_limit(&config.family, 2.0 * q, config.tol),
                ground_state_exponent_limit(&config.family, q, config.tol),
            ) {
                (Ok(zl), Ok(dl)) => {
                    zeta_row(&mut z, &zl);
                    summary.push((format!("D_q_limit_q{q}"), num(dl)));
                }
                (Err(e), _) | (_, Err(e)) => summary.push((format!("D_q_limit_q{q}"), format!("unavailable ({e})"))),
            }
        }
    }
    // the normalizing ζ_G(2) of the limiting exponent
    if config.q.iter().any(|&q| q > 0.5) {
        if let Ok(zl) = zeta_graph_limit(&config.family, 2.0, config.tol) {
            zeta_row(&mut z, &zl);
        }
    }
    Ok(Output {
        tables: vec![t, z],
        summary,
    })
}

fn symmetry(config: &RunConfig) -> Result<Output, RunError> {
    let mut t = Table::new("symmetry.csv", SYMMETRY_HEADER);
    let mut worst = 0.0f64;
    for &q in &config.q {
        let c = symmetry_check(q).at(|| format!("symmetry at q = {q}"))?;
        worst = worst.max(c.residual);
        t.push(&[num(q), num(c.lhs), num(c.rhs), num(c.residual)]);
    }
    Ok(Output {
        tables: vec![t],
        summary: vec![("max_residual".into(), num(worst))],
    })
}

fn mellin_check(config: &RunConfig) -> Result<Output, RunError> {
    let family: &BondFamily<f64> = &config.family;
    let i = config.base_index;
    let mut t = Table::new("mellin.csv", MELLIN_HEADER);
    let mut worst_quad = 0.0f64;
    let closed = |v: usize, s: f64| -> Result<(LengthFunction<f64>, f64), RunError> {
        let f = LengthFunction::new(family, v, i).at(|| format!("length function v = {v}, base {i}"))?;
        let m = mellin_closed_form_of(&f, s).at(|| format!("Mellin transform v = {v}, s = {s}"))?;
        Ok((f, m.value))
    };
    for &v in &config.v_schedule {
        for &s in &config.s {
            let (f, value) = closed(v, s)?;
            let (_, next) = closed(v + 1, s)?;
            let ratio = (value > 0.0 && next > 0.0 && value != 1.0).then(|| next.ln() / value.ln());
            let quad = mellin_numeric(&f, s, config.tol).at(|| format!("Mellin quadrature v = {v}, s = {s}"))?;
            worst_quad = worst_quad.max(((quad.value - value) / value).abs());
            let q = s / 2.0;
            let asym = if q > 0.0 && q != 1.0 && v >= 3 {
                Some(
                    entropy_asymptotic(family, q, v, config.sigma)
                        .at(|| format!("entropy asymptotic v = {v}, q = {q}"))?,
                )
            } else {
                None
            };
            t.push(&[v.to_string(), num(s), num(value), opt_num(ratio), opt_num(asym)]);
        }
    }
    let mut summary = vec![("max_rel_quadrature_vs_closed_form".into(), num(worst_quad))];
    if config.v_schedule.iter().all(|&v| v >= 4) {
        for &s in &config.s {
            let flag = match stability_check(family, s, &config.v_schedule) {
                Ok(r) => match r.plausible {
                    Some(true) => "plausible".to_string(),
                    Some(false) => "not_plausible".to_string(),
                    None => "insufficient_points".to_string(),
                },
                Err(e) => format!("unavailable ({e})"),
            };
            summary.push((format!("stability_s{s}"), flag));
        }
    }
    Ok(Output {
        tables: vec![t],
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn table_body_uses_lf() {
        let mut t = Table::new("x.csv", "a,b");
        t.push(&["1".into(), "2".into()]);
        assert_eq!(t.body(), "a,b\n1,2\n");
    }

    #[test]
    fn exit_codes() {
        let cfg = ConfigError {
            line: None,
            field: "L".into(),
            message: "bad".into(),
        };
        assert_eq!(RunError::Config(cfg).exit_code(), 2);
        assert_eq!(RunError::Refused("x".into()).exit_code(), 3);
    }
}

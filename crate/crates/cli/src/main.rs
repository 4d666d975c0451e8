//! Command line front end: orbit integration, point maps, the closed-form
//! regularized flow, verification suites, and the bracket table.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use keplergls::gls::{
    delaunay_flow, delaunay_hamiltonian, gls_inverse, gls_map, s_inverse, DelaunayPoint,
};
use keplergls::kepler::{
    energy_momentum, kepler_flow, KeplerParams, PhasePointE,
};
use keplergls::moser::{moser_lift_inv, parabolic_lift, rho_for_energy, CotangentEPoint};
use keplergls::numerics::{Signature, Vec3};
use keplergls::symmetry::poisson_table_check;
use keplergls::verify::{run_suite, Execution, VerifyConfig};

#[derive(Parser)]
#[command(name = "keplergls", version, about = "Kepler regularization pipeline tools")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Plain-text key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    k: Option<f64>,
    #[arg(long = "R", global = true)]
    big_r: Option<f64>,
    #[arg(long, global = true)]
    l: Option<f64>,
    /// Integrator tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override of the per-suite sample counts.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run suites on a single worker.
    #[arg(long, global = true, default_value_t = false)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a Kepler orbit and emit a trajectory CSV.
    Integrate {
        /// Initial position "x,y,z".
        #[arg(long, allow_hyphen_values = true, default_value = "1,0,0")]
        r: String,
        /// Initial momentum "x,y,z".
        #[arg(long, allow_hyphen_values = true, default_value = "0,1,0")]
        p: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 6.283185307179586)]
        t_final: f64,
        #[arg(long, default_value_t = 100)]
        n_samples: usize,
    },
    /// Apply a point map to a CSV of points, appending residual columns.
    Map {
        #[arg(long)]
        which: String,
        /// Input CSV (phase rows rx..pz, or om1..w4,zeta for gls-inverse).
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit the closed-form regularized flow through one phase point.
    Flow {
        #[arg(long, allow_hyphen_values = true, default_value = "1,0,0")]
        r: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,1,0")]
        p: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 6.283185307179586)]
        s_final: f64,
        #[arg(long, default_value_t = 100)]
        n_samples: usize,
    },
    /// Run verification suites and emit a JSON report.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Evaluate the 15-entry bracket table at one phase point.
    Brackets {
        #[arg(long, allow_hyphen_values = true, default_value = "1,0,0")]
        r: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,1,0")]
        p: String,
    },
}

struct Settings {
    params: KeplerParams,
    tol: f64,
    seed: u64,
    samples: Option<usize>,
    out: Option<PathBuf>,
    exec: Execution,
}

fn usage_err(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_settings(c: &Common) -> Result<Settings, String> {
    let mut kv = std::collections::HashMap::new();
    if let Some(path) = &c.config {
        let text = fs::read_to_string(path).map_err(|e| format!("config {path:?}: {e}"))?;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| format!("config line without '=': {line}"))?;
            kv.insert(key.trim().to_string(), val.trim().to_string());
        }
    }
    let getf = |name: &str, flag: Option<f64>, default: f64| -> Result<f64, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match kv.get(name) {
            Some(s) => s.parse().map_err(|_| format!("config {name}: bad number '{s}'")),
            None => Ok(default),
        }
    };
    let m = getf("m", c.m, 1.0)?;
    let k = getf("k", c.k, 1.0)?;
    let big_r = getf("R", c.big_r, 1.0)?;
    let l = getf("l", c.l, 2.0 * m * m * k)?;
    let tol = getf("tol", c.tol, 1e-11)?;
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err("tol must lie in (0, 1e-3]".into());
    }
    let seed = if let Some(s) = c.seed {
        s
    } else {
        match kv.get("seed") {
            Some(s) => s.parse().map_err(|_| format!("config seed: bad integer '{s}'"))?,
            None => 42,
        }
    };
    let samples = if c.samples.is_some() {
        c.samples
    } else {
        match kv.get("samples") {
            Some(s) => Some(s.parse().map_err(|_| format!("config samples: bad integer '{s}'"))?),
            None => None,
        }
    };
    let out = c.out.clone().or_else(|| kv.get("out").map(PathBuf::from));
    let params = KeplerParams::new(m, k, big_r, l).map_err(|e| e.to_string())?;
    Ok(Settings {
        params,
        tol,
        seed,
        samples,
        out,
        exec: if c.sequential { Execution::Sequential } else { Execution::Parallel },
    })
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.trim().parse().map_err(|_| format!("bad number '{p}'"))?;
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| format!("write {path:?}: {e}")),
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| e.to_string())
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn cmd_integrate(s: &Settings, x0: PhasePointE, t_final: f64, n: usize) -> Result<String, String> {
    let mut body = String::from("t,rx,ry,rz,px,py,pz,E,Lx,Ly,Lz,ex,ey,ez\n");
    let steps = n.max(1);
    let mut x = x0;
    let mut t = 0.0;
    for i in 0..steps {
        let ti = if steps == 1 { 0.0 } else { t_final * i as f64 / (steps - 1) as f64 };
        if ti > t {
            x = kepler_flow(x, ti - t, s.tol, &s.params).map_err(|e| e.to_string())?;
            t = ti;
        }
        let em = energy_momentum(x, &s.params).map_err(|e| e.to_string())?;
        let row = [
            ti, x.r.x, x.r.y, x.r.z, x.p.x, x.p.y, x.p.z, em.energy,
            em.angular_momentum.x, em.angular_momentum.y, em.angular_momentum.z,
            em.eccentricity.x, em.eccentricity.y, em.eccentricity.z,
        ];
        body.push_str(&row.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(","));
        body.push('\n');
    }
    Ok(body)
}

fn branch_of(x: PhasePointE, params: &KeplerParams) -> Result<Signature, String> {
    let em = energy_momentum(x, params).map_err(|e| e.to_string())?;
    if em.energy.abs() <= params.zero_energy_threshold() {
        return Err("zero-energy point".into());
    }
    Ok(if em.energy < 0.0 { Signature::Elliptic } else { Signature::Hyperbolic })
}

/// Parse numeric CSV rows, skipping a header line and blanks.
fn numeric_rows(text: &str, width: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == width => rows.push(v),
            Ok(v) => return Err(format!("row {}: expected {width} columns, got {}", i + 1, v.len())),
            Err(_) if i == 0 => continue, // header
            Err(e) => return Err(format!("row {}: {e}", i + 1)),
        }
    }
    Ok(rows)
}

fn q_row(state: &[f64], zeta: f64, quadric: f64, tangency: f64) -> String {
    let mut cols: Vec<String> = state.iter().map(|v| fmt(*v)).collect();
    cols.push(fmt(zeta));
    cols.push(fmt(quadric));
    cols.push(fmt(tangency));
    cols.push(String::new());
    cols.join(",")
}

fn cmd_map(s: &Settings, which: &str, input: &PathBuf) -> Result<(String, usize), String> {
    let text = fs::read_to_string(input).map_err(|e| format!("read {input:?}: {e}"))?;
    let mut warnings = 0usize;
    let q_header = "om1,om2,om3,om4,w1,w2,w3,w4,zeta,quadric_residual,tangency_residual,error\n";
    let e_header = "rx,ry,rz,px,py,pz,res1,res2,error\n";
    let mut body = String::new();

    match which {
        "moser" | "s" | "gls" => {
            body.push_str(q_header);
            for row in numeric_rows(&text, 6)? {
                let x = PhasePointE::from_state(&row);
                let mapped = branch_of(x, &s.params).and_then(|sig| match which {
                    "moser" => {
                        let em = energy_momentum(x, &s.params).map_err(|e| e.to_string())?;
                        let rho = rho_for_energy(em.energy, &s.params).map_err(|e| e.to_string())?;
                        let q = moser_lift_inv(x, rho, sig).map_err(|e| e.to_string())?;
                        let st = [
                            q.om.v3.x, q.om.v3.y, q.om.v3.z, q.om.h,
                            q.w.v3.x, q.w.v3.y, q.w.v3.z, q.w.h,
                        ];
                        Ok(q_row(&st, sig.zeta(), q.quadric_residual(), q.tangency_residual()))
                    }
                    "s" => {
                        let q = s_inverse(x, &s.params, sig).map_err(|e| e.to_string())?;
                        Ok(q_row(&q.to_state(), sig.zeta(), q.quadric_residual(&s.params), q.tangency_residual()))
                    }
                    _ => {
                        let q = gls_map(x, &s.params).map_err(|e| e.to_string())?;
                        Ok(q_row(&q.to_state(), sig.zeta(), q.quadric_residual(&s.params), q.tangency_residual()))
                    }
                });
                match mapped {
                    Ok(row) => body.push_str(&row),
                    Err(e) => {
                        warnings += 1;
                        body.push_str(&format!(",,,,,,,,,,,{}", e.replace(',', ";")));
                    }
                }
                body.push('\n');
            }
        }
        "gls-inverse" => {
            body.push_str(e_header);
            for row in numeric_rows(&text, 9)? {
                let sig = Signature::from_zeta(row[8])
                    .ok_or_else(|| format!("zeta column must be +1 or -1, got {}", row[8]))?;
                let q = DelaunayPoint::from_state(&row[0..8], sig);
                match gls_inverse(&q, &s.params) {
                    Ok(x) => {
                        let st = x.to_state();
                        let mut cols: Vec<String> = st.iter().map(|v| fmt(*v)).collect();
                        // residuals: reconstruction of the input through the forward map
                        let rt = gls_map(x, &s.params)
                            .map(|q2| {
                                q2.to_state()
                                    .iter()
                                    .zip(q.to_state().iter())
                                    .map(|(a, b)| (a - b).abs())
                                    .fold(0.0f64, f64::max)
                            })
                            .unwrap_or(f64::INFINITY);
                        cols.push(fmt(rt));
                        cols.push(fmt(0.0));
                        cols.push(String::new());
                        body.push_str(&cols.join(","));
                    }
                    Err(e) => {
                        warnings += 1;
                        body.push_str(&format!(",,,,,,,,{}", e.to_string().replace(',', ";")));
                    }
                }
                body.push('\n');
            }
        }
        "parabolic" => {
            body.push_str("om1,om2,om3,w1,w2,w3,res1,res2,error\n");
            for row in numeric_rows(&text, 6)? {
                let x = PhasePointE::from_state(&row);
                match parabolic_lift(x, s.params.l) {
                    Ok(CotangentEPoint { om, w }) => {
                        // involution residual
                        let rt = keplergls::moser::parabolic_lift_inv(&CotangentEPoint { om, w }, s.params.l)
                            .map(|x2| {
                                x2.to_state()
                                    .iter()
                                    .zip(x.to_state().iter())
                                    .map(|(a, b)| (a - b).abs())
                                    .fold(0.0f64, f64::max)
                            })
                            .unwrap_or(f64::INFINITY);
                        let cols = [om.x, om.y, om.z, w.x, w.y, w.z, rt, 0.0];
                        body.push_str(&cols.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(","));
                        body.push(',');
                    }
                    Err(e) => {
                        warnings += 1;
                        body.push_str(&format!(",,,,,,,,{}", e.to_string().replace(',', ";")));
                    }
                }
                body.push('\n');
            }
        }
        other => return Err(format!("unknown map '{other}' (moser|s|gls|gls-inverse|parabolic)")),
    }
    Ok((body, warnings))
}

fn cmd_flow(s: &Settings, x0: PhasePointE, s_final: f64, n: usize) -> Result<String, String> {
    let q0 = gls_map(x0, &s.params).map_err(|e| e.to_string())?;
    let mut body = String::from("s,om1,om2,om3,om4,w1,w2,w3,w4,H,Wnorm\n");
    let steps = n.max(1);
    for i in 0..steps {
        let si = if steps == 1 { 0.0 } else { s_final * i as f64 / (steps - 1) as f64 };
        let q = delaunay_flow(&q0, si, &s.params).map_err(|e| e.to_string())?;
        let st = q.to_state();
        let mut cols = vec![fmt(si)];
        cols.extend(st.iter().map(|v| fmt(*v)));
        cols.push(fmt(delaunay_hamiltonian(&q, &s.params)));
        cols.push(fmt(q.w_norm()));
        body.push_str(&cols.join(","));
        body.push('\n');
    }
    Ok(body)
}

fn run() -> ExitCode {
    let cli = Cli::parse();
    let settings = match load_settings(&cli.common) {
        Ok(s) => s,
        Err(e) => return usage_err(&e),
    };

    match &cli.cmd {
        Cmd::Integrate { r, p, t_final, n_samples } => {
            let (r, p) = match (parse_vec3(r), parse_vec3(p)) {
                (Ok(r), Ok(p)) => (r, p),
                (Err(e), _) | (_, Err(e)) => return usage_err(&e),
            };
            match cmd_integrate(&settings, PhasePointE::new(r, p), *t_final, *n_samples) {
                Ok(body) => match emit(&settings.out, &body) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_err(&e),
                },
                Err(e) => {
                    eprintln!("integration failed: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Cmd::Map { which, input } => match cmd_map(&settings, which, input) {
            Ok((body, warnings)) => {
                if warnings > 0 {
                    eprintln!("{warnings} row(s) failed; see the error column");
                }
                match emit(&settings.out, &body) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_err(&e),
                }
            }
            Err(e) => usage_err(&e),
        },
        Cmd::Flow { r, p, s_final, n_samples } => {
            let (r, p) = match (parse_vec3(r), parse_vec3(p)) {
                (Ok(r), Ok(p)) => (r, p),
                (Err(e), _) | (_, Err(e)) => return usage_err(&e),
            };
            match cmd_flow(&settings, PhasePointE::new(r, p), *s_final, *n_samples) {
                Ok(body) => match emit(&settings.out, &body) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_err(&e),
                },
                Err(e) => {
                    eprintln!("flow failed: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Cmd::Check { suite } => {
            let cfg = VerifyConfig {
                seed: settings.seed,
                tol: settings.tol,
                samples: settings.samples,
            };
            match run_suite(suite, &settings.params, &cfg, settings.exec) {
                Ok(reports) => {
                    let body = serde_json::to_string_pretty(&reports).unwrap() + "\n";
                    if emit(&settings.out, &body).is_err() {
                        return ExitCode::from(2);
                    }
                    if reports.iter().all(|r| r.pass) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => usage_err(&e.to_string()),
            }
        }
        Cmd::Brackets { r, p } => {
            let (r, p) = match (parse_vec3(r), parse_vec3(p)) {
                (Ok(r), Ok(p)) => (r, p),
                (Err(e), _) | (_, Err(e)) => return usage_err(&e),
            };
            match poisson_table_check(PhasePointE::new(r, p), &settings.params) {
                Ok(rows) => {
                    let body = serde_json::to_string_pretty(&rows).unwrap() + "\n";
                    match emit(&settings.out, &body) {
                        Ok(()) => ExitCode::SUCCESS,
                        Err(e) => usage_err(&e),
                    }
                }
                Err(e) => {
                    eprintln!("bracket evaluation failed: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn main() -> ExitCode {
    run()
}

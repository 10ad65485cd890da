//! Implementations of the CLI subcommands.

use std::path::Path;

use qudit_teleport::closed_form::{
    classical_fidelity, optimal_phase_fidelity, optimize_phases, phase_fidelity,
    scenario_fidelity, threshold,
};
use qudit_teleport::noise::NoiseKind;
use qudit_teleport::sampling::{mc_average_fidelity, scatter_experiment, McEstimate, RngSeed};
use qudit_teleport::{Dim, MeasurementBasis, SchmidtChannel};
use rayon::prelude::*;

use crate::output::{csv_header, fmt_f64, fmt_opt_f64, jsonl_config, write_atomic, Format};
use crate::spec_parse::NoiseAssignment;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Closed,
    OracleMc,
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(Method::Closed),
            "oracle-mc" => Ok(Method::OracleMc),
            "both" => Ok(Method::Both),
            other => Err(format!(
                "unknown method '{other}' (expected closed, oracle-mc or both)"
            )),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Closed => "closed",
            Method::OracleMc => "oracle-mc",
            Method::Both => "both",
        };
        write!(f, "{s}")
    }
}

fn threshold_line(d: Dim) -> String {
    let f = threshold(NoiseKind::DitFlip, d).unwrap().p_star;
    let dep = threshold(NoiseKind::Depolarizing, d).unwrap().p_star;
    let ad = threshold(NoiseKind::AmplitudeDamping, d).unwrap().p_star;
    format!("thresholds at d={d}: F/P/FP p* = {f}  D p* = {dep}  AD p* = {ad}")
}

/// Per-grid-point seed; splitmix-style spacing keeps streams distinct.
fn point_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub struct FidelityArgs<'a> {
    pub d: Dim,
    pub noise: &'a NoiseAssignment,
    pub gamma: &'a SchmidtChannel,
    pub basis: &'a MeasurementBasis,
    pub gamma_label: String,
    pub basis_label: String,
    pub method: Method,
    pub n_samples: usize,
    pub seed: u64,
}

pub fn cmd_fidelity(args: &FidelityArgs) -> Result<(), CliError> {
    let scenario = args.noise.fixed_scenario()?;
    let f_c = classical_fidelity(args.d);
    println!("d        = {}", args.d);
    println!("scenario = {scenario}");
    println!("gamma    = {}", args.gamma_label);
    println!("basis    = {}", args.basis_label);
    println!("method   = {}", args.method);
    println!("f_C      = {}", fmt_f64(f_c));

    let mut headline = None;
    if args.method != Method::OracleMc {
        let f = scenario_fidelity(args.basis, args.gamma, &scenario)?;
        println!("closed fidelity = {}", fmt_f64(f));
        headline = Some(f);
    }
    if args.method != Method::Closed {
        let est = mc_average_fidelity(
            args.gamma,
            args.basis,
            &scenario,
            args.n_samples,
            RngSeed(args.seed),
        )?;
        println!(
            "mc fidelity     = {} ± {}  (n = {}, seed = {})",
            fmt_f64(est.mean),
            fmt_f64(est.std_error),
            est.n_samples,
            args.seed
        );
        headline.get_or_insert(est.mean);
    }
    let f = headline.expect("at least one method ran");
    println!(
        "above classical: {}",
        if f > f_c { "yes" } else { "no" }
    );
    println!("{}", threshold_line(args.d));
    Ok(())
}

pub struct SweepArgs<'a> {
    pub d: Dim,
    pub noise: &'a NoiseAssignment,
    pub gamma: &'a SchmidtChannel,
    pub basis: &'a MeasurementBasis,
    pub gamma_label: String,
    pub basis_label: String,
    pub method: Method,
    pub n_samples: usize,
    pub seed: u64,
    pub format: Format,
}

struct SweepRow {
    p: [f64; 3],
    fidelity: f64,
    std_error: Option<f64>,
    mc_fidelity: Option<f64>,
    mc_std_error: Option<f64>,
    f_c: f64,
    above_classical: bool,
}

pub fn cmd_sweep(args: &SweepArgs, out: &Path) -> Result<(), CliError> {
    if args.noise.swept_axes() == 0 {
        return Err(CliError::Usage(
            "sweep needs at least one swept axis (KIND:start:stop:steps)".into(),
        ));
    }
    let axes: Vec<Vec<f64>> = args.noise.axes.iter().map(|a| a.values()).collect();
    let n_points = axes[0].len() * axes[1].len() * axes[2].len();
    let f_c = classical_fidelity(args.d);

    // grid-index order: I outermost, then A, then B
    let index_to_p = |idx: usize| -> [f64; 3] {
        let nb = axes[2].len();
        let na = axes[1].len();
        let ib = idx % nb;
        let ia = (idx / nb) % na;
        let ii = idx / (nb * na);
        [axes[0][ii], axes[1][ia], axes[2][ib]]
    };

    let rows: Result<Vec<SweepRow>, CliError> = (0..n_points)
        .into_par_iter()
        .map(|idx| {
            let p = index_to_p(idx);
            let scenario = args.noise.scenario_at(p)?;
            let closed = if args.method != Method::OracleMc {
                Some(scenario_fidelity(args.basis, args.gamma, &scenario)?)
            } else {
                None
            };
            let mc: Option<McEstimate> = if args.method != Method::Closed {
                Some(mc_average_fidelity(
                    args.gamma,
                    args.basis,
                    &scenario,
                    args.n_samples,
                    RngSeed(point_seed(args.seed, idx as u64)),
                )?)
            } else {
                None
            };
            let (fidelity, std_error, mc_fidelity, mc_std_error) = match args.method {
                Method::Closed => (closed.unwrap(), None, None, None),
                Method::OracleMc => {
                    let est = mc.unwrap();
                    (est.mean, Some(est.std_error), None, None)
                }
                Method::Both => {
                    let est = mc.unwrap();
                    (closed.unwrap(), None, Some(est.mean), Some(est.std_error))
                }
            };
            Ok(SweepRow {
                p,
                fidelity,
                std_error,
                mc_fidelity,
                mc_std_error,
                f_c,
                above_classical: fidelity > f_c,
            })
        })
        .collect();
    let rows = rows?;

    let noise_echo = format!(
        "I={}:{};A={}:{};B={}:{}",
        args.noise.kinds[0],
        args.noise.axes[0],
        args.noise.kinds[1],
        args.noise.axes[1],
        args.noise.kinds[2],
        args.noise.axes[2]
    );
    let fields = [
        ("d", args.d.to_string()),
        ("noise", noise_echo),
        ("gamma", args.gamma_label.clone()),
        ("basis", args.basis_label.clone()),
        ("method", args.method.to_string()),
        ("seed", args.seed.to_string()),
        ("n_samples", args.n_samples.to_string()),
        ("points", n_points.to_string()),
    ];

    let mut text = String::new();
    match args.format {
        Format::Csv => {
            text.push_str(&csv_header("sweep", &fields));
            let extra = if args.method == Method::Both {
                ",mc_fidelity,mc_std_error"
            } else {
                ""
            };
            text.push_str(&format!(
                "p_i,p_a,p_b,fidelity,std_error,f_c,above_classical{extra}\n"
            ));
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}",
                    fmt_f64(r.p[0]),
                    fmt_f64(r.p[1]),
                    fmt_f64(r.p[2]),
                    fmt_f64(r.fidelity),
                    fmt_opt_f64(r.std_error),
                    fmt_f64(r.f_c),
                    r.above_classical
                ));
                if args.method == Method::Both {
                    text.push_str(&format!(
                        ",{},{}",
                        fmt_opt_f64(r.mc_fidelity),
                        fmt_opt_f64(r.mc_std_error)
                    ));
                }
                text.push('\n');
            }
        }
        Format::Jsonl => {
            text.push_str(&jsonl_config("sweep", &fields));
            for r in &rows {
                let mut map = serde_json::Map::new();
                map.insert("p_i".into(), r.p[0].into());
                map.insert("p_a".into(), r.p[1].into());
                map.insert("p_b".into(), r.p[2].into());
                map.insert("fidelity".into(), r.fidelity.into());
                if let Some(se) = r.std_error {
                    map.insert("std_error".into(), se.into());
                }
                if let Some(m) = r.mc_fidelity {
                    map.insert("mc_fidelity".into(), m.into());
                }
                if let Some(se) = r.mc_std_error {
                    map.insert("mc_std_error".into(), se.into());
                }
                map.insert("f_c".into(), r.f_c.into());
                map.insert("above_classical".into(), r.above_classical.into());
                text.push_str(&serde_json::Value::Object(map).to_string());
                text.push('\n');
            }
        }
    }
    write_atomic(out, &text)?;
    eprintln!("wrote {n_points} records to {}", out.display());
    Ok(())
}

pub fn cmd_optimize(d: Dim, p: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage(format!("fraction {p} out of [0, 1]")));
    }
    let (phases, value) = optimize_phases(d, p);
    let predicted = optimal_phase_fidelity(d, p);
    let p_star = (d.get() as f64 - 1.0) / d.get() as f64;
    println!("d  = {d}");
    println!("p  = {p}  (threshold p* = {p_star})");
    let phase_list: Vec<String> = phases.iter().map(|x| fmt_f64(*x)).collect();
    println!("optimal phases (canonical) = [{}]", phase_list.join(", "));
    println!("optimal fidelity           = {}", fmt_f64(value));
    println!("piecewise prediction       = {}", fmt_f64(predicted));
    println!("difference                 = {:.3e}", (value - predicted).abs());
    println!(
        "plain-basis fidelity       = {}",
        fmt_f64(phase_fidelity(d, p, &vec![0.0; d.get() - 1]))
    );
    Ok(())
}

pub fn cmd_thresholds(d: Dim) -> Result<(), CliError> {
    println!("f_C = {} at d = {d}", fmt_f64(classical_fidelity(d)));
    for kind in [
        NoiseKind::DitFlip,
        NoiseKind::DPhaseFlip,
        NoiseKind::DitPhaseFlip,
        NoiseKind::Depolarizing,
        NoiseKind::AmplitudeDamping,
    ] {
        let t = threshold(kind, d)?;
        println!("{:>4}: p* = {}", t.kind.to_string(), fmt_f64(t.p_star));
    }
    Ok(())
}

pub fn cmd_scatter(
    d: Dim,
    n: usize,
    seed: u64,
    curve_points: usize,
    format: Format,
    out: &Path,
) -> Result<(), CliError> {
    let data = scatter_experiment(d, n, RngSeed(seed), curve_points)?;
    let fields = [
        ("d", d.to_string()),
        ("n", n.to_string()),
        ("seed", seed.to_string()),
        ("curve_points", curve_points.to_string()),
        ("basis", "max".to_string()),
    ];
    let mut text = String::new();
    match format {
        Format::Csv => {
            text.push_str(&csv_header("scatter", &fields));
            text.push_str("series,param,entanglement,fq_normalized\n");
            for (i, r) in data.records.iter().enumerate() {
                text.push_str(&format!(
                    "sample,{i},{},{}\n",
                    fmt_f64(r.entanglement),
                    fmt_f64(r.fq_normalized)
                ));
            }
            for curve in &data.boundaries {
                for (a, e, fq) in &curve.points {
                    text.push_str(&format!(
                        "boundary:mu={},{},{},{}\n",
                        curve.mu,
                        fmt_f64(*a),
                        fmt_f64(*e),
                        fmt_f64(*fq)
                    ));
                }
            }
        }
        Format::Jsonl => {
            text.push_str(&jsonl_config("scatter", &fields));
            for (i, r) in data.records.iter().enumerate() {
                let v = serde_json::json!({
                    "series": "sample",
                    "param": i,
                    "entanglement": r.entanglement,
                    "fq_normalized": r.fq_normalized,
                });
                text.push_str(&v.to_string());
                text.push('\n');
            }
            for curve in &data.boundaries {
                for (a, e, fq) in &curve.points {
                    let v = serde_json::json!({
                        "series": format!("boundary:mu={}", curve.mu),
                        "param": a,
                        "entanglement": e,
                        "fq_normalized": fq,
                    });
                    text.push_str(&v.to_string());
                    text.push('\n');
                }
            }
        }
    }
    write_atomic(out, &text)?;
    eprintln!(
        "wrote {} samples and {} boundary curves to {}",
        data.records.len(),
        data.boundaries.len(),
        out.display()
    );
    Ok(())
}

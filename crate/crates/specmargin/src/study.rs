//! Standard-normal reference values and the quadrature convergence study.

use std::thread;

use serde::Serialize;
use specmargin_core::measures::{std_normal_es, std_normal_srm, std_normal_var, ConfidenceLevel, RiskAversion};
use specmargin_core::quadrature::{integrate, Method, QuadratureSpec};
use specmargin_core::{measures::spectral_weight, special::normal_quantile};

use crate::error::{AppError, Result, Stage};

pub const TABLE1_LEVELS: [f64; 9] = [0.75, 0.8, 0.85, 0.9, 0.925, 0.95, 0.975, 0.99, 0.995];
pub const TABLE1_AVERSIONS: [f64; 9] = [1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 50.0, 100.0, 500.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub alpha: f64,
    pub var: f64,
    pub es: f64,
    pub k: f64,
    pub srm: f64,
}

/// VaR and ES of the standard normal at each level, next to the spectral
/// measure at each risk aversion.
pub fn table1(quadrature: QuadratureSpec) -> Result<Vec<Table1Row>> {
    let at = |source| AppError::Stage { contract: "table1".into(), stage: Stage::Measures, source };
    TABLE1_LEVELS
        .iter()
        .zip(TABLE1_AVERSIONS)
        .map(|(&alpha, k)| {
            let level = ConfidenceLevel::new(alpha).map_err(at)?;
            let aversion = RiskAversion::new(k).map_err(at)?;
            let srm = std_normal_srm(aversion, quadrature).map_err(at)?;
            Ok(Table1Row {
                alpha,
                var: std_normal_var(level).value,
                es: std_normal_es(level).value,
                k,
                srm: srm.value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub k: RiskAversion,
    pub grid: Vec<usize>,
    pub methods: Vec<Method>,
    /// Seeds for the pseudo-random method; the other methods run once.
    pub seeds: Vec<u64>,
}

impl Default for ConvergenceStudy {
    fn default() -> Self {
        Self {
            k: RiskAversion::new(50.0).expect("positive"),
            grid: (1..=500).map(|i| i * 100).collect(),
            methods: Method::ALL.to_vec(),
            seeds: (0..20).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub method: &'static str,
    pub n: usize,
    /// Empty for the deterministic methods.
    pub seed: Option<u64>,
    pub estimate: f64,
}

/// Standard-normal spectral measure for every (method, N, seed).
pub fn convergence_study(study: &ConvergenceStudy) -> Result<Vec<ConvergenceRow>> {
    let invalid = |msg: &str| Err(AppError::Config(msg.into()));
    if study.grid.is_empty() || study.methods.is_empty() {
        return invalid("convergence study needs a nonempty grid and method list");
    }
    if study.methods.contains(&Method::PseudoMc) && study.seeds.is_empty() {
        return invalid("pseudo-random quadrature needs at least one seed");
    }
    for &method in &study.methods {
        for &n in &study.grid {
            QuadratureSpec { method, slices: n, seed: None }.validate().map_err(|e| AppError::Config(e.to_string()))?;
        }
    }

    let mut tasks: Vec<(Method, Option<u64>)> = Vec::new();
    for &method in &study.methods {
        if method == Method::PseudoMc {
            tasks.extend(study.seeds.iter().map(|&s| (method, Some(s))));
        } else {
            tasks.push((method, None));
        }
    }
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(tasks.len());
    let k = study.k;
    let per_task: Vec<Result<Vec<ConvergenceRow>>> = thread::scope(|scope| {
        let chunks: Vec<_> = tasks
            .chunks(tasks.len().div_ceil(workers))
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|&(method, seed)| {
                            study
                                .grid
                                .iter()
                                .map(|&n| {
                                    let spec = QuadratureSpec { method, slices: n, seed };
                                    let estimate = integrate(|p| spectral_weight(p, k) * -normal_quantile(p), &spec)
                                        .map_err(AppError::stage("convergence", Stage::Measures))?;
                                    Ok(ConvergenceRow { method: method.name(), n, seed, estimate })
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        chunks.into_iter().flat_map(|h| h.join().expect("study thread panicked")).collect()
    });
    let mut rows = Vec::new();
    for r in per_task {
        rows.extend(r?);
    }
    Ok(rows)
}

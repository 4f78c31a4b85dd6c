//! Hopf curves over a feedback grid, method comparisons, and the
//! Erneux-Grasman closed-form check.

use std::thread;

use crate::charsolve::{self, continuation_on_grid, SweepParameter, Target, Truncation};
use crate::ddesim::{detect_hopf_bisection, DetectOptions};
use crate::error::{Error, Result};
use crate::hopf::{self, Branch, ErneuxPairing, HopfPoint, Method};
use crate::systems::{SystemKind, SystemSpec};
use crate::table::{ComparisonRow, CurveRow, CurveTable};

/// Settings for the simulated rows of a curve build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedRows {
    /// Bracket half-width around the exact delay.
    pub half_width: f64,
    pub tol_delay: f64,
    pub detect: DetectOptions,
}

impl Default for SimulatedRows {
    fn default() -> Self {
        SimulatedRows {
            half_width: 0.25,
            tol_delay: 1e-3,
            detect: DetectOptions::default(),
        }
    }
}

/// A grid point a method produced no row for.
#[derive(Debug, Clone, PartialEq)]
pub struct Omission {
    pub method: Method,
    pub branch: Branch,
    pub k: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveBuild {
    pub table: CurveTable,
    pub omitted: Vec<Omission>,
    /// Early stops of the exact continuation, per branch.
    pub truncations: Vec<(Branch, Truncation)>,
}

/// Computes one row per requested method, branch and grid value of `k`.
///
/// Approach I and II rows come from the closed forms. Exact rows are traced
/// by continuation over the grid points above the feedback threshold. If a
/// continuation cannot start at the first such point, it is restarted at the
/// next one. Simulated rows bisect a bracket centred on the exact delay and
/// are therefore only produced where an exact row exists.
pub fn build_hopf_curves(
    template: &SystemSpec,
    ks: &[f64],
    methods: &[Method],
    sim: &SimulatedRows,
) -> Result<CurveBuild> {
    template.validate()?;
    if ks.is_empty() {
        return Err(Error::InvalidInput("empty k grid".into()));
    }
    let mut rows = Vec::new();
    let mut omitted = Vec::new();
    let mut truncations = Vec::new();

    for &method in methods {
        if !matches!(method, Method::ApproachI | Method::ApproachII) {
            continue;
        }
        for &k in ks {
            let spec = template.with_k(k);
            for branch in Branch::BOTH {
                let point = match method {
                    Method::ApproachI => hopf::approach1_point(&spec, branch, 0),
                    _ => hopf::approach2_branch(&spec, branch, 0),
                };
                match point {
                    Ok(p) => rows.push(CurveRow::from_point(&spec, &p)),
                    Err(e) => omitted.push(Omission {
                        method,
                        branch,
                        k,
                        reason: e.to_string(),
                    }),
                }
            }
        }
    }

    let want_exact = methods.contains(&Method::ExactChar);
    let want_sim = methods.contains(&Method::Simulated);
    if want_exact || want_sim {
        let mut exact: Vec<HopfPoint> = Vec::new();
        for branch in Branch::BOTH {
            let (points, missed, trunc) = exact_branch(template, ks, branch);
            exact.extend(points);
            if want_exact {
                omitted.extend(missed);
            }
            if let Some(t) = trunc {
                truncations.push((branch, t));
            }
        }
        if want_exact {
            rows.extend(exact.iter().map(|p| CurveRow::from_point(&template.with_k(p.k), p)));
        }
        if want_sim {
            let (found, missed) = simulated_rows(template, &exact, sim);
            rows.extend(found.iter().map(|p| CurveRow::from_point(&template.with_k(p.k), p)));
            omitted.extend(missed);
        }
    }

    Ok(CurveBuild {
        table: CurveTable::new(rows),
        omitted,
        truncations,
    })
}

fn exact_branch(
    template: &SystemSpec,
    ks: &[f64],
    branch: Branch,
) -> (Vec<HopfPoint>, Vec<Omission>, Option<Truncation>) {
    let threshold = hopf::feedback_threshold(template);
    let omit = |k: f64, reason: String| Omission {
        method: Method::ExactChar,
        branch,
        k,
        reason,
    };
    let mut omitted: Vec<Omission> = ks
        .iter()
        .filter(|&&k| k <= threshold)
        .map(|&k| omit(k, format!("k <= threshold {threshold}")))
        .collect();
    let grid: Vec<f64> = ks.iter().copied().filter(|&k| k > threshold).collect();

    let mut start = 0;
    while start < grid.len() {
        match continuation_on_grid(template, SweepParameter::K, &grid[start..], branch, Target::ExactChar) {
            Ok(curve) => {
                let done = curve.points.len();
                for &k in &grid[start + done..] {
                    let why = curve
                        .truncated
                        .as_ref()
                        .map(|t| format!("continuation stopped at k = {}: {}", t.at, t.reason))
                        .unwrap_or_default();
                    omitted.push(omit(k, why));
                }
                let points = curve.points.iter().map(|p| p.point).collect();
                return (points, omitted, curve.truncated);
            }
            Err(e) => {
                omitted.push(omit(grid[start], e.to_string()));
                start += 1;
            }
        }
    }
    (Vec::new(), omitted, None)
}

fn simulated_rows(template: &SystemSpec, exact: &[HopfPoint], sim: &SimulatedRows) -> (Vec<HopfPoint>, Vec<Omission>) {
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let chunk = exact.len().div_ceil(workers).max(1);
    let results: Vec<(HopfPoint, Result<HopfPoint>)> = thread::scope(|s| {
        let handles: Vec<_> = exact
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|p| {
                            let lo = (p.delay - sim.half_width).max(0.0);
                            let hi = p.delay + sim.half_width;
                            (*p, detect_hopf_bisection(template, p.k, lo, hi, sim.tol_delay, &sim.detect))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });

    let mut found = Vec::new();
    let mut omitted = Vec::new();
    for (reference, result) in results {
        match result {
            Ok(mut p) => {
                // the bracket is chosen per exact branch, so keep that label
                p.branch = reference.branch;
                found.push(p);
            }
            Err(e) => omitted.push(Omission {
                method: Method::Simulated,
                branch: reference.branch,
                k: reference.k,
                reason: e.to_string(),
            }),
        }
    }
    (found, omitted)
}

fn same_k(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Pointwise `|T - T_exact|` statistics per method and branch at the grid
/// values where both the method and the exact curve have a row.
///
/// Series with no overlap are left out; if no series overlaps at all the
/// result is [`Error::EmptyReport`].
pub fn compare_methods(table: &CurveTable) -> Result<Vec<ComparisonRow>> {
    let Some(system) = table.rows().first().map(|r| r.system) else {
        return Err(Error::EmptyReport("curve table has no rows".into()));
    };
    let mut out = Vec::new();
    for method in Method::ALL {
        for branch in Branch::BOTH {
            let reference: Vec<&CurveRow> = table.series(Method::ExactChar, branch).collect();
            let mut errors = Vec::new();
            for row in table.series(method, branch) {
                if let Some(ex) = reference.iter().find(|e| same_k(e.k, row.k)) {
                    errors.push((row.delay - ex.delay).abs());
                }
            }
            if errors.is_empty() {
                continue;
            }
            let max = errors.iter().copied().fold(0.0, f64::max);
            let mean = errors.iter().sum::<f64>() / errors.len() as f64;
            out.push(ComparisonRow {
                system,
                method,
                branch,
                max_abs_error: max,
                mean_abs_error: mean,
                n_points: errors.len(),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyReport(
            "no grid value has both a method row and an exact row".into(),
        ));
    }
    Ok(out)
}

/// Largest slow-flow residual of one Erneux-Grasman closed-form family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErneuxBranchCheck {
    pub branch: Branch,
    pub pairing: ErneuxPairing,
    pub max_residual: f64,
    pub worst_k: f64,
    pub worst_omega: f64,
    pub worst_delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErneuxReport {
    pub epsilon: f64,
    pub checks: Vec<ErneuxBranchCheck>,
}

impl ErneuxReport {
    pub fn check(&self, branch: Branch, pairing: ErneuxPairing) -> Option<&ErneuxBranchCheck> {
        self.checks
            .iter()
            .find(|c| c.branch == branch && c.pairing == pairing)
    }

    /// Families of `pairing` whose residual reaches `tol`.
    pub fn failures(&self, pairing: ErneuxPairing, tol: f64) -> Vec<&ErneuxBranchCheck> {
        self.checks
            .iter()
            .filter(|c| c.pairing == pairing && !(c.max_residual < tol))
            .collect()
    }
}

/// Substitutes both Erneux-Grasman closed-form families, under both
/// frequency pairings, into the slow-flow characteristic system.
pub fn erneux_validation(epsilon: f64, ks: &[f64]) -> Result<ErneuxReport> {
    if ks.is_empty() {
        return Err(Error::InvalidInput("empty k grid".into()));
    }
    let mut checks = Vec::new();
    for pairing in [ErneuxPairing::Printed, ErneuxPairing::Derived] {
        for branch in Branch::BOTH {
            let mut worst = ErneuxBranchCheck {
                branch,
                pairing,
                max_residual: 0.0,
                worst_k: f64::NAN,
                worst_omega: f64::NAN,
                worst_delay: f64::NAN,
            };
            for &k in ks {
                let spec = SystemSpec::erneux(epsilon, k);
                let p = hopf::erneux_approach2_branch(&spec, branch, pairing, 0)?;
                let r = charsolve::slowflow_char_residual(&spec, p.omega, p.delay).norm();
                if !(r <= worst.max_residual) {
                    worst.max_residual = r;
                    worst.worst_k = k;
                    worst.worst_omega = p.omega;
                    worst.worst_delay = p.delay;
                }
            }
            checks.push(worst);
        }
    }
    Ok(ErneuxReport { epsilon, checks })
}

/// Convenience for the Erneux check on a spec that is known to be Erneux-Grasman.
pub fn erneux_validation_for(spec: &SystemSpec, ks: &[f64]) -> Result<ErneuxReport> {
    if spec.kind != SystemKind::ErneuxGrasman {
        return Err(Error::InvalidInput(format!("{} is not erneux", spec.kind)));
    }
    erneux_validation(spec.epsilon, ks)
}

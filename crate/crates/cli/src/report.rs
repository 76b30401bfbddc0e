//! CSV table, pairwise rate report and acceptance thresholds.

use std::fmt::Write as _;

use wavext_core::postprocess::convergence_rates;

use crate::config::{Cell, Experiment, ExperimentConfig};
use crate::{CliError, RunRecord};

pub const CSV_COLUMNS: [&str; 16] = [
    "run_id",
    "experiment",
    "method",
    "bc_mode",
    "p",
    "q",
    "h",
    "tau",
    "err_u",
    "err_ustar",
    "err_v",
    "err_gradu",
    "eta",
    "osc_f",
    "effectivity",
    "energy_drift",
];

/// Scientific notation with 12 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Serializes records in the given order.
pub fn results_csv(records: &[RunRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        let e = r.errors;
        w.write_record([
            r.run_id.to_string(),
            r.experiment.name().to_string(),
            r.cell.method.name().to_string(),
            r.cell.bc_mode.name().to_string(),
            r.cell.p.to_string(),
            r.cell.q.to_string(),
            sci(r.h),
            sci(r.cell.tau),
            opt(e.map(|e| e[0])),
            opt(e.map(|e| e[1])),
            opt(e.map(|e| e[2])),
            opt(e.map(|e| e[3])),
            opt(r.eta),
            opt(r.osc_f),
            opt(r.effectivity),
            sci(r.energy_drift),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Quantity names reported in rate tables, in CSV order.
pub const RATE_QUANTITIES: [&str; 5] = ["err_u", "err_ustar", "err_v", "err_gradu", "eta"];

fn quantity(r: &RunRecord, k: usize) -> Option<f64> {
    match k {
        0..=3 => r.errors.map(|e| e[k]),
        _ => r.eta,
    }
}

/// Records sharing everything except the swept resolution.
#[derive(Debug, Clone)]
pub struct RateSeries {
    pub label: String,
    pub key: Cell,
    pub resolution_name: &'static str,
    pub resolutions: Vec<f64>,
    pub records: Vec<RunRecord>,
    /// Pairwise rates per entry of [`RATE_QUANTITIES`].
    pub rates: Vec<Vec<Option<f64>>>,
}

impl RateSeries {
    /// Last pairwise rate of a named quantity.
    pub fn last_rate(&self, name: &str) -> Option<f64> {
        let k = RATE_QUANTITIES.iter().position(|q| *q == name)?;
        self.rates[k].last().copied().flatten()
    }
}

fn same_group(exp: Experiment, a: &Cell, b: &Cell) -> bool {
    let common = a.method == b.method && a.bc_mode == b.bc_mode;
    match exp {
        Experiment::ConvergeH => common && a.p == b.p && a.q == b.q && a.tau == b.tau,
        Experiment::ConvergeTau | Experiment::Estimate => {
            common && a.p == b.p && a.q == b.q && a.mesh == b.mesh
        }
        Experiment::ConvergePq => common && a.mesh == b.mesh && a.tau == b.tau,
        Experiment::Solve | Experiment::Energy => false,
    }
}

/// Groups records into sweeps. For converge-pq the resolution is `∛N_DoF`
/// and the reported number is the exponential rate `b` in `e^{−b∛N}`.
pub fn rate_series(config: &ExperimentConfig, records: &[RunRecord]) -> Vec<RateSeries> {
    let exp = config.experiment;
    if matches!(exp, Experiment::Solve | Experiment::Energy) {
        return Vec::new();
    }
    let mut used = vec![false; records.len()];
    let mut out = Vec::new();
    for i in 0..records.len() {
        if used[i] {
            continue;
        }
        let mut members = Vec::new();
        for j in i..records.len() {
            if !used[j] && same_group(exp, &records[i].cell, &records[j].cell) {
                used[j] = true;
                members.push(records[j].clone());
            }
        }
        let key = members[0].cell;
        let (resolution_name, resolutions): (&'static str, Vec<f64>) = match exp {
            Experiment::ConvergeH => ("h", members.iter().map(|r| r.h).collect()),
            Experiment::ConvergePq => (
                "cbrt_dofs",
                members
                    .iter()
                    .map(|r| (r.total_dofs as f64).cbrt())
                    .collect(),
            ),
            _ => ("tau", members.iter().map(|r| r.cell.tau).collect()),
        };
        let rates = (0..RATE_QUANTITIES.len())
            .map(|k| {
                let values: Vec<Option<f64>> = members.iter().map(|r| quantity(r, k)).collect();
                if exp == Experiment::ConvergePq {
                    values
                        .windows(2)
                        .zip(resolutions.windows(2))
                        .map(|(v, n)| match (v[0], v[1]) {
                            (Some(a), Some(b)) if a > 0.0 && b > 0.0 && n[1] != n[0] => {
                                Some((a / b).ln() / (n[1] - n[0]))
                            }
                            _ => None,
                        })
                        .collect()
                } else {
                    let table: Vec<(f64, f64)> = resolutions
                        .iter()
                        .zip(&values)
                        .map(|(r, v)| (*r, v.unwrap_or(0.0)))
                        .collect();
                    convergence_rates(&table)
                }
            })
            .collect();
        let label = match exp {
            Experiment::ConvergeH => format!(
                "method={} bc_mode={} p={} q={} tau={}",
                key.method.name(),
                key.bc_mode.name(),
                key.p,
                key.q,
                sci(key.tau)
            ),
            Experiment::ConvergePq => format!(
                "method={} bc_mode={} mesh={}x{} tau={}",
                key.method.name(),
                key.bc_mode.name(),
                key.mesh,
                key.mesh,
                sci(key.tau)
            ),
            _ => format!(
                "method={} bc_mode={} p={} q={} mesh={}x{}",
                key.method.name(),
                key.bc_mode.name(),
                key.p,
                key.q,
                key.mesh,
                key.mesh
            ),
        };
        out.push(RateSeries {
            label,
            key,
            resolution_name,
            resolutions,
            records: members,
            rates,
        });
    }
    out
}

/// Plain-text rate tables, one block per sweep.
pub fn rates_report(config: &ExperimentConfig, records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# experiment {} preset {}",
        config.experiment, config.preset_name
    );
    if config.experiment == Experiment::ConvergePq {
        let _ = writeln!(s, "# rate = ln(e_k/e_(k+1)) / (cbrt(N_(k+1)) - cbrt(N_k))");
    } else {
        let _ = writeln!(s, "# rate = ln(e_k/e_(k+1)) / ln(r_k/r_(k+1))");
    }
    let series = rate_series(config, records);
    if series.is_empty() {
        let _ = writeln!(s, "no sweep in this experiment");
    }
    for ser in &series {
        let _ = writeln!(s, "\n[{}]", ser.label);
        let _ = write!(s, "{:>20}", ser.resolution_name);
        for q in RATE_QUANTITIES {
            let _ = write!(s, " {q:>20} {:>6}", "rate");
        }
        let _ = writeln!(s);
        for (i, r) in ser.records.iter().enumerate() {
            let _ = write!(s, "{:>20}", sci(ser.resolutions[i]));
            for k in 0..RATE_QUANTITIES.len() {
                let v = quantity(r, k).map_or("-".to_string(), sci);
                let rate = if i == 0 {
                    "-".to_string()
                } else {
                    ser.rates[k][i - 1].map_or("-".to_string(), |x| format!("{x:.2}"))
                };
                let _ = write!(s, " {v:>20} {rate:>6}");
            }
            let _ = writeln!(s);
        }
    }
    s
}

/// Threshold checks behind `--check`; returns one message per violation.
pub fn check(config: &ExperimentConfig, records: &[RunRecord]) -> Vec<String> {
    let mut fails = Vec::new();
    let mut expect = |ser: &RateSeries, name: &str, target: f64, tol: f64| match ser.last_rate(name)
    {
        Some(r) if (r - target).abs() <= tol => {}
        Some(r) => fails.push(format!(
            "[{}] {name} last rate {r:.3} not within {tol} of {target}",
            ser.label
        )),
        None => fails.push(format!("[{}] {name} has no rate", ser.label)),
    };
    match config.experiment {
        Experiment::ConvergeH => {
            let tol = config.check_tol.unwrap_or(0.25);
            for ser in rate_series(config, records) {
                let p = ser.key.p as f64;
                for name in ["err_u", "err_ustar", "err_v"] {
                    expect(&ser, name, p + 1.0, tol);
                }
                expect(&ser, "err_gradu", p, tol);
            }
        }
        Experiment::ConvergeTau => {
            let tol = config.check_tol.unwrap_or(0.3);
            for ser in rate_series(config, records) {
                let q = ser.key.q as f64;
                for name in ["err_u", "err_v", "err_gradu"] {
                    expect(&ser, name, q + 1.0, tol);
                }
                if ser.key.q >= 2 {
                    expect(&ser, "err_ustar", q + 2.0, tol);
                }
            }
        }
        Experiment::Estimate => {
            for ser in rate_series(config, records) {
                for r in &ser.records {
                    if let (Some(e), Some(eta), Some(osc)) = (r.err_u(), r.eta, r.osc_f) {
                        if e > eta + osc {
                            fails.push(format!(
                                "run {}: err_u {} exceeds eta + osc_f {}",
                                r.run_id,
                                sci(e),
                                sci(eta + osc)
                            ));
                        }
                    }
                }
                let eff: Vec<f64> = ser.records.iter().filter_map(|r| r.effectivity).collect();
                if let (Some(lo), Some(hi)) = (
                    eff.iter().copied().reduce(f64::min),
                    eff.iter().copied().reduce(f64::max),
                ) {
                    if hi / lo > 3.0 {
                        fails.push(format!(
                            "[{}] effectivity max/min {:.3} exceeds 3",
                            ser.label,
                            hi / lo
                        ));
                    }
                }
            }
        }
        Experiment::Energy => {
            for r in records {
                if r.energy_drift > 1e-10 {
                    fails.push(format!(
                        "run {}: energy drift {} exceeds 1e-10",
                        r.run_id,
                        sci(r.energy_drift)
                    ));
                }
            }
        }
        Experiment::Solve | Experiment::ConvergePq => {}
    }
    fails
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_scientific() {
        assert_eq!(sci(0.03125), "3.12500000000e-2");
        assert_eq!(sci(1.0), "1.00000000000e0");
    }
}

//! Per-run report with the same field semantics as the solver's
//! statistics columns, serializable to JSON and CSV.

use serde::{Deserialize, Serialize};
use zddcolor::bnp::SolveOutcome;

/// Terminal state of one solver run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    TimeLimit,
    ZddBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub lb: u32,
    pub ub: u32,
    pub optimal: bool,
    pub status: RunStatus,
    /// ZDD construction time, seconds.
    pub t_z: f64,
    /// Branch-and-price search time, seconds.
    pub t: f64,
    /// Nodes at which children were generated.
    pub exp: u64,
    /// Nodes for which the RMP was solved.
    pub id: u64,
    /// ZDD node count after construction.
    pub z_i: usize,
    /// ZDD node count at the end.
    pub z_f: usize,
    /// Percent ZDD growth over the run.
    pub pct_change: f64,
    /// Columns generated by pricing.
    pub col: u64,
    /// Total pricing time (weighted optimization plus restriction), seconds.
    pub t_price: f64,
    pub seed: u64,
}

impl RunReport {
    pub fn new(
        instance: String,
        n: usize,
        m: usize,
        seed: u64,
        outcome: &SolveOutcome,
    ) -> RunReport {
        let status = if outcome.zdd_budget_exceeded {
            RunStatus::ZddBudget
        } else if outcome.time_limit_hit {
            RunStatus::TimeLimit
        } else {
            RunStatus::Optimal
        };
        let stats = &outcome.stats;
        let pct_change = if stats.zdd_initial > 0 {
            100.0 * (stats.zdd_final as f64 - stats.zdd_initial as f64)
                / stats.zdd_initial as f64
        } else {
            0.0
        };
        RunReport {
            instance,
            n,
            m,
            lb: outcome.lower_bound,
            ub: outcome.upper_bound,
            optimal: outcome.optimal,
            status,
            t_z: stats.build_time.as_secs_f64(),
            t: stats.search_time.as_secs_f64(),
            exp: stats.explored,
            id: stats.identified,
            z_i: stats.zdd_initial,
            z_f: stats.zdd_final,
            pct_change,
            col: stats.columns_generated,
            t_price: stats.pricing_time.as_secs_f64(),
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let chi = if self.optimal {
            format!("chi = {}", self.ub)
        } else {
            format!("{} <= chi <= {}", self.lb, self.ub)
        };
        format!(
            "instance   {}\n\
             size       n = {}, m = {}\n\
             result     {chi} ({})\n\
             times      t_Z = {:.3}s, t = {:.3}s, t_price = {:.3}s\n\
             tree       explored = {}, identified = {}\n\
             zdd        Z_i = {}, Z_f = {} ({:+.1}%)\n\
             columns    {}\n",
            self.instance,
            self.n,
            self.m,
            match self.status {
                RunStatus::Optimal => "optimal",
                RunStatus::TimeLimit => "time limit",
                RunStatus::ZddBudget => "zdd budget exceeded",
            },
            self.t_z,
            self.t,
            self.t_price,
            self.exp,
            self.id,
            self.z_i,
            self.z_f,
            self.pct_change,
            self.col,
        )
    }
}

/// CSV header matching the report columns, in the order of the solver's
/// statistics tables.
pub const CSV_HEADER: [&str; 17] = [
    "instance", "n", "m", "lb", "ub", "optimal", "status", "t_z", "t", "exp", "id", "z_i",
    "z_f", "pct_change", "col", "t_price", "error",
];

pub fn csv_row(report: &RunReport) -> Vec<String> {
    vec![
        report.instance.clone(),
        report.n.to_string(),
        report.m.to_string(),
        report.lb.to_string(),
        report.ub.to_string(),
        report.optimal.to_string(),
        match report.status {
            RunStatus::Optimal => "optimal".into(),
            RunStatus::TimeLimit => "time_limit".into(),
            RunStatus::ZddBudget => "zdd_budget".into(),
        },
        format!("{:.6}", report.t_z),
        format!("{:.6}", report.t),
        report.exp.to_string(),
        report.id.to_string(),
        report.z_i.to_string(),
        report.z_f.to_string(),
        format!("{:.3}", report.pct_change),
        report.col.to_string(),
        format!("{:.6}", report.t_price),
        String::new(),
    ]
}

/// Row for an instance that failed to parse or solve.
pub fn csv_error_row(instance: &str, error: &str) -> Vec<String> {
    let mut row = vec![instance.to_string()];
    row.extend(std::iter::repeat(String::new()).take(CSV_HEADER.len() - 2));
    row.push(error.to_string());
    row
}

//! Per-member records and summaries of inequality checks.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// Violation band on `(rhs - lhs) / max(1, rhs)`.
pub const TOL_BAND: f64 = 1e-6;
/// Members with both sides below this are skipped.
pub const DEGENERATE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    SuperPoincare,
    Wlsi,
    Talagrand,
    Hwi,
    Chain,
    Deviation,
    Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub member_id: String,
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    /// `C rhs - lhs`, with `C` the target constant or 1.
    pub margin: f64,
    pub skipped: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub records: Vec<MemberRecord>,
    /// Largest ratio over non-skipped members; `0` when all were skipped.
    pub max_ratio: f64,
    pub argmax: Option<String>,
    /// The fitted constant, equal to `max_ratio`.
    pub c_est: f64,
    /// Constant the right side is multiplied by before flagging
    /// violations; `None` means violations are not assessed for
    /// inequalities whose constant is being fitted.
    pub target: Option<f64>,
    pub violations: usize,
    pub skipped: usize,
}

impl InequalityReport {
    /// Start an empty report. `target` multiplies the right side when
    /// flagging violations; `assess` controls whether violations are
    /// flagged at all.
    pub fn new(kind: InequalityKind, target: Option<f64>, assess: bool) -> ReportBuilder {
        ReportBuilder {
            kind,
            target,
            assess: assess || target.is_some(),
            records: Vec::new(),
        }
    }

    pub fn n_members(&self) -> usize {
        self.records.len()
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// CSV `member_id,param,lhs,rhs,ratio,margin`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "member_id,param,lhs,rhs,ratio,margin")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.member_id, r.param, r.lhs, r.rhs, r.ratio, r.margin
            )?;
        }
        Ok(())
    }
}

pub struct ReportBuilder {
    kind: InequalityKind,
    target: Option<f64>,
    assess: bool,
    records: Vec<MemberRecord>,
}

impl ReportBuilder {
    pub fn push(&mut self, member_id: impl Into<String>, param: f64, lhs: f64, rhs: f64) {
        self.push_with(member_id, param, lhs, rhs, false);
    }

    /// Record a member; `force_skip` marks it degenerate regardless of size.
    pub fn push_with(&mut self, member_id: impl Into<String>, param: f64, lhs: f64, rhs: f64, force_skip: bool) {
        let c = self.target.unwrap_or(1.0);
        let skipped = force_skip || (lhs.abs() < DEGENERATE && rhs.abs() < DEGENERATE);
        let ratio = if skipped {
            f64::NAN
        } else if rhs == 0.0 {
            if lhs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            lhs / rhs
        };
        let eff = c * rhs;
        let margin = eff - lhs;
        let violation = self.assess && !skipped && (margin / eff.max(1.0) < -TOL_BAND || margin.is_nan());
        self.records.push(MemberRecord {
            member_id: member_id.into(),
            param,
            lhs,
            rhs,
            ratio,
            margin,
            skipped,
            violation,
        });
    }

    pub fn finish(self) -> InequalityReport {
        let mut max_ratio = 0.0;
        let mut argmax = None;
        for r in &self.records {
            if !r.skipped && r.ratio > max_ratio {
                max_ratio = r.ratio;
                argmax = Some(r.member_id.clone());
            }
        }
        let violations = self.records.iter().filter(|r| r.violation).count();
        let skipped = self.records.iter().filter(|r| r.skipped).count();
        InequalityReport {
            kind: self.kind,
            records: self.records,
            max_ratio,
            argmax,
            c_est: max_ratio,
            target: self.target,
            violations,
            skipped,
        }
    }
}

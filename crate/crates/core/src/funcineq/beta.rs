//! Super Poincaré rate functions `beta`, their generalized inverse and the
//! derived profile `eta(s) = ln(2s) * min(1, beta^{-1}(s/2))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BetaProfile {
    /// `beta(r) = exp[c (1 + r^{-1/delta})]`.
    ExpPower { c: f64, delta: f64 },
    /// Values `ln beta` at increasing radii, interpolated linearly in
    /// `(ln r, ln beta)`. Below the first radius `beta` is taken infinite,
    /// beyond the last it is held at the last value.
    Table { r: Vec<f64>, log_beta: Vec<f64> },
}

impl BetaProfile {
    pub fn exp_power(c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0 && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("exp_power needs c > 0, delta > 0 (got {c}, {delta})")));
        }
        Ok(BetaProfile::ExpPower { c, delta })
    }

    /// A table; `log_beta` is replaced by its running minimum so the
    /// profile is non-increasing.
    pub fn table(r: Vec<f64>, log_beta: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r.len() != log_beta.len() {
            return Err(Error::InvalidParameter("beta table needs equally many radii and values".into()));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) || r[0] <= 0.0 {
            return Err(Error::InvalidParameter("beta table radii must be positive and increasing".into()));
        }
        if log_beta.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("beta table has NaN values".into()));
        }
        let mut run = f64::INFINITY;
        let log_beta = log_beta
            .into_iter()
            .map(|v| {
                run = run.min(v);
                run
            })
            .collect();
        Ok(BetaProfile::Table { r, log_beta })
    }

    pub fn log_value(&self, r: f64) -> f64 {
        match self {
            BetaProfile::ExpPower { c, delta } => {
                if r <= 0.0 {
                    f64::INFINITY
                } else {
                    c * (1.0 + r.powf(-1.0 / delta))
                }
            }
            BetaProfile::Table { r: rs, log_beta } => {
                let n = rs.len();
                if r < rs[0] {
                    return f64::INFINITY;
                }
                if r >= rs[n - 1] {
                    return log_beta[n - 1];
                }
                let k = rs.partition_point(|&t| t <= r) - 1;
                let (a, b) = (rs[k].ln(), rs[k + 1].ln());
                let w = (r.ln() - a) / (b - a);
                interpolate(log_beta[k], log_beta[k + 1], w)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.log_value(r).exp()
    }

    /// `beta^{-1}(s) = inf{t >= 0 : beta(t) <= s}` for `s = e^{ln_s}`;
    /// `+inf` when the set is empty.
    pub fn inverse_log(&self, ln_s: f64) -> f64 {
        match self {
            BetaProfile::ExpPower { c, delta } => {
                if ln_s <= *c {
                    f64::INFINITY
                } else {
                    (c / (ln_s - c)).powf(*delta)
                }
            }
            BetaProfile::Table { r, log_beta } => {
                let n = r.len();
                if ln_s >= log_beta[0] {
                    return r[0];
                }
                if ln_s < log_beta[n - 1] {
                    return f64::INFINITY;
                }
                // first index whose value is <= ln_s
                let k = log_beta.partition_point(|&v| v > ln_s);
                let (va, vb) = (log_beta[k - 1], log_beta[k]);
                let w = (va - ln_s) / (va - vb);
                let (a, b) = (r[k - 1].ln(), r[k].ln());
                (a + w * (b - a)).exp()
            }
        }
    }

    pub fn inverse(&self, s: f64) -> f64 {
        self.inverse_log(s.ln())
    }

    /// `eta(s) = ln(2s) * min(1, beta^{-1}(s/2))` for `s = e^{ln_s} >= 1`.
    pub fn eta_log(&self, ln_s: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let inv = self.inverse_log(ln_s - ln2);
        (ln2 + ln_s) * inv.min(1.0)
    }

    pub fn eta(&self, s: f64) -> f64 {
        self.eta_log(s.ln())
    }
}

fn interpolate(a: f64, b: f64, w: f64) -> f64 {
    if a == b {
        a
    } else {
        a + w * (b - a)
    }
}

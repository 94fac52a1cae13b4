//! The run configuration: one JSON document with `measure`, `grid`,
//! `checks` and `output` blocks.
//!
//! Parsing goes through `serde_path_to_error`, so a malformed field is
//! reported with its dotted path. [`RunConfig::validate`] then resolves
//! everything that can be checked without numerical work.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use wlsi::funcineq::{FamilySpec, HwiForm, MomentGrid};
use wlsi::measure::{parse_potential, AngularPerturbation, MeasureKind, Potential, PotentialSpec, Scheme};
use wlsi::Error as CoreError;

use crate::error::ConfigError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub measure: MeasureConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub checks: Vec<CheckConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: MeasureKind,
    pub potential: PotentialConfig,
    /// Left end of the support for `one_dim`; absent means the whole line.
    #[serde(default)]
    pub left_endpoint: Option<f64>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub angular: Option<AngularPerturbation>,
    #[serde(default)]
    pub angular_grid: Option<usize>,
}

/// Either an expression in `r` or the power family `-a r^theta + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialConfig {
    Text(String),
    Power {
        a: f64,
        theta: f64,
        #[serde(default)]
        b: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points of discretizations and output tables.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Half-width of output tables.
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_n() -> usize {
    128
}

fn default_r_max() -> f64 {
    6.0
}

fn default_rel_tol() -> f64 {
    1e-9
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: default_n(), r_max: default_r_max(), rel_tol: default_rel_tol() }
    }
}

/// A list of radii or an evenly spaced range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RGrid {
    List(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        points: usize,
        #[serde(default)]
        log: bool,
    },
}

impl RGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            RGrid::List(v) => v.clone(),
            RGrid::Range { min, max, points, log } => {
                if *points == 1 {
                    return vec![*min];
                }
                (0..*points)
                    .map(|k| {
                        let t = k as f64 / (*points - 1) as f64;
                        if *log {
                            (min.ln() + t * (max.ln() - min.ln())).exp()
                        } else {
                            min + t * (max - min)
                        }
                    })
                    .collect()
            }
        }
    }

    fn validate(&self, path: &str, positive: bool, increasing: bool) -> Result<(), ConfigError> {
        if let RGrid::Range { min, max, points, log } = self {
            if *points == 0 || !(min.is_finite() && max.is_finite() && min <= max) {
                return Err(ConfigError::at(path, "range needs finite min <= max and points >= 1"));
            }
            if *log && *min <= 0.0 {
                return Err(ConfigError::at(path, "log range needs min > 0"));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(ConfigError::at(path, "grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite() || (positive && *x <= 0.0)) {
            return Err(ConfigError::at(path, "grid values must be finite and positive"));
        }
        if increasing && v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::at(path, "grid must be strictly increasing"));
        }
        Ok(())
    }
}

fn default_r_grid() -> RGrid {
    RGrid::Range { min: 0.05, max: 5.0, points: 12, log: true }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckConfig {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckKind {
    /// Super Poincaré with a given rate.
    Sp {
        beta: BetaConfig,
        #[serde(default = "default_r_grid")]
        r_grid: RGrid,
        families: Vec<FamilySpec>,
    },
    Wlsi {
        weight: WeightConfig,
        families: Vec<FamilySpec>,
        #[serde(default)]
        c_target: Option<f64>,
    },
    Talagrand {
        cost: CostConfig,
        families: Vec<FamilySpec>,
        #[serde(default)]
        c_target: Option<f64>,
    },
    Hwi {
        /// Defaults to the transport weight of the measure.
        #[serde(default)]
        weight: Option<WeightConfig>,
        families: Vec<FamilySpec>,
        #[serde(default)]
        form: HwiForm,
    },
    Deviation {
        rate: RateConfig,
        event: EventConfig,
        radii: RGrid,
        #[serde(default)]
        distance: DistanceConfig,
    },
    /// Estimate a rate on a discretization, then check it on `families`.
    BetaEstimate {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default = "default_scheme")]
        scheme: Scheme,
        #[serde(default = "default_r_grid")]
        r_grid: RGrid,
        #[serde(default = "default_restarts")]
        restarts: usize,
        #[serde(default = "default_safety")]
        safety: f64,
        families: Vec<FamilySpec>,
    },
    /// Rate from exponential moments, fitted to `exp[c (1 + r^{-1/delta})]`,
    /// then the chain bound with the induced tail-supremum weight.
    BetaFromMoments {
        #[serde(default)]
        k: f64,
        #[serde(default = "default_c0")]
        c0: f64,
        #[serde(default = "default_r_grid")]
        r_grid: RGrid,
        #[serde(default)]
        s_grid: Option<MomentGrid>,
        delta: f64,
        #[serde(default)]
        chain_r_grid: Option<RGrid>,
        families: Vec<FamilySpec>,
    },
    /// `alpha(x) (1 + |x|)^{theta - 2}` within `[1/c, c]`.
    Envelope {
        weight: WeightConfig,
        theta: f64,
        points: RGrid,
        #[serde(default)]
        c_target: Option<f64>,
    },
}

fn default_scheme() -> Scheme {
    Scheme::EqualSpace
}

fn default_restarts() -> usize {
    4
}

fn default_safety() -> f64 {
    1.001
}

fn default_c0() -> f64 {
    1.0
}

impl CheckKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            CheckKind::Sp { .. } => "sp",
            CheckKind::Wlsi { .. } => "wlsi",
            CheckKind::Talagrand { .. } => "talagrand",
            CheckKind::Hwi { .. } => "hwi",
            CheckKind::Deviation { .. } => "deviation",
            CheckKind::BetaEstimate { .. } => "beta_estimate",
            CheckKind::BetaFromMoments { .. } => "beta_from_moments",
            CheckKind::Envelope { .. } => "envelope",
        }
    }

    fn families(&self) -> Option<&[FamilySpec]> {
        match self {
            CheckKind::Sp { families, .. }
            | CheckKind::Wlsi { families, .. }
            | CheckKind::Talagrand { families, .. }
            | CheckKind::Hwi { families, .. }
            | CheckKind::BetaEstimate { families, .. }
            | CheckKind::BetaFromMoments { families, .. } => Some(families),
            CheckKind::Deviation { .. } | CheckKind::Envelope { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    #[serde(alias = "thm411")]
    LineTransport,
    #[serde(alias = "thm412")]
    RadialTransport {
        #[serde(default)]
        eps_grid: Option<Vec<f64>>,
    },
    #[serde(alias = "thm11")]
    TailSup { beta: BetaConfig },
    #[serde(alias = "cor413", alias = "cor413_envelope")]
    PowerEnvelope {
        c: f64,
        #[serde(default)]
        theta: Option<f64>,
    },
    Constant { c: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum BetaConfig {
    ExpPower { c: f64, delta: f64 },
    Table { r: Vec<f64>, log_beta: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostConfig {
    /// `W_p^p` for a distance.
    Distance {
        #[serde(default)]
        distance: DistanceConfig,
        #[serde(default = "default_p")]
        p: f64,
    },
    Power { p: f64 },
    QuadraticThenPower { a: f64, delta_exp: f64 },
    Exp { c1: f64 },
    PullbackSq,
    RhoTildeSq { delta_exp: f64 },
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistanceConfig {
    #[default]
    Euclidean,
    Pullback,
    WeightedGeodesic { weight: WeightConfig },
    RhoTilde { delta_exp: f64 },
    PowerComparison { delta_exp: f64 },
}

/// `Phi(t) = (c t)^{1/p}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub c: f64,
    #[serde(default = "default_p")]
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EventConfig {
    Below(f64),
    Above(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write `<id>.csv` for every check that ran.
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default)]
    pub tables: Vec<TableConfig>,
}

fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { csv: true, tables: Vec::new() }
    }
}

/// Plot-ready tables on `grid.n` points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "table", rename_all = "snake_case", deny_unknown_fields)]
pub enum TableConfig {
    /// `x,alpha`.
    Weight { file: String, weight: WeightConfig },
    /// `x,y` for the transport map.
    Map { file: String },
    /// `point,mass` (plus `angle` for angular measures).
    Grid {
        file: String,
        #[serde(default = "default_scheme")]
        scheme: Scheme,
    },
}

impl TableConfig {
    pub fn file(&self) -> &str {
        match self {
            TableConfig::Weight { file, .. } | TableConfig::Map { file } | TableConfig::Grid { file, .. } => file,
        }
    }
}

/// Parse a configuration document, reporting the path of the first bad field.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ConfigError::at(&path, &e.into_inner().to_string())
    })
}

fn safe_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'.') && !s.starts_with('.')
}

impl RunConfig {
    /// The measure specification, with the potential parsed.
    pub fn potential_spec(&self) -> Result<PotentialSpec, ConfigError> {
        let m = &self.measure;
        let potential = match &m.potential {
            PotentialConfig::Text(t) => parse_potential(t).map_err(|e| match e {
                CoreError::Syntax { offset, .. } | CoreError::UnknownIdentifier { offset, .. } => {
                    ConfigError::at("measure.potential", &e.to_string()).with_offset(offset)
                }
                other => ConfigError::at("measure.potential", &other.to_string()),
            })?,
            PotentialConfig::Power { a, theta, b } => Potential::power(*a, *theta, *b),
        };
        let mut spec = match m.kind {
            MeasureKind::OneDim => {
                if m.dim.is_some_and(|d| d != 1) {
                    return Err(ConfigError::at("measure.dim", "one_dim measures have dim = 1"));
                }
                PotentialSpec::one_dim(potential, m.left_endpoint.unwrap_or(f64::NEG_INFINITY))
            }
            MeasureKind::Radial => {
                let dim = m.dim.ok_or_else(|| ConfigError::at("measure.dim", "radial measures need dim"))?;
                PotentialSpec::radial(potential, dim)
            }
            MeasureKind::RadialAngular => {
                let ang = m
                    .angular
                    .ok_or_else(|| ConfigError::at("measure.angular", "radial_angular measures need an angular block"))?;
                if m.dim.is_some_and(|d| d != 2) {
                    return Err(ConfigError::at("measure.dim", "radial_angular measures live on the plane"));
                }
                PotentialSpec::radial_angular(potential, ang)
            }
        };
        if m.kind != MeasureKind::OneDim && m.left_endpoint.is_some() {
            return Err(ConfigError::at("measure.left_endpoint", "only one_dim measures take a left endpoint"));
        }
        if m.kind != MeasureKind::RadialAngular && m.angular.is_some() {
            return Err(ConfigError::at("measure.angular", "only radial_angular measures take an angular block"));
        }
        if let Some(n) = m.angular_grid {
            spec = spec.with_angular_grid(n);
        }
        spec.validate().map_err(|e| ConfigError::at("measure", &e.to_string()))?;
        Ok(spec)
    }

    /// Everything checkable before numerical work.
    pub fn validate(&self) -> Result<PotentialSpec, ConfigError> {
        let spec = self.potential_spec()?;
        let kind = spec.kind;
        let g = &self.grid;
        if g.n < 2 {
            return Err(ConfigError::at("grid.n", "needs at least 2 points"));
        }
        if !(g.r_max > 0.0 && g.r_max.is_finite()) {
            return Err(ConfigError::at("grid.r_max", "must be finite and positive"));
        }
        if !(g.rel_tol > 0.0 && g.rel_tol < 1.0) {
            return Err(ConfigError::at("grid.rel_tol", "must lie in (0, 1)"));
        }
        if self.checks.is_empty() {
            return Err(ConfigError::at("checks", "no checks configured"));
        }
        let mut ids = HashSet::new();
        for (i, c) in self.checks.iter().enumerate() {
            let p = format!("checks[{i}]");
            if !safe_name(&c.id) {
                return Err(ConfigError::at(&format!("{p}.id"), "ids use letters, digits, '_', '-' and '.'"));
            }
            if !ids.insert(c.id.as_str()) {
                return Err(ConfigError::at(&format!("{p}.id"), &format!("duplicate id `{}`", c.id)));
            }
            validate_check(&c.kind, kind, &p)?;
        }
        let mut files = HashSet::new();
        for (i, t) in self.output.tables.iter().enumerate() {
            let p = format!("output.tables[{i}]");
            if !safe_name(t.file()) || t.file() == "report.json" {
                return Err(ConfigError::at(&format!("{p}.file"), "not a plain file name"));
            }
            if !files.insert(t.file()) || ids.iter().any(|id| format!("{id}.csv") == t.file()) {
                return Err(ConfigError::at(&format!("{p}.file"), "file name collides with another output"));
            }
            if let TableConfig::Weight { weight, .. } = t {
                validate_weight(weight, kind, &format!("{p}.weight"))?;
            }
        }
        Ok(spec)
    }
}

fn positive(v: f64, path: &str) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::at(path, &format!("must be finite and positive, got {v}")))
    }
}

fn validate_families(fams: &[FamilySpec], kind: MeasureKind, path: &str) -> Result<(), ConfigError> {
    if fams.is_empty() {
        return Err(ConfigError::at(path, "at least one family is needed"));
    }
    for (j, f) in fams.iter().enumerate() {
        let p = format!("{path}[{j}]");
        let radial_only = matches!(f, FamilySpec::RadialProducts { .. });
        let line_only = matches!(f, FamilySpec::Translates { .. } | FamilySpec::HermiteLike { .. });
        if radial_only && kind == MeasureKind::OneDim {
            return Err(ConfigError::at(&p, "radial_products needs a radial measure"));
        }
        if line_only && kind != MeasureKind::OneDim {
            return Err(ConfigError::at(&p, &format!("{} needs a one_dim measure", f.tag())));
        }
        let ranges = match f {
            FamilySpec::ExpTilts { lambda } => vec![lambda],
            FamilySpec::Translates { shift } => vec![shift],
            FamilySpec::LipschitzBumps { centers, .. } => vec![centers],
            FamilySpec::HermiteLike { amplitude, .. } => vec![amplitude],
            FamilySpec::RadialProducts { lambda, .. } => vec![lambda],
        };
        for r in ranges {
            r.validate().map_err(|e| ConfigError::at(&p, &e.to_string()))?;
        }
    }
    Ok(())
}

fn validate_beta(b: &BetaConfig, path: &str) -> Result<(), ConfigError> {
    let r = match b {
        BetaConfig::ExpPower { c, delta } => wlsi::funcineq::BetaProfile::exp_power(*c, *delta),
        BetaConfig::Table { r, log_beta } => wlsi::funcineq::BetaProfile::table(r.clone(), log_beta.clone()),
    };
    r.map(|_| ()).map_err(|e| ConfigError::at(path, &e.to_string()))
}

fn validate_weight(w: &WeightConfig, kind: MeasureKind, path: &str) -> Result<(), ConfigError> {
    match w {
        WeightConfig::LineTransport if kind != MeasureKind::OneDim => {
            Err(ConfigError::at(path, "line_transport needs a one_dim measure"))
        }
        WeightConfig::RadialTransport { .. } if kind == MeasureKind::OneDim => {
            Err(ConfigError::at(path, "radial_transport needs a radial measure"))
        }
        WeightConfig::RadialTransport { eps_grid: Some(g) } if g.is_empty() || g.iter().any(|e| !(*e > 0.0)) => {
            Err(ConfigError::at(&format!("{path}.eps_grid"), "needs positive values"))
        }
        WeightConfig::TailSup { beta } => validate_beta(beta, &format!("{path}.beta")),
        WeightConfig::PowerEnvelope { c, theta } => {
            positive(*c, &format!("{path}.c"))?;
            if let Some(t) = theta {
                positive(*t, &format!("{path}.theta"))?;
            }
            Ok(())
        }
        WeightConfig::Constant { c } => positive(*c, &format!("{path}.c")),
        _ => Ok(()),
    }
}

fn validate_distance(d: &DistanceConfig, kind: MeasureKind, path: &str) -> Result<(), ConfigError> {
    match d {
        DistanceConfig::WeightedGeodesic { weight } => {
            if kind != MeasureKind::OneDim {
                return Err(ConfigError::at(path, "weighted_geodesic is computed on the line only"));
            }
            validate_weight(weight, kind, &format!("{path}.weight"))
        }
        DistanceConfig::RhoTilde { delta_exp } | DistanceConfig::PowerComparison { delta_exp } => {
            if !(*delta_exp > 0.0 && *delta_exp < 2.0) {
                return Err(ConfigError::at(&format!("{path}.delta_exp"), "must lie in (0, 2)"));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn validate_check(c: &CheckKind, kind: MeasureKind, p: &str) -> Result<(), ConfigError> {
    if let Some(f) = c.families() {
        validate_families(f, kind, &format!("{p}.families"))?;
    }
    match c {
        CheckKind::Sp { beta, r_grid, .. } => {
            validate_beta(beta, &format!("{p}.beta"))?;
            r_grid.validate(&format!("{p}.r_grid"), true, false)
        }
        CheckKind::Wlsi { weight, c_target, .. } => {
            validate_weight(weight, kind, &format!("{p}.weight"))?;
            c_target.map_or(Ok(()), |c| positive(c, &format!("{p}.c_target")))
        }
        CheckKind::Talagrand { cost, c_target, .. } => {
            if kind != MeasureKind::OneDim {
                return Err(ConfigError::at(p, "transport-cost checks run on one_dim measures"));
            }
            match cost {
                CostConfig::Distance { distance, p: pw } => {
                    validate_distance(distance, kind, &format!("{p}.cost.distance"))?;
                    if matches!(distance, DistanceConfig::RhoTilde { .. } | DistanceConfig::PowerComparison { .. }) {
                        return Err(ConfigError::at(
                            &format!("{p}.cost.distance"),
                            "this distance is not a monotone function of one coordinate; no quantile coupling",
                        ));
                    }
                    if !(*pw >= 1.0 && pw.is_finite()) {
                        return Err(ConfigError::at(&format!("{p}.cost.p"), "must be >= 1"));
                    }
                }
                CostConfig::Power { p: pw } if !(*pw >= 1.0 && pw.is_finite()) => {
                    return Err(ConfigError::at(&format!("{p}.cost.p"), "must be >= 1"));
                }
                CostConfig::QuadraticThenPower { a, delta_exp } => {
                    positive(*a, &format!("{p}.cost.a"))?;
                    if *delta_exp < 1.0 {
                        return Err(ConfigError::at(
                            &format!("{p}.cost.delta_exp"),
                            "cost is not convex for exponents below 1",
                        ));
                    }
                }
                CostConfig::Exp { c1 } if !(*c1 >= 0.0 && c1.is_finite()) => {
                    return Err(ConfigError::at(&format!("{p}.cost.c1"), "must be finite and >= 0"));
                }
                CostConfig::RhoTildeSq { .. } => {
                    return Err(ConfigError::at(
                        &format!("{p}.cost"),
                        "rho_tilde_sq is not convex in x - y; the monotone coupling is not optimal",
                    ));
                }
                _ => {}
            }
            c_target.map_or(Ok(()), |c| positive(c, &format!("{p}.c_target")))
        }
        CheckKind::Hwi { weight, .. } => match weight {
            Some(w) => validate_weight(w, kind, &format!("{p}.weight")),
            None => Ok(()),
        },
        CheckKind::Deviation { rate, radii, distance, .. } => {
            if kind != MeasureKind::OneDim {
                return Err(ConfigError::at(p, "deviation checks use half-lines on the line"));
            }
            positive(rate.c, &format!("{p}.rate.c"))?;
            if !(rate.p >= 1.0 && rate.p.is_finite()) {
                return Err(ConfigError::at(&format!("{p}.rate.p"), "must be >= 1"));
            }
            radii.validate(&format!("{p}.radii"), true, false)?;
            validate_distance(distance, kind, &format!("{p}.distance"))
        }
        CheckKind::BetaEstimate { n, r_grid, restarts, safety, .. } => {
            if kind != MeasureKind::OneDim {
                return Err(ConfigError::at(p, "rate estimation runs on one_dim measures"));
            }
            if n.is_some_and(|n| n < 2) {
                return Err(ConfigError::at(&format!("{p}.n"), "needs at least 2 points"));
            }
            if *restarts > 1000 {
                return Err(ConfigError::at(&format!("{p}.restarts"), "at most 1000"));
            }
            if !(*safety >= 1.0 && safety.is_finite()) {
                return Err(ConfigError::at(&format!("{p}.safety"), "must be >= 1"));
            }
            r_grid.validate(&format!("{p}.r_grid"), true, true)
        }
        CheckKind::BetaFromMoments { k, c0, r_grid, s_grid, delta, chain_r_grid, .. } => {
            if !(*k >= 0.0 && k.is_finite()) {
                return Err(ConfigError::at(&format!("{p}.k"), "must be finite and >= 0"));
            }
            positive(*c0, &format!("{p}.c0"))?;
            positive(*delta, &format!("{p}.delta"))?;
            r_grid.validate(&format!("{p}.r_grid"), true, true)?;
            if let Some(s) = s_grid {
                if !(s.s_min > 0.0 && s.s_max > s.s_min && s.points >= 2) {
                    return Err(ConfigError::at(&format!("{p}.s_grid"), "needs 0 < s_min < s_max and points >= 2"));
                }
            }
            match chain_r_grid {
                Some(g) => g.validate(&format!("{p}.chain_r_grid"), true, false),
                None => Ok(()),
            }
        }
        CheckKind::Envelope { weight, theta, points, c_target } => {
            validate_weight(weight, kind, &format!("{p}.weight"))?;
            positive(*theta, &format!("{p}.theta"))?;
            points.validate(&format!("{p}.points"), false, false)?;
            c_target.map_or(Ok(()), |c| positive(c, &format!("{p}.c_target")))
        }
    }
}

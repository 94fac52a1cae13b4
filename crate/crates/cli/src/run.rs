//! Turning validated check configurations into library calls.

use serde_json::{json, Value};
use wlsi::funcineq::{
    beta_from_moments, check_chain, check_envelope, check_hwi, check_super_poincare, check_talagrand, check_wlsi,
    deviation_check, estimate_beta_table, fit_exp_power, BetaProfile, DeviationSpec, HalfLine, InequalityReport,
    RateFunction, TestFunctionFamily, TransportCost,
};
use wlsi::measure::{discretize, PotentialMeasure};
use wlsi::ot::CostFn;
use wlsi::transport::{
    build_map, weight_1d, weight_envelope, weight_from_beta, weight_radial, DistanceEvaluator, WeightProfile,
};
use wlsi::{Error, Result};

use crate::config::{BetaConfig, CheckKind, CostConfig, DistanceConfig, EventConfig, GridConfig, WeightConfig};
use wlsi::funcineq::FamilySpec;

pub fn beta_profile(b: &BetaConfig) -> Result<BetaProfile> {
    match b {
        BetaConfig::ExpPower { c, delta } => BetaProfile::exp_power(*c, *delta),
        BetaConfig::Table { r, log_beta } => BetaProfile::table(r.clone(), log_beta.clone()),
    }
}

pub fn build_weight(mu: &PotentialMeasure, w: &WeightConfig) -> Result<WeightProfile> {
    match w {
        WeightConfig::LineTransport => weight_1d(mu),
        WeightConfig::RadialTransport { eps_grid } => weight_radial(mu, eps_grid.clone()),
        WeightConfig::TailSup { beta } => weight_from_beta(mu, &beta_profile(beta)?),
        WeightConfig::PowerEnvelope { c, theta } => weight_envelope(mu, *c, *theta),
        WeightConfig::Constant { c } => WeightProfile::constant(*c),
    }
}

fn build_distance(mu: &PotentialMeasure, d: &DistanceConfig) -> Result<DistanceEvaluator> {
    match d {
        DistanceConfig::Euclidean => Ok(DistanceEvaluator::Euclidean),
        DistanceConfig::Pullback => Ok(DistanceEvaluator::Pullback(build_map(mu)?)),
        DistanceConfig::WeightedGeodesic { weight } => Ok(DistanceEvaluator::WeightedGeodesic(build_weight(mu, weight)?)),
        DistanceConfig::RhoTilde { delta_exp } => DistanceEvaluator::rho_tilde(*delta_exp),
        DistanceConfig::PowerComparison { delta_exp } => DistanceEvaluator::power_comparison(*delta_exp),
    }
}

fn build_cost(mu: &PotentialMeasure, c: &CostConfig) -> Result<TransportCost> {
    Ok(match c {
        CostConfig::Distance { distance, p } => TransportCost::Distance { distance: build_distance(mu, distance)?, p: *p },
        CostConfig::Power { p } => TransportCost::Cost(CostFn::power(*p)?),
        CostConfig::QuadraticThenPower { a, delta_exp } => TransportCost::Cost(CostFn::quadratic_then_power(*a, *delta_exp)?),
        CostConfig::Exp { c1 } => TransportCost::Cost(CostFn::ExpCost { c1: *c1 }),
        CostConfig::PullbackSq => TransportCost::Cost(CostFn::PullbackSq(build_map(mu)?)),
        CostConfig::RhoTildeSq { delta_exp } => TransportCost::Cost(CostFn::RhoTildeSq { delta_exp: *delta_exp }),
    })
}

fn build_families(mu: &PotentialMeasure, specs: &[FamilySpec]) -> Result<TestFunctionFamily> {
    let fams = specs.iter().map(|f| f.build(mu)).collect::<Result<Vec<_>>>()?;
    TestFunctionFamily::concat(fams)
}

fn table_json(r: &[f64], log_beta: &[f64]) -> Value {
    json!({ "r": r, "log_beta": log_beta })
}

/// Run one check. The second value holds check-specific extras for the
/// report, such as estimated rates or fitted constants.
pub fn run_check(
    mu: &PotentialMeasure,
    grid: &GridConfig,
    kind: &CheckKind,
    seed: u64,
) -> Result<(InequalityReport, Option<Value>)> {
    match kind {
        CheckKind::Sp { beta, r_grid, families } => {
            let fam = build_families(mu, families)?;
            Ok((check_super_poincare(mu, &beta_profile(beta)?, &r_grid.values(), &fam)?, None))
        }
        CheckKind::Wlsi { weight, families, c_target } => {
            let w = build_weight(mu, weight)?;
            let fam = build_families(mu, families)?;
            Ok((check_wlsi(mu, &w, &fam, *c_target)?, None))
        }
        CheckKind::Talagrand { cost, families, c_target } => {
            let cost = build_cost(mu, cost)?;
            let fam = build_families(mu, families)?;
            let rep = check_talagrand(mu, &fam, &cost, *c_target)?;
            Ok((rep, Some(json!({ "cost": cost.name() }))))
        }
        CheckKind::Hwi { weight, families, form } => {
            let map = build_map(mu)?;
            let w = match weight {
                Some(w) => build_weight(mu, w)?,
                None if mu.is_radial() => weight_radial(mu, None)?,
                None => weight_1d(mu)?,
            };
            let fam = build_families(mu, families)?;
            Ok((check_hwi(mu, &w, &map, &fam, *form)?, None))
        }
        CheckKind::Deviation { rate, event, radii, distance } => {
            let spec = DeviationSpec {
                rate: RateFunction::new(rate.c, rate.p)?,
                event: match event {
                    EventConfig::Below(a) => HalfLine::Below(*a),
                    EventConfig::Above(a) => HalfLine::Above(*a),
                },
                radii: radii.values(),
                distance: build_distance(mu, distance)?,
            };
            Ok((deviation_check(mu, &spec)?, None))
        }
        CheckKind::BetaEstimate { n, scheme, r_grid, restarts, safety, families } => {
            let n = n.unwrap_or(grid.n);
            let g = discretize(mu, n, *scheme)?;
            let rs = r_grid.values();
            let table = estimate_beta_table(&g, &rs, *restarts, seed)?;
            let BetaProfile::Table { r, log_beta } = &table else {
                return Err(Error::InvalidParameter("estimator returned a closed form".into()));
            };
            let scaled = BetaProfile::table(r.clone(), log_beta.iter().map(|v| v + safety.ln()).collect())?;
            let fam = build_families(mu, families)?;
            let rep = check_super_poincare(mu, &scaled, &rs, &fam)?;
            let details = json!({ "n": n, "safety": safety, "estimate": table_json(r, log_beta) });
            Ok((rep, Some(details)))
        }
        CheckKind::BetaFromMoments { k, c0, r_grid, s_grid, delta, chain_r_grid, families } => {
            let rs = r_grid.values();
            let table = beta_from_moments(mu, *k, *c0, &rs, &s_grid.unwrap_or_default())?;
            let fitted = fit_exp_power(&table, *delta)?;
            let BetaProfile::ExpPower { c, .. } = fitted else {
                return Err(Error::InvalidParameter("fit returned a table".into()));
            };
            let w = weight_from_beta(mu, &fitted)?;
            let fam = build_families(mu, families)?;
            let chain_rs = chain_r_grid.as_ref().map_or_else(|| rs.clone(), |g| g.values());
            let rep = check_chain(mu, &w, c, &chain_rs, &fam)?;
            let mut details = json!({ "c": c, "delta": delta, "eta_sup": w.eta_sup() });
            if let BetaProfile::Table { r, log_beta } = &table {
                details["moments"] = table_json(r, log_beta);
            }
            Ok((rep, Some(details)))
        }
        CheckKind::Envelope { weight, theta, points, c_target } => {
            let w = build_weight(mu, weight)?;
            Ok((check_envelope(mu, &w, *theta, &points.values(), *c_target)?, None))
        }
    }
}

//! Frozen finite-n thresholds, read from `data/regression.toml`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const SOURCE: &str = include_str!("../data/regression.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionBounds {
    pub version: u32,
    pub limit_law: LimitLaw,
    pub equilibrium: Equilibrium,
    pub essential_min: EssentialMin,
    pub flow_bound: FlowBound,
    pub ellipse: Ellipse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub ks_max_at_largest_n: f64,
    pub ks_trend_slack: f64,
    pub ks_chebyshev_400_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub tol_support: f64,
    pub tol_exterior: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialMin {
    pub slack_flow_n400: f64,
    pub slack_chebyshev_t0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowBound {
    pub min_slack: f64,
    pub trend_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub closed_vs_brute: f64,
    pub identity: f64,
    pub optimal_a: f64,
}

/// The thresholds compiled into this build.
pub fn bounds() -> &'static RegressionBounds {
    static PARSED: OnceLock<RegressionBounds> = OnceLock::new();
    PARSED.get_or_init(|| toml::from_str(SOURCE).expect("data/regression.toml is well formed"))
}

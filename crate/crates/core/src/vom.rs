//! Value of mediation: best mediated welfare over best cheap-talk welfare.
//!
//! Conventions for a zero denominator: `0/0` is 1 and `x/0` is +infinity.
//! When the cheap-talk side is only bracketed the ratio is an interval.

use serde::{Deserialize, Serialize};

use crate::binary::{self, CheapTalkMethod};
use crate::error::{Error, Result};
use crate::game::{Game, Welfare};
use crate::mediated;
use crate::oracle;
use crate::rational::Rational;

/// Cheap-talk welfare established outside the tool, with its justification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: Rational,
    pub citation: String,
}

impl CertifiedValue {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: CertifiedValue = serde_json::from_str(text)?;
        if v.value.is_negative() {
            return Err(Error::InvalidArgument("certified value is negative".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CtSource {
    /// Binary-game characterization when it applies, one-round oracle otherwise.
    Auto,
    Certified(CertifiedValue),
    /// Insist on the binary characterization; fails on other games.
    ForceTheorem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CtValue {
    Exact { value: Rational },
    Bracket { lower: Rational, upper: Rational },
    Certified { value: Rational, citation: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VomValue {
    Finite { value: Rational },
    PlusInfinity,
    FiniteInterval { lo: Rational, hi: Rational },
    UnboundedAbove { lo: Rational },
}

impl VomValue {
    /// `numerator / denominator` with the zero conventions.
    pub fn ratio(numerator: &Rational, denominator: &Rational) -> VomValue {
        if denominator.is_zero() {
            if numerator.is_zero() {
                VomValue::Finite {
                    value: Rational::one(),
                }
            } else {
                VomValue::PlusInfinity
            }
        } else {
            VomValue::Finite {
                value: numerator / denominator,
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, VomValue::Finite { .. })
    }
}

impl std::fmt::Display for VomValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VomValue::Finite { value } => write!(f, "{value}"),
            VomValue::PlusInfinity => write!(f, "+inf"),
            VomValue::FiniteInterval { lo, hi } => write!(f, "[{lo}, {hi}]"),
            VomValue::UnboundedAbove { lo } => write!(f, "[{lo}, +inf)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VomMethod {
    /// Binary game, cheap-talk optimum pinned to the mediated one.
    BinaryExact,
    /// Caller-supplied cheap-talk value.
    Certified,
    /// One-round oracle lower bound, mediated value as upper bound.
    OracleBracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MediationValue {
    pub mediated_value: Rational,
    pub ct_value: CtValue,
    pub value: VomValue,
    pub method: VomMethod,
}

fn bracket(mediated_value: Rational, lower: Rational) -> Result<MediationValue> {
    if lower > mediated_value {
        return Err(Error::SolverInvariant(format!(
            "cheap-talk lower bound {lower} exceeds mediated optimum {mediated_value}"
        )));
    }
    if lower == mediated_value {
        return exact(mediated_value.clone(), mediated_value, VomMethod::OracleBracket);
    }
    let value = if lower.is_zero() {
        // mediated > lower = 0 here
        VomValue::UnboundedAbove {
            lo: Rational::one(),
        }
    } else {
        VomValue::FiniteInterval {
            lo: Rational::one(),
            hi: &mediated_value / &lower,
        }
    };
    Ok(MediationValue {
        ct_value: CtValue::Bracket {
            lower,
            upper: mediated_value.clone(),
        },
        mediated_value,
        value,
        method: VomMethod::OracleBracket,
    })
}

fn exact(mediated_value: Rational, ct: Rational, method: VomMethod) -> Result<MediationValue> {
    let value = VomValue::ratio(&mediated_value, &ct);
    if let VomValue::Finite { value: v } = &value {
        if *v < Rational::one() {
            return Err(Error::SolverInvariant(format!(
                "value of mediation {v} below 1"
            )));
        }
    }
    Ok(MediationValue {
        mediated_value,
        ct_value: CtValue::Exact { value: ct },
        value,
        method,
    })
}

pub fn value_of_mediation(game: &Game, welfare: &Welfare, ct_source: &CtSource) -> Result<MediationValue> {
    let mediated_value = mediated::maximize_welfare(game, welfare)?.value;
    match ct_source {
        CtSource::Certified(cert) if cert.value > mediated_value => Err(Error::InvalidArgument(format!(
            "certified cheap-talk value {} exceeds the mediated optimum {mediated_value}",
            cert.value
        ))),
        CtSource::Certified(cert) => Ok(MediationValue {
            value: VomValue::ratio(&mediated_value, &cert.value),
            mediated_value,
            ct_value: CtValue::Certified {
                value: cert.value.clone(),
                citation: cert.citation.clone(),
            },
            method: VomMethod::Certified,
        }),
        CtSource::ForceTheorem => {
            if !game.is_binary() {
                return Err(Error::NotBinary(game.num_actions()));
            }
            if !game.check_monotone(welfare)?.is_monotone() {
                return Err(Error::NotMonotone);
            }
            from_binary(game, welfare, mediated_value)
        }
        CtSource::Auto => {
            if game.is_binary() && game.check_monotone(welfare)?.is_monotone() {
                return from_binary(game, welfare, mediated_value);
            }
            bracket(mediated_value, oracle::best_welfare(game, welfare)?)
        }
    }
}

fn from_binary(game: &Game, welfare: &Welfare, mediated_value: Rational) -> Result<MediationValue> {
    let ct = binary::cheaptalk_max_binary(game, welfare)?;
    match ct.method {
        CheapTalkMethod::Exact => exact(mediated_value, ct.value, VomMethod::BinaryExact),
        CheapTalkMethod::LowerBound => bracket(mediated_value, ct.value),
    }
}

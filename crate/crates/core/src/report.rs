//! One-shot analysis bundle combining every component.

use serde::Serialize;

use crate::binary::{self, BinaryAnalysis, CheapTalkValue, Point};
use crate::error::Result;
use crate::game::{Game, MonotoneCheck, Player, Welfare};
use crate::mediated::{self, WelfareOptimum};
use crate::oracle::{self, PayoffHull};
use crate::rational::Rational;
use crate::vom::{self, CtSource, MediationValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WelfareTag {
    /// Supplied by the caller.
    Supplied,
    /// Defaulted to `u_s + u_r`, monotone by construction.
    DerivedMonotone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MediatedSection {
    #[serde(flatten)]
    pub optimum: WelfareOptimum,
    pub u_s: Rational,
    pub u_r: Rational,
    pub certificate_passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinarySection {
    pub analysis: BinaryAnalysis,
    pub cheap_talk: CheapTalkValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleSection {
    pub alphabet_size: usize,
    pub equilibria: usize,
    pub hull: PayoffHull,
    /// Sender mixing is not enumerated; values are lower bounds.
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub types: Vec<String>,
    pub actions: Vec<String>,
    pub welfare_tag: WelfareTag,
    pub welfare: Welfare,
    pub monotone: MonotoneCheck,
    pub mediated: MediatedSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinarySection>,
    pub oracle: OracleSection,
    pub value_of_mediation: MediationValue,
}

pub fn report(game: &Game, welfare: Option<&Welfare>, ct_source: &CtSource) -> Result<Report> {
    let (welfare, welfare_tag) = match welfare {
        Some(w) => (w.clone(), WelfareTag::Supplied),
        None => (Welfare::sum(game)?, WelfareTag::DerivedMonotone),
    };
    let monotone = game.check_monotone(&welfare)?;

    let (mediated, (oracle_set, vom)) = rayon::join(
        || mediated::maximize_welfare(game, &welfare),
        || {
            rayon::join(
                || oracle::enumerate_equilibria(game, game.num_types(), Some(&welfare)),
                || vom::value_of_mediation(game, &welfare, ct_source),
            )
        },
    );
    let optimum = mediated?;
    let oracle_set = oracle_set?;
    let mediated = MediatedSection {
        u_s: game.expected_utility(&optimum.outcome, Player::Sender)?,
        u_r: game.expected_utility(&optimum.outcome, Player::Receiver)?,
        certificate_passes: optimum.certificate.is_equilibrium(),
        optimum,
    };
    let binary = if game.is_binary() {
        Some(BinarySection {
            analysis: binary::classify(game)?,
            cheap_talk: binary::cheaptalk_max_binary(game, &welfare)?,
        })
    } else {
        None
    };
    Ok(Report {
        types: game.types().to_vec(),
        actions: game.actions().to_vec(),
        welfare_tag,
        welfare,
        monotone,
        mediated,
        binary,
        oracle: OracleSection {
            alphabet_size: oracle_set.alphabet_size,
            equilibria: oracle_set.members.len(),
            hull: oracle_set.payoff_hull(),
            note: "one round, pure sender rules, convexified; lower bound on cheap-talk payoffs",
        },
        value_of_mediation: vom?,
    })
}

/// Rows `section,index,x,y` with decimal (lossy) coordinates.
pub fn points_csv(section: &str, points: &[Point]) -> String {
    points
        .iter()
        .enumerate()
        .map(|(i, (x, y))| format!("{section},{i},{},{}\n", x.to_f64(), y.to_f64()))
        .collect()
}

pub const CSV_HEADER: &str = "# decimal rendering, lossy\nsection,index,x,y\n";

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Region vertices in `(p0, p1)` (binary games) and the equilibrium
    /// payoff hull in `(u_s, u_r)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        if let Some(b) = &self.binary {
            out += &points_csv("region", &b.analysis.region_vertices);
        }
        out += &points_csv("hull", &self.oracle.hull.vertices);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::Case;
    use crate::fixtures;
    use crate::rational::rat;
    use crate::vom::VomValue;

    #[test]
    fn non_monotone_fixture_report() {
        let (game, w) = fixtures::non_monotone_binary();
        let r = report(&game, Some(&w), &CtSource::Certified(fixtures::non_monotone_binary_ct())).unwrap();
        assert_eq!(r.binary.as_ref().unwrap().analysis.case, Case::Aligned);
        assert_eq!(r.mediated.optimum.value, rat(1, 4));
        assert!(matches!(r.monotone, MonotoneCheck::Violation { .. }));
        assert_eq!(r.value_of_mediation.value, VomValue::PlusInfinity);
        assert!(r.to_csv().contains("region,"));
    }

    #[test]
    fn cyclic_fixture_report() {
        let (game, _) = fixtures::cyclic_three_action();
        let r = report(&game, None, &CtSource::Auto).unwrap();
        assert_eq!(r.welfare_tag, WelfareTag::DerivedMonotone);
        assert!(r.mediated.certificate_passes);
        assert_eq!((r.mediated.u_s.clone(), r.mediated.u_r.clone()), (rat(1, 2), rat(1, 2)));
        assert!(r.oracle.hull.max_u_s < rat(1, 2));
        assert!(r.binary.is_none());
        let json = r.to_json();
        assert!(json.contains("\"derived-monotone\""));
        assert!(json.contains("\"1/2\""));
    }
}

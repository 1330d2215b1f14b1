//! Closed-form analysis of games with two receiver actions.
//!
//! Types split into `zero` (the sender prefers action 0, or is indifferent
//! while the receiver prefers 0) and `one` (everything else). Equilibrium
//! outcomes that matter are two-valued: probability `p0` of action 0 on the
//! `zero` cell and `p1` on the `one` cell, with `p1 <= p0`. Receiver
//! obedience then reduces to the single inequality
//!
//! ```text
//! p0 * b0 + p1 * b1 >= max(0, b0 + b1)
//! ```
//!
//! where `a{i}{j} = sum over cell j of q(w) u_r(w, i)`, `b0 = a00 - a10` and
//! `b1 = a01 - a11`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Outcome, Welfare};
use crate::mediated;
use crate::oracle;
use crate::rational::Rational;

pub type Point = (Rational, Rational);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub zero: Vec<usize>,
    pub one: Vec<usize>,
}

impl Partition {
    pub fn cell_of(&self, t: usize) -> usize {
        if self.zero.contains(&t) {
            0
        } else {
            1
        }
    }
}

/// `a{action}{cell}` and the derived `b0`, `b1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coefficients {
    pub a00: Rational,
    pub a10: Rational,
    pub a01: Rational,
    pub a11: Rational,
    pub b0: Rational,
    pub b1: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `b0 >= 0` and `b1 <= 0`: the receiver is happy to follow the sender's
    /// favourite action on each cell.
    Aligned,
    /// Only `p0 = p1 = 1` is feasible.
    OnlyConstantOne,
    /// Only `p0 = p1 = 0` is feasible.
    OnlyConstantZero,
    /// `b0 < 0`, `b1 > 0`, `b0 + b1 = 0`: exactly the diagonal `p0 = p1`.
    DiagonalOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryAnalysis {
    pub partition: Partition,
    pub coefficients: Coefficients,
    pub case: Case,
    /// Vertices of the feasible `(p0, p1)` region in counter-clockwise order.
    pub region_vertices: Vec<Point>,
    /// Point maximizing both players' utilities; `None` on the diagonal,
    /// where the best constant depends on the welfare function.
    pub optimal: Option<Point>,
}

fn require_binary(game: &Game) -> Result<()> {
    if game.is_binary() {
        Ok(())
    } else {
        Err(Error::NotBinary(game.num_actions()))
    }
}

pub fn partition_types(game: &Game) -> Result<Partition> {
    require_binary(game)?;
    let (mut zero, mut one) = (Vec::new(), Vec::new());
    for t in 0..game.num_types() {
        let (s0, s1) = (game.u_s(t, 0), game.u_s(t, 1));
        let prefers_zero = s0 > s1 || (s0 == s1 && game.u_r(t, 0) > game.u_r(t, 1));
        if prefers_zero {
            zero.push(t);
        } else {
            one.push(t);
        }
    }
    Ok(Partition { zero, one })
}

pub fn compute_coefficients(game: &Game) -> Result<Coefficients> {
    let partition = partition_types(game)?;
    Ok(coefficients_for(game, &partition))
}

fn coefficients_for(game: &Game, partition: &Partition) -> Coefficients {
    let a = |action: usize, cell: &[usize]| -> Rational {
        cell.iter()
            .map(|&t| &game.prior()[t] * game.u_r(t, action))
            .sum()
    };
    let a00 = a(0, &partition.zero);
    let a10 = a(1, &partition.zero);
    let a01 = a(0, &partition.one);
    let a11 = a(1, &partition.one);
    let b0 = &a00 - &a10;
    let b1 = &a01 - &a11;
    Coefficients {
        a00,
        a10,
        a01,
        a11,
        b0,
        b1,
    }
}

impl Coefficients {
    pub fn case(&self) -> Case {
        let sum = &self.b0 + &self.b1;
        if !self.b0.is_negative() && !self.b1.is_positive() {
            Case::Aligned
        } else if self.b1.is_positive() && sum.is_positive() {
            Case::OnlyConstantOne
        } else if sum.is_negative() {
            Case::OnlyConstantZero
        } else {
            Case::DiagonalOnly
        }
    }

    /// `0 <= p1 <= p0 <= 1` and the obedience inequality.
    pub fn admits(&self, p0: &Rational, p1: &Rational) -> bool {
        let zero = Rational::zero();
        if p1 < &zero || p1 > p0 || p0 > &Rational::one() {
            return false;
        }
        let lhs = p0 * &self.b0 + p1 * &self.b1;
        lhs >= zero && lhs >= &self.b0 + &self.b1
    }

    /// Half-planes `alpha * p0 + beta * p1 >= gamma` bounding the region.
    fn half_planes(&self) -> [(Rational, Rational, Rational); 5] {
        let (z, o) = (Rational::zero(), Rational::one());
        [
            (z.clone(), o.clone(), z.clone()),
            (-&o, z.clone(), -&o),
            (o.clone(), -&o, z.clone()),
            (self.b0.clone(), self.b1.clone(), z),
            (self.b0.clone(), self.b1.clone(), &self.b0 + &self.b1),
        ]
    }

    /// Exact vertices of the feasible region, by intersecting every pair of
    /// boundary lines and keeping the feasible intersections.
    pub fn region_vertices(&self) -> Vec<Point> {
        let planes = self.half_planes();
        let mut points = Vec::new();
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let (a1, b1, c1) = &planes[i];
                let (a2, b2, c2) = &planes[j];
                let det = a1 * b2 - a2 * b1;
                if det.is_zero() {
                    continue;
                }
                let p0 = (c1 * b2 - c2 * b1) / &det;
                let p1 = (a1 * c2 - a2 * c1) / &det;
                if self.admits(&p0, &p1) {
                    points.push((p0, p1));
                }
            }
        }
        convex_order(points)
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Monotone-chain hull: unique points, counter-clockwise, collinear points dropped.
pub(crate) fn convex_order(mut points: Vec<Point>) -> Vec<Point> {
    points.sort();
    points.dedup();
    if points.len() < 3 {
        return points;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &points {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in points.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn classify(game: &Game) -> Result<BinaryAnalysis> {
    let partition = partition_types(game)?;
    let coefficients = coefficients_for(game, &partition);
    let case = coefficients.case();
    let region_vertices = coefficients.region_vertices();
    let (z, o) = (Rational::zero(), Rational::one());
    let optimal = match case {
        Case::Aligned => Some((o, z)),
        Case::OnlyConstantOne => Some((o.clone(), o)),
        Case::OnlyConstantZero => Some((z.clone(), z)),
        Case::DiagonalOnly => None,
    };
    Ok(BinaryAnalysis {
        partition,
        coefficients,
        case,
        region_vertices,
        optimal,
    })
}

pub fn feasible_binary(game: &Game, p0: &Rational, p1: &Rational) -> Result<bool> {
    Ok(compute_coefficients(game)?.admits(p0, p1))
}

/// Outcome playing action 0 with probability `p0` on the zero cell and `p1`
/// on the one cell.
pub fn two_value_outcome(partition: &Partition, p0: &Rational, p1: &Rational) -> Result<Outcome> {
    let n = partition.zero.len() + partition.one.len();
    let probs: Vec<Rational> = (0..n)
        .map(|t| {
            if partition.cell_of(t) == 0 {
                p0.clone()
            } else {
                p1.clone()
            }
        })
        .collect();
    Outcome::from_action0_probabilities(&probs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryOptimum {
    pub value: Rational,
    pub p0: Rational,
    pub p1: Rational,
    pub outcome: Outcome,
}

/// Welfare-optimal equilibrium outcome for monotone welfare.
pub fn optimal_binary_outcome(game: &Game, welfare: &Welfare) -> Result<BinaryOptimum> {
    let analysis = classify(game)?;
    if !game.check_monotone(welfare)?.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let at = |p0: Rational, p1: Rational| -> Result<BinaryOptimum> {
        let outcome = two_value_outcome(&analysis.partition, &p0, &p1)?;
        let value = game.expected_welfare(welfare, &outcome)?;
        Ok(BinaryOptimum {
            value,
            p0,
            p1,
            outcome,
        })
    };
    match analysis.optimal {
        Some((p0, p1)) => at(p0, p1),
        None => {
            // Welfare is linear along the diagonal, so an endpoint is optimal;
            // ties go to p = 0, the lexicographically smaller table.
            let low = at(Rational::zero(), Rational::zero())?;
            let high = at(Rational::one(), Rational::one())?;
            Ok(if high.value > low.value { high } else { low })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheapTalkMethod {
    /// A cheap-talk equilibrium reaches the mediated optimum.
    Exact,
    /// Best welfare found among enumerated one-round equilibria.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheapTalkValue {
    pub value: Rational,
    pub method: CheapTalkMethod,
}

/// Maximum welfare reachable with unmediated cheap talk.
///
/// Cheap-talk welfare never exceeds the mediated optimum, so any cheap-talk
/// equilibrium reaching that optimum pins the value exactly. Candidates are
/// the closed-form outcome (monotone welfare only) and the best one-round
/// equilibrium. Otherwise the best candidate is reported as a lower bound.
pub fn cheaptalk_max_binary(game: &Game, welfare: &Welfare) -> Result<CheapTalkValue> {
    require_binary(game)?;
    let mediated = mediated::maximize_welfare(game, welfare)?.value;
    let mut lower = None;
    if game.check_monotone(welfare)?.is_monotone() {
        lower = Some(optimal_binary_outcome(game, welfare)?.value);
    }
    if lower.as_ref() != Some(&mediated) {
        let found = oracle::best_welfare(game, welfare)?;
        lower = Some(match lower {
            Some(v) => v.max(found),
            None => found,
        });
    }
    let value = lower.expect("set above");
    let method = if value == mediated {
        CheapTalkMethod::Exact
    } else {
        CheapTalkMethod::LowerBound
    };
    Ok(CheapTalkValue { value, method })
}

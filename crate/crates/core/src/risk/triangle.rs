//! Indifference-curve diagnostics in a three-prize probability triangle.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::rational::{self, Rational};

use super::areu::AreuParams;
use super::lottery::{fosd, Lottery};
use super::RiskError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fanning {
    RiskAverseFanOut,
    RiskLovingFanIn,
    RiskNeutral,
    MixedViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanningReport {
    pub class: Fanning,
    pub grid_points: usize,
    /// Slope of mean-preserving-spread lines.
    #[serde(with = "rational::serde_str")]
    pub spread_slope: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_slope: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_slope: Rational,
    /// Dominance pairs `(better, worse)` where the better point is flatter.
    pub flatter_when_better: usize,
    /// Dominance pairs where the better point is steeper.
    pub steeper_when_better: usize,
    /// Intransitive triples among sampled binary menus (not enforced).
    pub transitivity_violations: usize,
}

fn on_grid(l: &Lottery, resolution: u32) -> bool {
    let r = BigInt::from(resolution);
    l.0.iter().all(|p| (r.clone() % p.denom()).is_zero())
}

/// Grid lotteries of the params, in order of their ids.
pub fn grid_points(params: &AreuParams, resolution: u32) -> Result<Vec<&String>, RiskError> {
    if params.prizes.len() != 3 {
        return Err(RiskError::NotATriangle(format!("{} prizes", params.prizes.len())));
    }
    if resolution == 0 {
        return Err(RiskError::NotATriangle("zero resolution".into()));
    }
    let pts: Vec<&String> = params
        .lotteries
        .iter()
        .filter(|(_, l)| on_grid(l, resolution))
        .map(|(id, _)| id)
        .collect();
    if pts.is_empty() {
        return Err(RiskError::NotATriangle(format!(
            "no lottery lies on the 1/{resolution} grid"
        )));
    }
    Ok(pts)
}

/// Indifference slope `dp_b/dp_w` at a point, from its own reference utility.
pub fn slope(u: &[Rational]) -> Rational {
    (&u[1] - &u[0]) / (&u[2] - &u[1])
}

/// Classifies risk attitude against spread lines and the direction of fanning.
pub fn fanning_classify(params: &AreuParams, resolution: u32) -> Result<FanningReport, RiskError> {
    params.validate()?;
    let pts = grid_points(params, resolution)?;
    let x = &params.prizes;
    let m0 = (&x[1] - &x[0]) / (&x[2] - &x[1]);
    let slopes: Vec<Rational> = pts.iter().map(|id| slope(&params.utilities[*id])).collect();
    let above = slopes.iter().any(|s| *s > m0);
    let below = slopes.iter().any(|s| *s < m0);
    let (mut flatter, mut steeper) = (0, 0);
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            if i != j && fosd(&params.lotteries[*a], &params.lotteries[*b])? {
                if slopes[i] < slopes[j] {
                    flatter += 1;
                } else if slopes[i] > slopes[j] {
                    steeper += 1;
                }
            }
        }
    }
    let class = match (above, below) {
        (false, false) => Fanning::RiskNeutral,
        (true, false) if flatter == 0 => Fanning::RiskAverseFanOut,
        (false, true) if steeper == 0 => Fanning::RiskLovingFanIn,
        _ => Fanning::MixedViolation,
    };
    Ok(FanningReport {
        class,
        grid_points: pts.len(),
        spread_slope: m0,
        min_slope: slopes.iter().min().unwrap().clone(),
        max_slope: slopes.iter().max().unwrap().clone(),
        flatter_when_better: flatter,
        steeper_when_better: steeper,
        transitivity_violations: sampled_intransitivity(params, &pts)?,
    })
}

/// Binary choices on the first 24 grid points, checked for intransitive triples.
fn sampled_intransitivity(params: &AreuParams, pts: &[&String]) -> Result<usize, RiskError> {
    let sample: Vec<String> = pts.iter().take(24).map(|s| (*s).clone()).collect();
    let k = sample.len();
    let mut weakly = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let menu = vec![sample[i].clone(), sample[j].clone()];
                weakly[i][j] = params.evaluate(&menu)?.contains(&sample[i]);
            }
        }
    }
    let mut bad = 0;
    for p in 0..k {
        for q in 0..k {
            for s in 0..k {
                if p != q && q != s && p != s && weakly[p][q] && weakly[q][s] && !weakly[p][s] {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

/// CSV rows `p_b,p_w,reference_id,utility_level` for every grid lottery.
pub fn triangle_csv(params: &AreuParams, resolution: u32) -> Result<String, RiskError> {
    params.validate()?;
    let pts = grid_points(params, resolution)?;
    let mut out = String::from("p_b,p_w,reference_id,utility_level\n");
    for id in pts {
        let l = &params.lotteries[id];
        let level = params.expected_utility(id, id)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            rational::format(&l.0[2]),
            rational::format(&l.0[0]),
            id,
            rational::format(&level)
        ));
    }
    Ok(out)
}

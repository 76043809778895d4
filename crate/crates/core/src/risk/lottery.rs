//! Prize sets, lotteries, and the dominance and spread orders between them.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::dataset::{ChoiceDataset, Payload, PayloadKind};
use crate::rational::{self, Rational};

use super::RiskError;

/// Strictly increasing prizes, at least two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrizeSet {
    prizes: Vec<Rational>,
}

impl PrizeSet {
    pub fn new(mut prizes: Vec<Rational>) -> Result<Self, RiskError> {
        prizes.sort();
        prizes.dedup();
        if prizes.len() < 2 {
            return Err(RiskError::TooFewPrizes);
        }
        Ok(PrizeSet { prizes })
    }

    pub fn prizes(&self) -> &[Rational] {
        &self.prizes
    }

    pub fn len(&self) -> usize {
        self.prizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prizes.is_empty()
    }

    pub fn best(&self) -> &Rational {
        self.prizes.last().unwrap()
    }

    pub fn worst(&self) -> &Rational {
        &self.prizes[0]
    }

    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        self.prizes.binary_search(x).ok()
    }

    /// Dense lottery from `(prize, probability)` pairs.
    pub fn lottery<'a, I>(&self, probs: I) -> Result<Lottery, RiskError>
    where
        I: IntoIterator<Item = (&'a Rational, &'a Rational)>,
    {
        let mut v = vec![Rational::zero(); self.len()];
        for (x, p) in probs {
            let i = self.index_of(x).ok_or_else(|| {
                RiskError::PrizeSetMismatch(format!("prize {} is not in the prize set", rational::format(x)))
            })?;
            v[i] += p;
        }
        Lottery::new(v)
    }

    pub fn degenerate(&self, i: usize) -> Lottery {
        let mut v = vec![Rational::zero(); self.len()];
        v[i] = Rational::one();
        Lottery(v)
    }
}

/// Probabilities indexed by a prize set's positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lottery(pub Vec<Rational>);

impl Lottery {
    pub fn new(probs: Vec<Rational>) -> Result<Self, RiskError> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(RiskError::BadLottery("negative probability".into()));
        }
        let total: Rational = probs.iter().sum();
        if total != Rational::one() {
            return Err(RiskError::BadLottery(format!(
                "probabilities sum to {}",
                rational::format(&total)
            )));
        }
        Ok(Lottery(probs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prob(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn expectation(&self, values: &[Rational]) -> Rational {
        self.0.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// `α·self + (1-α)·other`.
    pub fn mix(&self, alpha: &Rational, other: &Lottery) -> Lottery {
        let beta = Rational::one() - alpha;
        Lottery(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(p, q)| alpha * p + &beta * q)
                .collect(),
        )
    }

    fn cdf(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.0
            .iter()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.iter().any(|p| p.is_one())
    }
}

fn same_len(p: &Lottery, q: &Lottery) -> Result<(), RiskError> {
    if p.len() != q.len() {
        return Err(RiskError::PrizeSetMismatch(format!(
            "lotteries over {} and {} prizes",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// `p` first-order stochastically dominates `q`.
pub fn fosd(p: &Lottery, q: &Lottery) -> Result<bool, RiskError> {
    same_len(p, q)?;
    Ok(p != q && p.cdf().iter().zip(q.cdf()).all(|(a, b)| *a <= b))
}

/// `p` is a mean-preserving spread of `q`.
pub fn mps(prizes: &PrizeSet, p: &Lottery, q: &Lottery) -> Result<bool, RiskError> {
    same_len(p, q)?;
    if p.len() != prizes.len() {
        return Err(RiskError::PrizeSetMismatch(
            "lottery does not match the prize set".into(),
        ));
    }
    if p == q || p.expectation(prizes.prizes()) != q.expectation(prizes.prizes()) {
        return Ok(false);
    }
    let (fp, fq) = (p.cdf(), q.cdf());
    let mut area = Rational::zero();
    for i in 0..p.len() - 1 {
        area += (&fp[i] - &fq[i]) * (&prizes.prizes()[i + 1] - &prizes.prizes()[i]);
        if area.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves `p = β·q + (1-β)(α·δ_b + (1-α)·δ_w)` for `β ∈ [0,1)`, returning `(β, α)`.
pub fn spread_weights(p: &Lottery, q: &Lottery) -> Result<Option<(Rational, Rational)>, RiskError> {
    same_len(p, q)?;
    let n = p.len();
    let last = n - 1;
    let interior = 1..last;
    let beta = match interior.clone().find(|&i| !q.0[i].is_zero()) {
        Some(i) => &p.0[i] / &q.0[i],
        None => {
            if interior.clone().any(|i| !p.0[i].is_zero()) {
                return Ok(None);
            }
            Rational::zero()
        }
    };
    if beta >= Rational::one() || interior.clone().any(|i| p.0[i] != &beta * &q.0[i]) {
        return Ok(None);
    }
    let alpha = (&p.0[last] - &beta * &q.0[last]) / (Rational::one() - &beta);
    Ok(Some((beta, alpha)))
}

/// `p` is an extreme spread of `q`: `α` strictly inside `(q(b), 1-q(w))`.
pub fn extreme_spread(p: &Lottery, q: &Lottery) -> Result<bool, RiskError> {
    Ok(match spread_weights(p, q)? {
        Some((_, alpha)) => {
            let n = q.len();
            alpha > q.0[n - 1] && alpha < Rational::one() - &q.0[0]
        }
        None => false,
    })
}

/// Limit points of extreme spreads: the window is closed and `β` may be 0.
pub fn weak_extreme_spread(p: &Lottery, q: &Lottery) -> Result<bool, RiskError> {
    if p == q {
        return Ok(false);
    }
    Ok(match spread_weights(p, q)? {
        Some((_, alpha)) => {
            let n = q.len();
            alpha >= q.0[n - 1] && alpha <= Rational::one() - &q.0[0]
        }
        None => false,
    })
}

/// Recovers `(α, s)` with `p2 = α·p + (1-α)·s`, `q2 = α·q + (1-α)·s`, `α ∈ (0,1)`.
pub fn common_mixture(p: &Lottery, q: &Lottery, p2: &Lottery, q2: &Lottery) -> Option<(Rational, Lottery)> {
    let n = p.len();
    if q.len() != n || p2.len() != n || q2.len() != n || p == q {
        return None;
    }
    let mut alpha: Option<Rational> = None;
    for i in 0..n {
        let d = &p.0[i] - &q.0[i];
        let d2 = &p2.0[i] - &q2.0[i];
        if d.is_zero() {
            if !d2.is_zero() {
                return None;
            }
            continue;
        }
        let a = d2 / d;
        match &alpha {
            Some(b) if *b != a => return None,
            Some(_) => {}
            None => alpha = Some(a),
        }
    }
    let alpha = alpha?;
    if !rational::is_in_open_unit(&alpha) {
        return None;
    }
    let rest = Rational::one() - &alpha;
    let s: Vec<Rational> = (0..n).map(|i| (&p2.0[i] - &alpha * &p.0[i]) / &rest).collect();
    if s.iter().any(|x| x.is_negative()) {
        return None;
    }
    Some((alpha, Lottery(s)))
}

/// Lottery data extracted from a dataset, indexed like its alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LotteryData {
    pub prizes: PrizeSet,
    pub lotteries: Vec<Lottery>,
}

impl LotteryData {
    /// Prize set is the declared one, or else the union of supports.
    pub fn from_dataset(ds: &ChoiceDataset) -> Result<Self, RiskError> {
        if ds.kind() != PayloadKind::Lottery {
            return Err(RiskError::NotLotteryData(ds.kind()));
        }
        let supports: BTreeSet<Rational> = ds
            .alternatives()
            .iter()
            .filter_map(|a| match &a.payload {
                Payload::Lottery(m) => Some(m.keys().cloned()),
                _ => None,
            })
            .flatten()
            .collect();
        let prizes = match ds.declared_prizes() {
            Some(ps) => {
                if let Some(x) = supports.iter().find(|x| !ps.contains(x)) {
                    return Err(RiskError::PrizeSetMismatch(format!(
                        "prize {} is not declared",
                        rational::format(x)
                    )));
                }
                PrizeSet::new(ps.to_vec())?
            }
            None => PrizeSet::new(supports.into_iter().collect())?,
        };
        let lotteries = ds
            .alternatives()
            .iter()
            .map(|a| match &a.payload {
                Payload::Lottery(m) => prizes.lottery(m.iter()),
                _ => Err(RiskError::NotLotteryData(a.payload.kind())),
            })
            .collect::<Result<_, _>>()?;
        Ok(LotteryData { prizes, lotteries })
    }

    /// `riskier[i][j]`: `i` is a mean-preserving or extreme spread of `j`.
    pub fn riskier_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.lotteries.len();
        let mut m = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (p, q) = (&self.lotteries[i], &self.lotteries[j]);
                    m[i][j] = mps(&self.prizes, p, q).unwrap_or(false) || extreme_spread(p, q).unwrap_or(false);
                }
            }
        }
        m
    }
}

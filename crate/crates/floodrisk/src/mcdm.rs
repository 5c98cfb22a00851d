//! Regional vulnerability ranking by grey relational analysis (GRA) and
//! entropy-weighted TOPSIS, plus the rank-based premium tier partition.

use serde::Serialize;

use crate::data::Orientation;
use crate::error::Error;
use crate::Result;

/// Alternatives-by-criteria performance matrix with per-criterion
/// orientation.
#[derive(Debug, Clone)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    /// Row-major, one row per alternative.
    pub values: Vec<Vec<f64>>,
    pub orientations: Vec<Orientation>,
}

impl DecisionMatrix {
    pub fn new(
        alternatives: Vec<String>,
        criteria: Vec<String>,
        values: Vec<Vec<f64>>,
        orientations: Vec<Orientation>,
    ) -> Result<Self> {
        if values.len() != alternatives.len()
            || values.iter().any(|r| r.len() != criteria.len())
            || orientations.len() != criteria.len()
        {
            return Err(Error::Domain("decision matrix dimension mismatch".into()));
        }
        Ok(DecisionMatrix {
            alternatives,
            criteria,
            values,
            orientations,
        })
    }

    pub fn n(&self) -> usize {
        self.alternatives.len()
    }

    pub fn p(&self) -> usize {
        self.criteria.len()
    }

    fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |r| r[j])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightVector {
    pub w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|&x| x < 0.0) {
            return Err(Error::Domain("weights must be nonnegative".into()));
        }
        let s: f64 = w.iter().sum();
        if s <= 0.0 {
            return Err(Error::Domain("weights must not all be zero".into()));
        }
        Ok(WeightVector {
            w: w.into_iter().map(|x| x / s).collect(),
        })
    }

    pub fn equal(p: usize) -> Self {
        WeightVector {
            w: vec![1.0 / p as f64; p],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankMethod {
    Gra,
    Topsis,
}

/// Scores and 1-based ranks (1 = most vulnerable). Ties are broken by
/// alternative name for determinism.
#[derive(Debug, Clone, Serialize)]
pub struct RankResult {
    pub alternatives: Vec<String>,
    pub scores: Vec<f64>,
    pub ranks: Vec<usize>,
    pub method: RankMethod,
}

fn rank_descending(alternatives: &[String], scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| alternatives[a].cmp(&alternatives[b]))
    });
    let mut ranks = vec![0; scores.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    ranks
}

impl RankResult {
    fn new(m: &DecisionMatrix, scores: Vec<f64>, method: RankMethod) -> Self {
        let ranks = rank_descending(&m.alternatives, &scores);
        RankResult {
            alternatives: m.alternatives.clone(),
            scores,
            ranks,
            method,
        }
    }

    /// Alternatives ordered by rank.
    pub fn by_rank(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ranks.len()).collect();
        order.sort_by_key(|&i| self.ranks[i]);
        order
    }
}

/// Orientation-aware min-max normalization: benefit columns map to
/// (x-min)/(max-min), cost columns to (max-x)/(max-min).
pub fn normalize_minmax(m: &DecisionMatrix) -> Result<DecisionMatrix> {
    let mut values = m.values.clone();
    for j in 0..m.p() {
        let min = m.column(j).fold(f64::INFINITY, f64::min);
        let max = m.column(j).fold(f64::NEG_INFINITY, f64::max);
        if max <= min {
            return Err(Error::Domain(format!(
                "criterion '{}' is constant; cannot normalize",
                m.criteria[j]
            )));
        }
        for row in values.iter_mut() {
            row[j] = match m.orientations[j] {
                Orientation::Benefit => (row[j] - min) / (max - min),
                Orientation::Cost => (max - row[j]) / (max - min),
            };
        }
    }
    Ok(DecisionMatrix {
        alternatives: m.alternatives.clone(),
        criteria: m.criteria.clone(),
        values,
        // after orientation-aware normalization every column is benefit
        orientations: vec![Orientation::Benefit; m.p()],
    })
}

/// Grey relational coefficients against the all-ones reference sequence:
/// zeta*dmax / (|1 - x'| + zeta*dmax) with dmax the largest deviation.
pub fn gra_coefficients(m_norm: &DecisionMatrix, zeta: f64) -> Result<Vec<Vec<f64>>> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::Domain(format!(
            "distinguishing coefficient {zeta} outside (0,1]"
        )));
    }
    let dmax = m_norm
        .values
        .iter()
        .flatten()
        .map(|&x| (1.0 - x).abs())
        .fold(0.0_f64, f64::max);
    if dmax == 0.0 {
        return Err(Error::Domain(
            "all alternatives equal the reference sequence".into(),
        ));
    }
    Ok(m_norm
        .values
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| zeta * dmax / ((1.0 - x).abs() + zeta * dmax))
                .collect()
        })
        .collect())
}

/// Grey relational grade: weighted sum of coefficients, ranked descending.
pub fn gra_grade(
    m: &DecisionMatrix,
    coeffs: &[Vec<f64>],
    weights: &WeightVector,
) -> Result<RankResult> {
    if coeffs.len() != m.n() || weights.w.len() != m.p() {
        return Err(Error::Domain("GRA dimension mismatch".into()));
    }
    let scores = coeffs
        .iter()
        .map(|row| row.iter().zip(&weights.w).map(|(c, w)| c * w).sum())
        .collect();
    Ok(RankResult::new(m, scores, RankMethod::Gra))
}

/// Entropy weights from the min-max normalized matrix shifted by the
/// amplitude a: r = (x'+a)/colsum, e_j = -(1/ln n) sum r ln r,
/// w_j = (1-e_j)/sum(1-e).
pub fn entropy_weights(m_norm: &DecisionMatrix, a: f64) -> Result<WeightVector> {
    let n = m_norm.n();
    if n < 2 {
        return Err(Error::Domain(
            "entropy undefined for a single alternative".into(),
        ));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("amplitude {a} must be positive")));
    }
    let ln_n = (n as f64).ln();
    let mut one_minus_e = Vec::with_capacity(m_norm.p());
    for j in 0..m_norm.p() {
        let col: Vec<f64> = m_norm.column(j).map(|x| x + a).collect();
        let sum: f64 = col.iter().sum();
        let e = -col.iter().map(|&x| (x / sum) * (x / sum).ln()).sum::<f64>() / ln_n;
        one_minus_e.push((1.0 - e).max(0.0));
    }
    let total: f64 = one_minus_e.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain(
            "all criteria carry zero entropy weight".into(),
        ));
    }
    WeightVector::new(one_minus_e)
}

/// TOPSIS with ratio normalization of the raw matrix (x/max for benefit,
/// min/x for cost), weighted distance to the positive/negative ideal
/// solutions, ranked by descending closeness coefficient.
pub fn topsis_rank(m: &DecisionMatrix, weights: &WeightVector) -> Result<RankResult> {
    if weights.w.len() != m.p() {
        return Err(Error::Domain("TOPSIS weight dimension mismatch".into()));
    }
    let n = m.n();
    let p = m.p();
    let mut v = vec![vec![0.0; p]; n];
    for j in 0..p {
        match m.orientations[j] {
            Orientation::Benefit => {
                let max = m.column(j).fold(f64::NEG_INFINITY, f64::max);
                if max <= 0.0 {
                    return Err(Error::Domain(format!(
                        "criterion '{}' needs a positive maximum for ratio normalization",
                        m.criteria[j]
                    )));
                }
                for (i, row) in v.iter_mut().enumerate() {
                    row[j] = weights.w[j] * m.values[i][j] / max;
                }
            }
            Orientation::Cost => {
                let min = m.column(j).fold(f64::INFINITY, f64::min);
                if m.column(j).any(|x| x <= 0.0) {
                    return Err(Error::Domain(format!(
                        "cost criterion '{}' must be strictly positive",
                        m.criteria[j]
                    )));
                }
                for (i, row) in v.iter_mut().enumerate() {
                    row[j] = weights.w[j] * min / m.values[i][j];
                }
            }
        }
    }
    let pis: Vec<f64> = (0..p)
        .map(|j| v.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let nis: Vec<f64> = (0..p)
        .map(|j| v.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let scores = v
        .iter()
        .map(|row| {
            let s_plus: f64 = row
                .iter()
                .zip(&pis)
                .map(|(x, i)| (x - i) * (x - i))
                .sum::<f64>()
                .sqrt();
            let s_minus: f64 = row
                .iter()
                .zip(&nis)
                .map(|(x, i)| (x - i) * (x - i))
                .sum::<f64>()
                .sqrt();
            s_minus / (s_plus + s_minus)
        })
        .collect();
    Ok(RankResult::new(m, scores, RankMethod::Topsis))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tier {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Serialize)]
pub struct TierPartition {
    pub breaks: Vec<usize>,
    /// Per-alternative tier, aligned with the RankResult's alternatives.
    pub tiers: Vec<Tier>,
}

/// Split ranks into premium tiers: A up to the first break, then B, then C.
pub fn assign_tiers(r: &RankResult, breaks: &[usize]) -> Result<TierPartition> {
    let n = r.ranks.len();
    if breaks.is_empty()
        || breaks.len() > 2
        || breaks.windows(2).any(|w| w[0] >= w[1])
        || breaks.iter().any(|&b| b == 0 || b >= n)
    {
        return Err(Error::Domain(format!(
            "tier breaks {breaks:?} must be 1 or 2 strictly increasing ranks in 1..{n}"
        )));
    }
    let tiers = r
        .ranks
        .iter()
        .map(|&rank| {
            if rank <= breaks[0] {
                Tier::A
            } else if breaks.len() == 1 || rank <= breaks[1] {
                Tier::B
            } else {
                Tier::C
            }
        })
        .collect();
    Ok(TierPartition {
        breaks: breaks.to_vec(),
        tiers,
    })
}

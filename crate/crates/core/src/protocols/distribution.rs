use super::joint::{JointEnergyDistribution, Protocol};
use crate::error::{Error, Result};
use crate::qcore::C64;

/// Relative factor for the default ΔE merge tolerance.
pub const DEFAULT_MERGE_FACTOR: f64 = 1e-9;

/// Distribution of `ΔE = E_f − E_i` on a sorted grid. Grid points with zero
/// mass are kept so that distributions from the same energy axes align.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyChangeDistribution {
    points: Vec<(f64, f64)>,
    merge_tol: f64,
    protocol: Protocol,
}

impl EnergyChangeDistribution {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points carrying nonzero probability.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.points.iter().copied().filter(|p| p.1 > 0.0).collect()
    }

    /// `Σ_j p_j ΔE_j^n`
    pub fn moment(&self, n: u32) -> f64 {
        self.points.iter().map(|(x, p)| p * x.powi(n as i32)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// `Σ_j p_j e^{iuΔE_j}`
    pub fn characteristic(&self, u: C64) -> C64 {
        self.points
            .iter()
            .map(|(x, p)| (C64::new(0.0, 1.0) * u * *x).exp() * *p)
            .sum()
    }
}

pub fn default_merge_tol(joint: &JointEnergyDistribution) -> f64 {
    let max_abs = |v: &[f64]| v.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let scale = max_abs(joint.initial_energies()) + max_abs(joint.final_energies());
    DEFAULT_MERGE_FACTOR * if scale > 0.0 { scale } else { 1.0 }
}

/// Sorts `(value, weight)` pairs and merges chains closer than `tol`.
/// Merged values are the unweighted mean of the chain, so the grid does not
/// depend on the probabilities.
fn merge_sorted(mut pts: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut chain: Vec<(f64, f64)> = Vec::new();
    let flush = |chain: &mut Vec<(f64, f64)>, out: &mut Vec<(f64, f64)>| {
        if !chain.is_empty() {
            let x = chain.iter().map(|c| c.0).sum::<f64>() / chain.len() as f64;
            let p = chain.iter().map(|c| c.1).sum::<f64>();
            out.push((x, p));
            chain.clear();
        }
    };
    for p in pts {
        if let Some(last) = chain.last() {
            if p.0 - last.0 > tol {
                flush(&mut chain, &mut out);
            }
        }
        chain.push(p);
    }
    flush(&mut chain, &mut out);
    out
}

/// Collapses a joint onto `ΔE^{ℓk} = E_f^k − E_i^ℓ`. `None` selects
/// [`default_merge_tol`].
pub fn delta_distribution(joint: &JointEnergyDistribution, merge_tol: Option<f64>) -> EnergyChangeDistribution {
    let tol = merge_tol.unwrap_or_else(|| default_merge_tol(joint));
    let mut pts = Vec::new();
    for (ei, row) in joint.initial_energies().iter().zip(joint.probs()) {
        for (ef, p) in joint.final_energies().iter().zip(row) {
            pts.push((ef - ei, *p));
        }
    }
    EnergyChangeDistribution {
        points: merge_sorted(pts, tol),
        merge_tol: tol,
        protocol: joint.protocol(),
    }
}

pub fn moment(dist: &EnergyChangeDistribution, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    Ok(dist.moment(n))
}

/// `½ Σ |p − q|` over cells of two joints on the same axes.
pub fn tv_distance_joint(p: &JointEnergyDistribution, q: &JointEnergyDistribution) -> Result<f64> {
    p.check_axes(q)?;
    let s: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .sum();
    Ok(0.5 * s)
}

/// `½ Σ |p − q|` after aligning the two ΔE grids within the larger merge tolerance.
pub fn tv_distance_delta(p: &EnergyChangeDistribution, q: &EnergyChangeDistribution) -> f64 {
    let tol = p.merge_tol.max(q.merge_tol);
    let signed: Vec<(f64, f64)> = p
        .points
        .iter()
        .copied()
        .chain(q.points.iter().map(|(x, w)| (*x, -w)))
        .collect();
    let mut sorted = signed;
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut acc = 0.0;
    let mut last: Option<f64> = None;
    for (x, w) in sorted {
        if let Some(l) = last {
            if x - l > tol {
                total += f64::abs(acc);
                acc = 0.0;
            }
        }
        acc += w;
        last = Some(x);
    }
    0.5 * (total + acc.abs())
}

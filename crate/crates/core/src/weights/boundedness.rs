use serde::Serialize;

use super::{density_h, grad_ln_density_h, ln_density_h, Side, WeightedMeasure};
use crate::error::Result;
use crate::linalg::{extremal_direction, mat_vec, p_op_norm, MatrixSymbol};

/// Half-width of the band around `‖·‖ = 1` reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundednessVerdict {
    Bounded,
    Unbounded,
}

/// Where the reported supremum of `h_A` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupSource {
    Interior,
    RayLimit,
    OriginLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPoint {
    pub point: Vec<f64>,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundedness {
    pub verdict: BoundednessVerdict,
    pub marginal: bool,
    /// `‖A⁻¹‖` (direct side) or `‖A‖` (reciprocal side).
    pub criterion_norm: f64,
    /// `sup h_A`, when bounded.
    pub sup_density: Option<f64>,
    /// `‖C_A‖ = (sup h_A)^{1/2}`, when bounded.
    pub norm: Option<f64>,
    pub sup_source: Option<SupSource>,
    /// Largest value found by the multistart ascent.
    pub interior_sup: Option<f64>,
    /// Points along which `h_A` grows without bound, when unbounded.
    pub divergence_witness: Vec<WitnessPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultistartConfig {
    pub starts: usize,
    pub radius: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            radius: 10.0,
            grad_tol: 1e-10,
            max_iter: 400,
        }
    }
}

pub fn classify_boundedness(mu: &WeightedMeasure, a: &MatrixSymbol) -> Result<Boundedness> {
    classify_boundedness_with(mu, a, &MultistartConfig::default())
}

pub fn classify_boundedness_with(
    mu: &WeightedMeasure,
    a: &MatrixSymbol,
    cfg: &MultistartConfig,
) -> Result<Boundedness> {
    // validates dimensions
    ln_density_h(mu, a, &vec![1.0; mu.dim()])?;
    let p = mu.inner();
    let inv_norm = p_op_norm(a.inverse(), p);
    let fwd_norm = p_op_norm(a.entries(), p);
    let criterion_norm = match mu.side() {
        Side::Direct => inv_norm,
        Side::Reciprocal => fwd_norm,
    };
    let weight = mu.weight();
    let marginal = (criterion_norm - 1.0).abs() <= MARGINAL_BAND;
    let scale = 1.0 / a.absdet();

    let mut candidates: Vec<(f64, SupSource)> = Vec::new();
    match weight.degree() {
        Some(d) => {
            candidates.push((scale * criterion_norm.powi(2 * d as i32), SupSource::RayLimit));
            if weight.coeff(0) == 0.0 {
                let m = weight.lowest_index() as i32;
                candidates.push((scale * criterion_norm.powi(2 * m), SupSource::OriginLimit));
            }
        }
        None => {
            if criterion_norm > 1.0 + MARGINAL_BAND {
                return Ok(Boundedness {
                    verdict: BoundednessVerdict::Unbounded,
                    marginal: false,
                    criterion_norm,
                    sup_density: None,
                    norm: None,
                    sup_source: None,
                    interior_sup: None,
                    divergence_witness: divergence_witness(mu, a, criterion_norm)?,
                });
            }
            // along directions with |A^{∓1}u| = 1 the density stays at 1/|det A|
            let ray = if criterion_norm >= 1.0 - MARGINAL_BAND { scale } else { 0.0 };
            candidates.push((ray, SupSource::RayLimit));
        }
    }

    let interior = maximize_density(mu, a, cfg);
    if let Some(v) = interior {
        candidates.push((v, SupSource::Interior));
    }
    let (sup, source) = candidates
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, SupSource::Interior), |best, c| {
            if c.0 > best.0 {
                c
            } else {
                best
            }
        });
    Ok(Boundedness {
        verdict: BoundednessVerdict::Bounded,
        marginal,
        criterion_norm,
        sup_density: Some(sup),
        norm: Some(sup.sqrt()),
        sup_source: Some(source),
        interior_sup: interior,
        divergence_witness: Vec::new(),
    })
}

fn divergence_witness(
    mu: &WeightedMeasure,
    a: &MatrixSymbol,
    criterion_norm: f64,
) -> Result<Vec<WitnessPoint>> {
    let p = mu.inner();
    // direct: maximize |A⁻¹u|; reciprocal: minimize it
    let (u, stretch) = match mu.side() {
        Side::Direct => extremal_direction(a.inverse(), p, true),
        Side::Reciprocal => extremal_direction(a.inverse(), p, false),
    };
    let gap = match mu.side() {
        Side::Direct => stretch * stretch - 1.0,
        Side::Reciprocal => 1.0 - stretch * stretch,
    };
    debug_assert!(gap > 0.0, "criterion norm {criterion_norm}");
    (0..10)
        .map(|j| {
            let r = (f64::from(1u32 << j) / gap).sqrt();
            let point: Vec<f64> = u.iter().map(|v| v * r).collect();
            let density = density_h(mu, a, &point)?;
            Ok(WitnessPoint { point, density })
        })
        .collect()
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Quasi-random points in the P-ball of the given radius.
pub(crate) fn quasi_random_ball(mu: &WeightedMeasure, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let n = mu.dim();
    let mut out = Vec::with_capacity(count);
    let mut index = 1;
    while out.len() < count {
        let y: Vec<f64> = (0..n).map(|d| 2.0 * halton(index, PRIMES[d]) - 1.0).collect();
        index += 1;
        if y.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            continue;
        }
        let scaled: Vec<f64> = y.iter().map(|v| v * radius).collect();
        out.push(mat_vec(mu.inner().inv_factor(), &scaled));
    }
    out
}

/// Multistart gradient ascent on `ln h_A`; returns the best value of `h_A`.
fn maximize_density(mu: &WeightedMeasure, a: &MatrixSymbol, cfg: &MultistartConfig) -> Option<f64> {
    let mut best = f64::NEG_INFINITY;
    if mu.weight().coeff(0) > 0.0 {
        best = -a.absdet().ln();
    }
    for start in quasi_random_ball(mu, cfg.starts, cfg.radius) {
        if let Some(v) = ascend(mu, a, start, cfg) {
            if v > best {
                best = v;
            }
        }
    }
    best.is_finite().then(|| best.exp())
}

fn ascend(mu: &WeightedMeasure, a: &MatrixSymbol, mut x: Vec<f64>, cfg: &MultistartConfig) -> Option<f64> {
    let p = mu.inner();
    let mut value = ln_density_h(mu, a, &x).ok()?;
    let mut step = 1.0;
    for _ in 0..cfg.max_iter {
        let g = grad_ln_density_h(mu, a, &x);
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2.sqrt() < cfg.grad_tol {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect();
            if let Ok(v) = ln_density_h(mu, a, &trial) {
                if v >= value + 1e-4 * step * gnorm2 {
                    x = trial;
                    value = v;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step *= 2.0;
        let r2 = p.norm_sq(&x);
        // escaping to infinity or collapsing to the origin: covered by the
        // analytic ray and origin limits
        if !(1e-16..=1e12).contains(&r2) {
            break;
        }
    }
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::InnerProduct;
    use crate::weights::WeightSeries;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn one_plus_t_dilation_norm() {
        let mu = WeightedMeasure::direct(
            WeightSeries::polynomial(vec![1.0, 1.0]).unwrap(),
            InnerProduct::identity(1),
        );
        let a = MatrixSymbol::from_row_slice(1, &[2.0]).unwrap();
        let b = classify_boundedness(&mu, &a).unwrap();
        assert_eq!(b.verdict, BoundednessVerdict::Bounded);
        assert_relative_eq!(b.norm.unwrap(), 0.5f64.sqrt(), max_relative = 1e-12);
        assert_eq!(b.sup_source, Some(SupSource::Interior));
    }

    #[test]
    fn exp_dichotomy() {
        let p = InnerProduct::identity(2);
        let direct = WeightedMeasure::direct(WeightSeries::exp(), p.clone());
        // ‖A⁻¹‖ = 2
        let a = MatrixSymbol::from_row_slice(2, &[0.5, 0.0, 0.0, 1.0]).unwrap();
        let b = classify_boundedness(&direct, &a).unwrap();
        assert_eq!(b.verdict, BoundednessVerdict::Unbounded);
        assert_relative_eq!(b.criterion_norm, 2.0, max_relative = 1e-14);
        let w = &b.divergence_witness;
        assert!(w.windows(2).all(|p| p[1].density > p[0].density));
        assert!(w.last().unwrap().density > 1e100);

        let recip = direct.flipped();
        let half = MatrixSymbol::from_row_slice(2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let b = classify_boundedness(&recip, &half).unwrap();
        assert_eq!(b.verdict, BoundednessVerdict::Bounded);
        assert_relative_eq!(b.sup_density.unwrap(), 4.0, max_relative = 1e-14);
        let b = classify_boundedness(&recip, &a.inverted()).unwrap();
        assert_eq!(b.verdict, BoundednessVerdict::Unbounded);
    }

    #[test]
    fn marginal_rotation() {
        let p = InnerProduct::identity(2);
        let mu = WeightedMeasure::direct(WeightSeries::exp(), p);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = MatrixSymbol::from_row_slice(2, &[c, -s, s, c]).unwrap();
        let b = classify_boundedness(&mu, &rot).unwrap();
        assert_eq!(b.verdict, BoundednessVerdict::Bounded);
        assert!(b.marginal);
        assert_relative_eq!(b.norm.unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn homogeneous_weight_supremum() {
        // γ(t) = t: h is constant along rays, sup = ‖A⁻¹‖²/|det A|
        let p = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7])).unwrap();
        let mu = WeightedMeasure::direct(WeightSeries::polynomial(vec![0.0, 1.0]).unwrap(), p.clone());
        let a = MatrixSymbol::from_row_slice(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let b = classify_boundedness(&mu, &a).unwrap();
        let inv = crate::linalg::op_norm(&a.inverted(), &p).unwrap();
        assert_relative_eq!(b.sup_density.unwrap(), inv * inv / a.absdet(), max_relative = 1e-10);
    }
}

//! Globally adaptive tensor Gauss–Kronrod (7, 15) cubature with dyadic
//! subdivision, for integrands without a finite exactness degree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::functions::Decay;
use crate::linalg::min_eigenvalue;

use super::hermite::Accumulator;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15 nodes on [−1, 1] with Kronrod weights and (possibly zero) Gauss weights.
fn kronrod_nodes() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[j] = (-XGK[j], WGK[j], wg);
        out[14 - j] = (XGK[j], WGK[j], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_regions: usize,
    /// Initial number of cells per axis.
    pub initial_splits: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_regions: 60_000,
            initial_splits: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub regions: usize,
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    error: f64,
    id: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn rule_on_box<F>(f: &F, lo: &[f64], hi: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let nodes = kronrod_nodes();
    let dim = lo.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (h - l)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (h + l)).collect();
    let vol: f64 = half.iter().product();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut kron = Accumulator::default();
    let mut gauss = Accumulator::default();
    loop {
        let mut wk = 1.0;
        let mut wg = 1.0;
        for d in 0..dim {
            let (t, k, g) = nodes[idx[d]];
            x[d] = mid[d] + half[d] * t;
            wk *= k;
            wg *= g;
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonIntegrable(format!("integrand is {v} at {x:?}")));
        }
        kron.add(wk * v);
        if wg != 0.0 {
            gauss.add(wg * v);
        }
        let mut d = 0;
        loop {
            if d == dim {
                let k = vol * kron.value();
                let g = vol * gauss.value();
                return Ok((k, (k - g).abs()));
            }
            idx[d] += 1;
            if idx[d] < 15 {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Visits the tensor 15-point Kronrod nodes of the box `[lo, hi]` with
/// their weights (volume included).
pub(crate) fn for_each_kronrod_node<F>(lo: &[f64], hi: &[f64], mut visit: F)
where
    F: FnMut(&[f64], f64),
{
    let nodes = kronrod_nodes();
    let dim = lo.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (h - l)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (h + l)).collect();
    let vol: f64 = half.iter().product();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    loop {
        let mut w = vol;
        for d in 0..dim {
            let (t, k, _) = nodes[idx[d]];
            x[d] = mid[d] + half[d] * t;
            w *= k;
        }
        visit(&x, w);
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            idx[d] += 1;
            if idx[d] < 15 {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Adaptive integration over the box `[lo, hi]`, starting from a uniform
/// grid of `opts.initial_splits` cells per axis.
pub fn integrate_box<F>(f: &F, lo: &[f64], hi: &[f64], opts: &AdaptiveOptions) -> Result<AdaptiveResult>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = lo.len();
    let splits = opts.initial_splits.max(1);
    let mut heap = BinaryHeap::new();
    let mut next_id = 0;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut idx = vec![0usize; dim];
    loop {
        let clo: Vec<f64> = (0..dim)
            .map(|d| lo[d] + (hi[d] - lo[d]) * idx[d] as f64 / splits as f64)
            .collect();
        let chi: Vec<f64> = (0..dim)
            .map(|d| lo[d] + (hi[d] - lo[d]) * (idx[d] + 1) as f64 / splits as f64)
            .collect();
        let (v, e) = rule_on_box(f, &clo, &chi)?;
        value += v;
        error += e;
        heap.push(Cell {
            lo: clo,
            hi: chi,
            value: v,
            error: e,
            id: next_id,
        });
        next_id += 1;
        let mut d = 0;
        while d < dim {
            idx[d] += 1;
            if idx[d] < splits {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == dim {
            break;
        }
    }

    while error > opts.abs_tol.max(opts.rel_tol * value.abs()) {
        if heap.len() + (1 << dim) > opts.max_regions {
            return Err(Error::ToleranceNotMet {
                tol: opts.rel_tol,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("nonempty region heap");
        value -= worst.value;
        error -= worst.error;
        for corner in 0..(1usize << dim) {
            let mut clo = worst.lo.clone();
            let mut chi = worst.hi.clone();
            for d in 0..dim {
                let m = 0.5 * (worst.lo[d] + worst.hi[d]);
                if corner >> d & 1 == 0 {
                    chi[d] = m;
                } else {
                    clo[d] = m;
                }
            }
            let (v, e) = rule_on_box(f, &clo, &chi)?;
            value += v;
            error += e;
            heap.push(Cell {
                lo: clo,
                hi: chi,
                value: v,
                error: e,
                id: next_id,
            });
            next_id += 1;
        }
        // running sums drift; refresh them from the leaves now and then
        if next_id % 4096 < (1 << dim) {
            let (v, e) = totals(&heap);
            value = v;
            error = e;
        }
    }
    let (value, error) = totals(&heap);
    Ok(AdaptiveResult {
        value,
        error,
        regions: heap.len(),
    })
}

fn totals(heap: &BinaryHeap<Cell>) -> (f64, f64) {
    let mut cells: Vec<&Cell> = heap.iter().collect();
    cells.sort_by_key(|c| c.id);
    let mut v = Accumulator::default();
    let mut e = Accumulator::default();
    for c in cells {
        v.add(c.value);
        e.add(c.error);
    }
    (v.value(), e.value())
}

/// Half-width of a cube capturing all but a negligible Gaussian tail of an
/// integrand with the given envelope.
pub fn domain_radius(decay: &Decay, dim: usize) -> Result<f64> {
    if let Some(r) = decay.support_radius {
        return Ok(r.max(f64::MIN_POSITIVE));
    }
    let lambda = min_eigenvalue(&crate::linalg::symmetrize(&decay.quad));
    if !(lambda > 0.0) {
        return Err(Error::NonIntegrable(format!(
            "integrand envelope does not decay (rate {lambda:e})"
        )));
    }
    let growth = (decay.degree + dim) as f64;
    let mut r = (40.0 / lambda).sqrt().max(1.0);
    while lambda * r * r - growth * (1.0 + r).ln() < 40.0 {
        r *= 1.05;
    }
    Ok(r)
}

/// Largest integrand magnitude on a probe grid of the cube's faces.
fn boundary_max<F>(f: &F, dim: usize, r: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    const PROBES: usize = 9;
    let mut best: f64 = 0.0;
    for face_dim in 0..dim {
        for sign in [-1.0, 1.0] {
            let others = dim - 1;
            let count = PROBES.pow(others as u32);
            for k in 0..count {
                let mut x = vec![0.0; dim];
                let mut rem = k;
                for d in 0..dim {
                    if d == face_dim {
                        x[d] = sign * r;
                    } else {
                        let i = rem % PROBES;
                        rem /= PROBES;
                        x[d] = -r + 2.0 * r * i as f64 / (PROBES - 1) as f64;
                    }
                }
                best = best.max(f(&x).abs());
            }
        }
    }
    best
}

/// Adaptive integration over ℝ^κ. The domain is the cube `[−R, R]^κ` with
/// `R` from the envelope, enlarged until the integrand on the cube's
/// boundary is negligible against the estimate.
pub fn integrate_adaptive<F>(dim: usize, f: &F, decay: &Decay, opts: &AdaptiveOptions) -> Result<AdaptiveResult>
where
    F: Fn(&[f64]) -> f64,
{
    let mut r = domain_radius(decay, dim)?;
    let compact = decay.support_radius.is_some();
    let mut attempt = 0;
    loop {
        let lo = vec![-r; dim];
        let hi = vec![r; dim];
        let res = integrate_box(f, &lo, &hi, opts)?;
        if compact || attempt >= 6 {
            return Ok(res);
        }
        let edge = boundary_max(f, dim, r);
        let lambda = min_eigenvalue(&crate::linalg::symmetrize(&decay.quad)).max(1e-3);
        let tail = edge * (2.0 * r).powi(dim as i32 - 1) / (2.0 * lambda * r);
        if tail <= 1e-14 * res.value.abs() + opts.abs_tol {
            return Ok(res);
        }
        r *= 1.25;
        attempt += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn smooth_one_dimensional() {
        let opts = AdaptiveOptions::default();
        let r = integrate_box(&|x: &[f64]| x[0].sin(), &[0.0], &[std::f64::consts::PI], &opts).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        let decay = Decay {
            quad: DMatrix::from_element(1, 1, 1.0),
            degree: 0,
            support_radius: None,
        };
        let g = integrate_adaptive(1, &|x: &[f64]| (-x[0] * x[0]).exp() / (1.0 + x[0] * x[0]), &decay, &opts).unwrap();
        // ∫ e^{-x²}/(1+x²) dx = π e erfc(1)
        let expected = std::f64::consts::PI * std::f64::consts::E * 0.157_299_207_050_285_13;
        assert_relative_eq!(g.value, expected, max_relative = 1e-10);
    }

    #[test]
    fn two_dimensional_gaussian_and_discontinuity() {
        let opts = AdaptiveOptions::default();
        let decay = Decay {
            quad: DMatrix::identity(2, 2),
            degree: 0,
            support_radius: None,
        };
        let g = integrate_adaptive(2, &|x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp(), &decay, &opts).unwrap();
        assert_relative_eq!(g.value, std::f64::consts::PI, max_relative = 1e-10);
        // step function aligned with the initial grid
        let step = integrate_box(
            &|x: &[f64]| if x[0] < 0.25 { 1.0 } else { 3.0 },
            &[0.0, 0.0],
            &[1.0, 1.0],
            &AdaptiveOptions { initial_splits: 4, ..opts },
        )
        .unwrap();
        assert_relative_eq!(step.value, 0.25 + 2.25, max_relative = 1e-13);
    }

    #[test]
    fn non_decaying_envelope_rejected() {
        let decay = Decay {
            quad: -DMatrix::identity(1, 1),
            degree: 0,
            support_radius: None,
        };
        assert!(matches!(
            integrate_adaptive(1, &|_: &[f64]| 1.0, &decay, &AdaptiveOptions::default()),
            Err(Error::NonIntegrable(_))
        ));
    }
}

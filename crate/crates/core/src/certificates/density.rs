use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{Evaluable, TestFunction};
use crate::operators::CompositionOperatorRep;
use crate::quadrature::adaptive::for_each_kronrod_node;
use crate::quadrature::norm_sq;

/// Grid of the simple-function approximants: the cube `[−radius, radius]^κ`
/// cut into cells of side `step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreDensityConfig {
    pub radius: f64,
    pub steps: Vec<f64>,
    /// Refuses grids with more cells than this.
    pub max_cells: usize,
}

impl Default for CoreDensityConfig {
    fn default() -> Self {
        Self {
            radius: 8.0,
            steps: (1..=6).map(|k| 0.5f64.powi(k)).collect(),
            max_cells: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreDensityResult {
    pub steps: Vec<f64>,
    /// Graph-norm distance from `f` to its best approximant on each grid.
    pub errors: Vec<f64>,
    /// Same for the approximant sampling `f` at cell centres.
    pub sampled_errors: Vec<f64>,
    /// `(‖f‖² + ‖C f‖²)^{1/2}`.
    pub graph_norm: f64,
    pub strictly_decreasing: bool,
    /// Largest relative defect of
    /// `‖f − s‖² = ‖f − s*‖² + ‖s* − s‖²` (s sampled, s* best).
    pub pythagoras_defect: f64,
    /// Relative gap between `∫|f|²(1 + J)dμ` on the grid plus tail and
    /// `‖f‖² + ‖C f‖²` from the exact path.
    pub graph_identity_defect: f64,
}

/// Approximates `f` in the graph norm of `C` by simple functions that are
/// constant on grid cells, using `‖g‖²_graph = ∫|g|²(1 + J)dμ` with
/// `J = h_A`.
pub fn core_density_check(c: &CompositionOperatorRep, f: &TestFunction, cfg: &CoreDensityConfig) -> Result<CoreDensityResult> {
    let g = c.apply(f)?;
    let mu = c.space();
    let dim = c.dim();
    let graph_sq = norm_sq(f, mu)? + norm_sq(&g, mu)?;
    let weighted = c.as_weighted();
    let density = |x: &[f64]| -> Result<f64> {
        let j = weighted.j_value(x);
        if !j.is_finite() {
            return Err(Error::NotInSpace(format!(
                "J is not finite at {x:?}; C_A is not densely defined"
            )));
        }
        Ok((1.0 + j) * mu.density(x))
    };

    let mut errors = Vec::with_capacity(cfg.steps.len());
    let mut sampled_errors = Vec::with_capacity(cfg.steps.len());
    let mut pythagoras_defect: f64 = 0.0;
    let mut identity_defect: f64 = 0.0;
    for &step in &cfg.steps {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid step {step} must be positive")));
        }
        let per_axis = (2.0 * cfg.radius / step).round() as usize;
        let cells = per_axis.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if per_axis == 0 || cells > cfg.max_cells {
            return Err(Error::InvalidArgument(format!(
                "grid with step {step} has {cells} cells, limit {}",
                cfg.max_cells
            )));
        }
        let h = 2.0 * cfg.radius / per_axis as f64;
        let mut inside = 0.0;
        let mut best = 0.0;
        let mut sampled = 0.0;
        let mut cross = 0.0;
        let mut idx = vec![0usize; dim];
        let mut lo = vec![0.0; dim];
        let mut hi = vec![0.0; dim];
        let mut centre = vec![0.0; dim];
        'cells: loop {
            for d in 0..dim {
                lo[d] = -cfg.radius + h * idx[d] as f64;
                hi[d] = lo[d] + h;
                centre[d] = lo[d] + 0.5 * h;
            }
            let mut nodes = Vec::with_capacity(15usize.pow(dim as u32));
            let mut failure = None;
            for_each_kronrod_node(&lo, &hi, |x, w| match density(x) {
                Ok(rho) => nodes.push((f.eval(x), w * rho)),
                Err(e) => failure = Some(e),
            });
            if let Some(e) = failure {
                return Err(e);
            }
            let mass: f64 = nodes.iter().map(|(_, w)| w).sum();
            let first: f64 = nodes.iter().map(|(v, w)| v * w).sum();
            let average = if mass > 0.0 { first / mass } else { 0.0 };
            let at_centre = f.eval(&centre);
            for (v, w) in &nodes {
                inside += v * v * w;
                best += (v - average).powi(2) * w;
                sampled += (v - at_centre).powi(2) * w;
            }
            cross += (average - at_centre).powi(2) * mass;
            let mut d = 0;
            loop {
                if d == dim {
                    break 'cells;
                }
                idx[d] += 1;
                if idx[d] < per_axis {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
        let tail = (graph_sq - inside).max(0.0);
        errors.push((best + tail).sqrt());
        sampled_errors.push((sampled + tail).sqrt());
        pythagoras_defect = pythagoras_defect.max((sampled - best - cross).abs() / graph_sq);
        identity_defect = identity_defect.max((inside - graph_sq).abs() / graph_sq);
    }
    let strictly_decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    Ok(CoreDensityResult {
        steps: cfg.steps.clone(),
        errors,
        sampled_errors,
        graph_norm: graph_sq.sqrt(),
        strictly_decreasing,
        pythagoras_defect,
        graph_identity_defect: identity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{InnerProduct, MatrixSymbol};
    use crate::weights::{WeightSeries, WeightedMeasure};
    use approx::assert_relative_eq;

    fn one_plus_t() -> WeightedMeasure {
        WeightedMeasure::direct(WeightSeries::polynomial(vec![1.0, 1.0]).unwrap(), InnerProduct::identity(1))
    }

    #[test]
    fn identity_graph_norm_doubles() {
        let c = CompositionOperatorRep::new(MatrixSymbol::identity(1), one_plus_t()).unwrap();
        let f = TestFunction::isotropic(1, 1.0).unwrap();
        let cfg = CoreDensityConfig {
            steps: vec![0.5, 0.25],
            ..Default::default()
        };
        let r = core_density_check(&c, &f, &cfg).unwrap();
        assert_relative_eq!(r.graph_norm.powi(2), 2.0 * norm_sq(&f, c.space()).unwrap(), max_relative = 1e-14);
        assert!(r.graph_identity_defect < 1e-12);
    }

    #[test]
    fn errors_shrink_with_the_grid() {
        let c = CompositionOperatorRep::new(MatrixSymbol::from_row_slice(1, &[2.0]).unwrap(), one_plus_t()).unwrap();
        let f = TestFunction::isotropic(1, 1.0).unwrap();
        let r = core_density_check(&c, &f, &CoreDensityConfig::default()).unwrap();
        assert!(r.strictly_decreasing, "{:?}", r.errors);
        assert!(r.errors.last().unwrap() / r.graph_norm < 0.01);
        assert!(r.pythagoras_defect < 1e-10);
        for (b, s) in r.errors.iter().zip(&r.sampled_errors) {
            assert!(b <= s);
        }
    }
}

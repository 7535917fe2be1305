//! JSON run configuration and its conversion to core objects.

use anyhow::{anyhow, bail, Context, Result};
use cosub_core::certificates::{CoreDensityConfig, FalsificationBudget};
use cosub_core::{InnerProduct, MatrixSymbol, Polynomial, ReportConfig, Side, TestFunction, WeightSeries};
use nalgebra::DMatrix;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Named(String),
    Coefficients(Vec<f64>),
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SideSpec {
    #[default]
    Direct,
    Reciprocal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ShapeSpec {
    /// `s·I`
    Isotropic(f64),
    /// Row-major κ×κ matrix.
    Matrix(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u8>,
    pub coeff: f64,
}

/// `p(x)·exp(−xᵀSx)`; `p = 1` when `poly` is omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub shape: ShapeSpec,
    #[serde(default)]
    pub poly: Option<Vec<TermSpec>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub psd: Option<f64>,
    pub normality: Option<f64>,
    pub equivalence: Option<f64>,
    pub adjoint: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub steps: Option<Vec<f64>>,
    #[serde(default)]
    pub max_cells: Option<usize>,
}

fn default_radius() -> f64 {
    8.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalsifySpec {
    pub rounds: Option<usize>,
    pub max_dictionary: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub matrix: Vec<f64>,
    #[serde(default)]
    pub inner_product: Option<Vec<f64>>,
    pub weight: WeightSpec,
    #[serde(default)]
    pub side: SideSpec,
    #[serde(default)]
    pub truncations: Option<Vec<usize>>,
    #[serde(default)]
    pub include_limit: Option<bool>,
    #[serde(default)]
    pub test_functions: Option<Vec<FunctionSpec>>,
    #[serde(default)]
    pub dictionary: Option<Vec<FunctionSpec>>,
    #[serde(default)]
    pub hankel_order: Option<usize>,
    #[serde(default)]
    pub maxpow: Option<usize>,
    #[serde(default)]
    pub adjoint_powers: Option<u32>,
    #[serde(default)]
    pub tower_kmax: Option<usize>,
    #[serde(default)]
    pub equivalence_samples: Option<usize>,
    #[serde(default)]
    pub sample_radius: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub core_density: Option<DensitySpec>,
    #[serde(default)]
    pub falsify: Option<FalsifySpec>,
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub hankel_order: Option<usize>,
}

/// A configuration resolved into core objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub symbol: MatrixSymbol,
    pub inner: InnerProduct,
    pub weight: WeightSeries,
    pub side: Side,
    pub report: ReportConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))
    }

    pub fn resolve(&self, overrides: Overrides) -> Result<Resolved> {
        let dim = self.dim;
        if !(1..=8).contains(&dim) {
            bail!("dim: {dim} is outside the supported range 1..=8");
        }
        let symbol = square(dim, &self.matrix)
            .and_then(|m| MatrixSymbol::new(m).map_err(Into::into))
            .context("matrix")?;
        let inner = match &self.inner_product {
            None => InnerProduct::identity(dim),
            Some(v) => square(dim, v)
                .and_then(|m| InnerProduct::new(m).map_err(Into::into))
                .context("inner_product")?,
        };
        let weight = match &self.weight {
            WeightSpec::Named(name) if name.eq_ignore_ascii_case("exp") => WeightSeries::exp(),
            WeightSpec::Named(name) => bail!("weight: unknown weight {name:?} (expected \"exp\" or a coefficient list)"),
            WeightSpec::Coefficients(c) => WeightSeries::polynomial(c.clone()).context("weight")?,
        };
        let side = match self.side {
            SideSpec::Direct => Side::Direct,
            SideSpec::Reciprocal => Side::Reciprocal,
        };

        let test_functions = match &self.test_functions {
            None => ReportConfig::default_test_functions(dim)?,
            Some(specs) => functions(dim, specs, "test_functions")?,
        };
        if test_functions.is_empty() {
            bail!("test_functions: at least one function is required");
        }
        let mut report = ReportConfig::new(test_functions);
        if let Some(d) = &self.dictionary {
            report.dictionary = functions(dim, d, "dictionary")?;
        }
        if let Some(t) = &self.truncations {
            if t.is_empty() || t.contains(&0) {
                bail!("truncations: levels must be a nonempty list of positive integers");
            }
            report.truncations = t.clone();
        }
        if let Some(b) = self.include_limit {
            report.include_limit = b;
        }
        if let Some(n) = overrides.hankel_order.or(self.hankel_order) {
            if n == 0 {
                bail!("hankel_order: must be at least 1");
            }
            report.hankel_order = n;
        }
        if let Some(n) = self.maxpow {
            report.maxpow = n;
        }
        if let Some(n) = self.adjoint_powers {
            report.adjoint_powers = n;
        }
        if let Some(n) = self.tower_kmax {
            report.tower_kmax = n;
        }
        if let Some(n) = self.equivalence_samples {
            report.equivalence_samples = n;
        }
        if let Some(r) = self.sample_radius {
            report.sample_radius = positive(r, "sample_radius")?;
        }
        if let Some(t) = overrides.tol.or(self.tolerances.psd) {
            report.psd_tol = nonnegative(t, "tolerances.psd")?;
        }
        if let Some(t) = self.tolerances.normality {
            report.normality_tol = nonnegative(t, "tolerances.normality")?;
        }
        if let Some(t) = self.tolerances.equivalence {
            report.equivalence_bound = nonnegative(t, "tolerances.equivalence")?;
        }
        if let Some(t) = self.tolerances.adjoint {
            report.adjoint_rel_tol = nonnegative(t, "tolerances.adjoint")?;
        }
        report.seed = overrides.seed.unwrap_or(self.seed);
        report.core_density = self.core_density.as_ref().map(DensitySpec::resolve).transpose()?;
        if let Some(f) = &self.falsify {
            let mut b = FalsificationBudget::default();
            if let Some(r) = f.rounds {
                b.rounds = r;
            }
            if let Some(m) = f.max_dictionary {
                b.max_dictionary = m;
            }
            if let Some(t) = f.tol {
                b.tol = nonnegative(t, "falsify.tol")?;
            }
            report.falsification = Some(b);
        }
        Ok(Resolved {
            symbol,
            inner,
            weight,
            side,
            report,
        })
    }
}

impl DensitySpec {
    fn resolve(&self) -> Result<CoreDensityConfig> {
        let mut cfg = CoreDensityConfig {
            radius: positive(self.radius, "core_density.radius")?,
            ..Default::default()
        };
        if let Some(s) = &self.steps {
            for (i, &h) in s.iter().enumerate() {
                positive(h, &format!("core_density.steps[{i}]"))?;
            }
            cfg.steps = s.clone();
        }
        if let Some(m) = self.max_cells {
            cfg.max_cells = m;
        }
        Ok(cfg)
    }
}

fn positive(v: f64, at: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("{at}: expected a positive number, found {v}")
    }
}

fn nonnegative(v: f64, at: &str) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("{at}: expected a nonnegative number, found {v}")
    }
}

/// Row-major `dim × dim` matrix.
fn square(dim: usize, v: &[f64]) -> Result<DMatrix<f64>> {
    if v.len() != dim * dim {
        bail!("expected {} entries for a {dim}x{dim} matrix, found {}", dim * dim, v.len());
    }
    Ok(DMatrix::from_row_slice(dim, dim, v))
}

fn functions(dim: usize, specs: &[FunctionSpec], at: &str) -> Result<Vec<TestFunction>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.resolve(dim).with_context(|| format!("{at}[{i}]")))
        .collect()
}

impl FunctionSpec {
    fn resolve(&self, dim: usize) -> Result<TestFunction> {
        let shape = match &self.shape {
            ShapeSpec::Isotropic(s) => DMatrix::identity(dim, dim) * *s,
            ShapeSpec::Matrix(v) => square(dim, v).context("shape")?,
        };
        let poly = match &self.poly {
            None => Polynomial::constant(dim, 1.0),
            Some(terms) => Polynomial::from_terms(dim, terms.iter().map(|t| (t.exponents.clone(), t.coeff))).context("poly")?,
        };
        Ok(TestFunction::gaussian(poly, shape)?)
    }
}

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    core_density_check, stieltjes_check, statements, CertificateReport, CoreDensityConfig, EvidenceRecord, Prediction,
    Residual, Status, DEFAULT_PSD_TOL,
};
use crate::error::{Error, Result};
use crate::functions::{Polynomial, TestFunction};
use crate::linalg::{is_normal, sym_eigen, InnerProduct, MatrixSymbol, SymbolSummary, DEFAULT_NORMALITY_TOL};
use crate::operators::{
    adjoint_apply_power, gram_block_matrix, moment_sequence, unitary_inverse_exact, unitary_map, unitary_map_exact,
    CompositionOperatorRep,
};
use crate::quadrature::{evaluable_norm_sq, inner_product, norm_sq, tower_norms, AdaptiveOptions};
use crate::functions::Evaluable;
use crate::weights::{BoundednessVerdict, WeightKind, WeightSeries, WeightedMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    /// Truncation levels `k` of an entire weight.
    pub truncations: Vec<usize>,
    /// Also test in the untruncated space.
    pub include_limit: bool,
    pub test_functions: Vec<TestFunction>,
    /// Dictionary of the Bram-form matrices; the test functions if empty.
    pub dictionary: Vec<TestFunction>,
    /// Moment sequences `m_0, …, m_{2N}`.
    pub hankel_order: usize,
    pub maxpow: usize,
    pub psd_tol: f64,
    pub normality_tol: f64,
    pub tower_kmax: usize,
    pub equivalence_samples: usize,
    pub equivalence_bound: f64,
    pub adjoint_powers: u32,
    pub adjoint_rel_tol: f64,
    pub sample_radius: f64,
    pub seed: u64,
    pub core_density: Option<CoreDensityConfig>,
    pub falsification: Option<FalsificationBudget>,
}

impl ReportConfig {
    pub fn new(test_functions: Vec<TestFunction>) -> Self {
        Self {
            truncations: (1..=5).collect(),
            include_limit: true,
            test_functions,
            dictionary: Vec::new(),
            hankel_order: 6,
            maxpow: 3,
            psd_tol: DEFAULT_PSD_TOL,
            normality_tol: DEFAULT_NORMALITY_TOL,
            tower_kmax: 20,
            equivalence_samples: 1000,
            equivalence_bound: 1e-10,
            adjoint_powers: 4,
            adjoint_rel_tol: 1e-7,
            sample_radius: 3.0,
            seed: 0,
            core_density: None,
            falsification: Some(FalsificationBudget::default()),
        }
    }

    /// Four Gaussian test functions on ℝ^κ.
    pub fn default_test_functions(dim: usize) -> Result<Vec<TestFunction>> {
        let aniso = DMatrix::from_fn(dim, dim, |i, j| if i == j { 0.8 + 0.4 * i as f64 } else { 0.1 });
        let x0 = Polynomial::variable(dim, 0);
        let quad = Polynomial::constant(dim, 1.0).add(&Polynomial::variable(dim, dim - 1).mul(&x0).scale(0.5));
        Ok(vec![
            TestFunction::isotropic(dim, 1.0)?,
            TestFunction::isotropic(dim, 0.75)?,
            TestFunction::gaussian(x0, DMatrix::identity(dim, dim) * 1.3)?,
            TestFunction::gaussian(quad, aniso)?,
        ])
    }

    fn dictionary(&self) -> &[TestFunction] {
        if self.dictionary.is_empty() {
            &self.test_functions
        } else {
            &self.dictionary
        }
    }
}

struct Level {
    label: String,
    weight: WeightSeries,
}

fn levels(gamma: &WeightSeries, cfg: &ReportConfig) -> Result<Vec<Level>> {
    let mut out = Vec::new();
    if gamma.kind() == WeightKind::Entire {
        for &k in &cfg.truncations {
            out.push(Level {
                label: format!("gamma_{k}"),
                weight: gamma.truncate(k)?,
            });
        }
    }
    if cfg.include_limit || out.is_empty() {
        out.push(Level {
            label: "gamma".into(),
            weight: gamma.clone(),
        });
    }
    Ok(out)
}

fn check_functions(dim: usize, fs: &[TestFunction]) -> Result<()> {
    for f in fs {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
    }
    Ok(())
}

/// Hankel, Bram and tower evidence for `C_A` in `L²(μ_γ)` and its truncations.
fn subnormal_evidence(
    a: &MatrixSymbol,
    inner: &InnerProduct,
    gamma: &WeightSeries,
    cfg: &ReportConfig,
    required: bool,
    prefix: &str,
) -> Result<Vec<EvidenceRecord>> {
    let mut evidence = Vec::new();
    let statement = statements::SUBNORMAL;
    for level in levels(gamma, cfg)? {
        let mu = WeightedMeasure::direct(level.weight.clone(), inner.clone());
        let c = CompositionOperatorRep::new(a.clone(), mu)?;
        for (i, f) in cfg.test_functions.iter().enumerate() {
            let name = format!("{prefix}hankel[{}, f{i}]", level.label);
            let seq = match moment_sequence(&c, f, 2 * cfg.hankel_order) {
                Ok(seq) => seq,
                Err(e) => {
                    evidence.push(EvidenceRecord::skipped(name, statement, required, format!("f not in space: {e}")));
                    continue;
                }
            };
            let note = seq
                .truncated_at
                .as_ref()
                .map(|(n, why)| format!("iterate {n} left the domain: {why}"));
            if seq.moments.len() < 3 {
                evidence.push(EvidenceRecord::skipped(
                    name,
                    statement,
                    required,
                    note.unwrap_or_default(),
                ));
                continue;
            }
            let h = stieltjes_check(&seq.moments, cfg.psd_tol)?;
            let mut r0 = EvidenceRecord::psd(format!("{name}.H0"), statement, h.h0_min_eig, h.h0_trace, h.order, cfg.psd_tol, required);
            let mut r1 = EvidenceRecord::psd(
                format!("{name}.H1"),
                statement,
                h.h1_min_eig,
                h.h1_trace,
                seq.moments.len() / 2,
                cfg.psd_tol,
                required,
            );
            r0.note = note.clone();
            r1.note = note;
            evidence.push(r0);
            evidence.push(r1);
        }
        let name = format!("{prefix}bram[{}, maxpow {}]", level.label, cfg.maxpow);
        match gram_block_matrix(&c, cfg.dictionary(), cfg.maxpow) {
            Ok(k) => {
                let (eig, _) = sym_eigen(&k);
                evidence.push(EvidenceRecord::psd(name, statement, eig[0], k.trace(), k.nrows(), cfg.psd_tol, required));
            }
            Err(e) => evidence.push(EvidenceRecord::skipped(name, statement, required, format!("domain failure: {e}"))),
        }
    }
    let kmax = gamma.degree().unwrap_or(cfg.tower_kmax);
    for (i, f) in cfg.test_functions.iter().enumerate() {
        let name = format!("{prefix}tower[f{i}, kmax {kmax}]");
        match tower_norms(f, gamma, kmax, inner) {
            Ok(t) => {
                let step = t.squared.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let last = t.squared.last().copied().unwrap_or(0.0);
                let mut rec = EvidenceRecord::psd(name, statements::TOWER, step.min(0.0), last, kmax, 1e-14, true);
                rec.note = Some(format!("limit gap {:e}", t.limit_gap()));
                evidence.push(rec);
            }
            Err(e) => evidence.push(EvidenceRecord::skipped(name, statements::TOWER, true, format!("f not in space: {e}"))),
        }
    }
    Ok(evidence)
}

fn normality(a: &MatrixSymbol, inner: &InnerProduct, cfg: &ReportConfig) -> Result<(bool, SymbolSummary)> {
    Ok((is_normal(a, inner, cfg.normality_tol)?, SymbolSummary::new(a, inner, cfg.normality_tol)?))
}

/// Evidence for subnormality of `C_A` in `L²(μ_γ)`.
pub fn subnormality_report(a: &MatrixSymbol, inner: &InnerProduct, gamma: &WeightSeries, cfg: &ReportConfig) -> Result<CertificateReport> {
    if a.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            found: a.dim(),
        });
    }
    check_functions(a.dim(), &cfg.test_functions)?;
    check_functions(a.dim(), cfg.dictionary())?;
    let (normal, summary) = normality(a, inner, cfg)?;
    let prediction = if normal {
        Prediction::Subnormal
    } else {
        Prediction::NotPredicted
    };
    let mut evidence = subnormal_evidence(a, inner, gamma, cfg, normal, "")?;
    let mut residuals = Vec::new();
    let space = WeightedMeasure::direct(gamma.clone(), inner.clone());
    let c = CompositionOperatorRep::new(a.clone(), space)?;
    if let (Some(dcfg), Some(f)) = (&cfg.core_density, cfg.test_functions.first()) {
        let name = "core_density[f0]".to_string();
        match core_density_check(&c, f, dcfg) {
            Ok(r) => {
                let last = r.errors.last().copied().unwrap_or(0.0);
                evidence.push(EvidenceRecord {
                    name,
                    instantiates: statements::CORE,
                    min_eig: None,
                    scale: None,
                    order: r.steps.len(),
                    required: false,
                    sampled: true,
                    status: if r.strictly_decreasing { Status::Pass } else { Status::Fail },
                    note: Some(format!("final graph-norm error {:e} of {:e}", last, r.graph_norm)),
                });
                residuals.push(Residual {
                    name: "graph_norm_identity[f0]".into(),
                    instantiates: statements::CORE,
                    value: r.graph_identity_defect,
                    bound: 1e-8,
                });
            }
            Err(e) => evidence.push(EvidenceRecord::skipped(name, statements::CORE, false, e.to_string())),
        }
    }
    let falsification = match (&cfg.falsification, normal) {
        (Some(budget), false) => match falsification_search(&c, cfg.dictionary(), cfg.maxpow, budget) {
            Ok(out) => {
                evidence.push(out.evidence(statements::BOUNDED_CONVERSE));
                Some(out)
            }
            Err(Error::Unbounded) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let verdict = CertificateReport::decide(prediction, &evidence, &residuals);
    Ok(CertificateReport {
        prediction,
        symbol: summary,
        weight: gamma.label(),
        evidence,
        residuals,
        adjoint_crosschecks: Vec::new(),
        falsification,
        verdict,
    })
}

fn sample_points(inner: &InnerProduct, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = inner.dim();
    (0..count)
        .map(|_| {
            let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            while y.iter().map(|v| v * v).sum::<f64>() > 1.0 {
                y = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            }
            // P-ball: x = P^{-1/2} y
            let f = inner.inv_factor();
            (0..n).map(|i| radius * (0..n).map(|j| f[(i, j)] * y[j]).sum::<f64>()).collect()
        })
        .collect()
}

/// `max_x |(C_{A⁻¹} U f)(x) − (U |det A| C_A* f)(x)|` over the points, with
/// `C_A*` the adjoint in `L²(μ_{1/γ})`.
pub fn equivalence_residual(a: &MatrixSymbol, gamma: &WeightSeries, inner: &InnerProduct, f: &TestFunction, points: &[Vec<f64>]) -> Result<f64> {
    let recip = WeightedMeasure::reciprocal(gamma.clone(), inner.clone());
    let c = CompositionOperatorRep::new(a.clone(), recip)?;
    let shared: Arc<TestFunction> = Arc::new(f.clone());
    let uf = unitary_map(shared, gamma, inner)?;
    let adj = Arc::new(adjoint_apply_power(&c, f, 1)?);
    let u_adj = unitary_map(adj, gamma, inner)?;
    let det = a.absdet();
    let mut worst: f64 = 0.0;
    for x in points {
        if x.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: x.len(),
            });
        }
        let lhs = uf.eval(&a.apply_inverse(x));
        let rhs = det * u_adj.eval(x);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Adjoint moments `‖(C_A*)ⁿ f‖` in `L²(μ_{1/γ})` computed directly and
/// through `|det A|^{−n}·‖C_{A⁻¹}ⁿ U f‖` in `L²(μ_γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointCrosscheck {
    pub level: String,
    pub function: usize,
    pub direct: Vec<f64>,
    pub via_unitary: Vec<f64>,
    pub max_rel_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<(u32, String)>,
}

/// Runs the cross-check for `n = 0..=nmax` on `f = U⁻¹g` (polynomial `γ`)
/// or `f = g` (exponential `γ`).
pub fn adjoint_moment_crosscheck(
    a: &MatrixSymbol,
    inner: &InnerProduct,
    gamma: &WeightSeries,
    g: &TestFunction,
    nmax: u32,
    opts: &AdaptiveOptions,
) -> Result<AdjointCrosscheck> {
    let recip = WeightedMeasure::reciprocal(gamma.clone(), inner.clone());
    let direct_space = WeightedMeasure::direct(gamma.clone(), inner.clone());
    let (f, uf) = match gamma.kind() {
        WeightKind::Polynomial => (unitary_inverse_exact(g, gamma, inner)?, g.clone()),
        WeightKind::Entire => (g.clone(), unitary_map_exact(g, gamma, inner)?),
    };
    f.check_membership(&recip)?;
    let c = CompositionOperatorRep::new(a.clone(), recip.clone())?;
    let c_inv = CompositionOperatorRep::new(a.inverted(), direct_space.clone())?;
    let mut out = AdjointCrosscheck {
        level: gamma.label(),
        function: 0,
        direct: Vec::new(),
        via_unitary: Vec::new(),
        max_rel_diff: 0.0,
        truncated_at: None,
    };
    let mut iterate = uf;
    for n in 0..=nmax {
        if n > 0 {
            match c_inv.apply(&iterate) {
                Ok(next) => iterate = next,
                Err(e) => {
                    out.truncated_at = Some((n, e.to_string()));
                    break;
                }
            }
        }
        let via = a.absdet().powi(-(n as i32)) * norm_sq(&iterate, &direct_space)?.sqrt();
        let image = adjoint_apply_power(&c, &f, n)?;
        let direct = match evaluable_norm_sq(&image, &recip, opts) {
            Ok(v) => v.sqrt(),
            Err(e) => {
                out.truncated_at = Some((n, e.to_string()));
                break;
            }
        };
        out.max_rel_diff = out.max_rel_diff.max((direct - via).abs() / via.abs().max(f64::MIN_POSITIVE));
        out.direct.push(direct);
        out.via_unitary.push(via);
    }
    Ok(out)
}

/// Evidence for cosubnormality of `C_A` in `L²(μ_{1/γ})`: subnormality
/// evidence for `C_{A⁻¹}` in `L²(μ_γ)`, the unitary-equivalence residual and
/// the adjoint-moment cross-check.
pub fn cosubnormality_report(a: &MatrixSymbol, inner: &InnerProduct, gamma: &WeightSeries, cfg: &ReportConfig) -> Result<CertificateReport> {
    if a.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            found: a.dim(),
        });
    }
    check_functions(a.dim(), &cfg.test_functions)?;
    check_functions(a.dim(), cfg.dictionary())?;
    let (normal, summary) = normality(a, inner, cfg)?;
    let prediction = if normal {
        Prediction::Cosubnormal
    } else {
        Prediction::NotPredicted
    };
    let inv = a.inverted();
    let mut evidence = subnormal_evidence(&inv, inner, gamma, cfg, normal, "inverse:")?;
    let points = sample_points(inner, cfg.equivalence_samples, cfg.sample_radius, cfg.seed);
    let mut residuals = Vec::new();
    let mut crosschecks = Vec::new();
    let opts = AdaptiveOptions::default();
    for level in levels(gamma, cfg)? {
        let recip = WeightedMeasure::reciprocal(level.weight.clone(), inner.clone());
        let mut worst: f64 = 0.0;
        for (i, g) in cfg.test_functions.iter().enumerate() {
            let f = match level.weight.kind() {
                WeightKind::Polynomial => unitary_inverse_exact(g, &level.weight, inner)?,
                WeightKind::Entire => g.clone(),
            };
            if f.check_membership(&recip).is_err() {
                continue;
            }
            worst = worst.max(equivalence_residual(a, &level.weight, inner, &f, &points)?);
            match adjoint_moment_crosscheck(a, inner, &level.weight, g, cfg.adjoint_powers, &opts) {
                Ok(mut x) => {
                    x.level = level.label.clone();
                    x.function = i;
                    residuals.push(Residual {
                        name: format!("adjoint_moments[{}, f{i}]", level.label),
                        instantiates: statements::EQUIVALENCE,
                        value: x.max_rel_diff,
                        bound: cfg.adjoint_rel_tol,
                    });
                    crosschecks.push(x);
                }
                Err(e) => evidence.push(EvidenceRecord::skipped(
                    format!("adjoint_moments[{}, f{i}]", level.label),
                    statements::EQUIVALENCE,
                    false,
                    e.to_string(),
                )),
            }
        }
        residuals.push(Residual {
            name: format!("equivalence[{}]", level.label),
            instantiates: statements::EQUIVALENCE,
            value: worst,
            bound: cfg.equivalence_bound,
        });
    }
    for e in evidence.iter_mut().filter(|e| e.instantiates == statements::SUBNORMAL) {
        e.instantiates = statements::COSUBNORMAL;
    }
    let verdict = CertificateReport::decide(prediction, &evidence, &residuals);
    Ok(CertificateReport {
        prediction,
        symbol: summary,
        weight: gamma.label(),
        evidence,
        residuals,
        adjoint_crosschecks: crosschecks,
        falsification: None,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FalsificationBudget {
    /// Dictionary growth rounds after the initial one.
    pub rounds: usize,
    pub max_dictionary: usize,
    pub tol: f64,
}

impl Default for FalsificationBudget {
    fn default() -> Self {
        Self {
            rounds: 2,
            max_dictionary: 16,
            tol: DEFAULT_PSD_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FalsificationStatus {
    Witness,
    Inconclusive,
}

/// Coefficients `c_{j,d}` of `f_j = Σ_d c_{j,d} φ_d` with negative Bram form
/// `Σ_{i,j} ⟨Cⁱf_j, Cʲf_i⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub dictionary_size: usize,
    pub maxpow: usize,
    pub coefficients: Vec<f64>,
    /// `cᵀKc`.
    pub form_value: f64,
    /// The Bram form recomputed from the functions `f_j`.
    pub direct_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsificationOutcome {
    pub status: FalsificationStatus,
    pub dictionary_sizes: Vec<usize>,
    pub min_eigs: Vec<f64>,
    pub traces: Vec<f64>,
    pub witness: Option<Witness>,
}

impl FalsificationOutcome {
    /// Worst `min_eig/trace` over the rounds.
    pub fn worst_relative_eig(&self) -> f64 {
        self.min_eigs
            .iter()
            .zip(&self.traces)
            .map(|(e, t)| e / t)
            .fold(f64::INFINITY, f64::min)
    }

    fn evidence(&self, statement: &'static str) -> EvidenceRecord {
        let (k, _) = self
            .min_eigs
            .iter()
            .zip(&self.traces)
            .enumerate()
            .min_by(|a, b| (a.1 .0 / a.1 .1).total_cmp(&(b.1 .0 / b.1 .1)))
            .map(|(i, v)| (i, v))
            .unwrap_or((0, (&0.0, &0.0)));
        let mut rec = EvidenceRecord::psd(
            "falsification",
            statement,
            self.min_eigs.get(k).copied().unwrap_or(0.0),
            self.traces.get(k).copied().unwrap_or(0.0),
            self.dictionary_sizes.get(k).copied().unwrap_or(0),
            1e300,
            false,
        );
        rec.status = match self.status {
            FalsificationStatus::Witness => Status::Fail,
            FalsificationStatus::Inconclusive => Status::Pass,
        };
        rec.note = Some(format!("{:?} after {} round(s)", self.status, self.min_eigs.len()));
        rec
    }
}

fn monomials(dim: usize, degree: usize) -> Vec<Polynomial> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<u8>, out: &mut Vec<Polynomial>) {
        if prefix.len() == dim - 1 {
            prefix.push(left as u8);
            out.push(Polynomial::monomial(prefix, 1.0));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::new(), &mut out);
    out
}

/// Bram form of the given coefficients, from the functions themselves.
fn bram_form(c: &CompositionOperatorRep, dictionary: &[TestFunction], maxpow: usize, coeffs: &[f64]) -> Result<f64> {
    let d = dictionary.len();
    let fs = (0..=maxpow)
        .map(|j| {
            let parts: Vec<(f64, &TestFunction)> = (0..d).map(|e| (coeffs[j * d + e], &dictionary[e])).collect();
            TestFunction::linear_combination(c.dim(), &parts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for i in 0..=maxpow {
        for j in 0..=maxpow {
            total += inner_product(&c.apply_power(&fs[j], i)?, &c.apply_power(&fs[i], j)?, c.space())?;
        }
    }
    Ok(total)
}

/// Searches for a negative eigenvalue of the Bram-form matrix over
/// dictionaries grown by monomial multiples.
pub fn falsification_search(
    c: &CompositionOperatorRep,
    dictionary: &[TestFunction],
    maxpow: usize,
    budget: &FalsificationBudget,
) -> Result<FalsificationOutcome> {
    if c.boundedness()?.verdict != BoundednessVerdict::Bounded {
        return Err(Error::Unbounded);
    }
    check_functions(c.dim(), dictionary)?;
    let mut dict = dictionary.to_vec();
    let mut out = FalsificationOutcome {
        status: FalsificationStatus::Inconclusive,
        dictionary_sizes: Vec::new(),
        min_eigs: Vec::new(),
        traces: Vec::new(),
        witness: None,
    };
    for round in 0..=budget.rounds {
        if round > 0 {
            let before = dict.len();
            'grow: for m in monomials(c.dim(), round) {
                for phi in dictionary {
                    if dict.len() >= budget.max_dictionary {
                        break 'grow;
                    }
                    if let Ok(g) = phi.mul_polynomial(&m) {
                        dict.push(g);
                    }
                }
            }
            if dict.len() == before {
                break;
            }
        }
        let k = gram_block_matrix(c, &dict, maxpow)?;
        let (eig, vecs) = sym_eigen(&k);
        let trace = k.trace();
        out.dictionary_sizes.push(dict.len());
        out.min_eigs.push(eig[0]);
        out.traces.push(trace);
        if eig[0] < -budget.tol * trace {
            let v: Vec<f64> = vecs.column(0).iter().copied().collect();
            let kv = &k * &vecs.column(0);
            let form_value = vecs.column(0).dot(&kv);
            out.witness = Some(Witness {
                dictionary_size: dict.len(),
                maxpow,
                direct_value: bram_form(c, &dict, maxpow, &v)?,
                coefficients: v,
                form_value,
            });
            out.status = FalsificationStatus::Witness;
            break;
        }
    }
    Ok(out)
}

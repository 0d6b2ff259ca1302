//! Proximal kernels and the separable dispatch `prox_{step h}`.

mod block;
pub mod grid;
mod scalar;
mod simplex;

pub use block::{prox_group_l2, prox_scad_truncated};
pub use grid::grid_prox_oracle;
pub use scalar::{
    prox_abs_deviation, prox_elastic_deviation, prox_logistic, prox_min_abs_pair, prox_modulus_deviation,
    prox_squared_modulus_deviation, prox_symmetric_logistic,
};
pub use simplex::project_capped_simplex;

use crate::Vector;
use scalar::log1p_exp_neg;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProxError {
    #[error("length mismatch in {what}: expected {expected}, found {found}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("budget {tau} is infeasible for dimension {m}")]
    InfeasibleBudget { tau: f64, m: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// One-dimensional nonsmooth term `h_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarProxKind {
    /// `|z - b|`
    AbsDeviation { b: f64 },
    /// `|z - b| + (alpha/2)(z - b)^2`
    ElasticDeviation { b: f64, alpha: f64 },
    /// `||z| - b|`, `b >= 0`
    ModulusDeviation { b: f64 },
    /// `(1/2)(|z| - b)^2`, `b >= 0`
    SquaredModulusDeviation { b: f64 },
    /// `log(1 + exp(-label z))`, `label = +-1`
    Logistic { label: f64 },
    /// `log(1 + exp(-|z|))`
    SymmetricLogistic,
}

impl ScalarProxKind {
    pub fn value(&self, z: f64) -> f64 {
        match *self {
            ScalarProxKind::AbsDeviation { b } => (z - b).abs(),
            ScalarProxKind::ElasticDeviation { b, alpha } => (z - b).abs() + 0.5 * alpha * (z - b) * (z - b),
            ScalarProxKind::ModulusDeviation { b } => (z.abs() - b).abs(),
            ScalarProxKind::SquaredModulusDeviation { b } => 0.5 * (z.abs() - b).powi(2),
            ScalarProxKind::Logistic { label } => log1p_exp_neg(label * z),
            ScalarProxKind::SymmetricLogistic => log1p_exp_neg(z.abs()),
        }
    }

    pub fn prox(&self, v: f64, mu: f64) -> f64 {
        match *self {
            ScalarProxKind::AbsDeviation { b } => prox_abs_deviation(v, mu, b),
            ScalarProxKind::ElasticDeviation { b, alpha } => prox_elastic_deviation(v, mu, b, alpha),
            ScalarProxKind::ModulusDeviation { b } => prox_modulus_deviation(v, mu, b),
            ScalarProxKind::SquaredModulusDeviation { b } => prox_squared_modulus_deviation(v, mu, b),
            ScalarProxKind::Logistic { label } => prox_logistic(v, mu, label),
            ScalarProxKind::SymmetricLogistic => prox_symmetric_logistic(v, mu),
        }
    }

    /// Global Lipschitz constant; infinite for the quadratic-growth kinds.
    pub fn lipschitz(&self) -> f64 {
        match self {
            ScalarProxKind::ElasticDeviation { alpha, .. } if *alpha > 0.0 => f64::INFINITY,
            ScalarProxKind::SquaredModulusDeviation { .. } => f64::INFINITY,
            _ => 1.0,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            ScalarProxKind::AbsDeviation { .. } | ScalarProxKind::ElasticDeviation { .. } | ScalarProxKind::Logistic { .. }
        )
    }

    fn validate(&self) -> Result<(), ProxError> {
        let ok = match *self {
            ScalarProxKind::AbsDeviation { b } => b.is_finite(),
            ScalarProxKind::ElasticDeviation { b, alpha } => b.is_finite() && alpha.is_finite() && alpha >= 0.0,
            ScalarProxKind::ModulusDeviation { b } | ScalarProxKind::SquaredModulusDeviation { b } => {
                b.is_finite() && b >= 0.0
            }
            ScalarProxKind::Logistic { label } => label == 1.0 || label == -1.0,
            ScalarProxKind::SymmetricLogistic => true,
        };
        if ok {
            Ok(())
        } else {
            Err(ProxError::BadParameter(format!("{self:?}")))
        }
    }
}

/// Penalty on a block `d` of consecutive coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockProxKind {
    /// `||d||`
    GroupL2,
    /// `||d||` if `||d|| < kappa`, else 0
    ScadTruncated { kappa: f64 },
}

impl BlockProxKind {
    pub fn value(&self, d: &[f64]) -> f64 {
        let r = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        match *self {
            BlockProxKind::GroupL2 => r,
            BlockProxKind::ScadTruncated { kappa } => {
                if r < kappa {
                    r
                } else {
                    0.0
                }
            }
        }
    }

    pub fn prox(&self, v: &[f64], mu: f64) -> Vec<f64> {
        match *self {
            BlockProxKind::GroupL2 => prox_group_l2(v, mu),
            BlockProxKind::ScadTruncated { kappa } => prox_scad_truncated(v, mu, kappa),
        }
    }
}

/// One span of a [`SeparableNonsmooth`] plan, with its positive weight `mu`.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Scalar { index: usize, kind: ScalarProxKind, weight: f64 },
    /// `|min(w_first + a, w_second + b)|`
    Pair { first: usize, second: usize, a: f64, b: f64, weight: f64 },
    Block { start: usize, dim: usize, kind: BlockProxKind, weight: f64 },
}

impl Term {
    fn weight(&self) -> f64 {
        match *self {
            Term::Scalar { weight, .. } | Term::Pair { weight, .. } | Term::Block { weight, .. } => weight,
        }
    }

    fn indices(&self) -> Vec<usize> {
        match *self {
            Term::Scalar { index, .. } => vec![index],
            Term::Pair { first, second, .. } => vec![first, second],
            Term::Block { start, dim, .. } => (start..start + dim).collect(),
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            Term::Scalar { kind, .. } => kind.lipschitz(),
            Term::Pair { .. } => 1.0,
            Term::Block { kind: BlockProxKind::GroupL2, .. } => 1.0,
            // jumps at kappa, so no finite constant
            Term::Block { kind: BlockProxKind::ScadTruncated { .. }, .. } => f64::INFINITY,
        }
    }

    fn is_convex(&self) -> bool {
        match self {
            Term::Scalar { kind, .. } => kind.is_convex(),
            Term::Pair { .. } => false,
            Term::Block { kind, .. } => matches!(kind, BlockProxKind::GroupL2),
        }
    }
}

/// Separable `h(w) = sum_t mu_t h_t(w_{span t})` over a partition of `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableNonsmooth {
    len: usize,
    terms: Vec<Term>,
    lipschitz: f64,
}

impl SeparableNonsmooth {
    /// Validates that the spans partition `0..len` and all parameters are sane.
    pub fn new(len: usize, terms: Vec<Term>) -> Result<Self, ProxError> {
        let mut seen = vec![false; len];
        let mut lip_sq = 0.0;
        for t in &terms {
            let w = t.weight();
            if !(w.is_finite() && w >= 0.0) {
                return Err(ProxError::BadParameter(format!("term weight {w}")));
            }
            match t {
                Term::Scalar { kind, .. } => kind.validate()?,
                Term::Pair { a, b, .. } if !(a.is_finite() && b.is_finite()) => {
                    return Err(ProxError::BadParameter("pair offsets must be finite".into()))
                }
                Term::Block { dim: 0, .. } => return Err(ProxError::InvalidPlan("empty block".into())),
                Term::Block { kind: BlockProxKind::ScadTruncated { kappa }, .. } if !(*kappa > 0.0) => {
                    return Err(ProxError::BadParameter(format!("kappa {kappa}")))
                }
                _ => {}
            }
            for i in t.indices() {
                if i >= len {
                    return Err(ProxError::InvalidPlan(format!("index {i} out of range {len}")));
                }
                if seen[i] {
                    return Err(ProxError::InvalidPlan(format!("index {i} covered twice")));
                }
                seen[i] = true;
            }
            lip_sq += (w * t.lipschitz()).powi(2);
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(ProxError::InvalidPlan(format!("index {i} not covered")));
        }
        Ok(SeparableNonsmooth { len, terms, lipschitz: lip_sq.sqrt() })
    }

    /// One scalar term per coordinate, all with weight `weight`.
    pub fn scalar(kinds: Vec<ScalarProxKind>, weight: f64) -> Result<Self, ProxError> {
        let len = kinds.len();
        let terms = kinds.into_iter().enumerate().map(|(index, kind)| Term::Scalar { index, kind, weight }).collect();
        Self::new(len, terms)
    }

    /// `sum_i |w_i - b_i|`.
    pub fn l1_deviation(b: &[f64]) -> Result<Self, ProxError> {
        Self::scalar(b.iter().map(|&b| ScalarProxKind::AbsDeviation { b }).collect(), 1.0)
    }

    /// `count` blocks of length `dim`, laid out consecutively.
    pub fn blocks(count: usize, dim: usize, kind: BlockProxKind, weight: f64) -> Result<Self, ProxError> {
        let terms = (0..count).map(|t| Term::Block { start: t * dim, dim, kind, weight }).collect();
        Self::new(count * dim, terms)
    }

    /// Pairs coordinate `i` with `i + n` for two stacked blocks of length `n`.
    pub fn stacked_pairs(a: &[f64], b: &[f64], weight: f64) -> Result<Self, ProxError> {
        if a.len() != b.len() {
            return Err(ProxError::LengthMismatch { what: "pair offsets", expected: a.len(), found: b.len() });
        }
        let n = a.len();
        let terms =
            (0..n).map(|i| Term::Pair { first: i, second: i + n, a: a[i], b: b[i], weight }).collect();
        Self::new(2 * n, terms)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Euclidean Lipschitz constant of `h`; `sqrt(m)` for the plain l1 deviation.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_convex(&self) -> bool {
        self.terms.iter().all(Term::is_convex)
    }

    /// True when every span is a single coordinate.
    pub fn is_coordinate_separable(&self) -> bool {
        self.terms.iter().all(|t| matches!(t, Term::Scalar { .. }))
    }

    pub fn value(&self, w: &Vector) -> f64 {
        self.terms.iter().map(|t| self.term_value(t, w)).sum()
    }

    /// `H(w) = [mu_i h_i(w_i)]_i`; defined only for coordinate-separable plans.
    pub fn coordinate_values(&self, w: &Vector) -> Result<Vector, ProxError> {
        self.check(w.len())?;
        if !self.is_coordinate_separable() {
            return Err(ProxError::InvalidPlan("coordinate values need scalar terms only".into()));
        }
        let mut out = Vector::zeros(self.len);
        for t in &self.terms {
            if let Term::Scalar { index, kind, weight } = t {
                out[*index] = weight * kind.value(w[*index]);
            }
        }
        Ok(out)
    }

    /// `sum_i v_i mu_i h_i(w_i)`.
    pub fn weighted_value(&self, w: &Vector, v: &Vector) -> Result<f64, ProxError> {
        self.check(v.len())?;
        Ok(self.coordinate_values(w)?.dot(v))
    }

    fn term_value(&self, t: &Term, w: &Vector) -> f64 {
        match *t {
            Term::Scalar { index, kind, weight } => weight * kind.value(w[index]),
            Term::Pair { first, second, a, b, weight } => weight * (w[first] + a).min(w[second] + b).abs(),
            Term::Block { start, dim, kind, weight } => weight * kind.value(&w.as_slice()[start..start + dim]),
        }
    }

    fn check(&self, n: usize) -> Result<(), ProxError> {
        if n != self.len {
            return Err(ProxError::LengthMismatch { what: "nonsmooth plan", expected: self.len, found: n });
        }
        Ok(())
    }
}

/// `argmin_w h(w) + 1/(2 step) ||w - v||^2`, with per-coordinate weights
/// scaling the term (weighted form `prox_{step <weights, H>}`).
///
/// A coordinate whose effective weight is zero is copied through untouched.
pub fn prox_separable(
    h: &SeparableNonsmooth,
    v: &Vector,
    step: f64,
    weights: Option<&Vector>,
) -> Result<Vector, ProxError> {
    h.check(v.len())?;
    if !(step.is_finite() && step > 0.0) {
        return Err(ProxError::BadParameter(format!("step {step}")));
    }
    if let Some(u) = weights {
        h.check(u.len())?;
        if !h.is_coordinate_separable() {
            return Err(ProxError::InvalidPlan("weights need scalar terms only".into()));
        }
        if u.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(ProxError::BadParameter("weights must lie in [0, 1]".into()));
        }
    }
    let mut out = v.clone();
    for t in &h.terms {
        match *t {
            Term::Scalar { index, kind, weight } => {
                let mu = step * weight * weights.map_or(1.0, |u| u[index]);
                if mu > 0.0 {
                    out[index] = kind.prox(v[index], mu);
                }
            }
            Term::Pair { weight, .. } | Term::Block { weight, .. } if weight == 0.0 => {}
            Term::Pair { first, second, a, b, weight } => {
                let (z1, z2) = prox_min_abs_pair(v[first], v[second], step * weight, a, b);
                out[first] = z1;
                out[second] = z2;
            }
            Term::Block { start, dim, kind, weight } => {
                let z = kind.prox(&v.as_slice()[start..start + dim], step * weight);
                out.as_mut_slice()[start..start + dim].copy_from_slice(&z);
            }
        }
    }
    Ok(out)
}

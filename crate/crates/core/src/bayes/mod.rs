//! Paired-sample t-test and its default Bayes factor.
//!
//! The alternative puts a zero-centred Cauchy prior of scale `r` on the
//! standardized effect size `δ`; directional hypotheses truncate it to one
//! half-line and renormalize. With `δ = r·tan θ` the prior mass element is
//! `dθ / π`, so
//!
//! ```text
//! BF+ = (2/π) ∫_0^{π/2}     L(r tan θ) / L(0) dθ
//! BF  = (1/π) ∫_{-π/2}^{π/2} L(r tan θ) / L(0) dθ
//! ```
//!
//! where `L(δ)` is the non-central t density of the observed t with `n - 1`
//! degrees of freedom and non-centrality `δ √n`.

pub mod nct;
pub mod quadrature;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::par::{map_ordered, Execution};
use quadrature::{integrate, Tolerance};

pub const DEFAULT_PRIOR_SCALE: f64 = 0.707;

/// Relative accuracy requested from the outer integral.
const BF_TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-8, max_panels: 200 };
/// Largest relative error estimate accepted as a result.
pub const BF_MAX_REL_ERROR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BayesError {
    #[error("samples differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("need at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("scores must be finite")]
    NonFinite,
    #[error("differences have zero variance")]
    DegenerateSample,
    #[error("prior scale must be positive and finite, got {0}")]
    InvalidPriorScale(f64),
    #[error("Bayes factor integration failed: estimate {estimate}, relative error {rel_error:e}")]
    IntegrationFailure { estimate: f64, rel_error: f64 },
}

/// Which hypothesis the alternative states about the pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// a < b
    ALess,
    /// a > b
    AGreater,
    TwoSided,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::ALess => "<",
            Direction::AGreater => ">",
            Direction::TwoSided => "≠",
        }
    }
}

/// Two equal-length score lists, one pair per participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSample {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self, BayesError> {
        if a.len() != b.len() {
            return Err(BayesError::LengthMismatch { a: a.len(), b: b.len() });
        }
        if a.len() < 2 {
            return Err(BayesError::TooFewPairs(a.len()));
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(BayesError::NonFinite);
        }
        Ok(PairedSample { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Differences oriented so that positive values favor `direction`
    /// (`b - a` for `ALess` and two-sided, `a - b` for `AGreater`).
    pub fn differences(&self, direction: Direction) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| if direction == Direction::AGreater { a - b } else { b - a })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    /// Upper tail for directional tests, both tails for two-sided.
    pub p: f64,
}

pub fn paired_t(sample: &PairedSample, direction: Direction) -> Result<TTest, BayesError> {
    let d = sample.differences(direction);
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    // Relative to the scale of the data, so exact constant shifts are caught.
    let scale = d.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if var <= (scale * 1e-14).powi(2) {
        return Err(BayesError::DegenerateSample);
    }
    let t = mean * n.sqrt() / var.sqrt();
    let df = d.len() - 1;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    let p = match direction {
        Direction::TwoSided => (2.0 * dist.sf(t.abs())).min(1.0),
        _ => dist.sf(t),
    };
    Ok(TTest { t, df, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactor {
    pub bf10: f64,
    /// Relative integration error estimate.
    pub rel_error: f64,
}

/// BF10 for a paired t statistic. `t` must be oriented as returned by
/// [`paired_t`] for the same direction, so positive `t` favors it.
pub fn bf10_directional(t: f64, n: usize, prior_scale: f64, direction: Direction) -> Result<BayesFactor, BayesError> {
    if n < 2 {
        return Err(BayesError::TooFewPairs(n));
    }
    if !(prior_scale.is_finite() && prior_scale > 0.0) {
        return Err(BayesError::InvalidPriorScale(prior_scale));
    }
    if !t.is_finite() {
        return Err(BayesError::NonFinite);
    }
    let nu = (n - 1) as f64;
    let sqrt_n = (n as f64).sqrt();
    let ln_null = nct::ln_pdf_central(t, nu);
    let mut failure = None;
    let integrand = |theta: f64| {
        let delta = prior_scale * theta.tan();
        match nct::ln_pdf(t, nu, delta * sqrt_n) {
            Ok(ln_alt) => (ln_alt - ln_null).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (lo, hi, norm) = match direction {
        Direction::TwoSided => (-half_pi, half_pi, 1.0 / std::f64::consts::PI),
        _ => (0.0, half_pi, 2.0 / std::f64::consts::PI),
    };
    // Seed panels near the likelihood peak δ ≈ t / √n.
    let peak = (t / sqrt_n / prior_scale).atan();
    let breaks = [peak, 0.5 * (peak + hi), 0.0];
    let result = integrate(integrand, lo, hi, &breaks, BF_TOL);
    if failure.is_some() {
        return Err(BayesError::IntegrationFailure { estimate: f64::NAN, rel_error: f64::INFINITY });
    }
    match result {
        Ok(r) => {
            let bf10 = norm * r.value;
            let rel_error = r.abs_error / r.value.abs();
            if !(bf10 > 0.0 && bf10.is_finite()) || rel_error > BF_MAX_REL_ERROR {
                return Err(BayesError::IntegrationFailure { estimate: bf10, rel_error });
            }
            Ok(BayesFactor { bf10, rel_error })
        }
        Err(e) => Err(BayesError::IntegrationFailure {
            estimate: norm * e.value,
            rel_error: e.abs_error / e.value.abs(),
        }),
    }
}

/// Verbal evidence category for a Bayes factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvidenceBand {
    None,
    Anecdotal,
    Moderate,
    Strong,
    VeryStrong,
    Extreme,
}

impl EvidenceBand {
    pub fn label(self) -> &'static str {
        match self {
            EvidenceBand::None => "no evidence",
            EvidenceBand::Anecdotal => "anecdotal",
            EvidenceBand::Moderate => "moderate",
            EvidenceBand::Strong => "strong",
            EvidenceBand::VeryStrong => "very strong",
            EvidenceBand::Extreme => "extreme",
        }
    }
}

pub fn classify_evidence(bf10: f64) -> EvidenceBand {
    if bf10 <= 1.0 {
        EvidenceBand::None
    } else if bf10 < 3.0 {
        EvidenceBand::Anecdotal
    } else if bf10 < 10.0 {
        EvidenceBand::Moderate
    } else if bf10 < 30.0 {
        EvidenceBand::Strong
    } else if bf10 < 100.0 {
        EvidenceBand::VeryStrong
    } else {
        EvidenceBand::Extreme
    }
}

/// Table footnote stars: `*` above 10, `**` above 30, `***` above 100.
pub fn stars(bf10: f64) -> &'static str {
    if bf10 > 100.0 {
        "***"
    } else if bf10 > 30.0 {
        "**"
    } else if bf10 > 10.0 {
        "*"
    } else {
        ""
    }
}

/// Three decimals followed by the star marker, e.g. `101.651***`.
pub fn format_bf10(bf10: f64) -> String {
    format!("{bf10:.3}{}", stars(bf10))
}

/// Parses a table cell such as `17.597*` back into its value.
pub fn parse_bf10(cell: &str) -> Option<f64> {
    cell.trim().trim_end_matches('*').parse().ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesComparison {
    pub direction: Direction,
    pub n: usize,
    pub t: f64,
    pub df: usize,
    pub p: f64,
    pub bf10: f64,
    pub bf10_rel_error: f64,
    pub band: EvidenceBand,
    pub prior_scale: f64,
}

pub fn compare(sample: &PairedSample, direction: Direction, prior_scale: f64) -> Result<BayesComparison, BayesError> {
    let tt = paired_t(sample, direction)?;
    let bf = bf10_directional(tt.t, sample.len(), prior_scale, direction)?;
    Ok(BayesComparison {
        direction,
        n: sample.len(),
        t: tt.t,
        df: tt.df,
        p: tt.p,
        bf10: bf.bf10,
        bf10_rel_error: bf.rel_error,
        band: classify_evidence(bf.bf10),
        prior_scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub t: f64,
    pub n: usize,
    pub bf10: f64,
    pub rel_error: f64,
}

/// BF10 over every `(t, n)` combination, t varying fastest.
pub fn bf10_grid(
    ts: &[f64],
    ns: &[usize],
    prior_scale: f64,
    direction: Direction,
    execution: Execution,
) -> Result<Vec<GridPoint>, BayesError> {
    let cells: Vec<(f64, usize)> = ns.iter().flat_map(|&n| ts.iter().map(move |&t| (t, n))).collect();
    map_ordered(&cells, execution, |&(t, n)| {
        bf10_directional(t, n, prior_scale, direction).map(|bf| GridPoint { t, n, bf10: bf.bf10, rel_error: bf.rel_error })
    })
    .into_iter()
    .collect()
}

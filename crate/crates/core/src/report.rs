//! Flat, schema-stable report records for JSON output.

use crate::classify::{BernoulliPortrait, EquilibriumInfo, InfinityEquilibrium, PortraitClass};
use crate::cpoly::BivarPoly;
use crate::error::{Error, Result};
use crate::potential::{stream_function_poly, PotentialRep};
use crate::pwcycles::{
    antiholo_degree_bound, solve_antiholo_pair, solve_mixed_general, solve_mixed_linear_checked,
    verify_candidate, CycleCandidate, CycleOptions, MixedConstants, Verification,
};
use crate::system::{PiecewiseSpec, SystemSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    #[serde(rename = "type")]
    pub etype: String,
}

impl From<&EquilibriumInfo> for EquilibriumRecord {
    fn from(e: &EquilibriumInfo) -> Self {
        EquilibriumRecord {
            re: e.location.re,
            im: e.location.im,
            multiplicity: e.multiplicity,
            lambda_re: e.lambda.re,
            lambda_im: e.lambda.im,
            etype: e.etype.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub center: usize,
    pub sepal: usize,
    pub alpha_omega: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinityRecord {
    pub angle: f64,
    pub det: f64,
}

impl From<&InfinityEquilibrium> for InfinityRecord {
    fn from(e: &InfinityEquilibrium) -> Self {
        InfinityRecord {
            angle: e.angle,
            det: e.saddle_det,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub config_label: String,
    pub eps: f64,
    pub equilibria: Vec<EquilibriumRecord>,
    pub regions: RegionCounts,
    pub infinity: Vec<InfinityRecord>,
}

impl ClassifyReport {
    pub fn new(class: &PortraitClass, eps: f64, infinity: &[InfinityEquilibrium]) -> Self {
        ClassifyReport {
            config_label: class.config_label.letter().to_string(),
            eps,
            equilibria: class.equilibria.iter().map(Into::into).collect(),
            regions: RegionCounts {
                center: class.center_regions,
                sepal: class.sepal_regions,
                alpha_omega: class.alpha_omega_regions,
            },
            infinity: infinity.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliReport {
    pub n: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub equilibria: Vec<EquilibriumRecord>,
    pub regions: RegionCounts,
    pub infinity: Vec<InfinityRecord>,
}

impl From<&BernoulliPortrait> for BernoulliReport {
    fn from(b: &BernoulliPortrait) -> Self {
        BernoulliReport {
            n: b.n,
            alpha_re: b.alpha.re,
            alpha_im: b.alpha.im,
            equilibria: b.equilibria.iter().map(Into::into).collect(),
            regions: RegionCounts {
                center: b.center_regions,
                sepal: 0,
                alpha_omega: b.alpha_omega_regions,
            },
            infinity: b.infinity.iter().map(Into::into).collect(),
        }
    }
}

/// One monomial `coeff x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
}

fn monomials(p: &BivarPoly) -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in 0..=p.degree() {
        for j in 0..=p.degree() - i {
            let coeff = p.get(i, j);
            if coeff != 0.0 {
                out.push(Monomial { i, j, coeff });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub spec: SystemSpec,
    pub potential: PotentialRep,
    /// Monomials of `phi`, present when the potential is polynomial.
    pub phi: Option<Vec<Monomial>>,
    /// Monomials of `psi`, present when the potential is polynomial.
    pub psi: Option<Vec<Monomial>>,
}

impl PotentialReport {
    pub fn new(spec: &SystemSpec, rep: &PotentialRep) -> Self {
        let parts = stream_function_poly(rep);
        PotentialReport {
            spec: spec.clone(),
            potential: rep.clone(),
            phi: parts.as_ref().map(|(phi, _)| monomials(phi)),
            psi: parts.as_ref().map(|(_, psi)| monomials(psi)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleFamily {
    MixedLinear,
    MixedGeneral,
    Antiholo,
}

/// The system a cycle report was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleSystem {
    Mixed(MixedConstants),
    Antiholo {
        upper: SystemSpec,
        lower: SystemSpec,
    },
}

impl CycleSystem {
    pub fn piecewise(&self) -> PiecewiseSpec {
        match self {
            CycleSystem::Mixed(k) => k.piecewise(),
            CycleSystem::Antiholo { upper, lower } => PiecewiseSpec {
                upper: upper.clone(),
                lower: lower.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub family: CycleFamily,
    pub candidates: Vec<CycleCandidate>,
    pub continuum: bool,
    pub bound: Option<usize>,
    pub system: CycleSystem,
}

/// Runs the solver for `family` on `system`. Continua are reported, not raised.
pub fn cycle_report(
    family: CycleFamily,
    system: CycleSystem,
    tol: f64,
    opts: &CycleOptions,
) -> Result<CycleReport> {
    let (found, bound) = match (&system, family) {
        (CycleSystem::Mixed(k), CycleFamily::MixedLinear) => {
            (solve_mixed_linear_checked(k, opts), Some(1))
        }
        (CycleSystem::Mixed(k), CycleFamily::MixedGeneral) => {
            (solve_mixed_general(k, tol, opts), Some(3))
        }
        (CycleSystem::Antiholo { .. }, CycleFamily::Antiholo) => {
            let spec = system.piecewise();
            (
                solve_antiholo_pair(&spec, tol, opts),
                antiholo_degree_bound(&spec),
            )
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "family {family:?} does not match the given system"
            )))
        }
    };
    let (candidates, continuum) = match found {
        Ok(c) => (c, false),
        Err(Error::CenterContinuum { .. }) | Err(Error::ContinuumDetected) => (Vec::new(), true),
        Err(e) => return Err(e),
    };
    Ok(CycleReport {
        family,
        candidates,
        continuum,
        bound,
        system,
    })
}

/// Outcome of re-integrating one reported candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub reported: CycleCandidate,
    pub recomputed: CycleCandidate,
    /// Confirmation agrees with the report and multipliers match to `1e-4` relative.
    pub pass: bool,
}

/// Re-integrates every candidate of a report.
pub fn verify_report(report: &CycleReport, opts: &CycleOptions) -> Result<Vec<VerifyOutcome>> {
    let spec = report.system.piecewise();
    report
        .candidates
        .iter()
        .map(|c| {
            let fresh = verify_candidate(
                &spec,
                &CycleCandidate {
                    multiplier: None,
                    ..*c
                },
                opts,
            )?;
            let confirmed = |v: Verification| v == Verification::NumericallyConfirmed;
            let same_status = match c.verified {
                Verification::Analytic => true,
                v => confirmed(v) == confirmed(fresh.verified),
            };
            let multipliers = match (c.multiplier, fresh.multiplier) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-4 * a.abs().max(1e-12),
                (None, _) => true,
                (Some(_), None) => !confirmed(fresh.verified),
            };
            Ok(VerifyOutcome {
                reported: *c,
                recomputed: fresh,
                pass: same_status
                    && multipliers
                    && (c.verified == Verification::Rejected || confirmed(fresh.verified)),
            })
        })
        .collect()
}

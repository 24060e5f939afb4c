//! Quadratic pairings, the 2-shifted symplectic form `Ψ` on `BG`, and its
//! comparison with the descended Pontryagin cocycle `Φ`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::forms::{random_point, random_tangent, BaseSpace, DifferentialForm, FormError, ProductMap, SlotMap, TotElement, ValueType};
use crate::liegroup::{GroupFamily, MatrixGroup};
use crate::matrix::{self, CMat};
use crate::report::{relative, CheckRecord, Tolerances, VerificationReport};
use crate::sampling::{sample_max, SeedStream};
use crate::shulman::{phi1, phi2, DescentRoute};
use crate::simplicial::NerveKind;

/// Smallest admissible singular value of a pairing's Gram matrix.
pub const NONDEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error("unknown pairing {0:?}; expected killing, killing:c=<value> or trace")]
    UnknownPairing(String),
    #[error("pairing is degenerate on {group} (smallest singular value {singular:.3e})")]
    Degenerate { group: String, singular: f64 },
    #[error("no coefficient identity is known for {0}")]
    Unsupported(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairingKind {
    /// `c·𝒦`.
    ScaledKilling(f64),
    /// `tr(XY)`.
    Trace,
}

impl fmt::Display for PairingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairingKind::ScaledKilling(c) => write!(f, "killing:c={c:e}"),
            PairingKind::Trace => f.write_str("trace"),
        }
    }
}

impl FromStr for PairingKind {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "killing" => return Ok(PairingKind::ScaledKilling(1.0)),
            "trace" => return Ok(PairingKind::Trace),
            _ => {}
        }
        s.strip_prefix("killing:c=")
            .and_then(|c| c.parse::<f64>().ok())
            .filter(|c| c.is_finite() && *c != 0.0)
            .map(PairingKind::ScaledKilling)
            .ok_or_else(|| SymplecticError::UnknownPairing(s.to_string()))
    }
}

/// Symmetric invariant bilinear form on the Lie algebra.
#[derive(Debug, Clone)]
pub struct QuadraticPairing {
    kind: PairingKind,
    group: Arc<MatrixGroup>,
    /// Killing Gram matrix in basis coordinates (scaled killing only).
    gram: Option<DMatrix<f64>>,
}

impl QuadraticPairing {
    pub fn new(kind: PairingKind, group: Arc<MatrixGroup>) -> Result<Self, SymplecticError> {
        let basis = group.basis();
        let d = basis.len();
        let (gram, check) = match kind {
            PairingKind::ScaledKilling(c) => {
                let k = group.killing_gram();
                let scaled = &k * c;
                (Some(k), scaled)
            }
            PairingKind::Trace => (
                None,
                DMatrix::from_fn(d, d, |a, b| matrix::trace(&(&basis[a] * &basis[b])).re),
            ),
        };
        let singular = check.singular_values().min();
        if !(singular > NONDEGENERACY_TOL) {
            return Err(SymplecticError::Degenerate {
                group: group.name().to_string(),
                singular,
            });
        }
        Ok(Self { kind, group, gram })
    }

    pub fn kind(&self) -> PairingKind {
        self.kind
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn pair(&self, a: &CMat, b: &CMat) -> Complex64 {
        match (self.kind, &self.gram) {
            (PairingKind::ScaledKilling(c), Some(gram)) => {
                let ca = DVector::from_vec(self.group.coordinates(a));
                let cb = DVector::from_vec(self.group.coordinates(b));
                Complex64::new(c * ca.dot(&(gram * cb)), 0.0)
            }
            _ => matrix::trace(&(a * b)),
        }
    }

    /// `|⟨a,[b,c]⟩ − ⟨c,[a,b]⟩|`.
    pub fn invariance_residual(&self, a: &CMat, b: &CMat, c: &CMat) -> f64 {
        (self.pair(a, &matrix::commutator(b, c)) - self.pair(c, &matrix::commutator(a, b))).norm()
    }
}

/// `Ψ = (0, −(1/6)⟨ω^l, [ω^l∧ω^l]⟩, ⟨d₀*ω^l, d₂*ω^r⟩, 0, 0)` on `BG`.
pub fn psi(pairing: &QuadraticPairing) -> Result<TotElement, SymplecticError> {
    let group = pairing.group.clone();
    Ok(TotElement::new(
        NerveKind::Base,
        group.clone(),
        4,
        ValueType::Complex,
        vec![None, Some(psi1(pairing)?), Some(psi2(pairing)?), None, None],
    )?)
}

fn pair_closure(pairing: &QuadraticPairing) -> impl Fn(&CMat, &CMat) -> Complex64 + Send + Sync + 'static {
    let p = pairing.clone();
    move |a, b| p.pair(a, b)
}

pub fn psi1(pairing: &QuadraticPairing) -> Result<DifferentialForm, SymplecticError> {
    let w = DifferentialForm::maurer_cartan_left(BaseSpace::groups(1, pairing.group.clone()), 0);
    let bracket = w.bracket_wedge(&w)?;
    Ok(w.wedge_with(&bracket, pair_closure(pairing))?.scale(-1.0 / 6.0))
}

pub fn psi2(pairing: &QuadraticPairing) -> Result<DifferentialForm, SymplecticError> {
    let bg1 = BaseSpace::groups(1, pairing.group.clone());
    let bg2 = BaseSpace::groups(2, pairing.group.clone());
    let d0_left = DifferentialForm::maurer_cartan_left(bg1.clone(), 0)
        .pullback(&ProductMap::slots(SlotMap::BgFace(0)), &bg2)?;
    let d2_right = DifferentialForm::maurer_cartan_right(bg1, 0)
        .pullback(&ProductMap::slots(SlotMap::BgFace(2)), &bg2)?;
    Ok(d0_left.wedge_with(&d2_right, pair_closure(pairing))?)
}

/// Which coefficient to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    /// `−1/(16ncπ²)` for SU(n), `−1/(8(n−1)cπ²)` for the orthogonal
    /// families, `−1/(8π²)` for the trace pairing.
    Stated,
    /// `−1/(8π²·c·k)` where `𝒦 = k·tr` is computed from the algebra.
    FromKillingFactor,
}

/// `λ` in `λ·Ψ = Φ`.
pub fn theorem_coefficient(
    group: &MatrixGroup,
    kind: PairingKind,
    source: CoefficientSource,
) -> Result<f64, SymplecticError> {
    let unsupported = || SymplecticError::Unsupported(group.name().to_string());
    let n = group.n() as f64;
    let pi2 = PI * PI;
    match (group.family(), kind) {
        (GroupFamily::U, _) => Err(unsupported()),
        (_, PairingKind::Trace) => Ok(-1.0 / (8.0 * pi2)),
        (family, PairingKind::ScaledKilling(c)) => match source {
            CoefficientSource::Stated if family == GroupFamily::SU => {
                Ok(-1.0 / (16.0 * n * c * pi2))
            }
            CoefficientSource::Stated => Ok(-1.0 / (8.0 * (n - 1.0) * c * pi2)),
            CoefficientSource::FromKillingFactor => {
                let k = group.killing_trace_factor().ok_or_else(unsupported)?;
                if k == 0.0 {
                    return Err(unsupported());
                }
                Ok(-1.0 / (8.0 * pi2 * c * k))
            }
        },
    }
}

/// `max |λΨᵢ − Φᵢ| / max(|Φᵢ|, ε)` over seeded samples at levels 1 and 2.
pub fn final_theorem_check(
    pairing: &QuadraticPairing,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport, SymplecticError> {
    final_theorem_check_with(pairing, samples, seed, tol, CoefficientSource::Stated)
}

pub fn final_theorem_check_with(
    pairing: &QuadraticPairing,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
    source: CoefficientSource,
) -> Result<VerificationReport, SymplecticError> {
    let group = pairing.group.clone();
    let coef = theorem_coefficient(&group, pairing.kind, source)?;
    let phis = [phi1(group.clone()), phi2(group.clone(), DescentRoute::Unitary)?];
    let psis = [psi1(pairing)?, psi2(pairing)?];
    let suffix = match source {
        CoefficientSource::Stated => "",
        CoefficientSource::FromKillingFactor => "_killing_factor",
    };
    let mut report = VerificationReport::new();
    for level in 1..=2usize {
        let id = format!("symplectic.theorem_level{level}{suffix}");
        let seeds = SeedStream::new(seed, &format!("symplectic.theorem_level{level}"));
        let (phi, psi) = (&phis[level - 1], &psis[level - 1]);
        let r = sample_max(&seeds, samples, |rng| {
            let base = BaseSpace::groups(level, group.clone());
            let p = random_point(&base, rng);
            let args: Vec<_> = (0..phi.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
            let target = phi.value(&p, &args);
            let scaled = psi.value(&p, &args).scale(Complex64::new(coef, 0.0));
            relative(scaled.max_abs_diff(&target), target.norm())
        });
        let anchor = format!("{coef:.6e} * Psi_{level} = Phi_{level} ({}, {})", group.name(), pairing.kind);
        report.push(CheckRecord::from_residual(id, anchor, samples, r, tol.closed_form));
    }
    Ok(report)
}

/// Brute-force Killing form against `k·tr(XY)`.
pub fn killing_lemma_check(group: &Arc<MatrixGroup>, samples: usize, seed: u64) -> Result<VerificationReport, SymplecticError> {
    let factor = group
        .killing_trace_factor()
        .ok_or_else(|| SymplecticError::Unsupported(group.name().to_string()))?;
    let id = format!("symplectic.killing_lemma.{}", group.name());
    let seeds = SeedStream::new(seed, &id);
    let r = sample_max(&seeds, samples, |rng| {
        let x = group.sample_algebra(rng);
        let y = group.sample_algebra(rng);
        let k = group.killing_form(&x, &y);
        let t = factor * matrix::trace(&(&x * &y)).re;
        relative((k - t).abs(), t)
    });
    let mut report = VerificationReport::new();
    report.push(CheckRecord::from_residual(
        id,
        format!("Killing = {factor} tr on {}", group.name()),
        samples,
        r,
        1e-8,
    ));
    Ok(report)
}

/// Invariance and antisymmetry of the pairing, plus the pointwise reductions
/// of `Ψ₁` and `Ψ₂` to trace expressions when `⟨,⟩ = c·k·tr`.
pub fn pairing_suite(pairing: &QuadraticPairing, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let group = pairing.group.clone();
    let mut report = VerificationReport::new();

    let id = "symplectic.pairing_invariance".to_string();
    let seeds = SeedStream::new(seed, &id);
    let r = sample_max(&seeds, samples, |rng| {
        let (a, b, c) = (group.sample_algebra(rng), group.sample_algebra(rng), group.sample_algebra(rng));
        let sym = (pairing.pair(&a, &b) - pairing.pair(&b, &a)).norm();
        let base = pairing.pair(&a, &matrix::commutator(&b, &c));
        // ⟨a₁,[a₂,a₃]⟩ = sign(σ)⟨a_σ1,[a_σ2,a_σ3]⟩
        let args = [&a, &b, &c];
        let perms: [([usize; 3], f64); 6] = [
            ([0, 1, 2], 1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([1, 0, 2], -1.0),
            ([0, 2, 1], -1.0),
            ([2, 1, 0], -1.0),
        ];
        let chain = perms
            .iter()
            .map(|(s, sign)| {
                let v = pairing.pair(args[s[0]], &matrix::commutator(args[s[1]], args[s[2]]));
                (v * *sign - base).norm()
            })
            .fold(0.0, f64::max);
        relative(sym.max(chain).max(pairing.invariance_residual(&a, &b, &c)), base.norm())
    });
    report.push(CheckRecord::from_residual(id, "<a,[b,c]> = <c,[a,b]>, symmetric", samples, r, 1e-10));

    let scalar = match (pairing.kind, group.killing_trace_factor()) {
        (PairingKind::Trace, _) => Some(1.0),
        (PairingKind::ScaledKilling(c), Some(k)) => Some(c * k),
        _ => None,
    };
    if let (Some(s), Ok(p1form), Ok(p2form)) = (scalar, psi1(pairing), psi2(pairing)) {
        let tr_pairing = QuadraticPairing {
            kind: PairingKind::Trace,
            group: group.clone(),
            gram: None,
        };
        let reduced = [psi1(&tr_pairing), psi2(&tr_pairing)];
        if let [Ok(r1), Ok(r2)] = reduced {
            let id = "symplectic.psi_trace_reduction".to_string();
            let seeds = SeedStream::new(seed, &id);
            let pairs = [(1usize, &p1form, r1), (2, &p2form, r2)];
            let r = sample_max(&seeds, samples, |rng| {
                crate::report::max_residual(pairs.iter().map(|(level, full, tr)| {
                    let base = BaseSpace::groups(*level, group.clone());
                    let p = random_point(&base, rng);
                    let args: Vec<_> = (0..full.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
                    let expected = tr.value(&p, &args).scale(Complex64::new(s, 0.0));
                    relative(full.value(&p, &args).max_abs_diff(&expected), expected.norm())
                }))
            });
            report.push(CheckRecord::from_residual(id, "Psi with c k tr = c k Psi with tr", samples, r, tol.closed_form.min(1e-10)));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{Point, Tangent};

    fn group(spec: &str) -> Arc<MatrixGroup> {
        Arc::new(MatrixGroup::parse(spec).unwrap())
    }

    #[test]
    fn parse_pairings() {
        assert_eq!("killing".parse::<PairingKind>().unwrap(), PairingKind::ScaledKilling(1.0));
        assert_eq!("killing:c=-0.5".parse::<PairingKind>().unwrap(), PairingKind::ScaledKilling(-0.5));
        assert_eq!("trace".parse::<PairingKind>().unwrap(), PairingKind::Trace);
        assert!("killing:c=0".parse::<PairingKind>().is_err());
        assert!("dot".parse::<PairingKind>().is_err());
    }

    #[test]
    fn degenerate_pairings_are_rejected() {
        assert!(matches!(
            QuadraticPairing::new(PairingKind::ScaledKilling(1.0), group("so:2")),
            Err(SymplecticError::Degenerate { .. })
        ));
        assert!(QuadraticPairing::new(PairingKind::Trace, group("so:2")).is_ok());
    }

    #[test]
    fn psi1_at_identity() {
        let g = group("su:3");
        let pairing = QuadraticPairing::new(PairingKind::ScaledKilling(0.7), g.clone()).unwrap();
        let form = psi1(&pairing).unwrap();
        let mut rng = SeedStream::new(1, "psi").rng(0);
        let (x, y, z) = (g.sample_algebra(&mut rng), g.sample_algebra(&mut rng), g.sample_algebra(&mut rng));
        let p = Point::groups(vec![g.identity()]);
        let t = |m: &CMat| Tangent::slots(0, vec![m.clone()]);
        let v = form.value(&p, &[t(&x), t(&y), t(&z)]).scalar().unwrap();
        let expected = -pairing.pair(&x, &matrix::commutator(&y, &z));
        assert!((v - expected).norm() < 1e-12 * expected.norm().max(1.0));
        let swapped = form.value(&p, &[t(&y), t(&x), t(&z)]).scalar().unwrap();
        assert!((swapped + v).norm() < 1e-12);
    }

    #[test]
    fn psi2_is_alternating() {
        let g = group("so:3");
        let pairing = QuadraticPairing::new(PairingKind::Trace, g.clone()).unwrap();
        let form = psi2(&pairing).unwrap();
        let base = BaseSpace::groups(2, g.clone());
        let mut rng = SeedStream::new(2, "psi2").rng(0);
        let p = random_point(&base, &mut rng);
        let v = random_tangent(&base, &p, &mut rng);
        assert!(form.value(&p, &[v.clone(), v]).norm() < 1e-15);
    }

    #[test]
    fn stated_and_derived_coefficients() {
        let su3 = group("su:3");
        let so4 = group("so:4");
        let k = PairingKind::ScaledKilling(1.0);
        let stated = theorem_coefficient(&su3, k, CoefficientSource::Stated).unwrap();
        let derived = theorem_coefficient(&su3, k, CoefficientSource::FromKillingFactor).unwrap();
        assert!((stated - derived).abs() < 1e-15);
        let stated = theorem_coefficient(&so4, k, CoefficientSource::Stated).unwrap();
        let derived = theorem_coefficient(&so4, k, CoefficientSource::FromKillingFactor).unwrap();
        assert!((stated / derived - 2.0 / 3.0).abs() < 1e-14);
        assert!(theorem_coefficient(&group("u:2"), k, CoefficientSource::Stated).is_err());
    }

    #[test]
    fn su2_theorem_holds() {
        let pairing = QuadraticPairing::new(PairingKind::ScaledKilling(1.0), group("su:2")).unwrap();
        let report = final_theorem_check(&pairing, 10, 3, &Tolerances::default()).unwrap();
        assert!(report.overall_pass(), "{}", report.to_document());
    }
}

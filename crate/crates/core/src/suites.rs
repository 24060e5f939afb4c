//! Verification suites, one per module, each producing a [`VerificationReport`].

use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;

use crate::forms::{
    boundary_stokes_check, random_point, random_tangent, BaseSpace, DifferentialForm, FormValue,
    Point, Polynomial, PolynomialOneForm, ProductMap, SimplexQuadrature, SlotMap, Tangent,
    DEFAULT_QUADRATURE_DEGREE,
};
use crate::invariants::{chern, chern_vs_pontryagin_check, p1, p1_closed_complex};
use crate::liegroup::{mat_exp, Ad, MatrixGroup};
use crate::matrix::{self, CMat};
use crate::report::{max_residual, relative, CheckRecord, Tolerances, VerificationReport};
use crate::sampling::{sample_max, SampleRng, SeedStream};
use crate::shulman::{self, chi_closed_p1, kappa, omega_bar, omega_hat, phi2, DescentRoute};
use crate::simplicial::{
    delta, enumerate_yoneda, gamma, normal_form, segal_check, sigma, CategoryTable, MonotoneMap,
    NerveLevel,
};
use crate::symplectic::{self, CoefficientSource, PairingKind, QuadraticPairing};

/// Tolerance of the Maurer–Cartan equation with the numerical derivative.
pub const MAURER_CARTAN_TOL: f64 = 1e-6;
/// Tolerance of `d∘d = 0`, limited by nested finite differences.
pub const DD_TOL: f64 = 1e-4;
/// Tolerance of alternation and multilinearity probes.
pub const MULTILINEAR_TOL: f64 = 1e-10;
/// Tolerance of the boundary formula on polynomial forms.
pub const STOKES_TOL: f64 = 1e-10;
/// Tolerance of lift independence of the fibre integral.
pub const LIFT_TOL: f64 = 1e-9;
/// Tolerance of membership of `exp` of algebra samples.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Tolerance of `Ad`-invariance of invariant polynomials.
pub const AD_INVARIANCE_TOL: f64 = 1e-9;

/// Suites in their fixed execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Simplicial,
    Liegroup,
    Forms,
    Invariants,
    Shulman,
    Symplectic,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Simplicial,
        Suite::Liegroup,
        Suite::Forms,
        Suite::Invariants,
        Suite::Shulman,
        Suite::Symplectic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Simplicial => "simplicial",
            Suite::Liegroup => "liegroup",
            Suite::Forms => "forms",
            Suite::Invariants => "invariants",
            Suite::Shulman => "shulman",
            Suite::Symplectic => "symplectic",
        }
    }

    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().find(|x| x.name() == s).map(|x| vec![*x])
    }
}

/// Shared inputs of every suite.
#[derive(Debug, Clone)]
pub struct SuiteInputs {
    pub group: Arc<MatrixGroup>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub pairing: PairingKind,
}

pub fn run_suite(suite: Suite, inputs: &SuiteInputs) -> VerificationReport {
    let g = inputs.group.clone();
    let (samples, seed, tol) = (inputs.samples, inputs.seed, &inputs.tolerances);
    match suite {
        Suite::Simplicial => simplicial_suite(g, samples, seed, tol),
        Suite::Liegroup => liegroup_suite(g, samples, seed, tol),
        Suite::Forms => forms_suite(g, samples, seed, tol),
        Suite::Invariants => invariants_suite(g, samples, seed, tol),
        Suite::Shulman => {
            let mut r = shulman::shulman_theorem_suite(g.clone(), samples, seed, tol);
            r.extend(shulman::connection_suite(g.clone(), samples, seed, tol));
            r.extend(shulman::descent_suite(g, samples, seed, tol));
            r
        }
        Suite::Symplectic => symplectic_suite(g, inputs.pairing, samples, seed, tol),
    }
}

fn count_record(id: &str, anchor: &str, checked: usize, failures: usize) -> CheckRecord {
    CheckRecord::from_residual(id, anchor, checked, failures as f64, 1.0)
}

fn random_tuple(group: &MatrixGroup, len: usize, rng: &mut SampleRng) -> Vec<CMat> {
    (0..len).map(|_| group.sample_group(rng)).collect()
}

fn tuple_diff(a: &[CMat], b: &[CMat]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    max_residual(a.iter().zip(b).map(|(x, y)| matrix::max_abs_diff(x, y)))
}

/// Residual of every simplicial identity at one sampled point of each level.
fn nerve_identity_residual(group: &MatrixGroup, rng: &mut SampleRng) -> f64 {
    let size = group.n();
    let mut worst: Vec<f64> = Vec::new();
    for n in 0..=4usize {
        for level in [NerveLevel::base(n, size), NerveLevel::total(n, size)] {
            let x = random_tuple(group, level.arity(), rng);
            let down = |k: usize| NerveLevel { level: k, ..level };
            let d = |k: usize, i: usize, p: &[CMat]| down(k).face(i, p).expect("valid face");
            let s = |k: usize, i: usize, p: &[CMat]| down(k).degeneracy(i, p).expect("valid degeneracy");
            if n >= 2 {
                for j in 0..=n {
                    for i in 0..j {
                        worst.push(tuple_diff(&d(n - 1, i, &d(n, j, &x)), &d(n - 1, j - 1, &d(n, i, &x))));
                    }
                }
            }
            for j in 0..=n {
                for i in j + 1..=n + 1 {
                    // sᵢsⱼ = sⱼsᵢ₋₁ for i > j
                    worst.push(tuple_diff(&s(n + 1, i, &s(n, j, &x)), &s(n + 1, j, &s(n, i - 1, &x))));
                }
            }
            for j in 0..=n {
                let sx = s(n, j, &x);
                for i in 0..=n + 1 {
                    let lhs = d(n + 1, i, &sx);
                    let rhs = if i < j {
                        s(n - 1, j - 1, &d(n, i, &x))
                    } else if i == j || i == j + 1 {
                        x.clone()
                    } else {
                        s(n - 1, j, &d(n, i - 1, &x))
                    };
                    worst.push(tuple_diff(&lhs, &rhs));
                }
            }
            if level.kind == crate::simplicial::NerveKind::Total {
                let gx = gamma(&x).expect("invertible samples");
                let bg = |k: usize| NerveLevel::base(k, size);
                if n >= 1 {
                    for i in 0..=n {
                        let lhs = gamma(&d(n, i, &x)).expect("invertible");
                        worst.push(tuple_diff(&lhs, &bg(n).face(i, &gx).expect("face")));
                    }
                }
                for i in 0..=n {
                    let lhs = gamma(&s(n, i, &x)).expect("invertible");
                    worst.push(tuple_diff(&lhs, &bg(n).degeneracy(i, &gx).expect("degeneracy")));
                }
                let h = group.sample_group(rng);
                let moved = crate::simplicial::eg_right_action(&x, &h);
                worst.push(tuple_diff(&gamma(&moved).expect("invertible"), &gx));
            }
        }
    }
    max_residual(worst)
}

pub fn simplicial_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();

    // exhaustive cosimplicial equations on maps of size ≤ 5
    let mut checked = 0;
    let mut failures = 0;
    let mut expect = |a: MonotoneMap, b: MonotoneMap| {
        checked += 1;
        if a != b {
            failures += 1;
        }
    };
    for n in 1..=5usize {
        for j in 0..=n {
            for i in 0..j {
                if n >= 2 {
                    expect(
                        delta(j, n).and_then(|d| d.compose(&delta(i, n - 1)?)).expect("valid"),
                        delta(i, n).and_then(|d| d.compose(&delta(j - 1, n - 1)?)).expect("valid"),
                    );
                }
            }
        }
    }
    for n in 0..=4usize {
        for i in 1..=n + 1 {
            for j in 0..i {
                expect(
                    sigma(j, n).and_then(|s| s.compose(&sigma(i, n + 1)?)).expect("valid"),
                    sigma(i - 1, n).and_then(|s| s.compose(&sigma(j, n + 1)?)).expect("valid"),
                );
            }
        }
    }
    for n in 1..=4usize {
        for j in 0..=n {
            for i in 0..=n + 1 {
                let lhs = sigma(j, n).and_then(|s| s.compose(&delta(i, n + 1)?)).expect("valid");
                let rhs = if i < j {
                    delta(i, n).and_then(|d| d.compose(&sigma(j - 1, n - 1)?))
                } else if i == j || i == j + 1 {
                    Ok(MonotoneMap::identity(n + 1))
                } else {
                    delta(i - 1, n).and_then(|d| d.compose(&sigma(j, n - 1)?))
                };
                expect(lhs, rhs.expect("valid"));
            }
        }
    }
    report.push(count_record("simplicial.cosimplicial_equations", "cosimplicial equations, sizes <= 5", checked, failures));

    let mut checked = 0;
    let mut failures = 0;
    for k in 0..=5 {
        for m in 0..=5 {
            for f in enumerate_yoneda(m, k) {
                checked += 1;
                if normal_form(&f).recompose().ok().as_ref() != Some(&f) {
                    failures += 1;
                }
            }
        }
    }
    report.push(count_record("simplicial.normal_form_roundtrip", "normal form recomposes, [k] -> [m], k, m <= 5", checked, failures));

    let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    let mut failures = 0;
    for n in 0..=4 {
        for k in 0..=4 {
            if enumerate_yoneda(n, k).len() != binom(n + k + 1, k + 1) {
                failures += 1;
            }
        }
    }
    report.push(count_record("simplicial.yoneda_counts", "|Delta[n]_k| = C(n+k+1, k+1)", 25, failures));

    let z2 = CategoryTable::from_group(&[vec![0, 1], vec![1, 0]]);
    let disc = CategoryTable::discrete(3);
    let mut failures = 0;
    for n in 0..=3 {
        for table in [&z2, &disc] {
            if segal_check(table, n) != Ok(true) {
                failures += 1;
            }
        }
    }
    report.push(count_record("simplicial.segal", "Segal condition for group and discrete nerves", 8, failures));

    let id = "simplicial.nerve_identities";
    let seeds = SeedStream::new(seed, id);
    let r = sample_max(&seeds, samples, |rng| nerve_identity_residual(&group, rng));
    report.push(CheckRecord::from_residual(id, "simplicial identities and gamma on BG, EG levels <= 4", samples, r, tol.exact));
    report
}

pub fn liegroup_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let g = &group;

    let id = "liegroup.exp_membership";
    let n_exp = samples.max(200);
    let r = sample_max(&SeedStream::new(seed, id), n_exp, |rng| {
        let x = g.sample_algebra(rng);
        let a = mat_exp(&x);
        g.membership_residual(&a)
            .max(matrix::max_abs_diff(&(&a * mat_exp(&-x)), &g.identity()) * 1e-2)
    });
    report.push(CheckRecord::from_residual(id, "exp maps the algebra into the group", n_exp, r, MEMBERSHIP_TOL));

    let id = "liegroup.jacobi_and_ad";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (x, y, z) = (g.sample_algebra(rng), g.sample_algebra(rng), g.sample_algebra(rng));
        let jacobi = crate::liegroup::ad(&x, &crate::liegroup::ad(&y, &z))
            + crate::liegroup::ad(&y, &crate::liegroup::ad(&z, &x))
            + crate::liegroup::ad(&z, &crate::liegroup::ad(&x, &y));
        let s = g.sample_group(rng);
        let conj = Ad(&s, &x).unwrap_or_else(|_| CMat::from_element(g.n(), g.n(), Complex64::new(f64::NAN, 0.0)));
        matrix::max_abs(&jacobi).max(g.algebra_residual(&conj))
    });
    report.push(CheckRecord::from_residual(id, "Jacobi identity, Ad preserves the algebra", samples, r, tol.exact));

    let id = "liegroup.killing_properties";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (a, b, c) = (g.sample_algebra(rng), g.sample_algebra(rng), g.sample_algebra(rng));
        let sym = (g.killing_form(&a, &b) - g.killing_form(&b, &a)).abs();
        let inv = (g.killing_form(&a, &matrix::commutator(&b, &c))
            - g.killing_form(&c, &matrix::commutator(&a, &b)))
        .abs();
        let tr_inv = (matrix::trace(&(&a * matrix::commutator(&b, &c)))
            - matrix::trace(&(&c * matrix::commutator(&a, &b))))
        .norm();
        sym.max(inv).max(tr_inv)
    });
    report.push(CheckRecord::from_residual(id, "Killing form symmetric and invariant", samples, r, 1e-10));

    if g.killing_trace_factor().is_some_and(|k| k > 0.0) {
        let sv = g.killing_gram().singular_values().min();
        report.push(CheckRecord::from_residual(
            "liegroup.killing_nondegenerate",
            "smallest singular value of the Killing Gram matrix",
            1,
            1.0 / sv,
            1e6,
        ));
    }

    let id = "liegroup.maurer_cartan_relations";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let a = g.sample_group(rng);
        let x = g.sample_tangent(rng, &a);
        let (Ok(left), Ok(right)) = (g.maurer_cartan_left(&a, &x), g.maurer_cartan_right(&a, &x)) else {
            return f64::NAN;
        };
        let ad_rel = matrix::max_abs_diff(&right, &(&a * &left * matrix::inverse_or_nan(&a)));
        let inv = match g.inversion_pushforward(&a, &x) {
            Ok((ai, xi)) => g
                .maurer_cartan_left(&ai, &xi)
                .map(|l| matrix::max_abs_diff(&l, &-right.clone()))
                .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        };
        ad_rel.max(inv)
    });
    report.push(CheckRecord::from_residual(id, "omega^r = Ad omega^l, omega^l o inv = -omega^r", samples, r, tol.exact));
    report
}

/// Forms exercised by the alternation and multilinearity probes.
fn probe_forms(group: &Arc<MatrixGroup>) -> Vec<DifferentialForm> {
    let mut out = Vec::new();
    let eg1 = BaseSpace::groups(2, group.clone());
    let bar = omega_bar(&eg1, 1).expect("slot 1");
    out.push(bar.clone());
    out.push(bar.bracket_wedge(&bar).expect("algebra"));
    out.push(chi_closed_p1(1, group.clone()));
    out.push(chi_closed_p1(2, group.clone()));
    out.push(omega_hat(2, group.clone()).form);
    out.push(kappa(2, group.clone()).form);
    if let Ok(p) = phi2(group.clone(), DescentRoute::General) {
        out.push(p);
    }
    let s2 = BaseSpace::new(2, 1, group.clone());
    let dt = DifferentialForm::dt(s2.clone(), 1);
    let mc = DifferentialForm::maurer_cartan_left(s2, 0);
    out.push(dt.wedge(&mc).and_then(|f| f.wedge(&mc)).expect("same base"));
    out
}

fn random_args(form: &DifferentialForm, rng: &mut SampleRng) -> (Point, Vec<Tangent>) {
    let base = form.base();
    let p = random_point(base, rng);
    let args = (0..form.degree()).map(|_| random_tangent(base, &p, rng)).collect();
    (p, args)
}

pub fn forms_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let g = &group;

    let id = "forms.maurer_cartan_equation";
    let base = BaseSpace::groups(1, group.clone());
    let w = DifferentialForm::maurer_cartan_left(base, 0);
    let mc = w
        .exterior_derivative()
        .add(&w.bracket_wedge(&w).expect("algebra").scale(0.5))
        .expect("same base");
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (p, args) = random_args(&mc, rng);
        mc.value(&p, &args).norm()
    });
    report.push(CheckRecord::from_residual(id, "d omega + 1/2 [omega, omega] = 0", samples, r, MAURER_CARTAN_TOL));

    let id = "forms.alternating_multilinear";
    let forms = probe_forms(g);
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        max_residual(forms.iter().filter(|f| f.degree() >= 1).map(|f| {
            let (p, args) = random_args(f, rng);
            let value = f.value(&p, &args);
            let scale = value.norm().max(1e-3);
            let mut swap = 0.0;
            if f.degree() >= 2 {
                let i = rng.random_range(0..f.degree());
                let j = (i + 1 + rng.random_range(0..f.degree() - 1)) % f.degree();
                let mut swapped = args.clone();
                swapped.swap(i, j);
                swap = value.clone().add(f.value(&p, &swapped)).norm() / scale;
            }
            let slot = rng.random_range(0..f.degree());
            let other = random_tangent(f.base(), &p, rng);
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut combo = args.clone();
            combo[slot] = args[slot].scaled(a).plus(&other.scaled(b));
            let mut with_other = args.clone();
            with_other[slot] = other;
            let expected = value
                .scale(Complex64::new(a, 0.0))
                .add(f.value(&p, &with_other).scale(Complex64::new(b, 0.0)));
            let linear = f.value(&p, &combo).max_abs_diff(&expected) / scale.max(expected.norm());
            swap.max(linear)
        }))
    });
    report.push(CheckRecord::from_residual(id, "alternation and multilinearity probes", samples, r, MULTILINEAR_TOL));

    let id = "forms.pullback_checks";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        // s₀*ω̄₁ = 0 on EG₀, and γ₁*ω^l against a finite-difference curve
        let eg0 = BaseSpace::groups(1, group.clone());
        let eg1 = BaseSpace::groups(2, group.clone());
        let bar = omega_bar(&eg1, 1).expect("slot 1");
        let pulled = bar
            .pullback(&ProductMap::slots(SlotMap::EgDegeneracy(0)), &eg0)
            .expect("degeneracy");
        let p0 = random_point(&eg0, rng);
        let v0 = random_tangent(&eg0, &p0, rng);
        let degenerate = pulled.value(&p0, &[v0]).norm();

        let bg1 = BaseSpace::groups(1, group.clone());
        let w = DifferentialForm::maurer_cartan_left(bg1, 0);
        let gamma_w = w.pullback(&ProductMap::slots(SlotMap::Gamma), &eg1).expect("gamma");
        let p = random_point(&eg1, rng);
        let xi: Vec<CMat> = (0..2).map(|_| g.sample_algebra(rng)).collect();
        let v = Tangent::slots(0, p.g.iter().zip(&xi).map(|(a, y)| a * y).collect());
        let h = 1e-5;
        let curve = |s: f64| -> CMat {
            let moved: Vec<CMat> = p
                .g
                .iter()
                .zip(&xi)
                .map(|(a, y)| a * mat_exp(&(y * Complex64::new(s, 0.0))))
                .collect();
            &moved[1] * matrix::inverse_or_nan(&moved[0])
        };
        let velocity = (curve(h) - curve(-h)) * Complex64::new(0.5 / h, 0.0);
        let base_pt = curve(0.0);
        let expected = matrix::inverse_or_nan(&base_pt) * velocity;
        let got = gamma_w.value(&p, &[v]);
        degenerate.max(matrix::max_abs_diff(got.matrix().expect("algebra"), &expected) * 1e-3)
    });
    report.push(CheckRecord::from_residual(id, "s_0^* omega_bar_1 = 0, gamma_1 pushforward", samples, r, 1e-10));

    let id = "forms.quadrature_constants";
    let r1 = SimplexQuadrature::new(1, DEFAULT_QUADRATURE_DEGREE).integrate(|t| t[0] * t[0] - t[0]);
    let s2 = BaseSpace::new(2, 0, group.clone());
    let area = DifferentialForm::dt(s2.clone(), 1)
        .wedge(&DifferentialForm::dt(s2, 2))
        .expect("same base")
        .integrate_fiber()
        .value(&Point::groups(vec![]), &[]);
    let resid = (r1 + 1.0 / 6.0).abs().max(area.max_abs_diff(&FormValue::Scalar(Complex64::new(0.5, 0.0))));
    report.push(CheckRecord::from_residual(id, "int (t^2 - t) = -1/6, int dt1 dt2 = 1/2", 2, resid, tol.exact));

    let id = "forms.stokes_boundary";
    let n_stokes = 20;
    let r = sample_max(&SeedStream::new(seed, id), n_stokes, |rng| {
        let phi = random_polynomial_one_form(2, 3, rng);
        boundary_stokes_check(&phi.to_form(group.clone()), Some(&phi.exterior_derivative(group.clone())))
            .unwrap_or(f64::NAN)
    });
    report.push(CheckRecord::from_residual(id, "int dphi = sum (-1)^i int tau_i^* phi", n_stokes, r, STOKES_TOL));

    let id = "forms.lift_independence";
    let kappa2 = kappa(2, group.clone()).form;
    let integrand = kappa2.wedge(&kappa2).expect("same base").trace_of_product().expect("rank 2");
    let rule = SimplexQuadrature::new(2, DEFAULT_QUADRATURE_DEGREE);
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let eg2 = BaseSpace::groups(3, group.clone());
        let p = random_point(&eg2, rng);
        let u: Vec<Tangent> = (0..2).map(|_| random_tangent(&eg2, &p, rng)).collect();
        let shifts: Vec<Vec<f64>> = (0..2).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let full = BaseSpace::simplex_eg(2, group.clone());
        let integrate = |shift: bool| -> Complex64 {
            let mut total = Complex64::new(0.0, 0.0);
            for (t, wgt) in rule.nodes.iter().zip(&rule.weights) {
                let q = Point::new(t.clone(), p.g.clone());
                let mut args = vec![Tangent::coordinate(&full, 1), Tangent::coordinate(&full, 2)];
                for (k, uk) in u.iter().enumerate() {
                    let v = if shift { shifts[k].clone() } else { vec![0.0, 0.0] };
                    args.push(Tangent::new(v, uk.x.clone()));
                }
                total += integrand.value(&q, &args).scalar().expect("scalar") * *wgt;
            }
            total
        };
        let (a, b) = (integrate(false), integrate(true));
        relative((a - b).norm(), a.norm())
    });
    report.push(CheckRecord::from_residual(id, "fibre integral independent of the lift", samples, r, LIFT_TOL));

    let id = "forms.d_squared";
    let w = DifferentialForm::maurer_cartan_left(BaseSpace::groups(1, group.clone()), 0);
    let ddw = w.exterior_derivative().exterior_derivative();
    let n_dd = samples.min(20);
    let r = sample_max(&SeedStream::new(seed, id), n_dd, |rng| {
        let (p, args) = random_args(&ddw, rng);
        ddw.value(&p, &args).norm()
    });
    report.push(CheckRecord::from_residual(id, "d d omega = 0", n_dd, r, DD_TOL));
    report
}

/// Random `Σ pᵢ dtᵢ` on `Δⁿ` with coefficients of degree `≤ degree`.
pub fn random_polynomial_one_form(n: usize, degree: u32, rng: &mut SampleRng) -> PolynomialOneForm {
    let exponents: Vec<Vec<u32>> = (0..n)
        .map(|_| 0..=degree)
        .multi_cartesian_product()
        .filter(|e| e.iter().sum::<u32>() <= degree)
        .collect();
    PolynomialOneForm {
        components: (0..n)
            .map(|_| Polynomial {
                terms: exponents
                    .iter()
                    .map(|e| (e.clone(), rng.random_range(-1.0..1.0)))
                    .collect(),
            })
            .collect(),
    }
}


pub fn invariants_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let g = &group;
    let p = p1();
    let c2 = chern(2);

    let id = "invariants.polarization";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (a, b) = (g.sample_algebra(rng), g.sample_algebra(rng));
        let polar = p.evaluate(&[a.clone(), b.clone()]).expect("degree 2");
        let closed = p1_closed_complex(&a, &b);
        let sym = (polar - p.evaluate(&[b.clone(), a.clone()]).expect("degree 2")).norm();
        let diag = (p.diagonal(&a) - crate::invariants::charpoly_coefficient(&a, 2, crate::invariants::pontryagin_scale())).norm();
        (polar - closed).norm().max(sym).max(diag).max(closed.im.abs())
    });
    report.push(CheckRecord::from_residual(id, "polarized p1 = closed p1, symmetric, real", samples, r, 1e-10));

    let id = "invariants.chern_vs_pontryagin";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (a, b) = (g.sample_algebra(rng), g.sample_algebra(rng));
        let bilinear = (c2.evaluate(&[a.clone(), b.clone()]).expect("degree 2")
            + p.evaluate(&[a.clone(), b]).expect("degree 2"))
        .norm();
        chern_vs_pontryagin_check(&a, 1).max(bilinear)
    });
    report.push(CheckRecord::from_residual(id, "c2 = -p1", samples, r, 1e-10));

    let id = "invariants.ad_invariance";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let s = g.sample_group(rng);
        let args = [g.sample_algebra(rng), g.sample_algebra(rng)];
        let a = p.ad_invariance_residual(&s, &args).unwrap_or(f64::NAN);
        let b = c2.ad_invariance_residual(&s, &args).unwrap_or(f64::NAN);
        a.max(b)
    });
    report.push(CheckRecord::from_residual(id, "p1 and c2 are Ad-invariant", samples, r, AD_INVARIANCE_TOL));

    let id = "invariants.trace_cyclic";
    let r = sample_max(&SeedStream::new(seed, id), samples, |rng| {
        let (a, b) = (g.sample_algebra(rng), g.sample_group(rng));
        (matrix::trace(&(&a * &b)) - matrix::trace(&(&b * &a))).norm()
    });
    report.push(CheckRecord::from_residual(id, "tr(AB) = tr(BA)", samples, r, tol.exact));
    report
}

pub fn symplectic_suite(group: Arc<MatrixGroup>, kind: PairingKind, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    if group.killing_trace_factor().is_some_and(|k| k > 0.0) {
        match symplectic::killing_lemma_check(&group, samples, seed) {
            Ok(r) => report.extend(r),
            Err(e) => report.push(CheckRecord::error("symplectic.killing_lemma", "Killing lemma", e.to_string())),
        }
    }
    let pairing = match QuadraticPairing::new(kind, group.clone()) {
        Ok(p) => p,
        Err(e) => {
            report.push(CheckRecord::error("symplectic.pairing", "pairing", e.to_string()));
            return report;
        }
    };
    report.extend(symplectic::pairing_suite(&pairing, samples, seed, tol));
    match symplectic::final_theorem_check(&pairing, samples, seed, tol) {
        Ok(r) => report.extend(r),
        Err(symplectic::SymplecticError::Unsupported(name)) => report.push(
            CheckRecord::from_residual("symplectic.theorem", "coefficient identity", 0, 0.0, tol.closed_form)
                .with_warning(format!("no coefficient identity is known for {name}; skipped")),
        ),
        Err(e) => report.push(CheckRecord::error("symplectic.theorem", "coefficient identity", e.to_string())),
    }
    if matches!(kind, PairingKind::ScaledKilling(_)) && group.family().is_orthogonal() {
        if let Ok(r) = symplectic::final_theorem_check_with(&pairing, samples, seed, tol, CoefficientSource::FromKillingFactor) {
            report.extend(r);
        }
    }
    report
}

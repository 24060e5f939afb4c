//! The simplicial connection on `EG → BG`, its curvature, the cocycle
//! `χ(f)` of an invariant polynomial, and the descended cocycle on `BG`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::forms::{
    random_point, random_tangent, BaseSpace, DifferentialForm, FormError, FormValue, Point,
    ProductMap, SimplexMap, SlotMap, Tangent, TotElement, ValueType,
};
use crate::invariants::{p1, InvariantPolynomial};
use crate::liegroup::MatrixGroup;
use crate::matrix::{self, CMat};
use crate::report::{relative, CheckRecord, Tolerances, VerificationReport};
use crate::sampling::{sample_max, SampleRng, SeedStream};
use crate::simplicial::NerveKind;

/// Tolerance for `sᵢ*χₙ = 0`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Tolerance for `|χₙ|`, `n > 2`, from quadrature.
pub const VANISHING_TOL: f64 = 1e-8;
/// Tolerance for `γ*Φ = χ` at lifted tangents.
pub const DESCENT_TOL: f64 = 1e-8;
/// Tolerance for the connection axioms and gluing.
pub const CONNECTION_TOL: f64 = 1e-10;

/// `ωⱼ`: the left Maurer–Cartan form of slot `j`, pulled back along the slot projection.
pub fn omega(base: &BaseSpace, j: usize) -> Result<DifferentialForm, FormError> {
    let single = BaseSpace::groups(1, base.group.clone());
    DifferentialForm::maurer_cartan_left(single, 0).pullback(
        &ProductMap::new(SimplexMap::Drop, SlotMap::Select(vec![j])),
        base,
    )
}

/// `ω̄ⱼ = ωⱼ − ω₀`.
pub fn omega_bar(base: &BaseSpace, j: usize) -> Result<DifferentialForm, FormError> {
    omega(base, j)?.sub(&omega(base, 0)?)
}

/// `ω̂ₙ = Σⱼ tⱼωⱼ` on `Δⁿ × EGₙ`.
#[derive(Debug, Clone)]
pub struct ShulmanConnection {
    pub level: usize,
    pub form: DifferentialForm,
}

/// `κₙ` on `Δⁿ × EGₙ`.
#[derive(Debug, Clone)]
pub struct ShulmanCurvature {
    pub level: usize,
    pub form: DifferentialForm,
}

pub fn omega_hat(n: usize, group: Arc<MatrixGroup>) -> ShulmanConnection {
    let base = BaseSpace::simplex_eg(n, group);
    let terms: Vec<DifferentialForm> = (0..=n)
        .map(|j| {
            omega(&base, j)
                .expect("slot within EG_n")
                .times_function(move |p| p.barycentric(j))
        })
        .collect();
    let form = DifferentialForm::sum(&terms)
        .expect("same base and type")
        .expect("n + 1 terms");
    ShulmanConnection { level: n, form }
}

/// `κₙ = Σ dtⱼ∧ω̄ⱼ + ½Σ(tⱼ² − tⱼ)[ω̄ⱼ∧ω̄ⱼ] + Σ_{i<j} tᵢtⱼ[ω̄ᵢ∧ω̄ⱼ]`, evaluated
/// directly from the values `ω̄ⱼ(v)`, `ω̄ⱼ(w)`.
pub fn kappa(n: usize, group: Arc<MatrixGroup>) -> ShulmanCurvature {
    let base = BaseSpace::simplex_eg(n, group);
    let form = DifferentialForm::new(base, 2, ValueType::Algebra, move |p, args| {
        let inv: Vec<CMat> = p.g.iter().map(matrix::inverse_or_nan).collect();
        let bars = |t: &Tangent| -> Vec<CMat> {
            let base0 = &inv[0] * &t.x[0];
            (1..=n).map(|j| &inv[j] * &t.x[j] - &base0).collect()
        };
        let (v, w) = (&args[0], &args[1]);
        let (bv, bw) = (bars(v), bars(w));
        let size = p.g[0].nrows();
        let mut out = matrix::zeros(size);
        for j in 0..n {
            out += &bw[j] * Complex64::new(v.v[j], 0.0) - &bv[j] * Complex64::new(w.v[j], 0.0);
            let t = p.t[j];
            out += matrix::commutator(&bv[j], &bw[j]) * Complex64::new(t * t - t, 0.0);
            for i in 0..j {
                let c = Complex64::new(p.t[i] * t, 0.0);
                out += (matrix::commutator(&bv[i], &bw[j]) - matrix::commutator(&bw[i], &bv[j])) * c;
            }
        }
        FormValue::Matrix(out)
    });
    ShulmanCurvature { level: n, form }
}

/// The same closed formula assembled from form combinators.
pub fn kappa_from_wedges(n: usize, group: Arc<MatrixGroup>) -> Result<DifferentialForm, FormError> {
    let base = BaseSpace::simplex_eg(n, group);
    let bars: Vec<DifferentialForm> = (1..=n)
        .map(|j| omega_bar(&base, j))
        .collect::<Result<_, _>>()?;
    let mut terms = Vec::new();
    for (idx, bar) in bars.iter().enumerate() {
        let j = idx + 1;
        terms.push(DifferentialForm::dt(base.clone(), j).wedge(bar)?);
        terms.push(
            bar.bracket_wedge(bar)?
                .times_function(move |p| 0.5 * (p.t[j - 1] * p.t[j - 1] - p.t[j - 1])),
        );
        for (idx_i, bar_i) in bars.iter().enumerate().take(idx) {
            terms.push(
                bar_i
                    .bracket_wedge(bar)?
                    .times_function(move |p| p.t[idx_i] * p.t[idx]),
            );
        }
    }
    Ok(DifferentialForm::sum(&terms)?
        .unwrap_or_else(|| DifferentialForm::zero(base, 2, ValueType::Algebra)))
}

/// `dω̂ + ½[ω̂∧ω̂]`, with the numerical derivative.
pub fn curvature_from_definition(conn: &ShulmanConnection) -> DifferentialForm {
    let half_bracket = conn
        .form
        .bracket_wedge(&conn.form)
        .expect("algebra-valued")
        .scale(0.5);
    conn.form
        .exterior_derivative()
        .add(&half_bracket)
        .expect("same base and type")
}

/// `χₙ(f) = ∫_{Δⁿ} f ∘ ⋀ᵏ κₙ`, a form of degree `2k − n` on `EGₙ`.
pub fn chi(f: &InvariantPolynomial, n: usize, group: Arc<MatrixGroup>) -> DifferentialForm {
    let k = f.degree();
    let curvature = kappa(n, group).form;
    let mut power = curvature.clone();
    for _ in 1..k {
        power = power.wedge(&curvature).expect("same base");
    }
    let mult = f.multilinear();
    power
        .apply_multilinear(k, move |factors| mult(factors))
        .expect("rank k tensor")
        // κ has t-degree 2, so f(κᵏ) is a polynomial of t-degree 2k
        .integrate_fiber_with(2 * k)
}

/// Closed forms of `χₙ(p₁)`: `(1/24π²)·tr(ω̄₁·ω̄₁·ω̄₁)` for `n = 1`,
/// `(1/8π²)(tr(ω̄₁·ω̄₂) − tr ω̄₁·tr ω̄₂)` for `n = 2`, zero otherwise.
pub fn chi_closed_p1(n: usize, group: Arc<MatrixGroup>) -> DifferentialForm {
    let base = BaseSpace::groups(n + 1, group);
    match n {
        1 => {
            let b = omega_bar(&base, 1).expect("slot 1 exists");
            b.wedge(&b)
                .and_then(|bb| bb.wedge(&b))
                .and_then(|bbb| bbb.trace_of_product())
                .expect("algebra-valued")
                .scale(1.0 / (24.0 * PI * PI))
        }
        2 => {
            let b1 = omega_bar(&base, 1).expect("slot 1 exists");
            let b2 = omega_bar(&base, 2).expect("slot 2 exists");
            trace_pairing_form(&b1, &b2, true).scale(1.0 / (8.0 * PI * PI))
        }
        _ => DifferentialForm::zero(base, 4usize.saturating_sub(n), ValueType::Complex),
    }
}

fn trace_form(alpha: &DifferentialForm) -> DifferentialForm {
    alpha
        .map_algebra(ValueType::Complex, |m| FormValue::Scalar(matrix::trace(m)))
        .expect("algebra-valued")
}

/// `tr(α·β)`, minus `tr α·tr β` when `with_traces` is set.
fn trace_pairing_form(alpha: &DifferentialForm, beta: &DifferentialForm, with_traces: bool) -> DifferentialForm {
    let main = alpha
        .wedge(beta)
        .and_then(|ab| ab.trace_of_product())
        .expect("algebra-valued");
    if !with_traces {
        return main;
    }
    let traces = trace_form(alpha).wedge(&trace_form(beta)).expect("same base");
    main.sub(&traces).expect("same base and type")
}

/// Which ingredients build `χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiSource {
    Quadrature,
    ClosedForm,
}

/// `(χ₀, …, χ_{2k})` as an element of the total complex of `EG`.
pub fn chi_element(f: &InvariantPolynomial, group: Arc<MatrixGroup>, source: ChiSource) -> TotElement {
    let top = 2 * f.degree();
    let components = (0..=top)
        .map(|n| match source {
            ChiSource::Quadrature => Some(chi(f, n, group.clone())),
            ChiSource::ClosedForm if (n == 1 || n == 2) && top == 4 => {
                Some(chi_closed_p1(n, group.clone()))
            }
            ChiSource::ClosedForm => None,
        })
        .collect();
    TotElement::new(NerveKind::Total, group, top, ValueType::Complex, components)
        .expect("degrees match by construction")
}

/// How `Φ₂` is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentRoute {
    /// `tr(d₂*ω^r·d₀*ω^l) − tr(d₂*ω^r)·tr(d₀*ω^l)`; the trace product is
    /// dropped for traceless families.
    Unitary,
    /// `tr(d₂*(ω^l∘inv))·tr(d₀*ω^l) − tr(d₂*(ω^l∘inv)·d₀*ω^l)`.
    General,
}

/// `Φ₁ = (1/24π²)·tr(ω^l·ω^l·ω^l)` on `BG₁ = G`.
pub fn phi1(group: Arc<MatrixGroup>) -> DifferentialForm {
    let base = BaseSpace::groups(1, group);
    let w = DifferentialForm::maurer_cartan_left(base, 0);
    w.wedge(&w)
        .and_then(|ww| ww.wedge(&w))
        .and_then(|www| www.trace_of_product())
        .expect("algebra-valued")
        .scale(1.0 / (24.0 * PI * PI))
}

/// `Φ₂` on `BG₂ = G²`.
pub fn phi2(group: Arc<MatrixGroup>, route: DescentRoute) -> Result<DifferentialForm, FormError> {
    let bg1 = BaseSpace::groups(1, group.clone());
    let bg2 = BaseSpace::groups(2, group.clone());
    let d0 = ProductMap::slots(SlotMap::BgFace(0));
    let d2 = ProductMap::slots(SlotMap::BgFace(2));
    let left = DifferentialForm::maurer_cartan_left(bg1.clone(), 0);
    let d0_left = left.pullback(&d0, &bg2)?;
    let scale = 1.0 / (8.0 * PI * PI);
    Ok(match route {
        DescentRoute::Unitary => {
            let right = DifferentialForm::maurer_cartan_right(bg1, 0);
            let d2_right = right.pullback(&d2, &bg2)?;
            let with_traces = !group.family().is_traceless();
            trace_pairing_form(&d2_right, &d0_left, with_traces).scale(scale)
        }
        DescentRoute::General => {
            let left_inv = left.pullback(&ProductMap::slots(SlotMap::Inversion), &bg1)?;
            let d2_left_inv = left_inv.pullback(&d2, &bg2)?;
            let traces = trace_form(&d2_left_inv).wedge(&trace_form(&d0_left))?;
            let main = trace_pairing_form(&d2_left_inv, &d0_left, false);
            traces.sub(&main)?.scale(scale)
        }
    })
}

/// `Φ = (0, Φ₁, Φ₂, 0, 0)` on `BG`.
pub fn descend_p1(group: Arc<MatrixGroup>, route: DescentRoute) -> Result<TotElement, FormError> {
    let components = vec![
        None,
        Some(phi1(group.clone())),
        Some(phi2(group.clone(), route)?),
        None,
        None,
    ];
    TotElement::new(NerveKind::Base, group, 4, ValueType::Complex, components)
}

/// Lift of a point of `BGₙ` to `EGₙ` starting at `h`: `(h, g₁h, g₂g₁h, …)`.
pub fn lift_point(bg: &[CMat], h: &CMat) -> Vec<CMat> {
    let mut out = vec![h.clone()];
    for g in bg {
        let next = g * out.last().expect("nonempty");
        out.push(next);
    }
    out
}

/// Preimage under `γ_*` at `lift_point(bg, h)` of the tangent `x`, with free
/// first component `x0` (tangent at `h`).
pub fn lift_tangent(bg: &[CMat], eg: &[CMat], x: &[CMat], x0: &CMat) -> Vec<CMat> {
    let mut out = vec![x0.clone()];
    for k in 1..eg.len() {
        let next = &x[k - 1] * &eg[k - 1] + &bg[k - 1] * &out[k - 1];
        out.push(next);
    }
    out
}

fn scalar_diff(a: &FormValue, b: &FormValue) -> (f64, f64) {
    (a.max_abs_diff(b), b.norm())
}

fn eg_sample(group: &Arc<MatrixGroup>, simplex_dim: usize, n: usize, rng: &mut SampleRng, args: usize) -> (BaseSpace, Point, Vec<Tangent>) {
    let base = BaseSpace::new(simplex_dim, n + 1, group.clone());
    let p = random_point(&base, rng);
    let tangents = (0..args).map(|_| random_tangent(&base, &p, rng)).collect();
    (base, p, tangents)
}

/// The four points of the cocycle theorem for `p₁`: vanishing above the
/// diagonal, the cocycle equation at levels 2 and 3, normalization, and `χ₀ = 0`.
pub fn shulman_theorem_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let f = p1();
    let element = chi_element(&f, group.clone(), ChiSource::Quadrature);
    let eg = |n: usize| BaseSpace::groups(n + 1, group.clone());

    // (1) χ₃, χ₄ vanish
    for n in [3usize, 4] {
        let id = format!("shulman.chi{n}_vanishes");
        let seeds = SeedStream::new(seed, &id);
        let form = element.component(n).expect("n <= 4");
        let r = sample_max(&seeds, samples, |rng| {
            let base = eg(n);
            let p = random_point(&base, rng);
            let args: Vec<Tangent> = (0..form.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
            form.value(&p, &args).norm()
        });
        report.push(CheckRecord::from_residual(id, "chi_n vanishes above the diagonal", samples, r, VANISHING_TOL));
    }

    // (2) cocycle δχ_{n−1} + (−1)ⁿ dχₙ = 0
    for level in [2usize, 3] {
        let id = format!("shulman.cocycle_level{level}");
        let seeds = SeedStream::new(seed, &id);
        let record = match element.tot_differential(level) {
            Ok(form) => {
                let r = sample_max(&seeds, samples, |rng| {
                    let base = eg(level);
                    let p = random_point(&base, rng);
                    let args: Vec<Tangent> = (0..form.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
                    form.value(&p, &args).norm()
                });
                CheckRecord::from_residual(id, "delta chi_{n-1} + (-1)^n d chi_n = 0", samples, r, tol.finite_diff)
            }
            Err(e) => CheckRecord::error(id, "cocycle", e.to_string()),
        };
        report.push(record);
    }

    // (3) sᵢ*χₙ = 0
    {
        let id = "shulman.normalization".to_string();
        let seeds = SeedStream::new(seed, &id);
        let mut pulled = Vec::new();
        for n in 1..=4 {
            for i in 0..n {
                pulled.push((n, element.degeneracy_pullback(n, i).expect("valid degeneracy")));
            }
        }
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual(pulled.iter().map(|(n, form)| {
                let base = eg(n - 1);
                let p = random_point(&base, rng);
                let args: Vec<Tangent> = (0..form.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
                form.value(&p, &args).norm()
            }))
        });
        report.push(CheckRecord::from_residual(id, "s_i^* chi_n = 0", samples, r, NORMALIZATION_TOL));
    }

    // (4) χ₀ = 0
    {
        let id = "shulman.chi0_zero".to_string();
        let seeds = SeedStream::new(seed, &id);
        let form = element.component(0).expect("level 0");
        let r = sample_max(&seeds, samples, |rng| {
            let base = eg(0);
            let p = random_point(&base, rng);
            let args: Vec<Tangent> = (0..form.degree()).map(|_| random_tangent(&base, &p, rng)).collect();
            form.value(&p, &args).norm()
        });
        report.push(CheckRecord::from_residual(id, "chi_0 = 0", samples, r, tol.exact));
    }
    report
}

/// Connection axioms, gluing, curvature formula and the closed forms of `χ`.
pub fn connection_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();

    {
        let id = "shulman.connection_vertical".to_string();
        let seeds = SeedStream::new(seed, &id);
        let conns: Vec<ShulmanConnection> = (0..=3).map(|n| omega_hat(n, group.clone())).collect();
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual(conns.iter().map(|c| {
                let (_, p, _) = eg_sample(&group, c.level, c.level, rng, 0);
                let y = group.sample_algebra(rng);
                let v = Tangent::slots(c.level, p.g.iter().map(|g| g * &y).collect());
                let out = c.form.value(&p, &[v]);
                matrix::max_abs_diff(out.matrix().expect("algebra"), &y)
            }))
        });
        report.push(CheckRecord::from_residual(id, "omega_hat(vertical Y) = Y", samples, r, CONNECTION_TOL));
    }

    {
        let id = "shulman.connection_equivariant".to_string();
        let seeds = SeedStream::new(seed, &id);
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual((0..=3).map(|n| {
                let c = omega_hat(n, group.clone());
                let (base, p, args) = eg_sample(&group, n, n, rng, 1);
                let g = group.sample_group(rng);
                let translated = c
                    .form
                    .pullback(&ProductMap::slots(SlotMap::RightTranslate(g.clone())), &base)
                    .expect("same base");
                let moved = translated.value(&p, &args);
                let conj = &g * moved.matrix().expect("algebra") * matrix::inverse_or_nan(&g);
                matrix::max_abs_diff(&conj, c.form.value(&p, &args).matrix().expect("algebra"))
            }))
        });
        report.push(CheckRecord::from_residual(id, "Ad_g R_g^* omega_hat = omega_hat", samples, r, CONNECTION_TOL));
    }

    {
        let id = "shulman.connection_gluing".to_string();
        let seeds = SeedStream::new(seed, &id);
        let mut pairs = Vec::new();
        for n in 1..=3 {
            let hi = omega_hat(n, group.clone()).form;
            let lo = omega_hat(n - 1, group.clone()).form;
            for j in 0..=n {
                // (τⱼ × id)*ω̂ₙ = (id × dⱼ)*ω̂ₙ₋₁ on Δⁿ⁻¹ × EGₙ
                let dom = BaseSpace::new(n - 1, n + 1, group.clone());
                let a = hi.pullback(&ProductMap::simplex(SimplexMap::Face(j)), &dom).expect("face");
                let b = lo.pullback(&ProductMap::slots(SlotMap::EgFace(j)), &dom).expect("face");
                pairs.push((dom, a, b));
            }
            for j in 0..n {
                // (ηⱼ × id)*ω̂ₙ₋₁ = (id × sⱼ)*ω̂ₙ on Δⁿ × EGₙ₋₁
                let dom = BaseSpace::new(n, n, group.clone());
                let a = lo.pullback(&ProductMap::simplex(SimplexMap::Degeneracy(j)), &dom).expect("degeneracy");
                let b = hi.pullback(&ProductMap::slots(SlotMap::EgDegeneracy(j)), &dom).expect("degeneracy");
                pairs.push((dom, a, b));
            }
        }
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual(pairs.iter().map(|(dom, a, b)| {
                let p = random_point(dom, rng);
                let v = [random_tangent(dom, &p, rng)];
                let (d, _) = scalar_diff(&a.value(&p, &v), &b.value(&p, &v));
                d
            }))
        });
        report.push(CheckRecord::from_residual(id, "face and degeneracy gluing of omega_hat", samples, r, CONNECTION_TOL));
    }

    {
        let id = "shulman.curvature_formula".to_string();
        let seeds = SeedStream::new(seed, &id);
        let forms: Vec<(usize, DifferentialForm, DifferentialForm)> = (1..=2)
            .map(|n| (n, kappa(n, group.clone()).form, curvature_from_definition(&omega_hat(n, group.clone()))))
            .collect();
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual(forms.iter().map(|(n, closed, def)| {
                let (_, p, args) = eg_sample(&group, *n, *n, rng, 2);
                closed.value(&p, &args).max_abs_diff(&def.value(&p, &args))
            }))
        });
        report.push(CheckRecord::from_residual(id, "kappa closed formula = d omega_hat + 1/2 [omega_hat, omega_hat]", samples, r, tol.finite_diff));
    }

    {
        let id = "shulman.chi_closed_forms".to_string();
        let seeds = SeedStream::new(seed, &id);
        let f = p1();
        let forms: Vec<(usize, DifferentialForm, DifferentialForm)> = (1..=2)
            .map(|n| (n, chi(&f, n, group.clone()), chi_closed_p1(n, group.clone())))
            .collect();
        let r = sample_max(&seeds, samples, |rng| {
            crate::report::max_residual(forms.iter().map(|(n, quad, closed)| {
                let (_, p, args) = eg_sample(&group, 0, *n, rng, quad.degree());
                let (d, scale) = scalar_diff(&quad.value(&p, &args), &closed.value(&p, &args));
                relative(d, scale)
            }))
        });
        report.push(CheckRecord::from_residual(id, "quadrature chi_1, chi_2 = closed forms", samples, r, tol.closed_form));
    }
    report
}

/// `γ*Φ = χ` at two lift choices, and agreement of the two routes to `Φ₂`.
pub fn descent_suite(group: Arc<MatrixGroup>, samples: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let mut report = VerificationReport::new();
    let f = p1();
    let chis = [chi(&f, 1, group.clone()), chi(&f, 2, group.clone())];
    let phis = match phi2(group.clone(), DescentRoute::Unitary) {
        Ok(p2) => [phi1(group.clone()), p2],
        Err(e) => {
            report.push(CheckRecord::error("shulman.descent_lifts", "descent", e.to_string()));
            return report;
        }
    };

    let id = "shulman.descent_lifts".to_string();
    let seeds = SeedStream::new(seed, &id);
    let r = sample_max(&seeds, samples, |rng| {
        crate::report::max_residual((1..=2).flat_map(|n| {
            let bg_base = BaseSpace::groups(n, group.clone());
            let p = random_point(&bg_base, rng);
            let degree = phis[n - 1].degree();
            let args: Vec<Tangent> = (0..degree).map(|_| random_tangent(&bg_base, &p, rng)).collect();
            let target = phis[n - 1].value(&p, &args);
            // the lift through (A⁻¹, I, B…) with X₀ = −A⁻¹XA⁻¹, and a random one
            let fixed_h = if n == 1 { group.identity() } else { matrix::inverse_or_nan(&p.g[0]) };
            let random_h = group.sample_group(rng);
            let random_xi: Vec<CMat> = (0..degree).map(|_| group.sample_algebra(rng)).collect();
            [(fixed_h, None), (random_h, Some(random_xi))]
                .into_iter()
                .map(|(h, xi)| {
                    let eg_point = lift_point(&p.g, &h);
                    let lifted: Vec<Tangent> = args
                        .iter()
                        .enumerate()
                        .map(|(a, t)| {
                            let x0 = match &xi {
                                Some(xi) => &h * &xi[a],
                                None if n == 1 => matrix::zeros(group.n()),
                                None => {
                                    let inv = &h;
                                    -(inv * &t.x[0] * inv)
                                }
                            };
                            Tangent::slots(0, lift_tangent(&p.g, &eg_point, &t.x, &x0))
                        })
                        .collect();
                    let value = chis[n - 1].value(&Point::groups(eg_point), &lifted);
                    let (d, scale) = scalar_diff(&value, &target);
                    relative(d, scale)
                })
                .collect::<Vec<_>>()
        }))
    });
    report.push(CheckRecord::from_residual(id, "gamma^* Phi = chi for two lifts", samples, r, DESCENT_TOL));

    let id = "shulman.descent_routes".to_string();
    let seeds = SeedStream::new(seed, &id);
    let general = phi2(group.clone(), DescentRoute::General).expect("built above");
    let r = sample_max(&seeds, samples, |rng| {
        let base = BaseSpace::groups(2, group.clone());
        let p = random_point(&base, rng);
        let args = [random_tangent(&base, &p, rng), random_tangent(&base, &p, rng)];
        let (d, scale) = scalar_diff(&general.value(&p, &args), &phis[1].value(&p, &args));
        relative(d, scale)
    });
    report.push(CheckRecord::from_residual(id, "general and unitary Phi_2 agree", samples, r, tol.closed_form.min(1e-10)));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(spec: &str) -> Arc<MatrixGroup> {
        Arc::new(MatrixGroup::parse(spec).unwrap())
    }

    #[test]
    fn omega_bar_by_hand() {
        let g = group("su:2");
        let base = BaseSpace::groups(2, g.clone());
        let mut rng = SeedStream::new(1, "bar").rng(0);
        let p = random_point(&base, &mut rng);
        let v = random_tangent(&base, &p, &mut rng);
        let got = omega_bar(&base, 1).unwrap().value(&p, std::slice::from_ref(&v));
        let expected = matrix::inverse(&p.g[1]).unwrap() * &v.x[1] - matrix::inverse(&p.g[0]).unwrap() * &v.x[0];
        assert!(matrix::max_abs_diff(got.matrix().unwrap(), &expected) < 1e-14);
        assert_eq!(omega_bar(&base, 0).unwrap().value(&p, &[v]).norm(), 0.0);
    }

    #[test]
    fn kappa_matches_wedge_assembly() {
        let g = group("su:3");
        let seeds = SeedStream::new(2, "kappa");
        for n in 1..=3 {
            let direct = kappa(n, g.clone()).form;
            let built = kappa_from_wedges(n, g.clone()).unwrap();
            let (_, p, args) = eg_sample(&g, n, n, &mut seeds.rng(n as u64), 2);
            assert!(direct.value(&p, &args).max_abs_diff(&built.value(&p, &args)) < 1e-13);
        }
    }

    #[test]
    fn kappa_vanishes_on_simplex_only_pairs_at_level_one() {
        let g = group("su:2");
        let k = kappa(1, g.clone()).form;
        let mut rng = SeedStream::new(3, "k1").rng(0);
        let (base, p, _) = eg_sample(&g, 1, 1, &mut rng, 0);
        let e = Tangent::coordinate(&base, 1);
        assert_eq!(k.value(&p, &[e.clone(), e.scaled(2.0)]).norm(), 0.0);
    }

    #[test]
    fn kappa_vanishes_on_vertical_pairs() {
        let g = group("so:3");
        let k = kappa(2, g.clone()).form;
        let mut rng = SeedStream::new(4, "kv").rng(0);
        let (_, p, _) = eg_sample(&g, 2, 2, &mut rng, 0);
        let vert = |y: &CMat| Tangent::slots(2, p.g.iter().map(|a| a * y).collect());
        let (y1, y2) = (g.sample_algebra(&mut rng), g.sample_algebra(&mut rng));
        assert!(k.value(&p, &[vert(&y1), vert(&y2)]).norm() < 1e-14);
    }

    #[test]
    fn chi_zero_and_vanishing_levels() {
        let g = group("su:2");
        let f = p1();
        let c0 = chi(&f, 0, g.clone());
        assert_eq!(c0.degree(), 4);
        let mut rng = SeedStream::new(5, "c0").rng(0);
        let (base, p, args) = eg_sample(&g, 0, 0, &mut rng, 4);
        assert_eq!(base.group_slots, 1);
        assert_eq!(c0.value(&p, &args).norm(), 0.0);
        assert_eq!(chi_closed_p1(3, g.clone()).degree(), 1);
    }

    #[test]
    fn chi_closed_forms_match_quadrature() {
        let g = group("su:2");
        let f = p1();
        let seeds = SeedStream::new(6, "chi");
        for n in 1..=2 {
            let quad = chi(&f, n, g.clone());
            let closed = chi_closed_p1(n, g.clone());
            for k in 0..5 {
                let (_, p, args) = eg_sample(&g, 0, n, &mut seeds.rng(k), quad.degree());
                let (d, s) = scalar_diff(&quad.value(&p, &args), &closed.value(&p, &args));
                assert!(relative(d, s) < 1e-9, "n={n}: {d} vs {s}");
            }
        }
    }

    #[test]
    fn lifts_are_preimages_under_gamma() {
        let g = group("su:2");
        let mut rng = SeedStream::new(7, "lift").rng(0);
        let bg: Vec<CMat> = (0..2).map(|_| g.sample_group(&mut rng)).collect();
        let x: Vec<CMat> = bg.iter().map(|a| g.sample_tangent(&mut rng, a)).collect();
        let h = g.sample_group(&mut rng);
        let x0 = g.sample_tangent(&mut rng, &h);
        let eg = lift_point(&bg, &h);
        let lifted = lift_tangent(&bg, &eg, &x, &x0);
        let map = ProductMap::slots(SlotMap::Gamma);
        let base = BaseSpace::groups(3, g.clone());
        let p = Point::groups(eg);
        let q = map.apply(&p, 2);
        let pushed = map.push(&p, &Tangent::slots(0, lifted), 2);
        for k in 0..2 {
            assert!(matrix::max_abs_diff(&q.g[k], &bg[k]) < 1e-13);
            assert!(matrix::max_abs_diff(&pushed.x[k], &x[k]) < 1e-13);
        }
        assert_eq!(base.group_slots, 3);
    }
}

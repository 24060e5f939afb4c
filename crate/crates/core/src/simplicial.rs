//! The simplex category, finite simplicial sets, and the nerve levels of a
//! matrix group.
//!
//! Ordinals are written `[n] = {0, …, n}`. A [`MonotoneMap`] stores its
//! source and target as sizes (`n + 1`), so the empty ordinal is representable
//! but never produced by the coface/codegeneracy constructors.
//!
//! Nerve convention: a point of `BGₙ` is a tuple `(g₁, …, gₙ)`; the face `d₀`
//! drops the first entry, `dₙ` drops the last, and the inner faces multiply
//! adjacent entries as `g_{i+1}·gᵢ`. A point of `EGₙ` is a tuple of objects
//! `(g₀, …, gₙ)` whose faces delete entries. The symplectic-form literature
//! sometimes uses the reversed nerve, which swaps the roles of `d₀` and `dₙ`;
//! nothing here uses that convention.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::matrix::{self, CMat, MatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplicialError {
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("level {level} has no face maps")]
    NoFaces { level: usize },
    #[error("values are not non-decreasing")]
    NotMonotone,
    #[error("value {value} outside target [0, {max}]")]
    OutOfTarget { value: usize, max: usize },
    #[error("cannot compose: inner target size {inner} differs from outer source size {outer}")]
    Composition { inner: usize, outer: usize },
    #[error("tuple arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("inconsistent category table: {0}")]
    InconsistentTable(String),
}

/// Order-preserving map `[k] → [m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneMap {
    source_size: usize,
    target_size: usize,
    values: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(target_size: usize, values: Vec<usize>) -> Result<Self, SimplicialError> {
        if let Some(&v) = values.iter().find(|&&v| v >= target_size) {
            return Err(SimplicialError::OutOfTarget {
                value: v,
                max: target_size.saturating_sub(1),
            });
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(SimplicialError::NotMonotone);
        }
        Ok(Self {
            source_size: values.len(),
            target_size,
            values,
        })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            source_size: size,
            target_size: size,
            values: (0..size).collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &MonotoneMap) -> Result<MonotoneMap, SimplicialError> {
        if inner.target_size != self.source_size {
            return Err(SimplicialError::Composition {
                inner: inner.target_size,
                outer: self.source_size,
            });
        }
        Ok(MonotoneMap {
            source_size: inner.source_size,
            target_size: self.target_size,
            values: inner.values.iter().map(|&v| self.values[v]).collect(),
        })
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.values.iter().copied().collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target_size
    }
}

/// Coface `δᵢ: [n−1] → [n]`, skipping `i`. Requires `n ≥ 1` and `i ≤ n`.
pub fn delta(i: usize, n: usize) -> Result<MonotoneMap, SimplicialError> {
    if n == 0 {
        return Err(SimplicialError::NoFaces { level: 0 });
    }
    if i > n {
        return Err(SimplicialError::IndexOutOfRange { index: i, max: n });
    }
    let values = (0..n).map(|j| if j < i { j } else { j + 1 }).collect();
    Ok(MonotoneMap {
        source_size: n,
        target_size: n + 1,
        values,
    })
}

/// Codegeneracy `σᵢ: [n+1] → [n]`, hitting `i` twice. Requires `i ≤ n`.
pub fn sigma(i: usize, n: usize) -> Result<MonotoneMap, SimplicialError> {
    if i > n {
        return Err(SimplicialError::IndexOutOfRange { index: i, max: n });
    }
    let values = (0..n + 2).map(|j| if j <= i { j } else { j - 1 }).collect();
    Ok(MonotoneMap {
        source_size: n + 2,
        target_size: n + 1,
        values,
    })
}

/// Factorisation `δ_{i_k} ∘ … ∘ δ_{i_1} ∘ σ_{j_1} ∘ … ∘ σ_{j_l}` of a monotone map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    /// `i_1 < … < i_k`: target elements missed by the map.
    pub delta_indices: Vec<usize>,
    /// `j_1 < … < j_l`: positions with `f(j) = f(j+1)`.
    pub sigma_indices: Vec<usize>,
    pub source_size: usize,
    pub target_size: usize,
}

impl NormalForm {
    /// Rebuild the map. `σ_{j_l}` acts first, `δ_{i_k}` last.
    pub fn recompose(&self) -> Result<MonotoneMap, SimplicialError> {
        let mut acc = MonotoneMap::identity(self.source_size);
        let mut size = self.source_size;
        for &j in self.sigma_indices.iter().rev() {
            // σ_j : [size-1] → [size-2]
            let s = sigma(j, size.saturating_sub(2))?;
            acc = s.compose(&acc)?;
            size -= 1;
        }
        for &i in &self.delta_indices {
            let d = delta(i, size)?;
            acc = d.compose(&acc)?;
            size += 1;
        }
        Ok(acc)
    }
}

pub fn normal_form(f: &MonotoneMap) -> NormalForm {
    let sigma_indices = (0..f.source_size.saturating_sub(1))
        .filter(|&j| f.values[j] == f.values[j + 1])
        .collect();
    let image = f.image();
    let delta_indices = (0..f.target_size).filter(|i| !image.contains(i)).collect();
    NormalForm {
        delta_indices,
        sigma_indices,
        source_size: f.source_size,
        target_size: f.target_size,
    }
}

/// All monotone maps `[k] → [n]`, i.e. the `k`-simplices of `Δ[n]`.
pub fn enumerate_yoneda(n: usize, k: usize) -> Vec<MonotoneMap> {
    (0..=n)
        .combinations_with_replacement(k + 1)
        .map(|values| MonotoneMap {
            source_size: k + 1,
            target_size: n + 1,
            values,
        })
        .collect()
}

/// Membership in the horn `Λ[n, p]`: the image misses some vertex other than `p`.
pub fn horn_member(f: &MonotoneMap, n: usize, p: usize) -> Result<bool, SimplicialError> {
    if p > n {
        return Err(SimplicialError::IndexOutOfRange { index: p, max: n });
    }
    if f.target_size != n + 1 {
        return Err(SimplicialError::Arity {
            expected: n + 1,
            got: f.target_size,
        });
    }
    let image = f.image();
    Ok((0..=n).any(|v| v != p && !image.contains(&v)))
}

/// Which nerve a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NerveKind {
    /// `BGₙ = Gⁿ`, tuples of composable morphisms.
    Base,
    /// `EGₙ = Gⁿ⁺¹`, tuples of objects.
    Total,
}

/// One level of `BG` or `EG` for `matrix_size × matrix_size` groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NerveLevel {
    pub kind: NerveKind,
    pub level: usize,
    pub matrix_size: usize,
}

impl NerveLevel {
    pub fn base(level: usize, matrix_size: usize) -> Self {
        Self {
            kind: NerveKind::Base,
            level,
            matrix_size,
        }
    }

    pub fn total(level: usize, matrix_size: usize) -> Self {
        Self {
            kind: NerveKind::Total,
            level,
            matrix_size,
        }
    }

    /// Number of matrices in a point.
    pub fn arity(&self) -> usize {
        match self.kind {
            NerveKind::Base => self.level,
            NerveKind::Total => self.level + 1,
        }
    }

    fn check(&self, point: &[CMat]) -> Result<(), SimplicialError> {
        if point.len() != self.arity() {
            return Err(SimplicialError::Arity {
                expected: self.arity(),
                got: point.len(),
            });
        }
        for g in point {
            matrix::check_square(g, self.matrix_size)?;
        }
        Ok(())
    }

    /// `dᵢ: Xₙ → Xₙ₋₁`.
    pub fn face(&self, i: usize, point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
        self.check(point)?;
        let n = self.level;
        if n == 0 {
            return Err(SimplicialError::NoFaces { level: 0 });
        }
        if i > n {
            return Err(SimplicialError::IndexOutOfRange { index: i, max: n });
        }
        Ok(match self.kind {
            NerveKind::Total => {
                let mut out = point.to_vec();
                out.remove(i);
                out
            }
            NerveKind::Base => {
                if i == 0 {
                    point[1..].to_vec()
                } else if i == n {
                    point[..n - 1].to_vec()
                } else {
                    // entries are g₁..gₙ stored at 0..n-1; merge gᵢ and g_{i+1}
                    let mut out = Vec::with_capacity(n - 1);
                    out.extend_from_slice(&point[..i - 1]);
                    out.push(&point[i] * &point[i - 1]);
                    out.extend_from_slice(&point[i + 1..]);
                    out
                }
            }
        })
    }

    /// `sᵢ: Xₙ → Xₙ₊₁`.
    pub fn degeneracy(&self, i: usize, point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
        self.check(point)?;
        let n = self.level;
        if i > n {
            return Err(SimplicialError::IndexOutOfRange { index: i, max: n });
        }
        let mut out = point.to_vec();
        match self.kind {
            NerveKind::Total => out.insert(i, point[i].clone()),
            NerveKind::Base => out.insert(i, matrix::identity(self.matrix_size)),
        }
        Ok(out)
    }
}

fn size_of(point: &[CMat]) -> usize {
    point.first().map_or(0, |g| g.nrows())
}

pub fn bg_face(i: usize, n: usize, point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
    NerveLevel::base(n, size_of(point)).face(i, point)
}

/// `BG₀` is a single point, so the matrix size must be given explicitly.
pub fn bg_degeneracy(
    i: usize,
    n: usize,
    point: &[CMat],
    matrix_size: usize,
) -> Result<Vec<CMat>, SimplicialError> {
    NerveLevel::base(n, matrix_size).degeneracy(i, point)
}

pub fn eg_face(i: usize, n: usize, point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
    NerveLevel::total(n, size_of(point)).face(i, point)
}

pub fn eg_degeneracy(i: usize, n: usize, point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
    NerveLevel::total(n, size_of(point)).degeneracy(i, point)
}

/// Projection `γₙ: EGₙ → BGₙ`, `(g₀, …, gₙ) ↦ (g₁g₀⁻¹, …, gₙg_{n−1}⁻¹)`.
pub fn gamma(eg_point: &[CMat]) -> Result<Vec<CMat>, SimplicialError> {
    eg_point
        .windows(2)
        .map(|w| Ok(&w[1] * matrix::inverse(&w[0])?))
        .collect()
}

/// Right action of `G` on `EGₙ`: every entry multiplied by `g` on the right.
pub fn eg_right_action(eg_point: &[CMat], g: &CMat) -> Vec<CMat> {
    eg_point.iter().map(|x| x * g).collect()
}

/// Finite category given by a composition table.
///
/// `compose[(f, g)]` is the composite "first `f`, then `g`", defined only when
/// `target(f) = source(g)`. A table may leave composites out; the nerve then
/// only contains chains whose composites all exist.
#[derive(Debug, Clone, Default)]
pub struct CategoryTable {
    pub objects: usize,
    /// `(source, target)` per morphism.
    pub morphisms: Vec<(usize, usize)>,
    pub compose: BTreeMap<(usize, usize), usize>,
}

impl CategoryTable {
    /// One-object category of a finite group with multiplication table `mul[a][b] = a·b`.
    /// The chain "first `a`, then `b`" composes to `b·a`.
    pub fn from_group(mul: &[Vec<usize>]) -> Self {
        let order = mul.len();
        let mut compose = BTreeMap::new();
        for a in 0..order {
            for b in 0..order {
                compose.insert((a, b), mul[b][a]);
            }
        }
        Self {
            objects: 1,
            morphisms: vec![(0, 0); order],
            compose,
        }
    }

    /// Only identity morphisms.
    pub fn discrete(objects: usize) -> Self {
        let compose = (0..objects).map(|i| ((i, i), i)).collect();
        Self {
            objects,
            morphisms: (0..objects).map(|i| (i, i)).collect(),
            compose,
        }
    }

    fn validate(&self) -> Result<(), SimplicialError> {
        for (m, &(s, t)) in self.morphisms.iter().enumerate() {
            if s >= self.objects || t >= self.objects {
                return Err(SimplicialError::InconsistentTable(format!(
                    "morphism {m} has an endpoint outside the object set"
                )));
            }
        }
        for (&(f, g), &h) in &self.compose {
            let (Some(&(fs, ft)), Some(&(gs, gt)), Some(&(hs, ht))) = (
                self.morphisms.get(f),
                self.morphisms.get(g),
                self.morphisms.get(h),
            ) else {
                return Err(SimplicialError::InconsistentTable(format!(
                    "composite ({f}, {g}) -> {h} names an unknown morphism"
                )));
            };
            if ft != gs || hs != fs || ht != gt {
                return Err(SimplicialError::InconsistentTable(format!(
                    "composite ({f}, {g}) -> {h} has the wrong endpoints"
                )));
            }
        }
        for (&(f, g), &fg) in &self.compose {
            for h in 0..self.morphisms.len() {
                if let (Some(&left), Some(&gh)) =
                    (self.compose.get(&(fg, h)), self.compose.get(&(g, h)))
                {
                    if let Some(&right) = self.compose.get(&(f, gh)) {
                        if left != right {
                            return Err(SimplicialError::InconsistentTable(format!(
                                "composition is not associative on ({f}, {g}, {h})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Chains `(f₁, …, fₙ)` with matching endpoints (the iterated fibre product).
    fn matching_chains(&self, n: usize) -> Vec<Vec<usize>> {
        let mut chains: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n {
            chains = chains
                .into_iter()
                .flat_map(|chain| {
                    let last = chain.last().copied();
                    (0..self.morphisms.len())
                        .filter(move |&m| {
                            last.is_none_or(|l| self.morphisms[l].1 == self.morphisms[m].0)
                        })
                        .map(move |m| {
                            let mut c = chain.clone();
                            c.push(m);
                            c
                        })
                })
                .collect();
        }
        chains
    }

    /// Nerve level `n`: matching chains whose consecutive composites all exist.
    pub fn nerve(&self, n: usize) -> Vec<Vec<usize>> {
        self.matching_chains(n)
            .into_iter()
            .filter(|chain| {
                (0..chain.len()).all(|start| {
                    let mut acc = Some(chain[start]);
                    for &m in &chain[start + 1..] {
                        acc = acc.and_then(|a| self.compose.get(&(a, m)).copied());
                    }
                    acc.is_some()
                })
            })
            .collect()
    }
}

/// Segal condition at level `n ≤ 3`: the nerve level equals the fibre product
/// `N₁ ×_{N₀} ⋯ ×_{N₀} N₁`. The nerve embeds into the fibre product, so the
/// check compares cardinalities.
pub fn segal_check(table: &CategoryTable, n: usize) -> Result<bool, SimplicialError> {
    if n > 3 {
        return Err(SimplicialError::IndexOutOfRange { index: n, max: 3 });
    }
    table.validate()?;
    Ok(table.nerve(n).len() == table.matching_chains(n).len())
}

//! Posets on the vertex set, truncation quotients `A(Y)`, standard modules
//! `M_y`, and certificates for the two stratification hypotheses: standard
//! modules are independent of the segment, and every `A e_x` is filtered by
//! standard modules. The heredity chain peels off one maximal vertex at a
//! time and witnesses that the ideal it generates is left projective.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraTable;
use crate::error::StratError;
use crate::linalg::{axpy, unit_vector, Matrix, Subspace, Vector};
use crate::module::{hom_space, is_isomorphic, IsoVerdict, Module, ModuleMap};
use crate::presentation::Presentation;
use crate::scalar::Field;

/// Largest poset for which all initial segments are enumerated.
pub const MAX_ENUMERATED_POSET: usize = 20;
/// Largest module dimension for the exhaustive filtration search.
pub const MAX_EXHAUSTIVE_FILTRATION_DIM: usize = 8;

const WITNESS_SEED: u64 = 0x4e7e_d17a;
const WITNESS_TRIES: usize = 64;

/// A partial order on the vertices, stored as its strict relation after
/// transitive closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    /// `less[x][y]` iff `x < y`.
    less: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the order generated by covering pairs `(x, y)` meaning `x < y`.
    pub fn new(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Poset, StratError> {
        let n = names.len();
        let mut less = vec![vec![false; n]; n];
        for &(x, y) in covers {
            if x >= n {
                return Err(StratError::UnknownVertex(x.to_string()));
            }
            if y >= n {
                return Err(StratError::UnknownVertex(y.to_string()));
            }
            less[x][y] = true;
        }
        for k in 0..n {
            let through = less[k].clone();
            for row in less.iter_mut().filter(|row| row[k]) {
                for (cell, &kj) in row.iter_mut().zip(&through) {
                    *cell |= kj;
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| less[x][x]) {
            return Err(StratError::CyclicOrder(names[x].clone()));
        }
        Ok(Poset { names, less })
    }

    pub fn from_presentation(p: &Presentation) -> Result<Poset, StratError> {
        Poset::new(p.quiver.vertices().to_vec(), &p.order)
    }

    pub fn antichain(names: Vec<String>) -> Poset {
        let n = names.len();
        Poset {
            names,
            less: vec![vec![false; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize, StratError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| StratError::UnknownVertex(name.to_string()))
    }

    pub fn less(&self, x: usize, y: usize) -> bool {
        self.less[x][y]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        x == y || self.less[x][y]
    }

    /// `{x | x <= y}`.
    pub fn down_set(&self, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.leq(x, y)).collect()
    }

    /// `{x | not x > y}`: the largest initial segment in which `y` is
    /// maximal.
    pub fn not_above(&self, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| !self.less[y][x]).collect()
    }

    pub fn is_initial_segment(&self, ys: &[usize]) -> bool {
        ys.iter()
            .all(|&y| (0..self.len()).all(|x| !self.less[x][y] || ys.contains(&x)))
    }

    /// Smallest initial segment containing `ys`, sorted.
    pub fn down_closure(&self, ys: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| ys.iter().any(|&y| self.leq(x, y)))
            .collect()
    }

    /// Maximal elements of a subset, in declared order.
    pub fn maximal_in(&self, ys: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = ys
            .iter()
            .copied()
            .filter(|&y| !ys.iter().any(|&z| self.less[y][z]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All initial segments, ordered by size and then lexicographically by
    /// vertex index.
    pub fn initial_segments(&self) -> Result<Vec<Vec<usize>>, StratError> {
        let n = self.len();
        if n > MAX_ENUMERATED_POSET {
            return Err(StratError::TooLarge(n));
        }
        let mut out: Vec<Vec<usize>> = (0u32..(1 << n))
            .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|ys| self.is_initial_segment(ys))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    pub fn segment_names(&self, ys: &[usize]) -> Vec<String> {
        ys.iter().map(|&y| self.names[y].clone()).collect()
    }

    pub fn display_segment(&self, ys: &[usize]) -> String {
        format!("{{{}}}", self.segment_names(ys).join(","))
    }
}

/// `A(Y) = A / sum_{x not in Y} A e_x A` with its projection.
#[derive(Clone, Debug)]
pub struct TruncationQuotient {
    pub segment: Vec<usize>,
    pub table: AlgebraTable,
    /// `dim A(Y) x dim A`.
    pub projection: Matrix,
    pub kernel: Subspace,
}

impl TruncationQuotient {
    /// Views an `A(Y)`-module as an `A`-module.
    pub fn inflate(&self, m: &Module) -> Module {
        m.pull_back(&self.projection)
    }

    /// Whether the action of `A` on `v` factors through `A(Y)`.
    pub fn factors(&self, v: &Module) -> bool {
        v.annihilated_by(&self.kernel)
    }

    /// The `A(Y)`-module structure of an `A`-module annihilated by the
    /// kernel.
    pub fn descend(&self, v: &Module) -> Result<Module, StratError> {
        if !self.factors(v) {
            return Err(StratError::WitnessFailure("module is not annihilated by the truncation kernel".into()));
        }
        let action = self
            .kernel
            .complement_coordinates()
            .into_iter()
            .map(|i| v.action()[i].clone())
            .collect();
        Ok(Module::new(&self.table, v.side(), action)?)
    }
}

pub fn truncate(algebra: &AlgebraTable, poset: &Poset, segment: &[usize]) -> Result<TruncationQuotient, StratError> {
    if !poset.is_initial_segment(segment) {
        return Err(StratError::NotInitialSegment(poset.display_segment(segment)));
    }
    let mut segment = segment.to_vec();
    segment.sort_unstable();
    segment.dedup();
    let generators: Vec<Vector> = (0..poset.len())
        .filter(|x| !segment.contains(x))
        .map(|x| algebra.idempotent(x).clone())
        .collect();
    let kernel = algebra.two_sided_ideal(&generators);
    let (table, projection) = algebra.quotient(&kernel)?;
    Ok(TruncationQuotient {
        segment,
        table,
        projection,
        kernel,
    })
}

/// `A(Y) e_y` as an `A`-module.
fn truncated_projective(algebra: &AlgebraTable, poset: &Poset, segment: &[usize], y: usize) -> Result<Module, StratError> {
    let t = truncate(algebra, poset, segment)?;
    let ey = t.projection.apply(algebra.idempotent(y));
    let (m, _) = Module::left_ideal(&t.table, &ey);
    Ok(t.inflate(&m))
}

#[derive(Clone, Debug)]
pub struct StandardModule {
    pub vertex: usize,
    pub module: Module,
    /// Coordinates of the image of `e_y`, which generates the module.
    pub generator: Vector,
}

/// `M_y = A(Y_y) e_y` for `Y_y = {x | x <= y}`.
pub fn standard_module(algebra: &AlgebraTable, poset: &Poset, y: usize) -> Result<StandardModule, StratError> {
    if y >= poset.len() {
        return Err(StratError::UnknownVertex(y.to_string()));
    }
    let t = truncate(algebra, poset, &poset.down_set(y))?;
    let ey = t.projection.apply(algebra.idempotent(y));
    let (m, span) = Module::left_ideal(&t.table, &ey);
    let generator = span.coordinates(&ey).expect("e_y lies in A(Y) e_y");
    let module = t.inflate(&m);
    let support = module.support(algebra);
    if let Some(&x) = support.iter().find(|&&x| !poset.leq(x, y)) {
        return Err(StratError::WitnessFailure(format!(
            "M_{} is supported at {} outside its down-set",
            poset.names()[y],
            poset.names()[x]
        )));
    }
    Ok(StandardModule {
        vertex: y,
        module,
        generator,
    })
}

pub fn standard_modules(algebra: &AlgebraTable, poset: &Poset) -> Result<Vec<StandardModule>, StratError> {
    (0..poset.len()).map(|y| standard_module(algebra, poset, y)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellDefinedRow {
    pub vertex: usize,
    /// `Y_max = {x | x not > y}`.
    pub segment: Vec<usize>,
    pub support: Vec<usize>,
    pub pass: bool,
}

/// One check per vertex: `A(Y_max) e_y` must be supported on the down-set
/// of `y`.
pub fn check_standard_welldefined(algebra: &AlgebraTable, poset: &Poset) -> Result<Vec<WellDefinedRow>, StratError> {
    (0..poset.len())
        .map(|y| {
            let segment = poset.not_above(y);
            let m = truncated_projective(algebra, poset, &segment, y)?;
            let support = m.support(algebra);
            let pass = support.iter().all(|&x| poset.leq(x, y));
            Ok(WellDefinedRow {
                vertex: y,
                segment,
                support,
                pass,
            })
        })
        .collect()
}

/// Brute-force version: for every initial segment `Y` with `y` maximal,
/// `A(Y) e_y` is supported on the down-set of `y` and has the dimension of
/// `M_y`.
pub fn check_standard_welldefined_exhaustive(algebra: &AlgebraTable, poset: &Poset) -> Result<Vec<bool>, StratError> {
    let segments = poset.initial_segments()?;
    (0..poset.len())
        .map(|y| {
            let reference = truncated_projective(algebra, poset, &poset.down_set(y), y)?.dim();
            for ys in segments.iter().filter(|ys| ys.contains(&y) && poset.maximal_in(ys).contains(&y)) {
                let m = truncated_projective(algebra, poset, ys, y)?;
                if m.dim() != reference || m.support(algebra).iter().any(|&x| !poset.leq(x, y)) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FiltrationLayer {
    pub vertex: usize,
    /// `V_i` in the coordinates of `V`.
    pub subspace: Subspace,
    /// `dim V x dim M_y`; induces `M_y ~ V_i / V_{i-1}`.
    pub witness: Matrix,
}

/// A filtration `0 = V_0 < V_1 < ... < V_n = V` with layers isomorphic to
/// standard modules, listed from the bottom.
#[derive(Clone, Debug)]
pub struct FiltrationCertificate {
    pub module: Module,
    pub layers: Vec<FiltrationLayer>,
}

impl FiltrationCertificate {
    pub fn layer_vertices(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.vertex).collect()
    }

    /// Re-checks stability, strict inclusions, dimension bookkeeping and
    /// every layer witness.
    pub fn verify(&self, algebra: &AlgebraTable, standards: &[StandardModule]) -> Result<(), StratError> {
        let v = &self.module;
        let field = v.field();
        let fail = |msg: String| Err(StratError::WitnessFailure(msg));
        let mut previous = Subspace::zero(field, v.dim());
        let mut total = 0;
        for (i, layer) in self.layers.iter().enumerate() {
            let m = &standards[layer.vertex].module;
            if layer.subspace.ambient() != v.dim() || !v.is_stable(&layer.subspace) {
                return fail(format!("layer {i} is not a submodule"));
            }
            if !layer.subspace.contains_subspace(&previous) || layer.subspace.dim() <= previous.dim() {
                return fail(format!("layer {i} does not strictly contain the previous one"));
            }
            if layer.subspace.dim() - previous.dim() != m.dim() {
                return fail(format!("layer {i} has the wrong dimension"));
            }
            let w = &layer.witness;
            if w.rows() != v.dim() || w.cols() != m.dim() {
                return fail(format!("witness {i} has the wrong shape"));
            }
            if !w.columns().iter().all(|c| layer.subspace.contains(c)) {
                return fail(format!("witness {i} leaves its layer"));
            }
            for u in 0..algebra.dim() {
                let defect = v.action()[u].mul(w).sub(&w.mul(&m.action()[u]));
                if !defect.columns().iter().all(|c| previous.contains(c)) {
                    return fail(format!("witness {i} does not intertwine modulo the previous layer"));
                }
            }
            let mut image = previous.clone();
            for c in w.columns() {
                image.insert(&c);
            }
            if image != layer.subspace {
                return fail(format!("witness {i} is not onto its layer"));
            }
            total += m.dim();
            previous = layer.subspace.clone();
        }
        if total != v.dim() || !previous.is_full() && v.dim() > 0 {
            return fail("layers do not exhaust the module".into());
        }
        Ok(())
    }
}

/// `V / U` together with a linear section back into `V`.
struct Residue {
    quotient: Module,
    keep: Vec<usize>,
}

impl Residue {
    fn new(v: &Module, u: &Subspace) -> Result<Residue, StratError> {
        let (quotient, _) = v.quotient(u)?;
        Ok(Residue {
            quotient,
            keep: u.complement_coordinates(),
        })
    }

    fn lift(&self, field: Field, ambient: usize, q: &[crate::scalar::Scalar]) -> Vector {
        let mut out = crate::linalg::zero_vector(field, ambient);
        for (c, &i) in q.iter().zip(&self.keep) {
            out[i] = c.clone();
        }
        out
    }
}

/// Greedy descent: the bottom layer sits at a maximal vertex of the
/// support, generated by `e_y V`.
pub fn standard_filtration(
    algebra: &AlgebraTable,
    poset: &Poset,
    standards: &[StandardModule],
    v: &Module,
) -> Result<FiltrationCertificate, StratError> {
    let field = v.field();
    let n = v.dim();
    let mut u = Subspace::zero(field, n);
    let mut layers = Vec::new();
    while u.dim() < n {
        let r = Residue::new(v, &u)?;
        let q = &r.quotient;
        let support = q.support(algebra);
        let y = poset.maximal_in(&support)[0];
        let name = &poset.names()[y];
        let m = &standards[y].module;
        if m.dim() > q.dim() {
            return Err(StratError::NoFiltrationFound(format!(
                "layer M_{name} has dimension {} but only {} dimensions remain",
                m.dim(),
                q.dim()
            )));
        }
        let have = q.act(algebra.idempotent(y)).rank();
        let unit = m.act(algebra.idempotent(y)).rank();
        if unit == 0 || have % unit != 0 {
            return Err(StratError::DivisibilityFailure {
                vertex: name.clone(),
                have,
                unit,
            });
        }
        let k = have / unit;
        let generated = q.closure(&q.act(algebra.idempotent(y)).columns())?;
        let (sub, inclusion) = q.submodule(&generated)?;
        let target = m.power(k);
        let phi = match is_isomorphic(algebra, &target, &sub)? {
            IsoVerdict::Isomorphic(phi) => phi,
            IsoVerdict::NotIsomorphic(why) => {
                return Err(StratError::NoFiltrationFound(format!(
                    "submodule generated by e_{name} is not M_{name}^{k}: {why}"
                )))
            }
            IsoVerdict::NoWitnessFound => {
                return Err(StratError::NoFiltrationFound(format!(
                    "no isomorphism witness found for M_{name}^{k}"
                )))
            }
        };
        let into_q = inclusion.compose(&phi).matrix;
        let d = m.dim();
        for j in 0..k {
            let cols: Vec<Vector> = (j * d..(j + 1) * d)
                .map(|c| r.lift(field, n, &into_q.column(c)))
                .collect();
            for c in &cols {
                u.insert(c);
            }
            layers.push(FiltrationLayer {
                vertex: y,
                subspace: u.clone(),
                witness: Matrix::from_columns(field, n, &cols),
            });
        }
    }
    let cert = FiltrationCertificate {
        module: v.clone(),
        layers,
    };
    cert.verify(algebra, standards)?;
    Ok(cert)
}

/// Outcome of the exhaustive filtration search.
#[derive(Clone, Debug)]
pub enum ExhaustiveFiltration {
    Exists(FiltrationCertificate),
    NoneExists,
    /// The module is too large, or some hom space was too large to sweep.
    Inconclusive,
}

/// Searches all chains whose layers are images of injective maps from
/// standard modules. Exact when every hom space met along the way is at
/// most one-dimensional or small enough to enumerate over a finite field.
pub fn exhaustive_filtration(
    algebra: &AlgebraTable,
    standards: &[StandardModule],
    v: &Module,
) -> Result<ExhaustiveFiltration, StratError> {
    if v.dim() > MAX_EXHAUSTIVE_FILTRATION_DIM {
        return Ok(ExhaustiveFiltration::Inconclusive);
    }
    let mut exact = true;
    let mut layers = Vec::new();
    let u = Subspace::zero(v.field(), v.dim());
    if search(standards, v, &u, &mut layers, &mut exact)? {
        let cert = FiltrationCertificate {
            module: v.clone(),
            layers,
        };
        cert.verify(algebra, standards)?;
        return Ok(ExhaustiveFiltration::Exists(cert));
    }
    Ok(if exact {
        ExhaustiveFiltration::NoneExists
    } else {
        ExhaustiveFiltration::Inconclusive
    })
}

fn candidate_maps(homs: &[ModuleMap], field: Field, exact: &mut bool) -> Vec<Matrix> {
    if homs.len() == 1 {
        return vec![homs[0].matrix.clone()];
    }
    let combine = |coeffs: &[i64]| {
        let mut m = Matrix::zeros(field, homs[0].matrix.rows(), homs[0].matrix.cols());
        for (c, h) in coeffs.iter().zip(homs) {
            m.add_scaled(&field.int(*c), &h.matrix);
        }
        m
    };
    if let Some(p) = field.size() {
        if (p as u128).pow(homs.len() as u32) <= 4096 {
            let mut out = Vec::new();
            let mut idx = vec![0i64; homs.len()];
            'outer: loop {
                out.push(combine(&idx));
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if (*slot as u64) < p {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                return out;
            }
        }
    }
    *exact = false;
    let mut out: Vec<Matrix> = homs.iter().map(|h| h.matrix.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    for _ in 0..16 {
        let coeffs: Vec<i64> = homs.iter().map(|_| rng.gen_range(-3..=3)).collect();
        out.push(combine(&coeffs));
    }
    out
}

fn search(
    standards: &[StandardModule],
    v: &Module,
    u: &Subspace,
    layers: &mut Vec<FiltrationLayer>,
    exact: &mut bool,
) -> Result<bool, StratError> {
    if u.dim() == v.dim() {
        return Ok(true);
    }
    let field = v.field();
    let r = Residue::new(v, u)?;
    let q = &r.quotient;
    for s in standards {
        let m = &s.module;
        if m.is_zero() || m.dim() > q.dim() {
            continue;
        }
        let homs = hom_space(m, q)?;
        if homs.is_empty() {
            continue;
        }
        let mut seen: Vec<Subspace> = Vec::new();
        for phi in candidate_maps(&homs, field, exact) {
            if phi.rank() != m.dim() {
                continue;
            }
            let cols: Vec<Vector> = phi.columns().iter().map(|c| r.lift(field, v.dim(), c)).collect();
            let mut next = u.clone();
            for c in &cols {
                next.insert(c);
            }
            if seen.contains(&next) {
                continue;
            }
            seen.push(next.clone());
            layers.push(FiltrationLayer {
                vertex: s.vertex,
                subspace: next.clone(),
                witness: Matrix::from_columns(field, v.dim(), &cols),
            });
            if search(standards, v, &next, layers, exact)? {
                return Ok(true);
            }
            layers.pop();
        }
    }
    Ok(false)
}

#[derive(Clone, Debug)]
pub struct FiltrationRow {
    /// The vertex `x` of the projective `A e_x`.
    pub vertex: usize,
    pub result: Result<FiltrationCertificate, StratError>,
}

#[derive(Clone, Debug)]
pub struct StratificationReport {
    pub welldefined: Vec<WellDefinedRow>,
    pub filtrations: Vec<FiltrationRow>,
    pub standards: Vec<StandardModule>,
}

impl StratificationReport {
    pub fn pass(&self) -> bool {
        self.welldefined.iter().all(|r| r.pass) && self.filtrations.iter().all(|r| r.result.is_ok())
    }

    /// Human-readable description of the first failing check.
    pub fn first_failure(&self, poset: &Poset) -> Option<String> {
        if let Some(r) = self.welldefined.iter().find(|r| !r.pass) {
            return Some(format!("well-definedness of M_{}", poset.names()[r.vertex]));
        }
        self.filtrations.iter().find_map(|r| {
            r.result
                .as_ref()
                .err()
                .map(|e| format!("filtration of A{}: {e}", poset.names()[r.vertex]))
        })
    }
}

/// Checks both hypotheses: well-defined standard modules, and a standard
/// filtration of every regular projective.
pub fn check_hypotheses(algebra: &AlgebraTable, poset: &Poset) -> Result<StratificationReport, StratError> {
    let welldefined = check_standard_welldefined(algebra, poset)?;
    let standards = standard_modules(algebra, poset)?;
    let filtrations = (0..poset.len())
        .map(|x| {
            let p = Module::regular_projective(algebra, x);
            let result = if welldefined.iter().all(|r| r.pass) {
                standard_filtration(algebra, poset, &standards, &p)
            } else {
                Err(StratError::HypothesisViolated("standard modules are not well defined".into()))
            };
            FiltrationRow { vertex: x, result }
        })
        .collect();
    Ok(StratificationReport {
        welldefined,
        filtrations,
        standards,
    })
}

#[derive(Clone, Debug)]
pub struct HeredityStep {
    /// Vertex of the original poset removed at this step.
    pub removed: usize,
    /// Algebra before the step.
    pub algebra: AlgebraTable,
    /// `I = C e_x C` in the coordinates of `algebra`.
    pub ideal: Subspace,
    /// Right-multiplication elements `w` in `e_x C e_y`, grouped by `y`
    /// (original vertex index).
    pub generators: Vec<(usize, Vec<Vector>)>,
    /// Total number of copies of `C e_x`.
    pub copies: usize,
    /// The matrix of `(C e_x)^n -> C`, columns indexed by copy then basis
    /// of `C e_x`; its image is `I`.
    pub witness: Matrix,
    pub quotient: AlgebraTable,
    /// `dim quotient x dim algebra`.
    pub projection: Matrix,
    /// Vertices still present after the step, as an initial segment.
    pub remaining: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct HeredityChainCertificate {
    pub order: Vec<usize>,
    pub steps: Vec<HeredityStep>,
}

impl HeredityChainCertificate {
    /// Checks every witness and compares each intermediate quotient with
    /// the truncation of `A` at the remaining segment.
    pub fn verify(&self, algebra: &AlgebraTable, poset: &Poset) -> Result<(), StratError> {
        let mut composite = Matrix::identity(algebra.field(), algebra.dim());
        for (i, step) in self.steps.iter().enumerate() {
            verify_step(step, poset).map_err(|m| StratError::WitnessFailure(format!("step {i}: {m}")))?;
            composite = step.projection.mul(&composite);
            check_prefix(algebra, poset, &step.remaining, &step.quotient, &composite)
                .map_err(|m| StratError::WitnessFailure(format!("step {i}: {m}")))?;
        }
        Ok(())
    }
}

fn vertex_in(table: &AlgebraTable, name: &str) -> Option<usize> {
    table.vertices().iter().position(|v| v == name)
}

fn verify_step(step: &HeredityStep, poset: &Poset) -> Result<(), String> {
    let c = &step.algebra;
    if !c.is_two_sided_ideal(&step.ideal) {
        return Err("ideal is not two-sided".into());
    }
    let name = &poset.names()[step.removed];
    let Some(x) = vertex_in(c, name) else {
        return if step.ideal.is_zero() && step.copies == 0 {
            Ok(())
        } else {
            Err(format!("vertex {name} is already gone but the ideal is nonzero"))
        };
    };
    if step.ideal != c.two_sided_ideal(&[c.idempotent(x).clone()]) {
        return Err("ideal is not generated by the removed idempotent".into());
    }
    let (cex, _) = Module::left_ideal(c, c.idempotent(x));
    let source = cex.power(step.copies);
    let map = ModuleMap::new(step.witness.clone());
    if !map.intertwines(&source, &Module::regular(c)) {
        return Err("projectivity witness does not intertwine".into());
    }
    if map.rank() != source.dim() {
        return Err("projectivity witness is not injective".into());
    }
    if Subspace::span(c.field(), c.dim(), step.witness.columns()) != step.ideal {
        return Err("projectivity witness is not onto the ideal".into());
    }
    if step.ideal.dim() != step.copies * cex.dim() {
        return Err("dimension of the ideal is not n dim C e_x".into());
    }
    let (q, proj) = c.quotient(&step.ideal).map_err(|e| e.to_string())?;
    if q != step.quotient || proj != step.projection {
        return Err("quotient table does not match".into());
    }
    Ok(())
}

fn check_prefix(
    algebra: &AlgebraTable,
    poset: &Poset,
    segment: &[usize],
    quotient: &AlgebraTable,
    composite: &Matrix,
) -> Result<(), String> {
    let t = truncate(algebra, poset, segment).map_err(|e| e.to_string())?;
    let kernel = Subspace::span(algebra.field(), algebra.dim(), composite.kernel());
    if kernel != t.kernel {
        return Err(format!("kernel differs from the truncation at {}", poset.display_segment(segment)));
    }
    let cols: Vec<Vector> = (0..quotient.dim())
        .map(|i| {
            let pre = composite
                .solve(&unit_vector(algebra.field(), quotient.dim(), i))
                .expect("composite projection is onto");
            t.projection.apply(&pre)
        })
        .collect();
    let phi = Matrix::from_columns(algebra.field(), t.table.dim(), &cols);
    quotient.check_isomorphism(&t.table, &phi)
}

/// Right-multiplication witnesses `w in e_x C e_y` with `C e_x w` independent
/// copies of `C e_x` filling `C e_x C e_y`.
fn projectivity_generators(c: &AlgebraTable, x: usize, y: usize) -> Result<Vec<Vector>, String> {
    let (cex, span) = Module::left_ideal(c, c.idempotent(x));
    let target = c.two_sided_ideal(&[c.idempotent(x).clone()]);
    let ey = c.idempotent(y);
    let goal: Vec<Vector> = target.basis().iter().map(|v| c.mul(v, ey)).collect();
    let goal = Subspace::span(c.field(), c.dim(), goal);
    let d = cex.dim();
    if d == 0 || !goal.dim().is_multiple_of(d) {
        return Err(format!("dim I e_y = {} is not a multiple of dim C e_x = {d}", goal.dim()));
    }
    let block = c.peirce_block(x, y);
    let mut image = Subspace::zero(c.field(), c.dim());
    let mut chosen = Vec::new();
    let try_add = |w: &Vector, image: &mut Subspace, chosen: &mut Vec<Vector>| {
        let mut next = image.clone();
        let mut fresh = 0;
        for b in span.basis() {
            if next.insert(&c.mul(b, w)) {
                fresh += 1;
            }
        }
        if fresh == d {
            *image = next;
            chosen.push(w.clone());
        }
    };
    for w in block.basis() {
        if image.dim() == goal.dim() {
            break;
        }
        try_add(w, &mut image, &mut chosen);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    let mut tries = 0;
    while image.dim() < goal.dim() && tries < WITNESS_TRIES && !block.is_zero() {
        let mut w = c.zero();
        for b in block.basis() {
            axpy(&mut w, &c.field().int(rng.gen_range(-5..=5)), b);
        }
        try_add(&w, &mut image, &mut chosen);
        tries += 1;
    }
    if image != goal {
        return Err(format!("could not fill C e_x C e_y (dim {}) by copies of C e_x", goal.dim()));
    }
    Ok(chosen)
}

/// Removes maximal vertices one at a time (first in declared order among
/// the maximal ones) and witnesses `C e_x C ~ (C e_x)^n` as left modules.
pub fn heredity_chain(algebra: &AlgebraTable, poset: &Poset) -> Result<HeredityChainCertificate, StratError> {
    let report = check_hypotheses(algebra, poset)?;
    if !report.pass() {
        return Err(StratError::HypothesisViolated(
            report.first_failure(poset).unwrap_or_else(|| "unknown failure".into()),
        ));
    }
    let field = algebra.field();
    let mut c = algebra.clone();
    let mut remaining: Vec<usize> = (0..poset.len()).collect();
    let mut steps = Vec::new();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let removed = poset.maximal_in(&remaining)[0];
        remaining.retain(|&v| v != removed);
        order.push(removed);
        let name = &poset.names()[removed];
        let (ideal, generators, copies, witness) = match vertex_in(&c, name) {
            None => (Subspace::zero(field, c.dim()), Vec::new(), 0, Matrix::zeros(field, c.dim(), 0)),
            Some(x) => {
                let ideal = c.two_sided_ideal(&[c.idempotent(x).clone()]);
                let (_, span) = Module::left_ideal(&c, c.idempotent(x));
                let mut generators = Vec::new();
                let mut cols = Vec::new();
                let mut copies = 0;
                for y in 0..c.vertices().len() {
                    let ws = projectivity_generators(&c, x, y).map_err(StratError::WitnessFailure)?;
                    for w in &ws {
                        cols.extend(span.basis().iter().map(|b| c.mul(b, w)));
                    }
                    copies += ws.len();
                    let original = poset.index(&c.vertices()[y])?;
                    generators.push((original, ws));
                }
                (ideal, generators, copies, Matrix::from_columns(field, c.dim(), &cols))
            }
        };
        let (quotient, projection) = c.quotient(&ideal)?;
        steps.push(HeredityStep {
            removed,
            algebra: c.clone(),
            ideal,
            generators,
            copies,
            witness,
            quotient: quotient.clone(),
            projection,
            remaining: remaining.clone(),
        });
        c = quotient;
    }
    let cert = HeredityChainCertificate { order, steps };
    cert.verify(algebra, poset)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation_with;
    use crate::rewriting::complete_rewriting;

    const SL2: &str = "PARAM z = 0\nVERTICES e f\nARROW a : e -> f\nARROW b : e -> e\nARROW c : f -> e\n\
REL a*b\nREL b*c\nREL a*c - z*f\nREL b*b + c*a - z*e\n";

    fn sl2(z: &str, order: &str) -> (AlgebraTable, Poset) {
        let text = format!("{SL2}{order}");
        let p = parse_presentation_with(&text, &[("z".into(), z.into())]).unwrap();
        let a = complete_rewriting(&p, 6).unwrap().build_algebra();
        (a, Poset::from_presentation(&p).unwrap())
    }

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn initial_segments_of_small_posets() {
        let chain = Poset::new(names(&["e", "f"]), &[(0, 1)]).unwrap();
        assert_eq!(chain.initial_segments().unwrap(), vec![vec![], vec![0], vec![0, 1]]);
        let anti = Poset::antichain(names(&["x", "y"]));
        assert_eq!(anti.initial_segments().unwrap().len(), 4);
        let three = Poset::new(names(&["p", "q", "r"]), &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(three.initial_segments().unwrap().len(), 4);
        assert!(three.less(0, 2));
        assert!(matches!(
            Poset::new(names(&["p", "q"]), &[(0, 1), (1, 0)]),
            Err(StratError::CyclicOrder(_))
        ));
    }

    #[test]
    fn truncation_at_e() {
        let (a, p) = sl2("0", "ORDER e < f\n");
        let t = truncate(&a, &p, &[0]).unwrap();
        assert_eq!(t.table.labels(), ["e", "b"]);
        let kernel: Vec<String> = t.kernel.basis().iter().map(|v| a.label_of(v)).collect();
        assert_eq!(kernel.len(), 4);
        assert!(t.kernel.contains(&a.basis_vector(a.labels().iter().position(|l| l == "b^2").unwrap())));
        let all = truncate(&a, &p, &[0, 1]).unwrap();
        assert_eq!(all.table, a);
        let none = truncate(&a, &p, &[]).unwrap();
        assert_eq!(none.table.dim(), 0);
        assert!(matches!(truncate(&a, &p, &[1]), Err(StratError::NotInitialSegment(_))));
    }

    #[test]
    fn standard_modules_of_the_example() {
        let (a, p) = sl2("0", "ORDER e < f\n");
        let m = standard_modules(&a, &p).unwrap();
        assert_eq!(m[0].module.dim(), 2);
        assert_eq!(m[0].module.support(&a), vec![0]);
        assert_eq!(m[1].module.dim(), 2);
        let af = Module::regular_projective(&a, 1);
        assert!(is_isomorphic(&a, &m[1].module, &af).unwrap().is_isomorphic());
        let rows = check_standard_welldefined(&a, &p).unwrap();
        assert!(rows.iter().all(|r| r.pass));
        assert_eq!(check_standard_welldefined_exhaustive(&a, &p).unwrap(), vec![true, true]);
    }

    #[test]
    fn filtration_of_ae_has_mf_at_the_bottom() {
        for z in ["0", "1", "-3/2"] {
            let (a, p) = sl2(z, "ORDER e < f\n");
            let report = check_hypotheses(&a, &p).unwrap();
            assert!(report.pass(), "z = {z}: {:?}", report.first_failure(&p));
            let cert = report.filtrations[0].result.as_ref().unwrap();
            assert_eq!(cert.layer_vertices(), vec![1, 0]);
            // The bottom layer is the image of right multiplication by a.
            let (_, span) = Module::left_ideal(&a, a.idempotent(0));
            let arrow_a = a.basis_vector(a.labels().iter().position(|l| l == "a").unwrap());
            let image: Vec<Vector> = (0..a.dim())
                .map(|i| span.coordinates(&a.mul(&a.mul(&a.basis_vector(i), a.idempotent(1)), &arrow_a)).unwrap())
                .collect();
            assert_eq!(Subspace::span(a.field(), 4, image), cert.layers[0].subspace);
        }
    }

    #[test]
    fn reversed_order_fails_at_af() {
        let (a, p) = sl2("0", "ORDER f < e\n");
        let report = check_hypotheses(&a, &p).unwrap();
        assert!(report.welldefined.iter().all(|r| r.pass));
        assert!(!report.pass());
        assert!(report.first_failure(&p).unwrap().starts_with("filtration of Af"));
        let af = Module::regular_projective(&a, 1);
        assert!(matches!(
            exhaustive_filtration(&a, &report.standards, &af).unwrap(),
            ExhaustiveFiltration::NoneExists
        ));
        assert!(matches!(heredity_chain(&a, &p), Err(StratError::HypothesisViolated(_))));
    }

    #[test]
    fn heredity_chain_of_the_example() {
        let (a, p) = sl2("0", "ORDER e < f\n");
        let chain = heredity_chain(&a, &p).unwrap();
        assert_eq!(chain.order, vec![1, 0]);
        let first = &chain.steps[0];
        assert_eq!(first.ideal.dim(), 4);
        assert_eq!(first.copies, 2);
        assert_eq!(first.quotient.dim(), 2);
        assert_eq!(chain.steps[1].quotient.dim(), 0);
    }

    #[test]
    fn arrowless_pair_chain() {
        let pr = parse_presentation_with("VERTICES x y\n", &[]).unwrap();
        let a = complete_rewriting(&pr, 2).unwrap().build_algebra();
        let p = Poset::from_presentation(&pr).unwrap();
        let chain = heredity_chain(&a, &p).unwrap();
        assert!(chain.steps.iter().all(|s| s.ideal.dim() == 1 && s.copies == 1));
    }
}

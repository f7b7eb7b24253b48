//! Jacobson radical and simple modules of a finite-dimensional algebra.
//!
//! The radical is the kernel of the trace form of the left regular
//! representation in characteristic zero. In characteristic `p` the trace
//! form is refined by the functionals `g_i(a) = Tr(L~_a^(p^i)) / p^i mod p`
//! computed on integer lifts, for every `p^i <= dim A`. Either way the
//! result is checked to be a nilpotent two-sided ideal before it is
//! returned.
//!
//! Simple modules are the composition factors of `A / rad A`, obtained by
//! recursively splitting the regular module with eigenspace spinning (and
//! its dual). Irreducibility of each factor is certified by Burnside's
//! criterion or by Norton's test; anything else is reported as unverified.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::AlgebraTable;
use crate::error::AlgebraError;
use crate::linalg::{unit_vector, Matrix, Subspace, Vector};
use crate::module::{is_isomorphic, Module, Side};
use crate::poly::Poly;
use crate::scalar::{Field, Scalar};

const SPLIT_SEED: u64 = 0x051e_90e5;
const RANDOM_CANDIDATES: usize = 24;

/// How irreducibility of a simple module was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplicityProof {
    OneDimensional,
    /// The action matrices span the full matrix algebra, so the module is
    /// absolutely simple.
    Burnside,
    /// An element with a one-dimensional kernel whose kernel vector
    /// generates the module and whose dual kernel vector generates the dual.
    Norton,
    /// No proper submodule was found, but no certificate either.
    Unverified,
}

impl SimplicityProof {
    pub fn is_verified(self) -> bool {
        self != SimplicityProof::Unverified
    }
}

#[derive(Clone, Debug)]
pub struct SimpleModule {
    pub name: String,
    pub module: Module,
    pub support: Vec<usize>,
    /// Number of composition factors of `A / rad A` isomorphic to it.
    pub multiplicity: usize,
    pub proof: SimplicityProof,
}

impl SimpleModule {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

#[derive(Clone, Debug)]
pub struct SimpleList {
    pub radical: Subspace,
    /// Smallest `k` with `rad^k = 0`.
    pub nilpotency_index: usize,
    pub simples: Vec<SimpleModule>,
    /// Whether `A / rad A` is isomorphic to the product of copies of the
    /// ground field indexed by the vertices, via the vertex idempotents.
    pub basic_over_vertices: bool,
}

impl SimpleList {
    pub fn by_name(&self, name: &str) -> Option<&SimpleModule> {
        self.simples.iter().find(|s| s.name == name)
    }

    pub fn all_verified(&self) -> bool {
        self.simples.iter().all(|s| s.proof.is_verified())
    }
}

/// The Jacobson radical as a subspace of `A`.
pub fn radical(algebra: &AlgebraTable) -> Result<Subspace, AlgebraError> {
    let n = algebra.dim();
    let field = algebra.field();
    if n == 0 {
        return Ok(Subspace::zero(field, 0));
    }
    let left: Vec<Matrix> = (0..n).map(|i| algebra.left_mul_matrix(&algebra.basis_vector(i))).collect();
    let traces: Vec<Scalar> = left.iter().map(trace).collect();
    // Trace form T[i][j] = Tr(L_{u_i u_j}).
    let mut form = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            let mut t = field.zero();
            for (c, tr) in algebra.basis_product(i, j).iter().zip(&traces) {
                if !c.is_zero() {
                    t += &(c * tr);
                }
            }
            form.set(i, j, t);
        }
    }
    let mut ideal = Subspace::span(field, n, form.transpose().kernel());
    if let Field::Prime(p) = field {
        let mut level = 1u32;
        while (p as u128).pow(level) <= n as u128 && !ideal.is_zero() {
            ideal = refine_modular(algebra, &ideal, p, level);
            level += 1;
        }
    }
    if !algebra.is_two_sided_ideal(&ideal) {
        return Err(AlgebraError::Invariant("computed radical is not a two-sided ideal".into()));
    }
    if algebra.nilpotency_index(&ideal).is_none() {
        return Err(AlgebraError::Invariant("computed radical is not nilpotent".into()));
    }
    Ok(ideal)
}

fn trace(m: &Matrix) -> Scalar {
    let mut t = m.field().zero();
    for i in 0..m.rows() {
        t += m.get(i, i);
    }
    t
}

/// `{x in I : g_level(x y) = 0 for all basis y}`.
fn refine_modular(algebra: &AlgebraTable, ideal: &Subspace, p: u64, level: u32) -> Subspace {
    let n = algebra.dim();
    let field = algebra.field();
    let modulus = (p as u128).pow(level + 1);
    let exponent = (p as u128).pow(level);
    let basis = ideal.basis();
    // Column k of the constraint matrix holds g(x_k u_j) for all j.
    let cols: Vec<Vector> = basis
        .iter()
        .map(|x| {
            (0..n)
                .map(|j| {
                    let xy = algebra.mul(x, &algebra.basis_vector(j));
                    let lifted = lift(&algebra.left_mul_matrix(&xy));
                    let t = trace_of_power(&lifted, exponent, modulus);
                    debug_assert_eq!(t % exponent, 0);
                    field.int(((t / exponent) % p as u128) as i64)
                })
                .collect()
        })
        .collect();
    let constraints = Matrix::from_columns(field, n, &cols);
    let vectors = constraints.kernel().into_iter().map(|k| {
        let mut v = algebra.zero();
        for (c, b) in k.iter().zip(basis) {
            crate::linalg::axpy(&mut v, c, b);
        }
        v
    });
    Subspace::span(field, n, vectors)
}

fn lift(m: &Matrix) -> Vec<Vec<u128>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| match s {
                    Scalar::Mod(v, _) => *v as u128,
                    Scalar::Rat(_) => unreachable!("lift is only used in positive characteristic"),
                })
                .collect()
        })
        .collect()
}

fn mat_mul_mod(a: &[Vec<u128>], b: &[Vec<u128>], m: u128) -> Vec<Vec<u128>> {
    let n = a.len();
    let mut out = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = (out[i][j] + a[i][k] * b[k][j]) % m;
            }
        }
    }
    out
}

fn trace_of_power(a: &[Vec<u128>], mut e: u128, m: u128) -> u128 {
    let n = a.len();
    let mut acc: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| u128::from(i == j)).collect()).collect();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul_mod(&acc, &base, m);
        }
        base = mat_mul_mod(&base, &base, m);
        e >>= 1;
    }
    (0..n).map(|i| acc[i][i]).sum::<u128>() % m
}

enum Split {
    Proper(Subspace),
    Irreducible(SimplicityProof),
}

fn dual(m: &Module) -> Module {
    Module::new_unchecked(m.field(), m.side(), m.action().iter().map(Matrix::transpose).collect())
}

fn span_dim(m: &Module) -> usize {
    let d = m.dim();
    let flat = m.action().iter().map(|a| (0..d).flat_map(|i| a.row(i).to_vec()).collect());
    Subspace::span(m.field(), d * d, flat).dim()
}

/// Distinct roots of the minimal polynomial of `t`, gathered from the local
/// minimal polynomials of the unit vectors.
fn eigenvalues(t: &Matrix) -> Vec<Scalar> {
    let field = t.field();
    let n = t.rows();
    let mut roots = Vec::new();
    for i in 0..n {
        let mut krylov = vec![unit_vector(field, n, i)];
        let mut span = Subspace::zero(field, n);
        span.insert(&krylov[0]);
        loop {
            let next = t.apply(krylov.last().expect("nonempty"));
            if span.insert(&next) {
                krylov.push(next);
                continue;
            }
            let m = Matrix::from_columns(field, n, &krylov);
            let c = m.solve(&next).expect("dependent vector lies in the span");
            let mut coeffs: Vec<Scalar> = c.iter().map(|x| -x).collect();
            coeffs.push(field.one());
            roots.extend(Poly::new(field, coeffs).roots());
            break;
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn candidates(m: &Module) -> Vec<Matrix> {
    let field = m.field();
    let mut out: Vec<Matrix> = m.action().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    for _ in 0..RANDOM_CANDIDATES {
        let mut t = Matrix::zeros(field, m.dim(), m.dim());
        for a in m.action() {
            t.add_scaled(&field.int(rng.gen_range(-5..=5)), a);
        }
        out.push(t);
    }
    let k = m.action().len().min(6);
    for i in 0..k {
        for j in 0..k {
            out.push(m.action()[i].mul(&m.action()[j]));
        }
    }
    out
}

fn split(m: &Module) -> Result<Split, AlgebraError> {
    let d = m.dim();
    if d == 1 {
        return Ok(Split::Irreducible(SimplicityProof::OneDimensional));
    }
    if span_dim(m) == d * d {
        return Ok(Split::Irreducible(SimplicityProof::Burnside));
    }
    let field = m.field();
    let dual = dual(m);
    let identity = Matrix::identity(field, d);
    for t in candidates(m) {
        for lambda in eigenvalues(&t) {
            let shifted = t.sub(&identity.scale(&lambda));
            if shifted.is_zero() {
                continue;
            }
            let kernel = shifted.kernel();
            let mut all_generate = true;
            for v in &kernel {
                let s = m.closure(std::slice::from_ref(v))?;
                if !s.is_full() {
                    return Ok(Split::Proper(s));
                }
            }
            let co_kernel = shifted.transpose().kernel();
            for w in &co_kernel {
                let s = dual.closure(std::slice::from_ref(w))?;
                if !s.is_full() {
                    let annihilator = Matrix::from_rows(field, d, s.basis());
                    return Ok(Split::Proper(Subspace::span(field, d, annihilator.kernel())));
                }
            }
            all_generate &= kernel.len() == 1;
            if all_generate {
                return Ok(Split::Irreducible(SimplicityProof::Norton));
            }
        }
    }
    Ok(Split::Irreducible(SimplicityProof::Unverified))
}

fn composition_factors(m: &Module, out: &mut Vec<(Module, SimplicityProof)>) -> Result<(), AlgebraError> {
    if m.is_zero() {
        return Ok(());
    }
    match split(m)? {
        Split::Irreducible(proof) => out.push((m.clone(), proof)),
        Split::Proper(sub) => {
            let (s, _) = m.submodule(&sub)?;
            let (q, _) = m.quotient(&sub)?;
            composition_factors(&s, out)?;
            composition_factors(&q, out)?;
        }
    }
    Ok(())
}

/// Radical, simple modules and the vertex-basic verdict.
pub fn radical_and_simples(algebra: &AlgebraTable) -> Result<SimpleList, AlgebraError> {
    let rad = radical(algebra)?;
    let nilpotency_index = algebra.nilpotency_index(&rad).expect("radical is verified nilpotent");
    let (top, _) = Module::regular(algebra).quotient(&rad)?;
    let mut factors = Vec::new();
    composition_factors(&top, &mut factors)?;

    let mut groups: Vec<(Module, SimplicityProof, usize)> = Vec::new();
    'factor: for (f, proof) in factors {
        for g in groups.iter_mut() {
            if is_isomorphic(algebra, &g.0, &f)?.is_isomorphic() {
                g.2 += 1;
                continue 'factor;
            }
        }
        groups.push((f, proof, 1));
    }
    let mut simples: Vec<SimpleModule> = groups
        .into_iter()
        .map(|(module, proof, multiplicity)| SimpleModule {
            name: String::new(),
            support: module.support(algebra),
            module,
            multiplicity,
            proof,
        })
        .collect();
    simples.sort_by(|a, b| a.support.cmp(&b.support).then(a.dim().cmp(&b.dim())));
    name_simples(algebra, &mut simples);

    let vertices = algebra.vertices().len();
    let basic_over_vertices = simples.len() == vertices
        && algebra.dim() - rad.dim() == vertices
        && simples.iter().all(|s| s.dim() == 1 && s.support.len() == 1);
    Ok(SimpleList {
        radical: rad,
        nilpotency_index,
        simples,
        basic_over_vertices,
    })
}

fn name_simples(algebra: &AlgebraTable, simples: &mut [SimpleModule]) {
    let base: Vec<String> = simples
        .iter()
        .map(|s| {
            let names: Vec<&str> = s.support.iter().map(|&x| algebra.vertices()[x].as_str()).collect();
            format!("S_{}", names.join("+"))
        })
        .collect();
    let mut seen = std::collections::BTreeMap::<String, usize>::new();
    for (s, b) in simples.iter_mut().zip(&base) {
        let total = base.iter().filter(|x| *x == b).count();
        if total == 1 {
            s.name = b.clone();
        } else {
            let k = seen.entry(b.clone()).or_insert(0);
            *k += 1;
            s.name = format!("{b}.{k}");
        }
    }
}

/// Left modules only: inflation of a simple over a quotient algebra along
/// its projection matrix.
pub fn inflate(module: &Module, projection: &Matrix) -> Module {
    debug_assert_eq!(module.side(), Side::Left);
    module.pull_back(projection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation_with;
    use crate::rewriting::complete_rewriting;

    const SL2: &str = "PARAM z = 0\nVERTICES e f\nARROW a : e -> f\nARROW b : e -> e\nARROW c : f -> e\n\
REL a*b\nREL b*c\nREL a*c - z*f\nREL b*b + c*a - z*e\n";

    fn sl2(field: &str, z: &str) -> AlgebraTable {
        let text = format!("FIELD {field}\n{SL2}");
        let p = parse_presentation_with(&text, &[("z".into(), z.into())]).unwrap();
        complete_rewriting(&p, 6).unwrap().build_algebra()
    }

    fn labels(a: &AlgebraTable, s: &Subspace) -> Vec<String> {
        s.basis().iter().map(|v| a.label_of(v)).collect()
    }

    #[test]
    fn radical_at_z_zero() {
        for field in ["rational", "prime 2", "prime 3", "prime 7"] {
            let a = sl2(field, "0");
            let list = radical_and_simples(&a).unwrap();
            assert_eq!(labels(&a, &list.radical), ["a", "b", "c", "b^2"], "{field}");
            assert_eq!(list.nilpotency_index, 3);
            let names: Vec<&str> = list.simples.iter().map(|s| s.name.as_str()).collect();
            assert_eq!(names, ["S_e", "S_f"]);
            assert!(list.basic_over_vertices);
            assert!(list.all_verified());
        }
    }

    #[test]
    fn z_one_is_not_basic() {
        let a = sl2("rational", "1");
        let list = radical_and_simples(&a).unwrap();
        assert!(!list.basic_over_vertices);
        assert!(list.all_verified());
        let dims: usize = list.simples.iter().map(|s| s.dim() * s.multiplicity).sum();
        assert_eq!(dims, a.dim() - list.radical.dim());
    }

    #[test]
    fn semisimple_pair_has_zero_radical() {
        let p = parse_presentation_with("VERTICES x y\n", &[]).unwrap();
        let a = complete_rewriting(&p, 2).unwrap().build_algebra();
        let list = radical_and_simples(&a).unwrap();
        assert!(list.radical.is_zero());
        assert_eq!(list.nilpotency_index, 0);
        assert!(list.basic_over_vertices);
    }

    #[test]
    fn matrix_algebra_simple_is_two_dimensional() {
        // Path algebra of x <-> y with both round trips equal to the
        // vertex: this is M_2(K), a single simple of dimension 2.
        let p = parse_presentation_with(
            "VERTICES x y\nARROW s : x -> y\nARROW t : y -> x\nREL t*s - x\nREL s*t - y\n",
            &[],
        )
        .unwrap();
        let a = complete_rewriting(&p, 4).unwrap().build_algebra();
        assert_eq!(a.dim(), 4);
        let list = radical_and_simples(&a).unwrap();
        assert!(list.radical.is_zero());
        assert_eq!(list.simples.len(), 1);
        assert_eq!(list.simples[0].dim(), 2);
        assert_eq!(list.simples[0].multiplicity, 2);
        assert_eq!(list.simples[0].name, "S_x+y");
        assert!(!list.basic_over_vertices);
    }

    #[test]
    fn modular_radical_of_group_algebra() {
        // K[x]/(x^2 - 1) over F_2 is K[x]/((x-1)^2): radical spanned by 1 + x.
        let p = parse_presentation_with(
            "FIELD prime 2\nVERTICES o\nARROW x : o -> o\nREL x*x - o\n",
            &[],
        )
        .unwrap();
        let a = complete_rewriting(&p, 4).unwrap().build_algebra();
        let rad = radical(&a).unwrap();
        assert_eq!(rad.dim(), 1);
        // Over F_3 the same algebra is semisimple with two simples.
        let p3 = parse_presentation_with(
            "FIELD prime 3\nVERTICES o\nARROW x : o -> o\nREL x*x - o\n",
            &[],
        )
        .unwrap();
        let a3 = complete_rewriting(&p3, 4).unwrap().build_algebra();
        let list = radical_and_simples(&a3).unwrap();
        assert!(list.radical.is_zero());
        let names: Vec<&str> = list.simples.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["S_o.1", "S_o.2"]);
    }
}

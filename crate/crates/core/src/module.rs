//! Finite-dimensional modules given by one action matrix per basis element
//! of the algebra, and maps between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::AlgebraTable;
use crate::error::AlgebraError;
use crate::linalg::{axpy, is_zero_vector, zero_vector, Matrix, Subspace, Vector};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    /// A right module, realized as a left module over the opposite table.
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    side: Side,
    field: Field,
    dim: usize,
    action: Vec<Matrix>,
}

/// A linear map between modules, `matrix` of size `dim target x dim source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub matrix: Matrix,
}

impl ModuleMap {
    pub fn new(matrix: Matrix) -> ModuleMap {
        ModuleMap { matrix }
    }

    pub fn identity(m: &Module) -> ModuleMap {
        ModuleMap::new(Matrix::identity(m.field, m.dim))
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        self.matrix.apply(v)
    }

    pub fn compose(&self, first: &ModuleMap) -> ModuleMap {
        ModuleMap::new(self.matrix.mul(&first.matrix))
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Checks `phi(u v) = u phi(v)` for every algebra basis element.
    pub fn intertwines(&self, source: &Module, target: &Module) -> bool {
        self.matrix.rows() == target.dim
            && self.matrix.cols() == source.dim
            && source
                .action
                .iter()
                .zip(&target.action)
                .all(|(s, t)| self.matrix.mul(s) == t.mul(&self.matrix))
    }
}

/// Outcome of an isomorphism test.
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    Isomorphic(ModuleMap),
    /// Decided exactly; the string is the certificate.
    NotIsomorphic(String),
    /// Randomized search failed and the exact check was out of reach.
    NoWitnessFound,
}

impl IsoVerdict {
    pub fn witness(&self) -> Option<&ModuleMap> {
        match self {
            IsoVerdict::Isomorphic(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }
}

/// Largest hom space on which isomorphism is decided exhaustively.
pub const EXACT_ISO_HOM_DIM: usize = 6;
const EXACT_ISO_GRID_CAP: u64 = 200_000;
const RANDOM_ISO_TRIES: usize = 24;
const ISO_SEED: u64 = 0x5eed_1507;

impl Module {
    /// Builds a module and checks the homomorphism property exhaustively.
    pub fn new(algebra: &AlgebraTable, side: Side, action: Vec<Matrix>) -> Result<Module, AlgebraError> {
        let m = Module::new_unchecked(algebra.field(), side, action);
        if m.action.len() != algebra.dim() {
            return Err(AlgebraError::Incompatible);
        }
        m.verify(algebra)?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(field: Field, side: Side, action: Vec<Matrix>) -> Module {
        let dim = action.first().map(Matrix::rows).unwrap_or(0);
        Module {
            side,
            field,
            dim,
            action,
        }
    }

    /// The zero module over `algebra`.
    pub fn zero(algebra: &AlgebraTable, side: Side) -> Module {
        Module {
            side,
            field: algebra.field(),
            dim: 0,
            action: vec![Matrix::zeros(algebra.field(), 0, 0); algebra.dim()],
        }
    }

    /// Checks that `u_i u_j` acts as the product of actions and that the
    /// unit acts as the identity.
    pub fn verify(&self, algebra: &AlgebraTable) -> Result<(), AlgebraError> {
        let n = algebra.dim();
        if self.action.len() != n {
            return Err(AlgebraError::Incompatible);
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = self.action[i].mul(&self.action[j]);
                let rhs = self.act(algebra.basis_product(i, j));
                if lhs != rhs {
                    return Err(AlgebraError::Invariant(format!(
                        "action of {} {} is not multiplicative",
                        algebra.labels()[i],
                        algebra.labels()[j]
                    )));
                }
            }
        }
        if self.act(&algebra.one()) != Matrix::identity(self.field, self.dim) {
            return Err(AlgebraError::Invariant("unit does not act as identity".into()));
        }
        Ok(())
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    /// Action matrix of an arbitrary algebra element.
    pub fn act(&self, x: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for (c, a) in x.iter().zip(&self.action) {
            if !c.is_zero() {
                m.add_scaled(c, a);
            }
        }
        m
    }

    pub fn act_on(&self, x: &[Scalar], v: &[Scalar]) -> Vector {
        let mut out = zero_vector(self.field, self.dim);
        for (c, a) in x.iter().zip(&self.action) {
            if !c.is_zero() {
                axpy(&mut out, c, &a.apply(v));
            }
        }
        out
    }

    /// The left ideal `A e` as a left module (the regular projective at a
    /// vertex when `e` is a vertex idempotent).
    pub fn left_ideal(algebra: &AlgebraTable, generator: &[Scalar]) -> (Module, Subspace) {
        let n = algebra.dim();
        let span = Subspace::span(
            algebra.field(),
            n,
            (0..n).map(|i| algebra.mul(&algebra.basis_vector(i), generator)),
        );
        let regular = Module::regular(algebra);
        (regular.restrict_unchecked(&span), span)
    }

    /// `A` acting on itself by left multiplication.
    pub fn regular(algebra: &AlgebraTable) -> Module {
        let action = (0..algebra.dim())
            .map(|i| algebra.left_mul_matrix(&algebra.basis_vector(i)))
            .collect();
        Module::new_unchecked(algebra.field(), Side::Left, action)
    }

    /// `A e_x`.
    pub fn regular_projective(algebra: &AlgebraTable, x: usize) -> Module {
        Module::left_ideal(algebra, algebra.idempotent(x)).0
    }

    /// Restricts the action to a stable subspace, on its echelon basis.
    fn restrict_unchecked(&self, sub: &Subspace) -> Module {
        let basis = sub.basis();
        let action = self
            .action
            .iter()
            .map(|a| {
                let cols: Vec<Vector> = basis
                    .iter()
                    .map(|b| sub.coordinates(&a.apply(b)).expect("subspace is stable"))
                    .collect();
                Matrix::from_columns(self.field, sub.dim(), &cols)
            })
            .collect();
        Module {
            side: self.side,
            field: self.field,
            dim: sub.dim(),
            action,
        }
    }

    pub fn is_stable(&self, sub: &Subspace) -> bool {
        sub.basis()
            .iter()
            .all(|b| self.action.iter().all(|a| sub.contains(&a.apply(b))))
    }

    /// A stable subspace as a module, with its inclusion map.
    pub fn submodule(&self, sub: &Subspace) -> Result<(Module, ModuleMap), AlgebraError> {
        if sub.ambient() != self.dim {
            return Err(AlgebraError::VectorOutOfSpace);
        }
        if !self.is_stable(sub) {
            return Err(AlgebraError::NotStable);
        }
        let inclusion = Matrix::from_columns(self.field, self.dim, sub.basis());
        Ok((self.restrict_unchecked(sub), ModuleMap::new(inclusion)))
    }

    /// Smallest stable subspace containing `vectors`.
    pub fn closure(&self, vectors: &[Vector]) -> Result<Subspace, AlgebraError> {
        let mut sub = Subspace::zero(self.field, self.dim);
        let mut queue: Vec<Vector> = Vec::new();
        for v in vectors {
            if v.len() != self.dim {
                return Err(AlgebraError::VectorOutOfSpace);
            }
            if sub.insert(v) {
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for a in &self.action {
                let w = a.apply(&v);
                if sub.insert(&w) {
                    queue.push(w);
                }
            }
        }
        Ok(sub)
    }

    /// Submodule generated by `vectors`, with inclusion.
    pub fn submodule_generated(&self, vectors: &[Vector]) -> Result<(Module, ModuleMap, Subspace), AlgebraError> {
        let sub = self.closure(vectors)?;
        let (m, inc) = self.submodule(&sub)?;
        Ok((m, inc, sub))
    }

    /// `V / S` on the complement coordinates of `S`, with the projection.
    pub fn quotient(&self, sub: &Subspace) -> Result<(Module, ModuleMap), AlgebraError> {
        if sub.ambient() != self.dim {
            return Err(AlgebraError::VectorOutOfSpace);
        }
        if !self.is_stable(sub) {
            return Err(AlgebraError::NotStable);
        }
        let keep = sub.complement_coordinates();
        let project = |v: &[Scalar]| -> Vector {
            let r = sub.reduce(v);
            keep.iter().map(|&i| r[i].clone()).collect()
        };
        let action = self
            .action
            .iter()
            .map(|a| {
                let cols: Vec<Vector> = keep.iter().map(|&i| project(&a.column(i))).collect();
                Matrix::from_columns(self.field, keep.len(), &cols)
            })
            .collect::<Vec<_>>();
        let proj_cols: Vec<Vector> = (0..self.dim)
            .map(|i| {
                let mut e = zero_vector(self.field, self.dim);
                e[i] = self.field.one();
                project(&e)
            })
            .collect();
        let quotient = Module {
            side: self.side,
            field: self.field,
            dim: keep.len(),
            action,
        };
        Ok((quotient, ModuleMap::new(Matrix::from_columns(self.field, keep.len(), &proj_cols))))
    }

    /// Direct sum of several modules over the same algebra and side, built
    /// in one pass. `first` fixes the algebra and side when `parts` is
    /// empty.
    pub fn direct_sum_all(first: &Module, parts: &[&Module]) -> Module {
        let total: usize = parts.iter().map(|m| m.dim).sum();
        let action = (0..first.action.len())
            .map(|u| {
                let mut big = Matrix::zeros(first.field, total, total);
                let mut offset = 0;
                for m in parts {
                    let block = &m.action[u];
                    for i in 0..m.dim {
                        for j in 0..m.dim {
                            let v = block.get(i, j);
                            if !v.is_zero() {
                                big.set(offset + i, offset + j, v.clone());
                            }
                        }
                    }
                    offset += m.dim;
                }
                big
            })
            .collect();
        Module {
            side: first.side,
            field: first.field,
            dim: total,
            action,
        }
    }

    pub fn direct_sum(&self, other: &Module) -> Module {
        assert_eq!(self.action.len(), other.action.len());
        Module {
            side: self.side,
            field: self.field,
            dim: self.dim + other.dim,
            action: self
                .action
                .iter()
                .zip(&other.action)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        }
    }

    pub fn power(&self, k: usize) -> Module {
        let mut out = Module {
            side: self.side,
            field: self.field,
            dim: 0,
            action: vec![Matrix::zeros(self.field, 0, 0); self.action.len()],
        };
        for _ in 0..k {
            out = out.direct_sum(self);
        }
        out
    }

    /// Pulls a module back along an algebra map given by its matrix
    /// (`dim target algebra x dim source algebra`).
    pub fn pull_back(&self, map: &Matrix) -> Module {
        let action = (0..map.cols()).map(|i| self.act(&map.column(i))).collect();
        Module {
            side: self.side,
            field: self.field,
            dim: self.dim,
            action,
        }
    }

    /// `x -> sigma(x)^T` on the dual space: the contravariant transport of
    /// a module along an anti-involution.
    pub fn twisted_dual(&self, sigma: &Matrix) -> Module {
        let action = (0..sigma.cols())
            .map(|i| self.act(&sigma.column(i)).transpose())
            .collect();
        Module {
            side: self.side,
            field: self.field,
            dim: self.dim,
            action,
        }
    }

    /// `e_x V` as a subspace.
    pub fn idempotent_image(&self, e: &[Scalar]) -> Subspace {
        let m = self.act(e);
        Subspace::span(self.field, self.dim, m.columns())
    }

    /// Vertices `x` with `e_x V != 0`.
    pub fn support(&self, algebra: &AlgebraTable) -> Vec<usize> {
        (0..algebra.vertices().len())
            .filter(|&x| !self.act(algebra.idempotent(x)).is_zero())
            .collect()
    }

    pub fn support_names(&self, algebra: &AlgebraTable) -> Vec<String> {
        self.support(algebra)
            .into_iter()
            .map(|x| algebra.vertices()[x].clone())
            .collect()
    }

    /// Checks that a subspace of the algebra acts as zero.
    pub fn annihilated_by(&self, ideal: &Subspace) -> bool {
        ideal.basis().iter().all(|v| self.act(v).is_zero())
    }
}

/// Basis of `Hom_A(V, W)`.
pub fn hom_space(v: &Module, w: &Module) -> Result<Vec<ModuleMap>, AlgebraError> {
    if v.side != w.side || v.action.len() != w.action.len() || v.field != w.field {
        return Err(AlgebraError::Incompatible);
    }
    let (dv, dw) = (v.dim, w.dim);
    let field = v.field;
    if dv == 0 || dw == 0 {
        return Ok(Vec::new());
    }
    let unknowns = dv * dw;
    // X is dw x dv, unknown index r * dv + s. Solve incrementally so the
    // system stays small: restrict the candidate space generator by
    // generator.
    let mut basis: Vec<Vector> = (0..unknowns)
        .map(|i| {
            let mut e = zero_vector(field, unknowns);
            e[i] = field.one();
            e
        })
        .collect();
    for (av, aw) in v.action.iter().zip(&w.action) {
        if basis.is_empty() {
            break;
        }
        // Residual of each candidate basis element: aw X - X av.
        let residuals: Vec<Vector> = basis
            .iter()
            .map(|x| {
                let xm = Matrix::from_rows(field, dv, &x.chunks(dv).map(<[Scalar]>::to_vec).collect::<Vec<_>>());
                let r = aw.mul(&xm).sub(&xm.mul(av));
                (0..dw).flat_map(|i| r.row(i).to_vec()).collect()
            })
            .collect();
        let m = Matrix::from_columns(field, unknowns, &residuals);
        let kernel = m.kernel();
        basis = kernel
            .iter()
            .map(|k| {
                let mut x = zero_vector(field, unknowns);
                for (c, b) in k.iter().zip(&basis) {
                    axpy(&mut x, c, b);
                }
                x
            })
            .collect();
    }
    Ok(basis
        .into_iter()
        .map(|x| {
            let rows: Vec<Vector> = x.chunks(dv).map(<[Scalar]>::to_vec).collect();
            ModuleMap::new(Matrix::from_rows(field, dv, &rows))
        })
        .collect())
}

fn combination(maps: &[ModuleMap], coeffs: &[Scalar]) -> Matrix {
    let mut m = Matrix::zeros(maps[0].matrix.field(), maps[0].matrix.rows(), maps[0].matrix.cols());
    for (c, h) in coeffs.iter().zip(maps) {
        if !c.is_zero() {
            m.add_scaled(c, &h.matrix);
        }
    }
    m
}

/// Decides whether `v` and `w` are isomorphic, returning a witness when
/// they are.
///
/// Hom basis elements are tried first, then seeded random combinations.
/// When the hom space has dimension at most [`EXACT_ISO_HOM_DIM`], the
/// determinant polynomial on the hom space is evaluated on a grid large
/// enough to detect any nonzero polynomial of its degree, which decides
/// the question exactly.
pub fn is_isomorphic(algebra: &AlgebraTable, v: &Module, w: &Module) -> Result<IsoVerdict, AlgebraError> {
    if v.side != w.side || v.action.len() != w.action.len() {
        return Err(AlgebraError::Incompatible);
    }
    if v.dim != w.dim {
        return Ok(IsoVerdict::NotIsomorphic(format!("dimensions differ ({} vs {})", v.dim, w.dim)));
    }
    if v.dim == 0 {
        return Ok(IsoVerdict::Isomorphic(ModuleMap::new(Matrix::zeros(v.field, 0, 0))));
    }
    for (x, e) in algebra.idempotents().iter().enumerate() {
        let (a, b) = (v.act(e).rank(), w.act(e).rank());
        if a != b {
            return Ok(IsoVerdict::NotIsomorphic(format!(
                "dim e_{} differs ({a} vs {b})",
                algebra.vertices()[x]
            )));
        }
    }
    let homs = hom_space(v, w)?;
    if homs.is_empty() {
        return Ok(IsoVerdict::NotIsomorphic("no nonzero homomorphism".into()));
    }
    for h in &homs {
        if h.matrix.is_invertible() {
            return Ok(IsoVerdict::Isomorphic(h.clone()));
        }
    }
    let field = v.field;
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    for _ in 0..RANDOM_ISO_TRIES {
        let coeffs: Vec<Scalar> = homs.iter().map(|_| field.int(rng.gen_range(-7..=7))).collect();
        let m = combination(&homs, &coeffs);
        if m.is_invertible() {
            return Ok(IsoVerdict::Isomorphic(ModuleMap::new(m)));
        }
    }
    if homs.len() > EXACT_ISO_HOM_DIM {
        return Ok(IsoVerdict::NoWitnessFound);
    }
    // det(sum t_i H_i) has degree <= dim in each variable; a grid with dim+1
    // values per variable detects it, or all of F_p when p is smaller.
    let per_var = match field.size() {
        Some(p) if p <= v.dim as u64 + 1 => p,
        _ => v.dim as u64 + 1,
    };
    let points = (per_var as u128).pow(homs.len() as u32);
    if points > EXACT_ISO_GRID_CAP as u128 {
        return Ok(IsoVerdict::NoWitnessFound);
    }
    let mut idx = vec![0u64; homs.len()];
    loop {
        let coeffs: Vec<Scalar> = idx.iter().map(|&i| field.int(i as i64)).collect();
        let m = combination(&homs, &coeffs);
        if m.is_invertible() {
            return Ok(IsoVerdict::Isomorphic(ModuleMap::new(m)));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(IsoVerdict::NotIsomorphic(format!(
                    "no invertible map in the {}-dimensional hom space (exhaustive grid)",
                    homs.len()
                )));
            }
            idx[k] += 1;
            if idx[k] < per_var {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Injective map check plus intertwining, used by certificate verifiers.
pub fn is_injective_hom(map: &ModuleMap, source: &Module, target: &Module) -> bool {
    map.intertwines(source, target) && map.rank() == source.dim()
}

pub fn image_subspace(map: &ModuleMap) -> Subspace {
    Subspace::span(map.matrix.field(), map.matrix.rows(), map.matrix.columns())
}

pub fn kernel_subspace(map: &ModuleMap) -> Subspace {
    Subspace::span(map.matrix.field(), map.matrix.cols(), map.matrix.kernel())
}

pub fn vector_is_zero(v: &[Scalar]) -> bool {
    is_zero_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation_with;
    use crate::rewriting::complete_rewriting;

    const SL2: &str = "PARAM z = 0\nVERTICES e f\nARROW a : e -> f\nARROW b : e -> e\nARROW c : f -> e\n\
REL a*b\nREL b*c\nREL a*c - z*f\nREL b*b + c*a - z*e\n";

    fn sl2(z: &str) -> AlgebraTable {
        let p = parse_presentation_with(SL2, &[("z".into(), z.into())]).unwrap();
        complete_rewriting(&p, 6).unwrap().build_algebra()
    }

    fn label_index(a: &AlgebraTable, l: &str) -> usize {
        a.labels().iter().position(|x| x == l).unwrap()
    }

    #[test]
    fn regular_projectives_have_expected_dimensions() {
        let a = sl2("0");
        let pe = Module::regular_projective(&a, 0);
        let pf = Module::regular_projective(&a, 1);
        assert_eq!(pe.dim(), 4);
        assert_eq!(pf.dim(), 2);
        pe.verify(&a).unwrap();
        pf.verify(&a).unwrap();
        assert_eq!(pf.support(&a), vec![0, 1]);
    }

    #[test]
    fn submodule_generated_by_a_in_ae() {
        let a = sl2("0");
        let (pe, span) = Module::left_ideal(&a, a.idempotent(0));
        let arrow_a = a.basis_vector(label_index(&a, "a"));
        let coords = span.coordinates(&arrow_a).unwrap();
        let (sub, inc, _) = pe.submodule_generated(&[coords]).unwrap();
        assert_eq!(sub.dim(), 2);
        assert!(inc.intertwines(&sub, &pe));
        let (quot, proj) = pe.quotient(&image_subspace(&inc)).unwrap();
        assert_eq!(quot.dim(), 2);
        assert!(proj.intertwines(&pe, &quot));
        quot.verify(&a).unwrap();
        assert_eq!(quot.support(&a), vec![0]);
    }

    #[test]
    fn trivial_submodules_and_quotients() {
        let a = sl2("0");
        let pe = Module::regular_projective(&a, 0);
        let (zero, _, _) = pe.submodule_generated(&[]).unwrap();
        assert_eq!(zero.dim(), 0);
        let all: Vec<Vector> = (0..4).map(|i| crate::linalg::unit_vector(a.field(), 4, i)).collect();
        let (full, inc, sub) = pe.submodule_generated(&all).unwrap();
        assert_eq!(full.dim(), 4);
        assert!(inc.matrix.is_invertible());
        let (q, _) = pe.quotient(&sub).unwrap();
        assert_eq!(q.dim(), 0);
        let (same, _) = pe.quotient(&Subspace::zero(a.field(), 4)).unwrap();
        assert!(is_isomorphic(&a, &same, &pe).unwrap().is_isomorphic());
    }

    #[test]
    fn quotient_rejects_unstable_subspace() {
        let a = sl2("0");
        let (pe, span) = Module::left_ideal(&a, a.idempotent(0));
        let e = span.coordinates(a.idempotent(0)).unwrap();
        let s = Subspace::span(a.field(), 4, vec![e]);
        assert!(matches!(pe.quotient(&s), Err(AlgebraError::NotStable)));
    }

    #[test]
    fn hom_from_projective_counts_idempotent_image() {
        let a = sl2("0");
        let modules = [Module::regular_projective(&a, 0), Module::regular_projective(&a, 1), Module::regular(&a)];
        for x in 0..2 {
            let p = Module::regular_projective(&a, x);
            for w in &modules {
                let homs = hom_space(&p, w).unwrap();
                assert_eq!(homs.len(), w.act(a.idempotent(x)).rank());
                assert!(homs.iter().all(|h| h.intertwines(&p, w)));
            }
        }
    }

    #[test]
    fn isomorphism_tests() {
        let a = sl2("0");
        let pe = Module::regular_projective(&a, 0);
        let pf = Module::regular_projective(&a, 1);
        assert!(is_isomorphic(&a, &pe, &pe).unwrap().is_isomorphic());
        assert!(matches!(is_isomorphic(&a, &pe, &pf).unwrap(), IsoVerdict::NotIsomorphic(_)));
        // Twisting by a non-trivial automorphism of the module keeps the class.
        let doubled = pf.power(2);
        let w = is_isomorphic(&a, &doubled, &pf.direct_sum(&pf)).unwrap();
        assert!(w.witness().unwrap().intertwines(&doubled, &pf.direct_sum(&pf)));
    }
}

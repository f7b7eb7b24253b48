//! Finite-dimensional algebras given by structure constants.

use crate::error::AlgebraError;
use crate::linalg::{axpy, is_zero_vector, unit_vector, zero_vector, Matrix, Subspace, Vector};
use crate::scalar::{Field, Scalar};

/// An associative unital algebra with basis `u_0..u_{n-1}` and products
/// `u_i u_j = sum_k c_{ij}^k u_k`, together with a vertex-indexed family of
/// orthogonal idempotents summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTable {
    field: Field,
    labels: Vec<String>,
    /// `products[i * dim + j]` is the coordinate vector of `u_i u_j`.
    products: Vec<Vector>,
    vertices: Vec<String>,
    idempotents: Vec<Vector>,
}

impl AlgebraTable {
    pub fn new(
        field: Field,
        labels: Vec<String>,
        products: Vec<Vector>,
        vertices: Vec<String>,
        idempotents: Vec<Vector>,
    ) -> AlgebraTable {
        let n = labels.len();
        assert_eq!(products.len(), n * n, "structure constants must be dim x dim");
        assert!(products.iter().all(|v| v.len() == n));
        assert_eq!(vertices.len(), idempotents.len());
        AlgebraTable {
            field,
            labels,
            products,
            vertices,
            idempotents,
        }
    }

    /// The zero ring, with no vertices.
    pub fn zero_ring(field: Field) -> AlgebraTable {
        AlgebraTable::new(field, Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, AlgebraError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| AlgebraError::UnknownVertex(name.to_string()))
    }

    pub fn idempotent(&self, x: usize) -> &Vector {
        &self.idempotents[x]
    }

    pub fn idempotents(&self) -> &[Vector] {
        &self.idempotents
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &Vector {
        &self.products[i * self.dim() + j]
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        unit_vector(self.field, self.dim(), i)
    }

    pub fn zero(&self) -> Vector {
        zero_vector(self.field, self.dim())
    }

    pub fn one(&self) -> Vector {
        let mut v = self.zero();
        for e in &self.idempotents {
            axpy(&mut v, &self.field.one(), e);
        }
        v
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let n = self.dim();
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                axpy(&mut out, &(a * b), &self.products[i * n + j]);
            }
        }
        out
    }

    /// Matrix of `y -> x y`.
    pub fn left_mul_matrix(&self, x: &[Scalar]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.mul(x, &self.basis_vector(j))).collect();
        Matrix::from_columns(self.field, n, &cols)
    }

    /// Matrix of `y -> y x`.
    pub fn right_mul_matrix(&self, x: &[Scalar]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.mul(&self.basis_vector(j), x)).collect();
        Matrix::from_columns(self.field, n, &cols)
    }

    pub fn label_of(&self, v: &[Scalar]) -> String {
        let mut parts = Vec::new();
        for (c, l) in v.iter().zip(&self.labels) {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(l.clone());
            } else {
                parts.push(format!("{c}*{l}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Checks `(u v) w = u (v w)` on every basis triple. Returns the first
    /// failing triple.
    pub fn check_associativity(&self) -> Result<(), (usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = &self.products[i * n + j];
                for k in 0..n {
                    let left = self.mul(ij, &self.basis_vector(k));
                    let right = self.mul(&self.basis_vector(i), &self.products[j * n + k]);
                    if left != right {
                        return Err((i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that the idempotents are orthogonal, sum to one, and that the
    /// sum acts as a two-sided identity.
    pub fn check_idempotents(&self) -> Result<(), AlgebraError> {
        let one = self.one();
        for i in 0..self.dim() {
            let u = self.basis_vector(i);
            if self.mul(&one, &u) != u || self.mul(&u, &one) != u {
                return Err(AlgebraError::Invariant(format!(
                    "sum of idempotents does not act as identity on {}",
                    self.labels[i]
                )));
            }
        }
        for (x, ex) in self.idempotents.iter().enumerate() {
            for (y, ey) in self.idempotents.iter().enumerate() {
                let p = self.mul(ex, ey);
                let expected = if x == y { ex.clone() } else { self.zero() };
                if p != expected {
                    return Err(AlgebraError::Invariant(format!(
                        "e_{} e_{} is not {}",
                        self.vertices[x],
                        self.vertices[y],
                        if x == y { "idempotent" } else { "zero" }
                    )));
                }
            }
        }
        Ok(())
    }

    /// Basis of the Peirce block `e_x A e_y`.
    pub fn peirce_block(&self, x: usize, y: usize) -> Subspace {
        let ex = &self.idempotents[x];
        let ey = &self.idempotents[y];
        let vectors = (0..self.dim()).map(|i| {
            let u = self.basis_vector(i);
            self.mul(&self.mul(ex, &u), ey)
        });
        Subspace::span(self.field, self.dim(), vectors)
    }

    /// Basis elements lying in `e_x A e_y`, when the basis is adapted to the
    /// Peirce decomposition (e.g. a path basis).
    pub fn peirce_basis_elements(&self, x: usize, y: usize) -> Vec<usize> {
        let ex = &self.idempotents[x];
        let ey = &self.idempotents[y];
        (0..self.dim())
            .filter(|&i| {
                let u = self.basis_vector(i);
                self.mul(&self.mul(ex, &u), ey) == u
            })
            .collect()
    }

    /// The subspace `A S A` for a subset `S`.
    pub fn two_sided_ideal(&self, generators: &[Vector]) -> Subspace {
        let n = self.dim();
        let mut vectors = Vec::new();
        for g in generators {
            for i in 0..n {
                let ug = self.mul(&self.basis_vector(i), g);
                for j in 0..n {
                    vectors.push(self.mul(&ug, &self.basis_vector(j)));
                }
            }
        }
        Subspace::span(self.field, n, vectors)
    }

    pub fn is_two_sided_ideal(&self, s: &Subspace) -> bool {
        s.basis().iter().all(|v| {
            (0..self.dim()).all(|i| {
                let u = self.basis_vector(i);
                s.contains(&self.mul(&u, v)) && s.contains(&self.mul(v, &u))
            })
        })
    }

    /// Product subspace `S T = span{s t}`.
    pub fn product_space(&self, s: &Subspace, t: &Subspace) -> Subspace {
        let vectors = s
            .basis()
            .iter()
            .flat_map(|a| t.basis().iter().map(move |b| (a, b)))
            .map(|(a, b)| self.mul(a, b))
            .collect::<Vec<_>>();
        Subspace::span(self.field, self.dim(), vectors)
    }

    /// Quotient by a two-sided ideal. Returns the table and the matrix of the
    /// projection. Quotient basis elements are the cosets of the original
    /// basis elements not used as pivots of `ideal` (the smallest ones).
    /// Vertices whose idempotent dies are dropped.
    pub fn quotient(&self, ideal: &Subspace) -> Result<(AlgebraTable, Matrix), AlgebraError> {
        if !self.is_two_sided_ideal(ideal) {
            return Err(AlgebraError::NotStable);
        }
        let keep = ideal.complement_coordinates();
        let m = keep.len();
        let project = |v: &[Scalar]| -> Vector {
            let r = ideal.reduce(v);
            keep.iter().map(|&i| r[i].clone()).collect()
        };
        let mut products = Vec::with_capacity(m * m);
        for &i in &keep {
            for &j in &keep {
                products.push(project(self.basis_product(i, j)));
            }
        }
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let mut vertices = Vec::new();
        let mut idempotents = Vec::new();
        for (x, e) in self.idempotents.iter().enumerate() {
            let image = project(e);
            if !is_zero_vector(&image) {
                vertices.push(self.vertices[x].clone());
                idempotents.push(image);
            }
        }
        let cols: Vec<Vector> = (0..self.dim()).map(|i| project(&self.basis_vector(i))).collect();
        let projection = Matrix::from_columns(self.field, m, &cols);
        Ok((
            AlgebraTable::new(self.field, labels, products, vertices, idempotents),
            projection,
        ))
    }

    /// The opposite algebra on the same basis: `u * v := v u`.
    pub fn opposite(&self) -> AlgebraTable {
        let n = self.dim();
        let mut products = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                products.push(self.products[j * n + i].clone());
            }
        }
        AlgebraTable::new(
            self.field,
            self.labels.clone(),
            products,
            self.vertices.clone(),
            self.idempotents.clone(),
        )
    }

    /// Checks that the linear map `sigma` (matrix on the basis) is an
    /// anti-automorphism squaring to the identity: `sigma(uv) =
    /// sigma(v) sigma(u)`, i.e. the structure constants of the opposite
    /// algebra agree with those of `A` transported along `sigma`.
    pub fn check_anti_involution(&self, sigma: &Matrix) -> Result<(), String> {
        let n = self.dim();
        if sigma.rows() != n || sigma.cols() != n {
            return Err("anti-involution has the wrong size".into());
        }
        if sigma.mul(sigma) != Matrix::identity(self.field, n) {
            return Err("anti-involution does not square to the identity".into());
        }
        let images: Vec<Vector> = (0..n).map(|i| sigma.column(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let lhs = sigma.apply(self.basis_product(i, j));
                let rhs = self.mul(&images[j], &images[i]);
                if lhs != rhs {
                    return Err(format!(
                        "sigma({} {}) != sigma({}) sigma({})",
                        self.labels[i], self.labels[j], self.labels[j], self.labels[i]
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks that `phi` (matrix from `self` to `other`) is an algebra
    /// isomorphism: bijective, multiplicative, unital.
    pub fn check_isomorphism(&self, other: &AlgebraTable, phi: &Matrix) -> Result<(), String> {
        let n = self.dim();
        if other.dim() != n || phi.rows() != n || phi.cols() != n {
            return Err(format!("dimensions differ: {} vs {}", n, other.dim()));
        }
        if !phi.is_invertible() {
            return Err("map is not bijective".into());
        }
        if phi.apply(&self.one()) != other.one() {
            return Err("map is not unital".into());
        }
        let images: Vec<Vector> = (0..n).map(|i| phi.column(i)).collect();
        for i in 0..n {
            for j in 0..n {
                if phi.apply(self.basis_product(i, j)) != other.mul(&images[i], &images[j]) {
                    return Err(format!(
                        "map is not multiplicative on ({}, {})",
                        self.labels[i], self.labels[j]
                    ));
                }
            }
        }
        Ok(())
    }

    /// Powers of a subspace until they stabilize; returns the nilpotency
    /// index `k` with `S^k = 0`, or `None` if the powers stabilize nonzero.
    pub fn nilpotency_index(&self, s: &Subspace) -> Option<usize> {
        if s.is_zero() {
            return Some(0);
        }
        let mut power = s.clone();
        let mut k = 1;
        loop {
            let next = self.product_space(&power, s);
            k += 1;
            if next.is_zero() {
                return Some(k);
            }
            if next.dim() >= power.dim() {
                return None;
            }
            power = next;
        }
    }
}

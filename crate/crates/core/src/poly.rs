//! Univariate polynomials over the ground field, only as far as root
//! finding needs them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{Field, Scalar};

/// Coefficients in increasing degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

const BRUTE_FORCE_PRIME: u64 = 50_000;
const DIVISOR_SEARCH_LIMIT: u64 = 1_000_000;

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Poly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn x(field: Field) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    pub fn constant(field: Field, c: Scalar) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lead) => {
                let inv = lead.inv();
                Poly::new(self.field, self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = self.field.zero();
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
            .collect();
        Poly::new(self.field, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(self.field, Vec::new());
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(self.field, out)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.coeffs[dd].inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = &rem[k] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k - dd + j] -= &(&c * dc);
                }
                quot[k - dd] = c;
            }
            rem.pop();
        }
        (Poly::new(self.field, quot), Poly::new(self.field, rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    fn pow_mod(&self, mut e: BigInt, modulus: &Poly) -> Poly {
        let mut base = self.div_rem(modulus).1;
        let mut acc = Poly::constant(self.field, self.field.one());
        while e.is_positive() {
            if e.is_odd() {
                acc = acc.mul(&base).div_rem(modulus).1;
            }
            base = base.mul(&base).div_rem(modulus).1;
            e >>= 1;
        }
        acc
    }

    /// Distinct roots in the ground field, sorted.
    pub fn roots(&self) -> Vec<Scalar> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = match self.field {
            Field::Prime(p) => prime_roots(self, p),
            Field::Rational => rational_roots(self),
        };
        roots.sort();
        roots.dedup();
        roots
    }
}

fn prime_roots(f: &Poly, p: u64) -> Vec<Scalar> {
    let field = f.field;
    if p <= BRUTE_FORCE_PRIME {
        return (0..p)
            .map(|v| field.int(v as i64))
            .filter(|x| f.eval(x).is_zero())
            .collect();
    }
    // Product of the distinct linear factors: gcd(f, x^p - x).
    let x = Poly::x(field);
    let xp = x.pow_mod(BigInt::from(p), f);
    let mut g = f.gcd(&xp.sub(&x));
    let mut roots = Vec::new();
    if g.eval(&field.zero()).is_zero() {
        roots.push(field.zero());
        g = g.div_rem(&x).0.monic();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    split_linear(&g, p, &mut rng, &mut roots);
    roots
}

/// Equal-degree splitting of a squarefree product of linear factors with
/// nonzero roots.
fn split_linear(g: &Poly, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Scalar>) {
    let field = g.field;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(-&g.monic().coeffs[0]),
        Some(_) => loop {
            let delta = field.int(rng.gen_range(0..p as i64));
            let shifted = Poly::new(field, vec![delta, field.one()]);
            let h = shifted.pow_mod(BigInt::from((p - 1) / 2), g);
            let d = g.gcd(&h.sub(&Poly::constant(field, field.one())));
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) < g.degree() {
                split_linear(&d, p, rng, out);
                split_linear(&g.div_rem(&d).0.monic(), p, rng, out);
                return;
            }
        },
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return None;
    }
    let small = n.to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= small {
        if d > DIVISOR_SEARCH_LIMIT {
            return None;
        }
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots by the rational root theorem. Gives up (returns what it
/// has) when coefficients are too large to factor by trial division.
fn rational_roots(f: &Poly) -> Vec<Scalar> {
    let field = f.field;
    let mut den_lcm = BigInt::one();
    for c in &f.coeffs {
        den_lcm = den_lcm.lcm(c.as_rational().expect("rational field").denom());
    }
    let mut ints: Vec<BigInt> = f
        .coeffs
        .iter()
        .map(|c| {
            let r = c.as_rational().expect("rational field");
            r.numer() * (&den_lcm / r.denom())
        })
        .collect();
    let mut roots = Vec::new();
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(field.zero());
        ints.drain(..zeros);
    }
    if ints.len() <= 1 {
        return roots;
    }
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().expect("nonempty"))) else {
        return roots;
    };
    let reduced = Poly::new(field, ints.iter().map(|c| field.big_int(c)).collect());
    for p in &ps {
        for q in &qs {
            for sign in [1, -1] {
                let cand = field
                    .fraction(&(p * BigInt::from(sign)), q)
                    .expect("nonzero divisor");
                if reduced.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(field: Field, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.int(x)).collect())
    }

    #[test]
    fn rational_roots_of_cubic() {
        // x^3 - x = x (x - 1)(x + 1)
        let f = poly(Field::Rational, &[0, -1, 0, 1]);
        let r: Vec<String> = f.roots().iter().map(|s| s.to_string()).collect();
        assert_eq!(r, ["-1", "0", "1"]);
        // 2x^2 - 3x + 1 = (2x - 1)(x - 1)
        let g = poly(Field::Rational, &[1, -3, 2]);
        let r: Vec<String> = g.roots().iter().map(|s| s.to_string()).collect();
        assert_eq!(r, ["1/2", "1"]);
        assert!(poly(Field::Rational, &[1, 0, 1]).roots().is_empty());
    }

    #[test]
    fn prime_roots_small_and_large() {
        let f7 = Field::prime(7).unwrap();
        // x^2 + 1 has no roots mod 7, x^2 - 2 has 3 and 4
        assert!(poly(f7, &[1, 0, 1]).roots().is_empty());
        assert_eq!(poly(f7, &[-2, 0, 1]).roots(), vec![f7.int(3), f7.int(4)]);
        let big = Field::prime(1_000_003).unwrap();
        // (x - 5)(x - 77)(x + 2); residues sort by representative
        let g = poly(big, &[-5, 1]).mul(&poly(big, &[-77, 1])).mul(&poly(big, &[2, 1]));
        assert_eq!(g.roots(), vec![big.int(5), big.int(77), big.int(-2)]);
    }

    #[test]
    fn division_identity() {
        let q = Field::Rational;
        let a = poly(q, &[3, 0, -2, 5, 1]);
        let b = poly(q, &[1, 2, 1]);
        let (quot, rem) = a.div_rem(&b);
        assert_eq!(quot.mul(&b).sub(&a.sub(&rem)), Poly::new(q, vec![]));
        assert!(rem.degree() < b.degree());
    }
}

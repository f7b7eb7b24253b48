//! Completion of path-algebra relations into a reduction system.
//!
//! Relations are oriented by the length-lexicographic order, overlap
//! ambiguities are resolved up to a degree bound, and the irreducible
//! paths give a basis of the presented algebra (Diamond Lemma).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraTable;
use crate::error::RewriteError;
use crate::linalg::{zero_vector, Matrix, Vector};
use crate::presentation::{Path, PathPoly, Presentation, Quiver};
use crate::scalar::Field;

pub const DEFAULT_DEGREE_BOUND: usize = 8;
pub const DEFAULT_RULE_CAP: usize = 10_000;

/// `lhs -> rhs` with every term of `rhs` strictly below `lhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Path,
    pub rhs: PathPoly,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    field: Field,
    quiver: Quiver,
    rules: Vec<Rule>,
    normal_forms: Vec<Path>,
    degree_bound: usize,
    /// Overlaps longer than the bound that were not examined.
    skipped_overlaps: usize,
}

impl RewriteSystem {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Irreducible paths sorted by the monomial order.
    pub fn normal_forms(&self) -> &[Path] {
        &self.normal_forms
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// True when no overlap ambiguity exceeded the degree bound, i.e. the
    /// system is confluent outright and not just up to the bound.
    pub fn fully_confluent(&self) -> bool {
        self.skipped_overlaps == 0
    }

    pub fn order_descriptor(&self) -> String {
        let arrows: Vec<&str> = self.quiver.arrows().iter().map(|a| a.name.as_str()).collect();
        format!("length-lex ({})", arrows.join(" < "))
    }

    pub fn is_irreducible(&self, p: &Path) -> bool {
        find_redex(&self.rules, &self.quiver, p).is_none()
    }

    /// Reduces to a combination of irreducible paths, always rewriting the
    /// largest reducible term first.
    pub fn normal_form(&self, expr: &PathPoly) -> PathPoly {
        reduce(&self.rules, &self.quiver, expr)
    }

    /// Reduction with randomly chosen redexes; used to test confluence.
    pub fn normal_form_randomized(&self, expr: &PathPoly, seed: u64) -> PathPoly {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut current = expr.clone();
        loop {
            let reducible: Vec<Path> = current
                .terms()
                .keys()
                .filter(|p| !self.is_irreducible(p))
                .cloned()
                .collect();
            let Some(path) = reducible.choose(&mut rng).cloned() else {
                return current;
            };
            let redexes = all_redexes(&self.rules, &self.quiver, &path);
            let &(rule, pos) = &redexes[rng.gen_range(0..redexes.len())];
            let coeff = current.remove(&path).expect("term present");
            let replacement = rewrite_at(&self.rules[rule], &self.quiver, &path, pos);
            current.add_scaled(&coeff, &replacement);
        }
    }

    /// Coordinates of the normal form of `expr` in the basis
    /// [`Self::normal_forms`].
    pub fn coordinates(&self, expr: &PathPoly) -> Vector {
        let nf = self.normal_form(expr);
        let mut v = zero_vector(self.field, self.normal_forms.len());
        for (p, c) in nf.terms() {
            let i = self
                .normal_forms
                .binary_search(p)
                .expect("irreducible path missing from normal forms");
            v[i] = c.clone();
        }
        v
    }

    /// Matrix (on the normal-form basis) of the anti-automorphism that fixes
    /// vertices, swaps each listed pair of arrows, fixes unlisted arrows and
    /// reverses paths. Fails if some image is not a path of the quiver.
    pub fn arrow_anti_involution(&self, swaps: &[(&str, &str)]) -> Result<Matrix, RewriteError> {
        let quiver = &self.quiver;
        let mut image: Vec<usize> = (0..quiver.arrows().len()).collect();
        for (x, y) in swaps {
            let (Some(i), Some(j)) = (quiver.arrow_index(x), quiver.arrow_index(y)) else {
                return Err(RewriteError::NotComposable(format!("{x} <-> {y}")));
            };
            image[i] = j;
            image[j] = i;
        }
        let cols = self
            .normal_forms
            .iter()
            .map(|p| {
                let reversed: Vec<usize> = p.arrows.iter().rev().map(|&a| image[a]).collect();
                let q = if reversed.is_empty() {
                    Some(p.clone())
                } else {
                    quiver.path_from_arrows(&reversed)
                };
                q.map(|q| self.coordinates(&PathPoly::monomial(self.field, q, self.field.one())))
                    .ok_or_else(|| RewriteError::NotComposable(quiver.display_path(p)))
            })
            .collect::<Result<Vec<Vector>, _>>()?;
        Ok(Matrix::from_columns(self.field, self.normal_forms.len(), &cols))
    }

    /// Materializes the structure constants on the normal-form basis.
    pub fn build_algebra(&self) -> AlgebraTable {
        let field = self.field;
        let basis = &self.normal_forms;
        let n = basis.len();
        let mut products = Vec::with_capacity(n * n);
        for u in basis {
            for v in basis {
                let v_ = match self.quiver.compose(u, v) {
                    Some(uv) => self.coordinates(&PathPoly::monomial(field, uv, field.one())),
                    None => zero_vector(field, n),
                };
                products.push(v_);
            }
        }
        let labels = basis.iter().map(|p| self.quiver.display_path(p)).collect();
        let idempotents = (0..self.quiver.vertices().len())
            .map(|v| self.coordinates(&PathPoly::monomial(field, Path::vertex(v), field.one())))
            .collect();
        AlgebraTable::new(
            field,
            labels,
            products,
            self.quiver.vertices().to_vec(),
            idempotents,
        )
    }
}

fn vertex_rule_kills(rule: &Rule, quiver: &Quiver, p: &Path) -> bool {
    rule.lhs.is_vertex() && quiver.visited(p).contains(&rule.lhs.source)
}

fn find_redex(rules: &[Rule], quiver: &Quiver, p: &Path) -> Option<(usize, usize)> {
    for (i, r) in rules.iter().enumerate() {
        if r.lhs.is_vertex() {
            if vertex_rule_kills(r, quiver, p) {
                return Some((i, 0));
            }
        } else if let Some(&pos) = p.occurrences(&r.lhs).first() {
            return Some((i, pos));
        }
    }
    None
}

fn all_redexes(rules: &[Rule], quiver: &Quiver, p: &Path) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if r.lhs.is_vertex() {
            if vertex_rule_kills(r, quiver, p) {
                out.push((i, 0));
            }
        } else {
            out.extend(p.occurrences(&r.lhs).into_iter().map(|pos| (i, pos)));
        }
    }
    out
}

/// `prefix * rhs * suffix` where `p = prefix * lhs * suffix`.
fn rewrite_at(rule: &Rule, quiver: &Quiver, p: &Path, pos: usize) -> PathPoly {
    let field = rule.rhs.field();
    if rule.lhs.is_vertex() {
        return PathPoly::zero(field);
    }
    let len = rule.lhs.len();
    let prefix = PathPoly::monomial(field, quiver.subpath(p, 0, pos), field.one());
    let suffix = PathPoly::monomial(field, quiver.subpath(p, pos + len, p.len()), field.one());
    prefix.mul(&rule.rhs, quiver).mul(&suffix, quiver)
}

fn reduce(rules: &[Rule], quiver: &Quiver, expr: &PathPoly) -> PathPoly {
    let mut done = PathPoly::zero(expr.field());
    let mut work = expr.clone();
    // Rewriting only ever produces smaller paths, so the largest remaining
    // term is final once it is irreducible.
    while let Some((path, coeff)) = work.leading().map(|(p, c)| (p.clone(), c.clone())) {
        work.remove(&path);
        match find_redex(rules, quiver, &path) {
            None => done.add_term(path, &coeff),
            Some((rule, pos)) => {
                let replacement = rewrite_at(&rules[rule], quiver, &path, pos);
                work.add_scaled(&coeff, &replacement);
            }
        }
    }
    done
}

fn make_rule(poly: PathPoly) -> Option<Rule> {
    let (lead, coeff) = poly.leading().map(|(p, c)| (p.clone(), c.clone()))?;
    let mut rhs = poly.scale(&-coeff.inv());
    rhs.remove(&lead);
    Some(Rule { lhs: lead, rhs })
}

fn divides(quiver: &Quiver, small: &Path, big: &Path) -> bool {
    if small.is_vertex() {
        quiver.visited(big).contains(&small.source)
    } else {
        !big.occurrences(small).is_empty()
    }
}

/// Adds `poly` (after reduction) and inter-reduces the whole system.
fn insert_relation(rules: &mut Vec<Rule>, quiver: &Quiver, poly: &PathPoly) -> bool {
    let reduced = reduce(rules, quiver, poly);
    let Some(new_rule) = make_rule(reduced) else {
        return false;
    };
    let mut queue = vec![new_rule];
    while let Some(rule) = queue.pop() {
        let (keep, evicted): (Vec<Rule>, Vec<Rule>) = rules
            .drain(..)
            .partition(|r| !divides(quiver, &rule.lhs, &r.lhs));
        *rules = keep;
        rules.push(rule);
        for old in evicted {
            let mut poly = old.rhs.clone();
            poly.add_term(old.lhs.clone(), &-poly.field().one());
            let again = reduce(rules, quiver, &poly);
            if let Some(r) = make_rule(again) {
                queue.push(r);
            }
        }
    }
    let snapshot = rules.clone();
    for (i, rule) in rules.iter_mut().enumerate() {
        let others: Vec<Rule> = snapshot
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        rule.rhs = reduce(&others, quiver, &rule.rhs);
    }
    rules.sort_by(|a, b| a.lhs.cmp(&b.lhs));
    true
}

/// Overlap words `x * y[k..]` where the last `k` arrows of `x` are the first
/// `k` arrows of `y`.
fn overlaps(x: &Path, y: &Path) -> Vec<usize> {
    if x.is_vertex() || y.is_vertex() {
        return Vec::new();
    }
    let max = x.len().min(y.len());
    (1..max)
        .filter(|&k| x.arrows[x.len() - k..] == y.arrows[..k])
        .collect()
}

/// Completes the relations of `p` into a reduction system and enumerates
/// the irreducible paths of degree below `degree_bound`.
pub fn complete_rewriting(p: &Presentation, degree_bound: usize) -> Result<RewriteSystem, RewriteError> {
    complete_rewriting_capped(p, degree_bound, DEFAULT_RULE_CAP)
}

pub fn complete_rewriting_capped(
    p: &Presentation,
    degree_bound: usize,
    rule_cap: usize,
) -> Result<RewriteSystem, RewriteError> {
    let needed = p.max_relation_degree();
    if degree_bound < needed.max(1) {
        return Err(RewriteError::BoundTooSmall {
            bound: degree_bound,
            needed: needed.max(1),
        });
    }
    let quiver = &p.quiver;
    let field = p.field;
    let mut rules: Vec<Rule> = Vec::new();
    for r in &p.relations {
        insert_relation(&mut rules, quiver, r);
        if rules.len() > rule_cap {
            return Err(RewriteError::CompletionOverflow { cap: rule_cap });
        }
    }

    // Every overlap is re-examined after the system changes, so on exit all
    // ambiguities within the bound resolve against the final rules.
    let mut examined: BTreeSet<(Path, Path, usize)> = BTreeSet::new();
    loop {
        let mut next = None;
        'search: for x in &rules {
            for y in &rules {
                for k in overlaps(&x.lhs, &y.lhs) {
                    if x.lhs.len() + y.lhs.len() - k > degree_bound {
                        continue;
                    }
                    let key = (x.lhs.clone(), y.lhs.clone(), k);
                    if !examined.contains(&key) {
                        next = Some((x.clone(), y.clone(), k));
                        break 'search;
                    }
                }
            }
        }
        let Some((x, y, k)) = next else { break };
        examined.insert((x.lhs.clone(), y.lhs.clone(), k));
        let tail = quiver.subpath(&y.lhs, k, y.lhs.len());
        let head = quiver.subpath(&x.lhs, 0, x.lhs.len() - k);
        let one = field.one();
        let left = x.rhs.mul(&PathPoly::monomial(field, tail, one.clone()), quiver);
        let right = PathPoly::monomial(field, head, one.clone()).mul(&y.rhs, quiver);
        let mut diff = reduce(&rules, quiver, &left);
        diff.add_scaled(&-one, &reduce(&rules, quiver, &right));
        if !diff.is_zero() {
            insert_relation(&mut rules, quiver, &diff);
            examined.clear();
            if rules.len() > rule_cap {
                return Err(RewriteError::CompletionOverflow { cap: rule_cap });
            }
        }
    }
    let skipped_overlaps = rules
        .iter()
        .flat_map(|x| rules.iter().map(move |y| (x, y)))
        .map(|(x, y)| {
            overlaps(&x.lhs, &y.lhs)
                .into_iter()
                .filter(|&k| x.lhs.len() + y.lhs.len() - k > degree_bound)
                .count()
        })
        .sum();

    let normal_forms = enumerate_irreducible(&rules, quiver, degree_bound)?;
    Ok(RewriteSystem {
        field,
        quiver: quiver.clone(),
        rules,
        normal_forms,
        degree_bound,
        skipped_overlaps,
    })
}

fn enumerate_irreducible(rules: &[Rule], quiver: &Quiver, bound: usize) -> Result<Vec<Path>, RewriteError> {
    let mut all: Vec<Path> = Vec::new();
    let mut layer: Vec<Path> = (0..quiver.vertices().len())
        .map(Path::vertex)
        .filter(|p| find_redex(rules, quiver, p).is_none())
        .collect();
    for len in 0..=bound {
        if layer.is_empty() {
            break;
        }
        if len == bound {
            return Err(RewriteError::NotFiniteWithinBound {
                bound,
                witness: quiver.display_path(&layer[0]),
            });
        }
        all.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for p in &layer {
            for (a, arrow) in quiver.arrows().iter().enumerate() {
                if arrow.source != p.target {
                    continue;
                }
                let q = quiver
                    .compose(&quiver.arrow_path(a), p)
                    .expect("arrow composes with path");
                if find_redex(rules, quiver, &q).is_none() {
                    next.push(q);
                }
            }
        }
        layer = next;
    }
    all.sort();
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const SL2: &str = "\
VERTICES e f
PARAM z = 0
ARROW a : e -> f
ARROW b : e -> e
ARROW c : f -> e
REL a*b
REL b*c
REL a*c - z*f
REL b*b + c*a - z*e
";

    fn sl2(z: &str) -> RewriteSystem {
        let p = crate::presentation::parse_presentation_with(SL2, &[("z".into(), z.into())]).unwrap();
        complete_rewriting(&p, 4).unwrap()
    }

    fn names(rs: &RewriteSystem) -> Vec<String> {
        rs.normal_forms().iter().map(|p| rs.quiver().display_path(p)).collect()
    }

    #[test]
    fn diamond_lemma_basis_of_the_example() {
        for z in ["0", "1", "-3/2"] {
            let rs = sl2(z);
            assert_eq!(names(&rs), ["e", "f", "a", "b", "c", "b^2"]);
        }
    }

    #[test]
    fn completion_adds_the_cubic_rule() {
        let p = crate::presentation::parse_presentation_with(SL2, &[("z".into(), "1".into())]).unwrap();
        let rs = complete_rewriting(&p, 6).unwrap();
        let lhs: Vec<String> = rs.rules().iter().map(|r| rs.quiver().display_path(&r.lhs)).collect();
        assert!(lhs.contains(&"b^3".to_string()), "{lhs:?}");
        assert!(rs.fully_confluent());
        assert!(!sl2("1").fully_confluent());
    }

    #[test]
    fn loop_with_square_zero() {
        let p = parse_presentation("VERTICES v\nARROW x : v -> v\nREL x*x\n").unwrap();
        let rs = complete_rewriting(&p, 5).unwrap();
        assert_eq!(names(&rs), ["v", "x"]);
    }

    #[test]
    fn free_loop_is_not_finite() {
        let p = parse_presentation("VERTICES v\nARROW x : v -> v\n").unwrap();
        assert!(matches!(
            complete_rewriting(&p, 5),
            Err(RewriteError::NotFiniteWithinBound { bound: 5, .. })
        ));
    }

    #[test]
    fn bound_below_relation_degree() {
        let p = parse_presentation("VERTICES v\nARROW x : v -> v\nREL x^3\n").unwrap();
        assert!(matches!(
            complete_rewriting(&p, 2),
            Err(RewriteError::BoundTooSmall { .. })
        ));
    }

    #[test]
    fn rule_cap_is_enforced() {
        let p = parse_presentation(SL2).unwrap();
        assert!(matches!(
            complete_rewriting_capped(&p, 4, 2),
            Err(RewriteError::CompletionOverflow { cap: 2 })
        ));
    }

    #[test]
    fn vertex_relation_kills_paths_through_it() {
        let p = parse_presentation("VERTICES u v\nARROW x : u -> v\nREL v\n").unwrap();
        let rs = complete_rewriting(&p, 4).unwrap();
        assert_eq!(names(&rs), ["u"]);
    }
}

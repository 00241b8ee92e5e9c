//! Sparse multivariate polynomials, used for linear changes of variables.

use std::collections::BTreeMap;

use super::Monomial;
use crate::gf::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Elem) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    /// `Σ coeffs[i] · x_i`.
    pub fn linear(coeffs: &[Elem]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(Monomial(e), c);
            }
        }
        p
    }

    /// Terms must already be combined (as from [`super::Surface::terms`]).
    pub fn from_terms(nvars: usize, terms: Vec<(Monomial, Elem)>) -> Self {
        Poly { nvars, terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(Elem::ZERO)
    }

    fn add_term(&mut self, field: &Field, m: Monomial, c: Elem) {
        let slot = self.terms.entry(m.clone()).or_insert(Elem::ZERO);
        *slot = field.add(*slot, c);
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(field, m.clone(), c);
        }
        out
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                out.add_term(field, Monomial(e), field.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, field: &Field, c: Elem) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, a) in self.terms() {
            out.add_term(field, m.clone(), field.mul(a, c));
        }
        out
    }

    pub fn pow(&self, field: &Field, e: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, Elem::ONE);
        for _ in 0..e {
            out = out.mul(field, self);
        }
        out
    }

    /// Substitutes `images[i]` for the i-th variable.
    pub fn compose(&self, field: &Field, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let n = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::constant(n, Elem::ONE), p.clone()]).collect();
        let mut out = Poly::zero(n);
        for (m, c) in self.terms() {
            let mut term = Poly::constant(n, c);
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(field, &images[i]);
                    powers[i].push(next);
                }
                term = term.mul(field, &powers[i][e as usize]);
            }
            out = out.add(field, &term);
        }
        out
    }

    pub fn eval(&self, field: &Field, t: &[Elem]) -> Elem {
        self.terms().fold(Elem::ZERO, |acc, (m, c)| field.add(acc, field.mul(c, m.eval(field, t))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_matches_evaluation() {
        let f = Field::parse("4").unwrap();
        let x = Poly::linear(&[Elem(1), Elem(0), Elem(0)]);
        let y = Poly::linear(&[Elem(0), Elem(1), Elem(0)]);
        let z = Poly::linear(&[Elem(0), Elem(0), Elem(1)]);
        // p = x^2 y + a z^3
        let p = x.pow(&f, 2).mul(&f, &y).add(&f, &z.pow(&f, 3).scale(&f, Elem(2)));
        let images = [
            Poly::linear(&[Elem(1), Elem(2), Elem(0)]),
            Poly::linear(&[Elem(0), Elem(3), Elem(1)]),
            Poly::linear(&[Elem(1), Elem(1), Elem(1)]),
        ];
        let q = p.compose(&f, &images);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let t = [a, b, c];
                    let mapped: Vec<Elem> = images.iter().map(|im| im.eval(&f, &t)).collect();
                    assert_eq!(q.eval(&f, &t), p.eval(&f, &mapped));
                }
            }
        }
    }

    #[test]
    fn char2_frobenius_collapses_cross_terms() {
        let f = Field::parse("2").unwrap();
        let s = Poly::linear(&[Elem(1), Elem(1)]);
        let sq = s.pow(&f, 2);
        assert_eq!(sq.terms().count(), 2);
        assert!(s.add(&f, &s).is_zero());
    }
}

use crate::error::{Error, Result};
use crate::families::{CountMode, FamilySpec};
use crate::gf::{Elem, Field};
use crate::wps;

/// Byte tables for counting: the sites at which equations are evaluated,
/// every slot monomial's value at every site, and field arithmetic on `u8`.
///
/// For class-closed families the sites are canonical point representatives
/// and each matching site stands for `weight` points (`1` projectively,
/// `q − 1` on raw tuples); otherwise every nonzero tuple is a site.
#[derive(Clone, Debug)]
pub struct Tables {
    pub q: usize,
    pub sites: Vec<Vec<Elem>>,
    pub weight: u64,
    pub mono: Vec<Vec<u8>>,
    pub fixed: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    xor_add: bool,
}

impl Tables {
    pub fn new(family: &FamilySpec, field: &Field, mode: CountMode) -> Result<Self> {
        let q = field.order() as usize;
        if q > 256 {
            return Err(Error::FieldTooLargeForCensus);
        }
        let (sites, weight) = if family.class_closed {
            let pts = wps::enumerate_points(&family.ambient, field);
            let w = match mode {
                CountMode::Projective => 1,
                CountMode::Affine => q as u64 - 1,
            };
            (pts.into_iter().map(|p| p.into_coords()).collect::<Vec<_>>(), w)
        } else {
            if mode == CountMode::Projective {
                return Err(Error::NotClassClosed);
            }
            let mut all = Vec::new();
            wps::for_each_tuple(q as u32, family.nvars(), |t| {
                if t.iter().any(|c| !c.is_zero()) {
                    all.push(t.to_vec());
                }
                true
            });
            (all, 1)
        };
        let byte = |e: Elem| e.0 as u8;
        let mono = family
            .free
            .iter()
            .map(|m| sites.iter().map(|t| byte(m.eval(field, t))).collect())
            .collect();
        let fixed = sites
            .iter()
            .map(|t| {
                byte(family.fixed.iter().fold(Elem::ZERO, |acc, (m, c)| {
                    field.add(acc, field.mul(*c, m.eval(field, t)))
                }))
            })
            .collect();
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in field.elements() {
            for b in field.elements() {
                add[a.index() * q + b.index()] = byte(field.add(a, b));
                mul[a.index() * q + b.index()] = byte(field.mul(a, b));
            }
        }
        let neg = field.elements().map(|a| byte(field.neg(a))).collect();
        Ok(Tables { q, sites, weight, mono, fixed, add, mul, neg, xor_add: field.characteristic() == 2, })
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    /// `acc += c · mono[slot]` at every site.
    pub fn accumulate(&self, acc: &mut [u8], slot: usize, c: Elem) {
        if c.is_zero() {
            return;
        }
        let row = &self.mul[c.index() * self.q..(c.index() + 1) * self.q];
        let vals = &self.mono[slot];
        if self.xor_add {
            for (a, &v) in acc.iter_mut().zip(vals) {
                *a ^= row[v as usize];
            }
        } else {
            for (a, &v) in acc.iter_mut().zip(vals) {
                *a = self.add[*a as usize * self.q + row[v as usize] as usize];
            }
        }
    }

    /// `acc[i] += other[i]`.
    pub fn add_rows(&self, acc: &mut [u8], other: &[u8]) {
        if self.xor_add {
            for (a, &b) in acc.iter_mut().zip(other) {
                *a ^= b;
            }
        } else {
            for (a, &b) in acc.iter_mut().zip(other) {
                *a = self.add[*a as usize * self.q + b as usize];
            }
        }
    }

    pub fn negate(&self, acc: &mut [u8]) {
        if !self.xor_add {
            for a in acc.iter_mut() {
                *a = self.neg[*a as usize];
            }
        }
    }

    /// Values of the full equation at every site.
    pub fn values(&self, coeffs: &[Elem]) -> Vec<u8> {
        let mut acc = self.fixed.clone();
        for (j, &c) in coeffs.iter().enumerate() {
            self.accumulate(&mut acc, j, c);
        }
        acc
    }

    /// Point count in the table's mode.
    pub fn count(&self, coeffs: &[Elem]) -> u64 {
        self.values(coeffs).iter().filter(|&&v| v == 0).count() as u64 * self.weight
    }
}

/// Number of positions where `a` and `b` agree.
#[inline]
pub(crate) fn count_eq(a: &[u8], b: &[u8]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x == y) as u32).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, reduced_family, Surface, BUILTIN_FAMILIES};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_counts_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for lit in ["2", "3", "4", "5"] {
            let field = Field::parse(lit).unwrap();
            for id in BUILTIN_FAMILIES {
                let fam = reduced_family(&builtin(id).unwrap(), &field);
                for mode in [CountMode::Projective, CountMode::Affine] {
                    let t = Tables::new(&fam, &field, mode).unwrap();
                    for _ in 0..60 {
                        let coeffs: Vec<Elem> =
                            (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
                        let s = Surface::new(fam.clone(), field.clone(), coeffs.clone()).unwrap();
                        assert_eq!(t.count(&coeffs), s.count_points(mode, None), "{id} F_{lit} {mode}");
                    }
                }
            }
        }
    }

    #[test]
    fn projective_needs_class_closed_family() {
        let f2 = Field::parse("2").unwrap();
        let s = Surface::zero(builtin("CUBIC_P3").unwrap(), f2.clone());
        let r = crate::families::restrict(&s, &[crate::families::Subst::Keep; 4]).unwrap();
        assert!(matches!(Tables::new(r.family(), &f2, CountMode::Projective), Err(Error::NotClassClosed)));
        assert!(Tables::new(r.family(), &f2, CountMode::Affine).is_ok());
        let f512 = Field::parse("2^9").unwrap();
        assert!(Tables::new(s.family(), &f512, CountMode::Affine).is_err());
    }

    #[test]
    fn count_eq_counts_matches() {
        assert_eq!(count_eq(&[1, 2, 3, 4], &[1, 0, 3, 0]), 2);
        assert_eq!(count_eq(&[], &[]), 0);
    }
}

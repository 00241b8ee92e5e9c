//! Arithmetic in small finite fields `F_{p^r}`.
//!
//! An element is stored as its index in `[0, q)`: the little-endian base-`p`
//! digits of the residue polynomial modulo the field's defining polynomial.
//! With this encoding index `0` is zero, index `1` is one, the prime subfield
//! is `0..p`, and in characteristic 2 addition is XOR of indices.
//!
//! Fields up to [`TABLE_LIMIT`] elements carry full `q × q` addition and
//! multiplication tables. Larger fields multiply through discrete log/exp
//! tables, which are linear in `q`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fields at or below this order get quadratic lookup tables.
pub const TABLE_LIMIT: u32 = 512;

/// Largest field order the crate will construct.
pub const MAX_ORDER: u32 = 1 << 16;

/// Index of an element of some [`Field`]. Carries no field reference; the
/// caller keeps track of which field it belongs to.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Characteristic, degree and defining polynomial of a finite field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    /// Coefficients of the monic modulus, constant term first, length `r + 1`.
    modulus: Vec<u32>,
}

impl FieldSpec {
    /// Field with the given characteristic and monic modulus (constant term
    /// first). Primality of `p` and irreducibility of the modulus are checked.
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let r = modulus.len().saturating_sub(1) as u32;
        if r == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Reducible(modulus, p));
        }
        let q = checked_order(p, r)?;
        if q > MAX_ORDER {
            return Err(Error::UnsupportedField(format!("{p}^{r}")));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Reducible(modulus, p));
        }
        Ok(FieldSpec { p, r, modulus })
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        FieldSpec::new(p, vec![0, 1])
    }

    /// `F_{p^r}` with the canonical modulus: the monic irreducible of degree
    /// `r` whose lower coefficients, read as a base-`p` index, are smallest.
    /// This gives `t^2+t+1` for `F_4`, `t^3+t+1` for `F_8`, `t^2+1` for `F_9`
    /// and `F_49`, `t^4+t+1` for `F_16` and `t^2+2` for `F_25`.
    pub fn canonical(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::UnsupportedField(format!("{p}^0")));
        }
        if r == 1 {
            return FieldSpec::prime(p);
        }
        let q = checked_order(p, r)?;
        if q > MAX_ORDER {
            return Err(Error::UnsupportedField(format!("{p}^{r}")));
        }
        for low in 0..q {
            let mut modulus = digits_of(low, p, r as usize);
            modulus.push(1);
            if modulus[0] != 0 && is_irreducible(&modulus, p) {
                return Ok(FieldSpec { p, r, modulus });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Parses `"p^r"` or a bare prime power `"q"`.
    pub fn parse(lit: &str) -> Result<Self> {
        let bad = || Error::BadFieldLiteral(lit.to_string());
        let lit_t = lit.trim();
        let (p, r) = match lit_t.split_once('^') {
            Some((p, r)) => {
                let p: u32 = p.trim().parse().map_err(|_| bad())?;
                let r: u32 = r.trim().parse().map_err(|_| bad())?;
                if r == 0 || !is_prime(p) {
                    return Err(bad());
                }
                (p, r)
            }
            None => {
                let q: u32 = lit_t.parse().map_err(|_| bad())?;
                prime_power(q).ok_or_else(bad)?
            }
        };
        FieldSpec::canonical(p, r).map_err(|_| bad())
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.r)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// `"p"` for prime fields, `"p^r"` otherwise.
    pub fn literal(&self) -> String {
        if self.r == 1 {
            self.p.to_string()
        } else {
            format!("{}^{}", self.p, self.r)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

/// A finite field with its arithmetic tables. Immutable once built; share it
/// through an `Arc`.
pub struct Field {
    spec: FieldSpec,
    p: u32,
    r: u32,
    q: u32,
    add_tab: Option<Vec<u16>>,
    mul_tab: Option<Vec<u16>>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.spec.literal())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Arc<Field> {
        let p = spec.p;
        let r = spec.r;
        let q = spec.order();
        let modulus = spec.modulus.clone();
        let ring = Residues { p, r: r as usize, modulus: &modulus };

        let neg: Vec<u32> = (0..q).map(|a| ring.neg(a)).collect();

        let (exp, log) = if q == 2 {
            (vec![1], vec![0, 0])
        } else {
            let mut found = None;
            for g in 2..q {
                let mut exp = Vec::with_capacity(q as usize - 1);
                let mut x = 1u32;
                loop {
                    exp.push(x);
                    x = ring.mul(x, g);
                    if x == 1 || exp.len() >= q as usize - 1 {
                        break;
                    }
                }
                if x == 1 && exp.len() == q as usize - 1 {
                    found = Some(exp);
                    break;
                }
            }
            let exp = found.expect("the multiplicative group of a finite field is cyclic");
            let mut log = vec![0u32; q as usize];
            for (i, &x) in exp.iter().enumerate() {
                log[x as usize] = i as u32;
            }
            (exp, log)
        };

        let inv: Vec<u32> = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    let l = log[a as usize];
                    exp[((q - 1 - l) % (q - 1)) as usize]
                }
            })
            .collect();

        let mut field = Field { spec, p, r, q, add_tab: None, mul_tab: None, neg, inv, exp, log };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[a as usize * n + b as usize] = ring.add(a, b) as u16;
                    mul[a as usize * n + b as usize] = field.mul_log(a, b) as u16;
                }
            }
            field.add_tab = Some(add);
            field.mul_tab = Some(mul);
        }
        Arc::new(field)
    }

    /// Parses a field literal and builds the field.
    pub fn parse(lit: &str) -> Result<Arc<Field>> {
        Ok(Field::new(FieldSpec::parse(lit)?))
    }

    pub fn prime(p: u32) -> Result<Arc<Field>> {
        Ok(Field::new(FieldSpec::prime(p)?))
    }

    pub fn canonical(p: u32, r: u32) -> Result<Arc<Field>> {
        Ok(Field::new(FieldSpec::canonical(p, r)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q).map(Elem)
    }

    /// Nonzero elements in index order.
    pub fn units(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.q).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::ElementOutOfRange(a.0, self.q))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        match &self.add_tab {
            Some(t) => Elem(t[a.index() * self.q as usize + b.index()] as u32),
            None => Elem(self.residues().add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.mul_tab {
            Some(t) => Elem(t[a.index() * self.q as usize + b.index()] as u32),
            None => Elem(self.mul_log(a.0, b.0)),
        }
    }

    #[inline]
    fn mul_log(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(s % (self.q - 1)) as usize]
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Elem(self.inv[a.index()]))
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.index()] as u64 * (e % order) % order;
        Elem(self.exp[l as usize])
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> Elem {
        Elem(self.exp.get(1).copied().unwrap_or(1))
    }

    /// Discrete logarithm to the base [`Field::primitive`].
    pub fn log(&self, a: Elem) -> Result<u32> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.log[a.index()])
        }
    }

    /// Base-`p` digits of the residue polynomial, constant term first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        digits_of(a.0, self.p, self.r as usize)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Elem> {
        if digits.len() > self.r as usize || digits.iter().any(|&d| d >= self.p) {
            return Err(Error::ElementOutOfRange(u32::MAX, self.q));
        }
        Ok(Elem(digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)))
    }

    /// Element literal: little-endian digit string, e.g. `"01"` for `t` in
    /// `F_4`. Prime fields use plain decimal.
    pub fn format(&self, a: Elem) -> String {
        if self.r == 1 {
            return a.0.to_string();
        }
        let mut d = self.digits(a);
        while d.len() > 1 && *d.last().unwrap() == 0 {
            d.pop();
        }
        if self.p <= 10 {
            d.iter().map(|x| char::from_digit(*x, 10).unwrap()).collect()
        } else {
            d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
        }
    }

    pub fn parse_element(&self, lit: &str) -> Result<Elem> {
        let bad = || Error::BadElementLiteral(lit.to_string(), self.q);
        let s = lit.trim();
        if s.is_empty() {
            return Err(bad());
        }
        if self.r == 1 {
            let v: u32 = s.parse().map_err(|_| bad())?;
            return if v < self.p { Ok(Elem(v)) } else { Err(bad()) };
        }
        let digits: Vec<u32> = if self.p <= 10 {
            s.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_>>()?
        } else {
            s.split(':').map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        self.from_digits(&digits).map_err(|_| bad())
    }

    fn residues(&self) -> Residues<'_> {
        Residues { p: self.p, r: self.r as usize, modulus: &self.spec.modulus }
    }

    /// Checked view of an element.
    pub fn element(&self, a: Elem) -> Result<Element<'_>> {
        Ok(Element { field: self, value: self.check(a)? })
    }
}

/// An element bundled with its field. Binary operations check that both
/// operands live in the same field.
#[derive(Clone, Copy)]
pub struct Element<'f> {
    field: &'f Field,
    value: Elem,
}

// Fallible: operands from different fields are an error, not a panic.
#[allow(clippy::should_implement_trait)]
impl<'f> Element<'f> {
    pub fn value(self) -> Elem {
        self.value
    }

    pub fn field(self) -> &'f Field {
        self.field
    }

    fn same_field(self, other: Element<'_>) -> Result<()> {
        if std::ptr::eq(self.field, other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.spec.literal(), other.field.spec.literal()))
        }
    }

    pub fn add(self, other: Element<'_>) -> Result<Element<'f>> {
        self.same_field(other)?;
        Ok(Element { field: self.field, value: self.field.add(self.value, other.value) })
    }

    pub fn sub(self, other: Element<'_>) -> Result<Element<'f>> {
        self.same_field(other)?;
        Ok(Element { field: self.field, value: self.field.sub(self.value, other.value) })
    }

    pub fn mul(self, other: Element<'_>) -> Result<Element<'f>> {
        self.same_field(other)?;
        Ok(Element { field: self.field, value: self.field.mul(self.value, other.value) })
    }

    pub fn inv(self) -> Result<Element<'f>> {
        Ok(Element { field: self.field, value: self.field.inv(self.value)? })
    }

    pub fn pow(self, e: u64) -> Element<'f> {
        Element { field: self.field, value: self.field.pow(self.value, e) }
    }
}

impl PartialEq for Element<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}

impl fmt::Debug for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.field.format(self.value), self.field)
    }
}

impl fmt::Display for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.value))
    }
}

/// `F_{q^k}` together with the embedding of `F_q` into it.
#[derive(Debug, Clone)]
pub struct Extension {
    base: Arc<Field>,
    ext: Arc<Field>,
    degree: u32,
    map: Vec<Elem>,
}

impl Extension {
    /// Builds `F_{q^k}` with its canonical modulus and embeds `base` by
    /// sending the generator `t` to the smallest root of the base modulus.
    /// Fails when `q^k` exceeds `cap`.
    pub fn new(base: &Arc<Field>, k: u32, cap: u32) -> Result<Extension> {
        if k == 0 {
            return Err(Error::BadExtensionDegree);
        }
        let q = base.order();
        let too_large = || Error::ExtensionTooLarge(q, k, cap);
        let order = (q as u64).checked_pow(k).ok_or_else(too_large)?;
        if order > cap as u64 || order > MAX_ORDER as u64 {
            return Err(too_large());
        }
        if k == 1 {
            return Ok(Extension {
                base: base.clone(),
                ext: base.clone(),
                degree: 1,
                map: base.elements().collect(),
            });
        }
        let p = base.characteristic();
        let ext = Field::canonical(p, base.degree() * k)?;
        let map = if base.degree() == 1 {
            base.elements().collect()
        } else {
            let modulus = base.spec().modulus();
            let root = ext
                .elements()
                .find(|&b| {
                    let mut acc = Elem::ZERO;
                    for &c in modulus.iter().rev() {
                        acc = ext.add(ext.mul(acc, b), Elem(c));
                    }
                    acc.is_zero()
                })
                .expect("F_q embeds in every extension F_{q^k}");
            base.elements()
                .map(|a| {
                    let mut acc = Elem::ZERO;
                    for &d in base.digits(a).iter().rev() {
                        acc = ext.add(ext.mul(acc, root), Elem(d));
                    }
                    acc
                })
                .collect()
        };
        Ok(Extension { base: base.clone(), ext, degree: k, map })
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.ext
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn embed(&self, a: Elem) -> Elem {
        self.map[a.index()]
    }
}

/// Residue-polynomial arithmetic used to build the tables.
struct Residues<'a> {
    p: u32,
    r: usize,
    modulus: &'a [u32],
}

impl Residues<'_> {
    fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (digits_of(a, self.p, self.r), digits_of(b, self.p, self.r));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&sum, self.p)
    }

    fn neg(&self, a: u32) -> u32 {
        let d: Vec<u32> =
            digits_of(a, self.p, self.r).iter().map(|&x| (self.p - x) % self.p).collect();
        undigits(&d, self.p)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (digits_of(a, self.p, self.r), digits_of(b, self.p, self.r));
        let mut prod = vec![0u64; 2 * self.r];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % self.p as u64;
            }
        }
        let p = self.p as u64;
        for deg in (self.r..2 * self.r).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus[..self.r].iter().enumerate() {
                let idx = deg - self.r + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let low: Vec<u32> = prod[..self.r].iter().map(|&x| x as u32).collect();
        undigits(&low, self.p)
    }
}

fn digits_of(mut a: u32, p: u32, r: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(r);
    for _ in 0..r {
        d.push(a % p);
        a /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn checked_order(p: u32, r: u32) -> Result<u32> {
    p.checked_pow(r).ok_or_else(|| Error::UnsupportedField(format!("{p}^{r}")))
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, r)` with `p^r = q`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let (mut n, mut r) = (q, 0);
    while n.is_multiple_of(p) {
        n /= p;
        r += 1;
    }
    (n == 1).then_some((p, r))
}

/// Remainder of `a` modulo the monic `m` over `F_p`; both constant term first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dm = m.len() - 1;
    let p64 = p as u64;
    while a.len() > dm {
        let lead = a.pop().unwrap() % p64;
        if lead == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for i in 0..dm {
            a[shift + i] = (a[shift + i] + (p64 - lead) * m[i] as u64) % p64;
        }
    }
    a.into_iter().map(|x| x as u32).collect()
}

/// Exhaustive factor search: no monic polynomial of degree `1..=deg/2`
/// divides `modulus`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut f = digits_of(low as u32, p, d);
            f.push(1);
            if poly_rem(modulus, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

//! Rational points of weighted projective spaces over finite fields.
//!
//! Two coordinate tuples name the same geometric point when some `λ` in the
//! algebraic closure carries one to the other via `x_i ↦ λ^{w_i} x_i`. On a
//! common support `S` with gcd of weights `d`, such a `λ` exists exactly when
//! the ratios `r_i = v_i / u_i` satisfy `r_i^{w_j} = r_j^{w_i}`; equivalently
//! `r_i = μ^{w_i / d}` for a unique `μ ∈ F_q^*`. Every class of `F_q` tuples
//! therefore has exactly `q − 1` members.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSystem {
    weights: Vec<u32>,
}

impl WeightSystem {
    /// A well-formed weight system: at least two weights, all positive,
    /// with gcd 1.
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::BadWeights(weights, "need at least two coordinates"));
        }
        if weights.contains(&0) {
            return Err(Error::BadWeights(weights, "weights must be positive"));
        }
        if weights.iter().fold(0, |g, &w| gcd(g, w)) != 1 {
            return Err(Error::BadWeights(weights, "weights must have gcd 1"));
        }
        Ok(WeightSystem { weights })
    }

    /// Weights of an ordinary projective space `P^n`.
    pub fn standard(n: usize) -> Self {
        WeightSystem { weights: vec![1; n + 1] }
    }

    /// Skips the gcd and dimension checks; restricted equations keep the
    /// weights of their surviving variables this way.
    pub(crate) fn relaxed(weights: Vec<u32>) -> Self {
        WeightSystem { weights }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of `F_q`-points, `(q^{n+1} − 1)/(q − 1)`.
    pub fn point_count(&self, q: u32) -> u64 {
        ((q as u64).pow(self.len() as u32) - 1) / (q as u64 - 1)
    }
}

/// Canonical representative of a rational point: the lexicographically
/// smallest tuple (by element index) in its class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

impl ProjPoint {
    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    /// Bracketed literal such as `[0,0,1,1]`.
    pub fn literal(&self, field: &Field) -> String {
        format_point(field, &self.coords)
    }
}

pub fn format_point(field: &Field, t: &[Elem]) -> String {
    let parts: Vec<String> = t.iter().map(|&c| field.format(c)).collect();
    format!("[{}]", parts.join(","))
}

pub fn parse_point(field: &Field, lit: &str) -> Result<Vec<Elem>> {
    let s = lit.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::BadPointLiteral(lit.to_string()))?;
    inner
        .split(',')
        .map(|c| field.parse_element(c).map_err(|_| Error::BadPointLiteral(lit.to_string())))
        .collect()
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.0.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn check_tuple(field: &Field, ws: &WeightSystem, t: &[Elem]) -> Result<()> {
    if t.len() != ws.len() {
        return Err(Error::LengthMismatch(t.len(), ws.len()));
    }
    for &c in t {
        field.check(c)?;
    }
    Ok(())
}

/// The scaling action `x_i ↦ λ^{w_i} x_i`.
pub fn scale(field: &Field, ws: &WeightSystem, t: &[Elem], lambda: Elem) -> Result<Vec<Elem>> {
    check_tuple(field, ws, t)?;
    field.check(lambda)?;
    if lambda.is_zero() {
        return Err(Error::ZeroScalar);
    }
    Ok(t.iter()
        .zip(ws.weights())
        .map(|(&c, &w)| field.mul(field.pow(lambda, w as u64), c))
        .collect())
}

/// Whether `u` and `v` are the same geometric point.
pub fn equivalent(field: &Field, ws: &WeightSystem, u: &[Elem], v: &[Elem]) -> Result<bool> {
    check_tuple(field, ws, u)?;
    check_tuple(field, ws, v)?;
    if u.iter().all(|c| c.is_zero()) || v.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroTuple);
    }
    let mut ratios = Vec::with_capacity(u.len());
    for (i, (&a, &b)) in u.iter().zip(v).enumerate() {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => {}
            (false, false) => ratios.push((i, field.div(b, a)?)),
            _ => return Ok(false),
        }
    }
    let w = ws.weights();
    for (k, &(i, ri)) in ratios.iter().enumerate() {
        for &(j, rj) in &ratios[k + 1..] {
            if field.pow(ri, w[j] as u64) != field.pow(rj, w[i] as u64) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-coordinate exponents `w_i / d` of the `μ`-action on the support of `t`,
/// zero off the support.
fn support_exponents(ws: &WeightSystem, t: &[Elem]) -> Vec<u64> {
    let d = t
        .iter()
        .zip(ws.weights())
        .filter(|(c, _)| !c.is_zero())
        .fold(0, |g, (_, &w)| gcd(g, w));
    t.iter()
        .zip(ws.weights())
        .map(|(c, &w)| if c.is_zero() { 0 } else { (w / d) as u64 })
        .collect()
}

/// All `F_q` tuples in the class of `t`, in `μ` order (`μ = 1` first).
pub fn class_members(field: &Field, ws: &WeightSystem, t: &[Elem]) -> Result<Vec<Vec<Elem>>> {
    check_tuple(field, ws, t)?;
    if t.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroTuple);
    }
    let exps = support_exponents(ws, t);
    Ok(field
        .units()
        .map(|mu| {
            t.iter().zip(&exps).map(|(&c, &e)| field.mul(field.pow(mu, e), c)).collect()
        })
        .collect())
}

pub fn canonicalize(field: &Field, ws: &WeightSystem, t: &[Elem]) -> Result<ProjPoint> {
    let coords = class_members(field, ws, t)?.into_iter().min().expect("q - 1 >= 1 members");
    Ok(ProjPoint { coords })
}

/// Every `F_q`-point once, sorted by canonical representative.
pub fn enumerate_points(ws: &WeightSystem, field: &Field) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    for_each_tuple(field.order(), ws.len(), |t| {
        if t.iter().any(|c| !c.is_zero()) {
            let canon = canonicalize(field, ws, t).expect("valid tuple");
            if canon.coords == t {
                out.push(canon);
            }
        }
        true
    });
    out.sort();
    out
}

/// Calls `f` on exactly one tuple of each class, stopping early when `f`
/// returns `false`. The tuples are not canonical: a class with some nonzero
/// weight-one coordinate is visited through the member whose first such
/// coordinate is `1`. Suitable for large fields where canonicalising every
/// tuple is too slow.
pub fn for_each_representative(
    field: &Field,
    ws: &WeightSystem,
    mut f: impl FnMut(&[Elem]) -> bool,
) -> bool {
    let q = field.order();
    let n = ws.len();
    let w = ws.weights();
    let unit_pos: Vec<usize> = (0..n).filter(|&i| w[i] == 1).collect();
    let mut t = vec![Elem::ZERO; n];

    for (k, &lead) in unit_pos.iter().enumerate() {
        let zeros = &unit_pos[..k];
        let free: Vec<usize> = (0..n).filter(|&i| i != lead && !zeros.contains(&i)).collect();
        t.iter_mut().for_each(|c| *c = Elem::ZERO);
        t[lead] = Elem::ONE;
        let mut digits = vec![0u32; free.len()];
        loop {
            for (&pos, &d) in free.iter().zip(&digits) {
                t[pos] = Elem(d);
            }
            if !f(&t) {
                return false;
            }
            if !advance(&mut digits, q) {
                break;
            }
        }
    }

    // Classes supported on the heavier coordinates only.
    let heavy: Vec<usize> = (0..n).filter(|&i| w[i] != 1).collect();
    if heavy.is_empty() {
        return true;
    }
    let size = (q as usize).pow(heavy.len() as u32);
    let mut seen = vec![false; size];
    let index_of = |t: &[Elem]| heavy.iter().rev().fold(0usize, |acc, &i| acc * q as usize + t[i].index());
    t.iter_mut().for_each(|c| *c = Elem::ZERO);
    let mut digits = vec![0u32; heavy.len()];
    while advance(&mut digits, q) {
        for (&pos, &d) in heavy.iter().zip(&digits) {
            t[pos] = Elem(d);
        }
        let idx = index_of(&t);
        if seen[idx] {
            continue;
        }
        let exps = support_exponents(ws, &t);
        for mu in field.units() {
            let m: Vec<Elem> =
                t.iter().zip(&exps).map(|(&c, &e)| field.mul(field.pow(mu, e), c)).collect();
            seen[index_of(&m)] = true;
        }
        if !f(&t) {
            return false;
        }
    }
    true
}

/// Visits every tuple in `F_q^n` in little-endian counter order.
pub(crate) fn for_each_tuple(q: u32, n: usize, mut f: impl FnMut(&[Elem]) -> bool) {
    let mut t = vec![Elem::ZERO; n];
    loop {
        if !f(&t) {
            return;
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            t[i].0 += 1;
            if t[i].0 < q {
                break;
            }
            t[i] = Elem::ZERO;
            i += 1;
        }
    }
}

/// Little-endian mixed-radix increment; `false` once it wraps to zero.
pub(crate) fn advance(digits: &mut [u32], q: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

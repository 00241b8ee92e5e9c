//! Graded surface families: monomial bases with coefficient slots, plus the
//! formal operations the search needs (evaluation, exponent reduction,
//! restriction to a locus, formal partials, point counting).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::wps::{self, WeightSystem};

pub mod poly;

pub use poly::Poly;

/// Exponent vector, one entry per ambient variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Key used in surface files, e.g. `"1.0.0.2"` for `x w^2`.
    pub fn key(&self) -> String {
        self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(".")
    }

    /// Human-readable form over the given variable names.
    pub fn pretty(&self, vars: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(vars)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn eval(&self, field: &Field, t: &[Elem]) -> Elem {
        self.0
            .iter()
            .zip(t)
            .fold(Elem::ONE, |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u64)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('.')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Monomial)
            .map_err(|_| Error::schema("monomial", format!("bad monomial key {s:?}")))
    }
}

impl From<Monomial> for String {
    fn from(m: Monomial) -> String {
        m.key()
    }
}

impl TryFrom<String> for Monomial {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Descending graded-lex order: higher ordinary degree first, then larger
/// exponent vectors first.
pub fn grlex_cmp(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    b.total_degree().cmp(&a.total_degree()).then_with(|| b.0.cmp(&a.0))
}

/// Point-counting convention: classes of tuples, or raw nonzero tuples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    #[default]
    Projective,
    Affine,
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(CountMode::Projective),
            "affine" => Ok(CountMode::Affine),
            _ => Err(Error::schema("mode", format!("unknown count mode {s:?}"))),
        }
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMode::Projective => "projective",
            CountMode::Affine => "affine",
        })
    }
}

/// A family of equations: fixed terms plus free coefficient slots.
///
/// Fixed coefficients are element indices of whichever field a surface of the
/// family lives in. Built-in families only use `1`, which is index 1 in every
/// field; derived families (reductions, restrictions, partials) are tied to
/// one field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: String,
    pub vars: Vec<String>,
    pub ambient: WeightSystem,
    pub degree: u32,
    pub fixed: Vec<(Monomial, Elem)>,
    pub free: Vec<Monomial>,
    /// Every term has weighted degree `degree`.
    pub homogeneous: bool,
    /// Solution sets are unions of scaling classes, so counting on class
    /// representatives is exact.
    pub class_closed: bool,
}

impl FamilySpec {
    /// A homogeneous family. Checks that every monomial has the stated
    /// weighted degree and that no monomial appears twice.
    pub fn new(
        id: impl Into<String>,
        vars: &[&str],
        ambient: WeightSystem,
        degree: u32,
        fixed: Vec<Monomial>,
        mut free: Vec<Monomial>,
    ) -> Result<Self> {
        let id = id.into();
        let n = ambient.len();
        if vars.len() != n {
            return Err(Error::BadFamily(format!("{id}: {} names for {n} variables", vars.len())));
        }
        let mut all: Vec<&Monomial> = fixed.iter().chain(&free).collect();
        for m in &all {
            if m.0.len() != n || m.weighted_degree(ambient.weights()) != degree {
                return Err(Error::BadFamily(format!("{id}: monomial {m} is not of degree {degree}")));
            }
        }
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadFamily(format!("{id}: repeated monomial")));
        }
        free.sort_by(grlex_cmp);
        Ok(FamilySpec {
            id,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            ambient,
            degree,
            fixed: fixed.into_iter().map(|m| (m, Elem::ONE)).collect(),
            free,
            homogeneous: true,
            class_closed: true,
        })
    }

    pub fn slot_count(&self) -> usize {
        self.free.len()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn slot_of(&self, m: &Monomial) -> Option<usize> {
        self.free.iter().position(|f| f == m)
    }

    /// Slot named either by index or by monomial key.
    pub fn parse_slot(&self, s: &str) -> Result<usize> {
        if let Ok(i) = s.parse::<usize>() {
            if i < self.free.len() && !s.contains('.') {
                return Ok(i);
            }
        }
        let m: Monomial = s.parse()?;
        self.slot_of(&m).ok_or_else(|| Error::UnknownSlot(s.to_string(), self.id.clone()))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Identifiers of the built-in families.
pub const BUILTIN_FAMILIES: [&str; 6] =
    ["DP1_CHAR2", "DP1_CHAR3", "DP1_CLASSIC", "DP2_CHAR2", "DP2_CLASSIC", "CUBIC_P3"];

fn binary(deg: u32, tail: [u32; 2]) -> Vec<Monomial> {
    (0..=deg).map(|a| Monomial(vec![a, deg - a, tail[0], tail[1]])).collect()
}

fn ternary(deg: u32, w: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            out.push(Monomial(vec![a, b, deg - a - b, w]));
        }
    }
    out
}

pub fn builtin(id: &str) -> Result<Arc<FamilySpec>> {
    let dp1 = || WeightSystem::new(vec![1, 1, 2, 3]).unwrap();
    let dp2 = || WeightSystem::new(vec![1, 1, 1, 2]).unwrap();
    let w2z3 = || vec![Monomial(vec![0, 0, 0, 2]), Monomial(vec![0, 0, 3, 0])];
    let xyzw = ["x", "y", "z", "w"];
    let spec = match id {
        "DP1_CHAR2" => {
            let mut free = binary(1, [1, 1]);
            free.extend(binary(3, [0, 1]));
            free.extend(binary(4, [1, 0]));
            free.extend(binary(6, [0, 0]));
            FamilySpec::new(id, &xyzw, dp1(), 6, w2z3(), free)?
        }
        "DP1_CHAR3" => {
            let mut free = binary(2, [2, 0]);
            free.extend(binary(4, [1, 0]));
            free.extend(binary(6, [0, 0]));
            FamilySpec::new(id, &xyzw, dp1(), 6, w2z3(), free)?
        }
        "DP1_CLASSIC" => {
            let mut free = binary(4, [1, 0]);
            free.extend(binary(6, [0, 0]));
            FamilySpec::new(id, &xyzw, dp1(), 6, w2z3(), free)?
        }
        "DP2_CHAR2" => {
            let mut free = ternary(2, 1);
            free.extend(ternary(4, 0));
            FamilySpec::new(id, &xyzw, dp2(), 4, vec![Monomial(vec![0, 0, 0, 2])], free)?
        }
        "DP2_CLASSIC" => {
            FamilySpec::new(id, &xyzw, dp2(), 4, vec![Monomial(vec![0, 0, 0, 2])], ternary(4, 0))?
        }
        "CUBIC_P3" => {
            let mut free = Vec::new();
            for a in 0..=3u32 {
                for b in 0..=3 - a {
                    for c in 0..=3 - a - b {
                        free.push(Monomial(vec![a, b, c, 3 - a - b - c]));
                    }
                }
            }
            FamilySpec::new(id, &xyzw, WeightSystem::standard(3), 3, vec![], free)?
        }
        _ => return Err(Error::UnknownFamily(id.to_string())),
    };
    Ok(Arc::new(spec))
}

/// A member of a family over a concrete field.
#[derive(Clone, Debug)]
pub struct Surface {
    family: Arc<FamilySpec>,
    field: Arc<Field>,
    coeffs: Vec<Elem>,
}

impl PartialEq for Surface {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Surface {
    pub fn new(family: Arc<FamilySpec>, field: Arc<Field>, coeffs: Vec<Elem>) -> Result<Self> {
        if coeffs.len() != family.slot_count() {
            return Err(Error::CoefficientCount { expected: family.slot_count(), got: coeffs.len() });
        }
        for &c in coeffs.iter().chain(family.fixed.iter().map(|(_, c)| c)) {
            field.check(c)?;
        }
        Ok(Surface { family, field, coeffs })
    }

    pub fn zero(family: Arc<FamilySpec>, field: Arc<Field>) -> Self {
        let n = family.slot_count();
        Surface { family, field, coeffs: vec![Elem::ZERO; n] }
    }

    /// Sets the listed free monomials; everything else is zero.
    pub fn from_terms(
        family: Arc<FamilySpec>,
        field: Arc<Field>,
        terms: &[(Monomial, Elem)],
    ) -> Result<Self> {
        let mut s = Surface::zero(family, field);
        for (m, c) in terms {
            let slot = s
                .family
                .slot_of(m)
                .ok_or_else(|| Error::UnknownSlot(m.key(), s.family.id.clone()))?;
            s.coeffs[slot] = s.field.add(s.coeffs[slot], s.field.check(*c)?);
        }
        Ok(s)
    }

    pub fn family(&self) -> &Arc<FamilySpec> {
        &self.family
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coefficients(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn set(&mut self, slot: usize, value: Elem) {
        self.coeffs[slot] = value;
    }

    /// All nonzero terms, fixed ones first, with like monomials combined.
    pub fn terms(&self) -> Vec<(Monomial, Elem)> {
        let mut acc: BTreeMap<&Monomial, Elem> = BTreeMap::new();
        let all = self
            .family
            .fixed
            .iter()
            .map(|(m, c)| (m, *c))
            .chain(self.family.free.iter().zip(self.coeffs.iter().copied()));
        for (m, c) in all {
            let slot = acc.entry(m).or_insert(Elem::ZERO);
            *slot = self.field.add(*slot, c);
        }
        let mut out: Vec<(Monomial, Elem)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c)).collect();
        let w = self.family.ambient.weights();
        out.sort_by_key(|(m, _)| {
            let rev: Vec<u32> = m.0.iter().rev().copied().collect();
            std::cmp::Reverse((m.weighted_degree(w), rev))
        });
        out
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.family.nvars(), self.terms())
    }

    pub fn evaluate(&self, t: &[Elem]) -> Result<Elem> {
        if t.len() != self.family.nvars() {
            return Err(Error::LengthMismatch(t.len(), self.family.nvars()));
        }
        for &c in t {
            self.field.check(c)?;
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &[Elem]) -> Elem {
        let f = &*self.field;
        let fixed = self.family.fixed.iter().map(|(m, c)| (m, *c));
        let free = self.family.free.iter().zip(self.coeffs.iter().copied());
        fixed.chain(free).fold(Elem::ZERO, |acc, (m, c)| {
            if c.is_zero() {
                acc
            } else {
                f.add(acc, f.mul(c, m.eval(f, t)))
            }
        })
    }

    /// Human-readable equation.
    pub fn pretty(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .iter()
            .map(|(m, c)| {
                let mono = m.pretty(&self.family.vars);
                if *c == Elem::ONE {
                    mono
                } else if mono == "1" {
                    self.field.format(*c)
                } else {
                    format!("{}*{}", self.field.format(*c), mono)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Number of points on the surface. With `early_exit = Some(b)` the scan
    /// stops once more than `b` points are found and returns that count.
    pub fn count_points(&self, mode: CountMode, early_exit: Option<u64>) -> u64 {
        count_points(self, mode, early_exit)
    }
}

pub fn count_points(s: &Surface, mode: CountMode, early_exit: Option<u64>) -> u64 {
    let field = &*s.field;
    let ws = &s.family.ambient;
    let limit = early_exit.map(|b| b + 1).unwrap_or(u64::MAX);
    let mut count = 0u64;
    if s.family.class_closed {
        let weight = match mode {
            CountMode::Projective => 1,
            CountMode::Affine => field.order() as u64 - 1,
        };
        for p in wps::enumerate_points(ws, field) {
            if s.eval_unchecked(p.coords()).is_zero() {
                count += weight;
                if count >= limit {
                    break;
                }
            }
        }
        return count;
    }
    let mut seen = std::collections::BTreeSet::new();
    wps::for_each_tuple(field.order(), ws.len(), |t| {
        if t.iter().all(|c| c.is_zero()) || !s.eval_unchecked(t).is_zero() {
            return true;
        }
        match mode {
            CountMode::Affine => count += 1,
            CountMode::Projective => {
                if seen.insert(wps::canonicalize(field, ws, t).expect("nonzero tuple")) {
                    count += 1;
                }
            }
        }
        count < limit
    });
    count
}

/// `e ↦ ((e − 1) mod (q − 1)) + 1` for `e > 0`, using `x^q = x` on `F_q`.
pub fn reduce_exponent(e: u32, q: u32) -> u32 {
    if e == 0 {
        0
    } else {
        (e - 1) % (q - 1) + 1
    }
}

/// How the slots of a source family land in a derived family: target slot
/// and multiplier, or `None` when the slot vanishes.
pub type SlotMap = Vec<Option<(usize, Elem)>>;

/// Builds a derived family from images of the source's free slots and its
/// fixed terms. Distinct images become slots (grlex order); like fixed terms
/// are summed and zero ones dropped.
#[allow(clippy::too_many_arguments)]
fn derive_family(
    field: &Field,
    id: String,
    vars: Vec<String>,
    ambient: WeightSystem,
    degree: u32,
    class_closed: bool,
    free_images: Vec<Option<(Monomial, Elem)>>,
    fixed_images: Vec<(Monomial, Elem)>,
) -> (Arc<FamilySpec>, SlotMap) {
    let mut free: Vec<Monomial> =
        free_images.iter().flatten().map(|(m, _)| m.clone()).collect();
    free.sort_by(grlex_cmp);
    free.dedup();
    let map = free_images
        .into_iter()
        .map(|img| img.map(|(m, mult)| (free.iter().position(|f| *f == m).unwrap(), mult)))
        .collect();
    let mut fixed: BTreeMap<Monomial, Elem> = BTreeMap::new();
    for (m, c) in fixed_images {
        let slot = fixed.entry(m).or_insert(Elem::ZERO);
        *slot = field.add(*slot, c);
    }
    let mut fixed: Vec<(Monomial, Elem)> = fixed.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    fixed.sort_by(|a, b| grlex_cmp(&a.0, &b.0));
    let homogeneous = fixed
        .iter()
        .map(|(m, _)| m)
        .chain(&free)
        .all(|m| m.weighted_degree(ambient.weights()) == degree);
    let spec = FamilySpec { id, vars, ambient, degree, fixed, free, homogeneous, class_closed };
    (Arc::new(spec), map)
}

fn apply_map(map: &SlotMap, family: Arc<FamilySpec>, s: &Surface) -> Surface {
    let f = &*s.field;
    let mut coeffs = vec![Elem::ZERO; family.slot_count()];
    for (c, target) in s.coeffs.iter().zip(map) {
        if let Some((slot, mult)) = target {
            coeffs[*slot] = f.add(coeffs[*slot], f.mul(*c, *mult));
        }
    }
    Surface { family, field: s.field.clone(), coeffs }
}

/// The collapsed family searched over `F_q`, with each source slot's target.
/// Returns the family itself when no exponent exceeds `q − 1`.
pub fn reduction_map(family: &Arc<FamilySpec>, field: &Field) -> (Arc<FamilySpec>, SlotMap) {
    let q = field.order();
    let all = family.fixed.iter().map(|(m, _)| m).chain(&family.free);
    if all.flat_map(|m| m.0.iter()).all(|&e| e < q) {
        let identity = (0..family.slot_count()).map(|i| Some((i, Elem::ONE))).collect();
        return (family.clone(), identity);
    }
    let red = |m: &Monomial| Monomial(m.0.iter().map(|&e| reduce_exponent(e, q)).collect());
    derive_family(
        field,
        format!("{}/reduced@{}", family.id, field.spec().literal()),
        family.vars.clone(),
        family.ambient.clone(),
        family.degree,
        family.class_closed,
        family.free.iter().map(|m| Some((red(m), Elem::ONE))).collect(),
        family.fixed.iter().map(|(m, c)| (red(m), *c)).collect(),
    )
}

pub fn reduced_family(family: &Arc<FamilySpec>, field: &Field) -> Arc<FamilySpec> {
    reduction_map(family, field).0
}

/// Rewrites every exponent with `x^q = x`; the result has the same value as
/// `s` at every `F_q` tuple.
pub fn reduce_exponents(s: &Surface) -> Surface {
    let (family, map) = reduction_map(&s.family, &s.field);
    apply_map(&map, family, s)
}

/// Per-variable substitution for [`restrict`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subst {
    Keep,
    Value(Elem),
}

/// Derived family after substituting values for some variables.
pub fn restriction_map(
    family: &Arc<FamilySpec>,
    field: &Field,
    subst: &[Subst],
) -> Result<(Arc<FamilySpec>, SlotMap)> {
    if subst.len() != family.nvars() {
        return Err(Error::LengthMismatch(subst.len(), family.nvars()));
    }
    for s in subst {
        if let Subst::Value(v) = s {
            field.check(*v)?;
        }
    }
    let kept: Vec<usize> = (0..subst.len()).filter(|&i| subst[i] == Subst::Keep).collect();
    let image = |m: &Monomial| -> (Monomial, Elem) {
        let mut mult = Elem::ONE;
        for (i, s) in subst.iter().enumerate() {
            if let Subst::Value(v) = s {
                mult = field.mul(mult, field.pow(*v, m.0[i] as u64));
            }
        }
        (Monomial(kept.iter().map(|&i| m.0[i]).collect()), mult)
    };
    let tag: Vec<String> = subst
        .iter()
        .zip(&family.vars)
        .filter_map(|(s, v)| match s {
            Subst::Value(c) => Some(format!("{v}={}", field.format(*c))),
            Subst::Keep => None,
        })
        .collect();
    let free_images = family
        .free
        .iter()
        .map(|m| {
            let (m2, mult) = image(m);
            (!mult.is_zero()).then_some((m2, mult))
        })
        .collect();
    let fixed_images = family
        .fixed
        .iter()
        .map(|(m, c)| {
            let (m2, mult) = image(m);
            (m2, field.mul(*c, mult))
        })
        .collect();
    Ok(derive_family(
        field,
        format!("{}|{}", family.id, tag.join(",")),
        kept.iter().map(|&i| family.vars[i].clone()).collect(),
        WeightSystem::relaxed(kept.iter().map(|&i| family.ambient.weights()[i]).collect()),
        family.degree,
        false,
        free_images,
        fixed_images,
    ))
}

/// Substitutes values for some variables and folds them into the
/// coefficients.
pub fn restrict(s: &Surface, subst: &[Subst]) -> Result<Surface> {
    let (family, map) = restriction_map(&s.family, &s.field, subst)?;
    Ok(apply_map(&map, family, s))
}

/// Formal partial derivative; `c x^e ↦ (e mod p) c x^{e−1}`.
pub fn partial_derivative(s: &Surface, var: usize) -> Result<Surface> {
    let fam = &s.family;
    if var >= fam.nvars() {
        return Err(Error::BadVariable(var));
    }
    let field = &*s.field;
    let diff = |m: &Monomial| -> Option<(Monomial, Elem)> {
        let e = m.0[var];
        let k = field.from_int(e as i64);
        if k.is_zero() {
            return None;
        }
        let mut m2 = m.clone();
        m2.0[var] -= 1;
        Some((m2, k))
    };
    let w = fam.ambient.weights()[var];
    let (family, map) = derive_family(
        field,
        format!("d{}({})", fam.vars[var], fam.id),
        fam.vars.clone(),
        fam.ambient.clone(),
        fam.degree.saturating_sub(w),
        fam.homogeneous,
        fam.free.iter().map(diff).collect(),
        fam.fixed
            .iter()
            .filter_map(|(m, c)| diff(m).map(|(m2, k)| (m2, field.mul(*c, k))))
            .collect(),
    );
    Ok(apply_map(&map, family, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    pub(crate) fn example_cubic() -> Surface {
        // x w^2 + x^2 w + y^3 + z^2 y + z^3 + x^3 + x y z + x^2 y + x^2 z
        let terms: Vec<(Monomial, Elem)> = [
            [1, 0, 0, 2],
            [2, 0, 0, 1],
            [0, 3, 0, 0],
            [0, 1, 2, 0],
            [0, 0, 3, 0],
            [3, 0, 0, 0],
            [1, 1, 1, 0],
            [2, 1, 0, 0],
            [2, 0, 1, 0],
        ]
        .iter()
        .map(|e| (m(e), Elem::ONE))
        .collect();
        Surface::from_terms(builtin("CUBIC_P3").unwrap(), Field::parse("2").unwrap(), &terms)
            .unwrap()
    }

    fn random_surface(family: &Arc<FamilySpec>, field: &Arc<Field>, rng: &mut ChaCha8Rng) -> Surface {
        let coeffs = (0..family.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
        Surface::new(family.clone(), field.clone(), coeffs).unwrap()
    }

    #[test]
    fn builtin_slot_counts() {
        let counts: Vec<usize> =
            BUILTIN_FAMILIES.iter().map(|id| builtin(id).unwrap().slot_count()).collect();
        assert_eq!(counts, vec![2 + 4 + 5 + 7, 3 + 5 + 7, 5 + 7, 6 + 15, 15, 20]);
        assert!(builtin("DP3").is_err());
    }

    #[test]
    fn family_validation() {
        let ws = WeightSystem::new(vec![1, 1, 1, 2]).unwrap();
        let bad = FamilySpec::new("bad", &["x", "y", "z", "w"], ws.clone(), 4, vec![], vec![m(&[1, 0, 0, 0])]);
        assert!(bad.is_err());
        let dup = FamilySpec::new(
            "dup",
            &["x", "y", "z", "w"],
            ws,
            4,
            vec![m(&[0, 0, 0, 2])],
            vec![m(&[0, 0, 0, 2])],
        );
        assert!(dup.is_err());
    }

    #[test]
    fn evaluate_examples() {
        let cubic = example_cubic();
        assert_eq!(cubic.evaluate(&[Elem(0), Elem(1), Elem(0), Elem(0)]).unwrap(), Elem::ONE);
        let dp2 = Surface::zero(builtin("DP2_CLASSIC").unwrap(), Field::parse("5").unwrap());
        assert_eq!(dp2.evaluate(&[Elem(0), Elem(0), Elem(0), Elem(1)]).unwrap(), Elem::ONE);
        assert!(dp2.evaluate(&[Elem(0), Elem(0), Elem(0)]).is_err());
        assert!(dp2.evaluate(&[Elem(0), Elem(0), Elem(0), Elem(5)]).is_err());
    }

    #[test]
    fn graded_homogeneity_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lit in ["2", "3"] {
            let field = Field::parse(lit).unwrap();
            for id in BUILTIN_FAMILIES {
                let fam = builtin(id).unwrap();
                let s = random_surface(&fam, &field, &mut rng);
                let d = fam.degree as u64;
                wps::for_each_tuple(field.order(), 4, |t| {
                    for lambda in field.units() {
                        let st = wps::scale(&field, &fam.ambient, t, lambda).unwrap();
                        let lhs = s.evaluate(&st).unwrap();
                        let rhs = field.mul(field.pow(lambda, d), s.evaluate(t).unwrap());
                        assert_eq!(lhs, rhs);
                    }
                    true
                });
            }
        }
    }

    #[test]
    fn reduce_exponent_examples() {
        assert_eq!(reduce_exponent(2, 2), 1);
        assert_eq!(reduce_exponent(3, 2), 1);
        assert_eq!(reduce_exponent(4, 3), 2);
        assert_eq!(reduce_exponent(3, 3), 1);
        assert_eq!(reduce_exponent(0, 3), 0);
        assert_eq!(reduce_exponent(6, 4), 3);
    }

    #[test]
    fn reduced_family_char2_over_f2() {
        let f2 = Field::parse("2").unwrap();
        let red = reduced_family(&builtin("DP1_CHAR2").unwrap(), &f2);
        // w + z + wz(px+qy) + w(ax+bxy+cy) + z(dx+exy+fy) + gx+hxy+iy
        let expected: Vec<Monomial> = [
            [1, 0, 1, 1], [0, 1, 1, 1],
            [1, 0, 0, 1], [1, 1, 0, 1], [0, 1, 0, 1],
            [1, 0, 1, 0], [1, 1, 1, 0], [0, 1, 1, 0],
            [1, 0, 0, 0], [1, 1, 0, 0], [0, 1, 0, 0],
        ]
        .iter()
        .map(|e| m(e))
        .collect();
        assert_eq!(red.slot_count(), 11);
        let mut got = red.free.clone();
        got.sort();
        let mut want = expected;
        want.sort();
        assert_eq!(got, want);
        let fixed: Vec<_> = red.fixed.iter().map(|(m, c)| (m.clone(), *c)).collect();
        assert!(fixed.contains(&(m(&[0, 0, 0, 1]), Elem::ONE)));
        assert!(fixed.contains(&(m(&[0, 0, 1, 0]), Elem::ONE)));
        assert!(!red.homogeneous);
    }

    #[test]
    fn reduced_family_char3_over_f3() {
        let f3 = Field::parse("3").unwrap();
        let red = reduced_family(&builtin("DP1_CHAR3").unwrap(), &f3);
        // z^2(ax^2+bxy+cy^2) + z(dx^2+exy+fx^2y^2+gy^2) + (px^2+qxy+rx^2y^2+sy^2)
        let mut want: Vec<Monomial> = [
            [2, 0, 2, 0], [1, 1, 2, 0], [0, 2, 2, 0],
            [2, 0, 1, 0], [1, 1, 1, 0], [2, 2, 1, 0], [0, 2, 1, 0],
            [2, 0, 0, 0], [1, 1, 0, 0], [2, 2, 0, 0], [0, 2, 0, 0],
        ]
        .iter()
        .map(|e| m(e))
        .collect();
        want.sort();
        let mut got = red.free.clone();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn reduction_is_identity_for_large_fields() {
        let f7 = Field::parse("7").unwrap();
        for id in BUILTIN_FAMILIES {
            let fam = builtin(id).unwrap();
            assert!(Arc::ptr_eq(&reduced_family(&fam, &f7), &fam));
        }
    }

    #[test]
    fn reduction_preserves_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lit in ["2", "3", "4"] {
            let field = Field::parse(lit).unwrap();
            for id in BUILTIN_FAMILIES {
                let fam = builtin(id).unwrap();
                for _ in 0..20 {
                    let s = random_surface(&fam, &field, &mut rng);
                    let r = reduce_exponents(&s);
                    wps::for_each_tuple(field.order(), 4, |t| {
                        assert_eq!(s.evaluate(t).unwrap(), r.evaluate(t).unwrap());
                        true
                    });
                }
            }
        }
    }

    #[test]
    fn restrict_dp1_char3_to_x0_y1() {
        let f3 = Field::parse("3").unwrap();
        let red = reduced_family(&builtin("DP1_CHAR3").unwrap(), &f3);
        let mut s = Surface::zero(red.clone(), f3.clone());
        // c (z^2 y^2) = 1, g (z y^2) = 2, s (y^2) = 1, plus an x-term that must vanish
        s.set(red.slot_of(&m(&[0, 2, 2, 0])).unwrap(), Elem(1));
        s.set(red.slot_of(&m(&[0, 2, 1, 0])).unwrap(), Elem(2));
        s.set(red.slot_of(&m(&[0, 2, 0, 0])).unwrap(), Elem(1));
        s.set(red.slot_of(&m(&[2, 0, 1, 0])).unwrap(), Elem(1));
        let r = restrict(&s, &[Subst::Value(Elem(0)), Subst::Value(Elem(1)), Subst::Keep, Subst::Keep])
            .unwrap();
        assert_eq!(r.family().vars, vec!["z", "w"]);
        // w^2 + z + c z^2 + g z + s, with fixed and free z kept apart
        let fixed: Vec<_> = r.family().fixed.clone();
        assert!(fixed.contains(&(m(&[0, 2]), Elem::ONE)));
        assert!(fixed.contains(&(m(&[1, 0]), Elem::ONE)));
        let mut free = r.family().free.clone();
        free.sort();
        assert_eq!(free, vec![m(&[0, 0]), m(&[1, 0]), m(&[2, 0])]);
        assert_eq!(r.pretty(), "w^2 + z^2 + 1");
        for z in f3.elements() {
            for w in f3.elements() {
                let full = s.evaluate(&[Elem(0), Elem(1), z, w]).unwrap();
                assert_eq!(r.evaluate(&[z, w]).unwrap(), full);
            }
        }
    }

    #[test]
    fn restrict_dp1_classic_over_f5() {
        let f5 = Field::parse("5").unwrap();
        let fam = builtin("DP1_CLASSIC").unwrap();
        let mut s = Surface::zero(fam.clone(), f5.clone());
        s.set(fam.slot_of(&m(&[0, 4, 1, 0])).unwrap(), Elem(3));
        s.set(fam.slot_of(&m(&[0, 6, 0, 0])).unwrap(), Elem(4));
        s.set(fam.slot_of(&m(&[1, 5, 0, 0])).unwrap(), Elem(2));
        let r = restrict(&s, &[Subst::Value(Elem(0)), Subst::Keep, Subst::Keep, Subst::Keep]).unwrap();
        assert_eq!(r.pretty(), "w^2 + z^3 + 3*y^4*z + 4*y^6");
        let same = restrict(&s, &[Subst::Keep; 4]).unwrap();
        assert_eq!(same.terms(), s.terms());
    }

    #[test]
    fn partial_derivatives() {
        let f2 = Field::parse("2").unwrap();
        let fam = builtin("DP2_CHAR2").unwrap();
        let mut s = Surface::zero(fam.clone(), f2.clone());
        s.set(fam.slot_of(&m(&[1, 1, 0, 1])).unwrap(), Elem(1)); // w x y
        s.set(fam.slot_of(&m(&[0, 0, 2, 1])).unwrap(), Elem(1)); // w z^2
        s.set(fam.slot_of(&m(&[4, 0, 0, 0])).unwrap(), Elem(1)); // x^4
        let dw = partial_derivative(&s, 3).unwrap();
        let terms: Vec<_> = dw.terms().into_iter().map(|(m, _)| m).collect();
        assert_eq!(terms, vec![m(&[0, 0, 2, 0]), m(&[1, 1, 0, 0])]);

        let f3 = Field::parse("3").unwrap();
        let fam = builtin("DP1_CLASSIC").unwrap();
        let mut s = Surface::zero(fam.clone(), f3);
        s.set(fam.slot_of(&m(&[4, 0, 1, 0])).unwrap(), Elem(2));
        let dz = partial_derivative(&s, 2).unwrap();
        assert_eq!(dz.terms(), vec![(m(&[4, 0, 0, 0]), Elem(2))]);

        let cubic = example_cubic();
        let only_xy = Surface::from_terms(
            cubic.family().clone(),
            cubic.field().clone(),
            &[(m(&[2, 1, 0, 0]), Elem::ONE)],
        )
        .unwrap();
        assert!(partial_derivative(&only_xy, 2).unwrap().terms().is_empty());
        assert!(partial_derivative(&only_xy, 4).is_err());
    }

    #[test]
    fn count_points_examples() {
        assert_eq!(example_cubic().count_points(CountMode::Projective, None), 1);
        let zero = Surface::zero(builtin("CUBIC_P3").unwrap(), Field::parse("2").unwrap());
        assert_eq!(zero.count_points(CountMode::Projective, None), 15);
        assert_eq!(zero.count_points(CountMode::Projective, Some(3)), 4);

        // w^2 + z(2x^2 + x^2y^2 + 2y^2) + z + x^2 + 2x^2y^2 + y^2 over F_3,
        // brute force over the 9 (z, w) pairs of the x = y = 0 slice.
        let f3 = Field::parse("3").unwrap();
        let red = reduced_family(&builtin("DP1_CHAR3").unwrap(), &f3);
        let terms = [
            (m(&[2, 0, 1, 0]), Elem(2)),
            (m(&[2, 2, 1, 0]), Elem(1)),
            (m(&[0, 2, 1, 0]), Elem(2)),
            (m(&[2, 0, 0, 0]), Elem(1)),
            (m(&[2, 2, 0, 0]), Elem(2)),
            (m(&[0, 2, 0, 0]), Elem(1)),
        ];
        let s = Surface::from_terms(red, f3.clone(), &terms).unwrap();
        let mut slice = 0;
        for z in f3.elements() {
            for w in f3.elements() {
                if (z, w) != (Elem(0), Elem(0)) && s.evaluate(&[Elem(0), Elem(0), z, w]).unwrap().is_zero() {
                    slice += 1;
                }
            }
        }
        assert_eq!(slice, 2);
    }

    #[test]
    fn affine_and_projective_counts_agree_up_to_class_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lit in ["3", "4"] {
            let field = Field::parse(lit).unwrap();
            for id in ["DP1_CLASSIC", "DP2_CLASSIC", "DP2_CHAR2"] {
                let fam = builtin(id).unwrap();
                let s = random_surface(&fam, &field, &mut rng);
                let proj = s.count_points(CountMode::Projective, None);
                let aff = s.count_points(CountMode::Affine, None);
                assert_eq!(aff, proj * (field.order() as u64 - 1));
                // the raw-tuple path agrees as well
                let r = restrict(&s, &[Subst::Keep; 4]).unwrap();
                assert!(!r.family().class_closed);
                assert_eq!(r.count_points(CountMode::Affine, None), aff);
            }
        }
    }

    #[test]
    fn projective_count_invariant_under_coefficient_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = Field::parse("5").unwrap();
        let fam = builtin("CUBIC_P3").unwrap();
        for _ in 0..10 {
            let s = random_surface(&fam, &field, &mut rng);
            let n = s.count_points(CountMode::Projective, None);
            for c in field.units() {
                let scaled: Vec<Elem> = s.coefficients().iter().map(|&a| field.mul(a, c)).collect();
                let t = Surface::new(fam.clone(), field.clone(), scaled).unwrap();
                assert_eq!(t.count_points(CountMode::Projective, None), n);
            }
        }
    }

    #[test]
    fn dp1_classic_base_points_over_f3() {
        // w^2 + z^3 at z = 2 is 2 + w^2, so w in {1, 2}
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f3 = Field::parse("3").unwrap();
        let fam = builtin("DP1_CLASSIC").unwrap();
        for _ in 0..50 {
            let s = random_surface(&fam, &f3, &mut rng);
            assert!(s.evaluate(&[Elem(0), Elem(0), Elem(2), Elem(1)]).unwrap().is_zero());
            assert!(s.evaluate(&[Elem(0), Elem(0), Elem(2), Elem(2)]).unwrap().is_zero());
        }
    }

    #[test]
    fn monomial_keys() {
        let mono: Monomial = "1.0.0.2".parse().unwrap();
        assert_eq!(mono, m(&[1, 0, 0, 2]));
        assert_eq!(mono.key(), "1.0.0.2");
        assert!("1.x".parse::<Monomial>().is_err());
        let fam = builtin("CUBIC_P3").unwrap();
        assert_eq!(fam.parse_slot("1.0.0.2").unwrap(), fam.slot_of(&mono).unwrap());
        assert_eq!(fam.parse_slot("3").unwrap(), 3);
        assert!(fam.parse_slot("4.0.0.0").is_err());
    }
}

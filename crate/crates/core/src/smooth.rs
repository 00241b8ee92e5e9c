//! Jacobian-criterion singularity search over a field and its small
//! extensions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{partial_derivative, Surface};
use crate::gf::{Elem, Extension, Field};
use crate::wps::{self, ProjPoint};

/// Largest extension field scanned.
pub const EXTENSION_CAP: u32 = 4096;

/// Default maximal extension degree.
pub const DEFAULT_BOUND: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SmoothnessStatus {
    SmoothUpTo {
        bound: u32,
    },
    SingularAt {
        /// Coordinates as element indices of `F_{q^k}`.
        witness: Vec<Elem>,
        /// The same coordinates as a point literal over `F_{q^k}`.
        literal: String,
        k: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessVerdict {
    #[serde(flatten)]
    pub status: SmoothnessStatus,
    pub checked: Vec<u32>,
}

impl SmoothnessVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self.status, SmoothnessStatus::SmoothUpTo { .. })
    }
}

/// Singular tuples over one extension.
#[derive(Clone, Debug)]
pub struct SingularTuples {
    pub field: std::sync::Arc<Field>,
    pub points: Vec<ProjPoint>,
}

/// `F` and its partials with coefficients embedded in `F_{q^k}`, cheapest
/// first.
struct Jacobian {
    ext: std::sync::Arc<Field>,
    polys: Vec<Vec<(Vec<u32>, Elem)>>,
    max_exp: Vec<u32>,
}

impl Jacobian {
    fn new(s: &Surface, ext: &Extension) -> Result<Self> {
        let n = s.family().nvars();
        let mut polys = vec![embed_terms(s, ext)];
        for v in 0..n {
            polys.push(embed_terms(&partial_derivative(s, v)?, ext));
        }
        polys.retain(|p| !p.is_empty());
        polys.sort_by_key(|p| p.len());
        let mut max_exp = vec![0u32; n];
        for (e, _) in polys.iter().flatten() {
            for (m, &x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(x);
            }
        }
        Ok(Jacobian { ext: ext.field().clone(), polys, max_exp })
    }

    /// Whether every polynomial vanishes at `t`.
    fn vanishes(&self, t: &[Elem], pw: &mut [Vec<Elem>]) -> bool {
        let f = &*self.ext;
        for (i, &x) in t.iter().enumerate() {
            let row = &mut pw[i];
            row[0] = Elem::ONE;
            for e in 1..row.len() {
                row[e] = f.mul(row[e - 1], x);
            }
        }
        self.polys.iter().all(|poly| {
            poly.iter()
                .fold(Elem::ZERO, |acc, (e, c)| {
                    let v = e.iter().enumerate().fold(*c, |a, (i, &k)| f.mul(a, pw[i][k as usize]));
                    f.add(acc, v)
                })
                .is_zero()
        })
    }

    fn power_rows(&self) -> Vec<Vec<Elem>> {
        self.max_exp.iter().map(|&m| vec![Elem::ZERO; m as usize + 1]).collect()
    }
}

fn embed_terms(s: &Surface, ext: &Extension) -> Vec<(Vec<u32>, Elem)> {
    s.terms().into_iter().map(|(m, c)| (m.0, ext.embed(c))).collect()
}

/// Visits one tuple per class when the family is class-closed, otherwise
/// every nonzero tuple.
fn scan(s: &Surface, field: &Field, f: impl FnMut(&[Elem]) -> bool) -> bool {
    let ws = &s.family().ambient;
    if s.family().homogeneous {
        wps::for_each_representative(field, ws, f)
    } else {
        let mut f = f;
        let mut go = true;
        wps::for_each_tuple(field.order(), ws.len(), |t| {
            if t.iter().any(|c| !c.is_zero()) {
                go = f(t);
            }
            go
        });
        go
    }
}

/// All points over `F_{q^k}` where the surface and every formal partial
/// vanish, canonicalised and sorted.
pub fn singular_tuples(s: &Surface, k: u32) -> Result<SingularTuples> {
    let ext = Extension::new(s.field(), k, EXTENSION_CAP)?;
    let jac = Jacobian::new(s, &ext)?;
    let lf = ext.field().clone();
    let ws = &s.family().ambient;
    let mut pw = jac.power_rows();
    let mut points = Vec::new();
    scan(s, &lf, |t| {
        if jac.vanishes(t, &mut pw) {
            points.push(wps::canonicalize(&lf, ws, t).expect("nonzero tuple"));
        }
        true
    });
    points.sort();
    points.dedup();
    Ok(SingularTuples { field: lf, points })
}

/// First singular point found over `F_{q^k}` for `k = 1..=bound`, or a
/// certificate that none exists up to that degree.
pub fn is_smooth_up_to(s: &Surface, bound: u32) -> Result<SmoothnessVerdict> {
    if bound == 0 {
        return Err(Error::BadExtensionDegree);
    }
    let mut checked = Vec::new();
    for k in 1..=bound {
        let ext = Extension::new(s.field(), k, EXTENSION_CAP)?;
        let jac = Jacobian::new(s, &ext)?;
        let lf = ext.field().clone();
        let mut pw = jac.power_rows();
        let mut witness = None;
        scan(s, &lf, |t| {
            if jac.vanishes(t, &mut pw) {
                witness = Some(t.to_vec());
                false
            } else {
                true
            }
        });
        checked.push(k);
        if let Some(witness) = witness {
            let literal = wps::format_point(&lf, &witness);
            return Ok(SmoothnessVerdict {
                status: SmoothnessStatus::SingularAt { witness, literal, k },
                checked,
            });
        }
    }
    Ok(SmoothnessVerdict { status: SmoothnessStatus::SmoothUpTo { bound }, checked })
}

/// Singular points of the affine hypersurface `s = 0` over `F_{q^k}`,
/// including the origin. Used for fibre curves in `(z, w)`.
pub fn affine_singular_points(s: &Surface, k: u32) -> Result<Vec<Vec<Elem>>> {
    let ext = Extension::new(s.field(), k, EXTENSION_CAP)?;
    let jac = Jacobian::new(s, &ext)?;
    let lf = ext.field().clone();
    let mut pw = jac.power_rows();
    let mut out = Vec::new();
    wps::for_each_tuple(lf.order(), s.family().nvars(), |t| {
        if jac.vanishes(t, &mut pw) {
            out.push(t.to_vec());
        }
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, Monomial, Surface, BUILTIN_FAMILIES};
    use crate::gf::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    fn cubic() -> Surface {
        let terms: Vec<(Monomial, Elem)> = [
            [1, 0, 0, 2], [2, 0, 0, 1], [0, 3, 0, 0], [0, 1, 2, 0], [0, 0, 3, 0],
            [3, 0, 0, 0], [1, 1, 1, 0], [2, 1, 0, 0], [2, 0, 1, 0],
        ]
        .iter()
        .map(|e| (m(e), Elem::ONE))
        .collect();
        Surface::from_terms(builtin("CUBIC_P3").unwrap(), Field::parse("2").unwrap(), &terms).unwrap()
    }

    /// Naive oracle: evaluates every partial as a separate surface on every
    /// nonzero tuple of `F_{q^k}`, with coefficients embedded by hand.
    fn brute_singular(s: &Surface, k: u32) -> Vec<ProjPoint> {
        let ext = Extension::new(s.field(), k, EXTENSION_CAP).unwrap();
        let lf = ext.field();
        let n = s.family().nvars();
        let mut polys = vec![s.terms()];
        for v in 0..n {
            polys.push(partial_derivative(s, v).unwrap().terms());
        }
        let mut out = Vec::new();
        wps::for_each_tuple(lf.order(), n, |t| {
            if t.iter().all(|c| c.is_zero()) {
                return true;
            }
            let all_zero = polys.iter().all(|p| {
                let mut acc = Elem::ZERO;
                for (mono, c) in p {
                    acc = lf.add(acc, lf.mul(ext.embed(*c), mono.eval(lf, t)));
                }
                acc.is_zero()
            });
            if all_zero {
                out.push(wps::canonicalize(lf, &s.family().ambient, t).unwrap());
            }
            true
        });
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn example_cubic_is_smooth() {
        let s = cubic();
        assert!(singular_tuples(&s, 1).unwrap().points.is_empty());
        let v = is_smooth_up_to(&s, 3).unwrap();
        assert_eq!(v.status, SmoothnessStatus::SmoothUpTo { bound: 3 });
        assert_eq!(v.checked, vec![1, 2, 3]);
    }

    #[test]
    fn char2_dp2_without_w_term_is_singular() {
        let fam = builtin("DP2_CHAR2").unwrap();
        let s = Surface::from_terms(fam, Field::parse("2").unwrap(), &[(m(&[4, 0, 0, 0]), Elem::ONE)])
            .unwrap();
        let sing = singular_tuples(&s, 1).unwrap();
        assert!(!sing.points.is_empty());
        assert_eq!(sing.points, brute_singular(&s, 1));
    }

    #[test]
    fn zero_surface_is_singular_everywhere() {
        let f3 = Field::parse("3").unwrap();
        let s = Surface::zero(builtin("CUBIC_P3").unwrap(), f3.clone());
        let pts = singular_tuples(&s, 1).unwrap().points;
        assert_eq!(pts, wps::enumerate_points(&s.family().ambient, &f3));
    }

    #[test]
    fn cone_is_singular() {
        // w^2 - x^4 in P(1,1,1,2) over F_3
        let fam = builtin("DP2_CLASSIC").unwrap();
        let f3 = Field::parse("3").unwrap();
        let s = Surface::from_terms(fam, f3, &[(m(&[4, 0, 0, 0]), Elem(2))]).unwrap();
        let v = is_smooth_up_to(&s, 1).unwrap();
        match v.status {
            SmoothnessStatus::SingularAt { witness, k, .. } => {
                assert_eq!(k, 1);
                assert!(witness[0].is_zero() && witness[3].is_zero());
            }
            other => panic!("expected a singular point, got {other:?}"),
        }
    }

    #[test]
    fn dp1_w2_z3_is_singular_at_x_axis() {
        let s = Surface::zero(builtin("DP1_CLASSIC").unwrap(), Field::parse("5").unwrap());
        let v = is_smooth_up_to(&s, 1).unwrap();
        let SmoothnessStatus::SingularAt { witness, .. } = v.status else { panic!("smooth?") };
        assert!(witness[2].is_zero() && witness[3].is_zero());
        let pts = singular_tuples(&s, 1).unwrap().points;
        assert!(pts.iter().any(|p| p.coords() == [Elem(1), Elem(0), Elem(0), Elem(0)]));
    }

    #[test]
    fn fast_scan_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (lit, k) in [("2", 1), ("2", 2), ("3", 1), ("4", 1)] {
            let field = Field::parse(lit).unwrap();
            for id in BUILTIN_FAMILIES {
                let fam = builtin(id).unwrap();
                for _ in 0..4 {
                    // sparse coefficients make singular surfaces common
                    let coeffs = (0..fam.slot_count())
                        .map(|_| if rng.random_bool(0.3) { Elem(rng.random_range(0..field.order())) } else { Elem::ZERO })
                        .collect();
                    let s = Surface::new(fam.clone(), field.clone(), coeffs).unwrap();
                    assert_eq!(singular_tuples(&s, k).unwrap().points, brute_singular(&s, k), "{id} over F_{lit}^{k}");
                }
            }
        }
    }

    #[test]
    fn ambient_singular_points_avoided() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for lit in ["2", "3", "5"] {
            let field = Field::parse(lit).unwrap();
            for id in ["DP1_CHAR2", "DP1_CHAR3", "DP1_CLASSIC", "DP2_CHAR2", "DP2_CLASSIC"] {
                let fam = builtin(id).unwrap();
                for _ in 0..1000 {
                    let coeffs = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
                    let s = Surface::new(fam.clone(), field.clone(), coeffs).unwrap();
                    assert_eq!(s.evaluate(&[Elem(0), Elem(0), Elem(0), Elem(1)]).unwrap(), Elem::ONE);
                    if fam.ambient.weights()[2] == 2 {
                        assert_eq!(s.evaluate(&[Elem(0), Elem(0), Elem(1), Elem(0)]).unwrap(), Elem::ONE);
                    }
                }
            }
        }
    }

    #[test]
    fn witnesses_are_scaling_closed_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let field = Field::parse("3").unwrap();
        let fam = builtin("DP2_CLASSIC").unwrap();
        let mut found = 0;
        while found < 10 {
            let coeffs = (0..fam.slot_count())
                .map(|_| if rng.random_bool(0.25) { Elem(rng.random_range(0..3)) } else { Elem::ZERO })
                .collect();
            let s = Surface::new(fam.clone(), field.clone(), coeffs).unwrap();
            let v = is_smooth_up_to(&s, 2).unwrap();
            let SmoothnessStatus::SingularAt { witness, k, .. } = v.status else { continue };
            found += 1;
            let ext = Extension::new(&field, k, EXTENSION_CAP).unwrap();
            let jac = Jacobian::new(&s, &ext).unwrap();
            let mut pw = jac.power_rows();
            for lambda in ext.field().units() {
                let t = wps::scale(ext.field(), &fam.ambient, &witness, lambda).unwrap();
                assert!(jac.vanishes(&t, &mut pw));
            }
            let wider = is_smooth_up_to(&s, 3).unwrap();
            let SmoothnessStatus::SingularAt { k: k2, .. } = wider.status else { panic!("lost witness") };
            assert!(k2 <= k);
        }
    }

    #[test]
    fn affine_scan_on_plane_curve() {
        // w^2 + z^3 over F_5 is a cusp at the origin
        let s = Surface::zero(builtin("DP1_CLASSIC").unwrap(), Field::parse("5").unwrap());
        let r = crate::families::restrict(
            &s,
            &[crate::families::Subst::Value(Elem(1)), crate::families::Subst::Value(Elem(0)),
              crate::families::Subst::Keep, crate::families::Subst::Keep],
        )
        .unwrap();
        assert_eq!(affine_singular_points(&r, 1).unwrap(), vec![vec![Elem(0), Elem(0)]]);
        assert!(is_smooth_up_to(&s, 0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{restrict, CountMode, Subst, Surface};
use crate::gf::Elem;
use crate::smooth::affine_singular_points;
use crate::wps::{self, WeightSystem};

/// Extension degrees used to certify a fibre smooth.
pub const FIBER_SMOOTH_BOUND: u32 = 2;

/// The fibre of the anticanonical pencil over `(m : n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub m: Elem,
    pub n: Elem,
    /// Points of the surface over `(m : n)`, away from the base locus.
    pub points: u64,
    /// Points of the fibre as an elliptic curve: `points` plus the point
    /// at infinity, which is where the blown-up base point meets the fibre.
    pub elliptic_points: u64,
    pub smooth: bool,
    /// `(N − q − 1)² ≤ 4q` for `N = elliptic_points`.
    pub hasse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberSummary {
    pub fibers: Vec<FiberReport>,
    /// Points with `x = y = 0`.
    pub base_locus: u64,
    /// Projective point count of the surface.
    pub total: u64,
}

/// `(N − q − 1)² ≤ 4q`.
pub fn hasse_holds(n: u64, q: u64) -> bool {
    let d = n as i128 - q as i128 - 1;
    d * d <= 4 * q as i128
}

/// `q + 1 − ⌊2√q⌋`.
pub fn min_fiber_points(q: u64) -> i64 {
    q as i64 + 1 - (4 * q).isqrt() as i64
}

fn check_pencil(s: &Surface) -> Result<()> {
    let fam = s.family();
    if fam.ambient.weights() != [1, 1, 2, 3] || !fam.class_closed {
        return Err(Error::BadFamily(format!("{} does not fibre over (x : y)", fam.id)));
    }
    Ok(())
}

pub fn fiber_count(s: &Surface, m: Elem, n: Elem) -> Result<FiberReport> {
    check_pencil(s)?;
    let field = s.field();
    field.check(m)?;
    field.check(n)?;
    if m.is_zero() && n.is_zero() {
        return Err(Error::ZeroTuple);
    }
    let curve = restrict(s, &[Subst::Value(m), Subst::Value(n), Subst::Keep, Subst::Keep])?;
    let mut points = 0;
    wps::for_each_tuple(field.order(), 2, |t| {
        if curve.evaluate(t).expect("tuple over the field").is_zero() {
            points += 1;
        }
        true
    });
    let mut smooth = true;
    for k in 1..=FIBER_SMOOTH_BOUND {
        if !affine_singular_points(&curve, k)?.is_empty() {
            smooth = false;
            break;
        }
    }
    let q = field.order() as u64;
    let elliptic_points = points + 1;
    Ok(FiberReport { m, n, points, elliptic_points, smooth, hasse: hasse_holds(elliptic_points, q) })
}

/// Every fibre over `P¹(F_q)` and the base locus.
pub fn fibers(s: &Surface) -> Result<FiberSummary> {
    check_pencil(s)?;
    let field = s.field();
    let line = WeightSystem::standard(1);
    let fibers = wps::enumerate_points(&line, field)
        .into_iter()
        .map(|p| fiber_count(s, p.coords()[0], p.coords()[1]))
        .collect::<Result<Vec<_>>>()?;
    let mut base_locus = 0;
    for p in wps::enumerate_points(&s.family().ambient, field) {
        let c = p.coords();
        if c[0].is_zero() && c[1].is_zero() && s.evaluate(c)?.is_zero() {
            base_locus += 1;
        }
    }
    Ok(FiberSummary { fibers, base_locus, total: s.count_points(CountMode::Projective, None) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, Monomial};
    use crate::gf::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integer_hasse_floor() {
        assert_eq!(min_fiber_points(5), 2);
        assert_eq!(min_fiber_points(4), 1);
        assert_eq!(min_fiber_points(7), 3);
        assert_eq!(min_fiber_points(2), 1);
        assert!(hasse_holds(1, 2) && hasse_holds(5, 2) && !hasse_holds(6, 2));
    }

    #[test]
    fn fibers_partition_the_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (id, lit) in [("DP1_CLASSIC", "5"), ("DP1_CLASSIC", "7"), ("DP1_CHAR2", "4"), ("DP1_CHAR3", "3")] {
            let field = Field::parse(lit).unwrap();
            let fam = builtin(id).unwrap();
            for _ in 0..10 {
                let coeffs = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
                let s = Surface::new(fam.clone(), field.clone(), coeffs).unwrap();
                let sum = fibers(&s).unwrap();
                assert_eq!(sum.fibers.len() as u32, field.order() + 1);
                let fiber_total: u64 = sum.fibers.iter().map(|f| f.points).sum();
                assert_eq!(fiber_total + sum.base_locus, sum.total, "{id} over F_{lit}");
                // w^2 + z^3 = 0 has one class on x = y = 0
                assert_eq!(sum.base_locus, 1);
            }
        }
    }

    #[test]
    fn fiber_at_zero_one_over_f5() {
        // w^2 + z^3 + y^4 z + y^6 at (0 : 1) is w^2 + z^3 + z + 1
        let f5 = Field::parse("5").unwrap();
        let fam = builtin("DP1_CLASSIC").unwrap();
        let s = Surface::from_terms(
            fam,
            f5.clone(),
            &[(Monomial(vec![0, 4, 1, 0]), Elem(1)), (Monomial(vec![0, 6, 0, 0]), Elem(1))],
        )
        .unwrap();
        let mut brute = 0;
        for z in 0..5 {
            for w in 0..5 {
                if (w * w + z * z * z + z + 1) % 5 == 0 {
                    brute += 1;
                }
            }
        }
        let r = fiber_count(&s, Elem(0), Elem(1)).unwrap();
        assert_eq!(r.points, brute);
        assert!(r.smooth);
        assert!(r.hasse);
        assert!(fiber_count(&s, Elem(0), Elem(0)).is_err());
        let cubic = Surface::zero(builtin("DP2_CLASSIC").unwrap(), f5);
        assert!(fiber_count(&cubic, Elem(0), Elem(1)).is_err());
    }
}

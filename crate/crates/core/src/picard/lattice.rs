use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::prime_power;

/// A class `d L − Σ m_i E_i` in the Picard lattice of the plane blown up in
/// `r` points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PicClass {
    pub d: i64,
    pub m: Vec<i64>,
}

impl PicClass {
    pub fn new(d: i64, m: Vec<i64>) -> Self {
        PicClass { d, m }
    }

    pub fn line(r: usize) -> Self {
        PicClass { d: 1, m: vec![0; r] }
    }

    /// The exceptional divisor `E_i`.
    pub fn exceptional(r: usize, i: usize) -> Self {
        let mut m = vec![0; r];
        m[i] = -1;
        PicClass { d: 0, m }
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    /// Intersection with the anticanonical class `3L − Σ E_i`.
    pub fn anticanonical_degree(&self) -> i64 {
        3 * self.d - self.m.iter().sum::<i64>()
    }

    pub fn self_intersection(&self) -> i64 {
        self.d * self.d - self.m.iter().map(|x| x * x).sum::<i64>()
    }
}

/// `d d' − Σ m_i m'_i`.
pub fn pair(a: &PicClass, b: &PicClass) -> Result<i64> {
    if a.rank() != b.rank() {
        return Err(Error::LengthMismatch(a.rank(), b.rank()));
    }
    Ok(a.d * b.d - a.m.iter().zip(&b.m).map(|(x, y)| x * y).sum::<i64>())
}

/// All classes with self-intersection −1 and anticanonical degree 1, sorted.
pub fn exceptional_classes(r: usize) -> Result<Vec<PicClass>> {
    if r > 8 {
        return Err(Error::OutOfRange(format!("r = {r}, expected 0..=8")));
    }
    let mut out = Vec::new();
    let mut m = vec![0i64; r];
    for d in 0..=7i64 {
        let hi = d.max(1);
        search(d, hi, 0, 3 * d - 1, d * d + 1, &mut m, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Fills `m[i..]` so that the remaining sum and sum of squares are hit.
fn search(d: i64, hi: i64, i: usize, sum: i64, sq: i64, m: &mut Vec<i64>, out: &mut Vec<PicClass>) {
    let left = (m.len() - i) as i64;
    if left == 0 {
        if sum == 0 && sq == 0 {
            out.push(PicClass { d, m: m.clone() });
        }
        return;
    }
    // Σ x ≤ sqrt(left · Σ x²) and Σ x ≥ −left.
    if sum < -left || sum * sum > left * sq && sum > 0 {
        return;
    }
    for v in -1..=hi {
        if v * v > sq {
            continue;
        }
        m[i] = v;
        search(d, hi, i + 1, sum - v, sq - v * v, m, out);
    }
    m[i] = 0;
}

/// `q² + q T + 1`.
pub fn weil_count(q: i64, trace: i64) -> i64 {
    q * q + q * trace + 1
}

/// Least trace of Frobenius on Pic for a del Pezzo surface of degree `d`.
pub fn min_trace_on_pic(d: u32) -> Result<i64> {
    match d {
        1 => Ok(-7),
        2 => Ok(-6),
        3 => Ok(-2),
        _ => Err(Error::OutOfRange(format!("degree {d}, expected 1, 2 or 3"))),
    }
}

/// Prime powers `q` admitting a trace `T` in `[min_trace, 10 − d]` with
/// `q² + qT + 1 = N`.
pub fn candidate_fields(d: u32, target: i64) -> Result<Vec<u32>> {
    let lo = min_trace_on_pic(d)?;
    let hi = 10 - d as i64;
    if target < 0 {
        return Err(Error::OutOfRange(format!("target {target}")));
    }
    let limit = lo.unsigned_abs() as i64 + target.isqrt() + 2;
    let mut out = Vec::new();
    for q in 2..=limit {
        if prime_power(q as u32).is_none() {
            continue;
        }
        let rest = target - 1 - q * q;
        if rest % q != 0 {
            continue;
        }
        let t = rest / q;
        if (lo..=hi).contains(&t) {
            out.push(q as u32);
        }
    }
    Ok(out)
}

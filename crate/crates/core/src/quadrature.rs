//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

// node and weight tables keep their published digits
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_intervals: 20_000,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    /// Kronrod estimate of the integral of |f|, for the roundoff floor.
    magnitude: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Piece> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut kron_abs = fc.abs() * WGK[7];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        kron += WGK[j] * (f1 + f2);
        kron_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite integrand on [{a:e}, {b:e}]"
        )));
    }
    Ok(Piece {
        a,
        b,
        value,
        magnitude: kron_abs * half.abs(),
        error,
    })
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates over [a, b], seeding the subdivision at any `breaks` that
    /// fall strictly inside the interval. Reversed limits flip the sign.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate_with_breaks(f, b, a, breaks).map(|v| -v);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Numerical("quadrature limits must be finite".into()));
        }
        let mut edges = vec![a];
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
        inner.sort_by(f64::total_cmp);
        edges.extend(inner);
        edges.push(b);

        let mut heap = BinaryHeap::new();
        for w in edges.windows(2) {
            if w[1] > w[0] {
                heap.push(kronrod(&f, w[0], w[1])?);
            }
        }
        let mut total: f64 = heap.iter().map(|p| p.value).sum();
        let mut err: f64 = heap.iter().map(|p| p.error).sum();
        loop {
            // no tolerance can beat the rounding in sum |f|
            let magnitude: f64 = heap.iter().map(|p| p.magnitude).sum();
            let floor = 50.0 * f64::EPSILON * magnitude;
            if err <= self.abs_tol.max(self.rel_tol * total.abs()).max(floor) {
                return Ok(total);
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::Numerical(format!(
                    "quadrature did not converge on [{a:e}, {b:e}]: error {err:e} vs value {total:e}"
                )));
            }
            let worst = heap.pop().expect("non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                return Err(Error::Numerical(format!(
                    "quadrature interval collapsed near {mid:e}"
                )));
            }
            let left = kronrod(&f, worst.a, mid)?;
            let right = kronrod(&f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
            if heap.len() % 64 == 0 {
                // refresh running sums against drift
                heap.push(left);
                heap.push(right);
                total = heap.iter().map(|p| p.value).sum();
                err = heap.iter().map(|p| p.error).sum();
                continue;
            }
            heap.push(left);
            heap.push(right);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_and_transcendental() {
        let q = Quadrature::default();
        assert_relative_eq!(q.integrate(|x| x * x, 0.0, 3.0).unwrap(), 9.0, max_relative = 1e-14);
        assert_relative_eq!(
            q.integrate(f64::sin, 0.0, std::f64::consts::PI).unwrap(),
            2.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            q.integrate(|x| (-x * x).exp(), -10.0, 10.0).unwrap(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn reversed_limits_and_empty_interval() {
        let q = Quadrature::default();
        assert_relative_eq!(q.integrate(|x| x, 2.0, 0.0).unwrap(), -2.0, max_relative = 1e-14);
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sharp_feature_found_adaptively() {
        let q = Quadrature::default();
        // narrow logistic step far from the interval center
        let w = 1e-5;
        let f = |x: f64| 1.0 / (1.0 + ((x - 0.01) / w).exp());
        let exact = 0.01 + w * (-0.01 / w).exp().ln_1p() - w * (-0.99 / w).exp().ln_1p();
        assert_relative_eq!(q.integrate(f, 0.0, 1.0).unwrap(), exact, max_relative = 1e-9);
    }

    #[test]
    fn singular_integrand_reports_failure() {
        let q = Quadrature {
            max_intervals: 200,
            ..Quadrature::default()
        };
        assert!(q.integrate(|x| 1.0 / x.abs().sqrt().max(1e-300).powi(3), -1.0, 1.0).is_err());
    }
}

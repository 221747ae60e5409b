//! Variable-exponent modular, Luxemburg norm, weighted norm and a Hölder
//! inequality checker.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponent::{conjugate_exponent, ExponentFunction};
use crate::grid::{integrate_field, SampledFunction};
use crate::weight::Weight;

/// Relative width at which the bisection stops.
pub const LUXEMBURG_REL_TOL: f64 = 1e-12;
pub const LUXEMBURG_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgResult {
    pub norm: f64,
    pub iterations: usize,
    /// `(lambda_lo, lambda_hi)` with `modular(lo) >= 1 >= modular(hi)`.
    pub bracket: (f64, f64),
    pub modular_at_norm: f64,
}

impl LuxemburgResult {
    fn zero() -> Self {
        Self {
            norm: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            modular_at_norm: 0.0,
        }
    }
}

/// The modular restricted to cells where the magnitude is positive, kept in
/// log form so each evaluation costs one `exp` per cell.
#[derive(Clone, Debug)]
pub struct Modular {
    cell_volume: f64,
    log_magnitude: Vec<f64>,
    exponent: Vec<f64>,
    max_magnitude: f64,
}

impl Modular {
    /// `magnitudes` and `exponents` are cell-aligned; zero cells drop out
    /// (`0^q = 0` for `q > 0`).
    pub fn new<I>(cell_volume: f64, cells: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut log_magnitude = Vec::new();
        let mut exponent = Vec::new();
        let mut max_magnitude: f64 = 0.0;
        for (a, q) in cells {
            if a > 0.0 {
                log_magnitude.push(a.ln());
                exponent.push(q);
                max_magnitude = max_magnitude.max(a);
            }
        }
        Self {
            cell_volume,
            log_magnitude,
            exponent,
            max_magnitude,
        }
    }

    pub fn from_fields(cell_volume: f64, magnitudes: &[f64], exponents: &[f64]) -> Self {
        Self::new(
            cell_volume,
            magnitudes.iter().copied().zip(exponents.iter().copied()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude.is_empty()
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.eval_log(lambda.ln())
    }

    /// Modular at `lambda = e^ll`.
    fn eval_log(&self, ll: f64) -> f64 {
        self.cell_volume
            * self
                .log_magnitude
                .iter()
                .zip(&self.exponent)
                .map(|(la, q)| (q * (la - ll)).exp())
                .sum::<f64>()
    }

    /// Bracket by doubling/halving from `max |f|`, then geometric bisection.
    /// The search runs on `ln lambda`, so tiny or huge magnitudes cannot
    /// underflow the bracket.
    pub fn norm(&self) -> Result<LuxemburgResult> {
        if self.is_zero() {
            return Ok(LuxemburgResult::zero());
        }
        let ln2 = std::f64::consts::LN_2;
        let fail = |iterations: usize, lo: f64, hi: f64| Error::NoConvergence {
            iterations,
            lo: lo.exp(),
            hi: hi.exp(),
        };
        let mut iterations = 0;
        let start = self.max_magnitude.ln();
        let (mut lo, mut hi);
        if self.eval_log(start) >= 1.0 {
            lo = start;
            hi = start + ln2;
            while self.eval_log(hi) > 1.0 {
                iterations += 1;
                if iterations >= LUXEMBURG_MAX_ITER {
                    return Err(fail(iterations, lo, hi));
                }
                lo = hi;
                hi += ln2;
            }
        } else {
            hi = start;
            lo = start - ln2;
            while self.eval_log(lo) < 1.0 {
                iterations += 1;
                if iterations >= LUXEMBURG_MAX_ITER {
                    return Err(fail(iterations, lo, hi));
                }
                hi = lo;
                lo -= ln2;
            }
        }
        let tol = LUXEMBURG_REL_TOL.ln_1p();
        while hi - lo > tol {
            iterations += 1;
            if iterations >= LUXEMBURG_MAX_ITER {
                return Err(fail(iterations, lo, hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.eval_log(mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        Ok(LuxemburgResult {
            norm: mid.exp(),
            iterations,
            bracket: (lo.exp(), hi.exp()),
            modular_at_norm: self.eval_log(mid),
        })
    }
}

fn check_grid(f: &SampledFunction, q: &ExponentFunction) -> Result<()> {
    if f.spec() != q.spec() {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `integral (|f(x)| / lambda)^q(x) dx`.
pub fn modular(f: &SampledFunction, q: &ExponentFunction, lambda: f64) -> Result<f64> {
    check_grid(f, q)?;
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    q.require_p0()?;
    Ok(Modular::from_fields(f.spec().cell_volume(), &f.abs(), q.values()).eval(lambda))
}

pub fn luxemburg_norm(f: &SampledFunction, q: &ExponentFunction) -> Result<LuxemburgResult> {
    check_grid(f, q)?;
    q.require_p0()?;
    Modular::from_fields(f.spec().cell_volume(), &f.abs(), q.values()).norm()
}

/// Luxemburg norm of a nonnegative field on the exponent's grid.
pub fn field_norm(magnitudes: &[f64], q: &ExponentFunction) -> Result<f64> {
    if magnitudes.len() != q.values().len() {
        return Err(Error::GridMismatch);
    }
    Ok(
        Modular::from_fields(q.spec().cell_volume(), magnitudes, q.values())
            .norm()?
            .norm,
    )
}

/// `||f||_{L^q(w)} = ||f w||_{L^q}`.
pub fn weighted_norm(f: &SampledFunction, q: &ExponentFunction, w: &Weight) -> Result<f64> {
    check_grid(f, q)?;
    if w.spec() != f.spec() {
        return Err(Error::GridMismatch);
    }
    q.require_p0()?;
    let weighted: Vec<f64> = f
        .values()
        .iter()
        .zip(w.values())
        .map(|(v, w)| v.norm() * w)
        .collect();
    field_norm(&weighted, q)
}

/// Hölder constant used by [`holder_check`] unless overridden.
pub const DEFAULT_HOLDER_CONSTANT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Compares `integral |f g|` with `c_h ||f||_{q} ||g||_{q'}`.
pub fn holder_check(
    f: &SampledFunction,
    g: &SampledFunction,
    q: &ExponentFunction,
    c_h: f64,
) -> Result<HolderCheck> {
    check_grid(f, q)?;
    check_grid(g, q)?;
    let qc = conjugate_exponent(q)?;
    let product: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a.norm() * b.norm())
        .collect();
    let lhs = integrate_field(f.spec(), &product);
    let rhs = c_h * luxemburg_norm(f, q)?.norm * luxemburg_norm(g, &qc)?.norm;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(HolderCheck { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentProfile;
    use crate::grid::{make_grid, GridSpec};

    fn line() -> GridSpec {
        make_grid(1, 6, 16384, -20, 6).unwrap()
    }

    fn indicator(g: GridSpec, a: f64, b: f64) -> SampledFunction {
        SampledFunction::from_real_fn(g, "chi", |x| if a <= x[0] && x[0] <= b { 1.0 } else { 0.0 })
            .unwrap()
    }

    #[test]
    fn modular_of_unit_indicator() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let m = modular(&indicator(g, 0.0, 1.0), &q, 1.0).unwrap();
        assert!((m - 1.0).abs() <= g.step());
        let f = SampledFunction::from_real_fn(g, "bump", |x| (-x[0] * x[0]).exp()).unwrap();
        assert!(modular(&f, &q, 1e8).unwrap() < 1e-12);
    }

    #[test]
    fn modular_piecewise_exponent() {
        let g = line();
        let q = ExponentFunction::new(
            &g,
            ExponentProfile::custom("2+chi", |x| if x[0] > 1.5 { 3.0 } else { 2.0 }),
        )
        .unwrap();
        let f = SampledFunction::from_real_fn(g, "f", |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else if (2.0..=3.0).contains(&x[0]) {
                2.0
            } else {
                0.0
            }
        })
        .unwrap();
        let m = modular(&f, &q, 2.0).unwrap();
        assert!((m - 1.25).abs() <= 2.0 * g.step(), "{m}");
    }

    #[test]
    fn modular_rejects_nonpositive_lambda() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        assert!(modular(&indicator(g, 0.0, 1.0), &q, 0.0).is_err());
    }

    #[test]
    fn indicator_norm_is_one_for_every_exponent() {
        let g = line();
        for p in [0.5, 1.0, 2.0, 7.5] {
            let q = ExponentFunction::constant(&g, p).unwrap();
            let r = luxemburg_norm(&indicator(g, 0.0, 1.0), &q).unwrap();
            assert!((r.norm - 1.0).abs() <= g.step(), "p = {p}: {r:?}");
            assert!(r.bracket.0 <= r.norm && r.norm <= r.bracket.1);
        }
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let r = luxemburg_norm(&SampledFunction::zeros(g, "0"), &q).unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn gaussian_l2_norm() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let f = SampledFunction::from_real_fn(g, "gauss", |x| (-x[0] * x[0]).exp()).unwrap();
        let r = luxemburg_norm(&f, &q).unwrap();
        // Oracle: square root of the quadrature of f^2.
        let direct = (f.abs().iter().map(|v| v * v).sum::<f64>() * g.step()).sqrt();
        assert!((r.norm - direct).abs() < 1e-10);
        let closed = (std::f64::consts::PI / 2.0).sqrt().sqrt();
        assert!((r.norm - closed).abs() < 1e-4);
    }

    #[test]
    fn weighted_norm_examples() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let f = indicator(g, 1.0, 2.0);
        let unit = Weight::unit(&g);
        assert_eq!(
            weighted_norm(&f, &q, &unit).unwrap(),
            luxemburg_norm(&f, &q).unwrap().norm
        );
        let w = Weight::power(&g, 1.0);
        let v = weighted_norm(&f, &q, &w).unwrap();
        assert!((v - (7.0f64 / 3.0).sqrt()).abs() < 1e-3, "{v}");
        let scaled = weighted_norm(&f.scaled(-3.5), &q, &w).unwrap();
        assert!((scaled / v - 3.5).abs() < 1e-10 * 3.5);
    }

    #[test]
    fn holder_examples() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let chi = indicator(g, 0.0, 1.0);
        let h = holder_check(&chi, &chi, &q, DEFAULT_HOLDER_CONSTANT).unwrap();
        assert!((h.ratio - 0.5).abs() <= g.step());
        let zero = SampledFunction::zeros(g, "0");
        assert_eq!(holder_check(&zero, &chi, &q, 2.0).unwrap().ratio, 0.0);
    }

    #[test]
    fn unit_modular_at_the_norm() {
        let g = line();
        let q = ExponentFunction::parse(&g, "log-perturbed:3,1.5,0.4").unwrap();
        let f = SampledFunction::from_real_fn(g, "f", |x| {
            (1.0 + x[0].cos()) * (-0.1 * x[0] * x[0]).exp()
        })
        .unwrap();
        let r = luxemburg_norm(&f, &q).unwrap();
        assert!((r.modular_at_norm - 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = line();
        let other = make_grid(1, 5, 1024, -4, 5).unwrap();
        let q = ExponentFunction::constant(&other, 2.0).unwrap();
        assert_eq!(
            luxemburg_norm(&indicator(g, 0.0, 1.0), &q).unwrap_err(),
            Error::GridMismatch
        );
    }
}

//! Variable exponents `q(.)` and `alpha(.)`, presets, conjugation and
//! log-Hölder diagnostics.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Analytic description of an exponent, evaluable at any point.
#[derive(Clone)]
pub enum ExponentProfile {
    Constant(f64),
    /// `a_inf + (a0 - a_inf + c sin|x|) / ln(e + |x|)`: equals `a0` at the
    /// origin and tends to `a_inf` at infinity.
    LogPerturbed {
        a0: f64,
        a_inf: f64,
        c: f64,
    },
    /// `left` for `x_1 < 0`, `right` otherwise.
    Step {
        left: f64,
        right: f64,
    },
    /// Pointwise `q / (q - 1)` of the inner profile.
    Conjugate(Box<ExponentProfile>),
    Custom {
        name: String,
        f: PointFn,
    },
}

impl ExponentProfile {
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant(p) => *p,
            Self::LogPerturbed { a0, a_inf, c } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                a_inf + (a0 - a_inf + c * r.sin()) / (std::f64::consts::E + r).ln()
            }
            Self::Step { left, right } => {
                if x[0] < 0.0 {
                    *left
                } else {
                    *right
                }
            }
            Self::Conjugate(inner) => {
                let q = inner.eval(x);
                q / (q - 1.0)
            }
            Self::Custom { f, .. } => f(x),
        }
    }

    /// Parses `const:p`, `log-perturbed:a0,a_inf,c` or `step:left,right`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let (name, args) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| err("missing ':'"))?;
        let nums = args
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| err(&e.to_string()))?;
        match (name.trim(), nums.as_slice()) {
            ("const", [p]) => Ok(Self::Constant(*p)),
            ("log-perturbed", [a0, a_inf, c]) => Ok(Self::LogPerturbed {
                a0: *a0,
                a_inf: *a_inf,
                c: *c,
            }),
            ("step", [l, r]) => Ok(Self::Step {
                left: *l,
                right: *r,
            }),
            _ => Err(err(
                "expected const:p, log-perturbed:a0,a_inf,c or step:l,r",
            )),
        }
    }
}

impl fmt::Debug for ExponentProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExponentProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(p) => write!(f, "const:{p}"),
            Self::LogPerturbed { a0, a_inf, c } => write!(f, "log-perturbed:{a0},{a_inf},{c}"),
            Self::Step { left, right } => write!(f, "step:{left},{right}"),
            Self::Conjugate(inner) => write!(f, "conjugate({inner})"),
            Self::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

/// An exponent sampled on a grid together with the summary values the
/// theory refers to (`q-`, `q+`, value at the origin, value at infinity).
#[derive(Clone, Debug)]
pub struct ExponentFunction {
    spec: GridSpec,
    profile: ExponentProfile,
    values: Vec<f64>,
    q_minus: f64,
    q_plus: f64,
    value_at_origin: f64,
    value_at_infinity: f64,
}

impl ExponentFunction {
    pub fn new(spec: &GridSpec, profile: ExponentProfile) -> Result<Self> {
        let n = spec.dimension();
        let values: Vec<f64> = (0..spec.len())
            .map(|i| profile.eval(&spec.point(i)[..n]))
            .collect();
        let origin = profile.eval(&[0.0, 0.0][..n]);
        Self::assemble(spec, profile, values, origin)
    }

    pub fn constant(spec: &GridSpec, p: f64) -> Result<Self> {
        Self::new(spec, ExponentProfile::Constant(p))
    }

    pub fn parse(spec: &GridSpec, preset: &str) -> Result<Self> {
        Self::new(spec, ExponentProfile::parse(preset)?)
    }

    fn assemble(
        spec: &GridSpec,
        profile: ExponentProfile,
        values: Vec<f64>,
        value_at_origin: f64,
    ) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let q_minus = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let q_plus = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let value_at_infinity = match profile {
            ExponentProfile::Constant(p) => p,
            _ => outer_annulus_mean(spec, &values),
        };
        Ok(Self {
            spec: *spec,
            profile,
            values,
            q_minus,
            q_plus,
            value_at_origin,
            value_at_infinity,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn profile(&self) -> &ExponentProfile {
        &self.profile
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn q_minus(&self) -> f64 {
        self.q_minus
    }

    pub fn q_plus(&self) -> f64 {
        self.q_plus
    }

    pub fn value_at_origin(&self) -> f64 {
        self.value_at_origin
    }

    /// Mean over the outermost annulus `D_(k_max)` unless the profile is
    /// constant.
    pub fn value_at_infinity(&self) -> f64 {
        self.value_at_infinity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.profile.eval(x)
    }

    pub fn as_constant(&self) -> Option<f64> {
        (self.q_minus == self.q_plus).then_some(self.q_minus)
    }

    /// Membership in `P`: `1 < q- <= q+ < inf`.
    pub fn require_p(&self) -> Result<()> {
        if self.q_minus > 1.0 && self.q_plus.is_finite() {
            Ok(())
        } else {
            Err(Error::ExponentClass(format!(
                "need 1 < q- and q+ < inf, got q- = {}, q+ = {}",
                self.q_minus, self.q_plus
            )))
        }
    }

    /// Membership in `P_0`: `0 < q- <= q+ < inf`.
    pub fn require_p0(&self) -> Result<()> {
        if self.q_minus > 0.0 && self.q_plus.is_finite() {
            Ok(())
        } else {
            Err(Error::ExponentClass(format!(
                "need 0 < q- and q+ < inf, got q- = {}, q+ = {}",
                self.q_minus, self.q_plus
            )))
        }
    }
}

fn outer_annulus_mean(spec: &GridSpec, values: &[f64]) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for (i, v) in values.iter().enumerate() {
        if spec.shell_index(i) == spec.k_max() {
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        values.iter().sum::<f64>() / values.len() as f64
    } else {
        sum / count as f64
    }
}

/// `q'` with `1/q + 1/q' = 1` pointwise.
pub fn conjugate_exponent(q: &ExponentFunction) -> Result<ExponentFunction> {
    q.require_p()?;
    let values = q.values.iter().map(|&v| v / (v - 1.0)).collect();
    let origin = q.value_at_origin / (q.value_at_origin - 1.0);
    let profile = match &q.profile {
        ExponentProfile::Constant(p) => ExponentProfile::Constant(p / (p - 1.0)),
        ExponentProfile::Conjugate(inner) => (**inner).clone(),
        other => ExponentProfile::Conjugate(Box::new(other.clone())),
    };
    ExponentFunction::assemble(&q.spec, profile, values, origin)
}

/// Empirical log-Hölder constants: the smallest `C` making each of the
/// three defining inequalities hold over the sampled pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHolderDiagnostics {
    pub c_local: f64,
    pub c_origin: f64,
    pub c_infinity: f64,
}

/// In 1-D every grid pair with `|x - y| < 1/2` is visited; in 2-D the
/// offsets are restricted to dyadic steps per axis.
pub fn log_holder_diagnostics(a: &ExponentFunction) -> LogHolderDiagnostics {
    let spec = &a.spec;
    let h = spec.step();
    let e = std::f64::consts::E;
    let n = spec.samples_per_axis() as isize;
    let max_steps = ((0.5 / h).ceil() as isize).max(1);

    let offsets: Vec<(isize, isize)> = if spec.dimension() == 1 {
        (1..max_steps).map(|d| (d, 0)).collect()
    } else {
        let mut steps = vec![0isize];
        let mut s = 1;
        while s < max_steps {
            steps.push(s);
            steps.push(-s);
            s *= 2;
        }
        let mut out = Vec::new();
        for &dx in &steps {
            for &dy in &steps {
                if (dx > 0 || (dx == 0 && dy > 0)) && ((dx * dx + dy * dy) as f64).sqrt() * h < 0.5
                {
                    out.push((dx, dy));
                }
            }
        }
        out
    };

    let mut c_local: f64 = 0.0;
    for idx in 0..spec.len() {
        let [i, j] = spec.unflatten(idx);
        for &(dx, dy) in &offsets {
            let (ii, jj) = (i as isize + dx, j as isize + dy);
            if ii < 0 || jj < 0 || ii >= n || (spec.dimension() == 2 && jj >= n) {
                continue;
            }
            let other = spec.flatten([ii as usize, jj as usize]);
            let dist = ((dx * dx + dy * dy) as f64).sqrt() * h;
            if dist >= 0.5 {
                continue;
            }
            let diff = (a.values[idx] - a.values[other]).abs();
            c_local = c_local.max(diff * (e + 1.0 / dist).ln());
        }
    }

    let mut c_origin: f64 = 0.0;
    let mut c_infinity: f64 = 0.0;
    for idx in 0..spec.len() {
        let r = spec.norm_at(idx);
        let v = a.values[idx];
        c_origin = c_origin.max((v - a.value_at_origin).abs() * (e + 1.0 / r).ln());
        c_infinity = c_infinity.max((v - a.value_at_infinity).abs() * (e + r).ln());
    }

    LogHolderDiagnostics {
        c_local,
        c_origin,
        c_infinity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn line() -> GridSpec {
        make_grid(1, 6, 4096, -12, 6).unwrap()
    }

    #[test]
    fn conjugate_examples() {
        let g = line();
        let q2 = conjugate_exponent(&ExponentFunction::constant(&g, 2.0).unwrap()).unwrap();
        assert!(q2.values().iter().all(|&v| v == 2.0));
        let q4 = conjugate_exponent(&ExponentFunction::constant(&g, 4.0).unwrap()).unwrap();
        assert!(q4.values().iter().all(|&v| (v - 4.0 / 3.0).abs() < 1e-15));
        assert_eq!(q4.value_at_infinity(), 4.0 / 3.0);
    }

    #[test]
    fn conjugate_pointwise_identity_and_involution() {
        let g = line();
        let q = ExponentFunction::new(
            &g,
            ExponentProfile::custom("2+sin^2/2", |x| 2.0 + x[0].sin().powi(2) / 2.0),
        )
        .unwrap();
        let qc = conjugate_exponent(&q).unwrap();
        for (a, b) in q.values().iter().zip(qc.values()) {
            assert!((1.0 / a + 1.0 / b - 1.0).abs() < 1e-14);
        }
        let back = conjugate_exponent(&qc).unwrap();
        for (a, b) in q.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_rejects_exponents_at_or_below_one() {
        let g = line();
        let q = ExponentFunction::constant(&g, 1.0).unwrap();
        assert!(matches!(
            conjugate_exponent(&q),
            Err(Error::ExponentClass(_))
        ));
    }

    #[test]
    fn constant_exponent_has_zero_log_holder_constants() {
        let d = log_holder_diagnostics(&ExponentFunction::constant(&line(), 3.0).unwrap());
        assert_eq!(d.c_local, 0.0);
        assert_eq!(d.c_origin, 0.0);
        assert_eq!(d.c_infinity, 0.0);
    }

    #[test]
    fn log_decay_at_infinity_is_detected() {
        // a(x) = a_inf + c / ln(e + |x|); with a_inf taken as the outer-annulus
        // mean the bound is c plus the offset of that mean.
        let g = line();
        let c = 0.3;
        let a = ExponentFunction::parse(&g, "log-perturbed:0.3,0,0").unwrap();
        let d = log_holder_diagnostics(&a);
        let offset = a.value_at_infinity().abs() * (std::f64::consts::E + 64.0).ln();
        assert!(d.c_infinity <= c + offset + 1e-9, "{d:?}");
        assert!((a.value_at_origin() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn step_exponent_local_constant_grows_under_refinement() {
        let coarse = make_grid(1, 3, 256, -4, 3).unwrap();
        let fine = make_grid(1, 3, 4096, -4, 3).unwrap();
        let p = ExponentProfile::parse("step:1,3").unwrap();
        let c0 = log_holder_diagnostics(&ExponentFunction::new(&coarse, p.clone()).unwrap());
        let c1 = log_holder_diagnostics(&ExponentFunction::new(&fine, p).unwrap());
        assert!(c1.c_local > c0.c_local + 2.0 * (8.0f64).ln() - 0.5);
    }

    #[test]
    fn two_dimensional_diagnostics_run() {
        let g = make_grid(2, 2, 32, -3, 2).unwrap();
        let a = ExponentFunction::parse(&g, "log-perturbed:2.5,2,0.2").unwrap();
        let d = log_holder_diagnostics(&a);
        assert!(d.c_local > 0.0 && d.c_local.is_finite());
    }

    #[test]
    fn preset_parsing() {
        assert!(ExponentProfile::parse("const:2").is_ok());
        assert!(ExponentProfile::parse("log-perturbed:1,2").is_err());
        assert!(ExponentProfile::parse("bogus:1").is_err());
        assert_eq!(
            ExponentProfile::parse("log-perturbed:1,2,0.5")
                .unwrap()
                .to_string(),
            "log-perturbed:1,2,0.5"
        );
    }
}

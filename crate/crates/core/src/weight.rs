//! Weights, Muckenhoupt-type constants over finite ball families and the
//! decay exponents of indicator norms under shrinking subsets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponent::{conjugate_exponent, ExponentFunction};
use crate::grid::{ball_cells, GridSpec};
use crate::lebesgue::Modular;

/// A nonnegative field on the grid. `gamma` is set for power weights
/// `|x|^gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    spec: GridSpec,
    values: Vec<f64>,
    gamma: Option<f64>,
    label: String,
}

impl Weight {
    /// Rejects negative or non-finite samples.
    pub fn from_values(
        spec: &GridSpec,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        Ok(Self {
            spec: *spec,
            values,
            gamma: None,
            label: label.into(),
        })
    }

    pub fn unit(spec: &GridSpec) -> Self {
        Self::constant(spec, 1.0).expect("unit weight is valid")
    }

    pub fn constant(spec: &GridSpec, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!(
                "constant weight must be positive, got {c}"
            )));
        }
        let mut w = Self::from_values(spec, vec![c; spec.len()], format!("const:{c}"))?;
        if c == 1.0 {
            w.gamma = Some(0.0);
        }
        Ok(w)
    }

    /// `|x|^gamma`; finite everywhere because no cell center is the origin.
    pub fn power(spec: &GridSpec, gamma: f64) -> Self {
        let values = (0..spec.len())
            .map(|i| spec.norm_at(i).powf(gamma))
            .collect();
        Self {
            spec: *spec,
            values,
            gamma: Some(gamma),
            label: format!("power:{gamma}"),
        }
    }

    /// Presets `const:c` and `power:gamma`.
    pub fn parse(spec: &GridSpec, preset: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: preset.to_string(),
            reason: reason.to_string(),
        };
        let (kind, arg) = preset
            .split_once(':')
            .ok_or_else(|| err("expected `kind:value`"))?;
        let value: f64 = arg.trim().parse().map_err(|_| err("not a number"))?;
        match kind.trim() {
            "const" => Self::constant(spec, value),
            "power" => Ok(Self::power(spec, value)),
            _ => Err(err("unknown weight preset")),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of cells where the weight vanishes.
    pub fn zero_cells(&self) -> usize {
        self.values.iter().filter(|&&v| v == 0.0).count()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut w = Self::from_values(
            &self.spec,
            self.values.iter().map(|v| v * c).collect(),
            format!("{}*{c}", self.label),
        )?;
        w.gamma = if c == 1.0 { self.gamma } else { None };
        Ok(w)
    }

    /// `w^(sign * e(x))` pointwise.
    pub fn pow_field(&self, exponents: &[f64], sign: f64) -> Result<Self> {
        if exponents.len() != self.values.len() {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(exponents)
            .map(|(w, e)| w.powf(sign * e))
            .collect();
        Self::from_values(&self.spec, values, format!("{}^e", self.label))
    }

    pub fn powf(&self, e: f64) -> Result<Self> {
        let mut w = self.pow_field(&vec![e; self.values.len()], 1.0)?;
        w.gamma = self.gamma.map(|g| g * e);
        w.label = format!("{}^{e}", self.label);
        Ok(w)
    }

    pub fn recip(&self) -> Result<Self> {
        self.powf(-1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn cells(&self, spec: &GridSpec) -> Vec<usize> {
        ball_cells(spec, self.center, self.radius)
    }

    fn inside(&self, spec: &GridSpec) -> bool {
        let a = spec.halfwidth();
        (0..spec.dimension()).all(|d| self.center[d].abs() + self.radius <= a)
    }
}

/// Finite family of balls over which suprema are taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

/// Center stride of the default family, in cells.
pub const BALL_CENTER_STRIDE: usize = 64;

impl BallFamily {
    /// Centers on every 64th grid point plus the origin, radii `2^j h` from
    /// `4h` up to `2^K`. For radii above `128 h` the center stride grows to
    /// `r / 2`. Only balls inside the domain are kept.
    pub fn default_for(spec: &GridSpec) -> Self {
        let h = spec.step();
        let n = spec.samples_per_axis();
        let top = spec.halfwidth_log2() - h.log2().round() as i32;
        let mut balls = Vec::new();
        for j in 2..=top {
            let radius = 2f64.powi(j) * h;
            let stride = BALL_CENTER_STRIDE.max(1usize << (j - 1).max(0));
            let axis: Vec<f64> = (0..n).step_by(stride).map(|i| spec.axis_coord(i)).collect();
            let mut push = |center: [f64; 2]| {
                let ball = Ball { center, radius };
                if ball.inside(spec) {
                    balls.push(ball);
                }
            };
            push([0.0, 0.0]);
            if spec.dimension() == 1 {
                for &c in &axis {
                    push([c, 0.0]);
                }
            } else {
                for &y in &axis {
                    for &x in &axis {
                        push([x, y]);
                    }
                }
            }
        }
        Self { balls }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn min_radius(&self) -> f64 {
        self.balls
            .iter()
            .map(|b| b.radius)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Local value of the Muckenhoupt functional on one ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallWitness {
    pub center: [f64; 2],
    pub radius: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightClassReport {
    /// Supremum of `|B|^-1 ||w chi_B||_q ||w^-1 chi_B||_q'` over the family.
    pub constant: f64,
    /// Same supremum with `w^(1/q)` and `w^(-1/q)`.
    pub tilde_constant: f64,
    /// Largest local values, descending.
    pub witnesses: Vec<BallWitness>,
    pub delta1: f64,
    pub delta2: f64,
    pub fit_residual: f64,
    pub degenerate_fit: bool,
    /// Set when the functional keeps growing at the largest origin balls or
    /// exceeds [`DIVERGENCE_THRESHOLD`].
    pub diverging: bool,
    pub balls_tested: usize,
}

pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
const WITNESS_COUNT: usize = 5;

/// Norm of `w chi_B` in `L^q`, restricted to `cells`.
fn indicator_norm(spec: &GridSpec, cells: &[usize], w: &[f64], q: &[f64]) -> Result<f64> {
    Ok(
        Modular::new(spec.cell_volume(), cells.iter().map(|&i| (w[i], q[i])))
            .norm()?
            .norm,
    )
}

fn ball_value(
    spec: &GridSpec,
    ball: &Ball,
    w: &[f64],
    w_dual: &[f64],
    q: &[f64],
    q_dual: &[f64],
) -> Result<f64> {
    let cells = ball.cells(spec);
    let measure = cells.len() as f64 * spec.cell_volume();
    let a = indicator_norm(spec, &cells, w, q)?;
    let b = indicator_norm(spec, &cells, w_dual, q_dual)?;
    Ok(a * b / measure)
}

fn sup_over_family(
    spec: &GridSpec,
    family: &BallFamily,
    w: &[f64],
    w_dual: &[f64],
    q: &[f64],
    q_dual: &[f64],
) -> Result<Vec<BallWitness>> {
    family
        .balls
        .par_iter()
        .map(|ball| {
            Ok(BallWitness {
                center: ball.center,
                radius: ball.radius,
                value: ball_value(spec, ball, w, w_dual, q, q_dual)?,
            })
        })
        .collect()
}

/// Muckenhoupt constants of `w` for `q` over `family`, together with the
/// decay exponents from [`estimate_delta_exponents`] on the default nested
/// family.
pub fn muckenhoupt_constant(
    w: &Weight,
    q: &ExponentFunction,
    family: &BallFamily,
) -> Result<WeightClassReport> {
    let spec = w.spec();
    if spec != q.spec() {
        return Err(Error::GridMismatch);
    }
    if family.is_empty() {
        return Err(invalid("ball family is empty"));
    }
    if w.zero_cells() > 0 {
        return Err(invalid("weight must be positive on the grid"));
    }
    let qc = conjugate_exponent(q)?;
    let w_inv: Vec<f64> = w.values().iter().map(|v| 1.0 / v).collect();
    let mut local = sup_over_family(spec, family, w.values(), &w_inv, q.values(), qc.values())?;

    let w_root: Vec<f64> = w
        .values()
        .iter()
        .zip(q.values())
        .map(|(v, e)| v.powf(1.0 / e))
        .collect();
    let w_root_inv: Vec<f64> = w_root.iter().map(|v| 1.0 / v).collect();
    let tilde = sup_over_family(spec, family, &w_root, &w_root_inv, q.values(), qc.values())?;
    let tilde_constant = tilde.iter().map(|b| b.value).fold(0.0, f64::max);

    let diverging = origin_growth(&local) || local.iter().any(|b| b.value > DIVERGENCE_THRESHOLD);
    local.sort_by(|a, b| b.value.total_cmp(&a.value));
    let constant = local[0].value;
    let witnesses = local.iter().take(WITNESS_COUNT).copied().collect();

    let fit = estimate_delta_exponents(w, q, &NestedFamily::default_for(spec))?;
    Ok(WeightClassReport {
        constant,
        tilde_constant,
        witnesses,
        delta1: fit.delta1,
        delta2: fit.delta2,
        fit_residual: fit.residual,
        degenerate_fit: fit.degenerate,
        diverging,
        balls_tested: family.len(),
    })
}

/// Growth by more than 25% at each of the two largest origin-centered balls.
fn origin_growth(values: &[BallWitness]) -> bool {
    let mut origin: Vec<&BallWitness> = values.iter().filter(|b| b.center == [0.0, 0.0]).collect();
    origin.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    let m = origin.len();
    m >= 3
        && origin[m - 1].value > 1.25 * origin[m - 2].value
        && origin[m - 2].value > 1.25 * origin[m - 3].value
}

/// Concentric pairs `S = B(c, 2^-m R) ⊂ B = B(c, R)` for `m = 1..=8`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedFamily {
    pub centers: Vec<[f64; 2]>,
    pub outer_radii: Vec<f64>,
    pub depth: u32,
    /// Inner balls smaller than this are dropped.
    pub min_inner_radius: f64,
}

impl NestedFamily {
    /// Centers `0` and `±2^(K-2) e_1`, outer radii `2^(K-1)`, `2^(K-2)`,
    /// `2^(K-3)`, inner radii at least `4h`.
    pub fn default_for(spec: &GridSpec) -> Self {
        let k = spec.halfwidth_log2();
        let c = 2f64.powi(k - 2);
        Self {
            centers: vec![[0.0, 0.0], [-c, 0.0], [c, 0.0]],
            outer_radii: vec![2f64.powi(k - 1), 2f64.powi(k - 2), 2f64.powi(k - 3)],
            depth: 8,
            min_inner_radius: 4.0 * spec.step(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaFit {
    pub delta1: f64,
    pub delta2: f64,
    /// Largest RMS residual of the per-series log-log fits.
    pub residual: f64,
    /// All norm ratios coincide; both exponents default to 1.
    pub degenerate: bool,
}

/// Upper bound on the constant `C` allowed in the decay fit.
pub const DELTA_FIT_MAX_CONSTANT: f64 = 10.0;

/// One series: `(ln(|S|/|B|), ln(norm ratio))` for each depth.
type Series = Vec<(f64, f64)>;

fn nested_series(
    spec: &GridSpec,
    family: &NestedFamily,
    w: &[f64],
    q: &[f64],
) -> Result<Vec<Series>> {
    let mut out = Vec::new();
    for &center in &family.centers {
        for &r in &family.outer_radii {
            let outer = Ball { center, radius: r };
            if !outer.inside(spec) {
                continue;
            }
            let cells_b = outer.cells(spec);
            let norm_b = indicator_norm(spec, &cells_b, w, q)?;
            let mut series = Vec::new();
            for m in 1..=family.depth {
                let inner = r * 2f64.powi(-(m as i32));
                if inner < family.min_inner_radius {
                    break;
                }
                let cells_s = ball_cells(spec, center, inner);
                let norm_s = indicator_norm(spec, &cells_s, w, q)?;
                let x = (cells_s.len() as f64 / cells_b.len() as f64).ln();
                series.push((x, (norm_s / norm_b).ln()));
            }
            if series.len() >= 2 {
                out.push(series);
            }
        }
    }
    Ok(out)
}

/// Least-squares slope and RMS residual.
fn fit_line(series: &Series) -> (f64, f64) {
    let n = series.len() as f64;
    let mx = series.iter().map(|p| p.0).sum::<f64>() / n;
    let my = series.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = series.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = series.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (series
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

/// Smallest fitted slope over all series, lowered until the bound holds
/// with `C <= 10` at every sample, clamped to `(0, 1]`.
fn fit_exponent(all: &[Series]) -> (f64, f64, bool) {
    let ys: Vec<f64> = all.iter().flatten().map(|p| p.1).collect();
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    if ys.is_empty() || spread <= 1e-12 {
        return (1.0, 0.0, true);
    }
    let mut delta = f64::INFINITY;
    let mut residual: f64 = 0.0;
    for s in all {
        let (slope, rms) = fit_line(s);
        delta = delta.min(slope);
        residual = residual.max(rms);
    }
    let cap = DELTA_FIT_MAX_CONSTANT.ln();
    for &(x, y) in all.iter().flatten() {
        delta = delta.min((cap - y) / x.abs());
    }
    (delta.clamp(f64::MIN_POSITIVE, 1.0), residual, false)
}

/// Decay exponents `delta1` (for `w`, `q`) and `delta2` (for `w^-1`, `q'`).
pub fn estimate_delta_exponents(
    w: &Weight,
    q: &ExponentFunction,
    family: &NestedFamily,
) -> Result<DeltaFit> {
    let spec = w.spec();
    if spec != q.spec() {
        return Err(Error::GridMismatch);
    }
    let qc = conjugate_exponent(q)?;
    let w_inv: Vec<f64> = w.values().iter().map(|v| 1.0 / v).collect();
    let s1 = nested_series(spec, family, w.values(), q.values())?;
    let s2 = nested_series(spec, family, &w_inv, qc.values())?;
    if s1.is_empty() {
        return Err(invalid("nested family has no admissible pair"));
    }
    let (delta1, r1, d1) = fit_exponent(&s1);
    let (delta2, r2, d2) = fit_exponent(&s2);
    Ok(DeltaFit {
        delta1,
        delta2,
        residual: r1.max(r2),
        degenerate: d1 || d2,
    })
}

/// Outcome of checking `-n delta1 < alpha(0)` and `alpha_inf < n delta2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub alpha_origin: f64,
    pub alpha_infinity: f64,
    pub lower: f64,
    pub upper: f64,
    pub satisfied: bool,
}

pub fn check_alpha_window(alpha: &ExponentFunction, delta1: f64, delta2: f64) -> HypothesisCheck {
    let n = alpha.spec().dimension() as f64;
    let lower = -n * delta1;
    let upper = n * delta2;
    let a0 = alpha.value_at_origin();
    let ai = alpha.value_at_infinity();
    HypothesisCheck {
        alpha_origin: a0,
        alpha_infinity: ai,
        lower,
        upper,
        satisfied: lower < a0 && ai < upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn line() -> GridSpec {
        make_grid(1, 6, 16384, -20, 6).unwrap()
    }

    #[test]
    fn presets() {
        let g = line();
        assert_eq!(Weight::parse(&g, "power:0.25").unwrap().gamma(), Some(0.25));
        assert_eq!(Weight::parse(&g, "const:3").unwrap().values()[7], 3.0);
        assert!(Weight::parse(&g, "const:-1").is_err());
        assert!(Weight::parse(&g, "exp:1").is_err());
        assert!(Weight::from_values(&g, vec![-1.0; g.len()], "neg").is_err());
    }

    #[test]
    fn default_family_shape() {
        let g = line();
        let fam = BallFamily::default_for(&g);
        assert!(fam.len() > 100);
        assert_eq!(fam.min_radius(), 4.0 * g.step());
        assert!(fam.balls.iter().all(|b| b.inside(&g)));
        assert!(fam.balls.iter().any(|b| b.radius == 64.0));
    }

    #[test]
    fn unit_weight_constant_exponent_is_one() {
        let g = line();
        let q = ExponentFunction::constant(&g, 2.0).unwrap();
        let fam = BallFamily::default_for(&g);
        let r = muckenhoupt_constant(&Weight::unit(&g), &q, &fam).unwrap();
        assert!((r.constant - 1.0).abs() <= 2.0 * g.step() / fam.min_radius());
        assert!(r.constant >= 1.0 - 1e-12);
        assert!(!r.diverging);
        assert!((r.delta1 - 0.5).abs() < 0.02 && (r.delta2 - 0.5).abs() < 0.02);
    }

    #[test]
    fn delta_exponents_for_constant_p() {
        let g = line();
        for p in [1.5, 3.0, 4.0] {
            let q = ExponentFunction::constant(&g, p).unwrap();
            let fit =
                estimate_delta_exponents(&Weight::unit(&g), &q, &NestedFamily::default_for(&g))
                    .unwrap();
            assert!((fit.delta1 - 1.0 / p).abs() < 0.02, "{p}: {fit:?}");
            assert!((fit.delta2 - (1.0 - 1.0 / p)).abs() < 0.02, "{p}: {fit:?}");
        }
    }

    #[test]
    fn alpha_window() {
        let g = line();
        let alpha = ExponentFunction::constant(&g, 0.2).unwrap();
        assert!(check_alpha_window(&alpha, 0.5, 0.5).satisfied);
        let alpha = ExponentFunction::constant(&g, 0.7).unwrap();
        assert!(!check_alpha_window(&alpha, 0.5, 0.5).satisfied);
    }
}

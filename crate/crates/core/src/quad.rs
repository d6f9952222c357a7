//! Adaptive Gauss-Kronrod quadrature, semi-infinite variable transforms, and
//! sequence acceleration for oscillatory tails.

use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float as _;

/// 15-point Kronrod abscissae on [-1, 1] (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

/// 15-point Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// Embedded 7-point Gauss weights (nodes are the odd-index Kronrod nodes).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations.
    pub evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    /// Evaluation budget exhausted before the tolerance was met; the partial
    /// result is attached.
    NotConverged { partial: QuadResult },
    /// Tail acceleration did not stabilize; partial sums attached.
    TailNotConverged { partial_sums: Vec<f64> },
    BadInterval,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotConverged { partial } => write!(
                f,
                "quadrature not converged: value {:e}, error {:e} after {} evaluations",
                partial.value, partial.error, partial.evals
            ),
            Self::TailNotConverged { partial_sums } => {
                write!(f, "oscillatory tail not converged after {} intervals", partial_sums.len())
            }
            Self::BadInterval => write!(f, "invalid integration interval"),
        }
    }
}

impl core::error::Error for QuadError {}

/// One Gauss-Kronrod 15(7) panel: returns (kronrod value, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut result_gauss = fc * WG[3];
    let mut result_kronrod = fc * WGK[7];
    let mut resabs = result_kronrod.abs();
    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = result_kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = result_kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((result_kronrod - result_gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = libm::pow(200.0 * err / resasc, 1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// Panels with the largest error estimate are bisected until the summed error
/// meets `max(abs_tol, rel_tol * |value|)` or `max_evals` is exhausted. The
/// final value is reduced in left-to-right panel order, so results are
/// deterministic for a given integrand.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: u64,
) -> Result<QuadResult, QuadError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BadInterval);
    }
    let mut evals: u64 = 15;
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = alloc::vec![Panel { a, b, value: v, error: e }];
    loop {
        let mut total_value = 0.0;
        let mut total_error = 0.0;
        let mut worst = 0usize;
        for (i, p) in panels.iter().enumerate() {
            total_value += p.value;
            total_error += p.error;
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let tol = abs_tol.max(rel_tol * total_value.abs());
        if total_error <= tol {
            return Ok(reduce(&mut panels, evals));
        }
        if evals + 30 > max_evals {
            let partial = reduce(&mut panels, evals);
            return Err(QuadError::NotConverged { partial });
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Interval collapsed to machine precision; accept what we have.
            return Ok(reduce(&mut panels, evals));
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        evals += 30;
        panels[worst] = Panel { a: pa, b: mid, value: v1, error: e1 };
        panels.push(Panel { a: mid, b: pb, value: v2, error: e2 });
    }
}

fn reduce(panels: &mut [Panel], evals: u64) -> QuadResult {
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
    let mut value = 0.0;
    let mut error = 0.0;
    for p in panels.iter() {
        value += p.value;
        error += p.error;
    }
    QuadResult { value, error, evals }
}

/// Integrate `f` over `(0, inf)` via the rational map `x = scale * u / (1 - u)`.
///
/// `scale` should match the decay scale of the integrand.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: u64,
) -> Result<QuadResult, QuadError> {
    integrate(
        move |u| {
            let one_minus = 1.0 - u;
            let x = scale * u / one_minus;
            let jac = scale / (one_minus * one_minus);
            f(x) * jac
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
        max_evals,
    )
}

/// Wynn epsilon algorithm: accelerated limit of a sequence of partial sums.
///
/// Returns the highest even-column entry. Robust for alternating tails; for a
/// short input the last partial sum is returned unchanged.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n == 0 {
        return 0.0;
    }
    if n < 3 {
        return sums[n - 1];
    }
    let mut prev: Vec<f64> = Vec::new(); // column k-1
    let mut cur: Vec<f64> = sums.to_vec(); // column k
    let mut best = sums[n - 1];
    loop {
        if cur.len() < 2 {
            break;
        }
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let base = if prev.is_empty() { 0.0 } else { prev[i + 1] };
            if diff == 0.0 {
                next.push(base);
            } else {
                next.push(base + 1.0 / diff);
            }
        }
        prev = core::mem::take(&mut cur);
        cur = next;
        // Even columns of the epsilon table approximate the limit.
        if prev.len().wrapping_sub(cur.len()) == 1 && (sums.len() - cur.len()) % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        // GK15 integrates degree <= 22 exactly; a cubic on one panel suffices.
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 0.0, 10_000).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn integrable_log_singularity() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-10, 1e-300, 10_000_000).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-9);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let r = integrate_semi_infinite(|x: f64| (-x * x).exp(), 1.0, 1e-12, 0.0, 1_000_000)
            .unwrap();
        assert_relative_eq!(
            r.value,
            0.5 * core::f64::consts::PI.sqrt(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let err = integrate(|x: f64| (1e4 * x).sin().abs(), 0.0, 1.0, 1e-14, 0.0, 300).unwrap_err();
        match err {
            QuadError::NotConverged { partial } => assert!(partial.evals <= 300),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = sum (-1)^(n+1)/n, slowly convergent.
        let mut s = 0.0;
        let sums: alloc::vec::Vec<f64> = (1..=12)
            .map(|n| {
                s += if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
                s
            })
            .collect();
        let accel = wynn_epsilon(&sums);
        assert_relative_eq!(accel, core::f64::consts::LN_2, max_relative = 1e-8);
    }
}

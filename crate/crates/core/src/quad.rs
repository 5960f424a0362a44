//! Quadrature helpers: cached Gauss–Legendre rules, a globally adaptive
//! Gauss–Kronrod (7, 15) integrator and pairwise summation.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const GL_SIZES: [usize; 8] = [8, 16, 24, 32, 48, 64, 96, 128];
static GL_CACHE: [OnceLock<Vec<(f64, f64)>>; 8] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

/// Gauss–Legendre nodes and weights on `[-1, 1]`. `n` is rounded up to the
/// nearest cached size (8, 16, 24, 32, 48, 64, 96 or 128).
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    let idx = GL_SIZES.iter().position(|&s| s >= n).unwrap_or(GL_SIZES.len() - 1);
    GL_CACHE[idx].get_or_init(|| {
        let degree = NonZeroUsize::new(GL_SIZES[idx]).expect("nonzero size");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
            .as_node_weight_pairs()
            .to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// Fixed-order Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gl_integrate<F: FnMut(f64) -> f64>(n: usize, a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let s: f64 = gauss_legendre(n).iter().map(|&(x, w)| w * f(mid + half * x)).sum();
    s * half
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod integration: the interval with the
/// largest error estimate is bisected until the total estimate drops below
/// `max(abs_tol, rel_tol·|value|)` or 4000 intervals are in use.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, evals: 0 };
    }
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(&mut f, a, b);
    parts.push((a, b, v, e));
    let mut evals = 15;
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= 4000 {
            return Integral { value, error, evals };
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Integral { value, error, evals };
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        parts[worst] = (lo, mid, v1, e1);
        parts.push((mid, hi, v2, e2));
    }
}

/// Adaptive integration over consecutive breakpoints; the tolerance is shared
/// evenly between the pieces.
pub fn adaptive_pieces<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], abs_tol: f64, rel_tol: f64) -> Integral {
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    let mut total = Integral { value: 0.0, error: 0.0, evals: 0 };
    for w in points.windows(2) {
        let part = adaptive(&mut f, w[0], w[1], abs_tol / pieces, rel_tol);
        total.value += part.value;
        total.error += part.error;
        total.evals += part.evals;
    }
    total
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_weights_sum_to_two() {
        for n in GL_SIZES {
            let s: f64 = gauss_legendre(n).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn gl_exact_for_polynomials() {
        let v = gl_integrate(8, 0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_log_singularity() {
        let r = adaptive(|x: f64| x.ln(), 0.0, 1.0, 1e-12, 1e-12);
        assert!((r.value + 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn adaptive_oscillatory() {
        let r = adaptive(|x: f64| (20.0 * x).cos(), 0.0, std::f64::consts::PI, 1e-12, 0.0);
        assert!(r.value.abs() < 1e-11);
    }

    #[test]
    fn pieces_match_whole() {
        let a = adaptive(|x: f64| (-x).exp(), 0.0, 5.0, 1e-13, 0.0).value;
        let b = adaptive_pieces(|x: f64| (-x).exp(), &[0.0, 1.0, 2.5, 5.0], 1e-13, 0.0).value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }
}

//! Small numeric helpers shared across modules: compensated summation,
//! logarithmic grids, and adaptive Simpson quadrature.

/// Compensated accumulator (Kahan-Babuska / Neumaier variant, which also
/// survives summands larger than the running sum).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of a slice.
pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// `count` points geometrically spaced on `[lo, hi]`, endpoints included.
///
/// Requires `0 < lo <= hi`. Refining with `2*count - 1` points keeps the
/// original points, so grids built this way are nested.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| lo * (ratio * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(&f, a, b, fa, fm, fb, whole, tol.max(f64::MIN_POSITIVE), 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_cancellation() {
        let xs = vec![1e16, 1.0, -1e16];
        assert_eq!(kahan_sum(xs), 1.0);
    }

    #[test]
    fn logspace_is_nested_under_doubling() {
        let coarse = logspace(0.01, 10.0, 5);
        let fine = logspace(0.01, 10.0, 9);
        for (i, c) in coarse.iter().enumerate() {
            assert!((fine[2 * i] - c).abs() <= 1e-14 * c.abs());
        }
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let got = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((got - 2.0).abs() < 1e-10);
        let got = adaptive_simpson(|x| 1.0 / x, 1.0, std::f64::consts::E, 1e-12);
        assert!((got - 1.0).abs() < 1e-10);
    }
}

//! Small numeric helpers shared across modules.

use nalgebra::Complex;

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Neumaier-compensated sum, evaluated in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// `n` points spaced geometrically on `[start, stop]`, both ends included.
pub fn geometric_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let ratio = (stop / start).ln() / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start * (ratio * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(values), 2.0);
        assert_eq!(values.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(5.0, 5000.0, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 5.0);
        assert_eq!(g[39], 5000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let r0 = g[1] / g[0];
        let r1 = g[30] / g[29];
        assert!((r0 - r1).abs() < 1e-12);
    }
}

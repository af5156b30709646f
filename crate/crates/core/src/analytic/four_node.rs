//! Explicit formulas for the four-node chain.

use num_complex::Complex64;

/// `α(ω, δ) = √((2ω + δ)² + 4)`.
pub fn alpha(omega: f64, delta: f64) -> f64 {
    ((2.0 * omega + delta).powi(2) + 4.0).sqrt()
}

/// `β(ω, δ) = √((2ω − δ)² + 4)`.
pub fn beta(omega: f64, delta: f64) -> f64 {
    ((2.0 * omega - delta).powi(2) + 4.0).sqrt()
}

/// The four eigenvalues, in the order
/// `[(2ω−δ+α)/2, (2ω−δ−α)/2, (2ω+δ+β)/2, (2ω+δ−β)/2]`.
pub fn four_node_eigenvalues(omega: f64, delta: f64) -> [f64; 4] {
    let a = alpha(omega, delta);
    let b = beta(omega, delta);
    [
        (2.0 * omega - delta + a) / 2.0,
        (2.0 * omega - delta - a) / 2.0,
        (2.0 * omega + delta + b) / 2.0,
        (2.0 * omega + delta - b) / 2.0,
    ]
}

/// End-to-end probability of the four-node chain at time `τ`.
pub fn four_node_probability(omega: f64, delta: f64, tau: f64) -> f64 {
    let a = alpha(omega, delta);
    let b = beta(omega, delta);
    let i = Complex64::i();
    let slow = Complex64::from_polar(0.5, -delta * tau / 4.0)
        * (Complex64::new((tau * b / 4.0).cos(), 0.0) - i * ((2.0 * omega - delta) / b * (tau * b / 4.0).sin()));
    let fast = Complex64::from_polar(0.5, delta * tau / 4.0)
        * (Complex64::new((tau * a / 4.0).cos(), 0.0) - i * ((2.0 * omega + delta) / a * (tau * a / 4.0).sin()));
    (slow - fast).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_chain_values() {
        let s5 = 5f64.sqrt();
        let ev = four_node_eigenvalues(0.0, 1.0);
        let expected = [(-1.0 + s5) / 2.0, (-1.0 - s5) / 2.0, (1.0 + s5) / 2.0, (1.0 - s5) / 2.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        // oracle: 2cos(kπ/5)
        let mut oracle: Vec<f64> = (1..=4)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / 5.0).cos())
            .collect();
        let mut got = ev.to_vec();
        oracle.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_field_alpha_equals_beta() {
        for delta in [0.1, 1.0, 8.0] {
            assert_eq!(alpha(0.0, delta), beta(0.0, delta));
            assert_eq!(alpha(0.0, delta), (delta * delta + 4.0).sqrt());
        }
    }

    #[test]
    fn probability_vanishes_at_zero_time() {
        for (w, d) in [(0.0, 1.0), (1.3, 0.4), (-2.0, 5.0)] {
            assert!(four_node_probability(w, d, 0.0) < 1e-30);
        }
    }

    #[test]
    fn alternating_chain_perfect_point() {
        let delta = 2.0 / 3f64.sqrt();
        let tau = std::f64::consts::PI * 3f64.sqrt();
        assert!((four_node_probability(0.0, delta, tau) - 1.0).abs() < 1e-12);
    }
}

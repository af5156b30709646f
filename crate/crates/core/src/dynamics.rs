//! Time evolution in the single-excitation sector.
//!
//! With `B u_j = λ_j u_j` the amplitude between sites is
//! `f_{nm}(τ) = Σ_j u_{nj} u_{mj} e^{−iλ_j τ/2}`, so once the block is
//! diagonalized every time sample costs `O(N)` and long scans accumulate no
//! integration error.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::ExcitationBlock;
use crate::error::{Error, Result};
use crate::output::fmt_sig;
use crate::spectral::Spectrum;

/// Samples per refinement chunk when scanning without storing a trace.
const STREAM_CHUNK: usize = 1 << 14;

pub fn transfer_amplitude(spec: &Spectrum, n: usize, m: usize, tau: f64) -> Result<Complex64> {
    let len = spec.len();
    for index in [n, m] {
        if index >= len {
            return Err(Error::Index { index, len });
        }
    }
    Ok(spec
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &l)| Complex64::from_polar(spec.component(n, j) * spec.component(m, j), -0.5 * l * tau))
        .sum())
}

/// `|f_{nm}(τ)|²`.
pub fn probability(spec: &Spectrum, n: usize, m: usize, tau: f64) -> Result<f64> {
    Ok(transfer_amplitude(spec, n, m, tau)?.norm_sqr())
}

/// State-transfer fidelity averaged over the Bloch sphere:
/// `|f| cos Γ / 3 + |f|² / 6 + 1/2` with `Γ = arg f`.
pub fn fidelity(f: Complex64) -> f64 {
    let r = f.norm();
    let cos_gamma = if r > 0.0 { f.re / r } else { 1.0 };
    r * cos_gamma / 3.0 + r * r / 6.0 + 0.5
}

/// Perfect-transfer time `πL³` of an isolated pair at distance `L`.
pub fn two_spin_time(length: f64) -> Result<f64> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Domain(format!("length must be positive, got {length}")));
    }
    Ok(PI * length.powi(3))
}

/// Sampling step for a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStep {
    Fixed(f64),
    #[serde(with = "auto_keyword")]
    Auto,
}

mod auto_keyword {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let text = String::deserialize(d)?;
        if text == "auto" {
            Ok(())
        } else {
            Err(D::Error::custom(format!(
                "expected a number or \"auto\", got \"{text}\""
            )))
        }
    }
}

impl std::str::FromStr for TimeStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TimeStep::Auto);
        }
        s.parse::<f64>()
            .map(TimeStep::Fixed)
            .map_err(|_| Error::Config(format!("time step must be a number or `auto`, got `{s}`")))
    }
}

impl TimeStep {
    pub fn resolve(self, probe: &TransferProbe) -> Result<f64> {
        match self {
            TimeStep::Auto => Ok(probe.auto_step()),
            TimeStep::Fixed(dt) if dt > 0.0 && dt.is_finite() => Ok(dt),
            TimeStep::Fixed(dt) => Err(Error::Config(format!("time step must be positive, got {dt}"))),
        }
    }
}

/// A local maximum of the transfer probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub time: f64,
    pub probability: f64,
    /// Grid index of the sample that seeded the refinement.
    pub index: usize,
}

/// Precomputed `|f_{nm}(τ)|` evaluator: `f = Σ_j w_j e^{−iλ_j τ/2}` with
/// `w_j = u_{nj} u_{mj}`.
#[derive(Clone, Debug)]
pub struct TransferProbe {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl TransferProbe {
    pub fn new(spec: &Spectrum, from: usize, to: usize) -> Result<Self> {
        let len = spec.len();
        for index in [from, to] {
            if index >= len {
                return Err(Error::Index { index, len });
            }
        }
        let weights = (0..len)
            .map(|j| spec.component(from, j) * spec.component(to, j))
            .collect();
        Ok(Self {
            eigenvalues: spec.eigenvalues().to_vec(),
            weights,
        })
    }

    /// First node to last node.
    pub fn end_to_end(spec: &Spectrum) -> Self {
        let n = spec.len();
        Self::new(spec, 0, n - 1).expect("non-empty spectrum")
    }

    pub fn from_weights(eigenvalues: Vec<f64>, weights: Vec<f64>) -> Self {
        assert_eq!(eigenvalues.len(), weights.len());
        Self { eigenvalues, weights }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn amplitude(&self, tau: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&l, &w)| Complex64::from_polar(w, -0.5 * l * tau))
            .sum()
    }

    pub fn probability(&self, tau: f64) -> f64 {
        self.amplitude(tau).norm_sqr()
    }

    fn span(&self) -> f64 {
        let lo = self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// `min(0.05, (4π/λ_span)/20)`: at least 20 samples per fastest beat.
    pub fn auto_step(&self) -> f64 {
        let span = self.span();
        if span > 0.0 {
            (4.0 * PI / span / 20.0).min(0.05)
        } else {
            0.05
        }
    }

    /// Upper bound on how far a grid sample can sit below the true maximum it
    /// brackets: `|P''| ≤ λ_span²/4`, so `ΔP ≤ λ_span² dτ² / 8`.
    fn sampling_slack(&self, dt: f64) -> f64 {
        let span = self.span();
        (span * span * dt * dt / 8.0).min(1.0)
    }

    /// Samples `P(τ)` at `τ_i = i·dτ` for `0 ≤ τ_i ≤ τ_max`.
    pub fn sample(&self, tau_max: f64, dt: f64) -> Result<TransferTrace> {
        check_scan(tau_max, dt)?;
        let count = grid_len(tau_max, dt);
        let tau: Vec<f64> = (0..count).map(|i| i as f64 * dt).collect();
        let p = tau.par_iter().map(|&t| self.probability(t)).collect();
        Ok(TransferTrace {
            tau,
            p,
            step: dt,
            description: String::new(),
            probe: self.clone(),
        })
    }

    /// `dP/dτ = 2 Re(f̄ f')` with `f' = Σ_j w_j (−iλ_j/2) e^{−iλ_j τ/2}`.
    pub fn slope(&self, tau: f64) -> f64 {
        let (f, df) = self.eigenvalues.iter().zip(&self.weights).fold(
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            |(f, df), (&l, &w)| {
                let term = Complex64::from_polar(w, -0.5 * l * tau);
                (f + term, df + term * Complex64::new(0.0, -0.5 * l))
            },
        );
        2.0 * (f.conj() * df).re
    }

    /// Maximum of the exact `P(τ)` on `[lo, hi]`.
    ///
    /// When the slope changes sign across the bracket its zero is bisected,
    /// which pins the peak time to rounding; a flat-topped maximum located
    /// from `P` alone is only good to about `√ε`. Otherwise golden-section
    /// search on `P` is used.
    pub fn refine_peak(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (mut a, mut b) = (lo, hi);
        if self.slope(a) > 0.0 && self.slope(b) < 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.slope(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let t = 0.5 * (a + b);
            return (t, self.probability(t));
        }
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let tol = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.probability(c);
        let mut fd = self.probability(d);
        for _ in 0..200 {
            if (b - a).abs() <= tol {
                break;
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.probability(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.probability(d);
            }
        }
        let t = 0.5 * (a + b);
        (t, self.probability(t))
    }

    fn refine_candidate(&self, tau: &[f64], p: &[f64], i: usize, threshold: f64) -> Option<Peak> {
        let (t, pt) = self.refine_peak(tau[i - 1], tau[i + 1]);
        let (time, probability) = if pt >= p[i] { (t, pt) } else { (tau[i], p[i]) };
        (probability >= threshold).then_some(Peak {
            time,
            probability,
            index: i,
        })
    }

    /// Refined local maxima of `trace` with `P ≥ threshold`, in time order.
    pub fn find_peaks(&self, trace: &TransferTrace, threshold: f64) -> Vec<Peak> {
        let (tau, p) = (&trace.tau, &trace.p);
        if p.len() < 3 {
            return Vec::new();
        }
        let cutoff = threshold - self.sampling_slack(trace.step);
        let candidates: Vec<usize> = (1..p.len() - 1)
            .filter(|&i| p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] >= cutoff)
            .collect();
        candidates
            .par_iter()
            .filter_map(|&i| self.refine_candidate(tau, p, i, threshold))
            .collect()
    }

    /// Earliest refined local maximum with `P ≥ threshold` in `(0, τ_max]`,
    /// scanning in chunks without keeping the trace.
    pub fn first_peak(&self, tau_max: f64, dt: f64, threshold: f64) -> Result<Option<Peak>> {
        check_scan(tau_max, dt)?;
        let total = grid_len(tau_max, dt);
        let cutoff = threshold - self.sampling_slack(dt);
        let mut start = 0usize;
        while start + 2 < total {
            // overlap by two samples so every interior index is tested once
            let end = (start + STREAM_CHUNK).min(total);
            let tau: Vec<f64> = (start..end).map(|i| i as f64 * dt).collect();
            let p: Vec<f64> = tau.iter().map(|&t| self.probability(t)).collect();
            for k in 1..p.len().saturating_sub(1) {
                if p[k] > p[k - 1] && p[k] >= p[k + 1] && p[k] >= cutoff {
                    if let Some(mut peak) = self.refine_candidate(&tau, &p, k, threshold) {
                        peak.index += start;
                        return Ok(Some(peak));
                    }
                }
            }
            if end == total {
                break;
            }
            start = end - 2;
        }
        Ok(None)
    }

    /// Refined local maximum nearest to `t_ref`.
    pub fn nearest_peak(&self, t_ref: f64, dt: f64) -> Result<Peak> {
        check_scan(t_ref.max(dt), dt)?;
        let beat = if self.span() > 0.0 { 4.0 * PI / self.span() } else { 1.0 };
        let mut half = (4.0 * beat).max(20.0 * dt);
        for _ in 0..30 {
            let first = ((t_ref - half) / dt).floor().max(0.0) as usize;
            let last = ((t_ref + half) / dt).ceil() as usize;
            let tau: Vec<f64> = (first..=last).map(|i| i as f64 * dt).collect();
            let p: Vec<f64> = tau.par_iter().map(|&t| self.probability(t)).collect();
            let best = (1..p.len().saturating_sub(1))
                .filter(|&k| p[k] > p[k - 1] && p[k] >= p[k + 1])
                .filter_map(|k| self.refine_candidate(&tau, &p, k, f64::NEG_INFINITY))
                .min_by(|a, b| (a.time - t_ref).abs().total_cmp(&(b.time - t_ref).abs()));
            if let Some(mut peak) = best {
                peak.index += first;
                return Ok(peak);
            }
            half *= 2.0;
        }
        Err(Error::Domain(format!("no local maximum of P near τ = {t_ref}")))
    }
}

/// Number of samples `i·dτ ≤ τ_max`, tolerating rounding in the quotient.
fn grid_len(tau_max: f64, dt: f64) -> usize {
    (tau_max / dt * (1.0 + 1e-12)).floor() as usize + 1
}

fn check_scan(tau_max: f64, dt: f64) -> Result<()> {
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(Error::Config(format!("tau_max must be positive, got {tau_max}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

/// Sampled end-to-end probability curve.
#[derive(Clone, Debug)]
pub struct TransferTrace {
    tau: Vec<f64>,
    p: Vec<f64>,
    step: f64,
    description: String,
    probe: TransferProbe,
}

impl TransferTrace {
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn probe(&self) -> &TransferProbe {
        &self.probe
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// CSV with header `tau,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 24 + 8);
        out.push_str("tau,p\n");
        for (t, p) in self.tau.iter().zip(&self.p) {
            let _ = writeln!(out, "{},{}", fmt_sig(*t), fmt_sig(*p));
        }
        out
    }
}

/// Refined peaks of `trace` above `threshold`.
pub fn find_peaks(trace: &TransferTrace, threshold: f64) -> Vec<Peak> {
    trace.probe.find_peaks(trace, threshold)
}

/// CSV with header `T,P`.
pub fn peaks_to_csv(peaks: &[Peak]) -> String {
    let mut out = String::from("T,P\n");
    for peak in peaks {
        let _ = writeln!(out, "{},{}", fmt_sig(peak.time), fmt_sig(peak.probability));
    }
    out
}

/// Diagonalizes the block once and samples the end-to-end probability.
pub fn scan_probability(block: &ExcitationBlock, tau_max: f64, step: TimeStep) -> Result<TransferTrace> {
    let spectrum = block.spectrum()?;
    let probe = TransferProbe::end_to_end(&spectrum);
    let dt = step.resolve(&probe)?;
    let mut trace = probe.sample(tau_max, dt)?;
    trace.description = format!("{} dtau={}", block.describe(), fmt_sig(dt));
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_tridiagonal;

    fn pair() -> Spectrum {
        eig_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap()
    }

    #[test]
    fn amplitude_at_zero_time() {
        let s = pair();
        assert!((transfer_amplitude(&s, 0, 0, 0.0).unwrap() - 1.0).norm() < 1e-15);
        assert!(transfer_amplitude(&s, 0, 1, 0.0).unwrap().norm() < 1e-15);
        assert!(matches!(
            transfer_amplitude(&s, 0, 2, 0.0),
            Err(Error::Index { index: 2, len: 2 })
        ));
    }

    #[test]
    fn two_spin_oracle() {
        // f_12 = -i sin(τ/2) for λ = ±1
        let s = pair();
        for k in 0..50 {
            let tau = 0.137 * k as f64;
            let f = transfer_amplitude(&s, 0, 1, tau).unwrap();
            assert!((f - Complex64::new(0.0, -(tau / 2.0).sin())).norm() < 1e-14);
        }
        assert!((transfer_amplitude(&s, 0, 1, PI).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_values() {
        assert!((fidelity(Complex64::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(Complex64::new(0.0, 0.0)), 0.5);
        assert!((fidelity(Complex64::new(0.9, 0.0)) - 0.935).abs() < 1e-15);
        assert!((fidelity(Complex64::new(0.0, 1.0)) - (0.5 + 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn pair_times() {
        assert!((two_spin_time(1.0).unwrap() - PI).abs() < 1e-15);
        assert!((two_spin_time(5.5).unwrap() - 522.682).abs() < 1e-3);
        assert!((two_spin_time(9.0).unwrap() - 2290.221).abs() < 1e-3);
        assert!(two_spin_time(0.0).is_err());
    }

    #[test]
    fn time_step_parsing() {
        assert_eq!("auto".parse::<TimeStep>().unwrap(), TimeStep::Auto);
        assert_eq!("0.01".parse::<TimeStep>().unwrap(), TimeStep::Fixed(0.01));
        assert!("fast".parse::<TimeStep>().is_err());
        assert_eq!(serde_json::from_str::<TimeStep>("\"auto\"").unwrap(), TimeStep::Auto);
        assert_eq!(serde_json::from_str::<TimeStep>("0.5").unwrap(), TimeStep::Fixed(0.5));
        assert!(serde_json::from_str::<TimeStep>("\"often\"").is_err());
        let probe = TransferProbe::end_to_end(&pair());
        assert!(TimeStep::Fixed(-1.0).resolve(&probe).is_err());
        assert_eq!(TimeStep::Auto.resolve(&probe).unwrap(), 0.05);
    }

    #[test]
    fn pair_peak_is_refined() {
        let probe = TransferProbe::end_to_end(&pair());
        let trace = probe.sample(5.0, 0.1).unwrap();
        assert_eq!(trace.p()[0], 0.0);
        let peaks = find_peaks(&trace, 0.5);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].time - PI).abs() < 1e-6);
        assert!((peaks[0].probability - 1.0).abs() < 1e-12);
        let first = probe.first_peak(5.0, 0.1, 0.5).unwrap().unwrap();
        assert_eq!(first, peaks[0]);
        let near = probe.nearest_peak(3.0, 0.1).unwrap();
        assert!((near.time - PI).abs() < 1e-6);
    }

    #[test]
    fn monotone_trace_has_no_peaks() {
        let probe = TransferProbe::end_to_end(&pair());
        let trace = probe.sample(3.0, 0.01).unwrap();
        assert!(find_peaks(&trace, 0.1).is_empty());
        assert!(probe.first_peak(3.0, 0.01, 0.1).unwrap().is_none());
    }

    #[test]
    fn scan_argument_errors() {
        let probe = TransferProbe::end_to_end(&pair());
        assert!(probe.sample(0.0, 0.1).is_err());
        assert!(probe.sample(1.0, 0.0).is_err());
        assert!(probe.first_peak(-1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn csv_headers() {
        let probe = TransferProbe::end_to_end(&pair());
        let trace = probe.sample(0.2, 0.1).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("tau,p\n0,0\n0.1,"));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(peaks_to_csv(&[]), "T,P\n");
    }
}

//! Digital Butterworth low-pass design and zero-phase application.
//!
//! The filter is designed from the analog prototype by bilinear transform
//! with frequency prewarping, then applied either as a single forward pass
//! or forward-backward (zero phase). Both passes run with steady-state
//! initial conditions so a constant signal passes through with unit gain to
//! machine precision.

use std::f64::consts::PI;

/// Transfer-function coefficients of a discrete-time IIR filter,
/// numerator `b` and denominator `a`, both of length `order + 1`,
/// normalized so `a[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoefficients {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl IirCoefficients {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }
}

/// Design an order-`order` digital Butterworth low-pass at `cutoff_hz`.
///
/// Requires `0 < cutoff_hz < sample_rate_hz / 2`.
pub fn design_lowpass(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> IirCoefficients {
    assert!(order >= 1, "filter order must be at least 1");
    assert!(
        cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0,
        "cutoff must lie strictly inside (0, Nyquist)"
    );

    // Analog prototype poles on the unit circle, left half-plane.
    let n = order as f64;
    let prototype: Vec<(f64, f64)> = (0..order)
        .map(|k| {
            let theta = PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
            (theta.cos(), theta.sin())
        })
        .collect();

    // Prewarp the cutoff so the bilinear transform maps it exactly.
    let fs2 = 2.0 * sample_rate_hz;
    let warped = fs2 * (PI * cutoff_hz / sample_rate_hz).tan();

    // Bilinear transform of each scaled pole: z = (2fs + p) / (2fs - p).
    let mut digital_poles = Vec::with_capacity(order);
    for &(re, im) in &prototype {
        let (pre, pim) = (re * warped, im * warped);
        let (num_re, num_im) = (fs2 + pre, pim);
        let (den_re, den_im) = (fs2 - pre, -pim);
        let d = den_re * den_re + den_im * den_im;
        digital_poles.push((
            (num_re * den_re + num_im * den_im) / d,
            (num_im * den_re - num_re * den_im) / d,
        ));
    }

    // Denominator polynomial from the digital poles (monic, real).
    let mut acc: Vec<(f64, f64)> = vec![(1.0, 0.0)];
    for &(pre, pim) in &digital_poles {
        let mut next = vec![(0.0, 0.0); acc.len() + 1];
        for (i, &(cre, cim)) in acc.iter().enumerate() {
            next[i].0 += cre;
            next[i].1 += cim;
            next[i + 1].0 -= cre * pre - cim * pim;
            next[i + 1].1 -= cre * pim + cim * pre;
        }
        acc = next;
    }
    let a: Vec<f64> = acc.iter().map(|&(re, _)| re).collect();

    // All zeros at z = -1: numerator is binomial, scaled for unit DC gain.
    let mut b = vec![0.0; order + 1];
    b[0] = 1.0;
    for i in 1..=order {
        b[i] = b[i - 1] * (order - i + 1) as f64 / i as f64;
    }
    let gain = a.iter().sum::<f64>() / b.iter().sum::<f64>();
    for coeff in &mut b {
        *coeff *= gain;
    }

    IirCoefficients { b, a }
}

/// Steady-state filter state for a constant input of `x0` (direct form II
/// transposed). Starting from this state, a constant signal produces a
/// constant output from the first sample.
fn steady_state(coeffs: &IirCoefficients, x0: f64) -> Vec<f64> {
    let (b, a) = (&coeffs.b, &coeffs.a);
    let order = coeffs.order();
    let dc = b.iter().sum::<f64>() / a.iter().sum::<f64>();
    let y0 = dc * x0;
    let mut state = vec![0.0; order];
    state[order - 1] = b[order] * x0 - a[order] * y0;
    for k in (0..order - 1).rev() {
        state[k] = b[k + 1] * x0 - a[k + 1] * y0 + state[k + 1];
    }
    state
}

/// One pass of the filter (direct form II transposed) with the given
/// initial state.
fn run_pass(coeffs: &IirCoefficients, signal: &[f64], mut state: Vec<f64>) -> Vec<f64> {
    let (b, a) = (&coeffs.b, &coeffs.a);
    let order = coeffs.order();
    let mut out = Vec::with_capacity(signal.len());
    for &x in signal {
        let y = b[0] * x + state[0];
        for k in 0..order - 1 {
            state[k] = b[k + 1] * x + state[k + 1] - a[k + 1] * y;
        }
        state[order - 1] = b[order] * x - a[order] * y;
        out.push(y);
    }
    out
}

/// Extend a signal at both ends by reflecting it through the endpoint
/// values (point symmetry, so slopes continue across the boundary).
fn reflect_pad(signal: &[f64], pad: usize) -> Vec<f64> {
    let n = signal.len();
    debug_assert!(n > pad, "signal must be longer than the pad");
    let mut padded = Vec::with_capacity(n + 2 * pad);
    let first = signal[0];
    for i in (1..=pad).rev() {
        padded.push(2.0 * first - signal[i]);
    }
    padded.extend_from_slice(signal);
    let last = signal[n - 1];
    for i in 1..=pad {
        padded.push(2.0 * last - signal[n - 1 - i]);
    }
    padded
}

/// Pad length used by both [`forward`] and [`zero_phase`].
pub fn pad_len(order: usize) -> usize {
    3 * (order + 1)
}

/// Single forward pass with edge padding and steady-state initialization.
pub fn forward(coeffs: &IirCoefficients, signal: &[f64]) -> Vec<f64> {
    let pad = pad_len(coeffs.order());
    let padded = reflect_pad(signal, pad);
    let state = steady_state(coeffs, padded[0]);
    let filtered = run_pass(coeffs, &padded, state);
    filtered[pad..pad + signal.len()].to_vec()
}

/// Forward-backward (zero-phase) application. The magnitude response is
/// squared and the phase response cancels, so feature timing is preserved.
pub fn zero_phase(coeffs: &IirCoefficients, signal: &[f64]) -> Vec<f64> {
    let pad = pad_len(coeffs.order());
    let padded = reflect_pad(signal, pad);

    let state = steady_state(coeffs, padded[0]);
    let mut once = run_pass(coeffs, &padded, state);

    once.reverse();
    let state = steady_state(coeffs, once[0]);
    let mut twice = run_pass(coeffs, &once, state);
    twice.reverse();

    twice[pad..pad + signal.len()].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq_hz: f64, rate_hz: f64, duration_s: f64) -> Vec<f64> {
        let n = (duration_s * rate_hz) as usize;
        (0..n)
            .map(|i| (2.0 * PI * freq_hz * i as f64 / rate_hz).sin())
            .collect()
    }

    /// Peak amplitude over the middle half of a signal, away from edges.
    fn mid_amplitude(signal: &[f64]) -> f64 {
        let n = signal.len();
        signal[n / 4..3 * n / 4]
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    #[test]
    fn dc_gain_is_unity() {
        for &(fc, fs) in &[(1.0, 15.5), (1.0, 100.0), (10.0, 31.0), (40.0, 100.0)] {
            let coeffs = design_lowpass(5, fc, fs);
            let x = vec![0.7; 4000];
            for &y in &zero_phase(&coeffs, &x) {
                assert!(
                    (y - 0.7).abs() < 1e-9,
                    "zero-phase DC error {} at fc={fc} fs={fs}",
                    (y - 0.7).abs()
                );
            }
            for &y in &forward(&coeffs, &x) {
                assert!((y - 0.7).abs() < 1e-9, "forward DC error at fc={fc} fs={fs}");
            }
        }
    }

    #[test]
    fn cutoff_tone_halves_in_power_twice() {
        // |H(fc)| = 1/sqrt(2) per pass, so the two-pass amplitude is 0.5.
        let coeffs = design_lowpass(5, 1.0, 20.0);
        let x = sine(1.0, 20.0, 1000.0);
        let amp = mid_amplitude(&zero_phase(&coeffs, &x));
        assert!((amp - 0.5).abs() < 0.02, "cutoff amplitude {amp}");
    }

    #[test]
    fn far_stopband_tone_vanishes() {
        // |H(5 fc)|^2 per pass is ~1e-7; two passes push it below 1e-6
        // ... well below: (1/(1+5^10))^1 per pass in power.
        let coeffs = design_lowpass(5, 1.0, 20.0);
        let x = sine(5.0, 20.0, 1000.0);
        let amp = mid_amplitude(&zero_phase(&coeffs, &x));
        assert!(amp < 1e-6, "stopband amplitude {amp}");
    }

    #[test]
    fn single_pass_cutoff_gain() {
        let coeffs = design_lowpass(5, 1.0, 20.0);
        let x = sine(1.0, 20.0, 1000.0);
        let amp = mid_amplitude(&forward(&coeffs, &x));
        let expected = 1.0 / 2.0f64.sqrt();
        assert!((amp - expected).abs() < 0.02, "single-pass amplitude {amp}");
    }

    #[test]
    fn linearity() {
        let coeffs = design_lowpass(5, 2.0, 31.0);
        let n = 2000;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7919 % 1000) as f64) / 1000.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i * 104729 % 997) as f64) / 997.0).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(&a, &b)| 2.5 * a - 1.25 * b).collect();
        let fx = zero_phase(&coeffs, &x);
        let fy = zero_phase(&coeffs, &y);
        let fc = zero_phase(&coeffs, &combo);
        for i in 0..n {
            let expected = 2.5 * fx[i] - 1.25 * fy[i];
            assert!((fc[i] - expected).abs() < 1e-9, "nonlinear at {i}");
        }
    }

    #[test]
    fn zero_phase_keeps_pulse_peak_position() {
        let rate = 31.0;
        let n = 4000;
        let center = 2000.0;
        let pulse: Vec<f64> = (0..n)
            .map(|i| (-((i as f64 - center) / (rate * 4.0)).powi(2)).exp())
            .collect();
        let peak_before = pulse
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let coeffs = design_lowpass(5, 1.0, rate);
        let filtered = zero_phase(&coeffs, &pulse);
        let peak_after = filtered
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(
            (peak_before as i64 - peak_after as i64).abs() <= 1,
            "peak moved from {peak_before} to {peak_after}"
        );
    }

    #[test]
    fn denominator_is_monic_and_stable() {
        let coeffs = design_lowpass(5, 1.0, 100.0);
        assert_eq!(coeffs.a.len(), 6);
        assert_eq!(coeffs.b.len(), 6);
        assert!((coeffs.a[0] - 1.0).abs() < 1e-12);
        // Impulse response must decay: bounded output over a long run.
        let mut impulse = vec![0.0; 5000];
        impulse[0] = 1.0;
        let state = vec![0.0; coeffs.order()];
        let response = run_pass(&coeffs, &impulse, state);
        let tail = response[4000..].iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(tail < 1e-6, "impulse response does not decay: {tail}");
    }
}

//! Spectral support of the suite functions, estimated with an FFT of a long windowed
//! sample record.

use std::f64::consts::PI;

use regshannon::verify::{builtin_suite, TestFunction};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const SPACING: f64 = 0.25;
const POINTS: usize = 1 << 15;
/// Gaussian window width: its spectrum has standard deviation `1/WIDTH`.
const WIDTH: f64 = 400.0;
/// Spectral margin beyond `B`; the window's own spread at this distance is `exp(-32)` in amplitude.
const MARGIN: f64 = 0.02;

fn energy_outside(tf: &TestFunction, band: f64) -> f64 {
    let half = POINTS as f64 / 2.0;
    let mut buf: Vec<Complex<f64>> = (0..POINTS)
        .map(|i| {
            let t = (i as f64 - half) * SPACING;
            let window = (-(t * t) / (2.0 * WIDTH * WIDTH)).exp();
            Complex::new(tf.eval(t) * window, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(POINTS).process(&mut buf);

    let df = 2.0 * PI / (POINTS as f64 * SPACING);
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let signed = if k <= POINTS / 2 { k as f64 } else { k as f64 - POINTS as f64 };
        let omega = (signed * df).abs();
        if omega > band + MARGIN {
            outside += c.norm_sqr();
        } else {
            inside += c.norm_sqr();
        }
    }
    outside / (inside + outside)
}

#[test]
fn suite_members_are_bandlimited() {
    for tf in builtin_suite() {
        let frac = energy_outside(&tf, tf.band);
        assert!(frac <= 1e-10, "{}: {frac:e}", tf.name);
    }
}

#[test]
fn detector_sees_out_of_band_content() {
    let tf = regshannon::verify::by_name("sinc_b1").unwrap();
    assert!(energy_outside(&tf, 0.5) > 0.4);
}

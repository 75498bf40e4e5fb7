#![allow(dead_code)]

use std::io::Write;

use urnchain::oracle::gauss_legendre;

/// Writes straight to the process stdout so the line survives test capture.
pub fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn gl_on(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(&t, &w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
    rules: &[(Vec<f64>, Vec<f64>); 2],
) -> f64 {
    let coarse = gl_on(f, lo, hi, &rules[0]);
    let fine = gl_on(f, lo, hi, &rules[1]);
    if (coarse - fine).abs() <= tol || depth == 0 {
        return fine;
    }
    let mid = 0.5 * (lo + hi);
    adaptive(f, lo, mid, 0.5 * tol, depth - 1, rules) + adaptive(f, mid, hi, 0.5 * tol, depth - 1, rules)
}

/// Adaptive Gauss-Legendre integral of `f` over (lo, hi), bisecting until a
/// 10-point and a 20-point rule agree within the local tolerance.
pub fn integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let rules = [gauss_legendre(10), gauss_legendre(20)];
    adaptive(f, lo, hi, tol, 40, &rules)
}

/// Integral over (0, c) of a density with power-law end points
/// `x^(a-1)` and `(c-x)^(b-1)`. Each half is mapped through `x = (c/2) u^p`
/// so the transformed integrand is smooth at the end point.
pub fn integrate_endpoint_singular(f: &dyn Fn(f64) -> f64, a: f64, b: f64, c: f64, tol: f64) -> f64 {
    let power = |shape: f64| if shape >= 4.0 { 1.0 } else { (4.0 / shape).ceil() };
    let (p, q) = (power(a), power(b));
    let h = 0.5 * c;
    let left = move |u: f64| f(h * u.powf(p)) * h * p * u.powf(p - 1.0);
    let right = move |u: f64| f(c - h * u.powf(q)) * h * q * u.powf(q - 1.0);
    integrate(&left, 0.0, 1.0, 0.5 * tol) + integrate(&right, 0.0, 1.0, 0.5 * tol)
}

/// Published total default probabilities, rows = groups A, B, C, columns =
/// months 0..=12.
pub const PUBLISHED_S005: [[f64; 13]; 3] = [
    [0.0257, 0.0128, 0.0314, 0.0161, 0.0083, 0.0042, 0.0535, 0.0559, 0.0311, 0.0173, 0.0096, 0.0053, 0.0030],
    [0.0639, 0.0468, 0.0467, 0.0190, 0.0462, 0.0605, 0.1426, 0.1714, 0.1212, 0.1072, 0.0921, 0.0304, 0.0408],
    [0.0915, 0.1688, 0.1641, 0.0911, 0.1466, 0.1460, 0.3225, 0.3321, 0.3083, 0.2763, 0.2824, 0.2764, 0.3101],
];

pub const PUBLISHED_S001: [[f64; 13]; 3] = [
    [0.0257, 0.0214, 0.0262, 0.0220, 0.0185, 0.0155, 0.0298, 0.0341, 0.0294, 0.0253, 0.0218, 0.0188, 0.0162],
    [0.0639, 0.0570, 0.0503, 0.0350, 0.0466, 0.0581, 0.0974, 0.1253, 0.1170, 0.1135, 0.1069, 0.0773, 0.0698],
    [0.0915, 0.1512, 0.1583, 0.1183, 0.1417, 0.1464, 0.2458, 0.2789, 0.2869, 0.2805, 0.2832, 0.2782, 0.2874],
];

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

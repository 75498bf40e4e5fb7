use rand::Rng;

use crate::polya_urn::BetaParams;

/// Box-Muller draw of a standard normal.
pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Logarithm of a Gamma(shape, 1) draw (Marsaglia-Tsang, with the
/// `U^(1/shape)` boost below shape 1). Working in logs keeps tiny shapes
/// from underflowing to zero.
pub fn sample_gamma_ln<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return sample_gamma_ln(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = sample_standard_normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = 1.0 - rng.random::<f64>();
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d.ln() + v.ln();
        }
    }
}

/// Beta draw as X / (X + Y) with independent Gamma variates.
pub fn sample_beta<R: Rng + ?Sized>(prior: &BetaParams, rng: &mut R) -> f64 {
    let lx = sample_gamma_ln(prior.alpha(), rng);
    let ly = sample_gamma_ln(prior.beta(), rng);
    1.0 / (1.0 + (ly - lx).exp())
}

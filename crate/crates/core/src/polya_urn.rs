//! Two-colour Pólya urn with real-valued ball masses.
//!
//! A white extraction stands for one default in the group. Every draw puts
//! the extracted colour back together with `reinforcement` extra mass of the
//! same colour, so the proportion of white mass is a bounded martingale that
//! converges to a Beta(w/s, b/s) random variable.

use rand::Rng;

use crate::error::{Error, Result};
use crate::special::{ln_beta_unchecked, ln_choose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrnState {
    white: f64,
    black: f64,
    reinforcement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    /// A default.
    White,
    Black,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawOutcome {
    pub color: Color,
    pub updated_urn: UrnState,
}

/// Shape pair of a Beta law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Beta shapes must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Shapes of a Beta law with the given mean and total concentration
    /// `alpha + beta`.
    pub fn from_mean(mean: f64, concentration: f64) -> Result<Self> {
        Self::new(mean * concentration, (1.0 - mean) * concentration)
    }
}

impl UrnState {
    pub fn new(white: f64, black: f64, reinforcement: f64) -> Result<Self> {
        if !(white >= 0.0 && black >= 0.0) || !white.is_finite() || !black.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball masses must be nonnegative and finite, got white={white}, black={black}"
            )));
        }
        if white + black <= 0.0 {
            return Err(Error::InvalidParameter("urn has zero total mass".into()));
        }
        if reinforcement <= 0.0 || !reinforcement.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reinforcement must be positive, got {reinforcement}"
            )));
        }
        Ok(Self {
            white,
            black,
            reinforcement,
        })
    }

    pub fn white(&self) -> f64 {
        self.white
    }

    pub fn black(&self) -> f64 {
        self.black
    }

    pub fn reinforcement(&self) -> f64 {
        self.reinforcement
    }

    pub fn proportion_white(&self) -> f64 {
        self.white / (self.white + self.black)
    }

    /// Returns the urn after adding `reinforcement` mass of `color`.
    pub fn reinforce(&self, color: Color) -> Self {
        match color {
            Color::White => Self {
                white: self.white + self.reinforcement,
                ..*self
            },
            Color::Black => Self {
                black: self.black + self.reinforcement,
                ..*self
            },
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DrawOutcome {
        let u: f64 = rng.random();
        let color = if u < self.proportion_white() {
            Color::White
        } else {
            Color::Black
        };
        DrawOutcome {
            color,
            updated_urn: self.reinforce(color),
        }
    }

    /// Runs `draws` successive reinforced draws and returns the final urn.
    pub fn run<R: Rng + ?Sized>(&self, draws: usize, rng: &mut R) -> Self {
        let mut urn = *self;
        for _ in 0..draws {
            urn = urn.draw(rng).updated_urn;
        }
        urn
    }

    /// Probability of observing exactly `colors` as the next draws.
    pub fn sequence_probability(&self, colors: &[Color]) -> f64 {
        let mut urn = *self;
        let mut prob = 1.0;
        for &c in colors {
            let p = urn.proportion_white();
            prob *= match c {
                Color::White => p,
                Color::Black => 1.0 - p,
            };
            urn = urn.reinforce(c);
        }
        prob
    }

    /// Mixing measure of the exchangeable draw sequence: Beta(w/s, b/s).
    pub fn de_finetti_params(&self) -> Result<BetaParams> {
        if self.white == 0.0 || self.black == 0.0 {
            return Err(Error::DegenerateMeasure(format!(
                "urn (white={}, black={}) converges to a point mass",
                self.white, self.black
            )));
        }
        BetaParams::new(self.white / self.reinforcement, self.black / self.reinforcement)
    }
}

fn check_observation(w0: f64, s: f64, defaults: u64, exposed: u64) -> Result<()> {
    if !(w0 > 0.0 && w0 < 1.0) {
        return Err(Error::InvalidParameter(format!("initial white mass must lie in (0,1), got {w0}")));
    }
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("reinforcement must be positive, got {s}")));
    }
    if defaults > exposed {
        return Err(Error::InconsistentObservation(format!(
            "{defaults} defaults observed among {exposed} exposed"
        )));
    }
    Ok(())
}

/// Posterior Beta shapes after observing `defaults` among `exposed` draws
/// from an urn started at (w0, 1 − w0) with reinforcement `s`.
pub fn posterior_params(w0: f64, s: f64, defaults: u64, exposed: u64) -> Result<BetaParams> {
    check_observation(w0, s, defaults, exposed)?;
    BetaParams::new(
        w0 / s + defaults as f64,
        (1.0 - w0) / s + (exposed - defaults) as f64,
    )
}

/// Predictive default probability (w0 + s·defaults) / (1 + s·exposed).
pub fn posterior_mean(w0: f64, s: f64, defaults: u64, exposed: u64) -> Result<f64> {
    check_observation(w0, s, defaults, exposed)?;
    Ok((w0 + s * defaults as f64) / (1.0 + s * exposed as f64))
}

/// P[F = f] for F ~ BetaBinomial(n, alpha, beta). Zero when f > n.
pub fn beta_binomial_pmf(n: u64, f: u64, prior: &BetaParams) -> f64 {
    if f > n {
        return 0.0;
    }
    let (a, b) = (prior.alpha, prior.beta);
    let log_p = ln_choose(n, f) + ln_beta_unchecked(a + f as f64, b + (n - f) as f64)
        - ln_beta_unchecked(a, b);
    log_p.exp()
}

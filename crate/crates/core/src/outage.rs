//! Outage probabilities for MG receivers and CUs.
//!
//! MG receivers form a Poisson hole process: they never lie within the
//! exclusion radius `D` of a CU. For a typical receiver, the CU interferers of
//! its channel are therefore a PPP of intensity `lambda_c` outside a disk of
//! radius `D`. Co-channel MG transmitters form an unrestricted PPP of
//! intensity `lambda_g`. Under Rayleigh fading, the success probability is the
//! product of the Laplace transforms of both interference fields, evaluated at
//! `s = gamma_th * d^alpha / p`.
//!
//! The closed forms are only written for `alpha = 4` (`delta = 1/2`). For other
//! exponents, only the Monte Carlo estimator [`mc_outage`] is available.

use rayon::prelude::*;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::scalar::Scalar;
use crate::seed;
use crate::{Error, Result};

/// Inputs shared by both outage expressions. `link_distance_m` is the
/// transmitter-receiver distance (`d_{g,r}` or `d_{c,b}`) and `sir_threshold`
/// the matching linear threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageInputs<T> {
    pub lambda_c: T,
    pub lambda_g: T,
    pub p_c: T,
    pub p_g: T,
    pub exclusion_radius_m: T,
    pub link_distance_m: T,
    pub sir_threshold: T,
    pub alpha: T,
}

impl<T: Scalar> OutageInputs<T> {
    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_c", self.lambda_c),
            ("lambda_g", self.lambda_g),
            ("p_c", self.p_c),
            ("p_g", self.p_g),
            ("exclusion_radius_m", self.exclusion_radius_m),
            ("link_distance_m", self.link_distance_m),
            ("sir_threshold", self.sir_threshold),
        ] {
            if !(v >= T::zero()) {
                return Err(Error::param(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    fn check_closed_form(&self) -> Result<()> {
        self.check()?;
        if (self.alpha - T::lit(4.0)).abs() > T::lit(1e-12) {
            return Err(Error::UnsupportedExponent(self.alpha.as_f64()));
        }
        Ok(())
    }
}

/// Which arctangent term to use in the CU-interference factor.
///
/// `Statement` uses `atan(sqrt(Y1))`. `Appendix` uses `pi/2 - atan(1/Y1)`,
/// which is a different function (the identity with the statement form needs
/// `atan(1/sqrt(Y1))`). Both are kept so the two can be compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArctanForm {
    #[default]
    Statement,
    Appendix,
}

/// Laplace transform of the interference from an unrestricted PPP of
/// intensity `lambda` and power `p`, at `s`, for `alpha = 4`:
/// `exp(-lambda * pi^2/2 * sqrt(p) * sqrt(s))`.
pub fn laplace_l0<T: Scalar>(lambda: T, p: T, s: T) -> Result<T> {
    for (name, v) in [("lambda", lambda), ("p", p), ("s", s)] {
        if !(v >= T::zero()) {
            return Err(Error::param(name, format!("must be >= 0, got {v}")));
        }
    }
    let half_pi_sq = T::PI() * T::PI() / T::lit(2.0);
    Ok((-lambda * half_pi_sq * p.sqrt() * s.sqrt()).exp())
}

/// `Y1 = s * p_c * D^-4`.
pub fn y1<T: Scalar>(p_c: T, exclusion_radius: T, s: T) -> T {
    s * p_c / exclusion_radius.powi(4)
}

/// Laplace transform of the interference from CUs (intensity `lambda_c`,
/// power `p_c`) that are all at least `D` away, at `s`, for `alpha = 4`:
///
/// `exp(-lambda_c * pi * { sqrt(p_c s) * (atan_term + sqrt(Y1)/(1+Y1)) - Y1 D^2/(1+Y1) })`
///
/// With [`ArctanForm::Statement`] the two rational terms cancel and the
/// exponent is `-lambda_c * pi * sqrt(p_c s) * atan(sqrt(Y1))`.
pub fn laplace_l1<T: Scalar>(lambda_c: T, p_c: T, exclusion_radius: T, s: T, form: ArctanForm) -> Result<T> {
    if !(exclusion_radius > T::zero()) {
        return Err(Error::param(
            "exclusion_radius",
            format!("must be > 0, got {exclusion_radius}"),
        ));
    }
    for (name, v) in [("lambda_c", lambda_c), ("p_c", p_c), ("s", s)] {
        if !(v >= T::zero()) {
            return Err(Error::param(name, format!("must be >= 0, got {v}")));
        }
    }
    if lambda_c == T::zero() {
        return Ok(T::one());
    }
    let y = y1(p_c, exclusion_radius, s);
    let sqrt_y = y.sqrt();
    let atan_term = match form {
        ArctanForm::Statement => sqrt_y.atan(),
        ArctanForm::Appendix => {
            if y == T::zero() {
                T::zero()
            } else {
                T::FRAC_PI_2() - y.recip().atan()
            }
        }
    };
    let one_plus = T::one() + y;
    let bracket =
        (p_c * s).sqrt() * (atan_term + sqrt_y / one_plus) - y * exclusion_radius * exclusion_radius / one_plus;
    Ok((-lambda_c * T::PI() * bracket).exp())
}

/// Outage probability of an MG receiver at distance `link_distance_m` from its
/// transmitter: `1 - L1 * L0` with `s = gamma_g^th * d^4 / p_g`.
pub fn outage_mg<T: Scalar>(inputs: &OutageInputs<T>, form: ArctanForm) -> Result<T> {
    inputs.check_closed_form()?;
    if inputs.p_g == T::zero() {
        return Ok(T::one());
    }
    let s = inputs.sir_threshold * inputs.link_distance_m.powi(4) / inputs.p_g;
    let l1 = laplace_l1(inputs.lambda_c, inputs.p_c, inputs.exclusion_radius_m, s, form)?;
    let l0 = laplace_l0(inputs.lambda_g, inputs.p_g, s)?;
    Ok((T::one() - l1 * l0).max(T::zero()).min(T::one()))
}

/// Outage probability of a CU at distance `link_distance_m` from the BS, with
/// co-channel MG transmitters of intensity `lambda_g` and power `p_g`.
pub fn outage_cu<T: Scalar>(inputs: &OutageInputs<T>) -> Result<T> {
    inputs.check_closed_form()?;
    if inputs.p_c == T::zero() {
        return Ok(T::one());
    }
    let s = inputs.sir_threshold * inputs.link_distance_m.powi(4) / inputs.p_c;
    let l0 = laplace_l0(inputs.lambda_g, inputs.p_g, s)?;
    Ok((T::one() - l0).max(T::zero()).min(T::one()))
}

/// Link geometry simulated by [`mc_outage`]. Interferers are drawn inside a
/// disk of radius `field_radius_m` around the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageGeometry<T> {
    /// Typical MG receiver: CU interferers outside the exclusion disk, MG
    /// interferers everywhere.
    MgReceiver { inputs: OutageInputs<T>, field_radius_m: T },
    /// CU received at the BS with co-channel MG interferers everywhere.
    CuAtBs { inputs: OutageInputs<T>, field_radius_m: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub probability: f64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub ci_halfwidth: f64,
    pub trials: usize,
}

impl McEstimate {
    pub fn contains(&self, p: f64) -> bool {
        (p - self.probability).abs() <= self.ci_halfwidth
    }
}

fn ppp_interference<R: Rng>(rng: &mut R, lambda: f64, power: f64, inner: f64, outer: f64, alpha: f64) -> f64 {
    let area = std::f64::consts::PI * (outer * outer - inner * inner);
    let mean = lambda * area;
    if mean <= 0.0 || power == 0.0 {
        return 0.0;
    }
    let n = Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0);
    let mut total = 0.0;
    for _ in 0..n {
        let r = (inner * inner + rng.random::<f64>() * (outer * outer - inner * inner)).sqrt();
        let h: f64 = Exp1.sample(rng);
        total += power * h * r.max(crate::geometry::MIN_DISTANCE_M).powf(-alpha);
    }
    total
}

/// Fraction of `n_trials` independent realisations (PPP interferers plus
/// Rayleigh fading) in which the link SIR falls below its threshold.
///
/// Trial `i` draws from its own stream seeded by `mix(seed, [i])`, so the
/// estimate does not depend on how trials are scheduled across threads.
pub fn mc_outage<T: Scalar>(geometry: &OutageGeometry<T>, n_trials: usize, seed: u64) -> Result<McEstimate> {
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be >= 1"));
    }
    let (inputs, field) = match geometry {
        OutageGeometry::MgReceiver { inputs, field_radius_m } | OutageGeometry::CuAtBs { inputs, field_radius_m } => {
            (inputs, field_radius_m.as_f64())
        }
    };
    inputs.check()?;
    let is_mg = matches!(geometry, OutageGeometry::MgReceiver { .. });
    let lambda_c = inputs.lambda_c.as_f64();
    let lambda_g = inputs.lambda_g.as_f64();
    let p_c = inputs.p_c.as_f64();
    let p_g = inputs.p_g.as_f64();
    let d_excl = inputs.exclusion_radius_m.as_f64();
    let d = inputs.link_distance_m.as_f64();
    let th = inputs.sir_threshold.as_f64();
    let alpha = inputs.alpha.as_f64();
    if !(field > d_excl) {
        return Err(Error::param("field_radius_m", "must exceed the exclusion radius"));
    }

    let outages: usize = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::mix(seed, &[i as u64]));
            let h: f64 = Exp1.sample(&mut rng);
            let (signal, interference) = if is_mg {
                let signal = p_g * h * d.max(crate::geometry::MIN_DISTANCE_M).powf(-alpha);
                let from_cus = ppp_interference(&mut rng, lambda_c, p_c, d_excl, field, alpha);
                let from_mgs = ppp_interference(&mut rng, lambda_g, p_g, 0.0, field, alpha);
                (signal, from_cus + from_mgs)
            } else {
                let signal = p_c * h * d.max(crate::geometry::MIN_DISTANCE_M).powf(-alpha);
                (signal, ppp_interference(&mut rng, lambda_g, p_g, 0.0, field, alpha))
            };
            usize::from(signal < th * interference)
        })
        .sum();

    let p = outages as f64 / n_trials as f64;
    Ok(McEstimate {
        probability: p,
        ci_halfwidth: 1.96 * (p * (1.0 - p) / n_trials as f64).sqrt(),
        trials: n_trials,
    })
}

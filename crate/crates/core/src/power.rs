//! Feasible MG transmit-power intervals and power policies.
//!
//! A group's power on a channel is bounded below by its own outage target and
//! above by the outage target of the channel's CU. The upper bound inverts the
//! CU outage expression exactly. The lower bound comes from small-argument
//! approximations of the MG outage expression and is only approximate. Two
//! variants of it are kept, selected by [`PLowForm`].

use crate::allocation::Assignment;
use crate::geometry::NetworkScenario;
use crate::outage::{outage_cu, outage_mg, ArctanForm, OutageInputs};
use crate::radio::{channel_throughput, FadingRealization, PowerVector, ThroughputMode};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Variant of the lower-bound expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PLowForm {
    /// Numerator `lambda_c pi sqrt(p_c) sqrt(4 gamma d^alpha p_c D^-alpha)`.
    #[default]
    Appendix,
    /// Numerator `2 lambda_c pi p_c gamma d^alpha`.
    Lemma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBounds<T> {
    /// `+inf` when the MG outage target is unreachable at any power.
    pub p_low_w: T,
    pub p_high_w: T,
    /// `max(0, p_low)`.
    pub p_inf_w: T,
    /// `min(P_G, p_high)`.
    pub p_sup_w: T,
    pub feasible: bool,
}

fn check_nonneg<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be >= 0, got {v}")))
    }
}

fn check_probability<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {v}")))
    }
}

/// Smallest MG power meeting the MG outage target `mg_outage`.
///
/// Returns `None` when the denominator
/// `-ln(1 - Theta_g) - lambda_g pi^2/2 sqrt(gamma d^alpha) + gamma d^alpha D^(2-alpha) lambda_c pi`
/// is not positive, i.e. the target cannot be met at any power.
#[allow(clippy::too_many_arguments)]
pub fn compute_p_low<T: Scalar>(
    lambda_c: T,
    lambda_g: T,
    p_c: T,
    exclusion_radius: T,
    d_g: T,
    mg_threshold: T,
    mg_outage: T,
    alpha: T,
    form: PLowForm,
) -> Result<Option<T>> {
    check_nonneg("lambda_c", lambda_c)?;
    check_nonneg("lambda_g", lambda_g)?;
    check_nonneg("p_c", p_c)?;
    check_nonneg("d_g", d_g)?;
    check_nonneg("mg_threshold", mg_threshold)?;
    check_probability("mg_outage", mg_outage)?;
    if !(exclusion_radius > T::zero()) {
        return Err(Error::param("exclusion_radius", "must be > 0"));
    }
    let pi = T::PI();
    let g_d_alpha = mg_threshold * d_g.powf(alpha);
    let denominator = -(-mg_outage).ln_1p() - lambda_g * pi * pi / T::lit(2.0) * g_d_alpha.sqrt()
        + g_d_alpha * exclusion_radius.powf(T::lit(2.0) - alpha) * lambda_c * pi;
    if !(denominator > T::zero()) {
        return Ok(None);
    }
    let numerator = match form {
        PLowForm::Appendix => {
            lambda_c * pi * p_c.sqrt() * (T::lit(4.0) * g_d_alpha * p_c * exclusion_radius.powf(-alpha)).sqrt()
        }
        PLowForm::Lemma => T::lit(2.0) * lambda_c * pi * p_c * g_d_alpha,
    };
    Ok(Some(numerator / denominator))
}

/// Largest MG power keeping the CU outage at most `cu_outage`:
/// `p_c (-2 ln(1 - Theta_c) / (lambda_g pi^2 sqrt(gamma_c) d_cb^(alpha/2)))^2`.
/// Unbounded (`+inf`) when `lambda_g = 0`.
pub fn compute_p_high<T: Scalar>(lambda_g: T, p_c: T, d_cb: T, cu_threshold: T, cu_outage: T, alpha: T) -> Result<T> {
    check_nonneg("lambda_g", lambda_g)?;
    check_nonneg("p_c", p_c)?;
    check_nonneg("d_cb", d_cb)?;
    check_nonneg("cu_threshold", cu_threshold)?;
    check_probability("cu_outage", cu_outage)?;
    let pi = T::PI();
    let denom = lambda_g * pi * pi * cu_threshold.sqrt() * d_cb.powf(alpha / T::lit(2.0));
    if denom == T::zero() {
        return Ok(T::infinity());
    }
    let ratio = T::lit(-2.0) * (-cu_outage).ln_1p() / denom;
    Ok(p_c * ratio * ratio)
}

/// Bisection in `ln p` for the power where `outage(p)` crosses `target`,
/// searching `[1e-15, 1e15]` W. `outage` must be monotone in `p`. Returns
/// `None` when the target lies outside the range swept by the endpoints.
pub fn bisect_power<T: Scalar>(outage: impl Fn(T) -> Result<T>, target: T) -> Result<Option<T>> {
    let (mut lo, mut hi) = (T::lit(1e-15).ln(), T::lit(1e15).ln());
    let (f_lo, f_hi) = (outage(lo.exp())? - target, outage(hi.exp())? - target);
    if f_lo == T::zero() {
        return Ok(Some(lo.exp()));
    }
    if f_lo * f_hi > T::zero() {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        let f_mid = outage(mid.exp())? - target;
        if f_mid == T::zero() {
            return Ok(Some(mid.exp()));
        }
        if (f_mid > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(((lo + hi) / T::lit(2.0)).exp()))
}

/// MG power at which the exact MG outage expression equals `mg_outage`, found
/// by bisection. `None` when no power reaches it, which happens whenever the
/// MG-interference factor alone already exceeds the target.
pub fn p_low_by_bisection<T: Scalar>(inputs: &OutageInputs<T>, mg_outage: T, form: ArctanForm) -> Result<Option<T>> {
    bisect_power(|p_g| outage_mg(&OutageInputs { p_g, ..*inputs }, form), mg_outage)
}

/// MG power at which the CU outage equals `cu_outage`, found by bisection.
pub fn p_high_by_bisection<T: Scalar>(inputs: &OutageInputs<T>, cu_outage: T) -> Result<Option<T>> {
    bisect_power(|p_g| outage_cu(&OutageInputs { p_g, ..*inputs }), cu_outage)
}

/// Clamps `[p_low, p_high]` to `[0, P_G]`.
pub fn feasible_interval<T: Scalar>(p_low: Option<T>, p_high: T, max_mg_power: T) -> PowerBounds<T> {
    let p_low_w = p_low.unwrap_or(T::infinity());
    let p_inf_w = p_low_w.max(T::zero());
    let p_sup_w = p_high.min(max_mg_power);
    PowerBounds {
        p_low_w,
        p_high_w: p_high,
        p_inf_w,
        p_sup_w,
        feasible: p_inf_w <= p_sup_w,
    }
}

/// Power bounds of every (group, channel) pair of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable<T> {
    /// `bounds[g][k]`.
    pub bounds: Vec<Vec<PowerBounds<T>>>,
}

impl<T: Scalar> BoundsTable<T> {
    /// Uses the worst (farthest) receiver distance of each group for the lower
    /// bound and the CU-BS distance of each channel for the upper bound.
    pub fn compute(scenario: &NetworkScenario<T>, form: PLowForm) -> Result<Self> {
        let p = &scenario.params;
        let p_c = p.max_cu_power_w();
        let d_excl = p.exclusion_radius_m.max(T::lit(crate::geometry::MIN_DISTANCE_M));
        let p_high: Vec<T> = scenario
            .cus
            .iter()
            .map(|cu| {
                compute_p_high(
                    p.group_density_per_channel,
                    p_c,
                    cu.dist_to_bs_m,
                    p.cu_sir_threshold(),
                    p.cu_outage_threshold,
                    p.path_loss_exponent,
                )
            })
            .collect::<Result<_>>()?;
        let bounds = scenario
            .groups
            .iter()
            .map(|g| {
                let p_low = compute_p_low(
                    p.cu_density_per_channel,
                    p.group_density_per_channel,
                    p_c,
                    d_excl,
                    g.worst_receiver_dist(),
                    p.mg_sir_threshold(),
                    p.mg_outage_threshold,
                    p.path_loss_exponent,
                    form,
                )?;
                Ok(p_high
                    .iter()
                    .map(|&hi| feasible_interval(p_low, hi, p.max_mg_power_w()))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(BoundsTable { bounds })
    }

    pub fn get(&self, group: usize, channel: usize) -> &PowerBounds<T> {
        &self.bounds[group][channel]
    }
}

/// How transmit powers are chosen once an assignment is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerPolicy {
    /// Each group at `p_sup`, each CU at `P_c`.
    #[default]
    MaxFeasible,
    /// Per-channel coordinate ascent over `n` log-spaced points of each
    /// group's interval, starting from `MaxFeasible`, three sweeps.
    Grid(usize),
}

const GRID_SWEEPS: usize = 3;
/// Lowest grid point relative to `p_sup` when `p_inf` is zero.
const GRID_FLOOR_RATIO: f64 = 1e-3;

/// Candidate powers of a group under `Grid(n)`: `n` log-spaced points from
/// `max(p_inf, p_sup * 1e-3)` to `p_sup`, or their geometric midpoint when
/// `n == 1`.
pub fn grid_points<T: Scalar>(bounds: &PowerBounds<T>, n: usize) -> Vec<T> {
    let hi = bounds.p_sup_w;
    let lo = bounds.p_inf_w.max(hi * T::lit(GRID_FLOOR_RATIO)).min(hi);
    match n {
        0 => Vec::new(),
        1 => vec![(lo * hi).sqrt()],
        _ => {
            let (llo, lhi) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        hi
                    } else {
                        (llo + (lhi - llo) * T::lit(i as f64) / T::lit((n - 1) as f64)).exp()
                    }
                })
                .collect()
        }
    }
}

/// Writes the powers of `members` on channel `k` into `powers` according to
/// `policy`. Infeasible members are muted.
pub fn assign_channel_powers<T: Scalar>(
    scenario: &NetworkScenario<T>,
    bounds: &BoundsTable<T>,
    fading: &FadingRealization<T>,
    members: &[usize],
    k: usize,
    policy: PowerPolicy,
    powers: &mut PowerVector<T>,
) -> Result<()> {
    powers.cu_w[k] = scenario.params.max_cu_power_w();
    for &g in members {
        let b = bounds.get(g, k);
        if b.feasible {
            powers.mg_w[g] = b.p_sup_w;
            powers.muted[g] = false;
        } else {
            powers.mg_w[g] = T::zero();
            powers.muted[g] = true;
        }
    }
    let n = match policy {
        PowerPolicy::MaxFeasible => return Ok(()),
        PowerPolicy::Grid(n) => n,
    };
    let tunable: Vec<usize> = members.iter().copied().filter(|&g| !powers.muted[g]).collect();
    if n == 0 || tunable.is_empty() {
        return Ok(());
    }
    let mode = ThroughputMode::Instantaneous;
    for _ in 0..GRID_SWEEPS {
        for &g in &tunable {
            let current = powers.mg_w[g];
            let mut best_value = T::neg_infinity();
            let mut best_power = current;
            let mut current_is_best = false;
            for cand in grid_points(bounds.get(g, k), n) {
                powers.mg_w[g] = cand;
                let v = channel_throughput(scenario, fading, powers, members, k, mode)?;
                if v > best_value {
                    best_value = v;
                    best_power = cand;
                    current_is_best = cand == current;
                } else if v == best_value && cand == current {
                    current_is_best = true;
                }
            }
            powers.mg_w[g] = if current_is_best { current } else { best_power };
        }
    }
    Ok(())
}

/// Powers for a whole assignment. Groups not on any channel get zero power.
pub fn assign_powers<T: Scalar>(
    scenario: &NetworkScenario<T>,
    assignment: &Assignment,
    bounds: &BoundsTable<T>,
    fading: &FadingRealization<T>,
    policy: PowerPolicy,
) -> Result<PowerVector<T>> {
    let c = scenario.num_channels();
    let mut powers = PowerVector {
        cu_w: vec![scenario.params.max_cu_power_w(); c],
        mg_w: vec![T::zero(); scenario.num_groups()],
        muted: vec![false; scenario.num_groups()],
    };
    for (k, members) in assignment.channel_to_groups.iter().enumerate().take(c) {
        assign_channel_powers(scenario, bounds, fading, members, k, policy, &mut powers)?;
    }
    Ok(powers)
}

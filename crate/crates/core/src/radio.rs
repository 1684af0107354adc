//! Link-level physics: power-law path loss, Rayleigh power gains, SIR at MG
//! receivers and at the BS, link rates and per-scenario sum throughput.
//!
//! The model is interference limited: noise is ignored. When a link sees no
//! interference at all its SIR is reported as [`sir_cap`] (60 dB) instead of
//! infinity.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::allocation::Assignment;
use crate::geometry::{NetworkScenario, Point, MIN_DISTANCE_M};
use crate::outage::{self, OutageInputs};
use crate::scalar::{db_to_linear, Scalar};
use crate::{Error, Result};

/// SIR reported for links whose interference sum is zero.
pub const SIR_CAP_DB: f64 = 60.0;

static CLAMPED_DISTANCES: AtomicU64 = AtomicU64::new(0);

pub fn sir_cap<T: Scalar>() -> T {
    db_to_linear(T::lit(SIR_CAP_DB))
}

/// True if `sir` is the value substituted for an interference-free link.
pub fn is_capped<T: Scalar>(sir: T) -> bool {
    sir == sir_cap::<T>()
}

/// How many distances below [`MIN_DISTANCE_M`] [`path_gain`] has clamped so far
/// (process-wide).
pub fn clamped_distance_count() -> u64 {
    CLAMPED_DISTANCES.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel<T> {
    pub alpha: T,
    /// `2 / alpha`.
    pub delta: T,
    pub bandwidth_hz: T,
}

impl<T: Scalar> ChannelModel<T> {
    pub fn new(alpha: T, bandwidth_hz: T) -> Result<Self> {
        if !(alpha > T::lit(2.0)) {
            return Err(Error::param("alpha", format!("must be > 2, got {alpha}")));
        }
        if !(bandwidth_hz > T::zero()) {
            return Err(Error::param("bandwidth_hz", "must be > 0"));
        }
        Ok(ChannelModel {
            alpha,
            delta: T::lit(2.0) / alpha,
            bandwidth_hz,
        })
    }
}

/// `d^-alpha`, with `d` clamped to [`MIN_DISTANCE_M`].
#[inline]
pub fn path_gain<T: Scalar>(d: T, alpha: T) -> T {
    let d_min = T::lit(MIN_DISTANCE_M);
    let d = if d < d_min {
        CLAMPED_DISTANCES.fetch_add(1, Ordering::Relaxed);
        d_min
    } else {
        d
    };
    d.powf(-alpha)
}

/// Transmitter index into a [`FadingRealization`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tx {
    Cu(usize),
    Mg(usize),
}

/// Receiver index into a [`FadingRealization`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rx {
    Member { group: usize, index: usize },
    Bs,
}

/// Rayleigh power gains `h` for every (transmitter, receiver, channel) triple
/// of a scenario, i.i.d. exponential with unit mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingRealization<T> {
    channels: usize,
    n_cu: usize,
    n_tx: usize,
    n_rx: usize,
    rx_offsets: Vec<usize>,
    gains: Vec<T>,
}

impl<T: Scalar> FadingRealization<T> {
    fn layout(scenario: &NetworkScenario<T>) -> (usize, usize, usize, usize, Vec<usize>) {
        let channels = scenario.num_channels();
        let n_cu = scenario.cus.len();
        let n_tx = n_cu + scenario.groups.len();
        let mut rx_offsets = Vec::with_capacity(scenario.groups.len());
        let mut acc = 0;
        for g in &scenario.groups {
            rx_offsets.push(acc);
            acc += g.receivers.len();
        }
        (channels, n_cu, n_tx, acc + 1, rx_offsets)
    }

    /// Draws a fresh realisation. Gains are generated channel-major, then by
    /// transmitter (CUs first), then by receiver (BS last).
    pub fn draw<R: Rng + ?Sized>(scenario: &NetworkScenario<T>, rng: &mut R) -> Self {
        let (channels, n_cu, n_tx, n_rx, rx_offsets) = Self::layout(scenario);
        let gains = (0..channels * n_tx * n_rx)
            .map(|_| {
                let h: f64 = Exp1.sample(rng);
                T::lit(h.max(f64::MIN_POSITIVE))
            })
            .collect();
        FadingRealization {
            channels,
            n_cu,
            n_tx,
            n_rx,
            rx_offsets,
            gains,
        }
    }

    /// Every gain equal to one: the fading-averaged channel.
    pub fn unit(scenario: &NetworkScenario<T>) -> Self {
        let (channels, n_cu, n_tx, n_rx, rx_offsets) = Self::layout(scenario);
        FadingRealization {
            channels,
            n_cu,
            n_tx,
            n_rx,
            rx_offsets,
            gains: vec![T::one(); channels * n_tx * n_rx],
        }
    }

    fn index(&self, channel: usize, tx: Tx, rx: Rx) -> usize {
        let t = match tx {
            Tx::Cu(c) => c,
            Tx::Mg(g) => self.n_cu + g,
        };
        let r = match rx {
            Rx::Member { group, index } => self.rx_offsets[group] + index,
            Rx::Bs => self.n_rx - 1,
        };
        debug_assert!(channel < self.channels && t < self.n_tx && r < self.n_rx);
        (channel * self.n_tx + t) * self.n_rx + r
    }

    #[inline]
    pub fn gain(&self, channel: usize, tx: Tx, rx: Rx) -> T {
        self.gains[self.index(channel, tx, rx)]
    }

    pub fn set_gain(&mut self, channel: usize, tx: Tx, rx: Rx, h: T) {
        let i = self.index(channel, tx, rx);
        self.gains[i] = h;
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }
}

/// Transmit powers for one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector<T> {
    /// CU power per channel (W).
    pub cu_w: Vec<T>,
    /// Power of each group on the channel it is assigned to (W); zero when the
    /// group is unassigned or muted.
    pub mg_w: Vec<T>,
    /// Groups whose feasible power interval is empty. They transmit nothing and
    /// earn no rate.
    pub muted: Vec<bool>,
}

impl<T: Scalar> PowerVector<T> {
    /// Every CU at `p_c`, every group at `p_g`, nobody muted.
    pub fn uniform(channels: usize, groups: usize, p_c: T, p_g: T) -> Self {
        PowerVector {
            cu_w: vec![p_c; channels],
            mg_w: vec![p_g; groups],
            muted: vec![false; groups],
        }
    }
}

/// Rate semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMode<T> {
    /// `B log2(1 + sir)` if the SIR clears the threshold, else 0.
    Instantaneous,
    /// `density * B log2(1 + sir) * success_probability`, the per-unit-area
    /// form with a closed-form coverage probability.
    Analytic { density: T, success_probability: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThroughputMode {
    #[default]
    Instantaneous,
    Analytic,
}

fn link_rate<T: Scalar>(sir: T, threshold: T, bandwidth_hz: T, mode: RateMode<T>) -> T {
    let shannon = bandwidth_hz * (T::one() + sir.max(T::zero())).log2();
    match mode {
        RateMode::Instantaneous => {
            if sir >= threshold {
                shannon
            } else {
                T::zero()
            }
        }
        RateMode::Analytic {
            density,
            success_probability,
        } => density * shannon * success_probability,
    }
}

/// Rate of a multicast group given its worst-receiver SIR.
pub fn rate_mg<T: Scalar>(sir: T, threshold: T, bandwidth_hz: T, mode: RateMode<T>) -> T {
    link_rate(sir, threshold, bandwidth_hz, mode)
}

/// Rate of a CU given its SIR at the BS.
pub fn rate_cu<T: Scalar>(sir: T, threshold: T, bandwidth_hz: T, mode: RateMode<T>) -> T {
    link_rate(sir, threshold, bandwidth_hz, mode)
}

fn receiver_position<T: Scalar>(scenario: &NetworkScenario<T>, g: usize, r: usize) -> Result<Point<T>> {
    let group = scenario.groups.get(g).ok_or(Error::InactiveGroup(g))?;
    group
        .receivers
        .get(r)
        .copied()
        .ok_or_else(|| Error::param("receiver", format!("group {g} has no receiver {r}")))
}

/// SIR at receiver `r` of group `g` on channel `k`, with the members of
/// `on_channel` (which must contain `g`) as co-channel MG interferers.
fn receiver_sir<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    on_channel: &[usize],
    g: usize,
    r: usize,
    k: usize,
) -> T {
    let alpha = scenario.params.path_loss_exponent;
    let group = &scenario.groups[g];
    let rx_pos = group.receivers[r];
    let rx = Rx::Member { group: g, index: r };
    let signal = powers.mg_w[g] * fading.gain(k, Tx::Mg(g), rx) * path_gain(group.tx_rx_dists_m[r], alpha);

    let cu = &scenario.cus[k];
    let mut interference =
        powers.cu_w[k] * fading.gain(k, Tx::Cu(k), rx) * path_gain(cu.position.distance(&rx_pos), alpha);
    for &other in on_channel {
        if other == g {
            continue;
        }
        let tx = scenario.groups[other].tx_position;
        interference = interference
            + powers.mg_w[other] * fading.gain(k, Tx::Mg(other), rx) * path_gain(tx.distance(&rx_pos), alpha);
    }
    if interference > T::zero() {
        signal / interference
    } else {
        sir_cap()
    }
}

fn group_sir<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    on_channel: &[usize],
    g: usize,
    k: usize,
) -> T {
    (0..scenario.groups[g].receivers.len())
        .map(|r| receiver_sir(scenario, fading, powers, on_channel, g, r, k))
        .fold(T::infinity(), T::min)
}

fn cu_sir<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    on_channel: &[usize],
    k: usize,
) -> T {
    let alpha = scenario.params.path_loss_exponent;
    let cu = &scenario.cus[k];
    let signal = powers.cu_w[k] * fading.gain(k, Tx::Cu(k), Rx::Bs) * path_gain(cu.dist_to_bs_m, alpha);
    let interference: T = on_channel
        .iter()
        .map(|&g| {
            let d = scenario.groups[g].tx_position.norm();
            powers.mg_w[g] * fading.gain(k, Tx::Mg(g), Rx::Bs) * path_gain(d, alpha)
        })
        .sum();
    if interference > T::zero() {
        signal / interference
    } else {
        sir_cap()
    }
}

fn members_of(assignment: &Assignment, k: usize) -> Result<&[usize]> {
    assignment
        .channel_to_groups
        .get(k)
        .map(Vec::as_slice)
        .ok_or_else(|| Error::param("channel", format!("no channel {k} in assignment")))
}

/// SIR at receiver `r` of group `g` on channel `k`.
pub fn sir_mg_receiver<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    assignment: &Assignment,
    g: usize,
    r: usize,
    k: usize,
) -> Result<T> {
    let members = members_of(assignment, k)?;
    if !members.contains(&g) {
        return Err(Error::NotOnChannel { group: g, channel: k });
    }
    receiver_position(scenario, g, r)?;
    Ok(receiver_sir(scenario, fading, powers, members, g, r, k))
}

/// Worst-receiver SIR of group `g` on channel `k`.
pub fn sir_group<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    assignment: &Assignment,
    g: usize,
    k: usize,
) -> Result<T> {
    let members = members_of(assignment, k)?;
    if !members.contains(&g) {
        return Err(Error::NotOnChannel { group: g, channel: k });
    }
    if scenario.groups.get(g).is_none_or(|grp| grp.receivers.is_empty()) {
        return Err(Error::InactiveGroup(g));
    }
    Ok(group_sir(scenario, fading, powers, members, g, k))
}

/// SIR of channel `k`'s CU at the BS.
pub fn sir_cu<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    assignment: &Assignment,
    k: usize,
) -> Result<T> {
    let members = members_of(assignment, k)?;
    if k >= scenario.cus.len() {
        return Err(Error::param("channel", format!("no CU on channel {k}")));
    }
    Ok(cu_sir(scenario, fading, powers, members, k))
}

/// Closed-form success probabilities for one channel, used by analytic mode.
struct AnalyticWeights<T> {
    cu_success: T,
    mg_success: Vec<T>,
}

fn analytic_weights<T: Scalar>(
    scenario: &NetworkScenario<T>,
    powers: &PowerVector<T>,
    members: &[usize],
    k: usize,
) -> Result<AnalyticWeights<T>> {
    let p = &scenario.params;
    let active: Vec<usize> = members.iter().copied().filter(|&g| !powers.muted[g]).collect();
    let p_c = powers.cu_w[k];
    let d_excl = p.exclusion_radius_m.max(T::lit(MIN_DISTANCE_M));
    let cu_success = if active.is_empty() {
        T::one()
    } else {
        let mean_pg = active.iter().map(|&g| powers.mg_w[g]).sum::<T>() / T::lit(active.len() as f64);
        let inputs = OutageInputs {
            lambda_c: p.cu_density_per_channel,
            lambda_g: p.group_density_per_channel,
            p_c,
            p_g: mean_pg,
            exclusion_radius_m: d_excl,
            link_distance_m: scenario.cus[k].dist_to_bs_m.max(T::lit(MIN_DISTANCE_M)),
            sir_threshold: p.cu_sir_threshold(),
            alpha: p.path_loss_exponent,
        };
        T::one() - outage::outage_cu(&inputs)?
    };
    let mg_success = members
        .iter()
        .map(|&g| {
            if powers.muted[g] {
                return Ok(T::zero());
            }
            let inputs = OutageInputs {
                lambda_c: p.cu_density_per_channel,
                lambda_g: p.group_density_per_channel,
                p_c,
                p_g: powers.mg_w[g],
                exclusion_radius_m: d_excl,
                link_distance_m: scenario.groups[g].worst_receiver_dist(),
                sir_threshold: p.mg_sir_threshold(),
                alpha: p.path_loss_exponent,
            };
            Ok(T::one() - outage::outage_mg(&inputs, outage::ArctanForm::Statement)?)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(AnalyticWeights { cu_success, mg_success })
}

/// CU rate plus member-group rates on channel `k`, with `members` (sorted
/// group indices) sharing it. Muted members contribute no rate.
pub fn channel_throughput<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    members: &[usize],
    k: usize,
    mode: ThroughputMode,
) -> Result<T> {
    let p = &scenario.params;
    let bw = p.bandwidth_hz;
    let cu_th = p.cu_sir_threshold();
    let mg_th = p.mg_sir_threshold();
    let weights = match mode {
        ThroughputMode::Instantaneous => None,
        ThroughputMode::Analytic => Some(analytic_weights(scenario, powers, members, k)?),
    };
    let cu_mode = match &weights {
        None => RateMode::Instantaneous,
        Some(w) => RateMode::Analytic {
            density: p.cu_density_per_channel,
            success_probability: w.cu_success,
        },
    };
    let mut total = rate_cu(cu_sir(scenario, fading, powers, members, k), cu_th, bw, cu_mode);
    for (i, &g) in members.iter().enumerate() {
        if powers.muted[g] {
            continue;
        }
        let mode = match &weights {
            None => RateMode::Instantaneous,
            Some(w) => RateMode::Analytic {
                density: p.group_density_per_channel,
                success_probability: w.mg_success[i],
            },
        };
        total = total + rate_mg(group_sir(scenario, fading, powers, members, g, k), mg_th, bw, mode);
    }
    Ok(total)
}

/// `sum_k (R_c^k + sum_{g on k} R_g^k)`, accumulated channel by channel in
/// index order.
pub fn sum_throughput<T: Scalar>(
    scenario: &NetworkScenario<T>,
    fading: &FadingRealization<T>,
    powers: &PowerVector<T>,
    assignment: &Assignment,
    mode: ThroughputMode,
) -> Result<T> {
    let mut total = T::zero();
    for k in 0..scenario.num_channels() {
        let members = members_of(assignment, k)?;
        total = total + channel_throughput(scenario, fading, powers, members, k, mode)?;
    }
    Ok(total)
}

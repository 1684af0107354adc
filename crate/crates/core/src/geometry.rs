//! Random network scenarios.
//!
//! A scenario is one realisation of the cell: the BS at the origin, one CU per
//! channel, `G` MG transmitters, and a Poisson number of candidate receivers,
//! all uniform in a disk of radius `R`. Candidates inside any CU's exclusion
//! disk are removed (the Poisson hole process), and each survivor joins the
//! transmitter from which it receives the most average power, provided that
//! power clears the association threshold. Transmitters left without receivers
//! are inactive and dropped from the scenario.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::scalar::{db_to_linear, dbm_to_watts, Scalar};
use crate::seed;
use crate::{Error, Result};

/// Minimum link distance; shorter distances are clamped to this value.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Simulation parameters for one network configuration.
///
/// Powers and thresholds are kept in the logarithmic units they are usually
/// quoted in; the accessor methods return linear values.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams<T> {
    pub cell_radius_m: T,
    pub exclusion_radius_m: T,
    pub num_channels: usize,
    pub num_groups: usize,
    /// Intensity of candidate MG receivers (per m²) before exclusion.
    pub receiver_density_per_m2: T,
    /// Per-channel MG density used by the closed-form outage and power bounds.
    pub group_density_per_channel: T,
    /// Per-channel CU density used by the closed-form outage and power bounds.
    pub cu_density_per_channel: T,
    pub max_cu_power_dbm: T,
    pub max_mg_power_dbm: T,
    pub cu_sir_threshold_db: T,
    pub mg_sir_threshold_db: T,
    pub cu_outage_threshold: T,
    pub mg_outage_threshold: T,
    pub cu_min_rate_bps_per_hz: T,
    pub path_loss_exponent: T,
    pub bandwidth_hz: T,
    pub assoc_min_rx_power_dbm: T,
    pub master_seed: u64,
}

impl<T: Scalar> Default for SimParams<T> {
    fn default() -> Self {
        SimParams {
            cell_radius_m: T::lit(500.0),
            exclusion_radius_m: T::lit(50.0),
            num_channels: 3,
            num_groups: 7,
            receiver_density_per_m2: T::lit(2e-5),
            group_density_per_channel: T::lit(2e-5),
            cu_density_per_channel: T::lit(2e-5),
            max_cu_power_dbm: T::lit(30.0),
            max_mg_power_dbm: T::lit(30.0),
            cu_sir_threshold_db: T::lit(0.0),
            mg_sir_threshold_db: T::lit(25.0),
            cu_outage_threshold: T::lit(0.1),
            mg_outage_threshold: T::lit(0.1),
            cu_min_rate_bps_per_hz: T::lit(6.0),
            path_loss_exponent: T::lit(4.0),
            bandwidth_hz: T::lit(1.0),
            assoc_min_rx_power_dbm: T::lit(-80.0),
            master_seed: 1,
        }
    }
}

impl<T: Scalar> SimParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        let nonneg = |name, v: T| {
            if v >= T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        let probability = |name, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must lie in (0, 1), got {v}")))
            }
        };
        positive("cell_radius_m", self.cell_radius_m)?;
        nonneg("exclusion_radius_m", self.exclusion_radius_m)?;
        if self.exclusion_radius_m >= self.cell_radius_m {
            return Err(Error::param(
                "exclusion_radius_m",
                "must be smaller than the cell radius",
            ));
        }
        if self.num_channels == 0 {
            return Err(Error::param("num_channels", "must be >= 1"));
        }
        if self.num_groups == 0 {
            return Err(Error::param("num_groups", "must be >= 1"));
        }
        nonneg("receiver_density_per_m2", self.receiver_density_per_m2)?;
        nonneg("group_density_per_channel", self.group_density_per_channel)?;
        nonneg("cu_density_per_channel", self.cu_density_per_channel)?;
        probability("cu_outage_threshold", self.cu_outage_threshold)?;
        probability("mg_outage_threshold", self.mg_outage_threshold)?;
        nonneg("cu_min_rate_bps_per_hz", self.cu_min_rate_bps_per_hz)?;
        if !(self.path_loss_exponent > T::lit(2.0)) {
            return Err(Error::param("path_loss_exponent", "must be > 2"));
        }
        positive("bandwidth_hz", self.bandwidth_hz)?;
        for (name, v) in [
            ("max_cu_power_dbm", self.max_cu_power_dbm),
            ("max_mg_power_dbm", self.max_mg_power_dbm),
            ("cu_sir_threshold_db", self.cu_sir_threshold_db),
            ("mg_sir_threshold_db", self.mg_sir_threshold_db),
            ("assoc_min_rx_power_dbm", self.assoc_min_rx_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn max_cu_power_w(&self) -> T {
        dbm_to_watts(self.max_cu_power_dbm)
    }

    pub fn max_mg_power_w(&self) -> T {
        dbm_to_watts(self.max_mg_power_dbm)
    }

    pub fn mg_sir_threshold(&self) -> T {
        db_to_linear(self.mg_sir_threshold_db)
    }

    /// Linear CU decoding threshold: the larger of the configured SIR threshold
    /// and the SIR needed to carry `cu_min_rate_bps_per_hz`.
    pub fn cu_sir_threshold(&self) -> T {
        let from_rate = T::lit(2.0).powf(self.cu_min_rate_bps_per_hz) - T::one();
        db_to_linear(self.cu_sir_threshold_db).max(from_rate)
    }

    pub fn cell_area_m2(&self) -> T {
        T::PI() * self.cell_radius_m * self.cell_radius_m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellularUser<T> {
    pub id: usize,
    /// The single channel this CU owns.
    pub channel: usize,
    pub position: Point<T>,
    pub dist_to_bs_m: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticastGroup<T> {
    /// Index of the transmitter among the `G` placed transmitters.
    pub id: usize,
    pub tx_position: Point<T>,
    pub receivers: Vec<Point<T>>,
    pub tx_rx_dists_m: Vec<T>,
}

impl<T: Scalar> MulticastGroup<T> {
    pub fn is_active(&self) -> bool {
        !self.receivers.is_empty()
    }

    /// Distance to the farthest receiver, the one that sets the group's
    /// power requirement under the average-path-loss view.
    pub fn worst_receiver_dist(&self) -> T {
        self.tx_rx_dists_m.iter().copied().fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario<T> {
    pub params: SimParams<T>,
    /// One CU per channel, `cus[k].channel == k`.
    pub cus: Vec<CellularUser<T>>,
    /// Active groups only. Allocation code refers to groups by their index in
    /// this vector.
    pub groups: Vec<MulticastGroup<T>>,
    pub candidate_count: usize,
    pub excluded_receiver_count: usize,
    /// Receivers outside every exclusion disk whose best received power was
    /// below the association threshold.
    pub unassociated_count: usize,
    pub scenario_seed: u64,
    /// Set when every group ended up without receivers.
    pub degenerate: bool,
}

impl<T: Scalar> NetworkScenario<T> {
    pub fn num_channels(&self) -> usize {
        self.cus.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_receivers(&self) -> usize {
        self.groups.iter().map(|g| g.receivers.len()).sum()
    }
}

/// `n` points i.i.d. uniform on the disk of the given radius around the origin.
pub fn sample_uniform_disk<T: Scalar, R: Rng + ?Sized>(n: usize, radius: T, rng: &mut R) -> Result<Vec<Point<T>>> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::param("radius", format!("must be > 0, got {radius}")));
    }
    let r = radius.as_f64();
    Ok((0..n)
        .map(|_| {
            let rho = r * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            Point::new(T::lit(rho * theta.cos()), T::lit(rho * theta.sin()))
        })
        .collect())
}

/// Poisson count with mean `intensity * area`.
pub fn sample_poisson_count<T: Scalar, R: Rng + ?Sized>(intensity: T, area_m2: T, rng: &mut R) -> Result<usize> {
    if !(intensity >= T::zero()) || !intensity.is_finite() {
        return Err(Error::param("intensity", format!("must be >= 0, got {intensity}")));
    }
    if !(area_m2 >= T::zero()) || !area_m2.is_finite() {
        return Err(Error::param("area_m2", format!("must be >= 0, got {area_m2}")));
    }
    let mean = (intensity * area_m2).as_f64();
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::param("intensity", e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

/// Drops candidates closer than `exclusion_radius` to any CU. The exclusion
/// disk is open, so a candidate exactly at distance `D` is kept.
pub fn apply_exclusion<T: Scalar>(
    candidates: &[Point<T>],
    cus: &[CellularUser<T>],
    exclusion_radius: T,
) -> (Vec<Point<T>>, usize) {
    let kept: Vec<Point<T>> = candidates
        .iter()
        .filter(|p| cus.iter().all(|cu| p.distance(&cu.position) >= exclusion_radius))
        .copied()
        .collect();
    let removed = candidates.len() - kept.len();
    (kept, removed)
}

/// Attaches every receiver to the transmitter with the largest average received
/// power `P_G d^-alpha`, dropping receivers whose best power is below
/// `assoc_min_rx_power_dbm`. Ties go to the lower transmitter index.
///
/// Returns all `tx_positions.len()` groups (inactive ones included, in
/// transmitter order) and the number of receivers that joined no group.
pub fn form_groups<T: Scalar>(
    tx_positions: &[Point<T>],
    receivers: &[Point<T>],
    mg_power_dbm: T,
    assoc_min_rx_power_dbm: T,
    alpha: T,
) -> Result<(Vec<MulticastGroup<T>>, usize)> {
    if tx_positions.is_empty() {
        return Err(Error::param("tx_positions", "at least one transmitter is required"));
    }
    let mut groups: Vec<MulticastGroup<T>> = tx_positions
        .iter()
        .enumerate()
        .map(|(id, &tx)| MulticastGroup {
            id,
            tx_position: tx,
            receivers: Vec::new(),
            tx_rx_dists_m: Vec::new(),
        })
        .collect();
    let d_min = T::lit(MIN_DISTANCE_M);
    let mut unassociated = 0;
    for rx in receivers {
        let mut best: Option<(usize, T, T)> = None;
        for (i, tx) in tx_positions.iter().enumerate() {
            let d = tx.distance(rx).max(d_min);
            let rx_dbm = mg_power_dbm - T::lit(10.0) * alpha * d.log10();
            if best.is_none_or(|(_, p, _)| rx_dbm > p) {
                best = Some((i, rx_dbm, d));
            }
        }
        match best {
            Some((i, p, d)) if p >= assoc_min_rx_power_dbm => {
                groups[i].receivers.push(*rx);
                groups[i].tx_rx_dists_m.push(d);
            }
            _ => unassociated += 1,
        }
    }
    Ok((groups, unassociated))
}

/// Scenario `index` of the parameter set, seeded from `params.master_seed`.
pub fn generate_scenario<T: Scalar>(params: &SimParams<T>, index: u64) -> Result<NetworkScenario<T>> {
    generate_scenario_seeded(params, seed::mix(params.master_seed, &[index]))
}

/// Scenario drawn from an explicit seed. Draw order: CU positions, MG
/// transmitter positions, candidate count, candidate positions.
pub fn generate_scenario_seeded<T: Scalar>(params: &SimParams<T>, scenario_seed: u64) -> Result<NetworkScenario<T>> {
    params.validate()?;
    let mut rng = seed::stream_rng(scenario_seed, seed::stream::GEOMETRY);
    let radius = params.cell_radius_m;

    let cus: Vec<CellularUser<T>> = sample_uniform_disk(params.num_channels, radius, &mut rng)?
        .into_iter()
        .enumerate()
        .map(|(k, position)| CellularUser {
            id: k,
            channel: k,
            position,
            dist_to_bs_m: position.norm(),
        })
        .collect();
    let tx_positions = sample_uniform_disk(params.num_groups, radius, &mut rng)?;
    let n_candidates = sample_poisson_count(params.receiver_density_per_m2, params.cell_area_m2(), &mut rng)?;
    let candidates = sample_uniform_disk(n_candidates, radius, &mut rng)?;

    let (kept, excluded) = apply_exclusion(&candidates, &cus, params.exclusion_radius_m);
    let (groups, unassociated) = form_groups(
        &tx_positions,
        &kept,
        params.max_mg_power_dbm,
        params.assoc_min_rx_power_dbm,
        params.path_loss_exponent,
    )?;
    let groups: Vec<_> = groups.into_iter().filter(|g| g.is_active()).collect();
    let degenerate = groups.is_empty();

    Ok(NetworkScenario {
        params: params.clone(),
        cus,
        groups,
        candidate_count: n_candidates,
        excluded_receiver_count: excluded,
        unassociated_count: unassociated,
        scenario_seed,
        degenerate,
    })
}

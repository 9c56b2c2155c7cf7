//! Network instance generation: hexagonal base-station layout, uniform user
//! placement, distance path loss and Rayleigh fading.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::math;

/// Path loss in dB at distance `d_km` kilometers: 128.1 + 37.6 log10(d).
pub fn path_loss_db(d_km: f64) -> f64 {
    128.1 + 37.6 * math::log10(d_km)
}

/// Thermal noise power in watts over one subcarrier: -174 dBm/Hz times the
/// per-subcarrier bandwidth.
pub fn thermal_noise_w(bandwidth_hz: f64, subcarriers: usize) -> f64 {
    math::powf(10.0, (-174.0 - 30.0) / 10.0) * bandwidth_hz / subcarriers as f64
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub bs_count: usize,
    pub subcarrier_count: usize,
    pub inter_site_distance_m: f64,
    pub bandwidth_hz: f64,
    pub power_budget_w: f64,
    /// Noise power per subcarrier; defaults to thermal noise over the
    /// per-subcarrier bandwidth.
    pub noise_power_w: Option<f64>,
    /// Users are kept at least this far from their serving base station.
    pub min_user_distance_m: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            bs_count: 19,
            subcarrier_count: 64,
            inter_site_distance_m: 1000.0,
            bandwidth_hz: 1e7,
            power_budget_w: 30.0,
            noise_power_w: None,
            min_user_distance_m: 35.0,
        }
    }
}

/// One served user, pinned to a (base station, subcarrier) slot.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UserSlot {
    pub bs: usize,
    pub subcarrier: usize,
    pub position_m: [f64; 2],
}

/// Immutable network instance.
///
/// `gains[(m * bs_count + j) * subcarrier_count + n]` is the squared channel
/// magnitude |h_{m,j}|² between base station j and the user served by base
/// station m on subcarrier n (row-major in (m, j, n)).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scenario {
    pub format_version: u32,
    pub seed: u64,
    pub bs_count: usize,
    pub subcarrier_count: usize,
    pub inter_site_distance_m: f64,
    pub bandwidth_hz: f64,
    pub noise_power_w: f64,
    pub power_budget_w: f64,
    pub bs_positions_m: Vec<[f64; 2]>,
    pub users: Vec<UserSlot>,
    pub gains: Vec<f64>,
}

pub const SCENARIO_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    InvalidConfig(&'static str),
    Inconsistent(&'static str),
}

impl core::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioError::InvalidConfig(msg) => write!(f, "invalid scenario config: {msg}"),
            ScenarioError::Inconsistent(msg) => write!(f, "inconsistent scenario: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

impl Scenario {
    #[inline]
    pub fn gain(&self, m: usize, j: usize, n: usize) -> f64 {
        self.gains[(m * self.bs_count + j) * self.subcarrier_count + n]
    }

    /// Largest own-channel gain of base station `m` across subcarriers.
    pub fn max_own_gain(&self, m: usize) -> f64 {
        (0..self.subcarrier_count)
            .map(|n| self.gain(m, m, n))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let m = self.bs_count;
        let n = self.subcarrier_count;
        if m == 0 || n == 0 {
            return Err(ScenarioError::Inconsistent("empty cell or subcarrier set"));
        }
        if self.bs_positions_m.len() != m {
            return Err(ScenarioError::Inconsistent("base station position count"));
        }
        if self.gains.len() != m * m * n {
            return Err(ScenarioError::Inconsistent("gain tensor size"));
        }
        if !self.gains.iter().all(|g| g.is_finite() && *g >= 0.0) {
            return Err(ScenarioError::Inconsistent("gains must be finite and nonnegative"));
        }
        if !(self.noise_power_w > 0.0) || !self.noise_power_w.is_finite() {
            return Err(ScenarioError::Inconsistent("noise power must be positive"));
        }
        if !(self.power_budget_w > 0.0) || !self.power_budget_w.is_finite() {
            return Err(ScenarioError::Inconsistent("power budget must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(ScenarioError::Inconsistent("bandwidth must be positive"));
        }
        // the user assignment must cover each (bs, subcarrier) slot exactly once
        if self.users.len() != m * n {
            return Err(ScenarioError::Inconsistent("user count must equal slot count"));
        }
        let mut seen = alloc::vec![false; m * n];
        for u in &self.users {
            if u.bs >= m || u.subcarrier >= n {
                return Err(ScenarioError::Inconsistent("user slot out of range"));
            }
            let k = u.bs * n + u.subcarrier;
            if seen[k] {
                return Err(ScenarioError::Inconsistent("duplicate user slot"));
            }
            seen[k] = true;
        }
        Ok(())
    }
}

/// Hexagonal spiral of cell centers: the origin, then concentric rings.
fn hex_positions(count: usize, isd: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(count);
    out.push([0.0, 0.0]);
    // axial basis with nearest-neighbor distance isd
    let to_xy = |q: i64, r: i64| -> [f64; 2] {
        [
            isd * (q as f64 + 0.5 * r as f64),
            isd * (3.0f64.sqrt() / 2.0) * r as f64,
        ]
    };
    const DIRS: [(i64, i64); 6] = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    let mut ring = 1i64;
    while out.len() < count {
        let (mut q, mut r) = (ring, 0i64);
        'ring: for dir in DIRS {
            for _ in 0..ring {
                out.push(to_xy(q, r));
                if out.len() == count {
                    break 'ring;
                }
                q += dir.0;
                r += dir.1;
            }
        }
        ring += 1;
    }
    out
}

// PRNG discipline: one ChaCha12 generator keyed by the scenario seed.
// Stream 0 draws user placements in (bs, subcarrier) order; stream
// 1 + (m * M + j) * N + n draws the fading of link (m, j, n), so every link
// has its own substream of the same 64-bit seed.
fn placement_rng(seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

fn link_rng(seed: u64, link_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(1 + link_index);
    rng
}

/// Generate a scenario. Deterministic: a fixed (config, seed) pair yields a
/// bit-identical instance.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, ScenarioError> {
    let m = config.bs_count;
    let n = config.subcarrier_count;
    if m == 0 || n == 0 {
        return Err(ScenarioError::InvalidConfig("cell and subcarrier counts must be positive"));
    }
    if !(config.inter_site_distance_m > 0.0) {
        return Err(ScenarioError::InvalidConfig("inter-site distance must be positive"));
    }
    if !(config.bandwidth_hz > 0.0) {
        return Err(ScenarioError::InvalidConfig("bandwidth must be positive"));
    }
    if !(config.power_budget_w > 0.0) {
        return Err(ScenarioError::InvalidConfig("power budget must be positive"));
    }
    let cell_radius = config.inter_site_distance_m / 2.0;
    if !(config.min_user_distance_m >= 0.0) || config.min_user_distance_m >= cell_radius {
        return Err(ScenarioError::InvalidConfig("minimum user distance exceeds the cell radius"));
    }
    let noise = match config.noise_power_w {
        Some(w) if w > 0.0 && w.is_finite() => w,
        Some(_) => return Err(ScenarioError::InvalidConfig("noise power must be positive")),
        None => thermal_noise_w(config.bandwidth_hz, n),
    };

    let bs_positions = hex_positions(m, config.inter_site_distance_m);

    // one user per (bs, subcarrier) slot, uniform over the cell annulus
    let mut rng = placement_rng(seed);
    let rmin2 = config.min_user_distance_m * config.min_user_distance_m;
    let rmax2 = cell_radius * cell_radius;
    let mut users = Vec::with_capacity(m * n);
    for bs in 0..m {
        for sub in 0..n {
            let u1: f64 = rng.gen();
            let u2: f64 = rng.gen();
            let radius = math::sqrt(rmin2 + u1 * (rmax2 - rmin2));
            let angle = 2.0 * core::f64::consts::PI * u2;
            users.push(UserSlot {
                bs,
                subcarrier: sub,
                position_m: [
                    bs_positions[bs][0] + radius * math::cos(angle),
                    bs_positions[bs][1] + radius * math::sin(angle),
                ],
            });
        }
    }

    // gains[(m, j, n)]: path loss from transmitter j to the user of slot
    // (m, n), times a unit-mean exponential fade drawn on the link's stream
    let mut gains = alloc::vec![0.0; m * m * n];
    for mm in 0..m {
        for j in 0..m {
            for nn in 0..n {
                let user = &users[mm * n + nn];
                let dx = user.position_m[0] - bs_positions[j][0];
                let dy = user.position_m[1] - bs_positions[j][1];
                let d_m = math::sqrt(dx * dx + dy * dy).max(1.0);
                let pl = path_loss_db(d_m / 1000.0);
                let link = ((mm * m + j) * n + nn) as u64;
                let u: f64 = link_rng(seed, link).gen();
                let fade = -math::ln(1.0 - u);
                gains[(mm * m + j) * n + nn] = fade * math::powf(10.0, -pl / 10.0);
            }
        }
    }

    let scenario = Scenario {
        format_version: SCENARIO_FORMAT_VERSION,
        seed,
        bs_count: m,
        subcarrier_count: n,
        inter_site_distance_m: config.inter_site_distance_m,
        bandwidth_hz: config.bandwidth_hz,
        noise_power_w: noise,
        power_budget_w: config.power_budget_w,
        bs_positions_m: bs_positions,
        users,
        gains,
    };
    scenario.validate()?;
    Ok(scenario)
}

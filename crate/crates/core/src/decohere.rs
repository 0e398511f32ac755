//! Decoherence as random projective collapse of coherent domains.
//!
//! A domain decoheres at rate `1 / tau_eff`, where `tau_eff` is a bare
//! decoherence time stretched by a protection factor. During each interval
//! `dt` a collapse fires with probability `1 - exp(-dt / tau_eff)` and
//! measures one uniformly chosen qubit of the domain.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::lattice::{CoherentDomain, SiteIndex};
use crate::qstate::PureState;
use crate::{Error, Result};

/// Protection factors at or above this make `tau_eff` infinite.
pub const PROTECTION_CAP: f64 = 1e16;

/// Survival probabilities below this are reported as exactly zero.
pub const SURVIVAL_FLOOR: f64 = 1e-300;

/// Survival needed for a coherent verdict, less a few ulps so that
/// `tau = dyn / ln 2` lands on the coherent side despite rounding.
pub const COHERENT_SURVIVAL: f64 = 0.5 - 1e-12;

/// Bare decoherence time of a microtubule, in seconds.
pub const MICROTUBULE_TAU: f64 = 1e-13;

/// Decoherence time for ions in water, in seconds.
pub const ION_TAU: f64 = 1e-19;

/// Shortest dynamical timescale of neural firing, in seconds.
pub const DEFAULT_DYN_TIMESCALE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceModel {
    tau_bare: f64,
    protection_factor: f64,
}

impl DecoherenceModel {
    pub fn new(tau_bare: f64, protection_factor: f64) -> Result<Self> {
        if !(tau_bare > 0.0) || !tau_bare.is_finite() {
            return Err(Error::param("tau_bare", "must be positive and finite"));
        }
        if !(protection_factor >= 1.0) {
            return Err(Error::param("protection_factor", "must be at least 1"));
        }
        Ok(Self {
            tau_bare,
            protection_factor,
        })
    }

    /// Unprotected model with the given decoherence time.
    pub fn bare(tau: f64) -> Result<Self> {
        Self::new(tau, 1.0)
    }

    pub fn tau_bare(&self) -> f64 {
        self.tau_bare
    }

    pub fn protection_factor(&self) -> f64 {
        self.protection_factor
    }

    pub fn tau_eff(&self) -> f64 {
        if self.protection_factor >= PROTECTION_CAP {
            return f64::INFINITY;
        }
        let tau = self.tau_bare * self.protection_factor;
        if tau.is_finite() {
            tau
        } else {
            f64::INFINITY
        }
    }

    /// Probability that no collapse has happened by time `t`.
    pub fn survival_probability(&self, t: f64) -> Result<f64> {
        survival(self.tau_eff(), t)
    }

    /// Probability that a collapse fires within one step of length `dt`.
    pub fn collapse_probability(&self, dt: f64) -> f64 {
        -libm::expm1(-dt / self.tau_eff())
    }
}

/// `exp(-t / tau_eff)`, clamped to zero below [`SURVIVAL_FLOOR`].
pub fn survival(tau_eff: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::param("t", "must be non-negative"));
    }
    if !(tau_eff > 0.0) {
        return Err(Error::param("tau_eff", "must be positive"));
    }
    let p = libm::exp(-t / tau_eff);
    Ok(if p < SURVIVAL_FLOOR { 0.0 } else { p })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, steps: usize, seed: u64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        Ok(Self { dt, steps, seed })
    }

    /// Total simulated time.
    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// A collapse that fired during a trajectory step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollapseEvent {
    pub step: usize,
    pub site: SiteIndex,
    pub outcome: u8,
}

/// Advances the domain's decoherence clock by `dt`. Returns the collapse that
/// fired, if any. Unitary evolution is applied separately.
///
/// Exactly one uniform draw is consumed when no collapse fires; a collapse
/// consumes two more (qubit choice and Born outcome).
pub fn trajectory_step<R: Rng + ?Sized>(
    domain: &mut CoherentDomain,
    model: &DecoherenceModel,
    dt: f64,
    rng: &mut R,
) -> Result<Option<(SiteIndex, u8)>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    let u: f64 = rng.random();
    if u >= model.collapse_probability(dt) {
        return Ok(None);
    }
    let qubit = rng.random_range(0..domain.len());
    let site = domain.sites()[qubit];
    let outcome = if domain.is_ground() {
        // all-|a> measures to 0 with certainty; keep the draw for stream parity
        let _: f64 = rng.random();
        0
    } else {
        domain.state_mut().measure_qubit(qubit, rng)?
    };
    Ok(Some((site, outcome)))
}

/// Unitary evolution hook applied once per trajectory step.
pub type UnitaryHook<'a> = &'a mut dyn FnMut(&mut PureState) -> Result<()>;

/// Runs `config.steps` decoherence steps, optionally interleaved with a
/// unitary step applied before each decoherence check.
pub fn run_trajectory(
    domain: &mut CoherentDomain,
    model: &DecoherenceModel,
    config: &TrajectoryConfig,
    mut unitary: Option<UnitaryHook<'_>>,
) -> Result<Vec<CollapseEvent>> {
    let mut rng = crate::seed::rng(config.seed);
    let mut events = Vec::new();
    for step in 0..config.steps {
        if let Some(evolve) = unitary.as_mut() {
            evolve(domain.state_mut())?;
        }
        if let Some((site, outcome)) = trajectory_step(domain, model, config.dt, &mut rng)? {
            events.push(CollapseEvent {
                step,
                site,
                outcome,
            });
        }
    }
    Ok(events)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    Decoherent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Coherent => "coherent",
            Verdict::Decoherent => "decoherent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub tau_eff: f64,
    pub dyn_timescale: f64,
    pub survival: f64,
    pub verdict: Verdict,
}

/// Compares each effective decoherence time against `dyn_timescale`; a
/// domain counts as coherent when at least half of its trajectories survive.
pub fn coherence_scan(taus: &[f64], dyn_timescale: f64) -> Result<Vec<ScanRow>> {
    if taus.is_empty() {
        return Err(Error::param("taus", "must not be empty"));
    }
    if !(dyn_timescale > 0.0) || !dyn_timescale.is_finite() {
        return Err(Error::param("dyn_timescale", "must be positive and finite"));
    }
    taus.iter()
        .map(|&tau_eff| {
            let survival = survival(tau_eff, dyn_timescale)?;
            let verdict = if survival >= COHERENT_SURVIVAL {
                Verdict::Coherent
            } else {
                Verdict::Decoherent
            };
            Ok(ScanRow {
                tau_eff,
                dyn_timescale,
                survival,
                verdict,
            })
        })
        .collect()
}

/// Measures every qubit of the domain in site order, leaving it in the
/// corresponding basis state.
pub fn trigger_collapse<R: Rng + ?Sized>(
    domain: &mut CoherentDomain,
    rng: &mut R,
) -> Result<BTreeMap<SiteIndex, u8>> {
    if domain.is_ground() {
        return Ok(domain.sites().iter().map(|&s| (s, 0)).collect());
    }
    let sites = domain.sites().to_vec();
    let state = domain.state_mut();
    let mut outcomes = BTreeMap::new();
    for (qubit, site) in sites.into_iter().enumerate() {
        outcomes.insert(site, state.measure_qubit(qubit, rng)?);
    }
    Ok(outcomes)
}

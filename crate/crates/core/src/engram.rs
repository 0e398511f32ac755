//! Engram recall across neurons and the olfactory-conditioning harness.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::Rng;

use crate::decohere::trigger_collapse;
use crate::lattice::{
    engram_distance, partition_domains_with, CoherentDomain, LatticeGeometry, MapBindingPattern,
    PartitionOptions, SiteIndex,
};
use crate::seed;
use crate::{Error, Result};

/// Flies per trial when none is given; trials use between 50 and 60.
pub const DEFAULT_NUM_FLIES: usize = 55;

/// Default engram-distance threshold for co-activation.
pub const DEFAULT_RECALL_THRESHOLD: f64 = 0.05;

/// Outcome counts of one conditioning test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentTally {
    trained: u64,
    untrained: u64,
    total: u64,
}

impl ExperimentTally {
    /// `trained` flies avoided the shock-paired odor, `untrained` chose it;
    /// the remainder of `total` made no choice.
    pub fn new(trained: u64, untrained: u64, total: u64) -> Result<Self> {
        if total == 0 {
            return Err(Error::param("total", "must be positive"));
        }
        if trained.checked_add(untrained).is_none_or(|n| n > total) {
            return Err(Error::param("total", "smaller than trained + untrained"));
        }
        Ok(Self {
            trained,
            untrained,
            total,
        })
    }

    pub fn trained(&self) -> u64 {
        self.trained
    }

    pub fn untrained(&self) -> u64 {
        self.untrained
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn performance_index(&self) -> f64 {
        performance_index(self)
    }
}

/// `(trained - untrained) / total × 100`, with the difference scaled by 100
/// in integer arithmetic so the only rounding is the final division.
pub fn performance_index(tally: &ExperimentTally) -> f64 {
    let diff = tally.trained as i128 - tally.untrained as i128;
    (diff * 100) as f64 / tally.total as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditioningConfig {
    pub num_flies: usize,
    pub p_avoid_trained: f64,
    pub p_avoid_naive: f64,
    pub seed: u64,
}

impl ConditioningConfig {
    pub fn new(num_flies: usize, p_avoid_trained: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            num_flies,
            p_avoid_trained,
            p_avoid_naive: 0.5,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_flies == 0 {
            return Err(Error::param("num_flies", "must be positive"));
        }
        for (name, p) in [
            ("p_avoid_trained", self.p_avoid_trained),
            ("p_avoid_naive", self.p_avoid_naive),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Mean performance index implied by `p_avoid_trained`.
    pub fn expected_pi(&self) -> f64 {
        (2.0 * self.p_avoid_trained - 1.0) * 100.0
    }
}

impl Default for ConditioningConfig {
    fn default() -> Self {
        Self {
            num_flies: DEFAULT_NUM_FLIES,
            p_avoid_trained: 0.9,
            p_avoid_naive: 0.5,
            seed: 0,
        }
    }
}

fn choice_test<R: Rng + ?Sized>(flies: usize, p_avoid: f64, rng: &mut R) -> ExperimentTally {
    let trained = (0..flies).filter(|_| rng.random::<f64>() < p_avoid).count() as u64;
    let total = flies as u64;
    ExperimentTally {
        trained,
        untrained: total - trained,
        total,
    }
}

/// One trained cohort: each fly independently avoids the shock-paired odor
/// with `p_avoid_trained`.
pub fn simulate_conditioning<R: Rng + ?Sized>(
    config: &ConditioningConfig,
    rng: &mut R,
) -> Result<ExperimentTally> {
    config.validate()?;
    Ok(choice_test(config.num_flies, config.p_avoid_trained, rng))
}

/// Untrained control cohort choosing with `p_avoid_naive`.
pub fn simulate_naive<R: Rng + ?Sized>(
    config: &ConditioningConfig,
    rng: &mut R,
) -> Result<ExperimentTally> {
    config.validate()?;
    Ok(choice_test(config.num_flies, config.p_avoid_naive, rng))
}

/// Re-tests only the flies that avoided the odor in `first`. Their response
/// is still probabilistic, so the cohort reproduces the same PI on average.
pub fn retest<R: Rng + ?Sized>(
    config: &ConditioningConfig,
    first: &ExperimentTally,
    rng: &mut R,
) -> Result<Option<ExperimentTally>> {
    config.validate()?;
    if first.trained == 0 {
        return Ok(None);
    }
    Ok(Some(choice_test(
        first.trained as usize,
        config.p_avoid_trained,
        rng,
    )))
}

/// `runs` independent cohorts drawn from the config's own seed.
pub fn run_experiment(config: &ConditioningConfig, runs: usize) -> Result<Vec<ExperimentTally>> {
    config.validate()?;
    let mut rng = seed::rng(config.seed);
    (0..runs)
        .map(|_| simulate_conditioning(config, &mut rng))
        .collect()
}

/// A neuron whose microtubule carries an engram.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronModel {
    id: u64,
    geometry: LatticeGeometry,
    engram: MapBindingPattern,
    options: PartitionOptions,
    domains: Vec<CoherentDomain>,
    activated: bool,
}

impl NeuronModel {
    /// A neuron with no MAPs bound.
    pub fn new(id: u64, geometry: LatticeGeometry, options: PartitionOptions) -> Result<Self> {
        Self::with_engram(id, MapBindingPattern::empty(geometry), options)
    }

    pub fn with_engram(
        id: u64,
        engram: MapBindingPattern,
        options: PartitionOptions,
    ) -> Result<Self> {
        let geometry = *engram.geometry();
        let domains = partition_domains_with(&geometry, &engram, &options)?;
        Ok(Self {
            id,
            geometry,
            engram,
            options,
            domains,
            activated: false,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn engram(&self) -> &MapBindingPattern {
        &self.engram
    }

    pub fn domains(&self) -> &[CoherentDomain] {
        &self.domains
    }

    pub fn domains_mut(&mut self) -> &mut [CoherentDomain] {
        &mut self.domains
    }

    pub fn is_activated(&self) -> bool {
        self.activated
    }

    /// Replaces the engram, re-partitions the domains and clears activation.
    pub fn encode_engram(&mut self, pattern: MapBindingPattern) -> Result<()> {
        if *pattern.geometry() != self.geometry {
            return Err(Error::GeometryMismatch);
        }
        self.domains = partition_domains_with(&self.geometry, &pattern, &self.options)?;
        self.engram = pattern;
        self.activated = false;
        Ok(())
    }
}

/// Result of one recall.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecallOutcome {
    pub activated: BTreeSet<u64>,
    /// Classical conformation pattern of every site of each activated neuron.
    pub collapses: BTreeMap<u64, BTreeMap<SiteIndex, u8>>,
}

/// Neuron ids whose engram lies within `threshold` of the key neuron's.
pub fn coactivated_set(
    neurons: &[NeuronModel],
    key_neuron: u64,
    threshold: f64,
) -> Result<BTreeSet<u64>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::param("threshold", "must lie in [0, 1]"));
    }
    let key = neurons
        .iter()
        .find(|n| n.id == key_neuron)
        .ok_or(Error::UnknownNeuron(key_neuron))?;
    let mut set = BTreeSet::from([key_neuron]);
    for n in neurons {
        if engram_distance(&key.engram, &n.engram)? <= threshold {
            set.insert(n.id);
        }
    }
    Ok(set)
}

/// Activates the key neuron and, in the same call, every neuron with a
/// similar engram. Each activated neuron's domains collapse fully using a
/// stream derived from one draw of `rng` and the neuron id. Other neurons are
/// left untouched.
pub fn recall_coactivation<R: Rng + ?Sized>(
    neurons: &mut [NeuronModel],
    key_neuron: u64,
    threshold: f64,
    rng: &mut R,
) -> Result<RecallOutcome> {
    let activated = coactivated_set(neurons, key_neuron, threshold)?;
    let base = rng.next_u64();
    let mut collapses = BTreeMap::new();
    for neuron in neurons.iter_mut().filter(|n| activated.contains(&n.id)) {
        neuron.activated = true;
        let mut stream = seed::rng(seed::derive_indexed(base, neuron.id));
        let mut pattern = BTreeMap::new();
        for domain in &mut neuron.domains {
            pattern.append(&mut trigger_collapse(domain, &mut stream)?);
        }
        collapses.insert(neuron.id, pattern);
    }
    Ok(RecallOutcome {
        activated,
        collapses,
    })
}

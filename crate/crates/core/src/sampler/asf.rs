use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::SubgradientOracle;
use crate::prox::ProxParams;
use crate::sampler::rgo::{rgo_sample_with, DEFAULT_TRIAL_CAP};
use crate::sampler::Rng;
use crate::scalar::Scalar;

/// State of one alternating-sampling chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsfChain<T> {
    pub state: Vec<T>,
    pub eta: T,
    pub step_count: u64,
    pub cumulative_oracle_calls: u64,
    pub cumulative_trials: u64,
    pub last_trials: u64,
}

impl<T: Scalar> AsfChain<T> {
    pub fn new(x0: Vec<T>, eta: T) -> Result<Self> {
        if !(eta > T::zero() && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("initial state must be finite".into()));
        }
        Ok(Self {
            state: x0,
            eta,
            step_count: 0,
            cumulative_oracle_calls: 0,
            cumulative_trials: 0,
            last_trials: 0,
        })
    }

    /// `y = x + √η z`, then `x ← RGO(y)`.
    pub fn step(&mut self, oracle: &SubgradientOracle<T>, delta: T, rng: &mut Rng) -> Result<()> {
        let sd = self.eta.sqrt();
        let y: Vec<T> = self
            .state
            .iter()
            .map(|&x| x + sd * T::lit(rng.standard_normal()))
            .collect();
        let out = rgo_sample_with(oracle, &y, &ProxParams::new(self.eta, delta), DEFAULT_TRIAL_CAP, rng)?;
        self.state = out.sample;
        self.step_count += 1;
        self.cumulative_oracle_calls += out.oracle_calls;
        self.cumulative_trials += out.trials;
        self.last_trials = out.trials;
        Ok(())
    }
}

pub fn asf_step<T: Scalar>(
    chain: &AsfChain<T>,
    oracle: &SubgradientOracle<T>,
    delta: T,
    rng: &mut Rng,
) -> Result<AsfChain<T>> {
    let mut next = chain.clone();
    next.step(oracle, delta, rng)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRecord<T> {
    pub step: u64,
    pub state: Vec<T>,
    pub trials: u64,
}

/// Output of [`run_chains`]: `records[c]` holds every post-burn-in step of chain `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRun<T> {
    pub records: Vec<Vec<ChainRecord<T>>>,
    pub chains: Vec<AsfChain<T>>,
}

impl<T: Scalar> ChainRun<T> {
    /// Post-burn-in states of all chains, chain by chain.
    pub fn pooled_states(&self) -> Vec<Vec<T>> {
        self.records
            .iter()
            .flat_map(|r| r.iter().map(|rec| rec.state.clone()))
            .collect()
    }

    /// Writes `chain_id,step,x0,...,x{d-1},trials_this_step`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.chains.first().map_or(0, |c| c.state.len());
        let mut header = String::from("chain_id,step");
        for k in 0..d {
            header.push_str(&format!(",x{k}"));
        }
        header.push_str(",trials_this_step");
        writeln!(w, "{header}")?;
        for (c, recs) in self.records.iter().enumerate() {
            for r in recs {
                write!(w, "{c},{}", r.step)?;
                for v in &r.state {
                    write!(w, ",{v}")?;
                }
                writeln!(w, ",{}", r.trials)?;
            }
        }
        Ok(())
    }
}

/// Runs independent chains in parallel. Chain `c` draws from `Rng::new(seed).split(c)`,
/// so results do not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn run_chains<T: Scalar>(
    oracle: &SubgradientOracle<T>,
    x0: &[T],
    eta: T,
    delta: T,
    burn_in: u64,
    steps: u64,
    chains: usize,
    seed: u64,
) -> Result<ChainRun<T>> {
    let master = Rng::new(seed);
    let results: Result<Vec<(AsfChain<T>, Vec<ChainRecord<T>>)>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = master.split(c as u64);
            let mut chain = AsfChain::new(x0.to_vec(), eta)?;
            let mut recs = Vec::with_capacity(steps as usize);
            for _ in 0..burn_in + steps {
                chain.step(oracle, delta, &mut rng)?;
                if chain.step_count > burn_in {
                    recs.push(ChainRecord {
                        step: chain.step_count,
                        state: chain.state.clone(),
                        trials: chain.last_trials,
                    });
                }
            }
            Ok((chain, recs))
        })
        .collect();
    let (chains, records) = results?.into_iter().unzip();
    Ok(ChainRun { records, chains })
}

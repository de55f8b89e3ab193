use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::entangle::entangle_hom;
use super::measure::{Branch, MeasurementModel, ProtocolOutcome, ProtocolTiming};
use super::transfer::SimSettings;
use crate::dynamics::ThreeModeParams;
use crate::error::require;
use crate::Result;

/// How the retry flow is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiRoundMethod {
    /// Exact probabilities of every round.
    Enumerate,
    /// Seeded sampling of whole runs.
    MonteCarlo { shots: usize, seed: u64 },
}

/// Options of [`entangle_hom_multiround`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiRoundOptions {
    pub method: MultiRoundMethod,
    /// Replaces the simulated per-round success probability.
    pub p_success_override: Option<f64>,
    /// Probability that state preparation fails and initialisation repeats.
    pub prep_failure: f64,
    pub settings: SimSettings,
}

impl Default for MultiRoundOptions {
    fn default() -> Self {
        Self {
            method: MultiRoundMethod::Enumerate,
            p_success_override: None,
            prep_failure: 0.0,
            settings: SimSettings::fock(),
        }
    }
}

/// Result of the retry flow.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiRoundOutcome {
    /// Branches `success round k` for each round and the reported parities
    /// of a final failed round.
    pub outcome: ProtocolOutcome,
    /// Success probability of a single round.
    pub p_round: f64,
    /// Probability of success within `n + 1` rounds.
    pub cumulative: Vec<f64>,
    /// Standard errors of `cumulative` (Monte Carlo only).
    pub cumulative_error: Option<Vec<f64>>,
    /// Fidelity of states heralded in round `n + 1`.
    pub fidelity_by_round: Vec<f64>,
    /// Expected number of rounds given success within the horizon.
    pub mean_rounds: f64,
    /// `initialize + E[R] attempt + (E[R] - 1) reset_avg` given success,
    /// plus repeated initialisations (s).
    pub mean_time: f64,
}

/// Mean time to success given the conditional mean round count.
fn time_to_success(timing: &ProtocolTiming, mean_rounds: f64, prep_failure: f64) -> f64 {
    let inits = 1.0 / (1.0 - prep_failure);
    timing.initialize * inits + mean_rounds * timing.attempt + (mean_rounds - 1.0) * timing.reset_avg
}

/// Heralded HOM entanglement with retries. A failed round (one cavity odd,
/// or both odd) returns the cavities to one photon each, by reloading the
/// empty cavity or by a reset, so every round repeats the first.
pub fn entangle_hom_multiround(
    params: &ThreeModeParams,
    model: &MeasurementModel,
    max_rounds: usize,
    timing: &ProtocolTiming,
    options: &MultiRoundOptions,
) -> Result<MultiRoundOutcome> {
    require(max_rounds >= 1, "max_rounds", max_rounds as f64, "must be at least 1")?;
    timing.validate()?;
    require(
        (0.0..1.0).contains(&options.prep_failure),
        "prep_failure",
        options.prep_failure,
        "must lie in [0, 1)",
    )?;
    if let Some(p) = options.p_success_override {
        require((0.0..=1.0).contains(&p), "p_success_override", p, "must lie in [0, 1]")?;
    }
    let single = entangle_hom(params, model, &options.settings)?.outcome;
    let p = options.p_success_override.unwrap_or(single.success_probability);
    let success = single.branch("even,even").cloned();
    let fidelity = success.as_ref().and_then(|b| b.fidelity).unwrap_or(0.0);
    let failures: Vec<&Branch> = single.branches.iter().filter(|b| b.label != "even,even").collect();
    let fail_total: f64 = failures.iter().map(|b| b.probability).sum();

    let exact: Vec<f64> = (1..=max_rounds).map(|n| 1.0 - (1.0 - p).powi(n as i32)).collect();
    let (cumulative, cumulative_error, mean_rounds) = match options.method {
        MultiRoundMethod::Enumerate => {
            let total = exact[max_rounds - 1];
            let mean = if total > 0.0 {
                (1..=max_rounds).map(|r| r as f64 * (1.0 - p).powi(r as i32 - 1) * p).sum::<f64>() / total
            } else {
                0.0
            };
            (exact.clone(), None, mean)
        }
        MultiRoundMethod::MonteCarlo { shots, seed } => {
            require(shots >= 1, "shots", shots as f64, "must be at least 1")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = alloc::vec![0usize; max_rounds];
            for _ in 0..shots {
                if let Some(r) = (1..=max_rounds).find(|_| rng.random::<f64>() < p) {
                    counts[r - 1] += 1;
                }
            }
            let n = shots as f64;
            let mut running = 0usize;
            let mut cum = Vec::with_capacity(max_rounds);
            let mut err = Vec::with_capacity(max_rounds);
            for &c in &counts {
                running += c;
                let f = running as f64 / n;
                cum.push(f);
                err.push((f * (1.0 - f) / n).sqrt());
            }
            let mean = if running > 0 {
                counts.iter().enumerate().map(|(i, &c)| (i + 1) as f64 * c as f64).sum::<f64>() / running as f64
            } else {
                0.0
            };
            (cum, Some(err), mean)
        }
    };

    let mut branches = Vec::new();
    if let Some(s) = &success {
        for r in 1..=max_rounds {
            let prob = (1.0 - p).powi(r as i32 - 1) * p;
            if prob > 0.0 {
                let mut b = s.clone();
                b.label = format!("success round {r}");
                b.probability = prob;
                branches.push(b);
            }
        }
    }
    let p_fail = (1.0 - p).powi(max_rounds as i32);
    if p_fail > 0.0 && fail_total > 0.0 {
        for b in failures {
            let mut b = b.clone();
            b.probability = p_fail * b.probability / fail_total;
            branches.push(b);
        }
    } else if p_fail > 0.0 {
        // a forced failure rate with no simulated failure branch
        let state = success.as_ref().map_or_else(|| single.branches[0].state.clone(), |b| b.state.clone());
        branches.push(Branch {
            label: "failure".into(),
            probability: p_fail,
            state,
            fidelity: None,
            decoded_fidelity: None,
        });
    }
    let success_probability = cumulative[max_rounds - 1];
    let elapsed = time_to_success(timing, mean_rounds, options.prep_failure);
    Ok(MultiRoundOutcome {
        outcome: ProtocolOutcome::new(branches, success_probability, elapsed),
        p_round: p,
        cumulative,
        cumulative_error,
        fidelity_by_round: alloc::vec![fidelity; max_rounds],
        mean_rounds,
        mean_time: elapsed,
    })
}

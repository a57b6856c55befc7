//! Real-coded genetic algorithm over PID gains.
//!
//! Normalized geometric ranking selection, whole-vector arithmetic crossover,
//! uniform resampling mutation, elitism, and a fixed generation budget. The
//! random stream is ChaCha8 seeded from a 64-bit seed, so a run is fully
//! determined by its configuration.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::metrics::FITNESS_PENALTY;
use crate::tuners::GeneBounds;
use crate::{Error, Result};

/// Gene vector in chromosome order `(Kd, Kp, Ki)`.
pub type Genes = [f64; 3];

/// Generations inspected when deciding whether a run converged.
pub const CONVERGENCE_WINDOW: usize = 50;
/// Largest best-fitness gain over the window that still counts as converged,
/// relative to `max(1, best fitness)`.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromosome {
    pub genes: Genes,
    pub fitness: f64,
}

/// One generation; row `i` is `[Kd, Kp, Ki, F]` for member `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Chromosome>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The `N × 4` matrix view with the fitness column last.
    pub fn as_matrix(&self) -> Vec<[f64; 4]> {
        self.members.iter().map(|c| [c.genes[0], c.genes[1], c.genes[2], c.fitness]).collect()
    }

    fn sort_by_fitness(&mut self) {
        // Stable: equal fitness keeps insertion order.
        self.members.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub pop_size: usize,
    pub max_generations: usize,
    /// Probability of selecting the best-ranked chromosome.
    pub selection_q: f64,
    pub crossover_pairs_per_gen: usize,
    /// Per-gene resampling probability.
    pub mutation_prob: f64,
    pub elite_count: usize,
    pub bounds: GeneBounds<f64>,
    pub rng_seed: u64,
}

impl GaConfig {
    pub const DEFAULT_POP_SIZE: usize = 80;
    pub const DEFAULT_MAX_GENERATIONS: usize = 300;
    pub const DEFAULT_SELECTION_Q: f64 = 0.08;
    pub const DEFAULT_MUTATION_PROB: f64 = 0.001;
    pub const DEFAULT_ELITE_COUNT: usize = 1;

    pub fn new(bounds: GeneBounds<f64>, rng_seed: u64) -> Self {
        Self {
            pop_size: Self::DEFAULT_POP_SIZE,
            max_generations: Self::DEFAULT_MAX_GENERATIONS,
            selection_q: Self::DEFAULT_SELECTION_Q,
            crossover_pairs_per_gen: Self::DEFAULT_POP_SIZE / 2,
            mutation_prob: Self::DEFAULT_MUTATION_PROB,
            elite_count: Self::DEFAULT_ELITE_COUNT,
            bounds,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidGaConfig(msg));
        if self.pop_size < 2 {
            return fail(format!("pop_size must be at least 2, got {}", self.pop_size));
        }
        if self.max_generations == 0 {
            return fail("max_generations must be positive".into());
        }
        if !(self.selection_q > 0.0 && self.selection_q < 1.0) {
            return fail(format!("selection_q must lie in (0, 1), got {}", self.selection_q));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return fail(format!("mutation_prob must lie in [0, 1], got {}", self.mutation_prob));
        }
        if self.elite_count >= self.pop_size {
            return fail(format!("elite_count {} must be below pop_size {}", self.elite_count, self.pop_size));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Chromosome,
    /// Performance index of the best chromosome (`1 / fitness`).
    pub best_index_value: f64,
    /// Best-so-far fitness after each generation, starting with the initial one.
    pub fitness_history: Vec<f64>,
    pub converged: bool,
    pub seed: u64,
}

/// Normalized geometric ranking probabilities for ranks `1..=n`.
///
/// `P(r) = q'(1−q)^{r−1}` with `q' = q / (1 − (1−q)^n)`.
pub fn geometric_selection_probs(n: usize, q: f64) -> Vec<f64> {
    assert!(n >= 1 && q > 0.0 && q < 1.0, "need n >= 1 and 0 < q < 1");
    let keep = 1.0 - q;
    // Normalizing the raw weights by their sum equals scaling by q'.
    let weights: Vec<f64> = (0..n).map(|r| keep.powi(r as i32)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// `(a·p1 + (1−a)·p2, (1−a)·p1 + a·p2)` over the whole gene vector.
pub fn arithmetic_crossover(p1: &Genes, p2: &Genes, a: f64) -> (Genes, Genes) {
    let blend = |w: f64| std::array::from_fn(|i| w * p1[i] + (1.0 - w) * p2[i]);
    (blend(a), blend(1.0 - a))
}

/// Resamples each gene uniformly within its bounds with probability `prob`.
pub fn mutate<R: Rng + ?Sized>(genes: &Genes, bounds: &GeneBounds<f64>, prob: f64, rng: &mut R) -> Genes {
    std::array::from_fn(|i| {
        if prob > 0.0 && rng.random::<f64>() < prob {
            let b = bounds.genes[i];
            rng.random_range(b.low..=b.high)
        } else {
            genes[i]
        }
    })
}

fn random_genes<R: Rng + ?Sized>(bounds: &GeneBounds<f64>, rng: &mut R) -> Genes {
    std::array::from_fn(|i| {
        let b = bounds.genes[i];
        rng.random_range(b.low..=b.high)
    })
}

fn sanitize(fitness: f64) -> f64 {
    if fitness.is_finite() && fitness >= 0.0 {
        fitness
    } else {
        FITNESS_PENALTY
    }
}

/// Runs the GA to its generation budget and returns the best chromosome seen.
pub fn run_ga<F>(config: &GaConfig, evaluate: F) -> Result<GaResult>
where
    F: Fn(&Genes) -> f64 + Sync,
{
    run_ga_observed(config, evaluate, |_, _| {})
}

/// [`run_ga`] with a callback receiving each evaluated, rank-sorted generation.
pub fn run_ga_observed<F, O>(config: &GaConfig, evaluate: F, mut observe: O) -> Result<GaResult>
where
    F: Fn(&Genes) -> f64 + Sync,
    O: FnMut(usize, &Population),
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let n = config.pop_size;
    let selector = WeightedIndex::new(geometric_selection_probs(n, config.selection_q))
        .map_err(|e| Error::InvalidGaConfig(e.to_string()))?;

    let evaluate_all = |genes: Vec<Genes>| -> Vec<Chromosome> {
        genes.into_par_iter().map(|g| Chromosome { genes: g, fitness: sanitize(evaluate(&g)) }).collect()
    };

    let initial: Vec<Genes> = (0..n).map(|_| random_genes(&config.bounds, &mut rng)).collect();
    let mut pop = Population { members: evaluate_all(initial) };
    let mut best = pop.members[0];
    let mut history = Vec::with_capacity(config.max_generations);

    for generation in 0..config.max_generations {
        pop.sort_by_fitness();
        if pop.members[0].fitness > best.fitness {
            best = pop.members[0];
        }
        history.push(best.fitness);
        observe(generation, &pop);
        if generation + 1 == config.max_generations {
            break;
        }

        let slots = n - config.elite_count;
        let mut children: Vec<Genes> = Vec::with_capacity(slots + 1);
        for _ in 0..config.crossover_pairs_per_gen {
            if children.len() >= slots {
                break;
            }
            let p1 = pop.members[selector.sample(&mut rng)].genes;
            let p2 = pop.members[selector.sample(&mut rng)].genes;
            let (c1, c2) = arithmetic_crossover(&p1, &p2, rng.random::<f64>());
            children.push(c1);
            children.push(c2);
        }
        children.truncate(slots);
        while children.len() < slots {
            children.push(pop.members[selector.sample(&mut rng)].genes);
        }
        let children: Vec<Genes> =
            children.iter().map(|g| mutate(g, &config.bounds, config.mutation_prob, &mut rng)).collect();

        let mut members: Vec<Chromosome> = pop.members[..config.elite_count].to_vec();
        members.extend(evaluate_all(children));
        pop = Population { members };
    }

    let window = CONVERGENCE_WINDOW.min(history.len() - 1);
    let last = history[history.len() - 1];
    let gain = last - history[history.len() - 1 - window];
    let converged = gain <= CONVERGENCE_TOLERANCE * last.abs().max(1.0);

    Ok(GaResult {
        best,
        best_index_value: 1.0 / best.fitness,
        fitness_history: history,
        converged,
        seed: config.rng_seed,
    })
}

"""Real-coded genetic algorithm with an embedded simulated-annealing pass.

One generation does, in order:

1. proportional (roulette) selection on fitness ``1 / (1 + E)``,
2. arithmetic crossover on shuffled pairs and uniform mutation,
3. elitist retention of the best chromosome seen so far,
4. (GA-SA only) one Metropolis perturbation per chromosome, retention again,
   then geometric cooling ``t <- v * t``.

Training stops once the best objective is at most ``error_precision`` or
after ``max_iterations`` generations.

Randomness is split into substreams keyed by ``(seed, generation, stage,
index)`` so a run is reproducible regardless of how objective evaluation is
scheduled.
"""

import csv
import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import AnnealingError, ConfigError, DataError, NumericalError, ParameterError
from .network import DEFAULT_SIGMA_MIN, PopulationObjective, decode, fitness

__all__ = [
    "GeneBounds",
    "Chromosome",
    "TrainerConfig",
    "AnnealState",
    "TraceRecord",
    "TrainingTrace",
    "init_population",
    "selection_probabilities",
    "select",
    "crossover",
    "mutate",
    "elitist_retain",
    "sa_propose",
    "acceptance_probability",
    "metropolis_accept",
    "sa_step",
    "anneal",
    "initial_temperature",
    "train",
]

logger = logging.getLogger(__name__)

TEMPERATURE_FLOOR = 1e-12
TRACE_HEADER = ["generation", "best_E", "mean_E", "best_fitness", "temperature", "sa_accepts"]

# substream stage tags
_INIT, _SELECT, _CROSS, _MUTATE, _SA = range(5)


def substream(seed, generation, stage, index=0):
    """Independent generator for one (generation, stage, index) slot."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(generation, stage, index)))


@dataclass(frozen=True, eq=False)
class GeneBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        hi = np.asarray(self.upper, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape:
            raise ConfigError("lower and upper bounds differ in length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigError("gene bounds must be finite")
        if np.any(lo >= hi):
            bad = int(np.flatnonzero(lo >= hi)[0])
            raise ConfigError(f"gene {bad}: need min < max, got ({lo[bad]}, {hi[bad]})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def uniform(cls, lo, hi, size):
        return cls(np.full(size, float(lo)), np.full(size, float(hi)))

    def __len__(self):
        return self.lower.size

    @property
    def span(self):
        return self.upper - self.lower

    def clip(self, genes):
        return np.clip(genes, self.lower, self.upper)

    def contains(self, genes):
        return bool(np.all((genes >= self.lower) & (genes <= self.upper)))


@dataclass(eq=False)
class Chromosome:
    genes: np.ndarray
    E: float = None  # cached objective; None means stale

    @property
    def fitness(self):
        return fitness(self.E)

    def copy(self):
        return Chromosome(self.genes.copy(), self.E)


@dataclass
class TrainerConfig:
    population_size: int = 25
    max_iterations: int = 1000
    error_precision: float = 0.03
    crossover_probability: float = 0.8
    mutation_probability: float = 0.05
    crossover_mixing: object = "sample-per-pair"  # or a float in (0, 1)
    initial_temperature: object = "adaptive"  # or a float > 0
    annealing_rate: float = 0.95
    sa_perturbation_mode: str = "one-gene"
    rng_seed: int = 0
    sigma_min_factor: float = 1e-3
    threshold: float = 0.5
    w_max: float = 2.0
    mode: str = "ga_sa"
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ConfigError("population_size must be an integer >= 2")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigError("max_iterations must be an integer >= 1")
        if not self.error_precision >= 0:
            raise ConfigError("error_precision must be >= 0")
        for name in ("crossover_probability", "mutation_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        a = self.crossover_mixing
        if a != "sample-per-pair" and not (isinstance(a, (int, float)) and 0.0 < a < 1.0):
            raise ConfigError("crossover_mixing must be 'sample-per-pair' or a number in (0, 1)")
        t = self.initial_temperature
        if t != "adaptive" and not (isinstance(t, (int, float)) and t > 0):
            raise ConfigError("initial_temperature must be 'adaptive' or a positive number")
        if not 0.0 < self.annealing_rate < 1.0:
            raise ConfigError("annealing_rate must lie in (0, 1)")
        if self.sa_perturbation_mode not in ("all-genes", "one-gene"):
            raise ConfigError("sa_perturbation_mode must be 'all-genes' or 'one-gene'")
        if self.mode not in ("ga_sa", "ga_only"):
            raise ConfigError("mode must be 'ga_sa' or 'ga_only'")
        if not self.sigma_min_factor > 0:
            raise ConfigError("sigma_min_factor must be positive")
        if not self.w_max > 0:
            raise ConfigError("w_max must be positive")
        if not math.isfinite(self.threshold):
            raise ConfigError("threshold must be finite")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers must be a positive integer")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown trainer settings: {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_dict(self):
        return asdict(self)


@dataclass
class AnnealState:
    k: int
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise AnnealingError(f"temperature must be positive, got {self.t}")


@dataclass(frozen=True)
class TraceRecord:
    generation: int
    best_E: float
    mean_E: float
    best_fitness: float
    temperature: float
    sa_accepts: int


@dataclass
class TrainingTrace:
    records: list = field(default_factory=list)
    best_genes: np.ndarray = None
    converged: bool = False
    mode: str = "ga_sa"
    seed: int = None

    def __len__(self):
        return len(self.records)

    @property
    def best_E(self):
        return [r.best_E for r in self.records]

    @property
    def final_best_E(self):
        return self.records[-1].best_E

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for r in self.records:
                writer.writerow([
                    r.generation, repr(r.best_E), repr(r.mean_E), repr(r.best_fitness),
                    repr(r.temperature), r.sa_accepts,
                ])

    @classmethod
    def read_csv(cls, path):
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise DataError(f"{path}: {exc.strerror or exc}") from None
        if not rows or [h.strip() for h in rows[0]] != TRACE_HEADER:
            raise DataError(f"{path}: not a training trace (header must be {','.join(TRACE_HEADER)})")
        records = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(TRACE_HEADER):
                raise DataError(f"{path}:{lineno}: expected {len(TRACE_HEADER)} fields")
            try:
                records.append(TraceRecord(
                    int(row[0]), float(row[1]), float(row[2]), float(row[3]),
                    float(row[4]), int(row[5]),
                ))
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed trace record") from None
        if not records:
            raise DataError(f"{path}: trace has no records")
        return cls(records=records)


# --- operators ---------------------------------------------------------------


def _evaluate(population, objective, generation=None):
    stale = [c for c in population if c.E is None]
    if not stale:
        return
    values = objective.evaluate(np.stack([c.genes for c in stale]))
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"non-finite objective at generation {generation}", generation=generation)
    for c, v in zip(stale, values):
        c.E = float(v)


def init_population(bounds, N, rng, objective=None):
    """``N`` chromosomes drawn uniformly inside ``bounds``."""
    if N < 2:
        raise ConfigError("population size must be at least 2")
    genes = rng.uniform(bounds.lower, bounds.upper, size=(N, len(bounds)))
    population = [Chromosome(g) for g in genes]
    if objective is not None:
        _evaluate(population, objective, generation=0)
    return population


def selection_probabilities(population):
    f = np.array([c.fitness for c in population])
    return f / f.sum()


def select(population, rng):
    """Roulette-wheel selection with replacement; returns copies."""
    if not population:
        raise RuntimeError("cannot select from an empty population")
    p = selection_probabilities(population)
    picks = rng.choice(len(population), size=len(population), p=p)
    return [population[i].copy() for i in picks]


def crossover(x1, x2, a, p_c, rng, bounds=None):
    """Arithmetic crossover ``(a*x1 + (1-a)*x2, (1-a)*x1 + a*x2)``.

    ``a=None`` draws a fresh mixing value in (0, 1). Fires with probability
    ``p_c``; otherwise copies of the parents come back.
    """
    if x1.genes.shape != x2.genes.shape:
        raise RuntimeError("parents differ in chromosome length")
    if not rng.random() < p_c:
        return x1.copy(), x2.copy()
    if a is None:
        a = rng.random()
        while a == 0.0:
            a = rng.random()
    elif not 0.0 < a < 1.0:
        raise ParameterError(f"mixing parameter must lie in (0, 1), got {a}")
    g1 = a * x1.genes + (1.0 - a) * x2.genes
    g2 = (1.0 - a) * x1.genes + a * x2.genes
    if bounds is not None:
        # rounding can push a convex combination one ulp past a bound
        g1, g2 = bounds.clip(g1), bounds.clip(g2)
    return Chromosome(g1), Chromosome(g2)


def mutate(x, bounds, p_m, rng):
    """Uniform mutation: each gene redrawn inside its bounds with probability ``p_m``."""
    hit = rng.random(len(bounds)) < p_m
    fresh = rng.uniform(bounds.lower, bounds.upper)
    if not hit.any():
        return x
    return Chromosome(np.where(hit, fresh, x.genes))


def elitist_retain(population, best):
    """Put a copy of ``best`` over the worst member unless something matches it."""
    energies = [c.E for c in population]
    if min(energies) <= best.E:
        return population
    worst = int(np.argmax(energies))
    out = list(population)
    out[worst] = best.copy()
    return out


def sa_propose(x, bounds, mode, rng):
    """Candidate genes: uniform disturbance of up to a tenth of each gene's span."""
    genes = x.genes.copy()
    if mode == "all-genes":
        beta = rng.uniform(-bounds.span / 10.0, bounds.span / 10.0)
        genes += beta
    elif mode == "one-gene":
        i = rng.integers(len(bounds))
        genes[i] += rng.uniform(-bounds.span[i] / 10.0, bounds.span[i] / 10.0)
    else:
        raise ConfigError(f"unknown perturbation mode {mode!r}")
    return bounds.clip(genes)


def acceptance_probability(delta, t):
    if not t > 0:
        raise AnnealingError(f"temperature must be positive, got {t}")
    if delta <= 0:
        return 1.0
    return math.exp(-delta / t)


def metropolis_accept(delta, t, rng):
    """Accept when ``min(1, exp(-delta/t))`` exceeds a fresh uniform draw."""
    return acceptance_probability(delta, t) > rng.random()


def sa_step(x, bounds, t_k, mode, rng, objective):
    """One Metropolis move of chromosome ``x`` at temperature ``t_k``."""
    if not t_k > 0:
        raise AnnealingError(f"temperature must be positive, got {t_k}")
    candidate = Chromosome(sa_propose(x, bounds, mode, rng))
    candidate.E = float(objective(candidate.genes))
    if metropolis_accept(candidate.E - x.E, t_k, rng):
        return candidate
    return x


def anneal(state, v):
    if not 0.0 < v < 1.0:
        raise ConfigError(f"annealing rate must lie in (0, 1), got {v}")
    return AnnealState(state.k + 1, max(v * state.t, TEMPERATURE_FLOOR))


def initial_temperature(config, best_initial_E):
    if config.initial_temperature == "adaptive":
        return max(best_initial_E, 1.0)
    return float(config.initial_temperature)


# --- training loop -------------------------------------------------------------


def _best(population):
    return min(population, key=lambda c: c.E)


def train(shape, samples, bounds, config, objective=None, sigma_min=DEFAULT_SIGMA_MIN, callback=None):
    """Fit network parameters with GA-SA (or plain GA when ``config.mode == 'ga_only'``).

    Returns
    -------
    params : NetworkParams
        Decoded best chromosome.
    trace : TrainingTrace
        One record per executed generation.
    """
    if len(bounds) != shape.gene_count():
        raise ConfigError(
            f"bounds cover {len(bounds)} genes, network needs {shape.gene_count()}"
        )
    if objective is None:
        objective = PopulationObjective(samples, shape, sigma_min=sigma_min, workers=config.workers)
    seed = config.rng_seed
    N = config.population_size
    mixing = None if config.crossover_mixing == "sample-per-pair" else float(config.crossover_mixing)
    use_sa = config.mode == "ga_sa"

    population = init_population(bounds, N, substream(seed, 0, _INIT), objective)
    best = _best(population).copy()
    state = AnnealState(1, initial_temperature(config, best.E)) if use_sa else None
    trace = TrainingTrace(mode=config.mode, seed=seed)

    for gen in range(1, config.max_iterations + 1):
        # selection, crossover on shuffled pairs, mutation
        sel_rng = substream(seed, gen, _SELECT)
        selected = select(population, sel_rng)
        order = sel_rng.permutation(N)
        selected = [selected[i] for i in order]
        offspring = []
        for p in range(N // 2):
            c1, c2 = crossover(
                selected[2 * p], selected[2 * p + 1], mixing,
                config.crossover_probability, substream(seed, gen, _CROSS, p), bounds,
            )
            offspring += [c1, c2]
        if N % 2:
            offspring.append(selected[-1])
        offspring = [
            mutate(c, bounds, config.mutation_probability, substream(seed, gen, _MUTATE, i))
            for i, c in enumerate(offspring)
        ]
        _evaluate(offspring, objective, gen)
        population = elitist_retain(offspring, best)
        best = _best(population).copy()

        accepts = 0
        temperature = 0.0
        if use_sa:
            temperature = state.t
            rngs = [substream(seed, gen, _SA, i) for i in range(N)]
            candidates = [
                Chromosome(sa_propose(c, bounds, config.sa_perturbation_mode, r))
                for c, r in zip(population, rngs)
            ]
            _evaluate(candidates, objective, gen)
            moved = []
            for c, cand, r in zip(population, candidates, rngs):
                if metropolis_accept(cand.E - c.E, temperature, r):
                    moved.append(cand)
                    accepts += 1
                else:
                    moved.append(c)
            population = elitist_retain(moved, best)
            best = _best(population).copy()
            state = anneal(state, config.annealing_rate)

        energies = np.array([c.E for c in population])
        record = TraceRecord(
            generation=gen,
            best_E=best.E,
            mean_E=float(energies.mean()),
            best_fitness=best.fitness,
            temperature=temperature,
            sa_accepts=accepts,
        )
        trace.records.append(record)
        if callback is not None:
            callback(record)
        if best.E <= config.error_precision:
            trace.converged = True
            break

    logger.info(
        "%s finished after %d generations, best E %.6g", config.mode, len(trace), best.E
    )
    trace.best_genes = best.genes.copy()
    return decode(best.genes, shape, sigma_min=sigma_min), trace

"""Monte Carlo realization of the Hebbian-Hopfield network.

Patterns are iid +-1 Bernoulli, scaled by 1/sqrt(n) onto the Hamming
sphere; the coupling is the scaled sum of outer products, so the energy of
a state x is -x' G x = -sum_i (x' g_i)^2.  Retrieval runs the sequential
sign dynamics with the diagonal excluded; a flip at site i updates the
cached field vector in O(n), and energy never increases along accepted
flips (ties keep the previous state, which is what makes that monotonicity
exact).  All randomness derives from explicit integer seeds; per-trial
streams are spawned deterministically from the master seed, so results do
not depend on execution order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from .errors import DomainError

__all__ = ["PatternSet", "CouplingMatrix", "DynamicsConfig", "TrialStats",
           "ExperimentStats", "generate_patterns", "hebbian_coupling",
           "energy", "run_dynamics", "retrieval_experiment", "exact_xi_oracle"]

MAX_PATTERN_CELLS = 10 ** 9
MAX_ORACLE_N = 24


@dataclass(frozen=True)
class PatternSet:
    n: int
    m: int
    bits: np.ndarray          # (m, n) of +-1
    scale: float              # 1/sqrt(n)

    def pattern(self, i: int) -> np.ndarray:
        """The i-th stored pattern as a unit-norm state vector."""
        return self.bits[i] * self.scale


@dataclass(frozen=True)
class CouplingMatrix:
    n: int
    entries: np.ndarray       # symmetric (n, n)


@dataclass(frozen=True)
class DynamicsConfig:
    update_order: Literal["cyclic", "random-permutation"] = "cyclic"
    max_sweeps: int = 200
    seed: int = 0
    record_energy: bool = False

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise DomainError("max_sweeps must be >= 1")
        if self.update_order not in ("cyclic", "random-permutation"):
            raise DomainError(f"unknown update order {self.update_order!r}")


@dataclass(frozen=True)
class TrialStats:
    final_overlap: float
    sweeps_used: int
    converged: bool
    final_energy: float
    flips: int
    energy_trace: np.ndarray | None = None
    final_state: np.ndarray | None = None


@dataclass(frozen=True)
class ExperimentStats:
    n: int
    m: int
    alpha: float
    flip_frac: float
    trials: int
    seed: int
    delta_tol: float
    mean_overlap: float
    median_overlap: float
    retrieval_fraction: float
    mean_sweeps: float
    converged_fraction: float
    per_trial: tuple[TrialStats, ...]


def generate_patterns(n: int, m: int, seed: int) -> PatternSet:
    """m fair +-1 patterns of dimension n, deterministic in seed."""
    if n < 2 or m < 1:
        raise DomainError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    if n * m > MAX_PATTERN_CELLS:
        raise DomainError(f"pattern set of {n * m} cells exceeds the size guard")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    bits = rng.integers(0, 2, size=(m, n), dtype=np.int8) * 2 - 1
    return PatternSet(n=n, m=m, bits=bits, scale=1.0 / math.sqrt(n))


def hebbian_coupling(ps: PatternSet) -> CouplingMatrix:
    """G = sum_i g_i g_i' for the scaled patterns; diagonal is m/n."""
    b = ps.bits.astype(np.float64)
    entries = (b.T @ b) / ps.n
    return CouplingMatrix(n=ps.n, entries=entries)


def energy(x: np.ndarray, cm: CouplingMatrix) -> float:
    """H(x) = -x' G x for a scaled state x."""
    return float(-x @ cm.entries @ x)


def run_dynamics(cm: CouplingMatrix, x0: np.ndarray,
                 cfg: DynamicsConfig = DynamicsConfig(),
                 reference: np.ndarray | None = None) -> TrialStats:
    """Sequential sign dynamics from x0 until a flip-free sweep.

    ``reference`` (default: x0) defines the reported overlap.  The local
    field excludes the diagonal; sign(0) keeps the current value.
    """
    n = cm.n
    x = np.array(x0, dtype=np.float64)
    ref = np.array(reference if reference is not None else x0, dtype=np.float64)
    g = cm.entries
    diag = np.diag(g).copy()
    field = g @ x                      # refreshed incrementally per flip
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    trace = [energy(x, cm)] if cfg.record_energy else None
    flips = 0
    sweeps = 0
    for sweep in range(cfg.max_sweeps):
        sweeps = sweep + 1
        if cfg.update_order == "random-permutation":
            order = rng.permutation(n)
        else:
            order = range(n)
        flipped = False
        for i in order:
            local = field[i] - diag[i] * x[i]
            if local == 0.0:
                continue               # tie: keep the previous state
            new = abs(x[i]) * (1.0 if local > 0 else -1.0)
            if new != x[i]:
                delta = new - x[i]
                field += g[:, i] * delta
                x[i] = new
                flips += 1
                flipped = True
                if trace is not None:
                    trace.append(energy(x, cm))
        if not flipped:
            break
    stable = bool(np.all((field - diag * x) * x >= 0.0))
    n_scale = float(np.dot(x, x))      # = 1 for Hamming-sphere states
    overlap = float(np.dot(x, ref) / max(n_scale, 1e-300))
    return TrialStats(final_overlap=overlap, sweeps_used=sweeps,
                      converged=stable, final_energy=energy(x, cm),
                      flips=flips,
                      energy_trace=np.array(trace) if trace is not None else None,
                      final_state=x)


def _single_trial(n: int, m: int, flip_frac: float, trial_seed,
                  max_sweeps: int, update_order: str) -> TrialStats:
    rng = np.random.Generator(np.random.PCG64(trial_seed))
    pat_seed, dyn_seed, flip_seed = rng.integers(0, 2 ** 63 - 1, size=3)
    ps = generate_patterns(n, m, int(pat_seed))
    cm = hebbian_coupling(ps)
    target = ps.pattern(0)
    x0 = target.copy()
    k = round(flip_frac * n)
    if k > 0:
        flip_rng = np.random.Generator(np.random.PCG64(int(flip_seed)))
        idx = flip_rng.choice(n, size=k, replace=False)
        x0[idx] = -x0[idx]
    cfg = DynamicsConfig(update_order=update_order, max_sweeps=max_sweeps,
                         seed=int(dyn_seed))
    stats = run_dynamics(cm, x0, cfg, reference=target)
    return TrialStats(final_overlap=stats.final_overlap,
                      sweeps_used=stats.sweeps_used, converged=stats.converged,
                      final_energy=stats.final_energy, flips=stats.flips)


def retrieval_experiment(n: int, alpha: float, flip_frac: float, trials: int,
                         seed: int, delta_tol: float = 0.02,
                         max_sweeps: int = 200,
                         update_order: str = "cyclic",
                         max_workers: int | None = None) -> ExperimentStats:
    """Fresh-instance retrieval trials started from a corrupted pattern.

    Retrieval counts as final overlap >= 1 - 2 delta_tol.  Trials draw
    their seeds from SeedSequence(seed).spawn, so any execution schedule
    (including the thread pool) yields identical results.
    """
    m = round(alpha * n)
    if m < 1:
        raise DomainError(f"alpha n = {alpha * n:.2f} rounds below one pattern")
    if not 0.0 <= flip_frac < 0.5:
        raise DomainError("flip_frac must be in [0, 1/2)")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(trials)

    def run(child):
        return _single_trial(n, m, flip_frac, child, max_sweeps, update_order)

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, children))
    else:
        results = [run(child) for child in children]
    overlaps = np.array([t.final_overlap for t in results])
    return ExperimentStats(
        n=n, m=m, alpha=alpha, flip_frac=flip_frac, trials=trials, seed=seed,
        delta_tol=delta_tol,
        mean_overlap=float(overlaps.mean()),
        median_overlap=float(np.median(overlaps)),
        retrieval_fraction=float(np.mean(overlaps >= 1.0 - 2.0 * delta_tol)),
        mean_sweeps=float(np.mean([t.sweeps_used for t in results])),
        converged_fraction=float(np.mean([t.converged for t in results])),
        per_trial=tuple(results))


def exact_xi_oracle(n: int, m: int, k_flips: int, seed: int,
                    ensemble: Literal["gaussian", "pm1"] = "gaussian") -> float:
    """Exact max of |G x|_2 / sqrt(n) over all states at k_flips flips.

    Enumerates the C(n, k_flips) sign-flip patterns of the all-ones target;
    G has iid standard-normal rows by default ("pm1" draws +-1 entries for
    universality spot checks).
    """
    if n > MAX_ORACLE_N:
        raise DomainError(f"n = {n} exceeds the enumeration guard {MAX_ORACLE_N}")
    if not 0 <= k_flips <= n:
        raise DomainError("k_flips must lie in [0, n]")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    if ensemble == "gaussian":
        g = rng.standard_normal((m, n))
    elif ensemble == "pm1":
        g = rng.integers(0, 2, size=(m, n)).astype(np.float64) * 2 - 1
    else:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    base = g.sum(axis=1)               # G x for x = 1/sqrt(n) absorbed later
    best = -math.inf
    for subset in combinations(range(n), k_flips):
        v = base - 2.0 * g[:, list(subset)].sum(axis=1)
        best = max(best, float(v @ v))
    return math.sqrt(best) / n         # |G x|/sqrt(n) with x entries 1/sqrt(n)

"""Uniform-epoch Monte Carlo ensembles of trajectory E1.

Every sample is one particle whose +x epoch tau is drawn uniformly over a
full cycle of its own microstate; the impulse time gamma is held fixed.

Random numbers come in fixed-size blocks, each with its own stream keyed by
(microstate index, block index). Results therefore do not depend on how
blocks are spread over threads, and the pooled mean and variance are
accumulated with exactly rounded sums.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import NumericalError, ValidationError
from .kinematics import TrajectoryClock, is_monotone
from .model import ImpulseSpec, Microstate, WellModel, check_impulse
from .perturbation import CASE_ORDER, Variant, copenhagen_e1, trajectory_e1_batch

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class SamplerParams:
    a_min: float = 0.2
    a_max: float = 5.0
    rho: float = 0.95
    # reject draws whose equation of motion is not monotone on a sheet
    require_monotone: bool = True
    max_tries: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.a_min <= self.a_max:
            raise ValidationError("a_min/a_max", f"need 0 < a_min <= a_max, got {self.a_min}, {self.a_max}")
        if not 0.0 <= self.rho < 1.0:
            raise ValidationError("rho", f"need 0 <= rho < 1, got {self.rho}")


def sample_microstate(rng: np.random.Generator, params: SamplerParams = SamplerParams()) -> Microstate:
    """b = 1, log-uniform a, c uniform within rho times the discriminant bound."""
    for _ in range(params.max_tries):
        a = math.exp(rng.uniform(math.log(params.a_min), math.log(params.a_max)))
        half_width = 2.0 * math.sqrt(a) * params.rho
        c = rng.uniform(-half_width, half_width) if half_width > 0.0 else 0.0
        ms = Microstate(a, 1.0, c)
        if not params.require_monotone or is_monotone(ms):
            return ms
    raise NumericalError(f"no monotone microstate in {params.max_tries} draws from {params}")


@dataclass(frozen=True)
class FixedSource:
    ms: Microstate


@dataclass(frozen=True)
class RandomSetSource:
    seed: int
    count: int
    params: SamplerParams = SamplerParams()

    def draw(self) -> list[Microstate]:
        rng = np.random.default_rng(np.random.SeedSequence(self.seed))
        return [sample_microstate(rng, self.params) for _ in range(self.count)]


MicrostateSource = Union[FixedSource, RandomSetSource]


@dataclass(frozen=True)
class EnsembleSpec:
    n_samples: int
    impulse: ImpulseSpec
    microstate_source: MicrostateSource
    rng_seed: int = 0
    tau_distribution: str = "uniform_over_cycle"
    on_error: str = "abort"

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise ValidationError("n_samples", f"must be >= 1, got {self.n_samples}")
        if self.rng_seed < 0:
            raise ValidationError("rng_seed", f"must be unsigned, got {self.rng_seed}")
        if self.tau_distribution != "uniform_over_cycle":
            raise ValidationError("tau_distribution", f"unsupported: {self.tau_distribution!r}")
        if self.on_error not in ("abort", "skip"):
            raise ValidationError("on_error", f"must be 'abort' or 'skip', got {self.on_error!r}")
        if isinstance(self.microstate_source, RandomSetSource) and self.microstate_source.count < 1:
            raise ValidationError("count", "random microstate set must be non-empty")


@dataclass
class SubEnsemble:
    ms: Microstate
    n: int
    mean_e1: float


@dataclass
class EnsembleReport:
    mean_e1: float
    stderr_e1: float
    case_histogram: dict
    copenhagen_e1_original: float
    copenhagen_e1_errata: float
    n: int
    sub_ensembles: list = field(default_factory=list)
    n_skipped: int = 0
    # per-sample arrays, only when requested
    samples: dict | None = None


def _block_plan(counts: list[int]) -> list[tuple[int, int, int]]:
    plan = []
    for j, n_j in enumerate(counts):
        for blk, start in enumerate(range(0, n_j, BLOCK_SIZE)):
            plan.append((j, blk, min(BLOCK_SIZE, n_j - start)))
    return plan


def _split(n: int, count: int) -> list[int]:
    base, extra = divmod(n, count)
    return [base + (1 if j < extra else 0) for j in range(count)]


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("QHJ_IMPULSE_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValidationError("threads", f"must be >= 1, got {threads}")
    return threads


def run_ensemble(spec: EnsembleSpec, well: WellModel, threads: int | None = None, keep_samples: bool = False) -> EnsembleReport:
    check_impulse(well, spec.impulse)
    threads = resolve_threads(threads)
    source = spec.microstate_source
    microstates = [source.ms] if isinstance(source, FixedSource) else source.draw()
    counts = _split(int(spec.n_samples), len(microstates))
    plan = [p for p in _block_plan(counts)]

    def work(item):
        j, blk, size = item
        ms = microstates[j]
        ss = np.random.SeedSequence(spec.rng_seed, spawn_key=(j, blk))
        rng = np.random.Generator(np.random.PCG64(ss))
        period = TrajectoryClock(ms, well).t_period
        tau = rng.random(size) * period
        try:
            e1, codes = trajectory_e1_batch(well, ms, spec.impulse, tau)
            ok = np.ones(size, dtype=bool)
        except NumericalError as exc:
            if spec.on_error == "abort":
                first = sum(counts[:j]) + blk * BLOCK_SIZE
                raise type(exc)(f"{exc} [microstate {j} {ms.as_tuple()}, samples {first}..{first + size - 1}]") from exc
            e1, codes, ok = _per_sample(well, ms, spec.impulse, tau)
        return j, tau, e1, codes, ok

    if threads == 1 or len(plan) == 1:
        results = [work(item) for item in plan]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, plan))

    e1_all = np.concatenate([r[2][r[4]] for r in results])
    codes_all = np.concatenate([r[3][r[4]] for r in results])
    n = int(e1_all.size)
    n_skipped = int(sum(int((~r[4]).sum()) for r in results))
    if n == 0:
        raise NumericalError("every sample was skipped")
    mean = math.fsum(e1_all) / n
    var = math.fsum((e1_all - mean) ** 2) / (n - 1) if n > 1 else 0.0
    hist_counts = np.bincount(codes_all, minlength=len(CASE_ORDER))
    histogram = {case.value: int(hist_counts[i]) for i, case in enumerate(CASE_ORDER)}

    subs = []
    for j, ms in enumerate(microstates):
        vals = [r[2][r[4]] for r in results if r[0] == j]
        arr = np.concatenate(vals) if vals else np.empty(0)
        subs.append(SubEnsemble(ms, int(arr.size), math.fsum(arr) / arr.size if arr.size else float("nan")))

    samples = None
    if keep_samples:
        samples = {
            "microstate": np.concatenate([np.full(int(r[4].sum()), r[0]) for r in results]),
            "tau": np.concatenate([r[1][r[4]] for r in results]),
            "e1": e1_all,
            "case": np.array([CASE_ORDER[c].value for c in codes_all], dtype=object),
        }

    return EnsembleReport(
        mean_e1=mean,
        stderr_e1=math.sqrt(var / n),
        case_histogram=histogram,
        copenhagen_e1_original=copenhagen_e1(well, spec.impulse, Variant.ORIGINAL).e1,
        copenhagen_e1_errata=copenhagen_e1(well, spec.impulse, Variant.ERRATA).e1,
        n=n,
        sub_ensembles=subs,
        n_skipped=n_skipped,
        samples=samples,
    )


def _per_sample(well, ms, impulse, tau):
    e1 = np.zeros(tau.size)
    codes = np.zeros(tau.size, dtype=np.int64)
    ok = np.ones(tau.size, dtype=bool)
    for i, t in enumerate(tau):
        try:
            v, c = trajectory_e1_batch(well, ms, impulse, np.array([t]))
            e1[i], codes[i] = v[0], c[0]
        except NumericalError:
            ok[i] = False
    return e1, codes, ok

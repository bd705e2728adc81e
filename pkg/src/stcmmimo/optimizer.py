"""Interval-refinement search for the antenna count minimizing average BER
under a fixed array aperture.

All candidates reuse the same master seed (common random numbers), so the
Monte-Carlo objective comparisons are far less noisy and the whole search
is reproducible from the SearchSpec alone.
"""

import csv
import math
from dataclasses import dataclass, field

from .coupling import DipoleArraySpec
from .channel import SubArrayStyle
from .modulation import ModulationScheme
from .simulator import DEFAULT_TRIALS, SimConfig, simulate_ber


@dataclass(frozen=True)
class SearchSpec:
    """Inputs of the antenna-count search."""

    interval: tuple[int, int]  # (n_1, n_m), candidate counts stay inside
    step: int
    total_length: float  # aperture in wavelengths; spacing = total_length / M
    snr_db_list: tuple
    n_trials: int = DEFAULT_TRIALS
    n_users: int = 1
    master_seed: int = 0
    coupling_enabled: bool = True
    style: SubArrayStyle = SubArrayStyle.CONTIGUOUS
    scheme: ModulationScheme = field(default_factory=ModulationScheme.qpsk)
    antenna_impedance: complex = 73.0 + 42.0j
    load_impedance: complex = 73.0 - 42.0j
    combiner: str = "nominal"

    def __post_init__(self):
        n1, nm = self.interval
        if not (2 <= n1 < nm):
            raise ValueError(f"interval must satisfy 2 <= n_1 < n_m, got {self.interval}")
        if self.step < 2:
            raise ValueError(f"step must be >= 2, got {self.step}")
        if self.total_length <= 0:
            raise ValueError(f"total_length must be > 0, got {self.total_length}")
        object.__setattr__(self, "snr_db_list", tuple(float(s) for s in self.snr_db_list))
        if len(self.snr_db_list) == 0:
            raise ValueError("snr_db_list must be nonempty")

    def sim_config(self, element_count: int) -> SimConfig:
        array = DipoleArraySpec(
            element_count=element_count,
            spacing=self.total_length / element_count,
            antenna_impedance=self.antenna_impedance,
            load_impedance=self.load_impedance,
        )
        return SimConfig(
            array=array,
            snr_db_list=self.snr_db_list,
            coupling_enabled=self.coupling_enabled,
            style=self.style,
            scheme=self.scheme,
            n_trials=self.n_trials,
            n_users=self.n_users,
            master_seed=self.master_seed,
            combiner=self.combiner,
        )


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    candidate_m: int
    spacing_wavelengths: float
    avg_ber: float
    per_snr_ber: tuple


@dataclass(frozen=True)
class SearchTrace:
    entries: tuple
    optimum: int
    iteration_count: int

    def objective(self, candidate_m: int) -> float:
        for e in self.entries:
            if e.candidate_m == candidate_m:
                return e.avg_ber
        raise KeyError(f"candidate {candidate_m} was never evaluated")


TRACE_CSV_HEADER = ["iteration", "candidate_m", "spacing_wavelengths", "avg_ber"]


def write_trace_csv(trace: SearchTrace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_CSV_HEADER)
        for e in trace.entries:
            writer.writerow(
                [e.iteration, e.candidate_m, repr(e.spacing_wavelengths), repr(e.avg_ber)]
            )


def candidate_objective(element_count: int, spec: SearchSpec, workers: int = 1) -> float:
    """Mean per-SNR BER of one candidate count at the shared seed."""
    result = simulate_ber(spec.sim_config(element_count), workers=workers)
    return sum(p.ber for p in result.points) / len(result.points)


def initial_candidates(spec: SearchSpec) -> list[int]:
    """Even sweep counts 2*ceil((n_1 + k*step)/2) inside the interval."""
    n1, nm = spec.interval
    out = []
    k = 0
    while True:
        cand = 2 * math.ceil((n1 + k * spec.step) / 2)
        if cand > nm:
            break
        if cand >= n1 and (not out or cand != out[-1]):
            out.append(cand)
        k += 1
    return out


def _even_ceil_mid(a: int, b: int) -> int:
    return 2 * math.ceil((a + b) / 4)


def optimal_antenna_count(spec: SearchSpec, workers: int = 1) -> tuple[int, SearchTrace]:
    """Run the refinement search, returning (optimum, trace).

    Sweep the interval at the given step, take the argmin of the average
    BER (ties to the smaller count), then repeatedly insert the even
    midpoints toward both neighbors and re-take the argmin, until the
    argmin's neighbor gaps are both <= 2. Missing neighbors at the
    interval boundary are the endpoints themselves.
    """
    n1, nm = spec.interval
    candidates = initial_candidates(spec)
    if not candidates:
        raise ValueError(
            f"no even candidate counts in interval {spec.interval} with step {spec.step}"
        )

    entries: list[TraceEntry] = []
    objective: dict[int, float] = {}
    iteration = 0

    def evaluate(ms):
        nonlocal iteration
        for m in ms:
            if m in objective:
                continue
            result = simulate_ber(spec.sim_config(m), workers=workers)
            bers = tuple(p.ber for p in result.points)
            avg = sum(bers) / len(bers)
            objective[m] = avg
            entries.append(
                TraceEntry(
                    iteration=iteration,
                    candidate_m=m,
                    spacing_wavelengths=spec.total_length / m,
                    avg_ber=avg,
                    per_snr_ber=bers,
                )
            )
            iteration += 1

    def argmin() -> int:
        return min(objective, key=lambda m: (objective[m], m))

    def neighbors(m: int) -> tuple[int, int]:
        evaluated = sorted(objective)
        i = evaluated.index(m)
        left = evaluated[i - 1] if i > 0 else n1
        right = evaluated[i + 1] if i + 1 < len(evaluated) else nm
        return left, right

    evaluate(candidates)
    best = argmin()
    left, right = neighbors(best)
    while min(best - left, right - best) > 2:
        evaluate([_even_ceil_mid(left, best), _even_ceil_mid(best, right)])
        best = argmin()
        left, right = neighbors(best)

    trace = SearchTrace(entries=tuple(entries), optimum=best, iteration_count=iteration)
    return best, trace

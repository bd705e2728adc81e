"""Monte-Carlo BER engine.

Every trial owns a counter-based Philox substream keyed by
(master_seed, snr_index, trial_index), so results are bit-identical for any
worker count and any way of splitting the trial range. Workers exchange
exact integer error counts, never floating-point partial BERs.
"""

import csv
import functools
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import SubArrayAssignment, SubArrayStyle, draw_channel
from .coupling import CouplingMatrix, DipoleArraySpec, coupling_matrix
from .modulation import ModulationScheme

DEFAULT_TRIALS = 20000
_CHUNK = 4096  # trials per work unit; fixed so results never depend on workers
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimConfig:
    """One full BER experiment description."""

    array: DipoleArraySpec
    snr_db_list: tuple
    coupling_enabled: bool = True
    style: SubArrayStyle = SubArrayStyle.CONTIGUOUS
    scheme: ModulationScheme = field(default_factory=ModulationScheme.qpsk)
    n_trials: int = DEFAULT_TRIALS
    n_users: int = 1
    master_seed: int = 0
    combiner: str = "nominal"  # "nominal" or "coupled" branch norms in Eq.-style combining

    def __post_init__(self):
        object.__setattr__(self, "snr_db_list", tuple(float(s) for s in self.snr_db_list))
        if len(self.snr_db_list) == 0:
            raise ValueError("snr_db_list must be nonempty")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.combiner not in ("nominal", "coupled"):
            raise ValueError(f"combiner must be 'nominal' or 'coupled', got {self.combiner!r}")
        if not (0 <= self.master_seed < 2**64):
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")

    def fingerprint(self) -> str:
        spec = self.array
        payload = {
            "m": spec.element_count,
            "d": spec.spacing,
            "l": spec.dipole_length,
            "za": [spec.antenna_impedance.real, spec.antenna_impedance.imag],
            "zl": [spec.load_impedance.real, spec.load_impedance.imag],
            "snr": list(self.snr_db_list),
            "coupling": self.coupling_enabled,
            "style": self.style.value,
            "scheme": self.scheme.name,
            "trials": self.n_trials,
            "users": self.n_users,
            "seed": self.master_seed,
            "combiner": self.combiner,
        }
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode())
        return digest.hexdigest()[:16]


@dataclass(frozen=True)
class SnrPoint:
    snr_db: float
    bit_errors: int
    bits_total: int
    ber: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class BerResult:
    points: tuple
    config_fingerprint: str
    duration_s: float

    def ber_at(self, snr_db: float) -> float:
        for p in self.points:
            if p.snr_db == snr_db:
                return p.ber
        raise KeyError(f"no result at snr_db={snr_db}")


def noise_variance(snr_db: float) -> float:
    """Receiver noise variance sigma^2 = 10^(-SNR/10) for unit symbol energy."""
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    return 10.0 ** (-snr_db / 10.0)


def ber_confidence(bit_errors: int, bits_total: int) -> tuple[float, float]:
    """95% Wilson score interval for the bit-error proportion."""
    if bits_total <= 0:
        raise ValueError("bits_total must be positive")
    n = float(bits_total)
    p = bit_errors / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    low = 0.0 if bit_errors == 0 else max(0.0, center - half)
    high = 1.0 if bit_errors == bits_total else min(1.0, center + half)
    return low, high


def trial_substream(master_seed: int, snr_index: int, trial_index: int) -> np.random.Generator:
    """The dedicated random substream of one Monte-Carlo trial."""
    key = np.array([master_seed, (snr_index << 32) | trial_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@functools.lru_cache(maxsize=32)
def _cached_coupling(spec: DipoleArraySpec) -> CouplingMatrix:
    return coupling_matrix(spec)


def _draw_trial_block(
    master_seed: int,
    snr_index: int,
    t0: int,
    t1: int,
    m: int,
    n_users: int,
    order: int,
    sigma2: float,
):
    """Channels, symbol labels, and noise for trials [t0, t1).

    Per-trial draw order (frozen reproducibility contract): one channel
    vector per user starting with the desired user, then the 2K symbol
    labels, then four noise normals. Noise normals are drawn even at
    sigma2 = 0 so the noiseless hook consumes the same stream.
    """
    count = t1 - t0
    channels = np.empty((count, n_users, m), dtype=np.complex128)
    labels = np.empty((count, 2 * n_users), dtype=np.int64)
    noise = np.empty((count, 2), dtype=np.complex128)
    amp = math.sqrt(sigma2 / 2.0)
    for i, t in enumerate(range(t0, t1)):
        rg = trial_substream(master_seed, snr_index, t)
        for u in range(n_users):
            channels[i, u] = draw_channel(rg, m)
        labels[i] = rg.integers(0, order, size=2 * n_users)
        z = rg.standard_normal(4)
        noise[i, 0] = amp * complex(z[0], z[1])
        noise[i, 1] = amp * complex(z[2], z[3])
    return channels, labels, noise


def _chunk_bit_errors(args) -> int:
    """Bit errors of the desired user over one fixed trial chunk (picklable)."""
    (
        master_seed,
        snr_index,
        t0,
        t1,
        m,
        n_users,
        points,
        sigma2,
        c_entries,
        idx0,
        idx1,
        use_coupled_gains,
    ) = args
    channels, labels, noise = _draw_trial_block(
        master_seed, snr_index, t0, t1, m, n_users, points.size, sigma2
    )
    h_phys = channels[:, 0, :]
    hhat = h_phys @ c_entries.T if c_entries is not None else h_phys
    n = m // 2
    h0 = np.ascontiguousarray(h_phys[:, idx0])
    h1 = np.ascontiguousarray(h_phys[:, idx1])
    hhat0 = np.ascontiguousarray(hhat[:, idx0])
    hhat1 = np.ascontiguousarray(hhat[:, idx1])
    if n_users > 1:
        w_interf = np.empty((t1 - t0, 2 * (n_users - 1), n), dtype=np.complex128)
        for u in range(1, n_users):
            w_interf[:, 2 * (u - 1)] = channels[:, u, :][:, idx0] / n
            w_interf[:, 2 * (u - 1) + 1] = channels[:, u, :][:, idx1] / n
    else:
        w_interf = np.empty((t1 - t0, 0, n), dtype=np.complex128)
    return kernels.count_bit_errors(
        h0, h1, hhat0, hhat1, w_interf, labels, noise, points, use_coupled_gains
    )


def simulate_ber(config: SimConfig, workers: int = 1) -> BerResult:
    """Per-SNR BER of the configured STCM-MIMO downlink.

    The coupling matrix is built once and shared across all trials; trials
    are processed in fixed-size chunks that may run in parallel.
    """
    t_start = time.perf_counter()
    spec = config.array
    m = spec.element_count
    assignment = SubArrayAssignment(config.style, m)
    idx0, idx1 = assignment.branch_indices()
    c_entries = _cached_coupling(spec).entries if config.coupling_enabled else None
    points = config.scheme.points
    use_coupled_gains = config.combiner == "coupled" and config.coupling_enabled

    tasks = []
    for snr_index, snr_db in enumerate(config.snr_db_list):
        sigma2 = noise_variance(snr_db)
        for t0 in range(0, config.n_trials, _CHUNK):
            t1 = min(t0 + _CHUNK, config.n_trials)
            tasks.append(
                (
                    snr_index,
                    (
                        config.master_seed,
                        snr_index,
                        t0,
                        t1,
                        m,
                        config.n_users,
                        points,
                        sigma2,
                        c_entries,
                        idx0,
                        idx1,
                        use_coupled_gains,
                    ),
                )
            )

    errors_by_snr = [0] * len(config.snr_db_list)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (snr_index, _), errs in zip(
                tasks, pool.map(_chunk_bit_errors, [a for _, a in tasks])
            ):
                errors_by_snr[snr_index] += errs
    else:
        for snr_index, args in tasks:
            errors_by_snr[snr_index] += _chunk_bit_errors(args)

    bits_total = config.n_trials * 2 * config.scheme.bits_per_symbol
    result_points = []
    for snr_index, snr_db in enumerate(config.snr_db_list):
        errs = errors_by_snr[snr_index]
        lo, hi = ber_confidence(errs, bits_total)
        result_points.append(
            SnrPoint(
                snr_db=snr_db,
                bit_errors=errs,
                bits_total=bits_total,
                ber=errs / bits_total,
                ci_low=lo,
                ci_high=hi,
            )
        )
    return BerResult(
        points=tuple(result_points),
        config_fingerprint=config.fingerprint(),
        duration_s=time.perf_counter() - t_start,
    )


RESULT_CSV_HEADER = ["snr_db", "ber", "bit_errors", "bits_total", "ci_low", "ci_high"]


def write_result_csv(result: BerResult, path) -> None:
    """Result CSV: one row per SNR point, UTF-8, LF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_CSV_HEADER)
        for p in result.points:
            writer.writerow(
                [
                    _fmt(p.snr_db),
                    repr(p.ber),
                    p.bit_errors,
                    p.bits_total,
                    repr(p.ci_low),
                    repr(p.ci_high),
                ]
            )


def _fmt(x: float) -> str:
    return repr(float(x))

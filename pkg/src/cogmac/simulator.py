"""Max-SINR scheduling and ergodic-capacity Monte-Carlo engine.

Each slot the user with the best instantaneous SINR transmits, with its
power inverting the interference channel so the peak constraint at the
primary receiver binds exactly.  Two modes: ``baseline`` (one conventional
antenna per user) and ``rab`` (per-slot random basis-pattern weights).

Reproducibility: trials are processed in fixed-size chunks, each drawing
from its own counter-derived Philox stream (``jumped`` from the master
seed), and chunk results are combined in index order.  Results are
therefore bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .channels import ChannelRealization, draw_los_phases, draw_slot
from .rab import RabWeights, draw_weights, transmit_power

__all__ = [
    "MODES",
    "GROWTH_LAWS",
    "NetworkConfig",
    "SlotOutcome",
    "CapacityEstimate",
    "SweepPoint",
    "SweepResult",
    "slot_sinr",
    "run_slot",
    "ergodic_capacity",
    "run_experiment",
    "sweep",
    "growth_flatness",
    "loglog_control_slope",
    "write_sweep_csv",
    "format_number",
    "SWEEP_CSV_COLUMNS",
]

MODES = ("baseline", "rab")
GROWTH_LAWS = ("logN", "loglogN", "none")
LOG2 = math.log(2.0)

# Elements per chunk array; a pure function of the config so chunk layout
# (and hence every drawn number) never depends on worker count.
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class NetworkConfig:
    """Full experiment parameterization."""

    n_users: int = 100
    m_patterns: int = 2
    k_factor: float = 0.0
    mean_secondary_power: float = 1.0       # secondary-link average power
    mean_interference_power: float = 1.0    # interference-link average power
    primary_power: float = 0.0              # primary transmit energy (0 disables)
    mean_ps_power: float = 1.0              # primary-to-secondary link power
    peak_interference: float = 1.0          # Q_p cap at the primary receiver
    trials: int = 100_000
    seed: int = 42
    mode: str = "rab"                       # "baseline" | "rab"
    log_base: str = "nats"                  # "nats" | "bits" (output only)
    max_power_cap: float | None = None      # optional transmit power clip

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.log_base not in ("nats", "bits"):
            raise ValueError(f"log_base must be 'nats' or 'bits', got {self.log_base!r}")
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.m_patterns < 1:
            raise ValueError(f"m_patterns must be >= 1, got {self.m_patterns}")
        if self.mode == "baseline" and self.m_patterns != 1:
            raise ValueError("baseline mode forces m_patterns = 1")
        if not math.isfinite(self.k_factor) or self.k_factor < 0.0:
            raise ValueError(f"k_factor must be finite and >= 0, got {self.k_factor}")
        for name in ("mean_secondary_power", "mean_interference_power", "peak_interference"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        for name in ("primary_power", "mean_ps_power"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.max_power_cap is not None and not self.max_power_cap > 0.0:
            raise ValueError(f"max_power_cap must be > 0 when set, got {self.max_power_cap}")


@dataclass
class SlotOutcome:
    """Result of one scheduled slot."""

    selected_user: int
    sinr: float
    capacity_nats: float
    interference_power_at_pu: float   # P_s * |h_eq|^2; should equal Q_p
    degenerate: bool = False          # all-zero / non-finite SINR slot


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo ergodic capacity with diagnostics (all in nats)."""

    mean_nats: float
    stderr_nats: float
    jensen_bound_nats: float
    trials: int


@dataclass
class SweepPoint:
    mode: str
    n_users: int
    m_patterns: int
    k_factor: float
    estimate: CapacityEstimate | None
    error: str | None = None


@dataclass
class SweepResult:
    """Grid of capacity estimates; ``partial`` marks per-point failures."""

    points: list
    partial: bool


def slot_sinr(
    realization: ChannelRealization,
    config: NetworkConfig,
    weights: list[RabWeights] | None = None,
) -> np.ndarray:
    """Per-user SINR of one slot.

    Baseline uses the raw per-user gains; RAB mode combines the per-pattern
    gains with each user's weights first.  The noise-plus-primary
    denominator is common to all users within the slot.
    """
    n, m = realization.secondary.shape
    if (config.n_users, config.m_patterns) != (n, m):
        raise ValueError("realization dimensions do not match config")
    if config.mode == "rab":
        if weights is None or len(weights) != n:
            raise ValueError("rab mode requires one RabWeights per user")
        w = np.stack([wt.as_complex() for wt in weights])
        gain_s = np.abs(np.sum(w * realization.secondary, axis=1)) ** 2
        gain_sp = np.abs(np.sum(w * realization.interference, axis=1)) ** 2
    else:
        if weights is not None:
            raise ValueError("baseline mode takes no weights")
        gain_s = np.abs(realization.secondary[:, 0]) ** 2
        gain_sp = np.abs(realization.interference[:, 0]) ** 2
    power = config.peak_interference / gain_sp
    if config.max_power_cap is not None:
        power = np.minimum(power, config.max_power_cap)
    denom = 1.0 + config.primary_power * realization.primary_to_secondary_power
    return gain_s * power / denom


def run_slot(
    config: NetworkConfig,
    rng: np.random.Generator,
    los_phases: np.ndarray | None = None,
) -> SlotOutcome:
    """Draw one slot, schedule the max-SINR user, and report its capacity."""
    if los_phases is None:
        los_phases = draw_los_phases(config.n_users, config.m_patterns, rng)
    realization = draw_slot(config, rng, los_phases)
    weights = None
    if config.mode == "rab":
        weights = [draw_weights(config.m_patterns, rng) for _ in range(config.n_users)]
    sinr = slot_sinr(realization, config, weights)
    selected = int(np.argmax(sinr))
    best = float(sinr[selected])
    if config.mode == "rab":
        h_eq = complex(np.sum(weights[selected].as_complex() * realization.interference[selected]))
    else:
        h_eq = complex(realization.interference[selected, 0])
    p_s = transmit_power(config.peak_interference, h_eq)
    if config.max_power_cap is not None:
        p_s = min(p_s, config.max_power_cap)
    at_pu = p_s * abs(h_eq) ** 2
    degenerate = not (math.isfinite(best) and best > 0.0)
    capacity = math.log1p(best) if math.isfinite(best) else math.inf
    return SlotOutcome(
        selected_user=selected,
        sinr=best,
        capacity_nats=capacity,
        interference_power_at_pu=at_pu,
        degenerate=degenerate,
    )


def _chunk_size(config: NetworkConfig) -> int:
    per_trial = max(1, config.n_users * config.m_patterns)
    return max(1, min(config.trials, _CHUNK_ELEMENTS // per_trial))


def _experiment_phases(config: NetworkConfig) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=config.seed))
    return draw_los_phases(config.n_users, config.m_patterns, rng)


def _chunk_rng(config: NetworkConfig, chunk_index: int) -> np.random.Generator:
    # jumped(0) is reserved for the frozen LoS phases.
    return np.random.Generator(np.random.Philox(key=config.seed).jumped(1 + chunk_index))


def _chunk_sums(config: NetworkConfig, size: int, rng, los_phases) -> tuple:
    """Simulate `size` independent slots; return per-chunk reduction sums.

    Fixed draw order: secondary normals, interference scattering normals,
    weight phases (rab), primary-to-secondary normals (if enabled).
    """
    n, m = config.n_users, config.m_patterns
    k = config.k_factor
    parts = rng.standard_normal((size, n, m, 2))
    h_s = math.sqrt(config.mean_secondary_power / 2.0) * (parts[..., 0] + 1j * parts[..., 1])
    parts = rng.standard_normal((size, n, m, 2))
    scat_scale = math.sqrt(config.mean_interference_power / (2.0 * (k + 1.0)))
    scattered = scat_scale * (parts[..., 0] + 1j * parts[..., 1])
    los_amp = math.sqrt(k * config.mean_interference_power / (k + 1.0))
    h_sp = los_amp * np.exp(1j * los_phases)[None, :, :] + scattered
    if config.mode == "rab":
        theta = rng.uniform(0.0, 2.0 * math.pi, size=(size, n, m))
        w = np.exp(1j * theta) / math.sqrt(m)
        gain_s = np.abs(np.sum(w * h_s, axis=2)) ** 2
        gain_sp = np.abs(np.sum(w * h_sp, axis=2)) ** 2
    else:
        gain_s = np.abs(h_s[:, :, 0]) ** 2
        gain_sp = np.abs(h_sp[:, :, 0]) ** 2
    power = config.peak_interference / gain_sp
    if config.max_power_cap is not None:
        np.minimum(power, config.max_power_cap, out=power)
    numerator = gain_s * power
    if config.primary_power > 0.0 and config.mean_ps_power > 0.0:
        parts = rng.standard_normal((size, 2))
        gamma_ps = (config.mean_ps_power / 2.0) * (parts[:, 0] ** 2 + parts[:, 1] ** 2)
        inv_denom = 1.0 / (1.0 + config.primary_power * gamma_ps)
    else:
        inv_denom = np.ones(size)
    best_num = numerator.max(axis=1)
    caps = np.log1p(best_num * inv_denom)
    return (
        float(np.sum(caps)),
        float(np.sum(caps * caps)),
        float(np.sum(best_num)),
        float(np.sum(inv_denom)),
    )


def run_experiment(config: NetworkConfig, threads: int = 1) -> CapacityEstimate:
    """Monte-Carlo ergodic capacity with a Jensen-bound diagnostic.

    Deterministic for a fixed seed regardless of ``threads``.
    """
    if config.trials < 100:
        raise ValueError(f"need trials >= 100, got {config.trials}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    phases = _experiment_phases(config)
    chunk = _chunk_size(config)
    n_chunks = (config.trials + chunk - 1) // chunk

    def work(c: int) -> tuple:
        size = min(chunk, config.trials - c * chunk)
        return _chunk_sums(config, size, _chunk_rng(config, c), phases)

    if threads == 1 or n_chunks == 1:
        results = [work(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(n_chunks)))

    cap_sum = capsq_sum = num_sum = inv_sum = 0.0
    for cs, cq, ns, iv in results:  # fixed chunk order keeps sums bit-stable
        cap_sum += cs
        capsq_sum += cq
        num_sum += ns
        inv_sum += iv
    t = config.trials
    mean = cap_sum / t
    var = max(0.0, (capsq_sum - t * mean * mean) / (t - 1)) if t > 1 else 0.0
    stderr = math.sqrt(var / t)
    jensen = math.log1p((inv_sum / t) * (num_sum / t))
    return CapacityEstimate(mean_nats=mean, stderr_nats=stderr, jensen_bound_nats=jensen, trials=t)


def ergodic_capacity(config: NetworkConfig, threads: int = 1) -> tuple[float, float]:
    """Mean per-slot capacity in nats and its standard error."""
    est = run_experiment(config, threads=threads)
    return est.mean_nats, est.stderr_nats


def sweep(
    config_template: NetworkConfig,
    n_list,
    k_list,
    m_list,
    modes,
    threads: int = 1,
    progress=None,
) -> SweepResult:
    """Capacity estimates over the (mode, K, N[, M]) grid.

    Baseline points always use one pattern; ``m_list`` applies to RAB points
    only.  Per-point failures are recorded on the point and flagged on the
    result instead of aborting the sweep.
    """
    if not (list(n_list) and list(k_list) and list(modes)):
        raise ValueError("n_list, k_list, and modes must be nonempty")
    if "rab" in modes and not list(m_list):
        raise ValueError("m_list must be nonempty when sweeping rab mode")
    points: list[SweepPoint] = []
    partial = False
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        ms = list(m_list) if mode == "rab" else [1]
        for k, m, n in product(k_list, ms, n_list):
            point = SweepPoint(mode=mode, n_users=int(n), m_patterns=int(m), k_factor=float(k),
                               estimate=None)
            try:
                cfg = replace(
                    config_template, mode=mode, k_factor=float(k), m_patterns=int(m),
                    n_users=int(n)
                )
                point.estimate = run_experiment(cfg, threads=threads)
            except Exception as exc:  # noqa: BLE001 - per-point isolation is the contract
                point.error = f"{type(exc).__name__}: {exc}"
                partial = True
            points.append(point)
            if progress is not None:
                progress(point)
    return SweepResult(points=points, partial=partial)


def format_number(x: float) -> str:
    """Serialize with 17 significant digits (round-trip stable)."""
    return f"{x:.17g}"


SWEEP_CSV_COLUMNS = (
    "mode,N,M,K,gamma_s,gamma_sp,Qp,mean_capacity,stderr,trials,seed,jensen_bound"
)


def write_sweep_csv(
    result: SweepResult,
    config_template: NetworkConfig,
    stream,
    extra_columns: dict | None = None,
) -> None:
    """Emit sweep rows as CSV.

    Capacity columns are converted to the template's ``log_base``.  Extra
    columns (same length as the point list; None entries become empty
    fields) are appended verbatim after the stable base schema, so callers
    own their units.  Failed points get no data row; a trailing comment row
    flags a partial sweep.
    """
    extra = extra_columns or {}
    header = SWEEP_CSV_COLUMNS + ("," + ",".join(extra) if extra else "")
    stream.write(header + "\n")
    scale = 1.0 / LOG2 if config_template.log_base == "bits" else 1.0
    failed = []
    for idx, p in enumerate(result.points):
        if p.error is not None or p.estimate is None:
            failed.append(f"{p.mode}/N={p.n_users}/M={p.m_patterns}/K={p.k_factor}: {p.error}")
            continue
        est = p.estimate
        fields = [
            p.mode,
            str(p.n_users),
            str(p.m_patterns),
            format_number(p.k_factor),
            format_number(config_template.mean_secondary_power),
            format_number(config_template.mean_interference_power),
            format_number(config_template.peak_interference),
            format_number(est.mean_nats * scale),
            format_number(est.stderr_nats * scale),
            str(est.trials),
            str(config_template.seed),
            format_number(est.jensen_bound_nats * scale),
        ]
        for name in extra:
            value = extra[name][idx]
            fields.append("" if value is None else format_number(value))
        stream.write(",".join(fields) + "\n")
    if failed:
        stream.write(f"# partial: {len(failed)} point(s) failed: " + "; ".join(failed) + "\n")


def _law_values(n_arr: np.ndarray, law: str) -> np.ndarray:
    if law == "logN":
        return np.log(n_arr)
    if law == "loglogN":
        return np.log(np.log(n_arr))
    if law == "none":
        return np.ones_like(n_arr)
    raise ValueError(f"law must be one of {GROWTH_LAWS}, got {law!r}")


def growth_flatness(n_list, values, law: str) -> float:
    """Slope of law-normalized capacity versus log N over the upper half grid.

    A near-zero slope certifies the claimed growth law.  Requires at least
    4 points spanning at least one decade in N.
    """
    n_arr = np.asarray(n_list, dtype=float)
    v_arr = np.asarray(values, dtype=float)
    if n_arr.shape != v_arr.shape or n_arr.ndim != 1:
        raise ValueError("n_list and values must be 1-d and the same length")
    if n_arr.size < 4:
        raise ValueError(f"need at least 4 points, got {n_arr.size}")
    if np.any(np.diff(n_arr) <= 0.0):
        raise ValueError("n_list must be strictly increasing")
    if n_arr[-1] / n_arr[0] < 10.0:
        raise ValueError("n_list must span at least one decade")
    y = v_arr / _law_values(n_arr, law)
    half = n_arr.size // 2
    x = np.log(n_arr[half:])
    return float(np.polyfit(x, y[half:], 1)[0])


def loglog_control_slope(n_list, values) -> float:
    """Flatness slope a log(log N)-growing curve of matched scale would show.

    Least-squares fits c so c*log(log N) tracks ``values``, then measures
    that synthetic curve's slope under logN normalization.  Used as the
    comparison magnitude when certifying restored log-N growth.
    """
    n_arr = np.asarray(n_list, dtype=float)
    v_arr = np.asarray(values, dtype=float)
    ll = np.log(np.log(n_arr))
    c = float(np.dot(v_arr, ll) / np.dot(ll, ll))
    return growth_flatness(n_arr, c * ll, "logN")

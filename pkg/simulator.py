"""Monte Carlo validation of the superposition schemes at toy blocklengths.

Every trial draws fresh Gaussian subcodebooks, uniform messages and channel
noise from counter-based streams keyed by ``(seed, trial)``, so trials can
run in any order on any worker and two decoding modes see identical
randomness. Receivers decode with exhaustive minimum-distance search over
the candidate tuples a decoding step leaves open. An XOR payload none of
whose operands is known is searched as one value of its padded width.

Decoding modes:
    joint       side information removes known labels from the search
    separate    side information is ignored while searching; it only unpacks
                a decoded XOR value into the receiver's own label
    successive  like joint, but simultaneous steps are split, outer layer first
"""

import concurrent.futures
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from bounds import ChannelParams
from schemes import DecodeStep, Payload, SchemeSpec
from settings import Settings

logger = logging.getLogger(__name__)

MODES = ("joint", "separate", "successive")
CANDIDATE_CHUNK = 4096  # Candidates scored per distance evaluation.
Z_95 = 1.96

_STREAM_CODEBOOK = 0
_STREAM_MESSAGE = 1
_STREAM_NOISE = 2


class SimulationError(ValueError):
    """Simulation request that cannot be run as described."""


class CandidateGuardError(SimulationError):
    """Codebook or candidate search larger than the configured guard."""


@dataclass(frozen=True)
class SimConfig:
    n: int
    bits: "dict[str, int]"
    trials: int
    channel: ChannelParams
    seed: int = 7

    def __post_init__(self):
        if self.n < 1:
            raise SimulationError(f"blocklength must be at least 1, got {self.n}")
        if self.trials < 1:
            raise SimulationError(f"need at least one trial, got {self.trials}")
        if self.seed < 0:
            raise SimulationError(f"seed must be nonnegative, got {self.seed}")
        if any(b < 0 for b in self.bits.values()):
            raise SimulationError("bit counts must be nonnegative")

    def to_json(self) -> dict:
        return {"n": self.n, "bits": dict(self.bits), "trials": self.trials,
                "channel": self.channel.to_json(), "seed": self.seed}


class SimReport(BaseModel):
    """Wire form of a simulation result."""
    receiver_errors: List[float]
    error_counts: List[int]
    half_widths: List[float]
    trials: int
    seed: int
    mode: str
    scheme: str
    config: Dict


@dataclass
class SimResult:
    error_counts: "list[int]"
    trials: int
    seed: int
    mode: str
    config: dict = field(default_factory=dict)
    scheme: str = ""

    @property
    def receiver_errors(self) -> "list[float]":
        return [c / self.trials for c in self.error_counts]

    @property
    def half_widths(self) -> "list[float]":
        """Normal-approximation 95% half-width per receiver."""
        return [Z_95 * math.sqrt(p * (1 - p) / self.trials) for p in self.receiver_errors]

    def to_report(self) -> SimReport:
        return SimReport(
            receiver_errors=self.receiver_errors,
            error_counts=self.error_counts,
            half_widths=self.half_widths,
            trials=self.trials,
            seed=self.seed,
            mode=self.mode,
            scheme=self.scheme,
            config=self.config,
        )

    def to_json(self) -> str:
        return self.to_report().model_dump_json(indent=2)


def rates_to_bits(spec: SchemeSpec, rates: Sequence[float], n: int,
                  max_bits: Optional[int] = None) -> "dict[str, int]":
    """ceil(n * R_i / parts) bits per label; split messages share R_i equally."""
    if len(rates) != spec.num_receivers:
        raise SimulationError(f"need {spec.num_receivers} rates, got {len(rates)}")
    if any(r < 0 for r in rates):
        raise SimulationError("rates must be nonnegative")
    out = {}
    for i, r in enumerate(rates, start=1):
        parts = spec.own(i)
        for label in parts:
            bits = math.ceil(n * r / len(parts) - 1e-9)
            if max_bits is not None and bits > max_bits:
                logger.warning("clipping %s from %d to %d bits", label, bits, max_bits)
                bits = max_bits
            out[label] = bits
    return out


def _stream(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial, stream))))


def _decoder_steps(spec: SchemeSpec, i: int, mode: str) -> "tuple[DecodeStep, ...]":
    steps = spec.decoders[i]
    if mode != "successive":
        return steps
    return tuple(DecodeStep((k,)) for step in steps for k in sorted(step.subcodebooks, reverse=True))


def _check(spec: SchemeSpec, cfg: SimConfig, mode: str, settings: Settings) -> None:
    if mode not in MODES:
        raise SimulationError(f"unknown decoding mode {mode!r}; choose from {', '.join(MODES)}")
    if cfg.channel.num_receivers != spec.num_receivers:
        raise SimulationError(f"channel has {cfg.channel.num_receivers} receivers, scheme has {spec.num_receivers}")
    missing = [l for l in spec.messages if l not in cfg.bits]
    if missing:
        raise SimulationError(f"no bit count for messages {missing}")
    for k, sc in enumerate(spec.subcodebooks, start=1):
        size = sc.payload.num_bits(cfg.bits)
        if size > settings.max_codebook_bits:
            raise CandidateGuardError(
                f"subcodebook {k} needs 2^{size} codewords (guard {settings.max_codebook_bits} bits)")
        if size > 0 and sc.power * cfg.channel.P <= 0:
            raise SimulationError(f"subcodebook {k} carries {size} bits with zero power")
    for i in spec.graph.receivers():
        side = dict.fromkeys(spec.side_info(i), 0)
        done = {} if mode == "separate" else dict(side)
        for step in _decoder_steps(spec, i, mode):
            keys = _search_keys(spec, step, done, cfg.bits)
            open_bits = sum(width for _, width in keys)
            if open_bits > settings.max_candidate_bits:
                raise CandidateGuardError(
                    f"receiver {i} would search 2^{open_bits} candidates (guard {settings.max_candidate_bits} bits)")
            done.update((key, 0) for key, _ in keys)
            _unpack(done, side, cfg.bits)


def _step_labels(spec: SchemeSpec, step: DecodeStep) -> "list[str]":
    labels = []
    for k in step.subcodebooks:
        labels.extend(l for l in spec.subcodebooks[k - 1].payload.labels() if l not in labels)
    return labels


def _homes(payload: Payload, home: Optional[Payload], out: "dict[str, set]") -> None:
    """Record, per label, the outermost XOR node it sits under (None when outside any XOR)."""
    if payload.op == "msg":
        out.setdefault(payload.label, set()).add(home)
        return
    if payload.op == "xor" and home is None:
        home = payload
    for child in payload.children:
        _homes(child, home, out)


def _search_keys(spec: SchemeSpec, step: DecodeStep, fixed, bits: "dict[str, int]") -> "list[tuple[object, int]]":
    """Search variables of one step with their bit widths.

    An XOR node whose labels are all open and occur nowhere else in the step
    is searched as one value of ``max(bits)``; every other open label is
    searched on its own.
    """
    homes: "dict[str, set]" = {}
    for k in step.subcodebooks:
        _homes(spec.subcodebooks[k - 1].payload, None, homes)
    keys: "list[tuple[object, int]]" = []
    collapsed: "set[str]" = set()
    for node in {h for hs in homes.values() for h in hs if h is not None}:
        labels = node.labels()
        if any(homes[l] != {node} for l in labels):
            continue
        if node in fixed:
            collapsed.update(labels)
        elif all(l not in fixed for l in labels):
            keys.append((node, node.num_bits(bits)))
            collapsed.update(labels)
    keys.sort(key=lambda kv: kv[0].describe())
    keys += [(l, bits[l]) for l in _step_labels(spec, step) if l not in fixed and l not in collapsed]
    return keys


def _unpack(decoded: dict, side: "dict[str, int]", bits: "dict[str, int]") -> None:
    """Recover single labels from decoded XOR values once the other operands are available."""
    for node in [k for k in decoded if isinstance(k, Payload)]:
        if any(c.op != "msg" for c in node.children):
            continue
        for label in node.labels():
            if label in decoded:
                continue
            others = [l for l in node.labels() if l != label]
            if all(l in decoded or l in side for l in others):
                value = decoded[node]
                for l in others:
                    value ^= decoded[l] if l in decoded else side[l]
                decoded[label] = value & ((1 << bits[label]) - 1)


def _decode(spec: SchemeSpec, cfg: SimConfig, codebooks: "list[np.ndarray]", y: np.ndarray,
            truth: "dict[str, int]", i: int, mode: str) -> bool:
    """Run receiver ``i``'s steps on ``y``; True when one of its own labels is wrong."""
    side = {l: truth[l] for l in spec.side_info(i)}
    known = {} if mode == "separate" else side
    decoded: dict = {}
    residual = y.copy()
    for step in _decoder_steps(spec, i, mode):
        labels = _step_labels(spec, step)
        fixed = {**decoded, **known}
        keys = _search_keys(spec, step, fixed, cfg.bits)
        count = 1 << sum(width for _, width in keys)
        best_k, best_d = 0, np.inf
        for start in range(0, count, CANDIDATE_CHUNK):
            cand = np.arange(start, min(start + CANDIDATE_CHUNK, count), dtype=np.int64)
            values = {l: np.full(cand.shape, fixed[l], dtype=np.int64) for l in labels if l in fixed}
            values.update((key, np.full(cand.shape, v, dtype=np.int64)) for key, v in fixed.items()
                          if isinstance(key, Payload))
            shift = 0
            for key, width in keys:
                values[key] = (cand >> shift) & ((1 << width) - 1)
                shift += width
            total_cw = sum(codebooks[k - 1][spec.subcodebooks[k - 1].payload.index(values, cfg.bits)]
                           for k in step.subcodebooks)
            dist = np.sum((residual[None, :] - total_cw) ** 2, axis=1)
            k = int(np.argmin(dist))
            if dist[k] < best_d:
                best_k, best_d = start + k, float(dist[k])
        shift = 0
        for key, width in keys:
            decoded[key] = (best_k >> shift) & ((1 << width) - 1)
            shift += width
        # Separate decoding brings side information back in only here.
        _unpack(decoded, side, cfg.bits)
        chosen = {key: np.array([v], dtype=np.int64) for key, v in {**decoded, **known}.items()}
        for k in step.subcodebooks:
            idx = spec.subcodebooks[k - 1].payload.index(chosen, cfg.bits)
            residual = residual - codebooks[k - 1][idx[0]]
    return any(decoded.get(l) != truth[l] for l in spec.own(i))


def _transmit(spec: SchemeSpec, cfg: SimConfig, trial: int) -> "tuple[list[np.ndarray], dict[str, int], np.ndarray]":
    """Codebooks, true messages and the transmitted codeword sum of one trial."""
    code_rng = _stream(cfg.seed, trial, _STREAM_CODEBOOK)
    codebooks = []
    for sc in spec.subcodebooks:
        size = 1 << sc.payload.num_bits(cfg.bits)
        codebooks.append(code_rng.standard_normal((size, cfg.n)) * math.sqrt(sc.power * cfg.channel.P))
    msg_rng = _stream(cfg.seed, trial, _STREAM_MESSAGE)
    truth = {l: int(msg_rng.integers(0, 1 << cfg.bits[l])) for l in spec.messages}
    values = {l: np.array([v], dtype=np.int64) for l, v in truth.items()}
    x = np.zeros(cfg.n)
    for cb, sc in zip(codebooks, spec.subcodebooks):
        x = x + cb[sc.payload.index(values, cfg.bits)[0]]
    return codebooks, truth, x


def _trial(spec: SchemeSpec, cfg: SimConfig, trial: int, mode: str) -> np.ndarray:
    codebooks, truth, x = _transmit(spec, cfg, trial)
    noise = _stream(cfg.seed, trial, _STREAM_NOISE).standard_normal((spec.num_receivers, cfg.n))
    errors = np.zeros(spec.num_receivers, dtype=np.int64)
    for i in spec.graph.receivers():
        y = x + math.sqrt(cfg.channel.noise(i)) * noise[i - 1]
        errors[i - 1] = _decode(spec, cfg, codebooks, y, truth, i, mode)
    return errors


def _run_range(spec: SchemeSpec, cfg: SimConfig, trials: range, mode: str) -> np.ndarray:
    errors = np.zeros(spec.num_receivers, dtype=np.int64)
    for t in trials:
        errors += _trial(spec, cfg, t, mode)
    return errors


def run_sim(spec: SchemeSpec, cfg: SimConfig, mode: str = "joint",
            settings: Optional[Settings] = None) -> SimResult:
    """Per-receiver error rates of ``spec`` over ``cfg.trials`` seeded trials."""
    settings = settings or Settings()
    _check(spec, cfg, mode, settings)
    workers = max(1, min(settings.workers, cfg.trials))
    step = -(-cfg.trials // workers)
    chunks = [range(s, min(s + step, cfg.trials)) for s in range(0, cfg.trials, step)]
    logger.info("simulating %s (%s): %d trials on %d workers", spec.label, mode, cfg.trials, workers)
    errors = np.zeros(spec.num_receivers, dtype=np.int64)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        for part in executor.map(lambda r: _run_range(spec, cfg, r, mode), chunks):
            errors += part
    return SimResult([int(e) for e in errors], cfg.trials, cfg.seed, mode, cfg.to_json(), spec.describe())


def compare_decoders(spec: SchemeSpec, cfg: SimConfig, modes: Sequence[str] = ("joint", "separate"),
                     settings: Optional[Settings] = None) -> "tuple[SimResult, ...]":
    """Run several decoding modes on common random numbers."""
    return tuple(run_sim(spec, cfg, mode, settings) for mode in modes)


def mean_power(spec: SchemeSpec, cfg: SimConfig) -> float:
    """Empirical mean transmit power per channel use over the configured trials."""
    return sum(float(np.mean(_transmit(spec, cfg, t)[2] ** 2)) for t in range(cfg.trials)) / cfg.trials

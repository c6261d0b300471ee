"""Seeded Monte-Carlo experiments: decoder sweeps, GV checks, reductions, LPN bridge, hiding demo.

Every trial draws from ``trial_rng(seed, point, trial)``, so results do not
depend on batching or worker count.  Sweep CSVs leave out wall time so that a
rerun with the same config and seed is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

from scipy import stats

from . import dense as ds
from .codes import (
    StabilizerCode,
    binary_entropy,
    distance_exact,
    find_min_logical,
    five_qubit_code,
    gv_bound,
    is_nondegenerate,
    random_code,
    repetition_code,
)
from .decoders import DECODERS, DECODED, score
from .errors import ConfigError, GuardError
from .instances import (
    LsnInstance,
    MslsnInstance,
    PauliFrame,
    Witness,
    lpn_to_lsn,
    sample_lpn,
    sample_lsn_batch,
)
from .noise import NoiseSpec, sample_error
from .pauli import PauliOperator
from .reductions import AVERAGE_CASE_LABEL, WorstCaseInstance, worst_to_average
from .rng import randbits, trial_rng

__all__ = [
    "CSV_VERSION",
    "ExperimentConfig",
    "PointSpec",
    "SweepRow",
    "SweepReport",
    "wilson_interval",
    "clopper_pearson",
    "run_sweep",
    "gv_validate",
    "commitment_demo",
    "run_reduction",
    "lpn_bridge",
    "lpn_full_rank_probability",
    "named_code",
    "worst_case_from_json",
    "worst_case_to_json",
]

CSV_VERSION = "# lsnlab sweep csv v1"
CSV_COLUMNS = [
    "point",
    "ensemble",
    "code",
    "n",
    "k",
    "m",
    "noise",
    "p",
    "w_cut",
    "decoder",
    "successes",
    "trials",
    "rate",
    "wilson_lo",
    "wilson_hi",
    "status",
]
BATCH = 1000


def named_code(name: str, n: int | None = None) -> StabilizerCode:
    if name == "five-qubit":
        return five_qubit_code()
    if name == "repetition":
        return repetition_code(n or 3)
    raise ConfigError(f"unknown code name {name!r}; expected 'random', 'five-qubit' or 'repetition'")


# --- statistics ---------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # at the edges the score interval touches 0 or 1 exactly; rounding would leave ~1e-17
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def clopper_pearson(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    alpha = 1 - confidence
    lo = 0.0 if successes == 0 else float(stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi


# --- config -------------------------------------------------------------------


@dataclass(frozen=True)
class PointSpec:
    n: int
    k: int
    m: int
    noise: NoiseSpec
    code: tuple[str, ...]  # "random" or one fixed code name per block

    def label(self) -> str:
        return "+".join(self.code)


def _parse_p(raw, n: int) -> float:
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str) and raw.strip().replace(" ", "") == "1/n":
        return 1.0 / n
    raise ConfigError(f"noise p must be a number or '1/n', got {raw!r}")


def _point_from(obj: dict, where: str) -> PointSpec:
    try:
        code = obj.get("code", "random")
        codes = tuple(code) if isinstance(code, list) else (code,)
        m = int(obj.get("m", len(codes) if len(codes) > 1 else 1))
        if len(codes) == 1:
            codes = codes * m
        if len(codes) != m:
            raise ConfigError(f"{where}: {len(codes)} codes listed for m={m}")
        if codes[0] == "random":
            n, k = int(obj["n"]), int(obj["k"])
        else:
            c = named_code(codes[0], obj.get("n"))
            n, k = c.n, c.k
        noise_obj = obj.get("noise", {"kind": "depolarizing", "p": 0.0})
        p = _parse_p(noise_obj.get("p", 0.0), n)
        w_cut = noise_obj.get("w_cut")
        noise = NoiseSpec(str(noise_obj.get("kind", "depolarizing")), n, p, None if w_cut is None else int(w_cut))
        return PointSpec(n, k, m, noise, codes)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


@dataclass
class ExperimentConfig:
    points: list[PointSpec]
    decoder: str = "projection"
    decoder_params: dict = field(default_factory=dict)
    trials: int = 1000
    seed: int = 0
    form: str = "symbolic"
    out: str | None = None
    kind: str = "sweep"

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ConfigError(f"unknown decoder {self.decoder!r}; expected one of {sorted(DECODERS)}")
        if self.trials < 0:
            raise ConfigError(f"trial count must be non-negative, got {self.trials}")
        if self.form not in ("symbolic", "dense"):
            raise ConfigError(f"unknown form {self.form!r}")

    @classmethod
    def from_json(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if "points" in data:
            raw = data["points"]
            if not isinstance(raw, list):
                raise ConfigError("points must be a list")
        else:
            ns = data.get("n", [])
            ns = ns if isinstance(ns, list) else [ns]
            base = {key: data[key] for key in ("k", "m", "noise", "code") if key in data}
            raw = [{**base, "n": n} for n in ns] if ns else ([base] if "code" in base else [])
        points = [_point_from(p, f"points[{i}]") for i, p in enumerate(raw)]
        try:
            return cls(
                points,
                str(data.get("decoder", "projection")),
                dict(data.get("decoder_params", {})),
                int(data.get("trials", 1000)),
                int(data.get("seed", 0)),
                str(data.get("form", "symbolic")),
                data.get("out"),
                str(data.get("kind", "sweep")),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None


# --- sweeps -------------------------------------------------------------------


@dataclass
class SweepRow:
    point: int
    spec: PointSpec
    decoder: str
    successes: int
    trials: int
    wall_time: float
    status: str = "ok"
    ensemble: str = "LSN"

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    @property
    def mean_wall_time(self) -> float:
        return self.wall_time / self.trials if self.trials else 0.0


@dataclass
class SweepReport:
    rows: list[SweepRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_VERSION + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            lo, hi = r.interval
            s = r.spec
            writer.writerow(
                [
                    r.point,
                    r.ensemble,
                    s.label(),
                    s.n,
                    s.k,
                    s.m,
                    s.noise.kind,
                    f"{s.noise.p:.6g}",
                    "" if s.noise.w_cut is None else s.noise.w_cut,
                    r.decoder,
                    r.successes,
                    r.trials,
                    f"{r.rate:.6f}" if r.trials else "",
                    f"{lo:.6f}",
                    f"{hi:.6f}",
                    r.status,
                ]
            )
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        for r in self.rows:
            lo, hi = r.interval
            lines.append(
                f"point {r.point} [{r.spec.label()} n={r.spec.n} k={r.spec.k} m={r.spec.m} "
                f"{r.spec.noise.kind} p={r.spec.noise.p:.4g}] {r.decoder}: "
                f"{r.successes}/{r.trials} rate={r.rate:.4f} CI=[{lo:.4f}, {hi:.4f}] "
                f"mean {1e3 * r.mean_wall_time:.3f} ms ({r.status})"
            )
        return "\n".join(lines)


def _fixed_instance(code: StabilizerCode, noise: NoiseSpec, secret: int, rng, form: str) -> LsnInstance:
    error = sample_error(noise, rng)
    inst = LsnInstance(code, PauliFrame.from_witness(code, error, secret), Witness(secret, error.unsigned()), noise)
    return inst.to_dense() if form == "dense" else inst


def _instances(spec: PointSpec, rngs, form: str):
    """Instances for one chunk of trials, in the same per-stream draw order as one-at-a-time sampling."""
    if spec.m == 1:
        if spec.code[0] == "random":
            return sample_lsn_batch(spec.n, spec.k, spec.noise, rngs, form)
        code = named_code(spec.code[0], spec.n)
        return [_fixed_instance(code, spec.noise, randbits(g, spec.k), g, form) for g in rngs]
    out = []
    fixed = [None if c == "random" else named_code(c, spec.n) for c in spec.code]
    for g in rngs:
        secret = randbits(g, spec.k)
        samples = []
        for c in fixed:
            code = random_code(spec.n, spec.k, g) if c is None else c
            samples.append(_fixed_instance(code, spec.noise, secret, g, form))
        out.append(MslsnInstance(samples, secret))
    return out


def _secret_of(inst) -> int:
    return inst.secret if isinstance(inst, MslsnInstance) else inst.witness.secret


def _run_point(args) -> SweepRow:
    index, spec, cfg = args
    decoder = DECODERS[cfg.decoder]
    successes = 0
    wall = 0.0
    done = 0
    try:
        for start in range(0, cfg.trials, BATCH):
            rngs = [trial_rng(cfg.seed, index, t) for t in range(start, min(cfg.trials, start + BATCH))]
            insts = _instances(spec, rngs, cfg.form)
            for inst, g in zip(insts, rngs):
                res = decoder(inst.public(), rng=g, **cfg.decoder_params)
                successes += score(res, _secret_of(inst))
                wall += res.wall_time
                done += 1
    except GuardError as exc:
        return SweepRow(index, spec, cfg.decoder, 0, 0, 0.0, f"skipped: {exc}")
    return SweepRow(index, spec, cfg.decoder, successes, done, wall)


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> SweepReport:
    jobs = [(i, p, cfg) for i, p in enumerate(cfg.points)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_point, jobs))
    else:
        rows = [_run_point(j) for j in jobs]
    return SweepReport(rows)


# --- GV check -----------------------------------------------------------------


def pgm_threshold_expression(p: float, k: int, n: int) -> float:
    """H(3p) + 3 log2(3) p + k/n; the PGM analysis needs this below 1."""
    return binary_entropy(3 * p) + 3 * math.log2(3) * p + k / n


def gv_validate(n: int, k: int, d: int, codes: int, rng, p: float | None = None) -> dict:
    """Fraction of random codes with distance >= d that are non-degenerate at weight (d-1)//2."""
    t = (d - 1) // 2
    good = 0
    for _ in range(codes):
        code = random_code(n, k, rng)
        dist_ok = d <= 1 or find_min_logical(code, d - 1) is None
        if dist_ok and is_nondegenerate(code, t):
            good += 1
    bound = gv_bound(n, k, d)
    lo, hi = wilson_interval(good, codes)
    report = {
        "n": n,
        "k": k,
        "d": d,
        "codes": codes,
        "good": good,
        "fraction": good / codes if codes else None,
        "wilson_95": [lo, hi],
        "gv_bound": bound,
        "gv_bound_vacuous": bound <= 0.0,
    }
    if p is not None:
        report["p"] = p
        report["pgm_threshold_expression"] = pgm_threshold_expression(p, k, n)
    return report


# --- commitment hiding ----------------------------------------------------------


def commitment_demo(n: int, k: int, p: float, rng, w_cut: int | None = None, certified: str = "five-qubit") -> dict:
    """Distinguishability of the two purified commitments on register A.

    The random-code part uses depolarizing noise (truncated at ``w_cut`` if
    given).  The certified part uses a fixed code truncated at floor((d-1)/2),
    where the two reduced states coincide exactly.
    """
    if n > ds.MAX_PURIFIED_QUBITS:
        raise GuardError(f"commitment demo on {n} qubits exceeds the dense guard of {ds.MAX_PURIFIED_QUBITS}")
    code = random_code(n, k, rng)
    noise = NoiseSpec("depolarizing", n, p) if w_cut is None else NoiseSpec("truncated_depolarizing", n, p, w_cut)
    q0, q1 = ds.purified_instance_states(code, noise)
    report = {
        "random": {
            "n": n,
            "k": k,
            "p": p,
            "noise": noise.to_json(),
            "generators": [str(g) for g in code.generators],
            "trace_distance": ds.trace_distance(q0, q1),
            "fidelity": ds.fidelity(q0, q1),
            "bound_2exp(-np/48)": 2 * math.exp(-n * p / 48),
        }
    }
    cert = named_code(certified)
    d = distance_exact(cert, cert.n)
    t = (d - 1) // 2
    cnoise = NoiseSpec("truncated_depolarizing", cert.n, p, t)
    c0, c1 = ds.purified_instance_states(cert, cnoise)
    report["certified"] = {
        "code": certified,
        "distance": d,
        "w_cut": t,
        "p": p,
        "trace_distance": ds.trace_distance(c0, c1),
        "fidelity": ds.fidelity(c0, c1),
        "bound_2exp(-np/48)": 2 * math.exp(-cert.n * p / 48),
    }
    return report


# --- reductions -----------------------------------------------------------------

WORST_SCHEMA = "lsnlab.worstcase/1"


def worst_case_to_json(inst: WorstCaseInstance) -> bytes:
    from .gf2 import BitVector

    body = {
        "schema": WORST_SCHEMA,
        "code": inst.code.to_json(),
        "error": str(inst.error),
        "secret": BitVector(inst.code.k, inst.secret).to_string(),
        "weight_bound": inst.weight_bound,
    }
    return (json.dumps(body, sort_keys=True, indent=2) + "\n").encode()


def worst_case_from_json(data: bytes | str) -> WorstCaseInstance:
    from .gf2 import BitVector

    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or obj.get("schema") != WORST_SCHEMA:
        raise ConfigError(f"$.schema: expected {WORST_SCHEMA!r}")
    try:
        code = StabilizerCode.from_json(obj["code"])
        error = PauliOperator.from_string(obj["error"])
        secret = BitVector.from_string(obj["secret"]).value
        return WorstCaseInstance(code, error, secret, int(obj["weight_bound"]))
    except KeyError as exc:
        raise ConfigError(f"$.{exc.args[0]}: missing field") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"$: {exc}") from None


def run_reduction(inst: WorstCaseInstance, decoder: str, trials: int, seed: int, params: dict | None = None) -> dict:
    if decoder not in DECODERS:
        raise ConfigError(f"unknown decoder {decoder!r}; expected one of {sorted(DECODERS)}")
    fn = DECODERS[decoder]
    params = params or {}
    hits = 0
    for t in range(trials):
        g = trial_rng(seed, 0, t)

        def solver(lsn, g=g):
            res = fn(lsn, rng=g, **params)
            return res.candidate if res.outcome == DECODED else None

        hits += worst_to_average(inst, solver, g) == inst.secret
    lo, hi = wilson_interval(hits, trials)
    return {
        "ensemble": AVERAGE_CASE_LABEL,
        "decoder": decoder,
        "n": inst.code.n,
        "k": inst.code.k,
        "error_weight": inst.error.weight(),
        "successes": hits,
        "trials": trials,
        "rate": hits / trials if trials else None,
        "wilson_95": [lo, hi],
    }


# --- LPN bridge ------------------------------------------------------------------


def lpn_full_rank_probability(n: int, k: int) -> float:
    return math.prod(1 - 2.0 ** (i - n - 1) for i in range(1, k + 1))


def lpn_bridge(n: int, k: int, p: float, trials: int, seed: int, w_max: int = 1) -> dict:
    """Sample LPN, map to LSN, decode with syndrome-ml; report rank and recovery statistics."""
    full = hits = flips = 0
    for t in range(trials):
        g = trial_rng(seed, 0, t)
        lpn = sample_lpn(n, k, p, g)
        flips += lpn.noise_bits.weight()
        lsn = lpn_to_lsn(lpn)
        if lsn is None:
            continue
        full += 1
        res = DECODERS["syndrome-ml"](lsn.public(), rng=g, w_max=w_max)
        hits += score(res, lsn.witness.secret)
    expected = lpn_full_rank_probability(n, k)
    sigma = math.sqrt(expected * (1 - expected) / trials) if trials else 0.0
    return {
        "n": n,
        "k": k,
        "p": p,
        "trials": trials,
        "full_rank": full,
        "full_rank_rate": full / trials if trials else None,
        "full_rank_expected": expected,
        "full_rank_sigma": sigma,
        "recovered": hits,
        "recovery_rate": hits / full if full else None,
        "bit_flip_rate": flips / (trials * n) if trials else None,
    }

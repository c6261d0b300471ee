"""Command line entry point.  Exit codes: 0 ok, 2 bad config or input, 3 size guard hit."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, GuardError
from .rng import make_rng

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None


def _emit(text: str | bytes, out: str | None) -> None:
    if isinstance(text, str):
        text = text.encode()
    if out:
        with open(out, "wb") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text.decode())


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _noise(args, n: int):
    from .noise import NoiseSpec

    return NoiseSpec(args.noise, n, args.p, args.w_cut)


def cmd_sample_instance(args) -> int:
    from .instances import lpn_to_lsn, sample_lpn, sample_lsn, sample_mslsn, serialize

    cfg = _load_json(args.config) if args.config else {}
    kind = cfg.get("type", args.type)
    n = int(cfg.get("n", args.n))
    k = int(cfg.get("k", args.k))
    rng = make_rng(args.seed)
    if kind in ("lsn", "mslsn"):
        from .noise import NoiseSpec

        noise_cfg = cfg.get("noise", {"kind": args.noise, "p": args.p, "w_cut": args.w_cut})
        noise = NoiseSpec.from_json(noise_cfg, n)
        form = cfg.get("form", args.form)
        if kind == "lsn":
            inst = sample_lsn(n, k, noise, rng, form)
        else:
            inst = sample_mslsn(int(cfg.get("m", args.m)), n, k, noise, rng, form)
    elif kind in ("lpn", "lpn-lsn"):
        inst = sample_lpn(n, k, float(cfg.get("p", args.p)), rng)
        if kind == "lpn-lsn":
            inst = lpn_to_lsn(inst)
            if inst is None:
                raise ConfigError("sampled A lacks full column rank; the reduction aborts (try another seed)")
    else:
        raise ConfigError(f"unknown instance type {kind!r}")
    _emit(serialize(inst, with_witness=not args.no_witness), args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    from .decoders import DECODERS
    from .instances import LsnInstance, deserialize

    inst = deserialize(_read(args.instance))
    if args.decoder not in DECODERS:
        raise ConfigError(f"unknown decoder {args.decoder!r}; expected one of {sorted(DECODERS)}")
    params = json.loads(args.params) if args.params else {}
    witness = inst.witness if isinstance(inst, LsnInstance) else None
    res = DECODERS[args.decoder](inst.public(), rng=make_rng(args.seed), **params)
    out = {
        "decoder": args.decoder,
        "outcome": res.outcome,
        "candidate": res.candidate,
        "syndrome": res.syndrome,
        "correction": None if res.correction is None else str(res.correction),
        "wall_time_s": res.wall_time,
    }
    if witness is not None:
        out["correct"] = res.outcome == "decoded" and res.candidate == witness.secret
    _emit_json(out, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .harness import ExperimentConfig, run_sweep

    data = _load_json(args.config)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.trials is not None:
        data["trials"] = args.trials
    if args.decoder is not None:
        data["decoder"] = args.decoder
    cfg = ExperimentConfig.from_json(data)
    report = run_sweep(cfg, threads=args.threads)
    _emit(report.to_csv(), args.out or cfg.out)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK


def cmd_gv_check(args) -> int:
    from .harness import gv_validate

    _emit_json(gv_validate(args.n, args.k, args.d, args.codes, make_rng(args.seed), args.p), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    from .harness import run_reduction, worst_case_from_json

    inst = worst_case_from_json(_read(args.instance))
    params = json.loads(args.params) if args.params else {}
    _emit_json(run_reduction(inst, args.decoder, args.trials, args.seed or 0, params), args.out)
    return EXIT_OK


def cmd_lpn_bridge(args) -> int:
    from .harness import lpn_bridge

    _emit_json(lpn_bridge(args.n, args.k, args.p, args.trials, args.seed or 0, args.w_max), args.out)
    return EXIT_OK


def cmd_commit_demo(args) -> int:
    from .harness import commitment_demo

    _emit_json(commitment_demo(args.n, args.k, args.p, make_rng(args.seed), args.w_cut), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsnlab", description="Learning-stabilizers-with-noise lab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--threads", type=int, default=1, help="worker processes")

    p = sub.add_parser("sample-instance", help="sample an LSN, MSLSN or LPN instance as JSON")
    common(p)
    p.add_argument("--config", help="JSON with type, n, k, m, noise, form")
    p.add_argument("--type", default="lsn", choices=["lsn", "mslsn", "lpn", "lpn-lsn"])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--noise", default="depolarizing", choices=["depolarizing", "bitflip", "truncated_depolarizing"])
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--w-cut", type=int, default=None)
    p.add_argument("--form", default="symbolic", choices=["symbolic", "dense"])
    p.add_argument("--no-witness", action="store_true", help="omit the secret and error")
    p.set_defaults(func=cmd_sample_instance)

    p = sub.add_parser("decode", help="decode one instance file")
    common(p)
    p.add_argument("instance")
    p.add_argument("--decoder", default="projection")
    p.add_argument("--params", help="decoder keyword arguments as JSON")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="run a seeded decoder sweep and write CSV")
    common(p, seed_default=None)
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--decoder")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gv-check", help="random-code distance and non-degeneracy vs the GV bound")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--codes", type=int, default=200)
    p.add_argument("--p", type=float, default=None, help="also report the PGM threshold expression at this p")
    p.set_defaults(func=cmd_gv_check)

    p = sub.add_parser("reduce", help="worst-case to average-case pipeline on a worst-case instance file")
    common(p)
    p.add_argument("instance")
    p.add_argument("--decoder", default="syndrome-ml")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--params", help="decoder keyword arguments as JSON")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lpn-bridge", help="LPN instances through the LSN reduction")
    common(p)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--w-max", type=int, default=1)
    p.set_defaults(func=cmd_lpn_bridge)

    p = sub.add_parser("commit-demo", help="hiding of the LSN commitment on small codes")
    common(p)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--w-cut", type=int, default=None)
    p.set_defaults(func=cmd_commit_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"lsnlab: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError) as exc:
        print(f"lsnlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

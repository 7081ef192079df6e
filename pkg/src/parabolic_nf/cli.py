"""Command-line front end.

    parabolic-nf validate            --input surface.json
    parabolic-nf involutions         --degree 10 --epsilon 1/2
    parabolic-nf normalize           --degree 12
    parabolic-nf linearize           --degree 12
    parabolic-nf certify-divergence  --degree 48 --epsilon 1 [--format csv]
    parabolic-nf perturb             --seed-degrees 5,7 --epsilon 1
    parabolic-nf profile             --degree 10 --certify-degree 48

Without ``--input`` the surface is r_star(degree, epsilon).  Exit codes:
0 success, 1 bad input, 2 internal consistency failure (a bug),
3 a well-defined negative outcome (certificate not passing, greedy
threshold unreachable).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields

from .errors import ConsistencyError, SurfaceInputError, ThresholdUnreachable
from .exactnum import to_rational
from .involutions import pair_from_surface
from .linearized import A_series, K_apply, divergence_certificate, solve_difference_direct, \
    solve_difference_K
from .normalform import normalize_pair, perturb_to_large_coeffs
from .surface import Surface, r_star, validate

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_NEGATIVE = 0, 1, 2, 3
THREADS_ENV = "PARABOLIC_NF_THREADS"
COMMANDS = ("validate", "involutions", "normalize", "linearize", "certify-divergence", "perturb")
DEFAULT_DEGREE = {"certify-divergence": 48, "normalize": 12, "perturb": 7}


class InputError(Exception):
    """A configuration or input problem (exit 1)."""


@dataclass
class RunConfig:
    command: str
    degree: int | None = None
    epsilon: object = None
    input_path: str | None = None
    output_format: str = "json"
    threads: int = 1
    seed_degrees: list = field(default_factory=lambda: [5, 7])

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.degree is None:
            self.degree = DEFAULT_DEGREE.get(self.command, 10)
        if not isinstance(self.degree, int) or isinstance(self.degree, bool) or self.degree < 4:
            raise InputError(f"degree must be an integer >= 4, got {self.degree!r}")
        if self.epsilon is None:
            self.epsilon = "1" if self.command in ("certify-divergence", "perturb") else "1/2"
        try:
            self.epsilon = to_rational(self.epsilon)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InputError(f"epsilon must be a rational 'p/q': {exc}") from exc
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")
        if self.output_format not in ("json", "csv"):
            raise InputError(f"output format must be json or csv, got {self.output_format!r}")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise InputError("threads must be a positive integer")
        seeds = self.seed_degrees
        if isinstance(seeds, str):
            seeds = [s for s in seeds.split(",") if s.strip()]
        try:
            seeds = [int(s) for s in seeds]
        except (TypeError, ValueError) as exc:
            raise InputError(f"seed degrees must be integers: {exc}") from exc
        if seeds != sorted(set(seeds)) or any(s < 5 for s in seeds):
            raise InputError("seed degrees must be strictly ascending and >= 5")
        self.seed_degrees = seeds

    @classmethod
    def from_file(cls, path: str, overrides: dict) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config fields {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


# -- reports --------------------------------------------------------------------

def emit_json(obj) -> str:
    """Canonical JSON: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def result_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def load_surface(cfg: RunConfig) -> Surface:
    if cfg.input_path:
        return Surface.load(cfg.input_path)
    if cfg.degree < 5:
        raise InputError("the default surface r_star needs degree >= 5")
    return r_star(cfg.degree, cfg.epsilon)


def _require_admissible(s: Surface):
    bad = validate(s)
    if bad:
        first = bad[0]
        raise SurfaceInputError(f"surface not admissible: {first.kind} at {first.where}: {first.message}")


def _cmd_validate(cfg: RunConfig):
    s = load_surface(cfg)
    bad = validate(s)
    report = {"valid": not bad, "trunc": s.trunc, "violations": [v.to_json() for v in bad]}
    return report, (EXIT_INPUT if bad else EXIT_OK)


def _cmd_involutions(cfg: RunConfig):
    s = load_surface(cfg)
    _require_admissible(s)
    pair = pair_from_surface(s, cfg.degree)
    return pair.to_json(), EXIT_OK


def _cmd_normalize(cfg: RunConfig):
    s = load_surface(cfg)
    _require_admissible(s)
    phi = normalize_pair(pair_from_surface(s, cfg.degree), cfg.degree)
    return phi.to_json(), EXIT_OK


def _cmd_linearize(cfg: RunConfig):
    s = load_surface(cfg)
    _require_admissible(s)
    N = cfg.degree
    A = A_series(s, N)
    u = solve_difference_direct(-A)
    if solve_difference_K(-A) != u:
        raise ConsistencyError("difference solve and K-route disagree", N)
    KA = K_apply(A)
    report = {"trunc": N, "A": A.to_json(), "u": u.to_json(), "KA": KA.to_json(),
              "KA_y0": [c.to_json() for c in KA.restrict_y0()]}
    return report, EXIT_OK


def _cmd_certify(cfg: RunConfig):
    if cfg.input_path:
        raise InputError("certify-divergence uses the generator family; --input is not accepted")
    if cfg.degree < 6:
        raise InputError("certify-divergence needs degree >= 6")
    cert = divergence_certificate(cfg.degree, cfg.epsilon, threads=cfg.threads)
    out = cert.to_csv() if cfg.output_format == "csv" else cert.to_json()
    return out, (EXIT_OK if cert.passed else EXIT_NEGATIVE)


def _cmd_perturb(cfg: RunConfig):
    if cfg.input_path:
        base = Surface.load(cfg.input_path)
        _require_admissible(base)
    else:
        base = Surface.zero(max([cfg.degree] + cfg.seed_degrees))
    try:
        result = perturb_to_large_coeffs(base, cfg.seed_degrees, cfg.epsilon)
    except ThresholdUnreachable as exc:
        return {"ok": False, "error": "threshold-unreachable", "degree": exc.degree,
                "step": exc.rank, "message": str(exc)}, EXIT_NEGATIVE
    report = result.to_json()
    report["ok"] = True
    return report, EXIT_OK


HANDLERS = {"validate": _cmd_validate, "involutions": _cmd_involutions,
            "normalize": _cmd_normalize, "linearize": _cmd_linearize,
            "certify-divergence": _cmd_certify, "perturb": _cmd_perturb}


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command, write its report, return the exit code."""
    out = sys.stdout if out is None else out
    try:
        report, code = HANDLERS[cfg.command](cfg)
    except (InputError, SurfaceInputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # anything else past input checks is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    out.write(report if isinstance(report, str) else emit_json(report))
    return code


# -- profiling ----------------------------------------------------------------

def _bits(q) -> int:
    q = to_rational(q)
    return int(q.numerator).bit_length() + int(q.denominator).bit_length()


def profile(degree: int = 10, eps="1/2", certify_degree: int = 48, threads: int = 1) -> dict:
    """Wall time per phase and the peak coefficient bit-size per degree of Phi."""
    timings = []

    def phase(name, fn):
        t0 = time.perf_counter()
        value = fn()
        timings.append({"phase": name, "seconds": time.perf_counter() - t0})
        return value

    s = phase("parse", lambda: Surface.from_json(r_star(degree, eps).to_json()))
    pair = phase("involutions", lambda: pair_from_surface(s, degree))
    phi = phase("normalize", lambda: normalize_pair(pair, degree))
    cert = phase("certify", lambda: divergence_certificate(certify_degree, 1, threads=threads))
    bits = []
    for k in range(2, degree + 1):
        sl = phi.slice(k)
        peak = max((max(_bits(c.re), _bits(c.im)) for c in sl.coefficients()), default=0)
        bits.append({"degree": k, "bits": peak})
    exact = emit_json({"phi": phi.to_json(), "certificate": cert.to_json()})
    return {"phases": timings, "bitsize": bits, "result_hash": result_hash(exact),
            "degree": degree, "certify_degree": certify_degree, "threads": threads}


# -- argument parsing -----------------------------------------------------------

def _threads_default():
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", "-N", type=int, help="truncation degree N")
    common.add_argument("--epsilon", "--eps", help="rational 'p/q' > 0")
    common.add_argument("--input", dest="input_path", help="surface JSON file")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"))
    common.add_argument("--threads", type=int, help=f"worker threads (env {THREADS_ENV})")
    common.add_argument("--config", help="JSON config file mirroring the flags")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="parabolic-nf", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "perturb":
            p.add_argument("--seed-degrees", help="comma-separated ascending total degrees")
    p = sub.add_parser("profile", help="time the pipeline phases")
    p.add_argument("--degree", "-N", type=int, default=10)
    p.add_argument("--epsilon", "--eps", default="1/2")
    p.add_argument("--certify-degree", type=int, default=48)
    p.add_argument("--threads", type=int, default=1)
    return parser


def _config_from_args(args) -> RunConfig:
    threads = args.threads if args.threads is not None else _threads_default()
    values = {"command": args.command, "degree": args.degree, "epsilon": args.epsilon,
              "input_path": args.input_path, "output_format": args.output_format,
              "threads": threads, "seed_degrees": getattr(args, "seed_degrees", None)}
    if args.config:
        return RunConfig.from_file(args.config, values)
    return RunConfig(**{k: v for k, v in values.items() if v is not None})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.command == "profile":
        try:
            if args.degree < 5 or args.certify_degree < 6 or args.threads < 1:
                raise InputError("profile needs degree >= 5, certify-degree >= 6, threads >= 1")
            to_rational(args.epsilon)
        except (InputError, ValueError, ZeroDivisionError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        sys.stdout.write(emit_json(profile(args.degree, args.epsilon, args.certify_degree, args.threads)))
        return EXIT_OK
    try:
        cfg = _config_from_args(args)
    except (InputError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        with open(args.output, "w") as fh:
            return run(cfg, fh)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

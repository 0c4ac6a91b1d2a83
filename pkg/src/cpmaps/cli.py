"""Command-line front end.

Exit codes: 0 affirmative verdict (CP, compatible, state stays positive),
2 negative verdict, 1 usage or input error. Commands without a verdict
exit 0 on success.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import compat, maps, semigroup, states
from .errors import CpMapsError
from .operators import hermitian_eigenvalues, matrix_to_dict

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

FAMILIES = ("identity", "transposition", "trace", "pcp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# -- argument helpers ---------------------------------------------------------


def parse_int_range(text: str) -> list[int]:
    """``"4"``, ``"2,3,5"`` or inclusive ``"a:b[:step]"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3):
                raise UsageError(f"bad range {part!r}")
            step = bits[2] if len(bits) == 3 else 1
            if step <= 0:
                raise UsageError("range step must be positive")
            out.extend(range(bits[0], bits[1] + 1, step))
        else:
            out.append(int(part))
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def parse_float_range(text: str) -> list[float]:
    """``"0.5"``, ``"0,0.1,0.5"`` or inclusive ``"a:b[:step]"`` (default step 1)."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [float(b) for b in part.split(":")]
            if len(bits) not in (2, 3):
                raise UsageError(f"bad range {part!r}")
            start, stop = bits[0], bits[1]
            step = bits[2] if len(bits) == 3 else 1.0
            if step <= 0:
                raise UsageError("range step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9))
            out.extend(float(start + k * step) for k in range(n + 1))
        else:
            out.append(float(part))
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def _read_json(path: str) -> Any:
    with open(path) as fh:
        return json.load(fh)


def _load_map(args) -> maps.QuantumMap:
    if args.map:
        return maps.map_from_dict(_read_json(args.map))
    if not args.family:
        raise UsageError("give --map FILE or --family NAME")
    if args.d is None:
        raise UsageError("--family needs --d")
    if args.family == "identity":
        return maps.identity_map(args.d)
    if args.family == "transposition":
        return maps.transposition_map(args.d)
    if args.family == "trace":
        return maps.trace_map(args.d)
    if args.mu is None:
        raise UsageError("--family pcp needs --mu")
    return maps.pcp_family_map(args.d, args.mu)


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _render_records(records: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        clean = [{k: _jsonable(v) for k, v in r.items()} for r in records]
        return json.dumps(clean[0] if len(clean) == 1 else clean, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    fields = list(records[0].keys())
    writer.writerow(fields)
    for r in records:
        writer.writerow([_fmt(r.get(k)) for k in fields])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(path: str, obj: Any) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")


# -- subcommands --------------------------------------------------------------


def cmd_choi(args) -> int:
    m = _load_map(args)
    verdict = maps.is_completely_positive(m, args.tol)
    record = {
        "d": m.d,
        "is_cp": verdict.is_cp,
        "min_eigenvalue": verdict.min_choi_eigenvalue,
        "boundary": verdict.boundary,
    }
    if args.probe_samples:
        probe = maps.positivity_probe(m, args.probe_samples, args.seed)
        record["positivity"] = probe.status
        record["probe_min_eigenvalue"] = probe.min_eigenvalue
    if args.choi_out:
        _write_json(args.choi_out, matrix_to_dict(m.choi))
    _emit(args, _render_records([record], args.format))
    return EXIT_OK if verdict.is_cp else EXIT_NEGATIVE


def cmd_kraus(args) -> int:
    m = _load_map(args)
    verdict = maps.is_completely_positive(m, args.tol)
    if not verdict.is_cp:
        print(f"map is not CP (min Choi eigenvalue {verdict.min_choi_eigenvalue:.17g}); "
              "no Kraus form exists", file=sys.stderr)
        return EXIT_NEGATIVE
    out = maps.map_to_dict(maps.QuantumMap.from_kraus(m.kraus()), "kraus")
    _emit(args, json.dumps(out) + "\n")
    return EXIT_OK


def cmd_apply(args) -> int:
    m = _load_map(args)
    rho = states.state_from_dict(_read_json(args.state))
    n = args.lift
    image = m.apply(rho) if n == 1 else maps.apply_lifted(m, rho, n)
    vals = hermitian_eigenvalues(image).eigenvalues
    eps = states.psd_tolerance(vals) if args.tol is None else args.tol
    positive = bool(vals[0] >= -eps)
    record = {"lift": n, "min_eigenvalue": float(vals[0]),
              "trace": float(np.trace(image).real), "positive": positive}
    if args.format == "json":
        record["matrix"] = matrix_to_dict(image)
    _emit(args, _render_records([record], args.format))
    return EXIT_OK if positive else EXIT_NEGATIVE


def cmd_lift(args) -> int:
    m = _load_map(args)
    _emit(args, json.dumps(maps.map_to_dict(maps.lift(m, args.n))) + "\n")
    return EXIT_OK


def _load_generator(args) -> semigroup.GklsGenerator:
    if args.generator:
        return semigroup.generator_from_dict(_read_json(args.generator))
    if args.qubit_a is not None:
        return semigroup.qubit_pauli_generator(args.qubit_a)
    raise UsageError("give --generator FILE or --qubit-a A")


def cmd_evolve(args) -> int:
    gen = _load_generator(args)
    times = parse_float_range(args.t)
    if any(t < 0 for t in times):
        raise UsageError("times must be >= 0")
    if args.state:
        rho = states.state_from_dict(_read_json(args.state))
    elif args.bloch:
        rho = states.bloch_to_density([float(x) for x in args.bloch.split(",")])
    else:
        rho = states.random_density(gen.d, args.seed)
    if rho.shape[0] != gen.d:
        raise UsageError(f"state dimension {rho.shape[0]} does not match generator d={gen.d}")
    records = []
    stays_positive = True
    for t in times:
        out = semigroup.evolve_map(gen, t).apply(rho)
        vals = hermitian_eigenvalues(out).eigenvalues
        eps = states.psd_tolerance(vals) if args.tol is None else args.tol
        stays_positive &= bool(vals[0] >= -eps)
        row: dict = {"t": t}
        row.update({f"eig_{i}": float(v) for i, v in enumerate(vals)})
        if gen.d == 2:
            row.update(zip(("r1", "r2", "r3"), map(float, states.density_to_bloch(out))))
        row["min_eigenvalue"] = float(vals[0])
        records.append(row)
    _emit(args, _render_records(records, args.format))
    return EXIT_OK if stays_positive else EXIT_NEGATIVE


def cmd_classify_qubit(args) -> int:
    ev = semigroup.qubit_classification_evidence(args.a, args.t)
    record = {
        "a": args.a,
        "classification": ev.classification.value,
        "t": ev.t,
        "min_choi_eigenvalue": ev.min_choi_eigenvalue,
        "witness_norm": ev.witness_norm,
    }
    _emit(args, _render_records([record], args.format))
    return EXIT_OK if ev.classification is semigroup.QubitDynamics.CP else EXIT_NEGATIVE


def cmd_isotropic(args) -> int:
    rho = states.isotropic_state(args.d, args.F)
    record = {
        "d": args.d,
        "F": args.F,
        "entangled": states.isotropic_is_entangled(args.d, args.F),
        "min_pt_eigenvalue": states.min_partial_transpose_eigenvalue(rho, args.d, args.d),
    }
    if args.state_out:
        _write_json(args.state_out, states.state_to_dict(rho, "isotropic", {"d": args.d, "F": args.F}))
    _emit(args, _render_records([record], args.format))
    return EXIT_OK


def cmd_compat_scan(args) -> int:
    reports = compat.compat_scan(parse_int_range(args.d), parse_float_range(args.mu), F=args.F,
                                 verify=args.verify, max_workers=args.workers)
    text = compat.scan_to_json(reports) + "\n" if args.format == "json" else compat.scan_to_csv(reports)
    _emit(args, text)
    return EXIT_OK


def _numeric_cp_flip(d: int, width: float = 1e-9) -> float:
    lo, hi = 0.0, 1.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if maps.is_completely_positive(maps.pcp_family_map(d, mid)).is_cp:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cmd_cp_threshold(args) -> int:
    records = []
    for d in parse_int_range(args.d):
        row: dict = {"d": d, "cp_threshold": compat.cp_threshold(d)}
        if args.verify:
            if d > compat.VERIFY_MAX_D:
                raise UsageError(f"verification is capped at d <= {compat.VERIFY_MAX_D}")
            row["numeric_flip"] = _numeric_cp_flip(d)
        records.append(row)
    _emit(args, _render_records(records, args.format))
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    p.add_argument("--out", metavar="PATH", default=default(None), help="write output here instead of stdout")
    p.add_argument("--verify", action="store_true", default=default(False),
                   help="cross-check closed forms numerically")
    p.add_argument("--seed", type=int, default=default(0))
    p.add_argument("--tol", type=float, default=default(None), help="override the negativity tolerance")
    return p


def _map_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", metavar="FILE", help="map file (superoperator, kraus or choi)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--d", type=int)
    p.add_argument("--mu", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpmaps", description=__doc__.splitlines()[0],
                     parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_global_flags(True)]

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=common, help=help)
        p.set_defaults(func=func)
        return p

    p = add("choi", cmd_choi, "Choi matrix and CP verdict")
    _map_args(p)
    p.add_argument("--choi-out", metavar="PATH", help="write the Choi matrix (matrix format)")
    p.add_argument("--probe-samples", type=int, default=0,
                   help="also run the sampled positivity probe with this many starts")

    p = add("kraus", cmd_kraus, "Kraus decomposition of a CP map")
    _map_args(p)

    p = add("apply", cmd_apply, "apply a (lifted) map to a state")
    _map_args(p)
    p.add_argument("--state", metavar="FILE", required=True)
    p.add_argument("--lift", type=int, default=1, help="ancilla dimension n for the map ⊗ id_n")

    p = add("lift", cmd_lift, "superoperator of map ⊗ id_n")
    _map_args(p)
    p.add_argument("--n", type=int, required=True)

    p = add("evolve", cmd_evolve, "trajectory under a GKLS semigroup")
    p.add_argument("--generator", metavar="FILE")
    p.add_argument("--qubit-a", type=float, help="use the dissipative qubit with C = diag(1, 1, a)")
    p.add_argument("--t", required=True, help="times: list or a:b[:step]")
    p.add_argument("--state", metavar="FILE")
    p.add_argument("--bloch", help="initial Bloch vector r1,r2,r3 (qubit only)")

    p = add("classify-qubit", cmd_classify_qubit, "CP / positive / not-positive verdict for the qubit example")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--t", type=float, default=0.01, help="time used for the numerical evidence")

    p = add("isotropic", cmd_isotropic, "isotropic state and its PPT verdict")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--F", type=float, required=True)
    p.add_argument("--state-out", metavar="PATH", help="write the state (state format)")

    p = add("compat-scan", cmd_compat_scan, "compatibility table over d and mu")
    p.add_argument("--d", required=True, help="dimensions: list or a:b[:step]")
    p.add_argument("--mu", required=True, help="mu values: list or a:b:step")
    p.add_argument("--F", type=float, default=1.0, help="F at which E± are reported")
    p.add_argument("--workers", type=int, default=None)

    p = add("cp-threshold", cmd_cp_threshold, "CP threshold d/(d+1)")
    p.add_argument("--d", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CpMapsError, ValueError, KeyError, OSError) as exc:
        print(f"cpmaps {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

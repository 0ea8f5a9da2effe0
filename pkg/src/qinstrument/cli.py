"""``qinstrument`` command-line interface.

Exit codes: 0 success, 2 invalid input, 3 internal consistency failure,
64 usage error. Any input path may be replaced by ``preset:<name>``.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import fileformat, gallery, matcore
from .classify import classify_instrument
from .dilation import dilate, extract_instrument, round_trip_residual, unitarity_residual
from .errors import ConsistencyFailure, ValidationError
from .matcore import DEFAULT_TOL, dag, norm
from .measurement import probabilities, sample_counts
from .quantum_types import (
    Instrument,
    Observable,
    instrument_from_povm,
    maximal_refinement,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CONSISTENCY = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(source: str, tol: float) -> fileformat.OperatorFile:
    if source.startswith("preset:"):
        value = gallery.preset(source[len("preset:"):])
        return fileformat.OperatorFile(fileformat.kind_of(value), value)
    return fileformat.load(source, tol)


def _input(args, expected: Sequence[str]) -> fileformat.OperatorFile:
    source = f"preset:{args.preset}" if getattr(args, "preset", None) else args.input
    if source is None:
        raise UsageError("an input file or --preset is required")
    doc = _load(source, args.tol)
    if doc.kind not in expected:
        raise ValidationError(f"expected a {' or '.join(expected)} file, got {doc.kind!r}")
    return doc


def _as_instrument(doc: fileformat.OperatorFile, tol: float) -> Instrument:
    if doc.kind == "povm":
        return instrument_from_povm(doc.value, tol=tol)
    value = doc.value
    if value.tol != tol:
        value = Instrument(value.transformers, value.labels, tol)
    return value


def _fmt(m: np.ndarray) -> str:
    return np.array2string(np.asarray(m), precision=6, suppress_small=True, max_line_width=120)


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def cmd_classify(args) -> int:
    inst = _as_instrument(_input(args, ("instrument", "povm")), args.tol)
    result = classify_instrument(inst, args.tol)
    rows = []
    for o in result.outcomes:
        rows.append(
            {
                "label": o.label,
                "ordinary": o.is_ordinary,
                "rank": o.rank,
                "repeatable": o.is_repeatable,
                "ideal_residual": o.ideal_residual,
                "borderline": o.borderline,
            }
        )
    payload = {"tolerance": args.tol, "kind": str(result.kind), "outcomes": rows}
    if result.observable is not None:
        payload["observable_eigenvalues"] = [float(x) for x in result.observable.eigenvalues]

    def cell(x, f="{}"):
        return "-" if x is None else f.format(x)

    lines = [f"tolerance: {args.tol:g}",
             f"{'label':>10} {'ordinary':>9} {'rank':>5} {'repeatable':>11} {'|M-P|':>11}"]
    for r in rows:
        flag = "  (borderline)" if r["borderline"] else ""
        lines.append(
            f"{r['label']:>10} {str(r['ordinary']):>9} {cell(r['rank']):>5} "
            f"{cell(r['repeatable']):>11} {cell(r['ideal_residual'], '{:.3e}'):>11}{flag}"
        )
    lines.append(f"kind: {result.kind}")
    if result.observable is not None:
        lines.append("projectors resolve the identity; observable eigenvalues: "
                     + ", ".join(f"{x:g}" for x in result.observable.eigenvalues))
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_dilate(args) -> int:
    inst = _as_instrument(_input(args, ("instrument", "povm")), args.tol)
    model = dilate(inst, args.tol)
    unit = unitarity_residual(model)
    trip = round_trip_residual(inst, model)
    if args.output:
        fileformat.save(args.output, model, {"source": args.input or f"preset:{args.preset}"})
    ok = unit <= args.tol and trip <= args.tol
    payload = {
        "tolerance": args.tol,
        "system_dim": model.system_dim,
        "apparatus_dim": model.apparatus_dim,
        "unitarity_residual": unit,
        "round_trip_residual": trip,
        "ok": ok,
    }
    lines = [
        f"tolerance: {args.tol:g}",
        f"system_dim: {model.system_dim}  apparatus_dim: {model.apparatus_dim}",
        f"unitarity residual ||U^dag U - 1||: {unit:.3e}",
        f"round-trip residual max|M_i - M_i'|: {trip:.3e}",
    ]
    if args.output:
        lines.append(f"wrote {args.output}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_CONSISTENCY


def cmd_extract(args) -> int:
    model = _input(args, ("dilation",)).value
    inst = extract_instrument(model)
    if args.output:
        fileformat.save(args.output, inst)
    payload = {"tolerance": args.tol, "labels": list(inst.labels)}
    lines = [f"tolerance: {args.tol:g}"]
    for label, m in zip(inst.labels, inst.transformers):
        lines += [f"M[{label}] =", _fmt(m)]
    if args.output:
        lines.append(f"wrote {args.output}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.shots < 1:
        raise UsageError("--shots must be at least 1")
    inst = _as_instrument(_input(args, ("instrument", "povm")), args.tol)
    state = _load(args.state, args.tol)
    if state.kind not in ("state", "density"):
        raise ValidationError(f"expected a state or density file, got {state.kind!r}")
    rho = state.value
    exact = probabilities(inst, rho).probabilities
    counts = sample_counts(inst, rho, args.shots, args.seed)
    freq = counts / args.shots
    tv = 0.5 * float(np.sum(np.abs(freq - exact)))
    payload = {
        "tolerance": args.tol,
        "shots": args.shots,
        "seed": args.seed,
        "labels": list(inst.labels),
        "probabilities": exact.tolist(),
        "counts": counts.tolist(),
        "frequencies": freq.tolist(),
        "tv_distance": tv,
    }
    lines = [f"tolerance: {args.tol:g}  shots: {args.shots}  seed: {args.seed}",
             f"{'label':>10} {'born p':>12} {'count':>9} {'freq':>10}"]
    for label, p, c, f in zip(inst.labels, exact, counts, freq):
        lines.append(f"{label:>10} {p:>12.6f} {c:>9d} {f:>10.6f}")
    lines.append(f"total variation distance: {tv:.6f}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_polar(args) -> int:
    doc = _input(args, ("matrix", "instrument"))
    a = doc.value if doc.kind == "matrix" else doc.value.transformers[args.index]
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"polar factorization needs a square matrix, got {a.shape}")
    pf = matcore.polar_factorize(a, args.tol)
    # Independent reference for (A^dag A)^{1/2} through the SVD.
    _, s, vh = np.linalg.svd(a)
    h_ref = (dag(vh) * s) @ vh
    res = {
        "UH-A": norm(pf.unitary @ pf.positive - a),
        "U~H-A": norm(pf.partial_isometry @ pf.positive - a),
        "H-sqrt(A^dag A)": norm(pf.positive - h_ref),
        "U^dag U-1": norm(dag(pf.unitary) @ pf.unitary - np.eye(a.shape[0])),
    }
    ok = all(r <= args.tol for r in res.values())
    payload = {
        "tolerance": args.tol,
        "rank": pf.rank,
        "residuals": res,
        "unitary": fileformat._encode(pf.unitary),
        "positive": fileformat._encode(pf.positive),
        "partial_isometry": fileformat._encode(pf.partial_isometry),
        "range_projector": fileformat._encode(pf.range_projector),
        "ok": ok,
    }
    lines = [f"tolerance: {args.tol:g}  rank: {pf.rank}"]
    for name, m in (("U", pf.unitary), ("H", pf.positive),
                    ("U~ (partial isometry)", pf.partial_isometry),
                    ("Q (range projector of A^dag A)", pf.range_projector)):
        lines += [f"{name} =", _fmt(m)]
    lines += [f"||{k}||: {v:.3e}" for k, v in res.items()]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_CONSISTENCY


def cmd_refine(args) -> int:
    doc = _input(args, ("observable", "matrix"))
    obs = doc.value if doc.kind == "observable" else Observable.from_matrix(doc.value, tol=args.tol)
    fine = maximal_refinement(obs)
    if args.output:
        fileformat.save(args.output, fine)
    payload = {"tolerance": args.tol, "eigenvalues": [float(x) for x in fine.eigenvalues]}
    lines = [f"tolerance: {args.tol:g}",
             f"refined eigenvalues: {', '.join(f'{x:.6g}' for x in fine.eigenvalues)}"]
    if args.output:
        lines.append(f"wrote {args.output}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.list or not args.name:
        print("\n".join(sorted(gallery.PRESETS)))
        return EXIT_OK
    value = gallery.preset(args.name)
    text = fileformat.dumps(value, {"preset": args.name})
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="comparison tolerance (Frobenius norm), default %(default)g")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = _Parser(prog="qinstrument", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(name, help_, func, output=False):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.add_argument("input", nargs="?", help="operator file or preset:<name>")
        p.add_argument("--preset", help="use a named preset as input")
        if output:
            p.add_argument("-o", "--output", help="write the result here")
        p.set_defaults(func=func)
        return p

    with_input("classify", "ordinary/repeatable/ideal classification", cmd_classify)
    with_input("dilate", "build a system+apparatus unitary", cmd_dilate, output=True)
    with_input("extract", "read transformers off a dilation file", cmd_extract, output=True)
    p = with_input("simulate", "sample outcomes and compare with Born probabilities",
                   cmd_simulate)
    p.add_argument("--state", required=True, help="state/density file or preset:<name>")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p = with_input("polar", "polar factorization of a matrix", cmd_polar)
    p.add_argument("--index", type=int, default=0, help="transformer index for instrument input")
    with_input("refine", "maximal (nondegenerate) refinement of an observable", cmd_refine,
               output=True)

    p = sub.add_parser("preset", help="write a named preset", parents=[common])
    p.add_argument("name", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qinstrument: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"qinstrument: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyFailure as exc:
        print(f"qinstrument: consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())

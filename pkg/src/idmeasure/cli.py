"""Command-line interface.

Exit status: 0 on success, 1 when an input fails to parse or validate, 2 when a
checked property fails (``verify`` failures, or ``p7`` not holding).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import docs, transport
from .maxplus import MetricError, UnknownPoint, format_scalar
from .measures import MeasureError, pushforward
from .propsuite import CHECKS, GenConfig, run_suite
from .tower import (
    LimitPoint,
    TowerError,
    TowerMetric,
    d_plus,
    eta_nm,
    from_measure,
    p7_check,
    psi_mn,
    theta,
    to_measure,
)

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2


class UsageError(ValueError):
    pass


def _load_json(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text, parse_float=_no_float, parse_constant=_no_constant)
    except json.JSONDecodeError as exc:
        raise docs.DocumentError(f"{path}: invalid JSON ({exc})") from None


def _no_float(s):
    raise docs.DocumentError(f"float literal {s} is not allowed; write rationals as \"p/q\"")


def _no_constant(s):
    raise docs.DocumentError(f"{s} is not a valid weight")


def load_space(path):
    return docs.space_from_doc(_load_json(path))


def load_measure(path, space):
    return docs.measure_from_doc(_load_json(path), space)


def load_element(path, space):
    """A tower document, or a measure document read as a level-1 element."""
    doc = _load_json(path)
    if isinstance(doc, dict) and doc.get("kind") == "measure":
        return from_measure(docs.measure_from_doc(doc, space))
    return docs.tower_from_doc(doc, space)[1]


def _element_doc(space, e):
    if e.level == 1:
        return docs.measure_to_doc(to_measure(space, e))
    return docs.tower_to_doc(space, e)


def _emit(args, text, doc):
    if args.format == "json":
        print(docs.dumps(doc))
    else:
        print(text)


def _value_doc(**fields):
    out = {"kind": "result"}
    for k, v in fields.items():
        out[k] = docs.encode_scalar(v) if hasattr(v, "denominator") else v
    return out


# --------------------------------------------------------------------------
# verbs


def cmd_dist(args):
    space = load_space(args.space)
    mu, nu = load_measure(args.first, space), load_measure(args.second, space)
    cert = transport.distance(mu, nu)
    doc = _value_doc(distance=cert.value)
    text = format_scalar(cert.value)
    if args.witness:
        doc["witness"] = docs.coupling_to_doc(cert.witness)
        text += "\n" + docs.dumps(doc["witness"])
    _emit(args, text, doc)
    return EXIT_OK


def cmd_oracle(args):
    space = load_space(args.space)
    mu, nu = load_measure(args.first, space), load_measure(args.second, space)
    value = transport.oracle_distance(mu, nu)
    _emit(args, format_scalar(value), _value_doc(distance=value))
    return EXIT_OK


def cmd_push(args):
    source, target = load_space(args.source), load_space(args.target)
    f = docs.map_from_doc(_load_json(args.map), source, target)
    mu = load_measure(args.measure, source)
    out = docs.measure_to_doc(pushforward(f, mu, target))
    _emit(args, docs.dumps(out), out)
    return EXIT_OK


def cmd_flatten(args):
    space = load_space(args.space)
    e = load_element(args.element, space)
    target = e.level - 1 if args.level is None else args.level
    out = _element_doc(space, psi_mn(e, target))
    _emit(args, docs.dumps(out), out)
    return EXIT_OK


def cmd_embed(args):
    space = load_space(args.space)
    e = load_element(args.element, space)
    target = e.level + 1 if args.level is None else args.level
    out = _element_doc(space, eta_nm(e, target))
    _emit(args, docs.dumps(out), out)
    return EXIT_OK


def cmd_project(args):
    space = load_space(args.space)
    e = load_element(args.element, space)
    out = _element_doc(space, theta(LimitPoint(e), args.level))
    _emit(args, docs.dumps(out), out)
    return EXIT_OK


def cmd_dplus(args):
    space = load_space(args.space)
    p = LimitPoint(load_element(args.first, space))
    q = LimitPoint(load_element(args.second, space))
    value = d_plus(space, p, q, TowerMetric(space), level=args.level)
    _emit(args, format_scalar(value), _value_doc(distance=value))
    return EXIT_OK


def cmd_cheb(args):
    space = load_space(args.space)
    family = [load_measure(path, space) for path in args.measures]
    radius, center = transport.chebyshev(family)
    cdoc = docs.measure_to_doc(center)
    _emit(args, format_scalar(radius) + "\n" + docs.dumps(cdoc), _value_doc(radius=radius, center=cdoc))
    return EXIT_OK


def cmd_p7(args):
    space = load_space(args.space)
    mu = load_measure(args.measure, space)
    res = p7_check(mu, args.level)
    holds = res.holds and res.set_holds is not False
    fields = dict(epsilon=res.epsilon, lhs=res.lhs, holds=res.holds)
    text = f"epsilon={format_scalar(res.epsilon)} lhs={format_scalar(res.lhs)} holds={str(res.holds).lower()}"
    if res.set_distance is not None:
        fields.update(set_distance=res.set_distance, set_holds=res.set_holds)
        text += f" set_distance={format_scalar(res.set_distance)} set_holds={str(res.set_holds).lower()}"
    _emit(args, text, _value_doc(**fields))
    return EXIT_OK if holds else EXIT_PROPERTY


def cmd_verify(args):
    cfg = GenConfig(
        seed=args.seed,
        cases=args.cases,
        space_size=args.size,
        tower_level=args.level,
        space_model=args.model,
    )
    unknown = sorted(set(args.check or ()) - set(CHECKS))
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(sorted(CHECKS))}")
    report = run_suite(cfg, args.check or None)
    if args.format == "json":
        print(report.to_json(timing=args.timing))
    else:
        print(report.to_text(timing=args.timing))
    return EXIT_OK if report.ok else EXIT_PROPERTY


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idmeasure", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = verb("dist", cmd_dist, "bottleneck distance between two measures")
    p.add_argument("space")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--witness", action="store_true", help="also print an optimal coupling")

    p = verb("oracle", cmd_oracle, "distance by exhaustive search (small supports only)")
    p.add_argument("space")
    p.add_argument("first")
    p.add_argument("second")

    p = verb("push", cmd_push, "image of a measure under a map of spaces")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("map")
    p.add_argument("measure")

    p = verb("flatten", cmd_flatten, "flatten a tower element (default: one level)")
    p.add_argument("space")
    p.add_argument("element")
    p.add_argument("--level", type=int, help="target level (>= 1)")

    p = verb("embed", cmd_embed, "embed a tower element upwards by Dirac wrapping")
    p.add_argument("space")
    p.add_argument("element")
    p.add_argument("--level", type=int, help="target level")

    p = verb("project", cmd_project, "project a direct-limit point to a level")
    p.add_argument("space")
    p.add_argument("element")
    p.add_argument("--level", type=int, required=True)

    p = verb("dplus", cmd_dplus, "direct-limit distance between two tower elements")
    p.add_argument("space")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--level", type=int, help="common level to compare at")

    p = verb("cheb", cmd_cheb, "Chebyshev radius and center of a family of measures")
    p.add_argument("space")
    p.add_argument("measures", nargs="+")

    p = verb("p7", cmd_p7, "distance to the Diracs versus its lifted counterpart")
    p.add_argument("space")
    p.add_argument("measure")
    p.add_argument("--level", type=int, default=1, help="the index i (default 1)")

    p = verb("verify", cmd_verify, "run the seeded invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=GenConfig.cases)
    p.add_argument("--size", type=int, default=GenConfig.space_size)
    p.add_argument("--level", type=int, default=GenConfig.tower_level)
    p.add_argument("--model", choices=("graph", "grid"), default="graph")
    p.add_argument("--check", action="append", help="run only this check (repeatable)")
    p.add_argument("--timing", action="store_true", help="include per-check timings")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (docs.DocumentError, MetricError, MeasureError, TowerError, transport.TransportError,
            UnknownPoint, UsageError, OSError, ValueError) as exc:
        name, msg = type(exc).__name__, str(exc)
        if not msg.startswith(name):
            msg = f"{name}: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

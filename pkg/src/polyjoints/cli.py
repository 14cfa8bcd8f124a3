"""Command-line front end.

Every command writes one JSON report (or a CSV table with ``--format csv``)
to ``--out`` or stdout.  Inputs are read from files or from stdin ("-"), and
may be either raw objects (arrangement, points, certificate) or a previous
report that carries one in its payload, so commands chain through pipes.

Exit codes: 0 when every verdict holds, 2 on a bound or certificate
violation, 1 on usage errors and malformed input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .algebra.calculus import InvariantViolation
from .algebra.field import Field
from .configs import (gen_coplanar_lattice, gen_grid, gen_grid_multijoint, gen_random, gen_random_rational,
                      gen_star, gen_uniform_points)
from .geometry import Arrangement, points_from_json, points_to_json
from .incidence import ff_full_census, incidence_report
from .joints import (coincidence_sum, find_joints, find_joints_naive, find_multijoints, histogram,
                     multijoint_sum, weighted_sum)
from .numeric import rational_power
from .partition import SearchFailed, gk_partition, line_cell_crossings
from .peeling import PeelingCertificate, bound_report, peel, verify_certificate
from .probability import TailQuery, exact_capture, exact_tail, mc_estimate, within_sigma
from .surfaces import Surface, classify_lines, critical_bound_holds
from .vanishing import dvir_polynomial, minimal_vanishing_degree

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- I/O helpers ----------------------------------------------------------------


def _read_json(src: str, stdin=None):
    if src in (None, "-"):
        text, name = (stdin or sys.stdin).read(), "<stdin>"
    else:
        try:
            with open(src) as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {src}: {e.strerror}")
        name = src
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {name}: line {e.lineno} column {e.colno}: {e.msg}")
    return obj


def _load(src, stdin, key: str, parse):
    """(parsed object, sha256 of the canonical JSON it was parsed from)."""
    obj = _payload_item(_read_json(src, stdin), key)
    return parse(obj), hashlib.sha256(_canonical(obj)).hexdigest()


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def _payload_item(obj, key: str):
    if isinstance(obj, dict) and "payload" in obj and isinstance(obj["payload"], dict):
        if key in obj["payload"]:
            return obj["payload"][key]
        raise UsageError(f"report has no {key!r} in its payload")
    return obj


def _arrangement(obj) -> Arrangement:
    try:
        return Arrangement.from_json(obj)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise UsageError(f"not an arrangement: {e}")


def _arrangements(obj) -> list[Arrangement]:
    if not isinstance(obj, list):
        raise UsageError("expected a list of arrangements")
    return [_arrangement(a) for a in obj]


def _points(obj):
    try:
        return points_from_json(obj)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise UsageError(f"not a point set: {e}")


def _certificate(obj) -> PeelingCertificate:
    try:
        return PeelingCertificate.from_json(obj)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise UsageError(f"not a certificate: {e}")


def _dec(x) -> str:
    return str(x)


# -- commands -------------------------------------------------------------------
# Each returns (inputs, params, payload, verdicts, table).


def cmd_generate(a, stdin):
    F = Field.from_tag(a.field)
    kind = a.kind
    params = {"kind": kind, "field": F.tag}
    if kind == "star":
        arr = gen_star(_need(a, "L"), a.n, F)
        params.update(L=a.L, n=a.n)
    elif kind == "grid":
        arr = gen_grid(_need(a, "N"), a.n, F)
        params.update(N=a.N, n=a.n)
    elif kind == "random":
        L = _need(a, "L")
        arr = gen_random(L, a.n, F, a.seed) if F.p is not None else gen_random_rational(L, a.n, a.seed)
        params.update(L=a.L, n=a.n, seed=a.seed)
    elif kind in ("coplanar_lattice", "grid_multijoint"):
        trip = gen_coplanar_lattice(_need(a, "L")) if kind == "coplanar_lattice" else gen_grid_multijoint(_need(a, "N"))
        params.update(L=a.L) if kind == "coplanar_lattice" else params.update(N=a.N)
        return {}, params, {"arrangements": [t.to_json() for t in trip]}, {}, None
    elif kind == "uniform_points":
        pts = gen_uniform_points(_need(a, "S"), a.n, a.seed)
        params.update(S=a.S, n=a.n, seed=a.seed)
        return {}, params, {"points": points_to_json(pts, Field.rational(), a.n)}, {}, None
    else:
        raise UsageError(f"unknown kind {kind!r}")
    return {}, params, {"arrangement": arr.to_json(), "L": arr.L}, {}, None


def _need(a, name):
    v = getattr(a, name)
    if v is None:
        raise UsageError(f"--{name} is required for kind {a.kind}")
    return v


def cmd_detect(a, stdin):
    arr, h = _load(a.arrangement, stdin, "arrangement", _arrangement)
    joints = find_joints(arr)
    F, n, L = arr.field, arr.n, arr.L
    e = Fraction(1, n - 1)
    payload = {
        "field": F.tag, "n": n, "L": L, "joint_count": len(joints),
        "joints": [{"point": [F.format(x) for x in j.point], "K": j.K, "N": j.N} for j in joints],
        "points": points_to_json([j.point for j in joints], F, n),
        "histogram": histogram(joints),
        "sum_N_pow": _dec(weighted_sum(joints, e, 20)),
        "L_pow": _dec(rational_power(L, Fraction(n, n - 1), 20)),
    }
    verdicts = {}
    if L <= a.naive_limit:
        naive = find_joints_naive(arr)
        verdicts["naive_cross_check"] = naive == {j.point: j.N for j in joints}
    return {"arrangement": h}, {"naive_limit": a.naive_limit}, payload, verdicts, payload["histogram"]


def cmd_multijoint(a, stdin):
    if a.collections:
        if len(a.collections) != 3:
            raise UsageError("--collections takes exactly three files")
        loaded = [_load(f, stdin, "arrangement", _arrangement) for f in a.collections]
        arrs = [x for x, _ in loaded]
        inputs = {f"collection{i + 1}": h for i, (_, h) in enumerate(loaded)}
    else:
        arrs, h = _load(a.input, stdin, "arrangements", _arrangements)
        inputs = {"arrangements": h}
        if len(arrs) != 3:
            raise UsageError("need three collections")
    recs = find_multijoints(*arrs)
    Ls = [x.L for x in arrs]
    payload = {
        "L": Ls, "multijoint_count": len(recs),
        "sqrt_L1L2L3": _dec(rational_power(Ls[0] * Ls[1] * Ls[2], Fraction(1, 2), 20)),
        "sum_Nprime_half": _dec(multijoint_sum(recs, Fraction(1, 2), 20)),
        "coincidence_sum": _dec(coincidence_sum(*arrs, places=20)),
        "multijoints": [{"point": [arrs[0].field.format(x) for x in r.point], "N": list(r.counts),
                         "Nprime": r.Nprime} for r in recs],
    }
    return inputs, {}, payload, {}, None


def cmd_vanish(a, stdin):
    (pts, F, n), h = _load(a.points, stdin, "points", _points)
    if a.mode == "dvir":
        res = dvir_polynomial(pts, F, n)
        poly = res.poly
        payload = {"degree_bound": res.degree_bound_used, "nullspace_dim": res.nullspace_dim}
    else:
        d, poly = minimal_vanishing_degree(pts, F, n)
        payload = {"minimal_degree": d}
    payload.update(m=len(pts), n=n, field=F.tag, poly=poly.to_text(), degree=poly.degree)
    verdicts = {"vanishes": not poly.is_zero() and all(poly.evaluate(p) == 0 for p in pts)}
    return {"points": h}, {"mode": a.mode}, payload, verdicts, None


def cmd_peel(a, stdin):
    arr, h = _load(a.arrangement, stdin, "arrangement", _arrangement)
    joints = find_joints(arr)
    cert = peel(arr, joints)
    rep = bound_report(cert, arr.L, arr.n, joints)
    payload = {"certificate": cert.to_json(), "joint_count": len(joints), "steps": len(cert.steps),
               "max_degree": cert.max_degree, "ratio": _dec(rep.ratio),
               "bucket_ratios": [{"N_floor": k[0], "k_floor": k[1], "ratio": _dec(v)} for k, v in rep.buckets.items()]}
    verdicts = {"bound_holds": rep.bound_holds}
    table = payload["bucket_ratios"]
    return {"arrangement": h}, {}, payload, verdicts, table


def cmd_verify(a, stdin):
    if a.arrangement in (None, "-") and a.certificate in (None, "-"):
        raise UsageError("at most one of --arrangement/--certificate may come from stdin")
    arr, h1 = _load(a.arrangement, stdin, "arrangement", _arrangement)
    cert, h2 = _load(a.certificate, stdin, "certificate", _certificate)
    v = verify_certificate(arr, cert)
    payload = {"valid": v.valid, "step": v.step, "reason": v.reason}
    return {"arrangement": h1, "certificate": h2}, {}, payload, {"certificate_valid": v.valid}, None


def cmd_partition(a, stdin):
    (pts, F, n), h = _load(a.points, stdin, "points", _points)
    if F.p is not None:
        raise UsageError("partitioning needs rational points")
    res = gk_partition(pts, a.d, C=Fraction(a.C), mode=a.mode, seed=a.seed)
    payload = {
        "S": res.S, "J": res.poly.J, "step_degrees": res.step_degrees,
        "total_degree": res.poly.total_degree, "factors": [f.to_text() for f in res.poly.factors],
        "cells": {k: len(v) for k, v in res.cells.items()}, "on_zero_set": len(res.on_zero_set),
        "max_cell": res.max_cell, "measured_C": str(res.measured_C), "C": str(res.C),
    }
    verdicts = {"coverage": res.coverage_ok(), "cell_bound": res.cell_bound_holds()}
    inputs = {"points": h}
    if a.lines:
        arr, lh = _load(a.lines, stdin, "arrangement", _arrangement)
        crossings = [line_cell_crossings(ln, res) for ln in arr.lines]
        payload["crossings"] = crossings
        verdicts["crossing_bound"] = all(c <= res.poly.total_degree + 1 for c in crossings)
        inputs["lines"] = lh
    table = [{"cell": k, "size": v} for k, v in payload["cells"].items()]
    return inputs, {"d": a.d, "mode": a.mode, "C": a.C}, payload, verdicts, table


def cmd_incidence(a, stdin):
    (pts, F, n), ph = _load(a.points, stdin, "points", _points)
    arr, lh = _load(a.lines, stdin, "arrangement", _arrangement)
    if arr.field != F or arr.n != n:
        raise UsageError("points and lines live in different spaces")
    lines = [ln for i, ln in enumerate(arr.lines) for _ in range(arr.weight(i))]
    rep = incidence_report(pts, lines, F)
    return {"points": ph, "lines": lh}, {}, rep.to_json(), {}, [rep.to_json()]


def cmd_census(a, stdin):
    rows = []
    for p in a.p:
        rep = ff_full_census(p, a.n)
        rows.append({"p": p, "n": a.n, **rep.to_json()})
    payload = rows[0] if len(rows) == 1 else {"rows": rows}
    verdicts = {}
    if len(rows) > 1:
        ratios = [Fraction(r["ratio"]) for r in rows]
        verdicts["ratio_increasing"] = all(x < y for x, y in zip(ratios, ratios[1:]))
    return {}, {"p": a.p, "n": a.n}, payload, verdicts, rows


def cmd_surface(a, stdin):
    try:
        s = Surface.parse(a.poly, a.factors)
    except ValueError as e:
        raise UsageError(str(e))
    inputs, lines = {}, []
    if a.lines:
        arr, lh = _load(a.lines, stdin, "arrangement", _arrangement)
        if arr.field.p is not None or arr.n != 3:
            raise UsageError("surface lines must be in Q^3")
        lines = list(arr.lines)
        inputs["lines"] = lh
    verdicts_l = classify_lines(s, lines)
    payload = {"poly": s.poly.to_text(("x", "y", "z")), "sf": s.sf.to_text(("x", "y", "z")),
               "degree": s.degree, "lines": [v.to_json() for v in verdicts_l]}
    verdicts = {"critical_bound": critical_bound_holds(s, lines),
                "flat_critical_exclusive": not any(v.flat and v.critical for v in verdicts_l)}
    table = [{"line": i, **v.to_json()} for i, v in enumerate(verdicts_l)]
    return inputs, {"poly": a.poly, "factors": a.factors or []}, payload, verdicts, table


def cmd_furth(a, stdin):
    try:
        q = TailQuery(a.L, a.K, a.A, a.n)
    except ValueError as e:
        raise UsageError(str(e))
    tail = exact_tail(q)
    payload = {"tail": str(tail), "capture": str(exact_capture(q))}
    verdicts = {"mass": tail + exact_capture(q) == 1}
    if a.mc:
        r = mc_estimate(q, a.mc, a.seed, threads=a.threads)
        payload["mc"] = r.to_json()
        verdicts["mc_within_3sigma"] = within_sigma(r, 1 - tail)
    return {}, {"L": a.L, "K": a.K, "A": a.A, "n": a.n, "mc": a.mc, "seed": a.seed}, payload, verdicts, None


def cmd_bench(a, stdin):
    rows = []
    Q = Field.rational()
    for N in a.grid:
        t = time.perf_counter()
        arr = gen_grid(N, 3, Q)
        cert = peel(arr)
        ok = verify_certificate(arr, cert).valid
        rows.append({"task": f"grid{N}_peel_verify", "seconds": round(time.perf_counter() - t, 3), "ok": ok})
    t = time.perf_counter()
    ok = ff_full_census(7, 2).I == 392
    rows.append({"task": "census_p7", "seconds": round(time.perf_counter() - t, 3), "ok": ok})
    t = time.perf_counter()
    res = gk_partition(gen_uniform_points(a.S, 2, a.seed), 8, seed=a.seed)
    rows.append({"task": f"partition_S{a.S}_d8", "seconds": round(time.perf_counter() - t, 3),
                 "ok": res.cell_bound_holds() and res.coverage_ok()})
    # timings live in the table only; the digest covers the verdicts
    return {}, {"grid": a.grid, "S": a.S}, {"tasks": [r["task"] for r in rows]}, \
        {r["task"]: r["ok"] for r in rows}, rows


COMMANDS = {
    "generate": cmd_generate, "detect": cmd_detect, "multijoint": cmd_multijoint, "vanish": cmd_vanish,
    "peel": cmd_peel, "verify": cmd_verify, "partition": cmd_partition, "incidence": cmd_incidence,
    "census": cmd_census, "surface": cmd_surface, "furth": cmd_furth, "bench": cmd_bench,
}


# -- parser -----------------------------------------------------------------------


def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--threads", type=int, default=d(os.cpu_count() or 1))
    p.add_argument("--out", "--report", dest="out", default=d(None))
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="polyjoints", description="Joints, vanishing polynomials, partitions and incidences.")
    top.add_argument("--version", action="version", version=__version__)
    _globals(top, suppress=False)
    sub = top.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help):
        p = sub.add_parser(name, help=help)
        _globals(p, suppress=True)
        return p

    p = add("generate", "build a named configuration")
    p.add_argument("--kind", required=True,
                   choices=("star", "grid", "random", "coplanar_lattice", "grid_multijoint", "uniform_points"))
    p.add_argument("--L", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--S", type=int)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--field", default="rat", help="'rat' or 'fp:<p>'")

    p = add("detect", "find joints and multiplicities")
    p.add_argument("--arrangement", "--in", dest="arrangement", default="-")
    p.add_argument("--naive-limit", type=int, default=40, help="cross-check by brute force up to this many lines")

    p = add("multijoint", "multijoints of three collections")
    p.add_argument("--collections", nargs="+")
    p.add_argument("--input", default="-", help="report or list holding three arrangements")

    p = add("vanish", "vanishing polynomial of a point set")
    p.add_argument("--points", default="-")
    p.add_argument("--mode", choices=("dvir", "minimal"), default="dvir")

    p = add("peel", "peeling certificate")
    p.add_argument("--arrangement", "--in", dest="arrangement", default="-")
    p.add_argument("--cert", dest="out", default=argparse.SUPPRESS, help="where to write the report")

    p = add("verify", "replay a peeling certificate")
    p.add_argument("--arrangement", "--in", dest="arrangement", required=True)
    p.add_argument("--certificate", "--cert", dest="certificate", default="-")

    p = add("partition", "polynomial cell decomposition")
    p.add_argument("--points", "--in", dest="points", default="-")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=("heuristic", "exact-d1"), default="heuristic")
    p.add_argument("--C", default="4")
    p.add_argument("--lines", help="arrangement whose cell crossings are counted")

    p = add("incidence", "point-line incidences")
    p.add_argument("--points", required=True)
    p.add_argument("--lines", required=True)

    p = add("census", "all points and lines of F_p^n")
    p.add_argument("--p", type=int, nargs="+", required=True)
    p.add_argument("--n", type=int, default=2)

    p = add("surface", "critical and flat lines of a surface in Q^3")
    p.add_argument("--poly", default="")
    p.add_argument("--factors", nargs="*", help="factor[:multiplicity] in x, y, z")
    p.add_argument("--lines")

    p = add("furth", "random-subcollection tail probability")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo samples (0 = none)")

    p = add("bench", "timing suite")
    p.add_argument("--grid", type=int, nargs="*", default=[4, 8])
    p.add_argument("--S", type=int, default=2000)
    return top


def make_report(command, argv, inputs, params, payload, verdicts, seconds) -> dict:
    body = {"schema_version": SCHEMA_VERSION, "command": command, "argv": list(argv), "inputs": inputs,
            "params": params, "payload": payload, "verdicts": verdicts}
    body["digest"] = hashlib.sha256(_canonical(body)).hexdigest()
    body["timing"] = {"seconds": round(seconds, 6)}
    return body


def _write(text: str, out, stdout):
    if out in (None, "-"):
        stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    keys = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)  # exact coefficients can run to many thousands of digits
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        return 1
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        inputs, params, payload, verdicts, table = COMMANDS[args.command](args, stdin)
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        return 1
    except (InvariantViolation, SearchFailed) as e:
        print(f"violation: {e}", file=stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=stderr)
        return 1
    report = make_report(args.command, argv, inputs, params, payload, verdicts, time.perf_counter() - t0)
    if args.format == "csv":
        if table is None:
            print(f"error: {args.command} has no tabular output", file=stderr)
            return 1
        _write(_csv(table), args.out, stdout)
    else:
        _write(json.dumps(report, indent=1) + "\n", args.out, stdout)
    failed = [k for k, v in verdicts.items() if not v]
    if failed:
        print(f"violation: {', '.join(failed)}", file=stderr)
        return 2
    return 0


def main():  # pragma: no cover
    sys.exit(run())

"""Command-line harness: named scenarios and ad-hoc queries on definition files.

Exit codes: 0 pass, 1 expectation failure, 2 usage or parse error,
3 resource cap hit (verdict unknown).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from . import scenarios as sc
from .detect import (
    decide_shadowing,
    find_chain,
    jsonable,
    pair_stats,
    sensitivity_times,
)
from .entropy import TimeSequence, entropy_estimate
from .measure import ENUMERATION_CAP, from_record, prohorov_bruteforce, prohorov_fast
from .space import as_fraction, build_space
from .systems import build_system, induced, orbit

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
QUERIES = ("prohorov", "orbit", "chain", "shadowing", "sensitivity", "entropy", "pairstats")


class DefinitionError(ValueError):
    pass


# scenarios --------------------------------------------------------------


def run_scenarios(names, overrides: dict, seed: int, jobs: int = 1) -> dict:
    """Run scenarios and assemble the report (order fixed by registration)."""
    def one(name):
        t = time.perf_counter()
        status, params, payload = sc.run(name, overrides.get(name, {}), seed)
        return {"name": name, "claim": sc.REGISTRY[name].claim, "expected": sc.REGISTRY[name].expected,
                "params": jsonable(params), "status": status, "result": payload,
                "elapsed_s": round(time.perf_counter() - t, 3)}

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(one, names))
    else:
        entries = [one(n) for n in names]
    return {"tool": "measuredyn", "version": __version__, "seed": seed, "scenarios": entries}


def verdict_view(report: dict) -> dict:
    """The report without timings: the part that must be reproducible byte for byte."""
    return {**report, "scenarios": [{k: v for k, v in e.items() if k != "elapsed_s"} for e in report["scenarios"]]}


def report_exit(report: dict) -> int:
    statuses = [e["status"] for e in report["scenarios"]]
    if "fail" in statuses:
        return EXIT_FAIL
    if "cap" in statuses:
        return EXIT_CAP
    return EXIT_PASS


# definition files -------------------------------------------------------


def _number(v):
    return as_fraction(v)


def _point(space, v):
    if isinstance(v, float) and space.kind in ("interval", "circle"):
        v = as_fraction(v)
    return space.point(v)


def load_definition(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DefinitionError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DefinitionError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DefinitionError(f"{path}: top level must be an object")
    out = {"raw": doc}
    field = "space"
    try:
        space = build_space(doc["space"]) if "space" in doc else None
        field = "system"
        system = build_system(doc["system"], space) if "system" in doc else None
        if system is not None:
            space = system.space
        if space is None:
            raise DefinitionError(f"{path}: field 'space': missing (needed unless a zoo system is given)")
        field = "measures"
        measures = {}
        for name, rec in doc.get("measures", {}).items():
            field = f"measures.{name}"
            measures[name] = from_record(space, rec)
    except DefinitionError:
        raise
    except KeyError as exc:
        raise DefinitionError(f"{path}: field '{field}': missing key {exc}") from None
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise DefinitionError(f"{path}: field '{field}': {exc}") from None
    out.update(space=space, system=system, measures=measures, query=doc.get("query", {}))
    return out


def _arg(q: dict, key: str, default=None, required: bool = True):
    if key in q:
        return q[key]
    if default is not None or not required:
        return default
    raise DefinitionError(f"field 'query.{key}': missing")


def run_query(kind: str, d: dict, overrides: dict) -> tuple:
    """``(exit_code, payload)`` for one ad-hoc query."""
    q = {**d["query"], **overrides}
    sp, system = d["space"], d["system"]

    def need_system():
        if system is None:
            raise DefinitionError("field 'system': required for this query")
        return system

    def level(s):
        if q.get("level", "base") == "induced":
            return induced(s), int(_arg(q, "q"))
        return s, None

    if kind == "prohorov":
        names = [q["mu"], q["nu"]] if "mu" in q else list(d["measures"])[:2]
        if len(names) < 2:
            raise DefinitionError("field 'measures': need two measures")
        mu, nu = d["measures"][names[0]], d["measures"][names[1]]
        val = prohorov_fast(mu, nu)
        out = {"measures": names, "distance": val, "float": float(val)}
        if max(len(mu), len(nu)) <= ENUMERATION_CAP:
            brute = prohorov_bruteforce(mu, nu)
            out["oracle_agrees"] = brute == val
        return EXIT_PASS, out
    if kind == "orbit":
        s = need_system()
        x = _point(sp, _arg(q, "x"))
        steps = int(_arg(q, "steps", 10))
        return EXIT_PASS, {"orbit": orbit(s, x, steps)}
    if kind == "chain":
        s, qq = level(need_system())
        x, y = _resolve(d, q, "x"), _resolve(d, q, "y")
        max_len = q.get("max_len")
        chain = find_chain(s, x, y, _number(_arg(q, "delta")), None if max_len is None else int(max_len), q=qq)
        return EXIT_PASS, {"chain": chain, "found": chain is not None}
    if kind == "shadowing":
        s, qq = level(need_system())
        v = decide_shadowing(s, _number(_arg(q, "delta")), _number(_arg(q, "eps")), q=qq)
        return (EXIT_CAP if v.status == "unknown" else EXIT_PASS), {"verdict": v}
    if kind == "sensitivity":
        s = need_system()
        ts = sensitivity_times(s, _point(sp, _arg(q, "x")), _number(_arg(q, "eps")),
                               _number(_arg(q, "delta")), int(_arg(q, "horizon", 50)))
        return EXIT_PASS, {"times": ts}
    if kind == "pairstats":
        s = need_system()
        ps = pair_stats(s, _point(sp, _arg(q, "x")), _point(sp, _arg(q, "y")), int(_arg(q, "horizon", 100)),
                        [_number(t) for t in q.get("thresholds", [])])
        return EXIT_PASS, {"stats": ps, "distances": ps.distances}
    if kind == "entropy":
        s = need_system()
        eps_list = [_number(e) for e in _listed(q.get("eps", ["1/10"]))]
        n_list = [int(n) for n in _listed(q.get("n", list(range(1, 9))))]
        A = TimeSequence(tuple(int(a) for a in q["times"])) if "times" in q else None
        est = entropy_estimate(s, A, eps_list, n_list)
        return EXIT_PASS, {"entropy": est}
    raise DefinitionError(f"unknown query {kind!r}; expected one of {QUERIES}")


def _listed(v) -> list:
    return v if isinstance(v, list) else [v]


def _resolve(d: dict, q: dict, key: str):
    v = _arg(q, key)
    if isinstance(v, str) and v in d["measures"]:
        return d["measures"][v]
    return _point(d["space"], v)


# output -----------------------------------------------------------------


def write_curves(report: dict, path: str) -> None:
    """Entropy curves (``eps, n, a_n, s_n, method, rate``) from the entropy scenario."""
    rows = [r for e in report["scenarios"] if e["name"] == "entropy" for r in e["result"]["fig1_curve"]]
    if not rows:
        raise DefinitionError("--csv needs the entropy scenario in the run")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", "n", "a_n", "s_n", "method", "rate"])
        for r in rows:
            w.writerow([r["eps"], r["n"], r["a_n"], r["s_n"], r["method"], f"{r['rate']:.12g}"])


def _text_report(report: dict) -> str:
    lines = [f"measuredyn {report['version']}  seed={report['seed']}"]
    for e in report["scenarios"]:
        lines.append(f"[{e['status'].upper():4}] {e['name']:24} {e['elapsed_s']:7.2f}s  {e['expected']}")
        if e["status"] != "pass":
            lines.append(f"  expected: {e['expected']}")
            lines.append(f"  observed: {json.dumps(e['result'], sort_keys=True)}")
    return "\n".join(lines)


def _text_query(kind: str, payload: dict) -> str:
    if kind == "prohorov":
        v = payload["distance"]
        return f"P = {v} ({float(Fraction(v)):.12g})"
    if kind == "orbit":
        return " -> ".join(str(x) for x in payload["orbit"])
    return json.dumps(payload, indent=2)


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DefinitionError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="measuredyn", description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", action="append", metavar="NAME", help="scenario to run (repeatable; 'all')")
    ap.add_argument("--param", action="append", metavar="K=V", help="scenario parameter override")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--horizon", type=int, help="override the horizon of scenarios that have one")
    ap.add_argument("--grid", type=int, help="override the grid resolution q of scenarios that have one")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--list", action="store_true", help="list scenarios and the claims they check")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv", metavar="PATH", help="write entropy curves to CSV (entropy query)")
    sub = ap.add_subparsers(dest="command")
    qp = sub.add_parser("query", help="run one operation on a JSON definition file")
    qp.add_argument("kind", choices=QUERIES)
    qp.add_argument("definition")
    qp.add_argument("--param", action="append", metavar="K=V", dest="qparam")
    qp.add_argument("--format", choices=("json", "text"), dest="qformat")
    qp.add_argument("--csv", metavar="PATH", dest="qcsv")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    fmt = getattr(args, "qformat", None) or args.format
    try:
        if args.list:
            for s in sc.REGISTRY.values():
                print(f"{s.name:24} {s.claim}" if fmt == "text" else
                      json.dumps({"name": s.name, "claim": s.claim, "expected": s.expected,
                                  "defaults": jsonable(s.defaults)}))
            return EXIT_PASS
        if args.command == "query":
            d = load_definition(args.definition)
            raw = _parse_params(args.qparam)
            overrides = {k: _maybe_json(v) for k, v in raw.items()}
            code, payload = run_query(args.kind, d, overrides)
            csv_path = args.qcsv or args.csv
            if csv_path and args.kind == "entropy":
                payload["entropy"].write_csv(csv_path)
            payload = jsonable(payload)
            print(_text_query(args.kind, payload) if fmt == "text" else json.dumps(payload, sort_keys=True))
            return code
        if not args.scenario:
            ap.print_usage(sys.stderr)
            print("measuredyn: error: give --scenario NAME, --list or a query", file=sys.stderr)
            return EXIT_USAGE
        names = list(sc.REGISTRY) if "all" in args.scenario else args.scenario
        unknown = [n for n in names if n not in sc.REGISTRY]
        if unknown:
            print(f"measuredyn: error: unknown scenario(s) {unknown}; see --list", file=sys.stderr)
            return EXIT_USAGE
        overrides = {}
        raw = _parse_params(args.param)
        for n in names:
            o = {}
            for k, v in raw.items():
                if k in sc.REGISTRY[n].defaults:
                    o[k] = sc.coerce(n, k, v)
                elif len(names) == 1:
                    sc.coerce(n, k, v)
            for flag, key in ((args.horizon, "horizon"), (args.grid, "q")):
                if flag is not None and key in sc.REGISTRY[n].defaults:
                    o[key] = flag
            overrides[n] = o
        report = run_scenarios(names, overrides, args.seed, args.jobs)
        if args.csv:
            write_curves(report, args.csv)
    except (DefinitionError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"measuredyn: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    print(_text_report(report) if fmt == "text" else json.dumps(report, sort_keys=True))
    return report_exit(report)


def _maybe_json(v: str):
    try:
        return json.loads(v)
    except json.JSONDecodeError:
        return v


if __name__ == "__main__":
    sys.exit(main())

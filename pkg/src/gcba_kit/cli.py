"""Batch command-line front end.

A thin client over the HTTP service: each subcommand builds one request,
sends it to an in-process application instance (or a remote server via
--server), prints the report as canonical JSON on stdout, and writes
sweep/trace tables as CSV to --out.  Exit status 0 means the computation
ran (whatever the verdict), 1 means bad input, 2 means an internal
consistency failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
import tempfile
from typing import Any, Optional

import httpx

from .jsonfmt import canonical_dumps, format_float

DEFAULT_SEEDS = {
    "validate": 20_260_811,
    "openness": 7,
}


def _point(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"point must be JSON: {exc}")
    if not isinstance(doc, dict):
        raise argparse.ArgumentTypeError("point must be a JSON object")
    return doc


def _load_space(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _call(path: str, payload: dict, server: Optional[str]) -> tuple[int, Any]:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
            return resp.status_code, resp.json()

    from .service import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=600.0,
                                     base_url="http://gcba-kit") as client:
            return await client.post(path, json=payload)

    resp = asyncio.run(go())
    return resp.status_code, resp.json()


def _csv_cell(v: Any) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _write_csv(path: str, rows: list[list]) -> None:
    text = "\n".join(",".join(_csv_cell(c) for c in row) for row in rows) + "\n"
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _add_common(p: argparse.ArgumentParser, space: bool = True) -> None:
    if space:
        p.add_argument("--space", required=True, help="path to a space JSON file")
    p.add_argument("--out", help="CSV output path (sweeps and traces)")
    p.add_argument("--seed", type=int, help="random seed override")
    p.add_argument("--server", help="remote service base URL (default: in-process)")


def _add_fiber(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=_point, required=True, help="center point JSON")
    p.add_argument("--a", type=_point, action="append", required=True,
                   help="anchor point JSON (repeatable)")
    p.add_argument("--b", type=_point, required=True, help="witness point JSON")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--c", type=float, default=0.5, help="openness/margin constant")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gcba-kit",
                                 description="CAT(0)/CAT(1) model-space toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural and comparison checks")
    _add_common(p)
    p.add_argument("--quadruples", type=int, default=10_000)

    p = sub.add_parser("distance", help="shortest-path distance")
    _add_common(p)
    p.add_argument("--x", type=_point, required=True)
    p.add_argument("--y", type=_point, required=True)
    p.add_argument("--intrinsic", action="store_true", help="skip the pi-truncation")

    p = sub.add_parser("antipodes", help="set of points at distance >= pi")
    _add_common(p)
    p.add_argument("--xi", type=_point, required=True)

    p = sub.add_parser("antipodal-distance", help="dual-formula antipodal distance")
    _add_common(p)
    p.add_argument("--xi", type=_point, required=True)
    p.add_argument("--eta", type=_point, required=True)

    p = sub.add_parser("check-noncritical", help="noncriticality margins")
    _add_common(p)
    p.add_argument("--xi", type=_point, action="append", help="graph mode collection point")
    p.add_argument("--eta", type=_point, help="graph mode witness direction")
    p.add_argument("--p", type=_point, help="cone mode center")
    p.add_argument("--a", type=_point, action="append", help="cone mode anchor")
    p.add_argument("--b", type=_point, help="cone mode witness point")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--rho", type=float, help="comparison-angle form over B(p, rho)")
    p.add_argument("--resolution", type=float, default=0.05)
    p.add_argument("--verify-ball", action="store_true")

    p = sub.add_parser("search-eta", help="best regular direction")
    _add_common(p)
    p.add_argument("--xi", type=_point, action="append", required=True)

    p = sub.add_parser("find-v", help="orthogonality witness point")
    _add_common(p)
    p.add_argument("--xi", type=_point, action="append", required=True)
    p.add_argument("--eta", type=_point, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("retract", help="fiber retraction of one point")
    _add_common(p)
    _add_fiber(p)
    p.add_argument("--x", type=_point, required=True)
    p.add_argument("--r", type=float, help="ball radius for the range bound")

    p = sub.add_parser("sample-fiber", help="fiber points near the center")
    _add_common(p)
    _add_fiber(p)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--n", type=int, default=8)

    p = sub.add_parser("contract", help="discrete fiber-ball contraction")
    _add_common(p)
    _add_fiber(p)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--n-points", type=int, default=8)
    p.add_argument("--steps", type=int, default=10)

    p = sub.add_parser("openness", help="empirical openness constant")
    _add_common(p)
    _add_fiber(p)
    p.add_argument("--r", type=float, action="append", help="test radius (repeatable)")
    p.add_argument("--samples", type=int, default=6)
    p.add_argument("--targets", type=int, default=32)
    p.add_argument("--verify-targets", type=int, default=0)
    p.add_argument("--injectivity-pairs", type=int, default=0)

    p = sub.add_parser("fiber-sphere", help="extended-map margins on fiber spheres")
    _add_common(p)
    _add_fiber(p)
    p.add_argument("--r", type=float, action="append", help="sphere radius (repeatable)")
    p.add_argument("--n", type=int, default=12)

    p = sub.add_parser("example14", help="cone-angle feasibility sweep")
    _add_common(p, space=False)
    p.add_argument("--k", type=int, default=2, choices=(1, 2))
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=1.2)
    p.add_argument("--step", type=float, default=0.01)

    p = sub.add_parser("sphere-map", help="circle-to-sphere comparison map")
    _add_common(p)
    p.add_argument("--xi", type=_point, action="append", required=True)
    p.add_argument("--eta", type=_point, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--resolution", type=float, default=1e-3)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    return ap


def _build_request(args: argparse.Namespace) -> tuple[str, dict]:
    cmd = args.command
    seed = args.seed if getattr(args, "seed", None) is not None \
        else DEFAULT_SEEDS.get(cmd)
    if cmd == "validate":
        payload = {"space": _load_space(args.space), "quadruples": args.quadruples}
        if seed is not None:
            payload["seed"] = seed
        return "/validate", payload
    if cmd == "distance":
        return "/distance", {"space": _load_space(args.space), "x": args.x,
                             "y": args.y, "truncated": not args.intrinsic}
    if cmd == "antipodes":
        return "/antipodes", {"space": _load_space(args.space), "xi": args.xi}
    if cmd == "antipodal-distance":
        return "/antipodal-distance", {"space": _load_space(args.space),
                                       "xi": args.xi, "eta": args.eta}
    if cmd == "check-noncritical":
        return "/check-noncritical", {
            "space": _load_space(args.space), "xis": args.xi, "eta": args.eta,
            "p": args.p, "a_list": args.a, "b": args.b, "eps": args.eps,
            "delta": args.delta, "rho": args.rho, "resolution": args.resolution,
            "verify_ball": args.verify_ball}
    if cmd == "search-eta":
        return "/search-eta", {"space": _load_space(args.space), "xis": args.xi}
    if cmd == "find-v":
        return "/find-v", {"space": _load_space(args.space), "xis": args.xi,
                           "eta": args.eta, "eps": args.eps, "delta": args.delta}
    fiber = {}
    if cmd in ("retract", "sample-fiber", "contract", "openness", "fiber-sphere"):
        fiber = {"space": _load_space(args.space), "p": args.p, "a_list": args.a,
                 "b": args.b, "eps": args.eps, "delta": args.delta,
                 "rho": args.rho, "c": args.c}
    if cmd == "retract":
        return "/retract", {**fiber, "x": args.x, "r": args.r}
    if cmd == "sample-fiber":
        return "/sample-fiber", {**fiber, "r": args.r, "n": args.n}
    if cmd == "contract":
        return "/contract", {**fiber, "r": args.r, "n_points": args.n_points,
                             "steps": args.steps}
    if cmd == "openness":
        payload = {**fiber, "n_samples": args.samples, "n_targets": args.targets,
                   "verify_targets": args.verify_targets,
                   "injectivity_pairs": args.injectivity_pairs}
        if args.r:
            payload["r_list"] = args.r
        if seed is not None:
            payload["seed"] = seed
        return "/openness", payload
    if cmd == "fiber-sphere":
        payload = {**fiber, "n": args.n}
        if args.r:
            payload["r_list"] = args.r
        return "/fiber-sphere", payload
    if cmd == "example14":
        return "/example14", {"k": args.k, "theta_min": args.theta_min,
                              "theta_max": args.theta_max, "step": args.step}
    if cmd == "sphere-map":
        return "/sphere-map", {"space": _load_space(args.space), "xis": args.xi,
                               "eta": args.eta, "eps": args.eps,
                               "delta": args.delta, "resolution": args.resolution}
    raise AssertionError(f"unhandled command {cmd}")


def _csv_rows(cmd: str, body: dict) -> Optional[list[list]]:
    if cmd == "example14":
        rows = [["theta", "k", "best_margin", "xi2", "eta"]]
        for r in body["rows"]:
            rows.append([r["theta"], r["k"], r["best_margin"],
                         r.get("xi2"), r.get("eta")])
        return rows
    if cmd == "contract":
        rows = [["point", "t", "edge", "offset", "radius", "residual"]]
        for tr in body["traces"]:
            for step in tr["steps"]:
                locus = step["locus"]
                rows.append([tr["point"], step["t"], locus.get("edge"),
                             locus.get("offset"), locus.get("radius"),
                             step["residual"]])
        return rows
    if cmd == "sphere-map":
        rows = [["x", "ftilde_1", "ftilde_2", "local_distortion"]]
        for entry in body.get("table") or []:
            rows.append([entry["x"], entry["f1"], entry["f2"],
                         entry["local_distortion"]])
        return rows
    return None


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        path, payload = _build_request(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    try:
        status, body = _call(path, payload, args.server)
    except httpx.HTTPError as exc:
        print(f"service unreachable: {exc}", file=sys.stderr)
        return 1
    if status >= 500:
        print(canonical_dumps(body), file=sys.stderr)
        return 2
    if status >= 400:
        print(canonical_dumps(body), file=sys.stderr)
        return 1
    if args.out:
        rows = _csv_rows(args.command, body)
        if rows is not None:
            _write_csv(args.out, rows)
    sys.stdout.write(canonical_dumps(body) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line client for the dynamics service.

The CLI is a thin wrapper: it reads the JSON config or graph file, posts it
to the service (in process by default, or to a running server given with
--server), writes any requested output files, prints a one-line summary,
and maps outcomes to exit codes:

    0  success within tolerances
    1  error (bad config, parse failure, unsupported family, runtime error)
    2  run finished without meeting the convergence rule (results written)
    3  comparison or gradient check exceeded its tolerance

All floats in files are printed with 17 significant digits, so a fixed
config and seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .clique import parse_graph_file
from .errors import GrowthDynError
from .reporting import fmt17, json17_dumps

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_TOLERANCE = 3


class ServiceClient:
    """POSTs to a remote server when given one, else to the in-process app."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        response = self._client.post(path, json=payload)
        try:
            body = response.json()
        except ValueError:
            body = {"detail": [{"msg": response.text, "type": "http_error"}]}
        return response.status_code, body


def _print_detail(body: dict) -> None:
    detail = body.get("detail")
    if isinstance(detail, str):
        print(f"error: {detail}", file=sys.stderr)
        return
    if not isinstance(detail, list):
        print(f"error: {body}", file=sys.stderr)
        return
    for item in detail:
        loc = item.get("loc") or []
        # FastAPI prefixes request-body locations with "body"
        loc = [part for part in loc if part != "body"]
        path = "/" + "/".join(str(part) for part in loc) if loc else ""
        kind = item.get("type", "error")
        msg = item.get("msg", "invalid")
        if path:
            print(f"error at {path}: {msg} [{kind}]", file=sys.stderr)
        else:
            print(f"error: {msg} [{kind}]", file=sys.stderr)


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    return raw


def _inject_seed(raw: dict, seed: int, command: str) -> None:
    """Fill --seed into config slots the file leaves open."""
    init = raw.get("initial")
    if isinstance(init, dict) and isinstance(init.get("random"), dict):
        if init["random"].get("seed") is None:
            init["random"]["seed"] = seed
    if command in ("compare", "gradcheck"):
        section = raw.setdefault(command, {})
        if isinstance(section, dict) and section.get("seed") is None:
            section["seed"] = seed


def _resolve(out_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(out_dir, path)


def _write_text(out_dir: str, path: str, text: str) -> str:
    full = _resolve(out_dir, path)
    parent = os.path.dirname(full)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(full, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return full


def _outputs(raw: dict) -> dict:
    outputs = raw.get("outputs")
    return outputs if isinstance(outputs, dict) else {}


def cmd_simulate(client: ServiceClient, args) -> int:
    raw = _load_config(args.config)
    _inject_seed(raw, args.seed, "simulate")
    status, body = client.post("/simulate", raw)
    if status != 200:
        _print_detail(body)
        return EXIT_ERROR
    outputs = _outputs(raw)
    written = []
    if outputs.get("trajectory_csv"):
        written.append(_write_text(args.out_dir, outputs["trajectory_csv"], body["trajectory_csv"]))
    if outputs.get("plot_csv"):
        written.append(_write_text(args.out_dir, outputs["plot_csv"], body["plot_csv"]))
    if outputs.get("report_json"):
        written.append(_write_text(args.out_dir, outputs["report_json"], json17_dumps(body["report"])))
    report = body["report"]
    final = "[" + ", ".join(fmt17(v) for v in report["final"]) + "]"
    print(
        f"{report['family']}: converged={report['converged']} steps={report['steps']} "
        f"t_final={fmt17(report['t_final'])} residual={fmt17(report['residual'])}"
    )
    print(f"final state: {final}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if body["status"] == "ok" else EXIT_NOT_CONVERGED


def cmd_compare(client: ServiceClient, args) -> int:
    raw = _load_config(args.config)
    _inject_seed(raw, args.seed, "compare")
    status, body = client.post("/compare", raw)
    if status != 200:
        _print_detail(body)
        return EXIT_ERROR
    outputs = _outputs(raw)
    if outputs.get("report_json"):
        report = {k: v for k, v in body.items() if k != "status"}
        print(f"wrote {_write_text(args.out_dir, outputs['report_json'], json17_dumps(report))}")
    line = (
        f"{body['family']}: engine vs named field at {body['points']} points, "
        f"max difference {fmt17(body['max_difference'])} (tolerance {fmt17(body['tolerance'])})"
    )
    if body.get("max_scale_error") is not None:
        line += f", max scale error {fmt17(body['max_scale_error'])}"
    print(line)
    return EXIT_OK if body["within_tolerance"] else EXIT_TOLERANCE


def cmd_equilibrium(client: ServiceClient, args) -> int:
    raw = _load_config(args.config)
    _inject_seed(raw, args.seed, "equilibrium")
    status, body = client.post("/equilibrium", raw)
    if status != 200:
        _print_detail(body)
        return EXIT_ERROR
    outputs = _outputs(raw)
    report = body["report"]
    if outputs.get("report_json"):
        print(f"wrote {_write_text(args.out_dir, outputs['report_json'], json17_dumps(report))}")
    point = "[" + ", ".join(fmt17(v) for v in report["point"]) + "]"
    print(
        f"{report['family']}: stability={report['stability']} nash={report['nash']} "
        f"ess={report['ess']} curvature={report['curvature']}"
    )
    print(f"point: {point} residual={fmt17(report['residual'])} flags={report['flags']}")
    return EXIT_OK if body["status"] == "ok" else EXIT_NOT_CONVERGED


def cmd_gradcheck(client: ServiceClient, args) -> int:
    raw = _load_config(args.config)
    _inject_seed(raw, args.seed, "gradcheck")
    status, body = client.post("/gradcheck", raw)
    if status != 200:
        _print_detail(body)
        return EXIT_ERROR
    outputs = _outputs(raw)
    if outputs.get("report_json"):
        report = {k: v for k, v in body.items() if k != "status"}
        print(f"wrote {_write_text(args.out_dir, outputs['report_json'], json17_dumps(report))}")
    if body["informational"]:
        print(
            f"{body['family']}: max residual {fmt17(body['max_residual'])}, "
            f"predicted extra term agrees within {fmt17(body['max_agreement_gap'])} "
            f"(tolerance {fmt17(body['agreement_tol'])})"
        )
    else:
        print(
            f"{body['family']}: max residual {fmt17(body['max_residual'])} "
            f"(bound {fmt17(body['bound'])})"
        )
    return EXIT_OK if body["passed"] else EXIT_TOLERANCE


def cmd_clique(client: ServiceClient, args) -> int:
    graph = parse_graph_file(args.graph)
    payload = {
        "n": graph.n,
        "edges": [[u, v] for u, v in graph.edges],
        "restarts": args.restarts,
        "lambda": args.lam,
        "seed": args.seed,
    }
    status, body = client.post("/clique", payload)
    if status != 200:
        _print_detail(body)
        return EXIT_ERROR
    result = {"omega": body["omega"], "value": body["value"], "clique": body["clique"]}
    print(json17_dumps(result), end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--server",
        default=argparse.SUPPRESS,
        help="base URL of a running service (default: run in process)",
    )
    common.add_argument(
        "--out-dir",
        dest="out_dir",
        default=argparse.SUPPRESS,
        help="directory for relative output paths (default: current directory)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS,
        help="seed for random initial conditions, probe points and restarts (default 0)",
    )

    parser = argparse.ArgumentParser(
        prog="growthdyn",
        description="Evolutionary game dynamics via growth transforms.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate a dynamics config")
    p.add_argument("config", help="experiment config JSON")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("compare", parents=[common],
                       help="check the engine field against the named family field")
    p.add_argument("config", help="experiment config JSON")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("equilibrium", parents=[common],
                       help="integrate to a rest point and analyze it")
    p.add_argument("config", help="experiment config JSON")
    p.set_defaults(handler=cmd_equilibrium)

    p = sub.add_parser("gradcheck", parents=[common],
                       help="compare the energy gradient against the engine fitness")
    p.add_argument("config", help="experiment config JSON")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("clique", parents=[common],
                       help="estimate a graph's clique number on the simplex")
    p.add_argument("graph", help="edge-list text file")
    p.add_argument("--restarts", type=int, default=50, help="number of random starts")
    p.add_argument("--lam", type=float, default=0.5,
                   help="positivity shift for the multiplicative map")
    p.set_defaults(handler=cmd_clique)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # the global flags use SUPPRESS so a value given before the subcommand
    # is not clobbered by the subparser pass; fill the defaults here
    for name, default in (("server", None), ("out_dir", "."), ("seed", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        if args.command == "serve":
            return cmd_serve(args)
        client = ServiceClient(args.server)
        return args.handler(client, args)
    except (OSError, ValueError, GrowthDynError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

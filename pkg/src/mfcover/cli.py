"""Command-line client.  Commands run in-process through the service handlers, or
against a running service with --server URL."""

import argparse
import json
import sys
from pathlib import Path

from .service import EXIT, handle

USAGE = 3


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--field", default="fp:32003", help="q or fp:P (default fp:32003)")
    p.add_argument("--prec", type=int, default=None, help="override the precision of input files")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-cache", action="store_true", help="disable the Hom/syzygy cache")
    p.add_argument("--catalog-path", default=None, help="directory with a manifest.json")
    p.add_argument("--server", default=None, help="send the request to a running service at this URL")
    return p


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SystemExit(_usage(f"cannot read {path}: {exc.strerror}"))


def _usage(msg):
    print(json.dumps({"schema": "v1", "status": "error", "error": {"type": "usage", "message": msg}}), file=sys.stderr)
    return USAGE


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _ideal(text):
    name, sep, gens = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=e1,e2,..., got {text!r}")
    return name, _ints(gens)


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="mfcover", description="Matrix factorizations over branched covers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="validate an MF file")
    p.add_argument("file")
    p = sub.add_parser("tensor", parents=[common], help="Yoshino tensor product of two MF files")
    p.add_argument("file1")
    p.add_argument("file2")
    p = sub.add_parser("cover", parents=[common], help="syzygy over the n-fold branched cover")
    p.add_argument("file")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--var", default="y")
    p = sub.add_parser("decompose", parents=[common], help="Krull-Remak-Schmidt decomposition")
    p.add_argument("file")
    p.add_argument("--catalog", default=None, help="E6, E8 or A:a (default: detect from the potential)")
    p = sub.add_parser("approx", parents=[common], help="Sigma_k-approximation sequence")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--side", choices=["right", "left"], default="right")
    p.add_argument("--catalog", default=None)
    p = sub.add_parser("sigma", parents=[common], help="Sigma_k membership table")
    p.add_argument("file")
    p.add_argument("--catalog", default=None)
    p = sub.add_parser("quiver", parents=[common], help="quiver of the endomorphism ring of a sum of ideals")
    p.add_argument("--ring", type=_ints, default=None, help="semigroup generators a,b")
    p.add_argument("--ideals", type=_ideal, nargs="*", default=None, help="NAME=e1,e2 ...")
    p.add_argument("--catalog", default=None, help="take the ideals of a catalog (E6 or E8)")
    p.add_argument("--no-ring-vertex", action="store_true", help="do not add the vertex R#")
    p.add_argument("--format", choices=["text", "dot"], default="text")
    p = sub.add_parser("resolve", parents=[common], help="projective resolution of a simple module")
    p.add_argument("--catalog", default="E6")
    p.add_argument("--vertex", required=True)
    p.add_argument("--steps", type=int, default=5)
    p = sub.add_parser("bounds", parents=[common], help="generation-time bounds for x0^a0 + ... + xd^ad")
    p.add_argument("--exponents", type=_ints, required=True)
    p.add_argument("--cover", type=_ints, default=None, help="cover exponents (default: all but the first)")
    p.add_argument("--sweep", type=int, default=0, help="also check a random sweep of this many lists")
    p = sub.add_parser("repro", parents=[common], help="reproduce a worked example against golden facts")
    p.add_argument("label", choices=["e6", "e8"])
    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _params(args):
    c = args.command
    if c == "verify":
        return {"mf": _read(args.file)}
    if c == "tensor":
        return {"left": _read(args.file1), "right": _read(args.file2)}
    if c == "cover":
        return {"mf": _read(args.file), "n": args.n, "var": args.var}
    if c == "decompose":
        return {"mf": _read(args.file), "catalog": args.catalog}
    if c == "approx":
        return {"mf": _read(args.file), "k": args.k, "side": args.side, "catalog": args.catalog}
    if c == "sigma":
        return {"mf": _read(args.file), "catalog": args.catalog}
    if c == "quiver":
        ideals = dict(args.ideals) if args.ideals else None
        return {"ring": args.ring, "ideals": ideals, "catalog": args.catalog, "ring_vertex": not args.no_ring_vertex}
    if c == "resolve":
        return {"catalog": args.catalog, "vertex": args.vertex, "steps": args.steps}
    if c == "bounds":
        return {"exponents": args.exponents, "cover_exponents": args.cover, "sweep": args.sweep}
    if c == "repro":
        return {"label": args.label}
    raise ValueError(c)


def _config(args):
    return {"field": args.field, "prec": args.prec, "seed": args.seed, "cache": not args.no_cache,
            "catalog_path": args.catalog_path}


def _remote(url, command, params, config):
    import httpx
    r = httpx.post(url.rstrip("/") + f"/v1/{command}", json={"config": config, "params": params}, timeout=600)
    return r.json()


def _human(rep, args):
    status = rep.get("status")
    if status == "error" or status == "inconclusive":
        return f"{status}: {rep['error']['message']}"
    res = rep["result"]
    c = rep["command"]
    lines = [f"{c}: {status}"]
    if c in ("tensor", "cover"):
        lines.append(res["mf"]["text"].rstrip())
        if res.get("match"):
            lines.append(f"match: {res['match']}")
    elif c == "quiver":
        lines.append((res["dot"] if args.format == "dot" else res["text"]).rstrip())
    elif c == "resolve":
        lines.append(res["text"])
        lines.append(f"kernel of d({res['vertex']}): {res['kernel']}; periodic from step {res['onset']} "
                     f"with period {res['period']}")
    elif c == "repro":
        for f in res["facts"]:
            lines.append(f"  [{'ok' if f['passed'] else 'FAIL'}] {f['id']}")
        bad = res["first_failure"]
        if bad:
            lines.append(f"first violated fact: {bad['id']}")
            lines.append(f"  expected: {json.dumps(bad['expected'], sort_keys=True)}")
            lines.append(f"  got:      {json.dumps(bad['got'], sort_keys=True)}")
            if bad.get("note"):
                lines.append(f"  note: {bad['note']}")
    else:
        for k, v in res.items():
            lines.append(f"  {k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else 0
    if args.command == "serve":
        import uvicorn
        uvicorn.run("mfcover.service:app", host=args.host, port=args.port)
        return 0
    try:
        params = _params(args)
    except SystemExit as exc:
        return exc.code
    config = _config(args)
    if args.server:
        rep = _remote(args.server, args.command, params, config)
    else:
        rep = handle(args.command, params, config)
    if args.json:
        print(json.dumps(rep, sort_keys=True, indent=1))
    else:
        print(_human(rep, args))
    return EXIT.get(rep.get("status"), USAGE)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``tvass COMMAND MODEL [options]``.

Exit status is 0 for a conclusive answer, 10 for UNKNOWN and 2 for usage
or parse errors.  ``check`` exits 0 whether the certificate is VALID or
INVALID, since both are conclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import decide, formats, lps
from .core import UsageError
from .woca import tvass_to_woca

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNKNOWN = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tvass", description="Decide and certify 2-TVASS queries.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def query(name, help_, to=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("model", help="model file")
        sp.add_argument("--from", dest="source", required=True, metavar="'STATE N1 N2'")
        if to:
            sp.add_argument("--to", dest="target", required=True, metavar="'STATE N1 N2'")
        sp.add_argument("--cap-norm", type=int, default=64)
        sp.add_argument("--cap-steps", type=int, default=100_000)
        sp.add_argument("--const-c", type=int, default=None)
        sp.add_argument("--json", action="store_true")
        return sp

    query("reach", "reachability with an LPS certificate", to=True)
    query("bounded", "boundedness from a configuration")
    query("terminates", "termination from a configuration")

    sp = sub.add_parser("check", help="replay a certificate")
    sp.add_argument("model")
    sp.add_argument("--from", dest="source", required=True)
    sp.add_argument("--to", dest="target", required=True)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("system", help="print the inequality system of a scheme")
    sp.add_argument("model")
    sp.add_argument("--from", dest="source", required=True)
    sp.add_argument("--to", dest="target", required=True)
    sp.add_argument("--cert", required=True, help="lps certificate whose scheme is used (counts ignored)")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("woca", help="print the weighted one-counter image of a model")
    sp.add_argument("model")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("gen", help="print a random model")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--states", type=int, default=3)
    sp.add_argument("--max-norm", type=int, default=2)
    sp.add_argument("--test-density", type=float, default=0.2)
    sp.add_argument("--edge-prob", type=float, default=0.5)
    return p


def _load_model(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return formats.parse_model(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_cert(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return formats.certificate_from_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _verdict(v: decide.Verdict, as_json: bool, out) -> int:
    print(v.label, file=out)
    if as_json:
        print(json.dumps(v.to_json(), indent=2), file=out)
    return EXIT_OK if v.conclusive else EXIT_UNKNOWN


def _run(args, out) -> int:
    if args.command == "gen":
        model = formats.random_instance(args.seed, args.states, args.max_norm, args.test_density, args.edge_prob)
        out.write(formats.print_model(model))
        return EXIT_OK

    model = _load_model(args.model)
    if args.command == "woca":
        w, tmap = tvass_to_woca(model)
        if args.json:
            doc = {
                "states": list(w.base.states),
                "transitions": [
                    {"id": t.id, "source": t.source, "action": "tst" if t.is_test else t.action[0],
                     "target": t.target, "weight": w.weights[t.id]}
                    for t in w.base.transitions
                ],
                "chains": {k: list(v) for k, v in tmap.chains.items()},
            }
            print(json.dumps(doc, indent=2), file=out)
        else:
            print("states " + " ".join(w.base.states), file=out)
            for t in w.base.transitions:
                act = "tst" if t.is_test else f"{t.action[0]:+d}"
                print(f"trans {t.id} {t.source} {act} {t.target} weight {w.weights[t.id]:+d}", file=out)
        return EXIT_OK

    source = formats.parse_configuration(args.source, model.dimension)
    opts = None
    if args.command in ("reach", "bounded", "terminates"):
        opts = decide.Options(args.cap_norm, args.cap_steps, args.const_c)
    if args.command == "reach":
        target = formats.parse_configuration(args.target, model.dimension)
        return _verdict(decide.reach(model, source, target, opts), args.json, out)
    if args.command == "bounded":
        return _verdict(decide.bounded(model, source, opts), args.json, out)
    if args.command == "terminates":
        return _verdict(decide.terminates(model, source, opts), args.json, out)

    target = formats.parse_configuration(args.target, model.dimension)
    cert = _load_cert(args.cert)
    if args.command == "check":
        ok = decide.check_certificate(model, source, target, cert)
        print("VALID" if ok else "INVALID", file=out)
        if args.json:
            print(json.dumps({"schema": decide.SCHEMA, "valid": ok}), file=out)
        return EXIT_OK
    # system
    if not isinstance(cert, lps.CountedLps):
        raise UsageError("system needs an lps certificate")
    system = lps.build_system(model, cert.scheme, source.counters, target.counters)
    if args.json:
        rows = [{"coeffs": list(r.coeffs), "const": r.const, "tag": r.tag} for r in system.rows]
        print(json.dumps({"schema": decide.SCHEMA, "num_vars": system.num_vars, "rows": rows}, indent=2), file=out)
    else:
        for r in system.rows:
            lhs = " ".join(f"{a:+d}*n{j + 1}" for j, a in enumerate(r.coeffs)) or "0"
            print(f"{lhs} >= {r.const}    # {r.tag}", file=out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
        return _run(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

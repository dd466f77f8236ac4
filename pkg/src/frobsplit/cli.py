"""``frobsplit`` command-line front end.

Every command builds a report ``{schema, tool, version, command, config,
payload, ok, timings}``.  Everything except ``timings`` depends only on the
configuration, so JSON output is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import __version__
from .builtins import UnknownBuiltin, builtin_group, builtin_hypersurface
from .fields import FieldError, perfect_closure
from .frobdecomp import (NotMonomialError, decompose, fpure_split_witness, hilbert_check,
                         verify_perm_map)
from .fsing import (FsingError, HypersurfacePresentation, fedder_test, frobenius_closure_check,
                    sandwich_check, unipotent_group, verify_orbit_identity,
                    verify_presentation)
from .groups import CapExceeded, GroupError, MatrixGroup, pseudoreflection_and_smallness
from .modrep import ModuleError, distinct_witnesses
from .parsing import ParseError, parse_element, parse_group_text, parse_poly_text
from .polyring import PolynomialError

SCHEMA = 1

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    options: dict = dc_field(default_factory=dict)
    fmt: str = "text"
    out: str | None = None
    workers: int = 1
    cap: int | None = None

    def __post_init__(self):
        for key in ("e", "max_e", "max_degree"):
            v = self.options.get(key)
            if v is not None and v < 0:
                raise ValueError(f"--{key.replace('_', '-')} must be nonnegative")
        if self.cap is not None and self.cap < 1:
            raise ValueError("--cap must be at least 1")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")


@dataclass
class Report:
    command: str
    config: dict
    payload: dict
    ok: bool
    timings: dict

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "tool": "frobsplit",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "payload": self.payload,
            "ok": self.ok,
            "timings": self.timings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# inputs

def load_group(opts: dict, cap: int | None) -> tuple[MatrixGroup, str]:
    if opts.get("group"):
        path = Path(opts["group"])
        gf = parse_group_text(path.read_text())
        G = MatrixGroup(gf.field, gf.generators, names=gf.names, relators=gf.relators,
                        abstract_order=gf.order, cap=cap)
        return G, str(path)
    name = opts.get("builtin")
    if not name:
        raise ValueError("give --group FILE or --builtin NAME")
    alpha = None
    if opts.get("alpha"):
        alpha = parse_element(opts["alpha"], perfect_closure(3))
    G = builtin_group(name, p=opts.get("p"), alpha=alpha)
    if cap is not None and G.order > cap:
        raise CapExceeded(f"group order exceeds cap {cap}")
    return G, name


def load_hypersurface(opts: dict) -> tuple[HypersurfacePresentation, str]:
    if opts.get("file"):
        path = Path(opts["file"])
        pf = parse_poly_text(path.read_text())
        if len(pf.polys) != 1:
            raise ParseError("a hypersurface file needs exactly one poly line")
        return HypersurfacePresentation(pf.ring, pf.polys[0]), str(path)
    name = opts.get("builtin")
    if not name:
        raise ValueError("give --file FILE or --builtin hypersurface-<p>")
    return builtin_hypersurface(name), name


# ---------------------------------------------------------------------------
# commands

def _decompose(cfg: RunConfig) -> tuple[dict, bool]:
    opts = cfg.options
    G, gid = load_group(opts, cfg.cap)
    e_values = [opts["e"]] if opts.get("max_e") is None else list(range(1, opts["max_e"] + 1))
    runs = []
    ok = True
    for e in e_values:
        rep = decompose(G, e, workers=cfg.workers, group_id=gid)
        run = rep.to_dict()
        ok = ok and rep.rank_check
        D = opts.get("max_degree")
        if D is not None:
            perm = [verify_perm_map(G, s.exps, e, D) for s in rep.summands]
            hilb = hilbert_check(G, e, D)
            split = fpure_split_witness(G, e, D)
            run["checks"] = {
                "max_degree": D,
                "perm_maps_ok": all(v.ok for v in perm),
                "perm_maps_failed": [v.representative for v in perm if not v.ok],
                "hilbert": hilb,
                "split": split.to_dict(),
            }
            ok = ok and all(v.ok for v in perm) and all(r["ok"] for r in hilb) and split.ok
        runs.append(run)
    payload = {"group": gid, "field": str(G.field.spec), "order": G.order,
               "smallness": pseudoreflection_and_smallness(G).to_dict(), "runs": runs}
    return payload, ok


def _counterexample(cfg: RunConfig) -> tuple[dict, bool]:
    opts = cfg.options
    alpha = parse_element(opts["alpha"], perfect_closure(3)) if opts.get("alpha") else None
    rep = distinct_witnesses(opts.get("max_e", 2), alpha)
    return rep.to_dict(), rep.ok


def _fsing(cfg: RunConfig) -> tuple[dict, bool]:
    opts = cfg.options
    check = opts["check"]
    if check in ("identity51", "orbit-identity"):
        v = verify_orbit_identity(opts["p"])
        return v.to_dict(), v.ok
    if check == "sandwich":
        p = opts["p"]
        v = sandwich_check(p)
        closure = frobenius_closure_check(p)
        fedder = fedder_test(builtin_hypersurface(f"hypersurface-{p}"))
        payload = {"sandwich": v.to_dict(), "frobenius_closure": closure.to_dict(),
                   "fedder": fedder.to_dict(), "group_order": unipotent_group(p).order}
        good = v.ok and closure.ok and not fedder.f_pure and payload["group_order"] == p ** 3
        return payload, good
    if check == "fedder":
        H, name = load_hypersurface(opts)
        v = fedder_test(H)
        payload = {"input": name, **v.to_dict()}
        expect = opts.get("expect")
        if expect is None:
            return payload, True
        return payload, v.f_pure == (expect == "f-pure")
    if check == "presentation":
        text = Path(opts["file"]).read_text() if opts.get("file") else None
        v = verify_presentation(text)
        return v.to_dict(), v.ok
    raise ValueError(f"unknown fsing check {check!r}")


COMMANDS = {"decompose": _decompose, "counterexample": _counterexample, "fsing": _fsing}


def run(cfg: RunConfig) -> Report:
    if cfg.command not in COMMANDS:
        raise ValueError(f"unknown command {cfg.command!r}")
    start = time.perf_counter()
    payload, ok = COMMANDS[cfg.command](cfg)
    elapsed = time.perf_counter() - start
    config = {k: v for k, v in sorted(cfg.options.items()) if v is not None}
    return Report(cfg.command, config, payload, ok,
                  {"seconds": round(elapsed, 6), "workers": cfg.workers})


# ---------------------------------------------------------------------------
# text rendering

def render_text(report: Report) -> str:
    lines = [f"frobsplit {report.command}: {'PASS' if report.ok else 'FAIL'}"]
    p = report.payload
    if report.command == "decompose":
        lines.append(f"group {p['group']} over {p['field']}, order {p['order']}")
        for run in p["runs"]:
            rc = run["rank_check"]
            lines.append(f"e={run['e']} q={report_q(run)}: rank {rc['sum_of_orbit_sizes']}"
                         f"/{rc['expected']}")
            for c in run["classes"]:
                shifts = ", ".join(c["shifts"][:8]) + (" ..." if len(c["shifts"]) > 8 else "")
                cert = " [indecomposable]" if c["certified_indecomposable"] else ""
                lines.append(f"  {c['name']} x{c['multiplicity']}  |H|={c['stabilizer_order']}"
                             f"  {c['label']}{cert}  shifts: {shifts}")
            if "checks" in run:
                ch = run["checks"]
                hok = all(r["ok"] for r in ch["hilbert"])
                lines.append(f"  checks up to degree {ch['max_degree']}: coset-sum maps "
                             f"{'ok' if ch['perm_maps_ok'] else 'FAILED'}, Hilbert function "
                             f"{'ok' if hok else 'FAILED'}, splitting "
                             f"{'ok' if ch['split']['ok'] else 'FAILED'}")
    elif report.command == "counterexample":
        lines.append(f"alpha = {p['alpha']}")
        for w in p["witnesses"]:
            lines.append(f"  e={w['e']} degree {w['degree']}: ann = {w['annihilator']}"
                         f"  socle dim {w['socle_dim']}  {'ok' if w['ok'] else 'FAILED'}")
        lines.append(f"pairwise distinct: {p['pairwise_distinct']}")
        lines.append(f"closed form for sigma^i tau^j: "
                     f"{'ok' if all(r['ok'] for r in p['closed_form']) else 'FAILED'}")
        s = p["smallness"]
        lines.append(f"order {s['order']}, pseudoreflections {len(s['pseudoreflections'])}, "
                     f"faithful {s['faithful']}, small {s['small']}")
    else:
        lines.append(json.dumps(p, indent=2, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def report_q(run: dict) -> int:
    return run["p"] ** run["e"]


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--cap", type=int, default=None,
                        help="maximum group order (default: $FROBSPLIT_CAP or 10^6)")

    parser = argparse.ArgumentParser(prog="frobsplit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"frobsplit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common],
                       help="split (S^G)^(1/q) into orbit summands for a monomial group")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--group", help="group file")
    src.add_argument("--builtin", help="a3, z4-f2, cyclic-<n>, veronese-<n>, trivial-<n>, ...")
    d.add_argument("--e", type=int, default=1)
    d.add_argument("--max-e", type=int, default=None, help="run e = 1..MAX_E instead of --e")
    d.add_argument("--max-degree", type=int, default=None,
                   help="also verify coset-sum maps, Hilbert function and splitting up to this degree")
    d.add_argument("--p", type=int, default=None, help="characteristic for cyclic-<n>/trivial-<n>")
    d.add_argument("--alpha", default=None)

    c = sub.add_parser("counterexample", parents=[common],
                       help="annihilator witnesses for the twisted lowest-degree components")
    c.add_argument("--max-e", type=int, default=2)
    c.add_argument("--alpha", default=None, help="element of GF(3)(t)^(1/3^inf), default t")

    f = sub.add_parser("fsing", help="identity, membership and F-purity checks")
    fsub = f.add_subparsers(dest="check", required=True)
    for name in ("orbit-identity", "identity51"):
        x = fsub.add_parser(name, parents=[common], help="orbit product identity for t^p")
        x.add_argument("--p", type=int, required=True)
    x = fsub.add_parser("sandwich", parents=[common],
                        help="A <= S^G <= A^(1/p), Frobenius closure and Fedder for the hypersurface")
    x.add_argument("--p", type=int, required=True)
    x = fsub.add_parser("fedder", parents=[common], help="Fedder's F-purity test for a hypersurface")
    srcf = x.add_mutually_exclusive_group(required=True)
    srcf.add_argument("--file")
    srcf.add_argument("--builtin")
    x.add_argument("--expect", choices=("f-pure", "not-f-pure"), default=None)
    x = fsub.add_parser("presentation", parents=[common],
                        help="invariants, orbit product and relation of the stored presentation")
    x.add_argument("--file", default=None, help="alternative presentation data file")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    skip = {"command", "format", "out", "workers", "cap"}
    options = {k: v for k, v in vars(args).items() if k not in skip}
    return RunConfig(args.command, options, args.format, args.out, args.workers, args.cap)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except ParseError as exc:
        print(f"frobsplit: parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CapExceeded, GroupError, NotMonomialError, FieldError, ModuleError, FsingError,
            PolynomialError, UnknownBuiltin, ValueError, OSError) as exc:
        print(f"frobsplit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = report.to_json() if cfg.fmt == "json" else render_text(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

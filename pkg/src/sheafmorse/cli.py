"""``sheafmorse`` command line.

Objects are named on the workspace complex ``K``.  Quotient commands work
in the context cast on the double subdivision of ``K`` and pull objects
back along the subdivision first; ``--refined`` names them on the
subdivision directly.

Exit codes: 0 success, 1 parse error, 2 validation error, 3 resource ceiling.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Sequence

from . import io
from .acceptance import run_all
from .errors import ParseError, ResourceLimitError, SheafMorseError, ValidationError
from .facets import ConormalPoint1D, subdivide_1d_times
from .limits import ceilings
from .microsheaf import microstalk, microsupport_1d, resolve_module, sections, stalk
from .theatre import (StopSpec1D, auto_cast_1d, casting_independence, casting_problems_1d, morse_character, peel,
                      quotient_hom, representable_collection, tower_replacement)
from .twisted import HomComplex, pullback
from .zchain import CohomologyReport, cohomology

DEFAULT_WORKSPACE = "sheafmorse-workspace.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


# -- rendering -----------------------------------------------------------------


def _report_text(r: CohomologyReport) -> str:
    if not r.groups:
        return "zero in every degree"
    lines = []
    for n, (rank, tors) in sorted(r.groups.items()):
        line = f"degree {n}: rank {rank}"
        if tors:
            line += " torsion " + " ".join(str(t) for t in tors)
        lines.append(line)
    if r.level is not None:
        lines.append(f"(level {r.level})")
    return "\n".join(lines)


def _text(payload: Any, indent: str = "") -> str:
    if isinstance(payload, CohomologyReport):
        return "\n".join(indent + line for line in _report_text(payload).splitlines())
    if isinstance(payload, dict):
        out = []
        for k, v in payload.items():
            if isinstance(v, (dict, CohomologyReport)) or (isinstance(v, list) and v and isinstance(v[0], dict)):
                out.append(f"{indent}{k}:")
                out.append(_text(v, indent + "  "))
            else:
                out.append(f"{indent}{k}: {_scalar(v)}")
        return "\n".join(out)
    if isinstance(payload, list):
        items = []
        for v in payload:
            body = _text(v, indent + "  ") if isinstance(v, dict) else indent + "  " + _scalar(v)
            items.append(indent + "- " + body[len(indent) + 2:])
        return "\n".join(items)
    return indent + _scalar(payload)


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ", ".join(f"({','.join(map(str, x))})" if isinstance(x, list) else _scalar(x) for x in v) if v else "(none)"
    return str(v)


def _jsonable(payload: Any) -> Any:
    if isinstance(payload, CohomologyReport):
        return io.report_to_json(payload)
    if isinstance(payload, dict):
        return {k: _jsonable(v) for k, v in payload.items()}
    if isinstance(payload, list):
        return [_jsonable(v) for v in payload]
    return payload


def emit(payload: Any, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(io.dumps(_jsonable(payload)))
    else:
        out.write(_text(payload) + "\n")


# -- workspace -----------------------------------------------------------------


def _workspace_path(args) -> str:
    return args.workspace or os.environ.get("SHEAFMORSE_WORKSPACE") or DEFAULT_WORKSPACE


def _parse_points(text: str) -> frozenset[ConormalPoint1D]:
    pts = []
    for item in filter(None, text.split(",")):
        v, sep, sign = item.rpartition(":")
        if not sep:
            raise ParseError(f"stop points look like v:+ or v:-, got {item!r}")
        pts.append(ConormalPoint1D(v, sign))
    return frozenset(pts)


def load_workspace(args) -> io.Workspace:
    if args.complex:
        ws = io.Workspace(io.parse_complex_spec(args.complex))
    else:
        path = _workspace_path(args)
        if not os.path.exists(path):
            raise ParseError(f"no workspace at {path!r}; pass --complex or run `example NAME:N`")
        ws = io.Workspace.from_json(io.load_json_file(path), path)
    if args.stop is not None:
        if os.path.exists(args.stop):
            ws.stop = io.stop_from_json(io.load_json_file(args.stop), args.stop)
        else:
            ws.stop = _parse_points(args.stop)
    return ws


class _Quotient:
    """The context on the double subdivision and the way names are read into it."""

    def __init__(self, ws: io.Workspace, refined: bool):
        self.ws = ws
        self.ac = auto_cast_1d(ws.complex, StopSpec1D(ws.complex, ws.stop))
        self.ctx = self.ac.context()
        self.refined = refined

    def obj(self, name: str):
        if self.refined:
            return io.resolve_object(self.ws, name, self.ac.complex.poset)
        return pullback(self.ac.refinement, io.resolve_object(self.ws, name))

    def character(self, name: str):
        # vertices of K survive in the subdivision, so CAST: names are always read there
        if self.refined or name.startswith("CAST:"):
            c = io.resolve_casting(self.ws, name, self.ac.complex)
            stop = self.ac.stop
            X = morse_character(c)
        else:
            c = io.resolve_casting(self.ws, name)
            stop = StopSpec1D(self.ws.complex, self.ws.stop)
            X = pullback(self.ac.refinement, morse_character(c).obj)
        problems = casting_problems_1d(c, stop)
        if problems:
            raise ValidationError(f"casting {name!r} is invalid: {'; '.join(problems)}")
        return X


# -- commands ------------------------------------------------------------------


def cmd_hom(args, ws):
    return cohomology(HomComplex(io.resolve_object(ws, args.a), io.resolve_object(ws, args.b)).complex)


def cmd_sections(args, ws):
    return sections(io.resolve_open(ws, args.open), io.resolve_object(ws, args.obj))


def cmd_stalk(args, ws):
    return stalk(io.stratum_from_name(ws.poset, args.stratum), io.resolve_object(ws, args.obj))


def cmd_microstalk(args, ws):
    return microstalk(io.resolve_casting(ws, args.casting), io.resolve_object(ws, args.obj))


def cmd_morse(args, ws):
    X = morse_character(io.resolve_casting(ws, args.casting))
    return io.twisted_to_json(X.obj)


def cmd_quotient_hom(args, ws):
    q = _Quotient(ws, args.refined)
    return quotient_hom(q.ctx, q.obj(args.a), q.obj(args.b), args.level)


def cmd_tower(args, ws):
    q = _Quotient(ws, args.refined)
    b = q.obj(args.obj)
    T = tower_replacement(q.ctx, b, args.max_iter)
    return {"stabilized": T.stabilized, "iterations": T.iterations, "sizes": T.sizes,
            "evaluations": {q.ac.complex.poset.key(s): stalk(s, T.obj) for s in range(len(q.ac.complex.poset))}}


def cmd_microsupport(args, ws):
    pts = microsupport_1d(io.resolve_object(ws, args.obj))
    return {"points": [p.to_json() for p in pts]}


def cmd_peel(args, ws):
    A, names = representable_collection(ws.poset)
    rep = peel(A, io.resolve_object(ws, args.obj), names)
    return {"steps": [{"stratum": names[s.index], "multiplicity": s.multiplicity} for s in rep.steps],
            "generated": rep.generated, "residual_size": rep.residual_size}


def cmd_check_casting(args, ws):
    c = io.resolve_casting(ws, args.casting)
    problems = casting_problems_1d(c, StopSpec1D(ws.complex, ws.stop))
    return {"valid": not problems, "problems": problems}


def cmd_independence(args, ws):
    q = _Quotient(ws, args.refined)
    res = casting_independence(q.ctx, q.character(args.x1), q.character(args.x2), args.level)
    return {"verdict": res.verdict, "level": res.level}


def cmd_resolve(args, ws):
    data = io.load_json_file(args.module)
    return io.twisted_to_json(resolve_module(io.module_from_json(ws.poset, data, args.module)))


def cmd_refine(args, ws):
    if args.map.startswith("SUBDIVIDE"):
        _, _, times = args.map.partition(":")
        _, r = subdivide_1d_times(ws.complex, int(times) if times else 1)
    else:
        r = io.refinement_from_json(ws.complex, io.load_json_file(args.map), args.map)
    return {"complex": r.source.complex.to_json(), "object": io.twisted_to_json(pullback(r, io.resolve_object(ws, args.obj)))}


def cmd_example(args, _ws):
    K = io.parse_complex_spec(args.name if args.name.startswith("example:") else "example:" + args.name)
    ws = io.Workspace(K)
    path = _workspace_path(args)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(io.dumps(ws.to_json()))
    return {"workspace": path, "complex": K.to_json()}


def cmd_selftest(args, _ws):
    results = run_all()
    if args.format == "json":
        payload = {"criteria": [{"number": r.number, "title": r.title, "ok": r.ok, "detail": r.detail}
                                for r in results], "ok": all(r.ok for r in results)}
        emit(payload, "json")
    else:
        for r in results:
            print(r.line())
    return 0 if all(r.ok for r in results) else 2


NEEDS_WORKSPACE = {"example": False, "selftest": False}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--complex", help="NAME:N, example:NAME:N or a complex file (overrides the workspace)")
    common.add_argument("--workspace", help=f"workspace file (default ${{SHEAFMORSE_WORKSPACE}} or {DEFAULT_WORKSPACE})")
    common.add_argument("--stop", help="stop file or inline points like 2:+,4:-")
    common.add_argument("--max-bar", type=int, help="bar complex generator ceiling")
    common.add_argument("--max-twisted", type=int, help="twisted complex generator ceiling")

    # shared options go after the subcommand, so subparser defaults never mask them
    p = _Parser(prog="sheafmorse", description="Constructible sheaves on face posets and their microlocal quotients.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, *positional, refined=False):
        sp = sub.add_parser(name, parents=[common])
        for arg in positional:
            sp.add_argument(arg)
        if refined:
            sp.add_argument("--refined", action="store_true", help="names refer to the double subdivision")
        sp.set_defaults(fn=fn)
        return sp

    add("hom", cmd_hom, "a", "b")
    add("sections", cmd_sections, "open", "obj")
    add("stalk", cmd_stalk, "stratum", "obj")
    add("microstalk", cmd_microstalk, "casting", "obj")
    add("morse", cmd_morse, "casting")
    add("quotient-hom", cmd_quotient_hom, "a", "b", refined=True).add_argument("--level", type=int, required=True)
    add("tower", cmd_tower, "obj", refined=True).add_argument("--max-iter", type=int, default=8)
    add("microsupport", cmd_microsupport, "obj")
    add("peel", cmd_peel, "obj")
    add("check-casting", cmd_check_casting, "casting")
    add("independence", cmd_independence, "x1", "x2", refined=True).add_argument("--level", type=int, required=True)
    add("resolve", cmd_resolve, "module")
    add("refine", cmd_refine, "map", "obj")
    add("example", cmd_example, "name")
    add("selftest", cmd_selftest)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with ceilings(args.max_bar, args.max_twisted):
            ws = load_workspace(args) if NEEDS_WORKSPACE.get(args.command, True) else None
            result = args.fn(args, ws)
            if isinstance(result, int):
                return result
            emit(result, args.format)
        return 0
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"resource ceiling: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, SheafMorseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

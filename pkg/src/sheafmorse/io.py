"""JSON file formats and name resolution for the command line."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ParseError, ValidationError
from .facets import (ConormalPoint1D, ConstructibleOpen, FacePoset, RefinementMap, SimplicialComplex, open_arc,
                     parse_stratum_key, standard_complex, stratum, stratum_key, subdivide_1d_times)
from .microsheaf import (Casting, PosetModule, character_object, constant_sheaf, indicator_resolution,
                         interval_casting_1d, local_system, resolve_module, skyscraper)
from .twisted import TwistedComplex, representable
from .zchain import CohomologyReport, IntegerComplex, IntegerMatrix


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_json_file(path: str | os.PathLike) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return load_json_text(text, str(path))


def _need(data: Any, key: str, kind: type | tuple, where: str):
    if not isinstance(data, Mapping):
        raise ParseError(f"{where}: expected an object")
    if key not in data:
        raise ParseError(f"{where}: missing field {key!r}")
    val = data[key]
    if not isinstance(val, kind):
        raise ParseError(f"{where}.{key}: expected {_kind_name(kind)}")
    return val


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer")
    return x


def _stratum_field(x: Any, where: str):
    if isinstance(x, str):
        return parse_stratum_key(x)
    if isinstance(x, list) and x and all(isinstance(v, str) for v in x):
        return stratum(x)
    raise ParseError(f"{where}: expected a stratum (list of vertex labels or key)")


def _entries(rows: Any, where: str) -> list[tuple[int, int, int]]:
    if not isinstance(rows, list):
        raise ParseError(f"{where}: expected a list of [row, col, value] triples")
    out = []
    for k, e in enumerate(rows):
        if not (isinstance(e, list) and len(e) == 3):
            raise ParseError(f"{where}[{k}]: expected [row, col, value]")
        out.append(tuple(_int(v, f"{where}[{k}]") for v in e))
    return out


# -- complexes ------------------------------------------------------------------


def complex_to_json(K: SimplicialComplex) -> dict:
    return K.to_json()


def complex_from_json(data: Any, where: str = "complex") -> SimplicialComplex:
    verts = _need(data, "vertices", list, where)
    simps = data.get("simplices", []) if isinstance(data, Mapping) else []
    if not isinstance(simps, list):
        raise ParseError(f"{where}.simplices: expected a list")
    for k, v in enumerate(verts):
        if not isinstance(v, str):
            raise ParseError(f"{where}.vertices[{k}]: expected a string")
    for k, s in enumerate(simps):
        if not (isinstance(s, list) and s and all(isinstance(v, str) for v in s)):
            raise ParseError(f"{where}.simplices[{k}]: expected a nonempty list of vertex labels")
    return SimplicialComplex(verts, simps)


def parse_complex_spec(spec: str) -> SimplicialComplex:
    """``example:NAME:N``, ``NAME:N`` or a path to a complex file."""
    if spec.startswith("example:"):
        spec = spec[len("example:"):]
        return _example(spec)
    if ":" in spec and not os.path.exists(spec):
        return _example(spec)
    return complex_from_json(load_json_file(spec), spec)


def _example(spec: str) -> SimplicialComplex:
    try:
        name, n = spec.split(":")
        n = int(n)
    except ValueError:
        raise ParseError(f"example names look like NAME:N, got {spec!r}") from None
    return standard_complex(name, n)


# -- opens, reports -------------------------------------------------------------


def open_from_json(P: FacePoset, data: Any, where: str = "open") -> ConstructibleOpen:
    strata = _need(data, "strata", list, where)
    members = []
    for k, s in enumerate(strata):
        st = _stratum_field(s, f"{where}.strata[{k}]")
        if st not in P.index:
            raise ValidationError(f"{where}.strata[{k}]: unknown stratum {stratum_key(st)!r}")
        members.append(P.index[st])
    return ConstructibleOpen(P, frozenset(members))


def report_to_json(r: CohomologyReport) -> dict:
    return r.to_json()


def report_from_json(data: Any) -> CohomologyReport:
    _need(data, "degrees", list, "report")
    return CohomologyReport.from_json(data)


# -- integer complexes and modules ----------------------------------------------


def integer_complex_to_json(C: IntegerComplex) -> dict:
    return {"degrees": list(C.degrees), "differential": [list(e) for e in C.differential.entries]}


def integer_complex_from_json(data: Any, where: str = "complex") -> IntegerComplex:
    degs = _need(data, "degrees", list, where)
    degrees = [_int(d, f"{where}.degrees[{k}]") for k, d in enumerate(degs)]
    n = len(degrees)
    entries = _entries(data.get("differential", []), f"{where}.differential")
    return IntegerComplex(degrees, IntegerMatrix(n, n, entries))


def module_to_json(M: PosetModule) -> dict:
    P = M.poset
    return {"values": {P.key(s): integer_complex_to_json(C) for s, C in sorted(M.values.items())},
            "maps": [{"source": P.key(s), "target": P.key(t), "matrix": [list(e) for e in m.entries]}
                     for (s, t), m in sorted(M.maps.items())]}


def module_from_json(P: FacePoset, data: Any, where: str = "module") -> PosetModule:
    vals = _need(data, "values", dict, where)
    values = {}
    for key, C in vals.items():
        st = parse_stratum_key(key)
        if st not in P.index:
            raise ValidationError(f"{where}.values: unknown stratum {key!r}")
        values[st] = integer_complex_from_json(C, f"{where}.values[{key!r}]")
    maps = {}
    raw = data.get("maps", [])
    if not isinstance(raw, list):
        raise ParseError(f"{where}.maps: expected a list")
    for k, m in enumerate(raw):
        w = f"{where}.maps[{k}]"
        s = parse_stratum_key(_need(m, "source", str, w))
        t = parse_stratum_key(_need(m, "target", str, w))
        for st in (s, t):
            if st not in P.index:
                raise ValidationError(f"{w}: unknown stratum {stratum_key(st)!r}")
        src = values.get(s, IntegerComplex([]))
        tgt = values.get(t, IntegerComplex([]))
        maps[(s, t)] = IntegerMatrix(len(tgt), len(src), _entries(m.get("matrix", []), f"{w}.matrix"))
    return PosetModule(P, values, maps)


# -- twisted complexes ----------------------------------------------------------


def twisted_to_json(a: TwistedComplex) -> dict:
    return a.to_json()


def twisted_from_json(P: FacePoset, data: Any, where: str = "object") -> TwistedComplex:
    gens = _need(data, "generators", list, where)
    parsed = []
    for k, g in enumerate(gens):
        w = f"{where}.generators[{k}]"
        st = _stratum_field(_need(g, "stratum", (list, str), w), f"{w}.stratum")
        if st not in P.index:
            raise ValidationError(f"{w}: unknown stratum {stratum_key(st)!r}")
        parsed.append((P.index[st], _int(_need(g, "degree", int, w), f"{w}.degree")))
    n = len(parsed)
    entries = _entries(data.get("differential", []), f"{where}.differential")
    for k, (i, j, _v) in enumerate(entries):
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"{where}.differential[{k}]: index out of range")
    return TwistedComplex(P, parsed, IntegerMatrix(n, n, entries))


# -- stops, castings, refinements -----------------------------------------------


def point_from_json(x: Any, where: str) -> ConormalPoint1D:
    if not (isinstance(x, list) and len(x) == 2 and all(isinstance(v, str) for v in x)):
        raise ParseError(f"{where}: expected [vertex, sign]")
    return ConormalPoint1D(x[0], x[1])


def stop_from_json(data: Any, where: str = "stop") -> frozenset[ConormalPoint1D]:
    pts = _need(data, "lambda", list, where)
    return frozenset(point_from_json(p, f"{where}.lambda[{k}]") for k, p in enumerate(pts))


def stop_to_json(points) -> dict:
    return {"lambda": [p.to_json() for p in sorted(points, key=lambda q: (q.vertex, q.sign))]}


def casting_from_json(P: FacePoset, data: Any, where: str = "casting") -> Casting:
    U = open_from_json(P, {"strata": _need(data, "U", list, where)}, f"{where}.U")
    V = open_from_json(P, {"strata": _need(data, "V", list, where)}, f"{where}.V")
    target = point_from_json(data["target"], f"{where}.target") if data.get("target") is not None else None
    assertion = data.get("assertion")
    return Casting(U, V, target, assertion)


def refinement_from_json(target: SimplicialComplex, data: Any, where: str = "refinement") -> RefinementMap:
    src = complex_from_json(_need(data, "source", dict, where), f"{where}.source")
    table = _need(data, "map", dict, where)
    mapping = {}
    for k, v in table.items():
        if not isinstance(v, str):
            raise ParseError(f"{where}.map[{k!r}]: expected a stratum key")
        mapping[parse_stratum_key(k)] = parse_stratum_key(v)
    for s in src.poset.strata:
        if s not in mapping:
            raise ValidationError(f"{where}.map: stratum {stratum_key(s)!r} has no image")
    for s, t in mapping.items():
        if s not in src.poset.index:
            raise ValidationError(f"{where}.map: unknown source stratum {stratum_key(s)!r}")
        if t not in target.poset.index:
            raise ValidationError(f"{where}.map: unknown target stratum {stratum_key(t)!r}")
    return RefinementMap(src.poset, target.poset, mapping)


def refinement_to_json(r: RefinementMap) -> dict:
    return {"source": r.source.complex.to_json(), "map": r.to_json()["map"]}


# -- workspace and names --------------------------------------------------------


@dataclass
class Workspace:
    complex: SimplicialComplex
    objects: dict[str, Any] = field(default_factory=dict)
    stop: frozenset[ConormalPoint1D] = frozenset()

    @property
    def poset(self) -> FacePoset:
        return self.complex.poset

    def to_json(self) -> dict:
        return {"complex": self.complex.to_json(), "objects": self.objects, **stop_to_json(self.stop)}

    @classmethod
    def from_json(cls, data: Any, where: str = "workspace") -> "Workspace":
        K = complex_from_json(_need(data, "complex", dict, where), f"{where}.complex")
        objs = data.get("objects", {})
        if not isinstance(objs, dict):
            raise ParseError(f"{where}.objects: expected an object")
        stop = stop_from_json(data, where) if "lambda" in data else frozenset()
        return cls(K, dict(objs), stop)


def stratum_from_name(P: FacePoset, name: str):
    """A stratum key (``a|b``) or, when all labels are single characters, the letters run together."""
    st = parse_stratum_key(name)
    if st in P.index:
        return P.index[st]
    if "|" not in name and len(name) > 1:
        st = stratum(list(name))
        if st in P.index:
            return P.index[st]
    raise ValidationError(f"unknown stratum {name!r}")


def resolve_open(ws: Workspace, name: str, P: FacePoset | None = None) -> ConstructibleOpen:
    P = P if P is not None else ws.poset
    K = P.complex
    if name == "ALL":
        return ConstructibleOpen.everything(P)
    if name == "EMPTY":
        return ConstructibleOpen.empty(P)
    if name.startswith("STAR:"):
        return ConstructibleOpen.star(P, stratum_from_name(P, name[5:]))
    if name.startswith("ARC:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise ParseError(f"arc names look like ARC:a:b, got {name!r}")
        return open_arc(K, parts[1], parts[2])
    data = _named_data(ws, name)
    return open_from_json(P, data, name)


def _named_data(ws: Workspace, name: str):
    if name.startswith("@"):
        return load_json_file(name[1:])
    if name in ws.objects:
        return ws.objects[name]
    if os.path.exists(name):
        return load_json_file(name)
    raise ParseError(f"unknown name {name!r}")


def resolve_casting(ws: Workspace, name: str, K: SimplicialComplex | None = None) -> Casting:
    K = K if K is not None else ws.complex
    if name.startswith("CAST:"):
        parts = name.split(":")
        if len(parts) not in (3, 4):
            raise ParseError(f"casting names look like CAST:v:sign[:radius], got {name!r}")
        radius = int(parts[3]) if len(parts) == 4 else 1
        return interval_casting_1d(K, ConormalPoint1D(parts[1], parts[2]), radius)
    return casting_from_json(K.poset, _named_data(ws, name), name)


def resolve_object(ws: Workspace, name: str, P: FacePoset | None = None) -> TwistedComplex:
    """Twisted complexes from built-in names, workspace entries or files."""
    P = P if P is not None else ws.poset
    K = P.complex
    if name.startswith("P:"):
        return representable(P, stratum_from_name(P, name[2:]))
    if name == "CONST":
        return constant_sheaf(P)
    if name.startswith("IND:"):
        return indicator_resolution(resolve_open(ws, name[4:], P))
    if name.startswith("SKY:"):
        return skyscraper(P, stratum_from_name(P, name[4:]))
    if name.startswith("LOCAL:"):
        try:
            m = int(name[6:])
        except ValueError:
            raise ParseError(f"local system names look like LOCAL:m, got {name!r}") from None
        return local_system(K, m)
    if name.startswith("CHAR:"):
        return character_object(resolve_casting(ws, "CAST:" + name[5:], K))
    data = _named_data(ws, name)
    return object_from_json(P, data, name)


def object_from_json(P: FacePoset, data: Any, where: str) -> TwistedComplex:
    if isinstance(data, Mapping) and "generators" in data:
        return twisted_from_json(P, data, where)
    if isinstance(data, Mapping) and "values" in data:
        return resolve_module(module_from_json(P, data, where))
    if isinstance(data, Mapping) and "strata" in data:
        return indicator_resolution(open_from_json(P, data, where))
    if isinstance(data, Mapping) and "U" in data and "V" in data:
        return character_object(casting_from_json(P, data, where))
    raise ParseError(f"{where}: not a twisted complex, module, open or casting")

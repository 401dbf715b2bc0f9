"""Mechanism description: links, turning pairs, gear meshes and their geometry.

Turning pairs must form a spanning tree of the link graph rooted at the
ground link (id 0); every gear mesh closes one fundamental cycle.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Mapping

from .errors import GearkinError
from .exact import (
    ExactScalar,
    RationalFunction,
    RationalFunctionField,
    as_exact,
    is_zero,
    substitute,
    symbols_of,
)

__all__ = [
    "MechanismError",
    "Link",
    "TurningJoint",
    "GearMesh",
    "Mechanism",
    "load_mechanism",
    "load_mechanism_file",
    "dump_mechanism",
    "kutzbach_dof",
    "gear_ratio",
    "exact_sin_cos",
    "parse_scalar",
]

#: Digits kept when an angle has no exact sine/cosine.
ANGLE_DIGITS = 64


class MechanismError(GearkinError, ValueError):
    """Invalid mechanism description; ``location`` points into the document."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}" if location else message)


_EXACT_TRIG = {
    Fraction(0): (Fraction(0), Fraction(1)),
    Fraction(90): (Fraction(1), Fraction(0)),
    Fraction(180): (Fraction(0), Fraction(-1)),
    Fraction(270): (Fraction(-1), Fraction(0)),
}


def is_exact_angle(phi) -> bool:
    return Fraction(phi) % 360 in _EXACT_TRIG


def exact_sin_cos(phi) -> tuple[Fraction, Fraction]:
    """(sin, cos) of an angle in degrees.

    Multiples of 90 degrees are exact.  Other angles are rounded to
    ``ANGLE_DIGITS`` decimal places.
    """
    phi = Fraction(phi)
    hit = _EXACT_TRIG.get(phi % 360)
    if hit is not None:
        return hit
    import mpmath

    with mpmath.workdps(ANGLE_DIGITS + 20):
        rad = mpmath.radians(mpmath.mpf(phi.numerator) / phi.denominator)
        scale = mpmath.mpf(10) ** ANGLE_DIGITS
        s = int(mpmath.nint(mpmath.sin(rad) * scale))
        c = int(mpmath.nint(mpmath.cos(rad) * scale))
    return Fraction(s, 10**ANGLE_DIGITS), Fraction(c, 10**ANGLE_DIGITS)


@dataclass(frozen=True)
class Link:
    id: int
    name: str | None = None


@dataclass(frozen=True)
class TurningJoint:
    """Revolute pair; rotates ``head`` relative to ``tail`` about its axis."""

    id: int
    tail: int
    head: int
    axis_label: str
    phi: Fraction
    y: ExactScalar
    z: ExactScalar

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.tail, self.head


@dataclass(frozen=True)
class GearMesh:
    """Gear pair between ``tail`` and ``head``; (y, z) is the pitch point.

    Diameters are per mesh: a compound gear carries a different diameter at
    each of its meshes.
    """

    id: int
    tail: int
    head: int
    diameter_tail: ExactScalar
    diameter_head: ExactScalar
    phi: Fraction
    y: ExactScalar
    z: ExactScalar
    declared_sign: int | None = None
    teeth_tail: int | None = None
    teeth_head: int | None = None

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.tail, self.head


@dataclass(frozen=True)
class Mechanism:
    """A validated mechanism.  Construction checks every structural invariant."""

    name: str
    links: tuple[Link, ...]
    turning: tuple[TurningJoint, ...]
    meshes: tuple[GearMesh, ...]
    inputs: tuple[int, ...]
    symbols: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(sorted(self.links, key=lambda l: l.id)))
        object.__setattr__(self, "turning", tuple(sorted(self.turning, key=lambda j: j.id)))
        object.__setattr__(self, "meshes", tuple(sorted(self.meshes, key=lambda j: j.id)))
        object.__setattr__(self, "inputs", tuple(sorted(self.inputs)))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        _validate(self)

    # -- counts -----------------------------------------------------------
    @property
    def n(self) -> int:
        """Number of links excluding ground."""
        return len(self.links) - 1

    @property
    def t(self) -> int:
        return len(self.turning)

    @property
    def c(self) -> int:
        return len(self.meshes)

    @property
    def k(self) -> int:
        return self.t + self.c

    @property
    def turning_ids(self) -> tuple[int, ...]:
        return tuple(j.id for j in self.turning)

    @property
    def mesh_ids(self) -> tuple[int, ...]:
        return tuple(j.id for j in self.meshes)

    @property
    def outputs(self) -> tuple[int, ...]:
        ins = set(self.inputs)
        return tuple(j for j in self.turning_ids if j not in ins)

    @cached_property
    def field(self) -> RationalFunctionField:
        return RationalFunctionField(self.symbols)

    @cached_property
    def _by_id(self) -> dict[int, Any]:
        return {j.id: j for j in (*self.turning, *self.meshes)}

    def joint(self, jid: int):
        try:
            return self._by_id[jid]
        except KeyError:
            raise KeyError(f"no joint with id {jid}") from None

    def has_symbols(self) -> bool:
        return bool(self.used_symbols())

    def used_symbols(self) -> set[str]:
        used: set[str] = set()
        for j in self.turning:
            used |= symbols_of(j.y) | symbols_of(j.z)
        for g in self.meshes:
            for v in (g.diameter_tail, g.diameter_head, g.y, g.z):
                used |= symbols_of(v)
        return used

    # -- spanning tree ----------------------------------------------------
    @cached_property
    def parent(self) -> dict[int, tuple[int, int]]:
        """link -> (parent link, joint id) in the turning-pair tree rooted at ground."""
        adj: dict[int, list[tuple[int, int]]] = {l.id: [] for l in self.links}
        for j in self.turning:
            adj[j.tail].append((j.head, j.id))
            adj[j.head].append((j.tail, j.id))
        parent = {}
        seen = {0}
        queue = [0]
        while queue:
            u = queue.pop(0)
            for v, jid in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    parent[v] = (u, jid)
                    queue.append(v)
        return parent

    def child_link(self, jid: int) -> int:
        """The endpoint of a turning joint farther from ground."""
        j = self.joint(jid)
        return j.head if self.parent.get(j.head, (None, None))[1] == jid else j.tail

    def path_to_ground(self, link: int) -> list[tuple[int, int, int]]:
        """Steps (joint, from, to) walking from ``link`` down to ground."""
        steps = []
        while link != 0:
            p, jid = self.parent[link]
            steps.append((jid, link, p))
            link = p
        return steps

    def tree_path(self, a: int, b: int) -> list[tuple[int, int, int]]:
        """Steps (joint, from, to) along the unique tree path from ``a`` to ``b``."""
        up_a = self.path_to_ground(a)
        up_b = self.path_to_ground(b)
        on_a = [a] + [s[2] for s in up_a]
        on_b = set([b] + [s[2] for s in up_b])
        lca = next(x for x in on_a if x in on_b)
        first = []
        for s in up_a:
            if s[1] == lca:
                break
            first.append(s)
        second = []
        for s in up_b:
            if s[1] == lca:
                break
            second.append((s[0], s[2], s[1]))
        return first + second[::-1]

    # -- derived mechanisms -----------------------------------------------
    def with_inputs(self, inputs) -> Mechanism:
        return replace(self, inputs=tuple(inputs))

    def bind(self, bindings: Mapping[str, object]) -> Mechanism:
        """Substitute rational values for some symbols; others stay symbolic."""
        values = {k: Fraction(v) for k, v in bindings.items() if k in self.field.index}

        def sub(x):
            return substitute(x, values) if isinstance(x, RationalFunction) else x

        turning = [replace(j, y=sub(j.y), z=sub(j.z)) for j in self.turning]
        meshes = [
            replace(
                g,
                diameter_tail=sub(g.diameter_tail),
                diameter_head=sub(g.diameter_head),
                y=sub(g.y),
                z=sub(g.z),
            )
            for g in self.meshes
        ]
        return replace(self, turning=tuple(turning), meshes=tuple(meshes))

    def scaled(self, factor) -> Mechanism:
        """Multiply every length (coordinates and diameters) by ``factor``."""
        f = Fraction(factor)
        turning = [replace(j, y=as_exact(j.y * f), z=as_exact(j.z * f)) for j in self.turning]
        meshes = [
            replace(
                g,
                diameter_tail=as_exact(g.diameter_tail * f),
                diameter_head=as_exact(g.diameter_head * f),
                y=as_exact(g.y * f),
                z=as_exact(g.z * f),
            )
            for g in self.meshes
        ]
        return replace(self, turning=tuple(turning), meshes=tuple(meshes))


def _validate(m: Mechanism) -> None:
    ids = [l.id for l in m.links]
    if len(set(ids)) != len(ids):
        raise MechanismError("duplicate link ids", "links")
    if 0 not in ids:
        raise MechanismError("the ground link (id 0) is missing", "links")
    if sorted(ids) != list(range(len(ids))):
        raise MechanismError(f"link ids must be contiguous 0..{len(ids) - 1}", "links")
    n = len(ids) - 1
    if n < 1:
        raise MechanismError("at least one moving link is required", "links")

    jids = [j.id for j in m.turning] + [g.id for g in m.meshes]
    seen: set[int] = set(ids)
    for jid in jids:
        if jid in seen:
            raise MechanismError(f"duplicate id {jid}")
        seen.add(jid)
    expect = list(range(n + 1, n + 1 + len(m.turning)))
    if [j.id for j in m.turning] != expect:
        raise MechanismError(
            f"turning joint ids must form the block {expect[0] if expect else n + 1}.."
            f"{expect[-1] if expect else n} following the link ids",
            "turning_joints",
        )

    for kind, group in (("turning_joints", m.turning), ("gear_meshes", m.meshes)):
        for j in group:
            where = f"{kind}[id={j.id}]"
            for end in (j.tail, j.head):
                if end not in set(ids):
                    raise MechanismError(f"unknown link {end}", where)
            if j.tail == j.head:
                raise MechanismError("tail and head are the same link", where)

    # spanning tree: t = n, connected and acyclic
    root = list(range(n + 1))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    tree_ok = len(m.turning) == n
    for j in m.turning:
        a, b = find(j.tail), find(j.head)
        if a == b:
            tree_ok = False
            break
        root[a] = b
    if not tree_ok or len({find(i) for i in range(n + 1)}) != 1:
        raise MechanismError("turning pairs do not form a spanning tree", "turning_joints")

    phis: dict[str, tuple[Fraction, int]] = {}
    for j in m.turning:
        p = Fraction(j.phi) % 360
        if j.axis_label in phis and phis[j.axis_label][0] != p:
            raise MechanismError(
                f"axis {j.axis_label!r} has offset angle {j.phi} here but "
                f"{phis[j.axis_label][0]} at joint {phis[j.axis_label][1]}",
                f"turning_joints[id={j.id}]",
            )
        phis.setdefault(j.axis_label, (p, j.id))

    for g in m.meshes:
        where = f"gear_meshes[id={g.id}]"
        for label, d in (("d_tail", g.diameter_tail), ("d_head", g.diameter_head)):
            if not isinstance(d, RationalFunction) and d <= 0:
                raise MechanismError(f"{label} must be strictly positive", where)
        if g.declared_sign not in (None, 1, -1):
            raise MechanismError("sign must be 1 or -1", where)
        for label, n_teeth in (("teeth_tail", g.teeth_tail), ("teeth_head", g.teeth_head)):
            if n_teeth is not None and n_teeth <= 0:
                raise MechanismError(f"{label} must be a positive integer", where)
        if g.teeth_tail is not None and g.teeth_head is not None:
            dt, dh = g.diameter_tail, g.diameter_head
            if not isinstance(dt, RationalFunction) and not isinstance(dh, RationalFunction):
                if dt * g.teeth_head != dh * g.teeth_tail:
                    raise MechanismError(
                        f"teeth ratio {g.teeth_tail}/{g.teeth_head} does not match "
                        f"diameter ratio {dt}/{dh}",
                        where,
                    )

    if m.has_symbols():
        for j in (*m.turning, *m.meshes):
            if not is_exact_angle(j.phi):
                raise MechanismError(
                    f"angle {j.phi} deg has no exact sine/cosine; such angles are "
                    "only allowed in fully numeric mechanisms",
                    f"id={j.id}",
                )

    tids = {j.id for j in m.turning}
    if len(set(m.inputs)) != len(m.inputs):
        raise MechanismError("duplicate input joints", "inputs")
    for i in m.inputs:
        if i not in tids:
            raise MechanismError(f"input {i} is not a turning joint", "inputs")
    dof = len(m.turning) - len(m.meshes)
    if len(m.inputs) != dof:
        raise MechanismError(
            f"input count {len(m.inputs)} != degrees of freedom {dof}", "inputs"
        )


def kutzbach_dof(m: Mechanism) -> int:
    """Degrees of freedom E = t - r, r the rank of the cycle-basis matrix."""
    from .digraph import graph_matrices
    from .exact import rank

    r = rank(graph_matrices(m).C)
    if r != m.c:
        raise AssertionError(f"cycle-basis rank {r} differs from mesh count {m.c}")
    return m.t - r


def gear_ratio(mesh: GearMesh) -> ExactScalar:
    """Tail pitch diameter over head pitch diameter."""
    if is_zero(mesh.diameter_head):
        raise MechanismError("zero head diameter", f"gear_meshes[id={mesh.id}]")
    return as_exact(mesh.diameter_tail / mesh.diameter_head)


# ---------------------------------------------------------------------------
# description file


_Linear = dict  # symbol name (or None for the constant) -> Fraction


def _linear_from_ast(node, src: str, where: str) -> _Linear:
    if isinstance(node, ast.Expression):
        return _linear_from_ast(node.body, src, where)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(
        node.value, bool
    ):
        return {None: Fraction(ast.get_source_segment(src, node))}
    if isinstance(node, ast.Name):
        return {node.id: Fraction(1)}
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _linear_from_ast(node.operand, src, where)
        return {k: -v for k, v in inner.items()} if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        a = _linear_from_ast(node.left, src, where)
        b = _linear_from_ast(node.right, src, where)
        if isinstance(node.op, (ast.Add, ast.Sub)):
            s = 1 if isinstance(node.op, ast.Add) else -1
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + s * v
            return {k: v for k, v in out.items() if v}
        if isinstance(node.op, ast.Mult):
            if set(b) <= {None}:
                a, b = b, a
            if not set(a) <= {None}:
                raise MechanismError("product of two symbolic terms is not linear", where)
            c = a.get(None, Fraction(0))
            return {k: c * v for k, v in b.items() if c * v}
        if isinstance(node.op, ast.Div):
            if not set(b) <= {None}:
                raise MechanismError("division by a symbolic term is not linear", where)
            c = b.get(None, Fraction(0))
            if not c:
                raise MechanismError("division by zero", where)
            return {k: v / c for k, v in a.items()}
    raise MechanismError(f"unsupported expression syntax in {src!r}", where)


def parse_linear(text: str, where: str = "") -> _Linear:
    """Parse e.g. ``"A1 - d2/2"`` or ``"-(d1 + d4)/2"`` into {symbol: coefficient}."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise MechanismError(f"cannot parse expression {text!r}: {exc.msg}", where) from None
    return _linear_from_ast(tree, text.strip(), where)


def parse_scalar(value, where: str = "") -> _Linear:
    if isinstance(value, bool):
        raise MechanismError("expected a number or expression, got a boolean", where)
    if isinstance(value, (int, Fraction)):
        return {None: Fraction(value)} if value else {}
    if isinstance(value, str):
        return parse_linear(value, where)
    raise MechanismError(f"expected a number or expression, got {value!r}", where)


def _to_scalar(lin: _Linear, fld: RationalFunctionField) -> ExactScalar:
    total: ExactScalar = Fraction(0)
    for k, v in lin.items():
        total = total + (v if k is None else v * fld.gen(k))
    return as_exact(total)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise MechanismError(f"missing field {key!r}", where)
    return obj[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MechanismError(f"expected an integer, got {value!r}", where)
    return value


def _angle(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise MechanismError("expected an angle in degrees", where)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError:
            pass
    raise MechanismError(f"expected an angle in degrees, got {value!r}", where)


def mechanism_from_dict(doc: Mapping) -> Mechanism:
    if not isinstance(doc, Mapping):
        raise MechanismError("top level must be a JSON object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise MechanismError("name must be a string", "name")

    links_raw = _require(doc, "links", "")
    tj_raw = _require(doc, "turning_joints", "")
    gm_raw = doc.get("gear_meshes", [])
    inputs_raw = _require(doc, "inputs", "")
    for key, v in (("links", links_raw), ("turning_joints", tj_raw), ("gear_meshes", gm_raw), ("inputs", inputs_raw)):
        if not isinstance(v, list):
            raise MechanismError("expected a list", key)

    order: list[str] = []

    def scalar(obj, key, where):
        lin = parse_scalar(_require(obj, key, where), f"{where}.{key}")
        for s in lin:
            if s is not None and s not in order:
                order.append(s)
        return lin

    links = []
    for i, raw in enumerate(links_raw):
        where = f"links[{i}]"
        if not isinstance(raw, Mapping):
            raise MechanismError("expected an object", where)
        lname = raw.get("name")
        if lname is not None and not isinstance(lname, str):
            raise MechanismError("name must be a string", where)
        links.append(Link(_int(_require(raw, "id", where), f"{where}.id"), lname))

    turning_raw = []
    for i, raw in enumerate(tj_raw):
        where = f"turning_joints[{i}]"
        if not isinstance(raw, Mapping):
            raise MechanismError("expected an object", where)
        if "x" in raw and parse_scalar(raw["x"], f"{where}.x"):
            raise MechanismError("joint off the y-z plane (x must be 0)", where)
        axis = _require(raw, "axis", where)
        if not isinstance(axis, str) or not axis:
            raise MechanismError("axis must be a non-empty string", f"{where}.axis")
        turning_raw.append(
            dict(
                id=_int(_require(raw, "id", where), f"{where}.id"),
                tail=_int(_require(raw, "tail", where), f"{where}.tail"),
                head=_int(_require(raw, "head", where), f"{where}.head"),
                axis_label=axis,
                phi=_angle(_require(raw, "phi_deg", where), f"{where}.phi_deg"),
                y=scalar(raw, "y", where),
                z=scalar(raw, "z", where),
            )
        )

    meshes_raw = []
    for i, raw in enumerate(gm_raw):
        where = f"gear_meshes[{i}]"
        if not isinstance(raw, Mapping):
            raise MechanismError("expected an object", where)
        if "x" in raw and parse_scalar(raw["x"], f"{where}.x"):
            raise MechanismError("joint off the y-z plane (x must be 0)", where)
        teeth = {}
        for key in ("teeth_tail", "teeth_head"):
            teeth[key] = _int(raw[key], f"{where}.{key}") if raw.get(key) is not None else None
        diam = {}
        for key, tkey in (("d_tail", "teeth_tail"), ("d_head", "teeth_head")):
            if key in raw:
                diam[key] = scalar(raw, key, where)
            elif teeth[tkey] is not None:
                diam[key] = {None: Fraction(teeth[tkey])}
            else:
                raise MechanismError(f"missing field {key!r} (or {tkey!r})", where)
        sign = raw.get("sign")
        if sign is not None and (isinstance(sign, bool) or sign not in (1, -1)):
            raise MechanismError("sign must be 1 or -1", f"{where}.sign")
        meshes_raw.append(
            dict(
                id=_int(_require(raw, "id", where), f"{where}.id"),
                tail=_int(_require(raw, "tail", where), f"{where}.tail"),
                head=_int(_require(raw, "head", where), f"{where}.head"),
                diameter_tail=diam["d_tail"],
                diameter_head=diam["d_head"],
                phi=_angle(_require(raw, "phi_deg", where), f"{where}.phi_deg"),
                y=scalar(raw, "y", where),
                z=scalar(raw, "z", where),
                declared_sign=sign,
                teeth_tail=teeth["teeth_tail"],
                teeth_head=teeth["teeth_head"],
            )
        )

    declared = doc.get("symbols")
    if declared is not None:
        if not isinstance(declared, list) or not all(isinstance(s, str) for s in declared):
            raise MechanismError("symbols must be a list of names", "symbols")
        missing = [s for s in order if s not in declared]
        if missing:
            raise MechanismError(f"symbols used but not declared: {', '.join(missing)}", "symbols")
        order = list(declared)
    try:
        fld = RationalFunctionField(order)
    except ValueError as exc:
        raise MechanismError(str(exc), "symbols") from None

    turning = []
    for raw in turning_raw:
        raw.update(y=_to_scalar(raw["y"], fld), z=_to_scalar(raw["z"], fld))
        turning.append(TurningJoint(**raw))
    meshes = []
    for raw in meshes_raw:
        for key in ("diameter_tail", "diameter_head", "y", "z"):
            raw[key] = _to_scalar(raw[key], fld)
        meshes.append(GearMesh(**raw))

    inputs = [_int(v, f"inputs[{i}]") for i, v in enumerate(inputs_raw)]
    return Mechanism(name, tuple(links), tuple(turning), tuple(meshes), tuple(inputs), tuple(order))


def load_mechanism(text: str) -> Mechanism:
    """Parse and validate a mechanism description (JSON text)."""
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise MechanismError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return mechanism_from_dict(doc)


def load_mechanism_file(path) -> Mechanism:
    with open(path, encoding="utf-8") as fh:
        return load_mechanism(fh.read())


def _scalar_json(x):
    x = as_exact(x)
    if isinstance(x, RationalFunction):
        return str(x)
    return int(x) if x.denominator == 1 else str(x)


def mechanism_to_dict(m: Mechanism) -> dict:
    doc: dict[str, Any] = {"name": m.name, "symbols": list(m.symbols)}
    doc["links"] = [{"id": l.id, **({"name": l.name} if l.name is not None else {})} for l in m.links]
    doc["turning_joints"] = [
        {
            "id": j.id,
            "tail": j.tail,
            "head": j.head,
            "axis": j.axis_label,
            "phi_deg": _scalar_json(j.phi),
            "y": _scalar_json(j.y),
            "z": _scalar_json(j.z),
        }
        for j in m.turning
    ]
    meshes = []
    for g in m.meshes:
        d = {
            "id": g.id,
            "tail": g.tail,
            "head": g.head,
            "d_tail": _scalar_json(g.diameter_tail),
            "d_head": _scalar_json(g.diameter_head),
        }
        if g.teeth_tail is not None:
            d["teeth_tail"] = g.teeth_tail
        if g.teeth_head is not None:
            d["teeth_head"] = g.teeth_head
        d.update(phi_deg=_scalar_json(g.phi), y=_scalar_json(g.y), z=_scalar_json(g.z))
        if g.declared_sign is not None:
            d["sign"] = g.declared_sign
        meshes.append(d)
    doc["gear_meshes"] = meshes
    doc["inputs"] = list(m.inputs)
    return doc


def dump_mechanism(m: Mechanism) -> str:
    return json.dumps(mechanism_to_dict(m), indent=2) + "\n"

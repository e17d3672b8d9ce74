"""Graded quivers, dg path-algebra presentations, and realization.

A presentation is parsed from a small line based text format and turned
into a concrete finite-dimensional dg algebra with explicit basis and
multiplication/differential tables, by noncommutative rewriting against
the relation ideal.

Composition order: ``p*q`` means "apply q first, then p", so a written
path ``a3*a2*a1`` starts at the source of ``a1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ParseError, RealizationError, ValidationError
from .exactlin import Field, Matrix, QQ, Subspace, parse_field


# ---------------------------------------------------------------------------
# quivers and paths


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str
    degree: int


class GradedQuiver:
    def __init__(self, vertices: Sequence[str], arrows: Sequence[Arrow]):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        self.arrows = list(arrows)
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate arrow names")
        if set(names) & set(self.vertices):
            raise ValueError("arrow and vertex names must be disjoint")
        for a in self.arrows:
            if a.source not in self.vertices or a.target not in self.vertices:
                raise ValueError(f"arrow {a.name}: undeclared vertex")
        self.arrow_index = {a.name: i for i, a in enumerate(self.arrows)}
        self.by_name = {a.name: a for a in self.arrows}

    def arrows_from(self, v: str) -> List[Arrow]:
        return [a for a in self.arrows if a.source == v]


class Path:
    """A path in composition order: arrows[0] is applied last.

    The empty path at a vertex is the idempotent of that vertex.
    """

    __slots__ = ("arrows", "vertex")

    def __init__(self, arrows: Tuple[str, ...] = (), vertex: Optional[str] = None):
        if arrows and vertex is not None:
            raise ValueError("a path is either a word of arrows or an idempotent")
        if not arrows and vertex is None:
            raise ValueError("empty path needs a vertex")
        self.arrows = tuple(arrows)
        self.vertex = vertex

    @property
    def trivial(self) -> bool:
        return not self.arrows

    def source(self, quiver: GradedQuiver) -> str:
        return self.vertex if self.trivial else quiver.by_name[self.arrows[-1]].source

    def target(self, quiver: GradedQuiver) -> str:
        return self.vertex if self.trivial else quiver.by_name[self.arrows[0]].target

    def degree(self, quiver: GradedQuiver) -> int:
        return sum(quiver.by_name[a].degree for a in self.arrows)

    def __len__(self):
        return len(self.arrows)

    def __eq__(self, other):
        return self.arrows == other.arrows and self.vertex == other.vertex

    def __hash__(self):
        return hash((self.arrows, self.vertex))

    def __repr__(self):
        return self.label()

    def label(self) -> str:
        if self.trivial:
            return f"e_{self.vertex}"
        return "*".join(self.arrows)


def compose(p: Path, q: Path, quiver: GradedQuiver) -> Optional[Path]:
    """p*q = apply q, then p.  None if the endpoints do not match."""
    if q.target(quiver) != p.source(quiver):
        return None
    if p.trivial:
        return q
    if q.trivial:
        return p
    return Path(p.arrows + q.arrows)


# linear combinations of paths: dict Path -> scalar
PathComb = Dict[Path, object]


def _comb_add(F: Field, acc: PathComb, other: PathComb, scale=None):
    one = F.one() if scale is None else scale
    for p, c in other.items():
        v = F.add(acc.get(p, F.zero()), F.mul(one, c))
        if F.is_zero(v):
            acc.pop(p, None)
        else:
            acc[p] = v
    return acc


# ---------------------------------------------------------------------------
# presentation and parser


@dataclass
class ModuleBlock:
    name: str
    generators: List[Tuple[str, int, str]]              # (label, degree, vertex)
    actions: Dict[Tuple[str, str], Dict[str, object]]   # (gen, arrow) -> {gen: scalar}
    differentials: Dict[str, Dict[str, object]]         # gen -> {gen: scalar}


@dataclass
class TwistBlock:
    name: str
    entries: List[Tuple[str, int]]                       # (vertex/simple label, shift)
    deltas: Dict[Tuple[int, int], PathComb]              # 0-based (i, j) -> path comb


@dataclass
class DgAlgebraPresentation:
    field: Field
    quiver: GradedQuiver
    relations: List[PathComb]
    differentials: Dict[str, PathComb]
    modules: List[ModuleBlock] = dc_field(default_factory=list)
    twists: List[TwistBlock] = dc_field(default_factory=list)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")
_VERT = re.compile(r"[A-Za-z_0-9]+$")  # vertices may be plain numbers


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.n = 0

    def error(self, msg: str, col: int = 1):
        raise ParseError(self.n, col, msg)

    def parse(self) -> DgAlgebraPresentation:
        fieldobj: Optional[Field] = None
        vertices: List[str] = []
        arrows: List[Arrow] = []
        relation_srcs: List[Tuple[int, str]] = []
        diff_srcs: List[Tuple[int, str, str]] = []
        modules: List[ModuleBlock] = []
        twists: List[TwistBlock] = []

        i = 0
        while i < len(self.lines):
            self.n = i + 1
            line = self._strip(self.lines[i])
            i += 1
            if not line:
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "field":
                try:
                    fieldobj = parse_field(rest)
                except ValueError as e:
                    self.error(str(e))
            elif head == "vertices":
                for v in rest.split():
                    if not _VERT.match(v):
                        self.error(f"bad vertex name {v!r}")
                    vertices.append(v)
            elif head == "arrow":
                arrows.append(self._parse_arrow(rest))
            elif head == "relation":
                if not rest:
                    self.error("empty relation")
                relation_srcs.append((self.n, rest))
            elif head == "differential":
                lhs, _, rhs = rest.partition("=")
                lhs = lhs.strip()
                if not _IDENT.match(lhs):
                    self.error(f"differential must be set on a single arrow, got {lhs!r}")
                diff_srcs.append((self.n, lhs, rhs.strip()))
            elif head == "module":
                blk, i = self._parse_module(rest, i)
                modules.append(blk)
            elif head == "twist":
                blk, i = self._parse_twist(rest, i)
                twists.append(blk)
            else:
                self.error(f"unknown directive {head!r}")

        if fieldobj is None:
            self.n = 1
            self.error("missing 'field' directive")
        if not vertices:
            self.n = 1
            self.error("missing 'vertices' directive")
        quiver = GradedQuiver(vertices, arrows)

        relations = []
        for n, src in relation_srcs:
            self.n = n
            comb = self._parse_comb(fieldobj, quiver, src, modules=None)
            self._check_homogeneous(quiver, comb, what="relation")
            relations.append(comb)
        diffs: Dict[str, PathComb] = {}
        for n, name, src in diff_srcs:
            self.n = n
            if name not in quiver.by_name:
                self.error(f"unknown arrow {name!r}")
            if name in diffs:
                self.error(f"duplicate differential for {name!r}")
            comb = self._parse_comb(fieldobj, quiver, src, modules=None) if src else {}
            a = quiver.by_name[name]
            for p in comb:
                if p.source(quiver) != a.source or p.target(quiver) != a.target:
                    self.error(f"differential of {name} must be parallel to it")
                if p.degree(quiver) != a.degree + 1:
                    self.error(f"differential of {name} must have degree {a.degree + 1}")
            diffs[name] = comb

        pres = DgAlgebraPresentation(fieldobj, quiver, relations, diffs, modules, twists)
        self._resolve_module_scalars(pres)
        return pres

    @staticmethod
    def _strip(line: str) -> str:
        if "#" in line:
            line = line[: line.index("#")]
        return line.strip()

    def _parse_arrow(self, rest: str) -> Arrow:
        m = re.match(r"(\S+)\s*:\s*(\S+)\s*->\s*(\S+)\s+deg\s+(-?\d+)$", rest)
        if not m:
            self.error(f"bad arrow syntax: {rest!r} (want 'arrow a : u -> v deg n')")
        name, src, tgt, deg = m.groups()
        if not _IDENT.match(name):
            self.error(f"bad arrow name {name!r}")
        return Arrow(name, src, tgt, int(deg))

    def _parse_scalar(self, F: Field, tok: str):
        m = re.match(r"(-?\d+)(?:/(\d+))?$", tok)
        if not m:
            return None
        num, den = m.groups()
        val = Fraction(int(num), int(den) if den else 1)
        return F.of(val)

    def _parse_comb(self, F: Field, quiver: GradedQuiver, src: str, modules) -> PathComb:
        """Parse `c*p ± c*p ± ...` where p is a path `aN*...*a1` or a vertex."""
        comb: PathComb = {}
        terms = re.findall(r"([+-]?)\s*([^+-]+)", src)
        if not terms or "".join(s + t for s, t in terms).replace(" ", "") != src.replace(" ", ""):
            self.error(f"cannot parse linear combination {src!r}")
        for sign, body in terms:
            coeff = F.one()
            factors = [f.strip() for f in body.split("*") if f.strip()]
            if not factors:
                self.error(f"empty term in {src!r}")
            path_factors = []
            for k, f in enumerate(factors):
                if f in quiver.by_name or f in quiver.vertices:
                    path_factors.append(f)
                    continue
                s = self._parse_scalar(F, f)
                if s is not None:
                    if k != 0:
                        self.error(f"scalar factor must come first in term {body!r}")
                    coeff = s
                else:
                    if not _IDENT.match(f):
                        self.error(f"bad name {f!r} in term {body!r}")
                    path_factors.append(f)
            if sign == "-":
                coeff = F.neg(coeff)
            if not path_factors:
                self.error(f"term {body!r} has no path part")
            path = self._path_from_names(quiver, path_factors)
            _comb_add(F, comb, {path: coeff})
        return comb

    def _path_from_names(self, quiver: GradedQuiver, names: List[str]) -> Path:
        if len(names) == 1 and names[0] in quiver.vertices:
            return Path((), names[0])
        for nm in names:
            if nm not in quiver.by_name:
                self.error(f"unknown arrow {nm!r}")
        for k in range(len(names) - 1):
            a, b = quiver.by_name[names[k]], quiver.by_name[names[k + 1]]
            if b.target != a.source:
                self.error(f"non-composable path ...{names[k]}*{names[k+1]}...: "
                           f"target of {b.name} is {b.target}, source of {a.name} is {a.source}")
        return Path(tuple(names))

    def _check_homogeneous(self, quiver: GradedQuiver, comb: PathComb, what: str):
        sig = None
        for p in comb:
            s = (p.degree(quiver), p.source(quiver), p.target(quiver))
            if sig is None:
                sig = s
            elif sig != s:
                self.error(f"{what} mixes (degree, source, target) {sig} and {s}")

    def _parse_module(self, rest: str, i: int) -> Tuple[ModuleBlock, int]:
        name = rest.strip()
        if not _IDENT.match(name):
            self.error(f"bad module name {name!r}")
        gens: List[Tuple[str, int, str]] = []
        actions: Dict[Tuple[str, str], Dict[str, object]] = {}
        diffs: Dict[str, Dict[str, object]] = {}
        while True:
            if i >= len(self.lines):
                self.error("unterminated module block (missing 'end')")
            self.n = i + 1
            line = self._strip(self.lines[i])
            i += 1
            if not line:
                continue
            if line == "end":
                break
            head, _, body = line.partition(" ")
            body = body.strip()
            if head == "generator":
                m = re.match(r"(\S+)\s+deg\s+(-?\d+)\s+at\s+(\S+)$", body)
                if not m:
                    self.error(f"bad generator syntax: {body!r}")
                gens.append((m.group(1), int(m.group(2)), m.group(3)))
            elif head == "action":
                m = re.match(r"(\S+)\s*\*\s*(\S+)\s*=\s*(.*)$", body)
                if not m:
                    self.error(f"bad action syntax: {body!r}")
                actions[(m.group(1), m.group(2))] = m.group(3).strip()  # resolved later
            elif head == "differential":
                m = re.match(r"(\S+)\s*=\s*(.*)$", body)
                if not m:
                    self.error(f"bad module differential syntax: {body!r}")
                diffs[m.group(1)] = m.group(2).strip()  # resolved later
            else:
                self.error(f"unknown module directive {head!r}")
        return ModuleBlock(name, gens, actions, diffs), i

    def _parse_twist(self, rest: str, i: int) -> Tuple[TwistBlock, int]:
        name = rest.strip()
        if not _IDENT.match(name):
            self.error(f"bad twist name {name!r}")
        entries: List[Tuple[str, int]] = []
        deltas: Dict[Tuple[int, int], str] = {}
        while True:
            if i >= len(self.lines):
                self.error("unterminated twist block (missing 'end')")
            self.n = i + 1
            line = self._strip(self.lines[i])
            i += 1
            if not line:
                continue
            if line == "end":
                break
            head, _, body = line.partition(" ")
            body = body.strip()
            if head == "entry":
                m = re.match(r"(\S+)\s+shift\s+(-?\d+)$", body)
                if not m:
                    self.error(f"bad entry syntax: {body!r}")
                entries.append((m.group(1), int(m.group(2))))
            elif head == "delta":
                m = re.match(r"(\d+)\s+(\d+)\s*=\s*(.*)$", body)
                if not m:
                    self.error(f"bad delta syntax: {body!r}")
                deltas[(int(m.group(1)) - 1, int(m.group(2)) - 1)] = m.group(3).strip()
            else:
                self.error(f"unknown twist directive {head!r}")
        return TwistBlock(name, entries, deltas), i  # delta parsing deferred

    def _resolve_module_scalars(self, pres: DgAlgebraPresentation):
        """Resolve deferred right-hand sides in module and twist blocks."""
        F, quiver = pres.field, pres.quiver
        for blk in pres.modules:
            labels = [g[0] for g in blk.generators]
            if len(set(labels)) != len(labels):
                raise ParseError(0, 1, f"module {blk.name}: duplicate generator labels")
            for key, src in list(blk.actions.items()):
                blk.actions[key] = self._gen_comb(F, labels, src, blk.name)
            for key, src in list(blk.differentials.items()):
                blk.differentials[key] = self._gen_comb(F, labels, src, blk.name)
        for blk in pres.twists:
            for key, src in list(blk.deltas.items()):
                blk.deltas[key] = self._parse_comb(F, quiver, src, modules=None) if src else {}

    def _gen_comb(self, F: Field, labels: List[str], src: str, mname: str):
        if not src or src == "0":
            return {}
        comb: Dict[str, object] = {}
        for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", src):
            coeff = F.one()
            factors = [f.strip() for f in body.split("*") if f.strip()]
            gen = None
            for k, f in enumerate(factors):
                s = self._parse_scalar(F, f)
                if s is not None:
                    coeff = s
                else:
                    gen = f
            if gen is None or gen not in labels:
                self.error(f"module {mname}: unknown generator in {body!r}")
            if sign == "-":
                coeff = F.neg(coeff)
            comb[gen] = F.add(comb.get(gen, F.zero()), coeff)
        return {g: c for g, c in comb.items() if not F.is_zero(c)}


def parse_presentation(text: str) -> DgAlgebraPresentation:
    return _Parser(text).parse()


def pretty_print(pres: DgAlgebraPresentation) -> str:
    F = pres.field
    out = []
    out.append(f"field {'Q' if F.characteristic == 0 else 'F%d' % F.characteristic}")
    out.append("vertices " + " ".join(pres.quiver.vertices))
    for a in pres.quiver.arrows:
        out.append(f"arrow {a.name} : {a.source} -> {a.target} deg {a.degree}")
    for rel in pres.relations:
        out.append("relation " + _comb_str(F, rel))
    for name in sorted(pres.differentials):
        out.append(f"differential {name} = " + _comb_str(F, pres.differentials[name]))
    return "\n".join(out) + "\n"


def _comb_str(F: Field, comb: PathComb) -> str:
    if not comb:
        return "0"
    parts = []
    for p in sorted(comb, key=lambda q: (len(q), q.arrows, q.vertex or "")):
        c = comb[p]
        if c == F.one():
            term = p.label()
        else:
            term = f"{c}*{p.label()}"
        parts.append(term)
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# rewriting against the relation ideal


class RewriteSystem:
    """Bounded completion of a set of relations to a rewriting system.

    Only monomial-reducible ideals are supported: every relation must,
    possibly after bounded overlap completion, have a path leading term
    whose replacement is a combination of strictly smaller paths.
    """

    def __init__(self, field: Field, quiver: GradedQuiver, length_bound: int):
        self.field = field
        self.quiver = quiver
        self.length_bound = length_bound
        self.rules: Dict[Tuple[str, ...], PathComb] = {}

    def _key(self, p: Path):
        # degree-lexicographic order on paths (idempotents smallest)
        return (len(p), tuple(self.quiver.arrow_index[a] for a in p.arrows))

    def add_relations(self, relations: Sequence[PathComb]):
        pending = [dict(r) for r in relations]
        guard = 0
        while pending:
            guard += 1
            if guard > 10000:
                raise RealizationError("relation completion did not terminate")
            comb = self.reduce(pending.pop())
            if not comb:
                continue
            lead = max(comb, key=self._key)
            if lead.trivial:
                raise RealizationError("relation ideal contains an idempotent; quotient degenerates")
            if len(lead) > self.length_bound:
                raise RealizationError(
                    f"S-polynomial with leading path {lead.label()} exceeds the "
                    f"length bound {self.length_bound}; ideal is not "
                    f"monomial-reducible within the bound")
            F = self.field
            c = comb[lead]
            rest: PathComb = {}
            for p, v in comb.items():
                if p != lead:
                    rest[p] = F.neg(F.div(v, c))
            new_rules = [(lead.arrows, rest)]
            while new_rules:
                word, rhs = new_rules.pop()
                if word in self.rules:
                    # keep the smaller reduction; push difference back
                    diff = dict(rhs)
                    _comb_add(F, diff, self.rules[word], F.neg(F.one()))
                    if diff:
                        pending.append(diff)
                    continue
                self.rules[word] = rhs
                pending.extend(self._overlaps(word, rhs))
        self._interreduce()

    def _overlaps(self, word: Tuple[str, ...], rhs: PathComb) -> List[PathComb]:
        out = []
        F = self.field
        for w2, r2 in list(self.rules.items()):
            for a, b, aw, bw in ((word, w2, rhs, r2), (w2, word, r2, rhs)):
                # proper overlap: suffix of a = prefix of b (a applied later)
                for k in range(1, min(len(a), len(b))):
                    if a[len(a) - k:] == b[:k]:
                        left = a[: len(a) - k]
                        right = b[k:]
                        if len(left) + len(b) > self.length_bound + 1:
                            continue
                        # word1 = a + right, word2 = left + b spell the same path
                        s1 = self._mul_comb(aw, Path(right) if right else None, side="right")
                        s2 = self._mul_comb(bw, Path(left) if left else None, side="left")
                        diff = dict(s1)
                        _comb_add(F, diff, s2, F.neg(F.one()))
                        if diff:
                            out.append(diff)
                # containment: b inside a
                if len(b) < len(a):
                    for st in range(len(a) - len(b) + 1):
                        if a[st: st + len(b)] == b:
                            left = a[:st]
                            right = a[st + len(b):]
                            mid = self._mul_comb(r2, Path(left) if left else None, side="left")
                            mid = self._mul_comb(mid, Path(right) if right else None, side="right")
                            diff = dict(aw)
                            _comb_add(F, diff, mid, F.neg(F.one()))
                            if diff:
                                out.append(diff)
        return out

    def _mul_comb(self, comb: PathComb, p: Optional[Path], side: str) -> PathComb:
        if p is None:
            return dict(comb)
        out: PathComb = {}
        for q, c in comb.items():
            r = compose(q, p, self.quiver) if side == "right" else compose(p, q, self.quiver)
            if r is None:
                raise RealizationError("non-composable word produced during completion")
            _comb_add(self.field, out, {r: c})
        return out

    def _interreduce(self):
        changed = True
        while changed:
            changed = False
            for word in sorted(self.rules, key=len, reverse=True):
                rhs = self.rules.pop(word)
                if self._find_redex(word) is not None:
                    changed = True
                    continue  # left side reducible by another rule: drop (overlap handled)
                red = self.reduce(rhs)
                if red != rhs:
                    changed = True
                self.rules[word] = red

    def _find_redex(self, word: Tuple[str, ...]) -> Optional[Tuple[int, Tuple[str, ...]]]:
        for w in self.rules:
            lw = len(w)
            if lw > len(word):
                continue
            for st in range(len(word) - lw + 1):
                if word[st: st + lw] == w:
                    return st, w
        return None

    def reduce_path(self, p: Path) -> PathComb:
        return self.reduce({p: self.field.one()})

    def reduce(self, comb: PathComb) -> PathComb:
        F = self.field
        work = dict(comb)
        out: PathComb = {}
        guard = 0
        while work:
            guard += 1
            if guard > 200000:
                raise RealizationError("rewriting did not terminate")
            p = max(work, key=self._key)
            c = work.pop(p)
            if F.is_zero(c):
                continue
            hit = None if p.trivial else self._find_redex(p.arrows)
            if hit is None:
                _comb_add(F, out, {p: c})
                continue
            st, w = hit
            left = p.arrows[:st]
            right = p.arrows[st + len(w):]
            for q, v in self.rules[w].items():
                r = q
                if left:
                    r = compose(Path(left), r, self.quiver)
                if right:
                    r = compose(r, Path(right), self.quiver)
                if r is None:
                    raise RealizationError("non-composable reduction")
                _comb_add(F, work, {r: F.mul(c, v)})
        return out

    def is_normal(self, word: Tuple[str, ...]) -> bool:
        return self._find_redex(word) is None


# ---------------------------------------------------------------------------
# concrete finite-dimensional dg algebras


@dataclass(frozen=True)
class BasisElement:
    label: str
    degree: int
    source: str
    target: str


LinComb = Dict[int, object]  # basis index -> scalar


class FinDimDgAlgebra:
    """Basis-indexed dg algebra with multiplication and differential tables.

    ``mult[i, j]`` is the product basis[i] * basis[j] (j acts first); the
    tables are sparse, missing entries are zero.  Instances are immutable
    after construction and validated on demand.
    """

    def __init__(self, field: Field, basis: Sequence[BasisElement],
                 mult: Dict[Tuple[int, int], LinComb],
                 diff: Dict[int, LinComb],
                 vertices: Sequence[str],
                 unit_indices: Optional[Dict[str, int]] = None,
                 name: str = "",
                 unit_combs: Optional[Dict[str, LinComb]] = None):
        self.field = field
        self.basis = list(basis)
        self.mult = {k: dict(v) for k, v in mult.items() if v}
        self.diff = {k: dict(v) for k, v in diff.items() if v}
        self.vertices = list(vertices)
        self.name = name
        # the idempotent at a vertex may be a combination of basis elements
        # (endomorphism algebras of complexes); path algebras use single ones
        if unit_combs is not None:
            self.units: Dict[str, LinComb] = {v: dict(c) for v, c in unit_combs.items()}
        elif unit_indices is not None:
            self.units = {v: {i: field.one()} for v, i in unit_indices.items()}
        else:
            raise ValidationError("unit decomposition required")
        self.unit_indices = {v: next(iter(c)) for v, c in self.units.items()
                             if len(c) == 1 and field.is_zero(field.sub(c[next(iter(c))],
                                                                        field.one()))}
        self.index = {b.label: i for i, b in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise ValidationError("duplicate basis labels")

    # -- linear combination helpers

    @property
    def dim(self) -> int:
        return len(self.basis)

    def zero_comb(self) -> LinComb:
        return {}

    def comb_add(self, acc: LinComb, other: LinComb, scale=None) -> LinComb:
        F = self.field
        s = F.one() if scale is None else scale
        for i, c in other.items():
            v = F.add(acc.get(i, F.zero()), F.mul(s, c))
            if F.is_zero(v):
                acc.pop(i, None)
            else:
                acc[i] = v
        return acc

    def el(self, label: str) -> LinComb:
        return {self.index[label]: self.field.one()}

    def product(self, i: int, j: int) -> LinComb:
        return self.mult.get((i, j), {})

    def comb_mul(self, x: LinComb, y: LinComb) -> LinComb:
        out: LinComb = {}
        F = self.field
        for i, a in x.items():
            for j, b in y.items():
                t = self.mult.get((i, j))
                if t:
                    self.comb_add(out, t, F.mul(a, b))
        return out

    def comb_diff(self, x: LinComb) -> LinComb:
        out: LinComb = {}
        for i, a in x.items():
            t = self.diff.get(i)
            if t:
                self.comb_add(out, t, a)
        return out

    def unit_comb(self) -> LinComb:
        out: LinComb = {}
        for c in self.units.values():
            self.comb_add(out, c)
        return out

    def degrees(self) -> List[int]:
        return sorted({b.degree for b in self.basis})

    def graded_dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for b in self.basis:
            out[b.degree] = out.get(b.degree, 0) + 1
        return dict(sorted(out.items()))

    def block(self, degree: int, source: str, target: str) -> List[int]:
        return [i for i, b in enumerate(self.basis)
                if b.degree == degree and b.source == source and b.target == target]

    def is_connective(self) -> bool:
        return all(d <= 0 for d in self.cohomology_dims())

    def is_coconnective(self) -> bool:
        return all(d >= 0 for d in self.cohomology_dims())

    def cohomology_dims(self) -> Dict[int, int]:
        """Degrees with nonzero cohomology, mapped to their dimensions."""
        out: Dict[int, int] = {}
        for deg in self.degrees():
            n = self._coh_dim_in_degree(deg)
            if n:
                out[deg] = n
        return out

    def _coh_dim_in_degree(self, deg: int) -> int:
        cur = [i for i, b in enumerate(self.basis) if b.degree == deg]
        prv = [i for i, b in enumerate(self.basis) if b.degree == deg - 1]
        nxt = [i for i, b in enumerate(self.basis) if b.degree == deg + 1]
        F = self.field
        pos_n = {g: r for r, g in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for c, i in enumerate(cur):
            for j, v in self.diff.get(i, {}).items():
                md.rows[pos_n[j]][c] = v
        from .exactlin import kernel_basis, rank
        dim_ker = len(kernel_basis(md)) if cur else 0
        pos_c = {g: r for r, g in enumerate(cur)}
        mp = Matrix.zero(F, len(cur), len(prv))
        for c, i in enumerate(prv):
            for j, v in self.diff.get(i, {}).items():
                mp.rows[pos_c[j]][c] = v
        dim_im = rank(mp) if prv and cur else 0
        return dim_ker - dim_im

    # -- validation

    def validate(self, check_triples: bool = True):
        F = self.field
        for (i, j), t in self.mult.items():
            bi, bj = self.basis[i], self.basis[j]
            if bi.source != bj.target:
                raise ValidationError(f"product {bi.label}*{bj.label} set but not composable")
            for k, c in t.items():
                bk = self.basis[k]
                if F.is_zero(c):
                    continue
                if bk.degree != bi.degree + bj.degree:
                    raise ValidationError(f"product {bi.label}*{bj.label}: degree mismatch")
                if bk.source != bj.source or bk.target != bi.target:
                    raise ValidationError(f"product {bi.label}*{bj.label}: endpoint mismatch")
        for i, t in self.diff.items():
            bi = self.basis[i]
            for k, c in t.items():
                bk = self.basis[k]
                if bk.degree != bi.degree + 1:
                    raise ValidationError(f"d({bi.label}) has wrong degree")
                if bk.source != bi.source or bk.target != bi.target:
                    raise ValidationError(f"d({bi.label}) is not parallel")
        one = self.unit_comb()
        for i in range(self.dim):
            x = {i: F.one()}
            if self.comb_mul(one, x) != x or self.comb_mul(x, one) != x:
                raise ValidationError(f"unit fails on {self.basis[i].label}")
        for v, c in self.units.items():
            if self.comb_diff(c):
                raise ValidationError(f"d(idempotent at {v}) != 0")
            if self.comb_mul(c, c) != c:
                raise ValidationError(f"idempotent at {v} does not square to itself")
        for i in range(self.dim):
            if self.comb_diff(self.comb_diff({i: F.one()})):
                raise ValidationError(f"d^2 != 0 on {self.basis[i].label}")
        # graded Leibniz on all pairs
        for i in range(self.dim):
            for j in range(self.dim):
                if self.basis[i].source != self.basis[j].target:
                    continue
                x, y = {i: F.one()}, {j: F.one()}
                lhs = self.comb_diff(self.comb_mul(x, y))
                rhs = self.comb_mul(self.comb_diff(x), y)
                sign = F.one() if self.basis[i].degree % 2 == 0 else F.neg(F.one())
                self.comb_add(rhs, self.comb_mul(x, self.comb_diff(y)), sign)
                if lhs != rhs:
                    raise ValidationError(
                        f"Leibniz fails on {self.basis[i].label}, {self.basis[j].label}")
        if check_triples:
            for i in range(self.dim):
                for j in range(self.dim):
                    if self.basis[i].source != self.basis[j].target:
                        continue
                    xy = self.comb_mul({i: F.one()}, {j: F.one()})
                    for k in range(self.dim):
                        if self.basis[j].source != self.basis[k].target:
                            continue
                        lhs = self.comb_mul(xy, {k: F.one()})
                        rhs = self.comb_mul({i: F.one()},
                                            self.comb_mul({j: F.one()}, {k: F.one()}))
                        if lhs != rhs:
                            raise ValidationError(
                                f"associativity fails on "
                                f"({self.basis[i].label}, {self.basis[j].label}, "
                                f"{self.basis[k].label})")

    def comb_str(self, x: LinComb) -> str:
        if not x:
            return "0"
        F = self.field
        parts = []
        for i in sorted(x):
            c = x[i]
            parts.append(self.basis[i].label if c == F.one() else f"{c}*{self.basis[i].label}")
        return " + ".join(parts)

    def __repr__(self):
        return (f"FinDimDgAlgebra({self.name or 'unnamed'}, dim={self.dim}, "
                f"field={self.field!r})")


# ---------------------------------------------------------------------------
# realization


def realize_algebra(pres: DgAlgebraPresentation,
                    degree_window: Tuple[int, int] = (-64, 64),
                    path_length_bound: int = 16,
                    validate: bool = True,
                    name: str = "") -> FinDimDgAlgebra:
    """Quotient of the graded path algebra by the relation ideal.

    The basis consists of the reduced paths inside the degree window and
    length bound.  Products that rewrite out of the window are truncated
    to zero only when the grading makes the out-of-window part an ideal;
    otherwise the presentation is rejected.
    """
    F, quiver = pres.field, pres.quiver
    lo, hi = degree_window
    if lo > hi:
        raise RealizationError("empty degree window")
    rw = RewriteSystem(F, quiver, path_length_bound)
    rw.add_relations(pres.relations)

    arrow_degs = [a.degree for a in quiver.arrows]
    monotone_down = all(d <= 0 for d in arrow_degs)
    monotone_up = all(d >= 0 for d in arrow_degs)

    def in_window(p: Path) -> bool:
        return lo <= p.degree(quiver) <= hi

    def truncatable(p: Path) -> bool:
        d = p.degree(quiver)
        if d < lo and monotone_down:
            return True
        if d > hi and monotone_up:
            return True
        return False

    # breadth-first enumeration of reduced words
    paths: List[Path] = [Path((), v) for v in quiver.vertices]
    frontier = list(paths)
    overflow: List[Path] = []
    for length in range(1, path_length_bound + 2):
        new_frontier: List[Path] = []
        for p in frontier:
            for a in quiver.arrows:
                if a.source != p.target(quiver):
                    continue
                q = Path((a.name,) + p.arrows)
                if not rw.is_normal(q.arrows):
                    continue
                if length > path_length_bound:
                    overflow.append(q)
                    continue
                new_frontier.append(q)
        if length <= path_length_bound:
            paths.extend(new_frontier)
        frontier = new_frontier
        if not frontier:
            break
    bad_overflow = [p for p in overflow if in_window(p) or not truncatable(p)]
    if bad_overflow:
        raise RealizationError(
            f"reduced path {bad_overflow[0].label()} of length "
            f"{path_length_bound + 1} escapes the length bound; "
            f"basis would be incomplete (raise path_length_bound)")

    kept = [p for p in paths if in_window(p)]
    dropped = [p for p in paths if not in_window(p)]
    bad = [p for p in dropped if not truncatable(p)]
    if bad:
        raise RealizationError(
            f"reduced path {bad[0].label()} has degree {bad[0].degree(quiver)} outside "
            f"the window {degree_window} and the grading is mixed; the window "
            f"truncation would not be an ideal quotient")

    kept.sort(key=lambda p: (len(p), tuple(quiver.arrow_index[a] for a in p.arrows),
                             p.vertex or ""))
    basis = [BasisElement(p.label(), p.degree(quiver), p.source(quiver), p.target(quiver))
             for p in kept]
    pos = {p: i for i, p in enumerate(kept)}

    def comb_to_lincomb(comb: PathComb) -> LinComb:
        out: LinComb = {}
        for q, c in comb.items():
            if q in pos:
                idx = pos[q]
                v = F.add(out.get(idx, F.zero()), c)
                if F.is_zero(v):
                    out.pop(idx, None)
                else:
                    out[idx] = v
            elif truncatable(q):
                continue
            else:
                raise RealizationError(
                    f"product involves path {q.label()} outside the realized basis")
        return out

    mult: Dict[Tuple[int, int], LinComb] = {}
    for i, p in enumerate(kept):
        for j, q in enumerate(kept):
            r = compose(p, q, quiver)
            if r is None:
                continue
            if len(r) > path_length_bound:
                red = None
                # a long product is fine if it rewrites to short or truncatable paths
                red = rw.reduce_path(r) if rw.rules else {r: F.one()}
                long_left = [w for w in red if len(w) > path_length_bound and not truncatable(w)]
                if long_left:
                    raise RealizationError(
                        f"product {p.label()}*{q.label()} exceeds the length bound")
            else:
                red = rw.reduce_path(r)
            t = comb_to_lincomb(red)
            if t:
                mult[(i, j)] = t

    # differential: extend from arrows by the graded Leibniz rule
    def d_path(p: Path) -> PathComb:
        if p.trivial:
            return {}
        out: PathComb = {}
        arrows = p.arrows
        degsum = 0
        # arrows[k] for k < i are "later" factors; sign accumulates their degrees
        for k in range(len(arrows)):
            a = quiver.by_name[arrows[k]]
            da = pres.differentials.get(a.name, {})
            if da:
                sign = F.one() if degsum % 2 == 0 else F.neg(F.one())
                left = Path(arrows[:k]) if k else None
                right = Path(arrows[k + 1:]) if k + 1 < len(arrows) else None
                for q, c in da.items():
                    r = q
                    if left is not None:
                        r = compose(left, r, quiver)
                    if right is not None and r is not None:
                        r = compose(r, right, quiver)
                    if r is None:
                        raise RealizationError("differential produced non-composable path")
                    _comb_add(F, out, {r: F.mul(sign, c)})
            degsum += a.degree
        return out

    diff: Dict[int, LinComb] = {}
    for i, p in enumerate(kept):
        dp = d_path(p)
        if dp:
            t = comb_to_lincomb(rw.reduce(dp))
            if t:
                diff[i] = t

    # d must send the relation ideal into itself
    for rel in pres.relations:
        drel: PathComb = {}
        for q, c in rel.items():
            _comb_add(F, drel, d_path(q), c)
        if rw.reduce(drel):
            raise RealizationError("differential does not preserve the relation ideal "
                                   "(d(relation) is not in the ideal)")

    alg = FinDimDgAlgebra(F, basis, mult, diff, quiver.vertices,
                          {v: pos[Path((), v)] for v in quiver.vertices},
                          name=name)
    if validate:
        alg.validate(check_triples=(alg.dim <= 64))
    return alg


# ---------------------------------------------------------------------------
# cohomology


class HodgeData:
    """Per-(degree, source, target) splitting of an algebra's underlying complex.

    A^n = boundaries + harmonics + transversal, with d mapping the
    transversal isomorphically onto the next boundaries.  Used both for
    the cohomology algebra and as transfer input.
    """

    def __init__(self, alg: FinDimDgAlgebra):
        self.alg = alg
        F = alg.field
        self.harmonic: List[LinComb] = []      # chosen cocycle representatives
        self.h_info: List[Tuple[int, str, str]] = []
        self.proj_cache: Dict[Tuple[int, str, str], tuple] = {}
        blocks = sorted({(b.degree, b.source, b.target) for b in alg.basis})
        for (deg, src, tgt) in blocks:
            cur = alg.block(deg, src, tgt)
            prv = alg.block(deg - 1, src, tgt)
            nxt = alg.block(deg + 1, src, tgt)
            posc = {g: r for r, g in enumerate(cur)}
            n = len(cur)
            d_out = Matrix.zero(F, len(nxt), n)
            posn = {g: r for r, g in enumerate(nxt)}
            for c, i in enumerate(cur):
                for j, v in alg.diff.get(i, {}).items():
                    d_out.rows[posn[j]][c] = v
            from .exactlin import kernel_basis
            ker = Subspace.spanned_by(F, kernel_basis(d_out), n)
            bdry = Subspace(F, n)
            im_vecs = []
            for i in prv:
                vec = [F.zero()] * n
                for j, v in alg.diff.get(i, {}).items():
                    vec[posc[j]] = v
                if any(not F.is_zero(x) for x in vec):
                    bdry.add(vec)
                    im_vecs.append((i, vec))
            # harmonic: complement of boundaries inside the kernel,
            # preferring unit idempotents so units survive on the nose
            harm = Subspace(F, n)
            for r in bdry.rows:
                harm.add(r)
            picks: List[list] = []
            preferred = []
            if deg == 0 and src == tgt and src in alg.units:
                uc = alg.units[src]
                if all(alg.basis[i].degree == 0 and alg.basis[i].source == src
                       and alg.basis[i].target == src for i in uc):
                    vec = [F.zero()] * n
                    for i, c in uc.items():
                        vec[posc[i]] = c
                    preferred.append(vec)
            for vec in preferred + ker.basis():
                if ker.contains(vec) and harm.add(vec):
                    picks.append(vec)
            for vec in picks:
                self.harmonic.append({cur[t]: x for t, x in enumerate(vec)
                                      if not F.is_zero(x)})
                self.h_info.append((deg, src, tgt))
            # transversal: complement of the kernel in the block
            full = Subspace(F, n)
            for r in ker.rows:
                full.add(r)
            trans: List[list] = []
            for t in range(n):
                vec = [F.zero()] * n
                vec[t] = F.one()
                if full.add(vec):
                    trans.append(vec)
            self.proj_cache[(deg, src, tgt)] = (cur, posc, ker, bdry, picks, trans, im_vecs)

    def block_data(self, deg: int, src: str, tgt: str):
        return self.proj_cache.get((deg, src, tgt))


def cohomology_algebra(alg: FinDimDgAlgebra, name: str = "") -> FinDimDgAlgebra:
    """The cohomology of a dg algebra with its induced product (zero differential)."""
    from .ainfty import build_retract  # shared splitting keeps structure constants aligned
    ret = build_retract(alg)
    return ret.cohomology_algebra(name=name or (alg.name + ".H" if alg.name else "H"))

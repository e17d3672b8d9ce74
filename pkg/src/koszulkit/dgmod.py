"""Dg modules, semifree resolutions, Ext, and Koszul duality.

All modules are right modules.  A semifree resolution is a complex of
shifted vertex projectives built by repeatedly adjoining generators
against surviving cohomology classes of the augmentation cone; every
bounded computation carries an explicit certified degree window and
results outside it are never reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ValidationError, WindowError
from .exactlin import Field, Matrix, Subspace, kernel_basis, rank, solve
from .presentations import BasisElement, FinDimDgAlgebra, LinComb, ModuleBlock
from .ainfty import AInfinityAlgebra, RetractData, build_retract, minimal_model


@dataclass(frozen=True)
class ModBasisElement:
    label: str
    degree: int
    vertex: str          # supporting idempotent: x * e_vertex = x


class DgModule:
    """Finite-dimensional right dg module with explicit action table.

    ``action[i, j]`` is basis[i] * algebra.basis[j]; ``diff[i]`` is the
    differential.  Sparse, missing entries are zero.
    """

    def __init__(self, algebra: FinDimDgAlgebra, basis: Sequence[ModBasisElement],
                 action: Dict[Tuple[int, int], LinComb],
                 diff: Dict[int, LinComb], name: str = ""):
        self.algebra = algebra
        self.field = algebra.field
        self.basis = list(basis)
        self.action = {k: dict(v) for k, v in action.items() if v}
        self.diff = {k: dict(v) for k, v in diff.items() if v}
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.basis)

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

    def act(self, x: LinComb, a: LinComb) -> LinComb:
        out: LinComb = {}
        F = self.field
        for i, c in x.items():
            for j, b in a.items():
                t = self.action.get((i, j))
                if t:
                    self.comb_add(out, t, F.mul(c, b))
        return out

    def d(self, x: LinComb) -> LinComb:
        out: LinComb = {}
        for i, c in x.items():
            t = self.diff.get(i)
            if t:
                self.comb_add(out, t, c)
        return out

    def graded_dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for b in self.basis:
            out[b.degree] = out.get(b.degree, 0) + 1
        return dict(sorted(out.items()))

    def block(self, degree: int, vertex: str) -> List[int]:
        return [i for i, b in enumerate(self.basis)
                if b.degree == degree and b.vertex == vertex]

    def cohomology_dims(self, by_vertex: bool = False):
        """Dimensions of H^*(M), optionally split by supporting idempotent."""
        F = self.field
        out: Dict = {}
        degs = sorted({b.degree for b in self.basis})
        verts = sorted({b.vertex for b in self.basis})
        for deg in degs:
            for v in verts:
                cur = self.block(deg, v)
                if not cur:
                    continue
                nxt = self.block(deg + 1, v)
                prv = self.block(deg - 1, v)
                posn = {g: r for r, g in enumerate(nxt)}
                md = Matrix.zero(F, len(nxt), len(cur))
                for c, i in enumerate(cur):
                    for j, vv in self.diff.get(i, {}).items():
                        md.rows[posn[j]][c] = vv
                dim_ker = len(kernel_basis(md))
                posc = {g: r for r, g in enumerate(cur)}
                mp = Matrix.zero(F, len(cur), len(prv))
                for c, i in enumerate(prv):
                    for j, vv in self.diff.get(i, {}).items():
                        mp.rows[posc[j]][c] = vv
                dim_im = rank(mp) if prv else 0
                h = dim_ker - dim_im
                if h:
                    if by_vertex:
                        out[(deg, v)] = h
                    else:
                        out[deg] = out.get(deg, 0) + h
        return dict(sorted(out.items(), key=lambda kv: (kv[0],) if not by_vertex else kv[0]))

    def total_cohomology_dim(self) -> int:
        return sum(self.cohomology_dims().values())

    def validate(self):
        F, A = self.field, self.algebra
        for (i, j), t in self.action.items():
            bi, aj = self.basis[i], A.basis[j]
            if bi.vertex != aj.target:
                raise ValidationError(f"action {bi.label}*{aj.label} set but not composable")
            for k, c in t.items():
                bk = self.basis[k]
                if bk.degree != bi.degree + aj.degree or bk.vertex != aj.source:
                    raise ValidationError(f"action {bi.label}*{aj.label}: bad output")
        for i in range(self.dim):
            if self.d(self.d({i: F.one()})):
                raise ValidationError(f"d^2 != 0 on {self.basis[i].label}")
        one = A.unit_comb()
        for i in range(self.dim):
            x = {i: F.one()}
            if self.act(x, one) != x:
                raise ValidationError(f"unit fails on {self.basis[i].label}")
        for i in range(self.dim):
            x = {i: F.one()}
            sgn = F.one() if self.basis[i].degree % 2 == 0 else F.neg(F.one())
            for j in range(A.dim):
                a = {j: F.one()}
                lhs = self.d(self.act(x, a))
                rhs = self.act(self.d(x), a)
                self.comb_add(rhs, self.act(x, A.comb_diff(a)), sgn)
                if lhs != rhs:
                    raise ValidationError(
                        f"module Leibniz fails on {self.basis[i].label}, {A.basis[j].label}")
            for j in range(A.dim):
                for k in range(A.dim):
                    if A.basis[j].source != A.basis[k].target:
                        continue
                    lhs = self.act(x, A.comb_mul({j: F.one()}, {k: F.one()}))
                    rhs = self.act(self.act(x, {j: F.one()}), {k: F.one()})
                    if lhs != rhs:
                        raise ValidationError(
                            f"action associativity fails on {self.basis[i].label}")

    def __repr__(self):
        return f"DgModule({self.name or 'unnamed'}, dim={self.dim})"


def shift_module(M: DgModule, k: int, name: str = "") -> DgModule:
    """M[k]: degrees drop by k, differential picks up (-1)^k."""
    F = M.field
    basis = [ModBasisElement(b.label, b.degree - k, b.vertex) for b in M.basis]
    diff = M.diff
    if k % 2:
        diff = {i: {j: F.neg(c) for j, c in t.items()} for i, t in M.diff.items()}
    return DgModule(M.algebra, basis, M.action, diff,
                    name=name or f"{M.name}[{k}]")


def direct_sum(mods: Sequence[DgModule], name: str = "") -> DgModule:
    A = mods[0].algebra
    basis: List[ModBasisElement] = []
    action: Dict[Tuple[int, int], LinComb] = {}
    diff: Dict[int, LinComb] = {}
    off = 0
    for t, M in enumerate(mods):
        for b in M.basis:
            basis.append(ModBasisElement(f"{t}.{b.label}", b.degree, b.vertex))
        for (i, j), c in M.action.items():
            action[(i + off, j)] = {k + off: v for k, v in c.items()}
        for i, c in M.diff.items():
            diff[i + off] = {k + off: v for k, v in c.items()}
        off += M.dim
    return DgModule(A, basis, action, diff, name=name or "+".join(m.name for m in mods))


def simple_module(A: FinDimDgAlgebra, v: str) -> DgModule:
    """The vertex simple: one dimension in degree 0, radical acting by zero."""
    F = A.field
    basis = [ModBasisElement(f"s_{v}", 0, v)]
    action: Dict[Tuple[int, int], LinComb] = {}
    uc = A.units.get(v, {})
    for j, c in uc.items():
        # the unit may be a combination; each constituent acts by its coefficient
        action[(0, j)] = {0: c} if not F.is_zero(c) else {}
    # all other degree-0 diagonal elements act by zero, as do all arrows
    return DgModule(A, basis, {k: t for k, t in action.items() if t}, {}, name=f"S_{v}")


def simples(A: FinDimDgAlgebra, require_connective: bool = True) -> List[DgModule]:
    """One simple per vertex.  The connective check uses cohomology."""
    if require_connective:
        bad = [d for d in A.cohomology_dims() if d > 0]
        if bad:
            raise ValidationError(f"algebra has positive cohomology in degrees {bad}; "
                                  f"vertex simples are defined for the connective case")
    return [simple_module(A, v) for v in A.vertices]


def h0_semisimple_elementary(E: FinDimDgAlgebra) -> bool:
    """H^0 is exactly the span of the vertex idempotents (one class each)."""
    dims = E.cohomology_dims()
    if any(d < 0 for d in dims):
        return False
    return dims.get(0, 0) == len(E.vertices)


def regular_module(A: FinDimDgAlgebra) -> DgModule:
    """A as a right module over itself."""
    basis = [ModBasisElement(b.label, b.degree, b.source) for b in A.basis]
    action = {k: dict(t) for k, t in A.mult.items()}
    return DgModule(A, basis, action, {k: dict(t) for k, t in A.diff.items()},
                    name=(A.name or "A") + ".regular")


def vertex_projective(A: FinDimDgAlgebra, v: str, gen_degree: int = 0,
                      name: str = "") -> DgModule:
    """The shifted projective e_v A with its generator in the given degree."""
    F = A.field
    keep = [i for i, b in enumerate(A.basis) if b.target == v]
    pos = {i: t for t, i in enumerate(keep)}
    basis = [ModBasisElement(A.basis[i].label, A.basis[i].degree + gen_degree,
                             A.basis[i].source) for i in keep]
    action: Dict[Tuple[int, int], LinComb] = {}
    diff: Dict[int, LinComb] = {}
    sgn = F.one() if gen_degree % 2 == 0 else F.neg(F.one())
    for t, i in enumerate(keep):
        for j in range(A.dim):
            prod = A.mult.get((i, j))
            if prod:
                action[(t, j)] = {pos[k]: c for k, c in prod.items()}
        dt = A.diff.get(i)
        if dt:
            diff[t] = {pos[k]: F.mul(sgn, c) for k, c in dt.items()}
    return DgModule(A, basis, action, diff, name=name or f"P_{v}[{-gen_degree}]")


# ---------------------------------------------------------------------------
# free complexes (semifree modules with chosen generators)


class FreeComplex:
    """A direct sum of shifted vertex projectives with a connecting twist.

    Generators carry (cohomological degree, vertex); ``dcoef[i, j]`` is
    the algebra coefficient of generator i in d(generator j), so
    d(g_j) = sum_i g_i * dcoef[i, j], with |dcoef[i,j]| = t_j + 1 - t_i.
    """

    def __init__(self, algebra: FinDimDgAlgebra,
                 gens: Sequence[Tuple[str, int, str]],
                 dcoef: Dict[Tuple[int, int], LinComb],
                 name: str = ""):
        self.algebra = algebra
        self.field = algebra.field
        self.gens = list(gens)
        self.dcoef = {k: dict(v) for k, v in dcoef.items() if v}
        self.name = name

    @property
    def n_gens(self) -> int:
        return len(self.gens)

    def gen_degrees(self) -> List[int]:
        return [g[1] for g in self.gens]

    def pair_basis(self) -> List[Tuple[int, int]]:
        """Module basis: (generator, algebra basis element at its vertex)."""
        A = self.algebra
        out = []
        for gi, (_, t, v) in enumerate(self.gens):
            for ai, b in enumerate(A.basis):
                if b.target == v:
                    out.append((gi, ai))
        return out

    def as_module(self, name: str = "") -> DgModule:
        A, F = self.algebra, self.field
        pairs = self.pair_basis()
        pos = {p: t for t, p in enumerate(pairs)}
        basis = [ModBasisElement(f"{self.gens[gi][0]}.{A.basis[ai].label}",
                                 self.gens[gi][1] + A.basis[ai].degree,
                                 A.basis[ai].source)
                 for (gi, ai) in pairs]
        action: Dict[Tuple[int, int], LinComb] = {}
        diff: Dict[int, LinComb] = {}
        for t, (gi, ai) in enumerate(pairs):
            for j in range(A.dim):
                prod = A.mult.get((ai, j))
                if prod:
                    action[(t, j)] = {pos[(gi, k)]: c for k, c in prod.items()}
            # d(g a) = d(g) a + (-1)^{t_g} g d(a)
            out: LinComb = {}
            tdeg = self.gens[gi][1]
            for (ii, jj), cf in self.dcoef.items():
                if jj != gi:
                    continue
                prod = A.comb_mul(cf, {ai: F.one()})
                for k, c in prod.items():
                    kpos = pos[(ii, k)]
                    v = F.add(out.get(kpos, F.zero()), c)
                    if F.is_zero(v):
                        out.pop(kpos, None)
                    else:
                        out[kpos] = v
            da = A.diff.get(ai)
            if da:
                sgn = F.one() if tdeg % 2 == 0 else F.neg(F.one())
                for k, c in da.items():
                    kpos = pos[(gi, k)]
                    v = F.add(out.get(kpos, F.zero()), F.mul(sgn, c))
                    if F.is_zero(v):
                        out.pop(kpos, None)
                    else:
                        out[kpos] = v
            if out:
                diff[t] = out
        return DgModule(A, basis, action, diff, name=name or self.name or "free-complex")

    def check_d_squared(self):
        A, F = self.algebra, self.field
        for j in range(self.n_gens):
            acc: Dict[int, LinComb] = {}
            for (i, jj), cf in self.dcoef.items():
                if jj != j:
                    continue
                # d(g_i) * cf part
                for (k, ii), cf2 in self.dcoef.items():
                    if ii != i:
                        continue
                    prod = A.comb_mul(cf2, cf)
                    if prod:
                        cur = acc.setdefault(k, {})
                        A.comb_add(cur, prod)
                # (-1)^{t_i} g_i d(cf) part
                dc = A.comb_diff(cf)
                if dc:
                    sgn = F.one() if self.gens[i][1] % 2 == 0 else F.neg(F.one())
                    cur = acc.setdefault(i, {})
                    A.comb_add(cur, dc, sgn)
            acc = {k: v for k, v in acc.items() if v}
            if acc:
                raise ValidationError(f"d^2 != 0 on generator {self.gens[j][0]}")


# ---------------------------------------------------------------------------
# semifree resolutions


@dataclass
class ResolutionBounds:
    depth: int = 10        # |cohomological degree| cap for new generators
    stages: int = 128      # completion-iteration cap


class SemifreeResolution(FreeComplex):
    """Resolution data: a free complex with an augmentation to the module.

    ``aug[j]`` is the image of generator j in M.  ``dirty_degrees`` lists
    cone degrees where cohomology survives (empty iff the resolution is
    complete); the certified window is derived from them.
    """

    def __init__(self, algebra, module: DgModule, gens, dcoef, aug,
                 dirty_degrees: List[int], complete: bool, name: str = ""):
        super().__init__(algebra, gens, dcoef, name=name)
        self.module = module
        self.aug = {k: dict(v) for k, v in aug.items() if v}
        self.dirty_degrees = sorted(dirty_degrees)
        self.complete = complete

    def gens_by_degree(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, (_, t, _) in enumerate(self.gens):
            out.setdefault(t, []).append(i)
        return dict(sorted(out.items()))

    def is_minimal(self) -> bool:
        """No generator maps onto another with an idempotent coefficient."""
        A = self.algebra
        unit_positions = set()
        for uc in A.units.values():
            unit_positions |= set(uc)
        for cf in self.dcoef.values():
            if any(k in unit_positions for k in cf):
                return False
        return True

    def certified_gen_range(self) -> Tuple[int, int]:
        """Interval of cohomological degrees where the generator list is complete."""
        lo, hi = -(10 ** 9), 10 ** 9
        for c in self.dirty_degrees:
            # a surviving cone class at degree c means a generator at c is missing
            if c <= 0:
                lo = max(lo, c + 1)
            else:
                hi = min(hi, c - 1)
        return lo, hi


def _cone_blocks(res: SemifreeResolution):
    """Cone basis grouped by (degree, vertex): entries ('M', i) / ('P', gi, ai)."""
    M, A = res.module, res.algebra
    blocks: Dict[Tuple[int, str], List[tuple]] = {}
    for i, b in enumerate(M.basis):
        blocks.setdefault((b.degree, b.vertex), []).append(("M", i))
    for gi, (_, t, v) in enumerate(res.gens):
        for ai, b in enumerate(A.basis):
            if b.target == v:
                blocks.setdefault((t + b.degree - 1, b.source), []).append(("P", gi, ai))
    return {k: blocks[k] for k in sorted(blocks)}


def _cone_diff(res: SemifreeResolution, entry: tuple) -> Dict[tuple, object]:
    """Differential of a cone basis element: d(m, p) = (dm + aug(p), -dp)."""
    M, A, F = res.module, res.algebra, res.field
    out: Dict[tuple, object] = {}
    if entry[0] == "M":
        for j, c in M.diff.get(entry[1], {}).items():
            out[("M", j)] = c
        return out
    _, gi, ai = entry
    tdeg = res.gens[gi][1]
    # aug(g a) = aug(g) * a
    av = res.aug.get(gi)
    if av:
        img = M.act(av, {ai: F.one()})
        for j, c in img.items():
            out[("M", j)] = F.add(out.get(("M", j), F.zero()), c)
    # -d_P(g a) = -(d(g) a + (-1)^t g d(a))
    for (ii, jj), cf in res.dcoef.items():
        if jj != gi:
            continue
        prod = A.comb_mul(cf, {ai: F.one()})
        for k, c in prod.items():
            key = ("P", ii, k)
            out[key] = F.add(out.get(key, F.zero()), F.neg(c))
    da = A.diff.get(ai)
    if da:
        sgn = F.one() if tdeg % 2 == 0 else F.neg(F.one())
        for k, c in da.items():
            key = ("P", gi, k)
            out[key] = F.add(out.get(key, F.zero()), F.neg(F.mul(sgn, c)))
    return {k: v for k, v in out.items() if not F.is_zero(v)}


def _cone_cohomology(res: SemifreeResolution):
    """Surviving cone classes: {(degree, vertex): list of class vectors}."""
    F = res.field
    blocks = _cone_blocks(res)
    out: Dict[Tuple[int, str], List[Dict[tuple, object]]] = {}
    for (deg, v), cur in blocks.items():
        nxt = blocks.get((deg + 1, v), [])
        prv = blocks.get((deg - 1, v), [])
        posn = {e: r for r, e in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for c, e in enumerate(cur):
            for k, val in _cone_diff(res, e).items():
                md.rows[posn[k]][c] = val
        ker = kernel_basis(md)
        bdry = Subspace(F, len(cur))
        posc = {e: r for r, e in enumerate(cur)}
        for e in prv:
            vec = [F.zero()] * len(cur)
            for k, val in _cone_diff(res, e).items():
                vec[posc[k]] = val
            bdry.add(vec)
        classes = []
        span = Subspace(F, len(cur))
        for r in bdry.rows:
            span.add(r)
        for vec in ker:
            if span.add(vec):
                classes.append({cur[t]: x for t, x in enumerate(vec) if not F.is_zero(x)})
        if classes:
            out[(deg, v)] = classes
    return out


def degree_zero_radical(A: FinDimDgAlgebra) -> Optional[List[int]]:
    """Degree-0 basis elements spanning a verified nilpotent ideal complement
    of the units; None when the basis is not adapted that way."""
    F = A.field
    unit_support = set()
    for c in A.units.values():
        unit_support |= set(c)
    cand = [i for i, b in enumerate(A.basis) if b.degree == 0 and i not in unit_support]
    if not cand:
        return []
    if any(A.diff.get(i) for i in cand):
        return None  # exactness would not propagate through the action
    cset = set(cand)
    for i in cand:
        for j in cand:
            for k, c in A.mult.get((i, j), {}).items():
                if A.basis[k].degree == 0 and k not in cset and not F.is_zero(c):
                    return None
    # nilpotency of the degree-0 part of the span
    power = {i: {i: F.one()} for i in cand}
    for _ in range(len(cand) + 1):
        nxt = {}
        for i, vec in power.items():
            out: LinComb = {}
            for j, c in vec.items():
                for l in cand:
                    t = A.mult.get((j, l))
                    if t:
                        for k, cc in t.items():
                            if A.basis[k].degree == 0:
                                out[k] = F.add(out.get(k, F.zero()), F.mul(c, cc))
            out = {k: v for k, v in out.items() if not F.is_zero(v)}
            if out:
                nxt[i] = out
        power = nxt
        if not power:
            return cand
    return None


def _cone_act(res: SemifreeResolution, cls: Dict[tuple, object],
              aidx: int) -> Dict[tuple, object]:
    """Right action of an algebra basis element on a cone vector."""
    A, M, F = res.algebra, res.module, res.field
    out: Dict[tuple, object] = {}
    for key, c in cls.items():
        if key[0] == "M":
            t = M.action.get((key[1], aidx))
            if t:
                for k, cc in t.items():
                    out[("M", k)] = F.add(out.get(("M", k), F.zero()), F.mul(c, cc))
        else:
            _, gi, ai = key
            t = A.mult.get((ai, aidx))
            if t:
                for k, cc in t.items():
                    out[("P", gi, k)] = F.add(out.get(("P", gi, k), F.zero()),
                                              F.mul(c, cc))
    return {k: v for k, v in out.items() if not F.is_zero(v)}


def resolve(M: DgModule, bounds: ResolutionBounds = ResolutionBounds(),
            name: str = "") -> SemifreeResolution:
    """Minimal semifree resolution of M within the given bounds.

    New generators are adjoined only against surviving cohomology classes
    of the augmentation cone, quotiented by the degree-zero radical
    action so that only a generating top is killed.  For a connective
    algebra the sweep runs from the top cone degree downwards; for a
    coconnective one upwards, repeating until clean or out of budget.
    """
    A, F = M.algebra, M.field
    degs = [b.degree for b in A.basis]
    down = all(d <= 0 for d in degs)
    up = all(d >= 0 for d in degs)
    if not (down or up):
        raise ValidationError("resolution requires a one-sided grading on the algebra")
    rad0 = degree_zero_radical(A)

    res = SemifreeResolution(A, M, [], {}, {}, [], False, name=name or f"res({M.name})")
    counter = 0
    for stage in range(bounds.stages):
        surv = _cone_cohomology(res)
        if not surv:
            res.dirty_degrees = []
            res.complete = True
            return res
        in_budget = {k: v for k, v in surv.items() if abs(k[0]) <= bounds.depth}
        if not in_budget:
            break
        if down:
            cstar = max(k[0] for k in in_budget)
        else:
            cstar = min(k[0] for k in in_budget)
        at_cstar = {k: v for k, v in sorted(in_budget.items()) if k[0] == cstar}
        # quotient by the degree-zero radical action: only kill a module top
        reachable: Dict[str, List[Dict[tuple, object]]] = {}
        if rad0:
            for (deg, u), classes in at_cstar.items():
                for cls in classes:
                    for aidx in rad0:
                        if A.basis[aidx].target != u:
                            continue
                        w = _cone_act(res, cls, aidx)
                        if w:
                            reachable.setdefault(A.basis[aidx].source, []).append(w)
        blocks = _cone_blocks(res)
        for (deg, v), classes in at_cstar.items():
            cur = blocks.get((deg, v), [])
            posc = {e: r for r, e in enumerate(cur)}
            span = Subspace(F, len(cur))
            prv = blocks.get((deg - 1, v), [])
            for e in prv:
                vec = [F.zero()] * len(cur)
                for k, val in _cone_diff(res, e).items():
                    vec[posc[k]] = val
                span.add(vec)
            for w in reachable.get(v, []):
                vec = [F.zero()] * len(cur)
                for k, val in w.items():
                    vec[posc[k]] = val
                span.add(vec)
            for cls in classes:
                vec = [F.zero()] * len(cur)
                for k, val in cls.items():
                    vec[posc[k]] = val
                red = span.reduce(vec)  # reduced rep: drops M-parts once covered
                if not span.add(vec):
                    continue
                cls = {cur[t]: x for t, x in enumerate(red) if not F.is_zero(x)}
                gi = res.n_gens
                res.gens.append((f"{M.name or 'm'}:{counter}", deg, v))
                counter += 1
                # d(g) = -p-part, aug(g) = m-part
                for key, c in cls.items():
                    if key[0] == "M":
                        cur2 = res.aug.setdefault(gi, {})
                        cur2[key[1]] = F.add(cur2.get(key[1], F.zero()), c)
                    else:
                        _, ii, ai = key
                        cur2 = res.dcoef.setdefault((ii, gi), {})
                        cur2[ai] = F.add(cur2.get(ai, F.zero()), F.neg(c))
        res.dcoef = {k: {a: c for a, c in t.items() if not F.is_zero(c)}
                     for k, t in res.dcoef.items()}
        res.dcoef = {k: t for k, t in res.dcoef.items() if t}
    surv = _cone_cohomology(res)
    res.dirty_degrees = sorted({k[0] for k in surv})
    res.complete = not res.dirty_degrees
    return res


# ---------------------------------------------------------------------------
# Hom complexes and Ext


def hom_to_simple_dims(res: SemifreeResolution, w: str) -> Dict[int, int]:
    """H^* of Hom(P, S_w): generator duals modulo the unit part of d."""
    A, F = res.algebra, res.field
    # component of generator j in degree -t_j when its vertex is w
    slots = [j for j, (_, t, v) in enumerate(res.gens) if v == w]
    # differential: (D phi_j)(g_l) = phi_j(d g_l) = unit-coefficient of dcoef[j, l]
    unit_coeff: Dict[Tuple[int, int], object] = {}
    uc = A.units.get(w, {})
    for (j, l), cf in res.dcoef.items():
        if j in slots:
            s = F.zero()
            for k, c in cf.items():
                if k in uc:
                    s = F.add(s, F.mul(uc[k], c))
            if not F.is_zero(s):
                unit_coeff[(j, l)] = s
    by_deg: Dict[int, List[int]] = {}
    for j in slots:
        by_deg.setdefault(-res.gens[j][1], []).append(j)
    out: Dict[int, int] = {}
    for m, js in sorted(by_deg.items()):
        # map into degree m+1 components (duals of generators at -(m+1))
        tgt = [l for l in range(res.n_gens) if -res.gens[l][1] == m + 1]
        post = {l: r for r, l in enumerate(tgt)}
        md = Matrix.zero(F, len(tgt), len(js))
        for c, j in enumerate(js):
            for l in tgt:
                val = unit_coeff.get((j, l))
                if val is not None:
                    md.rows[post[l]][c] = val
        dim_ker = len(kernel_basis(md))
        src = [j for j in range(res.n_gens) if -res.gens[j][1] == m - 1
               and res.gens[j][2] == w]
        posj = {j: r for r, j in enumerate(js)}
        mp = Matrix.zero(F, len(js), len(src))
        for c, j in enumerate(src):
            for l, r in posj.items():
                val = unit_coeff.get((j, l))
                if val is not None:
                    mp.rows[r][c] = val
        dim_im = rank(mp) if src else 0
        if dim_ker - dim_im:
            out[m] = dim_ker - dim_im
    return out


class ChainMap:
    """A degree-m module chain map between free complexes, by generator images.

    ``images[j]`` is the image of source generator j, a combination over
    (target generator, algebra basis) pairs.
    """

    def __init__(self, source: FreeComplex, target: FreeComplex, degree: int,
                 images: Dict[int, Dict[Tuple[int, int], object]]):
        self.source = source
        self.target = target
        self.degree = degree
        self.images = images


def lift_to_chain_map(res_src: SemifreeResolution, res_tgt: SemifreeResolution,
                      phi: Dict[int, object], degree: int) -> ChainMap:
    """Lift a cocycle phi in Hom(P_src, S_w)^degree to P_src -> P_tgt.

    phi maps generator j (vertex w, t_j = -degree + t) to phi[j] * s_w; the
    lift f satisfies aug_tgt(f(g)) = phi(g) and d f = (-1)^degree f d,
    solved generator by generator in stage order.
    """
    A, F = res_src.algebra, res_src.field
    sgn = F.one() if degree % 2 == 0 else F.neg(F.one())
    images: Dict[int, Dict[Tuple[int, int], object]] = {}
    pairs_tgt = res_tgt.pair_basis()
    pos_tgt = {p: t for t, p in enumerate(pairs_tgt)}

    def d_tgt_vec(vec: Dict[Tuple[int, int], object]) -> Dict[Tuple[int, int], object]:
        out: Dict[Tuple[int, int], object] = {}
        for (gi, ai), c in vec.items():
            tdeg = res_tgt.gens[gi][1]
            for (ii, jj), cf in res_tgt.dcoef.items():
                if jj != gi:
                    continue
                prod = A.comb_mul(cf, {ai: F.one()})
                for k, cc in prod.items():
                    key = (ii, k)
                    out[key] = F.add(out.get(key, F.zero()), F.mul(c, cc))
            da = A.diff.get(ai)
            if da:
                s2 = F.one() if tdeg % 2 == 0 else F.neg(F.one())
                for k, cc in da.items():
                    key = (gi, k)
                    out[key] = F.add(out.get(key, F.zero()), F.mul(c, F.mul(s2, cc)))
        return {k: v for k, v in out.items() if not F.is_zero(v)}

    def aug_tgt_vec(vec) -> LinComb:
        out: LinComb = {}
        M = res_tgt.module
        for (gi, ai), c in vec.items():
            av = res_tgt.aug.get(gi)
            if av:
                img = M.act(av, {ai: F.one()})
                M.comb_add(out, img, c)
        return out

    for j in range(res_src.n_gens):
        tj, vj = res_src.gens[j][1], res_src.gens[j][2]
        # rhs1: required image under d: (-1)^deg * f(d g_j)
        rhs_d: Dict[Tuple[int, int], object] = {}
        for (ii, jj), cf in res_src.dcoef.items():
            if jj != j or ii not in images:
                continue
            for (gi, ai), c in images[ii].items():
                prod = A.comb_mul({ai: F.one()}, cf)
                for k, cc in prod.items():
                    key = (gi, k)
                    rhs_d[key] = F.add(rhs_d.get(key, F.zero()), F.mul(F.mul(sgn, c), cc))
        rhs_d = {k: v for k, v in rhs_d.items() if not F.is_zero(v)}
        # rhs2: required augmentation value phi(g_j) in M_tgt
        rhs_aug: LinComb = {}
        if j in phi and not F.is_zero(phi[j]):
            sw = next(i for i, b in enumerate(res_tgt.module.basis))
            rhs_aug = {sw: phi[j]}
        # solve for f(g_j): combination of target pairs in degree tj + degree
        cand = [p for p in pairs_tgt
                if res_tgt.gens[p[0]][1] + A.basis[p[1]].degree == tj + degree
                and A.basis[p[1]].source == vj]
        Mmod = res_tgt.module
        d_rows = sorted({k for p in cand for k in d_tgt_vec({p: F.one()})} | set(rhs_d))
        a_rows = sorted({k for p in cand for k in aug_tgt_vec({p: F.one()})} | set(rhs_aug))
        pos_d = {k: r for r, k in enumerate(d_rows)}
        pos_a = {k: len(d_rows) + r for r, k in enumerate(a_rows)}
        mat = Matrix.zero(F, len(d_rows) + len(a_rows), len(cand))
        for c, p in enumerate(cand):
            for k, val in d_tgt_vec({p: F.one()}).items():
                mat.rows[pos_d[k]][c] = val
            for k, val in aug_tgt_vec({p: F.one()}).items():
                mat.rows[pos_a[k]][c] = val
        b = [F.zero()] * mat.nrows
        for k, val in rhs_d.items():
            b[pos_d[k]] = val
        for k, val in rhs_aug.items():
            b[pos_a[k]] = val
        x = solve(mat, b)
        if x is None:
            raise WindowError("chain-map lift failed; resolution window too small")
        img = {cand[t]: x[t] for t in range(len(cand)) if not F.is_zero(x[t])}
        if img:
            images[j] = img
    return ChainMap(res_src, res_tgt, degree, images)


# ---------------------------------------------------------------------------
# the Yoneda Ext algebra of the simples, by lifting along minimal resolutions


def ext_algebra(A: FinDimDgAlgebra,
                bounds: ResolutionBounds = ResolutionBounds(),
                window: Tuple[int, int] = (-10, 10),
                resolutions: Optional[Dict[str, "SemifreeResolution"]] = None,
                input_truncated_at: Optional[int] = None,
                name: str = "") -> Tuple[FinDimDgAlgebra, Tuple[int, int]]:
    """Ext of the sum of vertex simples with its composition product.

    Classes are generator duals of the minimal resolutions; products are
    computed by lifting along the resolution and composing.  Valid inside
    the certified window even when the resolutions are incomplete, which
    makes this the independent route against the transfer-based dual.

    When the input algebra is itself a degree truncation of an infinite
    algebra (``input_truncated_at`` = the cut), generators within two
    degrees of the cut may be truncation artifacts, and the certified
    window shrinks accordingly.
    """
    F = A.field
    if resolutions is None:
        resolutions = {v: resolve(simple_module(A, v), bounds) for v in A.vertices}
    win = window
    if input_truncated_at is not None:
        w = abs(input_truncated_at)
        win = (max(win[0], -(w - 2)), min(win[1], w - 2))
        if win[0] > win[1]:
            raise WindowError("input truncation leaves no certified Ext degrees")
    for res in resolutions.values():
        win = ext_window(res, win)
        if not res.is_minimal():
            raise ValidationError("resolution is not minimal; generator duals "
                                  "do not form an Ext basis")
    lo, hi = win
    basis: List[BasisElement] = []
    slot: Dict[Tuple[str, int], int] = {}     # (source simple, generator) -> index
    for v in sorted(resolutions):
        res = resolutions[v]
        for j, (lbl, t, w) in enumerate(res.gens):
            if lo <= -t <= hi:
                slot[(v, j)] = len(basis)
                basis.append(BasisElement(f"[{lbl}^]", -t, v, w))
    monotone = all(b.degree >= 0 for b in basis) or all(b.degree <= 0 for b in basis)
    lifts: Dict[Tuple[str, int], ChainMap] = {}

    def lift_of(v: str, j: int) -> ChainMap:
        key = (v, j)
        if key not in lifts:
            res = resolutions[v]
            w = res.gens[j][2]
            lifts[key] = lift_to_chain_map(res, resolutions[w],
                                           {j: F.one()}, -res.gens[j][1])
        return lifts[key]

    mult: Dict[Tuple[int, int], LinComb] = {}
    units: Dict[str, int] = {}
    for v in sorted(resolutions):
        res = resolutions[v]
        if not res.gens or res.gens[0][1] != 0 or res.gens[0][2] != v:
            raise ValidationError(f"resolution of the simple at {v} does not start "
                                  f"with a degree-0 generator at {v}")
        if any(j in res.aug for j in range(1, res.n_gens)):
            raise ValidationError(f"resolution of the simple at {v} has augmented "
                                  f"higher generators; duals need reduced ones")
        units[v] = slot[(v, 0)]
    for (v, j), x in sorted(slot.items()):
        w = resolutions[v].gens[j][2]
        f = lift_of(v, j)
        res_w = resolutions[w]
        uc_by_vertex = {u: A.units[u] for u in A.vertices}
        for (w2, l), y in sorted(slot.items()):
            if w2 != w:
                continue
            u = res_w.gens[l][2]
            # (psi_l o f)(g_k) = unit-coefficient at u of the (l, a) components
            out: Dict[int, object] = {}
            uc = uc_by_vertex[u]
            for k, img in f.images.items():
                s = F.zero()
                for (gl, ai), c in img.items():
                    if gl == l and ai in uc:
                        s = F.add(s, F.mul(c, uc[ai]))
                if not F.is_zero(s):
                    out[k] = s
            entry: LinComb = {}
            for k, c in out.items():
                kk = slot.get((v, k))
                if kk is None:
                    if monotone:
                        continue
                    raise WindowError("Yoneda product escapes the certified window")
                entry[kk] = c
            if entry:
                mult[(y, x)] = entry
    alg = FinDimDgAlgebra(F, basis, mult, {}, sorted(resolutions), units,
                          name=name or f"Ext({A.name or 'A'})")
    alg.validate(check_triples=(alg.dim <= 48))
    return alg, win


def yoneda_product(res_src: SemifreeResolution, res_mid: SemifreeResolution,
                   psi: Dict[int, object], psi_degree: int,
                   phi: Dict[int, object], phi_degree: int) -> Dict[int, object]:
    """Compose Ext classes given as generator-dual cochains: psi o phi.

    phi is a cocycle on res_src with values at generators of vertex equal
    to res_mid's simple; the result is a cochain on res_src representing
    the product, as values on generators.
    """
    A = res_src.algebra
    F = A.field
    f = lift_to_chain_map(res_src, res_mid, dict(phi), phi_degree)
    out: Dict[int, object] = {}
    for k, img in f.images.items():
        s = F.zero()
        for (gl, ai), c in img.items():
            if gl in psi:
                u = res_mid.gens[gl][2]
                uc = A.units[u]
                if ai in uc:
                    s = F.add(s, F.mul(F.mul(c, uc[ai]), psi[gl]))
        if not F.is_zero(s):
            out[k] = s
    return out


# ---------------------------------------------------------------------------
# the endomorphism dg algebra of a sum of resolutions


def end_dg_algebra(resolutions: Dict[str, SemifreeResolution],
                   name: str = "") -> FinDimDgAlgebra:
    """End(P) for P the sum of the given resolutions, one per simple.

    Basis elements send generator j to (generator i) * a; the vertex set
    is the index set of the resolutions and the idempotent at v is the
    identity of its summand (a sum of basis elements).
    """
    keys = sorted(resolutions)
    A = resolutions[keys[0]].algebra
    F = A.field
    gens: List[Tuple[str, int, str, str]] = []   # (res key, label, tdeg, vertex)
    gen_of: Dict[Tuple[str, int], int] = {}
    for key in keys:
        res = resolutions[key]
        for li, (lbl, t, v) in enumerate(res.gens):
            gen_of[(key, li)] = len(gens)
            gens.append((key, lbl, t, v))
    basis: List[BasisElement] = []
    trip_index: Dict[Tuple[int, int, int], int] = {}
    for gi, (ki, _, ti, vi) in enumerate(gens):
        for gj, (kj, _, tj, vj) in enumerate(gens):
            for ai, b in enumerate(A.basis):
                # the value on g_j lands in g_i * (e_{v_i} A e_{v_j})
                if b.target == vi and b.source == vj:
                    deg = ti + b.degree - tj
                    trip_index[(gi, ai, gj)] = len(basis)
                    basis.append(BasisElement(f"{gi}:{b.label}:{gj}", deg, kj, ki))
    mult: Dict[Tuple[int, int], LinComb] = {}
    for (gi, ai, gj), x in trip_index.items():
        for (gk, bi, gl), y in trip_index.items():
            if gk != gj:
                continue
            prod = A.comb_mul({ai: F.one()}, {bi: F.one()})
            if prod:
                mult[(x, y)] = {trip_index[(gi, c, gl)]: v for c, v in prod.items()}
    diff: Dict[int, LinComb] = {}
    dcoef_of: Dict[str, Dict[Tuple[int, int], LinComb]] = {
        k: resolutions[k].dcoef for k in keys}
    local_of = {}
    for (key, li), gidx in gen_of.items():
        local_of[gidx] = (key, li)
    for (gi, ai, gj), x in trip_index.items():
        out: LinComb = {}
        ki, li = local_of[gi]
        kj, lj = local_of[gj]
        ti = gens[gi][2]
        fdeg = basis[x].degree
        # d_P o f part: sum_k g_k (c_{k,i} a)
        for (ii, jj), cf in dcoef_of[ki].items():
            if jj != li:
                continue
            prod = A.comb_mul(cf, {ai: F.one()})
            for c, v in prod.items():
                key2 = trip_index[(gen_of[(ki, ii)], c, gj)]
                out[key2] = F.add(out.get(key2, F.zero()), v)
        # internal differential: (-1)^{t_i} g_i d(a)
        da = A.diff.get(ai)
        if da:
            sgn = F.one() if ti % 2 == 0 else F.neg(F.one())
            for c, v in da.items():
                key2 = trip_index[(gi, c, gj)]
                out[key2] = F.add(out.get(key2, F.zero()), F.mul(sgn, v))
        # -(-1)^{|f|} f o d_P part: -(-1)^{|f|} g_i (a c_{j,l})
        s2 = F.neg(F.one()) if fdeg % 2 == 0 else F.one()
        for (ii, ll), cf in dcoef_of[kj].items():
            if ii != lj:
                continue
            prod = A.comb_mul({ai: F.one()}, cf)
            for c, v in prod.items():
                key2 = trip_index[(gi, c, gen_of[(kj, ll)])]
                out[key2] = F.add(out.get(key2, F.zero()), F.mul(s2, v))
        out = {k: v for k, v in out.items() if not F.is_zero(v)}
        if out:
            diff[x] = out
    unit_combs: Dict[str, LinComb] = {}
    for key in keys:
        res = resolutions[key]
        comb: LinComb = {}
        for li, (_, t, v) in enumerate(res.gens):
            gidx = gen_of[(key, li)]
            for ai, c in A.units[v].items():
                if A.basis[ai].target == v:
                    comb[trip_index[(gidx, ai, gidx)]] = c
        unit_combs[key] = comb
    return FinDimDgAlgebra(F, basis, mult, diff, keys, name=name or "End(P)",
                           unit_combs=unit_combs)


# ---------------------------------------------------------------------------
# Ext tables and Koszul duals


@dataclass
class ExtTable:
    """Graded dimensions of Hom_{D}(M, N[n]) within a certified window."""
    dims: Dict[int, int]
    window: Tuple[int, int]
    source_name: str = ""
    target_name: str = ""

    def dim(self, n: int) -> int:
        lo, hi = self.window
        if not (lo <= n <= hi):
            raise WindowError(f"degree {n} outside certified window [{lo}, {hi}]")
        return self.dims.get(n, 0)


def hom_complex_dims(res: SemifreeResolution, N: DgModule) -> Dict[int, int]:
    """H^* of Hom(P, N) for a free complex P (computes RHom when P resolves M)."""
    A, F = res.algebra, res.field
    # components: (gen j, N basis element at vertex(g_j)) of degree deg_N - t_j
    comps: List[Tuple[int, int]] = []
    for j, (_, t, v) in enumerate(res.gens):
        for ni, nb in enumerate(N.basis):
            if nb.vertex == v:
                comps.append((j, ni))
    pos = {p: t for t, p in enumerate(comps)}

    def hom_diff(p: Tuple[int, int]) -> Dict[Tuple[int, int], object]:
        # (D phi)(g) = d_N(phi(g)) - (-1)^{|phi|} phi(d_P g)
        j, ni = p
        tj = res.gens[j][1]
        m = N.basis[ni].degree - tj
        out: Dict[Tuple[int, int], object] = {}
        for k, c in N.diff.get(ni, {}).items():
            out[(j, k)] = F.add(out.get((j, k), F.zero()), c)
        s = F.neg(F.one()) if m % 2 == 0 else F.one()
        for (ii, ll), cf in res.dcoef.items():
            if ii != j:
                continue
            img = N.act({ni: F.one()}, cf)
            for k, c in img.items():
                out[(ll, k)] = F.add(out.get((ll, k), F.zero()), F.mul(s, c))
        return {k: v for k, v in out.items() if not F.is_zero(v)}

    by_deg: Dict[int, List[Tuple[int, int]]] = {}
    for (j, ni) in comps:
        by_deg.setdefault(N.basis[ni].degree - res.gens[j][1], []).append((j, ni))
    out: Dict[int, int] = {}
    for m in sorted(by_deg):
        cur = by_deg[m]
        nxt = by_deg.get(m + 1, [])
        prv = by_deg.get(m - 1, [])
        posn = {e: r for r, e in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for c, e in enumerate(cur):
            for k, v in hom_diff(e).items():
                md.rows[posn[k]][c] = v
        dim_ker = len(kernel_basis(md))
        posc = {e: r for r, e in enumerate(cur)}
        mp = Matrix.zero(F, len(cur), len(prv))
        for c, e in enumerate(prv):
            for k, v in hom_diff(e).items():
                mp.rows[posc[k]][c] = v
        dim_im = rank(mp) if prv else 0
        if dim_ker - dim_im:
            out[m] = dim_ker - dim_im
    return out


def ext_window(res: SemifreeResolution, requested: Tuple[int, int]) -> Tuple[int, int]:
    """Certified Ext-degree window given the resolution's dirty cone degrees."""
    if res.complete:
        return requested
    lo, hi = requested
    for c in res.dirty_degrees:
        # a missing generator at cone degree c would contribute near Ext^{-c}
        if c <= 0:
            hi = min(hi, -c - 1)
        else:
            lo = max(lo, -c + 1)
    if lo > hi:
        raise WindowError(
            f"resolution of {res.module.name} certifies no Ext degrees in {requested}; "
            f"surviving cone degrees {res.dirty_degrees} (raise the bounds)")
    return (lo, hi)


def ext_groups(M: DgModule, N: DgModule,
               bounds: ResolutionBounds = ResolutionBounds(),
               window: Tuple[int, int] = (-10, 10),
               resolution: Optional[SemifreeResolution] = None) -> ExtTable:
    """dim Hom_{D(A)}(M, N[n]) for n in the certified part of the window."""
    res = resolution or resolve(M, bounds)
    win = ext_window(res, window)
    dims = hom_complex_dims(res, N)
    dims = {m: d for m, d in dims.items() if win[0] <= m <= win[1]}
    return ExtTable(dims, win, M.name, N.name)


@dataclass
class DualResult:
    """A Koszul dual: minimal model, certified window, and the raw pieces.

    ``dims``/``window`` describe the transferred model; ``ext_dims`` with
    ``ext_window`` are the lifting-route dimensions, whose window can be
    wider when the resolutions had to be truncated.
    """
    model: AInfinityAlgebra
    window: Tuple[int, int]
    dims: Dict[int, int]                       # graded dims within the window
    block_dims: Dict[Tuple[int, str, str], int]
    ext_dims: Dict[Tuple[int, str, str], int]
    ext_window: Tuple[int, int]
    end_algebra: FinDimDgAlgebra
    resolutions: Dict[str, SemifreeResolution]
    retract: RetractData
    coconnective_verified: bool

    def dims_in(self, lo: int, hi: int) -> Dict[int, int]:
        wlo, whi = self.window
        if lo < wlo or hi > whi:
            raise WindowError(f"[{lo}, {hi}] exceeds certified window [{wlo}, {whi}]")
        return {d: n for d, n in self.dims.items() if lo <= d <= hi}

    def ext_graded_dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (m, _, _), n in self.ext_dims.items():
            out[m] = out.get(m, 0) + n
        return dict(sorted(out.items()))


def _dual_pipeline(A: FinDimDgAlgebra, bounds: ResolutionBounds,
                   arity_bound: int, window: Tuple[int, int],
                   name: str) -> DualResult:
    Ss = {v: simple_module(A, v) for v in A.vertices}
    resolutions = {v: resolve(Ss[v], bounds) for v in A.vertices}
    win = window
    for res in resolutions.values():
        win = ext_window(res, win)
    E = end_dg_algebra(resolutions, name=f"End(P {name})".strip())
    ret = build_retract(E)
    model = minimal_model(E, arity_bound, retract=ret, name=name)
    # operational certification: H(End)-block dims must match Hom(P, S) dims;
    # truncated (incomplete) resolutions make End(P) see a junk summand, and
    # any degree where the two routes disagree is cut from the model window
    ext_win = win
    wlo, whi = win
    block_dims: Dict[Tuple[int, str, str], int] = {}
    for i, b in enumerate(model.basis):
        key = (b.degree, b.source, b.target)
        block_dims[key] = block_dims.get(key, 0) + 1
    ext_dims: Dict[Tuple[int, str, str], int] = {}
    for v in A.vertices:
        for w in A.vertices:
            ref = hom_to_simple_dims(resolutions[v], w)
            for m, nn in sorted(ref.items()):
                if ext_win[0] <= m <= ext_win[1] and nn:
                    ext_dims[(m, v, w)] = nn
            for m in range(wlo, whi + 1):
                got = block_dims.get((m, v, w), 0)
                want = ref.get(m, 0)
                if got != want:
                    if m <= 0:
                        wlo = max(wlo, m + 1)
                    else:
                        whi = min(whi, m - 1)
    if wlo > whi:
        raise WindowError(f"no certified dual window remains for {name}")
    win = (wlo, whi)
    dims = {}
    for b in model.basis:
        if wlo <= b.degree <= whi:
            dims[b.degree] = dims.get(b.degree, 0) + 1
    dims = dict(sorted(dims.items()))
    blocks = {k: n for k, n in sorted(block_dims.items()) if wlo <= k[0] <= whi}
    return DualResult(model, win, dims, blocks,
                      dict(sorted(ext_dims.items())), ext_win,
                      E, resolutions, ret,
                      coconnective_verified=all(d >= 0 for d in dims))


def koszul_dual(A: FinDimDgAlgebra,
                bounds: ResolutionBounds = ResolutionBounds(),
                arity_bound: int = 5,
                window: Tuple[int, int] = (-1, 10)) -> DualResult:
    """Derived endomorphisms of the vertex simples of a connective algebra.

    The underlying graded algebra is Ext(S, S) with the induced product;
    the higher operations are transferred from the endomorphism dg
    algebra of the resolution, truncated to the certified window.
    """
    bad = [d for d in A.cohomology_dims() if d > 0]
    if bad:
        raise ValidationError(f"dual of the connective side requires no positive "
                              f"cohomology (found degrees {bad})")
    out = _dual_pipeline(A, bounds, arity_bound, window,
                         name=f"dual({A.name or 'A'})")
    return out


def koszul_dual_of_coconnective(E: FinDimDgAlgebra,
                                bounds: ResolutionBounds = ResolutionBounds(),
                                arity_bound: int = 5,
                                window: Tuple[int, int] = (-10, 1)) -> DualResult:
    """Derived endomorphisms of H^0 of a coconnective algebra (connective output)."""
    if not h0_semisimple_elementary(E):
        raise ValidationError("H^0 is not the span of the vertex idempotents; "
                              "the coconnective dual requires semisimple H^0")
    bad = [d for d in E.cohomology_dims() if d < 0]
    if bad:
        raise ValidationError(f"algebra is not coconnective (degrees {bad})")
    return _dual_pipeline(E, bounds, arity_bound, window,
                          name=f"dual({E.name or 'E'})")


@dataclass
class ConcentrationReport:
    concentrated: bool
    offending: List[int]
    d: int
    window: Tuple[int, int]


def check_concentration(dims: Dict[int, int], d: int,
                        window: Tuple[int, int]) -> ConcentrationReport:
    """True iff all dims outside (-d, 0] vanish, within the certified window."""
    lo, hi = window
    if lo > -d - 1 or hi < 1:
        raise WindowError(f"certified window [{lo}, {hi}] too small for d={d}; "
                          f"need it to contain [{-d - 1}, 1]")
    offending = sorted(k for k, n in dims.items() if n and not (-d < k <= 0))
    return ConcentrationReport(not offending, offending, d, window)


# ---------------------------------------------------------------------------
# double dual


@dataclass
class DoubleDualReport:
    verdict: str                     # "equal" | "mismatch" | "inconclusive"
    detail: str
    dims_original: Dict[int, int]
    dims_double_dual: Dict[int, int]
    window: Tuple[int, int]
    first_dual: Optional[DualResult] = None
    second_dual: Optional[DualResult] = None


def algebra_from_formal_model(model: AInfinityAlgebra, window: Tuple[int, int],
                              name: str = "") -> FinDimDgAlgebra:
    """A minimal model with no higher operations, as a plain graded algebra.

    The basis is truncated to the certified window; products that leave
    the window are dropped, which is an ideal quotient for one-sided
    gradings.
    """
    for n, table in model.m.items():
        if n >= 3 and any(table.values()):
            raise ValidationError("model has nonzero higher operations; not formal")
    lo, hi = window
    keep = [i for i, b in enumerate(model.basis) if lo <= b.degree <= hi]
    degs = [model.basis[i].degree for i in keep]
    monotone = all(d >= 0 for d in degs) or all(d <= 0 for d in degs)
    pos = {i: t for t, i in enumerate(keep)}
    basis = [model.basis[i] for i in keep]
    F = model.field
    mult: Dict[Tuple[int, int], LinComb] = {}
    for (i, j), t in model.m_table(2).items():
        if i in pos and j in pos:
            entry = {}
            for k, c in t.items():
                if k in pos:
                    entry[pos[k]] = c
                elif not monotone:
                    raise ValidationError("window truncation is not an ideal here")
            if entry:
                mult[(pos[i], pos[j])] = entry
    units = {v: pos[i] for v, i in model.unit_indices.items() if i in pos}
    return FinDimDgAlgebra(F, basis, mult, {}, model.vertices, units,
                           name=name or (model.name + ".algebra"))


def double_dual_compare(A: FinDimDgAlgebra,
                        bounds: ResolutionBounds = ResolutionBounds(),
                        arity_bound: int = 4,
                        window: Tuple[int, int] = (-6, 6)) -> DoubleDualReport:
    """Compare H(dual(dual(A))) with H(A): graded dims and product constants.

    Both dualization steps use the Yoneda route (generator duals with
    lifted composition), which stays valid inside the certified window
    even when the resolutions are infinite and truncated.  If the first
    dual supports a transferred model with nonzero higher operations, the
    associative second step would be lossy, so the verdict degrades to
    inconclusive in that case.
    """
    bad = [d for d in A.cohomology_dims() if d > 0]
    if bad:
        raise ValidationError("double dual starts from a connective algebra")
    resolutions = {v: resolve(simple_module(A, v), bounds) for v in A.vertices}
    E_alg, win1 = ext_algebra(A, bounds, window=(0, window[1]),
                              resolutions=resolutions, name=f"Ext({A.name})")
    formal_note = ""
    if all(res.complete for res in resolutions.values()):
        first = koszul_dual(A, bounds, arity_bound, window=(min(0, window[0]), window[1]))
        higher = [n for n in first.model.m if n >= 3
                  and any(first.model.m[n].values())]
        if higher:
            return DoubleDualReport(
                "inconclusive",
                f"first dual has nonzero higher operations at arities {higher}; "
                f"the associative double dual would forget them",
                {}, {}, win1, first, None)
    else:
        first = None
        formal_note = " (first dual taken as its Yoneda algebra; resolutions truncated)"
    if not h0_semisimple_elementary(E_alg):
        return DoubleDualReport("inconclusive",
                                "H^0 of the first dual is not semisimple elementary",
                                {}, {}, win1, first, None)
    truncated = None if all(r.complete for r in resolutions.values()) else win1[1]
    second_alg, win2 = ext_algebra(E_alg, bounds, window=(window[0], 0),
                                   input_truncated_at=truncated,
                                   name=f"Ext2({A.name})")
    H_A = build_retract(A).cohomology_algebra(name="H(A)")
    wlo = max(window[0], win2[0])
    whi = min(window[1], win2[1])
    dims_A = {d: n for d, n in H_A.graded_dims().items() if wlo <= d <= whi}
    dims_DD = {d: n for d, n in second_alg.graded_dims().items() if wlo <= d <= whi}
    if dims_A != dims_DD:
        return DoubleDualReport("mismatch",
                                f"graded dims differ: {dims_A} vs {dims_DD}",
                                dims_A, dims_DD, (wlo, whi), first, None)
    ok, why = elementary_isomorphic(H_A, second_alg)
    return DoubleDualReport("equal" if ok else "mismatch", why + formal_note,
                            dims_A, dims_DD, (wlo, whi), first, None)


def elementary_isomorphic(A: FinDimDgAlgebra, B: FinDimDgAlgebra) -> Tuple[bool, str]:
    """Graded isomorphism test for basic elementary algebras, by scaling.

    Matches units by vertex, pairs the remaining basis blockwise (this
    needs all non-unit blocks to be at most 1-dimensional), and solves
    the multiplicative scaling constraints by propagation.
    """
    F = A.field
    if sorted(A.vertices) != sorted(B.vertices):
        return False, f"vertex sets differ: {A.vertices} vs {B.vertices}"
    ua = {next(iter(c)) for c in A.units.values() if len(c) == 1}
    ub = {next(iter(c)) for c in B.units.values() if len(c) == 1}
    if len(ua) != len(A.units) or len(ub) != len(B.units):
        return False, "units are not single basis elements"

    def blocks(X, skip):
        out: Dict[Tuple[int, str, str], List[int]] = {}
        for i, b in enumerate(X.basis):
            if i in skip:
                continue
            out.setdefault((b.degree, b.source, b.target), []).append(i)
        return out

    ba, bb = blocks(A, ua), blocks(B, ub)
    if sorted(ba) != sorted(bb) or any(len(ba[k]) != len(bb[k]) for k in ba):
        return False, "non-unit block dimensions differ"
    if any(len(v) > 1 for v in ba.values()):
        return False, "a non-unit block has dimension > 1; scaling match not attempted"
    pair = {}
    for k in ba:
        pair[ba[k][0]] = bb[k][0]
    for v, c in A.units.items():
        pair[next(iter(c))] = next(iter(B.units[v]))
    # scaling unknowns lam_i (lam = 1 on units); constraint per nonzero product
    lam: Dict[int, object] = {i: F.one() for i in ua}
    pending = True
    constraints = []
    for (i, j), t in A.mult.items():
        nz = [(k, c) for k, c in t.items() if not F.is_zero(c)]
        tb = B.mult.get((pair[i], pair[j]), {})
        nzb = [(k, c) for k, c in tb.items() if not F.is_zero(c)]
        if not nz:
            if nzb:
                return False, f"product zero in A but not in B at ({i},{j})"
            continue
        if len(nz) != 1 or len(nzb) != 1:
            if len(nz) != len(nzb):
                return False, "product support sizes differ"
        if not nzb:
            return False, f"product nonzero in A but zero in B at ({i},{j})"
        (k, c), (kb, cb) = nz[0], nzb[0]
        if pair[k] != kb:
            return False, "product lands in different blocks"
        constraints.append((i, j, k, F.div(c, cb)))
    for (i, j), t in B.mult.items():
        back = {v: k for k, v in pair.items()}
        if (back[i], back[j]) not in A.mult and any(not F.is_zero(c) for c in t.values()):
            return False, "product nonzero in B but zero in A"
    # propagate lam_i * lam_j = ratio * lam_k
    for _ in range(len(constraints) + 1):
        progress = False
        for (i, j, k, ratio) in constraints:
            known = [x in lam for x in (i, j, k)]
            if all(known):
                if F.mul(lam[i], lam[j]) != F.mul(ratio, lam[k]):
                    return False, "scaling constraints inconsistent"
            elif known.count(False) == 1:
                if not known[2]:
                    lam[k] = F.div(F.mul(lam[i], lam[j]), ratio)
                elif not known[0]:
                    lam[i] = F.div(F.mul(ratio, lam[k]), lam[j])
                else:
                    lam[j] = F.div(F.mul(ratio, lam[k]), lam[i])
                progress = True
        if not progress:
            break
    for (i, j, k, ratio) in constraints:
        for x in (i, j, k):
            lam.setdefault(x, F.one())
    for (i, j, k, ratio) in constraints:
        if F.mul(lam[i], lam[j]) != F.mul(ratio, lam[k]):
            return False, "scaling constraints unsatisfiable"
    return True, "structure constants match after scaling"


# ---------------------------------------------------------------------------
# mapping cones of module maps


def mapping_cone(f_images: Dict[int, LinComb], M: DgModule, N: DgModule,
                 name: str = "") -> DgModule:
    """Cone of a degree-0 chain map f: M -> N given by images of M's basis."""
    F = M.field
    # verify chain map
    for i in range(M.dim):
        lhs = N.d(f_images.get(i, {}))
        rhs: LinComb = {}
        for j, c in M.diff.get(i, {}).items():
            N.comb_add(rhs, f_images.get(j, {}), c)
        if lhs != rhs:
            raise ValidationError("not a chain map")
        fi = f_images.get(i, {})
        for k in fi:
            if N.basis[k].degree != M.basis[i].degree or \
               N.basis[k].vertex != M.basis[i].vertex:
                raise ValidationError("map is not degree-0 and vertex-preserving")
    basis = [ModBasisElement(f"n.{b.label}", b.degree, b.vertex) for b in N.basis] + \
            [ModBasisElement(f"m.{b.label}", b.degree - 1, b.vertex) for b in M.basis]
    off = N.dim
    action: Dict[Tuple[int, int], LinComb] = {}
    for (i, j), t in N.action.items():
        action[(i, j)] = dict(t)
    for (i, j), t in M.action.items():
        action[(i + off, j)] = {k + off: c for k, c in t.items()}
    diff: Dict[int, LinComb] = {}
    for i, t in N.diff.items():
        diff[i] = dict(t)
    for i in range(M.dim):
        out: LinComb = {}
        for j, c in f_images.get(i, {}).items():
            out[j] = c
        for j, c in M.diff.get(i, {}).items():
            out[j + off] = F.neg(c)
        if out:
            diff[i + off] = out
    return DgModule(M.algebra, basis, action, diff, name=name or f"cone({M.name}->{N.name})")


def module_from_block(A: FinDimDgAlgebra, blk: ModuleBlock) -> DgModule:
    """Build a DgModule from a parsed module block, extending arrow actions to paths."""
    F = A.field
    gens = blk.generators
    gpos = {g[0]: i for i, g in enumerate(gens)}
    basis = [ModBasisElement(lbl, deg, v) for (lbl, deg, v) in gens]
    # arrow actions as matrices
    arrow_act: Dict[str, Dict[int, LinComb]] = {}
    for (g, a), comb in blk.actions.items():
        if g not in gpos:
            raise ValidationError(f"unknown generator {g}")
        arrow_act.setdefault(a, {})[gpos[g]] = {gpos[h]: c for h, c in comb.items()}
    action: Dict[Tuple[int, int], LinComb] = {}
    for j, b in enumerate(A.basis):
        lbl = b.label
        if lbl.startswith("e_"):
            v = lbl[2:]
            for i, g in enumerate(gens):
                if g[2] == v:
                    action[(i, j)] = {i: F.one()}
            continue
        arrows = lbl.split("*")
        for i in range(len(basis)):
            vec: LinComb = {i: F.one()}
            # leftmost arrow acts first on the module
            for a in arrows:
                nxt: LinComb = {}
                amat = arrow_act.get(a, {})
                for t, c in vec.items():
                    for u, cc in amat.get(t, {}).items():
                        nxt[u] = F.add(nxt.get(u, F.zero()), F.mul(c, cc))
                vec = {k: v for k, v in nxt.items() if not F.is_zero(v)}
                if not vec:
                    break
            if vec:
                action[(i, j)] = vec
    diff: Dict[int, LinComb] = {}
    for g, comb in blk.differentials.items():
        diff[gpos[g]] = {gpos[h]: c for h, c in comb.items()}
    M = DgModule(A, basis, action, diff, name=blk.name)
    M.validate()
    return M

"""Loewy-theoretic analysis of modules in extension windows.

top/rad are computed on the honest cochain level: the module is first
replaced by its smart truncation below the top cohomological degree, so
the quotient onto the largest semisimple piece of the top cohomology is
a genuine degreewise-surjective map of dg modules and the radical is its
literal kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import ValidationError
from .exactlin import Matrix, Subspace, kernel_basis, solve
from .presentations import FinDimDgAlgebra, LinComb
from .dgmod import DgModule, ModBasisElement, degree_zero_radical


def _check_window(M: DgModule, d: int):
    dims = M.cohomology_dims()
    bad = [k for k in dims if not (-d < k <= 0)]
    if bad:
        raise ValidationError(f"module has cohomology outside (-{d}, 0]: degrees {bad}")


def _check_algebra(A: FinDimDgAlgebra):
    if any(b.degree > 0 for b in A.basis):
        raise ValidationError("Loewy analysis needs the algebra concentrated in "
                              "nonpositive degrees")
    if degree_zero_radical(A) is None:
        raise ValidationError("degree-zero part is not units plus a nilpotent ideal")


class _SubmoduleBuilder:
    """A dg submodule described by per-degree spanning vectors over M's basis."""

    def __init__(self, M: DgModule):
        self.M = M
        F = M.field
        self.vectors: List[Tuple[str, int, str, LinComb]] = []  # label, degree, vertex, comb

    def add(self, label: str, degree: int, vertex: str, comb: LinComb):
        self.vectors.append((label, degree, vertex, dict(comb)))

    def build(self, name: str) -> DgModule:
        M, F = self.M, self.M.field
        basis = [ModBasisElement(lbl, deg, v) for (lbl, deg, v, _) in self.vectors]
        # coordinates of an M-vector in the new basis, solved per (degree, vertex)
        groups: Dict[Tuple[int, str], List[int]] = {}
        for t, (_, deg, v, _) in enumerate(self.vectors):
            groups.setdefault((deg, v), []).append(t)
        mats = {}
        for key, idxs in groups.items():
            deg, v = key
            rows = M.block(deg, v)
            posr = {r: k for k, r in enumerate(rows)}
            cols = []
            for t in idxs:
                vec = [F.zero()] * len(rows)
                for r, c in self.vectors[t][3].items():
                    vec[posr[r]] = c
                cols.append(vec)
            mats[key] = (rows, posr, Matrix.from_columns(F, cols, len(rows)), idxs)

        def coords(vec: LinComb) -> LinComb:
            out: LinComb = {}
            parts: Dict[Tuple[int, str], LinComb] = {}
            for r, c in vec.items():
                b = M.basis[r]
                parts.setdefault((b.degree, b.vertex), {})[r] = c
            for key, part in parts.items():
                if key not in mats:
                    raise ValidationError("vector leaves the submodule")
                rows, posr, mat, idxs = mats[key]
                b = [F.zero()] * len(rows)
                for r, c in part.items():
                    b[posr[r]] = c
                x = solve(mat, b)
                if x is None:
                    raise ValidationError("vector leaves the submodule")
                for k, c in zip(idxs, x):
                    if not F.is_zero(c):
                        out[k] = F.add(out.get(k, F.zero()), c)
            return out

        action: Dict[Tuple[int, int], LinComb] = {}
        diff: Dict[int, LinComb] = {}
        A = M.algebra
        for t, (_, deg, v, comb) in enumerate(self.vectors):
            for j in range(A.dim):
                img = M.act(comb, {j: F.one()})
                if img:
                    action[(t, j)] = coords(img)
            dimg = M.d(comb)
            if dimg:
                diff[t] = coords(dimg)
        return DgModule(M.algebra, basis, action, diff, name=name)


def smart_truncate_above(M: DgModule, c: int, name: str = "") -> DgModule:
    """The dg submodule with degrees < c unchanged and kernel of d at c."""
    F = M.field
    sb = _SubmoduleBuilder(M)
    verts = sorted({b.vertex for b in M.basis})
    for i, b in enumerate(M.basis):
        if b.degree < c:
            sb.add(b.label, b.degree, b.vertex, {i: F.one()})
    for v in verts:
        cur = M.block(c, v)
        if not cur:
            continue
        nxt = M.block(c + 1, v)
        posn = {g: r for r, g in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for col, i in enumerate(cur):
            for j, val in M.diff.get(i, {}).items():
                md.rows[posn[j]][col] = val
        for t, vec in enumerate(kernel_basis(md)):
            comb = {cur[k]: x for k, x in enumerate(vec) if not F.is_zero(x)}
            sb.add(f"z{c}_{v}_{t}", c, v, comb)
    return sb.build(name or f"trunc({M.name})")


@dataclass
class TopData:
    topd: int
    top: DgModule                       # semisimple, concentrated in degree topd
    multiplicities: Dict[str, int]      # simple -> multiplicity in the top
    projection: Dict[int, LinComb]      # truncated-module basis -> top combination
    truncated: DgModule


def top(M: DgModule, A: FinDimDgAlgebra, d: int) -> TopData:
    """Largest semisimple quotient of the top cohomology, as a dg quotient."""
    _check_algebra(A)
    _check_window(M, d)
    F = M.field
    hdims = M.cohomology_dims()
    if not hdims:
        raise ValidationError("module is acyclic; its top is empty")
    c = max(hdims)
    Mt = smart_truncate_above(M, c)
    rad0 = degree_zero_radical(A) or []
    verts = sorted({b.vertex for b in Mt.basis})
    top_basis: List[ModBasisElement] = []
    proj: Dict[int, LinComb] = {}
    mults: Dict[str, int] = {}
    for v in verts:
        cur = Mt.block(c, v)
        if not cur:
            continue
        posr = {r: k for k, r in enumerate(cur)}
        killed = Subspace(F, len(cur))
        # boundaries from degree c-1
        for i in Mt.block(c - 1, v):
            vec = [F.zero()] * len(cur)
            for j, val in Mt.diff.get(i, {}).items():
                vec[posr[j]] = val
            killed.add(vec)
        # radical action from any vertex into v
        for aidx in rad0:
            if A.basis[aidx].source != v:
                continue
            u = A.basis[aidx].target
            for i in Mt.block(c, u):
                img = Mt.act({i: F.one()}, {aidx: F.one()})
                vec = [F.zero()] * len(cur)
                for j, val in img.items():
                    vec[posr[j]] = val
                killed.add(vec)
        # complement = top multiplicity space at v
        count = 0
        comp = Subspace(F, len(cur))
        for r in killed.rows:
            comp.add(r)
        for t in range(len(cur)):
            vec = [F.zero()] * len(cur)
            vec[t] = F.one()
            if comp.add(vec):
                tb = ModBasisElement(f"top_{v}_{count}", c, v)
                tidx = len(top_basis)
                top_basis.append(tb)
                count += 1
                # projection: coordinates along the complement choice
                # recorded below for all block elements at once
        if count:
            mults[v] = count
    # build projection per block by solving against (killed + chosen complement)
    top_index: Dict[Tuple[str, int], int] = {}
    t = 0
    for b in top_basis:
        v = b.vertex
        k = int(b.label.rsplit("_", 1)[1])
        top_index[(v, k)] = t
        t += 1
    for v in verts:
        cur = Mt.block(c, v)
        if not cur or v not in mults:
            continue
        posr = {r: k for k, r in enumerate(cur)}
        killed = Subspace(F, len(cur))
        for i in Mt.block(c - 1, v):
            vec = [F.zero()] * len(cur)
            for j, val in Mt.diff.get(i, {}).items():
                vec[posr[j]] = val
            killed.add(vec)
        for aidx in rad0:
            if A.basis[aidx].source != v:
                continue
            u = A.basis[aidx].target
            for i in Mt.block(c, u):
                img = Mt.act({i: F.one()}, {aidx: F.one()})
                vec = [F.zero()] * len(cur)
                for j, val in img.items():
                    vec[posr[j]] = val
                killed.add(vec)
        comp_vecs = []
        comp = Subspace(F, len(cur))
        for r in killed.rows:
            comp.add(r)
        for tt in range(len(cur)):
            vec = [F.zero()] * len(cur)
            vec[tt] = F.one()
            if comp.add(vec):
                comp_vecs.append(vec)
        cols = killed.basis() + comp_vecs
        mat = Matrix.from_columns(F, cols, len(cur))
        nk = killed.dim
        for r in cur:
            b = [F.zero()] * len(cur)
            b[posr[r]] = F.one()
            x = solve(mat, b)
            entry: LinComb = {}
            for k in range(len(comp_vecs)):
                cc = x[nk + k]
                if not F.is_zero(cc):
                    entry[top_index[(v, k)]] = cc
            if entry:
                proj[r] = entry
    # the top as a dg module: semisimple, units act, radical acts by zero
    action: Dict[Tuple[int, int], LinComb] = {}
    for tt, b in enumerate(top_basis):
        for j, cc in A.units.get(b.vertex, {}).items():
            if not F.is_zero(cc):
                action[(tt, j)] = {tt: cc}
    T = DgModule(A, top_basis, action, {}, name=f"top({M.name})")
    return TopData(c, T, mults, proj, Mt)


def rad(M: DgModule, A: FinDimDgAlgebra, d: int) -> DgModule:
    """Kernel of the quotient onto the top, as an honest dg submodule."""
    td = top(M, A, d)
    Mt, F = td.truncated, M.field
    sb = _SubmoduleBuilder(Mt)
    for i, b in enumerate(Mt.basis):
        if b.degree < td.topd:
            sb.add(b.label, b.degree, b.vertex, {i: F.one()})
    # kernel of the projection in top degree, per vertex
    verts = sorted({b.vertex for b in Mt.basis})
    for v in verts:
        cur = Mt.block(td.topd, v)
        if not cur:
            continue
        posr = {r: k for k, r in enumerate(cur)}
        ncols = len(cur)
        tops = sorted({t for r in cur for t in td.projection.get(r, {})})
        post = {t: k for k, t in enumerate(tops)}
        md = Matrix.zero(F, len(tops), ncols)
        for col, r in enumerate(cur):
            for t, c in td.projection.get(r, {}).items():
                md.rows[post[t]][col] = c
        for k, vec in enumerate(kernel_basis(md)):
            comb = {cur[s]: x for s, x in enumerate(vec) if not F.is_zero(x)}
            sb.add(f"r{td.topd}_{v}_{k}", td.topd, v, comb)
    return sb.build(f"rad({M.name})")


def heart_loewy_length(A: FinDimDgAlgebra, M: DgModule, degree: int) -> int:
    """Loewy length of H^degree(M) as a module over H^0 of the algebra.

    Computed via the radical filtration: representatives of the cohomology
    are hit with degree-zero radical elements until nothing survives
    modulo boundaries.
    """
    F = M.field
    rad0 = degree_zero_radical(A) or []
    verts = sorted({b.vertex for b in M.basis})
    # cocycles and boundaries per vertex at the given degree
    state: Dict[str, Tuple[List[int], Subspace, Subspace]] = {}
    for v in verts:
        cur = M.block(degree, v)
        if not cur:
            continue
        posr = {r: k for k, r in enumerate(cur)}
        nxt = M.block(degree + 1, v)
        posn = {g: r for r, g in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for col, i in enumerate(cur):
            for j, val in M.diff.get(i, {}).items():
                md.rows[posn[j]][col] = val
        ker = Subspace.spanned_by(F, kernel_basis(md), len(cur))
        bdry = Subspace(F, len(cur))
        for i in M.block(degree - 1, v):
            vec = [F.zero()] * len(cur)
            for j, val in M.diff.get(i, {}).items():
                vec[posr[j]] = val
            bdry.add(vec)
        state[v] = (cur, ker, bdry)

    def layer_dims(layers: Dict[str, List[list]]) -> int:
        return sum(len(vs) for vs in layers.values())

    # current layer: spanning vectors of rad^n H per vertex (mod boundaries)
    layers: Dict[str, List[list]] = {}
    for v, (cur, ker, bdry) in state.items():
        span = Subspace(F, len(cur))
        for r in bdry.rows:
            span.add(r)
        vs = []
        for vec in ker.basis():
            if span.add(vec):
                vs.append(vec)
        if vs:
            layers[v] = vs
    n = 0
    while layer_dims(layers):
        n += 1
        if n > M.dim + 1:
            raise ValidationError("radical tower fails to terminate")
        nxt_layers: Dict[str, List[list]] = {}
        for v, vecs in layers.items():
            cur = state[v][0]
            for aidx in rad0:
                if A.basis[aidx].target != v:
                    continue
                u = A.basis[aidx].source
                if u not in state:
                    continue
                cur_u, ker_u, bdry_u = state[u]
                posr_u = {r: k for k, r in enumerate(cur_u)}
                for vec in vecs:
                    img: LinComb = {}
                    comb = {cur[k]: c for k, c in enumerate(vec) if not F.is_zero(c)}
                    out = M.act(comb, {aidx: F.one()})
                    w = [F.zero()] * len(cur_u)
                    for r, c in out.items():
                        w[posr_u[r]] = c
                    nxt_layers.setdefault(u, []).append(w)
        # reduce each vertex layer modulo boundaries
        layers = {}
        for v, vecs in nxt_layers.items():
            cur, ker, bdry = state[v]
            span = Subspace(F, len(cur))
            for r in bdry.rows:
                span.add(r)
            vs = []
            for vec in vecs:
                if span.add(vec):
                    vs.append(vec)
            if vs:
                layers[v] = vs
    return n


@dataclass
class LoewyProfile:
    topd: int
    top_multiplicities: Dict[str, int]
    radical_tower: List[int]            # total cohomology dims along the tower
    big_loewy: int
    loewy_lower: int
    loewy_upper: int
    lower_clause: str                   # which lower-bound clause fired
    heart_lengths: Dict[int, int]       # degree -> Loewy length of H^degree


def big_loewy(M: DgModule, A: FinDimDgAlgebra, d: int) -> int:
    return loewy_profile(M, A, d).big_loewy


def loewy_bounds(M: DgModule, A: FinDimDgAlgebra, d: int) -> Tuple[int, int]:
    p = loewy_profile(M, A, d)
    return (p.loewy_lower, p.loewy_upper)


def loewy_profile(M: DgModule, A: FinDimDgAlgebra, d: int) -> LoewyProfile:
    """Radical tower, big Loewy length, and the certified bounds."""
    _check_algebra(A)
    _check_window(M, d)
    hdims = M.cohomology_dims()
    heart_lengths = {deg: heart_loewy_length(A, M, deg) for deg in hdims}
    tower = [sum(hdims.values())]
    cur = M
    steps = 0
    topd0: Optional[int] = None
    mults0: Dict[str, int] = {}
    while sum(cur.cohomology_dims().values()):
        td = top(cur, A, d)
        if topd0 is None:
            topd0, mults0 = td.topd, td.multiplicities
        cur = rad(cur, A, d)
        steps += 1
        total = sum(cur.cohomology_dims().values())
        tower.append(total)
        if steps > M.dim + 1:
            raise ValidationError("radical tower fails to terminate")
        if tower[-1] >= tower[-2]:
            raise ValidationError("radical tower does not strictly decrease")
    big = steps
    lower_heart = max(heart_lengths.values()) if heart_lengths else 0
    lower_ceil = -(-big // d)
    if lower_ceil > lower_heart:
        lower, clause = lower_ceil, "ceil(big_loewy/d)"
    else:
        lower, clause = lower_heart, "max heart Loewy length"
    if topd0 is None:
        topd0 = 0
    return LoewyProfile(topd0, mults0, tower, big, lower, big, clause,
                        heart_lengths)


@dataclass
class HeightReport:
    bound: int
    finite: bool
    nilpotency_index: int


def height_report(A: FinDimDgAlgebra, d: int) -> HeightReport:
    """d times the radical nilpotency index of H^0 bounds every Loewy length."""
    _check_algebra(A)
    dims = A.cohomology_dims()
    bad = [k for k in dims if not (-d < k <= 0)]
    if bad:
        raise ValidationError(f"cohomology outside (-{d}, 0]: degrees {bad}")
    F = A.field
    rad0 = degree_zero_radical(A) or []
    # nilpotency index of the image of rad0 in H^0: iterate products of
    # rad0 spans modulo boundaries in degree 0
    bdry = Subspace(F, A.dim)
    for i, b in enumerate(A.basis):
        if b.degree == -1:
            for j, c in A.diff.get(i, {}).items():
                vec = [F.zero()] * A.dim
                vec[j] = c
                bdry.add(vec)
    layer: List[LinComb] = [{i: F.one()} for i in rad0]
    idx = 0
    while True:
        span = Subspace(F, A.dim)
        for r in bdry.rows:
            span.add(r)
        alive = []
        for comb in layer:
            vec = [F.zero()] * A.dim
            for i, c in comb.items():
                vec[i] = c
            if span.add(vec):
                alive.append(comb)
        if not alive:
            break
        idx += 1
        if idx > A.dim + 1:
            raise ValidationError("radical powers fail to terminate")
        nxt = []
        for comb in alive:
            for j in rad0:
                prod = A.comb_mul(comb, {j: F.one()})
                if prod:
                    nxt.append(prod)
        layer = nxt
    b = idx + 1 if rad0 else 1
    return HeightReport(d * b, True, b)

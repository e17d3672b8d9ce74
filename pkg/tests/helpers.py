"""Shared fixtures: presentation sources, random generators, and the
bar-complex Ext oracle used as an independent route against resolutions."""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Tuple

from koszulkit.exactlin import Field, GF, Matrix, QQ, kernel_basis, rank
from koszulkit.presentations import (Arrow, DgAlgebraPresentation, FinDimDgAlgebra,
                                     GradedQuiver, Path, parse_presentation,
                                     realize_algebra)

# ---------------------------------------------------------------------------
# presentation sources

SRC = {
    "kA2": "field {f}\nvertices 1 2\narrow a : 1 -> 2 deg 0\n",
    "kA3": ("field {f}\nvertices 1 2 3\n"
            "arrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg 0\n"),
    "kA3rad2": ("field {f}\nvertices 1 2 3\n"
                "arrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg 0\nrelation b*a\n"),
    "kx2": "field {f}\nvertices v\narrow x : v -> v deg 0\nrelation x*x\n",
    "k1": "field {f}\nvertices v\n",
    "k2": "field {f}\nvertices 1 2\n",
    "k3": "field {f}\nvertices 1 2 3\n",
    # linear A4, cubic path killed; graded and ungraded versions
    "cubic0": ("field {f}\nvertices 1 2 3 4\n"
               "arrow a1 : 1 -> 2 deg 0\narrow a2 : 2 -> 3 deg 0\n"
               "arrow a3 : 3 -> 4 deg 0\nrelation a3*a2*a1\n"),
    "cubic1": ("field {f}\nvertices 1 2 3 4\n"
               "arrow a1 : 1 -> 2 deg 1\narrow a2 : 2 -> 3 deg 1\n"
               "arrow a3 : 3 -> 4 deg 1\nrelation a3*a2*a1\n"),
    # reversed A4 with quadratic monomial relations (ungraded)
    "kQtilde": ("field {f}\nvertices 1 2 3 4\n"
                "arrow b1 : 2 -> 1 deg 0\narrow b2 : 3 -> 2 deg 0\n"
                "arrow b3 : 4 -> 3 deg 0\nrelation b1*b2\nrelation b2*b3\n"),
    # kA2 with the arrow in degree 1 (a formal coconnective algebra)
    "kA2deg1": "field {f}\nvertices 1 2\narrow a : 1 -> 2 deg 1\n",
    # truncated two-vertex algebras with arrows in negative degrees
    "kron2": ("field {f}\nvertices 1 2\narrow a1 : 1 -> 2 deg -1\n"),
    "kron3": ("field {f}\nvertices 1 2\narrow a1 : 1 -> 2 deg -1\n"
              "arrow a2 : 1 -> 2 deg -2\n"),
    # Massey system: two null-homotoped composites force a ternary product
    "massey": ("field {f}\nvertices 1 2 3 4\n"
               "arrow u : 1 -> 2 deg 0\narrow v : 2 -> 3 deg 0\n"
               "arrow w : 3 -> 4 deg 0\n"
               "arrow s : 1 -> 3 deg -1\narrow t : 2 -> 4 deg -1\n"
               "differential s = v*u\ndifferential t = w*v\n"),
}


def make(name: str, field: str = "Q", **kw) -> FinDimDgAlgebra:
    src = SRC[name].format(f=field)
    return realize_algebra(parse_presentation(src), name=name, **kw)


def source(name: str, field: str = "Q") -> str:
    return SRC[name].format(f=field)


# ---------------------------------------------------------------------------
# random dg algebras: chain quiver plus null-homotopies of random cycles


def random_chain_dg(seed, field: Field, max_attach: int = 4) -> FinDimDgAlgebra:
    rng = random.Random(f"chain:{seed}:{field!r}")
    nv = rng.randint(4, 5)
    verts = [str(i + 1) for i in range(nv)]
    arrows = [Arrow(f"a{i}", verts[i], verts[i + 1], 0) for i in range(nv - 1)]
    pres = DgAlgebraPresentation(field, GradedQuiver(verts, arrows), [], {})
    alg = realize_algebra(pres, path_length_bound=6, validate=False)

    def path_of(lbl: str) -> Path:
        return Path((), lbl[2:]) if lbl.startswith("e_") else Path(tuple(lbl.split("*")))

    deg = -1
    for _ in range(rng.randint(1, max_attach)):
        blocks: Dict[Tuple[str, str], List[int]] = {}
        for i, b in enumerate(alg.basis):
            if (b.degree == deg + 1 and b.source != b.target
                    and not alg.diff.get(i)):
                blocks.setdefault((b.source, b.target), []).append(i)
        if not blocks:
            break
        u, w = rng.choice(sorted(blocks))
        comb = {}
        for i in blocks[(u, w)]:
            c = rng.randint(0, 2)
            if c:
                comb[path_of(alg.basis[i].label)] = field.of(c)
        if not comb:
            continue
        nm = f"g{len(pres.quiver.arrows)}"
        pres = DgAlgebraPresentation(
            field,
            GradedQuiver(verts, list(pres.quiver.arrows) + [Arrow(nm, u, w, deg)]),
            pres.relations, {**pres.differentials, nm: comb})
        alg = realize_algebra(pres, path_length_bound=6, validate=False)
        if rng.random() < 0.5:
            deg -= 1
    alg.validate()
    return alg


# ---------------------------------------------------------------------------
# random free-complex modules over an ungraded algebra


def random_free_module(A: FinDimDgAlgebra, seed, shifts=(0, 1), max_gens: int = 4):
    """A random complex of vertex projectives with generator degrees in
    -shifts, as an honest module; cohomology lands in (-max(shifts), 0]."""
    from koszulkit.dgmod import FreeComplex
    rng = random.Random(f"mod:{seed}")
    F = A.field
    n = rng.randint(1, max_gens)
    gens = []
    for k in range(n):
        v = rng.choice(A.vertices)
        t = -rng.choice(shifts)
        gens.append((f"g{k}", t, v))
    gens.sort(key=lambda g: -g[1])
    dcoef = {}
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            ti, vi = gens[i][1], gens[i][2]
            tj, vj = gens[j][1], gens[j][2]
            want = tj + 1 - ti
            opts = [a for a, b in enumerate(A.basis)
                    if b.degree == want and b.target == vi and b.source == vj]
            comb = {}
            for a in opts:
                c = rng.randint(0, 2)
                if c:
                    comb[a] = F.of(c)
            if comb:
                dcoef[(i, j)] = comb
    fc = FreeComplex(A, gens, dcoef, name=f"rand{seed}")
    try:
        fc.check_d_squared()
    except Exception:
        # drop offending coefficients until d^2 = 0 (keeps the sample honest)
        for key in sorted(dcoef):
            trial = {k: v for k, v in dcoef.items() if k != key}
            fc2 = FreeComplex(A, gens, trial, name=f"rand{seed}")
            try:
                fc2.check_d_squared()
                fc = fc2
                dcoef = trial
            except Exception:
                continue
        fc = FreeComplex(A, gens, {}, name=f"rand{seed}")
    M = fc.as_module()
    M.validate()
    return M


# ---------------------------------------------------------------------------
# bar-complex Ext oracle


def bar_ext_dims(A: FinDimDgAlgebra, v: str, w: str, s_cap: int = 8,
                 window: Tuple[int, int] = (-8, 8)) -> Dict[int, int]:
    """Ext_A(S_v, S_w) dimensions through the reduced bar complex.

    Independent of the resolution machinery.  Supported inputs: path
    algebras whose non-idempotent part is closed under products and
    differential; over fields of characteristic other than 2 the algebra
    must be concentrated in degree 0 with zero differential (the
    alternating bar signs are only pinned there).
    """
    F = A.field
    unit_support = set()
    for c in A.units.values():
        unit_support |= set(c)
    radical = [i for i in range(A.dim) if i not in unit_support]
    graded = any(A.basis[i].degree != 0 for i in radical) or bool(A.diff)
    if graded and F.characteristic != 2:
        raise ValueError("graded bar oracle is pinned only over F_2")
    for i in radical:
        for j in radical:
            for k in A.mult.get((i, j), {}):
                if k in unit_support:
                    raise ValueError("radical not closed under products")
        for k in A.diff.get(i, {}):
            if k in unit_support:
                raise ValueError("radical not closed under the differential")

    # chains (x_s, ..., x_1) with src(x_1) = v... acting on the right of s_v:
    # s_v . x requires tgt(x) = v; the chain extends source-wards
    chains_by_s: Dict[int, List[Tuple[int, ...]]] = {0: [()]}
    for s in range(1, s_cap + 1):
        cur = []
        for ch in chains_by_s[s - 1]:
            need_tgt = v if not ch else A.basis[ch[-1]].source
            for x in radical:
                if A.basis[x].target == need_tgt:
                    cur.append(ch + (x,))
        chains_by_s[s] = cur
        if not cur:
            break

    # cochains dual to chains ending at w; Hom-degree = s - sum of degrees
    slots: Dict[int, List[Tuple[int, Tuple[int, ...]]]] = {}
    for s, chs in chains_by_s.items():
        for ch in chs:
            start = v if not ch else A.basis[ch[-1]].source
            if start != w:
                continue
            m = s - sum(A.basis[x].degree for x in ch)
            if window[0] <= m <= window[1] + 1:
                slots.setdefault(m, []).append((s, ch))

    # build the matrix of the bar differential directly on chain duals:
    # (delta phi)(y_1..y_{s+1}) = sum_i (-1)^i phi(..., y_i y_{i+1}, ...)
    #                           + sum_i (-1)^? phi(..., d y_i, ...)
    # over F_2 all signs are 1; over other fields we are in the ungraded,
    # zero-differential case where the alternating sign is standard.
    def delta_pairs(target_chain: Tuple[int, ...]):
        # chains grow away from v, so adjacent factors compose as ch[i] o ch[i+1]
        s1 = len(target_chain)
        out: List[Tuple[Tuple[int, ...], object]] = []
        for i in range(s1 - 1):
            prod = A.mult.get((target_chain[i], target_chain[i + 1]), {})
            for k, c in prod.items():
                if k in unit_support:
                    continue
                collapsed = target_chain[:i] + (k,) + target_chain[i + 2:]
                sgn = F.one() if (i + 1) % 2 == 0 else F.neg(F.one())
                out.append((collapsed, F.mul(sgn, c)))
        for i in range(s1):
            for k, c in A.diff.get(target_chain[i], {}).items():
                if k in unit_support:
                    continue
                out.append((target_chain[:i] + (k,) + target_chain[i + 1:], c))
        return out

    dims: Dict[int, int] = {}
    for m in range(window[0], window[1] + 1):
        cur = slots.get(m, [])
        nxt = slots.get(m + 1, [])
        if not cur and not nxt:
            continue
        pos_n = {key: r for r, key in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        # (delta phi) evaluated on a degree-(m+1) chain ch2 picks up phi on the
        # collapses of ch2
        for r, (s2, ch2) in enumerate(nxt):
            for collapsed, c in delta_pairs(ch2):
                key = (len(collapsed), collapsed)
                for cidx, (s1, ch1) in enumerate(cur):
                    if key == (s1, ch1):
                        md.rows[r][cidx] = F.add(md.rows[r][cidx], c)
        dim_ker = len(kernel_basis(md)) if cur else 0
        prv = slots.get(m - 1, [])
        mp = Matrix.zero(F, len(cur), len(prv))
        # image: delta of degree-(m-1) cochains, computed the same way
        for r, (s1, ch1) in enumerate(cur):
            for collapsed, c in delta_pairs(ch1):
                key = (len(collapsed), collapsed)
                for col, (s0, ch0) in enumerate(prv):
                    if key == (s0, ch0):
                        mp.rows[r][col] = F.add(mp.rows[r][col], c)
        dim_im = rank(mp) if prv and cur else 0
        h = dim_ker - dim_im
        if h:
            dims[m] = h
    return dims

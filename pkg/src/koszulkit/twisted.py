"""One-sided twisted complexes over an A-infinity algebra with idempotents.

A twisted complex is a list of (object, shift) entries with a strictly
upper-triangular twist delta; delta[i, j] lives in the base's block of
degree r_i - r_j + 1 from the j-th object to the i-th.

Sign bookkeeping uses the shift-conjugated suspended gauge throughout:
the matrix extension of the suspended base operations carries one sign
(-1)^(shift of the target row), twists by delta insert with no further
signs, and shifting a complex leaves its twist matrix unchanged.  For
zero shifts everything reduces to the naive convention; the identity
morphism of a shifted entry is its unit scaled by (-1)^shift.  Cones and
cocones are the usual two-block matrices, with the lower-block sign
absorbed by the gauge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .ainfty import AInfinityAlgebra, alpha_const
from .errors import EnumerationError, ValidationError
from .exactlin import Field, Matrix, Subspace, kernel_basis, rank
from .presentations import LinComb

Mat = Dict[Tuple[int, int], LinComb]


class TwistedComplex:
    def __init__(self, base: AInfinityAlgebra,
                 entries: Sequence[Tuple[str, int]],
                 delta: Mat, name: str = ""):
        self.base = base
        self.entries = list(entries)
        self.delta = {k: dict(v) for k, v in delta.items() if v}
        self.name = name
        for (i, j), v in self.delta.items():
            if i >= j:
                raise ValidationError("twist must be strictly upper-triangular")
            self._check_block(v, i, j, expected_extra=1)

    def _check_block(self, comb: LinComb, i: int, j: int, expected_extra: int):
        base = self.base
        (vi, ri), (vj, rj) = self.entries[i], self.entries[j]
        want = ri - rj + expected_extra
        for k in comb:
            b = base.basis[k]
            if b.degree != want or b.source != vj or b.target != vi:
                raise ValidationError(
                    f"twist entry ({i},{j}) must lie in degree {want} from "
                    f"{vj} to {vi}; found {b.label}")

    @property
    def size(self) -> int:
        return len(self.entries)

    def shifts(self) -> List[int]:
        return [r for (_, r) in self.entries]

    def key(self):
        dk = []
        for (i, j), comb in sorted(self.delta.items()):
            dk.append((i, j, tuple(sorted((k, c) for k, c in comb.items()))))
        return (tuple(self.entries), tuple(dk))

    def __repr__(self):
        return f"TwistedComplex({self.name or self.entries}, delta on {sorted(self.delta)})"


@dataclass
class TwMorphism:
    source: TwistedComplex
    target: TwistedComplex
    degree: int
    mat: Mat

    def __post_init__(self):
        self.mat = {k: dict(v) for k, v in self.mat.items() if v}
        base = self.source.base
        for (i, j), comb in self.mat.items():
            (vi, ri) = self.target.entries[i]
            (vj, rj) = self.source.entries[j]
            want = self.degree + ri - rj
            for k in comb:
                b = base.basis[k]
                if b.degree != want or b.source != vj or b.target != vi:
                    raise ValidationError(
                        f"morphism entry ({i},{j}) must lie in degree {want} from "
                        f"{vj} to {vi}; found {b.label}")

    def is_zero(self) -> bool:
        return not any(self.mat.values())


def _mat_extend(base: AInfinityAlgebra, factors: List[Tuple[Mat, List[int], List[int]]],
                row_shifts: List[int]) -> Mat:
    """Suspended matrix extension: sum over composable entry chains of the
    base operation, with the sign (-1)^(target row shift).

    ``factors`` are (matrix, target-index-range, source-index-range) in
    composition order (the last factor acts first); index ranges refer to
    the concatenated object lists, and row_shifts gives the shift of each
    target-row index of the overall composite.
    """
    F = base.field
    t = len(factors)
    out: Mat = {}

    def chains(pos: int, need_target: Optional[int], args: List[LinComb],
               row: Optional[int]):
        if pos == t:
            yield row, need_target, list(args)
            return
        matp, _, _ = factors[pos]
        for (i, j), comb in sorted(matp.items()):
            if need_target is not None and i != need_target:
                continue
            args.append(comb)
            yield from chains(pos + 1, j, args, row if row is not None else i)
            args.pop()

    for row, col, args in chains(0, None, [], None):
        val = base.b_eval(t, args)
        if not val:
            continue
        if row_shifts[row] % 2:
            val = {k: F.neg(c) for k, c in val.items()}
        cur = out.setdefault((row, col), {})
        for k, c in val.items():
            v = F.add(cur.get(k, F.zero()), c)
            if F.is_zero(v):
                cur.pop(k, None)
            else:
                cur[k] = v
    return {k: v for k, v in out.items() if v}


def _b_tw(morphisms: List[TwMorphism]) -> Mat:
    """Suspended twisted operation on composable morphisms, all delta
    insertions included (finite by strict upper-triangularity)."""
    n = len(morphisms)
    base = morphisms[0].base if hasattr(morphisms[0], "base") else morphisms[0].source.base
    objs: List[TwistedComplex] = [morphisms[0].target] + [f.source for f in morphisms]
    for k in range(n - 1):
        if morphisms[k].source is not morphisms[k + 1].target and \
           morphisms[k].source.key() != morphisms[k + 1].target.key():
            raise ValidationError("morphisms are not composable")
    row_shifts = [r for (_, r) in objs[0].entries]
    sizes = [T.size for T in objs]
    max_ins = [objs[k].size for k in range(n + 1)]
    out: Mat = {}
    F = base.field

    def add(mat: Mat):
        for k, comb in mat.items():
            cur = out.setdefault(k, {})
            for i, c in comb.items():
                v = F.add(cur.get(i, F.zero()), c)
                if F.is_zero(v):
                    cur.pop(i, None)
                else:
                    cur[i] = v

    arity_cap = base.arity_bound
    # insertion counts per gap (n+1 gaps, gap k uses objs[k]'s delta)
    ranges = [range(0, max(0, max_ins[k])) for k in range(n + 1)]
    for ins in itertools.product(*ranges):
        t = n + sum(ins)
        if t > arity_cap or t == 0:
            continue
        factors: List[Tuple[Mat, List[int], List[int]]] = []
        ok = True
        for k in range(n + 1):
            for _ in range(ins[k]):
                if not objs[k].delta:
                    ok = False
                    break
                factors.append((objs[k].delta, [], []))
            if not ok:
                break
            if k < n:
                factors.append((morphisms[k].mat, [], []))
        if not ok or len(factors) != t:
            continue
        add(_mat_extend(base, factors, row_shifts))
    return {k: v for k, v in out.items() if v}


def m_tw(morphisms: List[TwMorphism]) -> TwMorphism:
    """The n-ary twisted operation in the public sign convention."""
    n = len(morphisms)
    base = morphisms[0].source.base
    F = base.field
    bt = _b_tw(morphisms)
    degs = [f.degree for f in morphisms]
    s = sum((n - 1 - k) * (degs[k] - 1) for k in range(n))
    sgn = alpha_const(n) * (-1 if s % 2 else 1)
    if sgn < 0:
        bt = {k: {i: F.neg(c) for i, c in comb.items()} for k, comb in bt.items()}
    return TwMorphism(morphisms[-1].source, morphisms[0].target,
                      2 - n + sum(degs), bt)


def m1_tw(f: TwMorphism) -> TwMorphism:
    return m_tw([f])


def compose(g: TwMorphism, f: TwMorphism) -> TwMorphism:
    """m_2 of the twisted structure: g after f, with all twist corrections."""
    if g.source.key() != f.target.key():
        raise ValidationError("compose: endpoints do not match")
    return m_tw([g, f])


def identity_morphism(T: TwistedComplex) -> TwMorphism:
    F = T.base.field
    mat: Mat = {}
    for i, (v, r) in enumerate(T.entries):
        uidx = T.base.unit_indices.get(v)
        if uidx is None:
            raise ValidationError(f"base has no strict unit at {v}")
        c = F.one() if r % 2 == 0 else F.neg(F.one())
        mat[(i, i)] = {uidx: c}
    return TwMorphism(T, T, 0, mat)


@dataclass
class MCReport:
    holds: bool
    position: Optional[Tuple[int, int]] = None
    residual: str = ""


def mc_defect(T: TwistedComplex) -> Mat:
    """The curvature sum; empty iff the twist satisfies its defining equation."""
    if not T.delta:
        return {}
    base = T.base
    F = base.field
    row_shifts = [r for (_, r) in T.entries]
    out: Mat = {}
    for t in range(1, min(T.size, base.arity_bound) + 1):
        factors = [(T.delta, [], [])] * t
        part = _mat_extend(base, factors, row_shifts)
        for k, comb in part.items():
            cur = out.setdefault(k, {})
            for i, c in comb.items():
                v = F.add(cur.get(i, F.zero()), c)
                if F.is_zero(v):
                    cur.pop(i, None)
                else:
                    cur[i] = v
    return {k: v for k, v in out.items() if v}


def mc_check(T: TwistedComplex) -> MCReport:
    defect = mc_defect(T)
    if not defect:
        return MCReport(True)
    (i, j), comb = sorted(defect.items())[0]
    lbl = " + ".join(f"{c}*{T.base.basis[k].label}" for k, c in sorted(comb.items()))
    return MCReport(False, (i, j), lbl)


# ---------------------------------------------------------------------------
# hom complexes


class HomComplex:
    """The graded morphism space between two twisted complexes with its
    differential; exact cohomology with stored representatives."""

    def __init__(self, source: TwistedComplex, target: TwistedComplex):
        self.source = source
        self.target = target
        self.base = source.base
        F = self.base.field
        self.slots: List[Tuple[int, int, int]] = []
        for i, (vi, ri) in enumerate(target.entries):
            for j, (vj, rj) in enumerate(source.entries):
                for k, b in enumerate(self.base.basis):
                    if b.source == vj and b.target == vi:
                        self.slots.append((i, j, k))
        self._deg = {s: self.base.basis[s[2]].degree - target.entries[s[0]][1]
                        + source.entries[s[1]][1]
                     for s in self.slots}
        self._by_deg: Dict[int, List[Tuple[int, int, int]]] = {}
        for s in self.slots:
            self._by_deg.setdefault(self._deg[s], []).append(s)
        self._h_cache: Dict[int, List[TwMorphism]] = {}

    def degrees(self) -> List[int]:
        return sorted(self._by_deg)

    def component_dim(self, m: int) -> int:
        return len(self._by_deg.get(m, []))

    def morphism_from_vec(self, m: int, vec: Sequence) -> TwMorphism:
        F = self.base.field
        mat: Mat = {}
        for s, c in zip(self._by_deg.get(m, []), vec):
            if not F.is_zero(c):
                i, j, k = s
                mat.setdefault((i, j), {})[k] = c
        return TwMorphism(self.source, self.target, m, mat)

    def vec_from_morphism(self, f: TwMorphism) -> list:
        F = self.base.field
        slots = self._by_deg.get(f.degree, [])
        pos = {s: t for t, s in enumerate(slots)}
        vec = [F.zero()] * len(slots)
        for (i, j), comb in f.mat.items():
            for k, c in comb.items():
                vec[pos[(i, j, k)]] = c
        return vec

    def d_matrix(self, m: int) -> Matrix:
        F = self.base.field
        cur = self._by_deg.get(m, [])
        nxt = self._by_deg.get(m + 1, [])
        pos = {s: t for t, s in enumerate(nxt)}
        md = Matrix.zero(F, len(nxt), len(cur))
        for c, s in enumerate(cur):
            f = self.morphism_from_vec(m, [F.one() if t == c else F.zero()
                                           for t in range(len(cur))])
            df = m1_tw(f)
            for (i, j), comb in df.mat.items():
                for k, v in comb.items():
                    md.rows[pos[(i, j, k)]][c] = v
        return md

    def cohomology_dims(self) -> Dict[int, int]:
        out = {}
        for m in self.degrees():
            n = len(self.h_classes(m))
            if n:
                out[m] = n
        return out

    def h_classes(self, m: int) -> List[TwMorphism]:
        if m not in self._h_cache:
            F = self.base.field
            cur = self._by_deg.get(m, [])
            if not cur:
                self._h_cache[m] = []
                return []
            ker = kernel_basis(self.d_matrix(m))
            bdry = Subspace(F, len(cur))
            prv = self._by_deg.get(m - 1, [])
            if prv:
                dm = self.d_matrix(m - 1)
                for c in range(len(prv)):
                    bdry.add(dm.column(c))
            classes = []
            span = Subspace(F, len(cur))
            for r in bdry.rows:
                span.add(r)
            for vec in ker:
                if span.add(vec):
                    classes.append(self.morphism_from_vec(m, vec))
            self._h_cache[m] = classes
        return self._h_cache[m]

    def class_coordinates(self, f: TwMorphism) -> Optional[list]:
        """Coordinates of [f] in the chosen basis of H^deg; None if not closed."""
        F = self.base.field
        if m1_tw(f).mat:
            return None
        m = f.degree
        cur = self._by_deg.get(m, [])
        reps = self.h_classes(m)
        bdry = Subspace(F, len(cur))
        prv = self._by_deg.get(m - 1, [])
        if prv:
            dm = self.d_matrix(m - 1)
            for c in range(len(prv)):
                bdry.add(dm.column(c))
        cols = [b for b in bdry.basis()] + [self.vec_from_morphism(g) for g in reps]
        mat = Matrix.from_columns(F, cols, len(cur))
        from .exactlin import solve
        x = solve(mat, self.vec_from_morphism(f))
        if x is None:
            raise ValidationError("closed morphism not in cocycle span")
        return x[len(cols) - len(reps):]

    def is_exact(self, f: TwMorphism) -> bool:
        coords = self.class_coordinates(f)
        if coords is None:
            return False
        F = self.base.field
        return all(F.is_zero(c) for c in coords)

    def verify_d_squared(self):
        F = self.base.field
        for m in self.degrees():
            cur = self._by_deg.get(m, [])
            for c in range(len(cur)):
                f = self.morphism_from_vec(m, [F.one() if t == c else F.zero()
                                               for t in range(len(cur))])
                if m1_tw(m1_tw(f)).mat:
                    raise ValidationError(f"(m_1^tw)^2 != 0 in degree {m}")


def hom_complex(T: TwistedComplex, U: TwistedComplex) -> HomComplex:
    for X in (T, U):
        rep = mc_check(X)
        if not rep.holds:
            raise ValidationError(f"twist fails its defining equation at {rep.position}")
    return HomComplex(T, U)


# ---------------------------------------------------------------------------
# cones, shifts, direct sums


def shift(T: TwistedComplex, k: int, name: str = "") -> TwistedComplex:
    """T[k]: all entry shifts grow by k; the twist matrix is gauge-invariant."""
    return TwistedComplex(T.base, [(v, r + k) for (v, r) in T.entries], T.delta,
                          name=name or f"{T.name}[{k}]")


def direct_sum_tw(T: TwistedComplex, U: TwistedComplex, name: str = "") -> TwistedComplex:
    off = T.size
    delta: Mat = {k: dict(v) for k, v in T.delta.items()}
    for (i, j), v in U.delta.items():
        delta[(i + off, j + off)] = dict(v)
    return TwistedComplex(T.base, list(T.entries) + list(U.entries), delta,
                          name=name or f"{T.name}+{U.name}")


def cone(f: TwMorphism, name: str = "") -> TwistedComplex:
    """Cone of a closed degree-0 morphism: target + source[1], twist blocks
    (delta_target, f; 0, delta_source) in the stored gauge."""
    if f.degree != 0:
        raise ValidationError("cone needs a degree-0 morphism")
    if m1_tw(f).mat:
        raise ValidationError("cone needs a closed morphism")
    T, U = f.source, f.target
    off = U.size
    entries = list(U.entries) + [(v, r + 1) for (v, r) in T.entries]
    delta: Mat = {k: dict(v) for k, v in U.delta.items()}
    for (i, j), v in T.delta.items():
        delta[(i + off, j + off)] = dict(v)
    for (i, j), v in f.mat.items():
        delta[(i, j + off)] = dict(v)
    return TwistedComplex(U.base, entries, delta, name=name or f"cone({f.source.name}->{f.target.name})")


def cocone(f: TwMorphism, name: str = "") -> TwistedComplex:
    """Cocone of a closed degree-0 morphism: target[-1] + source."""
    if f.degree != 0:
        raise ValidationError("cocone needs a degree-0 morphism")
    if m1_tw(f).mat:
        raise ValidationError("cocone needs a closed morphism")
    T, U = f.source, f.target
    off = U.size
    entries = [(v, r - 1) for (v, r) in U.entries] + list(T.entries)
    delta: Mat = {k: dict(v) for k, v in U.delta.items()}
    for (i, j), v in T.delta.items():
        delta[(i + off, j + off)] = dict(v)
    for (i, j), v in f.mat.items():
        delta[(i, j + off)] = dict(v)
    return TwistedComplex(U.base, entries, delta, name=name or f"cocone({f.source.name}->{f.target.name})")


def single(base: AInfinityAlgebra, v: str, r: int = 0, name: str = "") -> TwistedComplex:
    return TwistedComplex(base, [(v, r)], {}, name=name or f"{v}[{r}]")


def sub_twist(T: TwistedComplex, start: int, stop: int, name: str = "") -> TwistedComplex:
    """The sub-complex on a contiguous entry interval (MC restricts)."""
    entries = T.entries[start:stop]
    delta = {(i - start, j - start): dict(v) for (i, j), v in T.delta.items()
             if start <= i < stop and start <= j < stop}
    return TwistedComplex(T.base, entries, delta, name=name or f"{T.name}[{start}:{stop}]")


def weight_parts(T: TwistedComplex) -> Tuple[bool, bool]:
    """(in the nonnegative part, in the nonpositive part) of the canonical
    weight decomposition, read structurally off the entry shifts."""
    rs = T.shifts()
    return (all(r <= 0 for r in rs), all(r >= 0 for r in rs))


# ---------------------------------------------------------------------------
# enumeration of extension-window objects


@dataclass
class HeartWindowConfig:
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("window width d must be at least 1")


def _canonical_under_permutation(entries: List[Tuple[str, int]], delta_key):
    return (tuple(entries), delta_key)


def filt_objects(base: AInfinityAlgebra, cfg: HeartWindowConfig,
                 max_steps: int, mode: str = "exhaustive",
                 connected_only: bool = False,
                 sample_scalars: Sequence = ()) -> Iterator[TwistedComplex]:
    """All twists on entries L[r], 0 <= r <= d-1, with at most max_steps
    entries and delta ranging over the solutions of the defining equation.

    Exhaustive only over a prime field; over the rationals a documented
    sample grid of coefficients {0, 1, -1} is used unless mode is
    "exhaustive", which is refused.  Objects equal up to permuting
    identical (object, shift) entries are emitted once.
    """
    F = base.field
    if mode == "exhaustive":
        if not F.finite:
            raise EnumerationError("exhaustive twist enumeration needs a prime field")
        scalars = list(F.elements())
    elif mode == "sample":
        scalars = list(sample_scalars) or [F.zero(), F.one(), F.neg(F.one())]
    else:
        raise ValidationError(f"unknown enumeration mode {mode!r}")
    if max_steps < 1:
        return
    objects = sorted(base.vertices)
    d = cfg.d
    seen = set()
    for n in range(1, max_steps + 1):
        # shifts nonincreasing: for a minimal coconnective base this is the
        # normal form of window objects (degree-0 couplings are units and
        # cancel); vertex order within equal shifts stays free because
        # permuting distinct entries changes the twist structure
        for shifts in itertools.combinations_with_replacement(range(d - 1, -1, -1), n):
            for verts in itertools.product(objects, repeat=n):
                entries = list(zip(verts, shifts))
                yield from _enumerate_twists(base, entries, scalars, seen,
                                             connected_only)


def _enumerate_twists(base: AInfinityAlgebra, entries: List[Tuple[str, int]],
                      scalars, seen, connected_only: bool) -> Iterator[TwistedComplex]:
    F = base.field
    n = len(entries)
    slots: List[Tuple[int, int, List[int]]] = []
    for j in range(n):
        for i in range(j):
            (vi, ri), (vj, rj) = entries[i], entries[j]
            blk = base.block(ri - rj + 1, vj, vi)
            if blk:
                slots.append((i, j, blk))
    slot_choices: List[List[LinComb]] = []
    for (i, j, blk) in slots:
        combos = []
        for vals in itertools.product(scalars, repeat=len(blk)):
            comb = {b: c for b, c in zip(blk, vals) if not F.is_zero(c)}
            combos.append(comb)
        slot_choices.append(combos)
    row_shifts = [r for (_, r) in entries]

    def mc_entry_complete(delta: Mat, col: int) -> bool:
        # after all slots with j <= col are set, curvature entries (i, j<=col)
        # are final; check them for early pruning
        sub = {k: v for k, v in delta.items() if k[1] <= col}
        T = TwistedComplex(base, entries, sub)
        defect = mc_defect(T)
        return not any(j <= col for (_, j) in defect)

    by_col: Dict[int, List[int]] = {}
    for t, (i, j, _) in enumerate(slots):
        by_col.setdefault(j, []).append(t)
    cols = sorted(by_col)

    def rec(ci: int, delta: Mat) -> Iterator[Mat]:
        if ci == len(cols):
            yield dict(delta)
            return
        col = cols[ci]
        slot_ids = by_col[col]
        for choice in itertools.product(*[slot_choices[t] for t in slot_ids]):
            for t, comb in zip(slot_ids, choice):
                if comb:
                    delta[(slots[t][0], slots[t][1])] = comb
            if mc_entry_complete(delta, col):
                yield from rec(ci + 1, delta)
            for t in slot_ids:
                delta.pop((slots[t][0], slots[t][1]), None)

    if not slots:
        candidates: List[Mat] = [{}]
    else:
        candidates = rec(0, {})
    for delta in candidates:
        T = TwistedComplex(base, entries, delta)
        if mc_defect(T):
            continue
        if connected_only and not _is_connected(T):
            continue
        key = _dedup_key(T)
        if key in seen:
            continue
        seen.add(key)
        yield T


def _is_connected(T: TwistedComplex) -> bool:
    if T.size <= 1:
        return True
    parent = list(range(T.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j) in T.delta:
        parent[find(i)] = find(j)
    return len({find(i) for i in range(T.size)}) == 1


def _dedup_key(T: TwistedComplex):
    """Canonical key modulo permutations of identical (object, shift) entries."""
    n = T.size
    runs: List[List[int]] = []
    k = 0
    while k < n:
        l = k
        while l + 1 < n and T.entries[l + 1] == T.entries[k]:
            l += 1
        runs.append(list(range(k, l + 1)))
        k = l + 1
    perms_per_run = [list(itertools.permutations(run)) for run in runs]
    best = None
    for combo in itertools.product(*perms_per_run):
        perm: List[int] = []
        for p in combo:
            perm.extend(p)
        inv = {old: new for new, old in enumerate(perm)}
        delta_key = []
        ok = True
        for (i, j), comb in T.delta.items():
            ni, nj = inv[i], inv[j]
            if ni >= nj:
                ok = False
                break
            delta_key.append((ni, nj, tuple(sorted(comb.items()))))
        if not ok:
            continue
        cand = (tuple(T.entries), tuple(sorted(delta_key)))
        if best is None or cand < best:
            best = cand
    return best if best is not None else T.key()

"""A-infinity algebras: Stasheff checking and minimal models.

Sign convention (used consistently by every module in this package):
the defining identities are

    sum_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(1^r (x) m_s (x) 1^t) = 0,

where tensor products of maps are applied with the Koszul rule in the
*unshifted* grading, i.e. the inner m_s picks up (-1)^{s*(|x_1|+...+|x_r|)}
when moved past the first r arguments.  For n=2 this is the graded
Leibniz rule d(xy) = d(x)y + (-1)^{|x|} x d(y), for n=3 with m_1=0 it is
associativity of m_2.

Internally, transfer works in the suspended convention b_n (all b_n of
degree +1), where the homotopy-transfer tree sum carries no signs at
all; the two are related by

    m_n(x_1,...,x_n) = alpha_n * (-1)^{sigma(x)} b_n(x_1,...,x_n),
    sigma(x) = sum_k (n-k) * (|x_k| - 1),   alpha_n = (-1)^{(n-1)(n-2)/2}.

Arguments are always written in composition order: in m_2(g, f) the
morphism f acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .exactlin import Field, Matrix, Subspace, kernel_basis, solve
from .presentations import BasisElement, FinDimDgAlgebra, LinComb


def alpha_const(n: int) -> int:
    return -1 if ((n - 1) * (n - 2) // 2) % 2 else 1


def sigma_sign(degrees: Sequence[int]) -> int:
    n = len(degrees)
    s = sum((n - 1 - k) * (degrees[k] - 1) for k in range(n))
    return -1 if s % 2 else 1


class AInfinityAlgebra:
    """Finite graded basis with multiplication tables m_n, 1 <= n <= arity_bound.

    Tables are sparse: ``m[n][(i_1,...,i_n)]`` is a linear combination of
    basis indices, arguments in composition order (the last index acts
    first).  Entries for non-composable tuples are absent.  Products of
    arity above ``arity_bound`` are *not computed*: results that would
    need them are outside this object's contract.
    """

    def __init__(self, field: Field, basis: Sequence[BasisElement],
                 m_tables: Dict[int, Dict[Tuple[int, ...], LinComb]],
                 vertices: Sequence[str], unit_indices: Dict[str, int],
                 arity_bound: int, name: str = ""):
        self.field = field
        self.basis = list(basis)
        self.m = {n: {k: dict(v) for k, v in t.items() if v}
                  for n, t in m_tables.items() if t}
        self.vertices = list(vertices)
        self.unit_indices = dict(unit_indices)
        self.arity_bound = arity_bound
        self.name = name
        self.index = {b.label: i for i, b in enumerate(self.basis)}
        self._b_cache: Dict[int, Dict[Tuple[int, ...], LinComb]] = {}

    # -- basics

    @property
    def dim(self) -> int:
        return len(self.basis)

    def graded_dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for b in self.basis:
            out[b.degree] = out.get(b.degree, 0) + 1
        return dict(sorted(out.items()))

    def block(self, degree: int, source: str, target: str) -> List[int]:
        return [i for i, b in enumerate(self.basis)
                if b.degree == degree and b.source == source and b.target == target]

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

    def m_table(self, n: int) -> Dict[Tuple[int, ...], LinComb]:
        return self.m.get(n, {})

    def b_table(self, n: int) -> Dict[Tuple[int, ...], LinComb]:
        """The same operation in the suspended convention."""
        if n not in self._b_cache:
            F = self.field
            a = alpha_const(n)
            out: Dict[Tuple[int, ...], LinComb] = {}
            for tup, comb in self.m.get(n, {}).items():
                s = sigma_sign([self.basis[i].degree for i in tup]) * a
                out[tup] = comb if s > 0 else {i: F.neg(c) for i, c in comb.items()}
            self._b_cache[n] = out
        return self._b_cache[n]

    def m_eval(self, n: int, args: Sequence[LinComb]) -> LinComb:
        """Multilinear evaluation of m_n on vectors (composition order)."""
        return self._eval(self.m_table(n), args)

    def b_eval(self, n: int, args: Sequence[LinComb]) -> LinComb:
        return self._eval(self.b_table(n), args)

    def _eval(self, table, args: Sequence[LinComb]) -> LinComb:
        F = self.field
        out: LinComb = {}
        if not table:
            return out
        def rec(k, idx, coeff):
            if k == len(args):
                t = table.get(tuple(idx))
                if t:
                    self.comb_add(out, t, coeff)
                return
            for i, c in args[k].items():
                idx.append(i)
                rec(k + 1, idx, F.mul(coeff, c))
                idx.pop()
        rec(0, [], F.one())
        return out

    def composable(self, i: int, j: int) -> bool:
        """Whether basis[i] can be applied after basis[j]."""
        return self.basis[i].source == self.basis[j].target

    def chains(self, n: int):
        """All composable n-tuples of basis indices (composition order)."""
        by_target: Dict[str, List[int]] = {}
        for i, b in enumerate(self.basis):
            by_target.setdefault(b.target, []).append(i)
        def rec(tup):
            if len(tup) == n:
                yield tuple(tup)
                return
            src = self.basis[tup[-1]].source
            for j in by_target.get(src, []):
                tup.append(j)
                yield from rec(tup)
                tup.pop()
        for i in range(self.dim):
            yield from rec([i])

    def is_minimal(self) -> bool:
        return not self.m.get(1)

    def validate(self):
        F = self.field
        for n, table in self.m.items():
            if n > self.arity_bound:
                raise ValidationError(f"table m_{n} beyond the arity bound")
            for tup, comb in table.items():
                if len(tup) != n:
                    raise ValidationError(f"m_{n} keyed by a {len(tup)}-tuple")
                for k in range(n - 1):
                    if not self.composable(tup[k], tup[k + 1]):
                        raise ValidationError(f"m_{n} set on a non-composable tuple")
                din = sum(self.basis[i].degree for i in tup)
                src = self.basis[tup[-1]].source
                tgt = self.basis[tup[0]].target
                for i, c in comb.items():
                    if F.is_zero(c):
                        continue
                    b = self.basis[i]
                    if b.degree != 2 - n + din:
                        raise ValidationError(
                            f"m_{n} output degree {b.degree} != {2 - n + din}")
                    if b.source != src or b.target != tgt:
                        raise ValidationError(f"m_{n} output endpoints mismatch")
        # strict unitality
        units = set(self.unit_indices.values())
        for v, u in self.unit_indices.items():
            if self.basis[u].degree != 0:
                raise ValidationError(f"unit at {v} has nonzero degree")
            if self.m.get(1, {}).get((u,)):
                raise ValidationError(f"m_1(unit at {v}) != 0")
        for i, b in enumerate(self.basis):
            u_t = self.unit_indices.get(b.target)
            u_s = self.unit_indices.get(b.source)
            if u_t is not None:
                if self.m.get(2, {}).get((u_t, i), {}) != {i: F.one()}:
                    raise ValidationError(f"m_2(1, {b.label}) != {b.label}")
            if u_s is not None:
                if self.m.get(2, {}).get((i, u_s), {}) != {i: F.one()}:
                    raise ValidationError(f"m_2({b.label}, 1) != {b.label}")
        for n, table in self.m.items():
            if n < 3:
                continue
            for tup, comb in table.items():
                if comb and any(i in units for i in tup):
                    raise ValidationError(f"m_{n} does not vanish on a unit")

    def __repr__(self):
        return (f"AInfinityAlgebra({self.name or 'unnamed'}, dim={self.dim}, "
                f"arities<={self.arity_bound})")


def from_dg_algebra(alg: FinDimDgAlgebra, arity_bound: int = 2,
                    name: str = "") -> AInfinityAlgebra:
    """View a dg algebra as an A-infinity algebra (m_n = 0 for n >= 3)."""
    m1 = {(i,): dict(t) for i, t in alg.diff.items()}
    m2 = {(i, j): dict(t) for (i, j), t in alg.mult.items()}
    tables: Dict[int, Dict[Tuple[int, ...], LinComb]] = {}
    if m1:
        tables[1] = m1
    tables[2] = m2
    return AInfinityAlgebra(alg.field, alg.basis, tables, alg.vertices,
                            alg.unit_indices, max(2, arity_bound),
                            name=name or alg.name)


# ---------------------------------------------------------------------------
# Stasheff identity checking


@dataclass
class ArityVerdict:
    arity: int
    holds: bool
    tuples_checked: int
    certificate: Optional[tuple] = None   # (tuple labels, residual string)


@dataclass
class StasheffReport:
    passed: bool
    verdicts: List[ArityVerdict]

    def first_failure(self) -> Optional[ArityVerdict]:
        for v in self.verdicts:
            if not v.holds:
                return v
        return None


def stasheff_defect(A: AInfinityAlgebra, n: int, tup: Tuple[int, ...]) -> LinComb:
    """The n-th identity evaluated on a composable basis tuple (zero iff it holds)."""
    F = A.field
    degs = [A.basis[i].degree for i in tup]
    total: LinComb = {}
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            t = n - s - r
            inner = A.m_table(s).get(tuple(tup[r:r + s]), {})
            if not inner:
                continue
            sgn = 1 if (r + s * t) % 2 == 0 else -1
            if s % 2 == 1 and sum(degs[:r]) % 2 == 1:
                sgn = -sgn
            args = [{tup[k]: F.one()} for k in range(r)] + [inner] + \
                   [{tup[k]: F.one()} for k in range(r + s, n)]
            term = A.m_eval(r + 1 + t, args)
            A.comb_add(total, term, F.one() if sgn > 0 else F.neg(F.one()))
    return total


def check_stasheff(A: AInfinityAlgebra, max_arity: Optional[int] = None) -> StasheffReport:
    """Verify the defining identities on all composable basis tuples, exactly."""
    if A.arity_bound < 1:
        raise ValidationError("arity bound must be at least 1")
    top = min(max_arity or A.arity_bound, A.arity_bound)
    verdicts = []
    ok = True
    for n in range(1, top + 1):
        holds = True
        cert = None
        count = 0
        for tup in A.chains(n):
            count += 1
            defect = stasheff_defect(A, n, tup)
            if defect:
                holds = False
                labels = tuple(A.basis[i].label for i in tup)
                cert = (labels, _comb_repr(A, defect))
                break
        verdicts.append(ArityVerdict(n, holds, count, cert))
        ok = ok and holds
    return StasheffReport(ok, verdicts)


def _comb_repr(A: AInfinityAlgebra, comb: LinComb) -> str:
    return " + ".join(f"{comb[i]}*{A.basis[i].label}" for i in sorted(comb))


# ---------------------------------------------------------------------------
# deformation retract data


class RetractData:
    """A homotopy retraction of a dg algebra onto its cohomology.

    p: A -> H and i: H -> A with p i = id, i p - id = d h + h d, and the
    side conditions h i = 0, p h = 0, h h = 0.  The splitting is chosen
    blockwise by first-complement echelon reduction, so it is
    deterministic; idempotents are preferred as harmonic representatives
    so strict units survive transfer.
    """

    def __init__(self, alg: FinDimDgAlgebra):
        from .presentations import HodgeData
        self.alg = alg
        self.hodge = HodgeData(alg)
        F = alg.field
        self.h_basis: List[BasisElement] = []
        self.i_map: List[LinComb] = []
        self._p_solvers: Dict[Tuple[int, str, str], tuple] = {}
        self._h_solvers: Dict[Tuple[int, str, str], tuple] = {}
        labels_used: Dict[str, int] = {}
        self._hidx_by_block: Dict[Tuple[int, str, str], List[int]] = {}
        blocks = sorted(self.hodge.proj_cache)
        for key in blocks:
            (deg, src, tgt) = key
            cur, posc, ker, bdry, picks, trans, im_vecs = self.hodge.block_data(*key)
            hidxs = []
            for vec in picks:
                comb = {cur[t]: x for t, x in enumerate(vec) if not F.is_zero(x)}
                lead = alg.basis[min(comb)].label
                label = f"[{lead}]"
                if label in labels_used:
                    labels_used[label] += 1
                    label = f"[{lead}#{labels_used[label]}]"
                else:
                    labels_used[label] = 0
                hidxs.append(len(self.h_basis))
                self.h_basis.append(BasisElement(label, deg, src, tgt))
                self.i_map.append(comb)
            self._hidx_by_block[key] = hidxs
            # columns: boundaries, then harmonic picks, then transversal
            cols = bdry.basis() + picks + trans
            n = len(cur)
            if n:
                mat = Matrix.from_columns(F, cols, n)
                self._p_solvers[key] = (cur, posc, mat, len(bdry.basis()), len(picks))
            # h: boundary vectors of this block come from the previous block
            prv = alg.block(deg - 1, src, tgt)
            if prv and bdry.basis():
                posp = {g: r for r, g in enumerate(prv)}
                prev_data = self.hodge.block_data(deg - 1, src, tgt)
                trans_prev = prev_data[5]
                dcols = []
                for tv in trans_prev:
                    vec = [F.zero()] * n
                    for r, g in enumerate(prv):
                        c = tv[r]
                        if F.is_zero(c):
                            continue
                        for jj, vv in alg.diff.get(g, {}).items():
                            vec[posc[jj]] = F.add(vec[posc[jj]], F.mul(c, vv))
                    dcols.append(vec)
                self._h_solvers[key] = (prv, trans_prev, Matrix.from_columns(F, dcols, n))

    @property
    def h_dim(self) -> int:
        return len(self.h_basis)

    def _split(self, vec: LinComb, key) -> Optional[tuple]:
        data = self._p_solvers.get(key)
        if data is None:
            return None
        cur, posc, mat, nb, npick = data
        F = self.alg.field
        b = [F.zero()] * len(cur)
        for i, c in vec.items():
            b[posc[i]] = c
        x = solve(mat, b)
        if x is None:
            raise ValidationError("vector does not lie in its graded block")
        return x, nb, npick

    def _blocks_of(self, vec: LinComb):
        out: Dict[Tuple[int, str, str], LinComb] = {}
        for i, c in vec.items():
            b = self.alg.basis[i]
            out.setdefault((b.degree, b.source, b.target), {})[i] = c
        return out

    def p(self, vec: LinComb) -> Dict[int, object]:
        """Cohomology coordinates of a vector (projection onto harmonics)."""
        F = self.alg.field
        out: Dict[int, object] = {}
        for key, part in self._blocks_of(vec).items():
            sp = self._split(part, key)
            if sp is None:
                continue
            x, nb, npick = sp
            hidxs = self._hidx_by_block.get(key, [])
            for k in range(npick):
                c = x[nb + k]
                if not F.is_zero(c):
                    out[hidxs[k]] = F.add(out.get(hidxs[k], F.zero()), c)
        return {k: v for k, v in out.items() if not F.is_zero(v)}

    def i(self, hvec: Dict[int, object]) -> LinComb:
        F = self.alg.field
        out: LinComb = {}
        for hi, c in hvec.items():
            for j, v in self.i_map[hi].items():
                w = F.add(out.get(j, F.zero()), F.mul(c, v))
                if F.is_zero(w):
                    out.pop(j, None)
                else:
                    out[j] = w
        return out

    def h(self, vec: LinComb) -> LinComb:
        """Contracting homotopy of degree -1: inverts d on boundaries."""
        F = self.alg.field
        out: LinComb = {}
        for key, part in self._blocks_of(vec).items():
            sp = self._split(part, key)
            if sp is None:
                continue
            x, nb, npick = sp
            if nb == 0:
                continue
            data = self._h_solvers.get(key)
            if data is None:
                raise ValidationError("boundary component without a source block")
            prv, trans_prev, dmat = data
            cur, posc, mat, _, _ = self._p_solvers[key]
            bvec = [F.zero()] * len(cur)
            bdry_basis = [mat.column(t) for t in range(nb)]
            for t in range(nb):
                c = x[t]
                if F.is_zero(c):
                    continue
                for r in range(len(cur)):
                    bvec[r] = F.add(bvec[r], F.mul(c, bdry_basis[t][r]))
            coeffs = solve(dmat, bvec)
            if coeffs is None:
                raise ValidationError("homotopy solve failed on a boundary vector")
            posp = {g: r for r, g in enumerate(prv)}
            for t, c in enumerate(coeffs):
                if F.is_zero(c):
                    continue
                for r, g in enumerate(prv):
                    v = trans_prev[t][r]
                    if F.is_zero(v):
                        continue
                    w = F.add(out.get(g, F.zero()), F.mul(c, v))
                    if F.is_zero(w):
                        out.pop(g, None)
                    else:
                        out[g] = w
        return out

    def verify(self):
        """Exact check of all retraction identities on every basis vector."""
        alg, F = self.alg, self.alg.field
        for hi in range(self.h_dim):
            coords = self.p(self.i({hi: F.one()}))
            if coords != {hi: F.one()}:
                raise ValidationError("p i != id on cohomology")
            if self.h(self.i({hi: F.one()})):
                raise ValidationError("h i != 0")
        for g in range(alg.dim):
            x: LinComb = {g: F.one()}
            ipx = self.i(self.p(x))
            dh = alg.comb_diff(self.h(x))
            hd = self.h(alg.comb_diff(x))
            lhs = dict(ipx)
            alg.comb_add(lhs, x, F.neg(F.one()))
            rhs = dict(dh)
            alg.comb_add(rhs, hd)
            # orientation: i p - id = -(d h + h d), i.e. id - i p = d h + h d
            alg.comb_add(rhs, lhs)
            if rhs:
                raise ValidationError("i p - id != -(d h + h d)")
            if self.p(self.h(x)):
                raise ValidationError("p h != 0")
            if self.h(self.h(x)):
                raise ValidationError("h h != 0")

    def strict_units(self) -> Dict[str, int]:
        """Vertices whose idempotent class is represented by itself on the nose."""
        alg, F = self.alg, self.alg.field
        unit_of: Dict[str, int] = {}
        for v, uc in alg.units.items():
            coords = self.p(dict(uc))
            if len(coords) == 1:
                (hi, c), = coords.items()
                if F.is_zero(F.sub(c, F.one())) and self.i_map[hi] == uc:
                    unit_of[v] = hi
        return unit_of

    def cohomology_algebra(self, name: str = "") -> FinDimDgAlgebra:
        alg, F = self.alg, self.alg.field
        unit_of = self.strict_units()
        live = {b.source for b in self.h_basis} | {b.target for b in self.h_basis}
        missing = live - set(unit_of)
        if missing:
            raise ValidationError(
                f"idempotents at {sorted(missing)} die in cohomology but classes "
                f"survive there; the cohomology algebra would not be unital")
        mult: Dict[Tuple[int, int], LinComb] = {}
        for x in range(self.h_dim):
            for y in range(self.h_dim):
                if self.h_basis[x].source != self.h_basis[y].target:
                    continue
                prod = alg.comb_mul(self.i({x: F.one()}), self.i({y: F.one()}))
                t = self.p(prod)
                if t:
                    mult[(x, y)] = t
        return FinDimDgAlgebra(F, self.h_basis, mult, {},
                               [v for v in alg.vertices if v in unit_of],
                               unit_of, name=name)


def build_retract(alg: FinDimDgAlgebra) -> RetractData:
    return RetractData(alg)


# ---------------------------------------------------------------------------
# homotopy transfer (planar tree / two-branch recursion)


def minimal_model(alg: FinDimDgAlgebra, arity_bound: int,
                  retract: Optional[RetractData] = None,
                  name: str = "") -> AInfinityAlgebra:
    """Minimal model of a dg algebra on its cohomology, up to the arity bound.

    The underlying space is the chosen harmonic complement, m_1 = 0, m_2
    is the induced product, and the higher operations are the two-branch
    tree sums with the contracting homotopy on internal edges.  In the
    suspended convention the recursion is sign-free:

        lam_n = sum_{j+k=n} b_2(theta_j (x) theta_k),
        theta_1 = i,  theta_n = h lam_n,  b'_n = p lam_n,

    and the public tables are obtained through the fixed sign dictionary.
    """
    if arity_bound < 2:
        raise ValidationError("arity bound must be at least 2")
    ret = retract or build_retract(alg)
    F = alg.field
    hb = ret.h_basis

    def b2(u: LinComb, udeg: int, v: LinComb) -> LinComb:
        w = alg.comb_mul(u, v)
        if (udeg - 1) % 2:
            w = {k: F.neg(c) for k, c in w.items()}
        return w

    theta_memo: Dict[Tuple[int, ...], LinComb] = {}
    lam_memo: Dict[Tuple[int, ...], LinComb] = {}

    def subdeg(tup: Tuple[int, ...]) -> int:
        # unshifted degree of theta on this tuple
        return sum(hb[i].degree for i in tup) - len(tup) + 1

    def theta(tup: Tuple[int, ...]) -> LinComb:
        if len(tup) == 1:
            return ret.i({tup[0]: F.one()})
        if tup not in theta_memo:
            theta_memo[tup] = ret.h(lam(tup))
        return theta_memo[tup]

    def lam(tup: Tuple[int, ...]) -> LinComb:
        if tup not in lam_memo:
            out: LinComb = {}
            for j in range(1, len(tup)):
                left, right = tup[:j], tup[j:]
                tl = theta(left)
                if not tl:
                    continue
                tr = theta(right)
                if not tr:
                    continue
                alg.comb_add(out, b2(tl, subdeg(left), tr))
            lam_memo[tup] = out
        return lam_memo[tup]

    # composable tuples over the cohomology basis
    by_target: Dict[str, List[int]] = {}
    for i, b in enumerate(hb):
        by_target.setdefault(b.target, []).append(i)

    def chains(n: int):
        def rec(tup):
            if len(tup) == n:
                yield tuple(tup)
                return
            for j in by_target.get(hb[tup[-1]].source, []):
                tup.append(j)
                yield from rec(tup)
                tup.pop()
        for i in range(len(hb)):
            yield from rec([i])

    tables: Dict[int, Dict[Tuple[int, ...], LinComb]] = {}
    unit_of = ret.strict_units()
    units = set(unit_of.values())
    for n in range(2, arity_bound + 1):
        table: Dict[Tuple[int, ...], LinComb] = {}
        for tup in chains(n):
            if n >= 3 and any(i in units for i in tup):
                continue  # strict unitality: these vanish by the side conditions
            bp = ret.p(lam(tup))
            if not bp:
                continue
            a = alpha_const(n)
            s = sigma_sign([hb[i].degree for i in tup]) * a
            table[tup] = bp if s > 0 else {i: F.neg(c) for i, c in bp.items()}
        if table:
            tables[n] = table
    out = AInfinityAlgebra(F, hb, tables,
                           [v for v in alg.vertices if v in unit_of],
                           unit_of, arity_bound,
                           name=name or (alg.name + ".minimal" if alg.name else "minimal"))
    out.validate()
    return out

# dev scratch: calibrate sign conventions; not part of the package
from koszulkit import *
from koszulkit.presentations import parse_presentation, realize_algebra

src = """
field Q
vertices 1 2
arrow a : 1 -> 2 deg 0
"""
A = realize_algebra(parse_presentation(src), name="kA2")
print("kA2 dim:", A.dim, [b.label for b in A.basis])
A.validate()
ret = build_retract(A)
ret.verify()
H = cohomology_algebra(A)
H.validate()
print("H(kA2) dim:", H.dim)

# Massey-product dg algebra: composites v*u and w*v are null-homotoped.
# H* has a degree -1 class [w*s - t*u]; the minimal model must see it as
# a nonzero m_3 on ([w],[v],[u]).
src2 = """
field Q
vertices 1 2 3 4
arrow u : 1 -> 2 deg 0
arrow v : 2 -> 3 deg 0
arrow w : 3 -> 4 deg 0
arrow s : 1 -> 3 deg -1
arrow t : 2 -> 4 deg -1
differential s = v*u
differential t = w*v
"""
A2 = realize_algebra(parse_presentation(src2), name="massey")
print("A2 dim:", A2.dim, A2.graded_dims())
A2.validate()
ret2 = build_retract(A2)
ret2.verify()
print("retract2 ok; H dims:", A2.cohomology_dims())
M = minimal_model(A2, arity_bound=6)
print("minimal model dims:", M.graded_dims(), [b.label for b in M.basis])
for n, t in sorted(M.m.items()):
    print(f"  m_{n}: {len(t)} entries")
iu = M.index["[u]"]; iv = M.index["[v]"]; iw = M.index["[w]"]
m3 = M.m_table(3).get((iw, iv, iu), {})
print("m3([w],[v],[u]) =", {M.basis[i].label: c for i, c in m3.items()})
rep = check_stasheff(M)
print("stasheff on model:", rep.passed)
for vv in rep.verdicts:
    if not vv.holds:
        print("  FAIL arity", vv.arity, vv.certificate)

rep2 = check_stasheff(from_dg_algebra(A2, arity_bound=5))
print("stasheff on dg algebra itself:", rep2.passed, [v.holds for v in rep2.verdicts])

# over F5 as well
src3 = src2.replace("field Q", "field F5")
A3 = realize_algebra(parse_presentation(src3), name="massey5")
A3.validate()
M3 = minimal_model(A3, arity_bound=6)
rep3 = check_stasheff(M3)
print("stasheff F5:", rep3.passed)

# random dg algebras: start from a random acyclic degree-0 quiver with monomial
# relations, then attach negative arrows killing random cycles (always d^2=0).
import random
from koszulkit.presentations import Arrow, GradedQuiver, DgAlgebraPresentation, Path

def random_dg_algebra(seed, field, max_attach=3):
    rng = random.Random(seed)
    nv = rng.randint(2, 4)
    verts = [f"v{i}" for i in range(nv)]
    arrows = []
    for k in range(rng.randint(2, 5)):
        i = rng.randint(0, nv - 1); j = rng.randint(0, nv - 1)
        if i >= j:  # acyclic: i < j only
            continue
        arrows.append(Arrow(f"a{k}", verts[i], verts[j], 0))
    if not arrows:
        arrows.append(Arrow("a0", verts[0], verts[-1], 0))
    pres = DgAlgebraPresentation(field, GradedQuiver(verts, arrows), [], {})
    alg = realize_algebra(pres, path_length_bound=6, validate=False)
    attach_deg = -1
    for t in range(rng.randint(1, max_attach)):
        # pick a random block with cycles at degree attach_deg+1
        blocks = []
        for u in verts:
            for w in verts:
                idxs = [i for i, b in enumerate(alg.basis)
                        if b.degree == attach_deg + 1 and b.source == u and b.target == w
                        and not alg.diff.get(i)]
                if idxs and (u != w or attach_deg + 1 != 0):
                    blocks.append((u, w, idxs))
        if not blocks:
            break
        u, w, idxs = rng.choice(blocks)
        comb = {}
        for i in idxs:
            c = rng.randint(0, 2)
            if c:
                comb[Path(tuple(alg.basis[i].label.split("*"))) if "*" in alg.basis[i].label
                     or not alg.basis[i].label.startswith("e_")
                     else Path((), alg.basis[i].label[2:])] = field.of(c)
        if not comb:
            continue
        name = f"g{len(pres.quiver.arrows)}"
        pres = DgAlgebraPresentation(
            field, GradedQuiver(verts, list(pres.quiver.arrows) + [Arrow(name, u, w, attach_deg)]),
            pres.relations, {**pres.differentials, name: comb})
        alg = realize_algebra(pres, path_length_bound=6, validate=False)
        if rng.random() < 0.5:
            attach_deg = attach_deg if rng.random() < 0.7 else attach_deg - 1
    alg.validate(check_triples=True)
    return alg

ok = 0
for seed in range(30):
    for F in (QQ, GF(5)):
        try:
            alg = random_dg_algebra((seed, repr(F)), F)
        except Exception as e:
            continue
        M = minimal_model(alg, arity_bound=6)
        rep = check_stasheff(M)
        higher = sorted(n for n in M.m if n >= 3)
        if not rep.passed:
            print("STASHEFF FAIL seed", seed, F, higher)
            for v in rep.verdicts:
                if not v.holds:
                    print("   arity", v.arity, v.certificate)
        else:
            ok += 1
            if higher:
                print("seed", seed, F, "dim", alg.dim, "H", M.graded_dims(), "higher:", higher, "OK")
print("passed:", ok)

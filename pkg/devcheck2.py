import random
from koszulkit import *
from koszulkit.presentations import Arrow, GradedQuiver, DgAlgebraPresentation, Path
from koszulkit.ainfty import minimal_model, check_stasheff

def random_dg_algebra(seed, field, max_attach=4):
    rng = random.Random(seed)
    nv = rng.randint(3, 5)
    verts = [f"v{i}" for i in range(nv)]
    arrows = []
    for k in range(rng.randint(3, 6)):
        i = rng.randint(0, nv - 2); j = rng.randint(i + 1, nv - 1)
        arrows.append(Arrow(f"a{k}", verts[i], verts[j], 0))
    pres = DgAlgebraPresentation(field, GradedQuiver(verts, arrows), [], {})
    alg = realize_algebra(pres, path_length_bound=6, validate=False)
    def path_of(lbl):
        return Path((), lbl[2:]) if lbl.startswith("e_") else Path(tuple(lbl.split("*")))
    attach_deg = -1
    for t in range(rng.randint(1, max_attach)):
        blocks = []
        for u in verts:
            for w in verts:
                idxs = [i for i, b in enumerate(alg.basis)
                        if b.degree == attach_deg + 1 and b.source == u and b.target == w
                        and not alg.diff.get(i) and not (u == w and attach_deg + 1 == 0)]
                if idxs:
                    blocks.append((u, w, idxs))
        if not blocks:
            break
        u, w, idxs = rng.choice(blocks)
        comb = {}
        for i in idxs:
            c = rng.randint(0, 2)
            if c:
                comb[path_of(alg.basis[i].label)] = field.of(c)
        if not comb:
            continue
        name = f"g{len(pres.quiver.arrows)}"
        pres = DgAlgebraPresentation(
            field, GradedQuiver(verts, list(pres.quiver.arrows) + [Arrow(name, u, w, attach_deg)]),
            pres.relations, {**pres.differentials, name: comb})
        alg = realize_algebra(pres, path_length_bound=6, validate=False)
        if rng.random() < 0.4:
            attach_deg -= 1
    alg.validate(check_triples=True)
    return alg

n_higher = 0
fails = 0
for seed in range(40):
    for F in (QQ, GF(5)):
        try:
            alg = random_dg_algebra(f"{seed}:{F!r}", F)
        except Exception as e:
            print("gen fail", seed, F, type(e).__name__, e)
            continue
        M = minimal_model(alg, arity_bound=6)
        rep = check_stasheff(M)
        higher = sorted(n for n in M.m if n >= 3)
        if higher:
            n_higher += 1
            print("seed", seed, F, "dim", alg.dim, "H", M.graded_dims(), "higher:", higher,
                  "OK" if rep.passed else "FAIL")
        if not rep.passed:
            fails += 1
            for v in rep.verdicts:
                if not v.holds:
                    print("   arity", v.arity, v.certificate)
print("with higher products:", n_higher, " failures:", fails)

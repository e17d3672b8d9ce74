import random, traceback
from koszulkit import *
from koszulkit.presentations import Arrow, GradedQuiver, DgAlgebraPresentation, Path
from koszulkit.ainfty import minimal_model, check_stasheff, build_retract

exec(open("/root/pkg/devcheck2.py").read().split("n_higher = 0")[0].replace("from koszulkit", "#from koszulkit", 3))

for seed in range(40):
    for F in (QQ, GF(5)):
        try:
            alg = random_dg_algebra((seed, repr(F)), F)
            M = minimal_model(alg, arity_bound=6)
        except Exception as e:
            if "m_2" in str(e):
                print("FAIL seed", seed, F, e)
                alg = random_dg_algebra((seed, repr(F)), F)
                ret = build_retract(alg)
                ret.verify()
                print(" h_basis:", [(b.label, b.degree, b.source, b.target) for b in ret.h_basis])
                print(" units:", alg.unit_indices)
                for v, ui in alg.unit_indices.items():
                    print("  p(e_%s) =" % v, ret.p({ui: F.one()}), " i_map check")
                raise SystemExit

# dev scratch: Koszul dual pipeline checks
import time
from koszulkit import *
from koszulkit.presentations import parse_presentation, realize_algebra
from koszulkit.dgmod import (koszul_dual, koszul_dual_of_coconnective, resolve,
                             simple_module, simples, ResolutionBounds, ext_groups,
                             end_dg_algebra, check_concentration, double_dual_compare)
from koszulkit.ainfty import check_stasheff

def alg(src, name, **kw):
    return realize_algebra(parse_presentation(src), name=name, **kw)

t0 = time.time()

# 1. kA2 ungraded: dual should be kA2 with the arrow in degree 1: dims {0:2, 1:1}
A = alg("field Q\nvertices 1 2\narrow a : 1 -> 2 deg 0\n", "kA2")
D = koszul_dual(A, window=(-1, 6))
print("kA2 dual dims:", D.dims, "window:", D.window)
print("  blocks:", D.block_dims)
rep = check_stasheff(D.model)
print("  stasheff:", rep.passed)

# 2. the reversed-A4 quadratic monomial algebra, arrows degree 1 (coconnective)
srcQ = """
field Q
vertices 1 2 3 4
arrow b1 : 2 -> 1 deg 1
arrow b2 : 3 -> 2 deg 1
arrow b3 : 4 -> 3 deg 1
relation b1*b2
relation b2*b3
"""
B = alg(srcQ, "kQtilde")
print("kQtilde dim:", B.dim)  # expect 7
D2 = koszul_dual_of_coconnective(B, window=(-7, 1))
print("kQtilde dual dims:", D2.dims, "window:", D2.window)

# 3. cubic algebra kA4/(a3 a2 a1), arrows degree 1: H^-1 of the dual nonzero (4 -> 1)
srcC = """
field Q
vertices 1 2 3 4
arrow a1 : 1 -> 2 deg 1
arrow a2 : 2 -> 3 deg 1
arrow a3 : 3 -> 4 deg 1
relation a3*a2*a1
"""
C = alg(srcC, "cubic")
print("cubic dim:", C.dim)  # expect 9
D3 = koszul_dual_of_coconnective(C, window=(-4, 1))
print("cubic dual dims:", D3.dims, "window:", D3.window)
print("  blocks:", {k: v for k, v in D3.block_dims.items() if k[0] != 0})
conc = check_concentration(D3.dims, 1, D3.window)
print("  concentrated (-1,0] :", conc.concentrated, "offending:", conc.offending)

# 4. k[x]/x^2 ungraded: dual dims all 1 in degrees 0..bound
srcX = "field Q\nvertices v\narrow x : v -> v deg 0\nrelation x*x\n"
X = alg(srcX, "kx2")
D4 = koszul_dual(X, bounds=ResolutionBounds(depth=6), window=(-1, 5))
print("k[x]/x^2 dual dims:", D4.dims, "window:", D4.window)

# 5. Hom_{D(E)}(S4, S1[-1]) over the cubic (criterion 1 payload)
S4 = simple_module(C, "4"); S1 = simple_module(C, "1")
t = ext_groups(S4, S1, window=(-3, 3))
print("cubic Ext(S4, S1):", t.dims, "window:", t.window)

print("elapsed:", round(time.time() - t0, 2), "s")

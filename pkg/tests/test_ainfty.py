import pytest

from koszulkit.ainfty import (build_retract, check_stasheff, from_dg_algebra,
                              minimal_model, stasheff_defect)
from koszulkit.errors import ValidationError
from koszulkit.exactlin import GF, QQ
from koszulkit.presentations import cohomology_algebra

from helpers import make, random_chain_dg


def test_stasheff_passes_on_associative_algebra():
    A = make("kA3")
    rep = check_stasheff(from_dg_algebra(A, arity_bound=4))
    assert rep.passed
    assert [v.arity for v in rep.verdicts] == [1, 2, 3, 4]


def test_stasheff_detects_corrupted_product():
    from koszulkit.presentations import parse_presentation, realize_algebra
    src = ("field Q\nvertices 1 2 3 4\narrow a : 1 -> 2 deg 0\n"
           "arrow b : 2 -> 3 deg 0\narrow c : 3 -> 4 deg 0\n")
    A = realize_algebra(parse_presentation(src))
    B = from_dg_algebra(A, arity_bound=3)
    ia, ib = B.index["a"], B.index["b"]
    iba = B.index["b*a"]
    # rescale a single m_2 entry: associativity on (c, b, a) now fails
    B.m[2][(ib, ia)] = {iba: B.field.of(2)}
    B._b_cache.clear()
    rep = check_stasheff(B)
    bad = rep.first_failure()
    assert bad is not None and bad.arity == 3
    assert bad.certificate is not None


def test_stasheff_on_dg_algebra_with_differential():
    A = make("massey", "Q")
    rep = check_stasheff(from_dg_algebra(A, arity_bound=5))
    assert rep.passed


def test_retract_identities_zero_differential():
    A = make("kA2")
    ret = build_retract(A)
    ret.verify()
    assert ret.h_dim == A.dim
    # p = i = id and h = 0 up to the canonical identification
    F = A.field
    for g in range(A.dim):
        assert ret.h({g: F.one()}) == {}


def test_retract_contractible_pair():
    from koszulkit.presentations import parse_presentation, realize_algebra
    src = ("field Q\nvertices 1 2\narrow a : 1 -> 2 deg -1\narrow b : 1 -> 2 deg 0\n"
           "differential a = b\n")
    A = realize_algebra(parse_presentation(src))
    ret = build_retract(A)
    ret.verify()
    F = A.field
    ib = A.index["b"]
    ia = A.index["a"]
    assert ret.p({ib: F.one()}) == {}
    assert ret.h({ib: F.one()}) == {ia: F.one()}


@pytest.mark.parametrize("seed", range(6))
def test_retract_random_f5(seed):
    A = random_chain_dg(seed, GF(5))
    build_retract(A).verify()


def test_minimal_model_zero_differential_has_no_higher_terms():
    A = make("kA3rad2")
    M = minimal_model(A, arity_bound=5)
    assert M.is_minimal()
    assert all(n == 2 for n in M.m)
    assert M.graded_dims() == A.graded_dims()


def test_minimal_model_m2_matches_cohomology_product():
    A = make("massey")
    ret = build_retract(A)
    H = ret.cohomology_algebra()
    M = minimal_model(A, arity_bound=4, retract=ret)
    assert M.graded_dims() == H.graded_dims()
    for (i, j), t in H.mult.items():
        assert M.m_table(2).get((i, j), {}) == t
    for key, t in M.m_table(2).items():
        assert H.mult.get(key, {}) == t


def test_minimal_model_massey_triple_product():
    A = make("massey")
    M = minimal_model(A, arity_bound=6)
    iu, iv, iw = M.index["[u]"], M.index["[v]"], M.index["[w]"]
    out = M.m_table(3).get((iw, iv, iu), {})
    assert len(out) == 1
    ((k, c),) = out.items()
    assert M.basis[k].degree == -1
    assert check_stasheff(M).passed


def test_minimal_model_graded_dims_match_cohomology():
    for seed in range(4):
        A = random_chain_dg(seed, QQ)
        M = minimal_model(A, arity_bound=4)
        assert M.graded_dims() == A.cohomology_dims()


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("fieldname", ["Q", "F5"])
def test_transfer_satisfies_stasheff(seed, fieldname):
    F = QQ if fieldname == "Q" else GF(5)
    A = random_chain_dg(seed, F)
    M = minimal_model(A, arity_bound=5)
    M.validate()
    rep = check_stasheff(M)
    assert rep.passed, rep.first_failure()


def test_degree_bookkeeping_every_entry():
    A = make("massey")
    M = minimal_model(A, arity_bound=5)
    for n, table in M.m.items():
        for tup, comb in table.items():
            din = sum(M.basis[i].degree for i in tup)
            for k in comb:
                assert M.basis[k].degree == 2 - n + din


def test_arity_bound_validation():
    A = make("kA2")
    with pytest.raises(ValidationError):
        minimal_model(A, arity_bound=1)


def test_stasheff_defect_is_exact_zero_not_probabilistic():
    A = make("massey", "F5")
    M = minimal_model(A, arity_bound=5)
    for n in range(1, 6):
        for tup in M.chains(n):
            assert stasheff_defect(M, n, tup) == {}

"""Command-line surface: realize presentations, run the pipelines, and
emit deterministic JSON reports.

Exit codes: 0 success / property holds, 1 parse error, 2 validation
failure, 3 inconclusive or uncertified window, 4 property fails with a
certificate.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

from .errors import (EnumerationError, KoszulKitError, ParseError,
                     RealizationError, ValidationError, WindowError)
from .exactlin import parse_field
from .presentations import (DgAlgebraPresentation, FinDimDgAlgebra,
                            parse_presentation, realize_algebra)
from .ainfty import check_stasheff, from_dg_algebra, minimal_model
from .dgmod import (ResolutionBounds, check_concentration, double_dual_compare,
                    ext_algebra, koszul_dual, koszul_dual_of_coconnective,
                    module_from_block, simple_module)
from .twisted import TwistedComplex, hom_complex, mc_check, single
from .checks import (complicial_check_silting, one_generated_span_check,
                     one_generated_via_dual, recognition_check, semibrick_check)
from .loewy import height_report, loewy_profile
from .report import CheckReport, RunConfig, dims_map, emit


def _load(path: str, cfg: RunConfig) -> tuple[DgAlgebraPresentation, FinDimDgAlgebra]:
    with open(path) as fh:
        text = fh.read()
    if cfg.field and cfg.field != "input":
        # swap the field directive and re-parse so scalars land in the new field
        text = text.replace(_field_line(text), f"field {cfg.field}")
    pres = parse_presentation(text)
    # the min/max-degree window constrains reported windows, not the input:
    # presentations are realized in full
    alg = realize_algebra(pres, degree_window=(-64, 64),
                          path_length_bound=max(16, cfg.depth),
                          name=os.path.splitext(os.path.basename(path))[0])
    return pres, alg


def _field_line(text: str) -> str:
    for line in text.splitlines():
        if line.strip().startswith("field"):
            return line.strip()
    return "field Q"


def _config(args) -> RunConfig:
    cfg = RunConfig(
        field=args.field,
        min_degree=args.min_degree,
        max_degree=args.max_degree,
        arity=args.arity,
        d=args.d,
        size_bound=args.size_bound,
        max_steps=args.max_steps,
        depth=args.depth,
        threads=max(1, int(os.environ.get("KOSZULKIT_THREADS", "1"))),
    )
    cfg.validate()
    return cfg


def cmd_realize(args) -> int:
    cfg = _config(args)
    t0 = time.time()
    pres, alg = _load(args.input, cfg)
    rep = CheckReport(
        "realize", "pass", cfg,
        windows={"degree": [cfg.min_degree, cfg.max_degree]},
        tables={
            "name": alg.name,
            "dim": alg.dim,
            "dims_by_degree": dims_map(alg.graded_dims()),
            "cohomology_dims": dims_map(alg.cohomology_dims()),
            "vertices": list(alg.vertices),
            "basis": [b.label for b in alg.basis],
        })
    emit(rep, args.json, time.time() - t0)
    return 0


def _dual_tables(D, arity: int):
    model = D.model
    m_tables = {}
    for n in sorted(model.m):
        entries = {}
        for tup, comb in sorted(model.m[n].items()):
            key = ",".join(model.basis[i].label for i in tup)
            entries[key] = {model.basis[j].label: c for j, c in sorted(comb.items())}
        if entries:
            m_tables[str(n)] = entries
    return {
        "dims_by_degree": dims_map(D.dims),
        "ext_dims_by_degree": dims_map(D.ext_graded_dims()),
        "block_dims": {f"{k[0]}:{k[1]}->{k[2]}": v for k, v in sorted(D.block_dims.items())},
        "basis": [b.label for b in model.basis],
        "m_tables": m_tables,
        "coconnective_verified": D.coconnective_verified,
    }


def cmd_koszul(args) -> int:
    cfg = _config(args)
    t0 = time.time()
    pres, alg = _load(args.input, cfg)
    bounds = ResolutionBounds(depth=cfg.depth)
    window = (cfg.min_degree, cfg.max_degree)
    try:
        if args.direction == "dual":
            D = koszul_dual(alg, bounds, cfg.arity, window=window)
        elif args.direction == "dual-of-coconnective":
            D = koszul_dual_of_coconnective(alg, bounds, cfg.arity, window=window)
        else:
            ddr = double_dual_compare(alg, bounds, cfg.arity, window=window)
            verdict = ddr.verdict
            rep = CheckReport(
                "koszul.double-dual", verdict, cfg,
                windows={"compared": list(ddr.window)},
                tables={"dims_original": dims_map(ddr.dims_original),
                        "dims_double_dual": dims_map(ddr.dims_double_dual)},
                certificates={"detail": ddr.detail},
                exit_code=0 if verdict == "equal" else
                (3 if verdict == "inconclusive" else 4))
            emit(rep, args.json, time.time() - t0)
            return rep.exit_code
    except WindowError as e:
        rep = CheckReport("koszul." + args.direction, "uncertified", cfg,
                          certificates={"error": str(e)}, exit_code=3)
        emit(rep, args.json, time.time() - t0)
        return 3
    conc = None
    code = 0
    try:
        conc = check_concentration(D.ext_graded_dims(), cfg.d, D.ext_window)
    except WindowError:
        code = 3
    stash = check_stasheff(D.model)
    rep = CheckReport(
        "koszul." + args.direction,
        "pass" if stash.passed else "stasheff-failure", cfg,
        windows={"model": list(D.window), "ext": list(D.ext_window)},
        tables=_dual_tables(D, cfg.arity),
        certificates={
            "concentration": None if conc is None else {
                "d": cfg.d, "concentrated": conc.concentrated,
                "offending": conc.offending},
            "stasheff_arities": [v.arity for v in stash.verdicts if v.holds],
        },
        exit_code=code if stash.passed else 2)
    emit(rep, args.json, time.time() - t0)
    return rep.exit_code


def cmd_check(args) -> int:
    cfg = _config(args)
    t0 = time.time()
    pres, alg = _load(args.input, cfg)
    which = args.which
    bounds = ResolutionBounds(depth=cfg.depth)
    if which == "complicial":
        r = complicial_check_silting(alg, cfg.d)
        rep = CheckReport(
            "check.complicial", "pass" if r.complicial else "fail", cfg,
            tables={"cohomology_dims": dims_map(r.cohomology),
                    "strict": r.strict},
            certificates={"offending_degrees": r.offending},
            exit_code=0 if r.complicial else 4)
    elif which == "1gen-dual":
        r = one_generated_via_dual(alg, cfg.d, bounds, cfg.arity)
        rep = CheckReport(
            "check.1gen-dual", "pass" if r.one_generated else "fail", cfg,
            windows={"dual": list(r.concentration.window)},
            tables={"dual_dims": dims_map(r.dual.ext_graded_dims())},
            certificates={"offending_degrees": r.concentration.offending},
            exit_code=0 if r.one_generated else 4)
    elif which == "1gen-span":
        base = _minimal_base(alg, cfg)
        c = one_generated_span_check(base, cfg.d, max(2, args.span_degree),
                                     cfg.size_bound)
        verdict = c.verdict
        code = {"generated-up-to-bound": 0,
                "not-generated-with-witness": 4}.get(verdict, 3)
        rep = CheckReport(
            "check.1gen-span", verdict, cfg,
            tables={"objects_enumerated": c.objects_enumerated,
                    "pairs_checked": c.pairs_checked,
                    "degrees_checked": list(c.degrees_checked)},
            certificates={"witness": c.witness, "detail": c.detail},
            exit_code=code)
    elif which == "semibrick":
        base = _minimal_base(alg, cfg)
        members = [single(base, v) for v in base.vertices]
        r = semibrick_check(members, args.n, cfg.d)
        rep = CheckReport(
            "check.semibrick", "pass" if r.passed else "fail", cfg,
            tables={"shifts_ok": r.shifts_ok,
                    "negative_vanishing": r.negative_vanishing,
                    "endomorphisms_ok": r.endomorphisms_ok},
            certificates={"detail": r.detail},
            exit_code=0 if r.passed else 4)
    elif which == "recognize":
        base = _minimal_base(alg, cfg)
        smc = [single(base, v) for v in base.vertices]
        twists = {blk.name: blk for blk in pres.twists}
        if not twists:
            rep = CheckReport("check.recognize", "inconclusive", cfg,
                              certificates={"error": "no twist blocks in input"},
                              exit_code=3)
            emit(rep, args.json, time.time() - t0)
            return 3
        cands = [_twist_from_block(base, alg, twists[name])
                 for name in sorted(twists)]
        r = recognition_check(base, smc[:len(cands)], cands, cfg.d)
        rep = CheckReport(
            "check.recognize", "pass" if r.passed else "fail", cfg,
            tables={"reconstructed_dims": dims_map(r.reconstructed_dims),
                    "cover_ok": r.cover_ok, "hom_vanishing_ok": r.hom_vanishing_ok},
            certificates={"detail": r.detail},
            exit_code=0 if r.passed else 4)
    else:
        raise ValidationError(f"unknown check {which!r}")
    emit(rep, args.json, time.time() - t0)
    return rep.exit_code


def _minimal_base(alg: FinDimDgAlgebra, cfg: RunConfig):
    """Twisted-complex bases must be minimal: formal algebras qualify as
    they stand, anything with a differential is replaced by its model."""
    if alg.diff:
        return minimal_model(alg, max(cfg.arity, cfg.size_bound + 2))
    return from_dg_algebra(alg, arity_bound=max(cfg.arity, cfg.size_bound + 2))


def _twist_from_block(base, alg, blk) -> TwistedComplex:
    F = base.field
    delta = {}
    for (i, j), comb in blk.deltas.items():
        entry = {}
        for path, c in comb.items():
            lbl = path.label()
            if lbl not in base.index:
                raise ValidationError(f"twist {blk.name}: {lbl} is not a basis element")
            entry[base.index[lbl]] = c
        if entry:
            delta[(i, j)] = entry
    return TwistedComplex(base, blk.entries, delta, name=blk.name)


def cmd_loewy(args) -> int:
    cfg = _config(args)
    t0 = time.time()
    pres, alg = _load(args.input, cfg)
    blocks = {b.name: b for b in pres.modules}
    if args.module == "regular":
        from .dgmod import regular_module
        M = regular_module(alg)
    elif args.module in blocks:
        M = module_from_block(alg, blocks[args.module])
    else:
        raise ValidationError(f"no module block named {args.module!r} "
                              f"(available: {sorted(blocks)} or 'regular')")
    p = loewy_profile(M, alg, cfg.d)
    h = height_report(alg, cfg.d)
    rep = CheckReport(
        "loewy", "pass", cfg,
        tables={
            "module": M.name,
            "topd": p.topd,
            "top_multiplicities": dict(sorted(p.top_multiplicities.items())),
            "radical_tower": p.radical_tower,
            "big_loewy": p.big_loewy,
            "loewy_lower": p.loewy_lower,
            "loewy_upper": p.loewy_upper,
            "lower_clause": p.lower_clause,
            "heart_lengths": {str(k): v for k, v in sorted(p.heart_lengths.items())},
            "height_bound": h.bound,
            "height_finite": h.finite,
        })
    emit(rep, args.json, time.time() - t0)
    return 0


def cmd_twhom(args) -> int:
    cfg = _config(args)
    t0 = time.time()
    pres, alg = _load(args.input, cfg)
    base = _minimal_base(alg, cfg)
    twists = {b.name: b for b in pres.twists}
    for nm in (args.source, args.target):
        if nm not in twists:
            raise ValidationError(f"no twist block named {nm!r}")
    T = _twist_from_block(base, alg, twists[args.source])
    U = _twist_from_block(base, alg, twists[args.target])
    for X in (T, U):
        r = mc_check(X)
        if not r.holds:
            rep = CheckReport("tw-hom", "fail", cfg,
                              certificates={"mc_failure": {"twist": X.name,
                                                           "position": list(r.position),
                                                           "residual": r.residual}},
                              exit_code=4)
            emit(rep, args.json, time.time() - t0)
            return 4
    H = hom_complex(T, U)
    H.verify_d_squared()
    rep = CheckReport(
        "tw-hom", "pass", cfg,
        tables={"source": T.name, "target": U.name,
                "component_dims": {str(m): H.component_dim(m) for m in H.degrees()},
                "cohomology_dims": dims_map(H.cohomology_dims())})
    emit(rep, args.json, time.time() - t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="koszulkit",
        description="exact computations with finite-dimensional dg algebras")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("input", help="presentation file")
        p.add_argument("--field", default="input",
                       help="override the field (Q or F<p>); default: as in the file")
        p.add_argument("--min-degree", type=int, default=-8)
        p.add_argument("--max-degree", type=int, default=8)
        p.add_argument("--arity", type=int, default=4)
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--size-bound", type=int, default=3)
        p.add_argument("--max-steps", type=int, default=3)
        p.add_argument("--depth", type=int, default=10)
        p.add_argument("--json", default=None, help="write the report to this path")

    p = sub.add_parser("realize", help="realize a presentation and validate it")
    common(p)
    p.set_defaults(fn=cmd_realize)

    p = sub.add_parser("koszul", help="compute a Koszul dual")
    common(p)
    p.add_argument("direction",
                   choices=["dual", "dual-of-coconnective", "double-dual"])
    p.set_defaults(fn=cmd_koszul)

    p = sub.add_parser("check", help="run a decision procedure")
    common(p)
    p.add_argument("which", choices=["1gen-span", "1gen-dual", "complicial",
                                     "semibrick", "recognize"])
    p.add_argument("--span-degree", type=int, default=2,
                   help="top degree for the span check")
    p.add_argument("--n", type=int, default=1, help="semibrick shift count")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("loewy", help="Loewy profile of a module block")
    common(p)
    p.add_argument("module", help="module block name, or 'regular'")
    p.set_defaults(fn=cmd_loewy)

    p = sub.add_parser("tw-hom", help="hom complex between twist blocks")
    common(p)
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(fn=cmd_twhom)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except (RealizationError, ValidationError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return 2
    except (WindowError, EnumerationError) as e:
        print(f"uncertified: {e}", file=sys.stderr)
        return 3
    except KoszulKitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line orchestration.

Subcommands mirror the module layer: symbols, lfun, dds, region, fegroup,
residue, exp {nonvanishing, meansquare, determination}, suite, cache.
Failures exit nonzero with a single machine-parsable line on stderr:
`error: <code>: <message>`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import dds, experiments, fegroup, lseries, quadchar, residues
from .config import ExperimentConfig, echo_config, load_config, parse_config
from .quadchar import build_context
from .ringarith import ConfigurationError, DomainError, ideal_from_int, rational_field

EXIT_CODES = {
    ConfigurationError: (2, "config"),
    DomainError: (3, "domain"),
    ArithmeticError: (4, "arithmetic"),
    OSError: (5, "io"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args) or 0
    except Exception as exc:  # single-line machine-parsable failure
        for klass, (code, tag) in EXIT_CODES.items():
            if isinstance(exc, klass):
                print(f"error: {tag}: {exc}", file=sys.stderr)
                return code
        print(f"error: internal: {exc}", file=sys.stderr)
        return 9


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistlab")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--workers", type=int, default=None, help="worker pool size")
    p.add_argument("--plot-data", action="store_true", help="emit gnuplot-ready columns")
    sub = p.add_subparsers(dest="command")

    sp = sub.add_parser("symbols", help="quadratic-symbol context operations")
    sp.add_argument("action", choices=["table", "chi", "save", "load"])
    sp.add_argument("--d", type=int, default=5)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--path", default="symbols.ctx")
    sp.set_defaults(func=cmd_symbols)

    lp = sub.add_parser("lfun", help="L-function values and checks")
    lp.add_argument("action", choices=["central", "fe-check", "partial"])
    lp.add_argument("--kind", choices=["gl1", "gl3"], default="gl1")
    lp.add_argument("--d", type=int, default=5)
    lp.add_argument("--point", type=float, nargs="+", default=[0.5])
    lp.add_argument("--cutoff", type=int, default=10_000)
    lp.set_defaults(func=cmd_lfun)

    dp = sub.add_parser("dds", help="double Dirichlet series evaluations")
    dp.add_argument("action", choices=["pure", "identity-check", "zr", "zstar"])
    dp.add_argument("--point", type=float, nargs=2, default=[2.5, 2.5])
    dp.add_argument("--cutoff", type=int, default=2000)
    dp.add_argument("--order", choices=["D-first", "N-first"], default="D-first")
    dp.add_argument("--r", type=int, default=1)
    dp.set_defaults(func=cmd_dds)

    rp = sub.add_parser("region", help="continuation-region calculus")
    rp.add_argument("action", choices=["pipeline", "emit"])
    rp.add_argument("--which", default="R1")
    rp.add_argument("--grid", type=int, default=0, help="emit membership grid of this size")
    rp.set_defaults(func=cmd_region)

    fp = sub.add_parser("fegroup", help="functional-equation group")
    fp.add_argument("action", choices=["verify"])
    fp.set_defaults(func=cmd_fegroup)

    qp = sub.add_parser("residue", help="residue-layer computations")
    qp.add_argument("action", choices=["report", "probe", "switching", "consistency"])
    qp.add_argument("--r", type=int, default=3)
    qp.add_argument("--s", type=float, default=0.75)
    qp.add_argument("--cutoff", type=int, default=2000)
    qp.add_argument("--e-class", type=int, default=0)
    qp.set_defaults(func=cmd_residue)

    ep = sub.add_parser("exp", help="desk-scale experiments")
    ep.add_argument("which", choices=["nonvanishing", "meansquare", "determination"])
    ep.add_argument("--out", default=None, help="CSV output path (default stdout)")
    ep.set_defaults(func=cmd_exp)

    cp = sub.add_parser("cache", help="coefficient cache files")
    cp.add_argument("action", choices=["build", "info"])
    cp.add_argument("--path", default="coeffs.bin")
    cp.add_argument("--pmax", type=int, default=1000)
    cp.set_defaults(func=cmd_cache)

    up = sub.add_parser("suite", help="run named experiment suites")
    up.add_argument("names", nargs="+")
    up.add_argument("--out-dir", default=None)
    up.set_defaults(func=cmd_suite)
    return p


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.workers is not None:
        cfg = parse_config(f"workers = {args.workers}", base=cfg)
    return cfg


# ---------------------------------------------------------------------------


def cmd_symbols(args) -> int:
    ctx = build_context(rational_field())
    if args.action == "table":
        em = dds.eta_matrix(ctx)
        print("# eta on class pairs (classes 1,3,5,7 mod 8)")
        for i in range(4):
            print(",".join(str(int(v)) for v in em[i]))
        return 0
    if args.action == "chi":
        val = quadchar.chi(
            ideal_from_int(ctx.field, args.d), ideal_from_int(ctx.field, args.n), ctx
        )
        print(f"chi_({args.d})(({args.n})) = {val}")
        return 0
    if args.action == "save":
        quadchar.save_context(ctx, args.path)
        print(f"wrote {args.path}")
        return 0
    loaded = quadchar.load_context(args.path)
    print(f"loaded context: h_C = {loaded.h_C}, S = {sorted(loaded.s_primes)}")
    return 0


def cmd_lfun(args) -> int:
    cfg = _config(args)
    if args.kind == "gl1":
        chi = lseries.QuadCharacter(args.d if lseries.is_fundamental(args.d) else lseries.fundamental_disc(args.d))
        eng = lseries.GL1Engine(chi, precision_bits=cfg.precision_bits)
        if args.action == "central":
            cv = eng.central_value(args.point[0])
            print(f"Lambda({args.point[0]}, chi_{chi.disc}) = {cv.value:.12g}")
            print(f"self-consistency spread = {cv.tolerance:.3e}")
            return 0
        if args.action == "fe-check":
            cv = eng.central_value(args.point[0])
            print(f"|Lambda(w) - eps Lambda(1-w)| = {cv.fe_residual:.3e}")
            return 0
        pv = lseries.L_partial_gl1(chi, args.point[0], frozenset({2}), args.cutoff)
        print(f"L^S({args.point[0]}, chi_{chi.disc}) ~ {pv.value:.12g} (tail <= {pv.tail:.2e})")
        return 0
    sys_ = experiments.default_system(cfg)
    if args.action == "partial":
        pv = lseries.L_partial_gl3(sys_, args.point[0], frozenset({2}), args.cutoff)
        print(f"L^S({args.point[0]}, {sys_.label}) ~ {pv.value:.12g} (tail <= {pv.tail:.2e})")
        return 0
    eng = lseries.gl3_twisted_engine(sys_, args.d, K=lseries.GL3Engine(
        lseries.twisted_params(sys_, args.d), np.zeros(2)).required_coeffs())
    cv = eng.central_value(args.point[0])
    act = "central value" if args.action == "central" else "fe residual"
    print(f"Lambda({args.point[0]}, {sys_.label} x chi_{args.d}) = {cv.value:.10g}")
    print(f"spread = {cv.tolerance:.3e}  fe_residual = {cv.fe_residual:.3e}  [{act}]")
    return 0


def cmd_dds(args) -> int:
    cfg = _config(args)
    ctx = build_context(rational_field())
    sys_ = experiments.default_system(cfg)
    s, w = args.point
    trunc = dds.TruncationSpec(x_d=args.cutoff, x_n=args.cutoff, order=args.order)
    if args.action == "pure":
        v = dds.Z_pure(s, w, sys_, ctx, trunc)
        print(f"Z_pure({s}, {w}) [{args.order}] = {v.value:.10g}")
        print(f"last_term = {v.last_term:.3e}  tail <= {v.tail:.3e}")
        return 0
    if args.action == "identity-check":
        zd, zm, resid = dds.basic_identity_check(s, w, sys_, ctx, 1, 1, trunc)
        print(f"D-side = {zd.value:.12g}")
        print(f"M-side = {zm.value:.12g}")
        print(f"residual = {resid:.3e}")
        return 0
    if args.action == "zr":
        v = dds.Z_r(s, w, sys_, ctx, args.r, trunc)
        print(f"Z_r({s}, {w}; r = {args.r}) = {v.value:.10g}")
        return 0
    v = dds.Z_star(s, w, sys_, ctx, 1, 1, trunc)
    print(f"Z_star({s}, {w}) = {v.value:.10g}")
    return 0


def _emit_region(name: str, region: fegroup.Region):
    print(f"# region {name}: aa*sigma + bb*tau > cc per half-plane, piece per block")
    if region.is_whole_plane():
        print("whole-plane")
        return
    for i, piece in enumerate(region.pieces):
        for h in piece.halfplanes:
            op = ">" if h.strict else ">="
            print(f"{name},{i},{h.a},{h.b},{op},{h.c}")


def cmd_region(args) -> int:
    if args.action == "pipeline":
        stages = fegroup.continuation_pipeline()
        for name in ("R1", "R2", "R3", "final"):
            _emit_region(name, stages[name])
        covered = fegroup.box_coverage(stages["final"], -100, 100, 201)
        print(f"box_coverage_[-100,100]^2_201x201 = {'pass' if covered else 'fail'}")
        return 0 if covered else 4
    region = {
        "R1": fegroup.region_R1(),
        "prop56": fegroup.region_prop56(),
    }.get(args.which)
    if region is None:
        raise ConfigurationError(f"unknown region {args.which!r}")
    _emit_region(args.which, region)
    if args.grid:
        lo, hi, n = -3, 3, args.grid
        print(f"# membership grid {n}x{n} on [{lo},{hi}]^2 (1 = inside)")
        for i in range(n):
            x = Fraction(lo) + Fraction(hi - lo) * i / (n - 1)
            row = []
            for j in range(n):
                y = Fraction(lo) + Fraction(hi - lo) * j / (n - 1)
                row.append("1" if region.contains((x, y)) else "0")
            print("".join(row))
    return 0


def cmd_fegroup(args) -> int:
    group = fegroup.generate_group()
    phi, psi = fegroup.phi_map(), fegroup.psi_map()
    ident = fegroup.identity_map()
    print(f"group order = {len(group)}")
    for m in group:
        print(f"map: [[{m.a11},{m.a12}],[{m.a21},{m.a22}]] + ({m.b1},{m.b2})")
    checks = {
        "phi^2 = id": phi.compose(phi) == ident,
        "psi^2 = id": psi.compose(psi) == ident,
        "(phi psi)^6 = id": _power(phi.compose(psi), 6) == ident,
        "(phi psi)^3 != id": _power(phi.compose(psi), 3) != ident,
        "order 12": len(group) == 12,
    }
    ok = True
    for name, val in checks.items():
        print(f"check {name}: {'pass' if val else 'fail'}")
        ok = ok and val
    return 0 if ok else 4


def _power(m: fegroup.AffineMap2, k: int) -> fegroup.AffineMap2:
    out = fegroup.identity_map()
    for _ in range(k):
        out = out.compose(m)
    return out


def cmd_residue(args) -> int:
    cfg = _config(args)
    ctx = build_context(rational_field())
    sys_ = experiments.default_system(cfg)
    if args.action == "report":
        rep = residues.R1(sys_, ctx, args.e_class, args.s, args.cutoff, rational_field())
        rr = residues.Rr(sys_, ctx, args.e_class, args.r, args.s)
        out = {
            "R1": _cplx(rep.R1),
            "Rr": _cplx(rr),
            "T": _cplx(rep.T_of_s),
            "sym2_partial": _cplx(rep.sym2_partial),
            "components": {k: _cplx(v) for k, v in rep.components.items()},
        }
        print(json.dumps(out, indent=2))
        return 0
    if args.action == "probe":
        report = residues.hypothesis_probe(sys_, [args.s], [1000, 3000, 10_000])
        for s, data in report.items():
            for X, v in zip(data["ladder"], data["values"]):
                print(f"s={s.real},X={X},product={v.real:.8g}")
            print(f"s={s.real},drifts={[float(f'{d:.3e}') for d in data['drifts']]}")
        return 0
    if args.action == "switching":
        resid = residues.switching_check(sys_, args.r, args.s, args.cutoff)
        print(f"switching residual (r={args.r}, s={args.s}, X={args.cutoff}) = {resid:.3e}")
        return 0
    out = residues.residue_consistency(
        sys_, ctx, args.e_class, args.r, args.s, args.cutoff, rational_field()
    )
    print(
        f"route_expansion={out['route_expansion']:.8g} route_closed={out['route_closed']:.8g} "
        f"relative_deviation={out['relative_deviation']:.3e}"
    )
    return 0


def _cplx(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def cmd_exp(args) -> int:
    cfg = _config(args)
    ctx = build_context(rational_field())
    if args.which == "nonvanishing":
        table = experiments.exp_nonvanishing(cfg, ctx=ctx)
        scan = experiments.count_nonzero_twists(cfg, dmax=1000)
        table.meta["nonzero_count_d_le_1000"] = scan.meta["nonzero_count"]
    elif args.which == "meansquare":
        table = experiments.exp_meansquare(cfg)
        table.meta["fitted_loglog_slope"] = experiments.fitted_loglog_slope(table)
    else:
        sysA, sysB = experiments.make_perturbed_pair(cfg)
        primes = [p for p in lseries.sieve_primes(230) if p >= 101]
        table = experiments.exp_determination(sysA, sysB, ctx, primes)
    text = table.to_csv()
    if args.plot_data:
        text = "\n".join(line.replace(",", " ") for line in text.splitlines()) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_cache(args) -> int:
    cfg = _config(args)
    if args.action == "build":
        sys_ = experiments.default_system(cfg)
        primes = [p for p in lseries.sieve_primes(args.pmax) if p != 2]
        lseries.save_cache(args.path, sys_, primes)
        print(f"wrote {args.path} ({len(primes)} records)")
        return 0
    loaded = lseries.load_cache(args.path)
    print(f"cache {args.path}: label = {loaded.label}, primes = {len(loaded.cache_table)}")
    return 0


def cmd_suite(args) -> int:
    cfg = _config(args)
    out_dir = args.out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    ctx = build_context(rational_field())
    failures = 0
    for name in args.names:
        if name == "nonvanishing":
            table = experiments.exp_nonvanishing(cfg, ctx=ctx)
            ratios = [r[2] for r in table.rows]
            ok = all(v > 0 for v in ratios) and max(ratios) <= 1.2 * min(ratios)
        elif name == "meansquare":
            table = experiments.exp_meansquare(cfg)
            slope = experiments.fitted_loglog_slope(table)
            table.meta["fitted_loglog_slope"] = slope
            ok = slope <= 1.7
        elif name == "determination":
            sysA, sysB = experiments.make_perturbed_pair(cfg)
            primes = [p for p in lseries.sieve_primes(230) if p >= 101]
            table = experiments.exp_determination(sysA, sysB, ctx, primes)
            ok = any(row[5] for row in table.rows) and not any(row[6] for row in table.rows)
        else:
            raise ConfigurationError(f"unknown suite {name!r}")
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w") as fh:
            fh.write(table.to_csv())
        print(f"suite {name}: {'pass' if ok else 'FAIL'} -> {path}")
        failures += 0 if ok else 1
    with open(os.path.join(out_dir, "config.echo"), "w") as fh:
        fh.write(echo_config(cfg))
    return 0 if failures == 0 else 4


if __name__ == "__main__":
    sys.exit(main())

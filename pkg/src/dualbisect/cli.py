"""Command-line interface: gen, solve, compare, bench, verify.

Outputs are plain JSON/CSV files; apart from an optional timestamp field
(disable with --no-timestamps) every byte is determined by the seed and
flags.  Method errors exit with code 1 and a machine-readable JSON object on
stderr; flag errors exit with code 2 (argparse).
"""

import argparse
import datetime
import json
import sys
from dataclasses import asdict, replace

from . import bisection
from .agents import compose_oracle, dump_instance, load_instance, write_response_log
from .benchmark import (
    ComparisonReport,
    GeneratorConfig,
    generate_instance,
    run_comparison,
    verify_instance,
    write_bench_csv,
    write_bench_markdown,
)
from .bisection import DualBiConfig
from .errors import SolverError
from .lagrangian import warm_start_lambda_ref
from .subgradient import SubgradientConfig, scaled_alpha_bar
from .subgradient import write_trace as write_sg_trace


def _timestamp(ns):
    if ns.no_timestamps:
        return {}
    return {"created": datetime.datetime.now().isoformat(timespec="seconds")}


def _gen_config(ns) -> GeneratorConfig:
    return GeneratorConfig(
        m=ns.agents,
        seed=ns.seed,
        n_c=ns.n_c,
        n_d=ns.n_d,
        box=ns.box,
        rows=ns.rows,
        budget_fraction=ns.budget_fraction,
        int_box=ns.int_box,
        allow_redundant=ns.allow_redundant,
    )


def _cmd_gen(ns):
    cfg = _gen_config(ns)
    instance = generate_instance(cfg)
    meta = {"m": cfg.m, "seed": cfg.seed, "n_c": cfg.n_c, "n_d": cfg.n_d,
            "box": cfg.box, "rows": cfg.rows, "budget_fraction": cfg.budget_fraction}
    if cfg.int_box is not None:
        meta["int_box"] = cfg.int_box
    dump_instance(instance, ns.out, meta=meta)
    return 0


def _solve_configs(ns, lam_ref):
    return DualBiConfig(
        lambda_ref=lam_ref,
        interval_tol=ns.interval_tol,
        v_zero_tol=ns.v_zero_tol,
        max_doubling=ns.max_doubling,
        max_bisection=ns.max_bisection,
    )


def _cmd_solve(ns):
    instance = load_instance(ns.infile)
    log = [] if ns.response_log else None
    oracle = compose_oracle(instance, response_log=log)
    if ns.lambda_ref is not None:
        lam_ref = ns.lambda_ref
    else:
        lam_ref = warm_start_lambda_ref(oracle, instance.zero_point())
    result = bisection.solve(oracle, _solve_configs(ns, lam_ref))
    payload = {
        "status": result.status,
        "K": result.K,
        "iterations": result.iterations,
        "lambda_ref": lam_ref,
        "final_interval": list(result.final_interval),
        "best_f": None if result.best is None else result.best.f_val,
        "best_v": None if result.best is None else result.best.v_val,
        "x": None if result.best is None else result.best.x.tolist(),
        **_timestamp(ns),
    }
    with open(ns.out, "w") as fh:
        json.dump(payload, fh, indent=1)
    if ns.trace:
        bisection.write_trace(result, ns.trace)
    if ns.response_log:
        write_response_log(log, ns.response_log)
    return 0


def _cmd_compare(ns):
    instance = load_instance(ns.infile)
    alpha = ns.alpha_bar
    if not ns.no_alpha_scale:
        alpha = scaled_alpha_bar(alpha, instance.m)
    dcfg = DualBiConfig(
        lambda_ref=1.0,  # replaced by the warm start inside run_comparison
        interval_tol=ns.interval_tol,
        v_zero_tol=ns.v_zero_tol,
    )
    scfg = SubgradientConfig(
        alpha_bar=alpha, conv_tol=ns.conv_tol, window_w=ns.w, max_iter=ns.max_iter
    )
    report = run_comparison(instance, dcfg, scfg)
    payload = {**asdict(report), **_timestamp(ns)}
    with open(ns.out, "w") as fh:
        json.dump(payload, fh, indent=1)
    return 0


def _cmd_bench(ns):
    m_list = [int(tok) for tok in ns.agents.split(",") if tok]
    rows = []
    for m in m_list:
        for seed in range(ns.seeds):
            cfg = GeneratorConfig(m=m, seed=seed, n_c=ns.n_c, n_d=ns.n_d,
                                  box=ns.box, rows=ns.rows, int_box=ns.int_box,
                                  budget_fraction=ns.budget_fraction)
            instance = generate_instance(cfg)
            alpha = ns.alpha_bar
            if not ns.no_alpha_scale:
                alpha = scaled_alpha_bar(alpha, m)
            dcfg = DualBiConfig(lambda_ref=1.0, interval_tol=ns.interval_tol,
                                v_zero_tol=ns.v_zero_tol)
            scfg = SubgradientConfig(alpha_bar=alpha, conv_tol=ns.conv_tol,
                                     window_w=ns.w, max_iter=ns.max_iter)
            try:
                report = run_comparison(instance, dcfg, scfg)
            except SolverError as exc:
                report = ComparisonReport(
                    m=m, lambda_ref=float("nan"), delta_f_pct=None,
                    iters_dualbi=None, iters_competitor=None, f_dualbi=None,
                    f_competitor=None, phi_star=float("nan"), wall_dualbi=None,
                    wall_competitor=None, error=exc.kind,
                )
            rows.append((seed, report))
    write_bench_csv(rows, ns.out)
    if ns.markdown:
        write_bench_markdown(rows, ns.markdown)
    return 0


def _cmd_verify(ns):
    instance = load_instance(ns.infile)
    checks = verify_instance(instance, grid_points=ns.grid_points)
    ok = True
    for check in checks:
        print(repr(check))
        ok = ok and check.passed
    return 0 if ok else 1


def _add_gen_flags(p):
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-c", type=int, default=5, dest="n_c")
    p.add_argument("--n-d", type=int, default=3, dest="n_d")
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--int-box", type=float, default=None, dest="int_box")
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--budget-fraction", type=float, default=0.5)
    p.add_argument("--allow-redundant", action="store_true")


def _add_dualbi_flags(p):
    p.add_argument("--interval-tol", type=float, default=1e-5)
    p.add_argument("--v-zero-tol", type=float, default=0.0)
    p.add_argument("--max-doubling", type=int, default=64)
    p.add_argument("--max-bisection", type=int, default=10_000)


def _add_sg_flags(p):
    p.add_argument("--alpha-bar", type=float, default=7e-4)
    p.add_argument("--no-alpha-scale", action="store_true")
    p.add_argument("--conv-tol", type=float, default=1e-5)
    p.add_argument("--w", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=5000)


def build_parser():
    parser = argparse.ArgumentParser(prog="dualbisect")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random coupled instance")
    _add_gen_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen, no_timestamps=True)

    p = sub.add_parser("solve", help="run the bisection solver on an instance")
    p.add_argument("--in", dest="infile", required=True)
    _add_dualbi_flags(p)
    p.add_argument("--lambda-ref", type=float, default=None,
                   help="override the warm-started reference multiplier")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", default=None)
    p.add_argument("--response-log", default=None)
    p.add_argument("--no-timestamps", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("compare", help="run both methods head to head")
    p.add_argument("--in", dest="infile", required=True)
    _add_dualbi_flags(p)
    _add_sg_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamps", action="store_true")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("bench", help="sweep agent counts x seeds")
    p.add_argument("--agents", required=True, help="comma-separated m values")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--n-c", type=int, default=5, dest="n_c")
    p.add_argument("--n-d", type=int, default=3, dest="n_d")
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--int-box", type=float, default=None, dest="int_box")
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--budget-fraction", type=float, default=0.5)
    _add_dualbi_flags(p)
    _add_sg_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--markdown", default=None)
    p.add_argument("--no-timestamps", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="invariant suite with brute-force cross-checks")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid-points", type=int, default=25)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except SolverError as exc:
        json.dump(exc.to_json(), sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

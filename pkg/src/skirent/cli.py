"""skirent command line: instance generation, single runs, sweeps, curves, lower bounds."""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__, button_lp, evaluator, generators, tradeoff
from .algorithms import (
    execute_plan,
    prepare_det,
    prepare_rand,
    rand_plan,
    sample_alpha,
)
from .evaluator import AlgorithmConfig
from .instance import INF, Instance, InstanceError, build_opt_table, load_instance, opt_schedule

#: relative slack when judging floating sweep margins
MARGIN_RTOL = 1e-9


class UsageError(Exception):
    pass


# -- argument parsing helpers -------------------------------------------------


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def real(text: str) -> float:
    """Decimal literal, ``e``, or ``e^x``."""
    t = text.strip()
    try:
        if t == "e":
            return math.e
        if t.startswith("e^"):
            return math.exp(float(t[2:]))
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def _csv_list(conv):
    def parse(text):
        return [conv(x) for x in text.split(",") if x.strip()]
    return parse


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--instance", help="instance JSON file")
    g.add_argument("--family", choices=["classic", "geometric", "random"], default="classic")
    g.add_argument("--B", type=rational, default=Fraction(4), help="classic: buy cost")
    g.add_argument("--base", type=rational, default=Fraction(2), help="geometric: base")
    g.add_argument("--count", type=int, default=4, help="geometric: number of finite options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-options", type=int, default=4)
    g.add_argument("--max-days", type=int, default=10)
    g.add_argument("--max-cost", type=int, default=12)
    g.add_argument("--horizon", type=int, help="override the instance horizon")


def instance_from_args(args) -> Instance:
    if args.instance:
        inst = load_instance(args.instance)
    elif args.family == "classic":
        inst = generators.classic_two_option(args.B)
    elif args.family == "geometric":
        inst = generators.geometric_options(args.base, args.count)
    else:
        inst = generators.random_instance(args.seed, args.n_options, args.max_days, args.max_cost)
    if args.horizon:
        inst = inst.with_horizon(args.horizon)
    return inst


def option_label(instance: Instance, idx: int) -> str:
    d = instance.options[idx].duration
    if d == INF:
        return "buy"
    return "rent" if d == 1 else f"rent{d}"


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 else f"{x} ({float(x):.6g})"
    return f"{x:.10g}"


def _open_out(path):
    return open(path, "w") if path and path != "-" else sys.stdout


# -- subcommands --------------------------------------------------------------


def cmd_gen(args) -> int:
    inst = instance_from_args(args)
    out = _open_out(args.output)
    out.write(inst.to_json(indent=args.indent) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_opt(args) -> int:
    inst = instance_from_args(args)
    table = build_opt_table(inst)
    if args.t < 0 or args.t > inst.horizon:
        raise UsageError(f"t={args.t} outside 0..{inst.horizon}")
    sched = opt_schedule(table, args.t)
    if args.t == 0:
        print("optval = 0")
    else:
        labels = ", ".join(option_label(inst, i) for i in sched.options)
        print(f"optval = {_num(table.value(args.t))}, schedule = [{labels}]")
    return 0


def _write_trace(trace, path) -> None:
    if path:
        with _open_out(path) as fh:
            fh.write(trace.to_jsonl())


def cmd_run_det(args) -> int:
    inst = instance_from_args(args)
    t_pred = args.t_pred
    table, plan = prepare_det(inst, t_pred, args.lam)
    trace = execute_plan(table, plan, args.T)
    opt = table.value(args.T)
    print(f"plan: {plan.label}, k = {plan.k}")
    print(f"cost = {_num(trace.total_cost)}, optval = {_num(opt)}, ratio = {_num(trace.total_cost / opt)}")
    _write_trace(trace, args.trace)
    return 0


def cmd_run_rand(args) -> int:
    inst = instance_from_args(args)
    table, params = prepare_rand(inst, args.t_pred, args.delta, args.s)
    opt = float(table.value(args.T))
    print(f"delta = {params.delta:.10g}, s = {params.s:g}, k = {params.k}")
    if args.alpha is not None or not args.exact:
        alpha = args.alpha if args.alpha is not None else sample_alpha(args.seed, params.delta).alpha
        trace = execute_plan(table, rand_plan(params, alpha, args.t_pred), args.T)
        cost = float(trace.total_cost)
        print(f"alpha = {alpha:.12g}: cost = {cost:.10g}, optval = {opt:.10g}, ratio = {cost / opt:.10g}")
        _write_trace(trace, args.trace)
    if args.exact:
        _, _, prof = evaluator.expected_cost_profile(table.instance, args.t_pred, params, [args.T])
        ex = prof[args.T].expected
        print(f"exact expected cost = {ex:.12g}, ratio = {ex / opt:.12g}, "
              f"chi = {tradeoff.chi(params.delta, params.s):.10g}, rho = {tradeoff.rho(params.delta, params.s):.10g}")
    if args.mc:
        mean, se = evaluator.monte_carlo_expected_cost(table.instance, args.t_pred, params, args.T,
                                                       args.mc, args.seed)
        print(f"monte-carlo mean = {mean:.10g} +- {se:.3g} (n = {args.mc})")
    return 0


def _sweep_task(task):
    family, inst, config, t_pred = task
    _, reports = evaluator.robustness_ratio(config, inst, t_pred, range(1, inst.horizon + 1))
    return evaluator.report_rows(family, config, t_pred, reports)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SKIRENT_THREADS", "1")))
    except ValueError:
        return 1


def sweep_rows(instances, configs, predictions=None) -> list[tuple]:
    tasks = []
    for family, inst in instances:
        preds = predictions or generators.prediction_grid(inst)
        for config in configs:
            for t_pred in preds:
                if not 1 <= t_pred <= inst.horizon:
                    raise UsageError(f"T_pred={t_pred} outside 1..{inst.horizon} for {family}")
                tasks.append((family, inst, config, t_pred))
    workers = _threads()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_task, tasks))
    else:
        chunks = [_sweep_task(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[4], r[3]))
    return rows


def _violations(rows) -> int:
    bad = 0
    for r in rows:
        margin, bound = float(Fraction(r[9])), float(Fraction(r[8]))
        if margin < -MARGIN_RTOL * bound:
            bad += 1
    return bad


def cmd_sweep(args) -> int:
    if args.algo == "det":
        if not args.lam:
            raise UsageError("det sweep needs --lambda")
        configs = [AlgorithmConfig.det(lam) for lam in args.lam]
        for lam in args.lam:
            if not 0 < lam <= Fraction(1, 2):
                raise UsageError(f"lambda must lie in (0, 1/2], got {lam}")
    else:
        if not args.delta or args.s is None:
            raise UsageError("rand sweep needs --delta and --s")
        for d in args.delta:
            if d < math.e:
                raise UsageError(f"delta must be >= e, got {d}")
        configs = [AlgorithmConfig.rand(d, s) for d in args.delta for s in args.s]
    if args.suite:
        instances = [(name, inst) for name, inst in generators.suite(args.n_random)]
        if args.seed:
            instances = [(n, i) for n, i in instances if not n.startswith("random")]
            instances += [(f"random-s{args.seed + j}", generators.random_instance(args.seed + j))
                          for j in range(args.n_random)]
    else:
        inst = instance_from_args(args)
        instances = [(args.instance or args.family, inst)]
    rows = sweep_rows(instances, configs, args.t_pred)
    out = _open_out(args.output)
    evaluator.write_csv(rows, out, comment=f"skirent-lab v{__version__} seed={args.seed}")
    if out is not sys.stdout:
        out.close()
    bad = _violations(rows)
    if bad:
        print(f"{bad} bound violation(s)", file=sys.stderr)
        return 1
    return 0


CURVE_HEADER = ("curve_id", "param1", "param2", "consistency", "robustness")


def cmd_curves(args) -> int:
    out = _open_out(args.output)
    evaluator.write_csv(tradeoff.curve_rows(args.n), out, header=CURVE_HEADER,
                        comment=f"skirent-lab v{__version__} seed=0")
    if out is not sys.stdout:
        out.close()
    return 0


def _lb_lambda(lam: Fraction) -> Fraction:
    if not 0 < lam < 1:
        raise UsageError(f"lambda must lie in (0, 1), got {lam}")
    return lam


def cmd_lb_verify(args) -> int:
    lam = _lb_lambda(args.lam)
    if args.J < 2:
        raise UsageError("J must be >= 2")
    cert = button_lp.build_certificate(args.J, lam)
    d2 = button_lp.verify_d2_feasibility(cert)
    scaled = button_lp.scale_to_d1(cert)
    ratio = button_lp.certificate_ratio(args.J, lam)
    target = button_lp.ratio_limit(lam)
    feasible = d2.feasible and scaled.report.feasible and scaled.normalization == 1
    rows = [
        ("J", args.J), ("lambda", lam), ("ell", cert.ell), ("v_hat", cert.v_hat), ("w", cert.w),
        ("u_1", cert.u[0]), ("divisor", scaled.divisor),
        ("d2_rows_checked", d2.rows_checked), ("d2_violations", len(d2.violations)),
        ("d2_tight_w_rows", d2.tight_rows),
        ("d1_rows_checked", scaled.report.rows_checked), ("d1_violations", len(scaled.report.violations)),
        ("ratio", f"{ratio} ({float(ratio):.4f})"), ("target", f"{target} ({float(target):.4f})"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    print(f"{'feasible' if feasible else 'INFEASIBLE'}; ratio {float(ratio):.4f}; target {float(target):.4f}")
    if args.csv:
        with open(args.csv, "w") as fh:
            evaluator.write_csv([(k, v) for k, v in rows], fh, header=("field", "value"))
    return 0 if feasible else 1


def cmd_lb_solve(args) -> int:
    lam = _lb_lambda(args.lam)
    if args.J > button_lp.SIMPLEX_MAX_J:
        raise UsageError(f"J={args.J} exceeds the simplex cap of {button_lp.SIMPLEX_MAX_J}")
    if args.J < 2:
        raise UsageError("J must be >= 2")
    lp = button_lp.build_primal(args.J, lam)
    gamma, res = button_lp.solve_primal_exact(lp)
    cert = button_lp.certificate_ratio(args.J, lam)
    ok = gamma >= cert
    print(f"J = {args.J}, lambda = {lam}")
    print(f"gamma* = {gamma} ({float(gamma):.6f}) after {res.pivots} pivots")
    print(f"certificate objective = {cert} ({float(cert):.6f})")
    print(f"weak duality {'holds' if ok else 'FAILS'}")
    if args.csv:
        with open(args.csv, "w") as fh:
            rows = [(n, x) for n, x in zip(lp.names, res.x) if x]
            evaluator.write_csv(rows, fh, header=("variable", "value"))
    return 0 if ok else 1


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skirent", description=__doc__)
    parser.add_argument("--version", action="version", version=f"skirent-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit an instance as JSON")
    _add_instance_args(p)
    p.add_argument("-o", "--output")
    p.add_argument("--indent", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("opt", help="OPTVAL(t) and an optimal schedule")
    _add_instance_args(p)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("run-det", help="run the deterministic algorithm once")
    _add_instance_args(p)
    p.add_argument("--lambda", dest="lam", type=rational, required=True)
    p.add_argument("--t-pred", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--trace", help="write purchases as JSON lines")
    p.set_defaults(func=cmd_run_det)

    p = sub.add_parser("run-rand", help="run the randomized algorithm")
    _add_instance_args(p)
    p.add_argument("--delta", type=real, default=math.e)
    p.add_argument("--s", type=real, default=0.0)
    p.add_argument("--t-pred", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--alpha", type=real, help="fix alpha instead of sampling it")
    p.add_argument("--exact", action="store_true", help="print the exact expected cost")
    p.add_argument("--mc", type=int, default=0, help="Monte-Carlo sample count")
    p.add_argument("--trace", help="write purchases as JSON lines")
    p.set_defaults(func=cmd_run_rand)

    p = sub.add_parser("sweep", help="ratio CSV over instances, parameters and T")
    _add_instance_args(p)
    p.add_argument("--algo", choices=["det", "rand"], required=True)
    p.add_argument("--lambda", dest="lam", type=_csv_list(rational))
    p.add_argument("--delta", type=_csv_list(real))
    p.add_argument("--s", type=_csv_list(real))
    p.add_argument("--t-pred", type=_csv_list(int), help="predictions (default: spread over the horizon)")
    p.add_argument("--suite", action="store_true", help="use the standard instance suite")
    p.add_argument("--n-random", type=int, default=20)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("curves", help="trade-off curves as CSV")
    p.add_argument("--n", type=int, default=50, help="points per sampled curve")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("lb-verify", help="check the dual certificate for the button LP")
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=rational, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_lb_verify)

    p = sub.add_parser("lb-solve", help="solve the button primal LP exactly (J <= 14)")
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=rational, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_lb_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, ValueError) as exc:
        print(f"skirent {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

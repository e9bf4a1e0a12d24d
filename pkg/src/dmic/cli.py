"""Command-line front end: ``dmic <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import capacity as cap
from .channel import check_degraded, classify, classify_one_sided, factorize_weak, mi_condition_report
from .channels import APPENDIX_F, APPENDIX_G, builtin_channel
from .errors import (
    ChannelSpecError,
    MarkovViolationError,
    NonIdentifiableError,
    NumericError,
    PreconditionError,
    ProbabilityError,
)
from .io import emit_region_csv, parse_channel_spec, serialize_channel, write_channel_spec
from .optimize import OptimizerConfig, grid_oracle, maximize_product_input
from .transform import solve_degradation_table, weak_alt_gap_surface

EXIT_OK, EXIT_PRECONDITION, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4
SEED_ENV = "DMIC_SEED"
ORACLE_TOL = 1e-3


def _f(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _vec(v) -> str:
    return "[" + ", ".join(_f(float(x)) for x in v) + "]"


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _config(args) -> OptimizerConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ChannelSpecError(f"{SEED_ENV}={env!r} is not an integer") from None
    kw = {"rng_seed": seed} if seed is not None else {}
    if args.grid_step is not None:
        kw["grid_step"] = args.grid_step
    if args.multistarts is not None:
        kw["multistarts"] = args.multistarts
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    return replace(OptimizerConfig(), **kw)


def _channel(args):
    if args.builtin and args.file:
        raise ChannelSpecError("give either FILE or --builtin, not both")
    if args.builtin:
        try:
            return builtin_channel(args.builtin)
        except KeyError as exc:
            raise ChannelSpecError(exc.args[0]) from None
    if args.file:
        return parse_channel_spec(args.file)
    raise ChannelSpecError("no channel given (FILE or --builtin NAME)")


def _result_dict(res, **extra) -> dict:
    d = {
        "value": res.value,
        "argopt": [a.values.tolist() for a in res.argopt],
        "iterations": res.iterations,
        "certified_grid_step": res.certified_grid_step,
    }
    d.update(extra)
    return d


def _region_dict(region) -> dict:
    return {"vertices": [list(v) for v in region.vertices], "meta": region.meta}


def _print_region(region, out) -> None:
    if out:
        emit_region_csv(region, out)
        print(f"wrote {len(region.vertices)} vertices to {out}")
    else:
        print("r1,r2")
        for v in region.vertices:
            print(f"{_f(v.r1)},{_f(v.r2)}")
    print(f"max_r1 {_f(region.max_r1)}  max_r2 {_f(region.max_r2)}  max_sum {_f(region.max_sum)}")


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    c = _channel(args)
    rep = classify(c, _config(args), args.tol)
    if args.json:
        _emit_json(rep.to_dict())
        return EXIT_OK
    print(f"channel {c.name or args.file}  ({c.nx1}x{c.nx2} -> {c.ny1}x{c.ny2})")
    print(f"labels: {', '.join(rep.labels) or '(none)'}")
    print(f"one-sided {str(rep.one_sided).lower()}  weak-factorization {str(rep.weak).lower()}  "
          f"degraded {str(rep.degraded).lower()}")
    for name, r in rep.conditions.items():
        w = r.witness
        print(f"  {name:<14} min gap {_f(r.min_gap):>10}  holds {str(r.holds).lower():<5}  "
              f"at p1={_vec(w.p1.values)} p2={_vec(w.p2.values)}")
    return EXIT_OK


def _pick_mode(c, cfg, tol) -> str:
    if classify_one_sided(c, tol) and factorize_weak(c, tol) is not None:
        return "weak-zic"
    if check_degraded(c, tol) and mi_condition_report(c, "mixed-mi", cfg, tol).holds:
        return "mixed"
    raise PreconditionError(f"{c.name or 'channel'} is neither a weak one-sided channel nor mixed")


def cmd_sumrate(args) -> int:
    c = _channel(args)
    cfg = _config(args)
    mode = _pick_mode(c, cfg, args.tol) if args.mode == "auto" else args.mode
    res = (cap.sumrate_weak_zic if mode == "weak-zic" else cap.sumrate_mixed)(c, cfg, args.tol)
    if args.json:
        _emit_json(_result_dict(res, mode=mode, channel=c.name))
        return EXIT_OK
    print(f"mode {mode}")
    print(f"sum_rate {_f(res.value)}")
    print(f"p1 {_vec(res.argopt[0].values)}")
    print(f"p2 {_vec(res.argopt[1].values)}")
    return EXIT_OK


def cmd_region(args) -> int:
    c = _channel(args)
    cfg = _config(args)
    kind = args.kind
    if kind == "auto":
        kind = "zic" if classify_one_sided(c, args.tol) else "mixed"
    if kind == "zic":
        region = cap.achievable_region_zic(c, cfg, args.samples, args.tol)
    else:
        if not check_degraded(c, args.tol):
            raise PreconditionError("mixed achievable region requires X2 - (X1,Y2) - Y1")
        region = cap.achievable_region_mixed(c, cfg, args.samples)
    if args.json:
        if args.out:
            emit_region_csv(region, args.out)
        _emit_json(_region_dict(region))
        return EXIT_OK
    _print_region(region, args.out)
    return EXIT_OK


def _load_map(spec: str, c):
    if spec == "bijection":
        return cap.bijection_map(c.nx1, c.ny2)
    if spec == "xor":
        return cap.xor_map(c.nx1, c.ny2)
    if spec.startswith("table:"):
        path = Path(spec[len("table:"):])
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ChannelSpecError(f"cannot read map {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ChannelSpecError(f"{path}: malformed JSON ({exc.msg})") from exc
        try:
            m = np.asarray(raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ChannelSpecError(f"{path}: map must be a [x1][y2] integer table") from exc
        if m.shape != (c.nx1, c.ny2):
            raise ChannelSpecError(f"{path}: map shape {m.shape} != (nx1, ny2)=({c.nx1}, {c.ny2})")
        if np.any(m < 0) or np.any(np.mod(m, 1) != 0):
            raise ChannelSpecError(f"{path}: map entries must be nonnegative integers")
        return m.astype(int)
    raise ChannelSpecError(f"unknown map {spec!r}; use bijection, xor or table:PATH")


def cmd_outerbound(args) -> int:
    c = _channel(args)
    cfg = _config(args)
    if args.kind == "simple":
        region = cap.simple_outer_bound(c, cfg, args.directions, args.samples, args.tol)
    else:
        region = cap.bc_outer_bound(c, _load_map(args.map, c), cfg, args.directions, args.samples, args.tol)
    if args.json:
        if args.out:
            emit_region_csv(region, args.out)
        _emit_json(_region_dict(region))
        return EXIT_OK
    _print_region(region, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    c = _channel(args)
    cfg = _config(args)
    objective = args.objective
    if objective == "auto":
        objective = "theorem1" if classify_one_sided(c, args.tol) else "theorem3"
    f = cap.theorem1_objective(c) if objective == "theorem1" else cap.theorem3_objective(c)
    dims = (c.nx1, c.nx2)
    opt = maximize_product_input(f, dims, cfg)
    ref = grid_oracle(f, dims, args.step)
    diff = abs(opt.value - ref.value)
    agree = diff <= ORACLE_TOL
    if args.json:
        _emit_json({"objective": objective, "optimizer": _result_dict(opt), "oracle": _result_dict(ref),
                    "difference": diff, "agree": agree})
    else:
        print(f"objective {objective}")
        print(f"optimizer {_f(opt.value)}  p1={_vec(opt.argopt[0].values)} p2={_vec(opt.argopt[1].values)}")
        print(f"oracle    {_f(ref.value)}  step {args.step:g}")
        print(f"difference {diff:.2e}  agree {str(agree).lower()}")
    return EXIT_OK if agree else EXIT_NUMERIC


def cmd_counterexample(args) -> int:
    py1 = np.stack([1 - APPENDIX_F, APPENDIX_F], axis=-1)
    py2 = np.stack([1 - APPENDIX_G, APPENDIX_G], axis=-1)
    sol = solve_degradation_table(py1, py2)
    surf = weak_alt_gap_surface(builtin_channel("appendix"), args.step)
    worst = sol.offending()
    if args.json:
        _emit_json({
            "entries": sol.entries,
            "feasible": sol.feasible,
            "min_entry": sol.min_entry,
            "offending": [{"x1": k[0], "y2": k[1], "y1": k[2], "value": v} for k, v in worst],
            "gap_surface": {"step": args.step, "min_gap": surf.min_gap, "argmin": list(surf.argmin)},
        })
        return EXIT_OK
    print("solved p'(y1=1 | x1, y2):")
    for x1 in range(sol.entries.shape[0]):
        row = "  ".join(f"y2={y2}: {sol.entries[x1, y2, 1]:+.6f}" for y2 in range(sol.entries.shape[1]))
        print(f"  x1={x1}  {row}")
    for (x1, y2, y1), v in worst:
        print(f"offending p'(y1={y1} | x1={x1}, y2={y2}) = {v:.6f}")
    print(f"feasible={str(sol.feasible).lower()}")
    p1, p2 = surf.argmin
    print(f"weak-alt gap surface step {args.step:g}: min gap {_f(surf.min_gap)} at p1={_f(p1)} p2={_f(p2)}")
    return EXIT_OK


def cmd_gaussian(args) -> int:
    try:
        value = cap.gaussian_reference(args.p1, args.p2, args.a, args.b, args.kind)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    out = {"kind": args.kind, "sum_rate": value}
    if args.kind == "mixed":
        out["branches"] = list(cap.gaussian_mixed_branches(args.p1, args.p2, args.a, args.b))
    if args.json:
        _emit_json(out)
        return EXIT_OK
    print(f"sum_rate {_f(value)}")
    if "branches" in out:
        print(f"branches {_vec(out['branches'])}")
    return EXIT_OK


def cmd_export(args) -> int:
    c = _channel(args)
    if args.out:
        write_channel_spec(c, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(serialize_channel(c))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="full-precision JSON output")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (overrides ${SEED_ENV})")
    common.add_argument("--grid-step", type=float, default=None)
    common.add_argument("--multistarts", type=int, default=None)
    common.add_argument("--max-iters", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-9, help="verdict tolerance")

    chan = argparse.ArgumentParser(add_help=False, parents=[common])
    chan.add_argument("file", nargs="?", help="channel JSON file")
    chan.add_argument("--builtin", metavar="NAME", help="e.g. example5, example2(0.05), example4:0.1,0.2")

    p = argparse.ArgumentParser(prog="dmic", description="Discrete memoryless interference channel toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[chan], help="run all structural and MI tests")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("sumrate", parents=[chan], help="sum-rate capacity")
    s.add_argument("--mode", choices=("auto", "weak-zic", "mixed"), default="auto")
    s.set_defaults(func=cmd_sumrate)

    s = sub.add_parser("region", parents=[chan], help="sampled achievable region")
    s.add_argument("--kind", choices=("auto", "zic", "mixed"), default="auto")
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("outerbound", parents=[chan], help="outer bound region")
    s.add_argument("--kind", choices=("bc", "simple"), default="bc")
    s.add_argument("--map", default="bijection", help="bijection, xor or table:PATH (JSON [x1][y2] -> y2')")
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--directions", type=int, default=17)
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_outerbound)

    s = sub.add_parser("oracle", parents=[chan], help="compare optimizer with the exhaustive lattice")
    s.add_argument("--step", type=float, default=0.001)
    s.add_argument("--objective", choices=("auto", "theorem1", "theorem3"), default="auto")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("counterexample", parents=[common], help="degradation-table counterexample")
    s.add_argument("--step", type=float, default=0.001)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("gaussian", parents=[common], help="Gaussian reference sum rates")
    s.add_argument("--kind", choices=("one-sided-weak", "mixed"), required=True)
    s.add_argument("--p1", type=float, required=True)
    s.add_argument("--p2", type=float, required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, default=0.0)
    s.set_defaults(func=cmd_gaussian)

    s = sub.add_parser("export", parents=[chan], help="write a channel as JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PreconditionError, MarkovViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ChannelSpecError, ProbabilityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, NonIdentifiableError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

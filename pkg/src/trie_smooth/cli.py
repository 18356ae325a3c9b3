"""Command-line interface: ``trie-smooth <command> ...``.

Every command that draws random numbers takes ``--seed`` and defaults to
:data:`~trie_smooth.harness.DEFAULT_SEED`, so repeated runs print the same
bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .alphabet import StringSpec
from .analysis import Verdict, analyze, check_dichotomy, gamma, lower_bound_height, lower_bound_P
from .errors import TrieSmoothError
from .harness import DEFAULT_SEED, ExperimentConfig, format_csv, run_height_experiment, sweep_n
from .oracle import coincidence_probability, mc_coincidence
from .perturbation import SampleBudget
from .pfa import classify, dump_pfa, load_pfa, make_convex, make_del, make_ins, make_sub, to_star_like, validate

EXIT_CODES = {Verdict.LOGARITHMIC: 0, Verdict.UNBOUNDED: 2, Verdict.DEGENERATE: 3}


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _emit(pairs, as_json: bool) -> None:
    if as_json:
        print(json.dumps(dict(pairs), indent=2))
    else:
        for key, value in pairs:
            print(f"{key}: {_fmt(value)}")


def _star(path):
    return to_star_like(load_pfa(path))


def cmd_validate(args) -> int:
    pfa = load_pfa(args.pfa, check=False)
    problems = validate(pfa)
    for v in problems:
        print(v)
    if not problems:
        print("ok")
    return 1 if problems else 0


def cmd_classify(args) -> int:
    _emit(classify(load_pfa(args.pfa)).as_dict().items(), args.json)
    return 0


def cmd_check(args) -> int:
    star = _star(args.pfa)
    v = check_dichotomy(star)
    syms = star.alphabet.symbols
    witness = [syms[v.witness[0]], syms[v.witness[1]]] if v.witness else None
    pairs = [("delta", v.delta), ("verdict", v.verdict.value), ("witness", witness)]
    if v.note:
        pairs.append(("note", v.note))
    _emit(pairs, args.json)
    return EXIT_CODES[v.verdict]


def cmd_gamma(args) -> int:
    star = _star(args.pfa)
    g = gamma(star)
    syms = star.alphabet.symbols
    pairs = [
        ("gamma", g.gamma),
        ("pole", g.pole),
        ("symbol", syms[g.factor_of_min]),
        ("roots", {syms[a]: z for a, z in g.per_factor_roots}),
    ]
    if args.json:
        _emit(pairs, True)
    else:
        for key, value in pairs[:3]:
            print(f"{key}: {_fmt(value)}")
        for a, z in g.per_factor_roots:
            print(f"root[{syms[a]}]: {z!r}")
    return 0


def cmd_lower_bound(args) -> int:
    star = _star(args.pfa)
    P = lower_bound_P(star)
    _emit([("P", P), ("n", args.n), ("epsilon", args.epsilon),
           ("lower_bound", lower_bound_height(P, args.n, args.epsilon))], args.json)
    return 0


def cmd_report(args) -> int:
    report = analyze(_star(args.pfa), args.n, args.epsilon)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _input_spec(text: str, alphabet) -> StringSpec:
    raw = text if text.lstrip().startswith("{") else Path(text).read_text()
    return StringSpec.from_json(json.loads(raw), alphabet)


def cmd_coincidence(args) -> int:
    star = _star(args.pfa)
    t = _input_spec(args.input, star.alphabet)
    pairs = [("m", args.m)]
    if args.mc:
        budget = SampleBudget(args.m, args.truncation)
        est = mc_coincidence(star, t, args.m, args.mc, args.seed, budget)
        pairs += [("estimate", est.estimate), ("stderr", est.stderr), ("trials", est.trials),
                  ("exhausted", est.exhausted)]
        if est.warning:
            print(f"warning: {est.warning}", file=sys.stderr)
    else:
        iv = coincidence_probability(star, t, args.m, args.truncation)
        pairs += [("lower", iv.lower), ("residual", iv.residual), ("upper", iv.upper)]
    _emit(pairs, args.json)
    return 0


def _warn_saturation(rows) -> None:
    for stats in rows:
        if stats.unreliable:
            print(f"warning: n={stats.n}: {stats.saturated} of {stats.trials} trials saturated; "
                  "mean height is unreliable", file=sys.stderr)


def _write_rows(rows, out: Optional[str]) -> None:
    text = format_csv(rows)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    rows = [run_height_experiment(cfg)]
    _warn_saturation(rows)
    _write_rows(rows, args.out or cfg.output)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    n_values = [int(x) for x in args.n.split(",") if x.strip()]
    rows = sweep_n(cfg, n_values)
    _warn_saturation(rows)
    _write_rows(rows, args.out or cfg.output)
    return 0


def cmd_make_pfa(args) -> int:
    kind = args.kind
    needed = {"sub": ("p",), "ins": ("p", "q"), "del": ("p",), "convex": ("weights",)}[kind]
    missing = [f"--{name}" for name in needed if getattr(args, name) is None]
    if missing:
        raise ValueError(f"make-pfa {kind} needs {', '.join(missing)}")
    if kind == "sub":
        pfa = make_sub(args.p)
    elif kind == "ins":
        pfa = make_ins(args.p, args.q)
    elif kind == "del":
        pfa = make_del(args.p)
    else:
        pfa = make_convex(tuple(args.weights), args.p_sub, args.p_ins, args.q_ins, args.p_del)
    dump_pfa(pfa, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trie-smooth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, pfa=True, json_flag=True):
        p = sub.add_parser(name, help=help_text)
        if pfa:
            p.add_argument("--pfa", required=True, help="PFA JSON file")
        if json_flag:
            p.add_argument("--json", action="store_true", help="print JSON instead of key: value lines")
        p.set_defaults(func=func)
        return p

    command("validate", cmd_validate, "check stochasticity of a PFA file", json_flag=False)
    command("classify", cmd_classify, "star-like / canonical / read-determinism flags")
    command("check", cmd_check, "logarithmic-or-unbounded verdict (exit 0, 2 or 3)")
    command("gamma", cmd_gamma, "growth constant of the upper bound")

    p = command("lower-bound", cmd_lower_bound, "lower bound on the smoothed height")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)

    p = command("report", cmd_report, "full analytic report as JSON", json_flag=False)
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)

    p = command("coincidence", cmd_coincidence, "probability that two perturbations share m symbols")
    p.add_argument("--input", required=True, help='string spec: JSON file or inline {"prefix": ..., "period": ...}')
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--truncation", type=int, help="input symbols expanded (exact) or read at most (Monte Carlo)")
    p.add_argument("--mc", type=int, metavar="TRIALS", help="estimate by Monte Carlo instead")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    for name, func, help_text in (
        ("simulate", cmd_simulate, "one smoothed-height experiment, CSV row"),
        ("sweep", cmd_sweep, "experiments over several n, CSV table"),
    ):
        p = command(name, func, help_text, pfa=False, json_flag=False)
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--seed", type=int, help=f"master seed (default: config value or {DEFAULT_SEED})")
        p.add_argument("--out", help="CSV path (default: config output or stdout)")
        if name == "sweep":
            p.add_argument("--n", required=True, help="comma-separated n values")

    p = command("make-pfa", cmd_make_pfa, "write a binary edit-operation PFA", pfa=False, json_flag=False)
    p.add_argument("kind", choices=("sub", "ins", "del", "convex"))
    p.add_argument("--p", type=float, help="edit probability (sub, ins, del)")
    p.add_argument("--q", type=float, help="insertion continuation probability (ins)")
    p.add_argument("--weights", type=float, nargs=3, metavar=("V_SUB", "V_INS", "V_DEL"))
    p.add_argument("--p-sub", type=float, default=0.5)
    p.add_argument("--p-ins", type=float, default=0.5)
    p.add_argument("--q-ins", type=float, default=0.5)
    p.add_argument("--p-del", type=float, default=0.5)
    p.add_argument("--out", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TrieSmoothError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

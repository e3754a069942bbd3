"""Command-line front end.

Exit codes:
  0  success
  2  unreadable input (bad edge list, weights file or flag value)
  3  instance above a size cap
  4  some grid point could not be certified (the report is still written)
  5  weights are not a fractional matching
  6  FPTAS/oracle ratio above (1 + epsilon) after discretization slack
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .erm import (
    SyntheticInstance,
    all_symmetric_hypotheses,
    bayes_rule,
    excess_risk_experiment,
    random_instance,
)
from .errors import (
    DeltaOutOfRange,
    GraphError,
    NetWeightError,
    NotAMatching,
    TooLarge,
    WeightError,
)
from .graph import CHROMATIC_MAX_EDGES, DataGraph, graph_stats, match_star_plus_matching, parse_edge_list
from .solver import FptasConfig, brute_force_optimum, run_fptas
from .solver.oracle import ORACLE_MAX_EDGES
from .weights import (
    BoundParams,
    as_matching,
    chromatic_bound_order,
    delta_threshold,
    equal_distribution,
    equal_weighting_bound_order,
    fmt_real,
    matching_from_distribution,
    objective,
    theorem1_bound,
    weights_from_csv,
    weights_from_json,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SIZE = 3
EXIT_NOT_CONVERGED = 4
EXIT_NOT_MATCHING = 5
EXIT_RATIO = 6


class _Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _load_graph(path: str) -> DataGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_INPUT, f"cannot read graph: {exc}") from None
    return parse_edge_list(text)


def _params(args) -> BoundParams:
    return BoundParams(beta=args.beta, delta=args.delta)


def _config(args) -> FptasConfig:
    return FptasConfig(epsilon=args.epsilon, seed=args.seed)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2)


def _reals(values) -> list:
    return [fmt_real(x) for x in values]


# -- commands ------------------------------------------------------------------

def cmd_info(args) -> int:
    g = _load_graph(args.graph)
    want = args.chromatic == "always" or (args.chromatic == "auto" and g.m <= args.chromatic_cap)
    if want and g.m > args.chromatic_cap:
        raise TooLarge(f"chromatic index needs m <= {args.chromatic_cap}, got {g.m}")
    st = graph_stats(g, compute_chromatic=want, max_edges=args.chromatic_cap)
    doc = {"n": st.num_vertices, "m": st.num_edges, "max_degree": st.max_degree,
           "nu_star": fmt_real(st.fractional_matching_number)}
    if st.fractional_edge_chromatic is not None:
        doc["chi_star"] = fmt_real(st.fractional_edge_chromatic)
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_optimize(args) -> int:
    g = _load_graph(args.graph)
    params = _params(args)
    res = run_fptas(g, params, _config(args), threads=args.threads)
    w = matching_from_distribution(g, res.best.p)
    doc = res.to_dict()
    doc["matching"] = _reals(w)
    doc["theorem1_bound"] = fmt_real(theorem1_bound(g, w, params))
    _emit(args, _dump(doc))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _equal_order(g, params):
    try:
        return fmt_real(equal_weighting_bound_order(g, params))
    except DeltaOutOfRange:
        return "out of range"


def cmd_equal(args) -> int:
    g = _load_graph(args.graph)
    params = _params(args)
    p = equal_distribution(g)
    w = matching_from_distribution(g, p)
    doc = {"objective": fmt_real(objective(g, p, params)),
           "p": _reals(p), "matching": _reals(w),
           "theorem1_bound": fmt_real(theorem1_bound(g, w, params)),
           "equal_weighting_bound_order": _equal_order(g, params)}
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = _load_graph(args.graph)
    params = _params(args)
    try:
        text = Path(args.weights).read_text()
    except OSError as exc:
        raise _Exit(EXIT_INPUT, f"cannot read weights: {exc}") from None
    is_csv = args.weights_format == "csv" or (
        args.weights_format == "auto" and args.weights.lower().endswith(".csv"))
    w = weights_from_csv(g, text) if is_csv else weights_from_json(g, text)
    w = as_matching(g, w)
    chrom = None
    if g.m <= args.chromatic_cap:
        chrom = fmt_real(chromatic_bound_order(g, args.chromatic_cap))
    doc = {"theorem1_bound": fmt_real(theorem1_bound(g, w, params)),
           "equal_weighting_bound_order": _equal_order(g, params),
           "chromatic_bound_order": chrom,
           "delta_threshold": fmt_real(delta_threshold(g, w))}
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _load_graph(args.graph)
    if g.m > ORACLE_MAX_EDGES:
        raise TooLarge(f"oracle handles at most {ORACLE_MAX_EDGES} edges, got {g.m}")
    params = _params(args)
    orc = brute_force_optimum(g, params, args.resolution)
    res = run_fptas(g, params, _config(args), threads=args.threads)
    ratio = res.best.objective / orc.value
    limit = (1.0 + args.epsilon) * (1.0 + orc.slack / orc.value)
    doc = {"oracle_value": fmt_real(orc.value), "oracle_p": _reals(orc.p),
           "slack": fmt_real(orc.slack), "fptas_value": fmt_real(res.best.objective),
           "fptas_p": _reals(res.best.p), "ratio": fmt_real(ratio),
           "ratio_limit": fmt_real(limit), "within_limit": bool(ratio <= limit)}
    _emit(args, _dump(doc))
    if ratio > limit:
        return EXIT_RATIO
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    params = _params(args)
    if args.instance:
        try:
            text = Path(args.instance).read_text()
        except OSError as exc:
            raise _Exit(EXIT_INPUT, f"cannot read instance: {exc}") from None
        try:
            inst = SyntheticInstance.from_json(text)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise _Exit(EXIT_INPUT, f"bad instance file: {exc}") from None
    else:
        inst = random_instance(args.domain_size, seed=args.seed)
    if args.hypotheses == "bayes":
        hyps = [bayes_rule(inst)]
    else:
        hyps = all_symmetric_hypotheses(inst.D, cap=args.hypothesis_cap, seed=args.seed)
    res = run_fptas(g, params, _config(args), threads=args.threads)
    w_fptas = matching_from_distribution(g, res.best.p)
    schemes = [("equal", np.ones(g.m)), ("fptas", w_fptas)]
    star = match_star_plus_matching(g)
    if star is not None:
        schemes.append(("hand-star", star))
    if args.subsample:
        schemes.append(("fptas-subsample", _subsample_scheme(res.best.p, args.subsample)))
    out = excess_risk_experiment(inst, g, hyps, schemes, args.trials, seed=args.seed)
    if args.format == "json":
        doc = {"instance": json.loads(inst.to_json()),
               "rows": [{"scheme": s, "trials": t, "mean_excess_risk": fmt_real(mu),
                         "std_excess_risk": fmt_real(sd)} for s, t, mu, sd in out.rows()]}
        _emit(args, _dump(doc))
    else:
        _emit(args, out.to_csv())
    return EXIT_OK


def _subsample_scheme(p, N):
    # ERM on N edges drawn iid from p equals weighted ERM with the draw counts
    p = np.asarray(p, dtype=float)

    def draw(rng):
        return rng.multinomial(N, p / p.sum()).astype(float)

    return draw


# -- parser ----------------------------------------------------------------------

def _unit_interval(lo_open):
    def parse(text):
        x = float(text)
        if lo_open and not 0.0 < x <= 1.0:
            raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
        if not lo_open and not 0.0 <= x < 1.0:
            raise argparse.ArgumentTypeError(f"{text} is not in [0, 1)")
        return x
    return parse


def _positive(kind):
    def parse(text):
        x = kind(text)
        if not x > 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return x
    return parse


def _nonnegative_int(text):
    x = int(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"{text} must be nonnegative")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netweight",
        description="Weighting schemes for learning from networked examples.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bounds=True, solver=False):
        p.add_argument("--graph", required=True,
                       help="edge list: optional 'n <count>' header, then 'u v' per line, '#' comments")
        p.add_argument("--out", help="write the report here instead of standard output")
        p.add_argument("--seed", type=_nonnegative_int, default=0)
        if bounds:
            p.add_argument("--beta", type=_unit_interval(False), default=0.0,
                           help="low-noise exponent in [0, 1) (default 0)")
            p.add_argument("--delta", type=_unit_interval(True), default=1.0,
                           help="confidence parameter in (0, 1] (default 1)")
        if solver:
            p.add_argument("--epsilon", type=_positive(float), default=0.1,
                           help="relative accuracy of the FPTAS (default 0.1)")
            p.add_argument("--threads", type=_positive(int), default=os.cpu_count() or 1,
                           help="concurrent grid-point solves (default: CPU count)")

    p = sub.add_parser("info", help="vertex/edge counts, max degree, nu*, chi*")
    common(p, bounds=False)
    p.add_argument("--chromatic", choices=["auto", "always", "never"], default="auto",
                   help="compute chi* (auto: only when m <= --chromatic-cap)")
    p.add_argument("--chromatic-cap", type=_positive(int), default=CHROMATIC_MAX_EDGES)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("optimize", help="run the FPTAS and report the weighting")
    common(p, solver=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("equal", help="report the equal weighting and its bounds")
    common(p)
    p.set_defaults(func=cmd_equal)

    p = sub.add_parser("bounds", help="evaluate risk bounds for a given weighting")
    common(p)
    p.add_argument("--weights", required=True, help="weights file: JSON {edges, values} or CSV u,v,value")
    p.add_argument("--weights-format", choices=["auto", "json", "csv"], default="auto")
    p.add_argument("--chromatic-cap", type=_positive(int), default=CHROMATIC_MAX_EDGES)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="compare the FPTAS with a brute-force lattice search")
    common(p, solver=True)
    p.add_argument("--resolution", type=float, default=1e-3,
                   help="lattice spacing in [1e-4, 1e-1], 1/resolution integral (default 1e-3)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="excess risk of weighted ERM on synthetic data")
    common(p, solver=True)
    p.add_argument("--trials", type=_positive(int), default=200)
    p.add_argument("--domain-size", type=_positive(int), default=2)
    p.add_argument("--instance", help="JSON instance {D, px, eta, seed}; default: random from --seed")
    p.add_argument("--hypotheses", choices=["all", "bayes"], default="all",
                   help="all symmetric tables (capped) or the Bayes rule alone")
    p.add_argument("--hypothesis-cap", type=_positive(int), default=64)
    p.add_argument("--subsample", type=_positive(int), default=None, metavar="N",
                   help="add a scheme training on N edges drawn from the FPTAS distribution")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except NotAMatching as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_MATCHING
    except (GraphError, WeightError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NetWeightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

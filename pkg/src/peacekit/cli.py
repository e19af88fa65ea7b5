"""Command line entry point: ``peacekit <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import logs
from .graph import (
    adversarial_bipartite,
    cache_dir,
    complete_graph,
    cycle_graph,
    load_graph,
    path_graph,
    petersen_graph,
    random_regular,
    save_graph,
    star_graph,
)
from .peace import PartialColouring, check_proper, greedy_complete, load_colouring, peace_report, save_colouring

log = logging.getLogger("peacekit")


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=1, default=_jsonable)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return str(x)


def _graph_from_family(args):
    fam = args.family
    if fam == "random_regular":
        cdir = cache_dir()
        if cdir:
            p = Path(cdir) / f"random_regular_{args.n}_{args.delta}_{args.seed}.txt"
            if p.exists():
                return load_graph(p), None
        g = random_regular(args.n, args.delta, seed=args.seed)
        if cdir:
            p.parent.mkdir(parents=True, exist_ok=True)
            save_graph(g, p)
        return g, None
    if fam == "adversarial":
        return adversarial_bipartite(args.delta, seed=args.seed)
    makers = {
        "complete": lambda: complete_graph(args.n),
        "cycle": lambda: cycle_graph(args.n),
        "path": lambda: path_graph(args.n),
        "star": lambda: star_graph(args.delta),
        "petersen": petersen_graph,
    }
    return makers[fam](), None


def cmd_gen(args) -> int:
    g, bip = _graph_from_family(args)
    save_graph(g, args.out)
    if bip is not None and args.bipartition_out:
        _emit({"side_a": bip.side_a.tolist(), "side_b": bip.side_b.tolist()}, args.bipartition_out)
    log.info("wrote %d vertices, %d edges, max degree %d", g.n, g.m, g.delta)
    return 0


def cmd_verify(args) -> int:
    g = load_graph(args.graph)
    f = load_colouring(args.colouring)
    rep = peace_report(g, f)
    out = rep.to_json()
    out["total"] = f.is_total
    ok = True
    if args.p is not None:
        out["p"] = args.p
        out["p_peaceful"] = bool(f.is_total and rep.peacefulness <= args.p)
        ok = out["p_peaceful"]
    _emit(out, args.out)
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    from .oracle import certify_no_peaceful, min_peacefulness_exact

    g = load_graph(args.graph)
    c = args.colours if args.colours is not None else g.delta + 1
    p_star, witness = min_peacefulness_exact(g, c, cap=args.cap)
    out = {"p_star": p_star, "witness": witness.to_list(), "colours": c}
    if args.certify is not None:
        out["certify_p"] = args.certify
        out["no_p_peaceful"] = certify_no_peaceful(g, c, args.certify, cap=args.cap)
    _emit(out, args.out)
    return 0


def cmd_oneshot(args) -> int:
    from .oneshot import OneShotParams, as_fraction, oneshot_colour

    g = load_graph(args.graph)
    params = OneShotParams(mu=as_fraction(args.mu), seed=args.seed, max_resample_rounds=args.max_rounds, palette_size=args.palette)
    f, stats = oneshot_colour(g, params)
    save_colouring(f, args.out)
    _emit(stats.to_json(), args.report)
    return 0


def cmd_zcolour(args) -> int:
    from .zcolour import z_pipeline

    g = load_graph(args.graph)
    res = z_pipeline(g, args.epsilon, seed=args.seed, max_rounds=args.max_rounds, strategy=args.strategy)
    save_colouring(res.result.colouring, args.out)
    report = res.result.to_json()
    report.pop("colouring")
    report["z"] = res.z.to_json()
    report["complement"] = res.complement_info
    _emit(report, args.report)
    return 0


def cmd_nibble(args) -> int:
    from .nibble import nibble_colour, postprocess_recolour

    g = load_graph(args.graph)
    f, stats = nibble_colour(g, args.b_const, args.seed, args.policy, max_restarts=args.max_restarts, monitor_sample=args.monitor_sample)
    info = None
    if args.postprocess:
        f, info = postprocess_recolour(g, f, args.c_prime)
    save_colouring(f, args.out)
    report = stats.to_json()
    report["postprocess"] = info
    report["peacefulness"] = peace_report(g, f).peacefulness if f.is_total else None
    _emit(report, args.report)
    return 0


def cmd_star(args) -> int:
    from .nibble import simulate_star

    st = simulate_star(args.delta, args.b_const, args.seed, args.trials)
    out = st.summary()
    out["trace"] = st.trace.to_json()
    _emit(out, args.out)
    return 0


def cmd_trace(args) -> int:
    from .nibble import idealized_trace

    _emit(idealized_trace(args.delta, args.b_const).to_json(), args.out)
    return 0


def cmd_audit(args) -> int:
    from .adversary import audit_subsets, audit_uniqueness, default_subset_size
    from .graph import Bipartition, max_codegree

    if args.graph:
        g = load_graph(args.graph)
        with open(args.bipartition, encoding="utf-8") as fh:
            raw = json.load(fh)
        bip = Bipartition(np.asarray(raw["side_a"], dtype=np.int64), np.asarray(raw["side_b"], dtype=np.int64))
    else:
        g, bip = adversarial_bipartite(args.delta, seed=args.seed)
    if args.colouring:
        f = load_colouring(args.colouring)
    elif args.algorithm == "oneshot":
        from .oneshot import OneShotParams, oneshot_colour

        f = oneshot_colour(g, OneShotParams(seed=args.seed))[0]
    else:
        f = greedy_complete(g, PartialColouring.empty(g.n, g.delta + 1)).colouring
    check_proper(g, f)
    out = {"codegree_max": max_codegree(g), "uniqueness": audit_uniqueness(g, bip, f).to_json()}
    if args.subset_samples:
        size = args.subset_size or default_subset_size(g.delta)
        out["subsets"] = audit_subsets(g, bip, size, args.subset_samples, args.seed).to_json()
    _emit(out, args.out)
    return 0


def cmd_sweep(args) -> int:
    from .bench import load_config, run_experiment

    cfg = load_config(args.config)
    path = run_experiment(cfg, threads=args.threads)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--log-base", choices=("natural", "binary"), default="natural")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="peacekit", description="Peaceful colourings: generators, colourers, verifiers and audits.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a graph file")
    p.add_argument("--family", required=True, choices=("random_regular", "adversarial", "complete", "cycle", "path", "star", "petersen"))
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--bipartition-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="peace report for a colouring")
    p.add_argument("--graph", required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exact minimum peacefulness")
    p.add_argument("--graph", required=True)
    p.add_argument("--colours", type=int)
    p.add_argument("--certify", type=float)
    p.add_argument("--cap", type=int, default=10**8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("oneshot", parents=[common], help="one-shot colouring with resampling")
    p.add_argument("--graph", required=True)
    p.add_argument("--mu", default="1/2")
    p.add_argument("--palette", type=int)
    p.add_argument("--max-rounds", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_oneshot)

    p = sub.add_parser("zcolour", parents=[common], help="two-phase colouring through a sampled Z")
    p.add_argument("--graph", required=True)
    p.add_argument("--epsilon", default="1/8001")
    p.add_argument("--max-rounds", type=int, default=10_000)
    p.add_argument("--strategy", choices=("partial", "local"), default="partial")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_zcolour)

    p = sub.add_parser("nibble-run", parents=[common], help="iterative nibble colouring")
    p.add_argument("--graph", required=True)
    p.add_argument("--b-const", type=float, default=4.0)
    p.add_argument("--policy", choices=("monitor-only", "restart-on-violation"), default="monitor-only")
    p.add_argument("--max-restarts", type=int, default=5)
    p.add_argument("--monitor-sample", type=int, default=64)
    p.add_argument("--postprocess", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--c-prime", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="JSON trace and statistics")
    p.set_defaults(func=cmd_nibble)

    p = sub.add_parser("star-sim", parents=[common], help="Monte Carlo of the star process")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--b-const", type=float, default=4.0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("trace", parents=[common], help="idealized recurrence values")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--b-const", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("audit", parents=[common], help="uniqueness audit of the bipartite construction")
    p.add_argument("--delta", type=int, default=256)
    p.add_argument("--graph")
    p.add_argument("--bipartition")
    p.add_argument("--colouring")
    p.add_argument("--algorithm", choices=("oneshot", "greedy"), default="oneshot")
    p.add_argument("--subset-samples", type=int, default=0)
    p.add_argument("--subset-size", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", parents=[common], help="run a TOML-configured experiment")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    logs.set_log_base(args.log_base)
    if args.threads > 1:
        import numba

        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"peacekit {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

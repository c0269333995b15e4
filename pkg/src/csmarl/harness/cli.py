"""Command-line entry points: train, eval, plot, verify.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import sys

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="csmarl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train per a run-config file")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--out", default=None)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint")
    p_eval.add_argument("--ckpt", required=True)
    p_eval.add_argument("--episodes", type=int, required=True)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--scenario", default=None)
    p_eval.add_argument("--replay-csv", default=None)

    p_plot = sub.add_parser("plot", help="emit SVG curves from metrics files")
    p_plot.add_argument("metrics", nargs="+")
    p_plot.add_argument("--out", required=True)

    p_verify = sub.add_parser("verify", help="run the convergence property suite")
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--gamma", type=float, default=None)
    p_verify.add_argument("--game", default=None,
                          help="solve+verify one game file instead of the full suite")
    return parser


def _cmd_train(args) -> int:
    from .config import load_run_config
    from .train import run_training

    cfg = load_run_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    ckpt, metrics = run_training(cfg)
    print(f"checkpoint: {ckpt}")
    print(f"metrics: {metrics}")
    return 0


def _cmd_eval(args) -> int:
    from .evaluate import evaluate

    row = evaluate(args.ckpt, args.episodes, seed=args.seed, scenario=args.scenario,
                   replay_path=args.replay_csv)
    print(f"episodes: {args.episodes}")
    print(f"return: leader {row.ret1:.3f} follower {row.ret2:.3f}")
    print(f"discounted: leader {row.disc_ret1:.3f} follower {row.disc_ret2:.3f}")
    print(f"cost: leader {row.cost1:.3f} follower {row.cost2:.3f}")
    print(f"collision_rate: {row.collision_rate:.3f}")
    print(f"finish_first: leader {row.leader_first_rate:.2f} follower {row.follower_first_rate:.2f}")
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots

    for path in emit_plots(args.metrics, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    if args.game is not None:
        from .verify import verify_game_file

        sol, ok = verify_game_file(args.game)
        print(f"leader action: {sol.leader_action}  follower action: {sol.follower_action}")
        print(f"values: leader {sol.leader_value:.6g} follower {sol.follower_value:.6g}")
        print(f"feasible: {sol.feasible}  verified: {ok}")
        return 0 if ok or not sol.feasible else 3

    from .verify import verify_appendix

    results = verify_appendix(trials=args.trials, seed=args.seed, gamma=args.gamma)
    width = max(len(r.name) for r in results)
    failed = False
    for r in results:
        status = "pass" if r.ok else "FAIL"
        print(f"{r.name:<{width}}  {r.passed}/{r.total}  {status}")
        failed = failed or not r.ok
    return 3 if failed else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "train": _cmd_train,
        "eval": _cmd_eval,
        "plot": _cmd_plot,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except SystemExit:
        raise
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # runtime failures map to exit 2
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

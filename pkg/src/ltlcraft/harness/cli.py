"""Command line: ``ltlcraft <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 bad data (tasks, maps, runs, games).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..ltl import LTLSyntaxError, TaskFileError, load_tasks, parse, pretty, progress, status_of
from ..transform import GameError, load_game, verify_transformation
from ..world import MapError, adversarial_select, random_map, save_map
from .config import ConfigError, load_config
from .presets import PRESETS, make_experiment, preset_text
from .report import curve_csv, format_summaries, report
from .training import DataError, evaluate_run, train

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_labels(text: str) -> frozenset[str]:
    """``"got_wood,used_toolshed"`` or ``"{got_wood, used_toolshed}"``; empty means no events."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    return frozenset(p.strip() for p in text.split(",") if p.strip())


def _cmd_train(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.no_shaping:
        overrides["shaping"] = False
    if args.no_ltl:
        overrides["ltl_rewards"] = False
    if args.shared_goal:
        overrides["shared_goal"] = True
    if args.paper_literal_always:
        overrides["literal_always"] = True
    if args.output:
        overrides["output"] = args.output
    config = load_config(args.config, **overrides)

    def show(rec):
        print(f"step {rec.step}: total {rec.total:+d}", flush=True)

    result = train(config, run_dir=config.output, progress=None if args.quiet else show)
    final = result.records[-1].total if result.records else "n/a"
    print(f"{config.algorithm} seed {config.seed}: {result.episodes} episodes, "
          f"final total {final}; run written to {result.run_dir}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    rec = evaluate_run(args.run)
    for name, outcome in rec.outcomes.items():
        print(f"{name:<16} {outcome:+d}")
    print(f"{'total':<16} {rec.total:+d}")
    return EXIT_OK


def _cmd_genmap(args) -> int:
    if args.adversarial:
        tasks = load_tasks(args.tasks) if args.tasks else make_experiment(args.preset)
        named = [t for t in tasks if t.name == args.task] if args.task else tasks[:1]
        if not named:
            raise DataError(f"no task named {args.task!r}")
        seeds = range(args.seed, args.seed + args.candidates)
        grid, scored = adversarial_select(
            seeds, named[0].formula, args.width, args.height, n_agents=args.agents
        )
        best = next(c for c in scored if c.seed == grid.seed)
        print(f"# seed {best.seed}: greedy {best.greedy}, optimal {best.optimal}, "
              f"ratio {best.ratio:.3f}", file=sys.stderr)
    else:
        grid = random_map(args.seed, args.width, args.height, n_agents=args.agents)
    if args.output:
        save_map(grid, args.output)
    else:
        sys.stdout.write(grid.to_text())
    return EXIT_OK


def _cmd_tasks(args) -> int:
    sys.stdout.write(preset_text(args.preset))
    return EXIT_OK


def _cmd_prog(args) -> int:
    phi = parse(args.formula)
    sigma = parse_labels(args.labels)
    nxt = progress(sigma, phi, literal_always=args.paper_literal_always)
    print(pretty(nxt))
    print(f"status: {status_of(nxt).value}")
    return EXIT_OK


def _cmd_report(args) -> int:
    summaries = report(args.runs)
    sys.stdout.write(format_summaries(summaries))
    if args.curve:
        Path(args.curve).write_text(curve_csv(summaries), encoding="utf-8")
    return EXIT_OK


def _cmd_verify(args) -> int:
    game = load_game(args.game)
    rep = verify_transformation(game)
    print(f"histories: {rep.n_histories}, Q values compared: {rep.n_q_values}")
    print(f"max |dQ|: {rep.max_abs_diff:.3e}")
    print(f"argmax agreement: {100 * rep.argmax_agreement:.1f}%")
    return EXIT_OK if rep.ok else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ltlcraft", description="Multi-agent crafting with temporal-logic rewards.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train agents from a config file")
    t.add_argument("--config", required=True)
    t.add_argument("--seed", type=int)
    t.add_argument("--output", help="run directory (overrides the config)")
    t.add_argument("--no-shaping", action="store_true", help="drop the evaluation-value shaping term")
    t.add_argument("--no-ltl", action="store_true", help="final-event rewards instead of progression")
    t.add_argument("--shared-goal", action="store_true", help="one goal for all agents")
    t.add_argument("--paper-literal-always", action="store_true",
                   help="use the literal (vacuous) always rule in progression")
    t.add_argument("--quiet", action="store_true")
    t.set_defaults(func=_cmd_train)

    e = sub.add_parser("eval", help="score a finished run greedily on its tasks")
    e.add_argument("--run", required=True)
    e.set_defaults(func=_cmd_eval)

    g = sub.add_parser("genmap", help="print a random or adversarial map")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--width", type=int, default=21)
    g.add_argument("--height", type=int, default=21)
    g.add_argument("--agents", type=int, default=2)
    g.add_argument("--adversarial", action="store_true")
    g.add_argument("--candidates", type=int, default=1000)
    g.add_argument("--task", help="task name scored by the adversarial search")
    g.add_argument("--tasks", help="task file (default: the sequential preset)")
    g.add_argument("--preset", choices=PRESETS, default="sequential")
    g.add_argument("--output")
    g.set_defaults(func=_cmd_genmap)

    k = sub.add_parser("tasks", help="print a preset task file")
    k.add_argument("--preset", choices=PRESETS, required=True)
    k.set_defaults(func=_cmd_tasks)

    r = sub.add_parser("prog", help="progress a formula through one label set")
    r.add_argument("formula")
    r.add_argument("labels", help="comma-separated propositions, e.g. got_wood,used_toolshed")
    r.add_argument("--paper-literal-always", action="store_true")
    r.set_defaults(func=_cmd_prog)

    s = sub.add_parser("report", help="summarize run directories")
    s.add_argument("runs", nargs="+")
    s.add_argument("--curve", help="write the mean reward curve CSV here")
    s.set_defaults(func=_cmd_report)

    v = sub.add_parser("verify-transform", help="compare history and progression Q values on a game")
    v.add_argument("game")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"ltlcraft: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, LTLSyntaxError, TaskFileError, MapError, GameError, OSError) as exc:
        print(f"ltlcraft: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

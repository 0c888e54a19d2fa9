"""Command-line front end.

Subcommands::

    evotransition transition --start S.png --target T.png --out DIR [--scheme asym] ...
    evotransition bench-runtime --scheme asym --sizes 1024,4096,16384 --trials 30
    evotransition bench-drift --scheme standard --fractions 0.9,0.98
    evotransition bench-cover --sizes 8,16,32 --trials 100

Any subcommand accepts ``--config FILE``: a flat ``key = value`` file whose
keys are flag names.  Flags given on the command line win over file values.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import empirics
from .combined import ALTERNATING, EA_WALKS, PURE_WALKS, SCHEMES, OperatorConfig
from .engine import DEFAULT_MILESTONES, FramePolicy, RunConfig, run
from .imaging import ImageIOError, frame_filename, load_image, milestone_filename, save_animation, save_png
from .validation import ConfigurationError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _position(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'i,j', got {text!r}") from None
    return i, j


def _frames(text: str) -> FramePolicy:
    if text == "milestones":
        return FramePolicy.milestones_only()
    if text == "all":
        return FramePolicy.all()
    if text.startswith("every:"):
        try:
            return FramePolicy.every_k(int(text[6:]))
        except (ValueError, ConfigurationError):
            pass
    raise argparse.ArgumentTypeError(f"expected 'milestones', 'all' or 'every:K', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evotransition", description="Evolutionary image transition.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="FILE", help="flat key = value file of flag defaults")
        p.add_argument("--seed", type=int, help="master seed; drawn from entropy and printed when absent")

    t = sub.add_parser("transition", help="transition a start image into a target image")
    common(t)
    t.add_argument("--start", type=Path, help="start image S")
    t.add_argument("--target", type=Path, help="target image T")
    t.add_argument("--out", type=Path, help="output directory")
    t.add_argument("--scheme", choices=SCHEMES, default="asym")
    t.add_argument("--c-s", type=float, dest="c_s")
    t.add_argument("--c-t", type=float, dest="c_t")
    t.add_argument("--t-max", type=int, dest="t_max")
    t.add_argument("--tau", type=int)
    t.add_argument("--max-generations", type=int, dest="max_generations",
                   help="generation budget (default 10*m*n; 0 or less means unbounded)")
    t.add_argument("--milestones", type=_float_list, default=list(DEFAULT_MILESTONES))
    t.add_argument("--snap-final", action="store_true", dest="snap_final")
    t.add_argument("--frames", type=_frames, default=FramePolicy.milestones_only(),
                   help="'milestones', 'all' or 'every:K'")
    t.add_argument("--animation", action="store_true", help="also write animation.png (APNG)")
    t.add_argument("--walk-start", type=_position, dest="walk_start",
                   help="1-based 'i,j' start pixel for pure walks (default: random)")

    br = sub.add_parser("bench-runtime", help="generations-to-completion scaling")
    common(br)
    br.add_argument("--scheme", choices=("asym", "standard"), default="asym")
    br.add_argument("--sizes", type=_int_list, default=[1024, 4096, 16384])
    br.add_argument("--trials", type=int, default=30)
    br.add_argument("--c-s", type=float, dest="c_s", default=1.0)
    br.add_argument("--c-t", type=float, dest="c_t", default=1.0)
    br.add_argument("--workers", type=int, default=1)
    br.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    bd = sub.add_parser("bench-drift", help="one-generation expected fitness gain")
    common(bd)
    bd.add_argument("--scheme", choices=("asym", "standard"), default="asym")
    bd.add_argument("--fractions", type=_float_list, default=[0.5, 0.9])
    bd.add_argument("--size", type=int, default=4096)
    bd.add_argument("--trials", type=int, default=100_000)
    bd.add_argument("--c-s", type=float, dest="c_s", default=1.0)
    bd.add_argument("--c-t", type=float, dest="c_t", default=1.0)
    bd.add_argument("--out", type=Path)

    bc = sub.add_parser("bench-cover", help="uniform-walk cover time on the n x n torus")
    common(bc)
    bc.add_argument("--sizes", type=_int_list, default=[8, 16, 32])
    bc.add_argument("--trials", type=int, default=100)
    bc.add_argument("--workers", type=int, default=1)
    bc.add_argument("--out", type=Path)
    return parser


def read_config(path) -> list[str]:
    """Turn a key = value file into argv tokens."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens += [flag, value]
    return tokens


def _splice_config(argv: list[str]) -> list[str]:
    path = None
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            path = argv[k + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    try:
        tokens = read_config(path)
    except OSError as exc:
        raise ImageIOError(f"cannot read config file {path}: {exc}") from exc
    cmd = next((k for k, tok in enumerate(argv) if tok in COMMANDS), None)
    if cmd is None:
        return argv
    return argv[: cmd + 1] + tokens + argv[cmd + 1 :]


def parse_and_validate(argv=None) -> argparse.Namespace:
    """Parse argv (config file spliced in), apply scheme presets and validate.

    argparse reports its own usage errors by exiting with status 2.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(_splice_config(argv))
    try:
        _validate(ns)
    except UsageError as exc:
        parser.error(str(exc))
    return ns


def _validate(ns: argparse.Namespace) -> None:
    if ns.command == "transition":
        for name in ("start", "target", "out"):
            if getattr(ns, name) is None:
                raise UsageError(f"--{name} is required")
        if ns.t_max is not None and ns.t_max <= 0 and (ns.scheme in EA_WALKS or ns.scheme in ALTERNATING):
            raise UsageError(f"--t-max must be positive for scheme {ns.scheme}, got {ns.t_max}")
        if ns.tau is not None and ns.tau < 1:
            raise UsageError(f"--tau must be >= 1, got {ns.tau}")
        try:
            ns.operator = OperatorConfig.preset(ns.scheme, c_s=ns.c_s, c_t=ns.c_t, t_max=ns.t_max, tau=ns.tau)
        except ConfigurationError as exc:
            raise UsageError(str(exc)) from None
        if ns.walk_start is not None and ns.scheme not in PURE_WALKS:
            raise UsageError("--walk-start only applies to uniform-walk and biased-walk")
    elif ns.command in ("bench-runtime", "bench-cover"):
        if ns.trials < 1:
            raise UsageError(f"--trials must be positive, got {ns.trials}")
    elif ns.command == "bench-drift":
        if ns.trials < 1:
            raise UsageError(f"--trials must be positive, got {ns.trials}")
    if ns.seed is None:
        ns.seed = int(np.random.SeedSequence().entropy)
        print(f"seed: {ns.seed}", file=sys.stderr)


def _transition(ns) -> int:
    start = load_image(ns.start)
    target = load_image(ns.target)
    out: Path = ns.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ImageIOError(f"cannot create output directory {out}: {exc}") from exc

    budget = None
    if ns.max_generations is not None:
        budget = math.inf if ns.max_generations <= 0 else ns.max_generations
    cfg = RunConfig(
        operator=ns.operator,
        seed=ns.seed,
        max_generations=budget,
        milestones=tuple(ns.milestones),
        snap_final=ns.snap_final,
        frame_policy=ns.frames,
        walk_start=ns.walk_start,
    )

    frames = []
    frame_dir = out / "frames"

    def sink(generation, image):
        frame_dir.mkdir(exist_ok=True)
        save_png(image, frame_dir / frame_filename(generation))
        if ns.animation:
            frames.append(image)

    try:
        result = run(start, target, cfg, frame_sink=sink if ns.frames.every else None)
        for fraction, (generation, image) in sorted(result.milestone_frames.items()):
            save_png(image, out / milestone_filename(fraction, generation))
        with open(out / "metrics.csv", "w", newline="") as fh:
            result.metrics.write_csv(fh)
        if ns.animation:
            if not frames:
                frames = [start] + [im for _, (_, im) in sorted(result.milestone_frames.items())]
                frames.append(result.final_image)
            save_animation(frames, out / "animation.png")
        summary = {
            "seed": result.seed,
            "scheme": ns.scheme,
            "c_s": ns.operator.asym.c_s,
            "c_t": ns.operator.asym.c_t,
            "t_max": ns.operator.t_max,
            "tau": ns.operator.tau,
            "generations": result.generations,
            "completed": result.completed,
            "snapped": result.snapped,
            "final_fitness": result.final_state.count_t,
            "pixels": result.final_state.size,
            "milestones": {f"{f:g}": g for f, (g, _) in sorted(result.milestone_frames.items())},
        }
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ImageIOError(f"cannot write output: {exc}") from exc
    print(
        f"{ns.scheme}: {result.generations} generations, "
        f"{result.final_state.count_t}/{result.final_state.size} pixels in target"
        + (" (complete)" if result.completed else "")
    )
    return EXIT_OK


def _open_out(path):
    if path is None:
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def _bench_runtime(ns) -> int:
    params = empirics.AsymmetricParams(ns.c_s, ns.c_t) if ns.scheme == "asym" else None
    report = empirics.measure_runtime_scaling(ns.scheme, ns.sizes, ns.trials, ns.seed, params, ns.workers)
    fh, close = _open_out(ns.out)
    try:
        report.write_csv(fh)
    finally:
        if close:
            fh.close()
    lo, hi = report.slope_ci
    print(f"log-log slope {report.slope:.4f} (95% CI {lo:.4f} .. {hi:.4f})", file=sys.stderr)
    ratios = ", ".join(f"{r:.4f}" for r in report.nlogn_ratios)
    print(f"mean / (n ln n): {ratios}", file=sys.stderr)
    return EXIT_OK


def _bench_drift(ns) -> int:
    params = empirics.AsymmetricParams(ns.c_s, ns.c_t) if ns.scheme == "asym" else None
    fh, close = _open_out(ns.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("scheme", "fraction", "k", "trials", "mean_drift", "ci_low", "ci_high"))
        for fraction in ns.fractions:
            est = empirics.measure_drift(ns.scheme, fraction, ns.trials, ns.seed, ns.size, params)
            writer.writerow((est.scheme, f"{fraction:g}", est.k, est.trials,
                             f"{est.mean:.6g}", f"{est.ci_low:.6g}", f"{est.ci_high:.6g}"))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _bench_cover(ns) -> int:
    fh, close = _open_out(ns.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n", "trials", "mean_steps", "ci_low", "ci_high", "bound_ln", "bound_log2"))
        for n in ns.sizes:
            est = empirics.measure_cover_time(n, ns.trials, ns.seed, ns.workers)
            writer.writerow((n, est.trials, f"{est.mean:.6g}", f"{est.ci_low:.6g}", f"{est.ci_high:.6g}",
                             f"{est.bound_ln:.6g}", f"{est.bound_log2:.6g}"))
    finally:
        if close:
            fh.close()
    return EXIT_OK


COMMANDS = {
    "transition": _transition,
    "bench-runtime": _bench_runtime,
    "bench-drift": _bench_drift,
    "bench-cover": _bench_cover,
}


def execute(ns: argparse.Namespace) -> int:
    try:
        return COMMANDS[ns.command](ns)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ImageIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    try:
        ns = parse_and_validate(argv)
    except ImageIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(ns)


if __name__ == "__main__":
    sys.exit(main())

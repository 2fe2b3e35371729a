"""Command line front end: ``gaussmarkov {fit,simulate,plot,verify}``.

Exit codes: 0 success, 1 failed verification, 2 input error,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .bands import two_sided_z
from .errors import DegenerateBracket, DomainError, InvalidParameter, NotPSD, SingularConditioning
from .io import InputError, parse_grid, read_csv_table, read_matrix, read_observations, write_csv
from .plot import render_svg
from .posterior import Dataset, evaluate_grid, node_posterior
from .processes import parse_model_config
from .simulate import DOUBLING_DESIGN, simulate_path

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

TABLE_HEADER = ["x", "mean", "variance", "lo", "hi"]


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load_model(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_model_config(text)
    except InvalidParameter as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_dataset(args) -> Dataset:
    obs = read_observations(args.data)
    if obs.reordered:
        print(f"note: {args.data}: observations sorted by x", file=sys.stderr)
    n = obs.xs.size
    if args.error_cov:
        cov = read_matrix(args.error_cov, n)
        cov = cov[np.ix_(obs.order, obs.order)]
    elif obs.noise_sd is not None:
        cov = np.diag(obs.noise_sd**2)
    else:
        cov = np.zeros((n, n))
    return Dataset(obs.xs, obs.ys, cov)


def posterior_table(model, data: Dataset, grid, level: float = 0.9, workers: int | None = None):
    """Rows ``(x, mean, variance, lo, hi)`` over ``grid`` in ascending ``x``."""
    grid = np.sort(np.asarray(grid, dtype=float))
    z = two_sided_z(level)
    npost = node_posterior(model, data)
    rows = []
    for p in evaluate_grid(model, npost, data, grid, workers=workers):
        half = z * np.sqrt(p.variance)
        rows.append((p.x, p.mean, p.variance, p.mean - half, p.mean + half))
    return rows


def cmd_fit(args) -> int:
    model = _load_model(args.model_config)
    data = _load_dataset(args)
    grid = parse_grid(args.grid)
    rows = posterior_table(model, data, grid, args.level, workers=args.workers)
    with _output(args.out) as fh:
        write_csv(fh, TABLE_HEADER, rows)
    return EXIT_OK


def _parse_design(text: str) -> np.ndarray:
    try:
        design = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise InputError(f"design {text!r}: expected comma-separated numbers") from None
    if design.size == 0 or np.any(design < 0):
        raise InputError(f"design {text!r}: need at least one location >= 0")
    return np.sort(design)


def cmd_simulate(args) -> int:
    model = _load_model(args.model_config)
    grid = parse_grid(args.grid)
    design = _parse_design(args.design)
    if args.noise_sd < 0:
        raise InputError("--noise-sd must be >= 0")
    cov = args.noise_sd**2 * np.eye(design.size)
    sim = simulate_path(model, grid, design, cov, args.seed)
    with _output(args.out) as fh:
        write_csv(fh, ["x", "f"], zip(sim.grid, sim.path))
    if args.obs_out:
        write_csv(args.obs_out, ["x", "y", "noise_sd"],
                  zip(sim.xs, sim.ys, np.full(design.size, args.noise_sd)))
    return EXIT_OK


def cmd_plot(args) -> int:
    table = read_csv_table(args.table, tuple(TABLE_HEADER))
    kwargs = {}
    if args.path:
        path = read_csv_table(args.path, ("x", "f"))
        kwargs.update(path_x=path["x"], path_y=path["f"])
    if args.data:
        obs = read_observations(args.data)
        kwargs.update(obs_x=obs.xs, obs_y=obs.ys)
    svg = render_svg(table["x"], table["mean"], table["lo"], table["hi"], title=args.title, **kwargs)
    with _output(args.out) as fh:
        fh.write(svg)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    checks = run_checks(trials=args.trials, seed=args.seed, instances=args.instances)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussmarkov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="posterior mean, variance and band on a grid")
    p.add_argument("--model-config", required=True, metavar="PATH")
    p.add_argument("--data", required=True, metavar="PATH", help="CSV with x,y[,noise_sd]")
    p.add_argument("--error-cov", metavar="PATH", help="dense error covariance, overrides noise_sd")
    p.add_argument("--grid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--level", type=float, default=0.9, metavar="P")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="sample a path and noisy observations")
    p.add_argument("--model-config", required=True, metavar="PATH")
    p.add_argument("--grid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--seed", required=True, type=int, metavar="N")
    p.add_argument("--design", default=",".join(f"{x:g}" for x in DOUBLING_DESIGN), metavar="X1,X2,...")
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--out", metavar="PATH", help="path table x,f")
    p.add_argument("--obs-out", metavar="PATH", help="observations x,y,noise_sd")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="render a posterior table as SVG")
    p.add_argument("--table", required=True, metavar="PATH")
    p.add_argument("--path", metavar="PATH")
    p.add_argument("--data", metavar="PATH")
    p.add_argument("--title")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("verify", help="check the engine against independent oracles")
    p.add_argument("--trials", type=int, default=20_000, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--instances", type=int, default=50)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidParameter, DomainError, NotPSD) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularConditioning, DegenerateBracket) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: fit, simulate, pdf, study, returns.

Every run writes a single-line JSON record containing the command, its
inputs, the full estimator configuration, and the seed, so any result can
be replayed exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import cf_estimate, sq_estimate
from .dataio import load_price_csv, to_returns, write_result_record, write_series_csv
from .density import ks_statistic, observed_loglik, pdf_mc
from .em import EMConfig, fit_em
from .params import StableParams
from .rng import RngStream
from .sampling import sample_stable
from .study import desk_grid, load_grid, paper_grid, run_rmse_study, write_study_outputs


def _add_cfg_args(p: argparse.ArgumentParser):
    p.add_argument("--K", type=int, default=100, help="Monte Carlo grid size (K*K latent pairs)")
    p.add_argument("--N", type=int, default=140, help="EM iterations")
    p.add_argument("--N0", type=int, default=100, help="EM burn-in iterations")
    p.add_argument("--M", type=int, default=40, help="SEM cycles per CM-step")
    p.add_argument("--M0", type=int, default=20, help="SEM burn-in cycles")
    p.add_argument("--seed", type=int, default=0)


def _cfg_from(args) -> EMConfig:
    return EMConfig(K=args.K, N=args.N, N0=args.N0, M=args.M, M0=args.M0, seed=args.seed)


def _record_path(args, default_stem: str) -> Path:
    if args.record is not None:
        return Path(args.record)
    return Path(f"{default_stem}.record.json")


def _load_returns(args) -> np.ndarray:
    series = load_price_csv(args.input, args.column)
    if args.returns:
        return series.prices  # column already holds returns
    return to_returns(series).returns


def _cmd_fit(args) -> int:
    data = _load_returns(args)
    cfg = _cfg_from(args)
    init = None
    if args.alpha0 is not None:
        init = StableParams(args.alpha0, args.beta0, args.sigma0, args.mu0)
    if args.method == "em":
        result = fit_em(data, init=init, cfg=cfg)
        params, loglik, ks = result.params, result.loglik, result.ks
    else:
        est = sq_estimate(data) if args.method == "sq" else cf_estimate(data)
        base = RngStream(cfg.seed, 1)
        loglik = observed_loglik(data, est, cfg.K, base.child(0))
        ks = ks_statistic(data, est, cfg.cdf_sample_size, base.child(1))
        params = est
    a, b, s, m = params.as_tuple()
    print(f"{'method':>8} {'alpha':>9} {'beta':>9} {'sigma':>11} {'mu0':>11} "
          f"{'loglik':>12} {'KS':>8}")
    print(f"{args.method:>8} {a:9.5f} {b:9.5f} {s:11.7f} {m:11.7f} {loglik:12.3f} {ks:8.5f}")
    record = {
        "command": "fit",
        "version": __version__,
        "input": str(args.input),
        "column": args.column,
        "returns_given": bool(args.returns),
        "method": args.method,
        "init": None if init is None else init.as_tuple(),
        "config": dataclasses.asdict(cfg),
        "estimate": {"alpha": a, "beta": b, "sigma": s, "mu0": m},
        "loglik": loglik,
        "ks": ks,
    }
    write_result_record(_record_path(args, f"fit_{args.method}"), record)
    return 0


def _cmd_simulate(args) -> int:
    params = StableParams(args.alpha, args.beta, args.sigma, args.mu0)
    draws = sample_stable(params, args.n, RngStream(args.seed))
    write_series_csv(args.out, "value", draws)
    record = {
        "command": "simulate",
        "version": __version__,
        "params": params.as_tuple(),
        "n": args.n,
        "seed": args.seed,
        "out": str(args.out),
    }
    write_result_record(_record_path(args, Path(args.out).stem), record)
    return 0


def _cmd_pdf(args) -> int:
    params = StableParams(args.alpha, args.beta, args.sigma, args.mu0)
    ys = np.linspace(args.from_, args.to, args.points)
    dens = pdf_mc(ys, params, args.K, RngStream(args.seed))
    with open(args.out, "w") as fh:
        fh.write("y,density\n")
        for y, d in zip(ys, dens):
            fh.write(f"{y!r},{d!r}\n")
    record = {
        "command": "pdf",
        "version": __version__,
        "params": params.as_tuple(),
        "grid": [args.from_, args.to, args.points],
        "K": args.K,
        "seed": args.seed,
        "out": str(args.out),
    }
    write_result_record(_record_path(args, Path(args.out).stem), record)
    return 0


def _cmd_study(args) -> int:
    if args.grid is not None:
        grid = load_grid(args.grid)
    elif args.full:
        grid = paper_grid()
    else:
        grid = desk_grid()
    if args.full and args.grid is not None:
        print("note: --grid overrides --full", file=sys.stderr)
    cells = run_rmse_study(grid, workers=args.workers, progress=lambda msg: print(msg, file=sys.stderr))
    paths = write_study_outputs(cells, grid, args.out)
    for p in paths:
        print(f"wrote {p}")
    record = {
        "command": "study",
        "version": __version__,
        "grid": {
            "alphas": list(grid.alphas),
            "betas": list(grid.betas),
            "sigmas": list(grid.sigmas),
            "mu0": grid.mu0,
            "n": grid.n,
            "replicates": grid.replicates,
            "methods": list(grid.methods),
            "seed": grid.seed,
        },
        "config": dataclasses.asdict(grid.cfg),
        "out": str(args.out),
    }
    write_result_record(_record_path(args, Path(args.out) / "study"), record)
    return 0


def _cmd_returns(args) -> int:
    series = load_price_csv(args.input, args.column)
    returns = to_returns(series)
    write_series_csv(args.out, returns.name, returns.returns)
    record = {
        "command": "returns",
        "version": __version__,
        "input": str(args.input),
        "column": args.column,
        "n_prices": int(series.prices.size),
        "n_returns": int(returns.returns.size),
        "out": str(args.out),
    }
    write_result_record(_record_path(args, Path(args.out).stem), record)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablefit",
        description="EM-based estimation for alpha-stable distributions",
    )
    parser.add_argument("--record", default=None, help="path of the JSON run record")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="estimate stable parameters from a CSV column")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--method", choices=("em", "sq", "cf"), default="em")
    p.add_argument(
        "--returns",
        action="store_true",
        help="column already holds returns (default: prices, transformed first)",
    )
    p.add_argument("--alpha0", type=float, default=None, help="initial alpha (EM)")
    p.add_argument("--beta0", type=float, default=0.0)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--mu0", type=float, default=0.0)
    _add_cfg_args(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="draw stable variates to CSV")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("pdf", help="tabulate the Monte Carlo density")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--from", dest="from_", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--K", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pdf)

    p = sub.add_parser("study", help="run the RMSE comparison study")
    p.add_argument("--grid", default=None, help="JSON grid config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--full", action="store_true", help="full reference design")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("returns", help="apply the price-to-return transform")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_returns)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

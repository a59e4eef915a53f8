"""
Command-line entry points: dataset generation, interpolation sweeps,
distances, sampling runs and evaluation reports.

Exit codes: 0 on success, 2 for input or configuration problems, 3 when a
mathematical precondition fails (disconnected graph at nu=0, non-PSD
input, a velocity requested at t too close to 1, and the like).

All randomness descends from the manifest/config seed through named
substreams, so re-running any command with the same inputs reproduces its
outputs byte for byte. CSV files are the plotting surface; nothing here
draws.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    ReferenceDistribution,
    draw_reference,
    er_sample,
    estimate_marginal,
    sbm_sample,
    tree_sample,
)
from .denoiser import KnnDenoiser, OracleDenoiser
from .flow import FlowConfig, load_flow_config, sample
from .graph import (
    DisconnectedGraph,
    Graph,
    SingularCovariance,
    load_graph,
    load_graphs,
    mrf_from_graph,
    save_graphs,
)
from .interp import InterpScheme, path_sweep
from .linalg import NotPSD, SymmetryViolation
from .metric import graph_bw_terms
from .stats import (
    EvalReport,
    a_ratio,
    always_true,
    default_stats,
    is_connected,
    is_tree,
    median_bandwidth,
    mmd_sq,
    report_csv_rows,
    stat_histogram,
    vun,
)
from .velocity import TimeSingularity

MATH_ERRORS = (DisconnectedGraph, SingularCovariance, NotPSD, SymmetryViolation,
               TimeSingularity, FloatingPointError)

VALIDITY_ORACLES = {"any": always_true, "connected": is_connected, "tree": is_tree}


def substream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Named RNG substream: independent of every other (name, index)."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode()), int(index)])


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: dict,
                    outputs: dict, seed) -> None:
    _write_json(out_dir / "run_manifest.json", {
        "command": command,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "seed": seed,
        "version": __version__,
    })


def cmd_generate(args) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    kind = manifest["kind"]
    params = manifest.get("params", {})
    count = int(manifest["count"])
    seed = int(manifest["seed"])
    test_count = int(manifest.get("test_count", 0))
    if kind not in ("sbm", "tree", "er"):
        raise ValueError(f"unknown dataset kind {kind!r}")

    def make(rng):
        if kind == "sbm":
            return sbm_sample(params["block_sizes"], params["p_in"], params["p_out"], rng)
        if kind == "tree":
            return tree_sample(int(params["n"]), rng)
        return er_sample(int(params["n"]), params["p"], rng)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train = [make(substream(seed, "dataset", i)) for i in range(count)]
    save_graphs(train, out / "train.json")
    outputs = {"train": "train.json"}
    if test_count > 0:
        test = [make(substream(seed, "dataset", count + i)) for i in range(test_count)]
        save_graphs(test, out / "test.json")
        outputs["test"] = "test.json"
    _write_manifest(out, "generate", manifest, {"manifest": str(args.manifest)},
                    outputs, seed)
    return 0


_SCALAR_STATS = ("mean_edge_weight", "degree_hist", "clustering_hist", "spectral_hist")


def _stat_scalar(g: Graph, kind: str) -> float:
    """Scalar path summaries for the sweep CSV: the mean of the per-node
    (or per-edge, or per-eigenvalue) values behind each histogram."""
    if kind == "mean_edge_weight":
        iu = np.triu_indices(g.n, k=1)
        return float(np.mean(g.w[iu])) if iu[0].size else 0.0
    if kind == "degree_hist":
        return float(np.mean(g.w.sum(axis=1)))
    if kind == "clustering_hist":
        a = (g.w > 0.5).astype(float)
        np.fill_diagonal(a, 0.0)
        deg = a.sum(axis=1)
        tri = np.diag(a @ a @ a)
        denom = deg * (deg - 1.0)
        vals = np.where(denom > 0.0, tri / np.where(denom == 0.0, 1.0, denom), 0.0)
        return float(np.mean(vals))
    lap = np.diag(g.w.sum(axis=1)) - g.w
    lam = np.linalg.eigvalsh((lap + lap.T) / 2.0)
    return float(np.mean(lam / lam[-1])) if lam[-1] > 1e-12 else 0.0


def cmd_interpolate(args) -> int:
    g0 = load_graph(args.g0)
    g1 = load_graph(args.g1)
    scheme = InterpScheme(kind=args.scheme, eps=args.eps)
    m0 = mrf_from_graph(g0, nu=args.nu)
    m1 = mrf_from_graph(g1, nu=args.nu)
    points = path_sweep(m0, m1, scheme, args.steps)
    featureless = g0.x is None and g1.x is None

    test = load_graphs(args.test) if args.test else None
    train = load_graphs(args.train) if args.train else None
    descriptors = {d.kind: d for d in default_stats()}
    denominators, sigmas, test_hists = {}, {}, {}
    if test is not None and train is not None:
        for kind, d in descriptors.items():
            test_hists[kind] = [stat_histogram(g, d) for g in test]
            train_h = [stat_histogram(g, d) for g in train]
            sigmas[kind] = median_bandwidth(train_h + test_hists[kind])
            denominators[kind] = max(mmd_sq(train_h, test_hists[kind], sigmas[kind]), 1e-12)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for point in points:
        g_t = Graph(n=g0.n, w=point.w_t,
                    x=None if featureless else point.x_t, discrete=False)
        for kind in _SCALAR_STATS:
            ratio = ""
            if kind in denominators:
                num = mmd_sq([stat_histogram(g_t, descriptors[kind])],
                             test_hists[kind], sigmas[kind])
                ratio = num / denominators[kind]
            rows.append({"t": point.t, "scheme": scheme.kind, "stat": kind,
                         "value": _stat_scalar(g_t, kind), "ratio": ratio})
    with open(out / "curve.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["t", "scheme", "stat", "value", "ratio"])
        writer.writeheader()
        writer.writerows(rows)
    _write_json(out / "path.json", {
        "scheme": scheme.kind,
        "eps": scheme.eps,
        "nu": args.nu,
        "points": [p.to_dict() for p in points],
    })
    _write_manifest(out, "interpolate",
                    {"scheme": scheme.kind, "eps": scheme.eps, "steps": args.steps,
                     "nu": args.nu},
                    {"g0": args.g0, "g1": args.g1, "test": args.test, "train": args.train},
                    {"curve": "curve.csv", "path": "path.json"}, None)
    return 0


def cmd_sample(args) -> int:
    cfg = load_flow_config(args.config)
    train = load_graphs(args.train)
    if not train:
        raise ValueError("empty training set")
    sizes = {g.n for g in train}
    if len(sizes) != 1:
        raise ValueError(f"training graphs must share one size, got {sorted(sizes)}")
    n = sizes.pop()
    k = train[0].x.shape[1] if train[0].x is not None else 0

    if args.target:
        target = load_graph(args.target)
        if target.n != n:
            raise ValueError("target size differs from training size")
        denoiser = OracleDenoiser(target=target)
    else:
        denoiser = KnnDenoiser(train_set=tuple(train), k=args.k)

    if args.ref == "absorbing":
        ref = ReferenceDistribution(kind="absorbing")
    else:
        ref = estimate_marginal(train)

    def run_chain(i: int) -> Graph:
        rng = substream(cfg.seed, "chain", i)
        g0 = draw_reference(ref, n, k, rng)
        return sample(denoiser, g0, cfg, rng)

    threads = int(os.environ.get("BWFLOW_THREADS", "0") or 0)
    if threads <= 0:
        threads = min(8, os.cpu_count() or 1)
    if threads == 1:
        generated = [run_chain(i) for i in range(args.count)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            generated = list(pool.map(run_chain, range(args.count)))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_graphs(generated, out / "samples.json")

    validity = VALIDITY_ORACLES[args.validity]
    vun_triple = vun(generated, train, validity)
    if args.test:
        test = load_graphs(args.test)
        report = a_ratio(generated, test, train)
        report = dataclasses.replace(report, vun=vun_triple)
    else:
        report = EvalReport(per_stat_mmd={}, per_stat_ratio={}, a_ratio=float("nan"),
                            vun=vun_triple)
    _write_json(out / "report.json", report.to_dict())
    with open(out / "report.csv", "w", newline="") as fh:
        csv.writer(fh).writerows(report_csv_rows(report))
    _write_manifest(out, "sample", cfg.to_dict(),
                    {"config": str(args.config), "train": str(args.train),
                     "test": args.test, "target": args.target},
                    {"samples": "samples.json", "report": "report.json"},
                    cfg.seed)
    return 0


def cmd_distance(args) -> int:
    g0 = mrf_from_graph(load_graph(args.g0), nu=args.nu, beta=args.beta)
    g1 = mrf_from_graph(load_graph(args.g1), nu=args.nu, beta=args.beta)
    mean_term, trace_term = graph_bw_terms(g0, g1)
    dist = max(mean_term + args.beta * trace_term, 0.0)
    print(f"distance {dist:.12g}")
    print(f"mean_term {mean_term:.12g}")
    print(f"trace_term {trace_term:.12g}")
    if args.out:
        _write_json(Path(args.out), {
            "distance": dist,
            "mean_term": mean_term,
            "trace_term": trace_term,
            "beta": args.beta,
            "nu": args.nu,
        })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bwflow",
                                     description="Graph flow-matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset from a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("interpolate", help="sweep a path between two graphs")
    p.add_argument("g0")
    p.add_argument("g1")
    p.add_argument("--scheme", default="bw",
                   choices=["bw", "linear", "geometric", "harmonic"])
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--test", default=None, help="test split for MMD ratios")
    p.add_argument("--train", default=None, help="train split for the ratio floor")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("sample", help="generate graphs with a flow config")
    p.add_argument("config")
    p.add_argument("train")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--test", default=None)
    p.add_argument("--target", default=None,
                   help="pin the oracle denoiser to this graph")
    p.add_argument("--k", type=int, default=1, help="kNN denoiser neighbors")
    p.add_argument("--ref", default="marginal", choices=["marginal", "absorbing"])
    p.add_argument("--validity", default="any", choices=sorted(VALIDITY_ORACLES))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("distance", help="distance between two graphs")
    p.add_argument("g0")
    p.add_argument("g1")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_distance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MATH_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

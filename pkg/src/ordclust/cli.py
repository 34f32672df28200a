"""Command-line surface: fitting, benchmarks, demos, verification, exports.

Reports are line-oriented text plus CSV side files so any external tool can
diff or plot them. Every report embeds the resolved configuration and the
exact seed list. Exit codes: 0 success, 2 configuration problems, 3 data
problems, 4 runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import cluster, evaluate, fixtures, metric, oracle, order
from .data import DataError, Dataset, SchemaError, load_csv, load_schema

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

REPORT_NOTES = (
    "objective divisor: number of effective categorical attributes",
    "numerical scaling: min-max onto [0, 1] (mixed pipeline only)",
    "nmi normalizer: arithmetic mean of the two entropies",
    "compactness: natural log; single-valued attributes and empty clusters excluded",
    "order ties: broken by ascending value index; density ranks start at 1",
    "no-probability-weight ablation: distance taken to the cluster's modal value",
)


def _default_outdir() -> Path:
    return Path(os.environ.get("ORDCLUST_OUT", "runs"))


def _resolve_data(data: str, schema: str | None) -> tuple[Path, Path]:
    if data.startswith("fixture:"):
        name = data.split(":", 1)[1]
        return fixtures.fixture_paths(name)
    if schema is None:
        raise SchemaError("--schema is required unless --data uses fixture:<NAME>")
    return Path(data), Path(schema)


def _load(args) -> Dataset:
    data_path, schema_path = _resolve_data(args.data, args.schema)
    missing = tuple(args.missing_token) if args.missing_token else ("",)
    return load_csv(data_path, load_schema(schema_path), args.missing_policy, missing)


def _fit_config(args, seed: int) -> cluster.FitConfig:
    return cluster.FitConfig(
        k=args.k,
        init=args.init,
        order_mode=args.order_mode,
        ablation=args.ablation,
        ordinal_policy=args.ordinal_policy,
        seed=seed,
        max_outer=args.max_outer,
        max_inner=args.max_inner,
        random_order_init=args.random_order_init,
    )


def _run_method(d: Dataset, method: str, k: int, seed: int):
    """One fit of a named benchmark method; returns (Partition, orders, trace)."""
    if method == "kmd":
        part, trace = cluster.fit_kmodes(d, k, seed=seed)
        return part, None, trace
    if method == "kpt":
        part, trace = cluster.fit_kprototypes(d, k, seed=seed)
        return part, None, trace
    if method == "mixed":
        return cluster.fit_mixed(d, cluster.FitConfig(k=k, seed=seed))
    named = {
        "main": {},
        "mode_dist": {"ablation": "no_prob_weight"},
        "single_update": {"ablation": "single_order_update"},
        "hamming": {"ablation": "hamming_only"},
        "learn_nominal_only": {"ordinal_policy": "preserve_ordinal"},
        "no_order_learning": {"ordinal_policy": "preserve_all"},
    }
    if method not in named:
        raise ValueError(f"unknown method {method!r}")
    return cluster.fit(d, cluster.FitConfig(k=k, seed=seed, **named[method]))


def _format_orders(d: Dataset, o: order.OrderSet) -> list[str]:
    lines = []
    for r, name in enumerate(d.cat_names):
        ranks = o.ranks[r]
        if ranks is None:
            lines.append(f"{name}: (no order; match/mismatch distances)")
            continue
        by_rank = np.argsort(np.asarray(ranks), kind="stable")
        scores = o.scores[r] if o.scores is not None else None
        parts = []
        for g in by_rank:
            lit = d.dictionaries[r][g]
            parts.append(f"{lit}({scores[g]:.3f})" if scores is not None else lit)
        lines.append(f"{name}: " + " < ".join(parts))
    return lines


def _write_csv(path: Path, header: list[str], rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _seed_list(base: int, runs: int) -> list[int]:
    return [base + i for i in range(runs)]


def cmd_fit(args) -> int:
    d = _load(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = _seed_list(args.seed, args.runs)

    per_seed, traces, results = [], [], []
    for seed in seeds:
        cfg = _fit_config(args, seed)
        res = cluster.fit_mixed(d, cfg) if args.mixed else cluster.fit(d, cfg)
        results.append(res)
        traces.append(res.trace)
        per_seed.append(evaluate.score(d, res.partition, d.labels))
    report = evaluate.aggregate(per_seed)
    best = min(range(len(results)), key=lambda i: results[i].trace.best_objective)

    lines = ["run report", "=" * 60]
    lines.append(f"dataset: {args.data} (n={d.n}, categorical={d.s_categorical}, numerical={d.s_numerical})")
    if d.degenerate:
        lines.append("degenerate columns (excluded from clustering): "
                     + ", ".join(f"{c.name}={c.value!r}" for c in d.degenerate))
    else:
        lines.append("degenerate columns: none")
    lines.append(
        f"config: k={args.k} init={args.init} order_mode={args.order_mode} "
        f"ablation={args.ablation} ordinal_policy={args.ordinal_policy} "
        f"mixed={args.mixed} max_outer={args.max_outer} max_inner={args.max_inner} "
        f"random_order_init={args.random_order_init}"
    )
    lines.append(f"seeds: {', '.join(map(str, seeds))}")
    lines.append("notes:")
    lines.extend(f"  - {n}" for n in REPORT_NOTES)
    lines.append("")
    lines.append("per-seed metrics:")
    lines.append("  seed      ca      ari      nmi      cmp  objective  iters  updates  eff_k")
    for seed, m, res in zip(seeds, per_seed, results):
        tr = res.trace
        lines.append(
            f"  {seed:4d}  {m.ca:.4f}  {m.ari:+.4f}  {m.nmi:.4f}  {m.cmp:.4f}  "
            f"{tr.best_objective:9.4f}  {tr.total_inner_iterations:5d}  "
            f"{tr.accepted_order_updates:7d}  {res.partition.effective_k:5d}"
        )
    lines.append("")
    lines.append(
        f"aggregate: ca {report.mean.ca:.4f}±{report.std.ca:.4f}  "
        f"ari {report.mean.ari:.4f}±{report.std.ari:.4f}  "
        f"nmi {report.mean.nmi:.4f}±{report.std.nmi:.4f}  "
        f"cmp {report.mean.cmp:.4f}±{report.std.cmp:.4f}"
    )
    lines.append(f"best objective: {results[best].trace.best_objective:.6f} (seed {seeds[best]})")
    lines.append("")
    lines.append(f"learned orders (seed {seeds[best]}):")
    lines.extend("  " + s for s in _format_orders(d, results[best].orders))

    (outdir / "report.txt").write_text("\n".join(lines) + "\n")
    _write_csv(
        outdir / "metrics.csv",
        ["seed", "ca", "ari", "nmi", "cmp", "objective", "inner_iterations", "order_updates"],
        [
            [seed, m.ca, m.ari, m.nmi, m.cmp, tr.best_objective, tr.total_inner_iterations,
             tr.accepted_order_updates]
            for seed, m, tr in zip(seeds, per_seed, traces)
        ],
    )
    if args.export_trace:
        rows = []
        for seed, tr in zip(seeds, traces):
            marks = set(tr.order_update_iterations)
            for i, l in enumerate(tr.objective_values):
                rows.append([seed, i + 1, f"{l:.10g}", 1 if i in marks else 0])
        _write_csv(outdir / "trace.csv", ["seed", "iteration", "objective", "order_update"], rows)
    if args.export_orders:
        (outdir / "orders.txt").write_text("\n".join(_format_orders(d, results[best].orders)) + "\n")
    if args.export_distances:
        mat = metric.pairwise_distance_matrix(d, results[best].orders)
        _write_csv(outdir / "distances.csv", [f"s{i}" for i in range(d.n)],
                   [[f"{x:.6g}" for x in row] for row in mat])
    print(f"report written to {outdir / 'report.txt'}")
    print(
        f"aggregate: ca {report.mean.ca:.4f}±{report.std.ca:.4f}  "
        f"ari {report.mean.ari:.4f}±{report.std.ari:.4f}"
    )
    return EXIT_OK


def cmd_demo_orders(args) -> int:
    d = _load(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if d.labels is None:
        raise DataError("the order demo needs ground-truth labels")
    rows = []

    def ca_of(part):
        return evaluate.clustering_accuracy(part, d.labels)

    wo = []
    for i in range(args.wo_seeds):
        wo.append(ca_of(cluster.fit_fixed_order(d, args.k, None, seed=args.seed + i).partition))
        rows.append(["wo", i, wo[-1]])
    so = None
    try:
        so_orders = order.semantic_orders(d)
        so = []
        for i in range(args.so_seeds):
            so.append(ca_of(cluster.fit_fixed_order(d, args.k, so_orders, seed=args.seed + i).partition))
            rows.append(["so", i, so[-1]])
    except ValueError:
        pass
    rng = np.random.default_rng(args.seed)
    ro = []
    for i in range(args.ro_draws):
        draw = order.random_orders(d, rng)
        ro.append(ca_of(cluster.fit_fixed_order(d, args.k, draw, seed=args.seed + i).partition))
        rows.append(["ro", i, ro[-1]])
    overlay = []
    for i in range(args.overlay_seeds):
        res = cluster.fit(d, cluster.FitConfig(k=args.k, seed=args.seed + i))
        overlay.append(ca_of(res.partition))
        rows.append(["main", i, overlay[-1]])

    _write_csv(outdir / "demo_orders.csv", ["method", "index", "ca"], rows)

    def q(xs, p):
        return float(np.quantile(xs, p))

    lines = ["order demo report", "=" * 60,
             f"dataset: {args.data} (n={d.n}), k={args.k}, base seed {args.seed}",
             f"wo: {args.wo_seeds} runs, mean {np.mean(wo):.4f}"]
    if so is None:
        lines.append("so: inapplicable (no attribute declares a semantic order)")
    else:
        lines.append(f"so: {args.so_seeds} runs, mean {np.mean(so):.4f}")
    lines.append(
        f"ro: {args.ro_draws} draws, quantiles "
        f"p00={min(ro):.4f} p25={q(ro, .25):.4f} p50={q(ro, .5):.4f} "
        f"p75={q(ro, .75):.4f} p100={max(ro):.4f}"
    )
    lines.append(f"main-fit overlay: {args.overlay_seeds} runs, mean {np.mean(overlay):.4f}")
    (outdir / "demo_report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines[2:]))
    return EXIT_OK


def cmd_bench(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    seeds = _seed_list(args.seed, args.runs)

    suite = []
    with open(args.suite, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#") or row[0].strip() == "name":
                continue
            suite.append((row[0].strip(), row[1].strip(), row[2].strip() or None, int(row[3])))

    out_rows = []
    failures = []
    for name, data, schema, k in suite:
        try:
            data_path, schema_path = (
                fixtures.fixture_paths(data.split(":", 1)[1])
                if data.startswith("fixture:")
                else (Path(data), Path(schema))
            )
            d = load_csv(data_path, load_schema(schema_path), args.missing_policy)
            for meth in methods:
                per_seed = []
                for seed in seeds:
                    part, _, _ = _run_method(d, meth, k, seed)
                    per_seed.append(evaluate.score(d, part, d.labels))
                rep = evaluate.aggregate(per_seed)
                out_rows.append([
                    name, meth,
                    f"{rep.mean.ca:.4f}", f"{rep.std.ca:.4f}",
                    f"{rep.mean.ari:.4f}", f"{rep.std.ari:.4f}",
                    f"{rep.mean.nmi:.4f}", f"{rep.std.nmi:.4f}",
                    f"{rep.mean.cmp:.4f}", f"{rep.std.cmp:.4f}",
                ])
        except Exception as exc:  # keep the suite going, record the failure
            failures.append((name, str(exc)))
            out_rows.append([name, "ERROR", str(exc)] + [""] * 7)
    _write_csv(
        outdir / "benchmark_matrix.csv",
        ["dataset", "method", "ca_mean", "ca_std", "ari_mean", "ari_std",
         "nmi_mean", "nmi_std", "cmp_mean", "cmp_std"],
        out_rows,
    )
    print(f"benchmark matrix written to {outdir / 'benchmark_matrix.csv'}")
    for name, msg in failures:
        print(f"warning: {name} failed: {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_ablate(args) -> int:
    args.methods = "main,mode_dist,single_update,hamming"
    suite_path = Path(args.out) / "_ablate_suite.csv"
    Path(args.out).mkdir(parents=True, exist_ok=True)
    data_path, schema_path = _resolve_data(args.data, args.schema)
    with open(suite_path, "w", newline="") as fh:
        csv.writer(fh).writerow([args.name, str(data_path), str(schema_path), args.k])
    args.suite = str(suite_path)
    return cmd_bench(args)


def cmd_bench_efficiency(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    points = [int(p) for p in args.points.split(",")]
    rows = cluster.efficiency_bench(
        args.axis, points, n=args.n, s=args.s, k=args.k,
        values_per_attribute=args.values, seed=args.seed,
    )
    _write_csv(
        outdir / "efficiency.csv",
        ["n", "s", "k", "wall_time_s", "inner_iterations", "epochs"],
        [[r.n, r.s, r.k, f"{r.wall_time:.4f}", r.inner_iterations, r.epochs] for r in rows],
    )
    for r in rows:
        print(f"n={r.n} s={r.s} k={r.k}: {r.wall_time:.3f}s ({r.inner_iterations} iterations)")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = oracle.verify_suite(rounds=args.rounds, seed=args.seed)
    failed = False
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed |= not ok
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_export_distances(args) -> int:
    d = _load(args)
    out = Path(args.out_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.order_mode == "learned":
        res = cluster.fit(d, cluster.FitConfig(k=args.k, seed=args.seed))
        orders = res.orders
    elif args.order_mode == "hamming":
        orders = order.hamming_orders(d)
    else:
        orders = order.dictionary_orders(d)
    mat = metric.pairwise_distance_matrix(d, orders)
    _write_csv(out, [f"s{i}" for i in range(d.n)], [[f"{x:.6g}" for x in row] for row in mat])
    print(f"{d.n}x{d.n} distance matrix written to {out}")
    return EXIT_OK


def _add_data_args(p, schema_required=False):
    p.add_argument("--data", required=True, help="CSV path, or fixture:<NAME> for a bundled dataset")
    p.add_argument("--schema", default=None, required=schema_required, help="schema file path")
    p.add_argument("--missing-policy", default="drop_row", choices=("drop_row", "error"))
    p.add_argument("--missing-token", action="append", default=None,
                   help="cell literal treated as missing (repeatable; default: empty cell)")


def _add_fit_args(p):
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--init", default="kmodes_once", choices=cluster.INITS)
    p.add_argument("--order-mode", default="learned", choices=cluster.ORDER_MODES[:-1],
                   dest="order_mode")
    p.add_argument("--ablation", default="full", choices=cluster.ABLATIONS)
    p.add_argument("--ordinal-policy", default="learn_all", choices=cluster.ORDINAL_POLICIES,
                   dest="ordinal_policy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-outer", type=int, default=20)
    p.add_argument("--max-inner", type=int, default=200)
    p.add_argument("--random-order-init", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ordclust",
                                 description="Categorical data clustering with learned value orders")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one dataset over multiple seeds and write a report")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--mixed", action="store_true", help="two-stage pipeline for mixed data")
    p.add_argument("--out", default=str(_default_outdir() / "fit"))
    p.add_argument("--export-orders", action="store_true")
    p.add_argument("--export-trace", action="store_true")
    p.add_argument("--export-distances", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("demo-orders", help="order-impact demonstration: WO/SO/RO plus overlay")
    _add_data_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wo-seeds", type=int, default=100)
    p.add_argument("--so-seeds", type=int, default=100)
    p.add_argument("--ro-draws", type=int, default=1000)
    p.add_argument("--overlay-seeds", type=int, default=10)
    p.add_argument("--out", default=str(_default_outdir() / "demo"))
    p.set_defaults(func=cmd_demo_orders)

    p = sub.add_parser("bench", help="benchmark matrix over a dataset suite")
    p.add_argument("--suite", required=True, help="CSV: name,data,schema,k per line")
    p.add_argument("--methods", default="main,kmd")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--missing-policy", default="drop_row", choices=("drop_row", "error"))
    p.add_argument("--out", default=str(_default_outdir() / "bench"))
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ablate", help="compare the fit against its ablation variants")
    _add_data_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--name", default="dataset")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=str(_default_outdir() / "ablate"))
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("bench-efficiency", help="wall-time scaling sweep on synthetic data")
    p.add_argument("--axis", default="n", choices=("n", "s", "k"))
    p.add_argument("--points", default="10000,20000,30000,40000,50000,60000,70000,80000,90000,100000")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--s", type=int, default=20)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--values", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=str(_default_outdir() / "efficiency"))
    p.set_defaults(func=cmd_bench_efficiency)

    p = sub.add_parser("verify", help="run the brute-force equivalence suite")
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-distances", help="write the pairwise sample distance matrix")
    _add_data_args(p)
    p.add_argument("--order-mode", default="learned", choices=("learned", "dictionary", "hamming"),
                   dest="order_mode")
    p.add_argument("--k", type=int, default=2, help="cluster count for learned orders")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-file", default=str(_default_outdir() / "distances.csv"))
    p.set_defaults(func=cmd_export_distances)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())

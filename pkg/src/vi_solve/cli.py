"""``vi-solve`` command-line interface.

Subcommands::

    vi-solve run CONFIG.json --out DIR
    vi-solve plot DIR/aggregate.csv --metric err --out FIG.svg
    vi-solve verify DIR
    vi-solve gen-config --preset {paper-constrained,paper-unconstrained,desk}

Exit codes: 0 success, 2 usage or configuration error, 3 every run
diverged, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import zlib
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bench import METRICS, AggregateResult, ExperimentConfig, preset, run_experiment
from .core import ConfigurationError, FreeSpace
from .metrics import (
    InstrumentationError,
    check_duality_bound,
    check_feasibility,
    check_metric_recurrence,
    check_regret_bound,
    check_vector_regret_bound,
    regret_samples,
)
from .problems import default_domains, instance_from_dict
from .solvers import ALGORITHMS

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_INVARIANT = 0, 2, 3, 4

TRACE_SCHEMA = "# vi-solve trace v1"
AGGREGATE_SCHEMA = "# vi-solve aggregate v1"
INVARIANT_SCHEMA = "# vi-solve invariants v1"
TRACE_COLUMNS = ("experiment_id", "algorithm", "grid_point", "seed", "iteration", "oracle_queries",
                 "err", "err_restricted", "dist_to_solution", "gamma_stat", "wall_ns")
AGGREGATE_COLUMNS = ("experiment_id", "algorithm", "grid_point", "selected", "iteration",
                     "oracle_queries", *(f"{m}_{s}" for m in METRICS for s in ("mean", "std")),
                     "runs_used", "runs_divergent")

log = logging.getLogger("vi_solve")


# ---------------------------------------------------------------------------
# CSV helpers


def fmt(value) -> str:
    """17 significant digits for floats (lossless), plain ints, '' for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def parse_number(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def write_csv(path: Path, schema: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(schema + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def read_csv(path: Path, schema_prefix: str = "# vi-solve") -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(schema_prefix):
            raise ConfigurationError(f"{path}: missing '{schema_prefix}' schema line")
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ConfigurationError(f"{path}: missing header row")
        return header, [dict(zip(header, r)) for r in reader]


def _blank_nan(v: float, applicable: bool) -> Optional[float]:
    return v if applicable else None


def trace_rows(result: AggregateResult):
    cfg = result.config
    err_ok = cfg.domain == "constrained"
    for r in result.runs:
        for i, it in enumerate(r.iterations):
            yield (cfg.experiment_id, r.algorithm, r.grid_value, r.seed_index, it, r.queries[i],
                   _blank_nan(r.metrics["err"][i], err_ok),
                   _blank_nan(r.metrics["err_restricted"][i], not err_ok),
                   r.metrics["dist_to_solution"][i], r.metrics["gamma_stat"][i],
                   None if r.wall_ns is None else r.wall_ns[i])


def aggregate_rows(result: AggregateResult):
    cfg = result.config
    err_ok = cfg.domain == "constrained"
    for c in result.curves:
        sel = result.selections[c.algorithm]
        selected = sel.grid_index is not None and sel.grid_index == c.grid_index
        for i, it in enumerate(c.iterations):
            vals = []
            for m in METRICS:
                ok = not ((m == "err" and not err_ok) or (m == "err_restricted" and err_ok))
                vals += [_blank_nan(c.mean[m][i], ok), _blank_nan(c.std[m][i], ok)]
            yield (cfg.experiment_id, c.algorithm, c.grid_value, selected, it, c.queries_mean[i],
                   *vals, c.runs_used, c.runs_divergent)


def _invariant_columns(dim: int, vector_gamma: bool) -> list[str]:
    cols = ["t"]
    for prefix in ("x", "z", "g", "e"):
        cols += [f"{prefix}{i}" for i in range(dim)]
    cols += [f"gamma{i}" for i in range(dim)] if vector_gamma else ["gamma"]
    return cols


def write_invariants(out: Path, result: AggregateResult) -> list[dict]:
    inv_dir = out / "invariants"
    inv_dir.mkdir(exist_ok=True)
    index = []
    for r in result.runs:
        inv = r.invariants
        if inv is None:
            continue
        name = f"{r.algorithm}__g{r.grid_index}__s{r.seed_index}.csv"
        xs = inv["xs"]
        vector = inv["gammas"].ndim == 2
        cols = _invariant_columns(xs.shape[1], vector)
        gam = inv["gammas"] if vector else inv["gammas"][:, None]
        table = np.hstack([np.arange(xs.shape[0])[:, None], xs, inv["zs"], inv["grads"],
                           inv["extraps"], gam])
        rows = ([int(row[0]), *row[1:]] for row in table)
        write_csv(inv_dir / name, INVARIANT_SCHEMA, cols, rows)
        index.append({"file": f"invariants/{name}", "algorithm": inv["algorithm"],
                      "label": r.algorithm, "eta": inv["eta"], "gamma0": inv["gamma0"],
                      "R_inf": inv["R_inf"], "domain": inv["domain"], "seed_index": r.seed_index})
    return index


# ---------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    path = Path(args.config)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read config {path}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = ExperimentConfig.from_json(text)
    except ConfigurationError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(config, workers=args.workers)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_csv(out / "trace.csv", TRACE_SCHEMA, TRACE_COLUMNS, trace_rows(result))
    write_csv(out / "aggregate.csv", AGGREGATE_SCHEMA, AGGREGATE_COLUMNS, aggregate_rows(result))
    prov = dict(result.provenance)
    if config.record_invariants:
        prov["invariant_runs"] = write_invariants(out, result)
    (out / "provenance.json").write_text(json.dumps(prov, indent=2, sort_keys=True) + "\n")
    for name, sel in result.selections.items():
        print(f"{name}: {sel.status} value={sel.value} final={sel.score:.6g}")
    if result.all_diverged:
        print("error: every run diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# plot


PALETTE_SAT, PALETTE_LIGHT = 0.65, 0.42
LOG_FLOOR = 1e-300


def color_for(name: str) -> str:
    """Deterministic color from a hash of the algorithm name."""
    import colorsys

    hue = (zlib.crc32(name.encode()) % 360) / 360.0
    r, g, b = colorsys.hls_to_rgb(hue, PALETTE_LIGHT, PALETTE_SAT)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def _ticks(lo: float, hi: float, log_scale: bool) -> list[float]:
    if log_scale:
        a, b = math.floor(lo), math.ceil(hi)
        step = max(1, (b - a) // 8 + 1)
        return [float(k) for k in range(a, b + 1, step) if lo - 1e-9 <= k <= hi + 1e-9] or [lo]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / 6
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step) + 1)]


def _tick_label(v: float, log_scale: bool) -> str:
    if log_scale:
        return f"1e{int(round(v))}"
    return f"{v:.4g}"


def render_svg(series: dict, metric: str, log_y: bool, log_x: bool, x_label: str,
               width: int = 820, height: int = 520) -> str:
    """Self-contained SVG with one mean curve and a +-1 std band per series.

    ``series`` maps name -> dict with arrays ``x``, ``mean``, ``std``.
    """
    left, right, top, bottom = 80, 200, 30, 60
    pw, ph = width - left - right, height - top - bottom
    floored = {}
    prepared = {}
    for name in sorted(series):
        s = series[name]
        x = np.asarray(s["x"], dtype=float)
        m = np.asarray(s["mean"], dtype=float)
        sd = np.nan_to_num(np.asarray(s["std"], dtype=float))
        lo, hi = m - sd, m + sd
        flag = False
        if log_y:
            flag = bool(np.any(m <= 0) or np.any(lo <= 0))
            m, lo, hi = (np.log10(np.maximum(v, LOG_FLOOR)) for v in (m, lo, hi))
            flag = flag and bool(np.any(np.asarray(s["mean"]) <= 0))
        if log_x:
            x = np.log10(np.maximum(x, 1.0))
        keep = np.isfinite(x) & np.isfinite(m)
        prepared[name] = (x[keep], m[keep], lo[keep], hi[keep])
        floored[name] = flag
    allx = np.concatenate([p[0] for p in prepared.values()]) if prepared else np.zeros(1)
    ally = np.concatenate([np.concatenate([p[1], p[2], p[3]]) for p in prepared.values()]) \
        if prepared else np.zeros(1)
    ally = ally[np.isfinite(ally)]
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for v in _ticks(y0, y1, log_y):
        y = py(v)
        out.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{_tick_label(v, log_y)}</text>')
    for v in _ticks(x0, x1, log_x):
        x = px(v)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph + 4}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{_tick_label(v, log_x)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle">{x_label}</text>')
    out.append(f'<text x="20" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + ph / 2})">{metric}</text>')
    for k, name in enumerate(sorted(prepared)):
        x, m, lo, hi = prepared[name]
        color = color_for(name)
        if len(x):
            upper = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, hi))
            lower = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[::-1], lo[::-1]))
            out.append(f'<polygon points="{upper} {lower}" fill="{color}" fill-opacity="0.18" stroke="none"/>')
            line = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, m))
            out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        ly = top + 14 + 18 * k
        label = name + (" (zeros floored)" if floored[name] else "")
        out.append(f'<line x1="{left + pw + 12}" y1="{ly - 4}" x2="{left + pw + 32}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly}">{_xml(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _xml(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_plot(args) -> int:
    try:
        header, rows = read_csv(Path(args.aggregate), "# vi-solve aggregate")
    except (OSError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    mean_col, std_col = f"{args.metric}_mean", f"{args.metric}_std"
    if mean_col not in header:
        print(f"error: unknown metric column {args.metric!r}", file=sys.stderr)
        return EXIT_CONFIG
    series: dict = {}
    for row in rows:
        if not args.all_grid and row["selected"] != "1":
            continue
        name = row["algorithm"]
        if args.all_grid and row["grid_point"]:
            name = f"{name} [{row['grid_point']}]"
        mean = parse_number(row[mean_col])
        if mean is None:
            continue
        s = series.setdefault(name, {"x": [], "mean": [], "std": []})
        s["x"].append(float(row["oracle_queries"] if args.per_query else row["iteration"]))
        s["mean"].append(float(mean))
        std = parse_number(row[std_col])
        s["std"].append(0.0 if std is None else float(std))
    if not series:
        print(f"error: metric {args.metric!r} has no values in {args.aggregate}", file=sys.stderr)
        return EXIT_CONFIG
    svg = render_svg(series, args.metric, args.log_y, not args.linear_x,
                     "oracle queries" if args.per_query else "iteration")
    Path(args.out).write_text(svg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


REL_DUALITY = 1e-9
REL_REGRET = 1e-7
REL_RECURRENCE = 1e-9
REL_STEP = 1e-12


class _Trace:
    def __init__(self, xs, zs, grads, extraps, gammas, algorithm):
        self.xs, self.zs, self.grads, self.extraps, self.gammas = xs, zs, grads, extraps, gammas
        self.info = ALGORITHMS[algorithm]
        self.x_bar = xs[1:].mean(axis=0) if len(xs) > 1 else xs[0]


def load_invariant_trace(path: Path, algorithm: str) -> _Trace:
    header, rows = read_csv(path, "# vi-solve invariants")
    if "t" not in header:
        raise InstrumentationError("t")
    dim = sum(1 for h in header if h.startswith("x") and h[1:].isdigit())
    need = [f"{p}{i}" for p in ("x", "z", "g", "e") for i in range(dim)]
    vector = "gamma0" in header and "gamma" not in header
    need += [f"gamma{i}" for i in range(dim)] if vector else ["gamma"]
    missing = [c for c in need if c not in header]
    if missing or dim == 0:
        raise InstrumentationError(missing[0] if missing else "x0")
    table = np.array([[float(r[c]) if r[c] != "" else math.nan for c in need] for r in rows])
    if table.size == 0:
        raise InstrumentationError("rows")
    cols = lambda k: table[:, k * dim:(k + 1) * dim]  # noqa: E731
    gammas = table[:, 4 * dim:] if vector else table[:, 4 * dim]
    return _Trace(cols(0), cols(1), cols(2), cols(3), gammas, algorithm)


def _recompute_steps(trace: _Trace, meta: dict) -> Optional[np.ndarray]:
    """Step sizes implied by the recorded oracle values, or None for fixed steps."""
    info = trace.info
    eta, gamma0 = meta["eta"], meta["gamma0"]
    diff = trace.grads[1:] - trace.extraps[1:]
    if info.metric == "scalar":
        sq = np.concatenate([[0.0], np.cumsum(np.sum(diff * diff, axis=1))])
        return np.sqrt(eta * eta * gamma0 * gamma0 + sq) / eta
    if info.metric == "vector":
        sq = np.vstack([np.zeros(diff.shape[1]), np.cumsum(diff * diff, axis=0)])
        return np.sqrt(eta * eta * gamma0 * gamma0 + sq) / eta
    if info.metric == "movement":
        a = trace.xs[1:] - trace.zs[:-1]
        b = trace.xs[1:] - trace.zs[1:]
        factors = np.sqrt(1.0 + (a * a + b * b) / (2.0 * meta["R_inf"] ** 2))
        return gamma0 * np.vstack([np.ones(diff.shape[1]), np.cumprod(factors, axis=0)])
    return None


def verify_run(trace: _Trace, meta: dict, instance) -> dict[str, tuple[float, float]]:
    """Worst slack and tolerance for every applicable invariant."""
    domain = default_domains(instance)[meta["domain"]]
    R = instance.radius
    scale = R * instance.beta * R
    info = trace.info
    out = {}
    out["feasibility"] = (float(check_feasibility(trace, domain)), 0.0)
    g = np.asarray(trace.gammas)
    if info.metric != "fixed":
        out["step_size_monotone"] = (float(np.max(g[:-1] - g[1:])) if len(g) > 1 else 0.0, 0.0)
        expected = _recompute_steps(trace, meta)
        rel = np.max(np.abs(g - expected) / np.maximum(np.abs(expected), 1e-300))
        out["step_size_recurrence"] = (float(rel), REL_STEP if info.metric != "movement" else 1e-10)
    if info.duality is not None:
        out["duality"] = (check_duality_bound(trace), REL_DUALITY * scale)
    if meta["algorithm"] == "adapeg" and not isinstance(domain, FreeSpace):
        ys = regret_samples(domain, trace, 100, mean_matrix=instance.mean_matrix)
        out["regret"] = (check_regret_bound(trace, domain, ys, meta["eta"], meta["gamma0"], 2.0 * R),
                         REL_REGRET * scale)
    if info.metric == "vector" and meta.get("R_inf") and math.isclose(meta["eta"], meta["R_inf"]) \
            and not isinstance(domain, FreeSpace):
        ys = regret_samples(domain, trace, 100, mean_matrix=instance.mean_matrix)
        out["vector_regret"] = (check_vector_regret_bound(trace, domain, ys, meta["R_inf"],
                                                          np.full(domain.dim, meta["gamma0"])),
                                REL_REGRET * scale)
    if info.metric == "movement":
        worst = check_metric_recurrence(trace, meta["R_inf"])
        for k, v in worst.items():
            out[f"metric_recurrence_{k}"] = (v, REL_RECURRENCE)
    return out


def cmd_verify(args) -> int:
    target = Path(args.path)
    directory = target.parent if target.is_file() else target
    prov_path = directory / "provenance.json"
    try:
        prov = json.loads(prov_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {prov_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    runs = prov.get("invariant_runs")
    if not runs:
        print("error: trace has no invariant fields (missing field 'invariant_runs'; "
              "rerun with record_invariants = true)", file=sys.stderr)
        return EXIT_CONFIG
    inst_doc = prov["instance"]
    instances = inst_doc if isinstance(inst_doc, list) else None
    shared = None if instances else instance_from_dict(inst_doc)
    worst: dict[str, list] = {}
    failed = False
    for meta in runs:
        instance = shared or instance_from_dict(instances[meta["seed_index"]])
        try:
            trace = load_invariant_trace(directory / meta["file"], meta["algorithm"])
        except InstrumentationError as exc:
            print(f"error: {meta['file']}: missing invariant field {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for name, (slack, tol) in verify_run(trace, meta, instance).items():
            ok = slack <= tol
            failed |= not ok
            cur = worst.get(name)
            if cur is None or slack - tol > cur[0] - cur[1]:
                worst[name] = [slack, tol, meta["file"], ok]
            elif not ok:
                worst[name][3] = False
    for name in sorted(worst):
        slack, tol, where, ok = worst[name]
        status = "ok" if ok else "FAIL"
        print(f"{name:28s} worst={slack:.6g} tol={tol:.3g} {status} ({where})")
    if failed:
        print("invariant violation: " + ", ".join(n for n in sorted(worst) if not worst[n][3]),
              file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen-config


def cmd_gen_config(args) -> int:
    try:
        doc = preset(args.preset, args.setting)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vi-solve", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--workers", type=int, default=None,
                   help="parallel worker processes (default: VI_SOLVE_THREADS or core count)")
    r.set_defaults(func=cmd_run)

    pl = sub.add_parser("plot", help="plot an aggregate CSV as SVG")
    pl.add_argument("aggregate")
    pl.add_argument("--metric", default="err")
    pl.add_argument("--log-y", dest="log_y", action="store_true", default=True)
    pl.add_argument("--linear-y", dest="log_y", action="store_false")
    pl.add_argument("--linear-x", action="store_true", help="linear iteration axis (default log)")
    pl.add_argument("--per-query", action="store_true", help="x-axis counts oracle queries")
    pl.add_argument("--all-grid", action="store_true", help="plot every grid point, not just the selected one")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)

    v = sub.add_parser("verify", help="check recorded invariants")
    v.add_argument("path", help="run directory (or a file inside it)")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen-config", help="print a preset experiment config")
    g.add_argument("--preset", required=True, choices=("paper-constrained", "paper-unconstrained", "desk"))
    g.add_argument("--setting", default="deterministic", choices=("deterministic", "stochastic"))
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen_config)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

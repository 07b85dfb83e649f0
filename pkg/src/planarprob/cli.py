"""Command line entry point: ``planarprob <command> ...``.

Exit status is 0 on success, 1 when a numerical check falls outside its
tolerance and 2 for usage or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .errors import ResourceLimitError, ValidationError
from .schemas import RESULTS_COLUMNS

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE = 0, 1, 2
SEED_ENV = "PLANARPROB_SEED"


class CheckFailed(Exception):
    """A numerical comparison fell outside its tolerance."""


# -- helpers ------------------------------------------------------------------

def parse_real(expr: str) -> float:
    """Positive real from a number or a sympy expression such as ``2*cos(pi/5)``."""
    try:
        value = float(Fraction(expr))
    except ValueError:
        import sympy

        try:
            value = float(sympy.sympify(expr, rational=True).evalf(30))
        except (sympy.SympifyError, TypeError, ValueError):
            raise ValidationError(f"cannot evaluate {expr!r} as a real number") from None
    if not value > 0:
        raise ValidationError(f"{expr} must be positive")
    return value


def parse_orders(text: str) -> tuple[int, ...]:
    try:
        orders = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"order bound {text!r} is not a comma-separated list of integers") from None
    if not orders or any(o < 0 for o in orders):
        raise ValidationError(f"order bound {text!r} must be nonnegative")
    return orders


def load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such file {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def load_config(path: str, threads: int | None = None) -> dict:
    """Run config from a JSON file or a manifest, with the seed override and thread cap applied.

    The returned dict is exactly what the manifest records.
    """
    data = load_json(path)
    if "config_hash" in data and "config" in data:
        data = data["config"]
    data = dict(data)
    if os.environ.get(SEED_ENV):
        try:
            data["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer") from None
    if threads:
        data["workers"] = min(data.get("workers", 1), threads)
    return data


def emit(text: str, out: str | None, manifest) -> None:
    if out:
        Path(out).write_text(text)
        from .manifest import manifest_path

        manifest.finish(out).write(manifest_path(out))
    else:
        sys.stdout.write(text)


def _manifest(config: dict, seed: int | None = None):
    from .manifest import RunManifest

    return RunManifest.start(config, seed)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# -- tl -------------------------------------------------------------------------

def cmd_tl(args) -> int:
    from .diagrams import enumerate_tl

    if args.action == "dim":
        print(len(enumerate_tl(args.k)))
        return EXIT_OK
    if args.action == "gram":
        import numpy as np

        from .tangles import gram_matrix
        from .scalars import delta_eval

        basis = enumerate_tl(args.k)
        G = gram_matrix(args.k)
        rows = [["diagram"] + [d.encode() for d in basis]]
        if args.delta is None:
            rows += [[d.encode()] + [c.format() for c in row] for d, row in zip(basis, G)]
        else:
            delta = parse_real(args.delta)
            M = np.array([[delta_eval(c, delta) for c in row] for row in G])
            eig = np.linalg.eigvalsh(M)[::-1]
            rows += [[d.encode()] + [f"{x:.12g}" for x in row] for d, row in zip(basis, M)]
            rows.append(["eigenvalues"] + [f"{x:.12g}" for x in eig])
        emit(_csv(rows), args.out, _manifest({"command": "tl gram", "k": args.k, "delta": args.delta}))
        return EXIT_OK
    from .tangles import parse_tl_element, trace_tl
    from .scalars import delta_eval

    t = trace_tl(parse_tl_element(args.element))
    print(t.format() if args.delta is None else f"{delta_eval(t, parse_real(args.delta)):.12g}")
    return EXIT_OK


# -- moments ----------------------------------------------------------------------

def cmd_moments(args) -> int:
    from .maps import nc_partition_moments
    from .scalars import delta_eval

    rows = [["p", "moment"]]
    bad = []
    for p in range(1, args.p + 1):
        m = nc_partition_moments(p)
        if args.check:
            from .diagrams import cup
            from .tangles import power, trace_tl

            if trace_tl(power(cup(), p)) != m:
                bad.append(p)
        rows.append([p, m.format() if args.delta is None else f"{delta_eval(m, parse_real(args.delta)):.12g}"])
    emit(_csv(rows), args.out, _manifest({"command": "moments", "p": args.p, "delta": args.delta}))
    if bad:
        raise CheckFailed(f"closure trace differs from the partition count at p={bad}")
    return EXIT_OK


# -- series -------------------------------------------------------------------------

def _body(text: str):
    if "X" in text:
        from .poly import parse_poly

        return parse_poly(text)
    from .tangles import parse_tl_element

    return parse_tl_element(text)


def _series_from_config(cfg: dict):
    from .maps import PotentialTerm, gibbs_series

    try:
        Q = _body(cfg["observable"])
        terms = [PotentialTerm(_body(t["body"]), j) for j, t in enumerate(cfg.get("potential", []))]
        orders = cfg["orders"]
    except KeyError as exc:
        raise ValidationError(f"series config is missing {exc.args[0]!r}") from None
    orders = parse_orders(orders) if isinstance(orders, str) else tuple(orders)
    if any(not isinstance(o, int) or o < 0 for o in orders):
        raise ValidationError(f"invalid order bound {list(orders)}")
    series = gibbs_series(Q, terms, orders, cfg.get("max_total"))
    return Q, terms, orders, series


def cmd_series(args) -> int:
    from .maps import on_model_series

    if args.action == "onmodel":
        from .tangles import parse_tl_element

        orders = parse_orders(args.orders)
        if len(orders) != 2:
            raise ValidationError("onmodel takes exactly two order bounds")
        series = on_model_series(parse_tl_element(args.observable), orders, args.max_total)
        doc = series.to_json()
        doc["potential"] = ["cupcup", "nested"]
        emit(json.dumps(doc, indent=2) + "\n", args.out,
             _manifest({"command": "series onmodel", "orders": list(orders), "observable": args.observable}))
        return EXIT_OK

    cfg = load_config(args.config)
    Q, terms, orders, series = _series_from_config(cfg)
    doc = series.to_json()
    doc["potential"] = [str(t.body) for t in terms]
    failed = False
    if args.oracle:
        from .poly import PolyElement
        from .wick import wick_oracle

        if not isinstance(Q, PolyElement):
            raise ValidationError("--oracle needs a polynomial observable")
        oracle = wick_oracle(Q, terms, orders, cfg.get("max_total"))
        diff = {}
        for mi in series.multi_indices():
            d = oracle.coefficient(mi).coefficient(0) - series.coefficient(mi).coefficient(0)
            if d:
                diff[",".join(map(str, mi))] = str(d)
        doc = {"enumerator": doc, "oracle": oracle.to_json(), "planar_diff": diff}
        failed = bool(diff)
    emit(json.dumps(doc, indent=2) + "\n", args.out, _manifest(cfg))
    if failed:
        raise CheckFailed("planar part of the oracle differs from the enumerator")
    return EXIT_OK


def cmd_onmodel(args) -> int:
    from .maps import on_model_series
    from .scalars import delta_eval
    from .tangles import parse_tl_element

    orders = parse_orders(args.orders)
    if len(orders) != 2:
        raise ValidationError("onmodel takes exactly two order bounds")
    delta = parse_real(args.delta)
    series = on_model_series(parse_tl_element(args.observable), orders)
    rows = [["m1", "m2", "coefficient", "value"]]
    for mi in series.multi_indices():
        c = series.coefficient(mi)
        rows.append([mi[0], mi[1], c.format(), f"{delta_eval(c, delta) if c else 0.0:.12g}"])
    text = _csv(rows)
    if args.betas:
        betas = [float(b) for b in args.betas.split(",")]
        text += f"# jet at beta={betas}: {series.evaluate(betas, delta=delta):.12g}\n"
    emit(text, args.out, _manifest({"command": "onmodel", "orders": list(orders),
                                    "delta": args.delta, "observable": args.observable}))
    return EXIT_OK


# -- rmt and spectrum -------------------------------------------------------------------

_MODE = {"gaussian": "gaussian-poly", "graph": "gaussian-graph"}


def ensemble_from_json(data: dict, mode: str | None = None):
    """Build an :class:`EnsembleConfig` and the observable list from a JSON config."""
    from .ensembles import EnsembleConfig, SamplerConfig

    data = dict(data)
    observables = data.pop("observables", [])
    if mode:
        data["mode"] = mode
    graph_mode = data.get("mode", "").endswith("graph")
    pot = []
    for item in data.pop("potential", []):
        try:
            pot.append((float(item["beta"]), _body(item["body"])))
        except KeyError as exc:
            raise ValidationError(f"potential entry is missing {exc.args[0]!r}") from None
    data["potential"] = pot
    try:
        if "sampler" in data:
            data["sampler"] = SamplerConfig(**data["sampler"])
        cfg = EnsembleConfig(**data)
    except TypeError as exc:
        raise ValidationError(f"bad ensemble config: {exc}") from None
    if graph_mode:
        obs = [_body(o) for o in observables]
    else:
        from .poly import parse_poly

        obs = [parse_poly(o) for o in observables]
    if not obs:
        raise ValidationError("config lists no observables")
    return cfg, obs, observables


def _graph_obs(cfg, obs):
    from .graphs import pf_eigen, tl_to_graph

    pf = pf_eigen(cfg.graph)
    return [tl_to_graph(cfg.graph, pf, o) for o in obs], pf


def run_rmt(kind: str, data: dict):
    from .ensembles import estimate_traces_gaussian, estimate_traces_graph
    from .gibbs import estimate_gibbs

    if kind == "gibbs":
        mode = "gibbs-graph" if data.get("graph") else "gibbs-poly"
    else:
        mode = _MODE[kind]
    cfg, obs, names = ensemble_from_json(data, mode)
    delta = float(cfg.K)
    if cfg.is_graph:
        gobs, pf = _graph_obs(cfg, obs)
        delta = pf.delta
        names = [str(n) for n in names]
        if kind == "gibbs":
            results = estimate_gibbs(gobs, cfg, names)
        else:
            results = estimate_traces_graph(gobs, cfg, names)
    else:
        names = [str(o) for o in obs]
        results = estimate_gibbs(obs, cfg, names) if kind == "gibbs" else estimate_traces_gaussian(obs, cfg, names)
    return cfg, results, delta


def results_csv(cfg, results) -> str:
    rows = [RESULTS_COLUMNS]
    for r in results:
        rows.append([r.observable, r.N, r.trials, repr(r.mean), repr(r.stderr), cfg.seed,
                     f"{1000 * r.wall_time:.1f}"])
    return _csv(rows)


def _canonical(name: str) -> str:
    from .maps import _describe

    try:
        return _describe(_body(name))
    except (ValidationError, ValueError):
        return name


def check_against_series(series_doc: dict, cfg, results, delta: float, tolerance: float) -> list[str]:
    """Compare estimates with a series jet; raises on unit mismatches, returns failures."""
    from .maps import TruncatedSeries

    if "enumerator" in series_doc:
        series_doc = series_doc["enumerator"]
    series = TruncatedSeries.from_json(series_doc)
    match = [r for r in results if _canonical(r.observable) == series.observable]
    if not match:
        raise ValidationError(
            f"unit error: series is for observable {series.observable!r} but the run measured "
            f"{[r.observable for r in results]}")
    bodies = [str(b) for _, b in cfg.potential]
    if "potential" in series_doc and series_doc["potential"] != bodies and not cfg.is_graph:
        raise ValidationError(f"unit error: series potential {series_doc['potential']} "
                              f"differs from the run's {bodies}")
    if len(series.orders) != len(cfg.potential):
        raise ValidationError("unit error: series and run have different numbers of couplings")
    jet = series.evaluate([b for b, _ in cfg.potential], delta=delta)
    fails = []
    for r in match:
        allowed = 3 * r.stderr + tolerance * abs(jet)
        if abs(r.mean - jet) > allowed:
            fails.append(f"{r.observable}: {r.mean:.6g} vs jet {jet:.6g} (allowed {allowed:.3g})")
    return fails


def cmd_rmt(args) -> int:
    data = load_config(args.config, args.threads)
    cfg, results, delta = run_rmt(args.kind, data)
    manifest = _manifest(data, cfg.seed)
    emit(results_csv(cfg, results), args.out, manifest)
    if args.check:
        fails = check_against_series(load_json(args.check), cfg, results, delta, args.tolerance)
        if fails:
            raise CheckFailed("; ".join(fails))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .poly import parse_poly
    from .spectrum import marchenko_pastur_moment, spectral_histogram

    data = load_config(args.config, args.threads)
    data.setdefault("observables", [args.expr])
    cfg, _, _ = ensemble_from_json(data, "gaussian-poly")
    hist = spectral_histogram(parse_poly(args.expr), cfg, bins=args.bins)
    rows = [["bin_left", "bin_right", "density"]]
    rows += [[repr(a), repr(b), repr(d)] for a, b, d in hist.rows()]
    emit(_csv(rows), args.out, _manifest(data | {"expr": args.expr, "bins": args.bins}, cfg.seed))
    for p, m in hist.moments.items():
        ref = marchenko_pastur_moment(p) if args.expr.replace(" ", "") == "X1X1*" else None
        extra = f" (free Poisson {ref:g})" if ref is not None else ""
        print(f"moment {p}: {m:.6f}{extra}", file=sys.stderr)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planarprob", description="Planar-algebra probability engines")
    sub = p.add_subparsers(dest="command", required=True)

    tl = sub.add_parser("tl", help="Temperley-Lieb dimensions, Gram matrices and traces")
    tls = tl.add_subparsers(dest="action", required=True)
    d = tls.add_parser("dim")
    d.add_argument("--k", type=int, required=True)
    g = tls.add_parser("gram")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--delta", help="numeric value or expression, e.g. 2*cos(pi/5)")
    g.add_argument("--out")
    t = tls.add_parser("trace")
    t.add_argument("--element", required=True)
    t.add_argument("--delta")
    tl.set_defaults(func=cmd_tl)

    m = sub.add_parser("moments", help="free Poisson moments by non-crossing partitions")
    m.add_argument("--p", type=int, default=6)
    m.add_argument("--delta")
    m.add_argument("--check", action="store_true", help="compare with the TL closure trace")
    m.add_argument("--out")
    m.set_defaults(func=cmd_moments)

    s = sub.add_parser("series", help="planar-map series of free Gibbs laws")
    ss = s.add_subparsers(dest="action", required=True)
    sg = ss.add_parser("gibbs")
    sg.add_argument("--config", required=True)
    sg.add_argument("--oracle", action="store_true")
    sg.add_argument("--out")
    so = ss.add_parser("onmodel")
    so.add_argument("--orders", default="2,2")
    so.add_argument("--observable", default="cup")
    so.add_argument("--max-total", type=int, dest="max_total")
    so.add_argument("--out")
    s.set_defaults(func=cmd_series)

    o = sub.add_parser("onmodel", help="loop-model coefficients evaluated at a loop parameter")
    o.add_argument("--orders", default="2,2")
    o.add_argument("--delta", required=True)
    o.add_argument("--observable", default="cup")
    o.add_argument("--betas")
    o.add_argument("--out")
    o.set_defaults(func=cmd_onmodel)

    r = sub.add_parser("rmt", help="Monte Carlo trace estimates")
    r.add_argument("kind", choices=["gaussian", "graph", "gibbs"])
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--check", help="series JSON to compare against")
    r.add_argument("--tolerance", type=float, default=0.02, help="relative truncation allowance")
    r.add_argument("--threads", type=int)
    r.set_defaults(func=cmd_rmt)

    sp = sub.add_parser("spectrum", help="eigenvalue histogram of a self-adjoint polynomial")
    sp.add_argument("--config", required=True)
    sp.add_argument("--expr", default="X1 X1*")
    sp.add_argument("--bins", type=int, default=80)
    sp.add_argument("--out")
    sp.add_argument("--threads", type=int)
    sp.set_defaults(func=cmd_spectrum)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except ResourceLimitError as exc:
        print(f"resource limit ({exc.parameter}): {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

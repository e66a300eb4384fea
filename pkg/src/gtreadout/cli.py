"""Command-line interface: construct / import / verify / bounds / decode /
simulate / sweep / compare / sparsity.

Every output file starts with `#`-prefixed comment lines echoing the fully
resolved configuration, so results are self-describing and reproducible.
Exit codes: 0 success, 1 usage or I/O error, 2 verification violation.
"""

from __future__ import annotations

import sys

import click

from . import binmat, bounds, construct, decode, sim, verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class ViolationError(click.ClickException):
    exit_code = EXIT_VIOLATION


def _parse_d_range(text: str) -> list[int]:
    """Accept forms like '4', '2..6', '2,3,5'."""
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(part))
    return sorted(out)


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _config_header(params: dict) -> str:
    lines = [f"# {k} = {v}" for k, v in sorted(params.items()) if v is not None]
    return "\n".join(lines) + "\n"


def _emit(path, header: dict, body: str) -> None:
    text = _config_header(header) + body
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def _delimit(rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return "\n".join("\t".join(str(x) for x in row) for row in rows) + "\n"


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#")[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _apply_config(ctx: click.Context, cfg: dict[str, str]) -> None:
    """Config file values fill in parameters not given on the command line."""
    known = {p.name for p in ctx.command.params}
    for k, v in cfg.items():
        key = k.replace("-", "_")
        if key not in known:
            raise click.UsageError(f"unknown config key {k!r}")
        src = ctx.get_parameter_source(key)
        if src is not None and src.name != "DEFAULT":
            continue
        ctx.params[key] = ctx.command.params[
            [p.name for p in ctx.command.params].index(key)
        ].type.convert(v, None, ctx)


_config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True), default=None,
    help="key=value file; command-line flags take precedence.",
)


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        import secrets

        seed = secrets.randbits(31)
        click.echo(f"# generated seed = {seed}", err=True)
    return seed


@click.group()
def cli() -> None:
    """Group-testing readout designs: build, certify, bound, decode, simulate."""


# ---------------------------------------------------------------------------


@cli.command("construct")
@click.option("--recipe", default=None, help='e.g. "(13,4,10)_13^Iq,s(8)".')
@click.option("--catalog", nargs=2, type=int, default=None, metavar="N D",
              help="look up the built-in best-known recipe for (n, d).")
@click.option("--greedy", nargs=3, type=int, default=None, metavar="T W D",
              help="random constant-weight search with these parameters.")
@click.option("--sieve", default=None, metavar="P1,P2,...",
              help="remainder sieve over these prime powers.")
@click.option("--reference", type=click.Choice(
    ["per_pixel", "cross_strip", "binary_counting"]), default=None)
@click.option("--grid", type=int, default=None, help="grid side for --reference.")
@click.option("--n", "n_target", type=int, default=None, help="target column count.")
@click.option("--seed", type=int, default=None)
@click.option("--budget", type=int, default=10**6)
@click.option("--out", "out_path", default=None)
@_config_option
@click.pass_context
def cmd_construct(ctx, recipe, catalog, greedy, sieve, reference, grid,
                  n_target, seed, budget, out_path, config_path):
    """Build a code and write it in GTMX format."""
    _apply_config(ctx, _load_config(config_path))
    p = ctx.params
    recipe, catalog, greedy = p["recipe"], p["catalog"], p["greedy"]
    sieve, reference, grid = p["sieve"], p["reference"], p["grid"]
    n_target, seed, budget, out_path = (p["n_target"], p["seed"], p["budget"],
                                        p["out_path"])
    modes = [m for m in (recipe, catalog, greedy, sieve, reference) if m]
    if len(modes) != 1:
        raise click.UsageError(
            "choose exactly one of --recipe/--catalog/--greedy/--sieve/--reference"
        )
    if catalog:
        recipe = construct.catalog_descriptor(*catalog)
        n_target = n_target or catalog[0]
    if recipe:
        seed = _resolve_seed(seed)
        code = construct.build_recipe(recipe, n=n_target, seed=seed, budget=budget)
    elif greedy:
        if n_target is None:
            raise click.UsageError("--greedy needs --n")
        seed = _resolve_seed(seed)
        code = construct.greedy_construct(*greedy, n_target, seed=seed, budget=budget)
    elif sieve:
        if n_target is None:
            raise click.UsageError("--sieve needs --n")
        code = construct.crt_sieve(
            construct.PrimePowerSet(tuple(_parse_int_list(sieve))), n_target
        )
    else:
        if grid is None:
            raise click.UsageError("--reference needs --grid")
        code = binmat.reference_design(reference, grid)
    dest = out_path or "-"
    if dest == "-":
        binmat.save(code, sys.stdout)
    else:
        binmat.save(code, dest)
    click.echo(
        f"# t={code.t} n={code.n} certified_d={code.meta.certified_d} "
        f"desc={code.meta.descriptor!r}", err=True,
    )


@cli.command("import")
@click.option("--file", "in_path", required=True, type=click.Path(exists=True))
@click.option("--length", type=int, default=None)
@click.option("--weight", type=int, default=None)
@click.option("--distance", type=int, default=None)
@click.option("--overlap", type=int, default=None)
@click.option("--out", "out_path", default=None)
def cmd_import(in_path, length, weight, distance, overlap, out_path):
    """Validate and certify an externally built code."""
    code = construct.import_code(in_path, length=length, weight=weight,
                                 distance=distance, overlap=overlap)
    if out_path:
        binmat.save(code, out_path)
    else:
        binmat.save(code, sys.stdout)
    click.echo(f"# certified_d={code.meta.certified_d}", err=True)


@cli.command("verify")
@click.option("--code", "code_path", required=True, type=click.Path(exists=True))
@click.option("--d", "d", required=True, type=int)
@click.option("--mode", type=click.Choice(["certificate", "random", "exact"]),
              default="certificate")
@click.option("--trials", type=int, default=10**5)
@click.option("--targets", type=int, default=None,
              help="exact mode: check only this many random target columns.")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1)
def cmd_verify(code_path, d, mode, trials, targets, seed, workers):
    """Check d-disjunctness; exit 2 with a witness on violation."""
    code = binmat.load(code_path)
    if mode == "certificate":
        v = verify.check_overlap_certificate(code, d)
    elif mode == "random":
        v = verify.random_check(code, d, trials, seed=_resolve_seed(seed))
    else:
        tgt = None
        if targets is not None:
            import numpy as np

            rng = np.random.default_rng(_resolve_seed(seed))
            tgt = sorted(int(x) for x in
                         rng.choice(code.n, size=min(targets, code.n), replace=False))
        v = verify.exact_check(code, d, targets=tgt, workers=workers)
    click.echo(f"{v.kind.value} d={d} scope={v.scope!r} effort={v.effort}")
    if v.kind is verify.VerdictKind.CERTIFIED_FALSE:
        raise ViolationError(f"witness: column {v.witness[0]} covered by {v.witness[1]}")


@cli.command("bounds")
@click.option("--n", "n", required=True, type=int)
@click.option("--d", "d_range", required=True, help='e.g. "2..6" or "2,4".')
@click.option("--rows", default=None, help='row letters, e.g. "a,c,t".')
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
def cmd_bounds(n, d_range, rows, out_path, fmt):
    """Evaluate the bound table (Table 3 reproduction)."""
    ds = _parse_d_range(d_range)
    row_ids = [r.strip() for r in rows.split(",")] if rows else None
    results = bounds.table3(n, ds, rows=row_ids)
    body = [["row_id", "d", "value", "optimizer", "status"]]
    for r in results:
        opt = ",".join(f"{k}={v}" for k, v in r.optimizer.items())
        body.append([r.row_id, r.d, r.value, opt, r.status])
    _emit(out_path, {"command": "bounds", "n": n, "d": d_range,
                     "rows": rows or "all", "format": fmt}, _delimit(body, fmt))


@cli.command("decode")
@click.option("--code", "code_path", required=True, type=click.Path(exists=True))
@click.option("--tdc", "tdc_path", required=True, type=click.Path(exists=True),
              help="CSV of tdc_id,time_ps hits.")
@click.option("--interval-ps", type=int, default=40)
@click.option("--burst", is_flag=True, help="merge window runs before decoding.")
@click.option("--max-gap", type=int, default=0)
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
def cmd_decode(code_path, tdc_path, interval_ps, burst, max_gap, out_path, fmt):
    """Decode a TDC hit stream window by window (or burst by burst)."""
    code = binmat.load(code_path)
    rows_raw, maxid = decode.read_tdc_csv(tdc_path)
    if maxid >= code.t:
        raise click.UsageError(f"TDC id {maxid} outside code length {code.t}")
    stream = decode.stream_from_rows(rows_raw, code.t, interval_ps)
    body = [["window", "extent", "kind", "support", "residual"]]
    if burst:
        items = decode.burst_decode(code, stream, max_gap=max_gap)
    else:
        items = [(k, 1, out) for k, out in decode.window_decode(code, stream)]
    for k, extent, out in items:
        body.append([k, extent, out.kind.value,
                     " ".join(map(str, sorted(out.support))),
                     " ".join(map(str, sorted(out.residual)))])
    _emit(out_path, {"command": "decode", "code": code_path, "tdc": tdc_path,
                     "interval_ps": interval_ps, "burst": burst,
                     "max_gap": max_gap}, _delimit(body, fmt))


@cli.command("simulate")
@click.option("--grid", required=True, type=int)
@click.option("--code", "code_path", required=True, type=click.Path(exists=True))
@click.option("--dead-ns", type=float, default=20.0)
@click.option("--tdc-ps", type=int, default=40)
@click.option("--events", type=int, default=1000)
@click.option("--photons", "photon_path", type=click.Path(exists=True), default=None,
              help="CSV photon list; replaces the statistical generator.")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1)
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
def cmd_simulate(grid, code_path, dead_ns, tdc_ps, events, photon_path, seed,
                 workers, out_path, fmt):
    """Run the scintillation-readout pipeline and report per-multiplicity
    decoding statistics."""
    code = binmat.load(code_path)
    seed = _resolve_seed(seed)
    scint = sim.ScintParams(events=events)
    sensor = sim.SensorParams(grid, code, dead_time_ns=dead_ns,
                              tdc_interval_ps=tdc_ps)
    trace = None
    if photon_path:
        photons = sim.import_photons(photon_path)
        trace = sim.detect(photons, sensor, seed)
    stats = sim.run(scint, sensor, seed, workers=workers, trace=trace)
    body = [["multiplicity", "windows", "decoded_pct"]]
    for s, cnt, pct in stats.rows:
        body.append([s, cnt, f"{pct:.3f}"])
    body.append(["total_firings", stats.total_firings, ""])
    body.append(["missed_pct", f"{stats.missed_pct:.3f}", ""])
    body.append(["max_simultaneity", stats.max_simultaneity, ""])
    _emit(out_path, {"command": "simulate", "grid": grid, "code": code_path,
                     "dead_ns": dead_ns, "tdc_ps": tdc_ps, "events": events,
                     "photons": photon_path, "seed": seed, "workers": workers},
          _delimit(body, fmt))


@cli.command("sweep")
@click.option("--grid", required=True, type=int)
@click.option("--code", "code_specs", multiple=True, required=True,
              metavar="D=PATH", help="repeatable, e.g. --code 4=d4.gtmx")
@click.option("--dead-ns", default="10,20,40,80")
@click.option("--tdc-ps", default="5,10,20,40")
@click.option("--events", type=int, default=1000)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1)
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
def cmd_sweep(grid, code_specs, dead_ns, tdc_ps, events, seed, workers,
              out_path, fmt):
    """Dead-time x TDC-interval x code grid of missed-firing fractions."""
    codes = {}
    for spec in code_specs:
        if "=" not in spec:
            raise click.UsageError(f"--code expects D=PATH, got {spec!r}")
        dstr, path = spec.split("=", 1)
        codes[int(dstr)] = binmat.load(path)
    seed = _resolve_seed(seed)
    scint = sim.ScintParams(events=events)
    rows = sim.sweep(scint, grid, codes,
                     dead_times_ns=_parse_int_list(dead_ns),
                     intervals_ps=_parse_int_list(tdc_ps),
                     seed=seed, workers=workers)
    ds = sorted(codes)
    body = [["dead_time_ns", "firings", "tdc_interval_ps", "max_simultaneity",
             *[f"missed_pct_d{d}" for d in ds]]]
    for r in rows:
        body.append([r["dead_time_ns"], r["firings"], r["tdc_interval_ps"],
                     r["max_simultaneity"],
                     *[f"{r[f'missed_pct_d{d}']:.3f}" for d in ds]])
    _emit(out_path, {"command": "sweep", "grid": grid, "events": events,
                     "dead_ns": dead_ns, "tdc_ps": tdc_ps, "seed": seed,
                     "codes": ";".join(code_specs)}, _delimit(body, fmt))


@cli.command("compare")
@click.option("--n", "ns", required=True, help="comma list of square sizes.")
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
@click.option("--fig", "fig_path", default=None,
              help="also render the comparison figure to this file.")
def cmd_compare(ns, out_path, fmt, fig_path):
    """Reference wirings vs best-known disjunct designs per grid size."""
    from . import report

    rows = report.compare_designs(_parse_int_list(ns))
    body = [["n", "per_pixel", "cross_strip", "binary_counting",
             "d2", "d3", "d4", "d5", "d6", "flags"]]
    for r in rows:
        body.append([r["n"], r["per_pixel"], r["cross_strip"],
                     r["binary_counting"],
                     *[r[f"d{d}"] if r[f"d{d}"] is not None else "-"
                       for d in range(2, 7)],
                     "degenerate" if r["degenerate"] else ""])
    _emit(out_path, {"command": "compare", "n": ns}, _delimit(body, fmt))
    if fig_path:
        report.render_compare(rows, fig_path)


@cli.command("sparsity")
@click.option("--code", "code_specs", multiple=True, required=True,
              metavar="LABEL=PATH")
@click.option("--s-max", type=int, default=10)
@click.option("--trials", type=int, default=10**4)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["tsv", "csv"]), default="tsv")
@click.option("--fig", "fig_path", default=None)
def cmd_sparsity(code_specs, s_max, trials, seed, out_path, fmt, fig_path):
    """Success fraction of random s-supports per code (Fig 3-style)."""
    from . import report

    seed = _resolve_seed(seed)
    curves = {}
    for spec in code_specs:
        if "=" not in spec:
            raise click.UsageError(f"--code expects LABEL=PATH, got {spec!r}")
        label, path = spec.split("=", 1)
        curves[label] = report.sparsity_curve(binmat.load(path), s_max, trials, seed)
    body = [["code", "s", "success_fraction"]]
    for label, pts in curves.items():
        for s, f in pts:
            body.append([label, s, f"{f:.4f}"])
    _emit(out_path, {"command": "sparsity", "s_max": s_max, "trials": trials,
                     "seed": seed}, _delimit(body, fmt))
    if fig_path:
        report.render_sparsity(curves, fig_path)


def main(argv=None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        click.echo(cli.get_help(click.Context(cli, info_name="gtreadout")), err=True)
        return EXIT_USAGE
    try:
        cli.main(args=args, standalone_mode=False)
    except click.exceptions.Exit as e:
        return EXIT_OK if e.exit_code == 0 else EXIT_USAGE
    except ViolationError as e:
        click.echo(e.format_message(), err=True)
        return EXIT_VIOLATION
    except click.ClickException as e:
        click.echo(e.format_message(), err=True)
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except OSError as e:
        click.echo(str(e), err=True)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Batch front door: build masks and banks from a TOML config, verify
filter files, run periodic transforms, render refinable functions, and
export dense coefficient tables.

Exit codes: 0 everything passed, 1 a verification check failed, 2 usage or
configuration error. All JSON output is serialized with sorted keys so that
identical inputs give byte-identical files.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

import numpy as np

from .exact import parse_scalar
from .frames import (
    FilterBank,
    custom_extension,
    mutual_extension,
    symmetrized_extension,
)
from .lattice import check_dilation_compatibility, validate_group
from .laurent import LaurentPoly, format_table
from .masks import (
    Mask,
    build_dual_mask,
    build_dual_mask_low_order,
    build_interpolatory_mask,
)
from .transform import (
    PeriodicSignal,
    analyze,
    read_signal,
    read_signal_csv,
    refinable_support_box,
    render_refinable,
    synthesize,
    write_signal,
)
from .verify import (
    VerificationError,
    VerificationReport,
    dual_pair_report,
    refinable_mask_report,
    vanishing_moment_order,
)

__all__ = ["main", "ConfigError"]


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def _as_matrix(value, d, field):
    """Row-major flat list or nested rows -> d x d integer tuple matrix."""
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{field}: expected an integer array")
    if isinstance(value[0], list):
        rows = value
    else:
        if len(value) != d * d:
            raise ConfigError(f"{field}: expected {d * d} entries row-major, "
                              f"got {len(value)}")
        rows = [value[i * d:(i + 1) * d] for i in range(d)]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise ConfigError(f"{field}: expected a {d}x{d} matrix")
    try:
        return tuple(tuple(int(x) for x in r) for r in rows)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: entries must be integers")


def load_config(path):
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config parse error in {path}: {e}")
    if "dimension" not in cfg:
        raise ConfigError("dimension: missing")
    d = cfg["dimension"]
    if not isinstance(d, int) or d < 1:
        raise ConfigError("dimension: must be a positive integer")
    if "dilation" not in cfg:
        raise ConfigError("dilation: missing")
    M = _as_matrix(cfg["dilation"], d, "dilation")
    gens_raw = cfg.get("group", {}).get("generators")
    if gens_raw is None:
        raise ConfigError("group.generators: missing")
    gens = [_as_matrix(g, d, f"group.generators[{i}]")
            for i, g in enumerate(gens_raw)]
    center_raw = cfg.get("center", ["0"] * d)
    if len(center_raw) != d:
        raise ConfigError(f"center: expected {d} entries")
    try:
        center = tuple(Fraction(parse_scalar(str(x))) for x in center_raw)
    except (ValueError, TypeError):
        raise ConfigError("center: entries must be rational numbers")
    build = cfg.get("build", {})
    n = build.get("n", 1)
    if not isinstance(n, int) or n < 1:
        raise ConfigError("build.n: must be a positive integer")
    n_dual = build.get("n_dual", n)
    if not isinstance(n_dual, int) or n_dual < 1:
        raise ConfigError("build.n_dual: must be a positive integer")
    if n_dual > n:
        raise ConfigError("build.n_dual: cannot exceed build.n")
    mode = build.get("mode", "mutual")
    if mode not in ("mutual", "symmetrized", "custom"):
        raise ConfigError(f"build.mode: unknown mode {mode!r}")
    scalars = build.get("scalars", "rational")
    if scalars not in ("rational", "cyclotomic"):
        raise ConfigError(f"build.scalars: unknown scalar mode {scalars!r}")
    u_file = build.get("u_file")
    if mode == "custom" and u_file is None:
        raise ConfigError("build.u_file: required for mode = custom")
    out = cfg.get("output", {})
    paths = {
        "mask": out.get("mask", "m0.json"),
        "dual": out.get("dual", "m0_dual.json"),
        "bank": out.get("bank", "bank.json"),
        "report": out.get("report", "report.json"),
    }
    return {
        "d": d, "M": M, "generators": gens, "center": center,
        "n": n, "n_dual": n_dual, "mode": mode, "scalars": scalars,
        "u_file": u_file, "paths": paths,
    }


def _load_u_blocks(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"build.u_file: file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"build.u_file: parse error at line {e.lineno} "
                          f"column {e.colno}: {e.msg}")

    def cell(x):
        if isinstance(x, dict):
            return LaurentPoly.from_json_dict(x)
        return parse_scalar(str(x))

    try:
        U = [[cell(x) for x in row] for row in obj["U"]]
        Ud = [[cell(x) for x in row] for row in obj["U_dual"]]
    except KeyError as e:
        raise ConfigError(f"build.u_file: missing key {e}")
    return U, Ud


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, default=str)
        fh.write("\n")


def _scan_scalars(bank):
    """True iff every coefficient of every mask in the bank is rational."""
    for t in list(bank.primals) + list(bank.duals):
        for k in t.support():
            if not isinstance(t.coeff(k), Fraction):
                return False
    return True


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_build(args):
    cfg = load_config(args.config)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        H = validate_group(cfg["generators"])
    except ValueError as e:
        raise ConfigError(f"group.generators: {e}")
    if not check_dilation_compatibility(H, cfg["M"]):
        raise ConfigError("dilation: M^-1 E M does not stay in the group "
                          "for every E (H and M are incompatible)")
    m0 = build_interpolatory_mask(H, cfg["M"], c=cfg["center"], n=cfg["n"])
    if cfg["n_dual"] == cfg["n"]:
        m0d = build_dual_mask(m0)
    else:
        m0d = build_dual_mask_low_order(m0, cfg["n_dual"])
    if cfg["mode"] == "mutual":
        bank = mutual_extension(m0, m0d)
    elif cfg["mode"] == "symmetrized":
        bank = symmetrized_extension(m0, m0d)
    else:
        U, Ud = _load_u_blocks(Path(args.config).parent / cfg["u_file"])
        bank = custom_extension(m0, m0d, U, Ud)
    if cfg["scalars"] == "rational" and not _scan_scalars(bank):
        raise ConfigError("build.scalars: construction produced cyclotomic "
                          "coefficients; set scalars = \"cyclotomic\"")
    n_max = args.n_max
    report = {
        "refinable": refinable_mask_report(
            m0.poly, H, cfg["M"], cfg["center"], n_expected=cfg["n"],
            n_max=n_max, orb=m0.orbit).to_json_dict(),
        "dual_pair": dual_pair_report(
            m0.poly, m0d.poly, bank.digit_system, H, cfg["center"],
            n_expected=cfg["n_dual"], n_max=n_max).to_json_dict(),
        "bank": bank.verify(n_max=n_max).to_json_dict(),
    }
    paths = cfg["paths"]
    _write_json(outdir / paths["mask"], m0.to_json_dict())
    _write_json(outdir / paths["dual"], m0d.to_json_dict())
    _write_json(outdir / paths["bank"], bank.to_json_dict())
    _write_json(outdir / paths["report"], report)
    ok = all(report[k]["ok"] for k in report)
    for key in ("refinable", "dual_pair", "bank"):
        for name in sorted(report[key]["checks"]):
            c = report[key]["checks"][name]
            print(f"{key}.{name}: {'PASS' if c['pass'] else 'FAIL'}")
    for k in ("mask", "dual", "bank", "report"):
        print(f"wrote {outdir / paths[k]}")
    return 0 if ok else 1


def _load_filter_file(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: parse error at line {e.lineno} column "
                          f"{e.colno} (offset {e.pos}): {e.msg}")
    if "primals" in obj:
        return FilterBank.from_json_dict(obj)
    if "role" in obj:
        return Mask.from_json_dict(obj)
    raise ConfigError(f"{path}: neither a mask nor a bank file")


def _trivial_group(d):
    from .linalg import identity_matrix
    return validate_group([identity_matrix(d)])


def _mask_report(mask, n_max, dual_of=None):
    if dual_of is not None:
        primal = _load_filter_file(dual_of)
        if not isinstance(primal, Mask):
            raise ConfigError("--dual-of: expected a mask file")
        orb = primal.orbit
        if orb is None:
            from .lattice import orbit_decomposition
            H = (primal.group if primal.group is not None
                 else _trivial_group(primal.dimension))
            orb = orbit_decomposition(H, primal.M, primal.center)
        return dual_pair_report(primal.poly, mask.poly, orb.digit_system,
                                primal.group, primal.center,
                                n_expected=mask.order, n_max=n_max)
    if mask.role.endswith("refinable"):
        H = (mask.group if mask.group is not None
             else _trivial_group(mask.dimension))
        return refinable_mask_report(mask.poly, H, mask.M, mask.center,
                                     n_expected=mask.order, n_max=n_max)
    rep = VerificationReport()
    vm = vanishing_moment_order(mask.poly, n_max)
    rep.add("vanishing_moments", vm >= (mask.order or 1), vm)
    return rep


def cmd_verify(args):
    wanted = None
    if args.checks:
        wanted = {s.strip() for s in args.checks.split(",") if s.strip()}
    all_ok = True
    for path in args.files:
        obj = _load_filter_file(path)
        if isinstance(obj, FilterBank):
            rep = obj.verify(n_max=args.n_max)
        else:
            rep = _mask_report(obj, args.n_max, args.dual_of)
        if wanted is not None:
            unknown = wanted - set(rep.checks)
            if unknown:
                raise ConfigError(
                    f"--checks: unknown check(s) {sorted(unknown)}; "
                    f"available: {sorted(rep.checks)}")
            rep.checks = {k: v for k, v in rep.checks.items() if k in wanted}
        print(f"== {path}")
        for line in rep.lines():
            print(line)
        all_ok = all_ok and rep.ok
    return 0 if all_ok else 1


def cmd_transform(args):
    bank = _load_filter_file(args.bank)
    if not isinstance(bank, FilterBank):
        raise ConfigError("--bank: expected a bank file")
    sig_path = Path(args.signal)
    signal = (read_signal_csv(sig_path) if sig_path.suffix == ".csv"
              else read_signal(sig_path))
    if tuple(map(tuple, bank.M)) != signal.M:
        raise ConfigError("bank and signal dilation matrices differ")
    levels = args.levels
    pyr = analyze(signal, bank, levels)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {"J": signal.J, "depth": pyr.depth,
                "M": [list(r) for r in signal.M], "bands": {}, "coarse": None}
    for lv in pyr.levels:
        for (p, i), band in sorted(lv.wavelets.items()):
            if np.iscomplexobj(band):
                raise ConfigError("complex subbands cannot be written to "
                                  "signal files; use a rational bank")
            name = f"band_L{lv.level}_p{p}_i{i}.swsg"
            write_signal(outdir / name,
                         PeriodicSignal(signal.M, signal.J - lv.level, band))
            manifest["bands"][f"L{lv.level}_p{p}_i{i}"] = name
    write_signal(outdir / "coarse.swsg",
                 PeriodicSignal(signal.M, signal.J - pyr.depth, pyr.coarse))
    manifest["coarse"] = "coarse.swsg"
    recon = synthesize(pyr, bank)
    write_signal(outdir / "recon.swsg", recon)
    manifest["reconstruction"] = "recon.swsg"
    _write_json(outdir / "pyramid.json", manifest)
    err = float(np.max(np.abs(recon.values - signal.values)))
    print(f"max reconstruction error: {err:.3e}")
    print(f"wrote {outdir / 'pyramid.json'}")
    return 0


def cmd_render(args):
    mask = _load_filter_file(args.mask)
    if not isinstance(mask, Mask):
        raise ConfigError("--mask: expected a mask file")
    res = render_refinable(mask, args.levels, mode=args.mode)
    try:
        box = refinable_support_box(mask)
        grid = res.box_grid(box)
    except ValueError:
        grid = sorted(res.values.items())
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    d = len(mask.M)
    if args.format == "json":
        payload = {
            "J": args.levels,
            "M": [list(r) for r in mask.M],
            "samples": [{"alpha": list(a),
                         "position": [str(x) for x in res.position(a)],
                         "value": str(v) if args.mode == "rational"
                         else float(v)}
                        for a, v in grid],
        }
        out = outdir / "render.json"
        _write_json(out, payload)
    else:
        out = outdir / "render.csv"
        with open(out, "w") as fh:
            cols = [f"a{i + 1}" for i in range(d)] \
                + [f"x{i + 1}" for i in range(d)] + ["value"]
            fh.write(",".join(cols) + "\n")
            for a, v in grid:
                pos = res.position(a)
                val = str(v) if args.mode == "rational" else repr(float(v))
                fh.write(",".join([str(x) for x in a]
                                  + [str(x) for x in pos] + [val]) + "\n")
    mass = res.normalized_mass()
    print(f"{len(grid)} samples; normalized mass {mass}")
    print(f"wrote {out}")
    return 0


def cmd_export(args):
    path = args.file
    obj = _load_filter_file(path)
    lines = []
    if args.format == "json":
        blob = obj.to_json_dict()
        text = json.dumps(blob, sort_keys=True, indent=2, default=str) + "\n"
    elif args.format == "table":
        if isinstance(obj, Mask):
            text = obj.export_table() + "\n"
        else:
            for k, t in enumerate(obj.primals):
                lines.append(f"# primal channel {k}")
                lines.append(format_table(t))
            for k, t in enumerate(obj.duals):
                lines.append(f"# dual channel {k}")
                lines.append(format_table(t))
            text = "\n".join(lines) + "\n"
    else:  # csv
        rows = ["channel,side," + ",".join(
            f"k{i + 1}" for i in range(_dim_of(obj))) + ",value"]
        if isinstance(obj, Mask):
            for k, v in obj.poly.terms():
                rows.append("0,primal," + ",".join(str(x) for x in k)
                            + f",{_scalar_str(v)}")
        else:
            for side, fam in (("primal", obj.primals), ("dual", obj.duals)):
                for ch, t in enumerate(fam):
                    for k, v in t.terms():
                        rows.append(f"{ch},{side},"
                                    + ",".join(str(x) for x in k)
                                    + f",{_scalar_str(v)}")
        text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _dim_of(obj):
    return len(obj.M)


def _scalar_str(v):
    from .exact import format_scalar
    return format_scalar(v)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="symframes",
        description="Build, verify, and apply symmetric dual wavelet frame "
                    "filter banks in exact arithmetic.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a mask/bank from a config")
    b.add_argument("--config", required=True, type=Path)
    b.add_argument("--out-dir", default=".", type=Path)
    b.add_argument("--n-max", type=int, default=8)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="verify mask or bank files")
    v.add_argument("files", nargs="+", type=Path)
    v.add_argument("--checks", default=None,
                   help="comma-separated subset of checks to run")
    v.add_argument("--dual-of", default=None, type=Path,
                   help="primal mask file; verifies the argument as its dual")
    v.add_argument("--n-max", type=int, default=8)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("transform", help="analyze/synthesize a signal file")
    t.add_argument("--bank", required=True, type=Path)
    t.add_argument("--signal", required=True, type=Path)
    t.add_argument("--levels", type=int, default=1)
    t.add_argument("--out-dir", default=".", type=Path)
    t.set_defaults(func=cmd_transform)

    r = sub.add_parser("render", help="render the refinable function")
    r.add_argument("--mask", required=True, type=Path)
    r.add_argument("--levels", type=int, default=6,
                   help="number of subdivision iterations")
    r.add_argument("--mode", choices=("float", "rational"), default="float")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--out-dir", default=".", type=Path)
    r.set_defaults(func=cmd_render)

    e = sub.add_parser("export", help="re-emit a filter file as json/table/csv")
    e.add_argument("file", type=Path)
    e.add_argument("--format", choices=("json", "table", "csv"),
                   default="table")
    e.add_argument("--out", default=None, type=Path)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except VerificationError as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

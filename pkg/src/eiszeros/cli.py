"""Command-line surface: characters, eval, zeros, plot, project, hecke,
atkin-lehner, verify.

Exit codes: 0 success, 1 validation error, 2 numeric failure,
3 certification failure.  All file writes are whole-file atomic
(write to a temp file, then rename).  Identical config + seed gives
byte-identical JSON/CSV output (SVG identical up to the version comment).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from . import characters as chars
from . import diagnostics as diag
from . import geometry as geom
from . import zerofinder as zf
from .errors import (
    CertificationError,
    EiszerosError,
    NewtonError,
    ParameterError,
    ScanError,
    ToleranceError,
    WindingError,
)
from .evaluation import (
    EisensteinParams,
    EvalOptions,
    eval_czd,
    eval_fourier_normalized,
    params_from_indices,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_CERTIFICATION = 3


@dataclass
class RunConfig:
    """Everything a run needs; round-trips losslessly through JSON."""

    q1: int = 3
    chi1_index: int = 1
    q2: int = 5
    chi2_index: int = 1
    k: int = 8
    window: zf.WindowConfig = field(default_factory=zf.WindowConfig)
    options: EvalOptions = field(default_factory=EvalOptions)
    constants: diag.FittedConstants = field(default_factory=diag.FittedConstants)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "q1": self.q1, "chi1_index": self.chi1_index,
            "q2": self.q2, "chi2_index": self.chi2_index, "k": self.k,
            "window": asdict(self.window),
            "options": asdict(self.options),
            "constants": asdict(self.constants),
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        return RunConfig(
            q1=d["q1"], chi1_index=d["chi1_index"],
            q2=d["q2"], chi2_index=d["chi2_index"], k=d["k"],
            window=zf.WindowConfig(**d.get("window", {})),
            options=EvalOptions(**d.get("options", {})),
            constants=diag.FittedConstants(**d.get("constants", {})),
            seed=d.get("seed", 0),
        )

    def params(self) -> EisensteinParams:
        return params_from_indices(self.q1, self.chi1_index,
                                   self.q2, self.chi2_index, self.k)


def atomic_write(path: str, data: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _emit(text: str, out: str | None):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)


def _fmt_complex(w: complex) -> str:
    return f"{w.real:+.10g}{w.imag:+.10g}i"


# --------------------------------------------------------------------------
# Config plumbing shared by subcommands
# --------------------------------------------------------------------------

def _add_param_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--q1", type=int)
    p.add_argument("--chi1-index", type=int, dest="chi1_index")
    p.add_argument("--q2", type=int)
    p.add_argument("--chi2-index", type=int, dest="chi2_index")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, help="evaluator tolerance")
    p.add_argument("--eta", type=float)
    p.add_argument("--eps-width", type=float, dest="eps_width")
    p.add_argument("--c-height", type=float, dest="c_height")


def _config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = RunConfig.from_dict(json.load(fh))
    else:
        cfg = RunConfig()
    for name in ("q1", "chi1_index", "q2", "chi2_index", "k", "seed"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "tol", None) is not None:
        cfg.options = EvalOptions(tolerance=args.tol,
                                  max_terms=cfg.options.max_terms,
                                  czd_radius=cfg.options.czd_radius)
    wnd = asdict(cfg.window)
    for name in ("eta", "eps_width", "c_height"):
        v = getattr(args, name, None)
        if v is not None:
            wnd[name] = v
    cfg.window = zf.WindowConfig(**wnd)
    return cfg


# --------------------------------------------------------------------------
# characters
# --------------------------------------------------------------------------

def cmd_characters(args) -> int:
    rows = []
    for idx, chi in enumerate(chars.enumerate_characters(args.modulus)):
        primitive = chars.is_primitive(chi)
        if args.primitive_only and not primitive:
            continue
        rows.append({
            "index": idx,
            "exponents": list(chi.exponents),
            "parity": chars.parity(chi),
            "conductor": chars.conductor(chi),
            "primitive": primitive,
            "values": {str(n): _fmt_complex(chars.evaluate(chi, n))
                       for n in range(1, 13)},
        })
    if args.format == "json":
        doc = {
            "modulus": args.modulus,
            "generators": [list(g) for g in chars.build_group(args.modulus).generators],
            "indexing": "lexicographic over exponent vectors against the generators",
            "characters": rows,
        }
        _emit(_json_dumps(doc), args.out)
    else:
        buf = io.StringIO()
        wr = csv.writer(buf)
        wr.writerow(["index", "exponents", "parity", "conductor", "primitive"]
                    + [f"chi({n})" for n in range(1, 13)])
        for r in rows:
            wr.writerow([r["index"], ";".join(map(str, r["exponents"])),
                         r["parity"], r["conductor"], r["primitive"]]
                        + [r["values"][str(n)] for n in range(1, 13)])
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    cfg = _config_from_args(args)
    params = cfg.params()
    z = complex(args.x, args.y)
    if args.expansion == "czd":
        val = eval_czd(params, z, cfg.options)
    else:
        val = eval_fourier_normalized(params, z, cfg.options)
    w = val.to_complex()
    doc = {
        "expansion": args.expansion,
        "z": [args.x, args.y],
        "log_magnitude": val.log_mag,
        "phase": val.phase,
        "re": w.real,
        "im": w.imag,
    }
    _emit(_json_dumps(doc), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# zeros
# --------------------------------------------------------------------------

def default_scan_region(q2: int) -> zf.RectRegion:
    """The survey strip: unit width, from just above 1/(2 sqrt(3) q2) up to
    sqrt(2 q2)/q2 (the shape of the k=8 survey region)."""
    y_lo = 1.0 / (2.0 * math.sqrt(3.0) * q2)
    y_hi = math.sqrt(2.0 * q2) / q2
    return zf.RectRegion(-0.5, 0.5, y_lo * 1.0001, y_hi, label=("custom",))


def collect_zeros(cfg: RunConfig, method: str,
                  region: zf.RectRegion | None = None,
                  cell_target: float = 0.02) -> list[zf.ZeroRecord]:
    params = cfg.params()
    if method == "lines":
        records = []
        for a in zf.admissible_line_offsets(params.q2):
            records.extend(zf.certify_line_zeros(params, a, cfg.window, cfg.options))
        records.sort(key=lambda r: (r.y, r.x))
        return records
    if method == "strips":
        records = [
            zf.certify_strip_zero(params, ell, cfg.window, cfg.options)
            for ell in zf.admissible_strip_indices(params, cfg.window)
        ]
        records.sort(key=lambda r: (r.y, r.x))
        return records
    if method == "scan":
        if region is None:
            region = default_scan_region(params.q2)
        expansion = zf.default_expansion_name(params, region.center.imag, cfg.window)
        return zf.scan_zeros(params, region, expansion=expansion,
                             cell_target=cell_target, opts=cfg.options,
                             cfg=cfg.window)
    raise ParameterError(f"unknown method {method!r}")


def zeros_document(cfg: RunConfig, records: list[zf.ZeroRecord]) -> dict:
    return {
        "params": {"q1": cfg.q1, "chi1_index": cfg.chi1_index,
                   "q2": cfg.q2, "chi2_index": cfg.chi2_index, "k": cfg.k},
        "zeros": [r.to_dict() for r in records],
        "meta": {
            "version": __version__,
            "seed": cfg.seed,
            "tolerances": {"eval": cfg.options.tolerance,
                           "window": asdict(cfg.window)},
        },
    }


def _zeros_csv(records) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf)
    wr.writerow(["x", "y", "winding", "residual", "source"])
    for r in records:
        wr.writerow([repr(r.x), repr(r.y), r.winding, repr(r.residual),
                     ":".join(map(str, r.source))])
    return buf.getvalue()


def cmd_zeros(args) -> int:
    cfg = _config_from_args(args)
    region = None
    if args.region:
        x0, x1, y0, y1 = (float(t) for t in args.region.split(","))
        region = zf.RectRegion(x0, x1, y0, y1, label=("custom",))
    records = collect_zeros(cfg, args.method, region, args.cell_target)
    if args.format == "csv":
        _emit(_zeros_csv(records), args.out)
    else:
        _emit(_json_dumps(zeros_document(cfg, records)), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# plot / project
# --------------------------------------------------------------------------

_SVG_SIZE = 800
_SVG_MARGIN = 60


def _svg_document(points: list[tuple[float, float]], bounds, fundamental: bool) -> str:
    x0, x1, y0, y1 = bounds
    span_x, span_y = x1 - x0, y1 - y0
    inner = _SVG_SIZE - 2 * _SVG_MARGIN

    def px(x):
        return _SVG_MARGIN + (x - x0) / span_x * inner

    def py(y):  # y axis points up
        return _SVG_SIZE - _SVG_MARGIN - (y - y0) / span_y * inner

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- eiszeros {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_SIZE}" '
        f'height="{_SVG_SIZE}" viewBox="0 0 {_SVG_SIZE} {_SVG_SIZE}">',
        f'<rect x="{_SVG_MARGIN}" y="{_SVG_MARGIN}" width="{inner}" '
        f'height="{inner}" fill="white" stroke="black" stroke-width="1"/>',
    ]
    for gx in (x0, 0.0, x1):
        if x0 <= gx <= x1:
            out.append(
                f'<line x1="{px(gx):.2f}" y1="{py(y0):.2f}" x2="{px(gx):.2f}" '
                f'y2="{py(y1):.2f}" stroke="#cccccc" stroke-width="0.5"/>'
            )
    out.append(
        f'<text x="{_SVG_MARGIN}" y="{_SVG_SIZE - 20}" font-size="12">'
        f"x in [{x0:.4f}, {x1:.4f}], y in [{y0:.4f}, {y1:.4f}]</text>"
    )
    if fundamental:
        # standard-domain outline: verticals at +-1/2 and the unit arc
        for sx in (-0.5, 0.5):
            out.append(
                f'<line x1="{px(sx):.2f}" y1="{py(math.sqrt(3) / 2):.2f}" '
                f'x2="{px(sx):.2f}" y2="{py(y1):.2f}" stroke="blue" stroke-width="1"/>'
            )
        arc = []
        for i in range(101):
            th = math.pi / 3 + i * (math.pi / 3) / 100
            arc.append(f"{px(math.cos(th)):.2f},{py(math.sin(th)):.2f}")
        out.append(
            f'<polyline points="{" ".join(arc)}" fill="none" stroke="blue" '
            f'stroke-width="1"/>'
        )
    for (x, y) in points:
        out.append(
            f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="black"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def load_zero_file(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if "zeros" not in doc:
        raise ParameterError(f"{path} is not a zeros file")
    return doc


def cmd_plot(args) -> int:
    doc = load_zero_file(args.infile)
    pts = [(z["x"], z["y"]) for z in doc["zeros"]]
    if args.project:
        pts = [
            ((w := geom.reduce_to_fundamental_domain(complex(x, y))[0]).real, w.imag)
            for x, y in pts
        ]
    pts.sort(key=lambda p: (p[1], p[0]))
    if args.project:
        ymax = max((p[1] for p in pts), default=2.0)
        bounds = (-0.75, 0.75, 0.75, max(2.0, 1.1 * ymax))
    elif pts:
        xs, ys = (sorted(c) for c in zip(*pts))
        padx = 0.05 * max(xs[-1] - xs[0], 0.1)
        pady = 0.05 * max(ys[-1] - ys[0], 0.1)
        bounds = (xs[0] - padx, xs[-1] + padx, max(ys[0] - pady, 1e-6), ys[-1] + pady)
    else:
        bounds = (-0.5, 0.5, 0.01, 1.0)
    atomic_write(args.out, _svg_document(pts, bounds, fundamental=args.project))
    return EXIT_OK


def cmd_project(args) -> int:
    doc = load_zero_file(args.infile)
    out_zeros = []
    for z in doc["zeros"]:
        w, _ = geom.reduce_to_fundamental_domain(complex(z["x"], z["y"]))
        zz = dict(z)
        zz["x"], zz["y"] = w.real, w.imag
        zz["region"] = None
        out_zeros.append(zz)
    out_zeros.sort(key=lambda r: (r["y"], r["x"]))
    doc["zeros"] = out_zeros
    doc.setdefault("meta", {})["projected"] = True
    _emit(_json_dumps(doc), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# hecke / atkin-lehner
# --------------------------------------------------------------------------

def cmd_hecke(args) -> int:
    pts = geom.hecke_points(args.p, complex(args.x, args.y))
    doc = {
        "p": args.p,
        "z": [args.x, args.y],
        "points": [[w.real, w.imag] for w in pts],
    }
    _emit(_json_dumps(doc), args.out)
    return EXIT_OK


def cmd_atkin_lehner(args) -> int:
    M = geom.atkin_lehner_matrix(args.N, args.Q)
    doc = {
        "N": args.N,
        "Q": args.Q,
        "matrix": [[M.a, M.b], [M.c, M.d]],
        "det": M.det,
    }
    if args.q1p is not None:
        chi1p = chars.character_by_index(args.q1p, args.chi1p_index)
        chi2p = chars.character_by_index(args.q2p, args.chi2p_index)
        chi1, chi2 = geom.atkin_lehner_character_swap(chi1p, chi2p, args.Q)
        doc["swap"] = {
            "q1": chi1.modulus, "chi1_exponents": list(chi1.exponents),
            "q2": chi2.modulus, "chi2_exponents": list(chi2.exponents),
        }
        if args.check_region:
            rep = geom.cusp_region_disjoint(args.N, args.Q,
                                            q2_source=args.q2p,
                                            q2_target=chi2.modulus or 1)
            doc["region_check"] = {
                "max_im": rep.max_im,
                "bound_intermediate": rep.bound_intermediate,
                "bound_target": rep.bound_target,
                "passed": rep.passed,
            }
            if not rep.passed:
                _emit(_json_dumps(doc), args.out)
                return EXIT_CERTIFICATION
    _emit(_json_dumps(doc), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def run_suite(name: str, cfg: RunConfig) -> list[diag.BoundReport]:
    params = cfg.params()
    if name == "functions":
        grid = [i / 400.0 for i in range(1, 201)]
        return [diag.check_lemma_functions(grid)]
    if name == "gamma":
        return [diag.check_incomplete_gamma(params, cfg.constants, cfg.seed)]
    if name == "section3":
        a = zf.admissible_line_offsets(cfg.q2)[0]
        return [diag.check_bounds_section3(params, a, cfg.window, seed=cfg.seed,
                                           constants=cfg.constants,
                                           opts=cfg.options)]
    if name == "section4":
        ells = zf.admissible_strip_indices(params, cfg.window)
        if not ells:
            raise ParameterError("no admissible strip index at this weight")
        return [diag.check_bounds_section4(params, ells[0], seed=cfg.seed,
                                           cfg=cfg.window, constants=cfg.constants,
                                           opts=cfg.options)]
    if name == "ratio":
        pts = [complex(0.13 + 0.11 * j, 0.5 + 0.35 * j) for j in range(5)]
        return [diag.ratio_constancy(params, pts, opts=cfg.options)]
    if name == "equidist":
        k2 = cfg.k // 2
        if (cfg.k - k2) % 2:
            k2 += 1
        a = zf.admissible_line_offsets(cfg.q2)[0]
        d_vals = {}
        for kk in (k2, cfg.k):
            p = params_from_indices(cfg.q1, cfg.chi1_index, cfg.q2,
                                    cfg.chi2_index, kk)
            recs = zf.certify_line_zeros(p, a, cfg.window, cfg.options)
            d_vals[kk] = diag.equidistribution_stats(recs, "angle", p, cfg.window)
        passed = d_vals[cfg.k] < d_vals[k2]
        return [diag.BoundReport(
            "equidistribution_trend", 2,
            d_vals[cfg.k] / d_vals[k2], passed, None,
            details={f"dstar_k{k}": v for k, v in d_vals.items()},
        )]
    raise ParameterError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    overrides = {}
    for cname in ("c1", "c2", "c3", "c4", "c5"):
        v = getattr(args, cname, None)
        if v is not None:
            overrides[cname] = v
    if overrides:
        base = asdict(cfg.constants)
        base.update(overrides)
        cfg.constants = diag.FittedConstants(**base)
    reports = []
    for suite in args.suite:
        reports.extend(run_suite(suite, cfg))
    doc = [r.to_dict() for r in reports]
    _emit(_json_dumps(doc), args.report)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CERTIFICATION


# --------------------------------------------------------------------------
# parser / entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eiszeros",
        description="Evaluate newform Eisenstein series, localize and certify "
                    "their zeros, and verify the supporting geometry and bounds.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characters", help="tabulate Dirichlet characters mod q")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--primitive-only", action="store_true")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_characters)

    p = sub.add_parser("eval", help="evaluate the series at one point")
    _add_param_flags(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--expansion", choices=("czd", "fourier"), default="czd")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", help="locate/certify zeros")
    _add_param_flags(p)
    p.add_argument("--method", choices=("lines", "strips", "scan"), default="lines")
    p.add_argument("--region", help="xmin,xmax,ymin,ymax for --method scan")
    p.add_argument("--cell-target", type=float, default=0.02, dest="cell_target")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("plot", help="render a zeros file as SVG")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--project", action="store_true",
                   help="reduce points to the standard domain first")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("project", help="map a zeros file to the standard domain")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("hecke", help="reduced Hecke points T_p(z)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("atkin-lehner", help="involution matrix and character swap")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--q1p", type=int, help="source q1'")
    p.add_argument("--chi1p-index", type=int, dest="chi1p_index", default=1)
    p.add_argument("--q2p", type=int, help="source q2'")
    p.add_argument("--chi2p-index", type=int, dest="chi2p_index", default=1)
    p.add_argument("--check-region", action="store_true", dest="check_region")
    p.add_argument("--out")
    p.set_defaults(func=cmd_atkin_lehner)

    p = sub.add_parser("verify", help="run diagnostic suites")
    _add_param_flags(p)
    p.add_argument("--suite", action="append", required=True,
                   choices=("section3", "section4", "functions", "gamma",
                            "ratio", "equidist"))
    p.add_argument("--report", help="write the report JSON here")
    for cname in ("c1", "c2", "c3", "c4", "c5"):
        p.add_argument(f"--{cname}", type=float)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        _error(exc, "validation")
        return EXIT_VALIDATION
    except (ToleranceError, NewtonError, ZeroDivisionError, OverflowError) as exc:
        _error(exc, "numeric")
        return EXIT_NUMERIC
    except (CertificationError, WindingError, ScanError) as exc:
        _error(exc, "certification")
        return EXIT_CERTIFICATION
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        _error(exc, "validation")
        return EXIT_VALIDATION
    except EiszerosError as exc:
        _error(exc, "numeric")
        return EXIT_NUMERIC


def _error(exc: Exception, kind: str):
    sys.stderr.write(_json_dumps({
        "error": kind,
        "type": type(exc).__name__,
        "message": str(exc),
    }) + "\n")


if __name__ == "__main__":
    sys.exit(main())

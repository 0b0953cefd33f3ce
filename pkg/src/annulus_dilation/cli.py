"""Command-line front end: classification, Dirichlet extension, dilation, kernel.

Inputs and reports are JSON (schema tag ``annulus-dilation/v1``); complex
numbers serialize as two-element ``[re, im]`` arrays and matrices as row-major
nested arrays.  Every report embeds the fully resolved configuration, so an
identical input and seed reproduce the report byte for byte.

Exit codes: 0 success (for ``dilate``: max residual within tolerance),
1 residual above tolerance, 2 unreadable or malformed input, 3 precondition
failure, 4 no constructive dilation path.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dilation as dil
from . import polyharmonic as ph
from . import spectral
from .calculus import MatrixTuple
from .errors import AnnulusError, DomainError, NotContractionError, PreconditionError
from .geometry import AnnulusParams

SCHEMA = "annulus-dilation/v1"

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_NO_PATH = 4


@dataclass
class JobConfig:
    r: float = 0.5
    grid_m: int = 256
    freq_n: int = 64
    box_k: int = 3
    tol: float = 1e-6
    seed: int = 0
    terms: int = 200
    table_density: int = 8
    input: str | None = None
    out: str | None = None

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("r must lie in (0, 1)")
        for name in ("grid_m", "freq_n", "box_k", "terms", "table_density"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def params(self) -> AnnulusParams:
        return AnnulusParams(self.r)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


class ParseError(Exception):
    pass


def _c2j(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _j2c(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(value[0], value[1])
    raise ParseError(f"expected a number or [re, im] pair, got {value!r}")


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[_c2j(x) for x in row] for row in np.asarray(mat)]


def _json_to_matrix(rows) -> np.ndarray:
    try:
        return np.array([[_j2c(x) for x in row] for row in rows], dtype=complex)
    except (TypeError, ParseError) as exc:
        raise ParseError(f"malformed matrix: {exc}") from exc


def _load_input(path: str | None) -> dict:
    if path is None:
        raise ParseError("this command requires --input")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read input: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("input document must be a JSON object")
    return doc


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(f"report written to {out}")
    else:
        print(text)


def _report_skeleton(cfg: JobConfig, command: str) -> dict:
    return {"schema": SCHEMA, "command": command, "config": cfg.as_dict()}


def cmd_check(cfg: JobConfig) -> int:
    doc = _load_input(cfg.input)
    if "matrix" not in doc:
        raise ParseError('check input needs a "matrix" field')
    mat = _json_to_matrix(doc["matrix"])
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParseError("matrix must be square")
    moduli = np.abs(np.linalg.eigvals(mat))
    if float(moduli.min()) <= 1e-12:
        print("precondition failure: spectrum contains 0", file=sys.stderr)
        return EXIT_PRECONDITION

    cls = spectral.classify_ar(cfg.params, mat, terms=cfg.terms)
    report = _report_skeleton(cfg, "check")
    witnesses = {}
    for key, value in cls.witnesses.items():
        if key == "misra":
            witnesses[key] = {
                "w": _c2j(value["w"]),
                "c": _c2j(value["c"]),
                "k_hat": value["k_hat"],
                "bound": value["bound"],
                "truncation_error": value["truncation_error"],
            }
        elif key == "triangular_form":
            witnesses[key] = [_c2j(v) for v in value]
        elif key == "boundary_diagonal":
            witnesses[key] = _c2j(value)
        else:
            witnesses[key] = value
    report["classification"] = {
        "is_normal": cls.is_normal,
        "ar_contraction": cls.is_ar_contraction,
        "ar_unitary": cls.is_ar_unitary,
        "witnesses": witnesses,
    }
    _emit(report, cfg.out)
    return EXIT_OK


def _face_key(face: tuple[int, ...]) -> str:
    return "".join(str(b) for b in face)


def cmd_dirichlet(cfg: JobConfig) -> int:
    doc = _load_input(cfg.input)
    if "faces" not in doc or not isinstance(doc["faces"], dict):
        raise ParseError('dirichlet input needs a "faces" object')
    faces_raw = doc["faces"]
    keys = list(faces_raw)
    if not keys:
        raise ParseError("at least one face is required")
    m = len(keys[0])
    face_samples = {}
    shape = None
    for key, grid in faces_raw.items():
        if len(key) != m or any(ch not in "01" for ch in key):
            raise ParseError(f"face key {key!r} must be a length-{m} string of 0/1")
        arr = np.asarray(grid, dtype=float)
        if arr.ndim != m:
            raise ParseError(f"face {key} grid must be {m}-dimensional")
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise ParseError(f"face {key} shape {arr.shape} differs from {shape}")
        face_samples[tuple(int(ch) for ch in key)] = arr

    order = int(doc.get("order", min(cfg.freq_n, (min(shape) - 1) // 2)))
    data = ph.BoundaryDataMD.from_face_samples(m, face_samples, order)
    u = ph.solve_dirichlet_md(cfg.params, data)
    sup = ph.sup_norm_report(u, grid_density=max(4, cfg.table_density))

    density = cfg.table_density
    radii = np.linspace(cfg.r, 1.0, density)
    angles = 2.0 * np.pi * np.arange(2 * density) / (2 * density)
    axis = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    values = ph.eval_md(u, pts)

    report = _report_skeleton(cfg, "dirichlet")
    report["m"] = m
    report["order"] = order
    report["coefficients"] = {
        _face_key(face): [
            [_c2j(x) for x in row] for row in np.atleast_2d(c)
        ]
        for face, c in u.faces.items()
    }
    report["sup_norm"] = {
        "interior_max": sup.interior_max,
        "boundary_max": sup.boundary_max,
        "max_mod_ok": sup.interior_max <= sup.boundary_max + 1e-8,
    }
    table_rows = []
    for p, v in zip(pts, values):
        row = []
        for j in range(m):
            row.extend(_c2j(p[j]))
        row.append(float(np.real(v)))
        table_rows.append(row)
    header = [f"z{j + 1}_{part}" for j in range(m) for part in ("re", "im")] + ["value"]
    report["table"] = {"header": header, "rows": table_rows}
    _emit(report, cfg.out)
    if cfg.out:
        csv_path = str(Path(cfg.out).with_suffix(".csv"))
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(table_rows)
        print(f"evaluation table written to {csv_path}")
    return EXIT_OK


def _dilation_bundle(d: dil.Dilation, report: dil.VerificationReport, cfg: JobConfig) -> dict:
    bundle: dict = {
        "dilation_dim": d.dilation_dim,
        "n_atoms": d.n_atoms,
        "factored": d.is_factored,
        "clipped_mass": report.clipped_mass,
    }
    if d.dilation_dim * d.d <= 200_000:
        bundle["V"] = _matrix_to_json(d.v_matrix())
    else:
        bundle["V"] = None
        bundle["v_omitted_reason"] = "dilation space too large for a dense isometry"
    if d.dilation_dim <= 100_000:
        bundle["U_diagonals"] = [
            [_c2j(x) for x in d.u_diag(j)] for j in range(d.m)
        ]
    else:
        bundle["U_diagonals"] = None
        bundle["u_omitted_reason"] = "dilation space too large for explicit diagonals"
    if d.n_atoms <= 100_000 and not d.is_factored:
        bundle["atoms"] = [[_c2j(x) for x in p] for p in d.block_points]
    elif d.is_factored and d.n_atoms <= 100_000:
        bundle["atoms"] = [
            [_c2j(x) for x in p]
            for c in d.components
            for p in c.measure.points
        ]
    else:
        bundle["atoms"] = None
        bundle["atoms_omitted_reason"] = "atom list too large; see U_diagonals/factored"
    rows = []
    shape = report.residuals.shape
    for idx in np.ndindex(shape):
        k = [int(i) - report.box_k for i in idx]
        rows.append({"k": k, "residual": float(report.residuals[idx])})
    bundle["residuals"] = rows
    bundle["max_residual"] = report.max_residual
    bundle["identity_residual"] = report.identity_residual
    return bundle


def cmd_dilate(cfg: JobConfig) -> int:
    doc = _load_input(cfg.input)
    if "matrices" not in doc:
        raise ParseError('dilate input needs a "matrices" field')
    mats = [_json_to_matrix(m) for m in doc["matrices"]]
    if not mats:
        raise ParseError("at least one matrix required")
    d0 = mats[0].shape[0]
    for m in mats:
        if m.shape != (d0, d0):
            raise ParseError("matrices must be square and share a dimension")

    report = _report_skeleton(cfg, "dilate")
    all_normal = all(spectral.is_normal(m) for m in mats)
    if all_normal:
        dilation, verification = dil.dilate_normal_tuple(
            mats,
            cfg.params,
            n_grid=cfg.grid_m,
            n_freq=cfg.freq_n,
            box_k=cfg.box_k,
            seed=cfg.seed,
        )
        report["path"] = "normal"
    elif d0 == 2:
        outcome = dil.dilate_dc2(
            mats,
            cfg.params,
            n_grid=cfg.grid_m,
            n_freq=cfg.freq_n,
            box_k=cfg.box_k,
            terms=cfg.terms,
            seed=cfg.seed,
        )
        if isinstance(outcome, dil.NotConstructive):
            report["path"] = "dc2"
            report["constructive"] = False
            report["certificate"] = {
                "contraction": outcome.certificate,
                "von_neumann_max_ratio": outcome.von_neumann.max_ratio,
                "note": outcome.note,
            }
            if outcome.misra is not None:
                report["certificate"]["misra"] = {
                    "k_hat": outcome.misra.k_hat,
                    "bound": outcome.misra.bound,
                    "truncation_error": outcome.misra.truncation_error,
                }
            _emit(report, cfg.out)
            print("no constructive dilation path for this input", file=sys.stderr)
            return EXIT_NO_PATH
        dilation, verification = outcome
        report["path"] = "dc2-normal"
    else:
        print(
            "no constructive path: input is neither a commuting normal tuple "
            "nor a family of 2x2 matrices",
            file=sys.stderr,
        )
        return EXIT_NO_PATH

    report["constructive"] = True
    report["bundle"] = _dilation_bundle(dilation, verification, cfg)
    report["within_tolerance"] = verification.max_residual <= cfg.tol
    _emit(report, cfg.out)
    if verification.max_residual > cfg.tol:
        print(
            f"max residual {verification.max_residual:.3e} exceeds tolerance {cfg.tol:.3e}",
            file=sys.stderr,
        )
        return EXIT_RESIDUAL
    return EXIT_OK


def cmd_kernel(cfg: JobConfig, w_text: str) -> int:
    try:
        w = complex(w_text.replace(" ", ""))
    except ValueError as exc:
        raise ParseError(f"cannot parse --w value {w_text!r}") from exc
    mb = spectral.misra_bound(cfg.params, w, terms=cfg.terms)
    a = abs(w) ** 2
    comparison = (1.0 - cfg.r**2) / ((1.0 - a) * (a - cfg.r**2))
    report = _report_skeleton(cfg, "kernel")
    report["kernel"] = {
        "w": _c2j(w),
        "k_hat": mb.k_hat,
        "bound": mb.bound,
        "truncation_error": mb.truncation_error,
        "closed_form_upper_bound": comparison,
        "margin": comparison - mb.k_hat,
        "terms": mb.terms,
    }
    _emit(report, cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annulus-dilation",
        description="classify, extend, and dilate matrix data over the annulus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("check", "classify a matrix relative to the annulus"),
        ("dirichlet", "solve the Dirichlet problem from face samples"),
        ("dilate", "construct and verify a boundary-unitary dilation"),
        ("kernel", "report the 2x2 superdiagonal bound at a point"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--r", type=float, help="inner radius (default 0.5)")
        p.add_argument("--grid-m", type=int, dest="grid_m", help="boundary grid size per circle")
        p.add_argument("--freq-n", type=int, dest="freq_n", help="frequency truncation order")
        p.add_argument("--box-k", type=int, dest="box_k", help="verification box half-width")
        p.add_argument("--tol", type=float, help="acceptance tolerance on residuals")
        p.add_argument("--seed", type=int, help="random seed for diagonalization")
        p.add_argument("--terms", type=int, help="kernel series terms per side")
        p.add_argument("--table-density", type=int, dest="table_density",
                       help="evaluation table grid density")
        p.add_argument("--input", help="input JSON file")
        p.add_argument("--out", help="output report path (default: stdout)")
        p.add_argument("--config", help="JSON config file (same keys as the flags)")
        if name == "kernel":
            p.add_argument("--w", required=True, help="interior point, e.g. '0.8' or '0.7+0.1j'")
    return parser


def _resolve_config(args: argparse.Namespace) -> JobConfig:
    values: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ParseError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(JobConfig)}
        unknown = set(file_cfg) - known
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_cfg)
    for f in dataclasses.fields(JobConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    try:
        return JobConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad configuration: {exc}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "dirichlet":
            return cmd_dirichlet(cfg)
        if args.command == "dilate":
            return cmd_dilate(cfg)
        if args.command == "kernel":
            return cmd_kernel(cfg, args.w)
        raise ParseError(f"unknown command {args.command!r}")
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotContractionError as exc:
        print(f"not a contraction: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DomainError, PreconditionError) as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except AnnulusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())

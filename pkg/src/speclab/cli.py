"""Configuration-driven experiment runner.

A single JSON document describes a list of experiments; each one names a
domain, a backend, the problem kinds, and the checks to run.  Every
experiment emits ``<name>.spectra.csv`` (the computed eigenvalues) and
``<name>.report.json`` (check verdicts).  Outputs are deterministic:
floats are rounded to 12 significant digits and files are written in
config order.

Exit status: 0 when every asserted check passes, 1 when at least one
fails, 2 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytics
from .analytic2d import disk_spectrum, rect_spectrum
from .fdlab import (
    CapDomain,
    cap_spectrum,
    disk_domain,
    fd_spectrum,
    interval_domain,
    lshape_domain,
    read_mask_file,
    rectangle_domain,
)
from .interval1d import interval_spectrum
from .spectra import MEMBRANE_KINDS, ProblemKind, Spectrum

JOBS_ENV = "SPECLAB_JOBS"

#: Which check types each verb executes.
VERB_CHECKS = {
    "spectrum": frozenset(),
    "verify": frozenset(
        {"chain", "counting-chain", "payne", "decomposition", "sharpness"}
    ),
    "weyl": frozenset({"weyl", "weyl2", "heat"}),
    "report": frozenset(
        {
            "chain",
            "counting-chain",
            "payne",
            "decomposition",
            "sharpness",
            "weyl",
            "weyl2",
            "heat",
        }
    ),
}


class ConfigError(ValueError):
    """The experiment configuration is malformed."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round12(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


@dataclass
class Experiment:
    """One validated experiment block."""

    name: str
    domain: dict
    kinds: list[ProblemKind]
    backend: dict
    count: int
    checks: list[dict] = field(default_factory=list)


@dataclass
class ExperimentResult:
    name: str
    csv_rows: list[tuple] = field(default_factory=list)
    report: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        if self.error is not None:
            return False
        return all(
            c.get("ok", True)
            for c in self.report.get("checks", [])
            if c.get("asserted")
        )


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def parse_config(text: str) -> list[Experiment]:
    """Parse and validate the JSON experiment list."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    _require(isinstance(raw, dict), "top level must be an object")
    experiments = raw.get("experiments")
    _require(isinstance(experiments, list), 'missing "experiments" list')

    known_domains = {"interval", "rect", "disk", "lshape", "cap", "mask"}
    out: list[Experiment] = []
    names: set[str] = set()
    for pos, block in enumerate(experiments):
        where = f"experiments[{pos}]"
        _require(isinstance(block, dict), f"{where} must be an object")
        name = block.get("name")
        _require(
            isinstance(name, str) and name and "/" not in name,
            f"{where} needs a file-name-safe 'name'",
        )
        _require(name not in names, f"duplicate experiment name {name!r}")
        names.add(name)

        domain = block.get("domain")
        _require(isinstance(domain, dict), f"{where}: 'domain' must be an object")
        dtype = domain.get("type")
        _require(
            dtype in known_domains,
            f"{where}: domain type must be one of {sorted(known_domains)}",
        )

        kinds_raw = block.get("kinds")
        _require(
            isinstance(kinds_raw, list) and kinds_raw,
            f"{where}: 'kinds' must be a nonempty list",
        )
        try:
            kinds = [ProblemKind(k) for k in kinds_raw]
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc

        backend = block.get("backend")
        _require(isinstance(backend, dict), f"{where}: 'backend' must be an object")
        btype = backend.get("type")
        _require(
            btype in {"analytic", "fd", "cap"},
            f"{where}: backend type must be analytic, fd or cap",
        )
        if btype == "fd":
            _require(
                dtype in {"interval", "rect", "disk", "lshape", "mask"},
                f"{where}: fd backend does not support domain {dtype!r}",
            )
            if dtype == "mask":
                _require(
                    "h" not in backend,
                    f"{where}: mask files carry their own mesh width",
                )
            else:
                hs = backend.get("h")
                _require(
                    isinstance(hs, list) and hs and all(h > 0 for h in hs),
                    f"{where}: fd backend needs a nonempty list of positive 'h'",
                )
        elif btype == "analytic":
            _require(
                dtype in {"interval", "rect", "disk"},
                f"{where}: analytic backend does not support domain {dtype!r}",
            )
            if dtype == "rect":
                bad = [k.value for k in kinds if k not in MEMBRANE_KINDS]
                _require(
                    not bad,
                    f"{where}: rectangle analytic spectra cover the membrane "
                    f"problems only, not {bad}",
                )
        else:
            _require(dtype == "cap", f"{where}: cap backend needs a cap domain")
            bad = [k.value for k in kinds if k not in MEMBRANE_KINDS]
            _require(not bad, f"{where}: cap spectra cover membrane problems only")

        count = block.get("count", 6)
        _require(
            isinstance(count, int) and count >= 1,
            f"{where}: 'count' must be a positive integer",
        )

        checks = block.get("checks", [])
        _require(isinstance(checks, list), f"{where}: 'checks' must be a list")
        for cpos, check in enumerate(checks):
            cwhere = f"{where}.checks[{cpos}]"
            _require(isinstance(check, dict), f"{cwhere} must be an object")
            ctype = check.get("type")
            _require(
                ctype in VERB_CHECKS["report"],
                f"{cwhere}: unknown check type {ctype!r}",
            )
            if ctype in {"chain", "counting-chain"}:
                _require(
                    set(kinds) == set(ProblemKind),
                    f"{cwhere}: {ctype} needs all four problem kinds",
                )
            if ctype == "payne":
                _require(
                    ProblemKind.DIRICHLET in kinds and ProblemKind.BUCKLING in kinds,
                    f"{cwhere}: payne needs dirichlet and buckling spectra",
                )
            if ctype == "decomposition":
                _require(
                    btype == "fd",
                    f"{cwhere}: decomposition runs on the fd backend",
                )
                parts = check.get("parts")
                _require(
                    isinstance(parts, list) and len(parts) >= 1,
                    f"{cwhere}: needs a nonempty 'parts' list of domain objects",
                )
            if ctype == "sharpness":
                _require(
                    dtype == "disk" and btype == "analytic",
                    f"{cwhere}: sharpness starts from unit-disk analytic spectra",
                )
                _require(
                    set(kinds) == set(ProblemKind),
                    f"{cwhere}: sharpness needs all four disk spectra",
                )
            if ctype in {"weyl", "weyl2", "heat"}:
                kind = check.get("kind")
                if kind is not None:
                    try:
                        k = ProblemKind(kind)
                    except ValueError as exc:
                        raise ConfigError(f"{cwhere}: {exc}") from exc
                    _require(
                        k in kinds, f"{cwhere}: kind {kind!r} not computed here"
                    )
            if ctype in {"weyl2", "heat"}:
                _require(
                    btype == "analytic",
                    f"{cwhere}: {ctype} needs an analytic spectrum",
                )

        out.append(
            Experiment(
                name=name,
                domain=domain,
                kinds=kinds,
                backend=backend,
                count=count,
                checks=checks,
            )
        )
    return out


def _domain_geometry(domain: dict) -> tuple[int, float | None, float | None]:
    """Dimension, volume and boundary measure when the shape defines them."""
    dtype = domain["type"]
    if dtype == "interval":
        length = float(domain["length"])
        return 1, length, 2.0
    if dtype == "rect":
        a, b = (float(domain["a"]), float(domain["b"]))
        return 2, a * b, 2.0 * (a + b)
    if dtype == "disk":
        r = float(domain.get("radius", 1.0))
        return 2, math.pi * r * r, 2.0 * math.pi * r
    if dtype == "lshape":
        a, b = (float(domain["a"]), float(domain["b"]))
        notch = float(domain.get("notch", 0.5))
        vol = a * b * (1.0 - notch * notch)
        per = 2.0 * (a + b)
        return 2, vol, per
    return 2, None, None


def _corner(domain: dict) -> tuple[float, float]:
    corner = domain.get("corner", (0.0, 0.0))
    return (float(corner[0]), float(corner[1]))


def _build_grid(domain: dict, h: float):
    dtype = domain["type"]
    if dtype == "rect":
        return rectangle_domain(
            float(domain["a"]), float(domain["b"]), h, corner=_corner(domain)
        )
    if dtype == "disk":
        center = domain.get("center", (0.0, 0.0))
        return disk_domain(
            float(domain.get("radius", 1.0)),
            h,
            center=(float(center[0]), float(center[1])),
        )
    if dtype == "lshape":
        return lshape_domain(
            float(domain["a"]),
            float(domain["b"]),
            h,
            notch=float(domain.get("notch", 0.5)),
            corner=_corner(domain),
        )
    if dtype == "interval":
        return interval_domain(float(domain["length"]), h)
    raise ConfigError(f"no grid construction for domain type {dtype!r}")


def _analytic_spectrum(domain: dict, kind: ProblemKind, count: int) -> Spectrum:
    dtype = domain["type"]
    if dtype == "interval":
        return interval_spectrum(float(domain["length"]), kind, count)
    if dtype == "rect":
        return rect_spectrum(float(domain["a"]), float(domain["b"]), kind, count)
    if dtype == "disk":
        return disk_spectrum(float(domain.get("radius", 1.0)), kind, count)
    raise ConfigError(f"no analytic spectrum for domain type {dtype!r}")


def _compute_spectra(exp: Experiment):
    """All spectra for the experiment.

    Returns (per_level, finest, uncertainties): ``per_level`` maps each
    fd mesh width (or None) to its kind-indexed spectra, ``finest`` is
    the set checks run on, and ``uncertainties`` holds two-grid error
    estimates when two or more mesh widths were given.
    """
    btype = exp.backend["type"]
    per_level: list[tuple[float | None, dict[ProblemKind, Spectrum]]] = []
    if btype == "analytic":
        spectra = {
            kind: _analytic_spectrum(exp.domain, kind, exp.count)
            for kind in exp.kinds
        }
        per_level.append((None, spectra))
    elif btype == "cap":
        cap = CapDomain(
            float(exp.domain["delta"]), int(exp.backend.get("points", 4000))
        )
        spectra = {kind: cap_spectrum(cap, kind, exp.count) for kind in exp.kinds}
        per_level.append((None, spectra))
    else:
        if exp.domain["type"] == "mask":
            grids = [read_mask_file(Path(exp.domain["path"]))]
        else:
            hs = sorted(float(h) for h in exp.backend["h"])[::-1]
            grids = [_build_grid(exp.domain, h) for h in hs]
        for grid in grids:
            spectra = {
                kind: fd_spectrum(grid, kind, exp.count) for kind in exp.kinds
            }
            per_level.append((grid.h, spectra))

    finest = per_level[-1][1]
    uncertainties = None
    if len(per_level) >= 2:
        coarse = per_level[-2][1]
        uncertainties = {
            kind: analytics.two_grid_uncertainty(coarse[kind], finest[kind], exp.count)
            for kind in exp.kinds
        }
    return per_level, finest, uncertainties


def _auto_window(spectrum: Spectrum) -> tuple[float, float]:
    edge = analytics.trusted_edge(spectrum)
    return (edge / 10.0, edge)


def _check_kind(check: dict, exp: Experiment, membrane_only: bool) -> ProblemKind:
    kind = check.get("kind")
    if kind is not None:
        kind = ProblemKind(kind)
    else:
        pool = [k for k in exp.kinds if not membrane_only or k in MEMBRANE_KINDS]
        if not pool:
            raise ConfigError(f"{check['type']}: no usable kind in this experiment")
        kind = pool[0]
    return kind


def _run_check(check: dict, exp: Experiment, finest, uncertainties) -> dict:
    ctype = check["type"]
    if ctype == "chain":
        rep = analytics.inequality_chain_check(
            finest, exp.count, uncertainties=uncertainties
        )
        return {**rep.as_dict(), "asserted": True, "ok": rep.ok}
    if ctype == "counting-chain":
        taus = check.get("taus")
        if taus is None:
            points = int(check.get("points", 50))
            edge = min(analytics.trusted_edge(s) for s in finest.values())
            taus = np.linspace(0.0, edge, points)
        rep = analytics.counting_chain_check(finest, taus)
        return {**rep.as_dict(), "asserted": True, "ok": rep.ok}
    if ctype == "payne":
        depth = exp.count - 1
        if depth < 1:
            raise ConfigError("payne needs count >= 2")
        rep = analytics.payne_scan(
            finest[ProblemKind.DIRICHLET], finest[ProblemKind.BUCKLING], depth
        )
        return {**rep.as_dict(), "asserted": False, "ok": None}
    if ctype == "decomposition":
        hs = sorted(float(h) for h in exp.backend.get("h", []))
        h = hs[0] if hs else None
        whole = (
            read_mask_file(Path(exp.domain["path"]))
            if exp.domain["type"] == "mask"
            else _build_grid(exp.domain, h)
        )
        parts = [_build_grid(d, whole.h) for d in check["parts"]]
        rep = analytics.decomposition_check(
            whole, parts, int(check.get("count", exp.count))
        )
        return {**rep.as_dict(), "asserted": True, "ok": rep.ok}
    if ctype == "sharpness":
        caps = []
        for cap_cfg in check.get("caps", []):
            cap = CapDomain(
                float(cap_cfg["delta"]), int(cap_cfg.get("points", 4000))
            )
            caps.append(
                (
                    cap.delta,
                    cap_spectrum(cap, ProblemKind.NEUMANN, 2),
                    cap_spectrum(cap, ProblemKind.DIRICHLET, 1),
                )
            )
        rep = analytics.sharpness_report(finest, caps)
        return {**rep.as_dict(), "asserted": True, "ok": rep.ok}

    dim, volume, boundary = _domain_geometry(exp.domain)
    if "volume" in check:
        volume = float(check["volume"])
    if "boundary" in check:
        boundary = float(check["boundary"])
    if volume is None:
        raise ConfigError(f"{ctype}: domain has no closed-form volume; set 'volume'")
    if ctype == "weyl":
        kind = _check_kind(check, exp, membrane_only=False)
        spectrum = finest[kind]
        window = check.get("window") or _auto_window(spectrum)
        rep = analytics.weyl_fit(spectrum, dim, volume, window)
        rtol = check.get("rtol")
        asserted = rtol is not None
        ok = abs(rep.ratio - 1.0) <= float(rtol) if asserted else None
        return {**rep.as_dict(), "asserted": asserted, "ok": ok}
    if ctype == "weyl2":
        if boundary is None:
            raise ConfigError("weyl2: set 'boundary' for this domain")
        kind = _check_kind(check, exp, membrane_only=True)
        spectrum = finest[kind]
        window = check.get("window") or _auto_window(spectrum)
        rep = analytics.weyl_two_term_fit(spectrum, dim, volume, boundary, window)
        rtol = float(check.get("rtol", 0.25))
        ok = bool(rep.second_sign_ok) and abs(rep.second_ratio - 1.0) <= rtol
        return {**rep.as_dict(), "rtol": rtol, "asserted": True, "ok": ok}
    if ctype == "heat":
        if boundary is None:
            raise ConfigError("heat: set 'boundary' for this domain")
        kind = _check_kind(check, exp, membrane_only=True)
        times = check.get("times", [0.002, 0.005, 0.01])
        rep = analytics.heat_trace_check(
            finest[kind],
            volume,
            boundary,
            times,
            dim=dim,
            rtol=float(check.get("rtol", 0.1)),
        )
        return {**rep.as_dict(), "asserted": True, "ok": rep.ok}
    raise ConfigError(f"unknown check type {ctype!r}")


def run_experiment(exp: Experiment, check_types: frozenset[str]) -> ExperimentResult:
    """Compute the experiment's spectra and run its selected checks."""
    result = ExperimentResult(name=exp.name)
    try:
        per_level, finest, uncertainties = _compute_spectra(exp)
        for h, spectra in per_level:
            for kind in exp.kinds:
                spectrum = spectra[kind]
                for idx, value in enumerate(spectrum.values, start=1):
                    result.csv_rows.append(
                        (
                            idx,
                            kind.value,
                            _fmt(float(value)),
                            spectrum.source,
                            _fmt(h) if h is not None else "",
                        )
                    )
        checks = [
            _run_check(check, exp, finest, uncertainties)
            for check in exp.checks
            if check["type"] in check_types
        ]
        result.report = _round12(
            {
                "name": exp.name,
                "domain": next(iter(finest.values())).domain,
                "count": exp.count,
                "checks": checks,
            }
        )
        result.report["ok"] = result.ok
    except Exception as exc:  # pragma: no cover - exercised via CLI tests
        result.error = f"{type(exc).__name__}: {exc}"
        result.report = {"name": exp.name, "error": result.error}
    return result


def write_outputs(results: list[ExperimentResult], out_dir: Path) -> list[Path]:
    """Emit per-experiment CSV and JSON files, in run order."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for result in results:
        if result.error is None:
            csv_path = out_dir / f"{result.name}.spectra.csv"
            with open(csv_path, "w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["k", "kind", "value", "source", "h"])
                writer.writerows(result.csv_rows)
            written.append(csv_path)
        report_path = out_dir / f"{result.name}.report.json"
        with open(report_path, "w") as handle:
            json.dump(result.report, handle, indent=2)
            handle.write("\n")
        written.append(report_path)
    return written


def run_config(
    experiments: list[Experiment],
    out_dir: Path,
    jobs: int = 1,
    check_types: frozenset[str] = VERB_CHECKS["report"],
) -> int:
    """Run all experiments and write their outputs; returns the exit code."""
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if not experiments:
        return 0
    if jobs == 1 or len(experiments) == 1:
        results = [run_experiment(exp, check_types) for exp in experiments]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(run_experiment, exp, check_types)
                for exp in experiments
            ]
            results = [f.result() for f in futures]
    write_outputs(results, out_dir)
    if any(r.error is not None for r in results):
        return 2
    if any(not r.ok for r in results):
        return 1
    return 0


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Compute membrane, plate and buckling spectra and "
        "check the relations between them.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, help_text in (
        ("spectrum", "compute spectra only"),
        ("verify", "run inequality and decomposition checks"),
        ("weyl", "run asymptotic fits and the heat trace"),
        ("report", "run every configured check"),
    ):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument("--config", required=True, help="JSON experiment file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--jobs",
            type=int,
            default=_default_jobs(),
            help=f"parallel experiments (default from ${JOBS_ENV} or 1)",
        )
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"speclab: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        experiments = parse_config(text)
        code = run_config(
            experiments,
            Path(args.out),
            jobs=args.jobs,
            check_types=VERB_CHECKS[args.verb],
        )
    except ConfigError as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"speclab: output error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())

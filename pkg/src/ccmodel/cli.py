"""Command-line front end.

Examples:
  ccmodel critical
  ccmodel table1 --format csv
  ccmodel bound --channel isovector --G 5
  ccmodel spectrum --G 2 --grid 0:3:31
  ccmodel masses --grid 0.5:10:20:log --jobs 4
  ccmodel oracle --modes 2
  ccmodel verify-all

Exit status: 0 success, 2 usage error, 3 no solution where one was
demanded, 4 tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import acceptance
from . import bound_state as bs
from . import model_core as mc
from .errors import ModelError, NoSolutionError, ToleranceError
from .oracle.suite import OracleSettings, run_oracle_suite

EXIT_OK, EXIT_USAGE, EXIT_NO_SOLUTION, EXIT_TOLERANCE = 0, 2, 3, 4

COMMANDS = ("spectrum", "masses", "vacuum", "critical", "bound", "table1", "series",
            "oracle", "verify-all")

DEFAULTS = {
    "M": 1.0, "G": None, "c": 1.0, "lam": None, "m": None, "channel": "isoscalar",
    "sector": "restored", "modes": 2, "omega_volume": 5.0, "spacing": 0.7, "grid": None,
    "format": "json", "out": None, "units": "physical", "c1_variant": "corrected",
    "jobs": None, "cache": None, "wavefunction_samples": 0, "require_solution": False,
    "criteria": None,
}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="json file with default values for any flag")
    common.add_argument("--M", type=float, help="renormalized mass")
    common.add_argument("--G", type=float, help="dimensionless coupling 2g/(Mc^2)")
    common.add_argument("--c", type=float, help="speed of light")
    common.add_argument("--lambda", dest="lam", type=float, help="bare coupling (with --m)")
    common.add_argument("--m", type=float, help="bare mass (with --lambda)")
    common.add_argument("--grid", help="lo:hi:n[:log]")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--units", choices=("physical", "bare"))
    common.add_argument("--jobs", type=int, help="worker processes for scans")
    common.add_argument("--cache", help="json-lines result cache")

    parser = argparse.ArgumentParser(prog="ccmodel", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], argument_default=argparse.SUPPRESS, help="one-particle dispersions")
    sub.add_parser("masses", parents=[common], argument_default=argparse.SUPPRESS, help="effective masses and energy gaps")
    sub.add_parser("vacuum", parents=[common], argument_default=argparse.SUPPRESS, help="vacuum energy density and phase")
    sub.add_parser("critical", parents=[common], argument_default=argparse.SUPPRESS, help="critical coupling")
    p = sub.add_parser("bound", parents=[common], argument_default=argparse.SUPPRESS, help="two-particle bound state")
    p.add_argument("--channel", choices=("isoscalar", "isovector"))
    p.add_argument("--sector", choices=("restored", "AA", "AtildeAtilde", "AAtilde"))
    p.add_argument("--c1-variant", dest="c1_variant", choices=("corrected", "printed"))
    p.add_argument("--wavefunction-samples", dest="wavefunction_samples", type=int)
    p.add_argument("--require-solution", dest="require_solution", action="store_true")
    p = sub.add_parser("table1", parents=[common], argument_default=argparse.SUPPRESS, help="bound-state table over G")
    p.add_argument("--c1-variant", dest="c1_variant", choices=("corrected", "printed"))
    sub.add_parser("series", parents=[common], argument_default=argparse.SUPPRESS, help="small-coupling series coefficients")
    p = sub.add_parser("oracle", parents=[common], argument_default=argparse.SUPPRESS, help="exact finite-mode verification report")
    p.add_argument("--modes", type=int)
    p.add_argument("--omega-volume", dest="omega_volume", type=float)
    p.add_argument("--spacing", type=float)
    p = sub.add_parser("verify-all", parents=[common], argument_default=argparse.SUPPRESS, help="run every acceptance criterion")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,5,8")
    return parser


def resolve_config(argv) -> dict:
    args = vars(build_parser().parse_args(argv))
    cfg = dict(DEFAULTS)
    path = args.pop("config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a json object")
        for key, val in loaded.items():
            key = key.replace("-", "_")
            key = "lam" if key == "lambda" else key
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = val
    cfg.update(args)
    if cfg["jobs"] is None:
        cfg["jobs"] = os.cpu_count() or 1
    return cfg


def parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise UsageError(f"grid must be lo:hi:n[:log], got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}") from exc
    if n < 1:
        raise UsageError("grid needs at least one point")
    if len(parts) == 4:
        if lo <= 0 or hi <= 0:
            raise UsageError("log grid needs positive ends")
        return np.geomspace(lo, hi, n).tolist()
    return np.linspace(lo, hi, n).tolist()


def resolve_scheme(cfg: dict, G: Optional[float] = None) -> mc.ModelScheme:
    G = cfg["G"] if G is None else G
    try:
        if G is not None:
            if cfg["lam"] is not None or cfg["m"] is not None:
                raise UsageError("give either --G (with --M) or --lambda and --m, not both")
            return mc.scheme_from_physical(float(cfg["M"]), float(G), float(cfg["c"]))
        if cfg["lam"] is not None and cfg["m"] is not None:
            return mc.renormalize(mc.BareParams(float(cfg["m"]), float(cfg["lam"]), float(cfg["c"])))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("this command needs --G, or --lambda together with --m")


class Units:
    def __init__(self, scheme: Optional[mc.ModelScheme], mode: str):
        physical = mode == "physical" and scheme is not None
        self.energy = scheme.M * scheme.c ** 2 if physical else 1.0
        self.momentum = scheme.M * scheme.c if physical else 1.0
        self.mass = scheme.M if physical else 1.0


def _scheme_fields(scheme: mc.ModelScheme) -> dict:
    d = scheme.to_dict()
    bare = d.pop("bare")
    out = {f"scheme_{k}": v for k, v in d.items()}
    out.update({f"scheme_bare_{k}": v for k, v in bare.items()})
    return out


def cmd_spectrum(cfg):
    scheme = resolve_scheme(cfg)
    u = Units(scheme, cfg["units"])
    ks = parse_grid(cfg["grid"] or "0:2:21")
    rows = []
    for branch in mc.SpectrumBranch:
        E = mc.spectrum(branch, np.asarray(ks) * u.momentum, scheme)
        for k, e in zip(ks, np.atleast_1d(E)):
            rows.append({"branch": branch.value, "k": k, "E": float(e) / u.energy})
    return rows, scheme


def _masses_row(cfg, G=None):
    scheme = resolve_scheme(cfg, G)
    u = Units(scheme, cfg["units"])
    rep = mc.masses_and_gaps(scheme).to_dict()
    for key in ("m_A", "m_Atilde", "bare_mass_from_A", "bare_mass_from_Atilde"):
        if rep[key] is not None:
            rep[key] = rep[key] / u.mass
    for key in ("E_A0", "E_Atilde0"):
        rep[key] = rep[key] / u.energy
    rep["gap_sum"] = mc.gap_sum(scheme) / u.energy
    return {"G": scheme.G, **rep, **_scheme_fields(scheme)}


def _vacuum_row(cfg, G=None):
    scheme = resolve_scheme(cfg, G)
    u = Units(scheme, cfg["units"])
    return {"G": scheme.G, "energy_density": mc.vacuum_energy_density(scheme) / u.energy,
            "energy_density_physical_form":
                mc.vacuum_energy_density_physical(scheme.M, scheme.G, scheme.c) / u.energy,
            "phase": mc.classify_phase(scheme.G, scheme.M, scheme.c).value,
            **_scheme_fields(scheme)}


def _bound_row(cfg, G=None):
    scheme = resolve_scheme(cfg, G)
    u = Units(scheme, cfg["units"])
    pair = bs.sector(scheme, cfg["sector"])
    if cfg["channel"] == "isoscalar":
        res = bs.solve_isoscalar(scheme, pair, cfg["c1_variant"])
    else:
        res = bs.solve_isovector(scheme, pair)
    row = res.to_dict()
    row["G"] = scheme.G
    row["sector"] = pair.name
    if row["chi"] is not None:
        row["chi"] = row["chi"] / u.momentum
        row["mu0"] = row["mu0"] / u.energy
    n = int(cfg["wavefunction_samples"] or 0)
    if n > 0 and res.exists and res.channel is bs.Channel.ISOSCALAR:
        wf = bs.wavefunction(scheme, res, pair)
        ks = np.linspace(0.0, scheme.Lambda, n)
        row["wavefunction"] = {"coeff_A": wf.coeff_A, "coeff_B": wf.coeff_B,
                               "self_consistency": wf.self_consistency, "l2_norm": wf.l2_norm,
                               "k": (ks / u.momentum).tolist(), "value": wf(ks).tolist()}
    row.update(_scheme_fields(scheme))
    return row


def _scan(fn, cfg):
    """Run ``fn`` at the --G value or over a G grid, order-stable."""
    if cfg["grid"] is None:
        return [fn(cfg)]
    Gs = parse_grid(cfg["grid"])
    jobs = max(1, int(cfg["jobs"]))
    if jobs > 1 and len(Gs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(Gs))) as pool:
            return list(pool.map(_call, [(fn, cfg, G) for G in Gs]))
    return [fn(cfg, G) for G in Gs]


def _call(args):
    fn, cfg, G = args
    return fn(cfg, G)


def cmd_bound(cfg):
    rows = _scan(_bound_row, cfg)
    if cfg["require_solution"] and not all(r["exists"] for r in rows):
        missing = [r["G"] for r in rows if not r["exists"]]
        raise NoSolutionError(f"no {cfg['channel']} bound state for G in {missing}",
                              {"rows": rows})
    return rows, None


def cmd_table1(cfg):
    Gs = parse_grid(cfg["grid"]) if cfg["grid"] else list(bs.REFERENCE_Z)
    rows = bs.table1(Gs, cfg["c1_variant"], int(cfg["jobs"]))
    return [r.to_dict() for r in rows], None


def cmd_series(cfg):
    alphas = parse_grid(cfg["grid"]) if cfg["grid"] else None
    fit = mc.fit_series_coefficients(alphas)
    rows = []
    for key in ("coupling", "cutoff"):
        reference = mc.REFERENCE_SERIES[key]
        for order, val in enumerate(fit[key]):
            rows.append({"series": key, "order": order, "fitted": val,
                         "reference": reference[order] if order < len(reference) else None})
    return rows, None


def cmd_oracle(cfg):
    settings = OracleSettings(n_modes=(int(cfg["modes"]),), two_particle_modes=(int(cfg["modes"]),),
                              omega_volume=float(cfg["omega_volume"]), spacing=float(cfg["spacing"]),
                              c=float(cfg["c"]))
    if cfg["lam"] is not None:
        settings.lam = float(cfg["lam"])
    if cfg["m"] is not None:
        settings.m = float(cfg["m"])
    try:
        rep = run_oracle_suite(settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not rep.passed:
        raise ToleranceError(f"{len(rep.failures())} oracle checks failed", rep.to_dict())
    return [rep.to_dict()], None


def cmd_verify_all(cfg):
    numbers = None
    if cfg["criteria"]:
        try:
            numbers = [int(x) for x in str(cfg["criteria"]).split(",")]
        except ValueError as exc:
            raise UsageError("criteria must be comma-separated integers") from exc
        bad = [n for n in numbers if n not in acceptance.CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
    results = acceptance.run_acceptance(numbers)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [r.to_dict() for r in results]
    if not all(r.passed for r in results):
        raise ToleranceError("acceptance criteria failed", rows)
    return rows, None


HANDLERS = {
    "spectrum": cmd_spectrum,
    "masses": lambda cfg: (_scan(_masses_row, cfg), None),
    "vacuum": lambda cfg: (_scan(_vacuum_row, cfg), None),
    "critical": lambda cfg: ([{"G_cr": mc.critical_coupling()}], None),
    "bound": cmd_bound,
    "table1": cmd_table1,
    "series": cmd_series,
    "oracle": cmd_oracle,
    "verify-all": cmd_verify_all,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return str(value)


def emit(records, fmt: str, metadata: Optional[dict] = None) -> str:
    """Serialize records as csv (header plus one line each) or a json document."""
    if fmt == "csv":
        header = []
        for rec in records:
            for key in rec:
                if key not in header:
                    header.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for rec in records:
            writer.writerow([_cell(rec.get(key)) for key in header])
        return buf.getvalue()
    doc = {"metadata": metadata or {}, "data": records}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _config_key(cfg: dict) -> str:
    keep = {k: v for k, v in cfg.items() if k not in ("out", "cache", "jobs", "format")}
    return hashlib.sha256(json.dumps(keep, sort_keys=True, default=str).encode()).hexdigest()


def _cache_lookup(path: str, key: str):
    p = Path(path)
    if not p.exists():
        return None
    hit = None
    for line in p.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError:
            continue
        if entry.get("key") == key:
            hit = entry
    return hit


def _cache_append(path: str, key: str, records, scheme_dict):
    with open(path, "a", encoding="utf-8") as fh:
        # insertion order is kept so replayed csv columns match a fresh run
        fh.write(json.dumps(_jsonable({"key": key, "data": records, "scheme": scheme_dict})) + "\n")


def run(cfg: dict) -> int:
    command = cfg["command"]
    key = _config_key(cfg)
    hit = _cache_lookup(cfg["cache"], key) if cfg["cache"] else None
    if hit is not None:
        records, scheme_dict = hit["data"], hit.get("scheme")
    else:
        records, scheme = HANDLERS[command](cfg)
        scheme_dict = scheme.to_dict() if scheme is not None else None
        if cfg["cache"]:
            _cache_append(cfg["cache"], key, records, scheme_dict)
    if cfg["format"] == "csv" and scheme_dict is not None:
        flat = _scheme_fields(mc.ModelScheme(mc.BareParams(**scheme_dict["bare"]),
                                             **{k: v for k, v in scheme_dict.items() if k != "bare"}))
        records = [{**r, **flat} for r in records]
    metadata = {
        "version": __version__,
        "command": command,
        "config": {k: v for k, v in sorted(cfg.items())},
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "scheme": scheme_dict,
    }
    text = emit(records, cfg["format"], metadata)
    if cfg["out"]:
        Path(cfg["out"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse already printed its message
        return int(exc.code or 0)
    try:
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSolutionError as exc:
        print(json.dumps(_jsonable({"error": str(exc), "diagnostics": exc.diagnostics}),
                         sort_keys=True), file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ToleranceError as exc:
        _write_failure(cfg, exc)
        return EXIT_TOLERANCE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _write_failure(cfg, exc: ToleranceError):
    report = exc.report if isinstance(exc.report, list) else [exc.report]
    text = emit(report, cfg["format"], {"version": __version__, "command": cfg["command"],
                                        "error": str(exc)})
    if cfg["out"]:
        Path(cfg["out"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"tolerance failure: {exc}", file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())

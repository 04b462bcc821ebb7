"""Batch runner: ``python -m boussinesq COMMAND key=value ... [config=FILE]``.

Every command writes one CSV (to ``out=PATH`` or standard output) with a
``# schema=<command>/1`` comment, a header line and 17-significant-digit
numbers.  Exit codes: 0 all checks pass, 2 a check failed, 1 usage,
configuration or I/O error.
"""
from __future__ import annotations

import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bilinear, diagnostics, solver
from .illposedness import (IllposedRegime, build_data, geometry_check_2d, inflation_sweep,
                           lemma_lower_bound_check, picard_a2, support_fraction)
from .spectral import FrequencyGrid
from .symbols import BBM, GENERIC, AbcdParams

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

COMMANDS = ("sweep", "lemmas", "geometry", "schur", "bilinear-probe", "evolve", "energy",
            "diag-check")
RANDOMIZED = {"lemmas", "bilinear-probe", "diag-check"}

ENERGY_PARAMS = AbcdParams(-1 / 3, 1 / 6, -1 / 2, 1 / 6)
NAMED_PARAMS = {"generic": GENERIC, "bbm": BBM, "energy": ENERGY_PARAMS}


class ConfigError(ValueError):
    """Bad command line or configuration file."""


class ReportError(OSError):
    """The report could not be written."""


@dataclass
class ExperimentConfig:
    command: str
    options: dict = field(default_factory=dict)
    used: set = field(default_factory=set)

    # typed accessors; every access marks the key as used
    def _raw(self, key, default):
        self.used.add(key)
        if key in self.options:
            return self.options[key]
        if default is _REQUIRED:
            raise ConfigError(f"{self.command}: missing required option {key!r}")
        return default

    def str(self, key, default=None):
        v = self._raw(key, default)
        return None if v is None else str(v)

    def float(self, key, default=None):
        v = self._raw(key, default)
        try:
            return None if v is None else float(v)
        except ValueError:
            raise ConfigError(f"option {key}={v!r} is not a number") from None

    def int(self, key, default=None):
        v = self.float(key, default)
        if v is None:
            return None
        if v != int(v):
            raise ConfigError(f"option {key}={v!r} is not an integer")
        return int(v)

    def floats(self, key, default=None):
        v = self._raw(key, default)
        if v is None:
            return None
        if isinstance(v, (list, tuple)):
            return [float(x) for x in v]
        try:
            return [float(x) for x in str(v).split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"option {key}={v!r} is not a comma-separated list") from None

    def bool(self, key, default=False):
        v = self._raw(key, default)
        if isinstance(v, bool):
            return v
        s = str(v).lower()
        if s in ("1", "true", "yes", "on"):
            return True
        if s in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"option {key}={v!r} is not a boolean")

    def unused(self) -> list:
        return sorted(set(self.options) - self.used - {"out", "force", "config"})


_REQUIRED = object()


def parse_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def parse_args(argv) -> ExperimentConfig:
    positional = [a for a in argv if "=" not in a]
    pairs = {}
    for a in argv:
        if "=" in a:
            k, v = a.split("=", 1)
            pairs[k.strip()] = v.strip()
    options = {}
    if "config" in pairs:
        options.update(parse_config_file(pairs["config"]))
    options.update(pairs)
    command = positional[0] if positional else options.pop("command", None)
    if len(positional) > 1:
        raise ConfigError(f"unexpected arguments: {positional[1:]}")
    if command is None:
        raise ConfigError("no command given; choose from " + ", ".join(COMMANDS))
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from " + ", ".join(COMMANDS))
    return ExperimentConfig(command, options)


# --- output -----------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def render_report(rows, columns, schema: str, comments=()) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def write_report(rows, path, columns, schema: str, comments=(), force: bool = False,
                 stream=None) -> None:
    """Write ``rows`` (dicts keyed by ``columns``) as CSV; ``path=None`` writes to
    ``stream`` (standard output by default)."""
    text = render_report(rows, columns, schema, comments)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    path = Path(path)
    if path.exists() and not force:
        raise ReportError(f"{path} exists; pass force=true to overwrite")
    try:
        path.write_bytes(text.encode())
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from None


def worker_count() -> int:
    default = os.cpu_count() or 1
    raw = os.environ.get("BOUSSINESQ_THREADS")
    if raw is None:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"BOUSSINESQ_THREADS={raw!r} is not an integer") from None
    return max(1, min(n, default))


def ordered_map(fn, items):
    """Thread-pool map that preserves input order."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _streams(cfg: ExperimentConfig, count: int):
    seed = cfg.int("seed", _REQUIRED)
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _params(cfg: ExperimentConfig, default: AbcdParams) -> AbcdParams:
    raw = cfg.str("params", None)
    if raw is None:
        return default
    if raw.lower() in NAMED_PARAMS:
        return NAMED_PARAMS[raw.lower()]
    vals = cfg.floats("params")
    if len(vals) != 4:
        raise ConfigError("params needs four comma-separated numbers a,b,c,d or a name")
    return AbcdParams(*vals)


def _regime(cfg: ExperimentConfig) -> IllposedRegime:
    try:
        return IllposedRegime.parse(cfg.str("regime", _REQUIRED))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --- commands ---------------------------------------------------------------


def cmd_sweep(cfg):
    regime = _regime(cfg)
    s = cfg.float("s", _REQUIRED)
    mode = cfg.str("mode", "inflation")
    Ns = cfg.floats("N", [128, 256, 512, 1024])
    if any(N < 64 for N in Ns):
        raise ConfigError("every N must be at least 64")
    if mode == "support":
        def one(N):
            data = build_data(regime, N, s)
            return support_fraction(picard_a2(regime, data), N)
        fracs = ordered_map(one, Ns)
        rows = [{"regime": regime.value, "s": s, "N": N, "t": regime.time(N),
                 "support_fraction": f, "pass": f >= 1 - 1e-12} for N, f in zip(Ns, fracs)]
        cols = ["regime", "s", "N", "t", "support_fraction", "pass"]
        return rows, cols, "sweep-support/1", [], all(r["pass"] for r in rows)
    if mode != "inflation":
        raise ConfigError(f"unknown sweep mode {mode!r} (inflation or support)")
    sprime = cfg.float("sprime", 0.0)
    if len(Ns) < 3:
        raise ConfigError("an inflation sweep needs at least three values of N")
    rep = inflation_sweep(regime, s, sprime, Ns, mapper=ordered_map)
    # at the critical regularity the check is flatness rather than a slope match
    passed = rep.flat if abs(s - regime.threshold) < 1e-12 else rep.passed
    rows = [{"regime": regime.value, "s": s, "sprime": sprime, "N": N, "t": t, "norm": v,
             "slope_fit": rep.slope, "predicted": rep.predicted, "pass": passed}
            for N, t, v in zip(rep.Ns, rep.times, rep.norms)]
    cols = ["regime", "s", "sprime", "N", "t", "norm", "slope_fit", "predicted", "pass"]
    comments = [f"quadrature_certificate={format_value(rep.certificate)}"]
    ok = passed and rep.certificate < 1e-4
    return rows, cols, "sweep/1", comments, ok


def cmd_lemmas(cfg):
    regime = _regime(cfg)
    N = cfg.float("N", 1e5)
    samples = cfg.int("samples", 10000)
    (rng,) = _streams(cfg, 1)
    rep = lemma_lower_bound_check(regime, samples, rng, N)
    rows = [{"regime": rep.regime, "N": N, "samples": samples, "min_lhs": rep.min_lhs,
             "bound": rep.bound, "violations": rep.violations}]
    comments = [] if rep.witness is None else [f"witness={rep.witness}"]
    return rows, ["regime", "N", "samples", "min_lhs", "bound", "violations"], "lemmas/1", \
        comments, rep.passed


def cmd_geometry(cfg):
    Ns = cfg.floats("N", [17, 1000])
    samples = cfg.int("samples", 0)
    rngs = _streams(cfg, len(Ns)) if samples else [None] * len(Ns)
    reps = [geometry_check_2d(N, samples, rng) for N, rng in zip(Ns, rngs)]
    rows = [{"N": r.N, "samples": r.samples, "max_cos_beta": r.max_cos_beta,
             "min_neg_p": r.min_neg_p, "violations": r.violations} for r in reps]
    cols = ["N", "samples", "max_cos_beta", "min_neg_p", "violations"]
    return rows, cols, "geometry/1", [], all(r.passed for r in reps)


def _schur_expectation(n, s, res):
    """Case I: bounded iff s >= (n-2)/2; growth exponent within 0.1 of n-2-2s."""
    crit = (n - 2) / 2
    if s >= crit:
        return res.bounded
    return (not res.bounded) and abs(res.exponent - (n - 2 - 2 * s)) <= 0.1


def cmd_schur(cfg):
    ns = [int(n) for n in cfg.floats("n", [1, 2])]
    case = cfg.str("case", "I")
    Nmax = cfg.int("Nmax", 2**20)
    s_given = cfg.floats("s", None)
    rows, ok = [], True
    for n in ns:
        crit = (n - 2) / 2
        svals = s_given or [crit + 0.5, crit, crit - 0.25, crit - 0.5]
        for s in svals:
            try:
                res = bilinear.schur_sum(bilinear.SchurConfig(n, s, Nmax), case)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            rows.append({"n": n, "s": s, "case": case, "Nmax": Nmax,
                         "sup_or_exponent": res.sup_or_exponent, "bounded": res.bounded})
            if case == "I":
                ok &= _schur_expectation(n, s, res)
    cols = ["n", "s", "case", "Nmax", "sup_or_exponent", "bounded"]
    return rows, cols, "schur/1", [], ok


def cmd_bilinear_probe(cfg):
    n = cfg.int("n", 2)
    s = cfg.float("s", 0.0)
    trials = cfg.int("trials", 200)
    points = [int(p) for p in cfg.floats("points", [256, 512] if n == 2 else [1024, 2048])]
    rngs = _streams(cfg, len(points))
    try:
        ratios = [bilinear.bilinear_ratio_probe(n, s, trials, rng, pts)
                  for pts, rng in zip(points, rngs)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = [{"n": n, "s": s, "trials": trials, "points": p, "max_ratio": r}
            for p, r in zip(points, ratios)]
    ok = all(np.isfinite(ratios))
    for a, b in zip(ratios, ratios[1:]):
        ok &= abs(b - a) / max(a, 1e-300) < 0.10
    return rows, ["n", "s", "trials", "points", "max_ratio"], "bilinear-probe/1", [], ok


def _grid(cfg, n, points, extent):
    return FrequencyGrid.make(n, cfg.int("points", points), cfg.float("extent", extent))


def cmd_evolve(cfg):
    mode = cfg.str("mode", "trajectory")
    if mode == "picard":
        regime = _regime(cfg)
        if regime not in (IllposedRegime.GEN1D, IllposedRegime.BBM2D):
            raise ConfigError("picard mode supports gen1d and bbm2d")
        n = regime.dimension
        p = _params(cfg, regime.default_params)
        grid = _grid(cfg, n, 128 if n == 1 else 64, 8 * np.pi)
        t = cfg.float("t", 0.1)
        lam = cfg.float("lambda", 1e-2)
        data = solver.gaussian_state(grid, 1.0, 1.0, eta_amplitude=0.5)
        d1, d2 = ordered_map(lambda a: solver.picard_compare(data, p, t, a), [lam, lam / 2])
        ratio = d1 / d2
        ok = 6 <= ratio <= 10
        rows = [{"regime": regime.value, "lambda": a, "defect": d, "ratio": ratio, "pass": ok}
                for a, d in ((lam, d1), (lam / 2, d2))]
        return rows, ["regime", "lambda", "defect", "ratio", "pass"], "evolve-picard/1", [], ok
    if mode != "trajectory":
        raise ConfigError(f"unknown evolve mode {mode!r} (trajectory or picard)")
    n = cfg.int("n", 1)
    p = _params(cfg, GENERIC)
    grid = _grid(cfg, n, 128 if n == 1 else 64, 8 * np.pi)
    st = solver.gaussian_state(grid, cfg.float("amplitude", 0.1), cfg.float("width", 1.0),
                               eta_amplitude=cfg.float("eta_amplitude", 0.0))
    ev = solver.EvolveConfig(cfg.float("dt", 0.01), cfg.float("T", 1.0), p,
                             save_every=cfg.int("save_every", 10),
                             nonlinear=not cfg.bool("linear", False))
    traj = solver.evolve(st, ev)
    rows = []
    for t, v in zip(traj.times, traj.states):
        c = v.coeffs
        # Parseval: int |f|^2 = (2 pi)^-n sum |f^|^2 dxi^n
        norms = np.sqrt(np.sum(np.abs(c) ** 2, axis=tuple(range(1, c.ndim))) * grid.cell
                        / (2 * np.pi) ** n)
        rows.append({"t": t, "l2_eta": norms[0], "l2_u": float(np.sqrt(np.sum(norms[1:] ** 2))),
                     "energy": solver.energy(v, p)})
    return rows, ["t", "l2_eta", "l2_u", "energy"], "evolve/1", [], True


def cmd_energy(cfg):
    n = cfg.int("n", 1)
    p = _params(cfg, ENERGY_PARAMS)
    if not solver.energy_conserved_regime(p):
        raise ConfigError("energy conservation needs b = d and a, c < 0")
    grid = _grid(cfg, n, 128 if n == 1 else 64, 8 * np.pi if n == 1 else 4 * np.pi)
    st = solver.gaussian_state(grid, cfg.float("amplitude", 0.3), cfg.float("width", 1.5),
                               eta_amplitude=cfg.float("eta_amplitude", 0.2))
    dt, T = cfg.float("dt", 0.1), cfg.float("T", 5.0)
    every = cfg.int("save_every", 5)

    def run(step):
        ev = solver.EvolveConfig(step, T, p, save_every=every * round(dt / step))
        traj = solver.evolve(st, ev)
        return solver.energy_series(traj, p)

    series, halved = ordered_map(run, [dt, dt / 2])
    drift = max(r[2] for r in series)
    drift_half = max(r[2] for r in halved)
    shrink = drift / drift_half if drift_half > 0 else float("inf")
    ok = drift < 1e-6 and shrink >= 8
    rows = [{"t": t, "E": e, "relative_drift": d} for t, e, d in series]
    comments = [f"max_drift={format_value(drift)}", f"max_drift_half_dt={format_value(drift_half)}",
                f"shrink_factor={format_value(shrink)}"]
    return rows, ["t", "E", "relative_drift"], "energy/1", comments, ok


def cmd_diag_check(cfg):
    samples = cfg.int("samples", 10000)
    rng_diag, rng_group = _streams(cfg, 2)
    rows = [{"check": "diagonalization", "regime": "generic", "dimension": 2,
             "max_error": diagnostics.diagonalization_residual(samples, rng_diag), "tol": 1e-12}]
    for r in diagnostics.semigroup_checks(rng_group):
        rows.append({"check": r.check, "regime": r.regime, "dimension": r.dimension,
                     "max_error": r.max_error, "tol": r.tol})
    for r in rows:
        r["pass"] = r["max_error"] < r["tol"]
    cols = ["check", "regime", "dimension", "max_error", "tol", "pass"]
    return rows, cols, "diag-check/1", [], all(r["pass"] for r in rows)


HANDLERS = {
    "sweep": cmd_sweep, "lemmas": cmd_lemmas, "geometry": cmd_geometry, "schur": cmd_schur,
    "bilinear-probe": cmd_bilinear_probe, "evolve": cmd_evolve, "energy": cmd_energy,
    "diag-check": cmd_diag_check,
}


def run(config: ExperimentConfig, stream=None, err=None) -> int:
    err = err or sys.stderr
    try:
        out = config.options.get("out")
        force = config.bool("force", False)
        if out is not None and Path(out).exists() and not force:
            raise ReportError(f"{out} exists; pass force=true to overwrite")
        rows, cols, schema, comments, ok = HANDLERS[config.command](config)
        extra = config.unused()
        if extra:
            raise ConfigError(f"{config.command}: unknown option(s) {', '.join(extra)}")
        write_report(rows, out, cols, schema, comments, force, stream)
    except (ConfigError, ReportError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except ValueError as exc:
        # precondition failures raised by the numerical modules
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    if not ok:
        print(f"{config.command}: check FAILED", file=err)
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help", "help"):
        print(__doc__.strip() + "\n\ncommands: " + ", ".join(COMMANDS))
        return EXIT_OK if argv else EXIT_USAGE
    try:
        cfg = parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)

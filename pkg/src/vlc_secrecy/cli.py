"""Scenario files, experiment presets and the ``vlc-secrecy`` command line.

Scenario files (.scn) are flat key/value trees with repeated ``relay``
entries::

    [source]
    position = 0 0 3
    [users]
    user_a = 0.75 0.75 0.7
    user_b = -1.25 0.75 0.7
    [eavesdropper]
    position = 0 1.5 0.7
    [relays]
    relay = 0.1 0.1 2
    [optics]
    detector_area = 1e-4
    half_angle_deg = 60
    [budget]
    amplitude = 1e7
    noise_clip_sigma = 3.0

Experiment files (.cfg) use the same syntax with an [experiment] section (see
the bundled presets).  ``run`` emits CSV with the fixed header
``scheme,mu,alpha,gamma,r1s,r2s,objective,unit,flags``; sweep experiments
prepend the sweep coordinate (e.g. ``eve_y=1.25``) to the flags column so
every row is self-describing without changing the schema.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .beamforming import af_vector, cj_vector, df_vector
from .errors import ScenarioError, VlcSecrecyError
from .geometry import OpticalParams, Point3, Scenario, build_gains
from .oracle import FeasibleSet, ScalarChannelSpec, diff_entropy, mi_secrecy_oracle, \
    output_density, random_feasible_search
from .rates import SchemeParams, af_kappa, cj_rates, df_rates, dt_rates
from .region import SCHEMES, GridSpec, boundary_sweep, sum_rate

CSV_HEADER = "scheme,mu,alpha,gamma,r1s,r2s,objective,unit,flags"
LN2 = math.log(2.0)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# Key/value file parsing.

def _parse_kv(path: Path) -> list[tuple[str, str, str, int]]:
    """(section, key, value, line_number) entries; '#' starts a comment."""
    entries = []
    section = ""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read file ({exc})") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if not section:
                raise ScenarioError(f"{path}:{lineno}: empty section name")
            continue
        if "=" not in line:
            raise ScenarioError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        if not section:
            raise ScenarioError(f"{path}:{lineno}: entry before any [section]")
        entries.append((section, key.strip().lower(), value.strip(), lineno))
    return entries


def _parse_point(path: Path, value: str, lineno: int) -> Point3:
    parts = value.split()
    if len(parts) != 3:
        raise ScenarioError(f"{path}:{lineno}: expected 3 coordinates, got {value!r}")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError as exc:
        raise ScenarioError(f"{path}:{lineno}: non-numeric coordinate in {value!r}") from exc
    return Point3(x, y, z)


def _parse_float(path: Path, value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ScenarioError(f"{path}:{lineno}: expected a number, got {value!r}") from exc


def bundled_path(kind: str, name: str) -> Path | None:
    base = resources.files("vlc_secrecy").joinpath("data", kind, name)
    try:
        if base.is_file():
            return Path(str(base))
    except OSError:
        pass
    return None


def resolve_scenario_path(name: str, relative_to: Path | None = None) -> Path:
    cand = Path(name)
    if cand.is_file():
        return cand
    if relative_to is not None and (relative_to / name).is_file():
        return relative_to / name
    bundled = bundled_path("scenarios", name)
    if bundled is not None:
        return bundled
    raise ScenarioError(f"scenario file {name!r} not found (also tried bundled presets)")


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; optics/budget default when omitted."""
    path = Path(path)
    entries = _parse_kv(path)
    points: dict[str, Point3] = {}
    relays: list[Point3] = []
    optics_kw: dict[str, float] = {}
    budget_kw: dict[str, float] = {}
    for section, key, value, lineno in entries:
        if section == "source" and key == "position":
            points["source"] = _parse_point(path, value, lineno)
        elif section == "users" and key in ("user_a", "user_b"):
            points[key] = _parse_point(path, value, lineno)
        elif section == "eavesdropper" and key == "position":
            points["eavesdropper"] = _parse_point(path, value, lineno)
        elif section == "relays" and key == "relay":
            relays.append(_parse_point(path, value, lineno))
        elif section == "optics" and key in ("detector_area", "half_angle_deg"):
            optics_kw[key] = _parse_float(path, value, lineno)
        elif section == "budget" and key in ("amplitude", "noise_clip_sigma"):
            budget_kw[key] = _parse_float(path, value, lineno)
        else:
            raise ScenarioError(f"{path}:{lineno}: unknown entry [{section}] {key}")
    missing = [k for k in ("source", "user_a", "user_b", "eavesdropper") if k not in points]
    if missing:
        raise ScenarioError(f"{path}: missing required node(s): {', '.join(missing)}")
    try:
        return Scenario(source=points["source"], user_a=points["user_a"],
                        user_b=points["user_b"], eavesdropper=points["eavesdropper"],
                        relays=tuple(relays), optics=OpticalParams(**optics_kw),
                        amplitude=budget_kw.get("amplitude", 1e7),
                        noise_clip_sigma=budget_kw.get("noise_clip_sigma", 3.0))
    except VlcSecrecyError as exc:
        raise ScenarioError(f"{path}: invariant violation: {exc}") from exc


# ---------------------------------------------------------------------------
# Experiment configuration.

KINDS = ("region", "sumrate_vs_eve_y", "sumrate_vs_snr", "sumrate_vs_relay_center",
         "sumrate_vs_relay_count")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    kind: str
    schemes: tuple[str, ...]
    values: tuple[float, ...]          # mu list / sweep coordinate values
    grid: GridSpec = GridSpec()
    af_mode: str = "dinkelbach"
    fixed_lambda: float = 1.0
    unit: str = "nats"
    seed: int = 0
    out_path: str | None = None
    layout: str = "corners"            # relay-count sweeps
    side: float = 0.1                  # half side length of the relay square
    center: Point3 = Point3(0.0, 0.0, 2.0)
    threads: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioError(f"unknown experiment kind {self.kind!r}")
        if not self.schemes:
            raise ScenarioError("schemes must be nonempty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ScenarioError(f"unknown scheme {s!r}")
        if not self.values:
            raise ScenarioError("experiment needs at least one mu / sweep value")
        if self.unit not in ("nats", "bits"):
            raise ScenarioError(f"unit must be nats or bits, got {self.unit!r}")
        if self.layout not in ("corners", "sides"):
            raise ScenarioError(f"layout must be corners or sides, got {self.layout!r}")
        if self.af_mode not in ("dinkelbach", "fixed_lambda"):
            raise ScenarioError(f"af_mode must be dinkelbach or fixed_lambda")
        if self.threads < 1:
            raise ScenarioError("threads must be >= 1")


def _values_key_for(kind: str) -> str:
    return {"region": "mu", "sumrate_vs_eve_y": "eve_y", "sumrate_vs_snr": "snr_db",
            "sumrate_vs_relay_center": "cy", "sumrate_vs_relay_count": "k"}[kind]


def load_experiment(path) -> ExperimentConfig:
    path = Path(path)
    entries = _parse_kv(path)
    exp: dict[str, str] = {}
    grid_kw: dict[str, float] = {}
    out_path = None
    for section, key, value, lineno in entries:
        if section == "experiment":
            exp[key] = value
        elif section == "grid":
            if key not in ("alpha_steps", "gamma_steps", "refine_rounds", "refine_shrink"):
                raise ScenarioError(f"{path}:{lineno}: unknown grid key {key!r}")
            grid_kw[key] = _parse_float(path, value, lineno)
        elif section == "output" and key == "path":
            out_path = value
        else:
            raise ScenarioError(f"{path}:{lineno}: unknown entry [{section}] {key}")
    kind = exp.get("kind", "region")
    if kind not in KINDS:
        raise ScenarioError(f"{path}: unknown experiment kind {kind!r}")
    if "scenario" not in exp:
        raise ScenarioError(f"{path}: [experiment] must name a scenario file")
    scenario = load_scenario(resolve_scenario_path(exp["scenario"], path.parent))
    schemes = tuple(exp.get("schemes", "DT CJ DF AF").upper().split())
    vkey = _values_key_for(kind)
    raw_values = exp.get(vkey) or exp.get("values")
    if raw_values is None:
        raise ScenarioError(f"{path}: experiment kind {kind} needs '{vkey} = ...'")
    try:
        values = tuple(float(v) for v in raw_values.split())
    except ValueError as exc:
        raise ScenarioError(f"{path}: non-numeric value in '{vkey}'") from exc
    grid = GridSpec(alpha_steps=int(grid_kw.get("alpha_steps", 101)),
                    gamma_steps=int(grid_kw.get("gamma_steps", 101)),
                    refine_rounds=int(grid_kw.get("refine_rounds", 2)),
                    refine_shrink=float(grid_kw.get("refine_shrink", 0.2)))
    af_mode, fixed_lambda = _parse_af_mode(exp.get("af_mode", "dinkelbach"))
    center = Point3(0.0, 0.0, 2.0)
    if "center" in exp:
        center = _parse_point(path, exp["center"], 0)
    return ExperimentConfig(scenario=scenario, kind=kind, schemes=schemes, values=values,
                            grid=grid, af_mode=af_mode, fixed_lambda=fixed_lambda,
                            unit=exp.get("unit", "nats"), seed=int(float(exp.get("seed", "0"))),
                            out_path=out_path, layout=exp.get("layout", "corners"),
                            side=float(exp.get("l", 0.1)), center=center)


def _parse_af_mode(text: str) -> tuple[str, float]:
    text = text.strip().lower()
    if text == "dinkelbach":
        return "dinkelbach", 1.0
    if text in ("fixed_lambda", "lambda"):
        return "fixed_lambda", 1.0
    if text.startswith("lambda="):
        return "fixed_lambda", float(text.split("=", 1)[1])
    raise ScenarioError(f"af_mode must be 'dinkelbach' or 'lambda=<value>', got {text!r}")


# ---------------------------------------------------------------------------
# Sweep construction.

def _square_layout(k: int, layout: str, side: float, center: Point3) -> tuple[Point3, ...]:
    """Relay ring: one at the center, the rest on a square of half side ``side``.

    The chosen family (corners or mid-sides) is filled first; counts beyond
    five continue into the other family, up to nine relays total.
    """
    if not 1 <= k <= 9:
        raise ScenarioError(f"relay-count sweep supports K in [1, 9], got {k}")
    corners = [(side, side), (-side, side), (side, -side), (-side, -side)]
    sides = [(side, 0.0), (0.0, side), (-side, 0.0), (0.0, -side)]
    ring = corners + sides if layout == "corners" else sides + corners
    pts = [center] + [Point3(center.x + dx, center.y + dy, center.z) for dx, dy in ring[:k - 1]]
    return tuple(pts)


def _sweep_scenarios(config: ExperimentConfig) -> list[tuple[float, Scenario]]:
    base = config.scenario
    out = []
    if config.kind == "region":
        return [(mu, base) for mu in config.values]
    for v in config.values:
        if config.kind == "sumrate_vs_eve_y":
            eve = dataclasses.replace(base.eavesdropper, y=v)
            out.append((v, dataclasses.replace(base, eavesdropper=eve)))
        elif config.kind == "sumrate_vs_snr":
            h1 = build_gains(base).h1
            out.append((v, dataclasses.replace(base, amplitude=10.0 ** (v / 20.0) / h1)))
        elif config.kind == "sumrate_vs_relay_center":
            if not base.relays:
                raise ScenarioError("relay-center sweep needs relays in the scenario")
            centroid_y = sum(r.y for r in base.relays) / len(base.relays)
            moved = tuple(dataclasses.replace(r, y=r.y + (v - centroid_y)) for r in base.relays)
            out.append((v, dataclasses.replace(base, relays=moved)))
        elif config.kind == "sumrate_vs_relay_count":
            relays = _square_layout(int(v), config.layout, config.side, config.center)
            out.append((v, dataclasses.replace(base, relays=relays)))
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def _convert(value: float, unit: str) -> float:
    return value / LN2 if unit == "bits" else value


def _run_task(args):
    """One (scheme, sweep point) unit of work; top level so pools can pickle it."""
    scheme, mu, scenario, grid, af_mode, fixed_lambda, prefix, unit = args
    from .region import optimize_point
    pt = optimize_point(scheme, scenario, mu, grid, af_mode, fixed_lambda)
    flags = prefix + list(pt.flags)
    return ",".join([
        pt.scheme, _fmt(pt.mu), _fmt(pt.alpha_star), _fmt(pt.gamma_star),
        _fmt(_convert(pt.r1s, unit)), _fmt(_convert(pt.r2s, unit)),
        _fmt(_convert(pt.objective, unit)), unit, ";".join(flags)])


def run_experiment(config: ExperimentConfig) -> list[str]:
    """Execute the configured sweep; returns CSV rows (header first).

    Rows are emitted in deterministic order: schemes in canonical order, then
    sweep values ascending.  When ``out_path`` is set the rows are written
    there as well.
    """
    points = _sweep_scenarios(config)
    vkey = _values_key_for(config.kind)
    ordered_schemes = [s for s in SCHEMES if s in config.schemes]
    tasks = []
    for scheme in ordered_schemes:
        for value, scn in sorted(points, key=lambda t: t[0]):
            if config.kind == "region":
                mu, prefix = value, []
            else:
                mu, prefix = 0.5, [f"{vkey}={_fmt(value)}"]
            tasks.append((scheme, mu, scn, config.grid, config.af_mode,
                          config.fixed_lambda, prefix, config.unit))
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]
    out = [CSV_HEADER] + rows
    if config.out_path:
        Path(config.out_path).write_text("\n".join(out) + "\n")
    return out


# ---------------------------------------------------------------------------
# Oracle soundness suite.

def _oracle_suite(scenario: Scenario, seed: int, samples: int = 2000,
                  report=print) -> bool:
    """Density validity, closed-form soundness and beamformer optimality checks."""
    g = build_gains(scenario)
    amp = scenario.amplitude
    ok = True

    def check(name: str, passed: bool, detail: str = ""):
        nonlocal ok
        ok &= passed
        report(f"{'PASS' if passed else 'FAIL'}  {name}{'  ' + detail if detail else ''}")

    spec = ScalarChannelSpec(gain=g.h1, alpha=0.6, amplitude=amp, component="superposition")
    ys = np.linspace(-sum(spec.half_widths()) - 8, sum(spec.half_widths()) + 8, 20001)
    mass = float(np.trapezoid(output_density(spec, ys), ys))
    check("density normalization", abs(mass - 1.0) < 1e-6, f"mass={mass:.9f}")
    var = float(np.trapezoid(output_density(spec, ys) * ys ** 2, ys))
    check("density variance", abs(var / spec.variance() - 1.0) < 1e-4,
          f"quadrature={var:.6g} analytic={spec.variance():.6g}")
    hval = diff_entropy(spec)
    upper = 0.5 * math.log(2 * math.pi * math.e * spec.variance())
    lower = 0.5 * math.log(sum(4 * w * w for w in spec.half_widths()) + 2 * math.pi * math.e)
    check("entropy bounds", lower - 1e-9 <= hval <= upper + 1e-9,
          f"{lower:.6f} <= {hval:.6f} <= {upper:.6f}")

    for alpha in (0.2, 0.5, 0.8):
        closed = dt_rates(g, alpha, amp)
        exact = mi_secrecy_oracle(g, alpha, amp)
        check(f"direct-transmission soundness alpha={alpha}",
              closed.r1s <= exact[0] + 1e-6 and closed.r2s <= exact[1] + 1e-6,
              f"closed=({closed.r1s:.6f},{closed.r2s:.6f}) exact=({exact[0]:.6f},{exact[1]:.6f})")

    if g.relay_count >= 3:
        try:
            jam = cj_vector(g)
            for alpha, gamma in ((0.5, 0.4), (0.8, 0.7)):
                p = SchemeParams(alpha=alpha, gamma=gamma)
                closed = cj_rates(g, p, amp, jam.weights)
                exact = mi_secrecy_oracle(g, alpha, p.a_gamma(amp),
                                          jam_gain=abs(float(g.ge @ jam.weights)),
                                          jam_amplitude=p.a_bar(amp))
                check(f"jamming soundness alpha={alpha} gamma={gamma}",
                      closed.r1s <= exact[0] + 1e-6 and closed.r2s <= exact[1] + 1e-6,
                      f"closed=({closed.r1s:.6f},{closed.r2s:.6f}) "
                      f"exact=({exact[0]:.6f},{exact[1]:.6f})")

            _, best = random_feasible_search(
                lambda v: float(g.ge @ v) ** 2,
                FeasibleSet(null_vectors=(tuple(g.g1), tuple(g.g2))), samples, seed)
            mine = float(g.ge @ jam.weights) ** 2
            check("jamming beamformer beats random search", mine >= best - 1e-12,
                  f"designed={mine:.6e} sampled={best:.6e}")
        except VlcSecrecyError as exc:
            check("jamming checks", False, f"skipped: {exc}")

    if g.relay_count >= 2:
        alpha = 0.5
        d = df_vector(g, alpha)
        obj = alpha * float(g.g1 @ d.weights) ** 2 + (1 - alpha) * float(g.g2 @ d.weights) ** 2
        _, best = random_feasible_search(
            lambda v: alpha * float(g.g1 @ v) ** 2 + (1 - alpha) * float(g.g2 @ v) ** 2,
            FeasibleSet(null_vectors=(tuple(g.ge),)), samples, seed + 1)
        check("decode-forward beamformer beats random search", obj >= best - 1e-12,
              f"designed={obj:.6e} sampled={best:.6e}")

        p = SchemeParams(alpha=0.5, gamma=0.6)
        a = af_vector(g, 0.5, p, amp, mode="fixed_lambda", lam=1.0,
                      noise_clip_sigma=scenario.noise_clip_sigma)
        k1, k2 = af_kappa(g, a.weights)
        check("amplify-forward effective gains exceed direct gains",
              k1 >= g.h1 ** 2 and k2 >= g.h2 ** 2)
    return ok


# ---------------------------------------------------------------------------
# Entry point.

def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized checks")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vlc-secrecy",
                                     description="Secrecy-rate experiments for a relay-aided "
                                                 "VLC broadcast channel")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured experiment, emitting CSV")
    run_p.add_argument("--config", required=True, help="experiment .cfg file")
    run_p.add_argument("--out", default=None, help="output CSV path (overrides config)")
    run_p.add_argument("--grid", default=None, metavar="AxG",
                       help="alpha x gamma grid steps, e.g. 51x51")
    run_p.add_argument("--unit", choices=("nats", "bits"), default=None)
    run_p.add_argument("--af-mode", default=None,
                       help="dinkelbach (default) or lambda=<value>")
    run_p.add_argument("--threads", type=int, default=None,
                       help="parallel sweep workers (default: VLC_SECRECY_THREADS or 1)")
    _add_common(run_p)

    val_p = sub.add_parser("validate", help="parse and validate a scenario file")
    val_p.add_argument("--scenario", required=True)

    orc_p = sub.add_parser("oracle", help="run the numerical soundness suite on a scenario")
    orc_p.add_argument("--scenario", required=True)
    orc_p.add_argument("--samples", type=int, default=2000)
    _add_common(orc_p)

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            scenario = load_scenario(resolve_scenario_path(args.scenario))
            g = build_gains(scenario)
            print(f"scenario ok: K={scenario.relay_count} relays, "
                  f"h1={g.h1:.6e}, h2={g.h2:.6e}, he={g.he:.6e}, swapped={g.swapped}")
            return EXIT_OK
        if args.command == "oracle":
            scenario = load_scenario(resolve_scenario_path(args.scenario))
            seed = 0 if args.seed is None else args.seed
            return EXIT_OK if _oracle_suite(scenario, seed, args.samples) else EXIT_NUMERICAL
        # run
        config = load_experiment(Path(args.config))
        updates = {}
        if args.out:
            updates["out_path"] = args.out
        if args.unit:
            updates["unit"] = args.unit
        if args.grid:
            try:
                a_steps, g_steps = (int(x) for x in args.grid.lower().split("x"))
            except ValueError:
                raise ScenarioError(f"--grid expects AxG (e.g. 51x51), got {args.grid!r}")
            updates["grid"] = dataclasses.replace(config.grid, alpha_steps=a_steps,
                                                  gamma_steps=g_steps)
        if args.af_mode:
            mode, lam = _parse_af_mode(args.af_mode)
            updates["af_mode"] = mode
            updates["fixed_lambda"] = lam
        if args.seed is not None:
            updates["seed"] = args.seed
        threads = args.threads
        if threads is None:
            threads = int(os.environ.get("VLC_SECRECY_THREADS", "1"))
        updates["threads"] = threads
        config = dataclasses.replace(config, **updates)
        rows = run_experiment(config)
        if not config.out_path:
            sys.stdout.write("\n".join(rows) + "\n")
        return EXIT_OK
    except ScenarioError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VlcSecrecyError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

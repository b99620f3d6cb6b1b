"""Scenario files: JSON declarations of a run, and the bundled registry.

A scenario is a JSON object::

    {
      "name": "ball-lebesgue-sym",
      "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.5, "q2": 0.5,
                 "mode": "integral", "K": 1},
      "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
      "grid": {"r_min": 0.01, "r_max": 100, "points": 64, "spacing": "log"},
      "solver": {"tol": 1e-8, "max_steps": 500, "kappa_hint": 1},
      "checks": ["converged", "monotone", "sandwich", "lower_bound"],
      "out": "optional/output/dir"
    }

Measure variants and their fields:

* ``zero``: ``n``
* ``dirac``: ``location`` (n reals) or ``n``; optional ``weight``
* ``atomic``: ``locations`` (list of points), ``weights``
* ``ball_lebesgue``: ``radius``, ``density``, optional ``center``
* ``radial_density``: ``r``, ``values`` (tabulated profile), ``tail_exponent``,
  ``inner_exponent``, optional ``support_radius``
* ``scaled``: ``base`` (a measure), ``factor``
* ``weighted``: ``base``, ``weight`` (a radial function as for
  ``radial_density``), ``exponent``

For ``ball_lebesgue`` without a center the dimension comes from ``params.n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import measures as M
from .errors import InvalidArgument
from .params import Params
from .radial import RadialFunction, log_grid

CHECK_IDS = ("finiteness", "converged", "monotone", "barrier", "sandwich",
             "weaker_condition", "kappa", "lower_bound", "local_integrability",
             "capacity_ball_scaling")


class ScenarioError(InvalidArgument):
    """The scenario file is malformed (parse-level problem)."""

    code = "parse-error"


@dataclass
class GridSpec:
    r_min: float = 1e-2
    r_max: float = 1e2
    points: int = 64
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing != "log":
            raise ScenarioError(f"unsupported grid spacing {self.spacing!r}")
        if not self.r_min > 0 or not self.r_max > self.r_min:
            raise ScenarioError(f"bad grid range [{self.r_min}, {self.r_max}]")
        if int(self.points) < 16:
            raise ScenarioError("grid needs at least 16 points")
        self.points = int(self.points)

    def radii(self):
        return log_grid(self.r_min, self.r_max, self.points)

    @classmethod
    def parse(cls, text):
        """``"min:max:points"`` as on the command line."""
        try:
            a, b, c = text.split(":")
            return cls(float(a), float(b), int(c))
        except ValueError as e:
            raise ScenarioError(f"--grid expects min:max:points, got {text!r}") from e


@dataclass
class Scenario:
    name: str
    params: Params
    measure: object
    measure_decl: dict
    grid: GridSpec | None = None
    tol: float = 1e-8
    max_steps: int = 500
    kappa_hint: float = 1.0
    checks: list = field(default_factory=list)
    out: str | None = None

    def to_dict(self):
        d = {"name": self.name, "params": self.params.to_dict(), "measure": self.measure_decl,
             "solver": {"tol": self.tol, "max_steps": self.max_steps, "kappa_hint": self.kappa_hint},
             "checks": list(self.checks)}
        if self.grid is not None:
            d["grid"] = {"r_min": self.grid.r_min, "r_max": self.grid.r_max,
                         "points": self.grid.points, "spacing": self.grid.spacing}
        return d


def _radial_function(d):
    r = np.asarray(d["r"], float)
    vals = np.asarray(d["values"], float)
    return RadialFunction(r, vals, d.get("tail_exponent"), d.get("inner_exponent", 0.0),
                          tuple(d.get("breaks", ())))


def _fields(d, allowed, where):
    extra = set(d) - set(allowed) - {"variant"}
    if extra:
        raise ScenarioError(f"unknown field(s) {sorted(extra)} in {where}")


def build_measure(decl, n=None):
    """Measure object from its JSON declaration."""
    if not isinstance(decl, dict) or "variant" not in decl:
        raise ScenarioError("a measure declaration needs a 'variant' field")
    v = str(decl["variant"]).lower().replace("-", "_")
    try:
        if v == "zero":
            _fields(decl, ("n",), "zero measure")
            return M.zero_measure(int(decl.get("n", n)))
        if v == "dirac":
            _fields(decl, ("location", "weight", "n"), "dirac")
            loc = decl.get("location")
            if loc is None:
                loc = np.zeros(int(decl.get("n", n)))
            return M.dirac(loc, float(decl.get("weight", 1.0)))
        if v == "atomic":
            _fields(decl, ("locations", "weights"), "atomic")
            return M.Atomic(np.asarray(decl["locations"], float), np.asarray(decl["weights"], float))
        if v == "ball_lebesgue":
            _fields(decl, ("center", "radius", "density", "n"), "ball_lebesgue")
            c = decl.get("center")
            if c is None:
                c = np.zeros(int(decl.get("n", n)))
            return M.BallLebesgue(np.asarray(c, float), float(decl.get("radius", 1.0)),
                                  float(decl.get("density", 1.0)))
        if v == "radial_density":
            _fields(decl, ("r", "values", "tail_exponent", "inner_exponent", "breaks",
                           "support_radius"), "radial_density")
            return M.RadialDensity(_radial_function(decl), float(decl.get("support_radius", np.inf)))
        if v == "scaled":
            _fields(decl, ("base", "factor"), "scaled")
            return M.scale_measure(build_measure(decl["base"], n), float(decl["factor"]))
        if v == "weighted":
            _fields(decl, ("base", "weight", "exponent"), "weighted")
            return M.weight_measure(build_measure(decl["base"], n), _radial_function(decl["weight"]),
                                    float(decl["exponent"]))
    except KeyError as e:
        raise ScenarioError(f"measure variant {v!r} is missing field {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidArgument):
            raise
        raise ScenarioError(f"bad field in measure {v!r}: {e}") from e
    raise ScenarioError(f"unknown measure variant {decl['variant']!r}")


def measure_shorthand(name, n):
    """Measures reachable from ``--measure`` without a scenario file."""
    key = name.lower().replace("_", "-")
    if key == "dirac":
        return {"variant": "dirac", "n": n}
    if key == "zero":
        return {"variant": "zero", "n": n}
    if key in ("ball", "ball-lebesgue", "unit-ball"):
        return {"variant": "ball_lebesgue", "n": n, "radius": 1.0, "density": 1.0}
    raise ScenarioError(f"unknown --measure {name!r} (dirac, zero or ball; use --scenario otherwise)")


_TOP = ("name", "params", "measure", "grid", "solver", "checks", "out")


def from_dict(d, name=None):
    if not isinstance(d, dict):
        raise ScenarioError("a scenario must be a JSON object")
    _fields(d, _TOP, "scenario")
    for key in ("params", "measure"):
        if key not in d:
            raise ScenarioError(f"scenario is missing {key!r}")
    pd = dict(d["params"])
    _fields(pd, ("n", "p", "alpha", "q1", "q2", "mode", "K"), "params")
    try:
        params = Params(int(pd["n"]), float(pd["p"]), float(pd["alpha"]), float(pd.get("q1", 0.5)),
                        float(pd.get("q2", 0.5)), str(pd.get("mode", "integral")),
                        float(pd.get("K", 1.0)))
    except KeyError as e:
        raise ScenarioError(f"params is missing {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"bad params: {e}") from e
    grid = None
    if "grid" in d:
        g = dict(d["grid"])
        _fields(g, ("r_min", "r_max", "points", "spacing"), "grid")
        grid = GridSpec(**g)
    s = dict(d.get("solver", {}))
    _fields(s, ("tol", "max_steps", "kappa_hint"), "solver")
    checks = list(d.get("checks", []))
    unknown = [c for c in checks if c not in CHECK_IDS]
    if unknown:
        raise ScenarioError(f"unknown check id(s) {unknown}; known: {', '.join(CHECK_IDS)}")
    return Scenario(str(d.get("name", name or "scenario")), params, None, d["measure"], grid,
                    float(s.get("tol", 1e-8)), int(s.get("max_steps", 500)),
                    float(s.get("kappa_hint", 1.0)), checks, d.get("out"))


def materialize(sc):
    """Build the measure object (kept separate so parse errors come first)."""
    if sc.measure is None:
        sc.measure = build_measure(sc.measure_decl, sc.params.n)
    return sc


def load(path):
    """Scenario from a JSON file, or from the bundled registry by name."""
    p = Path(path)
    if not p.exists():
        if str(path) in BUNDLED:
            return from_dict(BUNDLED[str(path)])
        raise ScenarioError(f"no scenario file {str(path)!r} (bundled: {', '.join(BUNDLED)})")
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{p}: {e}") from e
    return from_dict(d, name=p.stem)


_SOLVE_CHECKS = ["finiteness", "converged", "monotone", "barrier", "sandwich",
                 "weaker_condition", "lower_bound"]

BUNDLED = {
    "zero-measure": {
        "name": "zero-measure",
        "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.5, "q2": 0.5},
        "measure": {"variant": "zero", "n": 3},
        "grid": {"r_min": 0.01, "r_max": 100, "points": 32},
        "checks": ["finiteness", "converged", "sandwich"],
    },
    "ball-lebesgue-sym": {
        "name": "ball-lebesgue-sym",
        "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.5, "q2": 0.5},
        "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
        "grid": {"r_min": 0.01, "r_max": 100, "points": 64},
        "solver": {"tol": 1e-8},
        "checks": _SOLVE_CHECKS + ["kappa"],
    },
    "ball-lebesgue-asym": {
        "name": "ball-lebesgue-asym",
        "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.3, "q2": 0.8},
        "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
        "grid": {"r_min": 0.01, "r_max": 100, "points": 64},
        "checks": _SOLVE_CHECKS,
    },
    "ball-p3-fractional": {
        "name": "ball-p3-fractional",
        "params": {"n": 3, "p": 3, "alpha": 0.5, "q1": 1.0, "q2": 0.5},
        "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
        "grid": {"r_min": 0.01, "r_max": 100, "points": 64},
        "checks": _SOLVE_CHECKS,
    },
    "pde-ball-K2": {
        "name": "pde-ball-K2",
        "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.5, "q2": 0.5,
                   "mode": "pde_equivalent", "K": 2},
        "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
        "grid": {"r_min": 0.01, "r_max": 100, "points": 64},
        "checks": _SOLVE_CHECKS,
    },
    "pde-p-equals-n": {
        "name": "pde-p-equals-n",
        "params": {"n": 3, "p": 3, "alpha": 1, "q1": 0.5, "q2": 0.5,
                   "mode": "pde_equivalent", "K": 1},
        "measure": {"variant": "ball_lebesgue", "radius": 1, "density": 1},
        "checks": ["converged"],
    },
    "dirac": {
        "name": "dirac",
        "params": {"n": 3, "p": 2, "alpha": 1, "q1": 0.5, "q2": 0.5},
        "measure": {"variant": "dirac", "n": 3},
        "checks": ["finiteness", "converged"],
    },
}

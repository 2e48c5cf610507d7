"""Derivative-free maximization of quantum Bell values over planar angles.

Parameters are the azimuths phi_j plus the included angles theta_j (so
phi_j' = phi_j + theta_j); both objectives depend only on the theta_j, which
keeps a flat landscape along the phi directions that the simplex walks
harmlessly.  Two objectives:

* "planar_spectral_max"  — largest eigenvalue of B^2, closed form;
* "ghz_expectation"      — <GHZ|B|GHZ> at phase sum phi_j + pi/2, closed form
  (Re prod(1 + i e^(-i theta_j)) - Re prod(1 + i e^(i theta_j))) / 2.

Both peak at theta_j = pi/2 everywhere: 2^(2(n-1)) for the square, 2^(n-1)
for the expectation.  Restarts are seeded and sequential, so results are
bit-for-bit reproducible for a given config.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bell import planar_spectral_max
from .settings import PlanarSettings, wrap_angle

OBJECTIVES = ("planar_spectral_max", "ghz_expectation")

_OBJECTIVE_N_RANGE = {"planar_spectral_max": (3, 20), "ghz_expectation": (3, 12)}


def objective_eval(planar: PlanarSettings, objective: str) -> float:
    """Evaluate one objective at explicit planar settings."""
    if objective == "planar_spectral_max":
        return planar_spectral_max(planar)
    if objective == "ghz_expectation":
        w = 1.0 + 0.0j
        v = 1.0 + 0.0j
        for theta in planar.included_angles:
            w *= 1.0 + 1j * cmath.exp(1j * theta)
            v *= 1.0 + 1j * cmath.exp(-1j * theta)
        return 0.5 * (v.real - w.real)
    raise ValueError(f"unknown objective {objective!r}")


def quantum_ceiling(n: int, objective: str) -> float:
    """Analytic maximum of each objective: 2^(2(n-1)) or 2^(n-1)."""
    if objective == "planar_spectral_max":
        return float(2 ** (2 * (n - 1)))
    if objective == "ghz_expectation":
        return float(2 ** (n - 1))
    raise ValueError(f"unknown objective {objective!r}")


@dataclass(frozen=True)
class OptimizeConfig:
    n: int
    objective: str = "planar_spectral_max"
    restarts: int = 8
    max_iters: int = 4000
    seed: int = 0
    value_tol: float = 1e-10
    simplex_tol: float = 1e-8
    pinned_zero: tuple[int, ...] = ()

    def validate(self) -> None:
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        lo, hi = _OBJECTIVE_N_RANGE[self.objective]
        if not lo <= self.n <= hi:
            raise ValueError(
                f"n={self.n} outside {lo}..{hi} for objective {self.objective}"
            )
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        pins = self.pinned_zero
        if len(set(pins)) != len(pins) or any(not 1 <= j <= self.n for j in pins):
            raise ValueError("pinned particles must be distinct indices in 1..n")
        if len(pins) > self.n - 3:
            raise ValueError("at most n-3 included angles may be pinned to zero")


@dataclass(frozen=True)
class RestartOutcome:
    value: float
    angles: PlanarSettings
    iterations: int
    converged: bool


@dataclass(frozen=True)
class OptimizeResult:
    best_value: float
    best_angles: PlanarSettings
    best_index: int
    iterations: int
    converged: bool
    outcomes: tuple[RestartOutcome, ...]


def _nelder_mead(func, x0, max_iters, value_tol, simplex_tol):
    """Minimize func; reflection 1, expansion 2, contraction 0.5, shrink 0.5.

    Converged when the simplex diameter drops below simplex_tol or the
    function spread across vertices drops below value_tol.
    """
    dim = len(x0)
    step = 0.5
    simplex = [np.array(x0, dtype=float)]
    for i in range(dim):
        vertex = np.array(x0, dtype=float)
        vertex[i] += step
        simplex.append(vertex)
    values = [func(v) for v in simplex]

    iterations = 0
    converged = False
    while iterations < max_iters:
        order = sorted(range(dim + 1), key=lambda i: values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]

        diameter = max(
            float(np.max(np.abs(simplex[i] - simplex[0]))) for i in range(1, dim + 1)
        )
        if diameter < simplex_tol or values[-1] - values[0] < value_tol:
            converged = True
            break
        iterations += 1

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_reflected = func(reflected)
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_expanded = func(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_contracted = func(contracted)
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                best = simplex[0]
                simplex = [best] + [best + 0.5 * (v - best) for v in simplex[1:]]
                values = [values[0]] + [func(v) for v in simplex[1:]]

    order = sorted(range(dim + 1), key=lambda i: values[i])
    return simplex[order[0]], values[order[0]], iterations, converged


def optimize_angles(config: OptimizeConfig) -> OptimizeResult:
    """Seeded multi-restart Nelder-Mead maximization of the configured objective.

    Ties between restarts resolve to the lowest restart index; best_value is
    re-evaluated through objective_eval at the reported angles, so the two
    always agree exactly.
    """
    config.validate()
    n = config.n
    pinned = set(config.pinned_zero)
    free = [j for j in range(1, n + 1) if j not in pinned]

    def unpack(x: np.ndarray) -> PlanarSettings:
        phis = x[:n]
        theta_of = dict(zip(free, x[n:]))
        angles = []
        for j in range(1, n + 1):
            phi = wrap_angle(float(phis[j - 1]))
            theta = theta_of.get(j, 0.0)
            angles.append((phi, wrap_angle(phi + float(theta))))
        return PlanarSettings(tuple(angles))

    def negated(x: np.ndarray) -> float:
        return -objective_eval(unpack(x), config.objective)

    rng = np.random.default_rng(config.seed)
    outcomes = []
    for _ in range(config.restarts):
        x0 = rng.uniform(-math.pi, math.pi, size=n + len(free))
        x_best, f_best, iterations, converged = _nelder_mead(
            negated, x0, config.max_iters, config.value_tol, config.simplex_tol
        )
        angles = unpack(x_best)
        outcomes.append(
            RestartOutcome(
                value=objective_eval(angles, config.objective),
                angles=angles,
                iterations=iterations,
                converged=converged,
            )
        )

    best_index = 0
    for i, outcome in enumerate(outcomes):
        if outcome.value > outcomes[best_index].value:
            best_index = i
    best = outcomes[best_index]
    return OptimizeResult(
        best_value=best.value,
        best_angles=best.angles,
        best_index=best_index,
        iterations=best.iterations,
        converged=best.converged,
        outcomes=tuple(outcomes),
    )

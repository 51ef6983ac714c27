"""Decoherence thresholds: critical lattice sizes and the maximum interrogation time.

Two separate questions. solve_decoherence_size asks how large the lattice
must be before the gravitational phase spread across it reaches the quantum
projection noise (closed-form algebra). solve_tau_max asks how long a given
ensemble can be interrogated before the dephasing-induced error in the
measured phase reaches the per-layer standard quantum limit (bracketing plus
bisection on the layer-sum model).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import ClockSpecies, PhysicalConstants, YB, per_layer_phase_rate
from .dephasing import Convention, _symmetric_offsets, effective_phase_rate

TAU_CAP_S = 1e9
_SCAN_POINTS_PER_DECADE = 32
_BISECT_MAX_ITER = 200
_BISECT_REL_TOL = 1e-6
_RESIDUAL_REL_TOL = 1e-4


class Partition(enum.Enum):
    """Which two subsystems the coherence is defined between.

    PER_LAYER compares adjacent-layer QPN with the full-span redshift;
    HALVES compares the half-ensemble QPN (N/2 ~ n^3/2 atoms) with the
    full-span redshift. The HALVES equation is a reconstruction pinned to
    the documented critical size (165), not a stated formula; outputs label
    it as such.
    """

    PER_LAYER = "per-layer"
    HALVES = "halves"

    @classmethod
    def from_wire(cls, text: str) -> "Partition":
        for member in cls:
            if member.value == text:
                return member
        options = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown partition {text!r}; expected one of: {options}")


@dataclass(frozen=True)
class ThresholdProblem:
    """Inputs for the critical-size equation."""

    species: ClockSpecies = YB
    consts: PhysicalConstants = PhysicalConstants()
    tau: float = 30.0
    partition: Partition = Partition.PER_LAYER
    convention: Convention = Convention.PHYSICAL
    layer_spacing: float | None = None  # None -> magic wavelength / 2

    def __post_init__(self) -> None:
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if self.layer_spacing is not None and not (
            self.layer_spacing > 0 and math.isfinite(self.layer_spacing)
        ):
            raise ValueError(f"layer_spacing must be positive, got {self.layer_spacing!r}")

    @property
    def spacing(self) -> float:
        if self.layer_spacing is not None:
            return self.layer_spacing
        return self.species.default_layer_spacing


@dataclass(frozen=True)
class SizeSolution:
    """Real root of the size equation and its rounded integer."""

    n_star: float
    n_int: int
    partition: Partition
    convention: Convention
    tau: float


def solve_decoherence_size(problem: ThresholdProblem) -> SizeSolution:
    """Lattice size at which the gravitational phase spread equals the QPN.

    PER_LAYER solves 1/(omega0 tau n) = g n d / c^2, closed form
    n = sqrt(c^2 / (omega0 tau g d)). HALVES replaces the left side with the
    SQL of half the ensemble, 1/(omega0 tau sqrt(n^3/2)), giving
    n = (sqrt(2) c^2 / (omega0 tau g d))^(2/5). The size equation uses the
    physical per-layer redshift directly, so the convention tag is metadata
    only.
    """
    k = problem.consts.c**2 / (
        problem.species.omega0 * problem.tau * problem.consts.g * problem.spacing
    )
    if problem.partition is Partition.PER_LAYER:
        n_star = math.sqrt(k)
    else:
        n_star = (math.sqrt(2.0) * k) ** 0.4
    return SizeSolution(
        n_star=n_star,
        n_int=round(n_star),
        partition=problem.partition,
        convention=problem.convention,
        tau=problem.tau,
    )


def decoherence_atom_count(n: int) -> int:
    """Total atoms of the cubic ensemble at size n: n^2 (n + 1), exact integer.

    The cube shorthand n^3 differs from this by a factor (n+1)/n, about 0.6%
    at n = 165; this function is always n^2 (n + 1).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n * n * (n + 1)


@dataclass(frozen=True)
class TauMaxProblem:
    """Ensemble and laser for the maximum-interrogation-time search.

    layer_count is the number of summed layers, atoms_per_layer sets the
    per-layer SQL phase 1/sqrt(atoms_per_layer), phi_l and phi_g in rad/s
    (phi_g physical per layer, adjusted by the convention).
    """

    layer_count: int
    atoms_per_layer: int
    phi_l: float
    phi_g: float
    convention: Convention

    def __post_init__(self) -> None:
        if self.layer_count < 1:
            raise ValueError(f"layer_count must be >= 1, got {self.layer_count}")
        if self.atoms_per_layer < 1:
            raise ValueError(f"atoms_per_layer must be >= 1, got {self.atoms_per_layer}")
        if not (self.phi_l >= 0 and math.isfinite(self.phi_l)):
            raise ValueError(f"phi_l must be >= 0 and finite, got {self.phi_l!r}")
        if not (self.phi_g >= 0 and math.isfinite(self.phi_g)):
            raise ValueError(f"phi_g must be >= 0 and finite, got {self.phi_g!r}")

    @classmethod
    def cubic(
        cls,
        n_site: int,
        phi_l: float,
        convention: Convention,
        phi_g: float | None = None,
    ) -> "TauMaxProblem":
        if n_site < 1:
            raise ValueError(f"n_site must be >= 1, got {n_site}")
        if phi_g is None:
            phi_g = per_layer_phase_rate(PhysicalConstants(), YB, YB.default_layer_spacing)
        return cls(
            layer_count=n_site + 1,
            atoms_per_layer=n_site * n_site,
            phi_l=phi_l,
            phi_g=phi_g,
            convention=convention,
        )

    @classmethod
    def slab(
        cls,
        n_layer: int,
        atoms_per_layer: int,
        phi_l: float,
        convention: Convention,
        phi_g: float | None = None,
    ) -> "TauMaxProblem":
        if phi_g is None:
            phi_g = per_layer_phase_rate(PhysicalConstants(), YB, YB.default_layer_spacing)
        return cls(
            layer_count=n_layer,
            atoms_per_layer=atoms_per_layer,
            phi_l=phi_l,
            phi_g=phi_g,
            convention=convention,
        )

    @property
    def threshold(self) -> float:
        """Per-layer SQL phase: 1/sqrt(atoms_per_layer) rad."""
        return 1.0 / math.sqrt(self.atoms_per_layer)


@dataclass(frozen=True)
class TauMaxResult:
    """Outcome of the tau_max search.

    bracketed is False when the error never reaches the threshold within
    (0, tau_cap]: the laser-dominated regime with unbounded tau. tau_s then
    holds the cap. criterion records whether the phase-ratio error or the
    phi_l = 0 contrast fallback was used.
    """

    tau_s: float
    error_at_tau: float
    threshold: float
    bracketed: bool
    criterion: str
    convention: Convention


def _error_function(problem: TauMaxProblem):
    """Dephasing error at time t, relative to the nominal phase.

    For phi_l > 0: |1 - phi_eff / (phi_l t)| with phi_eff = asin(S_y / m).
    For phi_l = 0 the nominal phase vanishes and phi_eff is identically zero
    by the k <-> -k symmetry, so the criterion degrades continuously to the
    contrast loss 1 - |S| / m (the phi_l -> 0 limit of the ratio form).
    """
    m = problem.layer_count
    offsets = _symmetric_offsets(m)
    rate = effective_phase_rate(problem.phi_g, m, problem.convention)

    if problem.phi_l == 0.0:
        def error(t: float) -> float:
            phases = offsets * (rate * t)
            s_x = math.fsum(np.cos(phases).tolist())
            s_y = math.fsum(np.sin(phases).tolist())
            return 1.0 - math.hypot(s_x, s_y) / m

        return error, "contrast"

    def error(t: float) -> float:
        phases = (problem.phi_l + offsets * rate) * t
        s_y = math.fsum(np.sin(phases).tolist())
        phi_eff = math.asin(max(-1.0, min(1.0, s_y / m)))
        return abs(1.0 - phi_eff / (problem.phi_l * t))

    return error, "phase-ratio"


def solve_tau_max(problem: TauMaxProblem, tau_cap: float = TAU_CAP_S) -> TauMaxResult:
    """Largest tau with dephasing error at or below the per-layer SQL.

    Scans a fixed geometric grid from 1e-6 s to tau_cap for the first
    bracket where the error crosses the threshold, then bisects to a
    relative tau tolerance of 1e-6 (at most 200 iterations, tightening until
    the error residual is within 1e-4 of the threshold). Deterministic:
    fixed grid, fixed iteration policy, no randomness.
    """
    error, criterion = _error_function(problem)
    thr = problem.threshold

    tau_lo = 1e-6
    n_points = int(_SCAN_POINTS_PER_DECADE * math.log10(tau_cap / tau_lo)) + 1
    grid = np.geomspace(tau_lo, tau_cap, n_points)

    lo = grid[0]
    e_lo = error(lo)
    if e_lo > thr:
        # Pathological: already past threshold at the scan floor; bisection
        # below starts from lo = 0 (the error vanishes with t).
        lo, hi = 0.0, grid[0]
    else:
        hi = None
        for t in grid[1:]:
            e_t = error(t)
            if e_lo <= thr < e_t:
                hi = t
                break
            lo, e_lo = t, e_t
        if hi is None:
            return TauMaxResult(
                tau_s=tau_cap,
                error_at_tau=error(tau_cap),
                threshold=thr,
                bracketed=False,
                criterion=criterion,
                convention=problem.convention,
            )

    mid = 0.5 * (lo + hi)
    e_mid = error(mid)
    for _ in range(_BISECT_MAX_ITER):
        if e_mid > thr:
            hi = mid
        else:
            lo = mid
        mid = 0.5 * (lo + hi)
        e_mid = error(mid)
        converged = (hi - lo) <= _BISECT_REL_TOL * max(lo, 1e-300)
        if converged and abs(e_mid - thr) <= _RESIDUAL_REL_TOL * thr:
            break
    return TauMaxResult(
        tau_s=mid,
        error_at_tau=e_mid,
        threshold=thr,
        bracketed=True,
        criterion=criterion,
        convention=problem.convention,
    )

"""Physical constants, clock species, lattice geometry, and the two base formulas.

Everything is carried in SI units: heights in m, rates in rad/s, times in s.
Fractional frequency shifts and Allan-deviation contributions are
dimensionless. Atom counts are exact Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """Local gravitational acceleration g [m/s^2] and speed of light c [m/s]."""

    g: float = 9.80665
    c: float = 2.99792458e8

    def __post_init__(self) -> None:
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be positive and finite, got {self.g!r}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be positive and finite, got {self.c!r}")


@dataclass(frozen=True)
class ClockSpecies:
    """Clock transition: resonant angular frequency and magic lattice wavelength.

    omega0 in rad/s, magic_wavelength in m.
    """

    name: str
    omega0: float
    magic_wavelength: float

    def __post_init__(self) -> None:
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise ValueError(f"omega0 must be positive and finite, got {self.omega0!r}")
        if not (self.magic_wavelength > 0 and math.isfinite(self.magic_wavelength)):
            raise ValueError(
                f"magic_wavelength must be positive and finite, got {self.magic_wavelength!r}"
            )

    @property
    def frequency(self) -> float:
        """Transition frequency nu = omega0 / 2pi [Hz]."""
        return self.omega0 / (2.0 * math.pi)

    @property
    def default_layer_spacing(self) -> float:
        """Lattice-site spacing along gravity, magic wavelength / 2 [m]."""
        return self.magic_wavelength / 2.0


YB = ClockSpecies(
    name="Yb",
    omega0=2.0 * math.pi * 5.18295e14,
    magic_wavelength=759.356e-9,
)

_SPECIES_PRESETS = {"Yb": YB}


def species_by_name(name: str) -> ClockSpecies:
    """Look up a built-in species preset ("Yb")."""
    try:
        return _SPECIES_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(_SPECIES_PRESETS))
        raise ValueError(f"unknown species {name!r}; built-in presets: {known}") from None


@dataclass(frozen=True)
class LatticeGeometry:
    """Layered lattice along gravity, cubic or slab.

    Cubic with n_site sites per horizontal axis has n_site+1 layers of
    n_site^2 atoms each, N = n_site^2 (n_site + 1). A slab fixes the atoms
    per layer and varies the layer count, N = atoms_per_layer * n_layer.
    """

    kind: str  # "cubic" or "slab"
    layer_count: int
    atoms_per_layer: int
    layer_spacing: float

    def __post_init__(self) -> None:
        if self.kind not in ("cubic", "slab"):
            raise ValueError(f"kind must be 'cubic' or 'slab', got {self.kind!r}")
        if self.layer_count < 1:
            raise ValueError(f"layer_count must be >= 1, got {self.layer_count}")
        if self.atoms_per_layer < 1:
            raise ValueError(f"atoms_per_layer must be >= 1, got {self.atoms_per_layer}")
        if not (self.layer_spacing > 0 and math.isfinite(self.layer_spacing)):
            raise ValueError(f"layer_spacing must be positive, got {self.layer_spacing!r}")

    @classmethod
    def cubic(cls, n_site: int, layer_spacing: float | None = None) -> "LatticeGeometry":
        if n_site < 1:
            raise ValueError(f"cubic n_site must be >= 1, got {n_site}")
        spacing = YB.default_layer_spacing if layer_spacing is None else layer_spacing
        return cls(
            kind="cubic",
            layer_count=n_site + 1,
            atoms_per_layer=n_site * n_site,
            layer_spacing=spacing,
        )

    @classmethod
    def slab(
        cls,
        atoms_per_layer: int,
        n_layer: int,
        layer_spacing: float | None = None,
    ) -> "LatticeGeometry":
        if n_layer < 1:
            raise ValueError(f"slab n_layer must be >= 1, got {n_layer}")
        spacing = YB.default_layer_spacing if layer_spacing is None else layer_spacing
        return cls(
            kind="slab",
            layer_count=n_layer,
            atoms_per_layer=atoms_per_layer,
            layer_spacing=spacing,
        )

    @property
    def n_site(self) -> int:
        """Horizontal site count of a cubic lattice (layer_count - 1)."""
        if self.kind != "cubic":
            raise ValueError("n_site is defined only for cubic geometry")
        return self.layer_count - 1

    @property
    def total_atoms(self) -> int:
        return self.atoms_per_layer * self.layer_count


@dataclass(frozen=True)
class InterrogationParams:
    """Ramsey timing and squeezing scale: tau_r, t_c, tau in s, xi_w_sq dimensionless.

    xi_w_sq = 1 for an unentangled coherent spin state; (0, 1] accepted as a
    plain scale factor, no entangled-state dynamics behind it.
    """

    tau_r: float
    t_c: float
    tau: float
    xi_w_sq: float = 1.0

    def __post_init__(self) -> None:
        for field_name in ("tau_r", "t_c", "tau"):
            value = getattr(self, field_name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{field_name} must be positive, got {value!r}")
        if not (0.0 < self.xi_w_sq <= 1.0):
            raise ValueError(f"xi_w_sq must be in (0, 1], got {self.xi_w_sq!r}")

    @classmethod
    def single_sequence(cls, tau: float, xi_w_sq: float = 1.0) -> "InterrogationParams":
        """One interrogation, no dead time: tau_r = t_c = tau."""
        return cls(tau_r=tau, t_c=tau, tau=tau, xi_w_sq=xi_w_sq)


def relative_redshift(consts: PhysicalConstants, delta_h: float) -> float:
    """Fractional frequency shift g*dh/c^2 between points separated by delta_h [m].

    Antisymmetric in delta_h; negative means the second point is lower.
    """
    _require_finite("delta_h", delta_h)
    return consts.g * delta_h / (consts.c * consts.c)


def per_layer_phase_rate(
    consts: PhysicalConstants,
    species: ClockSpecies,
    layer_spacing: float,
) -> float:
    """Phase drift rate [rad/s] between adjacent layers from the redshift.

    omega0 * g * layer_spacing / c^2.
    """
    _require_finite("layer_spacing", layer_spacing)
    return species.omega0 * relative_redshift(consts, layer_spacing)


def qpn_stability(
    species: ClockSpecies,
    interrogation: InterrogationParams,
    n_atoms: int,
) -> float:
    """Quantum-projection-noise Allan deviation for n_atoms.

    (1 / (omega0 tau_r)) * sqrt(t_c / tau) * sqrt(xi_w_sq / N).
    """
    if n_atoms < 1:
        raise ValueError(f"n_atoms must be >= 1, got {n_atoms}")
    prefactor = 1.0 / (species.omega0 * interrogation.tau_r)
    duty = math.sqrt(interrogation.t_c / interrogation.tau)
    return prefactor * duty * math.sqrt(interrogation.xi_w_sq / n_atoms)


def per_layer_sql(species: ClockSpecies, tau: float, n_site: int) -> float:
    """Standard quantum limit of one layer of n_site^2 atoms: 1/(omega0 tau n_site).

    Single interrogation (tau_r = t_c = tau) at xi_w_sq = 1.
    """
    if n_site < 1:
        raise ValueError(f"n_site must be >= 1, got {n_site}")
    return qpn_stability(species, InterrogationParams.single_sequence(tau), n_site * n_site)

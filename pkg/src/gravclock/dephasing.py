"""Bloch-vector summation over lattice layers and the dephasing it causes.

Each layer k carries a unit Bloch vector that precesses at phi_l + k*phi_g'.
Summing the layers shortens the total vector (contrast loss) and makes the
arcsine phase estimate phi_eff = asin(S_y / m) systematically underestimate
the true accumulated laser phase phi_l * t.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np


class Convention(enum.Enum):
    """How the supplied per-layer gravitational rate enters the layer sum.

    PHYSICAL applies phi_g per layer as given. PAPER_FIGURE scales phi_g by
    the number of layer gaps (layer_count - 1) before summation, treating the
    given rate as if it were the full top-to-bottom span rate. The two are
    kept side by side because the reference datasets this package reproduces
    disagree by exactly that factor; every emitted record carries the tag.
    """

    PHYSICAL = "physical"
    PAPER_FIGURE = "paper-figure"

    @classmethod
    def from_wire(cls, text: str) -> "Convention":
        for member in cls:
            if member.value == text:
                return member
        options = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown convention {text!r}; expected one of: {options}")


def effective_phase_rate(phi_g: float, layer_count: int, convention: Convention) -> float:
    """Convention-adjusted per-layer rate phi_g' [rad/s]."""
    if convention is Convention.PAPER_FIGURE:
        return phi_g * (layer_count - 1)
    return phi_g


@dataclass(frozen=True)
class DephasingInput:
    """One evaluation point of the layer sum.

    phi_l, phi_g in rad/s (phi_g is the physical per-layer rate; the
    convention decides how it is applied), layer_count >= 1, t >= 0 s.
    """

    phi_l: float
    phi_g: float
    layer_count: int
    t: float
    convention: Convention = Convention.PHYSICAL

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi_l):
            raise ValueError(f"phi_l must be finite, got {self.phi_l!r}")
        if not math.isfinite(self.phi_g):
            raise ValueError(f"phi_g must be finite, got {self.phi_g!r}")
        if self.layer_count < 1:
            raise ValueError(f"layer_count must be >= 1, got {self.layer_count}")
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise ValueError(f"t must be >= 0 and finite, got {self.t!r}")


@dataclass(frozen=True)
class BlochSummary:
    """Summed Bloch components, vector length, and the arcsine phase estimate.

    ratio = phi_eff / (phi_l * t); None when phi_l * t == 0.
    """

    s_x: float
    s_y: float
    length: float
    phi_eff: float
    ratio: Optional[float]


def _symmetric_offsets(layer_count: int) -> np.ndarray:
    # k = -(m-1)/2 ... (m-1)/2 in unit steps: integers for odd m,
    # half-integers for even m, preserving the k <-> -k cancellation.
    return np.arange(layer_count, dtype=float) - 0.5 * (layer_count - 1)

def bloch_sum(inp: DephasingInput) -> BlochSummary:
    """Sum the per-layer Bloch vectors at time t.

    S_x = sum_k cos((phi_l + k phi_g') t), S_y likewise with sin, k running
    over layer_count symmetric offsets centered on 0. phi_eff is
    asin(S_y / layer_count). Summation is ascending in k with compensated
    (exact) accumulation, so results are platform-independent.
    """
    m = inp.layer_count
    rate = effective_phase_rate(inp.phi_g, m, inp.convention)
    phases = (inp.phi_l + _symmetric_offsets(m) * rate) * inp.t
    s_x = math.fsum(np.cos(phases).tolist())
    s_y = math.fsum(np.sin(phases).tolist())
    length = math.hypot(s_x, s_y)
    phi_eff = math.asin(max(-1.0, min(1.0, s_y / m)))
    nominal = inp.phi_l * inp.t
    ratio = phi_eff / nominal if nominal != 0.0 else None
    return BlochSummary(s_x=s_x, s_y=s_y, length=length, phi_eff=phi_eff, ratio=ratio)


def contrast_closed_form(phi_g_eff: float, layer_count: int, t: float) -> float:
    """Dirichlet-kernel contrast |sin(m theta/2) / (m sin(theta/2))|, theta = phi_g'*t.

    Closed form for the normalized length of layer_count equally spaced unit
    phasors; equals bloch_sum length / layer_count. Returns 1 at theta = 0
    (and wherever the layers rephase, theta = 2 pi j).
    """
    if layer_count < 1:
        raise ValueError(f"layer_count must be >= 1, got {layer_count}")
    theta = phi_g_eff * t
    half = 0.5 * theta
    denom = math.sin(half)
    if abs(denom) < 1e-12:
        return 1.0
    return abs(math.sin(layer_count * half) / (layer_count * denom))


def dephase_curve(
    template: DephasingInput,
    t_grid: Sequence[float],
) -> list[tuple[float, BlochSummary]]:
    """Evaluate bloch_sum over a strictly increasing, nonnegative time grid.

    Returns (t, summary) pairs ordered by t; the template's own t is ignored.
    """
    grid = list(t_grid)
    for i, t in enumerate(grid):
        if not (t >= 0 and math.isfinite(t)):
            raise ValueError(f"t_grid[{i}] must be >= 0 and finite, got {t!r}")
        if i > 0 and not t > grid[i - 1]:
            raise ValueError(f"t_grid must be strictly increasing at index {i}")
    return [(t, bloch_sum(replace(template, t=t))) for t in grid]

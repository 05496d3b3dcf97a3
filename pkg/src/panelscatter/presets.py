"""Parameter sets for figures 3 to 9.

Every field can be overridden.  ``tau`` is ``None`` unless the caller wants to
bypass the cell-resonance formula (the value quoted for Fig. 3 is one the
formula does not reproduce, so both can be run).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

from .params import PhysicalInputs

FIGURE_IDS = (3, 4, 5, 6, 7, 8, 9)
QUOTED_TAU_FIG3 = complex(5.0356e-2, 5.1531e-3)


@dataclass(frozen=True)
class Preset:
    figure: int | None
    inputs: PhysicalInputs
    kind: str = "theta"  # "theta" or "r"
    r: float = 5.0
    thetas: tuple = ()
    r_min: float = 1.0
    r_max: float = 10.0
    tau: complex | None = None

    def with_overrides(self, **kw) -> "Preset":
        fields = asdict(self.inputs)
        top = {}
        for key, val in kw.items():
            if key in fields:
                fields[key] = val
            else:
                top[key] = val
        return replace(self, inputs=PhysicalInputs(**fields), **top)


_BASE = PhysicalInputs(
    abs_k=1.0,
    arg_k=math.atan(0.1),
    theta0=math.pi / 4,
    abs_alpha=10.0,
    rho_f_over_m0=100.0,
    d=0.01,
    d1=0.01,
    d2=0.01,
    a=0.001,
)


def figure_preset(figure: int) -> Preset:
    if figure not in FIGURE_IDS:
        raise KeyError(f"no preset for figure {figure}; choose one of {FIGURE_IDS}")
    base = Preset(3, _BASE)
    if figure == 3:
        return base
    if figure == 4:
        return base.with_overrides(figure=4, theta0=math.pi / 16)
    if figure == 5:
        return base.with_overrides(figure=5, rho_f_over_m0=500.0)
    if figure == 6:
        return base.with_overrides(figure=6, r=3.0)
    if figure == 7:
        angles = tuple(math.pi * f for f in (1 / 16, 1 / 8, 1 / 4, 1 / 3, 5 / 12))
        return base.with_overrides(figure=7, kind="r", thetas=angles)
    if figure == 8:
        return base.with_overrides(figure=8, abs_k=5.0, arg_k=math.atan(0.02), abs_alpha=250.0)
    return base.with_overrides(figure=9, d=0.2, d1=0.2, d2=0.2, a=0.005, arg_k=math.atan(0.02))

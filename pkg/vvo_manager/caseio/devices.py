from dataclasses import dataclass
from math import floor, isclose
from typing import Tuple


@dataclass(frozen=True)
class DeviceConfig:
    """
    Discrete device model attached to a case: capacitor bank modules and the tap changer grid
    """

    cb_module_step: float = 0.1
    cb_module_count: int = 3
    cb_ref_modules: int = 1
    tap_step: float = 0.00625
    tap_positions: int = 16
    tap_neutral: float = 1.0

    def __post_init__(self):
        if self.tap_step <= 0 or self.cb_module_step <= 0:
            raise ValueError("tap_step and cb_module_step must be positive")
        if not 0 <= self.cb_ref_modules <= self.cb_module_count:
            raise ValueError("cb_ref_modules must be between 0 and cb_module_count")
        if self.tap_positions < 0:
            raise ValueError("tap_positions must not be negative")

    def tap_ratio(self, position: int) -> float:
        """Ratio at a tap position, every grid value in the code base is produced here"""
        return round(self.tap_neutral * (1.0 + position * self.tap_step), 12)

    def tap_grid(self) -> Tuple[float, ...]:
        return tuple(self.tap_ratio(k) for k in range(-self.tap_positions, self.tap_positions + 1))

    def cb_level(self, modules: int) -> float:
        return round(modules * self.cb_module_step, 12)

    def cb_levels(self, lowest: int = 0, highest: int = None) -> Tuple[float, ...]:
        highest = self.cb_module_count if highest is None else highest
        return tuple(self.cb_level(k) for k in range(lowest, highest + 1))

    @property
    def b_ref(self) -> float:
        return self.cb_level(self.cb_ref_modules)


def snap_tap(ratio: float, config: DeviceConfig) -> Tuple[int, float]:
    """
    Round a tap ratio to the nearest point of the tap grid
    :param float ratio: Tap ratio to snap, must be positive
    :param DeviceConfig config: The grid definition
    :return: tuple: (position, grid ratio); ties go toward position 0, values off the grid clamp to its ends
    """
    if ratio <= 0:
        raise ValueError("tap ratio must be positive, got {}".format(ratio))
    steps = (ratio / config.tap_neutral - 1.0) / config.tap_step
    lower = floor(steps)
    candidates = {max(-config.tap_positions, min(config.tap_positions, k)) for k in (lower, lower + 1)}

    def distance(position: int) -> float:
        return abs(config.tap_ratio(position) - ratio)

    best = min(candidates, key=lambda k: (distance(k), abs(k)))
    for other in candidates:
        if other != best and isclose(distance(other), distance(best), rel_tol=0, abs_tol=1e-12) and abs(other) < abs(best):
            best = other
    return best, config.tap_ratio(best)

from dataclasses import dataclass, field
from logging import getLogger
from math import inf, isinf
from typing import List, Optional, Sequence, Tuple

import numpy as np

from vvo_manager.conf import settings
from vvo_manager.network.model import Network

logger = getLogger(__name__)

# lambda_p value that pins every non-slack generator to its reference dispatch
INFINITY = inf


@dataclass(frozen=True)
class ObjectiveConfig:
    lambda_v: float = settings.DEFAULT_OBJECTIVE["lambda_v"]
    lambda_q: float = settings.DEFAULT_OBJECTIVE["lambda_q"]
    lambda_p: float = 1.0
    lambda_c: float = settings.DEFAULT_OBJECTIVE["lambda_c"]
    # Per bus voltage target and per generator reactive target, None means 1.0 p.u. and 0 respectively
    v_ref: Optional[Tuple[float, ...]] = None
    q_ref: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for name in ("lambda_v", "lambda_q", "lambda_c"):
            value = getattr(self, name)
            if not value >= 0 or isinf(value):
                raise ValueError("{} must be a finite non-negative weight, got {}".format(name, value))
        if not self.lambda_p >= 0:
            raise ValueError("lambda_p must be non-negative or INFINITY, got {}".format(self.lambda_p))

    @property
    def pins_dispatch(self) -> bool:
        return isinf(self.lambda_p)

    def voltage_targets(self, network: Network) -> np.ndarray:
        if self.v_ref is None:
            return np.ones(len(network.buses))
        if len(self.v_ref) != len(network.buses):
            raise ValueError("v_ref needs one value per bus")
        return np.array(self.v_ref, dtype=float)

    def reactive_targets(self, network: Network) -> np.ndarray:
        if self.q_ref is None:
            return np.zeros(len(network.generators))
        if len(self.q_ref) != len(network.generators):
            raise ValueError("q_ref needs one value per generator")
        return np.array(self.q_ref, dtype=float)

    def lambda_p_label(self) -> str:
        return "inf" if self.pins_dispatch else "{:g}".format(self.lambda_p)


@dataclass(frozen=True)
class ScenarioConfig:
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    tap_dev_steps: int = 3
    cb_max_modules: int = 2
    cb_min_modules: int = 0

    def __post_init__(self):
        if self.tap_dev_steps < 0:
            raise ValueError("tap_dev_steps must not be negative, got {}".format(self.tap_dev_steps))
        if not 0 <= self.cb_min_modules <= self.cb_max_modules:
            raise ValueError("CB module range {}-{} is empty".format(self.cb_min_modules, self.cb_max_modules))

    def tap_label(self) -> str:
        return "±{}".format(self.tap_dev_steps)

    def cb_label(self) -> str:
        return "{}-{}".format(self.cb_min_modules, self.cb_max_modules)


@dataclass(frozen=True)
class DeviceSets:
    """Restricted discrete set per branch (tap) and per shunt (cb), both sorted ascending"""

    taps: Tuple[Tuple[float, ...], ...]
    cbs: Tuple[Tuple[float, ...], ...]

    def tap_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([s[0] for s in self.taps]), np.array([s[-1] for s in self.taps])

    def cb_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([s[0] for s in self.cbs]), np.array([s[-1] for s in self.cbs])

    def combinations(self) -> int:
        count = 1
        for values in self.taps + self.cbs:
            count *= len(values)
        return count


TAP_WINDOW = (0.9, 1.1)


def scenario_sets(network: Network, scenario: ScenarioConfig) -> DeviceSets:
    """
    Restrict every device to the settings a scenario allows
    :param Network network: The network, transformers carry their full tap grid
    :param ScenarioConfig scenario: tap deviation and CB module range
    :return: DeviceSets: taps within tap_dev_steps grid positions of the reference and inside [0.9, 1.1],
                         CB levels between cb_min_modules and cb_max_modules modules
    :raises ValueError: if tap_dev_steps exceeds the positions of a tap changer
    """
    taps = []
    for k, branch in enumerate(network.branches):
        if not branch.is_transformer:
            taps.append((1.0,))
            continue
        grid = sorted(branch.tap_set)
        positions = (len(grid) - 1) // 2
        if scenario.tap_dev_steps > positions:
            raise ValueError(
                "tap_dev_steps {} exceeds the {} positions of the tap changer on branch {}".format(scenario.tap_dev_steps, positions, k)
            )
        position = grid.index(branch.tap_ref)
        window = grid[max(0, position - scenario.tap_dev_steps) : position + scenario.tap_dev_steps + 1]
        allowed = tuple(t for t in window if TAP_WINDOW[0] - 1e-12 <= t <= TAP_WINDOW[1] + 1e-12)
        taps.append(allowed or (branch.tap_ref,))
    cbs = []
    for shunt in network.shunts:
        if not shunt.has_cb:
            cbs.append((0.0,))
            continue
        highest = min(scenario.cb_max_modules, shunt.module_count)
        if highest < scenario.cb_max_modules:
            logger.debug("Shunt {} has {} CB modules, maximum {} clamped".format(len(cbs), shunt.module_count, scenario.cb_max_modules))
        lowest = min(scenario.cb_min_modules, highest)
        cbs.append(tuple(sorted(shunt.cb_set))[lowest : highest + 1])
    return DeviceSets(taps=tuple(taps), cbs=tuple(cbs))


def expand_ranges(tap_devs: Sequence[int], cb_maxes: Sequence[int]) -> List[Tuple[int, int]]:
    """
    Cross product of tap deviations and CB maxima, leaving out the cells that combine a tap range wider
    than the narrowest one with a CB maximum below the largest one.
    [3, 16] x [2, 3] gives (3, 2), (3, 3), (16, 3)
    """
    taps, cbs = sorted(set(tap_devs)), sorted(set(cb_maxes))
    if not taps or not cbs:
        return []
    return [(t, c) for t in taps for c in cbs if not (t > taps[0] and c < cbs[-1])]


def clamped_cb_shunts(network: Network, cb_max_modules: int) -> List[int]:
    """
    :return: indices of the CB shunts with fewer installed modules than cb_max_modules
    """
    return [i for i, shunt in enumerate(network.shunts) if shunt.has_cb and shunt.module_count < cb_max_modules]


def warn_cb_clamps(network: Network, scenarios: Sequence[ScenarioConfig]):
    """
    Log a single warning when a scenario allows more CB modules than some shunt has installed
    """
    if not scenarios:
        return
    highest = max(scenario.cb_max_modules for scenario in scenarios)
    clamped = clamped_cb_shunts(network, highest)
    if clamped:
        installed = min(network.shunts[i].module_count for i in clamped)
        logger.warning(
            "CB maximum {} exceeds the installed modules of {} shunts (fewest {}), their range is clamped to the module count".format(
                highest, len(clamped), installed
            )
        )

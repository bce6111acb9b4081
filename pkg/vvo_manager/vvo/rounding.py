from typing import Sequence, Tuple

import numpy as np

from vvo_manager.vvo.scenario import DeviceSets

# Distances closer than this count as a tie
TIE_TOLERANCE = 1e-9


def round_to_set(value: float, allowed: Sequence[float], reference: float) -> float:
    """
    Nearest member of a discrete set.
    Ties go to the member closest to the reference setting, then to the smaller member.
    """
    distances = [abs(value - a) for a in allowed]
    nearest = min(distances)
    tied = [a for a, d in zip(allowed, distances) if d - nearest <= TIE_TOLERANCE]
    return min(tied, key=lambda a: (abs(a - reference), a))


def round_devices(
    tap: Sequence[float], cb: Sequence[float], sets: DeviceSets, tap_reference: Sequence[float], cb_reference: Sequence[float]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Round fractional device settings onto their restricted sets
    :param tap: fractional tap per branch
    :param cb: fractional cb per shunt
    :param DeviceSets sets: The restricted sets
    :param tap_reference: reference tap per branch, used to break ties
    :param cb_reference: reference cb per shunt, used to break ties
    :return: tuple: (tap per branch, cb per shunt), every value a member of its set
    """
    rounded_tap = np.array([round_to_set(v, allowed, r) for v, allowed, r in zip(tap, sets.taps, tap_reference)], dtype=float)
    rounded_cb = np.array([round_to_set(v, allowed, r) for v, allowed, r in zip(cb, sets.cbs, cb_reference)], dtype=float)
    return rounded_tap, rounded_cb

from dataclasses import dataclass
from typing import Tuple

from vvo_manager.network.model import Branch, ShuntDevice


@dataclass(frozen=True)
class BranchAdmittance:
    Yff: complex
    Yft: complex
    Ytf: complex
    Ytt: complex


def branch_admittance(branch: Branch, tap: float) -> BranchAdmittance:
    """
    Tap adjusted 2x2 admittance of a branch, the tap sits on the from side
    :param Branch branch: The branch
    :param float tap: Tap ratio, must be positive
    :return: BranchAdmittance
    """
    if tap <= 0:
        raise ValueError("tap ratio must be positive, got {}".format(tap))
    return BranchAdmittance(
        Yff=branch.yff / tap ** 2,
        Yft=branch.yft / tap,
        Ytf=branch.ytf / tap,
        Ytt=branch.ytt,
    )


def shunt_admittance(shunt: ShuntDevice, cb: float) -> complex:
    return complex(shunt.gs, shunt.bs0 + cb)


def branch_flows(branch: Branch, tap: float, vi: complex, vj: complex) -> Tuple[complex, complex]:
    """
    Complex power entering the branch at both ends
    :param Branch branch: The branch
    :param float tap: Tap ratio
    :param complex vi: Voltage phasor of the from bus
    :param complex vj: Voltage phasor of the to bus
    :return: tuple: (Sf, St)
    """
    y = branch_admittance(branch, tap)
    sf = vi * (y.Yff * vi + y.Yft * vj).conjugate()
    st = vj * (y.Ytf * vi + y.Ytt * vj).conjugate()
    return sf, st

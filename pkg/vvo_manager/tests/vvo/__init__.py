from functools import lru_cache

from vvo_manager.tests.network import four_bus_network
from vvo_manager.vvo.reference import ReferenceSolution, solve_reference_acopf


@lru_cache(maxsize=None)
def four_bus_reference() -> ReferenceSolution:
    """The reference ACOPF of the 4 bus case, solved once per test session"""
    return solve_reference_acopf(four_bus_network())

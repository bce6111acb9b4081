"""
Per-unit model of a transmission network.

Every quantity is expressed on the system MVA base, angles are in radians.
All types are immutable; derived views (adjacency, vectorised arrays) are computed once per network.
"""
from cmath import exp as cexp
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from math import inf
from typing import Iterable, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class Bus:
    id: int
    number: int
    base_kv: float
    vmin: float
    vmax: float
    pd: float
    qd: float
    is_slack: bool = False


@dataclass(frozen=True)
class Generator:
    bus: int
    pmin: float
    pmax: float
    qmin: float
    qmax: float
    # (c2, c1, c0) of c2 * pg^2 + c1 * pg + c0 with pg in p.u.
    cost: Tuple[float, float, float]
    p_ref: float
    q_ref: float
    vg: float = 1.0
    in_service: bool = True

    def cost_at(self, pg: float) -> float:
        c2, c1, c0 = self.cost
        return c2 * pg * pg + c1 * pg + c0


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    yff: complex
    yft: complex
    ytf: complex
    ytt: complex
    tap_ref: float
    tap_set: Tuple[float, ...]
    s_max: float
    angle_min: float
    angle_max: float
    is_transformer: bool

    @classmethod
    def from_impedance(
        cls,
        from_bus: int,
        to_bus: int,
        r: float,
        x: float,
        b: float = 0.0,
        shift: float = 0.0,
        tap_ref: float = 1.0,
        tap_set: Tuple[float, ...] = (1.0,),
        s_max: float = 0.0,
        angle_min: float = -inf,
        angle_max: float = inf,
        is_transformer: bool = False,
    ) -> "Branch":
        """
        Build a branch from its pi-model parameters
        :param r: series resistance (p.u.)
        :param x: series reactance (p.u.)
        :param b: total line charging susceptance (p.u.)
        :param shift: fixed phase shift (radians), folded into yft and ytf
        :return: Branch with tap independent base admittances
        """
        ys = 1 / complex(r, x)
        charging = complex(0.0, b / 2)
        return cls(
            from_bus=from_bus,
            to_bus=to_bus,
            yff=ys + charging,
            yft=-ys * cexp(1j * shift),
            ytf=-ys * cexp(-1j * shift),
            ytt=ys + charging,
            tap_ref=tap_ref,
            tap_set=tuple(tap_set),
            s_max=s_max,
            angle_min=angle_min,
            angle_max=angle_max,
            is_transformer=is_transformer,
        )

    @property
    def is_angle_bounded(self) -> bool:
        return bool(np.isfinite(self.angle_min) or np.isfinite(self.angle_max))

    @property
    def is_thermally_limited(self) -> bool:
        return self.s_max > 0


@dataclass(frozen=True)
class ShuntDevice:
    bus: int
    gs: float
    bs0: float
    module_step: float
    module_count: int
    b_ref: float
    cb_set: Tuple[float, ...] = (0.0,)

    @property
    def has_cb(self) -> bool:
        return self.module_count > 0


@dataclass(frozen=True)
class Adjacency:
    """Per bus branch, generator and shunt indices"""

    outgoing: Tuple[Tuple[int, ...], ...]
    incoming: Tuple[Tuple[int, ...], ...]
    generators: Tuple[Tuple[int, ...], ...]
    shunts: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class CaseStatistics:
    buses: int
    generators: int
    cbs: int
    lines: int
    transformers: int


def _group(n_buses: int, owners: Iterable[int]) -> Tuple[Tuple[int, ...], ...]:
    groups = [[] for _ in range(n_buses)]
    for index, bus in enumerate(owners):
        groups[bus].append(index)
    return tuple(tuple(group) for group in groups)


@dataclass(frozen=True, eq=False)
class NetworkArrays:
    """Column view of a network for vectorised physics"""

    n_bus: int
    n_gen: int
    n_branch: int
    n_shunt: int
    slack: int
    # buses
    vmin: np.ndarray
    vmax: np.ndarray
    pd: np.ndarray
    qd: np.ndarray
    # branches
    f: np.ndarray
    t: np.ndarray
    yff: np.ndarray
    yft: np.ndarray
    ytf: np.ndarray
    ytt: np.ndarray
    tap_ref: np.ndarray
    is_transformer: np.ndarray
    s_max: np.ndarray
    angle_min: np.ndarray
    angle_max: np.ndarray
    # generators
    gen_bus: np.ndarray
    pmin: np.ndarray
    pmax: np.ndarray
    qmin: np.ndarray
    qmax: np.ndarray
    c2: np.ndarray
    c1: np.ndarray
    c0: np.ndarray
    p_ref: np.ndarray
    q_ref: np.ndarray
    vg: np.ndarray
    # shunts
    shunt_bus: np.ndarray
    gs: np.ndarray
    bs0: np.ndarray
    b_ref: np.ndarray

    @classmethod
    def from_network(cls, network: "Network") -> "NetworkArrays":
        def column(items: Sequence, name: str, dtype=float) -> np.ndarray:
            values = np.array([getattr(item, name) for item in items], dtype=dtype)
            values.setflags(write=False)
            return values

        buses, gens, branches, shunts = network.buses, network.generators, network.branches, network.shunts
        costs = np.array([g.cost for g in gens], dtype=float).reshape(len(gens), 3)
        return cls(
            n_bus=len(buses),
            n_gen=len(gens),
            n_branch=len(branches),
            n_shunt=len(shunts),
            slack=network.slack_bus,
            vmin=column(buses, "vmin"),
            vmax=column(buses, "vmax"),
            pd=column(buses, "pd"),
            qd=column(buses, "qd"),
            f=column(branches, "from_bus", int),
            t=column(branches, "to_bus", int),
            yff=column(branches, "yff", complex),
            yft=column(branches, "yft", complex),
            ytf=column(branches, "ytf", complex),
            ytt=column(branches, "ytt", complex),
            tap_ref=column(branches, "tap_ref"),
            is_transformer=column(branches, "is_transformer", bool),
            s_max=column(branches, "s_max"),
            angle_min=column(branches, "angle_min"),
            angle_max=column(branches, "angle_max"),
            gen_bus=column(gens, "bus", int),
            pmin=column(gens, "pmin"),
            pmax=column(gens, "pmax"),
            qmin=column(gens, "qmin"),
            qmax=column(gens, "qmax"),
            c2=costs[:, 0].copy(),
            c1=costs[:, 1].copy(),
            c0=costs[:, 2].copy(),
            p_ref=column(gens, "p_ref"),
            q_ref=column(gens, "q_ref"),
            vg=column(gens, "vg"),
            shunt_bus=column(shunts, "bus", int),
            gs=column(shunts, "gs"),
            bs0=column(shunts, "bs0"),
            b_ref=column(shunts, "b_ref"),
        )


@dataclass(frozen=True)
class Network:
    base_mva: float
    buses: Tuple[Bus, ...]
    generators: Tuple[Generator, ...]
    branches: Tuple[Branch, ...]
    shunts: Tuple[ShuntDevice, ...] = ()

    @cached_property
    def adjacency(self) -> Adjacency:
        n_buses = len(self.buses)
        return Adjacency(
            outgoing=_group(n_buses, (branch.from_bus for branch in self.branches)),
            incoming=_group(n_buses, (branch.to_bus for branch in self.branches)),
            generators=_group(n_buses, (gen.bus for gen in self.generators)),
            shunts=_group(n_buses, (shunt.bus for shunt in self.shunts)),
        )

    @cached_property
    def arrays(self) -> NetworkArrays:
        return NetworkArrays.from_network(self)

    @property
    def slack_bus(self) -> int:
        """
        Index of the slack bus
        :raises ValueError: if the network has no slack bus
        """
        for bus in self.buses:
            if bus.is_slack:
                return bus.id
        raise ValueError("network has no slack bus")

    def statistics(self) -> CaseStatistics:
        """Device counts, lines are all in-service branches and transformers the tap changing subset of them"""
        return CaseStatistics(
            buses=len(self.buses),
            generators=len(self.generators),
            cbs=sum(1 for shunt in self.shunts if shunt.has_cb),
            lines=len(self.branches),
            transformers=sum(1 for branch in self.branches if branch.is_transformer),
        )

    def with_reference(self, pg: Sequence[float], qg: Sequence[float]) -> "Network":
        """
        Return a copy of the network whose generators carry a new reference dispatch
        :param pg: per generator active power (p.u.)
        :param qg: per generator reactive power (p.u.)
        """
        if len(pg) != len(self.generators) or len(qg) != len(self.generators):
            raise ValueError("reference dispatch needs one value per generator")
        generators = tuple(replace(gen, p_ref=float(p), q_ref=float(q)) for gen, p, q in zip(self.generators, pg, qg))
        return replace(self, generators=generators)


STATE_FIELDS = ("vm", "va", "pg", "qg", "pf", "qf", "pt", "qt", "tap", "cb")


@dataclass(frozen=True, eq=False)
class OperatingState:
    vm: np.ndarray
    va: np.ndarray
    pg: np.ndarray
    qg: np.ndarray
    pf: np.ndarray
    qf: np.ndarray
    pt: np.ndarray
    qt: np.ndarray
    tap: np.ndarray
    cb: np.ndarray
    physics_consistent: bool = field(default=False)

    def __post_init__(self):
        for name in STATE_FIELDS:
            values = np.array(getattr(self, name), dtype=float)
            values.setflags(write=False)
            object.__setattr__(self, name, values)

    def matches(self, network: Network) -> bool:
        """Whether the vector lengths fit the network"""
        expected = {
            "vm": len(network.buses),
            "va": len(network.buses),
            "pg": len(network.generators),
            "qg": len(network.generators),
            "pf": len(network.branches),
            "qf": len(network.branches),
            "pt": len(network.branches),
            "qt": len(network.branches),
            "tap": len(network.branches),
            "cb": len(network.shunts),
        }
        return all(getattr(self, name).shape == (size,) for name, size in expected.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatingState):
            return NotImplemented
        return self.physics_consistent == other.physics_consistent and all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self) if f.name in STATE_FIELDS
        )

    __hash__ = None

"""
The volt/VAR optimisation model as a nonlinear program.

Variables are laid out as [va, vm, pg, qg, tap, cb]. Branch flows are not variables: they are
evaluated from the voltages and taps, so the power balance rows and thermal limits act on them directly.
Devices that are fixed, or whose restricted set has a single member, enter as constants.
"""
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import List, Optional, Tuple

import numpy as np

from vvo_manager.acpf.physics import WRT, ColumnMap, PowerBalanceJacobian, branch_flow_derivatives, power_balance, state_from_voltages
from vvo_manager.exceptions import MissingReferenceError
from vvo_manager.network.model import Network, OperatingState
from vvo_manager.nlp.problem import NlpProblem
from vvo_manager.vvo.scenario import DeviceSets, ObjectiveConfig

logger = getLogger(__name__)

MEMBERSHIP_TOLERANCE = 1e-12


class DeviceMode(Enum):
    RELAXED = "relaxed"
    FIXED = "fixed"


@dataclass(frozen=True, eq=False)
class DeviceTreatment:
    mode: DeviceMode = DeviceMode.RELAXED
    # Per branch tap and per shunt cb, only read in fixed mode
    tap: Optional[np.ndarray] = None
    cb: Optional[np.ndarray] = None

    @classmethod
    def relaxed(cls) -> "DeviceTreatment":
        return cls(DeviceMode.RELAXED)

    @classmethod
    def fixed(cls, tap, cb) -> "DeviceTreatment":
        return cls(DeviceMode.FIXED, np.asarray(tap, dtype=float), np.asarray(cb, dtype=float))

    def check(self, network: Network, sets: DeviceSets):
        """
        :raises ValueError: if a fixed setting is not a member of its restricted set
        """
        if self.mode is DeviceMode.RELAXED:
            return
        if self.tap is None or self.cb is None or len(self.tap) != len(network.branches) or len(self.cb) != len(network.shunts):
            raise ValueError("fixed device treatment needs one tap per branch and one cb per shunt")
        for index, (value, allowed) in enumerate(zip(self.tap, sets.taps)):
            if not _member(value, allowed):
                raise ValueError("tap {} of branch {} is not in its restricted set".format(value, index))
        for index, (value, allowed) in enumerate(zip(self.cb, sets.cbs)):
            if not _member(value, allowed):
                raise ValueError("cb {} of shunt {} is not in its restricted set".format(value, index))


def _member(value: float, allowed) -> bool:
    return any(abs(value - a) <= MEMBERSHIP_TOLERANCE for a in allowed)


@dataclass(frozen=True, eq=False)
class VvoLayout:
    n_bus: int
    n_gen: int
    # Branches with a tap variable and shunts with a cb variable
    tap_branches: np.ndarray
    cb_shunts: np.ndarray
    # Values used where the device is a constant
    tap_constant: np.ndarray
    cb_constant: np.ndarray
    columns: ColumnMap

    @classmethod
    def create(cls, network: Network, tap_constant: np.ndarray, cb_constant: np.ndarray, tap_free: np.ndarray, cb_free: np.ndarray):
        nb, ng = len(network.buses), len(network.generators)
        tap_branches, cb_shunts = np.flatnonzero(tap_free), np.flatnonzero(cb_free)
        offset = 2 * nb + 2 * ng
        tap_cols = -np.ones(len(network.branches), dtype=int)
        tap_cols[tap_branches] = offset + np.arange(len(tap_branches))
        offset += len(tap_branches)
        cb_cols = -np.ones(len(network.shunts), dtype=int)
        cb_cols[cb_shunts] = offset + np.arange(len(cb_shunts))
        columns = ColumnMap(
            va=np.arange(nb),
            vm=nb + np.arange(nb),
            pg=2 * nb + np.arange(ng),
            qg=2 * nb + ng + np.arange(ng),
            tap=tap_cols,
            cb=cb_cols,
            n_cols=offset + len(cb_shunts),
        )
        return cls(nb, ng, tap_branches, cb_shunts, tap_constant, cb_constant, columns)

    @property
    def n_vars(self) -> int:
        return self.columns.n_cols

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, ...]:
        """
        :return: tuple: (vm, va, pg, qg, tap per branch, cb per shunt)
        """
        cols = self.columns
        tap = self.tap_constant.copy()
        tap[self.tap_branches] = x[cols.tap[self.tap_branches]]
        cb = self.cb_constant.copy()
        cb[self.cb_shunts] = x[cols.cb[self.cb_shunts]]
        return x[cols.vm], x[cols.va], x[cols.pg], x[cols.qg], tap, cb

    def join(self, vm, va, pg, qg, tap, cb) -> np.ndarray:
        cols = self.columns
        x = np.zeros(self.n_vars)
        x[cols.vm], x[cols.va], x[cols.pg], x[cols.qg] = vm, va, pg, qg
        x[cols.tap[self.tap_branches]] = np.asarray(tap)[self.tap_branches]
        x[cols.cb[self.cb_shunts]] = np.asarray(cb)[self.cb_shunts]
        return x


class _VvoCallbacks:
    """Objective and constraint evaluation, caching the flows of the last point"""

    def __init__(self, network: Network, objective: ObjectiveConfig, layout: VvoLayout):
        arrays = network.arrays
        self.arrays = arrays
        self.layout = layout
        self.v_target = objective.voltage_targets(network)
        self.q_target = objective.reactive_targets(network)
        self.lambda_v, self.lambda_q, self.lambda_c = objective.lambda_v, objective.lambda_q, objective.lambda_c
        self.lambda_p = 0.0 if objective.pins_dispatch else objective.lambda_p
        self.balance = PowerBalanceJacobian(arrays, layout.columns)
        cols = layout.columns
        f, t = arrays.f, arrays.t
        self.sources = {"vm_f": cols.vm[f], "vm_t": cols.vm[t], "va_f": cols.va[f], "va_t": cols.va[t], "tap": cols.tap}

        self.angle_branches = np.flatnonzero(np.isfinite(arrays.angle_min) | np.isfinite(arrays.angle_max))
        self.thermal_branches = np.flatnonzero(arrays.s_max > 0)
        n_angle, n_thermal = len(self.angle_branches), len(self.thermal_branches)
        self.n_ineq = n_angle + 2 * n_thermal

        rows = [np.arange(n_angle), np.arange(n_angle)]
        columns = [cols.va[f[self.angle_branches]], cols.va[t[self.angle_branches]]]
        self._thermal_masks = []
        for side, offset in (("f", n_angle), ("t", n_angle + n_thermal)):
            for wrt in WRT:
                source = self.sources[wrt][self.thermal_branches]
                mask = source >= 0
                self._thermal_masks.append((side, wrt, mask))
                rows.append(offset + np.flatnonzero(mask))
                columns.append(source[mask])
        self.ineq_structure = (np.concatenate(rows).astype(int), np.concatenate(columns).astype(int))

        nb = arrays.n_bus
        slack_col = cols.va[arrays.slack]
        self.eq_structure = (
            np.concatenate([self.balance.rows, [2 * nb]]).astype(int),
            np.concatenate([self.balance.cols, [slack_col]]).astype(int),
        )
        self._cached_x = None
        self._cached = None

    def _evaluate(self, x: np.ndarray):
        if self._cached_x is None or not np.array_equal(x, self._cached_x):
            vm, va, pg, qg, tap, cb = self.layout.split(x)
            flows, derivatives = branch_flow_derivatives(self.arrays, vm, va, tap)
            self._cached = (vm, va, pg, qg, tap, cb, flows, derivatives)
            self._cached_x = np.array(x, copy=True)
        return self._cached

    # objective
    def objective(self, x: np.ndarray) -> float:
        vm, _, pg, qg, _, _, _, _ = self._evaluate(x)
        arrays = self.arrays
        value = self.lambda_v * float(np.sum((vm - self.v_target) ** 2))
        value += self.lambda_q * float(np.sum((qg - self.q_target) ** 2))
        if self.lambda_p:
            value += self.lambda_p * float(np.sum((pg - arrays.p_ref) ** 2))
        value += self.lambda_c * float(np.sum(arrays.c2 * pg ** 2 + arrays.c1 * pg + arrays.c0))
        return value

    def gradient(self, x: np.ndarray) -> np.ndarray:
        vm, _, pg, qg, _, _, _, _ = self._evaluate(x)
        arrays, cols = self.arrays, self.layout.columns
        gradient = np.zeros(self.layout.n_vars)
        gradient[cols.vm] = 2 * self.lambda_v * (vm - self.v_target)
        gradient[cols.qg] = 2 * self.lambda_q * (qg - self.q_target)
        gradient[cols.pg] = self.lambda_c * (2 * arrays.c2 * pg + arrays.c1)
        if self.lambda_p:
            gradient[cols.pg] += 2 * self.lambda_p * (pg - arrays.p_ref)
        return gradient

    # equalities: P balance per bus, Q balance per bus, slack angle
    def eq_values(self, x: np.ndarray) -> np.ndarray:
        vm, va, pg, qg, tap, cb, flows, _ = self._evaluate(x)
        dp, dq = power_balance(self.arrays, vm, va, pg, qg, tap, cb, flows)
        return np.concatenate([dp, dq, [va[self.arrays.slack]]])

    def eq_jacobian(self, x: np.ndarray) -> np.ndarray:
        vm, va, _, _, tap, cb, _, derivatives = self._evaluate(x)
        return np.concatenate([self.balance.values(vm, va, tap, cb, derivatives), [1.0]])

    # inequalities: angle differences, then squared apparent power at the from and to ends
    def ineq_values(self, x: np.ndarray) -> np.ndarray:
        _, va, _, _, _, _, flows, _ = self._evaluate(x)
        arrays, angle, thermal = self.arrays, self.angle_branches, self.thermal_branches
        return np.concatenate(
            [
                va[arrays.f[angle]] - va[arrays.t[angle]],
                flows.pf[thermal] ** 2 + flows.qf[thermal] ** 2,
                flows.pt[thermal] ** 2 + flows.qt[thermal] ** 2,
            ]
        )

    def ineq_jacobian(self, x: np.ndarray) -> np.ndarray:
        _, _, _, _, _, _, flows, derivatives = self._evaluate(x)
        thermal = self.thermal_branches
        parts = [np.ones(len(self.angle_branches)), -np.ones(len(self.angle_branches))]
        for side, wrt, mask in self._thermal_masks:
            p, q = ("pf", "qf") if side == "f" else ("pt", "qt")
            p_flow, q_flow = getattr(flows, p)[thermal], getattr(flows, q)[thermal]
            value = 2 * p_flow * derivatives[p][wrt][thermal] + 2 * q_flow * derivatives[q][wrt][thermal]
            parts.append(value[mask])
        return np.concatenate(parts)

    def ineq_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        arrays = self.arrays
        limit = arrays.s_max[self.thermal_branches] ** 2
        lower = np.concatenate([arrays.angle_min[self.angle_branches], np.full(2 * len(limit), -np.inf)])
        upper = np.concatenate([arrays.angle_max[self.angle_branches], limit, limit])
        return lower, upper

    def hessian_structure(self) -> Tuple[np.ndarray, np.ndarray]:
        """Each branch couples its two voltages and its tap, each shunt couples its bus voltage and its cb"""
        rows: List[np.ndarray] = [np.arange(self.layout.n_vars)]
        cols: List[np.ndarray] = [np.arange(self.layout.n_vars)]
        for first in WRT:
            for second in WRT:
                a, b = self.sources[first], self.sources[second]
                mask = (a >= 0) & (b >= 0)
                rows.append(a[mask])
                cols.append(b[mask])
        shunt_vm = self.layout.columns.vm[self.arrays.shunt_bus]
        shunt_cb = self.layout.columns.cb
        mask = shunt_cb >= 0
        rows += [shunt_vm[mask], shunt_cb[mask]]
        cols += [shunt_cb[mask], shunt_vm[mask]]
        return np.concatenate(rows).astype(int), np.concatenate(cols).astype(int)


@dataclass(eq=False)
class VvoProblem(NlpProblem):
    network: Optional[Network] = None
    layout: Optional[VvoLayout] = None
    pinned_generators: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def initial_point(self, state: OperatingState) -> np.ndarray:
        """Variable values taken from a state, devices that are constants here are ignored"""
        return self.layout.join(state.vm, state.va, state.pg, state.qg, state.tap, state.cb)

    def device_values(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        :return: tuple: (tap per branch, cb per shunt) at x
        """
        _, _, _, _, tap, cb = self.layout.split(np.asarray(x, dtype=float))
        return tap, cb

    def state_at(self, x: np.ndarray) -> OperatingState:
        vm, va, pg, qg, tap, cb = self.layout.split(np.asarray(x, dtype=float))
        return state_from_voltages(self.network, vm, va, pg, qg, tap, cb)


def _names(network: Network, layout: VvoLayout, callbacks: _VvoCallbacks):
    buses = [bus.number for bus in network.buses]
    variables = ["va[bus {}]".format(n) for n in buses] + ["vm[bus {}]".format(n) for n in buses]
    for kind in ("pg", "qg"):
        variables += ["{}[gen {} at bus {}]".format(kind, k, buses[g.bus]) for k, g in enumerate(network.generators)]
    variables += ["tap[branch {}]".format(k) for k in layout.tap_branches]
    variables += ["cb[shunt at bus {}]".format(buses[network.shunts[k].bus]) for k in layout.cb_shunts]
    eq = ["p_balance[bus {}]".format(n) for n in buses] + ["q_balance[bus {}]".format(n) for n in buses] + ["slack_angle"]
    ineq = ["angle[branch {}]".format(k) for k in callbacks.angle_branches]
    ineq += ["thermal_from[branch {}]".format(k) for k in callbacks.thermal_branches]
    ineq += ["thermal_to[branch {}]".format(k) for k in callbacks.thermal_branches]
    return variables, eq, ineq


def build_vvo(network: Network, objective: ObjectiveConfig, sets: DeviceSets, treatment: DeviceTreatment) -> VvoProblem:
    """
    Assemble the volt/VAR optimisation problem
    :param Network network: The (validated) network, generators carry the reference dispatch
    :param ObjectiveConfig objective: Objective weights, lambda_p = INFINITY pins non-slack generators to p_ref
    :param DeviceSets sets: Restricted tap and cb sets
    :param DeviceTreatment treatment: relaxed (devices range over [min, max] of their set) or fixed
    :return: VvoProblem
    :raises MissingReferenceError: if the objective needs p_ref and a generator has none
    """
    arrays = network.arrays
    needs_reference = objective.pins_dispatch or objective.lambda_p > 0
    if needs_reference and np.any(~np.isfinite(arrays.p_ref)):
        raise MissingReferenceError("reference setpoints missing: every generator needs a finite p_ref")
    treatment.check(network, sets)

    tap_low, tap_high = sets.tap_bounds()
    cb_low, cb_high = sets.cb_bounds()
    if treatment.mode is DeviceMode.FIXED:
        tap_constant, cb_constant = np.array(treatment.tap, dtype=float), np.array(treatment.cb, dtype=float)
        tap_free = np.zeros(len(network.branches), dtype=bool)
        cb_free = np.zeros(len(network.shunts), dtype=bool)
    else:
        tap_constant, cb_constant = tap_low.copy(), cb_low.copy()
        tap_free, cb_free = tap_high > tap_low, cb_high > cb_low
    layout = VvoLayout.create(network, tap_constant, cb_constant, tap_free, cb_free)
    cols = layout.columns

    lower = np.full(layout.n_vars, -np.inf)
    upper = np.full(layout.n_vars, np.inf)
    lower[cols.vm], upper[cols.vm] = arrays.vmin, arrays.vmax
    lower[cols.pg], upper[cols.pg] = arrays.pmin, arrays.pmax
    lower[cols.qg], upper[cols.qg] = arrays.qmin, arrays.qmax
    pinned = np.zeros(0, dtype=int)
    if objective.pins_dispatch:
        pinned = np.flatnonzero(arrays.gen_bus != arrays.slack)
        lower[cols.pg[pinned]] = upper[cols.pg[pinned]] = arrays.p_ref[pinned]
    lower[cols.tap[layout.tap_branches]], upper[cols.tap[layout.tap_branches]] = tap_low[layout.tap_branches], tap_high[layout.tap_branches]
    lower[cols.cb[layout.cb_shunts]], upper[cols.cb[layout.cb_shunts]] = cb_low[layout.cb_shunts], cb_high[layout.cb_shunts]

    callbacks = _VvoCallbacks(network, objective, layout)
    ineq_lower, ineq_upper = callbacks.ineq_bounds()
    variable_names, eq_names, ineq_names = _names(network, layout, callbacks)
    problem = VvoProblem(
        n_vars=layout.n_vars,
        x_lower=lower,
        x_upper=upper,
        objective=callbacks.objective,
        gradient=callbacks.gradient,
        n_eq=2 * arrays.n_bus + 1,
        eq_values=callbacks.eq_values,
        eq_structure=callbacks.eq_structure,
        eq_jacobian=callbacks.eq_jacobian,
        n_ineq=callbacks.n_ineq,
        ineq_values=callbacks.ineq_values,
        ineq_structure=callbacks.ineq_structure,
        ineq_jacobian=callbacks.ineq_jacobian,
        ineq_lower=ineq_lower,
        ineq_upper=ineq_upper,
        hessian_structure=callbacks.hessian_structure(),
        variable_names=variable_names,
        eq_names=eq_names,
        ineq_names=ineq_names,
        network=network,
        layout=layout,
        pinned_generators=pinned,
    )
    logger.debug(
        "Built {} VVO problem: {} variables ({} taps, {} cbs), {} equalities, {} inequalities, {} pinned generators".format(
            treatment.mode.value, layout.n_vars, len(layout.tap_branches), len(layout.cb_shunts), problem.n_eq, problem.n_ineq, len(pinned)
        )
    )
    return problem

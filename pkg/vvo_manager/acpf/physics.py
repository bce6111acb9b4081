"""
Vectorised AC physics in polar coordinates.

Branch flows with the tap on the from side:
    pf =  vf^2 gff / tau^2 + vf vt (gft cos + bft sin) / tau
    qf = -vf^2 bff / tau^2 + vf vt (gft sin - bft cos) / tau
    pt =  vt^2 gtt + vf vt (gtf cos - btf sin) / tau
    qt = -vt^2 btt - vf vt (gtf sin + btf cos) / tau
with cos/sin of va_f - va_t. Bus balance (generation minus everything leaving the bus) is zero at a solution.
"""
import csv
from dataclasses import dataclass
from io import StringIO
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from vvo_manager.network.model import Network, NetworkArrays, OperatingState

WRT = ("vm_f", "vm_t", "va_f", "va_t", "tap")
FLOWS = ("pf", "qf", "pt", "qt")


@dataclass(frozen=True, eq=False)
class BranchFlows:
    pf: np.ndarray
    qf: np.ndarray
    pt: np.ndarray
    qt: np.ndarray


# Partial derivatives per flow quantity and per variable in WRT, one value per branch
FlowDerivatives = Dict[str, Dict[str, np.ndarray]]


def _terms(arrays: NetworkArrays, vm: np.ndarray, va: np.ndarray, tap: np.ndarray):
    f, t = arrays.f, arrays.t
    vf, vt = vm[f], vm[t]
    theta = va[f] - va[t]
    cos, sin = np.cos(theta), np.sin(theta)
    gft, bft = arrays.yft.real, arrays.yft.imag
    gtf, btf = arrays.ytf.real, arrays.ytf.imag
    a = gft * cos + bft * sin
    b = gft * sin - bft * cos
    c = gtf * cos - btf * sin
    d = -gtf * sin - btf * cos
    return vf, vt, np.asarray(tap, dtype=float), a, b, c, d


def branch_flow_values(arrays: NetworkArrays, vm: np.ndarray, va: np.ndarray, tap: np.ndarray) -> BranchFlows:
    vf, vt, tau, a, b, c, d = _terms(arrays, vm, va, tap)
    gff, bff = arrays.yff.real, arrays.yff.imag
    gtt, btt = arrays.ytt.real, arrays.ytt.imag
    vv = vf * vt / tau
    return BranchFlows(
        pf=vf ** 2 * gff / tau ** 2 + vv * a,
        qf=-(vf ** 2) * bff / tau ** 2 + vv * b,
        pt=vt ** 2 * gtt + vv * c,
        qt=-(vt ** 2) * btt + vv * d,
    )


def branch_flow_derivatives(arrays: NetworkArrays, vm: np.ndarray, va: np.ndarray, tap: np.ndarray) -> Tuple[BranchFlows, FlowDerivatives]:
    """
    Flows and their first derivatives with respect to both voltage magnitudes, both angles and the tap
    :return: tuple: (BranchFlows, {flow: {variable: per branch derivative}})
    """
    vf, vt, tau, a, b, c, d = _terms(arrays, vm, va, tap)
    gff, bff = arrays.yff.real, arrays.yff.imag
    gtt, btt = arrays.ytt.real, arrays.ytt.imag
    vv = vf * vt / tau
    flows = BranchFlows(
        pf=vf ** 2 * gff / tau ** 2 + vv * a,
        qf=-(vf ** 2) * bff / tau ** 2 + vv * b,
        pt=vt ** 2 * gtt + vv * c,
        qt=-(vt ** 2) * btt + vv * d,
    )
    derivatives = {
        "pf": {
            "vm_f": 2 * vf * gff / tau ** 2 + vt * a / tau,
            "vm_t": vf * a / tau,
            "va_f": -vv * b,
            "va_t": vv * b,
            "tap": -2 * vf ** 2 * gff / tau ** 3 - vv * a / tau,
        },
        "qf": {
            "vm_f": -2 * vf * bff / tau ** 2 + vt * b / tau,
            "vm_t": vf * b / tau,
            "va_f": vv * a,
            "va_t": -vv * a,
            "tap": 2 * vf ** 2 * bff / tau ** 3 - vv * b / tau,
        },
        "pt": {
            "vm_f": vt * c / tau,
            "vm_t": 2 * vt * gtt + vf * c / tau,
            "va_f": vv * d,
            "va_t": -vv * d,
            "tap": -vv * c / tau,
        },
        "qt": {
            "vm_f": vt * d / tau,
            "vm_t": -2 * vt * btt + vf * d / tau,
            "va_f": -vv * c,
            "va_t": vv * c,
            "tap": -vv * d / tau,
        },
    }
    return flows, derivatives


def power_balance(
    arrays: NetworkArrays,
    vm: np.ndarray,
    va: np.ndarray,
    pg: np.ndarray,
    qg: np.ndarray,
    tap: np.ndarray,
    cb: np.ndarray,
    flows: Optional[BranchFlows] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Active and reactive power mismatch per bus
    :return: tuple: (p mismatch, q mismatch), both zero at a physically consistent point
    """
    nb = arrays.n_bus
    flows = flows if flows is not None else branch_flow_values(arrays, vm, va, tap)
    v2 = vm[arrays.shunt_bus] ** 2
    dp = (
        np.bincount(arrays.gen_bus, weights=pg, minlength=nb)
        - arrays.pd
        - np.bincount(arrays.shunt_bus, weights=arrays.gs * v2, minlength=nb)
        - np.bincount(arrays.f, weights=flows.pf, minlength=nb)
        - np.bincount(arrays.t, weights=flows.pt, minlength=nb)
    )
    dq = (
        np.bincount(arrays.gen_bus, weights=qg, minlength=nb)
        - arrays.qd
        + np.bincount(arrays.shunt_bus, weights=(arrays.bs0 + np.asarray(cb, dtype=float)) * v2, minlength=nb)
        - np.bincount(arrays.f, weights=flows.qf, minlength=nb)
        - np.bincount(arrays.t, weights=flows.qt, minlength=nb)
    )
    return dp, dq


def kcl_residual(network: Network, state: OperatingState) -> np.ndarray:
    """
    Complex power mismatch per bus, flows are recomputed from the voltages and taps of the state
    :param Network network: The network
    :param OperatingState state: The state to check
    :return: ndarray: complex mismatch per bus
    """
    if not state.matches(network):
        raise ValueError("state dimensions do not match the network")
    dp, dq = power_balance(network.arrays, state.vm, state.va, state.pg, state.qg, state.tap, state.cb)
    return dp + 1j * dq


def state_from_voltages(
    network: Network, vm: np.ndarray, va: np.ndarray, pg: np.ndarray, qg: np.ndarray, tap: np.ndarray, cb: np.ndarray
) -> OperatingState:
    """Complete a state with the branch flows implied by its voltages and taps"""
    flows = branch_flow_values(network.arrays, np.asarray(vm, dtype=float), np.asarray(va, dtype=float), np.asarray(tap, dtype=float))
    return OperatingState(
        vm=vm, va=va, pg=pg, qg=qg, pf=flows.pf, qf=flows.qf, pt=flows.pt, qt=flows.qt, tap=tap, cb=cb, physics_consistent=True
    )


def residuals_to_csv(network: Network, state: OperatingState) -> str:
    residual = kcl_residual(network, state)
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["bus", "re", "im"])
    for bus, value in zip(network.buses, residual):
        writer.writerow([bus.number, repr(float(value.real)), repr(float(value.imag))])
    return buffer.getvalue()


@dataclass(frozen=True, eq=False)
class ColumnMap:
    """
    Column of each physical quantity in a Jacobian, -1 where the quantity is a constant
    """

    va: np.ndarray
    vm: np.ndarray
    pg: np.ndarray
    qg: np.ndarray
    tap: np.ndarray
    cb: np.ndarray
    n_cols: int


class PowerBalanceJacobian:
    """
    Sparse Jacobian of the 2 * n_bus power balance rows (all P rows first, then all Q rows).
    The sparsity structure is fixed at construction, values() returns entries in structure order
    (duplicates are summed when the matrix is assembled).
    """

    def __init__(self, arrays: NetworkArrays, columns: ColumnMap):
        self.arrays = arrays
        self.columns = columns
        nb = arrays.n_bus
        f, t = arrays.f, arrays.t
        sources = {
            "vm_f": columns.vm[f],
            "vm_t": columns.vm[t],
            "va_f": columns.va[f],
            "va_t": columns.va[t],
            "tap": columns.tap,
        }
        row_of = {"pf": f, "pt": t, "qf": nb + f, "qt": nb + t}

        rows: List[np.ndarray] = []
        cols: List[np.ndarray] = []
        self._branch_masks: List[Tuple[str, str, np.ndarray]] = []
        for flow in ("pf", "pt", "qf", "qt"):
            for wrt in WRT:
                mask = sources[wrt] >= 0
                self._branch_masks.append((flow, wrt, mask))
                rows.append(row_of[flow][mask])
                cols.append(sources[wrt][mask])

        self._pg_mask = columns.pg >= 0
        self._qg_mask = columns.qg >= 0
        rows += [arrays.gen_bus[self._pg_mask], nb + arrays.gen_bus[self._qg_mask]]
        cols += [columns.pg[self._pg_mask], columns.qg[self._qg_mask]]

        shunt_vm = columns.vm[arrays.shunt_bus]
        self._shunt_vm_mask = shunt_vm >= 0
        self._cb_mask = columns.cb >= 0
        rows += [
            arrays.shunt_bus[self._shunt_vm_mask],
            nb + arrays.shunt_bus[self._shunt_vm_mask],
            nb + arrays.shunt_bus[self._cb_mask],
        ]
        cols += [shunt_vm[self._shunt_vm_mask], shunt_vm[self._shunt_vm_mask], columns.cb[self._cb_mask]]

        self.rows = np.concatenate(rows).astype(int)
        self.cols = np.concatenate(cols).astype(int)
        self.shape = (2 * nb, columns.n_cols)

    @property
    def nnz(self) -> int:
        return len(self.rows)

    def values(self, vm: np.ndarray, va: np.ndarray, tap: np.ndarray, cb: np.ndarray, derivatives: FlowDerivatives = None) -> np.ndarray:
        if derivatives is None:
            _, derivatives = branch_flow_derivatives(self.arrays, vm, va, tap)
        parts = [-derivatives[flow][wrt][mask] for flow, wrt, mask in self._branch_masks]
        parts.append(np.ones(int(self._pg_mask.sum())))
        parts.append(np.ones(int(self._qg_mask.sum())))
        v = vm[self.arrays.shunt_bus]
        cb = np.asarray(cb, dtype=float)
        parts.append((-2 * self.arrays.gs * v)[self._shunt_vm_mask])
        parts.append((2 * (self.arrays.bs0 + cb) * v)[self._shunt_vm_mask])
        parts.append((v ** 2)[self._cb_mask])
        return np.concatenate(parts)

    def matrix(self, vm: np.ndarray, va: np.ndarray, tap: np.ndarray, cb: np.ndarray) -> csr_matrix:
        return coo_matrix((self.values(vm, va, tap, cb), (self.rows, self.cols)), shape=self.shape).tocsr()

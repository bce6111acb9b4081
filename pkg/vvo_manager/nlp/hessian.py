"""
Approximations of the Lagrangian Hessian.

The default differences the analytic Lagrangian gradient along groups of structurally orthogonal
columns, found by greedy colouring of the column intersection graph of the Hessian pattern.
A dense damped BFGS matrix can be selected instead.
"""
from logging import getLogger
from typing import Callable, Dict, Union

import numpy as np
import networkx as nx
from scipy.sparse import coo_matrix, csr_matrix, identity

logger = getLogger(__name__)

GradientFunction = Callable[[np.ndarray], np.ndarray]


class BfgsHessian:
    """
    Dense BFGS approximation with Powell damping, so the matrix stays positive definite
    """

    damping = 0.2

    def __init__(self, n: int):
        self.n = n
        self.matrix_ = np.eye(n)
        self._scaled = False
        self.updates = 0

    def reset(self):
        self.matrix_ = np.eye(self.n)
        self._scaled = False

    def matrix(self, x: np.ndarray, lagrangian_gradient: GradientFunction) -> np.ndarray:  # pylint: disable=unused-argument
        return self.matrix_

    def update(self, s: np.ndarray, y: np.ndarray):
        """
        :param s: the step taken, x_new - x_old
        :param y: change of the Lagrangian gradient along that step (same multipliers on both ends)
        """
        ss = float(s @ s)
        if ss <= 1e-20 or not np.all(np.isfinite(y)):
            return
        sy = float(s @ y)
        if not self._scaled and sy > 0:
            self.matrix_ = np.eye(self.n) * max(float(y @ y) / sy, 1e-8)
            self._scaled = True
        bs = self.matrix_ @ s
        sbs = float(s @ bs)
        if sbs <= 0:
            self.reset()
            return
        if sy < self.damping * sbs:
            theta = (1 - self.damping) * sbs / (sbs - sy)
            y = theta * y + (1 - theta) * bs
            sy = float(s @ y)
        self.matrix_ = self.matrix_ - np.outer(bs, bs) / sbs + np.outer(y, y) / sy
        self.updates += 1


def column_colouring(pattern: csr_matrix) -> np.ndarray:
    """
    Colour the columns of a symmetric pattern so no row has two nonzeros of the same colour
    :param pattern: n x n sparse pattern
    :return: ndarray: colour per column
    """
    n = pattern.shape[0]
    boolean = csr_matrix((np.ones(pattern.nnz), pattern.indices, pattern.indptr), shape=pattern.shape)
    conflicts = (boolean.T @ boolean).tocoo()
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    upper = conflicts.row < conflicts.col
    graph.add_edges_from(zip(conflicts.row[upper].tolist(), conflicts.col[upper].tolist()))
    colouring: Dict[int, int] = nx.coloring.greedy_color(graph, strategy="largest_first")
    return np.array([colouring[j] for j in range(n)], dtype=int)


class FiniteDifferenceHessian:
    """
    Sparse forward difference Hessian of an analytic gradient
    """

    def __init__(self, pattern: csr_matrix):
        pattern = (pattern + pattern.T + identity(pattern.shape[0], format="csr")).tocsr()
        pattern.sum_duplicates()
        self.n = pattern.shape[0]
        coo = pattern.tocoo()
        self.rows, self.cols = coo.row, coo.col
        self.colours = column_colouring(pattern)
        self.n_colours = int(self.colours.max()) + 1 if self.n else 0
        logger.debug("Finite difference Hessian: {} columns in {} groups, {} nonzeros".format(self.n, self.n_colours, len(self.rows)))

    def reset(self):
        pass

    def update(self, s: np.ndarray, y: np.ndarray):
        pass

    def matrix(self, x: np.ndarray, lagrangian_gradient: GradientFunction) -> csr_matrix:
        base = lagrangian_gradient(x)
        steps = np.sqrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(x))
        values = np.zeros(len(self.rows))
        for colour in range(self.n_colours):
            members = self.colours == colour
            shifted = x.copy()
            shifted[members] += steps[members]
            difference = lagrangian_gradient(shifted) - base
            in_group = members[self.cols]
            values[in_group] = difference[self.rows[in_group]] / steps[self.cols[in_group]]
        hessian = coo_matrix((values, (self.rows, self.cols)), shape=(self.n, self.n)).tocsr()
        return ((hessian + hessian.T) * 0.5).tocsr()


Hessian = Union[BfgsHessian, FiniteDifferenceHessian]

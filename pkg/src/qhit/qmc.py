"""Quantum Markov chains: block-operator grids, OQWs and the induced 2-site chain."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import ginverse
from .channel import GoalSubspace, hermitize, is_positive_semidefinite
from .errors import DimensionError, NotIrreducibleError, ValidationError
from .matrep import SuperOp, as_complex, conj_kron, unvec, vec

TP_TOL = 1e-10


class QMC:
    """n_sites x n_sites grid of superoperator blocks on k x k internal matrices.

    Stored as the assembled representation matrix of order n_sites * k^2; the
    per-block view is :meth:`block`.
    """

    def __init__(self, n_sites: int, k: int, rep, check: bool = True):
        rep = as_complex(rep)
        N = n_sites * k * k
        if rep.shape != (N, N):
            raise DimensionError(f"QMC representation must be {N}x{N}, got {rep.shape}")
        self.n_sites = n_sites
        self.k = k
        self.rep = rep
        self._stationary = None
        if check:
            eI = self.identity_vec()
            defect = float(np.max(np.abs(eI.conj() @ rep - eI.conj())))
            if defect > TP_TOL:
                raise ValidationError(
                    f"QMC is not trace preserving (defect {defect:.3e})"
                )

    @property
    def dim(self) -> int:
        return self.n_sites * self.k * self.k

    def block(self, i: int, j: int) -> np.ndarray:
        """k^2 x k^2 representation of the block map Phi_ij."""
        k2 = self.k * self.k
        return self.rep[i * k2:(i + 1) * k2, j * k2:(j + 1) * k2]

    def identity_vec(self) -> np.ndarray:
        """|e_I>: vec(I_k) stacked once per site; <e_I|rho> = Tr(rho)."""
        return np.tile(vec(np.eye(self.k)), self.n_sites)

    def stationary_vec(self) -> np.ndarray:
        """Vectorized stationary density (cached)."""
        if self._stationary is None:
            self._stationary = stationary_density(self).data
        return self._stationary


@dataclass(frozen=True)
class VecState:
    """Stacked vec'd site blocks [vec(rho_1); ...; vec(rho_n)]."""

    n_sites: int
    k: int
    data: np.ndarray

    def block(self, i: int) -> np.ndarray:
        k2 = self.k * self.k
        return unvec(self.data[i * k2:(i + 1) * k2], self.k, self.k)

    def site_traces(self) -> np.ndarray:
        return np.array([np.trace(self.block(i)).real for i in range(self.n_sites)])

    @classmethod
    def from_blocks(cls, blocks) -> "VecState":
        mats = [as_complex(b) for b in blocks]
        k = mats[0].shape[0]
        return cls(n_sites=len(mats), k=k, data=np.concatenate([vec(m) for m in mats]))


@dataclass(frozen=True)
class FixedMap:
    """Rank-one map |pi><e_I| sending every density to the stationary one."""

    omega: np.ndarray


def from_oqw(B) -> QMC:
    """Open quantum walk from a grid B[i][j] of k x k matrices.

    Requires sum_i B_ij* B_ij = I for every column j.
    """
    n = len(B)
    mats = [[as_complex(B[i][j]) for j in range(n)] for i in range(n)]
    k = mats[0][0].shape[0]
    for j in range(n):
        acc = sum(mats[i][j].conj().T @ mats[i][j] for i in range(n))
        if np.max(np.abs(acc - np.eye(k))) > 1e-10:
            raise ValidationError(
                f"OQW column {j} violates sum_i B_ij* B_ij = I"
            )
    k2 = k * k
    rep = np.zeros((n * k2, n * k2), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            rep[i * k2:(i + 1) * k2, j * k2:(j + 1) * k2] = conj_kron(mats[i][j])
    return QMC(n, k, rep)


def induce(S: SuperOp, V: GoalSubspace) -> QMC:
    """The 2-site QMC turning subspace-hitting for S into site-hitting.

    Row 1 carries (I - QQ) S, row 2 carries QQ S, each repeated across both
    columns; trace preservation is inherited from S.
    """
    if S.dim != V.ambient_dim:
        raise DimensionError("channel and subspace dimensions differ")
    n2 = S.dim**2
    top = (np.eye(n2) - V.QQ) @ S.mat
    bot = V.QQ @ S.mat
    rep = np.block([[top, top], [bot, bot]])
    return QMC(n_sites=2, k=S.dim, rep=rep)


def stationary_density(q: QMC) -> VecState:
    """A fixed density of the chain.

    With a one-dimensional fixed space the eigenvector of the representation
    at the eigenvalue nearest 1 is taken directly; otherwise the maximally
    mixed, site-uniform seed is pushed through the ergodic projector
    I - A^# A (a fixed state by the Cesaro-limit identity).  Either way the
    result is renormalized to unit total trace.
    """
    N = q.dim
    if fixed_space_dim(q) == 1:
        w, vecs = np.linalg.eig(q.rep)
        fixed = vecs[:, int(np.argmin(np.abs(w - 1.0)))]
    else:
        A = np.eye(N) - q.rep
        gi = ginverse.group_inverse(A)
        seed = np.tile(vec(np.eye(q.k)), q.n_sites) / (q.n_sites * q.k)
        fixed = gi.ergodic_projector @ seed
    total = np.vdot(q.identity_vec(), fixed)
    if abs(total) < 1e-12:
        raise ValidationError("fixed-space candidate state has zero trace")
    fixed = fixed / total
    # re-hermitize blockwise to absorb roundoff; blocks of an induced chain's
    # fixed vector carry the cross terms P pi Q + Q pi P and need not be PSD
    k2 = q.k * q.k
    blocks = []
    for i in range(q.n_sites):
        X = hermitize(unvec(fixed[i * k2:(i + 1) * k2], q.k, q.k))
        if not is_positive_semidefinite(X, tol=1e-8):
            warnings.warn(
                f"fixed-state block {i} is not positive semidefinite; "
                "this is expected for induced chains of generic channels",
                RuntimeWarning,
                stacklevel=2,
            )
        blocks.append(X)
    return VecState.from_blocks(blocks)


def fixed_space_dim(q: QMC) -> int:
    return q.dim - ginverse.rank_with_margin(np.eye(q.dim) - q.rep)


def fixed_map(q: QMC) -> FixedMap:
    """Omega = |pi><e_I| for a chain with a unique stationary density."""
    if fixed_space_dim(q) != 1:
        raise NotIrreducibleError(
            "fixed space is not one-dimensional; use the group-inverse route instead"
        )
    pi = q.stationary_vec()
    return FixedMap(omega=np.outer(pi, q.identity_vec().conj()))


def site_projectors(q: QMC) -> list:
    """Diagonal 0/1 block projectors P_i selecting site i."""
    k2 = q.k * q.k
    out = []
    for i in range(q.n_sites):
        P = np.zeros((q.dim, q.dim))
        P[i * k2:(i + 1) * k2, i * k2:(i + 1) * k2] = np.eye(k2)
        out.append(P)
    return out


def block_constant_E(q: QMC) -> np.ndarray:
    """Grid of identity blocks: E = [I_{k^2}]_{ij}."""
    return np.tile(np.eye(q.k * q.k), (q.n_sites, q.n_sites))

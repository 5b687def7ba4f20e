"""Generalized, Drazin and group inverses of A = I - (map representation).

Two independent constructions of the group inverse are provided: an ordered
Schur split separating ker(A) from its complementary invariant subspace, and
the resolvent limit (A^2 + zI)^{-1} A as z -> 0.  They cross-check each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NoGroupInverseError, NumericalError, ValidationError
from .matrep import as_complex

RANK_REL_TOL = 1e-10
AXIOM_REL_TOL = 1e-9
ZERO_EIG_TOL = 1e-9
PAIRING_TOL = 1e-12


def rank_with_margin(A, rel_tol: float = RANK_REL_TOL) -> int:
    """Numerical rank via singular values.

    Warns when some singular value lies within a factor of 10 of the cut,
    i.e. when the rank decision is ambiguous.
    """
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    cut = rel_tol * s[0]
    ambiguous = np.sum((s > cut / 10) & (s < cut * 10)) > 0
    if ambiguous:
        warnings.warn(
            "rank decision is ambiguous: singular value within a factor of 10 "
            "of the threshold",
            RuntimeWarning,
            stacklevel=2,
        )
    return int(np.sum(s > cut))


def index(A) -> int:
    """Smallest m >= 0 with rank(A^m) == rank(A^(m+1))."""
    A = as_complex(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValidationError("index is defined for square matrices only")
    prev_rank = n  # rank of A^0
    power = np.eye(n, dtype=np.complex128)
    for m in range(n + 1):
        power = power @ A
        r = rank_with_margin(power)
        if r == prev_rank:
            return m
        prev_rank = r
    return n  # unreachable for sane inputs; ranks strictly decrease at most n times


@dataclass(frozen=True)
class GroupInverse:
    A: np.ndarray
    Asharp: np.ndarray
    index: int
    ergodic_projector: np.ndarray


def group_inverse(A) -> GroupInverse:
    """Group inverse via an ordered (complex) Schur split.

    Eigenvalues within ``ZERO_EIG_TOL`` of zero are sorted first; the
    off-diagonal coupling is removed with a Sylvester solve so that
    ``A = X diag(0, C) X^{-1}`` with C invertible, and the inverse is
    ``X diag(0, C^{-1}) X^{-1}``.
    """
    A = as_complex(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValidationError("group inverse is defined for square matrices only")
    ind = index(A)
    if ind > 1:
        raise NoGroupInverseError(f"matrix has index {ind} > 1, no group inverse")

    T, Zs, sdim = sla.schur(A, output="complex", sort=lambda lam: abs(lam) < ZERO_EIG_TOL)
    k = int(sdim)
    if k == 0:
        Asharp = np.linalg.inv(A)
    elif k == n:
        Asharp = np.zeros_like(A)
    else:
        T11 = T[:k, :k]
        T12 = T[:k, k:]
        T22 = T[k:, k:]
        if np.max(np.abs(T11)) > ZERO_EIG_TOL * max(1.0, np.max(np.abs(A))):
            raise NumericalError("kernel block of the Schur split is not negligible")
        # decouple: [[0, T12], [0, T22]] = W diag(0, T22) W^{-1}, W = [[I, R], [0, I]]
        # with 0*R - R*T22 = -T12, i.e. R = T12 T22^{-1}
        R = np.linalg.solve(T22.conj().T, T12.conj().T).conj().T
        if np.max(np.abs(R)) > 1e8:
            warnings.warn(
                "kernel/range split is badly conditioned", RuntimeWarning, stacklevel=2
            )
        C_inv = np.linalg.inv(T22)
        W = np.eye(n, dtype=np.complex128)
        W[:k, k:] = R
        W_inv = np.eye(n, dtype=np.complex128)
        W_inv[:k, k:] = -R
        M = np.zeros_like(T)
        M[k:, k:] = C_inv
        Asharp = Zs @ (W @ M @ W_inv) @ Zs.conj().T

    _check_group_axioms(A, Asharp)
    return GroupInverse(
        A=A, Asharp=Asharp, index=ind, ergodic_projector=np.eye(n) - Asharp @ A
    )


def _check_group_axioms(A, G, rel_tol: float = AXIOM_REL_TOL):
    scale = max(np.max(np.abs(A)), 1e-30)
    tol = rel_tol * scale
    if np.max(np.abs(A @ G @ A - A)) > tol:
        raise NumericalError("group inverse candidate violates A G A = A")
    if np.max(np.abs(G @ A @ G - G)) > tol * max(1.0, np.max(np.abs(G)) / scale):
        raise NumericalError("group inverse candidate violates G A G = G")
    if np.max(np.abs(A @ G - G @ A)) > tol * max(1.0, np.max(np.abs(G)) / scale):
        raise NumericalError("group inverse candidate violates A G = G A")


@dataclass(frozen=True)
class DrazinLimit:
    estimate: np.ndarray
    z_values: tuple
    residuals: tuple  # per-z residual of A G A = A for G = (A^2 + zI)^{-1} A


def drazin_limit(A, z_schedule=(1e-4, 1e-5, 1e-6)) -> DrazinLimit:
    """Group inverse via the limit (A^2 + zI)^{-1} A, Richardson-extrapolated.

    Independent cross-check of :func:`group_inverse`; requires index(A) <= 1.
    """
    A = as_complex(A)
    n = A.shape[0]
    zs = tuple(sorted(z_schedule, reverse=True))
    if len(zs) < 2:
        raise ValidationError("z schedule needs at least two points")
    evals = []
    residuals = []
    I = np.eye(n)
    for z in zs:
        G = np.linalg.solve(A @ A + z * I, A)
        evals.append(G)
        residuals.append(float(np.max(np.abs(A @ G @ A - A))))
    if len(residuals) >= 2 and residuals[-1] > 10 * residuals[0] + 1e-12:
        raise NumericalError(
            "resolvent-limit residuals are not decreasing; extrapolation unreliable"
        )
    # Lagrange extrapolation of the analytic family G(z) to z = 0
    est = np.zeros_like(A)
    for i, zi in enumerate(zs):
        w = 1.0
        for j, zj in enumerate(zs):
            if i != j:
                w *= (0.0 - zj) / (zi - zj)
        est = est + w * evals[i]
    return DrazinLimit(estimate=est, z_values=zs, residuals=tuple(residuals))


def ergodic_projector(gi: GroupInverse) -> np.ndarray:
    """I - A^# A: projects onto the fixed space of the map Phi = I - A."""
    return gi.ergodic_projector


@dataclass(frozen=True)
class GInverse:
    A: np.ndarray
    G: np.ndarray
    kind: str  # hunter-family | group | fundamental | external
    params: dict = field(default_factory=dict)


def verify_ginverse(A, G, rel_tol: float = AXIOM_REL_TOL) -> float:
    """Return the defect max|AGA - A|; raise if it exceeds rel_tol * max|A|."""
    defect = float(np.max(np.abs(A @ G @ A - A)))
    if defect > rel_tol * max(np.max(np.abs(A)), 1e-30):
        raise NumericalError(f"A G A = A fails with defect {defect:.3e}")
    return defect


def hunter_ginverse(q, t=None, u=None, f=None, g=None) -> GInverse:
    """Parametric g-inverse family of I - Phi for an irreducible QMC.

    G = (I - Phi + |t><u|)^{-1} + |pi><f| + |g><e_I|, requiring <e_I|t> != 0
    and <u|pi> != 0.  Defaults: t = u = e_1, f = g = 0.
    """
    rep = q.rep
    N = rep.shape[0]
    e_I = q.identity_vec()
    pi = q.stationary_vec()

    def _vec(v, default):
        if v is None:
            return default
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        if v.size != N:
            raise ValidationError(f"parameter vector must have length {N}")
        return v

    e1 = np.zeros(N, dtype=np.complex128)
    e1[0] = 1.0
    zero = np.zeros(N, dtype=np.complex128)
    t = _vec(t, e1)
    u = _vec(u, e1)
    f = _vec(f, zero)
    g = _vec(g, zero)

    if abs(np.vdot(e_I, t)) < PAIRING_TOL:
        raise ValidationError("<e_I|t> vanishes; inner matrix would be singular")
    if abs(np.vdot(u, pi)) < PAIRING_TOL:
        raise ValidationError("<u|pi> vanishes; inner matrix would be singular")

    A = np.eye(N) - rep
    G = np.linalg.inv(A + np.outer(t, u.conj()))
    G = G + np.outer(pi, f.conj()) + np.outer(g, e_I.conj())
    verify_ginverse(A, G)
    return GInverse(A=A, G=G, kind="hunter-family", params={"t": t, "u": u, "f": f, "g": g})


def hunter_special(q, u=None, f=None) -> GInverse:
    """The KSMH-ready special form G = (I - Phi + |u><e_I|)^{-1} + |f><e_I|.

    This is the Hunter family at t = u, bra fixed to <e_I|, which makes the
    plain kernel D(I - G + G_d E) valid without the fixed-map correction.
    """
    e_I = q.identity_vec()
    gi = hunter_ginverse(q, t=u, u=e_I, f=None, g=f)
    return GInverse(A=gi.A, G=gi.G, kind="hunter-family",
                    params={"u": gi.params["t"], "f": gi.params["g"], "special": True})

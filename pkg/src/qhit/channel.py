"""Quantum channels, goal subspaces and their spectral diagnostics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ginverse
from .errors import DimensionError, ValidationError
from .matrep import DEFAULT_ATOL, SuperOp, as_complex, conj_kron, unvec, vec

EIG_ONE_TOL = 1e-9
PSD_TOL = 1e-10
TP_TOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """A channel X -> sum_i V_i X V_i*, trace preserving by construction."""

    dim: int
    kraus: tuple

    def __post_init__(self):
        ops = tuple(as_complex(V) for V in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        for V in ops:
            if V.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"Kraus operator of shape {V.shape} on a dim-{self.dim} channel"
                )
        object.__setattr__(self, "kraus", ops)
        defect = self.tp_defect()
        if defect > TP_TOL:
            raise ValidationError(
                f"Kraus operators violate sum V*V = I (defect {defect:.3e})"
            )

    def tp_defect(self) -> float:
        acc = sum(V.conj().T @ V for V in self.kraus)
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    @classmethod
    def from_unitary(cls, U) -> "KrausChannel":
        U = as_complex(U)
        return cls(dim=U.shape[0], kraus=(U,))


def represent(ch: KrausChannel) -> SuperOp:
    """Matrix representation sum_i V_i kron conj(V_i)."""
    mat = sum(conj_kron(V) for V in ch.kraus)
    return SuperOp(ch.dim, mat)


def unitary_superop(U) -> SuperOp:
    return represent(KrausChannel.from_unitary(U))


def hermitize(X) -> np.ndarray:
    return (X + X.conj().T) / 2


def is_positive_semidefinite(X, tol: float = PSD_TOL) -> bool:
    w = np.linalg.eigvalsh(hermitize(X))
    return bool(w.min() >= -tol)


def is_density(rho, tol: float = DEFAULT_ATOL) -> bool:
    rho = as_complex(rho)
    if rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > 1e2 * tol:
        return False
    if abs(np.trace(rho) - 1.0) > 1e2 * tol:
        return False
    return is_positive_semidefinite(rho)


def pure_density(phi) -> np.ndarray:
    """Density |phi><phi| of a state vector, normalized first."""
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        raise ValidationError("zero vector is not a state")
    phi = phi / nrm
    return np.outer(phi, phi.conj())


def choi_matrix(S: SuperOp) -> np.ndarray:
    """Choi matrix of the map, C = sum_ij |i><j| kron T(|i><j|)."""
    n = S.dim
    C = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            Eij = np.zeros((n, n), dtype=np.complex128)
            Eij[i, j] = 1.0
            C[i * n:(i + 1) * n, j * n:(j + 1) * n] = S(Eij)
    return C


def is_completely_positive(S: SuperOp, tol: float = 1e-9) -> bool:
    """Choi-matrix PSD test; mainly for maps loaded as raw representations."""
    return is_positive_semidefinite(choi_matrix(S), tol=tol)


def fixed_states(S: SuperOp) -> list:
    """Basis of the fixed space ker(S.mat - I), each returned as a matrix.

    When the span contains a density, the first returned element is a
    normalized positive fixed density (the ergodic projection of the
    maximally mixed state).
    """
    n = S.dim
    A = np.eye(n * n) - S.mat
    sv = np.linalg.svd(A, compute_uv=False)
    cut = max(sv[0], 1.0) * 1e-10
    if np.any((sv > cut / 10) & (sv < cut * 10)):
        warnings.warn(
            "fixed-space dimension is numerically ambiguous near eigenvalue 1",
            RuntimeWarning,
            stacklevel=2,
        )
    _, _, Vh = np.linalg.svd(A)
    k = int(np.sum(sv <= cut))
    if k == 0:
        return []
    kernel = Vh[n * n - k:].conj().T  # columns span ker(A)

    cols = [kernel[:, i] for i in range(k)]
    gi = ginverse.group_inverse(A)
    cand = unvec(gi.ergodic_projector @ vec(np.eye(n) / n), n, n)
    cand = hermitize(cand)
    tr = np.trace(cand).real
    if tr > 1e-9 and is_positive_semidefinite(cand / tr, tol=1e-8):
        cand = cand / tr
        # rebuild a basis that starts with the density
        basis = [vec(cand) / np.linalg.norm(vec(cand))]
        for c in cols:
            r = c - sum(np.vdot(b, c) * b for b in basis)
            if np.linalg.norm(r) > 1e-8:
                basis.append(r / np.linalg.norm(r))
        basis = basis[:k]
        out = [cand] + [unvec(b, n, n) for b in basis[1:]]
        return out
    return [unvec(c, n, n) for c in cols]


@dataclass(frozen=True)
class ChannelDiagnostics:
    is_trace_preserving: bool
    is_unital: bool
    fixed_space_dim: int
    is_irreducible: bool
    peripheral_eigenvalues: tuple
    jordan_trivial_at_1: bool
    tp_defect: float = 0.0
    fixed_density_min_eig: float = float("nan")


def diagnose(S: SuperOp, tp_defect: float | None = None) -> ChannelDiagnostics:
    """Spectral diagnostics of a trace-preserving map given by its representation."""
    n = S.dim
    if tp_defect is None:
        # <vec(I)| S = <vec(I)| characterizes trace preservation
        eI = vec(np.eye(n))
        tp_defect = float(np.max(np.abs(eI.conj() @ S.mat - eI.conj())))
    is_tp = tp_defect <= TP_TOL
    is_unital = bool(np.max(np.abs(S(np.eye(n)) - np.eye(n))) <= 1e-9)

    eigvals = np.linalg.eigvals(S.mat)
    peripheral = tuple(lam for lam in eigvals if abs(abs(lam) - 1.0) < EIG_ONE_TOL)

    A = np.eye(n * n) - S.mat
    r1 = ginverse.rank_with_margin(A)
    fixed_dim = n * n - r1
    jordan_trivial = r1 == ginverse.rank_with_margin(A @ A)

    min_eig = float("nan")
    irreducible = False
    if fixed_dim == 1:
        fs = fixed_states(S)
        if fs:
            pi = hermitize(fs[0])
            tr = np.trace(pi).real
            if abs(tr) > 1e-12:
                pi = pi / tr
                min_eig = float(np.linalg.eigvalsh(pi).min())
                irreducible = min_eig > EIG_ONE_TOL
    return ChannelDiagnostics(
        is_trace_preserving=is_tp,
        is_unital=is_unital,
        fixed_space_dim=fixed_dim,
        is_irreducible=irreducible,
        peripheral_eigenvalues=peripheral,
        jordan_trivial_at_1=jordan_trivial,
        tp_defect=tp_defect,
        fixed_density_min_eig=min_eig,
    )


def validate(ch: KrausChannel) -> ChannelDiagnostics:
    return diagnose(represent(ch), tp_defect=ch.tp_defect())


@dataclass(frozen=True)
class GoalSubspace:
    """Goal subspace V with projectors P, Q = I - P and their representations.

    PP, QQ, RR are the n^2 x n^2 representations of P.P, Q.Q and PQ.+QP..
    """

    ambient_dim: int
    basis: np.ndarray  # n x d, orthonormal columns
    P: np.ndarray = field(init=False)
    Q: np.ndarray = field(init=False)
    PP: np.ndarray = field(init=False)
    QQ: np.ndarray = field(init=False)
    RR: np.ndarray = field(init=False)

    def __post_init__(self):
        B = as_complex(self.basis)
        if B.ndim != 2 or B.shape[0] != self.ambient_dim:
            raise DimensionError("basis must be an n x d matrix of column vectors")
        if np.max(np.abs(B.conj().T @ B - np.eye(B.shape[1]))) > 1e-8:
            raise ValidationError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", B)
        P = B @ B.conj().T
        Q = np.eye(self.ambient_dim) - P
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "PP", conj_kron(P))
        object.__setattr__(self, "QQ", conj_kron(Q))
        object.__setattr__(self, "RR", np.kron(P, Q.conj()) + np.kron(Q, P.conj()))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: int | None = None) -> "GoalSubspace":
        """Build from spanning vectors; orthonormalizes with QR."""
        V = np.column_stack([np.asarray(v, dtype=np.complex128).reshape(-1)
                             for v in vectors])
        n = ambient_dim if ambient_dim is not None else V.shape[0]
        if V.shape[0] != n:
            raise DimensionError("subspace vectors have wrong length")
        Qmat, Rmat = np.linalg.qr(V)
        keep = np.abs(np.diag(Rmat)) > 1e-10 * max(1.0, np.abs(Rmat).max())
        if not np.any(keep):
            raise ValidationError("subspace vectors are linearly dependent to zero")
        return cls(ambient_dim=n, basis=Qmat[:, keep])

    def contains(self, rho, tol: float = 1e-8) -> bool:
        """Whether a density is supported in V."""
        v = vec(rho)
        return bool(np.max(np.abs(self.PP @ v - v)) <= tol)

    def contains_perp(self, rho, tol: float = 1e-8) -> bool:
        v = vec(rho)
        return bool(np.max(np.abs(self.QQ @ v - v)) <= tol)


def assumption_one_holds(S: SuperOp, V: GoalSubspace, tol: float = EIG_ONE_TOL):
    """True iff 1 is not an eigenvalue of QQ * S; also returns the spectrum.

    This spectral condition makes the hitting generating function analytic at
    z = 1 and all mean hitting times to V finite.
    """
    eigvals = np.linalg.eigvals(V.QQ @ S.mat)
    offending = [lam for lam in eigvals if abs(lam - 1.0) < tol]
    return len(offending) == 0, eigvals


def randomize(S1: SuperOp, S2: SuperOp, p: float) -> SuperOp:
    """Convex combination p*S1 + (1-p)*S2."""
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"mixing probability must lie in [0, 1], got {p}")
    if S1.dim != S2.dim:
        raise DimensionError("cannot mix channels of different dimensions")
    return SuperOp(S1.dim, p * S1.mat + (1.0 - p) * S2.mat)

"""Hitting-time kernels: site hitting operators, the D(I - G + G_d E) kernel
and its fixed-map-corrected and group-inverse variants, plus the channel-level
dispatcher over all computation routes.

Site indices are 0-based throughout: for an induced 2-site chain, site 0 is
the goal subspace V and site 1 its complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ginverse, monitor
from .channel import GoalSubspace, diagnose, is_density
from .errors import (NotIrreducibleError, SpectralObstructionError,
                     ValidationError)
from .matrep import SuperOp, vec
from .qmc import QMC, VecState, block_constant_E, induce, site_projectors

EIG_ONE_TOL = 1e-9


def diag_blocks(M, n_sites: int, k: int) -> np.ndarray:
    """Block-diagonal part: zero everywhere except the diagonal k^2 blocks."""
    M = np.asarray(M, dtype=np.complex128)
    k2 = k * k
    if M.shape != (n_sites * k2, n_sites * k2):
        raise ValidationError(
            f"matrix of shape {M.shape} lacks the {n_sites}x{n_sites} grid of "
            f"order-{k2} blocks"
        )
    out = np.zeros_like(M)
    for i in range(n_sites):
        sl = slice(i * k2, (i + 1) * k2)
        out[sl, sl] = M[sl, sl]
    return out


def _block(M, i: int, j: int, k: int) -> np.ndarray:
    k2 = k * k
    return M[i * k2:(i + 1) * k2, j * k2:(j + 1) * k2]


@dataclass(frozen=True)
class QmcHittingOperators:
    """Per-target-site hitting operators K^(i) = Phi (I - Q_i Phi)^{-2}.

    ``K_ops[i]`` is the full operator for target i; block (i, j) of it is the
    mean-hitting-time operator K_ij.  ``D`` carries the diagonal blocks K_ii
    where available (absent sites keep a zero block, flagged in
    ``availability``).
    """

    n_sites: int
    k: int
    K_ops: dict
    D: np.ndarray
    availability: dict  # site -> (available, offending eigenvalues)
    fallback_sites: tuple = ()

    def K_block(self, i: int, j: int) -> np.ndarray:
        if i not in self.K_ops:
            raise SpectralObstructionError(
                f"hitting operator for site {i} unavailable",
                eigenvalues=self.availability[i][1],
            )
        return _block(self.K_ops[i], i, j, self.k)


def qmc_hitting_operators(q: QMC, targets=None) -> QmcHittingOperators:
    """Analytic site-hitting operators; per-site spectral failures are flagged,
    not fatal."""
    sites = list(range(q.n_sites)) if targets is None else sorted(set(targets))
    projs = site_projectors(q)
    N = q.dim
    K_ops = {}
    availability = {}
    D = np.zeros((N, N), dtype=np.complex128)
    k2 = q.k * q.k
    for i in sites:
        Qi = np.eye(N) - projs[i]
        eigvals = np.linalg.eigvals(Qi @ q.rep)
        bad = [lam for lam in eigvals if abs(lam - 1.0) < EIG_ONE_TOL]
        if bad:
            availability[i] = (False, bad)
            continue
        M = np.linalg.inv(np.eye(N) - Qi @ q.rep)
        K = q.rep @ M @ M
        K_ops[i] = K
        availability[i] = (True, [])
        sl = slice(i * k2, (i + 1) * k2)
        D[sl, sl] = K[sl, sl]
    # A spectrally obstructed site has no plain resolvent K^(i).  Two cases:
    # if the Abel-regularized return-probability operator on block (i, i) is
    # still trace preserving, returns to i are certain, the mean return
    # operator exists as the Abel limit of the series, and that limit fills
    # D_ii.  Otherwise some mass never returns; D_ii never enters any
    # off-diagonal hitting time, so block (i, i) of an available site's
    # operator is borrowed as a finite stand-in (matching the block structure
    # of the group-inverse kernel).
    fallback = []
    donor = next((j for j in sites if availability[j][0]), None)
    eIk = vec(np.eye(q.k))
    for i in sites:
        if availability[i][0]:
            continue
        sl = slice(i * k2, (i + 1) * k2)
        filled = False
        try:
            Bsharp = ginverse.group_inverse(np.eye(N) - (np.eye(N) - projs[i]) @ q.rep).Asharp
            ret_defect = np.max(np.abs(
                eIk.conj() @ (q.rep @ Bsharp)[sl, sl] - eIk.conj()))
            if ret_defect < 1e-8:
                D[sl, sl] = (q.rep @ Bsharp @ Bsharp)[sl, sl]
                availability[i] = (False, availability[i][1])
                fallback.append((i, "abel-return"))
                filled = True
        except Exception:
            pass
        if not filled and donor is not None:
            D[sl, sl] = K_ops[donor][sl, sl]
            fallback.append((i, f"donor-{donor}"))
    return QmcHittingOperators(n_sites=q.n_sites, k=q.k, K_ops=K_ops, D=D,
                               availability=availability,
                               fallback_sites=tuple(fallback))


@dataclass(frozen=True)
class KsmhKernel:
    kernel: np.ndarray
    variant: str  # fixed-map-corrected | plain | group
    n_sites: int
    k: int

    def block(self, i: int, j: int) -> np.ndarray:
        return _block(self.kernel, i, j, self.k)


def ksmh_kernel(q: QMC, D, G, omega=None, E=None, variant: str | None = None) -> KsmhKernel:
    """Assemble the hitting-time kernel from a g-inverse G of I - Phi.

    Plain form D(I - G + G_d E) is valid when G has the special Hunter shape
    (bra <e_I|) or is the group inverse; the fixed-map-corrected form
    D(Omega G - (Omega G)_d E + I - G + G_d E) is valid for any g-inverse of
    an irreducible chain.
    """
    E = block_constant_E(q) if E is None else np.asarray(E, dtype=np.complex128)
    D = np.asarray(D, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    n, k = q.n_sites, q.k
    I = np.eye(q.dim)
    core = I - G + diag_blocks(G, n, k) @ E
    if omega is not None:
        om = omega.omega if hasattr(omega, "omega") else np.asarray(omega)
        OG = om @ G
        core = OG - diag_blocks(OG, n, k) @ E + core
        tag = "fixed-map-corrected"
    else:
        tag = "plain"
    return KsmhKernel(kernel=D @ core, variant=variant or tag, n_sites=n, k=k)


def _trace_block(kernel_block: np.ndarray, rho, k: int) -> float:
    v = kernel_block @ vec(rho)
    t = complex(np.vdot(vec(np.eye(k)), v))
    if abs(t.imag) > 1e-9:
        raise ValidationError(f"hitting time has imaginary part {t.imag:.3e}")
    return t.real


def tau_irreducible_qmc(q: QMC, kernel: KsmhKernel, i: int, j: int, rho_j) -> float:
    """Mean hitting time to site i from a density rho_j at site j."""
    rho_j = np.asarray(rho_j, dtype=np.complex128)
    if rho_j.shape != (q.k, q.k):
        raise ValidationError(f"site density must be {q.k}x{q.k}")
    return _trace_block(kernel.block(i, j), rho_j, q.k)


def first_step_operator_L(q: QMC, ops: QmcHittingOperators) -> np.ndarray:
    """L = K - (K - D) Phi with K assembled row-wise from the target operators.

    Exposed so the first-step identity Tr(L_ij rho_j) = Tr(rho_j) can be
    asserted; requires every site's hitting operator.
    """
    missing = [i for i in range(q.n_sites) if i not in ops.K_ops]
    if missing:
        raise SpectralObstructionError(
            f"hitting operators unavailable for sites {missing}",
            eigenvalues=sum((ops.availability[i][1] for i in missing), []),
        )
    k2 = q.k * q.k
    K = np.zeros((q.dim, q.dim), dtype=np.complex128)
    for i in range(q.n_sites):
        K[i * k2:(i + 1) * k2, :] = ops.K_ops[i][i * k2:(i + 1) * k2, :]
    return K - (K - ops.D) @ q.rep


METHODS = ("series", "analytic-K", "ksmh-ginverse", "ksmh-group")


@dataclass
class TauReport:
    method: str
    tau: float | None
    ok: bool
    preconditions: dict
    detail: str = ""
    artifacts: dict = field(default_factory=dict)


def tau_channel(S: SuperOp, V: GoalSubspace, rho, method: str,
                keep_artifacts: bool = False) -> TauReport:
    """Mean hitting time to V from a density in its complement, by one route.

    Routes: direct monitoring series; analytic mean-hitting-time map K;
    KSMH kernel with a Hunter g-inverse of the induced chain (irreducible
    channels); KSMH kernel with the group inverse (spectral condition only).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not is_density(rho):
        raise ValidationError("initial state must be a density matrix")
    if not V.contains_perp(rho):
        raise ValidationError("initial density must be supported in the complement of V")

    pre: dict = {}
    art: dict = {}

    if method == "series":
        series = monitor.first_visit_series(S, V, rho)
        pre["series_converged"] = series.converged
        pre["hitting_probability"] = series.cumulative_prob
        if keep_artifacts:
            art["series"] = series
        return TauReport(method=method, tau=series.tau, ok=series.converged,
                         preconditions=pre, artifacts=art)

    from .channel import assumption_one_holds  # local to avoid cycle at import time
    from .hitting import analytic_HK, tau_from_K

    if method == "analytic-K":
        ok, _ = assumption_one_holds(S, V)
        pre["assumption_one"] = ok
        if not ok:
            return TauReport(method=method, tau=None, ok=False, preconditions=pre,
                             detail="1 lies in the spectrum of Q.T")
        maps = analytic_HK(S, V)
        if keep_artifacts:
            art["K"] = maps.K.mat
        return TauReport(method=method, tau=tau_from_K(maps, rho, "in-V-perp"),
                         ok=True, preconditions=pre, artifacts=art)

    q = induce(S, V)
    ops = qmc_hitting_operators(q)
    pre["site0_operator_available"] = ops.availability[0][0]
    pre["site1_operator_available"] = ops.availability[1][0]
    if not ops.availability[0][0]:
        return TauReport(method=method, tau=None, ok=False, preconditions=pre,
                         detail="1 lies in the spectrum of Q_0 Phi "
                                "(equivalently of Q.T)")

    if method == "ksmh-ginverse":
        diag = diagnose(S)
        pre["channel_irreducible"] = diag.is_irreducible
        if not diag.is_irreducible:
            return TauReport(method=method, tau=None, ok=False, preconditions=pre,
                             detail="channel is not irreducible; use ksmh-group")
        gi = ginverse.hunter_special(q)
        G = gi.G
        variant = "plain"
    else:  # ksmh-group
        A = np.eye(q.dim) - q.rep
        gsharp = ginverse.group_inverse(A)
        G = gsharp.Asharp
        variant = "group"

    kern = ksmh_kernel(q, ops.D, G, variant=variant)
    tau = tau_irreducible_qmc(q, kern, 0, 1, rho)
    if keep_artifacts:
        art.update({"qmc": q, "D": ops.D, "G": G, "kernel": kern.kernel})
    return TauReport(method=method, tau=tau, ok=True, preconditions=pre,
                     artifacts=art)


@dataclass(frozen=True)
class KernelLimitPoint:
    p: float
    tau: float
    g_norm: float
    kernel: np.ndarray


@dataclass(frozen=True)
class KernelLimitReport:
    points: tuple
    H0_extrapolated: np.ndarray
    H0_direct: np.ndarray
    tau_direct: float
    extrapolation_defect: float
    g_norms_diverge: bool


def kernel_limit_study(T: SuperOp, Mprime: SuperOp, V: GoalSubspace, p_values,
                       rho=None, t=None, f=None) -> KernelLimitReport:
    """Behaviour of the KSMH kernel of the randomization p T + (1-p) M' as p -> 0.

    For each p the Hunter g-inverse G_p and kernel H_p are formed; the kernel
    limit H_0 is extrapolated from the three smallest p values and compared
    with the kernel computed directly at p = 0 from the group inverse.  The
    divergence of ||G_p|| alongside a convergent H_p is the reported finding.
    """
    from .channel import randomize

    if rho is None:
        # default initial state: normalized projection of the mixed state onto V-perp
        rho = V.Q @ (np.eye(V.ambient_dim) / V.ambient_dim) @ V.Q
        rho = rho / np.trace(rho).real
    ps = sorted(set(float(p) for p in p_values), reverse=True)
    if any(p <= 0 or p > 1 for p in ps):
        raise ValidationError("p values must lie in (0, 1]")

    points = []
    for p in ps:
        q = induce(randomize(T, Mprime, p), V)
        ops = qmc_hitting_operators(q)
        gi = ginverse.hunter_special(q, u=t, f=f)
        kern = ksmh_kernel(q, ops.D, gi.G)
        tau = tau_irreducible_qmc(q, kern, 0, 1, rho)
        points.append(KernelLimitPoint(p=p, tau=tau,
                                       g_norm=float(np.linalg.norm(gi.G, 2)),
                                       kernel=kern.kernel))

    # polynomial (Lagrange) extrapolation to p = 0 from the three smallest p
    tail = points[-3:] if len(points) >= 3 else points
    H0_ext = np.zeros_like(tail[0].kernel)
    for a in tail:
        w = 1.0
        for b in tail:
            if a is not b:
                w *= (0.0 - b.p) / (a.p - b.p)
        H0_ext = H0_ext + w * a.kernel

    q0 = induce(Mprime, V)
    ops0 = qmc_hitting_operators(q0)
    gs = ginverse.group_inverse(np.eye(q0.dim) - q0.rep)
    kern0 = ksmh_kernel(q0, ops0.D, gs.Asharp, variant="group")
    tau0 = tau_irreducible_qmc(q0, kern0, 0, 1, rho)

    norms = [pt.g_norm for pt in points]
    diverges = len(norms) >= 2 and norms[-1] > norms[0] and all(
        norms[i] <= norms[i + 1] * (1 + 1e-9) for i in range(len(norms) - 1)
    )
    return KernelLimitReport(
        points=tuple(points),
        H0_extrapolated=H0_ext,
        H0_direct=kern0.kernel,
        tau_direct=tau0,
        extrapolation_defect=float(np.max(np.abs(H0_ext - kern0.kernel))),
        g_norms_diverge=diverges,
    )

"""
Fidelity, geometric coherence and PPT-relaxed geometric entanglement.

The numerical measures maximize the fidelity ``F(rho, chi)`` over a convex
set of states ``chi`` through the semidefinite program

    maximize  Re Tr(X)   s.t.  [[rho, X], [X^H, chi]] >= 0,  chi in set,

whose optimum is ``F(rho, chi)`` for fixed ``chi``.  The set is one of
:class:`Fixed`, :class:`DiagonalIncoherent` or :class:`PptBipartite`.
Everything else in this module is a closed-form value or bound used to
check the SDP results.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .errors import BadParameter, DimensionMismatch, SolverError
from .linalg import (
    DensityMatrix,
    PureState,
    as_density_matrix,
    hermitize,
    partial_transpose,
    rounding_floor,
    sqrt_psd,
)

log = logging.getLogger(__name__)

# solver outcomes other than Optimal are still reported when this accurate
_ACCEPT_TOL = 1e-7


# ---------------------------------------------------------------------------
# feasible sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    chi: DensityMatrix


@dataclass(frozen=True)
class DiagonalIncoherent:
    pass


@dataclass(frozen=True)
class PptBipartite:
    dA: int
    dB: int


ChiConstraint = Fixed | DiagonalIncoherent | PptBipartite


@dataclass
class MeasureResult:
    value: float
    fidelity: float
    closest_state: DensityMatrix
    bounds: tuple[float, float] | None = None
    solver_stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------


def fidelity_direct(rho, chi) -> float:
    """``Tr sqrt(sqrt(rho) chi sqrt(rho))`` by eigendecomposition, clamped to [0, 1]."""
    rho = as_density_matrix(rho)
    chi = as_density_matrix(chi)
    if rho.dim != chi.dim:
        raise DimensionMismatch(f"dimensions differ: {rho.dim} vs {chi.dim}")
    s = sqrt_psd(rho.mat)
    w = np.linalg.eigvalsh(hermitize(s @ chi.mat @ s))
    w = np.where(w <= rounding_floor(w), 0.0, w)
    f = float(np.sum(np.sqrt(w)))
    return min(max(f, 0.0), 1.0)


def fidelity_pure(psi: PureState, chi) -> float:
    chi = as_density_matrix(chi)
    if psi.dim != chi.dim:
        raise DimensionMismatch(f"dimensions differ: {psi.dim} vs {chi.dim}")
    a = psi.amplitudes
    return math.sqrt(max(float(np.vdot(a, chi.mat @ a).real), 0.0))


# ---------------------------------------------------------------------------
# SDP construction
# ---------------------------------------------------------------------------


class _Builder:
    """Accumulates real-embedded linear constraints on complex Hermitian blocks.

    A functional is a list of ``(block, a, b, h)`` terms meaning
    ``Re sum h * M_block[b, a]``, i.e. ``Re Tr(H M)`` with ``H[a, b] = h``.
    """

    def __init__(self, sizes):
        self.sizes = list(sizes)
        self.entries = [([], [], [], []) for _ in sizes]
        self.rhs = []

    @staticmethod
    def re(block, r, c):
        if r == c:
            return [(block, r, r, 1.0)]
        return [(block, c, r, 0.5), (block, r, c, 0.5)]

    @staticmethod
    def im(block, r, c):
        return [(block, c, r, -0.5j), (block, r, c, 0.5j)]

    def embed_terms(self, terms):
        """Real triplets of ``embed(H)`` for each block; ``Tr(embed(H) embed(M)) = 2 Re Tr(HM)``."""
        out = {}
        for block, a, b, h in terms:
            n = self.sizes[block]
            lst = out.setdefault(block, [])
            if h.real:
                lst += [(a, b, h.real), (n + a, n + b, h.real)]
            if h.imag:
                lst += [(n + a, b, h.imag), (a, n + b, -h.imag)]
        return out

    def add(self, terms, value: float) -> None:
        i = len(self.rhs)
        for block, trips in self.embed_terms(terms).items():
            con, row, col, val = self.entries[block]
            for a, b, v in trips:
                con.append(i)
                row.append(a)
                col.append(b)
                val.append(v)
        self.rhs.append(2.0 * value)

    def pin(self, block, offset, target: np.ndarray) -> None:
        """Constrain the sub-block at ``offset`` to equal the Hermitian ``target``."""
        n = target.shape[0]
        for r in range(n):
            for c in range(r, n):
                self.add(self.re(block, offset + r, offset + c), target[r, c].real)
                if r != c:
                    self.add(self.im(block, offset + r, offset + c), target[r, c].imag)

    def problem(self, objective_terms) -> sdp.SdpProblem:
        objective = []
        emb = self.embed_terms(objective_terms)
        for k, n in enumerate(self.sizes):
            c = np.zeros((2 * n, 2 * n))
            for a, b, v in emb.get(k, []):
                c[a, b] += v
            objective.append(c)
        entries = [tuple(np.asarray(x) for x in e) for e in self.entries]
        return sdp.SdpProblem.from_triplets([2 * n for n in self.sizes], objective, entries, self.rhs)


RANK_TOL = 1e-14


def _support(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(basis, pinned)`` with ``m = basis @ pinned @ basis^H``.

    Full-rank input is returned untouched (identity basis).  Otherwise the
    block is restricted to the eigenvectors with eigenvalue above
    ``RANK_TOL``; pinning a singular block would leave the program without
    a strictly feasible point and its dual optimum unattained.
    """
    w, v = np.linalg.eigh(m)
    if w[0] > RANK_TOL:
        return np.eye(m.shape[0]), m
    keep = w > RANK_TOL
    return v[:, keep], np.diag(w[keep]).astype(complex)


def build_fidelity_sdp(rho, constraint: ChiConstraint) -> sdp.SdpProblem:
    """Real-embedded SDP whose optimum is twice the maximal fidelity.

    Block 0 is the embedded matrix ``[[R, X], [X^H, S]]`` with ``R`` pinned
    to ``rho``; the objective is ``Re Tr(X)`` (weight 1/2 on the ``X`` and
    ``X^H`` positions).  ``S`` is pinned to ``chi`` (:class:`Fixed`),
    restricted to diagonal unit-trace matrices (:class:`DiagonalIncoherent`),
    or tied through equality constraints to a second PSD block
    ``W = PT_A(S)`` (:class:`PptBipartite`).

    A rank-deficient ``rho`` (or fixed ``chi``) is replaced by its support:
    ``R`` is pinned to the diagonal of nonzero eigenvalues and the
    objective becomes ``Re Tr(V X' W^H)`` with ``V``, ``W`` the support bases.
    """
    rho = as_density_matrix(rho)
    d = rho.dim
    left, pinned_left = _support(rho.mat)
    r = left.shape[1]
    right, pinned_right = np.eye(d), None
    if isinstance(constraint, Fixed):
        chi = as_density_matrix(constraint.chi)
        if chi.dim != d:
            raise DimensionMismatch(f"dimensions differ: {d} vs {chi.dim}")
        right, pinned_right = _support(chi.mat)
    s = right.shape[1]

    if isinstance(constraint, PptBipartite):
        if constraint.dA * constraint.dB != d:
            raise DimensionMismatch(f"dims {constraint.dA}x{constraint.dB} do not factor dimension {d}")
        b = _Builder([r + s, d])
    else:
        b = _Builder([r + s])
    b.pin(0, 0, pinned_left)

    if isinstance(constraint, Fixed):
        b.pin(0, r, pinned_right)
    elif isinstance(constraint, DiagonalIncoherent):
        for i in range(d):
            for j in range(i + 1, d):
                b.add(b.re(0, r + i, r + j), 0.0)
                b.add(b.im(0, r + i, r + j), 0.0)
        b.add([t for i in range(d) for t in b.re(0, r + i, r + i)], 1.0)
    elif isinstance(constraint, PptBipartite):
        db = constraint.dB
        for p in range(d):
            for q in range(p, d):
                # W[(i,k),(j,l)] = S[(j,k),(i,l)]
                (i, k), (j, l) = divmod(p, db), divmod(q, db)
                ps, qs = r + j * db + k, r + i * db + l
                b.add(b.re(1, p, q) + [(0, u, v, -h) for _, u, v, h in b.re(0, ps, qs)], 0.0)
                if p != q:
                    b.add(b.im(1, p, q) + [(0, u, v, -h) for _, u, v, h in b.im(0, ps, qs)], 0.0)
        b.add([t for i in range(d) for t in b.re(0, r + i, r + i)], 1.0)
    else:
        raise TypeError(f"unknown constraint {constraint!r}")

    # Re Tr(V X' W^H) = Re sum_{a,j} X'[a, j] G[j, a],  G = W^H V
    g = right.conj().T @ left
    objective = []
    for j, a in zip(*np.nonzero(np.abs(g) > 1e-15)):
        objective += [(0, r + j, a, 0.5 * g[j, a]), (0, a, r + j, 0.5 * np.conj(g[j, a]))]
    problem = b.problem(objective)

    # strictly feasible start: X = 0 and the maximally mixed free state
    s0 = pinned_right if pinned_right is not None else np.eye(d) / d
    start = [sdp.embed_complex(_block_diag(pinned_left, s0))]
    if isinstance(constraint, PptBipartite):
        start.append(sdp.embed_complex(np.eye(d) / d))
    problem.primal_start = start
    return problem


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=complex)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0] :, a.shape[0] :] = b
    return out


def _clean_state(s: np.ndarray) -> DensityMatrix:
    w, v = np.linalg.eigh(hermitize(s))
    w = np.clip(w, 0.0, None)
    m = (v * w) @ v.conj().T
    return DensityMatrix(hermitize(m / np.trace(m).real))


def _run(rho: DensityMatrix, constraint, config) -> tuple[float, DensityMatrix, sdp.SdpSolution]:
    t0 = time.perf_counter()
    problem = build_fidelity_sdp(rho, constraint)
    sol = sdp.solve(problem, config or sdp.SolverConfig())
    if not sol.optimal:
        ok = sol.relative_gap <= _ACCEPT_TOL and max(sol.primal_residual, sol.dual_residual) <= _ACCEPT_TOL
        if not ok or sol.status is sdp.Status.INFEASIBLE:
            raise SolverError(f"SDP solver returned {sol.status.value}: {sol.message}", sol)
        log.warning("accepting %s iterate (gap %.2e)", sol.status.value, sol.relative_gap)
    sol.wall_time = time.perf_counter() - t0
    d = rho.dim
    zc = sdp.unembed_complex(sol.primal_blocks[0])
    fid = min(max(sol.primal_objective / 2, 0.0), 1.0)
    return fid, _clean_state(zc[-d:, -d:]), sol


def _stats(sol: sdp.SdpSolution) -> dict:
    return {
        "status": sol.status.value,
        "iterations": sol.iterations,
        "relative_gap": sol.relative_gap,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "wall_time": sol.wall_time,
    }


def fidelity_sdp(rho, chi, config: sdp.SolverConfig | None = None) -> tuple[float, dict]:
    """Fidelity computed through the SDP instead of eigendecomposition."""
    rho = as_density_matrix(rho)
    fid, _, sol = _run(rho, Fixed(as_density_matrix(chi)), config)
    return fid, _stats(sol)


# ---------------------------------------------------------------------------
# coherence
# ---------------------------------------------------------------------------


def geometric_coherence(rho, config: sdp.SolverConfig | None = None) -> MeasureResult:
    """Geometric coherence ``1 - max_delta F(rho, delta)^2`` over diagonal states ``delta``."""
    rho = as_density_matrix(rho)
    fid, delta, sol = _run(rho, DiagonalIncoherent(), config)
    return MeasureResult(
        value=1.0 - fid**2,
        fidelity=fid,
        closest_state=delta,
        bounds=coherence_bounds(rho),
        solver_stats=_stats(sol),
    )


def coherence_qubit_analytic(rho) -> float:
    rho = as_density_matrix(rho)
    if rho.dim != 2:
        raise DimensionMismatch("qubit formula needs a 2x2 state")
    c = abs(rho.mat[0, 1])
    return (1 - math.sqrt(max(1 - 4 * c * c, 0.0))) / 2


def coherence_pure_analytic(psi: PureState) -> float:
    return 1.0 - float(np.max(np.abs(psi.amplitudes) ** 2))


def coherence_bounds(rho) -> tuple[float, float]:
    """Lower and upper bounds on the geometric coherence of ``rho``.

    The lower bound depends on the off-diagonal purity
    ``Tr rho^2 - sum_i rho_ii^2``; the upper bound is the smaller of
    ``1 - max_i rho_ii`` and ``1 - sum_i b_ii^2`` with ``b = sqrt(rho)``.
    """
    rho = as_density_matrix(rho)
    m = rho.mat
    d = rho.dim
    diag = np.diag(m).real
    offdiag_purity = float(np.sum(np.abs(m) ** 2) - np.sum(diag**2))
    arg = 1 - d / (d - 1) * offdiag_purity
    if arg < 0:
        if arg < -1e-12:
            log.debug("lower-bound radicand %.3e clamped to zero", arg)
        arg = 0.0
    lower = 1 - 1 / d - (d - 1) / d * math.sqrt(arg)
    b = np.diag(sqrt_psd(m)).real
    upper = min(1 - float(np.max(diag)), 1 - float(np.sum(b**2)))
    return lower, upper


def coherence_mcms_analytic(d: int, p: float) -> float:
    if int(d) != d or d < 2:
        raise BadParameter(f"d must be an integer >= 2, got {d}")
    if not 0 <= p <= 1:
        raise BadParameter(f"p must lie in [0, 1], got {p}")
    return 1 - ((d - 1) * math.sqrt(1 - p) + math.sqrt(1 + (d - 1) * p)) ** 2 / d**2


# ---------------------------------------------------------------------------
# entanglement
# ---------------------------------------------------------------------------


def gme_ppt(rho, dims: tuple[int, int], config: sdp.SolverConfig | None = None) -> MeasureResult:
    """Lower bound on the geometric entanglement, optimizing over PPT states.

    Exact for 2x2 and 2x3 systems, where PPT states are separable.
    """
    rho = as_density_matrix(rho)
    da, db = (int(x) for x in dims)
    if da * db != rho.dim:
        raise DimensionMismatch(f"dims {da}x{db} do not factor dimension {rho.dim}")
    fid, sigma, sol = _run(rho, PptBipartite(da, db), config)
    return MeasureResult(
        value=min(max(1.0 - fid**2, 0.0), 1.0),
        fidelity=fid,
        closest_state=sigma,
        solver_stats=_stats(sol),
    )


_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho) -> float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of ``rho rho~`` with
    ``rho~ = (Y x Y) rho* (Y x Y)``; they are obtained from the Hermitian
    matrix ``sqrt(rho) rho~ sqrt(rho)``, which has the same spectrum.
    """
    rho = as_density_matrix(rho)
    if rho.dim != 4:
        raise DimensionMismatch("concurrence needs a two-qubit (4x4) state")
    flipped = _SIGMA_YY @ rho.mat.conj() @ _SIGMA_YY
    s = sqrt_psd(rho.mat)
    w = np.linalg.eigvalsh(hermitize(s @ flipped @ s))
    w = np.where((w < 0) & (w >= -1e-10), 0.0, w)
    lam = np.sort(np.sqrt(np.clip(w, 0.0, None)))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def gme_two_qubit_analytic(c: float) -> float:
    if not 0 <= c <= 1:
        raise BadParameter(f"concurrence must lie in [0, 1], got {c}")
    return (1 - math.sqrt(1 - c * c)) / 2


def werner_gme_analytic(f: float) -> float:
    if not -1 <= f <= 1:
        raise BadParameter(f"f must lie in [-1, 1], got {f}")
    return (1 - math.sqrt(1 - f * f)) / 2 if f <= 0 else 0.0


def gme_pure_product_oracle(psi: PureState, dims: tuple[int, int]) -> float:
    """``1 - s_max^2`` with ``s_max`` the largest Schmidt coefficient of ``psi``."""
    da, db = (int(x) for x in dims)
    if da * db != psi.dim:
        raise DimensionMismatch(f"dims {da}x{db} do not factor dimension {psi.dim}")
    s = np.linalg.svd(psi.amplitudes.reshape(da, db), compute_uv=False)
    return max(0.0, 1.0 - float(s[0]) ** 2)


def is_exact_gme_dims(dims: tuple[int, int]) -> bool:
    """True when the PPT relaxation is tight (two-qubit and qubit-qutrit)."""
    return tuple(sorted(dims)) in {(2, 2), (2, 3)}


def ppt_min_eigenvalue(rho, dims) -> float:
    return float(np.linalg.eigvalsh(hermitize(partial_transpose(np.asarray(rho), dims)))[0])

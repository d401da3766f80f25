"""
Primal-dual interior-point solver for real symmetric block SDPs.

The problem solved is::

    maximize    sum_k Tr(C_k Z_k)
    subject to  sum_k Tr(A_ik Z_k) = b_i,   i = 1..m
                Z_k >= 0

with dual ``minimize b^T y`` s.t. ``S_k = sum_i y_i A_ik - C_k >= 0``.

The iteration is an infeasible-start path-following method with Mehrotra's
predictor-corrector and the HKM search direction
(``dZ = (R_c - Z dS) S^{-1}``, symmetrized).  The Schur complement
``M_ij = sum_k Tr(A_ik Z_k A_jk S_k^{-1})`` is assembled densely from the
sparse constraint triplets and factored by Cholesky.

Complex Hermitian programs are hosted through :func:`embed_complex`.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DimensionMismatch, InconsistentConstraints, NonHermitian
from .linalg import HERMITIAN_TOL, hermitian_deviation

log = logging.getLogger(__name__)

_SCHUR_CHUNK = 2048
_REFINE_STEPS = 2
_STALL_ITERATIONS = 10


def embed_complex(h) -> np.ndarray:
    """Real symmetric embedding ``A + iB -> [[A, -B], [B, A]]`` of a Hermitian matrix.

    The embedding is linear, doubles every eigenvalue's multiplicity, and
    satisfies ``Tr(embed(H) embed(K)) = 2 Re Tr(H K)``.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    dev = hermitian_deviation(h)
    if dev > HERMITIAN_TOL:
        raise NonHermitian(f"matrix is not Hermitian (max |H - H^H| = {dev:.3e})")
    a, b = h.real, h.imag
    return np.block([[a, -b], [b, a]])


def unembed_complex(z: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_complex`, averaging the redundant copies.

    Works on any real symmetric ``2n x 2n`` matrix, not only exact
    embeddings, by projecting onto the embedded subspace first.
    """
    n = z.shape[0] // 2
    re = (z[:n, :n] + z[n:, n:]) / 2
    im = (z[n:, :n] - z[:n, n:]) / 2
    h = re + 1j * im
    return (h + h.conj().T) / 2


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SolverConfig:
    gap_tol: float = 1e-10
    feas_tol: float = 1e-9
    max_iterations: int = 200
    step_fraction: float = 0.98
    regularization: float = 1e-12
    presolve: bool = True
    debug_dump: str | None = None

    def __post_init__(self):
        for name in ("gap_tol", "feas_tol", "regularization"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.step_fraction < 1:
            raise ValueError("step_fraction must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class BlockTriplets:
    """Nonzeros of the constraint matrices restricted to one block.

    Entry ``t`` says ``A[con[t]][row[t], col[t]] = val[t]``.  Both triangles
    are stored, so the matrices are exactly symmetric.
    """

    con: np.ndarray
    row: np.ndarray
    col: np.ndarray
    val: np.ndarray

    @classmethod
    def empty(cls) -> "BlockTriplets":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, np.zeros(0))


@dataclass(frozen=True)
class PresolveMap:
    """Records which original constraints survived presolve.

    ``kept`` indexes the surviving rows in the original numbering;
    ``combination[j]`` expresses removed row ``removed[j]`` as a linear
    combination of the kept rows.
    """

    n_original: int
    kept: np.ndarray
    removed: np.ndarray
    combination: np.ndarray

    def expand_dual(self, y: np.ndarray) -> np.ndarray:
        full = np.zeros(self.n_original)
        full[self.kept] = y
        return full


def _symmetrize_triplets(n: int, con, row, col, val) -> BlockTriplets:
    con = np.asarray(con, dtype=np.int64)
    row = np.asarray(row, dtype=np.int64)
    col = np.asarray(col, dtype=np.int64)
    val = np.asarray(val, dtype=float)
    if row.size and (row.min() < 0 or col.min() < 0 or row.max() >= n or col.max() >= n):
        raise DimensionMismatch(f"constraint entry outside a block of size {n}")
    con2 = np.concatenate([con, con])
    row2 = np.concatenate([row, col])
    col2 = np.concatenate([col, row])
    val2 = np.concatenate([val, val]) / 2
    key = (con2 * n + row2) * n + col2
    uniq, inv = np.unique(key, return_inverse=True)
    summed = np.bincount(inv, weights=val2, minlength=uniq.size)
    keep = summed != 0.0
    uniq, summed = uniq[keep], summed[keep]
    return BlockTriplets(uniq // (n * n), (uniq // n) % n, uniq % n, summed)


@dataclass
class SdpProblem:
    """Standard-form block SDP (maximization), constraints as sparse triplets.

    Use :meth:`from_triplets` or :meth:`from_dense` rather than the raw
    constructor; both symmetrize the constraint data.  ``primal_start``
    optionally supplies a strictly feasible primal point to start from
    instead of the default ``tau * I``.
    """

    blocks: list[int]
    objective: list[np.ndarray]
    triplets: list[BlockTriplets]
    rhs: np.ndarray
    presolve_map: PresolveMap | None = None
    primal_start: list[np.ndarray] | None = None

    def __post_init__(self):
        self.blocks = [int(n) for n in self.blocks]
        if any(n < 1 for n in self.blocks):
            raise DimensionMismatch("block dimensions must be positive")
        if len(self.objective) != len(self.blocks) or len(self.triplets) != len(self.blocks):
            raise DimensionMismatch("one objective matrix and one triplet set per block")
        self.rhs = np.asarray(self.rhs, dtype=float).ravel()
        objective = []
        for n, c in zip(self.blocks, self.objective):
            c = np.asarray(c, dtype=float)
            if c.shape != (n, n):
                raise DimensionMismatch(f"objective block of shape {c.shape}, expected {(n, n)}")
            objective.append((c + c.T) / 2)
        self.objective = objective
        for t in self.triplets:
            if t.con.size and (t.con.min() < 0 or t.con.max() >= self.rhs.size):
                raise DimensionMismatch("constraint index out of range")

    @property
    def n_constraints(self) -> int:
        return self.rhs.size

    @classmethod
    def from_triplets(cls, blocks, objective, entries, rhs) -> "SdpProblem":
        """Build from ``entries[k] = (con, row, col, val)`` per block.

        Entries need not be symmetric or deduplicated: ``A`` is replaced by
        ``(A + A^T) / 2`` and repeated entries are summed.
        """
        trips = [_symmetrize_triplets(n, *e) for n, e in zip(blocks, entries)]
        return cls(list(blocks), list(objective), trips, np.asarray(rhs, dtype=float))

    @classmethod
    def from_dense(cls, blocks, objective, constraints, rhs) -> "SdpProblem":
        """Build from dense data; ``constraints[i][k]`` is ``A_ik`` or ``None``."""
        entries = []
        for k, n in enumerate(blocks):
            con, row, col, val = [], [], [], []
            for i, mats in enumerate(constraints):
                a = mats[k]
                if a is None:
                    continue
                a = np.asarray(a, dtype=float)
                if a.shape != (n, n):
                    raise DimensionMismatch(f"constraint {i} block {k} has shape {a.shape}")
                r, c = np.nonzero(a)
                con.append(np.full(r.size, i))
                row.append(r)
                col.append(c)
                val.append(a[r, c])
            if con:
                entries.append(tuple(np.concatenate(x) for x in (con, row, col, val)))
            else:
                entries.append((np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0)))
        return cls.from_triplets(blocks, objective, entries, rhs)

    def constraint_matrix(self, i: int, k: int) -> np.ndarray:
        """Dense ``A_ik``; intended for tests and debugging."""
        t = self.triplets[k]
        n = self.blocks[k]
        sel = t.con == i
        out = np.zeros((n, n))
        np.add.at(out, (t.row[sel], t.col[sel]), t.val[sel])
        return out

    def apply(self, zs) -> np.ndarray:
        """The constraint map ``Z -> (sum_k Tr(A_ik Z_k))_i``."""
        out = np.zeros(self.n_constraints)
        for t, z in zip(self.triplets, zs):
            out += np.bincount(t.con, weights=t.val * z[t.row, t.col], minlength=out.size)
        return out

    def adjoint(self, y, k: int) -> np.ndarray:
        """Block ``k`` of ``sum_i y_i A_i``."""
        n = self.blocks[k]
        t = self.triplets[k]
        flat = np.bincount(t.row * n + t.col, weights=t.val * y[t.con], minlength=n * n)
        return flat.reshape(n, n)

    def objective_value(self, zs) -> float:
        return float(sum(np.vdot(c, z) for c, z in zip(self.objective, zs)))

    def dump(self, path) -> None:
        """Write the problem in a plain-text block format for bug reports."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"blocks {' '.join(map(str, self.blocks))}\n")
            fh.write(f"constraints {self.n_constraints}\n")
            fh.write("rhs " + " ".join(repr(float(v)) for v in self.rhs) + "\n")
            for k, c in enumerate(self.objective):
                r, s = np.nonzero(np.triu(c))
                for a, b in zip(r, s):
                    fh.write(f"C {k} {a} {b} {c[a, b]!r}\n")
            for k, t in enumerate(self.triplets):
                for i, a, b, v in zip(t.con, t.row, t.col, t.val):
                    if a <= b:
                        fh.write(f"A {i} {k} {a} {b} {v!r}\n")


def _sparse_rows(problem: SdpProblem) -> sp.csr_matrix:
    """All constraints as rows of an ``m x sum(n_k^2)`` sparse matrix."""
    offset = 0
    rows, cols, vals = [], [], []
    for n, t in zip(problem.blocks, problem.triplets):
        rows.append(t.con)
        cols.append(offset + t.row * n + t.col)
        vals.append(t.val)
        offset += n * n
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(problem.n_constraints, offset),
    )


def presolve(problem: SdpProblem, tol: float = 1e-10) -> SdpProblem:
    """Drop linearly dependent equality constraints.

    Dependencies are found by a pivoted QR factorization of the constraint
    Gram matrix.  A dependent row whose right-hand side disagrees with the
    combination of surviving rows by more than ``tol`` raises
    :class:`InconsistentConstraints`.
    """
    m = problem.n_constraints
    if m == 0:
        return replace(problem, presolve_map=PresolveMap(0, np.zeros(0, int), np.zeros(0, int), np.zeros((0, 0))))
    a = _sparse_rows(problem)
    gram = (a @ a.T).toarray()
    _, r, piv = sla.qr(gram, pivoting=True, mode="economic")
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    rank = int(np.sum(diag > 1e-12 * scale))
    kept = np.sort(piv[:rank])
    removed = np.sort(piv[rank:])
    if removed.size == 0:
        return replace(problem, presolve_map=PresolveMap(m, kept, removed, np.zeros((0, rank))))
    gkk = gram[np.ix_(kept, kept)]
    gkr = gram[np.ix_(kept, removed)]
    combo = sla.solve(gkk, gkr, assume_a="pos").T
    resid = a[removed] - sp.csr_matrix(combo) @ a[kept]
    if resid.nnz and np.max(np.abs(resid.data)) > 1e-8 * max(1.0, np.sqrt(scale)):
        raise InconsistentConstraints("presolve failed to express a dependent row")  # pragma: no cover
    b = problem.rhs
    mismatch = np.abs(b[removed] - combo @ b[kept])
    bad = mismatch > tol * max(1.0, np.max(np.abs(b)))
    if np.any(bad):
        j = int(np.argmax(mismatch))
        raise InconsistentConstraints(
            f"constraint {removed[j]} is dependent but its rhs differs by {mismatch[j]:.3e}"
        )
    new_index = -np.ones(m, dtype=np.int64)
    new_index[kept] = np.arange(rank)
    trips = []
    for t in problem.triplets:
        sel = new_index[t.con] >= 0
        trips.append(BlockTriplets(new_index[t.con[sel]], t.row[sel], t.col[sel], t.val[sel]))
    log.debug("presolve removed %d of %d constraints", removed.size, m)
    return SdpProblem(
        list(problem.blocks),
        list(problem.objective),
        trips,
        b[kept],
        presolve_map=PresolveMap(m, kept, removed, combo),
        primal_start=problem.primal_start,
    )


@dataclass
class SdpSolution:
    status: Status
    primal_blocks: list[np.ndarray]
    dual_y: np.ndarray
    dual_slacks: list[np.ndarray]
    primal_objective: float
    dual_objective: float
    relative_gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    wall_time: float = 0.0
    message: str = ""
    history: list[dict] = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Schur:
    """Per-block data reused by every Schur-complement assembly."""

    def __init__(self, problem: SdpProblem):
        m = problem.n_constraints
        self.blocks = []
        for t in problem.triplets:
            inc = sp.csc_matrix((t.val, (t.con, np.arange(t.con.size))), shape=(m, t.con.size))
            self.blocks.append((t, inc))

    def assemble(self, zs, sinvs, m: int) -> np.ndarray:
        out = np.zeros((m, m))
        for (t, inc), z, sinv in zip(self.blocks, zs, sinvs):
            nt = t.con.size
            if nt == 0:
                continue
            # K[t,u] = Z[col_t, row_u] * Sinv[col_u, row_t]
            zc = z[t.col]
            sc = sinv[t.col]
            for start in range(0, nt, _SCHUR_CHUNK):
                stop = min(nt, start + _SCHUR_CHUNK)
                k = zc[start:stop][:, t.row] * sc[:, t.row[start:stop]].T
                part = (inc @ k.T).T  # (chunk x m) = K_chunk @ inc^T
                out += inc[:, start:stop] @ part
        return (out + out.T) / 2


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest ``a`` with ``x + a dx`` positive semidefinite (``inf`` if unbounded)."""
    try:
        l = np.linalg.cholesky(x)
        w = sla.solve_triangular(l, dx, lower=True)
        w = sla.solve_triangular(l, w.T, lower=True)
        lam = np.linalg.eigvalsh((w + w.T) / 2)[0]
    except np.linalg.LinAlgError:
        # x is numerically singular; fall back on its eigenbasis
        ev, v = np.linalg.eigh(x)
        ev = np.maximum(ev, np.finfo(float).eps * max(ev[-1], 1.0))
        w = (v.T @ dx @ v) / np.sqrt(np.outer(ev, ev))
        lam = np.linalg.eigvalsh((w + w.T) / 2)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _inv_pd(s: np.ndarray) -> np.ndarray:
    c = sla.cho_factor(s, lower=True)
    inv = sla.cho_solve(c, np.eye(s.shape[0]))
    return (inv + inv.T) / 2


def _factor(m: np.ndarray, reg: float):
    try:
        return sla.cho_factor(m, lower=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        pass
    shift = reg * max(1.0, float(np.max(np.abs(np.diag(m)))))
    try:
        return sla.cho_factor(m + shift * np.eye(m.shape[0]), lower=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        return None


def solve(problem: SdpProblem, config: SolverConfig | None = None) -> SdpSolution:
    """Solve ``problem`` to the tolerances in ``config``.

    Returns an :class:`SdpSolution` in all cases; inspect ``status``.
    With ``MaxIterations`` the best iterate seen is returned together with
    its true residuals.
    """
    config = config or SolverConfig()
    if config.debug_dump:
        problem.dump(config.debug_dump)
    t0 = time.perf_counter()
    reduced = presolve(problem) if config.presolve else problem
    sol = _ipm(reduced, config)
    pmap = reduced.presolve_map
    if pmap is not None and pmap.removed.size:
        sol.dual_y = pmap.expand_dual(sol.dual_y)
    sol.wall_time = time.perf_counter() - t0
    return sol


def _ipm(problem: SdpProblem, cfg: SolverConfig) -> SdpSolution:
    blocks = problem.blocks
    nb = len(blocks)
    m = problem.n_constraints
    b = problem.rhs
    cs = problem.objective
    ntot = float(sum(blocks))
    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.sqrt(sum(np.sum(c * c) for c in cs)))

    tau = max(1.0, float(np.max(np.abs(b))) if m else 0.0, max(float(np.max(np.abs(c))) for c in cs))
    zs = [tau * np.eye(n) for n in blocks]
    ss = [tau * np.eye(n) for n in blocks]
    if problem.primal_start is not None:
        # caller-supplied interior primal point, paired with S = tau Z^{-1}
        zs = [np.array(z, dtype=float) for z in problem.primal_start]
        ss = [tau * _inv_pd(z) for z in zs]
    y = np.zeros(m)
    schur = _Schur(problem)
    history: list[dict] = []
    best = None

    def snapshot(status, it, stats, msg=""):
        return SdpSolution(
            status=status,
            primal_blocks=[z.copy() for z in zs],
            dual_y=y.copy(),
            dual_slacks=[s.copy() for s in ss],
            primal_objective=stats["pobj"],
            dual_objective=stats["dobj"],
            relative_gap=stats["gap"],
            primal_residual=stats["pinf"],
            dual_residual=stats["dinf"],
            iterations=it,
            message=msg,
            history=history,
        )

    stall = since_best = 0
    for it in range(cfg.max_iterations + 1):
        try:
            sinvs = [_inv_pd(s) for s in ss]
        except np.linalg.LinAlgError:
            return _finish(best, Status.NUMERICAL_FAILURE, "dual slack lost definiteness")
        rp = b - problem.apply(zs)
        rd = [problem.adjoint(y, k) - cs[k] - ss[k] for k in range(nb)]
        pobj = problem.objective_value(zs)
        dobj = float(b @ y)
        comp = float(sum(np.vdot(z, s) for z, s in zip(zs, ss)))
        mu = comp / ntot
        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = float(np.sqrt(sum(np.sum(r * r) for r in rd))) / (1.0 + norm_c)
        gap = max(abs(pobj - dobj), abs(comp)) / (1.0 + abs(pobj) + abs(dobj))
        stats = dict(it=it, pobj=pobj, dobj=dobj, gap=gap, pinf=pinf, dinf=dinf, mu=mu)
        history.append(stats)
        merit = max(gap / cfg.gap_tol, pinf / cfg.feas_tol, dinf / cfg.feas_tol)
        if best is None or merit < 0.9 * best[0]:
            since_best = 0
        else:
            since_best += 1
        if best is None or merit < best[0]:
            best = (merit, snapshot(Status.MAX_ITERATIONS, it, stats))
        if gap <= cfg.gap_tol and pinf <= cfg.feas_tol and dinf <= cfg.feas_tol:
            return snapshot(Status.OPTIMAL, it, stats)
        if it == cfg.max_iterations:
            break
        if since_best >= _STALL_ITERATIONS:
            return _finish(best, Status.MAX_ITERATIONS, "no progress; returning best iterate")
        if dobj > 1e12 and stall > 0:
            return snapshot(Status.INFEASIBLE, it, stats, "dual objective diverged")

        mat = schur.assemble(zs, sinvs, m)
        fac = _factor(mat, cfg.regularization)
        if fac is None:
            return _finish(best, Status.NUMERICAL_FAILURE, "Schur complement is singular")

        zrd = [zs[k] @ rd[k] @ sinvs[k] for k in range(nb)]

        def direction(rc_sinv):
            g = [rc_sinv[k] - zrd[k] for k in range(nb)]
            dy = sla.cho_solve(fac, problem.apply(g) - rp, check_finite=False)
            for step in range(1 + _REFINE_STEPS):
                ds = [problem.adjoint(dy, k) + rd[k] for k in range(nb)]
                dz = []
                for k in range(nb):
                    d = rc_sinv[k] - zs[k] @ ds[k] @ sinvs[k]
                    dz.append((d + d.T) / 2)
                if step == _REFINE_STEPS:
                    break
                # iterative refinement: enforce A(dZ) = rp despite an inexact Schur factor
                res = problem.apply(dz) - rp
                if np.linalg.norm(res) <= 1e-15 * (1.0 + norm_b):
                    break
                dy = dy + sla.cho_solve(fac, res, check_finite=False)
            return dz, dy, ds

        def steps(dz, ds):
            ap = min(_max_step(z, d) for z, d in zip(zs, dz))
            ad = min(_max_step(s, d) for s, d in zip(ss, ds))
            return ap, ad

        # predictor
        dz, dy, ds = direction([-z for z in zs])
        ap, ad = steps(dz, ds)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = sum(np.vdot(z + ap * a, s + ad * c) for z, a, s, c in zip(zs, dz, ss, ds)) / ntot
        sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0)) if mu > 0 else 0.0

        # corrector
        rc_sinv = []
        for k in range(nb):
            rc_sinv.append(sigma * mu * sinvs[k] - zs[k] - dz[k] @ ds[k] @ sinvs[k])
        dz, dy, ds = direction(rc_sinv)
        ap, ad = steps(dz, ds)
        ap = min(1.0, cfg.step_fraction * ap)
        ad = min(1.0, cfg.step_fraction * ad)

        for k in range(nb):
            z = zs[k] + ap * dz[k]
            s = ss[k] + ad * ds[k]
            zs[k] = (z + z.T) / 2
            ss[k] = (s + s.T) / 2
        y = y + ad * dy
        stats.update(alpha_p=ap, alpha_d=ad, sigma=sigma)
        stall = stall + 1 if max(ap, ad) < 1e-8 else 0
        if stall >= 5:
            return _finish(best, Status.MAX_ITERATIONS, "step lengths stalled")

    return _finish(best, Status.MAX_ITERATIONS, "iteration limit reached")


def _finish(best, status: Status, msg: str) -> SdpSolution:
    sol = best[1]
    sol.status = status
    sol.message = msg
    return sol

"""
Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Two thin value
types sit on top of them: :class:`DensityMatrix`, which validates and
Hermitizes its input, and :class:`PureState`, a normalized amplitude vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NonHermitian, NotPsd, ValidationError

HERMITIAN_TOL = 1e-9
PSD_CLIP = 1e-9


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex128 array."""
    if isinstance(m, DensityMatrix):
        return m.mat
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = hermitian_deviation(m)
    if dev > tol:
        raise NonHermitian(f"matrix is not Hermitian (max |M - M^H| = {dev:.3e})")


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues ``w`` and a unitary ``v`` with
    ``m = v @ diag(w) @ v^H``.  Delegates to LAPACK (``zheevd``) after
    checking symmetry to within ``1e-9``.
    """
    a = as_matrix(m)
    _check_hermitian(a)
    try:
        w, v = np.linalg.eigh(hermitize(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return w, v


def sqrt_psd(m) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-9, 0)`` are clipped to zero; anything more
    negative raises :class:`NotPsd`.  Eigenvalues at rounding level
    (``<= n * eps * max(w)``) are also treated as zero, since their square
    roots would otherwise inject ``sqrt(eps)``-sized noise.
    """
    w, v = eigh(m)
    if w[0] < -PSD_CLIP:
        raise NotPsd(f"smallest eigenvalue {w[0]:.3e} < -{PSD_CLIP:g}")
    w = np.where(w <= rounding_floor(w), 0.0, w)
    s = (v * np.sqrt(w)) @ v.conj().T
    return hermitize(s)


def rounding_floor(w: np.ndarray) -> float:
    """Eigenvalues below this are indistinguishable from zero in double precision."""
    return w.size * np.finfo(float).eps * max(float(np.max(np.abs(w))), 0.0)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_transpose(m, dims: tuple[int, int], subsystem: str = "A") -> np.ndarray:
    """Partial transpose of a bipartite operator.

    Parameters
    ----------
    m : array_like
        Square matrix acting on ``C^dA (x) C^dB``.
    dims : (int, int)
        Local dimensions ``(dA, dB)``.
    subsystem : {"A", "B"}
        Which tensor factor to transpose.

    Examples
    --------
    >>> phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    >>> np.linalg.eigvalsh(partial_transpose(np.outer(phi, phi), (2, 2))).round(3)
    array([-0.5,  0.5,  0.5,  0.5])
    """
    a = np.asarray(m.mat if isinstance(m, DensityMatrix) else m)
    da, db = (int(x) for x in dims)
    if a.ndim != 2 or a.shape != (da * db, da * db):
        raise DimensionMismatch(f"dims {da}x{db} do not factor a matrix of shape {a.shape}")
    t = a.reshape(da, db, da, db)
    sub = subsystem.upper()
    if sub == "A":
        t = t.transpose(2, 1, 0, 3)
    elif sub == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return t.reshape(da * db, da * db)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state.

    Construction checks Hermiticity, unit trace and positivity to within
    ``validation_tol``; the stored matrix is the exact Hermitian part of the
    input.  Supports ``np.asarray(rho)``.
    """

    mat: np.ndarray
    validation_tol: float = 1e-9

    def __post_init__(self):
        a = as_matrix(self.mat).copy()
        tol = self.validation_tol
        dev = hermitian_deviation(a)
        if dev > tol:
            raise ValidationError("hermiticity deviation", dev)
        a = hermitize(a)
        tr_dev = abs(np.trace(a).real - 1.0)
        if tr_dev > tol:
            raise ValidationError("trace deviation", tr_dev)
        lam = float(np.linalg.eigvalsh(a)[0])
        if lam < -tol:
            raise ValidationError("negative eigenvalue", -lam)
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray
    _norm_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if a.size < 1:
            raise DimensionMismatch("pure state needs at least one amplitude")
        dev = abs(np.vdot(a, a).real - 1.0)
        if dev > self._norm_tol:
            raise ValidationError("norm deviation", dev)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=np.complex128).ravel()
        return cls(a / np.linalg.norm(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.projector())


def as_density_matrix(rho, tol: float = 1e-9) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, PureState):
        return rho.density_matrix()
    return DensityMatrix(np.asarray(rho), validation_tol=tol)

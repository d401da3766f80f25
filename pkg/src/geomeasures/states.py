"""
State families and seeded random ensembles.

Every family also has a canonical text form, e.g. ``mcms:d=3,p=0.5`` or
``ginibre:d=3,rank=3,seed=42``, handled by :class:`StateFamilySpec`.
Random constructors draw from numpy's PCG64 generator seeded per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, ParseError
from .linalg import DensityMatrix, PureState, hermitize

RNG_ALGORITHM = "numpy.random.PCG64"
EXACT_TOL = 1e-12


def _check_dim(d, minimum=2):
    if int(d) != d or d < minimum:
        raise BadParameter(f"dimension must be an integer >= {minimum}, got {d}")
    return int(d)


def _check_range(name, x, lo, hi):
    if not (lo <= x <= hi):
        raise BadParameter(f"{name} must lie in [{lo}, {hi}], got {x}")
    return float(x)


def _exact(m: np.ndarray) -> DensityMatrix:
    return DensityMatrix(hermitize(m), validation_tol=EXACT_TOL)


def max_coherent_pure(d: int) -> PureState:
    d = _check_dim(d, 1)
    return PureState(np.full(d, 1 / math.sqrt(d), dtype=complex))


def bell_phi_plus(d: int) -> PureState:
    """Maximally entangled ``sum_i |ii> / sqrt(d)`` on ``C^d (x) C^d``."""
    d = _check_dim(d, 1)
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1 / math.sqrt(d)
    return PureState(v)


def swap_operator(d: int) -> np.ndarray:
    """The swap ``sum_ij |ij><ji|`` on ``C^d (x) C^d``."""
    f = np.zeros((d * d, d * d), dtype=complex)
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    f[(i * d + j).ravel(), (j * d + i).ravel()] = 1.0
    return f


def make_mcms(d: int, p: float) -> DensityMatrix:
    """Maximally coherent state mixed with white noise.

    ``rho = p |psi+><psi+| + (1 - p) I / d`` with ``psi+`` the uniform
    superposition; diagonal entries are ``1/d`` and off-diagonals ``p/d``.
    """
    d = _check_dim(d)
    p = _check_range("p", p, 0.0, 1.0)
    rho = np.full((d, d), p / d, dtype=complex)
    np.fill_diagonal(rho, 1 / d)
    return _exact(rho)


def make_isotropic(d: int, F: float) -> DensityMatrix:
    d = _check_dim(d)
    F = _check_range("F", F, 0.0, 1.0)
    proj = bell_phi_plus(d).projector()
    rho = (1 - F) / (d * d - 1) * (np.eye(d * d) - proj) + F * proj
    return _exact(rho)


def make_werner(d: int, f: float) -> DensityMatrix:
    """Werner state with swap expectation ``f = Tr(rho F)``."""
    d = _check_dim(d)
    f = _check_range("f", f, -1.0, 1.0)
    den = d**4 - d**2
    rho = (d * d - f * d) / den * np.eye(d * d) + (f * d * d - d) / den * swap_operator(d)
    return _exact(rho)


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_ginibre_density(d: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Hilbert-Schmidt random state ``G G^H / Tr(G G^H)`` from a ``d x rank`` Ginibre matrix.

    ``seed`` is anything :class:`numpy.random.PCG64` accepts (an int or a
    sequence of ints); the same seed always gives the same matrix.
    """
    d = _check_dim(d, 1)
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise BadParameter(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return _exact(rho / np.trace(rho).real)


def random_pure(d: int, seed=None) -> PureState:
    d = _check_dim(d, 1)
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v / np.linalg.norm(v))


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary from the phase-corrected QR of a Ginibre matrix."""
    rng = _rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


_FAMILIES = {
    "mcms": ("d", "p"),
    "isotropic": ("d", "F"),
    "werner": ("d", "f"),
    "ginibre": ("d", "rank", "seed"),
    "pure": ("d", "seed"),
    "bell": ("d",),
    "maxcoherent": ("d",),
}
_INT_KEYS = {"d", "rank", "seed"}


@dataclass(frozen=True)
class StateFamilySpec:
    """A parametrized family member such as ``isotropic:d=4,F=0.7``.

    A parameter may be the wildcard ``"*"`` in sweep patterns; such a spec
    cannot be built until :meth:`with_param` fills it in.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _FAMILIES:
            raise ParseError(f"unknown state family {self.kind!r}; known: {', '.join(_FAMILIES)}")
        allowed = _FAMILIES[self.kind]
        for key in self.params:
            if key not in allowed:
                raise ParseError(f"unknown key {key!r} for family {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "StateFamilySpec":
        """Parse the canonical text form; family names and keys are case-insensitive."""
        kind, _, rest = text.strip().partition(":")
        kind = kind.strip().lower()
        if kind not in _FAMILIES:
            raise ParseError(f"unknown state family {kind!r}")
        canon = {k.lower(): k for k in _FAMILIES[kind]}
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise ParseError(f"expected key=value, got {item!r}")
            key = key.strip().lower()
            if key not in canon:
                raise ParseError(f"unknown key {key!r} for family {kind!r}")
            key = canon[key]
            value = value.strip()
            if value == "*":
                params[key] = "*"
                continue
            try:
                params[key] = int(value) if key in _INT_KEYS else float(value)
            except ValueError:
                raise ParseError(f"bad value {value!r} for {key!r}") from None
        return cls(kind, params)

    def __str__(self) -> str:
        body = ",".join(f"{k}={self.params[k]}" for k in _FAMILIES[self.kind] if k in self.params)
        return f"{self.kind}:{body}"

    @property
    def free_params(self) -> list[str]:
        return [k for k, v in self.params.items() if v == "*"]

    def with_param(self, key: str, value) -> "StateFamilySpec":
        params = dict(self.params)
        params[key] = int(value) if key in _INT_KEYS else float(value)
        return StateFamilySpec(self.kind, params)

    def _get(self, key, default=None):
        value = self.params.get(key, default)
        if value is None:
            raise BadParameter(f"family {self.kind!r} needs parameter {key!r}")
        if value == "*":
            raise BadParameter(f"parameter {key!r} is a wildcard; fill it before building")
        return value

    @property
    def dims(self) -> tuple[int, int] | None:
        """Bipartite split for the entangled families, ``None`` otherwise."""
        if self.kind in ("isotropic", "werner", "bell"):
            d = int(self._get("d"))
            return (d, d)
        return None

    def build(self) -> DensityMatrix:
        k = self.kind
        if k == "mcms":
            return make_mcms(self._get("d"), self._get("p"))
        if k == "isotropic":
            return make_isotropic(self._get("d"), self._get("F"))
        if k == "werner":
            return make_werner(self._get("d"), self._get("f"))
        if k == "ginibre":
            d = self._get("d")
            return random_ginibre_density(d, self._get("rank", d), self._get("seed", 0))
        if k == "pure":
            return random_pure(self._get("d"), self._get("seed", 0)).density_matrix()
        if k == "bell":
            return bell_phi_plus(self._get("d")).density_matrix()
        return max_coherent_pure(self._get("d")).density_matrix()

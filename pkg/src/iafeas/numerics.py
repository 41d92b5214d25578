"""Dense complex linear algebra and reproducible channel generation.

Matrices are plain complex numpy arrays.  Decompositions are made
reproducible by a fixed phase convention: each eigenvector (or
orthonormal basis column) is rotated so a designated component is real
and positive.

Random data comes from a counter-based source: every scalar draw is a
pure hash of its key (stream tag, seed, indices, ...), so a channel
entry never depends on how many draws happened before it and grids can
be regenerated in any order, or in parallel, bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "EigenResult",
    "ChannelSet",
    "adjoint",
    "matmul",
    "frobenius_norm",
    "trace",
    "hermitian_eigen",
    "orthonormalize",
    "complex_gaussian",
    "random_channel_set",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Stream tag separating channel draws from any other keyed draws.
_CHANNEL_STREAM = 0x4348414E


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def matmul(*mats: np.ndarray) -> np.ndarray:
    """Left-to-right product of two or more matrices."""
    return reduce(np.matmul, mats)


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def trace(a: np.ndarray) -> complex:
    """Matrix trace; defined for square matrices only."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace needs a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Ascending eigenvalues with matching unit eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigen(a: np.ndarray, hermitian_tol: float = 1e-9) -> EigenResult:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending; each eigenvector's largest-
    magnitude component is rotated real-positive so repeated calls are
    bit-stable.  Raises ValueError for non-square input or a Hermitian
    defect beyond ``hermitian_tol`` (relative), and lets
    ``numpy.linalg.LinAlgError`` propagate if the eigensolver fails to
    converge.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + float(np.abs(a).max())
    defect = float(np.abs(a - a.conj().T).max())
    if defect > hermitian_tol * scale:
        raise ValueError(
            f"matrix is not Hermitian within tolerance (defect {defect:.3e})"
        )
    values, vectors = np.linalg.eigh((a + a.conj().T) / 2.0)
    return EigenResult(values, fix_phases(vectors))


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real > 0."""
    lead = vectors[np.abs(vectors).argmax(axis=0), np.arange(vectors.shape[1])]
    return vectors * (lead.conj() / np.abs(lead))


def orthonormalize(a: np.ndarray, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis with the same span and column count as ``a``.

    Reduced QR with the R diagonal rotated real-positive (so an already
    orthonormal input comes back unchanged up to column phases).
    Raises ``numpy.linalg.LinAlgError`` when ``a`` is rank deficient
    within ``rank_tol``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[1] > a.shape[0]:
        raise ValueError(
            f"expected at most as many columns as rows, got shape {a.shape}"
        )
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r)
    mags = np.abs(diag)
    if mags.min() <= rank_tol * max(1.0, float(mags.max())):
        raise np.linalg.LinAlgError(
            "input is rank deficient within tolerance"
        )
    return q * (diag.conj() / mags)


def _as_uint64(part) -> np.ndarray | np.uint64:
    if isinstance(part, (int, np.integer)):
        return np.uint64(int(part) & _MASK64)
    return np.asarray(part).astype(np.uint64)


def _mix64(z):
    # splitmix64 finalizer, elementwise over uint64 data.
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _keyed_words(*parts):
    """Hash integer key parts (scalars or broadcastable integer arrays)
    into uint64 words; each word is a pure function of its key tuple."""
    with np.errstate(over="ignore"):
        h = np.uint64(0)
        for part in parts:
            h = _mix64((h + _GAMMA) ^ _as_uint64(part))
    return h


def _uniform_open(words) -> np.ndarray:
    """Map uint64 words to doubles in (0, 1]."""
    return (np.asarray(words >> np.uint64(11), dtype=np.float64) + 1.0) * (
        2.0**-53
    )


def complex_gaussian(rows: int, cols: int, *key) -> np.ndarray:
    """Matrix of i.i.d. unit-variance circularly-symmetric complex
    Gaussians, determined entirely by ``(key..., row, col)``.

    Two keyed uniforms per entry feed the Box-Muller transform; the
    resulting normal pair becomes the real and imaginary parts, each
    with variance 1/2.
    """
    r = np.arange(rows, dtype=np.uint64)[:, None]
    c = np.arange(cols, dtype=np.uint64)[None, :]
    u1 = _uniform_open(_keyed_words(*key, r, c, 0))
    u2 = _uniform_open(_keyed_words(*key, r, c, 1))
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return (radius * np.cos(angle) + 1j * radius * np.sin(angle)) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Channel matrices of one network realization.

    ``matrices[k][j]`` maps transmitter j's antennas to receiver k's
    antennas (shape rx_antennas(k) x tx_antennas(j)); ``powers[j]`` is
    transmitter j's power in normalized units.
    """

    matrices: tuple[tuple[np.ndarray, ...], ...]
    powers: tuple[float, ...]
    seed: int

    @property
    def num_users(self) -> int:
        return len(self.matrices)

    def reciprocal(self) -> "ChannelSet":
        """The network with every link reversed: entry [k][j] becomes
        the conjugate transpose of the original [j][k]."""
        users = range(self.num_users)
        flipped = tuple(
            tuple(self.matrices[j][k].conj().T for j in users) for k in users
        )
        return ChannelSet(flipped, self.powers, self.seed)

    def to_json_dict(self) -> dict:
        """Debug serialization; complex entries become [re, im] pairs."""

        def encode(mat: np.ndarray) -> list:
            return [
                [[float(z.real), float(z.imag)] for z in row] for row in mat
            ]

        return {
            "seed": self.seed,
            "powers": list(self.powers),
            "matrices": [[encode(m) for m in row] for row in self.matrices],
        }


def random_channel_set(spec, seed: int) -> ChannelSet:
    """Draw i.i.d. complex Gaussian channels for every directed pair.

    Entries are keyed by (seed, rx_user, tx_user, row, col), so the
    same (spec, seed) always reproduces identical matrices regardless
    of generation order.  All transmit powers default to 1.
    """
    users = spec.users
    matrices = tuple(
        tuple(
            complex_gaussian(
                users[k].rx_antennas,
                users[j].tx_antennas,
                _CHANNEL_STREAM,
                seed,
                k,
                j,
            )
            for j in range(len(users))
        )
        for k in range(len(users))
    )
    return ChannelSet(matrices, (1.0,) * len(users), seed)

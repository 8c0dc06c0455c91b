"""Deterministic, seedable random sources for the random-system ensembles.

The generator is Philox-4x64-10, a counter-based PRNG with a 2^128 counter
space per key. A stream is identified by (seed, stream_id): the key of the
Philox block cipher. Raw 64-bit outputs match numpy's Philox bit generator
for the same key, so the stream definition has an independent reference
implementation available for testing.

Gaussians are produced by the polar (Marsaglia) transform, which consumes
uniform pairs and is exact to floating point. Bulk generation pairs uniforms
consecutively from the start of the stream, so vectorized batches and
one-at-a-time draws from the same stream yield bitwise-identical values.

Stream layout used by the Monte Carlo engine: stream_id = (domain << 56) | trial,
with distinct domains for GOE matrices, input vectors, sphere points, and
resampling. Distinct stream_id values give statistically independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngState",
    "SymMatrix",
    "InputVector",
    "STREAM_GOE",
    "STREAM_B",
    "STREAM_SPHERE",
    "STREAM_RESAMPLE",
    "substream_id",
    "gaussian",
    "sample_goe",
    "sample_b",
    "sample_sphere",
]

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)
_SH11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53

_U64 = 1 << 64
_TRIAL_LIMIT = 1 << 56

STREAM_GOE = 1
STREAM_B = 2
STREAM_SPHERE = 3
STREAM_RESAMPLE = 4

_FIRST_NONZERO_TOL = 1e-12


def substream_id(domain: int, trial: int) -> int:
    """Stream id for one trial of one sampling domain: (domain << 56) | trial."""
    if not 0 <= trial < _TRIAL_LIMIT:
        raise ValueError(f"trial index out of range: {trial}")
    if not 0 <= domain < 256:
        raise ValueError(f"domain out of range: {domain}")
    return (domain << 56) | trial


def _mulhilo(a: np.ndarray, b: np.uint64) -> tuple[np.ndarray, np.ndarray]:
    # Full 64x64 -> 128 bit product via 32-bit limbs; returns (high, low) words.
    lo = a * b
    ah = a >> _SH32
    al = a & _MASK32
    bh = b >> _SH32
    bl = b & _MASK32
    t = ah * bl + ((al * bl) >> _SH32)
    u = al * bh + (t & _MASK32)
    hi = ah * bh + (t >> _SH32) + (u >> _SH32)
    return hi, lo


def _philox_bits(key0: int, key1s: np.ndarray, first_block: int, n_blocks: int) -> np.ndarray:
    """Raw Philox-4x64-10 words for a batch of streams sharing key0.

    Returns shape (len(key1s), 4*n_blocks) uint64. Block i is generated at
    counter value first_block + i + 1, matching numpy's Philox, whose counter
    is incremented before each block is produced.
    """
    t = key1s.shape[0]
    with np.errstate(over="ignore"):
        c0 = np.broadcast_to(
            np.arange(first_block + 1, first_block + 1 + n_blocks, dtype=np.uint64),
            (t, n_blocks),
        ).ravel()
        zeros = np.zeros(t * n_blocks, dtype=np.uint64)
        c1 = zeros
        c2 = zeros
        c3 = zeros
        k0 = np.uint64(key0)
        k1 = np.repeat(key1s.astype(np.uint64), n_blocks)
        for r in range(10):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(c0, _M0)
            hi1, lo1 = _mulhilo(c2, _M1)
            c0 = hi1 ^ c1 ^ k0
            c1 = lo1
            c2 = hi0 ^ c3 ^ k1
            c3 = lo0
        return np.stack([c0, c1, c2, c3], axis=1).reshape(t, 4 * n_blocks)


def _bits_to_uniforms(bits: np.ndarray) -> np.ndarray:
    # Double in [0, 1) from the top 53 bits, the same convention numpy uses.
    return (bits >> _SH11).astype(np.float64) * _INV53


def _uniform_matrix(seed: int, key1s: np.ndarray, count: int) -> np.ndarray:
    """First `count` uniforms of each stream (seed, key1s[i]); shape (len(key1s), count)."""
    n_blocks = -(-count // 4)
    bits = _philox_bits(seed, key1s, 0, n_blocks)
    return _bits_to_uniforms(bits[:, :count])


def _normals_for_streams(seed: int, key1s: np.ndarray, m: int) -> np.ndarray:
    """First m polar-method normals of each stream; shape (len(key1s), m).

    Uniforms are paired consecutively from the stream start; a pair (u1, u2)
    maps to v = 2u - 1 and is accepted when 0 < s = v1^2 + v2^2 < 1, yielding
    the two normals v1*g, v2*g with g = sqrt(-2 ln s / s). Equals the sequence
    produced by repeated single draws from RngState with the same key.
    """
    t = key1s.shape[0]
    kp = (m + 1) // 2  # accepted pairs needed
    pairs = -(-kp * 10 // 7) + 12  # acceptance rate is pi/4; leave generous slack
    while True:
        u = _uniform_matrix(seed, key1s, 2 * pairs).reshape(t, pairs, 2)
        v = 2.0 * u - 1.0
        s = v[:, :, 0] ** 2 + v[:, :, 1] ** 2
        accept = (s > 0.0) & (s < 1.0)
        if int(accept.sum(axis=1).min()) >= kp:
            break
        pairs *= 2  # regenerate a longer prefix; previous pairs are unchanged
    # Stable sort moves accepted pairs to the front in stream order.
    order = np.argsort(~accept, axis=1, kind="stable")[:, :kp]
    vsel = np.take_along_axis(v, order[:, :, None], axis=1)
    ssel = np.take_along_axis(s, order, axis=1)
    g = np.sqrt(-2.0 * np.log(ssel) / ssel)
    return (vsel * g[:, :, None]).reshape(t, 2 * kp)[:, :m]


@dataclass
class RngState:
    """A position in one random stream, identified by (seed, stream_id).

    Identical (seed, stream_id) and call sequence reproduce the output
    bitwise on any platform. Distinct stream_id values are independent
    streams under the same seed. The state is a value: copies advance
    independently.
    """

    seed: int
    stream_id: int = 0
    _block: int = field(default=0, repr=False)
    _bits: list = field(default_factory=list, repr=False)
    _spare: float | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _U64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0 <= self.stream_id < _U64:
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {self.stream_id}")

    def _raw(self, k: int) -> list:
        while len(self._bits) < k:
            need_blocks = max(1, -(-(k - len(self._bits)) // 4))
            key1 = np.array([self.stream_id], dtype=np.uint64)
            fresh = _philox_bits(self.seed, key1, self._block, need_blocks)[0]
            self._bits.extend(fresh.tolist())
            self._block += need_blocks
        out = self._bits[:k]
        del self._bits[:k]
        return out

    def uniform(self) -> float:
        """One double in [0, 1)."""
        (w,) = self._raw(1)
        return (w >> 11) * _INV53

    def normal(self) -> float:
        """One standard normal draw via the polar transform."""
        if self._spare is not None:
            out = self._spare
            self._spare = None
            return out
        while True:
            u1 = self.uniform()
            u2 = self.uniform()
            v1 = 2.0 * u1 - 1.0
            v2 = 2.0 * u2 - 1.0
            s = v1 * v1 + v2 * v2
            if 0.0 < s < 1.0:
                # numpy's log, not math.log: they differ by an ulp on some
                # inputs, and bulk generation must reproduce scalar draws.
                s_arr = np.array([s])
                g = float(np.sqrt(-2.0 * np.log(s_arr) / s_arr)[0])
                self._spare = v2 * g
                return v1 * g


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric n x n matrix stored as its packed upper triangle.

    Packing is row major: (0,0), (0,1), ..., (0,n-1), (1,1), ..., (n-1,n-1),
    the order of numpy.triu_indices. Symmetry holds by construction.
    """

    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        expected = self.n * (self.n + 1) // 2
        ent = np.asarray(self.entries, dtype=np.float64)
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if ent.shape != (expected,):
            raise ValueError(f"expected {expected} packed entries, got shape {ent.shape}")
        if not np.all(np.isfinite(ent)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SymMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise ValueError(f"expected a square matrix, got shape {dense.shape}")
        if not np.allclose(dense, dense.T, atol=0, rtol=0):
            raise ValueError("matrix is not symmetric")
        iu = np.triu_indices(n)
        return cls(n=n, entries=dense[iu])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n), dtype=np.float64)
        iu = np.triu_indices(self.n)
        dense[iu] = self.entries
        dense[(iu[1], iu[0])] = self.entries
        return dense

    def frobenius_norm(self) -> float:
        dense = self.to_dense()
        return float(np.sqrt(np.sum(dense * dense)))


@dataclass(frozen=True)
class InputVector:
    """Input vector b of the system dx/dt = Ax + bu."""

    n: int
    components: np.ndarray

    def __post_init__(self) -> None:
        comp = np.asarray(self.components, dtype=np.float64)
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if comp.shape != (self.n,):
            raise ValueError(f"expected {self.n} components, got shape {comp.shape}")
        if not np.all(np.isfinite(comp)):
            raise ValueError("components must be finite")
        object.__setattr__(self, "components", comp)

    @classmethod
    def from_values(cls, values) -> "InputVector":
        comp = np.asarray(values, dtype=np.float64)
        return cls(n=comp.shape[0], components=comp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def gaussian(state: RngState, mean: float = 0.0, std_dev: float = 1.0) -> float:
    """One draw from N(mean, std_dev^2); advances the state."""
    if std_dev < 0:
        raise ValueError(f"std_dev must be >= 0, got {std_dev}")
    if std_dev == 0.0:
        return mean
    return mean + std_dev * state.normal()


_SQRT2 = math.sqrt(2.0)


def _diag_packed_indices(n: int) -> np.ndarray:
    # Packed row-major offsets of the diagonal entries (i, i).
    rows = np.arange(n)
    return rows * n - rows * (rows - 1) // 2


def sample_goe(state: RngState, n: int) -> SymMatrix:
    """One GOE(n) draw: diagonal entries N(0,2), strict upper entries N(0,1).

    Entries are drawn in packed row-major order, all mutually independent;
    each lower entry equals its upper mirror by construction.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = n * (n + 1) // 2
    vals = np.array([state.normal() for _ in range(m)], dtype=np.float64)
    vals[_diag_packed_indices(n)] *= _SQRT2
    return SymMatrix(n=n, entries=vals)


def sample_b(state: RngState, n: int) -> InputVector:
    """One draw from the input ensemble: n i.i.d. N(0,1) components."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    comp = np.array([state.normal() for _ in range(n)], dtype=np.float64)
    return InputVector(n=n, components=comp)


def _hemisphere_flip(x: np.ndarray) -> np.ndarray:
    # Make the first component of magnitude > 1e-12 positive. A unit vector
    # always has one, since max |x_i| >= 1/sqrt(n).
    for value in x:
        if abs(value) > _FIRST_NONZERO_TOL:
            return -x if value < 0 else x
    return x


def sample_sphere(state: RngState, n: int, hemisphere: bool = False) -> np.ndarray:
    """Uniform point on S^(n-1), or on the positive hemisphere when requested.

    A normalized Gaussian vector; with `hemisphere` the sign is flipped so the
    first component of magnitude > 1e-12 is positive. The all-zero draw (a
    measure-zero event) is resampled.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    while True:
        x = np.array([state.normal() for _ in range(n)], dtype=np.float64)
        norm = float(np.linalg.norm(x))
        if norm > 0.0:
            break
    x /= norm
    if hemisphere:
        x = _hemisphere_flip(x)
    return x

"""Packing constructions: greedy binary codes, sparse spherical packings, trims.

Constructors certify their separation claims directly (measured pairwise
distances, measured covariance deviation), so downstream risk bounds never
have to trust a construction on faith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import CapabilityError

__all__ = [
    "METRIC_TAGS",
    "PackingIncompleteError",
    "BinaryCodebook",
    "SparsePacking",
    "PackingSet",
    "PackingCertificate",
    "gv_greedy",
    "verify_packing",
    "cs_random_packing",
    "trim_packing",
    "operator_norm",
    "save_packing_text",
    "load_packing_text",
]

METRIC_TAGS = ("hamming", "l2", "hellinger_sq", "set_distance")

# Exhaustive binary enumeration cap (2^m candidate vectors).
MAX_GV_BITS = 24

# Ambient-dimension cap for the sparse packing sampler.
MAX_SPARSE_DIM = 512

# Sparse packings must keep pairwise squared distances at or above this.
SPARSE_MIN_SQ_DIST = 0.5

_UNIT_NORM_TOL = 1e-12


class PackingIncompleteError(RuntimeError):
    """Rejection sampling ran out of attempts; carries the partial packing."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class BinaryCodebook:
    """Binary codewords of length m with pairwise Hamming distance >= d_min."""

    m: int
    d_min: int
    codewords: np.ndarray  # shape (M, m), entries in {0, 1}

    def __post_init__(self):
        bits = np.asarray(self.codewords, dtype=np.uint8)
        if bits.ndim != 2 or bits.shape[1] != self.m:
            raise ValueError("codewords must be an (M, m) bit array")
        if bits.shape[0] < 1:
            raise ValueError("codebook must hold at least one codeword")
        if np.any(bits > 1):
            raise ValueError("codeword entries must be bits")
        if not 1 <= self.d_min <= self.m:
            raise ValueError("d_min must lie in [1, m]")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "codewords", bits)

    @property
    def size(self) -> int:
        return int(self.codewords.shape[0])

    def sign_vectors(self) -> np.ndarray:
        """Codewords mapped to {-1, +1}^m via bit -> 2 bit - 1."""
        return (2 * self.codewords.astype(np.int8) - 1).astype(np.int8)

    def to_packing_set(self) -> "PackingSet":
        return PackingSet(
            elements=tuple(self.codewords),
            metric="hamming",
            d_min=float(self.d_min),
        )


@dataclass(frozen=True, eq=False)
class SparsePacking:
    """Unit-norm k-sparse vectors in R^n, pairwise squared distance >= 1/2.

    min_sq_distance and beta_hat are measured from the vectors at
    construction time; beta_hat = n * ||(1/M) sum u u^T - I/n||_op records
    how far the empirical second moment sits from isotropic.
    """

    n: int
    k: int
    vectors: np.ndarray  # shape (M, n)

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2 or vecs.shape[1] != self.n:
            raise ValueError("vectors must be an (M, n) array")
        if vecs.shape[0] < 1:
            raise ValueError("packing must hold at least one vector")
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_NORM_TOL):
            raise ValueError("vectors must have unit norm within 1e-12")
        if np.any((vecs != 0.0).sum(axis=1) > self.k):
            raise ValueError("vectors must have at most k nonzero entries")
        vecs = vecs.copy()
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

        m_size = vecs.shape[0]
        if m_size == 1:
            min_sq = math.inf
        else:
            sq = _pairwise_sq_distances(vecs)
            min_sq = float(sq.min())
        if min_sq < SPARSE_MIN_SQ_DIST - 1e-12:
            raise ValueError(
                f"pairwise squared distance {min_sq} below {SPARSE_MIN_SQ_DIST}"
            )
        second_moment = vecs.T @ vecs / m_size
        deviation = second_moment - np.eye(self.n) / self.n
        object.__setattr__(self, "min_sq_distance", min_sq)
        object.__setattr__(self, "beta_hat", self.n * operator_norm(deviation))

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    def to_packing_set(self) -> "PackingSet":
        return PackingSet(
            elements=tuple(self.vectors),
            metric="l2",
            d_min=math.sqrt(SPARSE_MIN_SQ_DIST),
        )


@dataclass(frozen=True, eq=False)
class PackingSet:
    """Elements claimed pairwise >= d_min apart under the tagged metric.

    hamming and l2 come with built-in distance functions; hellinger_sq and
    set_distance need an explicit metric_fn since their elements are opaque.
    """

    elements: tuple
    metric: str
    d_min: float
    metric_fn: object = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("packing set must hold at least one element")
        if self.metric not in METRIC_TAGS:
            raise ValueError(f"metric must be one of {METRIC_TAGS}")
        if self.metric_fn is None and self.metric in ("hellinger_sq", "set_distance"):
            raise ValueError(f"metric {self.metric!r} needs an explicit metric_fn")
        if not (math.isfinite(self.d_min) and self.d_min > 0.0):
            raise ValueError("d_min must be finite and positive")

    def distance(self, i: int, j: int) -> float:
        a, b = self.elements[i], self.elements[j]
        if self.metric_fn is not None:
            return float(self.metric_fn(a, b))
        if self.metric == "hamming":
            return float(np.sum(np.asarray(a) != np.asarray(b)))
        return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


@dataclass(frozen=True)
class PackingCertificate:
    """Result of checking a packing's separation claim."""

    min_distance: float
    argmin_pair: tuple | None
    passed: bool


def verify_packing(packing: PackingSet) -> PackingCertificate:
    """Measure the minimum pairwise distance and compare against the claim.

    A single-element packing passes vacuously with min_distance = +inf.
    """
    size = len(packing.elements)
    if size == 1:
        return PackingCertificate(math.inf, None, True)
    best = math.inf
    pair = None
    for i in range(size):
        for j in range(i + 1, size):
            d = packing.distance(i, j)
            if d < best:
                best, pair = d, (i, j)
    return PackingCertificate(best, pair, best >= packing.d_min)


# === Greedy binary codes ===


def _popcount(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr)


def _ints_to_bits(ints: np.ndarray, m: int) -> np.ndarray:
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint32)
    return ((ints[:, None] >> shifts) & 1).astype(np.uint8)


def gv_greedy(m: int, d_min: int, order: str = "lexicographic", seed: int = 0) -> BinaryCodebook:
    """Greedy maximal binary code: scan all 2^m vectors, keep compatible ones.

    The result is maximal, so radius-(d_min - 1) balls around the kept words
    cover {0,1}^m and the size is at least 2^m / V(m, d_min - 1).  Candidate
    order is lexicographic or a seeded random permutation; the construction
    is deterministic given (order, seed).
    """
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    m = int(m)
    if m > MAX_GV_BITS:
        raise CapabilityError(f"m = {m} exceeds exhaustive enumeration cap {MAX_GV_BITS}")
    if not 1 <= d_min <= m:
        raise ValueError("d_min must lie in [1, m]")
    if order not in ("lexicographic", "seeded_random"):
        raise ValueError("order must be 'lexicographic' or 'seeded_random'")

    candidates = np.arange(1 << m, dtype=np.uint32)
    if order == "seeded_random":
        rng = np.random.default_rng(seed)
        candidates = rng.permutation(candidates)

    if d_min == 1:
        bits = _ints_to_bits(candidates, m)
        return BinaryCodebook(m=m, d_min=1, codewords=bits)

    chosen: list[int] = []
    chosen_arr = np.empty(0, dtype=np.uint32)
    chunk = 1 << 14
    for start in range(0, candidates.size, chunk):
        block = candidates[start : start + chunk]
        if chosen_arr.size:
            # distance to already-fixed codewords, vectorized per block
            dists = _popcount(block[:, None] ^ chosen_arr[None, :])
            block = block[dists.min(axis=1) >= d_min]
        fresh: list[int] = []
        fresh_arr = np.empty(0, dtype=np.uint32)
        for cand in block:
            c = int(cand)
            if fresh_arr.size and int(_popcount(np.uint32(c) ^ fresh_arr).min()) < d_min:
                continue
            fresh.append(c)
            fresh_arr = np.array(fresh, dtype=np.uint32)
        chosen.extend(fresh)
        chosen_arr = np.array(chosen, dtype=np.uint32)
    bits = _ints_to_bits(chosen_arr, m)
    return BinaryCodebook(m=m, d_min=int(d_min), codewords=bits)


# === Sparse spherical packings ===


def _pairwise_sq_distances(vecs: np.ndarray) -> np.ndarray:
    gram = vecs @ vecs.T
    norms = np.diag(gram)
    sq = norms[:, None] + norms[None, :] - 2.0 * gram
    iu = np.triu_indices(vecs.shape[0], k=1)
    return np.maximum(sq[iu], 0.0)


def cs_random_packing(
    n: int,
    k: int,
    m_target: int,
    seed: int = 0,
    max_attempts: int | None = None,
) -> SparsePacking:
    """Rejection-sample m_target unit-norm k-sparse vectors, squared gaps >= 1/2.

    Supports are uniform k-subsets and entries isotropic Gaussian before
    normalization.  The design scale for this construction is
    m_target <= (n/k)^(k/4); larger targets are attempted anyway and fail
    with PackingIncompleteError (carrying the best partial packing) when the
    attempt budget runs out.
    """
    if n > MAX_SPARSE_DIM:
        raise CapabilityError(f"n = {n} exceeds sampler cap {MAX_SPARSE_DIM}")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if m_target < 1:
        raise ValueError("m_target must be a positive integer")
    if max_attempts is None:
        max_attempts = 1000 * m_target
    rng = np.random.default_rng(seed)
    accepted = np.empty((0, n))
    for _ in range(max_attempts):
        support = rng.choice(n, size=k, replace=False)
        entries = rng.standard_normal(k)
        norm = np.linalg.norm(entries)
        if norm == 0.0:
            continue
        vec = np.zeros(n)
        vec[support] = entries / norm
        if accepted.shape[0]:
            gaps = np.sum((accepted - vec) ** 2, axis=1)
            if gaps.min() < SPARSE_MIN_SQ_DIST:
                continue
        accepted = np.vstack([accepted, vec])
        if accepted.shape[0] == m_target:
            return SparsePacking(n=n, k=k, vectors=accepted)
    partial = SparsePacking(n=n, k=k, vectors=accepted) if accepted.shape[0] else None
    raise PackingIncompleteError(
        f"placed {accepted.shape[0]} of {m_target} vectors in {max_attempts} attempts",
        partial,
    )


def trim_packing(values, delta_m: float):
    """Indices of the ceil(delta_m * M) smallest values.

    The largest kept value is at most mean(values) / (1 - delta_m): with
    values sorted ascending, the top M - j + 1 entries all reach value[j], so
    value[j] <= mean * M / (M - j + 1).
    """
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    m_size = arr.size
    if m_size < 1:
        raise ValueError("values must be non-empty")
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite and non-negative")
    d = float(delta_m)
    if not (1.0 / m_size <= d <= 1.0 - 1.0 / m_size):
        raise ValueError("delta_m must lie in [1/M, 1 - 1/M]")
    keep = math.ceil(d * m_size)
    order = np.argsort(arr, kind="stable")
    return np.sort(order[:keep])


# === Operator norm ===


def operator_norm(mat: np.ndarray, rtol: float = 1e-8, max_iters: int = 50_000) -> float:
    """Largest absolute eigenvalue of a symmetric matrix by power iteration.

    Iterates on the squared matrix, which guards against the stall a +-pair
    of extreme eigenvalues causes for plain power iteration, and stops on
    the eigen-residual ||B v - rq v|| <= rtol * rq; for a symmetric B that
    pins an eigenvalue of B within rtol * rq of rq, so the returned square
    root is accurate to about rtol / 2 relative.
    """
    a = np.asarray(mat, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = float(np.abs(a).max()) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    if not np.allclose(a, a.T, rtol=1e-10, atol=1e-14 * scale):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    sq = a @ a
    # deterministic start, ramped so it is not orthogonal to any fixed basis
    v = 1.0 + np.arange(n) / max(n - 1, 1)
    v /= np.linalg.norm(v)
    rq = 0.0
    for _ in range(max_iters):
        w = sq @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        bv = sq @ v
        rq = float(v @ bv)
        if float(np.linalg.norm(bv - rq * v)) <= rtol * abs(rq):
            break
    return math.sqrt(max(rq, 0.0))


# === Line-oriented text serialization ===


def save_packing_text(path, packing) -> None:
    """Write a codebook or sparse packing as `m k M d_min metric` plus rows.

    Binary codewords serialize as 01 strings, real vectors as float hex so
    the round trip is bit exact.
    """
    if isinstance(packing, BinaryCodebook):
        header = f"{packing.m} {packing.m} {packing.size} {packing.d_min} hamming"
        rows = ["".join(str(int(b)) for b in row) for row in packing.codewords]
    elif isinstance(packing, SparsePacking):
        d_min = math.sqrt(SPARSE_MIN_SQ_DIST)
        header = f"{packing.n} {packing.k} {packing.size} {d_min!r} l2"
        rows = [" ".join(float(x).hex() for x in row) for row in packing.vectors]
    else:
        raise TypeError("only BinaryCodebook and SparsePacking serialize to text")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def load_packing_text(path):
    """Inverse of save_packing_text; derived fields are recomputed on load."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError("empty packing file")
    fields = lines[0].split()
    if len(fields) != 5:
        raise ValueError("header must read: m k M d_min metric")
    m_dim, k, m_size, d_min_text, metric = fields
    m_dim, k, m_size = int(m_dim), int(k), int(m_size)
    body = lines[1:]
    if len(body) != m_size:
        raise ValueError(f"expected {m_size} codeword rows, found {len(body)}")
    if metric == "hamming":
        bits = np.array([[int(ch) for ch in row] for row in body], dtype=np.uint8)
        return BinaryCodebook(m=m_dim, d_min=int(d_min_text), codewords=bits)
    if metric == "l2":
        vecs = np.array(
            [[float.fromhex(tok) for tok in row.split()] for row in body]
        )
        return SparsePacking(n=m_dim, k=k, vectors=vecs)
    raise ValueError(f"unsupported metric tag {metric!r}")

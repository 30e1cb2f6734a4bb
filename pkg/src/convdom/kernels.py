"""Operator-valued kernels with summable envelope norms.

A kernel maps group pairs (x, y) to d x d complex matrices and is stored in
convolution coordinates (s, t) with s = x * y^-1 and t = y, so that the
envelope (the dominating function of the off-diagonal decay) lives on the
single variable s.  All supports are finite; composition, involution and the
action on square-summable vectors are exact finite sums evaluated in sorted
support order, which makes every operation bit-reproducible.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from .groups import Group, Point


def operator_norm(mat: np.ndarray) -> float:
    """Largest singular value; plain modulus for 1x1 blocks."""
    if mat.shape == (1, 1):
        return abs(complex(mat[0, 0]))
    return float(np.linalg.norm(mat, 2))


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


class Envelope:
    """Finitely supported nonnegative function on a group; zeros are pruned."""

    def __init__(self, group: Group, values: Mapping[Point, float]) -> None:
        self.group = group
        cleaned: dict[Point, float] = {}
        for s, v in values.items():
            v = float(v)
            if v < 0:
                raise ValueError(f"envelope value at {s!r} is negative: {v}")
            if v == 0.0:
                continue
            key = group.canonical(s)
            cleaned[key] = max(v, cleaned.get(key, 0.0))
        self._values = dict(sorted(cleaned.items()))

    @property
    def values(self) -> dict[Point, float]:
        return self._values

    def support(self) -> list[Point]:
        return list(self._values)

    def value(self, s: Point) -> float:
        return self._values.get(self.group.canonical(s), 0.0)

    def l1_norm(self) -> float:
        # fsum is exactly rounded, so the norm is invariant under any
        # permutation of the support (involutions, translations).
        return math.fsum(self._values.values())

    def restrict(self, radius: int) -> "Envelope":
        """Keep only points of word length <= radius."""
        g = self.group
        return Envelope(g, {s: v for s, v in self._values.items() if g.word_length(s) <= radius})

    def cap(self, level: float) -> "Envelope":
        """Pointwise minimum with a constant level."""
        if level < 0:
            raise ValueError("cap level must be nonnegative")
        return Envelope(self.group, {s: min(v, level) for s, v in self._values.items()})

    def convolve(self, other: "Envelope") -> "Envelope":
        if self.group != other.group:
            raise ValueError("envelope groups differ")
        g = self.group
        out: dict[Point, float] = {}
        for s, a in self._values.items():
            for y, b in other._values.items():
                key = g.multiply(s, y)
                out[key] = out.get(key, 0.0) + a * b
        return Envelope(g, out)

    def l1_distance(self, other: "Envelope", radius: int | None = None) -> float:
        """l1 norm of the difference, optionally restricted to a word-length ball."""
        if self.group != other.group:
            raise ValueError("envelope groups differ")
        g = self.group
        keys = set(self._values) | set(other._values)
        terms = []
        for s in sorted(keys):
            if radius is not None and g.word_length(s) > radius:
                continue
            terms.append(abs(self._values.get(s, 0.0) - other._values.get(s, 0.0)))
        return math.fsum(terms)

    def shell_partial_sums(self) -> list[float]:
        """Cumulative l1 mass over word-length shells 0, 1, ..., max length."""
        g = self.group
        if not self._values:
            return []
        shells: dict[int, float] = {}
        for s, v in self._values.items():
            ell = g.word_length(s)
            shells[ell] = shells.get(ell, 0.0) + v
        sums: list[float] = []
        running = 0.0
        for ell in range(max(shells) + 1):
            running += shells.get(ell, 0.0)
            sums.append(running)
        return sums

    def __repr__(self) -> str:
        return f"Envelope({self.group.name}, {len(self._values)} points, l1={self.l1_norm():.6g})"


class Kernel:
    """Finitely supported kernel (x, y) -> d x d matrix in (s, t) storage.

    The value at (x, y) is ``entries[(x*y^-1, y)]``; missing entries are zero.
    Instances are immutable: stored matrices are read-only copies.
    """

    def __init__(self, group: Group, dim: int, entries: Mapping[tuple[Point, Point], np.ndarray]) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.group = group
        self.dim = dim
        cleaned: dict[tuple[Point, Point], np.ndarray] = {}
        for (s, t), mat in entries.items():
            arr = np.asarray(mat, dtype=complex)
            if arr.shape != (dim, dim):
                raise ValueError(f"entry at {(s, t)!r} has shape {arr.shape}, expected {(dim, dim)}")
            if not np.count_nonzero(arr):
                continue
            key = (group.canonical(s), group.canonical(t))
            if key in cleaned:
                arr = cleaned[key] + arr
            cleaned[key] = arr
        self._entries = {k: _freeze(v) for k, v in sorted(cleaned.items())}
        self._zero = _freeze(np.zeros((dim, dim)))
        self._envelope: Envelope | None = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, group: Group, dim: int) -> "Kernel":
        return cls(group, dim, {})

    @classmethod
    def identity(cls, group: Group, dim: int, window_radius: int | None = None) -> "Kernel":
        """Identity kernel delta_{x=y} I on a window of t values.

        Finite groups default to the whole group; infinite groups require an
        explicit window radius since the full identity has infinite support.
        """
        if window_radius is None:
            if not group.is_finite:
                raise ValueError("identity kernel on an infinite group needs a window radius")
            window = group.elements()
        else:
            window = group.ball(window_radius)
        eye = np.eye(dim, dtype=complex)
        e = group.identity
        return cls(group, dim, {(e, t): eye for t in window})

    # -- basic access -----------------------------------------------------------

    @property
    def entries(self) -> dict[tuple[Point, Point], np.ndarray]:
        return self._entries

    def support(self) -> list[tuple[Point, Point]]:
        return list(self._entries)

    def kernel_at(self, x: Point, y: Point) -> np.ndarray:
        """Value at the pair (x, y); read-only zero matrix off the support."""
        g = self.group
        y = g.canonical(y)
        s = g.multiply(x, g.inverse(y))
        return self._entries.get((s, y), self._zero)

    def min_envelope(self) -> Envelope:
        """Smallest dominating envelope: beta(s) = max_t |entries[(s,t)]|_op."""
        if self._envelope is None:
            best: dict[Point, float] = {}
            for (s, _t), mat in self._entries.items():
                v = operator_norm(mat)
                if v > best.get(s, 0.0):
                    best[s] = v
            self._envelope = Envelope(self.group, best)
        return self._envelope

    def envelope_norm(self) -> float:
        return self.min_envelope().l1_norm()

    # -- algebra ----------------------------------------------------------------

    def _require_compatible(self, other: "Kernel") -> None:
        if self.group != other.group:
            raise ValueError(f"kernel groups differ: {self.group.name} vs {other.group.name}")
        if self.dim != other.dim:
            raise ValueError(f"kernel dims differ: {self.dim} vs {other.dim}")

    def compose(self, other: "Kernel") -> "Kernel":
        """Kernel product (K1 * K2)(x, z) = sum_y K1(x, y) K2(y, z)."""
        self._require_compatible(other)
        g = self.group
        # Index the right factor by its row point y = s*t.
        by_row: dict[Point, list[tuple[Point, Point, np.ndarray]]] = {}
        for (s2, t2), m2 in other._entries.items():
            by_row.setdefault(g.multiply(s2, t2), []).append((s2, t2, m2))
        out: dict[tuple[Point, Point], np.ndarray] = {}
        for (s1, t1), m1 in self._entries.items():
            for s2, t2, m2 in by_row.get(t1, ()):
                key = (g.multiply(s1, s2), t2)
                acc = out.get(key)
                if acc is None:
                    out[key] = m1 @ m2
                else:
                    acc += m1 @ m2
        return Kernel(g, self.dim, out)

    def involution(self) -> "Kernel":
        """Adjoint kernel K*(x, y) = K(y, x)^H."""
        g = self.group
        out = {}
        for (s, t), mat in self._entries.items():
            out[(g.inverse(s), g.multiply(s, t))] = mat.conj().T
        return Kernel(g, self.dim, out)

    def apply(self, vec: "TestVector") -> "TestVector":
        """Integral operator action (T_K f)(x) = sum_y K(x, y) f(y)."""
        if vec.doubled:
            raise ValueError("apply expects a single-variable test vector")
        self._require_vector(vec)
        g = self.group
        out: dict[Point, np.ndarray] = {}
        for (s, t), mat in self._entries.items():
            fy = vec._values.get(t)
            if fy is None:
                continue
            key = g.multiply(s, t)
            contrib = mat @ fy
            if key in out:
                out[key] = out[key] + contrib
            else:
                out[key] = contrib
        return TestVector(g, self.dim, out)

    def apply_tensor(self, xi: "TestVector") -> "TestVector":
        """Act in the first variable of a doubled vector: (T_K x id) xi."""
        if not xi.doubled:
            raise ValueError("apply_tensor expects a doubled test vector")
        self._require_vector(xi)
        g = self.group
        by_first: dict[Point, list[tuple[Point, np.ndarray]]] = {}
        for (y, u), val in xi._values.items():
            by_first.setdefault(y, []).append((u, val))
        out: dict[tuple[Point, Point], np.ndarray] = {}
        for (s, t), mat in self._entries.items():
            for u, val in by_first.get(t, ()):
                key = (g.multiply(s, t), u)
                contrib = mat @ val
                if key in out:
                    out[key] = out[key] + contrib
                else:
                    out[key] = contrib
        return TestVector(g, self.dim, out, doubled=True)

    def conjugate_by_translation(self, a: Point, side: str) -> "Kernel":
        """Translate both kernel arguments by a group element.

        side="right": result(x, y) = K(x*a, y*a); side="left": result(x, y) =
        K(a^-1*x, a^-1*y).  Both are isometric *-automorphisms of the algebra.
        """
        g = self.group
        a = g.canonical(a)
        out = {}
        if side == "right":
            a_inv = g.inverse(a)
            for (s, t), mat in self._entries.items():
                out[(s, g.multiply(t, a_inv))] = mat
        elif side == "left":
            for (s, t), mat in self._entries.items():
                out[(g.conjugate(a, s), g.multiply(a, t))] = mat
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return Kernel(g, self.dim, out)

    def _require_vector(self, vec: "TestVector") -> None:
        if vec.group != self.group:
            raise ValueError("test vector group differs from kernel group")
        if vec.dim != self.dim:
            raise ValueError("test vector dim differs from kernel dim")

    # -- linear structure ---------------------------------------------------------

    def scale(self, c: complex) -> "Kernel":
        return Kernel(self.group, self.dim, {k: c * v for k, v in self._entries.items()})

    def __add__(self, other: "Kernel") -> "Kernel":
        self._require_compatible(other)
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out[k] + v if k in out else v
        return Kernel(self.group, self.dim, out)

    def __sub__(self, other: "Kernel") -> "Kernel":
        return self + other.scale(-1.0)

    def __mul__(self, c: complex) -> "Kernel":
        return self.scale(c)

    __rmul__ = __mul__

    # -- windows and dense sections -------------------------------------------------

    def restrict_to_ball(self, radius: int) -> "Kernel":
        """Keep entries whose pair (x, y) lies in the ball of the given radius."""
        g = self.group
        keep = {}
        for (s, t), mat in self._entries.items():
            if g.word_length(t) <= radius and g.word_length(g.multiply(s, t)) <= radius:
                keep[(s, t)] = mat
        return Kernel(g, self.dim, keep)

    def to_dense(self, points: Iterable[Point]) -> np.ndarray:
        """Dense section matrix [K(x, y)] over an ordered list of points."""
        pts = [self.group.canonical(p) for p in points]
        index = {p: i for i, p in enumerate(pts)}
        if len(index) != len(pts):
            raise ValueError("section points must be distinct")
        d = self.dim
        g = self.group
        mat = np.zeros((len(pts) * d, len(pts) * d), dtype=complex)
        for (s, t), block in self._entries.items():
            j = index.get(t)
            if j is None:
                continue
            i = index.get(g.multiply(s, t))
            if i is None:
                continue
            mat[i * d : (i + 1) * d, j * d : (j + 1) * d] = block
        return mat

    @classmethod
    def from_dense(cls, group: Group, dim: int, mat: np.ndarray, points: Iterable[Point]) -> "Kernel":
        """Inverse of :meth:`to_dense`: read blocks back into (s, t) storage."""
        pts = [group.canonical(p) for p in points]
        n = len(pts)
        if mat.shape != (n * dim, n * dim):
            raise ValueError(f"matrix shape {mat.shape} does not match {n} points of dim {dim}")
        entries = {}
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                block = mat[i * dim : (i + 1) * dim, j * dim : (j + 1) * dim]
                if np.count_nonzero(block):
                    entries[(group.multiply(x, group.inverse(y)), y)] = block
        return cls(group, dim, entries)

    def max_block_difference(self, other: "Kernel") -> float:
        """Max operator-norm difference between matching entries."""
        self._require_compatible(other)
        keys = set(self._entries) | set(other._entries)
        worst = 0.0
        for k in sorted(keys):
            a = self._entries.get(k, self._zero)
            b = other._entries.get(k, other._zero)
            worst = max(worst, operator_norm(a - b))
        return worst

    def __repr__(self) -> str:
        return f"Kernel({self.group.name}, dim={self.dim}, {len(self._entries)} entries)"


def section_operator_norm(kernel: Kernel, radius: int, iterations: int = 200) -> float:
    """Power-iteration estimate of |T_K| on the ball truncation of given radius.

    Estimates the largest singular value of the section matrix from below, so
    the value never exceeds the true operator norm, which in turn is bounded
    by the envelope norm.
    """
    points = kernel.group.ball(radius)
    mat = kernel.to_dense(points)
    n = mat.shape[0]
    if not np.count_nonzero(mat):
        return 0.0
    # Deterministic start with a mild ramp so we are not orthogonal to the
    # leading singular vector by symmetry.
    v = 1.0 + 1e-3 * np.arange(n)
    v = v / np.linalg.norm(v)
    gram = mat.conj().T @ mat
    est = 0.0
    for _ in range(iterations):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        est = nw
    # est approximates the top eigenvalue of gram = (sigma_max)^2.
    return float(np.sqrt(est))


class TestVector:
    """Finitely supported vector-valued function on the group.

    Single-variable vectors map points to C^d; doubled vectors map point pairs
    to C^d and model the two-variable square-summable space used by the
    regular representation.
    """

    __test__ = False  # not a pytest class, despite the name

    def __init__(self, group: Group, dim: int, values: Mapping, doubled: bool = False) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.group = group
        self.dim = dim
        self.doubled = doubled
        cleaned: dict = {}
        for key, vec in values.items():
            arr = np.asarray(vec, dtype=complex)
            if arr.shape != (dim,):
                raise ValueError(f"value at {key!r} has shape {arr.shape}, expected {(dim,)}")
            if not np.count_nonzero(arr):
                continue
            if doubled:
                x, z = key
                ckey = (group.canonical(x), group.canonical(z))
            else:
                ckey = group.canonical(key)
            if ckey in cleaned:
                arr = cleaned[ckey] + arr
            cleaned[ckey] = arr
        self._values = {k: _freeze(v) for k, v in sorted(cleaned.items())}

    @classmethod
    def basis(cls, group: Group, dim: int, key, component: int = 0, doubled: bool = False) -> "TestVector":
        vec = np.zeros(dim, dtype=complex)
        vec[component] = 1.0
        return cls(group, dim, {key: vec}, doubled=doubled)

    @property
    def values(self) -> dict:
        return self._values

    def support(self) -> list:
        return list(self._values)

    def value(self, key) -> np.ndarray:
        if self.doubled:
            x, z = key
            key = (self.group.canonical(x), self.group.canonical(z))
        else:
            key = self.group.canonical(key)
        got = self._values.get(key)
        if got is None:
            return np.zeros(self.dim, dtype=complex)
        return got

    def l2_norm(self) -> float:
        # Exactly rounded accumulation keeps the norm invariant under the
        # coordinate permutations performed by the intertwining unitaries.
        squares = []
        for v in self._values.values():
            squares.extend(float(a) for a in np.abs(v) ** 2)
        return math.sqrt(math.fsum(squares))

    def inner(self, other: "TestVector") -> complex:
        """Inner product, conjugate linear in the first argument."""
        if self.group != other.group or self.dim != other.dim or self.doubled != other.doubled:
            raise ValueError("test vectors live in different spaces")
        total = 0.0 + 0.0j
        for k in sorted(set(self._values) & set(other._values)):
            total += complex(np.vdot(self._values[k], other._values[k]))
        return total

    def translate(self, a: Point, side: str) -> "TestVector":
        """Regular-representation translate of a single-variable vector.

        side="left" gives (lambda(a) f)(x) = f(a^-1 x); side="right" gives
        (rho(a) f)(x) = f(x a).  Both are unitary.
        """
        if self.doubled:
            raise ValueError("translate acts on single-variable test vectors")
        g = self.group
        a = g.canonical(a)
        out = {}
        if side == "left":
            for k, v in self._values.items():
                out[g.multiply(a, k)] = v
        elif side == "right":
            a_inv = g.inverse(a)
            for k, v in self._values.items():
                out[g.multiply(k, a_inv)] = v
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return TestVector(g, self.dim, out)

    def scale(self, c: complex) -> "TestVector":
        return TestVector(self.group, self.dim, {k: c * v for k, v in self._values.items()}, doubled=self.doubled)

    def __add__(self, other: "TestVector") -> "TestVector":
        if self.group != other.group or self.dim != other.dim or self.doubled != other.doubled:
            raise ValueError("test vectors live in different spaces")
        out = dict(self._values)
        for k, v in other._values.items():
            out[k] = out[k] + v if k in out else v
        return TestVector(self.group, self.dim, out, doubled=self.doubled)

    def __sub__(self, other: "TestVector") -> "TestVector":
        return self + other.scale(-1.0)

    def __repr__(self) -> str:
        kind = "doubled" if self.doubled else "single"
        return f"TestVector({self.group.name}, dim={self.dim}, {kind}, {len(self._values)} points)"

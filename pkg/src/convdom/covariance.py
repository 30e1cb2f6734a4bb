"""Covariance algebra of a discrete group acting on bounded matrix fields.

Elements are finitely supported maps x -> (bounded function y -> d x d
matrix) with the twisted convolution product of the crossed-product picture.
The module also provides the coordinate change to and from kernels (an
isometric *-isomorphism on discrete groups), the regular representation on
doubled test vectors, the unitary that intertwines it with the kernel action,
an isometric embedding into a trivial-action convolution algebra of matrix
functions (finite groups), and spectral tests for symmetry of the algebra.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .groups import Group, Point
from .kernels import Kernel, TestVector, _freeze, operator_norm


class CovarianceElement:
    """Finitely supported element f with f(x, y) a d x d complex matrix.

    The l1 norm sums, over x, the sup over y of the operator norm of
    f(x, y); it is the norm under which the product is submultiplicative and
    the involution isometric.
    """

    def __init__(self, group: Group, dim: int, entries: Mapping[tuple[Point, Point], np.ndarray]) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.group = group
        self.dim = dim
        cleaned: dict[tuple[Point, Point], np.ndarray] = {}
        for (x, y), mat in entries.items():
            arr = np.asarray(mat, dtype=complex)
            if arr.shape != (dim, dim):
                raise ValueError(f"entry at {(x, y)!r} has shape {arr.shape}, expected {(dim, dim)}")
            if not np.count_nonzero(arr):
                continue
            key = (group.canonical(x), group.canonical(y))
            if key in cleaned:
                arr = cleaned[key] + arr
            cleaned[key] = arr
        self._entries = {k: _freeze(v) for k, v in sorted(cleaned.items())}
        self._zero = _freeze(np.zeros((dim, dim)))

    @classmethod
    def unit(cls, group: Group, dim: int) -> "CovarianceElement":
        """Multiplicative unit u(x, y) = delta_{x=e} I; finite groups only."""
        eye = np.eye(dim, dtype=complex)
        e = group.identity
        return cls(group, dim, {(e, y): eye for y in group.elements()})

    @property
    def entries(self) -> dict[tuple[Point, Point], np.ndarray]:
        return self._entries

    def support(self) -> list[tuple[Point, Point]]:
        return list(self._entries)

    def value_at(self, x: Point, y: Point) -> np.ndarray:
        key = (self.group.canonical(x), self.group.canonical(y))
        return self._entries.get(key, self._zero)

    def l1_norm(self) -> float:
        fiber_sup: dict[Point, float] = {}
        for (x, _y), mat in self._entries.items():
            v = operator_norm(mat)
            if v > fiber_sup.get(x, 0.0):
                fiber_sup[x] = v
        return math.fsum(fiber_sup.values())

    def _require_compatible(self, other: "CovarianceElement") -> None:
        if self.group != other.group:
            raise ValueError("covariance elements live over different groups")
        if self.dim != other.dim:
            raise ValueError("covariance elements have different dims")

    def product(self, other: "CovarianceElement") -> "CovarianceElement":
        """Twisted convolution (f * h)(x, z) = sum_y f(y, z) h(y^-1 x, y^-1 z)."""
        self._require_compatible(other)
        g = self.group
        # Index the right factor by its second coordinate.
        by_second: dict[Point, list[tuple[Point, np.ndarray]]] = {}
        for (x2, y2), m2 in other._entries.items():
            by_second.setdefault(y2, []).append((x2, m2))
        out: dict[tuple[Point, Point], np.ndarray] = {}
        for (y, z), m1 in self._entries.items():
            y_inv_z = g.multiply(g.inverse(y), z)
            for x2, m2 in by_second.get(y_inv_z, ()):
                key = (g.multiply(y, x2), z)
                block = m1 @ m2
                if key in out:
                    out[key] = out[key] + block
                else:
                    out[key] = block
        return CovarianceElement(g, self.dim, out)

    def involution(self) -> "CovarianceElement":
        """f*(x, y) = f(x^-1, x^-1 y)^H; unimodular discrete form."""
        g = self.group
        out = {}
        for (x, y), mat in self._entries.items():
            x_inv = g.inverse(x)
            out[(x_inv, g.multiply(x_inv, y))] = mat.conj().T
        return CovarianceElement(g, self.dim, out)

    def scale(self, c: complex) -> "CovarianceElement":
        return CovarianceElement(self.group, self.dim, {k: c * v for k, v in self._entries.items()})

    def __add__(self, other: "CovarianceElement") -> "CovarianceElement":
        self._require_compatible(other)
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out[k] + v if k in out else v
        return CovarianceElement(self.group, self.dim, out)

    def __sub__(self, other: "CovarianceElement") -> "CovarianceElement":
        return self + other.scale(-1.0)

    def max_block_difference(self, other: "CovarianceElement") -> float:
        self._require_compatible(other)
        keys = set(self._entries) | set(other._entries)
        worst = 0.0
        for k in sorted(keys):
            a = self._entries.get(k, self._zero)
            b = other._entries.get(k, other._zero)
            worst = max(worst, operator_norm(a - b))
        return worst

    def __repr__(self) -> str:
        return f"CovarianceElement({self.group.name}, dim={self.dim}, {len(self._entries)} entries)"


# -- coordinate change to and from kernels --------------------------------------


def R_map(f: CovarianceElement) -> Kernel:
    """Kernel picture of a covariance element: (Rf)(x, y) = f(x y^-1, x).

    In (s, t) storage this reads entries[(s, t)] = f(s, s t); the map is an
    isometric *-isomorphism onto kernels for discrete groups.
    """
    g = f.group
    out = {}
    for (x, y), mat in f.entries.items():
        out[(x, g.multiply(g.inverse(x), y))] = mat
    return Kernel(g, f.dim, out)


def R_inverse(kernel: Kernel) -> CovarianceElement:
    """Inverse coordinate change: (R^-1 K)(x, y) = K(y, x^-1 y)."""
    g = kernel.group
    out = {}
    for (s, t), mat in kernel.entries.items():
        out[(s, g.multiply(s, t))] = mat
    return CovarianceElement(g, kernel.dim, out)


# -- regular representation and intertwiner --------------------------------------


def pi_regular(f: CovarianceElement, xi: TestVector) -> TestVector:
    """Regular representation on doubled vectors:
    (Pi(f) xi)(x, z) = sum_y f(y, x z) xi(y^-1 x, z)."""
    if not xi.doubled:
        raise ValueError("pi_regular expects a doubled test vector")
    if xi.group != f.group or xi.dim != f.dim:
        raise ValueError("test vector space does not match the covariance element")
    g = f.group
    out: dict[tuple[Point, Point], np.ndarray] = {}
    for (y, w), mat in f.entries.items():
        for (x1, z), val in xi.values.items():
            # Contributes at x = y x1 provided the second argument matches x z.
            if g.multiply(g.multiply(y, x1), z) != w:
                continue
            key = (g.multiply(y, x1), z)
            contrib = mat @ val
            if key in out:
                out[key] = out[key] + contrib
            else:
                out[key] = contrib
    return TestVector(g, f.dim, out, doubled=True)


def W_intertwine(xi: TestVector) -> TestVector:
    """Unitary coordinate shear (W xi)(x, z) = xi(x z, z)."""
    if not xi.doubled:
        raise ValueError("W acts on doubled test vectors")
    g = xi.group
    out = {}
    for (a, z), val in xi.values.items():
        out[(g.multiply(a, g.inverse(z)), z)] = val
    return TestVector(g, xi.dim, out, doubled=True)


def W_inverse(eta: TestVector) -> TestVector:
    """Inverse shear (W^-1 eta)(x, z) = eta(x z^-1, z)."""
    if not eta.doubled:
        raise ValueError("W acts on doubled test vectors")
    g = eta.group
    out = {}
    for (b, z), val in eta.values.items():
        out[(g.multiply(b, z), z)] = val
    return TestVector(g, eta.dim, out, doubled=True)


# -- trivial-action embedding (finite groups) -------------------------------------


def _require_finite(group: Group, what: str) -> list[Point]:
    if not group.is_finite:
        raise ValueError(f"{what} requires a finite group, got {group.name}")
    return group.elements()


def theta_embed(f: CovarianceElement) -> dict[Point, np.ndarray]:
    """Embed into matrix-valued functions under plain convolution.

    Realizes the group action by the left-translation unitaries V on the
    finite-dimensional space of C^d-valued functions over the group: the
    value at x is the product of the multiplication operator by f(x, .) with
    V(x), a |G|d x |G|d matrix.  The embedding is an isometric *-homomorphism
    onto its image inside the trivial-action convolution algebra.
    """
    g = f.group
    pts = _require_finite(g, "theta_embed")
    index = {p: i for i, p in enumerate(pts)}
    n = len(pts)
    d = f.dim
    by_x: dict[Point, list[tuple[Point, np.ndarray]]] = {}
    for (x, y), mat in f.entries.items():
        by_x.setdefault(x, []).append((y, mat))
    out: dict[Point, np.ndarray] = {}
    x_inv_cache = {}
    for x in sorted(by_x):
        big = np.zeros((n * d, n * d), dtype=complex)
        x_inv = x_inv_cache.setdefault(x, g.inverse(x))
        for y, mat in by_x[x]:
            row = index[y]
            col = index[g.multiply(x_inv, y)]
            big[row * d : (row + 1) * d, col * d : (col + 1) * d] = mat
        out[x] = big
    return out


def matrix_function_convolve(
    a: Mapping[Point, np.ndarray], b: Mapping[Point, np.ndarray], group: Group
) -> dict[Point, np.ndarray]:
    """Trivial-action convolution (a * b)(x) = sum_y a(y) b(y^-1 x)."""
    out: dict[Point, np.ndarray] = {}
    for ya in sorted(a):
        for yb in sorted(b):
            key = group.multiply(ya, yb)
            block = a[ya] @ b[yb]
            if key in out:
                out[key] = out[key] + block
            else:
                out[key] = block
    return out


def matrix_function_norm(a: Mapping[Point, np.ndarray]) -> float:
    """l1-type norm: sum over x of the operator norm of a(x)."""
    return float(sum(operator_norm(a[x]) for x in sorted(a)))


# -- dense representations and spectra (finite groups) ------------------------------


def operator_matrix(kernel: Kernel) -> np.ndarray:
    """Dense matrix of the integral operator over a whole finite group."""
    pts = _require_finite(kernel.group, "operator_matrix")
    return kernel.to_dense(pts)


def pi_matrix(f: CovarianceElement) -> np.ndarray:
    """Dense matrix of the regular representation on the doubled space."""
    g = f.group
    pts = _require_finite(g, "pi_matrix")
    d = f.dim
    pairs = [(x, z) for x in pts for z in pts]
    pair_index = {p: i for i, p in enumerate(pairs)}
    size = len(pairs) * d
    mat = np.zeros((size, size), dtype=complex)
    col = 0
    for x, z in pairs:
        for i in range(d):
            image = pi_regular(f, TestVector.basis(g, d, (x, z), i, doubled=True))
            for key, val in image.values.items():
                row = pair_index[key] * d
                mat[row : row + d, col] = val
            col += 1
    return mat


def left_multiplication_matrix(f: CovarianceElement) -> np.ndarray:
    """Matrix of h -> f * h on the covariance algebra of a finite group.

    The algebra is viewed as a vector space of dimension |G|^2 d^2 with the
    basis of single-entry elements, ordered by (x, y, row, column).
    """
    g = f.group
    pts = _require_finite(g, "left_multiplication_matrix")
    index = {p: i for i, p in enumerate(pts)}
    n = len(pts)
    d = f.dim
    d2 = d * d
    size = n * n * d2
    mat = np.zeros((size, size), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for (y, w), block in f.entries.items():
        y_inv_w = g.multiply(g.inverse(y), w)
        kron = np.kron(block, eye)
        for a in pts:
            row = (index[g.multiply(y, a)] * n + index[w]) * d2
            col = (index[a] * n + index[y_inv_w]) * d2
            mat[row : row + d2, col : col + d2] += kron
    return mat


def symmetry_spectrum(
    f: CovarianceElement, method: str = "auto", dense_cutoff: int = 2048
) -> np.ndarray:
    """Spectrum of f in the covariance algebra of a finite group.

    Computed as the eigenvalues of left multiplication by f on the full
    algebra (dimension |G|^2 d^2).  Above ``dense_cutoff`` the same multiset
    is produced through the exact factorization of left multiplication as
    (identity) tensor (dense operator image of f), i.e. the eigenvalues of
    the |G|d x |G|d image each repeated |G|d times.
    """
    pts = _require_finite(f.group, "symmetry_spectrum")
    n_block = len(pts) * f.dim
    total = n_block * n_block
    if method == "auto":
        method = "left-regular" if total <= dense_cutoff else "factored"
    if method == "left-regular":
        return np.linalg.eigvals(left_multiplication_matrix(f))
    if method == "factored":
        eigs = np.linalg.eigvals(operator_matrix(R_map(f)))
        return np.repeat(eigs, n_block)
    raise ValueError(f"unknown method {method!r}")

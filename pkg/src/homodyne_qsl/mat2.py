"""Closed-form 2x2 complex linear algebra.

Entries of a :class:`ComplexMat2` are either Python/numpy complex scalars or
equally shaped numpy arrays. Every operation here is elementwise in the
entries, so a single matrix object can carry a whole batch of 2x2 matrices
(for instance the states at all quadrature nodes of a window) without any
change in the code paths.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NonHermitianInput

HERMITIAN_TOL = 1e-10


class ComplexMat2:
    """Immutable 2x2 complex matrix [[m00, m01], [m10, m11]]."""

    __slots__ = ("m00", "m01", "m10", "m11")

    # treated as immutable; no setter guard because construction sits in hot loops
    def __init__(self, m00, m01, m10, m11):
        self.m00 = m00
        self.m01 = m01
        self.m10 = m10
        self.m11 = m11

    @classmethod
    def from_array(cls, a) -> ComplexMat2:
        a = np.asarray(a, dtype=complex)
        if a.shape[-2:] != (2, 2):
            raise ValueError(f"expected trailing shape (2, 2), got {a.shape}")
        if a.ndim == 2:
            return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))
        return cls(a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1])

    @classmethod
    def diag(cls, a, b) -> ComplexMat2:
        return cls(complex(a), 0j, 0j, complex(b))

    @classmethod
    def zeros(cls) -> ComplexMat2:
        return cls(0j, 0j, 0j, 0j)

    @classmethod
    def identity(cls) -> ComplexMat2:
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @classmethod
    def stack(cls, mats) -> ComplexMat2:
        """Pack a sequence of scalar matrices into one batched matrix."""
        mats = list(mats)
        return cls(
            np.array([m.m00 for m in mats], dtype=complex),
            np.array([m.m01 for m in mats], dtype=complex),
            np.array([m.m10 for m in mats], dtype=complex),
            np.array([m.m11 for m in mats], dtype=complex),
        )

    def to_array(self) -> np.ndarray:
        """Return an array of shape (..., 2, 2)."""
        e = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in self.entries()))
        return np.stack([np.stack([e[0], e[1]], -1), np.stack([e[2], e[3]], -1)], -2)

    def entries(self):
        return (self.m00, self.m01, self.m10, self.m11)

    def __getitem__(self, index) -> ComplexMat2:
        """Select from a batched matrix."""
        return ComplexMat2(self.m00[index], self.m01[index], self.m10[index], self.m11[index])

    def __add__(self, other: ComplexMat2) -> ComplexMat2:
        return ComplexMat2(
            self.m00 + other.m00, self.m01 + other.m01, self.m10 + other.m10, self.m11 + other.m11
        )

    def __sub__(self, other: ComplexMat2) -> ComplexMat2:
        return ComplexMat2(
            self.m00 - other.m00, self.m01 - other.m01, self.m10 - other.m10, self.m11 - other.m11
        )

    def __neg__(self) -> ComplexMat2:
        return ComplexMat2(-self.m00, -self.m01, -self.m10, -self.m11)

    def __mul__(self, s) -> ComplexMat2:
        if isinstance(s, ComplexMat2):
            return NotImplemented
        return ComplexMat2(self.m00 * s, self.m01 * s, self.m10 * s, self.m11 * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> ComplexMat2:
        return ComplexMat2(self.m00 / s, self.m01 / s, self.m10 / s, self.m11 / s)

    def __matmul__(self, o: ComplexMat2) -> ComplexMat2:
        a00, a01, a10, a11 = self.m00, self.m01, self.m10, self.m11
        b00, b01, b10, b11 = o.m00, o.m01, o.m10, o.m11
        return ComplexMat2(
            a00 * b00 + a01 * b10,
            a00 * b01 + a01 * b11,
            a10 * b00 + a11 * b10,
            a10 * b01 + a11 * b11,
        )

    def __eq__(self, other):
        if not isinstance(other, ComplexMat2):
            return NotImplemented
        return all(np.all(a == b) for a, b in zip(self.entries(), other.entries()))

    __hash__ = None

    def __repr__(self):
        return f"ComplexMat2([[{self.m00!r}, {self.m01!r}], [{self.m10!r}, {self.m11!r}]])"

    def adjoint(self) -> ComplexMat2:
        return ComplexMat2(
            self.m00.conjugate(), self.m10.conjugate(), self.m01.conjugate(), self.m11.conjugate()
        )

    def trace(self):
        return self.m00 + self.m11

    def det(self):
        return self.m00 * self.m11 - self.m01 * self.m10

    def frobenius_sq(self):
        return abs(self.m00) ** 2 + abs(self.m01) ** 2 + abs(self.m10) ** 2 + abs(self.m11) ** 2

    def max_abs(self):
        """Largest entry magnitude (over the batch as well)."""
        return float(max(np.max(np.abs(x)) for x in self.entries()))

    def hermitian_defect(self) -> float:
        return (self - self.adjoint()).max_abs()

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(x))) for x in self.entries())


def commutator(a: ComplexMat2, b: ComplexMat2) -> ComplexMat2:
    return a @ b - b @ a


def anticommutator(a: ComplexMat2, b: ComplexMat2) -> ComplexMat2:
    return a @ b + b @ a


def hermitize(m: ComplexMat2) -> ComplexMat2:
    """(M + M^dagger) / 2"""
    return ComplexMat2(
        m.m00.real + 0j,
        0.5 * (m.m01 + m.m10.conjugate()),
        0.5 * (m.m10 + m.m01.conjugate()),
        m.m11.real + 0j,
    )


def eig_hermitian(h: ComplexMat2, tol: float = HERMITIAN_TOL):
    """Eigenvalues of a Hermitian 2x2 matrix, largest first.

    mean +/- sqrt(half-difference**2 + |off-diagonal|**2). Raises
    NonHermitianInput when any entry of H - H^dagger exceeds `tol`.
    """
    defect = h.hermitian_defect()
    if not defect <= tol:
        raise NonHermitianInput(f"matrix is not Hermitian (defect {defect:.3e} > {tol:g})")
    a = np.real(h.m00)
    d = np.real(h.m11)
    mean = 0.5 * (a + d)
    # average the two off-diagonal estimates so rounding noise cancels
    off = 0.5 * (h.m01 + np.conj(h.m10))
    r = np.hypot(0.5 * (a - d), np.abs(off))
    return mean + r, mean - r


def singular_values(m: ComplexMat2):
    """Singular values (s1 >= s2 >= 0), square roots of the eigenvalues of M M^dagger.

    s1 comes from the larger eigenvalue, computed as mean + hypot(...) so
    near-degenerate spectra keep their splitting; s2 = |det M| / s1 stays
    accurate when M is nearly singular.
    """
    a, b, c, d = m.m00, m.m01, m.m10, m.m11
    p00 = a.real**2 + a.imag**2 + b.real**2 + b.imag**2
    p11 = c.real**2 + c.imag**2 + d.real**2 + d.imag**2
    p01 = a * c.conjugate() + b * d.conjugate()
    big = 0.5 * (p00 + p11) + np.hypot(0.5 * (p00 - p11), np.abs(p01))
    s1 = np.sqrt(big)
    det = np.abs(a * d - b * c)
    with np.errstate(invalid="ignore", divide="ignore"):
        s2 = np.where(s1 > 0, det / np.where(s1 > 0, s1, 1.0), 0.0)
    s2 = np.minimum(s2, s1)
    if np.ndim(s1) == 0:
        return float(s1), float(s2)
    return s1, s2


class DensityMatrix:
    """A validated qubit state: Hermitian, unit trace, positive semidefinite.

    The wrapped matrix may be batched; validation then applies to every member.
    """

    __slots__ = ("mat",)

    HERMITIAN_TOL = 1e-12
    TRACE_TOL = 1e-12
    POSITIVITY_TOL = 1e-12

    def __init__(self, mat: ComplexMat2, *, positivity_tol: float | None = None):
        if not mat.is_finite():
            raise DomainError("density matrix has non-finite entries")
        defect = mat.hermitian_defect()
        if defect > self.HERMITIAN_TOL:
            raise DomainError(f"density matrix not Hermitian (defect {defect:.3e})")
        tr_err = float(np.max(np.abs(mat.trace() - 1.0)))
        if tr_err > self.TRACE_TOL:
            raise DomainError(f"density matrix trace deviates from 1 by {tr_err:.3e}")
        tol = self.POSITIVITY_TOL if positivity_tol is None else positivity_tol
        low = float(np.min(eig_hermitian(mat)[1]))
        if low < -tol:
            raise DomainError(f"density matrix has negative eigenvalue {low:.3e}")
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __repr__(self):
        return f"DensityMatrix({self.mat!r})"

    def purity(self):
        m = self.mat
        return np.real(m.m00 * m.m00 + 2 * m.m01 * m.m10 + m.m11 * m.m11)

    def eigenvalues(self):
        return eig_hermitian(self.mat)

    @classmethod
    def from_array(cls, a) -> DensityMatrix:
        return cls(ComplexMat2.from_array(a))

    @classmethod
    def trusted(cls, mat: ComplexMat2) -> DensityMatrix:
        """Wrap without validation, for states already checked by the caller."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "mat", mat)
        return obj

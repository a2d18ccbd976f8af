"""Matrix pencils H(u) = sum_q u^q C_q and diagonal gauge phases."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from src.utils.error_handling import DimensionMismatch, ParameterError

HERMITIAN_RTOL = 1e-13


def _as_matrix(c) -> np.ndarray:
    m = np.array(c, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"pencil coefficient must be square, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class MatrixPencil:
    """Hermitian matrix polynomial in the real parameter u.

    ``coeffs[q]`` multiplies ``u**q``. Coefficients are copied and made
    read-only on construction.
    """

    coeffs: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        mats = tuple(_as_matrix(c) for c in self.coeffs)
        if not mats:
            raise ParameterError("a pencil needs at least one coefficient")
        n = mats[0].shape[0]
        for q, m in enumerate(mats):
            if m.shape != (n, n):
                raise DimensionMismatch(f"coefficient {q} has shape {m.shape}, expected {(n, n)}")
            scale = np.linalg.norm(m)
            if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_RTOL * max(scale, 1.0):
                raise ParameterError(f"coefficient C_{q} is not Hermitian")
            m.setflags(write=False)
        object.__setattr__(self, "coeffs", mats)
        if self.labels and len(self.labels) != n:
            raise DimensionMismatch(f"{len(self.labels)} labels for a {n}-state pencil")
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))

    @classmethod
    def linear(cls, c0, c1, labels: Sequence = ()) -> "MatrixPencil":
        return cls((c0, c1), tuple(labels))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def state_labels(self) -> List[str]:
        return list(self.labels) if self.labels else [str(i) for i in range(1, self.dim + 1)]

    def at(self, u: float) -> np.ndarray:
        """Evaluate H(u) by Horner's rule."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c in reversed(self.coeffs):
            out = out * u + c
        return out

    __call__ = at

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(np.max(np.abs(c.imag), initial=0.0) <= tol * max(1.0, np.linalg.norm(c)) for c in self.coeffs)

    def scale(self) -> float:
        return max(float(np.linalg.norm(c)) for c in self.coeffs)

    def padded(self, degree: int) -> "MatrixPencil":
        """Same pencil with zero coefficients appended up to ``degree``."""
        if degree < self.degree:
            raise ParameterError(f"cannot pad a degree-{self.degree} pencil down to {degree}")
        zeros = [np.zeros((self.dim, self.dim))] * (degree - self.degree)
        return MatrixPencil(tuple(self.coeffs) + tuple(zeros), self.labels)

    def __add__(self, other: "MatrixPencil") -> "MatrixPencil":
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot add pencils of size {self.dim} and {other.dim}")
        d = max(self.degree, other.degree)
        a, b = self.padded(d), other.padded(d)
        return MatrixPencil(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), self.labels)

    def __mul__(self, factor: float) -> "MatrixPencil":
        return MatrixPencil(tuple(factor * c for c in self.coeffs), self.labels)

    __rmul__ = __mul__

    def shift_degree(self, power: int = 1) -> "MatrixPencil":
        """Multiply by u**power."""
        zeros = tuple(np.zeros((self.dim, self.dim)) for _ in range(power))
        return MatrixPencil(zeros + tuple(self.coeffs), self.labels)

    def matmul(self, other: "MatrixPencil") -> "MatrixPencil":
        """Polynomial product A(u) B(u); Hermitian only when A and B commute."""
        out = [np.zeros((self.dim, self.dim), dtype=complex) for _ in range(self.degree + other.degree + 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a @ b
        return MatrixPencil(tuple(0.5 * (m + m.conj().T) for m in out), self.labels)

    def to_dict(self) -> dict:
        """Dense coefficients, row-major, as [re, im] pairs."""
        return {
            "degree": self.degree,
            "dim": self.dim,
            "labels": self.state_labels,
            "coeffs": [
                [[[float(z.real), float(z.imag)] for z in row] for row in c]
                for c in self.coeffs
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatrixPencil":
        coeffs = [np.array([[complex(re, im) for re, im in row] for row in c]) for c in data["coeffs"]]
        return cls(tuple(coeffs), tuple(data.get("labels", ())))


def identity_pencil(n: int, power: int = 0) -> MatrixPencil:
    """u**power times the identity."""
    return MatrixPencil((np.eye(n),)).shift_degree(power) if power else MatrixPencil((np.eye(n),))


@dataclass(frozen=True)
class GaugePhases:
    """Diagonal gauge U = diag(exp(i theta_k)); H' = U^dagger H U."""

    theta: tuple

    @property
    def unitary(self) -> np.ndarray:
        return np.diag(np.exp(1j * np.asarray(self.theta, dtype=float)))

    def apply(self, pencil: MatrixPencil) -> MatrixPencil:
        u = self.unitary
        return MatrixPencil(tuple(u.conj().T @ c @ u for c in pencil.coeffs), pencil.labels)

    def is_identity(self, tol: float = 1e-15) -> bool:
        return bool(np.all(np.abs(np.asarray(self.theta)) <= tol))

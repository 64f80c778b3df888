"""Lazy operator algebra acting exactly on finitely supported vectors.

Operator expressions are immutable trees.  Leaves are the forward shift,
the backward shift, sparse orthogonal projections, identity/zero, and
finite rational matrices; combinators are scaling, sums, composition,
powers, 2x2 blocks, and the Foguel block operator built from a sparse
index set.  Application is exact; only the largest-singular-value
computation for finite matrices leaves rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .core import (
    FinVec,
    PairVec,
    Rational,
    RationalLike,
    SparseIndexSet,
    Vector,
    as_rational,
    basis,
    j_interval,
)


class DomainKindError(TypeError):
    """Raised when an operator expression and its operand disagree on kind."""


class NormConvergenceError(RuntimeError):
    """Power iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_estimate: float, iterations: int, last_change: float):
        super().__init__(message)
        self.last_estimate = last_estimate
        self.iterations = iterations
        self.last_change = last_change


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


@dataclass(frozen=True)
class FiniteMatrix:
    """Square matrix of exact rationals.

    Stored as an integer numerator grid over one common positive
    denominator, reduced so gcd(all numerators, denominator) = 1.  This keeps
    repeated multiplication (matrix powers) in pure integer arithmetic.
    """

    numerators: tuple[tuple[int, ...], ...]
    denominator: int = 1

    def __post_init__(self):
        dim = len(self.numerators)
        if dim == 0:
            raise ValueError("matrix must have positive dimension")
        rows = tuple(tuple(int(v) for v in row) for row in self.numerators)
        if any(len(row) != dim for row in rows):
            raise ValueError("matrix must be square")
        den = int(self.denominator)
        if den == 0:
            raise ZeroDivisionError("matrix denominator must be nonzero")
        if den < 0:
            den = -den
            rows = tuple(tuple(-v for v in row) for row in rows)
        g = den
        for row in rows:
            for v in row:
                g = math.gcd(g, v)
        if g > 1:
            rows = tuple(tuple(v // g for v in row) for row in rows)
            den //= g
        object.__setattr__(self, "numerators", rows)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "FiniteMatrix":
        rationals = [[as_rational(v) for v in row] for row in rows]
        den = 1
        for row in rationals:
            for v in row:
                den = _lcm(den, v.denominator)
        nums = tuple(tuple(int(v * den) for v in row) for row in rationals)
        return cls(nums, den)

    @classmethod
    def identity(cls, dim: int) -> "FiniteMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)))

    @classmethod
    def diagonal(cls, values: Sequence[RationalLike]) -> "FiniteMatrix":
        rationals = [as_rational(v) for v in values]
        dim = len(rationals)
        return cls.from_rows(
            [[rationals[i] if i == j else 0 for j in range(dim)] for i in range(dim)]
        )

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def entry(self, i: int, j: int) -> Rational:
        return Fraction(self.numerators[i][j], self.denominator)

    def rows(self) -> tuple[tuple[Rational, ...], ...]:
        return tuple(tuple(self.entry(i, j) for j in range(self.dim)) for i in range(self.dim))

    def transpose(self) -> "FiniteMatrix":
        dim = self.dim
        return FiniteMatrix(
            tuple(tuple(self.numerators[j][i] for j in range(dim)) for i in range(dim)),
            self.denominator,
        )

    def scaled(self, scalar: RationalLike) -> "FiniteMatrix":
        alpha = as_rational(scalar)
        nums = tuple(tuple(v * alpha.numerator for v in row) for row in self.numerators)
        return FiniteMatrix(nums, self.denominator * alpha.denominator)

    def __matmul__(self, other: "FiniteMatrix") -> "FiniteMatrix":
        if not isinstance(other, FiniteMatrix):
            return NotImplemented
        if self.dim != other.dim:
            raise DomainKindError(f"dimension mismatch: {self.dim} vs {other.dim}")
        dim = self.dim
        cols = tuple(zip(*other.numerators))
        nums = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.numerators
        )
        return FiniteMatrix(nums, self.denominator * other.denominator)

    def power(self, exponent: int) -> "FiniteMatrix":
        if exponent < 0:
            raise ValueError("exponent must be nonnegative")
        result = FiniteMatrix.identity(self.dim)
        square = self
        e = exponent
        while e:
            if e & 1:
                result = result @ square
            e >>= 1
            if e:
                square = square @ square
        return result

    def powers_upto(self, horizon: int) -> Iterator["FiniteMatrix"]:
        """Yield M^1, M^2, ..., M^horizon incrementally."""
        current = self
        for _ in range(horizon):
            yield current
            current = current @ self

    def matvec(self, x: FinVec) -> FinVec:
        if x.max_index() >= self.dim:
            raise DomainKindError(
                f"vector support reaches index {x.max_index()}, matrix dimension is {self.dim}"
            )
        out: dict[int, Rational] = {}
        for i in range(self.dim):
            total = Fraction(0)
            for k, v in x.entries.items():
                num = self.numerators[i][k]
                if num:
                    total += Fraction(num, self.denominator) * v
            if total != 0:
                out[i] = total
        return FinVec(out)

    def frobenius_sq(self) -> Rational:
        total = sum(v * v for row in self.numerators for v in row)
        return Fraction(total, self.denominator * self.denominator)

    def to_float_array(self) -> np.ndarray:
        def as_float(q: Fraction) -> float:
            try:
                return float(q)
            except OverflowError:
                return math.inf if q > 0 else -math.inf

        return np.array(
            [[as_float(self.entry(i, j)) for j in range(self.dim)] for i in range(self.dim)],
            dtype=np.float64,
        )


# --- operator expression nodes ---


@dataclass(frozen=True)
class Shift:
    """Forward unilateral shift: e_k -> e_{k+1}."""


@dataclass(frozen=True)
class Coshift:
    """Backward shift: e_k -> e_{k-1}, e_0 -> 0.  Adjoint of Shift."""


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class ZeroOp:
    pass


@dataclass(frozen=True)
class SparseProjection:
    """Orthogonal projection onto span{e_j : j in jset}."""

    jset: SparseIndexSet


@dataclass(frozen=True)
class MatrixOp:
    matrix: FiniteMatrix


@dataclass(frozen=True)
class Scale:
    alpha: Rational
    operand: "OperatorExpr"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))


@dataclass(frozen=True)
class Sum:
    left: "OperatorExpr"
    right: "OperatorExpr"


@dataclass(frozen=True)
class Compose:
    """Composition: apply ``inner`` first, then ``outer``."""

    outer: "OperatorExpr"
    inner: "OperatorExpr"


@dataclass(frozen=True)
class Power:
    base: "OperatorExpr"
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError("power exponent must be a nonnegative integer")


@dataclass(frozen=True)
class Block2x2:
    """(x1, x2) -> (a x1 + b x2, c x1 + d x2); acts on pair vectors."""

    a: "OperatorExpr"
    b: "OperatorExpr"
    c: "OperatorExpr"
    d: "OperatorExpr"


@dataclass(frozen=True)
class Foguel:
    """The block operator ((coshift, projection), (zero, shift)) on pairs."""

    jset: SparseIndexSet


OperatorExpr = Union[
    Shift,
    Coshift,
    Identity,
    ZeroOp,
    SparseProjection,
    MatrixOp,
    Scale,
    Sum,
    Compose,
    Power,
    Block2x2,
    Foguel,
]

SHIFT = Shift()
COSHIFT = Coshift()
IDENTITY = Identity()
ZERO_OP = ZeroOp()


Kind = Union[str, tuple[str, int], None]

SEQ: Kind = "sequence"
PAIR: Kind = "pair"


def _unify(a: Kind, b: Kind) -> Kind:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise DomainKindError(f"inconsistent domain kinds: {a} vs {b}")


def domain_kind(expr: OperatorExpr) -> Kind:
    """Infer the domain kind of an expression, validating consistency.

    Returns ``"sequence"``, ``"pair"``, ``("finite", dim)``, or None for
    kind-polymorphic expressions (identity, zero, and their combinations).
    """
    if isinstance(expr, (Shift, Coshift, SparseProjection)):
        return SEQ
    if isinstance(expr, (Identity, ZeroOp)):
        return None
    if isinstance(expr, MatrixOp):
        return ("finite", expr.matrix.dim)
    if isinstance(expr, Scale):
        return domain_kind(expr.operand)
    if isinstance(expr, Sum):
        return _unify(domain_kind(expr.left), domain_kind(expr.right))
    if isinstance(expr, Compose):
        return _unify(domain_kind(expr.outer), domain_kind(expr.inner))
    if isinstance(expr, Power):
        return domain_kind(expr.base)
    if isinstance(expr, Block2x2):
        block = None
        for part in (expr.a, expr.b, expr.c, expr.d):
            kind = domain_kind(part)
            if kind == PAIR:
                raise DomainKindError("Block2x2 entries must act on single components")
            block = _unify(block, kind)
        return PAIR
    if isinstance(expr, Foguel):
        return PAIR
    raise TypeError(f"not an operator expression: {expr!r}")


def _check_operand(expr: OperatorExpr, x: Vector) -> None:
    kind = domain_kind(expr)
    if kind == PAIR and not isinstance(x, PairVec):
        raise DomainKindError("operator acts on pair vectors, got a FinVec")
    if kind in (SEQ,) and not isinstance(x, FinVec):
        raise DomainKindError("operator acts on sequence vectors, got a PairVec")
    if isinstance(kind, tuple):
        if not isinstance(x, FinVec):
            raise DomainKindError("finite-matrix operator acts on sequence vectors")
        if x.max_index() >= kind[1]:
            raise DomainKindError(
                f"vector support reaches index {x.max_index()}, matrix dimension is {kind[1]}"
            )
    if kind is None and not isinstance(x, (FinVec, PairVec)):
        raise DomainKindError(f"not a vector: {x!r}")


def _zero_like(x: Vector) -> Vector:
    return PairVec() if isinstance(x, PairVec) else FinVec()


def _project(jset: SparseIndexSet, v: FinVec) -> FinVec:
    return v.restricted_to(lambda k: k in jset)


def _apply(expr: OperatorExpr, x: Vector) -> Vector:
    if isinstance(expr, Shift):
        return x.shifted(1)
    if isinstance(expr, Coshift):
        return x.shifted(-1)
    if isinstance(expr, Identity):
        return x
    if isinstance(expr, ZeroOp):
        return _zero_like(x)
    if isinstance(expr, SparseProjection):
        return _project(expr.jset, x)
    if isinstance(expr, MatrixOp):
        return expr.matrix.matvec(x)
    if isinstance(expr, Scale):
        return expr.alpha * _apply(expr.operand, x)
    if isinstance(expr, Sum):
        return _apply(expr.left, x) + _apply(expr.right, x)
    if isinstance(expr, Compose):
        return _apply(expr.outer, _apply(expr.inner, x))
    if isinstance(expr, Power):
        result = x
        for _ in range(expr.exponent):
            result = _apply(expr.base, result)
        return result
    if isinstance(expr, Block2x2):
        top = _apply(expr.a, x.top) + _apply(expr.b, x.bottom)
        bottom = _apply(expr.c, x.top) + _apply(expr.d, x.bottom)
        return PairVec(top, bottom)
    if isinstance(expr, Foguel):
        top = x.top.shifted(-1) + _project(expr.jset, x.bottom)
        return PairVec(top, x.bottom.shifted(1))
    raise TypeError(f"not an operator expression: {expr!r}")


def apply(expr: OperatorExpr, x: Vector) -> Vector:
    """Exact image of ``x`` under the operator expression."""
    _check_operand(expr, x)
    return _apply(expr, x)


def apply_power(expr: OperatorExpr, n: int, x: Vector) -> Vector:
    """n-fold exact application; n = 0 returns ``x`` unchanged."""
    if n < 0:
        raise ValueError("power must be nonnegative")
    _check_operand(expr, x)
    result = x
    for _ in range(n):
        result = _apply(expr, result)
    return result


def iterate_orbit(expr: OperatorExpr, x: Vector, horizon: int) -> Iterator[Vector]:
    """Yield x, Ax, A^2 x, ..., A^horizon x (horizon + 1 vectors)."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    _check_operand(expr, x)
    current = x
    yield current
    for _ in range(horizon):
        current = _apply(expr, current)
        yield current


def adjoint(expr: OperatorExpr) -> OperatorExpr:
    """The adjoint expression, satisfying <A x, z> = <x, adjoint(A) z>.

    Shift and Coshift swap, projections and identity/zero are self-adjoint,
    matrices transpose, compositions reverse, and 2x2 blocks transpose
    blockwise with each block adjointed.
    """
    if isinstance(expr, Shift):
        return COSHIFT
    if isinstance(expr, Coshift):
        return SHIFT
    if isinstance(expr, (Identity, ZeroOp, SparseProjection)):
        return expr
    if isinstance(expr, MatrixOp):
        return MatrixOp(expr.matrix.transpose())
    if isinstance(expr, Scale):
        return Scale(expr.alpha, adjoint(expr.operand))
    if isinstance(expr, Sum):
        return Sum(adjoint(expr.left), adjoint(expr.right))
    if isinstance(expr, Compose):
        return Compose(adjoint(expr.inner), adjoint(expr.outer))
    if isinstance(expr, Power):
        return Power(adjoint(expr.base), expr.exponent)
    if isinstance(expr, Block2x2):
        return Block2x2(adjoint(expr.a), adjoint(expr.c), adjoint(expr.b), adjoint(expr.d))
    if isinstance(expr, Foguel):
        return Block2x2(SHIFT, ZERO_OP, SparseProjection(expr.jset), COSHIFT)
    raise TypeError(f"not an operator expression: {expr!r}")


def apply_adjoint(expr: OperatorExpr, z: Vector) -> Vector:
    """Exact image of ``z`` under the adjoint of ``expr``."""
    return apply(adjoint(expr), z)


# --- projection powers of the Foguel block ---


def pn_recursive(jset: SparseIndexSet, n: int, x: FinVec) -> FinVec:
    """Image of x under the n-th projection power, by the defining recursion.

    The n-th operator is the sum over i < n of coshift^(n-1-i) o proj o
    shift^i; the 0-th is the null operator.  Cost O(n * support).  This is
    the slow reference route; ``pn_closed_form`` is the fast path validated
    against it.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    total = FinVec()
    current = x
    for i in range(n):
        total = total + _project(jset, current).shifted(-(n - 1 - i))
        current = current.shifted(1)
    return total


def pn_closed_form(jset: SparseIndexSet, n: int, k: int) -> FinVec:
    """Image of e_k under the n-th projection power, via the window member.

    For n >= 1 this is e_{2j - (k+n-1)} when the doubling window
    [max{k, (k+n-1)/2}, k+n-1] contains its (unique) member j, else 0.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if n == 0:
        return FinVec()
    j = j_interval(jset, k, n - 1)
    if j is None:
        return FinVec()
    return basis(2 * j - (k + n - 1))


def foguel_operator(jset: SparseIndexSet) -> Foguel:
    return Foguel(jset)


# --- finite-matrix norms ---

_POWER_ITERATION_SEED = 20240212


def _largest_singular_value(array: np.ndarray, tol: float, max_iterations: int) -> float:
    scale = float(np.max(np.abs(array)))
    if scale == 0.0 or not np.isfinite(scale):
        if scale == 0.0:
            return 0.0
        raise NormConvergenceError("matrix entries overflow float range", math.inf, 0, math.inf)
    work = array / scale
    gram = work.T @ work
    rng = np.random.default_rng(_POWER_ITERATION_SEED)
    v = rng.standard_normal(array.shape[1])
    v /= np.linalg.norm(v)
    estimate = float(v @ gram @ v)
    change = math.inf
    for iteration in range(1, max_iterations + 1):
        w = gram @ v
        wnorm = float(np.linalg.norm(w))
        if wnorm == 0.0:
            # landed exactly in the null space; restart from a fresh direction
            v = rng.standard_normal(array.shape[1])
            v /= np.linalg.norm(v)
            estimate = float(v @ gram @ v)
            continue
        v = w / wnorm
        new_estimate = float(v @ gram @ v)
        change = abs(new_estimate - estimate)
        estimate = new_estimate
        if change <= tol * max(estimate, 1e-300):
            return scale * math.sqrt(max(estimate, 0.0))
    raise NormConvergenceError(
        f"largest-singular-value iteration did not converge in {max_iterations} steps "
        f"(last estimate {scale * math.sqrt(max(estimate, 0.0))}, last change {change})",
        scale * math.sqrt(max(estimate, 0.0)),
        max_iterations,
        change,
    )


def matrix_power_norm(
    matrix: FiniteMatrix, n: int, tol: float, max_iterations: int = 200_000
) -> float:
    """Spectral norm of the exact n-th matrix power, to relative tolerance tol.

    The power is computed in exact rational arithmetic; only the
    largest-singular-value iteration runs in floating point.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _largest_singular_value(matrix.power(n).to_float_array(), tol, max_iterations)


def spectral_norm(matrix: FiniteMatrix, tol: float, max_iterations: int = 200_000) -> float:
    return matrix_power_norm(matrix, 1, tol, max_iterations)


def gelfand_estimate(
    matrix: FiniteMatrix, N: int, tol: float, max_iterations: int = 200_000
) -> float:
    """norm(M^N) ** (1/N): an upper-biased finite-step estimate of the
    limit of norm(M^n) ** (1/n) (always >= that limit)."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return matrix_power_norm(matrix, N, tol, max_iterations) ** (1.0 / N)

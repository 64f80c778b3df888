"""Exact rational scalars, finitely supported vectors, and sparse index sets.

Scalars are ``fractions.Fraction`` throughout (aliased as :data:`Rational`):
arbitrary precision, always in canonical lowest terms with positive
denominator.  Vectors never store zero entries, so equality of vectors is
structural equality of their canonical entry maps and "this pairing is
exactly zero" is a decidable test.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Rational = Fraction

RationalLike = Union[Rational, int, str]


class DoublingPropertyError(ValueError):
    """Raised when a sparse index set would violate 2*i < j for members i < j."""


def as_rational(value: RationalLike) -> Rational:
    """Coerce ints, ``"p/q"`` strings, and Fractions to a canonical Rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational scalar")


class FinVec:
    """Finitely supported sequence vector with exact rational entries.

    Indices are nonnegative integers; zero entries are never stored.
    Instances are immutable and hashable.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]] = ()):
        data: dict[int, Rational] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for index, value in items:
            if not isinstance(index, int) or isinstance(index, bool) or index < 0:
                raise ValueError(f"vector index must be a nonnegative integer, got {index!r}")
            rational = as_rational(value)
            if rational != 0:
                data[index] = rational
        object.__setattr__(self, "_entries", data)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("FinVec is immutable")

    @property
    def entries(self) -> dict[int, Rational]:
        return dict(self._entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._entries))

    @property
    def is_zero(self) -> bool:
        return not self._entries

    def max_index(self) -> int:
        """Largest support index; -1 for the zero vector."""
        return max(self._entries) if self._entries else -1

    def __getitem__(self, index: int) -> Rational:
        return self._entries.get(index, Fraction(0))

    def __iter__(self):
        return iter(sorted(self._entries.items()))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinVec):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._entries.items())))
        return self._hash

    def __add__(self, other: "FinVec") -> "FinVec":
        if not isinstance(other, FinVec):
            return NotImplemented
        data = dict(self._entries)
        for k, v in other._entries.items():
            s = data.get(k, Fraction(0)) + v
            if s == 0:
                data.pop(k, None)
            else:
                data[k] = s
        return _finvec_raw(data)

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + (-other)

    def __neg__(self) -> "FinVec":
        return _finvec_raw({k: -v for k, v in self._entries.items()})

    def __rmul__(self, scalar: RationalLike) -> "FinVec":
        alpha = as_rational(scalar)
        if alpha == 0:
            return FinVec()
        return _finvec_raw({k: alpha * v for k, v in self._entries.items()})

    def __mul__(self, scalar: RationalLike) -> "FinVec":
        return self.__rmul__(scalar)

    def shifted(self, offset: int) -> "FinVec":
        """Translate all indices by ``offset``; entries pushed below 0 vanish."""
        return _finvec_raw({k + offset: v for k, v in self._entries.items() if k + offset >= 0})

    def restricted_to(self, predicate: Callable[[int], bool]) -> "FinVec":
        return _finvec_raw({k: v for k, v in self._entries.items() if predicate(k)})

    def __repr__(self) -> str:
        if not self._entries:
            return "FinVec(0)"
        body = " + ".join(f"({v})e{k}" for k, v in sorted(self._entries.items()))
        return f"FinVec({body})"


def _finvec_raw(data: dict[int, Rational]) -> FinVec:
    # internal: entries already canonical (no zeros, valid indices)
    vec = FinVec.__new__(FinVec)
    object.__setattr__(vec, "_entries", data)
    object.__setattr__(vec, "_hash", None)
    return vec


def basis(index: int) -> FinVec:
    """The standard basis vector e_index."""
    return FinVec({index: 1})


class PairVec:
    """Element of the orthogonal direct sum: a (top, bottom) pair of FinVecs."""

    __slots__ = ("top", "bottom")

    def __init__(self, top: FinVec = FinVec(), bottom: FinVec = FinVec()):
        if not isinstance(top, FinVec) or not isinstance(bottom, FinVec):
            raise TypeError("PairVec components must be FinVec")
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)

    def __setattr__(self, name, value):
        raise AttributeError("PairVec is immutable")

    @property
    def is_zero(self) -> bool:
        return self.top.is_zero and self.bottom.is_zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairVec):
            return NotImplemented
        return self.top == other.top and self.bottom == other.bottom

    def __hash__(self) -> int:
        return hash((self.top, self.bottom))

    def __add__(self, other: "PairVec") -> "PairVec":
        if not isinstance(other, PairVec):
            return NotImplemented
        return PairVec(self.top + other.top, self.bottom + other.bottom)

    def __sub__(self, other: "PairVec") -> "PairVec":
        return self + (-other)

    def __neg__(self) -> "PairVec":
        return PairVec(-self.top, -self.bottom)

    def __rmul__(self, scalar: RationalLike) -> "PairVec":
        return PairVec(scalar * self.top, scalar * self.bottom)

    def __mul__(self, scalar: RationalLike) -> "PairVec":
        return self.__rmul__(scalar)

    def __repr__(self) -> str:
        return f"PairVec({self.top!r}, {self.bottom!r})"


Vector = Union[FinVec, PairVec]


def inner(u: FinVec, v: FinVec) -> Rational:
    """Exact inner product over the finite common support."""
    if len(u) > len(v):
        u, v = v, u
    total = Fraction(0)
    for k, val in u._entries.items():
        other = v._entries.get(k)
        if other is not None:
            total += val * other
    return total


def inner_pair(x: PairVec, z: PairVec) -> Rational:
    """Direct-sum pairing: componentwise inner products, summed."""
    return inner(x.top, z.top) + inner(x.bottom, z.bottom)


def norm_sq(u: Vector) -> Rational:
    """Exact squared norm; zero iff the vector is zero."""
    if isinstance(u, PairVec):
        return norm_sq(u.top) + norm_sq(u.bottom)
    return sum((v * v for v in u._entries.values()), Fraction(0))


def pairing(x: Vector, z: Vector) -> Rational:
    """Inner product dispatching on the vector kind; kinds must match."""
    if isinstance(x, PairVec) and isinstance(z, PairVec):
        return inner_pair(x, z)
    if isinstance(x, FinVec) and isinstance(z, FinVec):
        return inner(x, z)
    raise TypeError("cannot pair a FinVec with a PairVec")


class SparseIndexSet:
    """Lazily enumerated strictly increasing set of positive integers with the
    doubling separation: any two enumerated members i < j satisfy 2i < j.

    ``term`` maps t = 0, 1, 2, ... to the t-th member.  Each newly
    materialized member is checked against the previous one; a violation
    raises :class:`DoublingPropertyError`.  Lazy extension is lock-protected
    so instances can be shared across threads.
    """

    def __init__(self, term: Callable[[int], int], description: str = ""):
        self._term = term
        self._prefix: list[int] = []
        self._lock = threading.Lock()
        self.description = description or "sparse index set"

    def _extend_past(self, bound: int) -> None:
        with self._lock:
            while not self._prefix or self._prefix[-1] <= bound:
                t = len(self._prefix)
                value = self._term(t)
                if not isinstance(value, int) or value < 1:
                    raise DoublingPropertyError(
                        f"member {value!r} at position {t} is not a positive integer"
                    )
                if self._prefix:
                    prev = self._prefix[-1]
                    if not 2 * prev < value:
                        raise DoublingPropertyError(
                            f"members {prev} < {value} violate the doubling "
                            f"separation 2i < j (need {2 * prev} < {value})"
                        )
                self._prefix.append(value)

    def members_upto(self, bound: int) -> tuple[int, ...]:
        """All members <= bound, in increasing order."""
        if bound < 1:
            return ()
        self._extend_past(bound)
        return tuple(v for v in self._prefix if v <= bound)

    def members_in(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(v for v in self.members_upto(hi) if v >= lo)

    def __contains__(self, index: int) -> bool:
        if not isinstance(index, int) or index < 1:
            return False
        return index in set(self.members_upto(index))

    def __repr__(self) -> str:
        return f"SparseIndexSet({self.description})"


def make_geometric_set(base: int, bound: int | None = None) -> SparseIndexSet:
    """The set {base**t : t >= 0} as a SparseIndexSet.

    ``base`` must be at least 3: consecutive powers of 2 give j = 2i exactly,
    which violates the strict doubling separation 2i < j.  When ``bound`` is
    given the prefix up to ``bound`` is materialized (and validated) eagerly.
    """
    if not isinstance(base, int) or isinstance(base, bool):
        raise TypeError("base must be an integer")
    if base <= 2:
        raise DoublingPropertyError(
            f"base {base} is too dense: consecutive powers satisfy j = {base}*i <= 2i, "
            "violating the doubling separation 2i < j (base must be >= 3)"
        )
    jset = SparseIndexSet(lambda t: base**t, description=f"powers of {base}")
    if bound is not None:
        jset.members_upto(bound)
    return jset


def j_interval(jset: SparseIndexSet, k: int, n: int) -> int | None:
    """The unique member j with k <= j <= k+n <= 2j, or None.

    The doubling separation forces at most one such member; finding two
    signals a corrupted index set and raises RuntimeError.
    """
    if k < 0 or n < 0:
        raise ValueError("k and n must be nonnegative")
    found = [j for j in jset.members_in(max(k, 1), k + n) if k + n <= 2 * j]
    if len(found) > 1:
        raise RuntimeError(
            f"doubling property violated: members {found} all lie in "
            f"[max({k}, ({k}+{n})/2), {k + n}]"
        )
    return found[0] if found else None

"""
Finite Field Service - exact arithmetic in GF(p^m).

Elements are immutable values tied to a FieldSpec. The spec owns the modulus
(coefficients low-to-high, monic) and builds the galois field class that does
the actual arithmetic. A spec may be declared quadratic over q = p^(m/2), which
enables conjugation, trace and norm.
"""
import itertools
import random
import threading
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from config import Config
from services.errors import PreconditionError
from services.logger import get_logger

logger = get_logger(__name__)


class FieldError(PreconditionError):
    """Invalid field specification or illegal element operation."""


# ============= Field construction helpers =============

@lru_cache(maxsize=None)
def _galois_class(p: int, m: int, modulus: Tuple[int, ...]):
    if m == 1:
        # every degree-1 modulus gives the same constants
        return galois.GF(p)
    prime_field = galois.GF(p)
    poly = galois.Poly(list(reversed(modulus)), field=prime_field)
    return galois.GF(p**m, irreducible_poly=poly)


@lru_cache(maxsize=None)
def _enumeration_values(p: int, m: int) -> Tuple[int, ...]:
    """Integer representations in enumeration order (c0 most significant)."""
    weights = [p**i for i in range(m)]
    return tuple(
        sum(c * w for c, w in zip(coeffs, weights))
        for coeffs in itertools.product(range(p), repeat=m)
    )


def _is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    poly = galois.Poly(list(reversed(modulus)), field=galois.GF(p))
    return bool(poly.is_irreducible())


def smallest_irreducible(p: int, m: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m, ordered by (c_0, ..., c_{m-1})."""
    for coeffs in itertools.product(range(p), repeat=m):
        candidate = tuple(coeffs) + (1,)
        if _is_irreducible(p, candidate):
            return candidate
    raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")  # unreachable


# ============= Field specification =============

@dataclass(frozen=True)
class FieldSpec:
    """GF(p^m) with a fixed modulus. Identity is (p, m, modulus)."""
    p: int
    m: int
    modulus: Tuple[int, ...]
    base_q: Optional[int] = field(default=None, compare=False)

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def is_quadratic(self) -> bool:
        return self.base_q is not None

    @property
    def gf(self):
        """The galois FieldArray subclass doing the arithmetic."""
        return _galois_class(self.p, self.m, self.modulus)

    def quadratic(self) -> "FieldSpec":
        """The same field declared as GF(q^2) over GF(q)."""
        if self.m % 2:
            raise FieldError(f"{self} has odd degree {self.m}; it is not a quadratic extension")
        return replace(self, base_q=self.p ** (self.m // 2))

    def element(self, value: Union[int, "FieldElement"]) -> "FieldElement":
        """Element from its integer representation (sum of c_i p^i)."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldError(f"element of {value.spec} used in {self}")
            return FieldElement(self, value.value)
        return FieldElement(self, int(value))

    def from_coeffs(self, coeffs: Sequence[int]) -> "FieldElement":
        coeffs = list(coeffs)
        if len(coeffs) != self.m:
            raise FieldError(f"expected {self.m} coefficients, got {len(coeffs)}")
        if any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"coefficients must lie in [0, {self.p}): {coeffs}")
        return FieldElement(self, sum(c * self.p**i for i, c in enumerate(coeffs)))

    def from_int(self, n: int) -> "FieldElement":
        """Image of the integer n under Z -> GF(p) -> GF(q)."""
        return FieldElement(self, int(n) % self.p)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def generator(self) -> "FieldElement":
        """The class of x (x itself for m > 1)."""
        return FieldElement(self, self.p if self.m > 1 else 0)

    def elements(self) -> List["FieldElement"]:
        """All q elements in enumeration order."""
        return [FieldElement(self, v) for v in _enumeration_values(self.p, self.m)]

    def nonzero_elements(self) -> List["FieldElement"]:
        return [a for a in self.elements() if a.value]

    def array(self, values):
        """galois array over this field from integer representations."""
        return self.gf(np.asarray(values, dtype=np.int64))

    def __str__(self) -> str:
        if self.m == 1 and self.modulus == (0, 1):
            return f"GF({self.p})"
        coeffs = ",".join(str(c) for c in self.modulus)
        return f"GF({self.p}^{self.m};{coeffs})"


def make_field(p: int, m: int = 1, modulus: Optional[Sequence[int]] = None,
               quadratic: bool = False) -> FieldSpec:
    """
    Build a FieldSpec for GF(p^m).

    Without a modulus the lexicographically smallest monic irreducible is used.
    A supplied modulus is listed low-to-high and must be monic of degree m.
    """
    if not isinstance(p, (int, np.integer)) or not galois.is_prime(int(p)):
        raise FieldError(f"characteristic must be prime, got {p}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise FieldError(f"extension degree must be a positive integer, got {m}")
    p, m = int(p), int(m)
    if p**m > Config.FIELD_MAX_ORDER:
        raise FieldError(f"GF({p}^{m}) exceeds the supported order {Config.FIELD_MAX_ORDER}")

    if modulus is None:
        chosen = smallest_irreducible(p, m)
    else:
        chosen = tuple(int(c) for c in modulus)
        if len(chosen) != m + 1 or chosen[-1] != 1:
            raise FieldError(f"modulus {list(chosen)} is not monic of degree {m}")
        if any(not 0 <= c < p for c in chosen):
            raise FieldError(f"modulus coefficients must lie in [0, {p})")
        if not _is_irreducible(p, chosen):
            raise FieldError(f"modulus {list(chosen)} is reducible over GF({p})")

    spec = FieldSpec(p, m, chosen)
    if quadratic:
        spec = spec.quadratic()
    logger.debug("field_built", field=str(spec), quadratic=spec.is_quadratic)
    return spec


# ============= Elements =============

@dataclass(frozen=True)
class FieldElement:
    """An element of spec, stored by its integer representation."""
    spec: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise FieldError(f"{self.value} is not an element representation of {self.spec}")

    # -- representation --

    @property
    def coeffs(self) -> Tuple[int, ...]:
        """Polynomial coefficients low-to-high, length m."""
        digits, v = [], self.value
        for _ in range(self.spec.m):
            v, r = divmod(v, self.spec.p)
            digits.append(r)
        return tuple(digits)

    @property
    def index(self) -> int:
        """Position in the canonical enumeration order."""
        idx = 0
        for c in self.coeffs:
            idx = idx * self.spec.p + c
        return idx

    def is_zero(self) -> bool:
        return self.value == 0

    def _g(self):
        return self.spec.gf(self.value)

    def _wrap(self, result, other: Optional["FieldElement"] = None) -> "FieldElement":
        # the quadratic declaration wins so conj stays available
        spec = self.spec
        if other is not None and other.spec.is_quadratic and not spec.is_quadratic:
            spec = other.spec
        return FieldElement(spec, int(result))

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError(f"mixed fields: {self.spec} and {other.spec}")
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.spec.from_int(int(other))
        return None

    # -- arithmetic --

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self._g() + o._g(), o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self._g() - o._g(), o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._wrap(o._g() - self._g(), self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._wrap(self._g() * o._g(), o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __neg__(self):
        return self._wrap(-self._g())

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            return self.inv() ** (-e)
        if e == 0:
            return self.spec.one()
        return self._wrap(self._g() ** e)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise FieldError("zero has no multiplicative inverse")
        return self._wrap(np.reciprocal(self._g()))

    def multiplicative_order(self) -> int:
        if self.value == 0:
            raise FieldError("zero has no multiplicative order")
        return int(self._g().multiplicative_order())

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"<{self.spec} {format_element(self)}>"


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def format_element(a: FieldElement, display: str = "poly") -> str:
    """Textual element form: integers for prime fields, poly:[c0,...] or g^k otherwise."""
    if a.spec.m == 1:
        return str(a.value)
    if display == "power":
        return "0" if a.value == 0 else f"g^{discrete_log(a)}"
    return "poly:[" + ",".join(str(c) for c in a.coeffs) + "]"


def random_element(spec: FieldSpec, rng: random.Random, nonzero: bool = False) -> FieldElement:
    low = 1 if nonzero else 0
    return FieldElement(spec, rng.randrange(low, spec.q))


# ============= Structure =============

@lru_cache(maxsize=None)
def _primitive_value(spec: FieldSpec) -> int:
    target = spec.q - 1
    for value in _enumeration_values(spec.p, spec.m):
        if value and int(spec.gf(value).multiplicative_order()) == target:
            return value
    raise FieldError(f"{spec} has no primitive element")  # unreachable for a field


def primitive_element(spec: FieldSpec) -> FieldElement:
    """Enumeration-smallest element of multiplicative order q - 1."""
    return FieldElement(spec, _primitive_value(spec))


_DLOG_TABLES: Dict[FieldSpec, Dict[int, int]] = {}
_DLOG_LOCK = threading.Lock()


def _dlog_table(spec: FieldSpec) -> Dict[int, int]:
    table = _DLOG_TABLES.get(spec)
    if table is not None:
        return table
    with _DLOG_LOCK:
        table = _DLOG_TABLES.get(spec)
        if table is None:
            g = primitive_element(spec)._g()
            table, power = {}, spec.gf(1)
            for j in range(spec.q - 1):
                table[int(power)] = j
                power = power * g
            _DLOG_TABLES[spec] = table
            logger.debug("dlog_table_built", field=str(spec), size=len(table))
    return table


def discrete_log(a: FieldElement) -> int:
    """Smallest j >= 0 with primitive_element**j == a."""
    if a.value == 0:
        raise FieldError("zero has no discrete logarithm")
    spec = a.spec
    if spec.q <= Config.DLOG_TABLE_MAX:
        return _dlog_table(spec)[a.value]
    g = primitive_element(spec)._g()
    power = spec.gf(1)
    for j in range(spec.q - 1):
        if int(power) == a.value:
            return j
        power = power * g
    raise FieldError(f"{a!r} not reached by the primitive element")  # unreachable


def _require_quadratic(a: FieldElement) -> int:
    if not a.spec.is_quadratic:
        raise FieldError(f"{a.spec} is not declared as a quadratic extension")
    return a.spec.base_q


def conj(a: FieldElement) -> FieldElement:
    """Conjugate a^q over GF(q)."""
    return a ** _require_quadratic(a)


def trace(a: FieldElement) -> FieldElement:
    """Relative trace a + a^q into GF(q)."""
    return a + conj(a)


def norm(a: FieldElement) -> FieldElement:
    """Relative norm a^(q+1) into GF(q)."""
    return a ** (_require_quadratic(a) + 1)


def in_base_subfield(a: FieldElement) -> bool:
    return conj(a) == a


def quadratic_character(a: FieldElement) -> int:
    """eta(a): 0, +1 for nonzero squares, -1 otherwise."""
    if a.spec.p == 2:
        raise FieldError("the quadratic character needs odd characteristic")
    if a.value == 0:
        return 0
    return 1 if (a ** ((a.spec.q - 1) // 2)).value == 1 else -1


def norm_preimage(r: FieldElement) -> FieldElement:
    """
    s with s^(q+1) == r for nonzero r in GF(q).

    s = g^j for the smallest j >= 0 with (g^(q+1))^j == r, g the primitive element.
    """
    q = _require_quadratic(r)
    if r.value == 0:
        raise FieldError("norm_preimage of zero")
    if not in_base_subfield(r):
        raise FieldError(f"{r!r} is not in the base subfield GF({q})")
    log_r = discrete_log(r)
    # r is in GF(q)* so its log is a multiple of q + 1, and log_r < q^2 - 1
    j = log_r // (q + 1)
    return primitive_element(r.spec) ** j

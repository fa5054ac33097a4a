"""Prime-field scalars and a transparent symmetric bilinear group.

The transparent backend represents every element of G by its discrete log
with respect to the generator g, and every element of G_T by its discrete
log with respect to e(g, g).  Group operations are therefore exponent
arithmetic mod p.  This is deliberately insecure: CDH is trivial here.  The
point is that every algebraic identity the scheme and attacks rely on can
be asserted directly.
"""

from __future__ import annotations

from dataclasses import dataclass
import random

BACKEND = "transparent"
DEFAULT_MODULUS = 2305843009213693951  # 2**61 - 1

# Deterministic Miller-Rabin witnesses for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class GroupError(ValueError):
    pass


class ModulusMismatch(GroupError):
    pass


class GroupMismatch(GroupError):
    pass


class NonInvertible(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Scalar:
    """An element of Z_p, always held as its canonical residue."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = int(value) % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, Scalar):
            if other.p != self.p:
                raise ModulusMismatch(f"modulus {other.p} != {self.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return Scalar(self.value + y, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return Scalar(self.value - y, self.p)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return Scalar(y - self.value, self.p)

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return Scalar(self.value * y, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.value, self.p)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return self * Scalar(y, self.p).inv()

    def inv(self) -> Scalar:
        if self.value == 0:
            raise NonInvertible("0 has no inverse mod p")
        return Scalar(pow(self.value, -1, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Scalar({self.value}, p={self.p})"

    def encode(self) -> str:
        return str(self.value)


def scalar_arith(x: Scalar, y: Scalar, op: str) -> Scalar:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    raise ValueError(f"unknown op {op!r}")


class _Element:
    __slots__ = ("x", "p")

    def __init__(self, x: int, p: int):
        self.x = int(x) % p
        self.p = p

    def _check(self, other):
        if type(other) is not type(self):
            raise GroupMismatch(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.p != self.p:
            raise GroupMismatch(f"group order {other.p} != {self.p}")

    def __mul__(self, other):
        self._check(other)
        return type(self)(self.x + other.x, self.p)

    def __truediv__(self, other):
        self._check(other)
        return type(self)(self.x - other.x, self.p)

    def __pow__(self, k):
        if isinstance(k, Scalar):
            if k.p != self.p:
                raise ModulusMismatch(f"modulus {k.p} != {self.p}")
            k = k.value
        return type(self)(self.x * int(k), self.p)

    def __invert__(self):
        return type(self)(-self.x, self.p)

    def is_identity(self) -> bool:
        return self.x == 0

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.p == other.p and self.x == other.x

    def __hash__(self):
        return hash((type(self).__name__, self.x, self.p))

    def encode(self) -> str:
        return f"{BACKEND}:{self.x}"

    def __repr__(self):
        return f"{type(self).__name__}(g^{self.x}, p={self.p})"


class GroupElement(_Element):
    """Element of G, stored as its exponent x in g^x."""

    __slots__ = ()

    def dlog(self) -> int:
        # Backend introspection; scheme code must not call this.
        return self.x


class TargetElement(_Element):
    """Element of G_T, stored as z in e(g, g)^z."""

    __slots__ = ()


def g_mul(u: GroupElement, v: GroupElement) -> GroupElement:
    return u * v


def g_pow(u: GroupElement, k) -> GroupElement:
    return u ** k


def pair(u: GroupElement, v: GroupElement) -> TargetElement:
    if not isinstance(u, GroupElement) or not isinstance(v, GroupElement):
        raise GroupMismatch("pairing takes two elements of G")
    if u.p != v.p:
        raise GroupMismatch(f"group order {u.p} != {v.p}")
    return TargetElement(u.x * v.x, u.p)


def decode_element(s: str, p: int) -> GroupElement:
    backend, sep, x = s.partition(":")
    if not sep or backend != BACKEND:
        raise GroupError(f"not a {BACKEND} group element: {s!r}")
    x = int(x)
    if not 0 <= x < p:
        raise GroupError(f"exponent {x} out of range for p={p}")
    return GroupElement(x, p)


def decode_scalar(s, p: int) -> Scalar:
    v = int(s)
    if not 0 <= v < p:
        raise GroupError(f"scalar {v} out of range for p={p}")
    return Scalar(v, p)


@dataclass(frozen=True)
class GroupDescription:
    p: int = DEFAULT_MODULUS
    backend: str = BACKEND

    def __post_init__(self):
        if self.backend != BACKEND:
            raise GroupError(f"unsupported backend {self.backend!r}")
        if not isinstance(self.p, int) or self.p >= 1 << 64:
            raise GroupError("modulus must be an integer below 2**64")
        if not is_prime(self.p):
            raise GroupError(f"modulus {self.p} is not prime")

    @property
    def g(self) -> GroupElement:
        return GroupElement(1, self.p)

    @property
    def identity(self) -> GroupElement:
        return GroupElement(0, self.p)

    @property
    def gt(self) -> TargetElement:
        return pair(self.g, self.g)

    @property
    def gt_identity(self) -> TargetElement:
        return TargetElement(0, self.p)

    def scalar(self, v: int) -> Scalar:
        return Scalar(v, self.p)

    def element(self, x: int) -> GroupElement:
        """g^x."""
        return GroupElement(x, self.p)

    def sample_scalar(self, rng: random.Random) -> Scalar:
        return sample_scalar(rng, self.p)

    def to_json(self) -> dict:
        return {"backend": self.backend, "p": str(self.p), "g": self.g.encode()}

    @classmethod
    def from_json(cls, d: dict) -> GroupDescription:
        desc = cls(int(d["p"]), d.get("backend", BACKEND))
        if "g" in d and decode_element(d["g"], desc.p) != desc.g:
            raise GroupError("transparent backend uses g = g^1")
        return desc


def sample_scalar(rng: random.Random, p: int) -> Scalar:
    """Uniform draw from Z_p^* off the given random tape."""
    return Scalar(rng.randrange(1, p), p)


@dataclass(frozen=True)
class CdhInstance:
    desc: GroupDescription
    g_a: GroupElement
    g_b: GroupElement
    a: Scalar
    b: Scalar

    @property
    def solution(self) -> GroupElement:
        # Witness side only.
        return self.desc.g ** (self.a * self.b)

    def to_json(self) -> dict:
        return {
            "desc": self.desc.to_json(),
            "g_a": self.g_a.encode(),
            "g_b": self.g_b.encode(),
            "witness": {"a": self.a.encode(), "b": self.b.encode()},
        }

    @classmethod
    def from_json(cls, d: dict) -> CdhInstance:
        desc = GroupDescription.from_json(d["desc"])
        a = decode_scalar(d["witness"]["a"], desc.p)
        b = decode_scalar(d["witness"]["b"], desc.p)
        inst = cls(desc, decode_element(d["g_a"], desc.p), decode_element(d["g_b"], desc.p), a, b)
        if inst.g_a != desc.g ** a or inst.g_b != desc.g ** b:
            raise GroupError("CDH instance inconsistent with its witness")
        return inst


def gen_cdh_instance(desc: GroupDescription, rng: random.Random, a=None, b=None) -> CdhInstance:
    a = desc.sample_scalar(rng) if a is None else desc.scalar(int(a))
    b = desc.sample_scalar(rng) if b is None else desc.scalar(int(b))
    return CdhInstance(desc, desc.g ** a, desc.g ** b, a, b)

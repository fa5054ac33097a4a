"""Identity-based signatures with signatures (U, V, W).

Setup publishes g1 = g^s1, g2 = g^s2.  A key for ID is
(D1, D2) = (H1(ID)^s1, H1(ID)^s2), and a signature on M with h = H2(ID || M)
and fresh r is

    U = g^r,  V = D1^h * g1^r,  W = D2 * g2^r.

Verification checks e(V, g) == e(H1(ID)^h * U, g1) and
e(W, g) == e(H1(ID) * U, g2).  Anyone holding the public parameters can
shift r by r' without a key (see :func:`rerandomize`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import random

from .group import (
    GroupDescription,
    GroupElement,
    GroupError,
    Scalar,
    decode_element,
    decode_scalar,
    pair,
)
from .oracles import HashOracle, as_bytes


@dataclass(frozen=True)
class PublicParams:
    desc: GroupDescription
    g1: GroupElement
    g2: GroupElement
    oracle: HashOracle = field(compare=False, repr=False)

    @property
    def g(self) -> GroupElement:
        return self.desc.g

    def to_json(self) -> dict:
        return {
            "desc": self.desc.to_json(),
            "g1": self.g1.encode(),
            "g2": self.g2.encode(),
            "hash": self.oracle.config(),
        }

    @classmethod
    def from_json(cls, d: dict) -> PublicParams:
        desc = GroupDescription.from_json(d["desc"])
        g1 = decode_element(d["g1"], desc.p)
        g2 = decode_element(d["g2"], desc.p)
        if g1.is_identity() or g2.is_identity():
            raise GroupError("g1 and g2 must not be the identity")
        return cls(desc, g1, g2, HashOracle.from_config(desc, d.get("hash")))


@dataclass(frozen=True)
class MasterKey:
    s1: Scalar
    s2: Scalar

    def to_json(self) -> dict:
        return {"s1": self.s1.encode(), "s2": self.s2.encode()}

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> MasterKey:
        return cls(decode_scalar(d["s1"], desc.p), decode_scalar(d["s2"], desc.p))


@dataclass(frozen=True)
class PrivateKey:
    id: bytes
    d1: GroupElement
    d2: GroupElement

    def to_json(self) -> dict:
        return {"id": self.id.hex(), "d1": self.d1.encode(), "d2": self.d2.encode()}

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> PrivateKey:
        return cls(bytes.fromhex(d["id"]), decode_element(d["d1"], desc.p), decode_element(d["d2"], desc.p))


@dataclass(frozen=True)
class Signature:
    u: GroupElement
    v: GroupElement
    w: GroupElement

    def __mul__(self, other: Signature) -> Signature:
        return Signature(self.u * other.u, self.v * other.v, self.w * other.w)

    def __pow__(self, k) -> Signature:
        return Signature(self.u ** k, self.v ** k, self.w ** k)

    def to_json(self) -> dict:
        return {"u": self.u.encode(), "v": self.v.encode(), "w": self.w.encode()}

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> Signature:
        return cls(*(decode_element(d[k], desc.p) for k in ("u", "v", "w")))


def setup(desc: GroupDescription, rng: random.Random, oracle: HashOracle | None = None,
          s1=None, s2=None) -> tuple[PublicParams, MasterKey]:
    """Draw a master key and publish (g, g^s1, g^s2).

    ``s1``/``s2`` pin the master key for worked examples; they must be
    nonzero mod p.
    """
    s1 = desc.sample_scalar(rng) if s1 is None else desc.scalar(int(s1))
    s2 = desc.sample_scalar(rng) if s2 is None else desc.scalar(int(s2))
    if not s1 or not s2:
        raise GroupError("master key exponents must lie in Z_p^*")
    oracle = oracle if oracle is not None else HashOracle(desc)
    pp = PublicParams(desc, desc.g ** s1, desc.g ** s2, oracle)
    return pp, MasterKey(s1, s2)


def gen_key(ident, mk: MasterKey, pp: PublicParams) -> PrivateKey:
    ident = as_bytes(ident)
    q = pp.oracle.h1(ident)
    return PrivateKey(ident, q ** mk.s1, q ** mk.s2)


def sign(msg, sk: PrivateKey, pp: PublicParams, rng: random.Random | None = None, r=None) -> Signature:
    if r is None:
        r = pp.desc.sample_scalar(rng)
    h = pp.oracle.h2(sk.id, as_bytes(msg))
    u = pp.g ** r
    return Signature(u, sk.d1 ** h * pp.g1 ** r, sk.d2 * pp.g2 ** r)


def verify_terms(sig: Signature, qh: GroupElement, q: GroupElement, pp: PublicParams) -> bool:
    """e(V, g) == e(qh * U, g1) and e(W, g) == e(q * U, g2).

    ``qh`` and ``q`` are the H1 terms: H1(ID)^h and H1(ID) for a single
    signature, or the products over a multiset for an aggregate.
    """
    g = pp.g
    try:
        return (pair(sig.v, g) == pair(qh * sig.u, pp.g1)
                and pair(sig.w, g) == pair(q * sig.u, pp.g2))
    except (GroupError, AttributeError, TypeError):
        return False


def verify(sig: Signature, ident, msg, pp: PublicParams) -> bool:
    try:
        ident, msg = as_bytes(ident), as_bytes(msg)
    except TypeError:
        return False
    q = pp.oracle.h1(ident)
    h = pp.oracle.h2(ident, msg)
    return verify_terms(sig, q ** h, q, pp)


def rerandomize(sig: Signature, r_prime, pp: PublicParams) -> Signature:
    return Signature(sig.u * pp.g ** r_prime, sig.v * pp.g1 ** r_prime, sig.w * pp.g2 ** r_prime)

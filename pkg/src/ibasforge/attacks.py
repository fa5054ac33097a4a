"""Forgeries against the (U, V, W) scheme.

Two signatures on the same identity suffice to sign anything for that
identity: with h_i = H2(ID || M_i), pick (d1, d2) with

    d1*h1 + d2*h2 = h*   and   d1 + d2 = 1   (mod p)

and raise each signature to its coefficient.  The first constraint moves V's
H1 exponent to h*, the second keeps W's single copy of D2, and the implied
randomness becomes r1*d1 + r2*d2.

:func:`rerandomize_forgery` is the other half: it shifts any valid forgery by
g^{h'} with h' = H'(U || h*), which ties U* to the random-oracle answer h* and
so breaks the "same U in both forks" premise extraction needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import random

from .group import Scalar
from .ibas import AggregateSignature, aggregate_all, singleton
from .ibs import PrivateKey, PublicParams, Signature, rerandomize, sign, verify
from .oracles import as_bytes


class AttackError(Exception):
    pass


class HashCollision(AttackError):
    """h1 == h2: the coefficient system is singular."""


class PreconditionError(AttackError):
    pass


@dataclass(frozen=True)
class ForgeryCoefficients:
    delta1: Scalar
    delta2: Scalar

    def to_json(self) -> dict:
        return {"delta1": self.delta1.encode(), "delta2": self.delta2.encode()}


@dataclass(frozen=True)
class ForgeryResult:
    sig: Signature
    target_id: bytes
    target_msg: bytes
    coefficients: ForgeryCoefficients
    # Set when the target equals a queried message (the forgery is then a copy).
    degenerate: bool = False
    inputs: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        # Top-level id/msg/u/v/w so the record verifies like any signed message.
        d = {"id": self.target_id.hex(), "msg": self.target_msg.hex()}
        d.update(self.sig.to_json())
        d["coefficients"] = self.coefficients.to_json()
        d["degenerate"] = self.degenerate
        d["inputs"] = self.inputs
        return d


def solve_delta(h1: Scalar, h2: Scalar, h_star: Scalar) -> ForgeryCoefficients:
    det = h1 - h2
    if not det:
        raise HashCollision("h1 == h2 mod p; cannot solve for the coefficients")
    d1 = (h_star - h2) * det.inv()
    return ForgeryCoefficients(d1, 1 - d1)


def universal_forge(sig1: Signature, msg1, sig2: Signature, msg2, target_id, target_msg,
                    pp: PublicParams) -> ForgeryResult:
    target_id, msg1, msg2, target_msg = map(as_bytes, (target_id, msg1, msg2, target_msg))
    if msg1 == msg2:
        raise PreconditionError("the two queried messages must differ")
    if not verify(sig1, target_id, msg1, pp) or not verify(sig2, target_id, msg2, pp):
        raise PreconditionError("input signatures do not verify for the target identity")

    h2 = pp.oracle.h2
    coeffs = solve_delta(h2(target_id, msg1), h2(target_id, msg2), h2(target_id, target_msg))
    forged = sig1 ** coeffs.delta1 * sig2 ** coeffs.delta2
    inputs = {
        "msg1": msg1.hex(), "sig1": sig1.to_json(),
        "msg2": msg2.hex(), "sig2": sig2.to_json(),
    }
    return ForgeryResult(forged, target_id, target_msg, coeffs,
                         degenerate=target_msg in (msg1, msg2), inputs=inputs)


def aggregate_forge(sig1: Signature, msg1, sig2: Signature, msg2, target_id, target_msg,
                    cosigners: list[tuple[PrivateKey, bytes]], pp: PublicParams,
                    rng: random.Random) -> AggregateSignature:
    """Fold a forged signature together with honest signatures from ``cosigners``."""
    forged = universal_forge(sig1, msg1, sig2, msg2, target_id, target_msg, pp)
    parts = [singleton(forged.sig, forged.target_id, forged.target_msg)]
    for sk, msg in cosigners:
        parts.append(singleton(sign(msg, sk, pp, rng), sk.id, msg))
    return aggregate_all(parts, pp)


def rerandomize_forgery(raw: Signature, target_id, target_msg, pp: PublicParams) -> Signature:
    if not verify(raw, target_id, target_msg, pp):
        raise PreconditionError("raw forgery does not verify")
    h_star = pp.oracle.h2(as_bytes(target_id), as_bytes(target_msg))
    return rerandomize(raw, pp.oracle.hprime(raw.u, h_star), pp)

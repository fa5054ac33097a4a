"""Full aggregation of (U, V, W) signatures over a multiset of (ID, M) pairs."""

from __future__ import annotations

from dataclasses import dataclass

from .group import GroupDescription, GroupMismatch
from .ibs import PublicParams, Signature, verify_terms
from .oracles import as_bytes


@dataclass(frozen=True)
class AggregateSignature:
    sig: Signature
    entries: tuple[tuple[bytes, bytes], ...] = ()

    def to_json(self) -> dict:
        # Sorted for stable output; the entry order carries no meaning.
        d = self.sig.to_json()
        d["entries"] = [{"id": i.hex(), "msg": m.hex()} for i, m in sorted(self.entries)]
        return d

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> AggregateSignature:
        entries = tuple((bytes.fromhex(e["id"]), bytes.fromhex(e["msg"])) for e in d["entries"])
        return cls(Signature.from_json(d, desc), entries)


def empty_aggregate(pp: PublicParams) -> AggregateSignature:
    one = pp.desc.identity
    return AggregateSignature(Signature(one, one, one), ())


def singleton(sig: Signature, ident, msg) -> AggregateSignature:
    return AggregateSignature(sig, ((as_bytes(ident), as_bytes(msg)),))


def aggregate(a1: AggregateSignature, a2: AggregateSignature, pp: PublicParams) -> AggregateSignature:
    for part in (a1.sig.u, a2.sig.u):
        if part.p != pp.desc.p:
            raise GroupMismatch("aggregate inputs come from a different group")
    return AggregateSignature(a1.sig * a2.sig, a1.entries + a2.entries)


def aggregate_all(aggs, pp: PublicParams) -> AggregateSignature:
    out = empty_aggregate(pp)
    for a in aggs:
        out = aggregate(out, a, pp)
    return out


def agg_verify(agg: AggregateSignature, pp: PublicParams) -> bool:
    if not agg.entries:
        # (g^r, g1^r, g2^r) would satisfy the empty product equations.
        return all(x == pp.desc.identity for x in (agg.sig.u, agg.sig.v, agg.sig.w))
    qh = q = pp.desc.identity
    for ident, msg in agg.entries:
        h1 = pp.oracle.h1(ident)
        q = q * h1
        qh = qh * h1 ** pp.oracle.h2(ident, msg)
    return verify_terms(agg.sig, qh, q, pp)

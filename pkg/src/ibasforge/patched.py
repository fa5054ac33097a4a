"""The variant that hashes U into h: h = H2(U || ID || M).

Binding h to U kills both public re-randomization and the two-signature
linear forgery.  It also kills aggregation, since a verifier of an aggregate
only sees prod(U_i) and cannot rebuild the individual h_i.
"""

from __future__ import annotations

import random

from .group import GroupError
from .ibs import PrivateKey, PublicParams, Signature, verify_terms
from .oracles import as_bytes


def patched_sign(msg, sk: PrivateKey, pp: PublicParams, rng: random.Random | None = None,
                 r=None) -> Signature:
    if r is None:
        r = pp.desc.sample_scalar(rng)
    u = pp.g ** r
    h = pp.oracle.h2_patched(u, sk.id, as_bytes(msg))
    return Signature(u, sk.d1 ** h * pp.g1 ** r, sk.d2 * pp.g2 ** r)


def patched_verify(sig: Signature, ident, msg, pp: PublicParams) -> bool:
    try:
        ident, msg = as_bytes(ident), as_bytes(msg)
        h = pp.oracle.h2_patched(sig.u, ident, msg)
    except (TypeError, AttributeError, GroupError):
        return False
    q = pp.oracle.h1(ident)
    return verify_terms(sig, q ** h, q, pp)


def _product_verify(sig: Signature, pairs, hs, pp: PublicParams) -> bool:
    qh = q = pp.desc.identity
    for (ident, _), h in zip(pairs, hs):
        t = pp.oracle.h1(ident)
        q = q * t
        qh = qh * t ** h
    return verify_terms(sig, qh, q, pp)


def _product(sigs) -> Signature:
    out = sigs[0]
    for s in sigs[1:]:
        out = out * s
    return out


def demonstrate_aggregation_break(sigs: list[Signature], pairs, pp: PublicParams,
                                  keys: list[PrivateKey] | None = None,
                                  rng: random.Random | None = None) -> dict:
    """Run the two aggregation exhibits and return a JSON-able report.

    Naive exhibit: multiply the triples, then verify in product form with
    each h_i recomputed from the only U available, the aggregate one.  For
    contrast the same aggregate is also checked with the true per-signature
    h_i, which a real verifier never has.

    Information-loss exhibit (needs ``keys`` and ``rng``, k >= 2): sign the
    same pairs twice with randomness r and r' where r'_1 = r_1 + d,
    r'_2 = r_2 - d.  Both lists are valid and share prod(U_i), yet their
    h-vectors differ, so nothing computed from (aggregate U, multiset) can
    supply the h_i.
    """
    pairs = [(as_bytes(i), as_bytes(m)) for i, m in pairs]
    if len(sigs) != len(pairs) or not sigs:
        raise ValueError("need one signature per (id, msg) pair")
    individual_ok = all(patched_verify(s, i, m, pp) for s, (i, m) in zip(sigs, pairs))

    agg = _product(sigs)
    naive_hs = [pp.oracle.h2_patched(agg.u, i, m) for i, m in pairs]
    true_hs = [pp.oracle.h2_patched(s.u, i, m) for s, (i, m) in zip(sigs, pairs)]
    report = {
        "k": len(sigs),
        "individual_signatures_valid": individual_ok,
        "aggregate": agg.to_json(),
        "entries": [{"id": i.hex(), "msg": m.hex()} for i, m in pairs],
        "naive_aggregate_accepts": _product_verify(agg, pairs, naive_hs, pp),
        "accepts_with_individual_h": _product_verify(agg, pairs, true_hs, pp),
    }

    if keys is not None and rng is not None and len(pairs) >= 2:
        desc = pp.desc
        rs = [desc.sample_scalar(rng) for _ in pairs]
        shift = desc.sample_scalar(rng)
        rs_alt = list(rs)
        rs_alt[0] = rs[0] + shift
        rs_alt[1] = rs[1] - shift
        # r values must stay in Z_p^*
        if not rs_alt[0] or not rs_alt[1]:
            rs_alt[0], rs_alt[1] = rs_alt[0] + 1, rs_alt[1] - 1
        lists = []
        for rr in (rs, rs_alt):
            lists.append([patched_sign(m, sk, pp, r=r) for sk, (_, m), r in zip(keys, pairs, rr)])
        first, second = lists
        hs = [[pp.oracle.h2_patched(s.u, i, m) for s, (i, m) in zip(lst, pairs)] for lst in lists]
        report["exhibit"] = {
            "all_valid": all(patched_verify(s, i, m, pp)
                             for lst in lists for s, (i, m) in zip(lst, pairs)),
            "u_product_equal": _product(first).u == _product(second).u,
            "individual_u_differ": [s.u for s in first] != [s.u for s in second],
            "h_vectors_differ": hs[0] != hs[1],
            "first": [s.to_json() for s in first],
            "second": [s.to_json() for s in second],
            "h_first": [h.encode() for h in hs[0]],
            "h_second": [h.encode() for h in hs[1]],
        }
    return report

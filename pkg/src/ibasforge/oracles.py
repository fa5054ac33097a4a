"""Hash oracles H1, H2, H' and the patched-scheme H2.

Every hash input is a domain tag followed by a list of parts.  Each of them
is prefixed with its 4-byte big-endian length, so ``("alice", "bob")`` and
``("aliceb", "ob")`` never collide.  The digest is reduced mod (p - 1) and
shifted by one, which lands in Z_p^*.

Scheme code only ever reaches hashes through an oracle object.  The forking
simulator swaps in a subclass whose ``h1``/``h2`` answer from programmable
tables; nothing in the scheme can tell the difference.
"""

from __future__ import annotations

import hashlib

from .group import GroupDescription, GroupElement, Scalar, decode_element

TAG_H1 = "H1"
TAG_H2 = "H2"
TAG_H2_PATCHED = "H2patched"
TAG_HPRIME = "Hprime"

DEFAULT_DIGEST = "sha256"


def encode_parts(tag: str, *parts: bytes) -> bytes:
    out = bytearray()
    for part in (tag.encode(), *parts):
        out += len(part).to_bytes(4, "big")
        out += part
    return bytes(out)


def as_bytes(s) -> bytes:
    if isinstance(s, bytes):
        return s
    if isinstance(s, str):
        return s.encode()
    raise TypeError(f"expected bytes or str, got {type(s).__name__}")


class HashOracle:
    """Standard-model hashes, optionally overridden by a fixture table.

    ``fixtures`` maps ``(tag, parts)`` to an integer: the scalar output for
    scalar-valued hashes, or the exponent d of g^d for H1.
    """

    def __init__(self, desc: GroupDescription, digest: str = DEFAULT_DIGEST, fixtures=None):
        hashlib.new(digest)  # fail early on unknown names
        self.desc = desc
        self.digest = digest
        self.fixtures = dict(fixtures or {})

    def hash_to_scalar(self, tag: str, *parts: bytes) -> Scalar:
        p = self.desc.p
        fixed = self.fixtures.get((tag, parts))
        if fixed is not None:
            return Scalar(fixed, p)
        d = hashlib.new(self.digest, encode_parts(tag, *parts)).digest()
        return Scalar(int.from_bytes(d, "big") % (p - 1) + 1, p)

    def hash_to_group(self, tag: str, *parts: bytes) -> GroupElement:
        return self.desc.g ** self.hash_to_scalar(tag, *parts)

    def h1(self, ident: bytes) -> GroupElement:
        return self.hash_to_group(TAG_H1, as_bytes(ident))

    def h2(self, ident: bytes, msg: bytes) -> Scalar:
        return self.hash_to_scalar(TAG_H2, as_bytes(ident), as_bytes(msg))

    def h2_patched(self, u: GroupElement, ident: bytes, msg: bytes) -> Scalar:
        return self.hash_to_scalar(TAG_H2_PATCHED, u.encode().encode(), as_bytes(ident), as_bytes(msg))

    def hprime(self, u: GroupElement, h: Scalar) -> Scalar:
        # Never programmable: H' is a plain collision-resistant hash.
        return self.hash_to_scalar(TAG_HPRIME, u.encode().encode(), h.encode().encode())

    # fixture tables -------------------------------------------------------

    def set_h1(self, ident, exponent: int) -> None:
        self._set(TAG_H1, (as_bytes(ident),), exponent)

    def set_h2(self, ident, msg, h: int) -> None:
        self._set(TAG_H2, (as_bytes(ident), as_bytes(msg)), h)

    def set_h2_patched(self, u: GroupElement, ident, msg, h: int) -> None:
        self._set(TAG_H2_PATCHED, (u.encode().encode(), as_bytes(ident), as_bytes(msg)), h)

    def _set(self, tag, parts, value):
        value = int(value) % self.desc.p
        if value == 0:
            raise ValueError("fixture outputs must lie in Z_p^*")
        self.fixtures[(tag, parts)] = value

    def config(self) -> dict:
        """JSON-able hash configuration, fixture tables included."""
        cfg = {"digest": self.digest}
        if self.fixtures:
            table = {TAG_H1: [], TAG_H2: [], TAG_H2_PATCHED: []}
            for (tag, parts), value in sorted(self.fixtures.items()):
                if tag == TAG_H1:
                    table[tag].append({"id": parts[0].hex(), "value": value})
                elif tag == TAG_H2:
                    table[tag].append({"id": parts[0].hex(), "msg": parts[1].hex(), "value": value})
                elif tag == TAG_H2_PATCHED:
                    table[tag].append({"u": parts[0].decode(), "id": parts[1].hex(),
                                       "msg": parts[2].hex(), "value": value})
            cfg["fixtures"] = {k: v for k, v in table.items() if v}
        return cfg

    @classmethod
    def from_config(cls, desc: GroupDescription, cfg: dict | None) -> HashOracle:
        cfg = cfg or {}
        oracle = cls(desc, cfg.get("digest", DEFAULT_DIGEST))
        load_fixtures(oracle, cfg.get("fixtures", {}), hex_encoded=True)
        return oracle


def load_fixtures(oracle: HashOracle, table: dict, hex_encoded: bool = False) -> None:
    """Fill oracle tables from a fixture document.

    Hand-written fixture files use plain UTF-8 strings for ids and messages;
    the copy embedded in serialized public parameters is hex, like every
    other byte-string there.
    """

    def b(s):
        return bytes.fromhex(s) if hex_encoded else as_bytes(s)

    for row in table.get(TAG_H1, []):
        oracle.set_h1(b(row["id"]), int(row["value"]))
    for row in table.get(TAG_H2, []):
        oracle.set_h2(b(row["id"]), b(row["msg"]), int(row["value"]))
    for row in table.get(TAG_H2_PATCHED, []):
        u = row["u"]
        u = decode_element(u, oracle.desc.p) if isinstance(u, str) else oracle.desc.element(u)
        oracle.set_h2_patched(u, b(row["id"]), b(row["msg"]), int(row["value"]))

"""Replay of the CDH reduction through a forking experiment.

The simulator embeds a CDH instance (g, g^a, g^b) into the public parameters
by setting g1 = g^a, answers H1 with (g^b)^t (coin 0) or g^t (coin 1), and
answers H2 from a programmable table.  A forger is run twice on the same
random tape; the second run reuses every H2 answer given before the first
query on the forged (ID*, M*) and gets fresh answers from there on.  If both
forgeries share U and the identity was embedded (coin 0), then

    V1 / V2 = H1(ID*)^{a (h1 - h2)} = (g^{ab})^{t (h1 - h2)}

and g^{ab} falls out.  Randomness sources within one fork experiment:

* the adversary's tape (identical across both runs),
* the simulator's own coins for t, c, r' and s2 (identical across runs,
  consumed in the same order up to the fork),
* H2 answers (replayed prefix, then a per-run fresh stream).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import random

from .attacks import HashCollision, rerandomize_forgery, universal_forge
from .group import (
    CdhInstance,
    GroupDescription,
    GroupElement,
    Scalar,
    decode_element,
    decode_scalar,
    gen_cdh_instance,
    sample_scalar,
)
from .ibs import PrivateKey, PublicParams, Signature, sign, verify
from .oracles import HashOracle, as_bytes

# Failure modes recorded on a transcript.
ABORT_KEY_QUERY = "abort-key-query"
NO_FORGERY = "no-forgery"
INVALID_FORGERY = "invalid-forgery"
TRIVIAL_FORGERY = "trivial-forgery"
TARGET_MISMATCH = "target-mismatch"
FORK_INDEX_MISMATCH = "fork-index-mismatch"
H_COLLISION = "h-collision"

# Extraction failure reasons.
COIN_NONZERO = "c*!=0"
U_MISMATCH = "U-mismatch"
H_EQUAL = "h1*=h2*"


class SimulationAbort(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ExtractionFailure(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class SimulatorConfig:
    coin_bias: float = 0.5  # Pr[c = 0]
    fork_trials: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.coin_bias < 1:
            raise ValueError("coin bias must lie strictly between 0 and 1")
        if self.fork_trials < 0:
            raise ValueError("fork_trials must be non-negative")


@dataclass(frozen=True)
class H1Entry:
    id: bytes
    t: Scalar
    coin: int
    q: GroupElement

    def to_json(self) -> dict:
        return {"id": self.id.hex(), "t": self.t.encode(), "coin": self.coin, "q": self.q.encode()}

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> H1Entry:
        return cls(bytes.fromhex(d["id"]), decode_scalar(d["t"], desc.p), int(d["coin"]),
                   decode_element(d["q"], desc.p))


@dataclass(frozen=True)
class H2Entry:
    id: bytes
    msg: bytes
    h: Scalar
    query_index: int


class H2Answers:
    """Answer source for H2: a replayed prefix, then fresh uniform draws."""

    def __init__(self, p: int, rng: random.Random, prefix=()):
        self.p = p
        self.rng = rng
        self.prefix = list(prefix)
        self.given: list[Scalar] = []

    def next(self) -> Scalar:
        i = len(self.given)
        h = self.prefix[i] if i < len(self.prefix) else sample_scalar(self.rng, self.p)
        self.given.append(h)
        return h


class SimulatedOracle(HashOracle):
    """H1 and H2 answered by the simulator; H' stays a plain hash."""

    def __init__(self, sim: Simulator, digest: str = "sha256"):
        super().__init__(sim.desc, digest)
        self.sim = sim

    def h1(self, ident) -> GroupElement:
        return self.sim.sim_h1(ident)

    def h2(self, ident, msg) -> Scalar:
        return self.sim.sim_h2(ident, msg)


class Simulator:
    """One simulated world: CDH instance embedded in PP plus oracle tables."""

    def __init__(self, instance: CdhInstance, coin_bias: float, rng: random.Random,
                 h2_answers: H2Answers | None = None, s2=None):
        self.instance = instance
        self.desc = desc = instance.desc
        self.coin_bias = coin_bias
        self.rng = rng
        self.h2_answers = h2_answers or H2Answers(desc.p, rng)
        self.s2 = desc.sample_scalar(rng) if s2 is None else desc.scalar(int(s2))
        self.oracle = SimulatedOracle(self)
        self.pp = PublicParams(desc, instance.g_a, desc.g ** self.s2, self.oracle)
        self.h1_list: dict[bytes, H1Entry] = {}
        self.h2_list: dict[tuple[bytes, bytes], H2Entry] = {}
        self.key_queries: set[bytes] = set()
        self.sign_queries: set[tuple[bytes, bytes]] = set()

    def program_h1(self, ident, t, coin: int) -> H1Entry:
        ident = as_bytes(ident)
        t = self.desc.scalar(int(t))
        base = self.instance.g_b if coin == 0 else self.desc.g
        entry = H1Entry(ident, t, coin, base ** t)
        self.h1_list[ident] = entry
        return entry

    def program_h2(self, ident, msg, h) -> H2Entry:
        key = (as_bytes(ident), as_bytes(msg))
        entry = H2Entry(*key, self.desc.scalar(int(h)), len(self.h2_list))
        self.h2_list[key] = entry
        return entry

    def sim_h1(self, ident) -> GroupElement:
        ident = as_bytes(ident)
        entry = self.h1_list.get(ident)
        if entry is None:
            coin = 0 if self.rng.random() < self.coin_bias else 1
            entry = self.program_h1(ident, self.desc.sample_scalar(self.rng), coin)
        return entry.q

    def sim_h2(self, ident, msg) -> Scalar:
        key = (as_bytes(ident), as_bytes(msg))
        entry = self.h2_list.get(key)
        if entry is None:
            entry = H2Entry(*key, self.h2_answers.next(), len(self.h2_list))
            self.h2_list[key] = entry
        return entry.h

    def sim_keygen(self, ident) -> PrivateKey:
        ident = as_bytes(ident)
        self.sim_h1(ident)
        entry = self.h1_list[ident]
        self.key_queries.add(ident)
        if entry.coin == 0:
            raise SimulationAbort(ABORT_KEY_QUERY)
        return PrivateKey(ident, self.pp.g1 ** entry.t, self.pp.g2 ** entry.t)

    def sim_sign(self, ident, msg) -> Signature:
        # No key needed: U absorbs H1(ID)^{-h}, so the implied r is r' - h*dlog H1(ID).
        ident, msg = as_bytes(ident), as_bytes(msg)
        q = self.sim_h1(ident)
        h = self.sim_h2(ident, msg)
        r = self.desc.sample_scalar(self.rng)
        self.sign_queries.add((ident, msg))
        u = self.desc.g ** r * q ** (-h)
        return Signature(u, self.pp.g1 ** r, q ** self.s2 * u ** self.s2)

    # Adversary-facing oracle handle.
    h1_query = sim_h1
    h2_query = sim_h2
    key_query = sim_keygen
    sign_query = sim_sign


@dataclass(frozen=True)
class Forgery:
    id: bytes
    msg: bytes
    sig: Signature


class KeyedForger:
    """Positive control: holds the master key out of band and signs honestly.

    Its r comes off the tape, so both fork runs share U.
    """

    name = "keyed"

    def __init__(self, s1: Scalar, s2: Scalar, decoys: int = 2):
        self.s1, self.s2, self.decoys = s1, s2, decoys

    def forge(self, pp: PublicParams, tape: random.Random, oracles) -> Forgery | None:
        ident = b"target-%08x" % tape.getrandbits(32)
        msg = b"forged-%08x" % tape.getrandbits(32)
        for i in range(self.decoys):
            oracles.sign_query(ident, b"decoy-%d" % i)
        r = pp.desc.sample_scalar(tape)
        q = oracles.h1_query(ident)
        sk = PrivateKey(ident, q ** self.s1, q ** self.s2)
        return Forgery(ident, msg, sign(msg, sk, pp, r=r))


class UniversalForger:
    """Two signing queries on one identity, then the linear-combination forgery."""

    name = "universal"

    def forge(self, pp: PublicParams, tape: random.Random, oracles) -> Forgery | None:
        tag = tape.getrandbits(32)
        ident = b"target-%08x" % tag
        m1, m2, target = (b"%s-%08x" % (k, tag) for k in (b"m1", b"m2", b"target"))
        sig1 = oracles.sign_query(ident, m1)
        sig2 = oracles.sign_query(ident, m2)
        try:
            res = universal_forge(sig1, m1, sig2, m2, ident, target, pp)
        except HashCollision:
            return None
        return Forgery(ident, target, res.sig)


class ReRandomizingForger:
    """Wraps any forger and shifts its output by g^{H'(U' || h*)}."""

    name = "rerand"

    def __init__(self, inner):
        self.inner = inner

    def forge(self, pp: PublicParams, tape: random.Random, oracles) -> Forgery | None:
        raw = self.inner.forge(pp, tape, oracles)
        if raw is None:
            return None
        return Forgery(raw.id, raw.msg, rerandomize_forgery(raw.sig, raw.id, raw.msg, pp))


ADVERSARIES = ("keyed", "universal", "rerand")


def make_adversary(name: str, instance: CdhInstance, s2: Scalar):
    if name == "keyed":
        return KeyedForger(instance.a, s2)
    if name == "universal":
        return UniversalForger()
    if name == "rerand":
        return ReRandomizingForger(KeyedForger(instance.a, s2))
    raise ValueError(f"unknown adversary {name!r}; choose from {', '.join(ADVERSARIES)}")


@dataclass
class RunResult:
    sim: Simulator
    forgery: Forgery | None = None
    failure: str | None = None

    @property
    def target(self):
        return (self.forgery.id, self.forgery.msg)

    @property
    def h2_entry(self) -> H2Entry:
        return self.sim.h2_list[self.target]


@dataclass
class ForkTranscript:
    fork_index: int | None = None
    target_id: bytes | None = None
    target_msg: bytes | None = None
    sig1: Signature | None = None
    sig2: Signature | None = None
    h1_star: Scalar | None = None
    h2_star: Scalar | None = None
    star_entry: H1Entry | None = None
    failure: str | None = None
    h2_prefix_1: list = field(default_factory=list, repr=False)
    h2_prefix_2: list = field(default_factory=list, repr=False)

    @property
    def succeeded(self) -> bool:
        return self.failure is None and self.sig1 is not None and self.sig2 is not None

    @property
    def u_equal(self) -> bool:
        return self.succeeded and self.sig1.u == self.sig2.u

    def to_json(self) -> dict:
        enc = lambda x: None if x is None else x.encode()
        return {
            "fork_index": self.fork_index,
            "failure": self.failure,
            "target_id": None if self.target_id is None else self.target_id.hex(),
            "target_msg": None if self.target_msg is None else self.target_msg.hex(),
            "sig1": None if self.sig1 is None else self.sig1.to_json(),
            "sig2": None if self.sig2 is None else self.sig2.to_json(),
            "h1_star": enc(self.h1_star),
            "h2_star": enc(self.h2_star),
            "star_entry": None if self.star_entry is None else self.star_entry.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict, desc: GroupDescription) -> ForkTranscript:
        sc = lambda x: None if x is None else decode_scalar(x, desc.p)
        sg = lambda x: None if x is None else Signature.from_json(x, desc)
        by = lambda x: None if x is None else bytes.fromhex(x)
        entry = d.get("star_entry")
        return cls(
            fork_index=d.get("fork_index"),
            target_id=by(d.get("target_id")),
            target_msg=by(d.get("target_msg")),
            sig1=sg(d.get("sig1")),
            sig2=sg(d.get("sig2")),
            h1_star=sc(d.get("h1_star")),
            h2_star=sc(d.get("h2_star")),
            star_entry=None if entry is None else H1Entry.from_json(entry, desc),
            failure=d.get("failure"),
        )


def _streams(seed):
    return (random.Random(f"{seed}:tape"), random.Random(f"{seed}:sim"))


def run_once(adv, cfg: SimulatorConfig, instance: CdhInstance, h2_answers: H2Answers,
             s2=None) -> RunResult:
    tape, coins = _streams(cfg.seed)
    sim = Simulator(instance, cfg.coin_bias, coins, h2_answers, s2)
    try:
        forgery = adv.forge(sim.pp, tape, sim)
    except SimulationAbort as e:
        return RunResult(sim, failure=e.reason)
    if forgery is None:
        return RunResult(sim, failure=NO_FORGERY)
    # verify() also backfills the H2 query on (ID*, M*) if the forger never made it.
    if not verify(forgery.sig, forgery.id, forgery.msg, sim.pp):
        return RunResult(sim, forgery, INVALID_FORGERY)
    if forgery.id in sim.key_queries or (forgery.id, forgery.msg) in sim.sign_queries:
        return RunResult(sim, forgery, TRIVIAL_FORGERY)
    return RunResult(sim, forgery)


def run_fork(adv, cfg: SimulatorConfig, instance: CdhInstance, s2=None,
             reprogram: bool = True) -> ForkTranscript:
    """Run ``adv`` twice on one tape, forking H2 at the forged pair's first query.

    With ``reprogram=False`` the second run sees exactly the first run's
    H2 answers, which must reproduce the first run byte for byte.
    """
    p = instance.desc.p
    fresh1 = random.Random(f"{cfg.seed}:h2:0")
    fresh2 = random.Random(f"{cfg.seed}:h2:1")
    first = run_once(adv, cfg, instance, H2Answers(p, fresh1), s2)
    if first.failure is not None:
        return ForkTranscript(failure=first.failure)

    fork_index = first.h2_entry.query_index
    given = first.sim.h2_answers.given
    prefix = given if not reprogram else given[:fork_index]
    second = run_once(adv, cfg, instance, H2Answers(p, fresh2, prefix), s2)

    tr = ForkTranscript(
        fork_index=fork_index,
        target_id=first.forgery.id,
        target_msg=first.forgery.msg,
        sig1=first.forgery.sig,
        h1_star=first.h2_entry.h,
        star_entry=first.sim.h1_list.get(first.forgery.id),
        h2_prefix_1=list(given),
        h2_prefix_2=list(second.sim.h2_answers.given),
    )
    if second.failure is not None:
        tr.failure = second.failure
    elif second.target != first.target:
        tr.failure = TARGET_MISMATCH
    elif second.h2_entry.query_index != fork_index:
        tr.failure = FORK_INDEX_MISMATCH
    else:
        tr.sig2 = second.forgery.sig
        tr.h2_star = second.h2_entry.h
        if tr.h1_star == tr.h2_star and reprogram:
            tr.failure = H_COLLISION
    return tr


def extract_cdh(tr: ForkTranscript) -> GroupElement:
    """Compute g^{ab} = (V1 / V2)^{1 / (t* (h1* - h2*))} from a forked pair.

    Raises :class:`ExtractionFailure` when the identity was not embedded,
    the two U components differ, or the H2 answers coincide.
    """
    if tr.sig1 is None or tr.sig2 is None or tr.star_entry is None:
        raise ValueError("transcript does not hold two forgeries")
    if tr.star_entry.coin != 0:
        raise ExtractionFailure(COIN_NONZERO)
    if tr.sig1.u != tr.sig2.u:
        raise ExtractionFailure(U_MISMATCH)
    dh = tr.h1_star - tr.h2_star
    if not dh:
        raise ExtractionFailure(H_EQUAL)
    return (tr.sig1.v / tr.sig2.v) ** (tr.star_entry.t * dh).inv()


def fork_trial(adversary: str, cfg: SimulatorConfig, desc: GroupDescription) -> dict:
    setup_rng = random.Random(f"{cfg.seed}:setup")
    instance = gen_cdh_instance(desc, setup_rng)
    s2 = desc.sample_scalar(setup_rng)
    tr = run_fork(make_adversary(adversary, instance, s2), cfg, instance, s2)
    row = {
        "seed": cfg.seed,
        "fork_index": tr.fork_index,
        "abort_reason": tr.failure,
        "h1_star": None if tr.h1_star is None else tr.h1_star.encode(),
        "h2_star": None if tr.h2_star is None else tr.h2_star.encode(),
        "coin": None if tr.star_entry is None else tr.star_entry.coin,
        "u_equal": tr.u_equal,
        "extraction": None,
        "witness_match": False,
    }
    if tr.succeeded:
        try:
            got = extract_cdh(tr)
        except ExtractionFailure as e:
            row["extraction"] = e.reason
        else:
            row["extraction"] = "success"
            row["witness_match"] = got == instance.solution
    return row


def run_experiment(adversary: str, cfg: SimulatorConfig, desc: GroupDescription,
                   trials: int | None = None) -> dict:
    """Independent fork trials with seeds cfg.seed, cfg.seed + 1, ..."""
    trials = cfg.fork_trials if trials is None else trials
    rows = [fork_trial(adversary, replace(cfg, seed=cfg.seed + i), desc) for i in range(trials)]
    forked = [r for r in rows if r["extraction"] is not None]
    summary = {
        "adversary": adversary,
        "trials": trials,
        "forks_succeeded": len(forked),
        "extractions": sum(r["extraction"] == "success" for r in rows),
        "witness_matches": sum(r["witness_match"] for r in rows),
        "u_mismatches": sum(not r["u_equal"] for r in forked),
        "eligible": sum(r["coin"] == 0 and r["u_equal"] for r in forked),
    }
    return {"summary": summary, "trials": rows}


def expected_outcome(report: dict) -> bool:
    """Keyed forger: every eligible fork extracts the witness.  Others: nothing extracts."""
    s = report["summary"]
    if s["adversary"] == "keyed":
        return s["eligible"] > 0 and s["extractions"] == s["witness_matches"] == s["eligible"]
    return s["extractions"] == 0

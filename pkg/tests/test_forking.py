import random

import pytest
from scipy import stats

from ibasforge.attacks import rerandomize_forgery
from ibasforge.group import GroupDescription, gen_cdh_instance, pair
from ibasforge.ibs import Signature, sign, verify
from ibasforge.forking import (
    ADVERSARIES,
    COIN_NONZERO,
    H_EQUAL,
    U_MISMATCH,
    ExtractionFailure,
    Forgery,
    ForkTranscript,
    H1Entry,
    H2Answers,
    KeyedForger,
    ReRandomizingForger,
    SimulationAbort,
    Simulator,
    SimulatorConfig,
    UniversalForger,
    expected_outcome,
    extract_cdh,
    make_adversary,
    run_experiment,
    run_fork,
    run_once,
)

P = 101


class FixedDraws:
    """Stand-in random stream: randrange answers come from a list first."""

    def __init__(self, values, seed=0):
        self.values = list(values)
        self.rng = random.Random(seed)

    def randrange(self, *args):
        if self.values:
            return self.values.pop(0)
        return self.rng.randrange(*args)


def _sim(desc, seed=0, bias=0.5, s2=None):
    inst = gen_cdh_instance(desc, random.Random(seed))
    return Simulator(inst, bias, random.Random(seed + 1), s2=s2)


def test_config_validation():
    for bad in (0, 1, -0.1, 1.5):
        with pytest.raises(ValueError):
            SimulatorConfig(coin_bias=bad)
    cfg = SimulatorConfig()
    assert (cfg.coin_bias, cfg.fork_trials) == (0.5, 200)


def test_sim_h1(big):
    sim = _sim(big)
    q = sim.sim_h1(b"alice")
    assert sim.sim_h1(b"alice") == q
    entry = sim.program_h1(b"bob", 13, 0)
    assert pair(entry.q, big.g) == pair(sim.instance.g_b, big.g) ** entry.t
    entry = sim.program_h1(b"carol", 13, 1)
    assert entry.q == big.g ** 13
    zeros = 0
    for i in range(1000):
        sim.sim_h1(b"id-%d" % i)
        zeros += sim.h1_list[b"id-%d" % i].coin == 0
    assert 0.44 <= zeros / 1000 <= 0.56


def test_sim_h2_indices(big):
    sim = _sim(big)
    h = sim.sim_h2(b"a", b"m")
    assert sim.sim_h2(b"a", b"m") == h
    sim.sim_h2(b"a", b"n")
    assert [e.query_index for e in sim.h2_list.values()] == [0, 1]
    assert all(e.h.value != 0 for e in sim.h2_list.values())


def test_sim_keygen(small, big):
    inst = gen_cdh_instance(small, random.Random(0), a=7, b=9)
    sim = Simulator(inst, 0.5, random.Random(1), s2=11)
    sim.program_h1(b"alice", 13, 1)
    sk = sim.sim_keygen(b"alice")
    assert sk.d1 == sim.pp.g1 ** 13 == small.element(91)
    assert verify(sign(b"hi", sk, sim.pp, random.Random(2)), b"alice", b"hi", sim.pp)
    sim.program_h1(b"bob", 5, 0)
    with pytest.raises(SimulationAbort):
        sim.sim_keygen(b"bob")

    sim = _sim(big, bias=0.3)
    aborts = 0
    for i in range(1000):
        try:
            sim.sim_keygen(b"id-%d" % i)
        except SimulationAbort:
            aborts += 1
    # +-3.5 sigma around 0.3 for n = 1000
    assert 0.249 <= aborts / 1000 <= 0.351


def test_sim_sign_worked(small):
    inst = gen_cdh_instance(small, random.Random(0), a=7, b=9)
    sim = Simulator(inst, 0.5, FixedDraws([6]), s2=11)
    sim.program_h1(b"alice", 13, 1)
    sim.program_h2(b"alice", b"pay Bob", 4)
    sig = sim.sim_sign(b"alice", b"pay Bob")
    assert (6 - 4 * 13) % P == 55
    assert (13 * 11 + 55 * 11) % P == 748 % P == 41
    assert sig == Signature(small.element(55), small.g ** 42, small.element(41))
    assert sig.v == sim.pp.g1 ** 6
    assert verify(sig, b"alice", b"pay Bob", sim.pp)


def test_sim_sign_always_verifies(big):
    sim = _sim(big)
    for i in range(1000):
        ident = b"id-%d" % (i % 37)
        assert verify(sim.sim_sign(ident, b"m%d" % i), ident, b"m%d" % i, sim.pp)
    assert {e.coin for e in sim.h1_list.values()} == {0, 1}


def test_sim_sign_distribution(small):
    inst = gen_cdh_instance(small, random.Random(0))
    sim = Simulator(inst, 0.5, random.Random(1))
    sim_counts = [0] * P
    for i in range(10_000):
        sim_counts[sim.sim_sign(b"alice", b"m%d" % i).u.x] += 1
    assert stats.chisquare(sim_counts).pvalue > 0.001

    # real signatures: U = g^r with r uniform on Z_p^*
    real_counts = [0] * P
    rng = random.Random(2)
    for _ in range(10_000):
        real_counts[(small.g ** small.sample_scalar(rng)).x] += 1
    assert real_counts[0] == 0
    assert stats.chisquare(real_counts[1:]).pvalue > 0.001


@pytest.mark.parametrize("name", ADVERSARIES)
def test_replay_without_reprogramming_is_identical(big, name):
    for seed in range(10):
        cfg = SimulatorConfig(seed=seed)
        inst = gen_cdh_instance(big, random.Random(seed))
        s2 = big.sample_scalar(random.Random(seed + 100))
        tr = run_fork(make_adversary(name, inst, s2), cfg, inst, s2, reprogram=False)
        assert tr.failure is None
        assert tr.sig1 == tr.sig2
        assert tr.sig1.to_json() == tr.sig2.to_json()
        assert tr.h2_prefix_1 == tr.h2_prefix_2


@pytest.mark.parametrize("name", ADVERSARIES)
def test_fork_prefix_property(big, name):
    for seed in range(20):
        inst = gen_cdh_instance(big, random.Random(seed))
        s2 = big.sample_scalar(random.Random(seed + 100))
        tr = run_fork(make_adversary(name, inst, s2), SimulatorConfig(seed=seed), inst, s2)
        assert tr.succeeded
        j = tr.fork_index
        assert tr.h2_prefix_1[:j] == tr.h2_prefix_2[:j]
        assert tr.h2_prefix_1[j] != tr.h2_prefix_2[j]
        assert tr.h1_star == tr.h2_prefix_1[j] and tr.h2_star == tr.h2_prefix_2[j]


def test_keyed_forger_shares_u(big):
    for seed in range(100):
        inst = gen_cdh_instance(big, random.Random(seed))
        s2 = big.sample_scalar(random.Random(seed + 100))
        tr = run_fork(KeyedForger(inst.a, s2), SimulatorConfig(seed=seed), inst, s2)
        assert tr.succeeded and tr.u_equal and tr.h1_star != tr.h2_star


class _Guesser:
    """Outputs a forgery without ever asking H2 about its target."""

    def forge(self, pp, tape, oracles):
        oracles.sign_query(b"x", b"decoy")
        u = pp.g ** pp.desc.sample_scalar(tape)
        return Forgery(b"x", b"guess", Signature(u, u, u))


def test_fork_index_backfilled_when_never_queried(big):
    inst = gen_cdh_instance(big, random.Random(3))
    res = run_once(_Guesser(), SimulatorConfig(seed=3), inst, H2Answers(big.p, random.Random(3)))
    assert res.failure == "invalid-forgery"
    assert res.sim.h2_list[(b"x", b"guess")].query_index == 1


def test_rerandomizing_forger_relation(big):
    inst = gen_cdh_instance(big, random.Random(5))
    s2 = big.sample_scalar(random.Random(6))
    cfg = SimulatorConfig(seed=5)
    inner = KeyedForger(inst.a, s2)

    def answers():
        return H2Answers(big.p, random.Random("fixed"))

    raw = run_once(inner, cfg, inst, answers(), s2)
    wrapped = run_once(ReRandomizingForger(inner), cfg, inst, answers(), s2)
    assert raw.failure is None and wrapped.failure is None
    expect = rerandomize_forgery(raw.forgery.sig, raw.forgery.id, raw.forgery.msg, raw.sim.pp)
    assert wrapped.forgery.sig == expect


def test_universal_forger_never_gives_up(big):
    for seed in range(20):
        inst = gen_cdh_instance(big, random.Random(seed))
        res = run_once(UniversalForger(), SimulatorConfig(seed=seed), inst,
                       H2Answers(big.p, random.Random(seed)))
        assert res.failure is None
        assert (res.forgery.id, res.forgery.msg) not in res.sim.sign_queries


def _worked_transcript(small):
    # a=7, b=9, t*=13 with c*=0: H1(ID*) = (g^9)^13 = g^16, r* = 3
    q = small.element(9 * 13)
    assert q == small.element(16)
    v1, v2 = (7 * (16 * 2 + 3)) % P, (7 * (16 * 5 + 3)) % P
    assert (v1, v2) == (43, 76)
    w = 11 * (16 + 3) % P
    sig1 = Signature(small.element(3), small.element(v1), small.element(w))
    sig2 = Signature(small.element(3), small.element(v2), small.element(w))
    entry = H1Entry(b"alice", small.scalar(13), 0, q)
    return ForkTranscript(fork_index=0, target_id=b"alice", target_msg=b"m", sig1=sig1, sig2=sig2,
                          h1_star=small.scalar(2), h2_star=small.scalar(5), star_entry=entry)


def test_extract_worked(small):
    tr = _worked_transcript(small)
    assert (43 - 76) % P == 68
    assert 63 * 13 * (2 - 5) % P == 68
    assert extract_cdh(tr) == small.element(63)
    assert ForkTranscript.from_json(tr.to_json(), small).sig2 == tr.sig2


def test_extract_failures(small):
    tr = _worked_transcript(small)
    tr.sig2 = Signature(small.element(4), tr.sig2.v, tr.sig2.w)
    with pytest.raises(ExtractionFailure) as e:
        extract_cdh(tr)
    assert e.value.reason == U_MISMATCH

    tr = _worked_transcript(small)
    tr.star_entry = H1Entry(b"alice", small.scalar(13), 1, small.element(13))
    with pytest.raises(ExtractionFailure) as e:
        extract_cdh(tr)
    assert e.value.reason == COIN_NONZERO

    tr = _worked_transcript(small)
    tr.h2_star = tr.h1_star
    with pytest.raises(ExtractionFailure) as e:
        extract_cdh(tr)
    assert e.value.reason == H_EQUAL


def test_experiment_report_shape(big):
    rep = run_experiment("keyed", SimulatorConfig(seed=0), big, trials=20)
    s = rep["summary"]
    assert set(s) >= {"trials", "forks_succeeded", "extractions", "u_mismatches"}
    row = rep["trials"][0]
    assert set(row) >= {"fork_index", "abort_reason", "h1_star", "h2_star", "u_equal",
                        "extraction", "witness_match"}
    assert expected_outcome(rep)
    assert run_experiment("keyed", SimulatorConfig(seed=0), big, trials=20) == rep


def test_small_modulus_experiment():
    # h1* == h2* happens at p=101 about 1% of the time; it must be recorded, not extracted
    rep = run_experiment("keyed", SimulatorConfig(seed=0), GroupDescription(101), trials=300)
    modes = {r["abort_reason"] for r in rep["trials"]}
    assert modes <= {None, "h-collision"}
    assert all(r["witness_match"] for r in rep["trials"] if r["extraction"] == "success")


def test_unknown_adversary(big):
    inst = gen_cdh_instance(big, random.Random(0))
    with pytest.raises(ValueError):
        make_adversary("nope", inst, big.scalar(3))

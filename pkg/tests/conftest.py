import json
import pathlib
import random
import sys

import pytest

from ibasforge.group import GroupDescription
from ibasforge.ibs import gen_key, setup
from ibasforge.oracles import HashOracle, load_fixtures

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "p101.json"


def egcd_inverse(x, p):
    """Modular inverse by the extended Euclidean algorithm (independent of pow(x, -1, p))."""
    old_r, r = x % p, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1
    return old_s % p


@pytest.fixture
def small():
    return GroupDescription(101)


@pytest.fixture
def big():
    return GroupDescription()


@pytest.fixture
def fixture_oracle(small):
    oracle = HashOracle(small)
    load_fixtures(oracle, json.loads(FIXTURES.read_text()))
    return oracle


@pytest.fixture
def worked(small, fixture_oracle):
    """p=101 world: H1(alice)=g^13, s1=7, s2=11."""
    pp, mk = setup(small, random.Random(0), fixture_oracle, s1=7, s2=11)
    return pp, mk, gen_key(b"alice", mk, pp)


@pytest.fixture
def world(big):
    pp, mk = setup(big, random.Random(2024))
    return pp, mk


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

"""Command-line front end.  Every subcommand reads and writes JSON.

Exit codes: 0 success (and, for verify-style commands, accept; for attack
demos, the expected outcome), 1 ran fine but rejected / unexpected outcome,
2 malformed input, 3 domain error such as a hash collision.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import attacks, forking, ibas, ibs, patched
from .group import DEFAULT_MODULUS, CdhInstance, GroupDescription, GroupError, NonInvertible
from .oracles import HashOracle, load_fixtures

EXIT_OK, EXIT_REJECT, EXIT_MALFORMED, EXIT_DOMAIN = 0, 1, 2, 3


class Malformed(Exception):
    pass


def _read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise Malformed(f"cannot read JSON from {path or 'stdin'}: {e}") from e


def _emit(obj, args):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)


def _load_params(args, need_master=False):
    doc = _read_json(args.params)
    pp = ibs.PublicParams.from_json(doc.get("params", doc))
    if args.fixtures:
        load_fixtures(pp.oracle, _read_json(args.fixtures))
    mk = None
    if "master_key" in doc:
        mk = ibs.MasterKey.from_json(doc["master_key"], pp.desc)
    elif need_master:
        raise Malformed("this command needs the master key written by `setup`")
    return pp, mk


def _record(ident: bytes, msg: bytes, sig: ibs.Signature, scheme: str) -> dict:
    d = {"id": ident.hex(), "msg": msg.hex(), "scheme": scheme}
    d.update(sig.to_json())
    return d


def _text(s: str) -> bytes:
    return s.encode()


def _rng(args) -> random.Random:
    return random.Random(args.seed)


def cmd_setup(args):
    desc = GroupDescription(args.modulus)
    oracle = HashOracle(desc)
    if args.fixtures:
        load_fixtures(oracle, _read_json(args.fixtures))
    pp, mk = ibs.setup(desc, _rng(args), oracle, s1=args.s1, s2=args.s2)
    _emit({"params": pp.to_json(), "master_key": mk.to_json()}, args)
    return EXIT_OK


def cmd_keygen(args):
    pp, mk = _load_params(args, need_master=True)
    _emit(ibs.gen_key(_text(args.id), mk, pp).to_json(), args)
    return EXIT_OK


def cmd_sign(args):
    pp, _ = _load_params(args)
    sk = ibs.PrivateKey.from_json(_read_json(args.key), pp.desc)
    msg = _text(args.msg)
    signer = patched.patched_sign if args.scheme == "patched" else ibs.sign
    sig = signer(msg, sk, pp, _rng(args), r=args.r)
    _emit(_record(sk.id, msg, sig, args.scheme), args)
    return EXIT_OK


def _load_record(args, pp):
    doc = _read_json(args.input)
    sig = ibs.Signature.from_json(doc, pp.desc)
    ident = _text(args.id) if args.id else bytes.fromhex(doc["id"])
    msg = _text(args.msg) if args.msg else bytes.fromhex(doc["msg"])
    return doc, ident, msg, sig


def _decision(ok: bool, args, extra=None) -> int:
    out = {"decision": "accept" if ok else "reject"}
    out.update(extra or {})
    _emit(out, args)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_verify(args):
    pp, _ = _load_params(args)
    doc, ident, msg, sig = _load_record(args, pp)
    scheme = args.scheme or doc.get("scheme", "original")
    check = patched.patched_verify if scheme == "patched" else ibs.verify
    return _decision(check(sig, ident, msg, pp), args, {"scheme": scheme})


def _as_aggregate(doc, pp):
    if "entries" in doc:
        return ibas.AggregateSignature.from_json(doc, pp.desc)
    sig = ibs.Signature.from_json(doc, pp.desc)
    return ibas.singleton(sig, bytes.fromhex(doc["id"]), bytes.fromhex(doc["msg"]))


def cmd_aggregate(args):
    pp, _ = _load_params(args)
    parts = [_as_aggregate(_read_json(path), pp) for path in args.inputs]
    _emit(ibas.aggregate_all(parts, pp).to_json(), args)
    return EXIT_OK


def cmd_aggverify(args):
    pp, _ = _load_params(args)
    agg = _as_aggregate(_read_json(args.input), pp)
    return _decision(ibas.agg_verify(agg, pp), args, {"entries": len(agg.entries)})


def cmd_rerandomize(args):
    pp, _ = _load_params(args)
    doc, ident, msg, sig = _load_record(args, pp)
    r_prime = pp.desc.sample_scalar(_rng(args)) if args.r_prime is None else pp.desc.scalar(args.r_prime)
    out = _record(ident, msg, ibs.rerandomize(sig, r_prime, pp), doc.get("scheme", "original"))
    out["r_prime"] = r_prime.encode()
    _emit(out, args)
    return EXIT_OK


def _query_pair(args, pp, mk, rng):
    """Two signatures on (id, msg1), (id, msg2): from files or from the signing oracle."""
    ident, m1, m2 = _text(args.id), _text(args.msg1), _text(args.msg2)
    if args.sig1 and args.sig2:
        s1 = ibs.Signature.from_json(_read_json(args.sig1), pp.desc)
        s2 = ibs.Signature.from_json(_read_json(args.sig2), pp.desc)
        return ident, m1, s1, m2, s2
    if mk is None:
        raise Malformed("pass --sig1/--sig2 or a params file with the master key")
    sk = ibs.gen_key(ident, mk, pp)
    return ident, m1, ibs.sign(m1, sk, pp, rng, r=args.r1), m2, ibs.sign(m2, sk, pp, rng, r=args.r2)


def cmd_forge(args):
    pp, mk = _load_params(args)
    rng = _rng(args)
    ident, m1, s1, m2, s2 = _query_pair(args, pp, mk, rng)
    res = attacks.universal_forge(s1, m1, s2, m2, ident, _text(args.target), pp)
    out = res.to_json()
    out["scheme"] = "original"
    ok = ibs.verify(res.sig, res.target_id, res.target_msg, pp)
    out["verifies"] = ok
    _emit(out, args)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_forge_agg(args):
    pp, mk = _load_params(args, need_master=True)
    rng = _rng(args)
    ident, m1, s1, m2, s2 = _query_pair(args, pp, mk, rng)
    cosigners = []
    for i in range(args.cosigners):
        sk = ibs.gen_key(b"cosigner-%d" % i, mk, pp)
        cosigners.append((sk, b"honest-%d-%08x" % (i, rng.getrandbits(32))))
    agg = attacks.aggregate_forge(s1, m1, s2, m2, ident, _text(args.target), cosigners, pp, rng)
    ok = ibas.agg_verify(agg, pp)
    out = agg.to_json()
    out["decision"] = "accept" if ok else "reject"
    _emit(out, args)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_fork_demo(args):
    desc = GroupDescription(args.modulus)
    cfg = forking.SimulatorConfig(coin_bias=args.delta, fork_trials=args.trials, seed=args.seed)
    report = forking.run_experiment(args.adversary, cfg, desc)
    report["summary"]["expected_outcome"] = forking.expected_outcome(report)
    if not args.per_trial:
        report.pop("trials")
    _emit(report, args)
    return EXIT_OK if report["summary"]["expected_outcome"] else EXIT_REJECT


def cmd_break_patched_agg(args):
    desc = GroupDescription(args.modulus)
    rng = _rng(args)
    pp, mk = ibs.setup(desc, rng)
    keys, pairs, sigs = [], [], []
    for i in range(args.k):
        sk = ibs.gen_key(b"signer-%d" % i, mk, pp)
        msg = b"msg-%d-%08x" % (i, rng.getrandbits(32))
        keys.append(sk)
        pairs.append((sk.id, msg))
        sigs.append(patched.patched_sign(msg, sk, pp, rng))
    report = patched.demonstrate_aggregation_break(sigs, pairs, pp, keys, rng)
    ok = report["individual_signatures_valid"]
    if args.k >= 2:
        ok = ok and not report["naive_aggregate_accepts"] and "exhibit" in report
    _emit(report, args)
    return EXIT_OK if ok else EXIT_REJECT


def cmd_extract(args):
    doc = _read_json(args.input)
    instance = CdhInstance.from_json(doc["instance"])
    tr = forking.ForkTranscript.from_json(doc["transcript"], instance.desc)
    try:
        got = forking.extract_cdh(tr)
    except forking.ExtractionFailure as e:
        _emit({"extraction": e.reason}, args)
        return EXIT_REJECT
    match = got == instance.solution
    _emit({"extraction": "success", "element": got.encode(), "witness_match": match}, args)
    return EXIT_OK if match else EXIT_REJECT


def _env_int(name, default):
    v = os.environ.get(name)
    return int(v) if v not in (None, "") else default


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env_int("IBAS_SEED", 0))
    common.add_argument("--modulus", type=int, default=_env_int("IBAS_MODULUS", DEFAULT_MODULUS))
    common.add_argument("--fixtures", help="JSON file of H1/H2 oracle tables")
    common.add_argument("--out", help="output file (default: stdout)")

    with_params = argparse.ArgumentParser(add_help=False)
    with_params.add_argument("--params", default="setup.json", help="output of `setup`")

    parser = argparse.ArgumentParser(prog="ibasforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", parents=[common])
    p.add_argument("--s1", type=int)
    p.add_argument("--s2", type=int)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("keygen", parents=[common, with_params])
    p.add_argument("--id", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", parents=[common, with_params])
    p.add_argument("--key", default="key.json")
    p.add_argument("--msg", required=True)
    p.add_argument("--r", type=int, help="fix the signing randomness")
    p.add_argument("--scheme", choices=("original", "patched"), default="original")
    p.set_defaults(func=cmd_sign)

    for name, func in (("verify", cmd_verify), ("rerandomize", cmd_rerandomize)):
        p = sub.add_parser(name, parents=[common, with_params])
        p.add_argument("--in", dest="input", default="-")
        p.add_argument("--id", help="override the record's identity")
        p.add_argument("--msg", help="override the record's message")
        if name == "verify":
            p.add_argument("--scheme", choices=("original", "patched"))
        else:
            p.add_argument("--r-prime", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("aggregate", parents=[common, with_params])
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("aggverify", parents=[common, with_params])
    p.add_argument("--in", dest="input", default="-")
    p.set_defaults(func=cmd_aggverify)

    for name, func in (("forge", cmd_forge), ("forge-agg", cmd_forge_agg)):
        p = sub.add_parser(name, parents=[common, with_params])
        p.add_argument("--id", required=True)
        p.add_argument("--msg1", required=True)
        p.add_argument("--msg2", required=True)
        p.add_argument("--target", required=True)
        p.add_argument("--sig1")
        p.add_argument("--sig2")
        p.add_argument("--r1", type=int)
        p.add_argument("--r2", type=int)
        if name == "forge-agg":
            p.add_argument("--cosigners", type=int, default=3)
        p.set_defaults(func=func)

    p = sub.add_parser("fork-demo", parents=[common])
    p.add_argument("--adversary", choices=forking.ADVERSARIES, default="rerand")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--delta", type=float, default=0.5, help="Pr[c = 0]")
    p.add_argument("--per-trial", action="store_true", help="include per-trial rows")
    p.set_defaults(func=cmd_fork_demo)

    p = sub.add_parser("break-patched-agg", parents=[common])
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(func=cmd_break_patched_agg)

    p = sub.add_parser("extract", parents=[common])
    p.add_argument("--in", dest="input", default="-")
    p.set_defaults(func=cmd_extract)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (attacks.AttackError, forking.SimulationAbort, NonInvertible) as e:
        print(json.dumps({"error": type(e).__name__, "reason": str(e)}), file=sys.stderr)
        return EXIT_DOMAIN
    except (Malformed, GroupError, KeyError, ValueError, TypeError) as e:
        print(f"ibasforge: malformed input: {e}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())

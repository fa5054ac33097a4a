"""Attack workbench for a pairing-based IBS/IBAS scheme over a transparent bilinear group."""

from .group import (
    DEFAULT_MODULUS,
    CdhInstance,
    GroupDescription,
    GroupElement,
    Scalar,
    TargetElement,
    gen_cdh_instance,
    pair,
    sample_scalar,
)
from .ibs import MasterKey, PrivateKey, PublicParams, Signature, gen_key, rerandomize, setup, sign, verify
from .ibas import AggregateSignature, agg_verify, aggregate, empty_aggregate, singleton
from .attacks import HashCollision, rerandomize_forgery, solve_delta, universal_forge, aggregate_forge
from .patched import demonstrate_aggregation_break, patched_sign, patched_verify

__version__ = "0.1.0"

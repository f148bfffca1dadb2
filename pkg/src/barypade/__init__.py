"""Barycentric Padé approximants and adversarial functions with certified spurious poles."""

from .errors import (
    AlphaOnNode,
    BaryPadeError,
    BlockOverlap,
    DegenerateSystem,
    DegreeZero,
    DerivativeUnderflow,
    InsufficientTruncation,
    NodeCollision,
    NoPole,
    NonConvergence,
    PlanError,
    PoleHit,
    SearchExhausted,
    ZeroWeightWarning,
)
from .numkernel import DEFAULT, Poly, Precision, Series
from .pade import BaryRational, NodeLevel, approximant
from .adversary import AdversaryPlan, ExplicitEpsilon, GeometricEpsilon, LevelSpec, SearchSettings, Tolerances
from .search import CertificateBundle, PoleCertificate, search_mu, verify_certificate

__version__ = "0.1.0"

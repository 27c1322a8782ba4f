"""Models for OrderForge."""

from src.models.batch import BatchCase, BatchResult
from src.models.braid import BraidWord, FdtcProvenance, FdtcRecord, QuasipositiveDecomposition
from src.models.certificate import Certificate, Verdict
from src.models.circle_map import PLCircleMap, RotationNumber
from src.models.circular_order import CircularOrder, GroupCircularOrder, OrderAutomorphism
from src.models.complex import CocycleData, Presentation2Complex
from src.models.knot import EvenContinuedFraction, LaurentPoly, Orientation
from src.models.tree import CyclicOrderTree, NodeKind

__all__ = [
    "BatchCase",
    "BatchResult",
    "BraidWord",
    "FdtcProvenance",
    "FdtcRecord",
    "QuasipositiveDecomposition",
    "Certificate",
    "Verdict",
    "PLCircleMap",
    "RotationNumber",
    "CircularOrder",
    "GroupCircularOrder",
    "OrderAutomorphism",
    "CocycleData",
    "Presentation2Complex",
    "EvenContinuedFraction",
    "LaurentPoly",
    "Orientation",
    "CyclicOrderTree",
    "NodeKind",
]

"""Circular order models on finite sets."""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional, Union

ElementId = Union[int, str]


def element_sort_key(element: ElementId) -> tuple:
    """Sort integers before strings, each in natural order."""
    if isinstance(element, bool) or not isinstance(element, (int, str)):
        raise TypeError(f"Element ids must be int or str, got {element!r}")
    return (1, element) if isinstance(element, str) else (0, element)


def permutation_sign(items: tuple) -> int:
    """Sign of the permutation sorting three comparable keys."""
    inversions = 0
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class CircularOrder:
    """
    A circular order c: E^3 -> {-1, 0, 1} on a finite set.

    Stored canonically: elements sorted by id and one sign per index triple
    i < j < k, in lexicographic order of the triples.
    """

    elements: tuple[ElementId, ...]
    signs: tuple[int, ...] = field(repr=False)

    @cached_property
    def position(self) -> dict[ElementId, int]:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def _sign_table(self) -> dict[tuple[int, int, int], int]:
        triples = combinations(range(len(self.elements)), 3)
        return dict(zip(triples, self.signs))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, element: ElementId) -> bool:
        return element in self.position

    def value(self, e1: ElementId, e2: ElementId, e3: ElementId) -> int:
        """Evaluate c(e1, e2, e3)."""
        if e1 == e2 or e2 == e3 or e1 == e3:
            return 0
        try:
            idx = (self.position[e1], self.position[e2], self.position[e3])
        except KeyError as e:
            raise KeyError(f"Element {e} is not in this circular order") from None
        return permutation_sign(idx) * self._sign_table[tuple(sorted(idx))]

    def to_listing(self, start: Optional[ElementId] = None) -> tuple[ElementId, ...]:
        """Cyclic listing of the elements beginning at `start` (default: first element)."""
        if not self.elements:
            return ()
        first = self.elements[0] if start is None else start
        if first not in self.position:
            raise KeyError(f"Element {first} is not in this circular order")
        rest = [e for e in self.elements if e != first]
        if len(rest) < 2:
            return (first, *rest)

        # e1 precedes e2 after `first` iff c(first, e1, e2) = 1
        ordered: list[ElementId] = []
        for e in rest:
            lo, hi = 0, len(ordered)
            while lo < hi:
                mid = (lo + hi) // 2
                if self.value(first, ordered[mid], e) == 1:
                    lo = mid + 1
                else:
                    hi = mid
            ordered.insert(lo, e)
        return (first, *ordered)

    def triples(self) -> list[tuple[ElementId, ElementId, ElementId, int]]:
        """Signed triples in canonical lexicographic order."""
        return [
            (self.elements[i], self.elements[j], self.elements[k], sign)
            for (i, j, k), sign in self._sign_table.items()
        ]

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "elements": list(self.elements),
            "triples": [list(t) for t in self.triples()],
        }


@dataclass
class RawOrderTable:
    """An unvalidated table of values c(e1, e2, e3) as read from a file."""

    elements: list[ElementId]
    entries: dict[tuple[ElementId, ElementId, ElementId], int] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RawOrderTable":
        """Parse `{"elements": [...], "triples": [[a, b, c, sign], ...]}`."""
        entries: dict[tuple, int] = {}
        for row in data.get("triples", []):
            if len(row) != 4:
                raise ValueError(f"Triple rows need four entries, got {row!r}")
            a, b, c, sign = row
            entries[(a, b, c)] = int(sign)
        return cls(elements=list(data.get("elements", [])), entries=entries)


@dataclass
class OrderCheck:
    """Outcome of validating a circular order or raw table."""

    valid: bool
    failure: Optional[str] = None
    witness: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "failure": self.failure,
            "witness": list(self.witness) if self.witness is not None else None,
        }


@dataclass(frozen=True)
class OrderAutomorphism:
    """A permutation of the elements of a circular order, given by images of `domain`."""

    domain: tuple[ElementId, ...]
    images: tuple[ElementId, ...]

    @cached_property
    def mapping(self) -> dict[ElementId, ElementId]:
        return dict(zip(self.domain, self.images))

    @property
    def label(self) -> str:
        return "[" + " ".join(str(e) for e in self.images) + "]"

    def __call__(self, element: ElementId) -> ElementId:
        return self.mapping[element]

    def compose(self, other: "OrderAutomorphism") -> "OrderAutomorphism":
        """Return self after other."""
        return OrderAutomorphism(self.domain, tuple(self(other(e)) for e in self.domain))

    def inverse(self) -> "OrderAutomorphism":
        back = {image: e for e, image in self.mapping.items()}
        return OrderAutomorphism(self.domain, tuple(back[e] for e in self.domain))

    def is_identity(self) -> bool:
        return self.domain == self.images

    @classmethod
    def identity(cls, domain: tuple[ElementId, ...]) -> "OrderAutomorphism":
        return cls(domain, domain)

    def to_dict(self) -> dict:
        return {"domain": list(self.domain), "images": list(self.images)}


@dataclass
class GroupCircularOrder:
    """A circular order on a finite group of order automorphisms."""

    basepoint: ElementId
    automorphisms: list[OrderAutomorphism]
    order: CircularOrder
    stabilizer_size: int = 1

    def by_label(self) -> dict[str, OrderAutomorphism]:
        return {g.label: g for g in self.automorphisms}

    def to_dict(self) -> dict:
        return {
            "basepoint": self.basepoint,
            "group_order": len(self.automorphisms),
            "stabilizer_size": self.stabilizer_size,
            "listing": list(self.order.to_listing()),
            "order": self.order.to_dict(),
        }

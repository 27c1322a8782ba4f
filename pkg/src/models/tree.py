"""Cyclically ordered order-tree models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from src.models.circular_order import ElementId


class NodeKind(str, Enum):
    REGULAR = "regular"
    CATACLYSM_TOP = "cataclysm-top"
    LEAF = "leaf"


@dataclass
class Cataclysm:
    """A cluster of two or more top nodes sitting above a common stem node."""

    cluster_id: str
    stem: str
    tops: list[str]
    order: Optional[list[str]] = None

    @classmethod
    def from_dict(cls, cluster_id: str, data: dict) -> "Cataclysm":
        return cls(
            cluster_id=cluster_id,
            stem=str(data["stem"]),
            tops=[str(t) for t in data.get("tops", [])],
            order=[str(g) for g in data["order"]] if data.get("order") else None,
        )

    def to_dict(self) -> dict:
        result = {"stem": self.stem, "tops": list(self.tops)}
        if self.order is not None:
            result["order"] = list(self.order)
        return result


@dataclass
class CyclicOrderTree:
    """
    A finite order tree with local circular orders.

    `orders` holds, per node, a cyclic listing of the germs at that node. A
    germ is a neighbouring node id, or the cluster id when the segment runs
    through a cataclysm.
    """

    nodes: dict[str, NodeKind]
    edges: list[tuple[str, str]]
    orders: dict[str, list[str]] = field(default_factory=dict)
    clusters: dict[str, Cataclysm] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "CyclicOrderTree":
        """Parse the JSON/YAML tree format."""
        raw_nodes = data.get("nodes", {})
        if isinstance(raw_nodes, list):
            raw_nodes = {str(n["id"]): n.get("tag", "regular") for n in raw_nodes}
        nodes = {str(k): NodeKind(v) for k, v in raw_nodes.items()}
        edges = [(str(a), str(b)) for a, b in data.get("edges", [])]
        orders = {str(k): [str(g) for g in v] for k, v in data.get("orders", {}).items()}
        clusters = {
            str(cid): Cataclysm.from_dict(str(cid), cdata)
            for cid, cdata in data.get("clusters", {}).items()
        }
        return cls(nodes=nodes, edges=edges, orders=orders, clusters=clusters)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "nodes": {k: v.value for k, v in sorted(self.nodes.items())},
            "edges": [list(e) for e in self.edges],
            "orders": {k: list(v) for k, v in sorted(self.orders.items())},
            "clusters": {k: c.to_dict() for k, c in sorted(self.clusters.items())},
        }


@dataclass(frozen=True)
class Segment:
    """A segment of a spine, possibly running through the stem of a cataclysm."""

    start: str
    end: str
    via: Optional[str] = None

    def to_dict(self) -> dict:
        result = {"segment": [self.start, self.end]}
        if self.via is not None:
            result["via"] = self.via
        return result


@dataclass(frozen=True)
class CuspJump:
    """A jump between two top nodes of one cataclysm."""

    cluster_id: str
    start: str
    end: str

    @property
    def cusp(self) -> frozenset[str]:
        return frozenset((self.start, self.end))

    def to_dict(self) -> dict:
        return {"cusp": sorted(self.cusp), "cluster": self.cluster_id}


SpineStep = Union[Segment, CuspJump]


@dataclass
class SpinePath:
    """A geodesic spine: segments and cusp jumps from `start` to `end`."""

    start: str
    end: str
    steps: list[SpineStep] = field(default_factory=list)

    def is_connected(self) -> bool:
        """Consecutive steps share an endpoint or meet across a cusp."""
        here = self.start
        for step in self.steps:
            if step.start != here:
                return False
            here = step.end
        return here == self.end

    def cusp_jumps(self) -> list[CuspJump]:
        return [s for s in self.steps if isinstance(s, CuspJump)]

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "steps": [s.to_dict() for s in self.steps],
        }


@dataclass(frozen=True)
class BranchLocus:
    """Where the spine from y to x diverges from the spine from y to z."""

    node: Optional[str] = None
    cusp: Optional[frozenset[str]] = None
    cluster_id: Optional[str] = None

    @property
    def is_cusp(self) -> bool:
        return self.cusp is not None

    def to_dict(self) -> dict:
        if self.cusp is not None:
            return {"cusp": sorted(self.cusp), "cluster": self.cluster_id}
        return {"node": self.node, "cluster": self.cluster_id}


@dataclass
class AutomorphismCheck:
    """Result of testing a node bijection against the tree structure."""

    preserved: bool
    leaf_map: dict[ElementId, ElementId] = field(default_factory=dict)
    failure: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "preserved": self.preserved,
            "leaf_map": dict(sorted(self.leaf_map.items())),
            "failure": self.failure,
        }

"""Spines, branch loci and end orders of finite cyclically ordered order trees."""

import logging
from collections import deque
from pathlib import Path
from typing import Optional

import yaml

from src.errors import InvalidInputError, PreconditionError
from src.models.circular_order import CircularOrder
from src.models.tree import (
    AutomorphismCheck,
    BranchLocus,
    CuspJump,
    CyclicOrderTree,
    NodeKind,
    Segment,
    SpinePath,
)
from src.services.circord import from_cyclic_listing, from_signs

logger = logging.getLogger(__name__)


class TreeSkeleton:
    """
    The auxiliary graph of a tree: real nodes plus one virtual node per
    cataclysm, joined to its stem and to each of its tops.

    Germs at a node are exactly its neighbours in this graph.
    """

    def __init__(self, tree: CyclicOrderTree):
        """
        Validate the tree and index it for path queries.

        Args:
            tree: Tree to index.

        Raises:
            InvalidInputError: If the tree violates a structural invariant.
        """
        self.tree = tree
        self.virtual = set(tree.clusters)
        self.adjacency: dict[str, list[str]] = {v: [] for v in tree.nodes}
        self._validate_ids()
        for cid in tree.clusters:
            self.adjacency[cid] = []

        seen_edges = set()
        for i, (a, b) in enumerate(tree.edges):
            for v in (a, b):
                if v not in tree.nodes:
                    raise InvalidInputError(
                        f"Edge ({a}, {b}) references unknown node {v}", location=("edges", i)
                    )
            key = frozenset((a, b))
            if a == b or key in seen_edges:
                raise InvalidInputError(
                    f"Edge ({a}, {b}) is a loop or duplicate", location=("edges", i)
                )
            seen_edges.add(key)
            self.adjacency[a].append(b)
            self.adjacency[b].append(a)

        self._attach_clusters()
        self._check_tree()
        self._check_tags()
        self._local: dict[str, CircularOrder] = {}
        self._check_orders()
        self._root()

    def _validate_ids(self) -> None:
        clash = set(self.tree.nodes) & self.virtual
        if clash:
            raise InvalidInputError(f"Cluster ids clash with node ids: {sorted(clash)}")

    def _attach_clusters(self) -> None:
        owner: dict[str, str] = {}
        for cid, cluster in self.tree.clusters.items():
            if cluster.stem not in self.tree.nodes:
                raise InvalidInputError(
                    f"Cluster {cid} has unknown stem {cluster.stem}",
                    location=("clusters", cid, "stem"),
                )
            if len(cluster.tops) < 2:
                raise InvalidInputError(
                    f"Cluster {cid} needs two or more tops", location=("clusters", cid, "tops")
                )
            if len(set(cluster.tops)) != len(cluster.tops) or cluster.stem in cluster.tops:
                raise InvalidInputError(
                    f"Cluster {cid} repeats a node among stem and tops", location=("clusters", cid)
                )
            for top in cluster.tops:
                if self.tree.nodes.get(top) != NodeKind.CATACLYSM_TOP:
                    raise InvalidInputError(
                        f"Top {top} of cluster {cid} is not a cataclysm-top",
                        location=("nodes", top),
                    )
                if top in owner:
                    raise InvalidInputError(
                        f"Top {top} belongs to clusters {owner[top]} and {cid}",
                        location=("clusters", cid, "tops"),
                    )
                owner[top] = cid
            self.adjacency[cid].append(cluster.stem)
            self.adjacency[cluster.stem].append(cid)
            for top in cluster.tops:
                self.adjacency[cid].append(top)
                self.adjacency[top].append(cid)
        for node, kind in self.tree.nodes.items():
            if kind == NodeKind.CATACLYSM_TOP and node not in owner:
                raise InvalidInputError(
                    f"Cataclysm-top {node} belongs to no cluster", location=("nodes", node)
                )

    def _check_tree(self) -> None:
        vertices = list(self.adjacency)
        if not vertices:
            raise InvalidInputError("Tree has no nodes")
        edge_count = sum(len(n) for n in self.adjacency.values()) // 2
        if edge_count != len(vertices) - 1:
            raise InvalidInputError("Tree contains a cycle once cataclysms are contracted")
        reached = {vertices[0]}
        queue = deque([vertices[0]])
        while queue:
            for nxt in self.adjacency[queue.popleft()]:
                if nxt not in reached:
                    reached.add(nxt)
                    queue.append(nxt)
        if len(reached) != len(vertices):
            missing = sorted(set(vertices) - reached)[:5]
            raise InvalidInputError(f"Tree is disconnected; unreachable: {missing}")

    def _check_tags(self) -> None:
        for node, kind in self.tree.nodes.items():
            degree = len(self.adjacency[node])
            if kind == NodeKind.CATACLYSM_TOP:
                if degree < 2:
                    raise InvalidInputError(
                        f"Cataclysm-top {node} has no segment above it", location=("nodes", node)
                    )
            elif (degree == 1) != (kind == NodeKind.LEAF) and len(self.tree.nodes) > 1:
                raise InvalidInputError(
                    f"Node {node} of degree {degree} is tagged {kind.value}",
                    location=("nodes", node),
                )

    def _check_orders(self) -> None:
        for owner, listing in self.tree.orders.items():
            if owner not in self.tree.nodes:
                raise InvalidInputError(
                    f"Local order given for unknown node {owner}", location=("orders", owner)
                )
            self._local[owner] = self._order_for(owner, listing, ("orders", owner))
        for cid, cluster in self.tree.clusters.items():
            if cluster.order is not None:
                self._local[cid] = self._order_for(cid, cluster.order, ("clusters", cid, "order"))

    def _order_for(self, owner: str, listing: list[str], location: tuple) -> CircularOrder:
        germs = self.adjacency[owner]
        if sorted(listing) != sorted(germs):
            raise InvalidInputError(
                f"Local order at {owner} lists {sorted(listing)} but its germs are {sorted(germs)}",
                location=location,
            )
        if len(germs) < 3:
            raise InvalidInputError(
                f"Local order at {owner} needs three or more germs", location=location
            )
        return from_cyclic_listing(listing)

    def _root(self) -> None:
        root = min(self.tree.nodes)
        self.parent: dict[str, Optional[str]] = {root: None}
        self.depth: dict[str, int] = {root: 0}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            # neighbours in serialized order
            for nxt in self.adjacency[v]:
                if nxt not in self.depth:
                    self.parent[nxt] = v
                    self.depth[nxt] = self.depth[v] + 1
                    queue.append(nxt)

    def require(self, *nodes: str) -> None:
        for v in nodes:
            if v not in self.tree.nodes:
                raise InvalidInputError(f"Unknown node {v}")

    def path(self, u: str, v: str) -> list[str]:
        """Vertex path from u to v in the auxiliary graph."""
        left, right = [u], [v]
        a, b = u, v
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
            left.append(a)
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
            right.append(b)
        while a != b:
            a, b = self.parent[a], self.parent[b]
            left.append(a)
            right.append(b)
        return left + right[-2::-1]

    def lca(self, u: str, v: str) -> str:
        while self.depth[u] > self.depth[v]:
            u = self.parent[u]
        while self.depth[v] > self.depth[u]:
            v = self.parent[v]
        while u != v:
            u, v = self.parent[u], self.parent[v]
        return u

    def median(self, x: str, y: str, z: str) -> str:
        candidates = (self.lca(x, y), self.lca(y, z), self.lca(x, z))
        return max(candidates, key=lambda v: self.depth[v])

    def germ_toward(self, v: str, target: str) -> str:
        """The neighbour of v on the path to target."""
        return self.path(v, target)[1]

    def has_local_order(self, owner: str) -> bool:
        return owner in self._local

    def local_order(self, owner: str) -> CircularOrder:
        if owner not in self._local:
            what = "Cluster" if owner in self.virtual else "Node"
            location = ("clusters", owner) if owner in self.virtual else ("nodes", owner)
            raise InvalidInputError(
                f"{what} {owner} needs a local circular order", location=location
            )
        return self._local[owner]

    def stem_of(self, cid: str) -> str:
        return self.tree.clusters[cid].stem


def load_tree(path: Path) -> CyclicOrderTree:
    """Load a tree from a JSON or YAML file."""
    with open(path) as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path}: expected a mapping at top level")
    try:
        return CyclicOrderTree.from_dict(data)
    except (KeyError, ValueError, TypeError) as e:
        raise InvalidInputError(f"{path}: malformed tree: {e}") from e


def leaves(t: CyclicOrderTree) -> list[str]:
    return sorted(v for v, kind in t.nodes.items() if kind == NodeKind.LEAF)


def germs(t: CyclicOrderTree, v: str) -> list[str]:
    """Segment germs at node v (neighbour ids, cluster ids through cataclysms)."""
    skeleton = TreeSkeleton(t)
    skeleton.require(v)
    return list(skeleton.adjacency[v])


def geodesic_spine(t: CyclicOrderTree, x: str, y: str) -> SpinePath:
    """
    The geodesic spine from x to y.

    Crossing a cataclysm between two of its tops is recorded as a cusp jump;
    entering a top from the stem is a single segment through the cluster.
    """
    skeleton = TreeSkeleton(t)
    skeleton.require(x, y)
    return _spine(skeleton, x, y)


def _spine(skeleton: TreeSkeleton, x: str, y: str) -> SpinePath:
    route = skeleton.path(x, y)
    steps = []
    i = 0
    while i < len(route) - 1:
        nxt = route[i + 1]
        if nxt in skeleton.virtual:
            a, b = route[i], route[i + 2]
            stem = skeleton.stem_of(nxt)
            if a != stem and b != stem:
                steps.append(CuspJump(cluster_id=nxt, start=a, end=b))
            else:
                steps.append(Segment(a, b, via=nxt))
            i += 2
        else:
            steps.append(Segment(route[i], nxt))
            i += 1
    return SpinePath(start=x, end=y, steps=steps)


def branch_locus(t: CyclicOrderTree, x: str, y: str, z: str) -> BranchLocus:
    """
    Where the spine from y to x diverges from the spine from y to z.

    Raises:
        InvalidInputError: If the nodes are not distinct or unknown.
    """
    skeleton = TreeSkeleton(t)
    return _branch_locus(skeleton, x, y, z)


def _branch_locus(skeleton: TreeSkeleton, x: str, y: str, z: str) -> BranchLocus:
    if len({x, y, z}) != 3:
        raise InvalidInputError(f"Branch locus needs distinct nodes, got ({x}, {y}, {z})")
    skeleton.require(x, y, z)
    m = skeleton.median(x, y, z)
    if m not in skeleton.virtual:
        return BranchLocus(node=m)
    from_y = skeleton.germ_toward(m, y)
    if from_y == skeleton.stem_of(m):
        cusp = frozenset((skeleton.germ_toward(m, x), skeleton.germ_toward(m, z)))
        return BranchLocus(cusp=cusp, cluster_id=m)
    return BranchLocus(node=from_y, cluster_id=m)


def end_case(t: CyclicOrderTree, e1: str, e2: str, e3: str) -> str:
    """Classify a leaf triple as 'vertex', 'three-point cataclysm' or 'two-point cataclysm'."""
    skeleton = TreeSkeleton(t)
    loci = [
        _branch_locus(skeleton, e3, e1, e2),
        _branch_locus(skeleton, e1, e2, e3),
        _branch_locus(skeleton, e2, e3, e1),
    ]
    if any(locus.is_cusp for locus in loci):
        return "two-point cataclysm"
    if loci[0].cluster_id is not None:
        return "three-point cataclysm"
    return "vertex"


def end_circular_order(t: CyclicOrderTree) -> CircularOrder:
    """
    Circular order on the ends (leaves) of a tree.

    For a leaf triple, the local order at the branch vertex, or at the
    cataclysm containing the branch loci, is read on the initial germs of
    the spines toward each leaf.

    Raises:
        PreconditionError: If the tree has fewer than three leaves.
        InvalidInputError: If a needed local order is missing (names the node).
    """
    skeleton = TreeSkeleton(t)
    ends = leaves(t)
    if len(ends) < 3:
        raise PreconditionError(f"End order needs three or more leaves, found {len(ends)}")

    def sign_of(e1: str, e2: str, e3: str) -> int:
        centre = skeleton.median(e1, e2, e3)
        local = skeleton.local_order(centre)
        sigma = [skeleton.germ_toward(centre, e) for e in (e1, e2, e3)]
        return local.value(*sigma)

    order = from_signs(ends, sign_of)
    logger.debug(f"End order computed on {len(ends)} leaves")
    return order


def _germ_image(
    germ: str, mapping: dict[str, str], cluster_map: dict[str, str]
) -> Optional[str]:
    if germ in cluster_map:
        return cluster_map[germ]
    return mapping.get(germ)


def check_automorphism(t: CyclicOrderTree, mapping: dict[str, str]) -> AutomorphismCheck:
    """
    Test whether a node bijection is an automorphism of the cyclically ordered tree.

    Args:
        t: The tree.
        mapping: Image of every node.

    Returns:
        AutomorphismCheck; when preserved, `leaf_map` is the induced permutation of ends.

    Raises:
        InvalidInputError: If the map is not a bijection of the node set.
    """
    skeleton = TreeSkeleton(t)
    if set(mapping) != set(t.nodes) or set(mapping.values()) != set(t.nodes):
        raise InvalidInputError("Node map must be a bijection of the node set")

    for v, kind in t.nodes.items():
        if t.nodes[mapping[v]] != kind:
            return AutomorphismCheck(False, failure=f"tag of {v} not preserved")

    edge_set = {frozenset(e) for e in t.edges}
    for a, b in t.edges:
        if frozenset((mapping[a], mapping[b])) not in edge_set:
            return AutomorphismCheck(False, failure=f"segment ({a}, {b}) not preserved")

    cluster_keys = {
        (c.stem, frozenset(c.tops)): cid for cid, c in t.clusters.items()
    }
    cluster_map: dict[str, str] = {}
    for cid, cluster in t.clusters.items():
        key = (mapping[cluster.stem], frozenset(mapping[p] for p in cluster.tops))
        if key not in cluster_keys:
            return AutomorphismCheck(False, failure=f"cataclysm {cid} has no image")
        cluster_map[cid] = cluster_keys[key]

    owners = list(t.nodes) + list(t.clusters)
    for owner in owners:
        if len(skeleton.adjacency[owner]) < 3:
            continue
        image_owner = cluster_map.get(owner, mapping.get(owner))
        has_order = skeleton.has_local_order(owner)
        image_has_order = skeleton.has_local_order(image_owner)
        if has_order != image_has_order:
            return AutomorphismCheck(False, failure=f"local order at {owner} not preserved")
        if not has_order:
            continue
        listing = skeleton.local_order(owner).to_listing()
        moved = [_germ_image(g, mapping, cluster_map) for g in listing]
        if from_cyclic_listing(moved) != skeleton.local_order(image_owner):
            return AutomorphismCheck(False, failure=f"local order at {owner} not preserved")

    leaf_map = {v: mapping[v] for v in leaves(t)}
    return AutomorphismCheck(True, leaf_map=leaf_map)


def preserves_end_order(order: CircularOrder, leaf_map: dict[str, str]) -> bool:
    """True iff the leaf permutation preserves the end order on every triple."""
    return all(
        order.value(leaf_map[a], leaf_map[b], leaf_map[c]) == s for a, b, c, s in order.triples()
    )


"""Shared pytest fixtures for OrderForge tests."""

import random
import tempfile
from pathlib import Path

import pytest

from src.models.tree import CyclicOrderTree


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def star_tree_data():
    """A regular vertex v with four leaves in cyclic order a, b, c, d."""
    return {
        "nodes": {"v": "regular", "a": "leaf", "b": "leaf", "c": "leaf", "d": "leaf"},
        "edges": [["v", "a"], ["v", "b"], ["v", "c"], ["v", "d"]],
        "orders": {"v": ["a", "b", "c", "d"]},
    }


@pytest.fixture
def star_tree(star_tree_data):
    return CyclicOrderTree.from_dict(star_tree_data)


@pytest.fixture
def cataclysm_tree_data():
    """
    Stem s (with leaf r below) carrying cataclysm K with tops p and q.

    Leaves a1, a2 sit above p and b1, b2 above q.
    """
    return {
        "nodes": {
            "r": "leaf",
            "s": "regular",
            "p": "cataclysm-top",
            "q": "cataclysm-top",
            "a1": "leaf",
            "a2": "leaf",
            "b1": "leaf",
            "b2": "leaf",
        },
        "edges": [["r", "s"], ["p", "a1"], ["p", "a2"], ["q", "b1"], ["q", "b2"]],
        "orders": {"p": ["K", "a1", "a2"], "q": ["K", "b1", "b2"]},
        "clusters": {"K": {"stem": "s", "tops": ["p", "q"], "order": ["s", "p", "q"]}},
    }


@pytest.fixture
def cataclysm_tree(cataclysm_tree_data):
    return CyclicOrderTree.from_dict(cataclysm_tree_data)


@pytest.fixture
def three_top_tree():
    """Cataclysm K with three tops, each carrying two leaves, over a stem with one leaf."""
    nodes = {"r": "leaf", "s": "regular"}
    edges = [["r", "s"]]
    orders = {}
    for top in ("p", "q", "u"):
        nodes[top] = "cataclysm-top"
        for i in (1, 2):
            leaf = f"{top}{i}"
            nodes[leaf] = "leaf"
            edges.append([top, leaf])
        orders[top] = ["K", f"{top}1", f"{top}2"]
    return CyclicOrderTree.from_dict(
        {
            "nodes": nodes,
            "edges": edges,
            "orders": orders,
            "clusters": {"K": {"stem": "s", "tops": ["p", "q", "u"], "order": ["s", "p", "q", "u"]}},
        }
    )


def build_random_tree(seed: int, size: int, cataclysms: int = 0) -> CyclicOrderTree:
    """
    Random tree on `size` nodes with a random local order at every vertex of degree >= 3.

    Each cataclysm hangs two or three new tops, each carrying one or two new
    leaves, over a random non-top node.
    """
    rng = random.Random(seed)
    names = [f"n{i}" for i in range(size)]
    edges = [[names[rng.randrange(i)], names[i]] for i in range(1, size)]
    neighbours = {v: [] for v in names}
    for a, b in edges:
        neighbours[a].append(b)
        neighbours[b].append(a)

    tops = set()
    clusters = {}
    for c in range(cataclysms):
        cid = f"K{c}"
        stem = rng.choice(sorted(v for v in neighbours if v not in tops))
        members = []
        for j in range(rng.randint(2, 3)):
            top = f"{cid}t{j}"
            tops.add(top)
            members.append(top)
            neighbours[top] = [cid]
            for k in range(rng.randint(1, 2)):
                leaf = f"{top}l{k}"
                neighbours[leaf] = [top]
                neighbours[top].append(leaf)
                edges.append([top, leaf])
        neighbours[stem].append(cid)
        listing = [stem] + members
        rng.shuffle(listing)
        clusters[cid] = {"stem": stem, "tops": members, "order": listing}

    nodes = {
        v: "cataclysm-top" if v in tops else "leaf" if len(around) == 1 else "regular"
        for v, around in neighbours.items()
    }
    orders = {}
    for v, around in neighbours.items():
        if len(around) >= 3:
            listing = list(around)
            rng.shuffle(listing)
            orders[v] = listing
    return CyclicOrderTree.from_dict(
        {"nodes": nodes, "edges": edges, "orders": orders, "clusters": clusters}
    )


def build_symmetric_tree(seed: int, size: int, copies: int) -> CyclicOrderTree:
    """
    `copies` relabelled copies of one random tree (with a cataclysm), their
    n0 nodes joined to a hub whose local order lists the copies in turn.

    Sending copy i to copy i + 1 is an automorphism.
    """
    base = build_random_tree(seed, size, cataclysms=1)
    degree = {v: 0 for v in base.nodes}
    for a, b in base.edges:
        degree[a] += 1
        degree[b] += 1
    for cluster in base.clusters.values():
        for v in [cluster.stem] + cluster.tops:
            degree[v] += 1

    def named(i: int, v: str) -> str:
        return f"c{i}_{v}"

    nodes = {"hub": "regular"}
    edges, orders, clusters = [], {}, {}
    for i in range(copies):
        for v, kind in base.nodes.items():
            nodes[named(i, v)] = kind.value
        nodes[named(i, "n0")] = "regular"
        edges.extend([named(i, a), named(i, b)] for a, b in base.edges)
        edges.append(["hub", named(i, "n0")])
        for v, listing in base.orders.items():
            orders[named(i, v)] = [named(i, g) for g in listing]
        if degree["n0"] == 2:
            around = [b if a == "n0" else a for a, b in base.edges if "n0" in (a, b)]
            around += [cid for cid, c in base.clusters.items() if c.stem == "n0"]
            orders[named(i, "n0")] = [named(i, g) for g in around]
        if degree["n0"] >= 2:
            orders[named(i, "n0")].append("hub")
        for cid, cluster in base.clusters.items():
            clusters[named(i, cid)] = {
                "stem": named(i, cluster.stem),
                "tops": [named(i, t) for t in cluster.tops],
                "order": [named(i, g) for g in cluster.order],
            }
    orders["hub"] = [named(i, "n0") for i in range(copies)]
    return CyclicOrderTree.from_dict(
        {"nodes": nodes, "edges": edges, "orders": orders, "clusters": clusters}
    )


@pytest.fixture
def random_tree_factory():
    """Factory building seeded random trees."""
    return build_random_tree

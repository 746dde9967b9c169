from __future__ import annotations

from functools import cached_property
from typing import Iterable

import networkx as nx
import numpy as np

from nisqkit.core.errors import InputError


class CouplingGraph:
    """Undirected device connectivity with an all-pairs distance table."""

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int]]):
        graph = nx.Graph()
        graph.add_nodes_from(range(n_nodes))
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b or not (0 <= a < n_nodes and 0 <= b < n_nodes):
                raise InputError(f"Invalid coupling edge ({a}, {b}) for {n_nodes} nodes")
            graph.add_edge(a, b)
        if n_nodes < 1 or not nx.is_connected(graph):
            raise InputError("Coupling graph must be connected")
        self.n_nodes = n_nodes
        self.graph = graph
        # Edge index order is the tie-break order used by the router.
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted((min(a, b), max(a, b)) for a, b in graph.edges))

    @cached_property
    def distance(self) -> np.ndarray:
        table = np.zeros((self.n_nodes, self.n_nodes), dtype=int)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, d in lengths.items():
                table[source, target] = d
        return table

    def are_adjacent(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def shortest_path(self, a: int, b: int) -> list[int]:
        return nx.shortest_path(self.graph, a, b)

    def neighbors(self, node: int) -> list[int]:
        return sorted(self.graph.neighbors(node))

    @classmethod
    def line(cls, n: int) -> "CouplingGraph":
        return cls(n, [(k, k + 1) for k in range(n - 1)])

    @classmethod
    def grid(cls, n_h: int, n_v: int) -> "CouplingGraph":
        """Rows of n_h nodes, node = row * n_h + col."""
        edges = []
        for r in range(n_v):
            for c in range(n_h):
                q = r * n_h + c
                if c + 1 < n_h:
                    edges.append((q, q + 1))
                if r + 1 < n_v:
                    edges.append((q, q + n_h))
        return cls(n_h * n_v, edges)

    @classmethod
    def complete(cls, n: int) -> "CouplingGraph":
        return cls(n, [(a, b) for a in range(n) for b in range(a + 1, n)])

    @classmethod
    def from_text(cls, text: str) -> "CouplingGraph":
        """
        Parse a coupling description.

        Accepts ``line:N``, ``grid:HxV``, an edge list ``0-1,1-2,...`` or
        edge-list file text with one ``i j`` pair per line.
        """
        text = text.strip()
        if "\n" in text or (" " in text and "-" not in text and ":" not in text):
            return cls.from_edge_list(text)
        try:
            if text.startswith("line:"):
                return cls.line(int(text[5:]))
            if text.startswith("grid:"):
                h, v = text[5:].lower().split("x")
                return cls.grid(int(h), int(v))
            edges = [tuple(int(p) for p in e.split("-")) for e in text.split(",") if e.strip()]
        except ValueError as e:
            raise InputError(f"Invalid coupling description '{text}'") from e
        if not edges or any(len(e) != 2 for e in edges):
            raise InputError(f"Invalid coupling description '{text}'")
        return cls(1 + max(max(e) for e in edges), edges)

    @classmethod
    def from_edge_list(cls, text: str) -> "CouplingGraph":
        """One `i j` pair per line; `#` and `//` start comments."""
        edges = []
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0].split("//", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                a, b = (int(p) for p in parts)
            except ValueError as e:
                raise InputError(f"Expected 'i j' on line {lineno}: {raw_line!r}") from e
            edges.append((a, b))
        if not edges:
            raise InputError("Edge list is empty")
        return cls(1 + max(max(e) for e in edges), edges)

    def __repr__(self) -> str:
        return f"CouplingGraph(n_nodes={self.n_nodes}, edges={list(self.edges)})"

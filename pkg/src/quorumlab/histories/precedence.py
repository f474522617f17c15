"""
Cluster Precedence Graph

Groups each write with the reads that return its value and links clusters by
real-time precedence. The virtual initial write forms its own cluster that
precedes every other one.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx

from ..core.values import Value
from .model import OpRecord

logger = logging.getLogger(__name__)

INITIAL_CLUSTER = -1


@dataclass
class Cluster:
    """A write (absent for the initial cluster) and the reads of its value."""

    node: int
    value: Value
    write: Optional[OpRecord] = None
    reads: List[OpRecord] = field(default_factory=list)

    @property
    def members(self) -> List[OpRecord]:
        head = [] if self.write is None else [self.write]
        return head + sorted(self.reads, key=lambda o: (o.invoke, o.op_id))

    @property
    def rank(self) -> Tuple[int, int]:
        if self.write is None:
            return (-1, -1)
        return (self.write.invoke, self.write.op_id)


class PrecedenceGraphBuilder:
    """Builds and queries cluster precedence graphs."""

    def create_cluster_graph(self, clusters: Dict[int, Cluster]) -> nx.DiGraph:
        """
        Create a directed graph over clusters.

        An edge A -> B carries ``witness``: a pair (a, b) of op ids with a in
        A responding strictly before b in B is invoked. The initial cluster
        gets an edge to every other cluster.

        Args:
            clusters: Clusters keyed by node id

        Returns:
            NetworkX DiGraph
        """
        G = nx.DiGraph()
        for node, cluster in clusters.items():
            G.add_node(node, value=str(cluster.value), rank=cluster.rank)

        owner = {o.op_id: node for node, c in clusters.items() for o in c.members}
        ops = sorted((o for c in clusters.values() for o in c.members), key=lambda o: o.op_id)
        for a in ops:
            for b in ops:
                if owner[a.op_id] != owner[b.op_id] and a.precedes(b):
                    u, v = owner[a.op_id], owner[b.op_id]
                    if not G.has_edge(u, v):
                        G.add_edge(u, v, witness=(a.op_id, b.op_id))

        if INITIAL_CLUSTER in clusters:
            for node in clusters:
                if node != INITIAL_CLUSTER and not G.has_edge(INITIAL_CLUSTER, node):
                    G.add_edge(INITIAL_CLUSTER, node, witness=None)
        return G

    def find_minimal_cycle(self, G: nx.DiGraph) -> Optional[List[int]]:
        """
        Shortest directed cycle, as a node list without repeating the start.

        For every edge (u, v) the shortest v -> u path closes a cycle; the
        shortest such cycle wins, ties going to the first edge in sorted order.
        """
        best: Optional[List[int]] = None
        for u, v in sorted(G.edges()):
            try:
                path = nx.shortest_path(G, v, u)
            except nx.NetworkXNoPath:
                continue
            cycle = [u] + path[:-1]
            if best is None or len(cycle) < len(best):
                best = cycle
        return best

    def topological_clusters(self, G: nx.DiGraph) -> List[int]:
        """Deterministic topological order, earliest-invoked write first among ready clusters."""
        return list(nx.lexicographical_topological_sort(G, key=lambda n: G.nodes[n]["rank"]))

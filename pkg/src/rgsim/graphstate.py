"""Graph-plus-side-effect description of stabilizer states.

Fast backend for reasoning about the protocol's three manipulation rules:
local complementation, single-qubit Z measurement, and the XX measurement
of an edge-adjacent pair. Every rule is cross-checked against the tableau
oracle in the test suite; the XX sign conventions below (including the
common-neighbor residual) are frozen by those tests.
"""

from __future__ import annotations

from itertools import combinations

from .clifford1 import C_I, C_S, C_SQRT_IX, C_Z, Z_LIKE, LocalClifford
from .tableau import Tableau


class GraphState:
    """Undirected simple graph with a local-Clifford tag per vertex.

    The physical state is (tensor of tags) applied to the plain graph
    state. Vertex ids are arbitrary ints and are never reused once a
    vertex has been measured away.
    """

    def __init__(self, vertices=(), edges=()):
        self._adj: dict[int, set[int]] = {}
        self._tags: dict[int, LocalClifford] = {}
        for v in vertices:
            self.add_vertex(v)
        for a, b in edges:
            self.add_edge(a, b)

    # -- construction ----------------------------------------------------

    def add_vertex(self, v: int, tag: LocalClifford = C_I):
        if v in self._adj:
            raise ValueError(f"vertex {v} already present")
        self._adj[v] = set()
        self._tags[v] = tag

    def add_edge(self, a: int, b: int):
        self._require(a, b)
        if a == b:
            raise ValueError("self-loops are not allowed")
        self._adj[a].add(b)
        self._adj[b].add(a)

    def toggle_edge(self, a: int, b: int):
        if a == b:
            raise ValueError("self-loops are not allowed")
        if b in self._adj[a]:
            self._adj[a].discard(b)
            self._adj[b].discard(a)
        else:
            self._adj[a].add(b)
            self._adj[b].add(a)

    def copy(self) -> "GraphState":
        dup = GraphState()
        dup._adj = {v: set(nb) for v, nb in self._adj.items()}
        dup._tags = dict(self._tags)
        return dup

    # -- queries ----------------------------------------------------------

    def _require(self, *vs):
        for v in vs:
            if v not in self._adj:
                raise ValueError(f"unknown vertex {v}")

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(
            (min(a, b), max(a, b))
            for a in self._adj
            for b in self._adj[a]
            if a < b
        )

    def neighbors(self, v: int) -> set[int]:
        self._require(v)
        return set(self._adj[v])

    def has_edge(self, a: int, b: int) -> bool:
        self._require(a, b)
        return b in self._adj[a]

    def tag(self, v: int) -> LocalClifford:
        self._require(v)
        return self._tags[v]

    def set_tag(self, v: int, tag: LocalClifford):
        self._require(v)
        self._tags[v] = tag

    def tag_map(self) -> dict[int, LocalClifford]:
        return dict(self._tags)

    # -- manipulation rules ------------------------------------------------

    def local_complement(self, v: int):
        """Complement the subgraph on N(v); the physical state is unchanged.

        The compensating quarter-turn Cliffords are folded into the tags,
        so this can push tags outside {I, Z, H, HZ}.
        """
        self._require(v)
        nbrs = sorted(self._adj[v])
        for a, b in combinations(nbrs, 2):
            self.toggle_edge(a, b)
        self._tags[v] = self._tags[v] @ C_SQRT_IX
        for u in nbrs:
            # sqrt(-iZ) coincides with S up to phase.
            self._tags[u] = self._tags[u] @ C_S

    def measure_z(self, v: int, outcome: int):
        """Remove v after a Z measurement with the given +/-1 outcome.

        On outcome -1 every former neighbor picks up a Z tag (composed
        under its existing tag). v itself must carry an I or Z tag; a Z
        tag never changes a Z outcome.
        """
        self._require(v)
        if outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")
        if self._tags[v] not in Z_LIKE:
            raise ValueError(
                f"vertex {v} carries tag {self._tags[v]}; resolve it before a Z measurement"
            )
        nbrs = sorted(self._adj[v])
        for u in nbrs:
            self._adj[u].discard(v)
            if outcome < 0:
                self._tags[u] = self._tags[u] @ C_Z
        del self._adj[v]
        del self._tags[v]

    def fuse_xx(self, a: int, b: int, outcome_a: int, outcome_b: int):
        """X-measure the edge-adjacent pair (a, b) out of the graph.

        Outcomes are +/-1 with any Z tags on a and b already folded in by
        the caller (a Z tag flips an X outcome). Effect: the neighborhoods
        N(a)\\{b} and N(b)\\{a} are joined pairwise (double toggles cancel,
        so common neighbors stay mutually untouched), then a and b drop
        out. Z tags: the a-side flips on outcome_b = -1, the b-side on
        outcome_a = -1, and common neighbors flip when the product of the
        two outcomes is +1.
        """
        self._require(a, b)
        if b not in self._adj[a]:
            raise ValueError(f"no edge between {a} and {b}")
        for s in (outcome_a, outcome_b):
            if s not in (1, -1):
                raise ValueError("outcomes must be +1 or -1")
        for v in (a, b):
            if self._tags[v] not in Z_LIKE:
                raise ValueError(
                    f"vertex {v} carries tag {self._tags[v]}; fold it before fusing"
                )
        side_a = self._adj[a] - {b}
        side_b = self._adj[b] - {a}
        common = side_a & side_b

        toggles: dict[tuple[int, int], int] = {}
        for u in side_a:
            for w in side_b:
                if u == w:
                    continue
                key = (min(u, w), max(u, w))
                toggles[key] = toggles.get(key, 0) ^ 1
        for u in (a, b):
            for w in self._adj[u]:
                self._adj[w].discard(u)
            del self._adj[u]
            del self._tags[u]
        for (u, w), flip in sorted(toggles.items()):
            if flip:
                self.toggle_edge(u, w)

        for u in sorted(side_a - common):
            if outcome_b < 0:
                self._tags[u] = self._tags[u] @ C_Z
        for w in sorted(side_b - common):
            if outcome_a < 0:
                self._tags[w] = self._tags[w] @ C_Z
        for u in sorted(common):
            if outcome_a * outcome_b > 0:
                self._tags[u] = self._tags[u] @ C_Z

    # -- export -------------------------------------------------------------

    def to_circuit(self, order=None):
        """Preparation circuit: H each vertex, CZ each edge, then the tags.

        Returns (qubit_of, gates) where qubit_of maps vertex id to the
        qubit index used in the gate list.
        """
        vs = self.vertices() if order is None else list(order)
        qubit_of = {v: i for i, v in enumerate(vs)}
        gates = [("H", qubit_of[v]) for v in vs]
        gates += [("CZ", qubit_of[a], qubit_of[b]) for a, b in self.edges()]
        for v in vs:
            for g in self._tags[v].gates():
                gates.append((g, qubit_of[v]))
        return qubit_of, gates

    def to_tableau(self, order=None, backend=None):
        """Run the preparation circuit on a fresh tableau."""
        qubit_of, gates = self.to_circuit(order)
        t = Tableau(max(len(qubit_of), 1), backend=backend)
        for g in gates:
            t.apply(*g)
        return t, qubit_of

    def to_dot(self) -> str:
        lines = ["graph state {"]
        for v in self.vertices():
            tag = self._tags[v].name
            label = f"{v}" if tag == "I" else f"{v} [{tag}]"
            lines.append(f'  v{v} [label="{label}"];')
        for a, b in self.edges():
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines)

"""Graph-state picture: adjacency plus per-vertex local Clifford frame.

A frame represents the state  (U_1 (x) ... (x) U_n) |G>  where |G> is the
pure graph state of the adjacency (stabilized by K_j = X_j prod_{i in N(j)} Z_i)
and U_v are single-qubit Cliffords from the 24-element table.

Vertex labels are stable strings; deleting a vertex never renames survivors.
Measurement byproducts do not follow a hand-written sign table: the adjacency
is updated by the standard Z/Y/X rules and the frame is then repaired against
the tableau result, which is the ground truth for every sign convention.
"""

from __future__ import annotations

import numpy as np

from . import cliffords, gf2
from .cliffords import IDENTITY, SingleClifford
from .stabilizer import PauliOperator, StabilizerState, states_equal


class GraphStateFrame:
    """Adjacency + local Clifford frame for a stabilizer state."""

    def __init__(self, vertices, edges=(), vertex_ops=None):
        self.vertices: list[str] = [str(v) for v in vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in edges:
            self.add_edge(str(a), str(b))
        self.vertex_ops: dict[str, SingleClifford] = {
            v: IDENTITY for v in self.vertices
        }
        if vertex_ops:
            for v, op in vertex_ops.items():
                self.vertex_ops[str(v)] = op

    # -- structure -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise KeyError(f"unknown vertex {v!r}") from None

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            raise ValueError("no self loops")
        if a not in self.adj or b not in self.adj:
            raise KeyError("edge endpoint is not a vertex")
        self.adj[a].add(b)
        self.adj[b].add(a)

    def edges(self) -> list[tuple[str, str]]:
        out = []
        for i, a in enumerate(self.vertices):
            for b in self.vertices[i + 1 :]:
                if b in self.adj[a]:
                    out.append((a, b))
        return out

    def neighbors(self, v: str) -> list[str]:
        self.index(v)
        return [u for u in self.vertices if u in self.adj[v]]

    def copy(self) -> "GraphStateFrame":
        return GraphStateFrame(self.vertices, self.edges(), dict(self.vertex_ops))

    def __repr__(self) -> str:
        ops = {v: c.word for v, c in self.vertex_ops.items() if c.index != 0}
        return f"GraphStateFrame({self.vertices}, edges={self.edges()}, ops={ops})"

    # -- conversion --------------------------------------------------------

    def bare_generator(self, v: str) -> PauliOperator:
        """K_v = X_v prod_{u in N(v)} Z_u on the bare graph."""
        p = PauliOperator.single(self.n, self.index(v), "X")
        for u in self.adj[v]:
            p = p * PauliOperator.single(self.n, self.index(u), "Z")
        return p

    def to_stabilizer(self) -> StabilizerState:
        frames = [self.vertex_ops[v] for v in self.vertices]
        gens = [
            cliffords.conjugate_by_frames(self.bare_generator(v), frames)
            for v in self.vertices
        ]
        return StabilizerState.from_generators(gens)

    # -- local complementation ----------------------------------------------

    def local_complement(self, v: str) -> "GraphStateFrame":
        """Complement the edges inside N(v); the represented state is unchanged."""
        before = self.to_stabilizer()
        out = self.copy()
        nbrs = self.neighbors(v)
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1 :]:
                if b in out.adj[a]:
                    out.adj[a].discard(b)
                    out.adj[b].discard(a)
                else:
                    out.add_edge(a, b)
        # sqrt(X)-class on v and sqrt(Z)-class on its neighbours; the exact
        # signs are fixed afterwards by the Pauli repair.
        out.vertex_ops[v] = out.vertex_ops[v] @ cliffords.SQRT_X_CLASS
        for u in nbrs:
            out.vertex_ops[u] = out.vertex_ops[u] @ cliffords.SQRT_Z_CLASS
        repaired = _pauli_repair(out, before)
        if repaired is None:
            raise AssertionError("local complementation lost the state")
        return repaired

    # -- measurement -----------------------------------------------------------

    def measure_vertex(self, v: str, basis: str, rng=None, forced: int | None = None
                       ) -> tuple[int, "GraphStateFrame"]:
        """Measure the physical Pauli `basis` at vertex v and remove it.

        Returns (outcome, new frame).  The adjacency of the result follows the
        standard Z / Y / X rules; the byproduct is absorbed into vertex_ops,
        with the tableau as ground truth.
        """
        if basis not in "XYZ":
            raise ValueError("basis must be X, Y or Z")
        idx = self.index(v)
        state = self.to_stabilizer()
        observable = PauliOperator.single(self.n, idx, basis)
        outcome, post = state.measure_and_remove(observable, idx, rng=rng, forced=forced)

        # Effective letter on the bare graph decides the adjacency rule.
        eff = self.vertex_ops[v].inverse().conjugate(PauliOperator.single(1, 0, basis))
        letter = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(int(eff.x[0]), int(eff.z[0]))]

        work = self.copy()
        special: str | None = None
        if letter == "Z":
            pass
        elif letter == "Y":
            work = _complement_adj_only(work, v)
        else:  # X: complement at a special neighbour, Y-rule, complement again
            nbrs = work.neighbors(v)
            if nbrs:
                special = nbrs[0]
                work = _complement_adj_only(work, special)
                work = _complement_adj_only(work, v)
        survivors = [u for u in self.vertices if u != v]
        target = GraphStateFrame(
            survivors,
            [(a, b) for a, b in work.edges() if v not in (a, b)],
            {u: self.vertex_ops[u] for u in survivors},
        )
        if special is not None:
            target = _complement_adj_only(target, special)
        if letter == "Y":
            for u in self.neighbors(v):
                target.vertex_ops[u] = target.vertex_ops[u] @ cliffords.SQRT_Z_CLASS
        elif letter == "X" and special is not None:
            target.vertex_ops[special] = target.vertex_ops[special] @ cliffords.HADAMARD
        repaired = _pauli_repair(target, post)
        if repaired is None:
            raise AssertionError(f"{letter}-rule produced a state off by more than a Pauli")
        return outcome, repaired

    # -- export -------------------------------------------------------------

    def to_dot(self, roles: dict[str, str] | None = None) -> str:
        lines = ["graph state {", "  node [shape=circle];"]
        for v in self.vertices:
            parts = [v]
            op = self.vertex_ops[v]
            if op.index != 0:
                parts.append(op.word)
            if roles and v in roles:
                parts.append(roles[v])
            label = "\\n".join(parts)
            lines.append(f'  "{v}" [label="{label}"];')
        for a, b in self.edges():
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _complement_adj_only(g: GraphStateFrame, v: str) -> GraphStateFrame:
    out = g.copy()
    nbrs = g.neighbors(v)
    for i, a in enumerate(nbrs):
        for b in nbrs[i + 1 :]:
            if b in out.adj[a]:
                out.adj[a].discard(b)
                out.adj[b].discard(a)
            else:
                out.add_edge(a, b)
    return out


def _pauli_repair(candidate: GraphStateFrame, truth: StabilizerState) -> GraphStateFrame | None:
    """Adjust candidate.vertex_ops by a Pauli layer so it represents `truth`.

    Returns None when candidate and truth differ by more than per-vertex
    Paulis (i.e. the caller's Clifford part is wrong).
    """
    n = candidate.n
    if truth.n != n:
        raise ValueError("size mismatch")
    if n == 0:
        return candidate
    # Undo the frames on the truth, then compare against the bare graph.
    stripped = truth.copy()
    for j, v in enumerate(candidate.vertices):
        for gate in cliffords.TABLE[candidate.vertex_ops[v].index].inverse().gate_word():
            stripped.apply_gate(gate, (j,))
    gens = [candidate.bare_generator(v) for v in candidate.vertices]
    signs = np.zeros(n, dtype=np.uint8)
    for j, g in enumerate(gens):
        e = stripped.expectation(g)
        if e == 0:
            return None
        signs[j] = 0 if e == 1 else 1
    if not signs.any():
        return candidate
    # Solve <K_j, pi>_symplectic = sign_j for a Pauli layer pi.
    mat = np.zeros((2 * n, n), dtype=np.uint8)
    for j, g in enumerate(gens):
        mat[:n, j] = g.z  # pairs with pi.x
        mat[n:, j] = g.x  # pairs with pi.z
    sol = gf2.solve(mat, signs)
    if sol is None:
        return None
    out = candidate.copy()
    for j, v in enumerate(out.vertices):
        xb, zb = int(sol[j]), int(sol[n + j])
        if xb or zb:
            letter = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(xb, zb)]
            out.vertex_ops[v] = out.vertex_ops[v] @ cliffords.pauli_clifford(letter)
    return out


def stabilizer_to_graph(state: StabilizerState, labels=None) -> GraphStateFrame:
    """Render any stabilizer state as graph + local Clifford frame.

    The round trip  graph.to_stabilizer()  is states_equal to the input.
    """
    n = state.n
    labels = [str(v) for v in labels] if labels is not None else [str(i) for i in range(n)]
    if len(labels) != n:
        raise ValueError("need one label per qubit")
    st = state.copy()
    applied: list[list[str]] = [[] for _ in range(n)]

    def apply(gate: str, j: int) -> None:
        st.apply_gate(gate, (j,))
        applied[j].append(gate)

    def row_mult(i: int, p: int) -> None:
        g = st.generator(i) * st.generator(p)
        st.x[i], st.z[i], st.r[i] = g.x, g.z, g.r

    rank = 0
    pivots: list[int] = []
    for j in range(n):
        rows = [i for i in range(rank, n) if st.x[i, j]]
        if not rows:
            zrows = [i for i in range(rank, n) if st.z[i, j]]
            if not zrows:
                continue
            apply("H", j)
            rows = zrows
        p = rows[0]
        if p != rank:
            st.x[[p, rank]] = st.x[[rank, p]]
            st.z[[p, rank]] = st.z[[rank, p]]
            st.r[[p, rank]] = st.r[[rank, p]]
        for i in range(n):
            if i != rank and st.x[i, j]:
                row_mult(i, rank)
        pivots.append(j)
        rank += 1
    if rank != n:
        raise AssertionError("generator matrix was not full rank")
    # Reorder rows so that row i has its X pivot at column i.
    order = np.argsort(pivots)
    st.x, st.z, st.r = st.x[order], st.z[order], st.r[order]
    for j in range(n):
        if st.z[j, j]:
            apply("S", j)
    for j in range(n):
        g = st.generator(j)
        if g.display_pow == 2:
            apply("Z", j)
        elif g.display_pow != 0:
            raise AssertionError("imaginary generator phase")
    adj = st.z.copy()
    if np.diag(adj).any() or (adj != adj.T).any():
        raise AssertionError("Z block is not a symmetric zero-diagonal adjacency")
    edges = [
        (labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if adj[i, j]
    ]
    ops = {}
    for j, lab in enumerate(labels):
        word_op = IDENTITY
        for gate in applied[j]:
            word_op = cliffords.by_name(gate) @ word_op
        ops[lab] = word_op.inverse()
    return GraphStateFrame(labels, edges, ops)


# -- standard graphs -------------------------------------------------------


def chain_graph(n: int, prefix: str = "v") -> GraphStateFrame:
    labels = [f"{prefix}{i}" for i in range(n)]
    return GraphStateFrame(labels, [(labels[i], labels[i + 1]) for i in range(n - 1)])


def ring_graph(n: int, prefix: str = "v") -> GraphStateFrame:
    labels = [f"{prefix}{i}" for i in range(n)]
    return GraphStateFrame(labels, [(labels[i], labels[(i + 1) % n]) for i in range(n)])


def star_graph(n_leaves: int, hub: str = "hub", prefix: str = "v") -> GraphStateFrame:
    labels = [hub] + [f"{prefix}{i}" for i in range(n_leaves)]
    return GraphStateFrame(labels, [(hub, lab) for lab in labels[1:]])


def random_graph_frame(n: int, rng, p_edge: float = 0.5, with_frames: bool = True) -> GraphStateFrame:
    labels = [f"v{i}" for i in range(n)]
    edges = [
        (labels[i], labels[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p_edge
    ]
    ops = None
    if with_frames:
        ops = {lab: cliffords.TABLE[int(rng.integers(0, 24))] for lab in labels}
    return GraphStateFrame(labels, edges, ops)

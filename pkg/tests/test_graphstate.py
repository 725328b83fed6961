"""Graph-state frame: conversions, local complementation, measurement rules."""

import numpy as np
import pytest

from bellfuse import cliffords
from bellfuse.graphstate import (
    GraphStateFrame,
    chain_graph,
    random_graph_frame,
    ring_graph,
    star_graph,
    stabilizer_to_graph,
)
from bellfuse.stabilizer import (
    PauliOperator,
    StabilizerState,
    random_stabilizer_state,
    states_equal,
)


class TestGraphToStabilizer:
    def test_single_vertex(self):
        assert GraphStateFrame(["a"]).to_stabilizer().to_strings() == ["+X"]

    def test_one_edge(self):
        g = GraphStateFrame(["a", "b"], [("a", "b")])
        assert states_equal(g.to_stabilizer(), StabilizerState.from_generators(["+XZ", "+ZX"]))

    def test_ring5_correlation_operators(self):
        got = ring_graph(5).to_stabilizer()
        want = []
        for j in range(5):
            s = ["I"] * 5
            s[j] = "X"
            s[(j - 1) % 5] = "Z"
            s[(j + 1) % 5] = "Z"
            want.append("+" + "".join(s))
        assert states_equal(got, StabilizerState.from_generators(want))


class TestStabilizerToGraph:
    def test_phi_plus(self):
        bell = StabilizerState.from_generators(["+XX", "+ZZ"])
        g = stabilizer_to_graph(bell)
        assert len(g.edges()) == 1
        assert states_equal(g.to_stabilizer(), bell)

    def test_round_trip_500_random_states(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            n = int(rng.integers(1, 9))
            st = random_stabilizer_state(n, rng)
            assert states_equal(stabilizer_to_graph(st).to_stabilizer(), st)

    def test_rep3_encoder_is_star(self):
        # (|0>|+++> + |1>|--->)/sqrt(2) is the bare 4-vertex star
        from bellfuse.blocks import encoder_block

        enc = encoder_block("rep3_phase")
        g = stabilizer_to_graph(enc.state)
        assert states_equal(g.to_stabilizer(), enc.state)
        degs = sorted(len(g.adj[v]) for v in g.vertices)
        assert degs == [1, 1, 1, 3]


class TestLocalComplement:
    def test_triangle(self):
        tri = GraphStateFrame("123", [("1", "2"), ("1", "3"), ("2", "3")])
        got = tri.local_complement("1")
        assert sorted(got.edges()) == [("1", "2"), ("1", "3")]

    def test_involution_on_adjacency(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            g = random_graph_frame(int(rng.integers(2, 8)), rng)
            v = g.vertices[int(rng.integers(0, g.n))]
            twice = g.local_complement(v).local_complement(v)
            assert sorted(twice.edges()) == sorted(g.edges())

    def test_state_preserved_200_random_graphs(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            g = random_graph_frame(int(rng.integers(2, 9)), rng)
            st = g.to_stabilizer()
            v = g.vertices[int(rng.integers(0, g.n))]
            assert states_equal(g.local_complement(v).to_stabilizer(), st)

    def test_unknown_vertex(self):
        with pytest.raises(KeyError):
            GraphStateFrame(["a"]).local_complement("b")


class TestMeasureVertex:
    def test_z_rule_leaf(self):
        g = GraphStateFrame(["a", "b"], [("a", "b")])
        outcome, post = g.measure_vertex("b", "Z", forced=1)
        assert outcome == 1 and post.vertices == ["a"]
        assert states_equal(post.to_stabilizer(), StabilizerState.plus(1))

    @pytest.mark.parametrize("basis", ["X", "Y", "Z"])
    def test_matches_tableau_oracle(self, basis):
        rng = np.random.default_rng(hash(basis) % 2**32)
        done = 0
        while done < 100:
            n = int(rng.integers(2, 8))
            g = random_graph_frame(n, rng)
            st = g.to_stabilizer()
            v = g.vertices[int(rng.integers(0, n))]
            forced = 1 if rng.integers(0, 2) == 0 else -1
            ref = st.copy()
            try:
                _, post_ref = ref.measure_and_remove(
                    PauliOperator.single(n, g.index(v), basis), g.index(v), forced=forced)
            except ValueError:
                continue  # deterministic opposite value; not a valid branch
            outcome, post = g.measure_vertex(v, basis, forced=forced)
            assert outcome == forced
            assert states_equal(post.to_stabilizer(), post_ref)
            done += 1

    def test_y_chain_shrinks(self):
        g = chain_graph(5)
        st = g.to_stabilizer()
        ref = st.copy()
        _, post_ref = ref.measure_and_remove(PauliOperator.single(5, 2, "Y"), 2, forced=1)
        _, post = g.measure_vertex("v2", "Y", forced=1)
        assert post.vertices == ["v0", "v1", "v3", "v4"]
        assert states_equal(post.to_stabilizer(), post_ref)

    def test_x_special_neighbor_choice_is_irrelevant(self):
        rng = np.random.default_rng(77)
        done = 0
        while done < 40:
            g = random_graph_frame(int(rng.integers(3, 8)), rng)
            v = g.vertices[int(rng.integers(0, g.n))]
            nbrs = g.neighbors(v)
            if len(nbrs) < 2:
                continue
            _, a = g.measure_vertex(v, "X", forced=1)
            swapped = g.copy()
            i0, i1 = swapped.vertices.index(nbrs[0]), swapped.vertices.index(nbrs[1])
            swapped.vertices[i0], swapped.vertices[i1] = swapped.vertices[i1], swapped.vertices[i0]
            _, b = swapped.measure_vertex(v, "X", forced=1)
            sb = b.to_stabilizer()
            perm = [b.vertices.index(u) for u in a.vertices]
            aligned = StabilizerState(sb.n, sb.x[:, perm], sb.z[:, perm], sb.r)
            assert states_equal(a.to_stabilizer(), aligned)
            done += 1

    def test_isolated_vertex_measurement_uses_tableau_semantics(self):
        # x-measuring |+> is deterministic; forcing -1 must fail
        g = GraphStateFrame(["a", "b"], [])
        outcome, post = g.measure_vertex("a", "X", forced=1)
        assert outcome == 1 and post.vertices == ["b"]
        with pytest.raises(ValueError):
            GraphStateFrame(["a", "b"], []).measure_vertex("a", "X", forced=-1)

    def test_unknown_vertex(self):
        with pytest.raises(KeyError):
            chain_graph(3).measure_vertex("nope", "Z", forced=1)


class TestDotExport:
    def test_contains_vertices_edges_and_roles(self):
        g = star_graph(3)
        g.vertex_ops["v0"] = g.vertex_ops["v0"] @ cliffords.by_name("H")
        dot = g.to_dot(roles={"hub": "in.0"})
        assert '"hub" -- "v0"' in dot or '"hub" -- "v1"' in dot
        assert "in.0" in dot and dot.startswith("graph state {")
        assert "H" in dot

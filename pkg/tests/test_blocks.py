"""Resource-block synthesis: Choi route, cluster reduction, fusion."""

import numpy as np
import pytest

from bellfuse import dense
from bellfuse.blocks import (
    ClusterPattern,
    ResourceBlock,
    block_from_json,
    block_to_json,
    choi_state,
    code_switch_block,
    decoder_block,
    ec_block,
    encoder_block,
    equivalent_on_complement,
    fuse_blocks,
    realized_clifford,
    reduce_cluster,
    rotation_gadget,
)
from bellfuse.codes import get_code
from bellfuse.graphstate import GraphStateFrame, chain_graph
from bellfuse.stabilizer import (
    CliffordCircuit,
    PauliOperator,
    StabilizerState,
    conjugate_pauli,
    random_clifford_circuit,
    states_equal,
)

from helpers import CIRCUIT_LIBRARY, aligned_state, pattern_library



class TestChoiState:
    def test_identity_gives_phi_plus(self):
        b = choi_state(CliffordCircuit(1), 1)
        assert states_equal(b.state, StabilizerState.from_generators(["+XX", "+ZZ"]))

    def test_cz_block_matches_dense_resource_state(self):
        # CZ resource state, amplitudes built independently: in the ordering
        # (in0, in1, out0, out1) the nonzero amplitudes sit on 0000, 0101,
        # 1010 and 1111 with a sign flip on the last one.
        b = choi_state(CIRCUIT_LIBRARY["cz"], 2)
        vec = np.zeros(16, dtype=complex)
        vec[0b0000] = vec[0b0101] = vec[0b1010] = 1
        vec[0b1111] = -1
        aligned = aligned_state(b)
        assert dense.states_close(dense.from_stabilizer(aligned),
                                  dense.DenseState.from_vector(vec / 2))

    def test_ring5_encode_circuit_choi_matches_encoder_block(self):
        code = get_code("ring5")
        # Choi of the encoding isometry: Bell pair + ancillas through the circuit
        enc = encoder_block(code)
        assert enc.n == 6
        direct = _encoder_state_from_codewords(code)
        assert states_equal(enc.state, direct)

    def test_minimality(self):
        for name, circ in CIRCUIT_LIBRARY.items():
            n_in = max(circ.width, 1)
            b = choi_state(circ, n_in)
            assert b.n == len(b.in_ports) + len(b.out_ports), name
            assert b.is_minimal_clifford


def _encoder_state_from_codewords(code) -> StabilizerState:
    gens = [g.embed(code.m + 1, range(1, code.m + 1)) for g in code.stabilizer_generators]
    gens.append(PauliOperator.single(code.m + 1, 0, "X")
                * code.logical_x.embed(code.m + 1, range(1, code.m + 1)))
    gens.append(PauliOperator.single(code.m + 1, 0, "Z")
                * code.logical_z.embed(code.m + 1, range(1, code.m + 1)))
    return StabilizerState.from_generators(gens)


class TestEncoderDecoder:
    @pytest.mark.parametrize("name", ["rep3_phase", "rep3_bit", "ring5"])
    def test_state_is_codeword_superposition(self, name):
        code = get_code(name)
        enc = encoder_block(code)
        assert states_equal(enc.state, _encoder_state_from_codewords(code))
        assert enc.n == code.m + 1

    def test_decoder_same_state_ports_swapped(self):
        enc, dec = encoder_block("rep3_phase"), decoder_block("rep3_phase")
        assert states_equal(enc.state, dec.state)
        assert len(dec.in_ports) == 3 and len(dec.out_ports) == 1

    def test_rep3_phase_encoder_amplitudes(self):
        enc = encoder_block("rep3_phase")
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        ppp = np.kron(np.kron(plus, plus), plus)
        mmm = np.kron(np.kron(minus, minus), minus)
        vec = (np.kron([1, 0], ppp) + np.kron([0, 1], mmm)) / np.sqrt(2)
        assert dense.states_close(dense.from_stabilizer(enc.state),
                                  dense.DenseState.from_vector(vec))


class TestRotationGadget:
    def test_g3_state(self):
        g = rotation_gadget("X")
        assert states_equal(g.block.state, StabilizerState.from_generators(["+XZZ", "+ZXI", "+ZIX"]))
        assert g.block.open_ports == {"open.0": 0}

    def test_z_axis_is_hadamard_framed(self):
        g = rotation_gadget("Z")
        ref = StabilizerState.from_generators(["+XZZ", "+ZXI", "+ZIX"])
        ref.apply_gate("H", (1,))
        ref.apply_gate("H", (2,))
        assert states_equal(g.block.state, ref)
        # GHZ in the computational basis
        vec = np.zeros(8)
        vec[0] = vec[7] = 1
        assert dense.states_close(dense.from_stabilizer(g.block.state),
                                  dense.DenseState.from_vector(vec))

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            rotation_gadget("Y")


class TestReduceCluster:
    def test_three_chain_is_the_rotation_gadget_shape(self):
        g = GraphStateFrame(["top", "in", "out"], [("top", "in"), ("top", "out")])
        pat = ClusterPattern(g, ["in"], ["out"], {}, open_vertices=["top"])
        blk = reduce_cluster(pat)
        assert blk.n == 3 and len(blk.open_ports) == 1
        assert states_equal(blk.state, rotation_gadget("X").block.state)

    def test_route_equivalence_library(self):
        # Both synthesis routes give the same minimal state: reduce the
        # pattern, extract the Clifford it realizes, and compare against the
        # Choi block of that circuit.
        pats = pattern_library()
        assert len(pats) >= 10
        for name, pat in pats:
            blk = reduce_cluster(pat, name=name)
            assert blk.n == len(blk.in_ports) + len(blk.out_ports), name
            circ = realized_clifford(blk)
            ref = choi_state(circ, len(blk.in_ports))
            assert states_equal(aligned_state(blk), aligned_state(ref)), name

    def test_five_chain_x_measured_realizes_identity(self):
        pat = ClusterPattern(chain_graph(5), ["v0"], ["v4"],
                             {"v1": "X", "v2": "X", "v3": "X"})
        blk = reduce_cluster(pat)
        circ = realized_clifford(blk)
        for letter in "XZ":
            p = PauliOperator.single(1, 0, letter)
            assert conjugate_pauli(circ, p) == p

    def test_inconsistent_roles_rejected(self):
        g = chain_graph(3)
        with pytest.raises(ValueError):
            reduce_cluster(ClusterPattern(g, ["v0"], ["v2"], {"v1": "X", "v0": "Z"}))
        with pytest.raises(ValueError):
            reduce_cluster(ClusterPattern(g, ["v0"], ["v2"], {}))


class TestFuseBlocks:
    def test_identity_fuse_identity_is_phi_plus(self):
        f = fuse_blocks(choi_state(CliffordCircuit(1), 1), choi_state(CliffordCircuit(1), 1))
        assert f.n == 2
        assert states_equal(f.state, StabilizerState.from_generators(["+XX", "+ZZ"]))

    def test_fused_block_realizes_composition(self):
        rng = np.random.default_rng(9)
        for _ in range(15):
            n = int(rng.integers(1, 3))
            c1 = random_clifford_circuit(n, 12, rng)
            c2 = random_clifford_circuit(n, 12, rng)
            f = fuse_blocks(choi_state(c1, n), choi_state(c2, n))
            got = realized_clifford(f)
            for j in range(n):
                for letter in "XZ":
                    p = PauliOperator.single(n, j, letter)
                    assert conjugate_pauli(got, p) == conjugate_pauli(c2, conjugate_pauli(c1, p))

    def test_encoder_decoder_fuse_is_logical_identity(self):
        for name in ("rep3_phase", "ring5"):
            f = fuse_blocks(encoder_block(name), decoder_block(name))
            assert f.n == 2
            assert states_equal(f.state, StabilizerState.from_generators(["+XX", "+ZZ"]))

    def test_code_switch_block_shape(self):
        sw = code_switch_block("rep3_phase", "ring5")
        assert sw.n == 8
        assert len(sw.in_ports) == 3 and len(sw.out_ports) == 5
        assert sw.is_minimal_clifford

    def test_minimality_preserved(self):
        rng = np.random.default_rng(4)
        a = choi_state(random_clifford_circuit(2, 10, rng), 2)
        b = choi_state(random_clifford_circuit(2, 10, rng), 2)
        f = fuse_blocks(a, b)
        assert f.is_minimal_clifford and f.n == 4

    def test_associativity(self):
        rng = np.random.default_rng(10)
        for _ in range(8):
            blocks = [choi_state(random_clifford_circuit(2, 8, rng), 2) for _ in range(3)]
            lhs = fuse_blocks(fuse_blocks(blocks[0], blocks[1]), blocks[2])
            rhs = fuse_blocks(blocks[0], fuse_blocks(blocks[1], blocks[2]))
            assert states_equal(aligned_state(lhs), aligned_state(rhs))

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            fuse_blocks(encoder_block("rep3_phase"), decoder_block("ring5"))

    def test_port_reuse_rejected(self):
        a = choi_state(CliffordCircuit(1), 1)
        b = decoder_block("rep3_phase")
        with pytest.raises(ValueError):
            fuse_blocks(a, b, wiring=[("out.0", "in.0"), ("out.0", "in.1")])

    def test_ec_block_carries_code_stabilizers_on_both_sides(self):
        code = get_code("ring5")
        blk = ec_block(code)
        ins = [blk.in_ports[f"in.{k}"] for k in range(5)]
        outs = [blk.out_ports[f"out.{k}"] for k in range(5)]
        for g in code.stabilizer_generators:
            assert blk.state.expectation(g.embed(10, ins)) == 1
            assert blk.state.expectation(g.embed(10, outs)) == 1


class TestFunctionalCorrectness:
    def test_blocks_reproduce_their_circuit_on_eigenstates(self):
        # read in each of the 6 Pauli eigenstates per in-port, apply the frame,
        # compare against circuit(input); tableau-exact
        from bellfuse.pipeline import PipelineSpec, PipelineStep, run_pipeline
        from bellfuse.stabilizer import apply_clifford

        rng = np.random.default_rng(31)
        for name in ("h", "s", "cz", "cnot", "mix3"):
            circ = CIRCUIT_LIBRARY[name]
            n = max(circ.width, 1)
            blk = choi_state(circ, n)
            for letter in "XYZ":
                for sign in (1, -1):
                    gens = [PauliOperator.single(n, j, letter, sign) for j in range(n)]
                    # product eigenstate needs completion on remaining qubits
                    st = StabilizerState.from_generators(gens) if n == 1 else _product_eigen(n, letter, sign)
                    labels = [f"q{k}" for k in range(n)]
                    wiring = {f"in.{k}": labels[k] for k in range(n)}
                    spec = PipelineSpec(st, labels, [PipelineStep(blk, wiring)])
                    res = run_pipeline(spec, rng)
                    assert states_equal(res.state_with_frame(), apply_clifford(st, circ)), (name, letter, sign)


def _product_eigen(n, letter, sign):
    gens = [PauliOperator.single(n, j, letter, sign) for j in range(n)]
    return StabilizerState.from_generators(gens)


class TestMoveOperators:
    def test_moved_operator_acts_identically(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = int(rng.integers(1, 3))
            blk = choi_state(random_clifford_circuit(n, 10, rng), n)
            ins = sorted(blk.in_ports.values())
            p = PauliOperator(blk.n)
            for q in ins:
                letter = "IXYZ"[int(rng.integers(0, 4))]
                if letter != "I":
                    p = p * PauliOperator.single(blk.n, q, letter)
            moved = equivalent_on_complement(blk.state, p, ins)
            dv = dense.from_stabilizer(blk.state)
            assert dense.states_close(dv.apply_pauli(p), dv.apply_pauli(moved), tol=1e-10)

    def test_leaking_support_rejected(self):
        blk = choi_state(CliffordCircuit(1), 1)
        with pytest.raises(ValueError):
            equivalent_on_complement(blk.state, PauliOperator.from_string("XX"), [0])


class TestBlockJson:
    def test_round_trip(self):
        for builder in (lambda: encoder_block("ring5"),
                        lambda: code_switch_block("rep3_phase", "ring5"),
                        lambda: choi_state(CIRCUIT_LIBRARY["cz"], 2)):
            blk = builder()
            back = block_from_json(block_to_json(blk))
            assert states_equal(back.state, blk.state)
            assert back.in_ports == blk.in_ports and back.out_ports == blk.out_ports

    def test_format_field_required(self):
        with pytest.raises(ValueError):
            block_from_json('{"format": 2, "name": "x", "stabilizers": ["+X"], "ports": {"in": {}, "out": {}}}')

    def test_dot_export_mentions_ports(self):
        dot = encoder_block("rep3_phase").to_dot()
        assert "in.0" in dot and "out.2" in dot

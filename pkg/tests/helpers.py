"""Shared fixtures for the block-synthesis and acceptance tests."""

from bellfuse.blocks import ClusterPattern, ResourceBlock
from bellfuse.graphstate import GraphStateFrame, chain_graph
from bellfuse.stabilizer import CliffordCircuit, StabilizerState

CIRCUIT_LIBRARY = {
    "id1": CliffordCircuit(1),
    "h": CliffordCircuit.build(1, [("H", (0,))]),
    "s": CliffordCircuit.build(1, [("S", (0,))]),
    "hs": CliffordCircuit.build(1, [("H", (0,)), ("S", (0,))]),
    "sqrtx": CliffordCircuit.build(1, [("H", (0,)), ("S", (0,)), ("H", (0,))]),
    "x": CliffordCircuit.build(1, [("X", (0,))]),
    "cz": CliffordCircuit.build(2, [("CZ", (0, 1))]),
    "cnot": CliffordCircuit.build(2, [("CNOT", (0, 1))]),
    "bellprep": CliffordCircuit.build(2, [("H", (0,)), ("CNOT", (0, 1))]),
    "swap": CliffordCircuit.build(2, [("CNOT", (0, 1)), ("CNOT", (1, 0)), ("CNOT", (0, 1))]),
    "mix3": CliffordCircuit.build(3, [("H", (0,)), ("CNOT", (0, 1)), ("CZ", (1, 2)), ("S", (2,))]),
}


def pattern_library() -> list[tuple[str, ClusterPattern]]:
    """Hand-made cluster patterns covering wires, a CZ box and a bridged pair."""
    pats = []

    def wire(length: int, bases: str):
        g = chain_graph(length)
        meas = {f"v{i+1}": bases[i] for i in range(length - 2)}
        return ClusterPattern(g, ["v0"], [f"v{length-1}"], meas)

    pats.append(("chain2", wire(2, "")))
    pats.append(("chain3-X", wire(3, "X")))
    pats.append(("chain3-Y", wire(3, "Y")))
    pats.append(("chain4-XX", wire(4, "XX")))
    pats.append(("chain4-XY", wire(4, "XY")))
    pats.append(("chain5-XXX", wire(5, "XXX")))
    pats.append(("chain5-XYX", wire(5, "XYX")))
    pats.append(("chain5-YYY", wire(5, "YYY")))
    pats.append(("chain6-XXXX", wire(6, "XXXX")))
    box = GraphStateFrame(["i0", "o0", "i1", "o1"],
                          [("i0", "o0"), ("i1", "o1"), ("o0", "o1")])
    pats.append(("cz-box", ClusterPattern(box, ["i0", "i1"], ["o0", "o1"], {})))
    bridge = GraphStateFrame(
        ["i0", "m0", "o0", "i1", "m1", "o1"],
        [("i0", "m0"), ("m0", "o0"), ("i1", "m1"), ("m1", "o1"), ("m0", "m1")],
    )
    pats.append(("bridge-XX", ClusterPattern(bridge, ["i0", "i1"], ["o0", "o1"],
                                             {"m0": "X", "m1": "X"})))
    pats.append(("star-leaf-Z", ClusterPattern(
        GraphStateFrame(["hub", "a", "b", "c"], [("hub", "a"), ("hub", "b"), ("hub", "c")]),
        ["a"], ["b"], {"c": "Z", "hub": "Y"})))
    return pats


def aligned_state(block: ResourceBlock) -> StabilizerState:
    """Reorder a block's qubits to (in ports..., out ports...) for comparisons."""
    perm = [block.in_ports[p] for p in block.in_port_names()]
    perm += [block.out_ports[p] for p in block.out_port_names()]
    st = block.state
    return StabilizerState(st.n, st.x[:, perm], st.z[:, perm], st.r)

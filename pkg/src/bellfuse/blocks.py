"""Synthesis of minimal resource states for measurement-based building blocks.

Two construction routes are provided: the Choi route (apply a circuit to
halves of Bell pairs) and cluster reduction (Pauli-measure the redundant
vertices out of a graph-state pattern).  Encoder/decoder blocks, the rotation
gadget and build-time fusion of blocks live here as well.

Blocks are immutable after construction.  Build-time fusion forces Bell
outcomes to (0,0) wherever the outcome is free; outcomes that come out
deterministic are absorbed by applying the equivalent Pauli on the surviving
ports, so a finished block is always a plain stabilizer state with ports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import cliffords, gf2
from .codes import CodeSpec, get_code
from .graphstate import GraphStateFrame, stabilizer_to_graph
from .stabilizer import (
    CliffordCircuit,
    ForcedOutcomeError,
    PauliOperator,
    StabilizerState,
    states_equal,
    synthesize_clifford,
)


@dataclass
class ResourceBlock:
    """A stabilizer state with labelled input/output/open ports."""

    name: str
    state: StabilizerState
    in_ports: dict[str, int]
    out_ports: dict[str, int]
    open_ports: dict[str, int] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        used = list(self.in_ports.values()) + list(self.out_ports.values()) + list(self.open_ports.values())
        if len(set(used)) != len(used):
            raise ValueError("a qubit appears under two ports")
        if sorted(used) != list(range(self.state.n)):
            raise ValueError("every qubit must belong to exactly one port")

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def is_minimal_clifford(self) -> bool:
        return not self.open_ports and self.n == len(self.in_ports) + len(self.out_ports)

    def in_port_names(self) -> list[str]:
        return sorted(self.in_ports, key=_port_key)

    def out_port_names(self) -> list[str]:
        return sorted(self.out_ports, key=_port_key)

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "name": self.name,
            "n": self.n,
            "stabilizers": self.state.to_strings(),
            "ports": {
                "in": dict(self.in_ports),
                "out": dict(self.out_ports),
                "open": dict(self.open_ports),
            },
            "frame": "+" + "I" * self.n,  # corrections are absorbed at build time
            "metadata": _json_safe(self.metadata),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ResourceBlock":
        if d.get("format") != 1:
            raise ValueError("unsupported block format")
        state = StabilizerState.from_generators(d["stabilizers"])
        frame = d.get("frame")
        if frame:
            state.apply_pauli(PauliOperator.from_string(frame))
        return cls(
            name=d["name"],
            state=state,
            in_ports={k: int(v) for k, v in d["ports"]["in"].items()},
            out_ports={k: int(v) for k, v in d["ports"]["out"].items()},
            open_ports={k: int(v) for k, v in d["ports"].get("open", {}).items()},
            metadata=d.get("metadata", {}),
        )

    def to_dot(self) -> str:
        roles = {}
        labels = [str(i) for i in range(self.n)]
        for name, q in self.in_ports.items():
            roles[labels[q]] = name
        for name, q in self.out_ports.items():
            roles[labels[q]] = name
        for name, q in self.open_ports.items():
            roles[labels[q]] = name
        return stabilizer_to_graph(self.state, labels).to_dot(roles)


@dataclass
class GadgetBlock:
    """Rotation gadget: a 3-qubit block plus an open measurement qubit.

    The open qubit is measured in {e^{i a}|0> + e^{-i a}|1>, e^{i a}|0> - e^{-i a}|1>}
    after the read-in; `wire_frame` (identity for the X axis, Hadamard for Z)
    says in which local frame the gadget's virtual wire runs.  The sign of the
    measurement angle is flipped when the accumulated byproduct, expressed in
    the wire frame, has a Z component.
    """

    block: ResourceBlock
    axis: str
    wire_frame: cliffords.SingleClifford

    @property
    def name(self) -> str:
        return self.block.name


def _port_key(name: str):
    head, _, tail = name.partition(".")
    return (head, int(tail) if tail.isdigit() else 0, tail)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# -- construction routes -----------------------------------------------------


def choi_state(circuit: CliffordCircuit, n_in: int, name: str | None = None) -> ResourceBlock:
    """Resource state of a circuit via the channel-state isomorphism.

    n_in Bell pairs are prepared and the circuit acts on the second halves;
    the untouched halves are the in-ports.
    """
    if circuit.width > n_in:
        raise ValueError("circuit is wider than the declared input count")
    n = 2 * n_in
    st = StabilizerState.zero(n)
    for k in range(n_in):
        st.apply_gate("H", (k,))
        st.apply_gate("CNOT", (k, n_in + k))
    st.apply_circuit(circuit.on_qubits(n, list(range(n_in, n_in + circuit.width))))
    return ResourceBlock(
        name=name or f"choi[{len(circuit.gates)} gates, {n_in} in]",
        state=st,
        in_ports={f"in.{k}": k for k in range(n_in)},
        out_ports={f"out.{k}": n_in + k for k in range(n_in)},
        metadata={"kind": "choi", "circuit": [[g, list(qs)] for g, qs in circuit.gates],
                  "width": circuit.width, "n_in": n_in},
    )


@dataclass
class ClusterPattern:
    """A graph-state pattern: roles for port vertices, Pauli bases for the rest."""

    graph: GraphStateFrame
    in_vertices: list[str]
    out_vertices: list[str]
    measure: dict[str, str]  # vertex -> X / Y / Z
    open_vertices: list[str] = field(default_factory=list)

    def check(self) -> None:
        roles = set(self.in_vertices) | set(self.out_vertices) | set(self.open_vertices)
        measured = set(self.measure)
        if roles & measured:
            raise ValueError("a port vertex cannot also be measured")
        if roles | measured != set(self.graph.vertices):
            raise ValueError("every vertex needs a role or a measurement basis")
        for b in self.measure.values():
            if b not in "XYZ":
                raise ValueError("measurement bases must be Pauli")


def reduce_cluster(pattern: ClusterPattern, name: str | None = None) -> ResourceBlock:
    """Eliminate all Pauli-measured vertices (forced +1 outcomes, frame tracked)."""
    pattern.check()
    g = pattern.graph.copy()
    for v, basis in pattern.measure.items():
        _, g = g.measure_vertex(v, basis, forced=1)
    state = g.to_stabilizer()
    order = {v: i for i, v in enumerate(g.vertices)}
    return ResourceBlock(
        name=name or "cluster-reduced block",
        state=state,
        in_ports={f"in.{k}": order[v] for k, v in enumerate(pattern.in_vertices)},
        out_ports={f"out.{k}": order[v] for k, v in enumerate(pattern.out_vertices)},
        open_ports={f"open.{k}": order[v] for k, v in enumerate(pattern.open_vertices)},
        metadata={"kind": "cluster", "measured": dict(pattern.measure)},
    )


def encoder_block(code: CodeSpec | str) -> ResourceBlock:
    """M+1 qubit state (|0>|0_L> + |1>|1_L>)/sqrt(2): 1 in-port, M out-ports."""
    code = get_code(code) if isinstance(code, str) else code
    m = code.m
    st = StabilizerState.zero(2).tensor(StabilizerState.from_basis_string(code.ancilla))
    st.apply_gate("H", (0,))
    st.apply_gate("CNOT", (0, 1))
    st.apply_circuit(code.encode_circuit.on_qubits(m + 1, list(range(1, m + 1))))
    return ResourceBlock(
        name=f"encoder[{code.name}]",
        state=st,
        in_ports={"in.0": 0},
        out_ports={f"out.{k}": k + 1 for k in range(m)},
        metadata={"kind": "encoder", "code": code.name},
    )


def decoder_block(code: CodeSpec | str) -> ResourceBlock:
    """Same state as the encoder with the port roles swapped."""
    code = get_code(code) if isinstance(code, str) else code
    enc = encoder_block(code)
    return ResourceBlock(
        name=f"decoder[{code.name}]",
        state=enc.state,
        in_ports={f"in.{k}": k + 1 for k in range(code.m)},
        out_ports={"out.0": 0},
        metadata={"kind": "decoder", "code": code.name},
    )


def rotation_gadget(axis: str = "X") -> GadgetBlock:
    """Single-qubit rotation gadget on the 3-qubit star resource state.

    Axis X uses the bare state (|0>|+>|+> + |1>|->|->)/sqrt(2); axis Z is the
    same block with Hadamards on the two bottom (port) qubits.
    """
    if axis not in ("X", "Z"):
        raise ValueError("axis must be X or Z")
    st = StabilizerState.from_generators(["+XZZ", "+ZXI", "+ZIX"])  # star: open, in, out
    wire = cliffords.IDENTITY
    if axis == "Z":
        st.apply_gate("H", (1,))
        st.apply_gate("H", (2,))
        wire = cliffords.HADAMARD
    block = ResourceBlock(
        name=f"rotation[{axis}]",
        state=st,
        in_ports={"in.0": 1},
        out_ports={"out.0": 2},
        open_ports={"open.0": 0},
        metadata={"kind": "gadget", "axis": axis},
    )
    return GadgetBlock(block=block, axis=axis, wire_frame=wire)


# -- operator moving -----------------------------------------------------------


def equivalent_on_complement(state: StabilizerState, p: PauliOperator, support: list[int]
                             ) -> PauliOperator:
    """Find Q supported outside `support` with Q|state> = P|state> exactly.

    P must be supported inside `support`.  Q = G * P for a stabilizer group
    element G whose restriction to `support` matches P.
    """
    if p.n != state.n:
        raise ValueError("size mismatch")
    outside = [q for q in range(state.n) if q not in support]
    if p.x[outside].any() or p.z[outside].any():
        raise ValueError("operator leaks outside its declared support")
    cols = support + [state.n + q for q in support]
    mat = state.symplectic_matrix()[:, cols]
    rhs = np.concatenate([p.x[support], p.z[support]])
    sol = gf2.solve(mat, rhs)
    if sol is None:
        raise ValueError("no equivalent operator exists on the complement")
    g = PauliOperator.identity(state.n)
    for j in np.nonzero(sol)[0]:
        g = g * state.generator(int(j))
    q = g * p
    if q.x[support].any() or q.z[support].any():
        raise AssertionError("support did not cancel")
    return q


def move_to_out_ports(block: ResourceBlock, pauli_on_in: dict[str, PauliOperator]) -> PauliOperator:
    """Move a byproduct sitting on in-ports onto the out/open ports.

    `pauli_on_in` maps in-port names to single-qubit Paulis.  Returns the
    equivalent operator on the full block register (supported on non-in
    qubits); its action on the block state matches the input operator exactly.
    """
    p = PauliOperator.identity(block.n)
    for port, op in pauli_on_in.items():
        if port not in block.in_ports:
            raise KeyError(f"unknown in-port {port!r}")
        p = p * op.embed(block.n, [block.in_ports[port]])
    return equivalent_on_complement(block.state, p, sorted(block.in_ports.values()))


def realized_clifford(block: ResourceBlock) -> CliffordCircuit:
    """Extract the Clifford a square block implements (in-port k -> out-port k)."""
    ins = [block.in_ports[p] for p in block.in_port_names()]
    outs = [block.out_ports[p] for p in block.out_port_names()]
    if block.open_ports or len(ins) != len(outs):
        raise ValueError("only square Clifford blocks implement a circuit")
    k = len(ins)
    x_images, z_images = [], []
    for letter, images in (("X", x_images), ("Z", z_images)):
        for j in range(k):
            p = PauliOperator.single(block.n, ins[j], letter)
            q = equivalent_on_complement(block.state, p, ins)
            images.append(q.restrict(outs))
    return synthesize_clifford(x_images, z_images)


# -- fusion ---------------------------------------------------------------------


def _build_time_bell(state: StabilizerState, a: int, b: int) -> tuple[tuple[int, int], StabilizerState]:
    """Bell measure with the (0,0) convention, accepting deterministic bits."""
    try:
        return state.copy().bell_measure(a, b, forced=(0, 0))
    except ForcedOutcomeError:
        pass
    # At least one of the two parities is deterministic with value -1; let the
    # tableau tell us which by measuring without forcing the deterministic part.
    st = state.copy()
    xx = PauliOperator.single(st.n, a, "X") * PauliOperator.single(st.n, b, "X")
    zz = PauliOperator.single(st.n, a, "Z") * PauliOperator.single(st.n, b, "Z")
    try:
        o_xx = st.measure_pauli(xx, forced=1)
    except ForcedOutcomeError:
        o_xx = st.measure_pauli(xx)
    try:
        o_zz = st.measure_pauli(zz, forced=1)
    except ForcedOutcomeError:
        o_zz = st.measure_pauli(zz)
    lx, lz = xx.copy(), zz.copy()
    lx.r = (lx.r + (0 if o_xx == 1 else 2)) % 4
    lz.r = (lz.r + (0 if o_zz == 1 else 2)) % 4
    post = st.remove_qubits([a, b], [lx, lz])
    return ((0 if o_zz == 1 else 1), (0 if o_xx == 1 else 1)), post


def fuse_blocks(a: ResourceBlock, b: ResourceBlock, wiring: list[tuple[str, str]] | None = None,
                name: str | None = None) -> ResourceBlock:
    """Fuse blocks by Bell-measuring a's out-ports against b's in-ports.

    `wiring` lists (a_out_port, b_in_port) pairs; by default all of a's
    out-ports are wired to b's in-ports in port order.  Non-trivial build-time
    outcomes are cancelled by the equivalent Pauli on b's surviving ports, so
    the result realizes the clean composition.
    """
    if wiring is None:
        a_outs, b_ins = a.out_port_names(), b.in_port_names()
        if len(a_outs) != len(b_ins):
            raise ValueError("default wiring needs matching arities")
        wiring = list(zip(a_outs, b_ins))
    seen_a, seen_b = set(), set()
    for pa, pb in wiring:
        if pa not in a.out_ports or pb not in b.in_ports:
            raise KeyError(f"bad wiring pair ({pa!r}, {pb!r})")
        if pa in seen_a or pb in seen_b:
            raise ValueError("port wired twice")
        seen_a.add(pa)
        seen_b.add(pb)

    off = a.n
    joint = a.state.tensor(b.state)
    # byproducts seen at b's inputs, in b-local coordinates
    byproduct = PauliOperator.identity(b.n)
    positions = list(range(joint.n))  # original joint index -> current index

    def cur(i: int) -> int:
        if positions[i] < 0:
            raise AssertionError("qubit already consumed")
        return positions[i]

    bits_record = {}
    st = joint
    for pa, pb in wiring:
        qa, qb = cur(a.out_ports[pa]), cur(off + b.in_ports[pb])
        (s_x, s_z), st = _build_time_bell(st, qa, qb)
        bits_record[f"{pa}->{pb}"] = [s_x, s_z]
        if s_x or s_z:
            byproduct = byproduct * PauliOperator(
                b.n,
                s_x * np.eye(b.n, dtype=np.uint8)[b.in_ports[pb]],
                s_z * np.eye(b.n, dtype=np.uint8)[b.in_ports[pb]],
            )
        removed = sorted((qa, qb))
        for i in range(joint.n):
            if positions[i] in removed:
                positions[i] = -1
            elif positions[i] >= 0:
                positions[i] -= sum(1 for r in removed if r < positions[i])

    if byproduct.weight():
        moved = equivalent_on_complement(b.state, byproduct, sorted(b.in_ports.values()))
        # embed into surviving joint coordinates and cancel it
        fix = PauliOperator.identity(st.n)
        for j in range(b.n):
            if moved.x[j] or moved.z[j]:
                fix = fix * PauliOperator(st.n,
                                          int(moved.x[j]) * np.eye(st.n, dtype=np.uint8)[cur(off + j)],
                                          int(moved.z[j]) * np.eye(st.n, dtype=np.uint8)[cur(off + j)])
        st.apply_pauli(fix)

    in_ports = {k: cur(a.in_ports[k]) for k in a.in_ports}
    for k, q in b.in_ports.items():
        if k not in seen_b:
            in_ports[f"b:{k}"] = cur(off + q)
    out_ports = {k: cur(off + b.out_ports[k]) for k in b.out_ports}
    for k, q in a.out_ports.items():
        if k not in seen_a:
            out_ports[f"a:{k}"] = cur(q)
    open_ports = {f"a:{k}": cur(q) for k, q in a.open_ports.items()}
    open_ports.update({f"b:{k}": cur(off + q) for k, q in b.open_ports.items()})

    return ResourceBlock(
        name=name or f"fuse[{a.name} -> {b.name}]",
        state=st,
        in_ports=in_ports,
        out_ports=out_ports,
        open_ports=open_ports,
        metadata={
            "kind": "fused",
            "parts": [a.metadata, b.metadata],
            "build_bits": bits_record,
        },
    )


def code_switch_block(code_from: CodeSpec | str, code_to: CodeSpec | str) -> ResourceBlock:
    """Decoder of one code fused with the encoder of another."""
    code_from = get_code(code_from) if isinstance(code_from, str) else code_from
    code_to = get_code(code_to) if isinstance(code_to, str) else code_to
    blk = fuse_blocks(decoder_block(code_from), encoder_block(code_to),
                      name=f"switch[{code_from.name}->{code_to.name}]")
    blk.metadata.update({"kind": "switch", "code": code_from.name, "code_out": code_to.name})
    return blk


def ec_block(code: CodeSpec | str) -> ResourceBlock:
    """Error-correcting identity: decoder fused with encoder of the same code."""
    code = get_code(code) if isinstance(code, str) else code
    blk = fuse_blocks(decoder_block(code), encoder_block(code), name=f"ec[{code.name}]")
    blk.metadata.update({"kind": "ec", "code": code.name, "code_out": code.name})
    return blk


def block_to_json(block: ResourceBlock) -> str:
    return json.dumps(block.to_json_dict(), indent=2)


def block_from_json(text: str) -> ResourceBlock:
    return ResourceBlock.from_json_dict(json.loads(text))

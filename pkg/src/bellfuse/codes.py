"""Registry of error-correction codes: stabilizers, logicals, encoders, decoders.

Codes here describe one logical qubit in M physical qubits with M-1 stabilizer
generators.  The decoder returns the minimum-weight Pauli consistent with a
syndrome; ties are broken first by the number of elementary bit/phase flips
(so a Z beats a Y when both fit) and then lexicographically.

Registry names: rep3_phase, rep3_bit, ring5, rm15.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .stabilizer import CliffordCircuit, PauliOperator, StabilizerState, conjugate_pauli

_LETTER_RANK = {"X": 0, "Y": 1, "Z": 2}


@dataclass
class CodeSpec:
    """One logical qubit encoded in M physical qubits."""

    name: str
    m: int
    stabilizer_generators: list[PauliOperator]
    logical_x: PauliOperator
    logical_z: PauliOperator
    encode_circuit: CliffordCircuit
    ancilla: str  # basis string for qubits 1..M-1 fed to encode_circuit
    p_code: float | None = None
    p_code_provenance: str = ""
    notes: str = ""
    _decoder: dict[int, PauliOperator] | None = field(default=None, repr=False)
    _css_tables: tuple | None = field(default=None, repr=False)

    # -- syndromes -------------------------------------------------------

    @property
    def n_syndrome_bits(self) -> int:
        return self.m - 1

    def _gen_bits(self) -> tuple[np.ndarray, np.ndarray]:
        gx = np.stack([g.x for g in self.stabilizer_generators])
        gz = np.stack([g.z for g in self.stabilizer_generators])
        return gx, gz

    def syndrome_of(self, error: PauliOperator) -> np.ndarray:
        """Bit j is 1 iff the error anticommutes with generator j."""
        if error.n != self.m:
            raise ValueError("error width must match the code size")
        gx, gz = self._gen_bits()
        return ((gx @ error.z + gz @ error.x) % 2).astype(np.uint8)

    def syndromes_of_bits(self, ex: np.ndarray, ez: np.ndarray) -> np.ndarray:
        """Vectorised syndrome for arrays of error bit rows (trials x M)."""
        gx, gz = self._gen_bits()
        return (ez @ gx.T + ex @ gz.T) % 2

    # -- decoding ----------------------------------------------------------

    def decode(self, syndrome) -> PauliOperator:
        s = np.asarray(syndrome, dtype=np.uint8) & 1
        if s.shape != (self.n_syndrome_bits,):
            raise ValueError("syndrome length must be M-1")
        key = _pack(s)
        if self._decoder is not None:
            return self._decoder[key].copy()
        return self._decode_css(s)

    def _decode_css(self, s: np.ndarray) -> PauliOperator:
        x_checks, z_checks, x_leaders, z_leaders, x_rows, z_rows = self._css_tables
        s_from_z_errors = s[x_rows]   # X-type generators flag Z errors
        s_from_x_errors = s[z_rows]   # Z-type generators flag X errors
        ex = x_leaders[_pack(s_from_x_errors)]
        ez = z_leaders[_pack(s_from_z_errors)]
        return PauliOperator(self.m, ex, ez)

    # -- codewords -----------------------------------------------------------

    def logical_zero(self) -> StabilizerState:
        return StabilizerState.from_generators(self.stabilizer_generators + [self.logical_z])

    def logical_eigenstate(self, letter: str, sign: int = 1) -> StabilizerState:
        """Codeword fixed by sign * logical `letter` (the 6 logical Pauli eigenstates)."""
        if letter == "Z":
            op = self.logical_z.copy()
        elif letter == "X":
            op = self.logical_x.copy()
        elif letter == "Y":
            op = self.logical_x * self.logical_z
            op.r = (op.r + 1) % 4  # Y = i X Z
        else:
            raise ValueError("letter must be X, Y or Z")
        if sign == -1:
            op.r = (op.r + 2) % 4
        elif sign != 1:
            raise ValueError("sign must be +-1")
        return StabilizerState.from_generators(self.stabilizer_generators + [op])

    def encoded_input(self, single_qubit: StabilizerState) -> StabilizerState:
        """Encode a 1-qubit stabilizer state through the encoding circuit."""
        if single_qubit.n != 1:
            raise ValueError("input must be a single qubit")
        st = single_qubit.tensor(StabilizerState.from_basis_string(self.ancilla))
        st.apply_circuit(self.encode_circuit)
        return st

    def residual_logical_class(self, residual: PauliOperator) -> str:
        """Classify a zero-syndrome residual as logical I/X/Y/Z."""
        if self.syndrome_of(residual).any():
            raise ValueError("residual has a nonzero syndrome")
        anti_z = 0 if residual.commutes_with(self.logical_z) else 1  # logical X component
        anti_x = 0 if residual.commutes_with(self.logical_x) else 1  # logical Z component
        return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(anti_z, anti_x)]

    # -- consistency -------------------------------------------------------------

    def check_valid(self) -> None:
        gens = self.stabilizer_generators
        if len(gens) != self.m - 1:
            raise ValueError("need M-1 stabilizer generators")
        self.logical_zero().check_valid()
        for g in gens:
            if not (self.logical_x.commutes_with(g) and self.logical_z.commutes_with(g)):
                raise ValueError("logicals must commute with all generators")
        if self.logical_x.commutes_with(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if len(self.ancilla) != self.m - 1:
            raise ValueError("ancilla string must cover M-1 qubits")

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "name": self.name,
            "m": self.m,
            "stabilizers": [g.to_string() for g in self.stabilizer_generators],
            "logical_x": self.logical_x.to_string(),
            "logical_z": self.logical_z.to_string(),
            "ancilla": self.ancilla,
            "encode_gates": [[g, list(qs)] for g, qs in self.encode_circuit.gates],
            "p_code": self.p_code,
            "p_code_provenance": self.p_code_provenance,
        }


def _pack(bits: np.ndarray) -> int:
    return int(np.dot(bits.astype(np.int64), 1 << np.arange(bits.size, dtype=np.int64)))


def _pauli_sort_key(x: np.ndarray, z: np.ndarray) -> tuple:
    support = int(np.count_nonzero(x | z))
    flips = int(np.count_nonzero(x) + np.count_nonzero(z))
    letters = tuple(
        (j, _LETTER_RANK[{(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(int(x[j]), int(z[j]))]])
        for j in np.nonzero(x | z)[0]
    )
    return (support, flips, letters)


def _exhaustive_decoder(spec: CodeSpec) -> dict[int, PauliOperator]:
    """Coset-leader table over all 4^M Paulis (small codes only)."""
    m = spec.m
    candidates = []
    for letters in itertools.product("IXYZ", repeat=m):
        x = np.array([1 if c in "XY" else 0 for c in letters], dtype=np.uint8)
        z = np.array([1 if c in "YZ" else 0 for c in letters], dtype=np.uint8)
        candidates.append((x, z))
    candidates.sort(key=lambda xz: _pauli_sort_key(*xz))
    table: dict[int, PauliOperator] = {}
    for x, z in candidates:
        p = PauliOperator(m, x, z, int(np.count_nonzero(x & z)))
        key = _pack(spec.syndrome_of(p))
        if key not in table:
            table[key] = p
    if len(table) != 1 << spec.n_syndrome_bits:
        raise AssertionError(f"{spec.name}: decoder table does not cover all syndromes")
    return table


def _coset_leaders(checks: np.ndarray) -> np.ndarray:
    """Min-weight binary error pattern per syndrome of a classical check matrix."""
    r, n = checks.shape
    total = 1 << r
    leaders = -np.ones(total, dtype=np.int64)
    found = 0
    weights = np.zeros((total, n), dtype=np.uint8)
    for w in range(n + 1):
        if found == total:
            break
        for combo in itertools.combinations(range(n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(combo)] = 1
            key = _pack((checks @ e) % 2)
            if leaders[key] < 0:
                leaders[key] = 1
                weights[key] = e
                found += 1
                if found == total:
                    break
    if found != total:
        raise AssertionError("check matrix is not surjective onto syndromes")
    return weights


def _css_encode_circuit(m: int, x_gen_rows: np.ndarray, logical_x_bits: np.ndarray,
                        extra: list | None = None) -> tuple[CliffordCircuit, int]:
    """Standard CSS encoder: input on one qubit, |0> ancillas, H+CNOT fans.

    Returns (circuit over M qubits, input qubit index in codeword layout).
    The caller still has to relabel so the input sits on qubit 0.
    """
    rows = x_gen_rows.copy() % 2
    # reduced row echelon form with recorded pivots
    pivots = []
    rank = 0
    for c in range(m):
        hit = None
        for i in range(rank, rows.shape[0]):
            if rows[i, c]:
                hit = i
                break
        if hit is None:
            continue
        rows[[rank, hit]] = rows[[hit, rank]]
        for i in range(rows.shape[0]):
            if i != rank and rows[i, c]:
                rows[i] ^= rows[rank]
        pivots.append(c)
        rank += 1
    lx = logical_x_bits.copy() % 2
    for i, p in enumerate(pivots):
        if lx[p]:
            lx ^= rows[i]
    support = np.nonzero(lx)[0]
    if support.size == 0:
        raise ValueError("logical X reduced to a stabilizer")
    i0 = int(support[0])
    gates: list = []
    for j in support[1:]:
        gates.append(("CNOT", (i0, int(j))))
    for i, p in enumerate(pivots):
        gates.append(("H", (p,)))
        for j in np.nonzero(rows[i])[0]:
            if int(j) != p:
                gates.append(("CNOT", (p, int(j))))
    if extra:
        gates.extend(extra)
    return CliffordCircuit.build(m, gates), i0


def _relabel_input_first(circuit: CliffordCircuit, m: int, i0: int) -> CliffordCircuit:
    """Conjugate the qubit labels so the logical input is qubit 0."""
    if i0 == 0:
        return circuit
    perm = list(range(m))
    perm[0], perm[i0] = perm[i0], perm[0]
    return circuit.on_qubits(m, perm)


# -- the registry ------------------------------------------------------------


def _build_rep3_phase() -> CodeSpec:
    gens = [PauliOperator.from_string(s) for s in ("+XXI", "+IXX")]
    spec = CodeSpec(
        name="rep3_phase",
        m=3,
        stabilizer_generators=gens,
        logical_x=PauliOperator.from_string("+ZZZ"),
        logical_z=PauliOperator.from_string("+XII"),
        encode_circuit=CliffordCircuit.build(3, [("H", (0,)), ("CNOT", (1, 0)), ("CNOT", (2, 1))]),
        ancilla="++",
        notes="codewords |+++> / |--->; corrects one phase flip, none of the bit flips",
    )
    spec._decoder = _exhaustive_decoder(spec)
    return spec


def _build_rep3_bit() -> CodeSpec:
    gens = [PauliOperator.from_string(s) for s in ("+ZZI", "+IZZ")]
    spec = CodeSpec(
        name="rep3_bit",
        m=3,
        stabilizer_generators=gens,
        logical_x=PauliOperator.from_string("+XXX"),
        logical_z=PauliOperator.from_string("+ZII"),
        encode_circuit=CliffordCircuit.build(3, [("CNOT", (0, 1)), ("CNOT", (0, 2))]),
        ancilla="00",
        notes="codewords |000> / |111>; corrects one bit flip",
    )
    spec._decoder = _exhaustive_decoder(spec)
    return spec


def _ring5_k(j: int) -> PauliOperator:
    p = PauliOperator.single(5, j, "X")
    p = p * PauliOperator.single(5, (j - 1) % 5, "Z")
    p = p * PauliOperator.single(5, (j + 1) % 5, "Z")
    return p


def _build_ring5() -> CodeSpec:
    k = [_ring5_k(j) for j in range(5)]
    gens = [k[j] * k[j + 1] for j in range(4)]
    ring_edges = [("CZ", (j, (j + 1) % 5)) for j in range(5)]
    circuit = CliffordCircuit.build(
        5,
        [("CNOT", (0, j)) for j in range(1, 5)]
        + [("H", (j,)) for j in range(5)]
        + ring_edges,
    )
    spec = CodeSpec(
        name="ring5",
        m=5,
        stabilizer_generators=gens,
        logical_x=PauliOperator.from_string("+ZZZZZ"),
        logical_z=k[0],
        encode_circuit=circuit,
        ancilla="0000",
        p_code=0.8250,
        p_code_provenance="paper-constant (re-derived here by the concatenation fixed point)",
        notes="5-qubit ring cluster code; |0_L> is the ring graph state, |1_L> = Z^x5 |0_L>",
    )
    spec._decoder = _exhaustive_decoder(spec)
    return spec


def _build_rm15() -> CodeSpec:
    m = 15
    # qubit j <-> the nonzero 4-bit vector j+1
    def hyperplane(i: int) -> np.ndarray:
        return np.array([(j + 1) >> i & 1 for j in range(m)], dtype=np.uint8)

    x_rows = [hyperplane(i) for i in range(4)]
    z_rows = [hyperplane(i) for i in range(4)] + [
        hyperplane(i) & hyperplane(k) for i in range(4) for k in range(i + 1, 4)
    ]
    gens = [PauliOperator(m, row, np.zeros(m, np.uint8)) for row in x_rows]
    gens += [PauliOperator(m, np.zeros(m, np.uint8), row) for row in z_rows]
    x_checks = np.stack(x_rows)          # X-type generators: flag Z errors
    z_checks = np.stack(z_rows)          # Z-type generators: flag X errors
    circuit, i0 = _css_encode_circuit(m, np.stack(x_rows), np.ones(m, dtype=np.uint8))
    circuit = _relabel_input_first(circuit, m, i0)
    # Relabel the code data the same way so the encoder's input is qubit 0.
    perm = list(range(m))
    perm[0], perm[i0] = perm[i0], perm[0]
    inv = np.argsort(perm)
    x_checks = x_checks[:, inv]
    z_checks = z_checks[:, inv]
    gens = [PauliOperator(m, g.x[inv], g.z[inv], g.r) for g in gens]
    spec = CodeSpec(
        name="rm15",
        m=m,
        stabilizer_generators=gens,
        logical_x=PauliOperator(m, np.ones(m, np.uint8), np.zeros(m, np.uint8)),
        logical_z=PauliOperator(m, np.zeros(m, np.uint8), np.ones(m, np.uint8)),
        encode_circuit=circuit,
        ancilla="0" * (m - 1),
        p_code=0.981,
        p_code_provenance="paper-constant (stored, not re-derived)",
        notes="15-qubit punctured Reed-Muller CSS code with transversal pi/8; "
        "decoder = weight<=1 lookup plus CSS coset-leader fallback",
    )
    x_leaders = _coset_leaders(z_checks)  # X error patterns per Z-check syndrome
    z_leaders = _coset_leaders(x_checks)  # Z error patterns per X-check syndrome
    x_gen_rows = np.arange(0, 4)
    z_gen_rows = np.arange(4, 14)
    spec._css_tables = (x_checks, z_checks, x_leaders, z_leaders, x_gen_rows, z_gen_rows)
    return spec


_BUILDERS = {
    "rep3_phase": _build_rep3_phase,
    "rep3_bit": _build_rep3_bit,
    "ring5": _build_ring5,
    "rm15": _build_rm15,
}
_CACHE: dict[str, CodeSpec] = {}

CODE_NAMES = tuple(_BUILDERS)


def get_code(name: str) -> CodeSpec:
    if name not in _BUILDERS:
        raise KeyError(f"unknown code {name!r}; available: {', '.join(_BUILDERS)}")
    if name not in _CACHE:
        spec = _BUILDERS[name]()
        spec.check_valid()
        _CACHE[name] = spec
    return _CACHE[name]


def code_to_json(name: str) -> str:
    return json.dumps(get_code(name).to_json_dict(), indent=2)

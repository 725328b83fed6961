"""Small dense state-vector / density-matrix simulator.

This is the brute-force oracle the stabilizer machinery is checked against,
and the only engine that can apply the non-Clifford rotation of the gadget
blocks.  Hard caps: 12 qubits pure, 8 qubits mixed.  Comparisons are always
phase-insensitive (fidelity), never amplitude-wise.
"""

from __future__ import annotations

import numpy as np

from .stabilizer import CliffordCircuit, PauliOperator, StabilizerState

MAX_PURE = 12
MAX_MIXED = 8

ATOL = 1e-10

_GATE_MATRIX = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": _GATE_MATRIX["X"],
    "Y": _GATE_MATRIX["Y"],
    "Z": _GATE_MATRIX["Z"],
}


def rotation_matrix(axis: str, alpha: float) -> np.ndarray:
    """exp(-i alpha P) for P in {X, Z}."""
    p = PAULI_MATS[axis]
    return np.cos(alpha) * np.eye(2) - 1j * np.sin(alpha) * p


class DenseState:
    """Pure (vector) or mixed (matrix) dense quantum state."""

    def __init__(self, n: int, data: np.ndarray, mixed: bool):
        self.n = n
        self.data = np.asarray(data, dtype=complex)
        self.mixed = mixed
        cap = MAX_MIXED if mixed else MAX_PURE
        if n > cap:
            raise ValueError(f"{n} qubits exceeds the dense cap of {cap}")
        self._check()

    def _check(self) -> None:
        d = 1 << self.n
        if self.mixed:
            if self.data.shape != (d, d):
                raise ValueError("density matrix has wrong shape")
            if abs(np.trace(self.data) - 1.0) > 1e-12 * d:
                raise ValueError("trace != 1")
        else:
            if self.data.shape != (d,):
                raise ValueError("state vector has wrong shape")
            if abs(np.linalg.norm(self.data) - 1.0) > 1e-12 * d:
                raise ValueError("norm != 1")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_vector(cls, vec) -> "DenseState":
        v = np.asarray(vec, dtype=complex)
        n = int(round(np.log2(v.size)))
        v = v / np.linalg.norm(v)
        return cls(n, v, mixed=False)

    @classmethod
    def zero(cls, n: int) -> "DenseState":
        v = np.zeros(1 << n, dtype=complex)
        v[0] = 1.0
        return cls(n, v, mixed=False)

    def to_mixed(self) -> "DenseState":
        if self.mixed:
            return self.copy()
        return DenseState(self.n, np.outer(self.data, self.data.conj()), mixed=True)

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.data.copy(), self.mixed)

    # -- basic ops --------------------------------------------------------

    def tensor(self, other: "DenseState") -> "DenseState":
        if self.mixed != other.mixed:
            raise ValueError("cannot tensor pure with mixed")
        return DenseState(self.n + other.n, np.kron(self.data, other.data), self.mixed)

    @staticmethod
    def _apply_matrix_axes(t: np.ndarray, u: np.ndarray, axes) -> np.ndarray:
        k = len(axes)
        t = np.tensordot(u.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), list(axes)))
        return np.moveaxis(t, range(k), axes)

    def apply_unitary(self, u, qubits) -> "DenseState":
        """Apply a gate: a name from the Clifford set, or an explicit matrix."""
        if isinstance(u, str):
            mat = _GATE_MATRIX[u]
        else:
            mat = np.asarray(u, dtype=complex)
        k = len(qubits)
        if mat.shape != (1 << k, 1 << k):
            raise ValueError("matrix size does not match qubit count")
        if np.max(np.abs(mat @ mat.conj().T - np.eye(1 << k))) > ATOL:
            raise ValueError("matrix is not unitary")
        out = self.copy()
        if self.mixed:
            d = 1 << self.n
            t = out.data.reshape((2,) * (2 * self.n))
            t = self._apply_matrix_axes(t, mat, list(qubits))
            t = self._apply_matrix_axes(t, mat.conj(), [self.n + q for q in qubits])
            out.data = t.reshape(d, d)
        else:
            t = out.data.reshape((2,) * self.n)
            out.data = self._apply_matrix_axes(t, mat, list(qubits)).reshape(-1)
        return out

    def apply_circuit(self, circuit: CliffordCircuit) -> "DenseState":
        out = self
        for name, qs in circuit.gates:
            out = out.apply_unitary(name, qs)
        return out

    def apply_rotation(self, axis: str, alpha: float, qubit: int) -> "DenseState":
        return self.apply_unitary(rotation_matrix(axis, alpha), (qubit,))

    def apply_pauli(self, p: PauliOperator) -> "DenseState":
        out = self
        for j in range(p.n):
            letter = {(0, 0): None, (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(int(p.x[j]), int(p.z[j]))]
            if letter:
                out = out.apply_unitary(letter, (j,))
        return out

    # -- channels ----------------------------------------------------------

    def apply_ldn(self, qubit: int, p: float) -> "DenseState":
        """Local depolarizing noise D(p): rho -> p rho + (1-p)/2 I (x) tr_j rho."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not self.mixed:
            raise ValueError("LDN needs a mixed-state representation")
        d = 1 << self.n
        t = self.data.reshape((2,) * (2 * self.n))
        reduced = np.trace(t, axis1=qubit, axis2=self.n + qubit)
        t2 = np.zeros_like(t)
        eye = np.eye(2) / 2.0
        for a in range(2):
            for b in range(2):
                idx = [slice(None)] * (2 * self.n)
                idx[qubit], idx[self.n + qubit] = a, b
                t2[tuple(idx)] = eye[a, b] * reduced
        out = p * self.data + (1 - p) * t2.reshape(d, d)
        return DenseState(self.n, out, mixed=True)

    # -- measurement ---------------------------------------------------------

    def measure_projector(self, proj_vec: np.ndarray, qubits) -> tuple[float, "DenseState"]:
        """Probability and post-state for a rank-1 projection of `qubits`.

        `proj_vec` is the (normalized) state the qubits are projected onto;
        the measured qubits are removed from the register.
        """
        k = len(qubits)
        if self.mixed:
            d2 = 1 << (self.n - k)
            t = self.data.reshape((2,) * (2 * self.n))
            ket_axes = list(qubits)
            bra_axes = [self.n + q for q in qubits]
            v = proj_vec.reshape((2,) * k)
            t = np.tensordot(v.conj(), t, axes=(list(range(k)), ket_axes))
            remaining = [ax for ax in range(2 * self.n) if ax not in ket_axes]
            pos = [remaining.index(ax) for ax in bra_axes]
            t = np.tensordot(t, v, axes=(pos, list(range(k))))
            prob = float(np.real(np.einsum("ii->", t.reshape(d2, d2))))
            if prob < 1e-14:
                return 0.0, None
            return prob, DenseState(self.n - k, t.reshape(d2, d2) / prob, mixed=True)
        t = self.data.reshape((2,) * self.n)
        v = proj_vec.reshape((2,) * k)
        t = np.tensordot(v.conj(), t, axes=(list(range(k)), list(qubits)))
        vec = t.reshape(-1)
        prob = float(np.real(np.vdot(vec, vec)))
        if prob < 1e-14:
            return 0.0, None
        return prob, DenseState(self.n - k, vec / np.sqrt(prob), mixed=False)

    def fidelity(self, target: "DenseState") -> float:
        """<t|rho|t> against a pure target (or |<t|psi>|^2 for pure self)."""
        if target.mixed:
            raise ValueError("target must be pure")
        if target.n != self.n:
            raise ValueError("size mismatch")
        if self.mixed:
            return float(np.real(target.data.conj() @ self.data @ target.data))
        return float(abs(np.vdot(target.data, self.data)) ** 2)


BELL_VECTORS = {
    # (s_x, s_z) -> (1 (x) X^s_x Z^s_z)|phi+>, matching stabilizer.bell_measure
    (0, 0): np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    (0, 1): np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    (1, 0): np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    (1, 1): np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}


def bell_measure_dense(state: DenseState, a: int, b: int, rng=None,
                       forced: tuple[int, int] | None = None):
    """Dense Bell measurement mirroring StabilizerState.bell_measure."""
    outcomes = list(BELL_VECTORS)
    probs, posts = [], []
    for bits in outcomes:
        pr, post = state.measure_projector(BELL_VECTORS[bits], (a, b))
        probs.append(pr)
        posts.append(post)
    if forced is not None:
        i = outcomes.index(tuple(forced))
        if probs[i] < 1e-14:
            raise ValueError("forced Bell outcome has zero probability")
        return outcomes[i], posts[i]
    pr = np.array(probs) / sum(probs)
    i = int(rng.choice(4, p=pr))
    return outcomes[i], posts[i]


def from_stabilizer(state: StabilizerState) -> DenseState:
    """The unique pure state fixed by all generators (projector product)."""
    n = state.n
    if n > MAX_PURE:
        raise ValueError(f"{n} qubits exceeds the dense cap of {MAX_PURE}")
    dim = 1 << n
    idx = np.arange(dim)
    for seed in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[seed] = 1.0
        ok = True
        for i in range(n):
            g = state.generator(i)
            x_int = sum(1 << (n - 1 - j) for j in range(n) if g.x[j])
            z_int = sum(1 << (n - 1 - j) for j in range(n) if g.z[j])
            signs = (-1.0) ** np.bitwise_count(idx & z_int)
            gv = np.zeros_like(v)
            gv[idx ^ x_int] = (1j ** g.r) * signs * v
            v = (v + gv) / 2.0
            if np.linalg.norm(v) < 1e-9:
                ok = False
                break
        if ok:
            return DenseState.from_vector(v)
    raise AssertionError("no basis seed overlaps the stabilizer state")


def states_close(a: DenseState, b: DenseState, tol: float = ATOL) -> bool:
    """Phase-insensitive equality for pure states."""
    return a.fidelity(b) >= 1.0 - tol


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    m = np.array([[complex(p.phase)]])
    for j in range(p.n):
        letter = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(int(p.x[j]), int(p.z[j]))]
        m = np.kron(m, PAULI_MATS[letter])
    return m

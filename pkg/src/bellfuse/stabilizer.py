"""Binary-symplectic stabilizer formalism.

Pauli operators are stored in the normal form ``i^r * prod_j X_j^x[j] Z_j^z[j]``
with ``r`` tracked mod 4, so products and Clifford conjugations are pure bit
arithmetic (vectorised XORs over numpy uint8 rows).  A stabilizer state is the
list of its n generator rows; deterministic measurement outcomes are resolved
by GF(2) elimination against the generator matrix instead of carrying a
destabilizer tableau, which keeps every update rule small enough to audit.

Phases: generators of a valid state always display a sign of +1 or -1; the
+-i phases only show up transiently inside products (e.g. X*Z = -i Y).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2

GATE_NAMES = ("H", "S", "SDG", "CZ", "CNOT", "X", "Y", "Z")

_PAULI_FROM_BITS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS_FROM_PAULI = {v: k for k, v in _PAULI_FROM_BITS.items()}

_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


class ForcedOutcomeError(ValueError):
    """A forced measurement outcome contradicts a deterministic one."""


class PauliOperator:
    """An n-qubit Pauli with phase in {+1, -1, +i, -i}.

    Qubit 0 is the leftmost character in the string form, e.g.
    ``PauliOperator.from_string("+XZI")`` has X on qubit 0.
    """

    __slots__ = ("n", "x", "z", "r")

    def __init__(self, n: int, x=None, z=None, phase_pow: int = 0):
        self.n = n
        self.x = np.zeros(n, dtype=np.uint8) if x is None else np.asarray(x, dtype=np.uint8) & 1
        self.z = np.zeros(n, dtype=np.uint8) if z is None else np.asarray(z, dtype=np.uint8) & 1
        if self.x.shape != (n,) or self.z.shape != (n,):
            raise ValueError("bit vector length must equal qubit count")
        self.r = phase_pow % 4

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, sign: int = 1) -> "PauliOperator":
        p = cls(n)
        xb, zb = _BITS_FROM_PAULI[letter]
        p.x[qubit], p.z[qubit] = xb, zb
        p.r = (xb & zb) % 4  # Y = i XZ
        if sign == -1:
            p.r = (p.r + 2) % 4
        elif sign != 1:
            raise ValueError("sign must be +-1")
        return p

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        t = s.strip()
        r = 0
        for prefix, val in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if t.startswith(prefix):
                r = val
                t = t[len(prefix):]
                break
        if not t or any(c not in "IXYZ" for c in t):
            raise ValueError(f"bad Pauli string: {s!r}")
        n = len(t)
        p = cls(n)
        for j, c in enumerate(t):
            p.x[j], p.z[j] = _BITS_FROM_PAULI[c]
        p.r = (r + int(np.count_nonzero(p.x & p.z))) % 4
        return p

    # -- presentation --------------------------------------------------

    @property
    def phase(self) -> complex:
        """Displayed phase, with Y counted as the letter Y (not iXZ)."""
        return _PHASE_VALUE[self.display_pow]

    @property
    def display_pow(self) -> int:
        return (self.r - int(np.count_nonzero(self.x & self.z))) % 4

    def to_string(self) -> str:
        letters = "".join(_PAULI_FROM_BITS[(int(a), int(b))] for a, b in zip(self.x, self.z))
        return _PHASE_PREFIX[self.display_pow] + letters

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_string()!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliOperator)
            and self.n == other.n
            and self.r == other.r
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.n, self.r, self.x.tobytes(), self.z.tobytes()))

    # -- algebra -------------------------------------------------------

    def copy(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x.copy(), self.z.copy(), self.r)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("size mismatch")
        r = (self.r + other.r + 2 * int(np.count_nonzero(self.z & other.x))) % 4
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, r)

    def commutes_with(self, other: "PauliOperator") -> bool:
        s = int(np.count_nonzero(self.x & other.z)) + int(np.count_nonzero(self.z & other.x))
        return s % 2 == 0

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def tensor(self, other: "PauliOperator") -> "PauliOperator":
        return PauliOperator(
            self.n + other.n,
            np.concatenate([self.x, other.x]),
            np.concatenate([self.z, other.z]),
            (self.r + other.r) % 4,
        )

    def embed(self, n: int, qubits) -> "PauliOperator":
        """Place this operator on the given qubits of a larger register."""
        qubits = list(qubits)
        if len(qubits) != self.n:
            raise ValueError("qubit list must match operator size")
        p = PauliOperator(n, phase_pow=self.r)
        p.x[qubits] = self.x
        p.z[qubits] = self.z
        return p

    def restrict(self, qubits) -> "PauliOperator":
        qubits = list(qubits)
        return PauliOperator(len(qubits), self.x[qubits], self.z[qubits], self.r)


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered list of Clifford gates on a register of `width` qubits."""

    width: int
    gates: tuple = ()

    def __post_init__(self):
        for name, qubits in self.gates:
            if name not in GATE_NAMES:
                raise ValueError(f"unknown gate {name!r}")
            for q in qubits:
                if not 0 <= q < self.width:
                    raise ValueError(f"qubit index {q} out of range for width {self.width}")
            if name in ("CZ", "CNOT") and (len(qubits) != 2 or qubits[0] == qubits[1]):
                raise ValueError(f"{name} needs two distinct qubits")

    @classmethod
    def build(cls, width: int, gates) -> "CliffordCircuit":
        return cls(width, tuple((name, tuple(qs)) for name, qs in gates))

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: "CliffordCircuit") -> "CliffordCircuit":
        return CliffordCircuit(max(self.width, other.width), self.gates + other.gates)

    def on_qubits(self, width: int, qubits) -> "CliffordCircuit":
        """Re-target the circuit onto `qubits` of a `width`-qubit register."""
        qubits = list(qubits)
        gates = tuple((name, tuple(qubits[q] for q in qs)) for name, qs in self.gates)
        return CliffordCircuit(width, gates)

    def inverse(self) -> "CliffordCircuit":
        inv = []
        for name, qs in reversed(self.gates):
            if name == "S":
                inv.append(("SDG", qs))
            elif name == "SDG":
                inv.append(("S", qs))
            else:
                inv.append((name, qs))  # H, CZ, CNOT, X, Y, Z are involutions
        return CliffordCircuit(self.width, tuple(inv))


# -- row-level gate conjugation rules ----------------------------------
# Rows are (x, z, r) in the i^r X^x Z^z normal form; each rule conjugates
# the represented Pauli by the gate.


def _rows_apply_gate(x: np.ndarray, z: np.ndarray, r: np.ndarray, name: str, qs) -> None:
    if name == "H":
        a = qs[0]
        r += 2 * (x[:, a] & z[:, a])
        x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
    elif name == "S":
        a = qs[0]
        r += x[:, a]
        z[:, a] ^= x[:, a]
    elif name == "SDG":
        a = qs[0]
        r += 3 * x[:, a]
        z[:, a] ^= x[:, a]
    elif name == "CNOT":
        c, t = qs
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]
    elif name == "CZ":
        c, t = qs
        r += 2 * (x[:, c] & x[:, t])
        z[:, c] ^= x[:, t]
        z[:, t] ^= x[:, c]
    elif name == "X":
        a = qs[0]
        r += 2 * z[:, a]
    elif name == "Y":
        a = qs[0]
        r += 2 * (x[:, a] ^ z[:, a])
    elif name == "Z":
        a = qs[0]
        r += 2 * x[:, a]
    else:
        raise ValueError(f"unknown gate {name!r}")
    r %= 4


class StabilizerState:
    """Pure n-qubit stabilizer state given by n generator rows."""

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.n = n
        self.x = x
        self.z = z
        self.r = r

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "StabilizerState":
        """|0...0>, stabilized by Z_j."""
        if n < 1:
            raise ValueError("need at least one qubit")
        return cls(n, np.zeros((n, n), np.uint8), np.eye(n, dtype=np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def plus(cls, n: int) -> "StabilizerState":
        """|+...+>, stabilized by X_j."""
        if n < 1:
            raise ValueError("need at least one qubit")
        return cls(n, np.eye(n, dtype=np.uint8), np.zeros((n, n), np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_generators(cls, gens) -> "StabilizerState":
        ops = [g if isinstance(g, PauliOperator) else PauliOperator.from_string(g) for g in gens]
        n = ops[0].n
        if len(ops) != n or any(op.n != n for op in ops):
            raise ValueError("need exactly n commuting generators on n qubits")
        st = cls(
            n,
            np.stack([op.x for op in ops]),
            np.stack([op.z for op in ops]),
            np.array([op.r for op in ops], dtype=np.uint8),
        )
        st.check_valid()
        return st

    @classmethod
    def from_basis_string(cls, s: str) -> "StabilizerState":
        """Product state from characters in '01+-' (qubit 0 first)."""
        st = cls.zero(len(s))
        for j, c in enumerate(s):
            if c == "1":
                st.apply_gate("X", (j,))
            elif c == "+":
                st.apply_gate("H", (j,))
            elif c == "-":
                st.apply_gate("X", (j,))
                st.apply_gate("H", (j,))
            elif c != "0":
                raise ValueError(f"bad basis character {c!r}")
        return st

    # -- bookkeeping ----------------------------------------------------

    def copy(self) -> "StabilizerState":
        return StabilizerState(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    def generator(self, i: int) -> PauliOperator:
        return PauliOperator(self.n, self.x[i].copy(), self.z[i].copy(), int(self.r[i]))

    def generators(self) -> list[PauliOperator]:
        return [self.generator(i) for i in range(self.n)]

    def to_strings(self) -> list[str]:
        return [g.to_string() for g in self.generators()]

    def __repr__(self) -> str:
        return "StabilizerState[" + ", ".join(self.to_strings()) + "]"

    def symplectic_matrix(self) -> np.ndarray:
        return np.concatenate([self.x, self.z], axis=1)

    def check_valid(self) -> None:
        n = self.n
        if gf2.rank(self.symplectic_matrix()) != n:
            raise ValueError("generators are not independent")
        gram = (self.x @ self.z.T + self.z @ self.x.T) % 2
        if gram.any():
            raise ValueError("generators do not all commute")
        ycount = np.count_nonzero(self.x & self.z, axis=1)
        if ((self.r - ycount) % 2 != 0).any():
            raise ValueError("generator phases must be +-1")

    def tensor(self, other: "StabilizerState") -> "StabilizerState":
        n = self.n + other.n
        x = np.zeros((n, n), np.uint8)
        z = np.zeros((n, n), np.uint8)
        x[: self.n, : self.n] = self.x
        z[: self.n, : self.n] = self.z
        x[self.n :, self.n :] = other.x
        z[self.n :, self.n :] = other.z
        return StabilizerState(n, x, z, np.concatenate([self.r, other.r]).astype(np.uint8))

    # -- evolution -------------------------------------------------------

    def apply_gate(self, name: str, qubits) -> None:
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit index {q} out of range")
        _rows_apply_gate(self.x, self.z, self.r, name, tuple(qubits))

    def apply_circuit(self, circuit: CliffordCircuit) -> None:
        if circuit.width > self.n:
            raise ValueError("circuit is wider than the state")
        for name, qs in circuit.gates:
            self.apply_gate(name, qs)

    def apply_pauli(self, p: PauliOperator) -> None:
        """Apply a Pauli as a gate: generator signs flip where they anticommute."""
        if p.n != self.n:
            raise ValueError("size mismatch")
        anti = (self.x @ p.z + self.z @ p.x) % 2
        self.r = (self.r + 2 * anti.astype(np.uint8)) % 4

    # -- measurement ------------------------------------------------------

    def expectation(self, p: PauliOperator) -> int:
        """+1/-1 if p is (up to sign) in the stabilizer group, else 0."""
        if p.n != self.n:
            raise ValueError("size mismatch")
        anti = (self.x @ p.z + self.z @ p.x) % 2
        if anti.any():
            return 0
        sol = gf2.solve(self.symplectic_matrix(), p.symplectic())
        if sol is None:
            return 0
        prod = PauliOperator.identity(self.n)
        for j in np.nonzero(sol)[0]:
            prod = prod * self.generator(int(j))
        delta = (prod.r - p.r) % 4
        if delta == 0:
            return 1
        if delta == 2:
            return -1
        raise AssertionError("group member with imaginary relative phase")

    def measure_pauli(self, observable: PauliOperator, rng=None, forced: int | None = None) -> int:
        """Measure a +-1 Pauli observable in place. Returns the outcome (+-1).

        Random outcomes are drawn from `rng` unless `forced` is given.
        Forcing a deterministic measurement to the wrong value raises
        ForcedOutcomeError.
        """
        if observable.n != self.n:
            raise ValueError("size mismatch")
        if observable.display_pow not in (0, 2):
            raise ValueError("observable phase must be +-1")
        anti = ((self.x @ observable.z + self.z @ observable.x) % 2).astype(bool)
        hits = np.nonzero(anti)[0]
        if hits.size == 0:
            outcome = self.expectation(observable)
            if outcome == 0:
                raise AssertionError("commuting observable not in +-group")
            if forced is not None and forced != outcome:
                raise ForcedOutcomeError(
                    f"measurement of {observable.to_string()} is deterministic ({outcome:+d})"
                )
            return outcome
        if forced is not None:
            if forced not in (1, -1):
                raise ValueError("forced outcome must be +-1")
            outcome = forced
        else:
            if rng is None:
                raise ValueError("random measurement needs an rng")
            outcome = 1 if rng.integers(0, 2) == 0 else -1
        pivot = int(hits[0])
        gp = self.generator(pivot)
        for i in hits[1:]:
            gi = self.generator(int(i)) * gp
            self.x[i], self.z[i], self.r[i] = gi.x, gi.z, gi.r
        self.x[pivot] = observable.x
        self.z[pivot] = observable.z
        self.r[pivot] = (observable.r + (0 if outcome == 1 else 2)) % 4
        return outcome

    # -- qubit removal ------------------------------------------------------

    def _materialize(self, p: PauliOperator, forbidden=()) -> int:
        """Make +-p an explicit generator row; returns its row index.

        p must commute with the whole group and be a member up to sign.
        Rows in `forbidden` are left untouched (they hold generators that were
        materialized earlier and must survive).
        """
        sol = gf2.solve(self.symplectic_matrix(), p.symplectic())
        if sol is None:
            raise ValueError(f"{p.to_string()} is not in the stabilizer group")
        rows = [int(j) for j in np.nonzero(sol)[0]]
        free = [j for j in rows if j not in forbidden]
        if not free:
            raise ValueError("local generators are not independent")
        pivot = free[0]
        if len(rows) > 1:
            g = self.generator(rows[0])
            for j in rows[1:]:
                g = g * self.generator(j)
            self.x[pivot], self.z[pivot], self.r[pivot] = g.x, g.z, g.r
        return pivot

    def remove_qubits(self, qubits, local_generators) -> "StabilizerState":
        """Drop disentangled qubits, given +-1 generators of their local state.

        `local_generators` are PauliOperators on the full register, supported
        only on `qubits`, one per removed qubit (e.g. the +-XX and +-ZZ rows
        of a measured Bell pair).  Returns a new state on n-k qubits.
        """
        qubits = list(qubits)
        k = len(qubits)
        if len(local_generators) != k:
            raise ValueError("need one local generator per removed qubit")
        keep = [q for q in range(self.n) if q not in qubits]
        st = self.copy()
        pivot_rows = []
        for p in local_generators:
            if (p.x[keep].any() or p.z[keep].any()):
                raise ValueError("local generator touches surviving qubits")
            pivot_rows.append(st._materialize(p, forbidden=pivot_rows))
        # Sweep the removed-qubit support out of every other row.
        local = st.symplectic_matrix()[pivot_rows][:, qubits + [self.n + q for q in qubits]]
        for i in range(st.n):
            if i in pivot_rows:
                continue
            pattern = np.concatenate([st.x[i, qubits], st.z[i, qubits]])
            if not pattern.any():
                continue
            sol = gf2.solve(local, pattern)
            if sol is None:
                raise ValueError("qubits are still entangled with the rest")
            g = st.generator(i)
            for j in np.nonzero(sol)[0]:
                g = g * st.generator(pivot_rows[int(j)])
            st.x[i], st.z[i], st.r[i] = g.x, g.z, g.r
        rows = [i for i in range(st.n) if i not in pivot_rows]
        out = StabilizerState(
            self.n - k,
            st.x[np.ix_(rows, keep)].copy(),
            st.z[np.ix_(rows, keep)].copy(),
            st.r[rows].copy(),
        )
        return out

    def measure_and_remove(self, observable: PauliOperator, qubit: int, rng=None,
                           forced: int | None = None) -> tuple[int, "StabilizerState"]:
        """Measure a single-qubit observable and drop that qubit."""
        outcome = self.measure_pauli(observable, rng=rng, forced=forced)
        local = observable.copy()
        local.r = (local.r + (0 if outcome == 1 else 2)) % 4
        return outcome, self.remove_qubits([qubit], [local])

    def bell_measure(self, a: int, b: int, rng=None,
                     forced: tuple[int, int] | None = None) -> tuple[tuple[int, int], "StabilizerState"]:
        """Bell measurement on qubits a, b; returns ((s_x, s_z), reduced state).

        Measures X_a X_b then Z_a Z_b and removes both qubits.  The returned
        bits name the byproduct: the pair is projected onto
        (1 (x) X^s_x Z^s_z)|phi+>, so a state teleported through the pair picks
        up X^s_x Z^s_z.  In terms of raw outcomes, s_x is the Z_a Z_b bit and
        s_z is the X_a X_b bit.
        """
        if a == b:
            raise ValueError("bell_measure needs two distinct qubits")
        xx = PauliOperator.single(self.n, a, "X") * PauliOperator.single(self.n, b, "X")
        zz = PauliOperator.single(self.n, a, "Z") * PauliOperator.single(self.n, b, "Z")
        f_xx = f_zz = None
        if forced is not None:
            s_x, s_z = forced
            f_xx = 1 if s_z == 0 else -1
            f_zz = 1 if s_x == 0 else -1
        o_xx = self.measure_pauli(xx, rng=rng, forced=f_xx)
        o_zz = self.measure_pauli(zz, rng=rng, forced=f_zz)
        s_x = 0 if o_zz == 1 else 1
        s_z = 0 if o_xx == 1 else 1
        lx = xx.copy()
        lx.r = (lx.r + (0 if o_xx == 1 else 2)) % 4
        lz = zz.copy()
        lz.r = (lz.r + (0 if o_zz == 1 else 2)) % 4
        post = self.remove_qubits([a, b], [lx, lz])
        return (s_x, s_z), post


def states_equal(a: StabilizerState, b: StabilizerState) -> bool:
    """True iff the stabilizer groups (including signs) are identical."""
    if a.n != b.n:
        raise ValueError("size mismatch")
    for i in range(b.n):
        if a.expectation(b.generator(i)) != 1:
            return False
    return True


def apply_clifford(state: StabilizerState, circuit: CliffordCircuit) -> StabilizerState:
    """Functional wrapper: returns a new conjugated state."""
    out = state.copy()
    out.apply_circuit(circuit)
    return out


# -- Clifford synthesis -------------------------------------------------


def synthesize_clifford(x_images: list[PauliOperator], z_images: list[PauliOperator]) -> CliffordCircuit:
    """Build a circuit U with U X_i U^dag = x_images[i], U Z_i U^dag = z_images[i].

    The images must form a valid Clifford tableau (right commutation relations,
    +-1 phases).  Gaussian elimination applies gates until the tableau is the
    identity; the circuit is the inverse of that gate list.
    """
    n = x_images[0].n
    if len(x_images) != n or len(z_images) != n:
        raise ValueError("need n X-images and n Z-images")
    xs = np.stack([p.x for p in x_images] + [p.x for p in z_images])
    zs = np.stack([p.z for p in x_images] + [p.z for p in z_images])
    rs = np.array([p.r for p in x_images] + [p.r for p in z_images], dtype=np.uint8)

    applied: list[tuple[str, tuple]] = []

    def do(name: str, qs: tuple) -> None:
        _rows_apply_gate(xs, zs, rs, name, qs)
        applied.append((name, qs))

    def row_sign(i: int) -> int:
        ycount = int(np.count_nonzero(xs[i] & zs[i]))
        d = (int(rs[i]) - ycount) % 4
        if d == 0:
            return 1
        if d == 2:
            return -1
        raise ValueError("tableau row has imaginary phase")

    for i in range(n):
        zrow = n + i
        # Fix the Z_i image to +Z_i.
        for j in range(i, n):
            if xs[zrow, j]:
                if zs[zrow, j]:
                    do("S", (j,))
                do("H", (j,))
        if not zs[zrow, i]:
            j = next(int(c) for c in range(i, n) if zs[zrow, c])
            do("CNOT", (i, j))
        for j in range(i + 1, n):
            if zs[zrow, j]:
                do("CNOT", (j, i))
        if row_sign(zrow) == -1:
            do("X", (i,))
        # Fix the X_i image to +X_i (it already anticommutes with Z_i).
        for j in range(i + 1, n):
            if xs[i, j]:
                do("CNOT", (i, j))
        for j in range(i + 1, n):
            if zs[i, j]:
                do("CZ", (i, j))
        if zs[i, i]:
            do("S", (i,))
        if row_sign(i) == -1:
            do("Z", (i,))
    # applied o U = identity  =>  U = applied^{-1}
    return CliffordCircuit.build(n, applied).inverse()


def conjugate_pauli(circuit: CliffordCircuit, p: PauliOperator) -> PauliOperator:
    """U p U^dag for the circuit U (width must cover p)."""
    x = p.x[np.newaxis, :].copy()
    z = p.z[np.newaxis, :].copy()
    r = np.array([p.r], dtype=np.uint8)
    for name, qs in circuit.gates:
        _rows_apply_gate(x, z, r, name, qs)
    return PauliOperator(p.n, x[0], z[0], int(r[0]))


# -- test helpers --------------------------------------------------------


def random_clifford_circuit(n: int, length: int, rng) -> CliffordCircuit:
    gates = []
    for _ in range(length):
        kind = rng.integers(0, 6)
        if kind <= 1 and n >= 2:
            name = "CNOT" if kind == 0 else "CZ"
            a, b = rng.choice(n, size=2, replace=False)
            gates.append((name, (int(a), int(b))))
        else:
            name = ("H", "S", "X", "Z")[int(rng.integers(0, 4))]
            gates.append((name, (int(rng.integers(0, n)),)))
    return CliffordCircuit.build(n, gates)


def random_stabilizer_state(n: int, rng, length: int | None = None) -> StabilizerState:
    st = StabilizerState.zero(n)
    st.apply_circuit(random_clifford_circuit(n, length or 3 * n + 8, rng))
    return st

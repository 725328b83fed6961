"""The 24 single-qubit Cliffords as a fixed lookup table.

Graph-state frames store one table index per vertex.  The table is generated
at import time by closing {H, S} under multiplication of 2x2 matrices, so the
conjugation data (images of X and Z, with signs) is derived from actual
matrices rather than hand-written rules.  Composition and inversion are
precomputed index maps.
"""

from __future__ import annotations

import numpy as np

from .stabilizer import PauliOperator

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


def _image(mat: np.ndarray, letter: str) -> tuple[str, int]:
    img = mat @ _PAULI[letter] @ mat.conj().T
    for name in ("X", "Y", "Z"):
        for sign in (1, -1):
            if np.allclose(img, sign * _PAULI[name], atol=1e-9):
                return name, sign
    raise AssertionError("conjugation image is not a signed Pauli")


def _single(letter: str, sign: int) -> PauliOperator:
    return PauliOperator.single(1, 0, letter, sign)


class SingleClifford:
    """One of the 24 single-qubit Cliffords (up to global phase)."""

    __slots__ = ("index", "word", "matrix", "img_x", "img_z")

    def __init__(self, index: int, word: str, matrix: np.ndarray):
        self.index = index
        self.word = word or "I"
        self.matrix = matrix
        lx, sx = _image(matrix, "X")
        lz, sz = _image(matrix, "Z")
        self.img_x = _single(lx, sx)
        self.img_z = _single(lz, sz)

    def __repr__(self) -> str:
        return f"SingleClifford({self.word})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SingleClifford) and self.index == other.index

    def __hash__(self):
        return hash(self.index)

    @property
    def key(self) -> tuple:
        return (self.img_x.to_string(), self.img_z.to_string())

    def gate_word(self) -> tuple[str, ...]:
        """Gates realizing this Clifford, leftmost applied first."""
        return tuple(self.word) if self.word != "I" else ()

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """U p U^dag for a single-qubit Pauli p (n == 1)."""
        if p.n != 1:
            raise ValueError("conjugate takes a single-qubit Pauli")
        out = PauliOperator.identity(1)
        out.r = p.r
        if p.x[0]:
            out = out * self.img_x
        if p.z[0]:
            out = out * self.img_z
        return out

    def __matmul__(self, other: "SingleClifford") -> "SingleClifford":
        """Composition: (a @ b) acts as a after b."""
        return _COMPOSE[self.index][other.index]

    def inverse(self) -> "SingleClifford":
        return _INVERSE[self.index]


def _build_table() -> list[SingleClifford]:
    """BFS closure of {H, S}; index 0 is the identity."""
    elems: list[tuple[str, np.ndarray]] = [("", np.eye(2, dtype=complex))]
    seen = {(("X", 1), ("Z", 1)): 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            word, mat = elems[i]
            for gname, gmat in (("H", _H), ("S", _S)):
                m2 = gmat @ mat
                key = (_image(m2, "X"), _image(m2, "Z"))
                if key not in seen:
                    seen[key] = len(elems)
                    # word lists gates applied left-to-right on the state
                    elems.append((word + gname, m2))
                    nxt.append(len(elems) - 1)
        frontier = nxt
    assert len(elems) == 24
    return [SingleClifford(i, w, m) for i, (w, m) in enumerate(elems)]


TABLE: list[SingleClifford] = _build_table()
_BY_KEY = {c.key: c for c in TABLE}
IDENTITY = TABLE[0]


def _classify(mat: np.ndarray) -> SingleClifford:
    key = (
        _single(*_image(mat, "X")).to_string(),
        _single(*_image(mat, "Z")).to_string(),
    )
    return _BY_KEY[key]


_COMPOSE = [[_classify(a.matrix @ b.matrix) for b in TABLE] for a in TABLE]
_INVERSE = [_classify(np.linalg.inv(c.matrix)) for c in TABLE]


def by_name(word: str) -> SingleClifford:
    """Look up by a gate word over H/S/X/Y/Z (leftmost applied first)."""
    mats = {"H": _H, "S": _S, "X": _PAULI["X"], "Y": _PAULI["Y"], "Z": _PAULI["Z"], "I": np.eye(2)}
    m = np.eye(2, dtype=complex)
    for g in word:
        m = mats[g] @ m
    return _classify(m)


def from_images(img_x: PauliOperator, img_z: PauliOperator) -> SingleClifford:
    return _BY_KEY[(img_x.to_string(), img_z.to_string())]


def pauli_clifford(letter: str) -> SingleClifford:
    return by_name(letter) if letter != "I" else IDENTITY


SQRT_X_CLASS = _classify(np.array([[1, -1j], [-1j, 1]], dtype=complex) / np.sqrt(2))  # exp(-i pi X / 4)
SQRT_X_DAG_CLASS = SQRT_X_CLASS.inverse()
SQRT_Z_CLASS = _classify(np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)]))  # exp(-i pi Z / 4)
SQRT_Z_DAG_CLASS = SQRT_Z_CLASS.inverse()
HADAMARD = by_name("H")


def conjugate_by_frames(p: PauliOperator, frames: list[SingleClifford]) -> PauliOperator:
    """(U_0 (x) ... (x) U_{n-1}) p (...)^dag with one frame per qubit."""
    if len(frames) != p.n:
        raise ValueError("need one frame per qubit")
    out = PauliOperator(p.n, phase_pow=p.r)
    extra = 0
    for j, c in enumerate(frames):
        local = PauliOperator(1, [p.x[j]], [p.z[j]], 0)
        img = c.conjugate(local)
        out.x[j], out.z[j] = img.x[0], img.z[0]
        extra += img.r
    out.r = (out.r + extra) % 4
    return out

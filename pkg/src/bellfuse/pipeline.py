"""Runtime engine: sequential Bell-measured composition of resource blocks.

A pipeline owns a live register (labelled qubits), consumes blocks step by
step via Bell measurements on (live qubit, block in-port) pairs, and tracks
the random byproducts in a Pauli frame.  Decoder-type read-ins additionally
yield error syndromes: for each code generator g, the parity of the Bell bits
matching g's support is deterministic up to the tracked frame, and deviations
are exactly the syndrome of the accumulated physical error.

Clifford pipelines run on the stabilizer tableau.  A rotation-gadget step
switches the run to the dense engine (the state leaves the stabilizer set),
which caps such pipelines at 12 live+block qubits - enough for one encoded
rotation at desk scale.

The engine also keeps a `known_error` tracker fed by its own noise sampling
and injections; it exists so simulations can label syndromes with the true
residual (success / logical X/Y/Z), and has no physical counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dense
from .blocks import GadgetBlock, ResourceBlock, equivalent_on_complement
from .codes import get_code
from .stabilizer import PauliOperator, StabilizerState

_LETTERS = ("I", "X", "Y", "Z")
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def sample_twirl_letters(p: float, count: int, rng) -> np.ndarray:
    """i.i.d. letters 0..3 (I,X,Y,Z) from the Pauli twirl of D(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    probs = [(1 + 3 * p) / 4] + [(1 - p) / 4] * 3
    return rng.choice(4, size=count, p=probs)


@dataclass
class PauliFrame:
    """Pending byproduct bits per live label, plus the Bell-bit history."""

    x: dict[str, int] = field(default_factory=dict)
    z: dict[str, int] = field(default_factory=dict)
    history: list = field(default_factory=list)

    def bits(self, label: str) -> tuple[int, int]:
        return self.x.get(label, 0), self.z.get(label, 0)

    def set_bits(self, label: str, fx: int, fz: int) -> None:
        self.x[label], self.z[label] = int(fx) & 1, int(fz) & 1

    def pending(self, labels: list[str]) -> PauliOperator:
        p = PauliOperator(len(labels))
        for j, lab in enumerate(labels):
            p.x[j], p.z[j] = self.bits(lab)
        p.r = int(np.count_nonzero(p.x & p.z)) % 4
        return p


@dataclass
class SyndromeRecord:
    """One decoder-type read-in: syndrome bits and the inferred correction.

    `failure_class` is only set in simulation mode (known injected/sampled
    errors) and classifies the cumulative frame-corrected residual up to this
    step - for a chain of EC rounds, the last record carries the final verdict.
    """

    step: int
    code: str
    syndrome: tuple[int, ...]
    correction: PauliOperator
    failure_class: str | None = None

    @property
    def is_failure(self) -> bool | None:
        return None if self.failure_class is None else self.failure_class != "I"


@dataclass
class PipelineStep:
    block: ResourceBlock | GadgetBlock
    wiring: dict[str, str]  # block in-port name -> live label
    noise: str = "none"  # which block qubits get LDN(p): none | in | out | all
    angle: float | None = None  # rotation gadgets only
    inject: dict[str, str] | None = None  # live label -> Pauli letter, pre-read-in
    forced_bits: dict[str, tuple[int, int]] | None = None
    forced_open: int | None = None
    extract: bool | None = None  # default: decoder-type blocks extract a syndrome


@dataclass
class PipelineSpec:
    initial: StabilizerState
    labels: list[str]
    steps: list[PipelineStep]
    noise_p: float = 1.0
    noise_q: float = 1.0
    initial_noise: bool = False
    corrections: str = "frame"  # frame (deferred) | stepwise (applied in place)

    def __post_init__(self):
        if len(self.labels) != self.initial.n:
            raise ValueError("need one label per initial qubit")
        if self.corrections not in ("frame", "stepwise"):
            raise ValueError("corrections must be 'frame' or 'stepwise'")


@dataclass
class PipelineResult:
    state: object  # StabilizerState or DenseState
    labels: list[str]
    frame: PauliFrame
    syndromes: list[SyndromeRecord]
    transcript: list[dict]
    mode: str

    def state_with_frame(self):
        """Apply the pending frame: the ideal, byproduct-free state."""
        pend = self.frame.pending(self.labels)
        if self.mode == "tableau":
            out = self.state.copy()
            out.apply_pauli(pend)
            return out
        return self.state.apply_pauli(pend)


class _Engine:
    def __init__(self, spec: PipelineSpec, rng):
        self.spec = spec
        self.rng = rng
        self.mode = "tableau"
        self.state: object = spec.initial.copy()
        self.labels: list[str] = list(spec.labels)
        self.frame = PauliFrame()
        self.known_x: dict[str, int] = {}
        self.known_z: dict[str, int] = {}
        self.syndromes: list[SyndromeRecord] = []
        self.transcript: list[dict] = []

    # -- representation-agnostic primitives --------------------------------

    def _apply_letter(self, idx: int, letter: str) -> None:
        if letter == "I":
            return
        if self.mode == "tableau":
            self.state.apply_gate(letter, (idx,))
        else:
            self.state = self.state.apply_unitary(letter, (idx,))

    def _tensor_block(self, block_state: StabilizerState) -> None:
        if self.mode == "tableau":
            self.state = self.state.tensor(block_state)
        else:
            self.state = self.state.tensor(dense.from_stabilizer(block_state))

    def _bell(self, a: int, b: int, forced) -> tuple[int, int]:
        if self.mode == "tableau":
            bits, post = self.state.bell_measure(a, b, rng=self.rng, forced=forced)
        else:
            bits, post = dense.bell_measure_dense(self.state, a, b, rng=self.rng, forced=forced)
        self.state = post
        return bits

    def _fold_known(self, label: str, ex: int, ez: int) -> None:
        self.known_x[label] = self.known_x.get(label, 0) ^ (ex & 1)
        self.known_z[label] = self.known_z.get(label, 0) ^ (ez & 1)

    def _apply_label_pauli(self, label: str, letter: str, track: bool = True) -> None:
        self._apply_letter(self.labels.index(label), letter)
        if track:
            ex, ez = _LETTER_BITS[letter]
            self._fold_known(label, ex, ez)

    # -- noise ----------------------------------------------------------------

    def _storage_noise(self) -> None:
        if self.spec.noise_q >= 1.0:
            return
        letters = sample_twirl_letters(self.spec.noise_q, len(self.labels), self.rng)
        for lab, li in zip(list(self.labels), letters):
            self._apply_label_pauli(lab, _LETTERS[int(li)])

    def _initial_noise(self) -> None:
        if not self.spec.initial_noise or self.spec.noise_p >= 1.0:
            return
        letters = sample_twirl_letters(self.spec.noise_p, len(self.labels), self.rng)
        for lab, li in zip(list(self.labels), letters):
            self._apply_label_pauli(lab, _LETTERS[int(li)])

    # -- steps ------------------------------------------------------------------

    def run(self) -> PipelineResult:
        self._initial_noise()
        for i, step in enumerate(self.spec.steps):
            if isinstance(step.block, GadgetBlock):
                self._step_gadget(i, step)
            else:
                self._step_resource(i, step)
        return PipelineResult(
            state=self.state,
            labels=self.labels,
            frame=self.frame,
            syndromes=self.syndromes,
            transcript=self.transcript,
            mode=self.mode,
        )

    def _prepare_block(self, step: PipelineStep, block: ResourceBlock):
        """Sample block-preparation noise; returns (noisy state, sampled letters)."""
        noisy = block.state.copy()
        sampled: dict[int, str] = {}
        if self.spec.noise_p < 1.0 and step.noise != "none":
            in_qubits = set(block.in_ports.values())
            if step.noise == "in":
                targets = sorted(in_qubits)
            elif step.noise == "out":
                targets = sorted(q for q in range(block.n) if q not in in_qubits)
            elif step.noise == "all":
                targets = list(range(block.n))
            else:
                raise ValueError(f"bad noise switch {step.noise!r}")
            letters = sample_twirl_letters(self.spec.noise_p, len(targets), self.rng)
            for q, li in zip(targets, letters):
                letter = _LETTERS[int(li)]
                if letter != "I":
                    lx, lz = _LETTER_BITS[letter]
                    p = PauliOperator(block.n, phase_pow=(lx & lz))
                    p.x[q], p.z[q] = lx, lz
                    noisy.apply_pauli(p)
                    sampled[q] = letter
        return noisy, sampled

    def _step_resource(self, idx: int, step: PipelineStep) -> None:
        block: ResourceBlock = step.block
        if block.open_ports:
            raise ValueError("blocks with open qubits must be GadgetBlocks")
        ports = block.in_port_names()
        if set(step.wiring) != set(block.in_ports):
            raise ValueError(f"step {idx}: wiring must cover exactly the block in-ports")
        for lab in step.wiring.values():
            if lab not in self.labels:
                raise ValueError(f"step {idx}: unknown live label {lab!r}")
        if len(set(step.wiring.values())) != len(step.wiring):
            raise ValueError(f"step {idx}: live qubit wired twice")

        self._storage_noise()
        if step.inject:
            for lab, letter in step.inject.items():
                self._apply_label_pauli(lab, letter)

        noisy, sampled = self._prepare_block(step, block)
        # in-port preparation noise teleports onto the wired live qubit
        port_of_qubit = {q: p for p, q in block.in_ports.items()}
        for q, letter in sampled.items():
            if q in port_of_qubit:
                ex, ez = _LETTER_BITS[letter]
                self._fold_known(step.wiring[port_of_qubit[q]], ex, ez)

        n_live = len(self.labels)
        self._tensor_block(noisy)
        self.labels = self.labels + [f"\x00b{j}" for j in range(block.n)]

        bits: dict[str, tuple[int, int]] = {}
        for port in ports:
            live_label = step.wiring[port]
            a = self.labels.index(live_label)
            b = self.labels.index(f"\x00b{block.in_ports[port]}")
            forced = (step.forced_bits or {}).get(port)
            s = self._bell(a, b, forced)
            bits[port] = s
            for q in sorted((a, b), reverse=True):
                del self.labels[q]

        # discrepancy at each consumed in-port: prior frame + fresh Bell bits
        d = PauliOperator(block.n)
        err = PauliOperator(block.n)
        for port in ports:
            q = block.in_ports[port]
            fx, fz = self.frame.bits(step.wiring[port])
            d.x[q] = fx ^ bits[port][0]
            d.z[q] = fz ^ bits[port][1]
            err.x[q] = self.known_x.pop(step.wiring[port], 0)
            err.z[q] = self.known_z.pop(step.wiring[port], 0)
            self.frame.x.pop(step.wiring[port], None)
            self.frame.z.pop(step.wiring[port], None)

        record = {"step": idx, "block": block.name,
                  "bell_bits": {p: list(bits[p]) for p in ports}}

        extract = step.extract
        if extract is None:
            extract = block.metadata.get("kind") in ("decoder", "ec", "switch")
        correction = PauliOperator(block.n)
        if extract:
            code = get_code(block.metadata["code"])
            if len(ports) != code.m:
                raise ValueError("decoder-type read-in must consume a full code block")
            syndrome = self._extract_syndrome(code, block, ports, d)
            corr_code = code.decode(syndrome)
            for k in range(code.m):
                q = block.in_ports[f"in.{k}"]
                correction.x[q] = corr_code.x[k]
                correction.z[q] = corr_code.z[k]
            failure = None
            if self._tracking_known():
                e_code = PauliOperator(code.m)
                for k in range(code.m):
                    q = block.in_ports[f"in.{k}"]
                    e_code.x[k], e_code.z[k] = err.x[q], err.z[q]
                resid = PauliOperator(code.m, e_code.x ^ corr_code.x, e_code.z ^ corr_code.z)
                resid.r = int(np.count_nonzero(resid.x & resid.z)) % 4
                if code.syndrome_of(resid).any():
                    raise AssertionError("correction is inconsistent with the tracked error")
                failure = code.residual_logical_class(resid)
            rec = SyndromeRecord(idx, code.name, tuple(int(b) for b in syndrome),
                                 corr_code, failure)
            self.syndromes.append(rec)
            record["syndrome"] = list(rec.syndrome)
            record["correction"] = corr_code.to_string()
            if failure is not None:
                record["residual_class"] = failure

        in_qubits = sorted(block.in_ports.values())
        # Byproducts plus the inferred correction always have zero syndrome, so
        # they move through the block; a syndrome-bearing pattern alone would not.
        carry = PauliOperator(block.n, d.x ^ correction.x, d.z ^ correction.z)
        err_carry = PauliOperator(block.n, err.x ^ correction.x, err.z ^ correction.z)
        moved = equivalent_on_complement(block.state, _pattern(carry), in_qubits)
        err_moved = equivalent_on_complement(block.state, _pattern(err_carry), in_qubits)

        # register new live labels for the block's surviving qubits
        survivors = [q for q in range(block.n) if q not in in_qubits]
        new_label = {}
        for port, q in block.out_ports.items():
            new_label[q] = f"s{idx}.{port}"
        base = n_live - len(ports)  # survivors of the old register
        for j, q in enumerate(survivors):
            lab = new_label[q]
            self.labels[base + j] = lab
            self.frame.set_bits(lab, int(moved.x[q]), int(moved.z[q]))
            ex, ez = int(err_moved.x[q]), int(err_moved.z[q])
            if q in sampled:  # out-port preparation noise acts in place
                nx, nz = _LETTER_BITS[sampled[q]]
                ex ^= nx
                ez ^= nz
            if ex or ez:
                self._fold_known(lab, ex, ez)
        if self.spec.corrections == "stepwise":
            self._flush_frame()
        self.frame.history.append(bits)
        self.transcript.append(record)

    def _flush_frame(self) -> None:
        """Apply every pending frame bit physically (stepwise-correction mode)."""
        for j, lab in enumerate(self.labels):
            fx, fz = self.frame.bits(lab)
            if fx:
                self._apply_letter(j, "X")
            if fz:
                self._apply_letter(j, "Z")
            self.frame.set_bits(lab, 0, 0)

    def _tracking_known(self) -> bool:
        # an explicit (even empty) inject dict opts a run into simulation mode
        return bool(self.spec.initial_noise or self.spec.noise_p < 1.0
                    or self.spec.noise_q < 1.0
                    or any(s.inject is not None for s in self.spec.steps))

    def _extract_syndrome(self, code, block: ResourceBlock, ports, d: PauliOperator) -> np.ndarray:
        """Syndrome bits from the Bell-outcome pattern, relative to the frame.

        For each generator g, the parity of the outcome bits over g's support
        is fixed by the joint stabilizer group; with the frame folded into the
        discrepancy d, the deviation equals [d anticommutes with g] up to the
        constant parity #Y(g) contributed by Y-support sign bookkeeping.
        """
        s = np.zeros(code.n_syndrome_bits, dtype=np.uint8)
        d_code = PauliOperator(code.m)
        for k in range(code.m):
            q = block.in_ports[f"in.{k}"]
            d_code.x[k], d_code.z[k] = d.x[q], d.z[q]
        for j, g in enumerate(code.stabilizer_generators):
            anti = (int(np.count_nonzero(g.x & d_code.z)) + int(np.count_nonzero(g.z & d_code.x))) % 2
            ycount = int(np.count_nonzero(g.x & g.z)) % 2
            s[j] = anti ^ ycount
        return s

    # -- gadget steps -----------------------------------------------------------

    def _step_gadget(self, idx: int, step: PipelineStep) -> None:
        gadget: GadgetBlock = step.block
        block = gadget.block
        if step.angle is None:
            raise ValueError("gadget steps carry a rotation angle")
        if list(step.wiring) != ["in.0"]:
            raise ValueError("rotation gadget has exactly one in-port 'in.0'")
        live_label = step.wiring["in.0"]
        if live_label not in self.labels:
            raise ValueError(f"unknown live label {live_label!r}")

        if self.mode == "tableau":
            self.state = dense.from_stabilizer(self.state)
            self.mode = "dense"
        self._storage_noise()
        if step.inject:
            for lab, letter in step.inject.items():
                self._apply_label_pauli(lab, letter)
        noisy, sampled = self._prepare_block(step, block)
        port_of_qubit = {q: p for p, q in block.in_ports.items()}
        for q, letter in sampled.items():
            if q in port_of_qubit:
                ex, ez = _LETTER_BITS[letter]
                self._fold_known(live_label, ex, ez)

        n_live = len(self.labels)
        self._tensor_block(noisy)
        self.labels = self.labels + [f"\x00b{j}" for j in range(block.n)]

        a = self.labels.index(live_label)
        b = self.labels.index(f"\x00b{block.in_ports['in.0']}")
        s_x, s_z = self._bell(a, b, (step.forced_bits or {}).get("in.0"))
        for q in sorted((a, b), reverse=True):
            del self.labels[q]

        fx, fz = self.frame.bits(live_label)
        self.frame.x.pop(live_label, None)
        self.frame.z.pop(live_label, None)
        dx, dz = fx ^ s_x, fz ^ s_z
        # express the discrepancy in the gadget's wire frame
        wire = gadget.wire_frame.inverse().conjugate(PauliOperator(1, [dx], [dz], (dx & dz)))
        wx, wz = int(wire.x[0]), int(wire.z[0])
        angle = -step.angle if wz else step.angle

        # measure the open qubit in {e^{ia}|0> +- e^{-ia}|1>}
        open_idx = self.labels.index(f"\x00b{block.open_ports['open.0']}")
        v0 = np.array([np.exp(1j * angle), np.exp(-1j * angle)], dtype=complex) / np.sqrt(2)
        v1 = np.array([np.exp(1j * angle), -np.exp(-1j * angle)], dtype=complex) / np.sqrt(2)
        p0, post0 = self.state.measure_projector(v0, (open_idx,))
        p1, post1 = self.state.measure_projector(v1, (open_idx,))
        if step.forced_open is not None:
            s_open = step.forced_open
            post = (post0, post1)[s_open]
            if post is None:
                raise ValueError("forced open outcome has zero probability")
        else:
            s_open = int(self.rng.choice(2, p=np.array([p0, p1]) / (p0 + p1)))
            post = (post0, post1)[s_open]
        self.state = post
        del self.labels[open_idx]

        # wire-frame byproduct after the rotation: X^{s + wx} Z^{wz}
        bx, bz = (s_open ^ wx), wz
        phys = gadget.wire_frame.conjugate(PauliOperator(1, [bx], [bz], (bx & bz)))
        out_label = f"s{idx}.out.0"
        out_idx = self.labels.index(f"\x00b{block.out_ports['out.0']}")
        self.labels[out_idx] = out_label
        self.frame.set_bits(out_label, int(phys.x[0]), int(phys.z[0]))

        # the known-error tracker flows through the wire unchanged (patterns only)
        ex = self.known_x.pop(live_label, 0)
        ez = self.known_z.pop(live_label, 0)
        for q, letter in sampled.items():
            if q == block.out_ports["out.0"]:
                nx, nz = _LETTER_BITS[letter]
                ex ^= nx
                ez ^= nz
        if ex or ez:
            self._fold_known(out_label, ex, ez)

        self.frame.history.append({"in.0": (s_x, s_z), "open": s_open})
        self.transcript.append({
            "step": idx, "block": block.name,
            "bell_bits": {"in.0": [s_x, s_z]},
            "open_outcome": s_open,
            "measured_angle": angle,
        })


def _pattern(p: PauliOperator) -> PauliOperator:
    """Same support, canonical +1-ish phase (patterns are what frames track)."""
    q = PauliOperator(p.n, p.x.copy(), p.z.copy(), 0)
    q.r = int(np.count_nonzero(q.x & q.z)) % 4
    return q


def run_pipeline(spec: PipelineSpec, rng) -> PipelineResult:
    """Fold the steps over the initial state; see PipelineResult."""
    return _Engine(spec, rng).run()


def transcript_lines(result: PipelineResult) -> list[str]:
    import json

    lines = [json.dumps(rec, sort_keys=True) for rec in result.transcript]
    final = {
        "final": True,
        "labels": result.labels,
        "frame": {lab: list(result.frame.bits(lab)) for lab in result.labels},
        "mode": result.mode,
    }
    if result.mode == "tableau":
        final["stabilizers"] = result.state.to_strings()
    lines.append(json.dumps(final, sort_keys=True))
    return lines

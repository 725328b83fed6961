"""Local depolarizing noise model, thresholds, and Monte Carlo estimation.

Conventions follow D(p) rho = p rho + (1-p)/2 I tr rho per qubit, so p = 1 is
noiseless.  Every quantitative claim lives here: the Pauli-twirl sampler, the
noise-moving verifiers, exact logical-channel enumeration, the concatenation
fixed point, threshold arithmetic, the EC-round Monte Carlo and the magic
state fidelity bound.

Numbers carry provenance: constants taken from the literature are tagged
"paper-constant" and are never laundered into derived results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dense
from .blocks import ResourceBlock, choi_state, ec_block, encoder_block, equivalent_on_complement
from .codes import CodeSpec, get_code
from .pipeline import sample_twirl_letters
from .stabilizer import CliffordCircuit, PauliOperator

MAGIC_FIDELITY_BOUND = (1 + 1 / math.sqrt(2)) / 2

PAPER_CONSTANTS = {
    "p_code_ring5": (0.8250, "paper-constant; re-derived here via concatenation_fixed_point"),
    "p_code_shor": (0.7449, "paper-constant; Shor-type code construction out of scope"),
    "p_code_rm15": (0.981, "paper-constant; reference decoder not re-derived"),
    "magic_ldn_threshold": (0.8047, "paper-constant; not derivable from F=(1+p)/2 "
                                    "against the 0.8536 bound (that gives p>0.7071) - stored only"),
}


class InfeasibleError(RuntimeError):
    """Exact enumeration is out of reach; use Monte Carlo instead."""


@dataclass
class NoiseSpec:
    """LDN parameters: p per resource-state qubit, q per stored qubit, q_u per
    non-Clifford single-qubit gate.  1.0 means noiseless."""

    p: float = 1.0
    q: float = 1.0
    q_u: float = 1.0
    mode: str = "clifford"  # clifford | code_switch_universal | magic_state

    def __post_init__(self):
        for name in ("p", "q", "q_u"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mode not in ("clifford", "code_switch_universal", "magic_state"):
            raise ValueError(f"unknown mode {self.mode!r}")


def twirl_probs(p: float) -> np.ndarray:
    """Pauli-twirl decomposition of D(p): probabilities of I, X, Y, Z."""
    return np.array([(1 + 3 * p) / 4, (1 - p) / 4, (1 - p) / 4, (1 - p) / 4])


def sample_ldn(p: float, qubits: int, rng) -> PauliOperator:
    """One sample of the i.i.d. Pauli twirl of D(p) on `qubits` qubits."""
    letters = sample_twirl_letters(p, qubits, rng)
    x = ((letters == 1) | (letters == 2)).astype(np.uint8)
    z = ((letters == 2) | (letters == 3)).astype(np.uint8)
    return PauliOperator(qubits, x, z, int(np.count_nonzero(x & z)) % 4)


def effective_input_noise(spec: NoiseSpec) -> float:
    """Accumulated LDN parameter per particle entering a perfect encoded block.

    Resource noise hits twice (producer out-ports, consumer in-ports) and
    storage once: p*p*q; universal modes fold in the gate noise q_u.
    """
    p_eff = spec.p * spec.p * spec.q
    if spec.mode in ("code_switch_universal",):
        p_eff *= spec.q_u
    return p_eff


# -- noise moving ----------------------------------------------------------------


def move_ldn_placement(block: ResourceBlock, qubit: int) -> tuple[str, str]:
    """Equivalent placement of D(p) on a block qubit after Bell read-in.

    In-port noise teleports onto the state read into that port ("input");
    out-port noise stays on the produced qubit ("output").
    """
    for name, q in block.in_ports.items():
        if q == qubit:
            return ("input", name)
    for name, q in block.out_ports.items():
        if q == qubit:
            return ("output", name)
    raise ValueError("qubit is not a port of this block")


def bell_readin_channel(block: ResourceBlock, rho_live: dense.DenseState,
                        noisy_qubits: dict[int, float] | None = None) -> dense.DenseState:
    """Deterministic channel: Bell read-in of all live qubits, corrections applied.

    `rho_live` (mixed) is consumed in in-port order; `noisy_qubits` maps block
    qubit indices to LDN parameters applied to the block before the read-in.
    Returns the mixed state on the block's surviving qubits (ascending order).
    """
    ports = block.in_port_names()
    n_live = rho_live.n
    if n_live != len(ports):
        raise ValueError("live register must match the in-port count")
    rho_b = dense.from_stabilizer(block.state).to_mixed()
    for q, pv in (noisy_qubits or {}).items():
        rho_b = rho_b.apply_ldn(q, pv)
    joint = rho_live.tensor(rho_b)
    in_qubits = sorted(block.in_ports.values())
    survivors = [q for q in range(block.n) if q not in in_qubits]
    code = None
    if block.metadata.get("kind") in ("decoder", "ec", "switch"):
        code = get_code(block.metadata["code"])

    def recurse(state: dense.DenseState, k: int, d_bits: list[tuple[int, int]]):
        if k == len(ports):
            dpat = PauliOperator(block.n)
            for (sx, sz), port in zip(d_bits, ports):
                q = block.in_ports[port]
                dpat.x[q], dpat.z[q] = sx, sz
            if code is not None:
                # decoding with built-in error correction: fold the inferred
                # correction so the combination has zero syndrome and moves
                port_qubits = [block.in_ports[f"in.{k}"] for k in range(code.m)]
                dx, dz = dpat.x[port_qubits], dpat.z[port_qubits]
                synd = np.zeros(code.n_syndrome_bits, dtype=np.uint8)
                for j, g in enumerate(code.stabilizer_generators):
                    anti = int(np.count_nonzero(g.x & dz) + np.count_nonzero(g.z & dx)) % 2
                    synd[j] = anti ^ (int(np.count_nonzero(g.x & g.z)) % 2)
                corr = code.decode(synd)
                for k, q in enumerate(port_qubits):
                    dpat.x[q] ^= corr.x[k]
                    dpat.z[q] ^= corr.z[k]
            moved = equivalent_on_complement(block.state, dpat, in_qubits)
            out = state
            for j, q in enumerate(survivors):
                if moved.x[q]:
                    out = out.apply_unitary("X", (j,))
                if moved.z[q]:
                    out = out.apply_unitary("Z", (j,))
            return out.data
        port = ports[k]
        # live qubit k pairs with in-port k; indices shift as pairs are consumed
        a = 0
        b = _block_offset(block, port, k, n_live)
        total = None
        for bits, vec in dense.BELL_VECTORS.items():
            prob, post = state.measure_projector(vec, (a, b))
            if prob <= 1e-14:
                continue
            term = prob * recurse(post, k + 1, d_bits + [bits])
            total = term if total is None else total + term
        return total

    data = recurse(joint, 0, [])
    return dense.DenseState(len(survivors), data, mixed=True)


def _block_offset(block: ResourceBlock, port: str, k: int, n_live: int) -> int:
    """Current index of `port`'s qubit once k pairs have been consumed."""
    ports = block.in_port_names()
    consumed = sorted(block.in_ports[p] for p in ports[:k])
    q = block.in_ports[port]
    live_left = n_live - k
    return live_left + q - sum(1 for c in consumed if c < q)


def trace_distance(a: dense.DenseState, b: dense.DenseState) -> float:
    ev = np.linalg.eigvalsh(a.data - b.data)
    return 0.5 * float(np.sum(np.abs(ev)))


def noise_moving_defect_teleport(p: float, rho: dense.DenseState | None = None) -> float:
    """Trace distance between D(p)-before-Bell-measurement and D(p)-on-output.

    The noisy placement puts D(p) on the Bell-pair qubit consumed by the
    measurement; the moved placement applies D(p) to the teleported output.
    """
    block = choi_state(CliffordCircuit(1), 1)
    if rho is None:
        v = np.array([0.8, 0.6j])
        rho = dense.DenseState.from_vector(v).to_mixed()
    before = bell_readin_channel(block, rho, {block.in_ports["in.0"]: p})
    after = bell_readin_channel(block, rho, None).apply_ldn(0, p)
    return trace_distance(before, after)


def noise_moving_defect_encoder(code: CodeSpec | str, p: float,
                                rho: dense.DenseState | None = None) -> float:
    """Noise moving across an encoder block: D(p) on every block qubit equals
    D(p) on the input state plus D(p) on every output, around a perfect block."""
    code = get_code(code) if isinstance(code, str) else code
    block = encoder_block(code)
    if rho is None:
        v = np.array([0.8, 0.6j])
        rho = dense.DenseState.from_vector(v).to_mixed()
    noisy = bell_readin_channel(block, rho, {q: p for q in range(block.n)})
    moved = bell_readin_channel(block, rho.apply_ldn(0, p), None)
    for j in range(code.m):
        moved = moved.apply_ldn(j, p)
    return trace_distance(noisy, moved)


# -- exact logical channel ----------------------------------------------------------


@dataclass
class LogicalChannel:
    """Pauli channel on the logical qubit after one perfect EC round."""

    code: str
    p_eff: float
    probs: dict[str, float]  # logical I / X / Y / Z probabilities

    @property
    def lambdas(self) -> dict[str, float]:
        pr = self.probs
        return {
            "X": pr["I"] + pr["X"] - pr["Y"] - pr["Z"],
            "Y": pr["I"] + pr["Y"] - pr["X"] - pr["Z"],
            "Z": pr["I"] + pr["Z"] - pr["X"] - pr["Y"],
        }

    @property
    def q_logical(self) -> float:
        """Depolarizing parameter; worst direction for non-symmetric residues."""
        return min(self.lambdas.values())

    @property
    def failure_prob(self) -> float:
        return 1.0 - self.probs["I"]


def exact_logical_channel(code: CodeSpec | str, p_eff: float) -> LogicalChannel:
    """Enumerate all 4^M i.i.d. twirl errors, decode, classify the residue."""
    code = get_code(code) if isinstance(code, str) else code
    m = code.m
    if m > 7:
        raise InfeasibleError(
            f"4^{m} error patterns is beyond exact enumeration; use monte_carlo_logical_error"
        )
    if not 0.0 <= p_eff <= 1.0:
        raise ValueError("p_eff must lie in [0, 1]")
    n_err = 4 ** m
    ids = np.arange(n_err)
    digits = np.stack([(ids // 4 ** j) % 4 for j in range(m)], axis=1)
    ex = ((digits == 1) | (digits == 2)).astype(np.uint8)
    ez = ((digits == 2) | (digits == 3)).astype(np.uint8)
    probs = twirl_probs(p_eff)[digits].prod(axis=1)
    synd = code.syndromes_of_bits(ex, ez)
    keys = synd @ (1 << np.arange(code.n_syndrome_bits, dtype=np.int64))
    cx, cz = _decoder_arrays(code)
    rx = ex ^ cx[keys]
    rz = ez ^ cz[keys]
    # logical X component iff the residue anticommutes with logical Z, etc.
    lz, lx = code.logical_z, code.logical_x
    comp_x = (rx @ lz.z + rz @ lz.x) % 2
    comp_z = (rx @ lx.z + rz @ lx.x) % 2
    out = {"I": 0.0, "X": 0.0, "Y": 0.0, "Z": 0.0}
    for name, mask in (
        ("I", (comp_x == 0) & (comp_z == 0)),
        ("X", (comp_x == 1) & (comp_z == 0)),
        ("Z", (comp_x == 0) & (comp_z == 1)),
        ("Y", (comp_x == 1) & (comp_z == 1)),
    ):
        out[name] = float(probs[mask].sum())
    return LogicalChannel(code.name, p_eff, out)


def _decoder_arrays(code: CodeSpec) -> tuple[np.ndarray, np.ndarray]:
    n_syn = 1 << code.n_syndrome_bits
    cx = np.zeros((n_syn, code.m), dtype=np.uint8)
    cz = np.zeros((n_syn, code.m), dtype=np.uint8)
    for key in range(n_syn):
        bits = np.array([(key >> j) & 1 for j in range(code.n_syndrome_bits)], dtype=np.uint8)
        c = code.decode(bits)
        cx[key], cz[key] = c.x, c.z
    return cx, cz


def concatenation_fixed_point(code: CodeSpec | str, tol: float = 1e-6,
                              bracket: tuple[float, float] = (0.5, 0.999)) -> float:
    """Unstable fixed point of x -> q_L(x): the code's depolarizing threshold.

    Above the fixed point, concatenation drives q_L -> 1; below, it collapses.
    """
    code = get_code(code) if isinstance(code, str) else code

    def g(x: float) -> float:
        return exact_logical_channel(code, x).q_logical - x

    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo < 0 < g_hi):
        raise ValueError(f"no threshold crossing in {bracket}: g({lo})={g_lo:.4f}, g({hi})={g_hi:.4f}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_flip_logical_rate(f: float) -> float:
    """Majority-vote recursion of the 3-qubit phase code on its protected axis."""
    return 3 * f * f * (1 - f) + f ** 3


def phase_flip_fixed_point(tol: float = 1e-9) -> float:
    """Unstable fixed point of the protected-axis recursion (exactly 1/2)."""
    lo, hi = 1e-6, 1 - 1e-6
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if phase_flip_logical_rate(mid) < mid:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- threshold arithmetic --------------------------------------------------------------


@dataclass
class ThresholdReport:
    """Threshold values derived from a code's depolarizing threshold p_code."""

    code: str | None
    p_code: float
    p_code_provenance: str
    p_crit: float = field(init=False)          # q ~ 1: sqrt(p_code)
    p_crit_tilde: float = field(init=False)    # q = p: cbrt(p_code)
    scenario: str = "all"

    def __post_init__(self):
        self.p_crit = math.sqrt(self.p_code)
        self.p_crit_tilde = self.p_code ** (1.0 / 3.0)

    @property
    def noise_pct(self) -> float:
        """Tolerable noise per particle (percent) for q ~ 1."""
        return 100.0 * (1.0 - self.p_crit)

    @property
    def noise_pct_tilde(self) -> float:
        """Tolerable noise per particle (percent) for q = p."""
        return 100.0 * (1.0 - self.p_crit_tilde)

    def check_algebra(self, tol: float = 1e-12) -> None:
        if abs(self.p_crit ** 2 - self.p_code) > tol:
            raise AssertionError("p_crit^2 != p_code")
        if abs(self.p_crit_tilde ** 3 - self.p_code) > tol:
            raise AssertionError("p_crit_tilde^3 != p_code")

    def to_json_dict(self) -> dict:
        tag = "paper-constant" if "paper-constant" in self.p_code_provenance else "derived"
        return {
            "format": 1,
            "code": self.code,
            "p_code": {"value": self.p_code, "provenance": self.p_code_provenance, "tag": tag},
            "p_crit": {"value": self.p_crit, "provenance": "computed: sqrt(p_code)", "tag": "derived"},
            "p_crit_tilde": {"value": self.p_crit_tilde, "provenance": "computed: p_code^(1/3)",
                             "tag": "derived"},
            "tolerable_noise_pct": {"value": self.noise_pct, "provenance": "computed: 1 - p_crit",
                                    "tag": "derived"},
            "tolerable_noise_pct_q_eq_p": {"value": self.noise_pct_tilde,
                                           "provenance": "computed: 1 - p_crit_tilde", "tag": "derived"},
        }


def threshold_report(code: str | None = None, p_code: float | None = None,
                     derive: bool = False) -> ThresholdReport:
    """Threshold report for a registry code or an explicit p_code constant."""
    if p_code is not None:
        rep = ThresholdReport(code, p_code, "user-supplied constant")
    elif code is not None:
        spec = get_code(code)
        if derive:
            value = concatenation_fixed_point(spec)
            rep = ThresholdReport(code, value, "derived: exact enumeration + bisection")
        else:
            if spec.p_code is None:
                raise ValueError(f"{code} has no stored p_code; use derive=True")
            rep = ThresholdReport(code, spec.p_code, spec.p_code_provenance)
    else:
        raise ValueError("need a code name or a p_code value")
    rep.check_algebra()
    return rep


# -- Monte Carlo -----------------------------------------------------------------------


def wilson_interval(failures: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = failures / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class MonteCarloResult:
    code: str
    p: float
    q: float
    rounds: int
    trials: int
    failures: int
    per_class: dict[str, int]
    seed: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


_CHUNK = 1 << 16


def sample_ec_chain_errors(code: CodeSpec, noise: NoiseSpec, trials: int, seed: int,
                           rounds: int = 1) -> list[np.ndarray]:
    """Per-round sampled error letters (trials x M), deterministic in `seed`.

    Each round draws producer-side LDN(p), consumer-side LDN(p) and storage
    LDN(q) for every code qubit, reproducing the p*p*q boundary accounting.
    """
    out = []
    for r in range(rounds):
        letters = np.zeros((trials, code.m, 3), dtype=np.int64)
        done = 0
        while done < trials:
            k = min(_CHUNK, trials - done)
            sub = np.random.default_rng([seed, r, done])
            letters[done:done + k, :, 0] = sample_twirl_letters(noise.p, k * code.m, sub).reshape(k, code.m)
            letters[done:done + k, :, 1] = sample_twirl_letters(noise.p, k * code.m, sub).reshape(k, code.m)
            letters[done:done + k, :, 2] = sample_twirl_letters(noise.q, k * code.m, sub).reshape(k, code.m)
            done += k
        out.append(letters)
    return out


def _letters_to_bits(letters: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ex = ((letters == 1) | (letters == 2)).astype(np.uint8)
    ez = ((letters == 2) | (letters == 3)).astype(np.uint8)
    return ex, ez


def classify_ec_chain(code: CodeSpec, per_round_letters: list[np.ndarray]) -> np.ndarray:
    """Frame-exact classification of sampled EC-chain errors.

    Returns an integer class per trial: 0=I, 1=X, 2=Z, 3=Y (logical residue
    after all syndrome-based corrections).  Pauli errors propagate linearly
    through the Clifford blocks, so each trial reduces to GF(2) algebra plus
    decoder lookups - the byproduct randomness cancels in the frame-relative
    syndromes and never needs to be sampled.
    """
    trials = per_round_letters[0].shape[0]
    m = code.m
    cx_tab, cz_tab = _decoder_arrays(code)
    pow2 = 1 << np.arange(code.n_syndrome_bits, dtype=np.int64)
    acc_x = np.zeros((trials, m), dtype=np.uint8)
    acc_z = np.zeros((trials, m), dtype=np.uint8)
    corr_x = np.zeros((trials, m), dtype=np.uint8)
    corr_z = np.zeros((trials, m), dtype=np.uint8)
    for letters in per_round_letters:
        for layer in range(letters.shape[2]):
            ex, ez = _letters_to_bits(letters[:, :, layer])
            acc_x ^= ex
            acc_z ^= ez
        synd = code.syndromes_of_bits(acc_x ^ corr_x, acc_z ^ corr_z)
        keys = synd @ pow2
        corr_x ^= cx_tab[keys]
        corr_z ^= cz_tab[keys]
    rx = acc_x ^ corr_x
    rz = acc_z ^ corr_z
    lz, lx = code.logical_z, code.logical_x
    comp_x = (rx @ lz.z + rz @ lz.x) % 2  # logical X component
    comp_z = (rx @ lx.z + rz @ lx.x) % 2  # logical Z component
    return (comp_x + 2 * comp_z).astype(np.int64)


def monte_carlo_logical_error(code: CodeSpec | str, noise: NoiseSpec, trials: int,
                              seed: int, rounds: int = 1) -> MonteCarloResult:
    """Logical error rate of encode -> `rounds` x EC -> check under LDN.

    Deterministic in `seed` (fixed chunking, independent of parallelism).
    """
    code = get_code(code) if isinstance(code, str) else code
    if trials < 1:
        raise ValueError("need at least one trial")
    letters = sample_ec_chain_errors(code, noise, trials, seed, rounds)
    classes = classify_ec_chain(code, letters)
    names = ["I", "X", "Z", "Y"]
    per_class = {names[k]: int(np.count_nonzero(classes == k)) for k in range(4)}
    failures = trials - per_class["I"]
    return MonteCarloResult(code.name, noise.p, noise.q, rounds, trials, failures,
                            per_class, seed)


def predicted_ec_failure(code: CodeSpec | str, noise: NoiseSpec, rounds: int = 1) -> float:
    """Exact-enumeration prediction for the single-round EC failure rate."""
    code = get_code(code) if isinstance(code, str) else code
    if rounds != 1:
        raise InfeasibleError("exact prediction implemented for a single round")
    return exact_logical_channel(code, effective_input_noise(NoiseSpec(noise.p, noise.q))).failure_prob


# -- magic states -------------------------------------------------------------------------


@dataclass
class MagicStateReport:
    p: float
    fidelity: float
    bound: float
    distillable: bool
    paper_ldn_constant: float
    paper_ldn_provenance: str

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "p": self.p,
            "fidelity": {"value": self.fidelity, "provenance": "dense D(p) on the magic-axis state",
                         "tag": "derived"},
            "bound": {"value": self.bound, "provenance": "(1 + 1/sqrt(2))/2", "tag": "derived"},
            "distillable": self.distillable,
            "ldn_threshold_constant": {"value": self.paper_ldn_constant,
                                       "provenance": self.paper_ldn_provenance,
                                       "tag": "paper-constant"},
        }


def magic_axis_state() -> dense.DenseState:
    """+1 eigenstate of (X+Z)/sqrt(2): the pi/8-gate magic axis."""
    return dense.DenseState.from_vector([math.cos(math.pi / 8), math.sin(math.pi / 8)])


def magic_state_check(p: float) -> MagicStateReport:
    """Fidelity of the D(p)-noised magic state and its distillability."""
    target = magic_axis_state()
    rho = target.to_mixed().apply_ldn(0, p)
    fid = rho.fidelity(target)
    const, prov = PAPER_CONSTANTS["magic_ldn_threshold"]
    return MagicStateReport(
        p=p,
        fidelity=fid,
        bound=MAGIC_FIDELITY_BOUND,
        distillable=fid > MAGIC_FIDELITY_BOUND,
        paper_ldn_constant=const,
        paper_ldn_provenance=prov,
    )

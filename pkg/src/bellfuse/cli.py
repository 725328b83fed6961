"""Command-line front end.

Subcommands: `synth` writes resource blocks (JSON + optional DOT), `run`
executes a pipeline spec and emits a JSONL transcript, `threshold` computes
threshold reports, `sweep` runs Monte Carlo noise sweeps to CSV (rendering a
figure next to it by default), and `magic` reports the magic-state fidelity
bound.  Every stochastic command requires an explicit --seed; there is no
environment fallback.

Exit codes: 0 success, 2 validation error, 3 exact enumeration infeasible.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from . import noise as noise_mod
from . import plots
from .blocks import (
    GadgetBlock,
    ResourceBlock,
    block_from_json,
    block_to_json,
    choi_state,
    code_switch_block,
    decoder_block,
    ec_block,
    encoder_block,
    rotation_gadget,
)
from .codes import CODE_NAMES, get_code
from .pipeline import PipelineSpec, PipelineStep, run_pipeline, transcript_lines
from .stabilizer import CliffordCircuit, PauliOperator, StabilizerState, states_equal

EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3

NAMED_CIRCUITS = {
    "id1": CliffordCircuit(1),
    "id2": CliffordCircuit(2),
    "h": CliffordCircuit.build(1, [("H", (0,))]),
    "s": CliffordCircuit.build(1, [("S", (0,))]),
    "sqrtx": CliffordCircuit.build(1, [("H", (0,)), ("S", (0,)), ("H", (0,))]),
    "cz": CliffordCircuit.build(2, [("CZ", (0, 1))]),
    "cnot": CliffordCircuit.build(2, [("CNOT", (0, 1))]),
    "bell": CliffordCircuit.build(2, [("H", (0,)), ("CNOT", (0, 1))]),
}


def _fail(msg: str, code: int = EXIT_VALIDATION):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def build_named_block(spec: str) -> ResourceBlock | GadgetBlock:
    """Resolve 'encoder:ring5', 'switch:rep3_phase:ring5', 'choi:cz', 'rot:X', ..."""
    head, _, rest = spec.partition(":")
    if head == "encoder":
        return encoder_block(rest)
    if head == "decoder":
        return decoder_block(rest)
    if head == "ec":
        return ec_block(rest)
    if head == "switch":
        a, _, b = rest.partition(":")
        return code_switch_block(a, b)
    if head == "choi":
        if rest not in NAMED_CIRCUITS:
            raise KeyError(f"unknown circuit {rest!r}; have {', '.join(NAMED_CIRCUITS)}")
        circ = NAMED_CIRCUITS[rest]
        return choi_state(circ, max(circ.width, 1), name=f"choi[{rest}]")
    if head == "rot":
        return rotation_gadget(rest or "X")
    raise KeyError(f"unknown block kind {head!r}")


def resolve_block(entry) -> ResourceBlock | GadgetBlock:
    """A step's block: a registry name or {'file': path} written by `synth`."""
    if isinstance(entry, str):
        return build_named_block(entry)
    if isinstance(entry, dict) and "file" in entry:
        with open(entry["file"], encoding="utf-8") as fh:
            block = block_from_json(fh.read())
        builder = block.metadata.get("builder")
        if builder:
            ref = build_named_block(builder)
            ref_state = ref.block.state if isinstance(ref, GadgetBlock) else ref.state
            if not states_equal(block.state, ref_state):
                raise ValueError(f"block file {entry['file']!r} does not match builder {builder!r}")
            if isinstance(ref, GadgetBlock):
                return ref
        return block
    raise ValueError(f"bad block entry {entry!r}")


@click.group()
def main():
    """Measurement-based blocks, Bell-measured pipelines and noise thresholds."""


# -- synth -------------------------------------------------------------------


@main.command()
@click.option("--code", "code_name", type=click.Choice(CODE_NAMES), help="encoder block for a code")
@click.option("--decoder", "decoder_name", type=click.Choice(CODE_NAMES), help="decoder block for a code")
@click.option("--ec", "ec_name", type=click.Choice(CODE_NAMES), help="error-correcting identity block")
@click.option("--circuit", "circuit_name", help=f"Choi block of a named circuit ({', '.join(NAMED_CIRCUITS)})")
@click.option("--switch", "switch_pair", help="code-switch block, e.g. rep3_phase:ring5")
@click.option("--rot", "rot_axis", type=click.Choice(["X", "Z"]), help="rotation gadget block")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="also write DOT of the graph form")
def synth(code_name, decoder_name, ec_name, circuit_name, switch_pair, rot_axis, out_path, dot_path):
    """Synthesize a resource block and write it as JSON."""
    picked = [x for x in (code_name and f"encoder:{code_name}",
                          decoder_name and f"decoder:{decoder_name}",
                          ec_name and f"ec:{ec_name}",
                          circuit_name and f"choi:{circuit_name}",
                          switch_pair and f"switch:{switch_pair}",
                          rot_axis and f"rot:{rot_axis}") if x]
    if len(picked) != 1:
        _fail("pick exactly one of --code/--decoder/--ec/--circuit/--switch/--rot")
    try:
        built = build_named_block(picked[0])
    except (KeyError, ValueError) as exc:
        _fail(str(exc))
    block = built.block if isinstance(built, GadgetBlock) else built
    block.metadata["builder"] = picked[0]
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(block_to_json(block) + "\n")
    except OSError as exc:
        _fail(f"cannot write {out_path}: {exc}")
    if dot_path:
        with open(dot_path, "w", encoding="utf-8") as fh:
            fh.write(block.to_dot())
    minimal = "yes" if block.is_minimal_clifford else ("n/a (open qubits)" if block.open_ports else "NO")
    click.echo(f"{block.name}: {block.n} qubits "
               f"({len(block.in_ports)} in, {len(block.out_ports)} out, {len(block.open_ports)} open); "
               f"minimal |in|+|out|: {minimal}")


# -- run ---------------------------------------------------------------------


def _initial_state(spec: dict) -> tuple[StabilizerState, list[str]]:
    if "code" in spec:
        code = get_code(spec["code"])
        logical = spec.get("logical", "+Z")
        sign = -1 if logical.startswith("-") else 1
        letter = logical.lstrip("+-")
        st = code.logical_eigenstate(letter, sign)
    elif "basis" in spec:
        st = StabilizerState.from_basis_string(spec["basis"])
    else:
        raise ValueError("initial state needs 'code' or 'basis'")
    return st, [f"q{k}" for k in range(st.n)]


@main.command(name="run")
@click.argument("pipeline_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, required=True, help="master seed (mandatory for reproducibility)")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="transcript JSONL (default stdout)")
def run_cmd(pipeline_file, seed, out_path):
    """Run a pipeline spec (JSON) and emit the per-step transcript."""
    try:
        with open(pipeline_file, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format") != 1:
            raise ValueError("pipeline spec must declare format: 1")
        initial, labels = _initial_state(doc["initial"])
        steps = []
        live = list(labels)
        for i, sd in enumerate(doc.get("steps", [])):
            block = resolve_block(sd["block"])
            ports = (block.block if isinstance(block, GadgetBlock) else block).in_port_names()
            if len(ports) > len(live):
                raise ValueError(f"step {i}: block consumes {len(ports)} qubits, {len(live)} live")
            wiring = {p: live[k] for k, p in enumerate(ports)}
            step = PipelineStep(
                block,
                wiring,
                noise=sd.get("noise", "none"),
                angle=sd.get("angle"),
                inject=sd.get("inject"),
            )
            steps.append(step)
            nouts = len((block.block if isinstance(block, GadgetBlock) else block).out_ports)
            live = live[len(ports):] + [f"s{i}.out.{k}" for k in range(nouts)]
        spec = PipelineSpec(
            initial, labels, steps,
            noise_p=doc.get("noise", {}).get("p", 1.0),
            noise_q=doc.get("noise", {}).get("q", 1.0),
            initial_noise=doc.get("noise", {}).get("initial", False),
        )
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        _fail(f"{exc}")
    result = run_pipeline(spec, np.random.default_rng(seed))
    lines = transcript_lines(result)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        click.echo(f"wrote {len(lines)} transcript lines to {out_path}")
    else:
        for line in lines:
            click.echo(line)


# -- threshold ----------------------------------------------------------------


@main.command()
@click.option("--code", "code_name", type=click.Choice(CODE_NAMES))
@click.option("--p-code", "p_code", type=float, help="explicit threshold constant")
@click.option("--derive", is_flag=True, help="re-derive p_code by exact enumeration + bisection")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="report JSON path")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False),
              help="render the recursion map (needs --derive)")
def threshold(code_name, p_code, derive, out_path, plot_path):
    """Threshold report: p_crit = sqrt(p_code), cbrt for q = p; provenance-tagged."""
    if (code_name is None) == (p_code is None):
        _fail("pick exactly one of --code or --p-code")
    try:
        rep = noise_mod.threshold_report(code=code_name, p_code=p_code, derive=derive)
    except noise_mod.InfeasibleError as exc:
        _fail(str(exc), EXIT_INFEASIBLE)
    except ValueError as exc:
        _fail(str(exc))
    doc = rep.to_json_dict()
    if code_name and derive:
        stored = get_code(code_name).p_code
        if stored is not None:
            doc["stored_p_code"] = {"value": stored, "provenance": get_code(code_name).p_code_provenance,
                                    "tag": "paper-constant"}
    text = json.dumps(doc, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)
    if plot_path:
        if not (code_name and derive):
            _fail("--plot needs --code and --derive")
        xs = np.linspace(0.5, 0.999, 60)
        qls = np.array([noise_mod.exact_logical_channel(code_name, float(x)).q_logical for x in xs])
        plots.render_recursion(code_name, xs, qls, rep.p_code, plot_path)
        click.echo(f"wrote recursion figure to {plot_path}")


# -- sweep ----------------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """start:stop:step with half-step-tolerant inclusion of stop."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ValueError(f"bad grid {text!r}; expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {text!r}")
    vals = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + step / 2:
            break
        vals.append(round(v, 12))
        k += 1
    return vals


def _sweep_point(args) -> dict:
    code_name, p, q, trials, seed, idx, rounds = args
    res = noise_mod.monte_carlo_logical_error(
        code_name, noise_mod.NoiseSpec(p=p, q=q), trials, seed=int(seed + idx), rounds=rounds
    )
    lo, hi = res.ci
    return {"p": p, "q": q, "trials": trials, "logical_error_rate": res.rate,
            "ci_low": lo, "ci_high": hi}


@main.command()
@click.option("--code", "code_name", type=click.Choice(CODE_NAMES), required=True)
@click.option("--p", "p_grid", required=True, help="grid start:stop:step for the resource noise p")
@click.option("--q", "q_value", type=float, default=1.0, show_default=True, help="storage noise")
@click.option("--trials", type=float, required=True, help="Monte Carlo trials per grid point")
@click.option("--seed", type=int, required=True, help="master seed (mandatory)")
@click.option("--rounds", type=int, default=1, show_default=True, help="EC rounds per trial")
@click.option("--workers", type=int, default=0, help="process pool width (0 = all cores)")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="CSV output")
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="render a PNG next to the CSV")
def sweep(code_name, p_grid, q_value, trials, seed, rounds, workers, out_path, plot):
    """Monte Carlo sweep of the logical error rate over a p grid."""
    try:
        grid = parse_grid(p_grid)
        trials = int(trials)
        if trials < 1:
            raise ValueError("trials must be >= 1")
    except ValueError as exc:
        _fail(str(exc))
    jobs = [(code_name, p, q_value, trials, seed, i, rounds) for i, p in enumerate(grid)]
    width = workers or os.cpu_count() or 1
    if width > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=width) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    fields = ["p", "q", "trials", "logical_error_rate", "ci_low", "ci_high"]
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {len(rows)} rows to {out_path}")
    if plot:
        png = os.path.splitext(out_path)[0] + ".png"
        spec = get_code(code_name)
        p_crit = None
        if spec.p_code is not None:
            p_crit = float(np.sqrt(spec.p_code))
        plots.render_sweep(rows, png, p_crit=p_crit,
                           title=f"{code_name}: {rounds} EC round(s), q={q_value}")
        click.echo(f"wrote figure to {png}")


# -- magic -----------------------------------------------------------------------


@main.command()
@click.option("--p", type=float, required=True, help="LDN parameter on the magic-axis state")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="report JSON path")
def magic(p, out_path):
    """Magic-state fidelity under D(p) and the distillability bound."""
    try:
        rep = noise_mod.magic_state_check(p)
    except ValueError as exc:
        _fail(str(exc))
    text = json.dumps(rep.to_json_dict(), indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)


if __name__ == "__main__":
    main()

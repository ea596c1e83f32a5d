"""Command-line shell over the whole laboratory.

Groups are given as preset names (kac_paljutkin, s3, s4, dual-s3, dual-s4,
dual-q8), inline JSON specs, or @file paths; states as JSON state specs or
the shorthand names haar / counit.  Add --json for machine output.  Exit
codes: 0 ok, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import states as st
from .errors import QPermError
from .magic import validate_magic
from .orbitals import orbit_classes, three_orbital_transitivity_report
from .rewriter import parse as rw_parse, prove_equal
from .sessions import new_session, sample_measurement
from .specs import (
    DEFAULT_CACHE,
    build_magic,
    build_state,
    render_slice,
    resolve_group_spec,
    sig12,
    slice_payload,
)


def _load_group_arg(text: str) -> dict:
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return resolve_group_spec(fh.read())
    return resolve_group_spec(text)


def _emit(ctx, payload: dict, human: str):
    if ctx.obj.get("json"):
        click.echo(json.dumps(payload))
    else:
        click.echo(human)


def _domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except QPermError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
@click.option("--json", "json_output", is_flag=True, help="machine-readable output")
@click.pass_context
def main(ctx, json_output):
    ctx.ensure_object(dict)
    ctx.obj["json"] = json_output


@main.command()
@click.argument("group")
@click.option("--tol", default=1e-9, show_default=True)
@click.pass_context
@_domain_errors
def validate(ctx, group, tol):
    """Check the magic unitary relations of a group spec."""
    u = build_magic(_load_group_arg(group))
    report = validate_magic(u, tol)
    _emit(ctx, report.to_dict(), report.render())
    if not report.passes:
        sys.exit(1)


@main.command()
@click.argument("group")
@click.pass_context
@_domain_errors
def info(ctx, group):
    """Dimensions, block structure, and the deterministic subgroup."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    det = st.deterministic_enumerate(h)
    perms = [[x + 1 for x in sigma] for sigma, _ in det]
    payload = {
        "label": h.magic.label,
        "n": h.n,
        "ambientDim": h.ambient_dim,
        "algebraDim": h.dim,
        "blocks": h.block_dims(),
        "deterministicOrder": len(det),
        "deterministicPermutations": perms,
    }
    human = (f"{h.magic.label or 'group'}: {h.n} symbols, carrier dim {h.ambient_dim}\n"
             f"algebra dim {h.dim}, blocks {h.block_dims()}\n"
             f"deterministic group of order {len(det)}: "
             + ", ".join("(" + " ".join(map(str, p)) + ")" for p in perms))
    _emit(ctx, payload, human)


def _resolve_state(h, text: str):
    return build_state(h, text)


@main.command("slice")
@click.argument("group")
@click.argument("state", default="haar")
@click.pass_context
@_domain_errors
def slice_cmd(ctx, group, state):
    """Birkhoff slice of a state."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    phi = _resolve_state(h, state)
    _emit(ctx, {"slice": slice_payload(phi)}, render_slice(st.birkhoff_slice(phi).matrix))


@main.command()
@click.argument("group")
@click.argument("state1")
@click.argument("state2")
@click.pass_context
@_domain_errors
def convolve(ctx, group, state1, state2):
    """Convolution of two states; prints the product slice."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    out = st.convolve(_resolve_state(h, state1), _resolve_state(h, state2))
    _emit(ctx, {"slice": slice_payload(out)}, render_slice(st.birkhoff_slice(out).matrix))


@main.command()
@click.argument("group")
@click.argument("state")
@click.argument("k", type=int)
@click.pass_context
@_domain_errors
def power(ctx, group, state, k):
    """k-th convolution power of a state."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    out = st.convolution_power(_resolve_state(h, state), k)
    _emit(ctx, {"slice": slice_payload(out)}, render_slice(st.birkhoff_slice(out).matrix))


@main.command()
@click.argument("group")
@click.argument("state")
@click.option("--n", "terms", type=int, default=None, help="fixed number of terms")
@click.pass_context
@_domain_errors
def cesaro(ctx, group, state, terms):
    """Cesaro average of convolution powers with a convergence report."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    avg, report = st.cesaro(_resolve_state(h, state), terms)
    kind = st.classify_idempotent(avg, tol=1e-6)
    payload = {
        "slice": slice_payload(avg),
        "iterations": report.iterations,
        "supChange": sig12(report.sup_change),
        "converged": report.converged,
        "classification": kind,
    }
    human = (render_slice(st.birkhoff_slice(avg).matrix)
             + f"\niterations {report.iterations}, sup change {report.sup_change:.3e}, "
               f"converged {report.converged}, {kind}")
    _emit(ctx, payload, human)


@main.command("fix-spectrum")
@click.argument("group")
@click.pass_context
@_domain_errors
def fix_spectrum_cmd(ctx, group):
    """Spectrum of the number-of-fixed-points observable."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    spec = st.fix_spectrum(h)
    values = [sig12(v) for v in spec.values]
    _emit(ctx, {"spectrum": values},
          "fix spectrum: " + ", ".join(f"{v:.9g}" for v in values))


@main.command()
@click.argument("group")
@click.pass_context
@_domain_errors
def deterministic(ctx, group):
    """Enumerate the deterministic permutations (the classical subgroup)."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    det = st.deterministic_enumerate(h)
    perms = [[x + 1 for x in sigma] for sigma, _ in det]
    _emit(ctx, {"count": len(perms), "permutations": perms},
          f"{len(perms)} deterministic permutations:\n"
          + "\n".join("  (" + " ".join(map(str, p)) + ")" for p in perms))


@main.command("idempotent-classify")
@click.argument("group")
@click.argument("state")
@click.pass_context
@_domain_errors
def idempotent_classify(ctx, group, state):
    """Classify a state as Haar idempotent, non-Haar idempotent, or neither."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    kind = st.classify_idempotent(_resolve_state(h, state))
    _emit(ctx, {"classification": kind}, kind)


@main.command()
@click.argument("group")
@click.argument("state")
@click.pass_context
@_domain_errors
def support(ctx, group, state):
    """Support projection of a state, with per-block traces."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    phi = _resolve_state(h, state)
    supp = st.support_projection(phi)
    ambient = h.from_coords(supp)
    block_traces = [sig12(float(np.real(np.trace(b.projection_ambient @ ambient))))
                    for b in h.blocks]
    payload = {
        "value": sig12(float(np.real(phi(supp)))),
        "ambientTrace": sig12(float(np.real(np.trace(ambient)))),
        "blockTraces": block_traces,
        "coords": [[sig12(c.real), sig12(c.imag)] for c in supp],
    }
    human = (f"support: state value {payload['value']}, ambient trace {payload['ambientTrace']}\n"
             f"per-block carrier traces: {block_traces}")
    _emit(ctx, payload, human)


@main.command()
@click.argument("group")
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--allow-large", is_flag=True, help="lift the N<=6 bound of the k=3 scan")
@click.pass_context
@_domain_errors
def orbitals(ctx, group, k, allow_large):
    """Orbit/orbital classes (k=1,2) or the 3-orbital transitivity report."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    if k in (1, 2):
        rel = orbit_classes(h, k)
        classes = [[tuple(x + 1 for x in t) for t in cls] for cls in rel.classes]
        human = (f"~{k} has {len(classes)} classes:\n"
                 + "\n".join("  " + ", ".join(map(str, cls)) for cls in classes))
        _emit(ctx, {"k": k, "classes": [[list(t) for t in cls] for cls in classes],
                    "suspiciousNorms": list(rel.suspicious_norms)}, human)
    elif k == 3:
        report = three_orbital_transitivity_report(h, allow_large=allow_large)
        payload = {
            "k": 3,
            "transitive": report.transitive,
            "witnesses": [[list(map(lambda x: x + 1, t)) for t in w] for w in report.witnesses],
            "suspiciousNorms": list(report.suspicious_norms),
        }
        _emit(ctx, payload, report.render())
    else:
        raise click.UsageError("k must be 1, 2 or 3")


@main.command("seq-prob")
@click.argument("group")
@click.argument("state")
@click.argument("events", nargs=-1, required=True)
@click.pass_context
@_domain_errors
def seq_prob(ctx, group, state, events):
    """Probability of a chain of events 'i,j' listed in measurement order."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    phi = _resolve_state(h, state)
    parsed = []
    for ev in events:
        i, j = (int(x) for x in ev.split(","))
        parsed.append((i - 1, j - 1))
    value = st.sequential_probability(phi, parsed)
    _emit(ctx, {"probability": sig12(value)}, f"probability: {value:.12g}")


@main.command()
@click.argument("group")
@click.argument("state", default="haar")
@click.option("--shots", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--positions", default="1", show_default=True,
              help="comma-separated positions measured per shot")
@click.pass_context
@_domain_errors
def sample(ctx, group, state, shots, seed, positions):
    """Seeded sampling: frequency table of outcome sequences."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    phi = _resolve_state(h, state)
    position_list = [int(x) - 1 for x in positions.split(",")]
    counts: dict[tuple[int, ...], int] = {}
    for shot in range(shots):
        session = new_session(h, phi, seed + shot)
        outcome = tuple(sample_measurement(session, j)[0] + 1 for j in position_list)
        counts[outcome] = counts.get(outcome, 0) + 1
    table = sorted(counts.items(), key=lambda kv: -kv[1])
    payload = {
        "shots": shots,
        "seed": seed,
        "positions": [p + 1 for p in position_list],
        "frequencies": [{"outcomes": list(o), "count": c, "frequency": sig12(c / shots)}
                        for o, c in table],
    }
    human = "\n".join(f"  {' '.join(map(str, o))}: {c / shots:.6f}  ({c})"
                      for o, c in table[:20])
    _emit(ctx, payload, f"outcome frequencies over {shots} shots:\n{human}")


@main.command()
@click.argument("group")
@click.argument("state", default="haar")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
@_domain_errors
def measure(ctx, group, state, seed):
    """Interactive measurement loop; renders the slice grid after each flip."""
    h = DEFAULT_CACHE.get(_load_group_arg(group))
    phi = _resolve_state(h, state)
    session = new_session(h, phi, seed)
    click.echo(f"measuring {h.magic.label or 'group'} (n={h.n}), seed {seed}")
    click.echo(render_slice(st.birkhoff_slice(session.current).matrix))
    while True:
        try:
            line = click.prompt(f"position (1..{h.n}, q quits)", default="q", show_default=False)
        except (EOFError, click.Abort):
            break
        line = line.strip().lower()
        if line in ("q", "quit", "exit", ""):
            break
        try:
            position = int(line)
        except ValueError:
            click.echo("enter a position number or q")
            continue
        if not 1 <= position <= h.n:
            click.echo(f"position must be in 1..{h.n}")
            continue
        earlier = [i for j, i, _ in session.history if j == position - 1]
        try:
            outcome, prob = sample_measurement(session, position - 1)
        except QPermError as exc:
            click.echo(f"cannot measure: {exc}")
            continue
        flag = any(prev != outcome for prev in earlier)
        click.echo(f"position {position} -> outcome {outcome + 1}  (probability {prob:.6g})"
                   + ("   ** NON-CLASSICAL: contradicts an earlier flip **" if flag else ""))
        click.echo(render_slice(st.birkhoff_slice(session.current).matrix))
    click.echo(f"history: {[(j + 1, i + 1, round(p, 6)) for j, i, p in session.history]}")


@main.command()
@click.option("--n", "size", type=int, required=True)
@click.option("--depth", type=int, default=6, show_default=True)
@click.argument("identity")
@click.pass_context
@_domain_errors
def rewrite(ctx, size, depth, identity):
    """Prove 'lhs == rhs' in the universal magic algebra of size N."""
    if "==" not in identity:
        raise click.UsageError("identity must have the form 'lhs == rhs'")
    lhs_text, rhs_text = identity.split("==", 1)
    lhs, rhs = rw_parse(lhs_text, size), rw_parse(rhs_text, size)
    result = prove_equal(lhs, rhs, depth)
    payload = {
        "status": result.status,
        "explored": result.explored,
        "trace": list(result.trace),
    }
    if result.proved:
        human = f"Proved ({result.explored} states explored)\n" + "\n".join(result.trace)
    else:
        human = f"Unknown at depth {depth} ({result.explored} states explored)"
    _emit(ctx, payload, human)
    if not result.proved:
        sys.exit(1)


@main.command()
@click.option("--port", type=int, default=None, help="default: $QPERMLAB_PORT or 8787")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None, help="directory of UI assets to serve")
@_domain_errors
def serve(port, host, static_dir):
    """Serve the measurement-session HTTP API (and the card-table UI if built)."""
    import os

    from .server import serve as run_server

    if port is None:
        port = int(os.environ.get("QPERMLAB_PORT", "8787"))
    click.echo(f"serving on http://{host}:{port}")
    run_server(port, static_dir, host)


if __name__ == "__main__":
    main()

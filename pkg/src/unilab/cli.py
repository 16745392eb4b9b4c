"""``unilab`` command-line front end.

Every command prints (or writes with ``--out``) one JSON document of the form
``{"command", "config", "result"}`` where ``config`` holds the effective
tolerances, seed and parsed inputs. Sweeps emit CSV instead; with ``--out`` the
config then goes to a ``<out>.config.json`` sidecar.

Exit codes: 0 success (infeasibility is reported inside the result), 2 for
unparseable arguments or input files, 3 for inputs that parse but fail
validation.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import bayesnet, bell, causality, dynamics, io, tolerances
from .errors import DimensionError, UnilabError, ValidationError, ZeroSupportError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 1_000_000


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


# ---------------------------------------------------------------------------
# Argument types


def _grid(text: str) -> tuple[float, float, int]:
    try:
        start, stop, count = text.split(":")
        grid = float(start), float(stop), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:COUNT, got {text!r}") from None
    if grid[2] < 1:
        raise argparse.ArgumentTypeError("grid count must be >= 1")
    return grid


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return seed


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def grid_points(grid: tuple[float, float, int]) -> list[float]:
    start, stop, count = grid
    return [start] if count == 1 else np.linspace(start, stop, count).tolist()


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the result here instead of standard output")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (csv only for sweeps; default json, or csv when sweeping)")
    common.add_argument("--tol-prob", type=float, default=None,
                        help=f"probability tolerance (default {tolerances.TOL_PROB}, or ${tolerances.ENV_TOL_PROB})")
    common.add_argument("--degrees", action="store_true", help="angle inputs are in degrees")
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="master seed for sampling")
    common.add_argument("--workers", type=_positive_int, default=1, help="threads for sweeps and sampling")

    p = _Parser(prog="unilab", description="Unistochastic dynamics, causal locality and Bell analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("evolve", parents=[common], help="U(t), Gamma(t) and p(t) for a schedule")
    s.add_argument("--schedule", required=True)
    s.add_argument("--p0")
    s.add_argument("--t", type=float, required=True)

    s = sub.add_parser("divisibility", parents=[common], help="interference and divisibility across t'")
    s.add_argument("--schedule", required=True)
    s.add_argument("--t", type=float, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--tprime", type=float)
    g.add_argument("--scan", type=_grid, metavar="START:STOP:COUNT")

    s = sub.add_parser("causal", parents=[common], help="causal influence between subsystems")
    s.add_argument("--schedule", required=True)
    s.add_argument("--dims", type=_ints, required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--t", type=float, help="time (default: schedule duration)")

    s = sub.add_parser("epr", parents=[common], help="no-signalling check in the four-subsystem scenario")
    s.add_argument("--scenario", required=True)

    s = sub.add_parser("chsh", parents=[common], help="CHSH value of a scenario")
    s.add_argument("--scenario", required=True)

    s = sub.add_parser("bell1964", parents=[common], help="original Bell inequality at three angles")
    s.add_argument("--scenario", required=True)
    s.add_argument("--angles", type=_floats, required=True, metavar="A,B,C")
    s.add_argument("--samples", type=int, default=0,
                   help="also sample the deterministic sign model with this many draws")

    s = sub.add_parser("lhv", parents=[common], help="local hidden-variable correlators")
    s.add_argument("--model", required=True)
    s.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    s.add_argument("--sweep", type=_grid, metavar="START:STOP:COUNT",
                   help="sweep B's angle with A fixed at its first setting (CSV)")
    s.add_argument("--scenario", help="quantum scenario for the sweep's E_quantum column (default: singlet)")

    s = sub.add_parser("bayesnet", parents=[common], help="queries against a conditional-table network")
    s.add_argument("--net", required=True)
    s.add_argument("--query", required=True)
    return p


# ---------------------------------------------------------------------------
# Commands. Each returns (inputs echoed into the config, result payload).


def _angle(x: float, degrees: bool) -> float:
    return float(np.deg2rad(x)) if degrees else float(x)


def _show_angle(x: float, degrees: bool) -> float:
    return float(np.rad2deg(x)) if degrees else float(x)


def _load_scenario(path: str, degrees: bool):
    doc = io.load_json(path)
    return doc, io.scenario_from_json(doc, base=Path(path).parent, degrees=degrees)


def cmd_evolve(args):
    sched_doc = io.load_json(args.schedule)
    ev = dynamics.UnitaryEvolution(io.schedule_from_json(sched_doc))
    u = ev.evaluate(args.t)
    gamma = dynamics.unistochastic_from_unitary(u)
    result: dict[str, Any] = {
        "t": args.t,
        "unitary": io.complex_to_json(u),
        "gamma": io.real_to_json(gamma),
    }
    inputs: dict[str, Any] = {"schedule": sched_doc}
    if args.p0:
        p0_doc = io.load_json(args.p0)
        p0 = io.real_from_json(p0_doc)
        inputs["p0"] = p0_doc
        p_t = dynamics.propagate(gamma, p0)
        rho = u @ np.diag(p0).astype(complex) @ u.conj().T
        diag = np.real(np.diagonal(rho))
        result.update({
            "p0": io.real_to_json(p0),
            "p_t": io.real_to_json(p_t),
            "rho_t": io.complex_to_json(rho),
            "correspondence_residual": float(np.max(np.abs(diag - p_t))),
        })
    return inputs, result


def _scan_row(ev, t, tp):
    try:
        rep = dynamics.transition_report(ev, t, tp)
        return [tp, rep.interference_norm, rep.divisible, ""]
    except UnilabError as exc:
        return [tp, None, None, f"{type(exc).__name__}: {exc}"]


def cmd_divisibility(args):
    sched_doc = io.load_json(args.schedule)
    ev = dynamics.UnitaryEvolution(io.schedule_from_json(sched_doc))
    inputs = {"schedule": sched_doc}
    if args.scan is None:
        return inputs, dynamics.transition_report(ev, args.t, args.tprime).to_dict()
    grid = grid_points(args.scan)
    rows = _parallel_map(lambda tp: _scan_row(ev, args.t, tp), grid, args.workers)
    header = ["t_prime", "interference_norm", "divisible", "error"]
    return inputs, {"header": header, "rows": rows}


def cmd_causal(args):
    sched_doc = io.load_json(args.schedule)
    ev = dynamics.UnitaryEvolution(io.schedule_from_json(sched_doc))
    labels = tuple(x.strip() for x in args.labels.split(","))
    cs = causality.CompositeSystem(labels, args.dims)
    t = ev.schedule.duration if args.t is None else args.t
    gamma = dynamics.unistochastic_from_unitary(ev.evaluate(t))
    if gamma.shape[0] != cs.dim:
        raise DimensionError(f"schedule dimension {gamma.shape[0]} != product of dims {cs.dim}")
    influences = [
        causality.causal_influence(cs, gamma, s, r).to_dict()
        for s in labels for r in labels if s != r
    ]
    splits = [labels[:1]] if len(labels) == 2 else [(x,) for x in labels]
    factorization = []
    for left in splits:
        right = tuple(x for x in labels if x not in left)
        ok, residual = causality.factorization_check(cs, gamma, (left, right))
        factorization.append({"left": list(left), "right": list(right),
                              "factorizes": ok, "residual": residual})
    return {"schedule": sched_doc}, {
        "t": t,
        "system": cs.to_dict(),
        "gamma": io.real_to_json(gamma),
        "influence": influences,
        "factorization": factorization,
    }


def _correlator_grid(scenario, fn, degrees):
    out = []
    for a in scenario.settings_a:
        for b in scenario.settings_b:
            c = fn(scenario, a, b)
            out.append({"setting_a": _show_angle(a, degrees), "setting_b": _show_angle(b, degrees),
                        "value": c.value})
    return out


def cmd_epr(args):
    doc, scenario = _load_scenario(args.scenario, args.degrees)
    report = bell.epr_no_signaling(scenario)
    return {"scenario": doc}, {
        **report.to_dict(),
        "correlators": _correlator_grid(scenario, bell.quantum_correlator, args.degrees),
    }


def cmd_chsh(args):
    doc, scenario = _load_scenario(args.scenario, args.degrees)
    unistochastic = _correlator_grid(scenario, bell.quantum_correlator, args.degrees)
    density = _correlator_grid(scenario, bell.density_correlator, args.degrees)
    if len(scenario.settings_a) != 2 or len(scenario.settings_b) != 2:
        raise ValidationError("CHSH needs exactly two settings per side")
    s_value = bell.chsh_combination(*(c["value"] for c in unistochastic))
    s_density = bell.chsh_combination(*(c["value"] for c in density))
    return {"scenario": doc}, {
        "correlators": unistochastic,
        "correlators_density": density,
        "value": s_value,
        "value_density": s_density,
        "classical_bound": 2.0,
        "quantum_bound": float(2 * np.sqrt(2)),
        "violates_classical_bound": s_value > 2 + tolerances.tol_prob(),
    }


def _bell1964_block(corrs, tol):
    res = bell.bell_1964_check(*corrs, tol=tol)
    return {
        "P_ab": corrs[0].value, "P_ac": corrs[1].value, "P_bc": corrs[2].value,
        "lhs": res.lhs, "rhs": res.rhs, "tolerance": tol,
        "satisfied": res.satisfied, "violated": not res.satisfied,
    }


def cmd_bell1964(args):
    if len(args.angles) != 3:
        raise ParseError("--angles needs exactly three values A,B,C")
    doc, scenario = _load_scenario(args.scenario, args.degrees)
    a, b, c = (_angle(x, args.degrees) for x in args.angles)
    pairs = ((a, b), (a, c), (b, c))
    quantum = [bell.quantum_correlator(scenario, x, y) for x, y in pairs]
    result: dict[str, Any] = {"angles": list(args.angles), "quantum": _bell1964_block(quantum, tolerances.tol_prob())}
    if args.samples > 0:
        model = bell.DeterministicLHV("circle")
        lhv = [bell.lhv_deterministic_correlator(model, x, y, args.samples, args.seed, args.workers)
               for x, y in pairs]
        tol = 3 * float(np.sqrt(sum(cr.stderr ** 2 for cr in lhv)))
        block = _bell1964_block(lhv, tol)
        block["stderr"] = [cr.stderr for cr in lhv]
        block["samples"] = args.samples
        result["lhv_sign_model"] = block
    return {"scenario": doc}, result


def cmd_lhv(args):
    doc = io.load_json(args.model)
    model, sa, sb = io.lhv_model_from_json(doc, degrees=args.degrees)
    inputs: dict[str, Any] = {"model": doc}

    if isinstance(model, bell.LocalCausalModel):
        def corr(a, b):
            return bell.lhv_correlator(model, a, b)
    else:
        def corr(a, b):
            return bell.lhv_deterministic_correlator(model, a, b, args.samples, args.seed, args.workers)

    if args.sweep is not None:
        if not isinstance(model, bell.DeterministicLHV):
            raise ValidationError("angle sweeps need a deterministic model (finite models fix their settings)")
        if args.scenario:
            sdoc, scenario = _load_scenario(args.scenario, args.degrees)
            inputs["scenario"] = sdoc
        else:
            scenario = None
        a = sa[0]

        def row(b_in):
            b = _angle(b_in, args.degrees)
            try:
                eq = (bell.quantum_correlator(scenario, a, b).value if scenario is not None
                      else bell.singlet_correlator(a, b))
                c = corr(a, b)
                return [_show_angle(a, args.degrees), b_in, eq, c.value, c.stderr, ""]
            except UnilabError as exc:
                return [_show_angle(a, args.degrees), b_in, None, None, None, f"{type(exc).__name__}: {exc}"]

        rows = [row(b) for b in grid_points(args.sweep)]
        header = ["angle_a", "angle_b", "E_quantum", "E_lhv", "stderr", "error"]
        return inputs, {"header": header, "rows": rows}

    correlators = []
    for a in sa:
        for b in sb:
            c = corr(a, b)
            entry = {"setting_a": _show_angle(a, args.degrees), "setting_b": _show_angle(b, args.degrees),
                     "value": c.value}
            if c.stderr is not None:
                entry["stderr"] = c.stderr
                entry["closed_form"] = bell.sign_model_correlator(a, b)
            correlators.append(entry)
    result: dict[str, Any] = {"kind": doc.get("kind", "deterministic"), "correlators": correlators}
    if len(sa) == 2 and len(sb) == 2:
        s = bell.chsh_combination(*(c["value"] for c in correlators))
        result["chsh"] = s
        if isinstance(model, bell.DeterministicLHV):
            result["chsh_stderr"] = float(np.sqrt(sum(c["stderr"] ** 2 for c in correlators)))
        result["classical_bound"] = 2.0
    if isinstance(model, bell.DeterministicLHV):
        result["samples"] = args.samples
    else:
        table = model.full_table()
        result["outcome_independence"] = bell.outcome_independence(table)[0]
        result["parameter_independence"] = bell.parameter_independence(table)[0]
        result["local_causality"] = bell.local_causality(table)[0]
    return inputs, result


def _run_query(net: bayesnet.BayesNetwork, joint: bayesnet.JointDistribution, q: dict) -> dict:
    kind = q.get("type")
    try:
        if kind == "joint":
            return joint.to_dict()
        if kind == "marginal":
            return joint.marginal(q["variables"]).to_dict()
        if kind == "propagate":
            ct = net.table(q["child"])
            if not ct.parents:
                return {"child": ct.child, "distribution": ct.table.tolist()}
            p = bayesnet.propagate_multilinear(ct, joint.marginal(ct.parents))
            return {"child": ct.child, "distribution": p.tolist()}
        if kind == "reversed_conditional":
            try:
                return bayesnet.reversed_conditional(joint, q["child"], q["given"]).to_dict()
            except ZeroSupportError as exc:
                return {"error": f"ZeroSupportError: {exc}"}
        if kind == "reichenbach":
            return bayesnet.reichenbach_test(joint, q["a"], q["b"], q["c"]).to_dict()
    except KeyError as exc:
        raise io.FormatError(f"query {q}: missing or unknown name {exc}") from None
    raise io.FormatError(f"unknown query type {kind!r}")


def cmd_bayesnet(args):
    net_doc = io.load_json(args.net)
    q_doc = io.load_json(args.query)
    net = io.network_from_json(net_doc)
    if isinstance(q_doc, dict) and "queries" in q_doc:
        queries = q_doc["queries"]
    elif isinstance(q_doc, list):
        queries = q_doc
    else:
        queries = [q_doc]
    if not all(isinstance(q, dict) for q in queries):
        raise io.FormatError("each query must be a JSON object")
    joint = net.joint()
    answers = [{"query": q, "result": _run_query(net, joint, q)} for q in queries]
    return {"net": net_doc, "query": q_doc}, {"order": net.order(), "answers": answers}


COMMANDS: dict[str, Callable] = {
    "evolve": cmd_evolve,
    "divisibility": cmd_divisibility,
    "causal": cmd_causal,
    "epr": cmd_epr,
    "chsh": cmd_chsh,
    "bell1964": cmd_bell1964,
    "lhv": cmd_lhv,
    "bayesnet": cmd_bayesnet,
}


# ---------------------------------------------------------------------------
# Driver


def _parallel_map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@contextlib.contextmanager
def _tol_override(value: float | None):
    if value is None:
        yield
        return
    old = os.environ.get(tolerances.ENV_TOL_PROB)
    os.environ[tolerances.ENV_TOL_PROB] = repr(float(value))
    try:
        yield
    finally:
        if old is None:
            del os.environ[tolerances.ENV_TOL_PROB]
        else:
            os.environ[tolerances.ENV_TOL_PROB] = old


def _options(args) -> dict:
    skip = {"command", "out", "tol_prob"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        Path(out).write_text(text)
    else:
        stdout.write(text)


def _fail(code: int, kind: str, message: str, stderr) -> int:
    stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except ParseError as exc:
        return _fail(EXIT_PARSE, "usage", str(exc), stderr)
    sweeping = getattr(args, "scan", None) is not None or getattr(args, "sweep", None) is not None
    fmt = args.format or ("csv" if sweeping else "json")
    if fmt == "csv" and not sweeping:
        return _fail(EXIT_PARSE, "usage", "csv output is only available for sweeps", stderr)

    with _tol_override(args.tol_prob):
        try:
            inputs, result = COMMANDS[args.command](args)
        except (ParseError, io.FormatError) as exc:
            return _fail(EXIT_PARSE, "parse", str(exc), stderr)
        except (UnilabError, ValueError, KeyError, IndexError) as exc:
            return _fail(EXIT_VALIDATION, type(exc).__name__, str(exc), stderr)
        config = {
            "command": args.command,
            "format": fmt,
            "options": _options(args),
            "seed": args.seed,
            "tolerances": tolerances.effective(),
            "inputs": inputs,
        }

    if fmt == "csv":
        _emit(io.format_csv(result["header"], result["rows"]), args.out, stdout)
        if args.out:
            Path(args.out + ".config.json").write_text(io.dumps(config))
        return EXIT_OK
    if sweeping:
        result = {"rows": [dict(zip(result["header"], r)) for r in result["rows"]]}
    _emit(io.dumps({"command": args.command, "config": config, "result": result}), args.out, stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``stabkit <example> <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, beam, hybrid1d, kernels, schrodinger, thermo
from .core import correction_split, dissipation_residual, evolve
from .errors import ConfigInvalid, StabkitError

SCHEMA = "1"
EXAMPLES = ("beam", "thermo", "hybrid1d", "schrodinger")
COMMANDS = ("spectrum", "simulate", "observability", "transfer", "decay", "split")

DEFAULTS = {
    "beam": {"modes": 32, "kmax": 40, "beta": 1.0, "dt": 0.05, "tmax": 200.0, "T": 8.0,
             "weight_order": -1.0, "z0": "mixed"},
    "thermo": {"modes": 32, "alpha": 1.0, "beta": 1.0, "dt": 0.05, "tmax": 60.0, "z0": "mixed"},
    "hybrid1d": {"modes": 128, "a": 1.0, "b": 1.0, "dt": 0.05, "tmax": 400.0, "T": 8.0,
                 "weight_order": -2.0, "z0": "quarter", "kmax": 20},
    "schrodinger": {"modes": 32, "kmax": 60, "dt": 0.05, "tmax": 500.0, "T": 4.0,
                    "subspace": "H1"},
}
POSITIVE = ("modes", "kmax", "dt", "tmax", "T", "alpha", "a")
NONNEGATIVE = ("beta", "b")

# descriptive tag of the property each report checks
ANCHORS = {
    ("beam", "spectrum"): "beam-root-asymptotics",
    ("schrodinger", "spectrum"): "schrodinger-branch-asymptotics",
    ("thermo", "spectrum"): "thermo-block-rates",
    ("hybrid1d", "spectrum"): "hybrid-discrete-frequencies",
    ("schrodinger", "transfer"): "transfer-function-bound",
    ("beam", "observability"): "beam-weighted-observability",
    ("thermo", "observability"): "thermo-uniform-observability",
    ("hybrid1d", "observability"): "hybrid-weighted-observability",
    ("schrodinger", "observability"): "schrodinger-subspace-observability",
    ("beam", "decay"): "beam-polynomial-decay",
    ("thermo", "decay"): "thermo-exponential-decay",
    ("hybrid1d", "decay"): "hybrid-polynomial-decay",
    ("schrodinger", "decay"): "schrodinger-subspace-decay",
}


def build_parser():
    p = argparse.ArgumentParser(prog="stabkit", description=__doc__)
    p.add_argument("example", choices=EXAMPLES)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat JSON file of parameters; flags override it")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--modes", "-N", type=int, help="modes (grid cells for hybrid1d)")
    p.add_argument("--kmax", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--T", type=float, help="observation horizon")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--xi", help="damping point, a number or an expression like 'sqrt(2)-1'")
    p.add_argument("--weight-order", dest="weight_order", type=float)
    p.add_argument("--subspace", choices=("H1", "H2", "full"))
    p.add_argument("--z0", help="named initial state")
    return p


def parse_xi(value):
    try:
        return float(value)
    except ValueError:
        import sympy

        try:
            return float(sympy.sympify(value).evalf(30))
        except (sympy.SympifyError, TypeError) as exc:
            raise ConfigInvalid(f"xi: cannot evaluate {value!r}") from exc


def resolve_config(args):
    """Merge defaults, the config file and flags into one flat dict."""
    params = dict(DEFAULTS[args.example])
    fmt = args.format
    if args.config:
        try:
            file_params = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"config: {exc}") from exc
        if not isinstance(file_params, dict):
            raise ConfigInvalid("config: expected a flat JSON object")
        fmt = fmt or file_params.pop("format", None)
        params.update(file_params)
    for key, val in vars(args).items():
        if key in ("example", "command", "config", "out", "format") or val is None:
            continue
        params[key] = val
    params["format"] = fmt or "json"
    if args.example == "schrodinger":
        if params.get("xi") is None:
            raise ConfigInvalid("xi: required for the schrodinger example")
        params["xi_text"] = str(params["xi"])
        params["xi"] = parse_xi(params["xi"])
        if not 0 < params["xi"] < 1:
            raise ConfigInvalid("xi: must lie in (0, 1)")
    for key in POSITIVE:
        if key in params and not params[key] > 0:
            raise ConfigInvalid(f"{key}: must be positive")
    for key in NONNEGATIVE:
        if key in params and params[key] < 0:
            raise ConfigInvalid(f"{key}: must be nonnegative")
    if args.command == "transfer" and args.example != "schrodinger":
        raise ConfigInvalid("command: transfer is only defined for schrodinger")
    return params


def _clean(x):
    """Make ``x`` JSON-safe; non-finite floats become None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return {"re": _clean(x.real), "im": _clean(x.imag)}
    return x


# per-command runners; each returns (results, trajectory or None)

def _spectrum(ex, p):
    rows = []
    if ex == "beam":
        kmax = int(p["kmax"])
        spec = beam.beam_eigenvalues(min(beam.K0_DEFAULT, kmax), kmax)
        for k, z in zip(spec.ks, spec.zs):
            mode = beam.beam_mode(int(k), spec)
            rows.append({"k": int(k), "sqrt_mu": z, "asymptote": math.pi / 2 + k * math.pi,
                         "residual": mode.asymptotic_residual,
                         "char_value": abs(beam.beam_char(z)), "k4_eta2": k ** 4 * mode.eta ** 2})
        tested = [r for r in rows if 20 <= r["k"] <= 60]
        ok = all(0.8 <= r["residual"] <= 1.2 and r["char_value"] <= 1e-10 for r in tested)
        consts = {"unique_brackets": all(spec.unique_brackets.values())}
    elif ex == "schrodinger":
        for k in range(1, int(p["kmax"]) + 1):
            e1 = schrodinger.schro_branch_eigenvalue(k, 1)
            e2 = schrodinger.schro_branch_eigenvalue(k, 2)
            rows.append({"k": k, "mu_1": e1.mu, "residual_1": e1.asymptotic_residual,
                         "mu_2": e2.mu, "residual_2": e2.asymptotic_residual})
        tested = [r for r in rows if 20 <= r["k"] <= 60]
        ok = all(0.85 <= r["residual_1"] <= 1.15 and r["residual_2"] <= 10 for r in tested)
        consts = {"xi_in_S": schrodinger.in_S(p["xi_text"]),
                  "sine_gap": schrodinger.sine_gap(p["xi"], 10 ** 4)}
        try:
            cf = schrodinger.continued_fraction(p["xi_text"], 30)
            consts.update({"cf_quotients": cf.quotients, "cf_max_quotient": cf.max_quotient})
        except StabkitError as exc:
            consts["cf_error"] = str(exc)
    elif ex == "thermo":
        for k in range(1, int(p["modes"]) + 1):
            A, _ = thermo.thermo_block(k, p["alpha"], p["beta"])
            ev = np.linalg.eigvals(A)
            rows.append({"k": k, "rate": -2 * float(np.max(ev.real)),
                         "freq": float(np.max(np.abs(ev.imag)))})
        ok = all(r["rate"] > 0 for r in rows) if p["beta"] > 0 else True
        consts = {"oracle_rate": min(r["rate"] for r in rows)}
    else:
        from .core import conservative_eigenbasis

        gen = hybrid1d.hybrid_assemble(int(p["modes"]), p["a"], p["b"])
        mu, _ = conservative_eigenbasis(gen)
        pos = np.sort(mu[mu > 1e-9])[: int(p["kmax"])]
        rows = [{"n": i + 1, "mu": m} for i, m in enumerate(pos)]
        ok = True
        consts = {"n_modes": int(mu.size)}
    return {"constants": consts, "rows": rows, "pass": ok}, None


def _generator_and_state(ex, p):
    N = int(p["modes"])
    if ex == "beam":
        gen = beam.beam_generator(N, p["beta"])
        return gen, beam.beam_initial_state(N, p["z0"], p["beta"], gen)
    if ex == "thermo":
        return thermo.thermo_generator(N, p["alpha"], p["beta"]), thermo.thermo_initial_state(N, p["z0"])
    if ex == "hybrid1d":
        return hybrid1d.hybrid_assemble(N, p["a"], p["b"]), hybrid1d.hybrid_initial_state(N, p["z0"])
    gen = schrodinger.schro_generator(N, p["xi"])
    return gen, schrodinger.schro_initial_state(N, p["xi"], p["subspace"], gen=gen)


def _simulate(ex, p):
    gen, z0 = _generator_and_state(ex, p)
    traj = evolve(gen, z0, p["dt"], p["tmax"], "damped")
    E0 = float(traj.energies[0])
    res = dissipation_residual(traj)
    mono = bool(np.all(np.diff(traj.energies) <= 1e-12 * E0))
    return {"constants": {"energy_initial": E0, "energy_final": float(traj.energies[-1])},
            "residuals": {"energy_identity": res, "energy_identity_relative": res / E0},
            "pass": mono and res <= 1e-6 * E0}, traj


def _observability(ex, p):
    N = int(p["modes"])
    if ex == "beam":
        rep = beam.beam_observability(N, p["T"], weight_order=p["weight_order"], beta=p["beta"])
    elif ex == "thermo":
        rep = thermo.thermo_observability(N, p["alpha"], p.get("T"))
    elif ex == "hybrid1d":
        rep = hybrid1d.hybrid_observability(N, p["T"], a=p["a"], weight_order=p["weight_order"])
    else:
        rep = schrodinger.schro_observability(N, p["xi"], p["subspace"], p["T"],
                                              weight_order=p.get("weight_order"))
    return {"constants": rep.to_dict(), "pass": rep.constant > 0}, None


def _transfer(ex, p):
    xi = p["xi"]
    N = int(p.get("transfer_modes", 400))
    big, y_at, vals = schrodinger.transfer_scan(xi, p.get("beta", 1.0), N=N)
    coarse = schrodinger.transfer_value(xi, 1 + 1j, N // 2).value
    fine = schrodinger.transfer_value(xi, 1 + 1j, N).value
    change = abs(fine - coarse)
    return {"constants": {"max_abs": big, "y_at_max": y_at, "modes": N},
            "residuals": {"refinement_change": change},
            "pass": bool(np.all(np.isfinite(vals))) and change <= 1e-3}, None


def _decay(ex, p):
    N = int(p["modes"])
    if ex == "beam":
        rep, traj = beam.beam_decay_experiment(N, p["beta"], p["z0"], p["tmax"], dt=p["dt"])
    elif ex == "thermo":
        rep, traj = thermo.thermo_decay_experiment(N, p["alpha"], p["beta"], p["z0"], p["tmax"],
                                                   dt=p["dt"])
    elif ex == "hybrid1d":
        rep, traj = hybrid1d.hybrid_decay_experiment(N, p["a"], p["b"], p["z0"], p["tmax"],
                                                     dt=p["dt"])
    else:
        rep, traj = schrodinger.schro_decay_experiment(N, p["xi"], p["subspace"], p["tmax"],
                                                       dt=p["dt"])
    d = rep.to_dict()
    ok = d["pass"]
    if ex == "schrodinger" and p["subspace"] != "full":
        ok = ok and rep.extras["leakage"] < 0.1
    res = {"energy_identity": dissipation_residual(traj) / traj.energies[0]}
    return {"fit": d, "residuals": res, "pass": ok}, traj


def _split(ex, p):
    gen, z0 = _generator_and_state(ex, p)
    T = p.get("T") or (thermo.observation_horizon(p["alpha"]) if ex == "thermo" else 1.0)
    ratio, bound = correction_split(gen, z0, T)
    return {"constants": {"ratio": ratio, "bound": bound, "T": T}, "pass": ratio <= bound}, None


RUNNERS = {"spectrum": _spectrum, "simulate": _simulate, "observability": _observability,
           "transfer": _transfer, "decay": _decay, "split": _split}


def run(example, command, params):
    """Run one command; returns ``(report_dict, trajectory or None)``."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results, traj = RUNNERS[command](example, params)
    results["warnings"] = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    public = {k: v for k, v in params.items() if k not in ("format", "xi_text")}
    if example == "schrodinger":
        public["xi"] = params["xi_text"]
    report = {
        "schema": SCHEMA,
        "example": example,
        "command": command,
        "anchor": ANCHORS.get((example, command), f"{example}-{command}"),
        "params": public,
        "results": results,
        "provenance": {"dt": traj.dt if traj is not None else params.get("dt"),
                       "N": params.get("modes"), "tool_version": __version__,
                       "backend": kernels.BACKEND},
    }
    return _clean(report), traj


def to_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def trace_csv(traj):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "E", "dissipation"])
    for t, e, d in zip(traj.times, traj.energies, traj.dissipation):
        w.writerow([repr(float(t)), repr(float(e)), repr(float(d))])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return f"{v['re']:.4g}{v['im']:+.4g}j"
    return str(v)


def render_table(rows, columns=None):
    """Fixed-width text table; an empty ``rows`` gives the header alone."""
    columns = columns or (list(rows[0]) if rows else ["key", "value"])
    cells = [[_fmt(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def report(rep):
    """Human-readable summary of a run report."""
    res = rep["results"]
    out = [f"{rep['example']} {rep['command']}  [{rep['anchor']}]"]
    if res.get("rows"):
        out.append(render_table(res["rows"]))
    flat = []
    for section in ("constants", "residuals", "fit"):
        for k, v in sorted((res.get(section) or {}).items()):
            if not isinstance(v, (dict, list)):
                flat.append({"key": f"{section}.{k}", "value": v})
    if flat:
        out.append(render_table(flat, ["key", "value"]))
    for w in res.get("warnings", []):
        out.append(f"warning: {w}")
    out.append("PASS" if res.get("pass") else "FAIL")
    return "\n".join(out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        params = resolve_config(args)
        rep, traj = run(args.example, args.command, params)
    except ConfigInvalid as exc:
        print(f"stabkit: invalid config: {exc}", file=sys.stderr)
        return 1
    except StabkitError as exc:
        print(f"stabkit: {args.example} {args.command} failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    print(report(rep))
    if args.out:
        out = Path(args.out)
        if params["format"] == "csv":
            if traj is None:
                print("stabkit: invalid config: format: csv needs a command with a trace",
                      file=sys.stderr)
                return 1
            out.write_text(trace_csv(traj))
            out.with_suffix(".json").write_text(to_json(rep))
        else:
            out.write_text(to_json(rep))
    return 0 if rep["results"]["pass"] else 2


if __name__ == "__main__":
    sys.exit(main())

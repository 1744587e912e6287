"""Command-line front end emitting plot-ready CSV data.

Subcommands: aa, portrait, lpt, stationary, boundary, freqresp, energy-map,
simulate, sweep. Grid flags take a ``lo:hi:count`` range; scalar flags take
a plain number. Every CSV starts with a one-line ``#`` provenance comment
(command and parameters, no timestamps) so identical invocations produce
byte-identical files; auxiliary JSON summaries are appended as ``#`` comment
lines to keep each file parseable as plain CSV. Numbers carry 12 significant
digits. Exit status: 0 success, 2 usage error, 3 numeric failure, 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from hviosc import __version__
from hviosc.action_angle import aa_quantities
from hviosc.boundaries import (boundary_maximum, boundary_saddle,
                               coexistence_point, energy_map,
                               frequency_response, transition_boundary)
from hviosc.manifold import (PhasePoint, ScaledForcing, lpt_contour,
                             manifold_value, stationary_points)
from hviosc.sim import SimConfig, energy_summary, numeric_boundary, simulate


class _Usage(Exception):
    """Bad flag/config values detected after argparse."""


def _fmt(v) -> str:
    return "{:.12g}".format(float(v))


def _jnum(v):
    # round-trips through the 12-digit text form so JSON footers match the
    # CSV precision
    return float(_fmt(v))


def _parse_scalar(text: str, flag: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise _Usage(f"{flag}: expected a number, got {text!r}") from None
    if not np.isfinite(v):
        raise _Usage(f"{flag}: value must be finite")
    return v


def _parse_range(text: str, flag: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise _Usage(f"{flag}: expected lo:hi:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise _Usage(f"{flag}: expected lo:hi:count, got {text!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise _Usage(f"{flag}: range must be finite and ordered")
    if count < 2:
        raise _Usage(f"{flag}: count must be at least 2")
    return np.linspace(lo, hi, count)


def _header(command: str, params: dict) -> str:
    tokens = " ".join(f"{k}={params[k]}" for k in sorted(params))
    return f"# hviosc {__version__} {command} {tokens}"


def _footer(obj: dict) -> str:
    return "# " + json.dumps(obj)


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# worker functions must be import-reachable for the process pool

def _map_cell(args):
    sigma, f, eps = args
    return energy_map(sigma, f, eps)


def _sweep_row(args):
    sigma, xi_tilde, eps, horizon, sigma_star = args
    if xi_tilde > 0.5 and sigma > sigma_star:
        mechanism = "saddle"
        f_analytic = boundary_saddle(sigma, eps)
    elif xi_tilde == 0.5 and sigma > 0.0:
        mechanism = "saddle"
        f_analytic = boundary_saddle(sigma, eps)
    else:
        mechanism = "maximum"
        f_analytic = boundary_maximum(sigma, xi_tilde, eps)
    try:
        f_numeric = numeric_boundary(sigma, eps, xi_tilde,
                                     0.8 * f_analytic, 1.2 * f_analytic,
                                     horizon)
    except ValueError as exc:
        raise ArithmeticError(
            f"sweep bracket failed at sigma={_fmt(sigma)}: {exc}") from exc
    rel_err = abs(f_numeric - f_analytic) / f_analytic
    return f_numeric, f_analytic, mechanism, rel_err


def _cmd_aa(p):
    xis = p["xi"]
    head = {"xi": p["raw"]["xi"]}
    if p.get("side") is not None:
        head["side"] = p["raw"]["side"]
    lines = [_header("aa", head), "xi,phi,J,omega,a1,dJ_dxi,da1_dxi"]
    for xi in xis:
        q = aa_quantities(float(xi), kink_side=p.get("side"))
        lines.append(",".join(_fmt(v) for v in (
            q.xi, q.phi, q.J, q.omega, q.a1, q.dJ_dxi, q.da1_dxi)))
    return lines, None


def _cmd_portrait(p):
    forcing = ScaledForcing(f=p["f"], sigma=p["sigma"], eps=p["eps"])
    head = {"f": p["raw"]["f"], "sigma": p["raw"]["sigma"],
            "eps": p["raw"]["eps"], "nu": p["raw"]["nu"],
            "xi": p["raw"]["xi"]}
    lines = [_header("portrait", head), "nu,xi,C"]
    for nu in p["nu"]:
        for xi in p["xi"]:
            c = manifold_value(PhasePoint(float(nu), float(xi)), forcing)
            lines.append(f"{_fmt(nu)},{_fmt(xi)},{_fmt(c)}")
    contour = lpt_contour(forcing)
    extra = [_header("portrait", head), "nu,xi"]
    for pt in contour.points:
        extra.append(f"{_fmt(pt.nu)},{_fmt(pt.xi)}")
    return lines, extra


def _cmd_lpt(p):
    forcing = ScaledForcing(f=p["f"], sigma=p["sigma"], eps=p["eps"])
    contour = lpt_contour(forcing, nu_samples=p["nu_samples"],
                          xi_max=p["xi_max"])
    lines = [_header("lpt", {"f": p["raw"]["f"], "sigma": p["raw"]["sigma"],
                             "eps": p["raw"]["eps"]}), "nu,xi"]
    for pt in contour.points:
        lines.append(f"{_fmt(pt.nu)},{_fmt(pt.xi)}")
    lines.append(_footer({"max_xi": _jnum(contour.max_xi),
                          "passes_saddle": contour.passes_saddle}))
    return lines, None


def _cmd_stationary(p):
    forcing = ScaledForcing(f=p["f"], sigma=p["sigma"], eps=p["eps"])
    pts = stationary_points(forcing)
    lines = [_header("stationary",
                     {"f": p["raw"]["f"], "sigma": p["raw"]["sigma"],
                      "eps": p["raw"]["eps"]}), "nu0,xi0,kind"]
    for pt in pts:
        lines.append(f"{_fmt(pt.nu0)},{_fmt(pt.xi0)},{pt.kind}")
    return lines, None


def _cmd_boundary(p):
    sig = p["sigma"]
    tb = transition_boundary(p["xi_crit"], p["eps"],
                             sigma_range=(float(sig[0]), float(sig[-1])),
                             n_samples=len(sig))
    lines = [_header("boundary", {"xi-crit": p["raw"]["xi_crit"],
                                  "sigma": p["raw"]["sigma"],
                                  "eps": p["raw"]["eps"]}),
             "sigma,f_crit,mechanism"]
    for sigma, f_crit, mechanism in tb.samples:
        lines.append(f"{_fmt(sigma)},{_fmt(f_crit)},{mechanism}")
    star_s, star_f = tb.coexistence
    lines.append(_footer({"sigma_star": _jnum(star_s),
                          "f_star": _jnum(star_f)}))
    return lines, None


def _cmd_freqresp(p):
    sig = p["sigma"]
    pts = frequency_response(p["f"], p["eps"],
                             sigma_range=(float(sig[0]), float(sig[-1])),
                             n_samples=len(sig))
    lines = [_header("freqresp", {"f": p["raw"]["f"],
                                  "sigma": p["raw"]["sigma"],
                                  "eps": p["raw"]["eps"]}),
             "sigma,xi,branch,at_jump"]
    for pt in pts:
        flag = "true" if pt.at_jump else "false"
        lines.append(f"{_fmt(pt.sigma)},{_fmt(pt.xi)},{pt.branch},{flag}")
    return lines, None


def _cmd_energy_map(p):
    cells = [(float(s), float(f), p["eps"]) for s in p["sigma"]
             for f in p["f"]]
    vals = _pmap(_map_cell, cells, p["jobs"])
    lines = [_header("energy-map", {"sigma": p["raw"]["sigma"],
                                    "f": p["raw"]["f"],
                                    "eps": p["raw"]["eps"]}),
             "sigma,f,xi_max"]
    for (sigma, f, _), xi in zip(cells, vals):
        lines.append(f"{_fmt(sigma)},{_fmt(f)},{_fmt(xi)}")
    return lines, None


def _cmd_simulate(p):
    cfg = SimConfig(F=p["eps"] * p["f"], Omega=1.0 + p["eps"] * p["sigma"],
                    horizon=p["horizon"])
    traj = simulate(cfg)
    summary = energy_summary(traj, cfg.Omega, p.get("xi_crit"))
    head = {"f": p["raw"]["f"], "sigma": p["raw"]["sigma"],
            "eps": p["raw"]["eps"], "horizon": p["raw"]["horizon"]}
    if p.get("xi_crit") is not None:
        head["xi-crit"] = p["raw"]["xi_crit"]
    lines = [_header("simulate", head), "tau,q,p,E"]
    for k in range(len(traj.tau)):
        lines.append(",".join((_fmt(traj.tau[k]), _fmt(traj.q[k]),
                               _fmt(traj.p[k]), _fmt(traj.E[k]))))
    crossed = summary.crossed if p.get("xi_crit") is not None else None
    t_cross = (_jnum(summary.t_cross) if summary.t_cross is not None
               else None)
    lines.append(_footer({
        "max_E_inst": _jnum(summary.max_E_inst),
        "max_xi_windowed": _jnum(summary.max_xi_windowed),
        "impacts": [_jnum(t) for t in traj.impacts],
        "crossed": crossed,
        "t_cross": t_cross,
    }))
    return lines, None


def _cmd_sweep(p):
    star_s, _ = coexistence_point(p["xi_crit"], p["eps"]) \
        if p["xi_crit"] > 0.5 else (0.0, 0.0)
    rows = [(float(s), p["xi_crit"], p["eps"], p["horizon"], star_s)
            for s in p["sigma"]]
    results = _pmap(_sweep_row, rows, p["jobs"])
    lines = [_header("sweep", {"xi-crit": p["raw"]["xi_crit"],
                               "sigma": p["raw"]["sigma"],
                               "eps": p["raw"]["eps"],
                               "horizon": p["raw"]["horizon"]}),
             "sigma,f_numeric,f_analytic,mechanism,rel_err"]
    for (sigma, *_), (fn, fa, mech, err) in zip(rows, results):
        lines.append(f"{_fmt(sigma)},{_fmt(fn)},{_fmt(fa)},{mech},"
                     f"{_fmt(err)}")
    return lines, None


_COMMANDS = {
    "aa": _cmd_aa,
    "portrait": _cmd_portrait,
    "lpt": _cmd_lpt,
    "stationary": _cmd_stationary,
    "boundary": _cmd_boundary,
    "freqresp": _cmd_freqresp,
    "energy-map": _cmd_energy_map,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
}

# option name -> (kind, default-as-text); kind: scalar | range | either | int
_OPTIONS = {
    "aa": {"xi": ("either", None), "side": ("str", "")},
    "portrait": {"sigma": ("scalar", None), "f": ("scalar", None),
                 "eps": ("scalar", "0.1"),
                 "nu": ("range", "-3.14159265359:3.14159265359:121"),
                 "xi": ("range", "0.001:2:120")},
    "lpt": {"sigma": ("scalar", None), "f": ("scalar", None),
            "eps": ("scalar", "0.1"), "nu_samples": ("int", "256"),
            "xi_max": ("scalar", "4")},
    "stationary": {"sigma": ("scalar", None), "f": ("scalar", None),
                   "eps": ("scalar", "0.1")},
    "boundary": {"xi_crit": ("scalar", None), "sigma": ("range", None),
                 "eps": ("scalar", "0.1")},
    "freqresp": {"f": ("scalar", None), "sigma": ("range", "-3:3:121"),
                 "eps": ("scalar", "0.1")},
    "energy-map": {"sigma": ("range", None), "f": ("range", None),
                   "eps": ("scalar", "0.1"), "jobs": ("int", None)},
    "simulate": {"sigma": ("scalar", None), "f": ("scalar", None),
                 "eps": ("scalar", "0.1"), "horizon": ("scalar", "500"),
                 "xi_crit": ("scalar", "")},
    "sweep": {"xi_crit": ("scalar", None), "sigma": ("range", None),
              "eps": ("scalar", "0.1"), "horizon": ("scalar", "500"),
              "jobs": ("int", None)},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hviosc",
        description="Transition-boundary analysis and exact simulation of "
                    "the wall-bounded forced oscillator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in _OPTIONS.items():
        sp = sub.add_parser(name)
        for opt in opts:
            sp.add_argument("--" + opt.replace("_", "-"), dest=opt,
                            type=str, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--config", type=str, default=None)
    return parser


def _read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise _Usage(f"config line is not key = value: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(ns: argparse.Namespace) -> dict:
    """Merge flags, config file, and defaults into parsed parameters."""
    opts = _OPTIONS[ns.command]
    from_file = _read_config(ns.config) if ns.config else {}
    unknown = set(from_file) - set(opts) - {"out"}
    if unknown:
        raise _Usage("unknown config keys: " + ", ".join(sorted(unknown)))
    params = {"raw": {}}
    for opt, (kind, default) in opts.items():
        raw = getattr(ns, opt)
        if raw is None:
            raw = from_file.get(opt, default)
        if raw is None:
            raise _Usage(f"--{opt.replace('_', '-')} is required")
        if raw == "":
            params[opt] = None
            continue
        params["raw"][opt] = raw
        flag = "--" + opt.replace("_", "-")
        if kind == "scalar":
            params[opt] = _parse_scalar(raw, flag)
        elif kind == "range":
            params[opt] = _parse_range(raw, flag)
        elif kind == "int":
            try:
                params[opt] = int(raw)
            except ValueError:
                raise _Usage(f"{flag}: expected an integer") from None
        elif kind == "str":
            params[opt] = raw
        else:  # either
            if ":" in raw:
                params[opt] = _parse_range(raw, flag)
            else:
                params[opt] = [_parse_scalar(raw, flag)]
    if "jobs" in opts and params.get("jobs") is None:
        params["jobs"] = os.cpu_count() or 1
    params["out"] = ns.out if ns.out is not None else from_file.get("out")
    return params


def _sibling_path(path: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}.lpt{ext or '.csv'}"


def _preparse(argv):
    """Glue values starting with a minus sign onto their flag.

    argparse treats ``-2:2:9`` as an unknown option; rewriting
    ``--sigma -2:2:9`` to ``--sigma=-2:2:9`` keeps negative ranges usable.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if (tok.startswith("--") and "=" not in tok and len(nxt) > 1
                and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(tok + "=" + nxt)
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    ns = _build_parser().parse_args(_preparse(list(argv)))
    try:
        params = _resolve(ns)
        lines, extra = _COMMANDS[ns.command](params)
        _emit(lines, params["out"])
        if extra is not None:
            if params["out"] is None:
                sys.stdout.write("\n")
                _emit(extra, None)
            else:
                _emit(extra, _sibling_path(params["out"]))
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line harness: ``vdclab <command> [options]``.

Every output (CSV or JSON) starts with the schema version, a hash of the
resolved configuration and the frozen constants, so identical invocations
produce byte-identical files.  Exit codes: 0 ok, 1 a check failed, 2 bad
configuration, 3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import SCHEMA, analysis, verify
from .extremal import DEFAULT_EXACT_CEILING, DEFAULT_NODE_BUDGET, solve_exact, solve_greedy
from .growth import KINDS, DomainError, ThresholdError, in_theorem_range, make_function
from .lpgamma import gamma_lp
from .sequence import IntegerSet, generate
from .witness import DEFAULT_GRID_MULT, witness

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    kind: str = "pure"
    c: float | None = None
    params: dict = field(default_factory=dict)
    n_values: list = field(default_factory=list)
    grid_mult: int = DEFAULT_GRID_MULT
    m_policy: str = "default"
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    exact_ceiling: int = DEFAULT_EXACT_CEILING
    horizon: int = 10**6
    node_budget: int = DEFAULT_NODE_BUDGET
    explicit_set: list | None = None
    m_values: list = field(default_factory=lambda: [1])
    xi_count: int = 32
    smoke: bool = False
    cuts: bool = False
    constants: dict = field(default_factory=lambda: {
        "C": analysis.C_DECOMP, "C_main": analysis.C_MAIN, "C_vdc": analysis.C_VDC,
        "C_expsum": analysis.C_EXPSUM})

    def digest(self) -> str:
        d = asdict(self)
        d.pop("out")
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def function(self):
        if self.c is None:
            raise ConfigError("--c is required")
        try:
            return make_function(self.kind, self.c, **self.params)
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from exc

    def m_for(self, N: int) -> int:
        if self.m_policy == "default":
            return analysis.default_m(N, self.c)
        return int(self.m_policy)


# -- parsing ---------------------------------------------------------------

_POW = re.compile(r"^\s*2\^(\d+)\s*$")


def _int(tok: str) -> int:
    m = _POW.match(tok)
    if m:
        return 1 << int(m.group(1))
    try:
        v = float(tok)
    except ValueError:
        raise ConfigError(f"not an integer: {tok!r}") from None
    if v != int(v):
        raise ConfigError(f"not an integer: {tok!r}")
    return int(v)


def parse_n_range(text: str) -> list[int]:
    """'2^10..2^14' (powers of two), '5..9' (every integer), or '64,128,200'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            ma, mb = _POW.match(a), _POW.match(b)
            if ma and mb:
                out += [1 << e for e in range(int(ma.group(1)), int(mb.group(1)) + 1)]
            else:
                out += list(range(_int(a), _int(b) + 1))
        else:
            out.append(_int(part))
    if not out or min(out) < 1:
        raise ConfigError(f"--n-range must list positive integers, got {text!r}")
    return out


def parse_params(text: str | None) -> dict:
    """'A=1,B=0.5' or a JSON object."""
    if not text:
        return {}
    text = text.strip()
    if text.startswith("{"):
        try:
            return dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad --params JSON: {exc}") from None
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"bad --params entry {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def threads() -> int:
    raw = os.environ.get("VDCLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"VDCLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("VDCLAB_THREADS must be positive")
    return n


def pmap(fn, items):
    """Ordered map, threaded up to VDCLAB_THREADS."""
    n = threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- output ----------------------------------------------------------------

def _clean(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def render(cfg: ExperimentConfig, rows: list[dict], footer: list[dict] | None = None,
           extra: dict | None = None) -> str:
    meta = {"schema": SCHEMA, "command": cfg.command, "config_hash": cfg.digest(),
            "constants": cfg.constants}
    if cfg.fmt == "json":
        doc = {**meta, "rows": _clean(rows)}
        if footer:
            doc["footer"] = _clean(footer)
        if extra:
            doc.update(_clean(extra))
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    lines = [f"# schema: {SCHEMA}", f"# command: {cfg.command}",
             f"# config_hash: {meta['config_hash']}",
             f"# constants: {json.dumps(cfg.constants, sort_keys=True)}"]
    text = "\n".join(lines) + "\n"
    if rows:
        text += analysis.to_csv(rows)
    if footer:
        text += analysis.to_csv(footer)
    return text


def emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(cfg.out, "w") as fh:
        fh.write(text)


def _theorem_mode(cfg: ExperimentConfig):
    f = cfg.function()
    if not in_theorem_range(f.c):
        raise ConfigError(f"c = {f.c} is outside the theorem range (1, 1.2)")
    return f


def _set_for(cfg: ExperimentConfig, N: int):
    if cfg.explicit_set is not None:
        return IntegerSet.from_iterable([s for s in cfg.explicit_set if s <= N], N)
    return generate(cfg.function(), N)


def loglog_slope(N, y) -> float:
    return float(np.polyfit(np.log2(N), np.log2(y), 1)[0])


# -- commands --------------------------------------------------------------

def cmd_generate(cfg: ExperimentConfig) -> int:
    f = cfg.function()
    if f.c >= 1.2:
        sys.stderr.write(f"warning: c = {f.c} is outside the theorem range (1, 1.2)\n")
    N = max(cfg.n_values) if cfg.n_values else 10
    S = generate(f, N)
    if cfg.fmt == "json":
        emit(cfg, render(cfg, [{"N": N, "size": len(S)}], extra={"elements": S.tolist(),
                                                                "function": f.to_dict()}))
    else:
        head, _, body = S.dumps().partition("\n")
        header = json.loads(head)
        header.update(schema=SCHEMA, config_hash=cfg.digest())
        emit(cfg, json.dumps(header, sort_keys=True) + "\n" + body)
    return EXIT_OK


def cmd_witness_sweep(cfg: ExperimentConfig) -> int:
    f = _theorem_mode(cfg)
    results = pmap(lambda N: witness(f, N, cfg.grid_mult), cfg.n_values)
    rows, status = [], EXIT_OK
    for rep, poly, cert in results:
        row = rep.to_dict()
        row["large_margin"] = analysis.check_large(f, rep.N, rep.delta2)
        if poly is not None:
            row["certified_min_T"] = poly.certified_lower
            if poly.certified_lower < -1e-9 or abs(poly.at_zero() - 1) > 1e-12:
                sys.stderr.write(f"certification failed: {json.dumps(_clean(row))}\n")
                status = EXIT_CHECK
        rows.append(row)
    footer = []
    good = [r for r in rows if not r["degenerate"] and r["delta1"] > 0]
    c = f.c
    targets = {"delta1": -1 / (5 * c), "delta2": -(1 - 1 / c), "gamma_hat": -(6 / (5 * c) - 1)}
    if len(good) >= 4:
        Ns = [r["N"] for r in good]
        for key, target in targets.items():
            footer.append({"quantity": key, "slope": loglog_slope(Ns, [r[key] for r in good]),
                           "target": target,
                           "note": "nearly vacuous target" if abs(target) < 0.02 else ""})
    else:
        sys.stderr.write("fewer than 4 scales: slope fit skipped\n")
    emit(cfg, render(cfg, rows, footer))
    return status


def cmd_verify(cfg: ExperimentConfig) -> int:
    k = cfg.constants
    results = verify.run_all(smoke=cfg.smoke, seed=cfg.seed, C=k["C"], C_main=k["C_main"],
                             C_vdc=k["C_vdc"], horizon=cfg.horizon)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    rows = [{"suite": r.name, "passed": r.passed, "checks": r.checks,
             "failures": r.failures, "detail": r.detail} for r in results]
    emit(cfg, render(cfg, rows))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_extremal(cfg: ExperimentConfig) -> int:
    rows, status = [], EXIT_OK
    f = None if cfg.explicit_set is not None else cfg.function()
    for N in cfg.n_values:
        S = _set_for(cfg, N)
        greedy = solve_greedy(S, N)
        row = {"N": N, "greedy_size": greedy.best_size}
        if N <= cfg.exact_ceiling:
            ex = solve_exact(S, N, cfg.node_budget, cfg.exact_ceiling)
            row.update(ex.to_dict())
            if ex.status == "exact" and len(S):
                try:
                    if f is not None and in_theorem_range(f.c):
                        rep, T, _ = witness(f, N, cfg.grid_mult)
                        if T is not None:
                            row["gamma_hat"] = rep.gamma_hat
                            row["bridge_witness_margin"] = analysis.check_delta_leq_2gamma(ex, T)
                    lp = gamma_lp(S, N, cuts=cfg.cuts)
                    row["lp_a0"], row["lp_cert_slack"] = lp.a0_opt, lp.cert_slack
                    row["bridge_lp_margin"] = analysis.check_delta_leq_2gamma(
                        ex, lp.poly, lp.cert_slack)
                except analysis.BridgeViolation as exc:
                    sys.stderr.write(f"bridge violated: {exc}\n")
                    row["bridge_violation"] = str(exc)
                    status = EXIT_CHECK
        else:
            row.update({"set_id": greedy.set_id, "best_size": greedy.best_size,
                        "witness_set": list(greedy.witness_set), "status": "lower-bound"})
        rows.append(row)
    emit(cfg, render(cfg, rows))
    return status


def cmd_lp_gamma(cfg: ExperimentConfig) -> int:
    f = None if cfg.explicit_set is not None else cfg.function()
    rows = []
    for N in cfg.n_values:
        S = _set_for(cfg, N)
        sol = gamma_lp(S, N, cuts=cfg.cuts)
        row = {"N": N, "support_size": len(S), "a0_opt": sol.a0_opt,
               "cert_slack": sol.cert_slack, "iterations": sol.iterations,
               "cut_rounds": max(0, len(sol.history) - 1)}
        if f is not None and in_theorem_range(f.c):
            rep, _, _ = witness(f, N, cfg.grid_mult)
            row["gamma_hat"] = rep.gamma_hat
        rows.append(row)
    emit(cfg, render(cfg, rows))
    return EXIT_OK


def cmd_decompose(cfg: ExperimentConfig) -> int:
    f = _theorem_mode(cfg)
    rng = np.random.default_rng(cfg.seed)
    rows, status = [], EXIT_OK
    for N in cfg.n_values:
        M = cfg.m_for(N)
        xis = rng.random(cfg.xi_count)
        for r in analysis.Decomposer(f, N, M, cfg.constants["C"])(xis):
            row = r.to_dict()
            row["ok"] = r.ok
            status = status if r.ok else EXIT_CHECK
            rows.append(row)
    emit(cfg, render(cfg, rows))
    return status


def cmd_expsum_check(cfg: ExperimentConfig) -> int:
    f = cfg.function()
    rows, status = [], EXIT_OK
    for N in cfg.n_values:
        for m in cfg.m_values:
            r = analysis.check_expsum(f, m, 1, N, cfg.constants["C_expsum"])
            rows.append({"N": N, "m": m, "re": r.direct.real, "im": r.direct.imag,
                         "abs": abs(r.direct), "dyadic_gap": abs(r.direct - r.dyadic),
                         "bound": r.bound, "agree": r.agree, "within_bound": r.within_bound})
            if not (r.agree and r.within_bound):
                status = EXIT_CHECK
    emit(cfg, render(cfg, rows))
    return status


COMMANDS = {
    "generate": cmd_generate,
    "witness-sweep": cmd_witness_sweep,
    "verify": cmd_verify,
    "extremal": cmd_extremal,
    "lp-gamma": cmd_lp_gamma,
    "decompose": cmd_decompose,
    "expsum-check": cmd_expsum_check,
}

DEFAULT_N = {
    "generate": "10",
    "witness-sweep": "2^10..2^16",
    "verify": "1",
    "extremal": "40",
    "lp-gamma": "64",
    "decompose": "2^10,2^12,2^14",
    "expsum-check": "2^16",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment")
    g.add_argument("--function", default="pure", choices=KINDS, help="growth family")
    g.add_argument("--c", type=float, help="growth exponent")
    g.add_argument("--params", help="family parameters, 'A=1,B=0.5' or JSON")
    g.add_argument("--n-range", help="scales: '2^10..2^16', '5..9' or '64,128'")
    g.add_argument("--grid-mult", type=int, default=DEFAULT_GRID_MULT)
    g.add_argument("--m-policy", default="default",
                   help="'default' for round(N^(1/(5c))) or a fixed integer M")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (default stdout)")
    g.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    g.add_argument("--exact-ceiling", type=int, default=DEFAULT_EXACT_CEILING)
    g.add_argument("--horizon", type=float, default=1e6)
    g.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    g.add_argument("--set", help="explicit S as a comma list instead of a growth function")
    g.add_argument("--m", dest="m_values", default="1", help="frequencies for expsum-check")
    g.add_argument("--xi-count", type=int, default=32)
    g.add_argument("--smoke", action="store_true", help="reduced sweeps for verify")
    g.add_argument("--cuts", action="store_true", help="run the cutting-plane loop")
    k = common.add_argument_group("frozen constants")
    k.add_argument("--C", dest="C", type=float, default=analysis.C_DECOMP)
    k.add_argument("--C-main", type=float, default=analysis.C_MAIN)
    k.add_argument("--C-vdc", type=float, default=analysis.C_VDC)
    k.add_argument("--C-expsum", type=float, default=analysis.C_EXPSUM)

    p = argparse.ArgumentParser(prog="vdclab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMANDS[name].__name__[4:].replace("_", "-"))
    return p


def config_from_args(ns) -> ExperimentConfig:
    fmt = ns.fmt or ("json" if ns.command == "extremal" else "csv")
    if ns.grid_mult < 8:
        raise ConfigError("--grid-mult must be at least 8")
    if ns.m_policy != "default":
        try:
            if int(ns.m_policy) < 1:
                raise ValueError
        except ValueError:
            raise ConfigError("--m-policy must be 'default' or a positive integer") from None
    explicit = None
    if ns.set is not None:
        explicit = sorted({_int(t) for t in ns.set.split(",") if t.strip()})
    try:
        m_values = [int(t) for t in ns.m_values.split(",")]
    except ValueError:
        raise ConfigError("--m must be a comma list of integers") from None
    if any(m == 0 for m in m_values):
        raise ConfigError("--m values must be non-zero")
    n_values = parse_n_range(ns.n_range or DEFAULT_N[ns.command])
    return ExperimentConfig(
        command=ns.command, kind=ns.function, c=ns.c, params=parse_params(ns.params),
        n_values=n_values, grid_mult=ns.grid_mult, m_policy=ns.m_policy, seed=ns.seed,
        out=ns.out, fmt=fmt, exact_ceiling=ns.exact_ceiling, horizon=int(ns.horizon),
        node_budget=ns.node_budget, explicit_set=explicit, m_values=m_values,
        xi_count=ns.xi_count, smoke=ns.smoke, cuts=ns.cuts,
        constants={"C": ns.C, "C_main": ns.C_main, "C_vdc": ns.C_vdc,
                   "C_expsum": ns.C_expsum})


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, DomainError, ThresholdError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

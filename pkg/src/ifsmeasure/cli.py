"""Scenario runner: JSON descriptions in, deterministic reports out.

A scenario file declares one job (an iterated-map system, a separable-kernel
invariance problem, or a decaying constant-target transfer) plus a list of
commands.  Reports are reproducible byte for byte: fixed command order,
fixed formatting (15 significant digits), no randomness.

Exit codes: 0 success, 2 scenario parse/validation error, 3 solver
precondition violated, 4 tolerance not reached within budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import IterationLimit, NotContractive, RefinementLimit
from .kernelops import (PolynomialFunction, SeparableKernel, kernel_sup_bound,
                        partition_variation_estimate, solve_invariance)
from .markov import (IFSystem, apply_markov, eval_fixed_point, factors,
                     iterate_fixed_point, residual)
from .measure import VectorMeasure
from .mk_norm import mk_lower_bound, mk_star_exact
from .semigroup import exp_decay_fixed_point, transfer_residual
from .space import QuerySet

__all__ = ["main", "run", "export_cumulative"]


def _fmt(x) -> str:
    return f"{float(x):.15g}"


def _fmt_vector(v) -> str:
    if np.iscomplexobj(v):
        return "[" + ", ".join(f"{c.real:.15g}{c.imag:+.15g}j" for c in v) + "]"
    return "[" + ", ".join(_fmt(c) for c in v) + "]"


def _num(x):
    return float(f"{float(x):.15g}")


def _vec(v):
    if np.iscomplexobj(v):
        return [[_num(c.real), _num(c.imag)] for c in v]
    return [_num(c) for c in v]


class ScenarioError(ValueError):
    """Scenario file malformed or inconsistent."""


def export_cumulative(mu: VectorMeasure, samples: int, path) -> int:
    """Write the cumulative function to CSV; returns the row count.

    Rows cover equispaced sample points plus every breakpoint; atoms also
    get the float immediately to their left, so jumps are visible as two
    adjacent rows.  Values re-evaluate through ``cumulative`` exactly.
    """
    if samples < 2:
        raise ScenarioError("samples must be at least 2")
    ts = [np.linspace(0.0, 1.0, samples), mu.breakpoints()]
    if mu.n_atoms:
        left = np.nextafter(mu.atom_points, -np.inf)
        ts.append(left[left >= 0.0])
    grid = np.unique(np.concatenate(ts))
    values = mu.cumulative_all(grid)
    cols = []
    if mu.field == "complex":
        for k in range(mu.dim):
            cols.append(f"F{k + 1}_re")
            cols.append(f"F{k + 1}_im")
    else:
        cols = [f"F{k + 1}" for k in range(mu.dim)]
    lines = ["t," + ",".join(cols)]
    for t, row in zip(grid, values):
        if mu.field == "complex":
            vals = []
            for c in row:
                vals.append(f"{c.real:.17g}")
                vals.append(f"{c.imag:.17g}")
        else:
            vals = [f"{c:.17g}" for c in row]
        lines.append(f"{t:.17g}," + ",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n")
    return len(grid)


def _parse_measure(doc, field) -> VectorMeasure:
    if not isinstance(doc, dict):
        raise ScenarioError("measure must be an object")
    try:
        d = dict(doc)
        d.setdefault("field", field)
        return VectorMeasure.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad measure: {exc}") from exc


def _parse_query_set(doc) -> QuerySet:
    try:
        return QuerySet.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad query set: {exc}") from exc


class _IFSJob:
    def __init__(self, doc):
        field = doc.get("field", "real")
        dim = doc.get("dimension")
        if dim is None:
            raise ScenarioError("ifs scenario needs a dimension")
        try:
            maps = [tuple(m) for m in doc["maps"]]
            ops = [np.array(self._op(o, field)) for o in doc["operators"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad maps/operators: {exc}") from exc
        base = doc.get("base")
        base_m = _parse_measure(base, field) if base is not None else None
        try:
            self.system = IFSystem(maps, ops, base=base_m, dim=dim, field=field)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        self.query_sets = {name: _parse_query_set(q)
                           for name, q in doc.get("query_sets", {}).items()}
        solver = doc.get("solver", {})
        self.tol = float(solver.get("tol", 1e-8))
        self.max_iter = int(solver.get("max_iter", 200))
        self.norm = solver.get("norm", "variation")
        self.samples = int(solver.get("samples", 201))
        self.grid = int(solver.get("grid", 200))
        self.iters = int(solver.get("iters", 3000))
        start = solver.get("start")
        self.start = (_parse_measure(start, field) if start is not None
                      else VectorMeasure.zero(dim, field))
        self._solution = None

    @staticmethod
    def _op(o, field):
        a = np.array(o, dtype=float if field == "real" else complex)
        return a

    def solution(self):
        if self._solution is None:
            self._solution = iterate_fixed_point(
                self.system, self.start, tol=self.tol, max_iter=self.max_iter,
                norm=self.norm)
        return self._solution

    def command(self, cmd, args, out_dir, name):
        if cmd == "factors":
            fac = factors(self.system)
            return {"variation": _num(fac.variation), "mk": _num(fac.mk),
                    "mk_star": _num(fac.mk_star)}
        if cmd == "solve":
            res = self.solution()
            return {"iterations": res.iterations,
                    "error_bound": _num(res.error_bound),
                    "norm": res.norm,
                    "total": _vec(res.measure.total()),
                    "atoms": res.measure.n_atoms,
                    "pieces": res.measure.n_pieces}
        if cmd == "eval":
            if len(args) != 1 or args[0] not in self.query_sets:
                raise ScenarioError(f"eval needs a declared query set, got {args}")
            v = eval_fixed_point(self.system, self.query_sets[args[0]],
                                 tol=self.tol)
            return {"set": args[0], "value": _vec(v),
                    "error_bound": _num(self.tol)}
        if cmd == "norm":
            if len(args) != 1 or args[0] not in ("variation", "mk", "mk_star"):
                raise ScenarioError(f"norm needs variation|mk|mk_star, got {args}")
            mu = self.solution().measure
            if args[0] == "variation":
                return {"norm": "variation", "value": _num(mu.variation_norm())}
            if args[0] == "mk":
                val, _ = mk_lower_bound(mu, ball="bl1", grid=self.grid,
                                        iters=self.iters)
                return {"norm": "mk", "value": _num(val), "tag": "estimate"}
            return {"norm": "mk_star", "value": _num(mk_star_exact(mu))}
        if cmd == "verify":
            mu = self.solution().measure
            fac = factors(self.system)
            out = {}
            if fac.variation < 1.0:
                out["residual_variation"] = _num(residual(self.system, mu))
                worst = 0.0
                for qname, q in sorted(self.query_sets.items()):
                    v1 = mu.evaluate(q)
                    v2 = eval_fixed_point(self.system, q, tol=self.tol)
                    worst = max(worst, float(np.abs(v1 - v2).max()))
                if self.query_sets:
                    out["solver_vs_eval"] = _num(worst)
            else:
                diff = apply_markov(self.system, mu) - mu
                out["residual_mk_star"] = _num(mk_star_exact(diff))
            return out
        if cmd == "export":
            mu = self.solution().measure
            path = Path(out_dir) / f"{name}_cumulative.csv"
            rows = export_cumulative(mu, self.samples, path)
            return {"path": str(path), "rows": rows, "samples": self.samples}
        raise ScenarioError(f"unknown ifs command {cmd!r}")


class _KernelJob:
    def __init__(self, doc):
        try:
            kernels = []
            for kd in doc["kernels"]:
                terms = tuple((tuple(u), tuple(v)) for u, v in kd["terms"])
                kernels.append(SeparableKernel(terms=terms,
                                               scale=kd.get("scale", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad kernels: {exc}") from exc
        if len(kernels) != 2:
            raise ScenarioError("kernel scenario needs exactly two kernels")
        self.kernels = kernels
        self._phi = None

    def phi(self):
        if self._phi is None:
            self._phi = solve_invariance(self.kernels[0], self.kernels[1])
        return self._phi

    def command(self, cmd, args, out_dir, name):
        if cmd == "supbound":
            grid = int(args[0]) if args else 64
            return {"grid": grid,
                    "values": [_num(kernel_sup_bound(k, grid))
                               for k in self.kernels]}
        if cmd == "solve":
            phi = self.phi()
            return {"coefficients": [str(c) for c in phi.coeffs],
                    "coefficients_float": [_num(c) for c in phi.coeffs]}
        if cmd == "verify":
            phi = self.phi()
            # exact back-substitution: residual polynomial of the invariance
            g = PolynomialFunction((0, 0.5))
            acc = g
            for kern in self.kernels:
                for u, v in kern.terms:
                    acc = acc + u.scale(kern.scale * v.times(phi).integral01())
            res_poly = acc + phi.scale(-1)
            exact_zero = all(c == 0 for c in res_poly.coeffs)
            xs = np.linspace(0.0, 1.0, 1000)
            grid_res = max(abs(float(res_poly(float(x)))) for x in xs)
            return {"exact_residual_zero": exact_zero,
                    "grid_residual": _num(grid_res)}
        if cmd == "partition":
            n = int(args[0]) if args else 4096
            return {"n": n, "value": _num(partition_variation_estimate(n))}
        raise ScenarioError(f"unknown kernel command {cmd!r}")


class _SemigroupJob:
    def __init__(self, doc):
        field = doc.get("field", "real")
        try:
            self.rate = float(doc["rate"])
            self.target = float(doc["target"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad semigroup scenario: {exc}") from exc
        base = doc.get("base")
        if base is None:
            raise ScenarioError("semigroup scenario needs a base measure")
        self.base = _parse_measure(base, field)
        self.tol = float(doc.get("solver", {}).get("tol", 1e-12))
        self._solution = None

    def solution(self):
        if self._solution is None:
            try:
                self._solution = exp_decay_fixed_point(
                    self.rate, self.target, self.base, tol=self.tol)
            except ValueError as exc:
                raise NotContractive(str(exc)) from exc
        return self._solution

    def command(self, cmd, args, out_dir, name):
        if cmd == "solve":
            mu = self.solution()
            return {"total": _vec(mu.total()),
                    "atoms": mu.n_atoms, "pieces": mu.n_pieces,
                    "target_weight": _vec(
                        mu.evaluate(QuerySet.point(self.target)))}
        if cmd == "verify":
            mu = self.solution()
            res = transfer_residual(self.rate, self.target, self.base, mu,
                                    tol=self.tol)
            return {"residual": _num(res), "error_bound": _num(self.tol)}
        raise ScenarioError(f"unknown semigroup command {cmd!r}")


_JOBS = {"ifs": _IFSJob, "kernel": _KernelJob, "semigroup": _SemigroupJob}


def _load_scenario(spec: str) -> tuple[dict, str]:
    """Resolve a path or the name of a bundled scenario."""
    p = Path(spec)
    if p.exists():
        return json.loads(p.read_text()), p.stem
    if "/" not in spec and not spec.endswith(".json"):
        ref = resources.files("ifsmeasure").joinpath(f"scenarios/{spec}.json")
        if ref.is_file():
            return json.loads(ref.read_text()), spec
    raise FileNotFoundError(f"scenario {spec!r} not found")


def run(spec: str, out_dir: str = ".", tol: float | None = None,
        fmt: str = "text") -> tuple[int, str]:
    """Execute a scenario; returns (exit_code, report)."""
    try:
        doc, name = _load_scenario(spec)
        kind = doc.get("kind")
        if kind not in _JOBS:
            raise ScenarioError(f"unknown scenario kind {kind!r}")
        if tol is not None:
            doc = dict(doc)
            solver = dict(doc.get("solver", {}))
            solver["tol"] = tol
            doc["solver"] = solver
        commands = doc.get("commands", [])
        if not isinstance(commands, list):
            raise ScenarioError("commands must be a list")
        job = _JOBS[kind](doc)
    except FileNotFoundError as exc:
        return 2, f"error: {exc}"
    except (ScenarioError, json.JSONDecodeError) as exc:
        return 2, f"error: invalid scenario: {exc}"
    name = doc.get("name", name)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    results = []
    try:
        for line in commands:
            parts = str(line).split()
            if not parts:
                raise ScenarioError("empty command")
            cmd, args = parts[0], parts[1:]
            try:
                results.append((line, job.command(cmd, args, out_dir, name)))
            except ScenarioError:
                raise
            except NotContractive as exc:
                return 3, _render(name, results, fmt,
                                  error=f"precondition: {exc}")
            except (IterationLimit, RefinementLimit) as exc:
                return 4, _render(name, results, fmt,
                                  error=f"tolerance not reached: {exc}")
            except ValueError as exc:
                return 3, _render(name, results, fmt,
                                  error=f"precondition: {exc}")
    except ScenarioError as exc:
        return 2, f"error: invalid scenario: {exc}"
    return 0, _render(name, results, fmt)


def _render(name, results, fmt, error=None) -> str:
    if fmt == "json":
        doc = {"scenario": name,
               "results": [{"command": c, **r} for c, r in results]}
        if error:
            doc["error"] = error
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = [f"scenario: {name}"]
    for cmdline, r in results:
        parts = []
        for key, val in r.items():
            if isinstance(val, list):
                if val and isinstance(val[0], list):
                    txt = "[" + ", ".join(
                        "[" + ", ".join(_fmt(x) for x in row) + "]"
                        for row in val) + "]"
                elif val and isinstance(val[0], str):
                    txt = "[" + ", ".join(val) + "]"
                else:
                    txt = "[" + ", ".join(_fmt(x) for x in val) + "]"
            elif isinstance(val, bool):
                txt = "true" if val else "false"
            elif isinstance(val, float):
                txt = _fmt(val)
            else:
                txt = str(val)
            parts.append(f"{key}={txt}")
        lines.append(f"{cmdline}: " + " ".join(parts))
    if error:
        lines.append(error)
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ifsmeasure",
        description="Invariant vector measures of iterated function systems")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a scenario file")
    runp.add_argument("scenario",
                      help="path to a scenario JSON, or a bundled scenario name")
    runp.add_argument("--out", default=".", help="output directory for exports")
    runp.add_argument("--tol", type=float, default=None,
                      help="override the solver tolerance")
    runp.add_argument("--format", choices=("text", "json"), default="text")
    ns = parser.parse_args(argv)
    code, report = run(ns.scenario, out_dir=ns.out, tol=ns.tol, fmt=ns.format)
    stream = sys.stdout if code == 0 else sys.stderr
    print(report, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())

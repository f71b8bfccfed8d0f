"""Command-line front end.

Subcommands: ``measure`` (one measure on a state file), ``sweep`` (measures
along a line of states), ``sample`` (pure-state gauge statistics),
``check`` (invariant suite on random mixed states) and ``stabilizers``
(dump the stabilizer states).

Exit codes: 0 success, 1 failed check, 2 unsupported request, 3 parse
error, 4 write failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import gauges, linalg, measures
from .measures import MeasureResult, SolverConfig
from .theories import (
    CoherenceK,
    CustomPolytope,
    GenuineMultipartite,
    MagicQubits,
    SchmidtK,
    UnsupportedError,
    build_polytope,
    free_membership,
    parse_theory,
    stabilizer_enumerate,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_UNSUPPORTED = 2
EXIT_PARSE = 3
EXIT_WRITE = 4

SIG_DIGITS = 12


class ParseError(ValueError):
    pass


# -- number formatting ---------------------------------------------------

def fmt(x: float) -> str:
    """12 significant digits, '.' decimal, no locale; ``inf``/``nan`` spelled out."""
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.{SIG_DIGITS}g}"


def _json_number(x):
    x = float(x)
    return fmt(x) if not np.isfinite(x) else float(fmt(x))


# -- state files ---------------------------------------------------------

@dataclass
class StateFile:
    kind: str
    dims: list[int]
    data: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return measures.as_density(self.data)

    def to_json(self) -> dict:
        flat = self.data.reshape(-1)
        return {
            "kind": self.kind,
            "dims": list(self.dims),
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        }


def parse_state(obj: dict) -> StateFile:
    try:
        kind = obj["kind"]
        dims = [int(d) for d in obj["dims"]]
        re = np.asarray(obj["re"], dtype=float).reshape(-1)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float).reshape(-1)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state file: {exc}") from None
    if re.shape != im.shape:
        raise ParseError("'re' and 'im' differ in length")
    d = int(np.prod(dims))
    z = re + 1j * im
    try:
        if kind == "pure":
            if z.size != d:
                raise ParseError(f"pure state needs {d} amplitudes, got {z.size}")
            linalg.check_state_vector(z)
            return StateFile(kind, dims, z)
        if kind == "mixed":
            if z.size != d * d:
                raise ParseError(f"mixed state needs {d * d} entries, got {z.size}")
            m = z.reshape(d, d)
            linalg.check_density(m)
            return StateFile(kind, dims, m)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown state kind {kind!r}")


def load_state(path: str) -> StateFile:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None
    return parse_state(obj)


def write_stabilizers(vectors: np.ndarray) -> str:
    out = io.StringIO()
    out.write(f"{vectors.shape[0]}\n")
    for v in vectors:
        out.write(" ".join(f"{x.real:.17g} {x.imag:.17g}" for x in v) + "\n")
    return out.getvalue()


def read_vectors(path: str) -> np.ndarray:
    """Read a vector list written by the ``stabilizers`` subcommand."""
    try:
        with open(path) as fh:
            lines = [ln.split() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        count = int(lines[0][0])
        rows = [np.asarray(ln, dtype=float) for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed vector file {path}: {exc}") from None
    if len(rows) != count or any(r.size % 2 or r.size != rows[0].size for r in rows):
        raise ParseError(f"vector file {path} does not match its count line")
    arr = np.array(rows)
    return arr[:, 0::2] + 1j * arr[:, 1::2]


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


# -- config --------------------------------------------------------------

def _config(args, **overrides) -> SolverConfig:
    cfg = SolverConfig()
    for name in ("tol", "max_iter", "max_rounds", "restarts", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


def _theory(text: str):
    try:
        return parse_theory(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# -- measure -------------------------------------------------------------

def _scalar_stats(stats: dict) -> dict:
    out = {}
    for k, v in stats.items():
        if isinstance(v, (bool, int, str)):
            out[k] = v
        elif isinstance(v, float):
            out[k] = _json_number(v)
    return out


def result_record(name: str, theory, res: MeasureResult) -> dict:
    return {
        "measure": name,
        "theory": str(theory),
        "value": _json_number(res.value),
        "status": res.status,
        "lower": _json_number(res.lower),
        "upper": _json_number(res.upper),
        "gap": _json_number(res.gap),
        "bound": res.bound,
        "stats": _scalar_stats(res.stats),
    }


def cmd_measure(args) -> int:
    theory = _theory(args.theory)
    state = load_state(args.state)
    if args.dictionary:
        theory = CustomPolytope(read_vectors(args.dictionary), label="dictionary")
    if args.measure not in measures.MEASURES:
        raise ParseError(f"unknown measure {args.measure!r}; choose from {', '.join(measures.MEASURES)}")
    if int(np.prod(state.dims)) != theory.dim:
        raise ParseError(f"state dimension {int(np.prod(state.dims))} does not match {theory}")
    fn = measures.MEASURES[args.measure]
    res = fn(state.data, theory, _config(args))
    rec = result_record(args.measure, theory, res)
    if res.witness is not None and args.witness != "none":
        w = {"re": res.witness.real.tolist(), "im": res.witness.imag.tolist()}
        if args.witness == "print":
            rec["witness"] = w
        else:
            _write(args.witness_file, json.dumps(w) + "\n")
            rec["witness_file"] = args.witness_file
    if args.format == "json":
        text = json.dumps(rec, indent=2) + "\n"
    else:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["measure", "theory", "value", "status", "lower", "upper", "gap", "bound"])
        out.writerow([rec["measure"], rec["theory"], fmt(res.value), res.status,
                      fmt(res.lower), fmt(res.upper), fmt(res.gap), res.bound])
        if "witness" in rec:
            # witness entries follow the record as a second table
            out.writerow([])
            out.writerow(["row", "col", "re", "im"])
            for (i, j), z in np.ndenumerate(res.witness):
                out.writerow([i, j, fmt(z.real), fmt(z.imag)])
        elif "witness_file" in rec:
            out.writerow([])
            out.writerow(["witness_file", rec["witness_file"]])
        text = buf.getvalue()
    _write(args.output, text)
    if res.status not in (measures.CERTIFIED, measures.INFINITE, measures.HEURISTIC):
        print(f"warning: {args.measure} not certified; bracket [{fmt(res.lower)}, {fmt(res.upper)}]", file=sys.stderr)
    return EXIT_OK


# -- sweep ---------------------------------------------------------------

DEFAULT_SWEEP_MEASURES = (
    "standard_robustness",
    "generalized_robustness",
    "random_robustness",
    "best_free_approximation",
    "modified_trace_distance",
    "geometric_measure",
)


def t_state(n: int = 1) -> np.ndarray:
    """``|T>^{(x)n}`` with ``|T> = cos(t/2)|0> + e^{i pi/4} sin(t/2)|1>``, ``cos t = 1/sqrt(3)``."""
    theta = np.arccos(1.0 / np.sqrt(3.0))
    t = np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])
    out = np.ones(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, t)
    return out


@dataclass
class SweepSpec:
    """States ``(1 - alpha) rho0 + alpha rho1`` on a grid of ``alpha`` in [0, 1]."""

    rho0: np.ndarray
    rho1: np.ndarray
    alphas: np.ndarray
    measure_names: tuple[str, ...] = DEFAULT_SWEEP_MEASURES

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float)
        if a.size == 0 or np.any(np.diff(a) <= 0) or a[0] < 0 or a[-1] > 1:
            raise ValueError("alpha grid must be strictly increasing inside [0, 1]")
        self.alphas = a

    @classmethod
    def magic_t_mix(cls, n: int, points: int, names=DEFAULT_SWEEP_MEASURES) -> "SweepSpec":
        d = 2**n
        psi = t_state(n)
        return cls(np.eye(d) / d, np.outer(psi, psi.conj()), np.linspace(0.0, 1.0, points), tuple(names))


def run_sweep(spec: SweepSpec, theory, config: SolverConfig) -> list[list[float]]:
    rows = []
    for a in spec.alphas:
        rho = (1.0 - a) * spec.rho0 + a * spec.rho1
        row = [float(a)]
        for name in spec.measure_names:
            row.append(measures.MEASURES[name](rho, theory, config).value)
        rows.append(row)
    return rows


def sweep_csv(spec: SweepSpec, rows) -> str:
    out = io.StringIO()
    out.write(",".join(("alpha",) + tuple(spec.measure_names)) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def _measure_list(text: str | None, default) -> tuple[str, ...]:
    if not text:
        return tuple(default)
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    for nm in names:
        if nm not in measures.MEASURES:
            raise ParseError(f"unknown measure {nm!r}")
    return names


def cmd_sweep(args) -> int:
    names = _measure_list(args.measures, DEFAULT_SWEEP_MEASURES)
    if args.family == "magic_T_mix":
        theory = MagicQubits(args.n)
        spec = SweepSpec.magic_t_mix(args.n, args.points, names)
    else:
        if not (args.start and args.end and args.theory):
            raise ParseError("custom_line needs --start, --end and --theory")
        theory = _theory(args.theory)
        s0, s1 = load_state(args.start), load_state(args.end)
        try:
            spec = SweepSpec(s0.density, s1.density, np.linspace(0.0, 1.0, args.points), names)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    rows = run_sweep(spec, theory, _config(args))
    _write(args.output, sweep_csv(spec, rows))
    return EXIT_OK


# -- sample --------------------------------------------------------------

def _normalisation(theory) -> float:
    """Factor ``k / (d - k)`` mapping ``Gamma**2 - 1`` for Schmidt/coherence theories onto [0, 1]."""
    if isinstance(theory, SchmidtK):
        d, k = min(theory.dA, theory.dB), theory.k
    elif isinstance(theory, CoherenceK):
        d, k = theory.d, theory.k
    else:
        return 1.0
    return k / (d - k) if d > k else 1.0


def random_free_pure(theory, rng: np.random.Generator) -> np.ndarray:
    """A random free pure state: k-sparse, Schmidt rank <= k, biseparable, or a stabilizer state."""
    def gauss(n):
        return rng.normal(size=n) + 1j * rng.normal(size=n)

    if isinstance(theory, CoherenceK):
        v = np.zeros(theory.d, dtype=complex)
        idx = rng.choice(theory.d, size=theory.k, replace=False)
        v[idx] = gauss(theory.k)
    elif isinstance(theory, SchmidtK):
        v = sum(np.kron(gauss(theory.dA), gauss(theory.dB)) for _ in range(theory.k))
    elif isinstance(theory, GenuineMultipartite):
        cut = int(rng.integers(1, len(theory.dims)))
        dl = int(np.prod(theory.dims[:cut]))
        v = np.kron(gauss(dl), gauss(theory.dim // dl))
    else:
        verts = build_polytope(theory).vectors
        v = verts[int(rng.integers(verts.shape[0]))] * np.exp(2j * np.pi * rng.random())
    return v / np.linalg.norm(v)


def sample_rows(theory, count: int, seed: int, family: str = "haar", config: SolverConfig | None = None):
    config = config or SolverConfig()
    norm = _normalisation(theory)
    rows = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        if family == "haar":
            z = rng.normal(size=theory.dim) + 1j * rng.normal(size=theory.dim)
            psi = z / np.linalg.norm(z)
        else:
            psi = random_free_pure(theory, rng)
        gv = measures.vector_gauge(psi, theory, config).value
        polar = gauges.pure_polar(psi, theory)
        rows.append([i, max(gv**2 - 1.0, 0.0) * norm, polar, max(0.0, 1.0 - polar)])
    return rows


def cmd_sample(args) -> int:
    theory = _theory(args.theory)
    rows = sample_rows(theory, args.count, args.seed, args.family, _config(args))
    out = io.StringIO()
    out.write("index,normalized_gauge_sq_minus_one,polar_gauge_sq,geometric\n")
    for r in rows:
        out.write(f"{r[0]}," + ",".join(fmt(v) for v in r[1:]) + "\n")
    _write(args.output, out.getvalue())
    return EXIT_OK


# -- check ---------------------------------------------------------------

@dataclass
class PropertyReport:
    name: str
    worst: float = 0.0  # largest violation seen (<= 0 means satisfied everywhere)
    tested: int = 0
    failures: list[int] = field(default_factory=list)

    def record(self, index: int, violation: float, tol: float) -> None:
        self.tested += 1
        self.worst = max(self.worst, violation) if self.tested > 1 else violation
        if not violation <= tol:
            self.failures.append(index)

    @property
    def passed(self) -> bool:
        return not self.failures


def random_check_states(theory, count: int, seed: int) -> list[np.ndarray]:
    """Seeded mixed states; every third one is a random mixture of free vertices."""
    d = theory.dim
    poly = build_polytope(theory)
    states = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        if i % 3 == 0:
            w = rng.dirichlet(np.ones(poly.size))
            rho = np.tensordot(w, poly.projectors, axes=1)
        else:
            rank = int(rng.integers(2, d + 1))
            g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
            rho = g @ g.conj().T
            rho /= np.trace(rho).real
        states.append(0.5 * (rho + rho.conj().T))
    return states


def run_checks(theory, count: int, seed: int, config: SolverConfig, slack: float = 1.0, log: Callable | None = None):
    """Evaluate the invariant suite; returns ``{property: PropertyReport}``.

    ``slack`` multiplies every tolerance (a negative value forces failures,
    which is how the harness itself is tested).
    """
    if not theory.is_polytope:
        raise UnsupportedError(f"the invariant suite needs a polytope theory; {theory} is not one")
    poly = build_polytope(theory)
    tol = 1e-6 * slack
    tight = 1e-10 * slack
    wtol = 1e-7 * slack
    names = [
        "faithfulness",
        "base>=nuclear",
        "nuclear>=R_g+1",
        "roof>=nuclear",
        "R_g>=purity/polar-1",
        "T'<=R_g",
        "R_random>=R_s",
        "polar_equality",
        "polar_threshold",
        "geometric<=1-polar",
        "witness_generalized",
        "witness_standard",
        "witness_membership",
        "certified_gap",
    ]
    rep = {n: PropertyReport(n) for n in names}
    for i, rho in enumerate(random_check_states(theory, count, seed)):
        cert = free_membership(rho, theory)
        rs = measures.standard_robustness(rho, theory, config)
        base = measures.base_gauge(rho, theory, config)
        rg = measures.generalized_robustness(rho, theory, config, method="program")
        rr = measures.random_robustness(rho, theory, config)
        bfa = measures.best_free_approximation(rho, theory, config)
        tp = measures.modified_trace_distance(rho, theory, config)
        nuc = measures.nuclear_gauge(rho, theory, config)
        roof = measures.convex_roof_upper(rho, theory, config, lower_bounds=False)
        geo = measures.geometric_measure(rho, theory, config)
        pol = measures.polar_gauge_psd(rho, theory)

        vals = [rg.value, nuc.value - 1.0, roof.value - 1.0, bfa.value, tp.value]
        if rs.finite:
            vals.append(rs.value)
        if cert.inside:
            viol = max(vals)
        else:
            # outside: every measure must be strictly positive
            viol = tol - min(vals) if min(vals) <= tol else -min(vals)
        rep["faithfulness"].record(i, viol, tol)
        rep["base>=nuclear"].record(i, (nuc.value - base.value) if base.finite else -np.inf, tol)
        rep["nuclear>=R_g+1"].record(i, rg.value + 1.0 - nuc.value, tol)
        rep["roof>=nuclear"].record(i, nuc.value - roof.value, 1e-5 * slack)
        purity = float(np.real(np.trace(rho @ rho)))
        rep["R_g>=purity/polar-1"].record(i, purity / pol.value - 1.0 - rg.value, tol)
        rep["T'<=R_g"].record(i, tp.value - rg.value, tol)
        if rs.finite:
            rep["R_random>=R_s"].record(i, rs.value - rr.value if rr.finite else -np.inf, tol)
        else:
            rep["R_random>=R_s"].record(i, 0.0 if not rr.finite else np.inf, tol)
        rep["polar_equality"].record(i, abs(measures.cross_polar(rho, theory) - pol.value), tight)
        thr = pol.threshold - poly.expectations(rho)
        # nonnegative on every vertex, zero at the maximiser
        rep["polar_threshold"].record(i, abs(thr.min()), 1e-9 * slack)
        rep["geometric<=1-polar"].record(i, geo.value - (1.0 - pol.value) - 2.0 * geo.stats.get("fw_gap", 0.0), tol)
        wg = measures.witness_validate(rg.witness, rho, theory, "generalized")
        rep["witness_generalized"].record(i, max(wg.residual, abs(wg.bound - rg.lower) - 1e-5), wtol)
        if rs.finite:
            ws = measures.witness_validate(rs.witness, rho, theory, "standard")
            rep["witness_standard"].record(i, max(ws.residual, abs(ws.bound - rs.value) - 1e-5), wtol)
        if not cert.inside:
            w = cert.witness
            margin = float(np.real(np.vdot(w, rho)))
            rep["witness_membership"].record(i, max(-poly.expectations(w).min() - 1e-8, margin), wtol)
        worst_gap = 0.0
        for r in (rs, rg, rr, bfa, tp, nuc):
            if r.finite and not r.certified:
                worst_gap = max(worst_gap, r.gap)
        rep["certified_gap"].record(i, worst_gap, 1e-5 * slack)
        if log is not None:
            log(i, cert.inside, rg.value)
    return rep


def cmd_check(args) -> int:
    theory = _theory(args.theory)
    cfg = _config(args)
    if args.restarts is None:
        cfg.restarts = 1
        cfg.sweeps = 1
    rep = run_checks(theory, args.count, args.seed, cfg, slack=args.slack)
    ok = True
    for r in rep.values():
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        extra = "" if r.passed else f" failing states {r.failures[:10]}"
        print(f"{status} {r.name:<22} tested={r.tested:<4} worst_violation={fmt(r.worst)}{extra}")
    print("ALL PASS" if ok else "SOME CHECKS FAILED")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# -- stabilizers ---------------------------------------------------------

def cmd_stabilizers(args) -> int:
    try:
        vecs = stabilizer_enumerate(args.n)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    _write(args.output, write_stabilizers(vecs))
    return EXIT_OK


# -- entry point ---------------------------------------------------------

def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None, help="solver tolerance (ADMM gap, Frank-Wolfe)")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--max-rounds", type=int, default=None, help="cutting-plane round limit")
    p.add_argument("--restarts", type=int, default=None, help="ensemble restarts for convex roofs")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resource-gauges", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate one measure on a state file")
    p.add_argument("state", help="JSON state file")
    p.add_argument("--theory", required=True)
    p.add_argument("--measure", required=True, help=", ".join(measures.MEASURES))
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--witness", choices=("none", "print", "file"), default="none")
    p.add_argument("--witness-file", default="witness.json")
    p.add_argument("--dictionary", help="vector file (as written by 'stabilizers') replacing the free vertices")
    p.add_argument("--output", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="measures along (1 - alpha) rho0 + alpha rho1")
    p.add_argument("--family", choices=("magic_T_mix", "custom_line"), default="magic_T_mix")
    p.add_argument("--n", type=int, default=1, help="qubits for magic_T_mix")
    p.add_argument("--start", help="rho0 state file (custom_line)")
    p.add_argument("--end", help="rho1 state file (custom_line)")
    p.add_argument("--theory", help="theory for custom_line")
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--measures", default=None, help="comma-separated measure names")
    p.add_argument("--output", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="gauge statistics of random pure states")
    p.add_argument("--theory", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--family", choices=("haar", "free"), default="haar")
    p.add_argument("--output", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("check", help="run the invariant suite on random mixed states")
    p.add_argument("--theory", required=True)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--slack", type=float, default=1.0, help="multiplier applied to every check tolerance")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stabilizers", help="write the n-qubit stabilizer states")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_stabilizers)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if getattr(args, "seed", None) is None and args.command in ("sample", "check"):
        args.seed = 0
    try:
        return args.func(args)
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"write error: {exc}", file=sys.stderr)
        return EXIT_WRITE


if __name__ == "__main__":
    sys.exit(main())

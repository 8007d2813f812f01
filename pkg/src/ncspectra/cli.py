"""Command-line front end: ``ncspectra <experiment> [options]``.

Every experiment writes a JSON report with the fields ``schema_version``,
``command``, ``config_echo``, ``results``, ``assertions`` and ``timestamp``.
Exit status: 0 when all assertions pass, 1 when one fails, 2 on a
configuration error. Options may also come from a ``key = value`` file given
with ``--config``; command-line flags win.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import crossed, gasket, rotation, spectral, torus, uhf, words
from .operator_core import BudgetExceeded, clifford_generators

SCHEMA_VERSION = "1.0.0"


def report_schema_version() -> str:
    return SCHEMA_VERSION


class ConfigError(ValueError):
    pass


# parameter parsing


def parse_int_matrix(text: str) -> list[list[int]]:
    """``"2,0;0,2"`` (rows split by ``;``) or a flat square list ``"2,0,0,2"``."""
    try:
        if ";" in text:
            rows = [[int(x) for x in r.replace(",", " ").split()] for r in text.split(";") if r.strip()]
        else:
            flat = [int(x) for x in text.replace(",", " ").split()]
            p = math.isqrt(len(flat))
            if p * p != len(flat):
                raise ValueError
            rows = [flat[i * p : (i + 1) * p] for i in range(p)]
    except ValueError:
        raise ConfigError(f"cannot read integer matrix from {text!r}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"matrix {text!r} is not square")
    return rows


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"cannot read integer list from {text!r}") from None


def parse_fraction(text: str) -> Fraction:
    try:
        return words.parse_theta(str(text))
    except ValueError:
        raise ConfigError(f"cannot read a rational from {text!r}") from None


@dataclass(frozen=True)
class Param:
    name: str
    kind: Callable[[str], Any]
    default: Any
    help: str = ""
    choices: tuple | None = None


MODEL_SPECTRA = ("nat", "torus", "solenoid", "uhf", "gasket")

DIM_PARAMS = [
    Param("model", str, "torus", "spectrum model", MODEL_SPECTRA),
    Param("N", int, None, "nat cutoff, UHF depth or gasket out-level"),
    Param("p", int, 2, "torus rank"),
    Param("K", int, None, "Fourier cutoff"),
    Param("H", int, 4, "solenoid depth"),
    Param("B", str, "2", "covering matrix, rows separated by ';'"),
    Param("r", int, 2, "UHF factor size"),
    Param("s", float, 2.0, "UHF exponent"),
    Param("m", int, 10, "gasket inner depth"),
    Param("M", int, None, "cutoff of the N factor (crossed-dim)"),
    Param("per_octave", int, 4, "grid points per octave"),
    Param("t_min", float, None, "grid start"),
    Param("t_max", float, None, "grid end"),
    Param("tol", float, None, "slope tolerance"),
    Param("csv", str, None, "write the spectrum as CSV"),
]

LIP_PARAMS = [
    Param("model", str, "torus", "model", ("torus", "rotation", "uhf", "gasket")),
    Param("k_max", int, 4, "horizon"),
    Param("B", str, "2,0;0,2", "covering matrix"),
    Param("k", str, "1,0", "torus frequency"),
    Param("p_theta", int, 1, "rotation numerator"),
    Param("q", int, 3, "rotation denominator"),
    Param("mn", str, "1,0", "rotation monomial exponents m,n"),
    Param("r", int, 2, "UHF factor size"),
    Param("s", float, 2.0, "UHF exponent"),
    Param("axis", str, "x", "gasket coordinate", ("x", "y")),
    Param("m", int, 8, "gasket inner depth"),
]

SCALING_PARAMS = [
    Param("model", str, "uhf", "model", ("uhf", "gasket")),
    Param("r", int, 2, "UHF factor size"),
    Param("s", float, 1.0, "UHF exponent"),
    Param("K", int, 2, "window left extent"),
    Param("L", int, 1, "window right extent"),
    Param("position", int, 0, "position of e_11"),
    Param("steps", str, None, "shift steps"),
    Param("axis", str, "x", "gasket coordinate", ("x", "y")),
    Param("N", int, 0, "gasket out-level"),
    Param("m", int, 6, "gasket inner depth"),
]

COVARIANCE_PARAMS = [
    Param("model", str, "all", "model", ("torus", "rotation", "uhf", "gasket", "all")),
    Param("N", int, None, "horizon"),
    Param("clifford_max", int, 6, "check Clifford relations for ranks 1..clifford_max"),
]

REWRITE_PARAMS = [
    Param("theta", str, "1/5", "rotation angle"),
    Param("word", str, None, "word over U, U*, V, V*"),
    Param("N", int, 16, "oracle cutoff in n"),
    Param("M", int, 16, "oracle Fourier cutoff"),
    Param("corpus", int, 0, "number of seeded random words to check"),
    Param("max_len", int, 12, "longest random word"),
    Param("strategies", int, 20, "random rewriting strategies per corpus word"),
]

COVER_PARAMS = [
    Param("samples", int, 10000, "number of sample points"),
    Param("n_max", int, 3, "deepest diagram level"),
]

COMMON = [
    Param("seed", int, 0, "seed for randomized corpora"),
    Param("output", str, None, "write the JSON report here"),
]


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.results: dict[str, Any] = {}
        self.assertions: list[dict] = []

    def check(self, name: str, passed: bool, value, expected, tolerance) -> bool:
        self.assertions.append(
            {"name": name, "passed": bool(passed), "value": value, "expected": expected, "tolerance": tolerance}
        )
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def as_dict(self, timestamp: str | None = None) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config_echo": self.config,
            "results": self.results,
            "assertions": self.assertions,
            "timestamp": timestamp,
        }

    def to_json(self, timestamp: str | None = None) -> str:
        return json.dumps(_sanitize(self.as_dict(timestamp)), indent=2, sort_keys=True)


def _sanitize(x):
    if isinstance(x, dict):
        return {str(k): _sanitize(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sanitize(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


# experiments


def _spectrum_for(cfg: dict) -> tuple[spectral.WeightedSpectrum, float, float, float | None]:
    """Spectrum, expected dimension, default tolerance and default ``t_max``."""
    model = cfg["model"]
    if model == "nat":
        N = cfg["N"] or 2048
        return spectral.nat_spectrum(N), 1.0, 0.03, None
    if model == "torus":
        K = cfg["K"] or 64
        return torus.torus_spectrum(cfg["p"], K), float(cfg["p"]), 0.1, math.pi * K
    if model == "solenoid":
        K = cfg["K"] or 64
        B = torus.CoveringMatrix.from_rows(parse_int_matrix(cfg["B"]))
        return torus.solenoid_spectrum(B, cfg["H"], K), float(B.p), 0.12, math.pi * K
    if model == "uhf":
        N = cfg["N"] or 12
        return uhf.ci_spectrum(cfg["r"], cfg["s"], N), 2.0 / cfg["s"], 0.05, None
    N = cfg["N"] if cfg["N"] is not None else 2
    return gasket.gasket_spectrum(N, cfg["m"]), math.log2(3), 0.05, None


def run_dim(cfg: dict, rep: Report, crossed_product: bool = False) -> None:
    S, expected, tol, t_max = _spectrum_for(cfg)
    if cfg["csv"]:
        with open(cfg["csv"], "w") as fh:
            fh.write(S.to_csv())
    target = S
    if crossed_product:
        M = cfg["M"] or math.ceil(S.max_value)
        target = spectral.ProductSpectrum(S, spectral.NatCounting(M))
        expected += 1.0
        tol = 0.15 if cfg["model"] in ("torus", "solenoid", "nat") else 0.1
        t_max = min(t_max or S.max_value / 2, M / 2, S.max_value / 2)
    lo, hi = spectral.valid_range(target)
    grid = spectral.dyadic_grid(cfg["t_min"] or lo, cfg["t_max"] or t_max or hi, cfg["per_octave"])
    fit = spectral.dimension_fit(target, grid)
    tol = cfg["tol"] if cfg["tol"] is not None else tol
    rep.results.update(
        {
            "label": getattr(target, "label", ""),
            "slope": fit.slope,
            "intercept": fit.intercept,
            "max_tail_slope": fit.max_tail_slope,
            "valid_range": list(fit.valid_range),
            "grid": [list(p) for p in fit.grid],
            "expected": expected,
        }
    )
    rep.check("slope", abs(fit.slope - expected) <= tol, fit.slope, expected, tol)
    if crossed_product:
        sandwiches = [spectral.sandwich_check(S, target.S2, t) for t in grid]
        rep.results["sandwich"] = [[s.t, s.lower, s.middle, s.upper] for s in sandwiches]
        rep.check("sandwich", all(s.passed for s in sandwiches), sum(s.passed for s in sandwiches), len(grid), 0)


def run_lip(cfg: dict, rep: Report) -> None:
    model, kmax = cfg["model"], cfg["k_max"]
    if kmax < 1:
        raise ConfigError("k_max must be >= 1")
    envelope = None
    if model == "torus":
        B = torus.CoveringMatrix.from_rows(parse_int_matrix(cfg["B"]))
        k = parse_int_list(cfg["k"])
        if len(k) != B.p:
            raise ConfigError("frequency and B differ in dimension")
        f = torus.TorusElement.mode(k)
        chk = torus.lip_inequality_check(B, f, kmax)
        norms, envelope, element = chk.norms, chk.envelope, f"e_{tuple(k)}"
    elif model == "rotation":
        B = parse_int_matrix(cfg["B"])
        mn = parse_int_list(cfg["mn"])
        if len(mn) != 2:
            raise ConfigError("mn needs two integers")
        rotation._check_coprime(cfg["p_theta"], cfg["q"])
        norms, envelope = rotation.rotation_lip_sequence(B, mn[0], mn[1], kmax, cfg["q"])
        element = f"U^{mn[0]} V^{mn[1]}"
    elif model == "uhf":
        params = uhf.UHFParams(cfg["r"], cfg["s"], kmax, 0)
        D = uhf.window_dirac(params)
        a = uhf.WindowElement(0, uhf.matrix_unit(cfg["r"], 0, 0), cfg["r"])

        def norm_at(n):
            L = uhf.left_mult(params, uhf.shift_element(a, n, params))
            return crossed.operator_norm(crossed.commutator(D, L))

        norms, element = [norm_at(n) for n in range(kmax + 1)], "e_11 at 0"
    else:
        if kmax > cfg["m"]:
            raise ConfigError("k_max must not exceed m")
        f = gasket.GasketFunction.coordinate("xy".index(cfg["axis"]))
        E = gasket.enumerate_edges(0, cfg["m"])
        norms = [gasket.edge_commutator_norm(lambda x, n=n: f(gasket.w0_power(x, n)), E) for n in range(kmax + 1)]
        element = f"coordinate {cfg['axis']}"
    probe = crossed.lip_probe(lambda n: norms[n], kmax, (lambda n: envelope[n]) if envelope else None, model, element)
    ratios = [None] + [norms[i] / norms[i - 1] if norms[i - 1] else None for i in range(1, len(norms))]
    rep.results.update(probe.to_dict())
    rep.results["table"] = [
        {"k": i, "norm": norms[i], "ratio": ratios[i], "envelope": envelope[i] if envelope else None}
        for i in range(len(norms))
    ]
    if envelope:
        rep.check("bounded_by_envelope", probe.bounded, probe.sup, max(envelope), 1e-9)
    if model in ("uhf", "gasket"):
        expected = float(cfg["r"]) ** (-cfg["s"]) if model == "uhf" else 0.5
        worst = max(abs(r - expected) for r in ratios[1:])
        tol = 1e-9 * expected if model == "uhf" else 1e-12
        rep.check("constant_ratio", worst <= tol, worst, expected, tol)


def run_scaling(cfg: dict, rep: Report) -> None:
    rows = []
    if cfg["model"] == "uhf":
        params = uhf.UHFParams(cfg["r"], cfg["s"], cfg["K"], cfg["L"])
        f = uhf.WindowElement(cfg["position"], uhf.matrix_unit(cfg["r"], 0, 0), cfg["r"])
        for k in parse_int_list(cfg["steps"] or "1,2"):
            res = uhf.scaling_check(params, f, k)
            rows.append({"k": k, "ratio": res.ratio, "expected": res.expected, "status": res.status,
                         "norm_f": res.norm_f, "norm_shifted": res.norm_shifted, "boundary_weight": res.boundary_weight})
            if res.status != "inconclusive":  # shifted support left the window: reported, not failed
                rep.check(f"ratio_k{k}", res.passed, res.ratio, res.expected, 1e-9)
    else:
        f = gasket.GasketFunction.coordinate("xy".index(cfg["axis"]))
        for k in parse_int_list(cfg["steps"] or "1,2,3"):
            if not 0 <= k <= cfg["m"]:
                raise ConfigError("steps must lie in 0..m")
            res = gasket.pullback_scaling_check(f, k, cfg["N"], cfg["m"])
            rows.append({"k": k, "ratio": res.ratio, "expected": res.expected,
                         "norm_pullback": res.norm_pullback, "norm_f": res.norm_f, "direction": res.direction})
            rep.check(f"ratio_k{k}", res.deviation <= 1e-12, res.ratio, res.expected, 1e-12)
    rep.results["rows"] = rows


def model_samples(which: str, N: int | None = None) -> list[crossed.ModelSample]:
    out = []
    if which in ("torus", "all"):
        out.append(crossed.torus_sample([[2, 0], [0, 2]], (1, 2), N or 16))
        out.append(crossed.torus_sample([[1, 1], [-1, 1]], (3, -1), N or 16))
    if which in ("rotation", "all"):
        out.append(crossed.rotation_sample(1, 3, [[2, 0], [0, 2]], 1, 1, N or 4))
    if which in ("uhf", "all"):
        out.append(crossed.uhf_sample(N=N or 2))
    if which in ("gasket", "all"):
        out.append(crossed.gasket_sample(N or 4))
    return out


def run_covariance(cfg: dict, rep: Report) -> None:
    if cfg["clifford_max"] > 0:
        defects = [clifford_generators(p).anticommutator_defect() for p in range(1, cfg["clifford_max"] + 1)]
        rep.results["clifford_defects"] = defects
        rep.check("clifford_relations", max(defects) < 1e-12, max(defects), 0.0, 1e-12)
    rows = []
    for smp in model_samples(cfg["model"], cfg["N"]):
        T = smp.truncation
        cov = crossed.check_covariance(T, smp.blocks_alpha)
        if smp.D is not None:
            D, dirac = smp.D, "model"
        else:  # no model Dirac on this truncation: probe with a seeded Hermitian matrix
            g = np.random.default_rng(cfg["seed"]).normal(size=(2, T.base_dim, T.base_dim))
            D, dirac = (g[0] + 1j * g[1]) + (g[0] + 1j * g[1]).conj().T, "random_hermitian"
        cn = crossed.crossed_norms(T, D)
        rows.append({"model": smp.name, "N": T.N, "base_dim": T.base_dim, "dirac": dirac, "defect": cov.defect,
                     "commutant_defect": cov.commutant_defect, "shift_commutator": cn.shift_commutator,
                     "pi_commutator": cn.pi_commutator, "block_max": cn.block_max})
        rep.check(f"{smp.name}_covariance", cov.passed(1e-10), max(cov.defect, cov.commutant_defect), 0.0, 1e-10)
        rep.check(f"{smp.name}_shift_commutator", cn.shift_commutator <= 1 + 1e-12, cn.shift_commutator, 1.0, 1e-12)
        gap = abs(cn.pi_commutator - cn.block_max)
        rep.check(f"{smp.name}_blockwise_max", gap <= 1e-9, cn.pi_commutator, cn.block_max, 1e-9)
    rep.results["samples"] = rows


def _oracle_error(w, nf, theta) -> tuple[float, int, int]:
    margin = max(len(w), 1)
    N = M = 2 * margin + 2
    diff = words.eval_word_sparse(w, theta, N, M) - words.eval_word_sparse(nf, theta, N, M)
    return words.interior_norm(diff, N, M, margin), N, margin


def run_rewrite(cfg: dict, rep: Report) -> str | None:
    if not cfg["word"] and cfg["corpus"] <= 0:
        raise ConfigError("--word or --corpus is required")
    theta = parse_fraction(cfg["theta"])
    N, M = cfg["N"], cfg["M"]
    uv = words.eval_word(words.RawWord(("U", "V")), theta, N, M)
    vu = words.eval_word(words.RawWord(("V", "U")), theta, N, M)
    rel = words.interior_norm(uv - rotation.phase(theta) * vu, N, M)
    iso = words.interior_norm(words.eval_word(words.RawWord(("V*", "V")), theta, N, M) - np.eye(uv.shape[0]), N, M)
    rep.results["relations"] = {"UV - e(theta) VU": rel, "V*V - 1": iso}
    rep.check("commutation_relation", rel < 1e-10, rel, 0.0, 1e-10)
    rep.check("isometry_relation", iso < 1e-10, iso, 0.0, 1e-10)
    text = None
    if cfg["word"]:
        try:
            w = words.parse_word(cfg["word"])
        except words.WordSyntaxError as exc:
            raise ConfigError(str(exc)) from None
        nf = words.normalize_word(w, theta)
        text = words.format_word(nf)
        err, cut, margin = _oracle_error(w, nf, theta)
        rep.results.update({"normal_form": text, "j": nf.j, "m": nf.m, "n": nf.n, "phase": nf.phase,
                            "oracle_cutoffs": [cut, cut], "oracle_margin": margin})
        rep.check("oracle_equivalence", err < 1e-8, err, 0.0, 1e-8)
    if cfg["corpus"] > 0:
        rng = random.Random(cfg["seed"])
        worst, split = 0.0, 0
        for _ in range(cfg["corpus"]):
            w = words.random_word(rng, cfg["max_len"])
            nf = words.normalize_word(w, theta)
            worst = max(worst, _oracle_error(w, nf, theta)[0])
            split += sum(words.normalize_word(w, theta, rng=rng) != nf for _ in range(cfg["strategies"]))
        rep.results["corpus"] = {"words": cfg["corpus"], "strategies": cfg["strategies"],
                                 "max_oracle_error": worst, "divergent_strategies": split}
        rep.check("corpus_oracle_equivalence", worst < 1e-8, worst, 0.0, 1e-8)
        rep.check("confluence", split == 0, split, 0, 0)
    return text


def run_gasket_cover(cfg: dict, rep: Report) -> None:
    n_samples, seed = cfg["samples"], cfg["seed"]
    x1 = gasket.sample_points(n_samples, level=1, seed=seed)
    dev0 = float(np.abs(gasket.covering_p(x1) - gasket.covering_phi(gasket.w0_power(x1, 1))).max())
    rep.results["p_equals_phi_w0"] = dev0
    rep.check("p_equals_phi_w0", dev0 < 1e-9, dev0, 0.0, 1e-9)
    for n in range(1, cfg["n_max"] + 1):
        xn = gasket.sample_points(n_samples, level=n, seed=seed + n)
        lhs = gasket.p_n(gasket.covering_phi(xn, n), n)
        rhs = gasket.covering_phi(gasket.p_n(xn, n), n - 1)
        dev = float(np.abs(lhs - rhs).max())
        rep.results[f"diagram_n{n}"] = dev
        rep.check(f"diagram_n{n}", dev < 1e-9, dev, 0.0, 1e-9)


COMMANDS: dict[str, tuple[list[Param], str]] = {
    "dim": (DIM_PARAMS, "dimension slope of a model spectrum"),
    "crossed-dim": (DIM_PARAMS, "dimension slope of the crossed product spectrum"),
    "lip": (LIP_PARAMS, "Lip-semiboundedness sequence"),
    "scaling": (SCALING_PARAMS, "commutator scaling under the endomorphism"),
    "covariance": (COVARIANCE_PARAMS, "covariance defects and commutator structure"),
    "rewrite": (REWRITE_PARAMS, "normal form of an NC-torus word"),
    "gasket-cover": (COVER_PARAMS, "gasket covering identities on sampled points"),
    "report-version": ([], "print the report schema version"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncspectra", description="Spectral triples on crossed products by endomorphisms.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (params, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        if name == "report-version":
            continue
        sp.add_argument("--config", help="key = value configuration file")
        for prm in params + COMMON:
            flag = "--" + prm.name.replace("_", "-")
            sp.add_argument(flag, dest=prm.name, default=None, help=prm.help)
    return ap


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, val = line.split(sep, 1)
                break
        else:
            raise ConfigError(f"{path}:{i}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def resolve_config(command: str, ns: argparse.Namespace) -> dict:
    params = COMMANDS[command][0] + COMMON
    by_name = {p.name: p for p in params}
    raw: dict[str, str] = {}
    if ns.config:
        file_cfg = read_config_file(ns.config)
        exp = file_cfg.pop("experiment", None)
        if exp is not None and exp != command:
            raise ConfigError(f"config is for experiment {exp!r}, not {command!r}")
        unknown = sorted(set(file_cfg) - set(by_name))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        raw.update(file_cfg)
    for name in by_name:
        val = getattr(ns, name, None)
        if val is not None:
            raw[name] = val
    cfg = {}
    for name, prm in by_name.items():
        if name in raw:
            try:
                val = prm.kind(raw[name])
            except ValueError:
                raise ConfigError(f"bad value for {name}: {raw[name]!r}") from None
            if prm.choices and val not in prm.choices:
                raise ConfigError(f"{name} must be one of {', '.join(prm.choices)}")
            cfg[name] = val
        else:
            cfg[name] = prm.default
    return cfg


def run(command: str, cfg: dict) -> tuple[Report, str | None]:
    rep = Report(command, dict(cfg))
    random.seed(cfg.get("seed", 0))
    text = None
    if command == "dim":
        run_dim(cfg, rep)
    elif command == "crossed-dim":
        run_dim(cfg, rep, crossed_product=True)
    elif command == "lip":
        run_lip(cfg, rep)
    elif command == "scaling":
        run_scaling(cfg, rep)
    elif command == "covariance":
        run_covariance(cfg, rep)
    elif command == "rewrite":
        text = run_rewrite(cfg, rep)
    elif command == "gasket-cover":
        run_gasket_cover(cfg, rep)
    return rep, text


def _summary(rep: Report) -> str:
    lines = []
    table = rep.results.get("table") or rep.results.get("rows") or rep.results.get("samples")
    if table:
        keys = list(table[0])
        lines.append("  ".join(f"{k:>14}" for k in keys))
        for row in table:
            lines.append("  ".join(f"{_fmt(row[k]):>14}" for k in keys))
    for a in rep.assertions:
        lines.append(f"{'PASS' if a['passed'] else 'FAIL'} {a['name']}: value={_fmt(a['value'])} expected={_fmt(a['expected'])}")
    return "\n".join(lines)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    if ns.command == "report-version":
        print(report_schema_version())
        return 0
    try:
        cfg = resolve_config(ns.command, ns)
        rep, text = run(ns.command, cfg)
    except (ConfigError, BudgetExceeded, ValueError, ZeroDivisionError) as exc:
        print(f"ncspectra: configuration error: {exc}", file=sys.stderr)
        return 2
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    payload = rep.to_json(stamp)
    if cfg.get("output"):
        with open(cfg["output"], "w") as fh:
            fh.write(payload + "\n")
        print(text if text is not None else _summary(rep))
    elif text is not None:
        print(text)
    else:
        print(payload)
    if not rep.passed:
        for a in rep.assertions:
            if not a["passed"]:
                print(f"ncspectra: assertion failed: {a['name']} (value {a['value']}, expected {a['expected']})", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

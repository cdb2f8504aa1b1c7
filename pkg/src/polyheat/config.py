"""Declarative run configuration: INI file with nested sections + overrides.

Every report embeds the fully resolved configuration, and identical
(config, seed) pairs produce byte-identical outputs.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, replace

from .domains import BALL, INTERVAL, SIMPLEX, DomainSpec
from .errors import ParameterError

SCHEMA_VERSION = 1


def _parse_floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


@dataclass(frozen=True)
class RunConfig:
    spec: DomainSpec
    max_degree: int = 20
    precision: str = "double"
    epsilon: float = 1e-10
    t_min: float | None = None
    points: int = 10
    times: tuple = (0.05, 0.2, 1.0)
    radii: tuple = (0.1, 0.3, 0.7)
    epsilons: tuple = (0.2, 0.1, 0.05, 0.02, 0.01)
    deltas: tuple = (0.05, 0.1)
    mc_samples: int = 1_000_000
    seed: int = 12345
    output: str = "reports"
    threads: int = 1

    def to_json_obj(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "domain": self.spec.to_json_obj(),
            "basis": {"max_degree": self.max_degree, "precision": self.precision},
            "kernel": {"epsilon": self.epsilon, "t_min": self.t_min},
            "grids": {
                "points": self.points,
                "times": list(self.times),
                "radii": list(self.radii),
                "epsilons": list(self.epsilons),
                "deltas": list(self.deltas),
            },
            "mc": {"samples": self.mc_samples},
            "run": {"seed": self.seed, "output": self.output, "threads": self.threads},
        }

    def to_ini(self):
        spec = self.spec
        lines = ["[domain]", f"kind = {spec.kind}", f"n = {spec.n}"]
        if spec.kind == INTERVAL:
            lines += [f"alpha = {spec.alpha}", f"beta = {spec.beta}"]
        elif spec.kind == BALL:
            lines += [f"gamma = {spec.gamma}"]
        else:
            lines += ["kappa = " + ", ".join(str(k) for k in spec.kappa)]
        lines += [
            "",
            "[basis]",
            f"max_degree = {self.max_degree}",
            f"precision = {self.precision}",
            "",
            "[kernel]",
            f"epsilon = {self.epsilon}",
        ]
        if self.t_min is not None:
            lines.append(f"t_min = {self.t_min}")
        lines += [
            "",
            "[grids]",
            f"points = {self.points}",
            "times = " + ", ".join(str(t) for t in self.times),
            "radii = " + ", ".join(str(r) for r in self.radii),
            "epsilons = " + ", ".join(str(e) for e in self.epsilons),
            "deltas = " + ", ".join(str(d) for d in self.deltas),
            "",
            "[mc]",
            f"samples = {self.mc_samples}",
            "",
            "[run]",
            f"seed = {self.seed}",
            f"output = {self.output}",
            f"threads = {self.threads}",
        ]
        return "\n".join(lines) + "\n"


def default_config():
    return RunConfig(spec=DomainSpec.interval(-0.5, -0.5))


def _spec_from_section(sec):
    kind = sec.get("kind", INTERVAL).strip().lower()
    if kind == INTERVAL:
        return DomainSpec.interval(float(sec.get("alpha", -0.5)), float(sec.get("beta", -0.5)))
    if kind == BALL:
        return DomainSpec.ball(int(sec.get("n", 2)), float(sec.get("gamma", 0.5)))
    if kind == SIMPLEX:
        n = int(sec.get("n", 2))
        kappa = _parse_floats(sec.get("kappa", ", ".join(["0.5"] * (n + 1))))
        return DomainSpec.simplex(n, kappa)
    raise ParameterError(f"[domain] kind = {kind!r} is not one of interval|ball|simplex")


def load_config(path=None, **overrides):
    """Load the INI file (optional) and apply keyword overrides."""
    cfg = default_config()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ParameterError(f"config file {path!r} not found or unreadable")
        if parser.has_section("domain"):
            cfg = replace(cfg, spec=_spec_from_section(parser["domain"]))
        if parser.has_section("basis"):
            sec = parser["basis"]
            cfg = replace(
                cfg,
                max_degree=int(sec.get("max_degree", cfg.max_degree)),
                precision=sec.get("precision", cfg.precision).strip(),
            )
        if parser.has_section("kernel"):
            sec = parser["kernel"]
            cfg = replace(cfg, epsilon=float(sec.get("epsilon", cfg.epsilon)))
            if sec.get("t_min") is not None:
                cfg = replace(cfg, t_min=float(sec["t_min"]))
        if parser.has_section("grids"):
            sec = parser["grids"]
            cfg = replace(
                cfg,
                points=int(sec.get("points", cfg.points)),
                times=tuple(_parse_floats(sec.get("times", ""))) or cfg.times,
                radii=tuple(_parse_floats(sec.get("radii", ""))) or cfg.radii,
                epsilons=tuple(_parse_floats(sec.get("epsilons", ""))) or cfg.epsilons,
                deltas=tuple(_parse_floats(sec.get("deltas", ""))) or cfg.deltas,
            )
        if parser.has_section("mc"):
            cfg = replace(cfg, mc_samples=int(parser["mc"].get("samples", cfg.mc_samples)))
        if parser.has_section("run"):
            sec = parser["run"]
            cfg = replace(
                cfg,
                seed=int(sec.get("seed", cfg.seed)),
                output=sec.get("output", cfg.output).strip(),
                threads=int(sec.get("threads", cfg.threads)),
            )
    env_threads = os.environ.get("POLYHEAT_THREADS")
    if env_threads:
        cfg = replace(cfg, threads=int(env_threads))
    known = {f.name for f in cfg.__dataclass_fields__.values()}
    bad = set(overrides) - known
    if bad:
        raise ParameterError(f"unknown config overrides: {sorted(bad)}")
    supplied = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **supplied)

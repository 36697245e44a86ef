"""Experiment configuration, run reports, and deterministic serialization.

CSV files carry provenance comment lines (tool version and config hash)
ahead of the header row and format every float with 17 significant
digits, so repeated runs with the same config and seed are byte
identical.  Wall-clock timing is shown on the console only; it never
enters a serialized report.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

from ._version import __version__

# fields that do not affect computed numbers; excluded from the config hash
_NON_SEMANTIC = {"out", "format", "fig", "no_fig", "dump_state"}


@dataclass(frozen=True)
class ExperimentConfig:
    """One CLI invocation's settings; file values merged under flag values."""

    command: str
    n: int | None = None
    k: int | None = None
    r: int | None = None
    m: int | None = None
    t1: int | None = None
    t2: int | None = None
    mode: str | None = None  # commands default: closed (convergence: exact)
    samples: int = 0
    seed: int = 0
    values: tuple[int, ...] | None = None
    ladder: tuple[int, ...] | None = None
    t2_min: int | None = None
    t2_max: int | None = None
    t1_min: int | None = None
    t1_max: int | None = None
    skip: tuple[str, ...] = ()
    tolerance: float | None = None
    cap: int = 10**7
    out: str | None = None
    format: str = "csv"
    fig: str | None = None
    no_fig: bool = False
    dump_state: str | None = None

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("values", "ladder", "skip"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(data)
        for key in ("values", "ladder", "skip"):
            if coerced.get(key) is not None:
                coerced[key] = tuple(coerced[key])
        if coerced.get("skip") is None:
            coerced["skip"] = ()
        return cls(**coerced)

    def config_hash(self) -> str:
        payload = {
            key: val
            for key, val in sorted(self.to_dict().items())
            if key not in _NON_SEMANTIC
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def provenance_lines(config: ExperimentConfig) -> list[str]:
    return [
        f"# kdwalk {__version__}",
        f"# config_hash={config.config_hash()}",
    ]


def write_csv(path, header, rows, config: ExperimentConfig) -> None:
    lines = provenance_lines(config)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, payload: dict, config: ExperimentConfig) -> None:
    body = {
        "tool": f"kdwalk {__version__}",
        "config_hash": config.config_hash(),
        **payload,
    }
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class RunReport:
    """Everything the params command computes for one instance frame."""

    n: int
    k: int
    r: int
    m: int | None
    t1_closed: int
    t2_closed: int
    t1_exact: int
    t2_exact: int
    p_exact_closed: float
    p_exact_exact: float
    p_asymptotic: float
    p_succ_predicted: float
    lambda_ratio: float
    spectral_table: list[tuple[int, float, float]]
    quantum_queries: int
    classical_queries: int
    flags: dict
    config_hash: str
    version: str = __version__
    elapsed_s: float | None = None

    def as_dict(self, deterministic: bool = True) -> dict:
        out = dataclasses.asdict(self)
        out["spectral_table"] = [
            {"n": n, "phi": phi, "overlap": ov} for n, phi, ov in self.spectral_table
        ]
        if deterministic:
            out.pop("elapsed_s")
        return out

    def key_value_rows(self) -> list[tuple[str, object]]:
        rows: list[tuple[str, object]] = [
            ("n", self.n),
            ("k", self.k),
            ("r", self.r),
            ("m", self.m if self.m is not None else ""),
            ("t1_closed", self.t1_closed),
            ("t2_closed", self.t2_closed),
            ("t1_exact", self.t1_exact),
            ("t2_exact", self.t2_exact),
            ("p_exact_closed", self.p_exact_closed),
            ("p_exact_exact", self.p_exact_exact),
            ("p_asymptotic", self.p_asymptotic),
            ("p_succ_predicted", self.p_succ_predicted),
            ("lambda_ratio", self.lambda_ratio),
            ("quantum_queries", self.quantum_queries),
            ("classical_queries", self.classical_queries),
        ]
        for n, phi, ov in self.spectral_table:
            rows.append((f"phi_{n}", phi))
            rows.append((f"overlap_{n}", ov))
        for key, val in sorted(self.flags.items()):
            rows.append((key, val))
        return rows

"""Flat key/value experiment spec files.

A spec file pins a model and a sampling setup in versionable plain text:

    family = exchange_no_field
    n = 4
    theta = 0.1, 1.5, -0.8, 3.1
    measurement = x1
    dt = 0.1
    N = 100
    noise_sigma = 0.001
    repeats = 100
    seed = 42

`#` starts a comment; blank lines are skipped. Only the model keys
(family, n, theta) are required; everything else has defaults matching
the reference experiment. Unknown or duplicate keys are rejected by
name so typos cannot silently change an experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .errors import SpecFileError
from .estimator import ExperimentConfig
from .spin_models import Family, HamiltonianSpec, Measurement

_MODEL_KEYS = ("family", "n", "theta", "measurement")
_EXPERIMENT_KEYS = ("dt", "N", "q", "noise_sigma", "repeats", "seed")
KNOWN_KEYS = _MODEL_KEYS + _EXPERIMENT_KEYS

_DEFAULTS = {
    "measurement": "x1",
    "dt": "0.1",
    "N": "100",
    "q": "",
    "noise_sigma": "0.0",
    "repeats": "1",
    "seed": "0",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A parsed spec file: the model plus its sampling configuration."""

    model: HamiltonianSpec
    dt: float = 0.1
    n_samples: int = 100
    q: int | None = None
    noise_sigma: float = 0.0
    repeats: int = 1
    seed: int = 0

    def config(self) -> ExperimentConfig:
        return ExperimentConfig(
            dt=self.dt,
            n_samples=self.n_samples,
            q=self.q,
            noise_sigma=self.noise_sigma,
            repeats=self.repeats,
            seed=self.seed,
        )

    def with_updates(self, **kwargs) -> "ExperimentSpec":
        return replace(self, **kwargs)


def _parse_pairs(text: str, origin: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise SpecFileError(f"{origin}:{lineno}: unknown key '{key}'")
        if key in pairs:
            raise SpecFileError(f"{origin}:{lineno}: duplicate key '{key}'")
        pairs[key] = value
    return pairs


def _coerce(origin: str, key: str, value: str, kind):
    try:
        return kind(value)
    except ValueError as exc:
        raise SpecFileError(
            f"{origin}: key '{key}' has invalid value {value!r}: {exc}"
        ) from exc


def spec_from_pairs(pairs: dict[str, str], origin: str = "<spec>") -> ExperimentSpec:
    """Build an ExperimentSpec from raw key/value strings.

    Model validation (theta length, odd n, and so on) is delegated to
    the domain types; their dimension errors pass through untouched so
    the caller can distinguish a malformed file from a bad model.
    """
    for key in ("family", "n", "theta"):
        if key not in pairs:
            raise SpecFileError(f"{origin}: missing required key '{key}'")
    merged = dict(_DEFAULTS)
    merged.update(pairs)

    try:
        family = Family(merged["family"])
    except ValueError:
        raise SpecFileError(
            f"{origin}: key 'family' must be one of "
            f"{[f.value for f in Family]}, got {merged['family']!r}"
        ) from None
    try:
        measurement = Measurement(merged["measurement"])
    except ValueError:
        raise SpecFileError(
            f"{origin}: key 'measurement' must be one of "
            f"{[m.value for m in Measurement]}, got {merged['measurement']!r}"
        ) from None
    n = _coerce(origin, "n", merged["n"], int)
    theta = tuple(
        _coerce(origin, "theta", part.strip(), float)
        for part in merged["theta"].split(",")
        if part.strip() != ""
    )
    if not theta:
        raise SpecFileError(f"{origin}: key 'theta' must list at least one value")
    model = HamiltonianSpec(family=family, n=n, theta=theta, measurement=measurement)

    q_raw = merged["q"].strip()
    return ExperimentSpec(
        model=model,
        dt=_coerce(origin, "dt", merged["dt"], float),
        n_samples=_coerce(origin, "N", merged["N"], int),
        q=None if q_raw in ("", "none") else _coerce(origin, "q", q_raw, int),
        noise_sigma=_coerce(origin, "noise_sigma", merged["noise_sigma"], float),
        repeats=_coerce(origin, "repeats", merged["repeats"], int),
        seed=_coerce(origin, "seed", merged["seed"], int),
    )


def parse_spec_text(text: str, origin: str = "<spec>") -> ExperimentSpec:
    return spec_from_pairs(_parse_pairs(text, origin), origin)


def load_spec_file(path: str | Path) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file {path}: {exc}") from exc
    return parse_spec_text(text, origin=str(path))


def apply_overrides(spec: ExperimentSpec, overrides: list[str]) -> ExperimentSpec:
    """Apply KEY=VALUE override strings on top of a parsed spec.

    Overrides go through the same key whitelist and coercion as the
    file itself, so `--override nois_sigma=0.01` fails loudly instead
    of running a noiseless experiment.
    """
    pairs = dict(dump_pairs(spec))
    for item in overrides:
        if "=" not in item:
            raise SpecFileError(f"override {item!r} is not KEY=VALUE")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in KNOWN_KEYS:
            raise SpecFileError(f"override: unknown key '{key}'")
        pairs[key] = value
    return spec_from_pairs(pairs, origin="<override>")


def dump_pairs(spec: ExperimentSpec) -> list[tuple[str, str]]:
    model = spec.model
    return [
        ("family", model.family.value),
        ("n", str(model.n)),
        ("theta", ", ".join(repr(float(t)) for t in model.theta)),
        ("measurement", model.measurement.value),
        ("dt", repr(float(spec.dt))),
        ("N", str(spec.n_samples)),
        ("q", "" if spec.q is None else str(spec.q)),
        ("noise_sigma", repr(float(spec.noise_sigma))),
        ("repeats", str(spec.repeats)),
        ("seed", str(spec.seed)),
    ]


def dump_spec(spec: ExperimentSpec) -> str:
    """Render a spec so that parsing the output reproduces it exactly.

    Floats are written with repr, which round-trips in IEEE double.
    """
    return "\n".join(f"{k} = {v}" for k, v in dump_pairs(spec)) + "\n"

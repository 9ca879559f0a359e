"""Atomic datasets: complex polarizability tensors for two or three bound levels.

All polarizabilities are in atomic units.  Field intensities throughout the
package are understood as the squared peak field strength in atomic units
(``I = eps0**2``); 1 a.u. of ``eps0**2`` corresponds to about 3.51e16 W/cm^2
if one uses ``I = c eps0**2 / 8 pi``.  Photon energies are kept as metadata
only.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DatasetParseError, DatasetValidationError, UnknownDatasetError

TWO_LEVEL_FIELDS = ("a1w1", "a1w2", "a2w1", "a2w2", "a12")
THIRD_LEVEL_FIELDS = ("a3w1", "a3w2", "a23w1", "a23w2", "a13")

# relative mismatch between Im(a12) and sqrt(Im a1(w1) * Im a2(w2))
FACTORIZATION_WARN = 0.002
FACTORIZATION_FAIL = 0.01
# Gamma_2^(1) / Gamma_1 above which the "small side channel" regime is doubtful
WIDTH_RATIO_WARN = 0.5


@dataclass(frozen=True)
class AtomDataset:
    """Polarizability tensor of a two- or three-level scheme.

    ``aKwJ`` is the diagonal polarizability of level K at frequency J,
    ``a12`` couples levels 1 and 2 through the continuum.  The optional
    third-level block holds ``a3w1``, ``a3w2``, ``a23w1``, ``a23w2``, ``a13``.
    """

    name: str
    level_labels: tuple
    omega1_ev: float
    omega2_ev: float
    a1w1: complex
    a1w2: complex
    a2w1: complex
    a2w2: complex
    a12: complex
    a3w1: Optional[complex] = None
    a3w2: Optional[complex] = None
    a23w1: Optional[complex] = None
    a23w2: Optional[complex] = None
    a13: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "level_labels", tuple(self.level_labels))
        for name in TWO_LEVEL_FIELDS:
            object.__setattr__(self, name, complex(getattr(self, name)))
        third = [getattr(self, name) for name in THIRD_LEVEL_FIELDS]
        n = len(self.level_labels)
        if n not in (2, 3):
            raise DatasetValidationError(f"dataset must have 2 or 3 levels, got {n}")
        if n == 3:
            if any(v is None for v in third):
                raise DatasetValidationError("3-level dataset requires the complete third-level block")
            for name in THIRD_LEVEL_FIELDS:
                object.__setattr__(self, name, complex(getattr(self, name)))
        elif any(v is not None for v in third):
            raise DatasetValidationError("third-level block given for a 2-level dataset")

    @property
    def levels(self) -> int:
        return len(self.level_labels)

    def replace(self, **changes) -> "AtomDataset":
        """Return a copy with some fields changed (datasets are immutable)."""
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return AtomDataset(**values)

    def two_level(self) -> "AtomDataset":
        """The 1-2 subsystem of a 3-level dataset."""
        if self.levels == 2:
            return self
        return self.replace(level_labels=self.level_labels[:2],
                            **{name: None for name in THIRD_LEVEL_FIELDS})

    def symmetrized(self) -> "AtomDataset":
        """Copy with Im(a12) replaced by the exact geometric mean sqrt(Im a1(w1) Im a2(w2))."""
        im = math.sqrt(self.a1w1.imag * self.a2w2.imag)
        return self.replace(a12=complex(self.a12.real, im))

    def checksum(self) -> str:
        return hashlib.sha256(dump_dataset(self).encode("utf-8")).hexdigest()


_BUILTIN = {
    "He2": dict(
        level_labels=("1s2s", "1s4s"), omega1_ev=8.44, omega2_ev=1.17,
        a1w1=complex(-30.42, 22.65), a1w2=complex(-236.6, 0.0),
        a2w1=complex(-45.66, 3.21), a2w2=complex(-479.96, 124.55),
        a12=complex(38.74, 53.07),
    ),
    "H2": dict(
        level_labels=("2s", "5s"), omega1_ev=4.02, omega2_ev=1.17,
        a1w1=complex(-45.56, 27.29), a1w2=complex(179.92, 0.0),
        a2w1=complex(-45.66, 1.78), a2w2=complex(-513.76, 93.83),
        a12=complex(6.56, 50.60),
    ),
}
_BUILTIN["H3"] = dict(
    _BUILTIN["H2"], level_labels=("2s", "5s", "5d"),
    a3w1=complex(-43.26, 0.42), a3w2=complex(-405.9, 81.8),
    a23w1=complex(0.74, 0.21), a23w2=complex(68.61, 21.63),
    a13=complex(6.15, 11.69),
)

BUILTIN_NAMES = tuple(_BUILTIN)


def builtin_dataset(name: str) -> AtomDataset:
    """Return one of the bundled datasets: ``He2``, ``H2`` or ``H3``."""
    try:
        values = _BUILTIN[name]
    except KeyError:
        raise UnknownDatasetError(
            f"unknown atom dataset {name!r}; valid ids: {', '.join(BUILTIN_NAMES)}") from None
    return AtomDataset(name=name, **values)


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass" | "warn" | "fail"
    value: float
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    dataset: str
    checks: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = [f"dataset {self.dataset}"]
        for c in self.checks:
            lines.append(f"  [{c.status:4s}] {c.name}: {c.detail}")
        return "\n".join(lines)


def factorization_residual(ds: AtomDataset) -> float:
    """Relative mismatch |Im a12 - sqrt(Im a1(w1) Im a2(w2))| / Im a12."""
    prod = ds.a1w1.imag * ds.a2w2.imag
    geo = math.sqrt(prod) if prod >= 0 else float("nan")
    ref = abs(ds.a12.imag) if ds.a12.imag != 0 else geo
    if ref == 0:
        return 0.0
    return abs(ds.a12.imag - geo) / ref


def validate(ds: AtomDataset) -> ValidationReport:
    """Physical-consistency checks; never raises, failures are in the report."""
    checks = []

    diag = ["a1w1", "a1w2", "a2w1", "a2w2"]
    if ds.levels == 3:
        diag += ["a3w1", "a3w2"]
    negative = [n for n in diag if getattr(ds, n).imag < 0]
    checks.append(Check(
        "imag_sign", "fail" if negative else "pass", float(len(negative)),
        "negative Im on " + ", ".join(negative) if negative
        else "all diagonal imaginary parts >= 0"))

    res = factorization_residual(ds)
    if not math.isfinite(res) or res > FACTORIZATION_FAIL:
        status = "fail"
    elif res > FACTORIZATION_WARN:
        status = "warn"
    else:
        status = "pass"
    geo = math.sqrt(max(ds.a1w1.imag * ds.a2w2.imag, 0.0))
    checks.append(Check(
        "factorization", status, res,
        f"Im a12 = {ds.a12.imag:g} vs sqrt(Im a1(w1) Im a2(w2)) = {geo:.4f}, "
        f"residual {100 * res:.3f}%"))

    if ds.a1w1.imag > 0:
        ratio = ds.a2w1.imag / ds.a1w1.imag
        status = "warn" if ratio >= WIDTH_RATIO_WARN else "pass"
        detail = f"Gamma_2^(1)/Gamma_1 = {ratio:.3g}"
    else:
        ratio, status, detail = float("inf"), "warn", "Im a1(w1) = 0: level 1 is not ionized by w1"
    checks.append(Check("width_ratio", status, ratio, detail))

    zero = ds.a1w2.imag == 0
    checks.append(Check(
        "optimal_enabled", "pass" if zero else "warn", ds.a1w2.imag,
        "Im a1(w2) = 0, closed-form optimum available" if zero
        else "Im a1(w2) != 0, use numerical width minimization"))

    return ValidationReport(ds.name, tuple(checks))


# --------------------------------------------------------------------------
# JSON documents

def dataset_to_dict(ds: AtomDataset) -> dict:
    doc = {
        "name": ds.name,
        "levels": list(ds.level_labels),
        "omega1_ev": ds.omega1_ev,
        "omega2_ev": ds.omega2_ev,
        "alpha": {n: [getattr(ds, n).real, getattr(ds, n).imag] for n in TWO_LEVEL_FIELDS},
    }
    if ds.levels == 3:
        doc["third_level"] = {n: [getattr(ds, n).real, getattr(ds, n).imag]
                              for n in THIRD_LEVEL_FIELDS}
    return doc


def dump_dataset(ds: AtomDataset) -> str:
    return json.dumps(dataset_to_dict(ds), indent=2)


def _number(value, fieldname):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetParseError(f"expected a number, got {value!r}", field=fieldname)
    if not math.isfinite(value):
        raise DatasetParseError("non-finite number", field=fieldname)
    return float(value)


def _complex(value, fieldname):
    if not isinstance(value, list) or len(value) != 2:
        raise DatasetParseError("expected [re, im]", field=fieldname)
    return complex(_number(value[0], fieldname + "[0]"), _number(value[1], fieldname + "[1]"))


def _block(doc, key, names):
    block = doc.get(key)
    if not isinstance(block, dict):
        raise DatasetParseError("missing or not an object", field=key)
    unknown = set(block) - set(names)
    if unknown:
        raise DatasetParseError("unexpected entries " + ", ".join(sorted(unknown)), field=key)
    out = {}
    for n in names:
        if n not in block:
            raise DatasetParseError("required field missing", field=f"{key}.{n}")
        out[n] = _complex(block[n], f"{key}.{n}")
    return out


def parse_dataset(text: str, *, check: bool = True) -> AtomDataset:
    """Parse a JSON dataset document.

    With ``check`` the result is passed through :func:`validate` and any
    failed check raises :class:`DatasetValidationError`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise DatasetParseError("top level must be an object")

    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise DatasetParseError("required string", field="name")
    levels = doc.get("levels")
    if not isinstance(levels, list) or not all(isinstance(v, str) for v in levels):
        raise DatasetParseError("required list of level names", field="levels")
    omegas = {}
    for key in ("omega1_ev", "omega2_ev"):
        if key not in doc:
            raise DatasetParseError("required field missing", field=key)
        omegas[key] = _number(doc[key], key)

    values = _block(doc, "alpha", TWO_LEVEL_FIELDS)
    if "third_level" in doc and doc["third_level"] is not None:
        if len(levels) != 3:
            raise DatasetParseError("third_level given but levels has %d entries" % len(levels),
                                    field="third_level")
        values.update(_block(doc, "third_level", THIRD_LEVEL_FIELDS))
    elif len(levels) == 3:
        raise DatasetParseError("3 levels require a third_level block", field="third_level")
    elif len(levels) != 2:
        raise DatasetParseError("must list 2 or 3 levels", field="levels")

    ds = AtomDataset(name=name, level_labels=tuple(levels), **omegas, **values)
    if check:
        report = validate(ds)
        if not report.ok:
            names = ", ".join(c.name for c in report.failures)
            raise DatasetValidationError(f"dataset {name!r} failed checks: {names}", report)
    return ds


def load_dataset(source, *, check: bool = True) -> AtomDataset:
    """Load a dataset from a path or from the JSON text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    return parse_dataset(text, check=check)


def resolve_dataset(ref: str) -> AtomDataset:
    """Builtin id or path to a JSON document."""
    if ref in _BUILTIN:
        return builtin_dataset(ref)
    if Path(ref).is_file():
        return load_dataset(Path(ref))
    raise UnknownDatasetError(
        f"{ref!r} is neither a builtin dataset ({', '.join(BUILTIN_NAMES)}) nor a file")

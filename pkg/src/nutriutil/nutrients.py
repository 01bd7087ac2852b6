"""Nutrient threshold data: loading, validation, and per-sex resolution.

The bundled dataset records, for each nutrient, the recommended daily
allowance (RDA) for men and women plus the tolerable upper intake level
(UL) where one is established. Quantities stay in the unit the source
lists (mcg, mg, or g); cross-nutrient arithmetic uses milligrams as the
canonical unit.

Known quirks of the bundled data are surfaced by ``validate_table``
rather than silently corrected: magnesium declares a UL below its RDA,
phosphorus declares a UL that only makes sense under a 1000x unit shift,
and water and sulfur carry no numeric allowance at all.
"""

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources

from .errors import (
    DuplicateIdError,
    MissingThresholdError,
    TableParseError,
    UnknownNutrientError,
)

TABLE_HEADER = ("id", "name", "unit", "rda_men", "rda_women", "ul", "notes")

_BUNDLED_TABLE = "nutrient_thresholds.csv"

# A declared UL below the RDA is treated as a plausible unit slip (rather
# than a hard inconsistency) when multiplying it by 1000 lands the UL/RDA
# ratio inside this window.
_SHIFT_RATIO_MIN = 1.0
_SHIFT_RATIO_MAX = 100.0


class Unit(Enum):
    """Mass units accepted by the table format."""

    MCG = "mcg"
    MG = "mg"
    G = "g"

    @property
    def mg_factor(self) -> float:
        """Milligrams per one of this unit."""
        return _MG_PER_UNIT[self]


_MG_PER_UNIT = {Unit.MCG: 0.001, Unit.MG: 1.0, Unit.G: 1000.0}


class Sex(Enum):
    MEN = "men"
    WOMEN = "women"


class UlKind(Enum):
    """Whether a nutrient declares a tolerable upper intake level."""

    DEFINED = "defined"
    NONE = "none"


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"


def to_canonical(quantity: float, unit: Unit) -> float:
    """Convert a quantity expressed in ``unit`` to milligrams."""
    return quantity * unit.mg_factor


def from_canonical(quantity_mg: float, unit: Unit) -> float:
    """Convert a quantity in milligrams to ``unit``."""
    return quantity_mg / unit.mg_factor


@dataclass(frozen=True)
class NutrientProfile:
    """One nutrient's thresholds as listed in the source dataset.

    Missing cells are ``None``, never zero. The upper level, when
    present, applies to both sexes.
    """

    id: str
    name: str
    unit: Unit
    rda_men: float | None = None
    rda_women: float | None = None
    ul: float | None = None
    notes: str = ""

    def __post_init__(self):
        for label, value in (
            ("rda_men", self.rda_men),
            ("rda_women", self.rda_women),
            ("ul", self.ul),
        ):
            if value is not None and not value > 0:
                raise ValueError(
                    f"{self.id}: {label} must be strictly positive, got {value!r}"
                )

    @property
    def ul_kind(self) -> UlKind:
        return UlKind.DEFINED if self.ul is not None else UlKind.NONE

    def rda_for(self, sex: Sex) -> float | None:
        return self.rda_men if sex is Sex.MEN else self.rda_women

    @property
    def max_rda(self) -> float | None:
        """Largest allowance across sexes, or None if neither is listed."""
        values = [v for v in (self.rda_men, self.rda_women) if v is not None]
        return max(values) if values else None


@dataclass
class NutrientTable:
    """Ordered collection of nutrient profiles keyed by id."""

    entries: dict[str, NutrientProfile]
    source: str = "<memory>"
    checksum: str = ""

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, nutrient_id: str) -> bool:
        return nutrient_id in self.entries

    def __getitem__(self, nutrient_id: str) -> NutrientProfile:
        try:
            return self.entries[nutrient_id]
        except KeyError:
            raise UnknownNutrientError(nutrient_id) from None

    def get(self, nutrient_id: str) -> NutrientProfile | None:
        return self.entries.get(nutrient_id)

    def ids(self) -> list[str]:
        return list(self.entries)

    def dumps(self) -> str:
        """Serialize back to the CSV table format."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for p in self:
            writer.writerow(
                [
                    p.id,
                    p.name,
                    p.unit.value,
                    _format_cell(p.rda_men),
                    _format_cell(p.rda_women),
                    _format_cell(p.ul),
                    p.notes,
                ]
            )
        return buf.getvalue()

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.dumps())


def _format_cell(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:g}"


def _parse_cell(raw: str, path, line: int, column: str) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise TableParseError(
            path, line, f"column {column!r}: not a number: {raw!r}"
        ) from None


def _parse_rows(rows, path) -> dict[str, NutrientProfile]:
    entries: dict[str, NutrientProfile] = {}
    for line, row in rows:
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(TABLE_HEADER):
            raise TableParseError(
                path,
                line,
                f"expected {len(TABLE_HEADER)} columns, got {len(row)}",
            )
        nutrient_id = row[0].strip()
        if not nutrient_id:
            raise TableParseError(path, line, "empty nutrient id")
        if nutrient_id in entries:
            raise DuplicateIdError(path, line, f"duplicate nutrient id {nutrient_id!r}")
        unit_raw = row[2].strip()
        try:
            unit = Unit(unit_raw)
        except ValueError:
            raise TableParseError(
                path, line, f"unknown unit {unit_raw!r} (expected mcg, mg, or g)"
            ) from None
        try:
            profile = NutrientProfile(
                id=nutrient_id,
                name=row[1].strip(),
                unit=unit,
                rda_men=_parse_cell(row[3], path, line, "rda_men"),
                rda_women=_parse_cell(row[4], path, line, "rda_women"),
                ul=_parse_cell(row[5], path, line, "ul"),
                notes=row[6].strip(),
            )
        except ValueError as exc:
            raise TableParseError(path, line, str(exc)) from None
        entries[nutrient_id] = profile
    return entries


def _load_from_text(text: str, source: str) -> NutrientTable:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if rows and tuple(cell.strip() for cell in rows[0]) != TABLE_HEADER:
        raise TableParseError(
            source, 1, f"bad header: expected {','.join(TABLE_HEADER)}"
        )
    body = [(line, row) for line, row in enumerate(rows, start=1)][1:]
    checksum = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return NutrientTable(
        entries=_parse_rows(body, source), source=source, checksum=checksum
    )


def load_nutrient_table(path) -> NutrientTable:
    """Load a nutrient threshold table from a CSV file.

    Empty cells become absent fields. Raises ``TableParseError`` (with a
    line number) on malformed rows and ``DuplicateIdError`` on repeated
    ids. An empty file yields a table with zero entries.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    if text.strip() == "":
        return NutrientTable(entries={}, source=str(path), checksum=hashlib.sha256(text.encode("utf-8")).hexdigest())
    return _load_from_text(text, str(path))


def load_default_table() -> NutrientTable:
    """Load the nutrient threshold table bundled with the package."""
    text = (
        resources.files(__package__)
        .joinpath("data", _BUNDLED_TABLE)
        .read_text(encoding="utf-8")
    )
    return _load_from_text(text, f"bundled:{_BUNDLED_TABLE}")


@dataclass(frozen=True)
class Finding:
    """One validation finding for one nutrient row."""

    nutrient_id: str
    severity: Severity
    code: str
    message: str

    def render(self) -> str:
        return f"{self.severity.value} {self.code} {self.nutrient_id}: {self.message}"


@dataclass
class ValidationReport:
    """Deterministic list of findings for a table; empty means consistent."""

    findings: list[Finding] = field(default_factory=list)

    @property
    def has_errors(self) -> bool:
        return any(f.severity is Severity.ERROR for f in self.findings)

    def by_code(self, code: str) -> list[Finding]:
        return [f for f in self.findings if f.code == code]

    def render(self) -> str:
        return "\n".join(f.render() for f in self.findings)


def validate_table(table: NutrientTable) -> ValidationReport:
    """Check a table for internal anomalies.

    Emits, per row and in table order:

    * ``UL_BELOW_RDA`` (error): the declared upper level sits below the
      larger of the two allowances and no unit slip can explain it.
    * ``UNIT_SUSPECT`` (warning): the upper level sits below the
      allowance under the stated unit but is plausible under a 1000x
      unit shift; the value is kept verbatim.
    * ``MISSING_RDA`` (info): no allowance is listed for either sex.

    Always returns a report; never raises.
    """
    findings: list[Finding] = []
    for profile in table:
        rmax = profile.max_rda
        if rmax is None:
            findings.append(
                Finding(
                    profile.id,
                    Severity.INFO,
                    "MISSING_RDA",
                    "no recommended daily allowance for either sex; "
                    "supply thresholds before evaluating this nutrient",
                )
            )
            continue
        if profile.ul is not None and profile.ul < rmax:
            unit = profile.unit.value
            shifted_ratio = profile.ul * 1000.0 / rmax
            if _SHIFT_RATIO_MIN <= shifted_ratio <= _SHIFT_RATIO_MAX:
                findings.append(
                    Finding(
                        profile.id,
                        Severity.WARNING,
                        "UNIT_SUSPECT",
                        f"upper level {profile.ul:g} {unit} is below the "
                        f"allowance {rmax:g} {unit} but plausible under a "
                        "1000x unit shift; value kept verbatim",
                    )
                )
            else:
                findings.append(
                    Finding(
                        profile.id,
                        Severity.ERROR,
                        "UL_BELOW_RDA",
                        f"upper level {profile.ul:g} {unit} is below the "
                        f"allowance {rmax:g} {unit}; the threshold model is "
                        "undefined for this row",
                    )
                )
    return ValidationReport(findings)


@dataclass(frozen=True)
class ResolvedProfile:
    """Thresholds for one nutrient and one sex, ready for evaluation.

    ``rda`` and ``ul`` are expressed in ``unit``. ``ul`` is ``None``
    when the source defines no usable upper level; ``ul_suppressed``
    marks a declared upper level that was dropped because it lies below
    the row's allowance.
    """

    id: str
    name: str
    unit: Unit
    rda: float
    ul: float | None = None
    ul_suppressed: bool = False

    def __post_init__(self):
        if not self.rda > 0:
            raise ValueError(f"{self.id}: allowance must be strictly positive")

    @property
    def rda_mg(self) -> float:
        return to_canonical(self.rda, self.unit)

    @property
    def ul_mg(self) -> float | None:
        return None if self.ul is None else to_canonical(self.ul, self.unit)

    @property
    def plateau_width(self) -> float:
        """Width of the full-satisfaction interval in ``unit``."""
        return math.inf if self.ul is None else self.ul - self.rda

    def to_mg(self, amount: float) -> float:
        return to_canonical(amount, self.unit)

    def from_mg(self, amount_mg: float) -> float:
        return from_canonical(amount_mg, self.unit)


def profile_for(
    table: NutrientTable,
    nutrient_id: str,
    sex: Sex,
    *,
    trust_ul: bool = False,
) -> ResolvedProfile:
    """Resolve one nutrient's thresholds for one sex.

    A declared upper level below the row's largest allowance is dropped
    (the nutrient then behaves as if it had no upper level) unless
    ``trust_ul`` is set, in which case the raw value is kept and later
    evaluation will reject the malformed interval.

    Raises ``UnknownNutrientError`` for unknown ids and
    ``MissingThresholdError`` when the requested sex has no allowance.
    """
    profile = table[nutrient_id]
    rda = profile.rda_for(sex)
    if rda is None:
        raise MissingThresholdError(
            f"{nutrient_id}: no recommended daily allowance for {sex.value}"
        )
    ul = profile.ul
    suppressed = False
    if ul is not None and ul < profile.max_rda and not trust_ul:
        ul = None
        suppressed = True
    return ResolvedProfile(
        id=profile.id,
        name=profile.name,
        unit=profile.unit,
        rda=rda,
        ul=ul,
        ul_suppressed=suppressed,
    )

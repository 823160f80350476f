"""Core CERIF domain types: partial dates, translated text and the three record kinds.

Record objects are permissive value containers.  The constructors normalize
sequence fields to tuples so every record is immutable and hashable, but they
do not reject incomplete content; completeness is the job of the validator,
which has to be able to look at broken records in order to report them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

from .errors import FormatError, UnknownCode

#: Record-type tokens allowed in relation references and exchange file names.
RECORD_TYPES = ("project", "person", "orgunit", "equipment", "result",
                "publication", "patent")

LANGUAGE_RE = re.compile(r"^[a-z]{2}$")
_WS_RUN = re.compile(r"\s+")


def collapse_ws(text: str) -> str:
    """Trim *text* and collapse interior whitespace runs to single spaces."""
    return _WS_RUN.sub(" ", text).strip()


def split_semicolon_list(text: str) -> list[str]:
    """Split a semicolon-separated value into trimmed, non-empty items."""
    return [item for item in (collapse_ws(part) for part in text.split(";")) if item]


def join_semicolon_list(items) -> str:
    return "; ".join(items)


class TranslationType(Enum):
    """How a language-tagged value was produced."""

    ORIGINAL = "O"
    HUMAN = "H"
    MACHINE = "M"


def normalize_translation_code(token: str,
                               warnings: list[str] | None = None) -> TranslationType:
    """Map a one-letter translation-type code to its enum value.

    The digit '0' is accepted as a legacy spelling of 'O'; when that happens a
    note is appended to *warnings* if a list was supplied.  Anything else
    outside O/H/M raises UnknownCode.
    """
    tok = token.strip()
    if tok == "0":
        if warnings is not None:
            warnings.append("translation code '0' normalized to O (original)")
        return TranslationType.ORIGINAL
    try:
        return TranslationType(tok.upper())
    except ValueError:
        raise UnknownCode(f"unknown translation code {token!r}") from None


class ProjectStatus(Enum):
    EXECUTION = "Execution"
    ACCEPTED = "Accepted"
    COMPLETED = "Completed"
    STARTED = "Started"


STATUS_BY_TOKEN = {s.value: s for s in ProjectStatus}


@dataclass(frozen=True)
class PartialDate:
    """A calendar date whose day, or day and month, may be unknown.

    The wire form is day-first with unknown leading fields omitted entirely,
    never written as zeros: "06.2000" is a month, "00.06.2000" is rejected.
    """

    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self) -> None:
        if self.day is not None and self.month is None:
            raise FormatError("a day without a month is not representable")
        if not 1000 <= self.year <= 9999:
            raise FormatError(f"year {self.year} outside 1000-9999")
        if self.month is not None and not 1 <= self.month <= 12:
            raise FormatError(f"month {self.month} outside 1-12")
        if self.day is not None and not 1 <= self.day <= 31:
            raise FormatError(f"day {self.day} outside 1-31")

    @property
    def is_full(self) -> bool:
        return self.day is not None

    @property
    def is_year_only(self) -> bool:
        return self.month is None

    def earliest(self) -> tuple[int, int, int]:
        """Lower bound of the range of exact dates this value could denote."""
        return (self.year, self.month or 1, self.day or 1)

    def latest(self) -> tuple[int, int, int]:
        """Upper bound of the range of exact dates this value could denote."""
        return (self.year, self.month or 12, self.day or 31)

    def certainly_before(self, other: "PartialDate") -> bool:
        """True when every exact date this value could denote precedes every
        exact date *other* could denote."""
        return self.latest() < other.earliest()

    def __str__(self) -> str:
        return format_partial_date(self)


def _date_fields(text: str, sep: str) -> list[int]:
    parts = collapse_ws(text).split(sep)
    if not 1 <= len(parts) <= 3:
        raise FormatError(f"expected 1-3 date fields, got {len(parts)}: {text!r}")
    values = []
    for part in parts:
        p = part.strip()
        if not p or not p.isdigit():
            raise FormatError(f"non-numeric date field {part!r} in {text!r}")
        n = int(p)
        if n == 0:
            raise FormatError(
                f"zero date field in {text!r}; omit an unknown day or month instead")
        values.append(n)
    return values


def parse_partial_date(text: str) -> PartialDate:
    """Parse a day-first partial date: DD.MM.YYYY, MM.YYYY or YYYY."""
    values = _date_fields(text, ".")
    values.reverse()
    year = values[0]
    month = values[1] if len(values) > 1 else None
    day = values[2] if len(values) > 2 else None
    return PartialDate(year=year, month=month, day=day)


def parse_iso_date(text: str) -> PartialDate:
    """Parse a year-first dash-separated date: YYYY-MM-DD, YYYY-MM or YYYY.

    Legacy export headers use this ordering; exchange file names and record
    bodies use the day-first form.  The two coexist and must not be confused.
    """
    values = _date_fields(text, "-")
    year = values[0]
    month = values[1] if len(values) > 1 else None
    day = values[2] if len(values) > 2 else None
    return PartialDate(year=year, month=month, day=day)


def format_partial_date(d: PartialDate) -> str:
    """Emit exactly the fields present, day-first, zero-padded."""
    if d.day is not None:
        return f"{d.day:02d}.{d.month:02d}.{d.year:04d}"
    if d.month is not None:
        return f"{d.month:02d}.{d.year:04d}"
    return f"{d.year:04d}"


def default_status(end: PartialDate | None, export_date: PartialDate) -> ProjectStatus:
    """Status to assume for a converted project whose source carries none.

    A project whose end date is certainly over by the export date is reported
    as Completed; anything still possibly running is reported as Execution.
    """
    if end is not None and end.certainly_before(export_date):
        return ProjectStatus.COMPLETED
    return ProjectStatus.EXECUTION


class RecordKey(NamedTuple):
    kind: str
    id: str


@dataclass(frozen=True)
class TranslatedText:
    """One language variant of a text value.

    translation is None when the wire carried no recognizable code; the
    validator reports that as an invariant breach rather than the parser
    refusing the whole document.
    """

    language: str
    translation: TranslationType | None
    text: str


@dataclass(frozen=True)
class ExpertSkill:
    skill: str
    role: str | None = None


@dataclass(frozen=True)
class Contact:
    telephone: str | None = None
    email: str | None = None
    uri: str | None = None

    @property
    def is_empty(self) -> bool:
        return self.telephone is None and self.email is None and self.uri is None


@dataclass(frozen=True)
class Relation:
    """A directed, role-labelled edge between two records.

    mandatory marks a dependency: a record whose mandatory relation points at
    a discarded record is itself discarded by the cascade.
    """

    source: RecordKey
    target: RecordKey
    role: str
    mandatory: bool = False

    def sort_key(self):
        return (self.source, self.target, self.role, self.mandatory)


@dataclass(frozen=True)
class OuOuRelation:
    """A relation between org-units; target names the other unit's id."""

    target: str
    role: str


def _frozen_tuple(obj, name) -> None:
    value = getattr(obj, name)
    if not isinstance(value, tuple):
        object.__setattr__(obj, name, tuple(value))


@dataclass(frozen=True)
class Project:
    """A research project.

    status holds a plain string when the wire carried a token outside the
    four accepted ones, so the validator can report it verbatim.
    """

    id: str
    status: ProjectStatus | str | None = None
    start: PartialDate | None = None
    end: PartialDate | None = None
    uri: str | None = None
    prize_awards: tuple[str, ...] = ()
    titles: tuple[TranslatedText, ...] = ()
    abstracts: tuple[TranslatedText, ...] = ()
    keywords: tuple[TranslatedText, ...] = ()
    relations: tuple[Relation, ...] = ()

    def __post_init__(self) -> None:
        for name in ("prize_awards", "titles", "abstracts", "keywords", "relations"):
            _frozen_tuple(self, name)

    @property
    def key(self) -> RecordKey:
        return RecordKey("project", self.id)


@dataclass(frozen=True)
class Person:
    id: str
    family_names: str = ""
    first_names: str = ""
    sex: str | None = None
    prize_awards: tuple[str, ...] = ()
    uri: str | None = None
    expert_skills: tuple[ExpertSkill, ...] = ()
    contacts: tuple[Contact, ...] = ()

    def __post_init__(self) -> None:
        for name in ("prize_awards", "expert_skills", "contacts"):
            _frozen_tuple(self, name)

    @property
    def key(self) -> RecordKey:
        return RecordKey("person", self.id)


@dataclass(frozen=True)
class OrgUnit:
    """An organisational unit.

    descriptions is an extension field filled by the legacy converter; it is
    carried under an extension element on the wire and is absent from records
    that never passed through that converter.
    """

    id: str
    acronym: str | None = None
    prize_award: str | None = None
    url: str | None = None
    names: tuple[TranslatedText, ...] = ()
    ou_relations: tuple[OuOuRelation, ...] = ()
    expert_skills: tuple[ExpertSkill, ...] = ()
    descriptions: tuple[TranslatedText, ...] = ()

    def __post_init__(self) -> None:
        for name in ("names", "ou_relations", "expert_skills", "descriptions"):
            _frozen_tuple(self, name)

    @property
    def key(self) -> RecordKey:
        return RecordKey("orgunit", self.id)


Record = Union[Project, Person, OrgUnit]

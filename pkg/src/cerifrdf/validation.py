"""Record validation, the mandatory-field discard cascade and uniqueness checks.

Discarding is a least fixed point: records that fail their own invariants go
first, then any record whose mandatory relation points at a discarded record
follows, repeated until nothing changes.  Dangling references to records that
were never in the document are warnings, not discards, because documents may
legitimately point across file boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import (
    LANGUAGE_RE,
    OrgUnit,
    Person,
    Project,
    ProjectStatus,
    Record,
    RecordKey,
    RECORD_TYPES,
    Relation,
    TranslatedText,
)
from .rdfxml import RecordSet


@dataclass(frozen=True)
class Violation:
    """One invariant breach inside a record.

    field names the record field held responsible; code is "missing" for an
    absent or empty mandatory field and "invalid" for a present but unusable
    value.
    """

    field: str
    code: str
    message: str


@dataclass(frozen=True)
class MissingMandatoryField:
    field: str

    def __str__(self) -> str:
        return f"missing-mandatory-field:{self.field}"


@dataclass(frozen=True)
class CascadeFrom:
    key: RecordKey

    def __str__(self) -> str:
        return f"cascade-from:{self.key.kind}:{self.key.id}"


DiscardReason = Union[MissingMandatoryField, CascadeFrom]


@dataclass
class DiscardReport:
    kept: RecordSet
    discarded: list[tuple[RecordKey, DiscardReason]]

    @property
    def ok(self) -> bool:
        return not self.discarded

    def to_lines(self) -> list[str]:
        return [f"DISCARD {key.kind} {key.id} {reason}"
                for key, reason in self.discarded]


def _check_translated(prefix: str, items: tuple[TranslatedText, ...],
                      out: list[Violation]) -> None:
    for i, tt in enumerate(items):
        where = f"{prefix}[{i}]"
        if not LANGUAGE_RE.match(tt.language):
            out.append(Violation(prefix, "invalid",
                                 f"{where}: language {tt.language!r} is not a "
                                 "two-letter lowercase code"))
        if tt.translation is None:
            out.append(Violation(prefix, "invalid",
                                 f"{where}: translation type missing or unrecognized"))
        if not tt.text:
            out.append(Violation(prefix, "invalid", f"{where}: empty text"))


def _check_relations(prefix: str, relations: tuple[Relation, ...],
                     out: list[Violation]) -> None:
    for i, rel in enumerate(relations):
        where = f"{prefix}[{i}]"
        if rel.source == rel.target:
            out.append(Violation(prefix, "invalid",
                                 f"{where}: relation with identical endpoints"))
        for key in (rel.source, rel.target):
            if key.kind not in RECORD_TYPES:
                out.append(Violation(prefix, "invalid",
                                     f"{where}: unknown record type {key.kind!r}"))
            if not key.id:
                out.append(Violation(prefix, "invalid",
                                     f"{where}: endpoint without an id"))
        if not rel.role:
            out.append(Violation(prefix, "invalid", f"{where}: empty role"))


def validate_record(record: Record) -> list[Violation]:
    """Every missing mandatory field and type-invariant breach in *record*."""
    out: list[Violation] = []
    if not record.id:
        out.append(Violation("id", "missing", "empty identifier"))
    if isinstance(record, Project):
        if record.status is None:
            out.append(Violation("status", "missing", "no status value"))
        elif not isinstance(record.status, ProjectStatus):
            out.append(Violation("status", "invalid",
                                 f"status token {record.status!r} not one of the "
                                 "four accepted values"))
        if not record.titles:
            out.append(Violation("titles", "missing", "no titles"))
        if not record.abstracts:
            out.append(Violation("abstracts", "missing", "no abstracts"))
        _check_translated("titles", record.titles, out)
        _check_translated("abstracts", record.abstracts, out)
        _check_translated("keywords", record.keywords, out)
        _check_relations("relations", record.relations, out)
    elif isinstance(record, Person):
        if not record.family_names:
            out.append(Violation("family_names", "missing", "no family names"))
        if record.sex is not None and record.sex not in ("M", "F"):
            out.append(Violation("sex", "invalid",
                                 f"sex code {record.sex!r} is neither M nor F"))
        for i, sk in enumerate(record.expert_skills):
            if not sk.skill:
                out.append(Violation("expert_skills", "invalid",
                                     f"expert_skills[{i}]: empty skill"))
        for i, contact in enumerate(record.contacts):
            if contact.is_empty:
                out.append(Violation("contacts", "invalid",
                                     f"contacts[{i}]: no channel present"))
    elif isinstance(record, OrgUnit):
        if not record.names:
            out.append(Violation("names", "missing", "no names"))
        _check_translated("names", record.names, out)
        _check_translated("descriptions", record.descriptions, out)
        for i, rel in enumerate(record.ou_relations):
            if not rel.target:
                out.append(Violation("ou_relations", "invalid",
                                     f"ou_relations[{i}]: empty target"))
            if not rel.role:
                out.append(Violation("ou_relations", "invalid",
                                     f"ou_relations[{i}]: empty role"))
        for i, sk in enumerate(record.expert_skills):
            if not sk.skill:
                out.append(Violation("expert_skills", "invalid",
                                     f"expert_skills[{i}]: empty skill"))
    return out


def lint_record(record: Record, language_codes=None) -> list[str]:
    """Non-fatal findings: suspicious but admissible content."""
    notes: list[str] = []
    if isinstance(record, Project):
        if (record.start is not None and record.end is not None
                and record.end.certainly_before(record.start)):
            notes.append(f"project {record.id}: end date {record.end} lies before "
                         f"start date {record.start}")
    if language_codes is not None:
        groups: list[tuple[str, tuple[TranslatedText, ...]]] = []
        if isinstance(record, Project):
            groups = [("titles", record.titles), ("abstracts", record.abstracts),
                      ("keywords", record.keywords)]
        elif isinstance(record, OrgUnit):
            groups = [("names", record.names), ("descriptions", record.descriptions)]
        for name, items in groups:
            for i, tt in enumerate(items):
                if LANGUAGE_RE.match(tt.language) and tt.language not in language_codes:
                    notes.append(f"{record.key.kind} {record.id}: {name}[{i}] uses "
                                 f"unassigned language code {tt.language!r}")
    return notes


def apply_discard_cascade(rs: RecordSet, *,
                          missing_targets_discard: bool = False) -> DiscardReport:
    """Split *rs* into kept and discarded records.

    Seeds are records with a non-empty validate_record result.  The cascade
    then repeatedly discards any record whose mandatory relation targets an
    already-discarded record, until stable.  With missing_targets_discard
    set, a mandatory relation whose target never was in the set also pulls
    its source down; by default such targets only matter to lint.
    """
    reasons: dict[RecordKey, DiscardReason] = {}
    for key in sorted(rs.records):
        problems = validate_record(rs.records[key])
        if problems:
            reasons[key] = MissingMandatoryField(problems[0].field)

    relations = sorted(set(rs.all_relations()), key=Relation.sort_key)
    changed = True
    while changed:
        changed = False
        wave: dict[RecordKey, CascadeFrom] = {}
        for rel in relations:
            if not rel.mandatory:
                continue
            target_down = (rel.target in reasons
                           or (missing_targets_discard and rel.target not in rs.records))
            if (target_down and rel.source in rs.records
                    and rel.source not in reasons and rel.source not in wave):
                wave[rel.source] = CascadeFrom(rel.target)
        if wave:
            reasons.update(wave)
            changed = True

    kept = RecordSet(namespaces=dict(rs.namespaces))
    for key, record in rs.records.items():
        if key not in reasons:
            kept.records[key] = record
    kept.relations = [rel for rel in rs.relations if rel.source not in reasons]
    discarded = [(key, reasons[key]) for key in sorted(reasons)]
    return DiscardReport(kept=kept, discarded=discarded)


def check_document_uniqueness(data: str | bytes, *, cerif_ns=None) -> list[Violation]:
    """Report each (type, id) declared more than once in the raw document."""
    from .rdfxml import CERIF_NS, scan_duplicate_keys

    duplicates = scan_duplicate_keys(data, cerif_ns=cerif_ns or CERIF_NS)
    seen: set[RecordKey] = set()
    out: list[Violation] = []
    for key in duplicates:
        if key in seen:
            continue
        seen.add(key)
        out.append(Violation("id", "invalid",
                             f"{key.kind} {key.id} declared more than once"))
    return out

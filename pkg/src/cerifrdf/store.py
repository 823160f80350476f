"""A desk-scale store for gathered records, with provenance and triple queries.

Merging keeps at most one current version per (type, id): the version with
the latest fetched date wins, same-day conflicts fall to the
lexicographically greatest source, and every superseded version stays on an
in-memory history list.  The current map therefore does not depend on the
order files arrive in.  Queries flatten the store to subject-predicate-object
triples and match patterns through optional equivalence classes of terms.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import FormatError, InvariantViolation
from .model import (
    OrgUnit,
    PartialDate,
    Person,
    Project,
    Record,
    RecordKey,
    Relation,
    TranslatedText,
    format_partial_date,
    parse_partial_date,
)
from .rdfxml import CERIF_NS, RecordSet, parse_document, serialize_document

Triple = tuple[str, str, str]

INDEX_FILE = "provenance.index"
RELATIONS_FILE = "_relations.rdf"


class SourceKind(Enum):
    ALL = "all"
    PER_OBJECT = "per-object"
    ANNUAL = "annual"
    CHANGE = "change"
    EXTRACTED = "extracted"


@dataclass(frozen=True)
class Provenance:
    source: str
    fetched: PartialDate
    kind: SourceKind

    def __post_init__(self) -> None:
        if not self.source:
            raise InvariantViolation("provenance without a source")
        if not self.fetched.is_full:
            raise InvariantViolation("provenance date must be a full date")


@dataclass(frozen=True)
class TriplePattern:
    """A triple with any position replaced by None as a wildcard."""

    subject: str | None = None
    predicate: str | None = None
    object: str | None = None

    @classmethod
    def parse(cls, text: str) -> "TriplePattern":
        inner = text.strip()
        if inner.startswith("(") and inner.endswith(")"):
            inner = inner[1:-1]
        parts = [p.strip() for p in inner.split(",")]
        if len(parts) != 3:
            raise FormatError(f"pattern {text!r} does not have three positions")
        terms = [None if p.startswith("?") or not p else p for p in parts]
        return cls(subject=terms[0], predicate=terms[1], object=terms[2])


class EquivalenceMap:
    """Disjoint classes of interchangeable terms.

    The file form is one class per line, terms separated by tabs or the
    equivalence sign, with '#' starting a comment.
    """

    def __init__(self) -> None:
        self._classes: list[set[str]] = []
        self._index: dict[str, int] = {}

    def add_class(self, terms) -> None:
        cleaned = [t for t in (str(term).strip() for term in terms) if t]
        if not cleaned:
            return
        touched = sorted({self._index[t] for t in cleaned if t in self._index})
        if touched:
            keep = touched[0]
            merged = self._classes[keep]
            for i in reversed(touched[1:]):
                merged |= self._classes[i]
                self._classes[i] = set()
            merged.update(cleaned)
        else:
            keep = len(self._classes)
            self._classes.append(set(cleaned))
        for term in self._classes[keep]:
            self._index[term] = keep

    def expand(self, term: str) -> frozenset[str]:
        index = self._index.get(term)
        if index is None:
            return frozenset((term,))
        return frozenset(self._classes[index])

    def classes(self) -> list[frozenset[str]]:
        return [frozenset(c) for c in self._classes if c]

    @classmethod
    def from_text(cls, text: str) -> "EquivalenceMap":
        eq = cls()
        for line in text.splitlines():
            body = line.split("#", 1)[0]
            if not body.strip():
                continue
            eq.add_class(re.split(r"[≡\t]", body))
        return eq

    @classmethod
    def load(cls, path: str | os.PathLike) -> "EquivalenceMap":
        return cls.from_text(Path(path).read_text("utf-8"))


def _tt_object(tt: TranslatedText) -> str:
    code = tt.translation.value if tt.translation else "?"
    return f"[{tt.language}/{code}] {tt.text}"


def _skill_object(skill) -> str:
    return skill.skill if skill.role is None else f"[{skill.role}] {skill.skill}"


def _version_key(record: Record, prov: Provenance):
    # repr is deterministic for these frozen dataclasses and breaks the
    # pathological tie of equal date and equal source.
    return (prov.fetched.latest(), prov.source, repr(record))


class Store:
    def __init__(self) -> None:
        self.current: dict[RecordKey, tuple[Record, Provenance]] = {}
        self.history: list[tuple[RecordKey, Record, Provenance]] = []
        self.relations: set[Relation] = set()

    def merge(self, rs: RecordSet, prov: Provenance) -> list[str]:
        """Fold one fetched document into the store; returns merge warnings."""
        warnings: list[str] = []
        for key in sorted(rs.records):
            record = rs.records[key]
            if key not in self.current:
                self.current[key] = (record, prov)
                continue
            held_record, held_prov = self.current[key]
            if (held_prov.fetched.latest() == prov.fetched.latest()
                    and (held_record, held_prov) != (record, prov)):
                warnings.append(f"{key.kind} {key.id}: same-day versions from "
                                f"{held_prov.source} and {prov.source}, "
                                "greatest source wins")
            if _version_key(record, prov) > _version_key(held_record, held_prov):
                self.current[key] = (record, prov)
                self.history.append((key, held_record, held_prov))
            else:
                self.history.append((key, record, prov))
        self.relations.update(rs.relations)
        return warnings

    def versions_of(self, key: RecordKey) -> list[tuple[Record, Provenance]]:
        """Current version first, then every superseded one in arrival order."""
        out = []
        if key in self.current:
            out.append(self.current[key])
        out.extend((record, prov) for k, record, prov in self.history if k == key)
        return out

    def to_triples(self) -> set[Triple]:
        """Flatten current records to subject-predicate-object triples.

        Subjects are "type:id" strings; language-tagged objects carry their
        annotations in a bracket prefix; relations become one triple each
        with the role as predicate.
        """
        triples: set[Triple] = set()
        relations = set(self.relations)
        for key, (record, _) in self.current.items():
            subject = f"{key.kind}:{key.id}"
            if isinstance(record, Project):
                relations.update(record.relations)
                if record.status is not None:
                    token = (record.status.value
                             if hasattr(record.status, "value") else str(record.status))
                    triples.add((subject, "status", token))
                if record.start is not None:
                    triples.add((subject, "start", str(record.start)))
                if record.end is not None:
                    triples.add((subject, "end", str(record.end)))
                if record.uri is not None:
                    triples.add((subject, "uri", record.uri))
                for prize in record.prize_awards:
                    triples.add((subject, "prize_award", prize))
                for tt in record.titles:
                    triples.add((subject, "title", _tt_object(tt)))
                for tt in record.abstracts:
                    triples.add((subject, "abstract", _tt_object(tt)))
                for tt in record.keywords:
                    triples.add((subject, "keywords", _tt_object(tt)))
            elif isinstance(record, Person):
                if record.family_names:
                    triples.add((subject, "family_names", record.family_names))
                if record.first_names:
                    triples.add((subject, "first_names", record.first_names))
                if record.sex is not None:
                    triples.add((subject, "sex", record.sex))
                if record.uri is not None:
                    triples.add((subject, "uri", record.uri))
                for prize in record.prize_awards:
                    triples.add((subject, "prize_award", prize))
                for skill in record.expert_skills:
                    triples.add((subject, "expert_skill", _skill_object(skill)))
                for contact in record.contacts:
                    if contact.telephone is not None:
                        triples.add((subject, "telephone", contact.telephone))
                    if contact.email is not None:
                        triples.add((subject, "email", contact.email))
                    if contact.uri is not None:
                        triples.add((subject, "contact_uri", contact.uri))
            else:
                if record.acronym is not None:
                    triples.add((subject, "acronym", record.acronym))
                if record.prize_award is not None:
                    triples.add((subject, "prize_award", record.prize_award))
                if record.url is not None:
                    triples.add((subject, "url", record.url))
                for tt in record.names:
                    triples.add((subject, "name", _tt_object(tt)))
                for rel in record.ou_relations:
                    triples.add((subject, rel.role, f"orgunit:{rel.target}"))
                for skill in record.expert_skills:
                    triples.add((subject, "expert_skill", _skill_object(skill)))
                for tt in record.descriptions:
                    triples.add((subject, "description", _tt_object(tt)))
        for rel in relations:
            triples.add((f"{rel.source.kind}:{rel.source.id}", rel.role,
                         f"{rel.target.kind}:{rel.target.id}"))
        return triples

    def query(self, pattern: TriplePattern,
              eq: EquivalenceMap | None = None) -> list[Triple]:
        """Triples matching *pattern*, sorted.

        Subject and object terms match either the full "type:id" form or the
        bare identifier; predicates match exactly.  Every term is first
        expanded through its equivalence class, so enlarging a class can only
        add results.
        """
        eq = eq if eq is not None else EquivalenceMap()

        def endpoint_match(value: str, terms: frozenset[str]) -> bool:
            return value in terms or value.split(":", 1)[-1] in terms

        subject_terms = None if pattern.subject is None else eq.expand(pattern.subject)
        predicate_terms = (None if pattern.predicate is None
                           else eq.expand(pattern.predicate))
        object_terms = None if pattern.object is None else eq.expand(pattern.object)

        out = []
        for triple in self.to_triples():
            s, p, o = triple
            if subject_terms is not None and not endpoint_match(s, subject_terms):
                continue
            if predicate_terms is not None and p not in predicate_terms:
                continue
            if object_terms is not None and not endpoint_match(o, object_terms):
                continue
            out.append(triple)
        return sorted(out)

    # -- persistence --------------------------------------------------------

    def save(self, directory: str | os.PathLike, *, cerif_ns: str = CERIF_NS) -> None:
        """Write one canonical file per current record plus the provenance
        index; stale record files from earlier saves are removed."""
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        expected = {RELATIONS_FILE} if self.relations else set()
        for key in sorted(self.current):
            record, _ = self.current[key]
            rs = RecordSet()
            rs.records[key] = record
            file_name = f"{key.kind}.{key.id}.rdf"
            expected.add(file_name)
            # gathered records may be partial, so persistence skips the
            # mandatory-field check that exchange output enforces
            (root / file_name).write_text(
                serialize_document(rs, cerif_ns=cerif_ns, validate=False),
                "utf-8")
        if self.relations:
            rs = RecordSet()
            rs.relations = sorted(self.relations, key=Relation.sort_key)
            (root / RELATIONS_FILE).write_text(
                serialize_document(rs, cerif_ns=cerif_ns), "utf-8")
        for path in root.glob("*.rdf"):
            if path.name not in expected:
                path.unlink()

        lines = []
        for key in sorted(self.current):
            _, prov = self.current[key]
            lines.append(f"{key.kind}:{key.id}\t{prov.source}\t"
                         f"{format_partial_date(prov.fetched)}\t{prov.kind.value}")
        payload = "".join(line + "\n" for line in lines)
        fd, tmp = tempfile.mkstemp(dir=root, prefix=INDEX_FILE, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp, root / INDEX_FILE)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, directory: str | os.PathLike, *,
             cerif_ns: str = CERIF_NS) -> "Store":
        """Rebuild the current map from a saved directory.

        History is not persisted; a reloaded store starts with an empty one.
        """
        root = Path(directory)
        store = cls()
        index_path = root / INDEX_FILE
        if not index_path.exists():
            return store
        provenance: dict[str, Provenance] = {}
        for lineno, line in enumerate(index_path.read_text("utf-8").splitlines(),
                                      start=1):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise FormatError(f"{index_path}:{lineno}: expected 4 fields")
            subject, source, date_text, kind_text = fields
            provenance[subject] = Provenance(source, parse_partial_date(date_text),
                                             SourceKind(kind_text))
        for path in sorted(root.glob("*.rdf")):
            rs, _ = parse_document(path.read_text("utf-8"), cerif_ns=cerif_ns)
            store.relations.update(rs.relations)
            for key, record in rs.records.items():
                subject = f"{key.kind}:{key.id}"
                prov = provenance.get(subject)
                if prov is None:
                    raise FormatError(f"{path.name}: no provenance index entry "
                                      f"for {subject}")
                store.current[key] = (record, prov)
        return store

"""Reader and writer for the CERIF-RDF document dialect.

The dialect is a restricted RDF/XML profile: an rdf:RDF root whose children
are typed record nodes carrying an ID attribute, literal property elements,
rdf:Bag containers for repeating groups, and resource= attributes for
references.  Parsing is deliberately forgiving (unknown elements, stray
whitespace, a missing cerif prefix declaration and legacy spellings all come
back as warnings); writing is strict and byte-deterministic.
"""

from __future__ import annotations

import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .errors import DuplicateId, InvariantViolation, MissingId, UnknownCode, XmlError
from .model import (
    Contact,
    ExpertSkill,
    OrgUnit,
    OuOuRelation,
    PartialDate,
    Person,
    Project,
    Record,
    RecordKey,
    Relation,
    RECORD_TYPES,
    STATUS_BY_TOKEN,
    TranslatedText,
    collapse_ws,
    format_partial_date,
    join_semicolon_list,
    normalize_translation_code,
    parse_partial_date,
    split_semicolon_list,
)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
CERIF_NS = "http://derpi.tuwien.ac.at/~andrei/cerif-rdf#"

STANDARD_NAMESPACES = {"rdf": RDF_NS, "rdfs": RDFS_NS, "cerif": CERIF_NS}

_RDF_BAG = f"{{{RDF_NS}}}Bag"
_RDF_LI = f"{{{RDF_NS}}}li"

# Canonical element spellings, each with the accepted alternative spellings.
# The canonical column follows the worked record examples; the alternatives
# cover the tabular naming style and a few attested one-off variants.
_ALIASES: dict[str, tuple[str, ...]] = {
    "project": ("project.project",),
    "person": ("person.person",),
    "orgunit": ("orgunit.orgunit",),
    "proj_status": ("project.status",),
    "proj_startdate": ("proj_start_date", "project.startdate"),
    "proj_enddate": ("proj_end_date", "project.enddate"),
    "proj_uri": ("proj_url", "project.uri"),
    "proj_prizeaward": ("proj_prize_award", "project.prizeawards", "project.prizeaward"),
    "project-titles": ("project.project-titles",),
    "Project-title": ("project.project-title",),
    "proj_title_language": (),
    "proj_title_trans_type": ("proj_title_transl_type",),
    "proj_title": (),
    "project-abstracts": ("project.project-abstracts",),
    "Project-abstract": ("project.project-abstract",),
    "proj_abs_language": (),
    "proj_abs_trans_type": ("proj_abs_transl_type",),
    "proj_abstract": ("proj-abstract",),
    "project-keywords": ("project.project-keywords",),
    "Project-keyword": ("project.project-keyword",),
    "proj_kw_language": (),
    "proj_kw_trans_type": (),
    "proj_keywords": ("project.keywords",),
    "project-relations": ("project.project-relations",),
    "Project-relation": ("project.project-relation",),
    "person.per_family_names": (),
    "person.per_first_names": (),
    "person.per_sex": (),
    "person.per_prize_awards": (),
    "person.per_uri": (),
    "person.expert_skills": (),
    "person.expert_skill": (),
    "person.es.role": (),
    "person.es.id": (),
    "person.contacts": (),
    "contact": (),
    "contact.telephone": (),
    "contact.email": (),
    "contact.uri": (),
    "orgunit.org_acronym": (),
    "orgunit.org_prizeaward": (),
    "orgunit.org_url": (),
    "orgunit.orgunit_names": (),
    "orgunit.orgunit_name": (),
    "orgunit.oun.language": (),
    "orgunit.oun.translation": (),
    "orgunit.oun.name": (),
    "orgunit.ou_ou_relations": (),
    "orgunit.ou_ou_relation": (),
    "orgunit.ou_ou_r.orgunit": (),
    "orgunit.ou_ou_r.role": (),
    "orgunit.expert_skills": (),
    "orgunit.expert_skill": (),
    "orgunit.es.role": (),
    "orgunit.es.skill": (),
    "orgunit.descriptions": (),
    "orgunit.description": (),
    "orgunit.od.language": (),
    "orgunit.od.translation": (),
    "orgunit.od.description": (),
    "relations": (),
    "relation": (),
    "rel.role": (),
    "rel.mandatory": (),
}

_ALIAS_LOOKUP: dict[str, str] = {}
for _canonical, _variants in _ALIASES.items():
    _ALIAS_LOOKUP[_canonical.lower()] = _canonical
    for _v in _variants:
        _ALIAS_LOOKUP[_v.lower()] = _canonical


def resolve_alias(name: str) -> tuple[str, bool]:
    """Return the canonical spelling for a cerif element name.

    The result is (canonical, known).  Unknown names come back unchanged with
    known=False so callers can warn without losing the original spelling.
    Relation endpoint elements are recognized structurally because the record
    type is part of the name.
    """
    lowered = name.lower()
    hit = _ALIAS_LOOKUP.get(lowered)
    if hit is not None:
        return hit, True
    for prefix in ("rel.from.", "rel.to."):
        if lowered.startswith(prefix) and lowered[len(prefix):] in RECORD_TYPES:
            return lowered, True
    return name, False


@dataclass(eq=False)
class RecordSet:
    """One parsed or buildable document: records keyed by (type, id).

    relations holds document-level relation descriptions, those not nested
    inside any record.  Per-object exchange files for persons and org-units
    carry their incident relations this way, because only project records
    embed relations directly.
    """

    records: dict[RecordKey, Record] = field(default_factory=dict)
    relations: list[Relation] = field(default_factory=list)
    namespaces: dict[str, str] = field(default_factory=lambda: dict(STANDARD_NAMESPACES))

    def add(self, record: Record) -> None:
        key = record.key
        if key in self.records:
            raise DuplicateId(f"{key.kind} {key.id} already present")
        self.records[key] = record

    def add_relation(self, relation: Relation) -> None:
        if relation not in self.relations:
            self.relations.append(relation)

    def all_relations(self) -> list[Relation]:
        """Every relation in the set, nested ones first, without duplicates."""
        seen: list[Relation] = []
        for key in sorted(self.records):
            record = self.records[key]
            if isinstance(record, Project):
                for rel in record.relations:
                    if rel not in seen:
                        seen.append(rel)
        for rel in self.relations:
            if rel not in seen:
                seen.append(rel)
        return seen

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RecordSet):
            return NotImplemented
        return (self.records == other.records
                and set(self.relations) == set(other.relations))


def _scan_tag_end(text: str, start: int) -> int | None:
    """Index just past the '>' closing the tag that starts at *start*."""
    quote: str | None = None
    for i in range(start, len(text)):
        c = text[i]
        if quote:
            if c == quote:
                quote = None
        elif c in "\"'":
            quote = c
        elif c == ">":
            return i + 1
    return None


def _inject_namespaces(text: str, cerif_ns: str) -> tuple[str, list[str]]:
    """Add missing standard xmlns declarations to a literal rdf:RDF root tag."""
    m = re.search(r"<rdf:RDF\b", text)
    if m is None:
        raise XmlError("undeclared namespace prefix and no rdf:RDF root to repair")
    end = _scan_tag_end(text, m.start())
    if end is None:
        raise XmlError("unterminated rdf:RDF start tag")
    head = text[m.start():end]
    missing = [(p, u) for p, u in
               (("rdf", RDF_NS), ("rdfs", RDFS_NS), ("cerif", cerif_ns))
               if f"xmlns:{p}" not in head]
    if not missing:
        raise XmlError("undeclared namespace prefix not repairable from the root tag")
    insertion = "".join(f' xmlns:{p}="{u}"' for p, u in missing)
    if head.rstrip().endswith("/>"):
        cut = head.rindex("/>")
        repaired = head[:cut] + insertion + head[cut:]
    else:
        cut = head.rindex(">")
        repaired = head[:cut] + insertion + head[cut:]
    warnings = [f"assumed namespace {u} for undeclared prefix {p}:" for p, u in missing]
    return text[:m.start()] + repaired + text[end:], warnings


def _read_tree(text: str) -> tuple[ET.Element, dict[str, str]]:
    namespaces: dict[str, str] = {}
    iterator = ET.iterparse(io.StringIO(text), events=("start-ns",))
    for _, (prefix, uri) in iterator:
        namespaces.setdefault(prefix, uri)
    root = iterator.root  # type: ignore[attr-defined]
    return root, namespaces


def _split_tag(tag: str) -> tuple[str | None, str]:
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        return uri, local
    return None, tag


def _cerif_local(tag: str, cerif_ns: str, warnings: list[str]) -> str | None:
    """Local name of a cerif element, tolerating the bare 'cerif.' spelling."""
    uri, local = _split_tag(tag)
    if uri == cerif_ns:
        return local
    if uri is None and local.startswith("cerif."):
        warnings.append(f"element {local} read as cerif:{local[len('cerif.'):]}")
        return local[len("cerif."):]
    return None


def _text_of(el: ET.Element) -> str:
    return collapse_ws("".join(el.itertext()))


def _parse_date(raw: str, what: str, warnings: list[str]) -> PartialDate | None:
    try:
        return parse_partial_date(raw)
    except Exception as exc:  # FormatError, reported not raised
        warnings.append(f"unusable {what} {raw!r}: {exc}")
        return None


def _bag_items(container: ET.Element, warnings: list[str], where: str) -> list[ET.Element]:
    """The inner elements of each non-empty rdf:li under the container's rdf:Bag."""
    bags = [child for child in container if child.tag == _RDF_BAG]
    if not bags:
        warnings.append(f"{where}: no rdf:Bag inside container")
        return []
    if len(bags) > 1:
        warnings.append(f"{where}: more than one rdf:Bag, extra ones ignored")
    items: list[ET.Element] = []
    for li in bags[0]:
        if li.tag != _RDF_LI:
            warnings.append(f"{where}: non-li bag member ignored")
            continue
        inner = list(li)
        if not inner:
            if _text_of(li):
                warnings.append(f"{where}: bare-text list item dropped")
            else:
                warnings.append(f"{where}: empty list item dropped")
            continue
        if len(inner) > 1:
            warnings.append(f"{where}: extra elements inside one list item ignored")
        items.append(inner[0])
    return items


def _parse_translated(item: ET.Element, cerif_ns: str, warnings: list[str],
                      where: str) -> TranslatedText:
    language = ""
    translation = None
    text = ""
    have_text = False
    for child in item:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append(f"{where}: foreign element ignored")
            continue
        lowered = local.lower()
        if "lang" in lowered:
            language = _text_of(child).lower()
        elif "trans" in lowered:
            token = _text_of(child)
            if token:
                try:
                    translation = normalize_translation_code(token, warnings)
                except UnknownCode as exc:
                    warnings.append(f"{where}: {exc}")
        elif not have_text:
            text = _text_of(child)
            have_text = True
        else:
            warnings.append(f"{where}: second text element cerif:{local} ignored")
    return TranslatedText(language=language, translation=translation, text=text)


def _parse_skill(item: ET.Element, cerif_ns: str, warnings: list[str],
                 where: str) -> ExpertSkill:
    role: str | None = None
    skill = ""
    for child in item:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append(f"{where}: foreign element ignored")
            continue
        if local.lower().endswith(".role"):
            value = _text_of(child)
            role = value or None
        else:
            skill = _text_of(child)
    return ExpertSkill(skill=skill, role=role)


def _parse_contact(item: ET.Element, cerif_ns: str, warnings: list[str]) -> Contact:
    fields = {"telephone": None, "email": None, "uri": None}
    for child in item:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            continue
        lowered = local.lower()
        for name in fields:
            if lowered.endswith("." + name) or lowered == name:
                fields[name] = _text_of(child) or None
                break
        else:
            warnings.append(f"contact: unknown element cerif:{local} ignored")
    return Contact(**fields)


def _parse_ou_relation(item: ET.Element, cerif_ns: str,
                       warnings: list[str]) -> OuOuRelation | None:
    target = None
    role = ""
    for child in item:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            continue
        if local.lower().endswith(".role"):
            role = _text_of(child)
        elif "resource" in child.attrib:
            target = collapse_ws(child.attrib["resource"])
        else:
            warnings.append(f"ou_ou_relation: element cerif:{local} without resource ignored")
    if not target:
        warnings.append("ou_ou_relation without a target dropped")
        return None
    return OuOuRelation(target=target, role=role)


def _parse_relation(item: ET.Element, cerif_ns: str,
                    warnings: list[str]) -> Relation | None:
    source = None
    target = None
    role = ""
    mandatory = False
    for child in item:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            continue
        lowered = local.lower()
        if lowered.startswith("rel.from.") or lowered.startswith("rel.to."):
            kind = lowered.rsplit(".", 1)[1]
            if kind not in RECORD_TYPES:
                warnings.append(f"relation endpoint with unknown type {kind!r} ignored")
                continue
            ident = collapse_ws(child.attrib.get("resource", ""))
            if not ident:
                warnings.append("relation endpoint without resource ignored")
                continue
            if lowered.startswith("rel.from."):
                source = RecordKey(kind, ident)
            else:
                target = RecordKey(kind, ident)
        elif lowered.endswith(".role"):
            role = _text_of(child)
        elif lowered.endswith(".mandatory"):
            mandatory = _text_of(child).lower() in ("true", "1", "yes")
        else:
            warnings.append(f"relation: unknown element cerif:{local} ignored")
    if source is None or target is None:
        warnings.append("relation without both endpoints dropped")
        return None
    return Relation(source=source, target=target, role=role, mandatory=mandatory)


def _relation_list(container: ET.Element, cerif_ns: str,
                   warnings: list[str], where: str) -> list[Relation]:
    out = []
    for item in _bag_items(container, warnings, where):
        rel = _parse_relation(item, cerif_ns, warnings)
        if rel is not None:
            out.append(rel)
    return out


def _record_id(el: ET.Element, kind: str) -> str:
    raw = el.attrib.get("ID")
    if raw is None:
        raise MissingId(f"cerif:{kind} node without ID attribute")
    ident = collapse_ws(raw)
    if not ident:
        raise MissingId(f"cerif:{kind} node with empty ID attribute")
    return ident


def _trans_list(container, cerif_ns, warnings, where) -> list[TranslatedText]:
    return [_parse_translated(item, cerif_ns, warnings, where)
            for item in _bag_items(container, warnings, where)]


def _skill_list(container, cerif_ns, warnings, where) -> list[ExpertSkill]:
    return [_parse_skill(item, cerif_ns, warnings, where)
            for item in _bag_items(container, warnings, where)]


def _parse_project(el: ET.Element, cerif_ns: str, warnings: list[str]) -> Project:
    ident = _record_id(el, "project")
    values: dict = {"status": None, "start": None, "end": None, "uri": None,
                    "prize_awards": (), "titles": (), "abstracts": (),
                    "keywords": (), "relations": ()}
    seen: set[str] = set()

    def once(name: str) -> bool:
        if name in seen:
            warnings.append(f"project {ident}: duplicate {name} element, first one kept")
            return False
        seen.add(name)
        return True

    for child in el:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append(f"project {ident}: foreign element ignored")
            continue
        canonical, known = resolve_alias(local)
        if canonical == "proj_status" and once(canonical):
            token = _text_of(child)
            if token:
                status = STATUS_BY_TOKEN.get(token)
                if status is None:
                    warnings.append(f"project {ident}: unrecognized status {token!r}")
                    values["status"] = token
                else:
                    values["status"] = status
        elif canonical == "proj_startdate" and once(canonical):
            raw = _text_of(child)
            if raw:
                values["start"] = _parse_date(raw, "start date", warnings)
        elif canonical == "proj_enddate" and once(canonical):
            raw = _text_of(child)
            if raw:
                values["end"] = _parse_date(raw, "end date", warnings)
        elif canonical == "proj_uri" and once(canonical):
            values["uri"] = _text_of(child) or None
        elif canonical == "proj_prizeaward" and once(canonical):
            values["prize_awards"] = tuple(split_semicolon_list(_text_of(child)))
        elif canonical == "project-titles" and once(canonical):
            values["titles"] = tuple(_trans_list(child, cerif_ns, warnings,
                                                 f"project {ident} titles"))
        elif canonical == "project-abstracts" and once(canonical):
            values["abstracts"] = tuple(_trans_list(child, cerif_ns, warnings,
                                                    f"project {ident} abstracts"))
        elif canonical == "project-keywords" and once(canonical):
            values["keywords"] = tuple(_trans_list(child, cerif_ns, warnings,
                                                   f"project {ident} keywords"))
        elif canonical == "project-relations" and once(canonical):
            values["relations"] = tuple(_relation_list(child, cerif_ns, warnings,
                                                       f"project {ident} relations"))
        elif canonical in seen:
            pass
        else:
            warnings.append(f"project {ident}: unknown element cerif:{local} ignored")
    return Project(id=ident, **values)


def _parse_person(el: ET.Element, cerif_ns: str, warnings: list[str]) -> Person:
    ident = _record_id(el, "person")
    values: dict = {"family_names": "", "first_names": "", "sex": None,
                    "prize_awards": (), "uri": None, "expert_skills": (),
                    "contacts": ()}
    seen: set[str] = set()
    for child in el:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append(f"person {ident}: foreign element ignored")
            continue
        canonical, known = resolve_alias(local)
        if canonical in seen:
            warnings.append(f"person {ident}: duplicate {canonical} element, first one kept")
            continue
        if canonical == "person.per_family_names":
            values["family_names"] = _text_of(child)
        elif canonical == "person.per_first_names":
            values["first_names"] = _text_of(child)
        elif canonical == "person.per_sex":
            token = _text_of(child)
            values["sex"] = token or None
            if token and token not in ("M", "F"):
                warnings.append(f"person {ident}: unrecognized sex code {token!r}")
        elif canonical == "person.per_prize_awards":
            values["prize_awards"] = tuple(split_semicolon_list(_text_of(child)))
        elif canonical == "person.per_uri":
            values["uri"] = _text_of(child) or None
        elif canonical == "person.expert_skills":
            values["expert_skills"] = tuple(_skill_list(child, cerif_ns, warnings,
                                                        f"person {ident} skills"))
        elif canonical == "person.contacts":
            values["contacts"] = tuple(
                _parse_contact(item, cerif_ns, warnings)
                for item in _bag_items(child, warnings, f"person {ident} contacts"))
        else:
            warnings.append(f"person {ident}: unknown element cerif:{local} ignored")
            continue
        seen.add(canonical)
    return Person(id=ident, **values)


def _parse_orgunit(el: ET.Element, cerif_ns: str, warnings: list[str]) -> OrgUnit:
    ident = _record_id(el, "orgunit")
    values: dict = {"acronym": None, "prize_award": None, "url": None,
                    "names": (), "ou_relations": (), "expert_skills": (),
                    "descriptions": ()}
    seen: set[str] = set()
    for child in el:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append(f"orgunit {ident}: foreign element ignored")
            continue
        canonical, known = resolve_alias(local)
        if canonical in seen:
            warnings.append(f"orgunit {ident}: duplicate {canonical} element, first one kept")
            continue
        if canonical == "orgunit.org_acronym":
            values["acronym"] = _text_of(child) or None
        elif canonical == "orgunit.org_prizeaward":
            values["prize_award"] = _text_of(child) or None
        elif canonical == "orgunit.org_url":
            values["url"] = _text_of(child) or None
        elif canonical == "orgunit.orgunit_names":
            values["names"] = tuple(_trans_list(child, cerif_ns, warnings,
                                                f"orgunit {ident} names"))
        elif canonical == "orgunit.ou_ou_relations":
            rels = []
            for item in _bag_items(child, warnings, f"orgunit {ident} relations"):
                rel = _parse_ou_relation(item, cerif_ns, warnings)
                if rel is not None:
                    rels.append(rel)
            values["ou_relations"] = tuple(rels)
        elif canonical == "orgunit.expert_skills":
            values["expert_skills"] = tuple(_skill_list(child, cerif_ns, warnings,
                                                        f"orgunit {ident} skills"))
        elif canonical == "orgunit.descriptions":
            values["descriptions"] = tuple(_trans_list(child, cerif_ns, warnings,
                                                       f"orgunit {ident} descriptions"))
        else:
            warnings.append(f"orgunit {ident}: unknown element cerif:{local} ignored")
            continue
        seen.add(canonical)
    return OrgUnit(id=ident, **values)


_RECORD_PARSERS = {
    "project": _parse_project,
    "person": _parse_person,
    "orgunit": _parse_orgunit,
}


def _parse(data: str | bytes, cerif_ns: str,
           collect_duplicates: bool) -> tuple[RecordSet, list[str], list[RecordKey]]:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise XmlError(f"document is not UTF-8: {exc}") from None
    else:
        text = data
    warnings: list[str] = []
    try:
        root, namespaces = _read_tree(text)
    except ET.ParseError as exc:
        if "unbound prefix" not in str(exc):
            raise XmlError(f"not well-formed: {exc}") from None
        repaired, inject_warnings = _inject_namespaces(text, cerif_ns)
        try:
            root, namespaces = _read_tree(repaired)
        except ET.ParseError as exc2:
            raise XmlError(f"not well-formed: {exc2}") from None
        warnings.extend(inject_warnings)

    uri, local = _split_tag(root.tag)
    if (uri, local) != (RDF_NS, "RDF"):
        raise XmlError(f"root element is {root.tag}, expected rdf:RDF")

    rs = RecordSet(namespaces=namespaces)
    duplicates: list[RecordKey] = []
    for child in root:
        local = _cerif_local(child.tag, cerif_ns, warnings)
        if local is None:
            warnings.append("non-CERIF element under rdf:RDF ignored")
            continue
        canonical, known = resolve_alias(local)
        parser = _RECORD_PARSERS.get(canonical)
        if parser is not None:
            record = parser(child, cerif_ns, warnings)
            key = record.key
            if key in rs.records:
                if not collect_duplicates:
                    raise DuplicateId(f"{key.kind} {key.id} declared more than once")
                duplicates.append(key)
                continue
            rs.records[key] = record
        elif canonical == "relations":
            for rel in _relation_list(child, cerif_ns, warnings, "document relations"):
                rs.add_relation(rel)
        else:
            warnings.append(f"unknown typed element cerif:{local} ignored")
    return rs, warnings, duplicates


def parse_document(data: str | bytes, *,
                   cerif_ns: str = CERIF_NS) -> tuple[RecordSet, list[str]]:
    """Parse one CERIF-RDF document.

    Returns the record set together with the list of recovery warnings.
    Raises XmlError for documents that are not usable at all, DuplicateId when
    one (type, id) is declared twice and MissingId for typed nodes without an
    ID attribute.
    """
    rs, warnings, _ = _parse(data, cerif_ns, collect_duplicates=False)
    return rs, warnings


def scan_duplicate_keys(data: str | bytes, *,
                        cerif_ns: str = CERIF_NS) -> list[RecordKey]:
    """Keys declared more than once, one entry per extra declaration."""
    _, _, duplicates = _parse(data, cerif_ns, collect_duplicates=True)
    return duplicates


# ---------------------------------------------------------------------------
# serialization

_TRANS_ELEMENTS = {
    "titles": ("project-titles", "Project-title",
               "proj_title_language", "proj_title_trans_type", "proj_title"),
    "abstracts": ("project-abstracts", "Project-abstract",
                  "proj_abs_language", "proj_abs_trans_type", "proj_abstract"),
    "keywords": ("project-keywords", "Project-keyword",
                 "proj_kw_language", "proj_kw_trans_type", "proj_keywords"),
    "names": ("orgunit.orgunit_names", "orgunit.orgunit_name",
              "orgunit.oun.language", "orgunit.oun.translation", "orgunit.oun.name"),
    "descriptions": ("orgunit.descriptions", "orgunit.description",
                     "orgunit.od.language", "orgunit.od.translation",
                     "orgunit.od.description"),
}


class _Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def literal(self, depth: int, name: str, value: str) -> None:
        self.line(depth, f"<cerif:{name}>{escape(value)}</cerif:{name}>")

    def reference(self, depth: int, name: str, value: str) -> None:
        self.line(depth, f"<cerif:{name} resource={quoteattr(value)}/>")


def _check_relation(rel: Relation, where: str) -> None:
    if rel.source == rel.target:
        raise InvariantViolation(f"{where}: relation with identical endpoints")
    for key in (rel.source, rel.target):
        if key.kind not in RECORD_TYPES:
            raise InvariantViolation(f"{where}: unknown record type {key.kind!r}")
        if not key.id:
            raise InvariantViolation(f"{where}: relation endpoint without id")
    if not rel.role:
        raise InvariantViolation(f"{where}: relation without a role")


def _emit_relation(w: _Writer, depth: int, element: str, rel: Relation) -> None:
    w.line(depth, f"<cerif:{element}>")
    w.reference(depth + 1, f"rel.from.{rel.source.kind}", rel.source.id)
    w.reference(depth + 1, f"rel.to.{rel.target.kind}", rel.target.id)
    w.literal(depth + 1, "rel.role", rel.role)
    if rel.mandatory:
        w.literal(depth + 1, "rel.mandatory", "true")
    w.line(depth, f"</cerif:{element}>")


def _emit_trans_bag(w: _Writer, depth: int, group: str,
                    items: tuple[TranslatedText, ...]) -> None:
    container, item_el, lang_el, trans_el, text_el = _TRANS_ELEMENTS[group]
    w.line(depth, f"<cerif:{container}>")
    w.line(depth + 1, "<rdf:Bag>")
    for tt in items:
        w.line(depth + 2, "<rdf:li>")
        w.line(depth + 3, f"<cerif:{item_el}>")
        w.literal(depth + 4, lang_el, tt.language)
        w.literal(depth + 4, trans_el, tt.translation.value if tt.translation else "")
        w.literal(depth + 4, text_el, tt.text)
        w.line(depth + 3, f"</cerif:{item_el}>")
        w.line(depth + 2, "</rdf:li>")
    w.line(depth + 1, "</rdf:Bag>")
    w.line(depth, f"</cerif:{container}>")


def _emit_skill_bag(w: _Writer, depth: int, container: str, item_el: str,
                    role_el: str, skill_el: str,
                    skills: tuple[ExpertSkill, ...]) -> None:
    w.line(depth, f"<cerif:{container}>")
    w.line(depth + 1, "<rdf:Bag>")
    for sk in skills:
        w.line(depth + 2, "<rdf:li>")
        w.line(depth + 3, f"<cerif:{item_el}>")
        if sk.role is not None:
            w.literal(depth + 4, role_el, sk.role)
        w.literal(depth + 4, skill_el, sk.skill)
        w.line(depth + 3, f"</cerif:{item_el}>")
        w.line(depth + 2, "</rdf:li>")
    w.line(depth + 1, "</rdf:Bag>")
    w.line(depth, f"</cerif:{container}>")


def _emit_project(w: _Writer, p: Project) -> None:
    w.line(1, f"<cerif:project ID={quoteattr(p.id)}>")
    if p.status is not None:
        token = p.status.value if hasattr(p.status, "value") else str(p.status)
        w.literal(2, "proj_status", token)
    if p.start is not None:
        w.literal(2, "proj_startdate", format_partial_date(p.start))
    if p.end is not None:
        w.literal(2, "proj_enddate", format_partial_date(p.end))
    if p.uri is not None:
        w.literal(2, "proj_uri", p.uri)
    if p.prize_awards:
        w.literal(2, "proj_prizeaward", join_semicolon_list(p.prize_awards))
    if p.titles:
        _emit_trans_bag(w, 2, "titles", p.titles)
    if p.abstracts:
        _emit_trans_bag(w, 2, "abstracts", p.abstracts)
    if p.keywords:
        _emit_trans_bag(w, 2, "keywords", p.keywords)
    if p.relations:
        w.line(2, "<cerif:project-relations>")
        w.line(3, "<rdf:Bag>")
        for rel in p.relations:
            w.line(4, "<rdf:li>")
            _emit_relation(w, 5, "Project-relation", rel)
            w.line(4, "</rdf:li>")
        w.line(3, "</rdf:Bag>")
        w.line(2, "</cerif:project-relations>")
    w.line(1, "</cerif:project>")


def _emit_person(w: _Writer, p: Person) -> None:
    w.line(1, f"<cerif:person ID={quoteattr(p.id)}>")
    if p.family_names:
        w.literal(2, "person.per_family_names", p.family_names)
    if p.first_names:
        w.literal(2, "person.per_first_names", p.first_names)
    if p.sex is not None:
        w.literal(2, "person.per_sex", p.sex)
    if p.prize_awards:
        w.literal(2, "person.per_prize_awards", join_semicolon_list(p.prize_awards))
    if p.uri is not None:
        w.literal(2, "person.per_uri", p.uri)
    if p.expert_skills:
        _emit_skill_bag(w, 2, "person.expert_skills", "person.expert_skill",
                        "person.es.role", "person.es.id", p.expert_skills)
    if p.contacts:
        w.line(2, "<cerif:person.contacts>")
        w.line(3, "<rdf:Bag>")
        for contact in p.contacts:
            w.line(4, "<rdf:li>")
            w.line(5, "<cerif:contact>")
            if contact.telephone is not None:
                w.literal(6, "contact.telephone", contact.telephone)
            if contact.email is not None:
                w.literal(6, "contact.email", contact.email)
            if contact.uri is not None:
                w.literal(6, "contact.uri", contact.uri)
            w.line(5, "</cerif:contact>")
            w.line(4, "</rdf:li>")
        w.line(3, "</rdf:Bag>")
        w.line(2, "</cerif:person.contacts>")
    w.line(1, "</cerif:person>")


def _emit_orgunit(w: _Writer, o: OrgUnit) -> None:
    w.line(1, f"<cerif:orgunit ID={quoteattr(o.id)}>")
    if o.acronym is not None:
        w.literal(2, "orgunit.org_acronym", o.acronym)
    if o.prize_award is not None:
        w.literal(2, "orgunit.org_prizeaward", o.prize_award)
    if o.url is not None:
        w.literal(2, "orgunit.org_url", o.url)
    if o.names:
        _emit_trans_bag(w, 2, "names", o.names)
    if o.ou_relations:
        w.line(2, "<cerif:orgunit.ou_ou_relations>")
        w.line(3, "<rdf:Bag>")
        for rel in o.ou_relations:
            w.line(4, "<rdf:li>")
            w.line(5, "<cerif:orgunit.ou_ou_relation>")
            w.reference(6, "orgunit.ou_ou_r.orgunit", rel.target)
            w.literal(6, "orgunit.ou_ou_r.role", rel.role)
            w.line(5, "</cerif:orgunit.ou_ou_relation>")
            w.line(4, "</rdf:li>")
        w.line(3, "</rdf:Bag>")
        w.line(2, "</cerif:orgunit.ou_ou_relations>")
    if o.expert_skills:
        _emit_skill_bag(w, 2, "orgunit.expert_skills", "orgunit.expert_skill",
                        "orgunit.es.role", "orgunit.es.skill", o.expert_skills)
    if o.descriptions:
        _emit_trans_bag(w, 2, "descriptions", o.descriptions)
    w.line(1, "</cerif:orgunit>")


def serialize_document(rs: RecordSet, *, cerif_ns: str = CERIF_NS,
                       validate: bool = True) -> str:
    """Write a record set to canonical CERIF-RDF text.

    Records are emitted sorted by (type, id) with properties in schema order,
    so output is byte-identical across runs.  By default records that break
    their own invariants are refused with InvariantViolation; validate=False
    lifts that for callers persisting gathered material that was never
    claimed to be complete.  Relations are checked either way because broken
    ones cannot be read back.
    """
    from .validation import validate_record

    for key in sorted(rs.records):
        record = rs.records[key]
        if validate:
            problems = validate_record(record)
            if problems:
                detail = "; ".join(v.message for v in problems)
                raise InvariantViolation(f"{key.kind} {key.id}: {detail}")
        if isinstance(record, Project):
            for rel in record.relations:
                _check_relation(rel, f"{key.kind} {key.id}")
    for rel in rs.relations:
        _check_relation(rel, "document relations")

    w = _Writer()
    w.lines.append(f'<rdf:RDF xmlns:rdf="{RDF_NS}"')
    w.lines.append(f'    xmlns:rdfs="{RDFS_NS}"')
    w.lines.append(f'    xmlns:cerif="{cerif_ns}">')
    for key in sorted(rs.records):
        record = rs.records[key]
        if isinstance(record, Project):
            _emit_project(w, record)
        elif isinstance(record, Person):
            _emit_person(w, record)
        else:
            _emit_orgunit(w, record)
    if rs.relations:
        w.line(1, "<cerif:relations>")
        w.line(2, "<rdf:Bag>")
        for rel in sorted(set(rs.relations), key=Relation.sort_key):
            w.line(3, "<rdf:li>")
            _emit_relation(w, 4, "relation", rel)
            w.line(3, "</rdf:li>")
        w.line(2, "</rdf:Bag>")
        w.line(1, "</cerif:relations>")
    w.lines.append("</rdf:RDF>")
    return "\n".join(w.lines) + "\n"

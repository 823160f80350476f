"""Embedding CERIF-RDF in web pages and getting it back out.

Rendering produces a human-readable HTML page whose machine-readable twin
travels inside a comment opened by the CERIF-RDF marker.  Extraction does the
inverse and is deliberately independent of everything around the block: it
scans for verbatim rdf:RDF regions wherever they sit, inline or commented.
"""

from __future__ import annotations

import html
from dataclasses import dataclass, field

from .errors import CerifError
from .model import OrgUnit, Person, Project, Record
from .rdfxml import CERIF_NS, RecordSet, parse_document, serialize_document

EMBED_MARKER = "<!--CERIF-RDF"
_OPEN = "<rdf:RDF"
_CLOSE = "</rdf:RDF>"


@dataclass
class ExtractionResult:
    """Documents recovered from one page, each with the byte offset where its
    rdf:RDF block starts, plus any per-block warnings."""

    documents: list[tuple[RecordSet, int]] = field(default_factory=list)
    page_uri: str | None = None
    warnings: list[str] = field(default_factory=list)


def _scan_tag_end(text: str, start: int) -> int | None:
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


def extract_rdf(page: str | bytes, page_uri: str | None = None, *,
                cerif_ns: str = CERIF_NS) -> ExtractionResult:
    """Pull every parseable CERIF-RDF block out of *page*.

    Blocks that fail to parse are reported in warnings and skipped; offsets
    are byte offsets into the UTF-8 form of the page and strictly increase.
    """
    text = page.decode("utf-8", errors="replace") if isinstance(page, bytes) else page
    result = ExtractionResult(page_uri=page_uri)
    pos = 0
    while True:
        i = text.find(_OPEN, pos)
        if i < 0:
            break
        after = text[i + len(_OPEN):i + len(_OPEN) + 1]
        if after not in ("", " ", "\t", "\r", "\n", ">", "/"):
            pos = i + len(_OPEN)
            continue
        tag_end = _scan_tag_end(text, i)
        offset = len(text[:i].encode("utf-8"))
        if tag_end is None:
            result.warnings.append(f"offset {offset}: unterminated rdf:RDF start tag")
            break
        if text[tag_end - 2:tag_end] == "/>":
            end = tag_end
        else:
            close = text.find(_CLOSE, tag_end)
            if close < 0:
                result.warnings.append(f"offset {offset}: rdf:RDF block never closed")
                pos = tag_end
                continue
            end = close + len(_CLOSE)
        block = text[i:end]
        try:
            rs, block_warnings = parse_document(block, cerif_ns=cerif_ns)
        except CerifError as exc:
            result.warnings.append(f"offset {offset}: block skipped: {exc}")
        else:
            result.documents.append((rs, offset))
            result.warnings.extend(f"offset {offset}: {w}" for w in block_warnings)
        pos = end
    return result


def _tt_label(base: str, tt) -> str:
    code = tt.translation.value if tt.translation else "?"
    return f"{base} ({tt.language}, {code})"


def _rows_project(p: Project) -> list[tuple[str, str]]:
    rows = [("identifier", p.id)]
    if p.status is not None:
        token = p.status.value if hasattr(p.status, "value") else str(p.status)
        rows.append(("status", token))
    if p.start is not None:
        rows.append(("start date", str(p.start)))
    if p.end is not None:
        rows.append(("end date", str(p.end)))
    if p.uri is not None:
        rows.append(("URI", p.uri))
    if p.prize_awards:
        rows.append(("prizes and awards", "; ".join(p.prize_awards)))
    for tt in p.titles:
        rows.append((_tt_label("title", tt), tt.text))
    for tt in p.abstracts:
        rows.append((_tt_label("abstract", tt), tt.text))
    for tt in p.keywords:
        rows.append((_tt_label("keywords", tt), tt.text))
    for rel in p.relations:
        rows.append(("relation",
                     f"{rel.role}: {rel.source.kind}:{rel.source.id} -> "
                     f"{rel.target.kind}:{rel.target.id}"))
    return rows


def _rows_person(p: Person) -> list[tuple[str, str]]:
    rows = [("identifier", p.id)]
    if p.family_names:
        rows.append(("family names", p.family_names))
    if p.first_names:
        rows.append(("first names", p.first_names))
    if p.sex is not None:
        rows.append(("sex", p.sex))
    if p.prize_awards:
        rows.append(("prizes and awards", "; ".join(p.prize_awards)))
    if p.uri is not None:
        rows.append(("URI", p.uri))
    for sk in p.expert_skills:
        value = sk.skill if sk.role is None else f"{sk.skill} (role: {sk.role})"
        rows.append(("expert skill", value))
    for contact in p.contacts:
        parts = []
        if contact.telephone is not None:
            parts.append(f"telephone {contact.telephone}")
        if contact.email is not None:
            parts.append(f"email {contact.email}")
        if contact.uri is not None:
            parts.append(f"uri {contact.uri}")
        rows.append(("contact", "; ".join(parts)))
    return rows


def _rows_orgunit(o: OrgUnit) -> list[tuple[str, str]]:
    rows = [("identifier", o.id)]
    if o.acronym is not None:
        rows.append(("acronym", o.acronym))
    if o.prize_award is not None:
        rows.append(("prize or award", o.prize_award))
    if o.url is not None:
        rows.append(("URL", o.url))
    for tt in o.names:
        rows.append((_tt_label("name", tt), tt.text))
    for rel in o.ou_relations:
        rows.append(("related org-unit", f"{rel.role}: orgunit:{rel.target}"))
    for sk in o.expert_skills:
        value = sk.skill if sk.role is None else f"{sk.skill} (role: {sk.role})"
        rows.append(("expert skill", value))
    for tt in o.descriptions:
        rows.append((_tt_label("description", tt), tt.text))
    return rows


def render_html(record: Record, *, cerif_ns: str = CERIF_NS) -> str:
    """Render one record as a self-describing HTML page.

    The page carries the canonical CERIF-RDF form of the record inside a
    marked comment, so extract_rdf applied to the output recovers the record
    exactly.  Records failing their invariants are refused.
    """
    rs = RecordSet()
    rs.add(record)
    document = serialize_document(rs, cerif_ns=cerif_ns)

    if isinstance(record, Project):
        rows = _rows_project(record)
    elif isinstance(record, Person):
        rows = _rows_person(record)
    else:
        rows = _rows_orgunit(record)

    key = record.key
    heading = html.escape(f"{key.kind} {key.id}")
    lines = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8"/>',
        f"<title>{heading}</title>",
        "</head>",
        "<body>",
        f"<h1>{heading}</h1>",
        "<table>",
    ]
    for label, value in rows:
        lines.append(f"<tr><th>{html.escape(label)}</th>"
                     f"<td>{html.escape(value)}</td></tr>")
    lines.append("</table>")
    lines.append(EMBED_MARKER)
    lines.append(document.rstrip("\n"))
    lines.append("-->")
    lines.append("</body>")
    lines.append("</html>")
    return "\n".join(lines) + "\n"

"""Annotation workflow: suggestion precomputation through a pluggable
analyzer provider, analysis search, annotation submission, and bulk apply
across same-orthography tokens."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Protocol

from .errors import (
    ForbiddenError,
    ProviderError,
    SchemaError,
    UnknownTokenError,
    ValidationFailure,
)
from .model import (
    Analysis,
    AnnotationRecord,
    Document,
    MorphAnnotation,
    Segment,
    Sentence,
    Source,
    TagSet,
    Token,
    User,
    utcnow,
    validate_annotation,
)

FALLBACK_PROVIDER = "fallback"


class AnalyzerProvider(Protocol):
    """Out-of-context analyzer capability.

    analyze() must be deterministic for a fixed provider version and return
    analyses sorted by descending score. An empty list is a valid answer.
    """

    name: str

    def analyze(self, surface: str, dialect: str) -> list[Analysis]: ...


def fallback_analysis(surface: str, dialect: str, default_tag: str = "NOUN") -> Analysis:
    """Whole-surface analysis used when a provider knows nothing about a word,
    so prefill stays total and the panel always has values to show."""
    annotation = MorphAnnotation(
        proclitics=(),
        baseword=Segment(surface=surface, pos=default_tag),
        enclitics=(),
        lemma=surface,
        gloss="",
        source=Source.SUGGESTED,
    )
    return Analysis(annotation=annotation, dialect=dialect, score=0.0, provider=FALLBACK_PROVIDER)


class LexiconProvider:
    """Deterministic provider backed by a JSON lexicon file.

    The file maps surface -> dialect -> list of analyses with scores; see
    data/lexicon.json for the schema. Lookups for a dialect missing from an
    entry fall back to the entry's first listed dialect, mirroring an
    analyzer that lacks a model for the requested variety.
    """

    def __init__(self, entries: dict, name: str = "lexicon"):
        self.name = name
        self._entries = entries

    @staticmethod
    def from_file(path: str | Path) -> "LexiconProvider":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"lexicon file is not valid JSON: {exc}") from exc
        if "entries" not in data:
            raise SchemaError("lexicon file missing field: entries", details="entries")
        return LexiconProvider(data["entries"], name=data.get("name", "lexicon"))

    @staticmethod
    def bundled() -> "LexiconProvider":
        return LexiconProvider.from_file(Path(__file__).parent / "data" / "lexicon.json")

    def analyze(self, surface: str, dialect: str) -> list[Analysis]:
        entry = self._entries.get(surface)
        if not entry:
            return []
        per_dialect = entry.get(dialect)
        if per_dialect is None and entry:
            per_dialect = entry[next(iter(entry))]
        analyses = []
        for item in per_dialect or []:
            annotation = MorphAnnotation(
                proclitics=tuple(Segment.from_dict(s) for s in item.get("proclitics", [])),
                baseword=Segment.from_dict(item["baseword"]),
                enclitics=tuple(Segment.from_dict(s) for s in item.get("enclitics", [])),
                lemma=item.get("lemma", ""),
                gloss=item.get("gloss", ""),
                source=Source.SUGGESTED,
            )
            analyses.append(
                Analysis(
                    annotation=annotation,
                    dialect=dialect,
                    score=float(item.get("score", 0.0)),
                    provider=self.name,
                )
            )
        analyses.sort(key=lambda a: -a.score)
        return analyses


class HttpProvider:
    """Adapter for a remote analyzer speaking JSON over HTTP.

    GETs {base_url}/analyze?surface=...&dialect=... and expects a JSON list
    of Analysis objects. Optional extra; the bundled lexicon provider is the
    default.
    """

    def __init__(self, base_url: str, name: str = "http", timeout: float = 10.0):
        self.name = name
        self._base_url = base_url.rstrip("/")
        self._timeout = timeout

    def analyze(self, surface: str, dialect: str) -> list[Analysis]:
        import httpx

        try:
            response = httpx.get(
                f"{self._base_url}/analyze",
                params={"surface": surface, "dialect": dialect},
                timeout=self._timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except Exception as exc:
            raise ProviderError(f"analyzer request failed: {exc}") from exc
        analyses = [Analysis.from_dict(item) for item in payload]
        analyses.sort(key=lambda a: -a.score)
        return analyses


def precompute_suggestions(
    doc: Document,
    provider: AnalyzerProvider,
    default_tag: str = "NOUN",
) -> dict[str, tuple[Analysis, ...]]:
    """Precompute ranked analyses for every current token and prefill the
    top-ranked one as the token's annotation (source=suggested).

    All provider calls complete before any document state changes, so a
    provider failure leaves the document untouched (no partial prefill).
    """
    computed: dict[str, dict[str, tuple[Analysis, ...]]] = {}
    for sentence in doc.sentences:
        per_sentence: dict[str, tuple[Analysis, ...]] = {}
        for token in sentence.tokens:
            try:
                ranked = provider.analyze(token.surface, doc.dialect)
            except ProviderError:
                raise
            except Exception as exc:
                raise ProviderError(f"provider {provider.name!r} failed: {exc}") from exc
            if not ranked:
                ranked = [fallback_analysis(token.surface, doc.dialect, default_tag)]
            per_sentence[token.id] = tuple(ranked)
        computed[sentence.id] = per_sentence

    now = utcnow()
    suggestion_map: dict[str, tuple[Analysis, ...]] = {}
    for sentence in list(doc.sentences):
        per_sentence = computed[sentence.id]
        annotations = dict(sentence.annotations)
        for token in sentence.tokens:
            ranked = per_sentence[token.id]
            suggestion_map[token.id] = ranked
            annotations[token.id] = AnnotationRecord(
                annotation=ranked[0].annotation.with_source(Source.SUGGESTED),
                for_surface=token.surface,
                author=provider.name,
                seq=doc.version,
                updated_at=now,
            )
        doc.replace_sentence(
            replace(sentence, annotations=annotations, suggestions=per_sentence)
        )
    return suggestion_map


@dataclass(frozen=True)
class SearchResults:
    provider_analyses: tuple[Analysis, ...]
    prior_annotations: tuple[MorphAnnotation, ...]


def prior_annotations(
    surface: str, corpus_scope: Iterable[Document]
) -> tuple[MorphAnnotation, ...]:
    """Distinct human/bulk annotations previously submitted for tokens whose
    current surface equals `surface`, most recent first. Stale records
    (token surface changed since submission) are excluded."""
    candidates: list[tuple[int, MorphAnnotation]] = []
    for doc in corpus_scope:
        for sentence in doc.sentences:
            for token in sentence.tokens:
                if token.surface != surface:
                    continue
                record = sentence.annotations.get(token.id)
                if record is None or record.stale_for(token):
                    continue
                if record.annotation.source is Source.SUGGESTED:
                    continue
                candidates.append((record.seq, record.annotation))
    candidates.sort(key=lambda item: -item[0])
    seen: set[tuple] = set()
    out: list[MorphAnnotation] = []
    for _, annotation in candidates:
        key = annotation.content_key()
        if key in seen:
            continue
        seen.add(key)
        out.append(annotation)
    return tuple(out)


def search_analyses(
    surface: str,
    dialect: str,
    corpus_scope: Iterable[Document],
    provider: AnalyzerProvider,
) -> SearchResults:
    if not surface:
        raise ValidationFailure(["search surface must not be empty"])
    return SearchResults(
        provider_analyses=tuple(provider.analyze(surface, dialect)),
        prior_annotations=prior_annotations(surface, corpus_scope),
    )


def _authorize(doc: Document, user: User) -> None:
    if user.is_lead:
        return
    if doc.assignee != user.id:
        raise ForbiddenError(f"document {doc.id} is not assigned to {user.name}")


def submit_annotation(
    doc: Document,
    token_id: str,
    ann: MorphAnnotation,
    user: User,
    tagset: TagSet,
) -> AnnotationRecord:
    """Store a human annotation for one token. Validation must pass; the
    record's surface anchor is refreshed so the annotation is no longer
    stale. Bumps the document version."""
    _authorize(doc, user)
    for sentence in doc.sentences:
        token = sentence.token_by_id(token_id)
        if token is None:
            continue
        result = validate_annotation(ann, token, tagset)
        if not result.ok:
            raise ValidationFailure(list(result.violations))
        doc.version += 1
        record = AnnotationRecord(
            annotation=ann.with_source(Source.HUMAN),
            for_surface=token.surface,
            author=user.id,
            seq=doc.version,
            updated_at=utcnow(),
        )
        annotations = dict(sentence.annotations)
        annotations[token_id] = record
        doc.replace_sentence(replace(sentence, annotations=annotations))
        return record
    raise UnknownTokenError(f"no such token: {token_id}")


def apply_to_matching(
    doc: Document,
    surface: str,
    ann: MorphAnnotation,
    user: User,
    tagset: TagSet,
) -> int:
    """Apply one annotation to every current token in the document whose
    surface is exactly `surface` (the source token included). Bumps the
    document version once regardless of match count. Returns the count;
    zero matches is not an error."""
    _authorize(doc, user)
    result = validate_annotation(
        ann, Token(id="bulk", surface=surface, position=0), tagset
    )
    if not result.ok:
        raise ValidationFailure(list(result.violations))
    doc.version += 1
    now = utcnow()
    count = 0
    for sentence in list(doc.sentences):
        annotations = None
        for token in sentence.tokens:
            if token.surface != surface:
                continue
            if annotations is None:
                annotations = dict(sentence.annotations)
            annotations[token.id] = AnnotationRecord(
                annotation=ann.with_source(Source.BULK_APPLIED),
                for_surface=surface,
                author=user.id,
                seq=doc.version,
                updated_at=now,
            )
            count += 1
        if annotations is not None:
            doc.replace_sentence(replace(sentence, annotations=annotations))
    return count

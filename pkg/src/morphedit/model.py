"""Shared domain types: documents, tokens, edit logs, annotations, and tagsets.

All types here are plain values. Nothing in this module mutates state;
mutation flows through the edit engine, the morphology workflow, and storage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import SchemaError


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def parse_timestamp(value: str) -> datetime:
    return datetime.fromisoformat(value)


class Provenance(str, Enum):
    RAW = "raw"
    EDITED = "edited"
    SPLIT_CHILD = "split-child"
    MERGE_RESULT = "merge-result"


class EditKind(str, Enum):
    MODIFY = "modify"
    SPLIT = "split"
    MERGE = "merge"


class DocStatus(str, Enum):
    UPLOADED = "uploaded"
    ASSIGNED = "assigned"
    IN_PROGRESS = "in_progress"
    SUBMITTED = "submitted"
    APPROVED = "approved"
    REJECTED = "rejected"


# Legal workflow edges. Rejected documents may be reassigned or resumed
# directly by the annotator.
ALLOWED_TRANSITIONS: frozenset[tuple[DocStatus, DocStatus]] = frozenset(
    {
        (DocStatus.UPLOADED, DocStatus.ASSIGNED),
        (DocStatus.ASSIGNED, DocStatus.IN_PROGRESS),
        (DocStatus.IN_PROGRESS, DocStatus.SUBMITTED),
        (DocStatus.SUBMITTED, DocStatus.APPROVED),
        (DocStatus.SUBMITTED, DocStatus.REJECTED),
        (DocStatus.REJECTED, DocStatus.IN_PROGRESS),
        (DocStatus.REJECTED, DocStatus.ASSIGNED),
    }
)


class Source(str, Enum):
    SUGGESTED = "suggested"
    HUMAN = "human"
    BULK_APPLIED = "bulk_applied"


class Role(str, Enum):
    ANNOTATOR = "annotator"
    LEAD = "lead"


@dataclass(frozen=True)
class Segment:
    """One morphological unit: a proclitic, baseword, or enclitic.

    Surfaces are stored bare, without "+" boundary markers; "+" is a display
    convention only.
    """

    surface: str
    pos: str
    features: Mapping[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"surface": self.surface, "pos": self.pos, "features": dict(self.features)}

    @staticmethod
    def from_dict(data: Mapping) -> "Segment":
        return Segment(
            surface=data["surface"],
            pos=data["pos"],
            features=dict(data.get("features", {})),
        )


@dataclass(frozen=True)
class MorphAnnotation:
    """Clitic-segmented analysis of one token, plus lemma and English gloss."""

    proclitics: tuple[Segment, ...]
    baseword: Segment
    enclitics: tuple[Segment, ...]
    lemma: str
    gloss: str
    source: Source = Source.HUMAN

    def segments(self) -> Iterator[Segment]:
        yield from self.proclitics
        yield self.baseword
        yield from self.enclitics

    def surfaces(self) -> tuple[str, ...]:
        return tuple(seg.surface for seg in self.segments())

    def content_key(self) -> tuple:
        """Hashable identity of the linguistic content, ignoring source."""
        segs = tuple(
            (seg.surface, seg.pos, tuple(sorted(seg.features.items())))
            for seg in self.segments()
        )
        return (len(self.proclitics), len(self.enclitics), segs, self.lemma, self.gloss)

    def with_source(self, source: Source) -> "MorphAnnotation":
        return replace(self, source=source)

    def to_dict(self) -> dict:
        return {
            "proclitics": [seg.to_dict() for seg in self.proclitics],
            "baseword": self.baseword.to_dict(),
            "enclitics": [seg.to_dict() for seg in self.enclitics],
            "lemma": self.lemma,
            "gloss": self.gloss,
            "source": self.source.value,
        }

    @staticmethod
    def from_dict(data: Mapping) -> "MorphAnnotation":
        return MorphAnnotation(
            proclitics=tuple(Segment.from_dict(s) for s in data.get("proclitics", [])),
            baseword=Segment.from_dict(data["baseword"]),
            enclitics=tuple(Segment.from_dict(s) for s in data.get("enclitics", [])),
            lemma=data.get("lemma", ""),
            gloss=data.get("gloss", ""),
            source=Source(data.get("source", "human")),
        )


@dataclass(frozen=True)
class Analysis:
    """One candidate annotation for a surface, as produced by a provider."""

    annotation: MorphAnnotation
    dialect: str
    score: float
    provider: str

    def to_dict(self) -> dict:
        return {
            "annotation": self.annotation.to_dict(),
            "dialect": self.dialect,
            "score": self.score,
            "provider": self.provider,
        }

    @staticmethod
    def from_dict(data: Mapping) -> "Analysis":
        return Analysis(
            annotation=MorphAnnotation.from_dict(data["annotation"]),
            dialect=data.get("dialect", ""),
            score=float(data.get("score", 0.0)),
            provider=data.get("provider", ""),
        )


@dataclass(frozen=True)
class Token:
    """A single whitespace-delimited unit of the text under annotation."""

    id: str
    surface: str
    position: int
    provenance: Provenance = Provenance.RAW
    annotation: MorphAnnotation | None = None

    def to_dict(self) -> dict:
        data = {
            "id": self.id,
            "surface": self.surface,
            "position": self.position,
            "provenance": self.provenance.value,
        }
        if self.annotation is not None:
            data["annotation"] = self.annotation.to_dict()
        return data

    @staticmethod
    def from_dict(data: Mapping) -> "Token":
        ann = data.get("annotation")
        return Token(
            id=data["id"],
            surface=data["surface"],
            position=int(data["position"]),
            provenance=Provenance(data.get("provenance", "raw")),
            annotation=MorphAnnotation.from_dict(ann) if ann else None,
        )


@dataclass(frozen=True)
class EditOp:
    """One recorded edit. `seq` is assigned by the log, is unique within the
    sentence and never reused, and seeds the ids of tokens the op creates."""

    kind: EditKind
    targets: tuple[str, ...]
    before: tuple[str, ...]
    after: tuple[str, ...]
    author: str
    timestamp: datetime
    seq: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "targets": list(self.targets),
            "before": list(self.before),
            "after": list(self.after),
            "author": self.author,
            "timestamp": self.timestamp.isoformat(),
            "seq": self.seq,
        }

    @staticmethod
    def from_dict(data: Mapping) -> "EditOp":
        return EditOp(
            kind=EditKind(data["kind"]),
            targets=tuple(data["targets"]),
            before=tuple(data["before"]),
            after=tuple(data["after"]),
            author=data.get("author", ""),
            timestamp=parse_timestamp(data["timestamp"]),
            seq=int(data["seq"]),
        )


@dataclass(frozen=True)
class EditLog:
    """Ordered edit history with an undo cursor.

    ops[:cursor] are applied; ops[cursor:] are redoable. Appending while the
    cursor is rewound truncates the redoable suffix. `next_seq` only ever
    grows, so token ids minted by discarded ops are never reused.
    """

    ops: tuple[EditOp, ...] = ()
    cursor: int = 0
    next_seq: int = 0

    @property
    def applied(self) -> tuple[EditOp, ...]:
        return self.ops[: self.cursor]

    @property
    def can_undo(self) -> bool:
        return self.cursor > 0

    @property
    def can_redo(self) -> bool:
        return self.cursor < len(self.ops)

    def appended(self, op: EditOp) -> "EditLog":
        ops = self.ops[: self.cursor] + (op,)
        return EditLog(ops=ops, cursor=len(ops), next_seq=self.next_seq + 1)

    def to_dict(self) -> dict:
        return {
            "ops": [op.to_dict() for op in self.ops],
            "cursor": self.cursor,
            "next_seq": self.next_seq,
        }

    @staticmethod
    def from_dict(data: Mapping) -> "EditLog":
        return EditLog(
            ops=tuple(EditOp.from_dict(op) for op in data.get("ops", [])),
            cursor=int(data.get("cursor", 0)),
            next_seq=int(data.get("next_seq", 0)),
        )


@dataclass(frozen=True)
class AnnotationRecord:
    """A stored annotation for one token id.

    `for_surface` is the token surface at submission time; the annotation is
    stale whenever it no longer equals the token's current surface, so
    undoing the edit that invalidated it also freshens it. `seq` is the
    document version at which the record was written (used for recency
    ordering).
    """

    annotation: MorphAnnotation
    for_surface: str
    author: str
    seq: int
    updated_at: datetime

    def stale_for(self, token: Token) -> bool:
        return self.for_surface != token.surface

    def to_dict(self) -> dict:
        return {
            "annotation": self.annotation.to_dict(),
            "for_surface": self.for_surface,
            "author": self.author,
            "seq": self.seq,
            "updated_at": self.updated_at.isoformat(),
        }

    @staticmethod
    def from_dict(data: Mapping) -> "AnnotationRecord":
        return AnnotationRecord(
            annotation=MorphAnnotation.from_dict(data["annotation"]),
            for_surface=data["for_surface"],
            author=data.get("author", ""),
            seq=int(data.get("seq", 0)),
            updated_at=parse_timestamp(data["updated_at"]),
        )


@dataclass(frozen=True)
class Sentence:
    """One sentence: immutable raw tokens, the edit log, the current token
    sequence it replays to, and per-token annotation state."""

    id: str
    raw_tokens: tuple[Token, ...]
    log: EditLog = EditLog()
    tokens: tuple[Token, ...] = ()
    annotations: Mapping[str, AnnotationRecord] = field(default_factory=dict)
    suggestions: Mapping[str, tuple[Analysis, ...]] = field(default_factory=dict)

    @staticmethod
    def from_surfaces(sentence_id: str, surfaces: Sequence[str]) -> "Sentence":
        raw = tuple(
            Token(id=f"{sentence_id}.r{i}", surface=s, position=i)
            for i, s in enumerate(surfaces)
        )
        return Sentence(id=sentence_id, raw_tokens=raw, tokens=raw)

    def token_by_id(self, token_id: str) -> Token | None:
        for token in self.tokens:
            if token.id == token_id:
                return token
        return None

    def record_for(self, token: Token) -> AnnotationRecord | None:
        return self.annotations.get(token.id)

    def annotation_for(self, token: Token) -> MorphAnnotation | None:
        record = self.annotations.get(token.id)
        return record.annotation if record else None

    def annotated_tokens(self) -> tuple[Token, ...]:
        """Current tokens with their stored annotations attached."""
        out = []
        for token in self.tokens:
            record = self.annotations.get(token.id)
            ann = record.annotation if record else None
            out.append(replace(token, annotation=ann))
        return tuple(out)

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "raw_tokens": [{"id": t.id, "surface": t.surface} for t in self.raw_tokens],
            "current_tokens": [t.to_dict() for t in self.tokens],
            "edit_log": self.log.to_dict(),
            "annotations": {tid: rec.to_dict() for tid, rec in self.annotations.items()},
            "suggestions": {
                tid: [a.to_dict() for a in ranked]
                for tid, ranked in self.suggestions.items()
            },
        }

    @staticmethod
    def from_dict(data: Mapping) -> "Sentence":
        raw = tuple(
            Token(id=t["id"], surface=t["surface"], position=i)
            for i, t in enumerate(data["raw_tokens"])
        )
        tokens = tuple(Token.from_dict(t) for t in data.get("current_tokens", []))
        return Sentence(
            id=data["id"],
            raw_tokens=raw,
            log=EditLog.from_dict(data.get("edit_log", {})),
            tokens=tokens if tokens else raw,
            annotations={
                tid: AnnotationRecord.from_dict(rec)
                for tid, rec in data.get("annotations", {}).items()
            },
            suggestions={
                tid: tuple(Analysis.from_dict(a) for a in ranked)
                for tid, ranked in data.get("suggestions", {}).items()
            },
        )


@dataclass
class Document:
    """The unit of assignment and review."""

    id: str
    title: str
    dialect: str
    sentences: list[Sentence]
    status: DocStatus = DocStatus.UPLOADED
    assignee: str | None = None
    version: int = 0
    review_note: str | None = None
    tagset_name: str = "default"

    def sentence_by_id(self, sentence_id: str) -> Sentence | None:
        for sentence in self.sentences:
            if sentence.id == sentence_id:
                return sentence
        return None

    def replace_sentence(self, sentence: Sentence) -> None:
        for i, existing in enumerate(self.sentences):
            if existing.id == sentence.id:
                self.sentences[i] = sentence
                return
        raise KeyError(sentence.id)

    def current_tokens(self) -> Iterator[tuple[Sentence, Token]]:
        for sentence in self.sentences:
            for token in sentence.tokens:
                yield sentence, token

    def can_transition(self, new_status: DocStatus) -> bool:
        return (self.status, new_status) in ALLOWED_TRANSITIONS

    def transition(self, new_status: DocStatus) -> None:
        from .errors import InvalidTransitionError

        if not self.can_transition(new_status):
            raise InvalidTransitionError(
                f"cannot move document from {self.status.value} to {new_status.value}"
            )
        self.status = new_status


@dataclass(frozen=True)
class TagSet:
    """Configurable POS tag inventory with per-tag feature schemas."""

    name: str
    tags: frozenset[str]
    features_per_tag: Mapping[str, frozenset[str]]
    feature_values: Mapping[str, frozenset[str]]

    def allowed_features(self, tag: str) -> frozenset[str]:
        return self.features_per_tag.get(tag, frozenset())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "tags": sorted(self.tags),
            "features_per_tag": {
                tag: sorted(keys) for tag, keys in sorted(self.features_per_tag.items())
            },
            "feature_values": {
                key: sorted(values) for key, values in sorted(self.feature_values.items())
            },
        }

    @staticmethod
    def from_dict(data: Mapping) -> "TagSet":
        for key in ("name", "tags"):
            if key not in data:
                raise SchemaError(f"tagset config missing field: {key}", details=key)
        tags = frozenset(data["tags"])
        if not tags:
            raise SchemaError("tagset must define at least one tag", details="tags")
        features_per_tag = {
            tag: frozenset(keys) for tag, keys in data.get("features_per_tag", {}).items()
        }
        for tag in features_per_tag:
            if tag not in tags:
                raise SchemaError(
                    f"features_per_tag refers to unknown tag: {tag}", details=tag
                )
        return TagSet(
            name=data["name"],
            tags=tags,
            features_per_tag=features_per_tag,
            feature_values={
                key: frozenset(values)
                for key, values in data.get("feature_values", {}).items()
            },
        )


def load_tagset(path: str | Path) -> TagSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"tagset config is not valid JSON: {exc}") from exc
    return TagSet.from_dict(data)


def default_tagset() -> TagSet:
    return load_tagset(Path(__file__).parent / "data" / "default_tagset.json")


def surfaces_cover_token(parts: Sequence[str], surface: str) -> bool:
    """Check that the segment surfaces, in order, account for the token surface.

    Exact concatenation always passes. In addition, each junction between two
    segments tolerates a single orthographic adjustment, since the attached
    spelling of a clitic host routinely differs from its cited form at the
    boundary: the surface may carry one linking letter the segmentation does
    not encode, or the letter ending the left-hand segment may be dropped or
    written differently when attached. Single-letter segments must match
    exactly so clitics cannot act as wildcards.
    """
    n = len(parts)
    if n == 0:
        return False

    def walk(i: int, pos: int) -> bool:
        if i == n:
            return pos == len(surface)
        part = parts[i]
        if not part:
            return False
        if surface.startswith(part, pos):
            if walk(i + 1, pos + len(part)):
                return True
            if i < n - 1:
                # linking letter present only in the attached form
                j = pos + len(part)
                if j < len(surface) and walk(i + 1, j + 1):
                    return True
        if i < n - 1 and len(part) >= 2:
            head, tail = part[:-1], part[-1]
            if surface.startswith(head, pos):
                # segment-final letter absent from the attached form
                if walk(i + 1, pos + len(head)):
                    return True
                # segment-final letter alternates when attached
                j = pos + len(head)
                if j < len(surface) and surface[j] != tail and walk(i + 1, j + 1):
                    return True
        return False

    return walk(0, 0)


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_annotation(
    ann: MorphAnnotation, token: Token, tagset: TagSet
) -> ValidationResult:
    """Check an annotation against a token and tagset; returns every violation."""
    violations: list[str] = []
    names = (
        [f"proclitic {i}" for i in range(len(ann.proclitics))]
        + ["baseword"]
        + [f"enclitic {i}" for i in range(len(ann.enclitics))]
    )
    for name, seg in zip(names, ann.segments()):
        if not seg.surface or seg.surface.strip("+") == "":
            violations.append(f"empty surface: {name}")
        elif any(ch.isspace() for ch in seg.surface):
            violations.append(f"whitespace in surface: {name}")
        if seg.pos not in tagset.tags:
            violations.append(f"unknown tag: {seg.pos} ({name})")
        else:
            allowed = tagset.allowed_features(seg.pos)
            for key, value in seg.features.items():
                if key not in allowed:
                    violations.append(f"feature not allowed for tag {seg.pos}: {key}")
                elif key in tagset.feature_values and value not in tagset.feature_values[key]:
                    violations.append(f"invalid value for feature {key}: {value}")
    # "+" on segment edges is tolerated as display residue and stripped.
    bare = [seg.surface.strip("+") for seg in ann.segments()]
    if all(bare) and not surfaces_cover_token(bare, token.surface):
        violations.append(
            f"segmentation mismatch: {'+'.join(bare)} does not cover {token.surface}"
        )
    return ValidationResult(tuple(violations))


@dataclass(frozen=True)
class User:
    id: str
    name: str
    role: Role
    credential_hash: str = ""

    @property
    def is_lead(self) -> bool:
        return self.role is Role.LEAD

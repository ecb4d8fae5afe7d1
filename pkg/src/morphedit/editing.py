"""Token-level edit engine: modify, split, and merge with undo/redo.

Every operation is a pure transition from one Sentence value to the next.
The edit log is the source of truth: the current token sequence of any
sentence equals the replay of the applied log prefix against its raw tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvalidEditError,
    NothingToRedoError,
    NothingToUndoError,
    UnknownTokenError,
)
from .model import (
    Document,
    EditKind,
    EditLog,
    EditOp,
    Provenance,
    Sentence,
    Token,
    utcnow,
)


def _child_id(sentence_id: str, seq: int, k: int) -> str:
    # Derived from the op's never-reused seq, so ids stay unique for the
    # lifetime of the document even across undo and log truncation.
    return f"{sentence_id}.e{seq}.{k}"


def _reposition(tokens: Iterable[Token]) -> tuple[Token, ...]:
    return tuple(
        t if t.position == i else replace(t, position=i) for i, t in enumerate(tokens)
    )


def _index_of(tokens: Sequence[Token], token_id: str) -> int:
    for i, t in enumerate(tokens):
        if t.id == token_id:
            return i
    raise UnknownTokenError(f"no such token: {token_id}")


def apply_op(sentence_id: str, tokens: Sequence[Token], op: EditOp) -> tuple[Token, ...]:
    """Apply a single recorded op to a token sequence."""
    out = list(tokens)
    if op.kind is EditKind.MODIFY:
        i = _index_of(out, op.targets[0])
        out[i] = replace(out[i], surface=op.after[0], provenance=Provenance.EDITED)
    elif op.kind is EditKind.SPLIT:
        i = _index_of(out, op.targets[0])
        children = [
            Token(
                id=_child_id(sentence_id, op.seq, k),
                surface=part,
                position=i + k,
                provenance=Provenance.SPLIT_CHILD,
            )
            for k, part in enumerate(op.after)
        ]
        out[i : i + 1] = children
    elif op.kind is EditKind.MERGE:
        indices = sorted(_index_of(out, tid) for tid in op.targets)
        merged = Token(
            id=_child_id(sentence_id, op.seq, 0),
            surface=op.after[0],
            position=indices[0],
            provenance=Provenance.MERGE_RESULT,
        )
        out[indices[0] : indices[-1] + 1] = [merged]
    return _reposition(out)


def replay(sentence_id: str, raw_tokens: Sequence[Token], ops: Sequence[EditOp]) -> tuple[Token, ...]:
    """Replay an op sequence against the raw tokens. Pure and deterministic."""
    tokens: tuple[Token, ...] = _reposition(
        Token(id=t.id, surface=t.surface, position=i) for i, t in enumerate(raw_tokens)
    )
    for op in ops:
        tokens = apply_op(sentence_id, tokens, op)
    return tokens


def _check_surface(surface: str, what: str) -> None:
    if not surface:
        raise InvalidEditError(f"{what} must not be empty")
    if any(ch.isspace() for ch in surface):
        raise InvalidEditError(f"{what} must not contain whitespace: {surface!r}")


def _without(mapping: Mapping, keys: Iterable[str]) -> dict:
    drop = set(keys)
    return {k: v for k, v in mapping.items() if k not in drop}


def _record(
    s: Sentence,
    op: EditOp,
    drop_annotations: Sequence[str] = (),
    drop_suggestions: Sequence[str] = (),
) -> Sentence:
    log = s.log.appended(op)
    tokens = apply_op(s.id, s.tokens, op)
    annotations = _without(s.annotations, drop_annotations) if drop_annotations else s.annotations
    suggestions = _without(s.suggestions, drop_suggestions) if drop_suggestions else s.suggestions
    return replace(s, log=log, tokens=tokens, annotations=annotations, suggestions=suggestions)


def modify_token(
    s: Sentence,
    token_id: str,
    new_surface: str,
    author: str = "",
    now: datetime | None = None,
) -> Sentence:
    """Replace one token's surface. A same-surface modify is a no-op and is
    not recorded. The token keeps its id, so an existing annotation survives,
    going stale until the surface matches it again."""
    _check_surface(new_surface, "token surface")
    i = _index_of(s.tokens, token_id)
    old = s.tokens[i].surface
    if old == new_surface:
        return s
    op = EditOp(
        kind=EditKind.MODIFY,
        targets=(token_id,),
        before=(old,),
        after=(new_surface,),
        author=author,
        timestamp=now or utcnow(),
        seq=s.log.next_seq,
    )
    return _record(s, op)


def split_token(
    s: Sentence,
    token_id: str,
    parts: Sequence[str],
    author: str = "",
    now: datetime | None = None,
) -> Sentence:
    """Split one token into two or more. The original's annotation and
    precomputed suggestions are discarded; the children start unannotated."""
    if len(parts) < 2:
        raise InvalidEditError("split needs at least 2 parts")
    for part in parts:
        _check_surface(part, "split part")
    i = _index_of(s.tokens, token_id)
    op = EditOp(
        kind=EditKind.SPLIT,
        targets=(token_id,),
        before=(s.tokens[i].surface,),
        after=tuple(parts),
        author=author,
        timestamp=now or utcnow(),
        seq=s.log.next_seq,
    )
    return _record(s, op, drop_annotations=[token_id], drop_suggestions=[token_id])


def merge_tokens(
    s: Sentence,
    token_ids: Sequence[str],
    author: str = "",
    now: datetime | None = None,
) -> Sentence:
    """Merge two or more adjacent tokens into one; the surface is the direct
    concatenation in sentence order. Constituent annotations are dropped."""
    if len(token_ids) < 2:
        raise InvalidEditError("merge needs at least 2 tokens")
    if len(set(token_ids)) != len(token_ids):
        raise InvalidEditError("merge targets must be distinct")
    indexed = sorted((_index_of(s.tokens, tid), tid) for tid in token_ids)
    positions = [i for i, _ in indexed]
    if positions != list(range(positions[0], positions[-1] + 1)):
        raise InvalidEditError("merge targets must be adjacent")
    ordered = [s.tokens[i] for i in positions]
    op = EditOp(
        kind=EditKind.MERGE,
        targets=tuple(t.id for t in ordered),
        before=tuple(t.surface for t in ordered),
        after=("".join(t.surface for t in ordered),),
        author=author,
        timestamp=now or utcnow(),
        seq=s.log.next_seq,
    )
    return _record(
        s, op, drop_annotations=[t.id for t in ordered], drop_suggestions=[t.id for t in ordered]
    )


def undo(s: Sentence) -> Sentence:
    """Move the cursor back one op. Token state is recomputed by replaying
    the shorter prefix; annotation records are left untouched."""
    if not s.log.can_undo:
        raise NothingToUndoError("nothing to undo")
    log = replace(s.log, cursor=s.log.cursor - 1)
    tokens = replay(s.id, s.raw_tokens, log.applied)
    return replace(s, log=log, tokens=tokens)


def redo(s: Sentence) -> Sentence:
    if not s.log.can_redo:
        raise NothingToRedoError("nothing to redo")
    op = s.log.ops[s.log.cursor]
    log = replace(s.log, cursor=s.log.cursor + 1)
    tokens = apply_op(s.id, s.tokens, op)
    return replace(s, log=log, tokens=tokens)


@dataclass(frozen=True)
class Alignment:
    """Total relation between raw token ids and current token ids, derived
    purely from the applied edit log."""

    pairs: frozenset[tuple[str, str]]
    raw_to_current: Mapping[str, tuple[str, ...]]
    current_to_raw: Mapping[str, tuple[str, ...]]


def _trace(s: Sentence) -> tuple[tuple[Token, ...], dict[str, tuple[str, ...]], set[str]]:
    """Replay the applied log while tracking, for every current token, the raw
    tokens it descends from, and the set of raw ids touched by any op."""
    tokens: list[Token] = [
        Token(id=t.id, surface=t.surface, position=i) for i, t in enumerate(s.raw_tokens)
    ]
    ancestors: dict[str, tuple[str, ...]] = {t.id: (t.id,) for t in s.raw_tokens}
    touched: set[str] = set()
    for op in s.log.applied:
        target_ancestors: list[str] = []
        for tid in op.targets:
            target_ancestors.extend(ancestors[tid])
        touched.update(target_ancestors)
        new_tokens = apply_op(s.id, tokens, op)
        if op.kind is EditKind.SPLIT:
            for k in range(len(op.after)):
                ancestors[_child_id(s.id, op.seq, k)] = tuple(target_ancestors)
        elif op.kind is EditKind.MERGE:
            ancestors[_child_id(s.id, op.seq, 0)] = tuple(target_ancestors)
        tokens = list(new_tokens)
    return tuple(tokens), ancestors, touched


def alignment(s: Sentence) -> Alignment:
    tokens, ancestors, _ = _trace(s)
    pairs: set[tuple[str, str]] = set()
    raw_to_current: dict[str, list[str]] = {t.id: [] for t in s.raw_tokens}
    current_to_raw: dict[str, tuple[str, ...]] = {}
    for token in tokens:
        raws = ancestors[token.id]
        current_to_raw[token.id] = raws
        for raw_id in raws:
            pairs.add((raw_id, token.id))
            raw_to_current[raw_id].append(token.id)
    return Alignment(
        pairs=frozenset(pairs),
        raw_to_current={k: tuple(v) for k, v in raw_to_current.items()},
        current_to_raw=current_to_raw,
    )


@dataclass(frozen=True)
class EditStats:
    tokens_raw: int
    tokens_current: int
    changed_words: int
    change_rate: float
    splits: int
    merges: int
    modifies: int


def format_change_rate(rate: float) -> str:
    """Nearest whole percent, half rounding up."""
    return f"{int(rate * 100 + 0.5)}%"


def edit_stats(doc: Document) -> EditStats:
    """Corpus-level counts over the applied ops of every sentence.

    changed_words counts the raw tokens touched by at least one applied op,
    so a token modified twice, or split and then re-modified, counts once.
    """
    tokens_raw = 0
    tokens_current = 0
    changed = 0
    splits = merges = modifies = 0
    for sentence in doc.sentences:
        tokens_raw += len(sentence.raw_tokens)
        tokens_current += len(sentence.tokens)
        _, _, touched = _trace(sentence)
        changed += len(touched)
        for op in sentence.log.applied:
            if op.kind is EditKind.SPLIT:
                splits += 1
            elif op.kind is EditKind.MERGE:
                merges += 1
            else:
                modifies += 1
    rate = changed / tokens_raw if tokens_raw else 0.0
    return EditStats(
        tokens_raw=tokens_raw,
        tokens_current=tokens_current,
        changed_words=changed,
        change_rate=rate,
        splits=splits,
        merges=merges,
        modifies=modifies,
    )


def edit_log_jsonl(source: Sentence | Document) -> str:
    """Export applied ops as JSON lines, one record per op.

    Record fields are exactly: kind, targets, before, after, author,
    timestamp (RFC 3339). Undone ops are not exported.
    """
    sentences = source.sentences if isinstance(source, Document) else [source]
    lines = []
    for sentence in sentences:
        for op in sentence.log.applied:
            lines.append(
                json.dumps(
                    {
                        "kind": op.kind.value,
                        "targets": list(op.targets),
                        "before": list(op.before),
                        "after": list(op.after),
                        "author": op.author,
                        "timestamp": op.timestamp.isoformat(),
                    },
                    ensure_ascii=False,
                )
            )
    return "\n".join(lines) + ("\n" if lines else "")

"""Shared test utilities: independent oracles and fixture builders.

The replay oracle here is deliberately written from scratch against the
documented contract (including the id-minting scheme) rather than reusing
the engine's own replay, so engine bugs cannot hide behind themselves.
"""

from __future__ import annotations

import random

from morphedit import editing
from morphedit.model import (
    Analysis,
    Document,
    EditKind,
    MorphAnnotation,
    Segment,
    Sentence,
    Source,
)

# -- independent replay oracle -------------------------------------------


def oracle_replay(sentence: Sentence) -> list[tuple[str, str, str, int]]:
    """Replay the applied log against the raw tokens with plain lists.

    Returns (id, surface, provenance, position) tuples.
    """
    toks: list[list] = [[t.id, t.surface, "raw"] for t in sentence.raw_tokens]

    def index_of(token_id: str) -> int:
        for i, entry in enumerate(toks):
            if entry[0] == token_id:
                return i
        raise AssertionError(f"oracle: missing token {token_id}")

    for op in sentence.log.applied:
        if op.kind is EditKind.MODIFY:
            i = index_of(op.targets[0])
            toks[i] = [toks[i][0], op.after[0], "edited"]
        elif op.kind is EditKind.SPLIT:
            i = index_of(op.targets[0])
            children = [
                [f"{sentence.id}.e{op.seq}.{k}", part, "split-child"]
                for k, part in enumerate(op.after)
            ]
            toks[i : i + 1] = children
        elif op.kind is EditKind.MERGE:
            indices = sorted(index_of(tid) for tid in op.targets)
            merged = [f"{sentence.id}.e{op.seq}.0", "".join(op.before), "merge-result"]
            toks[indices[0] : indices[-1] + 1] = [merged]
    return [(tid, surface, prov, i) for i, (tid, surface, prov) in enumerate(toks)]


def engine_state(sentence: Sentence) -> list[tuple[str, str, str, int]]:
    return [(t.id, t.surface, t.provenance.value, t.position) for t in sentence.tokens]


def expected_token_count(sentence: Sentence) -> int:
    """Count invariant: raw + sum(split parts - 1) - sum(merge targets - 1)."""
    n = len(sentence.raw_tokens)
    for op in sentence.log.applied:
        if op.kind is EditKind.SPLIT:
            n += len(op.after) - 1
        elif op.kind is EditKind.MERGE:
            n -= len(op.targets) - 1
    return n


def random_surface(rng: random.Random, max_len: int = 6) -> str:
    alphabet = "AbdtjHxrszqklmnwyESgf"
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))


def random_edit_step(rng: random.Random, sentence: Sentence) -> Sentence:
    """Apply one random engine action (edit, undo, or redo) and return the
    new sentence. Falls back to a modify when a pick is not applicable."""
    choice = rng.random()
    tokens = sentence.tokens
    if choice < 0.15 and sentence.log.can_undo:
        return editing.undo(sentence)
    if choice < 0.25 and sentence.log.can_redo:
        return editing.redo(sentence)
    if not tokens:
        return sentence
    token = tokens[rng.randrange(len(tokens))]
    kind = rng.random()
    if kind < 0.30 and len(tokens) >= 2:
        start = rng.randrange(len(tokens) - 1)
        width = rng.randint(2, min(3, len(tokens) - start))
        ids = [t.id for t in tokens[start : start + width]]
        return editing.merge_tokens(sentence, ids, author="fuzz")
    if kind < 0.60 and len(token.surface) >= 2:
        cut = rng.randint(1, len(token.surface) - 1)
        parts = [token.surface[:cut], token.surface[cut:]]
        if rng.random() < 0.3 and len(token.surface) - cut >= 2:
            second = parts[1]
            cut2 = rng.randint(1, len(second) - 1)
            parts = [parts[0], second[:cut2], second[cut2:]]
        return editing.split_token(sentence, token.id, parts, author="fuzz")
    new_surface = random_surface(rng)
    if new_surface == token.surface:
        new_surface = new_surface + "x"
    return editing.modify_token(sentence, token.id, new_surface, author="fuzz")


# -- annotation builders ---------------------------------------------------


def simple_annotation(
    surface: str,
    pos: str = "NOUN",
    lemma: str | None = None,
    gloss: str = "",
    proclitics: list[tuple[str, str]] | None = None,
    enclitics: list[tuple[str, str]] | None = None,
    source: Source = Source.HUMAN,
) -> MorphAnnotation:
    return MorphAnnotation(
        proclitics=tuple(Segment(s, p) for s, p in (proclitics or [])),
        baseword=Segment(surface, pos),
        enclitics=tuple(Segment(s, p) for s, p in (enclitics or [])),
        lemma=lemma if lemma is not None else surface,
        gloss=gloss,
        source=source,
    )


def gulf_annotation() -> MorphAnnotation:
    """The worked example: w+ jAbwA +hA for the surface wjAbwhA."""
    return MorphAnnotation(
        proclitics=(Segment("w", "CONJ"),),
        baseword=Segment("jAbwA", "VERB", {"aspect": "p", "person": "3", "number": "p"}),
        enclitics=(Segment("hA", "PRON", {"person": "3", "gender": "f", "number": "s"}),),
        lemma="jAb",
        gloss="and+ they-brought +it",
    )


def make_document(
    sentences: list[list[str]],
    doc_id: str = "d1",
    title: str = "test",
    dialect: str = "GLF",
) -> Document:
    return Document(
        id=doc_id,
        title=title,
        dialect=dialect,
        sentences=[
            Sentence.from_surfaces(f"{doc_id}.s{i}", surfaces)
            for i, surfaces in enumerate(sentences)
        ],
    )


def suggestion_for(
    annotation: MorphAnnotation, dialect: str = "GLF", score: float = 0.9
) -> Analysis:
    return Analysis(
        annotation=annotation.with_source(Source.SUGGESTED),
        dialect=dialect,
        score=score,
        provider="lexicon",
    )


# -- document content comparison -------------------------------------------


def annotation_content(record) -> tuple:
    return (
        record.annotation.content_key(),
        record.annotation.source.value,
        record.for_surface,
    )


def document_content(doc: Document) -> dict:
    """Everything that counts as document content for round-trip checks."""
    return {
        "title": doc.title,
        "dialect": doc.dialect,
        "status": doc.status.value,
        "assignee": doc.assignee,
        "version": doc.version,
        "review_note": doc.review_note,
        "sentences": [
            {
                "id": s.id,
                "raw": [(t.id, t.surface) for t in s.raw_tokens],
                "tokens": engine_state(s),
                "ops": [op.to_dict() for op in s.log.ops],
                "cursor": s.log.cursor,
                "annotations": {
                    tid: rec.to_dict() for tid, rec in sorted(s.annotations.items())
                },
                "suggestions": {
                    tid: [a.to_dict() for a in ranked]
                    for tid, ranked in sorted(s.suggestions.items())
                },
            }
            for s in doc.sentences
        ],
    }


def random_document(rng: random.Random, doc_id: str = "d1") -> Document:
    """Random document with edits, annotations, and suggestions, for
    round-trip and report property tests."""
    from morphedit.model import AnnotationRecord, utcnow

    n_sentences = rng.randint(1, 5)
    doc = make_document(
        [
            [random_surface(rng) for _ in range(rng.randint(1, 10))]
            for _ in range(n_sentences)
        ],
        doc_id=doc_id,
    )
    for sentence in list(doc.sentences):
        edited = sentence
        for _ in range(rng.randint(0, 8)):
            edited = random_edit_step(rng, edited)
        annotations = dict(edited.annotations)
        suggestions = dict(edited.suggestions)
        for token in edited.tokens:
            if rng.random() < 0.5:
                ann = simple_annotation(
                    token.surface,
                    pos=rng.choice(["NOUN", "VERB", "ADJ", "PART"]),
                    lemma=random_surface(rng),
                    gloss=rng.choice(["house", "gulf", "they-wrote", ""]),
                    source=rng.choice([Source.HUMAN, Source.BULK_APPLIED]),
                )
                annotations[token.id] = AnnotationRecord(
                    annotation=ann,
                    for_surface=token.surface,
                    author="a1",
                    seq=rng.randint(1, 50),
                    updated_at=utcnow(),
                )
            if rng.random() < 0.4:
                suggestions[token.id] = (
                    suggestion_for(simple_annotation(token.surface)),
                )
        doc.replace_sentence(
            Sentence(
                id=edited.id,
                raw_tokens=edited.raw_tokens,
                log=edited.log,
                tokens=edited.tokens,
                annotations=annotations,
                suggestions=suggestions,
            )
        )
    doc.version = rng.randint(1, 20)
    return doc

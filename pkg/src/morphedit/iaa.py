"""Quality evaluation: field-wise agreement between two versions of the same
document, chance-corrected agreement for baseword POS, and accuracy of the
precomputed suggestions against the final annotations."""

from __future__ import annotations

from dataclasses import dataclass
from collections import Counter

from .errors import MismatchedRawTextError
from .editing import alignment
from .model import Document, MorphAnnotation, Sentence, Source

from .morphology import FALLBACK_PROVIDER


@dataclass(frozen=True)
class ComparablePair:
    sentence_id: str
    a_token_id: str
    b_token_id: str
    surface: str


@dataclass(frozen=True)
class VersionAlignment:
    """Pairing of two documents' current tokens through their shared raw
    tokens. 2 * len(comparable) + unaligned equals the total current token
    count across both versions."""

    comparable: tuple[ComparablePair, ...]
    unaligned: int


def _ancestry_groups(sentence: Sentence) -> dict[tuple[str, ...], list[str]]:
    """Current token ids grouped by their raw-ancestry tuple, in sentence
    order. An untouched or modified token forms a singleton group keyed by
    its own raw token; split children share their parent's key; a merge
    result is keyed by every raw token it absorbed."""
    align = alignment(sentence)
    groups: dict[tuple[str, ...], list[str]] = {}
    for token in sentence.tokens:
        groups.setdefault(align.current_to_raw[token.id], []).append(token.id)
    return groups


def align_versions(a: Document, b: Document) -> VersionAlignment:
    """Pair current tokens of two documents that share identical raw tokens.

    Tokens pair positionally within equal raw-ancestry groups: a pair is
    comparable iff both sides descend from the same raw tokens, the group
    fans out identically on both sides, and the surfaces are equal. Two
    versions with identical edit logs are therefore fully comparable, while
    a token one side split or merged differently is unaligned on both sides.
    """
    a_sentences = {s.id: s for s in a.sentences}
    b_sentences = {s.id: s for s in b.sentences}
    if set(a_sentences) != set(b_sentences):
        raise MismatchedRawTextError("documents do not contain the same sentences")
    comparable: list[ComparablePair] = []
    total_current = 0
    for sid in (s.id for s in a.sentences):
        sa = a_sentences[sid]
        sb = b_sentences[sid]
        raw_a = [(t.id, t.surface) for t in sa.raw_tokens]
        raw_b = [(t.id, t.surface) for t in sb.raw_tokens]
        if raw_a != raw_b:
            raise MismatchedRawTextError(f"raw tokens differ in sentence {sid}")
        total_current += len(sa.tokens) + len(sb.tokens)
        groups_a = _ancestry_groups(sa)
        groups_b = _ancestry_groups(sb)
        surfaces_a = {t.id: t.surface for t in sa.tokens}
        surfaces_b = {t.id: t.surface for t in sb.tokens}
        for key, ids_a in groups_a.items():
            ids_b = groups_b.get(key)
            if ids_b is None or len(ids_b) != len(ids_a):
                continue
            for ida, idb in zip(ids_a, ids_b):
                if surfaces_a[ida] != surfaces_b[idb]:
                    continue
                comparable.append(
                    ComparablePair(
                        sentence_id=sid,
                        a_token_id=ida,
                        b_token_id=idb,
                        surface=surfaces_a[ida],
                    )
                )
    return VersionAlignment(
        comparable=tuple(comparable),
        unaligned=total_current - 2 * len(comparable),
    )


def cohen_kappa(labels_a: list[str], labels_b: list[str]) -> float | None:
    """Chance-corrected agreement (po - pe) / (1 - pe) over paired labels.

    Returns None for empty input. Perfect observed agreement is reported as
    1.0 even when the marginals are degenerate (pe == 1).
    """
    if not labels_a:
        return None
    n = len(labels_a)
    observed = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    if observed == 1.0:
        return 1.0
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    expected = sum(count_a[k] * count_b.get(k, 0) for k in count_a) / (n * n)
    return (observed - expected) / (1.0 - expected)


@dataclass(frozen=True)
class IAAReport:
    aligned_tokens: int
    unaligned_tokens: int
    evaluated: int
    tokenization_agreement: float | None
    baseword_pos_agreement: float | None
    lemma_agreement: float | None
    gloss_agreement: float | None
    pos_kappa: float | None

    def to_dict(self) -> dict:
        return {
            "aligned_tokens": self.aligned_tokens,
            "unaligned_tokens": self.unaligned_tokens,
            "evaluated": self.evaluated,
            "tokenization_agreement": self.tokenization_agreement,
            "baseword_pos_agreement": self.baseword_pos_agreement,
            "lemma_agreement": self.lemma_agreement,
            "gloss_agreement": self.gloss_agreement,
            "pos_kappa": self.pos_kappa,
        }


def _fresh_annotation(sentence: Sentence, token_id: str) -> MorphAnnotation | None:
    token = sentence.token_by_id(token_id)
    record = sentence.annotations.get(token_id)
    if token is None or record is None or record.stale_for(token):
        return None
    return record.annotation


def compute_iaa(a: Document, gold: Document) -> IAAReport:
    """Field-wise agreement over comparable pairs.

    Tokenization agrees iff the segment-surface sequences match exactly; POS
    compares baseword tags; lemma is case-sensitive exact match and gloss
    case-insensitive. Pairs lacking a fresh annotation on either side are
    excluded from the denominators. The report is symmetric in its inputs.
    """
    pairing = align_versions(a, gold)
    a_sentences = {s.id: s for s in a.sentences}
    gold_sentences = {s.id: s for s in gold.sentences}
    tok_hits = pos_hits = lemma_hits = gloss_hits = 0
    labels_a: list[str] = []
    labels_b: list[str] = []
    evaluated = 0
    for pair in pairing.comparable:
        ann_a = _fresh_annotation(a_sentences[pair.sentence_id], pair.a_token_id)
        ann_b = _fresh_annotation(gold_sentences[pair.sentence_id], pair.b_token_id)
        if ann_a is None or ann_b is None:
            continue
        evaluated += 1
        if ann_a.surfaces() == ann_b.surfaces():
            tok_hits += 1
        if ann_a.baseword.pos == ann_b.baseword.pos:
            pos_hits += 1
        if ann_a.lemma == ann_b.lemma:
            lemma_hits += 1
        if ann_a.gloss.casefold() == ann_b.gloss.casefold():
            gloss_hits += 1
        labels_a.append(ann_a.baseword.pos)
        labels_b.append(ann_b.baseword.pos)
    if evaluated == 0:
        return IAAReport(
            aligned_tokens=len(pairing.comparable),
            unaligned_tokens=pairing.unaligned,
            evaluated=0,
            tokenization_agreement=None,
            baseword_pos_agreement=None,
            lemma_agreement=None,
            gloss_agreement=None,
            pos_kappa=None,
        )
    return IAAReport(
        aligned_tokens=len(pairing.comparable),
        unaligned_tokens=pairing.unaligned,
        evaluated=evaluated,
        tokenization_agreement=tok_hits / evaluated,
        baseword_pos_agreement=pos_hits / evaluated,
        lemma_agreement=lemma_hits / evaluated,
        gloss_agreement=gloss_hits / evaluated,
        pos_kappa=cohen_kappa(labels_a, labels_b),
    )


@dataclass(frozen=True)
class SuggestionAccuracyReport:
    evaluated: int
    tokenization_acc: float | None
    baseword_pos_acc: float | None
    lemma_acc: float | None

    def to_dict(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "tokenization_acc": self.tokenization_acc,
            "baseword_pos_acc": self.baseword_pos_acc,
            "lemma_acc": self.lemma_acc,
        }


def suggestion_accuracy(doc: Document) -> SuggestionAccuracyReport:
    """Fraction of tokens whose final annotation kept the top-1 suggestion,
    per field. Only tokens that still carry a non-fallback suggestion and
    have a human or bulk-applied annotation are evaluated; split children
    (whose suggestions were discarded) therefore drop out of the denominator.
    """
    evaluated = 0
    tok_hits = pos_hits = lemma_hits = 0
    for sentence in doc.sentences:
        for token in sentence.tokens:
            ranked = sentence.suggestions.get(token.id)
            if not ranked or ranked[0].provider == FALLBACK_PROVIDER:
                continue
            record = sentence.annotations.get(token.id)
            if record is None or record.annotation.source is Source.SUGGESTED:
                continue
            suggested = ranked[0].annotation
            final = record.annotation
            evaluated += 1
            if final.surfaces() == suggested.surfaces():
                tok_hits += 1
            if final.baseword.pos == suggested.baseword.pos:
                pos_hits += 1
            if final.lemma == suggested.lemma:
                lemma_hits += 1
    if evaluated == 0:
        return SuggestionAccuracyReport(0, None, None, None)
    return SuggestionAccuracyReport(
        evaluated=evaluated,
        tokenization_acc=tok_hits / evaluated,
        baseword_pos_acc=pos_hits / evaluated,
        lemma_acc=lemma_hits / evaluated,
    )

"""Annotation workflow: providers, suggestion precomputation, analysis
search, submission, and bulk apply."""

from __future__ import annotations

import json

import pytest

from helpers import gulf_annotation, make_document, simple_annotation
from morphedit import editing, morphology
from morphedit.errors import (
    ForbiddenError,
    ProviderError,
    UnknownTokenError,
    ValidationFailure,
)
from morphedit.model import Role, Source, User
from morphedit.morphology import (
    FALLBACK_PROVIDER,
    LexiconProvider,
    fallback_analysis,
    precompute_suggestions,
    search_analyses,
)

LEAD = User(id="u1", name="lead", role=Role.LEAD)
ANNOTATOR = User(id="u2", name="worker", role=Role.ANNOTATOR)
OTHER = User(id="u3", name="other", role=Role.ANNOTATOR)


def assigned(doc):
    doc.assignee = ANNOTATOR.id
    return doc


class TestLexiconProvider:
    def test_known_surface_sorted_by_score(self):
        provider = LexiconProvider.bundled()
        ranked = provider.analyze("ktb", "GLF")
        assert len(ranked) == 2
        assert [a.score for a in ranked] == sorted(
            (a.score for a in ranked), reverse=True
        )
        assert ranked[0].annotation.baseword.pos == "VERB"

    def test_dialects_can_differ(self):
        provider = LexiconProvider.bundled()
        glf = provider.analyze("mA", "GLF")
        msa = provider.analyze("mA", "MSA")
        assert glf[0].annotation.baseword.pos == "PART"
        assert msa[0].annotation.baseword.pos == "PRON"

    def test_unknown_surface_is_empty(self):
        assert LexiconProvider.bundled().analyze("zzzz", "GLF") == []

    def test_unlisted_dialect_falls_back_to_first(self):
        provider = LexiconProvider.bundled()
        assert provider.analyze("w", "EGY")[0].annotation.baseword.pos == "CONJ"

    def test_deterministic(self):
        provider = LexiconProvider.bundled()
        first = provider.analyze("wjAbwhA", "GLF")
        second = provider.analyze("wjAbwhA", "GLF")
        assert first == second


class TestPrecompute:
    def test_empty_document(self):
        doc = make_document([])
        assert precompute_suggestions(doc, LexiconProvider.bundled()) == {}

    def test_prefill_totality_and_fixture_lookup(self):
        doc = make_document([["wjAbwhA", "Alxlyj", "zzzun"]])
        suggestion_map = precompute_suggestions(doc, LexiconProvider.bundled())
        sentence = doc.sentences[0]
        assert set(suggestion_map) == {t.id for t in sentence.tokens}
        for token in sentence.tokens:
            record = sentence.annotations[token.id]
            assert record.annotation.source is Source.SUGGESTED
            assert not record.stale_for(token)
        known = sentence.annotations[f"{sentence.id}.r0"].annotation
        assert known.gloss == "and+ they-brought +it"

    def test_oov_gets_fallback(self):
        doc = make_document([["zzzun"]])
        suggestion_map = precompute_suggestions(doc, LexiconProvider.bundled())
        [ranked] = suggestion_map.values()
        assert len(ranked) == 1
        assert ranked[0].provider == FALLBACK_PROVIDER
        assert ranked[0].annotation.baseword.surface == "zzzun"
        assert ranked[0].annotation.lemma == "zzzun"
        assert ranked[0].annotation.gloss == ""

    def test_deterministic_byte_identical(self):
        def build():
            doc = make_document([["wjAbwhA", "mA"], ["ktb"]])
            precompute_suggestions(doc, LexiconProvider.bundled())
            return json.dumps(
                {
                    s.id: {
                        tid: [a.to_dict() for a in ranked]
                        for tid, ranked in sorted(s.suggestions.items())
                    }
                    for s in doc.sentences
                },
                sort_keys=True,
            )

        assert build() == build()

    def test_provider_failure_leaves_document_untouched(self):
        class Flaky:
            name = "flaky"

            def __init__(self):
                self.calls = 0

            def analyze(self, surface, dialect):
                self.calls += 1
                if self.calls >= 2:
                    raise RuntimeError("backend down")
                return []

        doc = make_document([["a", "b", "c"]])
        with pytest.raises(ProviderError):
            precompute_suggestions(doc, Flaky())
        sentence = doc.sentences[0]
        assert sentence.annotations == {}
        assert sentence.suggestions == {}


class TestSearch:
    def test_novel_surface_has_no_priors(self):
        doc = assigned(make_document([["xyz"]]))
        results = search_analyses("xyz", "GLF", [doc], LexiconProvider.bundled())
        assert results.prior_annotations == ()
        assert results.provider_analyses == ()

    def test_identical_submissions_dedup(self, tagset):
        doc = assigned(make_document([["ktb", "ktb"]]))
        sentence = doc.sentences[0]
        ann = simple_annotation("ktb", pos="VERB", gloss="he-wrote")
        morphology.submit_annotation(doc, f"{sentence.id}.r0", ann, ANNOTATOR, tagset)
        morphology.submit_annotation(doc, f"{sentence.id}.r1", ann, ANNOTATOR, tagset)
        results = search_analyses("ktb", "GLF", [doc], LexiconProvider.bundled())
        assert len(results.prior_annotations) == 1

    def test_most_recent_first(self, tagset):
        doc = assigned(make_document([["ktb", "ktb"]]))
        sentence = doc.sentences[0]
        first = simple_annotation("ktb", pos="VERB", gloss="he-wrote")
        second = simple_annotation("ktb", pos="NOUN", gloss="books")
        morphology.submit_annotation(doc, f"{sentence.id}.r0", first, ANNOTATOR, tagset)
        morphology.submit_annotation(doc, f"{sentence.id}.r1", second, ANNOTATOR, tagset)
        results = search_analyses("ktb", "GLF", [doc], LexiconProvider.bundled())
        assert [a.baseword.pos for a in results.prior_annotations] == ["NOUN", "VERB"]

    def test_suggested_prefill_not_included(self):
        doc = make_document([["wjAbwhA"]])
        precompute_suggestions(doc, LexiconProvider.bundled())
        results = search_analyses("wjAbwhA", "GLF", [doc], LexiconProvider.bundled())
        assert results.prior_annotations == ()
        assert len(results.provider_analyses) == 2

    def test_stale_annotations_excluded(self, tagset):
        doc = assigned(make_document([["ktb"]]))
        sentence = doc.sentences[0]
        ann = simple_annotation("ktb", pos="VERB")
        morphology.submit_annotation(doc, f"{sentence.id}.r0", ann, ANNOTATOR, tagset)
        sentence = doc.sentences[0]
        doc.replace_sentence(
            editing.modify_token(sentence, f"{sentence.id}.r0", "ktAb")
        )
        # the annotated surface no longer exists; nothing current matches "ktb"
        results = search_analyses("ktb", "GLF", [doc], LexiconProvider.bundled())
        assert results.prior_annotations == ()

    def test_empty_surface_rejected(self):
        with pytest.raises(ValidationFailure):
            search_analyses("", "GLF", [], LexiconProvider.bundled())

    def test_dialect_switches_provider_results(self):
        results_glf = search_analyses("mA", "GLF", [], LexiconProvider.bundled())
        results_msa = search_analyses("mA", "MSA", [], LexiconProvider.bundled())
        assert results_glf.provider_analyses != results_msa.provider_analyses


class TestSubmit:
    def test_valid_submission_stored(self, tagset):
        doc = assigned(make_document([["wjAbwhA"]]))
        sentence = doc.sentences[0]
        before = doc.version
        record = morphology.submit_annotation(
            doc, f"{sentence.id}.r0", gulf_annotation(), ANNOTATOR, tagset
        )
        assert record.annotation.source is Source.HUMAN
        assert record.for_surface == "wjAbwhA"
        assert doc.version == before + 1
        stored = doc.sentences[0].annotations[f"{sentence.id}.r0"]
        assert stored == record
        assert not stored.stale_for(doc.sentences[0].tokens[0])

    def test_submit_clears_staleness(self, tagset):
        doc = assigned(make_document([["wyAbwhA"]]))
        sentence = doc.sentences[0]
        tid = f"{sentence.id}.r0"
        morphology.submit_annotation(
            doc, tid, simple_annotation("wyAbwhA"), ANNOTATOR, tagset
        )
        doc.replace_sentence(editing.modify_token(doc.sentences[0], tid, "wjAbwhA"))
        assert doc.sentences[0].annotations[tid].stale_for(doc.sentences[0].tokens[0])
        morphology.submit_annotation(doc, tid, gulf_annotation(), ANNOTATOR, tagset)
        assert not doc.sentences[0].annotations[tid].stale_for(
            doc.sentences[0].tokens[0]
        )

    def test_invalid_pos_rejected_with_violations(self, tagset):
        doc = assigned(make_document([["ktb"]]))
        with pytest.raises(ValidationFailure) as err:
            morphology.submit_annotation(
                doc,
                f"{doc.sentences[0].id}.r0",
                simple_annotation("ktb", pos="XYZ"),
                ANNOTATOR,
                tagset,
            )
        assert any("unknown tag" in v for v in err.value.violations)

    def test_unknown_token(self, tagset):
        doc = assigned(make_document([["ktb"]]))
        with pytest.raises(UnknownTokenError):
            morphology.submit_annotation(
                doc, "nope", simple_annotation("ktb"), ANNOTATOR, tagset
            )

    def test_non_assignee_forbidden(self, tagset):
        doc = assigned(make_document([["ktb"]]))
        with pytest.raises(ForbiddenError):
            morphology.submit_annotation(
                doc, f"{doc.sentences[0].id}.r0", simple_annotation("ktb"), OTHER, tagset
            )

    def test_lead_may_annotate_any_document(self, tagset):
        doc = assigned(make_document([["ktb"]]))
        record = morphology.submit_annotation(
            doc, f"{doc.sentences[0].id}.r0", simple_annotation("ktb"), LEAD, tagset
        )
        assert record.author == LEAD.id


class TestBulkApply:
    def doc_with_three_matches(self):
        return assigned(
            make_document([["Alxlyj", "fy"], ["Alxlyj"], ["w", "Alxlyj"]])
        )

    def ann(self):
        return simple_annotation(
            "xlyj", pos="NOUN", lemma="xlyj", gloss="the+ Gulf",
            proclitics=[("Al", "DET")],
        )

    def test_applies_to_every_exact_match(self, tagset):
        doc = self.doc_with_three_matches()
        count = morphology.apply_to_matching(doc, "Alxlyj", self.ann(), ANNOTATOR, tagset)
        # brute-force scan oracle
        expected = sum(1 for _, t in doc.current_tokens() if t.surface == "Alxlyj")
        assert count == expected == 3
        for sentence, tok in doc.current_tokens():
            if tok.surface == "Alxlyj":
                record = sentence.annotations[tok.id]
                assert record.annotation.source is Source.BULK_APPLIED
                assert record.annotation.content_key() == self.ann().content_key()

    def test_zero_matches_is_not_an_error(self, tagset):
        doc = self.doc_with_three_matches()
        count = morphology.apply_to_matching(
            doc, "xlyj", simple_annotation("xlyj"), ANNOTATOR, tagset
        )
        assert count == 0
        assert all(s.annotations == {} for s in doc.sentences)

    def test_version_bumped_once(self, tagset):
        doc = self.doc_with_three_matches()
        before = doc.version
        morphology.apply_to_matching(doc, "Alxlyj", self.ann(), ANNOTATOR, tagset)
        assert doc.version == before + 1

    def test_near_match_with_extra_mark_not_matched(self, tagset):
        # identical except for a trailing diacritic: exact match rule
        doc = assigned(make_document([["AlxlyjN", "Alxlyj"]]))
        count = morphology.apply_to_matching(doc, "Alxlyj", self.ann(), ANNOTATOR, tagset)
        assert count == 1

    def test_idempotent_modulo_version(self, tagset):
        def content(doc):
            return [
                sorted(
                    (tid, rec.annotation.content_key(), rec.for_surface)
                    for tid, rec in s.annotations.items()
                )
                for s in doc.sentences
            ]

        doc = self.doc_with_three_matches()
        morphology.apply_to_matching(doc, "Alxlyj", self.ann(), ANNOTATOR, tagset)
        first = content(doc)
        morphology.apply_to_matching(doc, "Alxlyj", self.ann(), ANNOTATOR, tagset)
        assert content(doc) == first

    def test_invalid_annotation_rejected(self, tagset):
        doc = self.doc_with_three_matches()
        with pytest.raises(ValidationFailure):
            morphology.apply_to_matching(
                doc, "Alxlyj", simple_annotation("qqq"), ANNOTATOR, tagset
            )


class TestHttpProvider:
    def test_connection_failure_surfaces_as_provider_error(self):
        from morphedit.morphology import HttpProvider

        provider = HttpProvider("http://127.0.0.1:9", timeout=0.2)
        with pytest.raises(ProviderError):
            provider.analyze("ktb", "GLF")

    def test_precompute_aborts_cleanly_on_provider_error(self):
        from morphedit.morphology import HttpProvider

        doc = make_document([["ktb"]])
        with pytest.raises(ProviderError):
            precompute_suggestions(doc, HttpProvider("http://127.0.0.1:9", timeout=0.2))
        assert doc.sentences[0].annotations == {}


class TestFallbackAnalysis:
    def test_shape(self):
        analysis = fallback_analysis("Something", "GLF")
        assert analysis.annotation.baseword.surface == "Something"
        assert analysis.annotation.proclitics == ()
        assert analysis.annotation.enclitics == ()
        assert analysis.score == 0.0
        assert analysis.provider == FALLBACK_PROVIDER

    def test_validates_against_default_tagset(self, tagset):
        from morphedit.model import Token, validate_annotation

        analysis = fallback_analysis("qqq", "GLF")
        token = Token(id="t", surface="qqq", position=0)
        assert validate_annotation(analysis.annotation, token, tagset).ok

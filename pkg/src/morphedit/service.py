"""HTTP API over the annotation workbench.

Every endpoint sits under /api, expects a bearer session token (issued by
POST /api/login), and answers errors as {code, message, details}. Stale
expected_version values on mutating endpoints answer 409. State-changing
requests may carry an X-Request-Id header; retries with the same id return
the first successful response instead of re-running the mutation.

The management operations (upload, assign, submit, review) live here as
plain functions so the CLI can call them against a store directly.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import editing, iaa, morphology, storage, translit
from .config import ServiceConfig
from .errors import (
    ForbiddenError,
    InvalidTransitionError,
    MorphEditError,
    NotFoundError,
    SchemaError,
    UnauthorizedError,
    VersionConflictError,
)
from .model import (
    AnnotationRecord,
    DocStatus,
    Document,
    MorphAnnotation,
    Role,
    Sentence,
    Source,
    TagSet,
    Token,
    User,
    default_tagset,
    load_tagset,
)
from .morphology import AnalyzerProvider, LexiconProvider
from .storage import Store

_EDITABLE = {DocStatus.ASSIGNED, DocStatus.IN_PROGRESS, DocStatus.REJECTED}


# -- management operations (shared by API and CLI) -----------------------


def tokenize_upload(text: str) -> list[list[str]]:
    """Sentences split on newlines, tokens on whitespace runs. Finer
    correction is the annotator's job in the edit engine."""
    sentences = [line.split() for line in text.split("\n")]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise SchemaError("document text is empty")
    return sentences


def upload_document(
    store: Store,
    title: str,
    dialect: str,
    text: str,
    tagset: TagSet,
    provider: AnalyzerProvider,
    fallback_tag: str = "NOUN",
) -> Document:
    doc_id = store.new_document_id()
    sentences = [
        Sentence.from_surfaces(f"{doc_id}.s{i}", surfaces)
        for i, surfaces in enumerate(tokenize_upload(text))
    ]
    doc = Document(
        id=doc_id,
        title=title,
        dialect=dialect,
        sentences=sentences,
        tagset_name=tagset.name,
    )
    morphology.precompute_suggestions(doc, provider, default_tag=fallback_tag)
    return store.create_document(doc)


def assign_document(store: Store, doc: Document, assignee: User) -> Document:
    expected = doc.version
    doc.transition(DocStatus.ASSIGNED)
    doc.assignee = assignee.id
    store.save_document(doc, expected)
    return doc


def submit_document(store: Store, doc: Document, user: User) -> Document:
    if not user.is_lead and doc.assignee != user.id:
        raise ForbiddenError("document is not assigned to you")
    expected = doc.version
    doc.transition(DocStatus.SUBMITTED)
    store.save_document(doc, expected)
    return doc


def review_document(store: Store, doc: Document, verdict: str, note: str) -> Document:
    if verdict not in ("approve", "reject"):
        raise SchemaError(f"verdict must be approve or reject, got {verdict!r}")
    expected = doc.version
    if verdict == "approve":
        doc.transition(DocStatus.APPROVED)
    else:
        doc.transition(DocStatus.REJECTED)
    doc.review_note = note or None
    store.save_document(doc, expected)
    return doc


# -- progress -------------------------------------------------------------


@dataclass(frozen=True)
class ProgressRow:
    user_id: str | None
    document_id: str
    title: str
    status: str
    sentences_total: int
    sentences_edited: int
    sentences_annotated: int
    sentences_submitted: int
    words_total: int
    words_annotated: int
    words_per_hour: float | None

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "document_id": self.document_id,
            "title": self.title,
            "status": self.status,
            "sentences_total": self.sentences_total,
            "sentences_edited": self.sentences_edited,
            "sentences_annotated": self.sentences_annotated,
            "sentences_submitted": self.sentences_submitted,
            "words_total": self.words_total,
            "words_annotated": self.words_annotated,
            "words_per_hour": self.words_per_hour,
        }


def _is_final(record: AnnotationRecord | None) -> bool:
    return record is not None and record.annotation.source is not Source.SUGGESTED


def progress_row(doc: Document) -> ProgressRow:
    sentences_edited = sum(1 for s in doc.sentences if s.log.cursor > 0)
    sentences_annotated = 0
    words_total = 0
    words_annotated = 0
    timestamps: list[datetime] = []
    for sentence in doc.sentences:
        words_total += len(sentence.tokens)
        final = [_is_final(sentence.annotations.get(t.id)) for t in sentence.tokens]
        words_annotated += sum(final)
        if sentence.tokens and all(final):
            sentences_annotated += 1
        timestamps.extend(op.timestamp for op in sentence.log.applied)
        timestamps.extend(
            rec.updated_at
            for rec in sentence.annotations.values()
            if rec.annotation.source is not Source.SUGGESTED
        )
    rate = None
    if len(timestamps) >= 2:
        hours = (max(timestamps) - min(timestamps)).total_seconds() / 3600.0
        if hours > 0:
            rate = words_annotated / hours
    submitted = doc.status in (DocStatus.SUBMITTED, DocStatus.APPROVED)
    return ProgressRow(
        user_id=doc.assignee,
        document_id=doc.id,
        title=doc.title,
        status=doc.status.value,
        sentences_total=len(doc.sentences),
        sentences_edited=sentences_edited,
        sentences_annotated=sentences_annotated,
        sentences_submitted=len(doc.sentences) if submitted else 0,
        words_total=words_total,
        words_annotated=words_annotated,
        words_per_hour=rate,
    )


def progress_report(store: Store, user_scope: str | None = None) -> list[ProgressRow]:
    rows = []
    for doc in store.iter_documents():
        if user_scope is not None and doc.assignee != user_scope:
            continue
        rows.append(progress_row(doc))
    return rows


# -- views ----------------------------------------------------------------


def token_view(sentence: Sentence, token: Token) -> dict:
    record = sentence.annotations.get(token.id)
    ranked = sentence.suggestions.get(token.id, ())
    return {
        "id": token.id,
        "surface": token.surface,
        "position": token.position,
        "provenance": token.provenance.value,
        "annotation": record.annotation.to_dict() if record else None,
        "stale": record.stale_for(token) if record else False,
        "suggestions": [a.to_dict() for a in ranked],
    }


def sentence_view(sentence: Sentence) -> dict:
    return {
        "id": sentence.id,
        "text": sentence.text(),
        "raw_text": " ".join(t.surface for t in sentence.raw_tokens),
        "raw_tokens": [
            {"id": t.id, "surface": t.surface, "position": t.position}
            for t in sentence.raw_tokens
        ],
        "can_undo": sentence.log.can_undo,
        "can_redo": sentence.log.can_redo,
        "tokens": [token_view(sentence, t) for t in sentence.tokens],
    }


def document_view(doc: Document, include_sentences: bool = True) -> dict:
    view = {
        "id": doc.id,
        "title": doc.title,
        "dialect": doc.dialect,
        "status": doc.status.value,
        "assignee": doc.assignee,
        "version": doc.version,
        "review_note": doc.review_note,
        "tagset": doc.tagset_name,
    }
    if include_sentences:
        view["sentences"] = [sentence_view(s) for s in doc.sentences]
    return view


def user_view(user: User) -> dict:
    return {"id": user.id, "name": user.name, "role": user.role.value}


# -- request bodies ---------------------------------------------------------


class LoginBody(BaseModel):
    name: str
    credential: str


class CreateUserBody(BaseModel):
    name: str
    role: str
    credential: str


class UploadBody(BaseModel):
    title: str
    dialect: str
    text: str


class AssignBody(BaseModel):
    user: str
    expected_version: int | None = None


class EditBody(BaseModel):
    kind: str
    targets: list[str]
    after: list[str] = []
    expected_version: int | None = None


class CursorBody(BaseModel):
    expected_version: int | None = None


class AnnotationBody(BaseModel):
    token_id: str
    annotation: dict
    expected_version: int | None = None


class BulkApplyBody(BaseModel):
    surface: str
    annotation: dict
    expected_version: int | None = None


class SubmitBody(BaseModel):
    expected_version: int | None = None


class ReviewBody(BaseModel):
    verdict: str
    note: str = ""
    expected_version: int | None = None


_ERROR_STATUS = {
    "unauthorized": 401,
    "forbidden": 403,
    "not-found": 404,
    "unknown-token": 404,
    "version-conflict": 409,
    "provider-error": 502,
}


@dataclass
class _AppState:
    store: Store
    tagset: TagSet
    provider: AnalyzerProvider
    fallback_tag: str
    sessions: dict[str, str] = field(default_factory=dict)
    idempotency: dict[tuple, tuple[int, bytes, str]] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(
    config: ServiceConfig | None = None,
    store: Store | None = None,
    tagset: TagSet | None = None,
    provider: AnalyzerProvider | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    store = store or Store(config.store_path)
    tagset = tagset or (
        load_tagset(config.tagset_path) if config.tagset_path else default_tagset()
    )
    provider = provider or (
        LexiconProvider.from_file(config.lexicon_path)
        if config.lexicon_path
        else LexiconProvider.bundled()
    )
    state = _AppState(
        store=store, tagset=tagset, provider=provider, fallback_tag=config.fallback_tag
    )
    if config.admin_credential and state.store.count_users() == 0:
        state.store.add_user(config.admin_name, Role.LEAD, config.admin_credential)

    app = FastAPI(title="morphedit", version="0.1.0")
    app.state.morphedit = state

    @app.exception_handler(MorphEditError)
    async def handle_domain_error(request: Request, exc: MorphEditError):
        return JSONResponse(
            status_code=_ERROR_STATUS.get(exc.code, 400),
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "invalid-request",
                "message": "request body failed validation",
                "details": exc.errors(),
            },
        )

    @app.middleware("http")
    async def idempotent_retries(request: Request, call_next):
        request_id = request.headers.get("X-Request-Id")
        if not request_id or request.method != "POST":
            return await call_next(request)
        key = (
            request.headers.get("Authorization", ""),
            request.url.path,
            request_id,
        )
        with state.lock:
            cached = state.idempotency.get(key)
        if cached is not None:
            status_code, body, media_type = cached
            return Response(content=body, status_code=status_code, media_type=media_type)
        response = await call_next(request)
        body = b""
        async for chunk in response.body_iterator:
            body += chunk
        if 200 <= response.status_code < 300:
            with state.lock:
                state.idempotency[key] = (
                    response.status_code,
                    body,
                    response.media_type or "application/json",
                )
        return Response(
            content=body,
            status_code=response.status_code,
            media_type=response.media_type,
        )

    def current_user(request: Request) -> User:
        header = request.headers.get("Authorization", "")
        if not header.startswith("Bearer "):
            raise UnauthorizedError("missing bearer token")
        user_id = state.sessions.get(header[len("Bearer ") :])
        if user_id is None:
            raise UnauthorizedError("invalid or expired session token")
        return state.store.get_user_by_id(user_id)

    def require_lead(user: User) -> None:
        if not user.is_lead:
            raise ForbiddenError("lead role required")

    def load_document_for(user: User, doc_id: str) -> Document:
        doc = state.store.load_document(doc_id)
        if not user.is_lead and doc.assignee != user.id:
            raise ForbiddenError("document is not assigned to you")
        return doc

    def check_expected(doc: Document, expected_version: int | None) -> None:
        if expected_version is not None and expected_version != doc.version:
            raise VersionConflictError(
                f"document {doc.id} is at version {doc.version},"
                f" expected {expected_version}",
                details={"current": doc.version, "expected": expected_version},
            )

    def ensure_editable(doc: Document) -> None:
        if doc.status not in _EDITABLE:
            raise InvalidTransitionError(
                f"document is not editable in status {doc.status.value}"
            )
        if doc.status is not DocStatus.IN_PROGRESS:
            doc.transition(DocStatus.IN_PROGRESS)

    def mutate_sentence(
        user: User,
        doc_id: str,
        sentence_id: str,
        expected_version: int | None,
        fn: Callable[[Sentence], Sentence],
    ) -> dict:
        doc = load_document_for(user, doc_id)
        check_expected(doc, expected_version)
        expected = doc.version
        sentence = doc.sentence_by_id(sentence_id)
        if sentence is None:
            raise NotFoundError(f"no such sentence: {sentence_id}")
        ensure_editable(doc)
        doc.replace_sentence(fn(sentence))
        state.store.save_document(doc, expected)
        return {
            "document_version": doc.version,
            "status": doc.status.value,
            "sentence": sentence_view(doc.sentence_by_id(sentence_id)),
        }

    # -- session and users ------------------------------------------------

    @app.post("/api/login")
    def login(body: LoginBody):
        user = state.store.verify_user(body.name, body.credential)
        if user is None:
            raise UnauthorizedError("unknown user or wrong credential")
        token = secrets.token_hex(16)
        state.sessions[token] = user.id
        return {"token": token, "user": user_view(user)}

    @app.post("/api/users")
    def create_user(body: CreateUserBody, user: User = Depends(current_user)):
        require_lead(user)
        try:
            role = Role(body.role)
        except ValueError:
            raise SchemaError(f"unknown role: {body.role}")
        created = state.store.add_user(body.name, role, body.credential)
        return user_view(created)

    @app.get("/api/users")
    def list_users(user: User = Depends(current_user)):
        require_lead(user)
        return [user_view(u) for u in state.store.list_users()]

    # -- documents ---------------------------------------------------------

    @app.post("/api/documents")
    def upload(body: UploadBody, user: User = Depends(current_user)):
        require_lead(user)
        doc = upload_document(
            state.store,
            body.title,
            body.dialect,
            body.text,
            state.tagset,
            state.provider,
            fallback_tag=state.fallback_tag,
        )
        return document_view(doc)

    @app.get("/api/documents")
    def list_documents(user: User = Depends(current_user)):
        assignee = None if user.is_lead else user.id
        return state.store.list_documents(assignee=assignee)

    @app.get("/api/documents/{doc_id}")
    def get_document(doc_id: str, user: User = Depends(current_user)):
        return document_view(load_document_for(user, doc_id))

    @app.post("/api/documents/{doc_id}/assign")
    def assign(doc_id: str, body: AssignBody, user: User = Depends(current_user)):
        require_lead(user)
        doc = state.store.load_document(doc_id)
        check_expected(doc, body.expected_version)
        assignee = state.store.get_user(body.user)
        assign_document(state.store, doc, assignee)
        return document_view(doc, include_sentences=False)

    @app.post("/api/documents/{doc_id}/sentences/{sentence_id}/edits")
    def apply_edit(
        doc_id: str,
        sentence_id: str,
        body: EditBody,
        user: User = Depends(current_user),
    ):
        def fn(sentence: Sentence) -> Sentence:
            if body.kind == "modify":
                if len(body.targets) != 1 or len(body.after) != 1:
                    raise SchemaError("modify takes exactly one target and one surface")
                return editing.modify_token(
                    sentence, body.targets[0], body.after[0], author=user.id
                )
            if body.kind == "split":
                if len(body.targets) != 1:
                    raise SchemaError("split takes exactly one target")
                return editing.split_token(
                    sentence, body.targets[0], body.after, author=user.id
                )
            if body.kind == "merge":
                return editing.merge_tokens(sentence, body.targets, author=user.id)
            raise SchemaError(f"unknown edit kind: {body.kind}")

        return mutate_sentence(user, doc_id, sentence_id, body.expected_version, fn)

    @app.post("/api/documents/{doc_id}/sentences/{sentence_id}/undo")
    def undo_edit(
        doc_id: str,
        sentence_id: str,
        body: CursorBody,
        user: User = Depends(current_user),
    ):
        return mutate_sentence(
            user, doc_id, sentence_id, body.expected_version, editing.undo
        )

    @app.post("/api/documents/{doc_id}/sentences/{sentence_id}/redo")
    def redo_edit(
        doc_id: str,
        sentence_id: str,
        body: CursorBody,
        user: User = Depends(current_user),
    ):
        return mutate_sentence(
            user, doc_id, sentence_id, body.expected_version, editing.redo
        )

    # -- annotation ---------------------------------------------------------

    @app.get("/api/analyses")
    def analyses(
        surface: str = Query(...),
        dialect: str = Query(""),
        user: User = Depends(current_user),
    ):
        results = morphology.search_analyses(
            surface, dialect, state.store.iter_documents(), state.provider
        )
        return {
            "provider_analyses": [a.to_dict() for a in results.provider_analyses],
            "prior_annotations": [a.to_dict() for a in results.prior_annotations],
        }

    @app.post("/api/documents/{doc_id}/annotations")
    def submit_annotation(
        doc_id: str, body: AnnotationBody, user: User = Depends(current_user)
    ):
        doc = load_document_for(user, doc_id)
        check_expected(doc, body.expected_version)
        expected = doc.version
        ensure_editable(doc)
        try:
            annotation = MorphAnnotation.from_dict(body.annotation)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"malformed annotation: {exc}")
        record = morphology.submit_annotation(
            doc, body.token_id, annotation, user, state.tagset
        )
        state.store.save_document(doc, expected)
        return {
            "document_version": doc.version,
            "status": doc.status.value,
            "annotation": record.annotation.to_dict(),
        }

    @app.post("/api/documents/{doc_id}/bulk-apply")
    def bulk_apply(
        doc_id: str, body: BulkApplyBody, user: User = Depends(current_user)
    ):
        doc = load_document_for(user, doc_id)
        check_expected(doc, body.expected_version)
        expected = doc.version
        ensure_editable(doc)
        try:
            annotation = MorphAnnotation.from_dict(body.annotation)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"malformed annotation: {exc}")
        count = morphology.apply_to_matching(
            doc, body.surface, annotation, user, state.tagset
        )
        state.store.save_document(doc, expected)
        return {"document_version": doc.version, "count": count}

    @app.post("/api/documents/{doc_id}/submit")
    def submit(doc_id: str, body: SubmitBody, user: User = Depends(current_user)):
        doc = load_document_for(user, doc_id)
        check_expected(doc, body.expected_version)
        submit_document(state.store, doc, user)
        return document_view(doc, include_sentences=False)

    @app.post("/api/documents/{doc_id}/review")
    def review(doc_id: str, body: ReviewBody, user: User = Depends(current_user)):
        require_lead(user)
        doc = state.store.load_document(doc_id)
        check_expected(doc, body.expected_version)
        review_document(state.store, doc, body.verdict, body.note)
        return document_view(doc, include_sentences=False)

    # -- reports ------------------------------------------------------------

    @app.get("/api/progress")
    def progress(user: User = Depends(current_user)):
        scope = None if user.is_lead else user.id
        return {"rows": [row.to_dict() for row in progress_report(state.store, scope)]}

    @app.get("/api/iaa")
    def iaa_report(
        doc: str = Query(...),
        gold: str = Query(...),
        user: User = Depends(current_user),
    ):
        require_lead(user)
        a = state.store.load_document(doc)
        b = state.store.load_document(gold)
        return iaa.compute_iaa(a, b).to_dict()

    @app.get("/api/documents/{doc_id}/export")
    def export(doc_id: str, user: User = Depends(current_user)):
        require_lead(user)
        doc = state.store.load_document(doc_id)
        return storage.export_document(doc, state.tagset)

    # -- reference data -------------------------------------------------------

    @app.get("/api/tagset")
    def tagset_config(user: User = Depends(current_user)):
        return state.tagset.to_dict()

    @app.get("/api/transliterate")
    def transliterate(
        text: str = Query(...),
        to: str = Query("ar"),
        user: User = Depends(current_user),
    ):
        if to == "ar":
            result = translit.bw_to_ar(text)
        elif to == "bw":
            result = translit.ar_to_bw(text)
        else:
            raise SchemaError(f"unknown direction: {to} (use ar or bw)")
        return {"text": result.text, "warnings": list(result.warnings)}

    return app

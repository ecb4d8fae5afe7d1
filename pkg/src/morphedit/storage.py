"""Persistence: a relational index for users, documents and assignments,
plus schemaless versioned JSON payloads for per-sentence annotation state.

Only queryable workflow data lives in table columns; everything the
annotation front-end evolves (tokens, edit logs, annotations, suggestions)
is an opaque JSON blob, so front-end schema changes need no migration.
Writers are serialized per key by compare-and-swap on the stored version;
the full version history is retained and immutable.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import sqlite3
import threading
from pathlib import Path
from typing import Any, Iterator, Mapping

from . import editing
from .errors import (
    DuplicateNameError,
    NotFoundError,
    SchemaError,
    VersionConflictError,
)
from .model import (
    DocStatus,
    Document,
    Role,
    Sentence,
    TagSet,
    User,
)

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    id TEXT PRIMARY KEY,
    name TEXT UNIQUE NOT NULL,
    role TEXT NOT NULL,
    credential_hash TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS documents (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    dialect TEXT NOT NULL,
    status TEXT NOT NULL,
    assignee TEXT,
    version INTEGER NOT NULL,
    review_note TEXT,
    tagset TEXT NOT NULL,
    sentence_order TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS payloads (
    doc_id TEXT NOT NULL,
    sentence_id TEXT NOT NULL,
    version INTEGER NOT NULL,
    body TEXT NOT NULL,
    PRIMARY KEY (doc_id, sentence_id, version)
);
"""


def hash_credential(credential: str, salt: str | None = None) -> str:
    salt = salt or secrets.token_hex(8)
    digest = hashlib.pbkdf2_hmac(
        "sha256", credential.encode("utf-8"), salt.encode("utf-8"), 50_000
    ).hex()
    return f"{salt}${digest}"


def verify_credential_hash(credential: str, stored: str) -> bool:
    salt, _, digest = stored.partition("$")
    candidate = hash_credential(credential, salt)
    return secrets.compare_digest(candidate, stored)


def _dump_body(body: Mapping) -> str:
    return json.dumps(body, ensure_ascii=False, sort_keys=True)


class Store:
    """SQLite-backed store. Safe for concurrent use from multiple threads;
    each thread gets its own connection and writes run in IMMEDIATE
    transactions."""

    def __init__(self, path: str | Path):
        self._path = str(path)
        self._local = threading.local()
        self._conn().executescript(_SCHEMA)

    @property
    def path(self) -> str:
        return self._path

    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self._path, timeout=30.0, isolation_level=None)
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute("PRAGMA busy_timeout=30000")
            self._local.conn = conn
        return conn

    def _txn(self) -> "_Txn":
        return _Txn(self._conn())

    # -- users ---------------------------------------------------------

    def add_user(self, name: str, role: Role | str, credential: str) -> User:
        role = Role(role)
        with self._txn() as cur:
            if cur.execute("SELECT 1 FROM users WHERE name = ?", (name,)).fetchone():
                raise DuplicateNameError(f"user name already taken: {name}")
            count = cur.execute("SELECT COUNT(*) FROM users").fetchone()[0]
            user = User(
                id=f"u{count + 1}",
                name=name,
                role=role,
                credential_hash=hash_credential(credential),
            )
            cur.execute(
                "INSERT INTO users (id, name, role, credential_hash) VALUES (?, ?, ?, ?)",
                (user.id, user.name, user.role.value, user.credential_hash),
            )
        return user

    def _user_from_row(self, row: tuple) -> User:
        return User(id=row[0], name=row[1], role=Role(row[2]), credential_hash=row[3])

    def get_user(self, name: str) -> User:
        row = self._conn().execute(
            "SELECT id, name, role, credential_hash FROM users WHERE name = ?", (name,)
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no such user: {name}")
        return self._user_from_row(row)

    def get_user_by_id(self, user_id: str) -> User:
        row = self._conn().execute(
            "SELECT id, name, role, credential_hash FROM users WHERE id = ?", (user_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no such user id: {user_id}")
        return self._user_from_row(row)

    def list_users(self) -> list[User]:
        rows = self._conn().execute(
            "SELECT id, name, role, credential_hash FROM users ORDER BY id"
        ).fetchall()
        return [self._user_from_row(r) for r in rows]

    def verify_user(self, name: str, credential: str) -> User | None:
        try:
            user = self.get_user(name)
        except NotFoundError:
            return None
        if verify_credential_hash(credential, user.credential_hash):
            return user
        return None

    def count_users(self) -> int:
        return self._conn().execute("SELECT COUNT(*) FROM users").fetchone()[0]

    # -- documents -----------------------------------------------------

    def new_document_id(self) -> str:
        with self._txn() as cur:
            n = cur.execute("SELECT COUNT(*) FROM documents").fetchone()[0]
            candidate = f"d{n + 1}"
            while cur.execute(
                "SELECT 1 FROM documents WHERE id = ?", (candidate,)
            ).fetchone():
                n += 1
                candidate = f"d{n + 1}"
        return candidate

    def create_document(self, doc: Document, write_payloads: bool = True) -> Document:
        """Register a document. Unless suppressed, each sentence payload is
        written at version 1 and the document starts at version 1."""
        if doc.version <= 0:
            doc.version = 1
        with self._txn() as cur:
            if cur.execute("SELECT 1 FROM documents WHERE id = ?", (doc.id,)).fetchone():
                raise DuplicateNameError(f"document id already exists: {doc.id}")
            cur.execute(
                "INSERT INTO documents (id, title, dialect, status, assignee, version,"
                " review_note, tagset, sentence_order) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    doc.id,
                    doc.title,
                    doc.dialect,
                    doc.status.value,
                    doc.assignee,
                    doc.version,
                    doc.review_note,
                    doc.tagset_name,
                    json.dumps([s.id for s in doc.sentences]),
                ),
            )
            if write_payloads:
                for sentence in doc.sentences:
                    cur.execute(
                        "INSERT INTO payloads (doc_id, sentence_id, version, body)"
                        " VALUES (?, ?, 1, ?)",
                        (doc.id, sentence.id, _dump_body(sentence.to_dict())),
                    )
        return doc

    def _doc_row(self, cur, doc_id: str) -> tuple:
        row = cur.execute(
            "SELECT id, title, dialect, status, assignee, version, review_note,"
            " tagset, sentence_order FROM documents WHERE id = ?",
            (doc_id,),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no such document: {doc_id}")
        return row

    def load_document(self, doc_id: str) -> Document:
        cur = self._conn()
        row = self._doc_row(cur, doc_id)
        sentences = []
        for sentence_id in json.loads(row[8]):
            _, body = self.load_sentence(doc_id, sentence_id)
            sentences.append(Sentence.from_dict(body))
        return Document(
            id=row[0],
            title=row[1],
            dialect=row[2],
            sentences=sentences,
            status=DocStatus(row[3]),
            assignee=row[4],
            version=row[5],
            review_note=row[6],
            tagset_name=row[7],
        )

    def list_documents(self, assignee: str | None = None) -> list[dict]:
        """Light listing rows, no payloads."""
        sql = (
            "SELECT id, title, dialect, status, assignee, version, review_note,"
            " tagset, sentence_order FROM documents"
        )
        args: tuple = ()
        if assignee is not None:
            sql += " WHERE assignee = ?"
            args = (assignee,)
        rows = self._conn().execute(sql + " ORDER BY id", args).fetchall()
        return [
            {
                "id": r[0],
                "title": r[1],
                "dialect": r[2],
                "status": r[3],
                "assignee": r[4],
                "version": r[5],
                "review_note": r[6],
                "tagset": r[7],
                "sentences": len(json.loads(r[8])),
            }
            for r in rows
        ]

    def iter_documents(self) -> Iterator[Document]:
        ids = [r[0] for r in self._conn().execute("SELECT id FROM documents ORDER BY id")]
        for doc_id in ids:
            yield self.load_document(doc_id)

    def save_document(self, doc: Document, expected_version: int) -> int:
        """Persist document metadata and any changed sentence payloads
        atomically. CAS on the stored document version; on success the
        document version becomes expected_version + 1."""
        with self._txn() as cur:
            row = self._doc_row(cur, doc.id)
            if row[5] != expected_version:
                raise VersionConflictError(
                    f"document {doc.id} is at version {row[5]}, expected {expected_version}",
                    details={"current": row[5], "expected": expected_version},
                )
            new_version = expected_version + 1
            cur.execute(
                "UPDATE documents SET title=?, dialect=?, status=?, assignee=?,"
                " version=?, review_note=?, tagset=?, sentence_order=? WHERE id=?",
                (
                    doc.title,
                    doc.dialect,
                    doc.status.value,
                    doc.assignee,
                    new_version,
                    doc.review_note,
                    doc.tagset_name,
                    json.dumps([s.id for s in doc.sentences]),
                    doc.id,
                ),
            )
            for sentence in doc.sentences:
                body = _dump_body(sentence.to_dict())
                latest = cur.execute(
                    "SELECT version, body FROM payloads WHERE doc_id=? AND sentence_id=?"
                    " ORDER BY version DESC LIMIT 1",
                    (doc.id, sentence.id),
                ).fetchone()
                if latest is not None and latest[1] == body:
                    continue
                next_payload_version = 1 if latest is None else latest[0] + 1
                cur.execute(
                    "INSERT INTO payloads (doc_id, sentence_id, version, body)"
                    " VALUES (?, ?, ?, ?)",
                    (doc.id, sentence.id, next_payload_version, body),
                )
        doc.version = new_version
        return new_version

    # -- sentence payloads (schemaless side) ----------------------------

    def _require_key(self, cur, doc_id: str, sentence_id: str) -> None:
        row = self._doc_row(cur, doc_id)
        if sentence_id not in json.loads(row[8]):
            raise NotFoundError(f"no such sentence: {doc_id}/{sentence_id}")

    def save_sentence(
        self, doc_id: str, sentence_id: str, body: Mapping, expected_version: int
    ) -> int:
        """Compare-and-swap write of one sentence payload. The new payload is
        stored at expected_version + 1; a concurrent writer that got there
        first causes a version conflict and the caller must reload and retry.
        Bumps the owning document's version by one."""
        with self._txn() as cur:
            self._require_key(cur, doc_id, sentence_id)
            current = cur.execute(
                "SELECT COALESCE(MAX(version), 0) FROM payloads"
                " WHERE doc_id=? AND sentence_id=?",
                (doc_id, sentence_id),
            ).fetchone()[0]
            if current != expected_version:
                raise VersionConflictError(
                    f"sentence {doc_id}/{sentence_id} is at version {current},"
                    f" expected {expected_version}",
                    details={"current": current, "expected": expected_version},
                )
            new_version = expected_version + 1
            cur.execute(
                "INSERT INTO payloads (doc_id, sentence_id, version, body)"
                " VALUES (?, ?, ?, ?)",
                (doc_id, sentence_id, new_version, _dump_body(body)),
            )
            cur.execute(
                "UPDATE documents SET version = version + 1 WHERE id = ?", (doc_id,)
            )
        return new_version

    def load_sentence(self, doc_id: str, sentence_id: str) -> tuple[int, dict]:
        """Latest payload for a key, as (version, body)."""
        row = self._conn().execute(
            "SELECT version, body FROM payloads WHERE doc_id=? AND sentence_id=?"
            " ORDER BY version DESC LIMIT 1",
            (doc_id, sentence_id),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no payload for {doc_id}/{sentence_id}")
        return row[0], json.loads(row[1])

    def load_sentence_at(self, doc_id: str, sentence_id: str, version: int) -> dict:
        row = self._conn().execute(
            "SELECT body FROM payloads WHERE doc_id=? AND sentence_id=? AND version=?",
            (doc_id, sentence_id, version),
        ).fetchone()
        if row is None:
            raise NotFoundError(f"no payload for {doc_id}/{sentence_id} at v{version}")
        return json.loads(row[0])


class _Txn:
    """IMMEDIATE transaction context: serializes writers at BEGIN time."""

    def __init__(self, conn: sqlite3.Connection):
        self._conn = conn

    def __enter__(self) -> sqlite3.Cursor:
        self._conn.execute("BEGIN IMMEDIATE")
        return self._conn.cursor()

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self._conn.execute("COMMIT")
        else:
            self._conn.execute("ROLLBACK")


# -- export / import ----------------------------------------------------


def export_document(doc: Document, tagset: TagSet) -> dict:
    """Self-describing export: raw tokens, the full edit log, all annotation
    state, the tagset name and workflow metadata."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tagset": tagset.name,
        "document": {
            "id": doc.id,
            "title": doc.title,
            "dialect": doc.dialect,
            "status": doc.status.value,
            "assignee": doc.assignee,
            "version": doc.version,
            "review_note": doc.review_note,
            "sentences": [s.to_dict() for s in doc.sentences],
        },
    }


def _fail(path: str, message: str) -> None:
    raise SchemaError(f"{path}: {message}", details=path)


def _require(data: Mapping, key: str, path: str) -> Any:
    if not isinstance(data, Mapping) or key not in data:
        _fail(f"{path}.{key}", "missing required field")
    return data[key]


def import_document(data: Mapping, tagset: TagSet) -> Document:
    """Validate an export file and reconstruct the document.

    Raises SchemaError with a field path for every structural problem,
    including annotation POS tags outside the given tagset and edit logs
    that do not replay."""
    if not isinstance(data, Mapping):
        _fail("$", "export must be a JSON object")
    version = _require(data, "schema_version", "$")
    if version != SCHEMA_VERSION:
        _fail("$.schema_version", f"unsupported schema version: {version}")
    payload = _require(data, "document", "$")
    title = _require(payload, "title", "$.document")
    dialect = _require(payload, "dialect", "$.document")
    status_raw = payload.get("status", "uploaded")
    try:
        status = DocStatus(status_raw)
    except ValueError:
        _fail("$.document.status", f"unknown status: {status_raw}")
    sentences_data = _require(payload, "sentences", "$.document")
    if not isinstance(sentences_data, list):
        _fail("$.document.sentences", "must be a list")

    sentences: list[Sentence] = []
    seen_sentence_ids: set[str] = set()
    for i, sdata in enumerate(sentences_data):
        path = f"$.document.sentences[{i}]"
        sid = _require(sdata, "id", path)
        if sid in seen_sentence_ids:
            _fail(f"{path}.id", f"duplicate sentence id: {sid}")
        seen_sentence_ids.add(sid)
        raw_data = _require(sdata, "raw_tokens", path)
        if not isinstance(raw_data, list):
            _fail(f"{path}.raw_tokens", "must be a list")
        for j, tdata in enumerate(raw_data):
            surface = _require(tdata, "surface", f"{path}.raw_tokens[{j}]")
            _require(tdata, "id", f"{path}.raw_tokens[{j}]")
            if not surface or any(ch.isspace() for ch in surface):
                _fail(
                    f"{path}.raw_tokens[{j}].surface",
                    f"token surface must be non-empty without whitespace: {surface!r}",
                )
        try:
            sentence = Sentence.from_dict(sdata)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"{path}: malformed sentence: {exc}", details=path) from exc
        _check_ops(sentence, path)
        replayed = editing.replay(sentence.id, sentence.raw_tokens, sentence.log.applied)
        if sdata.get("current_tokens") and replayed != sentence.tokens:
            _fail(f"{path}.current_tokens", "snapshot does not match edit log replay")
        sentence = Sentence(
            id=sentence.id,
            raw_tokens=sentence.raw_tokens,
            log=sentence.log,
            tokens=replayed,
            annotations=sentence.annotations,
            suggestions=sentence.suggestions,
        )
        for tid, record in sentence.annotations.items():
            for seg in record.annotation.segments():
                if seg.pos not in tagset.tags:
                    _fail(
                        f"{path}.annotations[{tid!r}]",
                        f"unknown POS tag: {seg.pos}",
                    )
        sentences.append(sentence)

    return Document(
        id=payload.get("id", ""),
        title=title,
        dialect=dialect,
        sentences=sentences,
        status=status,
        assignee=payload.get("assignee"),
        version=int(payload.get("version", 0)),
        review_note=payload.get("review_note"),
        tagset_name=data.get("tagset", tagset.name),
    )


def _check_ops(sentence: Sentence, path: str) -> None:
    log = sentence.log
    if not 0 <= log.cursor <= len(log.ops):
        _fail(f"{path}.edit_log.cursor", f"cursor out of range: {log.cursor}")
    seqs = [op.seq for op in log.ops]
    if len(set(seqs)) != len(seqs):
        _fail(f"{path}.edit_log.ops", "duplicate op seq")
    if seqs and log.next_seq <= max(seqs):
        _fail(f"{path}.edit_log.next_seq", "next_seq must exceed every op seq")
    for k, op in enumerate(log.ops):
        op_path = f"{path}.edit_log.ops[{k}]"
        if op.kind.value == "modify":
            if len(op.targets) != 1 or len(op.before) != 1 or len(op.after) != 1:
                _fail(op_path, "modify must have 1 target, 1 before, 1 after")
            if op.before == op.after:
                _fail(op_path, "modify must change the surface")
        elif op.kind.value == "split":
            if len(op.targets) != 1 or len(op.after) < 2:
                _fail(op_path, "split must have 1 target and at least 2 parts")
            if any(not part for part in op.after):
                _fail(op_path, "split parts must be non-empty")
        elif op.kind.value == "merge":
            if len(op.targets) < 2 or len(op.after) != 1:
                _fail(op_path, "merge must have at least 2 targets and 1 result")


def import_into_store(store: Store, data: Mapping, tagset: TagSet) -> Document:
    """Import an export file as a new stored document. The carried document
    id is preserved when free; otherwise a fresh id is assigned."""
    doc = import_document(data, tagset)
    if not doc.id:
        doc.id = store.new_document_id()
    else:
        try:
            store.load_document(doc.id)
        except NotFoundError:
            pass
        else:
            doc.id = store.new_document_id()
    store.create_document(doc)
    return doc

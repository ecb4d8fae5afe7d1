"""Administrative command line: corpus import/export, user and assignment
management, statistics, IAA reports, and serving the HTTP API.

Runs either directly against a store file (--store, the default mode, no
server needed) or as a client of a running service (--server URL with
--user/--credential). Each subcommand is a thin wrapper over the module
operations; no business logic lives here.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import editing, iaa, service, storage
from .config import ServiceConfig, load_config
from .errors import MorphEditError, NotFoundError, SchemaError
from .iaa import IAAReport, SuggestionAccuracyReport
from .model import Document, TagSet, default_tagset, load_tagset
from .storage import Store


def _table(rows: list[tuple[str, str]]) -> str:
    if not rows:
        return ""
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)


class _ServerClient:
    """Minimal HTTP client for server mode."""

    def __init__(self, base_url: str, name: str, credential: str):
        import httpx

        self._client = httpx.Client(base_url=base_url.rstrip("/"), timeout=30.0)
        response = self._client.post(
            "/api/login", json={"name": name, "credential": credential}
        )
        self._raise_for_error(response)
        self._client.headers["Authorization"] = f"Bearer {response.json()['token']}"

    @staticmethod
    def _raise_for_error(response) -> None:
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = {}
            raise MorphEditError(
                body.get("message", f"server error {response.status_code}"),
                details=body.get("details"),
            )

    def get(self, path: str, **params) -> dict:
        response = self._client.get(path, params=params or None)
        self._raise_for_error(response)
        return response.json()

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        self._raise_for_error(response)
        return response.json()


DEFAULT_STORE = "morphedit.db"


def _open_store(args) -> Store:
    return Store(args.store or DEFAULT_STORE)


def _active_tagset(args) -> TagSet:
    if args.tagset:
        return load_tagset(args.tagset)
    return default_tagset()


def _client(args) -> _ServerClient:
    if not args.user or args.credential is None:
        raise MorphEditError("server mode needs --user and --credential")
    return _ServerClient(args.server, args.user, args.credential)


def _fetch_document(args, doc_id: str, tagset: TagSet) -> Document:
    if args.server:
        data = _client(args).get(f"/api/documents/{doc_id}/export")
        return storage.import_document(data, tagset)
    return _open_store(args).load_document(doc_id)


def _emit(args, data: dict, table_rows: list[tuple[str, str]]) -> None:
    if args.format == "json":
        print(json.dumps(data, ensure_ascii=False, indent=2))
    else:
        print(_table(table_rows))


def cmd_user_add(args) -> int:
    if args.server:
        view = _client(args).post(
            "/api/users",
            {"name": args.name, "role": args.role, "credential": args.credential_new},
        )
    else:
        user = _open_store(args).add_user(args.name, args.role, args.credential_new)
        view = {"id": user.id, "name": user.name, "role": user.role.value}
    _emit(args, view, [("id", view["id"]), ("name", view["name"]), ("role", view["role"])])
    return 0


def cmd_import(args) -> int:
    if args.server:
        raise MorphEditError("import writes to the store directly; use --store")
    try:
        data = json.loads(Path(args.file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"import file is not valid JSON: {exc}")
    tagset = _active_tagset(args)
    doc = storage.import_into_store(_open_store(args), data, tagset)
    _emit(
        args,
        {"id": doc.id, "title": doc.title, "sentences": len(doc.sentences)},
        [("imported", doc.id), ("title", doc.title), ("sentences", str(len(doc.sentences)))],
    )
    return 0


def cmd_export(args) -> int:
    tagset = _active_tagset(args)
    if args.server:
        data = _client(args).get(f"/api/documents/{args.doc}/export")
        doc = storage.import_document(data, tagset)
    else:
        doc = _open_store(args).load_document(args.doc)
        data = storage.export_document(doc, tagset)
    out = Path(args.out) if args.out else None
    text = json.dumps(data, ensure_ascii=False, indent=2)
    if out:
        out.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {out}")
    else:
        print(text)
    if args.edit_log:
        Path(args.edit_log).write_text(editing.edit_log_jsonl(doc), encoding="utf-8")
        print(f"wrote {args.edit_log}")
    return 0


def cmd_assign(args) -> int:
    if args.server:
        view = _client(args).post(
            f"/api/documents/{args.doc}/assign", {"user": args.to}
        )
    else:
        store = _open_store(args)
        doc = store.load_document(args.doc)
        assignee = store.get_user(args.to)
        service.assign_document(store, doc, assignee)
        view = {"id": doc.id, "status": doc.status.value, "assignee": doc.assignee}
    _emit(
        args,
        view,
        [("document", view["id"]), ("status", view["status"]), ("assignee", str(view["assignee"]))],
    )
    return 0


def _stats_payload(doc: Document) -> tuple[dict, list[tuple[str, str]]]:
    stats = editing.edit_stats(doc)
    accuracy = iaa.suggestion_accuracy(doc)
    data = {
        "edit_stats": {
            "tokens_raw": stats.tokens_raw,
            "tokens_current": stats.tokens_current,
            "changed_words": stats.changed_words,
            "change_rate": stats.change_rate,
            "change_rate_display": editing.format_change_rate(stats.change_rate),
            "splits": stats.splits,
            "merges": stats.merges,
            "modifies": stats.modifies,
        },
        "suggestion_accuracy": accuracy.to_dict(),
    }

    def pct(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.4f}"

    rows = [
        ("tokens raw", str(stats.tokens_raw)),
        ("tokens current", str(stats.tokens_current)),
        ("changed words", str(stats.changed_words)),
        ("change rate", editing.format_change_rate(stats.change_rate)),
        ("splits", str(stats.splits)),
        ("merges", str(stats.merges)),
        ("modifies", str(stats.modifies)),
        ("suggestion accuracy over", str(accuracy.evaluated)),
        ("tokenization acc", pct(accuracy.tokenization_acc)),
        ("baseword pos acc", pct(accuracy.baseword_pos_acc)),
        ("lemma acc", pct(accuracy.lemma_acc)),
    ]
    return data, rows


def cmd_stats(args) -> int:
    doc = _fetch_document(args, args.doc, _active_tagset(args))
    data, rows = _stats_payload(doc)
    _emit(args, data, rows)
    return 0


def _iaa_rows(report: IAAReport) -> list[tuple[str, str]]:
    def fmt(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.4f}"

    return [
        ("aligned tokens", str(report.aligned_tokens)),
        ("unaligned tokens", str(report.unaligned_tokens)),
        ("evaluated", str(report.evaluated)),
        ("tokenization agreement", fmt(report.tokenization_agreement)),
        ("baseword pos agreement", fmt(report.baseword_pos_agreement)),
        ("lemma agreement", fmt(report.lemma_agreement)),
        ("gloss agreement", fmt(report.gloss_agreement)),
        ("pos kappa", fmt(report.pos_kappa)),
    ]


def cmd_iaa(args) -> int:
    if args.server:
        data = _client(args).get("/api/iaa", doc=args.doc, gold=args.gold)
        report = IAAReport(**data)
    else:
        store = _open_store(args)
        report = iaa.compute_iaa(
            store.load_document(args.doc), store.load_document(args.gold)
        )
        data = report.to_dict()
    _emit(args, data, _iaa_rows(report))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    config = load_config(args.config) if args.config else ServiceConfig()
    if args.store:
        config.store_path = args.store
    if args.port:
        config.port = args.port
    app = service.create_app(config)
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphedit",
        description="Manage annotation corpora: import/export, users, assignment,"
        " statistics, agreement reports, and the HTTP service.",
    )
    parser.add_argument(
        "--store", default=None, help=f"store file path (default: {DEFAULT_STORE})"
    )
    parser.add_argument("--server", help="service base URL (client mode)")
    parser.add_argument("--user", help="login name for server mode")
    parser.add_argument("--credential", help="login credential for server mode")
    parser.add_argument("--tagset", help="tagset config path (default: bundled)")
    parser.add_argument(
        "--format", choices=("table", "json"), default="table", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("user-add", help="create a user")
    p.add_argument("--name", required=True)
    p.add_argument("--role", choices=("annotator", "lead"), default="annotator")
    p.add_argument("--credential-new", required=True, help="credential for the new user")
    p.set_defaults(fn=cmd_user_add)

    p = sub.add_parser("import", help="import a document export file into the store")
    p.add_argument("file")
    p.set_defaults(fn=cmd_import)

    p = sub.add_parser("export", help="export a document to a file")
    p.add_argument("--doc", required=True)
    p.add_argument("-o", "--out", help="output path (default: stdout)")
    p.add_argument("--edit-log", help="also write the applied edit log as JSON lines")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("assign", help="assign a document to an annotator")
    p.add_argument("--doc", required=True)
    p.add_argument("--to", required=True, help="user name")
    p.set_defaults(fn=cmd_assign)

    p = sub.add_parser("stats", help="edit statistics and suggestion accuracy")
    p.add_argument("--doc", required=True)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("iaa", help="inter-annotator agreement report")
    p.add_argument("--doc", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(fn=cmd_iaa)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MorphEditError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        if exc.details:
            print(f"  {exc.details}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

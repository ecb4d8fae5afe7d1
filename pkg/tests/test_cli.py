"""Command line: store-mode subcommands, formats, exit codes."""

from __future__ import annotations

import json
import re

import pytest

from helpers import document_content, make_document
from morphedit import editing
from morphedit.cli import main
from morphedit.model import default_tagset
from morphedit.storage import Store, export_document


@pytest.fixture
def store_path(tmp_path):
    return tmp_path / "cli.db"


def run(store_path, *argv) -> int:
    return main(["--store", str(store_path), *argv])


def seeded_export(tmp_path, doc) -> str:
    path = tmp_path / "doc.json"
    path.write_text(
        json.dumps(export_document(doc, default_tagset()), ensure_ascii=False),
        encoding="utf-8",
    )
    return str(path)


class TestUserAdd:
    def test_creates_user(self, store_path, capsys):
        assert run(store_path, "user-add", "--name", "leila", "--role", "lead",
                   "--credential-new", "pw") == 0
        out = capsys.readouterr().out
        assert "leila" in out
        assert Store(store_path).get_user("leila").is_lead

    def test_duplicate_fails_with_nonzero_exit(self, store_path, capsys):
        run(store_path, "user-add", "--name", "x", "--credential-new", "pw")
        assert run(store_path, "user-add", "--name", "x", "--credential-new", "pw") == 1
        assert "error" in capsys.readouterr().err


class TestImportExport:
    def test_round_trip(self, store_path, tmp_path, capsys):
        doc = make_document([["wyAbwhAAlxlyj"], ["fy", "Albyt"]], doc_id="d7")
        doc.version = 3
        sentence = doc.sentences[0]
        doc.replace_sentence(
            editing.split_token(sentence, f"{sentence.id}.r0", ["wyAbwhA", "Alxlyj"])
        )
        source = seeded_export(tmp_path, doc)
        assert run(store_path, "import", source) == 0
        out_file = tmp_path / "roundtrip.json"
        assert run(store_path, "export", "--doc", "d7", "-o", str(out_file)) == 0
        exported = json.loads(out_file.read_text(encoding="utf-8"))
        from morphedit.storage import import_document

        again = import_document(exported, default_tagset())
        assert document_content(again) == document_content(doc)

    def test_export_edit_log_jsonl(self, store_path, tmp_path):
        doc = make_document([["abcd"]], doc_id="d1")
        sentence = doc.sentences[0]
        doc.replace_sentence(editing.split_token(sentence, f"{sentence.id}.r0", ["ab", "cd"]))
        run(store_path, "import", seeded_export(tmp_path, doc))
        log_file = tmp_path / "edits.jsonl"
        assert run(
            store_path, "export", "--doc", "d1",
            "-o", str(tmp_path / "x.json"), "--edit-log", str(log_file),
        ) == 0
        lines = log_file.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["kind"] == "split"
        assert set(record) == {"kind", "targets", "before", "after", "author", "timestamp"}

    def test_import_missing_file_fails(self, store_path, capsys):
        assert run(store_path, "import", "/nonexistent.json") == 1

    def test_import_rejects_server_mode(self, store_path, tmp_path, capsys):
        code = main(
            ["--server", "http://localhost:1", "--user", "x", "--credential", "y",
             "import", "whatever.json"]
        )
        assert code == 1


class TestAssign:
    def test_assigns_document(self, store_path, tmp_path, capsys):
        run(store_path, "user-add", "--name", "worker", "--credential-new", "pw")
        run(store_path, "import", seeded_export(tmp_path, make_document([["a"]], doc_id="d1")))
        assert run(store_path, "assign", "--doc", "d1", "--to", "worker") == 0
        store = Store(store_path)
        doc = store.load_document("d1")
        assert doc.status.value == "assigned"
        assert doc.assignee == store.get_user("worker").id


class TestStats:
    def build_edited_doc(self, store_path, tmp_path):
        doc = make_document([["aaa", "bbb", "ccc", "ddd"]], doc_id="d1")
        sentence = doc.sentences[0]
        sentence = editing.modify_token(sentence, f"{sentence.id}.r0", "AAA")
        sentence = editing.split_token(sentence, f"{sentence.id}.r1", ["b", "bb"])
        doc.replace_sentence(sentence)
        run(store_path, "import", seeded_export(tmp_path, doc))

    def test_table_output(self, store_path, tmp_path, capsys):
        self.build_edited_doc(store_path, tmp_path)
        assert run(store_path, "stats", "--doc", "d1") == 0
        out = capsys.readouterr().out
        assert "changed words" in out
        assert "2" in out
        assert "50%" in out

    def test_json_output(self, store_path, tmp_path, capsys):
        self.build_edited_doc(store_path, tmp_path)
        capsys.readouterr()
        assert run(store_path, "--format", "json", "stats", "--doc", "d1") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["edit_stats"]["tokens_raw"] == 4
        assert data["edit_stats"]["tokens_current"] == 5
        assert data["edit_stats"]["changed_words"] == 2
        assert data["edit_stats"]["splits"] == 1

    def test_unknown_document_fails(self, store_path, capsys):
        assert run(store_path, "stats", "--doc", "ghost") == 1
        assert "error" in capsys.readouterr().err

    def test_user_study_shaped_fixture_output(self, store_path, tmp_path, capsys):
        """1,355 raw tokens with 244 modifies and 44 two-way splits print
        changed 288, rate 21%, splits 44, merges 0."""
        surfaces, remaining, i = [], 1355, 0
        while remaining > 0:
            n = min(17, remaining)
            surfaces.append([f"w{i}_{j}" for j in range(n)])
            remaining -= n
            i += 1
        doc = make_document(surfaces, doc_id="d1")
        modified = split = 0
        for sentence in list(doc.sentences):
            edited = sentence
            for token in sentence.tokens:
                if modified < 244:
                    edited = editing.modify_token(edited, token.id, token.surface + "X")
                    modified += 1
                elif split < 44:
                    edited = editing.split_token(edited, token.id, [token.surface, "t"])
                    split += 1
            doc.replace_sentence(edited)
        run(store_path, "import", seeded_export(tmp_path, doc))
        capsys.readouterr()
        assert run(store_path, "stats", "--doc", "d1") == 0
        out = capsys.readouterr().out
        assert re.search(r"changed words\s+288\b", out)
        assert re.search(r"change rate\s+21%", out)
        assert re.search(r"splits\s+44\b", out)
        assert re.search(r"merges\s+0\b", out)
        assert re.search(r"tokens current\s+1399\b", out)


class TestServe:
    def test_serve_honors_config_store_path(self, tmp_path, monkeypatch):
        """`serve --config` must not clobber the configured store path with
        the CLI's store default."""
        import json as json_mod

        captured = {}

        def fake_run(app, **kwargs):
            captured["app"] = app
            captured["kwargs"] = kwargs

        import uvicorn

        monkeypatch.setattr(uvicorn, "run", fake_run)
        config_path = tmp_path / "config.json"
        json_mod.dump(
            {"port": 9317, "store_path": str(tmp_path / "configured.db")},
            config_path.open("w"),
        )
        assert main(["serve", "--config", str(config_path)]) == 0
        state = captured["app"].state.morphedit
        assert state.store.path == str(tmp_path / "configured.db")
        assert captured["kwargs"]["port"] == 9317

    def test_explicit_store_flag_still_overrides(self, tmp_path, monkeypatch):
        captured = {}

        def fake_run(app, **kwargs):
            captured["app"] = app

        import uvicorn

        monkeypatch.setattr(uvicorn, "run", fake_run)
        override = tmp_path / "explicit.db"
        assert main(["--store", str(override), "serve"]) == 0
        assert captured["app"].state.morphedit.store.path == str(override)


class TestIaaCommand:
    def import_twin_copies(self, store_path, tmp_path, surfaces):
        # annotator and gold both start from the same uploaded document,
        # so the copies share raw token ids
        source = seeded_export(tmp_path, make_document(surfaces, doc_id="dA"))
        run(store_path, "import", source)
        run(store_path, "import", source)

    def test_identical_documents_agree(self, store_path, tmp_path, capsys):
        self.import_twin_copies(store_path, tmp_path, [["a", "b"]])
        capsys.readouterr()
        assert run(store_path, "--format", "json", "iaa", "--doc", "dA", "--gold", "d2") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["aligned_tokens"] == 2
        assert data["unaligned_tokens"] == 0
        # no annotations anywhere: agreement fields are absent, not zero
        assert data["evaluated"] == 0
        assert data["pos_kappa"] is None

    def test_table_output(self, store_path, tmp_path, capsys):
        self.import_twin_copies(store_path, tmp_path, [["a"]])
        assert run(store_path, "iaa", "--doc", "dA", "--gold", "d2") == 0
        out = capsys.readouterr().out
        assert "aligned tokens" in out
        assert "pos kappa" in out

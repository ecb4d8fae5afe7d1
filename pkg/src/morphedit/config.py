"""Service configuration: a single JSON config file plus environment
variable overrides (MORPHEDIT_PORT, MORPHEDIT_STORE, MORPHEDIT_TAGSET,
MORPHEDIT_LEXICON, MORPHEDIT_ADMIN_NAME, MORPHEDIT_ADMIN_CREDENTIAL)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import SchemaError


@dataclass
class ServiceConfig:
    port: int = 8077
    store_path: str = "morphedit.db"
    tagset_path: str | None = None  # None: bundled default tagset
    lexicon_path: str | None = None  # None: bundled demo lexicon
    admin_name: str = "admin"
    admin_credential: str | None = None  # bootstrap lead, created if no users exist
    fallback_tag: str = "NOUN"


_ENV_KEYS = {
    "MORPHEDIT_PORT": ("port", int),
    "MORPHEDIT_STORE": ("store_path", str),
    "MORPHEDIT_TAGSET": ("tagset_path", str),
    "MORPHEDIT_LEXICON": ("lexicon_path", str),
    "MORPHEDIT_ADMIN_NAME": ("admin_name", str),
    "MORPHEDIT_ADMIN_CREDENTIAL": ("admin_credential", str),
    "MORPHEDIT_FALLBACK_TAG": ("fallback_tag", str),
}


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] = os.environ
) -> ServiceConfig:
    config = ServiceConfig()
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SchemaError("config file must hold a JSON object")
        for key, value in data.items():
            if not hasattr(config, key):
                raise SchemaError(f"unknown config key: {key}", details=key)
            setattr(config, key, value)
    for env_key, (attr, cast) in _ENV_KEYS.items():
        if env_key in env:
            setattr(config, attr, cast(env[env_key]))
    config.port = int(config.port)
    return config

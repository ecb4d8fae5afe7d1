from __future__ import annotations

import pytest

from morphedit.model import default_tagset


@pytest.fixture(scope="session")
def tagset():
    return default_tagset()

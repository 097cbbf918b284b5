import os
import sys

import pytest


@pytest.fixture(scope="session")
def adamel():
    """The extension module: the installed package if present, otherwise the
    freshly built module from the CMake build tree."""
    try:
        import adamel as mod
        return mod
    except ImportError:
        pass
    mod_dir = os.environ.get("ADAMEL_MODULE_DIR")
    if mod_dir and mod_dir not in sys.path:
        sys.path.insert(0, mod_dir)
    import _adamel as mod
    return mod

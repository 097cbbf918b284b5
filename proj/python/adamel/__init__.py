# Copyright 2026 The AdaMEL Authors.
# Licensed under the Apache License, Version 2.0 (see LICENSE for details).
"""Attribute-level attention for multi-source entity linkage."""

from ._adamel import *  # noqa: F401,F403

__version__ = "0.1.0"

"""Size caps shared across modules.

The state cap can be overridden through the ``WEBHOL_CAP_STATES``
environment variable; everything else is passed explicitly.
"""

from __future__ import annotations

import os

DEFAULT_CAP_STATES = 2**27
MAX_ARITY = 16
BASE_GROUP_CAP = 360
PRODUCT_GROUP_CAP = 10_000
# entries in a cached multiplication table (order**2)
TABLE_BUDGET = 2**24
MOD_IMAGE_CAP = 10**7
ENUMERATION_CHECK_CAP = 10**6
DUMP_THRESHOLD = 10**4


def cap_states() -> int:
    raw = os.environ.get("WEBHOL_CAP_STATES")
    if raw is None:
        return DEFAULT_CAP_STATES
    value = int(raw)
    if value <= 0:
        raise ValueError("WEBHOL_CAP_STATES must be positive")
    return value

import random

import pytest

from fpfuse import builtin_format

BUILTIN_NAMES = ("fp32", "bf16", "e4m3", "e5m2", "e6m1")
EIGHT_BIT_NAMES = ("e4m3", "e5m2", "e6m1")


@pytest.fixture(params=BUILTIN_NAMES)
def fmt(request):
    return builtin_format(request.param)


@pytest.fixture(params=EIGHT_BIT_NAMES)
def fmt8(request):
    return builtin_format(request.param)


def seeded(*salt) -> random.Random:
    """Deterministic per-test RNG; the salt keeps streams independent.

    String seeding is stable across processes, unlike hash().
    """
    return random.Random("|".join(str(s) for s in salt))

"""Shared pytest configuration: hypothesis profiles and tuning knobs."""

import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough",
    deadline=None,
    max_examples=300,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("CIRCLEPACK_HYPOTHESIS_PROFILE", "default"))


def pytest_collection_modifyitems(config, items):
    """Skip tests marked 'extended' unless CIRCLEPACK_EXTENDED=1."""
    import pytest

    if os.environ.get("CIRCLEPACK_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended check; set CIRCLEPACK_EXTENDED=1 to run")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)

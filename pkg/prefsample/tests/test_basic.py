#!/usr/bin/env python3
"""
Basic tests for prefsample library
"""
import logging

import numpy as np
import pytest

from prefsample.utils.logger import LogLevel, current_level, get_logger, setup_logging
from prefsample.utils.seed_management import derive_seed, get_generator, replication_seed
from prefsample.utils.singleton_management import SingletonManager


def test_import():
    """Test that we can import the library and its public surface"""
    import prefsample
    assert prefsample.__version__ == "0.1.0"
    for name in prefsample.__all__:
        assert hasattr(prefsample, name)


def test_setup_logging_level():
    """Test that setup_logging installs one handler at the requested level"""
    setup_logging(LogLevel.DEBUG)
    assert current_level() == LogLevel.DEBUG
    assert len(logging.getLogger("prefsample").handlers) == 1
    assert get_logger().is_debug()
    setup_logging(LogLevel.WARNING, show_timestamp=True)
    assert current_level() == LogLevel.WARNING
    assert len(logging.getLogger("prefsample").handlers) == 1
    assert not get_logger().is_debug()
    setup_logging(LogLevel.INFO)


def test_generator_reproducible():
    """Test that equal seeds give equal streams and a Generator passes through"""
    a = get_generator(11).standard_normal(5)
    b = get_generator(11).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    rng = np.random.default_rng(3)
    assert get_generator(rng) is rng


def test_generator_rejects_bad_seed():
    with pytest.raises(ValueError):
        get_generator(-1)
    with pytest.raises(ValueError):
        get_generator(None)


def test_derive_seed():
    """Test that derived seeds are deterministic and differ per stream"""
    assert derive_seed(5, "UW") == derive_seed(5, "UW")
    assert derive_seed(5, "UW") != derive_seed(5, "PEW")
    assert derive_seed(5, "UW") != derive_seed(6, "UW")
    assert derive_seed(5, "UW", 0) != derive_seed(5, "UW", 1)
    assert derive_seed(5, "data") >= 0


def test_replication_seed():
    assert replication_seed(100, 0) == 100
    assert replication_seed(100, 7) == 107
    assert replication_seed(100, 7, attempt=2) == 2_000_107


def test_singleton_manager():
    """Test get_or_create builds once and reset_key forgets the value"""
    SingletonManager.reset()
    calls = []

    def factory():
        calls.append(1)
        return np.arange(3)

    first = SingletonManager.get_or_create("test_key", factory)
    second = SingletonManager.get_or_create("test_key", factory)
    assert first is second
    assert len(calls) == 1
    assert "test_key" in SingletonManager.keys()
    SingletonManager.reset_key("test_key")
    assert SingletonManager.get("test_key") is None
    with pytest.raises(KeyError):
        SingletonManager.reset_key("test_key")
    with pytest.raises(ValueError):
        SingletonManager.set("", 1)

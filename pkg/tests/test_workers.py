"""Tests for the thread pool helpers."""
from unittest.mock import MagicMock, patch

import pytest
from keyrate.workers import available_threads, parallel_map


class TestParallelMap:
    """Tests for `parallel_map`."""

    def test_inline(self):
        """Test a single thread keeps the input order."""
        assert parallel_map(lambda x: x + 1, [3, 1, 2]) == [4, 2, 3]

    def test_threads_keep_order(self):
        """Test results come back in input order with many threads."""
        items = list(range(200))
        assert parallel_map(lambda x: x * x, items, threads=8) == [
            x * x for x in items
        ]

    def test_empty(self):
        """Test an empty input."""
        assert parallel_map(str, [], threads=4) == []


def test_available_threads():
    """Test at least one thread is reported."""
    assert available_threads() >= 1


@pytest.mark.parametrize(("cpus", "expected"), [(6, 6), (None, 1)])
def test_available_threads_without_affinity(cpus, expected):
    """Test the CPU count fallback on platforms without CPU affinity."""
    fake_os = MagicMock(spec=["cpu_count"])
    fake_os.cpu_count.return_value = cpus
    with patch("keyrate.workers.os", fake_os):
        assert available_threads() == expected

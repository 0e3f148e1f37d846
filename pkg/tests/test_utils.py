import pytest
from hypothesis import given
from hypothesis import strategies as st

from mapflow_hub.core.utils import (
    derive_seed,
    format_float,
    miles,
    parse_data_volume,
    proportional_split,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("190G", 190_000.0),
        ("190g", 190_000.0),
        ("2.5GB", 2_500.0),
        ("512", 512.0),
        ("512M", 512.0),
        (" 10G ", 10_000.0),
    ],
)
def test_parse_data_volume(text, expected):
    assert parse_data_volume(text) == expected


@pytest.mark.parametrize("text", ["", "G", "10T", "ten", "-5G"])
def test_parse_data_volume_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_data_volume(text)


def test_proportional_split_default_fleet():
    assert proportional_split(251, (95, 94, 62)) == [95, 94, 62]
    assert proportional_split(50, (95, 94, 62)) == [19, 19, 12]
    assert proportional_split(60, (1, 1, 1)) == [20, 20, 20]


@given(st.integers(0, 2_000), st.lists(st.integers(1, 100), min_size=1, max_size=6))
def test_proportional_split_sums_to_total(total, weights):
    shares = proportional_split(total, weights)
    assert sum(shares) == total
    assert all(s >= 0 for s in shares)


def test_derive_seed_is_stable_and_key_sensitive():
    assert derive_seed(1, 7) == derive_seed(1, 7)
    assert derive_seed(1, 7) != derive_seed(1, 8)
    assert derive_seed(1, 7) != derive_seed(2, 7)
    assert 0 <= derive_seed(5, 0) < 2**64


def test_format_float():
    assert format_float(7.0) == "7.000000"
    assert format_float(0.123456789, precision=3) == "0.123"
    assert format_float(None) == ""


def test_miles():
    assert miles(1.609344) == pytest.approx(1.0)

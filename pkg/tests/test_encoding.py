import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ditto import encoding
from ditto.encoding import canonical_json, format_number, hash_millionths, hash_u64


class TestFormatNumber:
    def test_ints_bare(self):
        assert format_number(5) == "5"
        assert format_number(-3) == "-3"

    def test_six_decimal_floats_trailing_zeros_stripped(self):
        assert format_number(0.1) == "0.1"
        assert format_number(0.123456789) == "0.123457"
        assert format_number(3.0) == "3"
        assert format_number(0.25) == "0.25"

    def test_integral_float_collapses_to_int_form(self):
        assert format_number(600.0) == "600"


class TestCanonicalJson:
    def test_sorted_keys_compact(self):
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_nested(self):
        doc = {"z": [1, 2.5, "x"], "a": {"k": True, "j": None}}
        assert canonical_json(doc) == '{"a":{"j":null,"k":true},"z":[1,2.5,"x"]}'

    def test_float_rule_applied_in_place(self):
        assert canonical_json({"gpu": 600.0}) == '{"gpu":600}'
        assert canonical_json({"s": 0.9123456789}) == '{"s":0.912346}'

    @settings(max_examples=100, deadline=None)
    @given(st.dictionaries(st.text(max_size=8),
                           st.one_of(st.integers(-10 ** 9, 10 ** 9), st.booleans(),
                                     st.none(), st.text(max_size=12)),
                           max_size=6))
    def test_output_is_valid_json_and_stable(self, doc):
        s = canonical_json(doc)
        assert json.loads(s) == doc
        assert canonical_json(json.loads(s)) == s


class TestHashing:
    def test_u64_range_and_determinism(self):
        a = hash_u64("domain", 1, "x")
        assert 0 <= a < 2 ** 64
        assert a == hash_u64("domain", 1, "x")

    def test_part_separator_prevents_concat_collisions(self):
        assert hash_u64("d", "ab", "c") != hash_u64("d", "a", "bc")

    def test_millionths_range(self):
        for i in range(200):
            assert 0 <= hash_millionths("d", i) < encoding.MILLION

    def test_millionths_roughly_uniform(self):
        n = 20_000
        mean = sum(hash_millionths("uniformity", i) for i in range(n)) / n
        assert mean == pytest.approx(encoding.MILLION / 2, rel=0.02)

"""Shingling: window counts, multi-width bags, fingerprint combination."""

from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from claraprint import (
    Claraprint,
    ShingleVectorizer,
    combine,
    multi_shingle,
    shingle,
)

letter_strings = st.text(alphabet="bcdefghijkl", max_size=40)
widths_sets = st.sets(st.integers(min_value=2, max_value=7), min_size=1)


class TestShingle:
    def test_two_windows(self):
        assert shingle("abfhq", 4) == ["abfh", "bfhq"]

    def test_too_short_string(self):
        assert shingle("ab", 4) == []

    def test_width_4_reference_string(self):
        assert shingle("abfhqjfui", 4) == ["abfh", "bfhq", "fhqj", "hqjf", "qjfu", "jfui"]

    def test_duplicates_preserved_in_order(self):
        assert shingle("aaa", 2) == ["aa", "aa"]

    @pytest.mark.parametrize("w", [0, 1, 8, -2])
    def test_width_out_of_range(self, w):
        with pytest.raises(ValueError):
            shingle("abcdef", w)

    @given(letter_strings, st.integers(min_value=2, max_value=7))
    def test_count_law(self, s, w):
        assert len(shingle(s, w)) == max(0, len(s) - w + 1)

    @given(letter_strings, st.integers(min_value=2, max_value=7))
    def test_every_window_has_width_w(self, s, w):
        assert all(len(word) == w for word in shingle(s, w))


class TestMultiShingle:
    def test_enumeration(self):
        assert multi_shingle("abc", {2, 3}) == Counter({"ab": 1, "bc": 1, "abc": 1})

    def test_repeated_windows_keep_multiplicity(self):
        bag = multi_shingle("aaaa", {2})
        assert bag == Counter({"aa": 3})
        assert bag.total() == 3

    def test_empty_string(self):
        assert multi_shingle("", (2, 3, 4, 5, 6, 7)) == Counter()

    def test_rejects_empty_widths(self):
        with pytest.raises(ValueError):
            multi_shingle("abc", ())

    def test_rejects_out_of_range_width(self):
        with pytest.raises(ValueError):
            multi_shingle("abc", {2, 9})

    @given(letter_strings, widths_sets)
    def test_bag_length_law(self, s, widths):
        bag = multi_shingle(s, widths)
        assert bag.total() == sum(max(0, len(s) - w + 1) for w in widths)

    @given(letter_strings, widths_sets)
    def test_all_counts_positive(self, s, widths):
        assert all(count >= 1 for count in multi_shingle(s, widths).values())


def make_print(letters, source="ch", recording="rec", work="work"):
    return Claraprint(letters, source, recording, work, 120)


class TestCombine:
    def test_singleton_matches_multi_shingle(self):
        p = make_print("bcdbfg")
        assert combine([p], (2, 3)) == multi_shingle("bcdbfg", (2, 3))

    def test_disjoint_alphabets_never_mix(self):
        chord = make_print("bcdbcd", source="ch")
        melody = make_print("pqrpqr", source="me")
        bag = combine([chord, melody], (2, 3))
        chord_set, melody_set = set("bcdefghijkl"), set("pqrstuvwxyz$%")
        for term in bag:
            assert set(term) <= chord_set or set(term) <= melody_set

    def test_identical_prints_double_every_count(self):
        p = make_print("bcdbfg")
        single = combine([p], (2, 3))
        double = combine([p, p], (2, 3))
        assert double == single + single
        assert double.total() == 2 * single.total()

    def test_degenerate_prints_contribute_nothing(self):
        assert combine([make_print(""), make_print("b")], (2,)) == Counter()

    def test_accepts_raw_strings(self):
        assert combine(["bcd"], (2,)) == Counter({"bc": 1, "cd": 1})

    @given(st.lists(letter_strings, min_size=1, max_size=5), widths_sets)
    def test_order_independent(self, strings, widths):
        forward = combine(strings, widths)
        backward = combine(list(reversed(strings)), widths)
        assert forward == backward

    @given(st.lists(letter_strings, min_size=1, max_size=5), widths_sets)
    def test_bag_sum_of_parts(self, strings, widths):
        total = Counter()
        for s in strings:
            total += multi_shingle(s, widths)
        assert combine(strings, widths) == total


class TestShingleVectorizer:
    def test_transform_strings_and_prints(self):
        vectorizer = ShingleVectorizer(widths=(2, 3))
        bags = vectorizer.fit_transform(["bcd", make_print("bcd")])
        assert bags[0] == bags[1] == multi_shingle("bcd", (2, 3))

    def test_default_widths_are_2_to_7(self):
        assert ShingleVectorizer().get_params()["widths"] == (2, 3, 4, 5, 6, 7)

    def test_invalid_widths_raise_on_fit(self):
        with pytest.raises(ValueError):
            ShingleVectorizer(widths=(1,)).fit([])

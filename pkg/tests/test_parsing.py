import pytest

from wavespec.exceptions import ConfigError
from wavespec.utils.parsing import parse_complex, parse_float_list, parse_interval


class TestParseComplex:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("0.2+0.3i", 0.2 + 0.3j),
            ("0.2 - 0.3I", 0.2 - 0.3j),
            ("-1j", -1j),
            ("i", 1j),
            ("0.2-i", 0.2 - 1j),
            ("-6", -6 + 0j),
            ("1e-3+2e-2i", 1e-3 + 2e-2j),
        ],
    )
    def test_text(self, text, expected):
        assert parse_complex(text) == expected

    def test_numbers_pass_through(self):
        assert parse_complex(15) == 15 + 0j
        assert parse_complex(0.5 - 1j) == 0.5 - 1j

    @pytest.mark.parametrize("text", ["", "abc", "1+2k", "True"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_complex(text)


class TestParseLists:
    def test_separators(self):
        assert parse_float_list("1e-2, 3e-3 1e-3") == [1e-2, 3e-3, 1e-3]
        assert parse_float_list([0.1, "0.2"]) == [0.1, 0.2]

    def test_invalid_item(self):
        with pytest.raises(ConfigError):
            parse_float_list("0.1, x")

    def test_interval(self):
        assert parse_interval("-0.95, 0.3") == (-0.95, 0.3)
        assert parse_interval((0.19, 0.23)) == (0.19, 0.23)

    def test_interval_order(self):
        with pytest.raises(ConfigError):
            parse_interval([0.3, -0.95])

    def test_interval_length(self):
        with pytest.raises(ConfigError):
            parse_interval("0.1")

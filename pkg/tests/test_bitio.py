import pytest
from hypothesis import given, strategies as st

from bernrand.bitio import DecodeError, Window, decode, encode
from bernrand.measures import BitString

byte_aligned = st.integers(0, 16).flatmap(lambda m: st.lists(st.integers(0, 1), min_size=8 * m, max_size=8 * m)).map(BitString)


class TestDecode:
    def test_ascii(self):
        assert decode("0011") == BitString("0011")
        assert decode("00 11\n") == BitString("0011")

    def test_hex(self):
        assert decode("00", "hex") == BitString("0" * 8)
        assert decode("a5", "hex") == BitString("10100101")

    def test_raw_msb_first(self):
        assert decode(b"\x80\x01", "raw") == BitString("1000000000000001")

    @pytest.mark.parametrize(
        "data,fmt,offset",
        [("01x1", "ascii01", 2), ("0g", "hex", 1), ("abc", "hex", 2), ("0 1 2", "ascii01", 4)],
    )
    def test_error_offset(self, data, fmt, offset):
        with pytest.raises(DecodeError) as e:
            decode(data, fmt)
        assert e.value.offset == offset
        assert f"byte offset {offset}" in str(e.value)

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            decode("01", "base64")


class TestRoundTrip:
    @given(st.lists(st.integers(0, 1), max_size=100).map(BitString))
    def test_ascii(self, x):
        assert decode(encode(x, "ascii01"), "ascii01") == x

    @given(byte_aligned, st.sampled_from(["hex", "raw"]))
    def test_bytes(self, x, fmt):
        assert decode(encode(x, fmt), fmt) == x

    @given(st.binary(max_size=64), st.sampled_from(["hex", "raw"]))
    def test_bytes_first(self, data, fmt):
        text = data.hex().encode() if fmt == "hex" else data
        assert encode(decode(text, fmt), fmt) == text

    def test_unaligned(self):
        with pytest.raises(ValueError):
            encode(BitString("101"), "hex")


class TestWindow:
    @given(st.integers(1, 300), st.integers(1, 300), st.integers(1, 50))
    def test_count(self, total, length, stride):
        w = Window(length, stride)
        if length > total:
            with pytest.raises(ValueError):
                w.count(total)
            return
        windows = w.split(BitString([0] * total))
        expected = -(-(total - length) // stride) + 1
        if stride <= length:
            assert len(windows) == expected
        else:
            assert len(windows) == min(expected, -(-total // stride))
        assert all(len(x) > 0 for _, x in windows)
        assert windows[0][0] == 0
        assert all(len(x) <= length for _, x in windows)
        assert windows[-1][0] + len(windows[-1][1]) <= total

    def test_file_example(self):
        assert Window(128, 64).count(8000) == 124

    def test_parse(self):
        assert Window.parse("128:64") == Window(128, 64)
        with pytest.raises(ValueError):
            Window.parse("128")
        with pytest.raises(ValueError):
            Window(0, 1)

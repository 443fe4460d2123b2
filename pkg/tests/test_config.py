import pytest

from bernrand.codes import ConfigurationError
from bernrand.config import load_config, parse_bool, parse_config


def test_parse():
    cfg = parse_config("# c\ncode = kt\n\ngrid=tenths  # trailing\nbackend.gz = zlib\n")
    assert cfg.values == {"code": "kt", "grid": "tenths"}
    assert cfg.backends == {"gz": "zlib"}


@pytest.mark.parametrize("text", ["code kt", "colour = red", "backend. = zlib", "= 3"])
def test_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.cfg")


def test_bool():
    assert parse_bool("Yes") and not parse_bool("0")
    with pytest.raises(ConfigurationError):
        parse_bool("maybe")

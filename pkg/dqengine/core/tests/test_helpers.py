# pylint: disable=expression-not-assigned,singleton-comparison,unused-variable

import math

import pytest

from .. import helpers


def describe_significant():
    def it_rounds_to_the_configured_digits(expect, settings):
        settings.DQ_SIGNIFICANT_DIGITS = 3

        expect(helpers.significant(2 / 3)) == 0.667

    def it_accepts_explicit_digits(expect):
        expect(helpers.significant(123456.789, 2)) == 120000.0

    @pytest.mark.parametrize("value", [None, 0.0, math.inf])
    def it_passes_special_values_through(expect, value):
        expect(helpers.significant(value)) == value


def describe_atomic_write():
    def it_creates_parent_directories(expect, tmp_path):
        path = tmp_path / "nested" / "out.json"

        helpers.atomic_write(path, "{}\n")

        expect(path.read_text()) == "{}\n"

    def it_leaves_no_temporary_files(expect, tmp_path):
        helpers.atomic_write(tmp_path / "a.txt", "first")
        helpers.atomic_write(tmp_path / "a.txt", "second")

        expect(sorted(item.name for item in tmp_path.iterdir())) == ["a.txt"]
        expect((tmp_path / "a.txt").read_text()) == "second"


def describe_read_config():
    def it_reads_key_value_lines(expect, tmp_path):
        path = tmp_path / "engine.cfg"
        path.write_text("# experiment\nalpha = 0.1\n\nbig-m=1e4  # bound\n")

        expect(helpers.read_config(path)) == {"alpha": "0.1", "big_m": "1e4"}

    def it_names_malformed_lines(expect, tmp_path):
        path = tmp_path / "engine.cfg"
        path.write_text("alpha=0.1\nwindow\n")

        with pytest.raises(ValueError, match="Line 2"):
            helpers.read_config(path)

import numpy as np
import pytest

from artifact import tables
from artifact.errors import TableLookupError


def test_checksum_and_size():
    entries = tables.load()
    assert len(entries) == 160
    assert all(e.provenance == "published" for e in entries)


def test_classical_constants():
    assert tables.classical_constant(1, "iid") == 0.469
    assert tables.classical_constant(1, "general") == 0.5583


def test_structured_delta1():
    assert tables.structured_constants(1, "iid") == [(0.0, 0.469), (0.429, 0.3322), (0.646, 0.3031)]
    assert tables.M(1) == 0.3031


def test_structured_other_delta():
    pairs = tables.structured_constants(0.5, "general")
    assert pairs[0][0] == 0.0 and len(pairs) >= 2


def test_nonuniform():
    assert (0.0, 21.82) in tables.nonuniform_constants(1, "general")
    assert (0.646, 15.70) in tables.nonuniform_constants(1, "iid")


def test_bikelis():
    assert tables.bikelis_A("general") == 47.65
    assert tables.bikelis_A("iid", 12.0) == 24.13


def test_missing_entry():
    with pytest.raises(TableLookupError):
        tables.lookup("t2_1", 0.55, "iid")


def test_delta_key():
    assert tables.delta_key(1.0) == "1"
    assert tables.delta_key(0.5) == "0.5"
    assert tables.delta_key("1minus") == "1minus"

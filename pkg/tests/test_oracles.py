import math

import pytest

from liegeom import scene

from conftest import fixture_path
from oracles import A, LONGITUDE_WORD, commute, longitude_translation, word_matrix


def test_longitude_word_is_upper_triangular_and_commutes_with_meridian():
    m = word_matrix(LONGITUDE_WORD)
    assert abs(m[1][0]) < 1e-12
    assert commute(m, A)
    assert longitude_translation() == pytest.approx(2j * math.sqrt(3), abs=1e-12)


def test_knot_group_relation():
    # with the lower entry -omega the one-relator presentation reads  w A = b w,  w = A B a b
    lhs = word_matrix("ABab" + "A")
    rhs = word_matrix("b" + "ABab")
    assert all(abs(lhs[i][j] - rhs[i][j]) < 1e-12 for i in range(2) for j in range(2))


@pytest.mark.parametrize("name", ["figure_eight_double", "figure_eight_klein"])
def test_fixture_longitude_matches_oracle(name):
    raw = scene.load(fixture_path(name))
    lam = longitude_translation()
    for v in raw.vertices:
        if v["kind"] != "elemental":
            continue
        for c in v["cusps"]:
            (a, b, cc, d) = (complex(*e) for e in c["generators"][1])
            assert abs(b / a - lam) < 1e-12
            assert cc == 0 and a == d == 1

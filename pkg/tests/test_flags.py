import pytest

from kakeya import Suites


def test_enabled_suites_iterate_in_declaration_order():
    suites = Suites(rotation=True, partition=True)
    assert list(suites) == ['partition', 'rotation']
    assert suites.partition is True
    assert suites.sweep is False
    assert suites.as_bit == Suites.partition | Suites.rotation


def test_flags_can_be_toggled():
    suites = Suites()
    suites.bernstein = True
    assert list(suites) == ['bernstein']
    suites.bernstein = False
    assert list(suites) == []
    assert suites.as_bit == 0


def test_unknown_suite_names():
    with pytest.raises(AttributeError):
        Suites(wavelets=True)
    with pytest.raises(AttributeError):
        Suites(_private=True)


def test_all_suites():
    names = Suites.flag_names()
    assert names[0] == 'partition' and names[-1] == 'sweep'
    assert list(Suites.all()) == names
    assert Suites.all().as_bit == (1 << len(names)) - 1

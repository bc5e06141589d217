"""The nine acceptance criteria, one test each, with a pass/fail line per criterion."""
import pytest

from orbitgauge import acceptance


@pytest.fixture
def report(capsys):
    def emit(result):
        with capsys.disabled():
            print("\n" + result.line())
        return result

    return emit


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, report):
    result = report(acceptance.CRITERIA[number]())
    assert result.number == number
    assert result.passed, result.line()


def test_injected_tree_fault_is_caught(report):
    result = acceptance.criterion_2(inject_fault=True)
    assert not result.passed

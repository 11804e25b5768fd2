import pytest

from instgen.terms import Signature, Sort, SymbolDecl, parse_signature

S = Sort("S")


@pytest.fixture
def fga_sig() -> Signature:
    return parse_signature(
        """
        (declare-sort S 0)
        (declare-fun f (S) S)
        (declare-fun g (S S) S)
        (declare-const a S)
        (declare-const b S)
        (declare-const c S)
        """
    )


def decl(name, *args, result=S):
    return SymbolDecl(name, tuple(args), result)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)

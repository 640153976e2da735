import numpy as np
import pytest

from argmaxlaw.model import (GenericFamily, PerturbedFamily, ProportionalFamily, log_square_inverse,
                             log_square_nu, log_tail, power_tail, rational_perturbation,
                             weibull_family)

_ACCEPTANCE = []


def record_acceptance(name: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((name, passed, detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name} {detail}")


def generic_mix():
    """nu_1 = 1/x, nu_2 = 2/x^2, nu_3 = exp(-ln x |ln x|)."""
    return GenericFamily(
        [lambda x: 1.0 / x, lambda x: 2.0 / x ** 2, log_square_nu],
        [lambda t: 1.0 / t, lambda t: np.sqrt(2.0 / t), log_square_inverse],
        ["1/x", "2/x^2", "exp(-ln x|ln x|)"],
    )


def heterogeneous_families():
    """Five structurally different families used for cross-method checks."""
    return {
        "weibull": weibull_family([1, 2, 3], 1.0),
        "perturbed": PerturbedFamily([1, 2], power_tail(1.0),
                                     rational_perturbation([0.5, -0.3])),
        "generic-mix": generic_mix(),
        "log-tail": ProportionalFamily([0.5, 1.0, 2.0, 4.0], log_tail()),
        "mixed-tails": GenericFamily(
            [lambda x: 1.0 / np.log1p(x), lambda x: 3.0 / x, lambda x: x ** -0.5],
            labels=["1/log(1+x)", "3/x", "x^-1/2"]),
    }


@pytest.fixture
def weibull123():
    return weibull_family([1, 2, 3], 1.0)

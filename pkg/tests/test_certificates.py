import copy

import numpy as np
import pytest

from instances import (ASYMPTOTE_HYPERBOLA, ASYMPTOTIC_PAIR, CIRCLES, DOUBLE_LINE_HYPERBOLA,
                       LINE_BETWEEN_BRANCHES, plain)
from qmeet.certificates import CERT_SCHEMA, check_certificate, check_witness, validate_report
from qmeet.decision import VerdictTag, decide


def _cert(pair):
    v = decide(*pair)
    assert v.tag is VerdictTag.DISJOINT
    return v.certificate


@pytest.mark.parametrize("pair, kind", [
    (DOUBLE_LINE_HYPERBOLA, "AffineReduction"),
    (LINE_BETWEEN_BRANCHES, "PositiveGap"),
    (ASYMPTOTE_HYPERBOLA, "Separation"),
    (ASYMPTOTIC_PAIR, "UnattainedZero"),
    (CIRCLES, "PositiveGap"),
])
def test_emitted_certificates_validate(pair, kind):
    cert = _cert(pair)
    assert cert["type"] == kind
    assert check_certificate(*pair, cert) is None


def test_tampered_positive_gap_is_rejected():
    cert = copy.deepcopy(_cert(CIRCLES))
    cert["gamma"] = 10.0 * cert["gamma"]
    assert check_certificate(*CIRCLES, cert) is not None


def test_tampered_independent_lmi_is_rejected():
    # unit circle and the hyperbola x1 x2 = 2
    f1, f2 = plain(np.eye(2), [0, 0], -1), plain([[0, 0.5], [0.5, 0]], [0, 0], -2)
    cert = copy.deepcopy(_cert((f1, f2)))
    assert cert["case"] == "independent"
    cert["alpha"] *= -1.0
    assert check_certificate(f1, f2, cert) is not None


def test_certificate_for_other_problem_is_rejected():
    # the asymptotic pair is disjoint only thanks to unattainment; the circles certificate does not apply
    assert check_certificate(*ASYMPTOTIC_PAIR, _cert(CIRCLES)) is not None
    # a separation claim on two crossing lines fails
    assert check_certificate(*ASYMPTOTE_HYPERBOLA, _cert(ASYMPTOTIC_PAIR)) is not None


def test_unattained_claim_on_attained_program_is_rejected():
    # a circle and a tangent line: inf{x2 - 1 : |x|^2 - 1 <= 0} = -2, but
    # inf{-(x2 - 1) : ...} = 0 is attained at (0, 1)
    f1, f2 = plain(np.eye(2), [0, 0], -1), plain(np.zeros((2, 2)), [0, 1], -1)
    cert = {"type": "UnattainedZero", "programs": [
        {"objective": 2, "objSign": -1, "constraint": 1, "conSign": 1, "multiplier": 0.5}]}
    assert check_certificate(f1, f2, cert) is not None


def test_malformed_and_unknown():
    assert "unknown" in check_certificate(*DOUBLE_LINE_HYPERBOLA, {"type": "Magic"})
    assert "malformed" in check_certificate(*DOUBLE_LINE_HYPERBOLA, {"type": "PositiveGap"})
    assert check_certificate(*DOUBLE_LINE_HYPERBOLA, None) is not None


def test_witness_check():
    f1, f2 = plain(np.zeros((2, 2)), [1, 0], 0), plain(np.zeros((2, 2)), [0, 1], 0)
    assert check_witness(f1, f2, [0.0, 0.0]) is None
    assert check_witness(f1, f2, [1e-3, 0.0]) is not None
    assert check_witness(f1, f2, [0.0]) is not None


def test_validate_report():
    f1, f2 = ASYMPTOTE_HYPERBOLA
    report = decide(f1, f2).to_dict()
    assert validate_report(f1, f2, report) is None
    assert validate_report(f1, f2, {**report, "schema": "other"}) is not None
    assert validate_report(f1, f2, {"schema": CERT_SCHEMA, "verdict": "INTERSECT", "witness": None}) is not None
    assert validate_report(f1, f2, {"schema": CERT_SCHEMA, "verdict": "UNDECIDED"}) is not None

import pytest

from rslpa import RslpaError
from rslpa.cost import PcVariant, describe_prediction, p_c_value, predict_cost


def test_no_edit_batch_is_free():
    pred = predict_cost(50, 100, 0, 0, 10, PcVariant.CORRECTED)
    assert pred.p_c == 0.0
    assert pred.eta_expected == 0.0
    assert (pred.eta_lower, pred.eta_upper) == (0.0, 0.0)


def test_all_deleted_forces_full_update():
    pred = predict_cost(50, 100, 100, 0, 10)
    assert pred.p_c == 1.0
    assert pred.eta_expected == pytest.approx(10 * 50)
    assert pred.eta_lower == pytest.approx(10 * 50)
    assert pred.eta_upper == pytest.approx(10 * 50)


def test_corrected_closed_form_frozen_values():
    # independently evaluated with exact rationals:
    # pc = 19/100, Q = (0.81, 0.73305, 0.6866235), eta = 38.516325
    pred = predict_cost(50, 100, 10, 10, 3, PcVariant.CORRECTED)
    assert pred.p_c == pytest.approx(0.19)
    assert pred.eta_expected == pytest.approx(38.516325)
    assert pred.eta_lower == pytest.approx(28.5)
    assert pred.eta_upper == pytest.approx(50.12295)


def test_q_recursion_matches_product_form():
    pc = p_c_value(100, 10, 10, PcVariant.CORRECTED)
    q_prod = 1.0
    for t in (1, 2, 3):
        q_prod *= 1 - pc / t
    assert q_prod == pytest.approx(0.6866235)


def test_literal_variant_reproduces_printed_formula():
    # token for token: md/E + (1 - md/E) * ((E - md) / (E - md + ma))
    E, md, ma = 100, 10, 10
    expected = md / E + (1 - md / E) * ((E - md) / (E - md + ma))
    assert p_c_value(E, md, ma, PcVariant.LITERAL) == pytest.approx(expected)


def test_literal_variant_no_edit_pathology():
    # the literal factor is a keep probability, so an empty batch costs
    # everything; that contradiction is why the corrected form is default
    assert p_c_value(100, 0, 0, PcVariant.LITERAL) == pytest.approx(1.0)


def test_corrected_variant_sanity_anchors():
    assert p_c_value(100, 0, 0, PcVariant.CORRECTED) == 0.0
    assert p_c_value(100, 100, 0, PcVariant.CORRECTED) == 1.0


def test_bounds_order_for_corrected_variant():
    for md, ma, T in [(1, 1, 5), (10, 10, 50), (50, 0, 20), (0, 30, 7), (90, 5, 100)]:
        pred = predict_cost(200, 100, md, ma, T, PcVariant.CORRECTED)
        assert 0.0 <= pred.p_c <= 1.0
        assert pred.eta_lower <= pred.eta_expected + 1e-9
        assert pred.eta_expected <= pred.eta_upper + 1e-9


def test_domain_errors():
    with pytest.raises(RslpaError):
        predict_cost(50, 100, 101, 0, 10)
    with pytest.raises(RslpaError):
        predict_cost(50, 0, 1, 0, 10)
    with pytest.raises(RslpaError):
        predict_cost(0, 100, 1, 0, 10)
    with pytest.raises(RslpaError):
        predict_cost(50, 100, 1, 0, 0)


def test_report_documents_variant_discrepancy():
    text = describe_prediction(predict_cost(50, 100, 10, 10, 3))
    assert "pc=0.19" in text
    assert "eta=38.5163" in text
    assert "lower=28.5" in text
    assert "pc_literal=" in text
    assert "keep" in text and "switch" in text  # the documented discrepancy

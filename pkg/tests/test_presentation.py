import pytest

from bordcalc import (
    InputError,
    PresentationSyntaxError,
    ResourceLimitError,
    coset_table_to_group,
    g243_group,
    parse_presentation,
    parse_word,
    todd_coxeter,
)
from bordcalc.presentation import G243_PRESENTATION, evaluate_word_in, word_letters


def test_parse_single_power():
    P = parse_presentation("<a | a^5>")
    assert P.generator_labels == ("a",)
    assert len(P.relators) == 1
    assert P.relators[0] == ((0, 5),)
    assert len(word_letters(P.relators[0])) == 5


def test_parse_q8():
    P = parse_presentation("<a,b | a^2=b^2, a*b*a^-1=b^-1>")
    assert len(P.relators) == 2
    assert P.relators[0] == ((0, 2), (1, -2))
    assert P.relators[1] == ((0, 1), (1, 1), (0, -1), (1, 1))


def test_parse_g243_presentation():
    P = parse_presentation(
        "<a,b,c | a^3=c^3, a^9, b^9, [a,b]=c^8*b^6, [b,c]=a^3, [a,c]=b^3*c^6>"
    )
    assert len(P.relators) == 6
    assert P.generator_labels == ("a", "b", "c")


def test_commutator_convention_left_normed():
    # [x,y] must desugar to x y x^-1 y^-1
    P = parse_presentation("<x,y | [x,y]>")
    assert P.relators[0] == ((0, 1), (1, 1), (0, -1), (1, -1))


def test_parse_errors_carry_position():
    with pytest.raises(PresentationSyntaxError) as exc:
        parse_presentation("<a | a^5")
    assert exc.value.line == 1
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("<a | b^2>")  # unknown generator label
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("<a, a | a^2>")  # duplicate label
    with pytest.raises(PresentationSyntaxError):
        parse_presentation("<a | a^2> trailing")


def test_parentheses_and_negative_exponents():
    P = parse_presentation("<a,b | (a*b)^-2>")
    assert P.relators[0] == ((1, -1), (0, -1), (1, -1), (0, -1))


def test_todd_coxeter_c5():
    T = todd_coxeter(parse_presentation("<a | a^5>"))
    assert T.num_cosets == 5
    G = coset_table_to_group(T)
    assert G.order == 5
    assert G.element_order(G.generators[0]) == 5


def test_todd_coxeter_q8():
    T = todd_coxeter(parse_presentation("<a,b | a^2=b^2, a*b*a^-1=b^-1>"))
    assert T.num_cosets == 8
    G = coset_table_to_group(T)
    # exactly one element of order 2 (the quaternion signature)
    assert G.element_order_histogram() == ((1, 1), (2, 1), (4, 6))


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_todd_coxeter_dihedral_family(k):
    T = todd_coxeter(parse_presentation(f"<a,b | a^2, b^2, (a*b)^{k}>"))
    assert T.num_cosets == 2 * k


def test_todd_coxeter_resource_cap():
    with pytest.raises(ResourceLimitError):
        todd_coxeter(parse_presentation("<a | a^50>"), max_cosets=10)


def test_closed_table_property():
    P = parse_presentation("<a,b | a^3, b^2, (a*b)^2>")
    T = todd_coxeter(P)
    from bordcalc.presentation import _letter_to_col

    for w in P.relators:
        cols = [_letter_to_col(l) for l in word_letters(w)]
        for q in range(T.num_cosets):
            r = q
            for c in cols:
                r = int(T.table[r, c])
            assert r == q


def test_g243_realization(G243):
    assert G243.order == 243
    orders = {G243.element_order(x) for x in G243.elements()}
    assert orders == {1, 3, 9}  # exponent 9
    assert not G243.is_abelian()
    assert evaluate_word_in(G243, "[b,c]*a^-3") == 0
    # every relator evaluates to the identity in the realized group
    P = parse_presentation(G243_PRESENTATION)
    for w in P.relators:
        assert G243.evaluate_word(w) == 0


def test_g243_satisfies_paper_action_equations(G243):
    lab = dict(zip(G243.gen_labels, G243.generators))
    a, b, c = lab["a"], lab["b"], lab["c"]
    ab = G243.mul(a, b)
    assert G243.conj(b, c) == G243.power(c, 4)
    assert G243.conj(ab, b) == G243.mul(G243.power(c, 8), G243.power(b, 7))
    assert G243.conj(ab, c) == G243.mul(c, G243.power(b, 3))


def test_parse_word_over_group_labels(G243):
    w = parse_word("a*b^6", G243.gen_labels)
    lab = dict(zip(G243.gen_labels, G243.generators))
    assert G243.evaluate_word(w) == G243.mul(lab["a"], G243.power(lab["b"], 6))

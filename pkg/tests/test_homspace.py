import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superloc.config import ConfigError, EnumerationLimitError, ModelError, RunConfig
from superloc.homspace import (
    Flag,
    Isotropic,
    Periplectic,
    RootData,
    Verdict,
    WeylElement,
    closure,
    fixed_isotropic,
    fixed_isotropic_bruteforce,
    fixed_periplectic,
    gl_root_data,
    osp_root_data,
    periplectic_formula,
    reflection,
    splitting_chain_report,
    splitting_verdict,
    volume,
    weyl_ratio_flag,
)
from superloc.homspace import fixed_points
from superloc.homspace.volumes import defect_chain, periplectic_chain, point_space
from superloc.qrep import two_pi_over_i_power

RANK = 4


@st.composite
def weyl_elements(draw, rank=RANK):
    perm = draw(st.permutations(range(rank)))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=rank, max_size=rank))
    return WeylElement(tuple(perm), tuple(signs))


vectors = st.lists(st.integers(-3, 3), min_size=RANK, max_size=RANK)


@settings(max_examples=100, deadline=None)
@given(weyl_elements(), weyl_elements(), weyl_elements(), vectors)
def test_weyl_group_axioms(a, b, c, v):
    identity = WeylElement.identity(RANK)
    assert (a * b) * c == a * (b * c)
    assert a * identity == a == identity * a
    assert (a * a.inverse()).is_identity()
    assert (a.inverse() * a).is_identity()
    assert (a * b).act(v) == a.act(b.act(v))


def test_weyl_element_validation():
    with pytest.raises(ConfigError):
        WeylElement((0, 0), (1, 1))
    with pytest.raises(ConfigError):
        WeylElement((0, 1), (1, 2))
    assert WeylElement.from_dict({"perm": [1, 0]}) == WeylElement.transposition(2, 0, 1)


def test_reflections():
    gram = ((1, 0), (0, 1))
    assert reflection((1, -1), gram) == WeylElement.transposition(2, 0, 1)
    assert reflection((0, 2), gram) == WeylElement.sign_change(2, [1])
    with pytest.raises(ModelError):
        reflection((1, 1), ((1, 0), (0, -1)))
    with pytest.raises(ModelError):
        reflection((1, 1), ((1, 0), (0, 2)))


def test_closure_orders():
    transpositions = [WeylElement.transposition(4, i, i + 1) for i in range(3)]
    assert len(closure(transpositions, 4, 10**6)) == 24
    signed = transpositions + [WeylElement.sign_change(4, [3])]
    assert len(closure(signed, 4, 10**6)) == 2**4 * 24
    with pytest.raises(EnumerationLimitError):
        closure(transpositions, 4, 10)


# -- isotrope ----------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 11))
def test_isotropic_count(n):
    fp = fixed_isotropic(n)
    assert fp.count == 2 ** (n - 1)
    assert len(fp.representatives) == fp.count


@pytest.mark.parametrize("n", range(1, 9))
def test_isotropic_matches_exhaustive_search(n):
    assert fixed_isotropic_bruteforce(n) == fixed_isotropic(n).count


@pytest.mark.parametrize("n", [1, 3, 5])
def test_isotropic_oracle_visits_all_of_b(monkeypatch, n):
    monkeypatch.setattr(fixed_points, "_fixes_line", lambda w, alpha: True)
    assert fixed_isotropic_bruteforce(n) == 2 ** (2 * n - 1)


def test_isotropic_oracle_checks_each_alpha(monkeypatch):
    # α_1 n'est plus testé : s^δ_1 devient libre
    monkeypatch.setattr(fixed_points, "_fixes_line", lambda w, alpha: alpha[1] == 0 or w.signs[1] == w.signs[3])
    assert fixed_isotropic_bruteforce(2) == 4


def test_isotropic_representatives_fix_alphas():
    n = 3
    for w in fixed_isotropic(n).representatives:
        for i in range(n):
            alpha = [0] * (2 * n)
            alpha[i], alpha[n + i] = 1, -1
            image = w.act(alpha)
            assert image in (tuple(alpha), tuple(-x for x in alpha))


# -- périplectique -----------------------------------------------------------------


@pytest.mark.parametrize("r, s, expected", [(2, 2, 2), (1, 1, 0), (2, 1, 1), (1, 2, 1), (4, 2, 3), (3, 3, 0)])
def test_periplectic_examples(r, s, expected):
    assert fixed_periplectic(r, s).count == expected


PAIRS = [(r, s) for r in range(1, 9) for s in range(1, 9) if r + s <= 9]


@pytest.mark.parametrize("r, s", PAIRS)
def test_periplectic_matches_binomial(r, s):
    count = fixed_periplectic(r, s).count
    assert count == periplectic_formula(r, s)
    assert count == fixed_periplectic(s, r).count
    assert (count == 0) == (r % 2 == 1 and s % 2 == 1)
    if r % 2 == 0:
        assert count == math.comb((r + s) // 2, r // 2)


def test_periplectic_representatives():
    fp = fixed_periplectic(2, 2)
    assert fp.representatives == ((1, 2), (3, 4))


def test_periplectic_enumeration_bound():
    with pytest.raises(EnumerationLimitError):
        fixed_periplectic(5, 5)
    with pytest.raises(EnumerationLimitError):
        fixed_periplectic(2, 2, RunConfig(max_enum=3))


def test_periplectic_parallel_matches_serial():
    serial = fixed_periplectic(4, 2, RunConfig(workers=1))
    parallel = fixed_periplectic(4, 2, RunConfig(workers=2))
    assert parallel == serial


# -- drapeaux ----------------------------------------------------------------------


GL_SHAPES = [(m, n) for m in range(1, 5) for n in range(1, 5)]


@pytest.mark.parametrize("m, n", GL_SHAPES)
def test_gl_weyl_ratio_is_factorial(m, n):
    d = min(m, n)
    ratio = weyl_ratio_flag(gl_root_data(m, n, d))
    assert ratio.order_w == math.factorial(m) * math.factorial(n)
    assert ratio.ratio == math.factorial(d)


def test_gl_3_2_orders():
    data = gl_root_data(3, 2, 2)
    ratio = weyl_ratio_flag(data)
    assert (ratio.order_w, ratio.order_wd, ratio.order_wc) == (12, 2, 1)
    result = volume(Flag(data))
    assert result.count == 2
    assert result.exponent_m == 4
    assert result.alt_exponent == 8


def test_gl_without_isotropic_roots():
    ratio = weyl_ratio_flag(gl_root_data(2, 2, 0))
    assert ratio.ratio == 1


def test_osp_4_2():
    data = osp_root_data(2, 1, 1)
    assert data.name == "osp(4|2)"
    ratio = weyl_ratio_flag(data)
    # W(D_2) × W(C_1)
    assert ratio.order_w == 4 * 2
    assert (ratio.order_wd, ratio.order_wc) == (2, 1)
    result = volume(Flag(data))
    assert result.count == 2
    assert result.exponent_m == 3


def test_non_integral_ratio_is_a_model_error():
    data = RootData(
        rank=3,
        even_roots=((0, 0, 1), (0, 0, -1)),
        odd_roots=((1, 1, 0), (-1, -1, 0)),
        gram=((1, 0, 0), (0, -1, 0), (0, 0, 1)),
        weyl_generators=(),
        isotropic_roots=((1, 1, 0),),
    )
    with pytest.raises(ModelError):
        weyl_ratio_flag(data)


def test_root_data_validation():
    gram = ((1, 0), (0, -1))
    with pytest.raises(ModelError):
        RootData(2, (), ((1, 0), (-1, 0)), gram, (), isotropic_roots=((1, 0),))
    with pytest.raises(ModelError):
        RootData(2, (), (), gram, (), isotropic_roots=((1, 1),))
    with pytest.raises(ConfigError):
        RootData(2, (), (), ((1, 2), (0, 1)), ())
    with pytest.raises(ConfigError):
        gl_root_data(2, 2, 3)


def test_root_data_round_trip():
    data = gl_root_data(2, 1, 1)
    assert RootData.from_dict(data.to_dict()) == data


def test_root_data_reflection_generators():
    raw = {
        "weights_basis_rank": 3,
        "even_roots": [[1, -1, 0], [-1, 1, 0]],
        "odd_roots": [[1, 0, -1], [-1, 0, 1], [0, 1, -1], [0, -1, 1]],
        "gram": [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
        "weyl_generators": [{"reflection": [1, -1, 0]}],
        "isotropic_roots": [[1, 0, -1]],
    }
    data = RootData.from_dict(raw)
    assert data.weyl_generators == (WeylElement.transposition(3, 0, 1),)
    assert weyl_ratio_flag(data).ratio == 1
    with pytest.raises(ConfigError):
        RootData.from_dict({"gram": [[1]]})


# -- volumes et verdicts -------------------------------------------------------------


def test_periplectic_volume():
    result = volume(Periplectic(2, 2))
    assert result.count == 2
    assert result.exponent_m == 4
    assert result.value_text == "2*(2*pi/i)^4"
    assert result.verdict is Verdict.SPLITTING
    assert result.value == two_pi_over_i_power(4) * 2


def test_vanishing_volume_is_inconclusive():
    result = volume(Periplectic(1, 1))
    assert result.count == 0
    assert result.value_text == "0"
    assert result.value.is_zero
    assert result.verdict is Verdict.INCONCLUSIVE
    assert result.to_dict()["verdict"] == "Inconclusive"


@pytest.mark.parametrize("n", range(1, 7))
def test_isotropic_volume(n):
    result = volume(Isotropic(n))
    assert result.count == 2 ** (n - 1)
    assert result.exponent_m == n * n
    assert result.alt_exponent == 2 * n * n
    assert result.value == two_pi_over_i_power(n * n) * 2 ** (n - 1)


@pytest.mark.parametrize("r, s", [(r, s) for r in range(2, 8, 2) for s in range(1, 7) if r + s <= 8])
def test_periplectic_volume_even_r(r, s):
    result = volume(Periplectic(r, s))
    assert result.value == two_pi_over_i_power(r * s) * math.comb((r + s) // 2, r // 2)


def test_point_space_is_splitting():
    assert splitting_verdict(point_space()) is Verdict.SPLITTING
    assert point_space().value == two_pi_over_i_power(0)


def test_family_parameters_are_validated():
    with pytest.raises(ConfigError):
        Isotropic(0)
    with pytest.raises(ConfigError):
        Periplectic(0, 2)


# -- chaînes -----------------------------------------------------------------------


def test_periplectic_chain_default_parts():
    report = periplectic_chain(4)
    assert not report.broken
    assert report.chain == ["P(2)×P(2)", "P(4)"]
    assert report.conclusion == "P(2)×P(2) is splitting in P(4)"


def test_periplectic_chain_odd_n():
    report = periplectic_chain(5)
    assert not report.broken
    assert len(report.steps) == 2
    assert report.chain[0] == "P(2)×P(2)×P(1)"
    assert report.chain[-1] == "P(5)"


def test_periplectic_chain_broken():
    report = splitting_chain_report("periplectic", {"n": 2, "parts": [1, 1]})
    assert report.broken
    assert report.conclusion == "ChainBroken"
    assert report.to_dict()["steps"][0]["evidence"]["count"] == 0


def test_periplectic_chain_bad_parts():
    with pytest.raises(ConfigError):
        periplectic_chain(4, [3, 2])


def test_defect_chain():
    report = defect_chain(gl_root_data(3, 2, 2))
    assert not report.broken
    assert [s.holds for s in report.steps] == [True, True]
    assert report.conclusion == "D is splitting in gl(3|2)"


def test_unknown_chain_family():
    with pytest.raises(ConfigError):
        splitting_chain_report("spin", {})


@pytest.mark.parametrize(
    "raw",
    [
        {"weights_basis_rank": "x", "gram": [[1]]},
        {"weights_basis_rank": 1, "gram": [[1]], "weyl_generators": [{"reflection": ["a"]}]},
        {"weights_basis_rank": 1, "gram": [[1]], "weyl_generators": [None]},
    ],
)
def test_root_data_rejects_non_integer_entries(raw):
    with pytest.raises(ConfigError):
        RootData.from_dict(raw)

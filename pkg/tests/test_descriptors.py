import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boolvol import zoo
from boolvol.zoo import DescriptorError, build_function, catalog_text, format_function, parse_descriptor
from boolvol.zoo.descriptors import CATALOG


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_examples_round_trip(name):
    example = CATALOG[name][4]
    f = build_function(example)
    again = build_function(format_function(f))
    assert format_function(again) == format_function(f)
    assert again.n == f.n
    vals_f = f.values if isinstance(f, zoo.CircleFunction) else None
    if vals_f is not None:
        assert np.array_equal(vals_f, again.values)


def test_catalog_text_lists_every_family():
    text = catalog_text()
    for name in ("striped", "block", "pinned", "circle", "lift"):
        assert f"{name}{{" in text
    for name, spec in CATALOG.items():
        assert spec[4] in text
        build_function(spec[4])


def test_bare_base_inherits_n():
    f = build_function("striped{base=majority,n=10001,p=0.5}")
    assert isinstance(f.base, zoo.Majority) and f.base.n == 10001
    g = build_function("pinned{base=block{n=10},n=10,k=3}")
    assert g.k == 3 and isinstance(g.base, zoo.BlockFunction)


def test_nested_modifications():
    f = build_function("pinned{base=striped{base=parity,n=64,p=0.5},k=2}")
    assert f.n == 64 and isinstance(f.base, zoo.StripedModification)
    assert build_function(f.descriptor).descriptor == f.descriptor


def test_lift_dimension_and_defaults():
    g = build_function("lift{n=64,k=3}")
    assert g.n == 64 * 64
    assert not g.circle.strict
    with pytest.raises(DescriptorError) as err:
        build_function("circle{n=64,k=3}")
    assert isinstance(err.value.__cause__, zoo.MembershipError)
    assert not build_function("circle{n=64,k=3,strict=0}").is_member


@pytest.mark.parametrize("text,needle", [
    ("foo{}", "unknown function 'foo'"),
    ("majorty{n=3}", "did you mean 'majority'"),
    ("dictator{n=3", "expected"),
    ("dictator{n=3,n=4}", "duplicate parameter"),
    ("dictator{m=3}", "m"),
    ("majority{n=4}", "odd"),
    ("parity{n=3}#", "unexpected character"),
])
def test_errors(text, needle):
    with pytest.raises((DescriptorError, ValueError)) as err:
        build_function(text)
    assert needle in str(err.value)


def test_error_reports_column():
    with pytest.raises(DescriptorError) as err:
        parse_descriptor("dictator{n=3,,}")
    assert err.value.pos == 13
    assert "column 14" in str(err.value)


simple = st.one_of(
    st.builds(lambda n: f"dictator{{n={n}}}", st.integers(1, 50)),
    st.builds(lambda n: f"parity{{n={n}}}", st.integers(1, 50)),
    st.builds(lambda n: f"majority{{n={2 * n + 1}}}", st.integers(0, 25)),
    st.builds(lambda n: f"block{{n={n}}}", st.integers(1, 50)),
    st.builds(lambda n, v: f"constant{{n={n},v={v}}}", st.integers(1, 50), st.sampled_from([-1, 1])),
)


@given(simple, st.integers(1, 3))
def test_round_trip_property(text, k):
    f = build_function(text)
    assert build_function(format_function(f)).descriptor == f.descriptor
    if k <= f.n:
        g = zoo.pinned_modification(f, k)
        assert build_function(g.descriptor).descriptor == g.descriptor


def test_strict_flag_spellings():
    assert not build_function("circle{n=64,k=3,strict=false}").strict
    assert build_function("circle{n=4096,k=3,strict=true}").strict
    for bad in ("circle{n=64,k=3,strict=2}", "circle{n=64,k=3,strict=maybe}"):
        with pytest.raises(DescriptorError):
            build_function(bad)

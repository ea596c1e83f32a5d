"""Wire formats: group specs, state specs, hashing, and the build cache."""

import json

import numpy as np
import pytest

from qpermlab import states as st
from qpermlab.errors import InvalidSpec
from qpermlab.specs import (
    HopfCache,
    build_magic,
    build_state,
    canonical_hash,
    resolve_group_spec,
    sig12,
)


@pytest.fixture(scope="module")
def cache():
    return HopfCache()


def test_group_spec_kinds(cache):
    assert build_magic({"kind": "symmetric", "n": 3}).n == 3
    assert build_magic({"kind": "kac_paljutkin"}).n == 4
    spec = {"kind": "dual", "cayley": [[0, 1], [1, 0]], "identity": 0,
            "generators": [1], "label": "Z2-hat"}
    u = build_magic(spec)
    assert u.n == 2 and u.label == "Z2-hat"
    rep = build_magic({"kind": "repeat", "part": {"kind": "kac_paljutkin"}, "times": 2})
    assert rep.n == 8
    ds = build_magic({"kind": "direct_sum",
                      "parts": [{"kind": "symmetric", "n": 3}, {"kind": "kac_paljutkin"}]})
    assert ds.n == 7


def test_presets_resolve(cache):
    for name in ("kac_paljutkin", "s3", "s4", "dual-s3", "dual-s4", "dual-q8"):
        spec = resolve_group_spec(name)
        assert build_magic(spec).n >= 2


def test_inline_json_and_errors():
    spec = resolve_group_spec('{"kind": "symmetric", "n": 3}')
    assert spec["kind"] == "symmetric"
    with pytest.raises(InvalidSpec):
        resolve_group_spec("no-such-preset")
    with pytest.raises(InvalidSpec):
        build_magic({"kind": "wat"})
    with pytest.raises(InvalidSpec):
        build_magic({"kind": "symmetric"})


def test_canonical_hash_is_order_insensitive():
    a = canonical_hash({"kind": "symmetric", "n": 4})
    b = canonical_hash({"n": 4, "kind": "symmetric"})
    assert a == b
    assert a != canonical_hash({"kind": "symmetric", "n": 3})


def test_cache_returns_same_object(cache):
    h1 = cache.get("kac_paljutkin")
    h2 = cache.get({"kind": "kac_paljutkin"})
    assert h1 is h2


def test_state_specs(cache):
    h = cache.get("kac_paljutkin")
    assert np.max(np.abs(build_state(h, {"kind": "haar"}).coords - h.haar_vec)) < 1e-12
    assert np.max(np.abs(build_state(h, "counit").coords - h.counit_vec)) < 1e-12

    character = build_state(h, {"kind": "character", "perm": [2, 1, 3, 4]})
    assert st.birkhoff_slice(character).is_permutation() == (1, 0, 2, 3)

    vec = build_state(h, {"kind": "vector", "coords": [[0, 0]] * 4 + [[1, 0], [0, 0]]})
    assert vec.prob(0, 2) == pytest.approx(0.5)

    rho = np.zeros((6, 6)); rho[0, 0] = 1.0
    density = build_state(h, {"kind": "density",
                              "matrix": [[[float(x.real), float(x.imag)] for x in row]
                                         for row in rho.astype(complex)]})
    assert np.max(np.abs(density.coords - h.counit_vec)) < 1e-10

    mixture = build_state(h, {"kind": "mix", "terms": [
        {"w": 0.5, "state": {"kind": "haar"}},
        {"w": 0.5, "state": {"kind": "counit"}},
    ]})
    expected = 0.5 * np.asarray(h.haar_vec) + 0.5 * np.asarray(h.counit_vec)
    assert np.max(np.abs(mixture.coords - expected)) < 1e-12

    conditioned = build_state(h, {"kind": "conditioned", "base": {"kind": "haar"},
                                  "events": [[3, 1]]})
    direct = st.condition(st.haar_state(h), (2, 0))
    assert np.max(np.abs(conditioned.coords - direct.coords)) < 1e-12


def test_pdf_state_spec(cache):
    h = cache.get("dual-s3")
    table = h.magic.group_table
    values = {str(table.identity): [1.0, 0.0]}
    phi = build_state(h, {"kind": "pdf", "values": values})
    # delta_e is the Haar state of the dual
    assert np.max(np.abs(phi.coords - h.haar_vec)) < 1e-9


def test_state_spec_errors(cache):
    h = cache.get("kac_paljutkin")
    with pytest.raises(InvalidSpec):
        build_state(h, {"kind": "wat"})
    with pytest.raises(InvalidSpec):
        build_state(h, {"kind": "character"})
    with pytest.raises(InvalidSpec):
        build_state(h, ["not", "a", "spec"])


def test_sig12_rounding():
    assert sig12(0.123456789012345) == 0.123456789012
    assert json.dumps(sig12(1 / 3)) == "0.333333333333"


def test_cache_concurrent_access_builds_once():
    import concurrent.futures

    from qpermlab.specs import HopfCache

    fresh = HopfCache()
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        built = list(pool.map(lambda _: fresh.get("kac_paljutkin"), range(16)))
    assert all(h is built[0] for h in built)
